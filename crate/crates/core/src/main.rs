fn main() {
    std::process::exit(shallow_prs::cli::run(std::env::args_os()));
}
