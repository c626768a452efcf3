//! Mean reduced purity of Haar and stabilizer states against
//! (2^k + 2^{n−k})/(2^n + 1).

use shallow_prs::ensembles::StateEnsembleSpec;
use shallow_prs::moments::purity_expectation_check;
use shallow_prs::rng::Seed;

fn main() -> shallow_prs::Result<()> {
    for (n, k) in [(2, 1), (4, 2), (8, 2)] {
        for (name, spec) in [("Haar", StateEnsembleSpec::Haar { n }), ("stabilizer", StateEnsembleSpec::Stabilizer { n })] {
            let r = purity_expectation_check(n, k, &spec, 20_000, Seed(1).derive(&format!("{n}-{k}")))?;
            println!(
                "n={n} k={k} {name:<10} target {:.6} measured {:.6} ± {:.6} pass {}",
                r.target,
                r.measured,
                r.stderr,
                r.pass
            );
        }
    }
    Ok(())
}
