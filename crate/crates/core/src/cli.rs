//! Command-line front end: one subcommand per check, each writing a JSON
//! report and optionally a per-trial CSV.
//!
//! Exit codes: 0 when the check passes, 1 when it fails, 2 on usage or
//! parameter errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::circuits::{lightcone_report, random_brickwork, random_layered_circuit, schmidt_rank_audit, Geometry, LayeredCircuit};
use crate::ensembles::{PhaseMode, StateEnsembleSpec, UnitaryEnsembleSpec};
use crate::error::{ensure, Error, Result};
use crate::experiments::{
    circuit_advantage, kwise_marginal_check, lindep_distinguisher, pru_parallel_game, pseudoentanglement_report, Readout, TrialRecord,
};
use crate::gf2::verify_kwise;
use crate::moments::{
    empirical_moment, frame_distance, haar_moment, moment_distance, offdiag_check, purity_expectation_check, subspace_design_check, EXACT_TOL,
    Z_PASS,
};
use crate::rng::Seed;
use crate::statevec::Schatten;

#[derive(Parser, Debug)]
#[command(name = "shallow-prs", version, about = "Finite-size checks of pseudorandom states and unitaries against shallow circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Serialize)]
struct Common {
    /// Master seed; each subcommand derives its own stream from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Write per-trial records (trial_index, arm, statistic, value) here.
    #[arg(long)]
    #[serde(skip)]
    csv: Option<PathBuf>,
    /// Cap on worker threads; results do not depend on it.
    #[arg(long)]
    #[serde(skip)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mean reduced purity Tr(ρ_A²) on the first k qubits against the Haar value (2^k + 2^{n−k})/(2^n + 1).
    PurityCheck(PurityArgs),
    /// Cross-term partial trace E‖Tr_B(U|v⟩⟨w|U†)‖₂² under a unitary ensemble against its Haar value and the 2^{k−n} bound.
    OffdiagCheck(OffdiagArgs),
    /// Schatten distance between an ensemble's t-th moment operator and the Haar moment.
    MomentDistance(MomentArgs),
    /// Frame potential E|⟨ψ|ψ′⟩|^{2t} and the Frobenius moment distance it implies.
    FramePotential(FrameArgs),
    /// Moment distance of 4-wise phased subspace states against the closed-form design bound.
    SubspaceDesign(SubspaceDesignArgs),
    /// Linear-dependence test on d+1 computational-basis samples, ensemble arm against Haar.
    Lindep(LindepArgs),
    /// Output-distribution distance of a measured circuit fed t copies from two ensembles.
    Advantage(AdvantageArgs),
    /// Max TV of k-bit output marginals against uniform ⊗ corrupted-set reference.
    KwiseMarginals(MarginalArgs),
    /// Parallel-query game: U^⊗t after a 1-D local pre-circuit, k-qubit reduced states against the (r+1)·2^{k−n/2} bound.
    PruParallel(PruArgs),
    /// Entanglement entropy at every contiguous cut, subspace states against Haar states.
    Pseudoentanglement(EntanglementArgs),
    /// Backward cones of every output and the forward cone of the ancillae.
    Lightcone(CircuitArgs),
    /// Schmidt rank of C|0ⁿ⟩ at every contiguous cut against 4^depth.
    SchmidtAudit(CircuitArgs),
    /// Exhaustive seed enumeration of the polynomial k-wise family on GF(2^m).
    KwiseVerify(KwiseVerifyArgs),
}

/// Ensemble flags: a name or an inline JSON spec.
#[derive(Args, Debug, Serialize)]
struct EnsembleArgs {
    /// haar, stabilizer, subspace-kwise, subspace-random, subspace-kwise-ambient, basis, or a JSON spec.
    #[arg(long, default_value = "haar")]
    ensemble: String,
    /// Subspace dimension for the subspace ensembles.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct PurityArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    #[serde(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct OffdiagArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// haar, clifford, or a JSON spec.
    #[arg(long, default_value = "haar")]
    unitary: String,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
enum Norm {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
}

#[derive(Args, Debug, Serialize)]
struct MomentArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[command(flatten)]
    #[serde(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, value_enum, default_value = "1")]
    schatten: Norm,
    /// Fail when the distance exceeds this; defaults to exact equality for enumerable ensembles.
    #[arg(long)]
    tolerance: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct FrameArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[command(flatten)]
    #[serde(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct SubspaceDesignArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct LindepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value = "subspace-kwise")]
    ensemble: String,
    #[arg(long, default_value_t = 5000)]
    trials: usize,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum Expect {
    /// Pass when the advantage is within the plug-in noise floor.
    Indistinguishable,
    /// Pass when the advantage clears the noise floor.
    Distinguishable,
}

/// Circuit source: a JSON file, or a random circuit drawn from the seed.
#[derive(Args, Debug, Serialize)]
struct CircuitSource {
    /// Circuit JSON file.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Depth of the random circuit used when no file is given.
    #[arg(long, default_value_t = 0)]
    depth: usize,
    /// Ancillae of the random circuit; any value above 0 drops the line geometry.
    #[arg(long, default_value_t = 0)]
    ancillae: usize,
}

#[derive(Args, Debug, Serialize)]
struct AdvantageArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long)]
    ensemble_a: String,
    #[arg(long, default_value = "haar")]
    ensemble_b: String,
    /// Comma-separated output wires; omitted with --readout lindep.
    #[arg(long, value_delimiter = ',')]
    output_bits: Vec<usize>,
    /// Apply the F₂ dependence test to the t measured n-bit blocks instead of histogramming bits.
    #[arg(long, value_parser = ["lindep"])]
    readout: Option<String>,
    #[arg(long, value_enum, default_value = "indistinguishable")]
    expect: Expect,
    #[arg(long, default_value_t = 5000)]
    trials: usize,
    #[command(flatten)]
    #[serde(flatten)]
    source: CircuitSource,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct MarginalArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    t: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    subsets: usize,
    #[command(flatten)]
    #[serde(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 4000)]
    trials: usize,
    #[command(flatten)]
    #[serde(flatten)]
    source: CircuitSource,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct PruArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// haar, clifford, or a JSON spec.
    #[arg(long, default_value = "haar")]
    unitary: String,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    /// Pre-circuit JSON file on t·n wires; otherwise random line brickwork of --depth.
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    depth: usize,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct EntanglementArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct CircuitArgs {
    /// System qubits of the random circuit used when no file is given.
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    source: CircuitSource,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct KwiseVerifyArgs {
    /// Field degree: inputs and outputs of the family live in GF(2^m).
    #[arg(long)]
    m: u32,
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Number of random input k-subsets; all of them when there are no more than this.
    #[arg(long, default_value_t = 50)]
    subsets: usize,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

/// What a subcommand hands back for writing.
struct Outcome {
    report: Value,
    pass: bool,
    records: Vec<TrialRecord>,
}

impl Outcome {
    fn new(report: impl Serialize, pass: bool) -> Result<Self> {
        Ok(Outcome { report: to_value(report)?, pass, records: Vec::new() })
    }
}

fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_state_ensemble(name: &str, n: usize, d: Option<usize>) -> Result<StateEnsembleSpec> {
    let subspace = |phase_mode| -> Result<StateEnsembleSpec> {
        let d = d.ok_or_else(|| Error::Domain(format!("ensemble {name} needs --d")))?;
        Ok(StateEnsembleSpec::PhasedSubspace { n, d, phase_mode })
    };
    let spec = match name {
        "haar" => StateEnsembleSpec::Haar { n },
        "stabilizer" => StateEnsembleSpec::Stabilizer { n },
        "basis" => StateEnsembleSpec::ComputationalBasis { n },
        "subspace-kwise" => subspace(PhaseMode::Kwise4)?,
        "subspace-random" => subspace(PhaseMode::TrueRandom)?,
        "subspace-kwise-ambient" => subspace(PhaseMode::Kwise4Ambient)?,
        json if json.trim_start().starts_with('{') => json.parse()?,
        other => return Err(Error::Parse(format!("unknown ensemble {other:?}"))),
    };
    spec.validate()?;
    ensure!(spec.num_qubits() == n, Dimension, "ensemble acts on {} qubits, --n is {n}", spec.num_qubits());
    Ok(spec)
}

pub fn parse_unitary_ensemble(name: &str, n: usize) -> Result<UnitaryEnsembleSpec> {
    let spec = match name {
        "haar" => UnitaryEnsembleSpec::Haar { n },
        "clifford" => UnitaryEnsembleSpec::Clifford { n },
        json if json.trim_start().starts_with('{') => json.parse()?,
        other => return Err(Error::Parse(format!("unknown unitary ensemble {other:?}"))),
    };
    spec.validate()?;
    ensure!(spec.num_qubits() == n, Dimension, "ensemble acts on {} qubits, --n is {n}", spec.num_qubits());
    Ok(spec)
}

fn read_circuit(path: &Path) -> Result<LayeredCircuit> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?.parse()
}

/// The circuit named by `source`, or a random one on `wires` system qubits:
/// line brickwork without ancillae, an unconstrained layered circuit with them.
fn load_circuit(source: &CircuitSource, wires: usize, seed: Seed) -> Result<LayeredCircuit> {
    if let Some(path) = &source.circuit {
        let c = read_circuit(path)?;
        ensure!(c.num_system_qubits() == wires, Dimension, "circuit has {} system qubits, expected {wires}", c.num_system_qubits());
        return Ok(c);
    }
    ensure!(wires >= 1, Domain, "give --circuit or a positive --n");
    let mut rng = seed.derive("circuit").rng();
    if source.ancillae > 0 {
        random_layered_circuit(wires, source.ancillae, source.depth, &mut rng)
    } else {
        random_brickwork(wires, source.depth, Geometry::Line, &mut rng)
    }
}

fn execute(command: &Command, seed: Seed) -> Result<Outcome> {
    match command {
        Command::PurityCheck(a) => {
            let spec = parse_state_ensemble(&a.ensemble.ensemble, a.n, a.ensemble.d)?;
            let r = purity_expectation_check(a.n, a.k, &spec, a.samples, seed)?;
            Outcome::new(r, r.pass)
        }
        Command::OffdiagCheck(a) => {
            let spec = parse_unitary_ensemble(&a.unitary, a.n)?;
            let r = offdiag_check(a.n, a.k, &spec, a.samples, seed, None)?;
            Outcome::new(r, r.pass)
        }
        Command::MomentDistance(a) => {
            let spec = parse_state_ensemble(&a.ensemble.ensemble, a.n, a.ensemble.d)?;
            let m = empirical_moment(&spec, a.t, a.samples, seed)?;
            let p = match a.schatten {
                Norm::One => Schatten::One,
                Norm::Two => Schatten::Two,
            };
            let distance = moment_distance(&m, &haar_moment(a.n, a.t)?, p)?;
            let tolerance = a.tolerance.or(m.is_exact().then_some(EXACT_TOL));
            let pass = tolerance.is_none_or(|tol| distance <= tol);
            Outcome::new(json!({ "distance": distance, "exact": m.is_exact(), "samples": m.sample_count(), "tolerance": tolerance }), pass)
        }
        Command::FramePotential(a) => {
            let spec = parse_state_ensemble(&a.ensemble.ensemble, a.n, a.ensemble.d)?;
            let r = frame_distance(&spec, a.t, a.pairs, seed)?;
            // The Haar value is the minimum over all ensembles.
            let pass = r.frame.mean + Z_PASS * r.frame.stderr >= r.haar_frame;
            Outcome::new(r, pass)
        }
        Command::SubspaceDesign(a) => {
            let r = subspace_design_check(a.n, a.d, a.t, a.pairs, seed)?;
            Outcome::new(r, r.pass)
        }
        Command::Lindep(a) => {
            let spec = parse_state_ensemble(&a.ensemble, a.n, Some(a.d))?;
            let r = lindep_distinguisher(a.n, a.d, &spec, a.trials, seed)?;
            let haar = r.accept_prob_haar.expect("lindep reports both arms");
            let pass = r.bound_vacuous || haar.mean <= r.analytic_bound.expect("lindep has a bound") + Z_PASS * haar.stderr;
            let records = r.records.clone();
            Ok(Outcome { records, ..Outcome::new(r, pass)? })
        }
        Command::Advantage(a) => {
            let spec_a = parse_state_ensemble(&a.ensemble_a, a.n, a.d)?;
            let spec_b = parse_state_ensemble(&a.ensemble_b, a.n, a.d)?;
            let c = load_circuit(&a.source, a.n * a.t, seed)?;
            let readout = match a.readout.as_deref() {
                Some(_) => Readout::linear_dependence(a.n, a.t),
                None => {
                    ensure!(!a.output_bits.is_empty(), Domain, "give --output-bits or --readout lindep");
                    Readout::Bits(a.output_bits.clone())
                }
            };
            let r = circuit_advantage(&c, &readout, &spec_a, &spec_b, a.t, a.trials, seed)?;
            let pass = r.consistent_with_zero == (a.expect == Expect::Indistinguishable);
            let records = r.records.clone();
            Ok(Outcome { records, ..Outcome::new(r, pass)? })
        }
        Command::KwiseMarginals(a) => {
            let spec = parse_state_ensemble(&a.ensemble.ensemble, a.n, a.ensemble.d)?;
            let c = load_circuit(&a.source, a.n * a.t, seed)?;
            let r = kwise_marginal_check(&c, &spec, a.t, a.k, a.subsets, a.trials, seed)?;
            Outcome::new(&r, r.consistent_with_reference)
        }
        Command::PruParallel(a) => {
            let spec = parse_unitary_ensemble(&a.unitary, a.n)?;
            let pre = match &a.circuit {
                Some(path) => read_circuit(path)?,
                None => random_brickwork(a.n * a.t, a.depth, Geometry::Line, &mut seed.derive("circuit").rng())?,
            };
            let r = pru_parallel_game(a.n, a.t, &pre, &spec, a.k, a.trials, seed)?;
            let records = r
                .max_trace_norm
                .iter()
                .enumerate()
                .map(|(i, &value)| TrialRecord { trial_index: i, arm: a.unitary.clone(), statistic: "max_trace_norm".into(), value })
                .collect();
            Ok(Outcome { records, ..Outcome::new(&r, r.report.pass)? })
        }
        Command::Pseudoentanglement(a) => {
            let r = pseudoentanglement_report(a.n, a.d, a.samples, seed)?;
            Outcome::new(&r, r.within_ceiling)
        }
        Command::Lightcone(a) => {
            let c = load_circuit(&a.source, a.n, seed)?;
            Outcome::new(lightcone_report(&c)?, true)
        }
        Command::SchmidtAudit(a) => {
            let c = load_circuit(&a.source, a.n, seed)?;
            let r = schmidt_rank_audit(&c)?;
            Outcome::new(&r, r.pass)
        }
        Command::KwiseVerify(a) => {
            let r = verify_kwise(a.m, a.k, a.subsets, &mut seed.rng())?;
            Outcome::new(&r, r.uniform)
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::PurityCheck(_) => "purity-check",
            Command::OffdiagCheck(_) => "offdiag-check",
            Command::MomentDistance(_) => "moment-distance",
            Command::FramePotential(_) => "frame-potential",
            Command::SubspaceDesign(_) => "subspace-design",
            Command::Lindep(_) => "lindep",
            Command::Advantage(_) => "advantage",
            Command::KwiseMarginals(_) => "kwise-marginals",
            Command::PruParallel(_) => "pru-parallel",
            Command::Pseudoentanglement(_) => "pseudoentanglement",
            Command::Lightcone(_) => "lightcone",
            Command::SchmidtAudit(_) => "schmidt-audit",
            Command::KwiseVerify(_) => "kwise-verify",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::PurityCheck(a) => &a.common,
            Command::OffdiagCheck(a) => &a.common,
            Command::MomentDistance(a) => &a.common,
            Command::FramePotential(a) => &a.common,
            Command::SubspaceDesign(a) => &a.common,
            Command::Lindep(a) => &a.common,
            Command::Advantage(a) => &a.common,
            Command::KwiseMarginals(a) => &a.common,
            Command::PruParallel(a) => &a.common,
            Command::Pseudoentanglement(a) => &a.common,
            Command::Lightcone(a) => &a.common,
            Command::SchmidtAudit(a) => &a.common,
            Command::KwiseVerify(a) => &a.common,
        }
    }

    fn params(&self) -> Result<Value> {
        match self {
            Command::PurityCheck(a) => to_value(a),
            Command::OffdiagCheck(a) => to_value(a),
            Command::MomentDistance(a) => to_value(a),
            Command::FramePotential(a) => to_value(a),
            Command::SubspaceDesign(a) => to_value(a),
            Command::Lindep(a) => to_value(a),
            Command::Advantage(a) => to_value(a),
            Command::KwiseMarginals(a) => to_value(a),
            Command::PruParallel(a) => to_value(a),
            Command::Pseudoentanglement(a) => to_value(a),
            Command::Lightcone(a) => to_value(a),
            Command::SchmidtAudit(a) => to_value(a),
            Command::KwiseVerify(a) => to_value(a),
        }
    }
}

fn write_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let io = |e: csv::Error| Error::Resource(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    if records.is_empty() {
        w.write_record(["trial_index", "arm", "statistic", "value"]).map_err(io)?;
    }
    for r in records {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Resource(format!("{}: {e}", path.display())))
}

/// Runs the subcommand and writes its outputs; returns the pass flag.
fn run_command(command: &Command) -> Result<bool> {
    let common = command.common();
    let seed = Seed(common.seed).derive(command.name());
    let outcome = match common.threads {
        Some(threads) => {
            ensure!(threads >= 1, Domain, "--threads must be positive");
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::Resource(e.to_string()))?;
            pool.install(|| execute(command, seed))?
        }
        None => execute(command, seed)?,
    };
    let report = json!({
        "command": command.name(),
        "params": command.params()?,
        "pass": outcome.pass,
        "report": outcome.report,
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Parse(e.to_string()))? + "\n";
    match &common.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Resource(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    if let Some(path) = &common.csv {
        write_csv(path, &outcome.records)?;
    }
    Ok(outcome.pass)
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_command(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ensemble_names() {
        assert_eq!(parse_state_ensemble("haar", 3, None).unwrap(), StateEnsembleSpec::Haar { n: 3 });
        assert_eq!(
            parse_state_ensemble("subspace-random", 5, Some(2)).unwrap(),
            StateEnsembleSpec::PhasedSubspace { n: 5, d: 2, phase_mode: PhaseMode::TrueRandom }
        );
        assert!(parse_state_ensemble("subspace-kwise", 5, None).is_err());
        assert!(parse_state_ensemble("gaussian", 5, None).is_err());
        let inline = parse_state_ensemble(r#"{"variant":"stabilizer","n":4}"#, 4, None).unwrap();
        assert_eq!(inline, StateEnsembleSpec::Stabilizer { n: 4 });
        assert!(parse_state_ensemble(r#"{"variant":"stabilizer","n":4}"#, 5, None).is_err());
        assert_eq!(parse_unitary_ensemble("clifford", 2).unwrap(), UnitaryEnsembleSpec::Clifford { n: 2 });
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["shallow-prs", "purity-check", "--n", "2", "--k", "1", "--bogus"]), 2);
        assert_eq!(run(["shallow-prs", "no-such-command"]), 2);
        assert_eq!(run(["shallow-prs", "purity-check", "--n", "2", "--k", "5", "--samples", "10"]), 2);
        assert_eq!(run(["shallow-prs", "lindep", "--n", "4", "--d", "4", "--trials", "10"]), 2);
    }

    #[test]
    fn reports_and_csv_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.json");
        let csv = dir.path().join("r.csv");
        let argv = |threads: &str| {
            let mut v: Vec<String> = ["shallow-prs", "lindep", "--n", "6", "--d", "2", "--trials", "100", "--seed", "9", "--threads", threads]
                .iter()
                .map(|s| s.to_string())
                .collect();
            v.extend(["--out".into(), out.display().to_string(), "--csv".into(), csv.display().to_string()]);
            v
        };
        assert_eq!(run(argv("1")), 0);
        let first = fs::read_to_string(&out).unwrap();
        assert_eq!(run(argv("2")), 0);
        assert_eq!(fs::read_to_string(&out).unwrap(), first);

        let report: Value = serde_json::from_str(&first).unwrap();
        assert_eq!(report["command"], "lindep");
        assert_eq!(report["params"]["seed"], 9);
        assert!(report["params"].get("threads").is_none());
        let rows = fs::read_to_string(&csv).unwrap();
        let mut lines = rows.lines();
        assert_eq!(lines.next(), Some("trial_index,arm,statistic,value"));
        assert_eq!(lines.count(), 200);

        // A failing check still writes its report.
        let fail = dir.path().join("f.json");
        let code = run(["shallow-prs", "advantage", "--n", "4", "--d", "2", "--t", "2", "--ensemble-a", "subspace-kwise", "--readout", "lindep", "--trials", "300", "--out", fail.to_str().unwrap()]);
        assert_eq!(code, 1);
        let report: Value = serde_json::from_str(&fs::read_to_string(&fail).unwrap()).unwrap();
        assert_eq!(report["pass"], false);
    }

    #[test]
    fn kwise_verify_and_schmidt_audit_pass() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("k.json");
        assert_eq!(run(["shallow-prs", "kwise-verify", "--m", "2", "--out", out.to_str().unwrap()]), 0);
        let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(report["report"]["expected_count"], 16);
        assert_eq!(run(["shallow-prs", "schmidt-audit", "--n", "6", "--depth", "2", "--out", out.to_str().unwrap()]), 0);
        assert_eq!(run(["shallow-prs", "schmidt-audit", "--n", "6", "--depth", "1", "--ancillae", "1", "--out", out.to_str().unwrap()]), 2);
    }
}
