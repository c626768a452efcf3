//! Sampling the state and unitary ensembles, and their JSON specs.

use shallow_prs::ensembles::{enumerate_stabilizer_states, PhaseMode, StateEnsembleSpec, UnitaryEnsembleSpec};
use shallow_prs::rng::Seed;
use shallow_prs::statevec::schmidt_rank_at;

fn main() -> shallow_prs::Result<()> {
    let mut rng = Seed(11).rng();
    let specs = [
        StateEnsembleSpec::Haar { n: 8 },
        StateEnsembleSpec::Stabilizer { n: 8 },
        StateEnsembleSpec::PhasedSubspace { n: 8, d: 3, phase_mode: PhaseMode::Kwise4 },
        StateEnsembleSpec::ComputationalBasis { n: 8 },
    ];
    for spec in &specs {
        let psi = spec.sample(&mut rng)?;
        let support = psi.probabilities().iter().filter(|&&p| p > 1e-12).count();
        println!("{:<70} support {support:>3}, rank at 4|4 = {}", serde_json::to_string(spec).unwrap(), schmidt_rank_at(&psi, 4)?);
    }

    for n in 1..=3 {
        println!("{n}-qubit stabilizer states: {}", enumerate_stabilizer_states(n)?.len());
    }

    let spec: UnitaryEnsembleSpec = r#"{"variant":"clifford","n":3}"#.parse()?;
    let u = spec.sample(&mut rng)?;
    println!("Clifford(3) unitarity residual {:.2e}", u.unitarity_residual());
    let u = UnitaryEnsembleSpec::Haar { n: 4 }.sample(&mut rng)?;
    println!("Haar(4) unitarity residual {:.2e}", u.unitarity_residual());
    Ok(())
}
