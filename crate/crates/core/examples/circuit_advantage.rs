//! Distinguishing advantage of measured circuits fed copies of a state.

use shallow_prs::circuits::{random_brickwork, Geometry, LayeredCircuit};
use shallow_prs::ensembles::{PhaseMode, StateEnsembleSpec};
use shallow_prs::experiments::{circuit_advantage, Readout};
use shallow_prs::rng::Seed;

fn main() -> shallow_prs::Result<()> {
    let haar = StateEnsembleSpec::Haar { n: 10 };

    // Measuring 4 copies and testing F₂-dependence separates subspace states.
    let subspace = StateEnsembleSpec::PhasedSubspace { n: 10, d: 3, phase_mode: PhaseMode::Kwise4 };
    let r = circuit_advantage(&LayeredCircuit::empty(40), &Readout::linear_dependence(10, 4), &subspace, &haar, 4, 2000, Seed(1))?;
    println!("subspace vs Haar, lindep readout: advantage {:.3}", r.advantage);

    // A depth-2 brickwork and a single output bit cannot tell stabilizer from Haar.
    let c = random_brickwork(10, 2, Geometry::Line, &mut Seed(2).rng())?;
    let r = circuit_advantage(&c, &Readout::Bits(vec![5]), &StateEnsembleSpec::Stabilizer { n: 10 }, &haar, 1, 4000, Seed(3))?;
    let b = r.bootstrap.unwrap();
    println!(
        "stabilizer vs Haar, 1 bit after depth 2: TV {:.4}, noise floor {:.4} ± {:.4}, consistent with 0: {}",
        r.advantage, b.null_floor, b.null_sd, r.consistent_with_zero
    );
    Ok(())
}
