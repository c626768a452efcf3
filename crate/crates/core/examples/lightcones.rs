//! Lightcones, the Schmidt-rank law for line circuits and the recursive
//! Schmidt tree across copies.

use shallow_prs::circuits::{apply, lightcone_report, random_brickwork, random_layered_circuit, schmidt_rank_audit, Geometry};
use shallow_prs::rng::Seed;
use shallow_prs::statevec::{recursive_schmidt, StateVector};

fn main() -> shallow_prs::Result<()> {
    let mut rng = Seed(17).rng();
    let c = random_layered_circuit(6, 2, 2, &mut rng)?;
    let report = lightcone_report(&c)?;
    for (q, cone) in report.backward.iter().enumerate() {
        println!("output {q}: backward cone {cone:?}");
    }
    println!("corrupted outputs {:?} (max cone {})", report.corrupted, report.k);

    for depth in 1..=3 {
        let audit = schmidt_rank_audit(&random_brickwork(10, depth, Geometry::Line, &mut rng)?)?;
        println!("depth {depth}: ranks {:?}, bound {}", audit.ranks, audit.bound);
    }

    let c = random_brickwork(10, 2, Geometry::Line, &mut rng)?;
    let psi = apply(&c, &StateVector::zero(10)?)?;
    let tree = recursive_schmidt(&psi, 5, 2)?;
    println!(
        "two blocks of 5: rank {}, reconstruction fidelity {:.12}, sibling overlap {:.1e}",
        tree.rank,
        tree.reconstruct().fidelity(&psi)?,
        tree.max_sibling_overlap()
    );
    Ok(())
}
