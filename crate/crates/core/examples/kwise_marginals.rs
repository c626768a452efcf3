//! k-bit output marginals of shallow circuits against uniform ⊗ the
//! distribution of the ancilla-corrupted outputs.

use shallow_prs::circuits::{random_brickwork, random_layered_circuit, Geometry};
use shallow_prs::ensembles::StateEnsembleSpec;
use shallow_prs::experiments::kwise_marginal_check;
use shallow_prs::rng::Seed;

fn main() -> shallow_prs::Result<()> {
    let c = random_brickwork(10, 2, Geometry::Line, &mut Seed(1).rng())?;
    let r = kwise_marginal_check(&c, &StateEnsembleSpec::Stabilizer { n: 10 }, 1, 3, 20, 3000, Seed(2))?;
    println!(
        "no ancillae: reference {}, max TV {:.4} on {:?}, floor {:.4}, consistent {}",
        r.reference, r.max_tv, r.worst_subset, r.bootstrap.null_floor, r.consistent_with_reference
    );

    let c = random_layered_circuit(6, 2, 1, &mut Seed(3).rng())?;
    let r = kwise_marginal_check(&c, &StateEnsembleSpec::Haar { n: 6 }, 1, 2, 20, 3000, Seed(4))?;
    println!(
        "2 ancillae, depth 1: corrupted {:?}, max TV {:.4}, floor {:.4}, consistent {}",
        r.corrupted_set, r.max_tv, r.bootstrap.null_floor, r.consistent_with_reference
    );
    Ok(())
}
