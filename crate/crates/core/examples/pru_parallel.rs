//! The parallel-query game: U applied to each block of an entangled 1-D
//! state, reduced states on random subsets compared between Haar and Clifford.

use shallow_prs::circuits::{random_brickwork, Geometry};
use shallow_prs::ensembles::UnitaryEnsembleSpec;
use shallow_prs::experiments::pru_parallel_game;
use shallow_prs::rng::Seed;
use shallow_prs::stats::combined_stderr;

fn main() -> shallow_prs::Result<()> {
    let (n, t, k) = (5, 2, 2);
    let pre = random_brickwork(n * t, 2, Geometry::Line, &mut Seed(1).rng())?;
    let haar = pru_parallel_game(n, t, &pre, &UnitaryEnsembleSpec::Haar { n }, k, 500, Seed(2))?;
    let clifford = pru_parallel_game(n, t, &pre, &UnitaryEnsembleSpec::Clifford { n }, k, 500, Seed(2))?;
    println!("recursive Schmidt rank r = {}, bound (r+1)·2^(k−n/2) = {:.4}", haar.rank, haar.expectation_bound);
    for (h, c) in haar.subsets.iter().zip(&clifford.subsets) {
        let z = (h.frobenius_sq.mean - c.frobenius_sq.mean) / combined_stderr(&h.frobenius_sq, &c.frobenius_sq);
        println!(
            "A = {:?}: ‖ρ_A − I/4‖₁ Haar {:.4}, ‖·‖₂² Haar {:.5} Clifford {:.5} (z = {z:+.2})",
            h.subset, h.trace_norm.mean, h.frobenius_sq.mean, c.frobenius_sq.mean
        );
    }
    println!("worst subset {:?}, within bound: {}", haar.worst_subset().subset, haar.report.pass);
    Ok(())
}
