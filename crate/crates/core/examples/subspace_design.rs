//! How close 4-wise phased subspace states come to a 2-design as the subspace
//! dimension grows, from the frame potential.

use shallow_prs::ensembles::{PhaseMode, StateEnsembleSpec};
use shallow_prs::moments::{empirical_moment, haar_moment, moment_distance, subspace_design_check};
use shallow_prs::rng::Seed;
use shallow_prs::statevec::Schatten;

fn main() -> shallow_prs::Result<()> {
    let n = 10;
    let mut previous: Option<f64> = None;
    for d in [4, 5, 6, 7] {
        let r = subspace_design_check(n, d, 2, 20_000, Seed(5).derive(&d.to_string()))?;
        let ratio = previous.map(|p| p / r.distance.distance);
        println!(
            "n={n} d={d}: ‖M − M_Haar‖₂ = {:.3e} ± {:.1e}, bound {:.4}, step ratio {}",
            r.distance.distance,
            r.distance.stderr,
            r.bound,
            ratio.map_or("-".to_string(), |x| format!("{x:.2}"))
        );
        previous = Some(r.distance.distance);
    }

    // Small case: the dense moment operator itself.
    let spec = StateEnsembleSpec::PhasedSubspace { n: 3, d: 2, phase_mode: PhaseMode::TrueRandom };
    let m = empirical_moment(&spec, 2, 20_000, Seed(6))?;
    let h = haar_moment(3, 2)?;
    println!("n=3 d=2 dense trace distance {:.4}", moment_distance(&m, &h, Schatten::One)?);
    Ok(())
}
