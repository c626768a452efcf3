//! The linear-dependence attack: outcomes of a subspace state always lie in a
//! d-dimensional subspace, so d+1 samples are always F₂-dependent.

use shallow_prs::ensembles::{PhaseMode, StateEnsembleSpec};
use shallow_prs::experiments::lindep_distinguisher;
use shallow_prs::rng::Seed;

fn main() -> shallow_prs::Result<()> {
    for (n, d) in [(10, 3), (10, 6), (12, 4), (6, 5)] {
        let spec = StateEnsembleSpec::PhasedSubspace { n, d, phase_mode: PhaseMode::Kwise4 };
        let r = lindep_distinguisher(n, d, &spec, 2000, Seed(9))?;
        let (pe, ph) = (r.accept_prob_ensemble.unwrap(), r.accept_prob_haar.unwrap());
        println!(
            "n={n:>2} d={d}: subspace {:.3}, Haar {:.4} ± {:.4} (bound {:.4}{}), advantage {:.3}",
            pe.mean,
            ph.mean,
            ph.stderr,
            r.analytic_bound.unwrap(),
            if r.bound_vacuous { ", vacuous" } else { "" },
            r.advantage
        );
    }
    Ok(())
}
