//! Cross terms Tr_B(U|v⟩⟨w|U†) for orthogonal inputs: Haar and Clifford
//! ensembles against the exact Haar average and the 2^{k−n} bound.

use shallow_prs::ensembles::UnitaryEnsembleSpec;
use shallow_prs::moments::offdiag_check;
use shallow_prs::rng::Seed;

fn main() -> shallow_prs::Result<()> {
    for (n, k) in [(2, 1), (4, 2), (8, 3)] {
        let bound = 2f64.powi(k - n);
        for spec in [UnitaryEnsembleSpec::Haar { n: n as usize }, UnitaryEnsembleSpec::Clifford { n: n as usize }] {
            let r = offdiag_check(n as usize, k as usize, &spec, 5000, Seed(3), None)?;
            println!(
                "n={n} k={k} {:<9} exact Haar {:.6} measured {:.6} ± {:.6} bound {bound:.4} pass {}",
                if matches!(spec, UnitaryEnsembleSpec::Haar { .. }) { "Haar" } else { "Clifford" },
                r.target,
                r.measured,
                r.stderr,
                r.pass
            );
        }
    }
    Ok(())
}
