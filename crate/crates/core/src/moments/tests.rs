use super::*;
use crate::ensembles::PhaseMode;
use crate::error::Error;
use crate::statevec::DensityMatrix;

fn sym_projector(dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim * dim, dim * dim, |r, col| {
        let swapped = (r % dim) * dim + r / dim;
        c(0.5 * ((r == col) as u8 as f64 + (swapped == col) as u8 as f64), 0.0)
    })
}

fn haar(n: usize) -> StateEnsembleSpec {
    StateEnsembleSpec::Haar { n }
}

#[test]
fn haar_moment_small_cases() {
    let m = haar_moment(1, 1).unwrap();
    assert!((m.matrix() - DMatrix::<C64>::identity(2, 2) / c(2.0, 0.0)).norm() < 1e-15);
    for (n, t) in [(1, 1), (2, 2), (1, 3), (3, 2), (2, 3), (4, 3)] {
        assert!((haar_moment(n, t).unwrap().trace() - 1.0).abs() < 1e-12);
    }
    let m = haar_moment(1, 2).unwrap();
    let ev = DensityMatrix::new(m.matrix().clone()).unwrap().eigenvalues();
    let expected = [0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
    assert!(ev.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12));
    assert!((m.matrix() - sym_projector(2) / c(3.0, 0.0)).norm() < 1e-15);
}

#[test]
fn haar_moment_is_scaled_projector() {
    for (n, t) in [(1, 2), (2, 2), (1, 3), (2, 3)] {
        let m = haar_moment(n, t).unwrap();
        let norm = binomial((1usize << n) as f64 + t as f64 - 1.0, t);
        let sq = m.matrix() * m.matrix();
        assert!((sq - m.matrix() / c(norm, 0.0)).norm() < 1e-9);
    }
    assert!(matches!(haar_moment(7, 2), Err(Error::Resource(_))));
}

#[test]
fn empirical_moment_exact_tiers() {
    let zero = StateVector::zero(1).unwrap();
    let m = empirical_moment(&StateEnsembleSpec::FixedList { states: vec![zero] }, 2, 0, Seed(0)).unwrap();
    assert!(m.is_exact());
    let mut expected = DMatrix::<C64>::zeros(4, 4);
    expected[(0, 0)] = c(1.0, 0.0);
    assert_eq!(m.matrix(), &expected);

    let stab = empirical_moment(&StateEnsembleSpec::Stabilizer { n: 1 }, 2, 0, Seed(0)).unwrap();
    assert!(stab.is_exact());
    assert!((stab.matrix() - sym_projector(2) / c(3.0, 0.0)).norm() < 1e-10);

    let stab2 = empirical_moment(&StateEnsembleSpec::Stabilizer { n: 2 }, 2, 0, Seed(0)).unwrap();
    assert!(moment_distance(&stab2, &haar_moment(2, 2).unwrap(), Schatten::One).unwrap() <= 1e-9);
}

#[test]
fn empirical_first_moment_is_maximally_mixed() {
    let m = empirical_moment(&haar(2), 1, 100_000, Seed(1)).unwrap();
    assert_eq!(m.sample_count(), 100_000);
    assert!((m.matrix() - DMatrix::<C64>::identity(4, 4) / c(4.0, 0.0)).norm() < 1e-2);
}

#[test]
fn empirical_moment_converges_at_root_n() {
    let target = haar_moment(3, 2).unwrap();
    let d1 = moment_distance(&empirical_moment(&haar(3), 2, 1000, Seed(2)).unwrap(), &target, Schatten::Two).unwrap();
    let d4 = moment_distance(&empirical_moment(&haar(3), 2, 4000, Seed(3)).unwrap(), &target, Schatten::Two).unwrap();
    let ratio = d1 / d4;
    assert!((1.6..=2.5).contains(&ratio), "{ratio}");
}

#[test]
fn empirical_moment_is_thread_count_independent() {
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| empirical_moment(&haar(2), 2, 500, Seed(4)).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn moment_distance_examples() {
    let m = haar_moment(2, 2).unwrap();
    assert_eq!(moment_distance(&m, &m, Schatten::One).unwrap(), 0.0);
    let zero = empirical_moment(&StateEnsembleSpec::FixedList { states: vec![StateVector::zero(1).unwrap()] }, 1, 0, Seed(0)).unwrap();
    let mixed = haar_moment(1, 1).unwrap();
    assert!((moment_distance(&zero, &mixed, Schatten::One).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(moment_distance(&zero, &m, Schatten::One), Err(Error::Domain(_))));
}

#[test]
fn frame_potential_examples() {
    let phi = crate::ensembles::sample_haar_state(3, &mut Seed(5).rng()).unwrap();
    let single = frame_potential(&StateEnsembleSpec::FixedList { states: vec![phi] }, 2, 1000, Seed(5)).unwrap();
    assert!((single.mean - 1.0).abs() < 1e-12 && single.stderr < 1e-12);

    for (n, expected) in [(2, 0.1), (1, 1.0 / 3.0)] {
        assert!((haar_frame_potential(n, 2) - expected).abs() < 1e-15);
        let f = frame_potential(&haar(n), 2, 20_000, Seed(6)).unwrap();
        assert!(Estimate { mean: f.mean, stderr: f.stderr, count: f.pairs }.agrees_with(expected, 5.0), "{f:?}");
    }
    assert!(matches!(frame_potential(&haar(2), 2, 999, Seed(0)), Err(Error::Domain(_))));
}

#[test]
fn frame_potential_is_haar_minimized() {
    let specs = [
        StateEnsembleSpec::Stabilizer { n: 3 },
        StateEnsembleSpec::ComputationalBasis { n: 3 },
        StateEnsembleSpec::PhasedSubspace { n: 3, d: 2, phase_mode: PhaseMode::Kwise4 },
        StateEnsembleSpec::PhasedSubspace { n: 3, d: 1, phase_mode: PhaseMode::TrueRandom },
        haar(3),
    ];
    for t in [1, 2, 3] {
        let floor = haar_frame_potential(3, t);
        for spec in &specs {
            let f = frame_potential(spec, t, 5000, Seed(7)).unwrap();
            assert!(f.mean >= floor - 3.0 * f.stderr, "{spec:?} t={t}: {f:?}");
        }
    }
}

#[test]
fn frobenius_distance_matches_frame_potential_gap() {
    let basis = StateEnsembleSpec::ComputationalBasis { n: 2 };
    let exact = empirical_moment(&basis, 2, 0, Seed(0)).unwrap();
    let dist_sq = moment_distance(&exact, &haar_moment(2, 2).unwrap(), Schatten::Two).unwrap().powi(2);
    let f = frame_potential(&basis, 2, 50_000, Seed(8)).unwrap();
    let gap = f.mean - haar_frame_potential(2, 2);
    assert!((dist_sq - gap).abs() <= 5.0 * f.stderr, "{dist_sq} vs {gap}");

    // A Monte Carlo moment carries an extra (1 − F)/N in its squared distance.
    let spec = StateEnsembleSpec::PhasedSubspace { n: 3, d: 2, phase_mode: PhaseMode::TrueRandom };
    let samples = 20_000;
    let m = empirical_moment(&spec, 2, samples, Seed(9)).unwrap();
    let f = frame_potential(&spec, 2, 50_000, Seed(10)).unwrap();
    let dist_sq = moment_distance(&m, &haar_moment(3, 2).unwrap(), Schatten::Two).unwrap().powi(2) - (1.0 - f.mean) / samples as f64;
    let gap = f.mean - haar_frame_potential(3, 2);
    assert!((dist_sq - gap).abs() <= 5.0 * f.stderr + 0.05 * gap, "{dist_sq} vs {gap}");
}

#[test]
fn purity_checks() {
    let r = purity_expectation_check(8, 2, &haar(8), 5000, Seed(11)).unwrap();
    assert!((r.target - 68.0 / 257.0).abs() < 1e-15 && r.pass, "{r:?}");
    let r = purity_expectation_check(2, 1, &haar(2), 5000, Seed(12)).unwrap();
    assert!((r.target - 0.8).abs() < 1e-15 && r.pass, "{r:?}");
    let r = purity_expectation_check(4, 2, &StateEnsembleSpec::Stabilizer { n: 4 }, 20_000, Seed(13)).unwrap();
    assert!((r.target - 8.0 / 17.0).abs() < 1e-15 && r.pass, "{r:?}");
    let r = purity_expectation_check(3, 1, &StateEnsembleSpec::Stabilizer { n: 3 }, 0, Seed(0)).unwrap();
    assert!(r.pass && r.stderr == 0.0, "{r:?}");
    let json = serde_json::to_value(r).unwrap();
    for key in ["target", "measured", "stderr", "bound", "pass"] {
        assert!(json.get(key).is_some());
    }
}

#[test]
fn offdiag_reports() {
    assert!((offdiag_expectation(2, 1) - 0.4).abs() < 1e-15);
    assert!((offdiag_expectation(1, 1) - 1.0).abs() < 1e-15);
    for n in 2..12 {
        for k in 0..=n {
            assert!(offdiag_expectation(n, k) <= 2f64.powi(k as i32 - n as i32));
        }
    }
    let h = offdiag_check(4, 2, &UnitaryEnsembleSpec::Haar { n: 4 }, 20_000, Seed(14), None).unwrap();
    assert!(h.pass && (h.bound - 0.25).abs() < 1e-15, "{h:?}");
    let cl = offdiag_check(4, 2, &UnitaryEnsembleSpec::Clifford { n: 4 }, 20_000, Seed(15), None).unwrap();
    assert!((h.measured - cl.measured).abs() <= 3.0 * (h.stderr.powi(2) + cl.stderr.powi(2)).sqrt(), "{h:?} {cl:?}");
    let one = offdiag_check(1, 1, &UnitaryEnsembleSpec::Clifford { n: 1 }, 0, Seed(0), None).unwrap();
    assert!((one.measured - 1.0).abs() < 1e-12 && one.stderr == 0.0);
    let bad = (StateVector::zero(2).unwrap(), StateVector::plus(2).unwrap());
    assert!(matches!(offdiag_check(2, 1, &UnitaryEnsembleSpec::Haar { n: 2 }, 10, Seed(0), Some(bad)), Err(Error::Domain(_))));
}

#[test]
fn subspace_bound_values() {
    assert!((subspace_design_bound(10, 5, 2).unwrap() - 0.38671875).abs() < 1e-15);
    for n in 4..20 {
        for d in 3..n {
            let b = subspace_design_bound(n, d, 2).unwrap();
            assert!((b - 12.0 * (2f64.powi(-(d as i32)) + 2f64.powi(-(n as i32)))).abs() < 1e-15);
        }
    }
    let seq: Vec<f64> = (3..30).map(|d| subspace_design_bound(d + 1, d, 2).unwrap()).collect();
    assert!(seq.windows(2).all(|w| w[1] < w[0]));
    assert!(matches!(subspace_design_bound(5, 5, 2), Err(Error::Domain(_))));
    assert!(matches!(subspace_design_bound(5, 2, 2), Err(Error::Domain(_))));
}

#[test]
fn frame_distance_matches_dense_moment() {
    let spec = StateEnsembleSpec::PhasedSubspace { n: 4, d: 2, phase_mode: PhaseMode::TrueRandom };
    let dense = moment_distance(&empirical_moment(&spec, 2, 20_000, Seed(30)).unwrap(), &haar_moment(4, 2).unwrap(), Schatten::Two).unwrap();
    let f = frame_distance(&spec, 2, 200_000, Seed(31)).unwrap();
    assert!((f.distance - dense).abs() < 5.0 * f.stderr + 0.01 * dense, "{f:?} vs {dense}");
    let exact = frame_distance(&StateEnsembleSpec::Stabilizer { n: 2 }, 2, 50_000, Seed(32)).unwrap();
    assert!(exact.distance < 5.0 * exact.stderr, "{exact:?}");
}

#[test]
fn subspace_design_report_is_within_bound() {
    let r = subspace_design_check(8, 4, 2, 20_000, Seed(33)).unwrap();
    assert!(r.pass && r.distance.distance < r.bound);
    assert!(subspace_design_check(8, 2, 2, 1000, Seed(0)).is_err());
}

#[test]
fn whole_register_is_never_mixed() {
    let r = mixedness_probability(&haar(3), 2, 6, 0.5, 50, Seed(16)).unwrap();
    assert_eq!(r.measured, 0.0);
}

#[test]
fn single_qubit_mixedness_of_two_qubit_haar_states() {
    // The Bloch length r of one qubit of a 2-qubit Haar state has density 3r²,
    // and ‖ρ − I/2‖₁ = r for both qubits.
    let delta = 0.7;
    let r = mixedness_probability(&haar(2), 1, 1, delta, 20_000, Seed(17)).unwrap();
    let exact: f64 = delta * delta * delta;
    assert!((r.measured - exact).abs() <= 5.0 * r.stderr, "{r:?}");
}

/// P(r ≤ δ) for one qubit of an n-qubit Haar state; density ∝ r²(1 − r²)^{m−2}, m = 2^{n−1}.
fn single_qubit_cdf(n: usize, delta: f64) -> f64 {
    let m = 2f64.powi(n as i32 - 1);
    let density = |r: f64| r * r * (1.0 - r * r).powf(m - 2.0);
    let steps = 200_000;
    let integrate = |hi: f64| (0..steps).map(|i| density((i as f64 + 0.5) * hi / steps as f64) * hi / steps as f64).sum::<f64>();
    integrate(delta) / integrate(1.0)
}

#[test]
fn ten_qubit_haar_mixedness() {
    let r = mixedness_probability(&haar(10), 1, 1, 0.2, 1000, Seed(18)).unwrap();
    assert!(r.measured >= 0.99, "{r:?}");

    let q = single_qubit_cdf(10, 0.1);
    let r = mixedness_probability(&haar(10), 1, 1, 0.1, 2000, Seed(19)).unwrap();
    assert!(r.measured <= q + 5.0 * r.stderr && r.measured >= 1.0 - 10.0 * (1.0 - q) - 5.0 * r.stderr, "{r:?} q={q}");
    assert!(r.pass);
}

#[test]
fn stabilizer_single_qubit_marginals_are_pure_or_mixed() {
    let mut rng = Seed(20).rng();
    for _ in 0..200 {
        let psi = crate::ensembles::sample_stabilizer_state(6, &mut rng).unwrap();
        for q in 0..6 {
            let rho = partial_trace(&psi, &SubsystemMask::new(vec![q], 6).unwrap()).unwrap();
            let d = crate::statevec::distance_to_maximally_mixed(&rho);
            assert!(d.abs() < 1e-9 || (d - 1.0).abs() < 1e-9);
        }
    }
}
