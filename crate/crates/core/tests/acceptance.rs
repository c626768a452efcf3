//! Acceptance criteria 1–12. Each test prints one PASS/FAIL line straight to
//! stdout (bypassing the harness capture) and then asserts its verdict.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use shallow_prs::circuits::{apply, backward_lightcone, random_brickwork, random_layered_circuit, schmidt_rank_audit, Geometry};
use shallow_prs::ensembles::{PhaseMode, StateEnsembleSpec, UnitaryEnsembleSpec};
use shallow_prs::experiments::{lindep_distinguisher, pru_parallel_game, pseudoentanglement_report};
use shallow_prs::gf2::verify_kwise;
use shallow_prs::moments::{empirical_moment, haar_moment, moment_distance, offdiag_check, purity_expectation_check, subspace_design_check, BoundReport};
use shallow_prs::rng::Seed;
use shallow_prs::statevec::{recursive_schmidt, Schatten, StateVector};
use shallow_prs::stats::{combined_stderr, Estimate};

fn seed(criterion: u32) -> Seed {
    Seed(20_240_601).derive(&format!("criterion-{criterion}"))
}

fn verdict(criterion: u32, pass: bool, started: Instant, budget: Duration, detail: &str) {
    let elapsed = started.elapsed();
    let ok = pass && elapsed <= budget;
    let line = format!(
        "criterion {criterion:>2}: {} ({:.1}s of {}s) {detail}\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {criterion} failed: {detail}");
    assert!(elapsed <= budget, "criterion {criterion} exceeded its {budget:?} budget");
}

fn estimate(r: &BoundReport) -> Estimate {
    Estimate { mean: r.measured, stderr: r.stderr, count: 0 }
}

#[test]
fn criterion_01_page_purity() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for n in [2, 4, 8] {
        for k in [1, 2] {
            let r = purity_expectation_check(n, k, &StateEnsembleSpec::Haar { n }, 20_000, seed(1).derive(&format!("{n}/{k}"))).unwrap();
            let target = (2f64.powi(k as i32) + 2f64.powi((n - k) as i32)) / (2f64.powi(n as i32) + 1.0);
            let ok = (r.measured - target).abs() <= 5.0 * r.stderr;
            pass &= ok;
            detail += &format!("[n={n} k={k} {:.5}±{:.5} vs {target:.5}] ", r.measured, r.stderr);
        }
    }
    verdict(1, pass, start, Duration::from_secs(60), &detail);
}

#[test]
fn criterion_02_exact_two_design() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    for n in [1, 2] {
        let m = empirical_moment(&StateEnsembleSpec::Stabilizer { n }, 2, 0, seed(2)).unwrap();
        let dist = moment_distance(&m, &haar_moment(n, 2).unwrap(), Schatten::One).unwrap();
        pass &= m.is_exact() && dist <= 1e-9;
        detail += &format!("[n={n} exact={} ‖M − Π_sym/{}‖₁ = {dist:.2e}] ", m.is_exact(), if n == 1 { 3 } else { 10 });
    }
    verdict(2, pass, start, Duration::from_secs(5), &detail);
}

#[test]
fn criterion_03_offdiagonal_partial_trace() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for (n, k, stated) in [(4usize, 2usize, 0.2), (8, 3, 7.0 / 255.0)] {
        let s = seed(3).derive(&format!("{n}/{k}"));
        let haar = offdiag_check(n, k, &UnitaryEnsembleSpec::Haar { n }, 20_000, s.derive("haar"), None).unwrap();
        let cliff = offdiag_check(n, k, &UnitaryEnsembleSpec::Clifford { n }, 20_000, s.derive("clifford"), None).unwrap();
        let bound = 2f64.powi(k as i32 - n as i32);
        let matches_stated = (haar.measured - stated).abs() <= 5.0 * haar.stderr;
        let below = haar.measured < bound;
        let arms_agree = estimate(&haar).agrees_with_estimate(&estimate(&cliff), 3.0);
        let matches_exact = (haar.measured - haar.target).abs() <= 5.0 * haar.stderr;
        pass &= matches_stated && below && arms_agree;
        detail += &format!(
            "[n={n} k={k} Haar {:.6}±{:.6}: stated {stated:.6} {}, Weingarten {:.6} {}, < 2^(k−n) {}, Clifford {:.6}±{:.6} agrees {}] ",
            haar.measured,
            haar.stderr,
            if matches_stated { "ok" } else { "MISMATCH" },
            haar.target,
            if matches_exact { "ok" } else { "MISMATCH" },
            below,
            cliff.measured,
            cliff.stderr,
            arms_agree
        );
    }
    verdict(3, pass, start, Duration::from_secs(120), &detail);
}

#[test]
fn criterion_04_subspace_design_scaling() {
    let start = Instant::now();
    let n = 12;
    let reports: Vec<_> = [4, 6, 8].iter().map(|&d| subspace_design_check(n, d, 2, 100_000, seed(4).derive(&d.to_string())).unwrap()).collect();
    let mut pass = true;
    let mut detail = String::new();
    for r in &reports {
        let b = 12.0 * (2f64.powi(-(r.d as i32)) + 2f64.powi(-(n as i32)));
        pass &= r.distance.distance < b && (r.bound - b).abs() < 1e-15;
        detail += &format!("[d={} dist {:.4e}±{:.1e} < B {b:.4}] ", r.d, r.distance.distance, r.distance.stderr);
    }
    // The distances are two steps of d apart; the per-unit ratio is the square root.
    for w in reports.windows(2) {
        let (a, b) = (&w[0].distance, &w[1].distance);
        let step = (w[1].d - w[0].d) as f64;
        let ratio = a.distance / b.distance;
        let rel = ((a.stderr / a.distance).powi(2) + (b.stderr / b.distance).powi(2)).sqrt();
        let per_unit = ratio.powf(1.0 / step);
        let (lo, hi) = ((ratio * (1.0 - 2.0 * rel)).powf(1.0 / step), (ratio * (1.0 + 2.0 * rel)).powf(1.0 / step));
        pass &= hi >= 1.5 && lo <= 3.0;
        detail += &format!("[d {}→{}: per-unit ratio {per_unit:.3} (CI {lo:.3}–{hi:.3})] ", w[0].d, w[1].d);
    }
    verdict(4, pass, start, Duration::from_secs(600), &detail);
}

#[test]
fn criterion_05_linear_dependence_distinguisher() {
    let start = Instant::now();
    let spec = StateEnsembleSpec::PhasedSubspace { n: 10, d: 3, phase_mode: PhaseMode::Kwise4 };
    let r = lindep_distinguisher(10, 3, &spec, 5000, seed(5)).unwrap();
    let (pe, ph) = (r.accept_prob_ensemble.unwrap(), r.accept_prob_haar.unwrap());
    let pass = pe.mean == 1.0 && ph.mean <= 0.0273 + 5.0 * ph.stderr && r.advantage >= 0.95;
    let detail = format!("subspace accept {}, Haar {:.4}±{:.4} (bound {:.5}), advantage {:.4}", pe.mean, ph.mean, ph.stderr, r.analytic_bound.unwrap(), r.advantage);
    verdict(5, pass, start, Duration::from_secs(60), &detail);
}

#[test]
fn criterion_06_exhaustive_four_wise_independence() {
    let start = Instant::now();
    let gf4 = verify_kwise(2, 4, 50, &mut seed(6).rng()).unwrap();
    let gf16 = verify_kwise(4, 4, 50, &mut seed(6).derive("m=4").rng()).unwrap();
    let pass = gf4.uniform && gf4.expected_count == 16 && gf16.uniform && gf16.expected_count == 4096 && gf16.inputs.len() == 50;
    let detail = format!(
        "m=2: counts {}..{} (expect 16); m=4: {} subsets, counts {}..{} (expect 4096)",
        gf4.min_count,
        gf4.max_count,
        gf16.inputs.len(),
        gf16.min_count,
        gf16.max_count
    );
    verdict(6, pass, start, Duration::from_secs(120), &detail);
}

#[test]
fn criterion_07_schmidt_rank_law() {
    let start = Instant::now();
    let mut rng = seed(7).rng();
    let mut violations = 0;
    let mut tightest = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=10);
        let depth = rng.random_range(1..=3);
        let audit = schmidt_rank_audit(&random_brickwork(n, depth, Geometry::Line, &mut rng).unwrap()).unwrap();
        violations += audit.ranks.iter().filter(|&&r| r as u64 > 4u64.pow(depth as u32)).count();
        tightest = tightest.max(audit.max_rank as f64 / audit.bound as f64);
    }
    verdict(7, violations == 0, start, Duration::from_secs(120), &format!("100 circuits, {violations} violations, max rank/4^depth = {tightest:.3}"));
}

#[test]
fn criterion_08_recursive_schmidt() {
    let start = Instant::now();
    let mut rng = seed(8).rng();
    let (mut worst_fid, mut worst_overlap, mut rank_ok) = (1.0f64, 0.0f64, true);
    for _ in 0..50 {
        let depth = rng.random_range(1..=3);
        let c = random_brickwork(10, depth, Geometry::Line, &mut rng).unwrap();
        let psi = apply(&c, &StateVector::zero(10).unwrap()).unwrap();
        let tree = recursive_schmidt(&psi, 5, 2).unwrap();
        worst_fid = worst_fid.min(tree.reconstruct().fidelity(&psi).unwrap());
        worst_overlap = worst_overlap.max(tree.max_sibling_overlap());
        rank_ok &= tree.rank as u64 <= 4u64.pow(depth as u32);
    }
    let pass = worst_fid >= 1.0 - 1e-8 && worst_overlap <= 1e-9 && rank_ok;
    verdict(8, pass, start, Duration::from_secs(120), &format!("min fidelity 1 − {:.1e}, max sibling overlap {worst_overlap:.1e}, r ≤ 4^depth {rank_ok}", 1.0 - worst_fid));
}

#[test]
fn criterion_09_parallel_query_second_moment() {
    let start = Instant::now();
    let (n, t, k) = (5, 2, 2);
    let pre = random_brickwork(n * t, 2, Geometry::Line, &mut seed(9).derive("pre").rng()).unwrap();
    let haar = pru_parallel_game(n, t, &pre, &UnitaryEnsembleSpec::Haar { n }, k, 2000, seed(9).derive("haar")).unwrap();
    let cliff = pru_parallel_game(n, t, &pre, &UnitaryEnsembleSpec::Clifford { n }, k, 2000, seed(9).derive("clifford")).unwrap();
    let (h, c) = (&haar.subsets[haar.worst], &cliff.subsets[haar.worst]);
    assert_eq!(h.subset, c.subset);
    let z = (h.frobenius_sq.mean - c.frobenius_sq.mean).abs() / combined_stderr(&h.frobenius_sq, &c.frobenius_sq);
    let detail = format!(
        "A = {:?}, ‖ρ_A − I/4‖₂² Haar {:.5}±{:.5}, Clifford {:.5}±{:.5}, |z| = {z:.2}; r = {}",
        h.subset, h.frobenius_sq.mean, h.frobenius_sq.stderr, c.frobenius_sq.mean, c.frobenius_sq.stderr, haar.rank
    );
    verdict(9, z <= 3.0, start, Duration::from_secs(600), &detail);
}

#[test]
fn criterion_10_pseudoentanglement_gap() {
    let start = Instant::now();
    let r = pseudoentanglement_report(10, 3, 200, seed(10)).unwrap();
    let mid = r.cuts.iter().position(|&k| k == 5).unwrap();
    let max_sub = r.subspace_max.iter().copied().fold(0.0, f64::max);
    let pass = r.within_ceiling && max_sub <= 3.0 + 1e-9 && r.haar_entropy[mid].mean >= 4.0;
    let detail = format!("max subspace entropy {max_sub:.4} over all cuts, Haar middle cut {:.4}±{:.4}", r.haar_entropy[mid].mean, r.haar_entropy[mid].stderr);
    verdict(10, pass, start, Duration::from_secs(300), &detail);
}

#[test]
fn criterion_11_lightcone_soundness() {
    let start = Instant::now();
    let mut rng = seed(11).rng();
    let mut worst = 0.0f64;
    let mut flips = 0;
    for _ in 0..50 {
        let ancillae = rng.random_range(0..=2);
        let n = rng.random_range(2..=10 - ancillae);
        let c = random_layered_circuit(n, ancillae, rng.random_range(1..=3), &mut rng).unwrap();
        let watched: Vec<usize> = (0..c.num_wires()).filter(|_| rng.random_bool(0.3)).take(3).collect();
        let watched = if watched.is_empty() { vec![0] } else { watched };
        let cone = backward_lightcone(&c, &watched).unwrap();
        let x = rng.random_range(0..1usize << n);
        let outside: usize = (0..n).filter(|q| !cone.contains(q) && rng.random_bool(0.7)).map(|q| 1 << (n - 1 - q)).sum();
        flips += (outside != 0) as usize;
        let p = apply(&c, &StateVector::basis(n, x).unwrap()).unwrap().marginal_distribution(&watched).unwrap();
        let q = apply(&c, &StateVector::basis(n, x ^ outside).unwrap()).unwrap().marginal_distribution(&watched).unwrap();
        worst = worst.max(p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    verdict(11, worst <= 1e-12, start, Duration::from_secs(60), &format!("50 circuits ({flips} with inputs flipped), max change on watched outputs {worst:.1e}"));
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_shallow-prs")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn criterion_12_reproducibility() {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut check = |name: &str, run: &dyn Fn() -> String| {
        if run() != run() {
            mismatches.push(name.to_string());
        }
    };
    check("purity", &|| serde_json::to_string(&purity_expectation_check(8, 2, &StateEnsembleSpec::Haar { n: 8 }, 2000, seed(12)).unwrap()).unwrap());
    check("lindep", &|| {
        let spec = StateEnsembleSpec::PhasedSubspace { n: 10, d: 3, phase_mode: PhaseMode::Kwise4 };
        serde_json::to_string(&lindep_distinguisher(10, 3, &spec, 1000, seed(12)).unwrap()).unwrap()
    });
    check("pru", &|| {
        let pre = random_brickwork(10, 2, Geometry::Line, &mut seed(12).rng()).unwrap();
        serde_json::to_string(&pru_parallel_game(5, 2, &pre, &UnitaryEnsembleSpec::Clifford { n: 5 }, 2, 200, seed(12)).unwrap()).unwrap()
    });
    check("entanglement", &|| serde_json::to_string(&pseudoentanglement_report(8, 3, 50, seed(12)).unwrap()).unwrap());

    let argv = ["lindep", "--n", "10", "--d", "3", "--ensemble", "subspace-kwise", "--trials", "2000", "--seed", "1"];
    let (code_a, a) = cli(&argv);
    let (code_b, b) = cli(&[&argv[..], &["--threads", "1"]].concat());
    if a != b {
        mismatches.push("cli --threads".into());
    }
    let report: serde_json::Value = serde_json::from_str(&a).unwrap();
    let cli_ok = code_a == 0 && code_b == 0 && report["report"]["accept_prob_ensemble"]["mean"] == 1.0;
    let (usage, _) = cli(&["lindep", "--n", "10", "--unknown-flag"]);
    let (audit, _) = cli(&["schmidt-audit", "--n", "8", "--depth", "2", "--seed", "3"]);

    let pass = mismatches.is_empty() && cli_ok && usage == 2 && audit == 0;
    let detail = format!("library and CLI reruns identical: {}, mismatches {mismatches:?}; exit codes lindep {code_a}, usage {usage}, audit {audit}", mismatches.is_empty());
    verdict(12, pass, start, Duration::from_secs(120), &detail);
}
