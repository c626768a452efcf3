//! Moment operators, frame potentials and the closed-form second-moment
//! expectations checked against Monte Carlo.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ensembles::{StateEnsembleSpec, UnitaryEnsembleSpec};
use crate::error::{ensure, Result};
use crate::rng::{sharded_try_fold, try_sharded_map, Seed};
use crate::statevec::{c, hermitian_trace_norm, partial_trace, purity, schatten_norm, tensor_power, Schatten, StateVector, SubsystemMask, C64};
use crate::stats::Estimate;

/// Largest t·n for which a moment operator is stored densely.
pub const MAX_MOMENT_QUBITS: usize = 12;
/// Minimum number of pairs for a frame-potential estimate.
pub const MIN_FRAME_PAIRS: usize = 1000;
/// Pass threshold in standard errors for Monte Carlo reports.
pub const Z_PASS: f64 = 5.0;
/// Agreement tolerance for exactly averaged quantities.
pub const EXACT_TOL: f64 = 1e-9;

/// E[|ψ⟩⟨ψ|^⊗t] over an ensemble, exact or estimated.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentOperator {
    n: usize,
    t: usize,
    mat: DMatrix<C64>,
    /// Number of Monte Carlo draws; 0 for an exact average.
    sample_count: usize,
}

impl MomentOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn is_exact(&self) -> bool {
        self.sample_count == 0
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FramePotentialEstimate {
    pub t: usize,
    pub mean: f64,
    pub stderr: f64,
    pub pairs: usize,
}

/// A measured quantity next to its analytic value and bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub target: f64,
    pub measured: f64,
    pub stderr: f64,
    pub bound: f64,
    pub pass: bool,
}

fn check_moment_size(n: usize, t: usize) -> Result<()> {
    ensure!(t >= 1, Domain, "moment order must be at least 1");
    ensure!(t * n <= MAX_MOMENT_QUBITS, Resource, "t·n = {} exceeds the dense moment cap {MAX_MOMENT_QUBITS}", t * n);
    Ok(())
}

pub(crate) fn binomial(n: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i as f64) / (i + 1) as f64)
}

fn permutations(t: usize) -> Vec<Vec<usize>> {
    if t == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(t - 1) {
        for pos in 0..t {
            let mut q = p.clone();
            q.insert(pos, t - 1);
            out.push(q);
        }
    }
    out
}

/// Π_sym / C(D + t − 1, t) on t copies of n qubits.
pub fn haar_moment(n: usize, t: usize) -> Result<MomentOperator> {
    check_moment_size(n, t)?;
    let d = 1usize << n;
    let dim = d.pow(t as u32);
    let perms = permutations(t);
    let weight = 1.0 / (perms.len() as f64 * binomial((d + t - 1) as f64, t));
    let mut mat = DMatrix::<C64>::zeros(dim, dim);
    let mut digits = vec![0usize; t];
    for col in 0..dim {
        let mut rest = col;
        for slot in digits.iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        for p in &perms {
            let row = p.iter().fold(0, |acc, &j| acc * d + digits[j]);
            mat[(row, col)] += c(weight, 0.0);
        }
    }
    Ok(MomentOperator { n, t, mat, sample_count: 0 })
}

fn accumulate(acc: &mut DMatrix<C64>, psi: &StateVector, t: usize) -> Result<()> {
    let v = DVector::from_vec(tensor_power(psi, t)?.into_amps());
    acc.gerc(c(1.0, 0.0), &v, &v, c(1.0, 0.0));
    Ok(())
}

/// Ensemble average of |ψ⟩⟨ψ|^⊗t; exact for enumerable ensembles.
pub fn empirical_moment(spec: &StateEnsembleSpec, t: usize, samples: usize, seed: Seed) -> Result<MomentOperator> {
    spec.validate()?;
    let n = spec.num_qubits();
    check_moment_size(n, t)?;
    let dim = 1usize << (n * t);
    if let Some(states) = spec.exact_states() {
        let mut mat = DMatrix::<C64>::zeros(dim, dim);
        for psi in &states {
            accumulate(&mut mat, psi, t)?;
        }
        mat /= c(states.len() as f64, 0.0);
        return Ok(MomentOperator { n, t, mat, sample_count: 0 });
    }
    ensure!(samples > 0, Domain, "Monte Carlo moment needs at least one sample");
    let shards = sharded_try_fold(seed, samples, || DMatrix::<C64>::zeros(dim, dim), |acc, rng| accumulate(acc, &spec.sample(rng)?, t))?;
    let mut mat = DMatrix::<C64>::zeros(dim, dim);
    for s in shards {
        mat += s;
    }
    mat /= c(samples as f64, 0.0);
    Ok(MomentOperator { n, t, mat, sample_count: samples })
}

/// Raw Schatten-p distance (p ∈ {1, 2}) between two moment operators.
pub fn moment_distance(a: &MomentOperator, b: &MomentOperator, p: Schatten) -> Result<f64> {
    ensure!(a.n == b.n && a.t == b.t, Domain, "moments of shape (n={}, t={}) and (n={}, t={})", a.n, a.t, b.n, b.t);
    let diff = &a.mat - &b.mat;
    match p {
        Schatten::One => Ok(hermitian_trace_norm(&diff)),
        Schatten::Two => Ok(schatten_norm(&diff, Schatten::Two)),
        Schatten::Inf => Err(crate::Error::Domain("moment distances use p = 1 or p = 2".into())),
    }
}

/// Tr(M_Haar²) = 1 / C(2^n + t − 1, t).
pub fn haar_frame_potential(n: usize, t: usize) -> f64 {
    1.0 / binomial(2f64.powi(n as i32) + t as f64 - 1.0, t)
}

/// Monte Carlo estimate of E|⟨ψ|ψ′⟩|^{2t} over independent pairs.
pub fn frame_potential(spec: &StateEnsembleSpec, t: usize, pairs: usize, seed: Seed) -> Result<FramePotentialEstimate> {
    spec.validate()?;
    ensure!(pairs >= MIN_FRAME_PAIRS, Domain, "frame potential needs at least {MIN_FRAME_PAIRS} pairs, got {pairs}");
    let values = try_sharded_map(seed, pairs, |rng| -> Result<f64> {
        let a = spec.sample(rng)?;
        let b = spec.sample(rng)?;
        Ok(a.fidelity(&b)?.powi(t as i32))
    })?;
    let e = Estimate::from_samples(&values);
    Ok(FramePotentialEstimate { t, mean: e.mean, stderr: e.stderr, pairs })
}

/// Frobenius distance between a state ensemble's t-th moment and Haar's,
/// estimated from the frame potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignDistance {
    pub frame: FramePotentialEstimate,
    pub haar_frame: f64,
    /// √(F − F_Haar), clamped at 0.
    pub distance: f64,
    /// Delta-method standard error of `distance`.
    pub stderr: f64,
}

/// ‖M − M_Haar‖₂ = √(F − F_Haar): every moment operator of pure states lives on
/// the symmetric subspace, where M_Haar is a multiple of the projector.
pub fn frame_distance(spec: &StateEnsembleSpec, t: usize, pairs: usize, seed: Seed) -> Result<DesignDistance> {
    let frame = frame_potential(spec, t, pairs, seed)?;
    let haar_frame = haar_frame_potential(spec.num_qubits(), t);
    let gap = (frame.mean - haar_frame).max(0.0);
    let distance = gap.sqrt();
    let stderr = if distance > 0.0 { frame.stderr / (2.0 * distance) } else { frame.stderr.sqrt() };
    Ok(DesignDistance { frame, haar_frame, distance, stderr })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceDesignReport {
    pub n: usize,
    pub d: usize,
    pub t: usize,
    pub distance: DesignDistance,
    /// Trace-norm bound 2t²·2^{−d} + 2^{t−d} + 2^{t−n} + 2t²·2^{−n}, which also
    /// bounds the Frobenius distance.
    pub bound: f64,
    pub pass: bool,
}

/// Frame-potential distance of 4-wise phased subspace states from Haar,
/// against the closed-form bound.
pub fn subspace_design_check(n: usize, d: usize, t: usize, pairs: usize, seed: Seed) -> Result<SubspaceDesignReport> {
    let bound = subspace_design_bound(n, d, t)?;
    let spec = StateEnsembleSpec::PhasedSubspace { n, d, phase_mode: crate::ensembles::PhaseMode::Kwise4 };
    let distance = frame_distance(&spec, t, pairs, seed)?;
    let pass = distance.distance - Z_PASS * distance.stderr < bound;
    Ok(SubspaceDesignReport { n, d, t, distance, bound, pass })
}

/// Mean of Tr(ρ_A²) for a Haar state with |A| = k.
pub fn page_purity(n: usize, k: usize) -> f64 {
    (2f64.powi(k as i32) + 2f64.powi((n - k) as i32)) / (2f64.powi(n as i32) + 1.0)
}

fn report(values: &[f64], exact: bool, target: f64, bound: f64) -> BoundReport {
    let e = Estimate::from_samples(values);
    let stderr = if exact { 0.0 } else { e.stderr };
    let pass = if exact { (e.mean - target).abs() <= EXACT_TOL } else { e.agrees_with(target, Z_PASS) };
    BoundReport { target, measured: e.mean, stderr, bound, pass }
}

/// Mean reduced purity on the first k qubits against the Haar value.
pub fn purity_expectation_check(n: usize, k: usize, spec: &StateEnsembleSpec, samples: usize, seed: Seed) -> Result<BoundReport> {
    spec.validate()?;
    ensure!(spec.num_qubits() == n, Dimension, "ensemble acts on {} qubits, expected {n}", spec.num_qubits());
    ensure!(k <= n, Domain, "subsystem of {k} qubits in an {n}-qubit register");
    let mask = SubsystemMask::prefix(k);
    let purity_of = |psi: &StateVector| partial_trace(psi, &mask).map(|rho| purity(&rho));
    let target = page_purity(n, k);
    if let Some(states) = spec.exact_states() {
        let values = states.iter().map(purity_of).collect::<Result<Vec<_>>>()?;
        return Ok(report(&values, true, target, target));
    }
    let values = try_sharded_map(seed, samples, |rng| purity_of(&spec.sample(rng)?))?;
    Ok(report(&values, false, target, target))
}

/// Exact E‖Tr_B(U|v⟩⟨w|U†)‖₂² over Haar U for orthonormal v, w and |A| = k:
/// d_B(d_A² − 1)/(D² − 1).
pub fn offdiag_expectation(n: usize, k: usize) -> f64 {
    let da = 2f64.powi(k as i32);
    let db = 2f64.powi((n - k) as i32);
    db * (da * da - 1.0) / ((da * db).powi(2) - 1.0)
}

/// ‖Tr_B(|a⟩⟨b|)‖₂² with A the first k qubits.
pub fn offdiag_frobenius_sq(a: &StateVector, b: &StateVector, k: usize) -> f64 {
    let mask = SubsystemMask::prefix(k);
    let x = a.reshape(&mask) * b.reshape(&mask).adjoint();
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Cross-term partial traces under a unitary ensemble, against the Haar
/// value and the 2^{k−n} bound. Defaults to the pair |0…0⟩, |0…01⟩.
pub fn offdiag_check(
    n: usize,
    k: usize,
    spec: &UnitaryEnsembleSpec,
    samples: usize,
    seed: Seed,
    pair: Option<(StateVector, StateVector)>,
) -> Result<BoundReport> {
    spec.validate()?;
    ensure!(spec.num_qubits() == n && n >= 1, Dimension, "ensemble acts on {} qubits, expected {n}", spec.num_qubits());
    ensure!(k <= n, Domain, "subsystem of {k} qubits in an {n}-qubit register");
    let (v, w) = match pair {
        Some(p) => p,
        None => (StateVector::zero(n)?, StateVector::basis(n, 1)?),
    };
    ensure!(v.num_qubits() == n && w.num_qubits() == n, Dimension, "input pair does not act on {n} qubits");
    ensure!(v.inner(&w)?.norm() <= 1e-10, Domain, "input pair is not orthogonal");
    let target = offdiag_expectation(n, k);
    let bound = 2f64.powi(k as i32 - n as i32);
    let inputs = [v, w];
    let mut r = if let Some(us) = spec.exact_unitaries() {
        let values = us
            .iter()
            .map(|u| Ok(offdiag_frobenius_sq(&u.apply(&inputs[0])?, &u.apply(&inputs[1])?, k)))
            .collect::<Result<Vec<_>>>()?;
        report(&values, true, target, bound)
    } else {
        let values = try_sharded_map(seed, samples, |rng| -> Result<f64> {
            let out = spec.sample_images(&inputs, rng)?;
            Ok(offdiag_frobenius_sq(&out[0], &out[1], k))
        })?;
        report(&values, false, target, bound)
    };
    r.pass &= r.measured < bound;
    Ok(r)
}

/// 2t²·2^{−d} + 2^{t−d} + 2^{t−n} + 2t²·2^{−n}
pub fn subspace_design_bound(n: usize, d: usize, t: usize) -> Result<f64> {
    ensure!(t < d && d < n, Domain, "bound requires t < d < n, got t={t}, d={d}, n={n}");
    let p = |e: i64| 2f64.powi(e as i32);
    let tt = 2.0 * (t * t) as f64;
    Ok(tt * p(-(d as i64)) + p(t as i64 - d as i64) + p(t as i64 - n as i64) + tt * p(-(n as i64)))
}

/// Guaranteed lower bound on the probability that every size-k subsystem of
/// t copies is δ-close to maximally mixed: Markov at δ/k on each single-copy
/// subsystem of size ≤ k, then a union bound.
pub fn mixedness_lower_bound(n: usize, k: usize, delta: f64) -> f64 {
    let fail: f64 = (1..=k.min(n)).map(|j| binomial(n as f64, j) * k as f64 * 2f64.powf(j as f64 - n as f64 / 2.0) / delta).sum();
    (1.0 - fail).max(0.0)
}

/// Largest raw ‖ρ_A − I/2^k‖₁ over all size-k subsystems A of |ψ⟩^⊗t.
pub fn max_subsystem_distance(psi: &StateVector, t: usize, k: usize) -> Result<f64> {
    let n = psi.num_qubits();
    ensure!(k <= t * n, Domain, "subsystem of {k} qubits in {t} copies of {n}");
    let mut cache: HashMap<Vec<usize>, DMatrix<C64>> = HashMap::new();
    let mut worst = 0.0f64;
    for subset in crate::k_subsets(t * n, k) {
        let mut rho = DMatrix::from_element(1, 1, c(1.0, 0.0));
        for copy in 0..t {
            let local: Vec<usize> = subset.iter().filter(|&&q| q / n == copy).map(|&q| q % n).collect();
            if local.is_empty() {
                continue;
            }
            if !cache.contains_key(&local) {
                let m = partial_trace(psi, &SubsystemMask::new(local.clone(), n)?)?.matrix().clone();
                cache.insert(local.clone(), m);
            }
            rho = rho.kronecker(&cache[&local]);
        }
        let dim = rho.nrows();
        let diff = rho - DMatrix::<C64>::identity(dim, dim) / c(dim as f64, 0.0);
        worst = worst.max(hermitian_trace_norm(&diff));
    }
    Ok(worst)
}

/// Fraction of sampled states whose t-copy reduced states on every size-k
/// subsystem lie within raw trace norm δ of maximally mixed.
pub fn mixedness_probability(spec: &StateEnsembleSpec, t: usize, k: usize, delta: f64, samples: usize, seed: Seed) -> Result<BoundReport> {
    spec.validate()?;
    let n = spec.num_qubits();
    ensure!(t >= 1 && k <= t * n, Domain, "subsystem of {k} qubits in {t} copies of {n}");
    ensure!(delta > 0.0, Domain, "δ must be positive");
    let hit = |psi: &StateVector| max_subsystem_distance(psi, t, k).map(|x| (x <= delta) as u8 as f64);
    let (values, exact) = match spec.exact_states() {
        Some(states) => (states.iter().map(hit).collect::<Result<Vec<_>>>()?, true),
        None => (try_sharded_map(seed, samples, |rng| hit(&spec.sample(rng)?))?, false),
    };
    let bound = mixedness_lower_bound(n, k, delta);
    let p = values.iter().sum::<f64>() / values.len() as f64;
    let stderr = if exact { 0.0 } else { (p * (1.0 - p) / values.len() as f64).sqrt() };
    Ok(BoundReport { target: bound, measured: p, stderr, bound, pass: p + Z_PASS * stderr >= bound })
}

#[cfg(test)]
mod tests;
