//! Samplers for Haar states and unitaries, exact 2-designs (stabilizer
//! states and Clifford unitaries) and random phased subspace states.

mod clifford;

pub use clifford::{CliffordTableau, Pauli};

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure, Error, Result};
use crate::gf2::{BitVector, KWiseFamily, Subspace, ENUMERATION_CAP};
use crate::statevec::{c, hermitian_eigenvalues, matrix_from_pairs, matrix_to_pairs, StateVector, C64, MAX_AMPLITUDES};

/// Operator-norm tolerance on U†U − I.
pub const UNITARY_TOL: f64 = 1e-10;
pub const MAX_HAAR_UNITARY_QUBITS: usize = 10;
pub const MAX_CLIFFORD_QUBITS: usize = 8;
pub const MAX_STABILIZER_QUBITS: usize = 10;
/// Largest register for which stabilizer states are enumerated exhaustively.
pub const MAX_ENUMERATED_STABILIZER_QUBITS: usize = 3;
/// Largest register for which the computational basis counts as an exact list.
pub const MAX_ENUMERATED_BASIS_QUBITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    num_qubits: usize,
    mat: DMatrix<C64>,
}

impl Unitary {
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        let dim = mat.nrows();
        ensure!(mat.is_square() && dim.is_power_of_two(), Dimension, "{}x{} is not a qubit operator", mat.nrows(), mat.ncols());
        ensure!(dim <= 1 << MAX_HAAR_UNITARY_QUBITS, Resource, "dense unitaries are limited to {MAX_HAAR_UNITARY_QUBITS} qubits");
        let u = Unitary { num_qubits: dim.trailing_zeros() as usize, mat };
        let residual = u.unitarity_residual();
        ensure!(residual <= UNITARY_TOL, Domain, "matrix is not unitary (residual {residual:.3e})");
        Ok(u)
    }

    pub(crate) fn from_raw(mat: DMatrix<C64>) -> Self {
        Unitary { num_qubits: mat.nrows().trailing_zeros() as usize, mat }
    }

    pub fn identity(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Unitary::from_raw(DMatrix::identity(dim, dim))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// ‖U†U − I‖ in operator norm.
    pub fn unitarity_residual(&self) -> f64 {
        let dim = self.mat.nrows();
        let gram = self.mat.adjoint() * &self.mat - DMatrix::<C64>::identity(dim, dim);
        hermitian_eigenvalues(&gram).into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        psi.apply_matrix(&self.mat)
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary::from_raw(self.mat.adjoint())
    }
}

impl Serialize for Unitary {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_pairs(&self.mat).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Unitary {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        matrix_from_pairs(&rows).and_then(Unitary::new).map_err(D::Error::custom)
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn check_dense(n: usize) -> Result<usize> {
    ensure!(n < 63 && (1usize << n) <= MAX_AMPLITUDES, Resource, "{n} qubits exceed the dense cap");
    Ok(1 << n)
}

pub fn sample_haar_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    let dim = check_dense(n)?;
    StateVector::normalized((0..dim).map(|_| gaussian(rng)).collect())
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Orthonormalizes `v` against `basis` (two Gram–Schmidt passes); returns the
/// projection coefficients and the residual norm.
fn orthonormalize(basis: &[Vec<C64>], v: &mut [C64]) -> (Vec<C64>, f64) {
    let mut coeffs = vec![C64::default(); basis.len()];
    for _ in 0..2 {
        for (k, b) in basis.iter().enumerate() {
            let p = dot(b, v);
            coeffs[k] += p;
            for (x, y) in v.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
    }
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    (coeffs, norm)
}

/// First `cols` columns of a Haar unitary on n qubits.
pub fn sample_haar_isometry<R: Rng + ?Sized>(n: usize, cols: usize, rng: &mut R) -> Result<Vec<StateVector>> {
    let dim = check_dense(n)?;
    ensure!(cols <= dim, Dimension, "{cols} orthonormal columns do not fit in dimension {dim}");
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while basis.len() < cols {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        if orthonormalize(&basis, &mut v).1 > 1e-6 {
            basis.push(v);
        }
    }
    Ok(basis.into_iter().map(|v| StateVector::from_raw(n, v)).collect())
}

/// Orthonormalizing a complex Gaussian matrix column by column yields the QR
/// factor with positive diagonal, which is Haar distributed.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Unitary> {
    ensure!(n <= MAX_HAAR_UNITARY_QUBITS, Resource, "Haar unitaries are limited to {MAX_HAAR_UNITARY_QUBITS} qubits");
    let dim = 1 << n;
    let cols = sample_haar_isometry(n, dim, rng)?;
    Ok(Unitary::from_raw(DMatrix::from_fn(dim, dim, |r, col| cols[col].amps()[r])))
}

/// Joint sample of (U|v_1⟩, …, U|v_m⟩) for one Haar U, without building U.
///
/// With V = QR, U·Q is a Haar isometry, so the images are W·R for a fresh
/// isometry W.
pub fn haar_images<R: Rng + ?Sized>(inputs: &[StateVector], rng: &mut R) -> Result<Vec<StateVector>> {
    let Some(first) = inputs.first() else { return Ok(Vec::new()) };
    let n = first.num_qubits();
    ensure!(inputs.iter().all(|v| v.num_qubits() == n), Dimension, "inputs act on different registers");
    let mut q: Vec<Vec<C64>> = Vec::new();
    let mut r: Vec<Vec<C64>> = Vec::new();
    for v in inputs {
        let mut w = v.amps().to_vec();
        let (mut coeffs, norm) = orthonormalize(&q, &mut w);
        if norm > 1e-12 {
            q.push(w);
            coeffs.push(c(norm, 0.0));
        }
        r.push(coeffs);
    }
    let w = sample_haar_isometry(n, q.len(), rng)?;
    Ok(r.iter()
        .map(|coeffs| {
            let mut out = vec![C64::default(); 1 << n];
            for (col, k) in w.iter().zip(coeffs) {
                for (o, a) in out.iter_mut().zip(col.amps()) {
                    *o += k * a;
                }
            }
            StateVector::from_raw(n, out)
        })
        .collect())
}

pub fn sample_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Unitary> {
    ensure!((1..=MAX_CLIFFORD_QUBITS).contains(&n), Resource, "Clifford sampling supports 1..={MAX_CLIFFORD_QUBITS} qubits");
    Ok(Unitary::from_raw(CliffordTableau::random(n, rng).to_matrix()))
}

pub fn sample_stabilizer_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<StateVector> {
    ensure!((1..=MAX_STABILIZER_QUBITS).contains(&n), Resource, "stabilizer sampling supports 1..={MAX_STABILIZER_QUBITS} qubits");
    Ok(CliffordTableau::random(n, rng).stabilizer_state())
}

/// Rounded amplitudes after fixing the global phase, for deduplication.
fn phase_key(amps: &[C64]) -> Vec<(i64, i64)> {
    let lead = amps.iter().find(|a| a.norm() > 1e-6).copied().unwrap_or(c(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    amps.iter()
        .map(|a| {
            let z = a * phase;
            ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64)
        })
        .collect()
}

fn breadth_first<T: Clone>(start: T, key: impl Fn(&T) -> Vec<(i64, i64)>, moves: impl Fn(&T) -> Vec<T>) -> Vec<T> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        if seen.insert(key(&x), ()).is_some() {
            continue;
        }
        queue.extend(moves(&x));
        out.push(x);
    }
    out
}

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn hadamard() -> [C64; 4] {
    [c(H, 0.0), c(H, 0.0), c(H, 0.0), c(-H, 0.0)]
}

fn phase_gate() -> [C64; 4] {
    [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]
}

fn cnot() -> [C64; 16] {
    let mut m = [C64::default(); 16];
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[4 * r + col] = c(1.0, 0.0);
    }
    m
}

/// Every n-qubit stabilizer state, one representative per global phase.
pub fn enumerate_stabilizer_states(n: usize) -> Result<Vec<StateVector>> {
    ensure!((1..=MAX_ENUMERATED_STABILIZER_QUBITS).contains(&n), Resource, "stabilizer enumeration supports 1..={MAX_ENUMERATED_STABILIZER_QUBITS} qubits");
    let moves = |psi: &StateVector| {
        let mut next = Vec::new();
        for q in 0..n {
            for g in [hadamard(), phase_gate()] {
                let mut p = psi.clone();
                p.apply_1q(q, &g);
                next.push(p);
            }
            for r in (0..n).filter(|&r| r != q) {
                let mut p = psi.clone();
                p.apply_2q(q, r, &cnot());
                next.push(p);
            }
        }
        next
    };
    Ok(breadth_first(StateVector::zero(n)?, |p| phase_key(p.amps()), moves))
}

/// The 24 single-qubit Cliffords modulo global phase.
pub fn single_qubit_cliffords() -> Vec<Unitary> {
    let gens = [hadamard(), phase_gate()].map(|g| DMatrix::from_row_slice(2, 2, &g));
    let key = |u: &DMatrix<C64>| phase_key(u.as_slice());
    breadth_first(DMatrix::<C64>::identity(2, 2), key, |u| gens.iter().map(|g| g * u).collect())
        .into_iter()
        .map(Unitary::from_raw)
        .collect()
}

/// 2^{−d/2} Σ_{x∈S} (−1)^{f(x)} |x⟩ with f given on ambient strings.
pub fn phased_subspace_state(s: &Subspace, phase: impl Fn(&BitVector) -> bool) -> Result<StateVector> {
    phased_subspace_state_coords(s, |coords| phase(&s.element(coords)))
}

/// Same state with f given on the d-bit coordinates of x in the canonical basis.
pub fn phased_subspace_state_coords(s: &Subspace, phase: impl Fn(u64) -> bool) -> Result<StateVector> {
    let d = s.dim();
    ensure!(d <= ENUMERATION_CAP, Resource, "subspace dimension {d} exceeds the enumeration cap {ENUMERATION_CAP}");
    let dim = check_dense(s.ambient_dim())?;
    let mut amps = vec![C64::default(); dim];
    let a = (0.5f64).powf(d as f64 / 2.0);
    for coords in 0..1u64 << d {
        let x = s.element(coords).value() as usize;
        amps[x] = c(if phase(coords) { -a } else { a }, 0.0);
    }
    Ok(StateVector::from_raw(s.ambient_dim(), amps))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMode {
    /// Independent uniform phase bit per element.
    TrueRandom,
    /// 4-wise independent f on the d-bit basis coordinates.
    #[default]
    Kwise4,
    /// 4-wise independent f on the ambient n-bit strings.
    Kwise4Ambient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateEnsembleSpec {
    Haar { n: usize },
    Stabilizer { n: usize },
    PhasedSubspace {
        n: usize,
        d: usize,
        #[serde(default)]
        phase_mode: PhaseMode,
    },
    /// Uniform computational basis states; their average is the maximally mixed state.
    ComputationalBasis { n: usize },
    FixedList { states: Vec<StateVector> },
}

impl StateEnsembleSpec {
    pub fn num_qubits(&self) -> usize {
        match self {
            Self::Haar { n } | Self::Stabilizer { n } | Self::PhasedSubspace { n, .. } | Self::ComputationalBasis { n } => *n,
            Self::FixedList { states } => states.first().map_or(0, StateVector::num_qubits),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Haar { n } | Self::ComputationalBasis { n } => {
                check_dense(*n)?;
            }
            Self::Stabilizer { n } => {
                ensure!((1..=MAX_STABILIZER_QUBITS).contains(n), Resource, "stabilizer ensembles support 1..={MAX_STABILIZER_QUBITS} qubits");
            }
            Self::PhasedSubspace { n, d, .. } => {
                check_dense(*n)?;
                ensure!(d <= n, Domain, "subspace dimension {d} exceeds n = {n}");
                ensure!(*d <= ENUMERATION_CAP, Resource, "subspace dimension {d} exceeds the enumeration cap");
            }
            Self::FixedList { states } => {
                ensure!(!states.is_empty(), Domain, "fixed list is empty");
                let n = states[0].num_qubits();
                ensure!(states.iter().all(|s| s.num_qubits() == n), Dimension, "fixed list mixes register sizes");
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<StateVector> {
        match self {
            Self::Haar { n } => sample_haar_state(*n, rng),
            Self::Stabilizer { n } => sample_stabilizer_state(*n, rng),
            Self::ComputationalBasis { n } => {
                let dim = check_dense(*n)?;
                StateVector::basis(*n, rng.random_range(0..dim))
            }
            Self::PhasedSubspace { n, d, phase_mode } => {
                self.validate()?;
                let s = crate::gf2::sample_subspace(*n, *d, rng)?;
                match phase_mode {
                    PhaseMode::TrueRandom => {
                        let bits: Vec<bool> = (0..1usize << d).map(|_| rng.random()).collect();
                        phased_subspace_state_coords(&s, |x| bits[x as usize])
                    }
                    PhaseMode::Kwise4 => {
                        let f = KWiseFamily::sample((*d).max(1) as u32, 4, rng)?;
                        phased_subspace_state_coords(&s, |x| f.eval_value(x))
                    }
                    PhaseMode::Kwise4Ambient => {
                        let f = KWiseFamily::sample((*n).max(1) as u32, 4, rng)?;
                        phased_subspace_state(&s, |x| f.eval_value(x.value()))
                    }
                }
            }
            Self::FixedList { states } => {
                ensure!(!states.is_empty(), Domain, "fixed list is empty");
                Ok(states[rng.random_range(0..states.len())].clone())
            }
        }
    }

    /// The full support with uniform weights, when it is small enough to average exactly.
    pub fn exact_states(&self) -> Option<Vec<StateVector>> {
        match self {
            Self::FixedList { states } => Some(states.clone()),
            Self::Stabilizer { n } if *n <= MAX_ENUMERATED_STABILIZER_QUBITS => enumerate_stabilizer_states(*n).ok(),
            Self::ComputationalBasis { n } if *n <= MAX_ENUMERATED_BASIS_QUBITS => {
                (0..1usize << n).map(|i| StateVector::basis(*n, i)).collect::<Result<_>>().ok()
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum UnitaryEnsembleSpec {
    Haar { n: usize },
    Clifford { n: usize },
    FixedList { unitaries: Vec<Unitary> },
}

impl UnitaryEnsembleSpec {
    pub fn num_qubits(&self) -> usize {
        match self {
            Self::Haar { n } | Self::Clifford { n } => *n,
            Self::FixedList { unitaries } => unitaries.first().map_or(0, Unitary::num_qubits),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Haar { n } => ensure!(*n <= MAX_HAAR_UNITARY_QUBITS, Resource, "Haar unitaries are limited to {MAX_HAAR_UNITARY_QUBITS} qubits"),
            Self::Clifford { n } => ensure!((1..=MAX_CLIFFORD_QUBITS).contains(n), Resource, "Clifford sampling supports 1..={MAX_CLIFFORD_QUBITS} qubits"),
            Self::FixedList { unitaries } => {
                ensure!(!unitaries.is_empty(), Domain, "fixed list is empty");
                let n = unitaries[0].num_qubits();
                ensure!(unitaries.iter().all(|u| u.num_qubits() == n), Dimension, "fixed list mixes register sizes");
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Unitary> {
        match self {
            Self::Haar { n } => sample_haar_unitary(*n, rng),
            Self::Clifford { n } => sample_clifford(*n, rng),
            Self::FixedList { unitaries } => {
                ensure!(!unitaries.is_empty(), Domain, "fixed list is empty");
                Ok(unitaries[rng.random_range(0..unitaries.len())].clone())
            }
        }
    }

    /// Images of `inputs` under one sampled unitary. Haar draws only build the
    /// columns they need.
    pub fn sample_images<R: Rng + ?Sized>(&self, inputs: &[StateVector], rng: &mut R) -> Result<Vec<StateVector>> {
        let n = self.num_qubits();
        ensure!(inputs.iter().all(|v| v.num_qubits() == n), Dimension, "inputs do not match the {n}-qubit ensemble");
        match self {
            Self::Haar { n } => {
                check_dense(*n)?;
                haar_images(inputs, rng)
            }
            Self::Clifford { n } if inputs.iter().all(|v| basis_support(v).is_some()) => {
                self.validate()?;
                let t = CliffordTableau::random(*n, rng);
                let zero = t.stabilizer_state().into_amps();
                Ok(inputs
                    .iter()
                    .map(|v| {
                        let (x, a) = basis_support(v).expect("checked above");
                        StateVector::from_raw(*n, t.basis_image(&zero, x).into_iter().map(|z| z * a).collect())
                    })
                    .collect())
            }
            _ => {
                let u = self.sample(rng)?;
                inputs.iter().map(|v| u.apply(v)).collect()
            }
        }
    }

    pub fn exact_unitaries(&self) -> Option<Vec<Unitary>> {
        match self {
            Self::FixedList { unitaries } => Some(unitaries.clone()),
            Self::Clifford { n: 1 } => Some(single_qubit_cliffords()),
            _ => None,
        }
    }
}

/// Index and amplitude of a state supported on a single basis vector.
fn basis_support(v: &StateVector) -> Option<(usize, C64)> {
    let mut nonzero = v.amps().iter().enumerate().filter(|(_, a)| a.norm() > 0.0);
    let (x, a) = nonzero.next()?;
    nonzero.next().is_none().then_some((x, *a))
}

impl std::str::FromStr for StateEnsembleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec: StateEnsembleSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }
}

impl std::str::FromStr for UnitaryEnsembleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec: UnitaryEnsembleSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }
}
