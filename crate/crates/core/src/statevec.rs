//! Dense state vectors and density matrices on small qubit registers.
//!
//! Qubit 0 is the most significant bit of an amplitude index. Blocks of
//! qubits are contiguous index ranges.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure, Result};
use crate::gf2::BitVector;

pub type C64 = Complex<f64>;

/// Largest number of amplitudes a dense state may hold.
pub const MAX_AMPLITUDES: usize = 1 << 26;
/// Normalization tolerance for states.
pub const NORM_TOL: f64 = 1e-10;
/// Singular values at or below this are treated as zero when counting Schmidt rank.
pub const RANK_TOL: f64 = 1e-9;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn check_qubits(n: usize) -> Result<usize> {
    ensure!(n < usize::BITS as usize && (1usize << n) <= MAX_AMPLITUDES, Resource, "{n} qubits exceed the dense cap of 2^26 amplitudes");
    Ok(1 << n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        ensure!(len.is_power_of_two(), Dimension, "amplitude count {len} is not a power of two");
        let num_qubits = len.trailing_zeros() as usize;
        check_qubits(num_qubits)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        ensure!((norm - 1.0).abs() <= NORM_TOL, Domain, "state norm {norm} is not 1");
        Ok(StateVector { num_qubits, amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        ensure!(norm > 0.0 && norm.is_finite(), Domain, "cannot normalize a zero vector");
        for a in &mut amps {
            *a /= norm;
        }
        StateVector::from_amplitudes(amps)
    }

    pub(crate) fn from_raw(num_qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        StateVector { num_qubits, amps }
    }

    /// Computational basis state |index⟩.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = check_qubits(num_qubits)?;
        ensure!(index < dim, Domain, "basis index {index} out of range for {num_qubits} qubits");
        let mut amps = vec![C64::default(); dim];
        amps[index] = c(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        StateVector::basis(num_qubits, 0)
    }

    /// |+⟩^⊗n
    pub fn plus(num_qubits: usize) -> Result<Self> {
        let dim = check_qubits(num_qubits)?;
        let a = (dim as f64).sqrt().recip();
        Ok(StateVector { num_qubits, amps: vec![c(a, 0.0); dim] })
    }

    /// The 0-qubit state with amplitude 1.
    pub fn scalar_one() -> Self {
        StateVector { num_qubits: 0, amps: vec![c(1.0, 0.0)] }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        ensure!(self.dim() == other.dim(), Dimension, "inner product of {} and {} qubits", self.num_qubits, other.num_qubits);
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |⟨self|other⟩|²
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let v = DMatrix::from_column_slice(self.dim(), 1, &self.amps);
        DensityMatrix { num_qubits: self.num_qubits, mat: &v * v.adjoint() }
    }

    /// Applies a 2×2 matrix (row-major) to qubit `q`.
    pub fn apply_1q(&mut self, q: usize, m: &[C64; 4]) {
        assert!(q < self.num_qubits);
        let bit = 1usize << (self.num_qubits - 1 - q);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0] * a0 + m[1] * a1;
                self.amps[i | bit] = m[2] * a0 + m[3] * a1;
            }
        }
    }

    /// Applies a 4×4 matrix (row-major) to qubits (`q0`, `q1`), `q0` being the
    /// more significant bit of the gate's local index.
    pub fn apply_2q(&mut self, q0: usize, q1: usize, m: &[C64; 16]) {
        assert!(q0 < self.num_qubits && q1 < self.num_qubits && q0 != q1);
        let b0 = 1usize << (self.num_qubits - 1 - q0);
        let b1 = 1usize << (self.num_qubits - 1 - q1);
        for i in 0..self.amps.len() {
            if i & (b0 | b1) == 0 {
                let idx = [i, i | b1, i | b0, i | b0 | b1];
                let v = idx.map(|j| self.amps[j]);
                for (r, &j) in idx.iter().enumerate() {
                    self.amps[j] = (0..4).map(|col| m[4 * r + col] * v[col]).sum();
                }
            }
        }
    }

    /// Applies a general matrix to the whole register.
    pub fn apply_matrix(&self, m: &DMatrix<C64>) -> Result<StateVector> {
        ensure!(m.ncols() == self.dim() && m.nrows() == self.dim(), Dimension, "{}x{} matrix on a {}-dim state", m.nrows(), m.ncols(), self.dim());
        let v = DMatrix::from_column_slice(self.dim(), 1, &self.amps);
        Ok(StateVector { num_qubits: self.num_qubits, amps: (m * v).as_slice().to_vec() })
    }

    /// Amplitudes arranged as a matrix with rows indexed by the qubits in `rows`
    /// and columns by the remaining qubits (both in increasing qubit order).
    pub fn reshape(&self, rows: &SubsystemMask) -> DMatrix<C64> {
        let n = self.num_qubits;
        let cols = rows.complement(n);
        let (ra, ca) = (rows.keep.len(), cols.keep.len());
        let mut m = DMatrix::zeros(1 << ra, 1 << ca);
        for (i, a) in self.amps.iter().enumerate() {
            m[(extract_bits(i, n, &rows.keep), extract_bits(i, n, &cols.keep))] = *a;
        }
        m
    }

    /// Applies a dense unitary to the qubits in `targets` (first target is the
    /// most significant bit of the matrix index).
    pub fn apply_to_qubits(&self, targets: &SubsystemMask, u: &DMatrix<C64>) -> Result<StateVector> {
        let n = self.num_qubits;
        check_mask(targets, n)?;
        let k = targets.len();
        ensure!(u.nrows() == 1 << k && u.ncols() == 1 << k, Dimension, "{}x{} matrix on {k} qubits", u.nrows(), u.ncols());
        let rest = targets.complement(n);
        let out = u * self.reshape(targets);
        let mut amps = vec![C64::default(); self.amps.len()];
        for r in 0..out.nrows() {
            for col in 0..out.ncols() {
                amps[combine_bits(r, &targets.keep, col, &rest.keep, n)] = out[(r, col)];
            }
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Outcome distribution of measuring `wires` (in the given order) in the
    /// computational basis. Outcome bits follow the order of `wires`, first wire
    /// most significant.
    pub fn marginal_distribution(&self, wires: &[usize]) -> Result<Vec<f64>> {
        ensure!(wires.iter().all(|&q| q < self.num_qubits), Domain, "wire out of range for {} qubits", self.num_qubits);
        ensure!(wires.len() <= 30, Resource, "marginal over {} wires is too large", wires.len());
        let mut p = vec![0.0; 1 << wires.len()];
        for (i, a) in self.amps.iter().enumerate() {
            p[extract_bits(i, self.num_qubits, wires)] += a.norm_sqr();
        }
        Ok(p)
    }
}

/// Gathers the bits of `index` at the given qubit positions into a compact index.
pub(crate) fn extract_bits(index: usize, n: usize, qubits: &[usize]) -> usize {
    qubits.iter().fold(0usize, |acc, &q| (acc << 1) | ((index >> (n - 1 - q)) & 1))
}

/// Inverse of [`extract_bits`] for a split into `a` (on `qa`) and `b` (on `qb`).
pub(crate) fn combine_bits(a: usize, qa: &[usize], b: usize, qb: &[usize], n: usize) -> usize {
    let mut idx = 0usize;
    for (j, &q) in qa.iter().enumerate() {
        idx |= ((a >> (qa.len() - 1 - j)) & 1) << (n - 1 - q);
    }
    for (j, &q) in qb.iter().enumerate() {
        idx |= ((b >> (qb.len() - 1 - j)) & 1) << (n - 1 - q);
    }
    idx
}

fn write_pairs<'a, S: Serializer>(vals: impl ExactSizeIterator<Item = &'a C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(vals.len()))?;
    for v in vals {
        seq.serialize_element(&[v.re, v.im])?;
    }
    seq.end()
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        write_pairs(self.amps.iter(), s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        StateVector::from_amplitudes(pairs.into_iter().map(|[re, im]| c(re, im)).collect()).map_err(D::Error::custom)
    }
}

/// Kronecker product, `a`'s qubits first.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let n = a.num_qubits + b.num_qubits;
    check_qubits(n)?;
    let mut amps = Vec::with_capacity(1 << n);
    for x in &a.amps {
        amps.extend(b.amps.iter().map(|y| x * y));
    }
    Ok(StateVector { num_qubits: n, amps })
}

/// `psi` tensored with itself `copies` times.
pub fn tensor_power(psi: &StateVector, copies: usize) -> Result<StateVector> {
    check_qubits(psi.num_qubits * copies)?;
    let mut out = StateVector::scalar_one();
    for _ in 0..copies {
        out = tensor(&out, psi)?;
    }
    Ok(out)
}

/// A sorted set of distinct qubit indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemMask {
    keep: Vec<usize>,
}

impl SubsystemMask {
    pub fn new(mut keep: Vec<usize>, num_qubits: usize) -> Result<Self> {
        keep.sort_unstable();
        let before = keep.len();
        keep.dedup();
        ensure!(keep.len() == before, Domain, "repeated qubit index in subsystem");
        if let Some(&q) = keep.last() {
            ensure!(q < num_qubits, Domain, "qubit {q} out of range for {num_qubits} qubits");
        }
        Ok(SubsystemMask { keep })
    }

    /// The first `k` qubits.
    pub fn prefix(k: usize) -> Self {
        SubsystemMask { keep: (0..k).collect() }
    }

    pub fn range(start: usize, end: usize) -> Self {
        SubsystemMask { keep: (start..end).collect() }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.keep
    }

    pub fn len(&self) -> usize {
        self.keep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keep.is_empty()
    }

    pub fn complement(&self, num_qubits: usize) -> SubsystemMask {
        SubsystemMask { keep: (0..num_qubits).filter(|q| self.keep.binary_search(q).is_err()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    mat: DMatrix<C64>,
}

/// Tolerance for the Hermiticity, trace and positivity checks.
pub const DENSITY_TOL: f64 = 1e-10;

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        ensure!(mat.is_square() && mat.nrows().is_power_of_two(), Dimension, "density matrix must be 2^n x 2^n");
        let num_qubits = mat.nrows().trailing_zeros() as usize;
        let herm = (&mat - mat.adjoint()).iter().fold(0.0f64, |m, v| m.max(v.norm()));
        ensure!(herm <= DENSITY_TOL, Domain, "matrix is not Hermitian (deviation {herm:e})");
        let tr = mat.trace();
        ensure!((tr.re - 1.0).abs() <= DENSITY_TOL && tr.im.abs() <= DENSITY_TOL, Domain, "trace {tr} is not 1");
        let rho = DensityMatrix { num_qubits, mat };
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        ensure!(min >= -DENSITY_TOL, Domain, "matrix has eigenvalue {min:e} < 0");
        Ok(rho)
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        let dim = check_qubits(num_qubits)?;
        Ok(DensityMatrix { num_qubits, mat: DMatrix::identity(dim, dim) / c(dim as f64, 0.0) })
    }

    /// Diagonal density matrix with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        DensityMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(probs.len(), probs.iter().map(|&p| c(p, 0.0)))))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }
}

pub(crate) fn matrix_to_pairs(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|col| [m[(r, col)].re, m[(r, col)].im]).collect()).collect()
}

/// Square matrix from rows of `[re, im]` pairs.
pub(crate) fn matrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<DMatrix<C64>> {
    let dim = rows.len();
    ensure!(rows.iter().all(|r| r.len() == dim), Dimension, "matrix rows must form a square");
    Ok(DMatrix::from_fn(dim, dim, |r, col| c(rows[r][col][0], rows[r][col][1])))
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_pairs(&self.mat).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        matrix_from_pairs(&rows).and_then(DensityMatrix::new).map_err(D::Error::custom)
    }
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Either a pure state or a density matrix, for operations that accept both.
pub enum QuantumState<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for QuantumState<'a> {
    fn from(s: &'a StateVector) -> Self {
        QuantumState::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for QuantumState<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        QuantumState::Mixed(s)
    }
}

/// Reduced density matrix on the kept qubits.
pub fn partial_trace<'a>(state: impl Into<QuantumState<'a>>, mask: &SubsystemMask) -> Result<DensityMatrix> {
    match state.into() {
        QuantumState::Pure(psi) => {
            check_mask(mask, psi.num_qubits)?;
            let m = psi.reshape(mask);
            Ok(DensityMatrix { num_qubits: mask.len(), mat: &m * m.adjoint() })
        }
        QuantumState::Mixed(rho) => {
            let n = rho.num_qubits;
            check_mask(mask, n)?;
            let rest = mask.complement(n);
            let (da, db) = (1usize << mask.len(), 1usize << rest.len());
            let mut out = DMatrix::zeros(da, da);
            for a in 0..da {
                for a2 in 0..da {
                    let mut acc = C64::default();
                    for b in 0..db {
                        let i = combine_bits(a, &mask.keep, b, &rest.keep, n);
                        let j = combine_bits(a2, &mask.keep, b, &rest.keep, n);
                        acc += rho.mat[(i, j)];
                    }
                    out[(a, a2)] = acc;
                }
            }
            Ok(DensityMatrix { num_qubits: mask.len(), mat: out })
        }
    }
}

fn check_mask(mask: &SubsystemMask, n: usize) -> Result<()> {
    if let Some(&q) = mask.keep.last() {
        ensure!(q < n, Domain, "qubit {q} out of range for {n} qubits");
    }
    Ok(())
}

/// Tr(ρ²)
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.mat.iter().map(|v| v.norm_sqr()).sum()
}

/// Schatten norm exponents supported by [`schatten_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Schatten {
    One,
    Two,
    Inf,
}

/// Raw Schatten norm (no ½ factor).
pub fn schatten_norm(m: &DMatrix<C64>, p: Schatten) -> f64 {
    match p {
        Schatten::Two => m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
        Schatten::One => singular_values(m).iter().sum(),
        Schatten::Inf => singular_values(m).first().copied().unwrap_or(0.0),
    }
}

/// Raw trace norm of a Hermitian matrix, via its eigenvalues.
pub(crate) fn hermitian_trace_norm(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum()
}

/// ½‖a − b‖₁
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    ensure!(a.mat.shape() == b.mat.shape(), Domain, "trace distance between {} and {} qubits", a.num_qubits, b.num_qubits);
    Ok(0.5 * hermitian_trace_norm(&(&a.mat - &b.mat)))
}

/// Von Neumann entropy in bits.
pub fn vn_entropy(rho: &DensityMatrix) -> f64 {
    let h: f64 = rho.eigenvalues().into_iter().filter(|&l| l > 1e-15).map(|l| -l * l.log2()).sum();
    h.max(0.0)
}

/// Raw ‖ρ − I/2^k‖₁ for a k-qubit ρ.
pub fn distance_to_maximally_mixed(rho: &DensityMatrix) -> f64 {
    let d = rho.mat.nrows();
    let diff = &rho.mat - DMatrix::<C64>::identity(d, d) / c(d as f64, 0.0);
    hermitian_trace_norm(&diff)
}

/// ‖ρ − I/2^k‖₂² = Tr(ρ²) − 2^{-k}.
pub fn frobenius_sq_to_maximally_mixed(rho: &DensityMatrix) -> f64 {
    purity(rho) - 1.0 / rho.mat.nrows() as f64
}

#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coeffs: Vec<f64>,
    pub left_basis: Vec<StateVector>,
    pub right_basis: Vec<StateVector>,
    /// The qubits carried by the left factors.
    pub cut: SubsystemMask,
    pub num_qubits: usize,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    /// Σ cᵢ |uᵢ⟩_A |vᵢ⟩_B laid out on the original qubit order.
    pub fn reconstruct(&self) -> StateVector {
        let n = self.num_qubits;
        let rest = self.cut.complement(n);
        let mut amps = vec![C64::default(); 1 << n];
        for ((s, u), v) in self.coeffs.iter().zip(&self.left_basis).zip(&self.right_basis) {
            for (a, ua) in u.amps.iter().enumerate() {
                for (b, vb) in v.amps.iter().enumerate() {
                    amps[combine_bits(a, &self.cut.keep, b, &rest.keep, n)] += ua * vb * *s;
                }
            }
        }
        StateVector { num_qubits: n, amps }
    }
}

struct Svd {
    values: Vec<f64>,
    left: Vec<Vec<C64>>,
    right: Vec<Vec<C64>>,
}

/// SVD keeping singular triplets above [`RANK_TOL`], in nonincreasing order.
/// `right[i]` holds row i of V†, so that m = Σ sᵢ leftᵢ rightᵢᵀ.
fn truncated_svd(m: DMatrix<C64>) -> Svd {
    let svd = m.svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let mut out = Svd { values: Vec::new(), left: Vec::new(), right: Vec::new() };
    for i in order {
        let s = svd.singular_values[i];
        if s <= RANK_TOL {
            break;
        }
        out.values.push(s);
        out.left.push(u.column(i).iter().copied().collect());
        out.right.push(vt.row(i).iter().copied().collect());
    }
    out
}

/// Schmidt decomposition across the bipartition (`cut`, rest).
pub fn schmidt(psi: &StateVector, cut: &SubsystemMask) -> Result<SchmidtDecomposition> {
    let n = psi.num_qubits;
    check_mask(cut, n)?;
    ensure!(!cut.is_empty() && cut.len() < n, Domain, "Schmidt cut must be a nonempty proper subset");
    let svd = truncated_svd(psi.reshape(cut));
    let rest = n - cut.len();
    Ok(SchmidtDecomposition {
        coeffs: svd.values,
        left_basis: svd.left.into_iter().map(|a| StateVector::from_raw(cut.len(), a)).collect(),
        right_basis: svd.right.into_iter().map(|a| StateVector::from_raw(rest, a)).collect(),
        cut: cut.clone(),
        num_qubits: n,
    })
}

/// Schmidt rank of `psi` between the first `k` qubits and the rest.
pub fn schmidt_rank_at(psi: &StateVector, k: usize) -> Result<usize> {
    ensure!(k > 0 && k < psi.num_qubits, Domain, "cut position {k} must lie strictly inside {} qubits", psi.num_qubits);
    Ok(singular_values(&psi.reshape(&SubsystemMask::prefix(k))).iter().filter(|&&s| s > RANK_TOL).count())
}

/// Entropy in bits across the cut after the first k qubits, from the Schmidt
/// coefficients (never forms the larger reduced state).
pub fn entanglement_entropy(psi: &StateVector, k: usize) -> Result<f64> {
    ensure!(k > 0 && k < psi.num_qubits, Domain, "cut position {k} must lie strictly inside {} qubits", psi.num_qubits);
    let h: f64 = singular_values(&psi.reshape(&SubsystemMask::prefix(k)))
        .iter()
        .map(|s| s * s)
        .filter(|&p| p > 1e-15)
        .map(|p| -p * p.log2())
        .sum();
    Ok(h.max(0.0))
}

/// Node of a recursive Schmidt tree: the block state |v_{τ,i₁…i_τ}⟩ with its
/// cumulative coefficient α_{i₁…i_τ}.
#[derive(Clone, Debug)]
pub struct SchmidtNode {
    pub path: Vec<usize>,
    pub alpha: f64,
    pub state: StateVector,
    pub parent: Option<usize>,
}

/// Tree-form decomposition of a state on `blocks` contiguous blocks of
/// `block_size` qubits. Level τ holds one node per prefix (i₁, …, i_τ); the last
/// level has a single child per parent.
#[derive(Clone, Debug)]
pub struct RecursiveSchmidtTree {
    pub blocks: usize,
    pub block_size: usize,
    /// Largest Schmidt rank over the block-boundary cuts of the input state.
    pub rank: usize,
    pub levels: Vec<Vec<SchmidtNode>>,
}

impl RecursiveSchmidtTree {
    pub fn leaves(&self) -> &[SchmidtNode] {
        self.levels.last().map(|l| l.as_slice()).unwrap_or(&[])
    }

    /// Σ over leaves of α · v₁ ⊗ v₂ ⊗ … ⊗ v_t.
    pub fn reconstruct(&self) -> StateVector {
        let n = self.blocks * self.block_size;
        let mut amps = vec![C64::default(); 1 << n];
        for leaf in self.leaves() {
            let mut chain = vec![leaf];
            let mut level = self.levels.len() - 1;
            let mut node = leaf;
            while let Some(p) = node.parent {
                level -= 1;
                node = &self.levels[level][p];
                chain.push(node);
            }
            let mut prod = StateVector::scalar_one();
            for nd in chain.iter().rev() {
                prod = tensor(&prod, &nd.state).expect("within cap");
            }
            for (a, p) in amps.iter_mut().zip(&prod.amps) {
                *a += p * leaf.alpha;
            }
        }
        StateVector { num_qubits: n, amps }
    }

    /// |Σ α²_{leaves} − 1|
    pub fn normalization_error(&self) -> f64 {
        (self.leaves().iter().map(|l| l.alpha * l.alpha).sum::<f64>() - 1.0).abs()
    }

    /// Largest |⟨v_{τ,…,i}|v_{τ,…,i'}⟩| over siblings i ≠ i'.
    pub fn max_sibling_overlap(&self) -> f64 {
        let mut worst = 0.0f64;
        for level in &self.levels {
            for (i, a) in level.iter().enumerate() {
                for b in &level[i + 1..] {
                    if a.parent == b.parent {
                        worst = worst.max(a.state.inner(&b.state).expect("same block size").norm());
                    }
                }
            }
        }
        worst
    }

    /// Largest |α²_{prefix} − Σ_children α²_{child}| over internal nodes.
    pub fn prefix_consistency_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for tau in 1..self.levels.len() {
            let mut sums = vec![0.0; self.levels[tau - 1].len()];
            for child in &self.levels[tau] {
                sums[child.parent.expect("non-root level")] += child.alpha * child.alpha;
            }
            for (node, s) in self.levels[tau - 1].iter().zip(sums) {
                worst = worst.max((node.alpha * node.alpha - s).abs());
            }
        }
        worst
    }

    /// Largest number of children of any node.
    pub fn max_branching(&self) -> usize {
        let mut worst = self.levels.first().map_or(0, |l| l.len());
        for tau in 1..self.levels.len() {
            let mut counts = vec![0usize; self.levels[tau - 1].len()];
            for child in &self.levels[tau] {
                counts[child.parent.expect("non-root level")] += 1;
            }
            worst = worst.max(counts.into_iter().max().unwrap_or(0));
        }
        worst
    }
}

/// Recursively Schmidt-decomposes `psi` block by block.
pub fn recursive_schmidt(psi: &StateVector, block_size: usize, blocks: usize) -> Result<RecursiveSchmidtTree> {
    ensure!(block_size > 0 && blocks > 0, Domain, "blocks and block size must be positive");
    ensure!(psi.num_qubits == block_size * blocks, Domain, "state has {} qubits, expected {blocks} blocks of {block_size}", psi.num_qubits);
    let rank = (1..blocks).map(|tau| schmidt_rank_at(psi, tau * block_size)).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(1);

    // (parent index, path, alpha, remainder state)
    let mut frontier: Vec<(Option<usize>, Vec<usize>, f64, StateVector)> = vec![(None, Vec::new(), 1.0, psi.clone())];
    let mut levels = Vec::with_capacity(blocks);
    for tau in 1..=blocks {
        let mut level = Vec::new();
        let mut next = Vec::new();
        for (parent, path, alpha, rem) in frontier {
            if tau == blocks {
                let mut p = path.clone();
                p.push(0);
                level.push(SchmidtNode { path: p, alpha, state: rem, parent });
                continue;
            }
            let svd = truncated_svd(rem.reshape(&SubsystemMask::prefix(block_size)));
            let rest_qubits = rem.num_qubits - block_size;
            for (i, ((s, u), v)) in svd.values.iter().zip(svd.left).zip(svd.right).enumerate() {
                let mut p = path.clone();
                p.push(i);
                let idx = level.len();
                level.push(SchmidtNode { path: p.clone(), alpha: alpha * s, state: StateVector::from_raw(block_size, u), parent });
                next.push((Some(idx), p, alpha * s, StateVector::from_raw(rest_qubits, v)));
            }
        }
        levels.push(level);
        frontier = next;
    }
    Ok(RecursiveSchmidtTree { blocks, block_size, rank, levels })
}

/// Samples computational-basis outcomes from a fixed state.
pub struct OutcomeSampler {
    num_qubits: usize,
    cumulative: Vec<f64>,
}

impl OutcomeSampler {
    pub fn new(psi: &StateVector) -> Self {
        let mut acc = 0.0;
        let cumulative = psi
            .amps
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        OutcomeSampler { num_qubits: psi.num_qubits, cumulative }
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("nonempty");
        let u = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        // skip zero-probability tail entries produced by rounding
        let mut i = i.min(self.cumulative.len() - 1);
        while i > 0 && self.cumulative[i] == self.cumulative[i - 1] {
            i -= 1;
        }
        i
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVector {
        BitVector::new(self.num_qubits, self.sample_index(rng) as u64).expect("register fits in 64 bits")
    }
}

/// Measures every qubit in the computational basis.
pub fn measure_all<R: Rng + ?Sized>(psi: &StateVector, rng: &mut R) -> Result<BitVector> {
    ensure!(psi.num_qubits <= crate::gf2::MAX_BITS, Domain, "outcome does not fit a bit vector");
    Ok(OutcomeSampler::new(psi).sample(rng))
}

/// Dense matrix from a row-major slice of complex entries.
pub fn matrix_from_rows(dim: usize, entries: &[C64]) -> Result<DMatrix<C64>> {
    ensure!(entries.len() == dim * dim, Dimension, "{} entries for a {dim}x{dim} matrix", entries.len());
    Ok(DMatrix::from_row_slice(dim, dim, entries))
}
