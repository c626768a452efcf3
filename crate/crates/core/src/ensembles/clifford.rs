//! Clifford tableaux: uniform sampling and dense materialization.
//!
//! Sampling follows the Bravyi–Maslov canonical form (a quantum Mallows draw
//! for the Hadamard/permutation layer sandwiched between two random
//! Hadamard-free layers), which is exactly uniform over the Clifford group.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::rng::Seed;
use crate::statevec::{c, StateVector, C64};

/// Hermitian Pauli operator (−1)^sign ⊗_q P_q with P_q ∈ {I, X, Y, Z}.
///
/// Bit (n−1−q) of `x`/`z` belongs to qubit q, matching amplitude indexing.
/// A qubit with both bits set carries Y = iXZ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pauli {
    pub x: u64,
    pub z: u64,
    pub sign: bool,
}

impl Pauli {
    pub fn x_on(n: usize, q: usize) -> Self {
        Pauli { x: 1 << (n - 1 - q), z: 0, sign: false }
    }

    pub fn z_on(n: usize, q: usize) -> Self {
        Pauli { x: 0, z: 1 << (n - 1 - q), sign: false }
    }

    pub fn commutes_with(&self, other: &Pauli) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// P|ψ⟩
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let ys = (self.x & self.z).count_ones() % 4;
        let mut phase = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][ys as usize];
        if self.sign {
            phase = -phase;
        }
        let x = self.x as usize;
        let z = self.z as usize;
        let mut out = vec![C64::default(); psi.len()];
        for (b, a) in psi.iter().enumerate() {
            let s = if (z & b).count_ones() % 2 == 1 { -phase } else { phase };
            out[b ^ x] = s * a;
        }
        out
    }
}

/// Images of X_q (destabilizers) and Z_q (stabilizers) under a Clifford unitary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordTableau {
    n: usize,
    destabilizers: Vec<Pauli>,
    stabilizers: Vec<Pauli>,
}

type BitMatrix = Vec<Vec<u8>>;

fn identity(n: usize) -> BitMatrix {
    (0..n).map(|i| (0..n).map(|j| (i == j) as u8).collect()).collect()
}

fn matmul(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let (r, k, cols) = (a.len(), b.len(), b[0].len());
    (0..r).map(|i| (0..cols).map(|j| (0..k).fold(0u8, |acc, l| acc ^ (a[i][l] & b[l][j]))).collect()).collect()
}

fn transpose(a: &BitMatrix) -> BitMatrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

/// Inverse of a unit lower-triangular matrix over F₂.
fn inverse_unit_lower(l: &BitMatrix) -> BitMatrix {
    let n = l.len();
    let mut inv = identity(n);
    for i in 0..n {
        for j in 0..i {
            let mut acc = 0u8;
            for k in j..i {
                acc ^= l[i][k] & inv[k][j];
            }
            inv[i][j] = acc;
        }
    }
    inv
}

/// Random bits strictly below the diagonal, mirrored above when `symmetric`.
fn fill_lower<R: Rng + ?Sized>(m: &mut BitMatrix, symmetric: bool, rng: &mut R) {
    let n = m.len();
    for i in 0..n {
        for j in 0..i {
            let b = rng.random::<bool>() as u8;
            m[i][j] = b;
            if symmetric {
                m[j][i] = b;
            }
        }
    }
}

/// Quantum Mallows sample: Hadamard pattern and qubit permutation.
fn sample_qmallows<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<bool>, Vec<usize>) {
    let mut had = vec![false; n];
    let mut perm = vec![0usize; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let m = (n - i) as i32;
        let eps = 4f64.powi(-m);
        let r: f64 = rng.random();
        let index = (-(r + (1.0 - r) * eps).log2().ceil()) as i32;
        let index = index.clamp(0, 2 * m - 1);
        had[i] = index < m;
        let k = if index < m { index } else { 2 * m - index - 1 } as usize;
        perm[i] = remaining.remove(k);
    }
    (had, perm)
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        CliffordTableau {
            n,
            destabilizers: (0..n).map(|q| Pauli::x_on(n, q)).collect(),
            stabilizers: (0..n).map(|q| Pauli::z_on(n, q)).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn destabilizers(&self) -> &[Pauli] {
        &self.destabilizers
    }

    pub fn stabilizers(&self) -> &[Pauli] {
        &self.stabilizers
    }

    /// Uniformly random n-qubit Clifford (up to global phase).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!((1..=32).contains(&n));
        let (had, perm) = sample_qmallows(n, rng);
        let mut gamma1 = identity(n);
        let mut gamma2 = identity(n);
        for i in 0..n {
            gamma1[i][i] = rng.random::<bool>() as u8;
            gamma2[i][i] = rng.random::<bool>() as u8;
        }
        let mut delta1 = identity(n);
        let mut delta2 = identity(n);
        fill_lower(&mut gamma1, true, rng);
        fill_lower(&mut gamma2, true, rng);
        fill_lower(&mut delta1, false, rng);
        fill_lower(&mut delta2, false, rng);

        let block = |delta: &BitMatrix, gamma: &BitMatrix| -> BitMatrix {
            let prod = matmul(gamma, delta);
            let inv = transpose(&inverse_unit_lower(delta));
            let mut t = vec![vec![0u8; 2 * n]; 2 * n];
            for i in 0..n {
                for j in 0..n {
                    t[i][j] = delta[i][j];
                    t[n + i][j] = prod[i][j];
                    t[n + i][n + j] = inv[i][j];
                }
            }
            t
        };
        let table1 = block(&delta1, &gamma1);
        let table2 = block(&delta2, &gamma2);
        let mut table: BitMatrix = (0..2 * n)
            .map(|r| if r < n { table2[perm[r]].clone() } else { table2[n + perm[r - n]].clone() })
            .collect();
        for i in (0..n).filter(|&i| had[i]) {
            table.swap(i, n + i);
        }
        let full = matmul(&table1, &table);

        // column j of the symplectic matrix belongs to qubit j
        let row_to_pauli = |row: &Vec<u8>, sign: bool| {
            let mut p = Pauli { x: 0, z: 0, sign };
            for q in 0..n {
                p.x |= (row[q] as u64) << (n - 1 - q);
                p.z |= (row[n + q] as u64) << (n - 1 - q);
            }
            p
        };
        let destabilizers = (0..n).map(|i| row_to_pauli(&full[i], rng.random())).collect();
        let stabilizers = (0..n).map(|i| row_to_pauli(&full[n + i], rng.random())).collect();
        CliffordTableau { n, destabilizers, stabilizers }
    }

    /// Checks the commutation relations of a valid tableau.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                let dd = self.destabilizers[i].commutes_with(&self.destabilizers[j]);
                let ss = self.stabilizers[i].commutes_with(&self.stabilizers[j]);
                let ds = self.destabilizers[i].commutes_with(&self.stabilizers[j]);
                dd && ss && (ds == (i != j))
            })
        })
    }

    /// U|0…0⟩: the state stabilized by every stabilizer row.
    pub fn stabilizer_state(&self) -> StateVector {
        let dim = 1usize << self.n;
        let mut rng = Seed(0x5ab1_1ce5).rng();
        loop {
            let mut v: Vec<C64> = (0..dim).map(|_| c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
            for g in &self.stabilizers {
                let gv = g.apply(&v);
                for (a, b) in v.iter_mut().zip(gv) {
                    *a = (*a + b) * 0.5;
                }
            }
            if v.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-8 {
                return StateVector::normalized(v).expect("nonzero projection");
            }
        }
    }

    /// U|x⟩ given U|0…0⟩, by applying the destabilizers selected by the bits of x.
    pub fn basis_image(&self, zero_image: &[C64], x: usize) -> Vec<C64> {
        let mut v = zero_image.to_vec();
        for q in 0..self.n {
            if (x >> (self.n - 1 - q)) & 1 == 1 {
                v = self.destabilizers[q].apply(&v);
            }
        }
        v
    }

    /// Dense unitary U with U X_q U† and U Z_q U† equal to the tableau rows.
    pub fn to_matrix(&self) -> DMatrix<C64> {
        let n = self.n;
        let dim = 1usize << n;
        let mut columns: Vec<Vec<C64>> = Vec::with_capacity(dim);
        columns.push(self.stabilizer_state().into_amps());
        for x in 1..dim {
            let low = x.trailing_zeros() as usize;
            let prev = x & (x - 1);
            let q = n - 1 - low;
            columns.push(self.destabilizers[q].apply(&columns[prev]));
        }
        DMatrix::from_fn(dim, dim, |r, col| columns[col][r])
    }
}
