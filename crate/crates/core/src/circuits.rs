//! Layered shallow circuits: validation, lightcones, simulation and random
//! line brickwork.
//!
//! Wires `0..n` are system qubits and `n..n+a` are ancillae. Lightcones are
//! computed from gate supports only, so a gate that happens to be the identity
//! still propagates influence.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ensembles::{sample_haar_unitary, Unitary};
use crate::error::{ensure, Error, Result};
use crate::statevec::{c, schmidt_rank_at, tensor, StateVector, C64};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    #[default]
    None,
    Line,
}

/// A 1- or 2-qubit unitary. For two qubits the first listed qubit is the more
/// significant bit of the 4×4 matrix index.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    qubits: Vec<usize>,
    mat: Vec<C64>,
}

impl Gate {
    pub fn new(qubits: Vec<usize>, mat: Vec<C64>) -> Result<Self> {
        let k = qubits.len();
        ensure!(k == 1 || k == 2, Structural, "gates act on 1 or 2 qubits, got {k}");
        ensure!(k == 1 || qubits[0] != qubits[1], Structural, "gate repeats qubit {}", qubits[0]);
        let dim = 1 << k;
        ensure!(mat.len() == dim * dim, Dimension, "{}-qubit gate needs {} entries, got {}", k, dim * dim, mat.len());
        Unitary::new(DMatrix::from_row_slice(dim, dim, &mat))?;
        Ok(Gate { qubits, mat })
    }

    pub fn single(q: usize, mat: [C64; 4]) -> Result<Self> {
        Gate::new(vec![q], mat.to_vec())
    }

    pub fn two(q0: usize, q1: usize, mat: [C64; 16]) -> Result<Self> {
        Gate::new(vec![q0, q1], mat.to_vec())
    }

    pub fn from_unitary(qubits: Vec<usize>, u: &Unitary) -> Result<Self> {
        let m = u.matrix();
        Gate::new(qubits, (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |col| m[(r, col)])).collect())
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    /// Row-major matrix entries.
    pub fn matrix(&self) -> &[C64] {
        &self.mat
    }

    fn apply_to(&self, psi: &mut StateVector) {
        match self.qubits[..] {
            [q] => psi.apply_1q(q, &self.mat[..].try_into().expect("4 entries")),
            [q0, q1] => psi.apply_2q(q0, q1, &self.mat[..].try_into().expect("16 entries")),
            _ => unreachable!("gate arity checked at construction"),
        }
    }
}

/// Common gate matrices (row-major).
pub mod gates {
    use super::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn real<const N: usize>(v: [f64; N]) -> [C64; N] {
        v.map(|x| c(x, 0.0))
    }

    pub fn x() -> [C64; 4] {
        real([0.0, 1.0, 1.0, 0.0])
    }

    pub fn z() -> [C64; 4] {
        real([1.0, 0.0, 0.0, -1.0])
    }

    pub fn h() -> [C64; 4] {
        real([H, H, H, -H])
    }

    pub fn s() -> [C64; 4] {
        [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]
    }

    pub fn cnot() -> [C64; 16] {
        real([1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0])
    }

    pub fn cz() -> [C64; 16] {
        real([1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0])
    }

    pub fn swap() -> [C64; 16] {
        real([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])
    }

    pub fn identity2() -> [C64; 16] {
        real([1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayeredCircuit {
    num_system_qubits: usize,
    num_ancillae: usize,
    /// One single-qubit state per ancilla.
    ancilla_init: Vec<StateVector>,
    layers: Vec<Vec<Gate>>,
    geometry: Geometry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSummary {
    pub depth: usize,
    pub max_fan_in: usize,
    pub geometry_ok: bool,
}

/// Checks disjointness within layers and wire ranges; reports depth, fan-in and
/// whether every 2-qubit gate is nearest-neighbour when the geometry is a line.
pub fn validate(c: &LayeredCircuit) -> Result<CircuitSummary> {
    let wires = c.num_wires();
    let mut max_fan_in = 0;
    let mut adjacent = true;
    for (l, layer) in c.layers.iter().enumerate() {
        let mut used = vec![false; wires];
        for g in layer {
            for &q in &g.qubits {
                ensure!(q < wires, Structural, "layer {l}: qubit {q} out of range for {wires} wires");
                ensure!(!used[q], Structural, "layer {l}: qubit {q} is used by two gates");
                used[q] = true;
            }
            max_fan_in = max_fan_in.max(g.qubits.len());
            if let [a, b] = g.qubits[..] {
                adjacent &= a.abs_diff(b) == 1;
            }
        }
    }
    let geometry_ok = c.geometry == Geometry::None || adjacent;
    Ok(CircuitSummary { depth: c.layers.len(), max_fan_in, geometry_ok })
}

impl LayeredCircuit {
    pub fn new(num_system_qubits: usize, num_ancillae: usize, geometry: Geometry, layers: Vec<Vec<Gate>>) -> Result<Self> {
        let zero = StateVector::zero(1)?;
        let c = LayeredCircuit { num_system_qubits, num_ancillae, ancilla_init: vec![zero; num_ancillae], layers, geometry };
        validate(&c)?;
        Ok(c)
    }

    pub fn empty(num_system_qubits: usize) -> Self {
        LayeredCircuit { num_system_qubits, num_ancillae: 0, ancilla_init: Vec::new(), layers: Vec::new(), geometry: Geometry::Line }
    }

    /// Replaces the ancilla initial states (one single-qubit state each).
    pub fn with_ancilla_init(mut self, init: Vec<StateVector>) -> Result<Self> {
        ensure!(init.len() == self.num_ancillae, Dimension, "{} ancilla states for {} ancillae", init.len(), self.num_ancillae);
        ensure!(init.iter().all(|s| s.num_qubits() == 1), Dimension, "ancilla states must be single-qubit");
        self.ancilla_init = init;
        Ok(self)
    }

    pub fn num_system_qubits(&self) -> usize {
        self.num_system_qubits
    }

    pub fn num_ancillae(&self) -> usize {
        self.num_ancillae
    }

    pub fn num_wires(&self) -> usize {
        self.num_system_qubits + self.num_ancillae
    }

    pub fn ancilla_wires(&self) -> Vec<usize> {
        (self.num_system_qubits..self.num_wires()).collect()
    }

    pub fn ancilla_init(&self) -> &[StateVector] {
        &self.ancilla_init
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Gates with their layer index, in application order.
    pub fn gates(&self) -> impl Iterator<Item = (usize, &Gate)> {
        self.layers.iter().enumerate().flat_map(|(l, layer)| layer.iter().map(move |g| (l, g)))
    }

    /// `copies` side-by-side instances on consecutive wire blocks (no ancillae).
    pub fn parallel_copies(&self, copies: usize) -> Result<LayeredCircuit> {
        ensure!(self.num_ancillae == 0, Domain, "parallel copies of circuits with ancillae are not supported");
        let n = self.num_system_qubits;
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                (0..copies)
                    .flat_map(|k| layer.iter().map(move |g| Gate { qubits: g.qubits.iter().map(|q| q + k * n).collect(), mat: g.mat.clone() }))
                    .collect()
            })
            .collect();
        LayeredCircuit::new(n * copies, 0, self.geometry, layers)
    }

    /// Splits the wires into independent contiguous blocks of `block` qubits if
    /// no gate crosses a block boundary.
    pub(crate) fn block_local(&self, block: usize) -> bool {
        block > 0 && self.gates().all(|(_, g)| g.qubits.iter().all(|q| q / block == g.qubits[0] / block))
    }

    /// The same gates restricted to wires `start..start+len` and relabelled.
    pub(crate) fn restrict(&self, start: usize, len: usize) -> LayeredCircuit {
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .filter(|g| g.qubits.iter().all(|&q| (start..start + len).contains(&q)))
                    .map(|g| Gate { qubits: g.qubits.iter().map(|q| q - start).collect(), mat: g.mat.clone() })
                    .collect()
            })
            .collect();
        LayeredCircuit { num_system_qubits: len, num_ancillae: 0, ancilla_init: Vec::new(), layers, geometry: self.geometry }
    }
}

fn check_wires(c: &LayeredCircuit, wires: &[usize]) -> Result<()> {
    let total = c.num_wires();
    ensure!(wires.iter().all(|&q| q < total), Domain, "wire out of range for {total} wires");
    Ok(())
}

/// Wires whose initial values can influence `outputs`.
pub fn backward_lightcone(c: &LayeredCircuit, outputs: &[usize]) -> Result<BTreeSet<usize>> {
    check_wires(c, outputs)?;
    let mut cone: BTreeSet<usize> = outputs.iter().copied().collect();
    for layer in c.layers.iter().rev() {
        for g in layer {
            if g.qubits.iter().any(|q| cone.contains(q)) {
                cone.extend(g.qubits.iter().copied());
            }
        }
    }
    Ok(cone)
}

/// Output wires reachable from `inputs`.
pub fn forward_lightcone(c: &LayeredCircuit, inputs: &[usize]) -> Result<BTreeSet<usize>> {
    check_wires(c, inputs)?;
    let mut cone: BTreeSet<usize> = inputs.iter().copied().collect();
    for layer in &c.layers {
        for g in layer {
            if g.qubits.iter().any(|q| cone.contains(q)) {
                cone.extend(g.qubits.iter().copied());
            }
        }
    }
    Ok(cone)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightconeReport {
    /// Backward cone of each output wire, indexed by wire.
    pub backward: Vec<BTreeSet<usize>>,
    /// Forward cone of the ancillae: the corrupted output set R.
    pub corrupted: BTreeSet<usize>,
    /// max |backward cone| over outputs.
    pub k: usize,
    /// |R|
    pub r: usize,
    pub depth: usize,
}

pub fn lightcone_report(c: &LayeredCircuit) -> Result<LightconeReport> {
    let backward = (0..c.num_wires()).map(|q| backward_lightcone(c, &[q])).collect::<Result<Vec<_>>>()?;
    let corrupted = forward_lightcone(c, &c.ancilla_wires())?;
    let k = backward.iter().map(BTreeSet::len).max().unwrap_or(0);
    Ok(LightconeReport { r: corrupted.len(), backward, corrupted, k, depth: c.depth() })
}

/// Runs the circuit on `system_input` ⊗ ancilla states.
pub fn apply(c: &LayeredCircuit, system_input: &StateVector) -> Result<StateVector> {
    ensure!(
        system_input.num_qubits() == c.num_system_qubits,
        Dimension,
        "input has {} qubits, circuit expects {}",
        system_input.num_qubits(),
        c.num_system_qubits
    );
    let mut psi = system_input.clone();
    for a in &c.ancilla_init {
        psi = tensor(&psi, a)?;
    }
    for (_, g) in c.gates() {
        g.apply_to(&mut psi);
    }
    Ok(psi)
}

/// Line brickwork with Haar-random 2-qubit gates: even layers pair (0,1)(2,3)…,
/// odd layers pair (1,2)(3,4)….
pub fn random_brickwork<R: Rng + ?Sized>(n: usize, depth: usize, geometry: Geometry, rng: &mut R) -> Result<LayeredCircuit> {
    ensure!(geometry == Geometry::Line, Domain, "brickwork circuits are defined on a line");
    let mut layers = Vec::with_capacity(depth);
    for l in 0..depth {
        let mut layer = Vec::new();
        let mut q = l % 2;
        while q + 1 < n {
            layer.push(Gate::from_unitary(vec![q, q + 1], &sample_haar_unitary(2, rng)?)?);
            q += 2;
        }
        layers.push(layer);
    }
    LayeredCircuit::new(n, 0, Geometry::Line, layers)
}

/// Random layered circuit without geometric constraint: each layer pairs up a
/// random subset of wires with Haar 2-qubit gates and puts Haar 1-qubit gates on
/// some of the rest.
pub fn random_layered_circuit<R: Rng + ?Sized>(n: usize, ancillae: usize, depth: usize, rng: &mut R) -> Result<LayeredCircuit> {
    let wires = n + ancillae;
    let mut layers = Vec::with_capacity(depth);
    for _ in 0..depth {
        let mut order: Vec<usize> = (0..wires).collect();
        order.shuffle(rng);
        let mut layer = Vec::new();
        let mut i = 0;
        while i < wires {
            if i + 1 < wires && rng.random_bool(0.6) {
                layer.push(Gate::from_unitary(vec![order[i], order[i + 1]], &sample_haar_unitary(2, rng)?)?);
                i += 2;
            } else {
                if rng.random_bool(0.5) {
                    layer.push(Gate::from_unitary(vec![order[i]], &sample_haar_unitary(1, rng)?)?);
                }
                i += 1;
            }
        }
        layers.push(layer);
    }
    LayeredCircuit::new(n, ancillae, Geometry::None, layers)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchmidtAudit {
    /// Rank at cut k (first k qubits | rest) for k = 1..n−1.
    pub ranks: Vec<usize>,
    pub max_rank: usize,
    /// 4^depth, saturating.
    pub bound: u64,
    pub pass: bool,
}

/// Schmidt rank of C|0ⁿ⟩ at every contiguous cut, against 4^depth.
pub fn schmidt_rank_audit(c: &LayeredCircuit) -> Result<SchmidtAudit> {
    let summary = validate(c)?;
    ensure!(c.geometry == Geometry::Line && summary.geometry_ok, Domain, "Schmidt audit needs a line-geometry circuit");
    ensure!(c.num_ancillae == 0, Domain, "Schmidt audit does not support ancillae");
    let n = c.num_system_qubits;
    let psi = apply(c, &StateVector::zero(n)?)?;
    let ranks = (1..n).map(|k| schmidt_rank_at(&psi, k)).collect::<Result<Vec<_>>>()?;
    let max_rank = ranks.iter().copied().max().unwrap_or(1);
    let bound = 4u64.checked_pow(c.depth() as u32).unwrap_or(u64::MAX);
    Ok(SchmidtAudit { pass: max_rank as u64 <= bound, ranks, max_rank, bound })
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    q: Vec<usize>,
    mat: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitJson {
    n: usize,
    #[serde(default)]
    ancillae: usize,
    #[serde(default)]
    geometry: Geometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ancilla_init: Option<Vec<StateVector>>,
    layers: Vec<Vec<GateJson>>,
}

impl TryFrom<CircuitJson> for LayeredCircuit {
    type Error = Error;

    fn try_from(j: CircuitJson) -> Result<Self> {
        let layers = j
            .layers
            .into_iter()
            .map(|layer| layer.into_iter().map(|g| Gate::new(g.q, g.mat.iter().map(|&[re, im]| c(re, im)).collect())).collect())
            .collect::<Result<Vec<Vec<Gate>>>>()?;
        let circuit = LayeredCircuit::new(j.n, j.ancillae, j.geometry, layers)?;
        match j.ancilla_init {
            Some(init) => circuit.with_ancilla_init(init),
            None => Ok(circuit),
        }
    }
}

impl Serialize for LayeredCircuit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let zero = StateVector::zero(1).expect("one qubit");
        let default_init = self.ancilla_init.iter().all(|a| *a == zero);
        CircuitJson {
            n: self.num_system_qubits,
            ancillae: self.num_ancillae,
            geometry: self.geometry,
            ancilla_init: (!default_init).then(|| self.ancilla_init.clone()),
            layers: self
                .layers
                .iter()
                .map(|layer| layer.iter().map(|g| GateJson { q: g.qubits.clone(), mat: g.mat.iter().map(|z| [z.re, z.im]).collect() }).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LayeredCircuit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        LayeredCircuit::try_from(CircuitJson::deserialize(d)?).map_err(D::Error::custom)
    }
}

impl std::str::FromStr for LayeredCircuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}
