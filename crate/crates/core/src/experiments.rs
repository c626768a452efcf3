//! Distinguishing games and structure checks run end to end.
//!
//! Every routine takes a master [`Seed`]; each arm draws from its own derived
//! seed, and trials are sharded as described in [`crate::rng`].

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{apply, forward_lightcone, validate, Geometry, LayeredCircuit};
use crate::ensembles::{PhaseMode, StateEnsembleSpec, UnitaryEnsembleSpec};
use crate::error::{ensure, Result};
use crate::gf2::{is_dependent, BitVector};
use crate::moments::{BoundReport, Z_PASS};
use crate::rng::{try_sharded_map, Seed, StreamRng};
use crate::statevec::{
    c, entanglement_entropy, hermitian_trace_norm, measure_all, partial_trace, purity, recursive_schmidt, tensor_power, StateVector, SubsystemMask, C64,
};
use crate::stats::{bootstrap_two_sample, sample_tv, BootstrapSummary, Estimate, BOOTSTRAP_RESAMPLES};

/// Largest readout for which output distributions are histogrammed.
pub const MAX_READOUT_BITS: usize = 12;
/// Number of random k-subsets inspected by the parallel-query game.
pub const PRU_SUBSETS: usize = 20;
/// Significance used for "consistent with zero" verdicts on plug-in TV.
pub const Z_NOISE: f64 = 3.0;

/// One row of the per-trial CSV: `trial_index, arm, statistic, value`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub arm: String,
    pub statistic: String,
    pub value: f64,
}

fn records(arm: &str, statistic: &str, values: &[f64]) -> Vec<TrialRecord> {
    values
        .iter()
        .enumerate()
        .map(|(i, &value)| TrialRecord { trial_index: i, arm: arm.to_string(), statistic: statistic.to_string(), value })
        .collect()
}

/// Outcome of a two-arm distinguishing experiment. The "ensemble" arm is the
/// ensemble under test and the "haar" arm is the reference it is compared with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguisherResult {
    /// Acceptance probability of the test arm, when the readout is a yes/no decision.
    pub accept_prob_ensemble: Option<Estimate>,
    pub accept_prob_haar: Option<Estimate>,
    /// |p_ensemble − p_haar| for decisions; plug-in TV for multi-bit readouts.
    pub advantage: f64,
    pub bootstrap: Option<BootstrapSummary>,
    /// True when the advantage lies within the plug-in noise floor.
    pub consistent_with_zero: bool,
    pub analytic_bound: Option<f64>,
    pub bound_vacuous: bool,
    pub trials: usize,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

/// Accept probability of "d+1 = `copies` computational-basis outcomes of fresh
/// copies are linearly dependent over F₂".
pub fn lindep_accept_probability(spec: &StateEnsembleSpec, copies: usize, trials: usize, seed: Seed) -> Result<(Estimate, Vec<f64>)> {
    spec.validate()?;
    ensure!((1..=64).contains(&copies), Domain, "copies must be in 1..=64");
    ensure!(spec.num_qubits() <= 64, Domain, "outcomes of more than 64 qubits do not fit a bit vector");
    let values = try_sharded_map(seed, trials, |rng| -> Result<f64> {
        let psi = spec.sample(rng)?;
        let sampler = crate::statevec::OutcomeSampler::new(&psi);
        let outcomes: Vec<BitVector> = (0..copies).map(|_| sampler.sample(rng)).collect();
        Ok(is_dependent(&outcomes)? as u8 as f64)
    })?;
    Ok((Estimate::from_samples(&values), values))
}

/// 2^{−(n−d−1)} + d(d+1)/2^n
pub fn lindep_haar_bound(n: usize, d: usize) -> f64 {
    2f64.powi(-((n - d - 1) as i32)) + (d * (d + 1)) as f64 / 2f64.powi(n as i32)
}

/// Measures d+1 fresh copies and accepts iff the outcomes are F₂-dependent;
/// compares `spec` with Haar(n).
pub fn lindep_distinguisher(n: usize, d: usize, spec: &StateEnsembleSpec, trials: usize, seed: Seed) -> Result<DistinguisherResult> {
    ensure!(d < n, Domain, "d = {d} must be below n = {n}");
    ensure!(spec.num_qubits() == n, Dimension, "ensemble acts on {} qubits, expected {n}", spec.num_qubits());
    let (pe, ve) = lindep_accept_probability(spec, d + 1, trials, seed.derive("ensemble"))?;
    let (ph, vh) = lindep_accept_probability(&StateEnsembleSpec::Haar { n }, d + 1, trials, seed.derive("haar"))?;
    let bound = lindep_haar_bound(n, d);
    let advantage = (pe.mean - ph.mean).abs();
    let mut recs = records("ensemble", "accept", &ve);
    recs.extend(records("haar", "accept", &vh));
    Ok(DistinguisherResult {
        accept_prob_ensemble: Some(pe),
        accept_prob_haar: Some(ph),
        advantage,
        bootstrap: None,
        consistent_with_zero: advantage <= Z_NOISE * crate::stats::combined_stderr(&pe, &ph),
        analytic_bound: Some(bound),
        bound_vacuous: bound >= 1.0,
        trials,
        records: recs,
    })
}

/// What is read off the measured output wires.
#[derive(Clone)]
pub enum Readout {
    /// The joint outcome on these wires (at most 12).
    Bits(Vec<usize>),
    /// A yes/no decision computed from the outcome on `wires`.
    Predicate {
        name: String,
        wires: Vec<usize>,
        accept: Arc<dyn Fn(&BitVector) -> bool + Send + Sync>,
    },
}

impl fmt::Debug for Readout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Readout::Bits(w) => f.debug_tuple("Bits").field(w).finish(),
            Readout::Predicate { name, wires, .. } => f.debug_struct("Predicate").field("name", name).field("wires", wires).finish(),
        }
    }
}

impl Readout {
    /// Splits t·n output bits into t blocks of n and accepts iff the blocks are
    /// linearly dependent over F₂.
    pub fn linear_dependence(n: usize, t: usize) -> Readout {
        Readout::Predicate {
            name: format!("linear-dependence({t}x{n})"),
            wires: (0..n * t).collect(),
            accept: Arc::new(move |bits: &BitVector| {
                let blocks: Vec<BitVector> = (0..t).map(|j| bits.select(&(j * n..(j + 1) * n).collect::<Vec<_>>())).collect();
                is_dependent(&blocks).unwrap_or(false)
            }),
        }
    }

    fn wires(&self) -> &[usize] {
        match self {
            Readout::Bits(w) => w,
            Readout::Predicate { wires, .. } => wires,
        }
    }

    fn code(&self, outcome: &BitVector) -> usize {
        let selected = outcome.select(self.wires());
        match self {
            Readout::Bits(_) => selected.value() as usize,
            Readout::Predicate { accept, .. } => accept(&selected) as usize,
        }
    }

    fn num_outcomes(&self) -> usize {
        match self {
            Readout::Bits(w) => 1 << w.len(),
            Readout::Predicate { .. } => 2,
        }
    }
}

/// How to realize a circuit acting on t copies of an n-qubit input.
struct Simulation<'a> {
    circuit: &'a LayeredCircuit,
    n: usize,
    t: usize,
    /// Per-copy circuits when no gate couples different copies.
    blocks: Option<Vec<LayeredCircuit>>,
}

impl<'a> Simulation<'a> {
    fn new(circuit: &'a LayeredCircuit, n: usize, t: usize) -> Result<Self> {
        ensure!(circuit.num_system_qubits() == n * t, Dimension, "circuit has {} system qubits, expected t·n = {}", circuit.num_system_qubits(), n * t);
        ensure!(circuit.num_wires() <= 64, Resource, "outcomes of more than 64 wires do not fit a bit vector");
        let blocks = (circuit.num_ancillae() == 0 && circuit.block_local(n)).then(|| (0..t).map(|j| circuit.restrict(j * n, n)).collect());
        if blocks.is_none() {
            ensure!(circuit.num_wires() <= 26, Resource, "{} coupled wires exceed the dense simulation cap", circuit.num_wires());
        }
        Ok(Simulation { circuit, n, t, blocks })
    }

    /// One measurement of every wire after running the circuit on ψ^⊗t.
    fn measure_copies(&self, psi: &StateVector, rng: &mut StreamRng) -> Result<BitVector> {
        match &self.blocks {
            Some(blocks) => {
                let mut out = BitVector::zeros(0);
                for b in blocks {
                    out = out.concat(&measure_all(&apply(b, psi)?, rng)?)?;
                }
                Ok(out)
            }
            None => measure_all(&apply(self.circuit, &tensor_power(psi, self.t)?)?, rng),
        }
    }

    /// One measurement of every wire with a uniformly random basis input, i.e.
    /// with maximally mixed system qubits.
    fn measure_mixed(&self, rng: &mut StreamRng) -> Result<BitVector> {
        match &self.blocks {
            Some(blocks) => {
                let mut out = BitVector::zeros(0);
                for b in blocks {
                    let x = StateVector::basis(self.n, rng.random_range(0..1usize << self.n))?;
                    out = out.concat(&measure_all(&apply(b, &x)?, rng)?)?;
                }
                Ok(out)
            }
            None => {
                let w = self.n * self.t;
                let x = StateVector::basis(w, rng.random_range(0..1usize << w))?;
                measure_all(&apply(self.circuit, &x)?, rng)
            }
        }
    }
}

/// Runs `c` on t copies of states from each arm, measures once per trial, and
/// compares the readout distributions.
pub fn circuit_advantage(
    c: &LayeredCircuit,
    readout: &Readout,
    spec_a: &StateEnsembleSpec,
    spec_b: &StateEnsembleSpec,
    t: usize,
    trials: usize,
    seed: Seed,
) -> Result<DistinguisherResult> {
    spec_a.validate()?;
    spec_b.validate()?;
    let n = spec_a.num_qubits();
    ensure!(spec_b.num_qubits() == n, Dimension, "arms act on {} and {} qubits", n, spec_b.num_qubits());
    if let Readout::Bits(w) = readout {
        ensure!(w.len() <= MAX_READOUT_BITS, Domain, "{} readout bits exceed the TV estimation limit of {MAX_READOUT_BITS}", w.len());
    }
    ensure!(readout.wires().iter().all(|&q| q < c.num_wires()), Domain, "readout wire out of range");
    let sim = Simulation::new(c, n, t)?;
    let run = |spec: &StateEnsembleSpec, tag: &str| {
        try_sharded_map(seed.derive(tag), trials, |rng| -> Result<usize> { Ok(readout.code(&sim.measure_copies(&spec.sample(rng)?, rng)?)) })
    };
    let a = run(spec_a, "ensemble")?;
    let b = run(spec_b, "haar")?;
    let outcomes = readout.num_outcomes();
    let advantage = sample_tv(&a, &b, outcomes);
    let boot = bootstrap_two_sample(&a, &b, BOOTSTRAP_RESAMPLES, seed.derive("bootstrap"), |x, y| sample_tv(x, y, outcomes));
    let decision = |codes: &[usize]| (outcomes == 2).then(|| Estimate::from_samples(&codes.iter().map(|&x| x as f64).collect::<Vec<_>>()));
    let to_f64 = |codes: &[usize]| codes.iter().map(|&x| x as f64).collect::<Vec<_>>();
    let mut recs = records("ensemble", "outcome", &to_f64(&a));
    recs.extend(records("haar", "outcome", &to_f64(&b)));
    Ok(DistinguisherResult {
        accept_prob_ensemble: decision(&a),
        accept_prob_haar: decision(&b),
        advantage,
        consistent_with_zero: boot.within_noise(advantage, Z_NOISE),
        bootstrap: Some(boot),
        analytic_bound: None,
        bound_vacuous: false,
        trials,
        records: recs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalReport {
    pub k: usize,
    pub subsets_inspected: usize,
    pub max_tv: f64,
    /// The subset attaining `max_tv`.
    pub worst_subset: Vec<usize>,
    pub bootstrap: BootstrapSummary,
    /// "uniform" when no output is corrupted, else "uniform⊗corrupted".
    pub reference: String,
    /// Forward lightcone of the ancillae.
    pub corrupted_set: Vec<usize>,
    pub consistent_with_reference: bool,
    pub trials: usize,
}

/// Max TV, over `subsets` random k-subsets of all output wires, between the
/// circuit's marginals under t copies of `spec` and the reference
/// uniform ⊗ ℛ, where ℛ is the corrupted-set distribution under maximally
/// mixed inputs.
pub fn kwise_marginal_check(c: &LayeredCircuit, spec: &StateEnsembleSpec, t: usize, k: usize, subsets: usize, trials: usize, seed: Seed) -> Result<MarginalReport> {
    let wires = c.num_wires();
    ensure!(k >= 1 && k <= wires.min(MAX_READOUT_BITS), Domain, "k = {k} must be in 1..={}", wires.min(MAX_READOUT_BITS));
    ensure!(subsets >= 1, Domain, "at least one subset must be inspected");
    let mut rng = seed.derive("subsets").rng();
    let chosen: Vec<Vec<usize>> = (0..subsets)
        .map(|_| {
            let mut s = sample_indices(&mut rng, wires, k).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    kwise_marginal_check_on(c, spec, t, &chosen, trials, seed)
}

/// [`kwise_marginal_check`] on explicitly chosen wire subsets.
pub fn kwise_marginal_check_on(c: &LayeredCircuit, spec: &StateEnsembleSpec, t: usize, subsets: &[Vec<usize>], trials: usize, seed: Seed) -> Result<MarginalReport> {
    spec.validate()?;
    ensure!(!subsets.is_empty(), Domain, "no subsets to inspect");
    let k = subsets[0].len();
    ensure!((1..=MAX_READOUT_BITS).contains(&k), Domain, "subset size {k} must be in 1..={MAX_READOUT_BITS}");
    ensure!(subsets.iter().all(|s| s.len() == k && s.iter().all(|&q| q < c.num_wires())), Domain, "subsets must share one size and lie within the wires");
    let sim = Simulation::new(c, spec.num_qubits(), t)?;
    let corrupted = forward_lightcone(c, &c.ancilla_wires())?;
    let wires = c.num_wires();

    let observed = try_sharded_map(seed.derive("ensemble"), trials, |rng| sim.measure_copies(&spec.sample(rng)?, rng))?;
    let reference = try_sharded_map(seed.derive("reference"), trials, |rng| -> Result<BitVector> {
        let mixed = sim.measure_mixed(rng)?;
        let mut bits = 0u64;
        for q in 0..wires {
            let bit = if corrupted.contains(&q) { mixed.get(q) } else { rng.random::<bool>() };
            bits |= (bit as u64) << (wires - 1 - q);
        }
        BitVector::new(wires, bits)
    })?;

    let max_tv = |a: &[BitVector], b: &[BitVector]| -> (f64, usize) {
        subsets
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let ca: Vec<usize> = a.iter().map(|x| x.select(s).value() as usize).collect();
                let cb: Vec<usize> = b.iter().map(|x| x.select(s).value() as usize).collect();
                (sample_tv(&ca, &cb, 1 << k), i)
            })
            .fold((0.0, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
    };
    let (stat, worst) = max_tv(&observed, &reference);
    let boot = bootstrap_two_sample(&observed, &reference, BOOTSTRAP_RESAMPLES, seed.derive("bootstrap"), |a, b| max_tv(a, b).0);
    Ok(MarginalReport {
        k,
        subsets_inspected: subsets.len(),
        max_tv: stat,
        worst_subset: subsets[worst].clone(),
        consistent_with_reference: boot.within_noise(stat, Z_NOISE),
        bootstrap: boot,
        reference: if corrupted.is_empty() { "uniform".into() } else { "uniform⊗corrupted".into() },
        corrupted_set: corrupted.into_iter().collect(),
        trials,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetSummary {
    pub subset: Vec<usize>,
    /// Raw ‖ρ_A − 2^{−k}I‖₁
    pub trace_norm: Estimate,
    /// ‖ρ_A − 2^{−k}I‖₂²
    pub frobenius_sq: Estimate,
    pub purity: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruGameReport {
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub depth: usize,
    /// Recursive Schmidt rank r of pre|0^{tn}⟩.
    pub rank: usize,
    /// (r + 1)·2^{k − n/2}
    pub expectation_bound: f64,
    pub subsets: Vec<SubsetSummary>,
    /// Index into `subsets` of the largest mean trace norm.
    pub worst: usize,
    /// Per trial, the largest trace norm over the inspected subsets.
    pub max_trace_norm: Vec<f64>,
    /// target/bound = expectation bound, measured = mean trace norm on the worst subset.
    pub report: BoundReport,
    pub trials: usize,
}

impl PruGameReport {
    pub fn worst_subset(&self) -> &SubsetSummary {
        &self.subsets[self.worst]
    }

    /// Fraction of trials in which every inspected subset is within δ.
    pub fn fraction_within(&self, delta: f64) -> f64 {
        self.max_trace_norm.iter().filter(|&&x| x <= delta).count() as f64 / self.max_trace_norm.len() as f64
    }
}

/// U^{⊗t} applied block by block to a t·n-qubit state.
fn apply_parallel(u: &DMatrix<C64>, psi: &StateVector, n: usize, t: usize) -> Result<StateVector> {
    let mut out = psi.clone();
    for j in 0..t {
        out = out.apply_to_qubits(&SubsystemMask::range(j * n, (j + 1) * n), u)?;
    }
    Ok(out)
}

/// The parallel-query game: prepare pre|0^{tn}⟩ with a line circuit, apply one
/// sampled U to each n-qubit block, and inspect k-qubit reduced states on
/// `PRU_SUBSETS` random subsets (shared by every arm run with the same seed).
pub fn pru_parallel_game(n: usize, t: usize, pre: &LayeredCircuit, spec: &UnitaryEnsembleSpec, k: usize, trials: usize, seed: Seed) -> Result<PruGameReport> {
    spec.validate()?;
    ensure!(spec.num_qubits() == n, Dimension, "unitary ensemble acts on {} qubits, expected {n}", spec.num_qubits());
    ensure!(pre.num_ancillae() == 0 && pre.num_system_qubits() == t * n, Dimension, "pre-circuit must act on t·n = {} qubits without ancillae", t * n);
    ensure!(pre.geometry() == Geometry::Line && validate(pre)?.geometry_ok, Domain, "pre-circuit must be 1-D geometrically local");
    ensure!(k >= 1 && k <= t * n, Domain, "k = {k} must be in 1..={}", t * n);

    let psi = apply(pre, &StateVector::zero(t * n)?)?;
    let rank = if t >= 2 { recursive_schmidt(&psi, n, t)?.rank } else { 1 };
    let expectation_bound = (rank + 1) as f64 * 2f64.powf(k as f64 - n as f64 / 2.0);

    let total = crate::moments::binomial((t * n) as f64, k);
    let mut rng = seed.derive("subsets").rng();
    let masks: Vec<SubsystemMask> = if total <= PRU_SUBSETS as f64 {
        crate::k_subsets(t * n, k).into_iter().map(|s| SubsystemMask::new(s, t * n)).collect::<Result<_>>()?
    } else {
        let mut seen = BTreeSet::new();
        while seen.len() < PRU_SUBSETS {
            let mut s = sample_indices(&mut rng, t * n, k).into_vec();
            s.sort_unstable();
            seen.insert(s);
        }
        seen.into_iter().map(|s| SubsystemMask::new(s, t * n)).collect::<Result<_>>()?
    };

    let per_trial = try_sharded_map(seed.derive("unitaries"), trials, |rng| -> Result<Vec<[f64; 3]>> {
        let u = spec.sample(rng)?;
        let out = apply_parallel(u.matrix(), &psi, n, t)?;
        masks
            .iter()
            .map(|m| {
                let rho = partial_trace(&out, m)?;
                let dim = 1usize << k;
                let diff = rho.matrix() - DMatrix::<C64>::identity(dim, dim) / c(dim as f64, 0.0);
                let p = purity(&rho);
                Ok([hermitian_trace_norm(&diff), p - 1.0 / dim as f64, p])
            })
            .collect()
    })?;

    let column = |i: usize, stat: usize| per_trial.iter().map(|row| row[i][stat]).collect::<Vec<f64>>();
    let subsets: Vec<SubsetSummary> = masks
        .iter()
        .enumerate()
        .map(|(i, m)| SubsetSummary {
            subset: m.qubits().to_vec(),
            trace_norm: Estimate::from_samples(&column(i, 0)),
            frobenius_sq: Estimate::from_samples(&column(i, 1)),
            purity: Estimate::from_samples(&column(i, 2)),
        })
        .collect();
    let worst = (0..subsets.len()).fold(0, |w, i| if subsets[i].trace_norm.mean > subsets[w].trace_norm.mean { i } else { w });
    let max_trace_norm = per_trial.iter().map(|row| row.iter().map(|s| s[0]).fold(0.0, f64::max)).collect();
    let w = &subsets[worst].trace_norm;
    let report = BoundReport { target: expectation_bound, measured: w.mean, stderr: w.stderr, bound: expectation_bound, pass: w.mean - Z_PASS * w.stderr <= expectation_bound };
    Ok(PruGameReport { n, t, k, depth: pre.depth(), rank, expectation_bound, subsets, worst, max_trace_norm, report, trials })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub n: usize,
    pub d: usize,
    /// Cut positions k: first k qubits versus the rest.
    pub cuts: Vec<usize>,
    pub subspace_entropy: Vec<Estimate>,
    pub haar_entropy: Vec<Estimate>,
    /// Largest subspace-state entropy seen at each cut.
    pub subspace_max: Vec<f64>,
    /// Every subspace sample obeyed entropy ≤ min(d, k, n − k) + 10⁻⁹ at every cut.
    pub within_ceiling: bool,
    pub samples: usize,
}

fn entropy_profile(psi: &StateVector, cuts: &[usize]) -> Result<Vec<f64>> {
    cuts.iter().map(|&k| entanglement_entropy(psi, k)).collect()
}

/// Entanglement entropy at every contiguous cut for 4-wise phased subspace
/// states against Haar states.
pub fn pseudoentanglement_report(n: usize, d: usize, samples: usize, seed: Seed) -> Result<EntanglementReport> {
    ensure!(n >= 2, Domain, "need at least two qubits for a cut");
    ensure!(d <= n, Domain, "d = {d} exceeds n = {n}");
    let cuts: Vec<usize> = (1..n).collect();
    let subspace = StateEnsembleSpec::PhasedSubspace { n, d, phase_mode: PhaseMode::Kwise4 };
    let haar = StateEnsembleSpec::Haar { n };
    let s = try_sharded_map(seed.derive("subspace"), samples, |rng| entropy_profile(&subspace.sample(rng)?, &cuts))?;
    let h = try_sharded_map(seed.derive("haar"), samples, |rng| entropy_profile(&haar.sample(rng)?, &cuts))?;
    let per_cut = |rows: &[Vec<f64>], i: usize| rows.iter().map(|r| r[i]).collect::<Vec<_>>();
    let within_ceiling = s.iter().all(|row| cuts.iter().zip(row).all(|(&k, &e)| e <= d.min(k).min(n - k) as f64 + 1e-9));
    Ok(EntanglementReport {
        n,
        d,
        subspace_entropy: (0..cuts.len()).map(|i| Estimate::from_samples(&per_cut(&s, i))).collect(),
        haar_entropy: (0..cuts.len()).map(|i| Estimate::from_samples(&per_cut(&h, i))).collect(),
        subspace_max: (0..cuts.len()).map(|i| per_cut(&s, i).into_iter().fold(0.0, f64::max)).collect(),
        cuts,
        within_ceiling,
        samples,
    })
}
