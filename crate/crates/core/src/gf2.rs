//! Linear algebra over F₂, the fields GF(2^m), and polynomial k-wise
//! independent boolean function families.
//!
//! Bit strings are stored in a `u64` whose integer value equals the
//! computational-basis index: position 0 of the string (qubit 0) is the most
//! significant bit.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure, Error, Result};

/// Longest supported bit string.
pub const MAX_BITS: usize = 64;
/// Largest subspace dimension that may be enumerated.
pub const ENUMERATION_CAP: usize = 20;
/// Largest supported extension degree m of GF(2^m).
pub const MAX_FIELD_DEGREE: u32 = 32;
/// Largest seed space walked by [`exhaustive_joint_counts`].
pub const MAX_EXHAUSTIVE_SEEDS: u64 = 1 << 24;

fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    bits: u64,
}

impl BitVector {
    pub fn new(len: usize, bits: u64) -> Result<Self> {
        ensure!(len <= MAX_BITS, Domain, "bit vector length {len} exceeds {MAX_BITS}");
        ensure!(bits & !low_mask(len) == 0, Domain, "value {bits:#x} does not fit in {len} bits");
        Ok(BitVector { len, bits })
    }

    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS);
        BitVector { len, bits: 0 }
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        ensure!(bits.len() <= MAX_BITS, Domain, "bit vector length {} exceeds {MAX_BITS}", bits.len());
        let v = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Ok(BitVector { len: bits.len(), bits: v })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Integer value (the computational-basis index).
    pub fn value(&self) -> u64 {
        self.bits
    }

    /// Bit at position `i`, position 0 being the most significant.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.bits >> (self.len - 1 - i)) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        ensure!(self.len == other.len, Dimension, "xor of lengths {} and {}", self.len, other.len);
        Ok(BitVector { len: self.len, bits: self.bits ^ other.bits })
    }

    /// Sub-string at the given positions, in the order given.
    pub fn select(&self, positions: &[usize]) -> BitVector {
        let bits = positions.iter().fold(0u64, |acc, &p| (acc << 1) | self.get(p) as u64);
        BitVector { len: positions.len(), bits }
    }

    /// Concatenation, `self` first.
    pub fn concat(&self, other: &BitVector) -> Result<BitVector> {
        ensure!(self.len + other.len <= MAX_BITS, Domain, "concatenation exceeds {MAX_BITS} bits");
        let shifted = if other.len == 64 { 0 } else { self.bits << other.len };
        Ok(BitVector { len: self.len + other.len, bits: shifted | other.bits })
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bools = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("invalid bit character {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        BitVector::from_bools(&bools)
    }
}

fn check_lengths(rows: &[BitVector]) -> Result<usize> {
    let n = rows.first().map_or(0, |r| r.len);
    for r in rows {
        ensure!(r.len == n, Dimension, "row lengths {} and {} differ", n, r.len);
    }
    Ok(n)
}

/// Reduced row echelon form of the rows (as integers). Zero rows are dropped;
/// rows come out ordered by decreasing pivot bit.
fn rref(mut rows: Vec<u64>, n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for bit in (0..n).rev() {
        let pivot = 1u64 << bit;
        let Some(pos) = rows.iter().position(|r| r & pivot != 0) else {
            continue;
        };
        let row = rows.swap_remove(pos);
        for r in rows.iter_mut().chain(out.iter_mut()) {
            if *r & pivot != 0 {
                *r ^= row;
            }
        }
        out.push(row);
    }
    out
}

fn rank_u64(rows: &[u64], n: usize) -> usize {
    rref(rows.to_vec(), n).len()
}

/// F₂-rank of a list of equal-length bit vectors.
pub fn rank(rows: &[BitVector]) -> Result<usize> {
    let n = check_lengths(rows)?;
    Ok(rank_u64(&rows.iter().map(|r| r.bits).collect::<Vec<_>>(), n))
}

/// True iff the vectors are linearly dependent over F₂.
pub fn is_dependent(vectors: &[BitVector]) -> Result<bool> {
    ensure!(!vectors.is_empty(), Domain, "dependence test needs at least one vector");
    Ok(rank(vectors)? < vectors.len())
}

/// A linear subspace of F₂ⁿ held by its canonical (reduced row echelon) basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    n: usize,
    basis: Vec<u64>,
}

impl Subspace {
    /// Span of the given vectors.
    pub fn span(n: usize, vectors: &[BitVector]) -> Result<Self> {
        ensure!(n <= MAX_BITS, Domain, "ambient dimension {n} exceeds {MAX_BITS}");
        for v in vectors {
            ensure!(v.len == n, Dimension, "vector of length {} in F2^{n}", v.len);
        }
        Ok(Subspace { n, basis: rref(vectors.iter().map(|v| v.bits).collect(), n) })
    }

    pub fn zero(n: usize) -> Self {
        Subspace { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Subspace { n, basis: (0..n).rev().map(|b| 1u64 << b).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> Vec<BitVector> {
        self.basis.iter().map(|&b| BitVector { len: self.n, bits: b }).collect()
    }

    pub fn contains(&self, x: &BitVector) -> bool {
        x.len == self.n && self.coordinates(x).is_some()
    }

    /// Coordinates of `x` in the canonical basis, as a `dim`-bit integer whose
    /// most significant bit belongs to basis row 0.
    pub fn coordinates(&self, x: &BitVector) -> Option<u64> {
        let mut rem = x.bits;
        let mut coords = 0u64;
        let d = self.basis.len();
        for (j, &row) in self.basis.iter().enumerate() {
            let pivot = 1u64 << (63 - row.leading_zeros());
            if rem & pivot != 0 {
                rem ^= row;
                coords |= 1 << (d - 1 - j);
            }
        }
        (rem == 0).then_some(coords)
    }

    /// The element with the given basis coordinates.
    pub fn element(&self, coords: u64) -> BitVector {
        let d = self.basis.len();
        let bits = self
            .basis
            .iter()
            .enumerate()
            .filter(|(j, _)| (coords >> (d - 1 - j)) & 1 == 1)
            .fold(0u64, |acc, (_, &row)| acc ^ row);
        BitVector { len: self.n, bits }
    }

    /// All 2^dim elements, listed in order of their basis coordinates.
    pub fn enumerate(&self) -> Result<Vec<BitVector>> {
        let d = self.dim();
        ensure!(d <= ENUMERATION_CAP, Resource, "subspace of dimension {d} exceeds enumeration cap {ENUMERATION_CAP}");
        Ok((0..1u64 << d).map(|c| self.element(c)).collect())
    }

    /// Canonical basis rows as hex strings.
    pub fn to_hex_rows(&self) -> Vec<String> {
        self.basis.iter().map(|b| format!("{b:x}")).collect()
    }

    pub fn from_hex_rows(n: usize, rows: &[String]) -> Result<Self> {
        let vecs = rows
            .iter()
            .map(|r| {
                let v = u64::from_str_radix(r.trim_start_matches("0x"), 16)
                    .map_err(|e| Error::Parse(format!("hex row {r:?}: {e}")))?;
                BitVector::new(n, v)
            })
            .collect::<Result<Vec<_>>>()?;
        let s = Subspace::span(n, &vecs)?;
        ensure!(s.dim() == rows.len(), Domain, "hex rows are linearly dependent");
        Ok(s)
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    n: usize,
    basis: Vec<String>,
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceRepr { n: self.n, basis: self.to_hex_rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SubspaceRepr::deserialize(d)?;
        Subspace::from_hex_rows(r.n, &r.basis).map_err(serde::de::Error::custom)
    }
}

/// Uniformly random `d`-dimensional subspace of F₂ⁿ.
///
/// Draws a random d×n bit matrix until it has full rank, which is exactly
/// uniform over the Grassmannian.
pub fn sample_subspace<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Subspace> {
    ensure!(d <= n, Domain, "subspace dimension {d} exceeds ambient dimension {n}");
    ensure!(n <= MAX_BITS, Domain, "ambient dimension {n} exceeds {MAX_BITS}");
    let mask = low_mask(n);
    loop {
        let rows: Vec<u64> = (0..d).map(|_| rng.random::<u64>() & mask).collect();
        let basis = rref(rows, n);
        if basis.len() == d {
            return Ok(Subspace { n, basis });
        }
    }
}

// ---------------------------------------------------------------------------
// GF(2^m)

fn clmul(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let mut b = b;
    let a = a as u128;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

fn degree(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u128, p: u128) -> u128 {
    let dp = degree(p);
    while a != 0 && degree(a) >= dp {
        a ^= p << (degree(a) - dp);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_mod(a, b);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or irreducibility test over GF(2).
fn is_irreducible(p: u64) -> bool {
    let p = p as u128;
    let deg = degree(p);
    if deg < 1 {
        return false;
    }
    let x = 0b10u128;
    let mut h = poly_mod(x, p);
    for _ in 0..deg / 2 {
        h = poly_mod(clmul(h as u64, h as u64), p);
        if poly_gcd(p, h ^ poly_mod(x, p)) != 1 {
            return false;
        }
    }
    true
}

/// The fixed modulus for GF(2^m): the irreducible polynomial of degree `m`
/// with the smallest integer encoding.
pub fn modulus(m: u32) -> u64 {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=MAX_FIELD_DEGREE)
            .map(|m| {
                if m == 0 {
                    return 1;
                }
                (1u64 << m..1u64 << (m + 1)).find(|&p| is_irreducible(p)).expect("irreducible polynomial exists")
            })
            .collect()
    });
    table[m as usize]
}

/// Element of GF(2^m) in polynomial basis; bit i is the coefficient of x^i.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    m: u32,
    coeffs: u64,
}

impl FieldElement {
    pub fn new(m: u32, coeffs: u64) -> Result<Self> {
        ensure!((1..=MAX_FIELD_DEGREE).contains(&m), Domain, "field degree {m} outside 1..={MAX_FIELD_DEGREE}");
        ensure!(coeffs >> m == 0, Domain, "coefficients {coeffs:#x} exceed degree {m}");
        Ok(FieldElement { m, coeffs })
    }

    pub fn zero(m: u32) -> Self {
        FieldElement::new(m, 0).unwrap()
    }

    pub fn one(m: u32) -> Self {
        FieldElement::new(m, 1).unwrap()
    }

    pub fn random<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Self {
        FieldElement { m, coeffs: rng.random::<u64>() & low_mask(m as usize) }
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> u64 {
        self.coeffs
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        ensure!(self.m == other.m, Domain, "GF(2^{}) + GF(2^{})", self.m, other.m);
        Ok(FieldElement { m: self.m, coeffs: self.coeffs ^ other.coeffs })
    }

    fn mul_unchecked(&self, other: &FieldElement) -> FieldElement {
        let prod = poly_mod(clmul(self.coeffs, other.coeffs), modulus(self.m) as u128);
        FieldElement { m: self.m, coeffs: prod as u64 }
    }

    /// Least-significant coefficient; a balanced map onto {0, 1}.
    pub fn projection(&self) -> bool {
        self.coeffs & 1 == 1
    }
}

/// Product in GF(2^m) under the fixed modulus.
pub fn field_mul(a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
    ensure!(a.m == b.m, Domain, "GF(2^{}) * GF(2^{})", a.m, b.m);
    Ok(a.mul_unchecked(b))
}

/// The polynomial family x ↦ lsb(Σ cᵢ xⁱ) over GF(2^m) with deg < k.
///
/// Coefficients are stored highest degree first, in Horner order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KWiseFamily {
    m: u32,
    coeffs: Vec<FieldElement>,
}

impl KWiseFamily {
    pub fn new(m: u32, coeffs: Vec<FieldElement>) -> Result<Self> {
        ensure!(coeffs.len() >= 2, Domain, "independence order must be at least 2");
        for c in &coeffs {
            ensure!(c.m == m, Domain, "seed coefficient from GF(2^{}) in GF(2^{m}) family", c.m);
        }
        Ok(KWiseFamily { m, coeffs })
    }

    /// Uniformly random member of the family.
    pub fn sample<R: Rng + ?Sized>(m: u32, k: usize, rng: &mut R) -> Result<Self> {
        ensure!((1..=MAX_FIELD_DEGREE).contains(&m), Domain, "field degree {m} outside 1..={MAX_FIELD_DEGREE}");
        KWiseFamily::new(m, (0..k).map(|_| FieldElement::random(m, rng)).collect())
    }

    pub fn input_bits(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Evaluates on the m-bit integer `x`, which must fit in m bits.
    pub fn eval_value(&self, x: u64) -> bool {
        debug_assert!(x >> self.m == 0);
        let x = FieldElement { m: self.m, coeffs: x };
        let mut acc = FieldElement::zero(self.m);
        for c in &self.coeffs {
            acc = acc.mul_unchecked(&x);
            acc.coeffs ^= c.coeffs;
        }
        acc.projection()
    }
}

pub fn kwise_eval(fam: &KWiseFamily, x: &BitVector) -> Result<bool> {
    ensure!(x.len() == fam.m as usize, Domain, "input of {} bits for a {}-bit family", x.len(), fam.m);
    Ok(fam.eval_value(x.value()))
}

/// Counts of each joint output pattern on `inputs` over every seed of the
/// order-k family on GF(2^m). Pattern bit order follows `inputs`, first input
/// most significant.
pub fn exhaustive_joint_counts(m: u32, k: usize, inputs: &[u64]) -> Result<Vec<u64>> {
    ensure!((1..=MAX_FIELD_DEGREE).contains(&m) && k >= 2, Domain, "need 1 ≤ m ≤ {MAX_FIELD_DEGREE} and k ≥ 2");
    ensure!(inputs.len() <= 16, Domain, "at most 16 inputs per pattern");
    ensure!(inputs.iter().all(|&x| x >> m == 0), Domain, "input does not fit in {m} bits");
    let q = 1u64 << m;
    let seeds = (m as u64 * k as u64 <= 24).then(|| q.pow(k as u32)).filter(|&s| s <= MAX_EXHAUSTIVE_SEEDS);
    let Some(seeds) = seeds else {
        return Err(Error::Resource(format!("seed space of (2^{m})^{k} exceeds {MAX_EXHAUSTIVE_SEEDS}")));
    };
    let mut counts = vec![0u64; 1 << inputs.len()];
    for seed in 0..seeds {
        let coeffs = (0..k as u32).map(|i| FieldElement { m, coeffs: (seed >> (m * i)) & (q - 1) }).collect();
        let fam = KWiseFamily { m, coeffs };
        let pattern = inputs.iter().fold(0usize, |acc, &x| (acc << 1) | fam.eval_value(x) as usize);
        counts[pattern] += 1;
    }
    Ok(counts)
}

/// Result of checking exact k-wise independence by seed enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KWiseVerification {
    pub m: u32,
    pub k: usize,
    /// Input sets that were checked.
    pub inputs: Vec<Vec<u64>>,
    /// Count every pattern must reach: (2^m)^k / 2^k.
    pub expected_count: u64,
    pub min_count: u64,
    pub max_count: u64,
    pub uniform: bool,
}

/// Enumerates every seed and checks that the outputs on k distinct inputs are
/// exactly uniform, for all k-subsets of inputs when there are at most
/// `subsets` of them and otherwise for `subsets` random distinct ones.
pub fn verify_kwise<R: Rng + ?Sized>(m: u32, k: usize, subsets: usize, rng: &mut R) -> Result<KWiseVerification> {
    ensure!(m <= 20, Domain, "input space of 2^{m} points is too large to draw from");
    let q = 1usize << m;
    ensure!(k <= q, Domain, "need {k} distinct inputs from {q}");
    let total = (0..k).fold(1.0f64, |acc, i| acc * (q - i) as f64 / (i + 1) as f64);
    let inputs: Vec<Vec<u64>> = if total <= subsets as f64 {
        crate::k_subsets(q, k).into_iter().map(|s| s.into_iter().map(|x| x as u64).collect()).collect()
    } else {
        let mut seen = std::collections::BTreeSet::new();
        while seen.len() < subsets {
            let mut s: Vec<u64> = rand::seq::index::sample(rng, q, k).into_iter().map(|x| x as u64).collect();
            s.sort_unstable();
            seen.insert(s);
        }
        seen.into_iter().collect()
    };
    let expected_count = (1u64 << m).pow(k as u32) >> k;
    let (mut min_count, mut max_count) = (u64::MAX, 0);
    for set in &inputs {
        for c in exhaustive_joint_counts(m, k, set)? {
            min_count = min_count.min(c);
            max_count = max_count.max(c);
        }
    }
    Ok(KWiseVerification { m, k, uniform: min_count == expected_count && max_count == expected_count, inputs, expected_count, min_count, max_count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use proptest::prelude::*;
    use std::collections::{HashMap, HashSet};

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn bvs(xs: &[&str]) -> Vec<BitVector> {
        xs.iter().map(|s| bv(s)).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&bvs(&["100", "010", "001"])).unwrap(), 3);
        assert_eq!(rank(&bvs(&["000", "000"])).unwrap(), 0);
        assert_eq!(rank(&bvs(&["110", "011", "101"])).unwrap(), 2);
        assert_eq!(rank(&[]).unwrap(), 0);
    }

    #[test]
    fn rank_rejects_mixed_lengths() {
        assert!(matches!(rank(&bvs(&["10", "101"])), Err(Error::Dimension(_))));
    }

    #[test]
    fn dependence_examples() {
        assert!(is_dependent(&bvs(&["101", "000"])).unwrap());
        assert!(!is_dependent(&bvs(&["100", "010", "001"])).unwrap());
        assert!(is_dependent(&bvs(&["110", "011", "101"])).unwrap());
        assert!(is_dependent(&[]).is_err());
    }

    #[test]
    fn subspace_sampling_edges() {
        let mut rng = Seed(1).rng();
        let z = sample_subspace(4, 0, &mut rng).unwrap();
        assert_eq!(z.enumerate().unwrap(), vec![bv("0000")]);
        let f = sample_subspace(4, 4, &mut rng).unwrap();
        assert_eq!(f.basis(), bvs(&["1000", "0100", "0010", "0001"]));
        assert_eq!(f, Subspace::full(4));
        for _ in 0..50 {
            let s = sample_subspace(3, 2, &mut rng).unwrap();
            assert_eq!(rank(&s.basis()).unwrap(), 2);
        }
        assert!(matches!(sample_subspace(3, 4, &mut rng), Err(Error::Domain(_))));
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(Subspace::zero(3).enumerate().unwrap(), bvs(&["000"]));
        let s = Subspace::span(2, &bvs(&["01", "10"])).unwrap();
        let got: HashSet<_> = s.enumerate().unwrap().into_iter().collect();
        assert_eq!(got, bvs(&["00", "01", "10", "11"]).into_iter().collect());
        let s = Subspace::span(3, &bvs(&["110", "011"])).unwrap();
        let got: HashSet<_> = s.enumerate().unwrap().into_iter().collect();
        assert_eq!(got, bvs(&["000", "110", "011", "101"]).into_iter().collect());
    }

    #[test]
    fn enumerate_cap() {
        assert!(matches!(Subspace::full(21).enumerate(), Err(Error::Resource(_))));
    }

    #[test]
    fn coordinates_invert_element() {
        let mut rng = Seed(5).rng();
        let s = sample_subspace(10, 4, &mut rng).unwrap();
        for c in 0..16 {
            assert_eq!(s.coordinates(&s.element(c)), Some(c));
        }
        let outside = (0..1024u64).map(|v| BitVector::new(10, v).unwrap()).find(|x| !s.contains(x)).unwrap();
        assert_eq!(s.coordinates(&outside), None);
    }

    #[test]
    fn subspace_json_roundtrip() {
        let s = Subspace::span(5, &bvs(&["10110", "01011"])).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"n":5,"basis":["16","b"]}"#);
        let back: Subspace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn sample_subspace_is_uniform_on_lines_of_f2_cubed() {
        let mut rng = Seed(2024).rng();
        let trials = 100_000;
        let mut counts: HashMap<Subspace, usize> = HashMap::new();
        for _ in 0..trials {
            *counts.entry(sample_subspace(3, 1, &mut rng).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 7);
        let p = 1.0 / 7.0;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        for (_, c) in counts {
            assert!((c as f64 / trials as f64 - p).abs() <= 5.0 * se);
        }
    }

    #[test]
    fn moduli_are_the_smallest_irreducibles() {
        assert_eq!(modulus(1), 0b10);
        assert_eq!(modulus(2), 0b111);
        assert_eq!(modulus(3), 0b1011);
        assert_eq!(modulus(4), 0b10011);
        assert_eq!(modulus(8), 0b1_0001_1011);
        // brute-force check for small degrees: no factor of degree <= m/2
        for m in 2..=10u32 {
            let p = modulus(m) as u128;
            for q in 2u128..(1 << (m / 2 + 1)) {
                assert_ne!(poly_mod(p, q), 0, "m={m} divisible by {q:b}");
            }
            for smaller in (1u64 << m)..modulus(m) {
                assert!(!is_irreducible(smaller));
            }
        }
    }

    #[test]
    fn field_mul_examples() {
        let x = FieldElement::new(2, 0b10).unwrap();
        let one = FieldElement::one(2);
        let zero = FieldElement::zero(2);
        assert_eq!(field_mul(&x, &one).unwrap(), x);
        assert_eq!(field_mul(&zero, &x).unwrap(), zero);
        assert_eq!(field_mul(&x, &x).unwrap().coeffs(), 0b11);
        assert!(field_mul(&x, &FieldElement::one(3)).is_err());
    }

    #[test]
    fn every_nonzero_gf16_element_is_invertible() {
        for a in 1..16 {
            let a = FieldElement::new(4, a).unwrap();
            let inverses = (1..16)
                .filter(|&b| field_mul(&a, &FieldElement::new(4, b).unwrap()).unwrap() == FieldElement::one(4))
                .count();
            assert_eq!(inverses, 1);
        }
    }

    #[test]
    fn kwise_examples() {
        let zero = KWiseFamily::new(3, vec![FieldElement::zero(3); 4]).unwrap();
        let c = FieldElement::new(3, 0b101).unwrap();
        let mut coeffs = vec![FieldElement::zero(3); 3];
        coeffs.push(c);
        let constant = KWiseFamily::new(3, coeffs).unwrap();
        for x in 0..8 {
            let x = BitVector::new(3, x).unwrap();
            assert!(!kwise_eval(&zero, &x).unwrap());
            assert_eq!(kwise_eval(&constant, &x).unwrap(), c.projection());
        }
        // seed (x, 0, 0, 0) over GF(4): x·x³ = x since x³ = 1.
        let xe = FieldElement::new(2, 0b10).unwrap();
        let x3 = field_mul(&field_mul(&xe, &xe).unwrap(), &xe).unwrap();
        assert_eq!(x3, FieldElement::one(2));
        let fam = KWiseFamily::new(2, vec![xe, FieldElement::zero(2), FieldElement::zero(2), FieldElement::zero(2)]).unwrap();
        assert_eq!(kwise_eval(&fam, &bv("10")).unwrap(), xe.projection());
        assert!(kwise_eval(&fam, &bv("101")).is_err());
    }

    #[test]
    fn four_wise_independence_exhaustive_gf4() {
        assert_eq!(exhaustive_joint_counts(2, 4, &[0, 1, 2, 3]).unwrap(), vec![16; 16]);
        let v = verify_kwise(2, 4, 50, &mut Seed(0).rng()).unwrap();
        assert_eq!(v.inputs, vec![vec![0, 1, 2, 3]]);
        assert!(v.uniform && v.expected_count == 16);
    }

    #[test]
    fn four_wise_independence_gf16_samples() {
        let v = verify_kwise(4, 4, 50, &mut Seed(1).rng()).unwrap();
        assert_eq!(v.inputs.len(), 50);
        assert!(v.uniform && v.expected_count == 4096, "{v:?}");
    }

    #[test]
    fn joint_counts_detect_dependence() {
        // Order 2 gives affine maps, whose outputs on all of GF(4) always XOR to 0.
        let c = exhaustive_joint_counts(2, 2, &[0, 1, 2, 3]).unwrap();
        assert_eq!(c.iter().sum::<u64>(), 16);
        assert!(c.iter().enumerate().all(|(p, &x)| (x == 0) == (p.count_ones() % 2 == 1)));
        assert_eq!(exhaustive_joint_counts(2, 2, &[1, 3]).unwrap(), vec![4; 4]);
        assert!(matches!(exhaustive_joint_counts(16, 4, &[0]), Err(Error::Resource(_))));
    }

    proptest! {
        #[test]
        fn rank_invariant_under_row_ops(rows in proptest::collection::vec(0u64..256, 1..6), i in 0usize..6, j in 0usize..6) {
            let rows: Vec<BitVector> = rows.into_iter().map(|v| BitVector::new(8, v).unwrap()).collect();
            let r = rank(&rows).unwrap();
            let mut reversed = rows.clone();
            reversed.reverse();
            prop_assert_eq!(rank(&reversed).unwrap(), r);
            let (i, j) = (i % rows.len(), j % rows.len());
            if i != j {
                let mut swapped = rows.clone();
                swapped[i] = rows[i].xor(&rows[j]).unwrap();
                prop_assert_eq!(rank(&swapped).unwrap(), r);
            }
        }

        #[test]
        fn enumerate_is_a_group(seed in any::<u64>(), n in 1usize..9, d in 0usize..9) {
            let d = d.min(n);
            let s = sample_subspace(n, d, &mut Seed(seed).rng()).unwrap();
            let elems = s.enumerate().unwrap();
            let set: HashSet<_> = elems.iter().copied().collect();
            prop_assert_eq!(set.len(), 1 << d);
            prop_assert!(set.contains(&BitVector::zeros(n)));
            for a in &elems {
                for b in &elems {
                    prop_assert!(set.contains(&a.xor(b).unwrap()));
                }
            }
        }
    }
}
