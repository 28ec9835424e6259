//! Method of types over a finite alphabet, plus the noise distribution on
//! `F_d x F_d` that parameterizes a Pauli-mixture channel.
//!
//! Symbols of `F_d x F_d` are indexed lexicographically: `(i, j) -> i * d + j`.
//! Every logarithm takes an explicit base; the rest of the crate uses base `d`.

use std::cmp::Ordering;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symplectic::{Field, SymplecticVector};

/// Cap on the number of types `enumerate_types` will produce.
pub const MAX_TYPES: u128 = 1_000_000;

/// Tolerance on the total mass of a [`NoiseDistribution`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[inline]
pub fn log_base(x: f64, base: f64) -> f64 {
    x.ln() / base.ln()
}

/// Shannon entropy with the `0 log 0 = 0` convention.
pub fn entropy(probs: &[f64], base: f64) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * log_base(p, base))
        .sum();
    h.max(0.0)
}

/// `D(q || p)`; `+inf` when `q` charges a symbol that `p` does not.
pub fn divergence(q: &[f64], p: &[f64], base: f64) -> f64 {
    assert_eq!(q.len(), p.len(), "divergence over different alphabets");
    let mut acc = 0.0;
    for (&qi, &pi) in q.iter().zip(p) {
        if qi <= 0.0 {
            continue;
        }
        if pi <= 0.0 {
            return f64::INFINITY;
        }
        acc += qi * log_base(qi / pi, base);
    }
    acc.max(0.0)
}

/// Empirical distribution of a length-`n` sequence, held as exact counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmpiricalType {
    counts: Vec<u32>,
    n: u32,
}

impl EmpiricalType {
    pub fn from_counts(counts: Vec<u32>) -> Result<Self> {
        let n: u32 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidArgument("a type needs n > 0".into()));
        }
        Ok(Self { counts, n })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Entropy evaluated from the sorted counts, so types that are
    /// permutations of each other get bit-identical values.
    pub fn entropy(&self, base: f64) -> f64 {
        let mut counts: Vec<u32> = self.counts.iter().copied().filter(|&c| c > 0).collect();
        counts.sort_unstable();
        let n = self.n as f64;
        let h: f64 = counts
            .iter()
            .map(|&c| {
                let p = c as f64 / n;
                -p * log_base(p, base)
            })
            .sum();
        h.max(0.0)
    }

    /// Exact key ordering types by entropy.
    pub fn entropy_key(&self) -> EntropyKey {
        let weight = self
            .counts
            .iter()
            .filter(|&&c| c > 1)
            .fold(BigUint::one(), |acc, &c| acc * BigUint::from(c).pow(c));
        EntropyKey { n: self.n, weight }
    }
}

/// Exact stand-in for the entropy of a type.
///
/// With `W = prod_u c_u^{c_u}`, a type of length `n` has
/// `n H = n log n - log W`, so comparisons reduce to integer arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EntropyKey {
    n: u32,
    weight: BigUint,
}

impl Ord for EntropyKey {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.n == other.n {
            // larger weight means lower entropy
            return other.weight.cmp(&self.weight);
        }
        // H_a < H_b  <=>  n_a^{n_a n_b} W_b^{n_a} < n_b^{n_a n_b} W_a^{n_b}
        let (na, nb) = (self.n, other.n);
        let lhs = BigUint::from(na).pow(na * nb) * other.weight.pow(na);
        let rhs = BigUint::from(nb).pow(na * nb) * self.weight.pow(nb);
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for EntropyKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Type of a sequence of symbol indices drawn from an alphabet of the given size.
pub fn type_of(sequence: &[usize], alphabet_size: usize) -> Result<EmpiricalType> {
    if sequence.is_empty() {
        return Err(Error::InvalidArgument("type of an empty sequence".into()));
    }
    let mut counts = vec![0u32; alphabet_size];
    for &s in sequence {
        if s >= alphabet_size {
            return Err(Error::InvalidArgument(format!(
                "symbol {} outside an alphabet of size {}",
                s, alphabet_size
            )));
        }
        counts[s] += 1;
    }
    EmpiricalType::from_counts(counts)
}

/// Type of the length-`n` sequence over `F_d x F_d` encoded by `x`.
pub fn type_of_vector(x: &SymplecticVector) -> EmpiricalType {
    let d = x.d() as usize;
    let mut counts = vec![0u32; d * d];
    for i in 0..x.n() {
        counts[x.symbol(i)] += 1;
    }
    EmpiricalType {
        counts,
        n: x.n() as u32,
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `|Q_n|` for an alphabet of size `a`: `C(n + a - 1, a - 1)`.
pub fn type_count(n: u32, alphabet_size: usize) -> BigUint {
    binomial(
        n as u64 + alphabet_size as u64 - 1,
        alphabet_size as u64 - 1,
    )
}

/// All types of length-`n` sequences, in lexicographic order of the count vector.
pub fn enumerate_types(n: u32, alphabet_size: usize) -> Result<Vec<EmpiricalType>> {
    if n == 0 || alphabet_size == 0 {
        return Err(Error::InvalidArgument(
            "types need n > 0 and a nonempty alphabet".into(),
        ));
    }
    let predicted = type_count(n, alphabet_size);
    match predicted.to_u128() {
        Some(c) if c <= MAX_TYPES => {}
        other => {
            return Err(Error::InstanceTooLarge {
                what: "type enumeration",
                predicted: other.unwrap_or(u128::MAX),
                cap: MAX_TYPES,
            })
        }
    }
    let mut out = Vec::new();
    let mut counts = vec![0u32; alphabet_size];
    compositions(n, 0, &mut counts, &mut out);
    Ok(out)
}

fn compositions(remaining: u32, pos: usize, counts: &mut [u32], out: &mut Vec<EmpiricalType>) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        out.push(EmpiricalType {
            counts: counts.to_vec(),
            n: counts.iter().sum(),
        });
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        compositions(remaining - c, pos + 1, counts, out);
    }
}

/// `|T_Q^n| = n! / prod_u c_u!`.
pub fn type_class_size(q: &EmpiricalType) -> BigUint {
    let mut remaining = q.n as u64;
    let mut acc = BigUint::one();
    for &c in &q.counts {
        acc *= binomial(remaining, c as u64);
        remaining -= c as u64;
    }
    acc
}

/// Base-`d` log of `P^n(x)` for any `x` of type `q`, i.e. `-n [H(q) + D(q || P)]`.
/// Returns `-inf` when `q` charges a symbol outside the support of `P`.
pub fn iid_log_probability(p: &NoiseDistribution, q: &EmpiricalType) -> f64 {
    assert_eq!(q.alphabet_size(), p.probs.len(), "alphabet mismatch");
    let base = p.d() as f64;
    let mut acc = 0.0;
    for (&c, &pu) in q.counts.iter().zip(&p.probs) {
        if c == 0 {
            continue;
        }
        if pu <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += c as f64 * log_base(pu, base);
    }
    acc
}

/// A probability distribution `P` on `F_d x F_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseDistribution {
    field: Field,
    probs: Vec<f64>,
}

/// On-disk form: `{"d": 2, "probs": [p00, p01, p10, p11]}`.
#[derive(Serialize, Deserialize)]
struct DistributionFile {
    d: u32,
    probs: Vec<f64>,
}

impl NoiseDistribution {
    pub fn new(d: u32, probs: Vec<f64>) -> Result<Self> {
        let field = Field::new(d)?;
        let expected = (d * d) as usize;
        if probs.len() != expected {
            return Err(Error::InvalidDistribution(format!(
                "expected {} probabilities for d={}, got {}",
                expected,
                d,
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {} is not a nonnegative number",
                p
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {:.17}, not 1",
                total
            )));
        }
        Ok(Self { field, probs })
    }

    /// The uniform distribution on `F_d x F_d`.
    pub fn uniform(d: u32) -> Result<Self> {
        let size = (d * d) as usize;
        Self::new(d, vec![1.0 / size as f64; size])
    }

    /// The noiseless channel: all mass on the identity `(0, 0)`.
    pub fn noiseless(d: u32) -> Result<Self> {
        let mut probs = vec![0.0; (d * d) as usize];
        probs[0] = 1.0;
        Self::new(d, probs)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DistributionFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(raw.d, raw.probs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DistributionFile {
            d: self.d(),
            probs: self.probs.clone(),
        })
        .expect("distribution serializes")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn d(&self) -> u32 {
        self.field.order()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }

    /// Base-`d` entropy `H(P)`.
    pub fn entropy(&self) -> f64 {
        entropy(&self.probs, self.d() as f64)
    }

    /// `P^n(x) = prod_i P(x_i)`, multiplied in site order.
    pub fn sequence_probability(&self, x: &SymplecticVector) -> f64 {
        (0..x.n()).map(|i| self.probs[x.symbol(i)]).product()
    }
}
