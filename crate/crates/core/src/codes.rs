//! Minimum-entropy coset leaders, correctable sets and their failure
//! probabilities, averaged over the ensemble of isotropic subspaces.
//!
//! For an isotropic `L` of dimension `n - k`, every coset of `L^perp` gets the
//! member of least type entropy as its leader (lexicographically least among
//! ties), and the correctable set is `Gamma(L) = leaders + L`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::theorem_failure_bound;
use crate::numeric::{compensated_sum, NeumaierSum};
use crate::symplectic::{
    enumerate_isotropic, sample_isotropic_with, Field, SymplecticSubspace, SymplecticVector,
};
use crate::types::{
    divergence, enumerate_types, iid_log_probability, type_class_size, type_count, type_of_vector,
    EmpiricalType, NoiseDistribution,
};

/// Pairwise difference checks above this many pairs use the equivalent
/// per-coset check instead.
const MAX_PAIRWISE_CHECK: usize = 10_000_000;

/// Dense entropy rank of every vector of `F_d^{2n}`: equal rank means equal
/// type entropy, lower rank means lower entropy.
#[derive(Clone, Debug)]
pub struct EntropyRanks {
    n: usize,
    field: Field,
    rank_of_vector: Vec<u32>,
    /// number of vectors with rank <= r
    cumulative: Vec<u64>,
}

impl EntropyRanks {
    pub fn new(n: usize, field: Field) -> Result<Self> {
        let size = field.space_size(n)?;
        let alphabet = (field.order() * field.order()) as usize;
        let mut types = enumerate_types(n as u32, alphabet)?;
        types.sort_by_cached_key(|q| q.entropy_key());
        let mut rank_of_type: HashMap<Vec<u32>, u32> = HashMap::with_capacity(types.len());
        let mut rank = 0u32;
        let mut prev = None;
        for q in &types {
            let key = q.entropy_key();
            if let Some(p) = &prev {
                if *p != key {
                    rank += 1;
                }
            }
            rank_of_type.insert(q.counts().to_vec(), rank);
            prev = Some(key);
        }
        let mut per_rank = vec![0u64; rank as usize + 1];
        let mut rank_of_vector = Vec::with_capacity(size);
        for idx in 0..size {
            let x = SymplecticVector::from_index(idx, n, field);
            let r = rank_of_type[type_of_vector(&x).counts()];
            per_rank[r as usize] += 1;
            rank_of_vector.push(r);
        }
        let cumulative = per_rank
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            n,
            field,
            rank_of_vector,
            cumulative,
        })
    }

    pub fn rank(&self, index: usize) -> u32 {
        self.rank_of_vector[index]
    }

    /// `|{y : H(P_y) <= H(P_x)}|`, including `x` itself.
    pub fn count_at_most(&self, index: usize) -> u64 {
        self.cumulative[self.rank_of_vector[index] as usize]
    }
}

/// `Gamma(L) = Gamma_0(L) + L` for one isotropic subspace `L`.
#[derive(Clone, Debug)]
pub struct CorrectableSet {
    l: SymplecticSubspace,
    l_perp: SymplecticSubspace,
    /// leader of each coset of `L^perp`, indexed by syndrome against `L`'s basis
    leaders: Vec<SymplecticVector>,
    member: Vec<bool>,
    member_count: usize,
}

impl CorrectableSet {
    pub fn subspace(&self) -> &SymplecticSubspace {
        &self.l
    }

    pub fn dual(&self) -> &SymplecticSubspace {
        &self.l_perp
    }

    pub fn leaders(&self) -> &[SymplecticVector] {
        &self.leaders
    }

    /// Leader of the coset whose syndrome against `L`'s basis is `syndrome`.
    pub fn leader_for_syndrome(&self, syndrome: usize) -> &SymplecticVector {
        &self.leaders[syndrome]
    }

    pub fn contains(&self, x: &SymplecticVector) -> bool {
        x.field() == self.l.field() && x.n() == self.l.n() && self.member[x.index()]
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.member[index]
    }

    pub fn len(&self) -> usize {
        self.member_count
    }

    pub fn is_empty(&self) -> bool {
        self.member_count == 0
    }

    pub fn members(&self) -> impl Iterator<Item = SymplecticVector> + '_ {
        let (n, field) = (self.l.n(), self.l.field());
        self.member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(move |(i, _)| SymplecticVector::from_index(i, n, field))
    }

    /// Full pairwise check that no difference of members lies in `L^perp \ L`.
    pub fn check_difference_condition(&self) -> Result<()> {
        let members: Vec<SymplecticVector> = self.members().collect();
        for x in &members {
            for y in &members {
                let diff = y.sub(x);
                if self.l_perp.contains(&diff) && !self.l.contains(&diff) {
                    return Err(Error::InvariantViolation(format!(
                        "members {} and {} differ by {} in L^perp \\ L",
                        x, y, diff
                    )));
                }
            }
        }
        Ok(())
    }

    /// Same condition via the coset structure: leaders sit in distinct cosets
    /// of `L^perp` and `L ⊆ L^perp`, so a member difference lies in `L^perp`
    /// only when both members share a leader, and then it lies in `L`.
    fn check_leaders_distinct(&self) -> Result<()> {
        for (s, z) in self.leaders.iter().enumerate() {
            if self.l.syndrome_index(z) != s {
                return Err(Error::InvariantViolation(format!(
                    "leader {} is filed under syndrome {}",
                    z, s
                )));
            }
        }
        Ok(())
    }
}

/// Builds `Gamma(L)` for an isotropic `L`.
pub fn correctable_set(l: &SymplecticSubspace) -> Result<CorrectableSet> {
    let ranks = EntropyRanks::new(l.n(), l.field())?;
    correctable_set_with(l, &ranks)
}

/// As [`correctable_set`], reusing precomputed entropy ranks.
pub fn correctable_set_with(
    l: &SymplecticSubspace,
    ranks: &EntropyRanks,
) -> Result<CorrectableSet> {
    if !l.is_isotropic() {
        return Err(Error::NotIsotropic);
    }
    if ranks.n != l.n() || ranks.field != l.field() {
        return Err(Error::DimensionMismatch(
            "entropy ranks built for a different space".into(),
        ));
    }
    let (n, field) = (l.n(), l.field());
    let size = field.space_size(n)?;
    let cosets = l.cardinality();

    let mut best: Vec<Option<(u32, usize)>> = vec![None; cosets];
    for idx in 0..size {
        let x = SymplecticVector::from_index(idx, n, field);
        let s = l.syndrome_index(&x);
        let r = ranks.rank(idx);
        // strict comparison keeps the lexicographically first minimizer
        if best[s].is_none_or(|(br, _)| r < br) {
            best[s] = Some((r, idx));
        }
    }
    let leaders: Vec<SymplecticVector> = best
        .into_iter()
        .map(|b| {
            let (_, idx) = b.expect("every syndrome is hit");
            SymplecticVector::from_index(idx, n, field)
        })
        .collect();

    let mut member = vec![false; size];
    let elements = l.elements();
    let mut member_count = 0;
    for z in &leaders {
        for w in &elements {
            let idx = z.add(w).index();
            if !member[idx] {
                member[idx] = true;
                member_count += 1;
            }
        }
    }
    let set = CorrectableSet {
        l: l.clone(),
        l_perp: l.dual(),
        leaders,
        member,
        member_count,
    };
    let expected = cosets * cosets;
    if member_count != expected {
        return Err(Error::InvariantViolation(format!(
            "|Gamma(L)| = {}, expected {}",
            member_count, expected
        )));
    }
    set.check_leaders_distinct()?;
    if member_count.saturating_mul(member_count) <= MAX_PAIRWISE_CHECK {
        set.check_difference_condition()?;
    }
    Ok(set)
}

/// `sum_{x not in Gamma(L)} P^n(x)`, accumulated in lexicographic order.
pub fn failure_probability(set: &CorrectableSet, p: &NoiseDistribution) -> Result<f64> {
    let (n, field) = (set.l.n(), set.l.field());
    if p.field() != field {
        return Err(Error::DimensionMismatch(format!(
            "distribution over d={} for a code over d={}",
            p.d(),
            field.order()
        )));
    }
    let mut acc = NeumaierSum::new();
    for (idx, &m) in set.member.iter().enumerate() {
        if !m {
            acc.add(p.sequence_probability(&SymplecticVector::from_index(idx, n, field)));
        }
    }
    Ok(acc.value().clamp(0.0, 1.0))
}

fn check_code_params(n: usize, k: usize) -> Result<()> {
    if n == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and 0 <= k <= n, got n={}, k={}",
            n, k
        )));
    }
    Ok(())
}

/// The full ensemble `A` of isotropic `(n-k)`-dimensional subspaces, each with
/// its correctable set.
pub struct Ensemble {
    n: usize,
    k: usize,
    field: Field,
    ranks: EntropyRanks,
    sets: Vec<CorrectableSet>,
}

impl Ensemble {
    pub fn exhaustive(n: usize, k: usize, field: Field) -> Result<Self> {
        check_code_params(n, k)?;
        let ranks = EntropyRanks::new(n, field)?;
        let sets = enumerate_isotropic(n, n - k, field)?
            .iter()
            .map(|l| correctable_set_with(l, &ranks))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            k,
            field,
            ranks,
            sets,
        })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[CorrectableSet] {
        &self.sets
    }

    pub fn ranks(&self) -> &EntropyRanks {
        &self.ranks
    }

    /// Exact mean of `failure_probability` over the ensemble.
    pub fn average_failure(&self, p: &NoiseDistribution) -> Result<f64> {
        let failures = self
            .sets
            .iter()
            .map(|s| failure_probability(s, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(compensated_sum(failures) / self.sets.len() as f64)
    }

    /// `|A(x)|` for every `x`, indexed by vector index: the number of `L` with
    /// `x in L^perp \ L`.
    pub fn counting_counts(&self) -> Vec<u64> {
        let size = self.ranks.rank_of_vector.len();
        let mut counts = vec![0u64; size];
        for set in &self.sets {
            for x in set.l_perp.elements() {
                if !set.l.contains(&x) {
                    counts[x.index()] += 1;
                }
            }
        }
        counts
    }

    /// `|B(x)|` for every `x`: the number of `L` with `x` outside `Gamma(L)`.
    pub fn exclusion_counts(&self) -> Vec<u64> {
        let size = self.ranks.rank_of_vector.len();
        let mut counts = vec![0u64; size];
        for set in &self.sets {
            for (c, &m) in counts.iter_mut().zip(&set.member) {
                if !m {
                    *c += 1;
                }
            }
        }
        counts
    }

    pub fn counting_ratio(&self, x: &SymplecticVector) -> Ratio<u64> {
        let count = self
            .sets
            .iter()
            .filter(|s| s.l_perp.contains(x) && !s.l.contains(x))
            .count();
        Ratio::new(count as u64, self.len() as u64)
    }

    pub fn exclusion_ratio(&self, x: &SymplecticVector) -> Ratio<u64> {
        let count = self.sets.iter().filter(|s| !s.contains(x)).count();
        Ratio::new(count as u64, self.len() as u64)
    }

    /// `min{ |{y != x : H(P_y) <= H(P_x)}| d^{-(n-k)}, 1 }`, exactly.
    pub fn exclusion_bound(&self, x: &SymplecticVector) -> Ratio<u64> {
        exclusion_bound_with(&self.ranks, x, self.n, self.k)
    }

    /// `sum_x P^n(x) |B(x)| / |A|`, the ensemble failure computed vector by vector.
    pub fn failure_by_exclusion(&self, p: &NoiseDistribution) -> f64 {
        let total = self.len() as f64;
        compensated_sum(
            self.exclusion_counts()
                .into_iter()
                .enumerate()
                .filter(|&(_, b)| b > 0)
                .map(|(idx, b)| {
                    let x = SymplecticVector::from_index(idx, self.n, self.field);
                    p.sequence_probability(&x) * b as f64 / total
                }),
        )
    }
}

fn exclusion_bound_with(
    ranks: &EntropyRanks,
    x: &SymplecticVector,
    n: usize,
    k: usize,
) -> Ratio<u64> {
    let others = ranks.count_at_most(x.index()) - 1;
    let denom = (x.d() as u64).pow((n - k) as u32);
    let r = Ratio::new(others, denom);
    if r > Ratio::from_integer(1) {
        Ratio::from_integer(1)
    } else {
        r
    }
}

/// `|A(x)| / |A|` by enumerating the ensemble; zero for `x = 0`.
pub fn counting_ratio(x: &SymplecticVector, n: usize, k: usize) -> Result<Ratio<u64>> {
    check_code_params(n, k)?;
    if x.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for n={}",
            x.n(),
            n
        )));
    }
    let all = enumerate_isotropic(n, n - k, x.field())?;
    let count = all
        .iter()
        .filter(|l| !l.contains(x) && l.dual().contains(x))
        .count();
    Ok(Ratio::new(count as u64, all.len() as u64))
}

/// `|B(x)| / |A|` by enumerating the ensemble and building every `Gamma(L)`.
pub fn exclusion_ratio(x: &SymplecticVector, n: usize, k: usize) -> Result<Ratio<u64>> {
    if x.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for n={}",
            x.n(),
            n
        )));
    }
    Ok(Ensemble::exhaustive(n, k, x.field())?.exclusion_ratio(x))
}

/// Per-type quantities shared by the bound evaluations.
struct TypeTerms {
    /// `|T_Q| prod_a P(a)^{n Q(a)}`
    mass: f64,
    /// number of sequences whose type entropy is at most `H(Q)`
    cumulative: BigUint,
    entropy: f64,
    divergence: f64,
    /// index of the first type in sorted order with the same entropy
    group_start: usize,
}

fn type_terms(n: usize, p: &NoiseDistribution) -> Result<Vec<TypeTerms>> {
    let d = p.d() as f64;
    let alphabet = (p.d() * p.d()) as usize;
    let mut types: Vec<EmpiricalType> = enumerate_types(n as u32, alphabet)?;
    types.sort_by_cached_key(|q| q.entropy_key());
    let keys: Vec<_> = types.iter().map(|q| q.entropy_key()).collect();
    let sizes: Vec<BigUint> = types.iter().map(type_class_size).collect();

    let mut out = Vec::with_capacity(types.len());
    let mut group_start = 0;
    let mut group_end = 0;
    let mut running = BigUint::zero();
    for i in 0..types.len() {
        if i == group_end {
            group_start = i;
            group_end = i;
            while group_end < types.len() && keys[group_end] == keys[i] {
                running += &sizes[group_end];
                group_end += 1;
            }
        }
        let q = &types[i];
        let log_p = iid_log_probability(p, q);
        let mass = if log_p == f64::NEG_INFINITY {
            0.0
        } else {
            (sizes[i].to_f64().unwrap_or(f64::INFINITY).ln() + log_p * d.ln()).exp()
        };
        out.push(TypeTerms {
            mass,
            cumulative: running.clone(),
            entropy: q.entropy(d),
            divergence: divergence(&q.probabilities(), p.probs(), d),
            group_start,
        });
    }
    Ok(out)
}

fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    let r = Ratio::new(num.clone(), den.clone());
    r.numer().to_f64().unwrap_or(f64::INFINITY) / r.denom().to_f64().unwrap_or(f64::INFINITY)
}

/// Every line of the failure-probability bound chain for one `(n, k, P)`,
/// from the exhaustive average down to the closed-form right-hand side.
#[derive(Clone, Debug, Serialize)]
pub struct BoundChain {
    /// `sum_x P^n(x) min{ sum_{y != x, H(P_y) <= H(P_x)} d^{-(n-k)}, 1 }`
    pub pointwise: f64,
    /// `sum_Q |T_Q| P-mass min{ sum_{H(Q') <= H(Q)} |T_Q'| d^{-n(1-R)}, 1 }`
    pub type_sum: f64,
    /// `sum_Q d^{-n D(Q||P)} sum_{H(Q') <= H(Q)} d^{-n |1-R-H(Q')|^+}`
    pub split_min: f64,
    /// `sum_Q d^{-n D(Q||P)} |Q_n| max_{H(Q') <= H(Q)} d^{-n |1-R-H(Q')|^+}`
    pub max_bound: f64,
    /// `sum_Q |Q_n| d^{-n D(Q||P) - n |1-R-H(Q)|^+}`
    pub collapsed: f64,
    /// `(n+1)^{2(d^2-1)} d^{-n E(R,P)}`
    pub theorem_rhs: f64,
}

impl BoundChain {
    pub fn lines(&self) -> [(&'static str, f64); 6] {
        [
            ("pointwise", self.pointwise),
            ("type_sum", self.type_sum),
            ("split_min", self.split_min),
            ("max_bound", self.max_bound),
            ("collapsed", self.collapsed),
            ("theorem_rhs", self.theorem_rhs),
        ]
    }

    /// First adjacent pair that is out of order beyond `tol` (relative to the
    /// larger side, with an absolute floor of `tol`).
    pub fn first_violation(&self, tol: f64) -> Option<(&'static str, &'static str)> {
        let lines = self.lines();
        lines.windows(2).find_map(|w| {
            let (a, b) = (w[0].1, w[1].1);
            (a > b + tol * b.abs().max(1.0)).then_some((w[0].0, w[1].0))
        })
    }
}

pub fn bound_chain(n: usize, k: usize, p: &NoiseDistribution) -> Result<BoundChain> {
    check_code_params(n, k)?;
    let d = p.d() as f64;
    let nf = n as f64;
    let rate = k as f64 / nf;
    let terms = type_terms(n, p)?;
    let num_types = type_count(n as u32, (p.d() * p.d()) as usize)
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let denom = p.field().pow_big((n - k) as u32);

    let pointwise = compensated_sum(terms.iter().map(|t| {
        let others = &t.cumulative - BigUint::from(1u32);
        t.mass * ratio_f64(&others, &denom).min(1.0)
    }));
    let type_sum = compensated_sum(
        terms
            .iter()
            .map(|t| t.mass * ratio_f64(&t.cumulative, &denom).min(1.0)),
    );

    let excess = |h: f64| (1.0 - rate - h).max(0.0);
    let decay = |x: f64| (-nf * x * d.ln()).exp();
    // terms are sorted by entropy, so {Q' : H(Q') <= H(Q)} is a prefix ending
    // at the end of Q's tie group
    let mut prefix = Vec::with_capacity(terms.len());
    let mut running = NeumaierSum::new();
    for t in &terms {
        running.add(decay(excess(t.entropy)));
        prefix.push(running.value());
    }
    let group_end: Vec<usize> = {
        let mut ends = vec![0; terms.len()];
        let mut i = terms.len();
        while i > 0 {
            let start = terms[i - 1].group_start;
            for e in ends.iter_mut().take(i).skip(start) {
                *e = i - 1;
            }
            i = start;
        }
        ends
    };
    let split_min = compensated_sum(
        terms
            .iter()
            .enumerate()
            .map(|(i, t)| decay(t.divergence) * prefix[group_end[i]]),
    );
    let max_bound = compensated_sum(terms.iter().enumerate().map(|(i, t)| {
        let best = terms[..=group_end[i]]
            .iter()
            .map(|u| decay(excess(u.entropy)))
            .fold(0.0, f64::max);
        decay(t.divergence) * num_types * best
    }));
    let collapsed = compensated_sum(
        terms
            .iter()
            .map(|t| num_types * decay(t.divergence + excess(t.entropy))),
    );
    let theorem_rhs = theorem_failure_bound(n as u32, k as u32, p)?;
    Ok(BoundChain {
        pointwise,
        type_sum,
        split_min,
        max_bound,
        collapsed,
        theorem_rhs,
    })
}

/// The type-sum bound on the ensemble-average failure probability.
pub fn intermediate_bound(n: usize, k: usize, p: &NoiseDistribution) -> Result<f64> {
    Ok(bound_chain(n, k, p)?.type_sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleReport {
    pub n: usize,
    pub k: usize,
    pub d: u32,
    pub probs: Vec<f64>,
    pub mode: &'static str,
    pub ensemble_size: String,
    pub avg_failure: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    pub intermediate_bound: f64,
    pub theorem_bound_rhs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl EnsembleReport {
    /// `avg_failure <= intermediate_bound <= theorem_bound_rhs` within `tol`.
    pub fn chain_holds(&self, tol: f64) -> bool {
        self.avg_failure <= self.intermediate_bound + tol
            && self.intermediate_bound <= self.theorem_bound_rhs * (1.0 + tol) + tol
    }
}

/// Average failure probability of `Gamma(L)` over the ensemble, either exactly
/// or by Monte Carlo over uniformly sampled `L`.
pub fn ensemble_average_failure(
    n: usize,
    k: usize,
    p: &NoiseDistribution,
    mode: SamplingMode,
) -> Result<EnsembleReport> {
    check_code_params(n, k)?;
    let field = p.field();
    let ensemble_size = crate::symplectic::isotropic_count(n, n - k, field).to_string();
    let chain = bound_chain(n, k, p)?;
    let (avg_failure, std_error, sample_count, seed, mode_name) = match mode {
        SamplingMode::Exhaustive => {
            let ensemble = Ensemble::exhaustive(n, k, field)?;
            (ensemble.average_failure(p)?, None, None, None, "exhaustive")
        }
        SamplingMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidArgument(
                    "sampled mode needs samples >= 1".into(),
                ));
            }
            let ranks = EntropyRanks::new(n, field)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failures = Vec::with_capacity(samples as usize);
            for _ in 0..samples {
                let l = sample_isotropic_with(n, n - k, field, &mut rng)?;
                failures.push(failure_probability(&correctable_set_with(&l, &ranks)?, p)?);
            }
            let count = samples as f64;
            let mean = compensated_sum(failures.iter().copied()) / count;
            let var = if samples > 1 {
                compensated_sum(failures.iter().map(|f| (f - mean) * (f - mean))) / (count - 1.0)
            } else {
                0.0
            };
            (
                mean,
                Some((var / count).sqrt()),
                Some(samples),
                Some(seed),
                "sampled",
            )
        }
    };
    Ok(EnsembleReport {
        n,
        k,
        d: field.order(),
        probs: p.probs().to_vec(),
        mode: mode_name,
        ensemble_size,
        avg_failure,
        std_error,
        intermediate_bound: chain.type_sum,
        theorem_bound_rhs: chain.theorem_rhs,
        sample_count,
        seed,
    })
}
