//! The error exponent `E(R, P)` of random stabilizer codes on a Pauli-mixture
//! channel, computed three independent ways:
//!
//! * [`exponent_piecewise`]: closed form in terms of the tilted family
//!   `P_delta(u) ∝ P(u)^{1/(1+delta)}` and the rates `R_delta = 1 - H(P_delta)`.
//!   This is the production path.
//! * [`exponent_gallager`]: concave one-dimensional maximization over `delta`.
//! * [`exponent_primal`]: grid search of `min_Q D(Q||P) + |1 - H(Q) - R|^+`
//!   over the probability simplex. Slow; used as an oracle.
//!
//! Rates and logarithms are in base `d`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::golden_section_max;
use crate::types::{divergence, entropy, log_base, NoiseDistribution};

/// Tolerance in `delta` for the Gallager-form maximization.
pub const DELTA_TOLERANCE: f64 = 1e-10;

/// Coarsest simplex resolution `exponent_primal` accepts.
pub const MAX_PRIMAL_RESOLUTION: f64 = 0.05;

/// Cap on objective evaluations (coarse grid plus refinement) in `exponent_primal`.
pub const MAX_PRIMAL_GRID: u128 = 50_000_000;

const MAX_REFINE_BOX: u128 = 1_000_000;
const REFINE_FLOOR: f64 = 1e-11;

/// Which branch of the piecewise form a rate falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `R < R_1`: slope -1.
    Line,
    /// `R_1 <= R < R_0`.
    Curved,
    /// `R >= R_0`.
    Zero,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Line => "line",
            Regime::Curved => "curved",
            Regime::Zero => "zero",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentPoint {
    pub rate: f64,
    pub exponent: f64,
    pub regime: Regime,
    pub delta_star: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    pub hashing_bound: f64,
}

impl Thresholds {
    pub fn regime(&self, rate: f64) -> Regime {
        if rate >= self.r0 {
            Regime::Zero
        } else if rate < self.r1 {
            Regime::Line
        } else {
            Regime::Curved
        }
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::InvalidArgument(format!(
            "rate {} outside [0, 1)",
            rate
        )));
    }
    Ok(())
}

/// Depolarizing-type channel: `P(0,0) = 1 - (d^2 - 1) eps`, `P(u) = eps` otherwise.
pub fn depolarizing(d: u32, epsilon: f64) -> Result<NoiseDistribution> {
    let others = (d * d - 1) as f64;
    if !(0.0..=1.0 / others).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {} outside [0, 1/{}]",
            epsilon, others
        )));
    }
    let mut probs = vec![epsilon; (d * d) as usize];
    probs[0] = 1.0 - others * epsilon;
    NoiseDistribution::new(d, probs)
}

/// `sum_{u: P(u) > 0} P(u)^s`.
fn power_sum(p: &NoiseDistribution, s: f64) -> f64 {
    p.probs()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x.powf(s))
        .sum()
}

fn tilted_probs(p: &NoiseDistribution, delta: f64) -> Vec<f64> {
    let s = 1.0 / (1.0 + delta);
    let z = power_sum(p, s);
    p.probs()
        .iter()
        .map(|&x| if x > 0.0 { x.powf(s) / z } else { 0.0 })
        .collect()
}

/// `P_delta(u) = P(u)^{1/(1+delta)} / sum_v P(v)^{1/(1+delta)}`; keeps the support of `P`.
pub fn tilted(p: &NoiseDistribution, delta: f64) -> Result<NoiseDistribution> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!(
            "delta {} outside [0, 1]",
            delta
        )));
    }
    if delta == 0.0 {
        return Ok(p.clone());
    }
    let mut probs = tilted_probs(p, delta);
    // renormalize once more so the constructor's 1e-12 check sees rounding only
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|x| *x /= total);
    NoiseDistribution::new(p.d(), probs)
}

/// `R_delta = 1 - H(P_delta)`.
pub fn tilted_rate(p: &NoiseDistribution, delta: f64) -> f64 {
    1.0 - entropy(&tilted_probs(p, delta), p.d() as f64)
}

pub fn thresholds(p: &NoiseDistribution) -> Thresholds {
    let r0 = 1.0 - p.entropy();
    Thresholds {
        r0,
        r1: tilted_rate(p, 1.0),
        hashing_bound: r0,
    }
}

/// `-delta (R - 1) - (1 + delta) log_d sum_u P(u)^{1/(1+delta)}`.
fn gallager_objective(p: &NoiseDistribution, rate: f64, delta: f64) -> f64 {
    let base = p.d() as f64;
    delta * (1.0 - rate) - (1.0 + delta) * log_base(power_sum(p, 1.0 / (1.0 + delta)), base)
}

/// Gallager form: maximize the concave objective over `delta in [0, 1]`.
pub fn exponent_gallager(rate: f64, p: &NoiseDistribution) -> Result<ExponentPoint> {
    check_rate(rate)?;
    let (delta_star, value) = golden_section_max(
        |dl| gallager_objective(p, rate, dl),
        0.0,
        1.0,
        DELTA_TOLERANCE,
    );
    Ok(ExponentPoint {
        rate,
        exponent: value.max(0.0),
        regime: thresholds(p).regime(rate),
        delta_star,
    })
}

const MONOTONICITY_SAMPLES: usize = 32;

/// Piecewise closed form. In the curved regime `delta*` solves `R_delta = R`
/// by bisection, which relies on `delta -> R_delta` being non-increasing; that
/// is checked on a sample grid first.
pub fn exponent_piecewise(rate: f64, p: &NoiseDistribution) -> Result<ExponentPoint> {
    check_rate(rate)?;
    let t = thresholds(p);
    let base = p.d() as f64;
    let regime = t.regime(rate);
    let (exponent, delta_star) = match regime {
        Regime::Zero => (0.0, 0.0),
        Regime::Line => (1.0 - rate - 2.0 * log_base(power_sum(p, 0.5), base), 1.0),
        Regime::Curved => {
            check_rate_monotone(p)?;
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if tilted_rate(p, mid) > rate {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let delta = 0.5 * (lo + hi);
            let e = divergence(&tilted_probs(p, delta), p.probs(), base);
            (e, delta)
        }
    };
    Ok(ExponentPoint {
        rate,
        exponent,
        regime,
        delta_star,
    })
}

fn check_rate_monotone(p: &NoiseDistribution) -> Result<()> {
    let rates: Vec<f64> = (0..=MONOTONICITY_SAMPLES)
        .map(|i| tilted_rate(p, i as f64 / MONOTONICITY_SAMPLES as f64))
        .collect();
    if let Some(w) = rates.windows(2).find(|w| w[1] > w[0] + 1e-12) {
        return Err(Error::InvariantViolation(format!(
            "R_delta increases from {} to {}; bisection for delta* is unsound",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `E(R, P)` via the piecewise form.
pub fn exponent(rate: f64, p: &NoiseDistribution) -> Result<f64> {
    Ok(exponent_piecewise(rate, p)?.exponent)
}

/// Symbols of equal probability grouped together; `(probability, multiplicity)`.
/// Zero-probability symbols are dropped because any `Q` charging them has
/// infinite divergence.
fn probability_classes(p: &NoiseDistribution) -> Vec<(f64, usize)> {
    let mut classes: Vec<(f64, usize)> = Vec::new();
    for &x in p.probs().iter().filter(|&&x| x > 0.0) {
        match classes.iter_mut().find(|(v, _)| *v == x) {
            Some((_, count)) => *count += 1,
            None => classes.push((x, 1)),
        }
    }
    classes
}

/// Objective of the primal form for a `Q` that spreads weight `w[c]` evenly
/// over class `c`.
fn primal_objective(classes: &[(f64, usize)], weights: &[f64], rate: f64, base: f64) -> f64 {
    let mut div = 0.0;
    let mut ent = 0.0;
    for (&(p, size), &w) in classes.iter().zip(weights) {
        if w <= 0.0 {
            continue;
        }
        let q = w / size as f64;
        div += w * log_base(q / p, base);
        ent -= w * log_base(q, base);
    }
    div.max(0.0) + (1.0 - ent - rate).max(0.0)
}

fn grid_size(steps: u64, parts: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..(parts as u128).saturating_sub(1) {
        acc = acc * (steps as u128 + 1 + i) / (i + 1);
    }
    acc
}

/// Visits every point `start + step * j` (`j` in `-span..=span` per free
/// coordinate) of a box around `start` that stays inside the simplex. The
/// last coordinate absorbs the remainder.
fn visit_box<F: FnMut(&[f64])>(start: &[f64], step: f64, span: i64, f: &mut F) {
    let free = start.len() - 1;
    let mut point = start.to_vec();
    fn rec<F: FnMut(&[f64])>(
        i: usize,
        free: usize,
        start: &[f64],
        step: f64,
        span: i64,
        point: &mut [f64],
        f: &mut F,
    ) {
        if i == free {
            let rest = 1.0 - point[..free].iter().sum::<f64>();
            if rest >= -1e-15 {
                point[free] = rest.max(0.0);
                f(point);
            }
            return;
        }
        for j in -span..=span {
            let w = start[i] + step * j as f64;
            if !(0.0..=1.0).contains(&w) {
                continue;
            }
            point[i] = w;
            rec(i + 1, free, start, step, span, point, f);
        }
    }
    rec(0, free, start, step, span, &mut point, f);
}

/// Primal form by exhaustive search over a grid of the probability simplex
/// with spacing `resolution`, followed by zooming refinement passes around
/// the best point.
///
/// The objective is convex and invariant under permuting symbols of equal
/// probability, so the minimum is attained by some `Q` that is constant on
/// each such class; the grid runs over class weights.
pub fn exponent_primal(rate: f64, p: &NoiseDistribution, resolution: f64) -> Result<f64> {
    check_rate(rate)?;
    if !(resolution > 0.0 && resolution <= MAX_PRIMAL_RESOLUTION) {
        return Err(Error::InvalidArgument(format!(
            "simplex resolution {} is too coarse (need 0 < h <= {})",
            resolution, MAX_PRIMAL_RESOLUTION
        )));
    }
    let steps = (1.0 / resolution).round() as u64;
    if ((steps as f64) * resolution - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "simplex resolution {} does not divide 1",
            resolution
        )));
    }
    let classes = probability_classes(p);
    let base = p.d() as f64;
    if classes.len() == 1 {
        return Ok(primal_objective(&classes, &[1.0], rate, base));
    }
    let parts = classes.len();
    let free = parts as i32 - 1;
    // box half-width in refinement steps; each pass zooms the box to cover
    // two previous steps on either side of the incumbent
    let span = ((((MAX_REFINE_BOX as f64).powf(1.0 / free as f64)) as i64 - 1) / 2).clamp(3, 20);
    let shrink = span as f64 / 2.0;
    let passes = ((resolution / REFINE_FLOOR).ln() / shrink.ln()).ceil() as u128;
    let predicted = grid_size(steps, parts) + passes * ((2 * span + 1) as u128).pow(free as u32);
    if predicted > MAX_PRIMAL_GRID {
        return Err(Error::InstanceTooLarge {
            what: "primal simplex grid",
            predicted,
            cap: MAX_PRIMAL_GRID,
        });
    }

    let mut best_value = f64::INFINITY;
    let mut best_point = vec![0.0; parts];
    let mut counts = vec![0u64; parts];
    let mut weights = vec![0.0; parts];
    fn coarse<F: FnMut(&[u64])>(remaining: u64, pos: usize, counts: &mut [u64], f: &mut F) {
        if pos + 1 == counts.len() {
            counts[pos] = remaining;
            f(counts);
            return;
        }
        for c in 0..=remaining {
            counts[pos] = c;
            coarse(remaining - c, pos + 1, counts, f);
        }
    }
    coarse(steps, 0, &mut counts, &mut |c| {
        for (w, &ci) in weights.iter_mut().zip(c) {
            *w = ci as f64 / steps as f64;
        }
        let v = primal_objective(&classes, &weights, rate, base);
        if v < best_value {
            best_value = v;
            best_point.copy_from_slice(&weights);
        }
    });

    let mut step = resolution;
    for _ in 0..passes {
        let center = best_point.clone();
        step /= shrink;
        visit_box(&center, step, span, &mut |w| {
            let v = primal_objective(&classes, w, rate, base);
            if v < best_value {
                best_value = v;
                best_point.copy_from_slice(w);
            }
        });
    }
    Ok(best_value)
}

/// Failure-side right-hand side `(n+1)^{2(d^2-1)} d^{-n E(k/n, P)}`.
pub fn theorem_failure_bound(n: u32, k: u32, p: &NoiseDistribution) -> Result<f64> {
    if n == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and 0 <= k <= n, got n={}, k={}",
            n, k
        )));
    }
    let d = p.d() as f64;
    let e = if k == n {
        0.0
    } else {
        exponent(k as f64 / n as f64, p)?
    };
    let log_prefactor = 2.0 * (d * d - 1.0) * ((n + 1) as f64).ln();
    Ok((log_prefactor - n as f64 * e * d.ln()).exp())
}

/// `1 - (n+1)^{2(d^2-1)} d^{-n E(k/n, P)}`; negative (vacuous) values are returned as-is.
pub fn theorem_fidelity_bound(n: u32, k: u32, p: &NoiseDistribution) -> Result<f64> {
    Ok(1.0 - theorem_failure_bound(n, k, p)?)
}

/// Classical random-coding exponent `E_r(R + 1)` of the additive channel
/// `W(v|u) = P(v - u)` on `F_d x F_d` with uniform input, alongside `E(R, P)`.
///
/// `E_0(rho)` is evaluated from the full transition matrix, independently of
/// the closed forms above.
pub fn classical_gallager_check(rate: f64, p: &NoiseDistribution) -> Result<(f64, f64)> {
    check_rate(rate)?;
    let d = p.d() as usize;
    let size = d * d;
    let base = d as f64;
    let sub = |v: usize, u: usize| {
        let (vi, vj) = (v / d, v % d);
        let (ui, uj) = (u / d, u % d);
        ((vi + d - ui) % d) * d + (vj + d - uj) % d
    };
    let w: Vec<Vec<f64>> = (0..size)
        .map(|u| (0..size).map(|v| p.prob(sub(v, u))).collect())
        .collect();
    let input = 1.0 / size as f64;
    let e0 = |rho: f64| {
        let s = 1.0 / (1.0 + rho);
        let total: f64 = (0..size)
            .map(|v| {
                let inner: f64 = (0..size)
                    .map(|u| {
                        if w[u][v] > 0.0 {
                            input * w[u][v].powf(s)
                        } else {
                            0.0
                        }
                    })
                    .sum();
                inner.powf(1.0 + rho)
            })
            .sum();
        -log_base(total, base)
    };
    let classical_rate = rate + 1.0;
    let objective = |rho: f64| e0(rho) - rho * classical_rate;

    // coarse scan, then golden-section inside the best cell
    let cells = 100;
    let best =
        (0..=cells)
            .map(|i| i as f64 / cells as f64)
            .fold((0.0, f64::NEG_INFINITY), |acc, rho| {
                let v = objective(rho);
                if v > acc.1 {
                    (rho, v)
                } else {
                    acc
                }
            });
    let lo = (best.0 - 1.0 / cells as f64).max(0.0);
    let hi = (best.0 + 1.0 / cells as f64).min(1.0);
    let (_, refined) = golden_section_max(objective, lo, hi, 1e-12);
    let er = refined.max(best.1).max(0.0);
    Ok((er, exponent(rate, p)?))
}
