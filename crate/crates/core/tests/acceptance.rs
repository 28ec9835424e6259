//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the report is always printed; exits nonzero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use fidelity_exponent::codes::{bound_chain, correctable_set, Ensemble};
use fidelity_exponent::exponent::{
    classical_gallager_check, depolarizing, exponent_gallager, exponent_piecewise, exponent_primal,
    thresholds,
};
use fidelity_exponent::pauli::{stabilizer_code, verify_correctability, RECOVERY_TOLERANCE};
use fidelity_exponent::symplectic::{
    enumerate_isotropic, sample_isotropic, sample_isotropic_with, Field,
};
use fidelity_exponent::types::{
    enumerate_types, iid_log_probability, type_class_size, NoiseDistribution,
};
use num_bigint::BigUint;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed.as_secs() < limit_secs
}

fn f2() -> Field {
    Field::new(2).unwrap()
}

/// Fifty rates `0, 0.02, ..., 0.98`.
fn rate_grid() -> Vec<f64> {
    (0..50).map(|i| i as f64 * 0.02).collect()
}

fn headline_channels() -> Vec<(String, NoiseDistribution)> {
    let mut out: Vec<(String, NoiseDistribution)> = [0.0025, 0.01, 0.05, 0.1889]
        .iter()
        .map(|&e| (format!("d=2 eps={e}"), depolarizing(2, e).unwrap()))
        .collect();
    out.push(("d=3 eps=0.01".into(), depolarizing(3, 0.01).unwrap()));
    out
}

fn extra_channels() -> Vec<(String, NoiseDistribution)> {
    vec![
        (
            "d=2 noiseless".into(),
            NoiseDistribution::noiseless(2).unwrap(),
        ),
        ("d=2 uniform".into(), NoiseDistribution::uniform(2).unwrap()),
        (
            "d=2 point mass on Y".into(),
            NoiseDistribution::new(2, vec![0.0, 0.0, 0.0, 1.0]).unwrap(),
        ),
        (
            "d=2 dephasing".into(),
            NoiseDistribution::new(2, vec![0.9, 0.1, 0.0, 0.0]).unwrap(),
        ),
        (
            "d=2 skewed".into(),
            NoiseDistribution::new(2, vec![0.8, 0.12, 0.05, 0.03]).unwrap(),
        ),
        ("d=3 eps=0.05".into(), depolarizing(3, 0.05).unwrap()),
        ("d=5 eps=0.002".into(), depolarizing(5, 0.002).unwrap()),
    ]
}

fn three_form_agreement() -> Outcome {
    let start = Instant::now();
    let (mut worst_gp, mut worst_primal, mut points) = (0.0f64, 0.0f64, 0);
    for (_, p) in headline_channels().into_iter().chain(extra_channels()) {
        for r in rate_grid() {
            let g = exponent_gallager(r, &p)
                .map_err(|e| e.to_string())?
                .exponent;
            let pw = exponent_piecewise(r, &p)
                .map_err(|e| e.to_string())?
                .exponent;
            let primal = exponent_primal(r, &p, 0.005).map_err(|e| e.to_string())?;
            worst_gp = worst_gp.max((g - pw).abs());
            worst_primal = worst_primal.max((primal - g).abs());
            points += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        worst_gp <= 1e-9 && worst_primal <= 1e-4 && within(elapsed, 60),
        format!(
            "{points} points over 12 channels; max|gallager-piecewise| = {worst_gp:.2e} (<= 1e-9), max|primal-gallager| = {worst_primal:.2e} (<= 1e-4), {:.1}s (< 60s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn curve_anchors() -> Outcome {
    let p = depolarizing(2, 0.0025).unwrap();
    let probs = p.probs();
    let direct_e0 = 1.0 - 2.0 * probs.iter().map(|q| q.sqrt()).sum::<f64>().log2();
    let direct_r0 = 1.0
        + probs
            .iter()
            .filter(|&&q| q > 0.0)
            .map(|q| q * q.log2())
            .sum::<f64>();
    let e0 = exponent_piecewise(0.0, &p)
        .map_err(|e| e.to_string())?
        .exponent;

    // zero crossing located on the Gallager route alone
    let positive = |r: f64| exponent_gallager(r, &p).unwrap().exponent > 1e-13;
    let (mut lo, mut hi) = (0.0, 0.999);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if positive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let crossing = 0.5 * (lo + hi);

    let r1 = thresholds(&p).r1;
    let mut worst_slope = 0.0f64;
    for i in 0..=40 {
        let r = r1 * i as f64 / 40.0;
        let e = exponent_piecewise(r, &p)
            .map_err(|e| e.to_string())?
            .exponent;
        worst_slope = worst_slope.max((e + r - e0).abs());
    }
    let ok = (e0 - direct_e0).abs() <= 1e-9
        && (crossing - direct_r0).abs() <= 1e-6
        && worst_slope <= 1e-9;
    check(
        ok,
        format!(
            "E(0) = {e0:.10} vs direct {direct_e0:.10}; crossing {crossing:.8} vs 1-H(P) = {direct_r0:.8}; R1 = {r1:.6}, max|E(R)+R-E(0)| on [0,R1] = {worst_slope:.2e}"
        ),
    )
}

fn hashing_bound_positivity() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, p) in headline_channels().into_iter().chain(extra_channels()) {
        let r0 = thresholds(&p).r0;
        let mut rates = rate_grid();
        rates.extend(
            [r0 - 1e-4, r0, r0 + 1e-8]
                .iter()
                .filter(|r| (0.0..1.0).contains(*r)),
        );
        for r in rates {
            let e = exponent_piecewise(r, &p)
                .map_err(|e| e.to_string())?
                .exponent;
            let g = exponent_gallager(r, &p)
                .map_err(|e| e.to_string())?
                .exponent;
            checked += 1;
            let ok = if r >= r0 {
                e == 0.0 && g <= 1e-10
            } else if r < r0 - 1e-8 {
                e > 0.0 && (r > r0 - 1e-3 || g > 1e-10)
            } else {
                true
            };
            if !ok {
                failures.push(format!("{name} R={r}: E={e:e}, gallager={g:e}"));
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{checked} (channel, rate) pairs over 12 channels incl. R0-1e-4, R0, R0+1e-8{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; violations: {}", failures.join("; "))
            }
        ),
    )
}

fn classical_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut points = 0;
    for (_, p) in headline_channels() {
        for r in rate_grid() {
            let (er, e) = classical_gallager_check(r, &p).map_err(|e| e.to_string())?;
            worst = worst.max((er - e).abs());
            points += 1;
        }
    }
    check(
        worst <= 1e-9,
        format!("{points} points; max|E_r(R+1) - E(R)| = {worst:.2e} (<= 1e-9)"),
    )
}

fn counting_inequality() -> Outcome {
    let start = Instant::now();
    let mut cases = Vec::new();
    for n in 1..=3usize {
        for k in 0..n {
            cases.push((2u32, n, k));
        }
    }
    cases.extend([(3, 1, 0), (3, 2, 1)]);
    let mut worst_margin: Option<Ratio<u64>> = None;
    let mut violations = Vec::new();
    for &(d, n, k) in &cases {
        let field = Field::new(d).unwrap();
        let ensemble = Ensemble::exhaustive(n, k, field).map_err(|e| e.to_string())?;
        let size = ensemble.len() as u64;
        let bound = Ratio::new(1u64, (d as u64).pow((n - k) as u32));
        for (idx, &count) in ensemble.counting_counts().iter().enumerate().skip(1) {
            let ratio = Ratio::new(count, size);
            if ratio > bound {
                violations.push(format!("d={d} n={n} k={k} x#{idx}: {count}/{size}"));
            } else {
                let margin = bound - ratio;
                worst_margin = Some(worst_margin.map_or(margin, |m| m.min(margin)));
            }
        }
    }
    let ens = Ensemble::exhaustive(2, 1, f2()).map_err(|e| e.to_string())?;
    let exact = ens.counting_counts()[1..]
        .iter()
        .all(|&c| c == 6 && ens.len() == 15);
    let elapsed = start.elapsed();
    check(
        violations.is_empty() && exact && within(elapsed, 300),
        format!(
            "{} (d,n,k) cases, every x != 0; smallest slack {}; (2,2,1) ratio 6/15 for all x: {exact}; {:.1}s (< 300s){}",
            cases.len(),
            worst_margin.map_or("-".into(), |m| m.to_string()),
            elapsed.as_secs_f64(),
            if violations.is_empty() { String::new() } else { format!("; violations: {}", violations.join("; ")) }
        ),
    )
}

fn failure_bound_chain() -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut ok = true;
    for eps in [0.0025, 0.05] {
        let p = depolarizing(2, eps).unwrap();
        for n in 2..=3usize {
            let ensemble_k: Vec<usize> = (1..n).collect();
            for k in ensemble_k {
                let ensemble = Ensemble::exhaustive(n, k, f2()).map_err(|e| e.to_string())?;
                let avg = ensemble.average_failure(&p).map_err(|e| e.to_string())?;
                let identity = ensemble.failure_by_exclusion(&p);
                let chain = bound_chain(n, k, &p).map_err(|e| e.to_string())?;
                let holds = (avg - identity).abs() <= 1e-12
                    && avg <= chain.type_sum
                    && chain.type_sum <= chain.theorem_rhs;
                ok &= holds;
                rows.push(format!(
                    "eps={eps} n={n} k={k}: {avg:.6} <= {:.6} <= {:.4e}{}",
                    chain.type_sum,
                    chain.theorem_rhs,
                    if holds { "" } else { " VIOLATED" }
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        ok && within(elapsed, 600),
        format!(
            "avg = sum P|B|/|A| to 1e-12 and avg <= type-sum <= closed form: [{}], {:.1}s (< 600s)",
            rows.join("; "),
            elapsed.as_secs_f64()
        ),
    )
}

fn recovery_end_to_end() -> Outcome {
    let start = Instant::now();
    let mut members = 0;
    let mut min_overlap = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    let mut ok = true;
    for eps in [0.0025, 0.05] {
        let p = depolarizing(2, eps).unwrap();
        let mut subspaces = enumerate_isotropic(2, 1, f2()).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..50 {
            subspaces.push(sample_isotropic_with(3, 2, f2(), &mut rng).map_err(|e| e.to_string())?);
        }
        for (i, l) in subspaces.iter().enumerate() {
            let code = stabilizer_code(l).map_err(|e| e.to_string())?;
            let set = correctable_set(l).map_err(|e| e.to_string())?;
            let r = verify_correctability(&code, &set, &p, 50, 7 + i as u64)
                .map_err(|e| e.to_string())?;
            members += 1;
            min_overlap = min_overlap.min(r.min_member_overlap);
            min_margin = min_margin.min(r.min_fidelity - (1.0 - r.failure_probability));
            ok &= r.passed;
        }
    }
    let elapsed = start.elapsed();
    check(
        ok && min_overlap >= 1.0 - RECOVERY_TOLERANCE
            && min_margin >= -RECOVERY_TOLERANCE
            && within(elapsed, 600),
        format!(
            "{members} member checks (all 15 at n=2, 50 sampled at n=3, two channels), 50 states each; min overlap {min_overlap:.12}, min fidelity - (1 - failure) = {min_margin:.3e}, {:.1}s (< 600s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn types_suite() -> Outcome {
    let channels = [
        depolarizing(2, 0.0025).unwrap(),
        depolarizing(2, 0.05).unwrap(),
        NoiseDistribution::new(2, vec![0.8, 0.12, 0.05, 0.03]).unwrap(),
        NoiseDistribution::new(2, vec![0.9, 0.1, 0.0, 0.0]).unwrap(),
    ];
    let mut worst_partition = 0.0f64;
    let mut types_checked = 0;
    let mut ok = true;
    for n in 1..=6u32 {
        let types = enumerate_types(n, 4).map_err(|e| e.to_string())?;
        ok &= BigUint::from(types.len()) <= BigUint::from(n + 1).pow(3);
        for q in &types {
            // |T_Q| <= 2^{nH(Q)} = n^n / prod c^c, checked in integers
            let weight = q
                .counts()
                .iter()
                .fold(BigUint::from(1u32), |acc, &c| acc * BigUint::from(c).pow(c));
            ok &= type_class_size(q) * weight <= BigUint::from(n).pow(n);
            types_checked += 1;
        }
        for p in &channels {
            let total: f64 = types
                .iter()
                .map(|q| {
                    let lp = iid_log_probability(p, q);
                    if lp == f64::NEG_INFINITY {
                        0.0
                    } else {
                        type_class_size(q).to_string().parse::<f64>().unwrap() * 2f64.powf(lp)
                    }
                })
                .sum();
            worst_partition = worst_partition.max((total - 1.0).abs());
        }
    }
    check(
        ok && worst_partition <= 1e-9,
        format!(
            "n = 1..6, 4 channels; max|sum_Q |T_Q| P^n(T_Q) - 1| = {worst_partition:.2e} (<= 1e-9); |Q_n| and |T_Q| bounds exact over {types_checked} types: {ok}"
        ),
    )
}

fn sampling_uniformity() -> Outcome {
    let all = enumerate_isotropic(2, 1, f2()).map_err(|e| e.to_string())?;
    let position: BTreeMap<_, usize> = all
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    let mut counts = vec![0u64; all.len()];
    let samples = 1_000_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..samples {
        let l = sample_isotropic_with(2, 1, f2(), &mut rng).map_err(|e| e.to_string())?;
        counts[*position.get(&l).ok_or("sample outside the ensemble")?] += 1;
    }
    let uniform = 1.0 / all.len() as f64;
    let tv = 0.5
        * counts
            .iter()
            .map(|&c| (c as f64 / samples as f64 - uniform).abs())
            .sum::<f64>();
    // the seeded entry point draws from the same ensemble
    let seeded = sample_isotropic(2, 1, f2(), 5).map_err(|e| e.to_string())?;
    check(
        tv < 0.01 && position.contains_key(&seeded),
        format!(
            "|A| = {}, {samples} samples, TV distance {tv:.2e} (< 0.01)",
            all.len()
        ),
    )
}

fn cli_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("fidexp-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let runs: [&[&str]; 5] = [
        &[
            "exponent-curve",
            "--epsilon",
            "0.0025",
            "--rates",
            "0:0.95:0.01",
        ],
        &[
            "exponent-curve",
            "--d",
            "3",
            "--epsilon",
            "0.01",
            "--rates",
            "0:0.9:0.1",
            "--format",
            "json",
        ],
        &[
            "simulate",
            "--epsilon",
            "0.05",
            "--n",
            "3",
            "--k",
            "1",
            "--mode",
            "sampled",
            "--samples",
            "100",
            "--seed",
            "17",
        ],
        &["verify-counting", "--n", "3", "--k", "1"],
        &[
            "verify-stabilizer",
            "--epsilon",
            "0.05",
            "--n",
            "3",
            "--k",
            "1",
            "--mode",
            "sampled",
            "--samples",
            "4",
            "--seed",
            "5",
            "--trials",
            "8",
        ],
    ];
    let mut identical = 0;
    let mut problems = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let path = dir.join(format!("run{i}-{rep}"));
            let status = Command::new(env!("CARGO_BIN_EXE_fidexp"))
                .args(*args)
                .arg("--output")
                .arg(&path)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                problems.push(format!("{} exited with {status}", args[0]));
            }
            outputs.push(std::fs::read(&path).unwrap_or_default());
        }
        if !outputs[0].is_empty() && outputs[0] == outputs[1] {
            identical += 1;
        } else {
            problems.push(format!("{} differs between runs", args[0]));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    check(
        problems.is_empty(),
        format!(
            "{identical}/{} configurations byte-identical across two runs (CSV and JSON){}",
            runs.len(),
            if problems.is_empty() {
                String::new()
            } else {
                format!("; {}", problems.join("; "))
            }
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("three-form exponent agreement", three_form_agreement),
        ("curve anchors at eps=0.0025", curve_anchors),
        ("hashing-bound positivity", hashing_bound_positivity),
        ("classical random-coding equivalence", classical_equivalence),
        ("ensemble counting inequality", counting_inequality),
        ("failure bound chain", failure_bound_chain),
        ("stabilizer recovery end to end", recovery_end_to_end),
        ("method of types", types_suite),
        ("sampling uniformity", sampling_uniformity),
        ("CLI determinism", cli_determinism),
    ];
    let mut passed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => {
                passed += 1;
                println!("PASS {:>2} {name} [{secs:.1}s]: {detail}", i + 1);
            }
            Err(detail) => println!("FAIL {:>2} {name} [{secs:.1}s]: {detail}", i + 1),
        }
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
