//! Command-line front end. Every command builds its whole artifact in memory
//! and writes it once, so identical inputs give byte-identical files.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::codes::{
    bound_chain, correctable_set, ensemble_average_failure, BoundChain, Ensemble, SamplingMode,
};
use crate::error::{Error, Result};
use crate::exponent::{
    depolarizing, exponent_gallager, exponent_piecewise, theorem_fidelity_bound, thresholds,
    ExponentPoint, Thresholds,
};
use crate::pauli::{stabilizer_code, verify_correctability, CorrectabilityReport};
use crate::symplectic::{enumerate_isotropic, sample_isotropic_with, Field, SymplecticVector};
use crate::types::NoiseDistribution;

pub const TOOL: &str = "fidexp";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest tolerated `|gallager - piecewise|` on an emitted curve row.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-9;
/// Relative slack for the bound-chain comparisons in `verify-theorem`.
pub const CHAIN_TOLERANCE: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(
    name = "fidexp",
    version,
    about = "Error exponents and desk-scale verification for random stabilizer codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate E(R, P) over a rate grid.
    ExponentCurve {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value = "0:0.95:0.01")]
        rates: RateGrid,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Report R0, R1 and the hashing bound of a channel.
    Thresholds {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ensemble-average failure probability, exhaustive or sampled.
    Simulate {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check |A(x)|/|A| <= d^-(n-k) for every nonzero x.
    VerifyCounting {
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the failure-probability bound chain exhaustively.
    VerifyTheorem {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulate syndrome recovery with dense Pauli matrices.
    VerifyStabilizer {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// random code states per ensemble member
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ChannelArgs {
    /// local dimension (prime); taken from the file when --dist is given
    #[arg(long)]
    pub d: Option<u32>,
    /// depolarizing parameter: P(0,0) = 1 - (d^2-1) eps, eps elsewhere
    #[arg(long, conflicts_with = "dist", required_unless_present = "dist")]
    pub epsilon: Option<f64>,
    /// JSON distribution file {"d": .., "probs": [..]}
    #[arg(long)]
    pub dist: Option<PathBuf>,
}

impl ChannelArgs {
    pub fn resolve(&self) -> Result<NoiseDistribution> {
        match (&self.dist, self.epsilon) {
            (Some(path), None) => {
                let p = NoiseDistribution::load(path)?;
                match self.d {
                    Some(d) if d != p.d() => Err(Error::InvalidArgument(format!(
                        "--d {} disagrees with d = {} in {}",
                        d,
                        p.d(),
                        path.display()
                    ))),
                    _ => Ok(p),
                }
            }
            (None, Some(eps)) => depolarizing(self.d.unwrap_or(2), eps),
            _ => Err(Error::InvalidArgument(
                "give exactly one of --epsilon and --dist".into(),
            )),
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct CodeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum Mode {
    #[default]
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SamplingArgs {
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SamplingArgs {
    fn sampling_mode(&self) -> Result<SamplingMode> {
        match self.mode {
            Mode::Exhaustive => Ok(SamplingMode::Exhaustive),
            Mode::Sampled if self.samples == 0 => Err(Error::InvalidArgument(
                "--samples must be at least 1 in sampled mode".into(),
            )),
            Mode::Sampled => Ok(SamplingMode::Sampled {
                samples: self.samples,
                seed: self.seed,
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// output file; stdout when absent
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv for exponent-curve and verify-counting, json otherwise, by default
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// `start:stop:step` with `step > 0` and `0 <= start <= stop < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FromStr for RateGrid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:step, got {:?}", s));
        }
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {:?}: {}", t, e))
        };
        let grid = RateGrid {
            start: parse(parts[0])?,
            stop: parse(parts[1])?,
            step: parse(parts[2])?,
        };
        if !(grid.step > 0.0 && grid.step.is_finite()) {
            return Err("step must be positive".into());
        }
        if !(0.0 <= grid.start && grid.start <= grid.stop && grid.stop < 1.0) {
            return Err("need 0 <= start <= stop < 1".into());
        }
        Ok(grid)
    }
}

impl RateGrid {
    /// `start + i step` for every `i` landing at or below `stop` (up to a
    /// tiny slack so that decimal grids include their endpoint).
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| (self.start + i as f64 * self.step).min(self.stop))
            .collect()
    }
}

/// `%.12g`-style decimal: `sig` significant digits, trailing zeros removed,
/// scientific notation outside `[1e-4, 10^sig)`.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", mantissa, sign, exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g(x: f64) -> String {
    format_sig(x, 12)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: Option<u64>,
    #[serde(flatten)]
    body: T,
}

fn to_json<T: Serialize>(command: &str, seed: Option<u64>, body: T) -> Result<String> {
    let envelope = Envelope {
        tool: TOOL,
        version: VERSION,
        command,
        seed,
        body,
    };
    let mut s = serde_json::to_string_pretty(&envelope)
        .map_err(|e| Error::InvariantViolation(format!("serialization failed: {}", e)))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
pub struct CurveReport {
    pub d: u32,
    pub probs: Vec<f64>,
    pub rates: RateGrid,
    pub thresholds: Thresholds,
    pub points: Vec<ExponentPoint>,
}

/// Curve rows in ascending `R`, each cross-checked against the Gallager
/// form; rows must also be non-increasing in `E`.
pub fn exponent_curve(p: &NoiseDistribution, rates: &[f64]) -> Result<Vec<ExponentPoint>> {
    let mut sorted = rates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut points: Vec<ExponentPoint> = Vec::with_capacity(sorted.len());
    for r in sorted {
        let point = exponent_piecewise(r, p)?;
        let check = exponent_gallager(r, p)?;
        if (point.exponent - check.exponent).abs() > CROSS_CHECK_TOLERANCE {
            return Err(Error::InvariantViolation(format!(
                "at R = {}: piecewise E = {} but Gallager E = {}",
                g(r),
                g(point.exponent),
                g(check.exponent)
            )));
        }
        if let Some(prev) = points.last() {
            if point.exponent > prev.exponent + CROSS_CHECK_TOLERANCE {
                return Err(Error::InvariantViolation(format!(
                    "E increases from {} at R = {} to {} at R = {}",
                    g(prev.exponent),
                    g(prev.rate),
                    g(point.exponent),
                    g(r)
                )));
            }
        }
        points.push(point);
    }
    Ok(points)
}

pub fn curve_csv(points: &[ExponentPoint]) -> String {
    let mut s = String::from("R,E,regime,delta_star\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            g(p.rate),
            g(p.exponent),
            p.regime.as_str(),
            g(p.delta_star)
        );
    }
    s
}

#[derive(Serialize)]
struct ThresholdReport {
    d: u32,
    probs: Vec<f64>,
    #[serde(flatten)]
    thresholds: Thresholds,
}

#[derive(Serialize)]
struct SimulationReport {
    #[serde(flatten)]
    ensemble: crate::codes::EnsembleReport,
    theorem_fidelity_bound: f64,
    vacuous: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingRow {
    pub x: String,
    pub count: u64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingReport {
    pub d: u32,
    pub n: usize,
    pub k: usize,
    pub ensemble_size: u64,
    pub bound: f64,
    pub max_count: u64,
    pub max_ratio: f64,
    pub holds: bool,
    pub rows: Vec<CountingRow>,
}

/// Exhaustive `|A(x)| / |A|` for every nonzero `x`, in index order.
pub fn counting_report(d: u32, n: usize, k: usize) -> Result<CountingReport> {
    let field = Field::new(d)?;
    if n == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "verify-counting needs 0 <= k < n, got n={}, k={}",
            n, k
        )));
    }
    let ensemble = Ensemble::exhaustive(n, k, field)?;
    let size = ensemble.len() as u64;
    let counts = ensemble.counting_counts();
    let bound = Ratio::new(1u64, (d as u64).pow((n - k) as u32));
    let mut holds = true;
    let mut max_count = 0;
    let rows: Vec<CountingRow> = counts
        .iter()
        .enumerate()
        .skip(1)
        .map(|(idx, &count)| {
            holds &= Ratio::new(count, size) <= bound;
            max_count = max_count.max(count);
            CountingRow {
                x: SymplecticVector::from_index(idx, n, field).to_string(),
                count,
                ratio: count as f64 / size as f64,
            }
        })
        .collect();
    Ok(CountingReport {
        d,
        n,
        k,
        ensemble_size: size,
        bound: *bound.numer() as f64 / *bound.denom() as f64,
        max_count,
        max_ratio: max_count as f64 / size as f64,
        holds,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub d: u32,
    pub n: usize,
    pub k: usize,
    pub probs: Vec<f64>,
    pub ensemble_size: usize,
    pub avg_failure: f64,
    /// `sum_x P^n(x) |B(x)| / |A|`, which must equal `avg_failure`
    pub avg_failure_by_exclusion: f64,
    pub chain: BoundChain,
    pub theorem_fidelity_bound: f64,
    pub vacuous: bool,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

/// Exhaustive average failure against every line of the bound chain.
pub fn theorem_report(n: usize, k: usize, p: &NoiseDistribution) -> Result<TheoremReport> {
    let ensemble = Ensemble::exhaustive(n, k, p.field())?;
    let avg = ensemble.average_failure(p)?;
    let by_exclusion = ensemble.failure_by_exclusion(p);
    let chain = bound_chain(n, k, p)?;
    let fidelity = theorem_fidelity_bound(n as u32, k as u32, p)?;
    let violation = if (avg - by_exclusion).abs() > CHAIN_TOLERANCE {
        Some(format!(
            "avg_failure {} differs from the exclusion sum {}",
            g(avg),
            g(by_exclusion)
        ))
    } else if avg > chain.pointwise + CHAIN_TOLERANCE {
        Some(format!(
            "avg_failure {} exceeds pointwise bound {}",
            g(avg),
            g(chain.pointwise)
        ))
    } else {
        chain
            .first_violation(CHAIN_TOLERANCE)
            .map(|(a, b)| format!("bound line {} exceeds {}", a, b))
    };
    Ok(TheoremReport {
        d: p.d(),
        n,
        k,
        probs: p.probs().to_vec(),
        ensemble_size: ensemble.len(),
        avg_failure: avg,
        avg_failure_by_exclusion: by_exclusion,
        chain,
        theorem_fidelity_bound: fidelity,
        vacuous: fidelity <= 0.0,
        holds: violation.is_none(),
        violation,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizerRow {
    pub member: usize,
    pub basis: Vec<String>,
    #[serde(flatten)]
    pub report: CorrectabilityReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizerReport {
    pub d: u32,
    pub n: usize,
    pub k: usize,
    pub probs: Vec<f64>,
    pub mode: &'static str,
    pub trials: usize,
    pub passed: bool,
    pub members: Vec<StabilizerRow>,
}

/// Dense-matrix recovery check over all ensemble members, or over
/// `samples` uniformly drawn ones.
pub fn stabilizer_report(
    n: usize,
    k: usize,
    p: &NoiseDistribution,
    mode: SamplingMode,
    trials: usize,
) -> Result<StabilizerReport> {
    if n == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need n >= 1 and 0 <= k <= n, got n={}, k={}",
            n, k
        )));
    }
    let field = p.field();
    let (subspaces, seed, mode_name) = match mode {
        SamplingMode::Exhaustive => (enumerate_isotropic(n, n - k, field)?, 0, "exhaustive"),
        SamplingMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let drawn = (0..samples)
                .map(|_| sample_isotropic_with(n, n - k, field, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            (drawn, seed, "sampled")
        }
    };
    let mut members = Vec::with_capacity(subspaces.len());
    for (i, l) in subspaces.iter().enumerate() {
        let code = stabilizer_code(l)?;
        let set = correctable_set(l)?;
        let report = verify_correctability(
            &code,
            &set,
            p,
            trials,
            seed.wrapping_add(1).wrapping_add(i as u64),
        )?;
        members.push(StabilizerRow {
            member: i,
            basis: l.basis().iter().map(|b| b.to_string()).collect(),
            report,
        });
    }
    Ok(StabilizerReport {
        d: field.order(),
        n,
        k,
        probs: p.probs().to_vec(),
        mode: mode_name,
        trials,
        passed: members.iter().all(|m| m.report.passed),
        members,
    })
}

/// Exit status for an error: 2 bad input, 3 too large, 4 invariant, 5 I/O.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InstanceTooLarge { .. } => 3,
        Error::InvariantViolation(_) | Error::NotIsotropic => 4,
        Error::Io(_) => 5,
        Error::NotPrime(_)
        | Error::DimensionMismatch(_)
        | Error::InvalidArgument(_)
        | Error::InvalidDistribution(_)
        | Error::Parse(_) => 2,
    }
}

/// Rendered artifact plus an optional failure to report after writing it.
struct Outcome {
    text: String,
    failure: Option<Error>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self {
            text,
            failure: None,
        }
    }
}

fn execute(command: &Command) -> Result<(Outcome, &OutputArgs)> {
    match command {
        Command::ExponentCurve {
            channel,
            rates,
            output,
        } => {
            let p = channel.resolve()?;
            let points = exponent_curve(&p, &rates.points())?;
            let text = match output.format.unwrap_or(Format::Csv) {
                Format::Csv => curve_csv(&points),
                Format::Json => to_json(
                    "exponent-curve",
                    None,
                    CurveReport {
                        d: p.d(),
                        probs: p.probs().to_vec(),
                        rates: *rates,
                        thresholds: thresholds(&p),
                        points,
                    },
                )?,
            };
            Ok((Outcome::ok(text), output))
        }
        Command::Thresholds { channel, output } => {
            let p = channel.resolve()?;
            let t = thresholds(&p);
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Csv => format!(
                    "R0,R1,hashing_bound\n{},{},{}\n",
                    g(t.r0),
                    g(t.r1),
                    g(t.hashing_bound)
                ),
                Format::Json => to_json(
                    "thresholds",
                    None,
                    ThresholdReport {
                        d: p.d(),
                        probs: p.probs().to_vec(),
                        thresholds: t,
                    },
                )?,
            };
            Ok((Outcome::ok(text), output))
        }
        Command::Simulate {
            channel,
            code,
            sampling,
            output,
        } => {
            let p = channel.resolve()?;
            let mut report =
                ensemble_average_failure(code.n, code.k, &p, sampling.sampling_mode()?)?;
            let fidelity = theorem_fidelity_bound(code.n as u32, code.k as u32, &p)?;
            let seed = (sampling.mode == Mode::Sampled).then_some(sampling.seed);
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Csv => {
                    let opt = |x: Option<String>| x.unwrap_or_default();
                    format!(
                        "n,k,d,mode,ensemble_size,avg_failure,std_error,intermediate_bound,theorem_bound_rhs,vacuous,samples,seed\n{},{},{},{},{},{},{},{},{},{},{},{}\n",
                        report.n,
                        report.k,
                        report.d,
                        report.mode,
                        report.ensemble_size,
                        g(report.avg_failure),
                        opt(report.std_error.map(g)),
                        g(report.intermediate_bound),
                        g(report.theorem_bound_rhs),
                        fidelity <= 0.0,
                        opt(report.sample_count.map(|s| s.to_string())),
                        opt(report.seed.map(|s| s.to_string())),
                    )
                }
                Format::Json => to_json("simulate", seed, {
                    // the envelope already carries the seed
                    report.seed = None;
                    SimulationReport {
                        ensemble: report,
                        theorem_fidelity_bound: fidelity,
                        vacuous: fidelity <= 0.0,
                    }
                })?,
            };
            Ok((Outcome::ok(text), output))
        }
        Command::VerifyCounting { d, code, output } => {
            let report = counting_report(*d, code.n, code.k)?;
            let failure = (!report.holds).then(|| {
                Error::InvariantViolation(format!(
                    "max |A(x)|/|A| = {} exceeds {}",
                    g(report.max_ratio),
                    g(report.bound)
                ))
            });
            let text = match output.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut s = String::from("x,count,ensemble_size,ratio,bound\n");
                    for row in &report.rows {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{}",
                            row.x,
                            row.count,
                            report.ensemble_size,
                            g(row.ratio),
                            g(report.bound)
                        );
                    }
                    s
                }
                Format::Json => to_json("verify-counting", None, &report)?,
            };
            Ok((Outcome { text, failure }, output))
        }
        Command::VerifyTheorem {
            channel,
            code,
            output,
        } => {
            let p = channel.resolve()?;
            let report = theorem_report(code.n, code.k, &p)?;
            let failure = report.violation.clone().map(Error::InvariantViolation);
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Csv => {
                    let mut s = String::from("quantity,value\n");
                    let _ = writeln!(s, "avg_failure,{}", g(report.avg_failure));
                    let _ = writeln!(
                        s,
                        "avg_failure_by_exclusion,{}",
                        g(report.avg_failure_by_exclusion)
                    );
                    for (name, value) in report.chain.lines() {
                        let _ = writeln!(s, "{},{}", name, g(value));
                    }
                    let _ = writeln!(
                        s,
                        "theorem_fidelity_bound,{}",
                        g(report.theorem_fidelity_bound)
                    );
                    s
                }
                Format::Json => to_json("verify-theorem", None, &report)?,
            };
            Ok((Outcome { text, failure }, output))
        }
        Command::VerifyStabilizer {
            channel,
            code,
            sampling,
            trials,
            output,
        } => {
            let p = channel.resolve()?;
            let report = stabilizer_report(code.n, code.k, &p, sampling.sampling_mode()?, *trials)?;
            let failure = (!report.passed)
                .then(|| Error::InvariantViolation("recovery check failed for some member".into()));
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Csv => {
                    let mut s = String::from(
                        "member,basis,min_member_overlap,min_fidelity,failure_probability,passed\n",
                    );
                    for m in &report.members {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{},{}",
                            m.member,
                            m.basis.join(" "),
                            g(m.report.min_member_overlap),
                            g(m.report.min_fidelity),
                            g(m.report.failure_probability),
                            m.report.passed
                        );
                    }
                    s
                }
                Format::Json => to_json("verify-stabilizer", Some(sampling.seed), &report)?,
            };
            Ok((Outcome { text, failure }, output))
        }
    }
}

fn emit(text: &str, output: &OutputArgs) -> Result<()> {
    match &output.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit status.
/// Diagnostics go to stderr.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}: error: {}", TOOL, e);
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let (outcome, output) = execute(&cli.command)?;
    emit(&outcome.text, output)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(0.1 + 0.2, 12), "0.3");
        assert_eq!(format_sig(0.606198442, 12), "0.606198442");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(1.5e-5, 12), "1.5e-05");
        assert_eq!(format_sig(-2.5e-12, 12), "-2.5e-12");
        assert_eq!(format_sig(0.0001, 12), "0.0001");
        assert_eq!(format_sig(123456789012345.0, 12), "1.23456789012e+14");
        assert_eq!(format_sig(99.99999999999999, 12), "100");
    }

    #[test]
    fn rate_grid_parsing() {
        let grid: RateGrid = "0:0.95:0.01".parse().unwrap();
        let pts = grid.points();
        assert_eq!(pts.len(), 96);
        assert_eq!(pts[0], 0.0);
        assert!((pts[95] - 0.95).abs() < 1e-12);
        assert_eq!(
            "0.2:0.2:0.1".parse::<RateGrid>().unwrap().points(),
            vec![0.2]
        );
        for bad in [
            "0:1:0.1",
            "0.5:0.4:0.1",
            "0:0.5:0",
            "0:0.5",
            "a:b:c",
            "-0.1:0.5:0.1",
        ] {
            assert!(bad.parse::<RateGrid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
        assert_eq!(
            exit_code(&Error::InstanceTooLarge {
                what: "x",
                predicted: 2,
                cap: 1
            }),
            3
        );
        assert_eq!(exit_code(&Error::InvariantViolation("x".into())), 4);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), 5);
    }

    #[test]
    fn empty_curve_is_header_only() {
        assert_eq!(curve_csv(&[]), "R,E,regime,delta_star\n");
    }

    #[test]
    fn counting_example() {
        let r = counting_report(2, 2, 1).unwrap();
        assert_eq!(r.ensemble_size, 15);
        assert_eq!(r.max_count, 6);
        assert!((r.max_ratio - 0.4).abs() < 1e-15);
        assert_eq!(r.bound, 0.5);
        assert!(r.holds);
        assert_eq!(r.rows.len(), 15);
    }

    #[test]
    fn both_channel_sources_rejected() {
        let err = Cli::try_parse_from([
            "fidexp",
            "thresholds",
            "--epsilon",
            "0.01",
            "--dist",
            "p.json",
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = Cli::try_parse_from(["fidexp", "thresholds"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn noiseless_thresholds() {
        let p = NoiseDistribution::noiseless(2).unwrap();
        let t = thresholds(&p);
        assert_eq!((t.r0, t.r1), (1.0, 1.0));
    }
}
