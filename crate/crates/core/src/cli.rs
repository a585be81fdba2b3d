//! Command-line front end. Curves are written as CSV, everything else as JSON.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Error;
use crate::evolution::{midpoint_grid, probability_profile, uniform_grid, MarkedFraction, ProbabilityProfile};
use crate::fit::{fit_schedule, unit_roots_and_minima, FitConfig, Objective};
use crate::iteration::{min_lambda_estimate, optimal_iterations, p_min_envelope, unity_roots_single_phase};
use crate::schedule::{PhasePair, PhaseSchedule};
use crate::schemes::{classical_probability, schedule_equivalence_gap};
use crate::statevector::{cross_check, MarkedSet};
use crate::two_pair::{discriminant, solve_phases_for_roots};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;

/// Contract for the full-state comparison.
pub const CROSS_CHECK_TOL: f64 = 1e-10;
/// Contract for the Long-scheme probability comparison.
pub const EQUIVALENCE_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "phasematch",
    version,
    about = "Phase-matched quantum search: curves, fits and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Success probability of every stage of a schedule on a λ grid (CSV).
    Profile(ProfileArgs),
    /// Fit k matched phases to P = 1 over a λ range.
    Fit(FitArgs),
    /// Two-step phases with unit success at two given fractions.
    Solve2(Solve2Args),
    /// Unit roots and local minima of the final stage of a schedule.
    Roots(RootsArgs),
    /// Repetition of one matched step: unit roots, estimates, Grover counts.
    Iterate(IterateArgs),
    /// Lower envelope of repeated single-phase curves (CSV).
    Envelope(EnvelopeArgs),
    /// Classical sampling baseline (CSV).
    Classical(ClassicalArgs),
    /// Compare the reduced model against a full state-vector simulation.
    Verify(VerifyArgs),
    /// Compare probabilities with the (θ, φ) phase-operator form.
    Equiv(EquivArgs),
}

#[derive(Debug, Args, Default)]
pub struct ScheduleArgs {
    /// Oracle phases in radians, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Option<Vec<f64>>,
    /// Diffusion phases; defaults to the matching rule β_j = −α_{k−j+1}.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "alphas")]
    pub betas: Option<Vec<f64>>,
    /// JSON file with `alphas` and `betas` arrays.
    #[arg(long, conflicts_with = "alphas")]
    pub schedule: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Repeat the schedule this many times.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// λ grid as min:max:count.
    #[arg(long, default_value = "0:1:1001")]
    pub grid: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Squares,
    Absolute,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "0.1:1:512")]
    pub grid: String,
    /// Use the centres of `count` equal cells of [min, max] instead of a grid with endpoints.
    #[arg(long)]
    pub midpoint: bool,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, value_enum, default_value = "squares")]
    pub objective: ObjectiveArg,
    /// Report destination (JSON); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fitted profile on the fit grid (CSV).
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Solve2Args {
    /// Target fractions λ₁,λ₂ with P = 1.
    #[arg(long, value_delimiter = ',')]
    pub roots: Option<Vec<f64>>,
    /// Dump the discriminant on an n×n grid of (α₁, α₂) ∈ [0, π] × [−π, π] (CSV).
    #[arg(long)]
    pub surface: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// λ interval as min:max.
    #[arg(long, default_value = "0:1")]
    pub bracket: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[arg(long, default_value_t = PI, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long)]
    pub k: u32,
    /// Also report optimal Grover iteration counts at this fraction.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0,0.785398163397448,1.5707963267949,2.35619449019234,3.04159265358979"
    )]
    pub alphas: Vec<f64>,
    #[arg(long, default_value = "0:1:201")]
    pub grid: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    /// Number of items N.
    #[arg(long)]
    pub total: u64,
    /// Number of marked items M.
    #[arg(long)]
    pub marked: u64,
    /// Largest number of draws.
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Qubit count.
    #[arg(long)]
    pub n: u32,
    /// Marked count (random indices) or comma-separated indices.
    #[arg(long)]
    pub marked: String,
    /// Length of the random schedule used when none is given.
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Fraction at which to compare; random fractions when absent.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Random cases when no schedule is given.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Largest random schedule length.
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Infeasible(_) | Error::Degenerate(_) | Error::OutOfDomain(_) => EXIT_INFEASIBLE,
            Error::InvalidArgument(_) | Error::ResourceBound(_) | Error::Parse { .. } => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parse `args` and run; returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Outcome {
    match command {
        Command::Profile(a) => cmd_profile(a, stdout),
        Command::Fit(a) => cmd_fit(a, stdout),
        Command::Solve2(a) => cmd_solve2(a, stdout),
        Command::Roots(a) => cmd_roots(a, stdout),
        Command::Iterate(a) => cmd_iterate(a, stdout),
        Command::Envelope(a) => cmd_envelope(a, stdout),
        Command::Classical(a) => cmd_classical(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Equiv(a) => cmd_equiv(a, stdout),
    }
}

/// `%.{digits}g`-style formatting, independent of locale.
pub fn format_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt12(x: f64) -> String {
    format_g(x, 12)
}

/// Parse `min:max:count` with `min < max` and `count >= 2`.
pub fn parse_grid(spec: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid must be min:max:count, got '{spec}'"));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("bad grid minimum '{}'", parts[0]))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("bad grid maximum '{}'", parts[1]))?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("bad grid count '{}'", parts[2]))?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(format!("grid needs min < max, got {lo}:{hi}"));
    }
    if n < 2 {
        return Err(format!("grid needs at least 2 points, got {n}"));
    }
    if lo < 0.0 || hi > 1.0 {
        return Err(format!("grid must lie in [0, 1], got {lo}:{hi}"));
    }
    Ok(uniform_grid(lo, hi, n))
}

fn parse_interval(spec: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = spec
        .split_once(':')
        .ok_or_else(|| format!("interval must be min:max, got '{spec}'"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad interval minimum '{a}'"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad interval maximum '{b}'"))?;
    Ok((lo, hi))
}

fn load_schedule(args: &ScheduleArgs) -> std::result::Result<Option<PhaseSchedule>, Failure> {
    if let Some(path) = &args.schedule {
        let text =
            fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        let s = PhaseSchedule::from_json(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        return Ok(Some(s));
    }
    match (&args.alphas, &args.betas) {
        (Some(a), Some(b)) => Ok(Some(PhaseSchedule::from_phases(a, b)?)),
        (Some(a), None) => {
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Failure::usage("phases must be finite"));
            }
            Ok(Some(PhaseSchedule::matched(a)))
        }
        _ => Ok(None),
    }
}

fn require_schedule(args: &ScheduleArgs) -> std::result::Result<PhaseSchedule, Failure> {
    match load_schedule(args)? {
        Some(s) if !s.is_empty() => Ok(s),
        _ => Err(Failure::usage(
            "a nonempty schedule is required (--alphas or --schedule)",
        )),
    }
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, text: &str) -> std::result::Result<(), Failure> {
    match out {
        Some(path) => write_file(path, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("write failed: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// CSV with header `lambda,P1,...,Pk`.
pub fn profile_csv(profile: &ProbabilityProfile) -> String {
    let k = profile.stage_count();
    let mut s = String::from("lambda");
    for j in 1..=k {
        s.push_str(&format!(",P{j}"));
    }
    s.push('\n');
    for (i, &l) in profile.lambdas.iter().enumerate() {
        s.push_str(&fmt12(l));
        for stage in &profile.stages {
            s.push(',');
            s.push_str(&fmt12(stage[i]));
        }
        s.push('\n');
    }
    s
}

fn cmd_profile(a: ProfileArgs, stdout: &mut dyn Write) -> Outcome {
    let base = require_schedule(&a.schedule)?;
    if a.k == 0 {
        return Err(Failure::usage("--k must be at least 1"));
    }
    let grid = parse_grid(&a.grid).map_err(Failure::usage)?;
    let profile = probability_profile(&base.cycled(a.k), &grid)?;
    emit(&a.out, stdout, &profile_csv(&profile))?;
    Ok(EXIT_OK)
}

fn cmd_fit(a: FitArgs, stdout: &mut dyn Write) -> Outcome {
    if a.k == 0 {
        return Err(Failure::usage("--k must be at least 1"));
    }
    let mut grid = parse_grid(&a.grid).map_err(Failure::usage)?;
    if a.midpoint {
        grid = midpoint_grid(grid[0], grid[grid.len() - 1], grid.len());
    }
    let objective = match a.objective {
        ObjectiveArg::Squares => Objective::SumOfSquares,
        ObjectiveArg::Absolute => Objective::SumOfAbsolute,
    };
    let config = FitConfig::new(a.k, a.seed)
        .with_grid(grid.clone())
        .with_restarts(a.restarts)
        .with_objective(objective);
    let report = fit_schedule(&config)?;
    let mut text = report.to_json();
    text.push('\n');
    emit(&a.out, stdout, &text)?;
    if let Some(path) = &a.profile_out {
        let profile = probability_profile(&report.schedule(), &grid)?;
        write_file(path, &profile_csv(&profile))?;
    }
    Ok(if report.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn cmd_solve2(a: Solve2Args, stdout: &mut dyn Write) -> Outcome {
    match (a.roots, a.surface) {
        (Some(r), None) => {
            if r.len() != 2 {
                return Err(Failure::usage("--roots needs exactly two fractions"));
            }
            let sols = solve_phases_for_roots(MarkedFraction::new(r[0])?, MarkedFraction::new(r[1])?)?;
            let list: Vec<Value> = sols
                .iter()
                .map(|s| json!({ "alpha1": s.alpha1, "alpha2": s.alpha2, "beta1": s.beta1(), "beta2": s.beta2() }))
                .collect();
            emit(
                &a.out,
                stdout,
                &json_text(&json!({ "lambda_roots": r, "solutions": list })),
            )?;
            Ok(EXIT_OK)
        }
        (None, Some(n)) => {
            if n < 2 {
                return Err(Failure::usage("--surface needs at least 2 points per axis"));
            }
            let mut s = String::from("alpha1,alpha2,discriminant\n");
            for a1 in uniform_grid(0.0, PI, n) {
                for a2 in uniform_grid(-PI, PI, n) {
                    let d = discriminant(a1, a2);
                    s.push_str(&format!("{},{},{}\n", fmt12(a1), fmt12(a2), fmt12(d.value)));
                }
            }
            emit(&a.out, stdout, &s)?;
            Ok(EXIT_OK)
        }
        _ => Err(Failure::usage("give exactly one of --roots or --surface")),
    }
}

fn cmd_roots(a: RootsArgs, stdout: &mut dyn Write) -> Outcome {
    let schedule = require_schedule(&a.schedule)?;
    let bracket = parse_interval(&a.bracket).map_err(Failure::usage)?;
    let l = unit_roots_and_minima(&schedule, bracket)?;
    let minima: Vec<Value> = l
        .local_minima
        .iter()
        .map(|(x, p)| json!({ "lambda": x, "p": p }))
        .collect();
    emit(
        &a.out,
        stdout,
        &json_text(&json!({ "unit_roots": l.unit_roots, "local_minima": minima })),
    )?;
    Ok(EXIT_OK)
}

fn cmd_iterate(a: IterateArgs, stdout: &mut dyn Write) -> Outcome {
    let roots = unity_roots_single_phase(a.alpha, a.k)?;
    let estimate = min_lambda_estimate(a.alpha, a.k)?;
    let mut v = json!({
        "alpha": a.alpha,
        "k": a.k,
        "unity_roots": roots,
        "smallest_root": roots.first(),
        "min_lambda_estimate": estimate,
    });
    if let Some(l) = a.lambda {
        let q = optimal_iterations(MarkedFraction::new(l)?)?;
        v["grover"] = json!({
            "lambda": l,
            "continuous": q.continuous,
            "optimal_iterations": q.rounded,
            "large_k_estimate": q.large_k_estimate,
        });
    }
    emit(&a.out, stdout, &json_text(&v))?;
    Ok(EXIT_OK)
}

fn cmd_envelope(a: EnvelopeArgs, stdout: &mut dyn Write) -> Outcome {
    let grid = parse_grid(&a.grid).map_err(Failure::usage)?;
    if a.alphas.is_empty() {
        return Err(Failure::usage("--alphas must not be empty"));
    }
    let mut s = String::from("lambda");
    for alpha in &a.alphas {
        s.push_str(&format!(",Pmin[{}]", fmt12(*alpha)));
    }
    s.push('\n');
    for &l in &grid {
        s.push_str(&fmt12(l));
        for &alpha in &a.alphas {
            let e = p_min_envelope(MarkedFraction::new(l)?, alpha);
            s.push(',');
            s.push_str(&fmt12(e.value));
        }
        s.push('\n');
    }
    emit(&a.out, stdout, &s)?;
    Ok(EXIT_OK)
}

fn cmd_classical(a: ClassicalArgs, stdout: &mut dyn Write) -> Outcome {
    if a.k == 0 {
        return Err(Failure::usage("--k must be at least 1"));
    }
    let mut s = String::from("k,exact,approximation,exhausted\n");
    for k in 1..=a.k {
        let c = classical_probability(a.marked, a.total, k)?;
        s.push_str(&format!(
            "{k},{},{},{}\n",
            fmt12(c.exact),
            fmt12(c.approximation),
            c.exhausted
        ));
    }
    emit(&a.out, stdout, &s)?;
    Ok(EXIT_OK)
}

fn random_schedule(rng: &mut ChaCha8Rng, k: usize) -> PhaseSchedule {
    let pairs = (0..k)
        .map(|_| PhasePair::new(rng.random_range(-PI..PI), rng.random_range(-PI..PI)))
        .collect();
    PhaseSchedule::new(pairs)
}

fn parse_marked(spec: &str, n: u32, seed: u64) -> std::result::Result<MarkedSet, Failure> {
    if spec.contains(',') {
        let indices = spec
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::usage(format!("bad marked index '{t}'")))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(MarkedSet::new(n, indices)?)
    } else {
        let count: usize = spec
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("bad marked count '{spec}'")))?;
        Ok(MarkedSet::random(n, count, seed)?)
    }
}

fn cmd_verify(a: VerifyArgs, stdout: &mut dyn Write) -> Outcome {
    let marked = parse_marked(&a.marked, a.n, a.seed)?;
    let schedule = match load_schedule(&a.schedule)? {
        Some(s) => s,
        None => {
            if a.k == 0 {
                return Err(Failure::usage("--k must be at least 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            random_schedule(&mut rng, a.k)
        }
    };
    let report = cross_check(&schedule, &marked)?;
    let equivalence = schedule_equivalence_gap(schedule.pairs(), marked.fraction())?;
    let ok = report.within(CROSS_CHECK_TOL) && equivalence <= EQUIVALENCE_TOL;
    let v = json!({
        "n": a.n,
        "marked": marked.len(),
        "lambda": marked.fraction().value(),
        "schedule": { "alphas": schedule.alphas(), "betas": schedule.betas() },
        "full_probabilities": report.full_probabilities,
        "reduced_probabilities": report.reduced_probabilities,
        "max_gap": report.max_gap,
        "marked_spread": report.marked_spread,
        "unmarked_spread": report.unmarked_spread,
        "equivalence_gap": equivalence,
        "pass": ok,
    });
    emit(&a.out, stdout, &json_text(&v))?;
    Ok(if ok { EXIT_OK } else { EXIT_CONTRACT })
}

fn cmd_equiv(a: EquivArgs, stdout: &mut dyn Write) -> Outcome {
    let given = load_schedule(&a.schedule)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    match given {
        Some(s) => {
            let lambdas = match a.lambda {
                Some(l) => vec![l],
                None => uniform_grid(0.0, 1.0, 101),
            };
            for l in lambdas {
                worst = worst.max(schedule_equivalence_gap(s.pairs(), MarkedFraction::new(l)?)?);
                cases += 1;
            }
        }
        None => {
            if a.k == 0 || a.samples == 0 {
                return Err(Failure::usage("--k and --samples must be at least 1"));
            }
            for _ in 0..a.samples {
                let k = rng.random_range(1..=a.k);
                let s = random_schedule(&mut rng, k);
                let l = match a.lambda {
                    Some(l) => l,
                    None => rng.random_range(0.0..=1.0),
                };
                worst = worst.max(schedule_equivalence_gap(s.pairs(), MarkedFraction::new(l)?)?);
                cases += 1;
            }
        }
    }
    let ok = worst <= EQUIVALENCE_TOL;
    emit(
        &a.out,
        stdout,
        &json_text(&json!({ "cases": cases, "max_probability_gap": worst, "pass": ok })),
    )?;
    Ok(if ok { EXIT_OK } else { EXIT_CONTRACT })
}
