//! Fitting matched schedules to a flat unit success probability, and the
//! landscape analysis (unit roots, local minima, stage curves) used to
//! compare schedules.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{
    apply_schedule, probability_profile, uniform_grid, validate_grid, MarkedFraction, ProbabilityProfile,
};
use crate::nelder_mead::{minimize, Minimum, NelderMeadOptions};
use crate::operator::Amplitudes;
use crate::roots::{bisect, golden_min, local_min_brackets, sign_change_brackets};
use crate::schedule::{PhasePair, PhaseSchedule};

pub const DEFAULT_GRID_POINTS: usize = 512;
pub const DEFAULT_GRID_MIN: f64 = 0.1;
pub const DEFAULT_RESTARTS: usize = 32;
pub const MIN_GRID_POINTS: usize = 10;
/// Scan resolution for root and minimum detection.
pub const SCAN_POINTS: usize = 20_000;
pub const REFINE_TOL: f64 = 1e-10;
/// Accepted `|1 − P|` at a reported unit root.
pub const UNIT_ROOT_TOL: f64 = 1e-8;
/// Extra simplex runs started from each restart's result.
const POLISH_ROUNDS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `Σ (1 − P)²`.
    #[default]
    SumOfSquares,
    /// `Σ |1 − P|`.
    SumOfAbsolute,
}

impl Objective {
    fn term(self, chi: f64) -> f64 {
        match self {
            Objective::SumOfSquares => chi * chi,
            Objective::SumOfAbsolute => chi.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub k: usize,
    pub lambda_grid: Vec<f64>,
    pub objective: Objective,
    pub restarts: usize,
    pub seed: u64,
    pub simplex: NelderMeadOptions,
}

impl FitConfig {
    /// `k` free phases, 512 points on `[0.1, 1]`, least squares, 32 restarts.
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            lambda_grid: uniform_grid(DEFAULT_GRID_MIN, 1.0, DEFAULT_GRID_POINTS),
            objective: Objective::default(),
            restarts: DEFAULT_RESTARTS,
            seed,
            simplex: NelderMeadOptions::default(),
        }
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.lambda_grid = grid;
        self
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if self.lambda_grid.len() < MIN_GRID_POINTS {
            return Err(Error::InvalidArgument(format!(
                "fit grid needs at least {MIN_GRID_POINTS} points, got {}",
                self.lambda_grid.len()
            )));
        }
        validate_grid(&self.lambda_grid)?;
        if self.lambda_grid[0] <= 0.0 {
            return Err(Error::InvalidArgument("fit grid must lie in (0, 1]".into()));
        }
        Ok(())
    }

    /// Starting points, drawn up front so results do not depend on scheduling.
    fn starts(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.restarts)
            .map(|_| (0..self.k).map(|_| rng.random_range(0.0..TAU)).collect())
            .collect()
    }
}

/// `λ`-dependent terms of the step operator, shared by every evaluation.
struct GridTerms {
    lambda: Vec<f64>,
    s: Vec<f64>,
    u0: Vec<f64>,
    d0: Vec<f64>,
}

impl GridTerms {
    fn new(grid: &[f64]) -> Self {
        Self {
            lambda: grid.to_vec(),
            s: grid.iter().map(|&l| (l * (1.0 - l)).max(0.0).sqrt()).collect(),
            u0: grid.iter().map(|&l| (1.0 - l).max(0.0).sqrt()).collect(),
            d0: grid.iter().map(|&l| l.sqrt()).collect(),
        }
    }

    fn objective(&self, alphas: &[f64], objective: Objective) -> f64 {
        let k = alphas.len();
        let one = Complex64::new(1.0, 0.0);
        let steps: Vec<(Complex64, Complex64, Complex64)> = (0..k)
            .map(|j| {
                let (a, b) = (alphas[j], -alphas[k - 1 - j]);
                let e_beta = Complex64::cis(b);
                let e_sum = Complex64::cis(a + b);
                (one - e_beta, Complex64::cis(a) - e_sum, e_sum)
            })
            .collect();
        let mut total = 0.0;
        for i in 0..self.lambda.len() {
            let (l, s) = (self.lambda[i], self.s[i]);
            let mut u = Complex64::new(self.u0[i], 0.0);
            let mut d = Complex64::new(self.d0[i], 0.0);
            for &(diff, marked, e_sum) in &steps {
                let e_beta = one - diff;
                let nu = (diff * (1.0 - l) + e_beta) * u + marked * s * d;
                let nd = diff * s * u + (marked * l + e_sum) * d;
                u = nu;
                d = nd;
            }
            total += objective.term(1.0 - d.norm_sqr());
        }
        total
    }
}

/// Result of a fit. Phases are the free `α₁..α_k`; `β` follows from the
/// matching rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub objective: Objective,
    /// Fitted phases reduced to `[0, 2π)`.
    pub alphas: Vec<f64>,
    /// The profile-equivalent mirror `α → −α` chosen so that `α₁ ∈ [0, π]`.
    pub canonical_alphas: Vec<f64>,
    pub objective_value: f64,
    pub unit_roots: Vec<f64>,
    /// `(λ, P)` at each interior local minimum of `P_k` on the fit range.
    pub local_minima: Vec<(f64, f64)>,
    pub converged: bool,
}

impl FitReport {
    pub fn schedule(&self) -> PhaseSchedule {
        PhaseSchedule::matched(&self.alphas)
    }

    /// Pretty JSON with phases rounded to 9 significant digits.
    pub fn to_json(&self) -> String {
        let mut shown = self.clone();
        for a in shown.alphas.iter_mut().chain(shown.canonical_alphas.iter_mut()) {
            *a = round_significant(*a, 9);
        }
        serde_json::to_string_pretty(&shown).expect("report serializes")
    }
}

pub(crate) fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

fn wrap(alpha: f64) -> f64 {
    let r = alpha.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Mirror `α → −α` so that the first phase lies in `[0, π]`.
pub fn canonicalize(alphas: &[f64]) -> Vec<f64> {
    let wrapped: Vec<f64> = alphas.iter().map(|&a| wrap(a)).collect();
    match wrapped.first() {
        Some(&a1) if a1 > PI => wrapped.iter().map(|&a| wrap(-a)).collect(),
        _ => wrapped,
    }
}

fn run_restart(terms: &GridTerms, config: &FitConfig, start: &[f64]) -> Minimum {
    let f = |x: &[f64]| terms.objective(x, config.objective);
    let mut best = minimize(f, start, &config.simplex);
    for _ in 0..POLISH_ROUNDS {
        let next = minimize(f, &best.x, &config.simplex);
        let improved = next.value < best.value;
        if next.value <= best.value {
            best = Minimum {
                evaluations: best.evaluations + next.evaluations,
                ..next
            };
        }
        if !improved {
            break;
        }
    }
    best
}

/// Multi-start simplex fit of `k` matched phases.
///
/// Deterministic for a fixed config: restarts are seeded up front and ties
/// in the objective go to the lowest restart index.
pub fn fit_schedule(config: &FitConfig) -> Result<FitReport> {
    config.validate()?;
    let terms = GridTerms::new(&config.lambda_grid);
    let results: Vec<Minimum> = config
        .starts()
        .par_iter()
        .map(|s| run_restart(&terms, config, s))
        .collect();
    let best = results
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, m)| m)
        .expect("at least one restart");

    let alphas: Vec<f64> = best.x.iter().map(|&a| wrap(a)).collect();
    let schedule = PhaseSchedule::matched(&alphas);
    let lo = config.lambda_grid[0];
    let hi = *config.lambda_grid.last().expect("validated grid");
    let landscape = unit_roots_and_minima(&schedule, (lo, hi))?;
    Ok(FitReport {
        k: config.k,
        seed: config.seed,
        restarts: config.restarts,
        objective: config.objective,
        canonical_alphas: canonicalize(&alphas),
        alphas,
        objective_value: best.value,
        unit_roots: landscape.unit_roots,
        local_minima: landscape.local_minima,
        converged: best.converged,
    })
}

/// Objective of an arbitrary matched schedule on a fit grid.
pub fn fit_objective(alphas: &[f64], grid: &[f64], objective: Objective) -> Result<f64> {
    validate_grid(grid)?;
    Ok(GridTerms::new(grid).objective(alphas, objective))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub unit_roots: Vec<f64>,
    pub local_minima: Vec<(f64, f64)>,
}

/// Unit roots and interior local minima of `P_k` over `bracket`.
///
/// When the unmarked amplitude stays real (any matched schedule), unit
/// roots are its sign changes; otherwise they are the local maxima of `P`
/// that reach 1. Roots and minima are refined to `1e−10` in `λ`.
pub fn unit_roots_and_minima(schedule: &PhaseSchedule, bracket: (f64, f64)) -> Result<Landscape> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("schedule must not be empty".into()));
    }
    let (lo, hi) = bracket;
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "bracket must satisfy 0 <= lo < hi <= 1, got ({lo}, {hi})"
        )));
    }
    Ok(scan_landscape(
        |l| apply_schedule(schedule, MarkedFraction::unchecked(l.clamp(0.0, 1.0))),
        lo,
        hi,
    ))
}

fn scan_landscape<F>(amp: F, lo: f64, hi: f64) -> Landscape
where
    F: Fn(f64) -> Amplitudes + Sync,
{
    let prob = |l: f64| amp(l).success_probability();
    let xs: Vec<f64> = uniform_grid(lo, hi, SCAN_POINTS + 1);
    let samples: Vec<Amplitudes> = xs.par_iter().map(|&l| amp(l)).collect();
    let ps: Vec<f64> = samples.iter().map(Amplitudes::success_probability).collect();
    let real = samples.iter().all(|a| a.u.im.abs() <= 1e-9);

    let mut unit_roots = Vec::new();
    if real {
        let re_u = |l: f64| amp(l).u.re;
        for (a, b) in sign_change_brackets(re_u, lo, hi, SCAN_POINTS) {
            let r = if a == b {
                a
            } else {
                bisect(re_u, a, b, REFINE_TOL * 1e-2)
            };
            if (1.0 - prob(r)).abs() <= UNIT_ROOT_TOL {
                unit_roots.push(r);
            }
        }
    } else {
        let neg: Vec<f64> = ps.iter().map(|p| -p).collect();
        for i in local_min_brackets(&neg) {
            let (r, np) = golden_min(|l| -prob(l), xs[i - 1], xs[i + 1], REFINE_TOL);
            if (1.0 + np).abs() <= UNIT_ROOT_TOL {
                unit_roots.push(r);
            }
        }
    }

    let local_minima = local_min_brackets(&ps)
        .into_iter()
        .map(|i| golden_min(prob, xs[i - 1], xs[i + 1], REFINE_TOL))
        .collect();
    Landscape {
        unit_roots,
        local_minima,
    }
}

/// `P_j(λ)` for every stage `j = 1..k` of `schedule`.
pub fn stage_profiles(schedule: &PhaseSchedule, grid: &[f64]) -> Result<ProbabilityProfile> {
    probability_profile(schedule, grid)
}

/// Profile of `k` identical matched steps `(α, −α)`.
pub fn single_phase_repeat_profile(alpha: f64, k: usize, grid: &[f64]) -> Result<ProbabilityProfile> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let pair = PhasePair::matched(alpha);
    pair.validate()?;
    probability_profile(&PhaseSchedule::repeated(pair, k), grid)
}

/// The six phases of the reference six-step schedule, in units of π.
pub const REFERENCE_ALPHAS_OVER_PI: [f64; 6] = [1.20560132, 1.29806396, 1.31701508, 1.33356767, 0.47289426, 1.66668634];

/// The reference six-step schedule with the matching rule applied.
pub fn reference_schedule() -> PhaseSchedule {
    let alphas: Vec<f64> = REFERENCE_ALPHAS_OVER_PI.iter().map(|a| a * PI).collect();
    PhaseSchedule::matched(&alphas)
}
