//! Grover operators with independent oracle/diffusion phases and their
//! sequential application to the database state.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure_finite, Error, Result};
use crate::operator::{Amplitudes, Operator2};
use crate::schedule::{PhasePair, PhaseSchedule};

/// Fraction `λ = M/N` of marked basis states.
///
/// Accepts the closed interval `[0, 1]`; `λ = 0` only makes sense as a
/// sampling endpoint of a probability curve.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MarkedFraction(f64);

impl MarkedFraction {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!(
                "marked fraction must lie in [0, 1], got {lambda}"
            )));
        }
        Ok(Self(lambda))
    }

    /// Exact `M/N` from integer counts.
    pub fn from_counts(marked: u64, total: u64) -> Result<Self> {
        if total == 0 || marked == 0 || marked > total {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= M <= N, got M={marked}, N={total}"
            )));
        }
        Self::new(marked as f64 / total as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Caller guarantees `0 <= lambda <= 1`.
    pub(crate) const fn unchecked(lambda: f64) -> Self {
        Self(lambda)
    }
}

impl TryFrom<f64> for MarkedFraction {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

/// λ-independent phase factors of one step, hoisted out of grid loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepFactors {
    e_beta: Complex64,
    e_alpha: Complex64,
    e_sum: Complex64,
}

impl StepFactors {
    pub(crate) fn new(pair: PhasePair) -> Self {
        Self {
            e_beta: Complex64::cis(pair.beta),
            e_alpha: Complex64::cis(pair.alpha),
            e_sum: Complex64::cis(pair.alpha + pair.beta),
        }
    }

    pub(crate) fn operator(&self, lambda: f64) -> Operator2 {
        let one = Complex64::new(1.0, 0.0);
        let s = (lambda * (1.0 - lambda)).max(0.0).sqrt();
        let diff = one - self.e_beta;
        let marked = self.e_alpha - self.e_sum;
        Operator2::new([
            [diff * (1.0 - lambda) + self.e_beta, marked * s],
            [diff * s, marked * lambda + self.e_sum],
        ])
    }
}

/// One Grover step `G(α, β)` in the `{|R⟩, |T⟩}` basis.
pub fn build_operator(pair: PhasePair, frac: MarkedFraction) -> Result<Operator2> {
    pair.validate()?;
    ensure_finite("lambda", frac.value())?;
    Ok(StepFactors::new(pair).operator(frac.value()))
}

/// `G(α_k,β_k)···G(α_1,β_1)` applied to `(√(1−λ), √λ)`.
pub fn apply_schedule(schedule: &PhaseSchedule, frac: MarkedFraction) -> Amplitudes {
    let factors: Vec<StepFactors> = schedule.pairs().iter().map(|&p| StepFactors::new(p)).collect();
    evolve(&factors, frac.value())
}

pub(crate) fn evolve(factors: &[StepFactors], lambda: f64) -> Amplitudes {
    factors
        .iter()
        .fold(Amplitudes::database(lambda), |state, f| f.operator(lambda).apply(state))
}

/// Amplitudes after every stage `j = 0..=k` (stage 0 is the database state).
pub(crate) fn evolve_stages(factors: &[StepFactors], lambda: f64) -> Vec<Amplitudes> {
    let mut out = Vec::with_capacity(factors.len() + 1);
    let mut state = Amplitudes::database(lambda);
    out.push(state);
    for f in factors {
        state = f.operator(lambda).apply(state);
        out.push(state);
    }
    out
}

/// Success probabilities `P_j(λ)` sampled on a λ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityProfile {
    pub lambdas: Vec<f64>,
    /// `stages[j - 1][i]` is `P_j(λ_i)`.
    pub stages: Vec<Vec<f64>>,
}

impl ProbabilityProfile {
    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// `P_j` on the grid; stage 0 is the untouched database, `P_0(λ) = λ`.
    pub fn stage(&self, j: usize) -> Option<&[f64]> {
        if j == 0 {
            Some(&self.lambdas)
        } else {
            self.stages.get(j - 1).map(Vec::as_slice)
        }
    }

    /// Last stage, or `λ` itself for an empty schedule.
    pub fn final_stage(&self) -> &[f64] {
        self.stages.last().map(Vec::as_slice).unwrap_or(&self.lambdas)
    }

    /// Minimum of the final stage over grid points with `lo <= λ <= hi`.
    pub fn final_min_on(&self, lo: f64, hi: f64) -> Option<f64> {
        self.lambdas
            .iter()
            .zip(self.final_stage())
            .filter(|(&l, _)| l >= lo && l <= hi)
            .map(|(_, &p)| p)
            .reduce(f64::min)
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty lambda grid".into()));
    }
    for &l in grid {
        MarkedFraction::new(l)?;
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("lambda grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Sample `P_j(λ)` for every stage of `schedule` over `grid`.
///
/// Grid points are evaluated independently, so the result does not
/// depend on how the work is split across threads.
pub fn probability_profile(schedule: &PhaseSchedule, grid: &[f64]) -> Result<ProbabilityProfile> {
    validate_grid(grid)?;
    let factors: Vec<StepFactors> = schedule.pairs().iter().map(|&p| StepFactors::new(p)).collect();
    let per_point: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&l| {
            evolve_stages(&factors, l)
                .iter()
                .skip(1)
                .map(Amplitudes::success_probability)
                .collect()
        })
        .collect();
    let k = factors.len();
    let stages = (0..k).map(|j| per_point.iter().map(|row| row[j]).collect()).collect();
    Ok(ProbabilityProfile {
        lambdas: grid.to_vec(),
        stages,
    })
}

/// Centres of `count` equal cells of `[lo, hi]`; endpoints excluded.
pub fn midpoint_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / count as f64;
    (0..count).map(|i| lo + step * (i as f64 + 0.5)).collect()
}

/// `count` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}
