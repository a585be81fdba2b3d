//! Closed forms for one matched step `(α, −α)`.

use crate::cubic::cubic_roots;
use crate::error::{ensure_finite, Error, Result};
use crate::evolution::MarkedFraction;

/// `P₁(λ)` for the matched pair `(α, −α)`: a cubic in `λ`.
pub fn single_step_probability(frac: MarkedFraction, alpha: f64) -> f64 {
    let l = frac.value();
    let c = alpha.cos();
    let one_c = 1.0 - c;
    l * (5.0 - 4.0 * c - 4.0 * one_c * (2.0 - c) * l + 4.0 * one_c * one_c * l * l)
}

/// Which of the two mirror solutions `±α` to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseSign {
    #[default]
    Positive,
    Negative,
}

/// Phase `α ∈ [π/3, π]` for which one matched step succeeds with certainty.
pub fn matched_phase_for_unity(frac: MarkedFraction) -> Result<f64> {
    matched_phase_for_unity_signed(frac, PhaseSign::Positive)
}

/// As [`matched_phase_for_unity`], optionally returning the mirror `−α`.
pub fn matched_phase_for_unity_signed(frac: MarkedFraction, sign: PhaseSign) -> Result<f64> {
    let l = frac.value();
    if l < 0.25 {
        return Err(Error::OutOfDomain(format!(
            "no single-step exact solution for lambda = {l} < 1/4"
        )));
    }
    let alpha = (1.0 - 1.0 / (2.0 * l)).clamp(-1.0, 1.0).acos();
    Ok(match sign {
        PhaseSign::Positive => alpha,
        PhaseSign::Negative => -alpha,
    })
}

/// Critical points of the single-step cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremaRecord {
    /// Where `P = 1`; the local maximum when `α > π/3`.
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub p_at_max: f64,
    pub p_at_min: f64,
    pub max_in_range: bool,
    pub min_in_range: bool,
}

/// Extrema of `P₁(λ)`. Values outside `(0, 1]` are kept and flagged.
pub fn extrema(alpha: f64) -> Result<ExtremaRecord> {
    ensure_finite("alpha", alpha)?;
    let c = alpha.cos();
    let one_c = 1.0 - c;
    if one_c <= 1e-15 {
        return Err(Error::Degenerate(
            "alpha = 0 leaves P = lambda with no interior extrema".into(),
        ));
    }
    let lambda_max = 1.0 / (2.0 * one_c);
    let lambda_min = (5.0 - 4.0 * c) / (6.0 * one_c);
    let p_at_min = (1.0 + c) * (5.0 - 4.0 * c).powi(2) / (27.0 * one_c);
    let in_range = |l: f64| l > 0.0 && l <= 1.0 + 1e-12;
    Ok(ExtremaRecord {
        lambda_max,
        lambda_min,
        p_at_max: 1.0,
        p_at_min,
        max_in_range: in_range(lambda_max),
        min_in_range: in_range(lambda_min),
    })
}

/// Mean of `P₁(λ)` over `λ ∈ [0, 1]`, integrated exactly.
pub fn average_probability(alpha: f64) -> f64 {
    let c = alpha.cos();
    let one_c = 1.0 - c;
    (5.0 - 4.0 * c) / 2.0 - 4.0 * one_c * (2.0 - c) / 3.0 + one_c * one_c
}

/// Total length of `{λ ∈ [0, 1] : P₁(λ) ≥ threshold}`.
pub fn range_above(alpha: f64, threshold: f64) -> f64 {
    let c = alpha.cos();
    let one_c = 1.0 - c;
    let p = |l: f64| single_step_probability(MarkedFraction::unchecked(l), alpha);
    let mut cuts: Vec<f64> = cubic_roots(4.0 * one_c * one_c, -4.0 * one_c * (2.0 - c), 5.0 - 4.0 * c, -threshold)
        .into_iter()
        .filter(|&r| r > 0.0 && r < 1.0)
        .collect();
    cuts.insert(0, 0.0);
    cuts.push(1.0);
    cuts.windows(2)
        .filter(|w| p(0.5 * (w[0] + w[1])) >= threshold)
        .map(|w| w[1] - w[0])
        .sum()
}
