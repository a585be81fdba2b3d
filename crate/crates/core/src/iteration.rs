//! Repetition of a single matched step `G₁ = G(α, −α)`.
//!
//! `G₁` has unit determinant and trace `2(1 − x)` with `x = (1 − cos α) λ`,
//! so its eigenvalues are `e^{±iφ}` with `cos φ = 1 − x`. Cayley–Hamilton
//! then gives `G₁^k = [G₁ sin kφ − I sin (k−1)φ] / sin φ`, a Chebyshev-type
//! recurrence that turns every `k`-fold quantity into a closed form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::evolution::{build_operator, MarkedFraction};
use crate::operator::Operator2;
use crate::roots::{bisect, sign_change_brackets};
use crate::schedule::PhasePair;

const SIN_PHI_FLOOR: f64 = 1e-12;
const ROOT_SCAN_POINTS: usize = 10_000;

/// `x = (1 − cos α) λ` and the eigenphase `φ ∈ [0, π]` of `G₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenphaseRecord {
    pub x: f64,
    pub phi: f64,
}

pub fn eigenphase(alpha: f64, frac: MarkedFraction) -> EigenphaseRecord {
    let x = (1.0 - alpha.cos()) * frac.value();
    EigenphaseRecord {
        x,
        phi: (1.0 - x).clamp(-1.0, 1.0).acos(),
    }
}

fn matched_step(alpha: f64, frac: MarkedFraction) -> Result<Operator2> {
    build_operator(PhasePair::matched(alpha), frac)
}

/// `G₁^k` through the Cayley–Hamilton closed form.
pub fn closed_form_power(alpha: f64, frac: MarkedFraction, k: u32) -> Result<Operator2> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let g1 = matched_step(alpha, frac)?;
    let EigenphaseRecord { phi, .. } = eigenphase(alpha, frac);
    let sin_phi = phi.sin();
    if sin_phi.abs() < SIN_PHI_FLOOR {
        return Err(Error::Degenerate(format!(
            "sin(phi) = 0 at alpha = {alpha}, lambda = {}",
            frac.value()
        )));
    }
    let kf = k as f64;
    let a = Complex64::new((kf * phi).sin() / sin_phi, 0.0);
    let b = Complex64::new(((kf - 1.0) * phi).sin() / sin_phi, 0.0);
    Ok(g1.scale(a).sub(&Operator2::identity().scale(b)))
}

/// `G₁^k`, falling back to repeated multiplication when the closed form
/// is singular.
pub fn matched_power(alpha: f64, frac: MarkedFraction, k: u32) -> Result<Operator2> {
    match closed_form_power(alpha, frac, k) {
        Err(Error::Degenerate(_)) => Ok(matched_step(alpha, frac)?.power(k)),
        other => other,
    }
}

/// Real unmarked amplitude `u_k` after `k` identical matched steps.
pub fn unmarked_amplitude_closed(alpha: f64, frac: MarkedFraction, k: u32) -> Result<f64> {
    ensure_finite("alpha", alpha)?;
    let EigenphaseRecord { x, phi } = eigenphase(alpha, frac);
    let sin_phi = phi.sin();
    if sin_phi.abs() < SIN_PHI_FLOOR {
        return Err(Error::Degenerate(format!(
            "sin(phi) = 0 at alpha = {alpha}, lambda = {}",
            frac.value()
        )));
    }
    let kf = k as f64;
    let l = frac.value();
    Ok((1.0 - l).sqrt() * ((kf * phi).sin() * (1.0 - 2.0 * x) - ((kf - 1.0) * phi).sin()) / sin_phi)
}

/// `(A, θ)` with `u_k = A cos(kφ + θ)`.
pub fn amplitude_phase_form(alpha: f64, frac: MarkedFraction) -> (f64, f64) {
    let x = eigenphase(alpha, frac).x;
    let l = frac.value();
    let amplitude = (2.0 * (1.0 - l) / (2.0 - x)).sqrt();
    let theta = (x / (2.0 - x)).sqrt().atan();
    (amplitude, theta)
}

/// Fractions `λ ∈ (0, 1]` at which `k` repeated matched steps reach `P = 1`,
/// ascending. The trivial root from `sin φ = 0` at `x = 2` is excluded.
pub fn unity_roots_single_phase(alpha: f64, k: u32) -> Result<Vec<f64>> {
    ensure_finite("alpha", alpha)?;
    let one_c = 1.0 - alpha.cos();
    if one_c <= 1e-15 {
        return Err(Error::OutOfDomain("alpha = 0 gives no amplification".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let kf = k as f64;
    let residual = |phi: f64| {
        let x = 1.0 - phi.cos();
        (kf * phi).sin() * (1.0 - 2.0 * x) - ((kf - 1.0) * phi).sin()
    };
    let x_max = one_c.min(2.0);
    let phi_max = (1.0 - x_max).clamp(-1.0, 1.0).acos();
    let phi_singular = PI - phi_max < 1e-9;

    let mut phis: Vec<f64> = sign_change_brackets(residual, 0.0, phi_max, ROOT_SCAN_POINTS)
        .into_iter()
        .filter(|&(lo, _)| lo > 0.0)
        .map(|(lo, hi)| bisect(residual, lo, hi, 1e-15))
        .collect();
    let tail = phis.last().copied().unwrap_or(0.0);
    if !phi_singular && residual(phi_max).abs() < 1e-12 && phi_max - tail > 1e-9 {
        phis.push(phi_max);
    }
    if phi_singular {
        phis.retain(|&p| PI - p > 1e-7);
    }
    Ok(phis
        .into_iter()
        .map(|phi| ((1.0 - phi.cos()) / one_c).min(1.0))
        .collect())
}

/// Large-`k` estimate `x_min ≈ π²/(8k²)` of the smallest unity fraction,
/// mapped back to `λ`.
pub fn min_lambda_estimate(alpha: f64, k: u32) -> Result<f64> {
    let one_c = 1.0 - alpha.cos();
    if one_c <= 1e-15 {
        return Err(Error::OutOfDomain("alpha = 0 gives no amplification".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let kf = k as f64;
    Ok(PI * PI / (8.0 * kf * kf) / one_c)
}

/// Original Grover search: `sin²[(2k+1) asin √λ]`.
pub fn grover_probability(frac: MarkedFraction, k: u32) -> f64 {
    let theta = frac.value().sqrt().asin();
    ((2.0 * k as f64 + 1.0) * theta).sin().powi(2)
}

/// Iteration count that brings Grover search closest to certainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalIterations {
    /// `(π/(2θ) − 1)/2` with `θ = asin √λ`, before rounding.
    pub continuous: f64,
    /// `continuous` rounded to nearest, halves rounded down.
    pub rounded: u64,
    /// Integer part of `π/(4√λ)`.
    pub large_k_estimate: u64,
}

pub fn optimal_iterations(frac: MarkedFraction) -> Result<OptimalIterations> {
    let l = frac.value();
    if l <= 0.0 {
        return Err(Error::OutOfDomain("lambda must be positive".into()));
    }
    let theta = l.sqrt().asin();
    let continuous = 0.5 * (PI / (2.0 * theta) - 1.0);
    let floor = continuous.floor();
    let rounded = if continuous - floor > 0.5 { floor + 1.0 } else { floor };
    Ok(OptimalIterations {
        continuous,
        rounded: rounded.max(0.0) as u64,
        large_k_estimate: (PI / (4.0 * l.sqrt())).floor() as u64,
    })
}

/// Lower envelope `1 − A²` of `P_k(λ)` over all `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub value: f64,
    /// `x = 2`, where the closed form is `0/0`; `value` is then 0.
    pub degenerate: bool,
}

pub fn p_min_envelope(frac: MarkedFraction, alpha: f64) -> Envelope {
    let l = frac.value();
    let c = alpha.cos();
    let denom = 2.0 - (1.0 - c) * l;
    if denom.abs() < 1e-15 {
        return Envelope {
            value: 0.0,
            degenerate: true,
        };
    }
    Envelope {
        value: l * (1.0 + c) / denom,
        degenerate: false,
    }
}
