//! Two matched steps: schedule `[(α₁, −α₂), (α₂, −α₁)]`.
//!
//! Under this pairing the unmarked amplitude is real and equals
//! `q(λ)·√(1−λ)` with `q` quadratic in `λ`, so at most two fractions
//! reach certainty. This module evaluates `q`, inverts the map from a
//! pair of target fractions back to phases, and exposes the feasibility
//! discriminant of `q`.

use std::f64::consts::PI;

use crate::cubic::{cubic_roots, quadratic_roots};
use crate::error::{Error, Result};
use crate::evolution::MarkedFraction;
use crate::schedule::PhaseSchedule;

/// Slack allowed on `|cos α| <= 1` before a candidate angle is rejected.
/// The cubic has a double root at `cos α₂ = −1` for the floor targets,
/// where its roots carry errors near the square root of machine epsilon.
const COS_SLACK: f64 = 1e-6;
/// Residual bound on the quadratic factor at both targets.
const VERIFY_TOL: f64 = 1e-9;

/// Coefficients `(a, b, c)` of `q(λ) = a λ² + b λ + c`.
pub fn quadratic_coefficients(alpha1: f64, alpha2: f64) -> (f64, f64, f64) {
    let (s1, c1) = alpha1.sin_cos();
    let (s2, c2) = alpha2.sin_cos();
    let a = 4.0 * (1.0 - c1) * (1.0 - c2);
    let b = 2.0 * ((1.0 - c1) * (c2 - 2.0) - s1 * s2);
    (a, b, 1.0)
}

/// Real unmarked amplitude `u₂(λ)` after the matched two-step schedule.
pub fn two_step_unmarked_amplitude(frac: MarkedFraction, alpha1: f64, alpha2: f64) -> f64 {
    let l = frac.value();
    let (a, b, c) = quadratic_coefficients(alpha1, alpha2);
    (c + b * l + a * l * l) * (1.0 - l).sqrt()
}

/// Phases whose two-step schedule reaches `P = 1` at both `lambda_roots`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhaseSolution {
    pub alpha1: f64,
    pub alpha2: f64,
    pub lambda_roots: (f64, f64),
}

impl TwoPhaseSolution {
    pub fn beta1(&self) -> f64 {
        -self.alpha2
    }

    pub fn beta2(&self) -> f64 {
        -self.alpha1
    }

    pub fn schedule(&self) -> PhaseSchedule {
        PhaseSchedule::matched(&[self.alpha1, self.alpha2])
    }
}

/// Solve for `(α₁, α₂)` given the two fractions at which `P₂ = 1`.
///
/// `cos α₂` is a root of a cubic in the targets' sum and product; `cos α₁`
/// then follows from the product of the roots. The sign of `α₂` relative to
/// `α₁` is fixed by the sum of the roots. Each candidate is checked against
/// the quadratic factor before it is returned. Results have `α₁ ∈ [0, π]`
/// and are sorted by `α₁`; negating both phases gives the mirror solution.
pub fn solve_phases_for_roots(lambda1: MarkedFraction, lambda2: MarkedFraction) -> Result<Vec<TwoPhaseSolution>> {
    let (l1, l2) = (lambda1.value(), lambda2.value());
    if !(l1 > 0.0 && l1 <= l2) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < lambda1 <= lambda2 <= 1, got ({l1}, {l2})"
        )));
    }
    let sum = l1 + l2;
    let prod = l1 * l2;
    let cos2_candidates = cubic_roots(
        8.0 * prod,
        4.0 * sum * (1.0 - sum) - 8.0 * prod,
        8.0 * sum * sum - 12.0 * sum - 8.0 * prod + 4.0,
        -4.0 * sum * sum + 8.0 * sum - 5.0 + 8.0 * prod,
    );

    let mut out: Vec<TwoPhaseSolution> = Vec::new();
    for c2 in cos2_candidates {
        if c2.abs() > 1.0 + COS_SLACK || 1.0 - c2 <= 0.0 {
            continue;
        }
        let c2 = c2.clamp(-1.0, 1.0);
        let w = 1.0 / (4.0 * (1.0 - c2) * prod);
        let c1 = 1.0 - w;
        if c1.abs() > 1.0 + COS_SLACK {
            continue;
        }
        let c1 = c1.clamp(-1.0, 1.0);
        let a1 = c1.acos();
        let a2 = c2.acos();
        // Required value of sin α₁ sin α₂ from the sum of the roots.
        let sin_product = w * (2.0 * (1.0 - c2) * sum - (2.0 - c2));
        let signs: &[f64] = if a1.sin() * a2.sin() < 1e-9 {
            &[1.0, -1.0]
        } else if sin_product >= 0.0 {
            &[1.0]
        } else {
            &[-1.0]
        };
        for &sign in signs {
            let cand = TwoPhaseSolution {
                alpha1: a1,
                alpha2: sign * a2,
                lambda_roots: (l1, l2),
            };
            if verify(&cand) && !out.iter().any(|s| same_solution(s, &cand)) {
                out.push(cand);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Infeasible(format!(
            "no real phases put P = 1 at both {l1} and {l2}"
        )));
    }
    out.sort_by(|x, y| x.alpha1.total_cmp(&y.alpha1).then(x.alpha2.total_cmp(&y.alpha2)));
    Ok(out)
}

fn verify(s: &TwoPhaseSolution) -> bool {
    let (a, b, c) = quadratic_coefficients(s.alpha1, s.alpha2);
    let q = |l: f64| c + b * l + a * l * l;
    q(s.lambda_roots.0).abs() <= VERIFY_TOL && q(s.lambda_roots.1).abs() <= VERIFY_TOL
}

fn same_solution(x: &TwoPhaseSolution, y: &TwoPhaseSolution) -> bool {
    (x.alpha1 - y.alpha1).abs() < 1e-7 && (x.alpha2 - y.alpha2).abs() < 1e-7
}

/// Discriminant `b² − 4ac` of the quadratic factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discriminant {
    pub value: f64,
    /// `a = 0`: the λ² term vanishes and `q` is at most linear.
    pub degenerate: bool,
}

pub fn discriminant(alpha1: f64, alpha2: f64) -> Discriminant {
    let (a, b, c) = quadratic_coefficients(alpha1, alpha2);
    Discriminant {
        value: b * b - 4.0 * a * c,
        degenerate: a.abs() < 1e-15,
    }
}

/// Real roots of the quadratic factor, ascending; empty when complex.
pub fn unity_fractions(alpha1: f64, alpha2: f64) -> Vec<f64> {
    let (a, b, c) = quadratic_coefficients(alpha1, alpha2);
    quadratic_roots(a, b, c)
}

/// The smallest fraction any two-step matched schedule can bring to `P = 1`,
/// attained at `α₁ = α₂ = π`.
pub fn minimal_unity_fraction() -> f64 {
    (3.0 - 5f64.sqrt()) / 8.0
}

/// Second-order growth of the smaller root for `α₁,₂ = π + ε₁,₂`, in the
/// closed form quoted with the floor result.
pub fn perturbation_growth(eps1: f64, eps2: f64) -> f64 {
    let r5 = 5f64.sqrt();
    let mixed = 2.0 * r5 * eps1 + (5.0 - 3.0 * r5) / (2.0 * r5).sqrt() * eps2;
    (mixed * mixed + (22.0 - 8.0 * r5) * eps2 * eps2) / 160.0
}

/// Exact shift of the smaller root when both phases move off `π`.
pub fn smaller_root_shift(eps1: f64, eps2: f64) -> Option<f64> {
    unity_fractions(PI + eps1, PI + eps2)
        .first()
        .map(|r| r - minimal_unity_fraction())
}
