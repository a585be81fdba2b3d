//! The (θ, φ) phase operator, its probability equivalence with the
//! oracle/diffusion phases used elsewhere, and classical sampling.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};
use crate::evolution::{build_operator, MarkedFraction};
use crate::operator::{Amplitudes, Operator2};
use crate::schedule::PhasePair;

/// Oracle phase `θ` and diffusion phase `φ` in the (θ, φ) convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongPhasePair {
    pub theta: f64,
    pub phi: f64,
}

impl LongPhasePair {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        ensure_finite("theta", theta)?;
        ensure_finite("phi", phi)?;
        Ok(Self { theta, phi })
    }

    /// `φ = θ`, the matching condition of this convention.
    pub fn matched(theta: f64) -> Self {
        Self { theta, phi: theta }
    }

    /// The pair whose step has the same probabilities as `G(α, β)`.
    pub fn equivalent_to(pair: PhasePair) -> Self {
        Self {
            theta: pair.alpha,
            phi: -pair.beta,
        }
    }
}

pub fn build_long_operator(pair: LongPhasePair, frac: MarkedFraction) -> Operator2 {
    let l = frac.value();
    let s = (l * (1.0 - l)).max(0.0).sqrt();
    let one = Complex64::new(1.0, 0.0);
    let w = one - Complex64::cis(pair.phi);
    let e_theta = Complex64::cis(pair.theta);
    Operator2::new([
        [one - w * (1.0 - l), -w * e_theta * s],
        [-w * s, (one - w * l) * e_theta],
    ])
}

/// Fraction at which one matched Long step succeeds with certainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongMatch {
    pub lambda: f64,
    /// `θ = π`, where the closed form is `0/0` and the limit is returned.
    pub limit: bool,
}

pub fn long_matched_lambda(theta: f64) -> Result<LongMatch> {
    ensure_finite("theta", theta)?;
    let lo = PI / 3.0;
    if !(lo - 1e-12..=PI + 1e-12).contains(&theta) {
        return Err(Error::OutOfDomain(format!("theta must lie in [pi/3, pi], got {theta}")));
    }
    if (PI - theta).abs() <= 1e-12 {
        return Ok(LongMatch {
            lambda: 0.25,
            limit: true,
        });
    }
    // (cos θ + 1) / (2 sin² θ) with the common factor 1 + cos θ cancelled.
    let lambda = (1.0 / (2.0 * (1.0 - theta.cos()))).min(1.0);
    Ok(LongMatch { lambda, limit: false })
}

fn evolve_both(pair: PhasePair, frac: MarkedFraction, k: usize) -> Result<(Amplitudes, Amplitudes)> {
    let g = build_operator(pair, frac)?;
    let h = build_long_operator(LongPhasePair::equivalent_to(pair), frac);
    let mut a = Amplitudes::database(frac.value());
    let mut b = a;
    for _ in 0..k {
        a = g.apply(a);
        b = h.apply(b);
    }
    Ok((a, b))
}

/// Largest difference in `|u|²` or `|d|²` after `k` steps of `G(α, β)` and
/// of the Long operator with `(θ, φ) = (α, −β)`.
pub fn scheme_equivalence_check(alpha: f64, beta: f64, frac: MarkedFraction, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let (a, b) = evolve_both(PhasePair::new(alpha, beta), frac, k)?;
    Ok((a.u.norm_sqr() - b.u.norm_sqr())
        .abs()
        .max((a.d.norm_sqr() - b.d.norm_sqr()).abs()))
}

/// Largest componentwise amplitude difference for the same comparison.
pub fn scheme_amplitude_gap(alpha: f64, beta: f64, frac: MarkedFraction, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let (a, b) = evolve_both(PhasePair::new(alpha, beta), frac, k)?;
    Ok((a.u - b.u).norm().max((a.d - b.d).norm()))
}

/// Multi-step version over arbitrary schedules; returns the probability gap.
pub fn schedule_equivalence_gap(pairs: &[PhasePair], frac: MarkedFraction) -> Result<f64> {
    let mut a = Amplitudes::database(frac.value());
    let mut b = a;
    for &p in pairs {
        a = build_operator(p, frac)?.apply(a);
        b = build_long_operator(LongPhasePair::equivalent_to(p), frac).apply(b);
    }
    Ok((a.u.norm_sqr() - b.u.norm_sqr())
        .abs()
        .max((a.d.norm_sqr() - b.d.norm_sqr()).abs()))
}

/// Probability of drawing at least one of `M` marked items in `k` classical
/// draws from `N` items.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalProbability {
    /// Without replacement.
    pub exact: f64,
    /// `1 − (1 − λ)^k`, valid for `k ≪ N`.
    pub approximation: f64,
    /// `k` exceeds `N − M + 1`, so a marked item is certain before the last draw.
    pub exhausted: bool,
}

pub fn classical_probability(marked: u64, total: u64, k: u64) -> Result<ClassicalProbability> {
    let frac = MarkedFraction::from_counts(marked, total)?;
    let l = frac.value();
    let approximation = 1.0 - (1.0 - l).powf(k as f64);
    let unmarked = total - marked;
    if k > unmarked + 1 {
        return Ok(ClassicalProbability {
            exact: 1.0,
            approximation,
            exhausted: true,
        });
    }
    let mut miss = 1.0;
    for n in 1..=k {
        let remaining = (total - (n - 1)) as f64;
        miss *= 1.0 - marked as f64 / remaining;
    }
    Ok(ClassicalProbability {
        exact: 1.0 - miss,
        approximation,
        exhausted: false,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::single_pair::matched_phase_for_unity;

    fn f(l: f64) -> MarkedFraction {
        MarkedFraction::new(l).unwrap()
    }

    #[test]
    fn grover_phases_agree_in_magnitude() {
        for l in [0.1, 0.25, 0.7] {
            let a = build_long_operator(LongPhasePair::matched(PI), f(l));
            let b = build_operator(PhasePair::grover(), f(l)).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!((a.m[i][j].norm() - b.m[i][j].norm()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_phases_give_identity() {
        let a = build_long_operator(LongPhasePair::matched(0.0), f(0.3));
        assert!(a.max_abs_diff(&Operator2::identity()) < 1e-15);
    }

    #[test]
    fn long_operator_is_unitary() {
        for &(t, p, l) in &[(0.3, 2.0, 0.1), (PI, -1.0, 0.9), (-2.0, 0.5, 0.5)] {
            assert!(build_long_operator(LongPhasePair::new(t, p).unwrap(), f(l)).is_unitary(1e-12));
        }
    }

    #[test]
    fn matched_half_pi_at_half_succeeds() {
        let out = build_long_operator(LongPhasePair::matched(FRAC_PI_2), f(0.5)).apply(Amplitudes::database(0.5));
        assert!(out.u.norm() < 1e-12);
    }

    #[test]
    fn matched_lambda_examples() {
        assert!((long_matched_lambda(FRAC_PI_2).unwrap().lambda - 0.5).abs() < 1e-15);
        assert!((long_matched_lambda(PI / 3.0).unwrap().lambda - 1.0).abs() < 1e-12);
        assert!((long_matched_lambda(2.0 * PI / 3.0).unwrap().lambda - 1.0 / 3.0).abs() < 1e-12);
        let m = long_matched_lambda(PI).unwrap();
        assert!(m.limit);
        assert_eq!(m.lambda, 0.25);
        assert!(long_matched_lambda(1.0).is_err());
        assert!(long_matched_lambda(3.5).is_err());
    }

    #[test]
    fn matched_lambda_zeroes_amplitude() {
        for theta in [1.1, 1.6, 2.4, 3.0] {
            let l = long_matched_lambda(theta).unwrap().lambda;
            let out = build_long_operator(LongPhasePair::matched(theta), f(l)).apply(Amplitudes::database(l));
            assert!(out.u.norm() < 1e-12);
            let alpha = matched_phase_for_unity(f(l)).unwrap();
            assert!((alpha - theta).abs() < 1e-12);
        }
    }

    #[test]
    fn equivalence_examples() {
        assert!(scheme_equivalence_check(1.2, -0.7, f(0.3), 3).unwrap() <= 1e-12);
        for l in [0.05, 0.5, 0.95] {
            assert!(scheme_equivalence_check(PI, PI, f(l), 1).unwrap() <= 1e-12);
        }
        assert!(scheme_amplitude_gap(1.2, -0.7, f(0.3), 1).unwrap() > 1e-6);
        assert!(scheme_equivalence_check(1.0, 1.0, f(0.3), 0).is_err());
    }

    #[test]
    fn classical_examples() {
        let c = classical_probability(2, 4, 2).unwrap();
        assert!((c.exact - 5.0 / 6.0).abs() < 1e-15);
        let c = classical_probability(3, 10, 1).unwrap();
        assert!((c.exact - 0.3).abs() < 1e-15);
        let c = classical_probability(300_000, 1_000_000, 2).unwrap();
        assert!((c.approximation - 0.51).abs() < 1e-12);
        assert!(c.exact >= c.approximation);
    }

    #[test]
    fn classical_exhaustion() {
        let c = classical_probability(2, 4, 3).unwrap();
        assert!(!c.exhausted);
        assert_eq!(c.exact, 1.0);
        let c = classical_probability(2, 4, 4).unwrap();
        assert!(c.exhausted);
        assert_eq!(c.exact, 1.0);
        assert!(classical_probability(0, 4, 1).is_err());
        assert!(classical_probability(5, 4, 1).is_err());
    }
}
