//! Real roots of polynomials up to degree three.
//!
//! The cubic path uses the trigonometric form when all three roots are real
//! and Cardano otherwise; every root gets one Newton step on the original
//! coefficients.

use std::f64::consts::PI;

/// Discriminant threshold (relative) below which near-double roots are
/// treated as real.
const CLASSIFY_TOL: f64 = 1e-10;

/// Real roots of `a x² + b x + c`, ascending. Degenerates to linear when `a == 0`.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs()).max(f64::MIN_POSITIVE);
    if disc < -CLASSIFY_TOL * scale {
        return Vec::new();
    }
    let disc = disc.max(0.0);
    // Numerically stable pairing avoids cancellation in -b ± √disc.
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = if q == 0.0 { vec![0.0, 0.0] } else { vec![q / a, c / q] };
    roots.sort_by(f64::total_cmp);
    roots
}

/// Real roots of `a x³ + b x² + c x + d`, ascending (repeated roots repeated).
pub fn cubic_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    if a == 0.0 {
        return quadratic_roots(b, c, d);
    }
    let (p2, p1, p0) = (b / a, c / a, d / a);
    // Depressed cubic t³ + p t + q with x = t − p2/3.
    let shift = p2 / 3.0;
    let p = p1 - p2 * p2 / 3.0;
    let q = 2.0 * p2 * p2 * p2 / 27.0 - p2 * p1 / 3.0 + p0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let scale = (q / 2.0).powi(2).max((p / 3.0).powi(3).abs()).max(f64::MIN_POSITIVE);

    let mut roots = if p == 0.0 && q == 0.0 {
        vec![0.0; 3]
    } else if disc <= CLASSIFY_TOL * scale {
        if p >= 0.0 {
            // Only reachable through rounding when p ≈ 0.
            vec![-q.cbrt(); 1]
        } else {
            let m = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            (0..3).map(|k| m * (theta - 2.0 * PI * k as f64 / 3.0).cos()).collect()
        }
    } else {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        vec![u + v]
    };
    for t in roots.iter_mut() {
        *t -= shift;
        *t = newton_polish(a, b, c, d, *t);
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn newton_polish(a: f64, b: f64, c: f64, d: f64, x: f64) -> f64 {
    let f = ((a * x + b) * x + c) * x + d;
    let df = (3.0 * a * x + 2.0 * b) * x + c;
    if df == 0.0 || !df.is_finite() {
        return x;
    }
    let step = f / df;
    let next = x - step;
    let f_next = ((a * next + b) * next + c) * next + d;
    if f_next.abs() <= f.abs() {
        next
    } else {
        x
    }
}
