//! Fixed-size 2×2 complex linear algebra on the `{|R⟩, |T⟩}` basis.
//!
//! Row-major layout: `m[0][0]` maps R→R, `m[0][1]` maps T→R,
//! `m[1][0]` maps R→T and `m[1][1]` maps T→T.

use std::ops::Mul;

use num_complex::Complex64;

/// One Grover step (or a product of steps) as a 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator2 {
    pub m: [[Complex64; 2]; 2],
}

impl Operator2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new([[one, zero], [zero, one]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self::new([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self::new([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.m;
        Self::new([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (&self.m, &other.m);
        Self::new([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn apply(&self, v: Amplitudes) -> Amplitudes {
        let m = &self.m;
        Amplitudes {
            u: m[0][0] * v.u + m[0][1] * v.d,
            d: m[1][0] * v.u + m[1][1] * v.d,
        }
    }

    /// `self^k` by repeated multiplication, left to right.
    pub fn power(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(), |acc, _| *self * acc)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }

    /// Largest entrywise deviation of `G†G` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self.dagger() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }
}

impl Mul for Operator2 {
    type Output = Operator2;

    fn mul(self, rhs: Operator2) -> Operator2 {
        let (a, b) = (&self.m, &rhs.m);
        Operator2::new([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// Amplitudes `(u, d)` on the unmarked and marked basis states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub u: Complex64,
    pub d: Complex64,
}

impl Amplitudes {
    /// The database state `(√(1-λ), √λ)`.
    pub fn database(lambda: f64) -> Self {
        Self {
            u: Complex64::new((1.0 - lambda).max(0.0).sqrt(), 0.0),
            d: Complex64::new(lambda.max(0.0).sqrt(), 0.0),
        }
    }

    /// Success probability `|d|²`.
    pub fn success_probability(&self) -> f64 {
        self.d.norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u.norm_sqr() + self.d.norm_sqr()
    }
}
