//! Phase pairs, ordered phase schedules and their on-disk form.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Tolerance used by the matching-rule predicate.
pub const MATCHING_RULE_TOL: f64 = 1e-12;

/// Oracle phase `alpha` and diffusion phase `beta`, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePair {
    pub alpha: f64,
    pub beta: f64,
}

impl PhasePair {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// The single-step matched pair `(α, −α)`.
    pub const fn matched(alpha: f64) -> Self {
        Self { alpha, beta: -alpha }
    }

    /// The original Grover step, `α = β = π`.
    pub const fn grover() -> Self {
        Self { alpha: PI, beta: PI }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("alpha", self.alpha)?;
        ensure_finite("beta", self.beta)
    }

    /// Both phases mapped into `(−π, π]`.
    pub fn normalized(&self) -> Self {
        Self::new(normalize_phase(self.alpha), normalize_phase(self.beta))
    }
}

/// Map an angle into `(−π, π]`.
pub fn normalize_phase(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = theta % two_pi;
    if r <= -PI {
        r += two_pi;
    } else if r > PI {
        r -= two_pi;
    }
    r
}

/// Signed distance between two angles on the circle, in `(−π, π]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    normalize_phase(a - b).abs()
}

/// Ordered sequence of phase pairs; `pairs[0]` is applied first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseSchedule {
    pairs: Vec<PhasePair>,
}

impl PhaseSchedule {
    pub fn new(pairs: Vec<PhasePair>) -> Self {
        Self { pairs }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Build a schedule that obeys the matching rule `β_j = −α_{k−j+1}`.
    pub fn matched(alphas: &[f64]) -> Self {
        let k = alphas.len();
        let pairs = (0..k).map(|j| PhasePair::new(alphas[j], -alphas[k - 1 - j])).collect();
        Self { pairs }
    }

    /// `k` copies of the same pair.
    pub fn repeated(pair: PhasePair, k: usize) -> Self {
        Self { pairs: vec![pair; k] }
    }

    pub fn from_phases(alphas: &[f64], betas: &[f64]) -> Result<Self> {
        if alphas.len() != betas.len() {
            return Err(Error::InvalidArgument(format!(
                "alphas and betas differ in length ({} vs {})",
                alphas.len(),
                betas.len()
            )));
        }
        let pairs: Vec<PhasePair> = alphas.iter().zip(betas).map(|(&a, &b)| PhasePair::new(a, b)).collect();
        for p in &pairs {
            p.validate()?;
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[PhasePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.alpha).collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.beta).collect()
    }

    /// First `j` pairs.
    pub fn prefix(&self, j: usize) -> Self {
        Self {
            pairs: self.pairs[..j.min(self.pairs.len())].to_vec(),
        }
    }

    /// Same pairs in reverse application order.
    pub fn reversed(&self) -> Self {
        Self {
            pairs: self.pairs.iter().rev().copied().collect(),
        }
    }

    /// Whole schedule repeated `times` times back to back.
    pub fn cycled(&self, times: usize) -> Self {
        let mut pairs = Vec::with_capacity(self.pairs.len() * times);
        for _ in 0..times {
            pairs.extend_from_slice(&self.pairs);
        }
        Self { pairs }
    }

    pub fn normalized(&self) -> Self {
        Self {
            pairs: self.pairs.iter().map(PhasePair::normalized).collect(),
        }
    }

    /// Whether `α_j = −β_{k−j+1}` holds for every `j`, modulo 2π.
    pub fn satisfies_matching_rule(&self) -> bool {
        self.matching_rule_defect() <= MATCHING_RULE_TOL
    }

    /// Largest violation of the matching rule, measured on the circle.
    pub fn matching_rule_defect(&self) -> f64 {
        let k = self.pairs.len();
        (0..k)
            .map(|j| angle_distance(self.pairs[j].alpha, -self.pairs[k - 1 - j].beta))
            .fold(0.0, f64::max)
    }

    pub fn to_file(&self) -> ScheduleFile {
        ScheduleFile {
            alphas: self.alphas(),
            betas: self.betas(),
        }
    }

    /// Parse the JSON schedule document. Phases are normalized to `(−π, π]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScheduleFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        file.into_schedule()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("schedule serializes")
    }
}

impl fmt::Display for PhaseSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", p.alpha, p.beta)?;
        }
        write!(f, "]")
    }
}

/// Serialized schedule: two equal-length arrays in application order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl ScheduleFile {
    pub fn into_schedule(self) -> Result<PhaseSchedule> {
        Ok(PhaseSchedule::from_phases(&self.alphas, &self.betas)?.normalized())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_maps_into_half_open_interval() {
        assert_eq!(normalize_phase(PI), PI);
        assert!((normalize_phase(-PI) - PI).abs() < 1e-15);
        assert!((normalize_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((normalize_phase(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-15);
        assert_eq!(normalize_phase(0.25), 0.25);
    }

    #[test]
    fn matched_builder_reverses_betas() {
        let s = PhaseSchedule::matched(&[0.1, 0.2, 0.3]);
        assert_eq!(s.betas(), vec![-0.3, -0.2, -0.1]);
        assert!(s.satisfies_matching_rule());
    }

    #[test]
    fn matching_rule_is_periodic() {
        // (π, π) is matched because −π ≡ π.
        assert!(PhaseSchedule::new(vec![PhasePair::grover()]).satisfies_matching_rule());
        let bad = PhaseSchedule::new(vec![PhasePair::new(0.5, -0.5), PhasePair::new(0.7, -0.5)]);
        assert!(!bad.satisfies_matching_rule());
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        assert!(matches!(
            PhaseSchedule::from_phases(&[1.0, 2.0], &[1.0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn non_finite_phase_is_rejected() {
        assert!(PhaseSchedule::from_phases(&[f64::NAN], &[0.0]).is_err());
    }

    #[test]
    fn json_round_trip_and_line_numbers() {
        let s = PhaseSchedule::matched(&[1.0, -2.0]);
        let back = PhaseSchedule::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);

        let broken = "{\n  \"alphas\": [1.0, 2.0],\n  \"betas\": [1.0,, 2.0]\n}";
        match PhaseSchedule::from_json(broken) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parsing_normalizes_phases() {
        let s = PhaseSchedule::from_json(r#"{"alphas": [4.0], "betas": [-4.0]}"#).unwrap();
        assert!((s.pairs()[0].alpha - (4.0 - 2.0 * PI)).abs() < 1e-15);
        assert!((s.pairs()[0].beta - (2.0 * PI - 4.0)).abs() < 1e-15);
    }
}
