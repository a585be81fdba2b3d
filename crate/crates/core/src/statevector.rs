//! Full `2^n`-amplitude simulation of the oracle and diffusion steps, used
//! to check the two-dimensional reduction.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evolution::{evolve_stages, MarkedFraction, StepFactors};
use crate::schedule::PhaseSchedule;

pub const MAX_QUBITS: u32 = 14;
pub const MAX_SCHEDULE_LEN: usize = 32;

fn check_qubits(n: u32) -> Result<usize> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(Error::ResourceBound(format!(
            "qubit count must lie in 1..={MAX_QUBITS}, got {n}"
        )));
    }
    Ok(1usize << n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: u32,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(n: u32, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = check_qubits(n)?;
        if amplitudes.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "expected {dim} amplitudes for {n} qubits, got {}",
                amplitudes.len()
            )));
        }
        Ok(Self { n, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: u32, index: usize) -> Result<Self> {
        let dim = check_qubits(n)?;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    pub fn qubits(&self) -> u32 {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn probability_of(&self, marked: &MarkedSet) -> f64 {
        marked.indices.iter().map(|&i| self.amplitudes[i].norm_sqr()).sum()
    }
}

/// Uniform superposition of all `2^n` basis states.
pub fn init_database(n: u32) -> Result<StateVector> {
    let dim = check_qubits(n)?;
    let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    Ok(StateVector {
        n,
        amplitudes: vec![a; dim],
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedSet {
    n: u32,
    indices: BTreeSet<usize>,
}

impl MarkedSet {
    pub fn new(n: u32, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let dim = check_qubits(n)?;
        let mut set = BTreeSet::new();
        for i in indices {
            if i >= dim {
                return Err(Error::InvalidArgument(format!(
                    "marked index {i} out of range for {n} qubits"
                )));
            }
            if !set.insert(i) {
                return Err(Error::InvalidArgument(format!("marked index {i} repeated")));
            }
        }
        if set.is_empty() {
            return Err(Error::InvalidArgument("at least one marked index is required".into()));
        }
        Ok(Self { n, indices: set })
    }

    /// Indices `0..count`.
    pub fn first(n: u32, count: usize) -> Result<Self> {
        Self::new(n, 0..count)
    }

    /// `count` distinct indices drawn with a seeded generator.
    pub fn random(n: u32, count: usize, seed: u64) -> Result<Self> {
        let dim = check_qubits(n)?;
        if count == 0 || count > dim {
            return Err(Error::InvalidArgument(format!("need 1 <= M <= {dim}, got {count}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new(n, sample(&mut rng, dim, count))
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn fraction(&self) -> MarkedFraction {
        MarkedFraction::from_counts(self.len() as u64, 1u64 << self.n).expect("nonempty marked set")
    }
}

/// Multiply every marked amplitude by `e^{iα}`.
pub fn apply_oracle(state: &mut StateVector, marked: &MarkedSet, alpha: f64) {
    let w = Complex64::cis(alpha);
    for &i in &marked.indices {
        state.amplitudes[i] *= w;
    }
}

/// `e^{iβ} I + (1 − e^{iβ}) |φ⟩⟨φ|` with `|φ⟩` the uniform state, applied
/// through the mean amplitude.
pub fn apply_diffusion(state: &mut StateVector, beta: f64) {
    let e = Complex64::cis(beta);
    let dim = state.amplitudes.len() as f64;
    let mean = state.amplitudes.iter().sum::<Complex64>() / dim;
    let shift = (Complex64::new(1.0, 0.0) - e) * mean;
    for a in &mut state.amplitudes {
        *a = e * *a + shift;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckReport {
    /// `P_full` after each stage `1..=k`.
    pub full_probabilities: Vec<f64>,
    /// `|d_j|²` from the two-dimensional model.
    pub reduced_probabilities: Vec<f64>,
    pub max_gap: f64,
    /// Largest spread among marked amplitudes over all stages.
    pub marked_spread: f64,
    /// Same for unmarked amplitudes.
    pub unmarked_spread: f64,
    pub max_norm_defect: f64,
}

impl CrossCheckReport {
    pub fn within(&self, tol: f64) -> bool {
        self.max_gap <= tol && self.marked_spread <= tol && self.unmarked_spread <= tol
    }
}

fn spread(values: impl Iterator<Item = Complex64>) -> f64 {
    let v: Vec<Complex64> = values.collect();
    match v.first() {
        Some(&first) => v.iter().map(|a| (a - first).norm()).fold(0.0, f64::max),
        None => 0.0,
    }
}

/// Run `schedule` on the full state and on the reduced model and compare
/// success probabilities stage by stage.
pub fn cross_check(schedule: &PhaseSchedule, marked: &MarkedSet) -> Result<CrossCheckReport> {
    let n = marked.n;
    check_qubits(n)?;
    if schedule.len() > MAX_SCHEDULE_LEN {
        return Err(Error::ResourceBound(format!(
            "schedule length must be at most {MAX_SCHEDULE_LEN}, got {}",
            schedule.len()
        )));
    }
    let factors: Vec<StepFactors> = schedule.pairs().iter().map(|&p| StepFactors::new(p)).collect();
    let reduced: Vec<f64> = evolve_stages(&factors, marked.fraction().value())
        .iter()
        .skip(1)
        .map(|a| a.success_probability())
        .collect();

    let mut state = init_database(n)?;
    let mut full = Vec::with_capacity(schedule.len());
    let (mut marked_spread, mut unmarked_spread, mut max_norm_defect) = (0.0f64, 0.0f64, 0.0f64);
    for pair in schedule.pairs() {
        apply_oracle(&mut state, marked, pair.alpha);
        apply_diffusion(&mut state, pair.beta);
        full.push(state.probability_of(marked));
        let amps = &state.amplitudes;
        marked_spread = marked_spread.max(spread(marked.indices().map(|i| amps[i])));
        unmarked_spread = unmarked_spread.max(spread(
            (0..amps.len()).filter(|i| !marked.contains(*i)).map(|i| amps[i]),
        ));
        max_norm_defect = max_norm_defect.max((state.norm_sqr() - 1.0).abs());
    }
    let max_gap = full
        .iter()
        .zip(&reduced)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(CrossCheckReport {
        full_probabilities: full,
        reduced_probabilities: reduced,
        max_gap,
        marked_spread,
        unmarked_spread,
        max_norm_defect,
    })
}
