//! Phase-matched amplitude amplification on the two-dimensional
//! marked/unmarked subspace.
//!
//! A search step multiplies marked amplitudes by `e^{iα}` and applies a
//! diffusion with phase `β`. Restricted to the span of the unmarked state
//! `|R⟩` and the marked state `|T⟩`, each step is a 2×2 unitary that
//! depends only on the marked fraction `λ = M/N`. Schedules of such steps
//! whose phases obey `α_j = −β_{k−j+1}` keep the unmarked amplitude real,
//! which turns exact success into root finding.
//!
//! ```
//! use phasematch::{apply_schedule, MarkedFraction, PhasePair, PhaseSchedule};
//!
//! let s = PhaseSchedule::new(vec![PhasePair::matched(std::f64::consts::FRAC_PI_2)]);
//! let p = apply_schedule(&s, MarkedFraction::new(0.5).unwrap()).success_probability();
//! assert!((p - 1.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod cubic;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod iteration;
pub mod nelder_mead;
pub mod operator;
pub mod roots;
pub mod schedule;
pub mod schemes;
pub mod single_pair;
pub mod statevector;
pub mod two_pair;

pub use error::{Error, Result};
pub use evolution::{
    apply_schedule, build_operator, midpoint_grid, probability_profile, uniform_grid, MarkedFraction,
    ProbabilityProfile,
};
pub use fit::{
    fit_schedule, reference_schedule, stage_profiles, unit_roots_and_minima, FitConfig, FitReport, Objective,
};
pub use operator::{Amplitudes, Operator2};
pub use schedule::{PhasePair, PhaseSchedule};
