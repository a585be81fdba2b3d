use std::f64::consts::{FRAC_PI_2, PI};

use phasematch::evolution::{apply_schedule, midpoint_grid, uniform_grid, MarkedFraction};
use phasematch::fit::{
    fit_objective, fit_schedule, reference_schedule, stage_profiles, unit_roots_and_minima, FitConfig, Objective,
};
use phasematch::nelder_mead::{minimize, Minimum, NelderMeadOptions};
use phasematch::schedule::PhaseSchedule;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn min_on(s: &PhaseSchedule, lo: f64, hi: f64) -> f64 {
    let l = unit_roots_and_minima(s, (lo, hi)).unwrap();
    let p = |x: f64| apply_schedule(s, MarkedFraction::new(x).unwrap()).success_probability();
    l.local_minima
        .iter()
        .map(|m| m.1)
        .chain([p(lo), p(hi)])
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn six_phase_fit_profile() {
    let r = fit_schedule(&FitConfig::new(6, 0)).unwrap();
    assert!(r.converged);
    assert!(r.schedule().satisfies_matching_rule());
    assert_eq!(r.unit_roots.len(), 6);
    for &x in &r.unit_roots {
        let p = apply_schedule(&r.schedule(), MarkedFraction::new(x).unwrap()).success_probability();
        assert!((1.0 - p).abs() <= 1e-8);
    }
    // Least squares on this grid trades the 0.998 floor for a smaller residual
    // than the reference phases.
    let floor = min_on(&r.schedule(), 0.1, 1.0);
    assert!(floor >= 0.9975, "{floor}");
    let grid = uniform_grid(0.1, 1.0, 512);
    let reference = fit_objective(&reference_schedule().alphas(), &grid, Objective::SumOfSquares).unwrap();
    assert!(r.objective_value < reference);
    let c = &r.canonical_alphas;
    assert!(c[0] >= 0.0 && c[0] <= PI);
}

#[test]
fn fit_json_rounds_phases() {
    let cfg = FitConfig::new(2, 5)
        .with_restarts(4)
        .with_grid(uniform_grid(0.3, 1.0, 64));
    let r = fit_schedule(&cfg).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for a in v["alphas"].as_array().unwrap() {
        let s = a.as_f64().unwrap().to_string();
        let digits = s.chars().filter(char::is_ascii_digit).collect::<String>();
        assert!(digits.trim_start_matches('0').len() <= 9, "{s}");
    }
    assert_eq!(v["objective"], "sum-of-squares");
}

#[test]
fn one_phase_absolute_fit_recovers_half_pi() {
    let cfg = FitConfig::new(1, 0)
        .with_grid(midpoint_grid(0.0, 1.0, 512))
        .with_objective(Objective::SumOfAbsolute);
    let r = fit_schedule(&cfg).unwrap();
    assert!((r.canonical_alphas[0] - FRAC_PI_2).abs() < 1e-6);
    let (_, p) = r.local_minima[0];
    assert!(p >= 25.0 / 27.0 - 1e-6);
}

#[test]
fn one_phase_least_squares_prefers_another_phase() {
    let cfg = FitConfig::new(1, 0).with_grid(uniform_grid(0.001, 1.0, 512));
    let r = fit_schedule(&cfg).unwrap();
    assert!((r.canonical_alphas[0].cos() + 0.193).abs() < 0.01);
}

#[test]
fn two_phase_fit() {
    let r = fit_schedule(&FitConfig::new(2, 0).with_grid(uniform_grid(0.09, 1.0, 512))).unwrap();
    assert!(r.schedule().satisfies_matching_rule());
    assert_eq!(r.unit_roots.len(), 2);
    assert_eq!(r.local_minima.len(), 2);
}

#[test]
fn five_phase_fit_keeps_roots() {
    let r = fit_schedule(&FitConfig::new(5, 1)).unwrap();
    assert!(r.schedule().satisfies_matching_rule());
    assert_eq!(r.unit_roots.len(), 5);
}

#[test]
fn matching_rule_emerges_without_constraint() {
    let grid = uniform_grid(0.1, 1.0, 256);
    let obj = |x: &[f64]| {
        let s = PhaseSchedule::from_phases(&x[..2], &x[2..]).unwrap();
        grid.iter()
            .map(|&l| (1.0 - apply_schedule(&s, MarkedFraction::new(l).unwrap()).success_probability()).powi(2))
            .sum::<f64>()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut best: Option<Minimum> = None;
    for _ in 0..32 {
        let start: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let mut m = minimize(obj, &start, &NelderMeadOptions::default());
        for _ in 0..3 {
            m = minimize(obj, &m.x, &NelderMeadOptions::default());
        }
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let b = best.unwrap();
    let s = PhaseSchedule::from_phases(&b.x[..2], &b.x[2..]).unwrap();
    assert!(s.matching_rule_defect() < 1e-6, "{}", s.matching_rule_defect());
    let constrained = fit_schedule(&FitConfig::new(2, 0).with_grid(grid.clone())).unwrap();
    assert!((constrained.objective_value - b.value).abs() < 1e-9);
}

#[test]
fn stage_profiles_of_reference_schedule() {
    let grid = uniform_grid(0.0, 1.0, 2001);
    let p = stage_profiles(&reference_schedule(), &grid).unwrap();
    assert_eq!(p.stage_count(), 6);
    let floor = p.final_min_on(0.1, 1.0).unwrap();
    assert!(floor > 0.9979, "{floor}");
    let gap = p
        .stage(5)
        .unwrap()
        .iter()
        .zip(p.stage(6).unwrap())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(gap > 0.1);
    let empty = stage_profiles(&PhaseSchedule::empty(), &grid).unwrap();
    assert_eq!(empty.final_stage(), &grid[..]);
}
