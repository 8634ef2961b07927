//! Invariant suite on a compact grid with the configured physics.
//!
//! The compact grid keeps every lattice frequency resolved by the step
//! sizes of the order test, so the measured order reflects the splitting and
//! not the potential jump exciting unresolved modes.

use std::sync::Arc;

use fracscatter_core::{
    apply_modifier, apply_modifier_factorized, cauchy_defect, cauchy_defect_reduced, modifier_overlap,
    weak_overlap, weak_overlap_series, Complex64, Direction, FourierBackend, PhysicsParams, Radix2, Spectral,
    WaveField,
};
use serde_json::json;

use crate::backend::{self, RustFftBackend};
use crate::config::ExperimentConfig;
use crate::experiments::{
    free_group_law_error, probe_states, splitting_order, unitarity_drift, Check, Report, RunError, Setup, Table,
};

pub const COMPACT_POINTS: usize = 2048;
pub const COMPACT_HALF_LENGTH: f64 = 400.0;
pub const ORDER_STEPS: [f64; 3] = [0.1, 0.05, 0.025];
pub const ORDER_REFERENCE_DT: f64 = 0.003125;
pub const ORDER_TIME: f64 = 10.0;

fn max_diff(a: &WaveField, b: &WaveField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn bounded(name: &str, value: f64, limit: f64) -> Check {
    Check::new(name, value <= limit, format!("{value:.3e} <= {limit:.1e}"))
}

fn compact_config(cfg: &ExperimentConfig) -> ExperimentConfig {
    let mut c = cfg.clone();
    c.dim = 1;
    c.n_points = COMPACT_POINTS;
    c.half_length = COMPACT_HALF_LENGTH;
    c.t0 = 5.0;
    c.t_max = 40.0;
    c
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let params = cfg.params()?;
    let compact = compact_config(cfg);
    let setup = Setup::new(&compact, params)?;
    let prop = setup.propagator(params)?;
    let spectral = &setup.spectral;
    let mut checks = Vec::new();

    // Backends agree on a deterministic non-symmetric vector.
    let n = COMPACT_POINTS;
    let data: Vec<Complex64> = (0..n).map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64 * 0.11).cos())).collect();
    let mut a = data.clone();
    let mut b = data;
    let fast = RustFftBackend::new(n);
    fast.process(&mut a, &mut vec![Complex64::new(0.0, 0.0); fast.scratch_len()], Direction::Forward);
    Radix2::new(n).process(&mut b, &mut [], Direction::Forward);
    let diff = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    checks.push(bounded("backend_agreement", diff / (n as f64).sqrt(), 1e-12));

    checks.push(bounded("unitarity_1e4_steps", unitarity_drift(&setup, &prop, 10_000)?, 1e-10));
    checks.push(bounded("free_group_law", free_group_law_error(&setup, &prop, 13.0, 29.5)?, 1e-12));

    let phi = &setup.phi;
    let t = 30.0;
    let commuted = {
        let x = prop.free_propagate(&prop.apply_modifier(phi, t, false)?, t)?;
        let y = prop.apply_modifier(&prop.free_propagate(phi, t)?, t, false)?;
        max_diff(&x, &y)
    };
    checks.push(bounded("modifier_free_commute", commuted, 1e-12));
    let there = apply_modifier(phi, t, &params, false)?;
    checks.push(bounded("modifier_conjugate_identity", max_diff(&apply_modifier(&there, t, &params, true)?, phi), 1e-12));
    checks.push(bounded("factorization", max_diff(&there, &apply_modifier_factorized(phi, t, &params)?), 1e-12));

    let free = setup.propagator(params.with_lambda(0.0))?;
    checks.push(bounded(
        "zero_coupling_collapse",
        max_diff(&free.full_propagate(phi, 10.0)?, &free.free_propagate(phi, 10.0)?),
        1e-12,
    ));

    let (order, errors) = splitting_order(spectral, params, phi, ORDER_TIME, &ORDER_STEPS, ORDER_REFERENCE_DT)?;
    checks.push(Check::new(
        "strang_order",
        (1.8..=2.2).contains(&order),
        format!("order {order:.3} from errors {errors:?}"),
    ));
    let one_way = errors[1];
    let start = spectral.to_position(phi)?;
    let round_trip = prop.full_propagate(&prop.full_propagate(&start, t)?, -t)?;
    checks.push(bounded("backward_forward", round_trip.difference(&start)?.l2_norm(), 2.0 * one_way));

    checks.push(bounded("wave_operator_at_zero", max_diff(&prop.wave_operator_state(phi, 0.0, false)?, &start), 1e-12));
    checks.push(bounded("wave_operator_norm", (prop.wave_operator_state(phi, t, false)?.l2_norm() - 1.0).abs(), 1e-10));
    checks.push(bounded("free_wave_operator", free.wave_operator_state(phi, t, false)?.difference(&start)?.l2_norm(), 1e-10));

    let direct = cauchy_defect(&prop, phi, 10.0, 20.0, true)?;
    let reduced = cauchy_defect_reduced(&prop, phi, 10.0, 20.0, true)?;
    checks.push(bounded("reduced_defect", (direct - reduced).abs(), 1e-9));

    let probes = probe_states(&setup, &compact)?;
    let times = [0.0, 5.0, 12.5];
    let mut series_gap: f64 = 0.0;
    for (_, psi) in &probes {
        let series = weak_overlap_series(&prop, phi, psi, &times)?;
        for (&t, z) in times.iter().zip(&series) {
            series_gap = series_gap.max((weak_overlap(&prop, phi, psi, t)? - z).norm());
        }
    }
    checks.push(bounded("weak_series_matches_direct", series_gap, 1e-12));

    let half = PhysicsParams::new(0.5, params.gamma, params.lambda, params.epsilon)?;
    let half_setup = Setup::with_spectral(&compact, half, spectral.clone())?;
    let base = modifier_overlap(&half_setup.phi, &half_setup.phi, 0.0, &half)?.norm();
    let mut drift: f64 = 0.0;
    for t in [1.0, 1e3, 1e9, 1e20] {
        drift = drift.max((modifier_overlap(&half_setup.phi, &half_setup.phi, t, &half)?.norm() - base).abs());
    }
    checks.push(bounded("half_order_constant_modulus", drift, 1e-12));

    let doubled = setup.propagator(params.with_lambda(2.0 * params.lambda))?;
    let homogeneity = (doubled.cook_kuroda_integrand(phi, 20.0)? - 2.0 * prop.cook_kuroda_integrand(phi, 20.0)?).abs();
    checks.push(bounded("cook_homogeneity", homogeneity, 0.0));

    let config_grid = cfg.grid()?;
    let reference = backend::spectral(config_grid)?;
    let radix = Spectral::with_backend(config_grid, Arc::new(Radix2::new(config_grid.points_per_axis())))?;
    let field = WaveField::from_fn(config_grid, fracscatter_core::Representation::Position, |x| {
        Complex64::new((-(x[0] * x[0] + x[1] * x[1]) / 200.0).exp(), (0.3 * x[0]).sin() * 1e-3)
    });
    let gap = reference.to_frequency(&field)?.difference(&radix.to_frequency(&field)?)?.l2_norm();
    checks.push(bounded("config_grid_backends", gap / field.l2_norm(), 1e-12));

    let mut table = Table::new("", &["index", "passed"]);
    for (i, c) in checks.iter().enumerate() {
        table.push(vec![Some(i as f64), Some(if c.passed { 1.0 } else { 0.0 })]);
    }
    let summary = json!({
        "compact_grid": { "n_points": COMPACT_POINTS, "half_length": COMPACT_HALF_LENGTH },
        "strang_order": order,
        "strang_errors": errors,
        "checks": checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
    });
    Ok(Report {
        kind: cfg.kind,
        tables: vec![table],
        summary,
        checks,
        verdicts: Vec::new(),
    })
}
