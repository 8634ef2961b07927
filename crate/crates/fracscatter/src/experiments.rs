//! Experiment kinds: each produces tabular series, a JSON summary and a list
//! of checks.

use fracscatter_core::diagnostics::DecaySeries;
use fracscatter_core::symbols::t_factor_weight;
use fracscatter_core::{
    apply_modifier, build_wavepacket, cauchy_defect_reduced, cook_kuroda_series, cumulative_trapezoid,
    decade_increments, fit_loglog_slope, inner_product, modifier_overlap, steps_for, t_factor, weak_overlap_series,
    Complex64, Error, LogLogFit, PacketSpec, PhysicsParams, Propagator, Representation, Spectral, TimeSchedule,
    WaveField,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::backend;
use crate::config::{ConfigError, ExperimentConfig, Kind};
use crate::probes;
use crate::selftest;

/// Outer fraction of the box watched for wrap-around.
pub const EDGE_FRACTION: f64 = 0.05;
/// Mass allowed in the outer strip, relative to the total.
pub const EDGE_MASS_LIMIT: f64 = 1e-8;
/// Ratio cap the Cook–Kuroda trapezoid grid is built with.
pub const COOK_RATIO: f64 = 1.2;
/// Lower limit of the Cook–Kuroda integral.
pub const COOK_START: f64 = 1.0;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure{}: {source}", at.map(|t| format!(" at t = {t}")).unwrap_or_default())]
    Numerical { at: Option<f64>, source: Error },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical { .. } => 2,
            RunError::Io(_) => 3,
        }
    }
}

impl From<Error> for RunError {
    fn from(source: Error) -> Self {
        RunError::Numerical { at: None, source }
    }
}

fn at(t: f64) -> impl Fn(Error) -> RunError {
    move |source| RunError::Numerical { at: Some(t), source }
}

/// One CSV worth of rows; `None` cells are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Appended to the file stem; empty for the kind's main series.
    pub suffix: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(suffix: &str, columns: &[&str]) -> Self {
        Self {
            suffix: suffix.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub kind: Kind,
    pub tables: Vec<Table>,
    pub summary: Value,
    /// Numerical validation; any failure gives exit code 2.
    pub checks: Vec<Check>,
    /// Physics thresholds the kind defines; recorded, never fatal.
    pub verdicts: Vec<Check>,
}

impl Report {
    pub fn validated(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Grid, transform, packet and schedule for one parameter point.
#[derive(Debug, Clone)]
pub struct Setup {
    pub spectral: Spectral,
    pub params: PhysicsParams,
    pub packet: PacketSpec,
    pub schedule: TimeSchedule,
    /// Initial packet, frequency representation.
    pub phi: WaveField,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig, params: PhysicsParams) -> Result<Self, RunError> {
        let spectral = backend::spectral(cfg.grid()?)?;
        Self::with_spectral(cfg, params, spectral)
    }

    pub fn with_spectral(cfg: &ExperimentConfig, params: PhysicsParams, spectral: Spectral) -> Result<Self, RunError> {
        let packet = cfg.packet();
        let schedule = cfg.schedule()?;
        let phi = build_wavepacket(spectral.grid(), &params, &packet)?;
        Ok(Self {
            spectral,
            params,
            packet,
            schedule,
            phi,
        })
    }

    pub fn propagator(&self, params: PhysicsParams) -> Result<Propagator, RunError> {
        Ok(Propagator::new(self.spectral.clone(), params, self.schedule.dt())?)
    }

    /// Fraction of `e^{-itω}φ` in the outer strip of the box.
    pub fn free_edge_mass(&self, prop: &Propagator, t: f64) -> Result<f64, RunError> {
        let g = prop.free_propagate(&self.phi, t).map_err(at(t))?;
        let g = self.spectral.to_position(&g)?;
        Ok(g.edge_mass_fraction(EDGE_FRACTION)?)
    }
}

/// `(t, 2t)` for every scheduled `t` with `2t` still on the schedule horizon.
pub fn doubling_pairs(schedule: &TimeSchedule) -> Vec<(f64, f64)> {
    let dt = schedule.dt();
    schedule
        .diagnostic_times()
        .iter()
        .filter(|&&t| 2.0 * t <= schedule.t_max() * (1.0 + 1e-12))
        .map(|&t| (t, (2.0 * t / dt).round() * dt))
        .collect()
}

/// `defect(t1, t2)` for each pair, pairs evaluated in parallel.
pub fn defect_series(setup: &Setup, prop: &Propagator, pairs: &[(f64, f64)], modified: bool) -> Result<Vec<f64>, RunError> {
    pairs
        .par_iter()
        .map(|&(t1, t2)| cauchy_defect_reduced(prop, &setup.phi, t1, t2, modified).map_err(at(t2)))
        .collect()
}

/// `|defect(dt) - defect(dt/2)|` at one pair.
pub fn halving_floor(setup: &Setup, prop: &Propagator, pair: (f64, f64), modified: bool) -> Result<f64, RunError> {
    let fine = Propagator::new(setup.spectral.clone(), *prop.params(), prop.dt() / 2.0)?;
    let (coarse, fine) = rayon::join(
        || cauchy_defect_reduced(prop, &setup.phi, pair.0, pair.1, modified),
        || cauchy_defect_reduced(&fine, &setup.phi, pair.0, pair.1, modified),
    );
    Ok((coarse.map_err(at(pair.1))? - fine.map_err(at(pair.1))?).abs())
}

/// Slope of `values` against the first time of each pair over `window`.
pub fn pair_fit(pairs: &[(f64, f64)], values: &[f64], window: (f64, f64)) -> Result<LogLogFit, RunError> {
    let t: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    Ok(fit_loglog_slope(&t, values, window)?)
}

fn fit_json(fit: &Result<LogLogFit, RunError>) -> Value {
    match fit {
        Ok(f) => json!({
            "slope": f.slope,
            "intercept": f.intercept,
            "residual": f.residual,
            "window": [f.window.0, f.window.1],
            "points": f.points,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Default fit window: the first half of the schedule horizon.
fn defect_window(cfg: &ExperimentConfig) -> (f64, f64) {
    (cfg.t0, cfg.t_max / 2.0)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    cfg.validate()?;
    match cfg.kind {
        Kind::Cauchy => run_cauchy(cfg, false),
        Kind::DollardCauchy => run_cauchy(cfg, true),
        Kind::Weaklimit => run_weaklimit(cfg),
        Kind::Cook => run_cook(cfg),
        Kind::ModifierRl => run_modifier(cfg),
        Kind::Sweep => run_sweep(cfg),
        Kind::Selftest => selftest::run(cfg),
    }
}

fn run_cauchy(cfg: &ExperimentConfig, modified: bool) -> Result<Report, RunError> {
    let params = cfg.params()?;
    let setup = Setup::new(cfg, params)?;
    let prop = setup.propagator(params)?;
    let free = setup.propagator(params.with_lambda(0.0))?;
    let pairs = doubling_pairs(&setup.schedule);
    if pairs.is_empty() {
        return Err(ConfigError::Value {
            key: "t_max".into(),
            value: cfg.t_max.to_string(),
            reason: "needs t_max >= 2·t0 for defect(t, 2t)".into(),
        }
        .into());
    }
    let defects = defect_series(&setup, &prop, &pairs, modified)?;
    let floors = defect_series(&setup, &free, &pairs, modified)?;
    let last = *pairs.last().unwrap();
    let halving = halving_floor(&setup, &prop, last, modified)?;
    let edge = pairs
        .iter()
        .map(|&(_, t2)| setup.free_edge_mass(&prop, t2))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new("", &["t1", "t2", "defect", "floor_zero_coupling", "floor_dt_halving", "edge_mass"]);
    for (i, &(t1, t2)) in pairs.iter().enumerate() {
        let h = (i + 1 == pairs.len()).then_some(halving);
        table.push(vec![Some(t1), Some(t2), Some(defects[i]), Some(floors[i]), h, Some(edge[i])]);
    }

    let window = defect_window(cfg);
    let fit = pair_fit(&pairs, &defects, window);
    let last_defect = *defects.last().unwrap();
    let floor = *floors.last().unwrap();
    let max_edge = max_of(edge.iter().copied());

    let checks = vec![
        Check::new(
            "no_wrap",
            max_edge < EDGE_MASS_LIMIT,
            format!("max edge mass {max_edge:.3e} (limit {EDGE_MASS_LIMIT:e})"),
        ),
        Check::new(
            "finite",
            defects.iter().all(|d| d.is_finite()),
            "all defects finite".into(),
        ),
    ];
    let slope = fit.as_ref().map(|f| f.slope).unwrap_or(f64::NAN);
    let mut verdicts = Vec::new();
    if modified {
        verdicts.push(Check::new("modified_decay", slope < -0.5, format!("slope {slope:.3} < -0.5")));
    } else if params.gamma > 1.0 {
        verdicts.push(Check::new("short_range_decay", slope < -0.7, format!("slope {slope:.3} < -0.7")));
    } else {
        verdicts.push(Check::new("no_decay", slope > -0.2, format!("slope {slope:.3} > -0.2")));
        verdicts.push(Check::new(
            "above_floor",
            last_defect > 10.0 * floor,
            format!("defect {last_defect:.4e} > 10 x zero-coupling floor {floor:.3e} (dt-halving {halving:.3e})"),
        ));
    }

    let summary = json!({
        "modified": modified,
        "fit": fit_json(&fit),
        "last_pair": [last.0, last.1],
        "last_defect": last_defect,
        "floor_zero_coupling": floors.last(),
        "floor_dt_halving": halving,
        "max_edge_mass": max_edge,
    });
    Ok(Report {
        kind: cfg.kind,
        tables: vec![table],
        summary,
        checks,
        verdicts,
    })
}

/// Both probes of the weak-limit experiment, position representation.
pub fn probe_states(setup: &Setup, cfg: &ExperimentConfig) -> Result<Vec<(&'static str, WaveField)>, RunError> {
    let shifted = probes::translated(&setup.phi, probes::PROBE_SHIFT)?;
    let shifted = setup.spectral.to_position(&shifted)?;
    let random = probes::random_band_limited(&setup.spectral, &setup.packet, setup.params.epsilon, cfg.seed)?;
    Ok(vec![("shifted", shifted), ("random", random)])
}

/// `‖W(t)φ‖ - 1` at `t`.
pub fn wave_operator_norm_drift(setup: &Setup, prop: &Propagator, t: f64) -> Result<f64, RunError> {
    let w = prop.wave_operator_state(&setup.phi, t, false).map_err(at(t))?;
    Ok(w.l2_norm() - setup.phi.l2_norm())
}

fn run_weaklimit(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let params = cfg.params()?;
    let setup = Setup::new(cfg, params)?;
    let prop = setup.propagator(params)?;
    let times = setup.schedule.diagnostic_times().to_vec();
    let probes = probe_states(&setup, cfg)?;
    let t_end = setup.schedule.t_max();

    let overlaps = probes
        .par_iter()
        .map(|(_, psi)| weak_overlap_series(&prop, &setup.phi, psi, &times).map_err(at(t_end)))
        .collect::<Result<Vec<_>, _>>()?;
    let drift = wave_operator_norm_drift(&setup, &prop, t_end)?;
    let edge = times
        .iter()
        .map(|&t| setup.free_edge_mass(&prop, t))
        .collect::<Result<Vec<_>, _>>()?;

    let mut tables = Vec::new();
    let mut probe_summaries = Vec::new();
    let mut verdicts = Vec::new();
    for ((name, _), series) in probes.iter().zip(&overlaps) {
        let mut table = Table::new(name, &["t", "re", "im", "modulus"]);
        for (&t, z) in times.iter().zip(series) {
            table.push(vec![Some(t), Some(z.re), Some(z.im), Some(z.norm())]);
        }
        tables.push(table);
        let first = series.first().map(|z| z.norm()).unwrap_or(f64::NAN);
        let last = series.last().map(|z| z.norm()).unwrap_or(f64::NAN);
        let factor = first / last;
        verdicts.push(Check::new(
            &format!("weak_decay_{name}"),
            factor >= 5.0,
            format!("|overlap| {first:.4e} -> {last:.4e}, factor {factor:.3} >= 5"),
        ));
        probe_summaries.push(json!({
            "probe": name,
            "first": first,
            "last": last,
            "decay_factor": factor,
        }));
    }
    let mut norm_table = Table::new("norm", &["t", "norm_drift"]);
    norm_table.push(vec![Some(t_end), Some(drift)]);
    tables.push(norm_table);

    let max_edge = max_of(edge.iter().copied());
    let checks = vec![
        Check::new(
            "norm",
            drift.abs() < 1e-10,
            format!("|W(t_max)φ| - 1 = {drift:.3e}"),
        ),
        Check::new(
            "no_wrap",
            max_edge < EDGE_MASS_LIMIT,
            format!("max edge mass {max_edge:.3e} (limit {EDGE_MASS_LIMIT:e})"),
        ),
    ];
    let summary = json!({
        "probes": probe_summaries,
        "probe_shift": probes::PROBE_SHIFT,
        "norm_drift": drift,
        "max_edge_mass": max_edge,
    });
    Ok(Report {
        kind: cfg.kind,
        tables,
        summary,
        checks,
        verdicts,
    })
}

/// Trapezoid grid for the Cook–Kuroda integral: the schedule's geometric
/// progression continued down to [`COOK_START`], refined to a ratio of at
/// most [`COOK_RATIO`], plus the decade points `t0·10^k`.
pub fn cook_times(cfg: &ExperimentConfig) -> Vec<f64> {
    let ratio = cfg.ratio.min(COOK_RATIO);
    let mut times = vec![COOK_START];
    let mut k = ((COOK_START / cfg.t0).ln() / ratio.ln()).ceil() as i32;
    loop {
        let t = cfg.t0 * ratio.powi(k);
        if t > cfg.t_max * (1.0 + 1e-12) {
            break;
        }
        if t > COOK_START {
            times.push(t);
        }
        k += 1;
    }
    let mut decade = cfg.t0;
    while decade <= cfg.t_max * (1.0 + 1e-12) {
        times.push(decade);
        decade *= 10.0;
    }
    times.push(cfg.t_max);
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
    times
}

/// Integrand and running integral on [`cook_times`].
pub fn cook_run(setup: &Setup, prop: &Propagator, cfg: &ExperimentConfig) -> Result<(DecaySeries, DecaySeries), RunError> {
    let times = cook_times(cfg);
    let chunks: Vec<&[f64]> = times.chunks(8).collect();
    let parts = chunks
        .par_iter()
        .map(|c| cook_kuroda_series(prop, &setup.phi, c).map(|s| s.values().to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    let integrand = DecaySeries::new(times, parts.concat())?;
    let cumulative = cumulative_trapezoid(&integrand)?;
    Ok((integrand, cumulative))
}

fn run_cook(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let params = cfg.params()?;
    let setup = Setup::new(cfg, params)?;
    let prop = setup.propagator(params)?;
    let (integrand, cumulative) = cook_run(&setup, &prop, cfg)?;
    let edge = setup.free_edge_mass(&prop, cfg.t_max)?;

    let mut table = Table::new("", &["t", "integrand", "cumulative"]);
    for ((&t, &v), &c) in integrand.times().iter().zip(integrand.values()).zip(cumulative.values()) {
        table.push(vec![Some(t), Some(v), Some(c)]);
    }
    let window = (cfg.t0, (10.0 * cfg.t0).min(cfg.t_max));
    let fit = fit_loglog_slope(integrand.times(), integrand.values(), window).map_err(RunError::from);
    let slope = fit.as_ref().map(|f| f.slope).unwrap_or(f64::NAN);
    let decades = decade_increments(&cumulative, cfg.t0);
    let ratios: Vec<f64> = decades.windows(2).map(|w| w[1].1 / w[0].1).collect();
    let total = *cumulative.values().last().unwrap();
    let tail = cumulative.increment(cfg.t_max / 2.0, cfg.t_max).unwrap_or(f64::NAN);
    let tail_share = tail / total;

    let mut verdicts = vec![Check::new(
        "integrand_slope",
        (slope + params.gamma).abs() <= 0.15,
        format!("slope {slope:.3} vs -gamma = {:.3} (±0.15)", -params.gamma),
    )];
    if params.gamma > 1.0 {
        verdicts.push(Check::new(
            "tail_share",
            tail_share < 0.05,
            format!("increment over last doubling / total = {tail_share:.4} < 0.05"),
        ));
        if !ratios.is_empty() {
            verdicts.push(Check::new(
                "decades_decay",
                ratios.iter().all(|&r| r < 0.5),
                format!("decade increment ratios {ratios:.3?} < 0.5"),
            ));
        }
    } else if params.gamma == 1.0 && !ratios.is_empty() {
        verdicts.push(Check::new(
            "decades_stable",
            ratios.iter().all(|r| (0.7..=1.3).contains(r)),
            format!("decade increment ratios {ratios:.3?} in [0.7, 1.3]"),
        ));
    }
    let checks = vec![
        Check::new(
            "no_wrap",
            edge < EDGE_MASS_LIMIT,
            format!("edge mass at t_max {edge:.3e}"),
        ),
        Check::new(
            "bound",
            integrand.values().iter().all(|&v| v <= params.lambda.abs() * (1.0 + 1e-12)),
            "integrand <= |lambda|".into(),
        ),
    ];
    let summary = json!({
        "start": COOK_START,
        "fit": fit_json(&fit),
        "decade_increments": decades.iter().map(|d| json!({"from": d.0, "increment": d.1})).collect::<Vec<_>>(),
        "decade_ratios": ratios,
        "total": total,
        "tail_increment": tail,
        "tail_share": tail_share,
        "edge_mass": edge,
    });
    Ok(Report {
        kind: cfg.kind,
        tables: vec![table],
        summary,
        checks,
        verdicts,
    })
}

/// `λT(t)` times the spread of `|ξ|^{-γ(2ρ-1)}` over the packet band: the
/// phase range the modifier sweeps across the packet at time `t`.
pub fn modifier_phase_span(params: &PhysicsParams, packet: &PacketSpec, t: f64) -> f64 {
    let activation = params.support_activation_time();
    if t <= activation {
        return 0.0;
    }
    let tf = t_factor(t, params).unwrap_or(0.0);
    let lo = packet.min_frequency(params.epsilon);
    let hi = packet.max_frequency();
    (params.lambda * tf * (t_factor_weight(lo, params) - t_factor_weight(hi, params))).abs()
}

/// `(M(t)φ, φ)` over the geometric schedule `t0·ratio^k ≤ t_max`. Not tied
/// to the time-step lattice: the modifier is a pure multiplier.
pub fn modifier_series(setup: &Setup, cfg: &ExperimentConfig) -> Result<(Vec<f64>, Vec<Complex64>), RunError> {
    let mut times = Vec::new();
    let mut k = 0;
    loop {
        let t = cfg.t0 * cfg.ratio.powi(k);
        if t > cfg.t_max * (1.0 + 1e-12) {
            break;
        }
        times.push(t);
        k += 1;
    }
    let values = times
        .par_iter()
        .map(|&t| modifier_overlap(&setup.phi, &setup.phi, t, &setup.params).map_err(at(t)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((times, values))
}

fn run_modifier(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let params = cfg.params()?;
    let setup = Setup::new(cfg, params)?;
    let (times, values) = modifier_series(&setup, cfg)?;
    let base = inner_product(&setup.phi, &setup.phi)?.norm();
    let mut table = Table::new("", &["t", "re", "im", "modulus", "phase_span"]);
    for (&t, z) in times.iter().zip(&values) {
        let span = modifier_phase_span(&params, &setup.packet, t);
        table.push(vec![Some(t), Some(z.re), Some(z.im), Some(z.norm()), Some(span)]);
    }
    let moduli: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    let min = moduli.iter().copied().fold(f64::INFINITY, f64::min);
    let deviation = max_of(moduli.iter().map(|m| (m - base).abs()));
    let first_below = times.iter().zip(&moduli).find(|(_, &m)| m < 0.2).map(|(&t, _)| t);
    let unitary = apply_modifier(&setup.phi, cfg.t_max, &params, false)?.l2_norm();

    let verdicts = if params.rho == 0.5 {
        vec![Check::new(
            "constant_modulus",
            deviation <= 1e-12,
            format!("max ||(M(t)φ,φ)| - |(φ,φ)|| = {deviation:.3e}"),
        )]
    } else {
        vec![Check::new(
            "riemann_lebesgue",
            first_below.is_some(),
            format!("min |overlap| {min:.4e}; first below 0.2 at {first_below:?}"),
        )]
    };
    let checks = vec![Check::new(
        "unitary",
        (unitary - setup.phi.l2_norm()).abs() < 1e-12,
        format!("|M(t_max)φ| = {unitary}"),
    )];
    let summary = json!({
        "plain_overlap": base,
        "min_modulus": min,
        "max_deviation": deviation,
        "first_below_0.2": first_below,
    });
    Ok(Report {
        kind: cfg.kind,
        tables: vec![table],
        summary,
        checks,
        verdicts,
    })
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let points = cfg.parameter_points()?;
    let spectral = backend::spectral(cfg.grid()?)?;
    let window = defect_window(cfg);
    let results = points
        .par_iter()
        .map(|&params| -> Result<_, RunError> {
            let setup = Setup::with_spectral(cfg, params, spectral.clone())?;
            let prop = setup.propagator(params)?;
            let pairs = doubling_pairs(&setup.schedule);
            let defects = defect_series(&setup, &prop, &pairs, false)?;
            let edge = max_of(
                pairs
                    .iter()
                    .map(|&(_, t2)| setup.free_edge_mass(&prop, t2))
                    .collect::<Result<Vec<_>, _>>()?,
            );
            Ok((params, pairs, defects, edge))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new("", &["rho", "gamma", "lambda", "t1", "t2", "defect"]);
    let mut rows = Vec::new();
    let mut max_edge: f64 = 0.0;
    for (params, pairs, defects, edge) in &results {
        max_edge = max_edge.max(*edge);
        for (&(t1, t2), &d) in pairs.iter().zip(defects) {
            table.push(vec![Some(params.rho), Some(params.gamma), Some(params.lambda), Some(t1), Some(t2), Some(d)]);
        }
        let fit = pair_fit(pairs, defects, window);
        rows.push(json!({
            "rho": params.rho,
            "gamma": params.gamma,
            "lambda": params.lambda,
            "fit": fit_json(&fit),
            "last_defect": defects.last(),
        }));
    }
    let checks = vec![Check::new(
        "no_wrap",
        max_edge < EDGE_MASS_LIMIT,
        format!("max edge mass {max_edge:.3e}"),
    )];
    Ok(Report {
        kind: cfg.kind,
        tables: vec![table],
        summary: json!({ "points": rows }),
        checks,
        verdicts: Vec::new(),
    })
}

/// `free(free(φ, t1), t2)` against `free(φ, t1 + t2)`, max bin difference.
pub fn free_group_law_error(setup: &Setup, prop: &Propagator, t1: f64, t2: f64) -> Result<f64, RunError> {
    let two = prop.free_propagate(&prop.free_propagate(&setup.phi, t1)?, t2)?;
    let one = prop.free_propagate(&setup.phi, t1 + t2)?;
    Ok(max_of(two.values().iter().zip(one.values()).map(|(a, b)| (a - b).norm())))
}

/// Drift of `‖e^{-itH}φ‖` over `steps` Strang steps.
pub fn unitarity_drift(setup: &Setup, prop: &Propagator, steps: u64) -> Result<f64, RunError> {
    let mut g = setup.spectral.to_position(&setup.phi)?;
    prop.evolve_in_place(g.values_mut(), steps, false);
    Ok((g.l2_norm() - setup.phi.l2_norm()).abs())
}

/// Errors at `t` for each step size against a `reference_dt` run, and the
/// least-squares order through them.
pub fn splitting_order(
    spectral: &Spectral,
    params: PhysicsParams,
    phi: &WaveField,
    t: f64,
    steps: &[f64],
    reference_dt: f64,
) -> Result<(f64, Vec<f64>), RunError> {
    let start = spectral.represent(phi, Representation::Position)?;
    let run = |dt: f64| -> Result<WaveField, RunError> {
        steps_for(t, dt)?;
        Ok(Propagator::new(spectral.clone(), params, dt)?.full_propagate(&start, t)?)
    };
    let reference = run(reference_dt)?;
    let errors = steps
        .par_iter()
        .map(|&dt| Ok(run(dt)?.difference(&reference)?.l2_norm()))
        .collect::<Result<Vec<f64>, RunError>>()?;
    let xs: Vec<f64> = steps.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok((sxy / sxx, errors))
}
