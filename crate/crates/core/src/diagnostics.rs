//! Observables for the strong/weak limit question: Cauchy defects of the
//! wave-operator approximants, weak and modifier overlaps, Cook–Kuroda
//! integrands, and log-log decay fits.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{inner_product, PhysicsParams, Representation, WaveField};
use crate::propagate::{apply_modifier, Propagator};

/// Minimum number of points a log-log fit accepts.
pub const MIN_FIT_POINTS: usize = 5;

/// Largest ratio between consecutive Cook–Kuroda sample times.
pub const MAX_COOK_RATIO: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual in `(log t, log value)` coordinates.
    pub residual: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Least-squares line through `(log t, log value)` for the samples with
/// `t` inside `window` (inclusive).
pub fn fit_loglog_slope(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<LogLogFit> {
    let (lo, hi) = window;
    let slack = 1e-9;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t < lo * (1.0 - slack) || t > hi * (1.0 + slack) {
            continue;
        }
        if !(v > 0.0) || !v.is_finite() || !(t > 0.0) {
            return Err(Error::NonPositive { t, value: v });
        }
        xs.push(libm::log(t));
        ys.push(libm::log(v));
    }
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            needed: MIN_FIT_POINTS,
            found: n,
        });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(LogLogFit {
        slope,
        intercept,
        residual: libm::sqrt(sse / nf),
        window,
        points: n,
    })
}

/// `(t, value)` pairs with an optional power-law fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    times: Vec<f64>,
    values: Vec<f64>,
    complex: Option<Vec<Complex64>>,
    fit: Option<LogLogFit>,
}

impl DecaySeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Config("times and values differ in length"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("series times must be strictly ascending"));
        }
        if values.iter().chain(&times).any(|v| !v.is_finite()) {
            return Err(Error::Config("series contains a non-finite entry"));
        }
        Ok(Self {
            times,
            values,
            complex: None,
            fit: None,
        })
    }

    /// Series of moduli with the complex samples kept alongside.
    pub fn from_complex(times: Vec<f64>, samples: Vec<Complex64>) -> Result<Self> {
        let values = samples.iter().map(|z| z.norm()).collect();
        let mut series = Self::new(times, values)?;
        series.complex = Some(samples);
        Ok(series)
    }

    pub fn with_fit(mut self, window: (f64, f64)) -> Result<Self> {
        self.fit = Some(fit_loglog_slope(&self.times, &self.values, window)?);
        Ok(self)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn complex(&self) -> Option<&[Complex64]> {
        self.complex.as_deref()
    }

    pub fn fit(&self) -> Option<&LogLogFit> {
        self.fit.as_ref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Value at `t` by linear interpolation between samples.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let slack = 1e-9 * t.abs().max(1.0);
        let first = *self.times.first()?;
        let last = *self.times.last()?;
        if t < first - slack || t > last + slack {
            return None;
        }
        let t = t.clamp(first, last);
        let i = self.times.partition_point(|&s| s < t);
        if i == 0 {
            return Some(self.values[0]);
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    }

    /// `value(b) - value(a)`; meaningful for cumulative series.
    pub fn increment(&self, a: f64, b: f64) -> Option<f64> {
        Some(self.value_at(b)? - self.value_at(a)?)
    }
}

/// `‖W(t1)φ - W(t2)φ‖`, both approximants computed in full.
pub fn cauchy_defect(prop: &Propagator, phi: &WaveField, t1: f64, t2: f64, modified: bool) -> Result<f64> {
    let a = prop.wave_operator_state(phi, t1, modified)?;
    let b = prop.wave_operator_state(phi, t2, modified)?;
    Ok(a.difference(&b)?.l2_norm())
}

/// Same quantity as [`cauchy_defect`] at a cost of `|t2 - t1|` instead of
/// `t1 + t2` of interacting evolution.
///
/// With `a = e^{-it1ω}φ`, `b = e^{-it2ω}φ` and `U(s)` the discrete
/// backward flow, `U(t2) = U(t1)U(t2-t1)` exactly on the step lattice, so
/// `⟨W(t1)φ, W(t2)φ⟩ = ⟨a, U(t2-t1)b⟩` and the defect follows from
/// `‖a‖² + ‖b‖² - 2 Re⟨a, U(t2-t1)b⟩`.
pub fn cauchy_defect_reduced(prop: &Propagator, phi: &WaveField, t1: f64, t2: f64, modified: bool) -> Result<f64> {
    let (t1, t2) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    if t1 < 0.0 {
        return Err(Error::Domain { t: t1, lower: 0.0 });
    }
    let spectral = prop.spectral();
    let a = spectral.to_position(&prop.asymptotic_state(phi, t1, modified)?)?;
    let b = spectral.to_position(&prop.asymptotic_state(phi, t2, modified)?)?;
    let c = prop.full_propagate(&b, -(t2 - t1))?;
    let cross = inner_product(&a, &c)?;
    let na = a.l2_norm();
    let nb = b.l2_norm();
    let squared = na * na + nb * nb - 2.0 * cross.re;
    Ok(libm::sqrt(squared.max(0.0)))
}

/// `(W(t)φ, ψ)` with `W(t)` computed in full.
pub fn weak_overlap(prop: &Propagator, phi: &WaveField, psi: &WaveField, t: f64) -> Result<Complex64> {
    let w = prop.wave_operator_state(phi, t, false)?;
    let psi = prop.spectral().represent(psi, Representation::Position)?;
    inner_product(&w, &psi)
}

/// `(W(t)φ, ψ)` at every time in `times` (ascending) from a single forward
/// evolution of `ψ`: `(W(t)φ, ψ) = (e^{-itω}φ, e^{-itH}ψ)`.
pub fn weak_overlap_series(prop: &Propagator, phi: &WaveField, psi: &WaveField, times: &[f64]) -> Result<Vec<Complex64>> {
    let spectral = prop.spectral();
    let mut evolved = spectral.represent(psi, Representation::Position)?;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < now {
            return Err(Error::Config("overlap times must be ascending"));
        }
        evolved = prop.full_propagate(&evolved, t - now)?;
        now = t;
        let free = spectral.to_position(&prop.asymptotic_state(phi, t, false)?)?;
        out.push(inner_product(&free, &evolved)?);
    }
    Ok(out)
}

/// `(M(t)φ, ψ)`.
pub fn modifier_overlap(phi: &WaveField, psi: &WaveField, t: f64, params: &PhysicsParams) -> Result<Complex64> {
    let m = apply_modifier(phi, t, params, false)?;
    inner_product(&m, psi)
}

/// `‖V e^{-itω}φ‖` at each time.
pub fn cook_kuroda_series(prop: &Propagator, phi: &WaveField, times: &[f64]) -> Result<DecaySeries> {
    let values = times
        .iter()
        .map(|&t| prop.cook_kuroda_integrand(phi, t))
        .collect::<Result<Vec<_>>>()?;
    DecaySeries::new(times.to_vec(), values)
}

/// Running composite-trapezoid integral of a sampled integrand, starting at
/// zero at its first time.
pub fn cumulative_trapezoid(integrand: &DecaySeries) -> Result<DecaySeries> {
    let t = integrand.times();
    let v = integrand.values();
    for w in t.windows(2) {
        if w[0] > 0.0 && w[1] / w[0] > MAX_COOK_RATIO * (1.0 + 1e-9) {
            return Err(Error::TimeGridTooCoarse {
                ratio: w[1] / w[0],
                max: MAX_COOK_RATIO,
            });
        }
    }
    let mut total = 0.0;
    let mut cumulative = Vec::with_capacity(t.len());
    for i in 0..t.len() {
        if i > 0 {
            total += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
        }
        cumulative.push(total);
    }
    DecaySeries::new(t.to_vec(), cumulative)
}

/// `∫ ‖V e^{-iτω}φ‖ dτ` accumulated over `times`.
pub fn cook_kuroda_integral(prop: &Propagator, phi: &WaveField, times: &[f64]) -> Result<DecaySeries> {
    cumulative_trapezoid(&cook_kuroda_series(prop, phi, times)?)
}

/// Increments of a cumulative series over `[s, 10s]` for `s = start·10^k`.
pub fn decade_increments(cumulative: &DecaySeries, start: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut s = start;
    while let Some(inc) = cumulative.increment(s, 10.0 * s) {
        out.push((s, inc));
        s *= 10.0;
    }
    out
}
