//! Time evolution: the exact free flow, Strang split-step for `ω_ρ(D) + V`,
//! the Dollard modifier and the wave-operator approximants built from them.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Direction;
use crate::grid::{PacketSpec, PhysicsParams, Representation, SpatialGrid, Spectral, WaveField};
use crate::symbols::{dollard_phase_radial, omega_radial, potential_radial, r_symbol_phase, t_factor, t_factor_weight};

/// Largest fraction of the box the packet may reach.
pub const NO_WRAP_FILL: f64 = 0.9;

/// Relative slack when deciding whether a time sits on the step lattice.
const LATTICE_SLACK: f64 = 1e-9;

/// Largest spectral mass fraction below `ε` still treated as zero.
pub const SUPPORT_TOLERANCE: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSchedule {
    dt: f64,
    diagnostic_times: Vec<f64>,
    t_max: f64,
}

impl TimeSchedule {
    /// `t_k = t0·ratio^k` up to `t_max`, each snapped to the nearest multiple of `dt`.
    pub fn geometric(dt: f64, t0: f64, ratio: f64, t_max: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(Error::Parameter {
                name: "t0",
                value: t0,
                reason: "must be positive",
            });
        }
        if !(ratio > 1.0 && ratio.is_finite()) {
            return Err(Error::Parameter {
                name: "ratio",
                value: ratio,
                reason: "must exceed 1",
            });
        }
        if !(t_max >= t0 && t_max.is_finite()) {
            return Err(Error::Parameter {
                name: "t_max",
                value: t_max,
                reason: "must be at least t0",
            });
        }
        let mut times = Vec::new();
        let mut k = 0;
        loop {
            let t = t0 * libm::pow(ratio, k as f64);
            if t > t_max * (1.0 + LATTICE_SLACK) {
                break;
            }
            times.push(t);
            k += 1;
        }
        Self::from_times(dt, times)
    }

    /// Snaps arbitrary ascending times to the `dt` lattice.
    pub fn from_times(dt: f64, times: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Parameter {
                name: "dt",
                value: dt,
                reason: "must be positive",
            });
        }
        let mut snapped: Vec<f64> = Vec::with_capacity(times.len());
        for t in times {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Parameter {
                    name: "diagnostic time",
                    value: t,
                    reason: "must be finite and nonnegative",
                });
            }
            let s = libm::round(t / dt) * dt;
            match snapped.last() {
                Some(&last) if s < last => {
                    return Err(Error::Config("diagnostic times must be ascending"));
                }
                Some(&last) if s == last => {}
                _ => snapped.push(s),
            }
        }
        let t_max = snapped.last().copied().unwrap_or(0.0);
        Ok(Self {
            dt,
            diagnostic_times: snapped,
            t_max,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn diagnostic_times(&self) -> &[f64] {
        &self.diagnostic_times
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Rejects schedules whose fastest packet component would reach the
    /// outer tenth of the box.
    pub fn check_no_wrap(&self, grid: &SpatialGrid, packet: &PacketSpec, rho: f64) -> Result<()> {
        let needed = required_half_length(self.t_max, packet, rho);
        if grid.half_length() < needed {
            return Err(Error::Parameter {
                name: "half_length",
                value: grid.half_length(),
                reason: "packet would wrap around the periodic box; raise half_length",
            });
        }
        Ok(())
    }
}

/// Smallest `L` with `t_max·v_max + extent ≤ 0.9·L`.
pub fn required_half_length(t_max: f64, packet: &PacketSpec, rho: f64) -> f64 {
    (t_max * packet.max_speed(rho) + packet.position_extent()) / NO_WRAP_FILL
}

/// Number of `dt` steps in `t`, failing when `t` is off the lattice.
pub fn steps_for(t: f64, dt: f64) -> Result<u64> {
    let n = libm::round(t.abs() / dt);
    if (n * dt - t.abs()).abs() > LATTICE_SLACK * dt.max(t.abs()) {
        return Err(Error::OffLattice { t, dt });
    }
    Ok(n as u64)
}

/// Multiplies frequency bins by `exp(∓i·dollard_phase(t, ξ))`: minus for
/// `M(t)`, plus for `M(t)*` (`conjugate = true`).
pub fn apply_modifier(f: &WaveField, t: f64, params: &PhysicsParams, conjugate: bool) -> Result<WaveField> {
    f.expect(Representation::Frequency)?;
    check_support(f, params)?;
    let sign = if conjugate { 1.0 } else { -1.0 };
    let norms = f.grid().frequency_norms();
    let mut out = f.clone();
    for (v, &k) in out.values_mut().iter_mut().zip(&norms) {
        if k == 0.0 {
            continue;
        }
        let phase = dollard_phase_radial(t, k, params);
        if phase != 0.0 {
            *v *= Complex64::from_polar(1.0, sign * phase);
        }
    }
    Ok(out)
}

/// `M(t)φ` assembled as `exp(-iλT(t)|D|^{-γ(2ρ-1)})` applied after `R(D)`.
/// Valid once `t ≥ ε^{1-2ρ}`; bins below the cutoff must be empty and are
/// passed through unchanged.
pub fn apply_modifier_factorized(f: &WaveField, t: f64, params: &PhysicsParams) -> Result<WaveField> {
    f.expect(Representation::Frequency)?;
    check_support(f, params)?;
    let big_t = t_factor(t, params)?;
    let dim = f.grid().dim();
    let grid = *f.grid();
    let mut out = f.clone();
    for (i, v) in out.values_mut().iter_mut().enumerate() {
        let xi = grid.site_frequency(i);
        let k = crate::grid::norm(&xi[..dim]);
        if k < params.epsilon {
            continue;
        }
        let r = r_symbol_phase(&xi[..dim], params)?;
        let r_factor = Complex64::from_polar(1.0, -r);
        let t_part = Complex64::from_polar(1.0, -params.lambda * big_t * t_factor_weight(k, params));
        *v = t_part * (r_factor * *v);
    }
    Ok(out)
}

fn check_support(f: &WaveField, params: &PhysicsParams) -> Result<()> {
    let fraction = f.mass_fraction_below(params.epsilon)?;
    if fraction > SUPPORT_TOLERANCE {
        return Err(Error::SupportViolation { fraction });
    }
    Ok(())
}

/// Precomputed multipliers for one `(grid, params, dt)` triple.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectral: Spectral,
    params: PhysicsParams,
    dt: f64,
    omega: Vec<f64>,
    potential: Vec<f64>,
    /// `exp(-i·dt·ω)/N^dim`, the normalization of the raw round trip folded in.
    kinetic_step: Vec<Complex64>,
    potential_half: Vec<Complex64>,
    potential_full: Vec<Complex64>,
}

impl Propagator {
    pub fn new(spectral: Spectral, params: PhysicsParams, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Parameter {
                name: "dt",
                value: dt,
                reason: "must be positive",
            });
        }
        let grid = *spectral.grid();
        let omega: Vec<f64> = grid.frequency_norms().iter().map(|&k| omega_radial(k, params.rho)).collect();
        let potential: Vec<f64> = grid.position_norms().iter().map(|&r| potential_radial(r, &params)).collect();
        let inv_len = 1.0 / grid.len() as f64;
        let kinetic_step = omega.iter().map(|&w| Complex64::from_polar(inv_len, -dt * w)).collect();
        let potential_half = potential.iter().map(|&v| Complex64::from_polar(1.0, -0.5 * dt * v)).collect();
        let potential_full = potential.iter().map(|&v| Complex64::from_polar(1.0, -dt * v)).collect();
        Ok(Self {
            spectral,
            params,
            dt,
            omega,
            potential,
            kinetic_step,
            potential_half,
            potential_full,
        })
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn grid(&self) -> &SpatialGrid {
        self.spectral.grid()
    }

    pub fn params(&self) -> &PhysicsParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `V` sampled on the position lattice.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// `e^{-itω_ρ(D)}f`, exact. Keeps the input representation.
    pub fn free_propagate(&self, f: &WaveField, t: f64) -> Result<WaveField> {
        let mut g = self.spectral.represent(f, Representation::Frequency)?;
        for (v, &w) in g.values_mut().iter_mut().zip(&self.omega) {
            if w != 0.0 {
                *v *= Complex64::from_polar(1.0, -t * w);
            }
        }
        self.spectral.represent(&g, f.representation())
    }

    /// `e^{-itH_ρ}f` by Strang splitting; negative `t` runs the adjoint
    /// steps. Keeps the input representation.
    pub fn full_propagate(&self, f: &WaveField, t: f64) -> Result<WaveField> {
        let steps = steps_for(t, self.dt)?;
        let mut g = self.spectral.represent(f, Representation::Position)?;
        self.evolve_in_place(g.values_mut(), steps, t < 0.0);
        self.spectral.represent(&g, f.representation())
    }

    /// `steps` Strang steps on raw position samples. Adjacent potential
    /// half-steps are merged into one full step.
    pub fn evolve_in_place(&self, values: &mut [Complex64], steps: u64, backward: bool) {
        if steps == 0 {
            return;
        }
        let mut scratch = self.spectral.scratch();
        let conj = |c: Complex64| if backward { c.conj() } else { c };
        multiply(values, &self.potential_half, conj);
        for s in 0..steps {
            self.spectral.raw_transform(values, &mut scratch, Direction::Forward);
            multiply(values, &self.kinetic_step, conj);
            self.spectral.raw_transform(values, &mut scratch, Direction::Inverse);
            if s + 1 < steps {
                multiply(values, &self.potential_full, conj);
            } else {
                multiply(values, &self.potential_half, conj);
            }
        }
    }

    pub fn apply_modifier(&self, f: &WaveField, t: f64, conjugate: bool) -> Result<WaveField> {
        let g = self.spectral.represent(f, Representation::Frequency)?;
        let out = apply_modifier(&g, t, &self.params, conjugate)?;
        self.spectral.represent(&out, f.representation())
    }

    /// `e^{-itω}M(t)φ` (or `e^{-itω}φ`) in frequency representation: the
    /// state handed to the interacting backward flow.
    pub fn asymptotic_state(&self, phi: &WaveField, t: f64, modified: bool) -> Result<WaveField> {
        let mut g = self.spectral.represent(phi, Representation::Frequency)?;
        if modified {
            g = apply_modifier(&g, t, &self.params, false)?;
        }
        self.free_propagate(&g, t)
    }

    /// `W(t)φ = e^{itH}e^{-itω}φ`, or `e^{itH}e^{-itω}M(t)φ` when `modified`.
    /// Returned in position representation.
    pub fn wave_operator_state(&self, phi: &WaveField, t: f64, modified: bool) -> Result<WaveField> {
        if t < 0.0 {
            return Err(Error::Domain { t, lower: 0.0 });
        }
        let asymptotic = self.asymptotic_state(phi, t, modified)?;
        let position = self.spectral.to_position(&asymptotic)?;
        self.full_propagate(&position, -t)
    }

    /// `‖V·e^{-itω}φ‖`.
    pub fn cook_kuroda_integrand(&self, phi: &WaveField, t: f64) -> Result<f64> {
        let g = self.free_propagate(phi, t)?;
        let g = self.spectral.represent(&g, Representation::Position)?;
        let sum: f64 = g
            .values()
            .iter()
            .zip(&self.potential)
            .map(|(v, &p)| (v * p).norm_sqr())
            .sum();
        Ok(libm::sqrt(sum * self.grid().measure(Representation::Position)))
    }
}

#[inline]
fn multiply(values: &mut [Complex64], factors: &[Complex64], map: impl Fn(Complex64) -> Complex64) {
    for (v, &f) in values.iter_mut().zip(factors) {
        *v *= map(f);
    }
}
