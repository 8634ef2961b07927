//! Closed-form scalar symbols of the model.
//!
//! Everything here is a plain function of `ξ`, `x` or `t`. The Dollard
//! phase is `∫₀ᵗ V(∇ω_ρ(ξ)τ) dτ`; along the classical ray
//! `|x| = |ξ|^{2ρ-1}τ` the indicator in `V` switches on at
//! `t_ξ = |ξ|^{1-2ρ}`, after which the integrand is `λ|ξ|^{-γ(2ρ-1)}τ^{-γ}`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{norm, PhysicsParams};

/// `|ξ|^{2ρ}/(2ρ)`, zero at the origin.
pub fn omega_symbol(xi: &[f64], rho: f64) -> f64 {
    omega_radial(norm(xi), rho)
}

#[inline]
pub fn omega_radial(k: f64, rho: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        libm::pow(k, 2.0 * rho) / (2.0 * rho)
    }
}

/// `∇ω_ρ(ξ) = |ξ|^{2ρ-2} ξ`.
pub fn group_velocity(xi: &[f64], rho: f64) -> Result<Vec<f64>> {
    let k = norm(xi);
    if k == 0.0 {
        if rho == 1.0 {
            return Ok(xi.to_vec());
        }
        return Err(Error::SingularInput);
    }
    let scale = libm::pow(k, 2.0 * rho - 2.0);
    Ok(xi.iter().map(|c| c * scale).collect())
}

/// Classical speed `|ξ|^{2ρ-1}`.
pub fn group_speed(k: f64, rho: f64) -> f64 {
    libm::pow(k, 2.0 * rho - 1.0)
}

/// `λ|x|^{-γ}` for `|x| ≥ 1`, exactly zero inside the unit ball.
pub fn potential_at(x: &[f64], params: &PhysicsParams) -> f64 {
    potential_radial(norm(x), params)
}

#[inline]
pub fn potential_radial(r: f64, params: &PhysicsParams) -> f64 {
    if r >= 1.0 {
        params.lambda * libm::pow(r, -params.gamma)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DollardPhaseResult {
    /// Radians; the modifier multiplies by `exp(-i·phase)`.
    pub phase: f64,
    /// `|ξ|^{1-2ρ}`, the time at which the indicator switches on.
    pub threshold_time: f64,
}

/// `(e^{a u} - 1)/a`, continuous through `a = 0` where it equals `u`.
///
/// With `a = 1-γ` and `u = log(t/s)` this is `s^{γ-1}∫_s^t τ^{-γ} dτ`, so
/// one expression covers the `γ < 1`, `γ = 1` and `γ > 1` branches without
/// cancellation near `γ = 1`.
fn power_log(u: f64, a: f64) -> f64 {
    if a == 0.0 {
        u
    } else {
        libm::expm1(a * u) / a
    }
}

/// `∫_s^t τ^{-γ} dτ` for `t ≥ s > 0`.
fn tail_integral(s: f64, t: f64, gamma: f64) -> f64 {
    let a = 1.0 - gamma;
    libm::pow(s, a) * power_log(libm::log(t / s), a)
}

/// The Dollard phase for a given `|ξ| > 0`.
#[inline]
pub fn dollard_phase_radial(t: f64, k: f64, params: &PhysicsParams) -> f64 {
    let threshold = libm::pow(k, 1.0 - 2.0 * params.rho);
    if t <= threshold {
        return 0.0;
    }
    // λ|ξ|^{-γ(2ρ-1)} t_ξ^{1-γ} collapses to λ|ξ|^{1-2ρ} = λ t_ξ.
    let a = 1.0 - params.gamma;
    params.lambda * threshold * power_log(libm::log(t / threshold), a)
}

pub fn dollard_phase(t: f64, xi: &[f64], params: &PhysicsParams) -> Result<DollardPhaseResult> {
    let k = norm(xi);
    if k == 0.0 {
        return Err(Error::SingularInput);
    }
    if !(t >= 0.0) {
        return Err(Error::Domain { t, lower: 0.0 });
    }
    Ok(DollardPhaseResult {
        phase: dollard_phase_radial(t, k, params),
        threshold_time: libm::pow(k, 1.0 - 2.0 * params.rho),
    })
}

/// `T_{ρ,γ}(t) = ∫_{ε^{1-2ρ}}^t τ^{-γ} dτ`: `log(t/ε^{1-2ρ})` at `γ = 1`,
/// `(t^{1-γ} - ε^{(1-2ρ)(1-γ)})/(1-γ)` otherwise.
pub fn t_factor(t: f64, params: &PhysicsParams) -> Result<f64> {
    let lower = params.support_activation_time();
    if !(t >= lower) {
        return Err(Error::Domain { t, lower });
    }
    Ok(tail_integral(lower, t, params.gamma))
}

/// `|ξ|^{-γ(2ρ-1)}`, the frequency weight multiplying `λT(t)`.
pub fn t_factor_weight(k: f64, params: &PhysicsParams) -> f64 {
    libm::pow(k, -params.gamma * (2.0 * params.rho - 1.0))
}

/// Phase exponent of `R(ξ)`: the Dollard phase accrued before the whole
/// support is active, i.e. at `t = ε^{1-2ρ}`. `R(ξ) = exp(-i·result)`.
pub fn r_symbol_phase(xi: &[f64], params: &PhysicsParams) -> Result<f64> {
    let k = norm(xi);
    if k < params.epsilon {
        return Err(Error::BelowCutoff {
            norm: k,
            epsilon: params.epsilon,
        });
    }
    Ok(dollard_phase_radial(params.support_activation_time(), k, params))
}
