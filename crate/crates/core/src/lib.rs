//! Pseudospectral kernel for scattering with fractional Laplacians.
//!
//! The free dynamics is `ω_ρ(D) = |D|^{2ρ}/(2ρ)` with `1/2 < ρ ≤ 1` and the
//! perturbation is `V(x) = λ|x|^{-γ}` outside the unit ball. The crate
//! evolves band-limited wavepackets on a periodic lattice and measures
//! whether `e^{itH}e^{-itω(D)}` (plain or Dollard-modified) settles as
//! `t → ∞`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod grid;
pub mod propagate;
pub mod symbols;

pub use num_complex::Complex64;

pub use diagnostics::{
    cauchy_defect, cauchy_defect_reduced, cook_kuroda_integral, cook_kuroda_series, cumulative_trapezoid,
    decade_increments, fit_loglog_slope, modifier_overlap, weak_overlap, weak_overlap_series, DecaySeries, LogLogFit,
};
pub use error::{Error, Result};
pub use fft::{Direction, FourierBackend, Radix2};
pub use grid::{
    build_wavepacket, inner_product, PacketSpec, PhysicsParams, Representation, SpatialGrid, Spectral, WaveField,
};
pub use propagate::{
    apply_modifier, apply_modifier_factorized, required_half_length, steps_for, Propagator, TimeSchedule,
};
pub use symbols::{
    dollard_phase, group_velocity, omega_symbol, potential_at, r_symbol_phase, t_factor, DollardPhaseResult,
};
