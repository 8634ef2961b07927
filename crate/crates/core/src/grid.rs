//! Periodic lattices, sampled fields and the continuum-normalized transform.
//!
//! Position samples sit at `x_j = -L + j·dx` on every axis. Frequency
//! samples are kept in wrap order: bin `m` holds `ξ = m·dk` for `m < N/2`
//! and `ξ = (m - N)·dk` otherwise. The transform approximates
//! `(𝓕f)(ξ) = (2π)^{-n/2} ∫ e^{-ix·ξ} f(x) dx`, so the discrete norms
//! weighted by `dx^n` and `dk^n` agree exactly.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{Direction, FourierBackend, Radix2};

/// Smallest admissible points per axis.
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    dim: usize,
    points_per_axis: usize,
    half_length: f64,
    dx: f64,
    dk: f64,
}

impl SpatialGrid {
    pub fn new(dim: usize, points_per_axis: usize, half_length: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Parameter {
                name: "dim",
                value: dim as f64,
                reason: "only 1 and 2 dimensions are supported",
            });
        }
        if points_per_axis < MIN_POINTS || !points_per_axis.is_power_of_two() {
            return Err(Error::Parameter {
                name: "n_points",
                value: points_per_axis as f64,
                reason: "must be a power of two and at least 8",
            });
        }
        if !(half_length > 0.0 && half_length.is_finite()) {
            return Err(Error::Parameter {
                name: "half_length",
                value: half_length,
                reason: "must be positive and finite",
            });
        }
        Ok(Self {
            dim,
            points_per_axis,
            half_length,
            dx: 2.0 * half_length / points_per_axis as f64,
            dk: PI / half_length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dk(&self) -> f64 {
        self.dk
    }

    /// Total number of lattice sites, `N^dim`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of sample `j` along one axis.
    pub fn position(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx
    }

    /// Signed frequency index of bin `m` along one axis.
    pub fn signed_index(&self, m: usize) -> i64 {
        let n = self.points_per_axis;
        if m < n / 2 {
            m as i64
        } else {
            m as i64 - n as i64
        }
    }

    /// Frequency of bin `m` along one axis.
    pub fn frequency(&self, m: usize) -> f64 {
        self.signed_index(m) as f64 * self.dk
    }

    /// Per-axis indices of a flat site index (axis 0 varies slowest).
    pub fn axes(&self, flat: usize) -> [usize; 2] {
        let n = self.points_per_axis;
        match self.dim {
            1 => [flat, 0],
            _ => [flat / n, flat % n],
        }
    }

    /// Position vector of a flat site index; only the first `dim` entries are meaningful.
    pub fn site_position(&self, flat: usize) -> [f64; 2] {
        let [a, b] = self.axes(flat);
        match self.dim {
            1 => [self.position(a), 0.0],
            _ => [self.position(a), self.position(b)],
        }
    }

    /// Frequency vector of a flat bin index; only the first `dim` entries are meaningful.
    pub fn site_frequency(&self, flat: usize) -> [f64; 2] {
        let [a, b] = self.axes(flat);
        match self.dim {
            1 => [self.frequency(a), 0.0],
            _ => [self.frequency(a), self.frequency(b)],
        }
    }

    pub fn position_norms(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| norm(&self.site_position(i)[..self.dim]))
            .collect()
    }

    pub fn frequency_norms(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| norm(&self.site_frequency(i)[..self.dim]))
            .collect()
    }

    /// Quadrature weight `dx^dim` or `dk^dim`.
    pub fn measure(&self, representation: Representation) -> f64 {
        let h = match representation {
            Representation::Position => self.dx,
            Representation::Frequency => self.dk,
        };
        libm::pow(h, self.dim as f64)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Frequency,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Position => "position",
            Representation::Frequency => "frequency",
        }
    }
}

/// Complex samples on a grid, tagged with their representation.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: SpatialGrid,
    values: Vec<Complex64>,
    representation: Representation,
}

impl WaveField {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>, representation: Representation) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config("value count does not match the grid"));
        }
        Ok(Self {
            grid,
            values,
            representation,
        })
    }

    pub fn zeros(grid: SpatialGrid, representation: Representation) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            representation,
        }
    }

    /// Samples `f` at every lattice site of the given representation.
    pub fn from_fn(
        grid: SpatialGrid,
        representation: Representation,
        mut f: impl FnMut([f64; 2]) -> Complex64,
    ) -> Self {
        let values = (0..grid.len())
            .map(|i| match representation {
                Representation::Position => f(grid.site_position(i)),
                Representation::Frequency => f(grid.site_frequency(i)),
            })
            .collect();
        Self {
            grid,
            values,
            representation,
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn expect(&self, representation: Representation) -> Result<()> {
        if self.representation == representation {
            Ok(())
        } else {
            Err(Error::Representation {
                expected: representation.name(),
                found: self.representation.name(),
            })
        }
    }

    /// Continuum L² norm.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        libm::sqrt(sum * self.grid.measure(self.representation))
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    /// `self - other`, both on the same grid and representation.
    pub fn difference(&self, other: &WaveField) -> Result<WaveField> {
        check_compatible(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(WaveField {
            grid: self.grid,
            values,
            representation: self.representation,
        })
    }

    /// Fraction of the total squared mass carried by bins with `|ξ| < epsilon`.
    pub fn mass_fraction_below(&self, epsilon: f64) -> Result<f64> {
        self.expect(Representation::Frequency)?;
        let mut below = 0.0;
        let mut total = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let m = v.norm_sqr();
            total += m;
            if norm(&self.grid.site_frequency(i)[..self.grid.dim]) < epsilon {
                below += m;
            }
        }
        Ok(if total > 0.0 { below / total } else { 0.0 })
    }

    /// Fraction of the squared mass in the outer `fraction` of the box along
    /// any axis (position representation).
    pub fn edge_mass_fraction(&self, fraction: f64) -> Result<f64> {
        self.expect(Representation::Position)?;
        let limit = (1.0 - fraction) * self.grid.half_length;
        let mut edge = 0.0;
        let mut total = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let m = v.norm_sqr();
            total += m;
            let x = self.grid.site_position(i);
            if x[..self.grid.dim].iter().any(|c| c.abs() >= limit) {
                edge += m;
            }
        }
        Ok(if total > 0.0 { edge / total } else { 0.0 })
    }
}

fn check_compatible(f: &WaveField, g: &WaveField) -> Result<()> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    g.expect(f.representation)
}

/// `∫ conj(f) g` with the lattice measure of the shared representation.
pub fn inner_product(f: &WaveField, g: &WaveField) -> Result<Complex64> {
    check_compatible(f, g)?;
    let sum: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum();
    Ok(sum * f.grid.measure(f.representation))
}

/// Model parameters `(ρ, γ, λ, ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    pub rho: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub epsilon: f64,
}

impl PhysicsParams {
    pub fn new(rho: f64, gamma: f64, lambda: f64, epsilon: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&rho) {
            return Err(Error::Parameter {
                name: "rho",
                value: rho,
                reason: "must lie in [1/2, 1]",
            });
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Parameter {
                name: "gamma",
                value: gamma,
                reason: "must be positive",
            });
        }
        if !lambda.is_finite() {
            return Err(Error::Parameter {
                name: "lambda",
                value: lambda,
                reason: "must be finite",
            });
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Parameter {
                name: "epsilon",
                value: epsilon,
                reason: "must be positive",
            });
        }
        Ok(Self {
            rho,
            gamma,
            lambda,
            epsilon,
        })
    }

    /// Same model with a different coupling.
    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    /// `ε^{1-2ρ}`: from this time on the modifier is active on the whole
    /// support `|ξ| ≥ ε`.
    pub fn support_activation_time(&self) -> f64 {
        libm::pow(self.epsilon, 1.0 - 2.0 * self.rho)
    }
}

/// Gaussian packet description in frequency space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    pub center: [f64; 2],
    pub width: f64,
}

/// Number of widths treated as the effective edge of a Gaussian.
pub const PACKET_RADIUS_WIDTHS: f64 = 5.0;

impl PacketSpec {
    pub fn new_1d(center: f64, width: f64) -> Self {
        Self {
            center: [center, 0.0],
            width,
        }
    }

    /// Largest `|ξ|` carrying non-negligible amplitude.
    pub fn max_frequency(&self) -> f64 {
        norm(&self.center) + PACKET_RADIUS_WIDTHS * self.width
    }

    /// Smallest `|ξ|` carrying non-negligible amplitude, clipped at the cutoff.
    pub fn min_frequency(&self, epsilon: f64) -> f64 {
        (norm(&self.center) - PACKET_RADIUS_WIDTHS * self.width).max(epsilon)
    }

    /// Initial position-space extent of the packet about the origin.
    pub fn position_extent(&self) -> f64 {
        PACKET_RADIUS_WIDTHS / self.width
    }

    /// Fastest group speed on the support, `max|ξ|^{2ρ-1}`.
    pub fn max_speed(&self, rho: f64) -> f64 {
        libm::pow(self.max_frequency(), 2.0 * rho - 1.0)
    }
}

/// Packets keeping less than this fraction of their Gaussian mass above the
/// cutoff count as entirely truncated.
pub const MIN_KEPT_FRACTION: f64 = 1e-6;

/// Band-limited Gaussian `exp(-|ξ-c|²/(2w²))` with every bin below the
/// cutoff set to zero, normalized to unit L² norm. Returned in frequency
/// representation. Fails when the cutoff removes all but a
/// [`MIN_KEPT_FRACTION`] of the Gaussian.
pub fn build_wavepacket(grid: &SpatialGrid, params: &PhysicsParams, packet: &PacketSpec) -> Result<WaveField> {
    if !(packet.width > 0.0 && packet.width.is_finite()) {
        return Err(Error::Parameter {
            name: "xi_width",
            value: packet.width,
            reason: "must be positive",
        });
    }
    let dim = grid.dim();
    let two_w2 = 2.0 * packet.width * packet.width;
    let mut untruncated = 0.0;
    let mut field = WaveField::from_fn(*grid, Representation::Frequency, |xi| {
        let d2: f64 = xi[..dim]
            .iter()
            .zip(&packet.center[..dim])
            .map(|(a, c)| (a - c) * (a - c))
            .sum();
        let amplitude = libm::exp(-d2 / two_w2);
        untruncated += amplitude * amplitude;
        if norm(&xi[..dim]) < params.epsilon {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(amplitude, 0.0)
        }
    });
    let kept: f64 = field.values().iter().map(|v| v.norm_sqr()).sum();
    let n = field.l2_norm();
    if !(kept > MIN_KEPT_FRACTION * untruncated) || !n.is_finite() {
        return Err(Error::EmptyPacket {
            epsilon: params.epsilon,
        });
    }
    field.scale(1.0 / n);
    Ok(field)
}

/// Transform context: a grid plus a 1-D backend of matching length.
#[derive(Clone)]
pub struct Spectral {
    grid: SpatialGrid,
    backend: Arc<dyn FourierBackend>,
    /// `(-1)^m` per axis: the grid starts at `-L`, so `e^{iLξ_m} = (-1)^m`.
    parity: Vec<f64>,
}

impl core::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl Spectral {
    /// Uses the built-in [`Radix2`] backend.
    pub fn new(grid: SpatialGrid) -> Self {
        let backend = Arc::new(Radix2::new(grid.points_per_axis()));
        Self::with_backend(grid, backend).expect("radix-2 length matches by construction")
    }

    pub fn with_backend(grid: SpatialGrid, backend: Arc<dyn FourierBackend>) -> Result<Self> {
        if backend.len() != grid.points_per_axis() {
            return Err(Error::Config("transform length does not match the grid"));
        }
        let parity = (0..grid.points_per_axis())
            .map(|m| if grid.signed_index(m).rem_euclid(2) == 0 { 1.0 } else { -1.0 })
            .collect();
        Ok(Self {
            grid,
            backend,
            parity,
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.backend.scratch_len().max(self.grid.points_per_axis())]
    }

    /// Raw unnormalized transform over every axis, in place.
    pub fn raw_transform(&self, data: &mut [Complex64], scratch: &mut [Complex64], direction: Direction) {
        let n = self.grid.points_per_axis();
        let backend_scratch = self.backend.scratch_len();
        match self.grid.dim() {
            1 => self.backend.process(data, &mut scratch[..backend_scratch], direction),
            _ => {
                for row in data.chunks_exact_mut(n) {
                    self.backend.process(row, &mut scratch[..backend_scratch], direction);
                }
                let mut column = vec![Complex64::new(0.0, 0.0); n];
                for c in 0..n {
                    for (r, v) in column.iter_mut().enumerate() {
                        *v = data[r * n + c];
                    }
                    self.backend.process(&mut column, &mut scratch[..backend_scratch], direction);
                    for (r, v) in column.iter().enumerate() {
                        data[r * n + c] = *v;
                    }
                }
            }
        }
    }

    fn parity_at(&self, flat: usize) -> f64 {
        let [a, b] = self.grid.axes(flat);
        match self.grid.dim() {
            1 => self.parity[a],
            _ => self.parity[a] * self.parity[b],
        }
    }

    pub fn to_frequency(&self, f: &WaveField) -> Result<WaveField> {
        f.expect(Representation::Position)?;
        self.check_grid(f)?;
        let mut values = f.values.clone();
        let mut scratch = self.scratch();
        self.raw_transform(&mut values, &mut scratch, Direction::Forward);
        let scale = libm::pow(self.grid.dx() / libm::sqrt(2.0 * PI), self.grid.dim() as f64);
        for (i, v) in values.iter_mut().enumerate() {
            *v *= scale * self.parity_at(i);
        }
        Ok(WaveField {
            grid: self.grid,
            values,
            representation: Representation::Frequency,
        })
    }

    pub fn to_position(&self, f: &WaveField) -> Result<WaveField> {
        f.expect(Representation::Frequency)?;
        self.check_grid(f)?;
        let scale = libm::pow(self.grid.dk() / libm::sqrt(2.0 * PI), self.grid.dim() as f64);
        let mut values: Vec<Complex64> = f
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * (scale * self.parity_at(i)))
            .collect();
        let mut scratch = self.scratch();
        self.raw_transform(&mut values, &mut scratch, Direction::Inverse);
        Ok(WaveField {
            grid: self.grid,
            values,
            representation: Representation::Position,
        })
    }

    /// Converts to the requested representation, cloning when already there.
    pub fn represent(&self, f: &WaveField, representation: Representation) -> Result<WaveField> {
        match (f.representation, representation) {
            (a, b) if a == b => Ok(f.clone()),
            (_, Representation::Frequency) => self.to_frequency(f),
            (_, Representation::Position) => self.to_position(f),
        }
    }

    fn check_grid(&self, f: &WaveField) -> Result<()> {
        if f.grid == self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}
