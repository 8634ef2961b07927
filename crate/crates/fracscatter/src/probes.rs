//! Test states `ψ` for weak-limit runs.

use fracscatter_core::{Complex64, PacketSpec, Representation, Result, Spectral, WaveField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Position shift of the translated probe.
pub const PROBE_SHIFT: f64 = 50.0;

/// `f(· - shift)`; frequency representation in and out.
pub fn translated(f: &WaveField, shift: f64) -> Result<WaveField> {
    f.expect(Representation::Frequency)?;
    let grid = *f.grid();
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(m, v)| {
            let xi = grid.site_frequency(m);
            v * Complex64::from_polar(1.0, -(xi[0] * shift))
        })
        .collect();
    WaveField::new(grid, values, Representation::Frequency)
}

/// Complex white noise under a Gaussian position envelope of the packet's
/// size, restricted to the packet's frequency band and normalized.
/// Deterministic in `seed`. Returned in position representation.
pub fn random_band_limited(spectral: &Spectral, packet: &PacketSpec, epsilon: f64, seed: u64) -> Result<WaveField> {
    let grid = *spectral.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = 1.0 / packet.width;
    let noisy = WaveField::from_fn(grid, Representation::Position, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let envelope = (-r2 / (2.0 * spread * spread)).exp();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * envelope
    });
    let mut g = spectral.to_frequency(&noisy)?;
    let (lo, hi) = (packet.min_frequency(epsilon), packet.max_frequency());
    for (m, v) in g.values_mut().iter_mut().enumerate() {
        let xi = grid.site_frequency(m);
        let k = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        if !(lo..=hi).contains(&k) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    let norm = g.l2_norm();
    g.scale(1.0 / norm);
    spectral.to_position(&g)
}
