use std::sync::Arc;

use fracscatter_core::{Direction, FourierBackend, Result, SpatialGrid, Spectral};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// [`FourierBackend`] over a planned `rustfft` transform pair.
pub struct RustFftBackend {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl RustFftBackend {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            len,
            forward,
            inverse,
            scratch_len,
        }
    }
}

impl std::fmt::Debug for RustFftBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RustFftBackend").field("len", &self.len).finish()
    }
}

impl FourierBackend for RustFftBackend {
    fn len(&self) -> usize {
        self.len
    }

    fn scratch_len(&self) -> usize {
        self.scratch_len
    }

    fn process(&self, data: &mut [Complex64], scratch: &mut [Complex64], direction: Direction) {
        let plan = match direction {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        plan.process_with_scratch(data, &mut scratch[..self.scratch_len]);
    }
}

/// Transform pair for `grid` backed by `rustfft`.
pub fn spectral(grid: SpatialGrid) -> Result<Spectral> {
    Spectral::with_backend(grid, Arc::new(RustFftBackend::new(grid.points_per_axis())))
}
