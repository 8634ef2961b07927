//! Discrete Fourier transforms behind a small backend trait.
//!
//! The kernel only ever needs unnormalized power-of-two transforms; all
//! continuum scaling lives in [`crate::grid::Spectral`]. [`Radix2`] is the
//! built-in, allocation-free-per-call implementation; hosts with `std` can
//! plug in a faster backend.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X_m = Σ_j x_j e^{-2πi jm/N}`
    Forward,
    /// `x_j = Σ_m X_m e^{+2πi jm/N}` (no 1/N)
    Inverse,
}

/// An unnormalized in-place DFT of a fixed length.
pub trait FourierBackend: Send + Sync {
    fn len(&self) -> usize;

    /// Length of the scratch slice `process` expects.
    fn scratch_len(&self) -> usize {
        0
    }

    fn process(&self, data: &mut [Complex64], scratch: &mut [Complex64], direction: Direction);
}

/// Iterative decimation-in-time radix-2 transform.
#[derive(Debug, Clone)]
pub struct Radix2 {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<u32>,
}

impl Radix2 {
    /// `len` must be a power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "radix-2 length must be a power of two");
        let bits = len.trailing_zeros();
        let twiddles = (0..len / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        let bitrev = (0..len as u32)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) })
            .collect();
        Self {
            len,
            twiddles,
            bitrev,
        }
    }
}

impl FourierBackend for Radix2 {
    fn len(&self) -> usize {
        self.len
    }

    fn process(&self, data: &mut [Complex64], _scratch: &mut [Complex64], direction: Direction) {
        let n = self.len;
        assert_eq!(data.len(), n, "buffer length does not match the transform");
        for (i, &j) in self.bitrev.iter().enumerate() {
            let j = j as usize;
            if i < j {
                data.swap(i, j);
            }
        }
        let inverse = direction == Direction::Inverse;
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for block in data.chunks_exact_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let t = *b * w;
                    *b = *a - t;
                    *a += t;
                }
            }
            half *= 2;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(input: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = input.len();
        (0..n)
            .map(|m| {
                input
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| {
                        let angle = sign * 2.0 * PI * (j * m % n) as f64 / n as f64;
                        x * Complex64::new(libm::cos(angle), libm::sin(angle))
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for &n in &[1usize, 2, 8, 64] {
            let input: Vec<Complex64> = (0..n)
                .map(|j| Complex64::new(libm::sin(j as f64 * 0.7), libm::cos(j as f64 * 1.3)))
                .collect();
            let fft = Radix2::new(n);
            for (dir, sign) in [(Direction::Forward, -1.0), (Direction::Inverse, 1.0)] {
                let mut data = input.clone();
                fft.process(&mut data, &mut [], dir);
                for (a, b) in data.iter().zip(naive(&input, sign)) {
                    assert!((a - b).norm() < 1e-10, "n = {n}");
                }
            }
        }
    }

    #[test]
    fn round_trip_scales_by_length() {
        let n = 256;
        let input: Vec<Complex64> = (0..n).map(|j| Complex64::new(j as f64, -(j as f64))).collect();
        let fft = Radix2::new(n);
        let mut data = input.clone();
        fft.process(&mut data, &mut [], Direction::Forward);
        fft.process(&mut data, &mut [], Direction::Inverse);
        for (a, b) in data.iter().zip(&input) {
            assert!((a / n as f64 - b).norm() < 1e-10);
        }
    }
}
