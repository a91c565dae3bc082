use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Grid, HurstIndex, Scratch};
use crate::error::{Result, RuinError};

/// Negative embedding eigenvalues down to `-tol * max` are clamped to zero.
pub const NEGATIVE_EIGEN_TOLERANCE: f64 = 1e-8;

/// Circulant embedding of the fractional Gaussian noise covariance.
#[derive(Clone)]
pub struct CirculantEmbedding {
    increments: usize,
    /// `sqrt(lambda_k / M)`
    sqrt_eigen: Vec<f64>,
    /// `delta^H`, converting unit-spacing noise to grid increments.
    scale: f64,
    fft: Arc<dyn Fft<f64>>,
    clamped: usize,
}

impl std::fmt::Debug for CirculantEmbedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantEmbedding")
            .field("increments", &self.increments)
            .field("size", &self.sqrt_eigen.len())
            .field("clamped", &self.clamped)
            .finish()
    }
}

/// Autocovariance of unit-spacing fractional Gaussian noise at lag `k`.
pub(crate) fn fgn_autocovariance(k: usize, h: f64) -> f64 {
    let two_h = 2.0 * h;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

impl CirculantEmbedding {
    pub fn new(grid: &Grid, h: HurstIndex) -> Result<Self> {
        let increments = grid.len() - 1;
        let size = (2 * increments).next_power_of_two().max(2);
        let hv = h.value();

        let mut row: Vec<Complex64> = (0..size)
            .map(|k| Complex64::new(fgn_autocovariance(k.min(size - k), hv), 0.0))
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut row);

        let max = row.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
        let min = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min < -NEGATIVE_EIGEN_TOLERANCE * max {
            return Err(RuinError::NegativeEmbedding { min, max });
        }
        let clamped = row.iter().filter(|c| c.re < 0.0).count();
        let sqrt_eigen = row
            .iter()
            .map(|c| (c.re.max(0.0) / size as f64).sqrt())
            .collect();

        Ok(Self {
            increments,
            sqrt_eigen,
            scale: grid.step().powf(hv),
            fft,
            clamped,
        })
    }

    /// Embedding size (a power of two at least twice the increment count).
    pub fn size(&self) -> usize {
        self.sqrt_eigen.len()
    }

    /// Number of slightly negative eigenvalues that were clamped to zero.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    pub(crate) fn scratch(&self) -> Scratch {
        Scratch {
            buffer: vec![Complex64::default(); self.size()],
            fft: vec![Complex64::default(); self.fft.get_inplace_scratch_len()],
            normals: Vec::new(),
        }
    }

    pub(crate) fn fill<R: Rng + ?Sized>(&self, rng: &mut R, scratch: &mut Scratch, out: &mut [f64]) {
        for (w, &s) in scratch.buffer.iter_mut().zip(&self.sqrt_eigen) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *w = Complex64::new(s * re, s * im);
        }
        self.fft.process_with_scratch(&mut scratch.buffer, &mut scratch.fft);

        out[0] = 0.0;
        let mut acc = 0.0;
        for (j, y) in scratch.buffer[..self.increments].iter().enumerate() {
            acc += y.re * self.scale;
            out[j + 1] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_size_is_power_of_two() {
        let h = HurstIndex::new(0.3).unwrap();
        let e = CirculantEmbedding::new(&Grid::new(1.0, 65).unwrap(), h).unwrap();
        assert_eq!(e.size(), 128);
        let e = CirculantEmbedding::new(&Grid::new(1.0, 66).unwrap(), h).unwrap();
        assert_eq!(e.size(), 256);
    }

    #[test]
    fn brownian_noise_is_white() {
        assert_eq!(fgn_autocovariance(0, 0.5), 1.0);
        assert_eq!(fgn_autocovariance(3, 0.5), 0.0);
    }

    #[test]
    fn eigenvalues_nonnegative_for_common_hurst() {
        for hv in [0.05, 0.25, 0.5, 0.75, 0.95, 0.999] {
            let h = HurstIndex::new(hv).unwrap();
            let e = CirculantEmbedding::new(&Grid::new(1.0, 1000).unwrap(), h).unwrap();
            assert!(e.sqrt_eigen.iter().all(|v| v.is_finite()));
        }
    }
}
