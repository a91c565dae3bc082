use rand::Rng;
use rand_distr::StandardNormal;

use super::{covariance_unchecked, Grid, HurstIndex};
use crate::error::{Result, RuinError};

/// Largest grid the dense oracle accepts.
pub const MAX_CHOLESKY_POINTS: usize = 4096;

/// Lower-triangular factor of the covariance of `(B(t_1), ..., B(t_{n-1}))`.
/// `t_0 = 0` is excluded since its variance is zero.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    // packed rows: row i holds entries 0..=i
    lower: Vec<f64>,
}

impl CholeskyFactor {
    pub fn new(grid: &Grid, h: HurstIndex) -> Result<Self> {
        if grid.len() > MAX_CHOLESKY_POINTS {
            return Err(RuinError::GridTooLarge { n: grid.len(), limit: MAX_CHOLESKY_POINTS });
        }
        let dim = grid.len() - 1;
        let times: Vec<f64> = (1..grid.len()).map(|j| grid.point(j)).collect();
        let cov = |i: usize, j: usize| covariance_unchecked(times[i], times[j], h.value());
        Ok(Self { dim, lower: factor(dim, cov)? })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.lower[start..start + i + 1]
    }

    pub(crate) fn fill<R: Rng + ?Sized>(&self, rng: &mut R, normals: &mut [f64], out: &mut [f64]) {
        for z in normals.iter_mut() {
            *z = rng.sample(StandardNormal);
        }
        out[0] = 0.0;
        for i in 0..self.dim {
            out[i + 1] = self.row(i).iter().zip(normals.iter()).map(|(l, z)| l * z).sum();
        }
    }
}

/// Dense Cholesky of a symmetric matrix given by `entry(i, j)`, packed by rows.
pub(crate) fn factor(dim: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Vec<f64>> {
    let mut l = vec![0.0; dim * (dim + 1) / 2];
    let idx = |i: usize, j: usize| i * (i + 1) / 2 + j;
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = entry(i, j);
            for k in 0..j {
                sum -= l[idx(i, k)] * l[idx(j, k)];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(RuinError::Factorization { pivot: i });
                }
                l[idx(i, i)] = sum.sqrt();
            } else {
                l[idx(i, j)] = sum / l[idx(j, j)];
            }
        }
    }
    Ok(l)
}
