//! Discretized fractional Brownian motion.
//!
//! The default generator embeds the fractional Gaussian noise covariance in a
//! circulant matrix and diagonalizes it with an FFT; a dense Cholesky
//! factorization serves as the slow exact oracle and as the fallback when the
//! embedding is not nonnegative definite.

mod cholesky;
mod circulant;

pub use cholesky::{CholeskyFactor, MAX_CHOLESKY_POINTS};
pub use circulant::{CirculantEmbedding, NEGATIVE_EIGEN_TOLERANCE};

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, RuinError};
use crate::seeding::replication_rng;

/// Hurst index in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct HurstIndex(f64);

impl HurstIndex {
    pub fn new(h: f64) -> Result<Self> {
        if h.is_finite() && h > 0.0 && h <= 1.0 {
            Ok(Self(h))
        } else {
            Err(RuinError::InvalidParameter(format!(
                "Hurst index must lie in (0, 1], got {h}"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_half(self) -> bool {
        (self.0 - 0.5).abs() <= 1e-12
    }

    pub fn is_one(self) -> bool {
        self.0 >= 1.0 - 1e-12
    }
}

/// Uniform grid `t_j = j T / (n - 1)`, `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    horizon: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(horizon: f64, n_points: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(RuinError::InvalidParameter(format!(
                "grid horizon must be positive, got {horizon}"
            )));
        }
        if n_points < 2 {
            return Err(RuinError::InvalidParameter(format!(
                "grid needs at least 2 points, got {n_points}"
            )));
        }
        Ok(Self { horizon, n_points })
    }

    /// Grid over `[0, horizon]` with spacing as close as possible to `delta`.
    pub fn with_spacing(horizon: f64, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(RuinError::InvalidParameter(format!(
                "grid spacing must be positive, got {delta}"
            )));
        }
        let steps = (horizon / delta).round().max(1.0) as usize;
        Self::new(horizon, steps + 1)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.horizon / (self.n_points - 1) as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        if j + 1 == self.n_points {
            self.horizon
        } else {
            j as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.point(j))
    }

    /// Index of the grid point nearest to `t`, clamped to `1..n`.
    pub fn nearest_interior(&self, t: f64) -> usize {
        let j = (t / self.step()).round();
        (j.max(1.0) as usize).min(self.n_points - 1)
    }
}

/// Which sampler produced a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Circulant,
    Cholesky,
    /// H = 1: the path is `t * Z` for a single standard normal `Z`.
    RankOne,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSample {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub generator: GeneratorKind,
    pub seed: u64,
}

/// `Cov(B_H(s), B_H(t)) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2`.
pub fn fbm_covariance(s: f64, t: f64, h: HurstIndex) -> Result<f64> {
    if s < 0.0 || t < 0.0 || s.is_nan() || t.is_nan() {
        return Err(RuinError::Domain(format!(
            "fBm covariance needs nonnegative times, got ({s}, {t})"
        )));
    }
    Ok(covariance_unchecked(s, t, h.value()))
}

#[inline]
pub(crate) fn covariance_unchecked(s: f64, t: f64, h: f64) -> f64 {
    let two_h = 2.0 * h;
    0.5 * (s.powf(two_h) + t.powf(two_h) - (t - s).abs().powf(two_h))
}

/// `Cov(B_H(t_j), B_H(t0))` for every grid point.
pub fn covariance_with(grid: &Grid, t0: f64, h: HurstIndex) -> Vec<f64> {
    grid.points()
        .map(|t| covariance_unchecked(t, t0, h.value()))
        .collect()
}

/// Precomputed sampler for a fixed `(grid, h)`. Immutable and shareable
/// across threads; per-thread buffers live in [`Scratch`].
#[derive(Debug, Clone)]
pub struct FbmGenerator {
    grid: Grid,
    h: HurstIndex,
    inner: Inner,
}

#[derive(Debug, Clone)]
enum Inner {
    Circulant(CirculantEmbedding),
    Cholesky(CholeskyFactor),
    RankOne,
}

/// Working memory for one sampling thread.
pub struct Scratch {
    pub(crate) buffer: Vec<Complex64>,
    pub(crate) fft: Vec<Complex64>,
    pub(crate) normals: Vec<f64>,
}

impl FbmGenerator {
    /// Circulant embedding, falling back to Cholesky when the embedding has a
    /// significantly negative eigenvalue. H = 1 uses the rank-one sampler.
    pub fn new(grid: Grid, h: HurstIndex) -> Result<Self> {
        if h.is_one() {
            return Ok(Self { grid, h, inner: Inner::RankOne });
        }
        let inner = match CirculantEmbedding::new(&grid, h) {
            Ok(emb) => Inner::Circulant(emb),
            Err(RuinError::NegativeEmbedding { .. }) => {
                Inner::Cholesky(CholeskyFactor::new(&grid, h)?)
            }
            Err(e) => return Err(e),
        };
        Ok(Self { grid, h, inner })
    }

    /// Dense Cholesky sampler regardless of whether the embedding works.
    pub fn cholesky(grid: Grid, h: HurstIndex) -> Result<Self> {
        if h.is_one() {
            return Ok(Self { grid, h, inner: Inner::RankOne });
        }
        Ok(Self { grid, h, inner: Inner::Cholesky(CholeskyFactor::new(&grid, h)?) })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn hurst(&self) -> HurstIndex {
        self.h
    }

    pub fn kind(&self) -> GeneratorKind {
        match self.inner {
            Inner::Circulant(_) => GeneratorKind::Circulant,
            Inner::Cholesky(_) => GeneratorKind::Cholesky,
            Inner::RankOne => GeneratorKind::RankOne,
        }
    }

    pub fn scratch(&self) -> Scratch {
        match &self.inner {
            Inner::Circulant(emb) => emb.scratch(),
            Inner::Cholesky(f) => Scratch {
                buffer: Vec::new(),
                fft: Vec::new(),
                normals: vec![0.0; f.dim()],
            },
            Inner::RankOne => Scratch { buffer: Vec::new(), fft: Vec::new(), normals: Vec::new() },
        }
    }

    /// Write one path into `out` (length must equal the grid size).
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, scratch: &mut Scratch, out: &mut [f64]) {
        assert_eq!(out.len(), self.grid.len(), "output length must match the grid");
        match &self.inner {
            Inner::Circulant(emb) => emb.fill(rng, scratch, out),
            Inner::Cholesky(f) => f.fill(rng, &mut scratch.normals, out),
            Inner::RankOne => {
                let z: f64 = rng.sample(StandardNormal);
                for (j, v) in out.iter_mut().enumerate() {
                    *v = self.grid.point(j) * z;
                }
                out[0] = 0.0;
            }
        }
    }

    /// Path for replication `index` under master seed `seed`.
    pub fn sample_replication(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = replication_rng(seed, index);
        let mut scratch = self.scratch();
        let mut out = vec![0.0; self.grid.len()];
        self.fill(&mut rng, &mut scratch, &mut out);
        out
    }

    pub fn sample(&self, seed: u64) -> PathSample {
        PathSample {
            grid: self.grid,
            values: self.sample_replication(seed, 0),
            generator: self.kind(),
            seed,
        }
    }
}

/// One fBm path on `grid`, by circulant embedding (Cholesky fallback).
/// Deterministic in `seed`.
pub fn sample_fbm(grid: Grid, h: HurstIndex, seed: u64) -> Result<PathSample> {
    Ok(FbmGenerator::new(grid, h)?.sample(seed))
}

/// One fBm path on `grid` via dense Cholesky factorization.
pub fn sample_fbm_cholesky(grid: Grid, h: HurstIndex, seed: u64) -> Result<PathSample> {
    Ok(FbmGenerator::cholesky(grid, h)?.sample(seed))
}
