//! Pickands constant `H_{2H}` and the drifted Piterbarg-type constant used in
//! the interior Brownian case.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Result, RuinError};
use crate::gaussian_paths::{FbmGenerator, Grid, HurstIndex};
use crate::seeding::{map_blocks, map_blocks_init, replication_rng, DEFAULT_SEED};

/// Below `1 + BETA_GUARD` the Piterbarg expectation is treated as divergent.
pub const BETA_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantMethod {
    Exact,
    Simulated,
    AnalyticHHalf,
}

/// Simulation estimator for the Pickands constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PickandsEstimator {
    /// `E[sup e^W / int e^W]` over a two-sided window `[-T, T]`, where
    /// `W(t) = sqrt(2) B_H(t) - |t|^{2H}`. Bounded by `1/delta`, so the
    /// sample mean is well behaved, and the truncation bias is small.
    Ratio,
    /// The defining expectation `(1/T) E exp(sup_{[0,T]} W)`. Heavy tailed,
    /// with an `O(1/T)` upward truncation bias.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PickandsOptions {
    pub truncation_t: f64,
    pub grid_delta: f64,
    pub replications: u64,
    pub seed: u64,
    pub estimator: PickandsEstimator,
    /// Simulate even where the value is known exactly.
    pub force_simulated: bool,
}

impl Default for PickandsOptions {
    fn default() -> Self {
        Self {
            truncation_t: 10.0,
            grid_delta: 0.005,
            replications: 100_000,
            seed: DEFAULT_SEED,
            estimator: PickandsEstimator::Ratio,
            force_simulated: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PickandsEstimate {
    pub h: HurstIndex,
    pub value: f64,
    pub std_error: f64,
    pub method: ConstantMethod,
    #[serde(rename = "truncation_T")]
    pub truncation_t: Option<f64>,
    pub grid_delta: Option<f64>,
    pub replications: u64,
    pub seed: Option<u64>,
    pub estimator: Option<PickandsEstimator>,
}

/// `H_{2H}`: exact at H = 1/2 (value 1) and H = 1 (value `1/sqrt(pi)`),
/// simulated otherwise.
pub fn pickands(h: HurstIndex, opts: PickandsOptions) -> Result<PickandsEstimate> {
    if !opts.force_simulated {
        let exact = if h.is_half() {
            Some(1.0)
        } else if h.is_one() {
            Some(1.0 / PI.sqrt())
        } else {
            None
        };
        if let Some(value) = exact {
            return Ok(PickandsEstimate {
                h,
                value,
                std_error: 0.0,
                method: ConstantMethod::Exact,
                truncation_t: None,
                grid_delta: None,
                replications: 0,
                seed: None,
                estimator: None,
            });
        }
    }
    let (value, std_error) = match opts.estimator {
        PickandsEstimator::Ratio => pickands_ratio(h, &opts)?,
        PickandsEstimator::Truncated => pickands_truncated(h, &opts)?,
    };
    Ok(PickandsEstimate {
        h,
        value,
        std_error,
        method: ConstantMethod::Simulated,
        truncation_t: Some(opts.truncation_t),
        grid_delta: Some(opts.grid_delta),
        replications: opts.replications,
        seed: Some(opts.seed),
        estimator: Some(opts.estimator),
    })
}

fn check_sim(t: f64, delta: f64, reps: u64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(RuinError::InvalidParameter(format!("truncation T must be positive, got {t}")));
    }
    if !(delta > 0.0 && delta < t) {
        return Err(RuinError::InvalidParameter(format!("grid spacing must lie in (0, T), got {delta}")));
    }
    if reps < 2 {
        return Err(RuinError::InvalidParameter("at least 2 replications are required".into()));
    }
    Ok(())
}

/// Running `(count, sum, sum of squares)`.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(self, o: Self) -> Self {
        Self { n: self.n + o.n, sum: self.sum + o.sum, sum_sq: self.sum_sq + o.sum_sq }
    }

    /// Mean and standard error of the mean.
    fn finish(self) -> (f64, f64) {
        let mean = self.sum / self.n;
        let var = ((self.sum_sq - self.n * mean * mean) / (self.n - 1.0)).max(0.0);
        (mean, (var / self.n).sqrt())
    }
}

fn pickands_ratio(h: HurstIndex, opts: &PickandsOptions) -> Result<(f64, f64)> {
    let (t, delta) = (opts.truncation_t, opts.grid_delta);
    check_sim(t, delta, opts.replications)?;
    // a path on [0, 2T] re-centred at its midpoint is fBm on [-T, T]
    let half = (t / delta).round() as usize;
    let grid = Grid::new(2.0 * half as f64 * delta, 2 * half + 1)?;
    let gen = FbmGenerator::new(grid, h)?;
    let two_h = 2.0 * h.value();
    let drift: Vec<f64> = (0..grid.len())
        .map(|j| ((j as f64 - half as f64) * delta).abs().powf(two_h))
        .collect();

    let blocks = map_blocks_init(
        opts.replications,
        || (gen.scratch(), vec![0.0; grid.len()]),
        |(scratch, path), range| {
            let mut m = Moments::default();
            for i in range {
                let mut rng = replication_rng(opts.seed, i);
                gen.fill(&mut rng, scratch, path);
                let mid = path[half];
                let mut max = f64::NEG_INFINITY;
                for (x, d) in path.iter_mut().zip(&drift) {
                    *x = SQRT_2 * (*x - mid) - d;
                    max = max.max(*x);
                }
                let sum: f64 = path.iter().map(|x| (x - max).exp()).sum();
                m.push(1.0 / (delta * sum));
            }
            m
        },
    );
    Ok(blocks.into_iter().fold(Moments::default(), Moments::merge).finish())
}

/// Log-space accumulator of `exp(x_i)`: scale `s`, `sum exp(x_i - s)` and
/// `sum exp(2 (x_i - s))`.
#[derive(Debug, Clone, Copy)]
struct LogMoments {
    n: f64,
    scale: f64,
    sum: f64,
    sum_sq: f64,
}

impl LogMoments {
    const EMPTY: Self = Self { n: 0.0, scale: f64::NEG_INFINITY, sum: 0.0, sum_sq: 0.0 };

    fn rescale(self, scale: f64) -> Self {
        if self.scale == scale || self.n == 0.0 {
            return Self { scale, ..self };
        }
        let f = (self.scale - scale).exp();
        Self { n: self.n, scale, sum: self.sum * f, sum_sq: self.sum_sq * f * f }
    }

    fn push(&mut self, x: f64) {
        let mut s = self.rescale(self.scale.max(x));
        let e = (x - s.scale).exp();
        s.n += 1.0;
        s.sum += e;
        s.sum_sq += e * e;
        *self = s;
    }

    fn merge(self, o: Self) -> Self {
        let scale = self.scale.max(o.scale);
        let (a, b) = (self.rescale(scale), o.rescale(scale));
        Self { n: a.n + b.n, scale, sum: a.sum + b.sum, sum_sq: a.sum_sq + b.sum_sq }
    }

    /// Natural log of the mean and of its standard error.
    fn finish_log(self) -> (f64, f64) {
        let mean = self.sum / self.n;
        let var = ((self.sum_sq - self.n * mean * mean) / (self.n - 1.0)).max(0.0);
        (self.scale + mean.ln(), self.scale + 0.5 * (var / self.n).ln())
    }
}

fn pickands_truncated(h: HurstIndex, opts: &PickandsOptions) -> Result<(f64, f64)> {
    let (t, delta) = (opts.truncation_t, opts.grid_delta);
    check_sim(t, delta, opts.replications)?;
    let grid = Grid::with_spacing(t, delta)?;
    let gen = FbmGenerator::new(grid, h)?;
    let two_h = 2.0 * h.value();
    let drift: Vec<f64> = grid.points().map(|s| s.powf(two_h)).collect();

    let blocks = map_blocks_init(
        opts.replications,
        || (gen.scratch(), vec![0.0; grid.len()]),
        |(scratch, path), range| {
            let mut m = LogMoments::EMPTY;
            for i in range {
                let mut rng = replication_rng(opts.seed, i);
                gen.fill(&mut rng, scratch, path);
                let sup = path
                    .iter()
                    .zip(&drift)
                    .map(|(x, d)| SQRT_2 * x - d)
                    .fold(f64::NEG_INFINITY, f64::max);
                m.push(sup);
            }
            m
        },
    );
    let (log_mean, log_se) = blocks.into_iter().fold(LogMoments::EMPTY, LogMoments::merge).finish_log();
    let log_t = grid.horizon().ln();
    Ok(((log_mean - log_t).exp(), (log_se - log_t).exp()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiterbargOptions {
    pub truncation_t: f64,
    pub grid_delta: f64,
    pub replications: u64,
    pub seed: u64,
}

impl Default for PiterbargOptions {
    fn default() -> Self {
        Self { truncation_t: 15.0, grid_delta: 0.005, replications: 100_000, seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiterbargEstimate {
    pub beta_neg: f64,
    pub beta_pos: f64,
    pub value: f64,
    pub std_error: f64,
    pub method: ConstantMethod,
    #[serde(rename = "truncation_T")]
    pub truncation_t: Option<f64>,
    pub grid_delta: Option<f64>,
    pub replications: u64,
    pub seed: Option<u64>,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta >= 1.0 + BETA_GUARD {
        Ok(())
    } else {
        Err(RuinError::NonIntegrable(beta))
    }
}

/// `E exp(sup_t (sqrt(2) B(t) - d(t)))` for two-sided Brownian motion and
/// `d(t) = beta_neg |t|` on `t < 0`, `beta_pos t` on `t >= 0`.
///
/// The one-sided suprema are independent exponentials with rates `beta`,
/// which gives the closed form
/// `b+/(b+ - 1) + b-/(b- - 1) - (b+ + b-)/(b+ + b- - 1)`.
pub fn piterbarg_h_half(beta_neg: f64, beta_pos: f64) -> Result<PiterbargEstimate> {
    check_beta(beta_neg)?;
    check_beta(beta_pos)?;
    let e = |b: f64| b / (b - 1.0);
    Ok(PiterbargEstimate {
        beta_neg,
        beta_pos,
        value: e(beta_pos) + e(beta_neg) - e(beta_pos + beta_neg),
        std_error: 0.0,
        method: ConstantMethod::AnalyticHHalf,
        truncation_t: None,
        grid_delta: None,
        replications: 0,
        seed: None,
    })
}

/// The constant for a crossing at `t*` with peak constants `A1`, `A2`:
/// `beta_neg = 1 + 2 t* A2`, `beta_pos = 1 + 2 t* A1`.
pub fn piterbarg_for_crossing(t_star: f64, a1: f64, a2: f64) -> Result<PiterbargEstimate> {
    piterbarg_h_half(1.0 + 2.0 * t_star * a2, 1.0 + 2.0 * t_star * a1)
}

/// Monte Carlo check of [`piterbarg_h_half`] on `[-T, T]`.
///
/// Each side is a random walk with Gaussian increments; the maximum over
/// every cell is drawn exactly from the Brownian-bridge law given the cell
/// endpoints, so the only bias is truncation at `T`.
pub fn piterbarg_simulated(beta_neg: f64, beta_pos: f64, opts: PiterbargOptions) -> Result<PiterbargEstimate> {
    check_beta(beta_neg)?;
    check_beta(beta_pos)?;
    let (t, delta) = (opts.truncation_t, opts.grid_delta);
    check_sim(t, delta, opts.replications)?;
    let steps = (t / delta).round() as usize;
    let sd = (2.0 * delta).sqrt();

    let side_max = |rng: &mut rand_chacha::ChaCha8Rng, beta: f64| {
        let mut x = 0.0f64;
        let mut best = 0.0f64;
        for _ in 0..steps {
            let z: f64 = rng.sample(StandardNormal);
            let y = x + sd * z - beta * delta;
            let u: f64 = 1.0 - rng.random::<f64>();
            let d = y - x;
            let m = 0.5 * (x + y + (d * d - 4.0 * delta * u.ln()).sqrt());
            best = best.max(m);
            x = y;
        }
        best
    };

    let blocks = map_blocks(opts.replications, |range| {
        let mut m = Moments::default();
        for i in range {
            let mut rng = replication_rng(opts.seed, i);
            let neg = side_max(&mut rng, beta_neg);
            let pos = side_max(&mut rng, beta_pos);
            m.push(neg.max(pos).exp());
        }
        m
    });
    let (value, std_error) = blocks.into_iter().fold(Moments::default(), Moments::merge).finish();
    Ok(PiterbargEstimate {
        beta_neg,
        beta_pos,
        value,
        std_error,
        method: ConstantMethod::Simulated,
        truncation_t: Some(t),
        grid_delta: Some(delta),
        replications: opts.replications,
        seed: Some(opts.seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hurst(h: f64) -> HurstIndex {
        HurstIndex::new(h).unwrap()
    }

    #[test]
    fn exact_pickands() {
        let o = PickandsOptions::default();
        let a = pickands(hurst(0.5), o).unwrap();
        assert_eq!((a.value, a.method), (1.0, ConstantMethod::Exact));
        let b = pickands(hurst(1.0), o).unwrap();
        assert!((b.value - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert_eq!(b.method, ConstantMethod::Exact);
    }

    #[test]
    fn pickands_elsewhere_is_simulated() {
        let o = PickandsOptions { truncation_t: 4.0, grid_delta: 0.02, replications: 2000, ..Default::default() };
        let e = pickands(hurst(0.3), o).unwrap();
        assert_eq!(e.method, ConstantMethod::Simulated);
        assert!(e.value > 0.0 && e.std_error > 0.0);
        assert_eq!(pickands(hurst(0.3), o).unwrap(), e);
    }

    #[test]
    fn small_ratio_estimate_near_one() {
        let o = PickandsOptions {
            truncation_t: 6.0,
            grid_delta: 0.01,
            replications: 4000,
            force_simulated: true,
            ..Default::default()
        };
        let e = pickands(hurst(0.5), o).unwrap();
        assert!((e.value - 1.0).abs() < 0.1, "{e:?}");
        let e1 = pickands(hurst(1.0), o).unwrap();
        assert!((e1.value - 1.0 / PI.sqrt()).abs() < 0.05, "{e1:?}");
    }

    #[test]
    fn truncated_estimator_is_finite_in_log_space() {
        let o = PickandsOptions {
            truncation_t: 5.0,
            grid_delta: 0.01,
            replications: 3000,
            estimator: PickandsEstimator::Truncated,
            force_simulated: true,
            ..Default::default()
        };
        let e = pickands(hurst(0.5), o).unwrap();
        assert!(e.value.is_finite() && e.value > 0.5 && e.value < 2.5, "{e:?}");
    }

    #[test]
    fn log_moments_match_direct() {
        let xs = [0.1, -2.0, 3.5, 1.25, 0.0];
        let mut a = LogMoments::EMPTY;
        let mut b = LogMoments::EMPTY;
        let mut d = Moments::default();
        for (i, &x) in xs.iter().enumerate() {
            if i < 2 { a.push(x) } else { b.push(x) }
            d.push(x.exp());
        }
        let (lm, ls) = a.merge(b).finish_log();
        let (m, s) = d.finish();
        assert!((lm.exp() - m).abs() < 1e-12 * m);
        assert!((ls.exp() - s).abs() < 1e-12 * s);
    }

    #[test]
    fn analytic_examples() {
        assert!((piterbarg_h_half(2.0, 2.0).unwrap().value - 8.0 / 3.0).abs() < 1e-14);
        assert!((piterbarg_h_half(4.0 / 3.0, 4.0 / 3.0).unwrap().value - 6.4).abs() < 1e-12);
        assert!((piterbarg_for_crossing(1.0, 1.0 / 6.0, 1.0 / 6.0).unwrap().value - 6.4).abs() < 1e-12);
    }

    #[test]
    fn divergence_guard() {
        assert!(matches!(piterbarg_h_half(1.0, 2.0), Err(RuinError::NonIntegrable(_))));
        assert!(matches!(piterbarg_h_half(2.0, 1.0 + 1e-7), Err(RuinError::NonIntegrable(_))));
        assert!(matches!(piterbarg_h_half(0.5, 2.0), Err(RuinError::NonIntegrable(_))));
        let near = piterbarg_h_half(2.0, 1.0 + 2e-6).unwrap().value;
        assert!(near > 1e5);
    }

    #[test]
    fn symmetric_and_decreasing() {
        let betas: Vec<f64> = (0..40).map(|i| 1.01 + 0.1 * i as f64).collect();
        for &x in &betas {
            for w in betas.windows(2) {
                let v0 = piterbarg_h_half(x, w[0]).unwrap().value;
                let v1 = piterbarg_h_half(x, w[1]).unwrap().value;
                assert!(v1 < v0);
                assert!(v0 > 1.0);
                let swapped = piterbarg_h_half(w[0], x).unwrap().value;
                assert!((swapped - v0).abs() <= 1e-12 * v0);
            }
        }
    }

    #[test]
    fn small_simulation_agrees() {
        let o = PiterbargOptions { truncation_t: 8.0, grid_delta: 0.01, replications: 5000, seed: 11 };
        let s = piterbarg_simulated(2.0, 2.0, o).unwrap();
        assert!((s.value - 8.0 / 3.0).abs() < 4.0 * s.std_error + 0.02, "{s:?}");
    }
}
