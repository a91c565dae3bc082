use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use serde::Deserialize;

use ruin_core::{normalize, HurstIndex, ModelParams, NormalizedParams};

use crate::Usage;

/// Model parameters, from flags or a JSON config file. Every field is
/// optional here; flags override the file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelArgs {
    /// Initial capital of company 1
    #[arg(long, global = true)]
    pub a1: Option<f64>,
    /// Initial capital of company 2
    #[arg(long, global = true)]
    pub a2: Option<f64>,
    /// Premium rate of company 1
    #[arg(long, global = true)]
    pub c1: Option<f64>,
    /// Premium rate of company 2
    #[arg(long, global = true)]
    pub c2: Option<f64>,
    /// Claim proportion of company 1 (omit both proportions for unit-proportion input)
    #[arg(long, global = true)]
    pub sigma1: Option<f64>,
    /// Claim proportion of company 2
    #[arg(long, global = true)]
    pub sigma2: Option<f64>,
    /// Hurst index in (0, 1]
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Time horizon T
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Number of businesses N
    #[arg(long = "n-businesses", global = true)]
    pub n_businesses: Option<f64>,
}

impl ModelArgs {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| Usage(format!("config {}: {e}", path.display())).into())
    }

    /// `self` with every unset field taken from `file`.
    pub fn over(self, file: Self) -> Self {
        Self {
            a1: self.a1.or(file.a1),
            a2: self.a2.or(file.a2),
            c1: self.c1.or(file.c1),
            c2: self.c2.or(file.c2),
            sigma1: self.sigma1.or(file.sigma1),
            sigma2: self.sigma2.or(file.sigma2),
            h: self.h.or(file.h),
            horizon: self.horizon.or(file.horizon),
            n_businesses: self.n_businesses.or(file.n_businesses),
        }
    }

    pub fn hurst(&self) -> Result<HurstIndex> {
        let h = self.h.ok_or_else(|| Usage("missing --h (Hurst index)".into()))?;
        Ok(HurstIndex::new(h)?)
    }

    /// Raw parameters (if proportions were given) and the normalized model.
    pub fn model(&self) -> Result<(Option<ModelParams>, NormalizedParams)> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Usage(format!("missing --{name}")));
        let (a1, a2) = (need(self.a1, "a1")?, need(self.a2, "a2")?);
        let (c1, c2) = (need(self.c1, "c1")?, need(self.c2, "c2")?);
        let h = need(self.h, "h")?;
        let horizon = need(self.horizon, "horizon")?;
        let n = self.n_businesses.unwrap_or(1.0);
        match (self.sigma1, self.sigma2) {
            (None, None) => {
                if !(n.is_finite() && n >= 1.0) {
                    return Err(Usage(format!("n_businesses must be at least 1, got {n}")).into());
                }
                Ok((None, NormalizedParams::new((a1, a2), (c1, c2), h, horizon)?.with_n(n)))
            }
            (Some(sigma1), Some(sigma2)) => {
                let raw = ModelParams { a1, a2, c1, c2, sigma1, sigma2, h, horizon, n_businesses: n };
                Ok((Some(raw), normalize(&raw)?))
            }
            _ => Err(Usage("give both --sigma1 and --sigma2, or neither".into()).into()),
        }
    }
}
