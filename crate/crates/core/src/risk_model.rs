//! Two-company model parameters, the unit-proportion reduction, the critical
//! times and the regime classification that selects an asymptotic formula.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Result, RuinError};
use crate::gaussian_paths::HurstIndex;

/// Relative tolerance for deciding `t* = t1` or `t* = t2`.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Tolerance on `sigma1 + sigma2 = 1`.
pub const PROPORTION_TOLERANCE: f64 = 1e-12;

/// Raw model: company `i` has surplus `a_i + c_i t - sigma_i X(t)` per business.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub a1: f64,
    pub a2: f64,
    pub c1: f64,
    pub c2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub h: f64,
    pub horizon: f64,
    pub n_businesses: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<HurstIndex> {
        let positive = [
            ("a1", self.a1),
            ("a2", self.a2),
            ("c1", self.c1),
            ("c2", self.c2),
            ("sigma1", self.sigma1),
            ("sigma2", self.sigma2),
            ("horizon", self.horizon),
        ];
        for (name, v) in positive {
            check_positive(name, v)?;
        }
        if ((self.sigma1 + self.sigma2) - 1.0).abs() > PROPORTION_TOLERANCE {
            return Err(RuinError::InvalidParameter(format!(
                "claim proportions must sum to 1, got {} + {}",
                self.sigma1, self.sigma2
            )));
        }
        if !(self.n_businesses.is_finite() && self.n_businesses >= 1.0) {
            return Err(RuinError::InvalidParameter(format!(
                "n_businesses must be at least 1, got {}",
                self.n_businesses
            )));
        }
        HurstIndex::new(self.h)
    }
}

/// Model after dividing company `i` by `sigma_i` and relabeling so `c1 > c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedParams {
    pub a1: f64,
    pub a2: f64,
    pub c1: f64,
    pub c2: f64,
    pub h: HurstIndex,
    pub horizon: f64,
    pub n_businesses: f64,
    /// Whether companies 1 and 2 were exchanged.
    pub swapped: bool,
}

impl NormalizedParams {
    /// Build directly from unit-proportion values (relabels if `c1 < c2`).
    pub fn new(a: (f64, f64), c: (f64, f64), h: f64, horizon: f64) -> Result<Self> {
        for (name, v) in [("a1", a.0), ("a2", a.1), ("c1", c.0), ("c2", c.1), ("horizon", horizon)] {
            check_positive(name, v)?;
        }
        let h = HurstIndex::new(h)?;
        let (a1, a2, c1, c2, swapped) = relabel(a.0, a.1, c.0, c.1)?;
        Ok(Self { a1, a2, c1, c2, h, horizon, n_businesses: 1.0, swapped })
    }

    pub fn with_n(self, n: f64) -> Self {
        Self { n_businesses: n, ..self }
    }

    pub fn with_horizon(self, horizon: f64) -> Self {
        Self { horizon, ..self }
    }

    /// Applying the reduction to an already normalized model is the identity.
    pub fn normalize(&self) -> Result<Self> {
        let (a1, a2, c1, c2, swapped) = relabel(self.a1, self.a2, self.c1, self.c2)?;
        Ok(Self { a1, a2, c1, c2, swapped: self.swapped ^ swapped, ..*self })
    }

    /// `(a, c)` of company `i` (1 or 2).
    pub fn company(&self, i: usize) -> (f64, f64) {
        match i {
            1 => (self.a1, self.c1),
            2 => (self.a2, self.c2),
            _ => panic!("company index must be 1 or 2"),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a1 >= self.a2
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(RuinError::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn relabel(a1: f64, a2: f64, c1: f64, c2: f64) -> Result<(f64, f64, f64, f64, bool)> {
    if (c1 - c2).abs() <= 1e-12 * c1.max(c2) {
        return Err(RuinError::ParallelLines(c1));
    }
    if c1 < c2 {
        Ok((a2, a1, c2, c1, true))
    } else {
        Ok((a1, a2, c1, c2, false))
    }
}

/// Divide each company's capital and premium by its claim proportion and
/// relabel so that `c1 > c2`.
pub fn normalize(params: &ModelParams) -> Result<NormalizedParams> {
    let h = params.validate()?;
    let (a1, a2, c1, c2, swapped) = relabel(
        params.a1 / params.sigma1,
        params.a2 / params.sigma2,
        params.c1 / params.sigma1,
        params.c2 / params.sigma2,
    )?;
    Ok(NormalizedParams {
        a1,
        a2,
        c1,
        c2,
        h,
        horizon: params.horizon,
        n_businesses: params.n_businesses,
        swapped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoints {
    /// Crossing time of the lines `a1 + c1 t` and `a2 + c2 t`.
    pub t_star: f64,
    /// Maximizer of `Var(B_H(t) / (a_i + c_i t))`; `+inf` when H = 1.
    pub t1: f64,
    pub t2: f64,
}

/// `argmax_t t^H / (a + c t) = a H / (c (1 - H))`.
pub fn variance_peak(a: f64, c: f64, h: HurstIndex) -> f64 {
    if h.is_one() {
        f64::INFINITY
    } else {
        let hv = h.value();
        a * hv / (c * (1.0 - hv))
    }
}

pub fn critical_points(p: &NormalizedParams) -> CriticalPoints {
    CriticalPoints {
        t_star: (p.a2 - p.a1) / (p.c1 - p.c2),
        t1: variance_peak(p.a1, p.c1, p.h),
        t2: variance_peak(p.a2, p.c2, p.h),
    }
}

/// `m(a, c, H) = (a / (1 - H))^{1 - H} (c / H)^H`, the reciprocal of the
/// peak standard deviation of `B_H(t) / (a + c t)`.
pub fn m_constant(a: f64, c: f64, h: HurstIndex) -> f64 {
    let hv = h.value();
    (a / (1.0 - hv)).powf(1.0 - hv) * (c / hv).powf(hv)
}

/// `A = |(a + c t*) H - c t*| / ((a + c t*) t*)`.
pub fn a_constant(a: f64, c: f64, t_star: f64, h: HurstIndex) -> Result<f64> {
    if !(t_star > 0.0) {
        return Err(RuinError::UndefinedPeakConstant(t_star));
    }
    let level = a + c * t_star;
    Ok((level * h.value() - c * t_star).abs() / (level * t_star))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakConstants {
    pub m1: f64,
    pub m2: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
}

pub fn peak_constants(p: &NormalizedParams, cp: &CriticalPoints) -> Result<PeakConstants> {
    if p.is_degenerate() {
        return Err(RuinError::UndefinedPeakConstant(cp.t_star));
    }
    Ok(PeakConstants {
        m1: m_constant(p.a1, p.c1, p.h),
        m2: m_constant(p.a2, p.c2, p.h),
        a1: a_constant(p.a1, p.c1, cp.t_star, p.h)?,
        a2: a_constant(p.a2, p.c2, cp.t_star, p.h)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegimeTag {
    /// `a1 >= a2`: the lines do not cross on `[0, inf)`, one-company problem.
    Degenerate,
    /// `t* < t1`
    SimCaseI,
    /// `t* = t1`
    SimCaseII,
    /// `t1 < t* < t2`, H < 1/2
    InteriorLowH,
    /// `t1 < t* < t2`, H = 1/2
    InteriorHalf,
    /// `t1 < t* < t2`, H > 1/2
    InteriorHighH,
    /// `t* = t2`
    SimCaseIV,
    /// `t2 < t*`
    SimCaseV,
    /// `t* >= T`
    BeyondHorizon,
}

impl RegimeTag {
    pub fn is_interior(self) -> bool {
        matches!(self, Self::InteriorLowH | Self::InteriorHalf | Self::InteriorHighH)
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime {
    pub tag: RegimeTag,
    pub detail: CriticalPoints,
    pub horizon: f64,
    pub h: HurstIndex,
}

impl Regime {
    /// Human-readable account of the orderings behind the tag.
    pub fn describe(&self) -> String {
        let CriticalPoints { t_star, t1, t2 } = self.detail;
        let t = self.horizon;
        match self.tag {
            RegimeTag::Degenerate => {
                "a1 >= a2: barrier lines do not intersect on [0, inf); reduces to one-dimensional ruin of company 1".into()
            }
            RegimeTag::BeyondHorizon => format!("t* = {t_star} >= T = {t}: lines cross after the horizon"),
            RegimeTag::SimCaseI => format!("t* = {t_star} < t1 = {t1}, t* < T = {t}"),
            RegimeTag::SimCaseII => format!("t* = t1 = {t1}, t* < T = {t}"),
            RegimeTag::SimCaseIV => format!("t1 = {t1} < t* = t2 = {t2}, t* < T = {t}"),
            RegimeTag::SimCaseV => format!("t1 = {t1} < t2 = {t2} < t* = {t_star} < T = {t}"),
            _ => format!(
                "t1 = {t1} < t* = {t_star} < t2 = {t2}, t* < T = {t}, H = {}",
                self.h.value()
            ),
        }
    }
}

fn ties(x: f64, y: f64) -> bool {
    (x - y).abs() <= TIE_TOLERANCE * x.abs().max(y.abs())
}

pub fn classify(p: &NormalizedParams) -> Regime {
    let cp = critical_points(p);
    let tag = if p.is_degenerate() {
        RegimeTag::Degenerate
    } else if cp.t_star >= p.horizon {
        RegimeTag::BeyondHorizon
    } else if ties(cp.t_star, cp.t1) {
        RegimeTag::SimCaseII
    } else if cp.t_star < cp.t1 {
        RegimeTag::SimCaseI
    } else if ties(cp.t_star, cp.t2) {
        RegimeTag::SimCaseIV
    } else if cp.t_star > cp.t2 {
        RegimeTag::SimCaseV
    } else if p.h.is_half() {
        RegimeTag::InteriorHalf
    } else if p.h.value() < 0.5 {
        RegimeTag::InteriorLowH
    } else {
        RegimeTag::InteriorHighH
    };
    Regime { tag, detail: cp, horizon: p.horizon, h: p.h }
}
