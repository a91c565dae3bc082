use std::f64::consts::PI;

use serde::Serialize;

use super::{AsymptoticValue, PaperFlags};
use crate::error::{Result, RuinError};
use crate::gaussian_paths::HurstIndex;
use crate::risk_model::{m_constant, TIE_TOLERANCE};
use crate::special::LN_SQRT_2PI;

/// Which one-dimensional formula applies, by position of the variance peak
/// `tau = H a / ((1 - H) c)` relative to the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OneDimCase {
    /// `T > tau`
    PeakInside,
    /// `T = tau`
    PeakAtHorizon,
    /// `T < tau`, H < 1/2
    HorizonLowH,
    /// `T < tau`, H = 1/2
    HorizonBrownian,
    /// `T < tau`, H > 1/2
    HorizonHighH,
}

impl OneDimCase {
    pub fn select(a: f64, c: f64, h: HurstIndex, horizon: f64) -> Self {
        let hv = h.value();
        let tau = hv / (1.0 - hv) * a / c;
        if (horizon - tau).abs() <= TIE_TOLERANCE * horizon.max(tau) {
            Self::PeakAtHorizon
        } else if horizon > tau {
            Self::PeakInside
        } else if h.is_half() {
            Self::HorizonBrownian
        } else if hv < 0.5 {
            Self::HorizonLowH
        } else {
            Self::HorizonHighH
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PeakInside => "one-dim/peak-inside",
            Self::PeakAtHorizon => "one-dim/peak-at-horizon",
            Self::HorizonLowH => "one-dim/horizon-low-h",
            Self::HorizonBrownian => "one-dim/horizon-brownian",
            Self::HorizonHighH => "one-dim/horizon-high-h",
        }
    }

    fn needs_pickands(self) -> bool {
        matches!(self, Self::PeakInside | Self::PeakAtHorizon | Self::HorizonLowH)
    }
}

pub(crate) fn resolve_pickands(h: HurstIndex, pickands: Option<f64>) -> Result<f64> {
    match pickands {
        Some(v) if v > 0.0 && v.is_finite() => Ok(v),
        Some(v) => Err(RuinError::InvalidParameter(format!("Pickands constant must be positive, got {v}"))),
        None if h.is_half() => Ok(1.0),
        None if h.is_one() => Ok(1.0 / PI.sqrt()),
        None => Err(RuinError::ConstantRequired {
            which: "Pickands",
            hint: "estimate it with constants::pickands (CLI: `pickands --h <H>`) and pass it in",
        }),
    }
}

/// Asymptotics of `P(sup_{t<=T} (B_H(t) - c sqrt(N) t) > a sqrt(N))` as `N -> inf`.
///
/// `pickands` is `H_{2H}`; it may be omitted at H = 1/2. Requires `0 < H < 1`.
pub fn psi_one_dim(
    a: f64,
    c: f64,
    h: HurstIndex,
    horizon: f64,
    pickands: Option<f64>,
    flags: PaperFlags,
) -> Result<AsymptoticValue> {
    for (name, v) in [("a", a), ("c", c), ("T", horizon)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(RuinError::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if h.is_one() {
        return Err(RuinError::Domain(
            "one-dimensional asymptotics need H < 1; the H = 1 model is exactly Gaussian".into(),
        ));
    }
    let hv = h.value();
    let case = OneDimCase::select(a, c, h, horizon);
    let pk = if case.needs_pickands() { resolve_pickands(h, pickands)?.ln() } else { 0.0 };
    let t = horizon;
    let level = a + c * t;

    let value = match case {
        OneDimCase::PeakInside | OneDimCase::PeakAtHorizon => {
            let m = m_constant(a, c, h);
            let mut lp = pk - PI.ln() - 0.5 * (hv * (1.0 - hv)).ln()
                + (1.0 / hv - 1.0) * (m / std::f64::consts::SQRT_2).ln()
                - LN_SQRT_2PI
                - m.ln();
            if case == OneDimCase::PeakAtHorizon {
                lp -= std::f64::consts::LN_2;
            }
            AsymptoticValue::leading(case.name(), lp, 0.5 * (hv - 1.0) - 0.5, 0.5 * m * m)
        }
        OneDimCase::HorizonLowH => {
            let denom = c * t - hv * level;
            let lp = pk + (2.0 * hv - 1.0) * t.ln() + (1.0 / hv - 1.0) * level.ln()
                - denom.abs().ln()
                - 0.5 * hv * std::f64::consts::LN_2
                - LN_SQRT_2PI
                + hv * t.ln()
                - level.ln();
            let mut v = AsymptoticValue::leading(
                case.name(),
                lp,
                0.5 * (hv - 2.0) - 0.5,
                level * level / (2.0 * t.powf(2.0 * hv)),
            );
            if flags.strict_sign && denom < 0.0 {
                v.sign = -1.0;
            }
            v
        }
        OneDimCase::HorizonBrownian => {
            let gap = a - c * t;
            assert!(gap > 0.0, "T < a/c on the short-horizon branch at H = 1/2");
            let lp = -LN_SQRT_2PI + (2.0 * a * t.sqrt()).ln() - (gap * level).ln();
            AsymptoticValue::leading(case.name(), lp, -0.5, level * level / (2.0 * t))
        }
        OneDimCase::HorizonHighH => {
            let power = if flags.psi_form { hv } else { 2.0 * hv };
            let lp = -LN_SQRT_2PI + power * t.ln() - level.ln();
            AsymptoticValue::leading(case.name(), lp, -0.5, level * level / (2.0 * t.powf(2.0 * hv)))
        }
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{log_psi, log_sum_exp};

    fn h(v: f64) -> HurstIndex {
        HurstIndex::new(v).unwrap()
    }

    #[test]
    fn peak_inside_brownian_example() {
        let v = psi_one_dim(1.0, 1.0, h(0.5), 2.0, None, PaperFlags::default()).unwrap();
        assert_eq!(v.form, "one-dim/peak-inside");
        let kappa = 2f64.sqrt() / (PI * (2.0 * PI).sqrt());
        assert!((kappa - 0.17959).abs() < 1e-5);
        assert!((v.log_prefactor - kappa.ln()).abs() < 1e-13);
        assert!((v.n_power + 0.75).abs() < 1e-15);
        assert!((v.rate - 2.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_case_halves_prefactor() {
        // tau = a/c at H = 1/2
        let inside = psi_one_dim(1.0, 1.0, h(0.5), 2.0, None, PaperFlags::default()).unwrap();
        let tie = psi_one_dim(1.0, 1.0, h(0.5), 1.0, None, PaperFlags::default()).unwrap();
        assert_eq!(tie.form, "one-dim/peak-at-horizon");
        assert!((inside.log_prefactor - tie.log_prefactor - 2f64.ln()).abs() < 1e-14);
        assert_eq!(inside.rate, tie.rate);
    }

    #[test]
    fn short_horizon_brownian_example() {
        let v = psi_one_dim(2.0, 1.0, h(0.5), 1.0, None, PaperFlags::default()).unwrap();
        assert_eq!(v.form, "one-dim/horizon-brownian");
        for n in [1.0, 7.0, 30.0] {
            let want = (1.0 / (2.0 * PI * n).sqrt()) * (4.0 / 3.0) * (-4.5 * n).exp();
            assert!((v.evaluate(n) / want - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reflection_oracle_ratio_tends_to_one() {
        // P(sup_{t<=T} W(t) - mu t > x) for Brownian motion
        let (a, c, t) = (2.0, 1.0, 1.0);
        let log_exact = |n: f64| {
            let s = n.sqrt();
            log_sum_exp(&[
                log_psi((a + c * t) * s / t.sqrt()),
                -2.0 * a * c * n + log_psi((a - c * t) * s / t.sqrt()),
            ])
        };
        let v = psi_one_dim(a, c, h(0.5), t, None, PaperFlags::default()).unwrap();
        let dev = |n: f64| ((log_exact(n) - v.log_evaluate(n)).exp() - 1.0).abs();
        assert!(dev(50.0) < 0.02);
        assert!(dev(200.0) < 0.005);
    }

    #[test]
    fn pickands_required_off_half() {
        let err = psi_one_dim(1.0, 1.0, h(0.3), 5.0, None, PaperFlags::default()).unwrap_err();
        assert!(matches!(err, RuinError::ConstantRequired { which: "Pickands", .. }));
        // short horizon at H > 1/2 needs no constant
        assert!(psi_one_dim(1.0, 1.0, h(0.8), 1.0, None, PaperFlags::default()).is_ok());
        assert!(psi_one_dim(1.0, 1.0, h(1.0), 1.0, None, PaperFlags::default()).is_err());
    }

    #[test]
    fn low_h_sign_flag() {
        // tau = (0.3/0.7) * 4 = 1.714 > T = 1
        let flags = PaperFlags { strict_sign: true, ..Default::default() };
        let strict = psi_one_dim(4.0, 1.0, h(0.3), 1.0, Some(1.5), flags).unwrap();
        let fixed = psi_one_dim(4.0, 1.0, h(0.3), 1.0, Some(1.5), PaperFlags::default()).unwrap();
        assert_eq!(strict.form, "one-dim/horizon-low-h");
        assert_eq!(strict.sign, -1.0);
        assert_eq!(fixed.sign, 1.0);
        assert_eq!(strict.evaluate(2.0), -fixed.evaluate(2.0));
    }

    #[test]
    fn high_h_psi_form_differs_by_t_power() {
        let (a, c, t, hv) = (3.0, 1.0, 2.0, 0.7);
        let base = psi_one_dim(a, c, h(hv), t, None, PaperFlags::default()).unwrap();
        let alt = psi_one_dim(a, c, h(hv), t, None, PaperFlags { psi_form: true, ..Default::default() }).unwrap();
        assert_eq!(base.form, "one-dim/horizon-high-h");
        assert!((base.log_prefactor - alt.log_prefactor - hv * t.ln()).abs() < 1e-14);
        // psi-form is the leading term of the Gaussian tail at the horizon
        let u = (a + c * t) / t.powf(hv);
        let n = 400.0;
        let r = (alt.log_evaluate(n) - log_psi(u * n.sqrt())).exp();
        assert!((r - 1.0).abs() < 1e-2, "{r}");
    }

    #[test]
    fn rate_continuity_across_case_boundary() {
        for &(a, c, hv) in &[(1.0, 1.0, 0.3), (2.0, 0.7, 0.6), (0.5, 3.0, 0.85)] {
            let hh = h(hv);
            let tau = hv / (1.0 - hv) * a / c;
            let inside = psi_one_dim(a, c, hh, tau * 1.5, Some(1.0), PaperFlags::default()).unwrap();
            let level = a + c * tau;
            let boundary_rate = level * level / (2.0 * tau.powf(2.0 * hv));
            assert!((inside.rate - boundary_rate).abs() <= 1e-10 * inside.rate);
        }
    }
}
