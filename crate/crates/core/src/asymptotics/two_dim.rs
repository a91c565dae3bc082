use serde::Serialize;

use super::one_dim::resolve_pickands;
use super::{psi_one_dim, AsymptoticValue, FormulaConstants, PaperFlags};
use crate::error::{Result, RuinError};
use crate::risk_model::{a_constant, NormalizedParams, Regime, RegimeTag};
use crate::special::{log_psi, psi, LN_SQRT_2PI};

fn company_psi(
    p: &NormalizedParams,
    company: usize,
    constants: &FormulaConstants,
    flags: PaperFlags,
) -> Result<AsymptoticValue> {
    let (a, c) = p.company(company);
    psi_one_dim(a, c, p.h, p.horizon, constants.pickands, flags)
}

fn reject_h1(p: &NormalizedParams, regime: &Regime) -> Result<()> {
    if p.h.is_one() {
        return Err(RuinError::UnsupportedRegime {
            regime: regime.tag.to_string(),
            reason: "H = 1 is exactly Gaussian; use pi_and_exact_h1".into(),
        });
    }
    Ok(())
}

/// Exact asymptotics of the simultaneous ruin probability as `N -> inf`.
pub fn pi_sim_asym(
    p: &NormalizedParams,
    regime: &Regime,
    constants: &FormulaConstants,
    flags: PaperFlags,
) -> Result<AsymptoticValue> {
    reject_h1(p, regime)?;
    let inner = |company| company_psi(p, company, constants, flags);
    let value = match regime.tag {
        RegimeTag::Degenerate | RegimeTag::BeyondHorizon => {
            return Err(RuinError::UnsupportedRegime {
                regime: regime.tag.to_string(),
                reason: "needs 0 < a1 < a2 and t* < T; for the one-company reduction use psi_one_dim".into(),
            })
        }
        RegimeTag::SimCaseI => {
            let v = inner(1)?;
            let form = format!("simultaneous/company1:{}", v.form);
            v.relabel(form)
        }
        RegimeTag::SimCaseII => {
            let v = inner(1)?;
            let form = format!("simultaneous/company1-half:{}", v.form);
            v.scaled(0.5, form)
        }
        RegimeTag::SimCaseIV => {
            let v = inner(2)?;
            let form = format!("simultaneous/company2-half:{}", v.form);
            v.scaled(0.5, form)
        }
        RegimeTag::SimCaseV => {
            let v = inner(2)?;
            let form = format!("simultaneous/company2:{}", v.form);
            v.relabel(form)
        }
        tag => {
            let t_star = regime.detail.t_star;
            let hv = p.h.value();
            // u(N) = (a1 + c1 t*) sqrt(N) / t*^H
            let u_scale = (p.a1 + p.c1 * t_star) / t_star.powf(hv);
            match tag {
                RegimeTag::InteriorLowH => {
                    let pk = resolve_pickands(p.h, constants.pickands)?;
                    let a1 = a_constant(p.a1, p.c1, t_star, p.h)?;
                    let a2 = a_constant(p.a2, p.c2, t_star, p.h)?;
                    let pre = (a1 + a2) / (2f64.powf(1.0 / (2.0 * hv)) * t_star * a1 * a2);
                    AsymptoticValue::gaussian_tail(
                        "simultaneous/crossing-low-h",
                        (pre * pk).ln(),
                        1.0 / hv - 2.0,
                        u_scale,
                    )
                }
                RegimeTag::InteriorHalf => {
                    let pit = match constants.piterbarg {
                        Some(v) if v > 0.0 && v.is_finite() => v,
                        Some(v) => {
                            return Err(RuinError::InvalidParameter(format!(
                                "Piterbarg constant must be positive, got {v}"
                            )))
                        }
                        None => {
                            return Err(RuinError::ConstantRequired {
                                which: "Piterbarg",
                                hint: "compute it with constants::piterbarg_for_crossing (CLI: `piterbarg`)",
                            })
                        }
                    };
                    AsymptoticValue::gaussian_tail("simultaneous/crossing-brownian", pit.ln(), 0.0, u_scale)
                }
                _ => AsymptoticValue::gaussian_tail("simultaneous/crossing-high-h", 0.0, 0.0, u_scale),
            }
        }
    };
    Ok(value)
}

/// Exact asymptotics of the joint ruin probability; available only when the
/// problem reduces to a single company.
pub fn pi_and_asym(
    p: &NormalizedParams,
    regime: &Regime,
    constants: &FormulaConstants,
    flags: PaperFlags,
) -> Result<AsymptoticValue> {
    reject_h1(p, regime)?;
    match regime.tag {
        RegimeTag::SimCaseI => {
            let v = company_psi(p, 1, constants, flags)?;
            let form = format!("joint/company1:{}", v.form);
            Ok(v.relabel(form))
        }
        RegimeTag::SimCaseV => {
            let v = company_psi(p, 2, constants, flags)?;
            let form = format!("joint/company2:{}", v.form);
            Ok(v.relabel(form))
        }
        RegimeTag::Degenerate | RegimeTag::BeyondHorizon => Err(RuinError::UnsupportedRegime {
            regime: regime.tag.to_string(),
            reason: "needs 0 < a1 < a2 and t* < T".into(),
        }),
        tag => Err(RuinError::OnlyLogRate(tag.to_string())),
    }
}

/// Joint ruin at H = 1, where `B_1(t) = t Z` and the probability is an exact
/// Gaussian tail `Psi(threshold sqrt(N))` for every `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H1Exact {
    pub threshold: f64,
    /// Which company's line sets the threshold (after normalization).
    pub company: usize,
}

impl H1Exact {
    pub fn probability(&self, n: f64) -> f64 {
        psi(self.threshold * n.sqrt())
    }

    pub fn log_probability(&self, n: f64) -> f64 {
        log_psi(self.threshold * n.sqrt())
    }

    /// Leading term `phi(x) / x`, `x = threshold sqrt(N)`.
    pub fn expansion(&self, n: f64) -> f64 {
        let x = self.threshold * n.sqrt();
        (-0.5 * x * x - x.ln() - LN_SQRT_2PI).exp()
    }

    pub fn as_asymptotic(&self) -> AsymptoticValue {
        AsymptoticValue::gaussian_tail(format!("joint/h1-exact:company{}", self.company), 0.0, 0.0, self.threshold)
    }
}

/// Joint ruin probability for H = 1.
///
/// Both companies are ruined iff `Z T > a_i + c_i T` for both `i`, so the
/// threshold is the larger of `(a_i + c_i T) / T`. With
/// `flags.printed_h1_branches` the company is instead picked by the sign of
/// `t* - T` as printed, which yields the smaller threshold.
pub fn pi_and_exact_h1(p: &NormalizedParams, flags: PaperFlags) -> Result<H1Exact> {
    if !p.h.is_one() {
        return Err(RuinError::Domain(format!("exact joint-ruin formula needs H = 1, got {}", p.h.value())));
    }
    let t = p.horizon;
    let k1 = (p.a1 + p.c1 * t) / t;
    let k2 = (p.a2 + p.c2 * t) / t;
    let t_star = (p.a2 - p.a1) / (p.c1 - p.c2);
    let company = if flags.printed_h1_branches {
        if t_star <= t { 2 } else { 1 }
    } else if k1 >= k2 {
        1
    } else {
        2
    };
    let threshold = if company == 1 { k1 } else { k2 };
    Ok(H1Exact { threshold, company })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::piterbarg_for_crossing;
    use crate::gaussian_paths::HurstIndex;
    use crate::risk_model::{classify, critical_points, peak_constants};

    fn np(a: (f64, f64), c: (f64, f64), h: f64, t: f64) -> NormalizedParams {
        NormalizedParams::new(a, c, h, t).unwrap()
    }

    const NONE: FormulaConstants = FormulaConstants { pickands: None, piterbarg: None };

    #[test]
    fn case_i_matches_company1() {
        let p = np((1.0, 2.0), (2.0, 1.0), 0.9, 3.0);
        let r = classify(&p);
        assert_eq!(r.tag, RegimeTag::SimCaseI);
        let v = pi_sim_asym(&p, &r, &NONE, PaperFlags::default()).unwrap();
        let one = psi_one_dim(1.0, 2.0, HurstIndex::new(0.9).unwrap(), 3.0, None, PaperFlags::default()).unwrap();
        assert_eq!((v.log_prefactor, v.n_power, v.rate), (one.log_prefactor, one.n_power, one.rate));
        let j = pi_and_asym(&p, &r, &NONE, PaperFlags::default()).unwrap();
        assert_eq!((j.log_prefactor, j.n_power, j.rate), (one.log_prefactor, one.n_power, one.rate));
    }

    #[test]
    fn interior_high_h_is_pure_tail() {
        let p = np((1.0, 3.0), (2.0, 1.0), 0.75, 3.0);
        let r = classify(&p);
        let v = pi_sim_asym(&p, &r, &NONE, PaperFlags::default()).unwrap();
        let u = 5.0 / 2f64.powf(0.75);
        assert!((u - 2.9730).abs() < 1e-4);
        for n in [1.0, 4.0, 25.0] {
            assert!((v.evaluate(n) / psi(u * n.sqrt()) - 1.0).abs() < 1e-12);
        }
        assert!((v.rate - u * u / 2.0).abs() < 1e-12);
    }

    #[test]
    fn interior_half_uses_piterbarg() {
        let p = np((1.0, 2.0), (2.0, 1.0), 0.5, 3.0);
        let r = classify(&p);
        let err = pi_sim_asym(&p, &r, &NONE, PaperFlags::default()).unwrap_err();
        assert!(matches!(err, RuinError::ConstantRequired { which: "Piterbarg", .. }));

        let k = peak_constants(&p, &critical_points(&p)).unwrap();
        let pit = piterbarg_for_crossing(r.detail.t_star, k.a1, k.a2).unwrap();
        assert!((pit.value - 6.4).abs() < 1e-12);
        let c = FormulaConstants { piterbarg: Some(pit.value), ..NONE };
        let v = pi_sim_asym(&p, &r, &c, PaperFlags::default()).unwrap();
        assert!((v.evaluate(2.0) / (6.4 * psi(3.0 * 2f64.sqrt())) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interior_low_h_prefactor() {
        let p = np((1.0, 1.5), (2.0, 1.0), 0.4, 3.0);
        let r = classify(&p);
        assert_eq!(r.tag, RegimeTag::InteriorLowH);
        assert!(pi_sim_asym(&p, &r, &NONE, PaperFlags::default()).is_err());
        let pk = 1.3;
        let c = FormulaConstants { pickands: Some(pk), ..NONE };
        let v = pi_sim_asym(&p, &r, &c, PaperFlags::default()).unwrap();
        let ts: f64 = 0.5;
        let a1 = ((1.0 + 2.0 * ts) * 0.4 - 2.0 * ts).abs() / ((1.0 + 2.0 * ts) * ts);
        let a2 = ((1.5 + ts) * 0.4 - ts).abs() / ((1.5 + ts) * ts);
        let u = (1.0 + 2.0 * ts) / ts.powf(0.4);
        let n: f64 = 3.0;
        let un = u * n.sqrt();
        let want = (a1 + a2) / (2f64.powf(1.25) * ts * a1 * a2) * pk * un.powf(0.5) * psi(un);
        assert!((v.evaluate(n) / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_cases_halve() {
        let p = np((1.0, 1.5), (2.0, 1.0), 0.5, 3.0);
        let r = classify(&p);
        assert_eq!(r.tag, RegimeTag::SimCaseII);
        let v = pi_sim_asym(&p, &r, &NONE, PaperFlags::default()).unwrap();
        let one = company_psi(&p, 1, &NONE, PaperFlags::default()).unwrap();
        assert!((v.evaluate(5.0) / one.evaluate(5.0) - 0.5).abs() < 1e-12);
        assert!(matches!(pi_and_asym(&p, &r, &NONE, PaperFlags::default()), Err(RuinError::OnlyLogRate(_))));
    }

    #[test]
    fn case_v_joint_example() {
        let p = np((1.0, 2.0), (1.25, 1.0), 0.5, 5.0);
        let r = classify(&p);
        let v = pi_and_asym(&p, &r, &NONE, PaperFlags::default()).unwrap();
        assert!((v.rate - 4.0).abs() < 1e-12);
        assert_eq!(v.form, "joint/company2:one-dim/peak-inside");
        let s = pi_sim_asym(&p, &r, &NONE, PaperFlags::default()).unwrap();
        assert_eq!(s.rate, v.rate);
    }

    #[test]
    fn joint_interior_only_log_rate() {
        let p = np((1.0, 2.0), (2.0, 1.0), 0.5, 3.0);
        let err = pi_and_asym(&p, &classify(&p), &NONE, PaperFlags::default()).unwrap_err();
        assert!(matches!(err, RuinError::OnlyLogRate(_)));
        let d = np((2.0, 1.0), (3.0, 1.0), 0.5, 3.0);
        assert!(matches!(
            pi_sim_asym(&d, &classify(&d), &NONE, PaperFlags::default()),
            Err(RuinError::UnsupportedRegime { .. })
        ));
    }

    #[test]
    fn h1_exact_uses_larger_threshold() {
        let p = np((1.0, 2.0), (2.0, 1.0), 1.0, 3.0);
        let e = pi_and_exact_h1(&p, PaperFlags::default()).unwrap();
        assert_eq!(e.company, 1);
        assert!((e.threshold - 7.0 / 3.0).abs() < 1e-15);
        assert!((e.probability(1.0) - 0.009_815_328_628_645).abs() < 1e-12);

        let e = pi_and_exact_h1(&p.with_horizon(0.5), PaperFlags::default()).unwrap();
        assert_eq!(e.company, 2);
        assert!((e.threshold - 5.0).abs() < 1e-15);
    }

    #[test]
    fn h1_printed_branches() {
        let flags = PaperFlags { printed_h1_branches: true, ..Default::default() };
        let p = np((1.0, 2.0), (2.0, 1.0), 1.0, 3.0);
        let e = pi_and_exact_h1(&p, flags).unwrap();
        assert!((e.probability(1.0) - 0.047_790_352_272_815).abs() < 1e-6);
        let e = pi_and_exact_h1(&p.with_horizon(0.5), flags).unwrap();
        assert!((e.probability(1.0) - 3.1671e-5).abs() < 1e-8);
    }

    #[test]
    fn h1_expansion_within_two_percent_at_50() {
        for flags in [PaperFlags::default(), PaperFlags { printed_h1_branches: true, ..Default::default() }] {
            let p = np((1.0, 2.0), (2.0, 1.0), 1.0, 3.0);
            let e = pi_and_exact_h1(&p, flags).unwrap();
            let r = e.expansion(50.0) / e.probability(50.0);
            assert!((r - 1.0).abs() < 0.02, "{r}");
        }
        assert!(pi_and_exact_h1(&np((1.0, 2.0), (2.0, 1.0), 0.5, 3.0), PaperFlags::default()).is_err());
    }
}
