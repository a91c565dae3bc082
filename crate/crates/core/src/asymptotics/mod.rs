//! Closed-form ruin asymptotics, carried in log space.
//!
//! Every formula has the shape `C * N^p * exp(-rho N) (1 + o(1))`; an
//! [`AsymptoticValue`] stores `(ln C, p, rho)`. Formulas whose leading term is a
//! Gaussian tail `Psi(u)` additionally keep the exact tail so that
//! [`AsymptoticValue::evaluate`] is accurate at moderate `N`.

mod log_rate;
mod one_dim;
mod two_dim;

pub use log_rate::{log_rate_and, log_rate_objective, LogRateOptions, LogRateResult};
pub use one_dim::{psi_one_dim, OneDimCase};
pub use two_dim::{pi_and_asym, pi_and_exact_h1, pi_sim_asym, H1Exact};

use serde::Serialize;

use crate::special::log_psi;

/// Switches that reproduce the formulas exactly as printed in the source
/// rather than the corrected variants used by default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PaperFlags {
    /// Keep the (negative) sign of `cT - H(a + cT)` in the short-horizon,
    /// H < 1/2 one-dimensional prefactor.
    pub strict_sign: bool,
    /// Use `T^H / (a + cT)` instead of `T^{2H} / (a + cT)` in the
    /// short-horizon, H > 1/2 one-dimensional prefactor (the pure Gaussian tail).
    pub psi_form: bool,
    /// Use the printed company labels of the H = 1 joint-ruin formula, which
    /// select the smaller threshold instead of the larger one.
    pub printed_h1_branches: bool,
}

/// Constants appearing in prefactors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FormulaConstants {
    /// Pickands constant `H_{2H}`. Optional at H = 1/2, where it equals 1.
    pub pickands: Option<f64>,
    /// Piterbarg-type constant for the H = 1/2 crossing case.
    pub piterbarg: Option<f64>,
}

/// Exact Gaussian-tail representation `exp(log_coefficient) u^{u_power} Psi(u)`
/// with `u = u_scale sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianTail {
    pub log_coefficient: f64,
    pub u_power: f64,
    pub u_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticValue {
    pub form: String,
    pub log_prefactor: f64,
    pub n_power: f64,
    pub rate: f64,
    /// `-1` only when a strict-sign formula has a negative prefactor.
    pub sign: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<GaussianTail>,
}

impl AsymptoticValue {
    pub(crate) fn leading(form: impl Into<String>, log_prefactor: f64, n_power: f64, rate: f64) -> Self {
        Self { form: form.into(), log_prefactor, n_power, rate, sign: 1.0, tail: None }
    }

    /// `coefficient * u^{u_power} * Psi(u)`, `u = u_scale sqrt(N)`, with the
    /// leading triple from `Psi(u) ~ phi(u) / u`.
    pub(crate) fn gaussian_tail(form: impl Into<String>, log_coefficient: f64, u_power: f64, u_scale: f64) -> Self {
        let ln_u = u_scale.ln();
        Self {
            form: form.into(),
            log_prefactor: log_coefficient + (u_power - 1.0) * ln_u - crate::special::LN_SQRT_2PI,
            n_power: 0.5 * (u_power - 1.0),
            rate: 0.5 * u_scale * u_scale,
            sign: 1.0,
            tail: Some(GaussianTail { log_coefficient, u_power, u_scale }),
        }
    }

    /// Multiply by a positive constant.
    pub(crate) fn scaled(mut self, factor: f64, form: impl Into<String>) -> Self {
        let ln = factor.ln();
        self.log_prefactor += ln;
        if let Some(t) = self.tail.as_mut() {
            t.log_coefficient += ln;
        }
        self.form = form.into();
        self
    }

    pub(crate) fn relabel(mut self, form: impl Into<String>) -> Self {
        self.form = form.into();
        self
    }

    /// `ln |value(N)|`.
    pub fn log_evaluate(&self, n: f64) -> f64 {
        match self.tail {
            Some(t) => {
                let u = t.u_scale * n.sqrt();
                t.log_coefficient + t.u_power * u.ln() + log_psi(u)
            }
            None => self.log_prefactor + self.n_power * n.ln() - self.rate * n,
        }
    }

    pub fn evaluate(&self, n: f64) -> f64 {
        self.sign * self.log_evaluate(n).exp()
    }

    /// Leading-order value, ignoring the exact tail.
    pub fn evaluate_leading(&self, n: f64) -> f64 {
        self.sign * (self.log_prefactor + self.n_power * n.ln() - self.rate * n).exp()
    }
}
