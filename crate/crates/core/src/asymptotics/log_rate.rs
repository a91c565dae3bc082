use rayon::prelude::*;
use serde::Serialize;

use crate::optimize::pattern_search_2d;
use crate::risk_model::NormalizedParams;

/// Result of the variational problem for the joint-ruin decay rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogRateResult {
    /// `-lim ln(pi_and(N)) / N`, half the infimum of the objective.
    pub rate: f64,
    pub argmin_s: f64,
    pub argmin_t: f64,
    pub objective_at_argmin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRateOptions {
    /// Points per axis of the coarse scan.
    pub grid: usize,
    /// Margin excluded at zero, as a fraction of the horizon.
    pub margin: f64,
    /// Relative tolerance of the local refinement.
    pub rel_tol: f64,
}

impl Default for LogRateOptions {
    fn default() -> Self {
        Self { grid: 200, margin: 1e-4, rel_tol: 1e-8 }
    }
}

#[inline]
fn std_dev(t: f64, a: f64, c: f64, h: f64) -> f64 {
    t.powf(h) / (a + c * t)
}

/// `1/max(s1^2, s2^2) * (1 + (c - r)^2 / (1 - r^2) 1{r < c})` with
/// `s_i` the standard deviation of `B_H(t) / (a_i + c_i t)`, `r` the
/// correlation of `B_H(s)` and `B_H(t)` and `c = max(s2/s1, s1/s2)`.
///
/// Where `r = 1` (on the diagonal, or everywhere when H = 1) the value is
/// `1/max(s1^2, s2^2)` if the deviations coincide and `+inf` otherwise.
/// Nonpositive times give `+inf`.
pub fn log_rate_objective(s: f64, t: f64, p: &NormalizedParams) -> f64 {
    if !(s > 0.0 && t > 0.0) {
        return f64::INFINITY;
    }
    let h = p.h.value();
    let s1 = std_dev(s, p.a1, p.c1, h);
    let s2 = std_dev(t, p.a2, p.c2, h);
    let base = 1.0 / s1.max(s2).powi(2);
    let c = (s2 / s1).max(s1 / s2);
    let two_h = 2.0 * h;
    let r = (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h)) / (2.0 * s.powf(h) * t.powf(h));
    let one_minus_r2 = 1.0 - r * r;
    if one_minus_r2 <= 1e-14 {
        return if c <= 1.0 + 1e-12 { base } else { f64::INFINITY };
    }
    if r < c {
        base * (1.0 + (c - r).powi(2) / one_minus_r2)
    } else {
        base
    }
}

/// Minimize [`log_rate_objective`] over `(0, T]^2`: a coarse scan followed by
/// golden-section pattern search from the best cells.
///
/// At H = 1 the objective is finite only on the curve where the two
/// deviations agree, and its infimum is `max_i ((a_i + c_i T)/T)^2`; that
/// value is returned directly.
pub fn log_rate_and(p: &NormalizedParams, opts: LogRateOptions) -> LogRateResult {
    let horizon = p.horizon;
    if p.h.is_one() {
        let v1 = horizon / (p.a1 + p.c1 * horizon);
        let v2 = horizon / (p.a2 + p.c2 * horizon);
        // t/(a + c t) = v  <=>  t = v a / (1 - v c)
        let (s, t) = if v1 <= v2 {
            (horizon, v1 * p.a2 / (1.0 - v1 * p.c2))
        } else {
            (v2 * p.a1 / (1.0 - v2 * p.c1), horizon)
        };
        let obj = 1.0 / v1.min(v2).powi(2);
        return LogRateResult { rate: 0.5 * obj, argmin_s: s, argmin_t: t, objective_at_argmin: obj };
    }

    let n = opts.grid.max(2);
    let lo = horizon * opts.margin;
    let step = (horizon - lo) / (n - 1) as f64;
    let point = |i: usize| if i + 1 == n { horizon } else { lo + i as f64 * step };

    let mut cells: Vec<(f64, usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let s = point(i);
            (0..n).map(move |j| (log_rate_objective(s, point(j), p), i, j))
        })
        .collect();
    cells.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let f = |s: f64, t: f64| log_rate_objective(s, t, p);
    let mut best = LogRateResult {
        rate: 0.5 * cells[0].0,
        argmin_s: point(cells[0].1),
        argmin_t: point(cells[0].2),
        objective_at_argmin: cells[0].0,
    };
    for &(v, i, j) in cells.iter().take(4) {
        if !v.is_finite() {
            break;
        }
        let ((s, t), fx) = pattern_search_2d(f, (point(i), point(j)), 2.0 * step, lo, horizon, opts.rel_tol);
        if fx < best.objective_at_argmin {
            best = LogRateResult { rate: 0.5 * fx, argmin_s: s, argmin_t: t, objective_at_argmin: fx };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{psi_one_dim, PaperFlags};
    use crate::risk_model::{m_constant, NormalizedParams};

    fn np(a: (f64, f64), c: (f64, f64), h: f64, t: f64) -> NormalizedParams {
        NormalizedParams::new(a, c, h, t).unwrap()
    }

    #[test]
    fn objective_examples() {
        let p = np((1.0, 2.0), (1.25, 1.0), 0.5, 5.0);
        assert_eq!(log_rate_objective(2.0, 2.0, &p), f64::INFINITY);
        assert_eq!(log_rate_objective(0.0, 2.0, &p), f64::INFINITY);
        assert_eq!(log_rate_objective(-1.0, 2.0, &p), f64::INFINITY);

        // sigma1 = 0.4260, sigma2 = 0.35355, r = 0.8660, c = 1.2049
        let s1 = 1.5f64.sqrt() / 2.875;
        let s2 = 2f64.sqrt() / 4.0;
        let r = 3.0 / (2.0 * 3f64.sqrt());
        let c = s1 / s2;
        let want = (1.0 + (c - r).powi(2) / (1.0 - r * r)) / (s1 * s1);
        let got = log_rate_objective(1.5, 2.0, &p);
        assert!((got - want).abs() < 1e-12);
        assert!((got - 8.04).abs() < 5e-3, "{got}");

        // crossing point t* = 4: equal deviations on the diagonal
        let v = log_rate_objective(4.0, 4.0, &p);
        let sd = 2.0 / 6.0;
        assert!((v - 1.0 / (sd * sd)).abs() < 1e-9);
    }

    #[test]
    fn case_v_rate_matches_company2() {
        let p = np((1.0, 2.0), (1.25, 1.0), 0.5, 5.0);
        let r = log_rate_and(&p, LogRateOptions::default());
        let m = m_constant(2.0, 1.0, p.h);
        assert!((r.rate - 0.5 * m * m).abs() < 1e-3, "{r:?}");
        assert!((r.rate - 4.0).abs() < 1e-3);
        assert!((r.objective_at_argmin - 2.0 * r.rate).abs() < 1e-15);
    }

    #[test]
    fn case_i_rate_matches_company1_one_dim() {
        // t1 = 4.5 > T = 3, so company 1's one-dimensional rate comes from
        // the horizon, not from m.
        let p = np((1.0, 2.0), (2.0, 1.0), 0.9, 3.0);
        let r = log_rate_and(&p, LogRateOptions::default());
        let one = psi_one_dim(1.0, 2.0, p.h, 3.0, None, PaperFlags::default()).unwrap();
        assert!((r.rate - one.rate).abs() < 1e-3, "{} vs {}", r.rate, one.rate);
    }

    #[test]
    fn h1_rate_closed_form() {
        let p = np((1.0, 2.0), (2.0, 1.0), 1.0, 3.0);
        let r = log_rate_and(&p, LogRateOptions::default());
        assert!((r.rate - 49.0 / 18.0).abs() < 1e-12);
        let v1 = r.argmin_s / (1.0 + 2.0 * r.argmin_s);
        let v2 = r.argmin_t / (2.0 + r.argmin_t);
        assert!((v1 - v2).abs() < 1e-12);
    }

    #[test]
    fn rate_bounded_by_probe_grid() {
        for p in [
            np((1.0, 2.0), (2.0, 1.0), 0.5, 3.0),
            np((1.0, 3.0), (2.0, 1.0), 0.75, 3.0),
            np((1.0, 1.5), (2.0, 1.0), 0.3, 2.0),
        ] {
            let r = log_rate_and(&p, LogRateOptions::default());
            let mut probe = f64::INFINITY;
            for i in 1..=37 {
                for j in 1..=37 {
                    let (s, t) = (i as f64 * p.horizon / 37.0, j as f64 * p.horizon / 37.0);
                    probe = probe.min(log_rate_objective(s, t, &p));
                }
            }
            assert!(r.rate <= 0.5 * probe + 1e-12);
            assert!(r.rate > 0.0 && r.rate.is_finite());
        }
    }
}
