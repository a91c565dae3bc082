//! Standard normal tail function in linear and log space.

use std::f64::consts::{PI, SQRT_2};

/// Arguments above this use the asymptotic series for `log_psi`.
const SERIES_THRESHOLD: f64 = 8.0;

/// ln(sqrt(2*pi))
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal tail `P(Z > x)`.
pub fn psi(x: f64) -> f64 {
    if x > SERIES_THRESHOLD {
        log_psi(x).exp()
    } else {
        0.5 * libm::erfc(x / SQRT_2)
    }
}

/// Natural log of `P(Z > x)`, accurate far into the tail.
pub fn log_psi(x: f64) -> f64 {
    if x <= SERIES_THRESHOLD {
        return (0.5 * libm::erfc(x / SQRT_2)).ln();
    }
    -0.5 * x * x - x.ln() - LN_SQRT_2PI + mills_series(x).ln()
}

// 1 - 1/x^2 + 3/x^4 - 15/x^6 + ..., summed up to the smallest term.
fn mills_series(x: f64) -> f64 {
    let inv2 = 1.0 / (x * x);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 1.0;
    loop {
        let next = -term * (2.0 * k - 1.0) * inv2;
        if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    sum
}

/// `ln(sum(exp(xs)))` without overflow. Returns `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}
