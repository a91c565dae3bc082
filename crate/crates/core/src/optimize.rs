//! Derivative-free minimization: golden-section line search and grid scans.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimize `f` on `[lo, hi]` by golden-section search until the bracket is
/// narrower than `rel_tol * max(1, |x|)`. Returns `(x, f(x))`.
///
/// Tolerates `+inf` values; the search simply moves away from them.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a) <= rel_tol * 1f64.max(0.5 * (a + b).abs()) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    // endpoints are never probed by the interior points; compare them too
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Pattern search in two dimensions: repeated golden-section line searches
/// along the axes and both diagonals, inside the box `[lo, hi]^2` and a
/// neighbourhood of half-width `radius` around the start.
pub fn pattern_search_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    start: (f64, f64),
    radius: f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> ((f64, f64), f64) {
    let clamp = |v: f64| v.clamp(lo, hi);
    let dirs = [
        (1.0, 0.0),
        (0.0, 1.0),
        (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
        (std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
    ];
    let mut x = start;
    let mut fx = f(x.0, x.1);
    for _ in 0..500 {
        let (prev_x, prev_f) = (x, fx);
        for &(dx, dy) in &dirs {
            // step range keeping the point inside the box and the neighbourhood
            let lim = |p: f64, d: f64, c: f64| -> (f64, f64) {
                if d == 0.0 {
                    return (f64::NEG_INFINITY, f64::INFINITY);
                }
                let lo_p = lo.max(c - radius);
                let hi_p = hi.min(c + radius);
                let (u, v) = ((lo_p - p) / d, (hi_p - p) / d);
                (u.min(v), u.max(v))
            };
            let (a0, b0) = lim(x.0, dx, start.0);
            let (a1, b1) = lim(x.1, dy, start.1);
            let (a, b) = (a0.max(a1), b0.min(b1));
            if !(b > a) {
                continue;
            }
            let line = |s: f64| f(clamp(x.0 + s * dx), clamp(x.1 + s * dy));
            let (s, fs) = golden_section(line, a, b, rel_tol * 1e-2);
            if fs < fx {
                x = (clamp(x.0 + s * dx), clamp(x.1 + s * dy));
                fx = fs;
            }
        }
        let moved = (x.0 - prev_x.0).abs().max((x.1 - prev_x.1).abs());
        if moved <= rel_tol * 1f64.max(x.0.abs().max(x.1.abs())) && prev_f - fx <= 1e-15 * fx.abs() {
            break;
        }
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-14);
    }

    #[test]
    fn golden_handles_boundary_minimum_and_infinities() {
        let (x, _) = golden_section(|x| x, 0.0, 1.0, 1e-10);
        assert_eq!(x, 0.0);
        let (x, _) = golden_section(|x| if x < 0.5 { f64::INFINITY } else { x }, 0.0, 1.0, 1e-10);
        assert!((x - 0.5).abs() < 1e-8);
    }

    #[test]
    fn pattern_search_on_rotated_valley() {
        let f = |x: f64, y: f64| (x + y - 2.0).powi(2) + 10.0 * (x - y).powi(2) + (x - y).abs();
        let ((x, y), fx) = pattern_search_2d(f, (0.7, 1.4), 1.0, 0.0, 3.0, 1e-10);
        assert!((x - 1.0).abs() < 1e-6 && (y - 1.0).abs() < 1e-6, "{x} {y}");
        assert!(fx < 1e-10);
    }
}
