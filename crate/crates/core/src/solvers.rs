//! Scalar bracketing solvers: bisection and golden-section search.

/// Bisection on `[lo, hi]` for a function with `f(lo) <= 0 <= f(hi)`.
///
/// Halves the bracket until it is no wider than `tol`, or until no
/// representable midpoint remains (`tol = 0.0` bisects to full f64
/// resolution). Returns the final `(lo, hi)` bracket.
pub fn bisect_bracket(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    loop {
        if hi - lo <= tol {
            return (lo, hi);
        }
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return (lo, hi);
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Shrinks the bracket until it is no wider than `tol` and returns it.
/// `f` may return `-inf` near the edges; comparisons still order correctly.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8; // (sqrt(5) - 1) / 2

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    while b - a > tol {
        if f1 >= f2 {
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
        if !(a < x1 && x1 < x2 && x2 < b) {
            // bracket no longer resolves in f64
            break;
        }
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let (lo, hi) = bisect_bracket(|x| x * x - 2.0, 0.0, 2.0, 1e-14);
        let root = 0.5 * (lo + hi);
        assert!((root - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn bisect_exhausts_to_adjacent_floats() {
        let (lo, hi) = bisect_bracket(|x| x - std::f64::consts::FRAC_1_PI, 0.0, 1.0, 0.0);
        assert!(lo < hi);
        assert_eq!(lo.next_up(), hi, "bracket should be one ulp wide");
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let f = |x: f64| -(x - 0.3) * (x - 0.3);
        let (a, b) = golden_section_max(f, 0.0, 1.0, 1e-10);
        let x = 0.5 * (a + b);
        assert!((x - 0.3).abs() < 1e-7, "peak estimate {x}");
    }
}
