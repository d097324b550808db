//! One-dimensional maximization on a bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[lo, hi]`, stopping once the
/// bracket is narrower than `tol`. Returns the best `(x, f(x))` seen, so the
/// result never falls below the endpoint values.
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = f(a);
    let fb = f(b);
    let mut best = if fa >= fb { (a, fa) } else { (b, fb) };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let tol = tol.max(f64::EPSILON * b.abs().max(1.0));
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
        for (x, fx) in [(x1, f1), (x2, f2)] {
            if fx > best.1 {
                best = (x, fx);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3).powi(2) + 2.0, -1.0, 2.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((fx - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sine_peak() {
        let (x, _) = golden_section_max(f64::sin, 1.0, 2.5, 1e-10);
        assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    }

    #[test]
    fn monotone_returns_endpoint() {
        let (x, fx) = golden_section_max(|x| x, 0.0, 1.0, 1e-8);
        assert_eq!((x, fx), (1.0, 1.0));
        let (x, _) = golden_section_max(|x| -x, 1.0, 0.0, 1e-8);
        assert_eq!(x, 0.0);
    }
}
