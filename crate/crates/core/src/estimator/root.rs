//! Scalar root finding: a coarse bracket scan followed by Brent refinement.

/// A root candidate located by the scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Bracket {
    /// The function was exactly zero at a grid point.
    Exact(f64),
    /// Sign change between the two abscissae (function values attached).
    Sign(f64, f64, f64, f64),
}

/// Walks `[lo, hi]` in increments of `step`, recording every exact zero and
/// every sign change. The final grid point is clamped to `hi` so the end of
/// the interval is always examined.
pub(crate) fn scan_sign_changes<F: FnMut(f64) -> f64>(
    f: &mut F,
    lo: f64,
    hi: f64,
    step: f64,
) -> Vec<Bracket> {
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    if f0 == 0.0 {
        out.push(Bracket::Exact(x0));
    }
    while x0 < hi {
        let x1 = (x0 + step).min(hi);
        let f1 = f(x1);
        if f1 == 0.0 {
            out.push(Bracket::Exact(x1));
        } else if f0 != 0.0 && (f0 > 0.0) != (f1 > 0.0) {
            out.push(Bracket::Sign(x0, x1, f0, f1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Brent's method on a bracketing interval: combines bisection, secant and
/// inverse quadratic steps; never leaves the bracket. `f1` and `f2` are the
/// already-computed values at `x1` and `x2`, which must differ in sign.
pub(crate) fn brent_root<F: FnMut(f64) -> f64>(
    mut f: F,
    x1: f64,
    x2: f64,
    f1: f64,
    f2: f64,
    xtol: f64,
    max_iter: usize,
) -> f64 {
    let (mut a, mut b, mut c) = (x1, x2, x2);
    let (mut fa, mut fb, mut fc) = (f1, f2, f2);
    let (mut d, mut e) = (0.0_f64, 0.0_f64);
    for _ in 0..max_iter {
        if (fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return b;
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Interpolation step (secant if two points, inverse quadratic
            // if three), accepted only when it stays well inside the bracket.
            let s = fb / fa;
            let mut p;
            let mut q;
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.abs().copysign(xm);
        }
        fb = f(b);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let f = |x: f64| x * x * x - 2.0 * x - 5.0;
        let brackets = scan_sign_changes(&mut { f }, -4.0, 4.0, 0.25);
        assert_eq!(brackets.len(), 1);
        let Bracket::Sign(a, b, fa, fb) = brackets[0] else {
            panic!("expected a sign bracket");
        };
        let root = brent_root(f, a, b, fa, fb, 1e-12, 100);
        // Known root of x³ - 2x - 5.
        assert!((root - 2.094551481542327).abs() < 1e-10);
    }

    #[test]
    fn scan_reports_exact_grid_zeros() {
        let f = |x: f64| x * (x - 1.0);
        let brackets = scan_sign_changes(&mut { f }, -2.0, 2.0, 0.25);
        assert!(brackets.contains(&Bracket::Exact(0.0)));
        assert!(brackets.contains(&Bracket::Exact(1.0)));
    }

    #[test]
    fn scan_finds_multiple_roots_of_oscillator() {
        let f = |x: f64| (x * 3.0).sin();
        let mut g = f;
        let brackets = scan_sign_changes(&mut g, 0.1, 3.0, 0.1);
        // sin(3x) = 0 at x = π/3 ≈ 1.047 and 2π/3 ≈ 2.094 inside (0.1, 3).
        assert_eq!(brackets.len(), 2);
        for br in brackets {
            let Bracket::Sign(a, b, fa, fb) = br else {
                panic!("expected sign bracket")
            };
            let root = brent_root(f, a, b, fa, fb, 1e-12, 100);
            let k = (root * 3.0 / std::f64::consts::PI).round();
            assert!((root - k * std::f64::consts::PI / 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn brent_handles_steep_and_flat_mix() {
        let f = |x: f64| (x - 0.3).tanh() * 1e6 + x * 1e-3;
        let root = brent_root(f, -1.0, 1.0, f(-1.0), f(1.0), 1e-13, 200);
        assert!(f(root).abs() < 1e-3);
    }
}
