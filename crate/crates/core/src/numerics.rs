//! Small scalar numerics shared by the quadrature and classification code:
//! Brent root polishing, golden-section minimisation and grid helpers.

use crate::error::{Error, Result};

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 - sqrt 5) / 2

/// Outcome of a bracketed root search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Stops when the bracket has shrunk to a few ulps of the root or
/// `|f| <= ftol`. Bisection is used whenever the interpolation step
/// would leave the bracket or fails to halve it fast enough.
pub fn brent<F>(f: F, mut a: f64, mut b: f64, ftol: f64, max_iter: usize) -> Result<Root>
where
    F: Fn(f64) -> f64,
{
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, iterations: 0 });
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::RootFinding(format!(
            "no sign change on [{a}, {b}] (f = {fa}, {fb})"
        )));
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=max_iter {
        if fb.signum() == fc.signum() {
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

        let tol = 2.0 * f64::EPSILON * b.abs() + f64::MIN_POSITIVE;
        let half = 0.5 * (c - b);
        if half.abs() <= tol || fb.abs() <= ftol {
            return Ok(Root { x: b, fx: fb, iterations: iter });
        }

        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(half) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::RootFinding(format!("f is NaN at {b}")));
        }
    }
    Err(Error::RootFinding(format!("Brent did not converge in {max_iter} iterations")))
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
/// Returns `(x, f(x))` at the best point seen.
pub fn golden_min<F>(f: F, mut a: f64, mut b: f64, max_iter: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = a + GOLDEN * (b - a);
    let mut x2 = b - GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (x1.abs() + x2.abs()) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `n` points spaced uniformly on `[lo, hi]`, endpoints included.
pub fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| lo + step * i as f64).collect()
        }
    }
}

/// `n` points spaced geometrically on `[lo, hi]`; both bounds must share a sign.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo * hi > 0.0, "log-spaced grid needs same-sign bounds");
    let sign = lo.signum();
    let (l, h) = (lo.abs().ln(), hi.abs().ln());
    uniform(l, h, n).into_iter().map(|t| sign * t.exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_sqrt2() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 0.0, 100).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.iterations < 20);
    }

    #[test]
    fn brent_rejects_same_sign() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 0.0, 50).is_err());
    }

    #[test]
    fn brent_handles_steep_function() {
        // 1/x - 3 near x = 1/3 has a large slope on the left of the bracket
        let r = brent(|x| 1.0 / x - 3.0, 1e-6, 10.0, 0.0, 200).unwrap();
        assert!((r.x - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, fx) = golden_min(|x| (x - 1.25) * (x - 1.25) + 3.0, -4.0, 9.0, 200);
        assert!((x - 1.25).abs() < 1e-7);
        assert!((fx - 3.0).abs() < 1e-14);
    }

    #[test]
    fn grids_hit_their_endpoints() {
        let g = log_spaced(0.1, 20.0, 100);
        assert_eq!(g.len(), 100);
        assert!((g[0] - 0.1).abs() < 1e-15);
        assert!((g[99] - 20.0).abs() < 1e-12);
        let m = log_spaced(-20.0, -0.1, 5);
        assert!(m.iter().all(|&x| x < 0.0));
        let u = uniform(-1.0, 1.0, 5);
        assert_eq!(u, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
