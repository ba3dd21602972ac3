//! Bracketed scalar root solvers.
//!
//! Brent's method (bisection + secant + inverse quadratic interpolation,
//! Numerical Recipes layout) for smooth problems, plus a plain bisection and
//! a grid-scan bracketing helper.

use crate::error::{Error, Result};

/// Brent's method on a bracketing interval `[a, b]` with `f(a)·f(b) <= 0`.
///
/// `xtol` is an absolute tolerance on the root location. Convergence is
/// guaranteed for continuous `f`.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    x1: f64,
    x2: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64> {
    let (mut a, mut b) = (x1, x2);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot(format!(
            "f({a:e}) = {fa:e} and f({b:e}) = {fb:e} have the same sign"
        )));
    }
    let mut c = b;
    let mut fc = fb;
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..max_iter {
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
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Secant / inverse quadratic step.
            let s = fb / fa;
            let (mut p, mut q);
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
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b);
    }
    Ok(b)
}

/// Plain bisection; used where f is cheap and monotonicity is uncertain.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    x1: f64,
    x2: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = f(x1);
    let fb = f(x2);
    if fa == 0.0 {
        return Ok(x1);
    }
    if fb == 0.0 {
        return Ok(x2);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot(format!(
            "no sign change on [{x1:e}, {x2:e}]"
        )));
    }
    let (mut a, mut b) = (x1, x2);
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < xtol {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Scan `[lo, hi]` on `n` uniform cells and return the first cell where f
/// changes sign.
pub fn first_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    n: usize,
) -> Option<(f64, f64)> {
    let step = (hi - lo) / n as f64;
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..=n {
        let x = lo + step * i as f64;
        let fx = f(x);
        if f_prev == 0.0 {
            return Some((x_prev, x_prev));
        }
        if f_prev.signum() != fx.signum() {
            return Some((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    None
}
