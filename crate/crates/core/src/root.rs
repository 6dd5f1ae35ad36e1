//! Scalar root finding: bracket scanning plus Brent refinement.

use crate::error::{Error, Result};

/// Brent's method on a bracketing interval `[a, b]` with `f(a)·f(b) ≤ 0`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::NoRoot(format!(
            "interval [{a}, {b}] does not bracket a sign change"
        )));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..max_iter {
        if fb == 0.0 || (b - a).abs() < tol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let cond = !((lo.min(b)..=lo.max(b)).contains(&s))
            || (mflag && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!mflag && (s - b).abs() >= (c - d).abs() / 2.0)
            || (mflag && (b - c).abs() < tol)
            || (!mflag && (c - d).abs() < tol);
        if cond {
            s = (a + b) / 2.0;
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

/// Scans `[lo, hi]` on `cells` equal subintervals and returns every subinterval
/// whose endpoints have opposite (or zero) signs. Cells where `f` is not finite
/// are skipped.
pub fn scan_brackets<F: FnMut(f64) -> Option<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    cells: usize,
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let step = (hi - lo) / cells as f64;
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..=cells {
        let x = lo + step * i as f64;
        let fx = f(x);
        if let (Some(a), Some(b)) = (f_prev, fx) {
            if a == 0.0 || a * b < 0.0 {
                out.push((x_prev, x));
            } else if i == cells && b == 0.0 {
                out.push((x_prev, x));
            }
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}
