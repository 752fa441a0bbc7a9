use crate::error::{Error, Result};

/// Root of `f` on `[lo, hi]` given a sign change: bisection down to a narrow
/// bracket, then Newton steps with a secant derivative, kept inside the bracket.
/// Stops once the bracket or the last step is below `tol`.
pub fn find_root_bracketed<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Bracketing { lo: a, hi: b, f_lo: fa, f_hi: fb });
    }

    let narrow = (b - a) * 1e-3;
    while b - a > narrow.max(tol) {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    if b - a <= tol {
        return Ok(if fa.abs() < fb.abs() { a } else { b });
    }

    // Newton polish; the derivative is the secant through the last two iterates.
    let (mut x_prev, mut f_prev) = (a, fa);
    let (mut x, mut fx) = (b, fb);
    for _ in 0..100 {
        let slope = (fx - f_prev) / (x - x_prev);
        let mut next = x - fx / slope;
        if !next.is_finite() || next <= a || next >= b {
            next = 0.5 * (a + b);
        }
        let fn_ = f(next)?;
        if fn_ == 0.0 {
            return Ok(next);
        }
        if fn_.signum() == fa.signum() {
            a = next;
            fa = fn_;
        } else {
            b = next;
        }
        let step = (next - x).abs();
        x_prev = x;
        f_prev = fx;
        x = next;
        fx = fn_;
        if step <= tol || b - a <= tol {
            return Ok(x);
        }
    }
    Ok(x)
}
