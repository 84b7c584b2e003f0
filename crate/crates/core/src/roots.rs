//! Bracketed bisection.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    /// Stop once the bracket is narrower than this.
    pub abs_tol: f64,
    /// Also require a bracket narrower than `rel_tol·|x|`, so tiny roots keep
    /// their significant digits.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection { abs_tol: 1e-12, rel_tol: 1e-13, max_iter: 200 }
    }
}

impl Bisection {
    /// Root of `f` in `[lo, hi]`; the endpoints must have opposite signs.
    pub fn solve<F>(&self, mut f: F, lo: f64, hi: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let (mut lo, mut hi) = (lo, hi);
        let mut f_lo = f(lo)?;
        let f_hi = f(hi)?;
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_lo.signum() == f_hi.signum() {
            return Err(Error::NoSignChange { lo, hi });
        }
        for _ in 0..self.max_iter {
            let mid = 0.5 * (lo + hi);
            let width = hi - lo;
            if width <= self.abs_tol && width <= self.rel_tol * mid.abs() {
                return Ok(mid);
            }
            if mid <= lo || mid >= hi {
                // bracket is down to adjacent floats
                return Ok(mid);
            }
            let f_mid = f(mid)?;
            if f_mid == 0.0 {
                return Ok(mid);
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// First sign change of `f` on a geometric grid from `lo` to `hi` (both > 0).
pub fn first_bracket<F>(mut f: F, lo: f64, hi: f64, points: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let ratio = (hi / lo).powf(1.0 / (points.max(2) - 1) as f64);
    let mut x_prev = lo;
    let mut f_prev = f(lo)?;
    for j in 1..points.max(2) {
        let x = if j == points.max(2) - 1 { hi } else { lo * ratio.powi(j as i32) };
        let fx = f(x)?;
        if fx == 0.0 || fx.signum() != f_prev.signum() {
            return Ok((x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    Err(Error::NoSignChange { lo, hi })
}
