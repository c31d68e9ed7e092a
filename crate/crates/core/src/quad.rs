//! Small numerical kernels: composite and adaptive Simpson, golden-section
//! search and bracketed bisection.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub trait Scalar:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Composite Simpson rule with `n` intervals (rounded up to even).
pub fn simpson<T: Scalar>(f: impl Fn(f64) -> T, a: f64, b: f64, n: usize) -> T {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut odd = T::default();
    let mut even = T::default();
    for k in 1..n {
        let v = f(a + k as f64 * h);
        if k % 2 == 1 {
            odd = odd + v;
        } else {
            even = even + v;
        }
    }
    (f(a) + f(b) + odd * 4.0 + even * 2.0) * (h / 3.0)
}

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
/// Recursion order is fixed, so the result is deterministic.
pub fn adaptive_simpson<T: Scalar>(
    f: &impl Fn(f64) -> T,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> T {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<T: Scalar>(
    f: &impl Fn(f64) -> T,
    a: f64,
    b: f64,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: f64,
    depth: u32,
) -> T {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
    let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
    let diff = left + right - whole;
    if depth == 0 || diff.magnitude() <= 15.0 * tol {
        return left + right + diff * (1.0 / 15.0);
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson over `panels` equal sub-intervals, each with a share of `tol`.
/// The base partition keeps narrow features from slipping between the first samples.
pub fn adaptive_simpson_panels<T: Scalar>(
    f: &impl Fn(f64) -> T,
    a: f64,
    b: f64,
    panels: usize,
    tol: f64,
    max_depth: u32,
) -> T {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let share = tol / panels as f64;
    let mut acc = T::default();
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == panels { b } else { lo + h };
        acc = acc + adaptive_simpson(f, lo, hi, share, max_depth);
    }
    acc
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // Keep the best evaluated point.
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |best, p| if p.1 > best.1 { p } else { best })
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.signum() != fb.signum()) || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::SolverFailure(format!(
            "no sign change on [{lo}, {hi}]: f = ({fa}, {fb})"
        )));
    }
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
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

/// Bisection on a boolean predicate that is false at `lo` and true at `hi`.
/// Returns the final bracket.
pub fn bisect_predicate(
    pred: impl Fn(f64) -> Result<bool>,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    if pred(a)? || !pred(b)? {
        return Err(Error::SolverFailure(format!(
            "predicate does not flip on [{lo}, {hi}]"
        )));
    }
    while b - a > xtol {
        let m = 0.5 * (a + b);
        if pred(m)? {
            b = m;
        } else {
            a = m;
        }
    }
    Ok((a, b))
}

/// Evenly spaced points with inclusive endpoints.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|k| if k + 1 == n { b } else { a + k as f64 * h })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_polynomial_exact() {
        let v = simpson(|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 4);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn adaptive_simpson_sharp_peak() {
        let f = |x: f64| (-(x - 0.3).powi(2) / 1e-6).exp();
        let v = adaptive_simpson_panels(&f, -1.0, 1.0, 64, 1e-12, 50);
        assert_abs_diff_eq!(v, (std::f64::consts::PI * 1e-6).sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn golden_finds_max() {
        let (x, fx) = golden_max(|x| -(x - 0.7).powi(2) + 2.0, 0.0, 3.0, 1e-10);
        assert_abs_diff_eq!(x, 0.7, epsilon = 1e-7);
        assert_abs_diff_eq!(fx, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn bisect_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(r, 2f64.sqrt(), epsilon = 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn predicate_bracket() {
        let (a, b) = bisect_predicate(|x| Ok(x > 0.25), 0.0, 1.0, 1e-9).unwrap();
        assert!(a <= 0.25 && b >= 0.25 && b - a <= 1e-9);
    }
}
