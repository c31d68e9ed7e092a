use std::f64::consts::PI;

use statrs::function::erf::erf;

use crate::error::{positive, Error, Result};
use crate::model::GaussianWindow;
use crate::quad::{bisect, bisect_predicate};

/// Where the constructive-time squeezed profile changes from one to two peaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalGapSst {
    pub delta: f64,
    /// `r = e^{−(z_1² − z_2²)}` at the double root.
    pub r: f64,
    /// `ξ_c − ξ0`.
    pub xi_c_offset: f64,
    /// `|H'|` and `|H''|` at the returned point, relative to the local scale.
    pub residual_h1: f64,
    pub residual_h2: f64,
    pub closed_form: bool,
}

impl CriticalGapSst {
    pub fn xi_c(&self, xi0: f64) -> f64 {
        xi0 + self.xi_c_offset
    }
}

/// `(H, H', H'')` at offset `y = ξ − ξ0 ∈ (Δ/4, 3Δ/4)`, where
/// `H = erf(z_1) − erf(z_2) + a erf(z_3) − a erf(z_4)` and the `z_k` are the
/// scaled offsets `πσ(γ_j − ξ_i)` of the constructive-time γ's with `C√α = Δ/4`.
/// The `α^{−1/2}` prefactor is dropped; it does not move critical points.
pub fn h_profile(a: f64, w: &GaussianWindow, delta: f64, y: f64) -> Result<(f64, f64, f64)> {
    positive("a", a)?;
    positive("delta", delta)?;
    if !(y > delta / 4.0 && y < 0.75 * delta) {
        return Err(Error::Domain {
            what: "xi - xi0 (must lie in (delta/4, 3 delta/4))",
            value: y,
        });
    }
    let c = w.c();
    let ps = PI * w.sigma;
    let s1 = y - 0.75 * delta;
    let s2 = s1 - 0.5 * delta;
    let ell = |s: f64| (-(1.0 + delta / s) / a).ln();
    let g1 = -1.0 / (2.0 * c * s1 * (s1 + delta));
    let g2 = -1.0 / (2.0 * c * s2 * (s2 + delta));
    let gg1 = (2.0 * s1 + delta) / (2.0 * c * s1.powi(2) * (s1 + delta).powi(2));
    let gg2 = (2.0 * s2 + delta) / (2.0 * c * s2.powi(2) * (s2 + delta).powi(2));
    let z1 = ps * (0.5 * delta + ell(s1) / (2.0 * c * delta));
    let z2 = ps * (0.5 * delta + ell(s2) / (2.0 * c * delta));
    let z3 = z1 - ps * delta;
    let z4 = z2 - ps * delta;
    let h = erf(z1) - erf(z2) + a * erf(z3) - a * erf(z4);
    let k = 2.0 / PI.sqrt();
    let e = |z: f64| (-z * z).exp();
    let h1 = k * ps * (g1 * (e(z1) + a * e(z3)) - g2 * (e(z2) + a * e(z4)));
    let term = |z: f64, g: f64, gg: f64| e(z) * (ps * gg - 2.0 * z * (ps * g).powi(2));
    let h2 =
        k * (term(z1, g1, gg1) - term(z2, g2, gg2) + a * term(z3, g1, gg1) - a * term(z4, g2, gg2));
    Ok((h, h1, h2))
}

/// Number of interior local maxima of `H` on a uniform `n`-point sample.
fn count_maxima(a: f64, w: &GaussianWindow, delta: f64, n: usize) -> Result<usize> {
    let lo = delta / 4.0;
    let step = 0.5 * delta / (n + 1) as f64;
    let mut prev = h_profile(a, w, delta, lo + step)?.1;
    let mut count = 0;
    for k in 2..=n {
        let d = h_profile(a, w, delta, lo + k as f64 * step)?.1;
        if prev > 0.0 && d <= 0.0 {
            count += 1;
        }
        prev = d;
    }
    Ok(count)
}

/// `Δ_crit` for balanced amplitudes: `(1/(πσ))√(2 ln 3 / 3)`, `r = 1/3`,
/// `ξ_c = ξ̄`. Other amplitude ratios go through [`critical_gap_sst_numeric`].
pub fn critical_gap_sst(a: f64, w: &GaussianWindow) -> Result<CriticalGapSst> {
    positive("a", a)?;
    if a == 1.0 {
        let delta = (2.0 * 3f64.ln() / 3.0).sqrt() / (PI * w.sigma);
        let r = 1.0 / 3.0;
        let s1 = -delta * r / (a + r);
        let (_, h1, h2) = h_profile(a, w, delta, 0.75 * delta + s1)?;
        return Ok(CriticalGapSst {
            delta,
            r,
            xi_c_offset: 0.75 * delta + s1,
            residual_h1: h1.abs(),
            residual_h2: h2.abs(),
            closed_form: true,
        });
    }
    critical_gap_sst_numeric(a, w)
}

/// Solves `H'(ξ) = H''(ξ) = 0` in `(ξ, Δ)`: the gap is bracketed by counting
/// interior maxima of `H` and bisected, then the double root is polished by
/// damped Newton on `(H', H'')`.
pub fn critical_gap_sst_numeric(a: f64, w: &GaussianWindow) -> Result<CriticalGapSst> {
    positive("a", a)?;
    let n = 4000;
    let base = (2.0 * 3f64.ln() / 3.0).sqrt() / (PI * w.sigma);
    let two_peaks = |d: f64| count_maxima(a, w, d, n).map(|c| c >= 2);
    let mut lo = 0.5 * base;
    if two_peaks(lo)? {
        return Err(Error::SolverFailure(format!(
            "two peaks already at delta = {lo}; no bracket"
        )));
    }
    let mut hi = lo;
    while !two_peaks(hi)? {
        lo = hi;
        hi *= 1.02;
        if hi > 20.0 * base {
            return Err(Error::SolverFailure(format!(
                "no second peak below delta = {hi} for a = {a}"
            )));
        }
    }
    let (blo, bhi) = bisect_predicate(two_peaks, lo, hi, 1e-12 * base)?;
    let delta0 = 0.5 * (blo + bhi);

    // Seed ξ at the inflection that separates the new maximum from the new minimum.
    let d_hi = delta0 * (1.0 + 1e-6);
    let h2_at = |d: f64, y: f64| h_profile(a, w, d, y).map(|v| v.2).unwrap_or(f64::NAN);
    let step = 0.5 * d_hi / (n + 1) as f64;
    let mut seed = None;
    let mut best = f64::INFINITY;
    for k in 1..n {
        let y = d_hi / 4.0 + k as f64 * step;
        let (_, h1, _) = h_profile(a, w, d_hi, y)?;
        let (_, h1n, _) = h_profile(a, w, d_hi, y + step)?;
        if h1.abs() + h1n.abs() < best && h2_at(d_hi, y) * h2_at(d_hi, y + step) <= 0.0 {
            best = h1.abs() + h1n.abs();
            seed = Some(bisect(|y| h2_at(d_hi, y), y, y + step, 1e-15)?);
        }
    }
    let mut y =
        seed.ok_or_else(|| Error::SolverFailure("no inflection near the double root".into()))?;
    let mut d = delta0;

    let resid = |y: f64, d: f64| -> Result<(f64, f64)> {
        let (_, h1, h2) = h_profile(a, w, d, y)?;
        Ok((h1 * d, h2 * d * d))
    };
    let (mut f1, mut f2) = resid(y, d)?;
    for _ in 0..60 {
        let norm = f1.hypot(f2);
        if norm < 1e-13 {
            break;
        }
        let hy = 1e-7 * d;
        let hd = 1e-7 * d;
        let (a1, a2) = resid(y + hy, d)?;
        let (b1, b2) = resid(y - hy, d)?;
        let (c1, c2) = resid(y, d + hd)?;
        let (e1, e2) = resid(y, d - hd)?;
        let j = [
            [(a1 - b1) / (2.0 * hy), (c1 - e1) / (2.0 * hd)],
            [(a2 - b2) / (2.0 * hy), (c2 - e2) / (2.0 * hd)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dy = (j[1][1] * f1 - j[0][1] * f2) / det;
        let dd = (j[0][0] * f2 - j[1][0] * f1) / det;
        let mut lambda = 1.0;
        let mut moved = false;
        while lambda > 1e-6 {
            let (ny, nd) = (y - lambda * dy, d - lambda * dd);
            if let Ok((g1, g2)) = resid(ny, nd) {
                if g1.hypot(g2) < norm {
                    y = ny;
                    d = nd;
                    f1 = g1;
                    f2 = g2;
                    moved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if (d - delta0).abs() > 1e-6 * delta0 || f1.hypot(f2) > 1e-8 {
        return Err(Error::SolverFailure(format!(
            "Newton left the bracket or stalled: delta = {d} (bisection {delta0}), residuals ({f1:e}, {f2:e})"
        )));
    }
    let ps = PI * w.sigma;
    let c = w.c();
    let z = |s: f64| ps * (0.5 * d + (-(1.0 + d / s) / a).ln() / (2.0 * c * d));
    let s1 = y - 0.75 * d;
    let (z1, z2) = (z(s1), z(s1 - 0.5 * d));
    Ok(CriticalGapSst {
        delta: d,
        r: (-(z1 * z1 - z2 * z2)).exp(),
        xi_c_offset: y,
        residual_h1: f1.abs(),
        residual_h2: f2.abs(),
        closed_form: false,
    })
}
