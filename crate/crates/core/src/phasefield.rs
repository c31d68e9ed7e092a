//! STFT phase, zeros and their winding numbers.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gabor::{bargmann_transform, stft_closed_form, stft_partials, ComplexField, FieldTag};
use crate::model::{GaussianWindow, TfGrid, TwoHarmonicModel};

const TAU: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroPoint {
    pub t0: f64,
    pub eta0: f64,
    /// Signed winding of `V` along the default contour (traversed counterclockwise
    /// in the `(t, η)` plane).
    pub winding: i32,
    /// `|V|` at the refined point.
    pub refinement_residual: f64,
}

/// Real-valued companion of [`ComplexField`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    pub grid: TfGrid,
    pub values: Vec<f64>,
}

impl RealField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_eta + j]
    }
}

/// Argument of `v` in `[0, 2π)`.
pub fn phase_of(v: Complex64, a: f64, t: f64, eta: f64) -> Result<f64> {
    let modulus = v.norm();
    if !(modulus > 1e-14 * (1.0 + a)) {
        return Err(Error::PhaseUndefined { t, eta, modulus });
    }
    Ok(v.arg().rem_euclid(TAU))
}

pub fn phase(m: &TwoHarmonicModel, w: &GaussianWindow, t: f64, eta: f64) -> Result<f64> {
    phase_of(stft_closed_form(m, w, t, eta), m.a, t, eta)
}

/// Phase of a field sample; `a` sets the undefined-phase threshold.
pub fn field_phase(field: &ComplexField, a: f64, i: usize, j: usize) -> Result<f64> {
    phase_of(field.at(i, j), a, field.grid.t(i), field.grid.eta(j))
}

/// `|V|·φ`, with `φ = 0` where the phase is undefined. The threshold uses the
/// largest modulus in the field in place of `1 + a`.
pub fn amplitude_weighted_phase(field: &ComplexField) -> Result<RealField> {
    if field.tag != FieldTag::Stft {
        return Err(Error::NotApplicable(format!(
            "amplitude-weighted phase needs an STFT field, got {:?}",
            field.tag
        )));
    }
    let scale = field.values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let values = field
        .values
        .iter()
        .map(|&v| {
            let r = v.norm();
            if r > 1e-14 * scale {
                r * v.arg().rem_euclid(TAU)
            } else {
                0.0
            }
        })
        .collect();
    Ok(RealField {
        grid: field.grid,
        values,
    })
}

/// Default contour size `0.05·min(σ, 1/(πσ))`.
pub fn default_rho(w: &GaussianWindow) -> f64 {
    0.05 * w.sigma.min(1.0 / (PI * w.sigma))
}

/// Point at angle `u` on `(t−t0)² + π²σ⁴(η−η0)² = (σρ)²`.
fn contour_point(w: &GaussianWindow, t0: f64, eta0: f64, rho: f64, u: f64) -> (f64, f64) {
    let s = w.sigma;
    (t0 + s * rho * u.cos(), eta0 + rho / (PI * s) * u.sin())
}

/// Sum of principal-branch increments of `arg f(u)` over `[0, 2π]`, divided by
/// `2π`. Each sampled step is bisected until its increment is below `π/2`.
pub fn winding_sum(f: impl Fn(f64) -> Complex64, floor: f64, n_samples: usize) -> Result<f64> {
    let eval = |u: f64| -> Result<Complex64> {
        let v = f(u);
        if !(v.norm() > floor) {
            return Err(Error::ContourThroughZero { modulus: v.norm() });
        }
        Ok(v)
    };
    fn segment(
        eval: &impl Fn(f64) -> Result<Complex64>,
        u0: f64,
        v0: Complex64,
        u1: f64,
        v1: Complex64,
        depth: u32,
    ) -> Result<f64> {
        let inc = (v1 / v0).arg();
        if inc.abs() < 0.5 * PI || depth == 0 {
            if inc.abs() >= PI * (1.0 - 1e-9) {
                return Err(Error::SolverFailure(
                    "phase increment not resolved by subdivision".into(),
                ));
            }
            return Ok(inc);
        }
        let um = 0.5 * (u0 + u1);
        let vm = eval(um)?;
        Ok(segment(eval, u0, v0, um, vm, depth - 1)? + segment(eval, um, vm, u1, v1, depth - 1)?)
    }
    let du = TAU / n_samples as f64;
    let first = eval(0.0)?;
    let mut prev = first;
    let mut total = 0.0;
    for k in 1..=n_samples {
        let u = k as f64 * du;
        let v = if k == n_samples { first } else { eval(u)? };
        total += segment(&eval, u - du, prev, u, v, 30)?;
        prev = v;
    }
    Ok(total / TAU)
}

fn round_winding(value: f64) -> Result<i32> {
    let r = value.round();
    if (value - r).abs() > 0.01 {
        return Err(Error::WindingNotInteger { value });
    }
    Ok(r as i32)
}

/// Unrounded winding of `V` along the contour of size `rho` centred at `(t0, η0)`.
pub fn winding_about(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t0: f64,
    eta0: f64,
    rho: f64,
    n_samples: usize,
) -> Result<f64> {
    crate::error::positive("rho", rho)?;
    if n_samples < 256 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: format!("need at least 256, got {n_samples}"),
        });
    }
    winding_sum(
        |u| {
            let (t, eta) = contour_point(w, t0, eta0, rho, u);
            stft_closed_form(m, w, t, eta)
        },
        1e-12 * (1.0 + m.a),
        n_samples,
    )
}

/// Signed winding of `V` around a zero. The contour must stay `2ρσ` clear of
/// the neighbouring zeros, which for this model sit `1/Δ` away in time.
pub fn winding_number(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    zero: &ZeroPoint,
    rho: f64,
    n_samples: usize,
) -> Result<i32> {
    if 3.0 * rho * w.sigma >= 1.0 / m.delta {
        return Err(Error::NotApplicable(format!(
            "rho = {rho} reaches the neighbouring zeros 1/Δ = {} away",
            1.0 / m.delta
        )));
    }
    round_winding(winding_about(m, w, zero.t0, zero.eta0, rho, n_samples)?)
}

/// Rounded winding for a contour that may enclose several zeros.
pub fn winding_enclosed(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t0: f64,
    eta0: f64,
    rho: f64,
    n_samples: usize,
) -> Result<i32> {
    round_winding(winding_about(m, w, t0, eta0, rho, n_samples)?)
}

/// Winding of the Bargmann transform around `z0 = t0/σ − iπση0` on a circle of
/// radius `r`, traversed counterclockwise in the `z` plane.
pub fn bargmann_zero_winding(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    zero: &ZeroPoint,
    r: f64,
) -> Result<i32> {
    let z0 = Complex64::new(zero.t0 / w.sigma, -PI * w.sigma * zero.eta0);
    let value = winding_sum(
        |u| bargmann_transform(m, w, z0 + Complex64::from_polar(r, u)),
        0.0,
        256,
    )?;
    round_winding(value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSearch {
    pub zeros: Vec<ZeroPoint>,
    /// One line per candidate that did not converge or left the region.
    pub dropped: Vec<String>,
}

/// Newton on `(Re V, Im V)` with the closed-form Jacobian.
fn newton_zero(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    mut t: f64,
    mut eta: f64,
) -> std::result::Result<(f64, f64, f64), String> {
    for _ in 0..50 {
        let (v, vt, ve) = stft_partials(m, w, t, eta);
        let scale = crate::gabor::components(m, w, t, eta);
        let size = scale.0.norm() + scale.1.norm();
        if v.norm() <= 1e-10 && v.norm() <= 1e-8 * size {
            return Ok((t, eta, v.norm()));
        }
        let det = vt.re * ve.im - ve.re * vt.im;
        if !det.is_finite() || det.abs() < 1e-300 {
            return Err(format!("singular Jacobian at ({t}, {eta})"));
        }
        let dt = (-v.re * ve.im + ve.re * v.im) / det;
        let de = (-vt.re * v.im + vt.im * v.re) / det;
        t += dt;
        eta += de;
        if !(t.is_finite() && eta.is_finite()) {
            return Err("Newton diverged".into());
        }
    }
    Err(format!("no convergence in 50 iterations near ({t}, {eta})"))
}

/// Zeros of `V` in the region: analytic seeds at `(t_k^-, η_AVG)` plus cells
/// where both `Re V` and `Im V` change sign, all refined by Newton.
pub fn locate_zeros_with_diagnostics(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    region: &TfGrid,
) -> ZeroSearch {
    let mut seeds: Vec<(f64, f64)> = Vec::new();
    if m.a > 0.0 {
        let eta_avg = m.xibar() - m.a.ln() / (2.0 * w.c() * m.delta);
        let k_lo = (region.t_min * m.delta - 0.5).ceil() as i64;
        let k_hi = (region.t_max * m.delta - 0.5).floor() as i64;
        for k in k_lo..=k_hi {
            seeds.push((m.destructive_time(k), eta_avg));
        }
    }
    let field = ComplexField::stft(m, w, *region);
    let (nt, ne) = (region.n_t, region.n_eta);
    let changes = |vals: [f64; 4]| {
        let pos = vals.iter().any(|&x| x > 0.0);
        let neg = vals.iter().any(|&x| x < 0.0);
        pos && neg
    };
    for i in 0..nt.saturating_sub(1) {
        for j in 0..ne.saturating_sub(1) {
            let c = [
                field.at(i, j),
                field.at(i + 1, j),
                field.at(i, j + 1),
                field.at(i + 1, j + 1),
            ];
            if changes(c.map(|v| v.re)) && changes(c.map(|v| v.im)) {
                let size: f64 = c.iter().map(|v| v.norm()).sum();
                let lim = crate::gabor::components(m, w, region.t(i), region.eta(j));
                // Skip cells where both components have underflowed.
                if size > 0.0 && lim.0.norm() + lim.1.norm() > 1e-200 {
                    seeds.push((
                        0.5 * (region.t(i) + region.t(i + 1)),
                        0.5 * (region.eta(j) + region.eta(j + 1)),
                    ));
                }
            }
        }
    }
    let tol_t = 1e-9 * (1.0 + region.t_min.abs().max(region.t_max.abs()));
    let tol_e = 1e-9 * (1.0 + region.eta_min.abs().max(region.eta_max.abs()));
    let inside = |t: f64, e: f64| {
        t >= region.t_min - tol_t
            && t <= region.t_max + tol_t
            && e >= region.eta_min - tol_e
            && e <= region.eta_max + tol_e
    };
    let results: Vec<std::result::Result<(f64, f64, f64), String>> = seeds
        .par_iter()
        .map(|&(t, e)| {
            let (t, e, r) = newton_zero(m, w, t, e)?;
            if inside(t, e) {
                Ok((t, e, r))
            } else {
                Err(format!("converged outside the region at ({t}, {e})"))
            }
        })
        .collect();
    let mut found = Vec::new();
    let mut dropped = Vec::new();
    for r in results {
        match r {
            Ok(z) => found.push(z),
            Err(msg) => dropped.push(msg),
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut merged: Vec<(f64, f64, f64)> = Vec::new();
    for z in found {
        if let Some(prev) = merged
            .iter_mut()
            .find(|p| (p.0 - z.0).abs() < 1e-8 && (p.1 - z.1).abs() < 1e-8)
        {
            if z.2 < prev.2 {
                *prev = z;
            }
        } else {
            merged.push(z);
        }
    }
    merged.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let rho = default_rho(w);
    let zeros = merged
        .into_iter()
        .map(|(t0, eta0, residual)| {
            let mut z = ZeroPoint {
                t0,
                eta0,
                winding: 0,
                refinement_residual: residual,
            };
            match winding_number(m, w, &z, rho, 256) {
                Ok(k) => z.winding = k,
                Err(e) => dropped.push(format!("winding at ({t0}, {eta0}) failed: {e}")),
            }
            z
        })
        .collect();
    ZeroSearch { zeros, dropped }
}

pub fn locate_zeros(m: &TwoHarmonicModel, w: &GaussianWindow, region: &TfGrid) -> Vec<ZeroPoint> {
    locate_zeros_with_diagnostics(m, w, region).zeros
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn win() -> GaussianWindow {
        GaussianWindow::new(2f64.sqrt()).unwrap()
    }

    fn fig4() -> TwoHarmonicModel {
        TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap()
    }

    fn region() -> TfGrid {
        TfGrid::new(0.0, 7.0, 141, 0.5, 1.8, 131).unwrap()
    }

    #[test]
    fn phase_examples() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 0.0).unwrap();
        for t in [0.0, 0.37, 2.2, 5.9] {
            let p = phase(&m, &w, t, 1.1).unwrap();
            let expect = (TAU * t).rem_euclid(TAU);
            let d = (p - expect).abs();
            assert!(d < 1e-9 || (d - TAU).abs() < 1e-9, "{p} vs {expect}");
        }
        let m = TwoHarmonicModel::new(1.2, 0.3, 1.0).unwrap();
        let t = m.constructive_time(2);
        let p = phase(&m, &w, t, 1.3).unwrap();
        let expect = (TAU * 1.2 * t).rem_euclid(TAU);
        assert!((p - expect).abs() < 1e-9 || (p - expect).abs() > TAU - 1e-9);

        let m = fig4();
        let eta = m.xibar() - m.a.ln() / (2.0 * w.c() * m.delta);
        let e = phase(&m, &w, m.destructive_time(0), eta);
        assert!(matches!(e, Err(Error::PhaseUndefined { .. })));
    }

    #[test]
    fn phase_range() {
        let w = win();
        let m = fig4();
        for (t, e) in [(0.1, 0.7), (3.0, 1.2), (6.4, 1.5)] {
            let p = phase(&m, &w, t, e).unwrap();
            assert!((0.0..TAU).contains(&p));
        }
    }

    #[test]
    fn fig4_zeros() {
        let w = win();
        let m = fig4();
        let search = locate_zeros_with_diagnostics(&m, &w, &region());
        let z = &search.zeros;
        assert_eq!(z.len(), 2, "{z:?}");
        assert!((z[0].t0 - 1.0 / 0.6).abs() < 1e-8);
        assert!((z[1].t0 - 5.0).abs() < 1e-8);
        for p in z {
            assert!((p.eta0 - 1.127847).abs() < 1e-6);
            assert!(p.refinement_residual <= 1e-9 * (1.0 + m.a));
            assert_eq!(p.winding.abs(), 1);
        }
    }

    #[test]
    fn no_zeros_without_second_component() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 0.0).unwrap();
        assert!(locate_zeros(&m, &w, &region()).is_empty());
    }

    #[test]
    fn one_zero_per_period() {
        let w = win();
        for (a, d) in [(1.0, 0.5), (0.7, 0.4), (1.3, 0.3)] {
            let m = TwoHarmonicModel::new(1.0, d, a).unwrap();
            let g = TfGrid::new(0.0, 10.0, 201, 0.0, 2.5, 126).unwrap();
            let z = locate_zeros(&m, &w, &g);
            let expect = (0..40)
                .filter(|&k| (0.0..=10.0).contains(&m.destructive_time(k)))
                .count();
            assert_eq!(z.len(), expect, "a = {a}, d = {d}");
        }
    }

    #[test]
    fn winding_invariances() {
        let w = win();
        let m = fig4();
        let z = locate_zeros(&m, &w, &region());
        let rho = default_rho(&w);
        for p in &z {
            let k = winding_number(&m, &w, p, rho, 256).unwrap();
            assert_eq!(k, p.winding);
            assert_eq!(winding_number(&m, &w, p, rho, 512).unwrap(), k);
            assert_eq!(winding_number(&m, &w, p, rho / 2.0, 256).unwrap(), k);
            let raw = winding_about(&m, &w, p.t0, p.eta0, rho, 256).unwrap();
            assert!((raw - k as f64).abs() < 0.01);
        }
    }

    #[test]
    fn winding_zero_free_and_enclosing() {
        let w = win();
        let m = fig4();
        let z = locate_zeros(&m, &w, &region());
        assert_eq!(winding_enclosed(&m, &w, 3.3, 1.13, 0.2, 256).unwrap(), 0);
        // A contour spanning both zeros.
        let tc = 0.5 * (z[0].t0 + z[1].t0);
        let rho = 2.5 / w.sigma;
        let k = winding_enclosed(&m, &w, tc, z[0].eta0, rho, 1024).unwrap();
        assert_eq!(k, 2 * z[0].winding);
    }

    #[test]
    fn winding_errors() {
        let w = win();
        let m = fig4();
        let z = locate_zeros(&m, &w, &region());
        let e = winding_about(&m, &w, z[0].t0 - 0.01 * w.sigma, z[0].eta0, 0.01, 256);
        assert!(matches!(e, Err(Error::ContourThroughZero { .. })));
        assert!(winding_number(&m, &w, &z[0], 2.0, 256).is_err());
        assert!(winding_number(&m, &w, &z[0], 0.01, 64).is_err());
    }

    #[test]
    fn bargmann_side_agrees() {
        let w = win();
        let m = fig4();
        for p in locate_zeros(&m, &w, &region()) {
            // The map (t, η) → z reverses orientation.
            assert_eq!(bargmann_zero_winding(&m, &w, &p, 1e-3).unwrap(), -p.winding);
            let z0 = Complex64::new(p.t0 / w.sigma, -PI * w.sigma * p.eta0);
            assert!(
                bargmann_transform(&m, &w, z0).norm()
                    < 1e-9 * bargmann_transform(&m, &w, z0 + 0.1).norm()
            );
        }
    }

    #[test]
    fn weighted_phase() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 0.0).unwrap();
        let g = TfGrid::new(0.0, 2.0, 11, 0.5, 1.5, 11).unwrap();
        let f = ComplexField::stft(&m, &w, g);
        let wp = amplitude_weighted_phase(&f).unwrap();
        for i in 0..11 {
            for j in 0..11 {
                let expect = w.h_hat(g.eta(j) - 1.0) * (TAU * g.t(i)).rem_euclid(TAU);
                let got = wp.at(i, j);
                assert!(
                    (got - expect).abs() < 1e-9
                        || (got - expect).abs() > TAU * w.h_hat(g.eta(j) - 1.0) - 1e-6,
                    "({i}, {j}) {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn weighted_phase_vanishes_and_is_tame_near_zero() {
        let w = win();
        let m = fig4();
        let t0 = m.destructive_time(0);
        let eta0 = m.xibar() - m.a.ln() / (2.0 * w.c() * m.delta);
        // Grid with the zero on a node.
        let step_t = 0.01;
        let step_e = 0.001;
        let g = TfGrid::new(
            t0 - 20.0 * step_t,
            t0 + 20.0 * step_t,
            41,
            eta0 - 20.0 * step_e,
            eta0 + 20.0 * step_e,
            41,
        )
        .unwrap();
        let f = ComplexField::stft(&m, &w, g);
        let wp = amplitude_weighted_phase(&f).unwrap();
        assert!(wp.at(20, 20).abs() < 1e-9);
        // Lipschitz estimate of |V| in η from the closed-form partial.
        let lip = (0..41)
            .flat_map(|i| (0..41).map(move |j| (i, j)))
            .map(|(i, j)| stft_partials(&m, &w, g.t(i), g.eta(j)).2.norm())
            .fold(0.0, f64::max);
        let bound = g.deta() * lip * TAU;
        for i in 17..24 {
            for j in 17..23 {
                let jump = (wp.at(i, j + 1) - wp.at(i, j)).abs();
                let r = ((i as f64 - 20.0).abs() + (j as f64 - 20.0).abs() + 1.0).max(1.0);
                assert!(
                    jump <= r * bound,
                    "({i}, {j}) jump {jump} bound {}",
                    r * bound
                );
            }
        }
        let mut bad = f.clone();
        bad.tag = FieldTag::Squeeze;
        assert!(amplitude_weighted_phase(&bad).is_err());
    }

    #[test]
    fn default_rho_value() {
        assert_relative_eq!(
            default_rho(&win()),
            0.05 / (PI * 2f64.sqrt()),
            epsilon = 1e-15
        );
    }
}
