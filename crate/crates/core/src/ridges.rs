//! Ridges of the spectrogram, frequency-maxima counts, the STFT critical gap
//! and the bifurcation ellipses of the equal-amplitude model.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gabor::{spectrogram_decomposition, stft_closed_form, ComplexField, FieldTag};
use crate::model::{GaussianWindow, TwoHarmonicModel};
use crate::quad::{golden_max, linspace};

const REFINE_TOL: f64 = 1e-10;
const MERGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseParams {
    pub center_t: f64,
    pub center_eta: f64,
    pub semi_axis_eta: f64,
    pub semi_axis_t: f64,
    pub k: i64,
}

impl EllipseParams {
    /// Point at parameter `u`: `(center_t + b cos u, center_eta + a sin u)`.
    pub fn point(&self, u: f64) -> (f64, f64) {
        (
            self.center_t + self.semi_axis_t * u.cos(),
            self.center_eta + self.semi_axis_eta * u.sin(),
        )
    }

    /// Left-hand side of the normalized ellipse equation, 1 on the curve.
    pub fn level(&self, t: f64, eta: f64) -> f64 {
        let x = (t - self.center_t) / self.semi_axis_t;
        let y = (eta - self.center_eta) / self.semi_axis_eta;
        x * x + y * y
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RidgeReport {
    pub points: Vec<(f64, f64)>,
    pub maxima_count_per_t: Vec<(f64, usize)>,
    pub bifurcation_times: Vec<f64>,
    pub ellipses: Vec<EllipseParams>,
}

impl RidgeReport {
    /// Adds the predicted ellipses whose centers fall inside `[t_min, t_max]`.
    /// Leaves the list empty when the model has no bifurcation.
    pub fn attach_ellipses(&mut self, m: &TwoHarmonicModel, w: &GaussianWindow) {
        let (Some(&(t_min, _)), Some(&(t_max, _))) = (
            self.maxima_count_per_t.first(),
            self.maxima_count_per_t.last(),
        ) else {
            return;
        };
        let k_lo = (t_min * m.delta - 0.5).ceil() as i64;
        let k_hi = (t_max * m.delta - 0.5).floor() as i64;
        self.ellipses = (k_lo..=k_hi)
            .filter_map(|k| bubble_ellipse(m, w, k).ok())
            .collect();
    }
}

/// Band `[ξ0 − 3/(πσ), ξ1 + 3/(πσ)]` required by the maxima counter.
pub fn required_band(m: &TwoHarmonicModel, w: &GaussianWindow) -> (f64, f64) {
    let pad = 3.0 / (PI * w.sigma);
    (m.xi0 - pad, m.xi1() + pad)
}

/// A comfortably wider band than [`required_band`].
pub fn default_band(m: &TwoHarmonicModel, w: &GaussianWindow) -> (f64, f64) {
    let pad = 4.0 / (PI * w.sigma);
    (m.xi0 - pad, m.xi1() + pad)
}

fn check_band(m: &TwoHarmonicModel, w: &GaussianWindow, band: (f64, f64)) -> Result<()> {
    let (need_lo, need_hi) = required_band(m, w);
    let slack = 1e-12 * (1.0 + need_lo.abs().max(need_hi.abs()));
    if band.0 > need_lo + slack || band.1 < need_hi - slack || !(band.0 < band.1) {
        return Err(Error::BandCoverage {
            lo: band.0,
            hi: band.1,
            need_lo,
            need_hi,
        });
    }
    Ok(())
}

/// Refined strict interior maxima of `f` sampled at `n` points on `band`.
fn sampled_maxima(f: &impl Fn(f64) -> f64, band: (f64, f64), n: usize) -> Vec<f64> {
    let xs = linspace(band.0, band.1, n);
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out: Vec<f64> = Vec::new();
    for j in 1..n - 1 {
        if ys[j] > ys[j - 1] && ys[j] >= ys[j + 1] {
            let (x, _) = golden_max(f, xs[j - 1], xs[j + 1], REFINE_TOL);
            out.push(x);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|b, a| (*b - *a).abs() < MERGE_TOL);
    out
}

/// Locations of the local maxima of `η ↦ |V(t,η)|` in `band`, cross-checked
/// between `n` and `2n` samples. On disagreement the resolution is doubled up
/// to three more times before giving up.
pub fn frequency_maxima(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t: f64,
    band: (f64, f64),
    n_samples: usize,
) -> Result<Vec<f64>> {
    check_band(m, w, band)?;
    if n_samples < 512 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: format!("need at least 512, got {n_samples}"),
        });
    }
    let f = |eta: f64| stft_closed_form(m, w, t, eta).norm();
    let mut n = n_samples;
    let mut coarse = sampled_maxima(&f, band, n);
    for _ in 0..4 {
        let fine = sampled_maxima(&f, band, 2 * n);
        if fine.len() == coarse.len() {
            return Ok(fine);
        }
        n *= 2;
        coarse = fine;
    }
    Err(Error::Inconclusive(format!(
        "maxima count at t = {t} does not stabilize up to {n} samples"
    )))
}

pub fn count_frequency_maxima(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t: f64,
    band: (f64, f64),
    n_samples: usize,
) -> Result<usize> {
    frequency_maxima(m, w, t, band, n_samples).map(|v| v.len())
}

fn gap_equation(s: f64, a: f64) -> f64 {
    (s / a).ln() - 0.5 * (s - 1.0 / s)
}

/// Critical gap `Δ = (1+s)/(πσ√(2s))` where `ln(s/a) = ½(s − 1/s)`.
/// The left side minus the right is strictly decreasing in `s`, so the root is unique.
pub fn critical_gap_stft(a: f64, w: &GaussianWindow) -> Result<(f64, f64)> {
    crate::error::positive("a", a)?;
    let s = if a == 1.0 {
        1.0
    } else {
        let (mut lo, mut hi) = (1e-8f64.ln(), 1e8f64.ln());
        let g = |ls: f64| gap_equation(ls.exp(), a);
        if !(g(lo) > 0.0 && g(hi) < 0.0) {
            return Err(Error::SolverFailure(format!(
                "critical gap equation has no bracket in (1e-8, 1e8) for a = {a}"
            )));
        }
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..400 {
            mid = 0.5 * (lo + hi);
            let v = g(mid);
            if v.abs() < 1e-12 || mid == lo || mid == hi {
                break;
            }
            if v > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        mid.exp()
    };
    let delta = (1.0 + s) / (PI * w.sigma * (2.0 * s).sqrt());
    Ok((delta, s))
}

fn bifurcation_argument(m: &TwoHarmonicModel, w: &GaussianWindow) -> Result<f64> {
    if m.a != 1.0 {
        return Err(Error::HypothesisViolation(format!(
            "bifurcation formulas need a = 1, got a = {}",
            m.a
        )));
    }
    Ok(w.c() * m.delta * m.delta)
}

/// `t_L = k/Δ + arccos(π²σ²Δ²−1)/(2πΔ)` and `t_R = (k+1)/Δ − arccos(π²σ²Δ²−1)/(2πΔ)`.
pub fn bifurcation_times(m: &TwoHarmonicModel, w: &GaussianWindow, k: i64) -> Result<(f64, f64)> {
    let p = bifurcation_argument(m, w)?;
    if p > 2.0 * (1.0 + 1e-12) {
        return Err(Error::NoBifurcation { value: p });
    }
    let off = (p - 1.0).clamp(-1.0, 1.0).acos() / (2.0 * PI * m.delta);
    Ok((k as f64 / m.delta + off, (k + 1) as f64 / m.delta - off))
}

pub fn bubble_ellipse(m: &TwoHarmonicModel, w: &GaussianWindow, k: i64) -> Result<EllipseParams> {
    let p = bifurcation_argument(m, w)?;
    if p >= 2.0 * (1.0 - 1e-12) {
        return Err(Error::NoBifurcation { value: p });
    }
    Ok(EllipseParams {
        center_t: (k as f64 + 0.5) / m.delta,
        center_eta: m.xibar(),
        semi_axis_eta: 1.0 / (2f64.sqrt() * PI * w.sigma),
        semi_axis_t: (1.0 - p).acos() / (2.0 * PI * m.delta),
        k,
    })
}

/// `∂_η |V|²` in closed form.
pub fn spectrogram_eta_derivative(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t: f64,
    eta: f64,
) -> f64 {
    let c = w.c();
    let d0 = eta - m.xi0;
    let d1 = eta - m.xi1();
    let (g0, g1, cross) = spectrogram_decomposition(m, w, t, eta);
    -4.0 * c * (d0 * g0 + d1 * g1) - 2.0 * c * (d0 + d1) * cross
}

/// Arc-length integral of `|∂_η |V|²|` over the ellipse `E_k`, by the periodic
/// trapezoid rule with `n_arc` nodes.
pub fn ellipse_residual(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    k: i64,
    n_arc: usize,
) -> Result<f64> {
    if n_arc < 256 {
        return Err(Error::InvalidParameter {
            name: "n_arc",
            reason: format!("need at least 256, got {n_arc}"),
        });
    }
    let e = bubble_ellipse(m, w, k)?;
    let du = 2.0 * PI / n_arc as f64;
    let sum: f64 = (0..n_arc)
        .map(|i| {
            let u = i as f64 * du;
            let (t, eta) = e.point(u);
            let jac =
                ((e.semi_axis_t * u.sin()).powi(2) + (e.semi_axis_eta * u.cos()).powi(2)).sqrt();
            spectrogram_eta_derivative(m, w, t, eta).abs() * jac
        })
        .sum();
    Ok(sum * du)
}

/// Printed bound `Δ·ae^{−CΔ²}/(1+ae^{−CΔ²})` on how far `η−` sits below `ξ0`.
/// It does not hold in general (fails at `a=1, Δ=0.2, σ=√2`); see [`eta_minus_bound`].
pub fn eta_minus_bound_printed(m: &TwoHarmonicModel, w: &GaussianWindow) -> f64 {
    let e = m.a * (-w.c() * m.delta * m.delta).exp();
    m.delta * e / (1.0 + e)
}

/// Printed mirror bound `Δe^{−CΔ²}/(a+e^{−CΔ²})` on how far `η+` sits above `ξ1`.
pub fn eta_plus_bound_printed(m: &TwoHarmonicModel, w: &GaussianWindow) -> f64 {
    let e = (-w.c() * m.delta * m.delta).exp();
    m.delta * e / (m.a + e)
}

/// `ξ0 − η− ≤ Δ·ae^{−CΔ²}/(1−ae^{−CΔ²})`, from `y ≤ a(Δ+y)e^{−CΔ²}`.
/// Infinite when `ae^{−CΔ²} ≥ 1`.
pub fn eta_minus_bound(m: &TwoHarmonicModel, w: &GaussianWindow) -> f64 {
    let e = m.a * (-w.c() * m.delta * m.delta).exp();
    if e < 1.0 {
        m.delta * e / (1.0 - e)
    } else {
        f64::INFINITY
    }
}

/// `η+ − ξ1 ≤ Δe^{−CΔ²}/(a−e^{−CΔ²})`, the mirror image of [`eta_minus_bound`].
pub fn eta_plus_bound(m: &TwoHarmonicModel, w: &GaussianWindow) -> f64 {
    let e = (-w.c() * m.delta * m.delta).exp();
    if e < m.a {
        m.delta * e / (m.a - e)
    } else {
        f64::INFINITY
    }
}

/// `(η_AVG, η−, η+)` on the destructive slice `t = (k+½)/Δ`.
pub fn destructive_extrema(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    k: i64,
) -> Result<(f64, f64, f64)> {
    crate::error::positive("a", m.a)?;
    let t = m.destructive_time(k);
    let eta_avg = m.xibar() - m.a.ln() / (2.0 * w.c() * m.delta);
    let lo = m.xi0 - 2.0 * m.delta;
    let hi = m.xi1() + 2.0 * m.delta;
    if !(lo < eta_avg && eta_avg < hi) {
        return Err(Error::SolverFailure(format!(
            "eta_avg = {eta_avg} lies outside the search window [{lo}, {hi}]"
        )));
    }
    let f = |eta: f64| stft_closed_form(m, w, t, eta).norm();
    let interior = |x: f64, a: f64, b: f64| x - a > 1e-7 && b - x > 1e-7;
    let (eta_minus, _) = golden_max(f, lo, eta_avg, REFINE_TOL);
    let (eta_plus, _) = golden_max(f, eta_avg, hi, REFINE_TOL);
    if !interior(eta_minus, lo, eta_avg) || !interior(eta_plus, eta_avg, hi) {
        return Err(Error::SolverFailure(format!(
            "maximizer hit the bracket edge: eta- = {eta_minus}, eta+ = {eta_plus}"
        )));
    }
    let tol = 1e-9;
    if !(eta_minus < m.xi0) || m.xi0 - eta_minus > eta_minus_bound(m, w) + tol {
        return Err(Error::BoundViolation(format!(
            "eta- = {eta_minus} outside [xi0 - {}, xi0)",
            eta_minus_bound(m, w)
        )));
    }
    if !(eta_plus > m.xi1()) || eta_plus - m.xi1() > eta_plus_bound(m, w) + tol {
        return Err(Error::BoundViolation(format!(
            "eta+ = {eta_plus} outside (xi1, xi1 + {}]",
            eta_plus_bound(m, w)
        )));
    }
    Ok((eta_avg, eta_minus, eta_plus))
}

/// Ridge points of one column of `|V|²`: local maxima with a negative second
/// difference, refined by a three-point parabola.
fn column_ridges(p: &[f64], eta0: f64, deta: f64) -> Vec<f64> {
    let floor = 1e-12 * p.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for j in 1..p.len().saturating_sub(1) {
        let (l, c, r) = (p[j - 1], p[j], p[j + 1]);
        let d2 = l - 2.0 * c + r;
        if c > l && c >= r && d2 < 0.0 && c > floor {
            let off = 0.5 * (l - r) / d2;
            out.push(eta0 + (j as f64 + off) * deta);
        }
    }
    out
}

/// Ridge set of an STFT field, column by column.
pub fn extract_ridges(field: &ComplexField) -> Result<RidgeReport> {
    if field.tag != FieldTag::Stft {
        return Err(Error::NotApplicable(format!(
            "ridge extraction needs an STFT field, got {:?}",
            field.tag
        )));
    }
    let g = field.grid;
    let columns: Vec<(f64, Vec<f64>)> = (0..g.n_t)
        .into_par_iter()
        .map(|i| {
            let p: Vec<f64> = field.column(i).iter().map(|v| v.norm_sqr()).collect();
            (g.t(i), column_ridges(&p, g.eta_min, g.deta()))
        })
        .collect();
    let mut report = RidgeReport::default();
    for (t, etas) in &columns {
        report.points.extend(etas.iter().map(|&eta| (*t, eta)));
        report.maxima_count_per_t.push((*t, etas.len()));
    }
    report.bifurcation_times = report
        .maxima_count_per_t
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| 0.5 * (w[0].0 + w[1].0))
        .collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TfGrid;
    use approx::assert_relative_eq;

    fn win() -> GaussianWindow {
        GaussianWindow::new(2f64.sqrt()).unwrap()
    }

    fn count(m: &TwoHarmonicModel, t: f64) -> usize {
        let w = win();
        count_frequency_maxima(m, &w, t, default_band(m, &w), 512).unwrap()
    }

    #[test]
    fn maxima_counts_at_special_times() {
        let m = TwoHarmonicModel::new(1.0, 0.5, 1.0).unwrap();
        for k in -2..3 {
            assert_eq!(count(&m, m.constructive_time(k)), 2);
        }
        let m = TwoHarmonicModel::new(1.0, 0.2, 1.0).unwrap();
        assert_eq!(count(&m, m.constructive_time(0)), 1);
        assert_eq!(count(&m, m.destructive_time(0)), 2);
    }

    #[test]
    fn maxima_errors() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.5, 1.0).unwrap();
        let e = count_frequency_maxima(&m, &w, 0.0, (0.5, 2.0), 512);
        assert!(matches!(e, Err(Error::BandCoverage { .. })));
        let e = count_frequency_maxima(&m, &w, 0.0, default_band(&m, &w), 100);
        assert!(matches!(e, Err(Error::InvalidParameter { .. })));
        assert!(count_frequency_maxima(&m, &w, 0.0, required_band(&m, &w), 512).is_ok());
    }

    #[test]
    fn critical_gap_examples() {
        let w = win();
        let (d, s) = critical_gap_stft(1.0, &w).unwrap();
        assert_eq!(s, 1.0);
        assert_relative_eq!(d, 1.0 / PI, epsilon = 1e-15);

        let (d2, s2) = critical_gap_stft(2.0, &w).unwrap();
        assert!(s2 > 0.20 && s2 < 0.22, "s = {s2}");
        assert!((d2 - 0.418).abs() < 0.01, "delta = {d2}");
        assert!(gap_equation(s2, 2.0).abs() < 1e-12);

        let (dh, sh) = critical_gap_stft(0.5, &w).unwrap();
        assert_relative_eq!(sh, 1.0 / s2, max_relative = 1e-10);
        assert_relative_eq!(dh, d2, max_relative = 1e-10);

        assert!(critical_gap_stft(0.0, &w).is_err());
    }

    #[test]
    fn critical_gap_matches_counts() {
        let w = win();
        for a in [0.5, 2.0] {
            let (d, _) = critical_gap_stft(a, &w).unwrap();
            let above = TwoHarmonicModel::new(1.0, d * 1.03, a).unwrap();
            let below = TwoHarmonicModel::new(1.0, d * 0.97, a).unwrap();
            assert_eq!(count(&above, 0.0), 2, "a = {a}");
            assert_eq!(count(&below, 0.0), 1, "a = {a}");
        }
    }

    #[test]
    fn bifurcation_examples() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.0).unwrap();
        let (tl, tr) = bifurcation_times(&m, &w, 0).unwrap();
        assert!((tl - 0.3610).abs() < 1e-3, "t_L = {tl}");
        assert_relative_eq!(
            tl,
            (2.0 * PI * PI * 0.09 - 1.0).acos() / (0.6 * PI),
            epsilon = 1e-14
        );
        assert_relative_eq!(tl + tr, 1.0 / 0.3, epsilon = 1e-12);
        let (tl2, tr2) = bifurcation_times(&m, &w, 2).unwrap();
        assert_relative_eq!(tl2 + tr2, 5.0 / 0.3, epsilon = 1e-12);

        // Count flips within 0.02 of t_L.
        assert_eq!(count(&m, tl - 0.02), 1);
        assert_eq!(count(&m, tl + 0.02), 2);

        let edge = m.with_delta(1.0 / PI);
        let (tl, _) = bifurcation_times(&edge, &w, 1).unwrap();
        assert!((tl - PI).abs() < 1e-5);

        let e = bifurcation_times(&m.with_a(1.3), &w, 0);
        assert!(matches!(e, Err(Error::HypothesisViolation(_))));
        let e = bifurcation_times(&m.with_delta(0.4), &w, 0);
        assert!(matches!(e, Err(Error::NoBifurcation { .. })));
    }

    #[test]
    fn ellipse_examples() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.0).unwrap();
        let e = bubble_ellipse(&m, &w, 0).unwrap();
        assert_relative_eq!(e.center_t, 1.0 / 0.6, epsilon = 1e-12);
        assert_relative_eq!(e.center_eta, 1.15, epsilon = 1e-12);
        assert_relative_eq!(e.semi_axis_eta, 1.0 / (2.0 * PI), epsilon = 1e-12);
        // The ellipse touches t_L and t_R.
        let (tl, tr) = bifurcation_times(&m, &w, 0).unwrap();
        assert_relative_eq!(e.center_t - e.semi_axis_t, tl, epsilon = 1e-12);
        assert_relative_eq!(e.center_t + e.semi_axis_t, tr, epsilon = 1e-12);

        let small = bubble_ellipse(&m.with_delta(1e-3), &w, 0).unwrap();
        assert!((small.semi_axis_t - 1.0).abs() < 1e-4);

        assert!(bubble_ellipse(&m.with_delta(1.0 / PI), &w, 0).is_err());
        assert!(bubble_ellipse(&m.with_delta(0.5), &w, 0).is_err());
    }

    #[test]
    fn residual_scales_quadratically() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.2, 1.0).unwrap();
        let r2 = ellipse_residual(&m, &w, 0, 1024).unwrap();
        let r1 = ellipse_residual(&m.with_delta(0.1), &w, 0, 1024).unwrap();
        // The leading Δ² term cancels on the ellipse, so the decay is quartic
        // and the halving ratio sits near 16 rather than 4.
        let ratio = r2 / r1;
        assert!((10.0..=17.0).contains(&ratio), "ratio = {ratio}");
        let r0 = ellipse_residual(&m.with_delta(0.05), &w, 0, 1024).unwrap();
        assert!((r1 / r0 - 16.0).abs() < 1.5, "ratio = {}", r1 / r0);
        assert!(r1 >= 0.0);
        assert!(r1 <= 12.0 * 0.01 * (1.0 + PI * 2.0) * 1.5, "r = {r1}");
        assert!(ellipse_residual(&m, &w, 0, 100).is_err());
    }

    #[test]
    fn eta_derivative_matches_difference() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let h = 1e-6;
        for (t, eta) in [(0.2, 0.9), (1.1, 1.2), (2.0, 1.4)] {
            let p = |e: f64| stft_closed_form(&m, &w, t, e).norm_sqr();
            let fd = (p(eta + h) - p(eta - h)) / (2.0 * h);
            let an = spectrogram_eta_derivative(&m, &w, t, eta);
            assert!((fd - an).abs() < 1e-7, "{fd} vs {an}");
        }
    }

    #[test]
    fn destructive_examples() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.2, 1.0).unwrap();
        let (avg, lo, hi) = destructive_extrema(&m, &w, 0).unwrap();
        assert_eq!(avg, m.xibar());
        assert!(lo < m.xi0 && m.xi1() < hi);

        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let (avg, lo, hi) = destructive_extrema(&m, &w, 0).unwrap();
        let expect = 1.15 - 1.3f64.ln() / (2.0 * 2.0 * PI * PI * 0.3);
        assert_relative_eq!(avg, expect, epsilon = 1e-14);
        assert!((avg - 1.127847).abs() < 1e-6);
        assert!(stft_closed_form(&m, &w, m.destructive_time(0), avg).norm() < 1e-10);
        assert!(lo < m.xi0 && m.xi1() < hi);
    }

    #[test]
    fn destructive_zero_is_unique() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let t = m.destructive_time(1);
        let (avg, _, _) = destructive_extrema(&m, &w, 1).unwrap();
        let v = |eta: f64| stft_closed_form(&m, &w, t, eta).norm();
        for eta in linspace(0.4, 1.9, 2001) {
            if (eta - avg).abs() > 1e-3 {
                assert!(v(eta) > 1e-6, "eta = {eta}");
            }
        }
        let (lo, _) = golden_max(|e| -v(e), avg - 1e-3, avg + 1e-3, 1e-12);
        assert!((lo - avg).abs() < 1e-8);
    }

    #[test]
    fn printed_minus_bound_counterexample() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.2, 1.0).unwrap();
        let (_, lo, hi) = destructive_extrema(&m, &w, 0).unwrap();
        assert!(m.xi0 - lo > eta_minus_bound_printed(&m, &w));
        assert!(m.xi0 - lo <= eta_minus_bound(&m, &w));
        assert!(hi - m.xi1() <= eta_plus_bound(&m, &w));

        // The printed bounds do hold for the unequal-amplitude preset.
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let (_, lo, hi) = destructive_extrema(&m, &w, 0).unwrap();
        assert!(m.xi0 - lo <= eta_minus_bound_printed(&m, &w));
        assert!(hi - m.xi1() <= eta_plus_bound_printed(&m, &w));
    }

    #[test]
    fn always_two_above_critical() {
        let w = win();
        for (a, d) in [(1.0, 0.4), (2.0, 0.5), (0.5, 0.5)] {
            let m = TwoHarmonicModel::new(1.0, d, a).unwrap();
            assert!(d > critical_gap_stft(a, &w).unwrap().0);
            for t in linspace(0.0, 1.0 / d, 41) {
                assert_eq!(count(&m, t), 2, "a = {a}, t = {t}");
            }
        }
    }

    #[test]
    fn counts_follow_bubbles_below_critical() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.0).unwrap();
        let period = 1.0 / m.delta;
        let (tl, tr) = bifurcation_times(&m, &w, 0).unwrap();
        let margin = 0.01 * period;
        for t in linspace(tl + margin, tr - margin, 25) {
            assert_eq!(count(&m, t), 2, "t = {t}");
        }
        let (_, tr_prev) = bifurcation_times(&m, &w, -1).unwrap();
        for t in linspace(tr_prev + margin, tl - margin, 9) {
            assert_eq!(count(&m, t), 1, "t = {t}");
        }
    }

    fn field(
        m: &TwoHarmonicModel,
        t: (f64, f64),
        n_t: usize,
        eta: (f64, f64),
        n_eta: usize,
    ) -> ComplexField {
        let grid = TfGrid::new(t.0, t.1, n_t, eta.0, eta.1, n_eta).unwrap();
        ComplexField::stft(m, &win(), grid)
    }

    #[test]
    fn ridges_well_separated() {
        let m = TwoHarmonicModel::new(1.0, 1.0, 1.0).unwrap();
        let f = field(&m, (0.0, 2.0), 41, (0.0, 3.0), 301);
        let r = extract_ridges(&f).unwrap();
        assert!(r.maxima_count_per_t.iter().all(|&(_, c)| c == 2));
        assert!(r.bifurcation_times.is_empty());
        for &(_, eta) in &r.points {
            let d = (eta - 1.0).abs().min((eta - 2.0).abs());
            assert!(d < 0.01, "eta = {eta}");
        }
    }

    #[test]
    fn ridges_single_harmonic() {
        let m = TwoHarmonicModel::new(1.0, 0.3, 0.0).unwrap();
        let f = field(&m, (0.0, 3.0), 31, (0.0, 2.0), 201);
        let r = extract_ridges(&f).unwrap();
        assert_eq!(r.points.len(), 31);
        assert!(r.points.iter().all(|&(_, eta)| (eta - 1.0).abs() < 1e-3));
    }

    #[test]
    fn ridges_detect_bifurcations() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.0).unwrap();
        let f = field(&m, (0.0, 1.0 / 0.3), 401, (0.5, 1.8), 1301);
        let mut r = extract_ridges(&f).unwrap();
        let (tl, tr) = bifurcation_times(&m, &w, 0).unwrap();
        assert_eq!(r.bifurcation_times.len(), 2, "{:?}", r.bifurcation_times);
        let dt = f.grid.dt();
        assert!((r.bifurcation_times[0] - tl).abs() <= 2.0 * dt);
        assert!((r.bifurcation_times[1] - tr).abs() <= 2.0 * dt);
        assert!(r.maxima_count_per_t.iter().all(|&(_, c)| c == 1 || c == 2));

        // Mirror symmetry about ξ̄ for equal amplitudes.
        let deta = f.grid.deta();
        for &(t, eta) in &r.points {
            let mirror = 2.0 * m.xibar() - eta;
            assert!(r
                .points
                .iter()
                .any(|&(s, e)| s == t && (e - mirror).abs() < deta));
        }

        r.attach_ellipses(&m, &w);
        assert_eq!(r.ellipses.len(), 1);
        assert_eq!(r.ellipses[0].k, 0);
    }

    #[test]
    fn ridges_reject_other_fields() {
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.0).unwrap();
        let mut f = field(&m, (0.0, 1.0), 4, (0.0, 2.0), 8);
        f.tag = FieldTag::Reassign;
        assert!(extract_ridges(&f).is_err());
    }
}
