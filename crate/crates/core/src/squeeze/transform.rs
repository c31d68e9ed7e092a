use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{mollifier, SqueezeConfig, Weighting};
use crate::error::{Error, Result};
use crate::gabor::{stft_closed_form, ComplexField, FieldTag};
use crate::model::{GaussianWindow, TfGrid, TwoHarmonicModel};
use crate::quad::adaptive_simpson;
use crate::reassign::{eta_s, EtaS, ReassignMode};

/// Integrand `G(t,η) g_α(η̂(t,η) − ξ)`; sentinel points of η̂ contribute 0.
fn integrand<'a>(
    m: &'a TwoHarmonicModel,
    w: &'a GaussianWindow,
    cfg: &'a SqueezeConfig,
    t: f64,
    xi: f64,
) -> impl Fn(f64) -> Complex64 + 'a {
    move |eta| {
        let z = match eta_s(m, w, t, eta) {
            EtaS::AtZero => return Complex64::new(0.0, 0.0),
            EtaS::Value(z) => match cfg.mode {
                ReassignMode::Sync => z,
                ReassignMode::Phase => Complex64::new(z.re, 0.0),
            },
        };
        let e = (z - xi).norm_sqr() / cfg.alpha;
        if e > 745.0 {
            return Complex64::new(0.0, 0.0);
        }
        let g = mollifier(cfg.alpha, z - xi);
        match cfg.weighting {
            Weighting::Stft => stft_closed_form(m, w, t, eta) * g,
            Weighting::Indicator { .. } => Complex64::new(g, 0.0),
        }
    }
}

fn domain(m: &TwoHarmonicModel, w: &GaussianWindow, cfg: &SqueezeConfig) -> (f64, f64) {
    match cfg.weighting {
        Weighting::Stft => {
            let pad = 10.0 / (PI * w.sigma);
            (m.xi0 - pad, m.xi1() + pad)
        }
        Weighting::Indicator { r } => (-r, r),
    }
}

/// Scale of the largest possible `|S|`, used as an absolute floor.
fn reference(m: &TwoHarmonicModel, w: &GaussianWindow, cfg: &SqueezeConfig) -> f64 {
    match cfg.weighting {
        Weighting::Stft => (1.0 + m.a) / (PI * w.sigma * cfg.alpha.sqrt()),
        Weighting::Indicator { .. } => 1.0 / (PI * cfg.alpha).sqrt(),
    }
}

/// Mollifier radius, in units of √α, beyond which the integrand is dropped
/// (`e^{−81}` of the peak).
const ACTIVE_RADIUS: f64 = 9.0;

/// The η-set where `|η̂_s(t,η) − ξ| < ρ`, clipped to `[lo, hi]`.
/// With `q = r e^{iτ}`, `A = ξ0 − ξ`, `B = ξ1 − ξ` the condition reads
/// `(B²−ρ²)r² + 2(AB−ρ²)cos τ·r + A² − ρ² < 0`, a quadratic in `r > 0`, and
/// `r` is monotone in η. Returns `None` in phase mode, where no such form exists.
fn active_set(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    cfg: &SqueezeConfig,
    t: f64,
    xi: f64,
    (lo, hi): (f64, f64),
) -> Option<Vec<(f64, f64)>> {
    if cfg.mode == ReassignMode::Phase {
        return None;
    }
    let rho = ACTIVE_RADIUS * cfg.alpha.sqrt();
    let (a0, b0) = (m.xi0 - xi, m.xi1() - xi);
    if m.a == 0.0 {
        return Some(if a0.abs() < rho {
            vec![(lo, hi)]
        } else {
            vec![]
        });
    }
    let c = (2.0 * PI * m.delta * t).cos();
    let p2 = b0 * b0 - rho * rho;
    let p1 = 2.0 * (a0 * b0 - rho * rho) * c;
    let p0 = a0 * a0 - rho * rho;
    let p = |r: f64| (p2 * r + p1) * r + p0;
    let mut roots = Vec::new();
    if p2.abs() < 1e-300 {
        if p1 != 0.0 {
            roots.push(-p0 / p1);
        }
    } else {
        let disc = p1 * p1 - 4.0 * p2 * p0;
        if disc >= 0.0 {
            let k = -0.5 * (p1 + p1.signum() * disc.sqrt());
            if k != 0.0 {
                roots.push(k / p2);
                roots.push(p0 / k);
            } else {
                roots.push(0.0);
            }
        }
    }
    let mut cuts: Vec<f64> = roots
        .into_iter()
        .filter(|r| r.is_finite() && *r > 0.0)
        .collect();
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup();
    let mut edges = vec![0.0];
    edges.extend(cuts);
    edges.push(f64::INFINITY);
    let c2 = 2.0 * w.c() * m.delta;
    let to_eta = |r: f64| m.xibar() + (r.ln() - m.a.ln()) / c2;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for e in edges.windows(2) {
        let probe = if e[1].is_finite() {
            0.5 * (e[0] + e[1])
        } else {
            2.0 * e[0] + 1.0
        };
        if p(probe) < 0.0 {
            let (x, y) = (to_eta(e[0]).max(lo), to_eta(e[1]).min(hi));
            if x < y {
                match out.last_mut() {
                    Some(last) if last.1 >= x => last.1 = y,
                    _ => out.push((x, y)),
                }
            }
        }
    }
    Some(out)
}

/// Panel nodes over each active interval: `panels/64` panels, or more when the
/// interval is long compared with the domain. Inside an active interval η̂
/// sweeps only a few mollifier widths, so adaptive refinement does the rest.
/// Panel nodes over each active interval. The spacing follows `span`, the width
/// of the region where the two components interact, so a wide flat domain does
/// not dilute the resolution where the integrand varies.
fn mesh(active: &[(f64, f64)], span: f64, panels: usize) -> Vec<Vec<f64>> {
    let h = 16.0 * span / panels as f64;
    let min_panels = (panels / 64).max(16);
    active
        .iter()
        .map(|&(a, b)| {
            let n = (((b - a) / h).ceil() as usize).max(min_panels);
            let s = (b - a) / n as f64;
            (0..=n)
                .map(|k| if k == n { b } else { a + k as f64 * s })
                .collect()
        })
        .collect()
}

fn integrate(f: &impl Fn(f64) -> Complex64, nodes: &[f64], floor: f64, rel: f64) -> Complex64 {
    // Coarse pass for the magnitude of ∫|F|, which sets the absolute tolerance.
    let mut mass = 0.0;
    for p in nodes.windows(2) {
        let (a, b) = (p[0], p[1]);
        let m = 0.5 * (a + b);
        mass += (b - a) / 6.0 * (f(a).norm() + 4.0 * f(m).norm() + f(b).norm());
    }
    let tol = (1e-2 * rel * mass).max(1e-2 * floor) / (nodes.len() as f64);
    let mut acc = Complex64::new(0.0, 0.0);
    for p in nodes.windows(2) {
        acc += adaptive_simpson(f, p[0], p[1], tol, 30);
    }
    acc
}

/// `S(t,ξ) = ∫ G(t,η) g_α(η̂(t,η) − ξ) dη` by adaptive quadrature on
/// `[ξ0 − 10/(πσ), ξ1 + 10/(πσ)]` (STFT weight) or `[−R, R]` (indicator),
/// restricted to the η where `|η̂ − ξ| < 9√α`.
/// The result is accepted when a doubled-resolution rerun agrees to
/// `rel_tol` (relative, with an absolute floor of `1e-12` times the peak scale).
pub fn squeeze_transform(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    cfg: &SqueezeConfig,
    t: f64,
    xi: f64,
) -> Result<Complex64> {
    cfg.validate(m, w)?;
    if !t.is_finite() || !xi.is_finite() {
        return Err(Error::Domain {
            what: "(t, xi)",
            value: if t.is_finite() { xi } else { t },
        });
    }
    let f = integrand(m, w, cfg, t, xi);
    let dom = domain(m, w, cfg);
    let floor = 1e-12 * reference(m, w, cfg);
    let rel = cfg.quadrature.rel_tol;
    let active = active_set(m, w, cfg, t, xi, dom).unwrap_or_else(|| vec![dom]);
    let span = m.delta + 20.0 / (PI * w.sigma);
    if active.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let run = |panels: usize| {
        mesh(&active, span, panels)
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, nodes| {
                acc + integrate(&f, nodes, floor, rel)
            })
    };
    let mut panels = cfg.quadrature.base_panels;
    let mut prev = run(panels);
    for _ in 0..cfg.quadrature.max_doublings.max(1) {
        panels *= 2;
        let next = run(panels);
        if (next - prev).norm() <= rel * next.norm() + floor {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Inconclusive(format!(
        "squeeze quadrature at (t={t}, xi={xi}) did not settle after {panels} panels"
    )))
}

/// `S(t, ξ_j)` for every ξ in `xis`, computed in parallel.
pub fn squeeze_cross_section(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    cfg: &SqueezeConfig,
    t: f64,
    xis: &[f64],
) -> Result<Vec<Complex64>> {
    cfg.validate(m, w)?;
    xis.par_iter()
        .map(|&xi| squeeze_transform(m, w, cfg, t, xi))
        .collect()
}

/// Squeezed transform over a grid whose frequency axis is read as ξ.
pub type SqueezeField = ComplexField;

impl ComplexField {
    pub fn squeeze(
        m: &TwoHarmonicModel,
        w: &GaussianWindow,
        cfg: &SqueezeConfig,
        grid: TfGrid,
    ) -> Result<Self> {
        cfg.validate(m, w)?;
        let values: Result<Vec<Complex64>> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / grid.n_eta, k % grid.n_eta);
                squeeze_transform(m, w, cfg, grid.t(i), grid.eta(j))
            })
            .collect();
        Ok(Self {
            grid,
            values: values?,
            tag: FieldTag::Squeeze,
        })
    }
}
