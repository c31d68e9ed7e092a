//! Brute-force reference computations. Nothing here calls the closed forms,
//! quadrature or reassignment code of the other modules: every kernel is
//! written out again with fixed steps and no adaptivity.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{GaussianWindow, TwoHarmonicModel};
use crate::reassign::ReassignMode;
use crate::squeeze::{SqueezeConfig, Weighting};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleValue {
    Real(f64),
    Complex(Complex64),
    Count(usize),
}

/// One oracle evaluation with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: &'static str,
    pub inputs: Vec<(&'static str, f64)>,
    pub value: OracleValue,
    pub resolution: Vec<(&'static str, f64)>,
    /// Discrepancy against the primary implementation, when compared.
    pub agreement: Option<f64>,
}

impl OracleReport {
    pub fn with_agreement(mut self, primary: OracleValue) -> Self {
        self.agreement = Some(match (self.value, primary) {
            (OracleValue::Real(a), OracleValue::Real(b)) => (a - b).abs(),
            (OracleValue::Complex(a), OracleValue::Complex(b)) => (a - b).norm(),
            (OracleValue::Count(a), OracleValue::Count(b)) => a.abs_diff(b) as f64,
            (OracleValue::Real(a), OracleValue::Complex(b))
            | (OracleValue::Complex(b), OracleValue::Real(a)) => (b - a).norm(),
            _ => f64::INFINITY,
        });
        self
    }
}

fn expi(x: f64) -> Complex64 {
    Complex64::new(x.cos(), x.sin())
}

/// Fixed-step settings for [`oracle_stft`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSpec {
    pub step: f64,
    pub half_width: f64,
}

impl RiemannSpec {
    /// Step `1e-4` over `[t − 8σ, t + 8σ]`.
    pub fn fine(w: &GaussianWindow) -> Self {
        Self {
            step: 1e-4,
            half_width: 8.0 * w.sigma,
        }
    }
}

/// Midpoint Riemann sum of `∫ f(x) h(x−t) e^{−2πiη(x−t)} dx` over `[t−W, t+W]`.
pub fn oracle_stft(
    signal: &dyn Fn(f64) -> Complex64,
    w: &GaussianWindow,
    t: f64,
    eta: f64,
    spec: RiemannSpec,
) -> Result<OracleReport> {
    if !(spec.step > 0.0 && spec.half_width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: format!("need step > 0 and W > 0, got {spec:?}"),
        });
    }
    let n = (2.0 * spec.half_width / spec.step).round() as usize;
    let s = w.sigma;
    let norm = 1.0 / (s * PI.sqrt());
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let u = -spec.half_width + (k as f64 + 0.5) * spec.step;
        let h = norm * (-(u * u) / (s * s)).exp();
        acc += signal(t + u) * expi(-2.0 * PI * eta * u) * h;
    }
    Ok(OracleReport {
        name: "oracle_stft",
        inputs: vec![("sigma", s), ("t", t), ("eta", eta)],
        value: OracleValue::Complex(acc * spec.step),
        resolution: vec![
            ("step", spec.step),
            ("half_width", spec.half_width),
            ("nodes", n as f64),
        ],
        agreement: None,
    })
}

fn strict_maxima(y: &[f64]) -> usize {
    y.windows(3).filter(|v| v[1] > v[0] && v[1] > v[2]).count()
}

/// Strict three-point local-maximum count, required to agree between two
/// samplings of the same curve (each at least 512 samples).
pub fn oracle_maxima_count(coarse: &[f64], fine: &[f64]) -> Result<OracleReport> {
    for (name, y) in [("coarse", coarse), ("fine", fine)] {
        if y.len() < 512 {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("need at least 512 samples, got {}", y.len()),
            });
        }
    }
    let (a, b) = (strict_maxima(coarse), strict_maxima(fine));
    if a != b {
        return Err(Error::Inconclusive(format!(
            "maxima count {a} at {} samples but {b} at {} samples",
            coarse.len(),
            fine.len()
        )));
    }
    Ok(OracleReport {
        name: "oracle_maxima_count",
        inputs: vec![],
        value: OracleValue::Count(a),
        resolution: vec![("coarse", coarse.len() as f64), ("fine", fine.len() as f64)],
        agreement: None,
    })
}

/// Samples `f` at `n` and `2n` equispaced points of `[lo, hi]` and counts maxima.
pub fn oracle_maxima_count_fn(
    f: &(dyn Fn(f64) -> f64 + Sync),
    (lo, hi): (f64, f64),
    n: usize,
) -> Result<OracleReport> {
    let sample = |n: usize| -> Vec<f64> {
        (0..n)
            .map(|k| f(lo + (hi - lo) * k as f64 / (n - 1) as f64))
            .collect()
    };
    let mut r = oracle_maxima_count(&sample(n), &sample(2 * n))?;
    r.inputs = vec![("lo", lo), ("hi", hi)];
    Ok(r)
}

/// Node count of [`oracle_quadrature_squeeze`].
pub const SQUEEZE_ORACLE_NODES: usize = 1 << 16;

/// Midpoint rule with `nodes` points for `∫ G(t,η) g_α(η̂_s(t,η) − ξ) dη` over
/// the same truncated η-domain as the primary transform.
pub fn oracle_quadrature_squeeze_nodes(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    cfg: &SqueezeConfig,
    t: f64,
    xi: f64,
    nodes: usize,
) -> OracleReport {
    let s = w.sigma;
    let c = PI * PI * s * s;
    let (x0, x1) = (m.xi0, m.xi0 + m.delta);
    let (lo, hi) = match cfg.weighting {
        Weighting::Stft => (x0 - 10.0 / (PI * s), x1 + 10.0 / (PI * s)),
        Weighting::Indicator { r } => (-r, r),
    };
    let alpha = cfg.alpha;
    let cross = expi(2.0 * PI * m.delta * t) * m.a;
    let step = (hi - lo) / nodes as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let eta = lo + (k as f64 + 0.5) * step;
        let (d0, d1) = (eta - x0, eta - x1);
        // ratio of the two STFT terms, kept in exponent form so that the far
        // tails stay representable
        let expo = (-c * (d1 * d1 - d0 * d0)).min(700.0);
        let q = cross * expo.exp();
        let den = Complex64::new(1.0, 0.0) + q;
        if den.norm() <= 1e-14 {
            continue;
        }
        let mut z = x1 + (x0 - x1) / den;
        if cfg.mode == ReassignMode::Phase {
            z.im = 0.0;
        }
        let e = (z - xi).norm_sqr() / alpha;
        if e > 745.0 {
            continue;
        }
        let g = (-e).exp() / (PI * alpha).sqrt();
        acc += match cfg.weighting {
            Weighting::Stft => {
                let v0 = expi(2.0 * PI * x0 * t) * (-c * d0 * d0).exp();
                let v1 = expi(2.0 * PI * x1 * t) * (m.a * (-c * d1 * d1).exp());
                (v0 + v1) * g
            }
            Weighting::Indicator { .. } => Complex64::new(g, 0.0),
        };
    }
    OracleReport {
        name: "oracle_quadrature_squeeze",
        inputs: vec![
            ("xi0", m.xi0),
            ("delta", m.delta),
            ("a", m.a),
            ("sigma", s),
            ("alpha", alpha),
            ("t", t),
            ("xi", xi),
        ],
        value: OracleValue::Complex(acc * step),
        resolution: vec![("nodes", nodes as f64), ("lo", lo), ("hi", hi)],
        agreement: None,
    }
}

/// [`oracle_quadrature_squeeze_nodes`] with 2¹⁶ nodes.
pub fn oracle_quadrature_squeeze(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    cfg: &SqueezeConfig,
    t: f64,
    xi: f64,
) -> OracleReport {
    oracle_quadrature_squeeze_nodes(m, w, cfg, t, xi, SQUEEZE_ORACLE_NODES)
}

pub fn complex_value(r: &OracleReport) -> Complex64 {
    match r.value {
        OracleValue::Complex(z) => z,
        OracleValue::Real(x) => Complex64::new(x, 0.0),
        OracleValue::Count(n) => Complex64::new(n as f64, 0.0),
    }
}
