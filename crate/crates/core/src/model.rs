//! Signal models: the two-harmonic model, the adaptive harmonic model (AHM)
//! and the time-frequency lattice shared by every field computation.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{positive, Error, Result};

/// Anything that can be sampled as a complex signal on the real line.
pub trait Signal: Sync {
    fn eval(&self, x: f64) -> Complex64;
}

/// `f(t) = e^{2πiξ0 t} + a e^{2πiξ1 t}` with `ξ1 = ξ0 + Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoHarmonicModel {
    pub xi0: f64,
    pub delta: f64,
    pub a: f64,
}

impl TwoHarmonicModel {
    pub fn new(xi0: f64, delta: f64, a: f64) -> Result<Self> {
        if !xi0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "xi0",
                reason: format!("must be finite, got {xi0}"),
            });
        }
        positive("delta", delta)?;
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: format!("must be finite and >= 0, got {a}"),
            });
        }
        Ok(Self { xi0, delta, a })
    }

    pub fn xi1(&self) -> f64 {
        self.xi0 + self.delta
    }

    pub fn xibar(&self) -> f64 {
        self.xi0 + 0.5 * self.delta
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        cis(2.0 * PI * self.xi0 * t) + self.a * cis(2.0 * PI * self.xi1() * t)
    }

    /// `t_k^+ = k/Δ`.
    pub fn constructive_time(&self, k: i64) -> f64 {
        k as f64 / self.delta
    }

    /// `t_k^- = (k + 1/2)/Δ`.
    pub fn destructive_time(&self, k: i64) -> f64 {
        (k as f64 + 0.5) / self.delta
    }

    /// `t_k^I = (k + 1/4)/Δ`, where the cross term vanishes.
    pub fn intermediate_time(&self, k: i64) -> f64 {
        (k as f64 + 0.25) / self.delta
    }

    /// Zero-amplitude-ratio variant used by single-component comparisons.
    pub fn with_a(&self, a: f64) -> Self {
        Self { a, ..*self }
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..*self }
    }
}

impl Signal for TwoHarmonicModel {
    fn eval(&self, x: f64) -> Complex64 {
        self.evaluate(x)
    }
}

pub fn evaluate_two_harmonic(model: &TwoHarmonicModel, t: f64) -> Complex64 {
    model.evaluate(t)
}

#[inline]
pub(crate) fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// Gaussian window `h(x) = e^{-x²/σ²}/(σ√π)` with `ĥ(η) = e^{-π²σ²η²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianWindow {
    pub sigma: f64,
}

impl GaussianWindow {
    pub fn new(sigma: f64) -> Result<Self> {
        positive("sigma", sigma)?;
        Ok(Self { sigma })
    }

    /// `C = π²σ²`.
    pub fn c(&self) -> f64 {
        PI * PI * self.sigma * self.sigma
    }

    pub fn h(&self, x: f64) -> f64 {
        let s = self.sigma;
        (-(x * x) / (s * s)).exp() / (s * PI.sqrt())
    }

    /// Derivative of the window.
    pub fn dh(&self, x: f64) -> f64 {
        -2.0 * x / (self.sigma * self.sigma) * self.h(x)
    }

    pub fn h_hat(&self, eta: f64) -> f64 {
        (-self.c() * eta * eta).exp()
    }

    /// `∫|x|^k h(x) dx = σ^k Γ((k+1)/2)/√π`.
    pub fn abs_moment(&self, k: u32) -> f64 {
        let g = statrs::function::gamma::gamma((k as f64 + 1.0) / 2.0);
        self.sigma.powi(k as i32) * g / PI.sqrt()
    }

    /// `∫|x|^k |h'(x)| dx = (2/σ²) ∫|x|^{k+1} h`.
    pub fn dh_abs_moment(&self, k: u32) -> f64 {
        2.0 / (self.sigma * self.sigma) * self.abs_moment(k + 1)
    }
}

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One AHM component `A(t) e^{2πiφ(t)}`. The phase derivative is supplied, never
/// differentiated numerically.
#[derive(Clone)]
pub struct AhmComponent {
    pub amplitude: RealFn,
    pub phase: RealFn,
    pub phase_derivative: RealFn,
    pub phase_curvature_bound: f64,
}

impl fmt::Debug for AhmComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AhmComponent")
            .field("phase_curvature_bound", &self.phase_curvature_bound)
            .finish_non_exhaustive()
    }
}

impl AhmComponent {
    pub fn new(
        amplitude: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phase: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phase_derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phase_curvature_bound: f64,
    ) -> Self {
        Self {
            amplitude: Arc::new(amplitude),
            phase: Arc::new(phase),
            phase_derivative: Arc::new(phase_derivative),
            phase_curvature_bound,
        }
    }

    /// Constant amplitude, linear phase `ξ t`.
    pub fn harmonic(amplitude: f64, xi: f64) -> Self {
        Self::new(move |_| amplitude, move |t| xi * t, move |_| xi, 0.0)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (self.amplitude)(x) * cis(2.0 * PI * (self.phase)(x))
    }
}

#[derive(Debug, Clone)]
pub struct AhmSignal {
    pub components: Vec<AhmComponent>,
    pub epsilon: f64,
}

impl AhmSignal {
    pub fn new(components: Vec<AhmComponent>, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("must be finite and >= 0, got {epsilon}"),
            });
        }
        for (k, c) in components.iter().enumerate() {
            if !(c.phase_curvature_bound.is_finite() && c.phase_curvature_bound >= 0.0) {
                return Err(Error::ModelValidation(format!(
                    "component {k}: curvature bound must be >= 0"
                )));
            }
        }
        Ok(Self {
            components,
            epsilon,
        })
    }

    /// Lifts a two-harmonic model into AHM form (ε = 0).
    pub fn from_two_harmonic(model: &TwoHarmonicModel) -> Self {
        Self {
            components: vec![
                AhmComponent::harmonic(1.0, model.xi0),
                AhmComponent::harmonic(model.a, model.xi1()),
            ],
            epsilon: 0.0,
        }
    }

    pub(crate) fn require_two(&self) -> Result<(&AhmComponent, &AhmComponent)> {
        match self.components.as_slice() {
            [c0, c1] => Ok((c0, c1)),
            other => Err(Error::UnsupportedModel(format!(
                "analysis needs exactly 2 components, got {}",
                other.len()
            ))),
        }
    }

    /// Samples the separation condition `φ_k' − φ_{k−1}' ≥ Δ > 0` and positivity
    /// of every `φ_k'` on the supplied times. Returns the smallest sampled gap.
    pub fn check_separation(&self, times: &[f64]) -> Result<f64> {
        let mut min_gap = f64::INFINITY;
        for &t in times {
            let mut prev: Option<f64> = None;
            for (k, c) in self.components.iter().enumerate() {
                let d = (c.phase_derivative)(t);
                if !(d > 0.0) {
                    return Err(Error::ModelValidation(format!(
                        "phi_{k}'({t}) = {d} is not positive"
                    )));
                }
                if let Some(p) = prev {
                    let gap = d - p;
                    if !(gap > 0.0) {
                        return Err(Error::ModelValidation(format!(
                            "frequency separation fails at t = {t}: gap {gap}"
                        )));
                    }
                    min_gap = min_gap.min(gap);
                }
                prev = Some(d);
            }
        }
        Ok(min_gap)
    }
}

impl Signal for AhmSignal {
    fn eval(&self, x: f64) -> Complex64 {
        self.components.iter().map(|c| c.eval(x)).sum()
    }
}

/// Uniformly sampled signal, linearly interpolated between nodes and zero outside.
#[derive(Debug, Clone)]
pub struct SampledSignal {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
}

impl SampledSignal {
    pub fn from_fn(x0: f64, dx: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..n).map(|k| f(x0 + k as f64 * dx)).collect();
        Self { x0, dx, values }
    }
}

impl Signal for SampledSignal {
    fn eval(&self, x: f64) -> Complex64 {
        let u = (x - self.x0) / self.dx;
        if !(u >= 0.0) || self.values.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let i = u.floor() as usize;
        let last = self.values.len() - 1;
        if i > last || (i == last && u > i as f64) {
            return Complex64::new(0.0, 0.0);
        }
        if i == last {
            return self.values[last];
        }
        let w = u - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}

/// Locally linearized AHM. The linearization reads
/// `F(x) ≈ scale · f(x − t* + time_shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenAhm {
    pub model: TwoHarmonicModel,
    pub scale: Complex64,
    pub time_shift: f64,
}

/// Freezes an AHM signal at `t*`: `ξ_j = φ_j'(t*)`, `a = A_1/A_0`.
///
/// Constant phase offsets are removed as follows. The relative offset
/// `φ_1(t*) − φ_0(t*)` becomes a time shift `τ` with `Δτ` equal to it, and the
/// remaining common phase `φ_0(t*) − ξ0 τ` is folded into `scale` together with `A_0(t*)`.
pub fn freeze_ahm(signal: &AhmSignal, t_star: f64) -> Result<FrozenAhm> {
    let (c0, c1) = signal.require_two()?;
    let xi0 = (c0.phase_derivative)(t_star);
    let xi1 = (c1.phase_derivative)(t_star);
    if !(xi1 > xi0) {
        return Err(Error::ModelValidation(format!(
            "phi_1'(t*) = {xi1} must exceed phi_0'(t*) = {xi0}"
        )));
    }
    let a0 = (c0.amplitude)(t_star);
    if a0 == 0.0 {
        return Err(Error::DegenerateAmplitude);
    }
    let a1 = (c1.amplitude)(t_star);
    let delta = xi1 - xi0;
    // A negative ratio is a half-period phase flip.
    let (a, flip) = if a1 / a0 >= 0.0 {
        (a1 / a0, 0.0)
    } else {
        (-a1 / a0, 0.5)
    };
    let p0 = (c0.phase)(t_star);
    let p1 = (c1.phase)(t_star);
    let tau = (p1 - p0 + flip) / delta;
    let model = TwoHarmonicModel::new(xi0, delta, a)?;
    let scale = a0 * cis(2.0 * PI * (p0 - xi0 * tau));
    Ok(FrozenAhm {
        model,
        scale,
        time_shift: tau,
    })
}

/// Right-hand side of the STFT linearization error bound, evaluated term by
/// term with the moment constants exactly as printed in the source bound.
pub fn ahm_stft_error_bound(
    signal: &AhmSignal,
    window: &GaussianWindow,
    t: f64,
    t_star: f64,
) -> Result<f64> {
    let (c0, c1) = signal.require_two()?;
    let eps = signal.epsilon;
    let s = window.sigma;
    let sp = PI.sqrt();
    let tau = (t - t_star).abs();
    let mut first = 0.0;
    let mut second = 0.0;
    for c in [c0, c1] {
        let dphi = (c.phase_derivative)(t_star).abs();
        let m2 = c.phase_curvature_bound;
        let aj = (c.amplitude)(t_star).abs();
        first += dphi * (tau + s / sp) + 0.5 * m2 * (tau * tau + 0.5 * s * s);
        second += aj
            * (0.5 * dphi * (tau * tau + 0.5 * s * s)
                + m2 / 6.0
                    * (tau.powi(3) + 3.0 * s / sp * tau * tau + 1.5 * s * s * tau + s * s / sp));
    }
    Ok(eps * first + 2.0 * PI * eps * second)
}

/// Same bound for an arbitrary window, from its absolute moments
/// `W_k = ∫|x|^k |w(x)| dx`, `k = 0..=3`, with every power `|x − t*|^k`
/// expanded binomially around `|t − t*|`.
pub fn ahm_error_bound_moments(
    signal: &AhmSignal,
    moments: [f64; 4],
    t: f64,
    t_star: f64,
) -> Result<f64> {
    let (c0, c1) = signal.require_two()?;
    let [w0, w1, w2, w3] = moments;
    let tau = (t - t_star).abs();
    let p1 = tau * w0 + w1;
    let p2 = tau * tau * w0 + 2.0 * tau * w1 + w2;
    let p3 = tau.powi(3) * w0 + 3.0 * tau * tau * w1 + 3.0 * tau * w2 + w3;
    let mut first = 0.0;
    let mut second = 0.0;
    for c in [c0, c1] {
        let dphi = (c.phase_derivative)(t_star).abs();
        let m2 = c.phase_curvature_bound;
        let aj = (c.amplitude)(t_star).abs();
        first += dphi * p1 + 0.5 * m2 * p2;
        second += aj * (0.5 * dphi * p2 + m2 / 6.0 * p3);
    }
    Ok(signal.epsilon * (first + 2.0 * PI * second))
}

/// Rectangular lattice with inclusive endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub eta_min: f64,
    pub eta_max: f64,
    pub n_eta: usize,
}

impl TfGrid {
    pub fn new(
        t_min: f64,
        t_max: f64,
        n_t: usize,
        eta_min: f64,
        eta_max: f64,
        n_eta: usize,
    ) -> Result<Self> {
        if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(Error::InvalidParameter {
                name: "grid.t",
                reason: format!("need t_min < t_max, got [{t_min}, {t_max}]"),
            });
        }
        if !(eta_min < eta_max) || !eta_min.is_finite() || !eta_max.is_finite() {
            return Err(Error::InvalidParameter {
                name: "grid.eta",
                reason: format!("need eta_min < eta_max, got [{eta_min}, {eta_max}]"),
            });
        }
        if n_t < 2 || n_eta < 2 {
            return Err(Error::InvalidParameter {
                name: "grid.n",
                reason: format!("need n_t, n_eta >= 2, got {n_t}, {n_eta}"),
            });
        }
        Ok(Self {
            t_min,
            t_max,
            n_t,
            eta_min,
            eta_max,
            n_eta,
        })
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_t - 1) as f64
    }

    pub fn deta(&self) -> f64 {
        (self.eta_max - self.eta_min) / (self.n_eta - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        if i + 1 == self.n_t {
            self.t_max
        } else {
            self.t_min + i as f64 * self.dt()
        }
    }

    pub fn eta(&self, j: usize) -> f64 {
        if j + 1 == self.n_eta {
            self.eta_max
        } else {
            self.eta_min + j as f64 * self.deta()
        }
    }

    pub fn len(&self) -> usize {
        self.n_t * self.n_eta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
