//! Gaussian-window STFT in the modified convention
//! `V(t,η) = ∫ f(x) h(x−t) e^{−2πiη(x−t)} dx`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{cis, GaussianWindow, Signal, TfGrid, TwoHarmonicModel};

/// `V = e^{2πiξ0 t}(ĥ(η−ξ0) + a e^{2πiΔt} ĥ(η−ξ1))`.
pub fn stft_closed_form(m: &TwoHarmonicModel, w: &GaussianWindow, t: f64, eta: f64) -> Complex64 {
    let (a, b) = components(m, w, t, eta);
    a + b
}

/// The two summands `A = e^{2πiξ0 t}ĥ(η−ξ0)` and `B = a e^{2πiξ1 t}ĥ(η−ξ1)`.
pub(crate) fn components(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t: f64,
    eta: f64,
) -> (Complex64, Complex64) {
    let xi1 = m.xi1();
    let a = cis(2.0 * PI * m.xi0 * t) * w.h_hat(eta - m.xi0);
    let b = cis(2.0 * PI * xi1 * t) * (m.a * w.h_hat(eta - xi1));
    (a, b)
}

/// `(V, ∂_t V, ∂_η V)` in closed form.
pub fn stft_partials(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t: f64,
    eta: f64,
) -> (Complex64, Complex64, Complex64) {
    let (a, b) = components(m, w, t, eta);
    let xi1 = m.xi1();
    let i2pi = Complex64::new(0.0, 2.0 * PI);
    let dt = i2pi * (a * m.xi0 + b * xi1);
    let deta = -(a * (eta - m.xi0) + b * (eta - xi1)) * (2.0 * w.c());
    (a + b, dt, deta)
}

/// STFT with the derivative window `Dh`, from `∂_t V = −V^{Dh} + 2πiηV`.
pub fn stft_dh_closed_form(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t: f64,
    eta: f64,
) -> Complex64 {
    let (a, b) = components(m, w, t, eta);
    Complex64::new(0.0, 2.0 * PI) * (a * (eta - m.xi0) + b * (eta - m.xi1()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowKind {
    H,
    Dh,
}

/// Truncation half-width `W = width_sigmas·σ` and composite Simpson with `nodes` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub width_sigmas: f64,
    pub nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            width_sigmas: 8.0,
            nodes: 2048,
        }
    }
}

impl QuadratureSpec {
    pub fn half_width(&self, w: &GaussianWindow) -> f64 {
        self.width_sigmas * w.sigma
    }
}

/// Numerical STFT by composite Simpson on `[t−W, t+W]`. With the defaults the
/// absolute error against the closed form is below 1e-8 for unit-size signals.
pub fn stft_numeric(
    signal: &dyn Signal,
    w: &GaussianWindow,
    t: f64,
    eta: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    stft_numeric_window(signal, w, WindowKind::H, t, eta, quad)
}

pub fn stft_numeric_window(
    signal: &dyn Signal,
    w: &GaussianWindow,
    kind: WindowKind,
    t: f64,
    eta: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    let half = quad.half_width(w);
    let n = (quad.nodes.max(2) + 1) & !1;
    let h = 2.0 * half / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let u = -half + k as f64 * h;
        let x = t + u;
        let fx = signal.eval(x);
        if !(fx.re.is_finite() && fx.im.is_finite()) {
            return Err(Error::NonFiniteSample { x });
        }
        let win = match kind {
            WindowKind::H => w.h(u),
            WindowKind::Dh => w.dh(u),
        };
        let weight = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += fx * cis(-2.0 * PI * eta * u) * (weight * win);
    }
    Ok(acc * (h / 3.0))
}

/// The three terms of `|V|² = g0 + g1 + cross`.
pub fn spectrogram_decomposition(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t: f64,
    eta: f64,
) -> (f64, f64, f64) {
    let c = w.c();
    let d0 = eta - m.xi0;
    let d1 = eta - m.xi1();
    let g0 = (-2.0 * c * d0 * d0).exp();
    let g1 = m.a * m.a * (-2.0 * c * d1 * d1).exp();
    let cross = 2.0 * m.a * (-c * (d0 * d0 + d1 * d1)).exp() * (2.0 * PI * m.delta * t).cos();
    (g0, g1, cross)
}

/// Uniform bound `2a e^{−π²σ²(Δ/2)²}` on `| |V| − (|V0| + |V1|) |`.
pub fn separation_gap_bound(m: &TwoHarmonicModel, w: &GaussianWindow) -> f64 {
    let half = 0.5 * m.delta;
    2.0 * m.a * (-w.c() * half * half).exp()
}

/// Bargmann transform of the two-harmonic model in closed form,
/// `B_σ e_ξ(z) = exp(z²/2 + 2πiσξz − π²σ²ξ²)`, returned as per-component exponents.
fn bargmann_exponents(m: &TwoHarmonicModel, w: &GaussianWindow, z: Complex64) -> [Complex64; 2] {
    let s = w.sigma;
    let c = w.c();
    let e = |xi: f64| z * z * 0.5 + Complex64::new(0.0, 2.0 * PI * s * xi) * z - c * xi * xi;
    [e(m.xi0), e(m.xi1())]
}

pub fn bargmann_transform(m: &TwoHarmonicModel, w: &GaussianWindow, z: Complex64) -> Complex64 {
    let [e0, e1] = bargmann_exponents(m, w, z);
    e0.exp() + m.a * e1.exp()
}

/// STFT rebuilt from the Bargmann transform at `z = t/σ − iπση`, multiplied
/// by the nonvanishing factor `e^{−½[(t/σ)²+(πση)²]} e^{iπtη}`.
pub fn stft_from_bargmann(m: &TwoHarmonicModel, w: &GaussianWindow, t: f64, eta: f64) -> Complex64 {
    let s = w.sigma;
    let z = Complex64::new(t / s, -PI * s * eta);
    let pre = Complex64::new(
        -0.5 * ((t / s).powi(2) + (PI * s * eta).powi(2)),
        PI * t * eta,
    );
    let [e0, e1] = bargmann_exponents(m, w, z);
    (pre + e0).exp() + m.a * (pre + e1).exp()
}

pub fn bargmann_consistency(m: &TwoHarmonicModel, w: &GaussianWindow, t: f64, eta: f64) -> f64 {
    (stft_from_bargmann(m, w, t, eta) - stft_closed_form(m, w, t, eta)).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldTag {
    Stft,
    Reassign,
    Squeeze,
}

/// Row-major `n_t × n_eta` complex values over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: TfGrid,
    pub values: Vec<Complex64>,
    pub tag: FieldTag,
}

impl ComplexField {
    /// Fills the grid column by column in parallel. The output does not depend
    /// on scheduling because every cell is computed independently.
    pub fn fill(grid: TfGrid, tag: FieldTag, f: impl Fn(f64, f64) -> Complex64 + Sync) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        values
            .par_chunks_mut(grid.n_eta)
            .enumerate()
            .for_each(|(i, col)| {
                let t = grid.t(i);
                for (j, v) in col.iter_mut().enumerate() {
                    *v = f(t, grid.eta(j));
                }
            });
        Self { grid, values, tag }
    }

    pub fn stft(m: &TwoHarmonicModel, w: &GaussianWindow, grid: TfGrid) -> Self {
        Self::fill(grid, FieldTag::Stft, |t, eta| {
            stft_closed_form(m, w, t, eta)
        })
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n_eta + j]
    }

    pub fn column(&self, i: usize) -> &[Complex64] {
        let n = self.grid.n_eta;
        &self.values[i * n..(i + 1) * n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AhmSignal;
    use approx::assert_abs_diff_eq;

    fn win() -> GaussianWindow {
        GaussianWindow::new(2f64.sqrt()).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.5, 1.0).unwrap();
        let v = stft_closed_form(&m, &w, 0.0, 1.25);
        assert_abs_diff_eq!(v.re, 2.0 * (-2.0 * PI * PI * 0.0625).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(v.re, 0.58243, epsilon = 1e-4);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        let m0 = m.with_a(0.0);
        assert_abs_diff_eq!(
            stft_closed_form(&m0, &w, 0.37, 1.0).norm(),
            1.0,
            epsilon = 1e-15
        );
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let eta_avg = m.xibar() - 1.3f64.ln() / (2.0 * w.c() * 0.3);
        assert_abs_diff_eq!(eta_avg, 1.127847, epsilon = 1e-6);
        assert!(stft_closed_form(&m, &w, m.destructive_time(0), eta_avg).norm() < 1e-10);
    }

    #[test]
    fn numeric_matches_closed_form() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let q = QuadratureSpec::default();
        for &(t, eta) in &[(0.0, 1.0), (1.7, 1.15), (-3.2, 0.6), (5.0, 1.9)] {
            let n = stft_numeric(&m, &w, t, eta, &q).unwrap();
            assert!((n - stft_closed_form(&m, &w, t, eta)).norm() < 1e-8);
            let nd = stft_numeric_window(&m, &w, WindowKind::Dh, t, eta, &q).unwrap();
            assert!((nd - stft_dh_closed_form(&m, &w, t, eta)).norm() < 1e-8);
        }
    }

    #[test]
    fn numeric_zero_signal_and_nonfinite() {
        struct Zero;
        impl Signal for Zero {
            fn eval(&self, _: f64) -> Complex64 {
                Complex64::new(0.0, 0.0)
            }
        }
        struct Bad;
        impl Signal for Bad {
            fn eval(&self, x: f64) -> Complex64 {
                if x > 0.5 {
                    Complex64::new(f64::NAN, 0.0)
                } else {
                    Complex64::new(1.0, 0.0)
                }
            }
        }
        let w = win();
        let q = QuadratureSpec::default();
        assert_eq!(stft_numeric(&Zero, &w, 0.0, 1.0, &q).unwrap().norm(), 0.0);
        assert!(matches!(
            stft_numeric(&Bad, &w, 0.0, 1.0, &q),
            Err(Error::NonFiniteSample { .. })
        ));
    }

    #[test]
    fn numeric_convergence_order() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.5, 1.0).unwrap();
        let exact = stft_closed_form(&m, &w, 0.4, 1.1);
        let err = |n: usize| {
            let q = QuadratureSpec {
                width_sigmas: 8.0,
                nodes: n,
            };
            (stft_numeric(&m, &w, 0.4, 1.1, &q).unwrap() - exact).norm()
        };
        let mut n = 16;
        let mut checked = 0;
        while n <= 512 {
            let (e1, e2) = (err(n), err(2 * n));
            if e2 > 1e-12 {
                assert!(e1 / e2 >= 4.0, "n={n}: {e1} -> {e2}");
                checked += 1;
            }
            n *= 2;
        }
        assert!(checked >= 1);
    }

    #[test]
    fn decomposition_sums_to_spectrogram() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        for &(t, eta) in &[(0.0, 1.1), (0.77, 1.4), (3.1, 0.9)] {
            let (g0, g1, x) = spectrogram_decomposition(&m, &w, t, eta);
            let v = stft_closed_form(&m, &w, t, eta).norm_sqr();
            assert_abs_diff_eq!(g0 + g1 + x, v, epsilon = 1e-12);
        }
        let (_, _, x) = spectrogram_decomposition(&m, &w, m.constructive_time(2), 1.1);
        assert!(x > 0.0);
        for t in [0.25 / 0.3, 0.75 / 0.3] {
            let (g0, g1, x) = spectrogram_decomposition(&m, &w, t, 1.1);
            assert_abs_diff_eq!(x, 0.0, epsilon = 1e-12);
            let v = stft_closed_form(&m, &w, t, 1.1).norm_sqr();
            assert_abs_diff_eq!(g0 + g1, v, epsilon = 1e-12);
        }
    }

    #[test]
    fn gap_bound_examples() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 1.0, 1.3).unwrap();
        let b = separation_gap_bound(&m, &w);
        assert_abs_diff_eq!(b, 2.6 * (-2.0 * PI * PI / 4.0).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.018699, epsilon = 1e-6);
        assert_eq!(separation_gap_bound(&m.with_a(0.0), &w), 0.0);
        let b2 = separation_gap_bound(&m.with_delta(2.0), &w);
        assert_abs_diff_eq!(b2 / b, (-3.0 * 2.0 * PI * PI / 4.0).exp(), epsilon = 1e-15);
    }

    #[test]
    fn bargmann_matches_closed_form() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.5, 1.0).unwrap();
        let grid = TfGrid::new(-2.0, 2.0, 64, 0.0, 2.0, 64).unwrap();
        for i in 0..64 {
            for j in 0..64 {
                assert!(bargmann_consistency(&m, &w, grid.t(i), grid.eta(j)) <= 1e-10);
                assert!(bargmann_consistency(&m.with_a(0.0), &w, grid.t(i), grid.eta(j)) <= 1e-12);
            }
        }
        // Single exponential against direct quadrature of the defining integral.
        let z = Complex64::new(0.3, -0.8);
        let m0 = m.with_a(0.0);
        let s = w.sigma;
        let direct = crate::quad::simpson(
            |x: f64| {
                let e = Complex64::new(-x * x / (s * s), 2.0 * PI * x) + z * (2.0 * x / s)
                    - z * z * 0.5;
                e.exp() / (s * PI.sqrt())
            },
            -20.0,
            20.0,
            8000,
        );
        assert!((direct - bargmann_transform(&m0, &w, z)).norm() < 1e-10);
    }

    #[test]
    fn numeric_on_ahm_harmonic_lift() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let sig = AhmSignal::from_two_harmonic(&m);
        let q = QuadratureSpec::default();
        let v = stft_numeric(&sig, &w, 1.0, 1.2, &q).unwrap();
        assert!((v - stft_closed_form(&m, &w, 1.0, 1.2)).norm() < 1e-8);
    }

    #[test]
    fn field_fill_is_deterministic() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let grid = TfGrid::new(0.0, 7.0, 33, 0.5, 1.8, 17).unwrap();
        let a = ComplexField::stft(&m, &w, grid);
        let b = ComplexField::stft(&m, &w, grid);
        assert_eq!(a, b);
        assert_eq!(a.at(3, 4), stft_closed_form(&m, &w, grid.t(3), grid.eta(4)));
    }
}
