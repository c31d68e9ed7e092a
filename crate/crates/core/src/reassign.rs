//! Frequency reassignment: the synchrosqueezing rule `η̂_s`, the phase rule
//! `η̂_p = Re η̂_s`, their Möbius structure and the AHM stability bound.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gabor::{components, stft_numeric_window, QuadratureSpec, WindowKind};
use crate::model::{
    ahm_error_bound_moments, ahm_stft_error_bound, cis, AhmSignal, GaussianWindow, Signal, TfGrid,
    TwoHarmonicModel,
};

/// Value of `η̂_s`, or the marker for a zero of `V` where the rule is `−∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaS {
    Value(Complex64),
    AtZero,
}

impl EtaS {
    pub fn value(self) -> Option<Complex64> {
        match self {
            EtaS::Value(v) => Some(v),
            EtaS::AtZero => None,
        }
    }
}

/// Point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(Complex64),
    Infinity,
}

/// `M(z) = (ξ0 + ξ1 z)/(1 + z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    pub xi0: f64,
    pub xi1: f64,
}

impl MobiusMap {
    pub fn new(xi0: f64, xi1: f64) -> Result<Self> {
        if !(xi0.is_finite() && xi1.is_finite() && xi1 > xi0) {
            return Err(Error::InvalidParameter {
                name: "xi1",
                reason: format!("need finite xi1 > xi0, got ({xi0}, {xi1})"),
            });
        }
        Ok(Self { xi0, xi1 })
    }

    pub fn for_model(m: &TwoHarmonicModel) -> Self {
        Self {
            xi0: m.xi0,
            xi1: m.xi1(),
        }
    }

    pub fn apply(&self, z: Extended) -> Extended {
        match z {
            Extended::Infinity => Extended::Finite(Complex64::new(self.xi1, 0.0)),
            Extended::Finite(z) => {
                let den = 1.0 + z;
                if den == Complex64::new(0.0, 0.0) {
                    Extended::Infinity
                } else {
                    Extended::Finite((self.xi0 + z * self.xi1) / den)
                }
            }
        }
    }
}

pub fn mobius_apply(map: &MobiusMap, z: Extended) -> Extended {
    map.apply(z)
}

/// `q = a e^{2πiΔt} e^{2π²σ²Δ(η−ξ̄)}`.
pub fn q(m: &TwoHarmonicModel, w: &GaussianWindow, t: f64, eta: f64) -> Complex64 {
    cis(2.0 * PI * m.delta * t) * (m.a * (2.0 * w.c() * m.delta * (eta - m.xibar())).exp())
}

/// `η̂_s = M(q)`, evaluated as `ξ0 + Δq/(1+q)` or `ξ1 − Δw/(1+w)` with `w = 1/q`
/// so that neither tail overflows.
pub fn eta_s(m: &TwoHarmonicModel, w: &GaussianWindow, t: f64, eta: f64) -> EtaS {
    if m.a == 0.0 {
        return EtaS::Value(Complex64::new(m.xi0, 0.0));
    }
    let log_r = m.a.ln() + 2.0 * w.c() * m.delta * (eta - m.xibar());
    let theta = 2.0 * PI * m.delta * t;
    if log_r <= 0.0 {
        let q = Complex64::from_polar(log_r.exp(), theta);
        let den = 1.0 + q;
        if den.norm() <= 1e-14 {
            return EtaS::AtZero;
        }
        EtaS::Value(m.xi0 + q / den * m.delta)
    } else {
        let inv = Complex64::from_polar((-log_r).exp(), -theta);
        let den = 1.0 + inv;
        if den.norm() * log_r.exp() <= 1e-14 {
            return EtaS::AtZero;
        }
        EtaS::Value(m.xi1() - inv / den * m.delta)
    }
}

/// `η̂_s` straight from the ratio of STFT terms, without the Möbius form.
pub fn eta_s_direct(m: &TwoHarmonicModel, w: &GaussianWindow, t: f64, eta: f64) -> EtaS {
    let (a, b) = components(m, w, t, eta);
    let v = a + b;
    if v.norm() <= 1e-14 * (a.norm() + b.norm()) || v.norm() == 0.0 {
        return EtaS::AtZero;
    }
    EtaS::Value((a * m.xi0 + b * m.xi1()) / v)
}

/// `η̂_p = Re η̂_s`.
pub fn eta_p(m: &TwoHarmonicModel, w: &GaussianWindow, t: f64, eta: f64) -> Result<f64> {
    match eta_s(m, w, t, eta) {
        EtaS::Value(v) => Ok(v.re),
        EtaS::AtZero => Err(Error::PhaseUndefined {
            t,
            eta,
            modulus: crate::gabor::stft_closed_form(m, w, t, eta).norm(),
        }),
    }
}

/// Closed form of `Im η̂_s`:
/// `aΔ e^{−C(d0²+d1²)} sin(2πΔt) / (e^{−2Cd0²} + a²e^{−2Cd1²} + 2a e^{−C(d0²+d1²)} cos(2πΔt))`.
pub fn extra_term(m: &TwoHarmonicModel, w: &GaussianWindow, t: f64, eta: f64) -> f64 {
    let c = w.c();
    let d0 = eta - m.xi0;
    let d1 = eta - m.xi1();
    let cross = (-c * (d0 * d0 + d1 * d1)).exp();
    let ph = 2.0 * PI * m.delta * t;
    let num = m.a * m.delta * cross * ph.sin();
    let den = (-2.0 * c * d0 * d0).exp()
        + m.a * m.a * (-2.0 * c * d1 * d1).exp()
        + 2.0 * m.a * cross * ph.cos();
    num / den
}

/// `η̂_s = η − V^{Dh}/(2πi V^{h})` for an arbitrary signal, by quadrature.
pub fn eta_s_numeric(
    signal: &dyn Signal,
    w: &GaussianWindow,
    t: f64,
    eta: f64,
    quad: &QuadratureSpec,
) -> Result<EtaS> {
    let vh = stft_numeric_window(signal, w, WindowKind::H, t, eta, quad)?;
    let vdh = stft_numeric_window(signal, w, WindowKind::Dh, t, eta, quad)?;
    if vh.norm() == 0.0 {
        return Ok(EtaS::AtZero);
    }
    Ok(EtaS::Value(
        eta - vdh / (Complex64::new(0.0, 2.0 * PI) * vh),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReassignMode {
    Phase,
    Sync,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReassignField {
    pub grid: TfGrid,
    pub values: Vec<EtaS>,
    pub mode: ReassignMode,
}

impl ReassignField {
    pub fn fill(
        m: &TwoHarmonicModel,
        w: &GaussianWindow,
        grid: TfGrid,
        mode: ReassignMode,
    ) -> Self {
        let mut values = vec![EtaS::AtZero; grid.len()];
        values
            .par_chunks_mut(grid.n_eta)
            .enumerate()
            .for_each(|(i, col)| {
                let t = grid.t(i);
                for (j, v) in col.iter_mut().enumerate() {
                    let s = eta_s(m, w, t, grid.eta(j));
                    *v = match (mode, s) {
                        (ReassignMode::Phase, EtaS::Value(z)) => {
                            EtaS::Value(Complex64::new(z.re, 0.0))
                        }
                        _ => s,
                    };
                }
            });
        Self { grid, values, mode }
    }

    pub fn at(&self, i: usize, j: usize) -> EtaS {
        self.values[i * self.grid.n_eta + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractionCheck {
    pub bound: f64,
    pub actual: f64,
    pub holds: bool,
}

fn attraction(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t: f64,
    eta: f64,
    premise: f64,
) -> Result<AttractionCheck> {
    if !(premise <= 0.5) {
        return Err(Error::NotApplicable(format!(
            "attraction premise {premise} exceeds 1/2"
        )));
    }
    let bound = 2.0 * m.delta * premise;
    let actual = match eta_s(m, w, t, eta) {
        EtaS::Value(v) => (v - m.xi0).norm(),
        EtaS::AtZero => f64::INFINITY,
    };
    Ok(AttractionCheck {
        bound,
        actual,
        holds: actual <= bound * (1.0 + 1e-12),
    })
}

/// Attraction to `ξ0` in the stated form: `|η̂_s − ξ0| ≤ 2Δ|a|e^{π²σ²Δ(η−ξ̄)}`
/// whenever `|a|e^{π²σ²Δ(η−ξ̄)} ≤ 1/2`.
pub fn attraction_bound_check(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t: f64,
    eta: f64,
) -> Result<AttractionCheck> {
    let premise = m.a.abs() * (w.c() * m.delta * (eta - m.xibar())).exp();
    attraction(m, w, t, eta, premise)
}

/// Attraction in terms of `|q| = |a|e^{2π²σ²Δ(η−ξ̄)}`: `|η̂_s − ξ0| ≤ 2Δ|q|`
/// whenever `|q| ≤ 1/2`. This form holds without restriction on `η`.
pub fn attraction_bound_check_q(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    t: f64,
    eta: f64,
) -> Result<AttractionCheck> {
    let premise = q(m, w, t, eta).norm();
    attraction(m, w, t, eta, premise)
}

/// Circle through `ξ0`, `ξ1` and `ξ̄ + iδ tan(θ/2)`, `δ = Δ/2`.
pub fn arc_circle(m: &TwoHarmonicModel, theta: f64) -> Result<(Complex64, f64)> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
        });
    }
    let d = 0.5 * m.delta;
    let h = d * (0.5 * theta).tan();
    let yc = (h * h - d * d) / (2.0 * h);
    Ok((Complex64::new(m.xibar(), yc), (d * d + yc * yc).sqrt()))
}

/// Window constants for the reassignment stability bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReassignConstants {
    /// STFT bound at `|t − t*| = T`, divided by `ε`.
    pub c_h: f64,
    /// The same bound for the window `Dh`, divided by `ε`.
    pub c_dh: f64,
}

/// `C_h` from the printed STFT bound and `C_Dh` from the moment form with
/// `∫|x|^k |Dh(x)| dx`, both at the horizon `T`.
pub fn reassign_constants(
    signal: &AhmSignal,
    w: &GaussianWindow,
    t_star: f64,
    horizon: f64,
) -> Result<ReassignConstants> {
    crate::error::positive("epsilon", signal.epsilon)?;
    crate::error::positive("horizon", horizon)?;
    let t = t_star + horizon;
    let c_h = ahm_stft_error_bound(signal, w, t, t_star)? / signal.epsilon;
    let moments = [0, 1, 2, 3].map(|k| w.dh_abs_moment(k));
    let c_dh = ahm_error_bound_moments(signal, moments, t, t_star)? / signal.epsilon;
    Ok(ReassignConstants { c_h, c_dh })
}

/// `ε0 = min(1, (|a0|/(2C_h))^{1/(1−β)})`, the largest `ε` the bound is proved for.
pub fn reassign_epsilon0(a0: f64, c_h: f64, beta: f64) -> f64 {
    1f64.min((a0.abs() / (2.0 * c_h)).powf(1.0 / (1.0 - beta)))
}

/// `C_η̂ ε^{1−2β}` with `C_η̂ = (C_Dh + (1+|a|)(√2/σ)e^{−1/2} C_h)/(π|a0|)`.
pub fn ahm_reassign_error_bound(
    signal: &AhmSignal,
    w: &GaussianWindow,
    t_star: f64,
    beta: f64,
    c_h: f64,
    c_dh: f64,
) -> Result<f64> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::Domain {
            what: "beta",
            value: beta,
        });
    }
    let (c0, c1) = signal.require_two()?;
    let a0 = (c0.amplitude)(t_star);
    if a0 == 0.0 {
        return Err(Error::DegenerateAmplitude);
    }
    let a = (c1.amplitude)(t_star) / a0;
    let sup_dh = 2f64.sqrt() / w.sigma * (-0.5f64).exp();
    let c_eta = (c_dh + (1.0 + a.abs()) * sup_dh * c_h) / (PI * a0.abs());
    Ok(c_eta * signal.epsilon.powf(1.0 - 2.0 * beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gabor::stft_closed_form;
    use crate::model::{freeze_ahm, AhmComponent};
    use crate::quad::linspace;
    use approx::assert_relative_eq;

    fn win() -> GaussianWindow {
        GaussianWindow::new(2f64.sqrt()).unwrap()
    }

    fn val(e: EtaS) -> Complex64 {
        e.value().expect("defined")
    }

    #[test]
    fn single_component_is_fixed() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 0.0).unwrap();
        for (t, e) in [(0.0, -3.0), (1.3, 1.0), (7.0, 40.0)] {
            assert_eq!(val(eta_s(&m, &w, t, e)), Complex64::new(1.0, 0.0));
            assert_eq!(eta_p(&m, &w, t, e).unwrap(), 1.0);
        }
    }

    #[test]
    fn far_tail_goes_to_xi1() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        for e in [10.0, 100.0, 1e4] {
            let v = val(eta_s(&m, &w, 0.4, e));
            assert!((v - 1.3).norm() < 1e-12, "{v}");
        }
        let v = val(eta_s(&m, &w, 0.4, -1e4));
        assert!((v - 1.0).norm() < 1e-12);
    }

    #[test]
    fn matches_finite_difference() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let h = 1e-6;
        for (t, e) in [(0.2, 0.9), (0.9, 1.15), (2.4, 1.4), (4.1, 1.05)] {
            let v = |s: f64| stft_closed_form(&m, &w, s, e);
            let fd = (v(t + h) - v(t - h)) / (2.0 * h * v(t)) / Complex64::new(0.0, 2.0 * PI);
            let an = val(eta_s(&m, &w, t, e));
            assert!((fd - an).norm() <= 1e-6 * an.norm(), "{fd} vs {an}");
        }
    }

    #[test]
    fn sentinel_at_zero() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let eta = m.xibar() - m.a.ln() / (2.0 * w.c() * m.delta);
        assert_eq!(eta_s(&m, &w, m.destructive_time(0), eta), EtaS::AtZero);
        assert!(matches!(
            eta_p(&m, &w, m.destructive_time(0), eta),
            Err(Error::PhaseUndefined { .. })
        ));
    }

    #[test]
    fn imaginary_part_identities() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.15, 1.0).unwrap();
        for t in linspace(0.0, 7.0, 29) {
            for e in linspace(0.6, 1.6, 21) {
                if let EtaS::Value(v) = eta_s(&m, &w, t, e) {
                    assert_eq!(eta_p(&m, &w, t, e).unwrap(), v.re);
                    assert!((v.im - extra_term(&m, &w, t, e)).abs() < 1e-10);
                }
            }
        }
        for k in -2..3 {
            for e in linspace(0.0, 2.0, 41) {
                let v = val(eta_s(&m, &w, m.constructive_time(k), e));
                assert!(v.im.abs() < 1e-12);
                if let EtaS::Value(v) = eta_s(&m, &w, m.destructive_time(k), e) {
                    assert!(v.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mobius_examples() {
        let mp = MobiusMap::new(1.0, 1.15).unwrap();
        let f = |z: Complex64| match mp.apply(Extended::Finite(z)) {
            Extended::Finite(v) => v,
            Extended::Infinity => panic!("unexpected infinity"),
        };
        assert_eq!(f(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
        assert!((f(Complex64::new(1.0, 0.0)) - 1.075).norm() < 1e-15);
        let v = f(Complex64::from_polar(1.0, PI / 2.0));
        assert!((v - Complex64::new(1.075, 0.075)).norm() < 1e-14);
        assert_eq!(
            mp.apply(Extended::Finite(Complex64::new(-1.0, 0.0))),
            Extended::Infinity
        );
        assert_eq!(
            mp.apply(Extended::Infinity),
            Extended::Finite(Complex64::new(1.15, 0.0))
        );
        assert!(MobiusMap::new(1.0, 1.0).is_err());
    }

    #[test]
    fn composition_law() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let mp = MobiusMap::for_model(&m);
        for t in linspace(0.0, 5.0, 23) {
            for e in linspace(0.5, 1.8, 27) {
                let s = val(eta_s(&m, &w, t, e));
                let Extended::Finite(viaq) = mp.apply(Extended::Finite(q(&m, &w, t, e))) else {
                    panic!()
                };
                let direct = val(eta_s_direct(&m, &w, t, e));
                assert!((s - viaq).norm() <= 1e-14 * s.norm());
                assert!((s - direct).norm() <= 1e-12 * s.norm());
            }
        }
    }

    #[test]
    fn ranges_at_special_times() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.15, 1.0).unwrap();
        let etas = linspace(-1.0, 3.0, 4001);
        let mut prev = f64::NEG_INFINITY;
        for &e in &etas {
            let v = val(eta_s(&m, &w, m.constructive_time(0), e)).re;
            assert!(v >= m.xi0 && v <= m.xi1());
            assert!(v >= prev);
            prev = v;
        }
        // Strict increase where the map is not saturated.
        for e in linspace(0.8, 1.35, 200).windows(2) {
            let a = val(eta_s(&m, &w, 0.0, e[0])).re;
            let b = val(eta_s(&m, &w, 0.0, e[1])).re;
            assert!(b > a);
        }
        for &e in &etas {
            if let EtaS::Value(v) = eta_s(&m, &w, m.destructive_time(0), e) {
                assert!(v.re <= m.xi0 || v.re >= m.xi1());
            }
        }
    }

    #[test]
    fn attraction_examples() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.15, 1.0).unwrap();
        // At η = ξ0 the premise is e^{−π²σ²Δ²/2} ≈ 0.80 > 1/2.
        assert!(matches!(
            attraction_bound_check(&m, &w, 0.0, 1.0),
            Err(Error::NotApplicable(_))
        ));
        for t in linspace(0.0, 1.0 / 0.15, 60) {
            let c = attraction_bound_check(&m, &w, t, 0.8).unwrap();
            assert!(c.holds, "{c:?}");
        }
        let tiny = m.with_a(1e-9);
        let c = attraction_bound_check(&tiny, &w, 0.3, 1.0).unwrap();
        assert!(c.bound < 1e-9 && c.actual < 1e-9 && c.holds);
    }

    #[test]
    fn attraction_stated_form_fails_above_midpoint() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.15, 0.01).unwrap();
        // Premise exactly 1/2 with η well above ξ̄, at a destructive time.
        let eta = m.xibar() + 49.9f64.ln() / (w.c() * m.delta);
        let c = attraction_bound_check(&m, &w, m.destructive_time(0), eta).unwrap();
        assert!(!c.holds, "{c:?}");
        // The |q| form is not applicable there and holds wherever it is.
        assert!(attraction_bound_check_q(&m, &w, m.destructive_time(0), eta).is_err());
        for t in linspace(0.0, 1.0 / 0.15, 40) {
            for e in linspace(0.0, 2.0, 41) {
                if let Ok(c) = attraction_bound_check_q(&m.with_a(1.3), &w, t, e) {
                    assert!(c.holds);
                }
            }
        }
    }

    #[test]
    fn arc_examples() {
        let m = TwoHarmonicModel::new(1.0, 0.15, 1.0).unwrap();
        let (c, r) = arc_circle(&m, PI / 2.0).unwrap();
        assert!((c - Complex64::new(1.075, 0.0)).norm() < 1e-14);
        assert_relative_eq!(r, 0.075, epsilon = 1e-14);
        // The circumradius is δ/sin θ, so it grows like δ/θ as θ → 0.
        for theta in [0.01, 0.3, 1.0, 2.5] {
            assert_relative_eq!(
                arc_circle(&m, theta).unwrap().1,
                0.075 / theta.sin(),
                max_relative = 1e-12
            );
        }
        assert!(arc_circle(&m, 0.01).unwrap().1 > 49.0 * 0.15);
        assert!(arc_circle(&m, 0.0).is_err());
        assert!(arc_circle(&m, PI).is_err());
        let mp = MobiusMap::for_model(&m);
        for theta in [0.5, 1.0, 2.0] {
            let (c, r) = arc_circle(&m, theta).unwrap();
            for k in 0..=20 {
                let rr = 10f64.powf(-1.0 + 0.1 * k as f64);
                let Extended::Finite(p) =
                    mp.apply(Extended::Finite(Complex64::from_polar(rr, theta)))
                else {
                    panic!()
                };
                assert!(((p - c).norm() - r).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn phase_field_is_real() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let g = TfGrid::new(0.0, 7.0, 71, 0.5, 1.8, 66).unwrap();
        let p = ReassignField::fill(&m, &w, g, ReassignMode::Phase);
        let s = ReassignField::fill(&m, &w, g, ReassignMode::Sync);
        for (a, b) in p.values.iter().zip(&s.values) {
            match (a, b) {
                (EtaS::Value(x), EtaS::Value(y)) => {
                    assert_eq!(x.im, 0.0);
                    assert_eq!(x.re, y.re);
                }
                (EtaS::AtZero, EtaS::AtZero) => {}
                _ => panic!("sentinel mismatch"),
            }
        }
    }

    #[test]
    fn numeric_rule_matches_closed_form() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let q = QuadratureSpec::default();
        for (t, e) in [(0.3, 1.0), (1.2, 1.25)] {
            let n = val(eta_s_numeric(&m, &w, t, e, &q).unwrap());
            let c = val(eta_s(&m, &w, t, e));
            assert!((n - c).norm() < 1e-7, "{n} vs {c}");
        }
    }

    fn chirp(eps: f64) -> AhmSignal {
        AhmSignal::new(
            vec![
                AhmComponent::harmonic(1.0, 1.0),
                AhmComponent::new(
                    |_| 1.1,
                    |t| 1.25 * t + 5e-4 * t * t,
                    |t| 1.25 + 1e-3 * t,
                    1e-3,
                ),
            ],
            eps,
        )
        .unwrap()
    }

    #[test]
    fn ahm_bound_basics() {
        let w = win();
        let s = chirp(0.0);
        assert_eq!(
            ahm_reassign_error_bound(&s, &w, 0.0, 0.25, 3.0, 4.0).unwrap(),
            0.0
        );
        let s = chirp(1e-3);
        assert!(matches!(
            ahm_reassign_error_bound(&s, &w, 0.0, 0.5, 1.0, 1.0),
            Err(Error::Domain { .. })
        ));
        let b = ahm_reassign_error_bound(&s, &w, 0.0, 0.25, 2.0, 3.0).unwrap();
        let sup = 2f64.sqrt() / w.sigma * (-0.5f64).exp();
        let expect = (3.0 + 2.1 * sup * 2.0) / PI * 1e-3f64.sqrt();
        assert_relative_eq!(b, expect, max_relative = 1e-12);
    }

    #[test]
    fn harmonic_ahm_has_no_discrepancy() {
        let w = win();
        let m = TwoHarmonicModel::new(1.0, 0.3, 1.3).unwrap();
        let s = AhmSignal::from_two_harmonic(&m);
        let q = QuadratureSpec::default();
        let fr = freeze_ahm(&s, 0.0).unwrap();
        for (t, e) in [(0.3, 1.0), (1.2, 1.25)] {
            let f = val(eta_s_numeric(&s, &w, t, e, &q).unwrap());
            let l = val(eta_s(&fr.model, &w, t + fr.time_shift, e));
            assert!((f - l).norm() < 1e-7);
        }
    }

    #[test]
    fn ahm_bound_holds_for_mild_chirp() {
        let w = win();
        let eps = 1e-3;
        let beta = 0.25;
        let horizon = 2.0;
        let s = chirp(eps);
        let fr = freeze_ahm(&s, 0.0).unwrap();
        let k = reassign_constants(&s, &w, 0.0, horizon).unwrap();
        assert!(eps <= reassign_epsilon0(1.0, k.c_h, beta));
        let bound = ahm_reassign_error_bound(&s, &w, 0.0, beta, k.c_h, k.c_dh).unwrap();
        let q = QuadratureSpec::default();
        let mut tested = 0;
        for t in linspace(-horizon, horizon, 9) {
            for e in linspace(0.8, 1.5, 15) {
                let tl = t + fr.time_shift;
                if stft_closed_form(&fr.model, &w, tl, e).norm() < eps.powf(beta) {
                    continue;
                }
                let f = val(eta_s_numeric(&s, &w, t, e, &q).unwrap());
                let l = val(eta_s(&fr.model, &w, tl, e));
                assert!(
                    (f - l).norm() <= bound,
                    "({t}, {e}): {} > {bound}",
                    (f - l).norm()
                );
                tested += 1;
            }
        }
        assert!(tested > 50);
    }
}
