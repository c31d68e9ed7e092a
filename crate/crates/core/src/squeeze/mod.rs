//! Generalized synchrosqueezing: `S_G(t,ξ) = ∫ G(t,η) g_α(η̂(t,η) − ξ) dη`
//! with STFT or indicator weights, plus the small-α asymptotics at the
//! constructive and destructive times.

mod critical;
mod density;
mod erf_form;
mod preimage;
mod transform;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{positive, Error, Result};
use crate::model::{GaussianWindow, TwoHarmonicModel};
use crate::reassign::ReassignMode;

pub use critical::{critical_gap_sst, critical_gap_sst_numeric, h_profile, CriticalGapSst};
pub use density::{
    a_minus, a_plus, asym_indicator, asym_sst, default_indicator_r, pushforward_density,
    single_component_f0, single_component_f1, sst_extreme_amplitude, theta_stft_printed,
    AmplitudeRegime, AsymTag, AsymValue,
};
pub use erf_form::{erf_closed_form, erf_closed_form_with_c, gamma_pair};
pub use preimage::{preimage_intervals, PreimageIntervals, Segment};
pub use transform::{squeeze_cross_section, squeeze_transform, SqueezeField};

/// Weight `G` in the squeezed transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weighting {
    Stft,
    /// `G = 1` on `[−R, R]`.
    Indicator {
        r: f64,
    },
}

/// Mesh controls for the η-quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaQuadrature {
    pub base_panels: usize,
    /// Agreement required between a run and its doubled-resolution rerun.
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for EtaQuadrature {
    fn default() -> Self {
        Self {
            base_panels: 4096,
            rel_tol: 1e-8,
            max_doublings: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeConfig {
    pub alpha: f64,
    pub weighting: Weighting,
    pub quadrature: EtaQuadrature,
    pub mode: ReassignMode,
}

impl SqueezeConfig {
    pub fn stft(alpha: f64) -> Self {
        Self {
            alpha,
            weighting: Weighting::Stft,
            quadrature: EtaQuadrature::default(),
            mode: ReassignMode::Sync,
        }
    }

    pub fn indicator(alpha: f64, r: f64) -> Self {
        Self {
            weighting: Weighting::Indicator { r },
            ..Self::stft(alpha)
        }
    }

    pub fn validate(&self, m: &TwoHarmonicModel, w: &GaussianWindow) -> Result<()> {
        positive("alpha", self.alpha)?;
        if self.quadrature.base_panels < 16 {
            return Err(Error::InvalidParameter {
                name: "base_panels",
                reason: format!("need at least 16, got {}", self.quadrature.base_panels),
            });
        }
        positive("rel_tol", self.quadrature.rel_tol)?;
        if let Weighting::Indicator { r } = self.weighting {
            check_indicator_r(m, w, r)?;
        }
        Ok(())
    }
}

pub(crate) fn check_indicator_r(m: &TwoHarmonicModel, w: &GaussianWindow, r: f64) -> Result<()> {
    positive("R", r)?;
    let need = m.xi0.abs().max(m.xi1().abs()) + 3.0 / (PI * w.sigma);
    if r <= need {
        return Err(Error::InvalidParameter {
            name: "R",
            reason: format!("indicator half-width {r} must exceed {need}"),
        });
    }
    Ok(())
}

/// The interference times at which the asymptotics are stated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialTime {
    /// `t_k^+ = k/Δ`
    Constructive(i64),
    /// `t_k^- = (k+½)/Δ`
    Destructive(i64),
    /// `t_k^I = (k+¼)/Δ`
    Intermediate(i64),
}

impl SpecialTime {
    pub fn t(&self, m: &TwoHarmonicModel) -> f64 {
        match *self {
            SpecialTime::Constructive(k) => m.constructive_time(k),
            SpecialTime::Destructive(k) => m.destructive_time(k),
            SpecialTime::Intermediate(k) => m.intermediate_time(k),
        }
    }
}

/// `g_α(z) = (πα)^{−1/2} e^{−|z|²/α}`.
pub fn mollifier(alpha: f64, z: Complex64) -> f64 {
    (-z.norm_sqr() / alpha).exp() / (PI * alpha).sqrt()
}

/// `∫ g_α` over the real line, by adaptive Simpson on ±40√α (the rest is below 1e-300).
pub fn mollifier_mass(alpha: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    let s = alpha.sqrt();
    let f = |x: f64| mollifier(alpha, Complex64::new(x, 0.0));
    Ok(crate::quad::adaptive_simpson_panels(
        &f,
        -40.0 * s,
        40.0 * s,
        64,
        1e-14,
        30,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> (TwoHarmonicModel, GaussianWindow) {
        (
            TwoHarmonicModel::new(1.0, 0.3, 1.0).unwrap(),
            GaussianWindow::new(2f64.sqrt()).unwrap(),
        )
    }

    #[test]
    fn mollifier_has_unit_mass() {
        for alpha in [1e-6, 1e-4, 1e-2, 1.0] {
            assert!(
                (mollifier_mass(alpha).unwrap() - 1.0).abs() < 1e-10,
                "{alpha}"
            );
        }
    }

    #[test]
    fn mollifier_uses_modulus_for_complex_offsets() {
        let z = Complex64::new(0.01, 0.02);
        let expect = (-(0.0005) / 1e-3f64).exp() / (PI * 1e-3).sqrt();
        assert!((mollifier(1e-3, z) - expect).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let (m, w) = base();
        assert!(SqueezeConfig::stft(1e-4).validate(&m, &w).is_ok());
        assert!(SqueezeConfig::stft(0.0).validate(&m, &w).is_err());
        assert!(SqueezeConfig::indicator(1e-4, 50.0)
            .validate(&m, &w)
            .is_ok());
        // max|ξ| + 3/(πσ) = 1.3 + 0.675
        assert!(SqueezeConfig::indicator(1e-4, 1.9)
            .validate(&m, &w)
            .is_err());
        assert!(SqueezeConfig::indicator(1e-4, 2.0).validate(&m, &w).is_ok());
    }

    #[test]
    fn special_times() {
        let (m, _) = base();
        assert!((SpecialTime::Constructive(1).t(&m) - 1.0 / 0.3).abs() < 1e-12);
        assert!((SpecialTime::Destructive(0).t(&m) - 0.5 / 0.3).abs() < 1e-12);
        assert!((SpecialTime::Intermediate(0).t(&m) - 0.25 / 0.3).abs() < 1e-12);
    }
}
