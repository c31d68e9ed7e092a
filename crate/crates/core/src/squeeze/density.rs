use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_indicator_r, SpecialTime, Weighting};
use crate::error::{positive, Error, Result};
use crate::gabor::stft_closed_form;
use crate::model::{cis, GaussianWindow, TwoHarmonicModel};

/// How an asymptotic value should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymTag {
    /// Leading term on the interior of the support.
    Interior,
    /// Off the support: the true value is exponentially small in 1/α.
    OffSupport,
    /// ξ lies within `1e-3·Δ` of ξ0 or ξ1; the value is taken at that standoff.
    NearSingularity,
    /// The amplitude ratio is outside the regime the limit is meant for.
    OutsideRegime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymValue {
    pub value: Complex64,
    pub tag: AsymTag,
}

/// `S_{f0} = e^{2πiξ0t} e^{−(ξ0−ξ)²/α} / (πσ√α)`.
pub fn single_component_f0(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    alpha: f64,
    t: f64,
    xi: f64,
) -> Complex64 {
    cis(2.0 * PI * m.xi0 * t)
        * ((-(m.xi0 - xi).powi(2) / alpha).exp() / (PI * w.sigma * alpha.sqrt()))
}

/// `S_{f1} = a e^{2πiξ1t} e^{−(ξ1−ξ)²/α} / (πσ√α)`.
pub fn single_component_f1(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    alpha: f64,
    t: f64,
    xi: f64,
) -> Complex64 {
    let xi1 = m.xi1();
    cis(2.0 * PI * xi1 * t)
        * (m.a * (-(xi1 - xi).powi(2) / alpha).exp() / (PI * w.sigma * alpha.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeRegime {
    /// `S ≈ S_{f0}` with an O(a) remainder.
    SmallA,
    /// `S ≈ S_{f1}` with an O(1/a) remainder.
    LargeA,
}

/// Single-component limit of the squeezed transform for very unbalanced
/// amplitudes. Tagged `OutsideRegime` when `a > 0.2` (small) or `a < 5` (large).
pub fn sst_extreme_amplitude(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    alpha: f64,
    t: f64,
    xi: f64,
    regime: AmplitudeRegime,
) -> AsymValue {
    let (value, ok) = match regime {
        AmplitudeRegime::SmallA => (single_component_f0(m, w, alpha, t, xi), m.a <= 0.2),
        AmplitudeRegime::LargeA => (single_component_f1(m, w, alpha, t, xi), m.a >= 5.0),
    };
    AsymValue {
        value,
        tag: if ok {
            AsymTag::Interior
        } else {
            AsymTag::OutsideRegime
        },
    }
}

/// Whether ξ is in the support of the pushforward at the given time.
fn in_support(m: &TwoHarmonicModel, time: SpecialTime, xi: f64) -> Result<bool> {
    match time {
        SpecialTime::Constructive(_) => Ok(xi > m.xi0 && xi < m.xi1()),
        SpecialTime::Destructive(_) => Ok(xi < m.xi0 || xi > m.xi1()),
        SpecialTime::Intermediate(_) => Err(Error::NotApplicable(
            "pushforward densities are stated at constructive and destructive times only".into(),
        )),
    }
}

fn require_pair(m: &TwoHarmonicModel) -> Result<()> {
    if m.a > 0.0 {
        Ok(())
    } else {
        Err(Error::NotApplicable(
            "a = 0 pushes all mass to ξ0; there is no density".into(),
        ))
    }
}

/// The unique η with `η̂_s(t_k^±, η) = ξ` on the support, and `|∂_η η̂_s|` there.
fn preimage_point(m: &TwoHarmonicModel, w: &GaussianWindow, xi: f64) -> (f64, f64) {
    let u = ((xi - m.xi0) / (m.xi1() - xi)).abs();
    let c = w.c();
    let eta = m.xibar() + (u.ln() - m.a.ln()) / (2.0 * c * m.delta);
    let slope = 2.0 * c * ((xi - m.xi0) * (xi - m.xi1())).abs();
    (eta, slope)
}

/// `Θ_{G,t}(ξ) = G(t,η*)/|∂_η η̂_s(t,η*)|` at `t = t_k^±`, zero off the support.
/// For `G = 1` this is `1/(2π²σ²|ξ−ξ0||ξ−ξ1|)`.
pub fn pushforward_density(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    weighting: Weighting,
    time: SpecialTime,
    xi: f64,
) -> Result<Complex64> {
    require_pair(m)?;
    if xi == m.xi0 || xi == m.xi1() {
        return Err(Error::Singularity { xi });
    }
    if !in_support(m, time, xi)? {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (eta, slope) = preimage_point(m, w, xi);
    let g = match weighting {
        Weighting::Stft => stft_closed_form(m, w, time.t(m), eta),
        Weighting::Indicator { r } => Complex64::new(if eta.abs() <= r { 1.0 } else { 0.0 }, 0.0),
    };
    Ok(g / slope)
}

/// Moves ξ out to `1e-3·Δ` from the nearer singular frequency, staying on its side
/// (or stepping into the support when ξ sits exactly on ξ0 or ξ1).
fn standoff(m: &TwoHarmonicModel, time: SpecialTime, xi: f64) -> Option<f64> {
    let gap = 1e-3 * m.delta;
    let xi1 = m.xi1();
    let (near, dist) = if (xi - m.xi0).abs() <= (xi - xi1).abs() {
        (m.xi0, xi - m.xi0)
    } else {
        (xi1, xi - xi1)
    };
    if dist.abs() >= gap {
        return None;
    }
    let side = if dist != 0.0 {
        dist.signum()
    } else {
        let inward = if near == m.xi0 { 1.0 } else { -1.0 };
        match time {
            SpecialTime::Destructive(_) => -inward,
            _ => inward,
        }
    };
    Some(near + side * gap)
}

fn tagged(
    m: &TwoHarmonicModel,
    time: SpecialTime,
    xi: f64,
    eval: impl Fn(f64) -> Result<Complex64>,
) -> Result<AsymValue> {
    if let Some(x) = standoff(m, time, xi) {
        return Ok(AsymValue {
            value: eval(x)?,
            tag: AsymTag::NearSingularity,
        });
    }
    let tag = if in_support(m, time, xi)? {
        AsymTag::Interior
    } else {
        AsymTag::OffSupport
    };
    Ok(AsymValue {
        value: eval(xi)?,
        tag,
    })
}

/// Small-α limit of the indicator-weighted squeezed transform at `t_k^±`.
pub fn asym_indicator(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    alpha: f64,
    r: f64,
    time: SpecialTime,
    xi: f64,
) -> Result<AsymValue> {
    positive("alpha", alpha)?;
    check_indicator_r(m, w, r)?;
    require_pair(m)?;
    tagged(m, time, xi, |x| {
        pushforward_density(m, w, Weighting::Indicator { r }, time, x)
    })
}

/// `A_+(ξ) = (1−u*) e^{−CΔ²/4} (−a/u*)^{1/2} exp(−[ln(−u*/a)]²/(4CΔ²))`,
/// `u* = (ξ−ξ0)/(ξ−ξ1)`, real for ξ in (ξ0, ξ1).
pub fn a_plus(m: &TwoHarmonicModel, w: &GaussianWindow, xi: f64) -> Result<f64> {
    let us = (xi - m.xi0) / (xi - m.xi1());
    if !(-us > 0.0) || !us.is_finite() {
        return Err(Error::OutOfBranch {
            which: "A_+",
            value: -us,
        });
    }
    let cd2 = w.c() * m.delta * m.delta;
    let l = (-us / m.a).ln();
    Ok((1.0 - us) * (-cd2 / 4.0).exp() * (-m.a / us).sqrt() * (-l * l / (4.0 * cd2)).exp())
}

/// `A_−(ξ) = |1−u*| e^{−CΔ²/4} (a/u*)^{1/2} exp(−[ln(u*/a)]²/(4CΔ²))`,
/// real for ξ outside [ξ0, ξ1].
pub fn a_minus(m: &TwoHarmonicModel, w: &GaussianWindow, xi: f64) -> Result<f64> {
    let us = (xi - m.xi0) / (xi - m.xi1());
    if !(us > 0.0) || !us.is_finite() {
        return Err(Error::OutOfBranch {
            which: "A_-",
            value: us,
        });
    }
    let cd2 = w.c() * m.delta * m.delta;
    let l = (us / m.a).ln();
    Ok((1.0 - us).abs() * (-cd2 / 4.0).exp() * (m.a / us).sqrt() * (-l * l / (4.0 * cd2)).exp())
}

/// The STFT-weighted density exactly as displayed with `A_±`:
/// `±e^{2πiξ0t} A_±/(2π²σ²(ξ−ξ0)(ξ−ξ1))`. Its sign disagrees with
/// `V(t,η*)/|∂_η η̂_s|` on (ξ0, ξ1) at `t_k^+` and below ξ0 at `t_k^-`;
/// kept for comparison only.
pub fn theta_stft_printed(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    time: SpecialTime,
    xi: f64,
) -> Result<Complex64> {
    require_pair(m)?;
    let phase = cis(2.0 * PI * m.xi0 * time.t(m));
    let den = 2.0 * w.c() * (xi - m.xi0) * (xi - m.xi1());
    match time {
        SpecialTime::Constructive(_) => Ok(phase * (a_plus(m, w, xi)? / den)),
        SpecialTime::Destructive(_) => Ok(-phase * (a_minus(m, w, xi)? / den)),
        SpecialTime::Intermediate(_) => in_support(m, time, xi).map(|_| Complex64::default()),
    }
}

/// STFT-weighted density from the `A_±` forms with the sign fixed so that it
/// equals `V(t,η*)/|∂_η η̂_s(t,η*)|`.
fn theta_stft(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    time: SpecialTime,
    xi: f64,
) -> Result<Complex64> {
    if !in_support(m, time, xi)? {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let phase = cis(2.0 * PI * m.xi0 * time.t(m));
    let slope = 2.0 * w.c() * ((xi - m.xi0) * (xi - m.xi1())).abs();
    match time {
        SpecialTime::Constructive(_) => Ok(phase * (a_plus(m, w, xi)? / slope)),
        _ => {
            // V(t_k^-, η*) carries (1 − u*), negative above ξ1.
            let us = (xi - m.xi0) / (xi - m.xi1());
            Ok(phase * ((1.0 - us).signum() * a_minus(m, w, xi)? / slope))
        }
    }
}

/// Small-α limit of the STFT-weighted squeezed transform at `t_k^±`.
pub fn asym_sst(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    alpha: f64,
    time: SpecialTime,
    xi: f64,
) -> Result<AsymValue> {
    positive("alpha", alpha)?;
    require_pair(m)?;
    tagged(m, time, xi, |x| theta_stft(m, w, time, x))
}

/// Indicator half-width `R(α) = min(1/α, e^{c_Ξ/(2α)})` with
/// `c_Ξ = min over ξ of min((ξ−ξ0)², (ξ−ξ1)²)`, for ξ inside (ξ0, ξ1).
pub fn default_indicator_r(m: &TwoHarmonicModel, alpha: f64, xis: &[f64]) -> Result<f64> {
    positive("alpha", alpha)?;
    let mut c = f64::INFINITY;
    for &xi in xis {
        if !(xi > m.xi0 && xi < m.xi1()) {
            return Err(Error::Domain {
                what: "xi (must lie strictly between xi0 and xi1)",
                value: xi,
            });
        }
        c = c.min((xi - m.xi0).powi(2).min((xi - m.xi1()).powi(2)));
    }
    if !c.is_finite() {
        return Err(Error::InvalidParameter {
            name: "xis",
            reason: "empty frequency set".into(),
        });
    }
    Ok((1.0 / alpha).min((c / (2.0 * alpha)).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(a: f64, delta: f64) -> (TwoHarmonicModel, GaussianWindow) {
        (
            TwoHarmonicModel::new(1.0, delta, a).unwrap(),
            GaussianWindow::new(2f64.sqrt()).unwrap(),
        )
    }

    #[test]
    fn indicator_density_center_value() {
        let (m, w) = setup(1.0, 0.3);
        let v = pushforward_density(
            &m,
            &w,
            Weighting::Indicator { r: 50.0 },
            SpecialTime::Constructive(0),
            m.xibar(),
        )
        .unwrap();
        let expect = 1.0 / (2.0 * PI * PI * 2.0 * 0.15f64.powi(2));
        assert!((v.re - expect).abs() < 1e-12 && v.im == 0.0);
        assert!((expect - 1.1258).abs() < 1e-4);
    }

    #[test]
    fn density_support_and_singularity() {
        let (m, w) = setup(1.0, 0.3);
        let g = Weighting::Indicator { r: 50.0 };
        let plus = SpecialTime::Constructive(0);
        let minus = SpecialTime::Destructive(0);
        assert_eq!(
            pushforward_density(&m, &w, g, plus, m.xi1() + 0.1)
                .unwrap()
                .norm(),
            0.0
        );
        assert_eq!(
            pushforward_density(&m, &w, g, minus, m.xibar())
                .unwrap()
                .norm(),
            0.0
        );
        assert!(
            pushforward_density(&m, &w, g, minus, m.xi1() + 0.1)
                .unwrap()
                .norm()
                > 0.0
        );
        assert!(matches!(
            pushforward_density(&m, &w, g, plus, m.xi0),
            Err(Error::Singularity { .. })
        ));
        assert!(pushforward_density(&m, &w, g, SpecialTime::Intermediate(0), 1.1).is_err());
    }

    #[test]
    fn indicator_density_is_symmetric_for_balanced_amplitudes() {
        let (m, w) = setup(1.0, 0.3);
        let g = Weighting::Indicator { r: 50.0 };
        for x in [0.01, 0.05, 0.1, 0.14] {
            let l = pushforward_density(&m, &w, g, SpecialTime::Constructive(0), m.xibar() - x)
                .unwrap();
            let r = pushforward_density(&m, &w, g, SpecialTime::Constructive(0), m.xibar() + x)
                .unwrap();
            assert!((l - r).norm() < 1e-12 * l.norm());
        }
    }

    #[test]
    fn a_forms_match_definition_up_to_sign() {
        for (a, delta) in [(1.0, 0.3), (1.3, 0.3), (0.5, 0.15)] {
            let (m, w) = setup(a, delta);
            for time in [SpecialTime::Constructive(1), SpecialTime::Destructive(0)] {
                let xs: Vec<f64> = match time {
                    SpecialTime::Constructive(_) => vec![0.2, 0.5, 0.8],
                    _ => vec![-0.3, -0.05, 1.05, 1.4],
                };
                for f in xs {
                    let xi = m.xi0 + f * delta;
                    let direct = pushforward_density(&m, &w, Weighting::Stft, time, xi).unwrap();
                    let asym = asym_sst(&m, &w, 1e-5, time, xi).unwrap();
                    assert_eq!(asym.tag, AsymTag::Interior);
                    assert!(
                        (direct - asym.value).norm() <= 1e-12 * direct.norm(),
                        "{a} {xi}"
                    );
                    let printed = theta_stft_printed(&m, &w, time, xi).unwrap();
                    assert!((printed.norm() - direct.norm()).abs() <= 1e-12 * direct.norm());
                }
            }
        }
    }

    #[test]
    fn printed_sign_is_flipped_on_constructive_support() {
        let (m, w) = setup(1.0, 0.3);
        let time = SpecialTime::Constructive(0);
        let direct = pushforward_density(&m, &w, Weighting::Stft, time, 1.1).unwrap();
        let printed = theta_stft_printed(&m, &w, time, 1.1).unwrap();
        assert!(direct.re > 0.0);
        assert!((printed + direct).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn a_plus_at_center() {
        let (m, w) = setup(1.0, 0.3);
        let ap = a_plus(&m, &w, m.xibar()).unwrap();
        let cd2 = w.c() * 0.09;
        assert!((ap - 2.0 * (-cd2 / 4.0).exp()).abs() < 1e-14);
        let theta1 = 1.0 / (2.0 * w.c() * 0.15f64.powi(2));
        let v = asym_sst(&m, &w, 1e-5, SpecialTime::Constructive(0), m.xibar()).unwrap();
        assert!((v.value.norm() - theta1 * ap).abs() < 1e-12);
        assert!(a_plus(&m, &w, 0.9).is_err());
        assert!(a_minus(&m, &w, 1.1).is_err());
    }

    #[test]
    fn standoff_tags() {
        let (m, w) = setup(1.0, 0.3);
        let v = asym_indicator(&m, &w, 1e-5, 50.0, SpecialTime::Constructive(0), m.xi0).unwrap();
        assert_eq!(v.tag, AsymTag::NearSingularity);
        assert!(v.value.norm().is_finite() && v.value.norm() > 0.0);
        let off = asym_indicator(&m, &w, 1e-5, 50.0, SpecialTime::Constructive(0), 0.8).unwrap();
        assert_eq!(off.tag, AsymTag::OffSupport);
        assert_eq!(off.value.norm(), 0.0);
        let near = asym_sst(&m, &w, 1e-5, SpecialTime::Destructive(0), m.xi1() + 1e-5).unwrap();
        assert_eq!(near.tag, AsymTag::NearSingularity);
    }

    #[test]
    fn extreme_amplitude_limits() {
        let (m, w) = setup(0.0, 0.3);
        let v = sst_extreme_amplitude(&m, &w, 1e-3, 0.4, 1.0, AmplitudeRegime::SmallA);
        assert_eq!(v.tag, AsymTag::Interior);
        assert!((v.value.norm() - 1.0 / (PI * w.sigma * 1e-3f64.sqrt())).abs() < 1e-10);
        let (m, _) = setup(20.0, 0.3);
        let v = sst_extreme_amplitude(&m, &w, 1e-3, 0.4, m.xi1(), AmplitudeRegime::LargeA);
        assert!((v.value.norm() - 20.0 / (PI * w.sigma * 1e-3f64.sqrt())).abs() < 1e-9);
        let v = sst_extreme_amplitude(&m, &w, 1e-3, 0.4, 1.0, AmplitudeRegime::SmallA);
        assert_eq!(v.tag, AsymTag::OutsideRegime);
    }

    #[test]
    fn default_r() {
        let (m, _) = setup(1.0, 0.3);
        let r = default_indicator_r(&m, 1e-3, &[1.1, 1.15]).unwrap();
        assert!((r - 5f64.exp()).abs() < 1e-9);
        let r = default_indicator_r(&m, 1e-3, &[1.15]).unwrap();
        assert!((r - 1000.0).abs() < 1e-9);
        let r = default_indicator_r(&m, 0.1, &[1.1]).unwrap();
        assert!((r - (0.01f64 / 0.2).exp()).abs() < 1e-12);
        assert!(default_indicator_r(&m, 1e-3, &[0.9]).is_err());
    }
}
