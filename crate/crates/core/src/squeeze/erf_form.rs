use std::f64::consts::PI;

use statrs::function::erf::erf;

use super::preimage::Segment;
use super::SpecialTime;
use crate::error::{positive, Error, Result};
use crate::model::{GaussianWindow, TwoHarmonicModel};

/// `γ(ξ) = ξ̄ + ln(∓a⁻¹(1 + Δ/(ξ−ξ1 ± C√α)))/(2π²σ²Δ)`; the outer sign is
/// `−` at constructive and `+` at destructive times, `shift = ±C√α`.
fn gamma(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    time: SpecialTime,
    shift: f64,
    xi: f64,
    which: &'static str,
) -> Result<f64> {
    let sign = match time {
        SpecialTime::Constructive(_) => -1.0,
        SpecialTime::Destructive(_) => 1.0,
        SpecialTime::Intermediate(_) => {
            return Err(Error::NotApplicable(
                "erf forms are stated at constructive and destructive times".into(),
            ))
        }
    };
    let arg = sign / m.a * (1.0 + m.delta / (xi - m.xi1() + shift));
    if !(arg > 0.0) || !arg.is_finite() {
        return Err(Error::OutOfBranch { which, value: arg });
    }
    Ok(m.xibar() + arg.ln() / (2.0 * w.c() * m.delta))
}

/// `(γ_1(ξ), γ_2(ξ))` with `C = Δ/(4√α)`, i.e. shifts `±Δ/4`.
pub fn gamma_pair(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    time: SpecialTime,
    xi: f64,
) -> Result<(f64, f64)> {
    let cs = m.delta / 4.0;
    Ok((
        gamma(m, w, time, cs, xi, "gamma_1")?,
        gamma(m, w, time, -cs, xi, "gamma_2")?,
    ))
}

/// Piecewise erf approximation of `|S(t_k^±, ξ)|` for the STFT weight with
/// `C = Δ/(4√α)`: the bracketed erf combination times `1/(2πσ√α)`.
pub fn erf_closed_form(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    alpha: f64,
    time: SpecialTime,
    xi: f64,
) -> Result<f64> {
    erf_closed_form_with_c(m, w, alpha, m.delta / (4.0 * alpha.sqrt()), time, xi)
}

/// As [`erf_closed_form`] with an explicit `0 < C ≤ Δ/(4√α)`, which makes the
/// I2 and I6 branches reachable.
pub fn erf_closed_form_with_c(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    alpha: f64,
    c: f64,
    time: SpecialTime,
    xi: f64,
) -> Result<f64> {
    positive("alpha", alpha)?;
    positive("C", c)?;
    if !(m.a > 0.0) {
        return Err(Error::NotApplicable("erf forms need a > 0".into()));
    }
    let limit = m.delta / (4.0 * alpha.sqrt());
    if c > limit * (1.0 + 1e-12) {
        return Err(Error::NotApplicable(format!(
            "C = {c} exceeds the admissible {limit}"
        )));
    }
    let cs = c * alpha.sqrt();
    let ps = PI * w.sigma;
    let a = m.a;
    let (x0, x1) = (m.xi0, m.xi1());
    let e = |g: f64| erf(ps * (g - x0)) + a * erf(ps * (g - x1));
    let g1 = || gamma(m, w, time, cs, xi, "gamma_1");
    let g2 = || gamma(m, w, time, -cs, xi, "gamma_2");
    use Segment::*;
    let bracket = match (time, Segment::of(m, cs, xi)) {
        (SpecialTime::Constructive(_), I1 | I7) => 0.0,
        (SpecialTime::Constructive(_), I2) => 1.0 + a + e(g1()?),
        (SpecialTime::Constructive(_), I6) => 1.0 + a - e(g2()?),
        (SpecialTime::Constructive(_), _) => e(g1()?) - e(g2()?),
        (SpecialTime::Destructive(_), I3 | I4 | I5) => 0.0,
        (SpecialTime::Destructive(_), I1 | I7) => e(g1()?) - e(g2()?),
        (SpecialTime::Destructive(_), I2) => 1.0 + a + e(g2()?),
        (SpecialTime::Destructive(_), I6) => 1.0 + a - e(g1()?),
        (SpecialTime::Intermediate(_), _) => {
            return Err(Error::NotApplicable(
                "erf forms are stated at constructive and destructive times".into(),
            ))
        }
    };
    Ok(bracket.abs() / (2.0 * PI * w.sigma * alpha.sqrt()))
}
