use std::f64::consts::PI;

use super::SpecialTime;
use crate::error::{positive, Error, Result};
use crate::model::{GaussianWindow, TwoHarmonicModel};

/// The seven ξ-segments cut by `ξ0 ± C√α`, `ξ̄ ± C√α`, `ξ1 ± C√α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    I1,
    I2,
    I3,
    I4,
    I5,
    I6,
    I7,
}

impl Segment {
    /// Classifies ξ; the outer windows around ξ0 and ξ1 take precedence where
    /// segments would overlap (only possible when `C√α > Δ/4`).
    pub fn of(m: &TwoHarmonicModel, cs: f64, xi: f64) -> Segment {
        let (x0, x1, xb) = (m.xi0, m.xi1(), m.xibar());
        if xi <= x0 - cs {
            Segment::I1
        } else if xi < x0 + cs {
            Segment::I2
        } else if xi >= x1 + cs {
            Segment::I7
        } else if xi > x1 - cs {
            Segment::I6
        } else if xi <= xb - cs {
            Segment::I3
        } else if xi < xb + cs {
            Segment::I4
        } else {
            Segment::I5
        }
    }
}

/// `H = {η : |η̂_s(t,η) − ξ| < C√α}` as a union of η-intervals, with the
/// offsets from `η_AVG` that define the finite endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PreimageIntervals {
    pub segment: Segment,
    pub eta_avg: f64,
    pub c_l: Option<f64>,
    pub c_r: Option<f64>,
    pub c_star: Option<f64>,
    /// Disjoint, ordered; infinite ends are `±∞`.
    pub intervals: Vec<(f64, f64)>,
}

impl PreimageIntervals {
    pub fn contains(&self, eta: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| eta > a && eta < b)
    }
}

/// Closed-form preimage of the `C√α`-ball around ξ at `t_k^+`, `t_k^-` or `t_k^I`.
/// Requires `0 < C ≤ Δ/(4√α)` (or `≤ Δ/(2√α)` at `t_k^I`).
pub fn preimage_intervals(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    alpha: f64,
    c: f64,
    time: SpecialTime,
    xi: f64,
) -> Result<PreimageIntervals> {
    positive("alpha", alpha)?;
    positive("C", c)?;
    if !(m.a > 0.0) {
        return Err(Error::NotApplicable("preimages need a > 0".into()));
    }
    let limit = match time {
        SpecialTime::Intermediate(_) => m.delta / (2.0 * alpha.sqrt()),
        _ => m.delta / (4.0 * alpha.sqrt()),
    };
    if c > limit * (1.0 + 1e-12) {
        return Err(Error::NotApplicable(format!(
            "C = {c} exceeds the admissible {limit}"
        )));
    }
    let cs = c * alpha.sqrt();
    let scale = 1.0 / (2.0 * PI * PI * w.sigma * w.sigma * m.delta);
    let eta_avg = m.xibar() - m.a.ln() * scale;
    let seg = Segment::of(m, cs, xi);
    let d = xi - m.xi1();
    let dl = m.delta;
    let mut out = PreimageIntervals {
        segment: seg,
        eta_avg,
        c_l: None,
        c_r: None,
        c_star: None,
        intervals: Vec::new(),
    };
    let ninf = f64::NEG_INFINITY;
    let inf = f64::INFINITY;
    use Segment::*;
    match time {
        SpecialTime::Constructive(_) => {
            let c_r = || scale * (-1.0 - dl / (d + cs)).ln();
            let c_l = || scale * (-1.0 - dl / (d - cs)).ln();
            match seg {
                I1 | I7 => {}
                I2 => {
                    let r = c_r();
                    out.c_r = Some(r);
                    out.intervals.push((ninf, eta_avg + r));
                }
                I3 | I4 | I5 => {
                    let (l, r) = (c_l(), c_r());
                    out.c_l = Some(l);
                    out.c_r = Some(r);
                    out.intervals.push((eta_avg + l, eta_avg + r));
                }
                I6 => {
                    let l = c_l();
                    out.c_l = Some(l);
                    out.intervals.push((eta_avg + l, inf));
                }
            }
        }
        SpecialTime::Destructive(_) => {
            let c_l = || scale * (1.0 + dl / (d + cs)).ln();
            let c_r = || scale * (1.0 + dl / (d - cs)).ln();
            match seg {
                I3 | I4 | I5 => {}
                I1 | I7 => {
                    let (l, r) = (c_l(), c_r());
                    out.c_l = Some(l);
                    out.c_r = Some(r);
                    out.intervals.push((eta_avg + l, eta_avg + r));
                }
                I2 => {
                    let r = c_r();
                    out.c_r = Some(r);
                    out.intervals.push((ninf, eta_avg + r));
                }
                I6 => {
                    let l = c_l();
                    out.c_l = Some(l);
                    out.intervals.push((eta_avg + l, inf));
                }
            }
        }
        SpecialTime::Intermediate(_) => {
            let c2 = cs * cs;
            let star = || {
                let ratio = ((xi - m.xi0).powi(2) - c2) / (c2 - d * d);
                scale * ratio.sqrt().ln()
            };
            match seg {
                I2 => {
                    let s = star();
                    out.c_star = Some(s);
                    out.intervals.push((ninf, eta_avg + s));
                }
                I6 => {
                    let s = star();
                    out.c_star = Some(s);
                    out.intervals.push((eta_avg + s, inf));
                }
                _ => {}
            }
        }
    }
    for &(a, b) in &out.intervals {
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::SolverFailure(format!(
                "degenerate preimage interval ({a}, {b}) at xi = {xi}"
            )));
        }
    }
    Ok(out)
}
