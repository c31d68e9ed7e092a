//! The acceptance suite as library functions, shared by the integration test
//! and `specint validate`.
//!
//! Each criterion is a list of checks. A check that fails for a documented,
//! analysed reason is marked as a known deviation; it still reports FAIL, but
//! the suite only treats it as an error when the measured values leave the
//! documented envelope.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::error::Result;
use crate::gabor::{stft_closed_form, stft_numeric, stft_partials, ComplexField, QuadratureSpec};
use crate::model::{
    ahm_stft_error_bound, freeze_ahm, AhmComponent, AhmSignal, GaussianWindow, TfGrid,
    TwoHarmonicModel,
};
use crate::oracle::oracle_maxima_count;
use crate::phasefield::{default_rho, locate_zeros, winding_about};
use crate::quad::linspace;
use crate::reassign::{
    ahm_reassign_error_bound, arc_circle, attraction_bound_check, eta_p, eta_s, eta_s_numeric,
    reassign_constants, reassign_epsilon0, EtaS, Extended, MobiusMap,
};
use crate::ridges::{
    bifurcation_times, count_frequency_maxima, critical_gap_stft, default_band,
    destructive_extrema, ellipse_residual, eta_minus_bound_printed, eta_plus_bound_printed,
    extract_ridges,
};
use crate::squeeze::{
    critical_gap_sst, erf_closed_form, pushforward_density, single_component_f0,
    single_component_f1, squeeze_cross_section, SpecialTime, SqueezeConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Criteria that finish in a few seconds.
    Fast,
    /// Every criterion at its pinned resolution.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// At least one check fails, each failure is documented and its measured
    /// values sit inside the documented envelope.
    KnownDeviation,
    Fail,
    Skipped,
}

impl Status {
    /// Whether the suite as a whole should still succeed.
    pub fn acceptable(self) -> bool {
        !matches!(self, Status::Fail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
    /// For checks that are expected to fail: the reason, and whether the
    /// measurement matches the documented analysis.
    pub deviation: Option<(&'static str, bool)>,
}

impl Check {
    fn strict(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            passed,
            detail: detail.into(),
            deviation: None,
        }
    }

    fn documented(
        label: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
        reason: &'static str,
        in_envelope: bool,
    ) -> Self {
        Self {
            label: label.into(),
            passed,
            detail: detail.into(),
            deviation: Some((reason, in_envelope)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionReport {
    /// One summary line, e.g. `[ 4] PASS  destructive-time zero (0.01 s)`.
    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::KnownDeviation => "FAIL (known deviation)",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        format!(
            "[{:>2}] {tag}  {} ({:.2} s, budget {} s)",
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.line())?;
        for c in &self.checks {
            let mark = match (c.passed, c.deviation) {
                (true, _) => "ok",
                (false, Some((_, true))) => "known",
                _ => "FAILED",
            };
            writeln!(f, "      {mark:<6} {}: {}", c.label, c.detail)?;
            if let (false, Some((reason, _))) = (c.passed, c.deviation) {
                writeln!(f, "             {reason}")?;
            }
        }
        Ok(())
    }
}

fn status_of(checks: &[Check]) -> Status {
    if checks.iter().all(|c| c.passed) {
        Status::Pass
    } else if checks
        .iter()
        .all(|c| c.passed || matches!(c.deviation, Some((_, true))))
    {
        Status::KnownDeviation
    } else {
        Status::Fail
    }
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub budget_secs: u64,
    pub fast: bool,
    run: fn() -> Result<Vec<Check>>,
}

pub const CRITERIA: [Criterion; 12] = [
    Criterion {
        id: 1,
        name: "STFT critical gap, a = 1",
        budget_secs: 1,
        fast: true,
        run: c01_stft_gap_balanced,
    },
    Criterion {
        id: 2,
        name: "STFT critical gap, a != 1",
        budget_secs: 5,
        fast: true,
        run: c02_stft_gap_unbalanced,
    },
    Criterion {
        id: 3,
        name: "bubble geometry",
        budget_secs: 30,
        fast: true,
        run: c03_bubbles,
    },
    Criterion {
        id: 4,
        name: "destructive-time zero",
        budget_secs: 1,
        fast: true,
        run: c04_destructive,
    },
    Criterion {
        id: 5,
        name: "winding",
        budget_secs: 5,
        fast: true,
        run: c05_winding,
    },
    Criterion {
        id: 6,
        name: "reassignment identities",
        budget_secs: 10,
        fast: true,
        run: c06_reassignment,
    },
    Criterion {
        id: 7,
        name: "pushforward densities",
        budget_secs: 60,
        fast: false,
        run: c07_densities,
    },
    Criterion {
        id: 8,
        name: "SST vs indicator contrast",
        budget_secs: 120,
        fast: false,
        run: c08_contrast,
    },
    Criterion {
        id: 9,
        name: "critical-gap ratio",
        budget_secs: 1,
        fast: true,
        run: c09_ratio,
    },
    Criterion {
        id: 10,
        name: "erf closed forms",
        budget_secs: 60,
        fast: false,
        run: c10_erf,
    },
    Criterion {
        id: 11,
        name: "large-gap and extreme-amplitude limits",
        budget_secs: 120,
        fast: false,
        run: c11_limits,
    },
    Criterion {
        id: 12,
        name: "AHM generalization",
        budget_secs: 60,
        fast: true,
        run: c12_ahm,
    },
];

/// Runs one criterion. Errors raised inside are reported as a failed check.
pub fn run_criterion(c: &Criterion, level: Level) -> CriterionReport {
    let budget = Duration::from_secs(c.budget_secs);
    if level == Level::Fast && !c.fast {
        return CriterionReport {
            id: c.id,
            name: c.name,
            status: Status::Skipped,
            checks: vec![],
            elapsed: Duration::ZERO,
            budget,
        };
    }
    let start = Instant::now();
    let checks = match (c.run)() {
        Ok(v) => v,
        Err(e) => vec![Check::strict("evaluation", false, e.to_string())],
    };
    CriterionReport {
        id: c.id,
        name: c.name,
        status: status_of(&checks),
        checks,
        elapsed: start.elapsed(),
        budget,
    }
}

pub fn run_all(level: Level) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run_criterion(c, level)).collect()
}

pub fn criterion(id: u8) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id)
}

fn win() -> GaussianWindow {
    GaussianWindow::new(2f64.sqrt()).expect("sigma = sqrt 2")
}

fn model(delta: f64, a: f64) -> Result<TwoHarmonicModel> {
    TwoHarmonicModel::new(1.0, delta, a)
}

fn c01_stft_gap_balanced() -> Result<Vec<Check>> {
    let w = win();
    let count = |delta: f64| -> Result<usize> {
        let m = model(delta, 1.0)?;
        count_frequency_maxima(&m, &w, 0.0, default_band(&m, &w), 512)
    };
    let (below, above) = (count(0.99 / PI)?, count(1.01 / PI)?);
    let (d, _) = critical_gap_stft(1.0, &w)?;
    Ok(vec![
        Check::strict("count at 0.99/pi", below == 1, format!("{below} maxima")),
        Check::strict("count at 1.01/pi", above == 2, format!("{above} maxima")),
        Check::strict(
            "solver returns 1/pi",
            (d - 1.0 / PI).abs() <= 1e-10,
            format!("{d:.15} (error {:.1e})", (d - 1.0 / PI).abs()),
        ),
    ])
}

fn c02_stft_gap_unbalanced() -> Result<Vec<Check>> {
    let w = win();
    let (d1, _) = critical_gap_stft(1.0, &w)?;
    let mut out = Vec::new();
    for a in [0.5, 2.0] {
        let (d, s) = critical_gap_stft(a, &w)?;
        let count = |delta: f64| -> Result<usize> {
            let m = model(delta, a)?;
            count_frequency_maxima(&m, &w, 0.0, default_band(&m, &w), 512)
        };
        let (lo, hi) = (count(0.98 * d)?, count(1.02 * d)?);
        out.push(Check::strict(
            format!("a = {a}: flip within 2% of {d:.6}"),
            lo == 1 && hi == 2,
            format!("{lo} maxima at 0.98x, {hi} at 1.02x (s = {s:.6})"),
        ));
        out.push(Check::strict(
            format!("a = {a}: wider than the balanced gap"),
            d > d1,
            format!("{d:.6} > {d1:.6}"),
        ));
    }
    Ok(out)
}

fn c03_bubbles() -> Result<Vec<Check>> {
    let w = win();
    let m = model(0.3, 1.0)?;
    let grid = TfGrid::new(0.0, 1.0 / m.delta, 512, 0.5, 1.8, 1301)?;
    let field = ComplexField::stft(&m, &w, grid);
    let report = extract_ridges(&field)?;
    let (tl, tr) = bifurcation_times(&m, &w, 0)?;
    let dt = grid.dt();
    let found = &report.bifurcation_times;
    let ok =
        found.len() == 2 && (found[0] - tl).abs() <= 2.0 * dt && (found[1] - tr).abs() <= 2.0 * dt;
    let mut out = vec![Check::strict(
        "bifurcation times within 2 grid steps",
        ok,
        format!("detected {found:?}, predicted ({tl:.6}, {tr:.6}), dt = {dt:.6}"),
    )];
    let r = |d: f64| ellipse_residual(&m.with_delta(d), &w, 0, 4096);
    let (r2, r1, r05) = (r(0.2)?, r(0.1)?, r(0.05)?);
    for (d, num, den) in [(0.2, r2, r1), (0.1, r1, r05)] {
        let ratio = num / den;
        out.push(Check::documented(
            format!("residual halving ratio at {d} in [3.2, 4.8]"),
            (3.2..=4.8).contains(&ratio),
            format!("r({d}) / r({}) = {ratio:.3}", d / 2.0),
            "the Δ² coefficient of the residual vanishes on the ellipse, so the decay is O(Δ⁴) (ratio near 16)",
            (12.0..=17.0).contains(&ratio),
        ));
    }
    let bound = 12.0 * 0.01 * (1.0 + PI * w.sigma * w.sigma) * 1.5;
    out.push(Check::strict(
        "residual at 0.1 below 12Δ²(1+πσ²)·1.5",
        r1 <= bound,
        format!("{r1:.4e} <= {bound:.4}"),
    ));
    Ok(out)
}

fn c04_destructive() -> Result<Vec<Check>> {
    let w = win();
    let m = model(0.3, 1.3)?;
    let (eta_avg, lo, hi) = destructive_extrema(&m, &w, 0)?;
    let v = stft_closed_form(&m, &w, m.destructive_time(0), eta_avg).norm();
    let (gap_lo, gap_hi) = (m.xi0 - lo, hi - m.xi1());
    let (b_lo, b_hi) = (
        eta_minus_bound_printed(&m, &w),
        eta_plus_bound_printed(&m, &w),
    );
    Ok(vec![
        Check::strict(
            "|V(t0-, eta_avg)| < 1e-10",
            v < 1e-10,
            format!("{v:.3e} at eta_avg = {eta_avg:.12}"),
        ),
        Check::strict(
            "eta- < xi0 and eta+ > xi1",
            lo < m.xi0 && hi > m.xi1(),
            format!("eta- = {lo:.9}, eta+ = {hi:.9}"),
        ),
        Check::strict(
            "distance bounds (as printed)",
            gap_lo <= b_lo && gap_hi <= b_hi,
            format!("xi0 - eta- = {gap_lo:.6} <= {b_lo:.6}; eta+ - xi1 = {gap_hi:.6} <= {b_hi:.6}"),
        ),
    ])
}

fn c05_winding() -> Result<Vec<Check>> {
    let w = win();
    let m = model(0.3, 1.3)?;
    let region = TfGrid::new(0.0, 7.0, 141, 0.5, 1.8, 131)?;
    let zeros = locate_zeros(&m, &w, &region);
    let rho = default_rho(&w);
    let mut worst: f64 = 0.0;
    let mut all_unit = !zeros.is_empty();
    for z in &zeros {
        let raw = winding_about(&m, &w, z.t0, z.eta0, rho, 256)?;
        worst = worst.max((raw - raw.round()).abs());
        all_unit &= z.winding.abs() == 1 && raw.round().abs() == 1.0;
    }
    let mut out = vec![Check::strict(
        "every zero winds once",
        all_unit,
        format!(
            "{} zeros at t = {:?}",
            zeros.len(),
            zeros.iter().map(|z| z.t0).collect::<Vec<_>>()
        ),
    )];
    if zeros.len() >= 2 {
        let tc = 0.5 * (zeros[0].t0 + zeros[1].t0);
        let raw = winding_about(&m, &w, tc, zeros[0].eta0, 2.5 / w.sigma, 1024)?;
        worst = worst.max((raw - raw.round()).abs());
        out.push(Check::strict(
            "contour around two zeros winds twice",
            raw.round().abs() == 2.0,
            format!("raw winding {raw:.6}"),
        ));
    } else {
        out.push(Check::strict(
            "contour around two zeros winds twice",
            false,
            "fewer than two zeros found",
        ));
    }
    out.push(Check::strict(
        "raw windings within 0.01 of integers",
        worst <= 0.01,
        format!("largest offset {worst:.2e}"),
    ));
    Ok(out)
}

fn c06_reassignment() -> Result<Vec<Check>> {
    let w = win();
    let m = model(0.3, 1.0)?;
    // phase rule from the closed-form partials, independent of the Möbius form
    let mut worst_p: f64 = 0.0;
    let mut skipped = 0;
    for t in linspace(0.0, 2.0 / m.delta, 256) {
        for eta in linspace(0.5, 1.8, 256) {
            let (v, vt, _) = stft_partials(&m, &w, t, eta);
            if v.norm() < 1e-6 {
                skipped += 1;
                continue;
            }
            let phase_rule = (vt / v).im / (2.0 * PI);
            let p = eta_p(&m, &w, t, eta)?;
            let re = match eta_s(&m, &w, t, eta) {
                EtaS::Value(z) => z.re,
                EtaS::AtZero => continue,
            };
            worst_p = worst_p
                .max((p - re).abs())
                .max((phase_rule - re).abs() / re.abs().max(1.0));
        }
    }
    let mut worst_im: f64 = 0.0;
    for k in -2..=2 {
        for t in [m.constructive_time(k), m.destructive_time(k)] {
            for eta in linspace(0.0, 2.5, 256) {
                if let EtaS::Value(z) = eta_s(&m, &w, t, eta) {
                    worst_im = worst_im.max(z.im.abs() / z.norm().max(1.0));
                }
            }
        }
    }
    let map = MobiusMap::for_model(&m);
    let mut worst_arc: f64 = 0.0;
    for theta in [0.5, 1.0, 2.0] {
        let (c, r) = arc_circle(&m, theta)?;
        for rr in [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0] {
            if let Extended::Finite(z) =
                map.apply(Extended::Finite(Complex64::from_polar(rr, theta)))
            {
                worst_arc = worst_arc.max(((z - c).norm() - r).abs());
            }
        }
    }
    let (mut tested, mut held) = (0, 0);
    for t in linspace(0.0, 2.0 / m.delta, 41) {
        for eta in linspace(0.0, 2.3, 47) {
            if let Ok(c) = attraction_bound_check(&m, &w, t, eta) {
                tested += 1;
                held += usize::from(c.holds);
            }
        }
    }
    Ok(vec![
        Check::strict(
            "eta_p = Re eta_s on 256x256",
            worst_p <= 1e-12,
            format!("max deviation {worst_p:.2e} ({skipped} cells with |V| < 1e-6 skipped)"),
        ),
        Check::strict(
            "Im eta_s = 0 at t_k^±",
            worst_im <= 1e-12,
            format!("max |Im|/max(1, |eta_s|) {worst_im:.2e}"),
        ),
        Check::strict(
            "Möbius arc membership",
            worst_arc <= 1e-10,
            format!("max offset {worst_arc:.2e}"),
        ),
        Check::strict(
            "attraction bound where the premise holds",
            tested > 0 && held == tested,
            format!("{held}/{tested} points"),
        ),
    ])
}

/// ξ-nodes for mass integrals: `√α/8` spacing within `12√α` of `ξ0` and `ξ1`,
/// `2.5e-3` elsewhere on `[ξ0 − 0.5, ξ1 + 0.5]`, plus the `±3√α` cut points.
fn mass_nodes(m: &TwoHarmonicModel, alpha: f64) -> Vec<f64> {
    let s = alpha.sqrt();
    let mut xs = linspace(
        m.xi0 - 0.5,
        m.xi1() + 0.5,
        ((m.delta + 1.0) / 2.5e-3) as usize + 1,
    );
    for c in [m.xi0, m.xi1()] {
        xs.extend(linspace(c - 12.0 * s, c + 12.0 * s, 193));
        xs.extend([c - 3.0 * s, c + 3.0 * s]);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|b, a| (*b - *a).abs() < 1e-12);
    xs
}

/// Fraction of `∫|S| dξ` falling where `outside(ξ)` holds.
fn mass_fraction(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    cfg: &SqueezeConfig,
    t: f64,
    outside: impl Fn(f64) -> bool,
) -> Result<f64> {
    let xs = mass_nodes(m, cfg.alpha);
    let s: Vec<f64> = squeeze_cross_section(m, w, cfg, t, &xs)?
        .iter()
        .map(|z| z.norm())
        .collect();
    let (mut total, mut off) = (0.0, 0.0);
    for k in 1..xs.len() {
        let piece = 0.5 * (s[k] + s[k - 1]) * (xs[k] - xs[k - 1]);
        total += piece;
        if outside(0.5 * (xs[k] + xs[k - 1])) {
            off += piece;
        }
    }
    Ok(off / total)
}

fn c07_densities() -> Result<Vec<Check>> {
    let w = win();
    let m = model(0.3, 1.0)?;
    let alpha = 1e-5;
    let ind = SqueezeConfig::indicator(alpha, 50.0);
    let t_plus = SpecialTime::Constructive(0);
    let t_minus = SpecialTime::Destructive(0);
    let xs = linspace(m.xi0 + m.delta / 4.0, m.xi1() - m.delta / 4.0, 41);
    let s = squeeze_cross_section(&m, &w, &ind, t_plus.t(&m), &xs)?;
    let mut worst: f64 = 0.0;
    for (x, v) in xs.iter().zip(&s) {
        let theta = pushforward_density(&m, &w, ind.weighting, t_plus, *x)?.norm();
        worst = worst.max((v.norm() - theta).abs() / theta);
    }
    let mut out = vec![Check::strict(
        "indicator squeeze matches Θ_1 within 5%",
        worst <= 0.05,
        format!("worst relative error {worst:.2e} over 41 points (α = 1e-5, R = 50)"),
    )];
    let cut = 3.0 * alpha.sqrt();
    let (x0, x1) = (m.xi0, m.xi1());
    let off_plus = |x: f64| x <= x0 - cut || x >= x1 + cut;
    let in_minus = |x: f64| x >= x0 + cut && x <= x1 - cut;
    let reason = "with G = 1 the mollifier's own Gaussian tail leaks erfc(3)/2 ≈ 1.1e-5 of the mass past a 3√α cut at every α";
    let envelope = |f: f64| (5e-6..=2e-5).contains(&f);
    for (label, time, region) in [
        (
            "t0+ mass outside support",
            t_plus,
            &off_plus as &dyn Fn(f64) -> bool,
        ),
        (
            "t0- mass inside gap",
            t_minus,
            &in_minus as &dyn Fn(f64) -> bool,
        ),
    ] {
        let f_ind = mass_fraction(&m, &w, &ind, time.t(&m), region)?;
        out.push(Check::documented(
            format!("indicator weight: {label} < 1e-6"),
            f_ind < 1e-6,
            format!("fraction {f_ind:.3e}"),
            reason,
            envelope(f_ind),
        ));
        let f_stft = mass_fraction(&m, &w, &SqueezeConfig::stft(alpha), time.t(&m), region)?;
        out.push(Check::strict(
            format!("STFT weight: {label} < 1e-6"),
            f_stft < 1e-6,
            format!("fraction {f_stft:.3e}"),
        ));
    }
    Ok(out)
}

/// Strict maxima of `|S(t0+, ·)|` on `[ξ0 − 0.1, ξ1 + 0.13]` at 512 and 1024
/// samples. The band is asymmetric so that no pair of samples mirrors about ξ̄.
fn squeeze_maxima(delta: f64, cfg: &SqueezeConfig) -> Result<usize> {
    let w = win();
    let m = model(delta, 1.0)?;
    let band = (m.xi0 - 0.1, m.xi1() + 0.13);
    let curve = |n: usize| -> Result<Vec<f64>> {
        let xs = linspace(band.0, band.1, n);
        Ok(squeeze_cross_section(&m, &w, cfg, 0.0, &xs)?
            .iter()
            .map(|z| z.norm())
            .collect())
    };
    let r = oracle_maxima_count(&curve(512)?, &curve(1024)?)?;
    match r.value {
        crate::oracle::OracleValue::Count(n) => Ok(n),
        _ => unreachable!("maxima oracle returns a count"),
    }
}

fn c08_contrast() -> Result<Vec<Check>> {
    let w = win();
    let alpha = 1e-4;
    let stft = SqueezeConfig::stft(alpha);
    let ind = SqueezeConfig::indicator(alpha, 50.0);
    let dc = critical_gap_sst(1.0, &w)?.delta;
    let i15 = squeeze_maxima(0.15, &ind)?;
    let i25 = squeeze_maxima(0.25, &ind)?;
    let s15 = squeeze_maxima(0.15, &stft)?;
    let s25 = squeeze_maxima(0.25, &stft)?;
    let lo = squeeze_maxima(0.97 * dc, &stft)?;
    let hi = squeeze_maxima(1.03 * dc, &stft)?;
    // the α → 0 profile has a single peak iff π²σ²Δ² < 2/3
    let true_flip = (2.0f64 / 3.0).sqrt() / (PI * w.sigma);
    let below_true = squeeze_maxima(0.97 * true_flip, &stft)?;
    Ok(vec![
        Check::strict("indicator: 2 maxima at Δ = 0.15 and 0.25", i15 == 2 && i25 == 2, format!("{i15} and {i25}")),
        Check::strict("STFT: 1 maximum at Δ = 0.15", s15 == 1, format!("{s15}")),
        Check::strict("STFT: 2 maxima at Δ = 0.25", s25 == 2, format!("{s25}")),
        Check::documented(
            format!("STFT flip within ±3% of Δ_crit = {dc:.6}"),
            lo == 1 && hi == 2,
            format!("{lo} maxima at 0.97·Δ_crit, {hi} at 1.03·Δ_crit"),
            "|S| tends to (1−x²)^{-3/2}·exp(−artanh²x/(π²σ²Δ²)), which splits at Δ = √(2/3)/(πσ) ≈ 0.1838, 4.6% below Δ_crit",
            lo == 2 && hi == 2 && below_true == 1,
        ),
        Check::strict(
            "STFT: 1 maximum just below √(2/3)/(πσ)",
            below_true == 1,
            format!("{below_true} at Δ = {:.5}", 0.97 * true_flip),
        ),
    ])
}

fn c09_ratio() -> Result<Vec<Check>> {
    let w = win();
    let sst = critical_gap_sst(1.0, &w)?;
    let (stft, _) = critical_gap_stft(1.0, &w)?;
    let ratio = sst.delta / stft;
    let expect = (3f64.ln() / 3.0).sqrt();
    Ok(vec![Check::strict(
        "Δ_SST / Δ_STFT = √(ln 3 / 3)",
        (ratio - expect).abs() <= 1e-9,
        format!("{ratio:.15} vs {expect:.15}"),
    )])
}

fn c10_erf() -> Result<Vec<Check>> {
    let w = win();
    let m = model(0.3, 1.0)?;
    let alpha = 1e-4;
    let cfg = SqueezeConfig::stft(alpha);
    let q = m.delta / 4.0;
    let (x0, x1, xb) = (m.xi0, m.xi1(), m.xibar());
    let mut out = Vec::new();
    let coarse = SqueezeConfig::stft(4.0 * alpha);
    let reason = "the erf bracket with 1/(2πσ√α) is a Δ/2-wide box average, not the Laplace peak; \
                  it grows as α^(-1/2) while quadrature converges to an α-independent limit";
    for (label, time, xs) in [
        (
            "t0+ on I4",
            SpecialTime::Constructive(0),
            linspace(xb - 0.9 * q, xb + 0.9 * q, 7),
        ),
        (
            "t0- on I1 and I7",
            SpecialTime::Destructive(0),
            [
                linspace(x0 - 0.3, x0 - 1.1 * q, 4),
                linspace(x1 + 1.1 * q, x1 + 0.3, 4),
            ]
            .concat(),
        ),
    ] {
        let s = squeeze_cross_section(&m, &w, &cfg, time.t(&m), &xs)?;
        let s4 = squeeze_cross_section(&m, &w, &coarse, time.t(&m), &xs)?;
        let mut worst: f64 = 0.0;
        let (mut rmin, mut rmax) = (f64::MAX, 0.0f64);
        let (mut gmin, mut gmax) = (f64::MAX, 0.0f64);
        for ((x, v), v4) in xs.iter().zip(&s).zip(&s4) {
            let e = erf_closed_form(&m, &w, alpha, time, *x)?;
            let e4 = erf_closed_form(&m, &w, 4.0 * alpha, time, *x)?;
            worst = worst.max((e - v.norm()).abs() / v.norm());
            let r = e / v.norm();
            let g = r / (e4 / v4.norm());
            (rmin, rmax) = (rmin.min(r), rmax.max(r));
            (gmin, gmax) = (gmin.min(g), gmax.max(g));
        }
        out.push(Check::documented(
            format!("{label}: within 5% of quadrature"),
            worst <= 0.05,
            format!(
                "erf/quadrature ratio in [{rmin:.2}, {rmax:.2}]; ratio growth from 4α to α in [{gmin:.3}, {gmax:.3}]"
            ),
            reason,
            gmin >= 1.8 && gmax <= 2.2,
        ));
    }
    for (label, time, xs) in [
        (
            "t0+ zero branch on I1 and I7",
            SpecialTime::Constructive(0),
            [
                linspace(x0 - 0.3, x0 - 1.1 * q, 4),
                linspace(x1 + 1.1 * q, x1 + 0.3, 4),
            ]
            .concat(),
        ),
        (
            "t0- zero branch on I3-I5",
            SpecialTime::Destructive(0),
            linspace(x0 + 1.1 * q, x1 - 1.1 * q, 9),
        ),
    ] {
        let s = squeeze_cross_section(&m, &w, &cfg, time.t(&m), &xs)?;
        let mut zero = true;
        let mut worst: f64 = 0.0;
        for (x, v) in xs.iter().zip(&s) {
            zero &= erf_closed_form(&m, &w, alpha, time, *x)? == 0.0;
            worst = worst.max(v.norm());
        }
        out.push(Check::strict(
            format!("{label}: closed form 0 and |S| < 1e-8"),
            zero && worst < 1e-8,
            format!("max quadrature |S| {worst:.2e}"),
        ));
    }
    Ok(out)
}

/// `sup_ξ |S − Σ single components|` over `[ξ0 − 0.5, ξ1 + 0.5]`.
fn residual_sup(m: &TwoHarmonicModel, alpha: f64, t: f64, f0: bool, f1: bool) -> Result<f64> {
    let w = win();
    let xs = linspace(m.xi0 - 0.5, m.xi1() + 0.5, 801);
    let s = squeeze_cross_section(m, &w, &SqueezeConfig::stft(alpha), t, &xs)?;
    Ok(xs
        .iter()
        .zip(s)
        .map(|(&x, v)| {
            let mut r = v;
            if f0 {
                r -= single_component_f0(m, &w, alpha, t, x);
            }
            if f1 {
                r -= single_component_f1(m, &w, alpha, t, x);
            }
            r.norm()
        })
        .fold(0.0, f64::max))
}

fn c11_limits() -> Result<Vec<Check>> {
    let w = win();
    let alpha = 1e-3;
    let target = -w.c() / 4.0;
    let mut out = Vec::new();
    for t in [0.0, 0.37] {
        let pts: Vec<(f64, f64)> = [0.8, 1.0, 1.2]
            .iter()
            .map(|&d| {
                Ok((
                    d * d,
                    residual_sup(&model(d, 1.0)?, alpha, t, true, true)?.ln(),
                ))
            })
            .collect::<Result<_>>()?;
        let n = pts.len() as f64;
        let (mx, my) = (
            pts.iter().map(|p| p.0).sum::<f64>() / n,
            pts.iter().map(|p| p.1).sum::<f64>() / n,
        );
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        out.push(Check::strict(
            format!("large-gap residual slope at t = {t}"),
            (slope / target - 1.0).abs() <= 0.2,
            format!("d ln r / dΔ² = {slope:.4} vs −π²σ²/4 = {target:.4}"),
        ));
    }
    // linear regime needs a·Δe^{−CΔ²} small against √α, hence Δ = 0.8
    let delta = 0.8;
    let rel = |a: f64| -> Result<f64> {
        let m = model(delta, a)?;
        let peak = 1.0 / (PI * w.sigma * alpha.sqrt());
        Ok(if a < 1.0 {
            residual_sup(&m, alpha, 0.0, true, false)? / peak
        } else {
            residual_sup(&m, alpha, 0.0, false, true)? / (a * peak)
        })
    };
    let (s1, s2) = (rel(0.05)?, rel(0.1)?);
    let (l1, l2) = (rel(10.0)?, rel(20.0)?);
    out.push(Check::strict(
        "small a: residual linear in a",
        (s2 / s1 / 2.0 - 1.0).abs() <= 0.2,
        format!(
            "r(0.1)/r(0.05) = {:.4} (relative residuals {s1:.3e}, {s2:.3e})",
            s2 / s1
        ),
    ));
    out.push(Check::strict(
        "large a: residual linear in 1/a",
        (l1 / l2 / 2.0 - 1.0).abs() <= 0.2,
        format!(
            "r(10)/r(20) = {:.4} (relative residuals {l1:.3e}, {l2:.3e})",
            l1 / l2
        ),
    ));
    Ok(out)
}

/// Two components, the second a slow chirp: `A_1 = 1.1`, `φ_1 = 1.25t + 5e-4 t²`.
pub fn slow_chirp_preset(epsilon: f64) -> Result<AhmSignal> {
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
        epsilon,
    )
}

fn c12_ahm() -> Result<Vec<Check>> {
    let w = win();
    let eps = 1e-3;
    let beta = 0.25;
    let horizon = 2.0;
    let s = slow_chirp_preset(eps)?;
    let fr = freeze_ahm(&s, 0.0)?;
    let quad = QuadratureSpec::default();
    let (mut stft_ok, mut stft_n, mut worst_stft) = (0, 0, 0.0f64);
    for t in linspace(-horizon, horizon, 9) {
        for eta in linspace(0.8, 1.5, 15) {
            let vf = stft_numeric(&s, &w, t, eta, &quad)?;
            let lin = fr.scale * stft_closed_form(&fr.model, &w, t + fr.time_shift, eta);
            let bound = ahm_stft_error_bound(&s, &w, t, 0.0)?;
            let err = (vf - lin).norm();
            worst_stft = worst_stft.max(err / bound);
            stft_n += 1;
            stft_ok += usize::from(err <= bound);
        }
    }
    let k = reassign_constants(&s, &w, 0.0, horizon)?;
    let eps0 = reassign_epsilon0(1.0, k.c_h, beta);
    let bound = ahm_reassign_error_bound(&s, &w, 0.0, beta, k.c_h, k.c_dh)?;
    let (mut ra_ok, mut ra_n, mut worst_ra) = (0, 0, 0.0f64);
    for t in linspace(-horizon, horizon, 9) {
        for eta in linspace(0.8, 1.5, 15) {
            let tl = t + fr.time_shift;
            if stft_closed_form(&fr.model, &w, tl, eta).norm() < eps.powf(beta) {
                continue;
            }
            let (EtaS::Value(f), EtaS::Value(l)) = (
                eta_s_numeric(&s, &w, t, eta, &quad)?,
                eta_s(&fr.model, &w, tl, eta),
            ) else {
                continue;
            };
            let err = (f - l).norm();
            worst_ra = worst_ra.max(err / bound);
            ra_n += 1;
            ra_ok += usize::from(err <= bound);
        }
    }
    Ok(vec![
        Check::strict(
            "|V_F − a_0 V_f| within the linearization bound",
            stft_ok == stft_n,
            format!("{stft_ok}/{stft_n} probes, worst error/bound {worst_stft:.3}"),
        ),
        Check::strict(
            "ε below ε_0",
            eps <= eps0,
            format!("ε = {eps}, ε_0 = {eps0:.4}"),
        ),
        Check::strict(
            "reassignment bound where |V_f| ≥ ε^β",
            ra_n > 50 && ra_ok == ra_n,
            format!("{ra_ok}/{ra_n} probes, worst error/bound {worst_ra:.3}"),
        ),
    ])
}
