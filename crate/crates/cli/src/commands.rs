//! One function per subcommand. Each computes its tables and hands them to
//! [`Export`], so identical configs give byte-identical files.

use std::path::PathBuf;

use serde_json::json;
use spectral_interference::gabor::ComplexField;
use spectral_interference::oracle::{oracle_maxima_count, OracleValue};
use spectral_interference::phasefield::{
    amplitude_weighted_phase, locate_zeros_with_diagnostics, phase_of,
};
use spectral_interference::quad::linspace;
use spectral_interference::reassign::{
    arc_circle, attraction_bound_check_q, EtaS, ReassignField, ReassignMode,
};
use spectral_interference::ridges::{
    bifurcation_times, count_frequency_maxima, critical_gap_stft, default_band, extract_ridges,
};
use spectral_interference::squeeze::{
    asym_indicator, asym_sst, critical_gap_sst, erf_closed_form, squeeze_cross_section, AsymTag,
    SpecialTime, SqueezeConfig, Weighting,
};
use spectral_interference::validate::{run_all, Level, Status};
use spectral_interference::{Error, GaussianWindow, TwoHarmonicModel};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Export, Table};

type Out = Result<Vec<PathBuf>, CliError>;

pub fn cmd_stft(cfg: &ExperimentConfig) -> Out {
    let (m, g) = (&cfg.model, cfg.grid);
    let field = ComplexField::stft(m, &cfg.window, g);
    let weighted = amplitude_weighted_phase(&field)?;
    let mut t = Table::new(
        "stft",
        &["t", "eta", "abs", "re", "im", "phase", "weighted_phase"],
    );
    for i in 0..g.n_t {
        for j in 0..g.n_eta {
            let v = field.at(i, j);
            let phase = phase_of(v, m.a, g.t(i), g.eta(j)).unwrap_or(f64::NAN);
            t.push(vec![
                g.t(i).into(),
                g.eta(j).into(),
                v.norm().into(),
                v.re.into(),
                v.im.into(),
                phase.into(),
                weighted.at(i, j).into(),
            ]);
        }
    }
    let mut e = Export::new("stft", cfg);
    e.tables.push(t);
    e.write()
}

pub fn cmd_ridges(cfg: &ExperimentConfig) -> Out {
    let (m, w) = (&cfg.model, &cfg.window);
    let field = ComplexField::stft(m, w, cfg.grid);
    let mut report = extract_ridges(&field)?;
    report.attach_ellipses(m, w);

    let mut points = Table::new("ridge_points", &["t", "eta"]);
    for &(t, eta) in &report.points {
        points.push(vec![t.into(), eta.into()]);
    }
    let mut counts = Table::new("ridge_counts", &["t", "maxima"]);
    for &(t, n) in &report.maxima_count_per_t {
        counts.push(vec![t.into(), n.into()]);
    }
    let mut bif = Table::new("bifurcations", &["t_detected"]);
    for &t in &report.bifurcation_times {
        bif.push(vec![t.into()]);
    }
    let mut ell = Table::new(
        "ellipses",
        &[
            "k",
            "center_t",
            "center_eta",
            "semi_axis_t",
            "semi_axis_eta",
            "t_left",
            "t_right",
        ],
    );
    for p in &report.ellipses {
        let (tl, tr) = bifurcation_times(m, w, p.k)?;
        ell.push(vec![
            p.k.into(),
            p.center_t.into(),
            p.center_eta.into(),
            p.semi_axis_t.into(),
            p.semi_axis_eta.into(),
            tl.into(),
            tr.into(),
        ]);
    }
    let mut e = Export::new("ridges", cfg);
    e.tables.extend([points, counts, bif, ell]);
    e.write()
}

pub fn cmd_zeros(cfg: &ExperimentConfig) -> Out {
    let search = locate_zeros_with_diagnostics(&cfg.model, &cfg.window, &cfg.grid);
    let mut t = Table::new("zeros", &["t0", "eta0", "winding", "residual"]);
    for z in &search.zeros {
        t.push(vec![
            z.t0.into(),
            z.eta0.into(),
            z.winding.into(),
            z.refinement_residual.into(),
        ]);
    }
    let mut e = Export::new("zeros", cfg);
    e.tables.push(t);
    e.extra.insert("dropped_candidates", json!(search.dropped));
    e.write()
}

pub fn cmd_reassign(cfg: &ExperimentConfig) -> Out {
    let (m, w, g) = (&cfg.model, &cfg.window, cfg.grid);
    let field = ReassignField::fill(m, w, g, ReassignMode::Sync);
    let mut fields = Table::new("reassign", &["t", "eta", "eta_p", "eta_s_re", "eta_s_im"]);
    let mut audit = Table::new(
        "attraction",
        &["t", "eta", "q_abs", "bound", "actual", "holds"],
    );
    let (mut tested, mut violated) = (0usize, 0usize);
    for i in 0..g.n_t {
        for j in 0..g.n_eta {
            let (t, eta) = (g.t(i), g.eta(j));
            let z = match field.at(i, j) {
                EtaS::Value(z) => z,
                EtaS::AtZero => num_complex::Complex64::new(f64::NAN, f64::NAN),
            };
            fields.push(vec![
                t.into(),
                eta.into(),
                z.re.into(),
                z.re.into(),
                z.im.into(),
            ]);
            match attraction_bound_check_q(m, w, t, eta) {
                Ok(c) => {
                    tested += 1;
                    violated += usize::from(!c.holds);
                    let q = c.bound / (2.0 * m.delta);
                    audit.push(vec![
                        t.into(),
                        eta.into(),
                        q.into(),
                        c.bound.into(),
                        c.actual.into(),
                        c.holds.into(),
                    ]);
                }
                Err(Error::NotApplicable(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    let mut arcs = Table::new("arcs", &["theta", "center_re", "center_im", "radius"]);
    for &theta in &cfg.thetas {
        let (c, r) = arc_circle(m, theta)?;
        arcs.push(vec![theta.into(), c.re.into(), c.im.into(), r.into()]);
    }
    let mut e = Export::new("reassign", cfg);
    e.tables.extend([fields, arcs, audit]);
    e.extra.insert("attraction_tested", json!(tested));
    e.extra.insert("attraction_violations", json!(violated));
    e.write()
}

fn tag_name(tag: AsymTag) -> &'static str {
    match tag {
        AsymTag::Interior => "interior",
        AsymTag::OffSupport => "off_support",
        AsymTag::NearSingularity => "near_singularity",
        AsymTag::OutsideRegime => "outside_regime",
    }
}

pub fn cmd_squeeze(cfg: &ExperimentConfig) -> Out {
    let (m, w, g, sq) = (&cfg.model, &cfg.window, cfg.grid, &cfg.squeeze);
    let mut e = Export::new("squeeze", cfg);
    if cfg.squeeze_field {
        let field = ComplexField::squeeze(m, w, sq, g)?;
        let mut t = Table::new("squeeze", &["t", "xi", "abs", "re", "im"]);
        for i in 0..g.n_t {
            for j in 0..g.n_eta {
                let v = field.at(i, j);
                t.push(vec![
                    g.t(i).into(),
                    g.eta(j).into(),
                    v.norm().into(),
                    v.re.into(),
                    v.im.into(),
                ]);
            }
        }
        e.tables.push(t);
    }
    let xs = linspace(g.eta_min, g.eta_max, cfg.n_xi);
    let k = cfg.special_k;
    for (name, time) in [
        ("cross_section_plus", SpecialTime::Constructive(k)),
        ("cross_section_minus", SpecialTime::Destructive(k)),
    ] {
        let s = squeeze_cross_section(m, w, sq, time.t(m), &xs)?;
        let mut t = Table::new(
            name,
            &[
                "xi",
                "quadrature_abs",
                "quadrature_re",
                "quadrature_im",
                "asymptotic_abs",
                "asymptotic_tag",
                "erf",
            ],
        );
        for (&x, v) in xs.iter().zip(&s) {
            let asym = match sq.weighting {
                Weighting::Stft => asym_sst(m, w, sq.alpha, time, x),
                Weighting::Indicator { r } => asym_indicator(m, w, sq.alpha, r, time, x),
            };
            let (a_abs, a_tag) = match asym {
                Ok(a) => (a.value.norm(), tag_name(a.tag)),
                Err(_) => (f64::NAN, "unavailable"),
            };
            let erf = match sq.weighting {
                Weighting::Stft => erf_closed_form(m, w, sq.alpha, time, x).unwrap_or(f64::NAN),
                Weighting::Indicator { .. } => f64::NAN,
            };
            t.push(vec![
                x.into(),
                v.norm().into(),
                v.re.into(),
                v.im.into(),
                a_abs.into(),
                a_tag.into(),
                erf.into(),
            ]);
        }
        e.tables.push(t);
    }
    e.extra
        .insert("t_plus", json!(SpecialTime::Constructive(k).t(m)));
    e.extra
        .insert("t_minus", json!(SpecialTime::Destructive(k).t(m)));
    e.write()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Stft,
    Sst,
}

/// Largest `Δ` seen with one maximum and smallest seen with two, by bisection
/// on `[lo, hi]`. `None` when the endpoints do not straddle the flip.
fn empirical_bracket(
    two: impl Fn(f64) -> Result<bool, Error>,
    (mut lo, mut hi): (f64, f64),
    steps: usize,
) -> Result<Option<(f64, f64)>, Error> {
    if two(lo)? || !two(hi)? {
        return Ok(None);
    }
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if two(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some((lo, hi)))
}

fn squeeze_maxima(
    m: &TwoHarmonicModel,
    w: &GaussianWindow,
    sq: &SqueezeConfig,
) -> Result<usize, Error> {
    let band = (m.xi0 - 0.1, m.xi1() + 0.13);
    let curve = |n: usize| -> Result<Vec<f64>, Error> {
        let xs = linspace(band.0, band.1, n);
        Ok(squeeze_cross_section(m, w, sq, 0.0, &xs)?
            .iter()
            .map(|z| z.norm())
            .collect())
    };
    match oracle_maxima_count(&curve(512)?, &curve(1024)?)?.value {
        OracleValue::Count(n) => Ok(n),
        _ => Err(Error::Inconclusive(
            "maxima oracle returned a non-count".into(),
        )),
    }
}

/// Critical gap for the configured `a` and `σ`, with an empirical bracket from
/// maxima counting at the constructive time `t = 0`.
pub fn cmd_critical(cfg: &ExperimentConfig, method: Method) -> Out {
    let (w, a, xi0) = (&cfg.window, cfg.model.a, cfg.model.xi0);
    let model = |delta: f64| TwoHarmonicModel::new(xi0, delta, a);
    let mut e = Export::new("critical", cfg);
    let (delta, aux_name, aux, bracket) = match method {
        Method::Stft => {
            let (d, s) = critical_gap_stft(a, w)?;
            let two = |delta: f64| {
                let m = model(delta)?;
                Ok(count_frequency_maxima(&m, w, 0.0, default_band(&m, w), 512)? >= 2)
            };
            (
                d,
                "s",
                s,
                empirical_bracket(two, (0.5 * d, 1.5 * d), cfg.critical_steps)?,
            )
        }
        Method::Sst => {
            let c = critical_gap_sst(a, w)?;
            let two = |delta: f64| Ok(squeeze_maxima(&model(delta)?, w, &cfg.squeeze)? >= 2);
            e.extra.insert("xi_c_offset", json!(c.xi_c_offset));
            e.extra.insert("empirical_alpha", json!(cfg.squeeze.alpha));
            let b = empirical_bracket(two, (0.8 * c.delta, 1.2 * c.delta), cfg.critical_steps)?;
            (c.delta, "r", c.r, b)
        }
    };
    let method_name = match method {
        Method::Stft => "stft",
        Method::Sst => "sst",
    };
    println!("method      {method_name}");
    println!("a           {a}");
    println!("sigma       {}", w.sigma);
    println!("delta_crit  {delta}");
    println!("{aux_name:<11} {aux}");
    match bracket {
        Some((lo, hi)) => println!("bracket     [{lo}, {hi}]"),
        None => println!("bracket     none (flip not inside the search interval)"),
    }
    e.extra.insert("method", json!(method_name));
    e.extra.insert("delta_crit", json!(delta));
    e.extra.insert(aux_name, json!(aux));
    e.extra
        .insert("empirical_bracket", json!(bracket.map(|(lo, hi)| [lo, hi])));
    e.write()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ValidateLevel {
    Fast,
    Full,
}

/// Runs the acceptance suite and prints a per-criterion table. Known
/// deviations inside their measured envelopes count as acceptable.
pub fn cmd_validate(level: ValidateLevel) -> Result<(), CliError> {
    let level = match level {
        ValidateLevel::Fast => Level::Fast,
        ValidateLevel::Full => Level::Full,
    };
    let reports = run_all(level);
    for r in &reports {
        print!("{r}");
    }
    println!();
    for r in &reports {
        println!("{}", r.line());
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.status.acceptable())
        .map(|r| r.id.to_string())
        .collect();
    let skipped = reports
        .iter()
        .filter(|r| r.status == Status::Skipped)
        .count();
    if failed.is_empty() {
        println!("\nall run criteria acceptable ({skipped} skipped)");
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "criteria {} failed",
            failed.join(", ")
        )))
    }
}
