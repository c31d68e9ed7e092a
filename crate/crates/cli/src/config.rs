//! Flat `key = value` experiment configuration with dotted sections.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use spectral_interference::reassign::ReassignMode;
use spectral_interference::squeeze::{SqueezeConfig, Weighting};
use spectral_interference::{GaussianWindow, TfGrid, TwoHarmonicModel};

use crate::error::CliError;

/// Every accepted key with its default. An empty default is derived from the
/// model once it is known.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("model.xi0", "1", "lower component frequency"),
    ("model.delta", "0.3", "frequency gap"),
    ("model.a", "1", "amplitude of the upper component"),
    ("model.sigma", "1.4142135623730951", "Gaussian window width"),
    ("grid.t_min", "0", "first time sample"),
    ("grid.t_max", "", "last time sample (default 2/delta)"),
    ("grid.n_t", "256", "time samples"),
    ("grid.eta_min", "", "lowest frequency (default xi0 - 0.5)"),
    (
        "grid.eta_max",
        "",
        "highest frequency (default xi0 + delta + 0.5)",
    ),
    ("grid.n_eta", "256", "frequency samples"),
    ("squeeze.alpha", "0.001", "mollifier width"),
    ("squeeze.weighting", "stft", "stft or indicator"),
    ("squeeze.r", "50", "indicator half-width"),
    ("squeeze.mode", "sync", "sync or phase reassignment"),
    ("squeeze.field", "true", "also write the full |S| grid"),
    (
        "squeeze.k",
        "0",
        "index of the special times t_k^+ and t_k^-",
    ),
    (
        "squeeze.n_xi",
        "401",
        "cross-section samples over the frequency range",
    ),
    (
        "reassign.thetas",
        "0.5,1,2",
        "arc angles for the circle table",
    ),
    (
        "critical.steps",
        "12",
        "bisection steps for the empirical bracket",
    ),
    ("output.dir", "out", "output directory"),
];

/// Where a raw value came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Default,
    File { path: PathBuf, line: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Flag => write!(f, "command line"),
        }
    }
}

/// Raw values before typing, keyed by dotted name.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<String, (String, Origin)>,
}

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _, _)| *k == key)
}

impl RawConfig {
    /// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
    /// Unknown keys, repeated keys and lines without `=` are rejected.
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let mut raw = Self::default();
        for (n, line) in text.lines().enumerate() {
            let origin = Origin::File {
                path: path.to_path_buf(),
                line: n + 1,
            };
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(CliError::config(body, origin, "expected key = value"));
            };
            let (key, value) = (key.trim(), value.trim());
            if !known(key) {
                return Err(CliError::config(key, origin, "unknown key"));
            }
            if let Some((_, first)) = raw.values.get(key) {
                return Err(CliError::config(
                    key,
                    origin,
                    &format!("already set at {first}"),
                ));
            }
            raw.values
                .insert(key.to_string(), (value.to_string(), origin));
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(
                &path.display().to_string(),
                Origin::Flag,
                &format!("cannot read: {e}"),
            )
        })?;
        Self::parse(&text, path)
    }

    /// Applies `--key=value` overrides, which replace file values.
    pub fn apply_overrides(&mut self, flags: &[String]) -> Result<(), CliError> {
        for flag in flags {
            let body = flag.trim_start_matches("--");
            let Some((key, value)) = body.split_once('=') else {
                return Err(CliError::config(body, Origin::Flag, "expected --key=value"));
            };
            if !known(key) {
                return Err(CliError::config(key, Origin::Flag, "unknown key"));
            }
            self.values
                .insert(key.to_string(), (value.trim().to_string(), Origin::Flag));
        }
        Ok(())
    }

    fn get(&self, key: &'static str) -> Option<(&str, Origin)> {
        if let Some((v, o)) = self.values.get(key) {
            return Some((v.as_str(), o.clone()));
        }
        KEYS.iter()
            .find(|(k, _, _)| *k == key)
            .filter(|(_, d, _)| !d.is_empty())
            .map(|(_, d, _)| (*d, Origin::Default))
    }

    fn typed<T: std::str::FromStr>(&self, key: &'static str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some((v, origin)) => v.parse().map(Some).map_err(|_| {
                CliError::config(
                    key,
                    origin,
                    &format!("cannot parse {v:?} as {}", std::any::type_name::<T>()),
                )
            }),
        }
    }

    fn required<T: std::str::FromStr>(&self, key: &'static str) -> Result<T, CliError> {
        self.typed(key)?
            .ok_or_else(|| CliError::config(key, Origin::Default, "missing value"))
    }

    /// Lays `other` over `self`; its values win.
    pub fn overlay(&mut self, other: RawConfig) {
        self.values.extend(other.values);
    }

    fn origin(&self, key: &str) -> Origin {
        self.values
            .get(key)
            .map(|(_, o)| o.clone())
            .unwrap_or(Origin::Default)
    }
}

/// Fully resolved experiment settings. All computations are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: TwoHarmonicModel,
    pub window: GaussianWindow,
    pub grid: TfGrid,
    pub squeeze: SqueezeConfig,
    pub squeeze_field: bool,
    pub special_k: i64,
    pub n_xi: usize,
    pub thetas: Vec<f64>,
    pub critical_steps: usize,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn resolve(raw: &RawConfig) -> Result<Self, CliError> {
        // Library rejections name the parameter; map it back to its key when possible.
        let lib = |section: &'static str, fallback: &'static str| {
            move |e: spectral_interference::Error| {
                let key = match &e {
                    spectral_interference::Error::InvalidParameter { name, .. } => KEYS
                        .iter()
                        .map(|(k, _, _)| *k)
                        .find(|k| {
                            k.strip_prefix(section).and_then(|r| r.strip_prefix('.')) == Some(*name)
                        })
                        .unwrap_or(fallback),
                    _ => fallback,
                };
                CliError::config(key, raw.origin(key), &e.to_string())
            }
        };
        let xi0: f64 = raw.required("model.xi0")?;
        let delta: f64 = raw.required("model.delta")?;
        let a: f64 = raw.required("model.a")?;
        let sigma: f64 = raw.required("model.sigma")?;
        let model = TwoHarmonicModel::new(xi0, delta, a).map_err(lib("model", "model.delta"))?;
        let window = GaussianWindow::new(sigma).map_err(lib("model", "model.sigma"))?;

        let t_min: f64 = raw.required("grid.t_min")?;
        let t_max: f64 = raw.typed("grid.t_max")?.unwrap_or(2.0 / delta);
        let eta_min: f64 = raw.typed("grid.eta_min")?.unwrap_or(xi0 - 0.5);
        let eta_max: f64 = raw.typed("grid.eta_max")?.unwrap_or(model.xi1() + 0.5);
        let grid = TfGrid::new(
            t_min,
            t_max,
            raw.required("grid.n_t")?,
            eta_min,
            eta_max,
            raw.required("grid.n_eta")?,
        )
        .map_err(lib("grid", "grid.t_max"))?;

        let alpha: f64 = raw.required("squeeze.alpha")?;
        let r: f64 = raw.required("squeeze.r")?;
        let (weighting, origin) = raw.get("squeeze.weighting").expect("has default");
        let mut squeeze = match weighting {
            "stft" => SqueezeConfig::stft(alpha),
            "indicator" => SqueezeConfig::indicator(alpha, r),
            other => {
                return Err(CliError::config(
                    "squeeze.weighting",
                    origin,
                    &format!("expected stft or indicator, got {other:?}"),
                ))
            }
        };
        let (mode, origin) = raw.get("squeeze.mode").expect("has default");
        squeeze.mode = match mode {
            "sync" => ReassignMode::Sync,
            "phase" => ReassignMode::Phase,
            other => {
                return Err(CliError::config(
                    "squeeze.mode",
                    origin,
                    &format!("expected sync or phase, got {other:?}"),
                ))
            }
        };
        squeeze
            .validate(&model, &window)
            .map_err(lib("squeeze", "squeeze.alpha"))?;

        let (list, origin) = raw.get("reassign.thetas").expect("has default");
        let thetas = list
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| {
                CliError::config(
                    "reassign.thetas",
                    origin,
                    &format!("expected a comma list of numbers, got {list:?}"),
                )
            })?;

        let n_xi: usize = raw.required("squeeze.n_xi")?;
        if n_xi < 2 {
            return Err(CliError::config(
                "squeeze.n_xi",
                raw.origin("squeeze.n_xi"),
                "need at least 2",
            ));
        }
        Ok(Self {
            model,
            window,
            grid,
            squeeze,
            squeeze_field: raw.required("squeeze.field")?,
            special_k: raw.required("squeeze.k")?,
            n_xi,
            thetas,
            critical_steps: raw.required("critical.steps")?,
            out_dir: PathBuf::from(raw.required::<String>("output.dir")?),
        })
    }

    /// Resolved values under their dotted keys, for the metadata sidecar.
    pub fn echo(&self) -> BTreeMap<&'static str, serde_json::Value> {
        use serde_json::json;
        let (weighting, r) = match self.squeeze.weighting {
            Weighting::Stft => ("stft", None),
            Weighting::Indicator { r } => ("indicator", Some(r)),
        };
        let g = &self.grid;
        BTreeMap::from([
            ("model.xi0", json!(self.model.xi0)),
            ("model.delta", json!(self.model.delta)),
            ("model.a", json!(self.model.a)),
            ("model.sigma", json!(self.window.sigma)),
            ("grid.t_min", json!(g.t_min)),
            ("grid.t_max", json!(g.t_max)),
            ("grid.n_t", json!(g.n_t)),
            ("grid.eta_min", json!(g.eta_min)),
            ("grid.eta_max", json!(g.eta_max)),
            ("grid.n_eta", json!(g.n_eta)),
            ("squeeze.alpha", json!(self.squeeze.alpha)),
            ("squeeze.weighting", json!(weighting)),
            ("squeeze.r", json!(r)),
            (
                "squeeze.mode",
                json!(match self.squeeze.mode {
                    ReassignMode::Sync => "sync",
                    ReassignMode::Phase => "phase",
                }),
            ),
            ("squeeze.field", json!(self.squeeze_field)),
            ("squeeze.k", json!(self.special_k)),
            ("squeeze.n_xi", json!(self.n_xi)),
            ("reassign.thetas", json!(self.thetas)),
            ("critical.steps", json!(self.critical_steps)),
            ("output.dir", json!(self.out_dir.display().to_string())),
        ])
    }
}

/// Named parameter sets, all with `σ = √2` and `ξ0 = 1`.
pub const PRESETS: &[(&str, &str)] = &[
    ("a1.3-d1", include_str!("../presets/a1.3-d1.cfg")),
    ("a1.3-d0.3", include_str!("../presets/a1.3-d0.3.cfg")),
    ("a1-d0.3", include_str!("../presets/a1-d0.3.cfg")),
    ("a1-d0.15", include_str!("../presets/a1-d0.15.cfg")),
];

pub fn preset(name: &str) -> Result<RawConfig, CliError> {
    let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        CliError::config(
            name,
            Origin::Flag,
            &format!("unknown preset; available: {}", names.join(", ")),
        )
    })?;
    RawConfig::parse(text, Path::new(&format!("preset:{name}")))
}

/// Splits `--section.key=value` overrides from the remaining arguments.
pub fn split_overrides(args: impl IntoIterator<Item = String>) -> (Vec<String>, Vec<String>) {
    args.into_iter().partition(|a| {
        a.starts_with("--") && a.split_once('=').is_some_and(|(k, _)| k.contains('.'))
    })
}
