//! Run configuration: an optional JSON file, overridden by command-line flags.

use clap::{Args, ValueEnum};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Flags shared by every subcommand. Lists are comma separated.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON file with any of the settings below (flags take precedence).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Time parameter, or a list of them for `droplet`.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub t: Option<Vec<f64>>,
    /// Override for the constant A (`curve` only).
    #[arg(long = "A", global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Polynomial degree, or a list of them for `theta`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Margin for the admissible degrees.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Quadrature tolerance for period integrals and moments.
    #[arg(long = "tol-quad", global = true)]
    pub tol_quad: Option<f64>,
    /// Residual tolerance for computed roots.
    #[arg(long = "tol-root", global = true)]
    pub tol_root: Option<f64>,
    /// Samples per axis (angles, grid points, sheet samples).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Range and step count for `boutroux`.
    #[arg(long = "t-min", global = true)]
    pub t_min: Option<f64>,
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Highest harmonic moment for `moments`.
    #[arg(long = "k-max", global = true)]
    pub k_max: Option<u32>,
    /// Offsets from the critical time for `perturb`.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub dt: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    t: Option<OneOrMany<f64>>,
    #[serde(rename = "A")]
    a: Option<f64>,
    n: Option<OneOrMany<usize>>,
    eps: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    tol_quad: Option<f64>,
    tol_root: Option<f64>,
    grid: Option<usize>,
    t_min: Option<f64>,
    t_max: Option<f64>,
    steps: Option<usize>,
    k_max: Option<u32>,
    dt: Option<OneOrMany<f64>>,
}

/// Fully resolved settings. Command-specific defaults are applied by the
/// commands themselves, so list fields stay optional here.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t: Option<Vec<f64>>,
    pub a: Option<f64>,
    pub n: Option<Vec<usize>>,
    pub eps: f64,
    pub out: PathBuf,
    pub format: Option<Format>,
    pub tol_quad: f64,
    pub tol_root: f64,
    pub grid: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
    pub k_max: u32,
    pub dt: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self, String> {
        let file = match &flags.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let cfg = RunConfig {
            t: flags.t.clone().or(file.t.map(OneOrMany::into_vec)),
            a: flags.a.or(file.a),
            n: flags.n.clone().or(file.n.map(OneOrMany::into_vec)),
            eps: flags.eps.or(file.eps).unwrap_or(0.05),
            out: flags
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            format: flags.format.or(file.format),
            tol_quad: flags.tol_quad.or(file.tol_quad).unwrap_or(1e-10),
            tol_root: flags.tol_root.or(file.tol_root).unwrap_or(1e-8),
            grid: flags.grid.or(file.grid).unwrap_or(128),
            t_min: flags.t_min.or(file.t_min).unwrap_or(0.13),
            t_max: flags.t_max.or(file.t_max).unwrap_or(3.5),
            steps: flags.steps.or(file.steps).unwrap_or(20),
            k_max: flags.k_max.or(file.k_max).unwrap_or(5),
            dt: flags.dt.clone().or(file.dt.map(OneOrMany::into_vec)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        for (name, v) in [("tol-quad", self.tol_quad), ("tol-root", self.tol_root)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if self.grid < 8 {
            return Err(format!("grid must be at least 8, got {}", self.grid));
        }
        if !(0.0..0.5).contains(&self.eps) {
            return Err(format!("eps must lie in [0, 1/2), got {}", self.eps));
        }
        if let Some(ts) = &self.t {
            if ts.is_empty() || ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                return Err(format!("t must be a list of positive numbers, got {ts:?}"));
            }
        }
        if let Some(ns) = &self.n {
            if ns.is_empty() {
                return Err("n must not be empty".into());
            }
        }
        if let Some(a) = self.a {
            if !a.is_finite() {
                return Err(format!("A must be finite, got {a}"));
            }
        }
        if let Some(dts) = &self.dt {
            if dts.is_empty() || dts.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                return Err(format!(
                    "dt must be a list of positive numbers, got {dts:?}"
                ));
            }
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max.is_finite()) {
            return Err(format!(
                "need 0 < t-min < t-max, got {} and {}",
                self.t_min, self.t_max
            ));
        }
        if self.steps < 2 {
            return Err(format!("steps must be at least 2, got {}", self.steps));
        }
        Ok(())
    }

    /// The single `t` of a command, or its default.
    pub fn single_t(&self, default: f64) -> Result<f64, String> {
        match self.t.as_deref() {
            None => Ok(default),
            Some([t]) => Ok(*t),
            Some(ts) => Err(format!("this command takes one t, got {}", ts.len())),
        }
    }

    pub fn single_n(&self, default: usize) -> Result<usize, String> {
        match self.n.as_deref() {
            None => Ok(default),
            Some([n]) => Ok(*n),
            Some(ns) => Err(format!("this command takes one n, got {}", ns.len())),
        }
    }
}

fn read_file(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config file {}: {e}", path.display()))
}
