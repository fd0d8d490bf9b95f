//! Experiment configuration: a TOML file, command-line flags and environment overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::LabError;

pub const ENV_OUT: &str = "TMS_LAB_OUT";
pub const ENV_THREADS: &str = "TMS_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Twobody,
    Stm3,
    Fermi21,
    Kvb,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Twobody => "twobody",
            Command::Stm3 => "stm3",
            Command::Fermi21 => "fermi21",
            Command::Kvb => "kvb",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: Option<usize>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub mass: Option<f64>,
    pub ell: Option<usize>,
    pub levels: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Raw configuration as read from file or flags; every field but `command` is optional and
/// filled from the suite defaults by [`ExperimentConfig::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            grid: GridConfig::default(),
            physics: PhysicsConfig::default(),
            tolerances: BTreeMap::new(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str, path: &Path) -> Result<Self, LabError> {
        toml::from_str(text).map_err(|source| LabError::ConfigParse { path: path.to_owned(), source })
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_toml(&text, path)
    }

    /// Values set in `other` win.
    pub fn overlay(&mut self, other: &ExperimentConfig) {
        macro_rules! take {
            ($($sec:ident . $f:ident),*) => {$(
                if other.$sec.$f.is_some() {
                    self.$sec.$f = other.$sec.$f.clone();
                }
            )*};
        }
        take!(grid.n, grid.p_min, grid.p_max, physics.alpha, physics.lambda, physics.mass, physics.ell, physics.levels, output.dir, output.threads);
        self.tolerances.extend(other.tolerances.iter().map(|(k, v)| (k.clone(), *v)));
    }

    /// Applies `TMS_LAB_OUT` / `TMS_LAB_THREADS` where the corresponding field is unset by flags.
    pub fn apply_env(&mut self, flags: &ExperimentConfig) -> Result<(), LabError> {
        if flags.output.dir.is_none() {
            if let Some(dir) = std::env::var_os(ENV_OUT) {
                self.output.dir = Some(dir.into());
            }
        }
        if flags.output.threads.is_none() {
            if let Ok(t) = std::env::var(ENV_THREADS) {
                let n = t.trim().parse().map_err(|_| LabError::Config(format!("{ENV_THREADS}={t} is not a thread count")))?;
                self.output.threads = Some(n);
            }
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<Resolved, LabError> {
        let d = Defaults::of(self.command);
        let bad = |msg: &str| Err(LabError::Config(msg.to_string()));
        let n = self.grid.n.unwrap_or(d.n);
        let p_min = self.grid.p_min.unwrap_or(d.p_min);
        let p_max = self.grid.p_max.unwrap_or(d.p_max);
        if n < 8 || !n.is_multiple_of(8) {
            return bad("grid.n must be a positive multiple of 8");
        }
        if !(p_min > 0.0 && p_max > p_min && p_max.is_finite()) {
            return bad("grid bounds must satisfy 0 < p_min < p_max < inf");
        }
        let alpha = self.physics.alpha.unwrap_or(d.alpha);
        let lambda = self.physics.lambda.unwrap_or(d.lambda);
        let mass = self.physics.mass.unwrap_or(d.mass);
        let ell = self.physics.ell.unwrap_or(d.ell);
        let levels = self.physics.levels.unwrap_or(d.levels);
        if !alpha.is_finite() {
            return bad("alpha must be finite");
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return bad("lambda must be positive");
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return bad("mass must be positive");
        }
        if ell > 12 {
            return bad("ell must not exceed 12");
        }
        if levels < 3 {
            return bad("at least 3 levels are required");
        }
        let threads = match self.output.threads {
            Some(0) => return bad("thread count must be positive"),
            Some(t) => t,
            None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        };
        let known = crate::suites::tolerances(self.command);
        let mut tolerances: BTreeMap<String, f64> = known.iter().map(|&(k, v)| (k.to_string(), v)).collect();
        for (k, &v) in &self.tolerances {
            if !tolerances.contains_key(k) {
                let names: Vec<&str> = known.iter().map(|t| t.0).collect();
                return Err(LabError::Config(format!("unknown tolerance `{k}` for {}; known: {}", self.command.name(), names.join(", "))));
            }
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::Config(format!("tolerance `{k}` must be positive")));
            }
            tolerances.insert(k.clone(), v);
        }
        Ok(Resolved {
            command: self.command,
            n,
            p_min,
            p_max,
            alpha,
            lambda,
            mass,
            ell,
            levels,
            tolerances,
            out: self.output.dir.clone().unwrap_or_else(|| PathBuf::from("tmslab-out")),
            threads,
        })
    }
}

/// Fully specified inputs of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub command: Command,
    pub n: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub mass: f64,
    pub ell: usize,
    pub levels: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub out: PathBuf,
    pub threads: usize,
}

impl Resolved {
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn grid(&self) -> Result<tmslab_core::quad::RadialGrid, LabError> {
        use crate::error::Context;
        tmslab_core::quad::build_grid(tmslab_core::quad::GridScheme::GaussLegendreComposite, self.n, self.p_min, self.p_max)
            .context("grid")
    }
}

struct Defaults {
    n: usize,
    p_min: f64,
    p_max: f64,
    alpha: f64,
    lambda: f64,
    mass: f64,
    ell: usize,
    levels: usize,
}

impl Defaults {
    fn of(command: Command) -> Self {
        use tmslab_core::quad::{DEFAULT_GRID_N, DEFAULT_P_MAX, DEFAULT_P_MIN};
        let base = Defaults {
            n: DEFAULT_GRID_N,
            p_min: DEFAULT_P_MIN,
            p_max: DEFAULT_P_MAX,
            alpha: 0.0,
            lambda: 1.0,
            mass: 1.0,
            ell: 0,
            levels: 4,
        };
        match command {
            Command::Twobody | Command::Kvb => Defaults { alpha: -1.0 / (4.0 * std::f64::consts::PI), ..base },
            // 32 nodes per decade on [1e-3, 1e5]: room for shells of radius 1e4.
            Command::Fermi21 => Defaults { n: 256, p_min: 1e-3, p_max: 1e5, ell: 1, ..base },
            Command::Stm3 | Command::Report => base,
        }
    }
}
