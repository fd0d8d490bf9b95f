use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Resolved;
use crate::error::LabError;

/// Columns of numbers; the first column is the abscissa when plotted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub log_x: bool,
    pub log_y: bool,
}

impl Series {
    pub fn new(columns: &[&str]) -> Self {
        Series { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), log_x: false, log_y: false }
    }

    pub fn log(mut self, x: bool, y: bool) -> Self {
        self.log_x = x;
        self.log_y = y;
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// Measured quantity; `None` when it is not a finite number.
    pub value: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment_id: String,
    pub command: String,
    pub input: BTreeMap<String, Value>,
    pub scalars: BTreeMap<String, Option<f64>>,
    pub series: BTreeMap<String, Series>,
    pub checks: BTreeMap<String, Check>,
    /// Free-text remarks, e.g. why a check was skipped.
    pub notes: BTreeMap<String, String>,
    pub wall_time_s: f64,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl ResultRecord {
    pub fn new(cfg: &Resolved) -> Self {
        let mut input = BTreeMap::new();
        input.insert("grid_n".into(), Value::from(cfg.n));
        input.insert("p_min".into(), Value::from(cfg.p_min));
        input.insert("p_max".into(), Value::from(cfg.p_max));
        input.insert("alpha".into(), Value::from(cfg.alpha));
        input.insert("lambda".into(), Value::from(cfg.lambda));
        input.insert("mass".into(), Value::from(cfg.mass));
        input.insert("ell".into(), Value::from(cfg.ell));
        input.insert("levels".into(), Value::from(cfg.levels));
        for (k, v) in &cfg.tolerances {
            input.insert(format!("tol_{k}"), Value::from(*v));
        }
        let echo = serde_json::to_string(&input).expect("input echo serializes");
        ResultRecord {
            experiment_id: format!("{}-{:016x}", cfg.command.name(), fnv1a(echo.as_bytes())),
            command: cfg.command.name().to_string(),
            input,
            scalars: BTreeMap::new(),
            series: BTreeMap::new(),
            checks: BTreeMap::new(),
            notes: BTreeMap::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn scalar(&mut self, name: &str, v: f64) {
        self.scalars.insert(name.to_string(), finite(v));
    }

    pub fn note(&mut self, name: &str, text: &str) {
        self.notes.insert(name.to_string(), text.to_string());
    }

    pub fn series(&mut self, name: &str, s: Series) {
        self.series.insert(name.to_string(), s);
    }

    /// Records a check that passes when `value <= tolerance`.
    pub fn check_below(&mut self, name: &str, value: f64, tolerance: f64, detail: impl Into<String>) {
        let passed = value <= tolerance;
        self.check(name, value, tolerance, passed, detail);
    }

    pub fn check(&mut self, name: &str, value: f64, tolerance: f64, passed: bool, detail: impl Into<String>) {
        self.checks.insert(name.to_string(), Check { value: finite(value), tolerance, passed: passed && !value.is_nan(), detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, c)| !c.passed).map(|(k, _)| k.as_str()).collect()
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|source| LabError::Json { path: path.to_owned(), source })
    }

    /// Copy with the timing field cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        ResultRecord { wall_time_s: 0.0, ..self.clone() }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Command, ExperimentConfig};

    #[test]
    fn json_round_trip() {
        let cfg = ExperimentConfig::new(Command::Kvb).resolve().unwrap();
        let mut r = ResultRecord::new(&cfg);
        r.scalar("tau", 1.0 / 3.0);
        r.scalar("nan", f64::NAN);
        r.scalar("tiny", 4.9e-324);
        let mut s = Series::new(&["lambda", "tau"]).log(true, false);
        s.push(vec![0.1, -2.0 / 7.0]);
        r.series("margins", s);
        r.check_below("x", 1e-17, 1e-12, "ok");
        r.check_below("y", f64::INFINITY, 1.0, "overflow");
        r.wall_time_s = 0.123;
        let back = ResultRecord::from_json(&r.to_json(), Path::new("r.json")).unwrap();
        assert_eq!(back, r);
        assert!(!r.passed());
        assert_eq!(r.failures(), vec!["y"]);
    }

    #[test]
    fn id_depends_on_inputs_only() {
        let a = ExperimentConfig::new(Command::Kvb).resolve().unwrap();
        let mut b = a.clone();
        b.threads = a.threads + 7;
        assert_eq!(ResultRecord::new(&a).experiment_id, ResultRecord::new(&b).experiment_id);
        b.lambda = 2.0;
        assert_ne!(ResultRecord::new(&a).experiment_id, ResultRecord::new(&b).experiment_id);
    }
}
