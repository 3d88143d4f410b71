//! Run configuration, verification rows, and the JSON report.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::grid::GammaIndex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_max: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { x_max: 8.0, points: 96 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub gamma: Vec<f64>,
    pub grid: GridConfig,
    pub angles: usize,
    pub sphere_points: usize,
    pub eps_seq: Vec<f64>,
    /// Overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub output: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 2,
            gamma: vec![0.5, 1.5],
            grid: GridConfig::default(),
            angles: 48,
            sphere_points: 96,
            eps_seq: vec![0.4, 0.2, 0.1, 0.05],
            tolerances: BTreeMap::new(),
            output: "report.json".into(),
        }
    }
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma.len() != self.n {
            return Err(Error::Config(format!("gamma has {} entries, n = {}", self.gamma.len(), self.n)));
        }
        GammaIndex::new(self.gamma.clone()).map_err(|e| Error::Config(e.to_string()))?;
        if !(self.grid.x_max > 0.0) || self.grid.points < 8 {
            return Err(Error::Config("grid needs x_max > 0 and at least 8 points".into()));
        }
        if self.angles < 4 || self.sphere_points < 4 {
            return Err(Error::Config("angles and sphere_points must be at least 4".into()));
        }
        let eps = &self.eps_seq;
        if eps.len() < 2 || eps.windows(2).any(|w| !(w[1] < w[0])) || !(eps[eps.len() - 1] > 0.0) {
            return Err(Error::Config("eps_seq must be positive, decreasing, length >= 2".into()));
        }
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::Config(format!("tolerance for {k} must be positive, got {v}")));
        }
        Ok(())
    }

    pub fn gamma_index(&self) -> GammaIndex {
        GammaIndex::new(self.gamma.clone()).expect("validated")
    }

    /// Configured tolerance for `check`, else the built-in one.
    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }
}

/// How `pass` is decided from `computed`, `expected` and the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// `rel_err <= tol`.
    Rel,
    /// `abs_err <= tol`.
    Abs,
    /// `abs_err <= tol * max(|expected|, scale)`.
    Scaled,
    /// `computed <= expected + tol`.
    Bound,
    /// Reported only; passes when finite.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub check: String,
    pub kind: Kind,
    pub inputs: Value,
    pub computed: f64,
    pub expected: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl Row {
    pub fn new(check: &str, kind: Kind, inputs: Value, computed: f64, expected: f64, tol: f64) -> Self {
        Self::with_scale(check, kind, inputs, computed, expected, tol, 0.0)
    }

    pub fn with_scale(check: &str, kind: Kind, inputs: Value, computed: f64, expected: f64, tol: f64, scale: f64) -> Self {
        let abs_err = (computed - expected).abs();
        let rel_err = abs_err / expected.abs().max(1e-300);
        let pass = match kind {
            Kind::Rel => rel_err <= tol,
            Kind::Abs => abs_err <= tol,
            Kind::Scaled => abs_err <= tol * expected.abs().max(scale),
            Kind::Bound => computed <= expected + tol,
            Kind::Info => computed.is_finite(),
        };
        let mut extra = Map::new();
        if kind == Kind::Scaled {
            extra.insert("scale".into(), num(scale));
        }
        Self { check: check.into(), kind, inputs, computed, expected, abs_err, rel_err, tol, pass, extra }
    }

    /// A failed computation, recorded instead of aborting the run.
    pub fn failed(check: &str, inputs: Value, err: &Error) -> Self {
        let mut extra = Map::new();
        extra.insert("error".into(), Value::String(err.to_string()));
        Self {
            check: check.into(),
            kind: Kind::Info,
            inputs,
            computed: f64::NAN,
            expected: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            tol: 0.0,
            pass: false,
            extra,
        }
    }

    pub fn extra(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.into(), value);
        self
    }

    /// Marks the row failed, e.g. when a precondition flag is raised.
    pub fn require(mut self, ok: bool, reason: &str) -> Self {
        if !ok {
            self.pass = false;
            self.extra.insert("failed_precondition".into(), Value::String(reason.into()));
        }
        self
    }
}

/// JSON number, or null for non-finite values.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub config: RunConfig,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(suite: &str, config: RunConfig, rows: Vec<Row>) -> Self {
        let passed = rows.iter().filter(|r| r.pass).count();
        let summary = Summary { total: rows.len(), passed, failed: rows.len() - passed };
        Self { suite: suite.into(), config, rows, summary }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Wall time of one check group, kept out of the report so reports stay
/// byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub group: String,
    pub rows: usize,
    pub seconds: f64,
}

/// `<out>.timing.json` next to the report.
pub fn timing_path(report: &Path) -> std::path::PathBuf {
    let mut s = report.as_os_str().to_owned();
    s.push(".timing.json");
    s.into()
}

pub fn write_timing(path: &Path, timings: &[Timing]) -> Result<()> {
    let mut s = serde_json::to_string_pretty(timings).expect("timing serializes");
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

/// The report JSON schema shipped with the crate.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");
