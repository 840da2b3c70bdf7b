//! Config-driven experiment driver behind the `scalevar` binary.
//!
//! A run reads an [`ExperimentConfig`], executes one experiment kind (or the
//! whole suite), and writes `report.json`, one CSV per data set, and plain
//! two-column plot files. Output depends only on the config.

mod kinds;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::asymptotics::LadderSpec;
use crate::curves::{CurveDomain, CurveSpec};
use crate::error::Error;
use crate::qcalc::PolyField;
use crate::schrodinger::{GridSpec, WaveFunctionConfig};
use crate::variational::LagrangianConfig;

pub use output::{emit_plot_data, write_outputs};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Ops,
    Leibniz,
    Chain,
    Integral,
    Holder,
    Variational,
    Scaling,
    Schrodinger,
    Dominant,
    Suite,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::Ops,
        ExperimentKind::Leibniz,
        ExperimentKind::Chain,
        ExperimentKind::Integral,
        ExperimentKind::Holder,
        ExperimentKind::Variational,
        ExperimentKind::Scaling,
        ExperimentKind::Schrodinger,
        ExperimentKind::Dominant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Ops => "ops",
            ExperimentKind::Leibniz => "leibniz",
            ExperimentKind::Chain => "chain",
            ExperimentKind::Integral => "integral",
            ExperimentKind::Holder => "holder",
            ExperimentKind::Variational => "variational",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::Schrodinger => "schrodinger",
            ExperimentKind::Dominant => "dominant",
            ExperimentKind::Suite => "suite",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub mass: f64,
    pub hbar: f64,
    /// Defaults to `hbar / 2 mass`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_d: Option<f64>,
}

/// One experiment. Every field but `kind` is optional; unset fields take
/// per-kind defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<LadderSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<CurveDomain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    /// Number of curve pairs (leibniz) or random tuples (variational).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub battery: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<PolyField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lagrangian: Option<LagrangianConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wavefunctions: Vec<WaveFunctionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physics: Option<PhysicsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            seed: 0,
            tolerance: None,
            ladder: None,
            out: None,
            domain: None,
            quadrature_points: None,
            probes: None,
            pairs: None,
            battery: None,
            epsilon: None,
            curves: Vec::new(),
            fields: Vec::new(),
            lagrangian: None,
            wavefunctions: Vec::new(),
            physics: None,
            grid: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// Malformed or inconsistent configuration; exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), passed: value <= limit, value, limit, detail: String::new() }
    }

    /// Passes when `value >= limit`.
    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), passed: value >= limit, value, limit, detail: String::new() }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    None,
    /// Columns `(epsilon, magnitude)`; plotted as log-log.
    Scaling,
    /// Columns `(x, t, re, im)`; one plot file per `t`.
    Pde,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSet {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub plot: PlotKind,
}

impl DataSet {
    pub fn new(name: impl Into<String>, columns: &[&str], plot: PlotKind) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), plot }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindResult {
    pub kind: ExperimentKind,
    pub checks: Vec<Check>,
    pub data: Vec<DataSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl KindResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub results: Vec<KindResult>,
    pub verdict: bool,
}

impl Report {
    pub fn failing_checks(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.results {
            if let Some(e) = &r.error {
                out.push(format!("{}: {e}", r.kind));
            }
            for c in r.checks.iter().filter(|c| !c.passed) {
                out.push(format!("{}/{} (value {:.6e}, limit {:.6e})", r.kind, c.name, c.value, c.limit));
            }
        }
        out
    }

    /// 0 when every verdict passes, 1 otherwise.
    pub fn exit_status(&self) -> i32 {
        if self.verdict {
            0
        } else {
            1
        }
    }
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter(_)
            | Error::Domain { .. }
            | Error::Inadmissible { .. }
            | Error::NotAVariation
            | Error::MissingPartial(_)
    )
}

/// Runs the experiment and returns its report without touching the file
/// system. Parameter errors surface as [`ConfigError`]; numerical failures
/// are recorded in the report.
pub fn run(config: &ExperimentConfig) -> Result<Report, ConfigError> {
    let kinds: Vec<ExperimentKind> = match config.kind {
        ExperimentKind::Suite => ExperimentKind::ALL.to_vec(),
        k => vec![k],
    };
    let mut results = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let result = match kinds::run_kind(kind, config) {
            Ok(r) => r,
            Err(e) if is_usage_error(&e) => return Err(ConfigError(format!("{kind}: {e}"))),
            Err(e) => KindResult { kind, checks: Vec::new(), data: Vec::new(), error: Some(e.to_string()) },
        };
        results.push(result);
    }
    let verdict = results.iter().all(KindResult::passed);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        results,
        verdict,
    })
}
