//! Versioned JSON run report shared by every analysis command.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use fnfpad::classify::{FeatureVector, Metrics};
use fnfpad::stats::SeparationReport;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const REPORT_SCHEMA: &str = "fnfpad-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct PairRow {
    pub pair_id: String,
    pub label: String,
    pub pai_type: String,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl From<&FeatureVector> for PairRow {
    fn from(v: &FeatureVector) -> Self {
        Self {
            pair_id: v.pair_id.clone(),
            label: v.class.as_str().into(),
            pai_type: v.pai_type.as_str().into(),
            values: v.values.clone(),
            flags: v.flags.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    /// Seconds since the Unix epoch; omitted in deterministic mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub created_unix: Option<u64>,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub feature_names: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<PairRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<SeparationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_metrics: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_metrics: Option<Metrics>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub predictions: Vec<Prediction>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Prediction {
    pub set: &'static str,
    pub pair_id: String,
    pub label: String,
    pub score: f64,
    pub predicted: String,
}

impl RunReport {
    pub fn new(command: &str, config: serde_json::Value, deterministic: bool) -> Self {
        let created_unix = (!deterministic).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self {
            schema: REPORT_SCHEMA,
            command: command.into(),
            created_unix,
            config,
            feature_names: Vec::new(),
            pairs: Vec::new(),
            separation: None,
            train_metrics: None,
            test_metrics: None,
            predictions: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}
