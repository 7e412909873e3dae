//! Experiment reports and the static threshold table.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Params;

pub const REPORT_SCHEMA_VERSION: &str = "1.0";

const THRESHOLD_TABLE: &str = include_str!("../../data/thresholds.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub metric: String,
    pub op: Comparison,
    pub value: f64,
}

impl Threshold {
    pub fn holds(&self, x: f64) -> bool {
        match self.op {
            Comparison::Le => x <= self.value,
            Comparison::Ge => x >= self.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub version: String,
    pub experiments: BTreeMap<String, Vec<Threshold>>,
}

pub fn threshold_table() -> &'static ThresholdTable {
    static TABLE: OnceLock<ThresholdTable> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(THRESHOLD_TABLE).expect("embedded threshold table parses"))
}

pub fn thresholds_for(experiment: &str) -> Result<Vec<Threshold>> {
    threshold_table()
        .experiments
        .get(experiment)
        .cloned()
        .ok_or_else(|| Error::InvalidConfig(format!("no thresholds for experiment `{experiment}`")))
}

/// Pass iff every threshold names a present, finite metric that satisfies it.
pub fn evaluate(metrics: &BTreeMap<String, f64>, thresholds: &[Threshold]) -> bool {
    thresholds.iter().all(|t| {
        metrics
            .get(&t.metric)
            .is_some_and(|&x| x.is_finite() && t.holds(x))
    })
}

/// Named table of numbers, written as CSV by the front end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_owned(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: String,
    pub thresholds_version: String,
    pub experiment: String,
    pub params: Option<Params>,
    pub config: serde_json::Value,
    pub pass: bool,
    pub metrics: BTreeMap<String, f64>,
    /// Metrics that came out non-finite; they are absent from `metrics`,
    /// so any threshold on them fails.
    #[serde(default)]
    pub undefined_metrics: Vec<String>,
    pub thresholds: Vec<Threshold>,
    #[serde(default)]
    pub notes: Vec<String>,
    /// Names of the series produced alongside the report.
    #[serde(default)]
    pub series: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub series: Vec<Series>,
}

/// Incremental construction of a report.
pub struct ReportBuilder {
    experiment: String,
    params: Option<Params>,
    config: serde_json::Value,
    metrics: BTreeMap<String, f64>,
    undefined: Vec<String>,
    notes: Vec<String>,
    series: Vec<Series>,
}

impl ReportBuilder {
    pub fn new(experiment: &str, params: Option<Params>, config: &impl Serialize) -> Self {
        Self {
            experiment: experiment.to_owned(),
            params,
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            metrics: BTreeMap::new(),
            undefined: Vec::new(),
            notes: Vec::new(),
            series: Vec::new(),
        }
    }

    /// Non-finite values have no JSON form; they are listed by name instead.
    pub fn metric(&mut self, name: &str, value: f64) -> &mut Self {
        if value.is_finite() {
            self.metrics.insert(name.to_owned(), value);
        } else {
            self.undefined.push(name.to_owned());
        }
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn series(&mut self, s: Series) -> &mut Self {
        self.series.push(s);
        self
    }

    pub fn finish(self) -> Result<ExperimentOutput> {
        let thresholds = thresholds_for(&self.experiment)?;
        let pass = evaluate(&self.metrics, &thresholds);
        Ok(ExperimentOutput {
            report: ExperimentReport {
                schema_version: REPORT_SCHEMA_VERSION.to_owned(),
                thresholds_version: threshold_table().version.clone(),
                experiment: self.experiment,
                params: self.params,
                config: self.config,
                pass,
                metrics: self.metrics,
                undefined_metrics: self.undefined,
                thresholds,
                notes: self.notes,
                series: self.series.iter().map(|s| s.name.clone()).collect(),
            },
            series: self.series,
        })
    }
}
