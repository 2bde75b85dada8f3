//! Run report and its JSON / CSV renderings.

use std::collections::BTreeMap;

use curvjet_core::verify::{IdentityReport, Status};
use serde::Serialize;
use serde_json::Value;

use crate::config::Check;
use crate::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Error,
    NotApplicable,
    Exploratory,
}

impl CheckStatus {
    pub fn name(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Error => "error",
            CheckStatus::NotApplicable => "not_applicable",
            CheckStatus::Exploratory => "exploratory",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, CheckStatus::Fail | CheckStatus::Error)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    #[serde(serialize_with = "finite_or_null")]
    pub residual: f64,
    pub tolerance: f64,
    pub status: &'static str,
}

fn finite_or_null<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

impl From<&IdentityReport> for Entry {
    fn from(r: &IdentityReport) -> Entry {
        Entry {
            name: r.name.clone(),
            residual: r.residual,
            tolerance: r.tolerance,
            status: r.status.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: Check,
    pub status: CheckStatus,
    /// Largest finite residual among judged entries.
    pub max_residual: Option<f64>,
    pub entries: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<&'static str, Value>,
}

impl CheckRecord {
    pub fn from_reports(check: Check, reports: &[IdentityReport]) -> CheckRecord {
        let judged = |r: &&IdentityReport| matches!(r.status, Status::Pass | Status::Fail);
        let status = if reports.iter().any(|r| r.status == Status::Fail) {
            CheckStatus::Fail
        } else if reports.iter().any(|r| r.status == Status::Pass) {
            CheckStatus::Pass
        } else if reports.iter().any(|r| r.status == Status::Exploratory) {
            CheckStatus::Exploratory
        } else {
            CheckStatus::NotApplicable
        };
        let max_residual = reports
            .iter()
            .filter(judged)
            .map(|r| r.residual)
            .filter(|x| x.is_finite())
            .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
        CheckRecord {
            check,
            status,
            max_residual,
            entries: reports.iter().map(Entry::from).collect(),
            error: None,
            values: BTreeMap::new(),
        }
    }

    pub fn errored(check: Check, message: String) -> CheckRecord {
        CheckRecord {
            check,
            status: CheckStatus::Error,
            max_residual: None,
            entries: Vec::new(),
            error: Some(message),
            values: BTreeMap::new(),
        }
    }

    pub fn with_value(mut self, key: &'static str, value: Value) -> CheckRecord {
        self.values.insert(key, value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub point: Vec<f64>,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRecord {
    pub label: String,
    pub family: String,
    pub dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub points: Vec<PointRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub points_per_metric: usize,
    pub kappa: f64,
    pub checks: Vec<Check>,
    pub tolerances: BTreeMap<&'static str, f64>,
    pub versions: BTreeMap<&'static str, &'static str>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub metrics: usize,
    pub points: usize,
    pub checks: usize,
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
    pub not_applicable: usize,
    pub exploratory: usize,
    /// Metrics whose sampling failed before any check ran.
    pub metric_errors: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub run_metadata: RunMetadata,
    pub metrics: Vec<MetricRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(run_metadata: RunMetadata, metrics: Vec<MetricRecord>) -> Report {
        let mut s = Summary {
            metrics: metrics.len(),
            ..Summary::default()
        };
        for m in &metrics {
            s.metric_errors += m.error.is_some() as usize;
            s.points += m.points.len();
            for c in m.points.iter().flat_map(|p| &p.checks) {
                s.checks += 1;
                match c.status {
                    CheckStatus::Pass => s.pass += 1,
                    CheckStatus::Fail => s.fail += 1,
                    CheckStatus::Error => s.error += 1,
                    CheckStatus::NotApplicable => s.not_applicable += 1,
                    CheckStatus::Exploratory => s.exploratory += 1,
                }
            }
        }
        s.passed = s.fail == 0 && s.error == 0 && s.metric_errors == 0;
        Report {
            run_metadata,
            metrics,
            summary: s,
        }
    }

    /// 0 when every judged check passed, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.summary.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        json::to_string(self)
    }

    /// One row per (metric, check).
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = [
            "metric", "check", "points", "max_residual", "pass", "fail", "error",
            "not_applicable", "exploratory", "passed",
        ];
        w.write_record(header).expect("in-memory write");
        for m in &self.metrics {
            for check in &self.run_metadata.checks {
                let records: Vec<&CheckRecord> = m
                    .points
                    .iter()
                    .flat_map(|p| &p.checks)
                    .filter(|c| c.check == *check)
                    .collect();
                let count = |s: CheckStatus| records.iter().filter(|c| c.status == s).count();
                let max = records
                    .iter()
                    .filter_map(|c| c.max_residual)
                    .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
                let failed = count(CheckStatus::Fail) + count(CheckStatus::Error);
                let passed = failed == 0 && m.error.is_none();
                w.write_record([
                    m.label.clone(),
                    check.name().to_string(),
                    records.len().to_string(),
                    max.map_or(String::new(), |x| format!("{x:.16e}")),
                    count(CheckStatus::Pass).to_string(),
                    count(CheckStatus::Fail).to_string(),
                    count(CheckStatus::Error).to_string(),
                    count(CheckStatus::NotApplicable).to_string(),
                    count(CheckStatus::Exploratory).to_string(),
                    passed.to_string(),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv emits UTF-8")
    }
}
