use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub step: u64,
    pub metric: String,
    pub value: f64,
}

/// Append-only series of `(step, metric, value)` observations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricLog {
    rows: Vec<MetricRow>,
    last_step: HashMap<String, u64>,
}

impl MetricLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: u64, metric: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("metric `{metric}` at step {step}")));
        }
        if let Some(&prev) = self.last_step.get(metric) {
            if step < prev {
                return Err(Error::invalid(format!(
                    "metric `{metric}` went back from step {prev} to {step}"
                )));
            }
        }
        self.last_step.insert(metric.to_string(), step);
        self.rows.push(MetricRow {
            step,
            metric: metric.to_string(),
            value,
        });
        Ok(())
    }

    pub fn rows(&self) -> &[MetricRow] {
        &self.rows
    }

    pub fn series(&self, metric: &str) -> Vec<(u64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.metric == metric)
            .map(|r| (r.step, r.value))
            .collect()
    }

    pub fn last(&self, metric: &str) -> Option<f64> {
        self.rows.iter().rev().find(|r| r.metric == metric).map(|r| r.value)
    }

    /// `step,metric,value` header, one LF-terminated row per observation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,metric,value\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.step, r.metric, r.value);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|e| Error::file(path, e))
    }
}
