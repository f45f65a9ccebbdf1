//! Report assembly and rendering.
//!
//! Every subcommand produces the same report shape: the run's configuration,
//! a summary of the instance it ran against, one row per trial, an
//! aggregate, and the merged oracle ledger. JSON is the full report; CSV
//! flattens the configuration into every trial row so concatenated sweeps
//! stay self-describing. Both renderings are deterministic: the same run
//! specification yields byte-identical output.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use cidcount::QueryLedger;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub config: C,
    pub instance_summary: Option<InstanceSummary>,
    pub per_trial: Vec<R>,
    pub aggregate: Aggregate,
    pub ledger: LedgerReport,
}

#[derive(Serialize)]
pub struct InstanceSummary {
    pub path: String,
    pub d: usize,
    pub n: u32,
    pub m: u64,
    pub m_ordered: u64,
}

#[derive(Serialize, Default)]
pub struct Aggregate {
    pub mean: f64,
    pub stdev: f64,
    pub band_hit_rate: f64,
}

/// Ledger totals plus their sum: every answered query costs one unit no
/// matter which flavor produced it, and simulated flavors already surface
/// their work as base-oracle ticks.
#[derive(Serialize)]
pub struct LedgerReport {
    pub cid: u64,
    pub cid1: u64,
    pub cid2: u64,
    pub cid2o: u64,
    pub cid_equivalent: u64,
}

impl From<&QueryLedger> for LedgerReport {
    fn from(ledger: &QueryLedger) -> Self {
        LedgerReport {
            cid: ledger.cid,
            cid1: ledger.cid1,
            cid2: ledger.cid2,
            cid2o: ledger.cid2o,
            cid_equivalent: ledger.total(),
        }
    }
}

/// One trial of `rough`, `exact`, or `estimate`. Fields that do not apply
/// to the subcommand stay null so each report keeps a fixed schema; the
/// trace is present only for `estimate`. Row field names avoid the config
/// field names so flattened CSV headers stay unambiguous.
#[derive(Serialize, Default)]
pub struct TrialRow {
    pub trial: u32,
    pub trial_seed: u64,
    pub outcome: String,
    pub value: Option<f64>,
    pub rung_log2: Option<u32>,
    pub band_lo: Option<f64>,
    pub band_hi: Option<f64>,
    pub band_hit: Option<bool>,
    pub relative_error: Option<f64>,
    pub iterations: Option<u64>,
    pub nodes: Option<u64>,
    pub fallback_used: Option<bool>,
    pub queries: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
}

/// One pipeline iteration, echoed from the estimator's trace.
#[derive(Serialize)]
pub struct TraceRow {
    pub step: &'static str,
    pub psi: f64,
    pub population: u64,
    pub est_proxy: f64,
    pub importance_scales: Vec<f64>,
}

/// One statistical check from `verify-claims`: the measured frequency, a
/// 95% confidence half-width, and the bound it was compared against.
#[derive(Serialize)]
pub struct CheckRow {
    pub check: String,
    pub samples: u64,
    pub measured: f64,
    pub bound: f64,
    pub comparison: String,
    pub ci_half_width: f64,
    pub pass: bool,
}

/// Sample mean and (n-1)-normalized standard deviation; zeros when there
/// is not enough data.
pub fn mean_stdev(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}

/// Normal-approximation 95% confidence half-width for a frequency.
pub fn rate_ci(rate: f64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    1.96 * (rate * (1.0 - rate) / trials as f64).sqrt()
}

pub fn render<C: Serialize, R: Serialize>(report: &Report<C, R>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(report).expect("report serializes to JSON");
            text.push('\n');
            text
        }
        Format::Csv => render_csv(report),
    }
}

fn render_csv<C: Serialize, R: Serialize>(report: &Report<C, R>) -> String {
    let config = scalar_fields(serde_json::to_value(&report.config).expect("config serializes"));
    let rows: Vec<Vec<(String, Value)>> = report
        .per_trial
        .iter()
        .map(|row| scalar_fields(serde_json::to_value(row).expect("row serializes")))
        .collect();

    let mut header: Vec<&str> = config.iter().map(|(k, _)| k.as_str()).collect();
    if let Some(first) = rows.first() {
        header.extend(first.iter().map(|(k, _)| k.as_str()));
    }

    let mut out = header.join(",");
    out.push('\n');
    for row in &rows {
        let mut cells: Vec<String> = config.iter().map(|(_, v)| cell(v)).collect();
        cells.extend(row.iter().map(|(_, v)| cell(v)));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Top-level scalar fields of a serialized struct, in serde_json's stable
/// (alphabetical) key order. Nested arrays and objects stay JSON-only.
fn scalar_fields(value: Value) -> Vec<(String, Value)> {
    match value {
        Value::Object(map) => map
            .into_iter()
            .filter(|(_, v)| !matches!(v, Value::Array(_) | Value::Object(_)))
            .collect(),
        _ => Vec::new(),
    }
}

fn cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(x) => x.to_string(),
        Value::String(s) => escape(s),
        Value::Array(_) | Value::Object(_) => unreachable!("filtered by scalar_fields"),
    }
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Write the rendered report to `--out` or stdout.
pub fn emit(text: &str, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}
