use std::io::Write;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Where a check's target comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Formula,
    Golden,
    Tolerance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: Value,
    pub target: Value,
    pub provenance: Provenance,
    /// Present exactly when `status` is `fail`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Check {
    /// Pass iff `ok`; `witness` is attached only on failure.
    pub fn new(name: impl Into<String>, ok: bool, measured: Value, target: Value, provenance: Provenance, witness: Value) -> Self {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            target,
            provenance,
            witness: (!ok).then_some(witness),
        }
    }

    pub fn skipped(name: impl Into<String>, reason: &str) -> Self {
        Check {
            name: name.into(),
            status: Status::Skipped,
            measured: Value::Null,
            target: Value::Null,
            provenance: Provenance::Formula,
            witness: None,
        }
        .with_reason(reason)
    }

    fn with_reason(mut self, reason: &str) -> Self {
        self.measured = Value::String(reason.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    /// Computed objects; shape depends on the subcommand.
    pub data: Value,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Skipped => "skipped",
    }
}

fn provenance_str(p: Provenance) -> &'static str {
    match p {
        Provenance::Formula => "formula",
        Provenance::Golden => "golden",
        Provenance::Tolerance => "tolerance",
    }
}

pub fn render(report: &Report, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["command", "name", "status", "measured", "target", "provenance", "witness"])?;
            for c in &report.checks {
                w.write_record([
                    report.command.as_str(),
                    &c.name,
                    status_str(c.status),
                    &cell(&c.measured),
                    &cell(&c.target),
                    provenance_str(c.provenance),
                    &c.witness.as_ref().map(cell).unwrap_or_default(),
                ])?;
            }
            w.flush()?;
        }
        Format::Text => {
            writeln!(out, "{}", report.command)?;
            for c in &report.checks {
                write!(
                    out,
                    "  {:<7} {}: measured {} target {} ({})",
                    status_str(c.status).to_uppercase(),
                    c.name,
                    cell(&c.measured),
                    cell(&c.target),
                    provenance_str(c.provenance)
                )?;
                if let Some(w) = &c.witness {
                    write!(out, " witness {}", cell(w))?;
                }
                writeln!(out)?;
            }
            let failed = report.checks.iter().filter(|c| c.status == Status::Fail).count();
            writeln!(out, "{} checks, {} failed", report.checks.len(), failed)?;
        }
    }
    Ok(())
}
