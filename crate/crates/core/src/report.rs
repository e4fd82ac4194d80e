//! Machine-readable run reports.
//!
//! Everything except `timing` is the canonical body: it depends only on the
//! run configuration, so two identical runs hash identically.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::identities::{GridEntry, Params, Verdict, VerificationResult};

pub const SCHEMA: &str = "qeuler-report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "pretty" => Ok(Format::Pretty),
            _ => Err(Error::Parse(format!("unknown format {s:?} (json, csv, pretty)"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// One verified cell, flattened to strings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationItem {
    pub id: String,
    pub params: String,
    pub printed_variant: bool,
    pub mode: Option<String>,
    pub verdict: Option<String>,
    pub certificate: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub oracles: Vec<OracleItem>,
    pub error: Option<String>,
}

impl VerificationItem {
    pub fn from_result(r: &VerificationResult) -> Self {
        VerificationItem {
            id: r.id.to_string(),
            params: r.params.to_string(),
            printed_variant: r.id.is_printed(),
            mode: Some(r.mode.to_string()),
            verdict: Some(r.verdict.to_string()),
            certificate: Some(r.certificate.to_string()),
            oracles: r
                .oracles
                .iter()
                .map(|o| OracleItem {
                    name: o.name.to_string(),
                    passed: o.passed,
                    detail: o.detail.clone(),
                })
                .collect(),
            error: None,
        }
    }

    pub fn from_entry(e: &GridEntry) -> Self {
        match &e.outcome {
            Ok(r) => VerificationItem::from_result(r),
            Err(err) => VerificationItem::error(e.id.to_string(), e.params, err),
        }
    }

    fn error(id: String, params: Params, err: &Error) -> Self {
        VerificationItem {
            printed_variant: id.ends_with("_PRINTED"),
            id,
            params: params.to_string(),
            error: Some(err.to_string()),
            ..VerificationItem::default()
        }
    }

    fn oracle_summary(&self) -> String {
        self.oracles
            .iter()
            .map(|o| format!("{}={}", o.name, if o.passed { "pass" } else { "FAIL" }))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub items: usize,
    pub holds: usize,
    pub fails: usize,
    pub holds_to_precision: usize,
    pub errors: usize,
    /// Failures or errors outside the printed variants.
    pub blocking_failures: usize,
}

impl Summary {
    pub fn of(entries: &[GridEntry]) -> Self {
        let mut s = Summary {
            items: entries.len(),
            ..Summary::default()
        };
        for e in entries {
            match &e.outcome {
                Ok(r) => match r.verdict {
                    Verdict::Holds => s.holds += 1,
                    Verdict::Fails => s.fails += 1,
                    Verdict::HoldsToPrecision => s.holds_to_precision += 1,
                },
                Err(_) => s.errors += 1,
            }
            if e.is_failure() {
                s.blocking_failures += 1;
            }
        }
        s
    }
}

/// Wall-clock figures; never part of the canonical body.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub total_micros: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub item_micros: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub items: Vec<VerificationItem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
    pub body_sha256: String,
    pub timing: Timing,
}

/// The hashed part of a report, in field order.
#[derive(Serialize)]
struct CanonicalBody<'a> {
    schema: &'a str,
    tool_version: &'a str,
    command: &'a str,
    config: &'a BTreeMap<String, String>,
    items: &'a [VerificationItem],
    table: &'a Option<Table>,
    warnings: &'a [String],
    summary: &'a Option<Summary>,
}

impl Report {
    pub fn new(command: &str, config: BTreeMap<String, String>) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            config,
            items: Vec::new(),
            table: None,
            warnings: Vec::new(),
            summary: None,
            body_sha256: String::new(),
            timing: Timing::default(),
        }
    }

    pub fn with_entries(mut self, entries: &[GridEntry]) -> Self {
        self.items = entries.iter().map(VerificationItem::from_entry).collect();
        self.timing.item_micros = entries
            .iter()
            .map(|e| {
                e.outcome
                    .as_ref()
                    .map(|r| r.elapsed.as_micros() as u64)
                    .unwrap_or(0)
            })
            .collect();
        self.summary = Some(Summary::of(entries));
        self
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    /// Compact JSON of everything but the timing and the hash itself.
    pub fn canonical_body(&self) -> String {
        let body = CanonicalBody {
            schema: &self.schema,
            tool_version: &self.tool_version,
            command: &self.command,
            config: &self.config,
            items: &self.items,
            table: &self.table,
            warnings: &self.warnings,
            summary: &self.summary,
        };
        serde_json::to_string(&body).expect("report body serializes")
    }

    pub fn compute_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_body().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Fills in `body_sha256`; call once the body is complete.
    pub fn seal(mut self) -> Self {
        self.body_sha256 = self.compute_hash();
        self
    }

    pub fn hash_is_valid(&self) -> bool {
        self.body_sha256 == self.compute_hash()
    }

    pub fn blocking_failures(&self) -> usize {
        self.summary.as_ref().map_or(0, |s| s.blocking_failures)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("report JSON: {e}")))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        if let Some(t) = &self.table {
            w.write_record(&t.columns).map_err(io)?;
            for row in &t.rows {
                w.write_record(row).map_err(io)?;
            }
        } else {
            w.write_record(["id", "params", "mode", "verdict", "certificate", "oracles", "error"])
                .map_err(io)?;
            for it in &self.items {
                w.write_record([
                    it.id.as_str(),
                    &it.params,
                    it.mode.as_deref().unwrap_or(""),
                    it.verdict.as_deref().unwrap_or(""),
                    it.certificate.as_deref().unwrap_or(""),
                    &it.oracle_summary(),
                    it.error.as_deref().unwrap_or(""),
                ])
                .map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        let (columns, rows): (Vec<String>, Vec<Vec<String>>) = match &self.table {
            Some(t) => (t.columns.clone(), t.rows.clone()),
            None => (
                ["id", "params", "verdict", "certificate"].map(String::from).to_vec(),
                self.items
                    .iter()
                    .map(|it| {
                        let verdict = match (&it.verdict, &it.error) {
                            (_, Some(_)) => "error".to_string(),
                            (Some(v), None) if it.printed_variant => format!("{v} (printed)"),
                            (Some(v), None) => v.clone(),
                            (None, None) => String::new(),
                        };
                        let cert = it
                            .error
                            .clone()
                            .or_else(|| it.certificate.clone())
                            .unwrap_or_default();
                        vec![it.id.clone(), it.params.clone(), verdict, cert]
                    })
                    .collect(),
            ),
        };
        let widths: Vec<usize> = columns
            .iter()
            .enumerate()
            .map(|(i, c)| {
                rows.iter()
                    .map(|r| r.get(i).map_or(0, |s| s.chars().count()))
                    .chain([c.chars().count()])
                    .max()
                    .unwrap_or(0)
                    .min(60)
            })
            .collect();
        let line = |cells: &[String], out: &mut String| {
            let last = cells.len().saturating_sub(1);
            for (i, cell) in cells.iter().enumerate() {
                if i == last {
                    out.push_str(cell);
                } else {
                    let _ = write!(out, "{cell:<w$}  ", w = widths[i]);
                }
            }
            out.push('\n');
        };
        line(&columns, &mut out);
        for r in &rows {
            line(r, &mut out);
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        if let Some(s) = &self.summary {
            let _ = writeln!(
                out,
                "{} items: {} holds, {} holds-to-precision, {} fails, {} errors",
                s.items, s.holds, s.holds_to_precision, s.fails, s.errors
            );
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
            Format::Pretty => Ok(self.to_pretty()),
        }
    }
}
