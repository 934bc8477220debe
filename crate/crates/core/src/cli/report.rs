use std::fmt::Write as _;

use serde::Serialize;

use crate::coefficient::{format_significant, CoefficientMode};
use crate::error::Error;
use crate::query::ConditionalQuery;

use super::OutputFormat;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        ErrorInfo {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

/// One report row per query. Numbers are strings: `"num/den"` in exact
/// mode, 12 significant digits in float mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryRow {
    pub query_index: usize,
    pub k: Vec<u64>,
    pub s: Vec<u64>,
    pub fiber_size: Option<usize>,
    #[serde(rename = "prob_Y")]
    pub prob_y: Option<String>,
    pub moment_generic: Option<String>,
    pub moment_closed_form: Option<String>,
    pub moment_oracle: Option<String>,
    pub agree: Option<bool>,
    pub error: Option<ErrorInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmf: Option<Vec<(Vec<u64>, String)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmf_omitted: Option<String>,
}

impl QueryRow {
    pub(crate) fn new(index: usize, query: &ConditionalQuery) -> Self {
        QueryRow {
            query_index: index,
            k: query.k.as_slice().to_vec(),
            s: query.s.as_slice().to_vec(),
            fiber_size: None,
            prob_y: None,
            moment_generic: None,
            moment_closed_form: None,
            moment_oracle: None,
            agree: None,
            error: None,
            pmf: None,
            pmf_omitted: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JobReport {
    pub job_index: usize,
    pub name: Option<String>,
    pub distribution: String,
    pub mode: CoefficientMode,
    pub rows: Vec<QueryRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub jobs: Vec<JobReport>,
}

impl Report {
    pub fn has_errors(&self) -> bool {
        self.jobs
            .iter()
            .flat_map(|j| &j.rows)
            .any(|r| r.error.is_some())
    }

    /// 0 on success, 1 if any query failed.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.has_errors())
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Human => self.to_human(),
        }
    }

    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> String {
        // serde_json::Value maps are ordered by key.
        let value = serde_json::to_value(self).expect("report is serializable");
        let mut out = serde_json::to_string_pretty(&value).expect("value is serializable");
        out.push('\n');
        out
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        for job in &self.jobs {
            let name = job.name.as_deref().map(|n| format!(" {n}")).unwrap_or_default();
            let mode = match job.mode {
                CoefficientMode::Exact => "exact",
                CoefficientMode::Float => "float",
            };
            let _ = writeln!(out, "job {}{name} ({}, {mode})", job.job_index, job.distribution);
            for row in &job.rows {
                let _ = writeln!(out, "  query {}: k={:?} s={:?}", row.query_index, row.k, row.s);
                if let Some(e) = &row.error {
                    let _ = writeln!(out, "    error {}: {}", e.kind, e.message);
                    continue;
                }
                let num = |v: &Option<String>| v.as_deref().map(|s| human_number(s, job.mode));
                let mut line = format!(
                    "    fiber_size={} P(Y=k)={}",
                    row.fiber_size.map_or("-".into(), |n| n.to_string()),
                    num(&row.prob_y).unwrap_or_else(|| "-".into())
                );
                let _ = write!(line, "\n    generic={}", num(&row.moment_generic).unwrap_or_else(|| "-".into()));
                if let Some(v) = num(&row.moment_closed_form) {
                    let _ = write!(line, ", closed_form={v}");
                }
                if let Some(v) = num(&row.moment_oracle) {
                    let _ = write!(line, ", oracle={v}");
                }
                if let Some(a) = row.agree {
                    let _ = write!(line, ", agree={a}");
                }
                let _ = writeln!(out, "{line}");
                if let Some(pmf) = &row.pmf {
                    let _ = writeln!(out, "    conditional pmf:");
                    for (j, p) in pmf {
                        let _ = writeln!(out, "      {:?}  {}", j, human_number(p, job.mode));
                    }
                }
                if let Some(note) = &row.pmf_omitted {
                    let _ = writeln!(out, "    pmf omitted: {note}");
                }
            }
        }
        out
    }
}

fn human_number(s: &str, mode: CoefficientMode) -> String {
    match (mode, s.parse::<f64>()) {
        (CoefficientMode::Float, Ok(x)) => format_significant(x, 10),
        _ => s.to_string(),
    }
}
