//! Check results and their text / JSON renderings.

use std::fmt::{self, Write as _};

/// Outcome of one named check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
    Inapplicable,
    RankAmbiguous,
    Mismatch,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Indeterminate => "indeterminate",
            Status::Inapplicable => "inapplicable",
            Status::RankAmbiguous => "rank-ambiguous",
            Status::Mismatch => "MISMATCH",
        }
    }

    pub fn parse(s: &str) -> Option<Status> {
        [
            Status::Pass,
            Status::Fail,
            Status::Indeterminate,
            Status::Inapplicable,
            Status::RankAmbiguous,
            Status::Mismatch,
        ]
        .into_iter()
        .find(|st| st.as_str().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check_id: String,
    pub status: Status,
    pub max_residual: f64,
    pub threshold: f64,
    pub witness: Option<Vec<f64>>,
    pub detail: String,
}

impl CheckReport {
    pub fn new(check_id: &str, status: Status, max_residual: f64, threshold: f64) -> Self {
        Self {
            check_id: check_id.to_string(),
            status,
            max_residual,
            threshold,
            witness: None,
            detail: String::new(),
        }
    }

    /// `pass` iff `residual <= threshold`, `fail` otherwise.
    pub fn threshold(check_id: &str, max_residual: f64, threshold: f64) -> Self {
        let status = if max_residual <= threshold {
            Status::Pass
        } else {
            Status::Fail
        };
        Self::new(check_id, status, max_residual, threshold)
    }

    pub fn inapplicable(check_id: &str, hypothesis: impl Into<String>) -> Self {
        Self::new(check_id, Status::Inapplicable, 0.0, 0.0).with_detail(hypothesis)
    }

    pub fn with_witness(mut self, witness: Option<Vec<f64>>) -> Self {
        self.witness = witness;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Run parameters echoed into JSON reports.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub points: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub checks: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Exit code for a finished run: 1 on fail or MISMATCH, 3 on rank-ambiguous or indeterminate, else 0.
pub fn exit_code(reports: &[CheckReport]) -> i32 {
    if reports
        .iter()
        .any(|r| matches!(r.status, Status::Fail | Status::Mismatch))
    {
        1
    } else if reports
        .iter()
        .any(|r| matches!(r.status, Status::RankAmbiguous | Status::Indeterminate))
    {
        3
    } else {
        0
    }
}

/// Seventeen significant digits; non-finite values become `null`.
fn json_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub fn render_json(reports: &[CheckReport], fixture: Option<&str>, options: Option<&ReportOptions>) -> String {
    let mut out = String::from("{\"version\":1");
    if let Some(name) = fixture {
        write!(out, ",\"fixture\":{}", json_string(name)).unwrap();
    }
    if let Some(o) = options {
        let tol = o.tol.map_or("null".to_string(), json_real);
        let checks = o.checks.iter().map(|c| json_string(c)).collect::<Vec<_>>().join(",");
        write!(
            out,
            ",\"options\":{{\"points\":{},\"seed\":{},\"tol\":{},\"checks\":[{}]}}",
            o.points, o.seed, tol, checks
        )
        .unwrap();
    }
    out.push_str(",\"checks\":[");
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let witness = match &r.witness {
            Some(w) => format!("[{}]", w.iter().map(|v| json_real(*v)).collect::<Vec<_>>().join(",")),
            None => "null".to_string(),
        };
        write!(
            out,
            "\n{{\"check_id\":{},\"status\":{},\"max_residual\":{},\"threshold\":{},\"witness\":{},\"detail\":{}}}",
            json_string(&r.check_id),
            json_string(r.status.as_str()),
            json_real(r.max_residual),
            json_real(r.threshold),
            witness,
            json_string(&r.detail)
        )
        .unwrap();
    }
    if !reports.is_empty() {
        out.push('\n');
    }
    out.push_str("]}");
    out
}

pub fn render_text(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        write!(
            out,
            "{} {} residual={:.6e} thr={:.1e}",
            r.check_id,
            r.status.as_str().to_uppercase(),
            r.max_residual,
            r.threshold
        )
        .unwrap();
        if !r.detail.is_empty() {
            write!(out, "  ({})", r.detail).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn render(
    reports: &[CheckReport],
    format: Format,
    fixture: Option<&str>,
    options: Option<&ReportOptions>,
) -> String {
    match format {
        Format::Text => render_text(reports),
        Format::Json => {
            let mut s = render_json(reports, fixture, options);
            s.push('\n');
            s
        }
    }
}
