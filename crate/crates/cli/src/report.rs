//! Verification reports: one row per checked identity, rendered as text or
//! JSON.

use serde::{Deserialize, Serialize};
use std::time::Instant;

/// One checked fact.  `computed` and `reference` are the two sides of the
/// comparison reduced to a real number (usually a residual against zero or a
/// value against its closed form); `pass` records the verdict actually used,
/// so boolean gates can fold into the same shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRow {
    pub id: String,
    /// The mathematical fact being checked, in plain words.
    pub anchor: String,
    pub computed: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub rows: Vec<CheckRow>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            rows: Vec::new(),
        }
    }

    /// Numeric row: passes when `|computed - reference| ≤ tolerance`.
    pub fn check(
        &mut self,
        id: &str,
        anchor: &str,
        computed: f64,
        reference: f64,
        tolerance: f64,
        started: Instant,
    ) {
        let pass = (computed - reference).abs() <= tolerance && computed.is_finite();
        self.rows.push(CheckRow {
            id: id.to_string(),
            anchor: anchor.to_string(),
            computed,
            reference,
            tolerance,
            pass,
            runtime_ms: started.elapsed().as_millis() as u64,
        });
    }

    /// Boolean row (gates, rejection checks); `computed` encodes the verdict.
    pub fn gate(&mut self, id: &str, anchor: &str, pass: bool, started: Instant) {
        self.rows.push(CheckRow {
            id: id.to_string(),
            anchor: anchor.to_string(),
            computed: if pass { 1.0 } else { 0.0 },
            reference: 1.0,
            tolerance: 0.0,
            pass,
            runtime_ms: started.elapsed().as_millis() as u64,
        });
    }

    /// A row that could not be computed at all.
    pub fn error(&mut self, id: &str, anchor: &str, message: &str, started: Instant) {
        self.rows.push(CheckRow {
            id: id.to_string(),
            anchor: format!("{anchor} [error: {message}]"),
            computed: f64::NAN,
            reference: 0.0,
            tolerance: 0.0,
            pass: false,
            runtime_ms: started.elapsed().as_millis() as u64,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Human-readable rendering, one line per row.
    pub fn render_text(&self) -> String {
        let mut out = format!("suite {}\n", self.suite);
        for r in &self.rows {
            let verdict = if r.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "  [{verdict}] {:<42} computed={:+.6e} reference={:+.6e} tol={:.1e} ({} ms)\n",
                r.id, r.computed, r.reference, r.tolerance, r.runtime_ms
            ));
        }
        let verdict = if self.all_pass() { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "  suite {}: {verdict} ({}/{} rows)\n",
            self.suite,
            self.rows.iter().filter(|r| r.pass).count(),
            self.rows.len()
        ));
        out
    }

    /// The report with runtimes zeroed, for bit-for-bit comparisons between
    /// runs.
    pub fn canonical(&self) -> SuiteReport {
        let mut c = self.clone();
        for r in &mut c.rows {
            r.runtime_ms = 0;
        }
        c
    }
}

/// Render a list of reports as pretty JSON.
pub fn reports_to_json(reports: &[SuiteReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}
