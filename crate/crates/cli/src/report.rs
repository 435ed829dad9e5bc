//! Report schema and its JSON and text renderings.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use taugeo_core::report::{CheckReport, Status};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// One executed check. `elapsed_ms` is the only nondeterministic field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub witness: Option<String>,
    pub detail: String,
    pub elapsed_ms: f64,
}

impl CheckRecord {
    pub fn new(report: CheckReport, elapsed_ms: f64) -> Self {
        Self {
            name: report.name,
            anchor: report.anchor,
            status: report.status,
            witness: report.witness,
            detail: report.detail,
            elapsed_ms,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    /// Sort checks by name and tally the summary.
    pub fn new(config: RunConfig, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let summary = tally(&checks);
        Self { version: REPORT_VERSION.to_string(), config, checks, summary }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.failed > 0
    }

    pub fn exit_code(&self) -> u8 {
        u8::from(self.has_failures())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with every timing field zeroed, for determinism comparisons.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        for check in &mut copy.checks {
            check.elapsed_ms = 0.0;
        }
        copy.to_json()
    }

    pub fn from_json(text: &str, path: &Path) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|source| CliError::ReportParse { path: path.to_path_buf(), source })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text, path)
    }

    /// Text rendering with the same sections and order as the JSON.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "version: {}", self.version);
        let _ = writeln!(out, "config:");
        let config = toml::to_string(&self.config).expect("config serializes");
        for line in config.lines().filter(|l| !l.is_empty()) {
            let _ = writeln!(out, "  {line}");
        }
        let _ = writeln!(out, "checks:");
        for check in &self.checks {
            let _ = writeln!(out, "  {} {} ({:.1} ms)", status_label(check.status), check.name, check.elapsed_ms);
            let _ = writeln!(out, "       anchor: {}", check.anchor);
            if !check.detail.is_empty() {
                let _ = writeln!(out, "       detail: {}", check.detail);
            }
            if let Some(witness) = &check.witness {
                let _ = writeln!(out, "       witness: {witness}");
            }
        }
        let s = &self.summary;
        let _ = writeln!(out, "summary: {} total, {} passed, {} failed, {} skipped", s.total, s.passed, s.failed, s.skipped);
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json() + "\n",
            Format::Text => self.to_text(),
        }
    }

    pub fn write(&self, path: &Path, format: Format) -> CliResult<()> {
        std::fs::write(path, self.render(format)).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
    }
}

pub fn status_label(status: Status) -> &'static str {
    match status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skipped => "SKIP",
    }
}

pub fn tally(checks: &[CheckRecord]) -> Summary {
    let count = |status| checks.iter().filter(|c| c.status == status).count();
    Summary { total: checks.len(), passed: count(Status::Pass), failed: count(Status::Fail), skipped: count(Status::Skipped) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Preset;

    fn sample() -> Report {
        Report::new(
            RunConfig::new(Preset::Qplane),
            vec![
                CheckRecord::new(CheckReport::pass("b", "identity b", "3 samples"), 1.5),
                CheckRecord::new(CheckReport::fail("a", "identity a", "x*y vs q*x*y"), 0.5),
                CheckRecord::new(CheckReport::skipped("c", "identity c", "no data"), 0.0),
            ],
        )
    }

    #[test]
    fn checks_sorted_and_tallied() {
        let report = sample();
        let names: Vec<_> = report.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
        assert_eq!(report.summary, Summary { total: 3, passed: 1, failed: 1, skipped: 1 });
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn json_round_trip() {
        let report = sample();
        let back = Report::from_json(&report.to_json(), Path::new("r.json")).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn json_field_order_is_stable() {
        let json = sample().to_json();
        let positions: Vec<_> = ["\"version\"", "\"config\"", "\"checks\"", "\"summary\""]
            .iter()
            .map(|k| json.find(k).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn text_mirrors_json() {
        let text = sample().to_text();
        assert!(text.contains("FAIL a"));
        assert!(text.contains("witness: x*y vs q*x*y"));
        assert!(text.contains("summary: 3 total, 1 passed, 1 failed, 1 skipped"));
        assert!(text.contains("preset = \"qplane\""));
    }
}
