//! Report rows, summary checks and their on-disk formats.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::RunError;

pub const CSV_HEADER: [&str; 7] = [
    "experiment",
    "hbar",
    "x",
    "value",
    "oracle",
    "rel_gap",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "ok")]
    Ok,
    #[serde(rename = "warning:out-of-band")]
    OutOfBand,
    #[serde(rename = "error:resolution")]
    Resolution,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::OutOfBand => "warning:out-of-band",
            Status::Resolution => "error:resolution",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    pub hbar: Option<f64>,
    pub x: Option<f64>,
    pub value: Option<f64>,
    pub oracle: Option<f64>,
    pub rel_gap: Option<f64>,
    pub status: Status,
}

impl ReportRow {
    pub fn new(
        experiment: impl Into<String>,
        hbar: Option<f64>,
        x: Option<f64>,
        value: f64,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            hbar,
            x,
            value: Some(value),
            oracle: None,
            rel_gap: None,
            status: Status::Ok,
        }
    }

    /// Attaches an oracle and `|value - oracle| / scale`.
    pub fn against(mut self, oracle: f64, scale: f64) -> Self {
        self.oracle = Some(oracle);
        self.rel_gap = self.value.map(|v| (v - oracle).abs() / scale);
        self
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.rel_gap = Some(gap);
        self
    }

    pub fn out_of_band(mut self, flag: bool) -> Self {
        if flag {
            self.status = Status::OutOfBand;
        }
        self
    }

    pub fn resolution_error(
        experiment: impl Into<String>,
        hbar: Option<f64>,
        x: Option<f64>,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            hbar,
            x,
            value: None,
            oracle: None,
            rel_gap: None,
            status: Status::Resolution,
        }
    }
}

/// A pass/fail verdict recorded in the summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub pass: bool,
}

impl Check {
    /// `value <= bound * scale`.
    pub fn at_most(name: &str, value: f64, bound: f64, scale: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: format!("<= {}", format_number(bound * scale)),
            pass: value <= bound * scale,
        }
    }

    /// `|value - centre| <= half_width * scale`.
    pub fn within(name: &str, value: f64, centre: f64, half_width: f64, scale: f64) -> Self {
        let w = half_width * scale;
        Self {
            name: name.into(),
            value,
            bound: format!(
                "[{}, {}]",
                format_number(centre - w),
                format_number(centre + w)
            ),
            pass: (value - centre).abs() <= w,
        }
    }

    /// `max / min <= bound`, with the excess over 1 scaled.
    pub fn ratio(name: &str, value: f64, bound: f64, scale: f64) -> Self {
        let b = 1.0 + (bound - 1.0) * scale;
        Self {
            name: name.into(),
            value,
            bound: format!("<= {}", format_number(b)),
            pass: value <= b,
        }
    }

    pub fn flag(name: &str, holds: bool) -> Self {
        Self {
            name: name.into(),
            value: if holds { 1.0 } else { 0.0 },
            bound: "= 1".into(),
            pass: holds,
        }
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Outcome {
    pub rows: Vec<ReportRow>,
    pub slopes: BTreeMap<String, f64>,
    pub ratios: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub details: BTreeMap<String, serde_json::Value>,
    /// One message per error row.
    pub diagnostics: Vec<String>,
}

impl Outcome {
    pub fn has_resolution_error(&self) -> bool {
        self.rows.iter().any(|r| r.status == Status::Resolution)
    }
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub experiment: &'a str,
    pub mode: &'a str,
    pub serial: bool,
    pub tolerance_scale: f64,
    pub row_count: usize,
    pub resolution_errors: usize,
    pub slopes: &'a BTreeMap<String, f64>,
    pub ratios: &'a BTreeMap<String, f64>,
    pub checks: &'a [Check],
    pub all_checks_pass: bool,
    pub details: &'a BTreeMap<String, serde_json::Value>,
    pub diagnostics: &'a [String],
}

/// Shortest round-trip form, switching to exponent notation for tiny or huge
/// magnitudes.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), format_number)
}

/// `report.csv` with LF line endings.
pub fn write_csv(path: &Path, rows: &[ReportRow]) -> Result<(), RunError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            cell(r.hbar),
            cell(r.x),
            cell(r.value),
            cell(r.oracle),
            cell(r.rel_gap),
            r.status.to_string(),
        ])?;
    }
    w.flush().map_err(|source| RunError::Write {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

/// Whitespace-separated copy of the numeric columns for gnuplot.
pub fn write_plot_table(path: &Path, rows: &[ReportRow]) -> Result<(), RunError> {
    let io = |source| RunError::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(f, "# experiment hbar x value oracle rel_gap").map_err(io)?;
    for r in rows {
        let nan = |v: Option<f64>| v.map_or_else(|| "NaN".to_string(), format_number);
        writeln!(
            f,
            "{} {} {} {} {} {}",
            r.experiment,
            nan(r.hbar),
            nan(r.x),
            nan(r.value),
            nan(r.oracle),
            nan(r.rel_gap)
        )
        .map_err(io)?;
    }
    f.flush().map_err(io)
}

pub fn write_summary(path: &Path, summary: &Summary<'_>) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| RunError::Write {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_strings() {
        assert_eq!(Status::Ok.to_string(), "ok");
        assert_eq!(Status::OutOfBand.to_string(), "warning:out-of-band");
        assert_eq!(Status::Resolution.to_string(), "error:resolution");
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rows = vec![
            ReportRow::new("flat-average", Some(0.1), Some(0.0), 1.5).against(1.0, 1.0),
            ReportRow::resolution_error("flat-average", Some(0.05), None),
        ];
        write_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "experiment,hbar,x,value,oracle,rel_gap,status");
        assert_eq!(lines[1], "flat-average,0.1,0,1.5,1,0.5,ok");
        assert_eq!(
            lines[2],
            "flat-average,0.05,n/a,n/a,n/a,n/a,error:resolution"
        );
    }

    #[test]
    fn numbers_stay_short() {
        assert_eq!(format_number(1.5), "1.5");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1e-10), "1e-10");
        assert_eq!(format_number(-2.5e-7), "-2.5e-7");
        assert_eq!(format_number(f64::NAN), "NaN");
        for v in [1.234e-9, 0.3, 7e20, -1e-300] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn checks_scale_their_bounds() {
        assert!(!Check::at_most("g", 2e-6, 1e-6, 1.0).pass);
        assert!(Check::at_most("g", 2e-6, 1e-6, 2.0).pass);
        assert!(Check::within("w", 0.8, 1.0, 0.15, 1.0).pass == false);
        assert!(Check::within("w", 0.8, 1.0, 0.15, 2.0).pass);
        assert!(Check::ratio("r", 2.5, 2.0, 2.0).pass);
        assert!(!Check::ratio("r", 2.5, 2.0, 1.0).pass);
    }
}
