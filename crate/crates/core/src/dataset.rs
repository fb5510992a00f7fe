//! Measurement series and their CSV form.
//!
//! Two column vocabularies are accepted:
//!
//! ```text
//! exceedance_percent,attenuation_db
//! rain_rate_mm_per_h,specific_attenuation_db_per_km
//! ```

use std::fmt;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{QmmError, Result};

pub const EXCEEDANCE_COLUMNS: [&str; 2] = ["exceedance_percent", "attenuation_db"];
pub const RAIN_RATE_COLUMNS: [&str; 2] = ["rain_rate_mm_per_h", "specific_attenuation_db_per_km"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesKind {
    /// Abscissa in mm/h, ordinate specific attenuation in dB/km.
    RainRate,
    /// Abscissa in % of an average year, ordinate attenuation in dB.
    ExceedancePercent,
}

impl SeriesKind {
    pub fn columns(self) -> [&'static str; 2] {
        match self {
            SeriesKind::RainRate => RAIN_RATE_COLUMNS,
            SeriesKind::ExceedancePercent => EXCEEDANCE_COLUMNS,
        }
    }
}

/// Ordered `(abscissa, ordinate)` pairs.
///
/// Construction does not enforce the invariants; [`validate_series`] reports
/// them and [`parse_measurement_csv`] refuses input that violates them.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSeries {
    kind: SeriesKind,
    abscissa: Vec<f64>,
    ordinate: Vec<f64>,
    label: String,
}

impl MeasurementSeries {
    pub fn new(kind: SeriesKind, abscissa: Vec<f64>, ordinate: Vec<f64>, label: String) -> Self {
        Self {
            kind,
            abscissa,
            ordinate,
            label,
        }
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn abscissa(&self) -> &[f64] {
        &self.abscissa
    }

    pub fn ordinate(&self) -> &[f64] {
        &self.ordinate
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Pairs sorted by abscissa; equal abscissas keep their input order.
    pub fn sorted(&self) -> MeasurementSeries {
        let mut pairs: Vec<(f64, f64)> = self
            .abscissa
            .iter()
            .copied()
            .zip(self.ordinate.iter().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (abscissa, ordinate) = pairs.into_iter().unzip();
        MeasurementSeries {
            kind: self.kind,
            abscissa,
            ordinate,
            label: self.label.clone(),
        }
    }

    /// Sorted, with duplicate abscissas collapsed to the largest ordinate.
    pub fn canonical(&self) -> MeasurementSeries {
        let sorted = self.sorted();
        let mut abscissa: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut ordinate: Vec<f64> = Vec::with_capacity(sorted.len());
        for (x, y) in sorted.abscissa.iter().zip(&sorted.ordinate) {
            match abscissa.last() {
                Some(last) if *last == *x => {
                    let top = ordinate.last_mut().expect("parallel vectors");
                    *top = top.max(*y);
                }
                _ => {
                    abscissa.push(*x);
                    ordinate.push(*y);
                }
            }
        }
        MeasurementSeries {
            kind: sorted.kind,
            abscissa,
            ordinate,
            label: sorted.label,
        }
    }

    /// Serializes to the CSV vocabulary of this series' kind. Values use the
    /// shortest representation that parses back to the same `f64`.
    pub fn to_csv(&self) -> String {
        let [xc, yc] = self.kind.columns();
        let mut out = format!("{xc},{yc}\n");
        for (x, y) in self.abscissa.iter().zip(&self.ordinate) {
            out.push_str(&format!("{x:?},{y:?}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub message: String,
}

impl Finding {
    fn error(message: String) -> Self {
        Self {
            severity: Severity::Error,
            message,
        }
    }

    fn warning(message: String) -> Self {
        Self {
            severity: Severity::Warning,
            message,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// Checks the series invariants. Non-monotone exceedance curves only warn.
pub fn validate_series(series: &MeasurementSeries) -> Vec<Finding> {
    let mut findings = Vec::new();
    let n = series.abscissa.len();
    if series.ordinate.len() != n {
        findings.push(Finding::error(format!(
            "{n} abscissas but {} ordinates",
            series.ordinate.len()
        )));
        return findings;
    }
    if n < 2 {
        findings.push(Finding::error(format!(
            "at least 2 samples are required, got {n}"
        )));
    }
    for (k, x) in series.abscissa.iter().enumerate() {
        if !(x.is_finite() && *x > 0.0) {
            findings.push(Finding::error(format!(
                "abscissa {x} at sample {k} must be finite and > 0"
            )));
        }
    }
    for (k, y) in series.ordinate.iter().enumerate() {
        if !(y.is_finite() && *y > 0.0) {
            findings.push(Finding::error(format!(
                "ordinate {y} at sample {k} must be finite and > 0"
            )));
        }
    }
    if findings.iter().any(Finding::is_error) {
        return findings;
    }

    let sorted = series.sorted();
    for w in sorted.abscissa.windows(2) {
        if w[0] == w[1] {
            findings.push(Finding::error(format!("duplicate abscissa {}", w[0])));
        }
    }
    if series.kind == SeriesKind::ExceedancePercent {
        for (xs, ys) in sorted.abscissa.windows(2).zip(sorted.ordinate.windows(2)) {
            if ys[1] > ys[0] {
                findings.push(Finding::warning(format!(
                    "attenuation rises from {} dB at {} % to {} dB at {} %",
                    ys[0], xs[0], ys[1], xs[1]
                )));
            }
        }
    }
    findings
}

fn parse_cell(cell: &str, row: usize, column: &str) -> Result<f64> {
    let t = cell.trim();
    let v: f64 = t.parse().map_err(|_| {
        let hint = if t.contains(',') {
            " (comma decimal separators are not supported)"
        } else {
            ""
        };
        QmmError::Data(format!(
            "row {row}, column '{column}': '{t}' is not a number{hint}"
        ))
    })?;
    if !v.is_finite() {
        return Err(QmmError::Data(format!(
            "row {row}, column '{column}': '{t}' is not a finite number"
        )));
    }
    Ok(v)
}

/// Parses a measurement CSV.
///
/// The series kind comes from the header. Rows are sorted by abscissa and
/// duplicate abscissas collapse to the largest ordinate. Extra columns are
/// ignored with a warning.
pub fn parse_measurement_csv(bytes: &[u8]) -> Result<MeasurementSeries> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| QmmError::Data(format!("input is not valid UTF-8: {e}")))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| QmmError::Data(format!("unreadable header: {e}")))?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(QmmError::Data(format!("duplicate column '{name}'")));
        }
    }
    let find = |cols: [&str; 2]| -> Option<(usize, usize)> {
        let x = names.iter().position(|n| *n == cols[0])?;
        let y = names.iter().position(|n| *n == cols[1])?;
        Some((x, y))
    };
    let (kind, (xi, yi)) = match (find(EXCEEDANCE_COLUMNS), find(RAIN_RATE_COLUMNS)) {
        (Some(idx), None) => (SeriesKind::ExceedancePercent, idx),
        (None, Some(idx)) => (SeriesKind::RainRate, idx),
        (Some(_), Some(_)) => {
            return Err(QmmError::Data(
                "header names both column sets; keep exactly one".into(),
            ))
        }
        (None, None) => {
            return Err(QmmError::Data(format!(
                "unrecognized header [{}]; expected columns {} or {}",
                names.join(", "),
                EXCEEDANCE_COLUMNS.join(","),
                RAIN_RATE_COLUMNS.join(",")
            )))
        }
    };
    let extras: Vec<&str> = names
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != xi && *i != yi)
        .map(|(_, n)| *n)
        .collect();
    if !extras.is_empty() {
        warn!("ignoring extra columns: {}", extras.join(", "));
    }

    let [xc, yc] = kind.columns();
    let mut abscissa = Vec::new();
    let mut ordinate = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| QmmError::Data(format!("row {row}: {e}")))?;
        if record.len() != names.len() {
            return Err(QmmError::Data(format!(
                "row {row}: expected {} fields, found {} (comma decimal separators are not supported)",
                names.len(),
                record.len()
            )));
        }
        abscissa.push(parse_cell(&record[xi], row, xc)?);
        ordinate.push(parse_cell(&record[yi], row, yc)?);
    }

    let series = MeasurementSeries::new(kind, abscissa, ordinate, String::new()).canonical();
    let findings = validate_series(&series);
    let errors: Vec<String> = findings
        .iter()
        .filter(|f| f.is_error())
        .map(|f| f.message.clone())
        .collect();
    if !errors.is_empty() {
        return Err(QmmError::Data(errors.join("; ")));
    }
    for f in findings {
        warn!("{}", f.message);
    }
    Ok(series)
}
