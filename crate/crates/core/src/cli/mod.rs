//! Command implementations behind the `qmm` binary.
//!
//! Exit codes:
//!
//! | code | meaning                                           |
//! |------|---------------------------------------------------|
//! | 0    | success                                           |
//! | 1    | an output file could not be written               |
//! | 2    | bad config file or command-line arguments         |
//! | 3    | missing or invalid data / model file              |
//! | 4    | solver failure or abscissa outside the model domain |

mod config;
mod grid;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

pub use config::{CurveGrid, RunConfig};
pub use grid::{linear_grid, log_grid, parse_abscissa_list, parse_grid_spec, GridSpec};

use crate::basis::CalibratedModel;
use crate::dataset::{parse_measurement_csv, MeasurementSeries};
use crate::error::{ErrorCategory, QmmError};
use crate::evaluation::{evaluate_model, FitReport};
use crate::linalg::FitOptions;
use crate::pipeline::{fit, FitRequest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OUTPUT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<QmmError> for CliError {
    fn from(e: QmmError) -> Self {
        let code = match e.category() {
            ErrorCategory::Config => EXIT_CONFIG,
            ErrorCategory::Data => EXIT_DATA,
            ErrorCategory::Solver => EXIT_SOLVER,
        };
        CliError::new(code, e.to_string())
    }
}

/// Where `qmm predict` takes its abscissas from.
#[derive(Debug, Clone, PartialEq)]
pub enum Abscissas {
    List(Vec<f64>),
    Grid(GridSpec),
}

fn read_text(path: &Path, code: i32, what: &str) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::new(code, format!("cannot read {what} {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::new(EXIT_OUTPUT, format!("cannot write {}: {e}", path.display())))
}

pub fn load_series(path: &Path) -> Result<MeasurementSeries, CliError> {
    let bytes = fs::read(path).map_err(|e| {
        CliError::new(
            EXIT_DATA,
            format!("cannot read data {}: {e}", path.display()),
        )
    })?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let series = parse_measurement_csv(&bytes)
        .map_err(|e| CliError::new(EXIT_DATA, format!("{}: {e}", path.display())))?;
    Ok(series.with_label(label))
}

/// Reads a calibrated model from either a bare model document or a full fit
/// report (whose `model` field is used).
pub fn load_model_json(text: &str) -> Result<CalibratedModel, QmmError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| QmmError::Data(format!("model JSON: {e}")))?;
    let inner = match value.get("model") {
        Some(m) if value.get("coefficients").is_none() => m.clone(),
        _ => value,
    };
    serde_json::from_value(inner).map_err(|e| QmmError::Data(format!("model JSON: {e}")))
}

fn load_model(path: &Path) -> Result<CalibratedModel, CliError> {
    let text = read_text(path, EXIT_DATA, "model")?;
    load_model_json(&text).map_err(|e| CliError::new(EXIT_DATA, format!("{}: {e}", path.display())))
}

/// Plot-ready CSV: abscissa, base prediction, calibrated prediction and the
/// measurement where one exists at that abscissa.
pub fn curve_csv(
    model: &CalibratedModel,
    series: &MeasurementSeries,
    grid: Option<CurveGrid>,
) -> Result<String, QmmError> {
    let x = series.abscissa();
    let grid = grid.unwrap_or(CurveGrid {
        min: x[0],
        max: x[x.len() - 1],
        points_per_decade: 10,
    });
    let mut points = if model.spec.family().is_cdf() {
        log_grid(grid.min, grid.max, grid.points_per_decade)
    } else {
        linear_grid(grid.min, grid.max, grid.points_per_decade)
    };
    points.extend_from_slice(x);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let base = CalibratedModel::base(model.spec, model.normalization)?;
    let mut out = String::from("abscissa,base_prediction,qmm_prediction,measurement\n");
    for p in points {
        let measured = x
            .iter()
            .position(|v| *v == p)
            .map(|k| format!("{:?}", series.ordinate()[k]))
            .unwrap_or_default();
        out.push_str(&format!(
            "{p:?},{:?},{:?},{measured}\n",
            base.predict(p)?,
            model.predict(p)?
        ));
    }
    Ok(out)
}

/// `qmm fit --config <path>`
pub fn run_fit(config_path: &Path) -> Result<FitReport, CliError> {
    let text = read_text(config_path, EXIT_CONFIG, "config")?;
    let base_dir = config_path.parent().unwrap_or_else(|| Path::new("."));
    let config = RunConfig::from_json(&text)
        .map_err(|e| CliError::new(EXIT_CONFIG, format!("{}: {e}", config_path.display())))?
        .resolve_paths(base_dir);

    let series = load_series(&config.data_path)?;
    let request = FitRequest::new(config.model, series).normalize(config.normalize);
    let (model, report) = fit(&request)?;

    write_file(&config.output_report, &(report.to_json_pretty() + "\n"))?;
    if let Some(curve_path) = &config.output_curve {
        let csv = curve_csv(&model, &request.series, config.curve_grid)?;
        write_file(curve_path, &csv)?;
    }
    log::info!(
        "fit {}: rmse {} dB -> {} dB",
        request.series.label(),
        report.rmse_base_db,
        report.rmse_qmm_db
    );
    Ok(report)
}

/// `qmm predict --model <path> (--at <list> | --grid min,max,n)`
pub fn run_predict(
    model_path: &Path,
    abscissas: &Abscissas,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let xs = match abscissas {
        Abscissas::List(v) => v.clone(),
        Abscissas::Grid(g) => g.values(model.spec.family().is_cdf()),
    };
    let ys = model.predict_series(&xs)?;
    let mut text = String::from("x,prediction\n");
    for (x, y) in xs.iter().zip(&ys) {
        text.push_str(&format!("{x:?},{y:?}\n"));
    }
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::new(EXIT_OUTPUT, format!("cannot write output: {e}")))
}

/// `qmm evaluate --model <path> --data <path>`
pub fn run_evaluate(
    model_path: &Path,
    data_path: &Path,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let series = load_series(data_path)?;
    let m = evaluate_model(&model, &series, &FitOptions::default())?;
    let improvement = m
        .improvement_percent
        .map(|v| format!("{v:?}"))
        .unwrap_or_default();
    let text = format!(
        "rmse_base_db,rmse_qmm_db,improvement_percent\n{:?},{:?},{improvement}\n",
        m.rmse_base_db, m.rmse_qmm_db
    );
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::new(EXIT_OUTPUT, format!("cannot write output: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_loader_accepts_report_or_model() {
        let model = r#"{"spec":{"family":"YeoCdf","params":{"a001":25.4999,"beta_sin_theta":0.0381}},"coefficients":[1,1,1,1,1]}"#;
        let m = load_model_json(model).unwrap();
        let wrapped = format!(r#"{{"model":{model},"rmse_base_db":1.0}}"#);
        assert_eq!(load_model_json(&wrapped).unwrap(), m);
        assert!(load_model_json("[]").is_err());
        assert!(load_model_json(r#"{"model":{}}"#).is_err());
    }

    #[test]
    fn error_categories_map_to_exit_codes() {
        assert_eq!(
            CliError::from(QmmError::Config("x".into())).code,
            EXIT_CONFIG
        );
        assert_eq!(CliError::from(QmmError::Data("x".into())).code, EXIT_DATA);
        assert_eq!(
            CliError::from(QmmError::NoInformativeBasis).code,
            EXIT_SOLVER
        );
        let domain = QmmError::Domain {
            family: "ItuCdf",
            sample: None,
            value: 0.0,
        };
        assert_eq!(CliError::from(domain).code, EXIT_SOLVER);
    }
}
