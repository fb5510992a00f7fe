//! Quasi-Moment-Method calibration of rain-attenuation prediction models.
//!
//! A base model that can be written as a sum of basis functions (after an
//! optional log transform) is re-weighted by coefficients obtained from the
//! Gram system of those functions over a measured series. Exceedance curves
//! lying below the 0.01 % anchor are rescaled first so the anchor is defined
//! from data.
//!
//! ```
//! use qmm::{fit, FitRequest, MeasurementSeries, ModelSpec, SeriesKind};
//!
//! let spec = ModelSpec::power_law(1.05, 0.77).unwrap();
//! let rates: Vec<f64> = (1..=10).map(|i| 10.0 * i as f64).collect();
//! let gamma: Vec<f64> = rates.iter().map(|r| 0.567 * r.powf(0.791)).collect();
//! let series = MeasurementSeries::new(SeriesKind::RainRate, rates, gamma, "site".into());
//!
//! let (model, report) = fit(&FitRequest::new(spec, series)).unwrap();
//! assert!(report.rmse_qmm_db < report.rmse_base_db);
//! assert!(model.predict(50.0).unwrap() > 0.0);
//! ```

pub mod basis;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod normalization;
pub mod pipeline;

pub use basis::{CalibratedModel, Family, ModelSpec, OrdinateTransform};
pub use dataset::{parse_measurement_csv, validate_series, Finding, MeasurementSeries, SeriesKind};
pub use error::{QmmError, Result};
pub use evaluation::{build_report, improvement_percent, rmse, FitReport};
pub use linalg::{
    gram_matrix, moment_vector, solve_coefficients, DesignSamples, FitOptions, SolveDiagnostics,
};
pub use normalization::{apply_normalization, normalization_scale, NormalizationDescriptor};
pub use pipeline::{fit, predict_series, FitRequest, NormalizeMode};
