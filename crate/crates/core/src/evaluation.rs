//! RMSE metrics and the fit report.

use serde::{Deserialize, Serialize};

use crate::basis::{CalibratedModel, ModelSpec};
use crate::dataset::{MeasurementSeries, SeriesKind};
use crate::error::{QmmError, Result};
use crate::linalg::{FitOptions, SolveDiagnostics};
use crate::normalization::NormalizationDescriptor;

/// `sqrt(mean((predicted - measured)^2))`
pub fn rmse(predicted: &[f64], measured: &[f64]) -> Result<f64> {
    if predicted.len() != measured.len() {
        return Err(QmmError::Metric(format!(
            "{} predictions for {} measurements",
            predicted.len(),
            measured.len()
        )));
    }
    if predicted.is_empty() {
        return Err(QmmError::Metric("rmse of an empty series".into()));
    }
    let sum: f64 = predicted
        .iter()
        .zip(measured)
        .map(|(p, m)| (p - m) * (p - m))
        .sum();
    Ok((sum / predicted.len() as f64).sqrt())
}

/// `sqrt(sum w_k r_k^2 / sum w_k)`; bit-identical to [`rmse`] for unit weights.
pub fn weighted_rmse(predicted: &[f64], measured: &[f64], weights: &[f64]) -> Result<f64> {
    if predicted.len() != measured.len() || weights.len() != predicted.len() {
        return Err(QmmError::Metric(format!(
            "length mismatch: {} predictions, {} measurements, {} weights",
            predicted.len(),
            measured.len(),
            weights.len()
        )));
    }
    if predicted.is_empty() {
        return Err(QmmError::Metric("rmse of an empty series".into()));
    }
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(QmmError::Metric("weights sum to zero".into()));
    }
    let sum: f64 = predicted
        .iter()
        .zip(measured)
        .zip(weights)
        .map(|((p, m), w)| w * ((p - m) * (p - m)))
        .sum();
    Ok((sum / total).sqrt())
}

/// `(1 - new/reference) * 100`, never above 100.
pub fn improvement_percent(rmse_new: f64, rmse_ref: f64) -> Result<f64> {
    if !rmse_ref.is_finite() || rmse_ref <= 0.0 {
        return Err(QmmError::Metric(format!(
            "reference RMSE must be > 0, got {rmse_ref}"
        )));
    }
    if !(rmse_new.is_finite() && rmse_new >= 0.0) {
        return Err(QmmError::Metric(format!(
            "RMSE must be finite and >= 0, got {rmse_new}"
        )));
    }
    Ok(((1.0 - rmse_new / rmse_ref) * 100.0).min(100.0))
}

/// Base-vs-calibrated metrics of one model on one series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelMetrics {
    pub rmse_base_db: f64,
    pub rmse_qmm_db: f64,
    pub rmse_transformed_base: f64,
    pub rmse_transformed_qmm: f64,
    /// `None` when the base model already has zero dB error.
    pub improvement_percent: Option<f64>,
}

/// A model family only applies to its own kind of series.
pub fn check_compatible(spec: &ModelSpec, kind: SeriesKind) -> Result<()> {
    let expected = if spec.family().is_cdf() {
        SeriesKind::ExceedancePercent
    } else {
        SeriesKind::RainRate
    };
    if kind != expected {
        return Err(QmmError::Incompatible(format!(
            "{} expects a {expected:?} series, got {kind:?}",
            spec.family()
        )));
    }
    Ok(())
}

/// Scores `model` against its base model (same spec, coefficients all one)
/// on the raw series. Transformed-space errors use the fit weights.
pub fn evaluate_model(
    model: &CalibratedModel,
    series: &MeasurementSeries,
    opts: &FitOptions,
) -> Result<ModelMetrics> {
    check_compatible(&model.spec, series.kind())?;
    let weights = opts.resolve_weights(series.len())?;
    let base = CalibratedModel::base(model.spec, model.normalization)?;
    let transform = model.spec.ordinate_transform();
    let x = series.abscissa();
    let y = series.ordinate();

    let mut qmm_z = Vec::with_capacity(x.len());
    let mut base_z = Vec::with_capacity(x.len());
    let mut meas_z = Vec::with_capacity(x.len());
    for (k, (&xk, &yk)) in x.iter().zip(y).enumerate() {
        qmm_z.push(model.linear_predictor(xk).map_err(|e| e.at_sample(k))?);
        base_z.push(base.linear_predictor(xk).map_err(|e| e.at_sample(k))?);
        meas_z.push(transform.apply(yk).map_err(|e| e.at_sample(k))?);
    }
    let qmm_db: Vec<f64> = qmm_z.iter().map(|z| transform.invert(*z)).collect();
    let base_db: Vec<f64> = base_z.iter().map(|z| transform.invert(*z)).collect();

    let rmse_base_db = rmse(&base_db, y)?;
    let rmse_qmm_db = rmse(&qmm_db, y)?;
    let improvement = if rmse_base_db > 0.0 {
        Some(improvement_percent(rmse_qmm_db, rmse_base_db)?)
    } else {
        None
    };
    Ok(ModelMetrics {
        rmse_base_db,
        rmse_qmm_db,
        rmse_transformed_base: weighted_rmse(&base_z, &meas_z, &weights)?,
        rmse_transformed_qmm: weighted_rmse(&qmm_z, &meas_z, &weights)?,
        improvement_percent: improvement,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: CalibratedModel,
    pub rmse_base_db: f64,
    pub rmse_qmm_db: f64,
    pub rmse_transformed_base: f64,
    pub rmse_transformed_qmm: f64,
    pub improvement_percent: Option<f64>,
    pub diagnostics: SolveDiagnostics,
    pub normalization: Option<NormalizationDescriptor>,
}

impl FitReport {
    pub fn metrics(&self) -> ModelMetrics {
        ModelMetrics {
            rmse_base_db: self.rmse_base_db,
            rmse_qmm_db: self.rmse_qmm_db,
            rmse_transformed_base: self.rmse_transformed_base,
            rmse_transformed_qmm: self.rmse_transformed_qmm,
            improvement_percent: self.improvement_percent,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn build_report(
    model: CalibratedModel,
    series: &MeasurementSeries,
    diagnostics: SolveDiagnostics,
    opts: &FitOptions,
) -> Result<FitReport> {
    let m = evaluate_model(&model, series, opts)?;
    let normalization = model.normalization;
    Ok(FitReport {
        model,
        rmse_base_db: m.rmse_base_db,
        rmse_qmm_db: m.rmse_qmm_db,
        rmse_transformed_base: m.rmse_transformed_base,
        rmse_transformed_qmm: m.rmse_transformed_qmm,
        improvement_percent: m.improvement_percent,
        diagnostics,
        normalization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        let r = rmse(&[1.0, 2.0], &[2.0, 4.0]).unwrap();
        assert!((r - 1.581_138_830_084_189_7).abs() < 1e-15);
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(rmse(&[], &[]).is_err());
    }

    #[test]
    fn improvement_examples() {
        let v = improvement_percent(0.1599, 1.9130).unwrap();
        assert!((v - 91.641_400_940_930_48).abs() < 1e-10, "{v}");
        assert_eq!(improvement_percent(0.7, 0.7).unwrap(), 0.0);
        assert_eq!(improvement_percent(0.0, 2.0).unwrap(), 100.0);
        assert!(improvement_percent(3.0, 1.0).unwrap() < 0.0);
        assert!(improvement_percent(1.0, 0.0).is_err());
        assert!(improvement_percent(1.0, -1.0).is_err());
    }

    #[test]
    fn weighted_rmse_reduces_to_plain() {
        let p = [1.0, 2.0, 4.0];
        let m = [1.5, 2.5, 3.0];
        let plain = rmse(&p, &m).unwrap();
        let w = weighted_rmse(&p, &m, &[2.0, 2.0, 2.0]).unwrap();
        assert!((plain - w).abs() < 1e-15);
        let only_last = weighted_rmse(&p, &m, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(only_last, 1.0);
    }
}
