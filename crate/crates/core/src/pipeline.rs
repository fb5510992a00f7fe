//! End-to-end fit: validate, optionally normalize, transform, assemble, solve, report.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::{CalibratedModel, ModelSpec, ANCHOR_PERCENT};
use crate::dataset::{validate_series, MeasurementSeries, SeriesKind};
use crate::error::{QmmError, Result};
use crate::evaluation::{build_report, check_compatible, FitReport};
use crate::linalg::{gram_matrix, moment_vector, solve_coefficients, DesignSamples, FitOptions};
use crate::normalization::apply_normalization;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizeMode {
    /// On iff the series is an exceedance curve reaching below 0.01 %.
    #[default]
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRequest {
    pub spec: ModelSpec,
    pub series: MeasurementSeries,
    pub options: FitOptions,
    pub normalize: NormalizeMode,
}

impl FitRequest {
    pub fn new(spec: ModelSpec, series: MeasurementSeries) -> Self {
        Self {
            spec,
            series,
            options: FitOptions::default(),
            normalize: NormalizeMode::Auto,
        }
    }

    pub fn normalize(mut self, mode: NormalizeMode) -> Self {
        self.normalize = mode;
        self
    }

    pub fn options(mut self, options: FitOptions) -> Self {
        self.options = options;
        self
    }

    /// Resolves `Auto` against the series.
    pub fn normalization_enabled(&self) -> bool {
        match self.normalize {
            NormalizeMode::On => true,
            NormalizeMode::Off => false,
            NormalizeMode::Auto => {
                self.series.kind() == SeriesKind::ExceedancePercent
                    && self.series.abscissa().iter().any(|p| *p < ANCHOR_PERCENT)
            }
        }
    }
}

/// Basis samples for `spec` at every abscissa, with transformed ordinates.
pub fn design_samples(spec: &ModelSpec, series: &MeasurementSeries) -> Result<DesignSamples> {
    let m = spec.basis_count();
    let n = series.len();
    let mut phi = DMatrix::zeros(m, n);
    let mut y = DVector::zeros(n);
    for (k, (&x, &yk)) in series.abscissa().iter().zip(series.ordinate()).enumerate() {
        let column = spec.basis_eval(x).map_err(|e| e.at_sample(k))?;
        for (i, v) in column.into_iter().enumerate() {
            phi[(i, k)] = v;
        }
        y[k] = spec.transform_ordinate(yk).map_err(|e| e.at_sample(k))?;
    }
    DesignSamples::new(phi, y)
}

/// Calibrates `request.spec` against `request.series`.
///
/// With normalization on, the percentages are scaled so the smallest maps to
/// 0.01 % and the anchor parameter of the CDF family is replaced by the
/// attenuation measured there. The returned model predicts from raw
/// abscissas; it applies the scale itself.
pub fn fit(request: &FitRequest) -> Result<(CalibratedModel, FitReport)> {
    let series = &request.series;
    let errors: Vec<String> = validate_series(series)
        .into_iter()
        .filter(|f| f.is_error())
        .map(|f| f.message)
        .collect();
    if !errors.is_empty() {
        return Err(QmmError::Data(errors.join("; ")));
    }
    request.spec.validate()?;
    check_compatible(&request.spec, series.kind())?;

    let (spec, working, normalization) = if request.normalization_enabled() {
        if series.kind() != SeriesKind::ExceedancePercent {
            return Err(QmmError::Incompatible(
                "normalization requires an exceedance-percentage series".into(),
            ));
        }
        let (normalized, desc) = apply_normalization(series)?;
        let spec = request.spec.with_anchor(desc.a001_equivalent)?;
        (spec, normalized, Some(desc))
    } else {
        (request.spec, series.clone(), None)
    };

    let samples = design_samples(&spec, &working)?;
    let g = gram_matrix(&samples, &request.options)?;
    let b = moment_vector(&samples, &request.options)?;
    let (c, diagnostics) = solve_coefficients(&g, &b, &request.options)?;

    let model = CalibratedModel::new(spec, c.iter().copied().collect(), normalization)?;
    let report = build_report(model.clone(), series, diagnostics, &request.options)?;
    Ok((model, report))
}

/// Element-wise [`CalibratedModel::predict`].
pub fn predict_series(model: &CalibratedModel, abscissas: &[f64]) -> Result<Vec<f64>> {
    model.predict_series(abscissas)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rain_series(spec: &ModelSpec) -> MeasurementSeries {
        let r: Vec<f64> = (1..=10).map(|i| 10.0 * i as f64).collect();
        let y = r
            .iter()
            .map(|x| spec.base_prediction(*x).unwrap())
            .collect();
        MeasurementSeries::new(SeriesKind::RainRate, r, y, "synthetic".into())
    }

    #[test]
    fn exact_power_law_recovers_ones() {
        let spec = ModelSpec::power_law(1.05, 0.77).unwrap();
        let (model, report) = fit(&FitRequest::new(spec, rain_series(&spec))).unwrap();
        for c in &model.coefficients {
            assert!((c - 1.0).abs() < 1e-8, "{:?}", model.coefficients);
        }
        assert_eq!(report.diagnostics.rank, 2);
        assert!(report.normalization.is_none());
    }

    #[test]
    fn power_law_structure_recovered() {
        let spec = ModelSpec::power_law(1.05, 0.77).unwrap();
        let truth = CalibratedModel::new(spec, vec![-18.8061, 1.1108], None).unwrap();
        let r: Vec<f64> = (1..=10).map(|i| 12.5 * i as f64).collect();
        let y = truth.predict_series(&r).unwrap();
        let series = MeasurementSeries::new(SeriesKind::RainRate, r, y, String::new());
        let (model, _) = fit(&FitRequest::new(spec, series)).unwrap();
        assert!((model.coefficients[0] + 18.8061).abs() < 1e-6);
        assert!((model.coefficients[1] - 1.1108).abs() < 1e-6);
    }

    #[test]
    fn auto_normalization_for_small_percentages() {
        let p = vec![1e-5, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3];
        let a = vec![17.6559, 15.2, 12.1, 9.8, 7.7, 5.4, 4.1];
        let series = MeasurementSeries::new(SeriesKind::ExceedancePercent, p, a, String::new());
        let spec = ModelSpec::chinese_cdf(10.0, 57.0).unwrap();
        let (model, report) = fit(&FitRequest::new(spec, series)).unwrap();
        let d = report.normalization.unwrap();
        assert_eq!(d.scale, 1000.0);
        assert_eq!(d.a001_equivalent, 17.6559);
        assert_eq!(model.spec.anchor(), Some(17.6559));
    }

    #[test]
    fn auto_resolution() {
        let spec = ModelSpec::itu_cdf(4.2, 0.12, 0.6, 0.06).unwrap();
        let above = MeasurementSeries::new(
            SeriesKind::ExceedancePercent,
            vec![0.01, 0.1, 1.0],
            vec![4.0, 2.0, 1.0],
            String::new(),
        );
        assert!(!FitRequest::new(spec, above.clone()).normalization_enabled());
        assert!(FitRequest::new(spec, above)
            .normalize(NormalizeMode::On)
            .normalization_enabled());
        let rain = rain_series(&ModelSpec::power_law(1.05, 0.77).unwrap());
        let req = FitRequest::new(spec, rain);
        assert!(!req.normalization_enabled());
    }

    #[test]
    fn family_series_mismatch() {
        let spec = ModelSpec::itu_cdf(4.2, 0.12, 0.6, 0.06).unwrap();
        let rain = rain_series(&ModelSpec::power_law(1.05, 0.77).unwrap());
        assert!(matches!(
            fit(&FitRequest::new(spec, rain)),
            Err(QmmError::Incompatible(_))
        ));
        let pl = ModelSpec::power_law(1.05, 0.77).unwrap();
        let rain = rain_series(&pl);
        assert!(fit(&FitRequest::new(pl, rain).normalize(NormalizeMode::On)).is_err());
    }

    #[test]
    fn invalid_series_rejected() {
        let spec = ModelSpec::power_law(1.05, 0.77).unwrap();
        let bad =
            MeasurementSeries::new(SeriesKind::RainRate, vec![10.0], vec![1.0], String::new());
        assert!(matches!(
            fit(&FitRequest::new(spec, bad)),
            Err(QmmError::Data(_))
        ));
    }

    #[test]
    fn predict_series_edge_cases() {
        let spec = ModelSpec::yeo_cdf(25.4999, 0.0381).unwrap();
        let model = CalibratedModel::base(spec, None).unwrap();
        assert!(predict_series(&model, &[]).unwrap().is_empty());
        assert_eq!(
            predict_series(&model, &[0.3]).unwrap(),
            vec![model.predict(0.3).unwrap()]
        );
        let err = predict_series(&model, &[0.1, 0.0]).unwrap_err();
        assert!(err.to_string().contains("at sample 1"), "{err}");
    }
}
