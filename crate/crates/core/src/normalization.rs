//! Exceedance-percentage scaling.
//!
//! Percentages are multiplied by `s = 0.01 / p_min` so the smallest measured
//! percentage lands on the 0.01 % anchor, and the attenuation measured there
//! becomes the equivalent `A_0.01`.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::basis::ANCHOR_PERCENT;
use crate::dataset::{MeasurementSeries, SeriesKind};
use crate::error::{QmmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDescriptor")]
pub struct NormalizationDescriptor {
    /// `p_n = scale * p`
    pub scale: f64,
    /// Measured attenuation at the smallest original percentage, dB.
    pub a001_equivalent: f64,
    pub original_range: [f64; 2],
    pub normalized_range: [f64; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDescriptor {
    scale: f64,
    a001_equivalent: f64,
    original_range: [f64; 2],
    normalized_range: [f64; 2],
}

impl TryFrom<RawDescriptor> for NormalizationDescriptor {
    type Error = QmmError;

    fn try_from(r: RawDescriptor) -> Result<Self> {
        let d = NormalizationDescriptor {
            scale: r.scale,
            a001_equivalent: r.a001_equivalent,
            original_range: r.original_range,
            normalized_range: r.normalized_range,
        };
        d.validate()?;
        Ok(d)
    }
}

impl NormalizationDescriptor {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.scale) {
            return Err(QmmError::Normalization(format!(
                "scale must be > 0, got {}",
                self.scale
            )));
        }
        if !positive(self.a001_equivalent) {
            return Err(QmmError::Normalization(format!(
                "a001_equivalent must be > 0, got {}",
                self.a001_equivalent
            )));
        }
        for (name, [lo, hi]) in [
            ("original_range", self.original_range),
            ("normalized_range", self.normalized_range),
        ] {
            if !(positive(lo) && positive(hi) && lo <= hi) {
                return Err(QmmError::Normalization(format!(
                    "{name} must be an ordered pair of positive percentages, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn normalize_percentage(&self, p: f64) -> f64 {
        self.scale * p
    }

    /// Inverse of [`normalize_percentage`](Self::normalize_percentage).
    pub fn denormalize_percentage(&self, p_n: f64) -> Result<f64> {
        if !(p_n.is_finite() && p_n > 0.0) {
            return Err(QmmError::Normalization(format!(
                "normalized percentage must be > 0, got {p_n}"
            )));
        }
        Ok(p_n / self.scale)
    }
}

/// Snaps `s` onto the nearest power of ten when they differ only by rounding
/// noise, so that e.g. `0.01 / 1e-5` yields exactly 1000.
fn snap_to_power_of_ten(s: f64) -> f64 {
    let k = s.log10().round();
    let p = 10f64.powi(k as i32);
    if (s - p).abs() <= 4.0 * f64::EPSILON * p {
        p
    } else {
        s
    }
}

/// `s = 0.01 / min(p)`.
pub fn normalization_scale(p_values: &[f64]) -> Result<f64> {
    if p_values.is_empty() {
        return Err(QmmError::Normalization(
            "at least one percentage is required".into(),
        ));
    }
    if let Some(k) = p_values.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(QmmError::Normalization(format!(
            "percentage {} at sample {k} must be > 0",
            p_values[k]
        )));
    }
    let p_min = p_values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(snap_to_power_of_ten(ANCHOR_PERCENT / p_min))
}

/// Scales the abscissas of an exceedance series and records the equivalent
/// anchor attenuation. The returned series is sorted by percentage; the
/// attenuation values are carried over untouched.
pub fn apply_normalization(
    series: &MeasurementSeries,
) -> Result<(MeasurementSeries, NormalizationDescriptor)> {
    if series.kind() != SeriesKind::ExceedancePercent {
        return Err(QmmError::Normalization(
            "only exceedance-percentage series can be normalized".into(),
        ));
    }
    if series.ordinate().len() != series.abscissa().len() {
        return Err(QmmError::Normalization(
            "abscissa and ordinate lengths differ".into(),
        ));
    }
    let scale = normalization_scale(series.abscissa())?;
    let sorted = series.sorted();
    let p = sorted.abscissa();
    let a = sorted.ordinate();
    let p_min = p[0];
    let p_max = p[p.len() - 1];
    // ties at p_min: take the largest attenuation
    let a001_equivalent = p
        .iter()
        .zip(a)
        .take_while(|(pk, _)| **pk == p_min)
        .map(|(_, ak)| *ak)
        .fold(f64::NEG_INFINITY, f64::max);

    let descriptor = NormalizationDescriptor {
        scale,
        a001_equivalent,
        original_range: [p_min, p_max],
        normalized_range: [scale * p_min, scale * p_max],
    };
    descriptor.validate()?;

    if scale < 1.0 {
        warn!(
            "smallest percentage {p_min} is above {ANCHOR_PERCENT}; scaling percentages down by {scale}"
        );
    }
    if descriptor.normalized_range[1] > 1.0 {
        warn!(
            "normalized percentages reach {} %, beyond the 0.01-1 % range",
            descriptor.normalized_range[1]
        );
    }

    let scaled: Vec<f64> = p.iter().map(|pk| scale * pk).collect();
    let normalized = MeasurementSeries::new(
        SeriesKind::ExceedancePercent,
        scaled,
        a.to_vec(),
        sorted.label().to_string(),
    );
    Ok((normalized, descriptor))
}
