//! Base-model families recast as linear combinations of basis functions.
//!
//! Each family fixes an ordinate transform, an ordered basis list and the
//! back-transform that turns `sum_m c_m phi_m(x)` into a prediction. With every
//! coefficient equal to one the prediction is the base model itself.
//!
//! | family       | abscissa        | transform | M |
//! |--------------|-----------------|-----------|---|
//! | `PowerLaw`   | rain rate R     | ln        | 2 |
//! | `LogLinear`  | rain rate R     | identity  | 2 |
//! | `ItuCdf`     | exceedance p, % | ln        | 4 |
//! | `ChineseCdf` | exceedance p, % | ln        | 6 |
//! | `YeoCdf`     | exceedance p, % | ln        | 5 |

use std::f64::consts::LN_10;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QmmError, Result};
use crate::normalization::NormalizationDescriptor;

/// Percentage at which the CDF families are anchored.
pub const ANCHOR_PERCENT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    PowerLaw,
    LogLinear,
    ItuCdf,
    ChineseCdf,
    YeoCdf,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::PowerLaw,
        Family::LogLinear,
        Family::ItuCdf,
        Family::ChineseCdf,
        Family::YeoCdf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::PowerLaw => "PowerLaw",
            Family::LogLinear => "LogLinear",
            Family::ItuCdf => "ItuCdf",
            Family::ChineseCdf => "ChineseCdf",
            Family::YeoCdf => "YeoCdf",
        }
    }

    pub fn basis_count(self) -> usize {
        match self {
            Family::PowerLaw | Family::LogLinear => 2,
            Family::ItuCdf => 4,
            Family::ChineseCdf => 6,
            Family::YeoCdf => 5,
        }
    }

    /// True for families whose abscissa is an exceedance percentage.
    pub fn is_cdf(self) -> bool {
        matches!(self, Family::ItuCdf | Family::ChineseCdf | Family::YeoCdf)
    }

    pub fn ordinate_transform(self) -> OrdinateTransform {
        match self {
            Family::LogLinear => OrdinateTransform::Identity,
            _ => OrdinateTransform::NaturalLog,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrdinateTransform {
    NaturalLog,
    Identity,
}

impl OrdinateTransform {
    pub fn apply(self, y: f64) -> Result<f64> {
        match self {
            OrdinateTransform::NaturalLog => {
                if !(y > 0.0 && y.is_finite()) {
                    return Err(QmmError::OrdinateDomain {
                        sample: None,
                        value: y,
                    });
                }
                Ok(y.ln())
            }
            OrdinateTransform::Identity => Ok(y),
        }
    }

    pub fn invert(self, z: f64) -> f64 {
        match self {
            OrdinateTransform::NaturalLog => z.exp(),
            OrdinateTransform::Identity => z,
        }
    }
}

/// `gamma = K R^alpha`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawParams {
    pub k: f64,
    pub alpha: f64,
}

/// `gamma = a ln R + b`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogLinearParams {
    pub a: f64,
    pub b: f64,
}

/// `A_p = A_0.01 B1 p^-(B2 + B3 log10 p)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItuCdfParams {
    pub a001: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChineseCdfParams {
    pub a001_eq: f64,
    pub frequency_ghz: f64,
}

/// `beta_sin_theta` is the site constant `beta * sin(elevation)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YeoCdfParams {
    pub a001: f64,
    pub beta_sin_theta: f64,
}

/// A base-model family together with its fixed parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", try_from = "RawModelSpec")]
pub enum ModelSpec {
    PowerLaw(PowerLawParams),
    LogLinear(LogLinearParams),
    ItuCdf(ItuCdfParams),
    ChineseCdf(ChineseCdfParams),
    YeoCdf(YeoCdfParams),
}

#[derive(Deserialize)]
#[serde(tag = "family", content = "params")]
enum RawModelSpec {
    PowerLaw(PowerLawParams),
    LogLinear(LogLinearParams),
    ItuCdf(ItuCdfParams),
    ChineseCdf(ChineseCdfParams),
    YeoCdf(YeoCdfParams),
}

impl TryFrom<RawModelSpec> for ModelSpec {
    type Error = QmmError;

    fn try_from(raw: RawModelSpec) -> Result<Self> {
        let spec = match raw {
            RawModelSpec::PowerLaw(p) => ModelSpec::PowerLaw(p),
            RawModelSpec::LogLinear(p) => ModelSpec::LogLinear(p),
            RawModelSpec::ItuCdf(p) => ModelSpec::ItuCdf(p),
            RawModelSpec::ChineseCdf(p) => ModelSpec::ChineseCdf(p),
            RawModelSpec::YeoCdf(p) => ModelSpec::YeoCdf(p),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn require_finite(family: Family, name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(QmmError::InvalidParameter(format!(
            "{family}: {name} must be finite, got {v}"
        )))
    }
}

fn require_positive(family: Family, name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(QmmError::InvalidParameter(format!(
            "{family}: {name} must be > 0, got {v}"
        )))
    }
}

impl ModelSpec {
    pub fn power_law(k: f64, alpha: f64) -> Result<Self> {
        Self::checked(ModelSpec::PowerLaw(PowerLawParams { k, alpha }))
    }

    pub fn log_linear(a: f64, b: f64) -> Result<Self> {
        Self::checked(ModelSpec::LogLinear(LogLinearParams { a, b }))
    }

    pub fn itu_cdf(a001: f64, b1: f64, b2: f64, b3: f64) -> Result<Self> {
        Self::checked(ModelSpec::ItuCdf(ItuCdfParams { a001, b1, b2, b3 }))
    }

    pub fn chinese_cdf(a001_eq: f64, frequency_ghz: f64) -> Result<Self> {
        Self::checked(ModelSpec::ChineseCdf(ChineseCdfParams {
            a001_eq,
            frequency_ghz,
        }))
    }

    pub fn yeo_cdf(a001: f64, beta_sin_theta: f64) -> Result<Self> {
        Self::checked(ModelSpec::YeoCdf(YeoCdfParams {
            a001,
            beta_sin_theta,
        }))
    }

    fn checked(spec: Self) -> Result<Self> {
        spec.validate()?;
        Ok(spec)
    }

    pub fn family(&self) -> Family {
        match self {
            ModelSpec::PowerLaw(_) => Family::PowerLaw,
            ModelSpec::LogLinear(_) => Family::LogLinear,
            ModelSpec::ItuCdf(_) => Family::ItuCdf,
            ModelSpec::ChineseCdf(_) => Family::ChineseCdf,
            ModelSpec::YeoCdf(_) => Family::YeoCdf,
        }
    }

    pub fn basis_count(&self) -> usize {
        self.family().basis_count()
    }

    pub fn ordinate_transform(&self) -> OrdinateTransform {
        self.family().ordinate_transform()
    }

    pub fn validate(&self) -> Result<()> {
        let fam = self.family();
        match *self {
            ModelSpec::PowerLaw(p) => {
                require_positive(fam, "k", p.k)?;
                require_finite(fam, "alpha", p.alpha)
            }
            ModelSpec::LogLinear(p) => {
                require_finite(fam, "a", p.a)?;
                require_finite(fam, "b", p.b)
            }
            ModelSpec::ItuCdf(p) => {
                require_positive(fam, "a001", p.a001)?;
                require_positive(fam, "b1", p.b1)?;
                require_finite(fam, "b2", p.b2)?;
                require_finite(fam, "b3", p.b3)
            }
            ModelSpec::ChineseCdf(p) => {
                require_positive(fam, "a001_eq", p.a001_eq)?;
                require_positive(fam, "frequency_ghz", p.frequency_ghz)
            }
            ModelSpec::YeoCdf(p) => {
                require_positive(fam, "a001", p.a001)?;
                require_finite(fam, "beta_sin_theta", p.beta_sin_theta)
            }
        }
    }

    /// The 0.01 % anchor attenuation of a CDF family, if any.
    pub fn anchor(&self) -> Option<f64> {
        match *self {
            ModelSpec::ItuCdf(p) => Some(p.a001),
            ModelSpec::ChineseCdf(p) => Some(p.a001_eq),
            ModelSpec::YeoCdf(p) => Some(p.a001),
            ModelSpec::PowerLaw(_) | ModelSpec::LogLinear(_) => None,
        }
    }

    /// Returns a copy with the anchor attenuation replaced. Rain-rate
    /// families have no anchor and are returned unchanged.
    pub fn with_anchor(&self, a001: f64) -> Result<Self> {
        let spec = match *self {
            ModelSpec::ItuCdf(p) => ModelSpec::ItuCdf(ItuCdfParams { a001, ..p }),
            ModelSpec::ChineseCdf(p) => {
                ModelSpec::ChineseCdf(ChineseCdfParams { a001_eq: a001, ..p })
            }
            ModelSpec::YeoCdf(p) => ModelSpec::YeoCdf(YeoCdfParams { a001, ..p }),
            other => other,
        };
        Self::checked(spec)
    }

    /// Evaluates `[phi_1(x), ..., phi_M(x)]`.
    ///
    /// `x` is the rain rate for rain-rate families and the (possibly
    /// normalized) exceedance percentage for CDF families.
    pub fn basis_eval(&self, x: f64) -> Result<Vec<f64>> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(QmmError::Domain {
                family: self.family().name(),
                sample: None,
                value: x,
            });
        }
        let ln_x = x.ln();
        let phi = match *self {
            ModelSpec::PowerLaw(p) => vec![p.k.ln(), p.alpha * ln_x],
            ModelSpec::LogLinear(p) => vec![p.a * ln_x, p.b],
            ModelSpec::ItuCdf(p) => {
                let log10_x = ln_x / LN_10;
                vec![p.a001.ln(), p.b1.ln(), -p.b2 * ln_x, -p.b3 * log10_x * ln_x]
            }
            ModelSpec::ChineseCdf(p) => {
                let ln_a = p.a001_eq.ln();
                let lr = (x / ANCHOR_PERCENT).ln();
                vec![
                    ln_a,
                    -0.854 * lr,
                    (0.026 * x.ln_1p() / x) * lr,
                    (0.022 * ln_a) * lr,
                    (0.03 * p.frequency_ghz.ln()) * lr,
                    (0.226 * (1.0 + x)) * lr,
                ]
            }
            ModelSpec::YeoCdf(p) => {
                let ln_a = p.a001.ln();
                let lr = (x / ANCHOR_PERCENT).ln();
                vec![
                    ln_a,
                    -1.0063 * lr,
                    (-0.0591 * ln_x) * lr,
                    (0.1317 * ln_a) * lr,
                    (p.beta_sin_theta * (1.0 - x)) * lr,
                ]
            }
        };
        debug_assert_eq!(phi.len(), self.basis_count());
        Ok(phi)
    }

    /// Applies the family's ordinate transform to a measured value.
    pub fn transform_ordinate(&self, y: f64) -> Result<f64> {
        self.ordinate_transform().apply(y)
    }

    /// `sum_m c_m phi_m(x)` in transformed space.
    pub fn linear_predictor(&self, coefficients: &[f64], x: f64) -> Result<f64> {
        if coefficients.len() != self.basis_count() {
            return Err(QmmError::Shape(format!(
                "{}: {} coefficients, expected {}",
                self.family(),
                coefficients.len(),
                self.basis_count()
            )));
        }
        let phi = self.basis_eval(x)?;
        let z: f64 = phi.iter().zip(coefficients).map(|(p, c)| c * p).sum();
        if z.is_nan() {
            return Err(QmmError::Solver(format!(
                "{}: prediction at {x} is undefined (terms overflow with opposite signs)",
                self.family()
            )));
        }
        Ok(z)
    }

    /// Base-model prediction at `x` (all coefficients equal to one).
    pub fn base_prediction(&self, x: f64) -> Result<f64> {
        let ones = vec![1.0; self.basis_count()];
        Ok(self
            .ordinate_transform()
            .invert(self.linear_predictor(&ones, x)?))
    }
}

/// A base model re-weighted by fitted coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCalibratedModel")]
pub struct CalibratedModel {
    pub spec: ModelSpec,
    pub coefficients: Vec<f64>,
    #[serde(default)]
    pub normalization: Option<NormalizationDescriptor>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibratedModel {
    spec: ModelSpec,
    coefficients: Vec<f64>,
    #[serde(default)]
    normalization: Option<NormalizationDescriptor>,
}

impl TryFrom<RawCalibratedModel> for CalibratedModel {
    type Error = QmmError;

    fn try_from(raw: RawCalibratedModel) -> Result<Self> {
        CalibratedModel::new(raw.spec, raw.coefficients, raw.normalization)
    }
}

impl CalibratedModel {
    pub fn new(
        spec: ModelSpec,
        coefficients: Vec<f64>,
        normalization: Option<NormalizationDescriptor>,
    ) -> Result<Self> {
        spec.validate()?;
        if coefficients.len() != spec.basis_count() {
            return Err(QmmError::InvalidParameter(format!(
                "{}: {} coefficients, expected {}",
                spec.family(),
                coefficients.len(),
                spec.basis_count()
            )));
        }
        if let Some(k) = coefficients.iter().position(|c| !c.is_finite()) {
            return Err(QmmError::InvalidParameter(format!(
                "coefficient {k} is not finite"
            )));
        }
        if normalization.is_some() && !spec.family().is_cdf() {
            return Err(QmmError::InvalidParameter(format!(
                "{}: normalization applies to exceedance-percentage families only",
                spec.family()
            )));
        }
        Ok(Self {
            spec,
            coefficients,
            normalization,
        })
    }

    /// The base model: same spec and normalization, all coefficients one.
    pub fn base(spec: ModelSpec, normalization: Option<NormalizationDescriptor>) -> Result<Self> {
        Self::new(spec, vec![1.0; spec.basis_count()], normalization)
    }

    /// Maps a raw abscissa to the one the basis is evaluated at.
    pub fn basis_abscissa(&self, x: f64) -> f64 {
        match &self.normalization {
            Some(d) => d.normalize_percentage(x),
            None => x,
        }
    }

    /// Prediction in transformed space.
    pub fn linear_predictor(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(QmmError::Domain {
                family: self.spec.family().name(),
                sample: None,
                value: x,
            });
        }
        self.spec
            .linear_predictor(&self.coefficients, self.basis_abscissa(x))
    }

    /// Predicted attenuation (dB or dB/km) at the raw abscissa `x`.
    pub fn predict(&self, x: f64) -> Result<f64> {
        Ok(self
            .spec
            .ordinate_transform()
            .invert(self.linear_predictor(x)?))
    }

    pub fn predict_series(&self, abscissas: &[f64]) -> Result<Vec<f64>> {
        abscissas
            .iter()
            .enumerate()
            .map(|(k, &x)| self.predict(x).map_err(|e| e.at_sample(k)))
            .collect()
    }
}
