use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::ModelSpec;
use crate::error::{QmmError, Result};
use crate::pipeline::NormalizeMode;

/// JSON run configuration for `qmm fit`.
///
/// Relative paths are resolved against the directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub data_path: PathBuf,
    #[serde(default)]
    pub normalize: NormalizeMode,
    pub output_report: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_curve: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_grid: Option<CurveGrid>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveGrid {
    pub min: f64,
    pub max: f64,
    pub points_per_decade: u32,
}

impl CurveGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min > 0.0 && self.min < self.max)
        {
            return Err(QmmError::Config(format!(
                "curve_grid needs 0 < min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.points_per_decade < 2 {
            return Err(QmmError::Config(format!(
                "curve_grid.points_per_decade must be >= 2, got {}",
                self.points_per_decade
            )));
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| QmmError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.model
            .validate()
            .map_err(|e| QmmError::Config(e.to_string()))?;
        if let Some(grid) = &self.curve_grid {
            grid.validate()?;
        }
        Ok(())
    }

    /// Resolves every path against `base` (normally the config's directory).
    pub fn resolve_paths(mut self, base: &Path) -> Self {
        let join = |p: &PathBuf| {
            if p.is_absolute() {
                p.clone()
            } else {
                base.join(p)
            }
        };
        self.data_path = join(&self.data_path);
        self.output_report = join(&self.output_report);
        self.output_curve = self.output_curve.as_ref().map(join);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": {"family": "PowerLaw", "params": {"k": 1.05, "alpha": 0.77}},
        "data_path": "data.csv",
        "output_report": "report.json"
    }"#;

    #[test]
    fn minimal_config_defaults_to_auto() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.normalize, NormalizeMode::Auto);
        assert!(c.output_curve.is_none());
        let c = c.resolve_paths(Path::new("/srv/run"));
        assert_eq!(c.data_path, PathBuf::from("/srv/run/data.csv"));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_json("{").is_err());
        assert!(RunConfig::from_json(&MINIMAL.replace("1.05", "-1.05")).is_err());
        assert!(RunConfig::from_json(&MINIMAL.replace("\"data_path\"", "\"data\"")).is_err());
        let with_grid = MINIMAL.replace(
            "\"output_report\": \"report.json\"",
            "\"output_report\": \"r.json\", \"curve_grid\": {\"min\": 1, \"max\": 100, \"points_per_decade\": 1}",
        );
        assert!(RunConfig::from_json(&with_grid).is_err());
        let bad_mode = MINIMAL.replace(
            "\"output_report\": \"report.json\"",
            "\"output_report\": \"r.json\", \"normalize\": \"sometimes\"",
        );
        assert!(RunConfig::from_json(&bad_mode).is_err());
    }
}
