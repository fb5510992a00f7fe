//! Abscissa lists and grids for curve output and `qmm predict`.

use crate::error::{QmmError, Result};

/// Parses `0.01,0.1,1`. Domain checks are left to the model.
pub fn parse_abscissa_list(text: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .enumerate()
        .map(|(i, tok)| {
            let t = tok.trim();
            match t.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(QmmError::Config(format!(
                    "value {} of --at is not a finite number: '{t}'",
                    i + 1
                ))),
            }
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(QmmError::Config("--at needs at least one value".into()));
    }
    Ok(values)
}

/// A `min,max,n` grid request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Largest grid `qmm predict --grid` will produce.
pub const MAX_GRID_POINTS: usize = 1_000_000;

pub fn parse_grid_spec(text: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [lo, hi, n] = parts[..] else {
        return Err(QmmError::Config(format!(
            "--grid expects min,max,n, got '{text}'"
        )));
    };
    let num = |s: &str, what: &str| -> Result<f64> {
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(QmmError::Config(format!(
                "--grid {what} '{s}' is not a finite number"
            ))),
        }
    };
    let min = num(lo, "min")?;
    let max = num(hi, "max")?;
    let points: usize = n
        .parse()
        .map_err(|_| QmmError::Config(format!("--grid point count '{n}' is not an integer")))?;
    if points == 0 || points > MAX_GRID_POINTS {
        return Err(QmmError::Config(format!(
            "--grid point count must be in 1..={MAX_GRID_POINTS}, got {points}"
        )));
    }
    if min > max {
        return Err(QmmError::Config(format!(
            "--grid min {min} exceeds max {max}"
        )));
    }
    if points > 1 && min == max {
        return Err(QmmError::Config(
            "--grid with several points needs min < max".into(),
        ));
    }
    Ok(GridSpec { min, max, points })
}

impl GridSpec {
    /// `points` values from `min` to `max`, log-spaced when `logarithmic`.
    /// A log-spaced grid with a non-positive endpoint falls back to linear so
    /// the domain error surfaces at prediction time.
    pub fn values(&self, logarithmic: bool) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let last = (self.points - 1) as f64;
        if logarithmic && self.min > 0.0 {
            let (a, b) = (self.min.log10(), self.max.log10());
            (0..self.points)
                .map(|i| match i {
                    0 => self.min,
                    i if i == self.points - 1 => self.max,
                    i => 10f64.powf(a + (b - a) * i as f64 / last),
                })
                .collect()
        } else {
            (0..self.points)
                .map(|i| match i {
                    0 => self.min,
                    i if i == self.points - 1 => self.max,
                    i => self.min + (self.max - self.min) * i as f64 / last,
                })
                .collect()
        }
    }
}

/// Points `10^(log10(min) + i / per_decade)` up to `max`, with `max` appended.
pub fn log_grid(min: f64, max: f64, per_decade: u32) -> Vec<f64> {
    let start = min.log10();
    let steps = ((max.log10() - start) * per_decade as f64 + 1e-9).floor() as usize;
    let mut out: Vec<f64> = (0..=steps)
        .map(|i| match i {
            0 => min,
            i => 10f64.powf(start + i as f64 / per_decade as f64),
        })
        .filter(|v| *v < max * (1.0 - 1e-12))
        .collect();
    out.push(max);
    out
}

/// Evenly spaced points; the count scales with the decades spanned so a
/// config's `points_per_decade` means the same density on either axis type.
pub fn linear_grid(min: f64, max: f64, per_decade: u32) -> Vec<f64> {
    let decades = (max / min).log10().max(1.0);
    let n = ((per_decade as f64 * decades).ceil() as usize + 1).max(2);
    GridSpec {
        min,
        max,
        points: n,
    }
    .values(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abscissa_lists() {
        assert_eq!(
            parse_abscissa_list("0.01, 0.1,1").unwrap(),
            vec![0.01, 0.1, 1.0]
        );
        assert_eq!(parse_abscissa_list("0").unwrap(), vec![0.0]);
        assert!(parse_abscissa_list("").is_err());
        assert!(parse_abscissa_list("0.1,,1").is_err());
        assert!(parse_abscissa_list("0.1,x").is_err());
        assert!(parse_abscissa_list("inf").is_err());
    }

    #[test]
    fn grid_specs() {
        let g = parse_grid_spec("0.001,1,4").unwrap();
        let v = g.values(true);
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], 0.001);
        assert_eq!(v[3], 1.0);
        assert!((v[1] - 0.01).abs() < 1e-15);
        let lin = parse_grid_spec("10,40,4").unwrap().values(false);
        assert_eq!(lin, vec![10.0, 20.0, 30.0, 40.0]);
        assert!(parse_grid_spec("1,2").is_err());
        assert!(parse_grid_spec("2,1,3").is_err());
        assert!(parse_grid_spec("1,2,0").is_err());
        assert!(parse_grid_spec("1,1,3").is_err());
        assert_eq!(parse_grid_spec("1,1,1").unwrap().values(true), vec![1.0]);
    }

    #[test]
    fn log_grid_hits_decades() {
        let g = log_grid(1e-5, 1e-3, 2);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 1e-5);
        assert_eq!(g[4], 1e-3);
        let g = log_grid(0.01, 0.5, 10);
        assert_eq!(*g.last().unwrap(), 0.5);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn linear_grid_density() {
        let g = linear_grid(1.0, 100.0, 5);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[10], 100.0);
    }
}
