//! Gram-matrix assembly and the coefficient solve.
//!
//! The fit minimizes the weighted squared error
//! `sum_k w_k |y_k - sum_m c_m phi_m(x_k)|^2` by solving the normal system
//! `G c = b` with `G[m][n] = <phi_m, phi_n>` and `b[m] = <phi_m, y>`.
//! Base models with repeated constant terms make `G` singular, so the solve
//! goes through a truncated singular-value factorization and returns the
//! minimum-norm least-squares solution.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{QmmError, Result};

/// Default relative singular-value cutoff.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-12;

/// Iterative-refinement passes after the pseudo-inverse solve.
const REFINEMENT_STEPS: usize = 3;

/// Basis samples and transformed ordinates for one fit.
///
/// `phi` is `M x N`: row `m` holds basis function `m` evaluated at every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSamples {
    phi: DMatrix<f64>,
    y: DVector<f64>,
}

impl DesignSamples {
    pub fn new(phi: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if phi.nrows() == 0 {
            return Err(QmmError::EmptySystem);
        }
        if phi.ncols() == 0 {
            return Err(QmmError::Shape("at least one sample is required".into()));
        }
        if y.len() != phi.ncols() {
            return Err(QmmError::Shape(format!(
                "{} ordinates for {} samples",
                y.len(),
                phi.ncols()
            )));
        }
        Ok(Self { phi, y })
    }

    /// Builds samples from row-major basis rows (one `Vec` per basis function).
    pub fn from_rows(rows: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(QmmError::Shape(format!(
                "basis row {bad} has {} samples, expected {n}",
                rows[bad].len()
            )));
        }
        let phi = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        Self::new(phi, DVector::from_column_slice(y))
    }

    pub fn basis_count(&self) -> usize {
        self.phi.nrows()
    }

    pub fn sample_count(&self) -> usize {
        self.phi.ncols()
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn ordinates(&self) -> &DVector<f64> {
        &self.y
    }

    fn check_basis_finite(&self) -> Result<()> {
        for sample in 0..self.phi.ncols() {
            for basis in 0..self.phi.nrows() {
                if !self.phi[(basis, sample)].is_finite() {
                    return Err(QmmError::NonFiniteBasis { basis, sample });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default = "default_rank_tolerance")]
    pub rank_tolerance: f64,
}

fn default_rank_tolerance() -> f64 {
    DEFAULT_RANK_TOLERANCE
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            weights: None,
            rank_tolerance: DEFAULT_RANK_TOLERANCE,
        }
    }
}

impl FitOptions {
    pub fn with_weights(weights: Vec<f64>) -> Self {
        Self {
            weights: Some(weights),
            ..Self::default()
        }
    }

    /// Checks the options against a sample count and returns the effective weights.
    pub fn resolve_weights(&self, n: usize) -> Result<Vec<f64>> {
        if !(self.rank_tolerance.is_finite() && self.rank_tolerance >= 0.0) {
            return Err(QmmError::InvalidWeights(format!(
                "rank_tolerance must be finite and >= 0, got {}",
                self.rank_tolerance
            )));
        }
        match &self.weights {
            None => Ok(vec![1.0; n]),
            Some(w) => {
                if w.len() != n {
                    return Err(QmmError::InvalidWeights(format!(
                        "{} weights for {n} samples",
                        w.len()
                    )));
                }
                if let Some(k) = w.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(QmmError::InvalidWeights(format!(
                        "weight {k} is {} (must be finite and >= 0)",
                        w[k]
                    )));
                }
                if !w.iter().any(|v| *v > 0.0) {
                    return Err(QmmError::InvalidWeights(
                        "at least one weight must be positive".into(),
                    ));
                }
                Ok(w.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub rank: usize,
    /// Ratio of the extreme retained singular values; infinite when rank < M.
    /// Serialized as `null` in that case since JSON has no infinity.
    #[serde(with = "infinite_as_null")]
    pub condition_number: f64,
    pub residual_norm: f64,
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

fn weighted_inner(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>, w: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for ((x, y), wk) in a.zip(b).zip(w) {
        acc.add(wk * x * y);
    }
    acc.value()
}

/// `G[m][n] = sum_k w_k phi_m(x_k) phi_n(x_k)`; the upper triangle is computed
/// and mirrored, so the result is exactly symmetric.
pub fn gram_matrix(samples: &DesignSamples, opts: &FitOptions) -> Result<DMatrix<f64>> {
    samples.check_basis_finite()?;
    let w = opts.resolve_weights(samples.sample_count())?;
    let m = samples.basis_count();
    let phi = &samples.phi;
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = weighted_inner(phi.row(i).iter().copied(), phi.row(j).iter().copied(), &w);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// `b[m] = sum_k w_k phi_m(x_k) y_k`.
pub fn moment_vector(samples: &DesignSamples, opts: &FitOptions) -> Result<DVector<f64>> {
    samples.check_basis_finite()?;
    if let Some(sample) = samples.y.iter().position(|v| !v.is_finite()) {
        return Err(QmmError::NonFiniteOrdinate { sample });
    }
    let w = opts.resolve_weights(samples.sample_count())?;
    let m = samples.basis_count();
    Ok(DVector::from_fn(m, |i, _| {
        weighted_inner(
            samples.phi.row(i).iter().copied(),
            samples.y.iter().copied(),
            &w,
        )
    }))
}

/// Solves `G c = b`, returning the minimum-norm least-squares solution when
/// `G` is rank deficient.
///
/// Singular values below `rank_tolerance * sigma_max` are treated as zero.
pub fn solve_coefficients(
    g: &DMatrix<f64>,
    b: &DVector<f64>,
    opts: &FitOptions,
) -> Result<(DVector<f64>, SolveDiagnostics)> {
    let m = g.nrows();
    if m == 0 {
        return Err(QmmError::EmptySystem);
    }
    if g.ncols() != m || b.len() != m {
        return Err(QmmError::Shape(format!(
            "Gram matrix is {}x{}, moment vector has length {}",
            g.nrows(),
            g.ncols(),
            b.len()
        )));
    }
    if g.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(QmmError::Solver(
            "non-finite entry in the linear system".into(),
        ));
    }
    if !(opts.rank_tolerance.is_finite() && opts.rank_tolerance >= 0.0) {
        return Err(QmmError::Solver(format!(
            "rank_tolerance must be finite and >= 0, got {}",
            opts.rank_tolerance
        )));
    }

    let svd = g.clone().svd(true, true);
    let u = svd
        .u
        .as_ref()
        .ok_or_else(|| QmmError::Solver("singular value factorization did not converge".into()))?;
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or_else(|| QmmError::Solver("singular value factorization did not converge".into()))?;
    let sigma = &svd.singular_values;

    let sigma_max = sigma.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = opts.rank_tolerance * sigma_max;
    let kept: Vec<usize> = (0..sigma.len())
        .filter(|&i| sigma[i] > cutoff && sigma[i] > 0.0)
        .collect();
    let rank = kept.len();

    if rank == 0 {
        if b.iter().any(|v| *v != 0.0) {
            return Err(QmmError::NoInformativeBasis);
        }
        let c = DVector::zeros(m);
        return Ok((
            c,
            SolveDiagnostics {
                rank: 0,
                condition_number: f64::INFINITY,
                residual_norm: 0.0,
            },
        ));
    }

    let pinv = |r: &DVector<f64>| -> DVector<f64> {
        let mut out = DVector::zeros(m);
        for &i in &kept {
            let coef = u.column(i).dot(r) / sigma[i];
            out.axpy(coef, &v_t.row(i).transpose(), 1.0);
        }
        out
    };
    // Corrections stay in the span of the kept right singular vectors, so
    // refinement keeps the minimum-norm property.
    let mut c = pinv(b);
    let mut residual = (g * &c - b).norm();
    for _ in 0..REFINEMENT_STEPS {
        let candidate = &c + pinv(&(b - g * &c));
        let r = (g * &candidate - b).norm();
        if r.is_nan() || r >= residual {
            break;
        }
        c = candidate;
        residual = r;
    }

    let sigma_min = kept.iter().map(|&i| sigma[i]).fold(f64::INFINITY, f64::min);
    let condition_number = if rank == m {
        sigma_max / sigma_min
    } else {
        f64::INFINITY
    };
    let residual_norm = residual;
    Ok((
        c,
        SolveDiagnostics {
            rank,
            condition_number,
            residual_norm,
        },
    ))
}

/// Weighted squared error `sum_k w_k (y_k - sum_m c_m phi_m(x_k))^2`.
pub fn weighted_squared_error(
    samples: &DesignSamples,
    c: &DVector<f64>,
    opts: &FitOptions,
) -> Result<f64> {
    if c.len() != samples.basis_count() {
        return Err(QmmError::Shape(format!(
            "{} coefficients for {} basis functions",
            c.len(),
            samples.basis_count()
        )));
    }
    let w = opts.resolve_weights(samples.sample_count())?;
    let fitted = samples.phi.tr_mul(c);
    let mut acc = CompensatedSum::default();
    for k in 0..samples.sample_count() {
        let r = samples.y[k] - fitted[k];
        acc.add(w[k] * r * r);
    }
    Ok(acc.value())
}
