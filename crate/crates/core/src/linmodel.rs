//! OLS fitting and the regression payoff functions `v(T)`.
//!
//! A [`Dataset`] holds the dependent variable, the candidate feature matrix,
//! and an optional block of fixed regressors that appear in every model.
//! For a coalition `T` the model is `y ~ [intercept | X columns in T | Z]`,
//! and [`payoff`] scores it by R², adjusted R², the F statistic, negated
//! BIC, or negated out-of-sample RMSE. All five are oriented so that larger
//! is better.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::game::FeatureSet;
use crate::{Error, Result};

/// Relative rss threshold below which a fit counts as exact; log-based
/// criteria saturate instead of taking `ln(0)`.
pub const RSS_EXACT_REL_TOL: f64 = 1e-12;

/// Payoff value reported for an exact fit under the BIC and F kinds.
/// Large, finite, and identical for every exactly-fitting coalition.
pub const SATURATED_PAYOFF: f64 = 1e12;

/// Regression data: `y` (length `t_obs`), candidates `X` (`t_obs × n`),
/// fixed regressors `Z` (`t_obs × q`). An intercept is always included.
#[derive(Clone, Debug)]
pub struct Dataset {
    y: DVector<f64>,
    x: DMatrix<f64>,
    z: DMatrix<f64>,
    feature_names: Vec<String>,
    fixed_names: Vec<String>,
}

impl Dataset {
    pub fn new(y: Vec<f64>, x_cols: Vec<Vec<f64>>, z_cols: Vec<Vec<f64>>) -> Result<Self> {
        let t_obs = y.len();
        if t_obs == 0 {
            return Err(Error::Input("dataset has no observations".into()));
        }
        if x_cols.is_empty() {
            return Err(Error::Input("dataset has no candidate features".into()));
        }
        for (i, c) in x_cols.iter().enumerate() {
            if c.len() != t_obs {
                return Err(Error::Input(format!(
                    "candidate column {i} has {} rows, expected {t_obs}",
                    c.len()
                )));
            }
        }
        for (j, c) in z_cols.iter().enumerate() {
            if c.len() != t_obs {
                return Err(Error::Input(format!(
                    "fixed column {j} has {} rows, expected {t_obs}",
                    c.len()
                )));
            }
        }
        let feature_names = (0..x_cols.len()).map(|i| format!("x{i}")).collect();
        let fixed_names = (0..z_cols.len()).map(|j| format!("z{j}")).collect();
        let ds = Dataset {
            y: DVector::from_vec(y),
            x: DMatrix::from_columns(
                &x_cols.iter().map(|c| DVector::from_column_slice(c)).collect::<Vec<_>>(),
            ),
            z: if z_cols.is_empty() {
                DMatrix::zeros(t_obs, 0)
            } else {
                DMatrix::from_columns(
                    &z_cols.iter().map(|c| DVector::from_column_slice(c)).collect::<Vec<_>>(),
                )
            },
            feature_names,
            fixed_names,
        };
        ds.check_finite()?;
        Ok(ds)
    }

    fn check_finite(&self) -> Result<()> {
        if self.y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite entry in dependent variable".into()));
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite entry in candidate features".into()));
        }
        if self.z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite entry in fixed regressors".into()));
        }
        Ok(())
    }

    /// Reads a CSV with a header row. The `target` column becomes `y`,
    /// columns whose header starts with `fixed:` become the fixed block `Z`,
    /// and every other column is a candidate in header order.
    pub fn from_csv(path: &Path, target: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers: Vec<String> = reader.headers()?.iter().map(|s| s.to_string()).collect();
        let target_idx = headers
            .iter()
            .position(|h| h == target)
            .ok_or_else(|| Error::Config(format!("target column '{target}' not found in header")))?;

        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
        for (row_idx, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != headers.len() {
                return Err(Error::Input(format!(
                    "row {} has {} fields, expected {}",
                    row_idx + 2,
                    record.len(),
                    headers.len()
                )));
            }
            for (col, field) in record.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::Input(format!(
                        "column '{}', row {}: cannot parse '{}' as a number",
                        headers[col],
                        row_idx + 2,
                        field
                    ))
                })?;
                columns[col].push(v);
            }
        }

        let mut y = Vec::new();
        let mut x_cols = Vec::new();
        let mut z_cols = Vec::new();
        let mut feature_names = Vec::new();
        let mut fixed_names = Vec::new();
        for (idx, header) in headers.iter().enumerate() {
            let col = std::mem::take(&mut columns[idx]);
            if idx == target_idx {
                y = col;
            } else if let Some(name) = header.strip_prefix("fixed:") {
                fixed_names.push(name.to_string());
                z_cols.push(col);
            } else {
                feature_names.push(header.clone());
                x_cols.push(col);
            }
        }

        let mut ds = Dataset::new(y, x_cols, z_cols)?;
        ds.feature_names = feature_names;
        ds.fixed_names = fixed_names;
        Ok(ds)
    }

    pub fn n_obs(&self) -> usize {
        self.y.len()
    }

    pub fn n_candidates(&self) -> usize {
        self.x.ncols()
    }

    pub fn n_fixed(&self) -> usize {
        self.z.ncols()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn set_feature_names(&mut self, names: Vec<String>) -> Result<()> {
        if names.len() != self.n_candidates() {
            return Err(Error::Config("feature name count mismatch".into()));
        }
        self.feature_names = names;
        Ok(())
    }

    /// Read-only view of the candidate matrix (`t_obs × n`).
    pub fn x_matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// All payoffs are well-defined for every coalition when
    /// `t_obs >= n + q + 2`; returns a warning string otherwise.
    pub fn size_warning(&self) -> Option<String> {
        let need = self.n_candidates() + self.n_fixed() + 2;
        if self.n_obs() < need {
            Some(format!(
                "dataset has {} observations but {} are needed for every payoff to be well-defined ({} candidates + {} fixed + 2)",
                self.n_obs(),
                need,
                self.n_candidates(),
                self.n_fixed()
            ))
        } else {
            None
        }
    }
}

/// Result of one least-squares fit.
#[derive(Clone, Debug)]
pub struct FitResult {
    /// Intercept first, then the selected candidate columns in ascending
    /// index order, then the fixed regressors.
    pub coefficients: DVector<f64>,
    pub residuals: DVector<f64>,
    pub rss: f64,
    /// Total sum of squares about the mean of `y`.
    pub tss: f64,
    /// Number of estimated coefficients.
    pub k: usize,
}

/// Which model-performance score `v(T)` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayoffKind {
    R2,
    Ar2,
    F,
    Bic,
    Rmse,
}

impl PayoffKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "r2" => Ok(PayoffKind::R2),
            "ar2" => Ok(PayoffKind::Ar2),
            "f" => Ok(PayoffKind::F),
            "bic" => Ok(PayoffKind::Bic),
            "rmse" | "rm" => Ok(PayoffKind::Rmse),
            other => Err(Error::Config(format!(
                "unknown payoff kind '{other}' (expected r2, ar2, f, bic, or rmse)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PayoffKind::R2 => "r2",
            PayoffKind::Ar2 => "ar2",
            PayoffKind::F => "f",
            PayoffKind::Bic => "bic",
            PayoffKind::Rmse => "rmse",
        }
    }
}

/// Payoff selection plus the train/test split parameters used by the RMSE
/// kind. The split is drawn once from `split_seed` and reused for every
/// coalition, so `v` stays a pure function of `T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffSpec {
    pub kind: PayoffKind,
    pub split_fraction: f64,
    pub split_seed: u64,
}

impl PayoffSpec {
    pub fn new(kind: PayoffKind) -> Self {
        PayoffSpec {
            kind,
            split_fraction: 0.8,
            split_seed: 0,
        }
    }

    pub fn with_split(mut self, fraction: f64, seed: u64) -> Self {
        self.split_fraction = fraction;
        self.split_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == PayoffKind::Rmse
            && !(self.split_fraction > 0.0 && self.split_fraction < 1.0)
        {
            return Err(Error::Config(format!(
                "rmse split fraction must be in (0,1), got {}",
                self.split_fraction
            )));
        }
        Ok(())
    }
}

/// Minimum-norm least squares via Householder QR, falling back to SVD when
/// the triangular factor is rank deficient.
fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if a.nrows() >= a.ncols() {
        let qr = a.clone().qr();
        let r = qr.r();
        let diag_max = (0..r.nrows())
            .map(|i| r[(i, i)].abs())
            .fold(0.0f64, f64::max);
        let tol = diag_max * 1e-10;
        if diag_max > 0.0 && (0..r.nrows()).all(|i| r[(i, i)].abs() > tol) {
            let qtb = qr.q().transpose() * b;
            if let Some(x) = r.solve_upper_triangular(&qtb) {
                return x;
            }
        }
    }
    svd_solve(a, b)
}

fn svd_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    svd.solve(b, smax * 1e-10)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

fn build_design(data: &Dataset, columns: &[usize], rows: Option<&[usize]>) -> DMatrix<f64> {
    let row_idx: Vec<usize> = match rows {
        Some(r) => r.to_vec(),
        None => (0..data.n_obs()).collect(),
    };
    let m = row_idx.len();
    let k = 1 + columns.len() + data.n_fixed();
    let mut a = DMatrix::zeros(m, k);
    for (r, &row) in row_idx.iter().enumerate() {
        a[(r, 0)] = 1.0;
        for (c, &col) in columns.iter().enumerate() {
            a[(r, c + 1)] = data.x[(row, col)];
        }
        for j in 0..data.n_fixed() {
            a[(r, 1 + columns.len() + j)] = data.z[(row, j)];
        }
    }
    a
}

/// Least-squares fit of `y` on `[intercept | X columns in T | Z]`.
pub fn ols_fit(data: &Dataset, t: FeatureSet) -> Result<FitResult> {
    ols_fit_columns(data, &t.indices())
}

fn ols_fit_columns(data: &Dataset, columns: &[usize]) -> Result<FitResult> {
    for &c in columns {
        if c >= data.n_candidates() {
            return Err(Error::Domain(format!(
                "candidate column {c} out of range 0..{}",
                data.n_candidates()
            )));
        }
    }
    let a = build_design(data, columns, None);
    let coefficients = lstsq(&a, &data.y);
    let residuals = &data.y - &a * &coefficients;
    let rss = residuals.norm_squared();
    let mean = data.y.mean();
    let tss = data.y.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(FitResult {
        k: a.ncols(),
        coefficients,
        residuals,
        rss,
        tss,
    })
}

fn payoff_from_fit(fit: &FitResult, t_obs: usize, kind: PayoffKind) -> Result<f64> {
    if fit.tss <= 0.0 {
        return Err(Error::Input(
            "dependent variable is constant; R-squared-style payoffs are undefined".into(),
        ));
    }
    let rss = fit.rss.max(0.0);
    let exact = rss <= RSS_EXACT_REL_TOL * fit.tss;
    let k = fit.k;
    let t = t_obs as f64;
    match kind {
        PayoffKind::R2 => Ok(1.0 - rss / fit.tss),
        PayoffKind::Ar2 => {
            if t_obs <= k {
                return Err(Error::Domain(format!(
                    "adjusted R2 undefined with {t_obs} observations and {k} coefficients"
                )));
            }
            let r2 = 1.0 - rss / fit.tss;
            Ok(1.0 - (1.0 - r2) * (t - 1.0) / (t - k as f64))
        }
        PayoffKind::F => {
            if k == 1 {
                return Ok(0.0);
            }
            if t_obs <= k {
                return Err(Error::Domain(format!(
                    "F statistic undefined with {t_obs} observations and {k} coefficients"
                )));
            }
            if exact {
                return Ok(SATURATED_PAYOFF);
            }
            Ok(((fit.tss - rss) / (k as f64 - 1.0)) / (rss / (t - k as f64)))
        }
        PayoffKind::Bic => {
            if exact {
                return Ok(SATURATED_PAYOFF);
            }
            // Negated Schwarz criterion so that larger is better.
            Ok(-(t * (rss / t).ln() + k as f64 * t.ln()))
        }
        PayoffKind::Rmse => unreachable!("rmse is handled by the split path"),
    }
}

/// Deterministic train/test row split for the RMSE payoff.
fn rmse_split(t_obs: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rows: Vec<usize> = (0..t_obs).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rows.shuffle(&mut rng);
    let n_train = ((t_obs as f64 * fraction).round() as usize).clamp(1, t_obs - 1);
    let test = rows.split_off(n_train);
    (rows, test)
}

/// The payoff `v(T)` of a coalition, including accepted features forced into
/// the model as additional regressors (`extra`).
pub fn payoff_with_extra(
    data: &Dataset,
    spec: &PayoffSpec,
    t: FeatureSet,
    extra: Option<&FeatureSet>,
) -> Result<f64> {
    spec.validate()?;
    let mut columns = t.indices();
    if let Some(e) = extra {
        for i in e.iter() {
            if !columns.contains(&i) {
                columns.push(i);
            }
        }
        columns.sort_unstable();
    }

    if spec.kind != PayoffKind::Rmse {
        let fit = ols_fit_columns(data, &columns)?;
        return payoff_from_fit(&fit, data.n_obs(), spec.kind);
    }

    let (train, test) = rmse_split(data.n_obs(), spec.split_fraction, spec.split_seed);
    let a_train = build_design(data, &columns, Some(&train));
    let y_train = DVector::from_iterator(train.len(), train.iter().map(|&r| data.y[r]));
    let coef = lstsq(&a_train, &y_train);
    let a_test = build_design(data, &columns, Some(&test));
    let pred = a_test * coef;
    let mut sq = 0.0;
    for (i, &row) in test.iter().enumerate() {
        let e = data.y[row] - pred[i];
        sq += e * e;
    }
    Ok(-(sq / test.len() as f64).sqrt())
}

/// The payoff `v(T)` for a coalition of candidate features.
pub fn payoff(data: &Dataset, spec: &PayoffSpec, t: FeatureSet) -> Result<f64> {
    payoff_with_extra(data, spec, t, None)
}
