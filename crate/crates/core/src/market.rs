//! Market description: return panels, moment estimation and the frontier
//! scalars `a`, `b`, `c` that every closed-form portfolio consumes.

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{identity_residual, max_relative_asymmetry, Cholesky};

/// Max-norm tolerance for `sigma * sigma_inv - I`.
const INVERSE_RESIDUAL_TOL: f64 = 1e-8;
/// Relative symmetry tolerance on the covariance input.
const SYMMETRY_RTOL: f64 = 1e-12;
/// `a*b - c^2` must exceed this fraction of `a*b`.
const DISCRIMINANT_RTOL: f64 = 1e-14;

/// A `T x n` panel of per-period simple returns.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMatrix {
    values: Array2<f64>,
    asset_names: Vec<String>,
    period_labels: Vec<String>,
}

impl ReturnMatrix {
    /// Build a validated panel. Rows are periods, columns are assets.
    ///
    /// Panels used for moment estimation need at least two periods and two
    /// assets; that is enforced by [`estimate_moments`], not here, so that
    /// single-asset panels remain usable for backtesting.
    pub fn new(
        values: Array2<f64>,
        asset_names: Vec<String>,
        period_labels: Vec<String>,
    ) -> Result<Self> {
        let (t, n) = values.dim();
        if t == 0 || n == 0 {
            return Err(Error::InvalidInput("return panel is empty".into()));
        }
        if asset_names.len() != n {
            return Err(Error::InvalidInput(format!(
                "{} asset names for {} columns",
                asset_names.len(),
                n
            )));
        }
        if period_labels.len() != t {
            return Err(Error::InvalidInput(format!(
                "{} period labels for {} rows",
                period_labels.len(),
                t
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite return value {bad}")));
        }
        for (i, name) in asset_names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidInput(format!("asset {i} has an empty name")));
            }
            if asset_names[..i].contains(name) {
                return Err(Error::InvalidInput(format!("duplicate asset name {name:?}")));
            }
        }
        Ok(Self {
            values,
            asset_names,
            period_labels,
        })
    }

    pub fn n_periods(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_assets(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn asset_names(&self) -> &[String] {
        &self.asset_names
    }

    pub fn period_labels(&self) -> &[String] {
        &self.period_labels
    }

    /// Rows whose index satisfies the predicate, in original order.
    pub(crate) fn select_rows(&self, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let idx: Vec<usize> = (0..self.n_periods()).filter(|&i| keep(i)).collect();
        if idx.is_empty() {
            return Err(Error::InvalidInput("row selection is empty".into()));
        }
        let mut values = Array2::<f64>::zeros((idx.len(), self.n_assets()));
        let mut labels = Vec::with_capacity(idx.len());
        for (row, &i) in idx.iter().enumerate() {
            values.row_mut(row).assign(&self.values.row(i));
            labels.push(self.period_labels[i].clone());
        }
        ReturnMatrix::new(values, self.asset_names.clone(), labels)
    }
}

/// Estimated moments plus everything the frontier closed forms need:
/// `a = mu' inv(Sigma) mu`, `b = 1' inv(Sigma) 1`, `c = 1' inv(Sigma) mu`.
#[derive(Debug, Clone)]
pub struct MarketModel {
    mu: Array1<f64>,
    sigma: Array2<f64>,
    sigma_inv: Array2<f64>,
    /// Cached `inv(Sigma) mu`.
    inv_mu: Array1<f64>,
    /// Cached `inv(Sigma) 1`.
    inv_one: Array1<f64>,
    a: f64,
    b: f64,
    c: f64,
    asset_names: Vec<String>,
}

impl MarketModel {
    /// Build a model from explicit moments.
    ///
    /// `sigma` must be symmetric positive definite; the frontier must not
    /// degenerate (`a*b - c^2 > 0` strictly).
    pub fn from_moments(mu: Array1<f64>, sigma: Array2<f64>) -> Result<Self> {
        let names = (0..mu.len()).map(|i| format!("A{i}")).collect();
        Self::from_named_moments(mu, sigma, names)
    }

    pub fn from_named_moments(
        mu: Array1<f64>,
        sigma: Array2<f64>,
        asset_names: Vec<String>,
    ) -> Result<Self> {
        let n = mu.len();
        if n < 2 {
            return Err(Error::InvalidInput("at least two assets required".into()));
        }
        if sigma.dim() != (n, n) {
            return Err(Error::InvalidInput(format!(
                "covariance is {:?}, expected ({n}, {n})",
                sigma.dim()
            )));
        }
        if asset_names.len() != n {
            return Err(Error::InvalidInput("asset name count mismatch".into()));
        }
        if mu.iter().any(|v| !v.is_finite()) || sigma.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite moment".into()));
        }
        let asym = max_relative_asymmetry(&sigma);
        if asym > SYMMETRY_RTOL {
            return Err(Error::InvalidInput(format!(
                "covariance asymmetry {asym:.3e} exceeds {SYMMETRY_RTOL:.0e}"
            )));
        }

        // The scalars come from triangular solves against mu and 1; the dense
        // inverse is kept only for callers and the residual check.
        let chol = Cholesky::new(&sigma)?;
        let inv_mu = chol.solve(&mu);
        let ones = Array1::<f64>::ones(n);
        let inv_one = chol.solve(&ones);
        let a = mu.dot(&inv_mu);
        let b = ones.dot(&inv_one);
        let c = ones.dot(&inv_mu);

        let discriminant = a * b - c * c;
        if !(b > 0.0) || !(a > 0.0) || discriminant <= DISCRIMINANT_RTOL * a * b {
            return Err(Error::DegenerateMarket { discriminant });
        }

        let sigma_inv = chol.inverse();
        let residual = identity_residual(&sigma, &sigma_inv);
        if residual > INVERSE_RESIDUAL_TOL {
            return Err(Error::InvalidInput(format!(
                "covariance is too ill-conditioned: inverse residual {residual:.3e}"
            )));
        }

        Ok(Self {
            mu,
            sigma,
            sigma_inv,
            inv_mu,
            inv_one,
            a,
            b,
            c,
            asset_names,
        })
    }

    pub fn n_assets(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &Array1<f64> {
        &self.mu
    }

    pub fn sigma(&self) -> &Array2<f64> {
        &self.sigma
    }

    pub fn sigma_inv(&self) -> &Array2<f64> {
        &self.sigma_inv
    }

    pub fn asset_names(&self) -> &[String] {
        &self.asset_names
    }

    pub(crate) fn inv_mu(&self) -> &Array1<f64> {
        &self.inv_mu
    }

    pub(crate) fn inv_one(&self) -> &Array1<f64> {
        &self.inv_one
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Expected return of the global minimum variance portfolio, `c/b`.
    pub fn r_gmv(&self) -> f64 {
        self.c / self.b
    }

    /// Risk of the global minimum variance portfolio, `1/sqrt(b)`.
    pub fn sigma_gmv(&self) -> f64 {
        1.0 / self.b.sqrt()
    }
}

/// Per-asset descriptive statistics (Table-1 style).
#[derive(Debug, Clone, Serialize)]
pub struct AssetStats {
    pub name: String,
    pub mean: f64,
    pub risk: f64,
    pub min: f64,
    pub max: f64,
}

/// Column means and the unbiased sample covariance (divisor `T - 1`),
/// validated into a [`MarketModel`].
pub fn estimate_moments(returns: &ReturnMatrix) -> Result<MarketModel> {
    let t = returns.n_periods();
    let n = returns.n_assets();
    if t < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 periods to estimate a covariance, got {t}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 assets for a frontier, got {n}"
        )));
    }
    if t < n + 1 {
        log::warn!("only {t} observations for {n} assets; covariance may be near-singular");
    }

    let values = returns.values();
    let mu = values
        .mean_axis(ndarray::Axis(0))
        .expect("panel has at least one row");
    let mut sigma = Array2::<f64>::zeros((n, n));
    for row in values.rows() {
        for i in 0..n {
            let di = row[i] - mu[i];
            for j in i..n {
                sigma[[i, j]] += di * (row[j] - mu[j]);
            }
        }
    }
    let denom = (t - 1) as f64;
    for i in 0..n {
        for j in i..n {
            let v = sigma[[i, j]] / denom;
            sigma[[i, j]] = v;
            sigma[[j, i]] = v;
        }
    }

    MarketModel::from_named_moments(mu, sigma, returns.asset_names().to_vec())
}

/// Invert a symmetric positive-definite matrix via Cholesky and verify the
/// residual `max|A A^-1 - I| <= 1e-8`.
pub fn invert_covariance(sigma: &Array2<f64>) -> Result<Array2<f64>> {
    if sigma.nrows() != sigma.ncols() {
        return Err(Error::InvalidInput(format!(
            "matrix is {:?}, expected square",
            sigma.dim()
        )));
    }
    let asym = max_relative_asymmetry(sigma);
    if asym > SYMMETRY_RTOL {
        return Err(Error::InvalidInput(format!(
            "matrix asymmetry {asym:.3e} exceeds {SYMMETRY_RTOL:.0e}"
        )));
    }
    let inv = Cholesky::new(sigma)?.inverse();
    let residual = identity_residual(sigma, &inv);
    if residual > INVERSE_RESIDUAL_TOL {
        return Err(Error::InvalidInput(format!(
            "inverse residual {residual:.3e} exceeds {INVERSE_RESIDUAL_TOL:.0e}"
        )));
    }
    Ok(inv)
}

/// Mean, standard deviation (divisor `T - 1`), minimum and maximum per asset.
pub fn descriptive_stats(returns: &ReturnMatrix) -> Vec<AssetStats> {
    let t = returns.n_periods();
    let values = returns.values();
    returns
        .asset_names()
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let col = values.column(j);
            let mean = col.sum() / t as f64;
            let risk = if t > 1 {
                (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (t - 1) as f64).sqrt()
            } else {
                0.0
            };
            let min = col.iter().copied().fold(f64::INFINITY, f64::min);
            let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            AssetStats {
                name: name.clone(),
                mean,
                risk,
                min,
                max,
            }
        })
        .collect()
}
