//! Dense symmetric positive-definite factorization.
//!
//! Markets here are small (tens of assets), so a plain Cholesky with
//! explicit pivots is both fast enough and gives exact control over the
//! positive-definiteness decision.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Relative pivot tolerance: a pivot at or below this fraction of the largest
/// diagonal entry fails the factorization.
pub(crate) const PIVOT_RTOL: f64 = 1e-12;

/// Lower-triangular Cholesky factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub(crate) struct Cholesky {
    l: Array2<f64>,
}

impl Cholesky {
    /// Factor a symmetric matrix, rejecting it when any pivot falls at or
    /// below `PIVOT_RTOL` times the largest diagonal entry.
    pub(crate) fn new(a: &Array2<f64>) -> Result<Self> {
        let n = a.nrows();
        debug_assert_eq!(n, a.ncols());
        let max_diag = (0..n).map(|i| a[[i, i]]).fold(f64::NEG_INFINITY, f64::max);
        let threshold = PIVOT_RTOL * max_diag.max(0.0);

        let mut l = Array2::<f64>::zeros((n, n));
        for j in 0..n {
            let mut pivot = a[[j, j]];
            for k in 0..j {
                pivot -= l[[j, k]] * l[[j, k]];
            }
            if pivot <= threshold {
                return Err(Error::NotPositiveDefinite { index: j, pivot });
            }
            let ljj = pivot.sqrt();
            l[[j, j]] = ljj;
            for i in j + 1..n {
                let mut s = a[[i, j]];
                for k in 0..j {
                    s -= l[[i, k]] * l[[j, k]];
                }
                l[[i, j]] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub(crate) fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Solve `A x = b` by forward then backward substitution.
    pub(crate) fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = self.dim();
        debug_assert_eq!(b.len(), n);
        let mut x = b.clone();
        // L y = b
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.l[[i, k]] * x[k];
            }
            x[i] = s / self.l[[i, i]];
        }
        // L^T x = y
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[[k, i]] * x[k];
            }
            x[i] = s / self.l[[i, i]];
        }
        x
    }

    /// Dense inverse, column by column, symmetrized to kill rounding skew.
    pub(crate) fn inverse(&self) -> Array2<f64> {
        let n = self.dim();
        let mut inv = Array2::<f64>::zeros((n, n));
        let mut e = Array1::<f64>::zeros(n);
        for j in 0..n {
            e.fill(0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            inv.column_mut(j).assign(&col);
        }
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (inv[[i, j]] + inv[[j, i]]);
                inv[[i, j]] = v;
                inv[[j, i]] = v;
            }
        }
        inv
    }
}

/// Max-norm of `A B - I`.
pub(crate) fn identity_residual(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let prod = a.dot(b);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[[i, j]] - target).abs());
        }
    }
    worst
}

/// Largest relative asymmetry `|A_ij - A_ji|` scaled by the largest entry.
pub(crate) fn max_relative_asymmetry(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn factor_and_solve_diagonal() {
        let a = array![[2.0, 0.0], [0.0, 4.0]];
        let chol = Cholesky::new(&a).unwrap();
        let x = chol.solve(&array![1.0, 1.0]);
        assert!((x[0] - 0.5).abs() < 1e-15);
        assert!((x[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn inverse_of_identity() {
        let a = Array2::<f64>::eye(3);
        let inv = Cholesky::new(&a).unwrap().inverse();
        assert!(identity_residual(&a, &inv) < 1e-15);
    }

    #[test]
    fn rejects_singular() {
        let a = array![[1.0, 1.0], [1.0, 1.0]];
        match Cholesky::new(&a) {
            Err(Error::NotPositiveDefinite { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_diagonal() {
        let a = array![[-1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(
            Cholesky::new(&a),
            Err(Error::NotPositiveDefinite { index: 0, .. })
        ));
    }
}
