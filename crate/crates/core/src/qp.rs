//! Maximum-Sharpe selection without short sales.
//!
//! The ratio problem `max w'(mu - rf) / sqrt(w' Sigma w)` over the simplex
//! lifts to the convex program
//!
//! ```text
//! min x' Sigma x   s.t.  x'(mu - rf) = 1,  x >= 0
//! ```
//!
//! whose solution maps back through `w = x / (x' 1)`. The solver is a primal
//! active set over the nonnegativity bounds, with the single equality
//! constraint eliminated directly inside each subproblem: on the free set `F`
//! the optimum is `x_F = inv(Sigma_FF) d_F / (d_F' inv(Sigma_FF) d_F)`, which
//! keeps every iterate feasible and the objective non-increasing.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::frontier::{Portfolio, PortfolioLabel};
use crate::linalg::Cholesky;
use crate::market::MarketModel;
use crate::RateInterval;

/// Multiplier tolerance for releasing a bound.
const RELEASE_RTOL: f64 = 1e-10;
/// Own-rate optimality slack allowed in [`discrete_cross_efficiency`].
const PAIRING_TOL: f64 = 1e-8;

/// KKT-certified solution of the lifted problem.
#[derive(Debug, Clone)]
pub struct QpSolution {
    /// Lifted variable, componentwise nonnegative with `x' d = 1`.
    pub x: Array1<f64>,
    /// Indices pinned at zero.
    pub active_set: Vec<usize>,
    /// Number of active-set changes performed.
    pub iterations: usize,
    /// Final objective `x' Sigma x`.
    pub objective: f64,
}

/// No-short maximum-Sharpe grid: one portfolio per rate, scored by the
/// discrete cross-efficiency mean.
#[derive(Debug, Clone)]
pub struct GridResult {
    pub rates: Vec<f64>,
    pub portfolios: Vec<Portfolio>,
    pub ce_scores: Vec<f64>,
    pub best_index: usize,
}

impl GridResult {
    pub fn best(&self) -> &Portfolio {
        &self.portfolios[self.best_index]
    }

    pub fn best_rate(&self) -> f64 {
        self.rates[self.best_index]
    }
}

/// Equality-constrained subproblem on the free set: minimize `x_F' S x_F`
/// subject to `d_F' x_F = 1`. Returns the free components and the equality
/// multiplier `lambda = 2 * objective`.
fn solve_free_subproblem(
    sigma: &Array2<f64>,
    d: &Array1<f64>,
    free: &[usize],
) -> Result<(Vec<f64>, f64)> {
    let m = free.len();
    let mut sub = Array2::<f64>::zeros((m, m));
    let mut d_sub = Array1::<f64>::zeros(m);
    for (p, &i) in free.iter().enumerate() {
        d_sub[p] = d[i];
        for (q, &j) in free.iter().enumerate() {
            sub[[p, q]] = sigma[[i, j]];
        }
    }
    let y = Cholesky::new(&sub)?.solve(&d_sub);
    let denom = d_sub.dot(&y);
    debug_assert!(denom > 0.0, "d restricted to the free set vanished");
    Ok((y.iter().map(|v| v / denom).collect(), 2.0 / denom))
}

/// Solve `min x' Sigma x` subject to `x' d = 1`, `x >= 0`.
///
/// `sigma` must be positive definite and `d` must have a strictly positive
/// entry (otherwise the feasible set is empty or the Sharpe ratio cannot be
/// positive). Starts from the single-asset point `x = e_k / d_k` at
/// `k = argmax d_i`; bounds enter on the smallest blocking step and leave on
/// the smallest index with a negative multiplier, which rules out cycling.
pub fn qp_solve(sigma: &Array2<f64>, d: &Array1<f64>) -> Result<QpSolution> {
    let n = d.len();
    if sigma.dim() != (n, n) {
        return Err(Error::InvalidInput(format!(
            "sigma is {:?}, expected ({n}, {n})",
            sigma.dim()
        )));
    }
    let k = (0..n)
        .max_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite d"))
        .ok_or_else(|| Error::InvalidInput("empty problem".into()))?;
    if d[k] <= 0.0 {
        return Err(Error::Infeasible(
            "no strictly positive entry in the excess-return direction".into(),
        ));
    }

    let mut active = vec![true; n];
    active[k] = false;
    let mut x = Array1::<f64>::zeros(n);
    x[k] = 1.0 / d[k];

    let limit = 10 * n * n;
    let mut iterations = 0usize;
    #[cfg(debug_assertions)]
    let mut prev_objective = x.dot(&sigma.dot(&x));
    loop {
        let free: Vec<usize> = (0..n).filter(|&i| !active[i]).collect();
        let (x_free, lambda) = solve_free_subproblem(sigma, d, &free)?;

        let scale = x_free.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let feas_tol = 1e-13 * scale;
        if x_free.iter().all(|&v| v >= -feas_tol) {
            // Full step onto the subproblem optimum.
            x.fill(0.0);
            for (&i, &v) in free.iter().zip(&x_free) {
                x[i] = v.max(0.0);
            }
            x /= x.dot(d);

            // Release the lowest-index bound with a negative multiplier.
            let g = sigma.dot(&x) * 2.0;
            let nu_scale = 1.0f64
                .max(g.iter().fold(0.0f64, |m, v| m.max(v.abs())))
                .max(lambda.abs() * d.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            let release = (0..n)
                .filter(|&i| active[i])
                .find(|&i| g[i] - lambda * d[i] < -RELEASE_RTOL * nu_scale);
            match release {
                None => {
                    let objective = x.dot(&sigma.dot(&x));
                    let active_set = (0..n).filter(|&i| active[i]).collect();
                    return Ok(QpSolution {
                        x,
                        active_set,
                        iterations,
                        objective,
                    });
                }
                Some(j) => {
                    active[j] = false;
                }
            }
        } else {
            // Step toward the subproblem optimum until the first bound blocks.
            let mut alpha = 1.0f64;
            let mut blocking = None;
            for (&i, &v) in free.iter().zip(&x_free) {
                if v < 0.0 {
                    let step = x[i] / (x[i] - v);
                    if step < alpha {
                        alpha = step;
                        blocking = Some(i);
                    }
                }
            }
            let j = blocking.expect("a negative component implies a blocking bound");
            for (&i, &v) in free.iter().zip(&x_free) {
                x[i] = ((1.0 - alpha) * x[i] + alpha * v).max(0.0);
            }
            x[j] = 0.0;
            active[j] = true;
            x /= x.dot(d);
        }

        #[cfg(debug_assertions)]
        {
            let objective = x.dot(&sigma.dot(&x));
            debug_assert!(
                objective <= prev_objective * (1.0 + 1e-9),
                "objective rose from {prev_objective} to {objective}"
            );
            prev_objective = objective;
        }

        iterations += 1;
        if iterations > limit {
            return Err(Error::MaxIterations { limit });
        }
    }
}

/// Maximum Sharpe ratio portfolio at rate `rf` with nonnegative weights.
pub fn msr_no_short(model: &MarketModel, rf: f64) -> Result<Portfolio> {
    let d = model.mu() - rf;
    if d.iter().all(|&v| v <= 0.0) {
        return Err(Error::Infeasible(format!(
            "no asset mean exceeds the rate {rf}"
        )));
    }
    let sol = qp_solve(model.sigma(), &d)?;
    let weights = &sol.x / sol.x.sum();
    Ok(Portfolio::from_weights(
        weights,
        model,
        Some(rf),
        PortfolioLabel::Msr,
    ))
}

/// Global minimum variance portfolio with nonnegative weights. With
/// `d = 1` the lifted variable already sums to one, so `w = x`.
pub fn gmv_no_short(model: &MarketModel) -> Result<Portfolio> {
    let ones = Array1::<f64>::ones(model.n_assets());
    let sol = qp_solve(model.sigma(), &ones)?;
    let weights = &sol.x / sol.x.sum();
    Ok(Portfolio::from_weights(
        weights,
        model,
        None,
        PortfolioLabel::Gmv,
    ))
}

/// Discrete cross-efficiency: portfolio `i` scored as the mean of its Sharpe
/// ratio at every grid rate, relative to the portfolio tuned to that rate.
///
/// Each supplied portfolio must maximize its own-rate Sharpe ratio among the
/// set (up to `1e-8`); otherwise the pairing of portfolios to rates is wrong
/// and the scores would be meaningless.
pub fn discrete_cross_efficiency(portfolios: &[Portfolio], rates: &[f64]) -> Result<Vec<f64>> {
    let m = portfolios.len();
    if m == 0 || rates.len() != m {
        return Err(Error::InvalidInput(format!(
            "{m} portfolios for {} rates",
            rates.len()
        )));
    }
    // own[j] = rate-j Sharpe of portfolio j; each must top its column
    let own: Vec<f64> = (0..m)
        .map(|j| (portfolios[j].expected_return() - rates[j]) / portfolios[j].risk())
        .collect();
    let violations = map_indexed(m, |j| {
        if own[j] <= 0.0 {
            return true;
        }
        (0..m).any(|k| {
            (portfolios[k].expected_return() - rates[j]) / portfolios[k].risk()
                > own[j] + PAIRING_TOL
        })
    });
    if let Some(j) = violations.iter().position(|&bad| bad) {
        return Err(Error::InvalidPairing {
            index: j,
            rf: rates[j],
        });
    }
    Ok(map_indexed(m, |i| {
        let p = &portfolios[i];
        let mut acc = 0.0;
        for j in 0..m {
            acc += (p.expected_return() - rates[j]) / p.risk() / own[j];
        }
        acc / m as f64
    }))
}

/// Grid search for the no-short cross-efficiency maximizer: split the
/// interval into `n` equal parts, solve the lifted QP at each of the `n + 1`
/// rates, score with [`discrete_cross_efficiency`] and keep the maximizer
/// (ties break toward the smaller rate).
///
/// The per-rate solves are independent and run in parallel under the
/// `parallel` feature; scores are computed only after every solve finishes,
/// so the result does not depend on evaluation order.
pub fn mcesr_no_short(model: &MarketModel, interval: &RateInterval, n: usize) -> Result<GridResult> {
    if n < 1 {
        return Err(Error::InvalidInput("grid needs n >= 1 parts".into()));
    }
    let max_mu = model.mu().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max_mu <= interval.r2() {
        return Err(Error::Infeasible(format!(
            "no asset mean exceeds the interval upper bound {}",
            interval.r2()
        )));
    }
    let (r_min, r_max) = (interval.r1(), interval.r2());
    let rates: Vec<f64> = (1..=n + 1)
        .map(|i| r_min * (n + 1 - i) as f64 / n as f64 + r_max * (i - 1) as f64 / n as f64)
        .collect();

    let solved = map_indexed(rates.len(), |k| msr_no_short(model, rates[k]));
    let mut portfolios = Vec::with_capacity(rates.len());
    for p in solved {
        portfolios.push(p?);
    }
    let ce_scores = discrete_cross_efficiency(&portfolios, &rates)?;

    let mut best_index = 0;
    for (k, &s) in ce_scores.iter().enumerate() {
        if s > ce_scores[best_index] {
            best_index = k;
        }
    }
    portfolios[best_index] = portfolios[best_index].clone().with_label(PortfolioLabel::Mcesr);
    Ok(GridResult {
        rates,
        portfolios,
        ce_scores,
        best_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    #[test]
    fn symmetric_two_asset() {
        let sol = qp_solve(&Array2::<f64>::eye(2), &array![1.0, 1.0]).unwrap();
        assert_relative_eq!(sol.x[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(sol.x[1], 0.5, epsilon = 1e-14);
        assert_relative_eq!(sol.objective, 0.5, epsilon = 1e-14);
        assert!(sol.active_set.is_empty());
    }

    #[test]
    fn negative_excess_is_pinned() {
        let sol = qp_solve(&Array2::<f64>::eye(2), &array![1.0, -1.0]).unwrap();
        assert_relative_eq!(sol.x[0], 1.0, epsilon = 1e-14);
        assert_eq!(sol.x[1], 0.0);
        assert_eq!(sol.active_set, vec![1]);
    }

    #[test]
    fn all_nonpositive_is_infeasible() {
        assert!(matches!(
            qp_solve(&Array2::<f64>::eye(2), &array![-1.0, 0.0]),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn kkt_conditions_hold() {
        let sigma = array![[0.04, 0.01, 0.0], [0.01, 0.09, -0.02], [0.0, -0.02, 0.16]];
        let d = array![0.5, -0.2, 0.9];
        let sol = qp_solve(&sigma, &d).unwrap();
        assert!((sol.x.dot(&d) - 1.0).abs() <= 1e-10);
        assert!(sol.x.iter().all(|&v| v >= -1e-12));
        let g = sigma.dot(&sol.x) * 2.0;
        let lambda = 2.0 * sol.objective;
        for i in 0..3 {
            let nu = g[i] - lambda * d[i];
            if sol.active_set.contains(&i) {
                assert!(nu >= -1e-8, "active multiplier {nu}");
            } else {
                assert!(nu.abs() <= 1e-8, "stationarity residual {nu}");
            }
        }
    }

    #[test]
    fn matches_unconstrained_when_weights_nonnegative() {
        use crate::frontier::msr_portfolio;
        let model = MarketModel::from_moments(
            array![0.2, 0.1],
            Array2::<f64>::eye(2),
        )
        .unwrap();
        let rf = 0.05;
        let free = msr_portfolio(&model, rf).unwrap();
        assert!(free.weights().iter().all(|&w| w >= 0.0));
        let pinned = msr_no_short(&model, rf).unwrap();
        for i in 0..2 {
            assert!((free.weights()[i] - pinned.weights()[i]).abs() <= 1e-8);
        }
    }

    #[test]
    fn msr_no_short_requires_a_beatable_rate() {
        let model = MarketModel::from_moments(
            array![0.2, 0.1],
            Array2::<f64>::eye(2),
        )
        .unwrap();
        assert!(matches!(
            msr_no_short(&model, 0.3),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn gmv_no_short_weights_are_a_distribution() {
        let model = MarketModel::from_moments(
            array![0.2, 0.1, 0.05],
            array![[0.04, 0.03, 0.0], [0.03, 0.05, 0.0], [0.0, 0.0, 0.1]],
        )
        .unwrap();
        let p = gmv_no_short(&model).unwrap();
        assert!((p.weights().sum() - 1.0).abs() <= 1e-10);
        assert!(p.weights().iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn single_portfolio_scores_one() {
        let model = MarketModel::from_moments(
            array![0.2, 0.1],
            Array2::<f64>::eye(2),
        )
        .unwrap();
        let p = msr_no_short(&model, 0.02).unwrap();
        let scores = discrete_cross_efficiency(&[p], &[0.02]).unwrap();
        assert!((scores[0] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn mismatched_pairing_is_rejected() {
        let model = MarketModel::from_moments(
            array![0.2, 0.1],
            Array2::<f64>::eye(2),
        )
        .unwrap();
        let a = msr_no_short(&model, 0.0).unwrap();
        let b = msr_no_short(&model, 0.1).unwrap();
        // swapped: portfolio tuned to 0.1 presented as the 0.0 optimum
        let err = discrete_cross_efficiency(&[b, a], &[0.0, 0.1]);
        assert!(matches!(err, Err(Error::InvalidPairing { .. })));
    }

    #[test]
    fn grid_with_one_part_takes_best_endpoint() {
        let model = MarketModel::from_moments(
            array![0.2, 0.1],
            Array2::<f64>::eye(2),
        )
        .unwrap();
        let interval = RateInterval::new(0.0, 0.1).unwrap();
        let grid = mcesr_no_short(&model, &interval, 1).unwrap();
        assert_eq!(grid.rates, vec![0.0, 0.1]);
        assert_eq!(grid.ce_scores.len(), 2);
        let other = 1 - grid.best_index;
        assert!(grid.ce_scores[grid.best_index] >= grid.ce_scores[other]);
        assert!(grid.best().weights().iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn infeasible_grid_interval() {
        let model = MarketModel::from_moments(
            array![0.2, 0.1],
            Array2::<f64>::eye(2),
        )
        .unwrap();
        let interval = RateInterval::new(0.0, 0.25).unwrap();
        assert!(matches!(
            mcesr_no_short(&model, &interval, 10),
            Err(Error::Infeasible(_))
        ));
    }
}
