//! Cross-efficiency scoring of tangent portfolios over an interval of
//! risk-free rates, and the closed-form rate that maximizes it.
//!
//! Every maximum-Sharpe portfolio is self-efficient under its own DEA
//! weights; judged under the weights of the portfolio tuned to another rate
//! its score drops below one. Averaging those peer scores over a rate
//! interval `[r1, r2]` gives the cross-efficiency `CE(r)`, and the maximizer
//! has the closed form
//!
//! ```text
//! r* = r_gmv + sigma_gmv * (S(r2) - S(r1)) / ln((S(r2) - G(r2)) / (S(r1) - G(r1)))
//! ```
//!
//! with `S(r) = sqrt(a - 2c r + b r^2)` the maximum Sharpe ratio attainable
//! at rate `r` and `G(r) = (r_gmv - r)/sigma_gmv`. The same `r*` equals the
//! ratio `I2/I1` of the averaged integrals below; both routes are kept and
//! checked against each other in the tests.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::frontier::{check_rate, msr_portfolio, rate_epsilon, Portfolio, PortfolioLabel};
use crate::market::MarketModel;

/// Intervals narrower than this are treated as a single rate.
pub const DEGENERATE_WIDTH: f64 = 1e-14;
/// Node count of the composite-Simpson cross-check (an even interval count).
pub const SIMPSON_NODES: usize = 201;

/// A closed interval of candidate risk-free rates, `0 <= r1 <= r2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateInterval {
    r1: f64,
    r2: f64,
}

impl RateInterval {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if !r1.is_finite() || !r2.is_finite() || r1 < 0.0 || r2 < r1 {
            return Err(Error::InvalidInput(format!(
                "invalid rate interval [{r1}, {r2}]: need 0 <= r1 <= r2"
            )));
        }
        Ok(Self { r1, r2 })
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn width(&self) -> f64 {
        self.r2 - self.r1
    }

    pub fn is_degenerate(&self) -> bool {
        self.width() < DEGENERATE_WIDTH
    }
}

/// Optimal weights of the efficiency model for one tangent portfolio: the
/// coefficients of the hyperplane tangent to the frontier at that portfolio.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeaWeights {
    pub u: f64,
    pub v: f64,
    pub u0: f64,
}

impl DeaWeights {
    /// Efficiency of a `(risk, ret)` point under these weights,
    /// `u (ret - u0) / (v risk)`.
    pub fn efficiency(&self, risk: f64, ret: f64) -> f64 {
        self.u * (ret - self.u0) / (self.v * risk)
    }
}

/// How the scores of a [`CrossEffReport`] were computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CeMethod {
    /// Closed-form antiderivatives; best rate from the stationarity formula.
    Analytic,
    /// Composite-Simpson scores; best rate by grid argmax.
    Quadrature,
    /// Closed-form scores; best rate by grid argmax.
    Grid,
}

/// Cross-efficiency scores over a rate grid and the maximizing portfolio.
#[derive(Debug, Clone)]
pub struct CrossEffReport {
    pub rates: Vec<f64>,
    pub scores: Vec<f64>,
    pub best_rate: f64,
    pub best_portfolio: Portfolio,
    pub method: CeMethod,
}

/// Maximum Sharpe ratio attainable at rate `r`:
/// `S(r) = (r_msr - r)/sigma_msr = sqrt(a - 2c r + b r^2)`.
///
/// Unlike the portfolio quotient this form stays finite at `r = r_gmv`, which
/// is what makes the closed forms evaluable at the hyperbola apex.
pub(crate) fn msr_excess_slope(model: &MarketModel, r: f64) -> f64 {
    let q = model.a() - 2.0 * model.c() * r + model.b() * r * r;
    debug_assert!(q > 0.0, "a - 2cr + br^2 = {q} must be positive");
    q.sqrt()
}

/// Excess slope of the GMV portfolio, `G(r) = (r_gmv - r)/sigma_gmv`.
fn gmv_excess_slope(model: &MarketModel, r: f64) -> f64 {
    (model.c() - model.b() * r) / model.b().sqrt()
}

/// The interval may touch the GMV return but not exceed it.
fn check_interval(model: &MarketModel, interval: &RateInterval) -> Result<()> {
    let r_gmv = model.r_gmv();
    if interval.r2() > r_gmv + rate_epsilon(model) {
        return Err(Error::RateTooHigh {
            rf: interval.r2(),
            r_gmv,
        });
    }
    Ok(())
}

/// Closed-form optimum of the efficiency model for the MSR portfolio at
/// `rf`: `u = 1/(r_msr - rf)`, `v = 1/sigma_msr`, `u0 = rf`. No optimization
/// runs; the tangent hyperplane is the exact solution.
pub fn dea_weights(model: &MarketModel, rf: f64) -> Result<DeaWeights> {
    let p = msr_portfolio(model, rf)?;
    Ok(DeaWeights {
        u: 1.0 / (p.expected_return() - rf),
        v: 1.0 / p.risk(),
        u0: rf,
    })
}

/// Cross-efficiency of the tangent portfolio tuned to `rf_i`, judged with the
/// weights of the one tuned to `rf_j`:
/// `Ef_i(rf_j) = [(r_i - rf_j)/sigma_i] / [(r_j - rf_j)/sigma_j]`.
pub fn cross_efficiency_pair(model: &MarketModel, rf_i: f64, rf_j: f64) -> Result<f64> {
    let pi = msr_portfolio(model, rf_i)?;
    let pj = msr_portfolio(model, rf_j)?;
    let num = (pi.expected_return() - rf_j) / pi.risk();
    let den = (pj.expected_return() - rf_j) / pj.risk();
    Ok(num / den)
}

/// Averaged integrals over the interval:
/// `I1 = avg of 1/S(rf)` and `I2 = avg of rf/S(rf)`, via the logarithmic
/// antiderivatives
///
/// ```text
/// F1(r) = (1/sqrt(b)) ln(sqrt(b) S(r) + b r - c)
/// F2(r) = (c/b^1.5)   ln(sqrt(b) S(r) + b r - c) + S(r)/b
/// ```
pub fn integrals_i1_i2(model: &MarketModel, interval: &RateInterval) -> Result<(f64, f64)> {
    if interval.is_degenerate() {
        return Err(Error::DegenerateInterval {
            r1: interval.r1(),
            r2: interval.r2(),
        });
    }
    let b = model.b();
    let sqrt_b = b.sqrt();
    let log_term = |r: f64| (sqrt_b * msr_excess_slope(model, r) + b * r - model.c()).ln();
    let width = interval.width();
    let dlog = log_term(interval.r2()) - log_term(interval.r1());
    let ds = msr_excess_slope(model, interval.r2()) - msr_excess_slope(model, interval.r1());
    let i1 = dlog / (sqrt_b * width);
    let i2 = (model.c() * dlog / (b * sqrt_b) + ds / b) / width;
    Ok((i1, i2))
}

/// Average cross-efficiency of the tangent portfolio tuned to `rf_i` over the
/// interval: `CE_i = (r_i/sigma_i) I1 - (1/sigma_i) I2`, evaluated through
/// the identities `r_i/sigma_i = (a - c r_i)/S(r_i)` and
/// `1/sigma_i = (c - b r_i)/S(r_i)`.
///
/// A degenerate interval collapses to the single-point evaluation
/// `Ef_i(r1)`.
pub fn average_cross_efficiency(
    model: &MarketModel,
    rf_i: f64,
    interval: &RateInterval,
) -> Result<f64> {
    check_interval(model, interval)?;
    if interval.is_degenerate() {
        return cross_efficiency_pair(model, rf_i, interval.r1());
    }
    check_rate(model, rf_i)?;
    let (i1, i2) = integrals_i1_i2(model, interval)?;
    Ok(ce_from_integrals(model, rf_i, i1, i2))
}

/// `CE` at rate `r` given precomputed averaged integrals.
fn ce_from_integrals(model: &MarketModel, r: f64, i1: f64, i2: f64) -> f64 {
    let (a, b, c) = (model.a(), model.b(), model.c());
    ((a - c * r) * i1 - (c - b * r) * i2) / msr_excess_slope(model, r)
}

/// The same average computed by 201-node composite Simpson instead of the
/// antiderivatives. Exists to cross-check the closed forms.
pub fn average_cross_efficiency_quadrature(
    model: &MarketModel,
    rf_i: f64,
    interval: &RateInterval,
) -> Result<f64> {
    check_interval(model, interval)?;
    if interval.is_degenerate() {
        return cross_efficiency_pair(model, rf_i, interval.r1());
    }
    let p = msr_portfolio(model, rf_i)?;
    let excess = |rf: f64| (p.expected_return() - rf) / p.risk();
    let integrand = |rf: f64| excess(rf) / msr_excess_slope(model, rf);

    let intervals = SIMPSON_NODES - 1;
    debug_assert_eq!(intervals % 2, 0);
    let h = interval.width() / intervals as f64;
    let mut acc = integrand(interval.r1()) + integrand(interval.r2());
    for k in 1..intervals {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(interval.r1() + h * k as f64);
    }
    Ok(acc * h / 3.0 / interval.width())
}

/// The rate whose tangent portfolio maximizes average cross-efficiency over
/// the interval. Strictly interior (`r1 < r* < r2`) for non-degenerate
/// intervals; equals `I2/I1`.
pub fn mcesr_rate(model: &MarketModel, interval: &RateInterval) -> Result<f64> {
    check_interval(model, interval)?;
    if interval.is_degenerate() {
        return Ok(interval.r1());
    }
    let s1 = msr_excess_slope(model, interval.r1());
    let s2 = msr_excess_slope(model, interval.r2());
    let g1 = gmv_excess_slope(model, interval.r1());
    let g2 = gmv_excess_slope(model, interval.r2());
    let log_ratio = ((s2 - g2) / (s1 - g1)).ln();
    let r = model.r_gmv() + model.sigma_gmv() * (s2 - s1) / log_ratio;
    debug_assert!(interval.r1() < r && r < interval.r2());
    Ok(r)
}

/// Closed form for the interval `[0, r_gmv]`, written purely in the return
/// ratio `rho = r_tp / r_gmv = ab/c^2`:
///
/// ```text
/// r* = r_gmv (1 - (sqrt(rho) - sqrt(rho - 1)) / (ln sqrt(rho - 1) - ln(sqrt(rho) - 1)))
/// ```
pub fn mcesr_rate_full_interval(model: &MarketModel) -> Result<f64> {
    let c = model.c();
    if c <= 0.0 {
        return Err(Error::NonPositiveGmvReturn { c });
    }
    let rho = model.a() * model.b() / (c * c);
    if rho <= 1.0 + 1e-12 {
        // cannot occur for a valid model with c > 0: ab - c^2 > 0 forces rho > 1
        return Err(Error::RatioTooSmall { ratio: rho });
    }
    let num = rho.sqrt() - (rho - 1.0).sqrt();
    let den = (rho - 1.0).sqrt().ln() - (rho.sqrt() - 1.0).ln();
    Ok(model.r_gmv() * (1.0 - num / den))
}

/// The tangent portfolio at the cross-efficiency-maximizing rate.
pub fn mcesr_portfolio(model: &MarketModel, interval: &RateInterval) -> Result<Portfolio> {
    let rate = mcesr_rate(model, interval)?;
    Ok(msr_portfolio(model, rate)?.with_label(PortfolioLabel::Mcesr))
}

/// First derivative of `CE` at `r`:
/// `CE'(r) = [(c^2 - ab) r I1 + (ab - c^2) I2] / S(r)^3`.
///
/// Positive below `I2/I1`, zero there, negative above.
pub fn ce_derivative(model: &MarketModel, r: f64, interval: &RateInterval) -> Result<f64> {
    check_rate(model, r)?;
    let (i1, i2) = integrals_i1_i2(model, interval)?;
    let disc = model.a() * model.b() - model.c() * model.c();
    let s = msr_excess_slope(model, r);
    Ok(disc * (i2 - r * i1) / (s * s * s))
}

/// Closed-form `CE` scores for a batch of rates sharing one interval.
/// Evaluated through the identities `r/sigma = (a - c r)/S(r)` and
/// `1/sigma = (c - b r)/S(r)`, so a rate equal to `r_gmv` is fine.
/// Runs in parallel under the `parallel` feature.
pub fn ce_scores_grid(
    model: &MarketModel,
    interval: &RateInterval,
    rates: &[f64],
) -> Result<Vec<f64>> {
    check_interval(model, interval)?;
    let (i1, i2) = integrals_i1_i2(model, interval)?;
    Ok(map_indexed(rates.len(), |k| {
        ce_from_integrals(model, rates[k], i1, i2)
    }))
}

/// Evenly spaced rates over the interval, endpoints included.
pub fn rate_grid(interval: &RateInterval, points: usize) -> Vec<f64> {
    debug_assert!(points >= 2);
    let step = interval.width() / (points - 1) as f64;
    (0..points)
        .map(|k| {
            if k + 1 == points {
                interval.r2()
            } else {
                interval.r1() + step * k as f64
            }
        })
        .collect()
}

/// Score a rate grid and locate the best portfolio.
pub fn ce_report(
    model: &MarketModel,
    interval: &RateInterval,
    points: usize,
    method: CeMethod,
) -> Result<CrossEffReport> {
    if points < 2 {
        return Err(Error::InvalidInput("a report needs at least 2 grid points".into()));
    }
    if interval.is_degenerate() {
        return Err(Error::DegenerateInterval {
            r1: interval.r1(),
            r2: interval.r2(),
        });
    }
    check_interval(model, interval)?;
    let rates = rate_grid(interval, points);
    let scores = match method {
        CeMethod::Analytic | CeMethod::Grid => ce_scores_grid(model, interval, &rates)?,
        CeMethod::Quadrature => {
            let results = map_indexed(rates.len(), |k| {
                average_cross_efficiency_quadrature(model, rates[k], interval)
            });
            // a grid endpoint at r_gmv cannot host a tangent portfolio; score
            // it with the closed form, which remains finite there
            let analytic = ce_scores_grid(model, interval, &rates)?;
            results
                .into_iter()
                .zip(analytic)
                .map(|(r, fallback)| r.unwrap_or(fallback))
                .collect()
        }
    };
    let mut best_index = 0;
    for (k, &s) in scores.iter().enumerate() {
        if s > scores[best_index] {
            best_index = k;
        }
    }
    let best_rate = match method {
        CeMethod::Analytic => mcesr_rate(model, interval)?,
        CeMethod::Quadrature | CeMethod::Grid => rates[best_index],
    };
    let best_portfolio = msr_portfolio(model, best_rate)?.with_label(PortfolioLabel::Mcesr);
    Ok(CrossEffReport {
        rates,
        scores,
        best_rate,
        best_portfolio,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::{array, Array2};

    fn identity_model(mu: ndarray::Array1<f64>) -> MarketModel {
        let n = mu.len();
        MarketModel::from_moments(mu, Array2::<f64>::eye(n)).unwrap()
    }

    #[test]
    fn dea_weights_at_zero_rate() {
        let model = identity_model(array![0.2, 0.1]);
        let w = dea_weights(&model, 0.0).unwrap();
        let tp = msr_portfolio(&model, 0.0).unwrap();
        assert_relative_eq!(w.u, 1.0 / tp.expected_return(), max_relative = 1e-14);
        assert_relative_eq!(w.v, 1.0 / tp.risk(), max_relative = 1e-14);
        assert_eq!(w.u0, 0.0);
        let self_eff = w.efficiency(tp.risk(), tp.expected_return());
        assert!((self_eff - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn self_evaluation_is_one() {
        let model = identity_model(array![0.2, 0.1]);
        assert_eq!(cross_efficiency_pair(&model, 0.05, 0.05).unwrap(), 1.0);
    }

    #[test]
    fn pair_hand_example() {
        // Sigma = I, mu = (0.2, 0.1): Ef_{0.05}(0) = (0.175/sqrt(0.625)) / sqrt(0.05)
        let model = identity_model(array![0.2, 0.1]);
        let ef = cross_efficiency_pair(&model, 0.05, 0.0).unwrap();
        let expected = (0.175 / 0.625f64.sqrt()) / 0.05f64.sqrt();
        assert_relative_eq!(ef, expected, max_relative = 1e-14);
        assert!(ef > 0.0 && ef < 1.0);
    }

    #[test]
    fn integrals_hand_case() {
        // a = 1, b = 1, c = 0 over [0, 1]:
        // I1 = integral of 1/sqrt(1 + r^2) = ln(1 + sqrt(2))
        // I2 = integral of r/sqrt(1 + r^2) = sqrt(2) - 1
        let model = MarketModel::from_moments(
            array![1.0, -1.0],
            Array2::<f64>::eye(2) * 2.0,
        )
        .unwrap();
        assert_relative_eq!(model.a(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(model.b(), 1.0, epsilon = 1e-15);
        assert!(model.c().abs() < 1e-15);
        let interval = RateInterval::new(0.0, 1.0).unwrap();
        let (i1, i2) = integrals_i1_i2(&model, &interval).unwrap();
        assert_relative_eq!(i1, (1.0 + 2f64.sqrt()).ln(), max_relative = 1e-12);
        assert_relative_eq!(i2, 2f64.sqrt() - 1.0, max_relative = 1e-12);
    }

    #[test]
    fn degenerate_interval_collapses_to_pair() {
        let model = identity_model(array![0.2, 0.1]);
        let interval = RateInterval::new(0.05, 0.05).unwrap();
        let ce = average_cross_efficiency(&model, 0.02, &interval).unwrap();
        let ef = cross_efficiency_pair(&model, 0.02, 0.05).unwrap();
        assert_eq!(ce, ef);
        assert_eq!(mcesr_rate(&model, &interval).unwrap(), 0.05);
        assert!(matches!(
            integrals_i1_i2(&model, &interval),
            Err(Error::DegenerateInterval { .. })
        ));
    }

    #[test]
    fn interval_above_gmv_return_is_rejected() {
        let model = identity_model(array![0.2, 0.1]); // r_gmv = 0.15
        let interval = RateInterval::new(0.0, 0.2).unwrap();
        assert!(matches!(
            mcesr_rate(&model, &interval),
            Err(Error::RateTooHigh { .. })
        ));
    }

    #[test]
    fn mcesr_rate_is_interior_and_stationary() {
        let model = identity_model(array![0.2, 0.1]);
        let interval = RateInterval::new(0.0, 0.12).unwrap();
        let r = mcesr_rate(&model, &interval).unwrap();
        assert!(0.0 < r && r < 0.12);
        let (i1, i2) = integrals_i1_i2(&model, &interval).unwrap();
        assert_relative_eq!(r, i2 / i1, max_relative = 1e-12);
        let d = ce_derivative(&model, r, &interval).unwrap();
        assert!(d.abs() <= 1e-9, "CE'(r*) = {d}");
    }

    #[test]
    fn full_interval_matches_generic_rate() {
        let model = identity_model(array![0.2, 0.1]);
        let full = RateInterval::new(0.0, model.r_gmv()).unwrap();
        let from_eq22 = mcesr_rate_full_interval(&model).unwrap();
        let from_eq19 = mcesr_rate(&model, &full).unwrap();
        assert_relative_eq!(from_eq22, from_eq19, max_relative = 1e-10);
    }

    #[test]
    fn full_interval_requires_positive_c() {
        let model = identity_model(array![0.1, -0.3]);
        assert!(matches!(
            mcesr_rate_full_interval(&model),
            Err(Error::NonPositiveGmvReturn { .. })
        ));
    }

    #[test]
    fn extreme_return_ratio_stays_interior() {
        // rho = ab/c^2 = 2(1 + (1-t)^2)/t^2 with t = 0.002 is about 1e6
        let t = 0.002;
        let model = identity_model(array![1.0, -1.0 + t]);
        let rho = model.a() * model.b() / (model.c() * model.c());
        assert!(rho > 5e5);
        let r = mcesr_rate_full_interval(&model).unwrap();
        assert!(r > 0.0 && r < model.r_gmv());
    }

    #[test]
    fn mcesr_portfolio_sits_on_frontier() {
        use crate::frontier::frontier_risk_at_return;
        let model = identity_model(array![0.2, 0.1]);
        let interval = RateInterval::new(0.0, 0.12).unwrap();
        let p = mcesr_portfolio(&model, &interval).unwrap();
        assert!((p.weights().sum() - 1.0).abs() <= 1e-10);
        assert_relative_eq!(
            frontier_risk_at_return(&model, p.expected_return()),
            p.risk(),
            max_relative = 1e-10
        );
        assert_eq!(*p.label(), PortfolioLabel::Mcesr);
        assert_eq!(p.rf_used(), Some(mcesr_rate(&model, &interval).unwrap()));
    }

    #[test]
    fn grid_scores_match_average_cross_efficiency() {
        let model = identity_model(array![0.2, 0.1]);
        let interval = RateInterval::new(0.01, 0.13).unwrap();
        let rates = rate_grid(&interval, 7);
        let scores = ce_scores_grid(&model, &interval, &rates).unwrap();
        for (&r, &s) in rates.iter().zip(&scores) {
            let direct = average_cross_efficiency(&model, r, &interval).unwrap();
            assert_relative_eq!(s, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn report_scores_bounded_and_best_attains_max() {
        let model = identity_model(array![0.2, 0.1]);
        let interval = RateInterval::new(0.0, model.r_gmv()).unwrap();
        for method in [CeMethod::Analytic, CeMethod::Quadrature, CeMethod::Grid] {
            let report = ce_report(&model, &interval, 101, method).unwrap();
            assert_eq!(report.rates.len(), 101);
            for &s in &report.scores {
                assert!(s > 0.0 && s <= 1.0 + 1e-9, "score {s} out of range");
            }
            let max = report.scores.iter().cloned().fold(f64::MIN, f64::max);
            let at_best = average_cross_efficiency(&model, report.best_rate, &interval).unwrap();
            assert!(at_best >= max - 1e-9);
        }
    }

    #[test]
    fn identity_form_matches_portfolio_quotient() {
        // CE through (a - c r)/S and (c - b r)/S must equal the direct
        // (r_i/sigma_i) I1 - (1/sigma_i) I2 with the portfolio's statistics.
        let model = identity_model(array![0.2, 0.1]);
        let interval = RateInterval::new(0.0, 0.12).unwrap();
        let (i1, i2) = integrals_i1_i2(&model, &interval).unwrap();
        for &r in &[0.0, 0.03, 0.07, 0.11] {
            let p = msr_portfolio(&model, r).unwrap();
            let quotient = (p.expected_return() * i1 - i2) / p.risk();
            let identity = average_cross_efficiency(&model, r, &interval).unwrap();
            assert_relative_eq!(identity, quotient, max_relative = 1e-12);
        }
    }

    #[test]
    fn quadrature_agrees_with_closed_form() {
        let model = identity_model(array![0.2, 0.1]);
        let interval = RateInterval::new(0.0, 0.12).unwrap();
        let a = average_cross_efficiency(&model, 0.05, &interval).unwrap();
        let q = average_cross_efficiency_quadrature(&model, 0.05, &interval).unwrap();
        assert!((a - q).abs() <= 1e-8, "closed {a} vs quadrature {q}");
    }
}
