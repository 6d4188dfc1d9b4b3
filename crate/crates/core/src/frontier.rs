//! Closed-form efficient-frontier portfolios and frontier geometry.
//!
//! All formulas are driven by the three scalars `a`, `b`, `c` of the
//! [`MarketModel`]: the GMV portfolio sits at the hyperbola apex `(1/sqrt(b),
//! c/b)`, the tangent portfolio maximizes return per unit risk from the
//! origin, and the maximum-Sharpe portfolio at rate `rf` is the tangency
//! point of the line from `(0, rf)`.

use ndarray::Array1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::market::MarketModel;

/// Tag describing how a portfolio was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PortfolioLabel {
    Gmv,
    Tangent,
    Msr,
    Mcesr,
    Custom(String),
}

impl std::fmt::Display for PortfolioLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PortfolioLabel::Gmv => write!(f, "GMV"),
            PortfolioLabel::Tangent => write!(f, "TP"),
            PortfolioLabel::Msr => write!(f, "MSR"),
            PortfolioLabel::Mcesr => write!(f, "MCESR"),
            PortfolioLabel::Custom(s) => write!(f, "{s}"),
        }
    }
}

/// A fully invested portfolio with its derived statistics.
#[derive(Debug, Clone)]
pub struct Portfolio {
    weights: Array1<f64>,
    expected_return: f64,
    risk: f64,
    rf_used: Option<f64>,
    label: PortfolioLabel,
}

impl Portfolio {
    /// Attach model-implied return and risk to a weight vector.
    pub fn from_weights(
        weights: Array1<f64>,
        model: &MarketModel,
        rf_used: Option<f64>,
        label: PortfolioLabel,
    ) -> Self {
        debug_assert!(
            (weights.sum() - 1.0).abs() <= 1e-10,
            "weights sum to {}",
            weights.sum()
        );
        let expected_return = weights.dot(model.mu());
        let variance = weights.dot(&model.sigma().dot(&weights));
        Self {
            weights,
            expected_return,
            risk: variance.max(0.0).sqrt(),
            rf_used,
            label,
        }
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.weights
    }

    pub fn expected_return(&self) -> f64 {
        self.expected_return
    }

    pub fn risk(&self) -> f64 {
        self.risk
    }

    pub fn rf_used(&self) -> Option<f64> {
        self.rf_used
    }

    pub fn label(&self) -> &PortfolioLabel {
        &self.label
    }

    pub fn with_label(mut self, label: PortfolioLabel) -> Self {
        self.label = label;
        self
    }
}

/// A line in (risk, return) space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierLine {
    pub intercept: f64,
    pub slope: f64,
}

/// The three slopes tied by the Pythagorean identity
/// `m_tp^2 = m_ah^2 + m_gmv^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slopes {
    /// Slope of the line from the origin to the tangent portfolio, `sqrt(a)`.
    pub m_tp: f64,
    /// Slope of the upper asymptote, `sqrt((ab - c^2)/b)`.
    pub m_ah: f64,
    /// Slope of the line from the origin to the GMV portfolio, `c/sqrt(b)`.
    pub m_gmv: f64,
}

/// Relative margin a risk-free rate must keep below the GMV return.
pub(crate) fn rate_epsilon(model: &MarketModel) -> f64 {
    1e-9 * model.r_gmv().abs().max(1.0)
}

/// A rate is admissible when the tangency denominator `c - b*rf` stays
/// positive: `rf < r_gmv - eps`.
pub(crate) fn check_rate(model: &MarketModel, rf: f64) -> Result<()> {
    let r_gmv = model.r_gmv();
    if !rf.is_finite() || rf >= r_gmv - rate_epsilon(model) {
        return Err(Error::RateTooHigh { rf, r_gmv });
    }
    Ok(())
}

/// Global minimum variance portfolio: `w = inv(Sigma) 1 / b`.
pub fn gmv_portfolio(model: &MarketModel) -> Portfolio {
    let weights = model.inv_one() / model.b();
    Portfolio::from_weights(weights, model, None, PortfolioLabel::Gmv)
}

/// Tangent portfolio `w = inv(Sigma) mu / c`, the maximum-Sharpe portfolio at
/// rate zero. Requires `c > 0` for the tangency from the origin to land on
/// the efficient branch.
pub fn tangent_portfolio(model: &MarketModel) -> Result<Portfolio> {
    if model.c() <= 0.0 {
        return Err(Error::NonPositiveGmvReturn { c: model.c() });
    }
    let weights = model.inv_mu() / model.c();
    Ok(Portfolio::from_weights(
        weights,
        model,
        Some(0.0),
        PortfolioLabel::Tangent,
    ))
}

/// Maximum Sharpe ratio portfolio at rate `rf`:
/// `w = inv(Sigma)(mu - rf*1) / (c - b*rf)`.
pub fn msr_portfolio(model: &MarketModel, rf: f64) -> Result<Portfolio> {
    check_rate(model, rf)?;
    let denom = model.c() - model.b() * rf;
    let weights = (model.inv_mu() - &(model.inv_one() * rf)) / denom;
    Ok(Portfolio::from_weights(
        weights,
        model,
        Some(rf),
        PortfolioLabel::Msr,
    ))
}

/// Minimum attainable risk at expected return `rho`:
/// `sigma^2(rho) = (b*rho^2 - 2c*rho + a) / (ab - c^2)`.
pub fn frontier_risk_at_return(model: &MarketModel, rho: f64) -> f64 {
    let (a, b, c) = (model.a(), model.b(), model.c());
    let var = (b * rho * rho - 2.0 * c * rho + a) / (a * b - c * c);
    var.max(0.0).sqrt()
}

/// The two asymptotes `r = c/b +- sqrt((ab - c^2)/b) * sigma`, upper first.
pub fn asymptotes(model: &MarketModel) -> (FrontierLine, FrontierLine) {
    let intercept = model.r_gmv();
    let slope = ((model.a() * model.b() - model.c() * model.c()) / model.b()).sqrt();
    (
        FrontierLine { intercept, slope },
        FrontierLine {
            intercept,
            slope: -slope,
        },
    )
}

/// Capital market line at rate `rf`: intercept `rf`, slope
/// `(r_M - rf) / sigma_M` with `M` the MSR portfolio.
pub fn cml(model: &MarketModel, rf: f64) -> Result<FrontierLine> {
    let m = msr_portfolio(model, rf)?;
    Ok(FrontierLine {
        intercept: rf,
        slope: (m.expected_return() - rf) / m.risk(),
    })
}

/// The tangent, asymptote and GMV slopes. Requires `c > 0`.
pub fn slopes(model: &MarketModel) -> Result<Slopes> {
    if model.c() <= 0.0 {
        return Err(Error::NonPositiveGmvReturn { c: model.c() });
    }
    let (a, b, c) = (model.a(), model.b(), model.c());
    Ok(Slopes {
        m_tp: a.sqrt(),
        m_ah: ((a * b - c * c) / b).sqrt(),
        m_gmv: c / b.sqrt(),
    })
}

/// Excess return per unit risk, `(r - rf) / sigma`.
pub fn sharpe_ratio(p: &Portfolio, rf: f64) -> Result<f64> {
    if p.risk() <= 1e-14 {
        return Err(Error::ZeroRisk { risk: p.risk() });
    }
    Ok((p.expected_return() - rf) / p.risk())
}
