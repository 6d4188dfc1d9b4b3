//! Out-of-sample evaluation of fixed-weight portfolios: equity curves, value
//! changes over horizons, and the four-strategy comparison table.

use ndarray::Array1;
use serde::Serialize;

use crate::cross_efficiency::{mcesr_portfolio, RateInterval};
use crate::error::{Error, Result};
use crate::fmt::format_sig;
use crate::frontier::{gmv_portfolio, msr_portfolio, tangent_portfolio, Portfolio, PortfolioLabel};
use crate::market::{estimate_moments, ReturnMatrix};
use crate::qp::{gmv_no_short, mcesr_no_short, msr_no_short};

/// How positions evolve between periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Weights reset to the target every period: value multiplies by
    /// `1 + w'r_t`.
    Rebalanced,
    /// Positions drift: per-asset stakes compound independently and the
    /// value is their sum.
    BuyAndHold,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Rebalanced => write!(f, "rebalanced"),
            Mode::BuyAndHold => write!(f, "buyhold"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rebalanced" => Ok(Mode::Rebalanced),
            "buyhold" | "buy_and_hold" => Ok(Mode::BuyAndHold),
            other => Err(Error::InvalidInput(format!(
                "unknown mode {other:?}, expected rebalanced|buyhold"
            ))),
        }
    }
}

/// Cumulative portfolio value per period, starting from 1.0 before the first
/// period.
#[derive(Debug, Clone, Serialize)]
pub struct EquityCurve {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

impl EquityCurve {
    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("curves are never empty")
    }
}

/// One strategy's value changes across the requested horizons.
#[derive(Debug, Clone, Serialize)]
pub struct StrategyRow {
    /// GMV | TP | MSR | MCESR.
    pub strategy: String,
    /// Short-sales treatment: `short` or `no_short`.
    pub label: String,
    /// Risk-free rate behind the fit, when one applies.
    pub rf: Option<f64>,
    /// Percent value change per horizon, aligned with the report horizons.
    pub changes: Vec<f64>,
}

/// Comparison table analogous to the out-of-sample value-change tables.
#[derive(Debug, Clone, Serialize)]
pub struct StrategyReport {
    pub horizons: Vec<usize>,
    pub mode: Mode,
    pub rows: Vec<StrategyRow>,
}

impl StrategyReport {
    /// Append rows from a report with identical horizons and mode.
    pub fn merge(&mut self, other: StrategyReport) -> Result<()> {
        if other.horizons != self.horizons || other.mode != self.mode {
            return Err(Error::InvalidInput(
                "cannot merge strategy reports with different horizons or modes".into(),
            ));
        }
        self.rows.extend(other.rows);
        Ok(())
    }

    /// CSV serialization: `strategy,label,rf,horizon,mode,percent_change`.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("strategy,label,rf,horizon,mode,percent_change\n");
        for row in &self.rows {
            for (h, change) in self.horizons.iter().zip(&row.changes) {
                let rf = row.rf.map(|v| format_sig(v, digits)).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.strategy,
                    row.label,
                    rf,
                    h,
                    self.mode,
                    format_sig(*change, digits)
                ));
            }
        }
        out
    }

    /// Fixed-width table for the terminal.
    pub fn to_table(&self, digits: usize) -> String {
        let mut out = format!("{:<24}", "Portfolio");
        for h in &self.horizons {
            out.push_str(&format!("{:>14}", format!("{h} periods")));
        }
        out.push('\n');
        for row in &self.rows {
            let name = match row.rf {
                Some(rf) if row.strategy == "MSR" || row.strategy == "MCESR" => {
                    format!("{} (rf={})", row.strategy, format_sig(rf, digits))
                }
                _ => row.strategy.clone(),
            };
            let tag = if row.label == "no_short" { " [no short]" } else { "" };
            out.push_str(&format!("{:<24}", format!("{name}{tag}")));
            for change in &row.changes {
                out.push_str(&format!("{:>14}", format!("{}%", format_sig(*change, digits))));
            }
            out.push('\n');
        }
        out
    }
}

fn check_weights(weights: &Array1<f64>, returns: &ReturnMatrix) -> Result<()> {
    if weights.len() != returns.n_assets() {
        return Err(Error::InvalidInput(format!(
            "{} weights for {} assets",
            weights.len(),
            returns.n_assets()
        )));
    }
    let total = weights.sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Cumulative value of holding `weights` through every period of the panel.
pub fn equity_curve(
    weights: &Array1<f64>,
    returns: &ReturnMatrix,
    mode: Mode,
) -> Result<EquityCurve> {
    check_weights(weights, returns)?;
    let t = returns.n_periods();
    let values = match mode {
        Mode::Rebalanced => {
            let mut value = 1.0;
            let mut out = Vec::with_capacity(t);
            for row in returns.values().rows() {
                value *= 1.0 + weights.dot(&row);
                out.push(value);
            }
            out
        }
        Mode::BuyAndHold => {
            // Normalize by the initial stake so the curve starts at exactly 1.
            let stake = weights.sum();
            let mut growth: Array1<f64> = Array1::ones(returns.n_assets());
            let mut out = Vec::with_capacity(t);
            for row in returns.values().rows() {
                growth = &growth * &(&row + 1.0);
                out.push(weights.dot(&growth) / stake);
            }
            out
        }
    };
    Ok(EquityCurve {
        labels: returns.period_labels().to_vec(),
        values,
    })
}

/// Percent change in portfolio value over the first `horizon` periods.
pub fn portfolio_value_change(
    weights: &Array1<f64>,
    returns: &ReturnMatrix,
    horizon: usize,
    mode: Mode,
) -> Result<f64> {
    if horizon > returns.n_periods() {
        return Err(Error::HorizonTooLong {
            horizon,
            available: returns.n_periods(),
        });
    }
    if horizon == 0 {
        return Ok(0.0);
    }
    let curve = equity_curve(weights, returns, mode)?;
    Ok(100.0 * (curve.values[horizon - 1] - 1.0))
}

/// Fit the four strategies on the estimation sample. `grid_n` controls the
/// rate grid of the no-short cross-efficiency search.
pub fn fit_strategies(
    in_sample: &ReturnMatrix,
    interval: &RateInterval,
    msr_rate: f64,
    allow_short: bool,
    grid_n: usize,
) -> Result<Vec<Portfolio>> {
    let model = estimate_moments(in_sample)?;
    if allow_short {
        Ok(vec![
            gmv_portfolio(&model),
            tangent_portfolio(&model)?,
            msr_portfolio(&model, msr_rate)?,
            mcesr_portfolio(&model, interval)?,
        ])
    } else {
        Ok(vec![
            gmv_no_short(&model)?,
            msr_no_short(&model, 0.0)?.with_label(PortfolioLabel::Tangent),
            msr_no_short(&model, msr_rate)?,
            mcesr_no_short(&model, interval, grid_n)?.best().clone(),
        ])
    }
}

/// Fit GMV, TP, MSR and MCESR on the estimation sample and evaluate each on
/// the test sample at every horizon. Fitting sees only `in_sample`.
#[allow(clippy::too_many_arguments)]
pub fn compare_strategies(
    in_sample: &ReturnMatrix,
    out_sample: &ReturnMatrix,
    interval: &RateInterval,
    msr_rate: f64,
    allow_short: bool,
    horizons: &[usize],
    mode: Mode,
    grid_n: usize,
) -> Result<StrategyReport> {
    if in_sample.asset_names() != out_sample.asset_names() {
        return Err(Error::InvalidInput(
            "estimation and test panels must share the same assets".into(),
        ));
    }
    for &h in horizons {
        if h > out_sample.n_periods() {
            return Err(Error::HorizonTooLong {
                horizon: h,
                available: out_sample.n_periods(),
            });
        }
    }
    let label = if allow_short { "short" } else { "no_short" };
    let portfolios = fit_strategies(in_sample, interval, msr_rate, allow_short, grid_n)?;
    let mut rows = Vec::with_capacity(portfolios.len());
    for p in &portfolios {
        let mut changes = Vec::with_capacity(horizons.len());
        for &h in horizons {
            changes.push(portfolio_value_change(p.weights(), out_sample, h, mode)?);
        }
        rows.push(StrategyRow {
            strategy: p.label().to_string(),
            label: label.to_string(),
            rf: p.rf_used(),
            changes,
        });
    }
    Ok(StrategyReport {
        horizons: horizons.to_vec(),
        mode,
        rows,
    })
}
