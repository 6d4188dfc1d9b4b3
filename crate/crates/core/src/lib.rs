//! Mean-variance portfolio analytics with cross-efficiency selection.
//!
//! The crate estimates a market model (mean vector, covariance and the
//! frontier scalars `a`, `b`, `c`), derives the classical closed-form
//! portfolios (global minimum variance, tangent, maximum Sharpe ratio), and
//! selects a robust tangent portfolio by maximizing the average
//! cross-efficiency score over an interval of risk-free rates — in closed
//! form when short sales are allowed, by a QP grid search when they are not.
//! Data ingestion and out-of-sample backtesting round out the pipeline.
//!
//! Rate grids and QP sweeps run data-parallel under the default `parallel`
//! feature; disabling it yields a sequential build with identical results.

pub mod backtest;
pub mod cross_efficiency;
pub mod data;
pub mod error;
mod exec;
pub mod fmt;
pub mod frontier;
mod linalg;
pub mod market;
pub mod qp;

pub use backtest::{
    compare_strategies, equity_curve, fit_strategies, portfolio_value_change, EquityCurve, Mode,
    StrategyReport, StrategyRow,
};
pub use cross_efficiency::{
    average_cross_efficiency, average_cross_efficiency_quadrature, ce_derivative, ce_report,
    ce_scores_grid, cross_efficiency_pair, dea_weights, integrals_i1_i2, mcesr_portfolio,
    mcesr_rate, mcesr_rate_full_interval, rate_grid, CeMethod, CrossEffReport, DeaWeights,
    RateInterval,
};
pub use data::{
    load_french_10industry, load_prices_csv, load_returns_csv, split_periods, write_returns_csv,
    PeriodSplit, Units,
};
pub use error::{Error, Result};
pub use frontier::{
    asymptotes, cml, frontier_risk_at_return, gmv_portfolio, msr_portfolio, sharpe_ratio, slopes,
    tangent_portfolio, FrontierLine, Portfolio, PortfolioLabel, Slopes,
};
pub use market::{
    descriptive_stats, estimate_moments, invert_covariance, AssetStats, MarketModel, ReturnMatrix,
};
pub use qp::{discrete_cross_efficiency, gmv_no_short, mcesr_no_short, msr_no_short, qp_solve,
    GridResult, QpSolution};
