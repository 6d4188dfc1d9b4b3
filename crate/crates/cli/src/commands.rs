//! The four subcommands. Each builds its stdout payload as one string (and
//! optional output files), so identical inputs produce identical bytes.

use std::path::PathBuf;

use frontera::fmt::format_sig;
use frontera::{
    asymptotes, cml, descriptive_stats, equity_curve, estimate_moments, fit_strategies,
    frontier_risk_at_return, gmv_no_short, gmv_portfolio, load_french_10industry,
    load_prices_csv, load_returns_csv, mcesr_no_short, mcesr_portfolio, msr_no_short,
    msr_portfolio, split_periods, tangent_portfolio, AssetStats, Error, MarketModel, Portfolio,
    PortfolioLabel, RateInterval, Result, ReturnMatrix, StrategyReport, Units,
};
use serde_json::{json, Value};

use crate::config::{Format, Kind, RunConfig};
use crate::output::{
    num, portfolio_csv, portfolio_json, portfolio_table, stats_csv_rows, stats_json_section,
    stats_table,
};

/// Which closed-form portfolio `portfolio` prints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Gmv,
    Tp,
    Msr,
    Mcesr,
}

fn load_panel(cfg: &RunConfig) -> Result<ReturnMatrix> {
    match cfg.kind {
        Kind::ReturnsCsv => load_returns_csv(&cfg.input),
        Kind::PricesCsv => load_prices_csv(&cfg.input),
        Kind::French10 => {
            let units = if cfg.percent { Units::Percent } else { Units::Decimal };
            load_french_10industry(&cfg.input, units)
        }
    }
}

/// The estimation panel and, when a split is configured, the test panel.
fn estimation_panels(cfg: &RunConfig) -> Result<(ReturnMatrix, Option<ReturnMatrix>)> {
    let panel = load_panel(cfg)?;
    match &cfg.split {
        Some(boundary) => {
            let split = split_periods(&panel, boundary)?;
            Ok((split.in_sample, Some(split.out_sample)))
        }
        None => Ok((panel, None)),
    }
}

/// Configured interval, or the full `[0, r_gmv]` default.
fn interval_for(cfg: &RunConfig, model: &MarketModel) -> Result<RateInterval> {
    match cfg.interval {
        Some((r1, r2)) => RateInterval::new(r1, r2),
        None => RateInterval::new(0.0, model.r_gmv()),
    }
}

fn write_out_file(cfg: &RunConfig, name: &str, content: &str) -> Result<Option<PathBuf>> {
    let Some(dir) = &cfg.out else {
        return Ok(None);
    };
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    Ok(Some(path))
}

fn format_ext(format: Format) -> &'static str {
    match format {
        Format::Table => "txt",
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn span_label(panel: &ReturnMatrix) -> String {
    format!(
        "{} to {}",
        panel.period_labels().first().expect("nonempty"),
        panel.period_labels().last().expect("nonempty")
    )
}

pub fn cmd_stats(cfg: &RunConfig) -> Result<String> {
    let digits = cfg.precision.unwrap_or(6);
    let panel = load_panel(cfg)?;
    let mut sections: Vec<(String, String, Vec<AssetStats>)> = Vec::new();
    if let Some(boundary) = &cfg.split {
        let split = split_periods(&panel, boundary)?;
        sections.push((
            "in_sample".into(),
            format!("In-sample period ({})", span_label(&split.in_sample)),
            descriptive_stats(&split.in_sample),
        ));
        sections.push((
            "out_sample".into(),
            format!("Out-sample period ({})", span_label(&split.out_sample)),
            descriptive_stats(&split.out_sample),
        ));
    }
    sections.push((
        "total".into(),
        format!("Total period ({})", span_label(&panel)),
        descriptive_stats(&panel),
    ));

    let payload = match cfg.format {
        Format::Table => {
            let mut out = String::new();
            for (_, title, stats) in &sections {
                out.push_str(&stats_table(title, stats, digits));
                out.push('\n');
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("section,asset,return,risk,min,max\n");
            for (slug, _, stats) in &sections {
                out.push_str(&stats_csv_rows(slug, stats, digits));
            }
            out
        }
        Format::Json => {
            let doc = json!({
                "sections": sections
                    .iter()
                    .map(|(slug, _, stats)| stats_json_section(slug, stats, digits))
                    .collect::<Vec<_>>(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
        }
    };
    write_out_file(cfg, &format!("stats.{}", format_ext(cfg.format)), &payload)?;
    Ok(payload)
}

fn fit_requested_portfolio(cfg: &RunConfig, model: &MarketModel, which: Which) -> Result<Portfolio> {
    match (which, cfg.no_short) {
        (Which::Gmv, false) => Ok(gmv_portfolio(model)),
        (Which::Gmv, true) => gmv_no_short(model),
        (Which::Tp, false) => tangent_portfolio(model),
        (Which::Tp, true) => Ok(msr_no_short(model, 0.0)?.with_label(PortfolioLabel::Tangent)),
        (Which::Msr, false) => msr_portfolio(model, cfg.msr_rate),
        (Which::Msr, true) => msr_no_short(model, cfg.msr_rate),
        (Which::Mcesr, false) => {
            let interval = interval_for(cfg, model)?;
            mcesr_portfolio(model, &interval)
        }
        (Which::Mcesr, true) => {
            let interval = interval_for(cfg, model)?;
            Ok(mcesr_no_short(model, &interval, cfg.grid)?.best().clone())
        }
    }
}

pub fn cmd_portfolio(cfg: &RunConfig, which: Which) -> Result<String> {
    let digits = cfg.precision.unwrap_or(6);
    let (estimation, _) = estimation_panels(cfg)?;
    let model = estimate_moments(&estimation)?;
    let portfolio = fit_requested_portfolio(cfg, &model, which)?;
    let names = model.asset_names();

    let payload = match cfg.format {
        Format::Table => portfolio_table(&portfolio, names, digits),
        Format::Csv => portfolio_csv(&portfolio, names, digits),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&portfolio_json(&portfolio, names, digits))
                .expect("serializable")
        ),
    };
    write_out_file(cfg, &format!("portfolio.{}", format_ext(cfg.format)), &payload)?;
    Ok(payload)
}

fn report_json(report: &StrategyReport, digits: usize) -> Value {
    json!({
        "horizons": report.horizons,
        "mode": report.mode.to_string(),
        "rows": report.rows.iter().map(|row| json!({
            "strategy": row.strategy,
            "label": row.label,
            "rf": row.rf.map(|v| num(v, digits)).unwrap_or(Value::Null),
            "changes": row.changes.iter().map(|&c| num(c, digits)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn cmd_backtest(cfg: &RunConfig) -> Result<String> {
    let digits = cfg.precision.unwrap_or(6);
    let panel = load_panel(cfg)?;
    let boundary = cfg
        .split
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("backtest requires --split".into()))?;
    let split = split_periods(&panel, boundary)?;
    let model = estimate_moments(&split.in_sample)?;
    let interval = interval_for(cfg, &model)?;
    let horizons = match &cfg.horizons {
        Some(h) => h.clone(),
        None => vec![split.out_sample.n_periods()],
    };

    // The full table carries both short-sales treatments; --no-short
    // restricts it to the constrained variant.
    let mut report: Option<StrategyReport> = None;
    for allow_short in [true, false] {
        if allow_short && cfg.no_short {
            continue;
        }
        let part = frontera::compare_strategies(
            &split.in_sample,
            &split.out_sample,
            &interval,
            cfg.msr_rate,
            allow_short,
            &horizons,
            cfg.mode,
            cfg.grid,
        )?;
        match &mut report {
            None => report = Some(part),
            Some(r) => r.merge(part)?,
        }
    }
    let report = report.expect("at least one variant runs");

    let payload = match cfg.format {
        Format::Table => report.to_table(digits),
        Format::Csv => report.to_csv(digits),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&report_json(&report, digits)).expect("serializable")
        ),
    };
    write_out_file(cfg, &format!("backtest.{}", format_ext(cfg.format)), &payload)?;
    Ok(payload)
}

/// Plot-data files carry full precision by default (15 significant digits):
/// they exist to be consumed by plotting tools, not eyes.
pub fn cmd_plotdata(cfg: &RunConfig) -> Result<String> {
    let digits = cfg.precision.unwrap_or(15);
    let (estimation, out_sample) = estimation_panels(cfg)?;
    let model = estimate_moments(&estimation)?;
    let interval = interval_for(cfg, &model)?;
    let s = frontera::slopes(&model)?;
    let (r_gmv, sigma_gmv) = (model.r_gmv(), model.sigma_gmv());

    // Marked portfolios, honoring the short-sales setting.
    let marked: Vec<Portfolio> = if cfg.no_short {
        vec![
            gmv_no_short(&model)?,
            msr_no_short(&model, 0.0)?.with_label(PortfolioLabel::Tangent),
            msr_no_short(&model, cfg.msr_rate)?,
            mcesr_no_short(&model, &interval, cfg.grid)?.best().clone(),
        ]
    } else {
        vec![
            gmv_portfolio(&model),
            tangent_portfolio(&model)?,
            msr_portfolio(&model, cfg.msr_rate)?,
            mcesr_portfolio(&model, &interval)?,
        ]
    };
    let mut points_csv = String::from("sigma,r,label\n");
    for p in &marked {
        points_csv.push_str(&format!(
            "{},{},{}\n",
            format_sig(p.risk(), digits),
            format_sig(p.expected_return(), digits),
            p.label()
        ));
    }

    // Frontier samples: a 400-value return grid spanning three asymptote
    // heights around the apex — widened if needed so every marked portfolio
    // lies on the emitted polyline — plus the exact GMV point.
    let mut span = 3.0 * sigma_gmv * s.m_ah;
    for p in &marked {
        span = span.max(1.05 * (p.expected_return() - r_gmv).abs());
    }
    let (lo, hi) = (r_gmv - span, r_gmv + span);
    let mut frontier_rows: Vec<(f64, f64)> = (0..400)
        .map(|i| {
            let r = lo + (hi - lo) * i as f64 / 399.0;
            (frontier_risk_at_return(&model, r), r)
        })
        .collect();
    frontier_rows.push((sigma_gmv, r_gmv));
    frontier_rows.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite returns"));
    let mut frontier_csv = String::from("sigma,r\n");
    for (sigma, r) in &frontier_rows {
        frontier_csv.push_str(&format!(
            "{},{}\n",
            format_sig(*sigma, digits),
            format_sig(*r, digits)
        ));
    }

    // Line endpoints for the asymptotes and the CML at the MSR rate.
    let sigma_max = frontier_rows
        .iter()
        .map(|(sigma, _)| *sigma)
        .fold(0.0f64, f64::max);
    let (upper, lower) = asymptotes(&model);
    let cml_line = cml(&model, cfg.msr_rate)?;
    let mut lines_csv = String::from("x0,y0,x1,y1,label\n");
    for (line, label) in [
        (upper, "asymptote_up"),
        (lower, "asymptote_down"),
        (cml_line, "cml"),
    ] {
        lines_csv.push_str(&format!(
            "0,{},{},{},{}\n",
            format_sig(line.intercept, digits),
            format_sig(sigma_max, digits),
            format_sig(line.intercept + line.slope * sigma_max, digits),
            label
        ));
    }

    let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    let mut written = Vec::new();
    for (name, content) in [
        ("frontier.csv", &frontier_csv),
        ("lines.csv", &lines_csv),
        ("points.csv", &points_csv),
    ] {
        std::fs::write(out_dir.join(name), content)?;
        written.push(name.to_string());
    }

    // Equity curves per strategy on the test panel, when a split exists.
    if let Some(test_panel) = out_sample {
        let fitted = fit_strategies(
            &estimation,
            &interval,
            cfg.msr_rate,
            !cfg.no_short,
            cfg.grid,
        )?;
        let mut equity_csv = String::from("date,value,strategy\n");
        for p in &fitted {
            let curve = equity_curve(p.weights(), &test_panel, cfg.mode)?;
            for (label, value) in curve.labels.iter().zip(&curve.values) {
                equity_csv.push_str(&format!(
                    "{},{},{}\n",
                    label,
                    format_sig(*value, digits),
                    p.label()
                ));
            }
        }
        std::fs::write(out_dir.join("equity.csv"), &equity_csv)?;
        written.push("equity.csv".to_string());
    }

    let mut summary = String::new();
    for name in written {
        summary.push_str(&format!("wrote {}\n", out_dir.join(name).display()));
    }
    Ok(summary)
}
