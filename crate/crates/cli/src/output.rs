//! Rendering helpers. Every number passes through the significant-digit
//! rounding so table, CSV and JSON outputs carry identical values.

use frontera::fmt::{format_sig, round_sig};
use frontera::{AssetStats, Portfolio};
use serde_json::{json, Map, Value};

pub fn num(value: f64, digits: usize) -> Value {
    serde_json::Number::from_f64(round_sig(value, digits))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// `{label, rf, weights: {asset: number}, expected_return, risk, sharpe}`.
pub fn portfolio_json(p: &Portfolio, names: &[String], digits: usize) -> Value {
    let rf = p.rf_used().unwrap_or(0.0);
    let sharpe = (p.expected_return() - rf) / p.risk();
    let mut weights = Map::new();
    for (name, &w) in names.iter().zip(p.weights()) {
        weights.insert(name.clone(), num(w, digits));
    }
    json!({
        "label": p.label().to_string(),
        "rf": p.rf_used().map(|v| num(v, digits)).unwrap_or(Value::Null),
        "weights": Value::Object(weights),
        "expected_return": num(p.expected_return(), digits),
        "risk": num(p.risk(), digits),
        "sharpe": num(sharpe, digits),
    })
}

pub fn portfolio_csv(p: &Portfolio, names: &[String], digits: usize) -> String {
    let rf = p.rf_used().unwrap_or(0.0);
    let sharpe = (p.expected_return() - rf) / p.risk();
    let rf_text = p.rf_used().map(|v| format_sig(v, digits)).unwrap_or_default();
    let mut out = String::from("label,rf,asset,weight,expected_return,risk,sharpe\n");
    for (name, &w) in names.iter().zip(p.weights()) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.label(),
            rf_text,
            name,
            format_sig(w, digits),
            format_sig(p.expected_return(), digits),
            format_sig(p.risk(), digits),
            format_sig(sharpe, digits),
        ));
    }
    out
}

pub fn portfolio_table(p: &Portfolio, names: &[String], digits: usize) -> String {
    let rf = p.rf_used().unwrap_or(0.0);
    let sharpe = (p.expected_return() - rf) / p.risk();
    let mut out = format!("{} portfolio\n", p.label());
    if let Some(rate) = p.rf_used() {
        out.push_str(&format!("  risk-free rate  {}\n", format_sig(rate, digits)));
    }
    out.push_str(&format!(
        "  expected return {}\n  risk            {}\n  sharpe          {}\n",
        format_sig(p.expected_return(), digits),
        format_sig(p.risk(), digits),
        format_sig(sharpe, digits),
    ));
    out.push_str("  allocation\n");
    let width = names.iter().map(|n| n.len()).max().unwrap_or(4).max(5);
    for (name, &w) in names.iter().zip(p.weights()) {
        out.push_str(&format!("    {name:<width$}  {}\n", format_sig(w, digits)));
    }
    out
}

pub fn stats_table(section: &str, stats: &[AssetStats], digits: usize) -> String {
    let mut out = format!("{section}\n");
    let name_width = stats.iter().map(|s| s.name.len()).max().unwrap_or(5).max(5);
    let col = 12usize;
    out.push_str(&format!("{:<10}", ""));
    for s in stats {
        out.push_str(&format!("{:>width$}", s.name, width = name_width.max(col)));
    }
    out.push('\n');
    for (label, pick) in [
        ("Return", 0usize),
        ("Risk", 1),
        ("Minimum", 2),
        ("Maximum", 3),
    ] {
        out.push_str(&format!("{label:<10}"));
        for s in stats {
            let v = match pick {
                0 => s.mean,
                1 => s.risk,
                2 => s.min,
                _ => s.max,
            };
            out.push_str(&format!(
                "{:>width$}",
                format_sig(v, digits),
                width = name_width.max(col)
            ));
        }
        out.push('\n');
    }
    out
}

pub fn stats_csv_rows(section: &str, stats: &[AssetStats], digits: usize) -> String {
    let mut out = String::new();
    for s in stats {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            section,
            s.name,
            format_sig(s.mean, digits),
            format_sig(s.risk, digits),
            format_sig(s.min, digits),
            format_sig(s.max, digits),
        ));
    }
    out
}

pub fn stats_json_section(section: &str, stats: &[AssetStats], digits: usize) -> Value {
    json!({
        "section": section,
        "assets": stats.iter().map(|s| json!({
            "name": s.name,
            "return": num(s.mean, digits),
            "risk": num(s.risk, digits),
            "min": num(s.min, digits),
            "max": num(s.max, digits),
        })).collect::<Vec<_>>(),
    })
}
