//! File ingestion: generic return/price CSVs, the Ken-French 10-industry
//! monthly text layout, and period splitting.
//!
//! Generic CSVs are UTF-8 and comma-separated with a `date` header column:
//!
//! ```text
//! date,BBVA.MC,TEF.MC
//! 2009-01-05,0.012,-0.004
//! 2009-01-12,-0.031,0.009
//! ```
//!
//! The French industry file is whitespace-separated with a preamble, a header
//! naming the industries, then monthly rows labeled `YYYYMM` holding returns
//! in percent. Parsing stops at the end of the monthly block (the published
//! file continues with annual tables):
//!
//! ```text
//!   Average Value Weighted Returns -- Monthly
//!          NoDur Durbl Manuf Enrgy HiTec Telcm Shops  Hlth Utils Other
//! 196301    4.90  2.01  1.33  0.45  0.12  2.50  1.18  0.87  2.13  1.11
//! 196302   -1.02  0.33 -2.45  1.90 -0.87 -0.14  0.50  1.02 -0.55 -1.25
//! 196303    3.11 -0.72  1.08  2.27  1.44  0.52 -1.31  2.20  0.97  0.44
//! ```
//!
//! Rows arrive sorted by period label; unsorted input is sorted with a
//! warning. Values of `-99.99` or `-999` are missing-data sentinels.

use std::collections::HashSet;
use std::fs::File;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::market::ReturnMatrix;

/// Canonical column names of the 10-industry file, used when the header line
/// cannot be located.
const FRENCH10_NAMES: [&str; 10] = [
    "NoDur", "Durbl", "Manuf", "Enrgy", "HiTec", "Telcm", "Shops", "Hlth", "Utils", "Other",
];

/// Unit convention for loaded values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    /// Decimal returns (0.049 for 4.9%).
    #[default]
    Decimal,
    /// Keep percent units as published (4.9 for 4.9%).
    Percent,
}

/// An estimation/test split of one panel at a boundary label.
#[derive(Debug, Clone)]
pub struct PeriodSplit {
    pub in_sample: ReturnMatrix,
    pub out_sample: ReturnMatrix,
    /// Last in-sample period label.
    pub split_label: String,
}

struct RawRow {
    label: String,
    values: Vec<f64>,
    /// 1-based row number in the source file, for error reporting.
    file_row: usize,
}

fn parse_cell(field: &str, row: usize, col: usize) -> Result<f64> {
    let trimmed = field.trim();
    if trimmed.is_empty() {
        return Err(Error::Parse {
            row,
            col,
            msg: "empty cell".into(),
        });
    }
    let value: f64 = trimmed.parse().map_err(|e| Error::Parse {
        row,
        col,
        msg: format!("{e}: {trimmed:?}"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            row,
            col,
            msg: format!("non-finite value {trimmed:?}"),
        });
    }
    Ok(value)
}

fn read_csv_panel(path: &Path) -> Result<(Vec<String>, Vec<RawRow>)> {
    let file = File::open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);

    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| Error::Parse {
            row: 1,
            col: 1,
            msg: e.to_string(),
        })?,
        None => {
            return Err(Error::Parse {
                row: 1,
                col: 1,
                msg: "empty file".into(),
            })
        }
    };
    if header.len() < 2 || !header[0].trim().eq_ignore_ascii_case("date") {
        return Err(Error::Parse {
            row: 1,
            col: 1,
            msg: format!(
                "header must be \"date,NAME1,...\", got {:?}",
                header.iter().collect::<Vec<_>>()
            ),
        });
    }
    let names: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    let n = names.len();

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (idx, rec) in records.enumerate() {
        let file_row = idx + 2;
        let rec = rec.map_err(|e| Error::Parse {
            row: file_row,
            col: 1,
            msg: e.to_string(),
        })?;
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue; // trailing blank line
        }
        if rec.len() != n + 1 {
            return Err(Error::RaggedRow {
                row: file_row,
                expected: n + 1,
                got: rec.len(),
            });
        }
        let label = rec[0].trim().to_string();
        if label.is_empty() {
            return Err(Error::Parse {
                row: file_row,
                col: 1,
                msg: "empty date label".into(),
            });
        }
        if !seen.insert(label.clone()) {
            return Err(Error::DuplicateDate {
                label,
                row: file_row,
            });
        }
        let mut values = Vec::with_capacity(n);
        for j in 0..n {
            values.push(parse_cell(&rec[j + 1], file_row, j + 2)?);
        }
        rows.push(RawRow {
            label,
            values,
            file_row,
        });
    }
    Ok((names, rows))
}

fn sort_rows(rows: &mut [RawRow]) {
    let sorted = rows.windows(2).all(|w| w[0].label <= w[1].label);
    if !sorted {
        log::warn!("input rows are not sorted by period label; sorting");
        rows.sort_by(|a, b| a.label.cmp(&b.label));
    }
}

fn rows_to_matrix(names: Vec<String>, rows: Vec<RawRow>) -> Result<ReturnMatrix> {
    if rows.is_empty() {
        return Err(Error::Parse {
            row: 2,
            col: 1,
            msg: "no data rows".into(),
        });
    }
    let n = names.len();
    let mut values = Array2::<f64>::zeros((rows.len(), n));
    let mut labels = Vec::with_capacity(rows.len());
    for (t, row) in rows.into_iter().enumerate() {
        for (j, v) in row.values.into_iter().enumerate() {
            values[[t, j]] = v;
        }
        labels.push(row.label);
    }
    ReturnMatrix::new(values, names, labels)
}

/// Load per-period simple returns from a `date`-headed CSV.
pub fn load_returns_csv(path: impl AsRef<Path>) -> Result<ReturnMatrix> {
    let (names, mut rows) = read_csv_panel(path.as_ref())?;
    sort_rows(&mut rows);
    rows_to_matrix(names, rows)
}

/// Load prices from a `date`-headed CSV and convert to simple returns
/// `r_t = p_t / p_{t-1} - 1`. The output has one row fewer than the input
/// and keeps the label of each period's end.
pub fn load_prices_csv(path: impl AsRef<Path>) -> Result<ReturnMatrix> {
    let (names, mut rows) = read_csv_panel(path.as_ref())?;
    for row in &rows {
        for (j, &v) in row.values.iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::NonPositivePrice {
                    row: row.file_row,
                    col: j + 2,
                    value: v,
                });
            }
        }
    }
    sort_rows(&mut rows);
    if rows.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least two price rows to form returns".into(),
        ));
    }
    let n = names.len();
    let mut values = Array2::<f64>::zeros((rows.len() - 1, n));
    let mut labels = Vec::with_capacity(rows.len() - 1);
    for t in 1..rows.len() {
        for j in 0..n {
            values[[t - 1, j]] = rows[t].values[j] / rows[t - 1].values[j] - 1.0;
        }
        labels.push(rows[t].label.clone());
    }
    ReturnMatrix::new(values, names, labels)
}

/// Write a panel as a `date`-headed CSV that [`load_returns_csv`] reads back
/// to an identical matrix (values are printed with shortest round-trip
/// precision).
pub fn write_returns_csv(path: impl AsRef<Path>, returns: &ReturnMatrix) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut writer = csv::Writer::from_writer(file);
    let mut header = vec!["date".to_string()];
    header.extend(returns.asset_names().iter().cloned());
    writer
        .write_record(&header)
        .map_err(|e| Error::InvalidInput(format!("csv write failed: {e}")))?;
    for (t, label) in returns.period_labels().iter().enumerate() {
        let mut record = vec![label.clone()];
        for v in returns.values().row(t) {
            record.push(format!("{v}"));
        }
        writer
            .write_record(&record)
            .map_err(|e| Error::InvalidInput(format!("csv write failed: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::InvalidInput(format!("csv flush failed: {e}")))?;
    Ok(())
}

/// Split a panel at a boundary label: rows with `label <= boundary` form the
/// estimation sample, the rest the test sample. Both sides must be nonempty.
pub fn split_periods(returns: &ReturnMatrix, boundary: &str) -> Result<PeriodSplit> {
    let labels = returns.period_labels();
    let sorted = labels.windows(2).all(|w| w[0] < w[1]);
    if !sorted {
        return Err(Error::InvalidInput(
            "panel labels must be strictly increasing before splitting".into(),
        ));
    }
    let in_count = labels.iter().filter(|l| l.as_str() <= boundary).count();
    if in_count == 0 {
        return Err(Error::EmptySide {
            boundary: boundary.to_string(),
            side: "in-sample",
        });
    }
    if in_count == labels.len() {
        return Err(Error::EmptySide {
            boundary: boundary.to_string(),
            side: "out-sample",
        });
    }
    let in_sample = returns.select_rows(|i| i < in_count)?;
    let out_sample = returns.select_rows(|i| i >= in_count)?;
    let split_label = in_sample.period_labels().last().cloned().expect("nonempty");
    Ok(PeriodSplit {
        in_sample,
        out_sample,
        split_label,
    })
}

fn is_yyyymm(token: &str) -> bool {
    token.len() == 6 && token.bytes().all(|b| b.is_ascii_digit())
}

fn is_sentinel(v: f64) -> bool {
    (v + 99.99).abs() < 1e-9 || (v + 999.0).abs() < 1e-9
}

/// Load the Ken-French 10-industry monthly value-weighted block.
///
/// `Units::Decimal` divides the published percent values by 100;
/// `Units::Percent` keeps them as-is, matching how the monthly tables are
/// usually quoted.
pub fn load_french_10industry(path: impl AsRef<Path>, units: Units) -> Result<ReturnMatrix> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let lines: Vec<&str> = text.lines().collect();

    // Locate the first monthly data row: a YYYYMM label followed by numbers.
    let mut start = None;
    for (i, line) in lines.iter().enumerate() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() >= 2
            && is_yyyymm(tokens[0])
            && tokens[1..].iter().all(|t| t.parse::<f64>().is_ok())
        {
            start = Some(i);
            break;
        }
    }
    let start = start.ok_or_else(|| Error::Parse {
        row: 1,
        col: 1,
        msg: "no monthly data block found".into(),
    })?;
    let n = lines[start].split_whitespace().count() - 1;

    // The header line directly above names the industries.
    let names: Vec<String> = lines[..start]
        .iter()
        .rev()
        .find(|l| l.split_whitespace().count() == n)
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .unwrap_or_else(|| {
            if n == 10 {
                FRENCH10_NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                (1..=n).map(|i| format!("I{i}")).collect()
            }
        });

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in lines.iter().enumerate().skip(start) {
        let file_row = i + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() || !is_yyyymm(tokens[0]) {
            break; // end of the monthly block (blank line or annual tables)
        }
        if tokens.len() != n + 1 {
            return Err(Error::RaggedRow {
                row: file_row,
                expected: n + 1,
                got: tokens.len(),
            });
        }
        let label = tokens[0].to_string();
        if !seen.insert(label.clone()) {
            return Err(Error::DuplicateDate {
                label,
                row: file_row,
            });
        }
        let mut values = Vec::with_capacity(n);
        for (j, tok) in tokens[1..].iter().enumerate() {
            let v = parse_cell(tok, file_row, j + 2)?;
            if is_sentinel(v) {
                return Err(Error::MissingData {
                    row: file_row,
                    col: j + 2,
                    value: v,
                });
            }
            values.push(match units {
                Units::Percent => v,
                Units::Decimal => v / 100.0,
            });
        }
        rows.push(RawRow {
            label,
            values,
            file_row,
        });
    }
    sort_rows(&mut rows);
    rows_to_matrix(names, rows)
}
