use std::collections::HashMap;
use std::path::Path;

use super::grid::CellResult;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 16] = [
    "scenario_id", "K", "C", "S", "rho", "alpha", "beta", "w1", "w2", "D", "N_S", "t", "mean", "ci_low",
    "ci_high", "n_runs",
];

/// Decimal text rounded to 12 significant digits, trailing zeros trimmed.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let point = exp + 1;
    let mut out = String::new();
    if x < 0.0 {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(&digits);
    } else if point >= DIGITS {
        out.push_str(&digits);
        out.extend(std::iter::repeat_n('0', (point - DIGITS) as usize));
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    if out.contains('.') {
        let trimmed = out.trim_end_matches('0').trim_end_matches('.').len();
        out.truncate(trimmed);
    }
    out
}

/// Writes one row per (cell, period), cells in the given order.
pub fn write_csv(results: &[CellResult], path: &Path) -> Result<()> {
    if results.is_empty() {
        return Err(Error::param("no results to write"));
    }
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for result in results {
        let p = &result.cell.params;
        let fixed = [
            result.cell.id.clone(),
            p.k.to_string(),
            p.c.to_string(),
            p.s.to_string(),
            format_sig(p.rho),
            format_sig(p.scheme.alpha()),
            format_sig(p.scheme.beta()),
            format_sig(p.weights.w1()),
            format_sig(p.weights.w2()),
            p.d.to_string(),
            p.n_s.to_string(),
        ];
        let n_runs = result.series.n_runs.to_string();
        for point in &result.series.points {
            let mut record: Vec<String> = fixed.to_vec();
            record.extend([
                point.t.to_string(),
                format_sig(point.mean),
                format_sig(point.ci_low),
                format_sig(point.ci_high),
                n_runs.clone(),
            ]);
            w.write_record(&record).map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One parsed row of a results file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub scenario_id: String,
    pub k: usize,
    pub c: usize,
    pub s: usize,
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
    pub w1: f64,
    pub w2: f64,
    pub d: usize,
    pub n_s: usize,
    pub t: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_runs: usize,
}

/// Parses a results file, rejecting files that lack any schema column.
pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = r.headers().map_err(csv_err)?.clone();
    let index: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let mut cols = [0usize; 16];
    for (slot, name) in cols.iter_mut().zip(CSV_HEADER) {
        *slot = *index
            .get(name)
            .ok_or_else(|| Error::Parse(format!("{}: missing column {name:?}", path.display())))?;
    }
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let field = |c: usize| record.get(cols[c]).unwrap_or_default();
        let bad = |c: usize| Error::Parse(format!("{}: row {}: bad {}", path.display(), line + 2, CSV_HEADER[c]));
        let int = |c: usize| field(c).parse::<usize>().map_err(|_| bad(c));
        let float = |c: usize| field(c).parse::<f64>().map_err(|_| bad(c));
        rows.push(CsvRow {
            scenario_id: field(0).to_string(),
            k: int(1)?,
            c: int(2)?,
            s: int(3)?,
            rho: float(4)?,
            alpha: float(5)?,
            beta: float(6)?,
            w1: float(7)?,
            w2: float(8)?,
            d: int(9)?,
            n_s: int(10)?,
            t: int(11)?,
            mean: float(12)?,
            ci_low: float(13)?,
            ci_high: float(14)?,
            n_runs: int(15)?,
        });
    }
    Ok(rows)
}
