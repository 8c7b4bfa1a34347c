//! Readers for the on-disk formats: point clouds and matrices as CSV,
//! everything structured as JSON.

use anyhow::{anyhow, bail, Context, Result};
use fractalkit::metric::FiniteMetricSpace;
use serde::de::DeserializeOwned;

/// Parses numeric CSV. A first row that does not parse is taken as a header.
pub fn numeric_rows(text: &str, what: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{what}: malformed CSV"))?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                if let Some(first) = rows.first() {
                    if first.len() != row.len() {
                        bail!(
                            "{what}: record on line {line} has {} fields, expected {}",
                            row.len(),
                            first.len()
                        );
                    }
                }
                rows.push(row);
            }
            Err(_) if k == 0 => continue,
            Err(_) => {
                let bad = record.iter().find(|f| f.parse::<f64>().is_err()).unwrap_or_default();
                bail!("{what}: record on line {line}: field {bad:?} is not a number");
            }
        }
    }
    Ok(rows)
}

pub fn space_from_text(text: &str, matrix: bool, what: &str) -> Result<FiniteMetricSpace> {
    let rows = numeric_rows(text, what)?;
    if rows.is_empty() {
        bail!("{what}: no records");
    }
    let space = if matrix {
        FiniteMetricSpace::explicit(rows)
    } else {
        FiniteMetricSpace::euclidean(rows)
    };
    space.with_context(|| {
        format!(
            "{what}: invalid {}",
            if matrix { "distance matrix" } else { "point cloud" }
        )
    })
}

/// `(index, value)` pairs.
pub fn indexed_values(text: &str, what: &str) -> Result<Vec<(usize, f64)>> {
    numeric_rows(text, what)?
        .into_iter()
        .enumerate()
        .map(|(k, row)| {
            if row.len() != 2 {
                bail!("{what}: record {} needs index,value", k + 1);
            }
            if row[0] < 0.0 || row[0].fract() != 0.0 {
                bail!(
                    "{what}: record {}: index {} is not a nonnegative integer",
                    k + 1,
                    row[0]
                );
            }
            Ok((row[0] as usize, row[1]))
        })
        .collect()
}

pub fn json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).with_context(|| format!("{what}: invalid JSON input"))
}

pub fn number_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| anyhow!("{t:?} is not a number")))
        .collect()
}

/// `geometric:start,ratio,count`, `list:a,b,...` or a bare list.
pub fn scales(s: &str) -> Result<Vec<f64>> {
    if let Some(rest) = s.strip_prefix("geometric:") {
        let p = number_list(rest)?;
        if p.len() != 3 || p[2] < 1.0 || p[2].fract() != 0.0 {
            bail!("geometric scales take start,ratio,count");
        }
        return Ok((0..p[2] as i32).map(|k| p[0] * p[1].powi(k)).collect());
    }
    number_list(s.strip_prefix("list:").unwrap_or(s))
}

/// `lo:hi:n` for `n` evenly spaced points, or a comma list.
pub fn sample_points(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let lo: f64 = parts[0].trim().parse().context("range start")?;
        let hi: f64 = parts[1].trim().parse().context("range end")?;
        let n: usize = parts[2].trim().parse().context("range count")?;
        if n == 0 || lo.is_nan() || hi.is_nan() || lo > hi {
            bail!("range {s:?} needs lo <= hi and n >= 1");
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        return Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect());
    }
    number_list(s)
}
