//! CSV emission with round-trippable doubles.
//!
//! Comma separated, `.` decimal point, one header row, every value printed
//! with 17 significant digits so that re-parsing gives the same bits.

use std::fmt::Write as _;

use crate::error::{domain, Result};
use crate::fabric::SampledField;

/// Format a double with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Render equally long columns as CSV.
pub fn columns_to_csv(header: &[&str], columns: &[&[f64]]) -> Result<String> {
    if header.len() != columns.len() {
        return Err(domain("one header entry per column is required"));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(domain("columns differ in length"));
    }
    let mut out = String::with_capacity(rows * columns.len() * 24 + 64);
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..rows {
        for (j, col) in columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(col[i]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// `x,u` CSV of a sampled field.
pub fn field_to_csv(field: &SampledField<f64>, x_name: &str, u_name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{x_name},{u_name}");
    for (x, u) in field.nodes().iter().zip(field.values()) {
        let _ = writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*u));
    }
    out
}

/// Parse a two-column `x,u` CSV (header required) into a field.
pub fn field_from_csv(text: &str) -> Result<SampledField<f64>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    lines.next().ok_or_else(|| domain("empty CSV"))?;
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64> {
            s.map(str::trim)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| domain(format!("bad number on data row {}", lineno + 1)))
        };
        nodes.push(parse(parts.next())?);
        values.push(parse(parts.next())?);
    }
    SampledField::new(nodes, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_rows() {
        let csv = columns_to_csv(&["x", "p"], &[&[0.0, 1.5], &[0.25, -2.0]]).unwrap();
        assert_eq!(
            csv,
            "x,p\n0.0000000000000000e0,2.5000000000000000e-1\n1.5000000000000000e0,-2.0000000000000000e0\n"
        );
        assert!(columns_to_csv(&["x"], &[&[0.0], &[1.0]]).is_err());
        assert!(columns_to_csv(&["x", "y"], &[&[0.0], &[1.0, 2.0]]).is_err());
    }

    #[test]
    fn field_csv_parse() {
        let f = SampledField::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.1, 1e-300]).unwrap();
        let back = field_from_csv(&field_to_csv(&f, "x", "u")).unwrap();
        assert_eq!(back, f);
        assert!(field_from_csv("x,u\n0,a\n").is_err());
    }

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = fmt_f64(v);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
