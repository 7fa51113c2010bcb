//! Text formats for point sets, distance matrices and edge lists.
//!
//! Points: one point per line, whitespace-separated coordinates. Matrices:
//! a line holding `n` followed by `n` rows of `n` values. In both, blank
//! lines and anything after `#` are ignored. Edge lists are written as
//! `u v weight` with the weight in C `%.12g` notation.

use std::fmt::Write as _;

use super::{validate_metric, Edge, MetricError, PointSet};
use crate::metric::MetricSpace;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: cannot parse `{token}` as a number")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

fn parse_row(line: usize, body: &str) -> Result<Vec<f64>, FormatError> {
    body.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| FormatError::BadNumber {
                line,
                token: tok.to_string(),
            })
        })
        .collect()
}

pub fn parse_points(text: &str) -> Result<PointSet, FormatError> {
    let mut rows = Vec::new();
    for (line, body) in content_lines(text) {
        rows.push(parse_row(line, body)?);
    }
    Ok(PointSet::new(rows)?)
}

pub fn parse_matrix(text: &str) -> Result<MetricSpace, FormatError> {
    let mut lines = content_lines(text);
    let (first, header) = lines.next().ok_or(FormatError::Malformed {
        line: 0,
        message: "empty matrix file".into(),
    })?;
    let n: usize = header.parse().map_err(|_| FormatError::Malformed {
        line: first,
        message: format!("expected the matrix size, found `{header}`"),
    })?;
    let mut rows = Vec::with_capacity(n);
    for (line, body) in lines {
        let row = parse_row(line, body)?;
        if row.len() != n {
            return Err(FormatError::Malformed {
                line,
                message: format!("expected {n} values, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(FormatError::Malformed {
            line: first,
            message: format!("expected {n} rows, found {}", rows.len()),
        });
    }
    Ok(validate_metric(&rows)?)
}

/// Formats like C's `printf("%.*g", precision, v)`.
pub fn format_g(v: f64, precision: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let p = precision.max(1);
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", p - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `%.12g`, the precision used for every weight written by this crate.
pub fn fmt_weight(w: f64) -> String {
    format_g(w, 12)
}

/// Edge lines `u v weight` in `(weight, u, v)` order.
pub fn write_edges(edges: &[Edge]) -> String {
    let mut sorted = edges.to_vec();
    super::sort_edges(&mut sorted);
    let mut out = String::with_capacity(sorted.len() * 24);
    for e in &sorted {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, fmt_weight(e.w));
    }
    out
}

pub fn write_points(points: &PointSet) -> String {
    let mut out = String::new();
    for p in points.iter() {
        let row: Vec<String> = p.iter().map(|&c| fmt_weight(c)).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_g_matches_printf() {
        // reference strings from printf("%.12g")
        let cases = [
            (1.0, "1"),
            (0.5, "0.5"),
            (2f64.sqrt(), "1.41421356237"),
            (1e-5, "1e-05"),
            (0.0001, "0.0001"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (-2.5, "-2.5"),
            (1.0 / 3.0, "0.333333333333"),
            (100.0, "100"),
            (9.9999999999995, "10"),
            (5.0 / 6.0, "0.833333333333"),
        ];
        for (v, want) in cases {
            assert_eq!(format_g(v, 12), want, "value {v}");
        }
        assert_eq!(format_g(0.0, 12), "0");
        assert_eq!(format_g(1.5e300, 12), "1.5e+300");
    }

    #[test]
    fn points_with_comments() {
        let pts = parse_points("# header\n0 0\n\n1 2 # trailing\n").unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts.point(1), &[1.0, 2.0]);
        assert!(matches!(parse_points("0 x\n"), Err(FormatError::BadNumber { line: 1, .. })));
    }

    #[test]
    fn matrix_file() {
        let m = parse_matrix("3\n0 1 1\n1 0 1\n1 1 0\n").unwrap();
        assert_eq!(m.len(), 3);
        assert!(parse_matrix("2\n0 1\n").is_err());
        assert!(matches!(
            parse_matrix("3\n0 1 3\n1 0 1\n3 1 0\n"),
            Err(FormatError::Metric(MetricError::TriangleViolation { .. }))
        ));
    }

    #[test]
    fn edges_sorted_on_output() {
        let text = write_edges(&[Edge::new(1, 2, 1.0), Edge::new(0, 1, 1.0), Edge::new(0, 2, 2f64.sqrt())]);
        assert_eq!(text, "0 1 1\n1 2 1\n0 2 1.41421356237\n");
    }
}
