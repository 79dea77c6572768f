//! CSV and JSON serialization of verification reports.

use std::io::{self, Read, Write};

use qmod_core::Complex64;
use serde_json::{json, Map, Value};

use crate::complex::{format_complex, format_f64, parse_complex};
use crate::verify::{Summary, VerificationReport};

/// Header: identity, parameters in declaration order, the two sides, the
/// errors, the flags and any identity-specific extra columns.
pub fn csv_header(reports: &[VerificationReport]) -> Vec<String> {
    let mut h = vec!["identity".to_string()];
    if let Some(first) = reports.first() {
        h.extend(first.params.names());
    }
    for col in [
        "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "rel_err", "pass", "skipped",
    ] {
        h.push(col.to_string());
    }
    if let Some(first) = reports.first() {
        h.extend(first.extra.iter().map(|(n, _)| n.clone()));
    }
    h
}

fn csv_record(r: &VerificationReport) -> Vec<String> {
    let mut row = vec![r.identity.name().to_string()];
    row.extend(r.params.iter().map(|(_, v)| format_complex(*v)));
    for v in [r.lhs.re, r.lhs.im, r.rhs.re, r.rhs.im, r.abs_err, r.rel_err] {
        row.push(format_f64(v));
    }
    row.push(r.pass().to_string());
    row.push(r.skipped().to_string());
    row.extend(r.extra.iter().map(|(_, v)| format_f64(*v)));
    row
}

fn summary_record(s: &Summary) -> Vec<String> {
    vec![
        "#summary".to_string(),
        format!("identity={}", s.identity),
        format!("points={}", s.points),
        format!("evaluated={}", s.evaluated),
        format!("passed={}", s.passed),
        format!("failed={}", s.failed),
        format!("inconclusive={}", s.inconclusive),
        format!("skipped={}", s.skipped),
        format!("pass_rate={}", format_f64(s.pass_rate())),
        format!("max_rel_err={}", format_f64(s.max_rel_err)),
        format!("nonzero_offsets={}", s.nonzero_offsets),
    ]
}

pub fn write_csv<W: Write>(
    out: W,
    reports: &[VerificationReport],
    summary: &Summary,
) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(csv_header(reports))?;
    for r in reports {
        w.write_record(csv_record(r))?;
    }
    w.write_record(summary_record(summary))?;
    w.flush()
}

fn pair(z: Complex64) -> Value {
    json!([finite_or_null(z.re), finite_or_null(z.im)])
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn report_json(r: &VerificationReport) -> Value {
    let mut params = Map::new();
    for (name, v) in r.params.iter() {
        params.insert(name.clone(), pair(*v));
    }
    json!({
        "identity": r.identity.name(),
        "params": params,
        "lhs": pair(r.lhs),
        "rhs": pair(r.rhs),
        "abs_err": finite_or_null(r.abs_err),
        "rel_err": finite_or_null(r.rel_err),
        "offset_2pik": r.offset_2pik,
        "pass": r.pass(),
        "skipped": r.skipped(),
    })
}

pub fn summary_json(s: &Summary) -> Value {
    json!({
        "identity": s.identity.name(),
        "points": s.points,
        "evaluated": s.evaluated,
        "passed": s.passed,
        "failed": s.failed,
        "inconclusive": s.inconclusive,
        "skipped": s.skipped,
        "pass_rate": s.pass_rate(),
        "max_rel_err": s.max_rel_err,
        "nonzero_offsets": s.nonzero_offsets,
    })
}

pub fn write_json<W: Write>(
    mut out: W,
    reports: &[VerificationReport],
    summary: &Summary,
) -> io::Result<()> {
    let doc = json!({
        "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
        "summary": summary_json(summary),
    });
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")
}

/// One data row of a sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub identity: String,
    pub params: Vec<(String, Complex64)>,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
    pub skipped: bool,
    pub extra: Vec<(String, f64)>,
}

fn bad(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

/// Reads a sweep CSV back, skipping the `#summary` row.
pub fn read_csv<R: Read>(input: R) -> io::Result<Vec<CsvRow>> {
    let mut r = csv::ReaderBuilder::new()
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let lhs_at = header
        .iter()
        .position(|h| h == "lhs_re")
        .ok_or_else(|| bad("missing lhs_re column"))?;
    let num =
        |s: &str| -> io::Result<f64> { s.parse().map_err(|_| bad(format!("bad number `{s}`"))) };
    let flag =
        |s: &str| -> io::Result<bool> { s.parse().map_err(|_| bad(format!("bad flag `{s}`"))) };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(bad("row length differs from header"));
        }
        let mut params = Vec::new();
        for k in 1..lhs_at {
            let v = parse_complex(&rec[k]).map_err(|e| bad(e.to_string()))?;
            params.push((header[k].clone(), v));
        }
        let f = |k: usize| num(&rec[lhs_at + k]);
        let extra = (lhs_at + 8..header.len())
            .map(|k| Ok((header[k].clone(), num(&rec[k])?)))
            .collect::<io::Result<Vec<_>>>()?;
        rows.push(CsvRow {
            identity: rec[0].to_string(),
            params,
            lhs: Complex64::new(f(0)?, f(1)?),
            rhs: Complex64::new(f(2)?, f(3)?),
            abs_err: f(4)?,
            rel_err: f(5)?,
            pass: flag(&rec[lhs_at + 6])?,
            skipped: flag(&rec[lhs_at + 7])?,
            extra,
        });
    }
    Ok(rows)
}
