//! Row types and their CSV/JSON encodings. Floats are written with 17
//! significant digits in exponent form so identical inputs give identical
//! bytes.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::Format;

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Serializes through the same fixed formatting as the CSV cells.
fn ser_float<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_float(*x))
}

fn ser_opt_float<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&fmt_float(*v)),
        None => s.serialize_none(),
    }
}

pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionRow {
    #[serde(serialize_with = "ser_float")]
    pub k: f64,
    #[serde(serialize_with = "ser_float")]
    pub inv_bu: f64,
    pub stable: Option<bool>,
    #[serde(serialize_with = "ser_opt_float")]
    pub r: Option<f64>,
    #[serde(serialize_with = "ser_opt_float")]
    pub growth_rate: Option<f64>,
    pub n_used: Option<usize>,
    #[serde(serialize_with = "ser_opt_float")]
    pub lower_bound_at_n8: Option<f64>,
    pub error: Option<String>,
}

impl Row for DispersionRow {
    const HEADER: &'static [&'static str] = &[
        "k",
        "inv_bu",
        "stable",
        "r",
        "growth_rate",
        "n_used",
        "lower_bound_at_n8",
        "error",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            fmt_float(self.k),
            fmt_float(self.inv_bu),
            self.stable.map(|s| s.to_string()).unwrap_or_default(),
            opt_float(self.r),
            opt_float(self.growth_rate),
            self.n_used.map(|n| n.to_string()).unwrap_or_default(),
            opt_float(self.lower_bound_at_n8),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    #[serde(serialize_with = "ser_opt_float")]
    pub r_n: Option<f64>,
    #[serde(serialize_with = "ser_opt_float")]
    pub growth_bound: Option<f64>,
}

impl Row for ConvergenceRow {
    const HEADER: &'static [&'static str] = &["n", "r_n", "growth_bound"];

    fn cells(&self) -> Vec<String> {
        vec![self.n.to_string(), opt_float(self.r_n), opt_float(self.growth_bound)]
    }
}

pub fn encode<R: Row>(rows: &[R], format: Format) -> io::Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(R::HEADER)?;
            for row in rows {
                w.write_record(row.cells())?;
            }
            w.into_inner().map_err(|e| e.into_error())
        }
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(rows)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Writes to `path`, or stdout when absent.
pub fn emit<R: Row>(rows: &[R], format: Format, path: Option<&Path>) -> io::Result<()> {
    let bytes = encode(rows, format)?;
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> DispersionRow {
        DispersionRow {
            k: 0.5,
            inv_bu: 1.0,
            stable: Some(false),
            r: Some(0.25),
            growth_rate: Some(0.25),
            n_used: Some(64),
            lower_bound_at_n8: None,
            error: None,
        }
    }

    #[test]
    fn float_format_has_seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn csv_header_and_empty_cells() {
        let text = String::from_utf8(encode(&[row()], Format::Csv).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "k,inv_bu,stable,r,growth_rate,n_used,lower_bound_at_n8,error");
        assert!(lines.next().unwrap().ends_with(",64,,"));
        let empty = String::from_utf8(encode::<DispersionRow>(&[], Format::Csv).unwrap()).unwrap();
        assert_eq!(empty.lines().count(), 1);
    }

    #[test]
    fn csv_quotes_error_messages() {
        let mut r = row();
        r.error = Some("a, b".into());
        let text = String::from_utf8(encode(&[r], Format::Csv).unwrap()).unwrap();
        assert!(text.contains("\"a, b\""));
    }

    #[test]
    fn json_mirrors_csv() {
        let v: serde_json::Value = serde_json::from_slice(&encode(&[row()], Format::Json).unwrap()).unwrap();
        assert_eq!(v[0]["r"], "2.5000000000000000e-1");
        assert!(v[0]["lower_bound_at_n8"].is_null());
        assert_eq!(v[0]["n_used"], 64);
    }
}
