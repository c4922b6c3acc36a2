//! CSV and JSON records for external plotting.
//!
//! Floats are written with 17 significant digits so every record re-parses
//! to bit-identical values.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groundstate::BinderCurve;
use crate::scaling::{CurveSource, DerivativeCurveSet};
use crate::statevector::CorrelatorSeries;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("not a number: {field:?}")))
}

fn writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

/// Rows of numbers, after checking the header.
fn read_rows<R: Read>(input: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if found != header {
        return Err(Error::InvalidConfig(format!(
            "expected columns {header:?}, found {found:?}"
        )));
    }
    r.records().map(|rec| rec?.iter().map(parse_f64).collect()).collect()
}

/// Values in first-seen order.
fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Columns `Jt, G, G_av`.
pub fn write_correlator_series<W: Write>(series: &CorrelatorSeries, out: W) -> Result<()> {
    let mut w = writer(out, &["Jt", "G", "G_av"])?;
    for k in 0..series.len() {
        w.write_record([series.times[k], series.g[k], series.g_av[k]].map(fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_correlator_series<R: Read>(input: R) -> Result<CorrelatorSeries> {
    let rows = read_rows(input, &["Jt", "G", "G_av"])?;
    Ok(CorrelatorSeries {
        times: rows.iter().map(|r| r[0]).collect(),
        g: rows.iter().map(|r| r[1]).collect(),
        g_av: rows.iter().map(|r| r[2]).collect(),
    })
}

/// Columns `Jt, B_over_J, dGdB`, time-major.
pub fn write_derivative_curves<W: Write>(curves: &DerivativeCurveSet, out: W) -> Result<()> {
    let mut w = writer(out, &["Jt", "B_over_J", "dGdB"])?;
    for (t, row) in curves.times.iter().zip(&curves.values) {
        for (b, v) in curves.b_grid.iter().zip(row) {
            w.write_record([*t, *b, *v].map(fmt_f64))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_derivative_curves<R: Read>(input: R, source: CurveSource) -> Result<DerivativeCurveSet> {
    let rows = read_rows(input, &["Jt", "B_over_J", "dGdB"])?;
    let times = distinct(rows.iter().map(|r| r[0]));
    let b_grid = distinct(rows.iter().map(|r| r[1]));
    let mut values = vec![vec![f64::NAN; b_grid.len()]; times.len()];
    for r in &rows {
        let k = times.iter().position(|&t| t == r[0]).expect("time was collected");
        let i = b_grid.iter().position(|&b| b == r[1]).expect("field was collected");
        values[k][i] = r[2];
    }
    if values.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::InvalidConfig(
            "derivative table is not a full time x field grid".into(),
        ));
    }
    DerivativeCurveSet::new(times, b_grid, values, source)
}

/// A quantity tabulated on a field x time grid, `values[k][i]` at
/// `times[k]`, `b_grid[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTimeTable {
    pub b_grid: Vec<f64>,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

/// Columns `B_over_J, Jt, value`, field-major.
pub fn write_field_time_table<W: Write>(table: &FieldTimeTable, out: W) -> Result<()> {
    let mut w = writer(out, &["B_over_J", "Jt", "value"])?;
    for (i, b) in table.b_grid.iter().enumerate() {
        for (k, t) in table.times.iter().enumerate() {
            w.write_record([*b, *t, table.values[k][i]].map(fmt_f64))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_field_time_table<R: Read>(input: R) -> Result<FieldTimeTable> {
    let rows = read_rows(input, &["B_over_J", "Jt", "value"])?;
    let b_grid = distinct(rows.iter().map(|r| r[0]));
    let times = distinct(rows.iter().map(|r| r[1]));
    if rows.len() != b_grid.len() * times.len() {
        return Err(Error::InvalidConfig("table is not a full field x time grid".into()));
    }
    let mut values = vec![vec![0.0; b_grid.len()]; times.len()];
    for r in &rows {
        let i = b_grid.iter().position(|&b| b == r[0]).expect("field was collected");
        let k = times.iter().position(|&t| t == r[1]).expect("time was collected");
        values[k][i] = r[2];
    }
    Ok(FieldTimeTable { b_grid, times, values })
}

/// Columns `L, B_over_J, U4`, one block per size.
pub fn write_binder_curves<W: Write>(curves: &[BinderCurve], out: W) -> Result<()> {
    let mut w = writer(out, &["L", "B_over_J", "U4"])?;
    for c in curves {
        for (b, u) in c.b_grid.iter().zip(&c.u4) {
            w.write_record([c.sites.to_string(), fmt_f64(*b), fmt_f64(*u)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_binder_curves<R: Read>(input: R) -> Result<Vec<BinderCurve>> {
    let rows = read_rows(input, &["L", "B_over_J", "U4"])?;
    let mut out: Vec<BinderCurve> = Vec::new();
    for r in rows {
        let sites = r[0] as usize;
        match out.iter_mut().find(|c| c.sites == sites) {
            Some(c) => {
                c.b_grid.push(r[1]);
                c.u4.push(r[2]);
            }
            None => out.push(BinderCurve {
                sites,
                b_grid: vec![r[1]],
                u4: vec![r[2]],
            }),
        }
    }
    Ok(out)
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned, R: Read>(input: R) -> Result<T> {
    Ok(serde_json::from_reader(input)?)
}
