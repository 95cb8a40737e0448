//! Plot-ready CSV files: solver traces, pursuit rounds and θ tables.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), so parsing a
//! written file recovers every numeric field bit for bit.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use boostfw::pursuit::{RoundKind, ThetaRow};
use boostfw::solvers::{RoundRecord, StepType, TraceRow};

pub const TRACE_HEADER: [&str; 9] = [
    "iter",
    "oracle_calls",
    "elapsed_s",
    "f_value",
    "duality_gap",
    "gamma",
    "K_t",
    "step_type",
    "eta",
];

pub const ROUNDS_HEADER: [&str; 5] = ["iter", "round", "kind", "lambda", "alignment"];

pub const THETA_HEADER: [&str; 6] = ["label", "k", "mean", "std", "count", "excluded"];

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(csv::Reader::from_reader(file))
}

fn check_header(r: &mut csv::Reader<File>, want: &[&str], path: &Path) -> Result<()> {
    let got = r
        .headers()
        .with_context(|| format!("reading header of {}", path.display()))?;
    if got.iter().ne(want.iter().copied()) {
        return Err(anyhow!(
            "{}: unexpected header `{}`",
            path.display(),
            got.iter().collect::<Vec<_>>().join(",")
        ));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, path: &Path) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| {
        let line = rec.position().map_or(0, |p| p.line());
        anyhow!(
            "{} line {line}: cannot parse `{raw}` in column {}",
            path.display(),
            i + 1
        )
    })
}

pub fn write_trace(rows: &[TraceRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(anyhow!(
            "refusing to write an empty trace to {}",
            path.display()
        ));
    }
    let mut w = writer(path)?;
    let io = |e: csv::Error| anyhow!("writing {}: {e}", path.display());
    w.write_record(TRACE_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.iter.to_string(),
            r.oracle_calls.to_string(),
            float(r.elapsed_s),
            float(r.f_value),
            float(r.duality_gap),
            float(r.gamma),
            r.k_t.to_string(),
            r.step_type.as_str().to_string(),
            float(r.eta),
        ])
        .map_err(io)?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = reader(path)?;
    check_header(&mut r, &TRACE_HEADER, path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.with_context(|| format!("reading {}", path.display()))?;
        let step: String = field(&rec, 7, path)?;
        rows.push(TraceRow {
            iter: field(&rec, 0, path)?,
            oracle_calls: field(&rec, 1, path)?,
            elapsed_s: field(&rec, 2, path)?,
            f_value: field(&rec, 3, path)?,
            duality_gap: field(&rec, 4, path)?,
            gamma: field(&rec, 5, path)?,
            k_t: field(&rec, 6, path)?,
            step_type: StepType::parse(&step)
                .ok_or_else(|| anyhow!("{}: unknown step type `{step}`", path.display()))?,
            eta: field(&rec, 8, path)?,
        });
    }
    Ok(rows)
}

fn parse_kind(s: &str) -> Option<RoundKind> {
    [RoundKind::Forward, RoundKind::Backward]
        .into_iter()
        .find(|k| k.as_str() == s)
}

pub fn write_rounds(rounds: &[RoundRecord], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let io = |e: csv::Error| anyhow!("writing {}: {e}", path.display());
    w.write_record(ROUNDS_HEADER).map_err(io)?;
    for r in rounds {
        w.write_record([
            r.iter.to_string(),
            r.round.to_string(),
            r.kind.as_str().to_string(),
            float(r.lambda),
            float(r.alignment),
        ])
        .map_err(io)?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

pub fn read_rounds(path: &Path) -> Result<Vec<RoundRecord>> {
    let mut r = reader(path)?;
    check_header(&mut r, &ROUNDS_HEADER, path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.with_context(|| format!("reading {}", path.display()))?;
        let kind: String = field(&rec, 2, path)?;
        out.push(RoundRecord {
            iter: field(&rec, 0, path)?,
            round: field(&rec, 1, path)?,
            kind: parse_kind(&kind)
                .ok_or_else(|| anyhow!("{}: unknown round kind `{kind}`", path.display()))?,
            lambda: field(&rec, 3, path)?,
            alignment: field(&rec, 4, path)?,
        });
    }
    Ok(out)
}

pub fn write_thetas(tables: &[(String, Vec<ThetaRow>)], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(THETA_HEADER)?;
    for (label, rows) in tables {
        for t in rows {
            w.write_record([
                label.clone(),
                t.k.to_string(),
                float(t.mean),
                float(t.std),
                t.count.to_string(),
                t.excluded.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
