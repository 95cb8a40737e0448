//! Plain-CSV loaders for user-supplied data.
//!
//! Blank lines and lines starting with `#` are skipped. Fields are separated
//! by commas and surrounding whitespace is ignored.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#'))
            .then(|| (i + 1, l.split(',').map(str::trim).collect()))
    })
}

fn number(line: usize, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("expected a finite number, found `{field}`"),
        })
}

/// Rows of features followed by a final label column. Returns the sample
/// matrix (one row per sample) and the labels.
pub fn parse_labeled_samples(text: &str) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let mut width = None;
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (line, fields) in records(text) {
        if fields.len() < 2 {
            return Err(Error::Parse {
                line,
                message: "need at least one feature and a label".into(),
            });
        }
        if *width.get_or_insert(fields.len()) != fields.len() {
            return Err(Error::Parse {
                line,
                message: "inconsistent number of columns".into(),
            });
        }
        let (label, features) = fields.split_last().expect("at least two fields");
        for f in features {
            data.push(number(line, f)?);
        }
        labels.push(number(line, label)?);
    }
    let width = width.ok_or(Error::Parse {
        line: 0,
        message: "no data rows".into(),
    })?;
    Ok((
        DMatrix::from_row_slice(labels.len(), width - 1, &data),
        labels,
    ))
}

/// Triplet rows `i,j,value` with zero-based indices.
pub fn parse_triplets(text: &str) -> Result<Vec<(usize, usize, f64)>> {
    let mut out = Vec::new();
    for (line, fields) in records(text) {
        if fields.len() != 3 {
            return Err(Error::Parse {
                line,
                message: "expected `i,j,value`".into(),
            });
        }
        let index = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("expected an index, found `{s}`"),
            })
        };
        out.push((
            index(fields[0])?,
            index(fields[1])?,
            number(line, fields[2])?,
        ));
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    }
    Ok(out)
}
