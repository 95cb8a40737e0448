//! θ tables recomputed from the `*.rounds.csv` files of a run directory.

use std::path::Path;

use anyhow::{Context, Result};
use boostfw::pursuit::{theta_from_alignments, ThetaRow};
use boostfw::solvers::alignment_sequences;

use crate::csvio::read_rounds;
use crate::ValidationError;

const SUFFIX: &str = ".rounds.csv";

/// One table per rounds file, sorted by solver label.
pub fn thetas_from_dir(dir: &Path) -> Result<Vec<(String, Vec<ThetaRow>)>> {
    if !dir.is_dir() {
        return Err(ValidationError(format!("{} is not a directory", dir.display())).into());
    }
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        let label = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.strip_suffix(SUFFIX))
            .map(str::to_string);
        if let Some(label) = label {
            files.push((label, path));
        }
    }
    if files.is_empty() {
        return Err(ValidationError(format!("no *{SUFFIX} files in {}", dir.display())).into());
    }
    files.sort();
    files
        .into_iter()
        .map(|(label, path)| {
            let rounds = read_rounds(&path)?;
            Ok((label, theta_from_alignments(&alignment_sequences(&rounds))))
        })
        .collect()
}
