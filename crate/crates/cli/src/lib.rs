//! Experiment harness for the `boostfw` solvers: config files, comparison
//! runs, trace CSVs, θ tables and invariant suites.

pub mod config;
pub mod csvio;
pub mod experiment;
pub mod instance;
pub mod thetas;
pub mod verify;

/// A problem with the user's input: config, flags or data files. The
/// command-line tool maps it to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError(pub String);

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

/// Whether a `ValidationError` appears anywhere in the error chain.
pub fn is_validation(err: &anyhow::Error) -> bool {
    err.chain().any(|e| e.is::<ValidationError>())
}
