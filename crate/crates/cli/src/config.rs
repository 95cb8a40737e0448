//! Experiment configuration files.
//!
//! A config is TOML with three parts: an `[experiment]` table, a `[problem]`
//! table selecting the instance family, and one `[[solver]]` table per solver
//! to compare. An optional `[region]` table overrides the constraint radius.
//!
//! ```toml
//! [experiment]
//! name = "lasso"
//! seed = 7
//!
//! [problem]
//! family = "sparse_recovery"
//! m = 40
//! n = 100
//! lifted = true
//!
//! [[solver]]
//! algorithm = "fw"
//! step_rule = "ls"
//!
//! [[solver]]
//! algorithm = "boostfw"
//! step_rule = "ls"
//! delta = 1e-3
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use boostfw::solvers::{Algorithm, StepRule};
use serde::{Deserialize, Serialize};

use crate::ValidationError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub problem: Problem,
    #[serde(default)]
    pub region: RegionSpec,
    #[serde(rename = "solver", default)]
    pub solvers: Vec<SolverSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; `out/<name>` when absent.
    pub out: Option<PathBuf>,
    /// Record every k-th iteration.
    #[serde(default = "one")]
    pub trace_every: usize,
    /// Pairs sampled when a short step needs an estimated `L`.
    #[serde(default = "default_pairs")]
    pub smoothness_pairs: usize,
}

fn one() -> usize {
    1
}

fn default_pairs() -> usize {
    boostfw::numerics::DEFAULT_SMOOTHNESS_PAIRS
}

/// Instance family and generator parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Problem {
    /// Least squares over an ℓ1-ball of radius `‖x*‖₁`.
    SparseRecovery(SparseRecoveryParams),
    /// Logistic loss over an ℓ1-ball.
    Logistic(LogisticParams),
    /// Beckmann objective over a layered network's flow polytope.
    Traffic(TrafficParams),
    /// Huber loss on observed entries over a nuclear-norm ball.
    Completion(CompletionParams),
    /// Convex quadratic over a unit-flow path polytope.
    PathQuadratic(PathQuadraticParams),
    /// Random strongly convex quadratic over a scaled simplex.
    SimplexQuadratic(SimplexQuadraticParams),
    /// `‖x‖²` over the probability simplex; optimal value `1/n`.
    LowerBound(LowerBoundParams),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SparseRecoveryParams {
    pub m: usize,
    pub n: usize,
    pub sparsity: usize,
    pub sigma: f64,
    /// Solve over `τΔ₂ₙ` through the lifted objective instead of the ball.
    pub lifted: bool,
}

impl Default for SparseRecoveryParams {
    fn default() -> Self {
        Self {
            m: 40,
            n: 100,
            sparsity: 8,
            sigma: 0.05,
            lifted: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticParams {
    pub m: usize,
    pub n: usize,
    pub sparsity: usize,
    pub sigma: f64,
    /// CSV of samples, last column the ±1 label; replaces the generator.
    pub data: Option<PathBuf>,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            m: 200,
            n: 100,
            sparsity: 10,
            sigma: 0.1,
            data: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficParams {
    pub layers: usize,
    pub width: usize,
    pub drop: f64,
    /// Network file with demands; replaces the generator.
    pub network: Option<PathBuf>,
}

impl Default for TrafficParams {
    fn default() -> Self {
        Self {
            layers: 4,
            width: 5,
            drop: 0.5,
            network: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompletionParams {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub observed_fraction: f64,
    pub rho: f64,
    pub noise: f64,
    /// Triplet CSV `i,j,value`; replaces the generator (needs `rows`, `cols`).
    pub data: Option<PathBuf>,
}

impl Default for CompletionParams {
    fn default() -> Self {
        Self {
            rows: 30,
            cols: 40,
            rank: 2,
            observed_fraction: 0.3,
            rho: 1.0,
            noise: 0.1,
            data: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathQuadraticParams {
    pub layers: usize,
    pub width: usize,
    pub drop: f64,
}

impl Default for PathQuadraticParams {
    fn default() -> Self {
        Self {
            layers: 6,
            width: 4,
            drop: 0.3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimplexQuadraticParams {
    pub n: usize,
    /// Added to the diagonal; the strong convexity modulus is at least this.
    pub mu: f64,
    pub b_scale: f64,
}

impl Default for SimplexQuadraticParams {
    fn default() -> Self {
        Self {
            n: 50,
            mu: 0.5,
            b_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowerBoundParams {
    pub n: usize,
}

impl Default for LowerBoundParams {
    fn default() -> Self {
        Self { n: 1000 }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    /// Radius of the ball or simplex; the family default when absent.
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleName {
    Agnostic,
    Short,
    #[serde(alias = "line_search")]
    Ls,
    Golden,
}

impl RuleName {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Agnostic => "agnostic",
            Self::Short => "short",
            Self::Ls => "ls",
            Self::Golden => "golden",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "agnostic" => Self::Agnostic,
            "short" => Self::Short,
            "ls" | "line_search" => Self::Ls,
            "golden" => Self::Golden,
            _ => return None,
        })
    }

    /// The step rule, given the smoothness constant for short steps.
    pub fn rule(&self, lipschitz: Option<f64>) -> Option<StepRule> {
        Some(match self {
            Self::Agnostic => StepRule::Agnostic,
            Self::Short => StepRule::short(lipschitz?),
            Self::Ls => StepRule::line_search(),
            Self::Golden => StepRule::golden(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    /// Name used for output files; `<algorithm>-<step_rule>` by default.
    pub label: Option<String>,
    #[serde(with = "algorithm_name")]
    pub algorithm: Algorithm,
    pub step_rule: RuleName,
    /// Smoothness constant for short steps; declared or estimated if absent.
    pub lipschitz: Option<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub max_rounds: Option<usize>,
    #[serde(default = "default_budget")]
    pub budget_iters: usize,
    pub budget_seconds: Option<f64>,
    #[serde(default)]
    pub worst_case_adjustment: bool,
    pub stop_dual_gap: Option<f64>,
}

fn default_delta() -> f64 {
    1e-3
}

fn default_budget() -> usize {
    1000
}

impl SolverSpec {
    pub fn new(algorithm: Algorithm, step_rule: RuleName) -> Self {
        Self {
            label: None,
            algorithm,
            step_rule,
            lipschitz: None,
            delta: default_delta(),
            max_rounds: None,
            budget_iters: default_budget(),
            budget_seconds: None,
            worst_case_adjustment: false,
            stop_dual_gap: None,
        }
    }

    pub fn label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| format!("{}-{}", self.algorithm, self.step_rule.as_str()))
    }
}

mod algorithm_name {
    use boostfw::solvers::Algorithm;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(a: &Algorithm, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(a.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Algorithm, D::Error> {
        let s = String::deserialize(d)?;
        Algorithm::parse(&s).ok_or_else(|| {
            D::Error::custom(format!(
                "unknown algorithm `{s}` (expected fw, boostfw, afw, dicg or boostdicg)"
            ))
        })
    }
}

/// Command-line settings applied on top of every solver in a config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub budget_iters: Option<usize>,
    pub budget_seconds: Option<f64>,
    pub delta: Option<f64>,
    pub max_rounds: Option<usize>,
    pub step_rule: Option<RuleName>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ValidationError> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| ValidationError(format!("invalid config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Reads a config; relative data paths are resolved against its directory.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ValidationError(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p.as_mut() {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
        };
        match &mut self.problem {
            Problem::Logistic(p) => fix(&mut p.data),
            Problem::Traffic(p) => fix(&mut p.network),
            Problem::Completion(p) => fix(&mut p.data),
            _ => {}
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.experiment.seed = seed;
        }
        if let Some(out) = &o.out {
            self.experiment.out = Some(out.clone());
        }
        for s in &mut self.solvers {
            if let Some(b) = o.budget_iters {
                s.budget_iters = b;
            }
            if let Some(b) = o.budget_seconds {
                s.budget_seconds = Some(b);
            }
            if let Some(d) = o.delta {
                s.delta = d;
            }
            if let Some(k) = o.max_rounds {
                s.max_rounds = Some(k);
            }
            if let Some(r) = o.step_rule {
                s.step_rule = r;
            }
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.experiment
            .out
            .clone()
            .unwrap_or_else(|| Path::new("out").join(&self.experiment.name))
    }

    /// Structural checks that need no instance.
    pub fn check(&self) -> Result<(), ValidationError> {
        let fail = |m: String| Err(ValidationError(m));
        if self.solvers.is_empty() {
            return fail("config lists no solvers".into());
        }
        if self.experiment.trace_every == 0 {
            return fail("trace_every must be at least 1".into());
        }
        if self.experiment.smoothness_pairs == 0 {
            return fail("smoothness_pairs must be at least 1".into());
        }
        if let Some(tau) = self.region.tau {
            if !(tau > 0.0 && tau.is_finite()) {
                return fail(format!("region tau must be positive, got {tau}"));
            }
        }
        let mut seen = HashSet::new();
        for s in &self.solvers {
            let label = s.label();
            if label.is_empty()
                || label
                    .chars()
                    .any(|c| !(c.is_ascii_alphanumeric() || "-_.".contains(c)))
            {
                return fail(format!(
                    "solver label `{label}` must be nonempty and use only letters, digits, `-`, `_`, `.`"
                ));
            }
            if !seen.insert(label.clone()) {
                return fail(format!(
                    "duplicate solver label `{label}`; set distinct `label`s"
                ));
            }
            if let Some(l) = s.lipschitz {
                if !(l > 0.0 && l.is_finite()) {
                    return fail(format!("{label}: lipschitz must be positive"));
                }
            }
        }
        Ok(())
    }
}
