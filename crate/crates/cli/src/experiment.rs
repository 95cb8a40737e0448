//! Comparison runs: one instance, every configured solver from the same
//! start point, one trace CSV per solver and a combined report.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use boostfw::numerics::estimate_smoothness;
use boostfw::pursuit::{theta_from_alignments, ThetaRow};
use boostfw::solvers::{alignment_sequences, solve, Algorithm, RunTrace, SolverConfig};
use boostfw::{PursuitConfig, Region};

use crate::config::{ExperimentConfig, RuleName, SolverSpec};
use crate::csvio::{self, float};
use crate::instance::{self, Instance};
use crate::ValidationError;

pub const REPORT_FILE: &str = "report.csv";
pub const THETAS_FILE: &str = "thetas.csv";

pub const REPORT_HEADER: [&str; 12] = [
    "label",
    "algorithm",
    "step_rule",
    "status",
    "iterations",
    "oracle_calls",
    "f_final",
    "gap_final",
    "elapsed_s",
    "lipschitz",
    "best_f",
    "error",
];

/// How the solvers of one experiment are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// One thread per solver.
    Parallel,
}

pub struct SolverResult {
    pub label: String,
    pub spec: SolverSpec,
    /// Smoothness constant used by short steps.
    pub lipschitz: Option<f64>,
    pub outcome: std::result::Result<RunTrace, String>,
}

pub struct ComparisonReport {
    pub name: String,
    pub description: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub results: Vec<SolverResult>,
    /// θ table per boosted solver that ran.
    pub thetas: Vec<(String, Vec<ThetaRow>)>,
}

impl ComparisonReport {
    pub fn failures(&self) -> impl Iterator<Item = &SolverResult> {
        self.results.iter().filter(|r| r.outcome.is_err())
    }

    pub fn trace(&self, label: &str) -> Option<&RunTrace> {
        self.results
            .iter()
            .find(|r| r.label == label)
            .and_then(|r| r.outcome.as_ref().ok())
    }
}

struct Planned {
    label: String,
    spec: SolverSpec,
    lipschitz: Option<f64>,
    cfg: SolverConfig,
}

fn check_support(alg: Algorithm, region: &dyn Region, label: &str) -> Result<(), ValidationError> {
    let ok = match alg {
        Algorithm::Fw | Algorithm::BoostFw => true,
        Algorithm::Afw => region.supports_away(),
        Algorithm::Dicg | Algorithm::BoostDicg => region.supports_dicg(),
    };
    if ok {
        Ok(())
    } else {
        Err(ValidationError(format!(
            "{label}: {alg} cannot run on {}",
            region.name()
        )))
    }
}

/// Builds every solver configuration, so incompatibilities surface before
/// any solver runs.
fn plan(cfg: &ExperimentConfig, inst: &Instance) -> Result<Vec<Planned>> {
    let mut estimated: Option<f64> = None;
    let mut planned = Vec::with_capacity(cfg.solvers.len());
    for spec in &cfg.solvers {
        let label = spec.label();
        check_support(spec.algorithm, inst.region.as_ref(), &label)?;
        let lipschitz = match spec.step_rule {
            RuleName::Short => Some(match spec.lipschitz.or(inst.objective.smoothness()) {
                Some(l) => l,
                None => match estimated {
                    Some(l) => l,
                    None => {
                        let est = estimate_smoothness(
                            inst.objective.as_ref(),
                            inst.region.as_ref(),
                            cfg.experiment.smoothness_pairs,
                            cfg.experiment.seed,
                            1.0,
                        )
                        .context("estimating the smoothness constant")?;
                        estimated = Some(est.l_hat);
                        est.l_hat
                    }
                },
            }),
            _ => None,
        };
        let rule = spec
            .step_rule
            .rule(lipschitz)
            .expect("short steps always get a constant");
        let mut solver = SolverConfig::new(spec.algorithm, rule).with_budget(spec.budget_iters);
        solver.pursuit = spec
            .algorithm
            .is_boosted()
            .then(|| PursuitConfig::new(spec.delta, spec.max_rounds))
            .transpose()
            .map_err(|e| ValidationError(format!("{label}: {e}")))?;
        solver.budget_wall_seconds = spec.budget_seconds;
        solver.worst_case_adjustment = spec.worst_case_adjustment;
        solver.stop_dual_gap = spec.stop_dual_gap;
        solver.seed = cfg.experiment.seed;
        solver.trace_every = cfg.experiment.trace_every;
        solver
            .validate()
            .map_err(|e| ValidationError(format!("{label}: {e}")))?;
        planned.push(Planned {
            label,
            spec: spec.clone(),
            lipschitz,
            cfg: solver,
        });
    }
    Ok(planned)
}

/// Generates the instance once, runs every solver and writes the CSVs.
///
/// A solver that fails at run time is marked failed in the report while the
/// others proceed; only configuration problems and I/O errors abort.
pub fn run_experiment(cfg: &ExperimentConfig, execution: Execution) -> Result<ComparisonReport> {
    cfg.check()?;
    let inst = instance::build(&cfg.problem, &cfg.region, cfg.experiment.seed)?;
    let planned = plan(cfg, &inst)?;
    let out_dir = cfg.out_dir();
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let run = |p: &Planned| -> std::result::Result<RunTrace, String> {
        solve(inst.objective.as_ref(), inst.region.as_ref(), &p.cfg).map_err(|e| e.to_string())
    };
    let outcomes: Vec<_> = match execution {
        Execution::Sequential => planned.iter().map(run).collect(),
        Execution::Parallel => std::thread::scope(|s| {
            let handles: Vec<_> = planned.iter().map(|p| s.spawn(move || run(p))).collect();
            handles
                .into_iter()
                .map(|h| {
                    h.join()
                        .unwrap_or_else(|_| Err("solver thread panicked".to_string()))
                })
                .collect()
        }),
    };

    let mut results = Vec::with_capacity(planned.len());
    let mut thetas = Vec::new();
    for (p, outcome) in planned.into_iter().zip(outcomes) {
        if let Ok(trace) = &outcome {
            csvio::write_trace(&trace.rows, &out_dir.join(format!("{}.csv", p.label)))?;
            if p.spec.algorithm.is_boosted() {
                csvio::write_rounds(
                    &trace.rounds,
                    &out_dir.join(format!("{}.rounds.csv", p.label)),
                )?;
                thetas.push((
                    p.label.clone(),
                    theta_from_alignments(&alignment_sequences(&trace.rounds)),
                ));
            }
        }
        results.push(SolverResult {
            label: p.label,
            spec: p.spec,
            lipschitz: p.lipschitz,
            outcome,
        });
    }
    let report = ComparisonReport {
        name: cfg.experiment.name.clone(),
        description: inst.description,
        seed: cfg.experiment.seed,
        out_dir,
        results,
        thetas,
    };
    write_report(&report, &report.out_dir.join(REPORT_FILE))?;
    let path = report.out_dir.join(THETAS_FILE);
    let mut file = BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    );
    csvio::write_thetas(&report.thetas, &mut file)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(report)
}

/// One summary row per solver.
pub fn write_report(report: &ComparisonReport, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    w.write_record(REPORT_HEADER)?;
    for r in &report.results {
        let lipschitz = r.lipschitz.map(float).unwrap_or_default();
        let fixed = [
            r.label.clone(),
            r.spec.algorithm.as_str().to_string(),
            r.spec.step_rule.as_str().to_string(),
        ];
        let rest = match &r.outcome {
            Ok(t) => {
                let last = t.last();
                let best = t
                    .rows
                    .iter()
                    .map(|row| row.f_value)
                    .fold(f64::INFINITY, f64::min);
                [
                    t.status.as_str().to_string(),
                    last.iter.to_string(),
                    last.oracle_calls.to_string(),
                    float(last.f_value),
                    float(last.duality_gap),
                    float(last.elapsed_s),
                    lipschitz,
                    float(best),
                    String::new(),
                ]
            }
            Err(e) => [
                "failed".to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                lipschitz,
                String::new(),
                e.clone(),
            ],
        };
        w.write_record(fixed.iter().chain(rest.iter()))?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}
