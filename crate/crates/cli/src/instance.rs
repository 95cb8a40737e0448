//! Builds the objective and feasible region an experiment runs on.

use anyhow::Context;
use boostfw::objectives::generate::{
    completion, logistic_regression, path_quadratic, random_quadratic, sparse_recovery, traffic,
};
use boostfw::objectives::loaders::{parse_labeled_samples, parse_triplets};
use boostfw::objectives::{Beckmann, GenericQuadratic, HuberCompletion, Lifted, Logistic};
use boostfw::regions::{DagFlowRegion, DagNetwork, L1Ball, NuclearBall, ScaledSimplex};
use boostfw::{DenseVector, Objective, Region};

use crate::config::{Problem, RegionSpec};
use crate::ValidationError;

/// Radius of the ℓ1-ball in the logistic experiments.
pub const LOGISTIC_TAU: f64 = 10.0;

/// Completion radius as a multiple of the planted matrix's nuclear norm.
pub const COMPLETION_TAU_FACTOR: f64 = 2.0;

pub struct Instance {
    pub objective: Box<dyn Objective>,
    pub region: Box<dyn Region>,
    /// One-line summary for reports.
    pub description: String,
}

fn read(path: &std::path::Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| ValidationError(format!("cannot read {}: {e}", path.display())).into())
}

/// Generates (or loads) the instance. Generator randomness comes from `seed`.
pub fn build(problem: &Problem, region: &RegionSpec, seed: u64) -> anyhow::Result<Instance> {
    let invalid = |e: boostfw::Error| anyhow::Error::from(ValidationError(e.to_string()));
    Ok(match problem {
        Problem::SparseRecovery(p) => {
            let inst = sparse_recovery(p.m, p.n, p.sparsity, p.sigma, seed).map_err(invalid)?;
            let tau = region.tau.unwrap_or(inst.tau);
            let description = format!(
                "sparse_recovery m={} n={} sparsity={} sigma={} tau={tau}{}",
                p.m,
                p.n,
                p.sparsity,
                p.sigma,
                if p.lifted { " (lifted)" } else { "" }
            );
            if p.lifted {
                Instance {
                    objective: Box::new(Lifted::new(inst.objective)),
                    region: Box::new(ScaledSimplex::new(2 * p.n, tau).map_err(invalid)?),
                    description,
                }
            } else {
                Instance {
                    objective: Box::new(inst.objective),
                    region: Box::new(L1Ball::new(p.n, tau).map_err(invalid)?),
                    description,
                }
            }
        }
        Problem::Logistic(p) => {
            let (objective, source) = match &p.data {
                Some(path) => {
                    let (a, y) = parse_labeled_samples(&read(path)?)
                        .with_context(|| format!("parsing {}", path.display()))
                        .map_err(|e| ValidationError(format!("{e:#}")))?;
                    (
                        Logistic::new(a, y).map_err(invalid)?,
                        path.display().to_string(),
                    )
                }
                None => (
                    logistic_regression(p.m, p.n, p.sparsity, p.sigma, seed).map_err(invalid)?,
                    format!(
                        "m={} n={} sparsity={} sigma={}",
                        p.m, p.n, p.sparsity, p.sigma
                    ),
                ),
            };
            let tau = region.tau.unwrap_or(LOGISTIC_TAU);
            Instance {
                region: Box::new(L1Ball::new(objective.dim(), tau).map_err(invalid)?),
                objective: Box::new(objective),
                description: format!("logistic {source} tau={tau}"),
            }
        }
        Problem::Traffic(p) => {
            let (network, demands, source) = match &p.network {
                Some(path) => {
                    let (n, d) = DagNetwork::parse(&read(path)?).map_err(invalid)?;
                    (n, d, path.display().to_string())
                }
                None => {
                    let inst = traffic(p.layers, p.width, p.drop, seed).map_err(invalid)?;
                    (
                        inst.network,
                        inst.demands,
                        format!("layers={} width={} drop={}", p.layers, p.width, p.drop),
                    )
                }
            };
            if region.tau.is_some() {
                return Err(ValidationError("traffic regions take no tau".into()).into());
            }
            let description = format!(
                "traffic {source}: {} links, {} demands",
                network.num_links(),
                demands.len()
            );
            Instance {
                objective: Box::new(Beckmann::new(&network)),
                region: Box::new(DagFlowRegion::new(network, demands).map_err(invalid)?),
                description,
            }
        }
        Problem::Completion(p) => {
            let (objective, tau, source) = match &p.data {
                Some(path) => {
                    let triplets = parse_triplets(&read(path)?).map_err(invalid)?;
                    let obj =
                        HuberCompletion::new(p.rows, p.cols, p.rho, triplets).map_err(invalid)?;
                    let tau = region.tau.ok_or_else(|| {
                        ValidationError("completion from data needs region.tau".into())
                    })?;
                    (obj, tau, path.display().to_string())
                }
                None => {
                    let inst = completion(
                        p.rows,
                        p.cols,
                        p.rank,
                        p.observed_fraction,
                        p.rho,
                        p.noise,
                        seed,
                    )
                    .map_err(invalid)?;
                    let tau = region
                        .tau
                        .unwrap_or(COMPLETION_TAU_FACTOR * inst.planted_nuclear_norm);
                    (
                        inst.objective,
                        tau,
                        format!("rank={} fraction={}", p.rank, p.observed_fraction),
                    )
                }
            };
            Instance {
                objective: Box::new(objective),
                region: Box::new(NuclearBall::new(p.rows, p.cols, tau).map_err(invalid)?),
                description: format!("completion {}x{} {source} tau={tau}", p.rows, p.cols),
            }
        }
        Problem::PathQuadratic(p) => {
            if region.tau.is_some() {
                return Err(ValidationError("path polytopes take no tau".into()).into());
            }
            let inst = path_quadratic(p.layers, p.width, p.drop, seed).map_err(invalid)?;
            Instance {
                description: format!(
                    "path_quadratic layers={} width={} drop={}: {} links",
                    p.layers,
                    p.width,
                    p.drop,
                    inst.region.dim()
                ),
                objective: Box::new(inst.objective),
                region: Box::new(inst.region),
            }
        }
        Problem::SimplexQuadratic(p) => {
            let objective = random_quadratic(p.n, p.mu, p.b_scale, seed).map_err(invalid)?;
            let tau = region.tau.unwrap_or(1.0);
            Instance {
                objective: Box::new(objective),
                region: Box::new(ScaledSimplex::new(p.n, tau).map_err(invalid)?),
                description: format!(
                    "simplex_quadratic n={} mu={} b_scale={} tau={tau}",
                    p.n, p.mu, p.b_scale
                ),
            }
        }
        Problem::LowerBound(p) => {
            if region.tau.is_some() {
                return Err(ValidationError("the lower-bound problem fixes tau = 1".into()).into());
            }
            Instance {
                objective: Box::new(lower_bound_objective(p.n).map_err(invalid)?),
                region: Box::new(ScaledSimplex::probability(p.n).map_err(invalid)?),
                description: format!("lower_bound n={}", p.n),
            }
        }
    })
}

/// `‖x‖²`, whose minimum over the probability simplex is `1/n`.
pub fn lower_bound_objective(n: usize) -> boostfw::Result<GenericQuadratic> {
    if n == 0 {
        return Err(boostfw::Error::InvalidInput("n must be positive".into()));
    }
    Ok(
        GenericQuadratic::diagonal(DenseVector::new(vec![2.0; n])?, DenseVector::zeros(n), 0.0)?
            .with_known_optimum(1.0 / n as f64),
    )
}
