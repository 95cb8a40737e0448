//! Frank-Wolfe style solvers sharing one driver loop and trace format.
//!
//! Every solver starts from the vertex `lmo(∇f(y))` (one oracle call) and
//! records one [`TraceRow`] per iterate. The duality gap of row `t` reuses
//! the oracle call that the step from `x_t` makes anyway; only the final row
//! needs an extra, uncounted call.

use std::time::{Duration, Instant};

use crate::error::{invalid, Error, Result};
use crate::objective::Objective;
use crate::pursuit::{align, PursuitConfig, PursuitOutcome};
use crate::regions::{Region, Vertex};
use crate::vector::DenseVector;

mod afw;
mod dicg;
mod fw;
mod step;
mod trace;

pub use step::{step_size, StepQuery, StepRule, GOLDEN_MAX_ITERS, GOLDEN_TOL};
pub use trace::{alignment_sequences, RoundRecord, RunTrace, Status, StepType, TraceRow};

/// Gradients with norm below this are treated as zero.
pub const GRAD_EPS: f64 = 1e-14;

/// Away steps within this distance of `γ_max` are drop steps.
pub const DROP_TOL: f64 = 1e-12;

/// Relative size of `⟨−∇f, d⟩` treated as zero when sizing a step.
pub const ROUNDING_SLOPE: f64 = 1e-12;

/// Direction entries below `−NEG_DIR_TOL` limit the pairwise step length.
pub const NEG_DIR_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Fw,
    BoostFw,
    Afw,
    Dicg,
    BoostDicg,
}

impl Algorithm {
    pub const ALL: [Self; 5] = [
        Self::Fw,
        Self::BoostFw,
        Self::Afw,
        Self::Dicg,
        Self::BoostDicg,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Fw => "fw",
            Self::BoostFw => "boostfw",
            Self::Afw => "afw",
            Self::Dicg => "dicg",
            Self::BoostDicg => "boostdicg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.as_str() == s)
    }

    pub fn is_boosted(&self) -> bool {
        matches!(self, Self::BoostFw | Self::BoostDicg)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub step_rule: StepRule,
    /// Required by the boosted variants, rejected by the others.
    pub pursuit: Option<PursuitConfig>,
    /// Maximum number of steps; at least 1.
    pub budget_iters: usize,
    pub budget_wall_seconds: Option<f64>,
    /// Replace full-length boosted steps by plain Frank-Wolfe steps.
    pub worst_case_adjustment: bool,
    /// Recorded in the trace; solvers themselves are deterministic.
    pub seed: u64,
    pub stop_dual_gap: Option<f64>,
    /// The point `y` whose gradient selects the start vertex; zero by default.
    pub start: Option<DenseVector>,
    /// Record every `trace_every`-th row (the last row is always recorded).
    pub trace_every: usize,
    pub record_iterates: bool,
    pub record_pursuits: bool,
    /// Check feasibility and active-set invariants after every step.
    pub check_invariants: bool,
}

impl SolverConfig {
    /// A configuration with default budgets; boosted variants get the
    /// default pursuit settings.
    pub fn new(algorithm: Algorithm, step_rule: StepRule) -> Self {
        Self {
            algorithm,
            step_rule,
            pursuit: algorithm.is_boosted().then(PursuitConfig::default),
            budget_iters: 1000,
            budget_wall_seconds: None,
            worst_case_adjustment: false,
            seed: 0,
            stop_dual_gap: None,
            start: None,
            trace_every: 1,
            record_iterates: false,
            record_pursuits: false,
            check_invariants: true,
        }
    }

    pub fn with_budget(mut self, iters: usize) -> Self {
        self.budget_iters = iters;
        self
    }

    pub fn with_pursuit(mut self, pursuit: PursuitConfig) -> Self {
        self.pursuit = Some(pursuit);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget_iters == 0 {
            return Err(invalid("budget_iters must be at least 1"));
        }
        if self.trace_every == 0 {
            return Err(invalid("trace_every must be at least 1"));
        }
        if let Some(s) = self.budget_wall_seconds {
            if !(s > 0.0) {
                return Err(invalid("budget_wall_seconds must be positive"));
            }
        }
        self.step_rule.validate()?;
        match (&self.pursuit, self.algorithm.is_boosted()) {
            (Some(p), true) => p.validate()?,
            (None, true) => {
                return Err(invalid(format!(
                    "{} needs a pursuit configuration",
                    self.algorithm
                )))
            }
            (Some(_), false) => {
                return Err(invalid(format!(
                    "{} takes no pursuit configuration",
                    self.algorithm
                )))
            }
            (None, false) => {}
        }
        if self.worst_case_adjustment && self.algorithm != Algorithm::BoostFw {
            return Err(invalid("worst_case_adjustment applies to boostfw only"));
        }
        Ok(())
    }
}

/// `⟨∇f(x), x − lmo(∇f(x))⟩`, costing one oracle call.
pub fn duality_gap(gradient: &DenseVector, x: &DenseVector, region: &dyn Region) -> Result<f64> {
    let v = region.lmo(gradient)?;
    Ok(fw_gap(gradient, x, &v))
}

pub(crate) fn fw_gap(gradient: &DenseVector, x: &DenseVector, v: &Vertex) -> f64 {
    gradient.dot(x) - v.dot(gradient)
}

/// Runs the configured algorithm.
pub fn solve(obj: &dyn Objective, region: &dyn Region, cfg: &SolverConfig) -> Result<RunTrace> {
    cfg.validate()?;
    if obj.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            found: obj.dim(),
        });
    }
    match cfg.algorithm {
        Algorithm::Fw => drive(obj, region, cfg, &mut fw::Plain),
        Algorithm::BoostFw => drive(obj, region, cfg, &mut fw::Boosted),
        Algorithm::Afw => {
            if !region.supports_away() {
                return Err(Error::Unsupported(format!(
                    "{} has no finite vertex keys for an active set",
                    region.name()
                )));
            }
            drive(obj, region, cfg, &mut afw::AwayStep::default())
        }
        Algorithm::Dicg | Algorithm::BoostDicg => {
            if !region.supports_dicg() {
                return Err(Error::Unsupported(format!(
                    "{} does not support the decomposition-invariant away oracle",
                    region.name()
                )));
            }
            drive(
                obj,
                region,
                cfg,
                &mut dicg::Pairwise {
                    boosted: cfg.algorithm == Algorithm::BoostDicg,
                },
            )
        }
    }
}

pub fn run_fw(obj: &dyn Objective, region: &dyn Region, cfg: &SolverConfig) -> Result<RunTrace> {
    solve_as(Algorithm::Fw, obj, region, cfg)
}

pub fn run_boostfw(
    obj: &dyn Objective,
    region: &dyn Region,
    cfg: &SolverConfig,
) -> Result<RunTrace> {
    solve_as(Algorithm::BoostFw, obj, region, cfg)
}

pub fn run_afw(obj: &dyn Objective, region: &dyn Region, cfg: &SolverConfig) -> Result<RunTrace> {
    solve_as(Algorithm::Afw, obj, region, cfg)
}

pub fn run_dicg(obj: &dyn Objective, region: &dyn Region, cfg: &SolverConfig) -> Result<RunTrace> {
    solve_as(Algorithm::Dicg, obj, region, cfg)
}

pub fn run_boostdicg(
    obj: &dyn Objective,
    region: &dyn Region,
    cfg: &SolverConfig,
) -> Result<RunTrace> {
    solve_as(Algorithm::BoostDicg, obj, region, cfg)
}

fn solve_as(
    algorithm: Algorithm,
    obj: &dyn Objective,
    region: &dyn Region,
    cfg: &SolverConfig,
) -> Result<RunTrace> {
    if cfg.algorithm != algorithm {
        return Err(invalid(format!(
            "configuration is for {}, not {algorithm}",
            cfg.algorithm
        )));
    }
    solve(obj, region, cfg)
}

/// What a step reports back to the driver.
pub(crate) struct StepOutcome {
    /// `None` when `x` was found stationary and no step is taken.
    pub next: Option<DenseVector>,
    /// Duality gap at the current iterate.
    pub gap: f64,
    pub oracle_calls: usize,
    pub info: StepInfo,
    pub pursuit: Option<PursuitOutcome>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepInfo {
    pub gamma: f64,
    pub k_t: usize,
    pub step_type: StepType,
    pub eta: f64,
}

impl StepInfo {
    fn start() -> Self {
        Self {
            gamma: 0.0,
            k_t: 0,
            step_type: StepType::Start,
            eta: 0.0,
        }
    }
}

/// Shared state handed to each step.
pub(crate) struct StepContext<'a> {
    pub obj: &'a dyn Objective,
    pub region: &'a dyn Region,
    pub cfg: &'a SolverConfig,
    pub t: usize,
}

impl StepContext<'_> {
    /// Step size along `dir` from `x`, within `[0, upper]`.
    pub fn gamma(
        &self,
        x: &DenseVector,
        gradient: &DenseVector,
        dir: &DenseVector,
        upper: f64,
    ) -> Result<f64> {
        let neg_grad_dot_dir = -gradient.dot(dir);
        // At a stationary point the descent slope is pure rounding noise.
        if neg_grad_dot_dir <= 0.0
            && -neg_grad_dot_dir <= ROUNDING_SLOPE * gradient.norm() * dir.norm()
        {
            return Ok(0.0);
        }
        let curvature = match self.cfg.step_rule {
            StepRule::ExactQuadratic | StepRule::LineSearch { .. } => {
                self.obj.directional_curvature(dir)
            }
            _ => None,
        };
        let f_along = |g: f64| self.obj.value(&x.moved(g, dir));
        step_size(
            &self.cfg.step_rule,
            &StepQuery {
                t: self.t,
                neg_grad_dot_dir,
                dir_norm_sq: dir.norm_sq(),
                upper,
                curvature,
                f_along: Some(&f_along),
            },
        )
    }

    /// `align(−∇f, dir)`.
    pub fn eta(&self, gradient: &DenseVector, dir: &DenseVector) -> Result<f64> {
        align(&gradient.neg(), dir)
    }
}

pub(crate) trait Stepper {
    /// Called once with the start vertex.
    fn init(&mut self, _start: &Vertex) {}

    fn step(
        &mut self,
        ctx: &StepContext<'_>,
        x: &DenseVector,
        gradient: &DenseVector,
    ) -> Result<StepOutcome>;

    /// Extra checks after `x_next` has been accepted.
    fn check(&self, _x: &DenseVector) -> Result<()> {
        Ok(())
    }
}

fn drive(
    obj: &dyn Objective,
    region: &dyn Region,
    cfg: &SolverConfig,
    stepper: &mut dyn Stepper,
) -> Result<RunTrace> {
    let clock = Instant::now();
    let mut metric_time = Duration::ZERO;
    let solver_elapsed = |metric_time: Duration| (clock.elapsed() - metric_time).as_secs_f64();

    let y = match &cfg.start {
        Some(y) if y.dim() != region.dim() => {
            return Err(Error::DimensionMismatch {
                expected: region.dim(),
                found: y.dim(),
            })
        }
        Some(y) => y.clone(),
        None => DenseVector::zeros(region.dim()),
    };
    let start = region.lmo(&obj.gradient(&y)?)?;
    stepper.init(&start);
    let mut x = start.into_point();
    let mut calls = 1;
    let mut info = StepInfo::start();

    let mut rows = Vec::new();
    let mut rounds = Vec::new();
    let mut iterates = cfg.record_iterates.then(Vec::new);
    let mut pursuits = cfg.record_pursuits.then(Vec::new);
    let status;

    let mut t = 0;
    loop {
        if let Some(it) = iterates.as_mut() {
            it.push(x.clone());
        }
        let (f_value, gradient) = obj.value_and_gradient(&x)?;
        if !f_value.is_finite() || !gradient.is_finite() {
            return Err(Error::NonFinite(format!("objective at iteration {t}")));
        }
        let elapsed_s = solver_elapsed(metric_time);
        let row = |gap: f64, info: &StepInfo| TraceRow {
            iter: t,
            oracle_calls: calls,
            elapsed_s,
            f_value,
            duality_gap: gap,
            gamma: info.gamma,
            k_t: info.k_t,
            step_type: info.step_type,
            eta: info.eta,
        };
        let final_row = |metric_time: &mut Duration, info: &StepInfo| -> Result<TraceRow> {
            let m = Instant::now();
            let gap = duality_gap(&gradient, &x, region)?;
            *metric_time += m.elapsed();
            Ok(row(gap, info))
        };

        if gradient.norm() < GRAD_EPS {
            rows.push(final_row(&mut metric_time, &info)?);
            status = Status::Optimal;
            break;
        }
        if t >= cfg.budget_iters {
            rows.push(final_row(&mut metric_time, &info)?);
            status = Status::BudgetIters;
            break;
        }
        if cfg
            .budget_wall_seconds
            .is_some_and(|limit| solver_elapsed(metric_time) >= limit)
        {
            rows.push(final_row(&mut metric_time, &info)?);
            status = Status::BudgetTime;
            break;
        }

        let ctx = StepContext {
            obj,
            region,
            cfg,
            t,
        };
        let out = stepper.step(&ctx, &x, &gradient)?;
        let this_row = row(out.gap, &info);
        let stop_gap = cfg.stop_dual_gap.is_some_and(|thr| out.gap <= thr);
        // A zero step leaves x unchanged: no descent direction is left.
        let stalled = out.info.gamma == 0.0;
        let Some(next) = out.next.filter(|_| !stop_gap && !stalled) else {
            rows.push(this_row);
            status = if stop_gap {
                Status::DualGap
            } else {
                Status::Optimal
            };
            break;
        };
        if t % cfg.trace_every == 0 {
            rows.push(this_row);
        }

        if let Some(p) = &out.pursuit {
            rounds.extend(p.trace.iter().map(|r| RoundRecord {
                iter: t,
                round: r.k,
                lambda: r.lambda,
                kind: r.kind,
                alignment: r.alignment,
            }));
        }
        if let (Some(all), Some(p)) = (pursuits.as_mut(), out.pursuit) {
            all.push(p);
        }
        if !next.is_finite() {
            return Err(Error::NonFinite(format!("iterate after step {t}")));
        }
        if cfg.check_invariants {
            if !region.contains(&next, 1e-9) {
                return Err(Error::Invariant(format!(
                    "iterate {} left the feasible region",
                    t + 1
                )));
            }
            stepper.check(&next)?;
        }
        x = next;
        calls += out.oracle_calls;
        info = out.info;
        t += 1;
    }

    Ok(RunTrace {
        algorithm: cfg.algorithm,
        seed: cfg.seed,
        rows,
        rounds,
        final_x: x,
        status,
        iterates,
        pursuits,
    })
}
