use crate::pursuit::{PursuitOutcome, RoundKind};
use crate::vector::DenseVector;

use super::Algorithm;

/// How the iterate of a trace row was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepType {
    /// The starting vertex; no step taken yet.
    Start,
    Fw,
    Boost,
    Away,
    Drop,
    Pairwise,
    AdjustedFw,
}

impl StepType {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Start => "start",
            Self::Fw => "fw",
            Self::Boost => "boost",
            Self::Away => "away",
            Self::Drop => "drop",
            Self::Pairwise => "pairwise",
            Self::AdjustedFw => "adjusted_fw",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "start" => Self::Start,
            "fw" => Self::Fw,
            "boost" => Self::Boost,
            "away" => Self::Away,
            "drop" => Self::Drop,
            "pairwise" => Self::Pairwise,
            "adjusted_fw" => Self::AdjustedFw,
            _ => return None,
        })
    }
}

/// State `x_t` together with the step that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    /// Oracle calls spent to reach `x_t`, including the start vertex.
    pub oracle_calls: usize,
    /// Solver time to reach `x_t`, excluding metric evaluation.
    pub elapsed_s: f64,
    pub f_value: f64,
    /// `⟨∇f(x_t), x_t − v⟩` with `v` a minimizer of `⟨∇f(x_t), ·⟩`.
    pub duality_gap: f64,
    pub gamma: f64,
    pub k_t: usize,
    pub step_type: StepType,
    /// Alignment of the step direction with `−∇f(x_{t−1})`.
    pub eta: f64,
}

/// One accepted pursuit round, tagged with its solver iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub iter: usize,
    pub round: usize,
    pub lambda: f64,
    pub kind: RoundKind,
    pub alignment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// The iteration budget was exhausted.
    BudgetIters,
    /// The wall-clock budget was exhausted.
    BudgetTime,
    /// The duality gap fell below the requested threshold.
    DualGap,
    /// A stationary point was reached (zero gradient or zero gap).
    Optimal,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::BudgetIters => "budget_iters",
            Self::BudgetTime => "budget_time",
            Self::DualGap => "dual_gap",
            Self::Optimal => "optimal",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub rows: Vec<TraceRow>,
    pub rounds: Vec<RoundRecord>,
    pub final_x: DenseVector,
    pub status: Status,
    /// Every iterate `x_0, x_1, …` when requested in the configuration.
    pub iterates: Option<Vec<DenseVector>>,
    /// Pursuit outcomes per iteration when requested.
    pub pursuits: Option<Vec<PursuitOutcome>>,
}

impl RunTrace {
    pub fn last(&self) -> &TraceRow {
        self.rows
            .last()
            .expect("a trace always holds the start row")
    }

    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.last().iter
    }

    /// `N_t = #{s < t : γ_s < 1, K_s > 1}` for every row.
    pub fn boosted_step_counts(&self) -> Vec<usize> {
        let mut n = 0;
        self.rows
            .iter()
            .map(|r| {
                if r.iter > 0 && r.gamma < 1.0 && r.k_t > 1 {
                    n += 1;
                }
                n
            })
            .collect()
    }

    /// Alignment sequences of all recorded pursuits, for θ statistics.
    pub fn alignment_sequences(&self) -> Vec<Vec<f64>> {
        alignment_sequences(&self.rounds)
    }
}

/// Groups round records by solver iteration into alignment sequences, in
/// record order.
pub fn alignment_sequences(rounds: &[RoundRecord]) -> Vec<Vec<f64>> {
    let mut seqs: Vec<Vec<f64>> = Vec::new();
    let mut current: Option<usize> = None;
    for r in rounds {
        if current != Some(r.iter) {
            seqs.push(Vec::new());
            current = Some(r.iter);
        }
        if let Some(s) = seqs.last_mut() {
            s.push(r.alignment);
        }
    }
    seqs
}
