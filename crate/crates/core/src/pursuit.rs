//! Gradient pursuit: greedy conic approximation of `−∇f` by vertex directions.
//!
//! Starting from `d₀ = 0`, each round chases the residual `r_k = −∇f − d_k`
//! with either a new vertex direction `v_k − anchor` or a shrink of the
//! current estimate, and keeps the move only if it improves the alignment
//! with `−∇f` by at least `δ`. The normalized estimate `g = d_K/Λ` is a
//! feasible direction from the anchor.

use crate::error::{invalid, Error, Result};
use crate::regions::{Region, Vertex};
use crate::vector::DenseVector;

/// Norms at or below this multiple of `‖∇f‖` count as zero when admitting
/// the shrink candidate or judging the first move.
pub const NORM_EPS: f64 = 1e-15;

/// Round cap applied when the caller asks for an unbounded pursuit. Only
/// reachable with a vanishing `δ`; guarantees termination.
pub const UNBOUNDED_ROUND_CAP: usize = 10_000;

/// `⟨d, d̂⟩/(‖d‖‖d̂‖)` clamped to `[−1, 1]`, and `−1` when `d̂ = 0`.
///
/// Only an exactly zero `d̂` counts as zero, so the value is invariant under
/// scaling `d` and `d̂` separately; the pursuit guards against vanishing
/// candidates relative to the gradient itself.
///
/// Returns [`Error::CriticalPoint`] when `d = 0`.
pub fn align(d: &DenseVector, d_hat: &DenseVector) -> Result<f64> {
    if d.dim() != d_hat.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: d_hat.dim(),
        });
    }
    let nd = d.norm();
    if nd <= 0.0 {
        return Err(Error::CriticalPoint);
    }
    let nh = d_hat.norm();
    if nh == 0.0 {
        return Ok(-1.0);
    }
    Ok((d.dot(d_hat) / nd / nh).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PursuitConfig {
    /// Minimum alignment improvement for a round to be kept, in `(0, 1)`.
    pub delta: f64,
    /// Maximum number of rounds; `None` runs until the improvement test fails.
    pub max_rounds: Option<usize>,
}

impl PursuitConfig {
    pub fn new(delta: f64, max_rounds: Option<usize>) -> Result<Self> {
        let cfg = Self { delta, max_rounds };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if self.max_rounds == Some(0) {
            return Err(invalid("max_rounds must be at least 1"));
        }
        Ok(())
    }

    fn round_limit(&self) -> usize {
        self.max_rounds.unwrap_or(UNBOUNDED_ROUND_CAP)
    }
}

impl Default for PursuitConfig {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            max_rounds: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundKind {
    /// Added a vertex direction `v_k − anchor`.
    Forward,
    /// Shrunk the estimate along `−d_k/‖d_k‖`.
    Backward,
}

impl RoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Forward => "forward",
            Self::Backward => "backward",
        }
    }
}

/// One accepted pursuit round.
#[derive(Debug, Clone, PartialEq)]
pub struct PursuitRound {
    /// Zero-based round index.
    pub k: usize,
    pub lambda: f64,
    pub kind: RoundKind,
    /// `align(−∇f, d_{k+1})`.
    pub alignment: f64,
    /// `‖r_k‖` at the start of the round.
    pub residual_norm: f64,
    /// `1 − λ_k/‖d_k‖` for backward rounds.
    pub backward_factor: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PursuitOutcome {
    /// `g = d_{K_t}/Λ`.
    pub direction: DenseVector,
    /// Λ, the coefficient mass of the conic decomposition.
    pub scale: f64,
    /// K_t, the number of accepted rounds.
    pub rounds: usize,
    /// Set when the round cap, not the improvement test, ended the pursuit.
    pub truncated_by_k: bool,
    /// `align(−∇f, g)`.
    pub alignment_final: f64,
    pub trace: Vec<PursuitRound>,
    /// `‖−∇f − d_{K_t}‖`.
    pub final_residual_norm: f64,
    /// Oracle calls made, including the call of a rejected trial round.
    pub oracle_calls: usize,
    /// Whether a trial round was evaluated and rejected.
    pub rejected_trial: bool,
    /// The first vertex `v₀`, a minimizer of `⟨∇f, ·⟩`.
    pub first_vertex: Vertex,
    /// Set when `λ₀ = 0` and the plain vertex direction was returned instead.
    pub degenerate: bool,
}

impl PursuitOutcome {
    /// Alignments after each accepted round, `align(−∇f, d_k)` for `k = 1..=K_t`.
    pub fn alignments(&self) -> Vec<f64> {
        self.trace.iter().map(|r| r.alignment).collect()
    }

    /// Λ recomputed from the round trace, for bookkeeping checks.
    pub fn recomputed_scale(&self) -> f64 {
        if self.degenerate {
            return 1.0;
        }
        let mut scale = 0.0;
        for r in &self.trace {
            match r.kind {
                RoundKind::Forward => scale += r.lambda,
                RoundKind::Backward => scale *= r.backward_factor.unwrap_or(f64::NAN),
            }
        }
        scale
    }
}

/// Runs the pursuit from `anchor`, chasing `neg_gradient`.
///
/// The anchor is the iterate for the boosted Frank-Wolfe step and the away
/// vertex for the boosted pairwise step.
pub fn gradient_pursuit(
    neg_gradient: &DenseVector,
    anchor: &DenseVector,
    region: &dyn Region,
    cfg: &PursuitConfig,
) -> Result<PursuitOutcome> {
    cfg.validate()?;
    if neg_gradient.dim() != region.dim() || anchor.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            found: if neg_gradient.dim() != region.dim() {
                neg_gradient.dim()
            } else {
                anchor.dim()
            },
        });
    }
    let grad_norm = neg_gradient.norm();
    if grad_norm <= 0.0 {
        return Err(Error::CriticalPoint);
    }
    let limit = cfg.round_limit();

    let mut d = DenseVector::zeros(anchor.dim());
    let mut current_align = -1.0;
    let mut scale = 0.0;
    let mut trace: Vec<PursuitRound> = Vec::new();
    let mut oracle_calls = 0;
    let mut rejected_trial = false;
    let mut stopped_by_test = false;
    let mut first: Option<(Vertex, DenseVector)> = None;

    for k in 0..limit {
        // No move can be accepted once the alignment is within δ of 1.
        if k > 0 && 1.0 - current_align < cfg.delta {
            stopped_by_test = true;
            break;
        }
        let residual = neg_gradient.sub(&d);
        let residual_norm = residual.norm();
        let v = region.lmo(&residual.neg())?;
        oracle_calls += 1;
        let forward = v.minus(anchor);
        let forward_score = residual.dot(&forward);

        if k == 0 {
            let fnorm_sq = forward.norm_sq();
            let lambda = if fnorm_sq > 0.0 {
                forward_score / fnorm_sq
            } else {
                0.0
            };
            // A first move that is zero relative to the gradient (the FW gap
            // is at rounding level) is as uninformative as λ₀ = 0.
            if !(lambda > 0.0) || lambda * fnorm_sq.sqrt() <= NORM_EPS * grad_norm {
                return degenerate_outcome(neg_gradient, v, forward, residual_norm);
            }
            first = Some((v, forward.clone()));
        }

        let d_norm = d.norm();
        let backward = (d_norm > NORM_EPS * grad_norm).then(|| d.scaled(-1.0 / d_norm));
        let backward_score = backward.as_ref().map(|b| residual.dot(b));
        let use_backward = backward_score.is_some_and(|s| s > forward_score);

        let (kind, lambda, candidate, factor) = if use_backward {
            let lambda = backward_score.unwrap_or(0.0); // ‖u‖ = 1
            let factor = 1.0 - lambda / d_norm;
            (RoundKind::Backward, lambda, d.scaled(factor), Some(factor))
        } else {
            let fnorm_sq = forward.norm_sq();
            let lambda = if fnorm_sq > 0.0 {
                forward_score / fnorm_sq
            } else {
                0.0
            };
            let mut next = d.clone();
            next.axpy(lambda, &forward);
            (RoundKind::Forward, lambda, next, None)
        };

        let candidate_align = align(neg_gradient, &candidate)?;
        if candidate_align - current_align < cfg.delta {
            rejected_trial = true;
            stopped_by_test = true;
            break;
        }
        if let Some(f) = factor {
            if f < 0.5 - 1e-9 {
                return Err(Error::Invariant(format!(
                    "backward factor {f} fell below 1/2"
                )));
            }
            scale *= f;
        } else {
            scale += lambda;
        }
        d = candidate;
        current_align = candidate_align;
        trace.push(PursuitRound {
            k,
            lambda,
            kind,
            alignment: candidate_align,
            residual_norm,
            backward_factor: factor,
        });
    }

    let rounds = trace.len();
    let (first_vertex, first_direction) =
        first.ok_or_else(|| Error::Invariant("pursuit ended before its first round".into()))?;
    if !(scale > 0.0) {
        return Err(Error::Invariant(format!(
            "pursuit scale must be positive, got {scale}"
        )));
    }
    // A single forward round normalizes back to the vertex direction; use it
    // verbatim so one-round pursuits coincide with the plain step.
    let direction = if rounds == 1 {
        first_direction
    } else {
        d.scaled(1.0 / scale)
    };
    let alignment_final = align(neg_gradient, &direction)?;
    Ok(PursuitOutcome {
        final_residual_norm: neg_gradient.sub(&d).norm(),
        direction,
        scale,
        rounds,
        truncated_by_k: !stopped_by_test,
        alignment_final,
        trace,
        oracle_calls,
        rejected_trial,
        first_vertex,
        degenerate: false,
    })
}

fn degenerate_outcome(
    neg_gradient: &DenseVector,
    v: Vertex,
    forward: DenseVector,
    residual_norm: f64,
) -> Result<PursuitOutcome> {
    let alignment_final = align(neg_gradient, &forward)?;
    Ok(PursuitOutcome {
        trace: vec![PursuitRound {
            k: 0,
            lambda: 0.0,
            kind: RoundKind::Forward,
            alignment: alignment_final,
            residual_norm,
            backward_factor: None,
        }],
        direction: forward,
        scale: 1.0,
        rounds: 1,
        truncated_by_k: false,
        alignment_final,
        final_residual_norm: residual_norm,
        oracle_calls: 1,
        rejected_trial: false,
        first_vertex: v,
        degenerate: true,
    })
}

/// Mean and population standard deviation of the relative alignment
/// improvement `θ_k = (a_k − a_{k−1})/a_{k−1}` at round `k` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRow {
    pub k: usize,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
    /// Samples skipped because `a_{k−1} ≤ 0`.
    pub excluded: usize,
}

/// θ statistics over per-pursuit alignment sequences `(a₁, …, a_{K_t})`.
///
/// A row is produced for each `k ≥ 2` reached by at least one sequence with a
/// usable sample; the standard deviation uses the population convention.
pub fn theta_from_alignments(sequences: &[Vec<f64>]) -> Vec<ThetaRow> {
    let max_len = sequences.iter().map(Vec::len).max().unwrap_or(0);
    let mut rows = Vec::new();
    for k in 2..=max_len {
        let mut samples = Vec::new();
        let mut excluded = 0;
        for seq in sequences.iter().filter(|s| s.len() >= k) {
            let prev = seq[k - 2];
            if prev <= 0.0 {
                excluded += 1;
            } else {
                samples.push((seq[k - 1] - prev) / prev);
            }
        }
        if samples.is_empty() {
            continue;
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
        rows.push(ThetaRow {
            k,
            mean,
            std: var.sqrt(),
            count: samples.len(),
            excluded,
        });
    }
    rows
}

/// θ statistics over pursuit outcomes; see [`theta_from_alignments`].
pub fn theta_statistics(outcomes: &[PursuitOutcome]) -> Vec<ThetaRow> {
    let seqs: Vec<Vec<f64>> = outcomes.iter().map(PursuitOutcome::alignments).collect();
    theta_from_alignments(&seqs)
}
