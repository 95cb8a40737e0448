use super::{fw_gap, StepContext, StepInfo, StepOutcome, StepType, Stepper, NEG_DIR_TOL};
use crate::error::{Error, Result};
use crate::pursuit::gradient_pursuit;
use crate::vector::DenseVector;

/// Largest `γ ∈ [0, 1]` with `x + γ d ≥ 0`.
pub fn max_feasible_step(x: &DenseVector, dir: &DenseVector) -> f64 {
    x.iter()
        .zip(dir.iter())
        .filter(|(_, &d)| d < -NEG_DIR_TOL)
        .map(|(&xi, &d)| xi.max(0.0) / -d)
        .fold(1.0, f64::min)
}

/// Decomposition-invariant pairwise steps, optionally with the pursuit
/// direction anchored at the away vertex.
pub(crate) struct Pairwise {
    pub boosted: bool,
}

impl Stepper for Pairwise {
    fn step(
        &mut self,
        ctx: &StepContext<'_>,
        x: &DenseVector,
        gradient: &DenseVector,
    ) -> Result<StepOutcome> {
        let (dir, gap, oracle_calls, k_t, eta, pursuit) = if self.boosted {
            let away = ctx.region.dicg_away_vertex(x, gradient)?;
            let anchor = away.into_point();
            let cfg = ctx.cfg.pursuit.unwrap_or_default();
            let outcome = gradient_pursuit(&gradient.neg(), &anchor, ctx.region, &cfg)?;
            let gap = fw_gap(gradient, x, &outcome.first_vertex);
            (
                outcome.direction.clone(),
                gap,
                1 + outcome.oracle_calls,
                outcome.rounds,
                outcome.alignment_final,
                Some(outcome),
            )
        } else {
            let v = ctx.region.lmo(gradient)?;
            let away = ctx.region.dicg_away_vertex(x, gradient)?;
            let gap = fw_gap(gradient, x, &v);
            let dir = v.minus(&away.point());
            let eta = if dir.norm_sq() > 0.0 {
                ctx.eta(gradient, &dir)?
            } else {
                0.0
            };
            (dir, gap, 2, 1, eta, None)
        };

        let stationary = gap <= 0.0 || dir.norm_sq() == 0.0 || gradient.dot(&dir) >= 0.0;
        if stationary {
            return Ok(StepOutcome {
                next: None,
                gap,
                oracle_calls,
                info: StepInfo {
                    gamma: 0.0,
                    k_t: 0,
                    step_type: StepType::Pairwise,
                    eta: 0.0,
                },
                pursuit,
            });
        }
        let cap = max_feasible_step(x, &dir);
        if !(cap > 0.0) {
            return Err(Error::Infeasible(format!(
                "pairwise direction admits no positive step at iteration {}",
                ctx.t
            )));
        }
        let gamma = ctx.gamma(x, gradient, &dir, cap)?;
        let next = x.moved(gamma, &dir);
        if self.boosted && next.min_entry() < -1e-12 {
            return Err(Error::Invariant(format!(
                "boosted pairwise step left the nonnegative orthant (min entry {:e})",
                next.min_entry()
            )));
        }
        Ok(StepOutcome {
            next: Some(next),
            gap,
            oracle_calls,
            info: StepInfo {
                gamma,
                k_t,
                step_type: if k_t > 1 {
                    StepType::Boost
                } else {
                    StepType::Pairwise
                },
                eta,
            },
            pursuit,
        })
    }
}
