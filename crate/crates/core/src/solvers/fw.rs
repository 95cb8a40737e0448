use super::{fw_gap, StepContext, StepInfo, StepOutcome, StepType, Stepper};
use crate::error::Result;
use crate::pursuit::gradient_pursuit;
use crate::vector::DenseVector;

fn stationary(gap: f64, oracle_calls: usize) -> StepOutcome {
    StepOutcome {
        next: None,
        gap,
        oracle_calls,
        info: StepInfo {
            gamma: 0.0,
            k_t: 0,
            step_type: StepType::Fw,
            eta: 0.0,
        },
        pursuit: None,
    }
}

/// `x_{t+1} = x_t + γ_t (v_t − x_t)` with `v_t = lmo(∇f(x_t))`.
pub(crate) struct Plain;

impl Stepper for Plain {
    fn step(
        &mut self,
        ctx: &StepContext<'_>,
        x: &DenseVector,
        gradient: &DenseVector,
    ) -> Result<StepOutcome> {
        let v = ctx.region.lmo(gradient)?;
        let gap = fw_gap(gradient, x, &v);
        let dir = v.minus(x);
        if gap <= 0.0 || dir.norm_sq() == 0.0 {
            return Ok(stationary(gap, 1));
        }
        let gamma = ctx.gamma(x, gradient, &dir, 1.0)?;
        Ok(StepOutcome {
            next: Some(x.moved(gamma, &dir)),
            gap,
            oracle_calls: 1,
            info: StepInfo {
                gamma,
                k_t: 1,
                step_type: StepType::Fw,
                eta: ctx.eta(gradient, &dir)?,
            },
            pursuit: None,
        })
    }
}

/// `x_{t+1} = x_t + γ_t g_t` with `g_t` from gradient pursuit anchored at `x_t`.
pub(crate) struct Boosted;

impl Stepper for Boosted {
    fn step(
        &mut self,
        ctx: &StepContext<'_>,
        x: &DenseVector,
        gradient: &DenseVector,
    ) -> Result<StepOutcome> {
        let pursuit_cfg = ctx.cfg.pursuit.unwrap_or_default();
        let outcome = gradient_pursuit(&gradient.neg(), x, ctx.region, &pursuit_cfg)?;
        let gap = fw_gap(gradient, x, &outcome.first_vertex);
        let dir = &outcome.direction;
        if gap <= 0.0 || dir.norm_sq() == 0.0 {
            return Ok(stationary(gap, outcome.oracle_calls));
        }
        let gamma = ctx.gamma(x, gradient, dir, 1.0)?;
        let k_t = outcome.rounds;
        let (next, gamma, step_type) = if ctx.cfg.worst_case_adjustment && gamma >= 1.0 {
            let fw_dir = outcome.first_vertex.minus(x);
            let g = ctx.gamma(x, gradient, &fw_dir, 1.0)?;
            (x.moved(g, &fw_dir), g, StepType::AdjustedFw)
        } else {
            let kind = if k_t > 1 {
                StepType::Boost
            } else {
                StepType::Fw
            };
            (x.moved(gamma, dir), gamma, kind)
        };
        Ok(StepOutcome {
            next: Some(next),
            gap,
            oracle_calls: outcome.oracle_calls,
            info: StepInfo {
                gamma,
                k_t,
                step_type,
                eta: outcome.alignment_final,
            },
            pursuit: Some(outcome),
        })
    }
}
