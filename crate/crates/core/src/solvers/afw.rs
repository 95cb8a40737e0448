use super::{fw_gap, StepContext, StepInfo, StepOutcome, StepType, Stepper, DROP_TOL};
use crate::error::Result;
use crate::regions::{away_vertex, ActiveSet, Vertex};
use crate::vector::DenseVector;

/// Away-step Frank-Wolfe over an explicit active set.
#[derive(Default)]
pub(crate) struct AwayStep {
    active: ActiveSet,
}

impl Stepper for AwayStep {
    fn init(&mut self, start: &Vertex) {
        self.active = ActiveSet::singleton(start.clone());
    }

    fn step(
        &mut self,
        ctx: &StepContext<'_>,
        x: &DenseVector,
        gradient: &DenseVector,
    ) -> Result<StepOutcome> {
        let v = ctx.region.lmo(gradient)?;
        let gap = fw_gap(gradient, x, &v);
        let (away, gamma_max) = away_vertex(&self.active, gradient)?;
        let away_gap = away.dot(gradient) - gradient.dot(x);
        let fw_dir = v.minus(x);
        if gap <= 0.0 || fw_dir.norm_sq() == 0.0 {
            return Ok(StepOutcome {
                next: None,
                gap,
                oracle_calls: 1,
                info: StepInfo {
                    gamma: 0.0,
                    k_t: 0,
                    step_type: StepType::Fw,
                    eta: 0.0,
                },
                pursuit: None,
            });
        }

        let (dir, gamma, step_type) = if gap >= away_gap || gamma_max.is_infinite() {
            let gamma = ctx.gamma(x, gradient, &fw_dir, 1.0)?;
            self.active.apply_fw_step(&v, gamma);
            (fw_dir, gamma, StepType::Fw)
        } else {
            let dir = x.sub(&away.point());
            let gamma = ctx.gamma(x, gradient, &dir, gamma_max)?;
            let drop = (gamma_max - gamma).abs() <= DROP_TOL;
            self.active.apply_away_step(away.key(), gamma, drop);
            let kind = if drop { StepType::Drop } else { StepType::Away };
            (dir, gamma, kind)
        };
        Ok(StepOutcome {
            next: Some(x.moved(gamma, &dir)),
            gap,
            oracle_calls: 1,
            info: StepInfo {
                gamma,
                k_t: 1,
                step_type,
                eta: ctx.eta(gradient, &dir)?,
            },
            pursuit: None,
        })
    }

    fn check(&self, x: &DenseVector) -> Result<()> {
        self.active.check(x, 1e-9, 1e-8)
    }
}
