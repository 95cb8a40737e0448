use crate::error::{invalid, Error, Result};

/// Step-size strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// `γ_t = 2/(t+2)`.
    Agnostic,
    /// Minimizer of the quadratic upper bound with smoothness constant `lipschitz`.
    Short { lipschitz: f64 },
    /// Closed-form minimizer for objectives with constant Hessian.
    ExactQuadratic,
    /// Golden-section search on the step interval.
    Golden { tol: f64, max_iters: usize },
    /// Exact when the objective declares quadratic structure, golden otherwise.
    LineSearch { tol: f64, max_iters: usize },
}

pub const GOLDEN_TOL: f64 = 1e-10;
pub const GOLDEN_MAX_ITERS: usize = 200;

impl StepRule {
    pub fn short(lipschitz: f64) -> Self {
        Self::Short { lipschitz }
    }

    pub fn golden() -> Self {
        Self::Golden {
            tol: GOLDEN_TOL,
            max_iters: GOLDEN_MAX_ITERS,
        }
    }

    pub fn line_search() -> Self {
        Self::LineSearch {
            tol: GOLDEN_TOL,
            max_iters: GOLDEN_MAX_ITERS,
        }
    }

    /// Whether every step is guaranteed not to increase the objective.
    pub fn is_descent(&self) -> bool {
        !matches!(self, Self::Agnostic)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Short { lipschitz } if !(lipschitz > 0.0 && lipschitz.is_finite()) => {
                Err(invalid(format!(
                    "short step needs a positive smoothness constant, got {lipschitz}"
                )))
            }
            Self::Golden { tol, max_iters } | Self::LineSearch { tol, max_iters }
                if !(tol > 0.0) || max_iters == 0 =>
            {
                Err(invalid(
                    "golden-section search needs a positive tolerance and iteration cap",
                ))
            }
            _ => Ok(()),
        }
    }
}

/// Quantities describing one candidate step `x + γ d`, `γ ∈ [0, upper]`.
pub struct StepQuery<'a> {
    pub t: usize,
    /// `⟨−∇f(x), d⟩`.
    pub neg_grad_dot_dir: f64,
    /// `‖d‖²`.
    pub dir_norm_sq: f64,
    pub upper: f64,
    /// `dᵀ∇²f d` when the objective is quadratic.
    pub curvature: Option<f64>,
    /// `γ ↦ f(x + γ d)`, needed by the golden-section rule.
    pub f_along: Option<&'a dyn Fn(f64) -> Result<f64>>,
}

/// Step size under `rule`; see [`StepRule`].
pub fn step_size(rule: &StepRule, q: &StepQuery<'_>) -> Result<f64> {
    if !(q.dir_norm_sq > 0.0) {
        return Err(invalid("step direction must be nonzero"));
    }
    if !(q.upper > 0.0) {
        return Err(invalid(format!(
            "step cap must be positive, got {}",
            q.upper
        )));
    }
    match *rule {
        StepRule::Agnostic => Ok((2.0 / (q.t as f64 + 2.0)).min(q.upper)),
        StepRule::Short { lipschitz } => {
            if q.neg_grad_dot_dir < 0.0 {
                return Err(Error::Invariant(format!(
                    "short step along an ascent direction (⟨−∇f, d⟩ = {:e})",
                    q.neg_grad_dot_dir
                )));
            }
            Ok((q.neg_grad_dot_dir / (lipschitz * q.dir_norm_sq)).min(q.upper))
        }
        StepRule::ExactQuadratic => {
            let curvature = q.curvature.ok_or_else(|| {
                Error::Unsupported("exact line search needs a quadratic objective".into())
            })?;
            Ok(exact_quadratic(q.neg_grad_dot_dir, curvature, q.upper))
        }
        StepRule::Golden { tol, max_iters } => golden(q, tol, max_iters),
        StepRule::LineSearch { tol, max_iters } => match q.curvature {
            Some(c) => Ok(exact_quadratic(q.neg_grad_dot_dir, c, q.upper)),
            None => golden(q, tol, max_iters),
        },
    }
}

fn exact_quadratic(neg_grad_dot_dir: f64, curvature: f64, upper: f64) -> f64 {
    if neg_grad_dot_dir <= 0.0 {
        return 0.0;
    }
    if curvature <= 0.0 {
        return upper;
    }
    (neg_grad_dot_dir / curvature).clamp(0.0, upper)
}

fn golden(q: &StepQuery<'_>, tol: f64, max_iters: usize) -> Result<f64> {
    let f = q
        .f_along
        .ok_or_else(|| invalid("golden-section search needs the objective along the ray"))?;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, q.upper);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..max_iters {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    let (mut best, mut best_val) = if fc <= fd { (c, fc) } else { (d, fd) };
    let f_upper = f(q.upper)?;
    if f_upper <= best_val {
        best = q.upper;
        best_val = f_upper;
    }
    // Never accept a step that increases the objective.
    if best_val > f(0.0)? {
        return Ok(0.0);
    }
    Ok(best)
}
