//! The objective-function contract shared by every solver.

use crate::error::{Error, Result};
use crate::vector::DenseVector;

/// A differentiable convex function over ℝⁿ.
///
/// Implementations are immutable and shareable across threads. Optional
/// constants are declared, never estimated on the fly: `smoothness` is the
/// Lipschitz constant of the gradient, `strong_convexity` the modulus S, and
/// `gradient_dominance` the constant μ in `f(x) − min f ≤ ‖∇f(x)‖²/(2μ)`.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &DenseVector) -> Result<f64>;

    fn gradient(&self, x: &DenseVector) -> Result<DenseVector>;

    fn value_and_gradient(&self, x: &DenseVector) -> Result<(f64, DenseVector)> {
        Ok((self.value(x)?, self.gradient(x)?))
    }

    fn smoothness(&self) -> Option<f64> {
        None
    }

    fn strong_convexity(&self) -> Option<f64> {
        None
    }

    fn gradient_dominance(&self) -> Option<f64> {
        None
    }

    /// The optimal value over the feasible region, when known in closed form.
    fn known_optimum(&self) -> Option<f64> {
        None
    }

    /// `dᵀ∇²f d` for objectives with constant Hessian; `None` otherwise.
    ///
    /// A `Some` value marks the objective as quadratic, which enables the
    /// closed-form line search.
    fn directional_curvature(&self, _d: &DenseVector) -> Option<f64> {
        None
    }

    fn name(&self) -> &str {
        "objective"
    }
}

pub(crate) fn check_dim(expected: usize, x: &DenseVector) -> Result<()> {
    if x.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: x.dim(),
        });
    }
    Ok(())
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &DenseVector) -> Result<f64> {
        (**self).value(x)
    }
    fn gradient(&self, x: &DenseVector) -> Result<DenseVector> {
        (**self).gradient(x)
    }
    fn value_and_gradient(&self, x: &DenseVector) -> Result<(f64, DenseVector)> {
        (**self).value_and_gradient(x)
    }
    fn smoothness(&self) -> Option<f64> {
        (**self).smoothness()
    }
    fn strong_convexity(&self) -> Option<f64> {
        (**self).strong_convexity()
    }
    fn gradient_dominance(&self) -> Option<f64> {
        (**self).gradient_dominance()
    }
    fn known_optimum(&self) -> Option<f64> {
        (**self).known_optimum()
    }
    fn directional_curvature(&self, d: &DenseVector) -> Option<f64> {
        (**self).directional_curvature(d)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}

impl<T: Objective + ?Sized> Objective for std::sync::Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &DenseVector) -> Result<f64> {
        (**self).value(x)
    }
    fn gradient(&self, x: &DenseVector) -> Result<DenseVector> {
        (**self).gradient(x)
    }
    fn value_and_gradient(&self, x: &DenseVector) -> Result<(f64, DenseVector)> {
        (**self).value_and_gradient(x)
    }
    fn smoothness(&self) -> Option<f64> {
        (**self).smoothness()
    }
    fn strong_convexity(&self) -> Option<f64> {
        (**self).strong_convexity()
    }
    fn gradient_dominance(&self) -> Option<f64> {
        (**self).gradient_dominance()
    }
    fn known_optimum(&self) -> Option<f64> {
        (**self).known_optimum()
    }
    fn directional_curvature(&self, d: &DenseVector) -> Option<f64> {
        (**self).directional_curvature(d)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}
