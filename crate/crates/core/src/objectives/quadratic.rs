use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};
use crate::objective::{check_dim, Objective};
use crate::vector::DenseVector;

#[derive(Debug, Clone)]
enum Form {
    /// `xᵀAx/2 + bᵀx + c`.
    General {
        a: DMatrix<f64>,
        b: DenseVector,
        c: f64,
    },
    /// `Σ wᵢxᵢ²/2 + bᵀx + c`.
    Diagonal {
        w: DenseVector,
        b: DenseVector,
        c: f64,
    },
    /// `‖x − center‖²/2`, evaluated without cancellation.
    Distance { center: DenseVector },
}

/// A convex quadratic `f(x) = xᵀAx/2 + bᵀx + c` with symmetric PSD `A`.
///
/// Smoothness and strong convexity are the extreme eigenvalues of `A`;
/// strong convexity also serves as the gradient-dominance constant.
#[derive(Debug, Clone)]
pub struct GenericQuadratic {
    form: Form,
    dim: usize,
    lambda_max: f64,
    lambda_min: f64,
    optimum: Option<f64>,
}

impl GenericQuadratic {
    pub fn new(a: DMatrix<f64>, b: DenseVector, c: f64) -> Result<Self> {
        let n = b.dim();
        if a.nrows() != n || a.ncols() != n {
            return Err(invalid(format!(
                "quadratic matrix must be {n}×{n}, got {}×{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) || !c.is_finite() {
            return Err(invalid("quadratic data must be finite"));
        }
        let scale = a.amax().max(1.0);
        if (&a - a.transpose()).amax() > 1e-12 * scale {
            return Err(invalid("quadratic matrix must be symmetric"));
        }
        let eig = a.clone().symmetric_eigenvalues();
        let lambda_min = eig.min();
        let lambda_max = eig.max();
        if lambda_min < -1e-10 * scale {
            return Err(invalid(format!(
                "quadratic matrix must be positive semidefinite (λ_min = {lambda_min:e})"
            )));
        }
        Ok(Self {
            form: Form::General { a, b, c },
            dim: n,
            lambda_max,
            lambda_min: lambda_min.max(0.0),
            optimum: None,
        })
    }

    pub fn diagonal(w: DenseVector, b: DenseVector, c: f64) -> Result<Self> {
        if w.dim() != b.dim() {
            return Err(invalid("diagonal and linear term must share a dimension"));
        }
        if w.min_entry() < 0.0 {
            return Err(invalid("diagonal weights must be nonnegative"));
        }
        let lambda_max = w.iter().copied().fold(0.0, f64::max);
        let lambda_min = w.min_entry();
        Ok(Self {
            dim: w.dim(),
            form: Form::Diagonal { w, b, c },
            lambda_max,
            lambda_min,
            optimum: None,
        })
    }

    /// `‖x − center‖²/2`.
    pub fn half_squared_distance(center: DenseVector) -> Result<Self> {
        Ok(Self {
            dim: center.dim(),
            form: Form::Distance { center },
            lambda_max: 1.0,
            lambda_min: 1.0,
            optimum: None,
        })
    }

    /// Declares the optimal value over the intended feasible region.
    pub fn with_known_optimum(mut self, value: f64) -> Self {
        self.optimum = Some(value);
        self
    }

    fn hessian_times(&self, d: &DenseVector) -> DenseVector {
        match &self.form {
            Form::General { a, .. } => {
                let v = a * DVector::from_column_slice(d.as_slice());
                DenseVector::from_vec_unchecked(v.as_slice().to_vec())
            }
            Form::Diagonal { w, .. } => DenseVector::from_vec_unchecked(
                w.iter().zip(d.iter()).map(|(a, b)| a * b).collect(),
            ),
            Form::Distance { .. } => d.clone(),
        }
    }
}

impl Objective for GenericQuadratic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &DenseVector) -> Result<f64> {
        check_dim(self.dim, x)?;
        Ok(match &self.form {
            Form::Distance { center } => x.sub(center).norm_sq() / 2.0,
            Form::General { b, c, .. } | Form::Diagonal { b, c, .. } => {
                x.dot(&self.hessian_times(x)) / 2.0 + b.dot(x) + c
            }
        })
    }

    fn gradient(&self, x: &DenseVector) -> Result<DenseVector> {
        check_dim(self.dim, x)?;
        Ok(match &self.form {
            Form::Distance { center } => x.sub(center),
            Form::General { b, .. } | Form::Diagonal { b, .. } => self.hessian_times(x).add(b),
        })
    }

    fn value_and_gradient(&self, x: &DenseVector) -> Result<(f64, DenseVector)> {
        check_dim(self.dim, x)?;
        Ok(match &self.form {
            Form::Distance { center } => {
                let r = x.sub(center);
                (r.norm_sq() / 2.0, r)
            }
            Form::General { b, c, .. } | Form::Diagonal { b, c, .. } => {
                let ax = self.hessian_times(x);
                let value = x.dot(&ax) / 2.0 + b.dot(x) + c;
                (value, ax.add(b))
            }
        })
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.lambda_max)
    }

    fn strong_convexity(&self) -> Option<f64> {
        (self.lambda_min > 0.0).then_some(self.lambda_min)
    }

    fn gradient_dominance(&self) -> Option<f64> {
        self.strong_convexity()
    }

    fn known_optimum(&self) -> Option<f64> {
        self.optimum
    }

    fn directional_curvature(&self, d: &DenseVector) -> Option<f64> {
        Some(d.dot(&self.hessian_times(d)))
    }

    fn name(&self) -> &str {
        "quadratic"
    }
}
