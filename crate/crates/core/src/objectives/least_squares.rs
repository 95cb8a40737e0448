use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};
use crate::objective::{check_dim, Objective};
use crate::vector::DenseVector;

/// `f(x) = ‖y − Ax‖²` with `∇f(x) = 2Aᵀ(Ax − y)` and `L = 2σ₁(A)²`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    a: DMatrix<f64>,
    y: DVector<f64>,
    lipschitz: f64,
}

impl LeastSquares {
    pub fn new(a: DMatrix<f64>, y: DenseVector) -> Result<Self> {
        if a.nrows() != y.dim() {
            return Err(invalid(format!(
                "design has {} rows but {} observations",
                a.nrows(),
                y.dim()
            )));
        }
        if a.ncols() == 0 || a.iter().any(|v| !v.is_finite()) {
            return Err(invalid("design matrix must be non-empty and finite"));
        }
        let sigma1 = a.singular_values().max();
        Ok(Self {
            y: DVector::from_column_slice(y.as_slice()),
            a,
            lipschitz: 2.0 * sigma1 * sigma1,
        })
    }

    pub fn design(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn observations(&self) -> DenseVector {
        DenseVector::from_vec_unchecked(self.y.as_slice().to_vec())
    }

    fn residual(&self, x: &DenseVector) -> DVector<f64> {
        &self.a * DVector::from_column_slice(x.as_slice()) - &self.y
    }
}

impl Objective for LeastSquares {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &DenseVector) -> Result<f64> {
        check_dim(self.dim(), x)?;
        Ok(self.residual(x).norm_squared())
    }

    fn gradient(&self, x: &DenseVector) -> Result<DenseVector> {
        Ok(self.value_and_gradient(x)?.1)
    }

    fn value_and_gradient(&self, x: &DenseVector) -> Result<(f64, DenseVector)> {
        check_dim(self.dim(), x)?;
        let r = self.residual(x);
        let g = self.a.tr_mul(&r) * 2.0;
        Ok((
            r.norm_squared(),
            DenseVector::from_vec_unchecked(g.as_slice().to_vec()),
        ))
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn directional_curvature(&self, d: &DenseVector) -> Option<f64> {
        let ad = &self.a * DVector::from_column_slice(d.as_slice());
        Some(2.0 * ad.norm_squared())
    }

    fn name(&self) -> &str {
        "least_squares"
    }
}
