use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};
use crate::objective::{check_dim, Objective};
use crate::vector::DenseVector;

/// `f(x) = (1/m) Σ ln(1 + exp(−yᵢ aᵢᵀx))` over samples stored as rows.
#[derive(Debug, Clone)]
pub struct Logistic {
    samples: DMatrix<f64>,
    labels: Vec<f64>,
    lipschitz: f64,
}

/// `ln(1 + eᶻ)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Logistic {
    /// Labels must be `±1`.
    pub fn new(samples: DMatrix<f64>, labels: Vec<f64>) -> Result<Self> {
        if samples.nrows() != labels.len() || labels.is_empty() || samples.ncols() == 0 {
            return Err(invalid(
                "need one label per sample and at least one feature",
            ));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(invalid("labels must be +1 or -1"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(invalid("samples must be finite"));
        }
        // The Hessian is bounded by AᵀA/(4m).
        let sigma1 = samples.singular_values().max();
        let lipschitz = sigma1 * sigma1 / (4.0 * labels.len() as f64);
        Ok(Self {
            samples,
            labels,
            lipschitz,
        })
    }

    pub fn num_samples(&self) -> usize {
        self.labels.len()
    }

    fn margins(&self, x: &DenseVector) -> DVector<f64> {
        &self.samples * DVector::from_column_slice(x.as_slice())
    }
}

impl Objective for Logistic {
    fn dim(&self) -> usize {
        self.samples.ncols()
    }

    fn value(&self, x: &DenseVector) -> Result<f64> {
        check_dim(self.dim(), x)?;
        let m = self.margins(x);
        let total: f64 = m
            .iter()
            .zip(&self.labels)
            .map(|(ax, y)| softplus(-y * ax))
            .sum();
        Ok(total / self.num_samples() as f64)
    }

    fn gradient(&self, x: &DenseVector) -> Result<DenseVector> {
        Ok(self.value_and_gradient(x)?.1)
    }

    fn value_and_gradient(&self, x: &DenseVector) -> Result<(f64, DenseVector)> {
        check_dim(self.dim(), x)?;
        let m = self.margins(x);
        let inv_m = 1.0 / self.num_samples() as f64;
        let mut value = 0.0;
        let weights = DVector::from_iterator(
            m.len(),
            m.iter().zip(&self.labels).map(|(ax, y)| {
                let z = -y * ax;
                value += softplus(z);
                -y * sigmoid(z) * inv_m
            }),
        );
        let g = self.samples.tr_mul(&weights);
        Ok((
            value * inv_m,
            DenseVector::from_vec_unchecked(g.as_slice().to_vec()),
        ))
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn name(&self) -> &str {
        "logistic"
    }
}
