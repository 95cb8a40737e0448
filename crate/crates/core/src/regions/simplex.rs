use super::{check_cost_dim, Region, Vertex, VertexKey, ZERO_TOL};
use crate::error::{invalid, Error, Result};
use crate::vector::DenseVector;

/// The scaled probability simplex `τΔₙ = {x ≥ 0, Σ xᵢ = τ}`.
#[derive(Debug, Clone)]
pub struct ScaledSimplex {
    dim: usize,
    tau: f64,
}

impl ScaledSimplex {
    pub fn new(dim: usize, tau: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("simplex dimension must be positive"));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid(format!(
                "simplex radius must be positive, got {tau}"
            )));
        }
        Ok(Self { dim, tau })
    }

    /// The standard simplex Δₙ.
    pub fn probability(dim: usize) -> Result<Self> {
        Self::new(dim, 1.0)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        Vertex::dense(
            VertexKey::Index(index),
            DenseVector::basis(self.dim, index, self.tau),
        )
    }
}

/// `τ e_{i*}` with `i* = argminᵢ cᵢ`, lowest index on ties.
pub fn lmo_scaled_simplex(c: &DenseVector, tau: f64) -> Vertex {
    let mut best = 0;
    for (i, &ci) in c.iter().enumerate().skip(1) {
        if ci < c[best] {
            best = i;
        }
    }
    Vertex::dense(
        VertexKey::Index(best),
        DenseVector::basis(c.dim(), best, tau),
    )
}

impl Region for ScaledSimplex {
    fn dim(&self) -> usize {
        self.dim
    }

    fn lmo(&self, c: &DenseVector) -> Result<Vertex> {
        check_cost_dim(self.dim, c)?;
        Ok(lmo_scaled_simplex(c, self.tau))
    }

    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        x.dim() == self.dim && x.iter().all(|&v| v >= -tol) && (x.sum() - self.tau).abs() <= tol
    }

    fn diameter_bound(&self) -> f64 {
        self.tau * std::f64::consts::SQRT_2
    }

    fn supports_away(&self) -> bool {
        true
    }

    fn supports_dicg(&self) -> bool {
        true
    }

    fn dicg_away_vertex(&self, x: &DenseVector, gradient: &DenseVector) -> Result<Vertex> {
        check_cost_dim(self.dim, x)?;
        check_cost_dim(self.dim, gradient)?;
        let mut best: Option<usize> = None;
        for i in 0..self.dim {
            if x[i] > ZERO_TOL && best.is_none_or(|b| gradient[i] > gradient[b]) {
                best = Some(i);
            }
        }
        best.map(|i| self.vertex(i))
            .ok_or_else(|| Error::Infeasible("iterate has empty support".into()))
    }

    fn name(&self) -> &str {
        "scaled_simplex"
    }
}
