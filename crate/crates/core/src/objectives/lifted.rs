use crate::error::Result;
use crate::objective::{check_dim, Objective};
use crate::regions::project_l1;
use crate::vector::DenseVector;

/// `g(z) = f(z[..n] − z[n..])`, the composition used to optimize over an
/// ℓ1-ball through the simplex `τΔ₂ₙ`.
///
/// `∇g = (∇f, −∇f)`, so `g` is `2L`-smooth when `f` is `L`-smooth.
#[derive(Debug, Clone)]
pub struct Lifted<O> {
    inner: O,
}

impl<O: Objective> Lifted<O> {
    pub fn new(inner: O) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    fn project(&self, z: &DenseVector) -> Result<DenseVector> {
        check_dim(self.dim(), z)?;
        project_l1(z)
    }
}

/// `(g, −g)`.
fn mirrored(g: &DenseVector) -> DenseVector {
    let mut out = g.as_slice().to_vec();
    out.extend(g.iter().map(|v| -v));
    DenseVector::from_vec_unchecked(out)
}

impl<O: Objective> Objective for Lifted<O> {
    fn dim(&self) -> usize {
        2 * self.inner.dim()
    }

    fn value(&self, z: &DenseVector) -> Result<f64> {
        self.inner.value(&self.project(z)?)
    }

    fn gradient(&self, z: &DenseVector) -> Result<DenseVector> {
        Ok(mirrored(&self.inner.gradient(&self.project(z)?)?))
    }

    fn value_and_gradient(&self, z: &DenseVector) -> Result<(f64, DenseVector)> {
        let (v, g) = self.inner.value_and_gradient(&self.project(z)?)?;
        Ok((v, mirrored(&g)))
    }

    fn smoothness(&self) -> Option<f64> {
        self.inner.smoothness().map(|l| 2.0 * l)
    }

    fn known_optimum(&self) -> Option<f64> {
        self.inner.known_optimum()
    }

    fn directional_curvature(&self, d: &DenseVector) -> Option<f64> {
        let pd = project_l1(d).ok()?;
        self.inner.directional_curvature(&pd)
    }

    fn name(&self) -> &str {
        self.inner.name()
    }
}
