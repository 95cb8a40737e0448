use crate::error::{invalid, Result};
use crate::objective::{check_dim, Objective};
use crate::vector::DenseVector;

/// `h_ρ(t) = t²/2` for `|t| ≤ ρ`, `ρ(|t| − ρ/2)` otherwise.
pub fn huber(t: f64, rho: f64) -> f64 {
    if t.abs() <= rho {
        t * t / 2.0
    } else {
        rho * (t.abs() - rho / 2.0)
    }
}

/// `h′_ρ(t) = clamp(t, −ρ, ρ)`.
pub fn huber_derivative(t: f64, rho: f64) -> f64 {
    t.clamp(-rho, rho)
}

/// `f(X) = (1/|I|) Σ_{(i,j) ∈ I} h_ρ(Y_ij − X_ij)` over row-major `m × n` matrices.
#[derive(Debug, Clone)]
pub struct HuberCompletion {
    rows: usize,
    cols: usize,
    rho: f64,
    /// `(flat index, observed value)`, sorted by index.
    observed: Vec<(usize, f64)>,
}

impl HuberCompletion {
    pub fn new(
        rows: usize,
        cols: usize,
        rho: f64,
        observed: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("matrix shape must be positive"));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(invalid(format!(
                "huber parameter must be positive, got {rho}"
            )));
        }
        if observed.is_empty() {
            return Err(invalid("need at least one observed entry"));
        }
        let mut flat = Vec::with_capacity(observed.len());
        for (i, j, v) in observed {
            if i >= rows || j >= cols {
                return Err(invalid(format!(
                    "observed entry ({i}, {j}) is out of range"
                )));
            }
            if !v.is_finite() {
                return Err(invalid("observed values must be finite"));
            }
            flat.push((i * cols + j, v));
        }
        flat.sort_by_key(|&(k, _)| k);
        if flat.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("observed entries must be distinct"));
        }
        Ok(Self {
            rows,
            cols,
            rho,
            observed: flat,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn num_observed(&self) -> usize {
        self.observed.len()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

impl Objective for HuberCompletion {
    fn dim(&self) -> usize {
        self.rows * self.cols
    }

    fn value(&self, x: &DenseVector) -> Result<f64> {
        check_dim(self.dim(), x)?;
        let total: f64 = self
            .observed
            .iter()
            .map(|&(k, y)| huber(y - x[k], self.rho))
            .sum();
        Ok(total / self.observed.len() as f64)
    }

    fn gradient(&self, x: &DenseVector) -> Result<DenseVector> {
        Ok(self.value_and_gradient(x)?.1)
    }

    fn value_and_gradient(&self, x: &DenseVector) -> Result<(f64, DenseVector)> {
        check_dim(self.dim(), x)?;
        let inv = 1.0 / self.observed.len() as f64;
        let mut g = DenseVector::zeros(self.dim());
        let mut total = 0.0;
        for &(k, y) in &self.observed {
            let t = y - x[k];
            total += huber(t, self.rho);
            g[k] = -huber_derivative(t, self.rho) * inv;
        }
        Ok((total * inv, g))
    }

    fn smoothness(&self) -> Option<f64> {
        Some(1.0 / self.observed.len() as f64)
    }

    fn name(&self) -> &str {
        "huber_completion"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::dv;

    #[test]
    fn huber_pieces() {
        assert_eq!(huber(0.5, 1.0), 0.125);
        assert_eq!(huber(2.0, 1.0), 1.5);
        assert_eq!(huber(-2.0, 1.0), 1.5);
        assert_eq!(huber_derivative(-3.0, 1.0), -1.0);
    }

    #[test]
    fn gradient_supported_on_observed_entries() {
        let f = HuberCompletion::new(2, 2, 1.0, vec![(0, 1, 3.0), (1, 0, 0.5)]).unwrap();
        let (v, g) = f.value_and_gradient(&dv(&[9.0, 0.0, 0.0, 9.0])).unwrap();
        assert_eq!(v, (huber(3.0, 1.0) + huber(0.5, 1.0)) / 2.0);
        assert_eq!(g, dv(&[0.0, -0.5, -0.25, 0.0]));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(HuberCompletion::new(2, 2, 1.0, vec![(2, 0, 1.0)]).is_err());
        assert!(HuberCompletion::new(2, 2, 0.0, vec![(0, 0, 1.0)]).is_err());
        assert!(HuberCompletion::new(2, 2, 1.0, vec![(0, 0, 1.0), (0, 0, 2.0)]).is_err());
    }
}
