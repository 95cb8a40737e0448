use crate::error::{Error, Result};
use crate::objective::{check_dim, Objective};
use crate::regions::{DagNetwork, Link};
use crate::vector::DenseVector;

/// Flows above `−NEGATIVE_FLOW_TOL` are accepted as rounding noise.
pub const NEGATIVE_FLOW_TOL: f64 = 1e-9;

/// Travel time `t(x) = τ(1 + 0.15 (x/c)⁴)` of a link.
pub fn bpr_travel_time(link: &Link, flow: f64) -> f64 {
    link.free_flow_time * (1.0 + 0.15 * (flow / link.capacity).powi(4))
}

/// `Σ_a ∫₀^{x_a} t_a(ξ) dξ = Σ_a τ_a (x_a + 0.03 x_a⁵ / c_a⁴)`.
#[derive(Debug, Clone)]
pub struct Beckmann {
    links: Vec<Link>,
}

impl Beckmann {
    pub fn new(network: &DagNetwork) -> Self {
        Self {
            links: network.links().to_vec(),
        }
    }

    /// Travel times at the given flows.
    pub fn travel_times(&self, x: &DenseVector) -> Result<DenseVector> {
        self.gradient(x)
    }

    fn check_flows(&self, x: &DenseVector) -> Result<()> {
        check_dim(self.links.len(), x)?;
        if let Some((a, v)) = x.iter().enumerate().find(|(_, &v)| v < -NEGATIVE_FLOW_TOL) {
            return Err(Error::Infeasible(format!("negative flow {v} on link {a}")));
        }
        Ok(())
    }
}

impl Objective for Beckmann {
    fn dim(&self) -> usize {
        self.links.len()
    }

    fn value(&self, x: &DenseVector) -> Result<f64> {
        self.check_flows(x)?;
        Ok(self
            .links
            .iter()
            .zip(x.iter())
            .map(|(l, &f)| l.free_flow_time * (f + 0.03 * f.powi(5) / l.capacity.powi(4)))
            .sum())
    }

    fn gradient(&self, x: &DenseVector) -> Result<DenseVector> {
        self.check_flows(x)?;
        Ok(DenseVector::from_vec_unchecked(
            self.links
                .iter()
                .zip(x.iter())
                .map(|(l, &f)| bpr_travel_time(l, f))
                .collect(),
        ))
    }

    fn name(&self) -> &str {
        "beckmann"
    }
}
