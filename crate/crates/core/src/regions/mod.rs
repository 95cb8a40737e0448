//! Feasible regions, accessed through linear minimization oracles.
//!
//! Every region exposes an oracle returning `argmin_{v ∈ V} ⟨c, v⟩` over its
//! vertex set, a membership test, and a diameter bound. Ties are always broken
//! toward the lowest index (or lexicographically smallest key) so runs are
//! reproducible.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::vector::DenseVector;

mod active_set;
mod flow;
mod l1;
mod nuclear;
mod polytope;
mod simplex;

pub use active_set::{away_vertex, ActiveSet};
pub use flow::{DagFlowRegion, DagNetwork, Demand, Link};
pub use l1::{exact_lift_ruled_out, lift_l1, lmo_l1_ball, project_l1, L1Ball};
pub use nuclear::{lmo_nuclear_ball, nuclear_norm, LanczosOptions, NuclearBall};
pub use polytope::VertexPolytope;
pub use simplex::{lmo_scaled_simplex, ScaledSimplex};

/// Coordinates at or below this value count as zero when masking the support
/// of an iterate for the decomposition-invariant away oracle.
pub const ZERO_TOL: f64 = 1e-12;

/// Canonical identifier of a vertex. Equal keys imply equal points.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKey {
    /// Member of a finitely indexed family (simplex corners, listed vertices).
    Index(usize),
    /// `±τ eᵢ` of an ℓ1-ball; `negative` selects the sign.
    Signed { index: usize, negative: bool },
    /// Canonical byte encoding of the defining data.
    Encoded(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Dense(DenseVector),
    /// `scale · u vᵀ`, flattened row-major when materialized.
    RankOne {
        u: Vec<f64>,
        v: Vec<f64>,
        scale: f64,
    },
}

/// An extreme point returned by an oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    key: VertexKey,
    repr: Repr,
    degenerate: bool,
}

impl Vertex {
    pub fn dense(key: VertexKey, point: DenseVector) -> Self {
        Self {
            key,
            repr: Repr::Dense(point),
            degenerate: false,
        }
    }

    /// A rank-one matrix `scale · u vᵀ` kept in factored form.
    pub fn rank_one(key: VertexKey, u: Vec<f64>, v: Vec<f64>, scale: f64) -> Self {
        Self {
            key,
            repr: Repr::RankOne { u, v, scale },
            degenerate: false,
        }
    }

    pub(crate) fn flagged_degenerate(mut self) -> Self {
        self.degenerate = true;
        self
    }

    pub fn key(&self) -> &VertexKey {
        &self.key
    }

    /// Set when the oracle input carried no information (e.g. a zero cost
    /// matrix) and the vertex was picked by convention.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Dense(p) => p.dim(),
            Repr::RankOne { u, v, .. } => u.len() * v.len(),
        }
    }

    /// The vertex as a dense vector, materializing factored forms.
    pub fn point(&self) -> Cow<'_, DenseVector> {
        match &self.repr {
            Repr::Dense(p) => Cow::Borrowed(p),
            Repr::RankOne { u, v, scale } => {
                let mut out = Vec::with_capacity(u.len() * v.len());
                for ui in u {
                    out.extend(v.iter().map(|vj| scale * ui * vj));
                }
                Cow::Owned(DenseVector::from_vec_unchecked(out))
            }
        }
    }

    pub fn into_point(self) -> DenseVector {
        match self.repr {
            Repr::Dense(p) => p,
            _ => self.point().into_owned(),
        }
    }

    /// `⟨c, v⟩` without materializing factored vertices.
    pub fn dot(&self, c: &DenseVector) -> f64 {
        match &self.repr {
            Repr::Dense(p) => p.dot(c),
            Repr::RankOne { u, v, scale } => {
                let n = v.len();
                let cs = c.as_slice();
                let mut acc = 0.0;
                for (i, ui) in u.iter().enumerate() {
                    let row = &cs[i * n..(i + 1) * n];
                    acc += ui * row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
                }
                scale * acc
            }
        }
    }

    /// Returns `v − anchor`.
    pub fn minus(&self, anchor: &DenseVector) -> DenseVector {
        self.point().sub(anchor)
    }
}

/// A compact convex feasible set accessed through its oracle.
pub trait Region: Send + Sync {
    fn dim(&self) -> usize;

    /// Linear minimization oracle: a vertex minimizing `⟨c, ·⟩`.
    fn lmo(&self, c: &DenseVector) -> Result<Vertex>;

    /// Membership test with absolute tolerance `tol`.
    fn contains(&self, x: &DenseVector, tol: f64) -> bool;

    /// Upper bound on `max ‖y − x‖` over the region.
    fn diameter_bound(&self) -> f64;

    /// Whether vertices carry finite canonical keys suitable for an explicit
    /// active set.
    fn supports_away(&self) -> bool {
        false
    }

    /// Whether the region is a 0/1-style polytope `{x ≥ 0, Ax = b}` with a
    /// support-masked away oracle.
    fn supports_dicg(&self) -> bool {
        false
    }

    /// `argmax_{v ∈ V} ⟨∇̃f, v⟩` where the gradient is masked to `−∞` outside
    /// the support of `x`.
    fn dicg_away_vertex(&self, _x: &DenseVector, _gradient: &DenseVector) -> Result<Vertex> {
        Err(Error::Unsupported(format!(
            "{} has no decomposition-invariant away oracle",
            self.name()
        )))
    }

    fn name(&self) -> &str;
}

/// Masked away oracle; see [`Region::dicg_away_vertex`].
pub fn dicg_away_vertex(
    x: &DenseVector,
    gradient: &DenseVector,
    region: &dyn Region,
) -> Result<Vertex> {
    if !region.supports_dicg() {
        return Err(Error::Unsupported(format!(
            "{} does not support DICG",
            region.name()
        )));
    }
    region.dicg_away_vertex(x, gradient)
}

pub(crate) fn check_cost_dim(expected: usize, c: &DenseVector) -> Result<()> {
    if c.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: c.dim(),
        });
    }
    Ok(())
}

impl<T: Region + ?Sized> Region for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn lmo(&self, c: &DenseVector) -> Result<Vertex> {
        (**self).lmo(c)
    }
    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        (**self).contains(x, tol)
    }
    fn diameter_bound(&self) -> f64 {
        (**self).diameter_bound()
    }
    fn supports_away(&self) -> bool {
        (**self).supports_away()
    }
    fn supports_dicg(&self) -> bool {
        (**self).supports_dicg()
    }
    fn dicg_away_vertex(&self, x: &DenseVector, gradient: &DenseVector) -> Result<Vertex> {
        (**self).dicg_away_vertex(x, gradient)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}

impl<T: Region + ?Sized> Region for std::sync::Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn lmo(&self, c: &DenseVector) -> Result<Vertex> {
        (**self).lmo(c)
    }
    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        (**self).contains(x, tol)
    }
    fn diameter_bound(&self) -> f64 {
        (**self).diameter_bound()
    }
    fn supports_away(&self) -> bool {
        (**self).supports_away()
    }
    fn supports_dicg(&self) -> bool {
        (**self).supports_dicg()
    }
    fn dicg_away_vertex(&self, x: &DenseVector, gradient: &DenseVector) -> Result<Vertex> {
        (**self).dicg_away_vertex(x, gradient)
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}
