use super::{check_cost_dim, Region, Vertex, VertexKey};
use crate::error::{invalid, Result};
use crate::vector::DenseVector;

/// A polytope given by its vertex list, with an optional facet description
/// `{x : aⱼᵀx ≤ bⱼ}` used for membership tests.
///
/// The oracle enumerates vertices, so this is meant for small instances.
#[derive(Debug, Clone)]
pub struct VertexPolytope {
    vertices: Vec<DenseVector>,
    facets: Vec<(DenseVector, f64)>,
    diameter: f64,
}

impl VertexPolytope {
    /// Builds the polytope from vertices (listed in tie-break order) and the
    /// facet inequalities describing their hull.
    pub fn new(vertices: Vec<DenseVector>, facets: Vec<(DenseVector, f64)>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(invalid("polytope needs at least one vertex"));
        };
        let dim = first.dim();
        if vertices.iter().any(|v| v.dim() != dim) || facets.iter().any(|(a, _)| a.dim() != dim) {
            return Err(invalid(
                "polytope vertices and facets must share a dimension",
            ));
        }
        let mut diameter: f64 = 0.0;
        for (i, a) in vertices.iter().enumerate() {
            for b in &vertices[i + 1..] {
                diameter = diameter.max(a.sub(b).norm());
            }
        }
        Ok(Self {
            vertices,
            facets,
            diameter: diameter.max(f64::MIN_POSITIVE),
        })
    }

    /// A convex polygon in ℝ². Facets are derived from the convex hull; the
    /// vertex order is kept for tie-breaking.
    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(invalid("polygon needs at least three vertices"));
        }
        let hull = convex_hull(&vertices);
        if hull.len() != vertices.len() {
            return Err(invalid("polygon vertices must be in convex position"));
        }
        let mut facets = Vec::with_capacity(hull.len());
        for k in 0..hull.len() {
            let p = hull[k];
            let q = hull[(k + 1) % hull.len()];
            // Counter-clockwise hull: the interior lies to the left of p→q.
            let normal = [q[1] - p[1], p[0] - q[0]];
            let offset = normal[0] * p[0] + normal[1] * p[1];
            let scale = (normal[0].powi(2) + normal[1].powi(2)).sqrt();
            facets.push((
                DenseVector::from_vec_unchecked(vec![normal[0] / scale, normal[1] / scale]),
                offset / scale,
            ));
        }
        let points = vertices
            .iter()
            .map(|p| DenseVector::from_vec_unchecked(p.to_vec()))
            .collect();
        Self::new(points, facets)
    }

    pub fn vertices(&self) -> &[DenseVector] {
        &self.vertices
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        Vertex::dense(VertexKey::Index(index), self.vertices[index].clone())
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; returns the strict hull counter-clockwise.
fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

impl Region for VertexPolytope {
    fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    fn lmo(&self, c: &DenseVector) -> Result<Vertex> {
        check_cost_dim(self.dim(), c)?;
        let mut best = 0;
        let mut best_val = self.vertices[0].dot(c);
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            let val = v.dot(c);
            if val < best_val {
                best = i;
                best_val = val;
            }
        }
        Ok(self.vertex(best))
    }

    /// Facet test when facets are known; otherwise only vertices qualify.
    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        if self.facets.is_empty() {
            return self.vertices.iter().any(|v| v.max_abs_diff(x) <= tol);
        }
        self.facets.iter().all(|(a, b)| a.dot(x) <= b + tol)
    }

    fn diameter_bound(&self) -> f64 {
        self.diameter
    }

    fn supports_away(&self) -> bool {
        true
    }

    fn name(&self) -> &str {
        "vertex_polytope"
    }
}
