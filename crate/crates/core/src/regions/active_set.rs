use std::collections::BTreeMap;

use super::{Vertex, VertexKey};
use crate::error::{Error, Result};
use crate::vector::DenseVector;

/// Explicit convex decomposition of an iterate over oracle vertices.
#[derive(Debug, Clone, Default)]
pub struct ActiveSet {
    entries: BTreeMap<VertexKey, (Vertex, f64)>,
}

impl ActiveSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The decomposition `{v: 1}`.
    pub fn singleton(v: Vertex) -> Self {
        let mut s = Self::new();
        s.entries.insert(v.key().clone(), (v, 1.0));
        s
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight(&self, key: &VertexKey) -> Option<f64> {
        self.entries.get(key).map(|(_, w)| *w)
    }

    /// Entries in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vertex, f64)> {
        self.entries.values().map(|(v, w)| (v, *w))
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.values().map(|(_, w)| w).sum()
    }

    /// `Σ λ(v) v`.
    pub fn combination(&self) -> Option<DenseVector> {
        let mut it = self.entries.values();
        let (v0, w0) = it.next()?;
        let mut acc = v0.point().scaled(*w0);
        for (v, w) in it {
            acc.axpy(*w, &v.point());
        }
        Some(acc)
    }

    /// Weights after the FW update `x ← (1−γ)x + γ v`.
    pub fn apply_fw_step(&mut self, v: &Vertex, gamma: f64) {
        if gamma >= 1.0 {
            *self = Self::singleton(v.clone());
            return;
        }
        for (_, w) in self.entries.values_mut() {
            *w *= 1.0 - gamma;
        }
        self.entries
            .entry(v.key().clone())
            .or_insert_with(|| (v.clone(), 0.0))
            .1 += gamma;
        self.prune();
    }

    /// Weights after the away update `x ← (1+γ)x − γ a`. When `drop` is set
    /// the away vertex is removed outright, which is the exact outcome of a
    /// step of length γ_max.
    pub fn apply_away_step(&mut self, a: &VertexKey, gamma: f64, drop: bool) {
        for (_, w) in self.entries.values_mut() {
            *w *= 1.0 + gamma;
        }
        if drop {
            self.entries.remove(a);
        } else if let Some(entry) = self.entries.get_mut(a) {
            entry.1 -= gamma;
        }
        self.prune();
    }

    /// Weights after moving mass `γ` from `a` to `v`.
    pub fn apply_pairwise_step(&mut self, v: &Vertex, a: &VertexKey, gamma: f64, drop: bool) {
        if drop {
            self.entries.remove(a);
        } else if let Some(entry) = self.entries.get_mut(a) {
            entry.1 -= gamma;
        }
        self.entries
            .entry(v.key().clone())
            .or_insert_with(|| (v.clone(), 0.0))
            .1 += gamma;
        self.prune();
    }

    fn prune(&mut self) {
        self.entries.retain(|_, (_, w)| *w > 0.0);
    }

    /// Checks that weights are positive and sum to one, and that the
    /// decomposition reproduces `x`.
    pub fn check(&self, x: &DenseVector, sum_tol: f64, point_tol: f64) -> Result<()> {
        if self.entries.values().any(|(_, w)| !(*w > 0.0)) {
            return Err(Error::Invariant(
                "active set holds a non-positive weight".into(),
            ));
        }
        let total = self.total_weight();
        if (total - 1.0).abs() > sum_tol {
            return Err(Error::Invariant(format!(
                "active-set weights sum to {total}"
            )));
        }
        let combo = self
            .combination()
            .ok_or_else(|| Error::Invariant("active set is empty".into()))?;
        let gap = combo.max_abs_diff(x);
        if gap > point_tol {
            return Err(Error::Invariant(format!(
                "active-set combination is {gap:e} away from the iterate"
            )));
        }
        Ok(())
    }
}

/// The active vertex maximizing `⟨∇f, v⟩` (ties to the smallest key) and
/// `γ_max = λ/(1−λ)`, with `+∞` when the vertex carries all the weight.
pub fn away_vertex(active: &ActiveSet, gradient: &DenseVector) -> Result<(Vertex, f64)> {
    let mut best: Option<(&Vertex, f64, f64)> = None;
    for (v, w) in active.iter() {
        let score = v.dot(gradient);
        if best.is_none_or(|(_, s, _)| score > s) {
            best = Some((v, score, w));
        }
    }
    let (v, _, w) = best.ok_or_else(|| Error::InvalidInput("active set is empty".into()))?;
    let gamma_max = if w >= 1.0 {
        f64::INFINITY
    } else {
        w / (1.0 - w)
    };
    Ok((v.clone(), gamma_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::ScaledSimplex;
    use crate::vector::dv;

    fn set(weights: &[(usize, f64)]) -> ActiveSet {
        let simplex = ScaledSimplex::probability(2).unwrap();
        let mut s = ActiveSet::new();
        for &(i, w) in weights {
            let v = simplex.vertex(i);
            s.entries.insert(v.key().clone(), (v, w));
        }
        s
    }

    #[test]
    fn away_vertex_examples() {
        let (v, g) = away_vertex(&set(&[(0, 0.5), (1, 0.5)]), &dv(&[1.0, 2.0])).unwrap();
        assert_eq!(v.into_point(), dv(&[0.0, 1.0]));
        assert_eq!(g, 1.0);

        let (v, g) = away_vertex(&set(&[(0, 1.0)]), &dv(&[7.0, -3.0])).unwrap();
        assert_eq!(v.into_point(), dv(&[1.0, 0.0]));
        assert!(g.is_infinite() && g > 0.0);

        let (v, g) = away_vertex(&set(&[(0, 0.25), (1, 0.75)]), &dv(&[3.0, 1.0])).unwrap();
        assert_eq!(v.into_point(), dv(&[1.0, 0.0]));
        assert!((g - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_set_is_an_error() {
        assert!(away_vertex(&ActiveSet::new(), &dv(&[1.0])).is_err());
    }

    #[test]
    fn updates_preserve_the_decomposition() {
        let simplex = ScaledSimplex::probability(3).unwrap();
        let v0 = simplex.vertex(0);
        let v1 = simplex.vertex(1);
        let v2 = simplex.vertex(2);
        let mut s = ActiveSet::singleton(v0.clone());
        let mut x = v0.point().into_owned();

        s.apply_fw_step(&v1, 0.3);
        x = x.scaled(0.7).add(&v1.point().scaled(0.3));
        s.check(&x, 1e-12, 1e-12).unwrap();

        s.apply_pairwise_step(&v2, v0.key(), 0.2, false);
        x = x.add(&v2.minus(&v0.point()).scaled(0.2));
        s.check(&x, 1e-12, 1e-12).unwrap();

        // Away from v2 with γ_max = 0.2/0.8 drops it.
        let (a, gmax) = away_vertex(&s, &dv(&[0.0, 0.0, 5.0])).unwrap();
        assert_eq!(a.key(), v2.key());
        s.apply_away_step(a.key(), gmax, true);
        x = x.add(&x.sub(&a.point()).scaled(gmax));
        s.check(&x, 1e-12, 1e-12).unwrap();
        assert_eq!(s.len(), 2);

        s.apply_fw_step(&v2, 1.0);
        assert_eq!(s.len(), 1);
        assert_eq!(s.weight(v2.key()), Some(1.0));
    }

    #[test]
    fn check_reports_violations() {
        let s = set(&[(0, 0.5), (1, 0.4)]);
        assert!(s.check(&dv(&[0.5, 0.4]), 1e-9, 1e-8).is_err());
        let s = set(&[(0, 0.5), (1, 0.5)]);
        assert!(s.check(&dv(&[0.6, 0.4]), 1e-9, 1e-8).is_err());
        assert!(s.check(&dv(&[0.5, 0.5]), 1e-9, 1e-8).is_ok());
    }
}
