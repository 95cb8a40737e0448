//! Numerical utilities: smoothness estimation, feasible sampling and
//! finite-difference gradient checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::objective::Objective;
use crate::regions::Region;
use crate::vector::DenseVector;

/// Oracle calls combined per sampled feasible point.
pub const SAMPLE_DIRECTIONS: usize = 5;

pub const DEFAULT_SMOOTHNESS_PAIRS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessEstimate {
    pub l_hat: f64,
    pub num_pairs: usize,
    pub seed: u64,
}

/// A random feasible point: the oracle is queried on `SAMPLE_DIRECTIONS`
/// standard-normal costs and the resulting vertices are mixed with
/// Dirichlet(1, …, 1) weights.
pub fn sample_feasible_point(region: &dyn Region, rng: &mut impl Rng) -> Result<DenseVector> {
    let mut weights: Vec<f64> = (0..SAMPLE_DIRECTIONS).map(|_| rng.sample(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut point = DenseVector::zeros(region.dim());
    for w in weights {
        let c = DenseVector::new(
            (0..region.dim())
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect(),
        )?;
        point.axpy(w, &region.lmo(&c)?.point());
    }
    Ok(point)
}

/// `safety · max ‖∇f(y) − ∇f(x)‖/‖y − x‖` over `num_pairs` sampled feasible
/// pairs. Pairs with `y = x` (up to rounding) are skipped.
pub fn estimate_smoothness(
    obj: &dyn Objective,
    region: &dyn Region,
    num_pairs: usize,
    seed: u64,
    safety: f64,
) -> Result<SmoothnessEstimate> {
    if num_pairs == 0 {
        return Err(invalid("need at least one sample pair"));
    }
    if !(safety >= 1.0 && safety.is_finite()) {
        return Err(invalid(format!(
            "safety factor must be at least 1, got {safety}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<f64> = None;
    for _ in 0..num_pairs {
        let x = sample_feasible_point(region, &mut rng)?;
        let y = sample_feasible_point(region, &mut rng)?;
        let dist = y.sub(&x).norm();
        // Mixing weights do not sum to exactly one, so identical vertex sets
        // can leave rounding-level gaps.
        if dist <= 1e-12 * (1.0 + x.norm().max(y.norm())) {
            continue;
        }
        let q = obj.gradient(&y)?.sub(&obj.gradient(&x)?).norm() / dist;
        best = Some(best.map_or(q, |b| b.max(q)));
    }
    let max = best
        .ok_or_else(|| Error::InvalidInput("every sampled pair was degenerate (y = x)".into()))?;
    if !(max > 0.0) {
        return Err(Error::InvalidInput(
            "gradient is constant on the sampled pairs".into(),
        ));
    }
    Ok(SmoothnessEstimate {
        l_hat: safety * max,
        num_pairs,
        seed,
    })
}

/// `maxᵢ |(f(x + h eᵢ) − f(x − h eᵢ))/(2h) − ∂ᵢf(x)|`.
pub fn check_gradient(obj: &dyn Objective, x: &DenseVector, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(invalid("step must be positive"));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("gradient-check point".into()));
    }
    let g = obj.gradient(x)?;
    let mut worst: f64 = 0.0;
    let mut probe = x.clone();
    for i in 0..x.dim() {
        probe[i] = x[i] + h;
        let up = obj.value(&probe)?;
        probe[i] = x[i] - h;
        let down = obj.value(&probe)?;
        probe[i] = x[i];
        if !up.is_finite() || !down.is_finite() {
            return Err(Error::NonFinite(format!("objective near coordinate {i}")));
        }
        worst = worst.max(((up - down) / (2.0 * h) - g[i]).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{GenericQuadratic, HuberCompletion, Logistic};
    use crate::regions::{L1Ball, ScaledSimplex};
    use crate::vector::dv;
    use nalgebra::DMatrix;

    #[test]
    fn identity_hessian_gives_one() {
        let f = GenericQuadratic::half_squared_distance(dv(&[0.0; 4])).unwrap();
        let region = L1Ball::new(4, 1.0).unwrap();
        let est = estimate_smoothness(&f, &region, 200, 3, 1.0).unwrap();
        assert!((est.l_hat - 1.0).abs() < 1e-12);
        let again = estimate_smoothness(&f, &region, 200, 3, 1.0).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn diagonal_hessian_is_bounded_by_its_top_eigenvalue() {
        let f = GenericQuadratic::diagonal(dv(&[1.0, 4.0]), dv(&[0.0, 0.0]), 0.0).unwrap();
        let region = L1Ball::new(2, 1.0).unwrap();
        let est = estimate_smoothness(&f, &region, 2000, 1, 1.0).unwrap();
        assert!(est.l_hat > 0.0 && est.l_hat <= 4.0 + 1e-12);
        assert!(est.l_hat > 3.0);
        let safe = estimate_smoothness(&f, &region, 2000, 1, 2.0).unwrap();
        assert_eq!(safe.l_hat, 2.0 * est.l_hat);
    }

    #[test]
    fn rejects_bad_arguments() {
        let f = GenericQuadratic::half_squared_distance(dv(&[0.0; 2])).unwrap();
        let region = ScaledSimplex::probability(2).unwrap();
        assert!(estimate_smoothness(&f, &region, 0, 0, 1.0).is_err());
        assert!(estimate_smoothness(&f, &region, 10, 0, 0.5).is_err());
        // A single-point region makes every pair degenerate.
        let point = ScaledSimplex::probability(1).unwrap();
        let f1 = GenericQuadratic::half_squared_distance(dv(&[0.0])).unwrap();
        assert!(estimate_smoothness(&f1, &point, 10, 0, 1.0).is_err());
    }

    #[test]
    fn gradient_checks() {
        let f = GenericQuadratic::half_squared_distance(dv(&[0.0, 0.0])).unwrap();
        assert!(check_gradient(&f, &dv(&[3.0, -2.0]), 1e-5).unwrap() <= 1e-9);

        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, -1.0, 0.5, 3.0, -2.0]);
        let logistic = Logistic::new(a, vec![1.0, -1.0, 1.0]).unwrap();
        assert!(check_gradient(&logistic, &dv(&[0.0, 0.0]), 1e-5).unwrap() <= 1e-7);

        // Residuals 3 − 0.5 = 2.5 (linear piece) and 0.2 − 0 = 0.2 (quadratic piece).
        let huber = HuberCompletion::new(2, 2, 1.0, vec![(0, 0, 3.0), (1, 1, 0.2)]).unwrap();
        assert!(check_gradient(&huber, &dv(&[0.5, 0.0, 0.0, 0.0]), 1e-5).unwrap() <= 1e-6);

        assert!(check_gradient(&f, &dv(&[0.0, 0.0]), 0.0).is_err());
    }
}
