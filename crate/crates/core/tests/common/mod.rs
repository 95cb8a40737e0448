//! Instances and independent reference oracles shared by the integration
//! tests. Nothing here calls the Frank-Wolfe solvers.

#![allow(dead_code)]

use boostfw::objectives::GenericQuadratic;
use boostfw::{DenseVector, Objective};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// `xᵀAx/2 + bᵀx` with `A = MᵀM/n + μI` for a Gaussian `n × n` matrix `M`.
pub fn random_quadratic(n: usize, mu: f64, b_scale: f64, seed: u64) -> GenericQuadratic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let mut a = m.transpose() * &m / n as f64;
    for i in 0..n {
        a[(i, i)] += mu;
    }
    // Exact symmetry for the constructor's check.
    let a = (&a + a.transpose()) * 0.5;
    let b: Vec<f64> = (0..n)
        .map(|_| b_scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    GenericQuadratic::new(a, DenseVector::new(b).unwrap(), 0.0).unwrap()
}

/// Euclidean projection onto `{x ≥ 0, Σx = tau}` by sorting.
pub fn project_simplex(v: &[f64], tau: f64) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - tau) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Euclidean projection onto `{‖x‖₁ ≤ tau}`.
pub fn project_l1_ball(v: &[f64], tau: f64) -> Vec<f64> {
    if v.iter().map(|x| x.abs()).sum::<f64>() <= tau {
        return v.to_vec();
    }
    let mag = project_simplex(&v.iter().map(|x| x.abs()).collect::<Vec<_>>(), tau);
    v.iter().zip(mag).map(|(x, m)| m.copysign(*x)).collect()
}

/// Minimum of a smooth convex objective over a set with a cheap projection,
/// by accelerated projected gradient with step `1/L`.
pub fn projected_minimum(
    obj: &dyn Objective,
    lipschitz: f64,
    start: &[f64],
    project: impl Fn(&[f64]) -> Vec<f64>,
    iters: usize,
) -> f64 {
    projected_minimizer(obj, lipschitz, start, project, iters).1
}

/// Best iterate and value of the accelerated projected gradient run behind
/// [`projected_minimum`].
pub fn projected_minimizer(
    obj: &dyn Objective,
    lipschitz: f64,
    start: &[f64],
    project: impl Fn(&[f64]) -> Vec<f64>,
    iters: usize,
) -> (Vec<f64>, f64) {
    let mut x = project(start);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut best = (x.clone(), f64::INFINITY);
    for _ in 0..iters {
        let g = obj.gradient(&DenseVector::new(y.clone()).unwrap()).unwrap();
        let step: Vec<f64> = y
            .iter()
            .zip(g.iter())
            .map(|(yi, gi)| yi - gi / lipschitz)
            .collect();
        let next = project(&step);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        y = next
            .iter()
            .zip(&x)
            .map(|(n, o)| n + (t - 1.0) / t_next * (n - o))
            .collect();
        x = next;
        t = t_next;
        let fx = obj.value(&DenseVector::new(x.clone()).unwrap()).unwrap();
        if fx < best.1 {
            best = (x.clone(), fx);
        }
    }
    best
}

/// Largest singular value by a dense SVD.
pub fn top_singular_value(flat: &[f64], rows: usize, cols: usize) -> f64 {
    DMatrix::from_row_slice(rows, cols, flat)
        .singular_values()
        .max()
}
