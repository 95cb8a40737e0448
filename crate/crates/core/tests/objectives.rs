mod common;

use boostfw::numerics::{check_gradient, estimate_smoothness, sample_feasible_point};
use boostfw::objectives::generate::{completion, logistic_regression, sparse_recovery, traffic};
use boostfw::objectives::{bpr_travel_time, Lifted};
use boostfw::regions::{lift_l1, L1Ball, NuclearBall, ScaledSimplex};
use boostfw::{DenseVector, Objective, Region};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Case {
    name: &'static str,
    obj: Box<dyn Objective>,
    region: Box<dyn Region>,
    grad_tol: f64,
}

fn shipped() -> Vec<Case> {
    let lasso = sparse_recovery(20, 30, 4, 0.05, 1).unwrap();
    let tau = lasso.tau;
    let logistic = logistic_regression(40, 15, 3, 0.1, 2).unwrap();
    let comp = completion(6, 8, 2, 0.5, 0.5, 0.1, 3).unwrap();
    let comp_tau = 2.0 * comp.planted_nuclear_norm;
    let net = traffic(3, 3, 0.3, 4).unwrap();
    vec![
        Case {
            name: "least_squares",
            obj: Box::new(lasso.objective.clone()),
            region: Box::new(L1Ball::new(30, tau).unwrap()),
            grad_tol: 1e-5,
        },
        Case {
            name: "lifted_least_squares",
            obj: Box::new(Lifted::new(lasso.objective)),
            region: Box::new(ScaledSimplex::new(60, tau).unwrap()),
            grad_tol: 1e-5,
        },
        Case {
            name: "logistic",
            obj: Box::new(logistic),
            region: Box::new(L1Ball::new(15, 5.0).unwrap()),
            grad_tol: 1e-7,
        },
        Case {
            name: "huber_completion",
            obj: Box::new(comp.objective),
            region: Box::new(NuclearBall::new(6, 8, comp_tau).unwrap()),
            grad_tol: 1e-6,
        },
        Case {
            name: "quadratic",
            obj: Box::new(common::random_quadratic(12, 0.3, 1.0, 5)),
            region: Box::new(ScaledSimplex::new(12, 2.0).unwrap()),
            grad_tol: 1e-6,
        },
        Case {
            name: "beckmann",
            obj: Box::new(net.objective),
            region: Box::new(net.region),
            grad_tol: 1e-5,
        },
    ]
}

#[test]
fn gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in shipped() {
        for _ in 0..100 {
            let x = sample_feasible_point(case.region.as_ref(), &mut rng).unwrap();
            let err = check_gradient(case.obj.as_ref(), &x, 1e-5).unwrap();
            assert!(err <= case.grad_tol, "{}: error {err:e}", case.name);
        }
    }
}

#[test]
fn declared_smoothness_satisfies_the_quadratic_upper_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in shipped() {
        let Some(l) = case.obj.smoothness() else {
            continue;
        };
        for _ in 0..1000 {
            let x = sample_feasible_point(case.region.as_ref(), &mut rng).unwrap();
            let y = sample_feasible_point(case.region.as_ref(), &mut rng).unwrap();
            let (fx, gx) = case.obj.value_and_gradient(&x).unwrap();
            let fy = case.obj.value(&y).unwrap();
            let d = y.sub(&x);
            let upper = fx + gx.dot(&d) + 0.5 * l * d.norm_sq();
            assert!(fy <= upper + 1e-9, "{}: f(y) = {fy} > {upper}", case.name);
        }
    }
}

#[test]
fn estimated_smoothness_never_exceeds_the_declared_constant() {
    for case in shipped() {
        let Some(l) = case.obj.smoothness() else {
            continue;
        };
        let est =
            estimate_smoothness(case.obj.as_ref(), case.region.as_ref(), 300, 7, 1.0).unwrap();
        assert!(
            est.l_hat <= l * (1.0 + 1e-9),
            "{}: {} > {l}",
            case.name,
            est.l_hat
        );
    }
}

#[test]
fn strongly_convex_quadratics_are_gradient_dominated() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..5 {
        let n = 10;
        let f = common::random_quadratic(n, 0.5, 1.0, seed);
        let s = f.strong_convexity().unwrap();
        assert!(s >= 0.5 - 1e-9);
        // Unconstrained minimum value: b = ∇f(0), minimizer −A⁻¹b.
        let b = f.gradient(&DenseVector::zeros(n)).unwrap();
        let a = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            f.gradient(&DenseVector::basis(n, j, 1.0)).unwrap()[i] - b[i]
        });
        let xs = a
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(b.as_slice()))
            .unwrap();
        let x_min = DenseVector::new(xs.iter().map(|v| -v).collect()).unwrap();
        let f_min = f.value(&x_min).unwrap();
        let region = ScaledSimplex::new(n, 3.0).unwrap();
        for _ in 0..200 {
            let x = sample_feasible_point(&region, &mut rng).unwrap();
            let g = f.gradient(&x).unwrap();
            let gap = f.value(&x).unwrap() - f_min;
            assert!(gap <= g.norm_sq() / (2.0 * s) + 1e-9);
        }
    }
}

#[test]
fn lifted_objective_composes_through_the_lift() {
    let inst = sparse_recovery(15, 25, 3, 0.05, 9).unwrap();
    let tau = inst.tau;
    let f = inst.objective.clone();
    let g = Lifted::new(inst.objective);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ball = L1Ball::new(25, tau).unwrap();
    for _ in 0..1000 {
        let x = sample_feasible_point(&ball, &mut rng).unwrap();
        let z = lift_l1(&x, tau).unwrap();
        let back = boostfw::regions::project_l1(&z).unwrap();
        assert_eq!(g.value(&z).unwrap(), f.value(&back).unwrap());
        let fx = f.value(&x).unwrap();
        assert!((g.value(&z).unwrap() - fx).abs() <= 1e-9 * fx.abs().max(1.0));
        let gz = g.gradient(&z).unwrap();
        let gx = f.gradient(&back).unwrap();
        for i in 0..25 {
            assert_eq!(gz[i], gx[i]);
            assert_eq!(gz[25 + i], -gx[i]);
        }
    }
}

#[test]
fn beckmann_gradient_is_the_travel_time() {
    let net = traffic(4, 4, 0.3, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let x = sample_feasible_point(&net.region, &mut rng).unwrap();
        let g = net.objective.gradient(&x).unwrap();
        for (a, link) in net.network.links().iter().enumerate() {
            let t = link.free_flow_time * (1.0 + 0.15 * (x[a] / link.capacity).powi(4));
            assert!((g[a] - t).abs() <= 1e-12 * t.max(1.0));
            assert_eq!(g[a], bpr_travel_time(link, x[a]));
        }
    }
}

#[test]
fn huber_gradient_lives_on_the_observed_entries() {
    let inst = completion(8, 9, 2, 0.3, 0.5, 0.2, 6).unwrap();
    let f = &inst.objective;
    let (rows, cols) = f.shape();
    let m = f.num_observed() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut observed = vec![false; rows * cols];
    for _ in 0..50 {
        let x = DenseVector::new(
            (0..rows * cols)
                .map(|_| rng.random_range(-3.0..3.0))
                .collect(),
        )
        .unwrap();
        let g = f.gradient(&x).unwrap();
        for (k, v) in g.iter().enumerate() {
            if *v != 0.0 {
                observed[k] = true;
            }
            // |h'| ≤ ρ, scaled by 1/|ℐ|.
            assert!(v.abs() <= f.rho() / m + 1e-15);
        }
    }
    assert_eq!(observed.iter().filter(|&&o| o).count(), f.num_observed());

    // Per-entry Lipschitz: moving one observed entry by h changes its
    // gradient entry by at most h/|ℐ|.
    for _ in 0..200 {
        let x = DenseVector::new(
            (0..rows * cols)
                .map(|_| rng.random_range(-3.0..3.0))
                .collect(),
        )
        .unwrap();
        let k = rng.random_range(0..rows * cols);
        let h = rng.random_range(-1.0..1.0);
        let mut y = x.clone();
        y.as_mut_slice()[k] += h;
        let dg = (f.gradient(&y).unwrap()[k] - f.gradient(&x).unwrap()[k]).abs();
        assert!(dg <= h.abs() / m + 1e-15);
    }
}
