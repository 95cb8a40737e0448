mod common;

use boostfw::objectives::generate::path_quadratic;
use boostfw::objectives::GenericQuadratic;
use boostfw::pursuit::PursuitConfig;
use boostfw::regions::{L1Ball, NuclearBall, ScaledSimplex};
use boostfw::solvers::{duality_gap, solve, Algorithm, SolverConfig, Status, StepRule, StepType};
use boostfw::{DenseVector, Error, Objective, Region};
use proptest::prelude::*;

const ALL: [Algorithm; 5] = [
    Algorithm::Fw,
    Algorithm::BoostFw,
    Algorithm::Afw,
    Algorithm::Dicg,
    Algorithm::BoostDicg,
];

fn config(alg: Algorithm, rule: StepRule, budget: usize) -> SolverConfig {
    let cfg = SolverConfig::new(alg, rule).with_budget(budget);
    if alg.is_boosted() {
        cfg.with_pursuit(PursuitConfig::new(1e-3, None).unwrap())
    } else {
        cfg
    }
}

fn rules(f: &dyn Objective) -> [StepRule; 3] {
    [
        StepRule::short(f.smoothness().unwrap()),
        StepRule::line_search(),
        StepRule::golden(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn feasible_monotone_and_accounted(
        seed in any::<u64>(),
        n in 3usize..30,
        rule_ix in 0usize..3,
        alg_ix in 0usize..5,
    ) {
        let f = common::random_quadratic(n, 0.2, 1.0, seed);
        let region = ScaledSimplex::new(n, 1.0).unwrap();
        let alg = ALL[alg_ix];
        let rule = rules(&f)[rule_ix];
        let mut cfg = config(alg, rule, 60);
        cfg.record_iterates = true;
        cfg.record_pursuits = true;
        let trace = solve(&f, &region, &cfg).unwrap();

        for x in trace.iterates.as_ref().unwrap() {
            prop_assert!(region.contains(x, 1e-9));
            prop_assert!(x.min_entry() >= -1e-12);
        }
        for w in trace.rows.windows(2) {
            prop_assert!(w[1].f_value <= w[0].f_value + 1e-12, "{alg}: ascent at t = {}", w[1].iter);
            prop_assert!(w[1].oracle_calls >= w[0].oracle_calls);
        }
        for r in &trace.rows {
            prop_assert!(r.duality_gap >= -1e-12);
            prop_assert!(r.duality_gap + 1e-12 >= 0.0);
        }

        // Oracle accounting from the recorded pursuits.
        let t = trace.iterations();
        let calls = trace.last().oracle_calls;
        match alg {
            Algorithm::Fw | Algorithm::Afw => prop_assert_eq!(calls, t + 1),
            Algorithm::Dicg => prop_assert_eq!(calls, 2 * t + 1),
            Algorithm::BoostFw => {
                let spent: usize = trace.pursuits.as_ref().unwrap()[..t]
                    .iter()
                    .map(|p| p.oracle_calls)
                    .sum();
                prop_assert_eq!(calls, spent + 1);
            }
            Algorithm::BoostDicg => {
                let spent: usize = trace.pursuits.as_ref().unwrap()[..t]
                    .iter()
                    .map(|p| p.oracle_calls + 1)
                    .sum();
                prop_assert_eq!(calls, spent + 1);
            }
        }
    }

    #[test]
    fn boosted_alignment_dominates(seed in any::<u64>(), n in 3usize..30) {
        let f = common::random_quadratic(n, 0.2, 1.0, seed);
        let region = L1Ball::new(n, 1.0).unwrap();
        let delta = 1e-3;
        let mut cfg = config(Algorithm::BoostFw, StepRule::short(f.smoothness().unwrap()), 40);
        cfg.record_iterates = true;
        let trace = solve(&f, &region, &cfg).unwrap();
        let xs = trace.iterates.as_ref().unwrap();
        for r in trace.rows.iter().skip(1) {
            if r.k_t <= 1 || r.step_type != StepType::Boost {
                continue;
            }
            let x = &xs[r.iter - 1];
            let g = f.gradient(x).unwrap();
            let v = region.lmo(&g).unwrap();
            let base = boostfw::align(&g.neg(), &v.point().sub(x)).unwrap();
            prop_assert!(r.eta >= base + (r.k_t as f64 - 1.0) * delta - 1e-9);
        }
    }
}

#[test]
fn oracle_lower_bound_holds_for_every_solver() {
    for n in [10, 40] {
        let f = GenericQuadratic::half_squared_distance(DenseVector::zeros(n)).unwrap();
        let region = ScaledSimplex::probability(n).unwrap();
        for alg in ALL {
            for rule in rules(&f) {
                let trace = solve(&f, &region, &config(alg, rule, 3 * n)).unwrap();
                for r in &trace.rows {
                    // f = ‖x‖²/2, so ‖x‖² ≥ 1/k after k oracle calls becomes f ≥ 1/(2k).
                    let bound = 0.5 / r.oracle_calls.min(n) as f64;
                    assert!(
                        r.f_value >= bound - 1e-12,
                        "{alg}: f = {} below {bound} after {} calls",
                        r.f_value,
                        r.oracle_calls
                    );
                }
            }
        }
    }
}

#[test]
fn traces_share_the_start_point() {
    let f = common::random_quadratic(12, 0.3, 1.0, 3);
    let region = ScaledSimplex::probability(12).unwrap();
    let starts: Vec<_> = ALL
        .iter()
        .map(|&alg| {
            let mut cfg = config(alg, StepRule::line_search(), 5);
            cfg.record_iterates = true;
            solve(&f, &region, &cfg).unwrap().iterates.unwrap()[0].clone()
        })
        .collect();
    assert!(starts.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn runs_are_deterministic() {
    let f = common::random_quadratic(15, 0.3, 1.0, 8);
    let region = L1Ball::new(15, 1.0).unwrap();
    for alg in [Algorithm::Fw, Algorithm::BoostFw, Algorithm::Afw] {
        let cfg = config(alg, StepRule::golden(), 50);
        let a = solve(&f, &region, &cfg).unwrap();
        let b = solve(&f, &region, &cfg).unwrap();
        let strip = |t: &boostfw::RunTrace| {
            t.rows
                .iter()
                .map(|r| {
                    (
                        r.iter,
                        r.oracle_calls,
                        r.f_value.to_bits(),
                        r.gamma.to_bits(),
                        r.k_t,
                    )
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.final_x, b.final_x);
    }
}

#[test]
fn agnostic_steps_follow_the_schedule() {
    let f = common::random_quadratic(10, 0.5, 1.0, 2);
    let region = ScaledSimplex::probability(10).unwrap();
    let trace = solve(&f, &region, &config(Algorithm::Fw, StepRule::Agnostic, 30)).unwrap();
    for r in trace.rows.iter().skip(1) {
        let t = (r.iter - 1) as f64;
        assert_eq!(r.gamma, 2.0 / (t + 2.0));
    }
}

#[test]
fn stops_on_the_duality_gap() {
    let f = common::random_quadratic(20, 0.5, 1.0, 5);
    let region = ScaledSimplex::probability(20).unwrap();
    let mut cfg = config(Algorithm::BoostFw, StepRule::line_search(), 10_000);
    cfg.stop_dual_gap = Some(1e-6);
    let trace = solve(&f, &region, &cfg).unwrap();
    assert!(matches!(trace.status, Status::DualGap | Status::Optimal));
    assert!(trace.last().duality_gap <= 1e-6);
    let g = f.gradient(&trace.final_x).unwrap();
    let gap = duality_gap(&g, &trace.final_x, &region).unwrap();
    assert!((gap - trace.last().duality_gap).abs() <= 1e-12);
}

#[test]
fn worst_case_adjustment_keeps_the_sublinear_bound() {
    let f = common::random_quadratic(25, 0.0, 1.0, 6);
    let region = L1Ball::new(25, 1.0).unwrap();
    let l = f.smoothness().unwrap();
    let d = region.diameter_bound();
    let f_star = common::projected_minimum(
        &f,
        l,
        &[0.0; 25],
        |v| common::project_l1_ball(v, 1.0),
        20_000,
    );
    let mut cfg = config(Algorithm::BoostFw, StepRule::short(l), 300);
    cfg.worst_case_adjustment = true;
    let trace = solve(&f, &region, &cfg).unwrap();
    for r in &trace.rows {
        let bound = 4.0 * l * d * d / (r.iter as f64 + 2.0);
        assert!(r.f_value - f_star <= bound + 1e-9, "t = {}", r.iter);
    }
    assert!(trace
        .rows
        .iter()
        .all(|r| r.step_type != StepType::Boost || r.gamma < 1.0));
}

#[test]
fn decomposition_invariant_solvers_on_a_flow_polytope() {
    let inst = path_quadratic(4, 3, 0.3, 2).unwrap();
    let region = &inst.region;
    assert!(region.supports_dicg());
    let l = inst.objective.smoothness().unwrap();
    for alg in [Algorithm::Dicg, Algorithm::BoostDicg, Algorithm::Fw] {
        let mut cfg = config(alg, StepRule::short(l), 200);
        cfg.record_iterates = true;
        let trace = solve(&inst.objective, region, &cfg).unwrap();
        for x in trace.iterates.as_ref().unwrap() {
            assert!(region.contains(x, 1e-9), "{alg} left the polytope");
            assert!(x.min_entry() >= -1e-12);
        }
        assert!(trace.last().duality_gap < trace.rows[0].duality_gap);
    }
}

#[test]
fn unsupported_combinations_are_rejected() {
    let f = common::random_quadratic(6, 0.5, 1.0, 1);
    let ball = L1Ball::new(6, 1.0).unwrap();
    let err = solve(
        &f,
        &ball,
        &config(Algorithm::Dicg, StepRule::line_search(), 10),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Unsupported(_)));

    let nuclear = NuclearBall::new(2, 3, 1.0).unwrap();
    let err = solve(
        &f,
        &nuclear,
        &config(Algorithm::BoostDicg, StepRule::line_search(), 10),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Unsupported(_)));

    // Boosted solvers need a pursuit configuration, plain ones must not have one.
    let simplex = ScaledSimplex::probability(6).unwrap();
    let mut bare = SolverConfig::new(Algorithm::BoostFw, StepRule::line_search());
    bare.pursuit = None;
    assert!(solve(&f, &simplex, &bare).is_err());
    let extra = SolverConfig::new(Algorithm::Fw, StepRule::line_search())
        .with_pursuit(PursuitConfig::new(1e-3, None).unwrap());
    assert!(solve(&f, &simplex, &extra).is_err());

    let wrong_dim = ScaledSimplex::probability(7).unwrap();
    assert!(solve(
        &f,
        &wrong_dim,
        &config(Algorithm::Fw, StepRule::line_search(), 5)
    )
    .is_err());
}

#[test]
fn zero_budget_is_invalid() {
    let f = common::random_quadratic(4, 0.5, 1.0, 1);
    let region = ScaledSimplex::probability(4).unwrap();
    let cfg = SolverConfig::new(Algorithm::Fw, StepRule::line_search()).with_budget(0);
    assert!(solve(&f, &region, &cfg).is_err());
}
