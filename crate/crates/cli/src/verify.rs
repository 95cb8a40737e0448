//! Named invariant suites run by `boostfw verify`.
//!
//! Each suite either passes with a one-line summary or fails with the first
//! counterexample it found.

use boostfw::numerics::{check_gradient, sample_feasible_point};
use boostfw::objectives::generate::{
    completion, logistic_regression, random_quadratic, sparse_recovery, traffic,
};
use boostfw::objectives::Lifted;
use boostfw::pursuit::RoundKind;
use boostfw::regions::{
    exact_lift_ruled_out, lift_l1, lmo_l1_ball, lmo_scaled_simplex, nuclear_norm, project_l1,
    L1Ball, NuclearBall, ScaledSimplex, VertexPolytope,
};
use boostfw::solvers::{solve, Algorithm, SolverConfig, StepRule, StepType};
use boostfw::{align, DenseVector, Objective, Region, RunTrace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::config::RuleName;
use crate::instance::lower_bound_objective;
use crate::ValidationError;

pub const SUITES: [&str; 7] = [
    "lower_bound",
    "lift_roundtrip",
    "lmo_optimality",
    "pursuit_invariants",
    "solver_invariants",
    "gradients",
    "smoothness",
];

const ALGORITHMS: [Algorithm; 5] = [
    Algorithm::Fw,
    Algorithm::BoostFw,
    Algorithm::Afw,
    Algorithm::Dicg,
    Algorithm::BoostDicg,
];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Summary on success, counterexample on failure.
    pub detail: String,
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Expands `all` and resolves aliases; unknown names are an error.
pub fn resolve(names: &[String]) -> Result<Vec<&'static str>, ValidationError> {
    if names.is_empty() {
        return Err(ValidationError(format!(
            "name at least one suite: {} or all",
            SUITES.join(", ")
        )));
    }
    let mut out: Vec<&'static str> = Vec::new();
    for name in names {
        let found: Vec<&'static str> = match name.as_str() {
            "all" => SUITES.to_vec(),
            "fact2_roundtrip" => vec!["lift_roundtrip"],
            n => match SUITES.iter().find(|s| **s == n) {
                Some(s) => vec![*s],
                None => {
                    return Err(ValidationError(format!(
                        "unknown suite `{n}` (known: {}, all)",
                        SUITES.join(", ")
                    )))
                }
            },
        };
        for s in found {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

pub fn run_suite(name: &'static str) -> SuiteOutcome {
    let result = match name {
        "lower_bound" => lower_bound(),
        "lift_roundtrip" => lift_roundtrip(),
        "lmo_optimality" => lmo_optimality(),
        "pursuit_invariants" => pursuit_invariants(),
        "solver_invariants" => solver_invariants(),
        "gradients" => gradients(),
        "smoothness" => smoothness(),
        _ => Err(format!("no suite named `{name}`")),
    };
    match result {
        Ok(detail) => SuiteOutcome {
            name,
            passed: true,
            detail,
        },
        Err(detail) => SuiteOutcome {
            name,
            passed: false,
            detail,
        },
    }
}

/// Resolves the names and runs each suite in order.
pub fn verify_suite(names: &[String]) -> Result<Vec<SuiteOutcome>, ValidationError> {
    Ok(resolve(names)?.into_iter().map(run_suite).collect())
}

fn run(obj: &dyn Objective, region: &dyn Region, cfg: &SolverConfig) -> Result<RunTrace, String> {
    solve(obj, region, cfg).map_err(|e| format!("{} failed: {e}", cfg.algorithm))
}

fn normal_vector(n: usize, rng: &mut impl Rng) -> DenseVector {
    DenseVector::new((0..n).map(|_| rng.sample(StandardNormal)).collect())
        .expect("normal samples are finite")
}

/// `‖x‖²` over the probability simplex in dimension 1000: after `c` oracle
/// calls at most `c` coordinates are nonzero, so `f·(c + 1) ≥ 1`.
fn lower_bound() -> Check {
    let n = 1000;
    let f = lower_bound_objective(n).map_err(|e| e.to_string())?;
    let region = ScaledSimplex::probability(n).map_err(|e| e.to_string())?;
    let mut worst = f64::INFINITY;
    let mut best_f = f64::INFINITY;
    for alg in ALGORITHMS {
        let cfg = SolverConfig::new(alg, StepRule::line_search()).with_budget(400);
        let trace = run(&f, &region, &cfg)?;
        for r in &trace.rows {
            let product = r.f_value * (r.oracle_calls as f64 + 1.0);
            ensure(product >= 1.0 - 1e-9, || {
                format!(
                    "{alg}: f = {:e} after {} calls gives f·(calls+1) = {product}",
                    r.f_value, r.oracle_calls
                )
            })?;
            worst = worst.min(product);
            best_f = best_f.min(r.f_value);
        }
    }
    ensure(best_f >= 1.0 / n as f64 - 1e-12, || {
        format!("f = {best_f:e} below the optimum 1/n")
    })?;
    Ok(format!(
        "5 solvers, min f·(calls+1) = {worst:.12}, min f = {best_f:.6e}"
    ))
}

/// Lifting points of the ℓ1-ball into `τΔ₂ₙ` and projecting back.
fn lift_roundtrip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let (mut exact, mut certified) = (0, 0);
    for _ in 0..1000 {
        let n = rng.random_range(1..=20);
        let tau = 10f64.powf(rng.random_range(-2.0..2.0));
        let e: Vec<f64> = (0..=n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = e.iter().sum();
        let x = DenseVector::new(
            e[..n]
                .iter()
                .map(|w| {
                    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    sign * tau * w / total
                })
                .collect(),
        )
        .map_err(|e| e.to_string())?;
        let z = lift_l1(&x, tau).map_err(|e| format!("lift of {x:?}: {e}"))?;
        let sum: f64 = z.iter().sum();
        ensure(
            z.min_entry() >= 0.0 && (sum - tau).abs() <= 1e-12 * tau.max(1.0),
            || format!("lift of {x:?} (τ = {tau}) leaves τΔ₂ₙ: sum {sum}"),
        )?;
        let back = project_l1(&z).map_err(|e| e.to_string())?;
        if back == x {
            exact += 1;
            continue;
        }
        ensure(exact_lift_ruled_out(&x, tau), || {
            format!("round trip of {x:?} (τ = {tau}) is inexact although an exact lift may exist")
        })?;
        let err = back.max_abs_diff(&x);
        ensure(err <= 4.0 * f64::EPSILON * tau, || {
            format!("round trip of {x:?} (τ = {tau}) is off by {err:e}")
        })?;
        certified += 1;
    }
    Ok(format!(
        "1000 points: {exact} bit-exact, {certified} within rounding with no exact float lift"
    ))
}

/// Oracle outputs against enumeration (simplex, ℓ1, polygon) and against
/// singular-value bounds (nuclear ball).
fn lmo_optimality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let pentagon = VertexPolytope::polygon(
        (0..5)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
                [a.cos(), a.sin()]
            })
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    for _ in 0..1000 {
        let n = rng.random_range(1..=12);
        let tau = rng.random_range(0.1..5.0);
        let c = normal_vector(n, &mut rng);

        let v = lmo_scaled_simplex(&c, tau);
        let best = c.iter().map(|ci| tau * ci).fold(f64::INFINITY, f64::min);
        ensure(v.dot(&c) == best, || {
            format!("simplex: cost {c:?}, τ = {tau}: {} vs {best}", v.dot(&c))
        })?;

        let v = lmo_l1_ball(&c, tau);
        let best = c
            .iter()
            .map(|ci| -tau * ci.abs())
            .fold(f64::INFINITY, f64::min);
        ensure(v.dot(&c) == best, || {
            format!("l1 ball: cost {c:?}, τ = {tau}: {} vs {best}", v.dot(&c))
        })?;

        let c2 = normal_vector(2, &mut rng);
        let got = pentagon.lmo(&c2).map_err(|e| e.to_string())?.dot(&c2);
        let best = pentagon
            .vertices()
            .iter()
            .map(|p| p.dot(&c2))
            .fold(f64::INFINITY, f64::min);
        ensure(got <= best + 1e-12, || {
            format!("pentagon: cost {c2:?}: {got} vs {best}")
        })?;
    }
    for _ in 0..200 {
        let (rows, cols) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let tau = rng.random_range(0.1..5.0);
        let ball = NuclearBall::new(rows, cols, tau).map_err(|e| e.to_string())?;
        let c = normal_vector(rows * cols, &mut rng);
        let v = ball.lmo(&c).map_err(|e| e.to_string())?;
        let value = v.dot(&c);
        // σ₁ is at least every row and column norm and at most ‖c‖_F.
        let s = c.as_slice();
        let row_max = (0..rows)
            .map(|i| {
                s[i * cols..(i + 1) * cols]
                    .iter()
                    .map(|x| x * x)
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        let col_max = (0..cols)
            .map(|j| {
                (0..rows)
                    .map(|i| s[i * cols + j].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        let lower = row_max.max(col_max);
        let tol = 1e-9 * tau * c.norm();
        ensure(
            value <= -tau * lower + tol && value >= -tau * c.norm() - tol,
            || format!("nuclear {rows}x{cols}: ⟨V, c⟩ = {value} outside [−τ‖c‖_F, −τ·{lower}]"),
        )?;
        let nuc = nuclear_norm(&v.point(), rows, cols);
        ensure(nuc <= tau * (1.0 + 1e-9), || {
            format!("nuclear {rows}x{cols}: output has norm {nuc} > {tau}")
        })?;
    }
    Ok("1000 costs on simplex, ℓ1-ball and pentagon; 200 on nuclear balls".into())
}

/// Recorded pursuits: alignment dominance, nonnegative weights, monotone
/// residuals and the backward-step factor.
fn pursuit_invariants() -> Check {
    let delta = 1e-3;
    let mut pursuits = 0;
    let mut rounds = 0;
    for seed in 0..4u64 {
        let n = 30;
        let f = random_quadratic(n, 0.5, 1.0, seed).map_err(|e| e.to_string())?;
        let regions: [Box<dyn Region>; 2] = [
            Box::new(ScaledSimplex::probability(n).map_err(|e| e.to_string())?),
            Box::new(L1Ball::new(n, 1.0).map_err(|e| e.to_string())?),
        ];
        for region in &regions {
            let l = f.smoothness().ok_or("quadratic without smoothness")?;
            let mut cfg = SolverConfig::new(Algorithm::BoostFw, StepRule::short(l)).with_budget(60);
            cfg.record_iterates = true;
            cfg.record_pursuits = true;
            let trace = run(&f, region.as_ref(), &cfg)?;
            let xs = trace.iterates.as_ref().ok_or("no iterates recorded")?;
            let ps = trace.pursuits.as_ref().ok_or("no pursuits recorded")?;
            for (t, p) in ps.iter().enumerate().take(xs.len()) {
                let x = &xs[t];
                let where_ = || format!("{} seed {seed} t = {t}", region.name());
                let g = f.gradient(x).map_err(|e| e.to_string())?;
                let base =
                    align(&g.neg(), &p.first_vertex.point().sub(x)).map_err(|e| e.to_string())?;
                let want = base + (p.rounds as f64 - 1.0) * delta - 1e-9;
                ensure(p.alignment_final >= want, || {
                    format!("{}: η = {} below {want}", where_(), p.alignment_final)
                })?;
                ensure(p.scale >= -1e-12, || {
                    format!("{}: Λ = {}", where_(), p.scale)
                })?;
                let mut last = f64::INFINITY;
                for r in &p.trace {
                    rounds += 1;
                    ensure(r.lambda >= -1e-12, || {
                        format!("{}: λ = {:e} in round {}", where_(), r.lambda, r.k)
                    })?;
                    if r.kind == RoundKind::Backward {
                        let b = r.backward_factor.unwrap_or(f64::NAN);
                        ensure(b >= 0.5 - 1e-12, || {
                            format!("{}: backward factor {b}", where_())
                        })?;
                    }
                    ensure(r.residual_norm <= last * (1.0 + 1e-12), || {
                        format!("{}: residual rose to {:e}", where_(), r.residual_norm)
                    })?;
                    last = r.residual_norm;
                }
                pursuits += 1;
            }
        }
    }
    Ok(format!("{pursuits} pursuits, {rounds} rounds"))
}

/// Feasibility, monotone descent, nonnegative gaps and oracle accounting for
/// every algorithm and step rule on simplex quadratics.
fn solver_invariants() -> Check {
    let mut runs = 0;
    for seed in 0..3u64 {
        let n = 20;
        let f = random_quadratic(n, 0.2, 1.0, seed).map_err(|e| e.to_string())?;
        let region = ScaledSimplex::new(n, 2.0).map_err(|e| e.to_string())?;
        let l = f.smoothness().ok_or("quadratic without smoothness")?;
        for alg in ALGORITHMS {
            for name in [
                RuleName::Agnostic,
                RuleName::Short,
                RuleName::Ls,
                RuleName::Golden,
            ] {
                let rule = name.rule(Some(l)).ok_or("no step rule")?;
                let monotone = name != RuleName::Agnostic;
                let mut cfg = SolverConfig::new(alg, rule).with_budget(80);
                cfg.record_iterates = true;
                let trace = run(&f, &region, &cfg)?;
                let tag = || format!("{alg} {} seed {seed}", name.as_str());
                for (t, x) in trace.iterates.iter().flatten().enumerate() {
                    ensure(region.contains(x, 1e-9), || {
                        format!("{}: iterate {t} is infeasible", tag())
                    })?;
                }
                for w in trace.rows.windows(2) {
                    ensure(!monotone || w[1].f_value <= w[0].f_value + 1e-12, || {
                        format!("{}: f rose to {} at t = {}", tag(), w[1].f_value, w[1].iter)
                    })?;
                    ensure(w[1].oracle_calls > w[0].oracle_calls, || {
                        format!("{}: oracle calls stalled at t = {}", tag(), w[1].iter)
                    })?;
                }
                for r in &trace.rows {
                    ensure(r.duality_gap >= -1e-12, || {
                        format!("{}: gap {:e} at t = {}", tag(), r.duality_gap, r.iter)
                    })?;
                    ensure(r.iter == 0 || r.step_type != StepType::Start, || {
                        format!("{}: start step at t = {}", tag(), r.iter)
                    })?;
                }
                let t = trace.iterations();
                let calls = trace.last().oracle_calls;
                let expected = match alg {
                    Algorithm::Fw | Algorithm::Afw => Some(t + 1),
                    Algorithm::Dicg => Some(2 * t + 1),
                    _ => None,
                };
                if let Some(e) = expected {
                    ensure(calls == e, || {
                        format!(
                            "{}: {calls} oracle calls after {t} steps, expected {e}",
                            tag()
                        )
                    })?;
                }
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} runs"))
}

type Case = (&'static str, Box<dyn Objective>, Box<dyn Region>);

fn shipped() -> Result<Vec<Case>, String> {
    let e = |e: boostfw::Error| e.to_string();
    let lasso = sparse_recovery(20, 30, 4, 0.05, 1).map_err(e)?;
    let tau = lasso.tau;
    let comp = completion(6, 8, 2, 0.5, 0.5, 0.1, 3).map_err(e)?;
    let comp_tau = 2.0 * comp.planted_nuclear_norm;
    let net = traffic(3, 3, 0.3, 4).map_err(e)?;
    Ok(vec![
        (
            "least_squares",
            Box::new(lasso.objective.clone()),
            Box::new(L1Ball::new(30, tau).map_err(e)?),
        ),
        (
            "lifted_least_squares",
            Box::new(Lifted::new(lasso.objective)),
            Box::new(ScaledSimplex::new(60, tau).map_err(e)?),
        ),
        (
            "logistic",
            Box::new(logistic_regression(40, 15, 3, 0.1, 2).map_err(e)?),
            Box::new(L1Ball::new(15, 5.0).map_err(e)?),
        ),
        (
            "huber_completion",
            Box::new(comp.objective),
            Box::new(NuclearBall::new(6, 8, comp_tau).map_err(e)?),
        ),
        (
            "quadratic",
            Box::new(random_quadratic(12, 0.3, 1.0, 5).map_err(e)?),
            Box::new(ScaledSimplex::new(12, 2.0).map_err(e)?),
        ),
        ("beckmann", Box::new(net.objective), Box::new(net.region)),
    ])
}

/// Central differences against the analytic gradient.
fn gradients() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let cases = shipped()?;
    for (name, obj, region) in &cases {
        for _ in 0..20 {
            let x = sample_feasible_point(region.as_ref(), &mut rng).map_err(|e| e.to_string())?;
            let err = check_gradient(obj.as_ref(), &x, 1e-5).map_err(|e| e.to_string())?;
            let scale = obj.gradient(&x).map_err(|e| e.to_string())?.norm().max(1.0);
            ensure(err <= 1e-5 * scale, || {
                format!("{name}: finite-difference error {err:e} at {x:?}")
            })?;
        }
    }
    Ok(format!("{} objectives, 20 points each", cases.len()))
}

/// `f(y) ≤ f(x) + ⟨∇f(x), y − x⟩ + L/2 ‖y − x‖²` for the declared `L`.
fn smoothness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut checked = 0;
    for (name, obj, region) in shipped()? {
        let Some(l) = obj.smoothness() else {
            continue;
        };
        for _ in 0..200 {
            let x = sample_feasible_point(region.as_ref(), &mut rng).map_err(|e| e.to_string())?;
            let y = sample_feasible_point(region.as_ref(), &mut rng).map_err(|e| e.to_string())?;
            let (fx, gx) = obj.value_and_gradient(&x).map_err(|e| e.to_string())?;
            let fy = obj.value(&y).map_err(|e| e.to_string())?;
            let d = y.sub(&x);
            let upper = fx + gx.dot(&d) + 0.5 * l * d.norm_sq();
            ensure(fy <= upper + 1e-9 * fy.abs().max(1.0), || {
                format!("{name}: f(y) = {fy} exceeds the quadratic bound {upper} (L = {l})")
            })?;
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} objectives with a declared L, 200 pairs each"
    ))
}
