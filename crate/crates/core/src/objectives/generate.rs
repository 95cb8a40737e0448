//! Synthetic instance generators. Every generator is deterministic in its seed.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Beckmann, GenericQuadratic, HuberCompletion, LeastSquares, Logistic};
use crate::error::{invalid, Error, Result};
use crate::regions::{nuclear_norm, DagFlowRegion, DagNetwork, Demand, Link};
use crate::vector::DenseVector;

/// Attempts made to draw a layered network in which every pair of
/// consecutive layers keeps at least one link.
pub const MAX_NETWORK_ATTEMPTS: u64 = 100;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// A sparse signal observed through a Gaussian design with Gaussian noise.
#[derive(Debug, Clone)]
pub struct SparseRecovery {
    pub objective: LeastSquares,
    pub x_star: DenseVector,
    /// `‖x*‖₁`, the radius of the constraint ball.
    pub tau: f64,
}

/// `y = A x* + w` with `A` standard Gaussian `m × n`, `x*` supported on
/// `sparsity` random coordinates with Gaussian values, and `w ~ N(0, σ²I)`.
pub fn sparse_recovery(
    m: usize,
    n: usize,
    sparsity: usize,
    sigma: f64,
    seed: u64,
) -> Result<SparseRecovery> {
    if m == 0 || n == 0 {
        return Err(invalid("dimensions must be positive"));
    }
    if sparsity == 0 || sparsity > n {
        return Err(invalid(format!(
            "sparsity must lie in 1..={n}, got {sparsity}"
        )));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(invalid("noise level must be nonnegative"));
    }
    let mut rng = rng(seed);
    let a = gaussian_matrix(m, n, &mut rng);
    let mut x_star = vec![0.0; n];
    let mut support = sample(&mut rng, n, sparsity).into_vec();
    support.sort_unstable();
    for i in support {
        // Keep planted entries away from zero so the support is exact.
        let v: f64 = rng.sample(StandardNormal);
        x_star[i] = if v >= 0.0 { v + 0.1 } else { v - 0.1 };
    }
    let x = DVector::from_column_slice(&x_star);
    let noise = DVector::from_fn(m, |_, _| sigma * rng.sample::<f64, _>(StandardNormal));
    let y = &a * &x + noise;
    let x_star = DenseVector::new(x_star)?;
    let tau = x_star.l1_norm();
    Ok(SparseRecovery {
        objective: LeastSquares::new(a, DenseVector::new(y.as_slice().to_vec())?)?,
        x_star,
        tau,
    })
}

/// Labels `sign(aᵢᵀw* + σ εᵢ)` for Gaussian samples and a sparse Gaussian `w*`.
pub fn logistic_regression(
    m: usize,
    n: usize,
    sparsity: usize,
    sigma: f64,
    seed: u64,
) -> Result<Logistic> {
    if m == 0 || n == 0 {
        return Err(invalid("dimensions must be positive"));
    }
    if sparsity == 0 || sparsity > n {
        return Err(invalid(format!(
            "sparsity must lie in 1..={n}, got {sparsity}"
        )));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(invalid("noise level must be nonnegative"));
    }
    let mut rng = rng(seed);
    let a = gaussian_matrix(m, n, &mut rng);
    let mut w = DVector::zeros(n);
    for i in sample(&mut rng, n, sparsity) {
        w[i] = rng.sample(StandardNormal);
    }
    let margins = &a * &w;
    let labels = margins
        .iter()
        .map(|&z| {
            let e: f64 = rng.sample(StandardNormal);
            if z + sigma * e >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    Logistic::new(a, labels)
}

/// Links between consecutive layers of `width` nodes, each kept with
/// probability `1 − drop`. Node `l·width + i` is node `i` of layer `l`.
/// Returns `None` when some pair of consecutive layers keeps no link.
fn layered_links(
    layers: usize,
    width: usize,
    drop: f64,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<(usize, usize)>> {
    let mut links = Vec::new();
    for l in 0..layers.saturating_sub(1) {
        let before = links.len();
        for i in 0..width {
            for j in 0..width {
                if rng.random::<f64>() >= drop {
                    links.push((l * width + i, (l + 1) * width + j));
                }
            }
        }
        if links.len() == before {
            return None;
        }
    }
    Some(links)
}

fn validate_layers(layers: usize, width: usize, drop: f64) -> Result<()> {
    if layers < 2 || width == 0 {
        return Err(invalid("need at least two layers of at least one node"));
    }
    if !(0.0..1.0).contains(&drop) {
        return Err(invalid(format!(
            "drop probability must lie in [0, 1), got {drop}"
        )));
    }
    Ok(())
}

fn draw_layered(
    layers: usize,
    width: usize,
    drop: f64,
    seed: u64,
) -> Result<(ChaCha8Rng, Vec<(usize, usize)>)> {
    validate_layers(layers, width, drop)?;
    for attempt in 0..MAX_NETWORK_ATTEMPTS {
        let mut rng = rng(seed.wrapping_add(attempt));
        if let Some(links) = layered_links(layers, width, drop, &mut rng) {
            return Ok((rng, links));
        }
    }
    Err(Error::InvalidInput(format!(
        "could not draw a connected layered network in {MAX_NETWORK_ATTEMPTS} attempts"
    )))
}

/// A traffic-assignment instance.
#[derive(Debug, Clone)]
pub struct TrafficInstance {
    pub network: DagNetwork,
    pub demands: Vec<Demand>,
    pub region: DagFlowRegion,
    pub objective: Beckmann,
}

/// Free-flow times are drawn from `U[1, 2]` and capacities from `U[2, 4]`.
pub const FREE_FLOW_RANGE: (f64, f64) = (1.0, 2.0);
pub const CAPACITY_RANGE: (f64, f64) = (2.0, 4.0);

/// Layered network with links dropped at random and a `U[0, 1]` demand for
/// every origin-destination pair connected by a path.
pub fn traffic(layers: usize, width: usize, drop: f64, seed: u64) -> Result<TrafficInstance> {
    let (mut rng, pairs) = draw_layered(layers, width, drop, seed)?;
    let links = pairs
        .into_iter()
        .enumerate()
        .map(|(id, (from, to))| Link {
            id,
            from,
            to,
            free_flow_time: rng.random_range(FREE_FLOW_RANGE.0..FREE_FLOW_RANGE.1),
            capacity: rng.random_range(CAPACITY_RANGE.0..CAPACITY_RANGE.1),
        })
        .collect();
    let network = DagNetwork::new(layers * width, links)?;
    let mut demands = Vec::new();
    for origin in 0..network.num_nodes() {
        for dest in network.reachable_from(origin) {
            demands.push(Demand {
                origin,
                dest,
                amount: rng.random::<f64>(),
            });
        }
    }
    if demands.is_empty() {
        return Err(invalid("generated network carries no demand"));
    }
    let region = DagFlowRegion::new(network.clone(), demands.clone())?;
    let objective = Beckmann::new(&network);
    Ok(TrafficInstance {
        network,
        demands,
        region,
        objective,
    })
}

/// A low-rank matrix observed on a random subset of entries.
#[derive(Debug, Clone)]
pub struct CompletionInstance {
    pub objective: HuberCompletion,
    /// The planted matrix, row-major.
    pub planted: DenseVector,
    pub planted_nuclear_norm: f64,
}

/// Planted `U Vᵀ` with Gaussian factors of the given rank, observed on
/// `round(fraction · rows · cols)` distinct entries with additive Gaussian
/// noise of standard deviation `noise`.
#[allow(clippy::too_many_arguments)]
pub fn completion(
    rows: usize,
    cols: usize,
    rank: usize,
    observed_fraction: f64,
    rho: f64,
    noise: f64,
    seed: u64,
) -> Result<CompletionInstance> {
    if rows == 0 || cols == 0 {
        return Err(invalid("matrix shape must be positive"));
    }
    if rank == 0 || rank > rows.min(cols) {
        return Err(invalid(format!("rank must lie in 1..={}", rows.min(cols))));
    }
    if !(observed_fraction > 0.0 && observed_fraction <= 1.0) {
        return Err(invalid("observed fraction must lie in (0, 1]"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(invalid("noise level must be nonnegative"));
    }
    let mut rng = rng(seed);
    let u = gaussian_matrix(rows, rank, &mut rng);
    let v = gaussian_matrix(cols, rank, &mut rng);
    let planted = &u * v.transpose();
    let total = rows * cols;
    let count = ((observed_fraction * total as f64).round() as usize).clamp(1, total);
    let mut picks = sample(&mut rng, total, count).into_vec();
    picks.sort_unstable();
    let observed = picks
        .into_iter()
        .map(|k| {
            let (i, j) = (k / cols, k % cols);
            let e: f64 = rng.sample(StandardNormal);
            (i, j, planted[(i, j)] + noise * e)
        })
        .collect();
    let flat: Vec<f64> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .map(|(i, j)| planted[(i, j)])
        .collect();
    let planted = DenseVector::new(flat)?;
    let planted_nuclear_norm = nuclear_norm(&planted, rows, cols);
    Ok(CompletionInstance {
        objective: HuberCompletion::new(rows, cols, rho, observed)?,
        planted,
        planted_nuclear_norm,
    })
}

/// A convex quadratic over the unit-flow path polytope of a layered network.
#[derive(Debug, Clone)]
pub struct PathQuadratic {
    pub objective: GenericQuadratic,
    pub region: DagFlowRegion,
}

/// `xᵀAx/2 + bᵀx` with `A = MᵀM/n + μI` for a Gaussian `n × n` matrix `M`
/// and `b` Gaussian with standard deviation `b_scale`. The strong convexity
/// modulus is at least `μ`.
pub fn random_quadratic(n: usize, mu: f64, b_scale: f64, seed: u64) -> Result<GenericQuadratic> {
    if n == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if !(mu >= 0.0 && mu.is_finite() && b_scale.is_finite()) {
        return Err(invalid("mu must be nonnegative and b_scale finite"));
    }
    let mut rng = rng(seed);
    let m = gaussian_matrix(n, n, &mut rng);
    let a = m.tr_mul(&m) / n as f64 + DMatrix::identity(n, n) * mu;
    let a = (&a + a.transpose()) * 0.5;
    let b = DenseVector::new(
        (0..n)
            .map(|_| b_scale * rng.sample::<f64, _>(StandardNormal))
            .collect(),
    )?;
    GenericQuadratic::new(a, b, 0.0)
}

/// Regularization added to the Gram matrix of the path quadratic.
pub const PATH_QUADRATIC_RIDGE: f64 = 1e-3;

/// Layered network with an added source feeding the first layer and a sink
/// fed by the last; one unit of flow from source to sink. The objective is
/// `xᵀAx/2 + bᵀx` with `A = MᵀM/k + εI` for a Gaussian `k × |links|` matrix
/// `M` (`k = |links|/2`, at least 1) and Gaussian `b`.
pub fn path_quadratic(layers: usize, width: usize, drop: f64, seed: u64) -> Result<PathQuadratic> {
    let (mut rng, inner) = draw_layered(layers, width, drop, seed)?;
    let source = layers * width;
    let sink = source + 1;
    let mut pairs: Vec<(usize, usize)> = (0..width).map(|i| (source, i)).collect();
    pairs.extend(inner);
    pairs.extend((0..width).map(|i| ((layers - 1) * width + i, sink)));
    let links = pairs
        .into_iter()
        .enumerate()
        .map(|(id, (from, to))| Link {
            id,
            from,
            to,
            free_flow_time: 1.0,
            capacity: 1.0,
        })
        .collect();
    let network = DagNetwork::new(sink + 1, links)?;
    let region = DagFlowRegion::new(
        network.clone(),
        vec![Demand {
            origin: source,
            dest: sink,
            amount: 1.0,
        }],
    )?;
    let n = network.num_links();
    let k = (n / 2).max(1);
    let m = gaussian_matrix(k, n, &mut rng);
    let a = m.tr_mul(&m) / k as f64 + DMatrix::identity(n, n) * PATH_QUADRATIC_RIDGE;
    let a = (&a + a.transpose()) * 0.5;
    let b = DenseVector::new((0..n).map(|_| rng.sample(StandardNormal)).collect())?;
    Ok(PathQuadratic {
        objective: GenericQuadratic::new(a, b, 0.0)?,
        region,
    })
}
