use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_cost_dim, Region, Vertex, VertexKey};
use crate::error::{invalid, Error, Result};
use crate::vector::DenseVector;

/// Parameters of the Lanczos iteration used by the nuclear-ball oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Stop once the Ritz residual `‖Gy − θy‖` is at most `tol · θ`, where
    /// `G` is the smaller Gram matrix of the cost.
    pub tol: f64,
    /// Cap on Lanczos steps; `None` means `min(rows, cols)`, at which point
    /// the Krylov space is the whole space and the result is exact.
    pub max_iters: Option<usize>,
    /// Seed of the deterministic start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iters: None,
            seed: 0,
        }
    }
}

/// `{X ∈ ℝ^{m×n} : ‖X‖_nuc ≤ τ}`, matrices flattened row-major.
#[derive(Debug, Clone)]
pub struct NuclearBall {
    rows: usize,
    cols: usize,
    tau: f64,
    lanczos: LanczosOptions,
}

impl NuclearBall {
    pub fn new(rows: usize, cols: usize, tau: f64) -> Result<Self> {
        Self::with_options(rows, cols, tau, LanczosOptions::default())
    }

    pub fn with_options(
        rows: usize,
        cols: usize,
        tau: f64,
        lanczos: LanczosOptions,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("matrix shape must be positive"));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid(format!("ball radius must be positive, got {tau}")));
        }
        if !(lanczos.tol > 0.0) {
            return Err(invalid("Lanczos tolerance must be positive"));
        }
        Ok(Self {
            rows,
            cols,
            tau,
            lanczos,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

fn mat_vec(c: &[f64], cols: usize, v: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = c[i * cols..(i + 1) * cols]
            .iter()
            .zip(v)
            .map(|(a, b)| a * b)
            .sum();
    }
}

fn mat_t_vec(c: &[f64], cols: usize, w: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for (i, wi) in w.iter().enumerate() {
        for (o, a) in out.iter_mut().zip(&c[i * cols..(i + 1) * cols]) {
            *o += a * wi;
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn rounded_key(u: &[f64], v: &[f64]) -> VertexKey {
    let mut bytes = Vec::with_capacity(8 * (u.len() + v.len()));
    for x in u.iter().chain(v) {
        let q = (x * 1e10).round() as i64;
        bytes.extend_from_slice(&q.to_le_bytes());
    }
    VertexKey::Encoded(bytes)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Removes the components of `w` along the orthonormal columns `basis`,
/// twice for stability.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let h = dot(w, q);
            w.iter_mut().zip(q).for_each(|(a, b)| *a -= h * b);
        }
    }
}

/// Top eigenpair `(θ, s)` of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`.
fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let j = alpha.len();
    let t = DMatrix::from_fn(j, j, |r, c| {
        if r == c {
            alpha[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let k = eig.eigenvalues.imax();
    (
        eig.eigenvalues[k],
        eig.eigenvectors.column(k).iter().copied().collect(),
    )
}

/// Returns `−τ u₁v₁ᵀ` for the top singular pair of the `rows × cols` matrix
/// `c`, computed by Lanczos with full reorthogonalization on the smaller of
/// `cᵀc` and `ccᵀ`.
///
/// The sign of the pair is normalized so the largest-magnitude entry of `v₁`
/// is positive. A zero matrix yields `τ e₁e₁ᵀ` flagged as degenerate.
pub fn lmo_nuclear_ball(
    c: &DenseVector,
    rows: usize,
    cols: usize,
    tau: f64,
    opts: &LanczosOptions,
) -> Result<Vertex> {
    check_cost_dim(rows * cols, c)?;
    let data = c.as_slice();
    if data.iter().all(|&a| a == 0.0) {
        let mut u = vec![0.0; rows];
        let mut v = vec![0.0; cols];
        u[0] = 1.0;
        v[0] = 1.0;
        let key = rounded_key(&u, &v);
        return Ok(Vertex::rank_one(key, u, v, tau).flagged_degenerate());
    }

    // Work in the right singular space when it is the smaller one.
    let right = cols <= rows;
    let dim = rows.min(cols);
    let mut tmp = vec![0.0; rows.max(cols)];
    let mut gram = |x: &[f64], out: &mut [f64]| {
        if right {
            mat_vec(data, cols, x, &mut tmp[..rows]);
            mat_t_vec(data, cols, &tmp[..rows], out);
        } else {
            mat_t_vec(data, cols, x, &mut tmp[..cols]);
            mat_vec(data, cols, &tmp[..cols], out);
        }
    };

    let max_iters = opts.max_iters.unwrap_or(dim).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut fresh = |basis: &[Vec<f64>]| -> Option<Vec<f64>> {
        for _ in 0..8 {
            let mut q: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            orthogonalize(&mut q, basis);
            let nq = norm(&q);
            if nq > 1e-8 {
                q.iter_mut().for_each(|a| *a /= nq);
                return Some(q);
            }
        }
        None
    };

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q =
        fresh(&basis).ok_or_else(|| Error::Invariant("Lanczos start vector vanished".into()))?;
    let mut w = vec![0.0; dim];
    let mut ritz = (0.0, Vec::new());
    let mut residual = f64::INFINITY;
    let mut converged = false;
    for j in 0..max_iters {
        gram(&q, &mut w);
        let a = dot(&w, &q);
        basis.push(q);
        alpha.push(a);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        ritz = top_ritz(&alpha, &beta);
        let theta = ritz.0;
        residual = b * ritz.1[j].abs() / theta.abs().max(f64::MIN_POSITIVE);
        if residual <= opts.tol || j + 1 == dim {
            converged = true;
            break;
        }
        // A tiny β means the Krylov space is invariant; continue from a new
        // direction orthogonal to it with a decoupled block.
        if b <= 1e-14 * theta.abs() {
            match fresh(&basis) {
                Some(next) => {
                    beta.push(0.0);
                    q = next;
                }
                None => {
                    converged = true;
                    break;
                }
            }
        } else {
            beta.push(b);
            q = w.iter().map(|x| x / b).collect();
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            iterations: max_iters,
            residual,
        });
    }

    let mut y = vec![0.0; dim];
    for (qk, sk) in basis.iter().zip(&ritz.1) {
        y.iter_mut().zip(qk).for_each(|(a, b)| *a += sk * b);
    }
    let ny = norm(&y);
    y.iter_mut().for_each(|a| *a /= ny);
    let (mut u, mut v) = if right {
        let mut w = vec![0.0; rows];
        mat_vec(data, cols, &y, &mut w);
        (w, y)
    } else {
        let mut z = vec![0.0; cols];
        mat_t_vec(data, cols, &y, &mut z);
        (y, z)
    };
    let (nu, nv) = (norm(&u), norm(&v));
    u.iter_mut().for_each(|a| *a /= nu);
    v.iter_mut().for_each(|a| *a /= nv);
    let pivot = (0..cols)
        .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(b.cmp(&a)))
        .unwrap_or(0);
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|a| *a = -*a);
        u.iter_mut().for_each(|a| *a = -*a);
    }
    let key = rounded_key(&u, &v);
    Ok(Vertex::rank_one(key, u, v, -tau))
}

/// Sum of singular values of the row-major `rows × cols` matrix `x`.
pub fn nuclear_norm(x: &DenseVector, rows: usize, cols: usize) -> f64 {
    let m = DMatrix::from_row_slice(rows, cols, x.as_slice());
    m.singular_values().iter().sum()
}

impl Region for NuclearBall {
    fn dim(&self) -> usize {
        self.rows * self.cols
    }

    fn lmo(&self, c: &DenseVector) -> Result<Vertex> {
        lmo_nuclear_ball(c, self.rows, self.cols, self.tau, &self.lanczos)
    }

    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        x.dim() == self.dim() && nuclear_norm(x, self.rows, self.cols) <= self.tau + tol
    }

    fn diameter_bound(&self) -> f64 {
        2.0 * self.tau
    }

    fn supports_away(&self) -> bool {
        true
    }

    fn name(&self) -> &str {
        "nuclear_ball"
    }
}
