use super::{check_cost_dim, Region, Vertex, VertexKey};
use crate::error::{invalid, Error, Result};
use crate::vector::DenseVector;

/// The ℓ1-ball `{x : ‖x‖₁ ≤ τ}` with vertices `±τ eᵢ`.
#[derive(Debug, Clone)]
pub struct L1Ball {
    dim: usize,
    tau: f64,
}

impl L1Ball {
    pub fn new(dim: usize, tau: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("ball dimension must be positive"));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid(format!("ball radius must be positive, got {tau}")));
        }
        Ok(Self { dim, tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// `−sign(c_{i*}) τ e_{i*}` with `i* = argmaxᵢ |cᵢ|`, lowest index on ties and
/// `sign(0) = +1`.
pub fn lmo_l1_ball(c: &DenseVector, tau: f64) -> Vertex {
    let mut best = 0;
    for (i, ci) in c.iter().enumerate().skip(1) {
        if ci.abs() > c[best].abs() {
            best = i;
        }
    }
    let negative = c[best] >= 0.0;
    let value = if negative { -tau } else { tau };
    Vertex::dense(
        VertexKey::Signed {
            index: best,
            negative,
        },
        DenseVector::basis(c.dim(), best, value),
    )
}

impl Region for L1Ball {
    fn dim(&self) -> usize {
        self.dim
    }

    fn lmo(&self, c: &DenseVector) -> Result<Vertex> {
        check_cost_dim(self.dim, c)?;
        Ok(lmo_l1_ball(c, self.tau))
    }

    fn contains(&self, x: &DenseVector, tol: f64) -> bool {
        x.dim() == self.dim && x.l1_norm() <= self.tau + tol
    }

    fn diameter_bound(&self) -> f64 {
        2.0 * self.tau
    }

    fn supports_away(&self) -> bool {
        true
    }

    fn name(&self) -> &str {
        "l1_ball"
    }
}

/// `fl(fl(a + s) − s) == a`: the pair `(a + s, s)` projects back to `a`.
fn roundtrips(a: f64, s: f64) -> bool {
    (a + s) - s == a
}

/// Value of the lowest set bit of a positive finite `a`.
pub(crate) fn lowest_set_bit(a: f64) -> f64 {
    let bits = a.abs().to_bits();
    let exp = (bits >> 52) & 0x7ff;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, scale) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp as i32 - 1075)
    };
    let e = scale + mantissa.trailing_zeros() as i32;
    if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else {
        f64::from_bits(1u64 << (e + 1074))
    }
}

fn ulp(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1) - x
}

/// Largest slack `s ≤ want` (up to one grid step of `a + s`) such that the
/// pair `(a + s, s)` projects back to `a` exactly.
///
/// `a + s` must sit on its binade grid `G`, so `s ≡ −a (mod G)`; such an `s`
/// is itself exact only below `2^53 · lsb(a)`. When the wanted slack is out
/// of reach the target is lowered until it fits.
fn exact_slack(a: f64, want: f64) -> f64 {
    if want <= 0.0 {
        return 0.0;
    }
    if a == 0.0 || roundtrips(a, want) {
        return want;
    }
    let reach = 9_007_199_254_740_992.0 * lowest_set_bit(a);
    let mut target = want.min(reach);
    for _ in 0..128 {
        let grid = ulp(a + target);
        let offset = match a % grid {
            0.0 => 0.0,
            rem => grid - rem,
        };
        if target >= offset {
            let s = offset + ((target - offset) / grid).floor() * grid;
            if s <= want && roundtrips(a, s) {
                return s;
            }
        }
        target *= 0.5;
    }
    0.0
}

/// Maps `x ∈ B₁(τ)` to `z ∈ τΔ₂ₙ` with `z[..n] − z[n..] = x`.
///
/// Each coordinate is split into its positive and negative part and the slack
/// `δ = (τ − ‖x‖₁)/2n` is added to both halves. Per-coordinate slack is
/// adjusted so the projection reproduces `x` bit for bit: zero coordinates
/// accept any slack, others only as much as keeps `xᵢ`'s low bits. Slack that
/// no coordinate can hold exactly is spread evenly, in which case the round
/// trip is exact only up to rounding of `xᵢ + slack`.
pub fn lift_l1(x: &DenseVector, tau: f64) -> Result<DenseVector> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(invalid(format!("ball radius must be positive, got {tau}")));
    }
    let l1 = x.l1_norm();
    if l1 > tau + 1e-9 {
        return Err(Error::Infeasible(format!(
            "‖x‖₁ = {l1} exceeds radius {tau}"
        )));
    }
    let n = x.dim();
    let abs: Vec<f64> = x.iter().map(|xi| xi.abs()).collect();
    let delta = ((tau - l1) / (2 * n) as f64).max(0.0);
    let mut slack: Vec<f64> = abs.iter().map(|&a| exact_slack(a, delta)).collect();
    let residual =
        |slack: &[f64]| tau - abs.iter().zip(slack).map(|(a, s)| a + 2.0 * s).sum::<f64>();

    // Top up exactly: zero coordinates first, then larger magnitudes, which
    // have the coarsest grids.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        (abs[i] != 0.0)
            .cmp(&(abs[j] != 0.0))
            .then(abs[j].total_cmp(&abs[i]))
            .then(i.cmp(&j))
    });
    for &i in &order {
        let r = residual(&slack);
        if r <= 0.0 {
            break;
        }
        slack[i] = slack[i].max(exact_slack(abs[i], slack[i] + r / 2.0));
    }
    // Exact slack moves in steps of a few ulps of τ; anything beyond that
    // means no coordinate could take it exactly.
    let r = residual(&slack);
    if r > 8.0 * f64::EPSILON * tau {
        let share = r / (2 * n) as f64;
        slack.iter_mut().for_each(|s| *s += share);
    }

    let mut z = vec![0.0; 2 * n];
    for i in 0..n {
        let (pos, neg) = if x[i] >= 0.0 {
            (x[i] + slack[i], slack[i])
        } else {
            (slack[i], -x[i] + slack[i])
        };
        z[i] = pos;
        z[n + i] = neg;
    }
    Ok(DenseVector::from_vec_unchecked(z))
}

/// Whether `x` provably has no bit-exact float lift into `τΔ₂ₙ`.
///
/// A float pair with `p − q = a ≠ 0` needs `q < 2^53·lsb(a)`, so the mass the
/// pair can carry beyond `|a|` is below `2^54·lsb(a)`. When that room summed
/// over all coordinates cannot reach `τ − ‖x‖₁`, no lift is exact. A `false`
/// answer certifies nothing.
pub fn exact_lift_ruled_out(x: &DenseVector, tau: f64) -> bool {
    let room: f64 = x
        .iter()
        .map(|&a| {
            if a == 0.0 {
                f64::INFINITY
            } else {
                18_014_398_509_481_984.0 * lowest_set_bit(a)
            }
        })
        .sum();
    x.l1_norm() + room < tau - 1e-12
}

/// `z[..n] − z[n..]`.
pub fn project_l1(z: &DenseVector) -> Result<DenseVector> {
    if !z.dim().is_multiple_of(2) {
        return Err(invalid(format!(
            "lifted vector must have even dimension, got {}",
            z.dim()
        )));
    }
    let n = z.dim() / 2;
    let s = z.as_slice();
    Ok(DenseVector::from_vec_unchecked(
        (0..n).map(|i| s[i] - s[n + i]).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::ScaledSimplex;
    use crate::vector::dv;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lmo_examples() {
        assert_eq!(
            lmo_l1_ball(&dv(&[3.0, -1.0, 2.0]), 2.0).into_point(),
            dv(&[-2.0, 0.0, 0.0])
        );
        assert_eq!(
            lmo_l1_ball(&dv(&[0.0, 0.0, 0.0]), 1.0).into_point(),
            dv(&[-1.0, 0.0, 0.0])
        );
        assert_eq!(
            lmo_l1_ball(&dv(&[0.0, -4.0]), 0.5).into_point(),
            dv(&[0.0, 0.5])
        );
    }

    #[test]
    fn lmo_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let n = rng.random_range(1..=8);
            let tau = rng.random_range(0.1..5.0);
            let c =
                DenseVector::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
            let v = lmo_l1_ball(&c, tau);
            let best = (0..n)
                .flat_map(|i| [tau, -tau].map(|s| s * c[i]))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(v.dot(&c), best);
            assert!(L1Ball::new(n, tau).unwrap().contains(&v.point(), 1e-9));
        }
    }

    #[test]
    fn lift_certificate() {
        // lsb(1 + ε) = ε, so the pair can carry less than 2⁵⁴ε = 4 extra.
        assert!(exact_lift_ruled_out(&dv(&[1.0 + f64::EPSILON]), 100.0));
        assert!(!exact_lift_ruled_out(&dv(&[1.0 + f64::EPSILON]), 4.0));
        assert!(!exact_lift_ruled_out(
            &dv(&[1.0 + f64::EPSILON, 0.0]),
            100.0
        ));
        assert!(!exact_lift_ruled_out(&dv(&[0.5]), 100.0));
    }

    #[test]
    fn lowest_bits() {
        assert_eq!(lowest_set_bit(1.0), 1.0);
        assert_eq!(lowest_set_bit(6.0), 2.0);
        assert_eq!(lowest_set_bit(0.75), 0.25);
        assert_eq!(lowest_set_bit(f64::MIN_POSITIVE), f64::MIN_POSITIVE);
        assert_eq!(lowest_set_bit(3.0 * 2f64.powi(-1074)), 2f64.powi(-1074));
        assert_eq!(lowest_set_bit(1.0 + f64::EPSILON), f64::EPSILON);
    }

    #[test]
    fn lift_examples() {
        let z = lift_l1(&dv(&[0.5, -0.3]), 1.0).unwrap();
        let expected = [0.55, 0.05, 0.05, 0.35];
        for (a, b) in z.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{z:?}");
        }
        assert_eq!(project_l1(&z).unwrap(), dv(&[0.5, -0.3]));

        assert_eq!(
            lift_l1(&dv(&[0.0, 0.0]), 1.0).unwrap(),
            dv(&[0.25, 0.25, 0.25, 0.25])
        );
        assert_eq!(
            lift_l1(&dv(&[1.0, 0.0]), 1.0).unwrap(),
            dv(&[1.0, 0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn lift_rejects_outside_ball() {
        assert!(matches!(
            lift_l1(&dv(&[0.8, -0.3]), 1.0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn project_examples() {
        assert_eq!(
            project_l1(&dv(&[0.55, 0.05, 0.05, 0.35]))
                .unwrap()
                .as_slice()[0],
            0.55 - 0.05
        );
        assert_eq!(project_l1(&dv(&[2.0, 0.5])).unwrap(), dv(&[1.5]));
        assert_eq!(project_l1(&dv(&[0.0; 6])).unwrap(), dv(&[0.0; 3]));
        assert!(project_l1(&dv(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn lift_roundtrip_is_exact_whenever_representable() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let n = rng.random_range(1..=12);
            let tau = 10f64.powf(rng.random_range(-3.0..3.0));
            let raw: Vec<f64> = (0..n)
                .map(|_| rng.random_range(-1.0..1.0) * 10f64.powi(rng.random_range(-12..0)))
                .collect();
            let norm: f64 = raw.iter().map(|v| v.abs()).sum();
            let shrink = rng.random_range(0.0..=1.0) * tau / norm.max(f64::MIN_POSITIVE);
            let x = DenseVector::new(raw.iter().map(|v| v * shrink.min(1e300)).collect()).unwrap();
            if x.l1_norm() > tau {
                continue;
            }
            let z = lift_l1(&x, tau).unwrap();
            let back = project_l1(&z).unwrap();
            if back != x {
                // Exact pairs (p, q) with p − q = a need q < 2^53·lsb(a), so
                // this much slack cannot be placed without losing bits.
                let room: f64 = x
                    .iter()
                    .map(|&a| {
                        if a == 0.0 {
                            f64::INFINITY
                        } else {
                            2f64.powi(54) * lowest_set_bit(a)
                        }
                    })
                    .sum();
                assert!(x.l1_norm() + room < tau, "{x:?} -> {z:?}");
                assert!(back.max_abs_diff(&x) <= 4.0 * f64::EPSILON * tau);
            }
            let simplex = ScaledSimplex::new(2 * n, tau).unwrap();
            assert!(simplex.contains(&z, 1e-12 * tau.max(1.0)), "{x:?} -> {z:?}");
            assert!(z.min_entry() >= 0.0);
        }
    }
}
