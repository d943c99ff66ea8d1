//! Achievable regions and outer bounds built from corner points.
//!
//! Each region is the convex hull of corner points over a family of input
//! laws. The family is explored by maximizing `w1 R1 + w2 R2` for
//! [`DIRECTIONS`] weight vectors spread over the quarter circle, plus seeded
//! random laws. The support values found bound how far the true hull can
//! reach beyond the computed one; that gap is reported as the region's
//! sampling tolerance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::region::{RatePoint, RateRegion};
use super::{attach_y2prime, Y2Map};
use crate::channel::{check_degraded, classify_one_sided, Dmic, InfoProfile};
use crate::error::{Error, Result};
use crate::optimize::{lattice_size, maximize_with_starts, random_simplex_point, OptimizerConfig};
use crate::prob::{entropy_of_slice, CondDist, Dist, JointDist, DEFAULT_TOL};

/// Number of support directions per region.
pub const DIRECTIONS: usize = 65;

/// Upper limit on the lattice pass of each direction's search.
const LATTICE_BUDGET: f64 = 20_000.0;

/// Local-search starts per direction, on top of the warm start.
const REGION_STARTS: usize = 3;

/// Input law `p(u) p(x2|u) p(x1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryInput {
    pub pu: Dist,
    pub px2_given_u: CondDist,
    pub px1: Dist,
}

impl AuxiliaryInput {
    pub fn new(pu: Dist, px2_given_u: CondDist, px1: Dist) -> Result<Self> {
        if px2_given_u.row_alphabet() != pu.len() {
            return Err(Error::SizeMismatch(format!(
                "p(x2|u) has {} rows but |U| = {}",
                px2_given_u.row_alphabet(),
                pu.len()
            )));
        }
        let nx2 = px2_given_u.col_alphabet();
        if pu.len() > nx2 + 3 {
            return Err(Error::OutOfRange {
                name: "|U|",
                value: pu.len() as f64,
                range: "[1, |X2| + 3]",
            });
        }
        Ok(Self {
            pu,
            px2_given_u,
            px1,
        })
    }

    /// `U` constant with `X2 ~ p2`.
    pub fn constant(p1: Dist, p2: Dist) -> Self {
        let rows = CondDist::from_dists(vec![p2]).expect("one row");
        Self::new(Dist::point(1, 0).expect("one symbol"), rows, p1).expect("valid sizes")
    }

    /// `U = X2` with `X2 ~ p2`.
    pub fn copy_x2(p1: Dist, p2: Dist) -> Self {
        let n = p2.len();
        let rows = (0..n)
            .map(|i| Dist::point(n, i).expect("in range"))
            .collect::<Vec<_>>();
        Self::new(p2, CondDist::from_dists(rows).expect("square"), p1).expect("valid sizes")
    }

    /// Joint law of `(X1, U, X2, Y1, Y2)` through the channel.
    pub fn joint(&self, c: &Dmic) -> Result<JointDist> {
        self.check(c)?;
        let (nx1, nx2, ny1, ny2) = c.dims();
        let nu = self.pu.len();
        let mut t = Vec::with_capacity(nx1 * nu * nx2 * ny1 * ny2);
        for x1 in 0..nx1 {
            for u in 0..nu {
                for x2 in 0..nx2 {
                    let w =
                        self.px1.values()[x1] * self.pu.values()[u] * self.px2_given_u.get(u, x2);
                    for y1 in 0..ny1 {
                        for y2 in 0..ny2 {
                            t.push(w * c.get(x1, x2, y1, y2));
                        }
                    }
                }
            }
        }
        JointDist::new(&[nx1, nu, nx2, ny1, ny2], t)?.with_names(&["X1", "U", "X2", "Y1", "Y2"])
    }

    fn check(&self, c: &Dmic) -> Result<()> {
        if self.px1.len() != c.nx1() || self.px2_given_u.col_alphabet() != c.nx2() {
            return Err(Error::SizeMismatch(format!(
                "auxiliary law is for |X1| = {}, |X2| = {}; channel has {} and {}",
                self.px1.len(),
                self.px2_given_u.col_alphabet(),
                c.nx1(),
                c.nx2()
            )));
        }
        Ok(())
    }
}

/// Entropies needed by both corners of the auxiliary region.
struct AuxEntropies {
    y1: f64,
    y1_u: f64,
    y1_x1u: f64,
    y2: f64,
    y2_u: f64,
    y2_x2: f64,
}

fn aux_entropies(c: &Dmic, pu: &[f64], px2_u: &[&[f64]], px1: &[f64]) -> AuxEntropies {
    let (_, _, ny1, ny2) = c.dims();
    let mut e = AuxEntropies {
        y1: 0.0,
        y1_u: 0.0,
        y1_x1u: 0.0,
        y2: 0.0,
        y2_u: 0.0,
        y2_x2: 0.0,
    };
    let mut q1 = vec![0.0; ny1];
    let mut q2 = vec![0.0; ny2];
    let mut r1 = vec![0.0; ny1];
    let mut r2 = vec![0.0; ny2];
    let mut s1 = vec![0.0; ny1];
    let mut s2 = vec![0.0; ny2];
    for (u, &wu) in pu.iter().enumerate() {
        if wu <= 0.0 {
            continue;
        }
        let px2 = px2_u[u];
        r1.iter_mut().for_each(|v| *v = 0.0);
        r2.iter_mut().for_each(|v| *v = 0.0);
        for (x1, &w1) in px1.iter().enumerate() {
            if w1 <= 0.0 {
                continue;
            }
            s1.iter_mut().for_each(|v| *v = 0.0);
            for (x2, &w2) in px2.iter().enumerate() {
                if w2 <= 0.0 {
                    continue;
                }
                for (y1, s) in s1.iter_mut().enumerate() {
                    *s += w2 * c.p_y1(x1, x2, y1);
                }
            }
            e.y1_x1u += wu * w1 * entropy_of_slice(&s1);
            r1.iter_mut().zip(&s1).for_each(|(r, s)| *r += w1 * s);
        }
        for (x2, &w2) in px2.iter().enumerate() {
            if w2 <= 0.0 {
                continue;
            }
            s2.iter_mut().for_each(|v| *v = 0.0);
            for (x1, &w1) in px1.iter().enumerate() {
                for (y2, s) in s2.iter_mut().enumerate() {
                    *s += w1 * c.p_y2(x1, x2, y2);
                }
            }
            e.y2_x2 += wu * w2 * entropy_of_slice(&s2);
            r2.iter_mut().zip(&s2).for_each(|(r, s)| *r += w2 * s);
        }
        e.y1_u += wu * entropy_of_slice(&r1);
        e.y2_u += wu * entropy_of_slice(&r2);
        q1.iter_mut().zip(&r1).for_each(|(q, r)| *q += wu * r);
        q2.iter_mut().zip(&r2).for_each(|(q, r)| *q += wu * r);
    }
    e.y1 = entropy_of_slice(&q1);
    e.y2 = entropy_of_slice(&q2);
    e
}

fn aux_corners(e: &AuxEntropies) -> [RatePoint; 2] {
    let i_x1_y1_u = e.y1_u - e.y1_x1u;
    let i_u_y1 = e.y1 - e.y1_u;
    let i_x2_y2_u = e.y2_u - e.y2_x2;
    let i_ux1_y1 = e.y1 - e.y1_x1u;
    let i_u_y2 = e.y2 - e.y2_u;
    let i_x2_y2 = e.y2 - e.y2_x2;
    [
        RatePoint::clamped(i_x1_y1_u, i_u_y1 + i_x2_y2_u),
        RatePoint::clamped(i_ux1_y1 - i_u_y2, i_x2_y2),
    ]
}

/// The two extreme points of the pentagon for one auxiliary law.
pub fn region_extreme_points(c: &Dmic, aux: &AuxiliaryInput) -> Result<(RatePoint, RatePoint)> {
    require_one_sided(c)?;
    aux.check(c)?;
    let rows: Vec<&[f64]> = aux.px2_given_u.rows().iter().map(Dist::values).collect();
    let [p1, p2] = aux_corners(&aux_entropies(c, aux.pu.values(), &rows, aux.px1.values()));
    Ok((p1, p2))
}

fn require_one_sided(c: &Dmic) -> Result<()> {
    if classify_one_sided(c, DEFAULT_TOL) {
        Ok(())
    } else {
        Err(Error::PreconditionUnmet {
            requirement: "one-sided interference",
            verdict: "p(y2|x1,x2) depends on x1".into(),
        })
    }
}

/// Finest lattice (no finer than `cfg`) whose size stays within budget.
fn region_config(dims: &[usize], cfg: &OptimizerConfig) -> OptimizerConfig {
    let mut m = cfg.divisions();
    while m > 1 && lattice_size(dims, m) > LATTICE_BUDGET {
        m -= 1;
    }
    OptimizerConfig {
        grid_step: 1.0 / m as f64,
        multistarts: cfg.multistarts.min(REGION_STARTS),
        ..cfg.clone()
    }
}

/// Hull of `corners` over the law family, explored by support directions and
/// `samples` seeded random laws.
fn support_region<F>(
    corners: F,
    dims: &[usize],
    cfg: &OptimizerConfig,
    samples: usize,
) -> Result<RateRegion>
where
    F: Fn(&[&[f64]]) -> [RatePoint; 2] + Sync,
{
    cfg.validate()?;
    let local = region_config(dims, cfg);
    let weights: Vec<(f64, f64)> = (0..DIRECTIONS)
        .map(|k| {
            let t = std::f64::consts::FRAC_PI_2 * k as f64 / (DIRECTIONS - 1) as f64;
            (t.cos(), t.sin())
        })
        .collect();

    let mut points = Vec::new();
    let mut warm: Vec<Vec<Vec<f64>>> = Vec::new();
    for (k, &(w1, w2)) in weights.iter().enumerate() {
        let dir_cfg = OptimizerConfig {
            rng_seed: cfg.rng_seed.wrapping_add(k as u64),
            ..local.clone()
        };
        let r = maximize_with_starts(
            |b: &[&[f64]]| {
                corners(b)
                    .iter()
                    .map(|p| w1 * p.r1 + w2 * p.r2)
                    .fold(f64::NEG_INFINITY, f64::max)
            },
            dims,
            &dir_cfg,
            std::mem::take(&mut warm),
        )?;
        points.extend(corners(&r.blocks()));
        warm = vec![r.argopt.iter().map(|d| d.values().to_vec()).collect()];
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..samples {
        let law: Vec<Vec<f64>> = dims
            .iter()
            .map(|&k| random_simplex_point(&mut rng, k))
            .collect();
        let blocks: Vec<&[f64]> = law.iter().map(Vec::as_slice).collect();
        points.extend(corners(&blocks));
    }

    if let Some(p) = points
        .iter()
        .find(|p| !(p.r1.is_finite() && p.r2.is_finite()))
    {
        return Err(Error::NonFiniteObjective {
            at: format!("corner {p:?}"),
        });
    }
    let region = RateRegion::from_points(points);
    let tol = support_gap(&region, &weights);
    Ok(region.with_sampling_tolerance(tol))
}

/// Distance from the polygon cut out by the support lines of `region` in
/// the given directions to `region` itself.
fn support_gap(region: &RateRegion, weights: &[(f64, f64)]) -> f64 {
    let h: Vec<f64> = weights
        .iter()
        .map(|&(w1, w2)| {
            region
                .vertices()
                .iter()
                .map(|p| w1 * p.r1 + w2 * p.r2)
                .fold(0.0, f64::max)
        })
        .collect();
    let mut outer = Vec::with_capacity(weights.len() + 1);
    for k in 0..weights.len() - 1 {
        let ((a1, a2), (b1, b2)) = (weights[k], weights[k + 1]);
        let det = a1 * b2 - a2 * b1;
        let r1 = (h[k] * b2 - h[k + 1] * a2) / det;
        let r2 = (a1 * h[k + 1] - b1 * h[k]) / det;
        outer.push(RatePoint::clamped(r1, r2));
    }
    outer
        .iter()
        .map(|&p| region.distance_to(p))
        .fold(0.0, f64::max)
}

fn aux_dims(c: &Dmic, nu: usize) -> Vec<usize> {
    let mut dims = vec![nu];
    dims.extend(std::iter::repeat_n(c.nx2(), nu));
    dims.push(c.nx1());
    dims
}

/// Inner bound for a one-sided channel: hull of both pentagon extreme
/// points over laws `p(u) p(x2|u) p(x1)` with `|U| = |X2| + 3`.
pub fn achievable_region_zic(
    c: &Dmic,
    cfg: &OptimizerConfig,
    samples: usize,
) -> Result<RateRegion> {
    require_one_sided(c)?;
    let nu = c.nx2() + 3;
    support_region(
        |b: &[&[f64]]| aux_corners(&aux_entropies(c, b[0], &b[1..=nu], b[nu + 1])),
        &aux_dims(c, nu),
        cfg,
        samples,
    )
}

/// Inner bound for a channel with mixed interference: receiver 2 decodes
/// both messages, receiver 1 treats `X2` as noise.
pub fn achievable_region_mixed(
    c: &Dmic,
    cfg: &OptimizerConfig,
    samples: usize,
) -> Result<RateRegion> {
    support_region(
        |b: &[&[f64]]| {
            let info = InfoProfile::from_slices(c, b[0], b[1]);
            [
                RatePoint::clamped(info.i_x1_y1().min(info.i_x1_y2()), info.i_x2_y2_given_x1()),
                RatePoint::clamped(info.i_x1_y1(), 0.0),
            ]
        },
        &[c.nx1(), c.nx2()],
        cfg,
        samples,
    )
}

/// Hull over product inputs of `R1 <= I(X1;Y1|X2)`, `R2 <= I(X2;Y2)`,
/// `R1 + R2 <= I(X1;Y1) + I(X2;Y2)`.
pub fn simple_outer_bound(c: &Dmic, cfg: &OptimizerConfig) -> Result<RateRegion> {
    require_one_sided(c)?;
    support_region(
        |b: &[&[f64]]| {
            let info = InfoProfile::from_slices(c, b[0], b[1]);
            let s = info.i_x1_y1() + info.i_x2_y2();
            let a = info.i_x1_y1_given_x2().min(s);
            let d = info.i_x2_y2().min(s);
            [
                RatePoint::clamped(a, d.min(s - a)),
                RatePoint::clamped(a.min(s - d), d),
            ]
        },
        &[c.nx1(), c.nx2()],
        cfg,
        64,
    )
}

/// Degraded broadcast-channel bound: hull of `(I(U;Y1), I(X1X2;Y2'|U))` over
/// laws `p(u) p(x1,x2|u)` with `|U| = min(|Y1|, |Y2'|, |X1||X2|)`.
pub fn bc_outer_bound(c: &Dmic, map: &Y2Map, cfg: &OptimizerConfig) -> Result<RateRegion> {
    if !check_degraded(c, DEFAULT_TOL) {
        return Err(Error::PreconditionUnmet {
            requirement: "X2 - (X1,Y2) - Y1",
            verdict: "not degraded".into(),
        });
    }
    let d = attach_y2prime(c, map)?;
    let (nx1, nx2, ny1, nyp) = d.dims();
    let nx = nx1 * nx2;
    let nu = ny1.min(nyp).min(nx);
    let mut dims = vec![nu];
    dims.extend(std::iter::repeat_n(nx, nu));
    let h_y2_x: Vec<f64> = (0..nx)
        .map(|x| {
            let row: Vec<f64> = (0..nyp).map(|y| d.p_y2(x / nx2, x % nx2, y)).collect();
            entropy_of_slice(&row)
        })
        .collect();
    support_region(
        |b: &[&[f64]]| {
            let mut q1 = vec![0.0; ny1];
            let mut s1 = vec![0.0; ny1];
            let mut s2 = vec![0.0; nyp];
            let (mut h1_u, mut h2_u, mut h2_x) = (0.0, 0.0, 0.0);
            for (u, &wu) in b[0].iter().enumerate() {
                if wu <= 0.0 {
                    continue;
                }
                s1.iter_mut().for_each(|v| *v = 0.0);
                s2.iter_mut().for_each(|v| *v = 0.0);
                for (x, &wx) in b[1 + u].iter().enumerate() {
                    if wx <= 0.0 {
                        continue;
                    }
                    let (x1, x2) = (x / nx2, x % nx2);
                    for (y, s) in s1.iter_mut().enumerate() {
                        *s += wx * d.p_y1(x1, x2, y);
                    }
                    for (y, s) in s2.iter_mut().enumerate() {
                        *s += wx * d.p_y2(x1, x2, y);
                    }
                    h2_x += wu * wx * h_y2_x[x];
                }
                h1_u += wu * entropy_of_slice(&s1);
                h2_u += wu * entropy_of_slice(&s2);
                q1.iter_mut().zip(&s1).for_each(|(q, s)| *q += wu * s);
            }
            let p = RatePoint::clamped(entropy_of_slice(&q1) - h1_u, h2_u - h2_x);
            [p, p]
        },
        &dims,
        cfg,
        64,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::prob::binary_entropy;

    fn fast() -> OptimizerConfig {
        OptimizerConfig {
            multistarts: 2,
            ..Default::default()
        }
    }

    #[test]
    fn auxiliary_cardinality() {
        let pu = Dist::uniform(6).unwrap();
        let rows = CondDist::new(vec![vec![0.5, 0.5]; 6]).unwrap();
        let e = AuxiliaryInput::new(pu, rows, Dist::uniform(2).unwrap()).unwrap_err();
        assert!(matches!(e, Error::OutOfRange { name: "|U|", .. }));
        let rows = CondDist::new(vec![vec![0.5, 0.5]; 4]).unwrap();
        assert!(
            AuxiliaryInput::new(Dist::uniform(5).unwrap(), rows, Dist::uniform(2).unwrap())
                .is_err()
        );
    }

    #[test]
    fn constant_auxiliary_treats_interference_as_noise() {
        let c = builtin::example5();
        let (p1, p2) = (Dist::bernoulli(0.3).unwrap(), Dist::bernoulli(0.6).unwrap());
        let info = InfoProfile::from_slices(&c, p1.values(), p2.values());
        let (a, b) = region_extreme_points(&c, &AuxiliaryInput::constant(p1, p2)).unwrap();
        for p in [a, b] {
            assert!((p.r1 - info.i_x1_y1()).abs() < 1e-12);
            assert!((p.r2 - info.i_x2_y2()).abs() < 1e-12);
        }
    }

    #[test]
    fn copy_x2_on_example2() {
        let c = builtin::example2(0.1).unwrap();
        let aux = AuxiliaryInput::copy_x2(Dist::uniform(2).unwrap(), Dist::uniform(2).unwrap());
        let (a, b) = region_extreme_points(&c, &aux).unwrap();
        let cap = 1.0 - binary_entropy(0.1).unwrap();
        assert!((a.r1 - cap).abs() < 1e-12 && a.r2.abs() < 1e-12);
        assert!(b.r1.abs() < 1e-12 && (b.r2 - cap).abs() < 1e-12);
    }

    #[test]
    fn extreme_points_reject_two_sided() {
        let aux = AuxiliaryInput::constant(Dist::uniform(2).unwrap(), Dist::uniform(2).unwrap());
        assert!(region_extreme_points(&builtin::example6(), &aux).is_err());
    }

    #[test]
    fn example2_triangle() {
        let c = builtin::example2(0.1).unwrap();
        let cap = 1.0 - binary_entropy(0.1).unwrap();
        let r = achievable_region_zic(&c, &fast(), 32).unwrap();
        assert!(r.contains(RatePoint { r1: cap, r2: 0.0 }, 1e-6));
        assert!(r.contains(RatePoint { r1: 0.0, r2: cap }, 1e-6));
        assert!(r.max_sum() <= cap + 1e-6);
        assert!(r.sampling_tolerance() < 1e-6, "{}", r.sampling_tolerance());
    }

    #[test]
    fn noiseless_product_rectangle() {
        let c = Dmic::from_fn(2, 2, 2, 2, |x1, x2, y1, y2| {
            f64::from(u8::from(y1 == x1 && y2 == x2))
        })
        .unwrap();
        let r = simple_outer_bound(&c, &fast()).unwrap();
        assert!(r.contains(RatePoint { r1: 1.0, r2: 1.0 }, 1e-9));
        assert!((r.max_r1() - 1.0).abs() < 1e-9 && (r.max_r2() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn example6_mixed_region() {
        let r = achievable_region_mixed(&builtin::example6(), &fast(), 32).unwrap();
        assert!(r.max_sum() <= 1.0 + 1e-9);
        assert!((r.max_sum() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn support_gap_of_exact_triangle_is_zero() {
        let r = RateRegion::from_points([
            RatePoint { r1: 1.0, r2: 0.0 },
            RatePoint { r1: 0.0, r2: 1.0 },
        ]);
        let w: Vec<(f64, f64)> = (0..5)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_2 * k as f64 / 4.0;
                (t.cos(), t.sin())
            })
            .collect();
        assert!(support_gap(&r, &w) < 1e-12);
        let square = RateRegion::from_points([RatePoint { r1: 1.0, r2: 1.0 }]);
        assert!(support_gap(&square, &w) < 1e-12);
    }
}
