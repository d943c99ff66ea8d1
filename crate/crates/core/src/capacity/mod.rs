//! Sum-rate capacities, rate regions and outer bounds.

mod bounds;
mod region;

pub use bounds::{
    achievable_region_mixed, achievable_region_zic, bc_outer_bound, region_extreme_points,
    simple_outer_bound, AuxiliaryInput, DIRECTIONS,
};
pub use region::{RatePoint, RateRegion};

use serde::{Deserialize, Serialize};

use crate::channel::{
    check_degraded, classify_one_sided, factorize_weak, mi_condition_report, Condition, Dmic,
    InfoProfile,
};
use crate::error::{Error, Result};
use crate::optimize::{blahut_arimoto, maximize_product_input, OptResult, OptimizerConfig};
use crate::prob::{CondDist, DEFAULT_TOL};

/// `I(X1;Y1) + I(X2;Y2)` as a function of `[p1, p2]`.
pub fn weak_zic_objective(c: &Dmic) -> impl Fn(&[&[f64]]) -> f64 + Sync + '_ {
    move |b: &[&[f64]]| {
        let info = InfoProfile::from_slices(c, b[0], b[1]);
        info.i_x1_y1() + info.i_x2_y2()
    }
}

/// `I(X2;Y2|X1) + min(I(X1;Y1), I(X1;Y2))` as a function of `[p1, p2]`.
pub fn mixed_objective(c: &Dmic) -> impl Fn(&[&[f64]]) -> f64 + Sync + '_ {
    move |b: &[&[f64]]| {
        let info = InfoProfile::from_slices(c, b[0], b[1]);
        info.i_x2_y2_given_x1() + info.i_x1_y1().min(info.i_x1_y2())
    }
}

/// Channel `p(y1|x1) = sum_x2 p2(x2) p(y1|x1,x2)` seen by receiver 1 when
/// `X2` is treated as noise.
fn noisy_y1_channel(c: &Dmic, p2: &[f64]) -> CondDist {
    let rows = (0..c.nx1())
        .map(|x1| {
            (0..c.ny1())
                .map(|y1| (0..c.nx2()).map(|x2| p2[x2] * c.p_y1(x1, x2, y1)).sum())
                .collect()
        })
        .collect();
    CondDist::new(rows).expect("mixture of stochastic rows")
}

/// Sum-rate capacity of a one-sided channel with the weak factorization.
///
/// For fixed `p2` the first term is a single-user capacity, solved by
/// Blahut–Arimoto; the outer search runs over `p2` only.
pub fn sumrate_weak_zic(c: &Dmic, cfg: &OptimizerConfig) -> Result<OptResult> {
    cfg.validate()?;
    if !classify_one_sided(c, DEFAULT_TOL) {
        return Err(Error::PreconditionUnmet {
            requirement: "one-sided interference with weak factorization",
            verdict: "not one-sided".into(),
        });
    }
    if factorize_weak(c, DEFAULT_TOL)?.is_none() {
        return Err(Error::PreconditionUnmet {
            requirement: "one-sided interference with weak factorization",
            verdict: "one-sided but p(y1,y2|x1,x2) does not factor as p(y2|x2)p'(y1|x1,y2)".into(),
        });
    }
    let ba_cfg = cfg.clone();
    let outer = maximize_product_input(
        |b: &[&[f64]]| {
            let inner = blahut_arimoto(&noisy_y1_channel(c, b[0]), &ba_cfg)
                .map(|r| r.value)
                .unwrap_or(f64::NAN);
            inner
                + InfoProfile::from_slices(c, &vec![1.0 / c.nx1() as f64; c.nx1()], b[0]).i_x2_y2()
        },
        &[c.nx2()],
        cfg,
    )?;
    let p2 = outer.argopt[0].clone();
    let inner = blahut_arimoto(&noisy_y1_channel(c, p2.values()), cfg)?;
    let p1 = inner.argopt[0].clone();
    let value = weak_zic_objective(c)(&[p1.values(), p2.values()]);
    if !value.is_finite() {
        return Err(Error::NonFiniteObjective {
            at: format!("{:?} {:?}", p1.values(), p2.values()),
        });
    }
    Ok(OptResult {
        value,
        argopt: vec![p1, p2],
        iterations: outer.iterations + inner.iterations,
        certified_grid_step: outer.certified_grid_step,
    })
}

/// Sum-rate capacity of a degraded channel with mixed interference.
pub fn sumrate_mixed(c: &Dmic, cfg: &OptimizerConfig) -> Result<OptResult> {
    cfg.validate()?;
    if !check_degraded(c, DEFAULT_TOL) {
        return Err(Error::PreconditionUnmet {
            requirement: "mixed interference",
            verdict: "X2 - (X1,Y2) - Y1 does not hold".into(),
        });
    }
    let rec = mi_condition_report(c, Condition::MixedMi, cfg, DEFAULT_TOL)?;
    if !rec.holds {
        return Err(Error::PreconditionUnmet {
            requirement: "mixed interference",
            verdict: format!(
                "{} fails: min gap {:.3e} at p1 = {:?}, p2 = {:?}",
                Condition::MixedMi,
                rec.min_gap,
                rec.witness.p1.values(),
                rec.witness.p2.values()
            ),
        });
    }
    maximize_product_input(mixed_objective(c), &[c.nx1(), c.nx2()], cfg)
}

/// A map `y2' = f(x1, y2)` stored as a table indexed `x1 * ny2 + y2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Y2Map {
    nx1: usize,
    ny2: usize,
    ny2p: usize,
    table: Vec<usize>,
}

impl Y2Map {
    pub fn new(nx1: usize, ny2: usize, ny2p: usize, table: Vec<usize>) -> Result<Self> {
        if nx1 == 0 || ny2 == 0 || ny2p == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if table.len() != nx1 * ny2 {
            return Err(Error::SizeMismatch(format!(
                "y2 map has {} entries, expected {}",
                table.len(),
                nx1 * ny2
            )));
        }
        if let Some((i, &v)) = table.iter().enumerate().find(|(_, &v)| v >= ny2p) {
            return Err(Error::SizeMismatch(format!(
                "y2 map entry {i} (x1 = {}, y2 = {}) is {v}, outside 0..{ny2p}",
                i / ny2,
                i % ny2
            )));
        }
        Ok(Self {
            nx1,
            ny2,
            ny2p,
            table,
        })
    }

    /// `y2' = (x1, y2)`, encoded as `x1 * ny2 + y2`.
    pub fn bijection(nx1: usize, ny2: usize) -> Result<Self> {
        Self::new(nx1, ny2, nx1 * ny2, (0..nx1 * ny2).collect())
    }

    pub fn apply(&self, x1: usize, y2: usize) -> usize {
        self.table[x1 * self.ny2 + y2]
    }

    pub fn output_alphabet(&self) -> usize {
        self.ny2p
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

/// Replaces `Y2` by `Y2' = f(X1, Y2)` and checks `(X1,X2) - Y2' - Y1`.
pub fn attach_y2prime(c: &Dmic, map: &Y2Map) -> Result<Dmic> {
    if !classify_one_sided(c, DEFAULT_TOL) {
        return Err(Error::PreconditionUnmet {
            requirement: "one-sided interference",
            verdict: "p(y2|x1,x2) depends on x1".into(),
        });
    }
    if map.nx1 != c.nx1() || map.ny2 != c.ny2() {
        return Err(Error::SizeMismatch(format!(
            "y2 map is for |X1| = {}, |Y2| = {}; channel has {} and {}",
            map.nx1,
            map.ny2,
            c.nx1(),
            c.ny2()
        )));
    }
    let (nx1, nx2, ny1, nyp) = (c.nx1(), c.nx2(), c.ny1(), map.ny2p);
    let mut t = vec![0.0; nx1 * nx2 * ny1 * nyp];
    for x1 in 0..nx1 {
        for x2 in 0..nx2 {
            for y1 in 0..ny1 {
                for y2 in 0..c.ny2() {
                    let yp = map.apply(x1, y2);
                    t[((x1 * nx2 + x2) * ny1 + y1) * nyp + yp] += c.get(x1, x2, y1, y2);
                }
            }
        }
    }
    let out = Dmic::new(nx1, nx2, ny1, nyp, t)?;
    let violation = y1_given_y2_violation(&out);
    if violation > DEFAULT_TOL {
        return Err(Error::MarkovViolation {
            max_violation: violation,
        });
    }
    Ok(out)
}

/// Largest deviation of `p(y1,y2|x)` from `p(y2|x) q(y1|y2)`, where `q` is
/// read off the input giving `y2` the most mass.
fn y1_given_y2_violation(c: &Dmic) -> f64 {
    let inputs: Vec<(usize, usize)> = (0..c.nx1())
        .flat_map(|a| (0..c.nx2()).map(move |b| (a, b)))
        .collect();
    let mut worst: f64 = 0.0;
    for y2 in 0..c.ny2() {
        let (&(r1, r2), w_ref) = inputs.iter().map(|x| (x, c.p_y2(x.0, x.1, y2))).fold(
            (&inputs[0], -1.0),
            |acc, cur| if cur.1 > acc.1 { cur } else { acc },
        );
        if w_ref <= 0.0 {
            continue;
        }
        for &(x1, x2) in &inputs {
            let w = c.p_y2(x1, x2, y2);
            for y1 in 0..c.ny1() {
                let expected = w * c.get(r1, r2, y1, y2) / w_ref;
                worst = worst.max((c.get(x1, x2, y1, y2) - expected).abs());
            }
        }
    }
    worst
}

/// Gaussian interference channel regimes with closed-form sum rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaussianKind {
    /// `0 <= a < 1`, `b = 0`.
    OneSidedWeak,
    /// `0 <= a <= 1`, `b >= 1`.
    Mixed,
}

impl std::str::FromStr for GaussianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-sided-weak" => Ok(Self::OneSidedWeak),
            "mixed" => Ok(Self::Mixed),
            other => Err(Error::InvalidConfig(format!(
                "unknown Gaussian kind {other:?} (expected one-sided-weak or mixed)"
            ))),
        }
    }
}

fn half_log(x: f64) -> f64 {
    0.5 * (1.0 + x).log2()
}

fn check_powers(p1: f64, p2: f64) -> Result<()> {
    for (name, v) in [("p1", p1), ("p2", p2)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::OutOfRange {
                name,
                value: v,
                range: "[0, inf)",
            });
        }
    }
    Ok(())
}

/// The two terms inside the minimum of the mixed-interference sum rate.
pub fn gaussian_mixed_branches(p1: f64, p2: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    check_powers(p1, p2)?;
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::OutOfRange {
            name: "a",
            value: a,
            range: "[0, 1]",
        });
    }
    if !(b >= 1.0 && b.is_finite()) {
        return Err(Error::OutOfRange {
            name: "b",
            value: b,
            range: "[1, inf)",
        });
    }
    Ok((half_log(p1 / (1.0 + a * p2)), half_log(b * p1 / (1.0 + p2))))
}

/// Closed-form sum-rate capacity in bits for the Gaussian regimes.
pub fn gaussian_reference(p1: f64, p2: f64, a: f64, b: f64, kind: GaussianKind) -> Result<f64> {
    check_powers(p1, p2)?;
    match kind {
        GaussianKind::OneSidedWeak => {
            if !(0.0..1.0).contains(&a) {
                return Err(Error::OutOfRange {
                    name: "a",
                    value: a,
                    range: "[0, 1)",
                });
            }
            if b != 0.0 {
                return Err(Error::OutOfRange {
                    name: "b",
                    value: b,
                    range: "{0}",
                });
            }
            Ok(half_log(p2) + half_log(p1 / (1.0 + a * p2)))
        }
        GaussianKind::Mixed => {
            let (u, v) = gaussian_mixed_branches(p1, p2, a, b)?;
            Ok(u.min(v) + half_log(p2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::optimize::grid_oracle;
    use crate::prob::binary_entropy;

    fn cap(eps: f64) -> f64 {
        1.0 - binary_entropy(eps).unwrap()
    }

    #[test]
    fn example2_sum_rate() {
        for eps in [0.05, 0.1, 0.25] {
            let r =
                sumrate_weak_zic(&builtin::example2(eps).unwrap(), &Default::default()).unwrap();
            assert!((r.value - cap(eps)).abs() < 1e-6, "{eps}: {}", r.value);
        }
    }

    #[test]
    fn example5_sum_rate() {
        let r = sumrate_weak_zic(&builtin::example5(), &Default::default()).unwrap();
        assert!((r.value - 0.531004406410719).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn identity_pair_sum_rate() {
        let c = Dmic::from_fn(2, 2, 2, 2, |x1, x2, y1, y2| {
            f64::from(u8::from(y1 == x1 && y2 == x2))
        })
        .unwrap();
        let r = sumrate_weak_zic(&c, &Default::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn weak_zic_preconditions() {
        let e = sumrate_weak_zic(&builtin::example6(), &Default::default()).unwrap_err();
        assert!(matches!(e, Error::PreconditionUnmet { .. }));
        let e = sumrate_weak_zic(&builtin::appendix(), &Default::default()).unwrap_err();
        match e {
            Error::PreconditionUnmet { verdict, .. } => assert!(verdict.contains("factor")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn example6_mixed_sum_rate() {
        let c = builtin::example6();
        let r = sumrate_mixed(&c, &Default::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
        let at_half = mixed_objective(&c)(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!((at_half - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_with_disconnected_x1() {
        let eps = 0.2;
        let c = Dmic::from_fn(2, 2, 2, 2, |_, x2, y1, y2| {
            let p2 = if y2 == x2 { 1.0 - eps } else { eps };
            p2 * f64::from(u8::from(y1 == 0))
        })
        .unwrap();
        let r = sumrate_mixed(&c, &Default::default()).unwrap();
        assert!((r.value - cap(eps)).abs() < 1e-9);
    }

    #[test]
    fn mixed_precondition() {
        let e = sumrate_mixed(&builtin::appendix(), &Default::default()).unwrap_err();
        assert!(matches!(e, Error::PreconditionUnmet { .. }));
    }

    #[test]
    fn weak_zic_matches_grid() {
        for c in [
            builtin::example1(),
            builtin::example5(),
            builtin::example3(0.1).unwrap(),
        ] {
            let r = sumrate_weak_zic(&c, &Default::default()).unwrap();
            let g = grid_oracle(weak_zic_objective(&c), &[2, 2], 0.01).unwrap();
            assert!(r.value >= g.value - 1e-9);
            assert!(r.value - g.value < 1e-3);
        }
    }

    #[test]
    fn y2map_validation() {
        assert!(Y2Map::new(2, 2, 2, vec![0, 1, 1]).is_err());
        assert!(Y2Map::new(2, 2, 2, vec![0, 1, 2, 0]).is_err());
        let b = Y2Map::bijection(2, 3).unwrap();
        assert_eq!(b.output_alphabet(), 6);
        assert_eq!(b.apply(1, 2), 5);
    }

    #[test]
    fn example5_table_two() {
        let c = attach_y2prime(&builtin::example5(), &builtin::example5_y2_map()).unwrap();
        let expected = [[0.1, 0.9], [0.9, 0.1], [0.9, 0.1], [0.1, 0.9]];
        for x1 in 0..2 {
            for x2 in 0..2 {
                for yp in 0..2 {
                    let p = c.p_y2(x1, x2, yp);
                    assert!((p - expected[x1 * 2 + x2][yp]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn example2_equivalent_channel() {
        let eps = 0.1;
        let map = Y2Map::new(2, 2, 2, vec![0, 1, 1, 0]).unwrap();
        let c = attach_y2prime(&builtin::example2(eps).unwrap(), &map).unwrap();
        for x1 in 0..2 {
            for x2 in 0..2 {
                for y1 in 0..2 {
                    for yp in 0..2 {
                        let z = x1 ^ x2 ^ y1;
                        let p = if y1 != yp {
                            0.0
                        } else if z == 1 {
                            eps
                        } else {
                            1.0 - eps
                        };
                        assert!((c.get(x1, x2, y1, yp) - p).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn attach_rejects_markov_violation() {
        // y2' = y2 discards x1, which receiver 1 needs
        let map = Y2Map::new(2, 2, 2, vec![0, 1, 0, 1]).unwrap();
        let e = attach_y2prime(&builtin::example2(0.1).unwrap(), &map).unwrap_err();
        assert!(matches!(e, Error::MarkovViolation { .. }));
        let e = attach_y2prime(&builtin::example6(), &Y2Map::bijection(2, 2).unwrap()).unwrap_err();
        assert!(matches!(e, Error::PreconditionUnmet { .. }));
    }

    #[test]
    fn gaussian_values() {
        let v = gaussian_reference(1.0, 1.0, 0.5, 0.0, GaussianKind::OneSidedWeak).unwrap();
        assert!((v - 0.868483).abs() < 1e-6, "{v}");
        let free = gaussian_reference(3.0, 2.0, 0.0, 0.0, GaussianKind::OneSidedWeak).unwrap();
        assert!((free - (0.5 * 4f64.log2() + 0.5 * 3f64.log2())).abs() < 1e-12);
        let (u, w) = gaussian_mixed_branches(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((u - w).abs() < 1e-12);
        let m = gaussian_reference(1.0, 1.0, 1.0, 1.0, GaussianKind::Mixed).unwrap();
        assert!((m - (0.5 * 1.5f64.log2() + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_regime_errors() {
        let k = GaussianKind::OneSidedWeak;
        assert!(gaussian_reference(1.0, 1.0, 1.0, 0.0, k).is_err());
        assert!(gaussian_reference(1.0, 1.0, 0.5, 0.1, k).is_err());
        assert!(gaussian_reference(-1.0, 1.0, 0.5, 0.0, k).is_err());
        assert!(gaussian_reference(1.0, 1.0, 0.5, 0.5, GaussianKind::Mixed).is_err());
        assert!(gaussian_reference(1.0, 1.0, 1.5, 2.0, GaussianKind::Mixed).is_err());
        assert_eq!(
            "mixed".parse::<GaussianKind>().unwrap(),
            GaussianKind::Mixed
        );
        assert!("strong".parse::<GaussianKind>().is_err());
    }

    #[test]
    fn gaussian_decreasing_in_a() {
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let a = i as f64 / 100.0;
            let v = gaussian_reference(2.0, 1.5, a, 0.0, GaussianKind::OneSidedWeak).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }
}
