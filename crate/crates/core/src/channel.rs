//! The two-user discrete memoryless interference channel and its
//! interference classification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{maximize_product_input, OptimizerConfig};
use crate::prob::{entropy_of_slice, CondDist, Dist, JointDist, PROB_TOL};

/// Transition law `p(y1, y2 | x1, x2)` stored as a flat tensor indexed
/// `[x1][x2][y1][y2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmic {
    nx1: usize,
    nx2: usize,
    ny1: usize,
    ny2: usize,
    t: Vec<f64>,
    // cached marginal tensors [x1][x2][y1] and [x1][x2][y2], and their row entropies
    t1: Vec<f64>,
    t2: Vec<f64>,
    h1: Vec<f64>,
    h2: Vec<f64>,
}

impl Dmic {
    pub fn new(nx1: usize, nx2: usize, ny1: usize, ny2: usize, t: Vec<f64>) -> Result<Self> {
        if [nx1, nx2, ny1, ny2].contains(&0) {
            return Err(Error::EmptyAlphabet);
        }
        let len = nx1 * nx2 * ny1 * ny2;
        if t.len() != len {
            return Err(Error::SizeMismatch(format!(
                "tensor {nx1}x{nx2}x{ny1}x{ny2} needs {len} entries, got {}",
                t.len()
            )));
        }
        for x1 in 0..nx1 {
            for x2 in 0..nx2 {
                let mut sum = 0.0;
                for y1 in 0..ny1 {
                    for y2 in 0..ny2 {
                        let value = t[((x1 * nx2 + x2) * ny1 + y1) * ny2 + y2];
                        if !value.is_finite() || value < 0.0 {
                            return Err(Error::NegativeTransition {
                                x1,
                                x2,
                                y1,
                                y2,
                                value,
                            });
                        }
                        sum += value;
                    }
                }
                if (sum - 1.0).abs() > PROB_TOL {
                    return Err(Error::RowSum { x1, x2, sum });
                }
            }
        }

        let rows = nx1 * nx2;
        let mut t1 = vec![0.0; rows * ny1];
        let mut t2 = vec![0.0; rows * ny2];
        for r in 0..rows {
            for y1 in 0..ny1 {
                for y2 in 0..ny2 {
                    let v = t[(r * ny1 + y1) * ny2 + y2];
                    t1[r * ny1 + y1] += v;
                    t2[r * ny2 + y2] += v;
                }
            }
        }
        let h1 = t1.chunks(ny1).map(entropy_of_slice).collect();
        let h2 = t2.chunks(ny2).map(entropy_of_slice).collect();
        Ok(Self {
            nx1,
            nx2,
            ny1,
            ny2,
            t,
            t1,
            t2,
            h1,
            h2,
        })
    }

    /// Builds the tensor from a closure `p(x1, x2, y1, y2)`.
    pub fn from_fn(
        nx1: usize,
        nx2: usize,
        ny1: usize,
        ny2: usize,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut t = Vec::with_capacity(nx1 * nx2 * ny1 * ny2);
        for x1 in 0..nx1 {
            for x2 in 0..nx2 {
                for y1 in 0..ny1 {
                    for y2 in 0..ny2 {
                        t.push(f(x1, x2, y1, y2));
                    }
                }
            }
        }
        Self::new(nx1, nx2, ny1, ny2, t)
    }

    /// `(nx1, nx2, ny1, ny2)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.nx1, self.nx2, self.ny1, self.ny2)
    }

    pub fn nx1(&self) -> usize {
        self.nx1
    }

    pub fn nx2(&self) -> usize {
        self.nx2
    }

    pub fn ny1(&self) -> usize {
        self.ny1
    }

    pub fn ny2(&self) -> usize {
        self.ny2
    }

    pub fn tensor(&self) -> &[f64] {
        &self.t
    }

    pub fn get(&self, x1: usize, x2: usize, y1: usize, y2: usize) -> f64 {
        self.t[((x1 * self.nx2 + x2) * self.ny1 + y1) * self.ny2 + y2]
    }

    /// `p(y1 | x1, x2)`.
    pub fn p_y1(&self, x1: usize, x2: usize, y1: usize) -> f64 {
        self.t1[(x1 * self.nx2 + x2) * self.ny1 + y1]
    }

    /// `p(y2 | x1, x2)`.
    pub fn p_y2(&self, x1: usize, x2: usize, y2: usize) -> f64 {
        self.t2[(x1 * self.nx2 + x2) * self.ny2 + y2]
    }

    pub fn is_binary(&self) -> bool {
        self.dims() == (2, 2, 2, 2)
    }
}

/// Returns `(p(y1|x1,x2), p(y2|x1,x2))`, rows indexed by `x1 * nx2 + x2`.
pub fn marginal_channels(c: &Dmic) -> (CondDist, CondDist) {
    let rows = |t: &[f64], n: usize| {
        CondDist::new(t.chunks(n).map(<[f64]>::to_vec).collect())
            .expect("marginals of a valid tensor are valid")
    };
    (rows(&c.t1, c.ny1), rows(&c.t2, c.ny2))
}

/// Independent inputs `p(x1) p(x2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductInput {
    pub p1: Dist,
    pub p2: Dist,
}

impl ProductInput {
    pub fn new(p1: Dist, p2: Dist) -> Self {
        Self { p1, p2 }
    }

    /// Binary inputs with `Pr(X1 = 1) = a`, `Pr(X2 = 1) = b`.
    pub fn binary(a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            p1: Dist::bernoulli(a)?,
            p2: Dist::bernoulli(b)?,
        })
    }

    fn check(&self, c: &Dmic) -> Result<()> {
        if self.p1.len() != c.nx1 || self.p2.len() != c.nx2 {
            return Err(Error::SizeMismatch(format!(
                "input alphabets ({}, {}) vs channel ({}, {})",
                self.p1.len(),
                self.p2.len(),
                c.nx1,
                c.nx2
            )));
        }
        Ok(())
    }
}

/// `p(x1, x2, y1, y2)` with axes named `X1, X2, Y1, Y2`.
pub fn induced_joint(c: &Dmic, input: &ProductInput) -> Result<JointDist> {
    input.check(c)?;
    let (p1, p2) = (input.p1.values(), input.p2.values());
    let block = c.ny1 * c.ny2;
    let mut table = Vec::with_capacity(c.t.len());
    for (rows, &a) in c.t.chunks(c.nx2 * block).zip(p1) {
        for (row, &b) in rows.chunks(block).zip(p2) {
            table.extend(row.iter().map(|v| a * b * v));
        }
    }
    JointDist::new(&[c.nx1, c.nx2, c.ny1, c.ny2], table)?.with_names(&["X1", "X2", "Y1", "Y2"])
}

/// Conditional output entropies under a product input.
#[derive(Debug, Clone, Copy, PartialEq)]
struct OutputEntropies {
    h: f64,
    given_x1: f64,
    given_x2: f64,
    given_both: f64,
}

fn output_entropies(
    t: &[f64],
    row_h: &[f64],
    nx2: usize,
    ny: usize,
    p1: &[f64],
    p2: &[f64],
) -> OutputEntropies {
    let mut marg = vec![0.0; ny];
    let mut buf = vec![0.0; ny];
    let mut given_x1 = 0.0;
    let mut given_both = 0.0;
    for (x1, &a) in p1.iter().enumerate() {
        buf.iter_mut().for_each(|v| *v = 0.0);
        for (x2, &b) in p2.iter().enumerate() {
            let r = x1 * nx2 + x2;
            given_both += a * b * row_h[r];
            if b > 0.0 {
                for (v, &w) in buf.iter_mut().zip(&t[r * ny..(r + 1) * ny]) {
                    *v += b * w;
                }
            }
        }
        if a > 0.0 {
            given_x1 += a * entropy_of_slice(&buf);
            for (m, &v) in marg.iter_mut().zip(&buf) {
                *m += a * v;
            }
        }
    }
    let mut given_x2 = 0.0;
    for (x2, &b) in p2.iter().enumerate() {
        if b <= 0.0 {
            continue;
        }
        buf.iter_mut().for_each(|v| *v = 0.0);
        for (x1, &a) in p1.iter().enumerate() {
            if a > 0.0 {
                let r = x1 * nx2 + x2;
                for (v, &w) in buf.iter_mut().zip(&t[r * ny..(r + 1) * ny]) {
                    *v += a * w;
                }
            }
        }
        given_x2 += b * entropy_of_slice(&buf);
    }
    OutputEntropies {
        h: entropy_of_slice(&marg),
        given_x1,
        given_x2,
        given_both,
    }
}

/// Every single-letter information quantity of a DMIC under one product
/// input, computed directly from the cached marginal tensors.
///
/// This is the hot path of all optimizations; tests cross-check it against
/// the generic [`JointDist`] route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoProfile {
    y1: OutputEntropies,
    y2: OutputEntropies,
}

impl InfoProfile {
    /// Unchecked: `p1`, `p2` must be distributions of the right sizes.
    pub fn from_slices(c: &Dmic, p1: &[f64], p2: &[f64]) -> Self {
        Self {
            y1: output_entropies(&c.t1, &c.h1, c.nx2, c.ny1, p1, p2),
            y2: output_entropies(&c.t2, &c.h2, c.nx2, c.ny2, p1, p2),
        }
    }

    pub fn new(c: &Dmic, input: &ProductInput) -> Result<Self> {
        input.check(c)?;
        Ok(Self::from_slices(c, input.p1.values(), input.p2.values()))
    }

    pub fn i_x1_y1(&self) -> f64 {
        self.y1.h - self.y1.given_x1
    }
    pub fn i_x2_y1(&self) -> f64 {
        self.y1.h - self.y1.given_x2
    }
    pub fn i_x1_y1_given_x2(&self) -> f64 {
        self.y1.given_x2 - self.y1.given_both
    }
    pub fn i_x2_y1_given_x1(&self) -> f64 {
        self.y1.given_x1 - self.y1.given_both
    }
    pub fn i_x1x2_y1(&self) -> f64 {
        self.y1.h - self.y1.given_both
    }
    pub fn i_x2_y2(&self) -> f64 {
        self.y2.h - self.y2.given_x2
    }
    pub fn i_x1_y2(&self) -> f64 {
        self.y2.h - self.y2.given_x1
    }
    pub fn i_x2_y2_given_x1(&self) -> f64 {
        self.y2.given_x1 - self.y2.given_both
    }
    pub fn i_x1_y2_given_x2(&self) -> f64 {
        self.y2.given_x2 - self.y2.given_both
    }
    pub fn i_x1x2_y2(&self) -> f64 {
        self.y2.h - self.y2.given_both
    }
}

/// True iff `p(y2|x1,x2)` does not depend on `x1` (within `tol`).
pub fn classify_one_sided(c: &Dmic, tol: f64) -> bool {
    (0..c.nx2).all(|x2| {
        (0..c.ny2).all(|y2| {
            let reference = c.p_y2(0, x2, y2);
            (1..c.nx1).all(|x1| (c.p_y2(x1, x2, y2) - reference).abs() <= tol)
        })
    })
}

/// `p(y2|x2)` of a one-sided channel, averaged over `x1`.
pub fn y2_given_x2(c: &Dmic) -> CondDist {
    let rows = (0..c.nx2)
        .map(|x2| {
            let mut row: Vec<f64> = (0..c.ny2)
                .map(|y2| (0..c.nx1).map(|x1| c.p_y2(x1, x2, y2)).sum::<f64>() / c.nx1 as f64)
                .collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
            row
        })
        .collect();
    CondDist::new(rows).expect("average of distributions")
}

/// Attempts the factorization `p(y1,y2|x1,x2) = p(y2|x2) p'(y1|x1,y2)`.
///
/// Returns `p'` with rows indexed `x1 * ny2 + y2`; rows not pinned by any
/// `x2` with `p(y2|x2) > 0` are filled uniformly. `Ok(None)` means the
/// channel is one-sided but does not factor. Errors if the channel is not
/// one-sided.
pub fn factorize_weak(c: &Dmic, tol: f64) -> Result<Option<CondDist>> {
    if !classify_one_sided(c, tol) {
        return Err(Error::PreconditionUnmet {
            requirement: "one-sided interference",
            verdict: "p(y2|x1,x2) depends on x1".into(),
        });
    }
    let py2 = y2_given_x2(c);
    let mut rows = Vec::with_capacity(c.nx1 * c.ny2);
    for x1 in 0..c.nx1 {
        for y2 in 0..c.ny2 {
            // reference x2: the one giving this y2 the most mass
            let (x2_ref, w_ref) = (0..c.nx2)
                .map(|x2| (x2, py2.get(x2, y2)))
                .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            let row: Vec<f64> = if w_ref > 0.0 {
                (0..c.ny1)
                    .map(|y1| c.get(x1, x2_ref, y1, y2) / w_ref)
                    .collect()
            } else {
                vec![1.0 / c.ny1 as f64; c.ny1]
            };
            for x2 in 0..c.nx2 {
                let w = py2.get(x2, y2);
                for (y1, &r) in row.iter().enumerate() {
                    if (c.get(x1, x2, y1, y2) - w * r).abs() > tol {
                        return Ok(None);
                    }
                }
            }
            let s: f64 = row.iter().sum();
            rows.push(row.into_iter().map(|v| (v / s).max(0.0)).collect());
        }
    }
    Ok(Some(CondDist::new(rows)?))
}

/// True iff `X2 - (X1, Y2) - Y1` holds structurally: `p(y1|x1,x2,y2)` does
/// not depend on `x2` wherever `p(y2|x1,x2) > 0`.
pub fn check_degraded(c: &Dmic, tol: f64) -> bool {
    for x1 in 0..c.nx1 {
        for y2 in 0..c.ny2 {
            let (x2_ref, w_ref) = (0..c.nx2)
                .map(|x2| (x2, c.p_y2(x1, x2, y2)))
                .fold((0, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if w_ref <= 0.0 {
                continue;
            }
            for x2 in 0..c.nx2 {
                let w = c.p_y2(x1, x2, y2);
                for y1 in 0..c.ny1 {
                    let expected = w * c.get(x1, x2_ref, y1, y2) / w_ref;
                    if (c.get(x1, x2, y1, y2) - expected).abs() > tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The mutual-information conditions that quantify over all product inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// `I(X1;Y1|X2) <= I(X1;Y2)`
    #[serde(rename = "very-strong-1")]
    VeryStrong1,
    /// `I(X2;Y2|X1) <= I(X2;Y1)`
    #[serde(rename = "very-strong-2")]
    VeryStrong2,
    /// `I(X1;Y1|X2) <= I(X1;Y2|X2)`
    #[serde(rename = "strong-1")]
    Strong1,
    /// `I(X2;Y2|X1) <= I(X2;Y1|X1)`
    #[serde(rename = "strong-2")]
    Strong2,
    /// `I(X2;Y1|X1) <= I(X2;Y2)`
    #[serde(rename = "weak-alt")]
    WeakAlt,
    /// `I(X1;Y1|X2) <= I(X1;Y2|X2)`, the second half of mixed interference.
    #[serde(rename = "mixed-mi")]
    MixedMi,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::VeryStrong1,
        Condition::VeryStrong2,
        Condition::Strong1,
        Condition::Strong2,
        Condition::WeakAlt,
        Condition::MixedMi,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Condition::VeryStrong1 => "very-strong-1",
            Condition::VeryStrong2 => "very-strong-2",
            Condition::Strong1 => "strong-1",
            Condition::Strong2 => "strong-2",
            Condition::WeakAlt => "weak-alt",
            Condition::MixedMi => "mixed-mi",
        }
    }

    /// Right side minus left side, in bits. The condition holds at this input
    /// iff the gap is nonnegative.
    pub fn gap(self, info: &InfoProfile) -> f64 {
        match self {
            Condition::VeryStrong1 => info.i_x1_y2() - info.i_x1_y1_given_x2(),
            Condition::VeryStrong2 => info.i_x2_y1() - info.i_x2_y2_given_x1(),
            Condition::Strong1 | Condition::MixedMi => {
                info.i_x1_y2_given_x2() - info.i_x1_y1_given_x2()
            }
            Condition::Strong2 => info.i_x2_y1_given_x1() - info.i_x2_y2_given_x1(),
            Condition::WeakAlt => info.i_x2_y2() - info.i_x2_y1_given_x1(),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::UnknownCondition(s.to_string()))
    }
}

/// Certified minimum of one condition's gap over product inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub condition: Condition,
    pub min_gap: f64,
    pub witness: ProductInput,
    pub holds: bool,
}

/// Minimizes the gap of `condition` over all product inputs.
pub fn mi_condition_report(
    c: &Dmic,
    condition: Condition,
    opt: &OptimizerConfig,
    tol: f64,
) -> Result<ConditionRecord> {
    let r = maximize_product_input(
        |b: &[&[f64]]| -condition.gap(&InfoProfile::from_slices(c, b[0], b[1])),
        &[c.nx1, c.nx2],
        opt,
    )?;
    let min_gap = -r.value;
    let mut it = r.argopt.into_iter();
    let witness = ProductInput::new(it.next().expect("p1"), it.next().expect("p2"));
    Ok(ConditionRecord {
        condition,
        min_gap,
        witness,
        holds: min_gap >= -tol,
    })
}

/// All verdicts for one channel. Labels are not exclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub one_sided: bool,
    /// `p'(y1|x1,y2)`, rows indexed `x1 * ny2 + y2`, when the weak
    /// factorization exists.
    pub weak_factorization: Option<CondDist>,
    pub degraded: bool,
    pub conditions: Vec<ConditionRecord>,
    pub tol: f64,
    pub grid_step: f64,
}

impl ClassificationReport {
    pub fn condition(&self, c: Condition) -> Option<&ConditionRecord> {
        self.conditions.iter().find(|r| r.condition == c)
    }

    pub fn holds(&self, c: Condition) -> bool {
        self.condition(c).is_some_and(|r| r.holds)
    }

    /// One-sided with the weak factorization.
    pub fn weak_one_sided(&self) -> bool {
        self.one_sided && self.weak_factorization.is_some()
    }

    /// Degraded toward receiver 1 and the mixed MI condition.
    pub fn mixed(&self) -> bool {
        self.degraded && self.holds(Condition::MixedMi)
    }

    pub fn strong(&self) -> bool {
        self.holds(Condition::Strong1) && self.holds(Condition::Strong2)
    }

    pub fn very_strong(&self) -> bool {
        self.holds(Condition::VeryStrong1) && self.holds(Condition::VeryStrong2)
    }

    pub fn labels(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.one_sided {
            out.push("one-sided");
        }
        if self.weak_one_sided() {
            out.push("weak-one-sided");
        }
        if self.degraded {
            out.push("degraded");
        }
        if self.holds(Condition::WeakAlt) {
            out.push("weak-alt");
        }
        if self.mixed() {
            out.push("mixed");
        }
        if self.strong() {
            out.push("strong");
        }
        if self.very_strong() {
            out.push("very-strong");
        }
        out
    }
}

/// Runs every structural test and every MI condition.
pub fn classify(c: &Dmic, opt: &OptimizerConfig, tol: f64) -> Result<ClassificationReport> {
    opt.validate()?;
    let one_sided = classify_one_sided(c, tol);
    let weak_factorization = if one_sided {
        factorize_weak(c, tol)?
    } else {
        None
    };
    let conditions = Condition::ALL
        .into_iter()
        .map(|cond| mi_condition_report(c, cond, opt, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassificationReport {
        one_sided,
        weak_factorization,
        degraded: check_degraded(c, tol),
        conditions,
        tol,
        grid_step: 1.0 / opt.divisions() as f64,
    })
}
