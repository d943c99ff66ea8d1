//! Finite probability arithmetic.
//!
//! Everything is measured in bits. Zero-probability cells follow the usual
//! conventions: `0 · log 0 = 0`, and conditionals given a null event are
//! unconstrained (they are skipped by the Markov test).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for "sums to one".
pub const PROB_TOL: f64 = 1e-9;

/// Default tolerance for Markov-chain and factorization checks.
pub const DEFAULT_TOL: f64 = 1e-9;

fn check_probabilities(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    let mut sum = 0.0;
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFiniteProbability { index });
        }
        if value < 0.0 {
            return Err(Error::NegativeProbability { index, value });
        }
        sum += value;
    }
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// `-Σ p log2 p` over the slice, skipping zeros. The slice is not validated.
pub(crate) fn entropy_of_slice(values: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in values {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h.max(0.0)
}

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Dist {
    values: Vec<f64>,
}

impl Dist {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_probabilities(&values)?;
        Ok(Self { values })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Self {
            values: vec![1.0 / n as f64; n],
        })
    }

    /// Point mass on `index`.
    pub fn point(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::SizeMismatch(format!(
                "point mass index {index} outside alphabet of size {n}"
            )));
        }
        let mut values = vec![0.0; n];
        values[index] = 1.0;
        Ok(Self { values })
    }

    /// `(1 - p, p)`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
                range: "[0, 1]",
            });
        }
        Ok(Self {
            values: vec![1.0 - p, p],
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for Dist {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Dist::new(values)
    }
}

impl From<Dist> for Vec<f64> {
    fn from(d: Dist) -> Self {
        d.values
    }
}

/// A conditional law: one [`Dist`] per conditioning value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct CondDist {
    rows: Vec<Dist>,
}

impl CondDist {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let cols = rows[0].len();
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(r, row)| {
                if row.len() != cols {
                    return Err(Error::SizeMismatch(format!(
                        "row {r} has {} entries, expected {cols}",
                        row.len()
                    )));
                }
                Dist::new(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }

    pub fn from_dists(rows: Vec<Dist>) -> Result<Self> {
        Self::new(rows.into_iter().map(Dist::into_vec).collect())
    }

    pub fn rows(&self) -> &[Dist] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &Dist {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.rows[r].values[c]
    }

    /// Size of the conditioning alphabet.
    pub fn row_alphabet(&self) -> usize {
        self.rows.len()
    }

    /// Size of the output alphabet.
    pub fn col_alphabet(&self) -> usize {
        self.rows[0].len()
    }

    /// Maximum entrywise difference against another table of the same shape.
    pub fn max_abs_diff(&self, other: &CondDist) -> f64 {
        self.rows
            .iter()
            .zip(&other.rows)
            .flat_map(|(a, b)| a.values.iter().zip(&b.values))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<Vec<f64>>> for CondDist {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        CondDist::new(rows)
    }
}

impl From<CondDist> for Vec<Vec<f64>> {
    fn from(c: CondDist) -> Self {
        c.rows.into_iter().map(Dist::into_vec).collect()
    }
}

/// A joint law over a product of finite alphabets, stored row-major
/// (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    names: Vec<String>,
    shape: Vec<usize>,
    table: Vec<f64>,
}

impl JointDist {
    pub fn new(shape: &[usize], table: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::EmptyAlphabet);
        }
        let len: usize = shape.iter().product();
        if len != table.len() {
            return Err(Error::SizeMismatch(format!(
                "shape {shape:?} needs {len} entries, got {}",
                table.len()
            )));
        }
        check_probabilities(&table)?;
        Ok(Self {
            names: (0..shape.len()).map(|i| format!("A{i}")).collect(),
            shape: shape.to_vec(),
            table,
        })
    }

    /// Attach axis names (one per axis).
    pub fn with_names(mut self, names: &[&str]) -> Result<Self> {
        if names.len() != self.shape.len() {
            return Err(Error::Arity {
                expected: self.shape.len(),
                found: names.len(),
            });
        }
        self.names = names.iter().map(|s| s.to_string()).collect();
        Ok(self)
    }

    /// Independent coupling `a × b`.
    pub fn product(a: &Dist, b: &Dist) -> Self {
        let table = a
            .values
            .iter()
            .flat_map(|&pa| b.values.iter().map(move |&pb| pa * pb))
            .collect();
        Self {
            names: vec!["A0".into(), "A1".into()],
            shape: vec![a.len(), b.len()],
            table,
        }
    }

    /// Joint law of `X ~ input` and `Y` drawn from `channel` row `X`.
    pub fn from_channel(input: &Dist, channel: &CondDist) -> Result<Self> {
        if input.len() != channel.row_alphabet() {
            return Err(Error::SizeMismatch(format!(
                "input alphabet {} vs channel rows {}",
                input.len(),
                channel.row_alphabet()
            )));
        }
        let table = input
            .values
            .iter()
            .zip(channel.rows())
            .flat_map(|(&px, row)| row.values.iter().map(move |&w| px * w))
            .collect();
        Ok(Self {
            names: vec!["X".into(), "Y".into()],
            shape: vec![input.len(), channel.col_alphabet()],
            table,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn n_axes(&self) -> usize {
        self.shape.len()
    }

    pub fn axis(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        for (i, &a) in axes.iter().enumerate() {
            if a >= self.shape.len() {
                return Err(Error::SizeMismatch(format!(
                    "axis {a} out of range for {} axes",
                    self.shape.len()
                )));
            }
            if axes[..i].contains(&a) {
                return Err(Error::SizeMismatch(format!("axis {a} listed twice")));
            }
        }
        Ok(())
    }

    /// Flat table of the marginal on `keep`, in the order given.
    fn marginal_table(&self, keep: &[usize]) -> Vec<f64> {
        let out_shape: Vec<usize> = keep.iter().map(|&a| self.shape[a]).collect();
        let mut out_stride = vec![0usize; self.shape.len()];
        let mut s = 1;
        for (k, &a) in keep.iter().enumerate().rev() {
            out_stride[a] = s;
            s *= out_shape[k];
        }
        let mut out = vec![0.0; s.max(1)];
        let mut idx = vec![0usize; self.shape.len()];
        let mut target = 0usize;
        for &p in &self.table {
            out[target] += p;
            // odometer increment, last axis fastest
            for ax in (0..self.shape.len()).rev() {
                idx[ax] += 1;
                target += out_stride[ax];
                if idx[ax] < self.shape[ax] {
                    break;
                }
                target -= out_stride[ax] * idx[ax];
                idx[ax] = 0;
            }
        }
        out
    }

    /// Marginal on the listed axes, in the listed order (so this also permutes).
    pub fn marginal(&self, keep: &[usize]) -> Result<JointDist> {
        if keep.is_empty() {
            return Err(Error::Arity {
                expected: 1,
                found: 0,
            });
        }
        self.check_axes(keep)?;
        Ok(JointDist {
            names: keep.iter().map(|&a| self.names[a].clone()).collect(),
            shape: keep.iter().map(|&a| self.shape[a]).collect(),
            table: self.marginal_table(keep),
        })
    }

    /// Marginalize onto the listed groups and merge each group into one
    /// composite axis.
    pub fn group(&self, groups: &[&[usize]]) -> Result<JointDist> {
        let keep: Vec<usize> = groups.iter().flat_map(|g| g.iter().copied()).collect();
        if groups.iter().any(|g| g.is_empty()) {
            return Err(Error::SizeMismatch("empty axis group".into()));
        }
        self.check_axes(&keep)?;
        let table = self.marginal_table(&keep);
        let shape = groups
            .iter()
            .map(|g| g.iter().map(|&a| self.shape[a]).product())
            .collect();
        let names = groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|&a| self.names[a].as_str())
                    .collect::<Vec<_>>()
                    .join("")
            })
            .collect();
        Ok(JointDist {
            names,
            shape,
            table,
        })
    }

    /// Entropy of the marginal on `axes` (empty set gives 0).
    pub fn entropy_of(&self, axes: &[usize]) -> Result<f64> {
        if axes.is_empty() {
            return Ok(0.0);
        }
        self.check_axes(axes)?;
        Ok(entropy_of_slice(&self.marginal_table(axes)))
    }

    /// `I(A;B|C)` between axis groups. `c` may be empty.
    pub fn cmi(&self, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
        let cat = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
        let ac = cat(a, c);
        let bc = cat(b, c);
        let abc = cat(&ac, b);
        self.check_axes(&abc)?;
        let v = self.entropy_of(&ac)? + self.entropy_of(&bc)?
            - self.entropy_of(&abc)?
            - self.entropy_of(c)?;
        Ok(v.max(0.0))
    }

    /// Flatten into a single distribution over the product alphabet.
    pub fn to_dist(&self) -> Dist {
        Dist {
            values: self.table.clone(),
        }
    }
}

/// `H(d)` in bits.
pub fn entropy(d: &Dist) -> f64 {
    entropy_of_slice(&d.values)
}

fn h2_unchecked(p: f64) -> f64 {
    entropy_of_slice(&[p, 1.0 - p])
}

/// Binary entropy `h2(p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    Ok(h2_unchecked(p))
}

pub(crate) fn h2(p: f64) -> f64 {
    h2_unchecked(p.clamp(0.0, 1.0))
}

/// `I(A;B)` for a two-axis joint.
pub fn mutual_information(j: &JointDist) -> Result<f64> {
    if j.n_axes() != 2 {
        return Err(Error::Arity {
            expected: 2,
            found: j.n_axes(),
        });
    }
    j.cmi(&[0], &[1], &[])
}

/// `I(A;B|C)` for a three-axis joint; the last axis is the conditioning one.
pub fn conditional_mutual_information(j: &JointDist) -> Result<f64> {
    if j.n_axes() != 3 {
        return Err(Error::Arity {
            expected: 3,
            found: j.n_axes(),
        });
    }
    j.cmi(&[0], &[1], &[2])
}

/// Outcome of a Markov-chain test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovCheck {
    pub holds: bool,
    pub max_violation: f64,
}

/// Tests `X - Y - Z` on a three-axis joint ordered `(X, Y, Z)`:
/// `|p(z|x,y) - p(z|y)| <= tol` wherever `p(x,y) > 0`.
pub fn is_markov_chain(j: &JointDist, tol: f64) -> Result<MarkovCheck> {
    if j.n_axes() != 3 {
        return Err(Error::Arity {
            expected: 3,
            found: j.n_axes(),
        });
    }
    let (nx, ny, nz) = (j.shape[0], j.shape[1], j.shape[2]);
    let pyz = j.marginal_table(&[1, 2]);
    let t = &j.table;
    let mut max_violation: f64 = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let base = (x * ny + y) * nz;
            let pxy: f64 = t[base..base + nz].iter().sum();
            if pxy <= 0.0 {
                continue;
            }
            let py: f64 = pyz[y * nz..(y + 1) * nz].iter().sum();
            for z in 0..nz {
                let v = (t[base + z] / pxy - pyz[y * nz + z] / py).abs();
                max_violation = max_violation.max(v);
            }
        }
    }
    Ok(MarkovCheck {
        holds: max_violation <= tol,
        max_violation,
    })
}

/// [`is_markov_chain`] with each position given as a group of axes.
pub fn is_markov_chain_groups(
    j: &JointDist,
    x: &[usize],
    y: &[usize],
    z: &[usize],
    tol: f64,
) -> Result<MarkovCheck> {
    is_markov_chain(&j.group(&[x, y, z])?, tol)
}
