//! Deterministic maximization over products of probability simplices.
//!
//! Three tools live here:
//!
//! * [`grid_oracle`] evaluates an objective on every point of a simplex
//!   lattice. It is slow but independent of any search heuristic, so it is the
//!   reference every other optimizer is checked against.
//! * [`maximize_product_input`] runs a coarse lattice pass and then
//!   coordinate ascent (one simplex block at a time) from the best lattice
//!   cells and from seeded random starts.
//! * [`blahut_arimoto`] solves the concave single-input problem
//!   `max_p I(X;Y)` for a fixed channel.
//!
//! Points are passed to objectives as one slice per simplex block, using full
//! simplex coordinates (no stick-breaking).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{CondDist, Dist};

/// Tuning knobs shared by every optimizer. Fixing this fixes the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Lattice spacing per free simplex coordinate, in `(0, 1]`.
    pub grid_step: f64,
    /// Number of seeded random starts for the local search.
    pub multistarts: usize,
    /// Sweep limit for each local search.
    pub max_iters: usize,
    /// Improvement (bits) below which a sweep counts as stalled.
    pub convergence_tol: f64,
    pub rng_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_step: 0.02,
            multistarts: 8,
            max_iters: 400,
            convergence_tol: 1e-12,
            rng_seed: 0x5eed_d31c,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grid_step > 0.0 && self.grid_step <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "grid_step {} outside (0, 1]",
                self.grid_step
            )));
        }
        if self.multistarts == 0 {
            return Err(Error::InvalidConfig("multistarts must be >= 1".into()));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "convergence_tol {} must be > 0",
                self.convergence_tol
            )));
        }
        Ok(())
    }

    /// Number of lattice divisions per unit implied by `grid_step`.
    pub fn divisions(&self) -> usize {
        divisions_for(self.grid_step)
    }
}

/// Best point found by an optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub value: f64,
    /// One distribution per simplex block.
    pub argopt: Vec<Dist>,
    pub iterations: usize,
    /// Spacing of the lattice pass that seeded the search.
    pub certified_grid_step: f64,
}

impl OptResult {
    pub fn blocks(&self) -> Vec<&[f64]> {
        self.argopt.iter().map(|d| d.values()).collect()
    }
}

/// Smallest `m` with `1/m <= step` (exact when `1/step` is an integer).
fn divisions_for(step: f64) -> usize {
    let inv = 1.0 / step;
    let r = inv.round();
    if (inv - r).abs() < 1e-9 {
        r.max(1.0) as usize
    } else {
        inv.ceil() as usize
    }
}

/// All points of the `k`-simplex whose coordinates are multiples of `1/m`,
/// in lexicographic order of the integer compositions (vertices included).
pub fn simplex_lattice(k: usize, m: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() + 1 == k {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / m as f64).collect());
            cur.pop();
            return;
        }
        for c in (0..=left).rev() {
            cur.push(c);
            rec(k, left - c, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    rec(k, m, m, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Number of points of [`simplex_lattice`] for the given sizes.
pub fn lattice_size(dims: &[usize], m: usize) -> f64 {
    dims.iter().map(|&k| binomial(m + k - 1, k - 1)).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::EmptyAlphabet);
    }
    Ok(())
}

fn to_dists(blocks: &[Vec<f64>]) -> Vec<Dist> {
    blocks
        .iter()
        .map(|b| Dist::new(b.clone()).expect("optimizer iterates stay on the simplex"))
        .collect()
}

fn eval<F>(objective: &F, blocks: &[Vec<f64>]) -> Result<f64>
where
    F: Fn(&[&[f64]]) -> f64,
{
    let views: Vec<&[f64]> = blocks.iter().map(Vec::as_slice).collect();
    let v = objective(&views);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteObjective {
            at: format!("{blocks:?}"),
        })
    }
}

struct Lattice {
    points: Vec<Vec<Vec<f64>>>,
    total: usize,
}

impl Lattice {
    fn new(dims: &[usize], m: usize) -> Self {
        let points: Vec<_> = dims.iter().map(|&k| simplex_lattice(k, m)).collect();
        let total = points.iter().map(Vec::len).product();
        Self { points, total }
    }

    /// Mixed-radix decode, last block fastest.
    fn decode(&self, mut idx: usize) -> Vec<&[f64]> {
        let mut out = vec![&[][..]; self.points.len()];
        for (b, pts) in self.points.iter().enumerate().rev() {
            out[b] = &pts[idx % pts.len()];
            idx /= pts.len();
        }
        out
    }

    fn owned(&self, idx: usize) -> Vec<Vec<f64>> {
        self.decode(idx).into_iter().map(<[f64]>::to_vec).collect()
    }
}

/// Evaluates every lattice point, returning `(index, value)` for the best
/// `keep` cells ordered by value (ties by lattice index).
fn lattice_scan<F>(objective: &F, lattice: &Lattice, keep: usize) -> Result<Vec<(usize, f64)>>
where
    F: Fn(&[&[f64]]) -> f64 + Sync,
{
    const CHUNK: usize = 4096;
    let chunks = lattice.total.div_ceil(CHUNK);
    let partial: Vec<Result<Vec<(usize, f64)>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut best: Vec<(usize, f64)> = Vec::with_capacity(keep + 1);
            for idx in c * CHUNK..((c + 1) * CHUNK).min(lattice.total) {
                let v = objective(&lattice.decode(idx));
                if !v.is_finite() {
                    return Err(Error::NonFiniteObjective {
                        at: format!("{:?}", lattice.decode(idx)),
                    });
                }
                insert_top(&mut best, (idx, v), keep);
            }
            Ok(best)
        })
        .collect();
    let mut best = Vec::with_capacity(keep + 1);
    for part in partial {
        for cand in part? {
            insert_top(&mut best, cand, keep);
        }
    }
    Ok(best)
}

fn insert_top(best: &mut Vec<(usize, f64)>, cand: (usize, f64), keep: usize) {
    let pos = best
        .iter()
        .position(|&(i, v)| cand.1 > v || (cand.1 == v && cand.0 < i))
        .unwrap_or(best.len());
    if pos < keep {
        best.insert(pos, cand);
        best.truncate(keep);
    }
}

/// Exhaustive evaluation over the lattice of spacing `step` on the product
/// of simplices with the given sizes. Ties go to the lowest lattice index.
pub fn grid_oracle<F>(objective: F, simplex_dims: &[usize], step: f64) -> Result<OptResult>
where
    F: Fn(&[&[f64]]) -> f64 + Sync,
{
    check_dims(simplex_dims)?;
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "grid step {step} outside (0, 1]"
        )));
    }
    let m = divisions_for(step);
    let lattice = Lattice::new(simplex_dims, m);
    let best = lattice_scan(&objective, &lattice, 1)?;
    let (idx, value) = best[0];
    Ok(OptResult {
        value,
        argopt: to_dists(&lattice.owned(idx)),
        iterations: lattice.total,
        certified_grid_step: 1.0 / m as f64,
    })
}

/// Lattice pass followed by multistart coordinate ascent.
///
/// The ascent moves probability mass between pairs of coordinates inside one
/// block at a time and only accepts strict improvements, so the objective is
/// nondecreasing along every run and the result is never below the lattice
/// best.
pub fn maximize_product_input<F>(
    objective: F,
    simplex_dims: &[usize],
    cfg: &OptimizerConfig,
) -> Result<OptResult>
where
    F: Fn(&[&[f64]]) -> f64 + Sync,
{
    maximize_with_starts(objective, simplex_dims, cfg, Vec::new())
}

/// [`maximize_product_input`] with extra caller-supplied starting points,
/// which are searched before the random starts.
pub fn maximize_with_starts<F>(
    objective: F,
    simplex_dims: &[usize],
    cfg: &OptimizerConfig,
    extra_starts: Vec<Vec<Vec<f64>>>,
) -> Result<OptResult>
where
    F: Fn(&[&[f64]]) -> f64 + Sync,
{
    cfg.validate()?;
    check_dims(simplex_dims)?;
    for s in &extra_starts {
        let ok = s.len() == simplex_dims.len()
            && s.iter().zip(simplex_dims).all(|(b, &k)| {
                b.len() == k
                    && b.iter().all(|&v| v >= 0.0)
                    && (b.iter().sum::<f64>() - 1.0).abs() <= crate::prob::PROB_TOL
            });
        if !ok {
            return Err(Error::SizeMismatch(
                "starting point does not match the simplex dimensions".into(),
            ));
        }
    }
    let m = cfg.divisions();
    let lattice = Lattice::new(simplex_dims, m);
    let top = lattice_scan(&objective, &lattice, TOP_CELLS)?;

    let mut starts: Vec<Vec<Vec<f64>>> = top.iter().map(|&(i, _)| lattice.owned(i)).collect();
    starts.extend(extra_starts);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    for _ in 0..cfg.multistarts {
        starts.push(
            simplex_dims
                .iter()
                .map(|&k| random_simplex_point(&mut rng, k))
                .collect(),
        );
    }

    let initial_step = 1.0 / m as f64;
    let runs: Vec<Result<Ascent>> = starts
        .into_par_iter()
        .map(|s| ascend(&objective, s, initial_step, cfg))
        .collect();

    let mut best: Option<(Vec<Vec<f64>>, f64)> = None;
    let mut iterations = lattice.total;
    for run in runs {
        let (x, v, it) = run?;
        iterations += it;
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((x, v));
        }
    }
    let (x, value) = best.expect("at least one start");
    Ok(OptResult {
        value,
        argopt: to_dists(&x),
        iterations,
        certified_grid_step: initial_step,
    })
}

const TOP_CELLS: usize = 4;

/// Final point, value and iteration count of one ascent.
type Ascent = (Vec<Vec<f64>>, f64, usize);
const MIN_MOVE: f64 = 1e-11;

/// Uniform point on the simplex (normalized exponentials).
pub(crate) fn random_simplex_point(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Pairwise-transfer coordinate ascent. A sweep visits every block and every
/// ordered pair `(to, from)`; when a sweep gains less than the convergence
/// tolerance the move size halves, and the run stops once it falls below
/// [`MIN_MOVE`].
fn ascend<F>(
    objective: &F,
    mut x: Vec<Vec<f64>>,
    initial_step: f64,
    cfg: &OptimizerConfig,
) -> Result<Ascent>
where
    F: Fn(&[&[f64]]) -> f64,
{
    let mut fx = eval(objective, &x)?;
    let mut h = initial_step;
    let mut sweeps = 0;
    while sweeps < cfg.max_iters && h >= MIN_MOVE {
        sweeps += 1;
        let start = fx;
        for b in 0..x.len() {
            let k = x[b].len();
            for to in 0..k {
                for from in 0..k {
                    if to == from || x[b][from] <= 0.0 {
                        continue;
                    }
                    let delta = h.min(x[b][from]);
                    let (old_to, old_from) = (x[b][to], x[b][from]);
                    x[b][to] = old_to + delta;
                    x[b][from] = if delta == old_from {
                        0.0
                    } else {
                        old_from - delta
                    };
                    let f = eval(objective, &x)?;
                    if f > fx {
                        fx = f;
                    } else {
                        x[b][to] = old_to;
                        x[b][from] = old_from;
                    }
                }
            }
        }
        if fx - start <= cfg.convergence_tol {
            h *= 0.5;
        }
    }
    Ok((x, fx, sweeps))
}

/// Capacity of a single-user channel by Blahut–Arimoto iteration.
///
/// Stops when the standard upper bound `max_x D(W(.|x) || q)` is within
/// `convergence_tol` of the current mutual information.
pub fn blahut_arimoto(ch: &CondDist, cfg: &OptimizerConfig) -> Result<OptResult> {
    blahut_arimoto_with_trace(ch, cfg).map(|(r, _)| r)
}

/// [`blahut_arimoto`] plus the mutual information after every iteration.
pub fn blahut_arimoto_with_trace(
    ch: &CondDist,
    cfg: &OptimizerConfig,
) -> Result<(OptResult, Vec<f64>)> {
    cfg.validate()?;
    let nx = ch.row_alphabet();
    let ny = ch.col_alphabet();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut q = vec![0.0; ny];
    let mut d = vec![0.0; nx];
    let mut trace = Vec::new();
    let mut iterations = 0;

    let divergences = |p: &[f64], q: &mut [f64], d: &mut [f64]| -> f64 {
        q.iter_mut().for_each(|v| *v = 0.0);
        for (x, &px) in p.iter().enumerate() {
            for (y, qy) in q.iter_mut().enumerate() {
                *qy += px * ch.get(x, y);
            }
        }
        let mut info = 0.0;
        for (x, dx) in d.iter_mut().enumerate() {
            *dx = (0..ny)
                .map(|y| {
                    let w = ch.get(x, y);
                    if w > 0.0 {
                        w * (w / q[y]).log2()
                    } else {
                        0.0
                    }
                })
                .sum();
            info += p[x] * *dx;
        }
        info
    };

    let mut info = divergences(&p, &mut q, &mut d);
    trace.push(info);
    loop {
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if upper - info <= cfg.convergence_tol || iterations >= cfg.max_iters.max(1) * 50 {
            break;
        }
        iterations += 1;
        let mut z = 0.0;
        for (px, &dx) in p.iter_mut().zip(&d) {
            *px *= dx.exp2();
            z += *px;
        }
        p.iter_mut().for_each(|v| *v /= z);
        info = divergences(&p, &mut q, &mut d);
        trace.push(info);
    }

    Ok((
        OptResult {
            value: info.max(0.0),
            argopt: vec![Dist::new(p).expect("normalized")],
            iterations,
            certified_grid_step: 0.0,
        },
        trace,
    ))
}
