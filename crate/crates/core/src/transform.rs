//! Degradation algebra for one-sided channels.
//!
//! Given `p(y1|x1,x2)` and `p(y2|x2)`, [`solve_degradation_table`] looks for
//! `p'(y1|x1,y2)` with `p(y1|x1,x2) = sum_y2 p(y2|x2) p'(y1|x1,y2)`. The
//! solution may have negative entries, in which case no degraded version of
//! the channel with these marginals exists.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channel::{classify_one_sided, Dmic};
use crate::error::{Error, Result};
use crate::prob::{h2, CondDist, DEFAULT_TOL};

/// Tolerance for the feasibility and consistency verdicts.
pub const SIGNED_TOL: f64 = 1e-9;

/// A solved table `q(y1|x1,y2)`, rows indexed `x1 * ny2 + y2`, entries of
/// either sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedCondTable {
    pub nx1: usize,
    pub ny2: usize,
    pub ny1: usize,
    pub entries: Vec<Vec<f64>>,
    pub min_entry: f64,
    /// Every entry is at least `-SIGNED_TOL`.
    pub feasible: bool,
    /// Largest absolute residual of the linear system.
    pub residual: f64,
    /// The residual is at most `SIGNED_TOL`.
    pub consistent: bool,
}

impl SignedCondTable {
    pub fn get(&self, x1: usize, y2: usize, y1: usize) -> f64 {
        self.entries[x1 * self.ny2 + y2][y1]
    }

    /// The position and value of the most negative entry.
    pub fn min_position(&self) -> (usize, usize, usize, f64) {
        let mut best = (0, 0, 0, f64::INFINITY);
        for (r, row) in self.entries.iter().enumerate() {
            for (y1, &v) in row.iter().enumerate() {
                if v < best.3 {
                    best = (r / self.ny2, r % self.ny2, y1, v);
                }
            }
        }
        best
    }

    /// Builds `p(y2|x2) q(y1|x1,y2)` as a channel; fails when `q` has
    /// negative entries.
    pub fn compose(&self, py2: &CondDist) -> Result<Dmic> {
        if py2.col_alphabet() != self.ny2 {
            return Err(Error::SizeMismatch(format!(
                "p(y2|x2) has {} outputs, table expects {}",
                py2.col_alphabet(),
                self.ny2
            )));
        }
        Dmic::from_fn(
            self.nx1,
            py2.row_alphabet(),
            self.ny1,
            self.ny2,
            |x1, x2, y1, y2| py2.get(x2, y2) * self.get(x1, y2, y1),
        )
    }
}

/// Solves for `q(y1|x1,y2)` block by block in `x1`.
///
/// `py1` has rows `x1 * nx2 + x2`; `py2` has rows `x2`. Square systems are
/// solved exactly, overdetermined ones in the least-squares sense.
pub fn solve_degradation_table(py1: &CondDist, py2: &CondDist) -> Result<SignedCondTable> {
    let nx2 = py2.row_alphabet();
    let ny2 = py2.col_alphabet();
    let ny1 = py1.col_alphabet();
    if py1.row_alphabet() % nx2 != 0 {
        return Err(Error::SizeMismatch(format!(
            "p(y1|x1,x2) has {} rows, not a multiple of |X2| = {nx2}",
            py1.row_alphabet()
        )));
    }
    let nx1 = py1.row_alphabet() / nx2;
    let g = DMatrix::from_fn(nx2, ny2, |x2, y2| py2.get(x2, y2));
    let rank = g.rank(1e-12);
    if rank < ny2 {
        return Err(Error::NonIdentifiable {
            x1: 0,
            rank,
            unknowns: ny2,
        });
    }
    let svd = g.clone().svd(true, true);
    let mut entries = Vec::with_capacity(nx1 * ny2);
    let mut residual: f64 = 0.0;
    for x1 in 0..nx1 {
        let p = DMatrix::from_fn(nx2, ny1, |x2, y1| py1.get(x1 * nx2 + x2, y1));
        let q = if nx2 == ny2 {
            g.clone().lu().solve(&p).ok_or(Error::NonIdentifiable {
                x1,
                rank,
                unknowns: ny2,
            })?
        } else {
            svd.solve(&p, 1e-12).map_err(|_| Error::NonIdentifiable {
                x1,
                rank,
                unknowns: ny2,
            })?
        };
        residual = residual.max((&g * &q - &p).amax());
        for y2 in 0..ny2 {
            entries.push((0..ny1).map(|y1| q[(y2, y1)]).collect::<Vec<f64>>());
        }
    }
    let min_entry = entries
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(SignedCondTable {
        nx1,
        ny2,
        ny1,
        entries,
        min_entry,
        feasible: min_entry >= -SIGNED_TOL,
        residual,
        consistent: residual <= SIGNED_TOL,
    })
}

/// `I(X2;Y2) - I(X2;Y1|X1)` on the `(p1, p2)` lattice of a binary one-sided
/// channel, with `p1 = P(X1 = 1)` and `p2 = P(X2 = 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSurface {
    pub step: f64,
    /// Lattice coordinates shared by both axes.
    pub grid: Vec<f64>,
    /// `values[i * grid.len() + j]` is the gap at `(grid[i], grid[j])`.
    pub values: Vec<f64>,
    pub min_gap: f64,
    pub argmin: (f64, f64),
}

impl GapSurface {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.len() + j]
    }
}

/// Closed-form gap for binary one-sided channels with
/// `f[i][j] = p(y1=1|x1=i,x2=j)` and `g[j] = p(y2=1|x2=j)`.
pub fn weak_alt_gap(f: &[[f64; 2]; 2], g: &[f64; 2], p1: f64, p2: f64) -> f64 {
    let q2 = 1.0 - p2;
    let mi = |a: f64, b: f64| h2(q2 * a + p2 * b) - q2 * h2(a) - p2 * h2(b);
    mi(g[0], g[1]) - (1.0 - p1) * mi(f[0][0], f[0][1]) - p1 * mi(f[1][0], f[1][1])
}

/// Evaluates [`weak_alt_gap`] on every lattice point of spacing `step`.
pub fn weak_alt_gap_surface(c: &Dmic, step: f64) -> Result<GapSurface> {
    if !c.is_binary() {
        let (a, b, y1, y2) = c.dims();
        return Err(Error::NotBinary(format!("alphabets {a}x{b} -> {y1}x{y2}")));
    }
    if !classify_one_sided(c, DEFAULT_TOL) {
        return Err(Error::PreconditionUnmet {
            requirement: "one-sided interference",
            verdict: "p(y2|x1,x2) depends on x1".into(),
        });
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::OutOfRange {
            name: "step",
            value: step,
            range: "(0, 1]",
        });
    }
    let f = [
        [c.p_y1(0, 0, 1), c.p_y1(0, 1, 1)],
        [c.p_y1(1, 0, 1), c.p_y1(1, 1, 1)],
    ];
    let g = [c.p_y2(0, 0, 1), c.p_y2(0, 1, 1)];
    let m = (1.0 / step).round().max(1.0) as usize;
    let m = if ((1.0 / step) - m as f64).abs() < 1e-9 {
        m
    } else {
        (1.0 / step).ceil() as usize
    };
    let grid: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    let mut values = Vec::with_capacity(grid.len() * grid.len());
    let mut min_gap = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    for &p1 in &grid {
        for &p2 in &grid {
            let v = weak_alt_gap(&f, &g, p1, p2);
            if v < min_gap {
                min_gap = v;
                argmin = (p1, p2);
            }
            values.push(v);
        }
    }
    Ok(GapSurface {
        step: 1.0 / m as f64,
        grid,
        values,
        min_gap,
        argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{self, APPENDIX_F, APPENDIX_G};
    use crate::channel::{
        check_degraded, factorize_weak, marginal_channels, y2_given_x2, Condition, InfoProfile,
    };

    fn appendix_marginals() -> (CondDist, CondDist) {
        let py1 = CondDist::new(
            (0..4)
                .map(|r| {
                    let f = APPENDIX_F[r / 2][r % 2];
                    vec![1.0 - f, f]
                })
                .collect(),
        )
        .unwrap();
        let py2 = CondDist::new(APPENDIX_G.iter().map(|&g| vec![1.0 - g, g]).collect()).unwrap();
        (py1, py2)
    }

    #[test]
    fn appendix_entry_is_minus_one_sixteenth() {
        let (py1, py2) = appendix_marginals();
        let t = solve_degradation_table(&py1, &py2).unwrap();
        assert!(
            (t.get(1, 1, 1) + 0.0625).abs() < 1e-12,
            "{}",
            t.get(1, 1, 1)
        );
        assert!((t.get(1, 0, 1) - 0.5625).abs() < 1e-12);
        assert!(!t.feasible);
        assert!(t.consistent);
        let (x1, y2, y1, v) = t.min_position();
        assert_eq!((x1, y2, y1), (1, 1, 1));
        assert_eq!(v, t.min_entry);
        assert!(t.compose(&py2).is_err());
    }

    #[test]
    fn example5_round_trip() {
        let c = builtin::example5();
        let (py1, _) = marginal_channels(&c);
        let py2 = y2_given_x2(&c);
        let t = solve_degradation_table(&py1, &py2).unwrap();
        let table = factorize_weak(&c, DEFAULT_TOL).unwrap().unwrap();
        for (r, row) in t.entries.iter().enumerate() {
            for (y1, &v) in row.iter().enumerate() {
                assert!((v - table.get(r, y1)).abs() < 1e-12);
            }
        }
        assert!(t.feasible);
        let back = t.compose(&py2).unwrap();
        assert!(check_degraded(&back, 1e-9));
    }

    #[test]
    fn identical_rows_are_singular() {
        let py2 = CondDist::new(vec![vec![0.7, 0.3], vec![0.7, 0.3]]).unwrap();
        let py1 = CondDist::new(vec![vec![0.5, 0.5]; 4]).unwrap();
        assert!(matches!(
            solve_degradation_table(&py1, &py2),
            Err(Error::NonIdentifiable {
                rank: 1,
                unknowns: 2,
                ..
            })
        ));
    }

    #[test]
    fn overdetermined_reports_residual() {
        // three inputs, two outputs; the third row is a mixture of the others
        let py2 = CondDist::new(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap();
        let good = CondDist::new(vec![vec![0.2, 0.8], vec![0.6, 0.4], vec![0.4, 0.6]]).unwrap();
        let t = solve_degradation_table(&good, &py2).unwrap();
        assert!(t.consistent && t.feasible);
        let bad = CondDist::new(vec![vec![0.2, 0.8], vec![0.6, 0.4], vec![0.9, 0.1]]).unwrap();
        let t = solve_degradation_table(&bad, &py2).unwrap();
        assert!(!t.consistent);
        assert!(t.residual > 0.1);
    }

    #[test]
    fn appendix_surface_is_nonnegative() {
        let s = weak_alt_gap_surface(&builtin::appendix(), 0.01).unwrap();
        assert!(s.min_gap >= -1e-12, "{}", s.min_gap);
        assert_eq!(s.grid.len(), 101);
        // deterministic X2: both terms vanish
        for i in 0..s.grid.len() {
            assert!(s.at(i, 0).abs() < 1e-12 && s.at(i, 100).abs() < 1e-12);
        }
    }

    #[test]
    fn surface_matches_info_profile() {
        let c = builtin::appendix();
        let s = weak_alt_gap_surface(&c, 0.25).unwrap();
        for (i, &p1) in s.grid.iter().enumerate() {
            for (j, &p2) in s.grid.iter().enumerate() {
                let info = InfoProfile::from_slices(&c, &[1.0 - p1, p1], &[1.0 - p2, p2]);
                let direct = Condition::WeakAlt.gap(&info);
                assert!((s.at(i, j) - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn strong_channel_surface_goes_negative() {
        let c = Dmic::from_fn(2, 2, 2, 2, |_, x2, y1, y2| {
            let p2 = if y2 == x2 { 0.7 } else { 0.3 };
            p2 * f64::from(u8::from(y1 == x2))
        })
        .unwrap();
        let s = weak_alt_gap_surface(&c, 0.01).unwrap();
        assert!(s.min_gap < 0.0);
    }

    #[test]
    fn surface_rejects_bad_input() {
        assert!(matches!(
            weak_alt_gap_surface(&builtin::example4(0.1, 0.25).unwrap(), 0.1),
            Err(Error::NotBinary(_))
        ));
        assert!(matches!(
            weak_alt_gap_surface(&builtin::example6(), 0.1),
            Err(Error::PreconditionUnmet { .. })
        ));
        assert!(weak_alt_gap_surface(&builtin::appendix(), 0.0).is_err());
    }
}
