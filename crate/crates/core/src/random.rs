//! Seeded generators for random laws and channels.

use rand::Rng;

use crate::capacity::AuxiliaryInput;
use crate::channel::Dmic;
use crate::error::Result;
use crate::optimize::random_simplex_point;
use crate::prob::{CondDist, Dist};

/// Uniformly random point of the simplex on `n` symbols.
pub fn random_dist(rng: &mut impl Rng, n: usize) -> Result<Dist> {
    Dist::new(random_simplex_point(rng, n))
}

/// Independent uniformly random rows.
pub fn random_cond(rng: &mut impl Rng, rows: usize, cols: usize) -> Result<CondDist> {
    CondDist::new((0..rows).map(|_| random_simplex_point(rng, cols)).collect())
}

/// `p(y2|x2) p'(y1|x1,y2)` with both factors drawn at random.
pub fn random_weak_zic(
    rng: &mut impl Rng,
    nx1: usize,
    nx2: usize,
    ny1: usize,
    ny2: usize,
) -> Result<Dmic> {
    let py2 = random_cond(rng, nx2, ny2)?;
    let p1 = random_cond(rng, nx1 * ny2, ny1)?;
    Dmic::from_fn(nx1, nx2, ny1, ny2, |x1, x2, y1, y2| {
        py2.get(x2, y2) * p1.get(x1 * ny2 + y2, y1)
    })
}

/// Random `p(u) p(x2|u) p(x1)`.
pub fn random_aux_input(
    rng: &mut impl Rng,
    nu: usize,
    nx2: usize,
    nx1: usize,
) -> Result<AuxiliaryInput> {
    let pu = random_dist(rng, nu)?;
    let px2 = random_cond(rng, nu, nx2)?;
    let px1 = random_dist(rng, nx1)?;
    AuxiliaryInput::new(pu, px2, px1)
}
