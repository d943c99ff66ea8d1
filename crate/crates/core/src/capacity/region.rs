//! Rate pairs and convex, downward-closed rate regions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rate pair in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        for (name, v) in [("r1", r1), ("r2", r2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "[0, inf)",
                });
            }
        }
        Ok(Self { r1, r2 })
    }

    /// Negative coordinates are clamped to the axis.
    pub fn clamped(r1: f64, r2: f64) -> Self {
        Self {
            r1: r1.max(0.0),
            r2: r2.max(0.0),
        }
    }

    fn snapped(self) -> Self {
        let snap = |v: f64| if v <= COLLINEAR_EPS { 0.0 } else { v };
        Self {
            r1: snap(self.r1),
            r2: snap(self.r2),
        }
    }

    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

const ORIGIN: RatePoint = RatePoint { r1: 0.0, r2: 0.0 };

/// Vertices closer than this to the segment joining their neighbours are
/// dropped from hulls.
const COLLINEAR_EPS: f64 = 1e-12;

fn cross(o: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

fn dist(a: RatePoint, b: RatePoint) -> f64 {
    (a.r1 - b.r1).hypot(a.r2 - b.r2)
}

fn segment_distance(p: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    let (dx, dy) = (b.r1 - a.r1, b.r2 - a.r2);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p.r1 - a.r1) * dx + (p.r2 - a.r2) * dy) / len2).clamp(0.0, 1.0);
    dist(
        p,
        RatePoint {
            r1: a.r1 + t * dx,
            r2: a.r2 + t * dy,
        },
    )
}

/// Convex hull by monotone chain, counterclockwise, starting at the
/// lowest-leftmost point.
fn convex_hull(mut pts: Vec<RatePoint>) -> Vec<RatePoint> {
    pts.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<RatePoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<RatePoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn prune_collinear(mut v: Vec<RatePoint>) -> Vec<RatePoint> {
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let drop = (0..n).find(|&i| {
            let prev = v[(i + n - 1) % n];
            let next = v[(i + 1) % n];
            segment_distance(v[i], prev, next) <= COLLINEAR_EPS
        });
        match drop {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

/// A convex polygon in the nonnegative quadrant that contains the origin and
/// is closed under decreasing either coordinate.
///
/// Vertices are stored counterclockwise starting from the vertex on the `r1`
/// axis with the largest `r1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    vertices: Vec<RatePoint>,
    /// Distance by which the true region may exceed this polygon given the
    /// sampled directions (0 for exact constructions).
    sampling_tolerance: f64,
}

impl RateRegion {
    /// Downward-closed convex hull of the points (negative rates clamp to 0,
    /// rates within rounding of 0 snap to it).
    pub fn from_points(points: impl IntoIterator<Item = RatePoint>) -> Self {
        let mut pts = vec![ORIGIN];
        for p in points {
            let p = RatePoint::clamped(p.r1, p.r2).snapped();
            pts.push(p);
            pts.push(RatePoint { r1: p.r1, r2: 0.0 });
            pts.push(RatePoint { r1: 0.0, r2: p.r2 });
        }
        let hull = prune_collinear(convex_hull(pts));
        // the origin is first; rotate to the largest point on the r1 axis
        let start = hull
            .iter()
            .enumerate()
            .filter(|(_, p)| p.r2 == 0.0)
            .max_by(|a, b| a.1.r1.total_cmp(&b.1.r1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut vertices = hull[start..].to_vec();
        vertices.extend_from_slice(&hull[..start]);
        Self {
            vertices,
            sampling_tolerance: 0.0,
        }
    }

    /// Rebuilds a region from a stored vertex list, which must already be in
    /// canonical form.
    pub fn from_vertices(vertices: Vec<RatePoint>) -> Result<Self> {
        for v in &vertices {
            RatePoint::new(v.r1, v.r2)?;
        }
        let region = Self::from_points(vertices.iter().copied());
        if region.vertices != vertices {
            return Err(Error::SizeMismatch(
                "vertex list is not a canonical downward-closed convex polygon".into(),
            ));
        }
        Ok(region)
    }

    pub fn with_sampling_tolerance(mut self, tol: f64) -> Self {
        self.sampling_tolerance = tol;
        self
    }

    pub fn vertices(&self) -> &[RatePoint] {
        &self.vertices
    }

    pub fn sampling_tolerance(&self) -> f64 {
        self.sampling_tolerance
    }

    pub fn max_r1(&self) -> f64 {
        self.vertices.iter().map(|p| p.r1).fold(0.0, f64::max)
    }

    pub fn max_r2(&self) -> f64 {
        self.vertices.iter().map(|p| p.r2).fold(0.0, f64::max)
    }

    pub fn max_sum(&self) -> f64 {
        self.vertices.iter().map(RatePoint::sum).fold(0.0, f64::max)
    }

    /// Euclidean distance from `p` to the region (0 inside).
    pub fn distance_to(&self, p: RatePoint) -> f64 {
        let v = &self.vertices;
        match v.len() {
            0 => dist(p, ORIGIN),
            1 => dist(p, v[0]),
            n => {
                let inside = n >= 3 && (0..n).all(|i| cross(v[i], v[(i + 1) % n], p) >= 0.0);
                if inside {
                    0.0
                } else {
                    (0..n)
                        .map(|i| segment_distance(p, v[i], v[(i + 1) % n]))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    pub fn contains(&self, p: RatePoint, tol: f64) -> bool {
        self.distance_to(p) <= tol
    }

    /// Every vertex of `other` lies within `tol` of this region.
    pub fn contains_region(&self, other: &RateRegion, tol: f64) -> bool {
        other.vertices.iter().all(|&p| self.contains(p, tol))
    }

    /// Largest `r1` with `(r1, r2)` in the region, if `r2` is attainable.
    pub fn max_r1_at(&self, r2: f64) -> Option<f64> {
        if r2 < 0.0 || r2 > self.max_r2() {
            return None;
        }
        let v = &self.vertices;
        let n = v.len();
        if n == 1 {
            return Some(v[0].r1);
        }
        let mut best: Option<f64> = None;
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let (lo, hi) = (a.r2.min(b.r2), a.r2.max(b.r2));
            if r2 < lo || r2 > hi {
                continue;
            }
            let r1 = if a.r2 == b.r2 {
                a.r1.max(b.r1)
            } else {
                a.r1 + (r2 - a.r2) / (b.r2 - a.r2) * (b.r1 - a.r1)
            };
            best = Some(best.map_or(r1, |x| x.max(r1)));
        }
        best
    }

    /// Hausdorff distance between the two polygons.
    pub fn hausdorff(&self, other: &RateRegion) -> f64 {
        let one_way = |a: &RateRegion, b: &RateRegion| {
            a.vertices
                .iter()
                .map(|&p| b.distance_to(p))
                .fold(0.0, f64::max)
        };
        one_way(self, other).max(one_way(other, self))
    }
}
