//! The space catalogue: finite dimensional `l_p` spaces, the half-line, and
//! the glued space `X_p` obtained by attaching the block `l_p(n)` to the
//! half-line at ray coordinate `n` (the block's zero vector is identified
//! with the ray point `n`).
//!
//! Distances in `X_p` follow the path metric of the gluing tree: travel
//! inside a block is measured by the block norm, travel between components
//! passes through the gluing points on the ray.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default comparison tolerance used by verdict-producing checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Space descriptor. `Lp` and `GluedXp` built through [`Space::lp`] and
/// [`Space::glued_xp`] are strictly convex (`1 < p < inf`) and therefore
/// uniquely geodesic; the raw constructor admits `p = 1` and `p = inf`
/// whose metrics are still computed but whose affine paths are not unique
/// geodesics. Checks that depend on unique geodesics reject raw spaces
/// only where the contract requires it; negative tests rely on them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Lp { p: f64, dim: usize },
    Halfline,
    GluedXp { p: f64 },
    RawLp { p: f64, dim: usize },
}

impl Space {
    /// Strictly convex `l_p(dim)`. Requires `1 < p < inf` and `dim >= 1`.
    pub fn lp(p: f64, dim: usize) -> Result<Space> {
        check_strict_p(p)?;
        if dim == 0 {
            return Err(Error::Domain("lp dimension must be at least 1".into()));
        }
        Ok(Space::Lp { p, dim })
    }

    /// The half-line `[0, inf)` with the absolute-value metric.
    pub fn halfline() -> Space {
        Space::Halfline
    }

    /// The glued space `X_p`. Requires `1 < p < inf`.
    pub fn glued_xp(p: f64) -> Result<Space> {
        check_strict_p(p)?;
        Ok(Space::GluedXp { p })
    }

    /// Raw metric constructor admitting `p = 1` and `p = inf`
    /// (pass `f64::INFINITY`). Intended for negative tests; the space is
    /// not promised to be uniquely geodesic.
    pub fn raw_lp(p: f64, dim: usize) -> Result<Space> {
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("raw lp requires p >= 1, got {p}")));
        }
        if dim == 0 {
            return Err(Error::Domain("lp dimension must be at least 1".into()));
        }
        Ok(Space::RawLp { p, dim })
    }

    /// The exponent, where one exists.
    pub fn p(&self) -> Option<f64> {
        match self {
            Space::Lp { p, .. } | Space::GluedXp { p } | Space::RawLp { p, .. } => Some(*p),
            Space::Halfline => None,
        }
    }

    /// True for spaces whose geodesics the toolkit treats as unique
    /// (strictly convex norms and the tree-like glued space).
    pub fn is_uniquely_geodesic(&self) -> bool {
        !matches!(self, Space::RawLp { .. })
    }

    /// Canonical basepoint: the origin for norm spaces, ray coordinate 0
    /// for the half-line and the glued space.
    pub fn basepoint(&self) -> Point {
        match self {
            Space::Lp { dim, .. } | Space::RawLp { dim, .. } => Point::block(*dim, vec![0.0; *dim]),
            Space::Halfline | Space::GluedXp { .. } => Point::ray(0.0),
        }
    }
}

fn check_strict_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!(
            "Busemann l_p space requires 1 < p < inf, got {p}; use the raw constructor for boundary exponents"
        )));
    }
    Ok(())
}

/// A point of one of the catalogue spaces.
///
/// `Ray` points live on the half-line (both as the `Halfline` space itself
/// and as the spine of `GluedXp`); `Block` points carry the index of their
/// block and coordinates of that length. Points of `Lp(dim)` are `Block`
/// points with `n == dim`. The zero vector of block `n` is the same point
/// as ray coordinate `n`; [`Point::canonical`] rewrites it to the `Ray`
/// form so that equality of representations matches equality of points.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum Point {
    Ray { t: f64 },
    Block { n: usize, coords: Vec<f64> },
}

impl Point {
    pub fn ray(t: f64) -> Point {
        Point::Ray { t }
    }

    pub fn block(n: usize, coords: Vec<f64>) -> Point {
        Point::Block { n, coords }
    }

    /// Canonical representative: an all-zero block point is rewritten to
    /// the ray point at its gluing coordinate. Other points are unchanged.
    pub fn canonical(&self) -> Point {
        match self {
            Point::Block { n, coords } if coords.iter().all(|c| *c == 0.0) => {
                Point::Ray { t: *n as f64 }
            }
            other => other.clone(),
        }
    }

    /// Structural equality of canonical forms.
    pub fn same_point(&self, other: &Point) -> bool {
        match (self.canonical(), other.canonical()) {
            (Point::Ray { t: a }, Point::Ray { t: b }) => a == b,
            (Point::Block { n: m, coords: a }, Point::Block { n, coords: b }) => m == n && a == b,
            _ => false,
        }
    }
}

/// Validates that `point` names a point of `space`, and returns its
/// canonical form.
pub fn validate_point(space: &Space, point: &Point) -> Result<Point> {
    let finite = |coords: &[f64]| coords.iter().all(|c| c.is_finite());
    match (space, point) {
        (Space::Lp { dim, .. } | Space::RawLp { dim, .. }, Point::Block { n, coords }) => {
            if *n != *dim || coords.len() != *dim {
                return Err(Error::InvalidPoint(format!(
                    "expected {dim} coordinates in block {dim}, got block {n} with {} coordinates",
                    coords.len()
                )));
            }
            if !finite(coords) {
                return Err(Error::InvalidPoint("non-finite coordinate".into()));
            }
            Ok(point.clone())
        }
        (Space::Lp { .. } | Space::RawLp { .. }, Point::Ray { .. }) => Err(Error::InvalidPoint(
            "ray points do not belong to an l_p space".into(),
        )),
        (Space::Halfline, Point::Ray { t }) => {
            if !t.is_finite() || *t < 0.0 {
                return Err(Error::InvalidPoint(format!(
                    "half-line coordinate must be finite and nonnegative, got {t}"
                )));
            }
            Ok(point.clone())
        }
        (Space::Halfline, Point::Block { .. }) => Err(Error::InvalidPoint(
            "block points do not belong to the half-line".into(),
        )),
        (Space::GluedXp { .. }, Point::Ray { t }) => {
            if !t.is_finite() || *t < 0.0 {
                return Err(Error::InvalidPoint(format!(
                    "ray coordinate must be finite and nonnegative, got {t}"
                )));
            }
            Ok(point.clone())
        }
        (Space::GluedXp { .. }, Point::Block { n, coords }) => {
            if *n == 0 {
                return Err(Error::InvalidPoint("block index must be at least 1".into()));
            }
            if coords.len() != *n {
                return Err(Error::InvalidPoint(format!(
                    "block {n} expects {n} coordinates, got {}",
                    coords.len()
                )));
            }
            if !finite(coords) {
                return Err(Error::InvalidPoint("non-finite coordinate".into()));
            }
            Ok(point.canonical())
        }
    }
}

/// `l_p` norm. `p = inf` gives the max norm.
pub fn lp_norm(p: f64, v: &[f64]) -> f64 {
    if p.is_infinite() {
        return v.iter().fold(0.0, |m, c| m.max(c.abs()));
    }
    if p == 2.0 {
        return v.iter().map(|c| c * c).sum::<f64>().sqrt();
    }
    if p == 1.0 {
        return v.iter().map(|c| c.abs()).sum();
    }
    v.iter().map(|c| c.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

fn lp_dist(p: f64, a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    lp_norm(p, &diff)
}

/// Distance in `space` between two (validated) points.
pub fn distance(space: &Space, a: &Point, b: &Point) -> Result<f64> {
    let a = validate_point(space, a)?;
    let b = validate_point(space, b)?;
    Ok(distance_unchecked(space, &a, &b))
}

/// Distance assuming both points are already validated canonical members.
pub(crate) fn distance_unchecked(space: &Space, a: &Point, b: &Point) -> f64 {
    match space {
        Space::Lp { p, .. } | Space::RawLp { p, .. } => match (a, b) {
            (Point::Block { coords: x, .. }, Point::Block { coords: y, .. }) => lp_dist(*p, x, y),
            _ => unreachable!("validated l_p points are block points"),
        },
        Space::Halfline => match (a, b) {
            (Point::Ray { t: s }, Point::Ray { t }) => (s - t).abs(),
            _ => unreachable!("validated half-line points are ray points"),
        },
        Space::GluedXp { p } => {
            let a = a.canonical();
            let b = b.canonical();
            match (&a, &b) {
                (Point::Ray { t: s }, Point::Ray { t }) => (s - t).abs(),
                (Point::Ray { t }, Point::Block { n, coords })
                | (Point::Block { n, coords }, Point::Ray { t }) => {
                    lp_norm(*p, coords) + (*n as f64 - t).abs()
                }
                (Point::Block { n: m, coords: x }, Point::Block { n, coords: y }) => {
                    if m == n {
                        lp_dist(*p, x, y)
                    } else {
                        lp_norm(*p, x) + (*m as f64 - *n as f64).abs() + lp_norm(*p, y)
                    }
                }
            }
        }
    }
}

/// One straight leg of a path: either a segment inside a block or a
/// segment of the ray. Legs are traversed at unit speed.
#[derive(Clone, Debug)]
enum Leg {
    Block { n: usize, from: Vec<f64>, to: Vec<f64> },
    Ray { from: f64, to: f64 },
}

impl Leg {
    fn len(&self, p: f64) -> f64 {
        match self {
            Leg::Block { from, to, .. } => lp_dist(p, from, to),
            Leg::Ray { from, to } => (from - to).abs(),
        }
    }

    fn at(&self, p: f64, s: f64) -> Point {
        let len = self.len(p);
        let u = if len == 0.0 { 0.0 } else { (s / len).clamp(0.0, 1.0) };
        match self {
            Leg::Block { n, from, to } => {
                let coords = from
                    .iter()
                    .zip(to)
                    .map(|(a, b)| a + u * (b - a))
                    .collect();
                Point::Block { n: *n, coords }
            }
            Leg::Ray { from, to } => Point::Ray { t: from + u * (to - from) },
        }
    }
}

/// The geodesic route between two canonical points of `GluedXp`.
fn glued_legs(a: &Point, b: &Point) -> Vec<Leg> {
    match (a, b) {
        (Point::Ray { t: s }, Point::Ray { t }) => vec![Leg::Ray { from: *s, to: *t }],
        (Point::Ray { t }, Point::Block { n, coords }) => vec![
            Leg::Ray { from: *t, to: *n as f64 },
            Leg::Block { n: *n, from: vec![0.0; *n], to: coords.clone() },
        ],
        (Point::Block { n, coords }, Point::Ray { t }) => vec![
            Leg::Block { n: *n, from: coords.clone(), to: vec![0.0; *n] },
            Leg::Ray { from: *n as f64, to: *t },
        ],
        (Point::Block { n: m, coords: x }, Point::Block { n, coords: y }) => {
            if m == n {
                vec![Leg::Block { n: *n, from: x.clone(), to: y.clone() }]
            } else {
                vec![
                    Leg::Block { n: *m, from: x.clone(), to: vec![0.0; *m] },
                    Leg::Ray { from: *m as f64, to: *n as f64 },
                    Leg::Block { n: *n, from: vec![0.0; *n], to: y.clone() },
                ]
            }
        }
    }
}

fn walk_legs(p: f64, legs: &[Leg], mut s: f64) -> Point {
    for leg in legs {
        let len = leg.len(p);
        if s <= len {
            return leg.at(p, s);
        }
        s -= len;
    }
    legs.last().expect("nonempty leg list").at(p, f64::MAX)
}

/// Route selector for [`Geodesic`]. `Canonical` is the distinguished
/// geodesic of the space (affine in norm spaces, the tree route in the
/// glued space). `Staircase` adjusts one coordinate at a time in index
/// order; in raw `l_1` it is a genuine geodesic distinct from the affine
/// one, which is what the non-uniqueness counterexamples exercise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Canonical,
    Staircase,
}

/// A constant-speed path between two points of a space, parametrised over
/// `[0, 1]` proportionally to arc length.
#[derive(Clone, Debug)]
pub struct Geodesic {
    space: Space,
    legs: Vec<Leg>,
    total_len: f64,
    a: Point,
    b: Point,
}

impl Geodesic {
    /// The canonical geodesic from `a` to `b`.
    pub fn new(space: &Space, a: &Point, b: &Point) -> Result<Geodesic> {
        Geodesic::with_route(space, a, b, Route::Canonical)
    }

    pub fn with_route(space: &Space, a: &Point, b: &Point, route: Route) -> Result<Geodesic> {
        let a = validate_point(space, a)?;
        let b = validate_point(space, b)?;
        let norm_p = space.p();
        let legs = match (space, route) {
            (Space::Lp { dim, .. } | Space::RawLp { dim, .. }, Route::Canonical) => {
                let (x, y) = block_coords(&a, &b);
                vec![Leg::Block { n: *dim, from: x, to: y }]
            }
            (Space::Lp { dim, .. } | Space::RawLp { dim, .. }, Route::Staircase) => {
                let (x, y) = block_coords(&a, &b);
                let mut legs = Vec::new();
                let mut cur = x;
                for i in 0..*dim {
                    if cur[i] != y[i] {
                        let mut next = cur.clone();
                        next[i] = y[i];
                        legs.push(Leg::Block { n: *dim, from: cur, to: next.clone() });
                        cur = next;
                    }
                }
                if legs.is_empty() {
                    legs.push(Leg::Block { n: *dim, from: cur.clone(), to: cur });
                }
                legs
            }
            (Space::Halfline, Route::Canonical) => match (&a, &b) {
                (Point::Ray { t: s }, Point::Ray { t }) => vec![Leg::Ray { from: *s, to: *t }],
                _ => unreachable!(),
            },
            (Space::GluedXp { .. }, Route::Canonical) => glued_legs(&a, &b),
            (Space::Halfline | Space::GluedXp { .. }, Route::Staircase) => {
                return Err(Error::Unsupported(
                    "staircase routes exist only in l_p coordinate spaces".into(),
                ));
            }
        };
        let p = norm_p.unwrap_or(2.0);
        let total_len = legs.iter().map(|l| l.len(p)).sum();
        Ok(Geodesic { space: *space, legs, total_len, a, b })
    }

    pub fn endpoints(&self) -> (&Point, &Point) {
        (&self.a, &self.b)
    }

    /// Arc length of the route. Equals `distance(a, b)` exactly when the
    /// route is a geodesic of the space.
    pub fn length(&self) -> f64 {
        self.total_len
    }

    /// The point at parameter `t in [0, 1]` (constant-speed parametrisation).
    pub fn point_at(&self, t: f64) -> Result<Point> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("path parameter must lie in [0,1], got {t}")));
        }
        let p = self.space.p().unwrap_or(2.0);
        if self.total_len == 0.0 {
            return Ok(self.a.clone());
        }
        let pt = walk_legs(p, &self.legs, t * self.total_len);
        // only the glued space identifies block zeros with ray points
        Ok(if matches!(self.space, Space::GluedXp { .. }) { pt.canonical() } else { pt })
    }
}

fn block_coords(a: &Point, b: &Point) -> (Vec<f64>, Vec<f64>) {
    match (a, b) {
        (Point::Block { coords: x, .. }, Point::Block { coords: y, .. }) => (x.clone(), y.clone()),
        _ => unreachable!("validated l_p points are block points"),
    }
}

/// The point at parameter `t` on the canonical geodesic from `a` to `b`,
/// so that `d(a, result) = t * d(a, b)`.
pub fn geodesic_point(space: &Space, a: &Point, b: &Point, t: f64) -> Result<Point> {
    Geodesic::new(space, a, b)?.point_at(t)
}

/// Radial scaling toward the basepoint `o`: the point on the geodesic from
/// `o` to `x` at distance `t * d(o, x)` from `o`, for `t in [0, 1]`.
pub fn delta(space: &Space, o: &Point, x: &Point, t: f64) -> Result<Point> {
    geodesic_point(space, o, x, t)
}
