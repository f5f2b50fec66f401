//! Simplicial complexes over ball covers: nerves, the spherical path
//! metric, anti-Cech coarsening ladders, and contiguity of simplicial
//! maps.
//!
//! Conventions used throughout: a ball cover member *covers* a point when
//! `d(x, c) <= r` (closed), but a family of members spans a nerve simplex
//! only when their interiors share a point (strict `<`). The strict
//! convention keeps tangent balls from spanning edges and, more
//! importantly, makes coarsening maps simplicial for free: a strict
//! witness of a simplex stays a strict witness of the image simplex
//! after every ball is swallowed by a larger one.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nets::{dedup_points, greedy_net, DiscreteSample};
use crate::space::{distance, lp_norm, validate_point, Point, Space};

/// A finite simplicial complex: labeled vertices and a set of simplices
/// (sorted vertex-index lists) closed under taking faces. Every vertex is
/// present as a 0-simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawComplex", into = "RawComplex")]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    simplices: BTreeSet<Vec<usize>>,
    maximal: Vec<Vec<usize>>,
    max_dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawComplex {
    vertices: Vec<String>,
    simplices: Vec<Vec<usize>>,
}

impl From<SimplicialComplex> for RawComplex {
    fn from(cx: SimplicialComplex) -> RawComplex {
        RawComplex { vertices: cx.vertices, simplices: cx.simplices.into_iter().collect() }
    }
}

impl TryFrom<RawComplex> for SimplicialComplex {
    type Error = Error;
    fn try_from(raw: RawComplex) -> Result<SimplicialComplex> {
        SimplicialComplex::from_faces(raw.vertices, raw.simplices)
    }
}

const CLOSURE_CAP: usize = 1_000_000;

impl SimplicialComplex {
    /// Builds the downward closure of the given faces (which need not be
    /// maximal or sorted) over the given vertex labels. Every vertex
    /// becomes a 0-simplex whether or not it appears in a face.
    pub fn from_faces(
        vertices: Vec<String>,
        faces: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<SimplicialComplex> {
        let n = vertices.len();
        let mut clean: Vec<Vec<usize>> = Vec::new();
        for mut f in faces {
            f.sort_unstable();
            let before = f.len();
            f.dedup();
            if f.len() != before {
                return Err(Error::Domain(format!("simplex {f:?} repeats a vertex")));
            }
            if let Some(&v) = f.iter().find(|v| **v >= n) {
                return Err(Error::Domain(format!(
                    "simplex references vertex {v}, but there are only {n} vertices"
                )));
            }
            if f.len() > 24 {
                return Err(Error::Domain(format!(
                    "simplex on {} vertices exceeds the supported dimension",
                    f.len()
                )));
            }
            if !f.is_empty() {
                clean.push(f);
            }
        }

        let mut simplices: BTreeSet<Vec<usize>> = BTreeSet::new();
        for v in 0..n {
            simplices.insert(vec![v]);
        }
        for f in &clean {
            if simplices.contains(f) {
                continue;
            }
            // all nonempty subsets via bitmask; faces are capped at 24
            for mask in 1u32..(1u32 << f.len()) {
                let sub: Vec<usize> =
                    (0..f.len()).filter(|k| mask & (1 << k) != 0).map(|k| f[k]).collect();
                simplices.insert(sub);
                if simplices.len() > CLOSURE_CAP {
                    return Err(Error::Domain(
                        "complex closure exceeds the size cap".into(),
                    ));
                }
            }
        }

        // maximal faces: inputs (plus isolated vertices) not strictly
        // contained in another input
        let mut seeds: Vec<Vec<usize>> = clean;
        for v in 0..n {
            seeds.push(vec![v]);
        }
        seeds.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        seeds.dedup();
        let mut maximal: Vec<Vec<usize>> = Vec::new();
        for s in seeds {
            if !maximal.iter().any(|m| is_subset(&s, m)) {
                maximal.push(s);
            }
        }
        maximal.sort();

        let max_dim = simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0);
        Ok(SimplicialComplex { vertices, simplices, maximal, max_dim })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.max_dim
    }

    pub fn simplices(&self) -> &BTreeSet<Vec<usize>> {
        &self.simplices
    }

    pub fn maximal_simplices(&self) -> &[Vec<usize>] {
        &self.maximal
    }

    /// Membership test; the input need not be sorted.
    pub fn contains(&self, simplex: &[usize]) -> bool {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        s.dedup();
        !s.is_empty() && self.simplices.contains(&s)
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len()
    }
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    // both sorted
    let mut it = big.iter();
    'outer: for s in small {
        for b in it.by_ref() {
            match b.cmp(s) {
                Ordering::Less => continue,
                Ordering::Equal => continue 'outer,
                Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// A point of a complex in barycentric coordinates: a simplex and
/// strictly positive weights summing to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBary", into = "RawBary")]
pub struct BarycentricPoint {
    simplex: Vec<usize>,
    weights: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawBary {
    simplex: Vec<usize>,
    weights: Vec<f64>,
}

impl From<BarycentricPoint> for RawBary {
    fn from(b: BarycentricPoint) -> RawBary {
        RawBary { simplex: b.simplex, weights: b.weights }
    }
}

impl TryFrom<RawBary> for BarycentricPoint {
    type Error = Error;
    fn try_from(raw: RawBary) -> Result<BarycentricPoint> {
        BarycentricPoint::new(raw.simplex, raw.weights)
    }
}

impl BarycentricPoint {
    pub fn new(simplex: Vec<usize>, weights: Vec<f64>) -> Result<BarycentricPoint> {
        if simplex.len() != weights.len() || simplex.is_empty() {
            return Err(Error::Domain(
                "barycentric point needs matching nonempty vertex and weight lists".into(),
            ));
        }
        let mut pairs: Vec<(usize, f64)> = simplex.into_iter().zip(weights).collect();
        pairs.sort_by_key(|(v, _)| *v);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain("barycentric point repeats a vertex".into()));
        }
        let sum: f64 = pairs.iter().map(|(_, w)| w).sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("barycentric weights sum to {sum}, not 1")));
        }
        if pairs.iter().any(|(_, w)| !(*w > 0.0 && *w <= 1.0)) {
            return Err(Error::Domain("barycentric weights must lie in (0, 1]".into()));
        }
        let (simplex, weights) = pairs.into_iter().unzip();
        Ok(BarycentricPoint { simplex, weights })
    }

    /// The point sitting at a vertex.
    pub fn vertex(v: usize) -> BarycentricPoint {
        BarycentricPoint { simplex: vec![v], weights: vec![1.0] }
    }

    pub fn simplex(&self) -> &[usize] {
        &self.simplex
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Checks that the supporting simplex is present in the complex.
    pub fn validate_in(&self, cx: &SimplicialComplex) -> Result<()> {
        if cx.simplices.contains(&self.simplex) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "barycentric point supported on {:?}, which is not a simplex of the complex",
                self.simplex
            )))
        }
    }
}

/// The vertex carrying the largest weight (smallest index on ties).
pub fn carrier_vertex(y: &BarycentricPoint) -> usize {
    let mut best = 0usize;
    for k in 1..y.weights.len() {
        if y.weights[k] > y.weights[best] {
            best = k;
        }
    }
    y.simplex[best]
}

/// A metric ball given by center and radius.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

/// A finite family of balls over one space.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawCover")]
pub struct Cover {
    pub space: Space,
    pub members: Vec<Ball>,
}

#[derive(Clone, Debug, Deserialize)]
struct RawCover {
    space: Space,
    members: Vec<Ball>,
}

impl TryFrom<RawCover> for Cover {
    type Error = Error;
    fn try_from(raw: RawCover) -> Result<Cover> {
        Cover::new(raw.space, raw.members)
    }
}

impl Cover {
    pub fn new(space: Space, members: Vec<Ball>) -> Result<Cover> {
        let members = members
            .into_iter()
            .map(|b| {
                if !(b.radius > 0.0 && b.radius.is_finite()) {
                    return Err(Error::Domain(format!(
                        "ball radius must be positive, got {}",
                        b.radius
                    )));
                }
                Ok(Ball { center: validate_point(&space, &b.center)?, radius: b.radius })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Cover { space, members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Closed membership: `d(x, center) <= radius`.
    pub fn contains(&self, member: usize, x: &Point) -> Result<bool> {
        let b = &self.members[member];
        Ok(distance(&self.space, &b.center, x)? <= b.radius + 1e-12)
    }

    /// Interior membership: `d(x, center) < radius`, strict.
    pub fn contains_strictly(&self, member: usize, x: &Point) -> Result<bool> {
        let b = &self.members[member];
        Ok(distance(&self.space, &b.center, x)? < b.radius)
    }

    /// The member indices whose interiors contain `x`, in order.
    pub fn interior_members(&self, x: &Point) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..self.members.len() {
            if self.contains_strictly(i, x)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Errors with the first window point not (closed-)covered.
    pub fn check_covers(&self, window: &[Point]) -> Result<()> {
        'points: for x in window {
            for i in 0..self.members.len() {
                if self.contains(i, x)? {
                    continue 'points;
                }
            }
            return Err(Error::Coverage(format!("window point {x:?} is not covered")));
        }
        Ok(())
    }
}

/// Searches for a point interior to every ball of the family. `Some` is
/// a genuine witness; `None` is exact on the half-line, on rays, and for
/// sup-norm boxes, and is the verdict of a convex minimax descent in the
/// other l_p geometries (thin sliver intersections below the 1e-9 scale
/// can in principle be missed).
pub fn ball_intersection_witness(space: &Space, balls: &[Ball]) -> Result<Option<Point>> {
    if balls.is_empty() {
        return Err(Error::Domain("empty ball family".into()));
    }
    match space {
        Space::Halfline => {
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for b in balls {
                let c = match b.center {
                    Point::Ray { t } => t,
                    _ => unreachable!(),
                };
                lo = lo.max(c - b.radius);
                hi = hi.min(c + b.radius);
            }
            Ok(interval_witness(lo, hi).map(Point::ray))
        }
        Space::RawLp { p, dim } if *p == f64::INFINITY => {
            // sup-norm balls are boxes; intersect per coordinate
            let mut mid = Vec::with_capacity(*dim);
            for k in 0..*dim {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                for b in balls {
                    let c = match &b.center {
                        Point::Block { coords, .. } => coords[k],
                        _ => unreachable!(),
                    };
                    lo = lo.max(c - b.radius);
                    hi = hi.min(c + b.radius);
                }
                if !(lo < hi) {
                    return Ok(None);
                }
                mid.push((lo + hi) / 2.0);
            }
            Ok(Some(Point::block(*dim, mid)))
        }
        Space::Lp { p, dim } | Space::RawLp { p, dim } => {
            let constraints: Vec<(Vec<f64>, f64)> = balls
                .iter()
                .map(|b| match &b.center {
                    Point::Block { coords, .. } => (coords.clone(), b.radius),
                    _ => unreachable!(),
                })
                .collect();
            Ok(minimax_ball_witness(*p, *dim, &constraints).map(|x| Point::block(*dim, x)))
        }
        Space::GluedXp { p } => glued_intersection_witness(*p, balls),
    }
}

fn interval_witness(lo: f64, hi: f64) -> Option<f64> {
    // open interval (lo, hi) intersected with [0, inf)
    if lo < hi && hi > 0.0 {
        Some(((lo.max(0.0)) + hi) / 2.0)
    } else {
        None
    }
}

/// Component-by-component search in the glued space. A witness in a
/// block containing no ball center can always be slid to the spine
/// (sliding to the spine does not increase any distance involved), so
/// only the ray and the centers' own blocks need checking.
fn glued_intersection_witness(p: f64, balls: &[Ball]) -> Result<Option<Point>> {
    Space::glued_xp(p)?;
    // ray component
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut ray_ok = true;
    for b in balls {
        let (c, reach) = match &b.center {
            Point::Ray { t } => (*t, b.radius),
            Point::Block { n, coords } => (*n as f64, b.radius - lp_norm(p, coords)),
        };
        if reach <= 0.0 {
            ray_ok = false;
            break;
        }
        lo = lo.max(c - reach);
        hi = hi.min(c + reach);
    }
    if ray_ok {
        if let Some(t) = interval_witness(lo, hi) {
            return Ok(Some(Point::ray(t)));
        }
    }
    // blocks hosting at least one center
    let mut blocks: Vec<usize> = balls
        .iter()
        .filter_map(|b| match &b.center {
            Point::Block { n, .. } => Some(*n),
            _ => None,
        })
        .collect();
    blocks.sort_unstable();
    blocks.dedup();
    'blocks: for k in blocks {
        let mut constraints: Vec<(Vec<f64>, f64)> = Vec::with_capacity(balls.len());
        for b in balls {
            match &b.center {
                Point::Block { n, coords } if *n == k => {
                    constraints.push((coords.clone(), b.radius));
                }
                Point::Block { n, coords } => {
                    let reach = b.radius - lp_norm(p, coords) - (*n as f64 - k as f64).abs();
                    if reach <= 0.0 {
                        continue 'blocks;
                    }
                    constraints.push((vec![0.0; k], reach));
                }
                Point::Ray { t } => {
                    let reach = b.radius - (t - k as f64).abs();
                    if reach <= 0.0 {
                        continue 'blocks;
                    }
                    constraints.push((vec![0.0; k], reach));
                }
            }
        }
        if let Some(x) = minimax_ball_witness(p, k, &constraints) {
            return Ok(Some(Point::block(k, x).canonical()));
        }
    }
    Ok(None)
}

/// Minimizes `max_i (|x - c_i|_p - r_i)` by smoothed (log-sum-exp)
/// gradient descent with an annealed temperature, from the centroid and
/// from each center. Returns a strict interior point when the best value
/// found is negative. The objective is convex for p >= 1, so descent
/// from a handful of starts is reliable at test scales.
fn minimax_ball_witness(p: f64, dim: usize, constraints: &[(Vec<f64>, f64)]) -> Option<Vec<f64>> {
    if dim == 0 {
        // the only point of l_p(0) is the empty tuple
        return if constraints.iter().all(|(_, r)| *r > 0.0) { Some(vec![]) } else { None };
    }
    let m = constraints.len();
    let objective = |x: &[f64]| -> f64 {
        constraints
            .iter()
            .map(|(c, r)| {
                let diff: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
                lp_norm(p, &diff) - r
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let scale = constraints
        .iter()
        .map(|(c, r)| lp_norm(p, c) + r)
        .fold(1.0f64, f64::max);

    let mut starts: Vec<Vec<f64>> = Vec::new();
    let centroid: Vec<f64> = (0..dim)
        .map(|k| constraints.iter().map(|(c, _)| c[k]).sum::<f64>() / m as f64)
        .collect();
    starts.push(centroid);
    for (c, _) in constraints.iter().take(8) {
        starts.push(c.clone());
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        let x = anneal_descent(p, constraints, start, scale);
        let v = objective(&x);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, x));
        }
        if best.as_ref().is_some_and(|(bv, _)| *bv < -1e-7 * scale) {
            break;
        }
    }
    match best {
        Some((v, x)) if v < 0.0 => Some(x),
        _ => None,
    }
}

fn anneal_descent(p: f64, constraints: &[(Vec<f64>, f64)], mut x: Vec<f64>, scale: f64) -> Vec<f64> {
    let dim = x.len();
    let gaps = |x: &[f64]| -> Vec<f64> {
        constraints
            .iter()
            .map(|(c, r)| {
                let diff: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
                lp_norm(p, &diff) - r
            })
            .collect()
    };
    let smooth = |g: &[f64], tau: f64| -> f64 {
        let m = g.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        m + tau * g.iter().map(|v| ((v - m) / tau).exp()).sum::<f64>().ln()
    };
    for level in 0..7 {
        let tau = scale * 0.3 * (0.4f64).powi(level);
        for _ in 0..60 {
            let g = gaps(&x);
            let mx = g.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            let wsum: f64 = g.iter().map(|v| ((v - mx) / tau).exp()).sum();
            let mut grad = vec![0.0; dim];
            for ((c, _), gv) in constraints.iter().zip(&g) {
                let w = ((gv - mx) / tau).exp() / wsum;
                let diff: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
                let norm = lp_norm(p, &diff);
                if norm < 1e-300 {
                    continue;
                }
                for k in 0..dim {
                    grad[k] += w * norm_gradient(p, &diff, norm, k);
                }
            }
            let gnorm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gnorm < 1e-12 {
                break;
            }
            let cur = smooth(&g, tau);
            let mut step = scale * 0.25;
            let mut improved = false;
            for _ in 0..40 {
                let cand: Vec<f64> =
                    x.iter().zip(&grad).map(|(a, d)| a - step * d).collect();
                if smooth(&gaps(&cand), tau) < cur - 1e-4 * step * gnorm * gnorm {
                    x = cand;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
    }
    x
}

/// d|v|_p / dv_k at a point with norm `norm > 0`.
fn norm_gradient(p: f64, v: &[f64], norm: f64, k: usize) -> f64 {
    if p == f64::INFINITY {
        // subgradient: weight on the max coordinate(s)
        let mx = v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        if v[k].abs() == mx && mx > 0.0 {
            v[k].signum()
        } else {
            0.0
        }
    } else if p == 1.0 {
        if v[k] == 0.0 {
            0.0
        } else {
            v[k].signum()
        }
    } else {
        v[k].signum() * (v[k].abs() / norm).powf(p - 1.0)
    }
}

/// The nerve of a ball cover over a window sample: one vertex per
/// member, one simplex per member family with a common interior point.
/// Families are found from two sides: every window point contributes the
/// family of members strictly containing it, and remaining candidate
/// cliques of the (exact) pairwise-intersection graph are settled by the
/// geometric witness search.
pub fn nerve(cover: &Cover, window: &[Point]) -> Result<SimplicialComplex> {
    for x in window {
        validate_point(&cover.space, x)?;
    }
    cover.check_covers(window)?;
    let n = cover.members.len();
    let labels: Vec<String> = (0..n).map(|i| format!("U{i}")).collect();

    // sample-witnessed families
    let mut witness_sets: Vec<Vec<usize>> = Vec::new();
    for x in window {
        let m = cover.interior_members(x)?;
        if !m.is_empty() {
            witness_sets.push(m);
        }
    }
    witness_sets.sort();
    witness_sets.dedup();

    // exact pairwise intersection graph: in a geodesic space two open
    // balls meet iff the center distance is under the radius sum
    let mut adjacent = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distance(&cover.space, &cover.members[i].center, &cover.members[j].center)?;
            if d < cover.members[i].radius + cover.members[j].radius {
                adjacent[i][j] = true;
                adjacent[j][i] = true;
            }
        }
    }

    let witnessed = |s: &[usize]| witness_sets.iter().any(|w| is_subset(s, w));

    let mut feasible: HashSet<Vec<usize>> = HashSet::new();
    let mut current: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if adjacent[i][j] {
                current.push(vec![i, j]);
                feasible.insert(vec![i, j]);
            }
        }
    }
    let mut faces: Vec<Vec<usize>> = witness_sets.clone();
    faces.extend(current.iter().cloned());

    while !current.is_empty() {
        let mut next: Vec<Vec<usize>> = Vec::new();
        for s in &current {
            let last = *s.last().expect("nonempty simplex");
            'cand: for v in (last + 1)..n {
                if !s.iter().all(|&u| adjacent[u][v]) {
                    continue;
                }
                let mut t = s.clone();
                t.push(v);
                // downward-closure pruning: all facets must be feasible
                for skip in 0..t.len() {
                    let facet: Vec<usize> = t
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != skip)
                        .map(|(_, &u)| u)
                        .collect();
                    if facet.len() >= 2 && !feasible.contains(&facet) {
                        continue 'cand;
                    }
                }
                let ok = witnessed(&t) || {
                    let family: Vec<Ball> =
                        t.iter().map(|&u| cover.members[u].clone()).collect();
                    ball_intersection_witness(&cover.space, &family)?.is_some()
                };
                if ok {
                    feasible.insert(t.clone());
                    next.push(t);
                }
            }
        }
        faces.extend(next.iter().cloned());
        current = next;
    }

    SimplicialComplex::from_faces(labels, faces)
}

/// Barycentric coordinates of `x` in the nerve of a cover: tent weights
/// `radius - d(x, center)` over the members whose interiors contain `x`,
/// normalized. The support shares the point `x`, so it spans a simplex
/// of the nerve by construction.
pub fn nerve_map(cover: &Cover, x: &Point) -> Result<BarycentricPoint> {
    let x = validate_point(&cover.space, x)?;
    let mut support = Vec::new();
    let mut weights = Vec::new();
    let mut covered_closed = false;
    for (i, b) in cover.members.iter().enumerate() {
        let d = distance(&cover.space, &b.center, &x)?;
        if d <= b.radius + 1e-12 {
            covered_closed = true;
        }
        if d < b.radius {
            support.push(i);
            weights.push(b.radius - d);
        }
    }
    if support.is_empty() {
        return if covered_closed {
            Err(Error::Precondition(format!(
                "point {x:?} only touches cover members on their boundaries"
            )))
        } else {
            Err(Error::Coverage(format!("point {x:?} is not covered")))
        };
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    BarycentricPoint::new(support, weights)
}

/// Image of a simplex under a vertex map, as a sorted set (a simplicial
/// map may collapse vertices).
pub fn map_simplex(map: &[usize], simplex: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = simplex.iter().map(|&v| map[v]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `outer` after `inner` on vertex indices.
pub fn compose_vertex_maps(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&v| outer[v]).collect()
}

/// The first domain simplex whose image is not a simplex of the target,
/// if any. `None` means the map is simplicial.
pub fn simpliciality_failure(
    domain: &SimplicialComplex,
    map: &[usize],
    target: &SimplicialComplex,
) -> Result<Option<Vec<usize>>> {
    if map.len() != domain.vertex_count() {
        return Err(Error::Precondition(format!(
            "vertex map has {} entries for {} vertices",
            map.len(),
            domain.vertex_count()
        )));
    }
    if let Some(&v) = map.iter().find(|v| **v >= target.vertex_count()) {
        return Err(Error::Precondition(format!(
            "vertex map targets vertex {v}, beyond the target complex"
        )));
    }
    for s in domain.simplices() {
        let image = map_simplex(map, s);
        if !target.simplices().contains(&image) {
            return Ok(Some(s.clone()));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContiguityReport {
    pub contiguous: bool,
    /// A simplex whose combined image spans no target simplex, when not
    /// contiguous.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

/// Two simplicial maps are contiguous when every domain simplex has
/// `f(s) + g(s)` spanning a simplex of the target.
pub fn is_contiguous(
    domain: &SimplicialComplex,
    f: &[usize],
    g: &[usize],
    target: &SimplicialComplex,
) -> Result<ContiguityReport> {
    for (name, map) in [("f", f), ("g", g)] {
        if let Some(s) = simpliciality_failure(domain, map, target)? {
            return Err(Error::Precondition(format!(
                "map {name} is not simplicial: image of {s:?} spans no simplex"
            )));
        }
    }
    for s in domain.simplices() {
        let mut union = map_simplex(f, s);
        union.extend(map_simplex(g, s));
        union.sort_unstable();
        union.dedup();
        if !target.simplices().contains(&union) {
            return Ok(ContiguityReport { contiguous: false, witness: Some(s.clone()) });
        }
    }
    Ok(ContiguityReport { contiguous: true, witness: None })
}

/// One level of an anti-Cech ladder.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AntiCechLevel {
    pub radius: f64,
    pub separation: f64,
    pub cover: Cover,
    pub nerve: SimplicialComplex,
}

/// Containment data for one cover member under a coarsening step.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContainmentWitness {
    /// Chosen containing member on the next level (smallest index).
    pub chosen: usize,
    pub center_distance: f64,
    /// `R_next - (center_distance + R_this)`, nonnegative.
    pub slack: f64,
    /// Every containing member, in index order.
    pub candidates: Vec<usize>,
}

/// Vertex map of a coarsening step, with per-member containment data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoarseningMap {
    pub vertex_map: Vec<usize>,
    pub witnesses: Vec<ContainmentWitness>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AntiCechSystem {
    pub levels: Vec<AntiCechLevel>,
    /// `maps[i]` goes from `levels[i]` to `levels[i + 1]`.
    pub maps: Vec<CoarseningMap>,
}

/// Builds a factor-3 anti-Cech ladder over a finite window: level `i`
/// covers the window by balls of radius `R_i = base * 3^(i-1)` centered
/// on a greedy net, and every ball is contained in a ball of the next
/// level, giving simplicial coarsening maps between the nerves.
///
/// Net separations are `R_1` at the first level and `2 * R_{i-1}` above:
/// greedy maximality then places every center within `2 R_i` of the next
/// level's net, which is exactly the ball-containment bound
/// `d(centers) + R_i <= R_{i+1}`. Nerves are built from window-sample
/// witnesses; a strict witness of a simplex stays strict for the image
/// simplex, so the coarsening maps are simplicial on the nose (this is
/// re-checked and an internal error if violated).
pub fn anti_cech(
    space: &Space,
    window: &[Point],
    base_radius: f64,
    levels: u32,
) -> Result<AntiCechSystem> {
    if !(base_radius > 0.0 && base_radius.is_finite()) {
        return Err(Error::Domain(format!("base radius must be positive, got {base_radius}")));
    }
    if levels < 2 {
        return Err(Error::Domain("an anti-Cech ladder needs at least 2 levels".into()));
    }
    if window.is_empty() {
        return Err(Error::Precondition("anti-Cech ladder over an empty window".into()));
    }
    let pts: Vec<Point> =
        window.iter().map(|x| validate_point(space, x)).collect::<Result<_>>()?;
    let pts = dedup_points(pts);
    let sample = DiscreteSample { ambient: *space, points: pts };

    let mut out_levels: Vec<AntiCechLevel> = Vec::with_capacity(levels as usize);
    for i in 1..=levels {
        let radius = base_radius * 3.0f64.powi(i as i32 - 1);
        let separation = if i == 1 { radius } else { 2.0 * radius / 3.0 };
        let cert = greedy_net(&sample, separation)?;
        let members: Vec<Ball> =
            cert.net.points.iter().map(|c| Ball { center: c.clone(), radius }).collect();
        let cover = Cover::new(*space, members)?;
        let nerve = witness_nerve(&cover, &sample.points)?;
        out_levels.push(AntiCechLevel { radius, separation, cover, nerve });
    }

    let mut maps: Vec<CoarseningMap> = Vec::with_capacity(levels as usize - 1);
    for i in 0..(levels as usize - 1) {
        let (this, next) = (&out_levels[i], &out_levels[i + 1]);
        let mut vertex_map = Vec::with_capacity(this.cover.len());
        let mut witnesses = Vec::with_capacity(this.cover.len());
        for b in &this.cover.members {
            let mut candidates = Vec::new();
            let mut dists = Vec::new();
            for (j, big) in next.cover.members.iter().enumerate() {
                let d = distance(space, &b.center, &big.center)?;
                if d + this.radius <= next.radius + 1e-9 {
                    candidates.push(j);
                    dists.push(d);
                }
            }
            let Some((&chosen, &center_distance)) = candidates.first().zip(dists.first()) else {
                return Err(Error::Internal(format!(
                    "containment invariant violated: no member of the next cover \
                     contains the ball at {:?}",
                    b.center
                )));
            };
            vertex_map.push(chosen);
            witnesses.push(ContainmentWitness {
                chosen,
                center_distance,
                slack: next.radius - (center_distance + this.radius),
                candidates,
            });
        }
        if let Some(s) = simpliciality_failure(&this.nerve, &vertex_map, &next.nerve)? {
            return Err(Error::Internal(format!(
                "coarsening map failed to be simplicial on {s:?}"
            )));
        }
        maps.push(CoarseningMap { vertex_map, witnesses });
    }
    Ok(AntiCechSystem { levels: out_levels, maps })
}

/// Nerve from window-sample witnesses only (no geometric search): one
/// face per sample point, spanned by the members strictly containing it.
fn witness_nerve(cover: &Cover, window: &[Point]) -> Result<SimplicialComplex> {
    let labels: Vec<String> = (0..cover.len()).map(|i| format!("U{i}")).collect();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for x in window {
        let m = cover.interior_members(x)?;
        if !m.is_empty() {
            faces.push(m);
        }
    }
    faces.sort();
    faces.dedup();
    SimplicialComplex::from_faces(labels, faces)
}

/// Shortest-path spherical distance between two barycentric points.
///
/// Points embed into the unit sphere by taking square roots of their
/// barycentric coordinates; inside one simplex the metric is the great
/// circle arc `arccos(sum_i sqrt(t_i t'_i))`, which is exact and is
/// returned directly whenever one simplex carries both points. Across
/// simplices the path metric is approximated from above by Dijkstra on
/// a barycentric lattice graph (denominator `subdivision`, moves of
/// lattice radius <= 2, great-circle edge weights). Along the 1-skeleton
/// the lattice arcs chain along one great circle, so edge paths come out
/// exact up to rounding.
pub fn spherical_distance(
    cx: &SimplicialComplex,
    y1: &BarycentricPoint,
    y2: &BarycentricPoint,
    subdivision: u32,
) -> Result<f64> {
    if subdivision == 0 {
        return Err(Error::Domain("subdivision must be at least 1".into()));
    }
    y1.validate_in(cx)?;
    y2.validate_in(cx)?;

    // same-simplex shortcut: exact arc
    let mut union = y1.simplex.clone();
    union.extend_from_slice(&y2.simplex);
    union.sort_unstable();
    union.dedup();
    if cx.simplices.contains(&union) {
        return Ok(arc(sphere_dot(y1, y2)));
    }

    let mut graph = SphericalGraph::build(cx, subdivision)?;
    let from = graph.attach(cx, y1);
    let to = graph.attach(cx, y2);
    dijkstra(&graph.adjacency, from, to).ok_or_else(|| {
        Error::Unreachable(format!(
            "no path between {:?} and {:?} in the complex",
            y1.simplex, y2.simplex
        ))
    })
}

fn sphere_dot(a: &BarycentricPoint, b: &BarycentricPoint) -> f64 {
    let mut dot = 0.0;
    let mut i = 0;
    let mut j = 0;
    while i < a.simplex.len() && j < b.simplex.len() {
        match a.simplex[i].cmp(&b.simplex[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                dot += (a.weights[i] * b.weights[j]).sqrt();
                i += 1;
                j += 1;
            }
        }
    }
    dot
}

fn arc(dot: f64) -> f64 {
    dot.clamp(-1.0, 1.0).acos()
}

/// Barycentric lattice graph of a complex at a fixed subdivision.
struct SphericalGraph {
    subdivision: u32,
    /// node key by id: sorted (vertex, numerator) pairs, numerators > 0
    keys: Vec<Vec<(usize, u32)>>,
    adjacency: Vec<Vec<(usize, f64)>>,
    /// lattice node ids per maximal simplex
    per_simplex: Vec<Vec<usize>>,
}

const LATTICE_CAP: usize = 300_000;

impl SphericalGraph {
    fn build(cx: &SimplicialComplex, subdivision: u32) -> Result<SphericalGraph> {
        let s = subdivision;
        let mut nodes: BTreeMap<Vec<(usize, u32)>, usize> = BTreeMap::new();
        let mut keys: Vec<Vec<(usize, u32)>> = Vec::new();
        let mut adjacency: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut per_simplex: Vec<Vec<usize>> = Vec::new();

        for simplex in cx.maximal_simplices() {
            let k = simplex.len();
            let mut comps: Vec<Vec<u32>> = Vec::new();
            compositions(s, k, &mut Vec::with_capacity(k), &mut comps);
            if nodes.len() + comps.len() > LATTICE_CAP {
                return Err(Error::Domain(
                    "lattice too large; lower the subdivision or shrink the complex".into(),
                ));
            }
            let ids: Vec<usize> = comps
                .iter()
                .map(|m| {
                    let key = node_key(simplex, m);
                    *nodes.entry(key.clone()).or_insert_with(|| {
                        keys.push(key);
                        adjacency.push(Vec::new());
                        adjacency.len() - 1
                    })
                })
                .collect();

            // index compositions for neighbor lookup within this simplex
            let index: BTreeMap<&Vec<u32>, usize> =
                comps.iter().enumerate().map(|(i, c)| (c, i)).collect();
            for (ci, m) in comps.iter().enumerate() {
                for neighbor in lattice_moves(m) {
                    if let Some(&cj) = index.get(&neighbor) {
                        if cj <= ci {
                            continue;
                        }
                        let (a, b) = (ids[ci], ids[cj]);
                        let dot = m
                            .iter()
                            .zip(&neighbor)
                            .map(|(&x, &y)| ((x as f64) * (y as f64)).sqrt() / s as f64)
                            .sum::<f64>();
                        let w = arc(dot);
                        adjacency[a].push((b, w));
                        adjacency[b].push((a, w));
                    }
                }
            }
            per_simplex.push(ids);
        }
        Ok(SphericalGraph { subdivision: s, keys, adjacency, per_simplex })
    }

    /// Attaches an off-lattice endpoint: a fresh node with exact arcs to
    /// every lattice node of every maximal simplex carrying its support.
    fn attach(&mut self, cx: &SimplicialComplex, y: &BarycentricPoint) -> usize {
        let s = self.subdivision;
        let id = self.adjacency.len();
        self.adjacency.push(Vec::new());
        let mut seen: HashSet<usize> = HashSet::new();
        for (mi, simplex) in cx.maximal_simplices().iter().enumerate() {
            if !is_subset(&y.simplex, simplex) {
                continue;
            }
            for &node in &self.per_simplex[mi] {
                if !seen.insert(node) {
                    continue;
                }
                let mut dot = 0.0;
                for &(v, m) in &self.keys[node] {
                    if let Ok(pos) = y.simplex.binary_search(&v) {
                        dot += (y.weights[pos] * m as f64 / s as f64).sqrt();
                    }
                }
                let w = arc(dot);
                self.adjacency[id].push((node, w));
                self.adjacency[node].push((id, w));
            }
        }
        id
    }
}

fn node_key(simplex: &[usize], m: &[u32]) -> Vec<(usize, u32)> {
    simplex
        .iter()
        .zip(m)
        .filter(|(_, &w)| w > 0)
        .map(|(&v, &w)| (v, w))
        .collect()
}

/// All compositions of `total` into `parts` nonnegative summands.
fn compositions(total: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        cur.push(total);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for first in 0..=total {
        cur.push(first);
        compositions(total - first, parts - 1, cur, out);
        cur.pop();
    }
}

/// Compositions reachable by one or two unit transfers.
fn lattice_moves(m: &[u32]) -> Vec<Vec<u32>> {
    let k = m.len();
    let mut single: Vec<Vec<u32>> = Vec::new();
    for i in 0..k {
        if m[i] == 0 {
            continue;
        }
        for j in 0..k {
            if i == j {
                continue;
            }
            let mut t = m.to_vec();
            t[i] -= 1;
            t[j] += 1;
            single.push(t);
        }
    }
    let mut all: BTreeSet<Vec<u32>> = single.iter().cloned().collect();
    for t in &single {
        for i in 0..k {
            if t[i] == 0 {
                continue;
            }
            for j in 0..k {
                if i == j {
                    continue;
                }
                let mut u = t.clone();
                u[i] -= 1;
                u[j] += 1;
                if u != m {
                    all.insert(u);
                }
            }
        }
    }
    all.into_iter().collect()
}

#[derive(PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap pops the smallest distance first
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

fn dijkstra(adjacency: &[Vec<(usize, f64)>], from: usize, to: usize) -> Option<f64> {
    let mut dist = vec![f64::INFINITY; adjacency.len()];
    dist[from] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry(0.0, from));
    while let Some(HeapEntry(d, u)) = heap.pop() {
        if u == to {
            return Some(d);
        }
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adjacency[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapEntry(nd, v));
            }
        }
    }
    None
}
