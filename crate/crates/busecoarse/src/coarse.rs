//! Coarse-map diagnostics over finite samples, and the barycentric
//! continuous approximation of a vertex map.
//!
//! A coarse map admits an expansion control S(R) (pairs within R land
//! within S(R)) and pulls bounded sets back to bounded sets. On a finite
//! window both properties degenerate to numbers, so the diagnostics here
//! report sampled estimates with explicit witnesses and leave the
//! quantifiers to the caller.

use serde::{Deserialize, Serialize};

use crate::busemann::{barycenter, WeightedPoints};
use crate::complex::{carrier_vertex, BarycentricPoint, SimplicialComplex};
use crate::error::{Error, Result};
use crate::space::{distance, validate_point, Point, Space};

/// Where a sampled map is defined: a finite point set in a space, or a
/// finite set of barycentric points of a complex.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSample {
    Points { space: Space, points: Vec<Point> },
    Complex { complex: SimplicialComplex, points: Vec<BarycentricPoint> },
}

impl DomainSample {
    pub fn len(&self) -> usize {
        match self {
            DomainSample::Points { points, .. } => points.len(),
            DomainSample::Complex { points, .. } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        match self {
            DomainSample::Points { space, points } => {
                for p in points {
                    validate_point(space, p)?;
                }
            }
            DomainSample::Complex { complex, points } => {
                for y in points {
                    y.validate_in(complex)?;
                }
            }
        }
        Ok(())
    }

    /// Structural sameness of two domains, up to metric-zero wiggle on
    /// point coordinates and 1e-12 on barycentric weights.
    fn matches(&self, other: &DomainSample) -> Result<bool> {
        match (self, other) {
            (
                DomainSample::Points { space: sa, points: pa },
                DomainSample::Points { space: sb, points: pb },
            ) => {
                if sa != sb || pa.len() != pb.len() {
                    return Ok(false);
                }
                for (a, b) in pa.iter().zip(pb) {
                    if distance(sa, a, b)? > 1e-12 {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (
                DomainSample::Complex { points: pa, .. },
                DomainSample::Complex { points: pb, .. },
            ) => {
                if pa.len() != pb.len() {
                    return Ok(false);
                }
                Ok(pa.iter().zip(pb).all(|(a, b)| {
                    a.simplex() == b.simplex()
                        && a.weights()
                            .iter()
                            .zip(b.weights())
                            .all(|(x, y)| (x - y).abs() <= 1e-12)
                }))
            }
            _ => Ok(false),
        }
    }
}

/// A map known through finitely many evaluations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledMap {
    pub domain: DomainSample,
    pub target_space: Space,
    pub values: Vec<Point>,
}

impl SampledMap {
    pub fn new(domain: DomainSample, target_space: Space, values: Vec<Point>) -> Result<SampledMap> {
        domain.validate()?;
        if domain.len() != values.len() {
            return Err(Error::Precondition(format!(
                "{} domain points but {} values",
                domain.len(),
                values.len()
            )));
        }
        let values =
            values.iter().map(|v| validate_point(&target_space, v)).collect::<Result<_>>()?;
        Ok(SampledMap { domain, target_space, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Expansion control at one radius: pairs within `r` in the domain land
/// within `s` in the target, witnessed by the extremal pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionRow {
    pub r: f64,
    pub s: f64,
    pub pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(usize, usize)>,
}

/// Sampled properness diagnostic. The window is finite, so properness
/// proper is judged by proportion: the preimage of a small target ball
/// (radius a tenth of the image diameter) must not stretch across
/// essentially the whole domain sample (nine tenths of its diameter).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropernessReport {
    pub proper: bool,
    pub ball_radius: f64,
    pub worst_preimage_diameter: f64,
    pub domain_diameter: f64,
    /// Center of the target ball with the widest preimage.
    pub worst_center: Point,
    /// Domain pair realizing that preimage diameter.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoarsenessReport {
    pub profile: Vec<ExpansionRow>,
    pub properness: PropernessReport,
}

/// Two maps on one domain at uniformly bounded distance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClosenessCertificate {
    /// Maximum pointwise target distance over the sample.
    pub c: f64,
    pub attained_at: usize,
}

/// Estimates the expansion profile S(R) over the given radii and runs
/// the properness diagnostic. Domain must be a point sample (a complex
/// carries no preferred metric here).
pub fn coarseness_profile(f: &SampledMap, radii: &[f64]) -> Result<CoarsenessReport> {
    let (space, points) = match &f.domain {
        DomainSample::Points { space, points } => (space, points),
        DomainSample::Complex { .. } => {
            return Err(Error::Unsupported(
                "expansion profiles need a metric domain sample, not a complex".into(),
            ));
        }
    };
    if points.is_empty() {
        return Err(Error::Precondition("expansion profile of an empty sample".into()));
    }
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] <= 0.0 {
        return Err(Error::Domain("radii must be positive and strictly increasing".into()));
    }

    let n = points.len();
    let mut dom = vec![0.0f64; n * n];
    let mut img = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distance(space, &points[i], &points[j])?;
            let e = distance(&f.target_space, &f.values[i], &f.values[j])?;
            dom[i * n + j] = d;
            img[i * n + j] = e;
        }
    }

    let mut profile = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut s = 0.0f64;
        let mut witness = None;
        let mut pairs = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                if dom[i * n + j] < r {
                    pairs += 1;
                    if img[i * n + j] > s {
                        s = img[i * n + j];
                        witness = Some((i, j));
                    }
                }
            }
        }
        profile.push(ExpansionRow { r, s, pairs, witness });
    }

    let domain_diameter =
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).fold(0.0f64, |acc, (i, j)| {
            acc.max(dom[i * n + j])
        });
    let image_diameter =
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).fold(0.0f64, |acc, (i, j)| {
            acc.max(img[i * n + j])
        });
    let ball_radius = 0.1 * image_diameter;
    let mut worst = 0.0f64;
    let mut worst_center = 0usize;
    let mut witness: Option<(usize, usize)> = None;
    for c in 0..n {
        // preimage of the closed ball around f(points[c])
        let mut members: Vec<usize> = Vec::new();
        for i in 0..n {
            let d = distance(&f.target_space, &f.values[c], &f.values[i])?;
            if d <= ball_radius + 1e-12 {
                members.push(i);
            }
        }
        for (ai, &a) in members.iter().enumerate() {
            for &b in &members[ai + 1..] {
                let d = dom[a.min(b) * n + a.max(b)];
                if d > worst {
                    worst = d;
                    worst_center = c;
                    witness = Some((a, b));
                }
            }
        }
    }
    let proper = n < 2 || worst <= 0.9 * domain_diameter;
    let properness = PropernessReport {
        proper,
        ball_radius,
        worst_preimage_diameter: worst,
        domain_diameter,
        worst_center: f.values[worst_center].clone(),
        witness: if proper { None } else { witness },
    };
    Ok(CoarsenessReport { profile, properness })
}

/// Maximum pointwise distance between two maps over a shared domain.
pub fn closeness(f: &SampledMap, g: &SampledMap) -> Result<ClosenessCertificate> {
    if f.target_space != g.target_space {
        return Err(Error::Precondition("closeness needs a common target space".into()));
    }
    if !f.domain.matches(&g.domain)? {
        return Err(Error::Precondition("closeness needs an identical domain sample".into()));
    }
    if f.is_empty() {
        return Err(Error::Precondition("closeness of empty samples".into()));
    }
    let mut c = -1.0f64;
    let mut attained_at = 0usize;
    for (i, (a, b)) in f.values.iter().zip(&g.values).enumerate() {
        let d = distance(&f.target_space, a, b)?;
        if d > c {
            c = d;
            attained_at = i;
        }
    }
    Ok(ClosenessCertificate { c, attained_at })
}

/// Outcome of approximating one barycentric point.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ApproxOutcome {
    Approximated {
        y: BarycentricPoint,
        /// Barycenter of the vertex images, weighted by the coordinates.
        g: Point,
        /// Vertex of largest weight (the nearest vertex).
        carrier: usize,
        /// Distance from `g` to the nearest vertex image, bounded by the
        /// image diameter of the supporting simplex.
        min_vertex_distance: f64,
        /// Distance from `g` to the carrier vertex's image.
        carrier_distance: f64,
    },
    Unsupported { y: BarycentricPoint, reason: String },
}

/// The barycentric continuous approximation of a vertex map, evaluated
/// on a sample of points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContinuousApproximation {
    pub target_space: Space,
    /// Largest image diameter over the simplices supporting eval points:
    /// the constant C of the two-step closeness bound. Every approximated
    /// point satisfies `min_vertex_distance <= c_bound` and
    /// `carrier_distance < 2 * c_bound` (up to solver tolerance).
    pub c_bound: f64,
    pub points: Vec<ApproxOutcome>,
}

impl ContinuousApproximation {
    /// The approximation and the nearest-vertex extension as sampled maps
    /// over the successfully approximated points.
    pub fn sampled_maps(
        &self,
        cx: &SimplicialComplex,
        vertex_images: &[Point],
    ) -> Result<(SampledMap, SampledMap)> {
        let mut ys = Vec::new();
        let mut g_values = Vec::new();
        let mut f_values = Vec::new();
        for p in &self.points {
            if let ApproxOutcome::Approximated { y, g, carrier, .. } = p {
                ys.push(y.clone());
                g_values.push(g.clone());
                f_values.push(vertex_images[*carrier].clone());
            }
        }
        let dom = DomainSample::Complex { complex: cx.clone(), points: ys };
        let g_map = SampledMap::new(dom.clone(), self.target_space, g_values)?;
        let f_map = SampledMap::new(dom, self.target_space, f_values)?;
        Ok((g_map, f_map))
    }
}

/// Replaces a vertex map `f` by its barycentric smoothing: a point with
/// coordinates `t_i` on simplex vertices `v_i` goes to the barycenter of
/// the images `f(v_i)` with weights `t_i`. On vertices this reproduces
/// `f`; anywhere else it sits within the image diameter of the nearest
/// vertex image (the barycenter lies in the convex hull of the inputs),
/// which chains into the `2C` closeness bound against any same-simplex
/// extension of `f`.
///
/// Vertex images that no single convex region of the target contains
/// (separate blocks of a glued space) have no barycenter; those eval
/// points are reported individually, not as a global failure.
pub fn continuous_approximation(
    cx: &SimplicialComplex,
    vertex_images: &[Point],
    target_space: &Space,
    eval: &[BarycentricPoint],
) -> Result<ContinuousApproximation> {
    if vertex_images.len() != cx.vertex_count() {
        return Err(Error::Precondition(format!(
            "{} vertex images for {} vertices",
            vertex_images.len(),
            cx.vertex_count()
        )));
    }
    let vertex_images: Vec<Point> = vertex_images
        .iter()
        .map(|v| validate_point(target_space, v))
        .collect::<Result<_>>()?;
    for y in eval {
        y.validate_in(cx)?;
    }

    // C: image diameter over the simplices the eval sample touches
    let mut touched: Vec<&[usize]> = eval.iter().map(|y| y.simplex()).collect();
    touched.sort();
    touched.dedup();
    let mut c_bound = 0.0f64;
    for s in &touched {
        for (i, &u) in s.iter().enumerate() {
            for &v in &s[i + 1..] {
                c_bound = c_bound.max(distance(
                    target_space,
                    &vertex_images[u],
                    &vertex_images[v],
                )?);
            }
        }
    }

    let mut points = Vec::with_capacity(eval.len());
    for y in eval {
        let imgs: Vec<Point> =
            y.simplex().iter().map(|&v| vertex_images[v].clone()).collect();
        let wp = WeightedPoints::new(imgs, y.weights().to_vec())?;
        match barycenter(target_space, &wp) {
            Ok(g) => {
                let mut min_vertex_distance = f64::INFINITY;
                for &v in y.simplex() {
                    min_vertex_distance = min_vertex_distance
                        .min(distance(target_space, &g, &vertex_images[v])?);
                }
                let carrier = carrier_vertex(y);
                let carrier_distance = distance(target_space, &g, &vertex_images[carrier])?;
                points.push(ApproxOutcome::Approximated {
                    y: y.clone(),
                    g,
                    carrier,
                    min_vertex_distance,
                    carrier_distance,
                });
            }
            Err(Error::Unsupported(reason)) => {
                points.push(ApproxOutcome::Unsupported { y: y.clone(), reason });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ContinuousApproximation { target_space: *target_space, c_bound, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{point_in_ball, rng_from_seed};
    use rand::Rng;

    fn plane() -> Space {
        Space::lp(2.0, 2).unwrap()
    }

    fn plane_sample(n: usize, seed: u64) -> Vec<Point> {
        let sp = plane();
        let o = sp.basepoint();
        let mut rng = rng_from_seed(seed);
        (0..n).map(|_| point_in_ball(&sp, &o, 5.0, &mut rng).unwrap()).collect()
    }

    #[test]
    fn identity_expands_nothing() {
        let sp = plane();
        let pts = plane_sample(60, 1);
        let f = SampledMap::new(
            DomainSample::Points { space: sp, points: pts.clone() },
            sp,
            pts,
        )
        .unwrap();
        let rep = coarseness_profile(&f, &[1.0, 2.0, 4.0]).unwrap();
        for row in &rep.profile {
            assert!(row.s <= row.r, "S({}) = {} exceeds the radius", row.r, row.s);
        }
        assert!(rep.properness.proper);
    }

    #[test]
    fn doubling_map_expands_linearly() {
        let sp = Space::lp(2.0, 1).unwrap();
        let pts: Vec<Point> = (-10..=10).map(|k| Point::block(1, vec![k as f64 * 0.5])).collect();
        let vals: Vec<Point> = pts
            .iter()
            .map(|p| match p {
                Point::Block { coords, .. } => Point::block(1, vec![2.0 * coords[0]]),
                _ => unreachable!(),
            })
            .collect();
        let f = SampledMap::new(
            DomainSample::Points { space: sp, points: pts },
            sp,
            vals,
        )
        .unwrap();
        let rep = coarseness_profile(&f, &[0.6, 1.1, 2.1]).unwrap();
        for row in &rep.profile {
            assert!(row.s <= 2.0 * row.r + 1e-12, "S({}) = {}", row.r, row.s);
        }
        assert!(rep.properness.proper);
    }

    #[test]
    fn collapsing_a_line_is_not_proper() {
        let sp = Space::lp(2.0, 1).unwrap();
        let pts: Vec<Point> = (-10..=10).map(|k| Point::block(1, vec![k as f64])).collect();
        let vals: Vec<Point> = pts.iter().map(|_| Point::block(1, vec![0.0])).collect();
        let f = SampledMap::new(
            DomainSample::Points { space: sp, points: pts },
            sp,
            vals,
        )
        .unwrap();
        let rep = coarseness_profile(&f, &[1.5]).unwrap();
        assert_eq!(rep.profile[0].s, 0.0);
        assert!(!rep.properness.proper);
        let (a, b) = rep.properness.witness.expect("witness pair");
        assert_eq!(
            rep.properness.worst_preimage_diameter,
            (a as f64 - b as f64).abs()
        );
        assert_eq!(rep.properness.worst_preimage_diameter, 20.0);
    }

    #[test]
    fn empty_sample_is_a_precondition_error() {
        let sp = plane();
        let f = SampledMap::new(
            DomainSample::Points { space: sp, points: vec![] },
            sp,
            vec![],
        )
        .unwrap();
        assert!(matches!(
            coarseness_profile(&f, &[1.0]),
            Err(Error::Precondition(_))
        ));
        let g = SampledMap::new(
            DomainSample::Points { space: sp, points: vec![sp.basepoint()] },
            sp,
            vec![sp.basepoint()],
        )
        .unwrap();
        assert!(matches!(
            coarseness_profile(&g, &[2.0, 1.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn closeness_of_a_map_with_itself_is_zero() {
        let sp = plane();
        let pts = plane_sample(40, 3);
        let f = SampledMap::new(
            DomainSample::Points { space: sp, points: pts.clone() },
            sp,
            pts,
        )
        .unwrap();
        let cert = closeness(&f, &f).unwrap();
        assert_eq!(cert.c, 0.0);
    }

    #[test]
    fn constant_shift_has_exact_closeness() {
        let sp = plane();
        let pts = plane_sample(40, 4);
        let shifted: Vec<Point> = pts
            .iter()
            .map(|p| match p {
                Point::Block { coords, .. } => {
                    Point::block(2, vec![coords[0] + 1.0, coords[1]])
                }
                _ => unreachable!(),
            })
            .collect();
        let dom = DomainSample::Points { space: sp, points: pts.clone() };
        let f = SampledMap::new(dom.clone(), sp, pts).unwrap();
        let g = SampledMap::new(dom, sp, shifted).unwrap();
        let cert = closeness(&f, &g).unwrap();
        assert!((cert.c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_domains_are_rejected() {
        let sp = plane();
        let f = SampledMap::new(
            DomainSample::Points { space: sp, points: plane_sample(10, 5) },
            sp,
            plane_sample(10, 6),
        )
        .unwrap();
        let g = SampledMap::new(
            DomainSample::Points { space: sp, points: plane_sample(10, 7) },
            sp,
            plane_sample(10, 6),
        )
        .unwrap();
        assert!(matches!(closeness(&f, &g), Err(Error::Precondition(_))));
    }

    fn edge_complex() -> SimplicialComplex {
        SimplicialComplex::from_faces(vec!["v0".into(), "v1".into()], vec![vec![0, 1]]).unwrap()
    }

    #[test]
    fn midpoint_of_an_edge_goes_to_the_mean() {
        let cx = edge_complex();
        let sp = plane();
        let images = vec![Point::block(2, vec![0.0, 0.0]), Point::block(2, vec![2.0, 0.0])];
        let mid = BarycentricPoint::new(vec![0, 1], vec![0.5, 0.5]).unwrap();
        let ca = continuous_approximation(&cx, &images, &sp, &[mid]).unwrap();
        match &ca.points[0] {
            ApproxOutcome::Approximated { g, .. } => {
                assert!(distance(&sp, g, &Point::block(2, vec![1.0, 0.0])).unwrap() < 1e-12);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn vertices_reproute_to_their_own_images() {
        let cx = edge_complex();
        let sp = plane();
        let images = vec![Point::block(2, vec![0.5, -1.0]), Point::block(2, vec![2.0, 3.0])];
        let ca = continuous_approximation(
            &cx,
            &images,
            &sp,
            &[BarycentricPoint::vertex(0), BarycentricPoint::vertex(1)],
        )
        .unwrap();
        for (k, p) in ca.points.iter().enumerate() {
            match p {
                ApproxOutcome::Approximated { g, carrier, .. } => {
                    assert_eq!(*carrier, k);
                    assert!(distance(&sp, g, &images[k]).unwrap() < 1e-9);
                }
                other => panic!("unexpected outcome {other:?}"),
            }
        }
    }

    #[test]
    fn two_simplex_bounds_hold_pointwise() {
        let labels = vec!["a".into(), "b".into(), "c".into()];
        let cx = SimplicialComplex::from_faces(labels, vec![vec![0, 1, 2]]).unwrap();
        let sp = Space::lp(3.0, 2).unwrap();
        let images = vec![
            Point::block(2, vec![0.0, 0.0]),
            Point::block(2, vec![1.0, 0.0]),
            Point::block(2, vec![0.3, 0.8]),
        ];
        let mut rng = rng_from_seed(9);
        let mut eval = Vec::new();
        for _ in 0..50 {
            let mut w = [0.0f64; 3];
            for v in &mut w {
                *v = rng.random::<f64>().max(1e-3);
            }
            let s: f64 = w.iter().sum();
            eval.push(
                BarycentricPoint::new(vec![0, 1, 2], w.iter().map(|v| v / s).collect()).unwrap(),
            );
        }
        let ca = continuous_approximation(&cx, &images, &sp, &eval).unwrap();
        assert!(ca.c_bound > 0.0);
        for p in &ca.points {
            match p {
                ApproxOutcome::Approximated { min_vertex_distance, carrier_distance, .. } => {
                    assert!(
                        *min_vertex_distance < ca.c_bound + 1e-6,
                        "intermediate bound violated: {min_vertex_distance} vs {}",
                        ca.c_bound
                    );
                    assert!(
                        *carrier_distance < 2.0 * ca.c_bound + 1e-6,
                        "closeness bound violated: {carrier_distance} vs 2×{}",
                        ca.c_bound
                    );
                }
                other => panic!("unexpected outcome {other:?}"),
            }
        }
    }

    #[test]
    fn cross_block_images_fail_per_point() {
        let cx = edge_complex();
        let sp = Space::glued_xp(2.0).unwrap();
        let images = vec![
            Point::block(1, vec![1.0]),
            Point::block(2, vec![0.5, 0.5]),
        ];
        let mid = BarycentricPoint::new(vec![0, 1], vec![0.5, 0.5]).unwrap();
        let ca =
            continuous_approximation(&cx, &images, &sp, &[BarycentricPoint::vertex(0), mid])
                .unwrap();
        assert!(matches!(ca.points[0], ApproxOutcome::Approximated { .. }));
        assert!(matches!(ca.points[1], ApproxOutcome::Unsupported { .. }));
    }

    #[test]
    fn close_maps_inherit_expansion_up_to_2c() {
        let sp = plane();
        let pts = plane_sample(50, 12);
        let mut rng = rng_from_seed(13);
        let c = 0.5;
        let perturbed: Vec<Point> = pts
            .iter()
            .map(|p| match p {
                Point::Block { coords, .. } => {
                    let a: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                    let r: f64 = rng.random::<f64>() * c;
                    Point::block(2, vec![coords[0] + r * a.cos(), coords[1] + r * a.sin()])
                }
                _ => unreachable!(),
            })
            .collect();
        let dom = DomainSample::Points { space: sp, points: pts.clone() };
        let f = SampledMap::new(dom.clone(), sp, pts).unwrap();
        let g = SampledMap::new(dom, sp, perturbed).unwrap();
        let cc = closeness(&f, &g).unwrap();
        assert!(cc.c <= c + 1e-12);
        let radii = [0.5, 1.0, 2.0, 4.0];
        let pf = coarseness_profile(&f, &radii).unwrap();
        let pg = coarseness_profile(&g, &radii).unwrap();
        for (a, b) in pf.profile.iter().zip(&pg.profile) {
            assert!(
                b.s <= a.s + 2.0 * cc.c + 1e-9,
                "S_g({}) = {} exceeds S_f + 2C = {}",
                b.r,
                b.s,
                a.s + 2.0 * cc.c
            );
        }
    }
}
