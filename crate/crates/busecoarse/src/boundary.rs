//! The visual compactification and its projections.
//!
//! Boundary points are asymptotic classes of geodesic rays. The catalogue
//! realises them concretely: a direction on the unit sphere of a block, or
//! the single end of the half-line (which in the glued space is also the
//! accumulation point of the block spheres). `project` sends the whole
//! compactification onto the closed ball `B(o, t)`: interior points inside
//! the ball stay put, everything else is pulled along its geodesic to
//! distance `t` (boundary points along their unique representative ray
//! from `o`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{CheckReport, CheckStatus};
use crate::space::{delta, distance, lp_norm, validate_point, Point, Space};

/// A point of the visual boundary.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum BoundaryPoint {
    /// The end of the half-line.
    RayEnd,
    /// A unit direction (in the `l_p` norm) in block `n`.
    Sphere { n: usize, dir: Vec<f64> },
}

impl BoundaryPoint {
    pub fn sphere(n: usize, dir: Vec<f64>) -> BoundaryPoint {
        BoundaryPoint::Sphere { n, dir }
    }
}

/// A point of the compactification: interior or boundary.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CompactifiedPoint {
    Interior(Point),
    Boundary(BoundaryPoint),
}

/// Validates a boundary point against a space and returns it with the
/// direction renormalised to the unit sphere (idempotent on valid input).
/// Directions must already be within 1e-6 of unit length; this guards
/// against passing unnormalised data by accident while absorbing honest
/// floating-point drift.
pub fn validate_boundary(space: &Space, xi: &BoundaryPoint) -> Result<BoundaryPoint> {
    match (space, xi) {
        (Space::Halfline, BoundaryPoint::RayEnd) => Ok(BoundaryPoint::RayEnd),
        (Space::GluedXp { .. }, BoundaryPoint::RayEnd) => Ok(BoundaryPoint::RayEnd),
        (Space::Lp { .. } | Space::RawLp { .. }, BoundaryPoint::RayEnd) => Err(
            Error::InvalidPoint("an l_p space has no half-line end".into()),
        ),
        (Space::Halfline, BoundaryPoint::Sphere { .. }) => Err(Error::InvalidPoint(
            "the half-line boundary is the single end point".into(),
        )),
        (Space::Lp { p, dim } | Space::RawLp { p, dim }, BoundaryPoint::Sphere { n, dir }) => {
            if n != dim {
                return Err(Error::InvalidPoint(format!(
                    "sphere index {n} does not match dimension {dim}"
                )));
            }
            Ok(BoundaryPoint::Sphere { n: *n, dir: renormalise(*p, dir)? })
        }
        (Space::GluedXp { p }, BoundaryPoint::Sphere { n, dir }) => {
            if *n == 0 || dir.len() != *n {
                return Err(Error::InvalidPoint(format!(
                    "sphere direction in block {n} needs {n} coordinates, got {}",
                    dir.len()
                )));
            }
            Ok(BoundaryPoint::Sphere { n: *n, dir: renormalise(*p, dir)? })
        }
    }
}

fn renormalise(p: f64, dir: &[f64]) -> Result<Vec<f64>> {
    if dir.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidPoint("non-finite direction coordinate".into()));
    }
    let n = lp_norm(p, dir);
    if (n - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidPoint(format!(
            "direction must be a unit vector (norm within 1e-6 of 1), got norm {n}"
        )));
    }
    Ok(dir.iter().map(|c| c / n).collect())
}

/// The point at distance `s >= 0` along the geodesic ray from `o` in the
/// asymptotic class `xi`.
pub fn ray_point(space: &Space, o: &Point, xi: &BoundaryPoint, s: f64) -> Result<Point> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("ray parameter must be finite and >= 0, got {s}")));
    }
    let o = validate_point(space, o)?;
    let xi = validate_boundary(space, xi)?;
    let pt = match (space, &xi) {
        (Space::Lp { dim, .. } | Space::RawLp { dim, .. }, BoundaryPoint::Sphere { dir, .. }) => {
            let base = match &o {
                Point::Block { coords, .. } => coords,
                _ => unreachable!(),
            };
            Point::block(*dim, base.iter().zip(dir).map(|(c, d)| c + s * d).collect())
        }
        (Space::Halfline, BoundaryPoint::RayEnd) => match &o {
            Point::Ray { t } => Point::ray(t + s),
            _ => unreachable!(),
        },
        (Space::GluedXp { .. }, BoundaryPoint::RayEnd) => match &o {
            Point::Ray { t } => Point::ray(t + s),
            Point::Block { n, coords } => {
                // out of the block, then along the ray toward the end
                let exit = lp_norm(space.p().expect("glued space has an exponent"), coords);
                if s <= exit {
                    scale_block(*n, coords, 1.0 - s / exit)
                } else {
                    Point::ray(*n as f64 + (s - exit))
                }
            }
        },
        (Space::GluedXp { p }, BoundaryPoint::Sphere { n, dir }) => match &o {
            Point::Block { n: m, coords } if m == n => {
                // straight ray inside the block, asymptotic to dir
                Point::block(*n, coords.iter().zip(dir).map(|(c, d)| c + s * d).collect())
            }
            Point::Block { n: m, coords } => {
                let exit = lp_norm(*p, coords);
                let ray_leg = (*m as f64 - *n as f64).abs();
                if s <= exit {
                    scale_block(*m, coords, 1.0 - s / exit)
                } else if s <= exit + ray_leg {
                    let dir_sign = if *n as f64 >= *m as f64 { 1.0 } else { -1.0 };
                    Point::ray(*m as f64 + dir_sign * (s - exit))
                } else {
                    let r = s - exit - ray_leg;
                    Point::block(*n, dir.iter().map(|d| r * d).collect())
                }
            }
            Point::Ray { t } => {
                let ray_leg = (t - *n as f64).abs();
                if s <= ray_leg {
                    let dir_sign = if *n as f64 >= *t { 1.0 } else { -1.0 };
                    Point::ray(t + dir_sign * s)
                } else {
                    let r = s - ray_leg;
                    Point::block(*n, dir.iter().map(|d| r * d).collect())
                }
            }
        },
        _ => unreachable!("validate_boundary filtered incompatible combinations"),
    };
    Ok(pt.canonical())
}

fn scale_block(n: usize, coords: &[f64], factor: f64) -> Point {
    Point::block(n, coords.iter().map(|c| c * factor).collect()).canonical()
}

/// Projection of the compactification onto the closed ball `B(o, t)`,
/// `t > 0`. Interior points within distance `t` of `o` are fixed; interior
/// points beyond are pulled to distance `t` along their geodesic from `o`;
/// boundary points map to the radius-`t` point of their ray from `o`.
pub fn project(space: &Space, o: &Point, t: f64, z: &CompactifiedPoint) -> Result<Point> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("projection radius must be positive, got {t}")));
    }
    match z {
        CompactifiedPoint::Interior(a) => {
            let a = validate_point(space, a)?;
            let r = distance(space, o, &a)?;
            if r <= t {
                Ok(a)
            } else {
                delta(space, o, &a, t / r)
            }
        }
        CompactifiedPoint::Boundary(xi) => ray_point(space, o, xi, t),
    }
}

/// The connecting projection `B(o, t) -> B(o, s)` for `0 < s < t`: identity
/// within radius `s`, radial pull to distance `s` beyond. The input must
/// lie in `B(o, t)` (up to `tol`).
pub fn project_between(
    space: &Space,
    o: &Point,
    s: f64,
    t: f64,
    a: &Point,
    tol: f64,
) -> Result<Point> {
    if !(s > 0.0 && t.is_finite() && s < t) {
        return Err(Error::Domain(format!(
            "connecting projection needs 0 < s < t, got s = {s}, t = {t}"
        )));
    }
    let a = validate_point(space, a)?;
    let r = distance(space, o, &a)?;
    if r > t + tol {
        return Err(Error::Precondition(format!(
            "point at distance {r} from o lies outside B(o, {t})"
        )));
    }
    if r <= s {
        Ok(a)
    } else {
        delta(space, o, &a, s / r)
    }
}

/// The contraction of the compactification toward `o`, parametrised by
/// `s in [0, 1]`: `s = 0` is the identity, `s = 1` is the constant map at
/// `o`, and intermediate values project onto `B(o, (1-s)/s)`. The radius
/// `(1-s)/s` sweeps from infinity down to zero as `s` runs over (0, 1).
pub fn contraction(
    space: &Space,
    o: &Point,
    z: &CompactifiedPoint,
    s: f64,
) -> Result<CompactifiedPoint> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("contraction parameter must lie in [0,1], got {s}")));
    }
    if s == 0.0 {
        // identity; still validate the input
        match z {
            CompactifiedPoint::Interior(a) => {
                validate_point(space, a)?;
            }
            CompactifiedPoint::Boundary(xi) => {
                validate_boundary(space, xi)?;
            }
        }
        return Ok(z.clone());
    }
    if s == 1.0 {
        let o = validate_point(space, o)?;
        return Ok(CompactifiedPoint::Interior(o));
    }
    let radius = (1.0 - s) / s;
    Ok(CompactifiedPoint::Interior(project(space, o, radius, z)?))
}

/// Checks the radial contraction bound
/// `d(delta_{t/r}(a), delta_{t/r}(b)) <= (t/r) d(a, b)` where
/// `r = min(d(o,a), d(o,b))`; requires `r >= t`.
pub fn busemann_contraction_bound(
    space: &Space,
    o: &Point,
    a: &Point,
    b: &Point,
    t: f64,
    tol: f64,
) -> Result<CheckReport> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {t}")));
    }
    let ra = distance(space, o, a)?;
    let rb = distance(space, o, b)?;
    let r = ra.min(rb);
    if r < t {
        return Err(Error::Precondition(format!(
            "both points must lie at distance >= {t} from o, nearest is at {r}"
        )));
    }
    let lam = t / r;
    let lhs = distance(space, &delta(space, o, a, lam)?, &delta(space, o, b, lam)?)?;
    let rhs = lam * distance(space, a, b)?;
    let margin = rhs - lhs;
    let status = if margin >= -tol { CheckStatus::Pass } else { CheckStatus::Fail };
    let witness = (status == CheckStatus::Fail).then(|| {
        serde_json::json!({ "a": a, "b": b, "t": t, "r": r, "lhs": lhs, "rhs": rhs })
    });
    Ok(CheckReport {
        check: "radial-contraction-bound".into(),
        status,
        margin,
        samples: 1,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::DEFAULT_TOLERANCE;

    fn interior(p: Point) -> CompactifiedPoint {
        CompactifiedPoint::Interior(p)
    }

    #[test]
    fn boundary_validation() {
        let lp = Space::lp(2.0, 2).unwrap();
        assert!(validate_boundary(&lp, &BoundaryPoint::RayEnd).is_err());
        assert!(validate_boundary(&lp, &BoundaryPoint::sphere(2, vec![0.6, 0.8])).is_ok());
        assert!(validate_boundary(&lp, &BoundaryPoint::sphere(2, vec![0.6, 0.9])).is_err());
        assert!(validate_boundary(&lp, &BoundaryPoint::sphere(1, vec![1.0])).is_err());

        let hl = Space::halfline();
        assert!(validate_boundary(&hl, &BoundaryPoint::RayEnd).is_ok());
        assert!(validate_boundary(&hl, &BoundaryPoint::sphere(1, vec![1.0])).is_err());

        let xp = Space::glued_xp(3.0).unwrap();
        assert!(validate_boundary(&xp, &BoundaryPoint::RayEnd).is_ok());
        assert!(validate_boundary(&xp, &BoundaryPoint::sphere(2, vec![1.0, 0.0])).is_ok());
        assert!(validate_boundary(&xp, &BoundaryPoint::sphere(2, vec![1.0])).is_err());
    }

    #[test]
    fn renormalisation_is_idempotent() {
        let lp = Space::lp(3.0, 2).unwrap();
        let raw = vec![0.7, 0.8];
        let n = lp_norm(3.0, &raw);
        let xi = BoundaryPoint::sphere(2, raw.iter().map(|c| c / n).collect());
        let once = validate_boundary(&lp, &xi).unwrap();
        let twice = validate_boundary(&lp, &once).unwrap();
        match (&once, &twice) {
            (BoundaryPoint::Sphere { dir: a, .. }, BoundaryPoint::Sphere { dir: b, .. }) => {
                assert_eq!(a, b);
            }
            _ => panic!("expected sphere directions"),
        }
    }

    #[test]
    fn projection_fixes_the_ball_and_pulls_the_rest() {
        let lp = Space::lp(2.0, 2).unwrap();
        let o = lp.basepoint();
        // inside: unchanged
        let a = Point::block(2, vec![0.25, 0.25]);
        let pa = project(&lp, &o, 1.0, &interior(a.clone())).unwrap();
        assert!(pa.same_point(&a));
        // outside: pulled to the unit sphere along its ray from o
        let b = Point::block(2, vec![3.0, 4.0]);
        let pb = project(&lp, &o, 1.0, &interior(b)).unwrap();
        assert!(distance(&lp, &pb, &Point::block(2, vec![0.6, 0.8])).unwrap() < 1e-12);
    }

    #[test]
    fn projection_of_boundary_directions() {
        let lp = Space::lp(2.0, 2).unwrap();
        let o = lp.basepoint();
        let xi = CompactifiedPoint::Boundary(BoundaryPoint::sphere(2, vec![0.6, 0.8]));
        let p = project(&lp, &o, 2.0, &xi).unwrap();
        assert!(distance(&lp, &p, &Point::block(2, vec![1.2, 1.6])).unwrap() < 1e-12);

        // glued space: heading toward block 5 from ray 0, radius 3 stops on the ray.
        let xp = Space::glued_xp(2.0).unwrap();
        let o = xp.basepoint();
        let toward5 =
            CompactifiedPoint::Boundary(BoundaryPoint::sphere(5, vec![1.0, 0.0, 0.0, 0.0, 0.0]));
        let p = project(&xp, &o, 3.0, &toward5).unwrap();
        assert!(p.same_point(&Point::ray(3.0)));
        // radius 7 reaches 2 into the block.
        let p = project(&xp, &o, 7.0, &toward5).unwrap();
        assert!(p.same_point(&Point::block(5, vec![2.0, 0.0, 0.0, 0.0, 0.0])));
    }

    #[test]
    fn ray_points_have_exact_distance_from_o() {
        let xp = Space::glued_xp(2.0).unwrap();
        let cases: Vec<(Point, BoundaryPoint)> = vec![
            (Point::ray(1.5), BoundaryPoint::RayEnd),
            (Point::ray(1.5), BoundaryPoint::sphere(3, vec![0.0, 1.0, 0.0])),
            (Point::block(2, vec![1.0, 1.0]), BoundaryPoint::RayEnd),
            (Point::block(2, vec![1.0, 1.0]), BoundaryPoint::sphere(2, vec![1.0, 0.0])),
            (Point::block(2, vec![3.0, 4.0]), BoundaryPoint::sphere(4, vec![0.0, 0.0, 0.0, -1.0])),
        ];
        for (o, xi) in cases {
            for s in [0.0, 0.4, 1.0, 2.5, 9.0] {
                let pt = ray_point(&xp, &o, &xi, s).unwrap();
                let d = distance(&xp, &o, &pt).unwrap();
                assert!(
                    (d - s).abs() < 1e-9,
                    "ray from {o:?} toward {xi:?}: wanted distance {s}, got {d}"
                );
            }
        }
    }

    #[test]
    fn sphere_ray_from_same_block_goes_straight() {
        let xp = Space::glued_xp(2.0).unwrap();
        let o = Point::block(2, vec![1.0, 2.0]);
        let xi = BoundaryPoint::sphere(2, vec![0.0, 1.0]);
        let p = ray_point(&xp, &o, &xi, 3.0).unwrap();
        assert!(p.same_point(&Point::block(2, vec![1.0, 5.0])));
    }

    #[test]
    fn connecting_projection_checks_its_ball() {
        let lp = Space::lp(2.0, 2).unwrap();
        let o = lp.basepoint();
        let far = Point::block(2, vec![10.0, 0.0]);
        match project_between(&lp, &o, 1.0, 2.0, &far, DEFAULT_TOLERANCE) {
            Err(Error::Precondition(_)) => {}
            other => panic!("expected precondition error, got {other:?}"),
        }
        assert!(project_between(&lp, &o, 2.0, 2.0, &far, DEFAULT_TOLERANCE).is_err());
        let near = Point::block(2, vec![1.5, 0.0]);
        let p = project_between(&lp, &o, 1.0, 2.0, &near, DEFAULT_TOLERANCE).unwrap();
        assert!(p.same_point(&Point::block(2, vec![1.0, 0.0])));
    }

    #[test]
    fn contraction_endpoints_and_midpoint() {
        let lp = Space::lp(2.0, 2).unwrap();
        let o = lp.basepoint();
        let xi = CompactifiedPoint::Boundary(BoundaryPoint::sphere(2, vec![1.0, 0.0]));
        // s = 0: identity on the boundary point.
        match contraction(&lp, &o, &xi, 0.0).unwrap() {
            CompactifiedPoint::Boundary(BoundaryPoint::Sphere { dir, .. }) => {
                assert_eq!(dir, vec![1.0, 0.0]);
            }
            other => panic!("expected boundary point back, got {other:?}"),
        }
        // s = 1/2: radius (1-s)/s = 1, the direction lands on the unit sphere.
        match contraction(&lp, &o, &xi, 0.5).unwrap() {
            CompactifiedPoint::Interior(p) => {
                assert!(p.same_point(&Point::block(2, vec![1.0, 0.0])));
            }
            other => panic!("expected interior point, got {other:?}"),
        }
        // s = 1: everything lands on o.
        match contraction(&lp, &o, &xi, 1.0).unwrap() {
            CompactifiedPoint::Interior(p) => assert!(p.same_point(&o)),
            other => panic!("expected o, got {other:?}"),
        }
        // near points are fixed for small s.
        let a = Point::block(2, vec![0.5, 0.0]);
        match contraction(&lp, &o, &interior(a.clone()), 0.1).unwrap() {
            CompactifiedPoint::Interior(p) => assert!(p.same_point(&a)),
            other => panic!("expected fixed point, got {other:?}"),
        }
    }

    #[test]
    fn contraction_bound_holds_and_checks_preconditions() {
        let xp = Space::glued_xp(2.0).unwrap();
        let o = xp.basepoint();
        let a = Point::block(1, vec![2.0]);
        let b = Point::block(2, vec![3.0, 4.0]);
        let rep = busemann_contraction_bound(&xp, &o, &a, &b, 1.5, DEFAULT_TOLERANCE).unwrap();
        assert!(rep.passed(), "margin {}", rep.margin);
        // t larger than min radius: precondition error.
        assert!(matches!(
            busemann_contraction_bound(&xp, &o, &a, &b, 5.0, DEFAULT_TOLERANCE),
            Err(Error::Precondition(_))
        ));
    }
}
