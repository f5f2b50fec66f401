//! Convexity checks and barycenters.
//!
//! The central inequality: for geodesics x(t), y(t) traversed with the same
//! parameter, `d(x(t), y(t)) <= (1-t) d(x(0), y(0)) + t d(x(1), y(1))`.
//! Spaces from the strict catalogue satisfy it; the raw `l_1` space admits
//! geodesic pairs that violate it, which is what [`busemann_check_along`]
//! demonstrates when handed a staircase route.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{CheckReport, CheckStatus};
use crate::sample::{point_in_ball, rng_from_seed, unit_direction};
use crate::space::{
    distance, geodesic_point, lp_norm, validate_point, Geodesic, Point, Space, DEFAULT_TOLERANCE,
};

/// Result of one convexity comparison. `margin = rhs - lhs`; the inequality
/// holds when the margin is nonnegative up to tolerance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub satisfied: bool,
}

/// Checks the convexity inequality at parameter `t` along the canonical
/// geodesics from `x0` to `x1` and from `y0` to `y1`.
pub fn busemann_check(
    space: &Space,
    x0: &Point,
    x1: &Point,
    y0: &Point,
    y1: &Point,
    t: f64,
    tol: f64,
) -> Result<ConvexityReport> {
    let xg = Geodesic::new(space, x0, x1)?;
    let yg = Geodesic::new(space, y0, y1)?;
    busemann_check_along(space, &xg, &yg, t, tol)
}

/// Same check along caller-chosen routes. Routes must be constant-speed
/// paths in `space`; handing a non-geodesic route makes the report
/// meaningless rather than wrong, so callers pairing this with staircase
/// routes should verify the route is a geodesic for their metric first.
pub fn busemann_check_along(
    space: &Space,
    x_path: &Geodesic,
    y_path: &Geodesic,
    t: f64,
    tol: f64,
) -> Result<ConvexityReport> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("convexity parameter must lie in [0,1], got {t}")));
    }
    let (x0, x1) = x_path.endpoints();
    let (y0, y1) = y_path.endpoints();
    let lhs = distance(space, &x_path.point_at(t)?, &y_path.point_at(t)?)?;
    let rhs = (1.0 - t) * distance(space, x0, y0)? + t * distance(space, x1, y1)?;
    let margin = rhs - lhs;
    Ok(ConvexityReport { t, lhs, rhs, margin, satisfied: margin >= -tol })
}

/// Options for the randomised convexity sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub samples: usize,
    /// Sampling radius around the basepoint.
    pub radius: f64,
    pub seed: u64,
    pub tolerance: f64,
    /// For the glued space: sample each quadruple inside one block
    /// (chosen per quadruple) instead of across components.
    pub glued_in_block: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            samples: 1000,
            radius: 10.0,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            glued_in_block: true,
        }
    }
}

/// Draws random quadruples and parameters, checks the convexity inequality
/// on each, and reports the worst margin with a witness on failure.
pub fn convexity_sweep(space: &Space, opts: &SweepOptions) -> Result<CheckReport> {
    let mut rng = rng_from_seed(opts.seed);
    let o = space.basepoint();
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for _ in 0..opts.samples {
        let quad: Vec<Point> = if matches!(space, Space::GluedXp { .. }) && opts.glued_in_block {
            let n = rng.random_range(1..=4usize);
            let p = space.p().expect("glued space has an exponent");
            (0..4)
                .map(|_| {
                    let dir = unit_direction(p, n, &mut rng);
                    let r = opts.radius * rng.random::<f64>();
                    Point::block(n, dir.iter().map(|d| r * d).collect()).canonical()
                })
                .collect()
        } else {
            (0..4)
                .map(|_| point_in_ball(space, &o, opts.radius, &mut rng))
                .collect::<Result<_>>()?
        };
        let t = rng.random::<f64>();
        let rep = busemann_check(space, &quad[0], &quad[1], &quad[2], &quad[3], t, opts.tolerance)?;
        if rep.margin < worst {
            worst = rep.margin;
            if !rep.satisfied {
                witness = Some(serde_json::json!({
                    "x0": quad[0], "x1": quad[1], "y0": quad[2], "y1": quad[3],
                    "t": t, "lhs": rep.lhs, "rhs": rep.rhs,
                }));
            }
        }
    }
    let status = if witness.is_none() { CheckStatus::Pass } else { CheckStatus::Fail };
    Ok(CheckReport {
        check: "busemann-convexity".into(),
        status,
        margin: worst,
        samples: opts.samples,
        witness,
    })
}

/// Weighted point configuration for barycenters. Weights are positive and
/// sum to one within 1e-12.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightedPoints {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl WeightedPoints {
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<WeightedPoints> {
        if points.is_empty() {
            return Err(Error::Precondition("barycenter input must be nonempty".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::Precondition(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0 && *w <= 1.0)) {
            return Err(Error::Domain("weights must lie in (0, 1]".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("weights must sum to 1, got {total}")));
        }
        Ok(WeightedPoints { points, weights })
    }
}

/// The weighted barycenter: the unique minimiser of
/// `sum_i w_i d(x, v_i)^2`.
///
/// Solved by gradient descent with Armijo backtracking from the `l_2`
/// weighted mean, followed by coordinatewise bracketing polish; objective
/// tolerance 1e-8. In the glued space the configuration must lie in one
/// block (ray points sitting exactly on that block's gluing coordinate are
/// re-embedded as its zero vector) or entirely on the ray; anything else
/// is rejected, because the minimiser would not stay in a region this
/// solver parametrises.
pub fn barycenter(space: &Space, wp: &WeightedPoints) -> Result<Point> {
    for pt in &wp.points {
        validate_point(space, pt)?;
    }
    match space {
        Space::RawLp { .. } => Err(Error::Unsupported(
            "barycenters need a strictly convex space; raw exponents are not".into(),
        )),
        Space::Lp { p, dim } => {
            let pts: Vec<Vec<f64>> = wp
                .points
                .iter()
                .map(|pt| match pt {
                    Point::Block { coords, .. } => coords.clone(),
                    _ => unreachable!("validated l_p points are block points"),
                })
                .collect();
            let x = solve_lp(*p, *dim, &pts, &wp.weights);
            Ok(Point::block(*dim, x))
        }
        Space::Halfline => {
            let mean = wp
                .points
                .iter()
                .zip(&wp.weights)
                .map(|(pt, w)| match pt {
                    Point::Ray { t } => w * t,
                    _ => unreachable!(),
                })
                .sum::<f64>();
            Ok(Point::ray(mean.max(0.0)))
        }
        Space::GluedXp { p } => {
            let canon: Vec<Point> = wp.points.iter().map(|pt| pt.canonical()).collect();
            let mut block: Option<usize> = None;
            for pt in &canon {
                if let Point::Block { n, .. } = pt {
                    match block {
                        None => block = Some(*n),
                        Some(m) if m != *n => {
                            return Err(Error::Unsupported(format!(
                                "barycenter input spans blocks {m} and {n}; no common convex chart"
                            )));
                        }
                        _ => {}
                    }
                }
            }
            match block {
                None => {
                    // every point is on the ray; the ray is convex and the
                    // weighted mean stays inside the coordinate hull.
                    let mean = canon
                        .iter()
                        .zip(&wp.weights)
                        .map(|(pt, w)| match pt {
                            Point::Ray { t } => w * t,
                            _ => unreachable!(),
                        })
                        .sum::<f64>();
                    Ok(Point::ray(mean.max(0.0)))
                }
                Some(n) => {
                    let mut pts = Vec::with_capacity(canon.len());
                    for pt in &canon {
                        match pt {
                            Point::Block { coords, .. } => pts.push(coords.clone()),
                            Point::Ray { t } if *t == n as f64 => pts.push(vec![0.0; n]),
                            Point::Ray { t } => {
                                return Err(Error::Unsupported(format!(
                                    "barycenter input mixes block {n} with ray point {t}; no common convex chart"
                                )));
                            }
                        }
                    }
                    let x = solve_lp(*p, n, &pts, &wp.weights);
                    Ok(Point::block(n, x).canonical())
                }
            }
        }
    }
}

fn objective(p: f64, pts: &[Vec<f64>], wts: &[f64], x: &[f64]) -> f64 {
    pts.iter()
        .zip(wts)
        .map(|(v, w)| {
            let diff: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - b).collect();
            let d = lp_norm(p, &diff);
            w * d * d
        })
        .sum()
}

fn gradient(p: f64, pts: &[Vec<f64>], wts: &[f64], x: &[f64]) -> Vec<f64> {
    let dim = x.len();
    let mut g = vec![0.0; dim];
    for (v, w) in pts.iter().zip(wts) {
        let diff: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - b).collect();
        let d = lp_norm(p, &diff);
        if d < 1e-300 {
            continue; // the squared norm is flat at its own centre
        }
        // grad of d^2 = 2 d^{2-p} * sign(c) |c|^{p-1} per coordinate
        let scale = 2.0 * w * d.powf(2.0 - p);
        for j in 0..dim {
            let c = diff[j];
            if c != 0.0 {
                g[j] += scale * c.signum() * c.abs().powf(p - 1.0);
            }
        }
    }
    g
}

/// Minimises the weighted squared-distance objective over `l_p(dim)`.
fn solve_lp(p: f64, dim: usize, pts: &[Vec<f64>], wts: &[f64]) -> Vec<f64> {
    // init: l_2 weighted mean (exact answer for p = 2).
    let mut x = vec![0.0; dim];
    for (v, w) in pts.iter().zip(wts) {
        for j in 0..dim {
            x[j] += w * v[j];
        }
    }
    let mut fx = objective(p, pts, wts, &x);
    let scale = fx.abs().max(1.0);

    let mut converged = false;
    for _ in 0..500 {
        let g = gradient(p, pts, wts, &x);
        let gnorm2: f64 = g.iter().map(|c| c * c).sum();
        if gnorm2.sqrt() < 1e-11 * scale.sqrt() {
            converged = true;
            break;
        }
        let mut step = 0.5;
        let mut accepted = false;
        while step > 1e-18 {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let fc = objective(p, pts, wts, &cand);
            if fc <= fx - 1e-4 * step * gnorm2 {
                x = cand;
                fx = fc;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break; // line search stalled; hand over to the bracketing polish
        }
    }
    if converged {
        return x;
    }

    // Coordinatewise bracketing polish for runs the line search could not
    // finish. Each coordinate of the minimiser lies inside the coordinate
    // hull of the inputs: outside it every term of the partial derivative
    // has the same sign.
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for v in pts {
        for j in 0..dim {
            lo[j] = lo[j].min(v[j]);
            hi[j] = hi[j].max(v[j]);
        }
    }
    for j in 0..dim {
        x[j] = x[j].clamp(lo[j], hi[j]);
    }
    for _ in 0..60 {
        let mut moved: f64 = 0.0;
        for j in 0..dim {
            let before = x[j];
            x[j] = golden_min(lo[j], hi[j], |v| {
                let mut y = x.clone();
                y[j] = v;
                objective(p, pts, wts, &y)
            });
            moved = moved.max((x[j] - before).abs());
        }
        if moved < 1e-12 {
            break;
        }
    }
    x
}

/// Golden-section minimisation of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_min(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a < 1e-13 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// The straight-line homotopy from the identity to `phi`: the point at
/// parameter `t` on the geodesic from `x` to `phi(x)`.
pub fn geodesic_homotopy(
    space: &Space,
    phi: impl Fn(&Point) -> Point,
    x: &Point,
    t: f64,
) -> Result<Point> {
    let target = phi(x);
    validate_point(space, &target)?;
    geodesic_point(space, x, &target, t)
}
