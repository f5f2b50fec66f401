//! Sampled certification of Higson-type functions.
//!
//! A bounded function F on an unbounded space belongs to the Higson class
//! when its variation over pairs at bounded distance dies out at infinity:
//! for every `epsilon > 0` and window `R` there is a radius beyond which
//! `d(a, b) < R` forces `|F(a) - F(b)| < epsilon`. Pullbacks `f o pi_t` of
//! continuous functions on the ball `B(o, t)` have this property with an
//! explicit radius: if `delta` is a uniform modulus for the pullback on
//! `B(o, t + R)` at `epsilon`, the variation condition holds beyond
//! `S = max(t, t R / delta)`. The radial pull toward `o` shrinks a pair at
//! distance `< R` and depth `r > S` into `B(o, t + R)` at distance
//! `< t R / r <= delta`, where the modulus takes over.
//!
//! Sampling can refute membership or support it, never prove it; reports
//! carry their verdict status explicitly.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{project, CompactifiedPoint};
use crate::error::{Error, Result};
use crate::report::CheckStatus;
use crate::sample::{point_in_ball, point_on_shell, rng_from_seed, unit_direction};
use crate::space::{distance, validate_point, Point, Space};

/// A scalar function on the points of a space.
pub trait ScalarFn {
    fn eval(&self, p: &Point) -> f64;
}

impl<F: Fn(&Point) -> f64> ScalarFn for F {
    fn eval(&self, p: &Point) -> f64 {
        self(p)
    }
}

/// The pullback `a -> f(pi_t(a))` of a function on `B(o, t)` to the whole
/// space. Bounded whenever `f` is bounded on the ball, and constant along
/// each geodesic ray beyond radius `t`.
pub struct Pullback<F: ScalarFn> {
    space: Space,
    o: Point,
    t: f64,
    f: F,
}

impl<F: ScalarFn> Pullback<F> {
    pub fn new(space: &Space, o: &Point, t: f64, f: F) -> Result<Pullback<F>> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("pullback radius must be positive, got {t}")));
        }
        let o = validate_point(space, o)?;
        Ok(Pullback { space: *space, o, t, f })
    }
}

impl<F: ScalarFn> ScalarFn for Pullback<F> {
    fn eval(&self, p: &Point) -> f64 {
        match project(&self.space, &self.o, self.t, &CompactifiedPoint::Interior(p.clone())) {
            Ok(q) => self.f.eval(&q),
            Err(_) => f64::NAN, // surfaces as an evaluation failure downstream
        }
    }
}

/// Builds the pullback `f o pi_t`.
pub fn pullback<F: ScalarFn>(space: &Space, o: &Point, t: f64, f: F) -> Result<Pullback<F>> {
    Pullback::new(space, o, t, f)
}

/// The built-in test function catalogue. All five are defined on every
/// catalogue space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinKind {
    /// Constantly 1.
    Constant,
    /// First coordinate of a block point; ray coordinate on the half-line;
    /// 0 on the spine of the glued space (continuous across the gluing
    /// because block coordinates vanish there).
    Coordinate,
    /// Distance from the basepoint.
    Radial,
    /// A direction-dependent function: the last normalised coordinate
    /// `c_last / max(1, |c|_2)`, tapered linearly inside the unit ball so
    /// that it stays continuous at the origin. On the half-line the
    /// analogue is `t / max(1, t)`.
    Angular,
    /// `sin` of the distance from the basepoint. Bounded and continuous
    /// but oscillating at every scale: its variation never dies out, so
    /// it is the catalogue's negative control when checked directly
    /// (its pullback through `pi_t`, by contrast, certifies).
    SinRadial,
}

/// A built-in function bound to a space and basepoint.
#[derive(Clone, Debug)]
pub struct Builtin {
    space: Space,
    o: Point,
    kind: BuiltinKind,
}

impl Builtin {
    pub fn new(space: &Space, o: &Point, kind: BuiltinKind) -> Result<Builtin> {
        let o = validate_point(space, o)?;
        Ok(Builtin { space: *space, o, kind })
    }

    pub fn kind(&self) -> BuiltinKind {
        self.kind
    }
}

impl ScalarFn for Builtin {
    fn eval(&self, p: &Point) -> f64 {
        match self.kind {
            BuiltinKind::Constant => 1.0,
            BuiltinKind::Coordinate => match p {
                Point::Block { coords, .. } => coords[0],
                Point::Ray { t } => match self.space {
                    Space::Halfline => *t,
                    _ => 0.0,
                },
            },
            BuiltinKind::Radial => {
                distance(&self.space, &self.o, p).unwrap_or(f64::NAN)
            }
            BuiltinKind::Angular => match p {
                Point::Ray { t } => match self.space {
                    Space::Halfline => t / t.max(1.0),
                    _ => 0.0,
                },
                Point::Block { coords, .. } => {
                    let r2 = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
                    coords[coords.len() - 1] / r2.max(1.0)
                }
            },
            BuiltinKind::SinRadial => {
                distance(&self.space, &self.o, p).map(f64::sin).unwrap_or(f64::NAN)
            }
        }
    }
}

/// Estimates a uniform modulus of continuity for `f` on `B(o, radius)` at
/// threshold `epsilon`: the largest sampled `delta` such that sampled
/// pairs closer than `delta` differ by less than `epsilon`.
///
/// The estimate is conservative on the sample (no sampled pair below the
/// returned `delta` violates the threshold, by construction) but it is
/// still a sample: a function whose steep variation hides between sample
/// points can receive an optimistic modulus. The sample mixes seeded
/// random points with radial ladders along random directions, the latter
/// refined toward the outer shell where radial functions vary fastest.
/// A function with no sampled violation at all gets the ball diameter.
pub fn uniform_modulus(
    space: &Space,
    o: &Point,
    radius: f64,
    f: &dyn ScalarFn,
    epsilon: f64,
    sample_density: usize,
    seed: u64,
) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("modulus radius must be positive, got {radius}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if sample_density == 0 {
        return Err(Error::Domain("sample density must be positive".into()));
    }
    let o = validate_point(space, o)?;
    let mut rng = rng_from_seed(seed);

    let mut pts: Vec<Point> = Vec::new();
    for _ in 0..sample_density {
        pts.push(point_in_ball(space, &o, radius, &mut rng)?);
    }
    // radial ladders: coarse rungs across the ball plus fine rungs near
    // the outer shell
    let directions = (sample_density / 12).clamp(8, 48);
    let mut rungs: Vec<f64> = (1..=12).map(|j| radius * j as f64 / 12.0).collect();
    for k in 1..=6 {
        rungs.push(radius * (1.0 - 1e-3 * k as f64));
        rungs.push(radius * (1.0 - 1e-2 * k as f64));
    }
    for _ in 0..directions {
        let probe = point_on_shell_toward(space, radius, &mut rng);
        for r in &rungs {
            pts.push(scale_to_radius(space, &probe, *r / radius));
        }
    }

    let values: Vec<f64> = pts.iter().map(|p| f.eval(p)).collect();
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Evaluation(format!(
            "function produced a non-finite value at {:?}",
            pts[bad]
        )));
    }

    let mut min_violating = f64::INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if (values[i] - values[j]).abs() >= epsilon {
                let d = distance(space, &pts[i], &pts[j])?;
                if d < min_violating {
                    min_violating = d;
                }
            }
        }
    }
    if min_violating.is_infinite() {
        Ok(2.0 * radius)
    } else {
        Ok(0.9 * min_violating)
    }
}

/// A shell point drawn from the basepoint sphere of the given radius,
/// used as the direction carrier for a radial ladder.
fn point_on_shell_toward(space: &Space, radius: f64, rng: &mut ChaCha8Rng) -> Point {
    point_on_shell(space, radius, rng)
}

/// Scales a point radially toward the canonical basepoint by `factor`
/// (exact for the catalogue because shell points lie on single legs).
fn scale_to_radius(space: &Space, p: &Point, factor: f64) -> Point {
    match p {
        Point::Ray { t } => Point::ray(t * factor),
        Point::Block { n, coords } => match space {
            Space::GluedXp { .. } => {
                // radial scaling along the route through the gluing point
                let norm: f64 = crate::space::lp_norm(space.p().unwrap_or(2.0), coords);
                let total = *n as f64 + norm;
                let target = total * factor;
                if target <= *n as f64 {
                    Point::ray(target)
                } else {
                    let keep = (target - *n as f64) / norm;
                    Point::block(*n, coords.iter().map(|c| c * keep).collect()).canonical()
                }
            }
            _ => Point::block(*n, coords.iter().map(|c| c * factor).collect()),
        },
    }
}

/// Parameters of a certification run.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HigsonParams {
    /// Radius of the ball carrying the pulled-back function.
    pub t: f64,
    /// Variation threshold.
    pub epsilon: f64,
    /// Pair window: checked pairs satisfy `d(a, b) < r_window`.
    pub r_window: f64,
    /// Number of dyadic shells sampled beyond the certified radius.
    pub shells: u32,
    /// Direction samples per shell.
    pub directions: u32,
    /// Base sample count for the modulus estimate.
    pub modulus_samples: usize,
    pub seed: u64,
}

impl Default for HigsonParams {
    fn default() -> Self {
        HigsonParams {
            t: 1.0,
            epsilon: 0.1,
            r_window: 1.0,
            shells: 5,
            directions: 200,
            modulus_samples: 400,
            seed: 0,
        }
    }
}

/// Per-shell statistics of a certification sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellStat {
    pub radius: f64,
    pub pairs: usize,
    /// Largest `|F(a) - F(b)|` seen on this shell.
    pub worst: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(Point, Point)>,
}

/// Report of a certification run. `s_radius` is always
/// `max(t, t * r_window / delta)`; `max_violation` is the largest sampled
/// variation beyond that radius, and a witness pair is recorded exactly
/// when it reached `epsilon`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HigsonCheckReport {
    pub status: CheckStatus,
    pub epsilon: f64,
    pub r_window: f64,
    pub t: f64,
    pub delta: f64,
    pub s_radius: f64,
    pub pairs_tested: usize,
    pub max_violation: f64,
    pub shell_stats: Vec<ShellStat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(Point, Point)>,
}

/// Certifies the pullback `f o pi_t` of a function on `B(o, t)`.
pub fn higson_certify(
    space: &Space,
    o: &Point,
    f: &dyn ScalarFn,
    params: &HigsonParams,
) -> Result<HigsonCheckReport> {
    let pb = PullbackRef { space, o: validate_point(space, o)?, t: params.t, f };
    certify_function(space, o, &pb, params)
}

/// Checks the variation condition for a function given directly on the
/// whole space (no pullback composition). This is how candidate Higson
/// functions that are not explicit pullbacks, such as the sin-radial
/// negative control, are examined.
pub fn higson_certify_raw(
    space: &Space,
    o: &Point,
    big_f: &dyn ScalarFn,
    params: &HigsonParams,
) -> Result<HigsonCheckReport> {
    certify_function(space, o, big_f, params)
}

/// Borrowing pullback used internally so `higson_certify` can wrap a
/// `&dyn ScalarFn` without boxing.
struct PullbackRef<'a> {
    space: &'a Space,
    o: Point,
    t: f64,
    f: &'a dyn ScalarFn,
}

impl ScalarFn for PullbackRef<'_> {
    fn eval(&self, p: &Point) -> f64 {
        match project(self.space, &self.o, self.t, &CompactifiedPoint::Interior(p.clone())) {
            Ok(q) => self.f.eval(&q),
            Err(_) => f64::NAN,
        }
    }
}

fn certify_function(
    space: &Space,
    o: &Point,
    func: &dyn ScalarFn,
    params: &HigsonParams,
) -> Result<HigsonCheckReport> {
    let HigsonParams { t, epsilon, r_window, shells, directions, modulus_samples, seed } = *params;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("ball radius must be positive, got {t}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(r_window > 0.0 && r_window.is_finite()) {
        return Err(Error::Domain(format!("pair window must be positive, got {r_window}")));
    }
    if shells == 0 || directions == 0 {
        return Err(Error::Domain("shells and directions must be positive".into()));
    }
    let o = validate_point(space, o)?;

    let delta = uniform_modulus(space, &o, t + r_window, func, epsilon, modulus_samples, seed)?;
    let s_radius = t.max(t * r_window / delta);

    let mut rng = rng_from_seed(seed.wrapping_add(1));
    let mut shell_stats = Vec::with_capacity(shells as usize);
    let mut pairs_tested = 0usize;
    let mut max_violation: f64 = 0.0;
    let mut witness: Option<(Point, Point)> = None;

    for j in 1..=shells {
        let rho = s_radius * (2.0f64).powi(j as i32);
        let mut worst: f64 = 0.0;
        let mut shell_witness: Option<(Point, Point)> = None;
        let mut pairs = 0usize;
        for _ in 0..directions {
            let a = point_on_shell(space, rho, &mut rng);
            let va = func.eval(&a);
            if !va.is_finite() {
                return Err(Error::Evaluation(format!(
                    "function produced a non-finite value at {a:?}"
                )));
            }
            for b in shell_partners(space, &a, rho, r_window, s_radius, &mut rng)? {
                let vb = func.eval(&b);
                if !vb.is_finite() {
                    return Err(Error::Evaluation(format!(
                        "function produced a non-finite value at {b:?}"
                    )));
                }
                pairs += 1;
                let gap = (va - vb).abs();
                if gap > worst {
                    worst = gap;
                    if gap >= epsilon {
                        shell_witness = Some((a.clone(), b.clone()));
                    }
                }
            }
        }
        pairs_tested += pairs;
        if worst > max_violation {
            max_violation = worst;
            witness = shell_witness.clone();
        }
        shell_stats.push(ShellStat { radius: rho, pairs, worst, witness: shell_witness });
    }

    let min_required = (shells as usize) * (directions as usize);
    let status = if max_violation >= epsilon {
        CheckStatus::Fail
    } else if pairs_tested >= min_required {
        CheckStatus::Pass
    } else {
        CheckStatus::Inconclusive
    };
    Ok(HigsonCheckReport {
        status,
        epsilon,
        r_window,
        t,
        delta,
        s_radius,
        pairs_tested,
        max_violation,
        shell_stats,
        witness,
    })
}

/// Partners for a shell point `a` at depth `rho`: points within the pair
/// window that stay beyond the certified radius. Radial moves probe
/// functions of the distance (a full window of them, fine enough to catch
/// oscillation), lateral moves probe direction dependence.
fn shell_partners(
    space: &Space,
    a: &Point,
    rho: f64,
    r_window: f64,
    s_radius: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(12);
    // radial rungs at 8 offsets in (-R, R), skewed outward so every
    // partner stays beyond s_radius
    for k in 1..=8 {
        let off = r_window * (k as f64 / 8.0) * 0.98;
        let target = rho + off;
        out.push(scale_to_radius(space, a, target / rho));
        let inward = rho - off;
        if inward > s_radius {
            out.push(scale_to_radius(space, a, inward / rho));
        }
    }
    // lateral probes
    match space {
        Space::Lp { p, dim } | Space::RawLp { p, dim } => {
            let base = match a {
                Point::Block { coords, .. } => coords.clone(),
                _ => unreachable!(),
            };
            for _ in 0..4 {
                let v = unit_direction(*p, *dim, rng);
                let eta = r_window * 0.9 * rng.random::<f64>();
                let cand: Vec<f64> = base.iter().zip(&v).map(|(c, d)| c + eta * d).collect();
                let cand = Point::block(*dim, cand);
                if distance(space, &space.basepoint(), &cand)? > s_radius {
                    out.push(cand);
                }
            }
        }
        Space::Halfline => {}
        Space::GluedXp { .. } => {
            // lateral probe inside the block where a lives, if any
            if let Point::Block { n, coords } = a {
                let p = space.p().expect("glued space has an exponent");
                for _ in 0..4 {
                    let v = unit_direction(p, *n, rng);
                    let eta = r_window * 0.9 * rng.random::<f64>();
                    let cand: Vec<f64> = coords.iter().zip(&v).map(|(c, d)| c + eta * d).collect();
                    let cand = Point::block(*n, cand).canonical();
                    if distance(space, &space.basepoint(), &cand)? > s_radius {
                        out.push(cand);
                    }
                }
            }
        }
    }
    Ok(out)
}
