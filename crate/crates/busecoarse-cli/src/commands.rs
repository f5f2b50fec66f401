//! Typed command parameters and the dispatcher they feed. Both entry
//! points, per-command flags and `run <config.json>`, normalise into the
//! same parameter structs so their reports are byte-identical.

use serde::Deserialize;
use serde_json::{json, Value};

use busecoarse::boundary::{contraction, project, CompactifiedPoint};
use busecoarse::busemann::{busemann_check_along, convexity_sweep, SweepOptions};
use busecoarse::space::{Geodesic, Route};
use busecoarse::{
    anti_cech, barycenter, bounded_geometry_profile, closeness, coarseness_profile,
    continuous_approximation, covering_number, gamma_growth_table, greedy_net, growth_table_csv,
    higson_certify, higson_certify_raw, is_contiguous, nerve, packing_number,
    sphere_k_homology, spherical_distance, xp_boundary_k, xp_boundary_k_truncated,
    BarycentricPoint, Builtin, BuiltinKind, CheckStatus, Cover, DiscreteSample, Error,
    HigsonParams, Point, SampledMap, SimplicialComplex, Space, WeightedPoints,
};

/// How a run went wrong, split along the exit-code contract: bad input
/// shapes are usage errors, failures raised by the library while the
/// command runs are precondition errors.
pub enum CliError {
    Usage(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Run(e)
    }
}

pub type CommandOutcome = (Value, Option<CheckStatus>);

fn need_space(space: Option<Space>) -> Result<Space, CliError> {
    space.ok_or_else(|| CliError::Usage("this command needs a space".into()))
}

fn parse_params<T: for<'de> Deserialize<'de>>(params: Value) -> Result<T, CliError> {
    serde_json::from_value(params).map_err(|e| CliError::Usage(format!("bad parameters: {e}")))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn default_samples() -> usize {
    1000
}
fn default_radius() -> f64 {
    10.0
}
fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusemannParams {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "yes")]
    pub glued_in_block: bool,
    #[serde(default)]
    pub include_staircase_geodesics: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarycenterParams {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectParams {
    #[serde(default)]
    pub o: Option<Point>,
    pub t: f64,
    pub z: CompactifiedPoint,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionParams {
    #[serde(default)]
    pub o: Option<Point>,
    pub s: f64,
    pub z: CompactifiedPoint,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HigsonCliParams {
    pub kind: BuiltinKind,
    #[serde(default)]
    pub o: Option<Point>,
    /// Check the function itself instead of its pullback through the
    /// projection to `B(o, t)`.
    #[serde(default)]
    pub raw: bool,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub r_window: Option<f64>,
    #[serde(default)]
    pub shells: Option<u32>,
    #[serde(default)]
    pub directions: Option<u32>,
    #[serde(default)]
    pub modulus_samples: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoarseProfileParams {
    pub map: SampledMap,
    pub radii: Vec<f64>,
    /// Optional second map over the same domain; adds a closeness
    /// certificate to the report.
    #[serde(default)]
    pub against: Option<SampledMap>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxMapParams {
    pub complex: SimplicialComplex,
    pub images: Vec<Point>,
    pub eval: Vec<BarycentricPoint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NerveParams {
    pub cover: Cover,
    pub window: Vec<Point>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntiCechParams {
    pub window: Vec<Point>,
    pub base_radius: f64,
    pub levels: u32,
}

fn default_subdivision() -> u32 {
    32
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphericalParams {
    pub complex: SimplicialComplex,
    pub from: BarycentricPoint,
    pub to: BarycentricPoint,
    #[serde(default = "default_subdivision")]
    pub subdivision: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContiguityParams {
    pub domain: SimplicialComplex,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub target: SimplicialComplex,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetParams {
    pub window: Vec<Point>,
    pub epsilon: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BgProfileParams {
    pub window: Vec<Point>,
    pub r: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackingParams {
    #[serde(default)]
    pub x: Option<Point>,
    pub r: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub resolution: Option<f64>,
}

fn default_p() -> f64 {
    2.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaParams {
    #[serde(default = "default_p")]
    pub p: f64,
    pub k: u32,
    pub n_max: usize,
    pub r: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KinvParams {
    pub q: u8,
    /// Sphere dimension: report one table entry instead of the product.
    #[serde(default)]
    pub sphere: Option<i64>,
    /// Truncate the block product at this index.
    #[serde(default)]
    pub truncate: Option<u64>,
}

/// Runs one named command. `params` carries the command-specific fields;
/// unknown fields and missing required ones are usage errors.
pub fn dispatch(
    command: &str,
    space: Option<Space>,
    params: Value,
    seed: u64,
    tolerance: f64,
) -> Result<CommandOutcome, CliError> {
    match command {
        "busemann-check" => {
            let p: BusemannParams = parse_params(params)?;
            let sp = need_space(space)?;
            let opts = SweepOptions {
                samples: p.samples,
                radius: p.radius,
                seed,
                tolerance,
                glued_in_block: p.glued_in_block,
            };
            let mut report = convexity_sweep(&sp, &opts)?;
            if p.include_staircase_geodesics {
                let dim = match sp {
                    Space::Lp { dim, .. } | Space::RawLp { dim, .. } if dim >= 2 => dim,
                    _ => {
                        return Err(CliError::Run(Error::Unsupported(
                            "staircase geodesics need a coordinate space of dimension >= 2"
                                .into(),
                        )))
                    }
                };
                let a = Point::block(dim, vec![0.0; dim]);
                let mut ones = vec![0.0; dim];
                ones[0] = 1.0;
                ones[1] = 1.0;
                let b = Point::block(dim, ones);
                let stair = Geodesic::with_route(&sp, &a, &b, Route::Staircase)?;
                let diag = Geodesic::new(&sp, &a, &b)?;
                let check = busemann_check_along(&sp, &stair, &diag, 0.5, tolerance)?;
                report.samples += 1;
                if check.margin < report.margin {
                    report.margin = check.margin;
                }
                if !check.satisfied {
                    report.status = CheckStatus::Fail;
                    report.witness = Some(json!({
                        "x0": a, "x1": b, "route": "staircase", "t": 0.5,
                        "lhs": check.lhs, "rhs": check.rhs, "margin": check.margin,
                    }));
                }
            }
            let status = report.status;
            Ok((to_value(&report), Some(status)))
        }
        "barycenter" => {
            let p: BarycenterParams = parse_params(params)?;
            let sp = need_space(space)?;
            let wp = WeightedPoints::new(p.points, p.weights)?;
            let point = barycenter(&sp, &wp)?;
            Ok((json!({ "point": point }), None))
        }
        "project" => {
            let p: ProjectParams = parse_params(params)?;
            let sp = need_space(space)?;
            let o = p.o.unwrap_or_else(|| sp.basepoint());
            let point = project(&sp, &o, p.t, &p.z)?;
            Ok((json!({ "point": point }), None))
        }
        "contraction" => {
            let p: ContractionParams = parse_params(params)?;
            let sp = need_space(space)?;
            let o = p.o.unwrap_or_else(|| sp.basepoint());
            let z = contraction(&sp, &o, &p.z, p.s)?;
            Ok((json!({ "point": z }), None))
        }
        "higson-certify" => {
            let p: HigsonCliParams = parse_params(params)?;
            let sp = need_space(space)?;
            let o = p.o.clone().unwrap_or_else(|| sp.basepoint());
            let defaults = HigsonParams::default();
            let hp = HigsonParams {
                t: p.t.unwrap_or(defaults.t),
                epsilon: p.epsilon.unwrap_or(defaults.epsilon),
                r_window: p.r_window.unwrap_or(defaults.r_window),
                shells: p.shells.unwrap_or(defaults.shells),
                directions: p.directions.unwrap_or(defaults.directions),
                modulus_samples: p.modulus_samples.unwrap_or(defaults.modulus_samples),
                seed,
            };
            let f = Builtin::new(&sp, &o, p.kind)?;
            let report = if p.raw {
                higson_certify_raw(&sp, &o, &f, &hp)?
            } else {
                higson_certify(&sp, &o, &f, &hp)?
            };
            let status = report.status;
            Ok((to_value(&report), Some(status)))
        }
        "coarse-profile" => {
            let p: CoarseProfileParams = parse_params(params)?;
            let report = coarseness_profile(&p.map, &p.radii)?;
            let mut out = to_value(&report);
            if let Some(g) = &p.against {
                let cert = closeness(&p.map, g)?;
                out["closeness"] = to_value(&cert);
            }
            Ok((out, None))
        }
        "approx-map" => {
            let p: ApproxMapParams = parse_params(params)?;
            let sp = need_space(space)?;
            let ca = continuous_approximation(&p.complex, &p.images, &sp, &p.eval)?;
            Ok((to_value(&ca), None))
        }
        "nerve" => {
            let p: NerveParams = parse_params(params)?;
            let cx = nerve(&p.cover, &p.window)?;
            Ok((to_value(&cx), None))
        }
        "anti-cech" => {
            let p: AntiCechParams = parse_params(params)?;
            let sp = need_space(space)?;
            let sys = anti_cech(&sp, &p.window, p.base_radius, p.levels)?;
            Ok((to_value(&sys), None))
        }
        "spherical-dist" => {
            let p: SphericalParams = parse_params(params)?;
            let d = spherical_distance(&p.complex, &p.from, &p.to, p.subdivision)?;
            Ok((json!({ "distance": d, "subdivision": p.subdivision }), None))
        }
        "contiguity" => {
            let p: ContiguityParams = parse_params(params)?;
            let report = is_contiguous(&p.domain, &p.f, &p.g, &p.target)?;
            let status = if report.contiguous { CheckStatus::Pass } else { CheckStatus::Fail };
            Ok((to_value(&report), Some(status)))
        }
        "net" => {
            let p: NetParams = parse_params(params)?;
            let sp = need_space(space)?;
            let window = DiscreteSample::new(sp, p.window)?;
            let cert = greedy_net(&window, p.epsilon)?;
            cert.verify(&window)?;
            Ok((to_value(&cert), None))
        }
        "bg-profile" => {
            let p: BgProfileParams = parse_params(params)?;
            let sp = need_space(space)?;
            let sample = DiscreteSample::new(sp, p.window)?;
            let worst = bounded_geometry_profile(&sample, p.r)?;
            Ok((json!({ "r": p.r, "max_ball_cardinality": worst }), None))
        }
        "packing" | "covering" => {
            let p: PackingParams = parse_params(params)?;
            let sp = need_space(space)?;
            let x = p.x.unwrap_or_else(|| sp.basepoint());
            let res = p.resolution.unwrap_or(p.epsilon / 10.0);
            let cert = if command == "packing" {
                packing_number(&sp, &x, p.r, p.epsilon, res)?
            } else {
                covering_number(&sp, &x, p.r, p.epsilon, res)?
            };
            Ok((json!({ "count": cert.net.points.len(), "certificate": cert }), None))
        }
        "gamma-k" => {
            let p: GammaParams = parse_params(params)?;
            let table = gamma_growth_table(p.p, p.k, p.r, p.n_max)?;
            let csv = growth_table_csv(&table);
            let rows: Vec<Value> =
                table.iter().map(|(n, c)| json!({ "n": n, "count": c })).collect();
            Ok((json!({ "table": rows, "csv": csv }), None))
        }
        "kinv" => {
            let p: KinvParams = parse_params(params)?;
            let group = match (p.sphere, p.truncate) {
                (Some(m), None) => sphere_k_homology(m, p.q)?,
                (None, Some(n)) => xp_boundary_k_truncated(n, p.q)?,
                (None, None) => xp_boundary_k(p.q)?,
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage(
                        "sphere and truncate are mutually exclusive".into(),
                    ))
                }
            };
            Ok((to_value(&group), None))
        }
        other => Err(CliError::Usage(format!("unknown command \"{other}\""))),
    }
}
