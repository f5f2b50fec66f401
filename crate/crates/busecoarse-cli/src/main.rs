//! Experiment runner. Every command reads a space and command-specific
//! parameters, runs one library operation, and prints a JSON report to
//! stdout; diagnostics go to stderr. Reports are deterministic given the
//! same invocation (including seed) except for the `timing_ms` field.
//!
//! Exit codes: 0 success or certified (including inconclusive), 2 usage
//! or schema errors, 3 precondition failures raised by the library, 4 a
//! check that ran to completion and failed.

mod commands;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgAction, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use busecoarse::{CheckStatus, Space};
use commands::{dispatch, CliError};

const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "busecoarse", version, about = "Busemann coarse-geometry toolkit")]
struct Cli {
    /// RNG seed for sampled checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Margin tolerance; also settable via BUSECOARSE_TOLERANCE.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a JSON experiment config.
    Run { config: PathBuf },
    /// Sweep the convexity inequality on random quadruples.
    BusemannCheck {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 10.0)]
        radius: f64,
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        glued_in_block: bool,
        /// Also check the staircase-vs-diagonal quadruple.
        #[arg(long)]
        include_staircase_geodesics: bool,
    },
    /// Weighted barycenter of points.
    Barycenter {
        #[arg(long)]
        space: String,
        /// JSON array of points, inline or @file.
        #[arg(long)]
        points: String,
        /// JSON array of weights summing to 1.
        #[arg(long)]
        weights: String,
    },
    /// Project a compactified point onto a closed ball.
    Project {
        #[arg(long)]
        space: String,
        #[arg(long)]
        o: Option<String>,
        #[arg(long)]
        t: f64,
        /// Compactified point (interior point or boundary direction).
        #[arg(long)]
        z: String,
    },
    /// Contract the compactification toward the basepoint.
    Contraction {
        #[arg(long)]
        space: String,
        #[arg(long)]
        o: Option<String>,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        z: String,
    },
    /// Certify a built-in function as Higson, or refute it.
    HigsonCertify {
        #[arg(long)]
        space: String,
        /// constant | coordinate | radial | angular | sin-radial
        #[arg(long)]
        kind: String,
        #[arg(long)]
        o: Option<String>,
        /// Check the raw function rather than its pullback.
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        r_window: Option<f64>,
        #[arg(long)]
        shells: Option<u32>,
        #[arg(long)]
        directions: Option<u32>,
        #[arg(long)]
        modulus_samples: Option<usize>,
    },
    /// Expansion profile and properness diagnostic of a sampled map.
    CoarseProfile {
        /// SampledMap JSON, inline or @file.
        #[arg(long)]
        map: String,
        /// Strictly increasing radii, e.g. '[1,2,4]'.
        #[arg(long)]
        radii: String,
        /// Second map on the same domain; adds a closeness certificate.
        #[arg(long)]
        against: Option<String>,
    },
    /// Barycentric smoothing of a vertex map.
    ApproxMap {
        #[arg(long)]
        space: String,
        #[arg(long)]
        complex: String,
        #[arg(long)]
        images: String,
        #[arg(long)]
        eval: String,
    },
    /// Nerve of a ball cover over a sample window.
    Nerve {
        #[arg(long)]
        cover: String,
        #[arg(long)]
        window: String,
    },
    /// Factor-3 ladder of covers with coarsening maps.
    AntiCech {
        #[arg(long)]
        space: String,
        #[arg(long)]
        window: String,
        #[arg(long)]
        base_radius: f64,
        #[arg(long)]
        levels: u32,
    },
    /// Spherical path distance between barycentric points.
    SphericalDist {
        #[arg(long)]
        complex: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 32)]
        subdivision: u32,
    },
    /// Whether two simplicial maps are contiguous.
    Contiguity {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        target: String,
    },
    /// Greedy separated net with a density certificate.
    Net {
        #[arg(long)]
        space: String,
        #[arg(long)]
        window: String,
        #[arg(long)]
        epsilon: f64,
    },
    /// Largest ball cardinality over a discrete sample.
    BgProfile {
        #[arg(long)]
        space: String,
        #[arg(long)]
        window: String,
        #[arg(long)]
        r: f64,
    },
    /// Greedy packing count in a ball.
    Packing {
        #[arg(long)]
        space: String,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        resolution: Option<f64>,
    },
    /// Greedy covering count in a ball.
    Covering {
        #[arg(long)]
        space: String,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        resolution: Option<f64>,
    },
    /// Lattice growth table in the blocks of the glued space.
    GammaK {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        r: f64,
    },
    /// Symbolic K-homology descriptors.
    Kinv {
        #[arg(long)]
        q: u8,
        #[arg(long)]
        sphere: Option<i64>,
        #[arg(long)]
        truncate: Option<u64>,
    },
}

/// Config file shape for `run`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    command: String,
    #[serde(default)]
    space: Option<Space>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tolerance: Option<f64>,
    #[serde(default = "empty_object")]
    parameters: Value,
}

fn empty_object() -> Value {
    Value::Object(Map::new())
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    status: Option<CheckStatus>,
    result: Value,
    timing_ms: u128,
}

/// Inline JSON, or `@path` to read it from a file.
fn json_text(s: &str) -> Result<String, CliError> {
    if let Some(path) = s.strip_prefix('@') {
        fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))
    } else {
        Ok(s.to_string())
    }
}

fn json_value(s: &str) -> Result<Value, CliError> {
    let text = json_text(s)?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad JSON argument: {e}")))
}

/// Space from either its JSON form or the compact `kind:p:dim` form
/// (`lp:2:2`, `raw:1:2`, `xp:2`, `halfline`).
fn parse_space(s: &str) -> Result<Space, CliError> {
    let text = json_text(s)?;
    let value = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad space JSON: {e}")))?
    } else {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let num = |x: &str| -> Result<f64, CliError> {
            x.parse().map_err(|_| CliError::Usage(format!("bad number \"{x}\" in space")))
        };
        match parts.as_slice() {
            ["halfline"] => json!({ "kind": "halfline" }),
            ["lp", p, d] => json!({ "kind": "lp", "p": num(p)?, "dim": num(d)? as usize }),
            ["raw", p, d] => json!({ "kind": "raw_lp", "p": num(p)?, "dim": num(d)? as usize }),
            ["xp", p] => json!({ "kind": "glued_xp", "p": num(p)? }),
            _ => {
                return Err(CliError::Usage(format!(
                    "unrecognised space \"{text}\" (expected lp:p:dim, raw:p:dim, xp:p, halfline, or JSON)"
                )))
            }
        }
    };
    serde_json::from_value(value).map_err(|e| CliError::Usage(format!("invalid space: {e}")))
}

fn obj(pairs: Vec<(&str, Option<Value>)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        if let Some(v) = v {
            m.insert(k.to_string(), v);
        }
    }
    Value::Object(m)
}

fn opt_json(s: &Option<String>) -> Result<Option<Value>, CliError> {
    s.as_ref().map(|x| json_value(x)).transpose()
}

/// Normalises a subcommand into (name, space, parameters).
fn prepare(cmd: &Command) -> Result<(String, Option<Space>, Value), CliError> {
    use Command::*;
    let out = match cmd {
        Run { .. } => unreachable!("run is handled by the caller"),
        BusemannCheck { space, samples, radius, glued_in_block, include_staircase_geodesics } => (
            "busemann-check".into(),
            Some(parse_space(space)?),
            json!({
                "samples": samples,
                "radius": radius,
                "glued_in_block": glued_in_block,
                "include_staircase_geodesics": include_staircase_geodesics,
            }),
        ),
        Barycenter { space, points, weights } => (
            "barycenter".into(),
            Some(parse_space(space)?),
            json!({ "points": json_value(points)?, "weights": json_value(weights)? }),
        ),
        Project { space, o, t, z } => (
            "project".into(),
            Some(parse_space(space)?),
            obj(vec![
                ("o", opt_json(o)?),
                ("t", Some(json!(t))),
                ("z", Some(json_value(z)?)),
            ]),
        ),
        Contraction { space, o, s, z } => (
            "contraction".into(),
            Some(parse_space(space)?),
            obj(vec![
                ("o", opt_json(o)?),
                ("s", Some(json!(s))),
                ("z", Some(json_value(z)?)),
            ]),
        ),
        HigsonCertify {
            space,
            kind,
            o,
            raw,
            t,
            epsilon,
            r_window,
            shells,
            directions,
            modulus_samples,
        } => (
            "higson-certify".into(),
            Some(parse_space(space)?),
            obj(vec![
                ("kind", Some(json!(kind))),
                ("o", opt_json(o)?),
                ("raw", Some(json!(raw))),
                ("t", t.map(|v| json!(v))),
                ("epsilon", epsilon.map(|v| json!(v))),
                ("r_window", r_window.map(|v| json!(v))),
                ("shells", shells.map(|v| json!(v))),
                ("directions", directions.map(|v| json!(v))),
                ("modulus_samples", modulus_samples.map(|v| json!(v))),
            ]),
        ),
        CoarseProfile { map, radii, against } => (
            "coarse-profile".into(),
            None,
            obj(vec![
                ("map", Some(json_value(map)?)),
                ("radii", Some(json_value(radii)?)),
                ("against", opt_json(against)?),
            ]),
        ),
        ApproxMap { space, complex, images, eval } => (
            "approx-map".into(),
            Some(parse_space(space)?),
            json!({
                "complex": json_value(complex)?,
                "images": json_value(images)?,
                "eval": json_value(eval)?,
            }),
        ),
        Nerve { cover, window } => (
            "nerve".into(),
            None,
            json!({ "cover": json_value(cover)?, "window": json_value(window)? }),
        ),
        AntiCech { space, window, base_radius, levels } => (
            "anti-cech".into(),
            Some(parse_space(space)?),
            json!({
                "window": json_value(window)?,
                "base_radius": base_radius,
                "levels": levels,
            }),
        ),
        SphericalDist { complex, from, to, subdivision } => (
            "spherical-dist".into(),
            None,
            json!({
                "complex": json_value(complex)?,
                "from": json_value(from)?,
                "to": json_value(to)?,
                "subdivision": subdivision,
            }),
        ),
        Contiguity { domain, f, g, target } => (
            "contiguity".into(),
            None,
            json!({
                "domain": json_value(domain)?,
                "f": json_value(f)?,
                "g": json_value(g)?,
                "target": json_value(target)?,
            }),
        ),
        Net { space, window, epsilon } => (
            "net".into(),
            Some(parse_space(space)?),
            json!({ "window": json_value(window)?, "epsilon": epsilon }),
        ),
        BgProfile { space, window, r } => (
            "bg-profile".into(),
            Some(parse_space(space)?),
            json!({ "window": json_value(window)?, "r": r }),
        ),
        Packing { space, x, r, epsilon, resolution } => (
            "packing".into(),
            Some(parse_space(space)?),
            obj(vec![
                ("x", opt_json(x)?),
                ("r", Some(json!(r))),
                ("epsilon", Some(json!(epsilon))),
                ("resolution", resolution.map(|v| json!(v))),
            ]),
        ),
        Covering { space, x, r, epsilon, resolution } => (
            "covering".into(),
            Some(parse_space(space)?),
            obj(vec![
                ("x", opt_json(x)?),
                ("r", Some(json!(r))),
                ("epsilon", Some(json!(epsilon))),
                ("resolution", resolution.map(|v| json!(v))),
            ]),
        ),
        GammaK { p, k, n_max, r } => (
            "gamma-k".into(),
            None,
            json!({ "p": p, "k": k, "n_max": n_max, "r": r }),
        ),
        Kinv { q, sphere, truncate } => (
            "kinv".into(),
            None,
            obj(vec![
                ("q", Some(json!(q))),
                ("sphere", sphere.map(|v| json!(v))),
                ("truncate", truncate.map(|v| json!(v))),
            ]),
        ),
    };
    Ok(out)
}

fn env_tolerance() -> Option<f64> {
    std::env::var("BUSECOARSE_TOLERANCE").ok().and_then(|s| s.parse().ok())
}

fn execute(cli: &Cli) -> Result<ExitCode, CliError> {
    let (command, space, params, seed, tolerance) = match &cli.command {
        Command::Run { config } => {
            let text = fs::read_to_string(config).map_err(|e| {
                CliError::Usage(format!("cannot read {}: {e}", config.display()))
            })?;
            let cfg: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
            let seed = cli.seed.or(cfg.seed).unwrap_or(0);
            let tolerance = cli
                .tolerance
                .or(cfg.tolerance)
                .or_else(env_tolerance)
                .unwrap_or(DEFAULT_TOLERANCE);
            (cfg.command, cfg.space, cfg.parameters, seed, tolerance)
        }
        other => {
            let (command, space, params) = prepare(other)?;
            let seed = cli.seed.unwrap_or(0);
            let tolerance = cli.tolerance.or_else(env_tolerance).unwrap_or(DEFAULT_TOLERANCE);
            (command, space, params, seed, tolerance)
        }
    };

    let started = Instant::now();
    let (result, status) = dispatch(&command, space, params, seed, tolerance)?;
    let envelope = Envelope {
        command: &command,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        tolerance,
        status,
        result,
        timing_ms: started.elapsed().as_millis(),
    };
    println!("{}", serde_json::to_string_pretty(&envelope).expect("envelope serializes"));
    Ok(match status {
        Some(CheckStatus::Fail) => ExitCode::from(4),
        _ => ExitCode::SUCCESS,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
