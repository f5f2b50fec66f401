//! Acceptance gate: one test per shipped guarantee, each line of the
//! harness output standing for one criterion. Everything is seeded; a
//! failure here is a regression, not noise.

mod common;

use std::time::Instant;

use busecoarse::boundary::{project, project_between, BoundaryPoint, CompactifiedPoint};
use busecoarse::busemann::{busemann_check_along, convexity_sweep, SweepOptions};
use busecoarse::sample::{point_in_ball, rng_from_seed, unit_direction};
use busecoarse::space::{Geodesic, Route};
use busecoarse::{
    anti_cech, barycenter, compose_vertex_maps, covering_number, distance, gamma_growth_table,
    higson_certify, higson_certify_raw, is_contiguous, packing_number, simpliciality_failure,
    spherical_distance, xp_boundary_k, AbelianGroup, ApproxOutcome, BarycentricPoint, Builtin,
    BuiltinKind, CheckStatus, HigsonParams, Point, SimplicialComplex, Space, WeightedPoints,
};
use rand::Rng;

#[test]
fn criterion_01_busemann_convexity_sweep() {
    let started = Instant::now();
    let mut spaces = Vec::new();
    for p in [1.5, 2.0, 3.0] {
        for n in 1..=4 {
            spaces.push(Space::lp(p, n).unwrap());
        }
    }
    spaces.push(Space::glued_xp(2.0).unwrap());
    for sp in &spaces {
        let opts = SweepOptions {
            samples: 10_000,
            radius: 10.0,
            seed: 7,
            tolerance: 1e-9,
            glued_in_block: true,
        };
        let report = convexity_sweep(sp, &opts).unwrap();
        assert_eq!(report.status, CheckStatus::Pass, "{sp:?}: {report:?}");
        assert!(report.margin >= -1e-9, "{sp:?}: worst margin {}", report.margin);
        assert_eq!(report.samples, 10_000);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "sweep took {elapsed:?}");
}

#[test]
fn criterion_02_staircase_negative_control() {
    let sp = Space::raw_lp(1.0, 2).unwrap();
    let a = Point::block(2, vec![0.0, 0.0]);
    let b = Point::block(2, vec![1.0, 1.0]);
    let stair = Geodesic::with_route(&sp, &a, &b, Route::Staircase).unwrap();
    // the staircase really is a geodesic of raw l_1 before it refutes convexity
    assert_eq!(stair.length(), distance(&sp, &a, &b).unwrap());
    let diag = Geodesic::new(&sp, &a, &b).unwrap();
    let report = busemann_check_along(&sp, &stair, &diag, 0.5, 1e-9).unwrap();
    assert_eq!(report.margin, -1.0);
    assert!(!report.satisfied);
}

#[test]
fn criterion_03_projection_coherence() {
    let spaces = vec![
        Space::lp(1.5, 2).unwrap(),
        Space::lp(2.0, 3).unwrap(),
        Space::lp(3.0, 2).unwrap(),
        Space::raw_lp(1.0, 2).unwrap(),
        Space::halfline(),
        Space::glued_xp(2.0).unwrap(),
    ];
    let mut worst = 0.0f64;
    for sp in &spaces {
        let o = sp.basepoint();
        let mut rng = rng_from_seed(11);
        for k in 0..1000 {
            let u = 2.0 + 28.0 * rng.random::<f64>();
            let t = u * (0.5 + 0.49 * rng.random::<f64>());
            let s = t * (0.1 + 0.85 * rng.random::<f64>());

            // tower law on a compactified point, interior and ideal alike
            let z = if k % 2 == 0 {
                CompactifiedPoint::Interior(point_in_ball(sp, &o, 2.0 * u, &mut rng).unwrap())
            } else {
                CompactifiedPoint::Boundary(match sp {
                    Space::Halfline => BoundaryPoint::RayEnd,
                    Space::Lp { p, dim } | Space::RawLp { p, dim } => {
                        BoundaryPoint::sphere(*dim, unit_direction(*p, *dim, &mut rng))
                    }
                    Space::GluedXp { p } => {
                        if k % 4 == 1 {
                            BoundaryPoint::RayEnd
                        } else {
                            let n = 1 + k % 3;
                            BoundaryPoint::sphere(n, unit_direction(*p, n, &mut rng))
                        }
                    }
                })
            };
            let via_t = project(sp, &o, t, &z).unwrap();
            let lhs = project_between(sp, &o, s, t, &via_t, 1e-9).unwrap();
            let rhs = project(sp, &o, s, &z).unwrap();
            worst = worst.max(distance(sp, &lhs, &rhs).unwrap());

            // composition law between finite radii
            let a = point_in_ball(sp, &o, u, &mut rng).unwrap();
            let step = project_between(sp, &o, t, u, &a, 1e-9).unwrap();
            let lhs = project_between(sp, &o, s, t, &step, 1e-9).unwrap();
            let rhs = project_between(sp, &o, s, u, &a, 1e-9).unwrap();
            worst = worst.max(distance(sp, &lhs, &rhs).unwrap());
        }
    }
    assert!(worst < 1e-9, "max coherence deviation {worst}");
}

#[test]
fn criterion_04_higson_builtins() {
    let sp = Space::lp(2.0, 2).unwrap();
    let o = sp.basepoint();
    let params = HigsonParams::default();
    for kind in [
        BuiltinKind::Constant,
        BuiltinKind::Coordinate,
        BuiltinKind::Radial,
        BuiltinKind::Angular,
        BuiltinKind::SinRadial,
    ] {
        let f = Builtin::new(&sp, &o, kind).unwrap();
        let report = higson_certify(&sp, &o, &f, &params).unwrap();
        assert_eq!(report.status, CheckStatus::Pass, "{kind:?} pullback: {report:?}");
        assert_eq!(report.shell_stats.len(), params.shells as usize);
        assert!(report.max_violation < params.epsilon);
    }
    // the raw oscillation, not pulled back, must fail on every shell
    let wiggle = Builtin::new(&sp, &o, BuiltinKind::SinRadial).unwrap();
    let refuted = higson_certify_raw(&sp, &o, &wiggle, &params).unwrap();
    assert_eq!(refuted.status, CheckStatus::Fail);
    assert!(refuted.witness.is_some());
    for shell in &refuted.shell_stats {
        assert!(
            shell.worst >= params.epsilon,
            "no violation at shell radius {}: worst {}",
            shell.radius,
            shell.worst
        );
    }
}

#[test]
fn criterion_05_approximation_bounds() {
    let mut rng = rng_from_seed(23);
    for instance in 0..20 {
        let p = if instance % 2 == 0 { 2.0 } else { 3.0 };
        let sp = Space::lp(p, 2).unwrap();
        let n_v = 4 + instance % 4;
        let labels: Vec<String> = (0..n_v).map(|v| format!("v{v}")).collect();
        let mut faces = Vec::new();
        for _ in 0..(2 + instance % 3) {
            let size = 2 + rng.random_range(0..3usize.min(n_v - 1));
            let mut verts: Vec<usize> = (0..n_v).collect();
            for i in (1..verts.len()).rev() {
                verts.swap(i, rng.random_range(0..=i));
            }
            verts.truncate(size);
            faces.push(verts);
        }
        let cx = SimplicialComplex::from_faces(labels, faces).unwrap();
        let images: Vec<Point> = (0..n_v)
            .map(|_| {
                Point::block(2, vec![6.0 * rng.random::<f64>() - 3.0, 6.0 * rng.random::<f64>() - 3.0])
            })
            .collect();
        let simplices: Vec<Vec<usize>> = cx.simplices().iter().cloned().collect();
        let mut eval = Vec::new();
        for _ in 0..15 {
            let s = simplices[rng.random_range(0..simplices.len())].clone();
            let raw: Vec<f64> = s.iter().map(|_| 0.05 + rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            eval.push(
                BarycentricPoint::new(s, raw.iter().map(|w| w / total).collect()).unwrap(),
            );
        }
        let ca = busecoarse::continuous_approximation(&cx, &images, &sp, &eval).unwrap();
        for point in &ca.points {
            match point {
                ApproxOutcome::Approximated { min_vertex_distance, carrier_distance, .. } => {
                    assert!(
                        *min_vertex_distance < ca.c_bound + 1e-6,
                        "instance {instance}: intermediate {min_vertex_distance} vs C = {}",
                        ca.c_bound
                    );
                    assert!(
                        *carrier_distance < 2.0 * ca.c_bound + 1e-6,
                        "instance {instance}: {carrier_distance} vs 2C = {}",
                        2.0 * ca.c_bound
                    );
                }
                other => panic!("instance {instance}: {other:?}"),
            }
        }
    }
}

#[test]
fn criterion_06_barycenter_oracle() {
    for p in [1.5, 2.0, 3.0] {
        let sp = Space::lp(p, 2).unwrap();
        let mut rng = rng_from_seed(31);
        for config in 0..50 {
            let k = 2 + config % 4;
            let mut coords = Vec::new();
            let mut points = Vec::new();
            for _ in 0..k {
                let c = vec![10.0 * rng.random::<f64>() - 5.0, 10.0 * rng.random::<f64>() - 5.0];
                points.push(Point::block(2, c.clone()));
                coords.push(c);
            }
            let raw: Vec<f64> = (0..k).map(|_| 0.1 + 1.9 * rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let wp = WeightedPoints::new(points, weights.clone()).unwrap();
            let found = match barycenter(&sp, &wp).unwrap() {
                Point::Block { coords, .. } => coords,
                _ => unreachable!(),
            };
            let oracle = common::barycenter_oracle_lp(p, &coords, &weights);
            for j in 0..2 {
                assert!(
                    (found[j] - oracle[j]).abs() < 1e-5,
                    "p={p} config {config}: coordinate {j} {} vs oracle {}",
                    found[j],
                    oracle[j]
                );
            }
            if p == 2.0 {
                for j in 0..2 {
                    let mean: f64 =
                        coords.iter().zip(&weights).map(|(c, w)| w * c[j]).sum();
                    assert!(
                        (found[j] - mean).abs() < 1e-12,
                        "closed form: {} vs {}",
                        found[j],
                        mean
                    );
                }
            }
        }
    }
}

#[test]
fn criterion_07_spherical_metric_law() {
    let half_pi = std::f64::consts::FRAC_PI_2;
    for len in 1..=5usize {
        let labels: Vec<String> = (0..=len).map(|i| format!("p{i}")).collect();
        let faces: Vec<Vec<usize>> = (0..len).map(|i| vec![i, i + 1]).collect();
        let cx = SimplicialComplex::from_faces(labels, faces).unwrap();
        for i in 0..=len {
            for j in (i + 1)..=len {
                let d = spherical_distance(
                    &cx,
                    &BarycentricPoint::vertex(i),
                    &BarycentricPoint::vertex(j),
                    32,
                )
                .unwrap();
                let expect = (j - i) as f64 * half_pi;
                assert!(
                    (d - expect).abs() < 1e-3,
                    "path {len}, {i}->{j}: {d} vs {expect}"
                );
            }
        }
    }
    let triangle = SimplicialComplex::from_faces(
        vec!["a".into(), "b".into(), "c".into()],
        vec![vec![0, 1], vec![1, 2], vec![0, 2]],
    )
    .unwrap();
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let d = spherical_distance(
            &triangle,
            &BarycentricPoint::vertex(i),
            &BarycentricPoint::vertex(j),
            32,
        )
        .unwrap();
        assert!((d - half_pi).abs() < 1e-3, "boundary edge {i}-{j}: {d}");
    }
}

#[test]
fn criterion_08_anti_cech_ladders() {
    // half-line window [0, 27]
    let hl = Space::halfline();
    let window: Vec<Point> = (0..=36).map(|k| Point::ray(k as f64 * 0.75)).collect();
    let sys = anti_cech(&hl, &window, 1.0, 4).unwrap();
    check_ladder(&hl, &sys);

    // tie-break chains: always-smallest vs always-largest containing member
    let mut small = (0..sys.levels[0].cover.members.len()).collect::<Vec<_>>();
    let mut large = small.clone();
    for map in &sys.maps {
        let largest: Vec<usize> =
            map.witnesses.iter().map(|w| *w.candidates.iter().max().unwrap()).collect();
        small = compose_vertex_maps(&map.vertex_map, &small);
        large = compose_vertex_maps(&largest, &large);
    }
    let bottom = &sys.levels[0].nerve;
    let top = &sys.levels.last().unwrap().nerve;
    assert_eq!(simpliciality_failure(bottom, &small, top).unwrap(), None);
    assert_eq!(simpliciality_failure(bottom, &large, top).unwrap(), None);
    let report = is_contiguous(bottom, &small, &large, top).unwrap();
    assert!(report.contiguous, "witness: {:?}", report.witness);

    // plane window: grid points of B(0, 10)
    let sp = Space::lp(2.0, 2).unwrap();
    let mut window = Vec::new();
    let n = (10.0f64 / 1.25).floor() as i64;
    for i in -n..=n {
        for j in -n..=n {
            let (x, y) = (i as f64 * 1.25, j as f64 * 1.25);
            if (x * x + y * y).sqrt() <= 10.0 {
                window.push(Point::block(2, vec![x, y]));
            }
        }
    }
    let sys = anti_cech(&sp, &window, 1.0, 4).unwrap();
    check_ladder(&sp, &sys);
}

fn check_ladder(sp: &Space, sys: &busecoarse::AntiCechSystem) {
    for (i, level) in sys.levels.iter().enumerate() {
        assert!((level.radius - 3.0f64.powi(i as i32)).abs() < 1e-12);
    }
    for (i, map) in sys.maps.iter().enumerate() {
        let this = &sys.levels[i];
        let next = &sys.levels[i + 1];
        for (v, w) in map.witnesses.iter().enumerate() {
            assert_eq!(map.vertex_map[v], w.chosen);
            assert!(w.slack >= 0.0);
            let d = distance(
                sp,
                &this.cover.members[v].center,
                &next.cover.members[w.chosen].center,
            )
            .unwrap();
            assert!(
                d + this.radius <= next.radius + 1e-9,
                "containment fails at level {i} vertex {v}"
            );
        }
        assert_eq!(
            simpliciality_failure(&this.nerve, &map.vertex_map, &next.nerve).unwrap(),
            None,
            "coarsening map at level {i} is not simplicial"
        );
    }
}

#[test]
fn criterion_09_growth_table_and_sandwich() {
    let table = gamma_growth_table(2.0, 2, 2.0, 6).unwrap();
    let counts: Vec<usize> = table.iter().map(|(_, c)| *c).collect();
    assert_eq!(counts, vec![3, 5, 7, 9, 11, 13]);
    for (n, c) in &table {
        let oracle = common::gamma_count_recursive(2.0, 2, *n, 2.0);
        assert_eq!(*c as u64, oracle, "lattice oracle disagrees at n = {n}");
    }

    let plane = Space::lp(2.0, 2).unwrap();
    let l15 = Space::lp(1.5, 2).unwrap();
    let hl = Space::halfline();
    let xp = Space::glued_xp(2.0).unwrap();
    let configs: Vec<(Space, Point, f64, f64, f64)> = vec![
        (plane, plane.basepoint(), 3.0, 0.8, 0.4),
        (l15, l15.basepoint(), 2.5, 0.7, 0.35),
        (hl, Point::ray(5.0), 4.0, 1.0, 0.25),
        (xp, Point::ray(2.0), 3.0, 1.0, 0.5),
    ];
    for (sp, x, r, eps, res) in &configs {
        let pack = packing_number(sp, x, *r, *eps, *res).unwrap().net.points.len();
        let cover = covering_number(sp, x, *r, *eps, *res).unwrap().net.points.len();
        let pack2 = packing_number(sp, x, *r, 2.0 * *eps, *res).unwrap().net.points.len();
        assert!(
            pack >= cover && cover >= pack2,
            "sandwich fails on {sp:?} r={r} eps={eps}: {pack} >= {cover} >= {pack2}"
        );
    }
}

#[test]
fn criterion_10_boundary_k_groups() {
    assert_eq!(xp_boundary_k(0).unwrap(), AbelianGroup::CountableProductOfZ);
    assert_eq!(xp_boundary_k(1).unwrap(), AbelianGroup::CountableProductOfZ);
}
