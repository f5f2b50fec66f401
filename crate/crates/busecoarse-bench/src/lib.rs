//! Deterministic fixture builders shared by the benchmark targets.

use busecoarse::sample::{point_in_ball, rng_from_seed};
use busecoarse::{Ball, Cover, Point, Space};

pub fn plane() -> Space {
    Space::lp(2.0, 2).unwrap()
}

pub fn plane_cloud(n: usize, seed: u64) -> Vec<Point> {
    let sp = plane();
    let o = sp.basepoint();
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| point_in_ball(&sp, &o, 8.0, &mut rng).unwrap()).collect()
}

pub fn glued_cloud(n: usize, seed: u64) -> Vec<Point> {
    let sp = Space::glued_xp(2.0).unwrap();
    let o = sp.basepoint();
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| point_in_ball(&sp, &o, 8.0, &mut rng).unwrap()).collect()
}

/// A row of unit balls stepping by half a radius, plus the window of
/// points along their common axis.
pub fn row_cover(k: usize) -> (Cover, Vec<Point>) {
    let sp = plane();
    let members = (0..k)
        .map(|i| Ball { center: Point::block(2, vec![i as f64 * 0.5, 0.0]), radius: 1.0 })
        .collect();
    let cover = Cover::new(sp, members).unwrap();
    let window = (0..=(k * 5))
        .map(|j| Point::block(2, vec![j as f64 * 0.1, 0.0]))
        .filter(|p| match p {
            Point::Block { coords, .. } => coords[0] <= (k - 1) as f64 * 0.5,
            _ => false,
        })
        .collect();
    (cover, window)
}

pub fn weighted_config(k: usize, seed: u64) -> (Vec<Point>, Vec<f64>) {
    let points = plane_cloud(k, seed);
    let raw: Vec<f64> = (0..k).map(|i| 0.2 + ((i * 37 + 11) % 19) as f64 / 19.0).collect();
    let total: f64 = raw.iter().sum();
    (points, raw.iter().map(|w| w / total).collect())
}
