//! Seeded point samplers. Every randomised sweep in the toolkit draws its
//! points through this module from an explicit `ChaCha8Rng`, so identical
//! seeds reproduce identical runs on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::space::{distance, lp_norm, validate_point, Point, Space};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller; avoids a distributions dependency.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random::<f64>().max(1e-12);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// A unit vector for the `l_p` norm with isotropic direction.
pub fn unit_direction(p: f64, dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| normal(rng)).collect();
        let n = lp_norm(p, &v);
        if n > 1e-9 {
            return v.iter().map(|c| c / n).collect();
        }
    }
}

/// A random point of the closed ball `B(o, radius)` in `space`.
///
/// The draw has full support on the ball but is not uniform; sweeps only
/// need coverage, not uniformity. In the glued space the component is
/// chosen among the ray and every block whose gluing point is within
/// reach (capped at 64 candidate blocks).
pub fn point_in_ball(space: &Space, o: &Point, radius: f64, rng: &mut ChaCha8Rng) -> Result<Point> {
    let o = validate_point(space, o)?;
    let pt = match space {
        Space::Lp { p, dim } | Space::RawLp { p, dim } => {
            let dir = unit_direction(*p, *dim, rng);
            let r = radius * rng.random::<f64>().powf(1.0 / *dim as f64);
            let base = match &o {
                Point::Block { coords, .. } => coords.clone(),
                _ => unreachable!(),
            };
            Point::block(*dim, base.iter().zip(&dir).map(|(c, d)| c + r * d).collect())
        }
        Space::Halfline => {
            let t = match &o {
                Point::Ray { t } => *t,
                _ => unreachable!(),
            };
            let lo = (t - radius).max(0.0);
            let hi = t + radius;
            Point::ray(lo + (hi - lo) * rng.random::<f64>())
        }
        Space::GluedXp { p } => {
            // Candidate components: the ray, the component of o, and every
            // block whose gluing point lies within the budget.
            let ray_pos = |pt: &Point| match pt {
                Point::Ray { t } => *t,
                Point::Block { n, .. } => *n as f64,
            };
            let own_block = match &o {
                Point::Block { n, .. } => Some(*n),
                _ => None,
            };
            let center = ray_pos(&o);
            let base_cost = match &o {
                Point::Block { coords, .. } => lp_norm(*p, coords),
                _ => 0.0,
            };
            let mut blocks: Vec<usize> = Vec::new();
            let lo = ((center - (radius - base_cost)).ceil().max(1.0)) as i64;
            let hi = (center + (radius - base_cost)).floor() as i64;
            if radius > base_cost {
                for n in lo..=hi {
                    if n >= 1 {
                        blocks.push(n as usize);
                        if blocks.len() >= 64 {
                            break;
                        }
                    }
                }
            }
            // 0 = ray, 1 = own block (if any), 2 = reachable foreign block.
            let choice = rng.random_range(0..3u32);
            match (choice, own_block) {
                (1, Some(n)) => {
                    let coords = match &o {
                        Point::Block { coords, .. } => coords.clone(),
                        _ => unreachable!(),
                    };
                    let dir = unit_direction(*p, n, rng);
                    let r = radius * rng.random::<f64>();
                    let cand: Vec<f64> = coords.iter().zip(&dir).map(|(c, d)| c + r * d).collect();
                    let cand = Point::block(n, cand);
                    if distance(space, &o, &cand)? <= radius {
                        cand.canonical()
                    } else {
                        // fall back to a ray point within reach
                        sample_ray_near(center, base_cost, radius, rng)
                    }
                }
                (2, _) if !blocks.is_empty() => {
                    let n = blocks[rng.random_range(0..blocks.len())];
                    let budget = radius - base_cost - (center - n as f64).abs();
                    if budget <= 0.0 {
                        sample_ray_near(center, base_cost, radius, rng)
                    } else {
                        let dir = unit_direction(*p, n, rng);
                        let r = budget * rng.random::<f64>();
                        Point::block(n, dir.iter().map(|d| r * d).collect()).canonical()
                    }
                }
                _ => sample_ray_near(center, base_cost, radius, rng),
            }
        }
    };
    Ok(pt)
}

fn sample_ray_near(center: f64, base_cost: f64, radius: f64, rng: &mut ChaCha8Rng) -> Point {
    let reach = (radius - base_cost).max(0.0);
    let lo = (center - reach).max(0.0);
    let hi = center + reach;
    Point::ray(lo + (hi - lo) * rng.random::<f64>())
}

/// A random point at distance exactly `r` from the canonical basepoint.
/// Used for shell sweeps. For the glued space the point lies either on the
/// ray or inside a reachable block (gluing coordinate below `r`).
pub fn point_on_shell(space: &Space, r: f64, rng: &mut ChaCha8Rng) -> Point {
    match space {
        Space::Lp { p, dim } | Space::RawLp { p, dim } => {
            let dir = unit_direction(*p, *dim, rng);
            Point::block(*dim, dir.iter().map(|d| r * d).collect())
        }
        Space::Halfline => Point::ray(r),
        Space::GluedXp { p } => {
            let max_block = (r.floor() as usize).min(8);
            let pick = rng.random_range(0..=max_block);
            if pick == 0 {
                Point::ray(r)
            } else {
                let dir = unit_direction(*p, pick, rng);
                let rem = r - pick as f64;
                Point::block(pick, dir.iter().map(|d| rem * d).collect()).canonical()
            }
        }
    }
}
