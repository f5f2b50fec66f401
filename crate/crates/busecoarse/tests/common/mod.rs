//! Oracles shared by the integration suites. Each one recomputes a
//! quantity by a route independent of the library's own code path, so a
//! bug would have to appear twice, in different algorithms, to slip by.

#![allow(dead_code)]

use busecoarse::{Point, Space};

/// p-th power sum without going through the library norm helpers.
fn pow_sum(p: f64, v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs().powf(p)).sum()
}

fn raw_lp(p: f64, a: &[f64], b: &[f64]) -> f64 {
    if p.is_infinite() {
        return a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Distance in the glued space by explicit shortest path over a graph:
/// nodes are the two query points plus one gluing node per block seen,
/// edges exist only inside a single convex piece (one block, or the ray),
/// and the answer is a two-hop Dijkstra run by hand. Blocks attach to the
/// ray at integer positions equal to their dimension.
pub fn glued_distance_oracle(p: f64, a: &Point, b: &Point) -> f64 {
    #[derive(Clone)]
    enum Node {
        Ray(f64),
        Block(usize, Vec<f64>),
    }
    let node = |pt: &Point| match pt {
        Point::Ray { t } => Node::Ray(*t),
        Point::Block { n, coords } => Node::Block(*n, coords.clone()),
    };
    let mut nodes = vec![node(a), node(b)];
    for pt in [a, b] {
        if let Point::Block { n, .. } = pt {
            nodes.push(Node::Ray(*n as f64));
        }
    }
    let direct = |u: &Node, v: &Node| -> Option<f64> {
        match (u, v) {
            (Node::Ray(s), Node::Ray(t)) => Some((s - t).abs()),
            (Node::Block(m, x), Node::Block(n, y)) if m == n => Some(raw_lp(p, x, y)),
            (Node::Block(n, x), Node::Ray(t)) | (Node::Ray(t), Node::Block(n, x))
                if *t == *n as f64 =>
            {
                Some(raw_lp(p, x, &vec![0.0; *n]))
            }
            _ => None,
        }
    };
    let n = nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[0] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for i in 0..n {
            if !done[i] && dist[i] < best {
                best = dist[i];
                u = i;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        for v in 0..n {
            if let Some(w) = direct(&nodes[u], &nodes[v]) {
                if dist[u] + w < dist[v] {
                    dist[v] = dist[u] + w;
                }
            }
        }
    }
    dist[1]
}

/// Weighted barycenter in l_p by derivative-free coordinate descent:
/// golden-section line searches on each coordinate in turn until the
/// iterate stops moving. Convex smooth objective, so this converges to
/// the same minimizer the library finds by gradient steps.
pub fn barycenter_oracle_lp(p: f64, points: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let dim = points[0].len();
    let wsum: f64 = weights.iter().sum();
    let objective = |c: &[f64]| -> f64 {
        points
            .iter()
            .zip(weights)
            .map(|(x, w)| {
                let d: f64 = x.iter().zip(c).map(|(xi, ci)| (xi - ci).abs().powf(p)).sum();
                w * d.powf(2.0 / p)
            })
            .sum()
    };
    // start at the weighted l_2 mean; the minimizer lies in the hull
    let mut c: Vec<f64> = (0..dim)
        .map(|j| points.iter().zip(weights).map(|(x, w)| w * x[j]).sum::<f64>() / wsum)
        .collect();
    let golden = |c: &mut Vec<f64>, j: usize| {
        let lo0 = points.iter().map(|x| x[j]).fold(f64::INFINITY, f64::min) - 1.0;
        let hi0 = points.iter().map(|x| x[j]).fold(f64::NEG_INFINITY, f64::max) + 1.0;
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (lo0, hi0);
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let eval = |c: &mut Vec<f64>, j: usize, v: f64, f: &dyn Fn(&[f64]) -> f64| {
            let old = c[j];
            c[j] = v;
            let y = f(c);
            c[j] = old;
            y
        };
        let mut f1 = eval(c, j, x1, &objective);
        let mut f2 = eval(c, j, x2, &objective);
        while hi - lo > 1e-12 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = eval(c, j, x1, &objective);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = eval(c, j, x2, &objective);
            }
        }
        c[j] = 0.5 * (lo + hi);
    };
    for _ in 0..400 {
        let before = c.clone();
        for j in 0..dim {
            golden(&mut c, j);
        }
        let moved =
            c.iter().zip(&before).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if moved < 1e-12 {
            break;
        }
    }
    c
}

/// Lattice count by recursion over coordinates: vectors of (k Z)^n with
/// p-norm at most r, counted by peeling one coordinate and passing the
/// remaining budget down. Independent of the box-scan the library uses.
pub fn gamma_count_recursive(p: f64, k: u32, n: usize, r: f64) -> u64 {
    fn rec(p: f64, k: f64, dims_left: usize, budget: f64) -> u64 {
        if budget < -1e-9 {
            return 0;
        }
        if dims_left == 0 {
            return 1;
        }
        let mut total = 0;
        let m_max = (budget.max(0.0).powf(1.0 / p) / k).floor() as i64;
        for m in -m_max..=m_max {
            let used = (k * m.abs() as f64).powf(p);
            total += rec(p, k, dims_left - 1, budget - used);
        }
        total
    }
    rec(p, k as f64, n, r.powf(p) + 1e-9)
}

/// Builds the glued space, panicking on bad parameters (test fixture).
pub fn xp(p: f64) -> Space {
    Space::glued_xp(p).unwrap()
}
