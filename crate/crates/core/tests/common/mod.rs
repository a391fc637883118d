#![allow(dead_code)]

use std::f64::consts::TAU;

use polylink::config_space::{classify, is_generic};
use polylink::geometry::canonicalize;
use polylink::{PolygonChain, SideLengths, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Feasible, generic lengths in [0.5, 2] whose longest side is at most
/// `slack` times the sum of the others.
pub fn random_lengths(rng: &mut impl Rng, n: usize, slack: f64) -> SideLengths {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let total: f64 = v.iter().sum();
        let max = v.iter().cloned().fold(0.0, f64::max);
        if max > slack * (total - max) {
            continue;
        }
        let l = SideLengths::new(v).unwrap();
        if is_generic(&l).unwrap() {
            return l;
        }
    }
}

/// A canonical counterclockwise star-shaped polygon: vertices sorted by
/// polar angle around the origin, so it is always simple.
pub fn star_polygon(rng: &mut impl Rng, n: usize) -> PolygonChain {
    loop {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let gaps_ok = (0..n).all(|i| {
            let next = if i + 1 == n { angles[0] + TAU } else { angles[i + 1] };
            let gap = next - angles[i];
            gap > 0.15 && gap < 0.85 * std::f64::consts::PI
        });
        if !gaps_ok {
            continue;
        }
        let v: Vec<Vec2> = angles.iter().map(|&a| rng.gen_range(0.4..1.6) * Vec2::new(a.cos(), a.sin())).collect();
        let chain = PolygonChain::new(v).unwrap();
        if chain.side_lengths().iter().any(|&l| l < 0.1) {
            continue;
        }
        let chain = canonicalize(&chain).unwrap();
        let class = classify(&chain).unwrap();
        if class.embedded && class.is_ccw() {
            return chain;
        }
    }
}

/// Star-shaped polygon with a reflex turn of at least `-max_min_turn`.
pub fn nonconvex_polygon(rng: &mut impl Rng, n: usize, max_min_turn: f64) -> PolygonChain {
    loop {
        let p = star_polygon(rng, n);
        let lengths = SideLengths::new(p.side_lengths()).unwrap();
        if classify(&p).unwrap().min_turn <= max_min_turn && is_generic(&lengths).unwrap() {
            return p;
        }
    }
}

/// Strictly convex counterclockwise quadrilateral.
pub fn convex_quad(rng: &mut impl Rng) -> [Vec2; 4] {
    loop {
        let mut angles: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.0..TAU));
        angles.sort_by(f64::total_cmp);
        let q: [Vec2; 4] = std::array::from_fn(|i| {
            let r = rng.gen_range(0.8..1.2);
            r * Vec2::new(angles[i].cos(), angles[i].sin())
        });
        let t = polylink::atlas::quad_turn_angles(&q);
        if t.iter().all(|&a| a > 0.2 && a < 2.8) {
            return q;
        }
    }
}

/// Grid cells of the turn angle after `prefix` that extend to a convex
/// configuration, with the remaining free angles on the same grid.
pub fn oracle_cells(lengths: &SideLengths, prefix: &[f64], grid: usize) -> Vec<usize> {
    let mut hit = vec![false; grid];
    polylink::config_space::for_each_configuration(lengths, prefix, grid, |s| {
        if s.class.convex_ccw {
            hit[s.grid_index[0]] = true;
        }
    })
    .unwrap();
    (0..grid).filter(|&i| hit[i]).collect()
}

pub fn is_contiguous(cells: &[usize]) -> bool {
    cells.windows(2).all(|w| w[1] == w[0] + 1)
}

/// Largest displacement (within 1e-9) the expansive move allows from `q`.
pub fn max_expansive_delta(q: &[Vec2; 4]) -> f64 {
    let (mut lo, mut hi) = (0.0, 10.0 * (q[2] - q[0]).norm());
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if polylink::atlas::quadrilateral_expansive_step(q, mid).is_ok() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Refined oracle for the turn angle after `prefix`. The uniform grid
/// misses thin slivers of the convex region, so coarse cells are refined:
/// empty cells between feasible ones and cells past either end are probed by
/// scanning the remaining free angles `factor` times finer, inside the
/// bounding box (plus a margin) of a feasible neighbor. Only sampling is
/// used. Returns `(cells, lo, hi)` with the refined cell set.
pub fn oracle_bounds(lengths: &SideLengths, prefix: &[f64], grid: usize, factor: usize) -> (Vec<usize>, f64, f64) {
    use polylink::config_space::{close_chain, for_each_configuration, grid_value};
    let inner = lengths.len() - 4 - prefix.len();
    assert!((1..=2).contains(&inner), "one or two remaining free angles");
    type Boxed = Option<Vec<(f64, f64)>>;
    let grow = |b: &mut Boxed, v: &[f64]| match b {
        Some(r) => r.iter_mut().zip(v).for_each(|(r, &x)| *r = (r.0.min(x), r.1.max(x))),
        None => *b = Some(v.iter().map(|&x| (x, x)).collect()),
    };
    let mut boxes: Vec<Boxed> = vec![None; grid];
    for_each_configuration(lengths, prefix, grid, |s| {
        if s.class.convex_ccw {
            grow(&mut boxes[s.grid_index[0]], &s.free_angles[prefix.len() + 1..]);
        }
    })
    .unwrap();
    let h = TAU / grid as f64 / factor as f64;
    let margin = 4.0 * TAU / grid as f64;
    let probe = |target: f64, window: &[(f64, f64)]| -> Boxed {
        let axes: Vec<Vec<f64>> = window
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (a - margin, b + margin);
                (0..=((b - a) / h).ceil() as usize).map(|s| a + s as f64 * h).collect()
            })
            .collect();
        let mut found: Boxed = None;
        let mut point = vec![0.0; inner];
        let mut idx = vec![0usize; inner];
        loop {
            for d in 0..inner {
                point[d] = axes[d][idx[d]];
            }
            let mut free = prefix.to_vec();
            free.push(target);
            free.extend(&point);
            let convex = close_chain(lengths, &free)
                .map(|cs| cs.iter().any(|(_, c)| classify(c).map(|k| k.convex_ccw).unwrap_or(false)))
                .unwrap_or(false);
            if convex {
                grow(&mut found, &point);
            }
            let mut d = 0;
            loop {
                if d == inner {
                    return found;
                }
                idx[d] += 1;
                if idx[d] < axes[d].len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    };
    let coarse: Vec<usize> = (0..grid).filter(|&i| boxes[i].is_some()).collect();
    if coarse.is_empty() {
        return (coarse, f64::NAN, f64::NAN);
    }
    let (first, last) = (coarse[0], *coarse.last().unwrap());
    // gaps: probe with the union of the neighboring feasible boxes
    for i in first + 1..last {
        if boxes[i].is_none() {
            let below = (first..i).rev().find_map(|j| boxes[j].clone()).unwrap();
            let above = (i + 1..=last).find_map(|j| boxes[j].clone()).unwrap();
            let window: Vec<(f64, f64)> = below.iter().zip(&above).map(|(a, b)| (a.0.min(b.0), a.1.max(b.1))).collect();
            boxes[i] = probe(grid_value(i, grid), &window);
        }
    }
    // ends: follow the region outward while it stays feasible
    let mut lo = first;
    while lo > 0 {
        match probe(grid_value(lo - 1, grid), boxes[lo].as_ref().unwrap()) {
            Some(b) => {
                boxes[lo - 1] = Some(b);
                lo -= 1;
            }
            None => break,
        }
    }
    let mut hi = last;
    while hi + 1 < grid {
        match probe(grid_value(hi + 1, grid), boxes[hi].as_ref().unwrap()) {
            Some(b) => {
                boxes[hi + 1] = Some(b);
                hi += 1;
            }
            None => break,
        }
    }
    let cells: Vec<usize> = (0..grid).filter(|&i| boxes[i].is_some()).collect();
    (cells, grid_value(lo, grid), grid_value(hi, grid))
}
