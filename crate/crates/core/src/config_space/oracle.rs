//! Brute-force sampling of the configuration space.
//!
//! The first n - 3 turn angles are free; the two remaining edges close the
//! chain back to the origin through a circle intersection (the "elbow"),
//! and both elbow branches are kept.

use std::f64::consts::PI;

use serde::Serialize;

use super::{classify, ConfigClass};
use crate::error::{Error, Result};
use crate::geometry::{circle_circle_intersection, CircleIntersection, PolygonChain, SideLengths, TurnAngles, Vec2};

/// The oracle is meant for desk-scale linkages only.
pub const ORACLE_MAX_SIDES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ElbowBranch {
    /// Elbow to the left of the line from vertex n-3 to the origin.
    Left,
    Right,
    /// The two branches coincide.
    Tangent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSample {
    pub grid_index: Vec<usize>,
    pub free_angles: Vec<f64>,
    pub branch: ElbowBranch,
    pub turn_angles: TurnAngles,
    pub chain: PolygonChain,
    pub class: ConfigClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSampleSet {
    pub grid: usize,
    pub samples: Vec<ConfigSample>,
}

/// Grid cell `i` of `grid` cells over (-pi, pi]; the last cell is pi.
pub fn grid_value(i: usize, grid: usize) -> f64 {
    if i + 1 == grid {
        PI
    } else {
        // exact zero on even grids
        PI * ((2 * (i + 1)) as f64 - grid as f64) / grid as f64
    }
}

/// Closes a chain whose first n - 3 turn angles are `free`. Returns every
/// elbow solution (zero, one or two).
pub fn close_chain(lengths: &SideLengths, free: &[f64]) -> Result<Vec<(ElbowBranch, PolygonChain)>> {
    let n = lengths.len();
    if free.len() != n - 3 {
        return Err(Error::LengthMismatch { expected: n - 3, actual: free.len() });
    }
    let mut v = Vec::with_capacity(n);
    v.push(Vec2::new(lengths[0], 0.0));
    let mut heading = 0.0;
    for (j, &t) in free.iter().enumerate() {
        heading += t;
        let last = v[j];
        v.push(last + lengths[j + 1] * Vec2::new(heading.cos(), heading.sin()));
    }
    let base = v[n - 3];
    if base == Vec2::zeros() {
        return Ok(vec![]);
    }
    let elbows = match circle_circle_intersection(base, lengths[n - 2], Vec2::zeros(), lengths[n - 1])? {
        CircleIntersection::Empty => vec![],
        CircleIntersection::Tangent(p) => vec![(ElbowBranch::Tangent, p)],
        CircleIntersection::Two(l, r) => vec![(ElbowBranch::Left, l), (ElbowBranch::Right, r)],
    };
    elbows
        .into_iter()
        .map(|(b, p)| {
            let mut w = v.clone();
            w.push(p);
            w.push(Vec2::zeros());
            Ok((b, PolygonChain::new(w)?))
        })
        .collect()
}

/// Visits every closed configuration whose first turn angles equal
/// `prefix` and whose remaining free angles lie on the grid, in
/// grid-major, branch-minor order. The `grid_index` of a sample covers the
/// gridded angles only.
pub fn for_each_configuration(
    lengths: &SideLengths,
    prefix: &[f64],
    grid: usize,
    mut visit: impl FnMut(ConfigSample),
) -> Result<()> {
    let n = lengths.len();
    if !(3..=ORACLE_MAX_SIDES).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: 3, max: ORACLE_MAX_SIDES });
    }
    if prefix.len() > n - 3 {
        return Err(Error::PrefixLength { len: prefix.len(), n });
    }
    if grid == 0 {
        return Err(Error::InvalidParameter("grid must be positive".into()));
    }
    let dims = n - 3 - prefix.len();
    let tol = 1e-9 * lengths.perimeter().max(1.0);
    let mut idx = vec![0usize; dims];
    let mut free: Vec<f64> = prefix.to_vec();
    free.resize(n - 3, 0.0);
    loop {
        for (k, &i) in idx.iter().enumerate() {
            free[prefix.len() + k] = grid_value(i, grid);
        }
        for (branch, chain) in close_chain(lengths, &free)? {
            if chain.length_error(lengths) > tol {
                continue;
            }
            let class = classify(&chain)?;
            visit(ConfigSample {
                grid_index: idx.clone(),
                free_angles: free.clone(),
                branch,
                turn_angles: class.turn_angles.clone(),
                chain,
                class,
            });
        }
        // odometer, last index fastest
        let mut k = dims;
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < grid {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Every grid configuration of a linkage with 3 to 6 sides.
pub fn enumerate_configurations(lengths: &SideLengths, grid_per_angle: usize) -> Result<ConfigSampleSet> {
    let mut samples = Vec::new();
    for_each_configuration(lengths, &[], grid_per_angle, |s| samples.push(s))?;
    Ok(ConfigSampleSet { grid: grid_per_angle, samples })
}
