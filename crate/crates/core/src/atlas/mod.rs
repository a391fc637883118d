//! Turn-angle atlas of the convex configurations.
//!
//! Fix the turn angles `alpha` at vertices `0..m`. The admissible turn
//! angles at vertex `m` over all convex completions form a closed interval
//! `[nu, mu]`. Its ends are attained by stretched configurations:
//!
//! * minimal: either the turn at `m` is zero, or the tail from vertex
//!   `m + 1` to the origin is one straight segment;
//! * maximal: the run from vertex `m` to some vertex `j` is straight and
//!   every vertex after `j + 1` is flat, i.e. lies on the negative x-axis.
//!
//! Both are found by direct circle-intersection constructions rather than by
//! simulating the deformations that reach them.

mod quad;
mod stretched;

pub use quad::{quad_turn_angles, quadrilateral_expansive_step};
pub use stretched::{StretchedWitness, WitnessKind, FLAT_TOL};

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::config_space::is_generic;
use crate::error::{Error, Result};
use crate::geometry::SideLengths;

/// Slack used when testing prefix membership.
pub const MEMBERSHIP_SLACK: f64 = 1e-9;

/// Turn angles at the first vertices of a convex polygon.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AnglePrefix(Vec<f64>);

impl AnglePrefix {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        let mut sum = 0.0;
        for &a in &alpha {
            if !(0.0..PI).contains(&a) {
                return Err(Error::InvalidParameter(format!("prefix angle {a} outside [0, pi)")));
            }
            sum += a;
            if sum > TAU + 1e-9 {
                return Err(Error::InvalidParameter("prefix turns more than a full circle".into()));
            }
        }
        Ok(Self(alpha))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn require_generic(lengths: &SideLengths) -> Result<()> {
    if is_generic(lengths)? {
        Ok(())
    } else {
        Err(Error::NotGeneric)
    }
}

fn require_member(lengths: &SideLengths, alpha: &AnglePrefix) -> Result<()> {
    if alpha.len() + 3 > lengths.len() {
        return Err(Error::PrefixLength { len: alpha.len(), n: lengths.len() });
    }
    if membership(lengths, alpha.as_slice())? {
        Ok(())
    } else {
        Err(Error::PrefixNotInAtlas)
    }
}

/// Smallest convex turn angle at vertex `alpha.len()` given the prefix.
pub fn min_turn_angle(lengths: &SideLengths, alpha: &AnglePrefix) -> Result<(f64, StretchedWitness)> {
    require_generic(lengths)?;
    require_member(lengths, alpha)?;
    stretched::minimal(lengths, alpha.as_slice())
}

/// Largest convex turn angle at vertex `alpha.len()` given the prefix.
pub fn max_turn_angle(lengths: &SideLengths, alpha: &AnglePrefix) -> Result<(f64, StretchedWitness)> {
    require_generic(lengths)?;
    require_member(lengths, alpha)?;
    stretched::maximal(lengths, alpha.as_slice())
}

/// Whether `alpha` is the start of the turn-angle sequence of some convex
/// polygon with these side lengths (up to [`MEMBERSHIP_SLACK`]).
pub fn contains_prefix(lengths: &SideLengths, alpha: &[f64]) -> Result<bool> {
    require_generic(lengths)?;
    membership(lengths, alpha)
}

fn membership(lengths: &SideLengths, alpha: &[f64]) -> Result<bool> {
    let n = lengths.len();
    if alpha.len() + 2 > n {
        return Err(Error::PrefixLength { len: alpha.len(), n });
    }
    for m in 0..alpha.len() {
        let a = alpha[m];
        if !(-MEMBERSHIP_SLACK..PI).contains(&a) {
            return Ok(false);
        }
        let (nu, mu) = match interval(lengths, &alpha[..m]) {
            Ok(pair) => pair,
            Err(Error::PrefixNotInAtlas | Error::NoStretchedCandidate(_)) => return Ok(false),
            Err(e) => return Err(e),
        };
        if a < nu - MEMBERSHIP_SLACK || a > mu + MEMBERSHIP_SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

fn interval(lengths: &SideLengths, alpha: &[f64]) -> Result<(f64, f64)> {
    let (nu, _) = stretched::minimal(lengths, alpha)?;
    let (mu, _) = stretched::maximal(lengths, alpha)?;
    Ok((nu, mu))
}

/// One sampled prefix with the interval of admissible next turn angles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtlasRow {
    pub prefix: Vec<f64>,
    pub nu: f64,
    pub mu: f64,
    /// Index of each prefix entry within its sampled interval.
    pub grid_index: Vec<usize>,
    pub min_witness: StretchedWitness,
    pub max_witness: StretchedWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtlasSample {
    /// Level: rows describe the turn angle at vertex `k - 1`.
    pub k: usize,
    pub grid: usize,
    pub rows: Vec<AtlasRow>,
}

/// Samples the atlas down to level `k`: each earlier interval is sampled at
/// `grid` evenly spaced points including both ends, and every resulting
/// prefix gets a row with its interval and witnesses. Levels up to `n - 2`
/// are accepted; at `n - 2` the interval is a single point.
pub fn sample_atlas(lengths: &SideLengths, k: usize, grid: usize) -> Result<AtlasSample> {
    let n = lengths.len();
    if k == 0 || k + 2 > n {
        return Err(Error::InvalidParameter(format!("level {k} outside 1..={}", n - 2)));
    }
    if k > 1 && grid < 2 {
        return Err(Error::InvalidParameter("grid must be at least 2".into()));
    }
    require_generic(lengths)?;

    let mut prefixes: Vec<(Vec<f64>, Vec<usize>)> = vec![(vec![], vec![])];
    for _ in 1..k {
        let mut next = Vec::with_capacity(prefixes.len() * grid);
        for (p, gi) in &prefixes {
            let (nu, mu) = interval(lengths, p)?;
            for i in 0..grid {
                let t = if i + 1 == grid { mu } else { nu + (mu - nu) * i as f64 / (grid - 1) as f64 };
                let mut q = p.clone();
                q.push(t);
                let mut g = gi.clone();
                g.push(i);
                next.push((q, g));
            }
        }
        prefixes = next;
    }

    let rows = prefixes
        .into_iter()
        .map(|(prefix, grid_index)| {
            let (nu, min_witness) = stretched::minimal(lengths, &prefix)?;
            let (mu, max_witness) = stretched::maximal(lengths, &prefix)?;
            Ok(AtlasRow { prefix, nu, mu, grid_index, min_witness, max_witness })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AtlasSample { k, grid, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lens(v: &[f64]) -> SideLengths {
        SideLengths::new(v.to_vec()).unwrap()
    }

    #[test]
    fn prefix_validation() {
        assert!(AnglePrefix::new(vec![0.5, 1.0]).is_ok());
        assert!(AnglePrefix::new(vec![-0.1]).is_err());
        assert!(AnglePrefix::new(vec![PI]).is_err());
        assert!(AnglePrefix::new(vec![3.0, 3.0, 3.0]).is_err());
    }

    #[test]
    fn membership_examples() {
        let l = lens(&[2.0, 2.0, 2.0, 1.0]);
        assert!(contains_prefix(&l, &[1.8]).unwrap());
        assert!(!contains_prefix(&l, &[0.5]).unwrap());
        let tri = lens(&[1.0, 1.0, 1.0]);
        assert!(contains_prefix(&tri, &[2.0 * PI / 3.0]).unwrap());
        assert!(!contains_prefix(&tri, &[2.0]).unwrap());
    }

    #[test]
    fn non_generic_rejected() {
        let l = lens(&[6.0, 4.0, 2.0, 4.0]);
        assert_eq!(contains_prefix(&l, &[1.0]), Err(Error::NotGeneric));
        assert_eq!(min_turn_angle(&l, &AnglePrefix::empty()).map(|r| r.0), Err(Error::NotGeneric));
    }

    #[test]
    fn prefix_outside_atlas_rejected() {
        let l = lens(&[2.0, 2.0, 2.0, 1.0]);
        let a = AnglePrefix::new(vec![0.5]).unwrap();
        assert!(matches!(min_turn_angle(&l, &a), Err(Error::PrefixNotInAtlas)));
        assert!(matches!(max_turn_angle(&l, &a), Err(Error::PrefixNotInAtlas)));
        let long = AnglePrefix::new(vec![1.8, 1.0]).unwrap();
        assert!(matches!(min_turn_angle(&l, &long), Err(Error::PrefixLength { .. })));
    }

    #[test]
    fn single_interval_atlas() {
        let l = lens(&[2.0, 2.0, 2.0, 1.0]);
        let a = sample_atlas(&l, 1, 100).unwrap();
        assert_eq!(a.rows.len(), 1);
        let row = &a.rows[0];
        assert!((row.nu - (PI - (-0.125f64).acos())).abs() < 1e-9);
        assert!((row.mu - 1.75f64.sqrt().atan2(-1.5)).abs() < 1e-9);
    }

    #[test]
    fn degenerate_triangle_atlas() {
        let a = sample_atlas(&lens(&[1.0, 1.0, 1.0]), 1, 10).unwrap();
        assert_eq!(a.rows.len(), 1);
        assert!((a.rows[0].nu - a.rows[0].mu).abs() < 1e-12);
        assert!((a.rows[0].nu - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn pentagon_atlas_rows_are_members() {
        let l = lens(&[1.0; 5]);
        let a = sample_atlas(&l, 2, 50).unwrap();
        assert_eq!(a.rows.len(), 50);
        for row in &a.rows {
            assert!(row.nu <= row.mu + 1e-12);
            assert!(contains_prefix(&l, &row.prefix).unwrap(), "{:?}", row.prefix);
        }
    }

    #[test]
    fn atlas_level_bounds() {
        let l = lens(&[1.0; 5]);
        assert!(sample_atlas(&l, 0, 10).is_err());
        assert!(sample_atlas(&l, 4, 10).is_err());
    }
}
