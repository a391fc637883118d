//! Predicates on the configuration space of a closed linkage, the
//! straight-line criterion, local turn-angle charts and the brute-force
//! configuration oracle.

mod chart;
mod oracle;
mod straight_line;

pub use chart::{reconstruct_from_partial_angles, select_chart_indices};
pub use oracle::{
    close_chain, enumerate_configurations, for_each_configuration, grid_value, ConfigSample, ConfigSampleSet,
    ElbowBranch, ORACLE_MAX_SIDES,
};
pub use straight_line::{
    default_tolerance, is_generic, straight_line_sign_vectors, StraightLineReport, MAX_EXHAUSTIVE_SIDES,
};

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::Result;
use crate::geometry::{
    segment_intersection_eps, turn_angles_from_vertices, PolygonChain, SegmentRelation, TurnAngles, Vec2,
};

/// Slack on the nonnegativity of turn angles for convexity.
pub const CONVEX_SLACK: f64 = 1e-9;
/// Slack on the total turning of an embedded polygon.
pub const WINDING_TOL: f64 = 1e-6;

/// Embeddedness, winding and convexity of a closed chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigClass {
    pub embedded: bool,
    /// Sum of the turn angles.
    pub winding: f64,
    pub convex_ccw: bool,
    pub min_turn: f64,
    #[serde(skip)]
    pub turn_angles: TurnAngles,
}

impl ConfigClass {
    /// Winding as an integer number of full turns, when it is one.
    pub fn turning_number(&self) -> Option<i64> {
        let k = (self.winding / TAU).round();
        ((self.winding - k * TAU).abs() < WINDING_TOL).then_some(k as i64)
    }

    pub fn is_ccw(&self) -> bool {
        (self.winding - TAU).abs() < WINDING_TOL
    }
}

/// Classifies a closed chain. Edges whose distance is within the segment
/// predicate epsilon count as touching, so near-contacts are reported as
/// not embedded.
pub fn classify(chain: &PolygonChain) -> Result<ConfigClass> {
    let turn_angles = turn_angles_from_vertices(chain)?;
    let winding = turn_angles.total();
    let min_turn = turn_angles.min();
    let embedded = is_embedded(chain)?;
    let convex_ccw = embedded && (winding - TAU).abs() < WINDING_TOL && min_turn >= -CONVEX_SLACK;
    Ok(ConfigClass { embedded, winding, convex_ccw, min_turn, turn_angles })
}

/// True when edges meet only at shared endpoints of adjacent edges.
pub fn is_embedded(chain: &PolygonChain) -> Result<bool> {
    let n = chain.len();
    let s = chain.scale();
    let eps = 1e-12 * s * s;
    let v = chain.vertices();
    let seg = |i: usize| (v[(i + n - 1) % n], v[i]);
    for i in 0..n {
        let (a, b) = seg(i);
        for j in i + 1..n {
            let (c, d) = seg(j);
            let rel = segment_intersection_eps(a, b, c, d, eps)?;
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let ok = if adjacent { rel == SegmentRelation::EndpointTouch } else { rel == SegmentRelation::Disjoint };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Smallest distance between two non-adjacent edges: zero when any pair
/// meets, infinite for triangles.
pub fn clearance(chain: &PolygonChain) -> Result<f64> {
    let n = chain.len();
    let s = chain.scale();
    let eps = 1e-12 * s * s;
    let v = chain.vertices();
    let seg = |i: usize| (v[(i + n - 1) % n], v[i]);
    let point_to_segment = |p: Vec2, a: Vec2, b: Vec2| {
        let ab = b - a;
        let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
        (p - (a + t * ab)).norm()
    };
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (a, b) = seg(i);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = seg(j);
            if segment_intersection_eps(a, b, c, d, eps)? != SegmentRelation::Disjoint {
                return Ok(0.0);
            }
            let dist = point_to_segment(a, c, d)
                .min(point_to_segment(b, c, d))
                .min(point_to_segment(c, a, b))
                .min(point_to_segment(d, a, b));
            best = best.min(dist);
        }
    }
    Ok(best)
}

/// Polygon inequality: the longest side is strictly shorter than the sum of
/// the others.
pub fn is_feasible(lengths: &crate::SideLengths) -> bool {
    let max = lengths.as_slice().iter().copied().fold(0.0, f64::max);
    max < lengths.perimeter() - max
}
