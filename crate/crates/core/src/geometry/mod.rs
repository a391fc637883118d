//! Chains, turn angles and the canonical frame.
//!
//! Indexing is zero-based throughout the crate. Vertex `i` is joined to
//! vertex `i - 1` (cyclically) by edge `i`, whose length is `lengths[i]`.
//! The turn angle at vertex `i` is the signed angle from edge `i` to edge
//! `i + 1`. In the canonical frame the last vertex sits at the origin and
//! vertex 0 lies on the positive x-axis, so edge 0 always points along +x.

mod predicates;

pub use predicates::{
    circle_circle_intersection, orientation, segment_intersection, segment_intersection_eps, CircleIntersection,
    SegmentRelation,
};

use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or displacement in the plane.
pub type Vec2 = Vector2<f64>;

/// Absolute tolerance for geometric equalities on unit-scale data.
pub const GEOM_TOL: f64 = 1e-9;

/// 2D cross product (z-component).
#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Quarter turn counterclockwise.
#[inline]
pub fn perp(v: &Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// Maps an angle into the half-open interval (-pi, pi].
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    // rem_euclid can round up to exactly TAU
    if t <= -PI {
        t += TAU;
    }
    t
}

/// Signed angle from `a` to `b`, in (-pi, pi].
pub fn signed_angle(a: &Vec2, b: &Vec2) -> f64 {
    let t = cross(a, b).atan2(a.dot(b));
    if t <= -PI {
        PI
    } else {
        t
    }
}

/// Ordered positive side lengths of a closed linkage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SideLengths(Vec<f64>);

impl SideLengths {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() < 3 {
            return Err(Error::TooFewSides(lengths.len()));
        }
        for (index, &value) in lengths.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidLength { index, value });
            }
        }
        Ok(Self(lengths))
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

    pub fn perimeter(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Sum of `lengths[range]`.
    pub fn span(&self, range: std::ops::Range<usize>) -> f64 {
        self.0[range].iter().sum()
    }

    /// Lengths rotated so that entry `shift` comes first.
    pub fn rotated(&self, shift: usize) -> Self {
        let mut v = self.0.clone();
        v.rotate_left(shift % self.0.len());
        Self(v)
    }
}

impl std::ops::Index<usize> for SideLengths {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for SideLengths {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SideLengths> for Vec<f64> {
    fn from(l: SideLengths) -> Self {
        l.0
    }
}

/// Signed turn angles, one per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TurnAngles(pub Vec<f64>);

impl TurnAngles {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Vertices of a closed polygon. The closing edge from the last vertex back
/// to vertex 0 is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonChain {
    vertices: Vec<Vec2>,
}

impl PolygonChain {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::TooFewSides(vertices.len()));
        }
        Ok(Self { vertices })
    }

    pub fn from_xy(points: &[[f64; 2]]) -> Result<Self> {
        Self::new(points.iter().map(|p| Vec2::new(p[0], p[1])).collect())
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.vertices.len()]
    }

    /// Edge `i`, from vertex `i - 1` to vertex `i`.
    pub fn edge(&self, i: usize) -> Vec2 {
        let n = self.vertices.len();
        self.vertices[i % n] - self.vertices[(i + n - 1) % n]
    }

    pub fn side_lengths(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.edge(i).norm()).collect()
    }

    pub fn to_xy(&self) -> Vec<[f64; 2]> {
        self.vertices.iter().map(|p| [p.x, p.y]).collect()
    }

    /// Last vertex at the origin exactly, vertex 0 on the nonnegative x-axis.
    pub fn is_canonical(&self) -> bool {
        let last = self.vertices[self.len() - 1];
        let first = self.vertices[0];
        last.x == 0.0 && last.y == 0.0 && first.y.abs() <= 1e-12 && first.x >= 0.0
    }

    /// Largest deviation of the edge lengths from `lengths`.
    pub fn length_error(&self, lengths: &SideLengths) -> f64 {
        self.side_lengths().iter().zip(lengths.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Mirror image in the x-axis.
    pub fn reflected(&self) -> Self {
        Self { vertices: self.vertices.iter().map(|p| Vec2::new(p.x, -p.y)).collect() }
    }

    /// Scale for tolerance purposes: the larger bounding-box side.
    pub fn scale(&self) -> f64 {
        let (mut lo, mut hi) = (self.vertices[0], self.vertices[0]);
        for p in &self.vertices {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let d = hi - lo;
        d.x.max(d.y)
    }
}

/// Result of [`vertices_from_turn_angles`]: the chain together with the
/// distance of its last vertex from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub chain: PolygonChain,
    pub closure_defect: f64,
}

/// Lays out the chain edge by edge from vertex 0 = (l_0, 0), turning by the
/// given angles. Closure is not enforced; the last vertex is wherever the
/// walk ends.
pub fn vertices_from_turn_angles(lengths: &SideLengths, angles: &TurnAngles) -> Result<Reconstruction> {
    let n = lengths.len();
    if angles.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: angles.len() });
    }
    let mut vertices = Vec::with_capacity(n);
    let mut p = Vec2::new(lengths[0], 0.0);
    let mut heading = 0.0;
    vertices.push(p);
    for j in 1..n {
        heading += angles.0[j - 1];
        p += lengths[j] * Vec2::new(heading.cos(), heading.sin());
        vertices.push(p);
    }
    let closure_defect = p.norm();
    Ok(Reconstruction { chain: PolygonChain { vertices }, closure_defect })
}

/// Signed turn angle at every vertex, each in (-pi, pi].
pub fn turn_angles_from_vertices(chain: &PolygonChain) -> Result<TurnAngles> {
    let n = chain.len();
    let edges: Vec<Vec2> = (0..n).map(|i| chain.edge(i)).collect();
    if let Some(i) = edges.iter().position(|e| e.x == 0.0 && e.y == 0.0) {
        return Err(Error::DegenerateEdge(i));
    }
    Ok(TurnAngles((0..n).map(|i| signed_angle(&edges[i], &edges[(i + 1) % n])).collect()))
}

/// Translates the last vertex to the origin and rotates vertex 0 onto the
/// positive x-axis.
pub fn canonicalize(chain: &PolygonChain) -> Result<PolygonChain> {
    let n = chain.len();
    let origin = chain.vertices[n - 1];
    let first = chain.vertices[0] - origin;
    let r = first.norm();
    if r == 0.0 {
        return Err(Error::DegenerateEdge(0));
    }
    let (c, s) = (first.x / r, first.y / r);
    let mut vertices: Vec<Vec2> = chain
        .vertices
        .iter()
        .map(|p| {
            let d = p - origin;
            Vec2::new(c * d.x + s * d.y, -s * d.x + c * d.y)
        })
        .collect();
    vertices[n - 1] = Vec2::zeros();
    vertices[0] = Vec2::new(r, 0.0);
    Ok(PolygonChain { vertices })
}
