use super::{cross, perp, Vec2};
use crate::error::{Error, Result};

/// Intersection of two circles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleIntersection {
    Empty,
    Tangent(Vec2),
    /// Two points; the first lies to the left of the directed line from the
    /// first center to the second.
    Two(Vec2, Vec2),
}

impl CircleIntersection {
    pub fn points(&self) -> Vec<Vec2> {
        match *self {
            Self::Empty => vec![],
            Self::Tangent(p) => vec![p],
            Self::Two(l, r) => vec![l, r],
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Self::Empty)
    }
}

/// Intersects the circle of radius `r1` about `c1` with the circle of radius
/// `r2` about `c2`. Tangency is declared within `1e-9 * (r1 + r2)`.
pub fn circle_circle_intersection(c1: Vec2, r1: f64, c2: Vec2, r2: f64) -> Result<CircleIntersection> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(Error::InvalidParameter(format!("radii must be positive ({r1}, {r2})")));
    }
    let delta = c2 - c1;
    let d = delta.norm();
    if d == 0.0 {
        return Err(Error::CoincidentCenters);
    }
    let tol = 1e-9 * (r1 + r2);
    let outer = r1 + r2;
    let inner = (r1 - r2).abs();
    if d > outer + tol || d < inner - tol {
        return Ok(CircleIntersection::Empty);
    }
    let u = delta / d;
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    if (d - outer).abs() <= tol || (d - inner).abs() <= tol {
        let a = a.clamp(-r1, r1);
        return Ok(CircleIntersection::Tangent(c1 + a * u));
    }
    let h = ((r1 - a) * (r1 + a)).max(0.0).sqrt();
    let base = c1 + a * u;
    let off = h * perp(&u);
    Ok(CircleIntersection::Two(base + off, base - off))
}

/// How two closed segments meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentRelation {
    Disjoint,
    /// Interiors cross at a single point.
    ProperCrossing,
    /// A single common point that is an endpoint of at least one segment.
    EndpointTouch,
    /// Collinear with a shared piece of positive length.
    Overlap,
}

/// Sign of the turn a -> b -> c, with |area| <= eps counted as collinear.
pub fn orientation(a: &Vec2, b: &Vec2, c: &Vec2, eps: f64) -> i8 {
    let area = cross(&(b - a), &(c - a));
    if area > eps {
        1
    } else if area < -eps {
        -1
    } else {
        0
    }
}

/// [`segment_intersection_eps`] with the area epsilon set to
/// `1e-12 * s^2`, where `s` is the bounding-box scale of the four points.
pub fn segment_intersection(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> Result<SegmentRelation> {
    let lo = a.inf(&b).inf(&c).inf(&d);
    let hi = a.sup(&b).sup(&c).sup(&d);
    let s = (hi - lo).max();
    segment_intersection_eps(a, b, c, d, 1e-12 * s * s)
}

/// Classifies segments `ab` and `cd` with orientation tests.
pub fn segment_intersection_eps(a: Vec2, b: Vec2, c: Vec2, d: Vec2, eps: f64) -> Result<SegmentRelation> {
    if a == b || c == d {
        return Err(Error::DegenerateSegment);
    }
    let o1 = orientation(&a, &b, &c, eps);
    let o2 = orientation(&a, &b, &d, eps);
    let o3 = orientation(&c, &d, &a, eps);
    let o4 = orientation(&c, &d, &b, eps);

    if o1 == 0 && o2 == 0 {
        return Ok(collinear_relation(a, b, c, d, eps));
    }
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return Ok(SegmentRelation::ProperCrossing);
    }
    let touches = (o1 == 0 && within_box(&a, &b, &c, eps))
        || (o2 == 0 && within_box(&a, &b, &d, eps))
        || (o3 == 0 && within_box(&c, &d, &a, eps))
        || (o4 == 0 && within_box(&c, &d, &b, eps));
    Ok(if touches { SegmentRelation::EndpointTouch } else { SegmentRelation::Disjoint })
}

fn within_box(a: &Vec2, b: &Vec2, p: &Vec2, eps: f64) -> bool {
    let len = (b - a).norm();
    let slack = eps / len;
    p.x >= a.x.min(b.x) - slack
        && p.x <= a.x.max(b.x) + slack
        && p.y >= a.y.min(b.y) - slack
        && p.y <= a.y.max(b.y) + slack
}

fn collinear_relation(a: Vec2, b: Vec2, c: Vec2, d: Vec2, eps: f64) -> SegmentRelation {
    let dir = b - a;
    let len = dir.norm();
    let u = dir / len;
    let t = |p: &Vec2| (p - a).dot(&u);
    let (c0, c1) = {
        let (x, y) = (t(&c), t(&d));
        (x.min(y), x.max(y))
    };
    let lo = c0.max(0.0);
    let hi = c1.min(len);
    let slack = eps / len;
    if hi - lo > slack {
        SegmentRelation::Overlap
    } else if hi - lo >= -slack {
        SegmentRelation::EndpointTouch
    } else {
        SegmentRelation::Disjoint
    }
}
