use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{circle_circle_intersection, cross, signed_angle, CircleIntersection, Vec2};

/// Turn angles of the closed quadrilateral `q[0] q[1] q[2] q[3]`.
pub fn quad_turn_angles(q: &[Vec2; 4]) -> [f64; 4] {
    std::array::from_fn(|i| {
        let a = q[i] - q[(i + 3) % 4];
        let b = q[(i + 1) % 4] - q[i];
        signed_angle(&a, &b)
    })
}

fn strictly_convex(q: &[Vec2; 4]) -> bool {
    let t = quad_turn_angles(q);
    t.iter().all(|&a| a > 0.0 && a < PI) && (t.iter().sum::<f64>() - TAU).abs() < 1e-9
}

/// Pushes `q[2]` straight away from `q[0]` by `delta` and re-seats `q[1]`
/// and `q[3]` on their original sides of the diagonal. Turn angles at
/// `q[0]` and `q[2]` grow while those at `q[1]` and `q[3]` shrink; the
/// move is blocked once any of them would leave (0, pi).
pub fn quadrilateral_expansive_step(q: &[Vec2; 4], delta: f64) -> Result<[Vec2; 4]> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be a nonnegative number, got {delta}")));
    }
    if !strictly_convex(q) {
        return Err(Error::NotStrictlyConvex);
    }
    if delta == 0.0 {
        return Ok(*q);
    }
    let a = q[0];
    let diag = q[2] - a;
    let c = q[2] + delta * diag / diag.norm();

    let reseat = |p: Vec2| -> Result<Vec2> {
        let side = cross(&diag, &(p - a)).signum();
        match circle_circle_intersection(a, (p - a).norm(), c, (q[2] - p).norm())? {
            CircleIntersection::Two(l, r) => Ok(if side > 0.0 { l } else { r }),
            CircleIntersection::Tangent(_) => Err(Error::MotionBlocked("a side pair straightens".into())),
            CircleIntersection::Empty => Err(Error::MotionBlocked("diagonal exceeds the sum of adjacent sides".into())),
        }
    };
    let out = [a, reseat(q[1])?, c, reseat(q[3])?];
    if !strictly_convex(&out) {
        return Err(Error::MotionBlocked("a turn angle leaves (0, pi)".into()));
    }
    Ok(out)
}
