//! Local coordinates near a configuration: all turn angles except three.
//!
//! The omitted vertices q < r < s split the polygon into three rigid
//! subchains. The one running from s through the fixed edge 0 to q is
//! already placed in the canonical frame; the other two only contribute
//! their chord lengths, which pin vertex r to one of two circle
//! intersections. The orientation of (q, r, s) picks between them.

use crate::error::{Error, Result};
use crate::geometry::{circle_circle_intersection, cross, CircleIntersection, PolygonChain, SideLengths, Vec2};

/// Indices of the three turn angles with largest magnitude, ascending.
pub fn select_chart_indices(angles: &[f64]) -> [usize; 3] {
    let mut idx: Vec<usize> = (0..angles.len()).collect();
    idx.sort_by(|&a, &b| angles[b].abs().total_cmp(&angles[a].abs()).then(a.cmp(&b)));
    let mut out = [idx[0], idx[1], idx[2]];
    out.sort_unstable();
    out
}

/// Rebuilds the closed chain from the turn angles at every vertex except
/// `omitted = [q, r, s]`. `orientation` is the sign of the triangle
/// (p_q, p_r, p_s).
pub fn reconstruct_from_partial_angles(
    lengths: &SideLengths,
    partial: &[(usize, f64)],
    omitted: [usize; 3],
    orientation: i8,
) -> Result<PolygonChain> {
    let n = lengths.len();
    let [q, r, s] = omitted;
    if !(q < r && r < s && s < n) {
        return Err(Error::InvalidIndices(format!("need q < r < s < {n}, got {omitted:?}")));
    }
    if orientation != 1 && orientation != -1 {
        return Err(Error::InvalidParameter(format!("orientation must be +1 or -1, got {orientation}")));
    }
    let mut theta = vec![f64::NAN; n];
    for &(i, t) in partial {
        if i >= n || omitted.contains(&i) || !theta[i].is_nan() {
            return Err(Error::InvalidIndices(format!("unexpected or repeated angle index {i}")));
        }
        theta[i] = t;
    }
    if partial.len() != n - 3 {
        return Err(Error::InvalidIndices(format!("expected {} angles, got {}", n - 3, partial.len())));
    }

    let dir = |h: f64| Vec2::new(h.cos(), h.sin());
    let mut v = vec![Vec2::zeros(); n];

    // rigid subchain s -> ... -> n-1 -> 0 -> ... -> q, in place
    v[0] = Vec2::new(lengths[0], 0.0);
    let mut heading = 0.0;
    for i in 0..q {
        heading += theta[i];
        v[i + 1] = v[i] + lengths[i + 1] * dir(heading);
    }
    let mut heading = 0.0;
    for i in (s + 1..n).rev() {
        // heading of edge i from that of edge i+1
        heading -= theta[i];
        v[i - 1] = v[i] - lengths[i] * dir(heading);
    }

    let local = |from: usize, to: usize| -> Vec<Vec2> {
        let mut pts = vec![Vec2::zeros()];
        let mut h = 0.0;
        for i in from + 1..=to {
            if i > from + 1 {
                h += theta[i - 1];
            }
            let last = *pts.last().unwrap();
            pts.push(last + lengths[i] * dir(h));
        }
        pts
    };
    let qr = local(q, r);
    let rs = local(r, s);
    let chord_qr = qr.last().unwrap().norm();
    let chord_rs = rs.last().unwrap().norm();
    if chord_qr == 0.0 || chord_rs == 0.0 {
        return Err(Error::NoClosure);
    }

    let vr = match circle_circle_intersection(v[q], chord_qr, v[s], chord_rs)? {
        CircleIntersection::Empty => return Err(Error::NoClosure),
        CircleIntersection::Tangent(_) => return Err(Error::AmbiguousTangency),
        CircleIntersection::Two(a, b) => {
            let sign = |p: &Vec2| cross(&(p - v[q]), &(v[s] - v[q])).signum() as i8;
            if sign(&a) == orientation {
                a
            } else {
                b
            }
        }
    };
    v[r] = vr;

    let place = |pts: &[Vec2], start: Vec2, end: Vec2, v: &mut [Vec2], first: usize| {
        let chord = *pts.last().unwrap();
        let target = end - start;
        let rot = target.y.atan2(target.x) - chord.y.atan2(chord.x);
        let (sn, cs) = rot.sin_cos();
        for (k, p) in pts.iter().enumerate().skip(1).take(pts.len() - 2) {
            v[first + k] = start + Vec2::new(cs * p.x - sn * p.y, sn * p.x + cs * p.y);
        }
    };
    place(&qr, v[q], v[r], &mut v, q);
    place(&rs, v[r], v[s], &mut v, r);
    PolygonChain::new(v)
}
