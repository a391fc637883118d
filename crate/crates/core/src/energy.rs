//! Elliptic distance energy and its reflex-weighted modification.
//!
//! `F` sums, over every edge and every vertex that is not one of its
//! endpoints, the inverse square of `|p - a| + |p - b| - |b - a|`. That
//! quantity vanishes exactly when `p` lies on the segment `ab`, so `F`
//! blows up as a polygon approaches self-contact.
//!
//! The modified energy is `E = (sum_i bump(-theta_i)) * F` with
//! `bump(x) = exp(-1/x^2)` for positive `x`. Only reflex turns contribute, so
//! `E` vanishes exactly on convex polygons.
//!
//! Gradients are taken in reduced coordinates: the first `n - 1` turn
//! angles, with the last one derived from the total turning of `2 pi`. The
//! two closure equations (last vertex at the origin) are handled by
//! projecting onto their tangent space.

use std::f64::consts::TAU;

use nalgebra::Matrix2;

use crate::config_space::is_embedded;
use crate::error::{Error, Result};
use crate::geometry::{
    cross, normalize_angle, turn_angles_from_vertices, vertices_from_turn_angles, PolygonChain, Reconstruction,
    SideLengths, TurnAngles, Vec2,
};

/// Below this argument the bump is flushed to zero.
pub const BUMP_CUTOFF: f64 = 0.01;

/// `exp(-1/x^2)` for `x > 0`, zero otherwise.
pub fn bump(x: f64) -> f64 {
    if x <= BUMP_CUTOFF {
        0.0
    } else {
        (-1.0 / (x * x)).exp()
    }
}

pub fn bump_derivative(x: f64) -> f64 {
    if x <= BUMP_CUTOFF {
        0.0
    } else {
        2.0 / (x * x * x) * (-1.0 / (x * x)).exp()
    }
}

/// Natural log of the bump without the cutoff; `-inf` for `x <= 0`.
pub fn log_bump(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        -1.0 / (x * x)
    }
}

struct Pair {
    edge: usize,
    vertex: usize,
    denom: f64,
}

fn pairs(chain: &PolygonChain) -> impl Iterator<Item = Result<Pair>> + '_ {
    let n = chain.len();
    let v = chain.vertices();
    (0..n).flat_map(move |edge| {
        let a = v[(edge + n - 1) % n];
        let b = v[edge];
        let ab = (b - a).norm();
        (0..n).filter(move |&j| j != edge && j != (edge + n - 1) % n).map(move |vertex| {
            let p = v[vertex];
            let denom = (p - a).norm() + (p - b).norm() - ab;
            if denom > 0.0 {
                Ok(Pair { edge, vertex, denom })
            } else {
                Err(Error::VertexOnEdge { vertex, edge })
            }
        })
    })
}

/// Elliptic distance energy `F`. Edge `i` joins vertices `i - 1` and `i`.
pub fn elliptic_energy(chain: &PolygonChain) -> Result<f64> {
    pairs(chain).try_fold(0.0, |acc, p| p.map(|p| acc + 1.0 / (p.denom * p.denom)))
}

/// `F` and its gradient with respect to each vertex position.
pub fn elliptic_energy_with_gradient(chain: &PolygonChain) -> Result<(f64, Vec<Vec2>)> {
    let n = chain.len();
    let v = chain.vertices();
    let mut grad = vec![Vec2::zeros(); n];
    let mut total = 0.0;
    let unit = |d: Vec2| {
        let r = d.norm();
        if r > 0.0 {
            d / r
        } else {
            Vec2::zeros()
        }
    };
    for pair in pairs(chain) {
        let Pair { edge, vertex, denom } = pair?;
        let ia = (edge + n - 1) % n;
        let (a, b, p) = (v[ia], v[edge], v[vertex]);
        total += 1.0 / (denom * denom);
        let w = -2.0 / (denom * denom * denom);
        let upa = unit(p - a);
        let upb = unit(p - b);
        let uba = unit(b - a);
        grad[vertex] += w * (upa + upb);
        grad[ia] += w * (uba - upa);
        grad[edge] += w * (-upb - uba);
    }
    Ok((total, grad))
}

/// Sum of `bump(-theta_i)` over the turn angles.
pub fn reflex_weight(angles: &TurnAngles) -> f64 {
    angles.as_slice().iter().map(|&t| bump(-t)).sum()
}

/// Modified energy `E = reflex_weight * F` of a closed polygon.
pub fn modified_energy(chain: &PolygonChain) -> Result<f64> {
    let angles = turn_angles_from_vertices(chain)?;
    let f = elliptic_energy(chain)?;
    Ok(reflex_weight(&angles) * f)
}

/// Reduced coordinates: the first `n - 1` turn angles.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCoords {
    pub free_angles: Vec<f64>,
}

impl ReducedCoords {
    pub fn new(free_angles: Vec<f64>) -> Self {
        Self { free_angles }
    }

    /// Coordinates of a counterclockwise closed chain.
    pub fn from_chain(chain: &PolygonChain) -> Result<Self> {
        let mut t = turn_angles_from_vertices(chain)?.0;
        t.pop();
        Ok(Self { free_angles: t })
    }

    /// Last turn angle, fixed by total turning `2 pi`.
    pub fn derived_angle(&self) -> f64 {
        normalize_angle(TAU - self.free_angles.iter().sum::<f64>())
    }

    pub fn turn_angles(&self) -> TurnAngles {
        let mut t = self.free_angles.clone();
        t.push(self.derived_angle());
        TurnAngles(t)
    }

    pub fn reconstruct(&self, lengths: &SideLengths) -> Result<Reconstruction> {
        vertices_from_turn_angles(lengths, &self.turn_angles())
    }
}

/// Gradient of the modified energy in reduced coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGradient {
    pub value: f64,
    /// Partial derivatives with respect to the `n - 1` free angles.
    pub gradient: Vec<f64>,
    /// Component tangent to the closure constraint.
    pub projected_gradient: Vec<f64>,
    /// The two rows of the closure Jacobian.
    pub closure_jacobian: [Vec<f64>; 2],
}

/// Closure defect above which a point is considered off the manifold.
pub fn manifold_tolerance(lengths: &SideLengths) -> f64 {
    1e-9 * lengths.perimeter().max(1.0)
}

fn check_lengths(coords: &ReducedCoords, lengths: &SideLengths) -> Result<()> {
    if coords.free_angles.len() + 1 != lengths.len() {
        return Err(Error::LengthMismatch { expected: lengths.len() - 1, actual: coords.free_angles.len() });
    }
    Ok(())
}

/// `E` on the (possibly open) chain laid out from the reduced coordinates.
pub fn energy_in_coords(coords: &ReducedCoords, lengths: &SideLengths) -> Result<f64> {
    check_lengths(coords, lengths)?;
    let rec = coords.reconstruct(lengths)?;
    let f = elliptic_energy(&rec.chain)?;
    Ok(reflex_weight(&coords.turn_angles()) * f)
}

/// Rows of `d(last vertex)/d(theta_j)`.
pub fn closure_jacobian(chain: &PolygonChain) -> [Vec<f64>; 2] {
    let v = chain.vertices();
    let last = v[v.len() - 1];
    let (mut rx, mut ry) = (Vec::new(), Vec::new());
    for p in &v[..v.len() - 1] {
        let d = last - p;
        rx.push(-d.y);
        ry.push(d.x);
    }
    [rx, ry]
}

/// Removes the closure-Jacobian component of `g`.
pub fn project_tangent(g: &[f64], jac: &[Vec<f64>; 2]) -> Result<Vec<f64>> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let gram = Matrix2::new(dot(&jac[0], &jac[0]), dot(&jac[0], &jac[1]), dot(&jac[1], &jac[0]), dot(&jac[1], &jac[1]));
    let inv = gram.try_inverse().ok_or_else(|| Error::InvalidParameter("closure Jacobian is rank deficient".into()))?;
    let rhs = nalgebra::Vector2::new(dot(&jac[0], g), dot(&jac[1], g));
    let lam = inv * rhs;
    Ok(g.iter().enumerate().map(|(j, &gj)| gj - lam[0] * jac[0][j] - lam[1] * jac[1][j]).collect())
}

/// Chain-rule map from vertex gradients to free-angle gradients: turning at
/// vertex `j` rotates every later vertex about vertex `j`.
fn angle_gradient_from_vertices(chain: &PolygonChain, vgrad: &[Vec2]) -> Vec<f64> {
    let v = chain.vertices();
    let n = v.len();
    let mut out = vec![0.0; n - 1];
    let mut suffix_g = Vec2::zeros();
    let mut suffix_cross = 0.0;
    for j in (0..n - 1).rev() {
        suffix_g += vgrad[j + 1];
        suffix_cross += cross(&v[j + 1], &vgrad[j + 1]);
        out[j] = suffix_cross - cross(&v[j], &suffix_g);
    }
    out
}

/// Derivative of each `-theta_i` with respect to free angle `j`, contracted
/// against per-angle weights: free angles enter with -1, the derived last
/// angle with +1.
fn weight_gradient(weights: &[f64]) -> Vec<f64> {
    let last = weights[weights.len() - 1];
    weights[..weights.len() - 1].iter().map(|&w| -w + last).collect()
}

/// Analytic gradient of `E` at an on-manifold embedded configuration.
pub fn energy_gradient(coords: &ReducedCoords, lengths: &SideLengths) -> Result<EnergyGradient> {
    check_lengths(coords, lengths)?;
    let rec = coords.reconstruct(lengths)?;
    let limit = manifold_tolerance(lengths);
    if rec.closure_defect > limit {
        return Err(Error::OffManifold { defect: rec.closure_defect, limit });
    }
    if !is_embedded(&rec.chain)? {
        return Err(Error::NotEmbedded);
    }
    let grad = raw_gradient(coords, &rec.chain)?;
    let jac = closure_jacobian(&rec.chain);
    let projected_gradient = project_tangent(&grad.1, &jac)?;
    Ok(EnergyGradient { value: grad.0, gradient: grad.1, projected_gradient, closure_jacobian: jac })
}

fn raw_gradient(coords: &ReducedCoords, chain: &PolygonChain) -> Result<(f64, Vec<f64>)> {
    let angles = coords.turn_angles();
    let weight = reflex_weight(&angles);
    let (f, vgrad) = elliptic_energy_with_gradient(chain)?;
    let dweights: Vec<f64> = angles.as_slice().iter().map(|&t| bump_derivative(-t)).collect();
    let dw = weight_gradient(&dweights);
    let df = angle_gradient_from_vertices(chain, &vgrad);
    let g = dw.iter().zip(&df).map(|(a, b)| a * f + weight * b).collect();
    Ok((weight * f, g))
}

/// `ln E` and its gradient. Both stay finite where `E` itself underflows;
/// on convex configurations the value is `-inf` and the gradient zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEnergy {
    pub log_value: f64,
    pub gradient: Vec<f64>,
}

/// `ln E` on the chain laid out from `coords`.
pub fn log_energy_value(coords: &ReducedCoords, chain: &PolygonChain) -> Result<f64> {
    let lw = log_weight(&coords.turn_angles());
    if lw == f64::NEG_INFINITY {
        elliptic_energy(chain)?;
        return Ok(lw);
    }
    Ok(lw + elliptic_energy(chain)?.ln())
}

fn log_weight(angles: &TurnAngles) -> f64 {
    let logs: Vec<f64> = angles.as_slice().iter().map(|&t| log_bump(-t)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + logs.iter().map(|&l| (l - top).exp()).sum::<f64>().ln()
}

/// Gradient of `ln E` with respect to the free angles.
pub fn log_energy_gradient(coords: &ReducedCoords, chain: &PolygonChain) -> Result<LogEnergy> {
    let angles = coords.turn_angles();
    let lw = log_weight(&angles);
    let n = angles.len();
    let (f, vgrad) = elliptic_energy_with_gradient(chain)?;
    if lw == f64::NEG_INFINITY {
        return Ok(LogEnergy { log_value: lw, gradient: vec![0.0; n - 1] });
    }
    // d ln W / d x_i = (2 / x_i^3) * exp(ln bump(x_i) - ln W)
    let dlw: Vec<f64> = angles
        .as_slice()
        .iter()
        .map(|&t| {
            let x = -t;
            if x > 0.0 {
                2.0 / (x * x * x) * (log_bump(x) - lw).exp()
            } else {
                0.0
            }
        })
        .collect();
    let dw = weight_gradient(&dlw);
    let df = angle_gradient_from_vertices(chain, &vgrad);
    let gradient = dw.iter().zip(&df).map(|(a, b)| a + b / f).collect();
    Ok(LogEnergy { log_value: lw + f.ln(), gradient })
}

/// One reflex term of `ln E`: `ln bump(-theta_i) + ln F` and its gradient
/// in the free angles.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEnergyTerm {
    pub vertex: usize,
    pub log_value: f64,
    pub gradient: Vec<f64>,
}

/// Reflex terms within `window` of the largest one. `ln E` is their
/// log-sum-exp, so where several are balanced it behaves like their
/// maximum.
pub fn log_energy_terms(coords: &ReducedCoords, chain: &PolygonChain, window: f64) -> Result<Vec<LogEnergyTerm>> {
    let angles = coords.turn_angles();
    let n = angles.len();
    let (f, vgrad) = elliptic_energy_with_gradient(chain)?;
    let df: Vec<f64> = angle_gradient_from_vertices(chain, &vgrad).into_iter().map(|g| g / f).collect();
    let logs: Vec<f64> = angles.as_slice().iter().map(|&t| log_bump(-t)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(Vec::new());
    }
    Ok((0..n)
        .filter(|&i| logs[i] > f64::NEG_INFINITY && logs[i] >= top - window)
        .map(|i| {
            let x = -angles.as_slice()[i];
            let mut unit = vec![0.0; n];
            unit[i] = 2.0 / (x * x * x);
            let gradient = weight_gradient(&unit).iter().zip(&df).map(|(a, b)| a + b).collect();
            LogEnergyTerm { vertex: i, log_value: logs[i] + f.ln(), gradient }
        })
        .collect())
}

/// Central differences of `E` in each free angle.
pub fn finite_difference_gradient(coords: &ReducedCoords, lengths: &SideLengths, h: f64) -> Result<Vec<f64>> {
    check_lengths(coords, lengths)?;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let eval = |c: &ReducedCoords| -> Result<f64> {
        let rec = c.reconstruct(lengths)?;
        if !is_embedded(&rec.chain)? {
            return Err(Error::PerturbationNotEmbedded);
        }
        energy_in_coords(c, lengths)
    };
    (0..coords.free_angles.len())
        .map(|j| {
            let mut plus = coords.clone();
            plus.free_angles[j] += h;
            let mut minus = coords.clone();
            minus.free_angles[j] -= h;
            Ok((eval(&plus)? - eval(&minus)?) / (2.0 * h))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn chain(p: &[[f64; 2]]) -> PolygonChain {
        PolygonChain::from_xy(p).unwrap()
    }

    #[test]
    fn energy_of_triangle_and_square() {
        let tri = chain(&[[1.0, 0.0], [0.5, 3f64.sqrt() / 2.0], [0.0, 0.0]]);
        assert!((elliptic_energy(&tri).unwrap() - 3.0).abs() < 1e-12);
        let sq = chain(&[[1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]);
        assert!((elliptic_energy(&sq).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn energy_blows_up_near_contact() {
        // vertex 2 approaches edge 0 (from the origin to (2, 0)) from above
        let values: Vec<f64> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&d| elliptic_energy(&chain(&[[2.0, 0.0], [2.0, 2.0], [1.0, d], [0.0, 2.0], [0.0, 0.0]])).unwrap())
            .collect();
        assert!(values[0] < values[1] && values[1] < values[2]);
        assert!(values[2] > 1e10);
    }

    #[test]
    fn vertex_on_edge_errors() {
        let c = chain(&[[2.0, 0.0], [2.0, 2.0], [1.0, 0.0], [0.0, 2.0], [0.0, 0.0]]);
        assert!(matches!(elliptic_energy(&c), Err(Error::VertexOnEdge { vertex: 2, edge: 0 })));
    }

    #[test]
    fn bump_values() {
        assert_eq!(bump(-1.0), 0.0);
        assert_eq!(bump(0.0), 0.0);
        assert!((bump(1.0) - (-1f64).exp()).abs() < 1e-15);
        assert!((bump(0.5) - (-4f64).exp()).abs() < 1e-15);
        assert_eq!(bump(0.005), 0.0);
        assert_eq!(bump_derivative(0.005), 0.0);
        let x = 0.7;
        let fd = (bump(x + 1e-6) - bump(x - 1e-6)) / 2e-6;
        assert!((fd - bump_derivative(x)).abs() < 1e-8);
    }

    #[test]
    fn convex_polygons_have_zero_energy() {
        let sq = chain(&[[1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]);
        assert_eq!(modified_energy(&sq).unwrap(), 0.0);
    }

    #[test]
    fn single_reflex_scales_f() {
        // dart with exactly one reflex vertex
        let c = chain(&[[2.0, 0.0], [2.0, 2.0], [1.0, 0.6], [0.0, 2.0], [0.0, 0.0]]);
        let t = turn_angles_from_vertices(&c).unwrap();
        let reflex: Vec<f64> = t.0.iter().copied().filter(|&x| x < 0.0).collect();
        assert_eq!(reflex.len(), 1);
        let f = elliptic_energy(&c).unwrap();
        let e = modified_energy(&c).unwrap();
        assert!((e - bump(-reflex[0]) * f).abs() <= 1e-15 * e);
    }

    #[test]
    fn chain_rule_matches_differences() {
        let c = chain(&[[2.0, 0.0], [2.0, 2.0], [1.0, 0.6], [0.0, 2.0], [0.0, 0.0]]);
        let l = SideLengths::new(c.side_lengths()).unwrap();
        let coords = ReducedCoords::from_chain(&c).unwrap();
        let g = energy_gradient(&coords, &l).unwrap();
        let fd = finite_difference_gradient(&coords, &l, 1e-6).unwrap();
        let err: f64 = g.gradient.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = fd.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(err / norm < 1e-5, "{err} / {norm}");
        // projected gradient is tangent to the closure constraint
        for row in &g.closure_jacobian {
            let d: f64 = row.iter().zip(&g.projected_gradient).map(|(a, b)| a * b).sum();
            assert!(d.abs() < 1e-9 * norm.max(1.0));
        }
        let lg = log_energy_gradient(&coords, &coords.reconstruct(&l).unwrap().chain).unwrap();
        for (a, b) in lg.gradient.iter().zip(&g.gradient) {
            assert!((a * g.value - b).abs() < 1e-9 * norm);
        }
    }

    #[test]
    fn convex_gradient_vanishes() {
        let l = SideLengths::new(vec![1.0; 5]).unwrap();
        let coords = ReducedCoords::new(vec![2.0 * PI / 5.0; 4]);
        let g = energy_gradient(&coords, &l).unwrap();
        assert!(g.gradient.iter().all(|&x| x == 0.0));
        let fd = finite_difference_gradient(&coords, &l, 1e-6).unwrap();
        assert!(fd.iter().all(|&x| x.abs() < 1e-8));
    }

    #[test]
    fn off_manifold_rejected() {
        let l = SideLengths::new(vec![1.0; 4]).unwrap();
        let coords = ReducedCoords::new(vec![PI / 2.0 + 0.1, PI / 2.0, PI / 2.0]);
        assert!(matches!(energy_gradient(&coords, &l), Err(Error::OffManifold { .. })));
    }
}
