//! Convexification by projected descent of the modified energy.
//!
//! Iterates live in reduced coordinates (the first `n - 1` turn angles), so
//! side lengths hold by construction and only the two closure equations
//! need enforcing. Each step moves along the normalized, closure-projected
//! negative gradient, re-closes the chain by Gauss-Newton, and is accepted
//! only if the energy drops and the polygon is still embedded; otherwise
//! the step is shortened.
//!
//! Descent runs on `ln E`. It has the same descent directions as `E` but
//! stays representable when the reflex weight underflows, which happens as
//! soon as every reflex angle is smaller than about 0.037 rad.
//!
//! Where several reflex terms of `ln E` are balanced, the energy has a
//! ridge of width about `|theta|^3` and plain gradient steps zig-zag across
//! it with vanishing length. When the gradient line search collapses, the
//! step along the minimum-norm point of the hull of the balanced terms'
//! gradients (the direction the continuous flow slides along the ridge) is
//! tried as well, and the better of the two is kept.

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::config_space::{classify, is_embedded, is_generic};
use crate::energy::{
    closure_jacobian, elliptic_energy, log_energy_gradient, log_energy_terms, log_energy_value, project_tangent,
    reflex_weight, ReducedCoords,
};
use crate::error::{Error, Result};
use crate::geometry::{canonicalize, PolygonChain, SideLengths, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowParams {
    /// Largest step, in radians of turn-angle change.
    pub step: f64,
    /// Factor applied to the step after a rejected trial.
    pub backtrack: f64,
    /// Converged once every turn angle is at least `-convexity_tol`.
    pub convexity_tol: f64,
    pub max_iterations: usize,
    /// Keep a polygon snapshot every this many accepted steps.
    pub snapshot_stride: usize,
    /// Closure tolerance, relative to `max(1, perimeter)`.
    pub closure_tol: f64,
    pub closure_max_iter: usize,
    /// Give up once a trial step falls below this.
    pub min_step: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            step: 1e-2,
            backtrack: 0.5,
            convexity_tol: 1e-6,
            max_iterations: 100_000,
            snapshot_stride: 1,
            closure_tol: 1e-12,
            closure_max_iter: 50,
            min_step: 1e-14,
        }
    }
}

impl FlowParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.step, self.convexity_tol, self.closure_tol, self.min_step];
        if positive.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidParameter("steps and tolerances must be positive".into()));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidParameter(format!("backtrack factor {} not in (0, 1)", self.backtrack)));
        }
        if self.snapshot_stride == 0 || self.closure_max_iter == 0 {
            return Err(Error::InvalidParameter("stride and iteration limits must be positive".into()));
        }
        Ok(())
    }
}

/// Moves free angles onto the closure constraint by Gauss-Newton with
/// minimum-norm steps, using the default tolerance and iteration limit.
pub fn project_to_closure(free_angles: &[f64], lengths: &SideLengths) -> Result<Vec<f64>> {
    let p = FlowParams::default();
    project_to_closure_with(free_angles, lengths, p.closure_tol, p.closure_max_iter)
}

pub fn project_to_closure_with(
    free_angles: &[f64],
    lengths: &SideLengths,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    if free_angles.len() + 1 != lengths.len() {
        return Err(Error::LengthMismatch { expected: lengths.len() - 1, actual: free_angles.len() });
    }
    let tol = tol * lengths.perimeter().max(1.0);
    let mut coords = ReducedCoords::new(free_angles.to_vec());
    let first = coords.reconstruct(lengths)?;
    let limit = 0.1 * lengths.perimeter();
    if first.closure_defect >= limit {
        return Err(Error::OffManifold { defect: first.closure_defect, limit });
    }
    for _ in 0..=max_iter {
        let rec = coords.reconstruct(lengths)?;
        if rec.closure_defect < tol {
            return Ok(coords.free_angles);
        }
        let last = *rec.chain.vertices().last().unwrap();
        let jac = closure_jacobian(&rec.chain);
        // minimum-norm solution of J * d = -defect
        let g = [
            jac[0].iter().map(|x| x * x).sum::<f64>(),
            jac[0].iter().zip(&jac[1]).map(|(a, b)| a * b).sum::<f64>(),
            jac[1].iter().map(|x| x * x).sum::<f64>(),
        ];
        let det = g[0] * g[2] - g[1] * g[1];
        if det.abs() <= f64::EPSILON * (g[0] * g[2]).max(f64::MIN_POSITIVE) {
            return Err(Error::ClosureDiverged(max_iter));
        }
        let lx = (g[2] * -last.x - g[1] * -last.y) / det;
        let ly = (-g[1] * -last.x + g[0] * -last.y) / det;
        for (j, a) in coords.free_angles.iter_mut().enumerate() {
            *a += lx * jac[0][j] + ly * jac[1][j];
        }
    }
    Err(Error::ClosureDiverged(max_iter))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    ConvergedConvex,
    MaxIterations,
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowRecord {
    pub iteration: usize,
    /// `E`, which underflows to zero near convexity.
    pub energy: f64,
    /// `ln E`; strictly decreasing along accepted steps.
    pub log_energy: f64,
    pub min_turn: f64,
    /// Accepted step length (zero for the initial record).
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub iteration: usize,
    #[serde(serialize_with = "chain_xy")]
    pub chain: PolygonChain,
}

fn chain_xy<S: Serializer>(c: &PolygonChain, s: S) -> std::result::Result<S::Ok, S::Error> {
    c.to_xy().serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowTrace {
    pub status: FlowStatus,
    /// The input was clockwise and was mirrored in the x-axis first.
    pub reflected: bool,
    /// Whether the side lengths are free of straight-line configurations.
    pub generic: bool,
    pub lengths: Vec<f64>,
    pub accepted_steps: usize,
    pub records: Vec<FlowRecord>,
    pub snapshots: Vec<Snapshot>,
}

impl FlowTrace {
    pub fn final_chain(&self) -> &PolygonChain {
        &self.snapshots.last().expect("trace always has a snapshot").chain
    }
}

struct State {
    coords: ReducedCoords,
    chain: PolygonChain,
    log_energy: f64,
}

impl State {
    fn energy(&self) -> f64 {
        reflex_weight(&self.coords.turn_angles()) * elliptic_energy(&self.chain).unwrap_or(f64::INFINITY)
    }

    fn min_turn(&self) -> f64 {
        self.coords.turn_angles().min()
    }
}

/// Lays out a closed chain from on-manifold coordinates, with the last
/// vertex pinned to the origin.
fn closed_chain(coords: &ReducedCoords, lengths: &SideLengths) -> Result<PolygonChain> {
    let rec = coords.reconstruct(lengths)?;
    let mut v: Vec<Vec2> = rec.chain.vertices().to_vec();
    let last = v.len() - 1;
    v[last] = Vec2::zeros();
    PolygonChain::new(v)
}

fn prepare(chain: &PolygonChain, params: &FlowParams) -> Result<(State, SideLengths, bool)> {
    params.validate()?;
    let class = classify(chain)?;
    if !class.embedded {
        return Err(Error::NotEmbedded);
    }
    let reflected = class.winding < 0.0;
    let oriented = if reflected { chain.reflected() } else { chain.clone() };
    let canonical = canonicalize(&oriented)?;
    let lengths = SideLengths::new(canonical.side_lengths())?;
    let coords = ReducedCoords::from_chain(&canonical)?;
    let free = project_to_closure_with(&coords.free_angles, &lengths, params.closure_tol, params.closure_max_iter)?;
    let coords = ReducedCoords::new(free);
    let chain = closed_chain(&coords, &lengths)?;
    let log_energy = log_energy_value(&coords, &chain)?;
    Ok((State { coords, chain, log_energy }, lengths, reflected))
}

/// Normalized closure-tangent direction of `ln E`'s gradient, or `None`
/// when it vanishes.
fn tangent_direction(state: &State) -> Result<Option<Vec<f64>>> {
    let lg = log_energy_gradient(&state.coords, &state.chain)?;
    let projected = project_tangent(&lg.gradient, &closure_jacobian(&state.chain))?;
    let norm = projected.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Ok(None);
    }
    Ok(Some(projected.into_iter().map(|x| x / norm).collect()))
}

/// Terms of `ln E` within this many units of the largest count as balanced.
const RIDGE_WINDOW: f64 = 20.0;
/// At most this many balanced terms enter the hull.
const RIDGE_TERMS: usize = 8;
/// A gradient step shorter than this fraction of the largest step counts
/// as collapsed.
const RIDGE_STEP_FRACTION: f64 = 1e-3;

/// Minimum-norm point of the convex hull of `g`, by trying the affine hull
/// of every subset and keeping the shortest point that is optimal.
fn min_norm_hull(g: &[Vec<f64>]) -> Option<Vec<f64>> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let k = g.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let m = idx.len();
        let mut a = DMatrix::zeros(m + 1, m + 1);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                a[(r, c)] = dot(&g[i], &g[j]);
            }
            a[(r, m)] = 1.0;
            a[(m, r)] = 1.0;
        }
        let mut b = DVector::zeros(m + 1);
        b[m] = 1.0;
        let Some(sol) = a.lu().solve(&b) else { continue };
        if sol.iter().take(m).any(|&l| l < -1e-12 || !l.is_finite()) {
            continue;
        }
        let mut d = vec![0.0; g[0].len()];
        for (r, &i) in idx.iter().enumerate() {
            for (dj, gj) in d.iter_mut().zip(&g[i]) {
                *dj += sol[r] * gj;
            }
        }
        let nn = dot(&d, &d);
        let optimal = g.iter().all(|gj| dot(gj, &d) >= nn * (1.0 - 1e-9) - 1e-300);
        if optimal && best.as_ref().is_none_or(|(b, _)| nn < *b) {
            best = Some((nn, d));
        }
    }
    best.map(|(_, d)| d)
}

/// Normalized sliding direction along a ridge of balanced reflex terms, or
/// `None` when fewer than two terms are balanced.
fn ridge_direction(state: &State) -> Result<Option<Vec<f64>>> {
    let mut terms = log_energy_terms(&state.coords, &state.chain, RIDGE_WINDOW)?;
    if terms.len() < 2 {
        return Ok(None);
    }
    terms.sort_by(|a, b| b.log_value.total_cmp(&a.log_value));
    terms.truncate(RIDGE_TERMS);
    let jac = closure_jacobian(&state.chain);
    let projected = terms.iter().map(|t| project_tangent(&t.gradient, &jac)).collect::<Result<Vec<_>>>()?;
    let Some(d) = min_norm_hull(&projected) else { return Ok(None) };
    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Ok(None);
    }
    Ok(Some(d.into_iter().map(|x| -x / norm).collect()))
}

/// Backtracking from `t`: the first trial that lowers `ln E`, with its step.
fn line_search(
    state: &State,
    descent: &[f64],
    mut t: f64,
    lengths: &SideLengths,
    params: &FlowParams,
) -> Option<(State, f64)> {
    while t >= params.min_step {
        match trial(state, descent, t, lengths, params) {
            Some(s) if s.log_energy < state.log_energy => return Some((s, t)),
            _ => t *= params.backtrack,
        }
    }
    None
}

/// Re-closed, embedded trial state at `coords + t * dir`, if there is one.
fn trial(state: &State, dir: &[f64], t: f64, lengths: &SideLengths, params: &FlowParams) -> Option<State> {
    let moved: Vec<f64> = state.coords.free_angles.iter().zip(dir).map(|(a, d)| a + t * d).collect();
    let free = project_to_closure_with(&moved, lengths, params.closure_tol, params.closure_max_iter).ok()?;
    let coords = ReducedCoords::new(free);
    let chain = closed_chain(&coords, lengths).ok()?;
    if !is_embedded(&chain).ok()? {
        return None;
    }
    let log_energy = log_energy_value(&coords, &chain).ok()?;
    Some(State { coords, chain, log_energy })
}

/// Runs the descent until every turn angle is within `convexity_tol` of
/// nonnegative, the iteration budget runs out, or no admissible step is
/// left. Clockwise inputs are mirrored first.
pub fn convexify(chain: &PolygonChain, params: &FlowParams) -> Result<FlowTrace> {
    let (mut state, lengths, reflected) = prepare(chain, params)?;
    let generic = is_generic(&lengths).unwrap_or(false);

    let record = |s: &State, iteration: usize, step: f64| FlowRecord {
        iteration,
        energy: s.energy(),
        log_energy: s.log_energy,
        min_turn: s.min_turn(),
        step,
    };
    let mut records = vec![record(&state, 0, 0.0)];
    let mut snapshots = vec![Snapshot { iteration: 0, chain: state.chain.clone() }];
    let mut accepted = 0usize;
    let mut step = params.step;

    let status = loop {
        if state.min_turn() >= -params.convexity_tol {
            break FlowStatus::ConvergedConvex;
        }
        if accepted >= params.max_iterations {
            break FlowStatus::MaxIterations;
        }
        let Some(dir) = tangent_direction(&state)? else {
            break FlowStatus::Stalled;
        };
        let descent: Vec<f64> = dir.iter().map(|d| -d).collect();
        let mut next = line_search(&state, &descent, (2.0 * step).min(params.step), &lengths, params);
        if next.as_ref().is_none_or(|(_, t)| *t < RIDGE_STEP_FRACTION * params.step) {
            if let Some(ridge) = ridge_direction(&state)? {
                if let Some(alt) = line_search(&state, &ridge, params.step, &lengths, params) {
                    if next.as_ref().is_none_or(|(s, _)| alt.0.log_energy < s.log_energy) {
                        next = Some(alt);
                    }
                }
            }
        }
        let Some((next, t)) = next else {
            break FlowStatus::Stalled;
        };
        state = next;
        step = t;
        accepted += 1;
        records.push(record(&state, accepted, t));
        if accepted.is_multiple_of(params.snapshot_stride) {
            snapshots.push(Snapshot { iteration: accepted, chain: state.chain.clone() });
        }
    };
    if snapshots.last().map(|s| s.iteration) != Some(accepted) {
        snapshots.push(Snapshot { iteration: accepted, chain: state.chain.clone() });
    }
    Ok(FlowTrace {
        status,
        reflected,
        generic,
        lengths: lengths.as_slice().to_vec(),
        accepted_steps: accepted,
        records,
        snapshots,
    })
}

/// Result of a single ascent step.
#[derive(Debug, Clone, PartialEq)]
pub struct AscentStep {
    /// Canonical chain after the step, in the input's orientation.
    pub chain: PolygonChain,
    pub step: f64,
    /// Trial steps rejected before acceptance.
    pub rejected_trials: usize,
    pub log_energy_before: f64,
    pub log_energy_after: f64,
}

/// One step up the energy gradient, with the same closure and embeddedness
/// checks as the descent. Steps whose energy exceeds `energy_cap` are
/// rejected as well.
pub fn reverse_flow_step(chain: &PolygonChain, params: &FlowParams, energy_cap: f64) -> Result<AscentStep> {
    let (state, lengths, reflected) = prepare(chain, params)?;
    if state.log_energy == f64::NEG_INFINITY {
        return Err(Error::NoAscentDirection);
    }
    let dir = tangent_direction(&state)?.ok_or(Error::NoAscentDirection)?;
    let log_cap = energy_cap.ln();
    let mut t = params.step;
    let mut rejected = 0;
    let mut capped = false;
    while t >= params.min_step {
        match trial(&state, &dir, t, &lengths, params) {
            Some(s) if s.log_energy > state.log_energy && s.log_energy <= log_cap => {
                let chain = if reflected { canonicalize(&s.chain.reflected())? } else { s.chain };
                return Ok(AscentStep {
                    chain,
                    step: t,
                    rejected_trials: rejected,
                    log_energy_before: state.log_energy,
                    log_energy_after: s.log_energy,
                });
            }
            Some(s) => capped = s.log_energy > log_cap,
            None => capped = false,
        }
        rejected += 1;
        t *= params.backtrack;
    }
    Err(if capped { Error::EnergyCapExceeded } else { Error::StepUnderflow(params.min_step) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn lens(v: &[f64]) -> SideLengths {
        SideLengths::new(v.to_vec()).unwrap()
    }

    fn dart() -> PolygonChain {
        PolygonChain::from_xy(&[[2.0, 0.0], [2.0, 2.0], [1.0, 0.6], [0.0, 2.0], [0.0, 0.0]]).unwrap()
    }

    #[test]
    fn closed_square_is_fixed_point() {
        let free = vec![FRAC_PI_2; 3];
        assert_eq!(project_to_closure(&free, &lens(&[1.0; 4])).unwrap(), free);
    }

    #[test]
    fn perturbed_square_recloses() {
        let l = lens(&[1.0; 4]);
        let free = vec![FRAC_PI_2 + 1e-3, FRAC_PI_2, FRAC_PI_2];
        let out = project_to_closure(&free, &l).unwrap();
        let rec = ReducedCoords::new(out.clone()).reconstruct(&l).unwrap();
        assert!(rec.closure_defect < 1e-12 * 4.0);
        let moved = out.iter().zip(&free).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(moved < 2e-3);
    }

    #[test]
    fn large_defect_rejected() {
        // folding the first turn back by 2 leaves a defect of about half the perimeter
        let free = vec![FRAC_PI_2 + 2.0, FRAC_PI_2, FRAC_PI_2];
        let l = lens(&[1.0; 4]);
        let d = ReducedCoords::new(free.clone()).reconstruct(&l).unwrap().closure_defect;
        assert!(d > 0.4);
        assert!(matches!(project_to_closure(&free, &l), Err(Error::OffManifold { .. })));
    }

    #[test]
    fn convex_input_returns_immediately() {
        let sq = PolygonChain::from_xy(&[[1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        let t = convexify(&sq, &FlowParams::default()).unwrap();
        assert_eq!(t.status, FlowStatus::ConvergedConvex);
        assert_eq!(t.records.len(), 1);
        assert_eq!(t.accepted_steps, 0);
        assert_eq!(t.snapshots.len(), 1);
    }

    #[test]
    fn dart_convexifies() {
        let t = convexify(&dart(), &FlowParams::default()).unwrap();
        assert_eq!(t.status, FlowStatus::ConvergedConvex);
        assert!(t.records.windows(2).all(|w| w[1].log_energy < w[0].log_energy));
        assert!(t.records.last().unwrap().min_turn >= -1e-6);
        let l = lens(&t.lengths);
        for s in &t.snapshots {
            assert!(s.chain.length_error(&l) < 1e-9);
            assert!(is_embedded(&s.chain).unwrap());
        }
    }

    #[test]
    fn clockwise_input_is_reflected() {
        let t = convexify(&dart().reflected(), &FlowParams::default()).unwrap();
        assert!(t.reflected);
        assert_eq!(t.status, FlowStatus::ConvergedConvex);
    }

    #[test]
    fn bowtie_rejected() {
        let b = PolygonChain::from_xy(&[[0.0, 0.0], [2.0, 2.0], [2.0, 0.0], [0.0, 2.0]]).unwrap();
        assert_eq!(convexify(&b, &FlowParams::default()).unwrap_err(), Error::NotEmbedded);
    }

    #[test]
    fn iteration_budget() {
        let p = FlowParams { max_iterations: 1, ..FlowParams::default() };
        let t = convexify(&dart(), &p).unwrap();
        assert_eq!(t.status, FlowStatus::MaxIterations);
        assert_eq!(t.accepted_steps, 1);
    }

    #[test]
    fn snapshot_count_follows_stride() {
        let p = FlowParams { snapshot_stride: 7, ..FlowParams::default() };
        let t = convexify(&dart(), &p).unwrap();
        let s = t.accepted_steps;
        assert_eq!(t.snapshots.len(), s.div_ceil(7) + 1);
    }

    #[test]
    fn ascent_from_convex_interior_fails() {
        let pent =
            crate::geometry::vertices_from_turn_angles(&lens(&[1.0; 5]), &crate::TurnAngles(vec![2.0 * PI / 5.0; 5]))
                .unwrap()
                .chain;
        let mut v = pent.vertices().to_vec();
        v[4] = Vec2::zeros();
        let pent = PolygonChain::new(v).unwrap();
        assert_eq!(reverse_flow_step(&pent, &FlowParams::default(), 1e300).unwrap_err(), Error::NoAscentDirection);
    }

    #[test]
    fn ascent_increases_energy() {
        let s = reverse_flow_step(&dart(), &FlowParams::default(), f64::INFINITY).unwrap();
        assert!(s.log_energy_after > s.log_energy_before);
        assert!(is_embedded(&s.chain).unwrap());
    }

    #[test]
    fn params_validation() {
        assert!(FlowParams { backtrack: 1.0, ..FlowParams::default() }.validate().is_err());
        assert!(FlowParams { step: 0.0, ..FlowParams::default() }.validate().is_err());
        assert!(FlowParams::default().validate().is_ok());
    }
}
