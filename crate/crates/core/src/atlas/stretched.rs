//! Minimally and maximally stretched configurations.

use std::f64::consts::{PI, TAU};

use serde::{Serialize, Serializer};

use crate::config_space::CONVEX_SLACK;
use crate::error::{Error, Result};
use crate::geometry::{
    circle_circle_intersection, turn_angles_from_vertices, PolygonChain, SideLengths, TurnAngles, Vec2,
};

/// Turn angles below this magnitude count as flat in witnesses.
pub const FLAT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// Minimum attained with a zero turn angle.
    MinimalCaseA,
    /// Minimum attained with a straight tail to the origin.
    MinimalCaseB,
    Maximal,
}

impl WitnessKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::MinimalCaseA => "minimal_case_a",
            Self::MinimalCaseB => "minimal_case_b",
            Self::Maximal => "maximal",
        }
    }
}

/// A convex configuration attaining an end of the admissible interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StretchedWitness {
    pub kind: WitnessKind,
    /// Last vertex of the straight run (maximal witnesses only).
    pub run_end: Option<usize>,
    #[serde(serialize_with = "chain_xy")]
    pub chain: PolygonChain,
    pub turn_angles: TurnAngles,
    /// Turn angle at the target vertex.
    pub theta: f64,
    /// Another candidate reached the same value within 1e-9.
    pub tie: bool,
}

fn chain_xy<S: Serializer>(c: &PolygonChain, s: S) -> std::result::Result<S::Ok, S::Error> {
    c.to_xy().serialize(s)
}

/// Vertices 0..=m of the chain fixed by the prefix.
fn prefix_vertices(lengths: &SideLengths, alpha: &[f64]) -> Vec<Vec2> {
    let mut v = Vec::with_capacity(lengths.len());
    v.push(Vec2::new(lengths[0], 0.0));
    let mut heading = 0.0;
    for (j, &a) in alpha.iter().enumerate() {
        heading += a;
        let last = v[j];
        v.push(last + lengths[j + 1] * Vec2::new(heading.cos(), heading.sin()));
    }
    v
}

/// Appends the straight run from the last vertex of `v` to `end`, covering
/// edges `first..=last`.
fn push_run(v: &mut Vec<Vec2>, lengths: &SideLengths, first: usize, last: usize, end: Vec2) {
    let start = *v.last().unwrap();
    let total = lengths.span(first..last + 1);
    let mut acc = 0.0;
    for i in first..last {
        acc += lengths[i];
        v.push(start + (end - start) * (acc / total));
    }
    v.push(end);
}

struct Candidate {
    chain: PolygonChain,
    angles: TurnAngles,
    theta: f64,
}

/// Turn angles of a candidate whose vertices other than `m` must be convex
/// turns, or `None` when the candidate winds wrongly or turns the wrong
/// way somewhere else.
fn evaluate(v: Vec<Vec2>, m: usize, require_target: bool) -> Option<Candidate> {
    let chain = PolygonChain::new(v).ok()?;
    let angles = turn_angles_from_vertices(&chain).ok()?;
    if (angles.total() - TAU).abs() > 1e-6 {
        return None;
    }
    let ok = angles
        .as_slice()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != m || require_target)
        .all(|(_, &t)| (-CONVEX_SLACK..PI).contains(&t));
    let theta = angles.as_slice()[m];
    ok.then_some(Candidate { chain, angles, theta })
}

/// Smallest admissible turn angle at vertex `alpha.len()`.
pub(crate) fn minimal(lengths: &SideLengths, alpha: &[f64]) -> Result<(f64, StretchedWitness)> {
    let n = lengths.len();
    let m = alpha.len();
    if m + 3 > n {
        return Err(Error::PrefixLength { len: m, n });
    }
    let base_chain = prefix_vertices(lengths, alpha);
    let base = base_chain[m];
    let tail = lengths.span(m + 2..n);

    let mut best: Option<Candidate> = None;
    if base != Vec2::zeros() {
        let last_level = m + 3 == n;
        for p in circle_circle_intersection(base, lengths[m + 1], Vec2::zeros(), tail)?.points() {
            let mut v = base_chain.clone();
            v.push(p);
            push_run(&mut v, lengths, m + 2, n - 1, Vec2::zeros());
            if let Some(c) = evaluate(v, m, last_level) {
                if best.as_ref().is_none_or(|b| c.theta < b.theta) {
                    best = Some(c);
                }
            }
        }
    }

    match best {
        Some(c) if c.theta >= 0.0 || (m + 3 == n) => Ok((
            c.theta,
            StretchedWitness {
                kind: WitnessKind::MinimalCaseB,
                run_end: None,
                chain: c.chain,
                turn_angles: c.angles,
                theta: c.theta,
                tie: false,
            },
        )),
        _ if m + 3 == n => Err(Error::PrefixNotInAtlas),
        _ => {
            // no straight tail with a nonnegative turn: the minimum is a flat vertex
            let mut pinned = alpha.to_vec();
            pinned.push(0.0);
            let (_, inner) = minimal(lengths, &pinned).map_err(|_| Error::PrefixNotInAtlas)?;
            let theta = inner.turn_angles.as_slice()[m];
            Ok((0.0, StretchedWitness { kind: WitnessKind::MinimalCaseA, theta, tie: false, run_end: None, ..inner }))
        }
    }
}

/// Largest admissible turn angle at vertex `alpha.len()`.
pub(crate) fn maximal(lengths: &SideLengths, alpha: &[f64]) -> Result<(f64, StretchedWitness)> {
    let n = lengths.len();
    let m = alpha.len();
    if m + 3 > n {
        return Err(Error::PrefixLength { len: m, n });
    }
    let base_chain = prefix_vertices(lengths, alpha);
    let base = base_chain[m];

    let mut found: Vec<(usize, Candidate)> = Vec::new();
    for j in m + 1..=n - 2 {
        let anchor = Vec2::new(-lengths.span(j + 2..n), 0.0);
        if anchor == base {
            continue;
        }
        let run = lengths.span(m + 1..j + 1);
        for p in circle_circle_intersection(base, run, anchor, lengths[j + 1])?.points() {
            let mut v = base_chain.clone();
            push_run(&mut v, lengths, m + 1, j, p);
            for i in j + 1..n {
                v.push(Vec2::new(-lengths.span(i + 1..n), 0.0));
            }
            if let Some(c) = evaluate(v, m, true) {
                found.push((j, c));
            }
        }
    }
    let best = found
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.theta.total_cmp(&b.1 .1.theta).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .ok_or_else(|| {
            Error::NoStretchedCandidate(format!("prefix {alpha:?}: every run end fails the convexity filter"))
        })?;
    let (j, c) = found.swap_remove(best);
    let tie = found.iter().any(|(_, o)| (o.theta - c.theta).abs() < 1e-9);
    Ok((
        c.theta,
        StretchedWitness {
            kind: WitnessKind::Maximal,
            run_end: Some(j),
            chain: c.chain,
            turn_angles: c.angles,
            theta: c.theta,
            tie,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config_space::classify;

    fn lens(v: &[f64]) -> SideLengths {
        SideLengths::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rigid_triangle() {
        let l = lens(&[1.0, 1.0, 1.0]);
        let (nu, _) = minimal(&l, &[]).unwrap();
        let (mu, _) = maximal(&l, &[]).unwrap();
        assert!((nu - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((mu - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn right_triangle() {
        let (nu, _) = minimal(&lens(&[3.0, 4.0, 5.0]), &[]).unwrap();
        assert!((nu - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn kite_extremes() {
        let l = lens(&[2.0, 2.0, 2.0, 1.0]);
        let (nu, wmin) = minimal(&l, &[]).unwrap();
        let (mu, wmax) = maximal(&l, &[]).unwrap();
        assert!((nu - (PI - (-0.125f64).acos())).abs() < 1e-12);
        assert!((mu - 1.75f64.sqrt().atan2(-1.5)).abs() < 1e-12);
        assert!((mu - nu - 0.9734).abs() < 1e-4);
        assert_eq!(wmin.kind, WitnessKind::MinimalCaseB);
        assert_eq!(wmax.run_end, Some(1));
        let p = wmax.chain.vertices();
        assert!((p[1] - Vec2::new(0.5, 1.75f64.sqrt())).norm() < 1e-12);
        assert!((p[2] - Vec2::new(-1.0, 0.0)).norm() < 1e-12);
        for w in [&wmin, &wmax] {
            assert!(classify(&w.chain).unwrap().convex_ccw);
        }
    }

    #[test]
    fn case_a_when_tail_cannot_straighten() {
        // a straight tail of length 21 cannot start within 1 of (1, 0)
        let l = lens(&[1.0, 1.0, 1.0, 10.0, 10.0]);
        let (nu, w) = minimal(&l, &[]).unwrap();
        assert_eq!(nu, 0.0);
        assert_eq!(w.kind, WitnessKind::MinimalCaseA);
        assert!(w.theta.abs() < 1e-9);
        assert!(classify(&w.chain).unwrap().convex_ccw);
    }

    #[test]
    fn witness_flatness() {
        let l = lens(&[1.0, 1.3, 0.8, 1.1, 0.9, 1.2]);
        let (_, w) = minimal(&l, &[1.0]).unwrap();
        if w.kind == WitnessKind::MinimalCaseB {
            for i in 3..5 {
                assert!(w.turn_angles.as_slice()[i].abs() < FLAT_TOL);
            }
        }
        let (_, w) = maximal(&l, &[1.0]).unwrap();
        let j = w.run_end.unwrap();
        let t = w.turn_angles.as_slice();
        for (i, &ti) in t.iter().enumerate().take(j).skip(2) {
            assert!(ti.abs() < FLAT_TOL, "vertex {i} in run");
        }
        for (i, &ti) in t.iter().enumerate().skip(j + 2) {
            assert!(ti.abs() < FLAT_TOL, "vertex {i} in tail");
        }
    }
}
