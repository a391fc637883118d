mod common;

use std::f64::consts::PI;

use polylink::config_space::{classify, default_tolerance, straight_line_sign_vectors};
use polylink::geometry::{
    canonicalize, circle_circle_intersection, normalize_angle, segment_intersection, turn_angles_from_vertices,
    vertices_from_turn_angles, SegmentRelation,
};
use polylink::{PolygonChain, SideLengths, Vec2};
use proptest::prelude::*;

fn polygon(seed: u64, n: usize) -> PolygonChain {
    common::star_polygon(&mut common::rng(seed), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn angles_vertices_round_trip(seed in any::<u64>(), n in 3usize..10) {
        let p = polygon(seed, n);
        let lengths = SideLengths::new(p.side_lengths()).unwrap();
        let angles = turn_angles_from_vertices(&p).unwrap();
        let rec = vertices_from_turn_angles(&lengths, &angles).unwrap();
        prop_assert!(rec.closure_defect < 1e-9);
        for (a, b) in rec.chain.vertices().iter().zip(p.vertices()) {
            prop_assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn canonical_frame(seed in any::<u64>(), n in 3usize..10, angle in -PI..PI, dx in -5.0..5.0f64) {
        let p = polygon(seed, n);
        let (s, c) = angle.sin_cos();
        let moved: Vec<Vec2> = p
            .vertices()
            .iter()
            .map(|v| Vec2::new(c * v.x - s * v.y + dx, s * v.x + c * v.y - dx))
            .collect();
        let q = canonicalize(&PolygonChain::new(moved).unwrap()).unwrap();
        prop_assert!(q.is_canonical());
        prop_assert_eq!(q.vertex(n - 1), Vec2::zeros());
        for (a, b) in q.vertices().iter().zip(p.vertices()) {
            prop_assert!((a - b).norm() < 1e-9);
        }
        let again = canonicalize(&q).unwrap();
        for (a, b) in again.vertices().iter().zip(q.vertices()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn reflection_flips_winding(seed in any::<u64>(), n in 3usize..10) {
        let p = polygon(seed, n);
        let a = classify(&p).unwrap();
        let b = classify(&p.reflected()).unwrap();
        prop_assert!((a.winding + b.winding).abs() < 1e-9);
        prop_assert_eq!(a.embedded, b.embedded);
    }

    #[test]
    fn circle_points_lie_on_both_circles(
        x in -3.0..3.0f64, y in -3.0..3.0f64, r1 in 0.1..3.0f64, r2 in 0.1..3.0f64,
    ) {
        let c2 = Vec2::new(x, y);
        prop_assume!(c2.norm() > 1e-6);
        let hit = circle_circle_intersection(Vec2::zeros(), r1, c2, r2).unwrap();
        let d = c2.norm();
        let intersects = d <= r1 + r2 && d >= (r1 - r2).abs();
        if !hit.is_empty() {
            for p in hit.points() {
                prop_assert!((p.norm() - r1).abs() < 1e-8 * (r1 + r2));
                prop_assert!(((p - c2).norm() - r2).abs() < 1e-8 * (r1 + r2));
            }
        } else {
            prop_assert!(!intersects || (d - r1 - r2).abs() < 1e-9 || (d - (r1 - r2).abs()).abs() < 1e-9);
        }
    }

    #[test]
    fn segment_relation_is_symmetric(pts in prop::array::uniform8(-2i32..3)) {
        let p: Vec<Vec2> = pts.chunks(2).map(|c| Vec2::new(c[0] as f64, c[1] as f64)).collect();
        prop_assume!(p[0] != p[1] && p[2] != p[3]);
        let ab = segment_intersection(p[0], p[1], p[2], p[3]).unwrap();
        prop_assert_eq!(ab, segment_intersection(p[2], p[3], p[0], p[1]).unwrap());
        prop_assert_eq!(ab, segment_intersection(p[1], p[0], p[3], p[2]).unwrap());
        if ab == SegmentRelation::ProperCrossing {
            prop_assert!(p.iter().take(2).all(|v| *v != p[2] && *v != p[3]));
        }
    }

    #[test]
    fn normalized_angles_are_half_open(t in -100.0..100.0f64) {
        let a = normalize_angle(t);
        prop_assert!(a > -PI && a <= PI);
        let k = ((t - a) / (2.0 * PI)).round();
        prop_assert!((t - a - 2.0 * PI * k).abs() < 1e-9);
    }

    #[test]
    fn straight_line_vectors_sum_to_zero(v in prop::collection::vec(1u32..8, 3..9)) {
        let l = SideLengths::new(v.iter().map(|&x| x as f64).collect()).unwrap();
        let report = straight_line_sign_vectors(&l, default_tolerance(&l)).unwrap();
        prop_assert!(report.exact);
        for eps in &report.sign_vectors {
            prop_assert_eq!(eps[0], 1);
            let s: i64 = eps.iter().zip(&v).map(|(&e, &x)| e as i64 * x as i64).sum();
            prop_assert_eq!(s, 0);
        }
        let brute = (0u32..1 << (v.len() - 1))
            .filter(|m| {
                let s: i64 = v.iter().enumerate().map(|(i, &x)| {
                    let neg = i > 0 && (m >> (i - 1)) & 1 == 1;
                    if neg { -(x as i64) } else { x as i64 }
                }).sum();
                s == 0
            })
            .count();
        prop_assert_eq!(report.sign_vectors.len(), brute);
    }
}
