mod common;

use polylink::atlas::{quad_turn_angles, quadrilateral_expansive_step};

#[test]
fn expansive_motion_is_monotone() {
    let mut rng = common::rng(4);
    for _ in 0..10 {
        let mut q = common::convex_quad(&mut rng);
        let side = |q: &[polylink::Vec2; 4], i: usize| (q[(i + 1) % 4] - q[i]).norm();
        let sides: Vec<f64> = (0..4).map(|i| side(&q, i)).collect();
        let delta = 0.9 * common::max_expansive_delta(&q) / 100.0;
        assert!(delta > 0.0);
        let start = quad_turn_angles(&q);
        let mut prev = start;
        for _ in 0..100 {
            q = quadrilateral_expansive_step(&q, delta).unwrap();
            let t = quad_turn_angles(&q);
            assert!(t[0] > prev[0] && t[2] > prev[2]);
            assert!(t[1] < prev[1] && t[3] < prev[3]);
            prev = t;
            for (i, &s) in sides.iter().enumerate() {
                assert!((side(&q, i) - s).abs() < 1e-12);
            }
        }
        assert!(prev[0] > start[0] && prev[1] < start[1]);
    }
}
