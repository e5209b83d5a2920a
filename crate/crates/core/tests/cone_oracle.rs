use std::f64::consts::{FRAC_PI_2, PI};

use obtuse::flatcone::{cone_connect, cone_distance, cone_obtuse_inf_exact, ConePoint, FlatCone};
use proptest::prelude::*;

fn gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Shortest straight segment over the unrolled copies of `q`, or the path
/// through the apex.
fn unrolled_distance(l: f64, p: &ConePoint, q: &ConePoint) -> f64 {
    let mut best = p.rho + q.rho;
    for k in -3..=3 {
        let delta = q.phi - p.phi + k as f64 * l;
        if delta.abs() < PI {
            let d2 = p.rho * p.rho + q.rho * q.rho - 2.0 * p.rho * q.rho * delta.cos();
            best = best.min(d2.max(0.0).sqrt());
        }
    }
    best
}

/// Flat angle at the vertex between sides `a` (to the near point) and `b`
/// (to the far point), with `c` opposite; `b − c` is passed separately to
/// avoid cancellation.
fn far_comparison(a: f64, b: f64, c: f64) -> f64 {
    ((a * a + (b - c) * (b + c)) / (2.0 * a * b)).clamp(-1.0, 1.0).acos()
}

/// Brute-force `limsup` over a million far points on the circle `ρ = R`.
fn brute_force(cone: &FlatCone, p: &ConePoint, q: &ConePoint, radius: f64, samples: usize) -> (f64, f64) {
    let l = cone.link_length();
    let pq = cone_connect(cone, p, q).unwrap();
    let qp = cone_connect(cone, q, p).unwrap();
    let (mut angle, mut cmp) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 0..samples {
        let x = cone.point(radius, l * i as f64 / samples as f64).unwrap();
        let at = |c: &ConePoint, toward: &[f64]| {
            let dx = cone_connect(cone, c, &x).unwrap().directions;
            toward
                .iter()
                .map(|&u| dx.iter().map(|&v| gap(u, v)).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min)
        };
        angle = angle.max(at(p, &pq.directions)).max(at(q, &qp.directions));
        let (px, qx) = (cone_distance(cone, p, &x), cone_distance(cone, q, &x));
        cmp = cmp
            .max(far_comparison(pq.distance, px, qx))
            .max(far_comparison(pq.distance, qx, px));
    }
    (angle - FRAC_PI_2, cmp - FRAC_PI_2)
}

#[test]
fn exact_limit_matches_million_far_samples() {
    let cone = FlatCone::new(FRAC_PI_2).unwrap();
    let pairs = [((1.0, 0.1), (1.6, 0.6)), ((0.5, 0.0), (2.0, 0.3)), ((1.0, 0.2), (1.0, 1.4))];
    for ((r1, f1), (r2, f2)) in pairs {
        let p = cone.point(r1, f1).unwrap();
        let q = cone.point(r2, f2).unwrap();
        let exact = cone_obtuse_inf_exact(&cone, &p, &q).unwrap();
        let (angle, cmp) = brute_force(&cone, &p, &q, 1e6, 1_000_000);
        assert!((angle - exact.angle).abs() < 1e-4, "angle {angle} vs {}", exact.angle);
        assert!((cmp - exact.comparison).abs() < 1e-4, "comparison {cmp} vs {}", exact.comparison);
    }
}

#[test]
fn plane_limit_is_right_angle() {
    let cone = FlatCone::plane();
    let p = cone.point(1.0, 0.4).unwrap();
    let q = cone.point(0.3, 2.0).unwrap();
    let e = cone_obtuse_inf_exact(&cone, &p, &q).unwrap();
    assert!((e.angle - FRAC_PI_2).abs() < 1e-12);
    assert!((e.comparison - FRAC_PI_2).abs() < 1e-12);
}

type Pt = (f64, f64);

fn cone_and_points() -> impl Strategy<Value = (f64, Pt, Pt, Pt)> {
    let pt = || (0.0..4.0f64, 0.0..1.0f64);
    (0.1..=2.0 * PI, pt(), pt(), pt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn distance_matches_unrolling((l, a, b, _) in cone_and_points()) {
        let cone = FlatCone::new(l).unwrap();
        let p = cone.point(a.0, a.1 * l).unwrap();
        let q = cone.point(b.0, b.1 * l).unwrap();
        let d = cone_distance(&cone, &p, &q);
        prop_assert!((d - unrolled_distance(l, &p, &q)).abs() < 1e-9 * (1.0 + d));
    }

    #[test]
    fn metric_axioms((l, a, b, c) in cone_and_points()) {
        let cone = FlatCone::new(l).unwrap();
        let p = cone.point(a.0, a.1 * l).unwrap();
        let q = cone.point(b.0, b.1 * l).unwrap();
        let r = cone.point(c.0, c.1 * l).unwrap();
        let d = |x: &ConePoint, y: &ConePoint| cone_distance(&cone, x, y);
        prop_assert_eq!(d(&p, &p), 0.0);
        prop_assert!((d(&p, &q) - d(&q, &p)).abs() < 1e-12);
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-9);
    }

    #[test]
    fn exact_constants_are_dilation_invariant_and_ordered((l, a, b, _) in cone_and_points(), s in 0.01..100.0f64) {
        let cone = FlatCone::new(l).unwrap();
        let (pa, pb) = ((a.0 + 0.1, a.1 * l), (b.0 + 0.1, b.1 * l));
        prop_assume!((pa.0 - pb.0).abs() + (pa.1 - pb.1).abs() > 1e-3);
        let e = cone_obtuse_inf_exact(&cone, &cone.point(pa.0, pa.1).unwrap(), &cone.point(pb.0, pb.1).unwrap()).unwrap();
        let f = cone_obtuse_inf_exact(&cone, &cone.point(s * pa.0, pa.1).unwrap(), &cone.point(s * pb.0, pb.1).unwrap()).unwrap();
        prop_assert!((e.angle - f.angle).abs() < 1e-9);
        // asin(gap / d) near gap = d turns rounding ε into sqrt(2ε) ≈ 1.5e-8
        prop_assert!((e.comparison - f.comparison).abs() < 1e-7);
        // nonnegative curvature: the angle dominates the comparison angle
        prop_assert!(e.comparison <= e.angle + 1e-9);
        prop_assert!(e.angle <= FRAC_PI_2 + 1e-12 && e.comparison >= -FRAC_PI_2);
    }

    #[test]
    fn connect_directions_unit_consistent((l, a, b, _) in cone_and_points()) {
        let cone = FlatCone::new(l).unwrap();
        let p = cone.point(a.0 + 0.05, a.1 * l).unwrap();
        let q = cone.point(b.0 + 0.05, b.1 * l).unwrap();
        prop_assume!(cone_distance(&cone, &p, &q) > 1e-6);
        let c = cone_connect(&cone, &p, &q).unwrap();
        let back = cone_connect(&cone, &q, &p).unwrap();
        prop_assert!((c.distance - back.distance).abs() < 1e-12 * (1.0 + c.distance));
        prop_assert_eq!(c.directions.len(), c.terminal_directions.len());
        prop_assert!(!c.directions.is_empty());
    }
}
