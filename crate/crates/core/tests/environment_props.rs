use headway_core::environment::{Environment, ReferencePath};
use headway_core::geom::{Polygon, Triangle, Vec2};
use headway_core::prediction::PredictionSet;
use proptest::prelude::*;

fn v(x: f64, y: f64) -> Vec2<f64> {
    Vec2::new(x, y)
}

/// 12 x 8 room with a box and a triangular pillar.
fn room() -> Environment<f64> {
    Environment::new(
        Polygon::rectangle(v(0.0, 0.0), v(12.0, 8.0)).unwrap(),
        vec![
            Polygon::rectangle(v(3.0, 2.0), v(5.0, 5.0)).unwrap(),
            Polygon::new(vec![v(8.0, 4.0), v(10.0, 4.5), v(8.5, 6.5)]).unwrap(),
        ],
        0.3,
    )
    .unwrap()
}

fn inside() -> impl Strategy<Value = Vec2<f64>> {
    (-1.0..13.0f64, -1.0..9.0f64).prop_map(|(x, y)| v(x, y))
}

fn waypoints() -> impl Strategy<Value = Vec<Vec2<f64>>> {
    prop::collection::vec((-20.0..20.0f64, -20.0..20.0f64), 2..8)
        .prop_map(|w| w.into_iter().map(|(x, y)| v(x, y)).collect::<Vec<_>>())
        .prop_filter("distinct consecutive waypoints", |w| {
            w.windows(2).all(|p| p[0].distance(p[1]) > 1e-3)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn nested_disks_have_ordered_safety(c in inside(), r1 in 0.0..3.0f64, extra in 0.0..3.0f64) {
        let env = room();
        let inner = env.safety_distance(&PredictionSet::Disk { center: c, radius: r1 });
        let outer = env.safety_distance(&PredictionSet::Disk { center: c, radius: r1 + extra });
        prop_assert!(outer <= inner + 1e-12, "outer {} > inner {}", outer, inner);
    }

    #[test]
    fn sub_triangles_have_larger_safety(a in inside(), b in inside(), c in inside(), s in 0.0..=1.0f64) {
        let env = room();
        let big = PredictionSet::Tri { triangle: Triangle::new(a, b, c) };
        let small = PredictionSet::Tri { triangle: Triangle::new(a, b, a.lerp(c, s)) };
        prop_assert!(env.safety_distance(&big) <= env.safety_distance(&small) + 1e-12);
    }

    #[test]
    fn point_set_safety_is_clipped_margin(p in inside()) {
        let env = room();
        let margin = env.free_space_margin(p);
        let point = PredictionSet::Tri { triangle: Triangle::point(p) };
        prop_assert!((env.safety_distance(&point) - margin.max(0.0)).abs() <= 1e-12);
        let disk = PredictionSet::Disk { center: p, radius: 0.0 };
        prop_assert!((env.safety_distance(&disk) - margin.max(0.0)).abs() <= 1e-12);
    }

    #[test]
    fn safety_bounded_by_member_margins(c in inside(), r in 0.0..2.0f64, angle in 0.0..6.3f64, frac in 0.0..=1.0f64) {
        let env = room();
        let set = PredictionSet::Disk { center: c, radius: r };
        let member = c + Vec2::from_angle(angle) * (r * frac);
        prop_assert!(env.safety_distance(&set) <= env.free_space_margin(member).max(0.0) + 1e-12);
    }

    #[test]
    fn margin_is_one_lipschitz(p in inside(), q in inside()) {
        let env = room();
        let gap = (env.free_space_margin(p) - env.free_space_margin(q)).abs();
        prop_assert!(gap <= p.distance(q) + 1e-12);
    }

    #[test]
    fn path_is_one_lipschitz_in_arc_length(w in waypoints(), a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let path = ReferencePath::new(w).unwrap();
        let (sa, sb) = (a * path.length(), b * path.length());
        prop_assert!(path.eval(sa).distance(path.eval(sb)) <= (sa - sb).abs() + 1e-9);
    }

    #[test]
    fn path_passes_through_waypoints(w in waypoints()) {
        let path = ReferencePath::new(w.clone()).unwrap();
        for (p, s) in w.iter().zip(path.cumulative_lengths()) {
            prop_assert!(path.eval(*s).distance(*p) <= 1e-9);
        }
        prop_assert_eq!(path.eval(-1.0), w[0]);
        prop_assert_eq!(path.eval(path.length() + 1.0), *w.last().unwrap());
    }
}
