//! Worked examples for every public operation. Hand-derived values were
//! recomputed with an independent numpy implementation of the formulas.

use std::f64::consts::{FRAC_PI_2, PI};

use headway_core::environment::{path_clearance, Environment, ReferencePath};
use headway_core::geom::{
    point_segment_distance, polygon_point_distance, rotate, segment_segment_distance, triangle_contains, Polygon,
    Segment, Triangle, Vec2,
};
use headway_core::prediction::{
    circular_prediction, forward_sim_prediction, prediction_distance, prediction_goal_radius, triangular_bound,
    triangular_prediction, triangular_prediction_branch, ForwardSimConfig, PredictionMethod, PredictionSet,
    TriangleBranch,
};
use headway_core::simulation::{governor_derivative, GovernorGains, GovernorState};
use headway_core::unicycle::{
    adaptive_headway_control, fixed_headway_control, headway_distance, headway_frame, headway_point,
    unicycle_derivative, ControlInput, ControllerParams, UnicycleState,
};

fn v(x: f64, y: f64) -> Vec2<f64> {
    Vec2::new(x, y)
}

fn state(x: f64, y: f64, theta: f64) -> UnicycleState<f64> {
    UnicycleState::new(v(x, y), theta)
}

fn params(eps: f64, kappa: f64) -> ControllerParams<f64> {
    ControllerParams::new(eps, kappa, 1e-9).unwrap()
}

fn close(a: Vec2<f64>, b: Vec2<f64>, tol: f64) -> bool {
    a.distance(b) <= tol
}

fn unit_square() -> Polygon<f64> {
    Polygon::rectangle(v(0.0, 0.0), v(1.0, 1.0)).unwrap()
}

fn empty_room(side: f64, radius: f64) -> Environment<f64> {
    Environment::new(Polygon::rectangle(v(0.0, 0.0), v(side, side)).unwrap(), vec![], radius).unwrap()
}

#[test]
fn rotation() {
    assert!(close(rotate(v(1.0, 0.0), FRAC_PI_2), v(0.0, 1.0), 1e-15));
    assert_eq!(rotate(v(0.0, 0.0), 1.3), v(0.0, 0.0));
    assert!(close(rotate(v(1.0, 1.0), PI), v(-1.0, -1.0), 1e-15));
}

#[test]
fn point_to_segment() {
    let s = Segment::new(v(0.0, 0.0), v(1.0, 0.0));
    assert_eq!(point_segment_distance(v(0.0, 1.0), &s), 1.0);
    assert_eq!(point_segment_distance(v(2.0, 0.0), &s), 1.0);
    assert_eq!(point_segment_distance(v(0.5, 0.0), &s), 0.0);
}

#[test]
fn segment_to_segment() {
    let seg = |a: (f64, f64), b: (f64, f64)| Segment::new(v(a.0, a.1), v(b.0, b.1));
    assert_eq!(
        segment_segment_distance(&seg((0.0, 0.0), (1.0, 0.0)), &seg((0.0, 1.0), (1.0, 1.0))),
        1.0
    );
    assert_eq!(
        segment_segment_distance(&seg((0.0, 0.0), (1.0, 1.0)), &seg((1.0, 0.0), (0.0, 1.0))),
        0.0
    );
    assert_eq!(
        segment_segment_distance(&seg((0.0, 0.0), (1.0, 0.0)), &seg((3.0, 0.0), (4.0, 0.0))),
        2.0
    );
}

#[test]
fn triangle_membership() {
    let t = Triangle::new(v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0));
    assert!(triangle_contains(&t, v(0.25, 0.25)));
    assert!(!triangle_contains(&t, v(1.0, 1.0)));
    let flat = Triangle::new(v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0));
    assert!(triangle_contains(&flat, v(1.5, 0.0)));
}

#[test]
fn polygon_signed_distance() {
    let sq = unit_square();
    assert_eq!(polygon_point_distance(&sq, v(0.5, 0.5)), -0.5);
    assert_eq!(polygon_point_distance(&sq, v(2.0, 0.5)), 1.0);
    assert_eq!(polygon_point_distance(&sq, v(1.0, 0.5)), 0.0);
}

#[test]
fn headway_distance_and_point() {
    let p = params(0.5, 1.0);
    assert_eq!(headway_distance(&state(0.0, 0.0, 0.0), v(2.0, 0.0), &p), 1.0);
    assert_eq!(headway_distance(&state(2.0, 0.0, 0.3), v(2.0, 0.0), &p), 0.0);
    assert_eq!(headway_distance(&state(3.0, 4.0, 0.0), v(0.0, 0.0), &p), 2.5);

    assert!(close(
        headway_point(&state(0.0, 0.0, 0.0), v(2.0, 0.0), &p),
        v(1.0, 0.0),
        1e-15
    ));
    assert_eq!(headway_point(&state(2.0, -1.0, 0.7), v(2.0, -1.0), &p), v(2.0, -1.0));
    assert!(close(
        headway_point(&state(0.0, 0.0, FRAC_PI_2), v(1.0, 0.0), &p),
        v(0.0, 0.5),
        1e-15
    ));
}

#[test]
fn adaptive_control() {
    let p = params(0.5, 1.0);
    let u = adaptive_headway_control(&state(0.0, 0.0, 0.0), v(1.0, 0.0), &p);
    assert!((u.linear - 1.0).abs() < 1e-15 && u.angular.abs() < 1e-15);
    assert_eq!(
        adaptive_headway_control(&state(1.0, 0.0, 2.0), v(1.0, 0.0), &p),
        ControlInput::stop()
    );
    let u = adaptive_headway_control(&state(0.0, 0.0, FRAC_PI_2), v(1.0, 0.0), &p);
    assert!(
        (u.linear + 0.5).abs() < 1e-15 && (u.angular + 2.0).abs() < 1e-15,
        "{u:?}"
    );
}

#[test]
fn fixed_headway_baseline_control() {
    let u = fixed_headway_control(&state(0.0, 0.0, 0.0), v(1.0, 0.0), 1.0, 0.5).unwrap();
    assert!((u.linear - 0.5).abs() < 1e-15 && u.angular.abs() < 1e-15);
    // equilibrium: d behind the goal, facing it
    let u = fixed_headway_control(&state(0.5, 0.0, 0.0), v(1.0, 0.0), 1.0, 0.5).unwrap();
    assert!(u.linear.abs() < 1e-15 && u.angular.abs() < 1e-15);
    let u = fixed_headway_control(&state(1.0, 0.0, 0.0), v(1.0, 0.0), 1.0, 0.5).unwrap();
    assert!((u.linear + 0.5).abs() < 1e-15 && u.angular.abs() < 1e-15);
    assert!(fixed_headway_control(&state(0.0, 0.0, 0.0), v(1.0, 0.0), 1.0, 0.0).is_err());
}

#[test]
fn headway_frame_misaligned() {
    let f = headway_frame(&state(0.0, 0.0, FRAC_PI_2), v(1.0, 0.0), &params(0.5, 1.0));
    assert!(close(f.tangent, v(0.8944271909999159, -0.4472135954999579), 1e-12));
    assert!(close(f.projected, v(0.2, 0.4), 1e-12));
    assert!(close(f.extended, v(-0.03094010767585029, -0.06188021535170057), 1e-12));
    assert!((f.extended.distance(v(1.0, 0.0)) - 1.0327955589886444).abs() < 1e-12);
}

#[test]
fn headway_frame_aligned_and_at_goal() {
    let f = headway_frame(&state(0.0, 0.0, 0.0), v(1.0, 0.0), &params(0.5, 1.0));
    assert!(close(f.headway_point, v(0.5, 0.0), 1e-15));
    assert!(close(f.tangent, v(1.0, 0.0), 1e-15));
    assert!(close(f.projected, v(0.0, 0.0), 1e-15));
    assert!((f.extended.distance(v(1.0, 0.0)) - 1.1547005383792517).abs() < 1e-12);

    let g = v(-2.0, 3.0);
    let f = headway_frame(&UnicycleState::new(g, 1.0), g, &params(0.5, 1.0));
    assert_eq!((f.headway_point, f.projected, f.extended), (g, g, g));
}

#[test]
fn unicycle_kinematics() {
    let d = unicycle_derivative(&state(0.0, 0.0, 0.0), &ControlInput::new(1.0, 0.0));
    assert_eq!((d.velocity, d.angular), (v(1.0, 0.0), 0.0));
    let d = unicycle_derivative(&state(3.0, 1.0, 0.4), &ControlInput::new(0.0, 2.0));
    assert_eq!((d.velocity, d.angular), (v(0.0, 0.0), 2.0));
    let d = unicycle_derivative(&state(0.0, 0.0, FRAC_PI_2), &ControlInput::new(2.0, -1.0));
    assert!(close(d.velocity, v(0.0, 2.0), 1e-15) && d.angular == -1.0);
}

#[test]
fn circular_predictions() {
    let p = params(0.5, 1.0);
    match circular_prediction(&state(1.0, 0.0, PI), v(0.0, 0.0), &p) {
        PredictionSet::Disk { center, radius } => {
            assert_eq!(center, v(0.0, 0.0));
            assert!((radius - 1.0).abs() < 1e-15);
        }
        other => panic!("{other:?}"),
    }
    let g = v(4.0, 4.0);
    assert_eq!(
        circular_prediction(&UnicycleState::new(g, 0.0), g, &p),
        PredictionSet::Disk { center: g, radius: 0.0 }
    );
    match circular_prediction(&state(0.0, 0.0, FRAC_PI_2), v(1.0, 0.0), &p) {
        PredictionSet::Disk { radius, .. } => assert!((radius - 1.0327955589886444).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

fn same_vertices(t: &Triangle<f64>, expected: [Vec2<f64>; 3], tol: f64) -> bool {
    let vs = t.vertices();
    expected.iter().all(|e| vs.iter().any(|x| close(*x, *e, tol)))
        && vs.iter().all(|x| expected.iter().any(|e| close(*x, *e, tol)))
}

#[test]
fn triangular_bounds() {
    let p = params(0.5, 1.0);
    let t = triangular_bound(&state(1.0, 0.0, PI), v(0.0, 0.0), &p);
    assert!(
        same_vertices(&t, [v(0.0, 0.0), v(1.0, 0.0), v(0.5, 0.0)], 1e-15),
        "{t:?}"
    );
    let g = v(1.0, 1.0);
    assert_eq!(triangular_bound(&UnicycleState::new(g, 0.3), g, &p), Triangle::point(g));
    let t = triangular_bound(&state(0.0, 0.0, FRAC_PI_2), v(1.0, 0.0), &p);
    let expected = [v(1.0, 0.0), v(0.2, 0.4), v(-0.03094010767585029, -0.06188021535170057)];
    assert!(same_vertices(&t, expected, 1e-12), "{t:?}");
}

#[test]
fn triangular_predictions() {
    let p = params(0.5, 1.0);
    match triangular_prediction(&state(1.0, 0.0, PI), v(0.0, 0.0), &p) {
        PredictionSet::Tri { triangle } => {
            assert!(
                same_vertices(&triangle, [v(0.0, 0.0), v(1.0, 0.0), v(0.5, 0.0)], 1e-15),
                "{triangle:?}"
            )
        }
        other => panic!("{other:?}"),
    }
    let g = v(-1.0, 2.0);
    assert_eq!(
        triangular_prediction(&UnicycleState::new(g, 0.3), g, &p),
        PredictionSet::Tri {
            triangle: Triangle::point(g)
        }
    );

    // alignment exactly ε: heading at ±arccos(ε) from the goal direction
    for eps in [0.3, 0.5, 0.8] {
        let p = params(eps, 1.0);
        for sign in [1.0, -1.0] {
            let s = state(0.0, 0.0, sign * eps.acos());
            let a = triangular_prediction_branch(&s, v(1.0, 0.0), &p, TriangleBranch::Aligned);
            let m = triangular_prediction_branch(&s, v(1.0, 0.0), &p, TriangleBranch::Misaligned);
            assert!(same_vertices(&a, m.vertices(), 1e-9), "eps {eps}: {a:?} vs {m:?}");
        }
    }
}

#[test]
fn forward_simulation_predictions() {
    let p = params(0.5, 1.0);
    let cfg = ForwardSimConfig::default();
    let g = v(2.0, 2.0);
    assert_eq!(
        forward_sim_prediction(&UnicycleState::new(g, 0.0), g, &p, &cfg).unwrap(),
        PredictionSet::Hull {
            points: vec![g],
            padding: 0.0
        }
    );

    // facing the goal: straight-line motion along [g, p]
    let PredictionSet::Hull { points, .. } =
        forward_sim_prediction(&state(1.0, 0.0, PI), v(0.0, 0.0), &p, &cfg).unwrap()
    else {
        panic!("hull expected")
    };
    for q in &points {
        assert!(q.y.abs() < 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&q.x), "{q:?}");
    }

    let s = state(0.0, 0.0, 2.5);
    let disk = circular_prediction(&s, v(3.0, 1.0), &p);
    let PredictionSet::Hull { points, .. } = forward_sim_prediction(&s, v(3.0, 1.0), &p, &cfg).unwrap() else {
        panic!("hull expected")
    };
    assert!(points.iter().all(|q| prediction_distance(&disk, *q) <= 1e-6));
}

#[test]
fn set_distances_and_radii() {
    let disk = PredictionSet::Disk {
        center: v(0.0, 0.0),
        radius: 1.0,
    };
    assert_eq!(prediction_distance(&disk, v(3.0, 0.0)), 2.0);
    let tri = PredictionSet::Tri {
        triangle: Triangle::new(v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)),
    };
    assert_eq!(prediction_distance(&tri, v(0.2, 0.2)), 0.0);
    let hull = PredictionSet::Hull {
        points: vec![v(0.0, 0.0), v(1.0, 0.0)],
        padding: 0.1,
    };
    assert!((prediction_distance(&hull, v(1.0, 1.0)) - 0.9).abs() < 1e-15);

    let g = v(0.0, 0.0);
    assert_eq!(
        prediction_goal_radius(&PredictionSet::Disk { center: g, radius: 0.7 }, g),
        0.7
    );
    let tri = PredictionSet::Tri {
        triangle: Triangle::new(g, v(1.0, 0.0), v(0.0, 2.0)),
    };
    assert_eq!(prediction_goal_radius(&tri, g), 2.0);
    assert_eq!(
        prediction_goal_radius(
            &PredictionSet::Tri {
                triangle: Triangle::point(g)
            },
            g
        ),
        0.0
    );
}

#[test]
fn free_space_margin_and_safety() {
    let env = empty_room(10.0, 1.0);
    assert_eq!(env.free_space_margin(v(5.0, 5.0)), 4.0);
    assert_eq!(env.free_space_margin(v(0.0, 3.0)), -1.0);
    let env = Environment::new(
        Polygon::rectangle(v(0.0, 0.0), v(10.0, 10.0)).unwrap(),
        vec![Polygon::rectangle(v(2.0, 2.0), v(4.0, 4.0)).unwrap()],
        0.5,
    )
    .unwrap();
    assert!(env.free_space_margin(v(3.0, 3.0)) < 0.0);

    let env = empty_room(10.0, 1.0);
    let disk = PredictionSet::Disk {
        center: v(5.0, 5.0),
        radius: 1.0,
    };
    assert_eq!(env.safety_distance(&disk), 3.0);
    let wide = PredictionSet::Disk {
        center: v(5.0, 5.0),
        radius: 4.5,
    };
    assert_eq!(env.safety_distance(&wide), 0.0);
    let point = PredictionSet::Tri {
        triangle: Triangle::point(v(3.0, 5.0)),
    };
    assert_eq!(env.safety_distance(&point), env.free_space_margin(v(3.0, 5.0)));
}

#[test]
fn path_evaluation_and_clearance() {
    let straight = ReferencePath::new(vec![v(0.0, 0.0), v(2.0, 0.0)]).unwrap();
    assert_eq!(straight.eval(1.0), v(1.0, 0.0));
    assert_eq!(straight.eval(0.0), v(0.0, 0.0));
    let bent = ReferencePath::new(vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0)]).unwrap();
    assert!(close(bent.eval(1.5), v(1.0, 0.5), 1e-15));

    let env = empty_room(10.0, 1.0);
    let through = ReferencePath::new(vec![v(2.0, 5.0), v(8.0, 5.0)]).unwrap();
    assert!(path_clearance(&env, &through, 200) > 0.0);
    let env = Environment::new(
        Polygon::rectangle(v(0.0, 0.0), v(10.0, 10.0)).unwrap(),
        vec![Polygon::rectangle(v(4.0, 5.5), v(6.0, 7.0)).unwrap()],
        0.5,
    )
    .unwrap();
    // the inflated obstacle reaches down exactly to y = 5
    assert!(path_clearance(&env, &through, 200) <= 1e-12);
}

#[test]
fn governor_path_rate() {
    let env = empty_room(100.0, 0.5);
    let path = ReferencePath::new(vec![v(10.0, 50.0), v(18.0, 50.0)]).unwrap();
    let p = params(0.5, 1.0);
    let gains = GovernorGains::default();
    // far from every wall the path term is active: k_ζ (L - s) = 4 (8 - 3)
    let gs = GovernorState {
        s: 3.0,
        unicycle: state(12.5, 50.0, 0.0),
    };
    let e = governor_derivative(&gs, &env, &path, &p, &PredictionMethod::Triangle, &gains);
    assert!((e.path_rate - 20.0).abs() < 1e-12, "{}", e.path_rate);
    assert!(e.derivative.velocity.x > 0.0);

    let gs = GovernorState {
        s: 8.0,
        unicycle: state(17.0, 50.0, 0.0),
    };
    let e = governor_derivative(&gs, &env, &path, &p, &PredictionMethod::Circle, &gains);
    assert_eq!(e.path_rate, 0.0);

    // prediction touching the workspace boundary: the path point waits, the robot still moves
    let env = empty_room(10.0, 0.5);
    let path = ReferencePath::new(vec![v(1.0, 5.0), v(9.0, 5.0)]).unwrap();
    let gs = GovernorState {
        s: 7.0,
        unicycle: state(1.0, 5.0, 0.0),
    };
    let e = governor_derivative(&gs, &env, &path, &p, &PredictionMethod::Circle, &gains);
    assert_eq!((e.safety_distance, e.path_rate), (0.0, 0.0));
    assert!(e.derivative.velocity.x > 0.0);
}
