//! Seeded randomized property suites for the controller, its geometric
//! properties and the motion predictions.
//!
//! Every check draws its cases from a caller-supplied RNG, measures a
//! violation amount per case (non-positive when the property holds exactly)
//! and counts the cases whose amount exceeds the given tolerance.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;

use crate::geom::{point_segment_distance, Segment, Vec2};
use crate::ode::{closed_loop_field, integrate, rk4_step};
use crate::prediction::{
    circular_prediction, prediction_distance, prediction_goal_radius, triangular_bound, triangular_prediction,
    triangular_prediction_branch, PredictionSet, TriangleBranch,
};
use crate::unicycle::{
    adaptive_headway_control, fixed_headway_control, goal_alignment, headway_frame, headway_point, unicycle_derivative,
    ControlInput, ControllerParams, UnicycleState,
};

/// Outcome of one property check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Largest violation amount seen; non-positive when every case holds exactly.
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckReport {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            samples: 0,
            violations: 0,
            worst: f64::NEG_INFINITY,
            tolerance,
        }
    }

    fn record(&mut self, amount: f64) {
        self.worst = self.worst.max(amount);
        if amount.is_nan() || amount > self.tolerance {
            self.violations += 1;
        }
    }

    fn case(&mut self) {
        self.samples += 1;
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.samples > 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} cases, {} violations, worst {:.3e} (tolerance {:.1e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.samples,
            self.violations,
            self.worst,
            self.tolerance
        )
    }
}

/// A random controller problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case {
    pub state: UnicycleState<f64>,
    pub goal: Vec2<f64>,
    pub params: ControllerParams<f64>,
}

/// Positions in `[-5, 5]²`, any orientation, `ε ∈ [0.1, 0.9]`, `κ ∈ [0.5, 2]`.
pub fn random_case<R: Rng + ?Sized>(rng: &mut R) -> Case {
    let mut point = || Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    let position = point();
    let goal = point();
    let theta = rng.gen_range(-PI..PI);
    let eps = rng.gen_range(0.1..0.9);
    let kappa = rng.gen_range(0.5..2.0);
    Case {
        state: UnicycleState::new(position, theta),
        goal,
        params: ControllerParams::new(eps, kappa, 1e-7).expect("sampled parameters are valid"),
    }
}

/// Same as [`random_case`] with the heading turned so that the goal
/// alignment is `ε + margin·(1 - ε)` for a uniform `margin ∈ (0, 1)`.
pub fn random_aligned_case<R: Rng + ?Sized>(rng: &mut R) -> Case {
    let mut c = random_case(rng);
    let eps = c.params.headway_coeff();
    let target = eps + rng.gen_range(0.01..0.99) * (1.0 - eps);
    c.state = with_alignment(&c.state, c.goal, target, rng.gen_bool(0.5));
    c
}

/// Heading with `ôᵀx̂ = alignment`, turned to either side of the goal direction.
pub fn with_alignment(state: &UnicycleState<f64>, goal: Vec2<f64>, alignment: f64, left: bool) -> UnicycleState<f64> {
    let to_goal = goal - state.position;
    let base = to_goal.y.atan2(to_goal.x);
    let turn = alignment.clamp(-1.0, 1.0).acos();
    UnicycleState::new(state.position, if left { base + turn } else { base - turn })
}

/// Closed-loop rollout with RK4 until `‖p - g‖ ≤ stop_radius` or `max_time`.
/// Returns the samples and whether the stop radius was reached.
pub fn rollout(case: &Case, step: f64, max_time: f64, stop_radius: f64) -> (Vec<UnicycleState<f64>>, bool) {
    let goal = case.goal;
    let reached = |_: f64, y: &[f64; 3]| Vec2::new(y[0], y[1]).distance(goal) <= stop_radius;
    let (traj, ok) = match integrate(
        closed_loop_field(goal, case.params),
        [case.state.position.x, case.state.position.y, case.state.orientation],
        step,
        max_time,
        reached,
    ) {
        Ok(t) => (t, true),
        Err(nc) => (nc.trajectory, false),
    };
    let states = traj
        .states
        .iter()
        .map(|y| UnicycleState::new(Vec2::new(y[0], y[1]), y[2]))
        .collect();
    (states, ok)
}

/// Integration settings shared by the trajectory checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RolloutConfig {
    pub step: f64,
    pub max_time: f64,
    pub stop_radius: f64,
}

impl Default for RolloutConfig {
    fn default() -> Self {
        Self {
            step: crate::simulation::SimConfig::<f64>::DEFAULT_STEP,
            max_time: 60.0,
            stop_radius: 1e-5,
        }
    }
}

/// `p = g ⇔ h = g`: every tenth case puts the robot on the goal and
/// measures `‖h - g‖`; the others measure `(1-ε)‖p-g‖ - ‖h-g‖`, relative to
/// `‖p-g‖`, which must be non-positive for `h` to stay off the goal.
pub fn goal_equivalence<R: Rng + ?Sized>(rng: &mut R, n: usize, tol: f64) -> CheckReport {
    let mut r = CheckReport::new("robot at goal iff headway point at goal", tol);
    for k in 0..n {
        let mut c = random_case(rng);
        r.case();
        if k % 10 == 0 {
            c.state = UnicycleState::new(c.goal, c.state.orientation);
            r.record(headway_point(&c.state, c.goal, &c.params).distance(c.goal));
        } else {
            let dist = c.state.position.distance(c.goal);
            let gap = headway_point(&c.state, c.goal, &c.params).distance(c.goal);
            let eps = c.params.headway_coeff();
            r.record(((1.0 - eps) * dist - gap) / dist);
        }
    }
    r
}

/// Robot position on the segment `[x_proj, x_ext]`; measures the distance
/// from `p` to that segment.
pub fn position_bound<R: Rng + ?Sized>(rng: &mut R, n: usize, tol: f64) -> CheckReport {
    let mut r = CheckReport::new("position between projected and extended", tol);
    for _ in 0..n {
        let c = random_case(rng);
        let f = headway_frame(&c.state, c.goal, &c.params);
        r.case();
        r.record(point_segment_distance(
            c.state.position,
            &Segment::new(f.projected, f.extended),
        ));
    }
    r
}

/// `‖x_proj - g‖ ≤ ‖p - g‖ ≤ ‖x_ext - g‖` together with the closed forms
/// `‖x_proj - g‖ = t̂ᵀ(g - p)` and `‖x_ext - g‖ = ‖x_proj - g‖ / √(1-ε²)`,
/// all relative to `‖p - g‖`.
pub fn distance_order<R: Rng + ?Sized>(rng: &mut R, n: usize, tol: f64) -> CheckReport {
    let mut r = CheckReport::new("projected <= robot <= extended goal distance", tol);
    for _ in 0..n {
        let c = random_case(rng);
        let f = headway_frame(&c.state, c.goal, &c.params);
        let eps = c.params.headway_coeff();
        let dp = f.projected.distance(c.goal);
        let dx = c.state.position.distance(c.goal);
        let de = f.extended.distance(c.goal);
        r.case();
        r.record(
            ((dp - dx) / dx)
                .max((dx - de) / dx)
                .max((dp - f.tangent.dot(c.goal - c.state.position)).abs() / dx)
                .max((de - dp / (1.0 - eps * eps).sqrt()).abs() / dx),
        );
    }
    r
}

/// Whether the side of the normal `n̂_h` is numerically determined. Once the
/// heading matches the goal direction to rounding precision the sign of
/// `(g - p)ᵀn̂` is noise and `x_ext` may land on its mirror image across the
/// headway line, at the same goal distance.
fn side_resolved(state: &UnicycleState<f64>, goal: Vec2<f64>) -> bool {
    let to_goal = goal - state.position;
    to_goal.dot(state.normal()).abs() > SIDE_RESOLUTION * to_goal.norm()
}

const SIDE_RESOLUTION: f64 = 1e-9;

/// Along closed-loop trajectories `x_proj(t) ∈ [g, x_proj(0)]`,
/// `x_ext(t) ∈ [g, x_ext(0)]` (where its side is resolved) and both goal
/// distances are non-increasing.
pub fn projected_extended_motion<R: Rng + ?Sized>(rng: &mut R, n: usize, cfg: &RolloutConfig, tol: f64) -> CheckReport {
    let mut r = CheckReport::new("projected/extended positions move straight to the goal", tol);
    for _ in 0..n {
        let c = random_case(rng);
        let (states, _) = rollout(&c, cfg.step, cfg.max_time, cfg.stop_radius);
        let f0 = headway_frame(&states[0], c.goal, &c.params);
        let proj_seg = Segment::new(c.goal, f0.projected);
        let ext_seg = Segment::new(c.goal, f0.extended);
        let mut prev = (f0.projected.distance(c.goal), f0.extended.distance(c.goal));
        r.case();
        let mut worst = f64::NEG_INFINITY;
        for s in &states[1..] {
            let f = headway_frame(s, c.goal, &c.params);
            let now = (f.projected.distance(c.goal), f.extended.distance(c.goal));
            worst = worst
                .max(point_segment_distance(f.projected, &proj_seg))
                .max(now.0 - prev.0)
                .max(now.1 - prev.1);
            if side_resolved(s, c.goal) {
                worst = worst.max(point_segment_distance(f.extended, &ext_seg));
            }
            prev = now;
        }
        r.record(worst);
    }
    r
}

/// Pointwise: `d/dt(ôᵀx̂) ≥ (κ/ε)(n̂ᵀx̂)²(1 - ε ôᵀx̂)`, with the left side
/// evaluated in closed form from the control input. Measures the shortfall
/// relative to `max(1, rhs)`.
pub fn goal_alignment_rate<R: Rng + ?Sized>(rng: &mut R, n: usize, tol: f64) -> CheckReport {
    let mut r = CheckReport::new("goal alignment rate bound", tol);
    for _ in 0..n {
        let c = random_case(rng);
        let to_goal = c.goal - c.state.position;
        let dist = to_goal.norm();
        let dir = to_goal / dist;
        let align = c.state.heading().dot(dir);
        let cross = c.state.normal().dot(dir);
        let u = adaptive_headway_control(&c.state, c.goal, &c.params);
        // d/dt(ôᵀx̂) = ω n̂ᵀx̂ - v (n̂ᵀx̂)² / ‖g - p‖
        let rate = u.angular * cross - u.linear * cross * cross / dist;
        let eps = c.params.headway_coeff();
        let bound = c.params.ref_gain() / eps * cross * cross * (1.0 - eps * align);
        r.case();
        r.record((bound - rate) / bound.abs().max(1.0));
    }
    r
}

/// Along closed-loop trajectories the goal alignment never decreases.
pub fn alignment_monotone<R: Rng + ?Sized>(rng: &mut R, n: usize, cfg: &RolloutConfig, tol: f64) -> CheckReport {
    let mut r = CheckReport::new("goal alignment non-decreasing along trajectories", tol);
    for _ in 0..n {
        let c = random_case(rng);
        let (states, _) = rollout(&c, cfg.step, cfg.max_time, cfg.stop_radius);
        let align: Vec<f64> = states.iter().filter_map(|s| goal_alignment(s, c.goal)).collect();
        r.case();
        r.record(align.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max));
    }
    r
}

/// From aligned starts (`ôᵀx̂ > ε`) the goal distance never increases and
/// the linear velocity stays non-negative.
pub fn forward_motion<R: Rng + ?Sized>(rng: &mut R, n: usize, cfg: &RolloutConfig, tol: f64) -> CheckReport {
    let mut r = CheckReport::new("aligned starts move forward and approach the goal", tol);
    for _ in 0..n {
        let c = random_aligned_case(rng);
        let (states, _) = rollout(&c, cfg.step, cfg.max_time, cfg.stop_radius);
        let mut worst = f64::NEG_INFINITY;
        for w in states.windows(2) {
            let v = adaptive_headway_control(&w[0], c.goal, &c.params).linear;
            worst = worst
                .max(w[1].position.distance(c.goal) - w[0].position.distance(c.goal))
                .max(-v);
        }
        r.case();
        r.record(worst);
    }
    r
}

/// Every rollout reaches the stop radius within the time budget; the
/// amount is the final goal distance minus the stop radius.
pub fn global_convergence<R: Rng + ?Sized>(rng: &mut R, n: usize, cfg: &RolloutConfig) -> CheckReport {
    let mut r = CheckReport::new("global convergence to the goal", 0.0);
    for _ in 0..n {
        let c = random_case(rng);
        let (states, _) = rollout(&c, cfg.step, cfg.max_time, cfg.stop_radius);
        let last = states.last().expect("rollout has the initial sample");
        r.case();
        r.record(last.position.distance(c.goal) - cfg.stop_radius);
    }
    r
}

/// `ḣ = -κ(h - g)` under the adaptive controller, with
/// `ḣ = ṗ + ḋ ô + d ω n̂` and `ḋ = -ε v ôᵀx̂`; relative to `max(1, κ‖h-g‖)`.
pub fn headway_reference_dynamics<R: Rng + ?Sized>(rng: &mut R, n: usize, tol: f64) -> CheckReport {
    let mut r = CheckReport::new("headway point follows first-order reference dynamics", tol);
    for _ in 0..n {
        let c = random_case(rng);
        let s = &c.state;
        let eps = c.params.headway_coeff();
        let kappa = c.params.ref_gain();
        let to_goal = c.goal - s.position;
        let dist = to_goal.norm();
        let u = adaptive_headway_control(s, c.goal, &c.params);
        let d = eps * dist;
        let d_rate = -eps * u.linear * s.heading().dot(to_goal / dist);
        let h_rate = s.heading() * (u.linear + d_rate) + s.normal() * (d * u.angular);
        let h = headway_point(s, c.goal, &c.params);
        let expected = (h - c.goal) * -kappa;
        r.case();
        r.record((h_rate - expected).norm() / (kappa * h.distance(c.goal)).max(1.0));
    }
    r
}

/// The sets a check is run against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionKind {
    Circle,
    TriangleBound,
    Triangle,
}

impl PredictionKind {
    pub const ALL: [PredictionKind; 3] = [Self::Circle, Self::TriangleBound, Self::Triangle];

    pub fn name(self) -> &'static str {
        match self {
            Self::Circle => "circular prediction",
            Self::TriangleBound => "triangular bound",
            Self::Triangle => "triangular prediction",
        }
    }

    pub fn set(
        self,
        state: &UnicycleState<f64>,
        goal: Vec2<f64>,
        params: &ControllerParams<f64>,
    ) -> PredictionSet<f64> {
        match self {
            Self::Circle => circular_prediction(state, goal, params),
            Self::TriangleBound => PredictionSet::Tri {
                triangle: triangular_bound(state, goal, params),
            },
            Self::Triangle => triangular_prediction(state, goal, params),
        }
    }
}

/// Whole closed-loop trajectories inside the prediction set of their
/// initial state; measures the largest distance of a sample from the set.
pub fn prediction_containment<R: Rng + ?Sized>(
    rng: &mut R,
    kind: PredictionKind,
    n: usize,
    cfg: &RolloutConfig,
    tol: f64,
) -> CheckReport {
    let mut r = CheckReport::new(&format!("containment: {}", kind.name()), tol);
    for _ in 0..n {
        let c = random_case(rng);
        let set = kind.set(&c.state, c.goal, &c.params);
        let (states, _) = rollout(&c, cfg.step, cfg.max_time, cfg.stop_radius);
        r.case();
        r.record(
            states
                .iter()
                .map(|s| prediction_distance(&set, s.position))
                .fold(f64::NEG_INFINITY, f64::max),
        );
    }
    r
}

/// Circular prediction radii never grow along a trajectory; measures the
/// largest increase between consecutive samples.
pub fn circular_positive_inclusion<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    cfg: &RolloutConfig,
    tol: f64,
) -> CheckReport {
    let mut r = CheckReport::new("positive inclusion: circular radii non-increasing", tol);
    for _ in 0..n {
        let c = random_case(rng);
        let (states, _) = rollout(&c, cfg.step, cfg.max_time, cfg.stop_radius);
        let radii: Vec<f64> = states
            .iter()
            .map(|s| prediction_goal_radius(&circular_prediction(s, c.goal, &c.params), c.goal))
            .collect();
        r.case();
        r.record(radii.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max));
    }
    r
}

/// Goal radius of the prediction at the state where the rollout stopped.
/// Rollouts that never reached the stop radius count as violations.
pub fn radius_decay<R: Rng + ?Sized>(
    rng: &mut R,
    kind: PredictionKind,
    n: usize,
    cfg: &RolloutConfig,
    tol: f64,
) -> CheckReport {
    let mut r = CheckReport::new(&format!("radius decay: {}", kind.name()), tol);
    for _ in 0..n {
        let c = random_case(rng);
        let (states, converged) = rollout(&c, cfg.step, cfg.max_time, cfg.stop_radius);
        let last = states.last().expect("rollout has the initial sample");
        r.case();
        let radius = prediction_goal_radius(&kind.set(last, c.goal, &c.params), c.goal);
        r.record(if converged { radius } else { f64::INFINITY });
    }
    r
}

/// At alignment exactly `ε` both triangular constructions give the same
/// triangle; measures the largest vertex mismatch under the best matching.
pub fn triangle_branch_continuity<R: Rng + ?Sized>(rng: &mut R, n: usize, tol: f64) -> CheckReport {
    let mut r = CheckReport::new("triangular prediction branches coincide at alignment = eps", tol);
    for _ in 0..n {
        let mut c = random_case(rng);
        c.state = with_alignment(&c.state, c.goal, c.params.headway_coeff(), rng.gen_bool(0.5));
        let a = triangular_prediction_branch(&c.state, c.goal, &c.params, TriangleBranch::Aligned);
        let m = triangular_prediction_branch(&c.state, c.goal, &c.params, TriangleBranch::Misaligned);
        let straight = a.v1.distance(m.v1).max(a.v2.distance(m.v2));
        let crossed = a.v1.distance(m.v2).max(a.v2.distance(m.v1));
        r.case();
        r.record(a.v0.distance(m.v0).max(straight.min(crossed)));
    }
    r
}

/// Measured RK4 step-halving error ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalvingRatios {
    /// Constant input against the exact circular arc.
    pub constant_input: f64,
    /// Closed loop away from the goal against a fine-step reference.
    pub closed_loop: f64,
}

fn arc(start: &UnicycleState<f64>, u: &ControlInput<f64>, t: f64) -> [f64; 3] {
    let (v, w, th) = (u.linear, u.angular, start.orientation);
    [
        start.position.x + v / w * ((th + w * t).sin() - th.sin()),
        start.position.y - v / w * ((th + w * t).cos() - th.cos()),
        th + w * t,
    ]
}

fn rk4_final<F: FnMut(f64, &[f64; 3]) -> [f64; 3]>(field: &mut F, y0: [f64; 3], step: f64, steps: usize) -> [f64; 3] {
    let mut y = y0;
    for k in 0..steps {
        y = rk4_step(field, k as f64 * step, &y, step);
    }
    y
}

fn position_error(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Error at `T = 2 s` with steps `h` and `h/2`, `h = 0.1`.
pub fn rk4_halving_ratios() -> HalvingRatios {
    let start = UnicycleState::new(Vec2::new(0.3, -0.2), 0.4);
    let u = ControlInput::new(1.0, 1.3);
    let mut constant = |_: f64, y: &[f64; 3]| {
        let s = UnicycleState {
            position: Vec2::new(y[0], y[1]),
            orientation: y[2],
        };
        let d = unicycle_derivative(&s, &u);
        [d.velocity.x, d.velocity.y, d.angular]
    };
    let y0 = [start.position.x, start.position.y, start.orientation];
    let exact = arc(&start, &u, 2.0);
    let coarse = position_error(&rk4_final(&mut constant, y0, 0.1, 20), &exact);
    let fine = position_error(&rk4_final(&mut constant, y0, 0.05, 40), &exact);

    let goal = Vec2::new(6.0, 4.0);
    let params = ControllerParams::new(0.5, 1.0, 1e-4).expect("valid parameters");
    let mut field = closed_loop_field(goal, params);
    let reference = rk4_final(&mut field, y0, 0.1 / 64.0, 20 * 64);
    let cl_coarse = position_error(&rk4_final(&mut field, y0, 0.1, 20), &reference);
    let cl_fine = position_error(&rk4_final(&mut field, y0, 0.05, 40), &reference);
    HalvingRatios {
        constant_input: coarse / fine,
        closed_loop: cl_coarse / cl_fine,
    }
}

/// Integrates closed loops and evaluates `n̂ᵀṗ` at every vector-field
/// evaluation, relative to `max(|v|, 1)`.
pub fn nonholonomic_constraint<R: Rng + ?Sized>(rng: &mut R, n: usize, cfg: &RolloutConfig, tol: f64) -> CheckReport {
    let mut r = CheckReport::new("nonholonomic constraint at every derivative evaluation", tol);
    for _ in 0..n {
        let c = random_case(rng);
        let mut worst = f64::NEG_INFINITY;
        let mut evals = 0usize;
        let field = |_: f64, y: &[f64; 3]| {
            let s = UnicycleState::new(Vec2::new(y[0], y[1]), y[2]);
            let u = adaptive_headway_control(&s, c.goal, &c.params);
            let d = unicycle_derivative(&s, &u);
            worst = worst.max(s.normal().dot(d.velocity).abs() / u.linear.abs().max(1.0));
            evals += 1;
            [d.velocity.x, d.velocity.y, d.angular]
        };
        let goal = c.goal;
        let stop = cfg.stop_radius;
        let _ = integrate(
            field,
            [c.state.position.x, c.state.position.y, c.state.orientation],
            cfg.step,
            cfg.max_time,
            |_, y| Vec2::new(y[0], y[1]).distance(goal) <= stop,
        );
        r.samples += evals;
        r.record(worst);
    }
    r
}

/// The fixed-distance baseline leaves the robot at distance `d` from the
/// goal; measures `|‖p(T) - g‖ - d|` after `duration` seconds.
pub fn fixed_headway_offset<R: Rng + ?Sized>(rng: &mut R, n: usize, duration: f64, tol: f64) -> CheckReport {
    let mut r = CheckReport::new("fixed headway baseline stops short of the goal by d", tol);
    for _ in 0..n {
        let c = random_case(rng);
        let d = rng.gen_range(0.1..1.0);
        let kappa = c.params.ref_gain();
        let goal = c.goal;
        let field = |_: f64, y: &[f64; 3]| {
            let s = UnicycleState::new(Vec2::new(y[0], y[1]), y[2]);
            let u = fixed_headway_control(&s, goal, kappa, d).expect("positive distance");
            let dv = unicycle_derivative(&s, &u);
            [dv.velocity.x, dv.velocity.y, dv.angular]
        };
        let traj = match integrate(
            field,
            [c.state.position.x, c.state.position.y, c.state.orientation],
            0.01,
            duration,
            |_, _| false,
        ) {
            Ok(t) => t,
            Err(nc) => nc.trajectory,
        };
        let y = traj.last().1;
        r.case();
        r.record((Vec2::new(y[0], y[1]).distance(goal) - d).abs());
    }
    r
}

/// Sample counts of the standard suite, scaled by `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteSize {
    pub pointwise: usize,
    pub trajectories: usize,
}

impl SuiteSize {
    pub fn full() -> Self {
        Self {
            pointwise: 10_000,
            trajectories: 200,
        }
    }

    pub fn scaled(scale: f64) -> Self {
        let f = Self::full();
        let s = |n: usize| ((n as f64 * scale).round() as usize).max(1);
        Self {
            pointwise: s(f.pointwise),
            trajectories: s(f.trajectories),
        }
    }
}

/// Runs every check with its default tolerance from one seeded generator.
pub fn standard_suite<R: Rng + ?Sized>(rng: &mut R, size: SuiteSize) -> Vec<CheckReport> {
    let cfg = RolloutConfig::default();
    let (p, t) = (size.pointwise, size.trajectories);
    let mut out = vec![
        goal_equivalence(rng, p, 1e-12),
        position_bound(rng, p, 1e-9),
        distance_order(rng, p, 1e-12),
        goal_alignment_rate(rng, p, 1e-9),
        headway_reference_dynamics(rng, p, 1e-9),
        projected_extended_motion(rng, t, &cfg, 1e-6),
        alignment_monotone(rng, t, &cfg, 1e-6),
        forward_motion(rng, t, &cfg, 1e-6),
        global_convergence(rng, t, &cfg),
    ];
    for kind in PredictionKind::ALL {
        out.push(prediction_containment(rng, kind, t, &cfg, 1e-6));
    }
    out.push(circular_positive_inclusion(rng, t, &cfg, 1e-9));
    for kind in [PredictionKind::Circle, PredictionKind::Triangle] {
        out.push(radius_decay(rng, kind, t, &cfg, 1e-3));
    }
    out.push(triangle_branch_continuity(rng, (p / 10).max(1), 1e-9));
    out.push(nonholonomic_constraint(rng, (t / 10).max(1), &cfg, 4.0 * f64::EPSILON));
    out.push(fixed_headway_offset(rng, (t / 10).max(1), 40.0, 1e-3));
    out
}
