//! Feedback motion prediction for the adaptive headway controller.
//!
//! Each method returns a region that contains the whole future position
//! trajectory of the closed loop towards a fixed goal:
//!
//! - circular: a disk around the goal,
//! - triangular: a triangle with the goal as one vertex, continuous across
//!   the alignment switch,
//! - forward simulation: the sampled trajectory itself, padded by half the
//!   largest step chord.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geom::{point_segment_distance, triangle_point_distance, Segment, Triangle, Vec2};
use crate::ode::{array_to_state, closed_loop_field, integrate, state_to_array};
use crate::scalar::Scalar;
use crate::unicycle::{
    goal_alignment, headway_distance, headway_frame, headway_point, ControllerParams, UnicycleState,
};

#[derive(Debug, Clone, PartialEq)]
pub enum PredictionSet<T> {
    Disk { center: Vec2<T>, radius: T },
    Tri { triangle: Triangle<T> },
    Hull { points: Vec<Vec2<T>>, padding: T },
}

impl<T: Scalar> PredictionSet<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Disk { .. } => "disk",
            Self::Tri { .. } => "triangle",
            Self::Hull { .. } => "hull",
        }
    }
}

/// Settings of the forward-simulation predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardSimConfig<T> {
    pub step: T,
    pub horizon: T,
    pub goal_tolerance: T,
}

impl<T: Scalar> Default for ForwardSimConfig<T> {
    fn default() -> Self {
        Self {
            step: T::lit(0.02),
            horizon: T::lit(60.0),
            goal_tolerance: T::lit(1e-3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictionMethod<T> {
    Circle,
    Triangle,
    ForwardSim(ForwardSimConfig<T>),
}

impl<T: Scalar> PredictionMethod<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Circle => "circle",
            Self::Triangle => "triangle",
            Self::ForwardSim(_) => "forward-sim",
        }
    }

    /// All three methods, forward simulation with the given settings.
    pub fn all(forward: ForwardSimConfig<T>) -> [Self; 3] {
        [Self::Circle, Self::Triangle, Self::ForwardSim(forward)]
    }
}

impl<T: Scalar> fmt::Display for PredictionMethod<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("unknown prediction method {0:?} (expected circle, triangle or forward-sim)")]
pub struct UnknownMethod(pub String);

impl<T: Scalar> FromStr for PredictionMethod<T> {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "circle" => Ok(Self::Circle),
            "triangle" => Ok(Self::Triangle),
            "forward-sim" => Ok(Self::ForwardSim(ForwardSimConfig::default())),
            other => Err(UnknownMethod(other.to_string())),
        }
    }
}

fn is_aligned<T: Scalar>(state: &UnicycleState<T>, goal: Vec2<T>, params: &ControllerParams<T>) -> bool {
    goal_alignment(state, goal).is_none_or(|a| a >= params.headway_coeff())
}

/// Disk around the goal with radius `‖p - g‖` when the robot is aligned with
/// the goal (alignment `≥ ε`), and `‖x_ext - g‖` otherwise.
pub fn circular_prediction<T: Scalar>(
    state: &UnicycleState<T>,
    goal: Vec2<T>,
    params: &ControllerParams<T>,
) -> PredictionSet<T> {
    let radius = if is_aligned(state, goal, params) {
        state.position.distance(goal)
    } else {
        headway_frame(state, goal, params).extended.distance(goal)
    };
    PredictionSet::Disk { center: goal, radius }
}

/// `conv(g, p, h)` when aligned, `conv(g, x_proj, x_ext)` otherwise.
pub fn triangular_bound<T: Scalar>(
    state: &UnicycleState<T>,
    goal: Vec2<T>,
    params: &ControllerParams<T>,
) -> Triangle<T> {
    if state.position == goal {
        return Triangle::point(goal);
    }
    if is_aligned(state, goal, params) {
        Triangle::new(goal, state.position, headway_point(state, goal, params))
    } else {
        let f = headway_frame(state, goal, params);
        Triangle::new(goal, f.projected, f.extended)
    }
}

/// The two vertex formulas of the triangular prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleBranch {
    /// `conv(g, p, ĥ)`
    Aligned,
    /// `conv(g, x_ext+, x_ext-)`
    Misaligned,
}

/// Evaluates one branch of the triangular prediction regardless of the
/// actual alignment.
pub fn triangular_prediction_branch<T: Scalar>(
    state: &UnicycleState<T>,
    goal: Vec2<T>,
    params: &ControllerParams<T>,
    branch: TriangleBranch,
) -> Triangle<T> {
    let Some(alignment) = goal_alignment(state, goal) else {
        return Triangle::point(goal);
    };
    let eps = params.headway_coeff();
    match branch {
        TriangleBranch::Aligned => {
            let d = headway_distance(state, goal, params);
            let h = headway_point(state, goal, params);
            let stretch = (T::one() - alignment) / (T::one() - eps);
            let h_hat = h + state.heading() * (stretch * d);
            Triangle::new(goal, state.position, h_hat)
        }
        TriangleBranch::Misaligned => {
            let f = headway_frame(state, goal, params);
            let offset = f.tangent.perp() * (params.extension_scale() * f.projected.distance(goal));
            Triangle::new(goal, f.projected + offset, f.projected - offset)
        }
    }
}

pub fn triangular_prediction<T: Scalar>(
    state: &UnicycleState<T>,
    goal: Vec2<T>,
    params: &ControllerParams<T>,
) -> PredictionSet<T> {
    let branch = if is_aligned(state, goal, params) {
        TriangleBranch::Aligned
    } else {
        TriangleBranch::Misaligned
    };
    PredictionSet::Tri {
        triangle: triangular_prediction_branch(state, goal, params, branch),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("forward simulation did not reach the goal within its {horizon} s horizon")]
pub struct BudgetExhausted<T: Scalar> {
    pub horizon: f64,
    /// Hull of the samples computed so far (goal not appended).
    pub partial: PredictionSet<T>,
    pub last: UnicycleState<T>,
}

fn padded_hull<T: Scalar>(points: Vec<Vec2<T>>) -> PredictionSet<T> {
    let half = T::lit(0.5);
    let padding = points
        .windows(2)
        .map(|w| w[0].distance(w[1]) * half)
        .fold(T::zero(), T::max);
    PredictionSet::Hull { points, padding }
}

/// Integrates the closed loop with the goal held fixed and returns the
/// sampled positions (goal appended) padded by half the largest step chord.
pub fn forward_sim_prediction<T: Scalar>(
    state: &UnicycleState<T>,
    goal: Vec2<T>,
    params: &ControllerParams<T>,
    sim: &ForwardSimConfig<T>,
) -> Result<PredictionSet<T>, BudgetExhausted<T>> {
    if state.position == goal {
        return Ok(PredictionSet::Hull {
            points: vec![goal],
            padding: T::zero(),
        });
    }
    let tol = sim.goal_tolerance.max(params.goal_tolerance());
    let tol2 = tol * tol;
    let reached = move |_: T, y: &[T; 3]| {
        let dx = y[0] - goal.x;
        let dy = y[1] - goal.y;
        dx * dx + dy * dy <= tol2
    };
    let to_points = |states: &[[T; 3]]| -> Vec<Vec2<T>> { states.iter().map(|y| Vec2::new(y[0], y[1])).collect() };
    match integrate(
        closed_loop_field(goal, *params),
        state_to_array(state),
        sim.step,
        sim.horizon,
        reached,
    ) {
        Ok(traj) => {
            let mut points = to_points(&traj.states);
            points.push(goal);
            Ok(padded_hull(points))
        }
        Err(nc) => Err(BudgetExhausted {
            horizon: nc.max_time,
            last: array_to_state(&nc.trajectory.last().1),
            partial: padded_hull(to_points(&nc.trajectory.states)),
        }),
    }
}

/// Prediction with the given method. An exhausted forward simulation is
/// returned as its partial hull; see [`BudgetExhausted`].
pub fn predict<T: Scalar>(
    method: &PredictionMethod<T>,
    state: &UnicycleState<T>,
    goal: Vec2<T>,
    params: &ControllerParams<T>,
) -> Result<PredictionSet<T>, BudgetExhausted<T>> {
    match method {
        PredictionMethod::Circle => Ok(circular_prediction(state, goal, params)),
        PredictionMethod::Triangle => Ok(triangular_prediction(state, goal, params)),
        PredictionMethod::ForwardSim(cfg) => forward_sim_prediction(state, goal, params, cfg),
    }
}

fn polyline_distance<T: Scalar>(points: &[Vec2<T>], z: Vec2<T>) -> T {
    if points.len() == 1 {
        return points[0].distance(z);
    }
    points
        .windows(2)
        .map(|w| point_segment_distance(z, &Segment::new(w[0], w[1])))
        .fold(T::infinity(), T::min)
}

/// Minimum distance from the set to `z`, zero inside.
pub fn prediction_distance<T: Scalar>(set: &PredictionSet<T>, z: Vec2<T>) -> T {
    match set {
        PredictionSet::Disk { center, radius } => (center.distance(z) - *radius).max(T::zero()),
        PredictionSet::Tri { triangle } => triangle_point_distance(triangle, z),
        PredictionSet::Hull { points, padding } => (polyline_distance(points, z) - *padding).max(T::zero()),
    }
}

/// Largest distance from `goal` to a point of the set.
pub fn prediction_goal_radius<T: Scalar>(set: &PredictionSet<T>, goal: Vec2<T>) -> T {
    match set {
        PredictionSet::Disk { center, radius } => center.distance(goal) + *radius,
        PredictionSet::Tri { triangle } => triangle
            .vertices()
            .iter()
            .map(|v| v.distance(goal))
            .fold(T::zero(), T::max),
        PredictionSet::Hull { points, padding } => {
            points.iter().map(|p| p.distance(goal)).fold(T::zero(), T::max) + *padding
        }
    }
}

/// Whether `z` lies in the set up to `tol`.
pub fn prediction_contains<T: Scalar>(set: &PredictionSet<T>, z: Vec2<T>, tol: T) -> bool {
    prediction_distance(set, z) <= tol
}
