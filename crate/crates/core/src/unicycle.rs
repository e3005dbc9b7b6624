//! Kinematic unicycle model, the adaptive headway controller, the
//! fixed-headway baseline and the headway geometric frame.
//!
//! Notation used in the docs below: `p` robot position, `θ` orientation,
//! `g` goal, `ô = (cos θ, sin θ)`, `n̂ = (-sin θ, cos θ)`,
//! `x̂ = (g - p) / ‖g - p‖`, `ε` the headway coefficient and `κ` the
//! reference gain.

use thiserror::Error;

use crate::geom::Vec2;
use crate::scalar::{wrap_angle, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("headway_coeff must lie strictly inside (0, 1), got {0}")]
    HeadwayCoeff(f64),
    #[error("ref_gain must be positive, got {0}")]
    RefGain(f64),
    #[error("goal_tolerance must be non-negative, got {0}")]
    GoalTolerance(f64),
    #[error("fixed headway distance must be positive, got {0}")]
    FixedDistance(f64),
}

/// Position and forward orientation; orientation is kept in `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnicycleState<T> {
    pub position: Vec2<T>,
    pub orientation: T,
}

impl<T: Scalar> UnicycleState<T> {
    pub fn new(position: Vec2<T>, orientation: T) -> Self {
        Self {
            position,
            orientation: wrap_angle(orientation),
        }
    }

    /// `ô(θ)`
    #[inline]
    pub fn heading(&self) -> Vec2<T> {
        Vec2::from_angle(self.orientation)
    }

    /// `n̂(θ)`, the heading rotated a quarter turn counterclockwise.
    #[inline]
    pub fn normal(&self) -> Vec2<T> {
        self.heading().perp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInput<T> {
    /// m/s
    pub linear: T,
    /// rad/s
    pub angular: T,
}

impl<T: Scalar> ControlInput<T> {
    pub fn new(linear: T, angular: T) -> Self {
        Self { linear, angular }
    }

    pub fn stop() -> Self {
        Self::new(T::zero(), T::zero())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerParams<T> {
    headway_coeff: T,
    ref_gain: T,
    goal_tolerance: T,
}

impl<T: Scalar> ControllerParams<T> {
    pub const DEFAULT_GOAL_TOLERANCE: f64 = 1e-4;

    pub fn new(headway_coeff: T, ref_gain: T, goal_tolerance: T) -> Result<Self, ParamError> {
        if !(headway_coeff > T::zero() && headway_coeff < T::one()) {
            return Err(ParamError::HeadwayCoeff(headway_coeff.as_f64()));
        }
        if !(ref_gain > T::zero() && ref_gain.is_finite()) {
            return Err(ParamError::RefGain(ref_gain.as_f64()));
        }
        if !(goal_tolerance >= T::zero() && goal_tolerance.is_finite()) {
            return Err(ParamError::GoalTolerance(goal_tolerance.as_f64()));
        }
        Ok(Self {
            headway_coeff,
            ref_gain,
            goal_tolerance,
        })
    }

    pub fn with_defaults(headway_coeff: T, ref_gain: T) -> Result<Self, ParamError> {
        Self::new(headway_coeff, ref_gain, T::lit(Self::DEFAULT_GOAL_TOLERANCE))
    }

    pub fn headway_coeff(&self) -> T {
        self.headway_coeff
    }

    pub fn ref_gain(&self) -> T {
        self.ref_gain
    }

    pub fn goal_tolerance(&self) -> T {
        self.goal_tolerance
    }

    /// Copy with a different headway coefficient.
    pub fn with_headway_coeff(&self, headway_coeff: T) -> Result<Self, ParamError> {
        Self::new(headway_coeff, self.ref_gain, self.goal_tolerance)
    }

    /// Scale `ε / √(1 - ε²)` of the extended position offset.
    pub fn extension_scale(&self) -> T {
        let e = self.headway_coeff;
        e / (T::one() - e * e).sqrt()
    }
}

/// Goal alignment `ôᵀx̂ ∈ [-1, 1]`, or `None` when the robot sits on the goal.
pub fn goal_alignment<T: Scalar>(state: &UnicycleState<T>, goal: Vec2<T>) -> Option<T> {
    let to_goal = goal - state.position;
    let dist = to_goal.norm();
    if dist > T::zero() {
        Some(state.heading().dot(to_goal) / dist)
    } else {
        None
    }
}

/// `d = ε‖p - g‖`
pub fn headway_distance<T: Scalar>(state: &UnicycleState<T>, goal: Vec2<T>, params: &ControllerParams<T>) -> T {
    params.headway_coeff * state.position.distance(goal)
}

/// `h = p + d ô(θ)`
pub fn headway_point<T: Scalar>(state: &UnicycleState<T>, goal: Vec2<T>, params: &ControllerParams<T>) -> Vec2<T> {
    state.position + state.heading() * headway_distance(state, goal, params)
}

/// Adaptive headway motion controller.
///
/// `v = κ‖g - p‖(ôᵀx̂ - ε) / (1 - ε ôᵀx̂)` and `ω = (κ/ε) n̂ᵀx̂`, which makes
/// the headway point follow `ḣ = -κ(h - g)`. Inside the goal tolerance ball
/// the input is exactly zero.
pub fn adaptive_headway_control<T: Scalar>(
    state: &UnicycleState<T>,
    goal: Vec2<T>,
    params: &ControllerParams<T>,
) -> ControlInput<T> {
    let to_goal = goal - state.position;
    let dist = to_goal.norm();
    if dist <= params.goal_tolerance || dist == T::zero() {
        return ControlInput::stop();
    }
    let dir = to_goal / dist;
    let eps = params.headway_coeff;
    let kappa = params.ref_gain;
    let align = state.heading().dot(dir);
    // 1 - ε ôᵀx̂ >= 1 - ε > 0
    let linear = kappa * dist * (align - eps) / (T::one() - eps * align);
    let angular = kappa / eps * state.normal().dot(dir);
    ControlInput::new(linear, angular)
}

/// Standard fixed-distance headway controller,
/// `v = -κ ôᵀ(p - g) - κd`, `ω = -(κ/d) n̂ᵀ(p - g)`.
///
/// Drives the headway point to the goal but leaves the robot `d` short of it.
pub fn fixed_headway_control<T: Scalar>(
    state: &UnicycleState<T>,
    goal: Vec2<T>,
    gain: T,
    fixed_distance: T,
) -> Result<ControlInput<T>, ParamError> {
    if !(fixed_distance > T::zero() && fixed_distance.is_finite()) {
        return Err(ParamError::FixedDistance(fixed_distance.as_f64()));
    }
    let offset = state.position - goal;
    let linear = -gain * state.heading().dot(offset) - gain * fixed_distance;
    let angular = -gain * state.normal().dot(offset) / fixed_distance;
    Ok(ControlInput::new(linear, angular))
}

/// Geometry of the headway point motion relative to the goal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadwayFrame<T> {
    pub headway_point: Vec2<T>,
    /// Unit direction of headway point motion `(g - h)/‖g - h‖`, zero at the goal.
    pub tangent: Vec2<T>,
    /// Tangent turned towards the side the robot is on, zero at the goal.
    pub normal: Vec2<T>,
    /// `x_proj = g + t̂ t̂ᵀ(p - g)`
    pub projected: Vec2<T>,
    /// `x_ext = x_proj + ε/√(1-ε²) ‖x_proj - g‖ n̂_h`
    pub extended: Vec2<T>,
}

pub fn headway_frame<T: Scalar>(
    state: &UnicycleState<T>,
    goal: Vec2<T>,
    params: &ControllerParams<T>,
) -> HeadwayFrame<T> {
    let h = headway_point(state, goal, params);
    let to_goal = goal - h;
    let gap = to_goal.norm();
    if gap == T::zero() || state.position == goal {
        return HeadwayFrame {
            headway_point: goal,
            tangent: Vec2::zero(),
            normal: Vec2::zero(),
            projected: goal,
            extended: goal,
        };
    }
    let tangent = to_goal / gap;
    // tie (g - p)ᵀn̂(θ) = 0 takes the counterclockwise branch
    let normal = if (goal - state.position).dot(state.normal()) >= T::zero() {
        tangent.perp()
    } else {
        -tangent.perp()
    };
    let projected = goal + tangent * tangent.dot(state.position - goal);
    let extended = projected + normal * (params.extension_scale() * projected.distance(goal));
    HeadwayFrame {
        headway_point: h,
        tangent,
        normal,
        projected,
        extended,
    }
}

/// Time derivative of a unicycle state: `(ṗ, θ̇)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative<T> {
    pub velocity: Vec2<T>,
    pub angular: T,
}

/// `ṗ = v ô(θ)`, `θ̇ = ω`.
pub fn unicycle_derivative<T: Scalar>(state: &UnicycleState<T>, input: &ControlInput<T>) -> StateDerivative<T> {
    StateDerivative {
        velocity: state.heading() * input.linear,
        angular: input.angular,
    }
}
