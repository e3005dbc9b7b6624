//! Fixed-step classical Runge-Kutta integration over fixed-size state arrays.

use thiserror::Error;

use crate::geom::Vec2;
use crate::scalar::Scalar;
use crate::unicycle::{adaptive_headway_control, unicycle_derivative, ControllerParams, UnicycleState};

/// One RK4 step of size `h` from `(t, y)`.
pub fn rk4_step<T, const N: usize, F>(field: &mut F, t: T, y: &[T; N], h: T) -> [T; N]
where
    T: Scalar,
    F: FnMut(T, &[T; N]) -> [T; N],
{
    let half = h / T::lit(2.0);
    let axpy = |a: &[T; N], k: &[T; N], s: T| -> [T; N] { std::array::from_fn(|i| a[i] + k[i] * s) };

    let k1 = field(t, y);
    let k2 = field(t + half, &axpy(y, &k1, half));
    let k3 = field(t + half, &axpy(y, &k2, half));
    let k4 = field(t + h, &axpy(y, &k3, h));
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    std::array::from_fn(|i| y[i] + (k1[i] + two * k2[i] + two * k3[i] + k4[i]) * sixth)
}

/// Dense output: one sample per step, starting with the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T, const N: usize> {
    pub times: Vec<T>,
    pub states: Vec<[T; N]>,
}

impl<T: Scalar, const N: usize> Trajectory<T, N> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> (T, [T; N]) {
        (
            *self.times.last().expect("trajectory holds the initial sample"),
            *self.states.last().expect("trajectory holds the initial sample"),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("integration did not reach its stopping condition within {max_time} s")]
pub struct NonConvergence<T: Scalar, const N: usize> {
    pub max_time: f64,
    /// Everything integrated up to `max_time`; the last sample is the final state.
    pub trajectory: Trajectory<T, N>,
}

/// Integrates `field` from `initial` at `t = 0` with step `step` until
/// `stop(t, y)` holds (checked at every sample, including the first) or
/// `max_time` is reached.
pub fn integrate<T, const N: usize, F, S>(
    mut field: F,
    initial: [T; N],
    step: T,
    max_time: T,
    mut stop: S,
) -> Result<Trajectory<T, N>, NonConvergence<T, N>>
where
    T: Scalar,
    F: FnMut(T, &[T; N]) -> [T; N],
    S: FnMut(T, &[T; N]) -> bool,
{
    assert!(step > T::zero(), "integration step must be positive");
    // a horizon that is a whole multiple of the step must not gain an extra step from round-off
    let ratio = max_time / step;
    let steps = (ratio - ratio * T::lit(1e-9)).ceil().to_usize().unwrap_or(0);
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps.min(1 << 16) + 1),
        states: Vec::with_capacity(steps.min(1 << 16) + 1),
    };
    let mut y = initial;
    let mut t = T::zero();
    traj.times.push(t);
    traj.states.push(y);
    if stop(t, &y) {
        return Ok(traj);
    }
    for k in 0..steps {
        y = rk4_step(&mut field, t, &y, step);
        // index-based times avoid accumulated round-off
        t = T::from_usize(k + 1).expect("step index fits scalar") * step;
        traj.times.push(t);
        traj.states.push(y);
        if stop(t, &y) {
            return Ok(traj);
        }
    }
    Err(NonConvergence {
        max_time: max_time.as_f64(),
        trajectory: traj,
    })
}

pub(crate) fn state_to_array<T: Scalar>(s: &UnicycleState<T>) -> [T; 3] {
    [s.position.x, s.position.y, s.orientation]
}

pub(crate) fn array_to_state<T: Scalar>(y: &[T]) -> UnicycleState<T> {
    UnicycleState::new(Vec2::new(y[0], y[1]), y[2])
}

/// Closed-loop vector field `(x, y, θ)` of the adaptive headway controller
/// towards a fixed goal. The orientation component is integrated unwrapped.
pub fn closed_loop_field<T: Scalar>(goal: Vec2<T>, params: ControllerParams<T>) -> impl FnMut(T, &[T; 3]) -> [T; 3] {
    move |_, y| {
        let s = array_to_state(y);
        let u = adaptive_headway_control(&s, goal, &params);
        let d = unicycle_derivative(&s, &u);
        [d.velocity.x, d.velocity.y, d.angular]
    }
}

/// Integrates the adaptive headway closed loop towards `goal` for exactly
/// `duration` seconds (rounded up to whole steps) and returns the samples as
/// states.
pub fn simulate_closed_loop<T: Scalar>(
    initial: &UnicycleState<T>,
    goal: Vec2<T>,
    params: &ControllerParams<T>,
    step: T,
    duration: T,
) -> (Vec<T>, Vec<UnicycleState<T>>) {
    let traj = match integrate(
        closed_loop_field(goal, *params),
        state_to_array(initial),
        step,
        duration,
        |_, _| false,
    ) {
        Ok(t) => t,
        Err(nc) => nc.trajectory,
    };
    let states = traj.states.iter().map(|y| array_to_state(y)).collect();
    (traj.times, states)
}
