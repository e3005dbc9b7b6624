//! Time-governed path following: the path parameter `s` advances at a rate
//! limited by the safety distance of the robot's predicted motion, while
//! the adaptive headway controller chases the path point `P(s)`.
//!
//! ```text
//! ṡ = min(k_s Δ_F(prediction), k_ζ (L - s))
//! ṗ = v ô(θ),  θ̇ = ω     with (v, ω) the adaptive headway control towards P(s)
//! ```

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::environment::{path_clearance, Environment, ReferencePath};
use crate::geom::Vec2;
use crate::ode::{integrate, rk4_step};
use crate::prediction::{circular_prediction, predict, prediction_goal_radius, PredictionMethod, PredictionSet};
use crate::scalar::Scalar;
use crate::unicycle::{
    adaptive_headway_control, unicycle_derivative, ControlInput, ControllerParams, StateDerivative, UnicycleState,
};

/// Number of path samples used for the scenario clearance gate.
pub const CLEARANCE_SAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("integration step must be positive, got {0}")]
    Step(f64),
    #[error("max_time must be positive, got {0}")]
    MaxTime(f64),
    #[error("goal_tolerance must be non-negative, got {0}")]
    GoalTolerance(f64),
    #[error("governor gain {0} must be positive, got {1}")]
    Gain(&'static str, f64),
}

/// `k_s` scales the safety distance, `k_ζ` the pull towards the path end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GovernorGains<T> {
    pub safety_gain: T,
    pub path_gain: T,
}

impl<T: Scalar> Default for GovernorGains<T> {
    fn default() -> Self {
        Self {
            safety_gain: T::lit(4.0),
            path_gain: T::lit(4.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig<T> {
    step: T,
    max_time: T,
    goal_tolerance: T,
    gains: GovernorGains<T>,
}

impl<T: Scalar> SimConfig<T> {
    pub const DEFAULT_STEP: f64 = 0.005;

    pub fn new(step: T, max_time: T, goal_tolerance: T, gains: GovernorGains<T>) -> Result<Self, ConfigError> {
        if !(step > T::zero() && step.is_finite()) {
            return Err(ConfigError::Step(step.as_f64()));
        }
        if !(max_time > T::zero() && max_time.is_finite()) {
            return Err(ConfigError::MaxTime(max_time.as_f64()));
        }
        if !(goal_tolerance >= T::zero() && goal_tolerance.is_finite()) {
            return Err(ConfigError::GoalTolerance(goal_tolerance.as_f64()));
        }
        if !(gains.safety_gain > T::zero() && gains.safety_gain.is_finite()) {
            return Err(ConfigError::Gain("safety_gain", gains.safety_gain.as_f64()));
        }
        if !(gains.path_gain > T::zero() && gains.path_gain.is_finite()) {
            return Err(ConfigError::Gain("path_gain", gains.path_gain.as_f64()));
        }
        Ok(Self {
            step,
            max_time,
            goal_tolerance,
            gains,
        })
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn max_time(&self) -> T {
        self.max_time
    }

    pub fn goal_tolerance(&self) -> T {
        self.goal_tolerance
    }

    pub fn gains(&self) -> GovernorGains<T> {
        self.gains
    }

    pub fn with_step(&self, step: T) -> Result<Self, ConfigError> {
        Self::new(step, self.max_time, self.goal_tolerance, self.gains)
    }

    pub fn with_max_time(&self, max_time: T) -> Result<Self, ConfigError> {
        Self::new(self.step, max_time, self.goal_tolerance, self.gains)
    }
}

/// Path parameter (arc length along the reference path) and robot state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GovernorState<T> {
    pub s: T,
    pub unicycle: UnicycleState<T>,
}

impl<T: Scalar> GovernorState<T> {
    fn to_array(self) -> [T; 4] {
        let u = self.unicycle;
        [self.s, u.position.x, u.position.y, u.orientation]
    }

    fn from_array(y: &[T; 4]) -> Self {
        Self {
            s: y[0],
            unicycle: UnicycleState::new(Vec2::new(y[1], y[2]), y[3]),
        }
    }
}

/// Everything computed during one evaluation of the governed vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct GovernorEval<T> {
    pub path_rate: T,
    pub derivative: StateDerivative<T>,
    pub control: ControlInput<T>,
    pub goal: Vec2<T>,
    pub safety_distance: T,
    pub prediction: PredictionSet<T>,
}

/// Safety distance of the predicted motion towards `goal`. An exhausted
/// forward simulation falls back to the smaller of its partial hull and the
/// circular prediction of its last state, which contains the remainder.
pub fn governed_safety<T: Scalar>(
    env: &Environment<T>,
    method: &PredictionMethod<T>,
    state: &UnicycleState<T>,
    goal: Vec2<T>,
    params: &ControllerParams<T>,
) -> (T, PredictionSet<T>) {
    match predict(method, state, goal, params) {
        Ok(set) => (env.safety_distance(&set), set),
        Err(exhausted) => {
            let tail = circular_prediction(&exhausted.last, goal, params);
            let d = env.safety_distance(&exhausted.partial).min(env.safety_distance(&tail));
            (d, exhausted.partial)
        }
    }
}

pub fn governor_derivative<T: Scalar>(
    gs: &GovernorState<T>,
    env: &Environment<T>,
    path: &ReferencePath<T>,
    params: &ControllerParams<T>,
    method: &PredictionMethod<T>,
    gains: &GovernorGains<T>,
) -> GovernorEval<T> {
    let len = path.length();
    let s = gs.s.max(T::zero()).min(len);
    let goal = path.eval(s);
    let control = adaptive_headway_control(&gs.unicycle, goal, params);
    let derivative = unicycle_derivative(&gs.unicycle, &control);
    let (safety_distance, prediction) = governed_safety(env, method, &gs.unicycle, goal, params);
    let path_rate = (gains.safety_gain * safety_distance)
        .min(gains.path_gain * (len - s))
        .max(T::zero());
    GovernorEval {
        path_rate,
        derivative,
        control,
        goal,
        safety_distance,
        prediction,
    }
}

/// One recorded integration step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeSample<T> {
    pub t: T,
    pub state: GovernorState<T>,
    pub control: ControlInput<T>,
    pub safety_distance: T,
    pub prediction_radius: T,
    pub margin: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeSummary {
    pub method: String,
    pub headway_coeff: f64,
    pub converged: bool,
    pub travel_time: f64,
    pub min_margin: f64,
    pub avg_speed: f64,
    pub distance_travelled: f64,
    pub collision: bool,
    pub final_goal_error: f64,
    pub final_s: f64,
    pub path_length: f64,
    pub peak_linear: f64,
    pub peak_angular: f64,
    pub steps: usize,
    pub governor_evals: usize,
    /// Wall-clock seconds per governor vector-field evaluation.
    pub governor_eval_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult<T> {
    pub samples: Vec<EpisodeSample<T>>,
    pub summary: EpisodeSummary,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError<T: Scalar> {
    #[error("reference path clearance {clearance} is not positive")]
    Clearance { clearance: f64 },
    #[error("episode did not converge within {max_time} s")]
    NonConvergence {
        max_time: f64,
        result: Box<EpisodeResult<T>>,
    },
}

pub fn default_initial_orientation<T: Scalar>(path: &ReferencePath<T>) -> T {
    let t = path.tangent(T::zero());
    t.y.atan2(t.x)
}

/// Everything needed to run one governed episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode<'a, T> {
    pub env: &'a Environment<T>,
    pub path: &'a ReferencePath<T>,
    pub params: ControllerParams<T>,
    pub method: PredictionMethod<T>,
    pub config: SimConfig<T>,
    pub initial_orientation: T,
}

impl<T: Scalar> Episode<'_, T> {
    pub fn run(&self) -> Result<EpisodeResult<T>, SimError<T>> {
        run_episode(
            self.env,
            self.path,
            &self.params,
            &self.method,
            &self.config,
            self.initial_orientation,
        )
    }
}

/// Integrates the governed system from `s = 0`, `p = P(0)`.
pub fn run_episode<T: Scalar>(
    env: &Environment<T>,
    path: &ReferencePath<T>,
    params: &ControllerParams<T>,
    method: &PredictionMethod<T>,
    config: &SimConfig<T>,
    initial_orientation: T,
) -> Result<EpisodeResult<T>, SimError<T>> {
    let clearance = path_clearance(env, path, CLEARANCE_SAMPLES);
    if clearance <= T::zero() {
        return Err(SimError::Clearance {
            clearance: clearance.as_f64(),
        });
    }
    let len = path.length();
    let end = path.end();
    let gains = config.gains;
    let initial = GovernorState {
        s: T::zero(),
        unicycle: UnicycleState::new(path.start(), initial_orientation),
    };

    let mut evals = 0usize;
    let mut eval_time = Duration::ZERO;
    let field = |_: T, y: &[T; 4]| {
        let started = Instant::now();
        let e = governor_derivative(&GovernorState::from_array(y), env, path, params, method, &gains);
        eval_time += started.elapsed();
        evals += 1;
        [
            e.path_rate,
            e.derivative.velocity.x,
            e.derivative.velocity.y,
            e.derivative.angular,
        ]
    };
    let tol = config.goal_tolerance;
    let done = |_: T, y: &[T; 4]| y[0] >= len - tol && Vec2::new(y[1], y[2]).distance(end) <= tol;
    let outcome = integrate(field, initial.to_array(), config.step, config.max_time, done);
    let (converged, traj) = match outcome {
        Ok(t) => (true, t),
        Err(nc) => (false, nc.trajectory),
    };

    let mut samples = Vec::with_capacity(traj.len());
    for (t, y) in traj.times.iter().zip(&traj.states) {
        let mut state = GovernorState::from_array(y);
        state.s = state.s.max(T::zero()).min(len);
        let e = governor_derivative(&state, env, path, params, method, &gains);
        samples.push(EpisodeSample {
            t: *t,
            state,
            control: e.control,
            safety_distance: e.safety_distance,
            prediction_radius: prediction_goal_radius(&e.prediction, e.goal),
            margin: env.free_space_margin(state.unicycle.position),
        });
    }
    let summary = summarize(
        &samples,
        method.name(),
        params.headway_coeff(),
        converged,
        len,
        end,
        evals,
        eval_time,
    );
    let result = EpisodeResult { samples, summary };
    if converged {
        Ok(result)
    } else {
        Err(SimError::NonConvergence {
            max_time: config.max_time.as_f64(),
            result: Box::new(result),
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn summarize<T: Scalar>(
    samples: &[EpisodeSample<T>],
    method: &str,
    headway_coeff: T,
    converged: bool,
    path_length: T,
    end: Vec2<T>,
    evals: usize,
    eval_time: Duration,
) -> EpisodeSummary {
    let last = samples.last().expect("episode records the initial sample");
    let travel_time = last.t.as_f64();
    let distance_travelled: f64 = samples
        .windows(2)
        .map(|w| {
            w[0].state
                .unicycle
                .position
                .distance(w[1].state.unicycle.position)
                .as_f64()
        })
        .sum();
    // a non-finite state is outside the free space
    let min_margin = samples
        .iter()
        .map(|s| s.margin.as_f64())
        .map(|m| if m.is_nan() { f64::NEG_INFINITY } else { m })
        .fold(f64::INFINITY, f64::min);
    EpisodeSummary {
        method: method.to_string(),
        headway_coeff: headway_coeff.as_f64(),
        converged,
        travel_time,
        min_margin,
        avg_speed: if travel_time > 0.0 {
            distance_travelled / travel_time
        } else {
            0.0
        },
        distance_travelled,
        collision: min_margin < 0.0,
        final_goal_error: last.state.unicycle.position.distance(end).as_f64(),
        final_s: last.state.s.as_f64(),
        path_length: path_length.as_f64(),
        peak_linear: samples
            .iter()
            .map(|s| s.control.linear.as_f64().abs())
            .fold(0.0, f64::max),
        peak_angular: samples
            .iter()
            .map(|s| s.control.angular.as_f64().abs())
            .fold(0.0, f64::max),
        steps: samples.len() - 1,
        governor_evals: evals,
        governor_eval_cost: if evals > 0 {
            eval_time.as_secs_f64() / evals as f64
        } else {
            0.0
        },
    }
}

/// Runs one episode per method, concurrently.
pub fn compare_methods<T: Scalar>(
    env: &Environment<T>,
    path: &ReferencePath<T>,
    params: &ControllerParams<T>,
    config: &SimConfig<T>,
    methods: &[PredictionMethod<T>],
    initial_orientation: T,
) -> Vec<Result<EpisodeResult<T>, SimError<T>>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|m| scope.spawn(move || run_episode(env, path, params, m, config, initial_orientation)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("episode thread panicked"))
            .collect()
    })
}

/// Single RK4 step of the governed system, exposed for step-size studies.
#[allow(clippy::too_many_arguments)]
pub fn governed_step<T: Scalar>(
    gs: &GovernorState<T>,
    env: &Environment<T>,
    path: &ReferencePath<T>,
    params: &ControllerParams<T>,
    method: &PredictionMethod<T>,
    gains: &GovernorGains<T>,
    t: T,
    step: T,
) -> GovernorState<T> {
    let mut field = |_: T, y: &[T; 4]| {
        let e = governor_derivative(&GovernorState::from_array(y), env, path, params, method, gains);
        [
            e.path_rate,
            e.derivative.velocity.x,
            e.derivative.velocity.y,
            e.derivative.angular,
        ]
    };
    GovernorState::from_array(&rk4_step(&mut field, t, &gs.to_array(), step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polygon;
    use crate::prediction::ForwardSimConfig;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    fn corridor() -> (Environment<f64>, ReferencePath<f64>) {
        let env = Environment::new(Polygon::rectangle(v(0.0, 0.0), v(10.0, 2.0)).unwrap(), vec![], 0.3).unwrap();
        let path = ReferencePath::new(vec![v(1.0, 1.0), v(9.0, 1.0)]).unwrap();
        (env, path)
    }

    fn params() -> ControllerParams<f64> {
        ControllerParams::new(0.5, 1.0, 1e-4).unwrap()
    }

    #[test]
    fn config_validation() {
        let g = GovernorGains::default();
        assert!(matches!(SimConfig::new(0.0, 1.0, 0.0, g), Err(ConfigError::Step(_))));
        assert!(matches!(
            SimConfig::new(0.1, -1.0, 0.0, g),
            Err(ConfigError::MaxTime(_))
        ));
        assert!(matches!(
            SimConfig::new(0.1, 1.0, -1.0, g),
            Err(ConfigError::GoalTolerance(_))
        ));
        let bad = GovernorGains {
            safety_gain: 0.0,
            path_gain: 4.0,
        };
        assert!(matches!(
            SimConfig::new(0.1, 1.0, 0.0, bad),
            Err(ConfigError::Gain("safety_gain", _))
        ));
    }

    #[test]
    fn governor_stops_when_prediction_touches_boundary() {
        let (env, path) = corridor();
        // disk around P(3) = (4, 1) with radius ‖p - g‖ ≈ 1.22 exceeds the 0.7 centre margin
        let gs = GovernorState {
            s: 3.0,
            unicycle: UnicycleState::new(v(3.0, 0.3), 0.0),
        };
        let e = governor_derivative(
            &gs,
            &env,
            &path,
            &params(),
            &PredictionMethod::Circle,
            &GovernorGains::default(),
        );
        assert_eq!(e.safety_distance, 0.0);
        assert_eq!(e.path_rate, 0.0);
        assert!(e.derivative.velocity.norm() > 0.0);
    }

    #[test]
    fn governor_at_path_end_is_still() {
        let (env, path) = corridor();
        let gs = GovernorState {
            s: path.length(),
            unicycle: UnicycleState::new(v(8.0, 1.0), 0.0),
        };
        let e = governor_derivative(
            &gs,
            &env,
            &path,
            &params(),
            &PredictionMethod::Triangle,
            &GovernorGains::default(),
        );
        assert!(e.safety_distance > 0.0);
        assert_eq!(e.path_rate, 0.0);
    }

    #[test]
    fn governor_far_from_obstacles_follows_path_gain() {
        let env = Environment::new(
            Polygon::rectangle(v(-100.0, -100.0), v(100.0, 100.0)).unwrap(),
            vec![],
            0.3,
        )
        .unwrap();
        let path = ReferencePath::new(vec![v(0.0, 0.0), v(2.0, 0.0)]).unwrap();
        let gs = GovernorState {
            s: 1.0,
            unicycle: UnicycleState::new(v(1.0, 0.0), 0.0),
        };
        let e = governor_derivative(
            &gs,
            &env,
            &path,
            &params(),
            &PredictionMethod::Circle,
            &GovernorGains::default(),
        );
        // k_ζ (L - s) = 4 · 1
        assert_eq!(e.path_rate, 4.0);
    }

    #[test]
    fn corridor_episode_is_safe_for_all_methods() {
        let (env, path) = corridor();
        let config = SimConfig::new(0.01, 100.0, 1e-4, GovernorGains::default()).unwrap();
        for method in PredictionMethod::all(ForwardSimConfig::default()) {
            let r = run_episode(&env, &path, &params(), &method, &config, 0.0).unwrap();
            assert!(!r.summary.collision, "{method}");
            assert!(r.summary.final_goal_error <= 1e-4);
            assert!(r.samples.windows(2).all(|w| w[1].state.s >= w[0].state.s));
        }
    }

    #[test]
    fn rejects_path_without_clearance() {
        let (env, _) = corridor();
        let path = ReferencePath::new(vec![v(1.0, 0.1), v(9.0, 0.1)]).unwrap();
        let config = SimConfig::new(0.01, 10.0, 1e-4, GovernorGains::default()).unwrap();
        let err = run_episode(&env, &path, &params(), &PredictionMethod::Circle, &config, 0.0).unwrap_err();
        assert!(matches!(err, SimError::Clearance { .. }));
    }

    #[test]
    fn reports_non_convergence() {
        let (env, path) = corridor();
        let config = SimConfig::new(0.01, 0.5, 1e-4, GovernorGains::default()).unwrap();
        let err = run_episode(&env, &path, &params(), &PredictionMethod::Triangle, &config, 0.0).unwrap_err();
        let SimError::NonConvergence { result, .. } = err else {
            panic!()
        };
        assert!(!result.summary.converged);
        assert_eq!(result.samples.len(), 51);
    }
}
