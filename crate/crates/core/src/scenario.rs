//! TOML scenario files.
//!
//! A scenario bundles an environment, a reference path and every parameter
//! of a governed episode. Loading validates the whole file and reports all
//! schema violations at once; a scenario whose reference path does not keep
//! positive clearance from the free-space boundary is rejected separately.
//!
//! ```toml
//! [workspace]
//! vertices = [[0.0, 0.0], [10.0, 0.0], [10.0, 4.0], [0.0, 4.0]]
//!
//! [[obstacles]]
//! vertices = [[4.0, 0.0], [5.0, 0.0], [5.0, 1.5], [4.0, 1.5]]
//!
//! [robot]
//! radius = 0.3
//! initial_theta = 0.0        # optional, defaults to the path direction
//!
//! [path]
//! waypoints = [[1.0, 2.0], [9.0, 2.0]]
//!
//! [controller]
//! headway_coeff = 0.5
//! ref_gain = 1.0
//! goal_tolerance = 1e-4      # optional
//!
//! [governor]                 # optional section
//! safety_gain = 4.0
//! path_gain = 4.0
//!
//! [integrator]               # optional section
//! step = 0.005
//! max_time = 120.0
//! goal_tolerance = 1e-3
//!
//! [prediction]               # optional section
//! method = "triangle"        # "circle" | "triangle" | "forward-sim"
//! forward_step = 0.02
//! forward_horizon = 60.0
//! forward_tolerance = 1e-3
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::{path_clearance, EnvError, Environment, ReferencePath};
use crate::geom::{Polygon, Vec2};
use crate::prediction::{ForwardSimConfig, PredictionMethod};
use crate::scalar::Scalar;
use crate::simulation::{
    default_initial_orientation, run_episode, EpisodeResult, GovernorGains, SimConfig, SimError, CLEARANCE_SAMPLES,
};
use crate::unicycle::{ControllerParams, ParamError};

/// One failed schema rule, keyed by its dotted field name.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario: {}", join_violations(.0))]
    Validation(Vec<Violation>),
    #[error("reference path clearance {clearance} m is not positive")]
    Clearance { clearance: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolygon {
    vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRobot {
    radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    waypoints: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawController {
    headway_coeff: f64,
    ref_gain: f64,
    #[serde(default = "default_controller_tolerance")]
    goal_tolerance: f64,
}

fn default_controller_tolerance() -> f64 {
    ControllerParams::<f64>::DEFAULT_GOAL_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawGovernor {
    safety_gain: f64,
    path_gain: f64,
}

impl Default for RawGovernor {
    fn default() -> Self {
        let g = GovernorGains::<f64>::default();
        Self {
            safety_gain: g.safety_gain,
            path_gain: g.path_gain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawIntegrator {
    step: f64,
    max_time: f64,
    goal_tolerance: f64,
}

impl Default for RawIntegrator {
    fn default() -> Self {
        Self {
            step: SimConfig::<f64>::DEFAULT_STEP,
            max_time: 120.0,
            goal_tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawPrediction {
    method: String,
    forward_step: f64,
    forward_horizon: f64,
    forward_tolerance: f64,
}

impl Default for RawPrediction {
    fn default() -> Self {
        let f = ForwardSimConfig::<f64>::default();
        Self {
            method: "triangle".into(),
            forward_step: f.step,
            forward_horizon: f.horizon,
            forward_tolerance: f.goal_tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    workspace: RawPolygon,
    #[serde(default)]
    obstacles: Vec<RawPolygon>,
    robot: RawRobot,
    path: RawPath,
    controller: RawController,
    #[serde(default)]
    governor: RawGovernor,
    #[serde(default)]
    integrator: RawIntegrator,
    #[serde(default)]
    prediction: RawPrediction,
}

/// A fully validated simulation setup.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub environment: Environment<T>,
    pub path: ReferencePath<T>,
    pub controller: ControllerParams<T>,
    pub sim: SimConfig<T>,
    pub method: PredictionMethod<T>,
    /// Forward-simulation settings, kept even when another method is selected.
    pub forward_sim: ForwardSimConfig<T>,
    pub initial_theta: T,
}

impl<T: Scalar> Scenario<T> {
    /// Resolves a method name, using this scenario's forward-simulation settings.
    pub fn method_named(&self, name: &str) -> Result<PredictionMethod<T>, crate::prediction::UnknownMethod> {
        Ok(match name.parse::<PredictionMethod<T>>()? {
            PredictionMethod::ForwardSim(_) => PredictionMethod::ForwardSim(self.forward_sim),
            m => m,
        })
    }

    pub fn all_methods(&self) -> [PredictionMethod<T>; 3] {
        PredictionMethod::all(self.forward_sim)
    }

    pub fn clearance(&self) -> T {
        path_clearance(&self.environment, &self.path, CLEARANCE_SAMPLES)
    }

    pub fn run(&self) -> Result<EpisodeResult<T>, SimError<T>> {
        self.run_with(&self.method, &self.controller)
    }

    pub fn run_with(
        &self,
        method: &PredictionMethod<T>,
        controller: &ControllerParams<T>,
    ) -> Result<EpisodeResult<T>, SimError<T>> {
        run_episode(
            &self.environment,
            &self.path,
            controller,
            method,
            &self.sim,
            self.initial_theta,
        )
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

struct Collector(Vec<Violation>);

impl Collector {
    fn push(&mut self, field: impl Into<String>, message: impl ToString) {
        self.0.push(Violation {
            field: field.into(),
            message: message.to_string(),
        });
    }

    fn finite(&mut self, field: &str, value: f64) -> bool {
        if value.is_finite() {
            true
        } else {
            self.push(field, format!("must be finite, got {value}"));
            false
        }
    }

    fn positive(&mut self, field: &str, value: f64) {
        if self.finite(field, value) && value <= 0.0 {
            self.push(field, format!("must be positive, got {value}"));
        }
    }

    fn points<T: Scalar>(&mut self, field: &str, raw: &[[f64; 2]]) -> Option<Vec<Vec2<T>>> {
        let mut ok = true;
        let mut out = Vec::with_capacity(raw.len());
        for (i, [x, y]) in raw.iter().enumerate() {
            match Vec2::try_new(T::lit(*x), T::lit(*y)) {
                Ok(p) => out.push(p),
                Err(e) => {
                    self.push(format!("{field}[{i}]"), e);
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }

    fn polygon<T: Scalar>(&mut self, field: &str, raw: &RawPolygon) -> Option<Polygon<T>> {
        let pts = self.points(&format!("{field}.vertices"), &raw.vertices)?;
        match Polygon::new(pts) {
            Ok(p) => Some(p),
            Err(e) => {
                self.push(format!("{field}.vertices"), e);
                None
            }
        }
    }
}

fn param_field(e: &ParamError) -> &'static str {
    match e {
        ParamError::HeadwayCoeff(_) => "controller.headway_coeff",
        ParamError::RefGain(_) => "controller.ref_gain",
        ParamError::GoalTolerance(_) => "controller.goal_tolerance",
        ParamError::FixedDistance(_) => "controller",
    }
}

fn build<T: Scalar>(raw: &RawScenario) -> Result<Scenario<T>, Vec<Violation>> {
    let mut c = Collector(Vec::new());
    let lit = T::lit;

    let workspace = c.polygon::<T>("workspace", &raw.workspace);
    let obstacles: Vec<Option<Polygon<T>>> = raw
        .obstacles
        .iter()
        .enumerate()
        .map(|(i, o)| c.polygon(&format!("obstacles[{i}]"), o))
        .collect();
    c.positive("robot.radius", raw.robot.radius);
    if let Some(theta) = raw.robot.initial_theta {
        c.finite("robot.initial_theta", theta);
    }
    let environment = match (workspace, obstacles.into_iter().collect::<Option<Vec<_>>>()) {
        (Some(w), Some(obs)) if raw.robot.radius > 0.0 && raw.robot.radius.is_finite() => {
            match Environment::new(w, obs, lit(raw.robot.radius)) {
                Ok(env) => Some(env),
                Err(EnvError::ObstacleOutside(i)) => {
                    c.push(format!("obstacles[{i}]"), EnvError::ObstacleOutside(i));
                    None
                }
                Err(e) => {
                    c.push("environment", e);
                    None
                }
            }
        }
        _ => None,
    };

    let path = c
        .points::<T>("path.waypoints", &raw.path.waypoints)
        .and_then(|w| match ReferencePath::new(w) {
            Ok(p) => Some(p),
            Err(e) => {
                c.push("path.waypoints", e);
                None
            }
        });

    let controller = match ControllerParams::new(
        lit(raw.controller.headway_coeff),
        lit(raw.controller.ref_gain),
        lit(raw.controller.goal_tolerance),
    ) {
        Ok(p) => Some(p),
        Err(e) => {
            c.push(param_field(&e), e);
            None
        }
    };

    let gains = GovernorGains {
        safety_gain: lit(raw.governor.safety_gain),
        path_gain: lit(raw.governor.path_gain),
    };
    c.positive("governor.safety_gain", raw.governor.safety_gain);
    c.positive("governor.path_gain", raw.governor.path_gain);
    c.positive("integrator.step", raw.integrator.step);
    c.positive("integrator.max_time", raw.integrator.max_time);
    if c.finite("integrator.goal_tolerance", raw.integrator.goal_tolerance) && raw.integrator.goal_tolerance < 0.0 {
        c.push("integrator.goal_tolerance", "must be non-negative");
    }
    let sim = SimConfig::new(
        lit(raw.integrator.step),
        lit(raw.integrator.max_time),
        lit(raw.integrator.goal_tolerance),
        gains,
    )
    .ok();

    let p = &raw.prediction;
    c.positive("prediction.forward_step", p.forward_step);
    c.positive("prediction.forward_horizon", p.forward_horizon);
    if c.finite("prediction.forward_tolerance", p.forward_tolerance) && p.forward_tolerance < 0.0 {
        c.push("prediction.forward_tolerance", "must be non-negative");
    }
    let forward_sim = ForwardSimConfig {
        step: lit(p.forward_step),
        horizon: lit(p.forward_horizon),
        goal_tolerance: lit(p.forward_tolerance),
    };
    let method = match p.method.parse::<PredictionMethod<T>>() {
        Ok(PredictionMethod::ForwardSim(_)) => Some(PredictionMethod::ForwardSim(forward_sim)),
        Ok(m) => Some(m),
        Err(e) => {
            c.push("prediction.method", e);
            None
        }
    };

    match (environment, path, controller, sim, method) {
        (Some(environment), Some(path), Some(controller), Some(sim), Some(method)) if c.0.is_empty() => {
            let initial_theta = raw
                .robot
                .initial_theta
                .map_or_else(|| default_initial_orientation(&path), lit);
            Ok(Scenario {
                environment,
                path,
                controller,
                sim,
                method,
                forward_sim,
                initial_theta,
            })
        }
        _ => Err(c.0),
    }
}

/// Parses and validates scenario text, including the path clearance gate.
pub fn parse_scenario<T: Scalar>(text: &str) -> Result<Scenario<T>, ScenarioError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        ScenarioError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let scenario = build::<T>(&raw).map_err(ScenarioError::Validation)?;
    let clearance = scenario.clearance();
    if clearance <= T::zero() {
        return Err(ScenarioError::Clearance {
            clearance: clearance.as_f64(),
        });
    }
    Ok(scenario)
}

pub fn load_scenario<T: Scalar>(path: impl AsRef<Path>) -> Result<Scenario<T>, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

fn raw_points<T: Scalar>(points: &[Vec2<T>]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.x.as_f64(), p.y.as_f64()]).collect()
}

/// Serializes a scenario so that [`parse_scenario`] reproduces it exactly.
pub fn write_scenario<T: Scalar>(s: &Scenario<T>) -> String {
    let gains = s.sim.gains();
    let raw = RawScenario {
        workspace: RawPolygon {
            vertices: raw_points(s.environment.workspace().vertices()),
        },
        obstacles: s
            .environment
            .obstacles()
            .map(|o| RawPolygon {
                vertices: raw_points(o.vertices()),
            })
            .collect(),
        robot: RawRobot {
            radius: s.environment.robot_radius().as_f64(),
            initial_theta: Some(s.initial_theta.as_f64()),
        },
        path: RawPath {
            waypoints: raw_points(s.path.waypoints()),
        },
        controller: RawController {
            headway_coeff: s.controller.headway_coeff().as_f64(),
            ref_gain: s.controller.ref_gain().as_f64(),
            goal_tolerance: s.controller.goal_tolerance().as_f64(),
        },
        governor: RawGovernor {
            safety_gain: gains.safety_gain.as_f64(),
            path_gain: gains.path_gain.as_f64(),
        },
        integrator: RawIntegrator {
            step: s.sim.step().as_f64(),
            max_time: s.sim.max_time().as_f64(),
            goal_tolerance: s.sim.goal_tolerance().as_f64(),
        },
        prediction: RawPrediction {
            method: s.method.name().to_string(),
            forward_step: s.forward_sim.step.as_f64(),
            forward_horizon: s.forward_sim.horizon.as_f64(),
            forward_tolerance: s.forward_sim.goal_tolerance.as_f64(),
        },
    };
    toml::to_string(&raw).expect("scenario fields are plain numbers and strings")
}

pub fn save_scenario<T: Scalar>(path: impl AsRef<Path>, s: &Scenario<T>) -> std::io::Result<()> {
    std::fs::write(path, write_scenario(s))
}
