//! Adaptive headway control for kinematic unicycles, its circular and
//! triangular feedback motion predictions, and time-governed safe path
//! following around polygonal obstacles.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`, with `*32` variants for `f32`.

pub mod checks;
pub mod environment;
pub mod geom;
pub mod ode;
pub mod output;
pub mod prediction;
pub mod render;
pub mod scalar;
pub mod scenario;
pub mod simulation;
pub mod unicycle;

pub use scalar::Scalar;

pub type Vec2 = geom::Vec2<f64>;
pub type Segment = geom::Segment<f64>;
pub type Triangle = geom::Triangle<f64>;
pub type Polygon = geom::Polygon<f64>;
pub type UnicycleState = unicycle::UnicycleState<f64>;
pub type ControlInput = unicycle::ControlInput<f64>;
pub type ControllerParams = unicycle::ControllerParams<f64>;
pub type HeadwayFrame = unicycle::HeadwayFrame<f64>;
pub type PredictionSet = prediction::PredictionSet<f64>;
pub type PredictionMethod = prediction::PredictionMethod<f64>;
pub type ForwardSimConfig = prediction::ForwardSimConfig<f64>;
pub type Environment = environment::Environment<f64>;
pub type ReferencePath = environment::ReferencePath<f64>;
pub type SimConfig = simulation::SimConfig<f64>;
pub type GovernorGains = simulation::GovernorGains<f64>;
pub type GovernorState = simulation::GovernorState<f64>;
pub type EpisodeResult = simulation::EpisodeResult<f64>;

pub type Vec2f32 = geom::Vec2<f32>;
pub type UnicycleState32 = unicycle::UnicycleState<f32>;
pub type ControllerParams32 = unicycle::ControllerParams<f32>;
pub type PredictionSet32 = prediction::PredictionSet<f32>;
pub type Environment32 = environment::Environment<f32>;
