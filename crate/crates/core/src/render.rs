//! Deterministic SVG rendering of environments, trajectories, prediction
//! snapshots and speed profiles.
//!
//! Output depends only on the inputs: coordinates are printed with a fixed
//! number of decimals and elements are emitted in input order, so the same
//! data always yields the same bytes.

use std::fmt::Write as _;

use thiserror::Error;

use crate::environment::{Environment, ReferencePath};
use crate::geom::Vec2;
use crate::output::TrajectoryRow;
use crate::prediction::{predict, PredictionMethod, PredictionSet};
use crate::unicycle::{ControllerParams, UnicycleState};

/// Stroke colours cycled through by trajectory index.
const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("canvas must be at least 16 px in each direction, got {0}x{1}")]
    Canvas(u32, u32),
    #[error("{0} must be positive and finite, got {1}")]
    Stroke(&'static str, f64),
    #[error("trajectory `{0}` has no rows")]
    EmptyTrajectory(String),
    #[error("nothing to render: no trajectories given")]
    NoTrajectories,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layers {
    pub environment: bool,
    pub path: bool,
    pub trajectory: bool,
    pub predictions: bool,
    pub speed_bars: bool,
}

impl Default for Layers {
    fn default() -> Self {
        Self {
            environment: true,
            path: true,
            trajectory: true,
            predictions: true,
            speed_bars: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    width: u32,
    height: u32,
    pub padding: f64,
    pub path_stroke: f64,
    pub trajectory_stroke: f64,
    pub prediction_stroke: f64,
    pub layers: Layers,
    /// Times (s) at which prediction sets are drawn.
    pub snapshot_times: Vec<f64>,
    /// Time between speed bars (s).
    pub speed_bar_interval: f64,
    /// Bar length per unit speed (m per m/s).
    pub speed_bar_scale: f64,
}

impl RenderSpec {
    pub fn new(width: u32, height: u32) -> Result<Self, RenderError> {
        if width < 16 || height < 16 {
            return Err(RenderError::Canvas(width, height));
        }
        Ok(Self {
            width,
            height,
            padding: 20.0,
            path_stroke: 1.5,
            trajectory_stroke: 2.0,
            prediction_stroke: 1.0,
            layers: Layers::default(),
            snapshot_times: vec![0.0],
            speed_bar_interval: 0.5,
            speed_bar_scale: 0.5,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    fn validate(&self) -> Result<(), RenderError> {
        if self.width < 16 || self.height < 16 {
            return Err(RenderError::Canvas(self.width, self.height));
        }
        for (name, v) in [
            ("path_stroke", self.path_stroke),
            ("trajectory_stroke", self.trajectory_stroke),
            ("prediction_stroke", self.prediction_stroke),
            ("speed_bar_interval", self.speed_bar_interval),
            ("speed_bar_scale", self.speed_bar_scale),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(RenderError::Stroke(name, v));
            }
        }
        if !(self.padding >= 0.0 && 2.0 * self.padding < f64::from(self.width.min(self.height))) {
            return Err(RenderError::Stroke("padding", self.padding));
        }
        Ok(())
    }
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self::new(800, 600).expect("default canvas is valid")
    }
}

/// A labelled trajectory. `method` selects the prediction drawn at snapshots.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryLayer<'a> {
    pub label: &'a str,
    pub rows: &'a [TrajectoryRow],
    pub method: Option<PredictionMethod<f64>>,
}

/// Optional scene context. Predictions need both `path` and `params`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Scene<'a> {
    pub environment: Option<&'a Environment<f64>>,
    pub path: Option<&'a ReferencePath<f64>>,
    pub params: Option<&'a ControllerParams<f64>>,
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct View {
    lo: Vec2<f64>,
    scale: f64,
    offset: (f64, f64),
    height: f64,
}

impl View {
    fn fit(lo: Vec2<f64>, hi: Vec2<f64>, spec: &RenderSpec) -> Self {
        let w = f64::from(spec.width) - 2.0 * spec.padding;
        let h = f64::from(spec.height) - 2.0 * spec.padding;
        let dx = (hi.x - lo.x).max(1e-9);
        let dy = (hi.y - lo.y).max(1e-9);
        let scale = (w / dx).min(h / dy);
        let offset = (
            spec.padding + 0.5 * (w - dx * scale),
            spec.padding + 0.5 * (h - dy * scale),
        );
        Self {
            lo,
            scale,
            offset,
            height: f64::from(spec.height),
        }
    }

    fn point(&self, p: Vec2<f64>) -> (f64, f64) {
        (
            self.offset.0 + (p.x - self.lo.x) * self.scale,
            self.height - self.offset.1 - (p.y - self.lo.y) * self.scale,
        )
    }

    fn points(&self, pts: impl IntoIterator<Item = Vec2<f64>>) -> String {
        pts.into_iter()
            .map(|p| {
                let (x, y) = self.point(p);
                format!("{},{}", num(x), num(y))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn bounds(scene: &Scene<'_>, layers: &[TrajectoryLayer<'_>]) -> (Vec2<f64>, Vec2<f64>) {
    if let Some(env) = scene.environment {
        return env.workspace().bounding_box();
    }
    let mut pts: Vec<Vec2<f64>> = layers
        .iter()
        .flat_map(|l| l.rows.iter().map(|r| Vec2::new(r.x, r.y)))
        .collect();
    if let Some(path) = scene.path {
        pts.extend_from_slice(path.waypoints());
    }
    let mut lo = pts[0];
    let mut hi = pts[0];
    for p in &pts {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let margin = Vec2::new(0.5, 0.5);
    (lo - margin, hi + margin)
}

fn check_layers(layers: &[TrajectoryLayer<'_>]) -> Result<(), RenderError> {
    if layers.is_empty() {
        return Err(RenderError::NoTrajectories);
    }
    for l in layers {
        if l.rows.is_empty() {
            return Err(RenderError::EmptyTrajectory(l.label.to_string()));
        }
    }
    Ok(())
}

fn style(spec: &RenderSpec, n: usize) -> String {
    let mut s = String::from("<style>\n");
    s.push_str(".workspace{fill:#ffffff;stroke:#000000;stroke-width:2}\n");
    s.push_str(".obstacle{fill:#7f7f7f;stroke:#000000;stroke-width:1}\n");
    let _ = writeln!(
        s,
        ".path{{fill:none;stroke:#000000;stroke-width:{};stroke-dasharray:6 4}}",
        num(spec.path_stroke)
    );
    let _ = writeln!(
        s,
        ".trajectory{{fill:none;stroke-width:{}}}",
        num(spec.trajectory_stroke)
    );
    let _ = writeln!(
        s,
        ".prediction{{fill-opacity:0.15;stroke-width:{}}}",
        num(spec.prediction_stroke)
    );
    s.push_str(".hull{fill:none}\n");
    s.push_str(".robot{fill:#ffffff;stroke:#000000;stroke-width:1}\n");
    s.push_str(".speed-bar{stroke:#1f5fbf;stroke-width:1}\n");
    s.push_str(".label{font-family:monospace;font-size:12px}\n");
    for i in 0..n {
        let c = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, ".traj-{i}{{stroke:{c};fill:{c}}}");
    }
    s.push_str("</style>\n");
    s
}

/// Row whose time is closest to `t` (earliest on ties).
fn row_at(rows: &[TrajectoryRow], t: f64) -> &TrajectoryRow {
    rows.iter()
        .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
        .expect("non-empty rows")
}

fn draw_set(out: &mut String, view: &View, set: &PredictionSet<f64>, class: &str) {
    match set {
        PredictionSet::Disk { center, radius } => {
            let (x, y) = view.point(*center);
            let _ = writeln!(
                out,
                "<circle class=\"prediction disk {class}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
                num(x),
                num(y),
                num(radius * view.scale)
            );
        }
        PredictionSet::Tri { triangle } => {
            let _ = writeln!(
                out,
                "<polygon class=\"prediction triangle {class}\" points=\"{}\"/>",
                view.points(triangle.vertices())
            );
        }
        PredictionSet::Hull { points, padding } => {
            let width = (2.0 * padding * view.scale).max(1.0);
            let _ = writeln!(
                out,
                "<polyline class=\"prediction hull {class}\" stroke-width=\"{}\" points=\"{}\"/>",
                num(width),
                view.points(points.iter().copied())
            );
        }
    }
}

/// Renders the scene with every trajectory layer overlaid.
pub fn render_scene(
    scene: &Scene<'_>,
    layers: &[TrajectoryLayer<'_>],
    spec: &RenderSpec,
) -> Result<String, RenderError> {
    spec.validate()?;
    check_layers(layers)?;
    let (lo, hi) = bounds(scene, layers);
    let view = View::fit(lo, hi, spec);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = spec.width,
        h = spec.height
    );
    out.push_str(&style(spec, layers.len()));

    if let (true, Some(env)) = (spec.layers.environment, scene.environment) {
        let _ = writeln!(
            out,
            "<polygon class=\"workspace\" points=\"{}\"/>",
            view.points(env.workspace().vertices().iter().copied())
        );
        for o in env.obstacles() {
            let _ = writeln!(
                out,
                "<polygon class=\"obstacle\" points=\"{}\"/>",
                view.points(o.vertices().iter().copied())
            );
        }
    }
    if let (true, Some(path)) = (spec.layers.path, scene.path) {
        let _ = writeln!(
            out,
            "<polyline class=\"path\" points=\"{}\"/>",
            view.points(path.waypoints().iter().copied())
        );
    }

    for (i, layer) in layers.iter().enumerate() {
        let class = format!("traj-{i}");
        let _ = writeln!(out, "<g id=\"{}\">", escape(layer.label));
        if spec.layers.speed_bars {
            let mut next = 0.0;
            for r in layer.rows {
                if r.t + 1e-9 < next {
                    continue;
                }
                next = r.t + spec.speed_bar_interval;
                let p = Vec2::new(r.x, r.y);
                let normal = Vec2::from_angle(r.theta).perp();
                let tip = p + normal * (r.v * spec.speed_bar_scale);
                let (x1, y1) = view.point(p);
                let (x2, y2) = view.point(tip);
                let _ = writeln!(
                    out,
                    "<line class=\"speed-bar\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                    num(x1),
                    num(y1),
                    num(x2),
                    num(y2)
                );
            }
        }
        if spec.layers.trajectory {
            let _ = writeln!(
                out,
                "<polyline class=\"trajectory {class}\" fill=\"none\" points=\"{}\"><title>{}</title></polyline>",
                view.points(layer.rows.iter().map(|r| Vec2::new(r.x, r.y))),
                escape(layer.label)
            );
        }
        if spec.layers.predictions {
            if let (Some(path), Some(params), Some(method)) = (scene.path, scene.params, layer.method) {
                for &t in &spec.snapshot_times {
                    let r = row_at(layer.rows, t);
                    let state = UnicycleState::new(Vec2::new(r.x, r.y), r.theta);
                    let goal = path.eval(r.s);
                    let set = predict(&method, &state, goal, params).unwrap_or_else(|e| e.partial);
                    draw_set(&mut out, &view, &set, &class);
                    if let Some(env) = scene.environment {
                        let (x, y) = view.point(state.position);
                        let _ = writeln!(
                            out,
                            "<circle class=\"robot\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
                            num(x),
                            num(y),
                            num(env.robot_radius() * view.scale)
                        );
                    }
                }
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Linear speed against time for every layer, on shared axes.
pub fn render_speed_profile(layers: &[TrajectoryLayer<'_>], spec: &RenderSpec) -> Result<String, RenderError> {
    spec.validate()?;
    check_layers(layers)?;
    let t_max = layers
        .iter()
        .flat_map(|l| l.rows.iter().map(|r| r.t))
        .fold(0.0, f64::max)
        .max(1e-9);
    let v_max = layers
        .iter()
        .flat_map(|l| l.rows.iter().map(|r| r.v.abs()))
        .fold(0.0, f64::max)
        .max(1e-9);
    let v_min = layers
        .iter()
        .flat_map(|l| l.rows.iter().map(|r| r.v))
        .fold(0.0, f64::min);
    let view = View::fit(
        Vec2::new(0.0, v_min),
        Vec2::new(t_max, v_max),
        &RenderSpec {
            padding: spec.padding + 30.0,
            ..spec.clone()
        },
    );

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = spec.width,
        h = spec.height
    );
    out.push_str(&style(spec, layers.len()));
    let origin = view.point(Vec2::new(0.0, 0.0));
    let t_end = view.point(Vec2::new(t_max, 0.0));
    let v_top = view.point(Vec2::new(0.0, v_max));
    let v_bottom = view.point(Vec2::new(0.0, v_min));
    let _ = writeln!(
        out,
        "<line class=\"axis\" stroke=\"#000000\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
        num(origin.0),
        num(origin.1),
        num(t_end.0),
        num(t_end.1)
    );
    let _ = writeln!(
        out,
        "<line class=\"axis\" stroke=\"#000000\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
        num(v_bottom.0),
        num(v_bottom.1),
        num(v_top.0),
        num(v_top.1)
    );
    let _ = writeln!(
        out,
        "<text class=\"label\" x=\"{}\" y=\"{}\">t = {} s</text>",
        num(t_end.0 - 60.0),
        num(t_end.1 + 16.0),
        num(t_max)
    );
    let _ = writeln!(
        out,
        "<text class=\"label\" x=\"{}\" y=\"{}\">v = {} m/s</text>",
        num(v_top.0 + 4.0),
        num(v_top.1 - 4.0),
        num(v_max)
    );
    for (i, layer) in layers.iter().enumerate() {
        let _ = writeln!(
            out,
            "<polyline class=\"trajectory traj-{i}\" fill=\"none\" points=\"{}\"><title>{}</title></polyline>",
            view.points(layer.rows.iter().map(|r| Vec2::new(r.t, r.v))),
            escape(layer.label)
        );
        let _ = writeln!(
            out,
            "<text class=\"label traj-{i}\" stroke=\"none\" x=\"{}\" y=\"{}\">{}</text>",
            num(spec.padding),
            num(spec.padding + 14.0 * (i as f64 + 1.0)),
            escape(layer.label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polygon;

    fn rows() -> Vec<TrajectoryRow> {
        (0..50)
            .map(|k| {
                let t = k as f64 * 0.1;
                TrajectoryRow {
                    t,
                    s: t,
                    x: 1.0 + t,
                    y: 2.0,
                    theta: 0.0,
                    v: 1.0,
                    omega: 0.0,
                    delta_f: 0.5,
                    pred_radius: 1.0,
                    margin: 0.7,
                }
            })
            .collect()
    }

    #[test]
    fn triangle_snapshot_is_a_three_vertex_polygon() {
        let env = Environment::new(
            Polygon::rectangle(Vec2::new(0.0, 0.0), Vec2::new(8.0, 4.0)).unwrap(),
            vec![],
            0.3,
        )
        .unwrap();
        let path = ReferencePath::new(vec![Vec2::new(1.0, 2.0), Vec2::new(7.0, 2.0)]).unwrap();
        let params = ControllerParams::new(0.5, 1.0, 1e-4).unwrap();
        let scene = Scene {
            environment: Some(&env),
            path: Some(&path),
            params: Some(&params),
        };
        let mut r = rows();
        // put the path point ahead of the robot so the triangle is not a point
        for row in &mut r {
            row.s += 1.0;
        }
        let layer = TrajectoryLayer {
            label: "triangle",
            rows: &r,
            method: Some(PredictionMethod::Triangle),
        };
        let svg = render_scene(&scene, &[layer], &RenderSpec::default()).unwrap();
        let tri = svg
            .lines()
            .find(|l| l.contains("prediction triangle"))
            .expect("triangle element");
        let points = tri.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(points.split(' ').count(), 3);
        assert_eq!(svg, render_scene(&scene, &[layer], &RenderSpec::default()).unwrap());
    }

    #[test]
    fn two_layers_get_distinct_classes() {
        let a = rows();
        let b: Vec<_> = rows()
            .into_iter()
            .map(|mut r| {
                r.y = 3.0;
                r
            })
            .collect();
        let layers = [
            TrajectoryLayer {
                label: "circle",
                rows: &a,
                method: None,
            },
            TrajectoryLayer {
                label: "triangle",
                rows: &b,
                method: None,
            },
        ];
        let svg = render_scene(&Scene::default(), &layers, &RenderSpec::default()).unwrap();
        assert!(svg.contains("class=\"trajectory traj-0\""));
        assert!(svg.contains("class=\"trajectory traj-1\""));
        let speed = render_speed_profile(&layers, &RenderSpec::default()).unwrap();
        assert!(speed.contains("traj-0") && speed.contains("traj-1"));
    }

    #[test]
    fn empty_inputs_are_errors() {
        let layer = TrajectoryLayer {
            label: "x",
            rows: &[],
            method: None,
        };
        assert_eq!(
            render_scene(&Scene::default(), &[layer], &RenderSpec::default()),
            Err(RenderError::EmptyTrajectory("x".into()))
        );
        assert_eq!(
            render_speed_profile(&[], &RenderSpec::default()),
            Err(RenderError::NoTrajectories)
        );
        assert_eq!(RenderSpec::new(0, 10), Err(RenderError::Canvas(0, 10)));
    }
}
