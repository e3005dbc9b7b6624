//! Workspace, polygonal obstacles and the free space of a disk robot,
//! together with arc-length parametrized reference paths.
//!
//! The free space is never built explicitly. Obstacles are inflated and the
//! workspace deflated by the robot radius implicitly: every query is a signed
//! point, segment or triangle distance to the original polygons minus the
//! radius.

use thiserror::Error;

use crate::geom::{
    point_segment_distance, triangle_contains, triangle_segment_distance, GeomError, Polygon, Segment, Vec2,
};
use crate::prediction::PredictionSet;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("robot radius must be positive, got {0}")]
    RobotRadius(f64),
    #[error("obstacle {0} extends beyond the workspace bounding box")]
    ObstacleOutside(usize),
    #[error("reference path needs at least 2 waypoints, got {0}")]
    TooFewWaypoints(usize),
    #[error("reference path waypoints {0} and {1} coincide")]
    RepeatedWaypoint(usize, usize),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Aabb<T> {
    lo: Vec2<T>,
    hi: Vec2<T>,
}

impl<T: Scalar> Aabb<T> {
    fn of_points(points: impl IntoIterator<Item = Vec2<T>>) -> Self {
        let mut it = points.into_iter();
        let first = it.next().expect("at least one point");
        it.fold(Self { lo: first, hi: first }, |b, p| Self {
            lo: Vec2::new(b.lo.x.min(p.x), b.lo.y.min(p.y)),
            hi: Vec2::new(b.hi.x.max(p.x), b.hi.y.max(p.y)),
        })
    }

    fn inflate(self, r: T) -> Self {
        let d = Vec2::new(r, r);
        Self {
            lo: self.lo - d,
            hi: self.hi + d,
        }
    }

    fn distance(&self, other: &Self) -> T {
        let dx = (other.lo.x - self.hi.x).max(self.lo.x - other.hi.x).max(T::zero());
        let dy = (other.lo.y - self.hi.y).max(self.lo.y - other.hi.y).max(T::zero());
        dx.hypot(dy)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Obstacle<T> {
    polygon: Polygon<T>,
    bbox: Aabb<T>,
}

/// Convex query shapes with closed-form distances to a segment.
#[derive(Clone, Copy)]
enum Probe<'a, T> {
    Disk(Vec2<T>, T),
    Tri(&'a crate::geom::Triangle<T>),
}

impl<T: Scalar> Probe<'_, T> {
    fn anchor(&self) -> Vec2<T> {
        match self {
            Probe::Disk(c, _) => *c,
            Probe::Tri(t) => t.v0,
        }
    }

    fn bbox(&self) -> Aabb<T> {
        match self {
            Probe::Disk(c, r) => Aabb::of_points([*c]).inflate(*r),
            Probe::Tri(t) => Aabb::of_points(t.vertices()),
        }
    }

    fn segment_distance(&self, e: &Segment<T>) -> T {
        match self {
            Probe::Disk(c, r) => (point_segment_distance(*c, e) - *r).max(T::zero()),
            Probe::Tri(t) => triangle_segment_distance(t, e),
        }
    }

    fn contains(&self, z: Vec2<T>) -> bool {
        match self {
            Probe::Disk(c, r) => c.distance(z) <= *r,
            Probe::Tri(t) => triangle_contains(t, z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment<T> {
    workspace: Polygon<T>,
    obstacles: Vec<Obstacle<T>>,
    robot_radius: T,
}

impl<T: Scalar> Environment<T> {
    pub fn new(workspace: Polygon<T>, obstacles: Vec<Polygon<T>>, robot_radius: T) -> Result<Self, EnvError> {
        if !(robot_radius > T::zero() && robot_radius.is_finite()) {
            return Err(EnvError::RobotRadius(robot_radius.as_f64()));
        }
        let (lo, hi) = workspace.bounding_box();
        let mut stored = Vec::with_capacity(obstacles.len());
        for (i, polygon) in obstacles.into_iter().enumerate() {
            let bbox = Aabb::of_points(polygon.vertices().iter().copied());
            if bbox.lo.x < lo.x || bbox.lo.y < lo.y || bbox.hi.x > hi.x || bbox.hi.y > hi.y {
                return Err(EnvError::ObstacleOutside(i));
            }
            stored.push(Obstacle { polygon, bbox });
        }
        Ok(Self {
            workspace,
            obstacles: stored,
            robot_radius,
        })
    }

    pub fn workspace(&self) -> &Polygon<T> {
        &self.workspace
    }

    pub fn obstacles(&self) -> impl ExactSizeIterator<Item = &Polygon<T>> {
        self.obstacles.iter().map(|o| &o.polygon)
    }

    pub fn robot_radius(&self) -> T {
        self.robot_radius
    }

    /// Point clearance of the free space: positive iff the robot disk at `p`
    /// fits strictly inside the workspace without touching an obstacle.
    pub fn free_space_margin(&self, p: Vec2<T>) -> T {
        let mut best = -self.workspace.signed_distance(p);
        let probe = Aabb::of_points([p]);
        for o in &self.obstacles {
            if probe.distance(&o.bbox) >= best {
                continue;
            }
            best = best.min(o.polygon.signed_distance(p));
        }
        best - self.robot_radius
    }

    /// Minimum free-space margin over a convex probe; negative whenever the
    /// probe leaves the free space (magnitude then unspecified).
    fn probe_clearance(&self, probe: Probe<'_, T>) -> T {
        let anchor = probe.anchor();
        if self.workspace.signed_distance(anchor) > T::zero() {
            return -self.robot_radius;
        }
        let mut best = self
            .workspace
            .edges()
            .map(|e| probe.segment_distance(&e))
            .fold(T::infinity(), T::min);
        let bbox = probe.bbox();
        for o in &self.obstacles {
            if bbox.distance(&o.bbox) >= best {
                continue;
            }
            let poly = &o.polygon;
            if poly.signed_distance(anchor) <= T::zero() || probe.contains(poly.vertices()[0]) {
                return -self.robot_radius;
            }
            for e in poly.edges() {
                best = best.min(probe.segment_distance(&e));
            }
        }
        best - self.robot_radius
    }

    /// Minimum free-space margin over the set (negative if it leaves `F`).
    pub fn set_clearance(&self, set: &PredictionSet<T>) -> T {
        match set {
            PredictionSet::Disk { center, radius } => self.probe_clearance(Probe::Disk(*center, *radius)),
            PredictionSet::Tri { triangle } => self.probe_clearance(Probe::Tri(triangle)),
            PredictionSet::Hull { points, padding } => {
                let mut best = T::infinity();
                for p in points {
                    best = best.min(self.free_space_margin(*p));
                    if best < *padding {
                        break;
                    }
                }
                best - *padding
            }
        }
    }

    /// Distance from the set to the free-space boundary when the set lies in
    /// the free space, and exactly zero otherwise.
    pub fn safety_distance(&self, set: &PredictionSet<T>) -> T {
        self.set_clearance(set).max(T::zero())
    }
}

pub fn free_space_margin<T: Scalar>(env: &Environment<T>, p: Vec2<T>) -> T {
    env.free_space_margin(p)
}

pub fn safety_distance<T: Scalar>(env: &Environment<T>, set: &PredictionSet<T>) -> T {
    env.safety_distance(set)
}

/// Piecewise-linear path parametrized by arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath<T> {
    waypoints: Vec<Vec2<T>>,
    cumulative_lengths: Vec<T>,
}

impl<T: Scalar> ReferencePath<T> {
    pub fn new(waypoints: Vec<Vec2<T>>) -> Result<Self, EnvError> {
        if waypoints.len() < 2 {
            return Err(EnvError::TooFewWaypoints(waypoints.len()));
        }
        if let Some(w) = waypoints.iter().find(|w| !w.is_finite()) {
            return Err(GeomError::NonFinite {
                x: w.x.as_f64(),
                y: w.y.as_f64(),
            }
            .into());
        }
        let mut cumulative_lengths = Vec::with_capacity(waypoints.len());
        cumulative_lengths.push(T::zero());
        for (i, w) in waypoints.windows(2).enumerate() {
            let len = w[0].distance(w[1]);
            if len <= T::zero() {
                return Err(EnvError::RepeatedWaypoint(i, i + 1));
            }
            let prev = *cumulative_lengths.last().unwrap();
            cumulative_lengths.push(prev + len);
        }
        Ok(Self {
            waypoints,
            cumulative_lengths,
        })
    }

    pub fn waypoints(&self) -> &[Vec2<T>] {
        &self.waypoints
    }

    pub fn cumulative_lengths(&self) -> &[T] {
        &self.cumulative_lengths
    }

    pub fn length(&self) -> T {
        *self.cumulative_lengths.last().unwrap()
    }

    pub fn start(&self) -> Vec2<T> {
        self.waypoints[0]
    }

    pub fn end(&self) -> Vec2<T> {
        *self.waypoints.last().unwrap()
    }

    /// `P(s)` with `s` clamped to `[0, L]`.
    pub fn eval(&self, s: T) -> Vec2<T> {
        let s = s.max(T::zero()).min(self.length());
        // first segment whose end lies at or beyond s
        let i = self.cumulative_lengths[1..].partition_point(|&c| c < s);
        let i = i.min(self.waypoints.len() - 2);
        let (s0, s1) = (self.cumulative_lengths[i], self.cumulative_lengths[i + 1]);
        let t = (s - s0) / (s1 - s0);
        self.waypoints[i].lerp(self.waypoints[i + 1], t)
    }

    /// Unit tangent at arc length `s`.
    pub fn tangent(&self, s: T) -> Vec2<T> {
        let s = s.max(T::zero()).min(self.length());
        let i = self.cumulative_lengths[1..].partition_point(|&c| c <= s);
        let i = i.min(self.waypoints.len() - 2);
        (self.waypoints[i + 1] - self.waypoints[i]).normalized_or_zero()
    }
}

pub fn path_eval<T: Scalar>(path: &ReferencePath<T>, s: T) -> Vec2<T> {
    path.eval(s)
}

/// Minimum free-space margin over `n_samples` evenly spaced path points
/// (plus the waypoints themselves).
pub fn path_clearance<T: Scalar>(env: &Environment<T>, path: &ReferencePath<T>, n_samples: usize) -> T {
    let n = n_samples.max(2);
    let len = path.length();
    let denom = T::from_usize(n - 1).unwrap();
    let uniform = (0..n).map(|k| path.eval(len * T::from_usize(k).unwrap() / denom));
    uniform
        .chain(path.waypoints().iter().copied())
        .map(|p| env.free_space_margin(p))
        .fold(T::infinity(), T::min)
}
