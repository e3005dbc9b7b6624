//! Planar geometric primitives: vectors, segments, triangles and simple
//! polygons, with the distance and containment queries the rest of the
//! crate is built on.
//!
//! Degenerate triangles (collinear or coincident vertices) are legal values.
//! Every query treats them as the segment or point they collapse to.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("non-finite coordinate ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("polygon edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Vec2<T> {
    /// Unchecked constructor; a diverging integration may pass non-finite
    /// values through. Use [`Vec2::try_new`] for untrusted input.
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn try_new(x: T, y: T) -> Result<Self, GeomError> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(GeomError::NonFinite {
                x: x.as_f64(),
                y: y.as_f64(),
            })
        }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// Unit heading vector `(cos θ, sin θ)`.
    #[inline]
    pub fn from_angle(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, s)
    }

    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    #[inline]
    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    /// Counterclockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    #[inline]
    pub fn rotate(self, angle: T) -> Self {
        rotate(self, angle)
    }

    /// Unit vector in the same direction, or zero for the zero vector.
    pub fn normalized_or_zero(self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self / n
        } else {
            Self::zero()
        }
    }

    /// Exact at both ends: `t = 0` gives `self`, `t = 1` gives `other`.
    #[inline]
    pub fn lerp(self, other: Self, t: T) -> Self {
        self * (T::one() - t) + other * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn cast<U: Scalar>(self) -> Vec2<U> {
        Vec2::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()))
    }
}

impl<T: Scalar> Add for Vec2<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Scalar> AddAssign for Vec2<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Scalar> Sub for Vec2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Scalar> SubAssign for Vec2<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<T: Scalar> Mul<T> for Vec2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: T) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

impl<T: Scalar> Div<T> for Vec2<T> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: T) -> Self {
        Self::new(self.x / rhs, self.y / rhs)
    }
}

impl<T: Scalar> Neg for Vec2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// `R_angle · v`.
pub fn rotate<T: Scalar>(v: Vec2<T>, angle: T) -> Vec2<T> {
    let (s, c) = angle.sin_cos();
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T> {
    pub a: Vec2<T>,
    pub b: Vec2<T>,
}

impl<T: Scalar> Segment<T> {
    pub fn new(a: Vec2<T>, b: Vec2<T>) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> T {
        self.a.distance(self.b)
    }

    /// Closest point on the segment to `z`.
    pub fn closest_point(&self, z: Vec2<T>) -> Vec2<T> {
        let ab = self.b - self.a;
        let len2 = ab.norm_squared();
        if len2 <= T::zero() {
            return self.a;
        }
        let t = ((z - self.a).dot(ab) / len2).max(T::zero()).min(T::one());
        self.a + ab * t
    }
}

pub fn point_segment_distance<T: Scalar>(z: Vec2<T>, s: &Segment<T>) -> T {
    z.distance(s.closest_point(z))
}

fn orientation<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> T {
    (b - a).cross(c - a)
}

/// `c` known collinear with `a`-`b`; tests whether it lies within their box.
fn within_box<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> bool {
    c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
}

/// Closed-segment intersection test.
pub fn segments_intersect<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>) -> bool {
    let (p1, p2, q1, q2) = (s1.a, s1.b, s2.a, s2.b);
    let d1 = orientation(q1, q2, p1);
    let d2 = orientation(q1, q2, p2);
    let d3 = orientation(p1, p2, q1);
    let d4 = orientation(p1, p2, q2);
    let zero = T::zero();
    if ((d1 > zero && d2 < zero) || (d1 < zero && d2 > zero)) && ((d3 > zero && d4 < zero) || (d3 < zero && d4 > zero))
    {
        return true;
    }
    (d1 == zero && within_box(q1, q2, p1))
        || (d2 == zero && within_box(q1, q2, p2))
        || (d3 == zero && within_box(p1, p2, q1))
        || (d4 == zero && within_box(p1, p2, q2))
}

pub fn segment_segment_distance<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>) -> T {
    if segments_intersect(s1, s2) {
        return T::zero();
    }
    point_segment_distance(s1.a, s2)
        .min(point_segment_distance(s1.b, s2))
        .min(point_segment_distance(s2.a, s1))
        .min(point_segment_distance(s2.b, s1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle<T> {
    pub v0: Vec2<T>,
    pub v1: Vec2<T>,
    pub v2: Vec2<T>,
}

impl<T: Scalar> Triangle<T> {
    pub fn new(v0: Vec2<T>, v1: Vec2<T>, v2: Vec2<T>) -> Self {
        Self { v0, v1, v2 }
    }

    /// Point triangle collapsed onto `p`.
    pub fn point(p: Vec2<T>) -> Self {
        Self::new(p, p, p)
    }

    pub fn vertices(&self) -> [Vec2<T>; 3] {
        [self.v0, self.v1, self.v2]
    }

    pub fn edges(&self) -> [Segment<T>; 3] {
        [
            Segment::new(self.v0, self.v1),
            Segment::new(self.v1, self.v2),
            Segment::new(self.v2, self.v0),
        ]
    }

    /// Twice the signed area (positive when counterclockwise).
    pub fn signed_area2(&self) -> T {
        orientation(self.v0, self.v1, self.v2)
    }

    fn longest_edge(&self) -> Segment<T> {
        let edges = self.edges();
        let mut best = edges[0];
        for e in &edges[1..] {
            if e.length() > best.length() {
                best = *e;
            }
        }
        best
    }

    fn scale(&self) -> T {
        self.longest_edge().length()
    }

    /// True when the vertices are collinear within tolerance, so the hull is
    /// a segment or a point.
    pub fn is_degenerate(&self) -> bool {
        let scale = self.scale();
        self.signed_area2().abs() <= T::geom_eps() * scale * scale
    }

    pub fn contains(&self, z: Vec2<T>) -> bool {
        triangle_contains(self, z)
    }
}

/// Closed convex hull membership, including collinear triangles whose hull
/// is a segment.
pub fn triangle_contains<T: Scalar>(t: &Triangle<T>, z: Vec2<T>) -> bool {
    let scale = t.scale();
    if t.is_degenerate() {
        let tol = T::geom_eps() * scale.max(T::one());
        return point_segment_distance(z, &t.longest_edge()) <= tol;
    }
    let tol = T::geom_eps() * scale * scale;
    let c0 = orientation(t.v0, t.v1, z);
    let c1 = orientation(t.v1, t.v2, z);
    let c2 = orientation(t.v2, t.v0, z);
    (c0 >= -tol && c1 >= -tol && c2 >= -tol) || (c0 <= tol && c1 <= tol && c2 <= tol)
}

/// Distance from `z` to the closed triangle; zero inside.
pub fn triangle_point_distance<T: Scalar>(t: &Triangle<T>, z: Vec2<T>) -> T {
    if triangle_contains(t, z) {
        return T::zero();
    }
    t.edges()
        .iter()
        .map(|e| point_segment_distance(z, e))
        .fold(T::infinity(), T::min)
}

/// Distance between a closed triangle and a segment; zero when they meet.
pub fn triangle_segment_distance<T: Scalar>(t: &Triangle<T>, s: &Segment<T>) -> T {
    if triangle_contains(t, s.a) || triangle_contains(t, s.b) {
        return T::zero();
    }
    t.edges()
        .iter()
        .map(|e| segment_segment_distance(e, s))
        .fold(T::infinity(), T::min)
}

/// Simple polygon with counterclockwise vertex order, closed implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<T> {
    vertices: Vec<Vec2<T>>,
}

impl<T: Scalar> Polygon<T> {
    /// Validates and normalizes to counterclockwise order.
    pub fn new(mut vertices: Vec<Vec2<T>>) -> Result<Self, GeomError> {
        if vertices.len() < 3 {
            return Err(GeomError::TooFewVertices(vertices.len()));
        }
        if let Some(v) = vertices.iter().find(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite {
                x: v.x.as_f64(),
                y: v.y.as_f64(),
            });
        }
        let area2 = signed_area2(&vertices);
        if area2 == T::zero() {
            return Err(GeomError::ZeroArea);
        }
        if area2 < T::zero() {
            vertices.reverse();
        }
        let polygon = Self { vertices };
        polygon.check_simple()?;
        Ok(polygon)
    }

    /// Axis-aligned rectangle from two opposite corners.
    pub fn rectangle(min: Vec2<T>, max: Vec2<T>) -> Result<Self, GeomError> {
        Self::new(vec![min, Vec2::new(max.x, min.y), max, Vec2::new(min.x, max.y)])
    }

    fn check_simple(&self) -> Result<(), GeomError> {
        let n = self.vertices.len();
        let edges: Vec<_> = self.edges().collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // neighbours share exactly one vertex; overlapping means a fold-back
                    let (e, f) = if j == i + 1 {
                        (edges[i], edges[j])
                    } else {
                        (edges[j], edges[i])
                    };
                    let turn = (e.b - e.a).cross(f.b - f.a);
                    if turn == T::zero() && (e.b - e.a).dot(f.b - f.a) < T::zero() {
                        return Err(GeomError::SelfIntersecting(i, j));
                    }
                    continue;
                }
                if segments_intersect(&edges[i], &edges[j]) {
                    return Err(GeomError::SelfIntersecting(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Vec2<T>] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment<T>> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> T {
        signed_area2(&self.vertices) / T::lit(2.0)
    }

    /// Returns `(min, max)` corners of the bounding box.
    pub fn bounding_box(&self) -> (Vec2<T>, Vec2<T>) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices[1..] {
            lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }

    /// Even-odd interior test; boundary points may land on either side, so
    /// callers needing closedness combine it with the boundary distance.
    pub fn contains_interior(&self, z: Vec2<T>) -> bool {
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let (vi, vj) = (self.vertices[i], self.vertices[j]);
            if (vi.y > z.y) != (vj.y > z.y) {
                let x_cross = vj.x + (z.y - vj.y) / (vi.y - vj.y) * (vi.x - vj.x);
                if z.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Unsigned distance from `z` to the polygon boundary.
    pub fn boundary_distance(&self, z: Vec2<T>) -> T {
        self.edges()
            .map(|e| point_segment_distance(z, &e))
            .fold(T::infinity(), T::min)
    }

    pub fn signed_distance(&self, z: Vec2<T>) -> T {
        let d = self.boundary_distance(z);
        if d > T::zero() && self.contains_interior(z) {
            -d
        } else {
            d
        }
    }
}

fn signed_area2<T: Scalar>(vertices: &[Vec2<T>]) -> T {
    let n = vertices.len();
    (0..n).fold(T::zero(), |acc, i| acc + vertices[i].cross(vertices[(i + 1) % n]))
}

/// Signed Euclidean distance to the polygon boundary: negative inside,
/// positive outside, zero on the boundary.
pub fn polygon_point_distance<T: Scalar>(p: &Polygon<T>, z: Vec2<T>) -> T {
    p.signed_distance(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    fn seg(a: (f64, f64), b: (f64, f64)) -> Segment<f64> {
        Segment::new(v(a.0, a.1), v(b.0, b.1))
    }

    fn close(a: Vec2<f64>, b: Vec2<f64>) -> bool {
        a.distance(b) < 1e-12
    }

    fn unit_square() -> Polygon<f64> {
        Polygon::rectangle(v(0.0, 0.0), v(1.0, 1.0)).unwrap()
    }

    #[test]
    fn rotate_examples() {
        assert!(close(rotate(v(1.0, 0.0), PI / 2.0), v(0.0, 1.0)));
        assert_eq!(rotate(v(0.0, 0.0), 1.3), v(0.0, 0.0));
        assert!(close(rotate(v(1.0, 1.0), PI), v(-1.0, -1.0)));
    }

    #[test]
    fn point_segment_examples() {
        let s = seg((0.0, 0.0), (1.0, 0.0));
        assert_eq!(point_segment_distance(v(0.0, 1.0), &s), 1.0);
        assert_eq!(point_segment_distance(v(2.0, 0.0), &s), 1.0);
        assert_eq!(point_segment_distance(v(0.5, 0.0), &s), 0.0);
        // degenerate segment
        let p = seg((1.0, 1.0), (1.0, 1.0));
        assert_eq!(point_segment_distance(v(4.0, 5.0), &p), 5.0);
    }

    #[test]
    fn segment_segment_examples() {
        let d = segment_segment_distance(&seg((0.0, 0.0), (1.0, 0.0)), &seg((0.0, 1.0), (1.0, 1.0)));
        assert_eq!(d, 1.0);
        let d = segment_segment_distance(&seg((0.0, 0.0), (1.0, 1.0)), &seg((1.0, 0.0), (0.0, 1.0)));
        assert_eq!(d, 0.0);
        let d = segment_segment_distance(&seg((0.0, 0.0), (1.0, 0.0)), &seg((3.0, 0.0), (4.0, 0.0)));
        assert_eq!(d, 2.0);
        // touching at an endpoint
        let d = segment_segment_distance(&seg((0.0, 0.0), (1.0, 0.0)), &seg((1.0, 0.0), (1.0, 3.0)));
        assert_eq!(d, 0.0);
    }

    #[test]
    fn triangle_contains_examples() {
        let t = Triangle::new(v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0));
        assert!(triangle_contains(&t, v(0.25, 0.25)));
        assert!(!triangle_contains(&t, v(1.0, 1.0)));
        assert!(triangle_contains(&t, v(0.5, 0.5)));
        let flat = Triangle::new(v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0));
        assert!(triangle_contains(&flat, v(1.5, 0.0)));
        assert!(!triangle_contains(&flat, v(2.5, 0.0)));
        assert!(!triangle_contains(&flat, v(1.0, 0.1)));
        let pt = Triangle::point(v(3.0, 3.0));
        assert!(triangle_contains(&pt, v(3.0, 3.0)));
        assert!(!triangle_contains(&pt, v(3.0, 3.1)));
        // clockwise vertex order
        let cw = Triangle::new(v(0.0, 0.0), v(0.0, 1.0), v(1.0, 0.0));
        assert!(triangle_contains(&cw, v(0.2, 0.2)));
    }

    #[test]
    fn triangle_distances() {
        let t = Triangle::new(v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0));
        assert_eq!(triangle_point_distance(&t, v(0.2, 0.2)), 0.0);
        assert_eq!(triangle_point_distance(&t, v(0.5, -2.0)), 2.0);
        let s = seg((-1.0, 0.5), (2.0, 0.5));
        assert_eq!(triangle_segment_distance(&t, &s), 0.0);
        let s = seg((-1.0, 3.0), (2.0, 3.0));
        assert_eq!(triangle_segment_distance(&t, &s), 2.0);
        // segment fully inside
        let s = seg((0.1, 0.1), (0.2, 0.1));
        assert_eq!(triangle_segment_distance(&t, &s), 0.0);
    }

    #[test]
    fn polygon_signed_distance_examples() {
        let sq = unit_square();
        assert!((polygon_point_distance(&sq, v(0.5, 0.5)) + 0.5).abs() < 1e-12);
        assert_eq!(polygon_point_distance(&sq, v(2.0, 0.5)), 1.0);
        assert_eq!(polygon_point_distance(&sq, v(1.0, 0.5)), 0.0);
    }

    #[test]
    fn polygon_validation() {
        assert_eq!(
            Polygon::new(vec![v(0.0, 0.0), v(1.0, 0.0)]).unwrap_err(),
            GeomError::TooFewVertices(2)
        );
        assert_eq!(
            Polygon::new(vec![v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0)]).unwrap_err(),
            GeomError::ZeroArea
        );
        // bow tie
        let bow = Polygon::new(vec![v(0.0, 0.0), v(3.0, 0.0), v(0.0, 1.0), v(1.0, 2.0)]);
        assert!(matches!(bow, Err(GeomError::SelfIntersecting(_, _))));
        assert!(matches!(
            Polygon::new(vec![v(0.0, 0.0), Vec2 { x: f64::NAN, y: 0.0 }, v(0.0, 1.0)]),
            Err(GeomError::NonFinite { .. })
        ));
        // clockwise input is reordered
        let cw = Polygon::new(vec![v(0.0, 0.0), v(0.0, 1.0), v(1.0, 1.0), v(1.0, 0.0)]).unwrap();
        assert!(cw.area() > 0.0);
    }

    #[test]
    fn non_convex_polygon_distance() {
        // L shape
        let l = Polygon::new(vec![
            v(0.0, 0.0),
            v(2.0, 0.0),
            v(2.0, 1.0),
            v(1.0, 1.0),
            v(1.0, 2.0),
            v(0.0, 2.0),
        ])
        .unwrap();
        assert!((polygon_point_distance(&l, v(1.5, 1.5)) - 0.5).abs() < 1e-12);
        assert!((polygon_point_distance(&l, v(3.0, 3.0)) - 5f64.sqrt()).abs() < 1e-12);
        assert!((polygon_point_distance(&l, v(0.5, 1.5)) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn try_new_rejects_non_finite() {
        assert!(Vec2::try_new(f64::INFINITY, 0.0).is_err());
        assert!(Vec2::try_new(0.0, f64::NAN).is_err());
        assert!(Vec2::try_new(1.0, 2.0).is_ok());
    }

    #[test]
    fn f32_geometry() {
        let t = Triangle::new(Vec2::new(0.0_f32, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
        assert!(t.contains(Vec2::new(0.3, 0.3)));
        let r = rotate(Vec2::new(1.0_f32, 0.0), std::f32::consts::FRAC_PI_2);
        assert!((r.y - 1.0).abs() < 1e-6);
    }
}
