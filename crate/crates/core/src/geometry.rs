//! Planar primitives: points, circles, normalized lines and the handful of
//! constructions the rest of the crate is built on (tangents from a point,
//! line/circle intersection, circumcircles, algebraic circle fit).
//!
//! Every function here is pure. Degeneracy thresholds live in [`Tolerances`];
//! the plain functions use [`Tolerances::default`], the `*_with` variants take
//! an explicit set.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("point lies inside the circle")]
    PointInsideCircle,
    #[error("point lies on the circle")]
    PointOnCircle,
    #[error("points are collinear")]
    CollinearPoints,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("radius must be finite and strictly positive, got {0}")]
    InvalidRadius(f64),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("lines are parallel")]
    ParallelLines,
}

/// Thresholds used to classify degenerate configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative threshold below which lengths/areas count as zero.
    pub degenerate: f64,
    /// Relative band around a circle inside which a point counts as lying on it.
    pub tangency: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            degenerate: 1e-12,
            tangency: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Point at `angle` on the circle of `radius` around `self`.
    pub fn polar_offset(self, radius: f64, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(self.x + radius * c, self.y + radius * s)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Polar angle of `self - origin` in `[0, 2π)`.
    pub fn angle_about(self, origin: Point2) -> f64 {
        let d = self - origin;
        let a = d.y.atan2(d.x);
        if a < 0.0 {
            a + TAU
        } else {
            a
        }
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A circle with finite, strictly positive radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    center: Point2,
    radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Result<Self, GeometryError> {
        if !center.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::InvalidRadius(radius));
        }
        Ok(Circle { center, radius })
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Signed radial deviation `|p - center| - radius`.
    pub fn radial_offset(&self, p: Point2) -> f64 {
        p.distance(self.center) - self.radius
    }

    pub fn point_at(&self, angle: f64) -> Point2 {
        self.center.polar_offset(self.radius, angle)
    }

    /// Moves `p` radially onto the circle. `p` must differ from the center.
    pub fn project(&self, p: Point2) -> Point2 {
        let d = p - self.center;
        self.center + d * (self.radius / d.norm())
    }
}

/// The line `{p : normal · p = offset}` with a unit normal whose first nonzero
/// component is positive, so equal lines compare equal field-for-field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    normal: Point2,
    offset: f64,
}

impl Line {
    /// Builds a line from any nonzero normal, normalizing and fixing the sign.
    pub fn new(normal_x: f64, normal_y: f64, offset: f64) -> Result<Self, GeometryError> {
        let normal = Point2::new(normal_x, normal_y);
        if !normal.is_finite() || !offset.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        let len = normal.norm();
        if len == 0.0 {
            return Err(GeometryError::DegenerateInput("zero line normal"));
        }
        Ok(Self::canonical(normal * (1.0 / len), offset / len))
    }

    /// Like [`Line::new`], but keeps an already unit normal bit-for-bit so
    /// stored lines survive a text round trip unchanged.
    pub fn from_stored(normal_x: f64, normal_y: f64, offset: f64) -> Result<Self, GeometryError> {
        let normal = Point2::new(normal_x, normal_y);
        if normal.is_finite() && offset.is_finite() && (normal.norm() - 1.0).abs() <= 1e-12 {
            return Ok(Self::canonical(normal, offset));
        }
        Self::new(normal_x, normal_y, offset)
    }

    /// Line through `point` with the given normal direction.
    pub fn with_normal_through(normal: Point2, point: Point2) -> Result<Self, GeometryError> {
        let len = normal.norm();
        if !(len > 0.0) || !len.is_finite() {
            return Err(GeometryError::DegenerateInput("zero line normal"));
        }
        let n = normal * (1.0 / len);
        Ok(Self::canonical(n, n.dot(point)))
    }

    fn canonical(normal: Point2, offset: f64) -> Self {
        let flip = normal.x < 0.0 || (normal.x == 0.0 && normal.y < 0.0);
        let (normal, offset) = if flip {
            (-normal, -offset)
        } else {
            (normal, offset)
        };
        // `+ 0.0` folds negative zero so canonical lines compare bitwise.
        Line {
            normal: Point2::new(normal.x + 0.0, normal.y + 0.0),
            offset: offset + 0.0,
        }
    }

    pub fn normal(&self) -> Point2 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Unit direction along the line (the normal turned clockwise).
    pub fn direction(&self) -> Point2 {
        Point2::new(self.normal.y, -self.normal.x)
    }

    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.normal.dot(p) - self.offset
    }

    /// Orthogonal projection of `p` onto the line.
    pub fn foot(&self, p: Point2) -> Point2 {
        p - self.normal * self.signed_distance(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub circle: Circle,
    pub rms_residual: f64,
    pub max_residual: f64,
}

/// The two tangents from an exterior point to a circle.
///
/// `points[0]` is counterclockwise from the external point as seen from the
/// circle's center; `lines[k]` touches the circle at `points[k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangents {
    pub lines: [Line; 2],
    pub points: [Point2; 2],
}

fn ensure_finite(points: &[Point2]) -> Result<(), GeometryError> {
    if points.iter().all(|p| p.is_finite()) {
        Ok(())
    } else {
        Err(GeometryError::NonFinite)
    }
}

pub fn line_through(p: Point2, q: Point2) -> Result<Line, GeometryError> {
    line_through_with(p, q, &Tolerances::default())
}

pub fn line_through_with(p: Point2, q: Point2, tol: &Tolerances) -> Result<Line, GeometryError> {
    ensure_finite(&[p, q])?;
    // Sorting the endpoints makes the result independent of argument order.
    let (a, b) = if (p.x, p.y) <= (q.x, q.y) {
        (p, q)
    } else {
        (q, p)
    };
    let scale = 1f64.max(a.norm()).max(b.norm());
    let d = b - a;
    let len = d.norm();
    if len <= tol.degenerate * scale {
        return Err(GeometryError::DegenerateInput("coincident points"));
    }
    let normal = d.perp() * (1.0 / len);
    Ok(Line::canonical(normal, normal.dot(a)))
}

pub fn distance_point_line(p: Point2, l: &Line) -> f64 {
    l.signed_distance(p).abs()
}

/// Intersection point of two lines.
pub fn intersect_lines(l1: &Line, l2: &Line, eps_parallel: f64) -> Result<Point2, GeometryError> {
    let (n1, n2) = (l1.normal, l2.normal);
    let det = n1.cross(n2);
    if det.abs() <= eps_parallel {
        return Err(GeometryError::ParallelLines);
    }
    Ok(Point2::new(
        (l1.offset * n2.y - l2.offset * n1.y) / det,
        (n1.x * l2.offset - n2.x * l1.offset) / det,
    ))
}

pub fn tangent_lines_from_point(c: &Circle, p: Point2) -> Result<Tangents, GeometryError> {
    tangent_lines_from_point_with(c, p, &Tolerances::default())
}

pub fn tangent_lines_from_point_with(
    c: &Circle,
    p: Point2,
    tol: &Tolerances,
) -> Result<Tangents, GeometryError> {
    ensure_finite(&[p])?;
    let r = c.radius;
    let v = p - c.center;
    let dist = v.norm();
    if (dist - r).abs() <= tol.tangency * r {
        return Err(GeometryError::PointOnCircle);
    }
    if dist < r {
        return Err(GeometryError::PointInsideCircle);
    }
    let u = v * (1.0 / dist);
    let cos_t = r / dist;
    let sin_t = ((dist - r) * (dist + r)).sqrt() / dist;
    let along = u * (r * cos_t);
    let across = u.perp() * (r * sin_t);
    let points = [c.center + along + across, c.center + along - across];
    let lines = [
        Line::with_normal_through(points[0] - c.center, points[0])?,
        Line::with_normal_through(points[1] - c.center, points[1])?,
    ];
    Ok(Tangents { lines, points })
}

pub fn line_circle_intersection(l: &Line, c: &Circle) -> Vec<Point2> {
    line_circle_intersection_with(l, c, &Tolerances::default())
}

/// Up to two intersection points, sorted by counterclockwise angle about the
/// circle's center in `[0, 2π)`. A near-tangent line yields its foot point.
pub fn line_circle_intersection_with(l: &Line, c: &Circle, tol: &Tolerances) -> Vec<Point2> {
    let r = c.radius;
    let h = l.signed_distance(c.center);
    let foot = c.center - l.normal * h;
    if (h.abs() - r).abs() <= tol.tangency * r {
        return vec![foot];
    }
    if h.abs() > r {
        return Vec::new();
    }
    let half = ((r - h.abs()) * (r + h.abs())).sqrt();
    let dir = l.direction();
    let mut pts = vec![foot + dir * half, foot - dir * half];
    pts.sort_by(|a, b| a.angle_about(c.center).total_cmp(&b.angle_about(c.center)));
    pts
}

fn triangle_area2(p1: Point2, p2: Point2, p3: Point2) -> f64 {
    (p2 - p1).cross(p3 - p1)
}

fn max_pairwise(points: &[Point2]) -> f64 {
    let mut m: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            m = m.max(a.distance(*b));
        }
    }
    m
}

pub fn circumcircle(p1: Point2, p2: Point2, p3: Point2) -> Result<Circle, GeometryError> {
    circumcircle_with(p1, p2, p3, &Tolerances::default())
}

pub fn circumcircle_with(
    p1: Point2,
    p2: Point2,
    p3: Point2,
    tol: &Tolerances,
) -> Result<Circle, GeometryError> {
    ensure_finite(&[p1, p2, p3])?;
    let scale = max_pairwise(&[p1, p2, p3]);
    let area2 = triangle_area2(p1, p2, p3);
    if 0.5 * area2.abs() < tol.degenerate * scale * scale || scale == 0.0 {
        return Err(GeometryError::CollinearPoints);
    }
    // Solve relative to p1 to keep the magnitudes small.
    let b = p2 - p1;
    let c = p3 - p1;
    let (bb, cc) = (b.dot(b), c.dot(c));
    let ux = (c.y * bb - b.y * cc) / (2.0 * area2);
    let uy = (b.x * cc - c.x * bb) / (2.0 * area2);
    let offset = Point2::new(ux, uy);
    Circle::new(p1 + offset, offset.norm())
}

pub fn fit_circle(points: &[Point2]) -> Result<FitResult, GeometryError> {
    fit_circle_with(points, &Tolerances::default())
}

/// Algebraic (Kåsa) least-squares circle.
///
/// Minimizes `Σ (x² + y² − 2ax − 2by + c)²` over `(a, b, c)`. The data are
/// centered on their centroid first, which decouples `c` and leaves a 2×2
/// system for the center.
pub fn fit_circle_with(points: &[Point2], tol: &Tolerances) -> Result<FitResult, GeometryError> {
    if points.len() < 3 {
        return Err(GeometryError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    ensure_finite(points)?;
    ensure_not_collinear(points, tol)?;

    let n = points.len() as f64;
    let centroid = points.iter().fold(Point2::ORIGIN, |acc, p| acc + *p) * (1.0 / n);
    let (mut suu, mut svv, mut suv) = (0.0, 0.0, 0.0);
    let (mut su_r, mut sv_r) = (0.0, 0.0);
    for p in points {
        let q = *p - centroid;
        let rr = q.dot(q);
        suu += q.x * q.x;
        svv += q.y * q.y;
        suv += q.x * q.y;
        su_r += q.x * rr;
        sv_r += q.y * rr;
    }
    let det = suu * svv - suv * suv;
    if !(det.abs() > 0.0) {
        return Err(GeometryError::CollinearPoints);
    }
    let a = 0.5 * (su_r * svv - sv_r * suv) / det;
    let b = 0.5 * (sv_r * suu - su_r * suv) / det;
    let radius = (a * a + b * b + (suu + svv) / n).sqrt();
    let circle = Circle::new(centroid + Point2::new(a, b), radius)?;

    let (mut sq, mut max): (f64, f64) = (0.0, 0.0);
    for p in points {
        let r = circle.radial_offset(*p).abs();
        sq += r * r;
        max = max.max(r);
    }
    Ok(FitResult {
        circle,
        rms_residual: (sq / n).sqrt(),
        max_residual: max,
    })
}

/// Collinearity check on the extremal triple: the first point, the point
/// farthest from it, and the point farthest from the line through those two.
fn ensure_not_collinear(points: &[Point2], tol: &Tolerances) -> Result<(), GeometryError> {
    let a = points[0];
    let b = *points
        .iter()
        .max_by(|p, q| p.distance(a).total_cmp(&q.distance(a)))
        .expect("non-empty");
    let ab = b - a;
    let c = *points
        .iter()
        .max_by(|p, q| ab.cross(**p - a).abs().total_cmp(&ab.cross(**q - a).abs()))
        .expect("non-empty");
    let scale = max_pairwise(&[a, b, c]);
    if scale == 0.0 || 0.5 * triangle_area2(a, b, c).abs() < tol.degenerate * scale * scale {
        return Err(GeometryError::CollinearPoints);
    }
    Ok(())
}

/// Signed shoelace area (positive for counterclockwise vertex order).
pub fn shoelace_area(points: &[Point2]) -> f64 {
    let n = points.len();
    let mut twice = 0.0;
    for i in 0..n {
        twice += points[i].cross(points[(i + 1) % n]);
    }
    0.5 * twice
}
