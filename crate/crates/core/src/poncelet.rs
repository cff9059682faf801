//! Tangent-chord iteration over a circle pair and the numeric closure solver.
//!
//! A vertex on the circumcircle `K` sends a tangent to the incircle `C`; the
//! second intersection of that tangent with `K` is the next vertex, and the
//! next tangent is the *other* tangent from there. Closure after `n` steps
//! with `w` turns around the incircle center is what makes the polygon
//! bicentric.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

use crate::geometry::{
    distance_point_line, tangent_lines_from_point_with, Circle, GeometryError, Line, Point2,
    Tolerances,
};

/// Positional closure tolerance, relative to `R_K`.
pub const CLOSURE_TOL: f64 = 1e-9;
/// Tolerance for the on-`K` and tangency invariants, relative to `R_K`.
pub const POLYGON_TOL: f64 = 1e-10;
/// Angular closure the solver must reach, in radians.
pub const SOLVER_ANGLE_TOL: f64 = 1e-12;

const BISECT_MAX_ITER: usize = 200;
const PORISM_CLOSED: f64 = 1e-9;
const PORISM_BREAK: f64 = 1e-6;
// Distances kept from the degenerate ends of the solver bracket, relative to
// the bracket length; later entries are tried when the orbit still closes
// too fast at the earlier ones.
const BRACKET_MARGINS: [f64; 4] = [1e-6, 1e-8, 1e-10, 1e-12];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PonceletError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("vertex is not on the circumcircle (off by {0:e} relative)")]
    VertexNotOnK(f64),
    #[error("vertex lies inside the incircle")]
    VertexInsideC,
    #[error("vertex lies on the incircle, tangents coincide")]
    VertexOnC,
    #[error("both tangency points coincide with the incoming one")]
    AmbiguousTangent,
    #[error("tangent chord degenerates to a point")]
    DegenerateChord,
    #[error("invalid arguments: {0}")]
    InvalidArgument(String),
    #[error("no closing incircle radius in the bracket: {0}")]
    NoSolution(String),
    #[error("closure defect is not monotone in the incircle radius at r = {radius}")]
    NonMonotonic { radius: f64 },
    #[error("sampled closure defects disagree: min {min:e}, max {max:e}")]
    PorismViolation { min: f64, max: f64 },
    #[error("d = R_K is a pole of the closure condition")]
    PoleAtDEqualsRK,
}

/// Relative position of the two circles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Configuration {
    /// `C` strictly inside `K`.
    Nested,
    Intersecting,
    /// `C` strictly outside `K`.
    Exterior,
    /// `K` strictly inside `C`; no vertex can see a tangent.
    Enclosing,
}

/// Circumcircle `K` and incircle `C`. The center distance is always derived
/// from the stored centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePair {
    pub k: Circle,
    pub c: Circle,
}

impl CirclePair {
    pub fn new(k: Circle, c: Circle) -> Self {
        CirclePair { k, c }
    }

    /// Pair with `K` centered `d` to the right of `center_c` on the x-axis.
    pub fn from_radii(r_k: f64, r_c: f64, d: f64, center_c: Point2) -> Result<Self, GeometryError> {
        if !(d.is_finite() && d >= 0.0) {
            return Err(GeometryError::DegenerateInput(
                "center distance must be >= 0",
            ));
        }
        let k = Circle::new(center_c + Point2::new(d, 0.0), r_k)?;
        let c = Circle::new(center_c, r_c)?;
        Ok(CirclePair { k, c })
    }

    pub fn d(&self) -> f64 {
        self.k.center().distance(self.c.center())
    }

    pub fn r_k(&self) -> f64 {
        self.k.radius()
    }

    pub fn r_c(&self) -> f64 {
        self.c.radius()
    }

    pub fn configuration(&self) -> Configuration {
        let (rk, rc, d) = (self.r_k(), self.r_c(), self.d());
        if d + rc < rk {
            Configuration::Nested
        } else if d + rk < rc {
            Configuration::Enclosing
        } else if d > rk + rc {
            Configuration::Exterior
        } else {
            Configuration::Intersecting
        }
    }

    /// Vertex on `K` at polar angle `angle` about the center of `K`.
    pub fn vertex_at(&self, angle: f64) -> Point2 {
        self.k.point_at(angle)
    }
}

/// Traversal sense around the incircle center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Ccw,
    Cw,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Ccw => 1.0,
            Orientation::Cw => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BicentricPolygon {
    pub pair: CirclePair,
    pub vertices: Vec<Point2>,
    /// Side `i` joins vertex `i` to vertex `i + 1` (cyclically).
    pub sides: Vec<Line>,
    /// Side `i` touches `C` here.
    pub tangency_points: Vec<Point2>,
    pub winding: u32,
}

/// Invariant residuals of a polygon, all relative to `R_K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonResiduals {
    pub vertex_on_k: f64,
    pub side_tangency: f64,
    pub side_incidence: f64,
    pub min_vertex_gap: f64,
}

impl BicentricPolygon {
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn residuals(&self) -> PolygonResiduals {
        let rk = self.pair.r_k();
        let n = self.n();
        let mut out = PolygonResiduals {
            vertex_on_k: 0.0,
            side_tangency: 0.0,
            side_incidence: 0.0,
            min_vertex_gap: f64::INFINITY,
        };
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let side = &self.sides[i];
            out.vertex_on_k = out.vertex_on_k.max(self.pair.k.radial_offset(a).abs() / rk);
            let tangency = distance_point_line(self.pair.c.center(), side) - self.pair.r_c();
            out.side_tangency = out.side_tangency.max(tangency.abs() / rk);
            let incidence = distance_point_line(a, side).max(distance_point_line(b, side));
            out.side_incidence = out.side_incidence.max(incidence / rk);
            out.min_vertex_gap = out.min_vertex_gap.min(a.distance(b) / rk);
        }
        out
    }

    /// Name of the first violated polygon invariant, if any.
    pub fn check_invariants(&self) -> Result<(), &'static str> {
        let n = self.n();
        if n < 3 || self.sides.len() != n || self.tangency_points.len() != n {
            return Err("arity");
        }
        if self.winding == 0 {
            return Err("winding");
        }
        let r = self.residuals();
        if !(r.vertex_on_k <= POLYGON_TOL) {
            return Err("vertex_on_k");
        }
        if !(r.side_tangency <= POLYGON_TOL) {
            return Err("side_tangency");
        }
        if !(r.side_incidence <= CLOSURE_TOL) {
            return Err("side_incidence");
        }
        if !(r.min_vertex_gap > 1e-12) {
            return Err("distinct_vertices");
        }
        for i in 0..n {
            if self.sides[i] == self.sides[(i + 1) % n] {
                return Err("distinct_sides");
            }
        }
        Ok(())
    }

    /// Strictly monotone vertex angles about the center of `K`, one full turn.
    pub fn is_convex(&self) -> bool {
        if self.winding != 1 {
            return false;
        }
        let center = self.pair.k.center();
        let n = self.n();
        let angles: Vec<f64> = self
            .vertices
            .iter()
            .map(|v| v.angle_about(center))
            .collect();
        let steps = |sign: f64| -> Option<f64> {
            let mut total = 0.0;
            for i in 0..n {
                let mut step = sign * (angles[(i + 1) % n] - angles[i]);
                if step < 0.0 {
                    step += TAU;
                }
                if !(step > 0.0 && step < TAU) {
                    return None;
                }
                total += step;
            }
            Some(total)
        };
        [1.0, -1.0]
            .into_iter()
            .filter_map(steps)
            .any(|total| (total - TAU).abs() < 1e-6)
    }
}

/// Gap between the `n`-th iterate and the start vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureDefect {
    /// Accumulated turning about the incircle center minus `2π · winding`.
    pub angular_defect: f64,
    /// `|A_{n+1} − A_1| / R_K`.
    pub positional_defect: f64,
}

impl ClosureDefect {
    /// Angular defect folded into `[−π, π]`.
    pub fn folded(&self) -> f64 {
        let r = self.angular_defect.rem_euclid(TAU);
        if r > PI {
            r - TAU
        } else {
            r
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub next_vertex: Point2,
    pub side: Line,
    pub tangency: Point2,
}

/// One tangent-chord step from `vertex`.
///
/// With `incoming_tangency` the tangent touching `C` elsewhere is taken.
/// Without it (the first step) the tangent is chosen so that the move turns
/// in `orientation` about the incircle center.
pub fn poncelet_step(
    pair: &CirclePair,
    vertex: Point2,
    incoming_tangency: Option<Point2>,
    orientation: Orientation,
) -> Result<Step, PonceletError> {
    poncelet_step_with(
        pair,
        vertex,
        incoming_tangency,
        orientation,
        &Tolerances::default(),
    )
}

pub fn poncelet_step_with(
    pair: &CirclePair,
    vertex: Point2,
    incoming_tangency: Option<Point2>,
    orientation: Orientation,
    tol: &Tolerances,
) -> Result<Step, PonceletError> {
    let rk = pair.r_k();
    let off = pair.k.radial_offset(vertex).abs() / rk;
    if !(off <= POLYGON_TOL) {
        return Err(PonceletError::VertexNotOnK(off));
    }
    let tangents = match tangent_lines_from_point_with(&pair.c, vertex, tol) {
        Ok(t) => t,
        Err(GeometryError::PointInsideCircle) => return Err(PonceletError::VertexInsideC),
        Err(GeometryError::PointOnCircle) => return Err(PonceletError::VertexOnC),
        Err(e) => return Err(e.into()),
    };

    let chord = |k: usize| -> Result<Step, PonceletError> {
        let tangency = tangents.points[k];
        let dir = tangency - vertex;
        let dir = dir * (1.0 / dir.norm());
        let reach = -2.0 * (vertex - pair.k.center()).dot(dir);
        if reach.abs() <= tol.degenerate * rk {
            return Err(PonceletError::DegenerateChord);
        }
        Ok(Step {
            next_vertex: pair.k.project(vertex + dir * reach),
            side: tangents.lines[k],
            tangency,
        })
    };

    match incoming_tangency {
        Some(incoming) => {
            let gaps = tangents.points.map(|p| p.distance(incoming));
            let band = tol.tangency * pair.r_c();
            if gaps[0] <= band && gaps[1] <= band {
                return Err(PonceletError::AmbiguousTangent);
            }
            chord(if gaps[0] >= gaps[1] { 0 } else { 1 })
        }
        None => {
            let mc = pair.c.center();
            let sign = orientation.sign();
            let first = chord(0)?;
            if sign * (vertex - mc).cross(first.next_vertex - mc) > 0.0 {
                Ok(first)
            } else {
                chord(1)
            }
        }
    }
}

/// Signed turning angle from `a` to `b` about `center`, in `(−π, π]`.
fn turn(center: Point2, a: Point2, b: Point2) -> f64 {
    let (u, v) = (a - center, b - center);
    u.cross(v).atan2(u.dot(v))
}

/// Chains `n` steps starting at polar angle `start_angle` on `K`.
///
/// The returned polygon holds the first `n` vertices; the defect compares the
/// `(n+1)`-th with the first. An unclosed orbit is data, not an error.
pub fn trace_polygon(
    pair: &CirclePair,
    start_angle: f64,
    n: usize,
    winding: u32,
    orientation: Orientation,
) -> Result<(BicentricPolygon, ClosureDefect), PonceletError> {
    if n < 3 {
        return Err(PonceletError::InvalidArgument(format!(
            "n must be >= 3, got {n}"
        )));
    }
    if winding == 0 {
        return Err(PonceletError::InvalidArgument(
            "winding must be >= 1".into(),
        ));
    }
    let tol = Tolerances::default();
    let start = pair.vertex_at(start_angle);
    let mc = pair.c.center();
    let mut vertices = Vec::with_capacity(n);
    let mut sides = Vec::with_capacity(n);
    let mut tangency_points = Vec::with_capacity(n);
    let mut vertex = start;
    let mut incoming = None;
    let mut turning = 0.0;
    for _ in 0..n {
        let step = poncelet_step_with(pair, vertex, incoming, orientation, &tol)?;
        vertices.push(vertex);
        sides.push(step.side);
        tangency_points.push(step.tangency);
        turning += turn(mc, vertex, step.next_vertex);
        incoming = Some(step.tangency);
        vertex = step.next_vertex;
    }
    let defect = ClosureDefect {
        angular_defect: orientation.sign() * turning - TAU * f64::from(winding),
        positional_defect: vertex.distance(start) / pair.r_k(),
    };
    let polygon = BicentricPolygon {
        pair: *pair,
        vertices,
        sides,
        tangency_points,
        winding,
    };
    Ok((polygon, defect))
}

/// Largest folded angular defect over `samples` equally spaced start angles.
///
/// Closure at one start forces closure at every start; a sample set where
/// some starts close and others are far from closing signals numerical
/// breakdown and is reported as [`PonceletError::PorismViolation`].
pub fn closure_defect(
    pair: &CirclePair,
    n: usize,
    winding: u32,
    samples: usize,
) -> Result<f64, PonceletError> {
    if samples == 0 {
        return Err(PonceletError::InvalidArgument(
            "samples must be >= 1".into(),
        ));
    }
    let mut min = f64::INFINITY;
    let mut max: f64 = 0.0;
    for k in 0..samples {
        let angle = TAU * k as f64 / samples as f64;
        let (_, defect) = trace_polygon(pair, angle, n, winding, Orientation::Ccw)?;
        let value = defect.folded().abs();
        min = min.min(value);
        max = max.max(value);
    }
    if min <= PORISM_CLOSED && max > PORISM_BREAK {
        return Err(PonceletError::PorismViolation { min, max });
    }
    Ok(max)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Incircle radius closing an `n`-gon with `winding` turns, found by bisection.
///
/// `K` is placed `d` to the right of `center_c`. The search runs in units of
/// `R_K` over the nested window `(0, R_K − d)`; the accumulated turning about
/// the incircle center decreases strictly with the incircle radius, which is
/// checked at every evaluated point.
pub fn solve_closure_rc(
    n: usize,
    winding: u32,
    r_k: f64,
    d: f64,
    center_c: Point2,
) -> Result<CirclePair, PonceletError> {
    if n < 3 || winding == 0 {
        return Err(PonceletError::InvalidArgument(format!(
            "need n >= 3 and winding >= 1, got n = {n}, winding = {winding}"
        )));
    }
    if gcd(n as u64, u64::from(winding)) != 1 {
        return Err(PonceletError::InvalidArgument(format!(
            "n = {n} and winding = {winding} are not coprime"
        )));
    }
    if !(r_k.is_finite() && r_k > 0.0) || !(d.is_finite() && d >= 0.0) || !center_c.is_finite() {
        return Err(PonceletError::InvalidArgument(format!(
            "need R_K > 0 and d >= 0, got R_K = {r_k}, d = {d}"
        )));
    }
    if 2 * winding as usize >= n {
        return Err(PonceletError::NoSolution(format!(
            "nested orbits turn less than half a revolution per step; winding {winding} needs n > {}",
            2 * winding
        )));
    }
    let delta = d / r_k;
    if delta >= 1.0 {
        return Err(PonceletError::NoSolution(format!(
            "d / R_K = {delta} leaves no room for a nested incircle"
        )));
    }

    let unit_pair =
        |rc: f64| CirclePair::from_radii(1.0, rc, delta, Point2::ORIGIN).expect("radii validated");
    // Start at the vertex of K farthest from C.
    let objective = |rc: f64| -> Result<f64, PonceletError> {
        let (_, defect) = trace_polygon(&unit_pair(rc), 0.0, n, winding, Orientation::Ccw)?;
        Ok(defect.angular_defect)
    };

    let window = 1.0 - delta;
    let mut lo = window * BRACKET_MARGINS[0];
    let mut f_lo = objective(lo)?;
    // High-n orbits close only when C nearly touches K, so the upper end of
    // the bracket is pushed toward the touching radius until the sign flips.
    let mut upper = None;
    for margin in BRACKET_MARGINS {
        let hi = window * (1.0 - margin);
        match objective(hi) {
            Ok(f) if f < 0.0 => {
                upper = Some((hi, f));
                break;
            }
            Ok(_) => continue,
            Err(_) => break,
        }
    }
    let Some((mut hi, mut f_hi)) = upper.filter(|_| f_lo > 0.0) else {
        return Err(PonceletError::NoSolution(format!(
            "defect does not change sign on ({lo:e}, {:e}) R_K",
            window * (1.0 - BRACKET_MARGINS[BRACKET_MARGINS.len() - 1])
        )));
    };
    // Rounding noise near the root may reorder values by a few ulps.
    let slack = 1e-13 * n as f64;
    let mut iterations = 0;
    while iterations < BISECT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = objective(mid)?;
        if f_mid > f_lo + slack || f_mid < f_hi - slack {
            return Err(PonceletError::NonMonotonic { radius: mid * r_k });
        }
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        iterations += 1;
    }
    // Final linear interpolation inside the bracket.
    let mut rc = if f_lo > f_hi {
        lo + (hi - lo) * f_lo / (f_lo - f_hi)
    } else {
        0.5 * (lo + hi)
    };
    if !(rc >= lo && rc <= hi) {
        rc = if f_lo.abs() < f_hi.abs() { lo } else { hi };
    }

    let pair = CirclePair::from_radii(r_k, rc * r_k, d, center_c)?;
    let unit = unit_pair(rc);
    for start in [0.0, TAU / 3.0, 2.0 * TAU / 3.0] {
        let (_, defect) = trace_polygon(&unit, start, n, winding, Orientation::Ccw)?;
        if !(defect.angular_defect.abs() <= SOLVER_ANGLE_TOL) {
            return Err(PonceletError::NoSolution(format!(
                "closure check failed at start angle {start}: defect {:e}",
                defect.angular_defect
            )));
        }
    }
    Ok(pair)
}

/// Largest `d / R_K` with `d ≤ fraction · (R_K − R_C(d))`, where `R_C(d)`
/// is the closing incircle radius.
///
/// Both sides grow with `d`, the left one faster, so the bound is a single
/// crossing found by bisection. Distances the solver cannot handle count as
/// beyond the bound.
pub fn max_center_distance(n: usize, winding: u32, fraction: f64) -> Result<f64, PonceletError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(PonceletError::InvalidArgument(format!(
            "fraction must lie in (0, 1), got {fraction}"
        )));
    }
    // Surfaces argument errors (coprimality, winding) before bisecting.
    solve_closure_rc(n, winding, 1.0, 0.0, Point2::ORIGIN)?;
    let inside = |d: f64| match solve_closure_rc(n, winding, 1.0, d, Point2::ORIGIN) {
        Ok(pair) => d <= fraction * (1.0 - pair.r_c()),
        Err(_) => false,
    };
    let (mut lo, mut hi) = (0.0, fraction);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Closed-form closure conditions for triangles and quadrilaterals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// `1/(R_K−d) + 1/(R_K+d) = 1/R_C`
    Euler3,
    /// `1/(R_K−d)² + 1/(R_K+d)² = 1/R_C²`
    Fuss4,
}

pub fn condition_residual(pair: &CirclePair, kind: ConditionKind) -> Result<f64, PonceletError> {
    let (rk, rc, d) = (pair.r_k(), pair.r_c(), pair.d());
    if (rk - d).abs() <= Tolerances::default().degenerate * rk {
        return Err(PonceletError::PoleAtDEqualsRK);
    }
    let (a, b) = (1.0 / (rk - d), 1.0 / (rk + d));
    Ok(match kind {
        ConditionKind::Euler3 => a + b - 1.0 / rc,
        ConditionKind::Fuss4 => a * a + b * b - 1.0 / (rc * rc),
    })
}

/// `R_C` from the triangle condition: `(R_K² − d²) / (2 R_K)`.
pub fn euler_incircle_radius(r_k: f64, d: f64) -> f64 {
    (r_k - d) * (r_k + d) / (2.0 * r_k)
}

/// `R_C` from the quadrilateral condition.
pub fn fuss_incircle_radius(r_k: f64, d: f64) -> f64 {
    let (a, b) = (1.0 / (r_k - d), 1.0 / (r_k + d));
    1.0 / (a * a + b * b).sqrt()
}
