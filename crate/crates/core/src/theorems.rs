//! Excircle centers of a bicentric polygon and residual checks for the
//! identities they satisfy.
//!
//! Every check returns residuals as data; only structural problems (wrong
//! arity, degenerate input) are errors. Lengths are reported relative to
//! `R_K`, squared lengths relative to `R_K²`.

use thiserror::Error;

use crate::geometry::{
    circumcircle, distance_point_line, fit_circle, intersect_lines, line_circle_intersection,
    line_through, shoelace_area, Circle, FitResult, GeometryError, Line, Point2, Tolerances,
};
use crate::poncelet::{BicentricPolygon, CirclePair};

/// Cross-product threshold below which adjacent external bisectors count as parallel.
pub const EPS_PARALLEL: f64 = 1e-12;
/// Excircle tangency tolerance, relative to `R_K`.
pub const EXCIRCLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("external bisectors at vertices {index} and {next} are parallel", next = .index + 1)]
    ParallelBisectors { index: usize },
    #[error("excircle {index} is not tangent to its three sides (spread {spread:e})")]
    TangencyViolation { index: usize, spread: f64 },
    #[error("circle E degenerates to a point (d = R_K)")]
    DegenerateE,
    #[error("tangent does not cut the circumcircle in two points")]
    NoChord,
    #[error("expected a quadrilateral, got {0} vertices")]
    WrongArity(usize),
    #[error("polygon is not convex")]
    NotConvex,
    #[error("excenter count {got} does not match vertex count {expected}")]
    CountMismatch { expected: usize, got: usize },
}

/// The external angle bisector at `vertex`: the perpendicular to `vertex − M_C`.
pub fn external_bisector(vertex: Point2, mc: Point2) -> Result<Line, TheoremError> {
    let scale = 1f64.max(vertex.norm()).max(mc.norm());
    let radial = vertex - mc;
    if radial.norm() <= Tolerances::default().degenerate * scale {
        return Err(
            GeometryError::DegenerateInput("vertex coincides with the incircle center").into(),
        );
    }
    Ok(Line::with_normal_through(radial, vertex)?)
}

/// Excircle centers `M_i` (from the bisectors at `A_i` and `A_{i+1}`) with
/// their radii `dist(M_i, a_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcenterSet {
    pub excenters: Vec<Point2>,
    pub exradii: Vec<f64>,
    pub excircles: Vec<Circle>,
}

impl ExcenterSet {
    pub fn from_parts(excenters: Vec<Point2>, exradii: Vec<f64>) -> Result<Self, GeometryError> {
        if excenters.len() != exradii.len() {
            return Err(GeometryError::DegenerateInput(
                "excenter and exradius counts differ",
            ));
        }
        let excircles = excenters
            .iter()
            .zip(&exradii)
            .map(|(c, r)| Circle::new(*c, *r))
            .collect::<Result<_, _>>()?;
        Ok(ExcenterSet {
            excenters,
            exradii,
            excircles,
        })
    }

    pub fn len(&self) -> usize {
        self.excenters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excenters.is_empty()
    }

    /// Largest spread of the distances from `M_i` to `a_{i−1}`, `a_i`,
    /// `a_{i+1}`, with its index, relative to `R_K`.
    pub fn tangency_spread(&self, poly: &BicentricPolygon) -> (usize, f64) {
        let n = poly.n();
        let rk = poly.pair.r_k();
        let mut worst = (0, 0.0);
        for (i, m) in self.excenters.iter().enumerate() {
            let dists =
                [(i + n - 1) % n, i, (i + 1) % n].map(|j| distance_point_line(*m, &poly.sides[j]));
            let hi = dists.iter().copied().fold(f64::MIN, f64::max);
            let lo = dists.iter().copied().fold(f64::MAX, f64::min);
            let spread = (hi - lo) / rk;
            if !(spread <= worst.1) {
                worst = (i, spread);
            }
        }
        worst
    }
}

pub fn excenters(poly: &BicentricPolygon) -> Result<ExcenterSet, TheoremError> {
    let n = poly.n();
    let mc = poly.pair.c.center();
    let bisectors = poly
        .vertices
        .iter()
        .map(|v| external_bisector(*v, mc))
        .collect::<Result<Vec<_>, _>>()?;
    let mut centers = Vec::with_capacity(n);
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let m = intersect_lines(&bisectors[i], &bisectors[(i + 1) % n], EPS_PARALLEL)
            .map_err(|_| TheoremError::ParallelBisectors { index: i })?;
        centers.push(m);
        radii.push(distance_point_line(m, &poly.sides[i]));
    }
    let set = ExcenterSet::from_parts(centers, radii)?;
    let (index, spread) = set.tangency_spread(poly);
    if !(spread <= EXCIRCLE_TOL) {
        return Err(TheoremError::TangencyViolation { index, spread });
    }
    Ok(set)
}

/// Circle through the excircle centers as predicted from the pair alone:
/// center `2 M_K − M_C`, radius `|R_K² − d²| / R_C`.
pub fn predicted_circle_e(pair: &CirclePair) -> Result<Circle, TheoremError> {
    let (rk, d) = (pair.r_k(), pair.d());
    let power = ((rk - d) * (rk + d)).abs();
    if power <= Tolerances::default().degenerate * rk * rk {
        return Err(TheoremError::DegenerateE);
    }
    let center = pair.k.center() * 2.0 - pair.c.center();
    Ok(Circle::new(center, power / pair.r_c())?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainTheoremReport {
    /// Least-squares circle through the excenters; independent of the prediction.
    pub fitted_e: FitResult,
    pub predicted_e: Circle,
    /// `max_i | |M_i − M_E| − R_E | / R_K` against the predicted circle.
    pub concyclicity_residual: f64,
    /// `|M_K − (M_C + M_E)/2| / R_K` with the fitted center.
    pub midpoint_residual: f64,
    /// `|R_E(fit) − |R_K² − d²|/R_C| / R_K`.
    pub radius_residual: f64,
}

pub fn verify_main_theorem(
    poly: &BicentricPolygon,
    exc: &ExcenterSet,
) -> Result<MainTheoremReport, TheoremError> {
    ensure_matching(poly, exc)?;
    let rk = poly.pair.r_k();
    let fitted_e = fit_circle(&exc.excenters)?;
    let predicted_e = predicted_circle_e(&poly.pair)?;
    let concyclicity_residual = exc
        .excenters
        .iter()
        .map(|m| predicted_e.radial_offset(*m).abs() / rk)
        .fold(0.0, f64::max);
    let midpoint = poly.pair.c.center().midpoint(fitted_e.circle.center());
    Ok(MainTheoremReport {
        fitted_e,
        predicted_e,
        concyclicity_residual,
        midpoint_residual: poly.pair.k.center().distance(midpoint) / rk,
        radius_residual: (fitted_e.circle.radius() - predicted_e.radius()).abs() / rk,
    })
}

fn ensure_matching(poly: &BicentricPolygon, exc: &ExcenterSet) -> Result<(), TheoremError> {
    if exc.len() != poly.n() {
        return Err(TheoremError::CountMismatch {
            expected: poly.n(),
            got: exc.len(),
        });
    }
    Ok(())
}

/// Construction behind the circumcenter-locus lemma for one tangent `t` to `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaReport {
    pub tangent: Line,
    pub chord_points: (Point2, Point2),
    /// Center `M_D` of the circle through `M_C`, `P_1`, `P_2`.
    pub circumcenter: Point2,
    pub circumradius: f64,
    /// Intersection `Q` of the line `M_D M_K` with `t`.
    pub foot: Point2,
    /// `| |M_D − M_K| − |R_K² − d²|/(2 R_C) | / R_K`
    pub locus_residual: f64,
    /// `| |R_K² − d²| − 2 |M_D M_K| R_C | / R_K²`
    pub identity_residual: f64,
}

pub fn verify_lemma_locus(
    pair: &CirclePair,
    tangent_angle: f64,
) -> Result<LemmaReport, TheoremError> {
    let (rk, rc, d) = (pair.r_k(), pair.r_c(), pair.d());
    let mc = pair.c.center();
    let mk = pair.k.center();
    let touch = pair.c.point_at(tangent_angle);
    let tangent = Line::with_normal_through(touch - mc, touch)?;
    let chord = line_circle_intersection(&tangent, &pair.k);
    let [p1, p2] = chord[..] else {
        return Err(TheoremError::NoChord);
    };
    let circle_d = circumcircle(mc, p1, p2)?;
    let md = circle_d.center();
    // M_D sits on the perpendicular bisector of the chord; when it coincides
    // with M_K the foot is the chord midpoint.
    let foot = match line_through(md, mk) {
        Ok(axis) => intersect_lines(&axis, &tangent, EPS_PARALLEL)?,
        Err(_) => p1.midpoint(p2),
    };
    let power = ((rk - d) * (rk + d)).abs();
    let dist = md.distance(mk);
    Ok(LemmaReport {
        tangent,
        chord_points: (p1, p2),
        circumcenter: md,
        circumradius: circle_d.radius(),
        foot,
        locus_residual: (dist - power / (2.0 * rc)).abs() / rk,
        identity_residual: (power - 2.0 * dist * rc).abs() / (rk * rk),
    })
}

/// `max_i |(A − M_C)·(A − M_i)| / R_K²` over both endpoints `A` of side `i`:
/// each vertex sees the segment `M_C M_i` at a right angle.
pub fn thales_residual(poly: &BicentricPolygon, exc: &ExcenterSet) -> f64 {
    let n = poly.n();
    let rk = poly.pair.r_k();
    let mc = poly.pair.c.center();
    let mut worst: f64 = 0.0;
    for (i, m) in exc.excenters.iter().enumerate() {
        for a in [poly.vertices[i], poly.vertices[(i + 1) % n]] {
            worst = worst.max((a - mc).dot(a - *m).abs() / (rk * rk));
        }
    }
    worst
}

/// `max_i |(M_E − M_i)·dir(a_i)| / R_K`: the segment from the center of `E`
/// to each excenter is perpendicular to the corresponding side.
pub fn perpendicularity_residual(
    poly: &BicentricPolygon,
    exc: &ExcenterSet,
    center_e: Point2,
) -> f64 {
    let rk = poly.pair.r_k();
    exc.excenters
        .iter()
        .zip(&poly.sides)
        .map(|(m, side)| (center_e - *m).dot(side.direction()).abs() / rk)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrilateralReport {
    /// Distance of `M_C` from the diagonals `M_1M_3` and `M_2M_4`, relative to `R_K`.
    pub diagonal_incidence: f64,
    /// `|cos|` of the angle between the diagonals.
    pub diagonal_perpendicularity: f64,
    /// Fitted `R_E²`.
    pub r_e_squared: f64,
    /// `|R_E² − 2(R_K² + d²)| / R_K²`
    pub radius_identity: f64,
    pub thales: f64,
}

pub fn verify_quadrilateral(
    poly: &BicentricPolygon,
    exc: &ExcenterSet,
) -> Result<QuadrilateralReport, TheoremError> {
    if poly.n() != 4 {
        return Err(TheoremError::WrongArity(poly.n()));
    }
    ensure_matching(poly, exc)?;
    if !poly.is_convex() {
        return Err(TheoremError::NotConvex);
    }
    let (rk, d) = (poly.pair.r_k(), poly.pair.d());
    let mc = poly.pair.c.center();
    let m = &exc.excenters;
    let diag_a = line_through(m[0], m[2])?;
    let diag_b = line_through(m[1], m[3])?;
    let diagonal_incidence =
        distance_point_line(mc, &diag_a).max(distance_point_line(mc, &diag_b)) / rk;
    let diagonal_perpendicularity = diag_a.direction().dot(diag_b.direction()).abs();
    let fit = fit_circle(m)?;
    let r_e_squared = fit.circle.radius() * fit.circle.radius();
    Ok(QuadrilateralReport {
        diagonal_incidence,
        diagonal_perpendicularity,
        r_e_squared,
        radius_identity: (r_e_squared - 2.0 * (rk * rk + d * d)).abs() / (rk * rk),
        thales: thales_residual(poly, exc),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaRatioReport {
    /// `area(A_1…A_n) / area(M_1…M_n)`
    pub ratio: f64,
    /// `R_C / R_E` with the fitted `R_E`.
    pub expected: f64,
    pub residual: f64,
    pub perpendicularity: f64,
}

pub fn verify_area_ratio(
    poly: &BicentricPolygon,
    exc: &ExcenterSet,
) -> Result<AreaRatioReport, TheoremError> {
    ensure_matching(poly, exc)?;
    if !poly.is_convex() {
        return Err(TheoremError::NotConvex);
    }
    let fit = fit_circle(&exc.excenters)?;
    let ratio = shoelace_area(&poly.vertices).abs() / shoelace_area(&exc.excenters).abs();
    let expected = poly.pair.r_c() / fit.circle.radius();
    Ok(AreaRatioReport {
        ratio,
        expected,
        residual: (ratio - expected).abs(),
        perpendicularity: perpendicularity_residual(poly, exc, fit.circle.center()),
    })
}
