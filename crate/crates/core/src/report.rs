//! Named residual tables.

use std::fmt;

use crate::scene::BicentricScene;
use crate::theorems::{
    perpendicularity_residual, predicted_circle_e, thales_residual, verify_area_ratio,
    verify_main_theorem, verify_quadrilateral, TheoremError,
};

/// Default pass threshold for every residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub entries: Vec<ReportEntry>,
    pub overall_pass: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport {
            entries: Vec::new(),
            overall_pass: true,
        }
    }

    /// Appends a residual. Non-finite values are stored as `f64::MAX` and fail.
    pub fn push(&mut self, name: &str, value: f64, tolerance: f64) {
        let (value, pass) = if value.is_finite() && value >= 0.0 {
            (value, value <= tolerance)
        } else {
            (f64::MAX, false)
        };
        self.overall_pass &= pass;
        self.entries.push(ReportEntry {
            name: name.to_string(),
            value,
            tolerance,
            pass,
        });
    }

    pub fn entry(&self, name: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn failing(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .entries
            .iter()
            .map(|e| e.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        writeln!(
            f,
            "{:<width$}  {:>12}  {:>9}  status",
            "name", "residual", "tol"
        )?;
        for e in &self.entries {
            let status = if e.pass { "ok" } else { "FAIL" };
            writeln!(
                f,
                "{:<width$}  {:>12.3e}  {:>9.1e}  {status}",
                e.name, e.value, e.tolerance
            )?;
        }
        write!(
            f,
            "overall: {}",
            if self.overall_pass { "pass" } else { "FAIL" }
        )
    }
}

/// Recomputes every applicable residual from the scene's stored data.
///
/// Stored excenters are used as given, so tampered files show up as large
/// residuals rather than being silently recomputed.
pub fn verify_scene(scene: &BicentricScene, tol: f64) -> Result<VerificationReport, TheoremError> {
    let poly = &scene.polygon;
    let exc = &scene.excenters;
    let mut report = VerificationReport::new();

    let residuals = poly.residuals();
    report.push("vertex_on_k", residuals.vertex_on_k, tol);
    report.push("side_tangency", residuals.side_tangency, tol);
    report.push("side_incidence", residuals.side_incidence, tol);
    report.push("excircle_tangency", exc.tangency_spread(poly).1, tol);

    // The stored circle E must agree with the one the pair predicts.
    let rk = poly.pair.r_k();
    let expected_e = predicted_circle_e(&poly.pair)?;
    let stored_e = scene.predicted_e;
    report.push(
        "stored_e",
        stored_e
            .center()
            .distance(expected_e.center())
            .max((stored_e.radius() - expected_e.radius()).abs())
            / rk,
        tol,
    );

    let main = verify_main_theorem(poly, exc)?;
    report.push("concyclicity", main.concyclicity_residual, tol);
    report.push("midpoint", main.midpoint_residual, tol);
    report.push("radius", main.radius_residual, tol);
    report.push("thales", thales_residual(poly, exc), tol);
    report.push(
        "perpendicularity",
        perpendicularity_residual(poly, exc, main.fitted_e.circle.center()),
        tol,
    );

    if poly.n() == 3 {
        report.push(
            "triangle_radius",
            (main.fitted_e.circle.radius() - 2.0 * rk).abs() / rk,
            tol,
        );
    }
    if poly.is_convex() {
        if poly.n() == 4 {
            let quad = verify_quadrilateral(poly, exc)?;
            report.push("diagonal_incidence", quad.diagonal_incidence, tol);
            report.push(
                "diagonal_perpendicularity",
                quad.diagonal_perpendicularity,
                tol,
            );
            report.push("quadrilateral_radius", quad.radius_identity, tol);
        }
        let area = verify_area_ratio(poly, exc)?;
        report.push("area_ratio", area.residual, tol);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_is_conjunction() {
        let mut r = VerificationReport::new();
        r.push("a", 1e-12, 1e-9);
        assert!(r.overall_pass);
        r.push("b", 1e-3, 1e-9);
        assert!(!r.overall_pass);
        r.push("c", 0.0, 1e-9);
        assert!(!r.overall_pass);
        assert_eq!(
            r.failing().map(|e| e.name.as_str()).collect::<Vec<_>>(),
            ["b"]
        );
    }

    #[test]
    fn non_finite_values_fail() {
        let mut r = VerificationReport::new();
        r.push("nan", f64::NAN, 1.0);
        assert!(!r.overall_pass);
        assert_eq!(r.entry("nan").unwrap().value, f64::MAX);
    }

    #[test]
    fn table_lists_every_entry() {
        let mut r = VerificationReport::new();
        r.push("concyclicity", 2e-15, 1e-9);
        r.push("midpoint", 3e-3, 1e-9);
        let text = r.to_string();
        assert!(text.contains("concyclicity"));
        assert!(text.contains("FAIL"));
        assert!(text.ends_with("overall: FAIL"));
    }
}
