//! Bicentric polygons over a circle pair: Poncelet tangent-chord iteration,
//! a numeric closure solver, excircle centers and residual checks for the
//! identities they satisfy, plus scene serialization and SVG rendering.

// `!(x <= tol)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod geometry;
pub mod poncelet;
pub mod report;
pub mod scene;
pub mod svg;
pub mod sweep;
pub mod theorems;

pub use geometry::{Circle, FitResult, GeometryError, Line, Point2, Tolerances};
pub use poncelet::{
    BicentricPolygon, CirclePair, ClosureDefect, ConditionKind, Configuration, Orientation,
    PonceletError,
};
pub use report::{verify_scene, ReportEntry, VerificationReport};
pub use scene::{generate_scene, scene_from_json, scene_to_json, BicentricScene, SceneError};
pub use svg::{render_svg, SvgOptions};
pub use sweep::{sweep, Sweep, SweepSummary};
pub use theorems::{ExcenterSet, TheoremError};
