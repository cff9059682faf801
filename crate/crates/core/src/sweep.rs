//! Start-angle sweeps over a closing pair: the polygon moves, the closure
//! and the circle `E` through the excenters do not.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::geometry::Point2;
use crate::poncelet::{solve_closure_rc, trace_polygon, CirclePair, Orientation};
use crate::report::verify_scene;
use crate::scene::{format_number, BicentricScene, SceneError};

/// Threshold for both sweep invariants, relative to `R_K` (or radians).
pub const SWEEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFrame {
    pub scene: BicentricScene,
    /// Folded angular closure defect of this frame's orbit.
    pub angular_defect: f64,
    pub positional_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub n: usize,
    pub winding: u32,
    pub r_k: f64,
    pub d: f64,
    pub r_c: f64,
    pub frames: usize,
    pub max_positional_defect: f64,
    /// `max − min` of the folded angular defect over the frames.
    pub angular_defect_spread: f64,
    /// Largest `| |M_i − M_E| − R_E | / R_K` over all frames, against the
    /// predicted `E` of frame 0.
    pub max_excenter_deviation: f64,
    pub tolerance: f64,
    pub porism_ok: bool,
    pub rolling_ok: bool,
}

impl SweepSummary {
    pub fn ok(&self) -> bool {
        self.porism_ok && self.rolling_ok
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        let fields: [(&str, String); 12] = [
            ("n", self.n.to_string()),
            ("winding", self.winding.to_string()),
            ("r_k", format_number(self.r_k)),
            ("d", format_number(self.d)),
            ("r_c", format_number(self.r_c)),
            ("frames", self.frames.to_string()),
            (
                "max_positional_defect",
                format_number(self.max_positional_defect),
            ),
            (
                "angular_defect_spread",
                format_number(self.angular_defect_spread),
            ),
            (
                "max_excenter_deviation",
                format_number(self.max_excenter_deviation),
            ),
            ("tolerance", format_number(self.tolerance)),
            ("porism_ok", self.porism_ok.to_string()),
            ("rolling_ok", self.rolling_ok.to_string()),
        ];
        for (i, (key, value)) in fields.iter().enumerate() {
            let sep = if i + 1 == fields.len() { "" } else { "," };
            let _ = writeln!(out, "  \"{key}\": {value}{sep}");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub pair: CirclePair,
    pub frames: Vec<SweepFrame>,
    pub summary: SweepSummary,
}

/// Traces `pair` from `frames` equally spaced start angles in parallel.
/// Every frame carries its own verification report.
pub fn sweep_pair(
    pair: &CirclePair,
    n: usize,
    winding: u32,
    frames: usize,
) -> Result<Sweep, SceneError> {
    if frames == 0 {
        return Err(SceneError::Schema("frame count must be >= 1".into()));
    }
    let computed: Vec<SweepFrame> = (0..frames)
        .into_par_iter()
        .map(|k| {
            let angle = TAU * k as f64 / frames as f64;
            let (polygon, defect) = trace_polygon(pair, angle, n, winding, Orientation::Ccw)?;
            let mut scene = BicentricScene::from_polygon(polygon, angle)?;
            scene.reports = Some(verify_scene(&scene, SWEEP_TOL)?);
            Ok(SweepFrame {
                scene,
                angular_defect: defect.folded(),
                positional_defect: defect.positional_defect,
            })
        })
        .collect::<Result<_, SceneError>>()?;

    let rk = pair.r_k();
    let e = computed[0].scene.predicted_e;
    let mut max_positional: f64 = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut deviation: f64 = 0.0;
    for frame in &computed {
        max_positional = max_positional.max(frame.positional_defect);
        lo = lo.min(frame.angular_defect);
        hi = hi.max(frame.angular_defect);
        for m in &frame.scene.excenters.excenters {
            deviation = deviation.max(e.radial_offset(*m).abs() / rk);
        }
    }
    let spread = hi - lo;
    let summary = SweepSummary {
        n,
        winding,
        r_k: rk,
        d: pair.d(),
        r_c: pair.r_c(),
        frames,
        max_positional_defect: max_positional,
        angular_defect_spread: spread,
        max_excenter_deviation: deviation,
        tolerance: SWEEP_TOL,
        porism_ok: max_positional <= SWEEP_TOL && spread <= SWEEP_TOL,
        rolling_ok: deviation <= SWEEP_TOL,
    };
    Ok(Sweep {
        pair: *pair,
        frames: computed,
        summary,
    })
}

/// Solves for the closing incircle, then sweeps it.
pub fn sweep(n: usize, winding: u32, r_k: f64, d: f64, frames: usize) -> Result<Sweep, SceneError> {
    let pair = solve_closure_rc(n, winding, r_k, d, Point2::ORIGIN)?;
    sweep_pair(&pair, n, winding, frames)
}
