//! Scene bundles and their JSON form.
//!
//! The writer is hand-rolled so the byte layout is fixed: two-space indent,
//! keys in schema order, every number printed with 17 significant digits.
//! Parsing goes through `serde_json` and then re-checks every polygon
//! invariant, so externally authored scenes are held to the same rules as
//! solver output.

use std::fmt::Write as _;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::geometry::{Circle, GeometryError, Line, Point2};
use crate::poncelet::{
    solve_closure_rc, trace_polygon, BicentricPolygon, CirclePair, Orientation, PonceletError,
};
use crate::report::{ReportEntry, VerificationReport};
use crate::theorems::{excenters, predicted_circle_e, ExcenterSet, TheoremError};

pub const SCHEMA_VERSION: u64 = 1;

const REQUIRED_KEYS: [&str; 9] = [
    "schema_version",
    "circles",
    "vertices",
    "sides",
    "tangency_points",
    "excenters",
    "exradii",
    "winding",
    "start_angle",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error(transparent)]
    Poncelet(#[from] PonceletError),
    #[error(transparent)]
    Theorem(#[from] TheoremError),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl SceneError {
    fn schema(msg: impl Into<String>) -> Self {
        SceneError::Schema(msg.into())
    }

    fn invariant(name: &str) -> Self {
        SceneError::Invariant(name.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneMetadata {
    pub n: usize,
    pub winding: u32,
    pub start_angle: f64,
    pub generator_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BicentricScene {
    pub pair: CirclePair,
    pub polygon: BicentricPolygon,
    pub excenters: ExcenterSet,
    pub predicted_e: Circle,
    pub reports: Option<VerificationReport>,
    pub metadata: SceneMetadata,
}

impl BicentricScene {
    /// Bundles a polygon with its excenters and predicted circle `E`.
    pub fn from_polygon(polygon: BicentricPolygon, start_angle: f64) -> Result<Self, SceneError> {
        polygon.check_invariants().map_err(SceneError::invariant)?;
        let exc = excenters(&polygon)?;
        let predicted_e = predicted_circle_e(&polygon.pair)?;
        Ok(BicentricScene {
            pair: polygon.pair,
            metadata: SceneMetadata {
                n: polygon.n(),
                winding: polygon.winding,
                start_angle,
                generator_version: env!("CARGO_PKG_VERSION").to_string(),
            },
            polygon,
            excenters: exc,
            predicted_e,
            reports: None,
        })
    }

    pub fn n(&self) -> usize {
        self.polygon.n()
    }
}

/// Solves for the closing incircle (centered at the origin, `K` at `(d, 0)`)
/// and traces the polygon from `start_angle` on `K`.
pub fn generate_scene(
    n: usize,
    winding: u32,
    r_k: f64,
    d: f64,
    start_angle: f64,
) -> Result<BicentricScene, SceneError> {
    let pair = solve_closure_rc(n, winding, r_k, d, Point2::ORIGIN)?;
    let (polygon, _) = trace_polygon(&pair, start_angle, n, winding, Orientation::Ccw)?;
    BicentricScene::from_polygon(polygon, start_angle)
}

/// `%.17g`: 17 significant digits, shortest of fixed/exponent notation,
/// trailing zeros dropped. Negative zero is printed as `0`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        // Not representable in JSON; callers never store such values.
        return "null".to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        return format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        );
    }
    let decimals = (16 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn json_string(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn circle_json(c: &Circle) -> String {
    format!(
        "{{\"cx\": {}, \"cy\": {}, \"r\": {}}}",
        format_number(c.center().x),
        format_number(c.center().y),
        format_number(c.radius())
    )
}

fn rows(out: &mut String, key: &str, rows: impl Iterator<Item = Vec<f64>>, last: bool) {
    let _ = write!(out, "  \"{key}\": [");
    let mut first = true;
    for row in rows {
        out.push_str(if first { "\n    [" } else { ",\n    [" });
        first = false;
        let cells: Vec<String> = row.into_iter().map(format_number).collect();
        out.push_str(&cells.join(", "));
        out.push(']');
    }
    out.push_str(if first { "]" } else { "\n  ]" });
    out.push_str(if last { "\n" } else { ",\n" });
}

/// Serializes a scene. Equal scenes give byte-identical output.
pub fn scene_to_json(scene: &BicentricScene) -> String {
    let poly = &scene.polygon;
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"schema_version\": {SCHEMA_VERSION},");
    out.push_str("  \"circles\": {\n");
    let _ = writeln!(out, "    \"k\": {},", circle_json(&scene.pair.k));
    let _ = writeln!(out, "    \"c\": {},", circle_json(&scene.pair.c));
    let _ = writeln!(out, "    \"e\": {}", circle_json(&scene.predicted_e));
    out.push_str("  },\n");
    rows(
        &mut out,
        "vertices",
        poly.vertices.iter().map(|p| vec![p.x, p.y]),
        false,
    );
    rows(
        &mut out,
        "sides",
        poly.sides
            .iter()
            .map(|l| vec![l.normal().x, l.normal().y, l.offset()]),
        false,
    );
    rows(
        &mut out,
        "tangency_points",
        poly.tangency_points.iter().map(|p| vec![p.x, p.y]),
        false,
    );
    rows(
        &mut out,
        "excenters",
        scene.excenters.excenters.iter().map(|p| vec![p.x, p.y]),
        false,
    );
    let radii: Vec<String> = scene
        .excenters
        .exradii
        .iter()
        .map(|r| format_number(*r))
        .collect();
    let _ = writeln!(out, "  \"exradii\": [{}],", radii.join(", "));
    let _ = writeln!(out, "  \"winding\": {},", poly.winding);
    let _ = write!(
        out,
        "  \"start_angle\": {}",
        format_number(scene.metadata.start_angle)
    );
    if let Some(report) = &scene.reports {
        out.push_str(",\n  \"reports\": {\n");
        let _ = writeln!(out, "    \"overall_pass\": {},", report.overall_pass);
        out.push_str("    \"entries\": [");
        for (i, e) in report.entries.iter().enumerate() {
            out.push_str(if i == 0 {
                "\n      {\"name\": "
            } else {
                ",\n      {\"name\": "
            });
            json_string(&mut out, &e.name);
            let _ = write!(
                out,
                ", \"value\": {}, \"tolerance\": {}, \"pass\": {}}}",
                format_number(e.value),
                format_number(e.tolerance),
                e.pass
            );
        }
        out.push_str(if report.entries.is_empty() {
            "]\n  }"
        } else {
            "\n    ]\n  }"
        });
    }
    out.push_str("\n}\n");
    out
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value, SceneError> {
    obj.get(key)
        .ok_or_else(|| SceneError::schema(format!("missing key \"{key}\" in {ctx}")))
}

fn object<'a>(v: &'a Value, ctx: &str) -> Result<&'a Map<String, Value>, SceneError> {
    v.as_object()
        .ok_or_else(|| SceneError::schema(format!("{ctx} must be an object")))
}

fn exact_keys(
    obj: &Map<String, Value>,
    required: &[&str],
    optional: &[&str],
    ctx: &str,
) -> Result<(), SceneError> {
    for key in required {
        get(obj, key, ctx)?;
    }
    if let Some(extra) = obj
        .keys()
        .find(|k| !required.contains(&k.as_str()) && !optional.contains(&k.as_str()))
    {
        return Err(SceneError::schema(format!(
            "unknown key \"{extra}\" in {ctx}"
        )));
    }
    Ok(())
}

fn number(v: &Value, ctx: &str) -> Result<f64, SceneError> {
    v.as_f64()
        .ok_or_else(|| SceneError::schema(format!("{ctx} must be a number")))
}

fn array<'a>(v: &'a Value, ctx: &str) -> Result<&'a Vec<Value>, SceneError> {
    v.as_array()
        .ok_or_else(|| SceneError::schema(format!("{ctx} must be an array")))
}

fn tuples<const N: usize>(v: &Value, ctx: &str) -> Result<Vec<[f64; N]>, SceneError> {
    array(v, ctx)?
        .iter()
        .map(|row| {
            let cells = array(row, ctx)?;
            if cells.len() != N {
                return Err(SceneError::schema(format!(
                    "{ctx} rows must have {N} numbers"
                )));
            }
            let mut out = [0.0; N];
            for (slot, cell) in out.iter_mut().zip(cells) {
                *slot = number(cell, ctx)?;
            }
            Ok(out)
        })
        .collect()
}

fn parse_circle(v: &Value, name: &str) -> Result<Circle, SceneError> {
    let ctx = format!("circles.{name}");
    let obj = object(v, &ctx)?;
    exact_keys(obj, &["cx", "cy", "r"], &[], &ctx)?;
    let cx = number(&obj["cx"], &ctx)?;
    let cy = number(&obj["cy"], &ctx)?;
    let r = number(&obj["r"], &ctx)?;
    Circle::new(Point2::new(cx, cy), r).map_err(|_| SceneError::invariant("radius"))
}

fn parse_reports(v: &Value) -> Result<VerificationReport, SceneError> {
    let obj = object(v, "reports")?;
    exact_keys(obj, &["overall_pass", "entries"], &[], "reports")?;
    let overall_pass = obj["overall_pass"]
        .as_bool()
        .ok_or_else(|| SceneError::schema("reports.overall_pass must be a boolean"))?;
    let mut entries = Vec::new();
    for item in array(&obj["entries"], "reports.entries")? {
        let e = object(item, "report entry")?;
        exact_keys(
            e,
            &["name", "value", "tolerance", "pass"],
            &[],
            "report entry",
        )?;
        let name = e["name"]
            .as_str()
            .ok_or_else(|| SceneError::schema("report entry name must be a string"))?;
        let pass = e["pass"]
            .as_bool()
            .ok_or_else(|| SceneError::schema("report entry pass must be a boolean"))?;
        let value = number(&e["value"], "report entry value")?;
        let tolerance = number(&e["tolerance"], "report entry tolerance")?;
        if !(value >= 0.0) {
            return Err(SceneError::invariant("reports"));
        }
        entries.push(ReportEntry {
            name: name.to_string(),
            value,
            tolerance,
            pass,
        });
    }
    if overall_pass != entries.iter().all(|e| e.pass) {
        return Err(SceneError::invariant("reports"));
    }
    Ok(VerificationReport {
        entries,
        overall_pass,
    })
}

fn points(rows: Vec<[f64; 2]>) -> Vec<Point2> {
    rows.into_iter().map(|[x, y]| Point2::new(x, y)).collect()
}

/// Parses and validates a scene.
///
/// Key and type problems are [`SceneError::Schema`]; a scene that parses but
/// breaks a geometric rule is [`SceneError::Invariant`] naming the first
/// broken rule. Stored excenters are *not* checked against the polygon here;
/// that is what verification is for.
pub fn scene_from_json(bytes: &[u8]) -> Result<BicentricScene, SceneError> {
    let root: Value = serde_json::from_slice(bytes)
        .map_err(|e| SceneError::schema(format!("malformed JSON: {e}")))?;
    let top = object(&root, "scene")?;
    exact_keys(top, &REQUIRED_KEYS, &["reports"], "scene")?;
    match top["schema_version"].as_u64() {
        Some(SCHEMA_VERSION) => {}
        _ => {
            return Err(SceneError::schema(format!(
                "unsupported schema_version {}",
                top["schema_version"]
            )))
        }
    }

    let circles = object(&top["circles"], "circles")?;
    exact_keys(circles, &["k", "c", "e"], &[], "circles")?;
    let vertices = points(tuples::<2>(&top["vertices"], "vertices")?);
    let sides = tuples::<3>(&top["sides"], "sides")?;
    let tangency_points = points(tuples::<2>(&top["tangency_points"], "tangency_points")?);
    let centers = points(tuples::<2>(&top["excenters"], "excenters")?);
    let exradii = array(&top["exradii"], "exradii")?
        .iter()
        .map(|v| number(v, "exradii"))
        .collect::<Result<Vec<_>, _>>()?;
    let winding = top["winding"]
        .as_u64()
        .ok_or_else(|| SceneError::schema("winding must be a non-negative integer"))?;
    let start_angle = number(&top["start_angle"], "start_angle")?;
    let reports = top.get("reports").map(parse_reports).transpose()?;

    let k = parse_circle(&circles["k"], "k")?;
    let c = parse_circle(&circles["c"], "c")?;
    let e = parse_circle(&circles["e"], "e")?;
    if exradii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(SceneError::invariant("radius"));
    }

    let n = vertices.len();
    if n < 3
        || sides.len() != n
        || tangency_points.len() != n
        || centers.len() != n
        || exradii.len() != n
    {
        return Err(SceneError::invariant("arity"));
    }
    let winding = u32::try_from(winding)
        .ok()
        .filter(|w| *w >= 1 && 2 * (*w as usize) < n)
        .ok_or_else(|| SceneError::invariant("winding"))?;

    let sides = sides
        .into_iter()
        .map(|[nx, ny, off]| Line::from_stored(nx, ny, off))
        .collect::<Result<Vec<_>, GeometryError>>()
        .map_err(|_| SceneError::invariant("side_normal"))?;
    let pair = CirclePair::new(k, c);
    let polygon = BicentricPolygon {
        pair,
        vertices,
        sides,
        tangency_points,
        winding,
    };
    polygon.check_invariants().map_err(SceneError::invariant)?;
    let excenters =
        ExcenterSet::from_parts(centers, exradii).map_err(|_| SceneError::invariant("radius"))?;

    Ok(BicentricScene {
        pair,
        metadata: SceneMetadata {
            n,
            winding,
            start_angle,
            generator_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        polygon,
        excenters,
        predicted_e: e,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn equilateral() -> BicentricScene {
        generate_scene(3, 1, 1.0, 0.0, FRAC_PI_2).unwrap()
    }

    #[test]
    fn number_format_matches_printf_g17() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(2.0), "2");
        assert_eq!(format_number(-1.5), "-1.5");
        assert_eq!(format_number(0.1), "0.10000000000000001");
        assert_eq!(format_number(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_number(1e20), "1e+20");
        assert_eq!(format_number(123456.0), "123456");
        assert_eq!(format_number(0.00012), "0.00012");
    }

    #[test]
    fn formatted_numbers_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MAX,
            f64::MIN_POSITIVE,
            0.48,
        ] {
            let s = format_number(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
            let v: Value = serde_json::from_str(&s).unwrap();
            assert_eq!(v.as_f64().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn equilateral_scene_has_e_radius_two() {
        let json = scene_to_json(&equilateral());
        let v: Value = serde_json::from_str(&json).unwrap();
        let e = &v["circles"]["e"];
        assert!(e["cx"].as_f64().unwrap().abs() < 1e-15);
        assert!(e["cy"].as_f64().unwrap().abs() < 1e-15);
        assert!((e["r"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn missing_reports_key_is_absent() {
        let json = scene_to_json(&equilateral());
        assert!(!json.contains("reports"));
        assert!(!json.contains("null"));
    }

    #[test]
    fn keys_in_schema_order() {
        let json = scene_to_json(&equilateral());
        let positions: Vec<usize> = REQUIRED_KEYS
            .iter()
            .map(|k| json.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn round_trip_equal_and_byte_identical() {
        let scene = equilateral();
        let json = scene_to_json(&scene);
        let back = scene_from_json(json.as_bytes()).unwrap();
        assert_eq!(back, scene);
        assert_eq!(scene_to_json(&back), json);
    }

    #[test]
    fn arity_mismatch_is_named() {
        let scene = generate_scene(5, 1, 1.0, 0.1, 0.3).unwrap();
        let mut v: Value = serde_json::from_str(&scene_to_json(&scene)).unwrap();
        v["sides"].as_array_mut().unwrap().pop();
        let err = scene_from_json(v.to_string().as_bytes()).unwrap_err();
        assert_eq!(err, SceneError::Invariant("arity".into()));
    }

    #[test]
    fn nonpositive_radius_is_named() {
        let mut v: Value = serde_json::from_str(&scene_to_json(&equilateral())).unwrap();
        v["circles"]["c"]["r"] = Value::from(0.0);
        let err = scene_from_json(v.to_string().as_bytes()).unwrap_err();
        assert_eq!(err, SceneError::Invariant("radius".into()));
    }

    #[test]
    fn schema_problems() {
        let base: Value = serde_json::from_str(&scene_to_json(&equilateral())).unwrap();
        let mut wrong_version = base.clone();
        wrong_version["schema_version"] = Value::from(2);
        let mut unknown = base.clone();
        unknown["extra"] = Value::from(1);
        let mut missing = base.clone();
        missing.as_object_mut().unwrap().remove("winding");
        for v in [wrong_version, unknown, missing] {
            assert!(matches!(
                scene_from_json(v.to_string().as_bytes()),
                Err(SceneError::Schema(_))
            ));
        }
        assert!(matches!(scene_from_json(b"{"), Err(SceneError::Schema(_))));
    }
}
