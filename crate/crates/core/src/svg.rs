//! Deterministic SVG figures of a scene.

use std::fmt::Write as _;

use crate::geometry::{Circle, Point2};
use crate::scene::BicentricScene;

pub const COLOR_K: &str = "#006400";
pub const COLOR_C: &str = "#0000ff";
pub const COLOR_E: &str = "#ff0000";
pub const COLOR_POLYGON: &str = "#993300";
pub const COLOR_EXCIRCLE: &str = "#ff8c00";
pub const COLOR_BISECTOR: &str = "#000000";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvgOptions {
    pub width_px: u32,
    pub show_excircles: bool,
    pub show_bisectors: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width_px: 800,
            show_excircles: false,
            show_bisectors: false,
        }
    }
}

const MARGIN: f64 = 0.05;
const CIRCLE_STROKE_PX: f64 = 1.5;
const SIDE_STROKE_PX: f64 = 1.0;
const BISECTOR_STROKE_PX: f64 = 0.5;
const POINT_RADIUS_PX: f64 = 2.5;

fn num(x: f64) -> String {
    let s = format!("{:.6}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

struct Canvas {
    out: String,
    /// User units per pixel.
    unit: f64,
}

impl Canvas {
    fn circle(&mut self, c: &Circle, color: &str, stroke_px: f64) {
        let p = c.center();
        let _ = writeln!(
            self.out,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\"/>",
            num(p.x),
            num(-p.y),
            num(c.radius()),
            num(stroke_px * self.unit)
        );
    }

    fn segment(&mut self, a: Point2, b: Point2, color: &str, stroke_px: f64) {
        let _ = writeln!(
            self.out,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"{}\"/>",
            num(a.x),
            num(-a.y),
            num(b.x),
            num(-b.y),
            num(stroke_px * self.unit)
        );
    }

    fn point(&mut self, p: Point2, color: &str) {
        let _ = writeln!(
            self.out,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\" stroke=\"none\"/>",
            num(p.x),
            num(-p.y),
            num(POINT_RADIUS_PX * self.unit)
        );
    }
}

/// Renders `K`, `C`, `E`, the polygon and its points; excircles and external
/// bisectors on request. The view box is fitted to every drawn circle with a
/// 5% margin and the y axis points up.
pub fn render_svg(scene: &BicentricScene, options: &SvgOptions) -> String {
    let mut circles = vec![scene.pair.k, scene.pair.c, scene.predicted_e];
    if options.show_excircles {
        circles.extend(scene.excenters.excircles.iter().copied());
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for c in &circles {
        let (p, r) = (c.center(), c.radius());
        x0 = x0.min(p.x - r);
        x1 = x1.max(p.x + r);
        y0 = y0.min(p.y - r);
        y1 = y1.max(p.y + r);
    }
    let pad = MARGIN * (x1 - x0).max(y1 - y0);
    let (x0, x1, y0, y1) = (x0 - pad, x1 + pad, y0 - pad, y1 + pad);
    let width_px = options.width_px.max(1);
    let unit = (x1 - x0) / f64::from(width_px);
    let height_px = ((y1 - y0) / unit).round().max(1.0) as u32;

    let mut canvas = Canvas {
        out: String::new(),
        unit,
    };
    let out = &mut canvas.out;
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width_px}\" height=\"{height_px}\" viewBox=\"{} {} {} {}\">",
        num(x0),
        num(-y1),
        num(x1 - x0),
        num(y1 - y0)
    );

    canvas.circle(&scene.pair.k, COLOR_K, CIRCLE_STROKE_PX);
    canvas.circle(&scene.pair.c, COLOR_C, CIRCLE_STROKE_PX);
    canvas.circle(&scene.predicted_e, COLOR_E, CIRCLE_STROKE_PX);
    if options.show_excircles {
        for c in &scene.excenters.excircles {
            canvas.circle(c, COLOR_EXCIRCLE, CIRCLE_STROKE_PX);
        }
    }

    let poly = &scene.polygon;
    let n = poly.n();
    for i in 0..n {
        canvas.segment(
            poly.vertices[i],
            poly.vertices[(i + 1) % n],
            COLOR_POLYGON,
            SIDE_STROKE_PX,
        );
    }
    if options.show_bisectors {
        // The external bisector at A_i carries M_{i-1} and M_i.
        let m = &scene.excenters.excenters;
        for i in 0..m.len() {
            canvas.segment(
                m[(i + m.len() - 1) % m.len()],
                m[i],
                COLOR_BISECTOR,
                BISECTOR_STROKE_PX,
            );
        }
    }

    for v in &poly.vertices {
        canvas.point(*v, COLOR_POLYGON);
    }
    for t in &poly.tangency_points {
        canvas.point(*t, COLOR_C);
    }
    for m in &scene.excenters.excenters {
        canvas.point(*m, COLOR_BISECTOR);
    }
    canvas.point(scene.pair.k.center(), COLOR_K);
    canvas.point(scene.pair.c.center(), COLOR_C);
    canvas.point(scene.predicted_e.center(), COLOR_E);
    canvas.out.push_str("</svg>\n");
    canvas.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::generate_scene;

    fn stroked_circles(svg: &str) -> usize {
        svg.lines()
            .filter(|l| l.contains("<circle") && !l.contains("stroke=\"none\""))
            .count()
    }

    #[test]
    fn equilateral_excircles_are_orange() {
        let scene = generate_scene(3, 1, 1.0, 0.0, 0.5).unwrap();
        let opts = SvgOptions {
            show_excircles: true,
            ..SvgOptions::default()
        };
        let svg = render_svg(&scene, &opts);
        let orange = svg
            .lines()
            .filter(|l| l.contains("<circle") && l.contains(COLOR_EXCIRCLE))
            .count();
        assert_eq!(orange, 3);
        assert!(svg.contains("width=\"800\""));
    }

    #[test]
    fn pentagon_without_excircles_strokes_three_circles() {
        let scene = generate_scene(5, 1, 1.0, 0.2, 0.0).unwrap();
        let svg = render_svg(&scene, &SvgOptions::default());
        assert_eq!(stroked_circles(&svg), 3);
        assert_eq!(svg.matches("<line").count(), 5);
    }

    #[test]
    fn bisectors_are_thin_black_segments() {
        let scene = generate_scene(4, 1, 1.0, 0.1, 0.0).unwrap();
        let opts = SvgOptions {
            show_bisectors: true,
            ..SvgOptions::default()
        };
        let svg = render_svg(&scene, &opts);
        assert_eq!(svg.matches("<line").count(), 8);
        assert_eq!(
            svg.lines()
                .filter(|l| l.contains("<line") && l.contains(COLOR_BISECTOR))
                .count(),
            4
        );
    }

    #[test]
    fn rendering_is_deterministic() {
        let scene = generate_scene(7, 2, 2.0, 0.3, 1.0).unwrap();
        let opts = SvgOptions {
            width_px: 640,
            show_excircles: true,
            show_bisectors: true,
        };
        assert_eq!(render_svg(&scene, &opts), render_svg(&scene, &opts));
    }

    #[test]
    fn elements_are_ordered_circles_sides_points() {
        let scene = generate_scene(3, 1, 1.0, 0.2, 0.0).unwrap();
        let svg = render_svg(&scene, &SvgOptions::default());
        let last_stroked = svg.rfind("fill=\"none\"").unwrap();
        let first_line = svg.find("<line").unwrap();
        let first_point = svg.find("stroke=\"none\"").unwrap();
        assert!(last_stroked < first_line && first_line < first_point);
    }
}
