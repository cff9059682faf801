//! The excenter circle across configuration classes: solver-produced nested
//! scenes plus hand-closed intersecting and exterior polygons.

use std::f64::consts::{PI, TAU};

use bicentric::poncelet::{solve_closure_rc, trace_polygon};
use bicentric::theorems::{excenters, verify_main_theorem};
use bicentric::{
    generate_scene, scene_from_json, scene_to_json, verify_scene, BicentricPolygon, BicentricScene,
    Circle, CirclePair, Configuration, Orientation, Point2,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Signed angle of `A_{n+1}` relative to `A_1` about `M_K`.
fn gap(pair: &CirclePair, start: f64, n: usize, orientation: Orientation) -> f64 {
    let (poly, _) = trace_polygon(pair, start, n, 1, orientation).unwrap();
    let first = poly.vertices[0] - pair.k.center();
    let last_side = poly.sides[n - 1];
    // A_{n+1} is the second point of the last side on K.
    let a_n = poly.vertices[n - 1];
    let dir = last_side.direction();
    let t = -2.0 * (a_n - pair.k.center()).dot(dir);
    let next = a_n + dir * t - pair.k.center();
    first.cross(next).atan2(first.dot(next))
}

/// Closes an `n`-gon by bisecting the incircle radius of `C` (fixed center)
/// between `lo` and `hi`, where the gap changes sign.
fn close_by_radius(
    mk: Point2,
    mc: Point2,
    n: usize,
    start: f64,
    orientation: Orientation,
    mut lo: f64,
    mut hi: f64,
) -> BicentricPolygon {
    let k = Circle::new(mk, 1.0).unwrap();
    let pair_for = |r: f64| CirclePair::new(k, Circle::new(mc, r).unwrap());
    let f_lo = gap(&pair_for(lo), start, n, orientation);
    assert!(
        f_lo * gap(&pair_for(hi), start, n, orientation) < 0.0,
        "no sign change"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(&pair_for(mid), start, n, orientation).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = if gap(&pair_for(lo), start, n, orientation).abs()
        < gap(&pair_for(hi), start, n, orientation).abs()
    {
        lo
    } else {
        hi
    };
    trace_polygon(&pair_for(r), start, n, 1, orientation)
        .unwrap()
        .0
}

fn assert_main_theorem(poly: &BicentricPolygon, bound: f64) {
    poly.check_invariants().unwrap();
    let exc = excenters(poly).unwrap();
    let report = verify_main_theorem(poly, &exc).unwrap();
    assert!(report.concyclicity_residual <= bound, "{report:?}");
    assert!(report.midpoint_residual <= bound, "{report:?}");
    assert!(report.radius_residual <= bound, "{report:?}");
}

fn exterior_octagon() -> BicentricPolygon {
    close_by_radius(
        Point2::ORIGIN,
        Point2::new(3.0, 0.0),
        8,
        PI,
        Orientation::Ccw,
        1.03,
        1.04,
    )
}

fn intersecting_pentagon(cx: f64, lo: f64, hi: f64) -> BicentricPolygon {
    close_by_radius(
        Point2::ORIGIN,
        Point2::new(cx, 0.0),
        5,
        PI + 0.4,
        Orientation::Ccw,
        lo,
        hi,
    )
}

#[test]
fn exterior_octagon_satisfies_the_theorem() {
    let poly = exterior_octagon();
    assert_eq!(poly.pair.configuration(), Configuration::Exterior);
    assert!((poly.pair.r_c() - 1.0348958535540544).abs() < 1e-9);
    assert_main_theorem(&poly, 1e-8);
}

#[test]
fn intersecting_pentagons_satisfy_the_theorem() {
    for (cx, lo, hi, r) in [
        (0.8, 0.345, 0.36, 0.3515215968607363),
        (2.0, 1.0, 1.02, 1.0097039294538912),
    ] {
        let poly = intersecting_pentagon(cx, lo, hi);
        assert_eq!(poly.pair.configuration(), Configuration::Intersecting);
        assert!((poly.pair.r_c() - r).abs() < 1e-9, "{}", poly.pair.r_c());
        assert_main_theorem(&poly, 1e-8);
    }
}

#[test]
fn triangle_with_an_excircle_as_incircle() {
    // Any triangle and one of its excircles form an intersecting bicentric pair.
    let a = Point2::new(0.0, 0.0);
    let b = Point2::new(4.0, 0.0);
    let c = Point2::new(1.0, 3.0);
    let (la, lb, lc) = (b.distance(c), a.distance(c), a.distance(b));
    let ex = (a * -la + b * lb + c * lc) * (1.0 / (-la + lb + lc));
    let area = 0.5 * (b - a).cross(c - a).abs();
    let r_ex = area / (0.5 * (la + lb + lc) - la);
    let k = bicentric::geometry::circumcircle(a, b, c).unwrap();
    let pair = CirclePair::new(k, Circle::new(ex, r_ex).unwrap());
    assert_eq!(pair.configuration(), Configuration::Intersecting);
    let start = b.angle_about(k.center());
    let (poly, defect) = trace_polygon(&pair, start, 3, 1, Orientation::Ccw).unwrap();
    assert!(defect.positional_defect < 1e-12, "{defect:?}");
    assert_main_theorem(&poly, 1e-10);
}

#[test]
fn external_scenes_verify_through_json() {
    for poly in [exterior_octagon(), intersecting_pentagon(0.8, 0.345, 0.36)] {
        let scene = BicentricScene::from_polygon(poly, 0.0).unwrap();
        let json = scene_to_json(&scene);
        let back = scene_from_json(json.as_bytes()).unwrap();
        let report = verify_scene(&back, 1e-8).unwrap();
        assert!(report.overall_pass, "{report}");
        // Non-convex: no area-ratio or quadrilateral entries.
        assert!(report.entry("area_ratio").is_none());
    }
}

#[test]
fn nested_scenes_across_n_and_winding() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut count = 0;
    for n in 3..=12usize {
        for w in (1..).take_while(|w| 2 * w < n).filter(|w| gcd(n, *w) == 1) {
            for _ in 0..3 {
                let d = rng.gen_range(0.0..0.03);
                let start = rng.gen_range(0.0..TAU);
                let scene = generate_scene(n, w as u32, 1.0, d, start).unwrap();
                assert_main_theorem(&scene.polygon, 1e-8);
                count += 1;
            }
        }
    }
    assert!(count > 50);
}

#[test]
fn scale_and_translation_leave_residuals_small() {
    for (rk, center) in [
        (1e-3, Point2::new(5.0, -2.0)),
        (1e3, Point2::new(-1e3, 7e2)),
    ] {
        let pair = solve_closure_rc(6, 1, rk, 0.2 * rk, center).unwrap();
        let (poly, _) = trace_polygon(&pair, 0.7, 6, 1, Orientation::Ccw).unwrap();
        assert_main_theorem(&poly, 1e-9);
    }
}
