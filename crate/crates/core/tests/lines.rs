use bilip_core::geom::{LatticeMap, Point};
use bilip_core::shore::*;
use bilip_core::strip_ext::CoonsOracle;

fn lattice(f: impl Fn(f64, f64) -> Point) -> LatticeMap {
    LatticeMap::from_fn((-8, 8), (-4, 4), |i, j| f(i as f64, j as f64))
}

fn measured_l(f: &LatticeMap) -> f64 {
    f.bilip().unwrap().bilip().max(1.0) * (1.0 + 1e-9)
}

fn build(f: &LatticeMap, k: i64) -> HorizontalLine {
    let params = LineParams::desk(measured_l(f));
    horizontal_line_extension(f, k, &params, &ShearOracle::default(), &CoonsOracle::default()).unwrap()
}

#[test]
fn identity_line_stays_near_the_half_integer_line() {
    let f = lattice(Point::new);
    let h = build(&f, 0);
    assert!(h.report.components_ok, "{:?}", h.report.witness);
    assert!(h.report.pass(&h.constants), "{:?}", h.report);
    for v in h.line.vertices.iter().filter(|v| v.x.abs() <= 8.0) {
        assert!(v.y > 0.0 && v.y < 1.0, "{v:?}");
    }
}

#[test]
fn quarter_turn_preserves_components() {
    let f = lattice(|x, y| Point::new(-y, x));
    let h = build(&f, 1);
    assert!(h.report.components_ok, "{:?}", h.report.witness);
    assert!(h.report.clearance > 0.0);
}

#[test]
fn images_keep_away_from_the_normalised_boundary() {
    let f = lattice(|x, y| Point::new(x + 0.3 * y, y));
    let h = build(&f, 0);
    assert!(h.report.boundary_gap >= h.constants.log2_s.exp2());
    assert!(h.report.boundary_gap > 0.0);
}

#[test]
fn desk_constants_follow_their_formulas() {
    let c = LineConstants::new(1.0, 1, 1.0);
    assert_eq!(c.beta.log2, 23.0);
    assert_eq!(c.alpha.log2, 39.0 + 69.0);
    assert_eq!(c.m.log2, 14.0 * 108.0 + 2.0);
    assert_eq!(c.log2_s, -(24.0 + c.m.log2));
    assert_eq!(c.w, 2.0);
}

#[test]
fn shear_lines_are_well_separating() {
    let f = lattice(|x, y| Point::new(x + y, y));
    let params = LineParams::desk(measured_l(&f));
    let s = strips_extension(&f, &params, 3, -3, 3, &ShearOracle::default(), &CoonsOracle::default())
        .unwrap();
    assert!(s.well_separating.pass(), "{:?}", s.well_separating);
    for h in &s.lines {
        assert!(h.report.components_ok, "{:?}", h.report.witness);
    }
}

#[test]
fn one_line_is_not_a_family() {
    let f = lattice(Point::new);
    let params = LineParams::desk(measured_l(&f));
    let r = strips_extension(&f, &params, 3, 0, 1, &ShearOracle::default(), &CoonsOracle::default());
    assert!(matches!(r, Err(bilip_core::Error::WindowTooSmall(_))));
}

#[test]
fn paper_profile_reports_the_budget() {
    let f = lattice(Point::new);
    let mut params = LineParams::paper(measured_l(&f));
    params.g = 1;
    let r = horizontal_line_extension(&f, 0, &params, &ShearOracle::default(), &CoonsOracle::default());
    assert!(matches!(r, Err(bilip_core::Error::BudgetExceeded(_))), "{r:?}");
}

#[test]
fn crossing_lines_are_caught() {
    let f = lattice(Point::new);
    let a = bilip_core::geom::Polyline::with_extended_tails(
        vec![-10.0, 10.0],
        vec![Point::new(-10.0, 0.4), Point::new(10.0, 0.6)],
    )
    .unwrap();
    let b = bilip_core::geom::Polyline::with_extended_tails(
        vec![-10.0, 10.0],
        vec![Point::new(-10.0, 1.6), Point::new(10.0, 0.4)],
    )
    .unwrap();
    let r = check_well_separating(&f, &[(0.5, &a), (1.5, &b)]).unwrap();
    assert!(!r.disjoint);
    assert!(!r.pass());
}

