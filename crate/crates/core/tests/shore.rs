use bilip_core::geom::{empirical_bilip, BoxSampler, Point, PointD, Polyline};
use bilip_core::planemap::{ColumnShear, PlaneMap};
use bilip_core::shore::*;
use bilip_core::Error;
use proptest::prelude::*;

fn line(half: i64) -> Polyline {
    let bps: Vec<f64> = (-half..=half).map(|t| t as f64).collect();
    let verts: Vec<Point> = bps.iter().map(|t| Point::new(*t, 0.0)).collect();
    Polyline::with_extended_tails(bps, verts).unwrap()
}

#[test]
fn straight_line_gives_chords_of_length_eight() {
    let input = ShoreInput::new(line(60), 1.0).unwrap();
    let shore = initial_shore(&input).unwrap();
    assert_eq!(shore.pl, 8.0);
    for w in shore.b_points.windows(2) {
        assert!((w[1] - w[0] - 8.0).abs() < 1e-12, "{w:?}");
    }
    for t in &shore.b_points {
        assert!(shore.xi.eval(*t).dist(Point::new(*t, 0.0)) < 1e-12);
    }
    let rep = check_shore(&input, &shore, 20_000, 1).unwrap();
    assert!(rep.deviation < 1e-12);
    assert!(rep.pass(1e-9), "{rep:?}");
}

#[test]
fn b0_is_the_first_parameter_within_p_of_the_right_half() {
    // A straight line: dist(γ(t), γ([0, ∞))) = |t| for t ≤ 0.
    let input = ShoreInput::new(line(40), 1.0).unwrap();
    let shore = initial_shore(&input).unwrap();
    assert!((shore.b_points[shore.origin] + 8.0).abs() < 1e-9);
}

#[test]
fn right_angle_corner_puts_b0_at_minus_p() {
    // γ runs along the x-axis up to the origin and then up the y-axis, so
    // dist(γ(t), γ([0, ∞))) = |t| for t ≤ 0 and b₀ = −p(L).
    let bps: Vec<f64> = (-200..=200).map(|t| t as f64).collect();
    let verts: Vec<Point> = bps
        .iter()
        .map(|&t| {
            if t <= 0.0 {
                Point::new(t, 0.0)
            } else {
                Point::new(0.0, t)
            }
        })
        .collect();
    let g = Polyline::with_extended_tails(bps, verts).unwrap();
    let input = ShoreInput::measured(g).unwrap();
    assert!((input.l - 2f64.sqrt()).abs() < 1e-12);
    let shore = initial_shore(&input).unwrap();
    let b0 = shore.b_points[shore.origin];
    assert!((b0 + shore.pl).abs() < 1e-9, "b0 = {b0}, p = {}", shore.pl);
    let rep = check_shore(&input, &shore, 20_000, 3).unwrap();
    assert!(rep.pass(1e-9), "{rep:?}");
}

#[test]
fn small_window_is_rejected() {
    let input = ShoreInput::new(line(10), 1.0).unwrap();
    assert!(matches!(
        initial_shore(&input),
        Err(Error::WindowTooSmall(_))
    ));
}

#[test]
fn understated_constant_is_rejected() {
    let bps: Vec<f64> = (-50..=50).map(|t| t as f64).collect();
    let verts: Vec<Point> = bps.iter().map(|t| Point::new(2.0 * t, 0.0)).collect();
    let g = Polyline::with_extended_tails(bps, verts).unwrap();
    assert!(matches!(
        ShoreInput::new(g, 1.5),
        Err(Error::HypothesisViolated(_))
    ));
}

#[test]
fn non_integer_breakpoints_are_rejected() {
    let g = Polyline::with_extended_tails(
        vec![0.0, 0.5, 1.0],
        vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
        ],
    )
    .unwrap();
    assert!(matches!(
        ShoreInput::new(g, 1.0),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn random_curves_pass_the_shore_checks() {
    for seed in 0..6u64 {
        let turn = 0.05 + 0.05 * seed as f64;
        let g = random_lattice_curve(700, turn, 0.6, seed);
        let input = ShoreInput::measured(g).unwrap();
        assert!(input.l <= 3.0);
        let shore = initial_shore(&input).unwrap();
        assert!(shore.b_points.len() >= 3);
        let rep = check_shore(&input, &shore, 20_000, seed).unwrap();
        assert!(rep.chord_error <= 1e-9, "{rep:?}");
        assert!(rep.pass(1e-9), "seed {seed}: {rep:?}");
    }
}

#[test]
fn column_shear_round_trips_and_meets_its_bound() {
    let bps = vec![-2.0, 0.0, 1.0, 3.0];
    let verts = vec![
        Point::new(-2.0, 1.0),
        Point::new(0.0, 0.0),
        Point::new(2.0, 0.5),
        Point::new(3.0, -1.0),
    ];
    let curve = Polyline::with_extended_tails(bps, verts).unwrap();
    let shear = ColumnShear::from_graph(&curve, Point::new(1.0, 0.0)).unwrap();
    let map = PlaneMap::ColumnShear { shear };
    for t in [-5.0, -2.0, -0.5, 0.0, 0.7, 2.0, 3.0, 9.0] {
        let p = map.apply2(Point::new(t, 0.0));
        assert!(p.dist(curve.eval(t)) < 1e-12);
        let q = map.apply2(Point::new(t, 1.5));
        let back = map.inverse_evaluate(&PointD::from(q)).unwrap().to2();
        assert!(back.dist(Point::new(t, 1.5)) < 1e-12);
    }
    let s = BoxSampler::new(PointD::xy(-6.0, -3.0), PointD::xy(6.0, 3.0), 0.5);
    let est = empirical_bilip(|p: &PointD| map.apply(p), |r| s.sample(r), 50_000, 5).unwrap();
    assert!(est.bilip() <= map.bound().value() * (1.0 + 1e-9));
    // Slope (X', Y') = (2, 0.5) on [0, 1]: ‖[[2,0],[0.5,1]]‖ is attained.
    let inv = map.inverse();
    let r = inv.apply2(map.apply2(Point::new(0.25, -0.75)));
    assert!(r.dist(Point::new(0.25, -0.75)) < 1e-12);
}

#[test]
fn shear_oracle_rejects_a_non_graph() {
    // A closed-up spiral turns through every direction.
    let n = 80;
    let bps: Vec<f64> = (0..n).map(|t| t as f64).collect();
    let verts: Vec<Point> = (0..n)
        .map(|k| {
            let a = k as f64 * 0.2;
            Point::new(a.cos(), a.sin()) * (5.0 + k as f64 * 0.1)
        })
        .collect();
    let curve = Polyline::with_extended_tails(bps, verts).unwrap();
    assert!(matches!(
        ShearOracle::default().extend(&curve),
        Err(Error::OracleUnavailable(_))
    ));
}

#[test]
fn empty_set_leaves_the_curve_unchanged() {
    let xi = line(20);
    let gc = avoid_gridcurve(&xi, &[], 0.5, 1.0, &ShearOracle::default()).unwrap();
    assert!(gc.detours.is_empty());
    for k in -400..=400 {
        let t = k as f64 * 0.06;
        assert!(gc.mu.eval(t).dist(xi.eval(t)) < 1e-12);
    }
}

#[test]
fn point_far_from_the_line_needs_no_detour() {
    let delta = 0.5;
    let xi = line(20);
    let gamma = [Point::new(0.0, 0.4 * delta)];
    let gc = avoid_gridcurve(
        &xi,
        &gamma,
        delta,
        1.0,
        &ShearOracle::along(Point::new(1.0, 0.0)),
    )
    .unwrap();
    // h/2 = δ/2¹³ is far below 0.4δ.
    assert!(gc.detours.is_empty());
    let rep = check_gridcurve(&gc, &xi, &gamma, delta, 20_000, 2).unwrap();
    assert!(rep.pass(&gc), "{rep:?}");
}

#[test]
fn point_near_the_line_gets_a_square_detour() {
    let delta = 0.5;
    let l = 1.0;
    let h = grid_h(delta, l);
    let xi = line(20);
    let gamma = [Point::new(0.0, 0.4 * h)];
    let gc = avoid_gridcurve(
        &xi,
        &gamma,
        delta,
        l,
        &ShearOracle::along(Point::new(1.0, 0.0)),
    )
    .unwrap();
    assert_eq!(gc.detours.len(), 1);
    // The centre is above the axis, so the longer way goes over the top at
    // height 0.4h + h/2.
    let top = 0.9 * h;
    let corners = [
        Point::new(-0.5 * h, 0.0),
        Point::new(-0.5 * h, top),
        Point::new(0.5 * h, top),
        Point::new(0.5 * h, 0.0),
    ];
    for c in corners {
        assert!(
            gc.mu.vertices.iter().any(|v| v.dist(c) < 1e-15),
            "missing corner {c:?}"
        );
    }
    // Constant speed ℓ/h = (h + 2·0.9h)/h = 2.8 on the detour.
    let d = &gc.detours[0];
    let speed = (gc.mu.eval(d.r + 0.01 * h).dist(gc.mu.eval(d.r))) / (0.01 * h);
    assert!((speed - 2.8).abs() < 1e-6);
    let rep = check_gridcurve(&gc, &xi, &gamma, delta, 20_000, 4).unwrap();
    assert!(rep.clearance_exact);
    assert!((rep.straight_clearance - 0.5 * h).abs() < 1e-15);
    assert!(rep.pass(&gc), "{rep:?}");
}

#[test]
fn point_on_the_line_goes_over_the_top() {
    let delta = 0.5;
    let h = grid_h(delta, 1.0);
    let xi = line(20);
    let gamma = [Point::new(3.0, 0.0)];
    let gc = avoid_gridcurve(&xi, &gamma, delta, 1.0, &ShearOracle::default()).unwrap();
    assert_eq!(gc.detours.len(), 1);
    assert!((gc.detours[0].level - 0.5 * h).abs() < 1e-18);
    let rep = check_gridcurve(&gc, &xi, &gamma, delta, 20_000, 6).unwrap();
    assert!(rep.pass(&gc), "{rep:?}");
}

#[test]
fn unseparated_set_is_rejected() {
    let xi = line(20);
    let gamma = [Point::new(0.0, 0.0), Point::new(0.1, 0.0)];
    let r = avoid_gridcurve(&xi, &gamma, 0.5, 1.0, &ShearOracle::default());
    assert!(matches!(r, Err(Error::HypothesisViolated(_))));
}

#[test]
fn misbehaving_oracle_is_reported() {
    struct Shifted;
    impl LineExtensionOracle for Shifted {
        fn name(&self) -> &'static str {
            "shifted"
        }
        fn extend(&self, curve: &Polyline) -> bilip_core::Result<LineExtension> {
            let mut ext = ShearOracle::default().extend(curve)?;
            let shift = bilip_core::planemap::Affine::translation(&PointD::xy(0.0, 1e-3));
            ext.map = PlaneMap::compose(vec![PlaneMap::affine(shift), ext.map]);
            Ok(ext)
        }
    }
    let r = avoid_gridcurve(&line(20), &[], 0.5, 1.0, &Shifted);
    assert!(matches!(r, Err(Error::OracleBoundaryMismatch(_))));
}

/// Γ = γ(Z) together with points placed on ξ, kept δ-separated.
fn shore_gamma(input: &ShoreInput, shore: &ShoreCurve, delta: f64) -> Vec<Point> {
    let mut gamma: Vec<Point> = input.gamma.vertices.clone();
    for w in shore.b_points.windows(2) {
        let c = shore.xi.eval(0.5 * (w[0] + w[1]));
        if gamma.iter().all(|q| q.dist(c) >= delta) {
            gamma.push(c);
        }
    }
    gamma
}

#[test]
fn gridcurve_on_random_shore_curves() {
    for seed in 0..4u64 {
        let g = random_lattice_curve(500, 0.1, 0.5, 100 + seed);
        let input = ShoreInput::measured(g).unwrap();
        let shore = initial_shore(&input).unwrap();
        let delta = 0.99 / input.l;
        let gamma = shore_gamma(&input, &shore, delta);
        let lx = check_shore(&input, &shore, 20_000, seed)
            .unwrap()
            .bilip
            .bilip()
            .max(1.0);
        let gc = avoid_gridcurve(&shore.xi, &gamma, delta, lx, &ShearOracle::default()).unwrap();
        assert!(!gc.detours.is_empty());
        let rep = check_gridcurve(&gc, &shore.xi, &gamma, delta, 20_000, seed).unwrap();
        assert!(rep.pass(&gc), "seed {seed}: {rep:?}");
        assert!(rep.min_clearance >= gc.clearance_bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn shore_invariants_hold(seed in 0u64..10_000, turn in 0.02f64..0.4, spread in 0.1f64..0.8) {
        let g = random_lattice_curve(400, turn, spread, seed);
        let input = ShoreInput::measured(g).unwrap();
        prop_assume!(input.reach() + 2.0 * input.p() <= 400.0);
        let shore = initial_shore(&input).unwrap();
        let rep = check_shore(&input, &shore, 5_000, seed).unwrap();
        prop_assert!(rep.pass(1e-9), "{:?}", rep);
    }

    #[test]
    fn shear_inverse_round_trips(seed in 0u64..10_000, x in -50.0f64..50.0, y in -5.0f64..5.0) {
        let g = random_lattice_curve(60, 0.2, 0.5, seed);
        let ext = ShearOracle::default().extend(&g).unwrap();
        let p = PointD::xy(x, y);
        let back = ext.map.inverse_evaluate(&ext.map.evaluate(&p).unwrap()).unwrap();
        prop_assert!(back.dist(&p) < 1e-9);
    }
}
