use bilip_core::geom::{component_labels, LatticeMap, Point, PointD, Polyline};
use bilip_core::pipeline::*;
use bilip_core::shore::{SeparationMode, ShearOracle};
use bilip_core::strip_ext::{grid_injective, CoonsOracle};
use bilip_core::Error;

fn columns(n: i64) -> (i64, i64) {
    (-n, n)
}

fn flat(y: f64, window: (f64, f64)) -> Polyline {
    Polyline::with_extended_tails(
        vec![window.0, window.1],
        vec![Point::new(window.0, y), Point::new(window.1, y)],
    )
    .unwrap()
}

fn fill_params(window: (f64, f64)) -> FillParams {
    FillParams {
        window,
        separation: SeparationMode::Monotone { step: 0.5 },
        sample_step: 0.125,
        p: 1.0,
        thread: ThreadMode::Desk,
        thread_l: 24,
        vertex_budget: 1 << 22,
    }
}

#[test]
fn thread_of_the_lattice_fixes_lattice_and_walls() {
    let (a, b) = columns(6);
    let values: Vec<Point> = (a..=b).map(|x| Point::new(x as f64, 0.0)).collect();
    let th = thread_extend(&ThreadInput::new((a, b), values, 24).unwrap(), ThreadMode::Desk).unwrap();
    for x in a..=b {
        let p = th.map.evaluate(&PointD::xy(x as f64, 0.0)).unwrap().to2();
        assert!(p.dist(Point::new(x as f64, 0.0)) <= 1e-9, "{x}: {p:?}");
    }
    for k in -40..=40 {
        for y in [-1.0, 1.0] {
            let z = PointD::xy(k as f64 * 0.25, y);
            assert_eq!(th.map.evaluate(&z).unwrap(), z);
        }
    }
}

#[test]
fn thread_extends_a_perturbed_row() {
    let (a, b) = columns(8);
    let values: Vec<Point> = (a..=b)
        .map(|x| {
            let t = x as f64;
            Point::new(t + 0.01 * (1.3 * t).sin(), 0.02 * (0.7 * t).cos())
        })
        .collect();
    let th = thread_extend(&ThreadInput::new((a, b), values.clone(), 24).unwrap(), ThreadMode::Desk).unwrap();
    for (k, v) in values.iter().enumerate() {
        let x = (a + k as i64) as f64;
        let p = th.map.evaluate(&PointD::xy(x, 0.0)).unwrap().to2();
        assert!(p.dist(*v) <= 1e-6, "{x}: {p:?} vs {v:?}");
    }
}

#[test]
fn thread_pins_data_back_to_the_axis() {
    let (a, b) = columns(5);
    let values: Vec<Point> = (a..=b).map(|x| Point::new(x as f64 + 0.1, -0.05)).collect();
    let th = thread_extend(&ThreadInput::new((a, b), values.clone(), 24).unwrap(), ThreadMode::Desk).unwrap();
    for (k, v) in values.iter().enumerate() {
        let psi = th.rounding.psi.evaluate(&PointD::from(*v)).unwrap();
        let back = th.upsilon.evaluate(&psi).unwrap().to2();
        let x = (a + k as i64) as f64;
        assert!(back.dist(Point::new(x, 0.0)) <= 1e-9, "{back:?}");
    }
}

#[test]
fn thread_hypotheses_are_checked() {
    let values = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
    let r = ThreadInput::new((0, 1), values.clone(), 23);
    assert!(matches!(r, Err(Error::HypothesisViolated(_))));
    let near_wall = vec![Point::new(0.0, 0.99), Point::new(1.0, 0.0)];
    assert!(ThreadInput::new((0, 1), near_wall, 24).is_err());
}

#[test]
fn paper_thread_reports_its_program_budget() {
    let values = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
    let input = ThreadInput::new((0, 1), values, 24).unwrap();
    let r = thread_extend(&input, ThreadMode::Paper { max_program: u64::MAX });
    assert!(matches!(r, Err(Error::BudgetExceeded(_))), "{r:?}");
}

#[test]
fn thread_constant_matches_its_closed_form() {
    // d = 2, L = 24: 14 + 1 + 8 log₂ 24, plus log₂ e · 2^(3 + 66 log₂ 3 + 4 + 52 log₂ 24).
    let l: f64 = 24.0;
    let lin = 15.0 + 8.0 * l.log2();
    let e = (3.0 + 66.0 * 3f64.log2() + 4.0 + 52.0 * l.log2()).exp2();
    let want = lin + e / std::f64::consts::LN_2;
    let got = thread_paper_log2(l, 2);
    assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
    assert_eq!(thread_displacement(24.0, 2), 2f64.powi(16) * 24f64.powi(9));
}

fn identity(x: (i64, i64), y: (i64, i64)) -> LatticeMap {
    LatticeMap::from_fn(x, y, |i, j| Point::new(i as f64, j as f64))
}

#[test]
fn split_of_identity_data_runs_between_the_first_two_rows() {
    let f = identity((-6, 6), (-2, 4));
    let window = (-10.0, 10.0);
    let (bottom, top) = (flat(-0.5, window), flat(1.5, window));
    let band = Band {
        rows: (0, 1),
        bottom: &bottom,
        top: &top,
    };
    let s = split_red_black(&f, &band, 0.0, &fill_params(window), &ShearOracle::default(), &CoonsOracle::default())
        .unwrap();
    assert_eq!(s.level, 0.5);
    let pts: Vec<Point> = (-6..=6)
        .flat_map(|i| [Point::new(i as f64, 0.0), Point::new(i as f64, 1.0)])
        .collect();
    let labels = component_labels(&s.line, &pts).unwrap();
    for (k, p) in pts.iter().enumerate() {
        assert_eq!(labels[k], labels[0] == (p.y == 0.0), "{p:?}");
    }
    assert!(labels[0] != labels[1]);
}

#[test]
fn three_rows_slice_into_ordered_lines() {
    let f = identity((-6, 6), (-2, 5));
    let window = (-10.0, 10.0);
    let (bottom, top) = (flat(-0.5, window), flat(2.5, window));
    let band = Band {
        rows: (0, 2),
        bottom: &bottom,
        top: &top,
    };
    let params = fill_params(window);
    let s = slice_strip(&f, &band, 0.0, &params, &ShearOracle::default(), &CoonsOracle::default()).unwrap();
    assert_eq!(s.splits.len(), 2);
    let levels: Vec<f64> = s.lines.iter().map(|(l, _)| *l).collect();
    assert_eq!(levels, vec![-0.5, 0.5, 1.5, 2.5]);
    assert!(s.well_separating.pass(), "{:?}", s.well_separating);
    // K₁ = α(K₀, 3) and K₂ = α(K₁, 2).
    let k1 = alpha_log2(0.0, 3.0, 1.0);
    assert_eq!(s.chain_log2, vec![0.0, k1, alpha_log2(k1, 2.0, 1.0)]);
}

#[test]
fn two_rows_need_a_single_split() {
    let f = identity((-4, 4), (-2, 3));
    let window = (-8.0, 8.0);
    let (bottom, top) = (flat(-0.5, window), flat(1.5, window));
    let band = Band {
        rows: (0, 1),
        bottom: &bottom,
        top: &top,
    };
    let s = slice_strip(&f, &band, 0.0, &fill_params(window), &ShearOracle::default(), &CoonsOracle::default())
        .unwrap();
    assert_eq!(s.splits.len(), 1);
}

#[test]
fn identity_band_fills_near_the_identity() {
    let f = identity((-6, 6), (-2, 4));
    let window = (-10.0, 10.0);
    let (bottom, top) = (flat(-0.5, window), flat(1.5, window));
    let band = Band {
        rows: (0, 1),
        bottom: &bottom,
        top: &top,
    };
    let fill = iterate_fill(&f, &band, 0.0, &fill_params(window), &ShearOracle::default(), &CoonsOracle::default())
        .unwrap();
    let map = fill.map();
    for s in &fill.strips {
        assert!(s.lattice_error <= 1e-6, "row {}: {}", s.row, s.lattice_error);
        assert!(s.line_error <= 1e-6, "row {}: {}", s.row, s.line_error);
    }
    for i in -6..=6 {
        for j in 0..=1 {
            let p = map.evaluate(&PointD::xy(i as f64, j as f64)).unwrap().to2();
            assert!(p.dist(Point::new(i as f64, j as f64)) <= 1e-6);
        }
    }
    let g = grid_injective(&map, Point::new(-6.0, -0.5), Point::new(6.0, 1.5), 96, 16).unwrap();
    assert!(g.ok, "{g:?}");
}

#[test]
fn sheared_band_agrees_on_lines_and_rows() {
    let f = LatticeMap::from_fn((-6, 6), (-2, 4), |i, j| Point::new(i as f64 + 0.5 * j as f64, j as f64));
    let window = (-10.0, 10.0);
    let shear = |y: f64| {
        Polyline::with_extended_tails(
            vec![window.0, window.1],
            vec![Point::new(window.0 + 0.5 * y, y), Point::new(window.1 + 0.5 * y, y)],
        )
        .unwrap()
    };
    let (bottom, top) = (shear(-0.5), shear(1.5));
    let band = Band {
        rows: (0, 1),
        bottom: &bottom,
        top: &top,
    };
    let fill = iterate_fill(&f, &band, 1f64.log2(), &fill_params(window), &ShearOracle::default(), &CoonsOracle::default())
        .unwrap();
    for s in &fill.strips {
        assert!(s.lattice_error <= 1e-6, "row {}: {}", s.row, s.lattice_error);
        assert!(s.line_error <= 1e-6, "row {}: {}", s.row, s.line_error);
    }
    let g = grid_injective(&fill.map(), Point::new(-6.0, -0.5), Point::new(6.0, 1.5), 96, 16).unwrap();
    assert!(g.ok, "{g:?}");
}

fn desk() -> ExtendParams {
    let mut p = ExtendParams::new(Profile::Desk);
    p.round_trip = 2_000;
    p.samples = 4_000;
    p.thread_samples = 300;
    p
}

#[test]
fn identity_extends_to_a_near_identity() {
    let f = identity((-5, 5), (-4, 4));
    let e = main_extend(&f, &desk()).unwrap();
    assert!(e.lattice_error <= 1e-6, "{}", e.lattice_error);
    assert!(e.injectivity.ok, "{:?}", e.injectivity);
    assert!(e.round_trip_error <= 1e-6, "{}", e.round_trip_error);
    assert!(e.pass());
}

fn rotation(deg: f64) -> impl Fn(i64, i64) -> Point {
    let (s, c) = deg.to_radians().sin_cos();
    move |i, j| Point::new(c * i as f64 - s * j as f64, s * i as f64 + c * j as f64)
}

#[test]
fn rotated_lattice_extends_injectively() {
    let f = LatticeMap::from_fn((-4, 4), (-4, 4), rotation(30.0));
    let e = main_extend(&f, &desk()).unwrap();
    assert!(e.lattice_error <= 1e-6, "{}", e.lattice_error);
    assert!(e.injectivity.ok, "{:?}", e.injectivity);
    let failed: Vec<_> = e.report.iter().filter(|r| !r.pass).collect();
    assert!(failed.is_empty(), "{failed:?}");
}

#[test]
fn sheared_lattice_agrees_on_the_window() {
    let f = LatticeMap::from_fn((-4, 4), (-3, 3), |i, j| Point::new(i as f64 + 0.5 * j as f64, j as f64));
    let e = main_extend(&f, &desk()).unwrap();
    assert!(e.lattice_error <= 1e-6, "{}", e.lattice_error);
    assert!(e.round_trip_error <= 1e-6, "{}", e.round_trip_error);
    assert!(e.pass(), "{:?}", e.report.iter().filter(|r| !r.pass).collect::<Vec<_>>());
}

#[test]
fn paper_profile_needs_a_larger_window() {
    let f = identity((-4, 4), (-4, 4));
    let r = main_extend(&f, &ExtendParams::new(Profile::Paper));
    assert!(matches!(r, Err(Error::WindowTooSmall(_))), "{r:?}");
}

#[test]
fn reports_round_trip_through_json() {
    let r = StageReport::new("fill", f64::INFINITY, 1.5, true, 3);
    let text = serde_json::to_string(&r).unwrap();
    assert!(text.contains("\"inf\""), "{text}");
    let back: StageReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    assert!(r.pass);
}

#[test]
fn perturbed_net_rounds_onto_the_lattice() {
    use bilip_core::rounding::SeparatedNet;
    let mut pts = Vec::new();
    for i in -1..=1 {
        for j in -1..=1 {
            let t = (3 * i + j) as f64;
            pts.push(PointD::xy(i as f64 + 0.1 * t.sin(), j as f64 + 0.1 * t.cos()));
        }
    }
    let net = SeparatedNet::new(pts.clone(), 0.6, Some(1.0), 2).unwrap();
    let images: Vec<Point> = pts.iter().map(|p| p.to2()).collect();
    let mut params = desk();
    params.round_trip = 200;
    params.samples = 500;
    params.thread_samples = 50;
    match sep_net_extend(&net, &images, &params) {
        Ok(e) => {
            assert!(e.net_error <= 1e-6, "{}", e.net_error);
            for s in &e.rounding.images {
                assert_eq!(s.len(), 2);
            }
        }
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn lattice_net_reduces_to_the_lattice_extension() {
    use bilip_core::rounding::{check_lattice_rounding, SeparatedNet};
    let pts: Vec<PointD> = (-2..=2)
        .flat_map(|i| (-2..=2).map(move |j| PointD::xy(i as f64, j as f64)))
        .collect();
    let net = SeparatedNet::new(pts.clone(), 1.0, Some(0.5f64.sqrt()), 2).unwrap();
    let images: Vec<Point> = pts.iter().map(|p| p.to2()).collect();
    let mut params = desk();
    params.round_trip = 200;
    params.samples = 500;
    params.thread_samples = 50;
    let e = sep_net_extend(&net, &images, &params).unwrap();
    check_lattice_rounding(&e.rounding, &net).unwrap();
    assert_eq!(e.rounding.scale, 1.0);
    for (p, s) in pts.iter().zip(&e.rounding.images) {
        assert_eq!(vec![p[0] as i64, p[1] as i64], *s);
    }
    let direct = main_extend(&identity((-2, 2), (-2, 2)), &params).unwrap();
    for k in 0..40 {
        let z = PointD::xy(-2.0 + 0.1 * k as f64, 1.7 - 0.08 * k as f64);
        let a = e.map.evaluate(&z).unwrap();
        let b = direct.map.evaluate(&z).unwrap();
        assert!(a.dist(&b) <= 1e-9, "{z:?}: {a:?} vs {b:?}");
    }
}

#[test]
fn paper_rounding_lands_on_the_lattice() {
    use bilip_core::rounding::{check_lattice_rounding, net_to_lattice, SeparatedNet};
    let pts = vec![PointD::xy(0.1, 0.2), PointD::xy(1.05, -0.1), PointD::xy(-0.2, 1.1)];
    let net = SeparatedNet::new(pts, 0.9, Some(1.5), 2).unwrap();
    let lr = net_to_lattice(&net).unwrap();
    check_lattice_rounding(&lr, &net).unwrap();
}
