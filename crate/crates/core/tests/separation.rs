use bilip_core::exact;
use bilip_core::geom::{pwaff_certificate, side_classify, Point, Side};
use bilip_core::separation::*;
use bilip_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn first_breakpoint_example() {
    let cfg = StripConfig::new(0.5, 1.0).unwrap();
    assert_eq!(cfg.r(), 0.005);
    assert!(rel(cfg.p1(), 0.04 / 1.04) < 1e-15);
}

#[test]
fn zigzag_has_constant_speed_and_small_drift() {
    for (s, w) in [(0.5, 1.0), (0.1, 3.0), (0.9, 1.0)] {
        let cfg = StripConfig::new(s, w).unwrap().with_window(-1.0, 2.0);
        let phi = base_zigzag(&cfg).unwrap();
        let v = (w + 8.0 * cfg.r()) / (8.0 * cfg.r());
        for i in 0..phi.num_segments() {
            assert!(rel(phi.velocity(i).norm(), v) < 1e-9, "segment {i}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (t0, t1) = phi.window();
        for _ in 0..10_000 {
            let t = rng.gen_range(t0..t1);
            assert!((phi.eval(t).x - t).abs() <= 8.0 * cfg.r() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn zigzag_certificate() {
    let cfg = StripConfig::new(0.5, 1.0).unwrap().with_window(0.0, 1.0);
    let phi = base_zigzag(&cfg).unwrap();
    let r = cfg.r();
    let cert = pwaff_certificate(&phi, cfg.w / (4.0 * r), PI / 2.0).unwrap();
    assert!(rel(cert.bound, cfg.w * cfg.w / (4.0 * r * r)) < 1e-12);
    assert!(rel(cert.bound, cfg.k()) < 1e-12);
}

#[test]
fn anchor_example() {
    let r = 0.01;
    let x = Point::new(0.013, 0.5);
    // The four vertices of the r-grid square containing x, with the
    // excluded columns dropped, minimised by distance then lexicographically.
    let (i0, j0) = ((x.x / r).floor() as i64, (x.y / r).floor() as i64);
    let mut cands: Vec<(f64, (i64, i64))> = (i0..=i0 + 1)
        .flat_map(|i| (j0..=j0 + 1).map(move |j| (i, j)))
        .filter(|(i, _)| i % 4 != 0)
        .map(|(i, j)| ((i as f64 * r - x.x).hypot(j as f64 * r - x.y), (i, j)))
        .collect();
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    assert_eq!(anchor_grid(x, r), cands[0].1);
    assert_eq!(anchor_grid(x, r), (1, 50));
}

#[test]
fn touching_points_keep_squares_apart() {
    let cfg = StripConfig::new(0.5, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..2000 {
        let a = Point::new(rng.gen_range(0.0..3.0), rng.gen_range(0.6..1.4));
        let th: f64 = rng.gen_range(0.0..2.0 * PI);
        let b = Point::new(a.x + 0.5 * th.cos(), a.y + 0.5 * th.sin());
        if b.y < 0.5 || b.y > 1.5 || a.dist(b) < 0.5 {
            continue;
        }
        let net = MarkedNet::new(vec![a, b], vec![true, false]).unwrap();
        let g = anchor_squares(&net, &cfg).unwrap();
        let dx = ((g[0].0 - g[1].0).abs() - 8).max(0) as f64;
        let dy = ((g[0].1 - g[1].1).abs() - 8).max(0) as f64;
        assert!(dx.hypot(dy) >= 84.0);
    }
}

#[test]
fn close_points_are_rejected() {
    let cfg = StripConfig::new(0.5, 2.0).unwrap();
    let net = MarkedNet::new(
        vec![Point::new(0.0, 1.0), Point::new(0.3, 1.0)],
        vec![true, false],
    )
    .unwrap();
    assert!(matches!(
        build_separation(&net, &cfg),
        Err(Error::NetNotSeparated(_))
    ));
    let out = MarkedNet::new(vec![Point::new(0.0, 0.2)], vec![true]).unwrap();
    assert!(matches!(
        build_separation(&out, &cfg),
        Err(Error::HypothesisViolated(_))
    ));
    let net = MarkedNet::new(vec![Point::new(5.0, 1.0)], vec![true]).unwrap();
    let small = cfg.with_window(0.0, 1.0);
    assert!(matches!(
        build_separation(&net, &small),
        Err(Error::WindowTooSmall(_))
    ));
    assert!(StripConfig::new(1.0, 2.0).is_err());
    assert!(StripConfig::new(0.5, 0.9).is_err());
}

#[test]
fn empty_net_gives_the_zigzag() {
    let cfg = StripConfig::new(0.3, 1.5).unwrap().with_window(-0.5, 0.5);
    let net = MarkedNet::new(vec![], vec![]).unwrap();
    let sep = build_separation(&net, &cfg).unwrap();
    assert_eq!(sep.curve, base_zigzag(&cfg).unwrap());
    assert!(sep.anchors.is_empty());
}

#[test]
fn single_marked_point_is_below() {
    let cfg = StripConfig::new(0.5, 2.0).unwrap();
    for (x, in_y) in [
        (Point::new(0.013, 0.5), true),
        (Point::new(0.013, 0.5), false),
        (Point::new(-0.7, 0.61), true),
    ] {
        let net = MarkedNet::new(vec![x], vec![in_y]).unwrap();
        let sep = build_separation(&net, &cfg).unwrap();
        let want = if in_y { Side::Below } else { Side::Above };
        assert_eq!(side_classify(&sep.curve, x), want);
        // Exact distance from x to every curve segment.
        let need = exact::q(2.0 * cfg.s / 100.0);
        let p = [exact::q(x.x), exact::q(x.y)];
        for s in sep.curve.segments() {
            let a = [exact::q(s.a.x), exact::q(s.a.y)];
            let b = [exact::q(s.b.x), exact::q(s.b.y)];
            assert!(exact::point_segment_dist2(&p, &a, &b) >= need.clone() * need.clone());
        }
        let est = sampled_bilip(&sep, 100_000, 3).unwrap();
        assert!(est.bilip() <= 36.0 * cfg.k() * cfg.k());
        assert!(36.0 * cfg.k() * cfg.k() <= cfg.stated_bound());
    }
}

#[test]
fn gamma_satisfies_piecewise_affine_certificate() {
    let cfg = StripConfig::new(0.4, 1.5).unwrap();
    let net = random_marked_net(&cfg, 40, 11);
    let sep = build_separation(&net, &cfg).unwrap();
    let cert = pwaff_certificate(&sep.curve, 3.0 * cfg.k(), PI / 2.0).unwrap();
    assert!(rel(cert.bound, sep.bound) < 1e-12);
}

#[test]
fn svg_draws_every_square() {
    let cfg = StripConfig::new(0.5, 1.5).unwrap();
    let net = random_marked_net(&cfg, 10, 4);
    let sep = build_separation(&net, &cfg).unwrap();
    let svg = separation_svg(&sep, &net);
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<rect").count(), 1 + net.points.len());
    assert_eq!(svg.matches("<circle").count(), net.points.len());
}

fn check_random(s: f64, w: f64, n: usize, seed: u64) -> Result<(), TestCaseError> {
    let cfg = StripConfig::new(s, w).unwrap();
    let net = random_marked_net(&cfg, n, seed);
    let sep = build_separation(&net, &cfg).unwrap();
    let rep = verify_separation(&sep, &net, 2_000, seed);
    prop_assert!(rep.all(), "{rep:?}");
    let phi = base_zigzag(&sep.cfg).unwrap();
    let r = cfg.r();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (t0, t1) = phi.window();
    for _ in 0..2_000 {
        let t = rng.gen_range(t0 - 0.5..t1 + 0.5);
        let (g, f) = (sep.curve.eval(t), phi.eval(t));
        prop_assert!(g.dist(f) <= 16.0 * r * (1.0 + 1e-9));
        if !sep.anchors.iter().any(|a| a.a < t && t < a.b) {
            prop_assert!(g.dist(f) <= 1e-12 * (1.0 + t.abs()));
        }
    }
    let mut iv: Vec<(f64, f64, usize)> =
        sep.anchors.iter().map(|a| (a.a, a.b, a.segment)).collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    for p in iv.windows(2) {
        prop_assert!(p[0].1 < p[1].0);
    }
    for (a, b, m) in iv {
        prop_assert!(phi.breakpoints[m] < a && b < phi.breakpoints[m + 1]);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn random_nets_are_separated(s in 0.05..0.9f64, extra in 0.0..3.0f64, n in 1usize..120, seed in 0u64..10_000) {
        let w = (2.0 * s).max(1.0) + extra;
        check_random(s, w, n, seed)?;
    }
}
