use bilip_core::geom::*;
use bilip_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn seg(a: (f64, f64), b: (f64, f64)) -> Segment {
    Segment::new(p(a.0, a.1), p(b.0, b.1))
}

#[test]
fn point_segment_examples() {
    let s = seg((-1.0, 0.0), (1.0, 0.0));
    assert_eq!(point_segment_distance(p(0.0, 1.0), &s), 1.0);
    assert_eq!(point_segment_distance(p(2.0, 0.0), &s), 1.0);
    assert_eq!(
        point_segment_distance(p(3.0, 4.0), &seg((0.0, 0.0), (0.0, 0.0))),
        5.0
    );
}

#[test]
fn segment_segment_examples() {
    assert_eq!(
        segment_segment_distance(&seg((0., 0.), (1., 0.)), &seg((0., 1.), (1., 1.))),
        1.0
    );
    assert_eq!(
        segment_segment_distance(&seg((0., 0.), (1., 1.)), &seg((1., 0.), (0., 1.))),
        0.0
    );
    let (a, b) = (seg((0., 0.), (1., 0.)), seg((2., 1.), (3., 1.)));
    let d = segment_segment_distance(&a, &b);
    // Dense sampling oracle.
    let n = 2000;
    let mut best = f64::INFINITY;
    for i in 0..=n {
        let u = a.a.lerp(a.b, i as f64 / n as f64);
        for j in (0..=n).step_by(50) {
            let v = b.a.lerp(b.b, j as f64 / n as f64);
            best = best.min(u.dist(v));
        }
    }
    assert!((d - 2f64.sqrt()).abs() < 1e-15);
    assert!((best - d).abs() < 1e-3 && best >= d - 1e-15);
}

fn straight_line(n: usize) -> Polyline {
    let bp: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let v: Vec<Point> = bp.iter().map(|&t| p(t, 0.0)).collect();
    Polyline::with_extended_tails(bp, v).unwrap()
}

#[test]
fn certificate_straight_line() {
    let cert = pwaff_certificate(&straight_line(20), 1.0, FRAC_PI_2).unwrap();
    assert!(cert.valid());
    assert_eq!(cert.bound, 4.0);
}

#[test]
fn certificate_rejects_sharp_sawtooth() {
    let h = 3f64.sqrt() / 2.0;
    let v: Vec<Point> = (0..9)
        .map(|i| p(i as f64 * 0.5, if i % 2 == 1 { h } else { 0.0 }))
        .collect();
    let bp: Vec<f64> = (0..9).map(|i| i as f64).collect();
    let curve = Polyline::with_extended_tails(bp, v).unwrap();
    // The apex angle is exactly π/3.
    let angle = curve.vertex_angle(1);
    assert!((angle - PI / 3.0).abs() < 1e-12);
    match pwaff_certificate(&curve, 4.0, FRAC_PI_2) {
        Err(Error::CheckFailed { condition, .. }) => assert_eq!(condition, "angle"),
        other => panic!("expected an angle failure, got {other:?}"),
    }
    assert!(matches!(
        pwaff_certificate(&curve, 4.0, PI),
        Err(Error::InvalidAlpha(_))
    ));
}

#[test]
fn empirical_identity_and_scaling() {
    let s = BoxSampler::new(PointD::xy(0.0, 0.0), PointD::xy(1.0, 1.0), 0.01);
    let id = empirical_bilip(|x: &PointD| *x, |r: &mut ChaCha8Rng| s.sample(r), 10_000, 7).unwrap();
    assert!((id.lip_up - 1.0).abs() < 1e-12 && (id.lip_down - 1.0).abs() < 1e-12);
    let sc = empirical_bilip(
        |x: &PointD| *x * 2.0,
        |r: &mut ChaCha8Rng| s.sample(r),
        10_000,
        7,
    )
    .unwrap();
    assert!((sc.lip_up - 2.0).abs() < 1e-12 && (sc.lip_down - 0.5).abs() < 1e-12);
    let again = empirical_bilip(
        |x: &PointD| *x * 2.0,
        |r: &mut ChaCha8Rng| s.sample(r),
        10_000,
        7,
    )
    .unwrap();
    assert_eq!(sc, again);
}

#[test]
fn brute_force_glue_formulas() {
    assert_eq!(glue_bound_brute(1.0, 1.0, 1.0), (5.0, 3.0));
    assert_eq!(glue_bound_brute(2.0, 3.0, 0.5), (12.0, 18.0));
    let (a, b) = glue_bound_brute(1.0, 1e-300, f64::INFINITY);
    assert_eq!((a, b), (3.0, 1.0));
}

fn grid(x0: f64, x1: f64, n: usize) -> Vec<PointD> {
    let mut v = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            v.push(PointD::xy(
                x0 + (x1 - x0) * i as f64 / n as f64,
                j as f64 / n as f64,
            ));
        }
    }
    v
}

#[test]
fn glue_adjacent_squares_has_unit_constant() {
    let f = |x: &PointD| *x;
    let s1 = grid(0.0, 1.0, 6);
    let s2 = grid(1.0, 2.0, 6);
    let in1 = |x: &PointD| x[0] <= 1.0;
    let in2 = |x: &PointD| x[0] >= 1.0;
    let a = GluePart {
        map: &f,
        contains: &in1,
        samples: &s1,
    };
    let b = GluePart {
        map: &f,
        contains: &in2,
        samples: &s2,
    };
    let z = |x: &PointD, y: &PointD| {
        let t = (1.0 - x[0]) / (y[0] - x[0]);
        PointD::xy(1.0, x[1] + t * (y[1] - x[1]))
    };
    let rep = glue_lip_check(&a, &b, &z).unwrap();
    assert!((rep.c - 1.0).abs() < 1e-12);
    assert!(rep.cross_pairs > 0);
    // Identical domains: no cross pairs.
    let c = GluePart {
        map: &f,
        contains: &in1,
        samples: &s1,
    };
    let rep = glue_lip_check(&a, &c, &z).unwrap();
    assert_eq!((rep.c, rep.cross_pairs), (1.0, 0));
}

#[test]
fn glue_forced_detour_matches_hand_value() {
    let f = |x: &PointD| *x;
    let s1 = vec![PointD::xy(-1.0, 0.0)];
    let s2 = vec![PointD::xy(2.0, 0.0)];
    let in1 = |x: &PointD| x[0] <= 1.0;
    let in2 = |x: &PointD| x[0] >= 0.0;
    let a = GluePart {
        map: &f,
        contains: &in1,
        samples: &s1,
    };
    let b = GluePart {
        map: &f,
        contains: &in2,
        samples: &s2,
    };
    let z = |_: &PointD, _: &PointD| PointD::xy(0.5, 10.0);
    let rep = glue_lip_check(&a, &b, &z).unwrap();
    let hand = 2.0 * (1.5f64 * 1.5 + 100.0).sqrt() / 3.0;
    assert!((rep.c - hand).abs() < 1e-12);
    let bad = |_: &PointD, _: &PointD| PointD::xy(5.0, 0.0);
    assert!(matches!(
        glue_lip_check(&a, &b, &bad),
        Err(Error::MissingZ(_))
    ));
    let g = |x: &PointD| *x + PointD::xy(0.0, 1.0);
    let s3 = vec![PointD::xy(0.5, 0.0)];
    let c = GluePart {
        map: &g,
        contains: &in2,
        samples: &s3,
    };
    let d = GluePart {
        map: &f,
        contains: &in1,
        samples: &s3,
    };
    assert!(matches!(
        glue_lip_check(&d, &c, &z),
        Err(Error::WellDefinedness(_))
    ));
}

#[test]
fn side_of_horizontal_line() {
    let l = straight_line(5);
    assert_eq!(side_classify(&l, p(0.0, -1.0)), Side::Below);
    assert_eq!(side_classify(&l, p(2.5, 3.0)), Side::Above);
    assert_eq!(side_classify(&l, p(-50.0, -1.0)), Side::Below);
    assert_eq!(side_classify(&l, p(70.0, 1.0)), Side::Above);
    assert_eq!(side_classify(&l, p(1.0, 0.0)), Side::OnCurve);
}

#[test]
fn side_parity_flips_across_a_zigzag() {
    // Square wave; walk a vertical line through it and compare with the
    // ground truth computed from the wave's explicit height.
    let mut bp = Vec::new();
    let mut v = Vec::new();
    let mut t = 0.0;
    for k in 0..10 {
        let x = k as f64;
        let hgt = if k % 2 == 0 { 0.0 } else { 1.0 };
        for pt in [p(x, hgt), p(x + 1.0, hgt)] {
            if v.last() != Some(&pt) {
                v.push(pt);
                bp.push(t);
                t += 1.0;
            }
        }
    }
    let curve = Polyline::with_extended_tails(bp, v).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let x: f64 = rng.gen_range(0.0..10.0);
        let y: f64 = rng.gen_range(-1.0..2.0);
        let k = x.floor() as i64;
        let hgt = if k % 2 == 0 { 0.0 } else { 1.0 };
        if (y - hgt).abs() < 1e-6 || (x - x.round()).abs() < 1e-6 {
            continue;
        }
        let want = if y < hgt { Side::Below } else { Side::Above };
        assert_eq!(side_classify(&curve, p(x, y)), want, "at ({x}, {y})");
    }
}

proptest! {
    #[test]
    fn two_discs_cover_the_sausage(theta in 0.0..(2.0 * PI), ux in -5.0..5.0f64, uy in -5.0..5.0f64,
                                   s in 0.0..1.0f64, off in 0.0..(1.0 / 2f64.sqrt()), phi in 0.0..(2.0 * PI)) {
        let u = p(ux, uy);
        let v = u + p(theta.cos(), theta.sin());
        let q = u.lerp(v, s) + p(phi.cos(), phi.sin()) * off;
        let sausage = point_segment_distance(q, &Segment::new(u, v));
        prop_assume!(sausage < 1.0 / 2f64.sqrt());
        prop_assert!(q.dist(u).min(q.dist(v)) <= 3f64.sqrt() / 2.0 + 1e-12);
    }

    #[test]
    fn segment_distance_symmetric_and_triangle(c in proptest::collection::vec(-10.0..10.0f64, 12)) {
        let a = seg((c[0], c[1]), (c[2], c[3]));
        let b = seg((c[4], c[5]), (c[6], c[7]));
        let e = seg((c[8], c[9]), (c[10], c[11]));
        let dab = segment_segment_distance(&a, &b);
        prop_assert_eq!(dab, segment_segment_distance(&b, &a));
        let bound = dab + b.length() + segment_segment_distance(&b, &e);
        prop_assert!(segment_segment_distance(&a, &e) <= bound + 1e-12);
    }

    #[test]
    fn bisector_sine_bound(seed in 0u64..u64::MAX) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rad: f64 = rng.gen_range(0.5..3.0);
        let in_disk = |rng: &mut ChaCha8Rng| loop {
            let q = p(rng.gen_range(-rad..rad), rng.gen_range(-rad..rad));
            if q.norm() <= rad { return q; }
        };
        let w = in_disk(&mut rng);
        let pp = in_disk(&mut rng);
        prop_assume!(w.dist(pp) > 1e-6);
        let mid = w.lerp(pp, 0.5);
        let half = w.dist(pp) / 2.0;
        let mut found = None;
        for _ in 0..200 {
            let a = p(rng.gen_range(-2.0 * rad..2.0 * rad), rng.gen_range(-2.0 * rad..2.0 * rad));
            let in_both = a.norm() < rad && a.dist(mid) < half;
            let ang = angle_between(w - pp, a - pp);
            if !in_both && a != pp && a.dist(pp) <= a.dist(w) && ang <= FRAC_PI_2 {
                found = Some(ang);
                break;
            }
        }
        if let Some(ang) = found {
            prop_assert!(ang.sin() >= 2f64.sqrt() / 4.0 * w.dist(pp) / (2.0 * rad) - 1e-9);
        }
    }

    #[test]
    fn pwaff_bound_dominates_sampled_constant(steps in proptest::collection::vec((1.0..2.0f64, -0.4..0.4f64), 3..12)) {
        let mut v = vec![p(0.0, 0.0)];
        let mut bp = vec![0.0];
        for (i, (dx, dy)) in steps.iter().enumerate() {
            let last = *v.last().unwrap();
            v.push(last + p(*dx, *dy));
            bp.push((i + 1) as f64 * 1.5);
        }
        let curve = Polyline::new(bp, v, [p(1.0, 0.0), p(1.0, 0.0)]).unwrap();
        let opts = CertOptions { far_samples: 20_000, ..CertOptions::default() };
        let cert = pwaff_audit(&curve, 3.0, FRAC_PI_2, opts).unwrap();
        prop_assume!(cert.valid());
        let (lo, hi) = curve.window();
        let s = IntervalSampler::new(lo - 5.0, hi + 5.0, 0.5).with_hot_spots(curve.breakpoints.clone());
        let est = empirical_bilip(|t: &f64| curve.eval(*t), |r: &mut ChaCha8Rng| s.sample(r), 100_000, 11).unwrap();
        prop_assert!(est.bilip() <= cert.bound + 1e-6);
    }
}
