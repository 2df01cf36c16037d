mod common;

use std::collections::HashSet;

use bendwave::mask::{
    apply_exclusion, build_graph, distance_to_polyline, extract_frame, extract_sequence, parse_mask,
    prune_and_order, rasterize_polyline, thin, write_pbm, write_rle, BaseHint, BinaryMask,
};
use bendwave::kinematics::BendLocator;
use bendwave::midline::Point;
use bendwave::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PITCH: f64 = 0.5e-3;

/// Union of random disks and bars on a 48x48 canvas.
fn random_blob(rng: &mut ChaCha8Rng) -> BinaryMask {
    let (w, h) = (48, 48);
    let mut m = BinaryMask::empty(w, h, 1.0).unwrap();
    for _ in 0..rng.gen_range(1..5) {
        let cx = rng.gen_range(6.0..42.0);
        let cy = rng.gen_range(6.0..42.0);
        if rng.gen_bool(0.5) {
            let r: f64 = rng.gen_range(2.0..7.0);
            for y in 0..h {
                for x in 0..w {
                    if (x as f64 - cx).hypot(y as f64 - cy) <= r {
                        m.set(x, y, true);
                    }
                }
            }
        } else {
            let a = Point::new(cx, cy);
            let b = Point::new(rng.gen_range(4.0..44.0), rng.gen_range(4.0..44.0));
            let bar = rasterize_polyline(&[a, b], rng.gen_range(1.0..3.5), w, h, 1.0).unwrap();
            m = common::union(&m, &bar);
        }
    }
    m
}

#[test]
fn thinning_properties_on_random_blobs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..40 {
        let m = random_blob(&mut rng);
        let t = thin(&m).unwrap();
        assert_eq!(thin(&t).unwrap(), t, "blob {i}: not idempotent");
        for (a, b) in t.bits().iter().zip(m.bits()) {
            assert!(!a || *b, "blob {i}: thinning added a pixel");
        }
        assert_eq!(t.component_count(), m.component_count(), "blob {i}: components changed");
    }
}

#[test]
fn exclusion_examples() {
    let arm = BinaryMask::from_ascii(&["....", ".##.", ".##.", "...."], 1.0).unwrap();
    let none = BinaryMask::empty(4, 4, 1.0).unwrap();
    assert_eq!(apply_exclusion(&arm, &none).unwrap(), arm);
    let gone = apply_exclusion(&arm, &arm).unwrap();
    assert_eq!(gone.count(), 0);
    assert!(matches!(thin(&gone), Err(Error::EmptyInput(_))));
}

#[test]
fn mask_formats_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let m = random_blob(&mut rng);
        assert_eq!(parse_mask(&write_pbm(&m), 1.0).unwrap(), m);
        assert_eq!(parse_mask(write_rle(&m).as_bytes(), 1.0).unwrap(), m);
    }
}

/// Every midline point is a skeleton pixel except at most one merge node,
/// consecutive pixels are 8-neighbors, and no pixel repeats.
fn check_path(points: &[Point], skeleton: &BinaryMask) {
    let mut synthetic = 0;
    let mut seen = HashSet::new();
    let px: Vec<Point> = points.iter().map(|p| *p * (1.0 / PITCH)).collect();
    for p in &px {
        let (x, y) = (p.x.round(), p.y.round());
        let on_grid = (p.x - x).abs() < 1e-6 && (p.y - y).abs() < 1e-6;
        if on_grid && skeleton.get(x as i64, y as i64) {
            assert!(seen.insert((x as i64, y as i64)), "pixel ({x},{y}) visited twice");
        } else {
            synthetic += 1;
        }
    }
    assert!(synthetic <= 1, "{synthetic} off-skeleton points");
    let long_steps = px.windows(2).filter(|w| w[0].dist(w[1]) > 2f64.sqrt() + 1e-9).count();
    assert!(long_steps <= 2 * synthetic, "path jumps {long_steps} times");
}

#[test]
fn prune_output_stays_on_skeleton() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..20 {
        let curve = common::bent_arm_px(100, rng.gen_range(60.0..80.0), rng.gen_range(0.02..0.05), rng.gen_range(25.0..45.0));
        let spur = (i % 2 == 1).then(|| common::spur_px(&curve, 12.0, 8.0));
        let m = common::arm_mask(&curve, spur.as_deref(), 100, PITCH);
        let skel = thin(&m).unwrap();
        let ml = prune_and_order(&build_graph(&skel), PITCH, BaseHint::Top).unwrap();
        check_path(ml.points(), &skel);
        assert!(ml.points()[0].y < ml.points()[ml.len() - 1].y, "frame {i}: not base-first");
    }
}

#[test]
fn corrupt_frame_becomes_gap() {
    let fixture = BinaryMask::empty(100, 100, PITCH).unwrap();
    let curve = common::bent_arm_px(100, 70.0, 0.03, 35.0);
    let clean = common::arm_mask(&curve, None, 100, PITCH);
    let mut frames = vec![clean.clone(); 10];
    let seq = extract_sequence(&frames, &fixture, 0.02, PITCH, BaseHint::Top).unwrap();
    assert_eq!(seq.sequence.len(), 10);
    assert!(seq.gaps.is_empty());
    assert_eq!(seq.sequence.frames()[0].points(), seq.sequence.frames()[9].points());
    assert!((seq.sequence.frames()[2].t() - 0.04).abs() < 1e-15);

    // A cross has four ends and cannot be reduced to one path.
    let cross = [Point::new(20.0, 20.0), Point::new(80.0, 80.0)];
    let cross2 = [Point::new(80.0, 20.0), Point::new(20.0, 80.0)];
    frames[4] = common::union(
        &rasterize_polyline(&cross, 2.0, 100, 100, PITCH).unwrap(),
        &rasterize_polyline(&cross2, 2.0, 100, 100, PITCH).unwrap(),
    );
    let seq = extract_sequence(&frames, &fixture, 0.02, PITCH, BaseHint::Top).unwrap();
    assert_eq!(seq.sequence.len(), 9);
    assert_eq!(seq.gaps.len(), 1);
    assert_eq!(seq.gaps[0].frame, 4);
    assert_eq!(seq.gaps[0].kind, "ambiguous-topology");
    assert_eq!(seq.sequence.frame_index(4), 5);
}

#[test]
fn bend_sweep_tracks_analytic_apex() {
    // The bulge deepens and slides down, so the bend point moves in -x.
    let fixture = BinaryMask::empty(100, 100, PITCH).unwrap();
    let apex = |k: usize| (8.0 + 0.8 * k as f64, 30.0 + 1.5 * k as f64);
    let frames: Vec<BinaryMask> = (0..20)
        .map(|k| {
            let (amp, yb) = apex(k);
            common::arm_mask(&common::hook_px(100, 70.0, amp, yb, 10.0), None, 100, PITCH)
        })
        .collect();
    let ex = extract_sequence(&frames, &fixture, 0.02, PITCH, BaseHint::Top).unwrap();
    assert!(ex.gaps.is_empty());
    let mut last = f64::INFINITY;
    for (k, m) in ex.sequence.frames().iter().enumerate() {
        let b = BendLocator::Smoothed(5).locate(m);
        assert!(!b.boundary);
        assert!(b.point.x < last, "frame {k}: bend x did not decrease");
        last = b.point.x;
        let (amp, yb) = apex(k);
        let d = b.point.dist(Point::new(70.0 - amp, yb) * PITCH);
        assert!(d <= 1.5 * PITCH, "frame {k}: bend off by {} px", d / PITCH);
    }
}

#[test]
fn extracted_midline_follows_curve() {
    let fixture = BinaryMask::empty(100, 100, PITCH).unwrap();
    let curve = common::bent_arm_px(100, 75.0, 0.04, 40.0);
    let m = extract_frame(&common::arm_mask(&curve, None, 100, PITCH), &fixture, PITCH, BaseHint::Top).unwrap();
    let mean = m
        .points()
        .iter()
        .map(|p| distance_to_polyline(*p * (1.0 / PITCH), &curve))
        .sum::<f64>()
        / m.len() as f64;
    assert!(mean <= 1.5, "mean distance {mean} px");
}

