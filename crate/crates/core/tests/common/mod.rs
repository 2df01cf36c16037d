//! Synthetic inputs shared by the integration tests.
#![allow(dead_code)]

use bendwave::kinematics::{BendTrack, MidlineSequence};
use bendwave::mask::{rasterize_polyline, BinaryMask};
use bendwave::midline::{Midline, Point};

pub fn circle(r: f64, n: usize) -> Midline {
    let pts = (0..n)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            Point::new(r * a.cos(), r * a.sin())
        })
        .collect();
    Midline::new(pts, 0.0).unwrap()
}

/// Planar curve of length `length` starting at `start` with heading
/// `heading0`, whose curvature at arc length `s` is `kappa(s)`. The heading
/// is integrated with the trapezoid rule on `n` equally spaced nodes.
pub fn curve_from_curvature(
    kappa: impl Fn(f64) -> f64,
    length: f64,
    n: usize,
    start: Point,
    heading0: f64,
) -> Vec<Point> {
    let ds = length / (n - 1) as f64;
    let mut pts = vec![start];
    let mut theta = heading0;
    let mut p = start;
    for i in 1..n {
        let (s0, s1) = ((i - 1) as f64 * ds, i as f64 * ds);
        let th_mid = theta + 0.5 * ds * 0.5 * (kappa(s0) + kappa(s0 + 0.5 * ds));
        theta += 0.5 * ds * (kappa(s0) + kappa(s1));
        p = p + Point::new(th_mid.cos(), th_mid.sin()) * ds;
        pts.push(p);
    }
    pts
}

pub fn gaussian(x: f64, mu: f64, w: f64) -> f64 {
    (-((x - mu) / w).powi(2)).exp()
}

/// Unit-length arm carrying a Gaussian curvature bump whose center moves
/// from `s0` at `rate` (s/L0 per second); amplitude follows `amp(t)`.
pub fn traveling_bump(
    rate: f64,
    s0: f64,
    width: f64,
    amp: impl Fn(f64) -> f64,
    frames: usize,
    dt: f64,
) -> MidlineSequence {
    let ms = (0..frames)
        .map(|k| {
            let t = k as f64 * dt;
            let c = s0 + rate * t;
            let a = amp(t);
            let pts = curve_from_curvature(|s| a * gaussian(s, c, width), 1.0, 401, Point::default(), 0.0);
            Midline::new(pts, t).unwrap()
        })
        .collect();
    MidlineSequence::new(ms, dt).unwrap()
}

/// Track whose bend point moves in -x with the given per-interval speeds.
pub fn track_from_speeds(speeds: &[f64], dt: f64) -> BendTrack {
    let n = speeds.len() + 1;
    let mut positions = vec![Point::default()];
    for (i, s) in speeds.iter().enumerate() {
        positions.push(positions[i] + Point::new(-s * dt, 0.0));
    }
    BendTrack {
        t: (0..n).map(|i| i as f64 * dt).collect(),
        positions,
        indices: vec![1; n],
        boundary: vec![false; n],
        vx: speeds.iter().map(|s| -s).collect(),
        speed: speeds.to_vec(),
        t_norm: Vec::new(),
        v_norm: Vec::new(),
    }
}

pub fn decreasing_speeds(n: usize) -> Vec<f64> {
    (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect()
}

pub fn triangle_speeds(n: usize) -> Vec<f64> {
    let mid = (n - 1) as f64 / 2.0;
    (0..n).map(|i| 1.0 - (i as f64 - mid).abs() / (mid + 1.0)).collect()
}

/// A bent arm hanging from the top edge of a `size`-square image, in pixel
/// coordinates: length `len` px, a curvature bump of peak `k` rad/px at arc
/// length `sb`.
pub fn bent_arm_px(size: usize, len: f64, k: f64, sb: f64) -> Vec<Point> {
    let start = Point::new(size as f64 * 0.55, 4.0);
    curve_from_curvature(
        |s| k * gaussian(s, sb, 12.0),
        len,
        200,
        start,
        std::f64::consts::FRAC_PI_2,
    )
}

/// Short side branch leaving the curve `back` px before its end at 45°.
pub fn spur_px(curve: &[Point], back: f64, len: f64) -> Vec<Point> {
    let total: f64 = curve.windows(2).map(|w| w[0].dist(w[1])).sum();
    let mut acc = 0.0;
    let mut j = 0;
    while j + 1 < curve.len() && acc + curve[j].dist(curve[j + 1]) < total - back {
        acc += curve[j].dist(curve[j + 1]);
        j += 1;
    }
    let a = curve[j];
    let tan = curve[j + 1] - curve[j];
    let tan = tan * (1.0 / tan.norm());
    let (c, s) = (std::f64::consts::FRAC_PI_4.cos(), std::f64::consts::FRAC_PI_4.sin());
    let dir = Point::new(c * tan.x - s * tan.y, s * tan.x + c * tan.y);
    vec![a, a + dir * len]
}

pub fn union(a: &BinaryMask, b: &BinaryMask) -> BinaryMask {
    let bits = a.bits().iter().zip(b.bits()).map(|(x, y)| *x || *y).collect();
    BinaryMask::new(a.width(), a.height(), bits, a.pitch()).unwrap()
}

pub fn arm_mask(curve: &[Point], spur: Option<&[Point]>, size: usize, pitch: f64) -> BinaryMask {
    let m = rasterize_polyline(curve, 2.0, size, size, pitch).unwrap();
    match spur {
        None => m,
        Some(sp) => union(&m, &rasterize_polyline(sp, 1.5, size, size, pitch).unwrap()),
    }
}

/// Vertical bar at `x0` with a leftward Gaussian bulge of `amp` px centred
/// at row `yb`. The analytic bend point is `(x0 - amp, yb)`.
pub fn hook_px(size: usize, x0: f64, amp: f64, yb: f64, sigma: f64) -> Vec<Point> {
    let (y0, y1) = (4.0, size as f64 - 6.0);
    let n = 400;
    (0..n)
        .map(|i| {
            let y = y0 + (y1 - y0) * i as f64 / (n - 1) as f64;
            Point::new(x0 - amp * gaussian(y, yb, sigma), y)
        })
        .collect()
}
