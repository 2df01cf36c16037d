//! Bend-point tracking, velocity profiles, curvature fields and the
//! monotonic-decay / bell-shaped profile classifier.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::midline::{processed_profile, smooth, Midline, Point, DEFAULT_SMOOTH_WINDOW};
use crate::parallel;

/// Number of points on the shared overlay grid for normalized profiles.
pub const OVERLAY_POINTS: usize = 101;

/// Frames sampled at multiples of a fixed interval. Frame `i` need not be at
/// `i * dt` (extraction may leave gaps) but every timestamp is an integer
/// multiple of `dt` (to within a millionth of `dt`) and timestamps strictly
/// increase.
#[derive(Debug, Clone, PartialEq)]
pub struct MidlineSequence {
    frames: Vec<Midline>,
    dt: f64,
}

impl MidlineSequence {
    pub fn new(frames: Vec<Midline>, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("frame interval must be > 0, got {dt}")));
        }
        if frames.is_empty() {
            return Err(Error::EmptySequence("sequence has no frames".into()));
        }
        let mut last = None;
        for (i, f) in frames.iter().enumerate() {
            let k = (f.t() / dt).round();
            if k < 0.0 || (f.t() - k * dt).abs() > 1e-6 * dt {
                return Err(Error::invalid(format!(
                    "frame {i} at t = {} is not a multiple of dt = {dt}",
                    f.t()
                )));
            }
            if last.is_some_and(|l| k <= l) {
                return Err(Error::invalid(format!("frame {i} is out of time order")));
            }
            last = Some(k);
        }
        Ok(MidlineSequence { frames, dt })
    }

    /// Frames at `t = i * dt`, overriding whatever timestamps they carried.
    pub fn contiguous(frames: Vec<Midline>, dt: f64) -> Result<Self> {
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.with_time(i as f64 * dt))
            .collect();
        Self::new(frames, dt)
    }

    pub fn frames(&self) -> &[Midline] {
        &self.frames
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Sample index (`t / dt`) of frame `i`.
    pub fn frame_index(&self, i: usize) -> u64 {
        (self.frames[i].t() / self.dt).round() as u64
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(Midline::t).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BendPoint {
    pub point: Point,
    pub index: usize,
    /// The minimum sits on the base or the tip rather than inside the arm.
    pub boundary: bool,
}

/// Midline point with the smallest x; the earliest index wins ties.
pub fn bend_point(m: &Midline) -> BendPoint {
    let pts = m.points();
    let mut best = 0;
    for (i, p) in pts.iter().enumerate().skip(1) {
        if p.x < pts[best].x {
            best = i;
        }
    }
    BendPoint {
        point: pts[best],
        index: best,
        boundary: best == 0 || best == pts.len() - 1,
    }
}

/// How the bend point is located on each frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BendLocator {
    /// The midline vertex with minimum x.
    #[default]
    Vertex,
    /// The minimum of the quadratic through the minimum vertex and its two
    /// neighbors. Removes the stair-step jumps a vertex-bound bend point
    /// makes as it hands over from one node to the next.
    Parabolic,
    /// [`BendLocator::Parabolic`] on the midline after a moving average of
    /// this many points, which splits ties along pixel-quantized runs.
    Smoothed(usize),
}

impl BendLocator {
    pub fn locate(self, m: &Midline) -> BendPoint {
        match self {
            BendLocator::Vertex => bend_point(m),
            BendLocator::Parabolic => bend_point_refined(m),
            BendLocator::Smoothed(w) => {
                let w = w.min(m.len() - 1 + m.len() % 2).max(1);
                let w = if w % 2 == 0 { w - 1 } else { w };
                match smooth(m, w) {
                    Ok(s) => bend_point_refined(&s),
                    Err(_) => bend_point_refined(m),
                }
            }
        }
    }
}

/// Sub-vertex refinement of [`bend_point`]; falls back to the vertex at the
/// ends of the midline.
pub fn bend_point_refined(m: &Midline) -> BendPoint {
    let b = bend_point(m);
    if b.boundary {
        return b;
    }
    let pts = m.points();
    let (p0, p1, p2) = (pts[b.index - 1], pts[b.index], pts[b.index + 1]);
    let curv = p2.x - 2.0 * p1.x + p0.x;
    if !(curv > 0.0) {
        return b;
    }
    let u = (-(p2.x - p0.x) / (2.0 * curv)).clamp(-0.5, 0.5);
    // quadratic Lagrange interpolation at u in [-1, 1]
    let (w0, w1, w2) = (0.5 * u * (u - 1.0), 1.0 - u * u, 0.5 * u * (u + 1.0));
    BendPoint {
        point: Point::new(
            w0 * p0.x + w1 * p1.x + w2 * p2.x,
            w0 * p0.y + w1 * p1.y + w2 * p2.y,
        ),
        ..b
    }
}

/// Bend-point trajectory. `vx` and `speed` are forward differences, one per
/// frame pair, stamped with the earlier frame's time in `t_velocity`.
#[derive(Debug, Clone, PartialEq)]
pub struct BendTrack {
    pub t: Vec<f64>,
    pub positions: Vec<Point>,
    pub indices: Vec<usize>,
    pub boundary: Vec<bool>,
    pub vx: Vec<f64>,
    pub speed: Vec<f64>,
    pub t_norm: Vec<f64>,
    pub v_norm: Vec<f64>,
}

impl BendTrack {
    pub fn t_velocity(&self) -> &[f64] {
        &self.t[..self.speed.len()]
    }

    pub fn is_normalized(&self) -> bool {
        !self.v_norm.is_empty()
    }

    /// Restrict to frames `range` (velocities follow along).
    pub fn slice(&self, range: std::ops::Range<usize>) -> BendTrack {
        let vr = range.start..range.end.saturating_sub(1).max(range.start);
        BendTrack {
            t: self.t[range.clone()].to_vec(),
            positions: self.positions[range.clone()].to_vec(),
            indices: self.indices[range.clone()].to_vec(),
            boundary: self.boundary[range].to_vec(),
            vx: self.vx[vr.clone()].to_vec(),
            speed: self.speed[vr].to_vec(),
            t_norm: Vec::new(),
            v_norm: Vec::new(),
        }
    }

    /// Frames from the first to the last interior bend point, i.e. the span
    /// during which a bend is actually present on the arm.
    pub fn interior_window(&self) -> Option<std::ops::Range<usize>> {
        let first = self.boundary.iter().position(|&b| !b)?;
        let last = self.boundary.iter().rposition(|&b| !b)?;
        Some(first..last + 1)
    }
}

pub fn bend_velocity(seq: &MidlineSequence) -> Result<BendTrack> {
    bend_velocity_with(seq, BendLocator::Vertex)
}

pub fn bend_velocity_with(seq: &MidlineSequence, locator: BendLocator) -> Result<BendTrack> {
    if seq.len() < 2 {
        return Err(Error::invalid(format!(
            "bend velocity needs at least 2 frames, got {}",
            seq.len()
        )));
    }
    let bends: Vec<BendPoint> = seq.frames().iter().map(|m| locator.locate(m)).collect();
    let t = seq.times();
    let positions: Vec<Point> = bends.iter().map(|b| b.point).collect();
    let mut vx = Vec::with_capacity(bends.len() - 1);
    let mut speed = Vec::with_capacity(bends.len() - 1);
    for i in 0..positions.len() - 1 {
        let h = t[i + 1] - t[i];
        let d = positions[i + 1] - positions[i];
        vx.push(d.x / h);
        speed.push(d.norm() / h);
    }
    Ok(BendTrack {
        t,
        indices: bends.iter().map(|b| b.index).collect(),
        boundary: bends.iter().map(|b| b.boundary).collect(),
        positions,
        vx,
        speed,
        t_norm: Vec::new(),
        v_norm: Vec::new(),
    })
}

/// Fill `v_norm = speed / max(speed)` and `t_norm` (sample times mapped
/// affinely onto [0, 1]).
pub fn normalize_profile(track: &BendTrack) -> Result<BendTrack> {
    let n = track.speed.len();
    if n < 3 {
        return Err(Error::DegenerateProfile(format!(
            "need at least 3 velocity samples, got {n}"
        )));
    }
    let vmax = track.speed.iter().copied().fold(0.0, f64::max);
    if !(vmax > 0.0) || !vmax.is_finite() {
        return Err(Error::DegenerateProfile("bend point never moves".into()));
    }
    let tv = track.t_velocity();
    let (t0, t1) = (tv[0], tv[n - 1]);
    let mut out = track.clone();
    out.v_norm = track.speed.iter().map(|s| s / vmax).collect();
    out.t_norm = tv.iter().map(|t| (t - t0) / (t1 - t0)).collect();
    Ok(out)
}

/// Linear interpolation of the normalized profile onto `OVERLAY_POINTS`
/// equally spaced abscissae in [0, 1].
pub fn overlay_profile(track: &BendTrack) -> Result<Vec<f64>> {
    if !track.is_normalized() {
        return Err(Error::DegenerateProfile("profile is not normalized".into()));
    }
    let (tn, vn) = (&track.t_norm, &track.v_norm);
    let mut j = 0;
    Ok((0..OVERLAY_POINTS)
        .map(|k| {
            let x = k as f64 / (OVERLAY_POINTS - 1) as f64;
            while j + 2 < tn.len() && tn[j + 1] < x {
                j += 1;
            }
            let frac = ((x - tn[j]) / (tn[j + 1] - tn[j])).clamp(0.0, 1.0);
            vn[j] + frac * (vn[j + 1] - vn[j])
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileClass {
    MonotonicDecay,
    BellShaped,
    Other,
}

impl ProfileClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileClass::MonotonicDecay => "monotonic-decay",
            ProfileClass::BellShaped => "bell-shaped",
            ProfileClass::Other => "other",
        }
    }
}

impl fmt::Display for ProfileClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProfileClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monotonic-decay" => Ok(ProfileClass::MonotonicDecay),
            "bell-shaped" => Ok(ProfileClass::BellShaped),
            "other" => Ok(ProfileClass::Other),
            _ => Err(Error::Parse(format!("unknown profile class `{s}`"))),
        }
    }
}

/// Thresholds for [`classify_profile`]; fractions of the profile length or
/// of the peak speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyThresholds {
    pub decay_peak_max: f64,
    pub decay_fall_min: f64,
    pub bell_peak_min: f64,
    pub bell_peak_max: f64,
    pub bell_monotone_min: f64,
    pub noise: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds {
            decay_peak_max: 0.10,
            decay_fall_min: 0.90,
            bell_peak_min: 0.20,
            bell_peak_max: 0.80,
            bell_monotone_min: 0.80,
            noise: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub class: ProfileClass,
    pub peak_index: usize,
    /// Peak position as a fraction of the profile, `peak_index / (n - 1)`.
    pub peak_position: f64,
    /// Fraction of pre-peak differences that rise (>= -noise).
    pub rise_fraction: f64,
    /// Fraction of post-peak differences that fall (<= noise).
    pub fall_fraction: f64,
}

pub fn classify_profile(track: &BendTrack, th: &ClassifyThresholds) -> Classification {
    let v = &track.v_norm;
    let n = v.len();
    if n < 2 {
        return Classification {
            class: ProfileClass::Other,
            peak_index: 0,
            peak_position: 0.0,
            rise_fraction: 0.0,
            fall_fraction: 0.0,
        };
    }
    let mut peak = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[peak] {
            peak = i;
        }
    }
    let peak_position = peak as f64 / (n - 1) as f64;
    let fraction = |range: std::ops::Range<usize>, ok: &dyn Fn(f64) -> bool| {
        if range.is_empty() {
            return 0.0;
        }
        let len = range.len();
        range.filter(|&k| ok(v[k + 1] - v[k])).count() as f64 / len as f64
    };
    let rise_fraction = fraction(0..peak, &|d| d >= -th.noise);
    let fall_fraction = fraction(peak..n - 1, &|d| d <= th.noise);
    let class = if peak_position <= th.decay_peak_max && fall_fraction >= th.decay_fall_min {
        ProfileClass::MonotonicDecay
    } else if (th.bell_peak_min..=th.bell_peak_max).contains(&peak_position)
        && rise_fraction >= th.bell_monotone_min
        && fall_fraction >= th.bell_monotone_min
    {
        ProfileClass::BellShaped
    } else {
        ProfileClass::Other
    };
    Classification {
        class,
        peak_index: peak,
        peak_position,
        rise_fraction,
        fall_fraction,
    }
}

/// Frame-by-station curvature matrix on a shared `s / L0` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    pub t: Vec<f64>,
    pub stations: Vec<f64>,
    pub kappa: Vec<Vec<f64>>,
}

impl CurvatureField {
    pub fn max(&self) -> f64 {
        self.kappa
            .iter()
            .flatten()
            .copied()
            .fold(0.0, f64::max)
    }
}

/// Uniform station grid `k / (n - 1)`.
pub fn station_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
}

pub fn curvature_field(seq: &MidlineSequence, n_stations: usize) -> Result<CurvatureField> {
    curvature_field_with(seq, n_stations, DEFAULT_SMOOTH_WINDOW)
}

/// Smooth, resample and take three-point curvature on every frame.
pub fn curvature_field_with(
    seq: &MidlineSequence,
    n_stations: usize,
    window: usize,
) -> Result<CurvatureField> {
    if n_stations < 3 {
        return Err(Error::invalid(format!("need at least 3 stations, got {n_stations}")));
    }
    let rows = parallel::map(seq.frames(), |m| {
        processed_profile(m, window, n_stations).map(|p| p.kappa)
    });
    Ok(CurvatureField {
        t: seq.times(),
        stations: station_grid(n_stations),
        kappa: rows.into_iter().collect::<Result<_>>()?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationMetrics {
    pub peak_kappa: Vec<f64>,
    pub peak_station: Vec<f64>,
    /// Furthest station reached by a peak at or above `threshold`.
    pub extent: f64,
    /// Least-squares slope of peak station against time over the frames
    /// whose peak is at or above `threshold`, in (s/L0)/s.
    pub drift_rate: f64,
    pub threshold: f64,
    pub global_max: f64,
}

/// Fraction of the global maximum a frame peak must reach to count.
pub const PEAK_THRESHOLD_FRACTION: f64 = 0.10;

pub fn propagation_metrics(field: &CurvatureField) -> Result<PropagationMetrics> {
    let global_max = field.max();
    if !(global_max > 0.0) {
        return Err(Error::DegenerateField("curvature field is identically zero".into()));
    }
    let threshold = PEAK_THRESHOLD_FRACTION * global_max;
    let st = &field.stations;
    let mut peak_kappa = Vec::with_capacity(field.kappa.len());
    let mut peak_station = Vec::with_capacity(field.kappa.len());
    let mut refined = Vec::new();
    for (row, &t) in field.kappa.iter().zip(&field.t) {
        let mut j = 0;
        for (k, &v) in row.iter().enumerate() {
            if v > row[j] {
                j = k;
            }
        }
        peak_kappa.push(row[j]);
        peak_station.push(st[j]);
        if row[j] >= threshold {
            refined.push((t, refine_peak(row, st, j)));
        }
    }
    let extent = peak_kappa
        .iter()
        .zip(&peak_station)
        .filter(|(k, _)| **k >= threshold)
        .map(|(_, s)| *s)
        .fold(0.0, f64::max);
    Ok(PropagationMetrics {
        peak_kappa,
        peak_station,
        extent,
        drift_rate: slope(&refined),
        threshold,
        global_max,
    })
}

/// Vertex of the parabola through the peak sample and its neighbors.
fn refine_peak(row: &[f64], st: &[f64], j: usize) -> f64 {
    if j == 0 || j + 1 >= row.len() {
        return st[j];
    }
    let (a, b, c) = (row[j - 1], row[j], row[j + 1]);
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return st[j];
    }
    let offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
    st[j] + offset * (st[j + 1] - st[j - 1]) / 2.0
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
