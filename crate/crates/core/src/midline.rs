//! Planar arm centerlines and the geometry computed on them: arc length,
//! smoothing, uniform resampling and three-point (circumcircle) curvature.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Default moving-average window, in points.
pub const DEFAULT_SMOOTH_WINDOW: usize = 5;
/// Default number of arc-length stations.
pub const DEFAULT_STATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + t * (o.x - self.x), self.y + t * (o.y - self.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// One frame's centerline, ordered base to tip, coordinates in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Midline {
    points: Vec<Point>,
    t: f64,
}

impl Midline {
    /// Validates the point list: at least three finite points and no two
    /// consecutive points coincident.
    pub fn new(points: Vec<Point>, t: f64) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::invalid(format!(
                "midline needs at least 3 points, got {}",
                points.len()
            )));
        }
        if !t.is_finite() {
            return Err(Error::invalid("midline timestamp is not finite"));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::invalid(format!("midline point {i} is not finite")));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::DegenerateGeometry(format!(
                "midline points {i} and {} coincide",
                i + 1
            )));
        }
        Ok(Midline { points, t })
    }

    pub fn from_xy(xy: &[(f64, f64)], t: f64) -> Result<Self> {
        Self::new(xy.iter().map(|&(x, y)| Point::new(x, y)).collect(), t)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Same points, tip first.
    pub fn reversed(&self) -> Midline {
        let mut points = self.points.clone();
        points.reverse();
        Midline { points, t: self.t }
    }

    /// Apply `f` to every point and revalidate.
    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> Result<Midline> {
        Midline::new(self.points.iter().map(|&p| f(p)).collect(), self.t)
    }

    /// Cumulative arc length at each point, starting at 0.
    pub fn cumulative_lengths(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.points.len());
        out.push(0.0);
        for w in self.points.windows(2) {
            acc += w[0].dist(w[1]);
            out.push(acc);
        }
        out
    }
}

/// Curvature sampled at normalized arc-length stations.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    pub stations: Vec<f64>,
    pub kappa: Vec<f64>,
}

/// Total polyline length in meters.
pub fn arc_length(m: &Midline) -> f64 {
    m.points.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// `n` points at equal arc-length spacing along `m`. The endpoints are
/// copied from the input so they match bit for bit.
pub fn resample_uniform(m: &Midline, n: usize) -> Result<Midline> {
    if n < 3 {
        return Err(Error::invalid(format!("resample count must be >= 3, got {n}")));
    }
    let cum = m.cumulative_lengths();
    let total = *cum.last().unwrap();
    let pts = &m.points;
    let mut out = Vec::with_capacity(n);
    out.push(pts[0]);
    let mut seg = 0;
    for k in 1..n - 1 {
        let target = total * k as f64 / (n - 1) as f64;
        while seg + 2 < cum.len() && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let frac = ((target - cum[seg]) / span).clamp(0.0, 1.0);
        out.push(pts[seg].lerp(pts[seg + 1], frac));
    }
    out.push(*pts.last().unwrap());
    Midline::new(out, m.t)
}

/// Centered moving average with a window that shrinks symmetrically near the
/// ends, so the first and last points are left untouched.
pub fn smooth(m: &Midline, window: usize) -> Result<Midline> {
    let n = m.len();
    if window == 0 || window.is_multiple_of(2) || window > n {
        return Err(Error::invalid(format!(
            "smoothing window must be odd and in 1..={n}, got {window}"
        )));
    }
    if window == 1 {
        return Ok(m.clone());
    }
    let half = window / 2;
    let pts = &m.points;
    let out = (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            if h == 0 {
                return pts[i];
            }
            let slice = &pts[i - h..=i + h];
            let k = slice.len() as f64;
            let sx: f64 = slice.iter().map(|p| p.x).sum();
            let sy: f64 = slice.iter().map(|p| p.y).sum();
            Point::new(sx / k, sy / k)
        })
        .collect();
    Midline::new(out, m.t)
}

/// Curvature of the circle through three points, `1 / R`. Collinear
/// triplets give exactly zero.
pub fn circumcurvature(a: Point, b: Point, c: Point) -> Result<f64> {
    let ab = a.dist(b);
    let bc = b.dist(c);
    let ca = c.dist(a);
    if ab == 0.0 || bc == 0.0 || ca == 0.0 {
        return Err(Error::DegenerateGeometry(
            "coincident points in curvature triplet".into(),
        ));
    }
    // 4 * triangle area / product of side lengths
    let twice_area = (b - a).cross(c - a).abs();
    Ok(2.0 * twice_area / (ab * bc * ca))
}

/// Three-point curvature at every point of an (already resampled) midline.
/// Endpoints take the value of their interior neighbor.
pub fn curvature_profile(m: &Midline) -> Result<CurvatureProfile> {
    let pts = &m.points;
    let n = pts.len();
    let mut kappa = vec![0.0; n];
    for i in 1..n - 1 {
        kappa[i] = circumcurvature(pts[i - 1], pts[i], pts[i + 1])?;
    }
    kappa[0] = kappa[1];
    kappa[n - 1] = kappa[n - 2];
    let cum = m.cumulative_lengths();
    let total = cum[n - 1];
    let stations = cum.iter().map(|s| s / total).collect();
    Ok(CurvatureProfile { stations, kappa })
}

/// Smooth, resample to `n_stations`, then take the curvature profile.
pub fn processed_profile(m: &Midline, window: usize, n_stations: usize) -> Result<CurvatureProfile> {
    let w = window.min(if m.len().is_multiple_of(2) { m.len() - 1 } else { m.len() });
    let smoothed = smooth(m, w)?;
    curvature_profile(&resample_uniform(&smoothed, n_stations)?)
}
