use super::BinaryMask;
use crate::error::Result;
use crate::midline::Point;

/// Euclidean distance from `p` to the polyline through `pts`.
pub fn distance_to_polyline(p: Point, pts: &[Point]) -> f64 {
    match pts {
        [] => f64::INFINITY,
        [only] => p.dist(*only),
        _ => pts
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let ab = b - a;
                let len2 = ab.dot(ab);
                let t = if len2 > 0.0 {
                    ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                p.dist(a + ab * t)
            })
            .fold(f64::INFINITY, f64::min),
    }
}

/// Foreground every pixel whose center lies within `half_width` pixels of the
/// polyline. Coordinates are in pixels; pixel `(x, y)` has its center at
/// `(x, y)`.
pub fn rasterize_polyline(
    pts: &[Point],
    half_width: f64,
    width: usize,
    height: usize,
    pitch: f64,
) -> Result<BinaryMask> {
    let mut m = BinaryMask::empty(width, height, pitch)?;
    for y in 0..height {
        for x in 0..width {
            if distance_to_polyline(Point::new(x as f64, y as f64), pts) <= half_width {
                m.set(x, y, true);
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_cases() {
        let pts = [Point::new(0.0, 0.0), Point::new(10.0, 0.0)];
        assert_eq!(distance_to_polyline(Point::new(5.0, 3.0), &pts), 3.0);
        assert_eq!(distance_to_polyline(Point::new(-3.0, 4.0), &pts), 5.0);
    }

    #[test]
    fn raster_bar_width() {
        let pts = [Point::new(2.0, 5.0), Point::new(17.0, 5.0)];
        let m = rasterize_polyline(&pts, 1.5, 20, 11, 1.0).unwrap();
        // rows 4..=6 over x = 1..=18: the cap column reaches sqrt(2) < 1.5
        assert_eq!(m.count(), 3 * 18);
    }
}
