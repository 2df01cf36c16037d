use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::midline::Point;

/// Timestamped base pose: position of the base node and heading of the first
/// segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePose {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DriveMode {
    /// Rotation of the clamped base about the fixed pivot.
    RotarySweep,
    /// Imported base trajectory, applied relative to its first sample.
    PathSamples(Vec<BasePose>),
}

/// Prescribed motion of the clamped base.
///
/// The rotary sweep turns the base through `sweep_angle` with peak angular
/// speed `omega`. The speed ramps up and down with half-cosine profiles of
/// length `ramp_time` (shortened if the sweep is too small to fit both).
#[derive(Debug, Clone, PartialEq)]
pub struct DriveProfile {
    pub mode: DriveMode,
    pub omega: f64,
    pub sweep_angle: f64,
    pub ramp_time: f64,
}

pub fn rpm_to_rad_per_s(rpm: f64) -> f64 {
    rpm * 2.0 * PI / 60.0
}

impl DriveProfile {
    pub fn rotary(rpm: f64, sweep_angle: f64, ramp_time: f64) -> Result<Self> {
        let d = DriveProfile {
            mode: DriveMode::RotarySweep,
            omega: rpm_to_rad_per_s(rpm),
            sweep_angle,
            ramp_time,
        };
        d.validate()?;
        Ok(d)
    }

    /// Base held still.
    pub fn fixed() -> Self {
        DriveProfile {
            mode: DriveMode::RotarySweep,
            omega: 0.0,
            sweep_angle: 0.0,
            ramp_time: 0.0,
        }
    }

    pub fn path(samples: Vec<BasePose>) -> Result<Self> {
        let d = DriveProfile {
            mode: DriveMode::PathSamples(samples),
            omega: 0.0,
            sweep_angle: 0.0,
            ramp_time: 0.0,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return Err(Error::invalid(format!("omega must be >= 0, got {}", self.omega)));
        }
        if !(self.ramp_time >= 0.0 && self.ramp_time.is_finite()) {
            return Err(Error::invalid(format!(
                "ramp_time must be >= 0, got {}",
                self.ramp_time
            )));
        }
        if !self.sweep_angle.is_finite() {
            return Err(Error::invalid("sweep_angle must be finite"));
        }
        if let DriveMode::PathSamples(p) = &self.mode {
            if p.is_empty() {
                return Err(Error::invalid("base path has no samples"));
            }
            if p.iter().any(|s| !(s.t.is_finite() && s.x.is_finite() && s.y.is_finite() && s.theta.is_finite())) {
                return Err(Error::invalid("base path contains non-finite values"));
            }
            if let Some(i) = p.windows(2).position(|w| w[1].t <= w[0].t) {
                return Err(Error::invalid(format!(
                    "base path timestamps must strictly increase (row {})",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    fn ramp(&self) -> f64 {
        if self.omega == 0.0 {
            return 0.0;
        }
        self.ramp_time.min(self.sweep_angle.abs() / self.omega)
    }

    /// Time after which the base no longer moves.
    pub fn completion_time(&self) -> f64 {
        match &self.mode {
            DriveMode::RotarySweep => {
                if self.omega == 0.0 || self.sweep_angle == 0.0 {
                    0.0
                } else {
                    // two half ramps cover omega * ramp of angle in total
                    self.ramp() + self.sweep_angle.abs() / self.omega
                }
            }
            DriveMode::PathSamples(p) => p.last().map_or(0.0, |s| s.t - p[0].t),
        }
    }

    fn rotary_angle(&self, t: f64) -> f64 {
        let total = self.sweep_angle.abs();
        if self.omega == 0.0 || total == 0.0 || t <= 0.0 {
            return 0.0;
        }
        let w = self.omega;
        let tr = self.ramp();
        let end = self.completion_time();
        // angle covered t seconds into an up-ramp
        let ramp_angle = |t: f64| {
            if tr == 0.0 {
                0.0
            } else {
                w * (0.5 * t - tr / (2.0 * PI) * (PI * t / tr).sin())
            }
        };
        let a = if t >= end {
            total
        } else if t < tr {
            ramp_angle(t)
        } else if t <= end - tr {
            0.5 * w * tr + w * (t - tr)
        } else {
            total - ramp_angle(end - t)
        };
        a.min(total) * self.sweep_angle.signum()
    }

    /// Base node position and first-segment heading at time `t`.
    pub fn pose(&self, t: f64) -> (Point, f64) {
        match &self.mode {
            DriveMode::RotarySweep => (Point::default(), self.rotary_angle(t)),
            DriveMode::PathSamples(p) => {
                let p0 = p[0];
                let t = t + p0.t;
                let s = if t <= p0.t {
                    p0
                } else if t >= p[p.len() - 1].t {
                    p[p.len() - 1]
                } else {
                    let j = p.partition_point(|s| s.t <= t) - 1;
                    let (a, b) = (p[j], p[j + 1]);
                    let f = (t - a.t) / (b.t - a.t);
                    BasePose {
                        t,
                        x: a.x + f * (b.x - a.x),
                        y: a.y + f * (b.y - a.y),
                        theta: a.theta + f * (b.theta - a.theta),
                    }
                };
                (Point::new(s.x - p0.x, s.y - p0.y), s.theta - p0.theta)
            }
        }
    }
}
