//! Planar lumped-mass model of a tapered soft arm: stiff axial springs,
//! discrete bending moments, quadratic resistive drag and a kinematically
//! driven clamped base, integrated with semi-implicit Euler.

mod drive;
mod dynamics;
mod model;

pub use drive::{rpm_to_rad_per_s, BasePose, DriveMode, DriveProfile};
pub use dynamics::{build_rod, clamp_base, energy, forces, step, Energy, RodState, CLAMPED_NODES};
pub use model::{Material, Medium, Rod, RodModel};

use crate::error::{Divergence, Error, Result};
use crate::kinematics::MidlineSequence;
use crate::midline::{Midline, Point};

/// Segment strain beyond which a run is reported as diverged.
pub const MAX_STRAIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub duration: f64,
    pub output_dt: f64,
    /// Integration step; `None` picks the largest step that is within the
    /// stability bound and divides `output_dt` evenly.
    pub dt: Option<f64>,
}

impl SimSettings {
    pub fn new(duration: f64, output_dt: f64) -> Self {
        SimSettings {
            duration,
            output_dt,
            dt: None,
        }
    }
}

/// Output of [`simulate_run`]: the midline frames plus per-frame energy.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub sequence: MidlineSequence,
    pub energy: Vec<Energy>,
    pub dt: f64,
    pub steps: u64,
    pub drive_end: f64,
    pub max_strain: f64,
}

/// Number of output frames for a run: `round(duration / output_dt)`, at
/// least one.
pub fn frame_count(duration: f64, output_dt: f64) -> usize {
    ((duration / output_dt).round() as usize).max(1)
}

fn to_midline(state: &RodState, t: f64) -> Result<Midline> {
    Midline::new(state.x.clone(), t)
}

pub fn simulate(
    model: &RodModel,
    drive: &DriveProfile,
    duration: f64,
    output_dt: f64,
) -> Result<MidlineSequence> {
    simulate_run(model, drive, &SimSettings::new(duration, output_dt)).map(|r| r.sequence)
}

pub fn simulate_run(model: &RodModel, drive: &DriveProfile, settings: &SimSettings) -> Result<SimRun> {
    let rod = Rod::new(model.clone())?;
    drive.validate()?;
    let SimSettings {
        duration,
        output_dt,
        dt,
    } = *settings;
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::invalid(format!("duration must be > 0, got {duration}")));
    }
    if !(output_dt > 0.0 && output_dt.is_finite()) {
        return Err(Error::invalid(format!("output_dt must be > 0, got {output_dt}")));
    }
    let bound = rod.stable_dt();
    let dt_req = dt.unwrap_or(bound);
    if !(dt_req > 0.0) {
        return Err(Error::invalid(format!("integration step must be > 0, got {dt_req}")));
    }
    if dt_req > bound * (1.0 + 1e-12) {
        return Err(dynamics::invalid_dt(dt_req, bound));
    }
    if output_dt < dt_req * (1.0 - 1e-12) {
        return Err(Error::invalid(format!(
            "output_dt {output_dt} s is shorter than the integration step {dt_req} s"
        )));
    }
    let per_frame = (output_dt / dt_req - 1e-9).ceil().max(1.0) as usize;
    let dt = output_dt / per_frame as f64;

    let n_frames = frame_count(duration, output_dt);
    let mut state = build_rod(&rod);
    dynamics::clamp_base(&mut state.x, &rod, drive, 0.0);
    let mut scratch: Vec<Point> = Vec::new();
    let mut frames = Vec::with_capacity(n_frames);
    let mut energies = Vec::with_capacity(n_frames);
    let mut max_strain: f64 = 0.0;
    frames.push(to_midline(&state, 0.0)?);
    energies.push(energy(&state, &rod));

    for k in 1..n_frames {
        let t0 = (k - 1) as f64 * output_dt;
        dynamics::advance(&mut state, &rod, drive, t0, dt, per_frame, &mut scratch);
        let t = k as f64 * output_dt;
        state.t = t;
        let check = dynamics::check_state(&state, &rod, MAX_STRAIN)
            .and_then(|_| to_midline(&state, t).map_err(|e| e.to_string()));
        match check {
            Ok(m) => {
                max_strain = max_strain.max(state.max_strain(rod.rest));
                frames.push(m);
                energies.push(energy(&state, &rod));
            }
            Err(reason) => {
                return Err(Error::Diverged(Box::new(Divergence {
                    step: (k * per_frame) as u64,
                    time: t,
                    reason,
                    partial: frames,
                })));
            }
        }
    }
    Ok(SimRun {
        sequence: MidlineSequence::new(frames, output_dt)?,
        energy: energies,
        dt,
        steps: ((n_frames - 1) * per_frame) as u64,
        drive_end: drive.completion_time(),
        max_strain,
    })
}
