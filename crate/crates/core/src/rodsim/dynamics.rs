use super::drive::DriveProfile;
use super::model::Rod;
use crate::error::{Error, Result};
use crate::midline::Point;

/// Nodes driven kinematically by the base: the pivot and the node that fixes
/// the clamp angle.
pub const CLAMPED_NODES: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct RodState {
    pub x: Vec<Point>,
    pub v: Vec<Point>,
    pub t: f64,
}

impl RodState {
    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.v).all(|p| p.is_finite())
    }

    /// Largest relative deviation of a segment from its rest length.
    pub fn max_strain(&self, rest: f64) -> f64 {
        self.x
            .windows(2)
            .map(|w| (w[0].dist(w[1]) / rest - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Straight rod along +x from the pivot, at rest.
pub fn build_rod(rod: &Rod) -> RodState {
    let n = rod.n_nodes();
    RodState {
        x: (0..n).map(|i| Point::new(i as f64 * rod.rest, 0.0)).collect(),
        v: vec![Point::default(); n],
        t: 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    pub kinetic: f64,
    pub elastic: f64,
}

impl Energy {
    pub fn total(&self) -> f64 {
        self.kinetic + self.elastic
    }
}

fn perp(p: Point) -> Point {
    Point::new(-p.y, p.x)
}

/// Signed turning angle between consecutive segments.
fn turning_angle(e1: Point, e2: Point) -> f64 {
    e1.cross(e2).atan2(e1.dot(e2))
}

pub fn energy(state: &RodState, rod: &Rod) -> Energy {
    let kinetic = state
        .v
        .iter()
        .zip(&rod.node_mass)
        .map(|(v, m)| 0.5 * m * v.dot(*v))
        .sum();
    let axial: f64 = state
        .x
        .windows(2)
        .zip(&rod.axial_k)
        .map(|(w, k)| 0.5 * k * (w[0].dist(w[1]) - rod.rest).powi(2))
        .sum();
    let bending: f64 = (1..state.x.len() - 1)
        .map(|i| {
            let phi = turning_angle(state.x[i] - state.x[i - 1], state.x[i + 1] - state.x[i]);
            0.5 * rod.joint_stiffness[i] * phi * phi
        })
        .sum();
    Energy {
        kinetic,
        elastic: axial + bending,
    }
}

/// Net force on every node: axial springs and dashpots, discrete bending
/// moments, resistive drag, and optional gravity minus buoyancy.
pub fn forces(state: &RodState, rod: &Rod, out: &mut [Point]) {
    let m = &rod.model;
    let (x, v) = (&state.x, &state.v);
    let n = x.len();
    out.iter_mut().for_each(|f| *f = Point::default());
    let drag_scale = 0.5 * m.fluid_density * rod.rest;

    for j in 0..n - 1 {
        let e = x[j + 1] - x[j];
        let len = e.norm();
        let u = e * (1.0 / len);
        let dv = v[j + 1] - v[j];
        let axial = rod.axial_k[j] * (len - rod.rest) + m.internal_damping * dv.dot(u);
        let f = u * axial;
        out[j] = out[j] + f;
        out[j + 1] = out[j + 1] - f;

        if drag_scale > 0.0 {
            let vs = (v[j] + v[j + 1]) * 0.5;
            let vt = u * vs.dot(u);
            let vn = vs - vt;
            let d = rod.segment_diameter[j];
            let fd = vn * (-drag_scale * m.drag_normal * d * vn.norm())
                + vt * (-drag_scale * m.drag_tangent * d * vt.norm());
            let half = fd * 0.5;
            out[j] = out[j] + half;
            out[j + 1] = out[j + 1] + half;
        }
    }

    for i in 1..n - 1 {
        let e1 = x[i] - x[i - 1];
        let e2 = x[i + 1] - x[i];
        let phi = turning_angle(e1, e2);
        if phi == 0.0 {
            continue;
        }
        // dE/dphi times the gradient of phi
        let c = rod.joint_stiffness[i] * phi;
        let g1 = perp(e1) * (1.0 / e1.dot(e1));
        let g2 = perp(e2) * (1.0 / e2.dot(e2));
        out[i - 1] = out[i - 1] - g1 * c;
        out[i + 1] = out[i + 1] - g2 * c;
        out[i] = out[i] + (g1 + g2) * c;
    }

    if m.gravity_buoyancy {
        let dir = Point::new(m.gravity_tilt.sin(), -m.gravity_tilt.cos());
        let excess = (m.density - m.fluid_density) / m.density * m.gravity;
        for (f, mass) in out.iter_mut().zip(&rod.node_mass) {
            *f = *f + dir * (excess * mass);
        }
    }
}

/// Clamp the base nodes to the drive pose at time `t`.
pub fn clamp_base(x: &mut [Point], rod: &Rod, drive: &DriveProfile, t: f64) {
    let (p, theta) = drive.pose(t);
    x[0] = p;
    x[1] = p + Point::new(theta.cos(), theta.sin()) * rod.rest;
}

/// One semi-implicit Euler step: velocities from current forces, then
/// positions from the new velocities. Clamped nodes are placed on the drive
/// pose at the new time and get the matching finite-difference velocity.
#[allow(clippy::needless_range_loop)]
pub fn step(
    state: &mut RodState,
    rod: &Rod,
    drive: &DriveProfile,
    dt: f64,
    scratch: &mut Vec<Point>,
) {
    let n = state.x.len();
    scratch.resize(n, Point::default());
    forces(state, rod, scratch);
    for i in CLAMPED_NODES..n {
        state.v[i] = state.v[i] + scratch[i] * (dt / rod.node_mass[i]);
        state.x[i] = state.x[i] + state.v[i] * dt;
    }
    let t_new = state.t + dt;
    let before = [state.x[0], state.x[1]];
    clamp_base(&mut state.x, rod, drive, t_new);
    for i in 0..CLAMPED_NODES {
        state.v[i] = (state.x[i] - before[i]) * (1.0 / dt);
    }
    state.t = t_new;
}

/// Advance with a step count rather than accumulating `t += dt`, so runs with
/// the same inputs land on identical timestamps.
pub(crate) fn advance(
    state: &mut RodState,
    rod: &Rod,
    drive: &DriveProfile,
    t0: f64,
    dt: f64,
    steps: usize,
    scratch: &mut Vec<Point>,
) {
    for s in 0..steps {
        state.t = t0 + s as f64 * dt;
        step(state, rod, drive, dt, scratch);
    }
}

pub(crate) fn check_state(state: &RodState, rod: &Rod, max_strain: f64) -> Result<(), String> {
    if !state.is_finite() {
        return Err("non-finite node state".into());
    }
    let strain = state.max_strain(rod.rest);
    if strain > max_strain {
        return Err(format!(
            "segment strain {:.3}% exceeds {:.1}%",
            100.0 * strain,
            100.0 * max_strain
        ));
    }
    Ok(())
}

pub(crate) fn invalid_dt(dt: f64, bound: f64) -> Error {
    Error::invalid(format!(
        "integration step {dt} s exceeds the stability bound {bound} s"
    ))
}
