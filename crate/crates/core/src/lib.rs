//! Simulation and measurement of bend propagation along a tapered soft arm.
//!
//! * [`midline`]: centerline geometry and three-point curvature
//! * [`mask`]: binary masks to ordered midlines
//! * [`kinematics`]: bend-point velocity, curvature fields, profile classes
//! * [`rodsim`]: planar tapered-rod simulator with fluid drag
//! * [`config`], [`io`], [`experiment`]: run configuration, CSV tables and
//!   the simulate / extract / analyze / compare / sweep workflows
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod kinematics;
pub mod mask;
pub mod midline;
pub mod parallel;
pub mod rodsim;

pub use error::{Error, Result};
pub use kinematics::{
    bend_point, bend_velocity, classify_profile, curvature_field, normalize_profile,
    propagation_metrics, BendTrack, Classification, ClassifyThresholds, CurvatureField,
    MidlineSequence, ProfileClass, PropagationMetrics,
};
pub use midline::{arc_length, curvature_profile, resample_uniform, smooth, CurvatureProfile, Midline, Point};
pub use rodsim::{simulate, DriveProfile, RodModel};
