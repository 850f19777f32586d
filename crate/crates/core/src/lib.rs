//! Calibration of depth-sensor skeleton captures.
//!
//! The pipeline estimates the sensor's inclination from the lower spine,
//! removes the tilt and sensor-height offset from Y and Z, then estimates and
//! removes a height-dependent perspective drift of Y modelled as a polynomial
//! in joint height. [`diagnostics`] measures what is left and [`synthetic`]
//! builds captures with known distortions to check every stage against.

pub mod diagnostics;
pub mod formats;
pub mod numerics;
pub mod perspective;
pub mod pipeline;
pub mod skeleton;
pub mod synthetic;
pub mod tilt;

pub use numerics::{FitPoint, Polynomial};
pub use perspective::{BetaModel, BetaPoint};
pub use pipeline::{apply_profile, calibrate, CalibrationProfile, PipelineConfig, PipelineError};
pub use skeleton::{
    validate_sequence, CaptureSequence, GaitDirection, JointIndex, Point3, SkeletonEdge,
    SkeletonFrame,
};
pub use tilt::TiltParams;
