//! Sensor inclination estimated from the two lower spine joints, and the
//! shear-style tilt plus height correction of Y and Z.
//!
//! Sign conventions: a frame's inclination is the spine segment's lean
//! `atan2(Δz, Δy)`, positive when higher joints read larger Z. The correction
//! angle `alpha_g` is the one the correction formulas consume; for an upright
//! subject it is the negated lean (see [`correction_angle_from_lean`]).

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::numerics::{self, NumericsError};
use crate::skeleton::{CaptureSequence, JointIndex, Point3, SkeletonFrame};

/// Minimum vertical extent of the spine segment for a usable frame.
pub const MIN_SPINE_DY_M: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TiltError {
    #[error("spine segment has vertical extent {dy} m at frame {frame}")]
    DegenerateSpine { frame: u64, dy: f64 },
    #[error("no frame of the gait has a usable spine segment")]
    NoUsableFrames,
    #[error("no gait inclinations given")]
    EmptyInput,
    #[error("gait inclinations have mixed signs")]
    MixedSignAngles,
    #[error("a gait inclination is exactly zero")]
    ZeroAngle,
    #[error("invalid tilt parameters: alpha_g = {alpha_g}, h_k = {h_k}")]
    InvalidParams { alpha_g: f64, h_k: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Inclination angle (radians) and sensor height above ground (meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltParams {
    alpha_g: f64,
    h_k: f64,
}

impl TiltParams {
    pub fn new(alpha_g: f64, h_k: f64) -> Result<Self, TiltError> {
        let ok = alpha_g.is_finite() && alpha_g.abs() < FRAC_PI_2 && h_k.is_finite() && h_k >= 0.0;
        if !ok {
            return Err(TiltError::InvalidParams { alpha_g, h_k });
        }
        Ok(TiltParams { alpha_g, h_k })
    }

    pub fn identity() -> Self {
        TiltParams {
            alpha_g: 0.0,
            h_k: 0.0,
        }
    }

    pub fn alpha_g(&self) -> f64 {
        self.alpha_g
    }

    pub fn h_k(&self) -> f64 {
        self.h_k
    }
}

/// Per-frame inclinations of one gait and their arithmetic mean.
#[derive(Debug, Clone, PartialEq)]
pub struct GaitInclination {
    pub per_frame: Vec<f64>,
    pub mean: f64,
}

/// Lean of the base-spine → mid-spine segment from vertical, in the YZ plane.
pub fn frame_inclination(frame: &SkeletonFrame) -> Result<f64, TiltError> {
    let base = frame.joint(JointIndex::SPINE_BASE);
    let mid = frame.joint(JointIndex::SPINE_MID);
    let dy = mid.y - base.y;
    if dy.abs() <= MIN_SPINE_DY_M {
        return Err(TiltError::DegenerateSpine {
            frame: frame.frame_index,
            dy,
        });
    }
    Ok((mid.z - base.z).atan2(dy))
}

/// Mean inclination over the usable frames of one gait. Degenerate frames are
/// skipped and do not count toward the mean.
pub fn gait_inclination(seq: &CaptureSequence) -> Result<GaitInclination, TiltError> {
    let per_frame: Vec<f64> = seq
        .frames
        .iter()
        .filter_map(|f| frame_inclination(f).ok())
        .collect();
    if per_frame.is_empty() {
        return Err(TiltError::NoUsableFrames);
    }
    let mean = numerics::arithmetic_mean(&per_frame)?;
    Ok(GaitInclination { per_frame, mean })
}

/// Geometric mean of the gait means, with their common sign reattached.
pub fn aggregate_inclination(gait_means: &[f64]) -> Result<f64, TiltError> {
    if gait_means.is_empty() {
        return Err(TiltError::EmptyInput);
    }
    if gait_means.contains(&0.0) {
        return Err(TiltError::ZeroAngle);
    }
    let positive = gait_means[0] > 0.0;
    if gait_means.iter().any(|&a| (a > 0.0) != positive) {
        return Err(TiltError::MixedSignAngles);
    }
    let magnitudes: Vec<f64> = gait_means.iter().map(|a| a.abs()).collect();
    let g = numerics::geometric_mean(&magnitudes)?;
    Ok(if positive { g } else { -g })
}

/// Converts a measured spine lean into the correction angle.
///
/// A sensor pitched by `alpha` makes an upright spine appear to lean by
/// `-alpha`, and the correction adds `y·sin(alpha)` back onto Z.
pub fn correction_angle_from_lean(lean: f64) -> f64 {
    -lean
}

/// Corrects Z first, then Y from the already-corrected Z plus the sensor
/// height. X is untouched.
pub fn tilt_correct_point(p: &Point3, params: &TiltParams) -> Point3 {
    let s = params.alpha_g.sin();
    let z = p.y * s + p.z;
    let y = z * s + p.y + params.h_k;
    Point3::new(p.x, y, z)
}

pub fn tilt_correct_sequence(seq: &CaptureSequence, params: &TiltParams) -> CaptureSequence {
    seq.map_points(|p| tilt_correct_point(p, params))
}
