//! Two-stage calibration over a set of vertical calibration gaits, and
//! application of the resulting profile to any capture.

use thiserror::Error;

use crate::perspective::{
    self, BetaModel, BetaPoint, PerspectiveError, DEFAULT_BETA_JOINTS, DEFAULT_MIN_DEPTH_TRAVEL_M,
};
use crate::skeleton::{validate_sequence, CaptureSequence, GaitDirection, JointIndex, ModelError};
use crate::tilt::{self, TiltError, TiltParams};

/// Below this magnitude every gait mean is treated as an untilted sensor.
pub const TILT_NOISE_FLOOR_RAD: f64 = 1e-4;

pub const MIN_BETA_DEGREE: usize = 1;
pub const MAX_BETA_DEGREE: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("no calibration gaits given")]
    NoGaits,
    #[error("gait {index} is {direction}, calibration needs vertical gaits")]
    NotVertical {
        index: usize,
        direction: GaitDirection,
    },
    #[error("beta degree {0} outside [1, 6]")]
    InvalidDegree(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("validation stage: {0}")]
    Validation(#[from] ModelError),
    #[error("tilt stage: {0}")]
    Tilt(#[from] TiltError),
    #[error("perspective stage: {0}")]
    Perspective(#[from] PerspectiveError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub beta_degree: usize,
    pub beta_joints: Vec<JointIndex>,
    pub min_depth_travel_m: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            beta_degree: 2,
            beta_joints: DEFAULT_BETA_JOINTS.to_vec(),
            min_depth_travel_m: DEFAULT_MIN_DEPTH_TRAVEL_M,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(MIN_BETA_DEGREE..=MAX_BETA_DEGREE).contains(&self.beta_degree) {
            return Err(PipelineError::InvalidDegree(self.beta_degree));
        }
        if self.beta_joints.is_empty() {
            return Err(PipelineError::InvalidConfig("beta_joints is empty"));
        }
        if !(self.min_depth_travel_m.is_finite() && self.min_depth_travel_m >= 0.0) {
            return Err(PipelineError::InvalidConfig(
                "min_depth_travel_m must be >= 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationProfile {
    pub tilt: TiltParams,
    pub beta: BetaModel,
    pub gait_count: usize,
    pub created_label: String,
}

/// Tilt angle from the per-gait spine inclination means. Falls back to zero
/// when every mean sits below [`TILT_NOISE_FLOOR_RAD`].
pub fn estimate_tilt_angle(gaits: &[CaptureSequence]) -> Result<f64, TiltError> {
    let means = gaits
        .iter()
        .map(|g| tilt::gait_inclination(g).map(|gi| gi.mean))
        .collect::<Result<Vec<_>, _>>()?;
    if means.iter().all(|m| m.abs() < TILT_NOISE_FLOOR_RAD) {
        return Ok(0.0);
    }
    let lean = tilt::aggregate_inclination(&means)?;
    Ok(tilt::correction_angle_from_lean(lean))
}

/// Runs both calibration stages in order: inclination, tilt correction of
/// every gait, perspective degrees on the corrected gaits, polynomial fit.
pub fn calibrate(
    vertical_gaits: &[CaptureSequence],
    h_k: f64,
    config: &PipelineConfig,
) -> Result<CalibrationProfile, PipelineError> {
    config.validate()?;
    if vertical_gaits.is_empty() {
        return Err(PipelineError::NoGaits);
    }
    for (index, g) in vertical_gaits.iter().enumerate() {
        if g.direction != GaitDirection::Vertical {
            return Err(PipelineError::NotVertical {
                index,
                direction: g.direction,
            });
        }
        validate_sequence(g.clone())?;
    }

    let alpha_g = estimate_tilt_angle(vertical_gaits)?;
    let tilt = TiltParams::new(alpha_g, h_k)?;

    let corrected: Vec<CaptureSequence> = vertical_gaits
        .iter()
        .map(|g| tilt::tilt_correct_sequence(g, &tilt))
        .collect();
    let observed = perspective::mean_perspective_degrees(
        &corrected,
        &config.beta_joints,
        config.min_depth_travel_m,
    )?;
    let points: Vec<BetaPoint> = observed.iter().map(BetaPoint::as_correction).collect();
    let beta = perspective::fit_beta_model(&points, config.beta_degree)?;

    let labels: Vec<&str> = vertical_gaits.iter().map(|g| g.label.as_str()).collect();
    Ok(CalibrationProfile {
        tilt,
        beta,
        gait_count: vertical_gaits.len(),
        created_label: labels.join(","),
    })
}

/// Tilt correction followed by perspective correction.
///
/// Not idempotent: every application adds the sensor height again.
pub fn apply_profile(
    seq: &CaptureSequence,
    profile: &CalibrationProfile,
) -> Result<CaptureSequence, PipelineError> {
    let tilted = tilt::tilt_correct_sequence(seq, &profile.tilt);
    Ok(perspective::perspective_correct_sequence(
        &tilted,
        &profile.beta,
    )?)
}
