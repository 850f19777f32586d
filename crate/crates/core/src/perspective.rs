//! Height-dependent perspective degree: per-joint estimation from the first
//! and last frame of vertical gaits, the polynomial model in height, and the
//! Y correction it drives.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::numerics::{self, FitPoint, NumericsError, Polynomial};
use crate::skeleton::{CaptureSequence, GaitDirection, JointIndex, Point3};

pub const DEFAULT_MIN_DEPTH_TRAVEL_M: f64 = 0.05;

/// Head, neck, upper/mid/base spine, knees and ankles.
pub const DEFAULT_BETA_JOINTS: [JointIndex; 9] = [
    JointIndex::HEAD,
    JointIndex::NECK,
    JointIndex::SPINE_SHOULDER,
    JointIndex::SPINE_MID,
    JointIndex::SPINE_BASE,
    JointIndex::KNEE_LEFT,
    JointIndex::KNEE_RIGHT,
    JointIndex::ANKLE_LEFT,
    JointIndex::ANKLE_RIGHT,
];

const TAN_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerspectiveError {
    #[error("joint {joint} travels only {dz} m in depth")]
    InsufficientDepthTravel { joint: JointIndex, dz: f64 },
    #[error("perspective degrees need a vertical gait, got {0}")]
    WrongDirection(GaitDirection),
    #[error("sequence has {0} frames, need at least 2")]
    TooFewFrames(usize),
    #[error("no calibration gaits given")]
    NoGaits,
    #[error("joint {0} is not usable in any gait")]
    NoUsableGaits(JointIndex),
    #[error("perspective degree {beta} rad at height {y} m is out of range")]
    BetaOutOfRange { y: f64, beta: f64 },
    #[error("beta model is inconsistent: {0}")]
    InvalidModel(&'static str),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Mean perspective degree of one joint, placed at that joint's height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPoint {
    pub joint: JointIndex,
    pub height_y: f64,
    pub beta: f64,
}

impl BetaPoint {
    /// The angle the Y correction must use to cancel the observed drift.
    ///
    /// A joint whose Y falls by `z·tan(b)` with depth `z` shows a first-to-last
    /// drift angle of `-b`, while the correction adds `z·tan(b)`.
    pub fn as_correction(&self) -> BetaPoint {
        BetaPoint {
            beta: -self.beta,
            ..*self
        }
    }
}

/// Fitted perspective polynomial: height Y (m) → angle (rad).
#[derive(Debug, Clone, PartialEq)]
pub struct BetaModel {
    poly: Polynomial,
    source_points: Vec<BetaPoint>,
}

impl BetaModel {
    pub fn new(poly: Polynomial, source_points: Vec<BetaPoint>) -> Result<Self, PerspectiveError> {
        if source_points.len() <= poly.degree() {
            return Err(PerspectiveError::InvalidModel(
                "fewer source points than coefficients",
            ));
        }
        if source_points
            .iter()
            .any(|p| !p.beta.is_finite() || p.beta.abs() >= FRAC_PI_2 || !p.height_y.is_finite())
        {
            return Err(PerspectiveError::InvalidModel("source point out of range"));
        }
        Ok(BetaModel {
            poly,
            source_points,
        })
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn fit_degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn source_points(&self) -> &[BetaPoint] {
        &self.source_points
    }
}

/// Drift angle of joint `j` between the first and last frame:
/// `atan((y_first - y_last) / (z_first - z_last))`.
pub fn joint_perspective_degree(
    seq: &CaptureSequence,
    j: JointIndex,
    min_depth_travel_m: f64,
) -> Result<f64, PerspectiveError> {
    if seq.direction != GaitDirection::Vertical {
        return Err(PerspectiveError::WrongDirection(seq.direction));
    }
    let (first, last) = match (seq.first(), seq.last()) {
        (Some(f), Some(l)) if seq.len() >= 2 => (f.joint(j), l.joint(j)),
        _ => return Err(PerspectiveError::TooFewFrames(seq.len())),
    };
    let dz = first.z - last.z;
    if dz.abs() <= min_depth_travel_m {
        return Err(PerspectiveError::InsufficientDepthTravel { joint: j, dz });
    }
    Ok(((first.y - last.y) / dz).atan())
}

/// Per-joint mean of the drift angle over the gaits where it is computable,
/// ordered from the highest joint to the lowest.
///
/// `height_y` is the joint's mean Y over every frame of every gait.
pub fn mean_perspective_degrees(
    seqs: &[CaptureSequence],
    joints: &[JointIndex],
    min_depth_travel_m: f64,
) -> Result<Vec<BetaPoint>, PerspectiveError> {
    if seqs.is_empty() {
        return Err(PerspectiveError::NoGaits);
    }
    if let Some(s) = seqs.iter().find(|s| s.direction != GaitDirection::Vertical) {
        return Err(PerspectiveError::WrongDirection(s.direction));
    }

    let mut points = Vec::with_capacity(joints.len());
    for &j in joints {
        let mut betas = Vec::with_capacity(seqs.len());
        for seq in seqs {
            match joint_perspective_degree(seq, j, min_depth_travel_m) {
                Ok(b) => betas.push(b),
                Err(PerspectiveError::InsufficientDepthTravel { .. })
                | Err(PerspectiveError::TooFewFrames(_)) => {}
                Err(e) => return Err(e),
            }
        }
        if betas.is_empty() {
            return Err(PerspectiveError::NoUsableGaits(j));
        }
        let heights: Vec<f64> = seqs
            .iter()
            .flat_map(|s| s.frames.iter().map(move |f| f.joint(j).y))
            .collect();
        points.push(BetaPoint {
            joint: j,
            height_y: numerics::arithmetic_mean(&heights)?,
            beta: numerics::arithmetic_mean(&betas)?,
        });
    }
    points.sort_by(|a, b| b.height_y.total_cmp(&a.height_y));
    Ok(points)
}

pub fn fit_beta_model(points: &[BetaPoint], degree: usize) -> Result<BetaModel, PerspectiveError> {
    let samples: Vec<FitPoint> = points
        .iter()
        .map(|p| FitPoint::new(p.height_y, p.beta))
        .collect();
    let poly = numerics::polyfit_least_squares(&samples, degree)?;
    BetaModel::new(poly, points.to_vec())
}

/// Y correction with an explicit polynomial; the angle is evaluated at the
/// incoming Y.
pub fn perspective_correct_point_with(
    p: &Point3,
    poly: &Polynomial,
) -> Result<Point3, PerspectiveError> {
    let beta = poly.eval(p.y);
    if !beta.is_finite() || beta.abs() >= FRAC_PI_2 - TAN_GUARD {
        return Err(PerspectiveError::BetaOutOfRange { y: p.y, beta });
    }
    Ok(Point3::new(p.x, p.y + p.z * beta.tan(), p.z))
}

pub fn perspective_correct_point(
    p: &Point3,
    model: &BetaModel,
) -> Result<Point3, PerspectiveError> {
    perspective_correct_point_with(p, &model.poly)
}

pub fn perspective_correct_sequence(
    seq: &CaptureSequence,
    model: &BetaModel,
) -> Result<CaptureSequence, PerspectiveError> {
    seq.try_map_points(|p| perspective_correct_point(p, model))
}
