//! Ground-truth skeleton captures and exactly invertible distortions.
//!
//! The truth frame is ground referenced: Y = 0 at the floor, Z is depth from
//! the sensor. Distortions are applied in the order perspective, tilt, noise,
//! so that the calibration chain (tilt correction, then perspective
//! correction) undoes them in reverse.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::numerics::Polynomial;
use crate::skeleton::{
    CaptureSequence, GaitDirection, JointIndex, Point3, SkeletonFrame, JOINT_COUNT, SKELETON_EDGES,
};

/// Lateral distance covered by a horizontal gait.
pub const HORIZONTAL_SPAN_M: f64 = 3.0;
/// Closest depth at which the sensor still tracks a full body.
pub const MIN_DEPTH_M: f64 = 0.8;
/// Largest perspective angle the fixed-point inversion is specified for.
pub const MAX_PERSPECTIVE_RAD: f64 = 5.0 * std::f64::consts::PI / 180.0;
pub const MAX_TILT_RAD: f64 = 0.5;

const FIXED_POINT_MAX_ITER: usize = 50;
const FIXED_POINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid body template: {0}")]
    InvalidTemplate(String),
    #[error("invalid distortion: {0}")]
    InvalidDistortion(String),
    #[error("perspective inversion did not converge at y = {y}, z = {z}")]
    FixedPointDivergence { y: f64, z: f64 },
    #[error("perspective angle {beta} rad at y = {y} exceeds 5 degrees")]
    PerspectiveOutOfRange { y: f64, beta: f64 },
}

/// Rigid standing body plus walking parameters.
///
/// Offsets are relative to the base of the spine in the body frame:
/// x lateral (left negative), y up, z forward.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyTemplate {
    pub offsets: [Point3; JOINT_COUNT],
    /// Distance covered by one full gait cycle (two steps).
    pub stride_length_m: f64,
    /// Peak hip flexion of each leg during walking.
    pub leg_swing_rad: f64,
    /// Peak shoulder flexion of each arm during walking.
    pub arm_swing_rad: f64,
}

impl Default for BodyTemplate {
    fn default() -> Self {
        let p = Point3::new;
        let offsets = [
            p(0.0, 0.0, 0.0),      // spine_base
            p(0.0, 0.28, 0.0),     // spine_mid
            p(0.0, 0.60, 0.0),     // neck
            p(0.0, 0.72, 0.0),     // head
            p(-0.18, 0.47, 0.0),   // shoulder_left
            p(-0.22, 0.20, 0.0),   // elbow_left
            p(-0.24, -0.04, 0.02), // wrist_left
            p(-0.24, -0.10, 0.03), // hand_left
            p(0.18, 0.47, 0.0),    // shoulder_right
            p(0.22, 0.20, 0.0),    // elbow_right
            p(0.24, -0.04, 0.02),  // wrist_right
            p(0.24, -0.10, 0.03),  // hand_right
            p(-0.09, -0.07, 0.0),  // hip_left
            p(-0.10, -0.50, 0.02), // knee_left
            p(-0.10, -0.88, 0.0),  // ankle_left
            p(-0.11, -0.95, 0.10), // foot_left
            p(0.09, -0.07, 0.0),   // hip_right
            p(0.10, -0.50, 0.02),  // knee_right
            p(0.10, -0.88, 0.0),   // ankle_right
            p(0.11, -0.95, 0.10),  // foot_right
            p(0.0, 0.52, 0.0),     // spine_shoulder
            p(-0.24, -0.18, 0.04), // hand_tip_left
            p(-0.21, -0.10, 0.07), // thumb_left
            p(0.24, -0.18, 0.04),  // hand_tip_right
            p(0.21, -0.10, 0.07),  // thumb_right
        ];
        BodyTemplate {
            offsets,
            stride_length_m: 1.5,
            leg_swing_rad: 8f64.to_radians(),
            arm_swing_rad: 6f64.to_radians(),
        }
    }
}

const LEFT_LEG: [JointIndex; 3] = [
    JointIndex::KNEE_LEFT,
    JointIndex::ANKLE_LEFT,
    JointIndex::FOOT_LEFT,
];
const RIGHT_LEG: [JointIndex; 3] = [
    JointIndex::KNEE_RIGHT,
    JointIndex::ANKLE_RIGHT,
    JointIndex::FOOT_RIGHT,
];
const LEFT_ARM: [JointIndex; 5] = [
    JointIndex::ELBOW_LEFT,
    JointIndex::WRIST_LEFT,
    JointIndex::HAND_LEFT,
    JointIndex::HAND_TIP_LEFT,
    JointIndex::THUMB_LEFT,
];
const RIGHT_ARM: [JointIndex; 5] = [
    JointIndex::ELBOW_RIGHT,
    JointIndex::WRIST_RIGHT,
    JointIndex::HAND_RIGHT,
    JointIndex::HAND_TIP_RIGHT,
    JointIndex::THUMB_RIGHT,
];

impl BodyTemplate {
    pub fn validate(&self) -> Result<(), SynthError> {
        let y = |j: JointIndex| self.offsets[j.index()].y;
        let column = [
            JointIndex::HEAD,
            JointIndex::NECK,
            JointIndex::SPINE_SHOULDER,
            JointIndex::SPINE_MID,
            JointIndex::SPINE_BASE,
        ];
        if column.windows(2).any(|w| y(w[0]) <= y(w[1])) {
            return Err(SynthError::InvalidTemplate(
                "spine column must rise from base to head".into(),
            ));
        }
        let base = self.offsets[JointIndex::SPINE_BASE.index()];
        let mid = self.offsets[JointIndex::SPINE_MID.index()];
        if base.z != mid.z || base.x != mid.x {
            return Err(SynthError::InvalidTemplate(
                "lower spine segment must be upright".into(),
            ));
        }
        for e in SKELETON_EDGES {
            let len = self.offsets[e.parent.index()].distance(&self.offsets[e.child.index()]);
            if len.is_nan() || len <= 0.0 {
                return Err(SynthError::InvalidTemplate(format!(
                    "bone {e} has zero length"
                )));
            }
        }
        if self.stride_length_m.is_nan() || self.stride_length_m <= 0.0 {
            return Err(SynthError::InvalidTemplate(
                "stride length must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Body-frame pose at gait phase `phase` (in cycles), before ground contact.
    fn pose(&self, phase: f64) -> [Point3; JOINT_COUNT] {
        let swing = (2.0 * std::f64::consts::PI * phase).sin();
        let mut pose = self.offsets;
        let legs = [
            (
                JointIndex::HIP_LEFT,
                &LEFT_LEG[..],
                self.leg_swing_rad * swing,
            ),
            (
                JointIndex::HIP_RIGHT,
                &RIGHT_LEG[..],
                -self.leg_swing_rad * swing,
            ),
        ];
        let arms = [
            (
                JointIndex::SHOULDER_LEFT,
                &LEFT_ARM[..],
                -self.arm_swing_rad * swing,
            ),
            (
                JointIndex::SHOULDER_RIGHT,
                &RIGHT_ARM[..],
                self.arm_swing_rad * swing,
            ),
        ];
        for (pivot, chain, angle) in legs.into_iter().chain(arms) {
            let o = self.offsets[pivot.index()];
            for j in chain {
                pose[j.index()] = pitch_about(&self.offsets[j.index()], &o, angle);
            }
        }
        pose
    }
}

/// Rotates `p` about the lateral axis through `pivot`; positive angles swing
/// a hanging limb forward.
fn pitch_about(p: &Point3, pivot: &Point3, angle: f64) -> Point3 {
    let (s, c) = angle.sin_cos();
    let (dy, df) = (p.y - pivot.y, p.z - pivot.z);
    Point3::new(p.x, pivot.y + dy * c + df * s, pivot.z - dy * s + df * c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiltModel {
    /// Exact algebraic inverse of the shear correction.
    ShearInverse,
    /// Rigid rotation of (y, z) by -alpha about the sensor origin.
    Rotation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    pub tilt_model: TiltModel,
    pub alpha: f64,
    pub h_k: f64,
    pub beta_poly: Polynomial,
    pub noise_std_m: f64,
    pub seed: u64,
}

impl DistortionSpec {
    /// No tilt, no height, no perspective, no noise.
    pub fn none() -> Self {
        DistortionSpec {
            tilt_model: TiltModel::ShearInverse,
            alpha: 0.0,
            h_k: 0.0,
            beta_poly: Polynomial::zero(0),
            noise_std_m: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.alpha.is_finite() && self.alpha.abs() < MAX_TILT_RAD) {
            return Err(SynthError::InvalidDistortion(format!(
                "|alpha| = {} must be below {MAX_TILT_RAD}",
                self.alpha.abs()
            )));
        }
        if !(self.h_k.is_finite() && self.h_k >= 0.0) {
            return Err(SynthError::InvalidDistortion("h_k must be >= 0".into()));
        }
        if !(self.noise_std_m.is_finite() && self.noise_std_m >= 0.0) {
            return Err(SynthError::InvalidDistortion(
                "noise std must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Walks the rigid template along a straight path, feet on the ground.
///
/// Vertical gaits approach the sensor from `z_start` to `z_end` facing it.
/// Horizontal gaits cross [`HORIZONTAL_SPAN_M`] along +X while the depth moves
/// from `z_start` to `z_end`. Gait phase follows distance walked, so a path
/// that is a whole number of strides starts and ends in the same pose.
pub fn generate_truth_capture(
    template: &BodyTemplate,
    direction: GaitDirection,
    frames: usize,
    z_start: f64,
    z_end: f64,
) -> Result<CaptureSequence, SynthError> {
    template.validate()?;
    if frames < 2 {
        return Err(SynthError::InvalidScenario(format!(
            "need at least 2 frames, got {frames}"
        )));
    }
    if !(z_start.is_finite() && z_end.is_finite()) {
        return Err(SynthError::InvalidScenario("non-finite depth".into()));
    }
    match direction {
        GaitDirection::Vertical if !(z_start >= z_end && z_end >= MIN_DEPTH_M) => {
            return Err(SynthError::InvalidScenario(format!(
                "vertical gait needs z_start >= z_end >= {MIN_DEPTH_M}, got {z_start} -> {z_end}"
            )));
        }
        GaitDirection::Horizontal if z_start.min(z_end) < MIN_DEPTH_M => {
            return Err(SynthError::InvalidScenario(format!(
                "horizontal gait must stay beyond {MIN_DEPTH_M} m"
            )));
        }
        _ => {}
    }

    let path_length = match direction {
        GaitDirection::Vertical => z_start - z_end,
        GaitDirection::Horizontal => HORIZONTAL_SPAN_M.hypot(z_end - z_start),
    };

    let out = (0..frames)
        .map(|k| {
            let s = k as f64 / (frames - 1) as f64;
            let phase = s * path_length / template.stride_length_m;
            let pose = template.pose(phase);
            let ground = pose.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
            let depth = z_start + s * (z_end - z_start);
            let joints = pose.map(|q| {
                let up = q.y - ground;
                match direction {
                    GaitDirection::Vertical => Point3::new(q.x, up, depth - q.z),
                    GaitDirection::Horizontal => {
                        let x = -0.5 * HORIZONTAL_SPAN_M + s * HORIZONTAL_SPAN_M;
                        Point3::new(x + q.z, up, depth + q.x)
                    }
                }
            });
            SkeletonFrame::new(k as u64, joints)
        })
        .collect();
    Ok(CaptureSequence::new(
        out,
        direction,
        format!("synthetic-{direction}"),
    ))
}

/// Rigid translation of every joint.
pub fn translate(seq: &CaptureSequence, offset: Point3) -> CaptureSequence {
    seq.map_points(|p| Point3::new(p.x + offset.x, p.y + offset.y, p.z + offset.z))
}

pub fn distort_tilt_point(p: &Point3, model: TiltModel, alpha: f64, h_k: f64) -> Point3 {
    let (s, c) = alpha.sin_cos();
    match model {
        TiltModel::ShearInverse => {
            let y = p.y - p.z * s - h_k;
            let z = p.z - y * s;
            Point3::new(p.x, y, z)
        }
        TiltModel::Rotation => {
            let y = p.y * c + p.z * s;
            let z = -p.y * s + p.z * c;
            Point3::new(p.x, y - h_k, z)
        }
    }
}

/// Simulates an inclined sensor mounted `h_k` above the ground.
pub fn distort_tilt(seq: &CaptureSequence, spec: &DistortionSpec) -> CaptureSequence {
    seq.map_points(|p| distort_tilt_point(p, spec.tilt_model, spec.alpha, spec.h_k))
}

/// Solves `y_raw = y_true - z·tan(P(y_raw))` by fixed-point iteration.
pub fn distort_perspective_point(p: &Point3, beta_poly: &Polynomial) -> Result<Point3, SynthError> {
    let mut y = p.y;
    for _ in 0..FIXED_POINT_MAX_ITER {
        let next = p.y - p.z * beta_poly.eval(y).tan();
        if !next.is_finite() {
            break;
        }
        let step = (next - y).abs();
        y = next;
        if step < FIXED_POINT_TOL {
            let beta = beta_poly.eval(y);
            if beta.abs() >= MAX_PERSPECTIVE_RAD {
                return Err(SynthError::PerspectiveOutOfRange { y, beta });
            }
            return Ok(Point3::new(p.x, y, p.z));
        }
    }
    Err(SynthError::FixedPointDivergence { y: p.y, z: p.z })
}

/// Height-dependent perspective drift, sampled at the distorted Y so that the
/// Y correction with the same polynomial inverts it.
pub fn distort_perspective(
    seq: &CaptureSequence,
    beta_poly: &Polynomial,
) -> Result<CaptureSequence, SynthError> {
    seq.try_map_points(|p| distort_perspective_point(p, beta_poly))
}

/// Independent zero-mean Gaussian noise on every coordinate.
pub fn add_noise(
    seq: &CaptureSequence,
    std_m: f64,
    seed: u64,
) -> Result<CaptureSequence, SynthError> {
    if std_m == 0.0 {
        return Ok(seq.clone());
    }
    let normal = Normal::new(0.0, std_m)
        .map_err(|_| SynthError::InvalidDistortion(format!("noise std {std_m}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(seq.map_points(|p| {
        Point3::new(
            p.x + normal.sample(&mut rng),
            p.y + normal.sample(&mut rng),
            p.z + normal.sample(&mut rng),
        )
    }))
}

/// Full raw-capture simulation: perspective, then tilt, then noise.
pub fn synthesize_raw(
    truth: &CaptureSequence,
    spec: &DistortionSpec,
) -> Result<CaptureSequence, SynthError> {
    spec.validate()?;
    let seen = distort_perspective(truth, &spec.beta_poly)?;
    let tilted = distort_tilt(&seen, spec);
    let mut raw = add_noise(&tilted, spec.noise_std_m, spec.seed)?;
    raw.label = format!("{}-raw", truth.label);
    Ok(raw)
}
