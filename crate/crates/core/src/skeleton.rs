//! Joint, frame and capture-sequence types.
//!
//! Coordinates are meters in the sensor frame: Y up, Z pointing away from the
//! sensor into the scene, X lateral.

use std::fmt;

use thiserror::Error;

/// Number of tracked joints per frame.
pub const JOINT_COUNT: usize = 25;

/// Default capture rate of the sensor.
pub const DEFAULT_FPS: f64 = 30.0;

const JOINT_NAMES: [&str; JOINT_COUNT] = [
    "spine_base",
    "spine_mid",
    "neck",
    "head",
    "shoulder_left",
    "elbow_left",
    "wrist_left",
    "hand_left",
    "shoulder_right",
    "elbow_right",
    "wrist_right",
    "hand_right",
    "hip_left",
    "knee_left",
    "ankle_left",
    "foot_left",
    "hip_right",
    "knee_right",
    "ankle_right",
    "foot_right",
    "spine_shoulder",
    "hand_tip_left",
    "thumb_left",
    "hand_tip_right",
    "thumb_right",
];

/// Index of one of the 25 tracked joints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JointIndex(u8);

impl JointIndex {
    pub const SPINE_BASE: JointIndex = JointIndex(0);
    pub const SPINE_MID: JointIndex = JointIndex(1);
    pub const NECK: JointIndex = JointIndex(2);
    pub const HEAD: JointIndex = JointIndex(3);
    pub const SHOULDER_LEFT: JointIndex = JointIndex(4);
    pub const ELBOW_LEFT: JointIndex = JointIndex(5);
    pub const WRIST_LEFT: JointIndex = JointIndex(6);
    pub const HAND_LEFT: JointIndex = JointIndex(7);
    pub const SHOULDER_RIGHT: JointIndex = JointIndex(8);
    pub const ELBOW_RIGHT: JointIndex = JointIndex(9);
    pub const WRIST_RIGHT: JointIndex = JointIndex(10);
    pub const HAND_RIGHT: JointIndex = JointIndex(11);
    pub const HIP_LEFT: JointIndex = JointIndex(12);
    pub const KNEE_LEFT: JointIndex = JointIndex(13);
    pub const ANKLE_LEFT: JointIndex = JointIndex(14);
    pub const FOOT_LEFT: JointIndex = JointIndex(15);
    pub const HIP_RIGHT: JointIndex = JointIndex(16);
    pub const KNEE_RIGHT: JointIndex = JointIndex(17);
    pub const ANKLE_RIGHT: JointIndex = JointIndex(18);
    pub const FOOT_RIGHT: JointIndex = JointIndex(19);
    pub const SPINE_SHOULDER: JointIndex = JointIndex(20);
    pub const HAND_TIP_LEFT: JointIndex = JointIndex(21);
    pub const THUMB_LEFT: JointIndex = JointIndex(22);
    pub const HAND_TIP_RIGHT: JointIndex = JointIndex(23);
    pub const THUMB_RIGHT: JointIndex = JointIndex(24);

    pub fn new(value: usize) -> Option<Self> {
        (value < JOINT_COUNT).then_some(JointIndex(value as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        JOINT_NAMES[self.index()]
    }

    pub fn from_name(name: &str) -> Option<Self> {
        JOINT_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| JointIndex(i as u8))
    }

    /// All joints in index order.
    pub fn all() -> impl Iterator<Item = JointIndex> {
        (0..JOINT_COUNT as u8).map(JointIndex)
    }
}

impl fmt::Display for JointIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.0, self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// First non-finite component, if any.
    pub fn non_finite_axis(&self) -> Option<Axis> {
        if !self.x.is_finite() {
            Some(Axis::X)
        } else if !self.y.is_finite() {
            Some(Axis::Y)
        } else if !self.z.is_finite() {
            Some(Axis::Z)
        } else {
            None
        }
    }
}

/// One time sample of the skeleton.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonFrame {
    pub frame_index: u64,
    pub joints: [Point3; JOINT_COUNT],
}

impl SkeletonFrame {
    pub fn new(frame_index: u64, joints: [Point3; JOINT_COUNT]) -> Self {
        SkeletonFrame {
            frame_index,
            joints,
        }
    }

    /// Builds a frame from a list that must hold exactly 25 points.
    pub fn from_points(frame_index: u64, points: Vec<Point3>) -> Result<Self, ModelError> {
        let found = points.len();
        let joints: [Point3; JOINT_COUNT] =
            points.try_into().map_err(|_| ModelError::WrongJointCount {
                frame: frame_index,
                found,
            })?;
        Ok(SkeletonFrame::new(frame_index, joints))
    }

    pub fn joint(&self, j: JointIndex) -> &Point3 {
        &self.joints[j.index()]
    }

    /// Applies `f` to every joint, keeping the frame index.
    pub fn map_joints<F>(&self, mut f: F) -> SkeletonFrame
    where
        F: FnMut(&Point3) -> Point3,
    {
        SkeletonFrame {
            frame_index: self.frame_index,
            joints: std::array::from_fn(|i| f(&self.joints[i])),
        }
    }

    /// Fallible variant of [`SkeletonFrame::map_joints`].
    pub fn try_map_joints<F, E>(&self, mut f: F) -> Result<SkeletonFrame, E>
    where
        F: FnMut(&Point3) -> Result<Point3, E>,
    {
        let mut joints = self.joints;
        for p in joints.iter_mut() {
            *p = f(p)?;
        }
        Ok(SkeletonFrame {
            frame_index: self.frame_index,
            joints,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GaitDirection {
    /// Walking toward the sensor along Z.
    Vertical,
    /// Walking across the field of view along X.
    Horizontal,
}

impl fmt::Display for GaitDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GaitDirection::Vertical => "vertical",
            GaitDirection::Horizontal => "horizontal",
        })
    }
}

/// Ordered frames of one recorded walk.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptureSequence {
    pub frames: Vec<SkeletonFrame>,
    pub direction: GaitDirection,
    pub nominal_fps: f64,
    pub label: String,
}

impl CaptureSequence {
    pub fn new(
        frames: Vec<SkeletonFrame>,
        direction: GaitDirection,
        label: impl Into<String>,
    ) -> Self {
        CaptureSequence {
            frames,
            direction,
            nominal_fps: DEFAULT_FPS,
            label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn first(&self) -> Option<&SkeletonFrame> {
        self.frames.first()
    }

    pub fn last(&self) -> Option<&SkeletonFrame> {
        self.frames.last()
    }

    /// Same metadata, frames replaced.
    pub fn with_frames(&self, frames: Vec<SkeletonFrame>) -> CaptureSequence {
        CaptureSequence {
            frames,
            direction: self.direction,
            nominal_fps: self.nominal_fps,
            label: self.label.clone(),
        }
    }

    pub fn map_points<F>(&self, mut f: F) -> CaptureSequence
    where
        F: FnMut(&Point3) -> Point3,
    {
        self.with_frames(self.frames.iter().map(|fr| fr.map_joints(&mut f)).collect())
    }

    pub fn try_map_points<F, E>(&self, mut f: F) -> Result<CaptureSequence, E>
    where
        F: FnMut(&Point3) -> Result<Point3, E>,
    {
        let frames = self
            .frames
            .iter()
            .map(|fr| fr.try_map_joints(&mut f))
            .collect::<Result<Vec<_>, E>>()?;
        Ok(self.with_frames(frames))
    }
}

/// A bone of the skeleton tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SkeletonEdge {
    pub parent: JointIndex,
    pub child: JointIndex,
}

impl fmt::Display for SkeletonEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.parent.index(), self.child.index())
    }
}

const fn edge(parent: u8, child: u8) -> SkeletonEdge {
    SkeletonEdge {
        parent: JointIndex(parent),
        child: JointIndex(child),
    }
}

/// The 24 bones connecting the 25 joints.
pub const SKELETON_EDGES: [SkeletonEdge; JOINT_COUNT - 1] = [
    // spine
    edge(0, 1),
    edge(1, 20),
    edge(20, 2),
    edge(2, 3),
    // left arm
    edge(20, 4),
    edge(4, 5),
    edge(5, 6),
    edge(6, 7),
    edge(7, 21),
    edge(7, 22),
    // right arm
    edge(20, 8),
    edge(8, 9),
    edge(9, 10),
    edge(10, 11),
    edge(11, 23),
    edge(11, 24),
    // legs
    edge(0, 12),
    edge(12, 13),
    edge(13, 14),
    edge(14, 15),
    edge(0, 16),
    edge(16, 17),
    edge(17, 18),
    edge(18, 19),
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("capture sequence has no frames")]
    EmptySequence,
    #[error("non-finite {axis} coordinate at frame {frame}, joint {joint}")]
    NonFiniteCoordinate {
        frame: u64,
        joint: JointIndex,
        axis: Axis,
    },
    #[error("frame {frame} has {found} joints, expected {JOINT_COUNT}")]
    WrongJointCount { frame: u64, found: usize },
    #[error("frame index {current} does not follow {previous}")]
    NonMonotonicFrameIndex { previous: u64, current: u64 },
}

/// Checks every sequence invariant and hands the sequence back untouched.
pub fn validate_sequence(raw: CaptureSequence) -> Result<CaptureSequence, ModelError> {
    if raw.frames.is_empty() {
        return Err(ModelError::EmptySequence);
    }
    let mut previous: Option<u64> = None;
    for frame in &raw.frames {
        if let Some(prev) = previous {
            if frame.frame_index <= prev {
                return Err(ModelError::NonMonotonicFrameIndex {
                    previous: prev,
                    current: frame.frame_index,
                });
            }
        }
        previous = Some(frame.frame_index);
        for (j, p) in JointIndex::all().zip(frame.joints.iter()) {
            if let Some(axis) = p.non_finite_axis() {
                return Err(ModelError::NonFiniteCoordinate {
                    frame: frame.frame_index,
                    joint: j,
                    axis,
                });
            }
        }
    }
    Ok(raw)
}

/// Positions of one joint across all frames, in frame order.
pub fn joint_track(seq: &CaptureSequence, j: JointIndex) -> Vec<Point3> {
    seq.frames.iter().map(|f| *f.joint(j)).collect()
}
