//! Consistency metrics: per-joint Y difference to the last frame, and
//! bone-length stability across frames.

use thiserror::Error;

use crate::skeleton::{CaptureSequence, JointIndex, SkeletonEdge, SkeletonFrame, SKELETON_EDGES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    #[error("need at least {needed} frames, got {found}")]
    TooFewFrames { needed: usize, found: usize },
}

/// `y(frame k) - y(last frame)` for one joint.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffSeries {
    pub joint: JointIndex,
    pub per_frame_diff: Vec<f64>,
}

impl DiffSeries {
    pub fn max_abs(&self) -> f64 {
        self.per_frame_diff
            .iter()
            .fold(0.0, |m, d| f64::max(m, d.abs()))
    }
}

pub fn y_diff_to_last(seq: &CaptureSequence, joints: &[JointIndex]) -> Vec<DiffSeries> {
    let Some(last) = seq.last() else {
        return joints
            .iter()
            .map(|&joint| DiffSeries {
                joint,
                per_frame_diff: Vec::new(),
            })
            .collect();
    };
    joints
        .iter()
        .map(|&joint| {
            let y_last = last.joint(joint).y;
            DiffSeries {
                joint,
                per_frame_diff: seq
                    .frames
                    .iter()
                    .map(|f| f.joint(joint).y - y_last)
                    .collect(),
            }
        })
        .collect()
}

/// Largest |y_k - y_last| over the given joints.
pub fn max_y_diff(seq: &CaptureSequence, joints: &[JointIndex]) -> f64 {
    y_diff_to_last(seq, joints)
        .iter()
        .map(DiffSeries::max_abs)
        .fold(0.0, f64::max)
}

pub fn bone_lengths(frame: &SkeletonFrame) -> Vec<(SkeletonEdge, f64)> {
    SKELETON_EDGES
        .iter()
        .map(|&e| (e, frame.joint(e.parent).distance(frame.joint(e.child))))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStability {
    pub edge: SkeletonEdge,
    pub mean_length_m: f64,
    /// Population standard deviation across frames.
    pub std_length_m: f64,
    pub max_abs_dev_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub edges: Vec<EdgeStability>,
    pub max_std_m: f64,
}

impl StabilityReport {
    pub fn edge(&self, edge: SkeletonEdge) -> Option<&EdgeStability> {
        self.edges.iter().find(|e| e.edge == edge)
    }
}

pub fn bone_length_stability(seq: &CaptureSequence) -> Result<StabilityReport, DiagnosticsError> {
    if seq.len() < 2 {
        return Err(DiagnosticsError::TooFewFrames {
            needed: 2,
            found: seq.len(),
        });
    }
    let per_frame: Vec<Vec<(SkeletonEdge, f64)>> = seq.frames.iter().map(bone_lengths).collect();
    let n = per_frame.len() as f64;
    let edges: Vec<EdgeStability> = SKELETON_EDGES
        .iter()
        .enumerate()
        .map(|(i, &edge)| {
            let lengths = per_frame.iter().map(|f| f[i].1);
            let mean = lengths.clone().sum::<f64>() / n;
            let var = lengths.clone().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
            let max_dev = lengths.map(|l| (l - mean).abs()).fold(0.0, f64::max);
            EdgeStability {
                edge,
                mean_length_m: mean,
                std_length_m: var.sqrt(),
                max_abs_dev_m: max_dev,
            }
        })
        .collect();
    let max_std_m = edges.iter().map(|e| e.std_length_m).fold(0.0, f64::max);
    Ok(StabilityReport { edges, max_std_m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::{GaitDirection, Point3, JOINT_COUNT};
    use crate::synthetic::{generate_truth_capture, BodyTemplate};

    fn walk() -> CaptureSequence {
        generate_truth_capture(
            &BodyTemplate::default(),
            GaitDirection::Vertical,
            60,
            4.0,
            1.5,
        )
        .unwrap()
    }

    #[test]
    fn constant_height_gives_zero_diffs() {
        let frames = (0..4)
            .map(|k| {
                SkeletonFrame::new(
                    k,
                    [Point3::new(0.0, 1.2, 4.0 - k as f64 * 0.5); JOINT_COUNT],
                )
            })
            .collect();
        let s = CaptureSequence::new(frames, GaitDirection::Vertical, "flat");
        for d in y_diff_to_last(&s, &[JointIndex::HEAD, JointIndex::KNEE_LEFT]) {
            assert!(d.per_frame_diff.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn last_element_is_zero() {
        let s = walk();
        let all: Vec<JointIndex> = JointIndex::all().collect();
        for d in y_diff_to_last(&s, &all) {
            assert_eq!(d.per_frame_diff.len(), s.len());
            assert_eq!(*d.per_frame_diff.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn bone_length_of_vertical_segment() {
        let mut joints = [Point3::new(0.0, 0.0, 0.0); JOINT_COUNT];
        joints[1] = Point3::new(0.0, 0.3, 0.0);
        let lengths = bone_lengths(&SkeletonFrame::new(0, joints));
        assert_eq!(lengths.len(), 24);
        let spine = lengths
            .iter()
            .find(|(e, _)| e.child == JointIndex::SPINE_MID)
            .unwrap();
        assert!((spine.1 - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rigid_capture_matches_template() {
        let t = BodyTemplate::default();
        let s = walk();
        for f in &s.frames {
            for (e, len) in bone_lengths(f) {
                let expected = t.offsets[e.parent.index()].distance(&t.offsets[e.child.index()]);
                assert!((len - expected).abs() < 1e-12, "{e}: {len} vs {expected}");
            }
        }
        let report = bone_length_stability(&s).unwrap();
        assert!(report.max_std_m < 1e-12);
        assert!(report.edges.iter().all(|e| e.mean_length_m > 0.0));
    }

    #[test]
    fn single_frame_rejected() {
        let mut s = walk();
        s.frames.truncate(1);
        assert_eq!(
            bone_length_stability(&s),
            Err(DiagnosticsError::TooFewFrames {
                needed: 2,
                found: 1
            })
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn y_shift_invariant(shift in -2.0f64..2.0) {
                let s = walk();
                let shifted = s.map_points(|p| Point3::new(p.x, p.y + shift, p.z));
                let joints: Vec<JointIndex> = JointIndex::all().collect();
                let a = y_diff_to_last(&s, &joints);
                let b = y_diff_to_last(&shifted, &joints);
                for (da, db) in a.iter().zip(&b) {
                    for (x, y) in da.per_frame_diff.iter().zip(&db.per_frame_diff) {
                        prop_assert!((x - y).abs() < 1e-12);
                    }
                }
            }

            #[test]
            fn rigid_motion_keeps_bone_lengths(yaw in -3.1f64..3.1, pitch in -1.5f64..1.5,
                                               tx in -2.0f64..2.0, ty in -2.0f64..2.0, tz in -2.0f64..2.0) {
                let f = walk().frames[17].clone();
                let (sy, cy) = yaw.sin_cos();
                let (sp, cp) = pitch.sin_cos();
                let moved = f.map_joints(|p| {
                    // yaw about Y, then pitch about X
                    let x1 = cy * p.x + sy * p.z;
                    let z1 = -sy * p.x + cy * p.z;
                    let y2 = cp * p.y - sp * z1;
                    let z2 = sp * p.y + cp * z1;
                    Point3::new(x1 + tx, y2 + ty, z2 + tz)
                });
                for ((_, a), (_, b)) in bone_lengths(&f).iter().zip(bone_lengths(&moved).iter()) {
                    prop_assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }
}
