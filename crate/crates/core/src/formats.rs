//! File formats: capture CSV, profile JSON and report CSV.
//!
//! Every writer produces byte-identical output for identical data: fixed
//! column order, coordinates with nine decimals (nanometers), LF line endings.
//! Files are written to a temporary sibling and renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{self, DiffSeries};
use crate::numerics::Polynomial;
use crate::perspective::{BetaModel, BetaPoint};
use crate::pipeline::CalibrationProfile;
use crate::skeleton::{
    validate_sequence, CaptureSequence, GaitDirection, JointIndex, ModelError, Point3,
    SkeletonFrame, JOINT_COUNT,
};
use crate::tilt::TiltParams;

pub const CAPTURE_HEADER: [&str; 5] = ["frame", "joint", "x", "y", "z"];
pub const PROFILE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("frame {frame} is missing joint {joint}")]
    MissingJoint { frame: u64, joint: JointIndex },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("profile schema error in `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl FormatError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        FormatError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn schema(field: &str, message: impl Into<String>) -> Self {
        FormatError::Schema {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

/// Fixed nine-decimal rendering; negative zero prints as zero.
pub fn format_meters(v: f64) -> String {
    let s = format!("{v:.9}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), FormatError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| FormatError::io(path, e))?;
    tmp.write_all(contents)
        .map_err(|e| FormatError::io(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| FormatError::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| FormatError::io(path, e.error))?;
    Ok(())
}

pub fn capture_to_csv(seq: &CaptureSequence) -> String {
    let mut out = String::with_capacity(64 + seq.len() * JOINT_COUNT * 48);
    out.push_str(&CAPTURE_HEADER.join(","));
    out.push('\n');
    for frame in &seq.frames {
        for (j, p) in frame.joints.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                frame.frame_index,
                j,
                format_meters(p.x),
                format_meters(p.y),
                format_meters(p.z)
            );
        }
    }
    out
}

pub fn write_capture(seq: &CaptureSequence, path: &Path) -> Result<(), FormatError> {
    write_atomic(path, capture_to_csv(seq).as_bytes())
}

fn parse_field<T: std::str::FromStr>(
    record: &csv::StringRecord,
    idx: usize,
    line: u64,
) -> Result<T, FormatError> {
    let raw = record.get(idx).ok_or_else(|| FormatError::Parse {
        line,
        message: format!("missing column `{}`", CAPTURE_HEADER[idx]),
    })?;
    raw.trim().parse().map_err(|_| FormatError::Parse {
        line,
        message: format!("invalid {} value `{raw}`", CAPTURE_HEADER[idx]),
    })
}

fn close_frame(
    frame: u64,
    slots: &mut [Option<Point3>; JOINT_COUNT],
    frames: &mut Vec<SkeletonFrame>,
) -> Result<(), FormatError> {
    let mut joints = [Point3::default(); JOINT_COUNT];
    for (j, slot) in slots.iter_mut().enumerate() {
        joints[j] = slot.take().ok_or(FormatError::MissingJoint {
            frame,
            joint: JointIndex::new(j).expect("slot index is a joint"),
        })?;
    }
    frames.push(SkeletonFrame::new(frame, joints));
    Ok(())
}

/// Parses capture CSV text. Rows of one frame must be contiguous.
pub fn capture_from_csv(
    text: &str,
    direction: GaitDirection,
    label: &str,
) -> Result<CaptureSequence, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| FormatError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.iter().ne(CAPTURE_HEADER.iter().copied()) {
        return Err(FormatError::Parse {
            line: 1,
            message: format!("expected header `{}`", CAPTURE_HEADER.join(",")),
        });
    }

    let mut frames = Vec::new();
    let mut current: Option<u64> = None;
    let mut slots: [Option<Point3>; JOINT_COUNT] = [None; JOINT_COUNT];
    for result in reader.records() {
        let record = result.map_err(|e| FormatError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != CAPTURE_HEADER.len() {
            return Err(FormatError::Parse {
                line,
                message: format!("expected 5 fields, found {}", record.len()),
            });
        }
        let frame: u64 = parse_field(&record, 0, line)?;
        let joint: usize = parse_field(&record, 1, line)?;
        if joint >= JOINT_COUNT {
            return Err(FormatError::Parse {
                line,
                message: format!("joint index {joint} outside 0-24"),
            });
        }
        let point = Point3::new(
            parse_field(&record, 2, line)?,
            parse_field(&record, 3, line)?,
            parse_field(&record, 4, line)?,
        );

        match current {
            Some(f) if f == frame => {}
            Some(f) => {
                close_frame(f, &mut slots, &mut frames)?;
                current = Some(frame);
            }
            None => current = Some(frame),
        }
        if slots[joint].replace(point).is_some() {
            return Err(FormatError::Parse {
                line,
                message: format!("duplicate joint {joint} in frame {frame}"),
            });
        }
    }
    if let Some(f) = current {
        close_frame(f, &mut slots, &mut frames)?;
    }
    let seq = CaptureSequence::new(frames, direction, label);
    Ok(validate_sequence(seq)?)
}

/// Reads a capture file; the label is the file stem.
pub fn read_capture(path: &Path, direction: GaitDirection) -> Result<CaptureSequence, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    capture_from_csv(&text, direction, &label)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaPointDocument {
    pub joint: usize,
    pub height_y_m: f64,
    pub beta_rad: f64,
}

/// On-disk form of a calibration profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    pub schema_version: u32,
    pub alpha_g_rad: f64,
    pub h_k_m: f64,
    pub beta_degree: usize,
    pub beta_coeffs: Vec<f64>,
    pub gait_count: usize,
    pub beta_points: Vec<BetaPointDocument>,
    pub created_label: String,
}

impl From<&CalibrationProfile> for ProfileDocument {
    fn from(p: &CalibrationProfile) -> Self {
        ProfileDocument {
            schema_version: PROFILE_SCHEMA_VERSION,
            alpha_g_rad: p.tilt.alpha_g(),
            h_k_m: p.tilt.h_k(),
            beta_degree: p.beta.fit_degree(),
            beta_coeffs: p.beta.poly().coefficients().to_vec(),
            gait_count: p.gait_count,
            beta_points: p
                .beta
                .source_points()
                .iter()
                .map(|b| BetaPointDocument {
                    joint: b.joint.index(),
                    height_y_m: b.height_y,
                    beta_rad: b.beta,
                })
                .collect(),
            created_label: p.created_label.clone(),
        }
    }
}

impl ProfileDocument {
    pub fn into_profile(self) -> Result<CalibrationProfile, FormatError> {
        if self.schema_version != PROFILE_SCHEMA_VERSION {
            return Err(FormatError::schema(
                "schema_version",
                format!("unsupported version {}", self.schema_version),
            ));
        }
        if self.beta_coeffs.len() != self.beta_degree + 1 {
            return Err(FormatError::schema(
                "beta_coeffs",
                format!(
                    "{} coefficients for degree {}",
                    self.beta_coeffs.len(),
                    self.beta_degree
                ),
            ));
        }
        if self.gait_count == 0 {
            return Err(FormatError::schema("gait_count", "must be at least 1"));
        }
        let tilt = TiltParams::new(self.alpha_g_rad, self.h_k_m)
            .map_err(|e| FormatError::schema("alpha_g_rad/h_k_m", e.to_string()))?;
        let poly = Polynomial::new(self.beta_coeffs)
            .map_err(|e| FormatError::schema("beta_coeffs", e.to_string()))?;
        let points = self
            .beta_points
            .into_iter()
            .map(|b| {
                let joint = JointIndex::new(b.joint).ok_or_else(|| {
                    FormatError::schema("beta_points", format!("joint {} outside 0-24", b.joint))
                })?;
                Ok(BetaPoint {
                    joint,
                    height_y: b.height_y_m,
                    beta: b.beta_rad,
                })
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        let beta = BetaModel::new(poly, points)
            .map_err(|e| FormatError::schema("beta_points", e.to_string()))?;
        Ok(CalibrationProfile {
            tilt,
            beta,
            gait_count: self.gait_count,
            created_label: self.created_label,
        })
    }
}

pub fn profile_to_json(profile: &CalibrationProfile) -> String {
    let doc = ProfileDocument::from(profile);
    let mut s = serde_json::to_string_pretty(&doc).expect("profile document serializes");
    s.push('\n');
    s
}

pub fn profile_from_json(text: &str) -> Result<CalibrationProfile, FormatError> {
    let doc: ProfileDocument = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.contains("field"))
            .unwrap_or("document")
            .to_string();
        FormatError::Schema {
            field,
            message: msg,
        }
    })?;
    doc.into_profile()
}

pub fn write_profile(profile: &CalibrationProfile, path: &Path) -> Result<(), FormatError> {
    write_atomic(path, profile_to_json(profile).as_bytes())
}

pub fn read_profile(path: &Path) -> Result<CalibrationProfile, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    profile_from_json(&text)
}

/// Which tables a diagnostics report contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    YDiff,
    Bones,
    Both,
}

pub const REPORT_HEADER: &str = "metric,frame,subject,value";

/// Long-format report: one `metric,frame,subject,value` row per sample.
///
/// `y_diff` metrics emit per-joint `z`, `y` and `y_diff_to_last` series;
/// `bones` metrics emit per-frame `bone_length` plus per-edge summaries with
/// an empty frame column.
pub fn report_csv(
    seq: &CaptureSequence,
    joints: &[JointIndex],
    kind: ReportKind,
) -> Result<String, diagnostics::DiagnosticsError> {
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    if matches!(kind, ReportKind::YDiff | ReportKind::Both) {
        let diffs: Vec<DiffSeries> = diagnostics::y_diff_to_last(seq, joints);
        for series in &diffs {
            let j = series.joint.index();
            for (k, frame) in seq.frames.iter().enumerate() {
                let p = frame.joint(series.joint);
                let fi = frame.frame_index;
                let _ = writeln!(out, "z,{fi},{j},{}", format_meters(p.z));
                let _ = writeln!(out, "y,{fi},{j},{}", format_meters(p.y));
                let _ = writeln!(
                    out,
                    "y_diff_to_last,{fi},{j},{}",
                    format_meters(series.per_frame_diff[k])
                );
            }
        }
    }
    if matches!(kind, ReportKind::Bones | ReportKind::Both) {
        for frame in &seq.frames {
            for (e, len) in diagnostics::bone_lengths(frame) {
                let _ = writeln!(
                    out,
                    "bone_length,{},{e},{}",
                    frame.frame_index,
                    format_meters(len)
                );
            }
        }
        let report = diagnostics::bone_length_stability(seq)?;
        for e in &report.edges {
            let edge = e.edge;
            let _ = writeln!(
                out,
                "bone_length_mean,,{edge},{}",
                format_meters(e.mean_length_m)
            );
            let _ = writeln!(
                out,
                "bone_length_std,,{edge},{}",
                format_meters(e.std_length_m)
            );
            let _ = writeln!(
                out,
                "bone_length_max_abs_dev,,{edge},{}",
                format_meters(e.max_abs_dev_m)
            );
        }
    }
    Ok(out)
}
