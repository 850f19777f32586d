use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use skelcal::diagnostics::{self, DiagnosticsError};
use skelcal::formats::{self, FormatError, ReportKind};
use skelcal::numerics::{NumericsError, Polynomial};
use skelcal::perspective::DEFAULT_BETA_JOINTS;
use skelcal::pipeline::{self, PipelineConfig, PipelineError};
use skelcal::skeleton::{GaitDirection, JointIndex, Point3};
use skelcal::synthetic::{self, BodyTemplate, DistortionSpec, SynthError, TiltModel};

#[derive(Parser, Debug)]
#[command(
    name = "skelcal",
    version,
    about = "Calibrate depth-sensor skeleton captures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DirectionArg {
    Vertical,
    Horizontal,
}

impl From<DirectionArg> for GaitDirection {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Vertical => GaitDirection::Vertical,
            DirectionArg::Horizontal => GaitDirection::Horizontal,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TiltModelArg {
    Shear,
    Rotation,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportArg {
    Ydiff,
    Bones,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a ground-truth capture and its distorted raw counterpart.
    Synth {
        #[arg(long, value_enum, default_value = "vertical")]
        direction: DirectionArg,
        #[arg(long, default_value_t = 90)]
        frames: usize,
        /// Sensor inclination in degrees.
        #[arg(long, default_value_t = 7.0, allow_negative_numbers = true)]
        tilt_deg: f64,
        #[arg(long, value_enum, default_value = "shear")]
        tilt_model: TiltModelArg,
        /// Sensor height above ground in meters.
        #[arg(long, default_value_t = 0.75)]
        sensor_height: f64,
        /// Perspective polynomial in radians over height, ascending: c0,c1,...
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0",
            allow_negative_numbers = true
        )]
        beta_coeffs: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        noise_std: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4.5)]
        z_start: f64,
        #[arg(long, default_value_t = 1.5)]
        z_end: f64,
        /// Lateral placement of the walking path in meters.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lateral_offset: f64,
        #[arg(long)]
        out_truth: PathBuf,
        #[arg(long)]
        out_raw: PathBuf,
    },
    /// Estimate a calibration profile from vertical calibration gaits.
    Calibrate {
        #[arg(long)]
        sensor_height: f64,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value_t = skelcal::perspective::DEFAULT_MIN_DEPTH_TRAVEL_M)]
        min_depth_travel: f64,
        #[arg(long)]
        out_profile: PathBuf,
        #[arg(required = true)]
        captures: Vec<PathBuf>,
    },
    /// Apply a profile to a capture.
    Apply {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write consistency and bone-length reports as CSV.
    Diagnose {
        #[arg(long = "in")]
        input: PathBuf,
        /// Apply this profile before measuring.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "both")]
        report: ReportArg,
        /// Joint indices for the Y reports; defaults to the perspective joints.
        #[arg(long, value_delimiter = ',')]
        joints: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[allow(clippy::too_many_arguments)]
fn synth(
    direction: GaitDirection,
    frames: usize,
    spec: &DistortionSpec,
    z_start: f64,
    z_end: f64,
    lateral_offset: f64,
    out_truth: &Path,
    out_raw: &Path,
) -> Result<(), CliError> {
    let truth = synthetic::generate_truth_capture(
        &BodyTemplate::default(),
        direction,
        frames,
        z_start,
        z_end,
    )?;
    let truth = synthetic::translate(&truth, Point3::new(lateral_offset, 0.0, 0.0));
    let raw = synthetic::synthesize_raw(&truth, spec)?;
    formats::write_capture(&truth, out_truth)?;
    formats::write_capture(&raw, out_raw)?;
    println!(
        "wrote {} frames: truth {}, raw {}",
        truth.len(),
        out_truth.display(),
        out_raw.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth {
            direction,
            frames,
            tilt_deg,
            tilt_model,
            sensor_height,
            beta_coeffs,
            noise_std,
            seed,
            z_start,
            z_end,
            lateral_offset,
            out_truth,
            out_raw,
        } => {
            let spec = DistortionSpec {
                tilt_model: match tilt_model {
                    TiltModelArg::Shear => TiltModel::ShearInverse,
                    TiltModelArg::Rotation => TiltModel::Rotation,
                },
                alpha: tilt_deg.to_radians(),
                h_k: sensor_height,
                beta_poly: Polynomial::new(beta_coeffs)?,
                noise_std_m: noise_std,
                seed,
            };
            synth(
                direction.into(),
                frames,
                &spec,
                z_start,
                z_end,
                lateral_offset,
                &out_truth,
                &out_raw,
            )
        }
        Command::Calibrate {
            sensor_height,
            degree,
            min_depth_travel,
            out_profile,
            captures,
        } => {
            let gaits = captures
                .iter()
                .map(|p| formats::read_capture(p, GaitDirection::Vertical))
                .collect::<Result<Vec<_>, _>>()?;
            let config = PipelineConfig {
                beta_degree: degree,
                min_depth_travel_m: min_depth_travel,
                ..PipelineConfig::default()
            };
            let profile = pipeline::calibrate(&gaits, sensor_height, &config)?;
            formats::write_profile(&profile, &out_profile)?;
            println!(
                "alpha_g = {:.6} rad ({:.4} deg) from {} gaits; profile {}",
                profile.tilt.alpha_g(),
                profile.tilt.alpha_g().to_degrees(),
                profile.gait_count,
                out_profile.display()
            );
            Ok(())
        }
        Command::Apply {
            profile,
            input,
            out,
        } => {
            let profile = formats::read_profile(&profile)?;
            let seq = formats::read_capture(&input, GaitDirection::Vertical)?;
            if seq.label.contains("calibrated") {
                eprintln!(
                    "warning: `{}` looks already calibrated; the sensor height will be added again",
                    input.display()
                );
            }
            let corrected = pipeline::apply_profile(&seq, &profile)?;
            formats::write_capture(&corrected, &out)?;
            Ok(())
        }
        Command::Diagnose {
            input,
            profile,
            report,
            joints,
            out,
        } => {
            let mut seq = formats::read_capture(&input, GaitDirection::Vertical)?;
            if let Some(path) = profile {
                let profile = formats::read_profile(&path)?;
                seq = pipeline::apply_profile(&seq, &profile)?;
            }
            let joints: Vec<JointIndex> = if joints.is_empty() {
                DEFAULT_BETA_JOINTS.to_vec()
            } else {
                joints
                    .iter()
                    .map(|&j| {
                        JointIndex::new(j)
                            .ok_or_else(|| CliError::Usage(format!("joint {j} outside 0-24")))
                    })
                    .collect::<Result<_, _>>()?
            };
            let kind = match report {
                ReportArg::Ydiff => ReportKind::YDiff,
                ReportArg::Bones => ReportKind::Bones,
                ReportArg::Both => ReportKind::Both,
            };
            let text = formats::report_csv(&seq, &joints, kind)?;
            formats::write_atomic(&out, text.as_bytes())?;
            if matches!(kind, ReportKind::YDiff | ReportKind::Both) {
                println!(
                    "max |y - y_last| = {:.4} m",
                    diagnostics::max_y_diff(&seq, &joints)
                );
            }
            if matches!(kind, ReportKind::Bones | ReportKind::Both) {
                let stability = diagnostics::bone_length_stability(&seq)?;
                println!("max bone-length std = {:.4} m", stability.max_std_m);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
