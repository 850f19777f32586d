#![allow(dead_code)]

use skelcal::numerics::{FitPoint, Polynomial};
use skelcal::synthetic::{
    generate_truth_capture, synthesize_raw, translate, BodyTemplate, DistortionSpec, TiltModel,
};
use skelcal::{CaptureSequence, GaitDirection, Point3};

pub const TILT_7_DEG: f64 = 0.12217;
pub const SENSOR_HEIGHT: f64 = 0.75;
pub const FRAMES: usize = 90;
pub const Z_START: f64 = 4.5;
pub const Z_END: f64 = 1.5;

/// β(y) = 0.031·y rad: about 3° at head height, zero at the floor.
pub fn linear_beta() -> Polynomial {
    Polynomial::new(vec![0.0, 0.031]).unwrap()
}

pub fn spec(model: TiltModel, beta: Polynomial, noise: f64, seed: u64) -> DistortionSpec {
    DistortionSpec {
        tilt_model: model,
        alpha: TILT_7_DEG,
        h_k: SENSOR_HEIGHT,
        beta_poly: beta,
        noise_std_m: noise,
        seed,
    }
}

pub fn truth_walk(lateral: f64) -> CaptureSequence {
    let t = generate_truth_capture(
        &BodyTemplate::default(),
        GaitDirection::Vertical,
        FRAMES,
        Z_START,
        Z_END,
    )
    .unwrap();
    translate(&t, Point3::new(lateral, 0.0, 0.0))
}

/// Ten calibration walks at different lateral positions, each with its own
/// noise seed. Returns (truth, raw) pairs.
pub fn calibration_set(base: &DistortionSpec) -> Vec<(CaptureSequence, CaptureSequence)> {
    (0..10)
        .map(|i| {
            let truth = truth_walk(-0.45 + 0.1 * i as f64);
            let spec = DistortionSpec {
                seed: base.seed + i as u64,
                ..base.clone()
            };
            let mut raw = synthesize_raw(&truth, &spec).unwrap();
            raw.label = format!("gait-{i}");
            (truth, raw)
        })
        .collect()
}

/// A walk not used for calibration.
pub fn held_out(base: &DistortionSpec) -> (CaptureSequence, CaptureSequence) {
    let truth = truth_walk(0.17);
    let spec = DistortionSpec {
        seed: base.seed + 1000,
        ..base.clone()
    };
    let raw = synthesize_raw(&truth, &spec).unwrap();
    (truth, raw)
}

pub fn max_coordinate_error(a: &CaptureSequence, b: &CaptureSequence) -> f64 {
    a.frames
        .iter()
        .zip(&b.frames)
        .flat_map(|(fa, fb)| fa.joints.iter().zip(fb.joints.iter()))
        .map(|(p, q)| {
            (p.x - q.x)
                .abs()
                .max((p.y - q.y).abs())
                .max((p.z - q.z).abs())
        })
        .fold(0.0, f64::max)
}

/// Least squares through the normal equations (Vᵀ V) c = Vᵀ y, solved by
/// Gauss-Jordan elimination with partial pivoting.
pub fn normal_equations_fit(points: &[FitPoint], degree: usize) -> Vec<f64> {
    let n = degree + 1;
    let mut a = vec![vec![0.0; n + 1]; n];
    for p in points {
        for r in 0..n {
            for c in 0..n {
                a[r][c] += p.x.powi((r + c) as i32);
            }
            a[r][n] += p.y * p.x.powi(r as i32);
        }
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..=n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

/// Prints one acceptance line and fails the test when `pass` is false.
pub fn verdict(id: u32, name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[AC{id}] {tag} {name}: {detail}");
    assert!(pass, "acceptance criterion {id} ({name}) failed: {detail}");
}
