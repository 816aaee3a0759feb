//! Exit-code contract and error paths of the command-line driver:
//! 0 success, 1 hard error, 2 success with warnings.

use std::path::Path;
use std::process::Command;

use neunseg::io::{write_binary_mask, write_points};
use neunseg::raster::{BinaryMask, Point};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_neunseg"))
}

fn code(status: std::process::ExitStatus) -> i32 {
    status.code().expect("process must exit normally")
}

fn genfix(out: &Path, id: &str, seed: u64) {
    let status = bin()
        .args(["genfix", "--out"])
        .arg(out)
        .args([
            "--id", id, "--width", "256", "--height", "256", "--cells", "6",
            "--seed", &seed.to_string(),
        ])
        .status()
        .unwrap();
    assert_eq!(code(status), 0);
}

#[test]
fn synthesize_succeeds_on_valid_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let mask = BinaryMask::from_fn(64, 64, |x, y| {
        let a = (x as i64 - 20).pow(2) + (y as i64 - 32).pow(2) <= 144;
        let b = (x as i64 - 44).pow(2) + (y as i64 - 32).pow(2) <= 144;
        a || b
    });
    write_binary_mask(&dir.path().join("mask.png"), &mask).unwrap();
    write_points(&dir.path().join("pts.txt"), &[Point::new(20, 32), Point::new(44, 32)]).unwrap();

    let status = bin()
        .args(["synthesize", "--binary-mask"])
        .arg(dir.path().join("mask.png"))
        .arg("--points")
        .arg(dir.path().join("pts.txt"))
        .arg("--out-dir")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(code(status), 0);
    assert!(dir.path().join("out/instances.png").exists());
    assert!(dir.path().join("out/classes.png").exists());
}

#[test]
fn synthesize_warns_on_background_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mask = BinaryMask::from_fn(64, 64, |x, _| x < 32);
    write_binary_mask(&dir.path().join("mask.png"), &mask).unwrap();
    write_points(&dir.path().join("pts.txt"), &[Point::new(10, 10), Point::new(50, 50)]).unwrap();

    let output = bin()
        .args(["synthesize", "--binary-mask"])
        .arg(dir.path().join("mask.png"))
        .arg("--points")
        .arg(dir.path().join("pts.txt"))
        .arg("--out-dir")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    // output is still written, the skipped coordinate is reported
    assert!(dir.path().join("out/instances.png").exists());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("(50, 50)"), "stderr: {stderr}");
}

#[test]
fn missing_input_file_is_a_hard_error() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["synthesize", "--binary-mask"])
        .arg(dir.path().join("nope.png"))
        .arg("--points")
        .arg(dir.path().join("nope.txt"))
        .arg("--out-dir")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(code(status), 1);
}

#[test]
fn unknown_scheme_exits_with_one_and_usage() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["postprocess", "--scheme", "magic", "--probmap"])
        .arg(dir.path().join("pm.png"))
        .arg("--out")
        .arg(dir.path().join("out.png"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("Usage") || stderr.contains("usage"), "stderr: {stderr}");
}

#[test]
fn postprocess_writes_labels_and_times_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    genfix(dir.path(), "s", 3);
    let output = bin()
        .args(["postprocess", "--probmap"])
        .arg(dir.path().join("probmaps/s.png"))
        .arg("--out")
        .arg(dir.path().join("labels.png"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let labels = neunseg::io::read_label_map(&dir.path().join("labels.png")).unwrap();
    assert_eq!(labels.distinct_labels().len(), 6);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("proposed"), "timing line must name the scheme: {stderr}");
}

#[test]
fn evaluate_rejects_mismatched_directories() {
    let dir = tempfile::tempdir().unwrap();
    genfix(dir.path(), "s", 3);
    let empty = dir.path().join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let status = bin()
        .args(["evaluate", "--pred"])
        .arg(dir.path().join("instances"))
        .arg("--gt")
        .arg(&empty)
        .arg("--points")
        .arg(dir.path().join("points"))
        .arg("--out")
        .arg(dir.path().join("report.csv"))
        .status()
        .unwrap();
    assert_eq!(code(status), 1);
}

#[test]
fn evaluate_perfect_prediction_reports_ones() {
    let dir = tempfile::tempdir().unwrap();
    genfix(dir.path(), "s", 3);
    let report = dir.path().join("report.csv");
    let status = bin()
        .args(["evaluate", "--pred"])
        .arg(dir.path().join("instances"))
        .arg("--gt")
        .arg(dir.path().join("instances"))
        .arg("--points")
        .arg(dir.path().join("points"))
        .arg("--out")
        .arg(&report)
        .status()
        .unwrap();
    assert_eq!(code(status), 0);
    let csv = std::fs::read_to_string(&report).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[1..], &["1.0000", "1.0000", "1.0000", "0.0000", "1.0000", "1.0000", "1.0000"]);
    assert!(csv.contains("mean±std"));
}

#[test]
fn compare_reports_all_schemes_and_a_timing_file() {
    let dir = tempfile::tempdir().unwrap();
    genfix(dir.path(), "s", 3);
    let report = dir.path().join("cmp.csv");
    let status = bin()
        .args(["compare", "--probmaps"])
        .arg(dir.path().join("probmaps"))
        .arg("--gt")
        .arg(dir.path().join("instances"))
        .arg("--out")
        .arg(&report)
        .status()
        .unwrap();
    assert_eq!(code(status), 0);
    let csv = std::fs::read_to_string(&report).unwrap();
    for scheme in ["proposed", "baseline", "distance", "contour-strip"] {
        assert!(csv.contains(&format!("s,{scheme},")), "missing {scheme} row:\n{csv}");
    }
    let timing = std::fs::read_to_string(dir.path().join("cmp_timing.csv")).unwrap();
    assert!(timing.starts_with("image,scheme,seconds"));
}

#[test]
fn compare_on_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("none");
    std::fs::create_dir_all(&empty).unwrap();
    let status = bin()
        .args(["compare", "--probmaps"])
        .arg(&empty)
        .arg("--gt")
        .arg(&empty)
        .arg("--out")
        .arg(dir.path().join("cmp.csv"))
        .status()
        .unwrap();
    assert_eq!(code(status), 1);
}

#[test]
fn genfix_overlap_heavy_scene_has_a_ridge() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["genfix", "--out"])
        .arg(dir.path())
        .args([
            "--id", "dense", "--width", "384", "--height", "384", "--cells", "10",
            "--touching-fraction", "0.6", "--seed", "9",
        ])
        .status()
        .unwrap();
    assert_eq!(code(status), 0);
    let classes = neunseg::io::read_class_map(&dir.path().join("classes/dense.png")).unwrap();
    assert!(classes.count(neunseg::PixelClass::Contour) > 0);
    let instances = neunseg::io::read_label_map(&dir.path().join("instances/dense.png")).unwrap();
    assert_eq!(instances.distinct_labels().len(), 10);
}

#[test]
fn tile_plan_prints_the_grid() {
    let output = bin()
        .args(["tile-plan", "--width", "1400", "--height", "1344"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("tiles: 2"));
    assert!(stdout.contains("56,0"));
}

#[test]
fn invalid_tile_plan_is_rejected() {
    let output = bin()
        .args(["tile-plan", "--width", "100", "--height", "100", "--patch-size", "64", "--overlap", "64"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}
