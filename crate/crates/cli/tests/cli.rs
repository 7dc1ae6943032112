//! End-to-end runs of the platelab binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use platelab::io::save_field;
use platelab::lattice::{Field, Lattice};
use tempfile::TempDir;

fn platelab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_platelab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_gaussian(dir: &Path, name: &str, lat: Lattice, width: f64) -> PathBuf {
    let field = Field::gaussian(lat, &lat.center(), width).unwrap();
    let path = dir.join(name);
    save_field(&field, &path).unwrap();
    path
}

#[test]
fn norm_command_prints_a_value_and_writes_manifest() {
    let tmp = TempDir::new().unwrap();
    let lat = Lattice::new(1, 64, 16.0).unwrap();
    write_gaussian(tmp.path(), "f.vpf", lat, 1.0);
    let out = platelab(
        &[
            "--dim", "1", "--grid", "64", "--length", "16", "norm", "--p", "2", "--q", "2",
            "--s", "0", "--input", "f.vpf",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(value > 0.0);
    let manifest = fs::read_to_string(tmp.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("command = norm"));
    assert!(manifest.contains("grid = 64"));
    assert!(fs::read_to_string(tmp.path().join("norm.txt")).unwrap().contains('e'));
}

#[test]
fn rejects_non_power_of_two_grid_naming_the_constraint() {
    let tmp = TempDir::new().unwrap();
    let out = platelab(&["--grid", "500", "norm", "--input", "f.vpf"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("power of two"), "{stderr}");
}

#[test]
fn missing_input_file_exits_one_with_path() {
    let tmp = TempDir::new().unwrap();
    let out = platelab(
        &["--grid", "64", "--length", "16", "norm", "--input", "absent.vpf"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("absent.vpf"), "{stderr}");
}

#[test]
fn cli_flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    let lat = Lattice::new(1, 64, 16.0).unwrap();
    write_gaussian(tmp.path(), "f.vpf", lat, 1.0);
    fs::write(
        tmp.path().join("run.cfg"),
        "# defaults for this study\np = inf\ngrid = 64\nlength = 16\n",
    )
    .unwrap();

    // File p = inf loses to the explicit --p 2; grid/length come from the file.
    let out = platelab(
        &["--config", "run.cfg", "norm", "--p", "2", "--input", "f.vpf"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = fs::read_to_string(tmp.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("p = 2"), "{manifest}");
    assert!(manifest.contains("grid = 64"), "{manifest}");
}

#[test]
fn unknown_config_key_is_rejected_with_line() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("bad.cfg"), "grid = 64\nfrobnicate = 7\n").unwrap();
    let out = platelab(&["--config", "bad.cfg", "norm"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("bad.cfg:2") && stderr.contains("frobnicate"),
        "{stderr}"
    );
}

#[test]
fn solve_with_zero_nonlinearity_matches_propagate_bit_for_bit() {
    let tmp = TempDir::new().unwrap();
    let lat = Lattice::new(1, 64, 16.0).unwrap();
    write_gaussian(tmp.path(), "u0.vpf", lat, 1.0);
    write_gaussian(tmp.path(), "u1.vpf", lat, 1.5);

    let common = [
        "--grid", "64", "--length", "16", "--horizon", "0.2", "--nodes", "9",
        "--u0", "u0.vpf", "--u1", "u1.vpf",
    ];
    let mut prop_args = vec!["--output-dir", "prop"];
    prop_args.extend_from_slice(&common);
    prop_args.push("propagate");
    let out = platelab(&prop_args, tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut solve_args = vec!["--output-dir", "solve"];
    solve_args.extend_from_slice(&common);
    solve_args.extend_from_slice(&["solve", "--nonlinearity", "zero"]);
    let out = platelab(&solve_args, tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for m in 0..9 {
        let name = format!("node_{m:04}.vpf");
        let a = fs::read(tmp.path().join("prop").join(&name)).unwrap();
        let b = fs::read(tmp.path().join("solve").join(&name)).unwrap();
        assert_eq!(a, b, "trajectory file {name} differs");
    }
    let a = fs::read(tmp.path().join("prop/trajectory.csv")).unwrap();
    let b = fs::read(tmp.path().join("solve/trajectory.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn experiment_runs_are_byte_identical_for_a_fixed_seed() {
    let tmp = TempDir::new().unwrap();
    for dir in ["a", "b"] {
        let out = platelab(
            &[
                "--grid", "128", "--length", "32", "--seed", "11", "--family-size", "4",
                "--output-dir", dir, "experiment", "product",
            ],
            tmp.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(tmp.path().join("a/product.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/product.csv")).unwrap();
    assert_eq!(a, b);
    let a = fs::read(tmp.path().join("a/product.verdict.txt")).unwrap();
    let b = fs::read(tmp.path().join("b/product.verdict.txt")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn inconsistent_experiment_verdict_exits_two() {
    let tmp = TempDir::new().unwrap();
    // At a small torus the chirp growth arm cannot reach the factor-10
    // threshold, so the run completes with an Inconsistent verdict.
    let out = platelab(
        &[
            "--grid", "128", "--length", "32", "--family-size", "3", "--t-values", "1,4",
            "experiment", "chirp", "--p", "inf", "--q", "1",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let verdict = fs::read_to_string(tmp.path().join("chirp.verdict.txt")).unwrap();
    assert!(verdict.contains("Inconsistent"), "{verdict}");
    let csv = fs::read_to_string(tmp.path().join("chirp.csv")).unwrap();
    assert!(csv.starts_with("arm,"), "{csv}");
}

#[test]
fn stft_command_writes_csv() {
    let tmp = TempDir::new().unwrap();
    let lat = Lattice::new(1, 32, 16.0).unwrap();
    write_gaussian(tmp.path(), "f.vpf", lat, 1.0);
    let out = platelab(
        &["--grid", "32", "--length", "16", "stft", "--input", "f.vpf", "--out", "v.csv"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("v.csv")).unwrap();
    assert!(csv.starts_with("x_index,omega_index,abs_value\n"));
    assert_eq!(csv.lines().count(), 1 + 32 * 32);
}

#[test]
fn lattice_mismatch_between_flags_and_file_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let lat = Lattice::new(1, 64, 16.0).unwrap();
    write_gaussian(tmp.path(), "f.vpf", lat, 1.0);
    let out = platelab(
        &["--grid", "128", "--length", "16", "norm", "--input", "f.vpf"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("does not match"), "{stderr}");
}

#[test]
fn solve_reports_powerlaw_convergence() {
    let tmp = TempDir::new().unwrap();
    let lat = Lattice::new(1, 64, 16.0).unwrap();
    write_gaussian(tmp.path(), "u0.vpf", lat, 1.0);
    write_gaussian(tmp.path(), "u1.vpf", lat, 1.5);
    let out = platelab(
        &[
            "--grid", "64", "--length", "16", "--horizon", "0.1", "--nodes", "17",
            "--u0", "u0.vpf", "--u1", "u1.vpf", "solve", "--nonlinearity", "powerlaw",
            "--lambda-re", "0.001", "--power-k", "1",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("converged=true"), "{stdout}");
    let conv = fs::read_to_string(tmp.path().join("convergence.csv")).unwrap();
    assert!(conv.starts_with("iteration,increment\n"));
}
