use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn dispquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dispquad"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("study.conf");
    fs::write(&path, body).unwrap();
    path
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = rows[0].iter().position(|h| h == name).unwrap();
    rows[1..].iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn rules_prints_nodes_and_weights() {
    let o = dispquad(&["rules", "nq2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "node,weight");
    assert_eq!(lines.len(), 3);
    let w: f64 = lines
        .iter()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((w - 1.0).abs() < 1e-15);
}

#[test]
fn stencil_prints_six_coefficients() {
    let o = dispquad(&["stencil", "full-g3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let k0: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((k0 - 1.0).abs() < 1e-15);
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn dispersion_fit_footer() {
    let o = dispquad(&["dispersion", "nq2", "--fit"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let order: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# order,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((order - 7.0).abs() < 0.1);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 9);
}

#[test]
fn derive_converges() {
    let o = dispquad(&["derive", "g25"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("# converged after"));
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(dispquad(&["stencil", "g7-magic"]).status.code(), Some(2));
    assert_eq!(dispquad(&["rules", "g9"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "[study]\nelements = 8\npresets = g25\ncolour = blue\n",
    );
    let o = dispquad(&["study", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":4"));
    let missing = dir.path().join("absent.conf");
    assert_eq!(
        dispquad(&["eigen", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn numerical_errors_exit_with_three() {
    let o = dispquad(&[
        "dispersion",
        "full-g3",
        "--ladder-min",
        "3",
        "--ladder-max",
        "4",
        "--ladder-points",
        "6",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn failed_study_leaves_no_summary() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join("summary.csv"), "stale\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "[study]\nelements = 8, 16\npresets = g25\nmodes = 100\noutput = out\n",
    );
    let o = dispquad(&["study", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.join("summary.csv").exists());
}

#[test]
fn study_is_deterministic_and_well_formed() {
    let dir = TempDir::new().unwrap();
    let body = "[study]\ndim = 1\nelements = 16, 32, 64\npresets = full-g3, nq2-g25-boundary\nmodes = 3\noutput = out\n\n[dispersion]\npresets = nq2, g2\n";
    let cfg = write_config(dir.path(), body);
    let run = || {
        let o = dispquad(&["study", cfg.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut files: Vec<PathBuf> = stdout(&o).lines().map(PathBuf::from).collect();
        files.sort();
        files
            .iter()
            .map(|p| (p.clone(), fs::read(p).unwrap()))
            .collect::<Vec<_>>()
    };
    let first = run();
    let second = run();
    assert_eq!(first, second);
    assert_eq!(first.len(), 6 + 2 + 1);

    let out = dir.path().join("out");
    let case = csv_rows(&out.join("full-g3_1d_open-uniform_n16.csv"));
    assert_eq!(case[0].join(","), dispquad::cli::REPORT_HEADER);
    assert_eq!(case.len(), 4);
    assert!(case.iter().all(|r| r.len() == case[0].len()));

    let summary = csv_rows(&out.join("summary.csv"));
    assert_eq!(summary[0].join(","), dispquad::cli::SUMMARY_HEADER);
    assert_eq!(summary.len(), 1 + 2 * 3);
    let slopes = column(&summary, "ev_slope");
    assert!(slopes[..3].iter().all(|s| (s - 4.0).abs() < 0.3));
    assert!(slopes[3..].iter().all(|s| (s - 6.0).abs() < 0.3));

    let disp = csv_rows(&out.join("dispersion_g2.csv"));
    assert_eq!(disp[0].join(","), dispquad::cli::DISPERSION_HEADER);
    assert!(disp.iter().all(|r| r.len() == 4));
}

#[test]
fn two_dimensional_study() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "[study]\ndim = 2\nelements = 8, 16\npresets = blend-g3-g2\nmodes = 4\noutput = out\n",
    );
    let o = dispquad(&["study", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(
        &dir.path()
            .join("out")
            .join("blend-g3-g2_2d_open-uniform_n16.csv"),
    );
    assert_eq!(rows.len(), 5);
    let labels: Vec<(String, String)> = rows[1..]
        .iter()
        .map(|r| (r[4].clone(), r[5].clone()))
        .collect();
    assert_eq!(labels[0], ("1".into(), "1".into()));
    let exact = column(&rows, "lambda_exact");
    assert!((exact[0] - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
}

#[test]
fn stretched_study_runs_for_mesh_independent_presets() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "[study]\nfamily = open-stretched\nstretch = 1.1\nelements = 16, 32\npresets = g25, blend-g3-g2\nmodes = 2\noutput = out\n",
    );
    let o = dispquad(&["eigen", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1 + 2 * 2 * 2);

    let bad = write_config(
        dir.path(),
        "[study]\nfamily = open-stretched\nstretch = 1.1\nelements = 16\npresets = nq2-g25-boundary\n",
    );
    assert_eq!(
        dispquad(&["eigen", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}
