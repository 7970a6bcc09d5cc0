use std::path::Path;
use std::process::{Command, Output};

fn cvwitness(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvwitness"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv(out: &Output) -> (String, Vec<Vec<f64>>) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn headers_are_exact() {
    let cases = [
        ("cat-scan", "alpha,E2,E4"),
        ("mirror-scan", "omega_m_t,E2,E4,E4_cov_only"),
        (
            "distance-scan",
            "omega_m_t,d_00_01,d_00_10,d_00_11,d_01_10,d_01_11,d_10_11",
        ),
        ("lambda-scan", "lambda,E4"),
        ("bound-check", "omega_m_t,E4,lower_bound"),
    ];
    for (cmd, want) in cases {
        let (header, rows) = csv(&cvwitness(&[cmd, "--steps", "4"]));
        assert_eq!(header, want);
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.len() == want.split(',').count()));
    }
}

#[test]
fn cat_scan_defaults() {
    let (_, rows) = csv(&cvwitness(&["cat-scan"]));
    assert_eq!(rows.len(), 60);
    assert_eq!(rows[0][0], 0.05);
    assert_eq!(rows[59][0], 3.0);
    for r in &rows {
        assert!(r[1] >= -1e-10, "E2 = {}", r[1]);
        assert!(r[2] <= r[1] + 1e-10);
    }
}

#[test]
fn mirror_scan_rows_interlace() {
    let (_, rows) = csv(&cvwitness(&["mirror-scan", "--lambda", "1"]));
    assert_eq!(rows.len(), 400);
    assert!((rows[399][0] - 4.0 * std::f64::consts::PI).abs() < 1e-15);
    assert!(rows.iter().all(|r| r[2] <= r[1] + 1e-10));
}

#[test]
fn gaussian_mirror_scan_detects_alike() {
    let (_, rows) = csv(&cvwitness(&[
        "mirror-scan",
        "--lambda",
        "0",
        "--steps",
        "80",
    ]));
    for r in &rows {
        assert_eq!(r[1] < -1e-10, r[2] < -1e-10, "row {r:?}");
    }
}

#[test]
fn lambda_scan_uses_log_grid() {
    let (_, rows) = csv(&cvwitness(&["lambda-scan"]));
    assert_eq!(rows.len(), 20);
    assert_eq!(rows[0][0], 1.0);
    assert_eq!(rows[19][0], 10.0);
    assert!((rows[1][0] / rows[0][0] - 10f64.powf(1.0 / 19.0)).abs() < 1e-12);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let out = cvwitness(&["mirror-scan", "--steps", "50", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
}

fn write(path: &Path, text: &str) -> String {
    std::fs::write(path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        &dir.path().join("scan.toml"),
        "g = 0.0\nlambda = 1.0\nt_steps = 6\n",
    );
    let (_, from_file) = csv(&cvwitness(&["mirror-scan", "--config", &cfg]));
    assert_eq!(from_file.len(), 6);
    assert!(from_file.iter().all(|r| r[2] >= -1e-9));
    let (_, flagged) = csv(&cvwitness(&[
        "mirror-scan",
        "--config",
        &cfg,
        "--g",
        "0.001",
        "--steps",
        "3",
    ]));
    assert_eq!(flagged.len(), 3);
    assert!(flagged[1][2] < -1e-10);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(&dir.path().join("bad.toml"), "colour = 3\n");
    let broken = write(&dir.path().join("broken.toml"), "g = = 1\n");
    let missing = dir.path().join("missing.toml");
    let cases: Vec<Vec<&str>> = vec![
        vec!["cat-scan", "--steps", "1"],
        vec!["mirror-scan", "--t-min", "3", "--t-max", "1"],
        vec!["mirror-scan", "--tol", "0"],
        vec!["mirror-scan", "--g", "-1"],
        vec!["lambda-scan", "--lambda-min", "0"],
        vec!["cat-scan", "--config", &unknown],
        vec!["cat-scan", "--config", &broken],
        vec!["cat-scan", "--config", missing.to_str().unwrap()],
        vec!["cat-scan", "--bogus"],
        vec!["no-such-command"],
    ];
    for args in cases {
        let out = cvwitness(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn validate_reports_json() {
    let out = cvwitness(&["validate", "--steps", "40"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for want in [
        "gaussian_cumulant_annihilation",
        "partial_transpose_involution",
        "symplectic_defect",
        "separable_ppt_positivity",
        "finite_difference_vs_analytic",
        "fock_oracle_agreement",
        "bound_inequality",
    ] {
        assert!(names.contains(&want), "missing {want}");
    }
}
