use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn smeared(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smeared"))
        .args(args)
        .env_remove("SMEARED_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn grid_reproduces_the_four_point_closed_form() {
    let text = stdout(&smeared(&["grid", "--n", "4"]));
    assert!(text.starts_with("index,x,residual\n"));
    let xs: Vec<f64> = csv_rows(&text).iter().map(|r| r[1]).collect();
    let s6 = 6f64.sqrt();
    let expected = [
        -(6.0 + 2.0 * s6).sqrt(),
        -(6.0 - 2.0 * s6).sqrt(),
        (6.0 - 2.0 * s6).sqrt(),
        (6.0 + 2.0 * s6).sqrt(),
    ];
    for (a, b) in xs.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn raw_grid_method_agrees() {
    let a = csv_rows(&stdout(&smeared(&["grid", "--n", "9"])));
    let b = csv_rows(&stdout(&smeared(&["grid", "--n", "9", "--method", "raw"])));
    for (ra, rb) in a.iter().zip(&b) {
        assert!((ra[1] - rb[1]).abs() < 1e-10);
    }
}

#[test]
fn theta1_boundary_is_printed() {
    let text = stdout(&smeared(&["positivity", "--family", "theta1", "--bracket", "0", "1"]));
    let v: f64 = text.trim().parse().unwrap();
    assert!((v - 0.3029054464).abs() < 1e-8);
    let text = stdout(&smeared(&["positivity", "--family", "theta1", "--bracket", "-1", "0"]));
    let w: f64 = text.trim().parse().unwrap();
    assert!((v + w).abs() < 1e-11);
}

#[test]
fn positivity_check_and_bracket_in_p() {
    let text = stdout(&smeared(&["positivity", "--family", "theta1", "--mu", "1/2"]));
    let row = &csv_rows(&text)[0];
    assert!(row[0] < 0.0);
    assert_eq!(row[1], 0.0);
    let text = stdout(&smeared(&[
        "positivity", "--family", "theta2", "--mu", "0", "--bracket", "1", "1.2", "--in-p",
    ]));
    let p: f64 = text.trim().parse().unwrap();
    assert!((p - (0.5 + 6f64.sqrt() / 4.0)).abs() < 1e-7);
}

#[test]
fn rational_parameters_are_accepted() {
    let a = stdout(&smeared(&["metric", "--mu", "1/8", "--p", "1/4"]));
    let b = stdout(&smeared(&["metric", "--mu", "0.125", "--p", "0.25"]));
    assert_eq!(a, b);
    let rows = csv_rows(&a);
    assert_eq!(rows[1][1], 0.5 + 2.0 * 0.25);
}

#[test]
fn figure_two_crosses_zero_in_the_expected_cell() {
    let text = stdout(&smeared(&[
        "figures", "--which", "2", "--n", "4", "--mu-range", "-0.6", "0.6", "--step", "0.005",
    ]));
    assert!(text.starts_with("mu,eig_1,eig_2,eig_3,eig_4\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 241);
    let at = |mu: f64| rows.iter().find(|r| (r[0] - mu).abs() < 1e-9).unwrap()[1];
    assert!(at(0.300) > 0.0 && at(0.305) < 0.0);
}

#[test]
fn figure_one_is_exact_at_zero() {
    let rows = csv_rows(&stdout(&smeared(&["figures", "--which", "1"])));
    let zero = rows.iter().find(|r| r[0].abs() < 1e-12).unwrap();
    for k in 1..=4 {
        assert!((zero[k] - zero[k + 4]).abs() < 1e-10);
    }
}

#[test]
fn figure_three_writes_scan_and_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig3.csv");
    stdout(&smeared(&["figures", "--which", "3", "--out", out.to_str().unwrap()]));
    let values = fs::read_to_string(&out).unwrap();
    assert!(values.starts_with("mu,p,smallest_eigenvalue\n"));
    assert_eq!(csv_rows(&values).len(), 301 * 141);
    let boundary = fs::read_to_string(dir.path().join("fig3_boundary.csv")).unwrap();
    assert!(boundary.starts_with("mu,p\n"));
    let near = csv_rows(&boundary)
        .iter()
        .map(|r| r[0].hypot(r[1] - 1.1124))
        .fold(f64::MAX, f64::min);
    assert!(near < 0.01);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_smeared"))
        .args(["quadrature", "--n", "5"])
        .env("SMEARED_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(dir.path().join("quadrature_n5.csv")).unwrap();
    assert!(text.starts_with("node,weight\n"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        stdout(&smeared(&[
            "scan", "--mu-range", "-1", "1", "--p-range", "0", "1.2", "--step", "0.02", "--out",
            p.to_str().unwrap(),
        ]));
        (fs::read(&p).unwrap(), fs::read(sibling(&p)).unwrap())
    };
    assert_eq!(run("a.csv"), run("b.csv"));
    let a = stdout(&smeared(&["hamiltonian", "--family", "theta1", "--mu", "0.2", "--format", "json"]));
    let b = stdout(&smeared(&["hamiltonian", "--family", "theta1", "--mu", "0.2", "--format", "json"]));
    assert_eq!(a, b);
}

fn sibling(p: &Path) -> std::path::PathBuf {
    let stem = p.file_stem().unwrap().to_str().unwrap();
    p.with_file_name(format!("{stem}_boundary.csv"))
}

#[test]
fn json_mirrors_csv() {
    let csv = csv_rows(&stdout(&smeared(&["quadrature", "--n", "3"])));
    let json = stdout(&smeared(&["quadrature", "--n", "3", "--format", "json"]));
    for row in &csv {
        assert!(json.contains(&format!("{}", row[1])) || json.contains(&format!("{:e}", row[1])));
    }
    let m = stdout(&smeared(&["factorize", "--family", "theta1", "--mu", "0.2", "--format", "json"]));
    assert!(m.contains("\"rows\": 4") && m.contains("\"cols\": 4"));
}

#[test]
fn factorization_outputs() {
    let omega = csv_rows(&stdout(&smeared(&["factorize", "--family", "theta0"])));
    assert!((omega[3][3] - (1.0f64 / 48.0).sqrt()).abs() < 1e-15);
    let q = csv_rows(&stdout(&smeared(&[
        "factorize", "--family", "theta1", "--mu", "0.2", "--part", "position",
    ])));
    for i in 0..4 {
        for j in 0..4 {
            assert!((q[i][j] - q[j][i]).abs() < 1e-9);
        }
    }
    let p = csv_rows(&stdout(&smeared(&["factorize", "--method", "perturbative", "--mu", "0.1"])));
    assert!((p[1][0] - 0.1 * 2f64.sqrt() * 1.02).abs() < 1e-15);
}

#[test]
fn exit_codes_and_single_line_diagnostics() {
    let cases: &[(&[&str], i32)] = &[
        (&["bogus"], 2),
        (&["grid", "--n", "four"], 2),
        (&["grid", "--n", "0"], 2),
        (&["metric", "--mu", "1/0"], 2),
        (&["scan", "--step", "0"], 2),
        (&["metric", "--n", "2", "--p", "0.3"], 2),
        (&["factorize", "--family", "theta1", "--mu", "0.5"], 3),
        (&["positivity", "--family", "theta1", "--bracket", "0", "0.2"], 3),
        (&["grid", "--n", "4", "--out", "/nonexistent-dir/x.csv"], 4),
    ];
    for (args, code) in cases {
        let out = smeared(args);
        assert_eq!(out.status.code(), Some(*code), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("smeared: "));
    }
}

#[test]
fn help_exits_cleanly() {
    let out = smeared(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("figures"));
}

#[test]
fn width_curve_peaks_inside_the_range() {
    let rows = csv_rows(&stdout(&smeared(&["width", "--p-range", "0", "1", "--step", "0.05"])));
    assert_eq!(rows.len(), 21);
    let peak = rows.iter().fold(&rows[0], |a, r| if r[1] > a[1] { r } else { a });
    assert!((peak[0] - 0.2).abs() < 1e-9 && peak[1] > 1.5);
    assert!(rows[20][1] < rows[10][1]);
}
