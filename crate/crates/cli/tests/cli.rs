use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SECTOR_QUADRANT: &str = r#"
[curve]
orientation = -1
[curve.shape]
kind = "circular_sector"
radius = 20.0
aperture = 1.5707963267948966
"#;

const SMALL: &str = r#"
[coeffs]
nz = 4
nx = 4
[scan]
nz = 2
nx = 2
[sector]
n_radius = 6
n_aperture = 8
efficiency_radii = [1.0, 5.0]
[optimize]
seeds = 3
[profiles]
points = 20
[figures]
radial_points = 10
coupling_points = 5
"#;

fn run(dir: &Path, config: Option<&str>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_adiacycle"));
    cmd.current_dir(dir).env("RUST_LOG", "warn").env_remove("ADIACYCLE_THREADS");
    if let Some(text) = config {
        fs::write(dir.join("run.toml"), text).unwrap();
        cmd.args(["--config", "run.toml"]);
    }
    cmd.args(args).output().unwrap()
}

/// Parses a CSV written by the tool: comment header, column row, data rows.
fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let head = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (head, rows)
}

fn column(head: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = head.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn coeffs_grid_with_header() {
    let dir = TempDir::new().unwrap();
    let cfg = "[coeffs]\nz_range = [0.0, 2.0]\nx_range = [0.0, 2.0]\nnz = 2\nnx = 2\n";
    let out = run(dir.path(), Some(cfg), &["--out", "o", "coeffs"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.path().join("o/coeffs.csv");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# adiacycle "));
    assert!(text.contains("# natural units"));
    assert!(text.contains("#   nz = 2"));
    let (head, rows) = table(&path);
    assert_eq!(rows.len(), 4);
    let z = column(&head, &rows, "b_z");
    let x = column(&head, &rows, "b_x");
    let k = column(&head, &rows, "kappa");
    let lr = column(&head, &rows, "lambda_r");
    for i in 0..4 {
        assert_eq!(lr[i].is_nan(), z[i] == 0.0 && x[i] == 0.0);
        if z[i] == 0.0 || x[i] == 0.0 {
            assert_eq!(k[i], 0.0);
        } else {
            assert!(k[i] > 0.0);
        }
    }
}

#[test]
fn eval_quadrant_sector() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), Some(SECTOR_QUADRANT), &["--out", "o", "eval"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let area = v["area_A"].as_f64().unwrap();
    assert!((area - 2f64.ln()).abs() < 1e-6, "{area}");
    assert!(v["engine"]["p_max"].as_f64().unwrap() > 0.0);
    let saved: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/eval.json")).unwrap()).unwrap();
    assert_eq!(saved["header"]["command"], "eval");
}

#[test]
fn degenerate_curve_exits_with_domain_code() {
    let dir = TempDir::new().unwrap();
    let cfg = "[curve]\n[curve.shape]\nkind = \"ellipse\"\ncenter = { b_z = 1.0, b_x = 1.0 }\na = 0.0\nb = 0.0\n";
    let out = run(dir.path(), Some(cfg), &["--out", "o", "eval"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn bad_config_exits_with_one() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), Some("[bath]\ngama = 1\n"), &["coeffs"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gama"));
    let out = run(dir.path(), Some("[coeffs]\nnz = 0\n"), &["coeffs"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(dir.path(), None, &["--config", "missing.toml", "coeffs"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sector_family_peak() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), None, &["--out", "o", "sector"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (head, rows) = table(&dir.path().join("o/sector.csv"));
    assert_eq!(rows.len(), 40 * 64);
    let best = column(&head, &rows, "power_objective").into_iter().fold(0.0, f64::max);
    assert!((best / 0.022 - 1.0).abs() < 0.1, "{best}");
    let (_, ridge) = table(&dir.path().join("o/sector_ridge.csv"));
    assert_eq!(ridge.len(), 40);
    let (head, rows) = table(&dir.path().join("o/sector_efficiency.csv"));
    let eta = column(&head, &rows, "eta_max");
    assert!(eta.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = "[optimize]\ncenter = [2.0, 1.0]\nseeds = 3\n";
    for o in ["a", "b"] {
        let out = run(dir.path(), Some(cfg), &["--out", o, "--threads", "2", "optimize"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["optimize_trace.csv", "optimize.json"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = "[optimize]\ncenter = [2.0, 1.0]\nseeds = 3\n";
    let out = run(dir.path(), Some(cfg), &["--out", "o", "--seed", "11", "optimize"]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/optimize.json")).unwrap()).unwrap();
    assert!(v["header"]["config"].as_str().unwrap().contains("seed = 11"));
}

#[test]
fn reproduce_figures_small() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), Some(SMALL), &["--out", "f", "--threads", "1", "reproduce-figures"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for n in 2..=10 {
        let p = dir.path().join(format!("f/fig{n}.csv"));
        let (_, rows) = table(&p);
        assert!(!rows.is_empty(), "fig{n}");
    }
    let out = run(dir.path(), Some(SMALL), &["--out", "s", "sector"]);
    assert!(out.status.success());
    let (h8, r8) = table(&dir.path().join("f/fig8.csv"));
    let (hs, rs) = table(&dir.path().join("s/sector.csv"));
    let m8 = column(&h8, &r8, "power_objective").into_iter().fold(0.0, f64::max);
    let ms = column(&hs, &rs, "power_objective").into_iter().fold(0.0, f64::max);
    assert_eq!(m8, ms);
}
