use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lharm() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lharm"));
    c.env_remove("LHARM_OUT_DIR");
    c
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    lharm()
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn lharm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn verdicts(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL "))
        .map(String::from)
        .collect()
}

fn assert_verdict_format(line: &str) {
    let parts: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(parts.len(), 5, "{line}");
    for (p, key) in parts[2..].iter().zip(["measured=", "bound=", "ratio="]) {
        let v = p.strip_prefix(key).unwrap_or_else(|| panic!("{line}"));
        v.parse::<f64>().unwrap_or_else(|_| panic!("{line}"));
    }
}

#[test]
fn eig_interval_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["eig", "--domain", config("interval_quarter.json").to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stdout(&o));
    let csv = fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for (k, row) in rows.iter().enumerate() {
        let f: Vec<&str> = row.split(',').collect();
        let lam: f64 = f[1].parse().unwrap();
        let exact = 32.0 * (1.0 - ((k + 1) as f64 * std::f64::consts::PI / 4.0).cos());
        assert!((lam - exact).abs() <= 1e-12 * exact, "{lam} vs {exact}");
    }
    for v in verdicts(&o) {
        assert_verdict_format(&v);
    }
}

#[test]
fn measure_one_point_is_one_seventh() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["measure", "--spec", config("one_point_cylinder.json").to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success());
    let v = verdicts(&o);
    assert!(v.iter().any(|l| l.starts_with("PASS spectral-vs-direct")));
    let mid = fs::read_to_string(dir.path().join("measure_mid.csv")).unwrap();
    let value: f64 = mid.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 1.0 / 7.0).abs() < 1e-15);
}

#[test]
fn solve_round_trips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    // boundary of the δ = 1/4 unit square, data x + 2y (harmonic)
    let mut b = String::from("coord_1,coord_2,value\n");
    for x in 0..=4i64 {
        for y in 0..=4i64 {
            let on_edge = x == 0 || x == 4 || y == 0 || y == 4;
            let corner = (x == 0 || x == 4) && (y == 0 || y == 4);
            if on_edge && !corner {
                b.push_str(&format!("{x},{y},{}\n", (x + 2 * y) as f64 / 4.0));
            }
        }
    }
    let bpath = dir.path().join("b.csv");
    fs::write(&bpath, b).unwrap();
    let o = run(
        &[
            "solve",
            "--domain",
            config("square_domain.json").to_str().unwrap(),
            "--boundary",
            bpath.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((f[2] - (f[0] + 2.0 * f[1]) / 4.0).abs() < 1e-14);
    }
    // re-emitting the parsed values reproduces the text exactly
    let again: String = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let v: f64 = f[2].parse().unwrap();
            format!("{},{},{v:?}\n", f[0], f[1])
        })
        .collect();
    assert_eq!(text.lines().skip(1).map(|l| format!("{l}\n")).collect::<String>(), again);
}

#[test]
fn malformed_csv_names_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let bpath = dir.path().join("bad.csv");
    fs::write(&bpath, "coord_1,coord_2,value\n0,1,0.5\n0,x,1\n").unwrap();
    let o = run(
        &[
            "solve",
            "--domain",
            config("square_domain.json").to_str().unwrap(),
            "--boundary",
            bpath.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.csv:3"), "{err}");
    assert!(err.contains("coord_2"), "{err}");
}

#[test]
fn malformed_json_names_file_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("spec.json");
    fs::write(&p, "{\n  \"base\": {\"mesh_denominator\": 2, \"dimension\": 1, \"kind\": \"box\"},\n  \"half_lenght_steps\": 2\n}\n").unwrap();
    let o = run(&["measure", "--spec", p.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("spec.json:3"), "{err}");
    assert!(err.contains("half_lenght_steps"), "{err}");
}

#[test]
fn unknown_flag_prints_usage() {
    let o = lharm().args(["pl", "--frobnicate"]).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn env_var_sets_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = lharm()
        .env("LHARM_OUT_DIR", dir.path())
        .args(["eig", "--domain", config("interval_quarter.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("eigenvalues.csv").exists());
    // --out wins over the environment
    let other = tempfile::tempdir().unwrap();
    let o = lharm()
        .env("LHARM_OUT_DIR", dir.path())
        .args(["eig", "--domain", config("interval_quarter.json").to_str().unwrap()])
        .arg("--out")
        .arg(other.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(other.path().join("eigenvalues.csv").exists());
}

#[test]
fn mc_is_reproducible_with_seed() {
    let spec = config("one_point_cylinder.json");
    let args = ["mc", "--spec", spec.to_str().unwrap(), "--start", "1,0", "--samples", "20000", "--seed", "9"];
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let a = run(&args, d1.path());
    let b = run(&args, d2.path());
    assert!(a.status.success() && b.status.success());
    assert_eq!(
        fs::read_to_string(d1.path().join("mc.csv")).unwrap(),
        fs::read_to_string(d2.path().join("mc.csv")).unwrap()
    );
}

#[test]
fn strip_pl_stability_pass() {
    let dir = tempfile::tempdir().unwrap();
    let strip = run(
        &[
            "strip",
            "--layers",
            "4",
            "--bottom",
            config("strip_bottom.csv").to_str().unwrap(),
            "--top",
            config("strip_top.csv").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(strip.status.success(), "{}", stdout(&strip));
    assert!(dir.path().join("layer_2.csv").exists());
    let spec = config("l_shape_cylinder.json");
    for sub in ["pl", "stability"] {
        let o = run(&[sub, "--spec", spec.to_str().unwrap(), "--seed", "4"], dir.path());
        assert!(o.status.success(), "{sub}: {}", stdout(&o));
        for v in verdicts(&o) {
            assert_verdict_format(&v);
        }
    }
}

#[test]
fn failing_check_sets_status_one() {
    let dir = tempfile::tempdir().unwrap();
    // an absurd tolerance makes the spectral-vs-direct comparison fail
    let o = run(
        &[
            "measure",
            "--spec",
            config("l_shape_cylinder.json").to_str().unwrap(),
            "--tol",
            "1e-30",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL ")));
}

#[test]
fn empty_sweep_is_empty_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sweep", "--config", config("sweep_empty.json").to_str().unwrap()], dir.path());
    assert!(o.status.success());
    assert!(verdicts(&o).is_empty());
}

#[test]
fn sweep_measure_and_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    fs::write(
        &cfg,
        r#"{
  "measure": {
    "base": { "mesh_denominator": 4, "dimension": 1, "kind": "box", "side_lengths": [1] },
    "denominators": [4], "half_lengths": [1, 2, 3]
  },
  "refinement": { "denominators": [8, 16] }
}"#,
    )
    .unwrap();
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let t = fs::read_to_string(dir.path().join("sweep_measure.csv")).unwrap();
    let max_g: Vec<f64> = t
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(6).unwrap().parse().unwrap())
        .collect();
    assert_eq!(max_g.len(), 3);
    // decays by roughly exp(−a₁) ≈ 0.05 per unit of N
    for w in max_g.windows(2) {
        assert!(w[1] / w[0] < 0.06 && w[1] / w[0] > 0.04, "{max_g:?}");
    }
}
