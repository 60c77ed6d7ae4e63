use assert_cmd::Command;
use predicates::prelude::*;

fn qmacfb() -> Command {
    Command::cargo_bin("qmacfb").unwrap()
}

fn write_mm2(dir: &tempfile::TempDir) -> std::path::PathBuf {
    let path = dir.path().join("mm2.json");
    std::fs::write(&path, "[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]").unwrap();
    path
}

fn parse_boundary(csv: &str) -> Vec<(f64, f64)> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("R1") && !l.trim().is_empty())
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn region_adder_default_grid_contains_pentagon_corners() {
    let out = qmacfb()
        .args(["region-adder", "--grid", "5"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let csv = String::from_utf8(out).unwrap();
    assert!(csv.contains("R1,R2"));
    assert!(csv.contains("# qmacfb"));
    let verts = parse_boundary(&csv);
    for corner in [(1.0, 0.5), (0.5, 1.0)] {
        assert!(
            verts
                .iter()
                .any(|v| (v.0 - corner.0).abs() < 1e-6 && (v.1 - corner.1).abs() < 1e-6),
            "missing corner {corner:?} in {verts:?}"
        );
    }
    // vertices sorted by increasing R1
    for w in verts.windows(2) {
        assert!(w[0].0 <= w[1].0 + 1e-12);
    }
}

#[test]
fn out_of_domain_alpha_exits_2() {
    qmacfb()
        .args([
            "region-adder",
            "--alpha0",
            "0.7",
            "--alpha1",
            "0.1",
            "--beta0",
            "0.1",
            "--beta1",
            "0.1",
        ])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("outside [0, 0.5]"));
}

#[test]
fn full_range_widens_the_domain() {
    qmacfb()
        .args([
            "region-adder",
            "--alpha0",
            "0.7",
            "--alpha1",
            "0.1",
            "--beta0",
            "0.1",
            "--beta1",
            "0.1",
            "--full-range",
        ])
        .assert()
        .success();
}

#[test]
fn dh_self_test_prints_one_bit() {
    let dir = tempfile::tempdir().unwrap();
    let mm2 = write_mm2(&dir);
    qmacfb()
        .args(["dh", "--rho"])
        .arg(&mm2)
        .arg("--sigma")
        .arg(&mm2)
        .args(["--eps", "0.5"])
        .assert()
        .success()
        .stdout("1.0\n");
}

#[test]
fn dh_with_disjoint_supports_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.json");
    let one = dir.path().join("one.json");
    std::fs::write(&zero, "[[[1,0],[0,0]],[[0,0],[0,0]]]").unwrap();
    std::fs::write(&one, "[[[0,0],[0,0]],[[0,0],[1,0]]]").unwrap();
    qmacfb()
        .args(["dh", "--rho"])
        .arg(&zero)
        .arg("--sigma")
        .arg(&one)
        .args(["--eps", "0.1"])
        .assert()
        .code(1)
        .stdout("inf\n");
}

#[test]
fn stein_probe_emits_one_row_per_blocklength() {
    let dir = tempfile::tempdir().unwrap();
    let rho = dir.path().join("rho.json");
    std::fs::write(&rho, "[[[0.9,0],[0,0]],[[0,0],[0.1,0]]]").unwrap();
    let mm2 = write_mm2(&dir);
    let out = qmacfb()
        .args(["stein-probe", "--rho"])
        .arg(&rho)
        .arg("--sigma")
        .arg(&mm2)
        .args(["--eps", "0.05", "--nmax", "4"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let csv = String::from_utf8(out).unwrap();
    assert!(csv.contains("n,rate"));
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("n,"))
        .collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("1,"));
    assert!(rows[3].starts_with("4,"));
}

#[test]
fn codebook_gen_dot_export() {
    qmacfb()
        .args([
            "codebook-gen",
            "--r1",
            "0.2",
            "--r2",
            "0.2",
            "--blocklen",
            "8",
            "--blocks",
            "2",
            "--dot",
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("digraph"));
}

#[test]
fn compare_reports_containment_of_generated_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.csv");
    let small = dir.path().join("small.csv");
    let point = |a0: &str, out: &std::path::Path| {
        qmacfb()
            .args([
                "region-adder",
                "--alpha0",
                a0,
                "--alpha1",
                "0.5",
                "--beta0",
                "0.5",
                "--beta1",
                "0.5",
                "--out",
            ])
            .arg(out)
            .assert()
            .success();
    };
    point("0.5", &big);
    point("0.1", &small);
    let out = qmacfb()
        .args(["compare", "--a"])
        .arg(&big)
        .arg("--b")
        .arg(&small)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let report: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(report["contains"], serde_json::Value::Bool(true));
    assert!(report["max_gap"].as_f64().unwrap() > 0.0);
    assert_eq!(report["per_direction"].as_array().unwrap().len(), 256);
    assert_eq!(report["version"].as_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn outputs_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    // same output path both times: the echoed config is part of the bytes
    let run = |threads: &str| {
        let path = dir.path().join("report.json");
        qmacfb()
            .env("QMACFB_THREADS", threads)
            .args([
                "simulate-qcl",
                "--r1",
                "0.25",
                "--r2",
                "0.25",
                "--blocklen",
                "16",
                "--blocks",
                "2",
                "--trials",
                "12",
                "--seed",
                "7",
                "--out",
            ])
            .arg(&path)
            .assert()
            .success();
        std::fs::read(&path).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn region_general_reads_an_ensemble_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ens.json");
    let basis0 = "[[[1,0],[0,0]],[[0,0],[0,0]]]";
    let basis1 = "[[[0,0],[0,0]],[[0,0],[1,0]]]";
    let cfg = format!(
        concat!(
            "{{\"u_size\":2,\"x1_size\":2,\"x2_size\":2,",
            "\"p_u\":[0.5,0.5],",
            "\"p_v1x1_given_u\":[[0.5,0.5],[0.5,0.5]],",
            "\"p_v2x2_given_u\":[[0.5,0.5],[0.5,0.5]],",
            "\"theta\":[{b0},{b1}],\"phi\":[{b0},{b1}]}}"
        ),
        b0 = basis0,
        b1 = basis1
    );
    std::fs::write(&path, cfg).unwrap();
    let out = qmacfb()
        .args(["region-general", "--ensemble"])
        .arg(&path)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let report: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let b = &report["bounds"];
    assert!((b["b1"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((b["bsum"].as_f64().unwrap() - 1.5).abs() < 1e-9);
}

#[test]
fn unknown_flag_exits_2() {
    qmacfb()
        .args(["region-adder", "--bogus"])
        .assert()
        .code(2);
}
