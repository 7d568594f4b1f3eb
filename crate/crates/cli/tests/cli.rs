use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use attractorlab_cli::manifest::{read_manifest, sidecar};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attractorlab")).args(args).env_remove("ATTRACTORLAB_THREADS").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn coefficients(path: &Path) -> Vec<u64> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.parse().unwrap()).collect()
}

fn zero_rows(path: &Path) -> Vec<(f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            (c[0].parse().unwrap(), c[1].parse().unwrap())
        })
        .collect()
}

#[test]
fn gen_writes_coefficients_and_manifest() {
    let dir = TempDir::new().unwrap();
    let f5 = dir.path().join("f5.txt");
    ok(&["gen", "--n", "5", "--out", path_str(&f5)]);
    assert_eq!(coefficients(&f5), vec![0, 1, 2, 2, 1, 1]);
    let m = read_manifest(&sidecar(&f5)).unwrap();
    assert_eq!(m.command, "gen");
    assert_eq!(m.parameters["n"], 5);
    assert_eq!(m.outputs, vec![f5.clone()]);

    let f1 = dir.path().join("f1.txt");
    ok(&["gen", "--n", "1", "--out", path_str(&f1)]);
    assert_eq!(coefficients(&f1), vec![0, 1]);

    let q2 = dir.path().join("q2.txt");
    ok(&["gen", "--kind", "plane", "--n", "2", "--out", path_str(&q2)]);
    assert_eq!(coefficients(&q2), vec![0, 2, 1]);
}

#[test]
fn gen_to_stdout_round_trips() {
    let text = ok(&["gen", "--n", "30"]);
    let p = attractorlab::polygen::ExactPolynomial::from_text(&text).unwrap();
    assert_eq!(p, attractorlab::polygen::partition_coeffs(30).unwrap());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["gen", "--n", "0"],
        vec!["gen"],
        vec!["asympt", "--x", "0", "--n", "10"],
        vec!["asympt", "--x", "0.5", "--n", "0"],
        vec!["attractor", "--out-dir", "x", "--precision", "4"],
        vec!["--threads", "0", "gen", "--n", "3"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn origin_is_refused_cleanly() {
    let out = run(&["asympt", "--x", "0", "--n", "100"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: x = 0"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_inputs_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "partition-poly v1 kind=partition n=3\n0\n1\n").unwrap();
    let out = run(&["solve", "--input", path_str(&bad), "--out", path_str(&dir.path().join("z.txt"))]);
    assert_eq!(out.status.code(), Some(2));
    let zeros = dir.path().join("zeros.txt");
    fs::write(&zeros, "not a zero file\n").unwrap();
    let out = run(&["census", "--zeros", path_str(&zeros), "--out-dir", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_small_degrees() {
    let dir = TempDir::new().unwrap();
    let z2 = dir.path().join("z2.txt");
    ok(&["solve", "--n", "2", "--out", path_str(&z2)]);
    let mut zs = zero_rows(&z2);
    zs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    assert_eq!(zs.len(), 2);
    assert!((zs[0].0 + 1.0).abs() < 1e-30 && zs[0].1.abs() < 1e-30);
    assert_eq!(zs[1], (0.0, 0.0));

    let f200 = dir.path().join("f200.txt");
    let z200 = dir.path().join("z200.txt");
    ok(&["gen", "--n", "200", "--out", path_str(&f200)]);
    let report = ok(&["solve", "--input", path_str(&f200), "--out", path_str(&z200)]);
    assert!(report.contains("sum = -1.0000000000000000000"), "{report}");
    let zs = zero_rows(&z200);
    assert_eq!(zs.len(), 200);
    let sum: f64 = zs.iter().map(|z| z.0).sum();
    assert!((sum + 1.0).abs() < 1e-12);
    let m = read_manifest(&sidecar(&z200)).unwrap();
    assert_eq!(m.precision_bits, Some(128));
    assert_eq!(m.inputs, vec![f200]);
}

#[test]
fn solve_rejects_tolerance_below_precision() {
    let dir = TempDir::new().unwrap();
    let out = run(&["solve", "--n", "10", "--tol", "1e-60", "--out", path_str(&dir.path().join("z.txt"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn attractor_outputs() {
    let dir = TempDir::new().unwrap();
    let geo = dir.path().join("geo");
    let echo = ok(&["attractor", "--out-dir", path_str(&geo)]);
    let line = echo.lines().next().unwrap();
    let nums: Vec<f64> = line
        .trim_start_matches("triple point ")
        .trim_end_matches('i')
        .split(" + ")
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((nums[0] + 0.6922055811).abs() < 1e-6, "{line}");
    assert!((nums[1] - 0.6913717463).abs() < 1e-6, "{line}");

    let svg = fs::read_to_string(geo.join("attractor.svg")).unwrap();
    assert_eq!(svg.matches("<path class=\"curve").count(), 3);
    assert_eq!(svg.matches("class=\"unit-circle\"").count(), 1);

    for tag in ["12", "13", "23"] {
        let text = fs::read_to_string(geo.join(format!("c{tag}.curve"))).unwrap();
        assert!(text.starts_with(&format!("curve v1 pair={tag} ")));
        assert!(sidecar(&geo.join(format!("c{tag}.curve"))).exists());
    }
    let density = fs::read_to_string(geo.join("density.csv")).unwrap();
    let c23: Vec<&str> = density.lines().find(|l| l.starts_with("C23,")).unwrap().split(',').collect();
    assert!((c23[1].parse::<f64>().unwrap() - 0.02220012557).abs() < 1e-4);
}

#[test]
fn census_counts_and_reproducibility() {
    let dir = TempDir::new().unwrap();
    let geo = dir.path().join("geo");
    ok(&["attractor", "--out-dir", path_str(&geo)]);
    let z = dir.path().join("z300.txt");
    ok(&["solve", "--n", "300", "--out", path_str(&z)]);
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "").unwrap();

    let first = dir.path().join("a");
    let second = dir.path().join("b");
    for out in [&first, &second] {
        ok(&["census", "--zeros", path_str(&z), path_str(&empty), "--geometry", path_str(&geo), "--out-dir", path_str(out)]);
    }
    for name in ["census.csv", "families.csv", "density.csv", "z300.occupancy.csv"] {
        let a = fs::read(first.join(name)).unwrap();
        let b = fs::read(second.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
        assert!(sidecar(&first.join(name)).exists());
    }
    let csv = fs::read_to_string(first.join("census.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "degree,total_inside,q2,f1,f2,f3,pred_ls,pred_C");
    assert!(rows[2].starts_with("0,0,0,0,0,0,"), "{}", rows[2]);
    let cols: Vec<usize> = rows[1].split(',').take(6).map(|c| c.parse().unwrap()).collect();
    assert_eq!(cols[0], 300);
    assert_eq!(cols[3] + cols[4] + cols[5], cols[2]);
    assert!(cols[1] >= cols[2]);

    let svg = fs::read_to_string(first.join("z300.census.svg")).unwrap();
    assert_eq!(svg.matches("<path class=\"curve").count(), 3);
}

#[test]
fn asymptotic_table_inside_and_outside() {
    let table = ok(&["asympt", "--x", "0.5", "--n", "100,400,1600"]);
    let errs: Vec<f64> = table.lines().skip(1).map(|l| l.split(',').nth(6).unwrap().parse().unwrap()).collect();
    assert_eq!(errs.len(), 3);
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 0.1);

    let table = ok(&["asympt", "--x", "1.5", "--n", "800"]);
    let row: Vec<&str> = table.lines().nth(1).unwrap().split(',').collect();
    let (lon, limit): (f64, f64) = (row[7].parse().unwrap(), row[8].parse().unwrap());
    assert!((limit - 1.5f64.ln()).abs() < 1e-9);
    assert!((lon - limit).abs() < 0.02);
}

#[test]
fn asymptotic_table_to_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t.csv");
    ok(&["asympt", "--x", "-0.5", "--n", "300,301", "--out", path_str(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    let signs: Vec<(bool, bool)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[2].starts_with('-'), c[4].starts_with('-'))
        })
        .collect();
    assert_eq!(signs, vec![(false, false), (true, true)]);
    assert!(read_manifest(&sidecar(&out)).unwrap().command == "asympt");
}

#[test]
fn thread_cap_from_environment() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_attractorlab"))
        .args(["solve", "--n", "60", "--out", path_str(&dir.path().join("z.txt"))])
        .env("ATTRACTORLAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_attractorlab"))
        .args(["gen", "--n", "3"])
        .env("ATTRACTORLAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plots() {
    let dir = TempDir::new().unwrap();
    let digits = dir.path().join("digits.svg");
    ok(&["plot", "digits", "--n", "500", "--out", path_str(&digits)]);
    let stats = attractorlab::polygen::digit_stats(&attractorlab::polygen::partition_coeffs(500).unwrap());
    assert!(fs::read_to_string(&digits).unwrap().contains(&format!("(max {})", stats.max_digits)));

    let z = dir.path().join("z.txt");
    ok(&["solve", "--n", "50", "--out", path_str(&z)]);
    let zeros = dir.path().join("zeros.svg");
    ok(&["plot", "zeros", "--zeros", path_str(&z), "--out", path_str(&zeros)]);
    let svg = fs::read_to_string(&zeros).unwrap();
    assert_eq!(svg.matches("<circle cx").count(), 50);

    let density = dir.path().join("density.svg");
    ok(&["plot", "density", "--out", path_str(&density)]);
    assert_eq!(fs::read_to_string(&density).unwrap().matches("<path class=\"density").count(), 3);
    assert!(sidecar(&density).exists());
}
