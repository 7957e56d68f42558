//! End-to-end tests of the binary: exit codes, file formats, pipelines,
//! determinism, and the documented table rows.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpwl2relu"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn bounds_reference_rows() {
    let out = run(&["bounds", "--q", "2", "--format", "csv"]);
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("1,2,2,3,6,11,16,128"),
        "got: {}",
        stdout(&out)
    );

    let out = run(&["bounds", "--k", "3", "--n", "2", "--format", "csv"]);
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("2,3,6,6,30,95,"),
        "got: {}",
        stdout(&out)
    );
    assert!(stdout(&out).contains("43046721"));

    let out = run(&["bounds", "--q", "1", "--format", "csv"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("1,1,1,1,0,0,2,2"));
}

#[test]
fn bounds_piece_sweep_matches_reference_curve() {
    let out = run(&["bounds", "--sweep", "q=1..5", "--n", "1", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let hidden: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|line| line.split(',').nth(5).unwrap())
        .collect();
    assert_eq!(hidden, vec!["0", "11", "44", "57", "150"]);
}

#[test]
fn bounds_component_sweep_caps_huge_comparators() {
    let out = run(&["bounds", "--sweep", "k=1..8", "--n", "1,2", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 16);
    // n=1 rows carry the reference hidden counts for k = 2, 3, 4.
    for needle in ["1,2,2,3,6,11,", "1,3,4,5,20,57,", "1,4,7,6,42,108,"] {
        assert!(text.contains(needle), "missing {needle} in: {text}");
    }
    // n=2, k=3 row.
    assert!(text.contains("2,3,6,6,30,95,"));
    // q = 8! pushes the exponential comparator over the print cap.
    let k8: Vec<&str> = text.lines().filter(|l| l.starts_with("1,8,")).collect();
    assert_eq!(k8.len(), 1);
    assert!(k8[0].ends_with(",-,98304") || k8[0].contains(",-,"), "got {}", k8[0]);
}

#[test]
fn bounds_rejects_contradictory_flags() {
    let out = run(&["bounds", "--k", "5", "--q", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("contradictory"));
}

#[test]
fn unknown_flag_exits_one() {
    let out = run(&["bounds", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_file_exits_one() {
    let out = run(&["compile", "-i", "/nonexistent/instance.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_json_exits_one_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(
        &path,
        r#"{"n": 1, "pieces": [{"A": [["1"]], "b": ["0"], "f": {"a": ["oops"], "b": "0"}}]}"#,
    )
    .unwrap();
    let out = run(&["compile", "-i", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("pieces[0].f.a[0]"));
}

#[test]
fn discontinuous_instance_exits_two_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("split.json");
    // |x| with the right branch shifted up by one: discontinuous at 0.
    std::fs::write(
        &path,
        r#"{"n": 1, "pieces": [
            {"A": [["1"]], "b": ["0"], "f": {"a": ["-1"], "b": "0"}},
            {"A": [["-1"]], "b": ["0"], "f": {"a": ["1"], "b": "1"}}
        ]}"#,
    )
    .unwrap();
    let out = run(&["compile", "-i", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("maps differ on the overlap"));
}

#[test]
fn compile_abs_reports_stats_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("abs.json");
    std::fs::write(
        &path,
        r#"{"n": 1, "pieces": [
            {"A": [["1"]], "b": ["0"], "f": {"a": ["-1"], "b": "0"}},
            {"A": [["-1"]], "b": ["0"], "f": {"a": ["1"], "b": "0"}}
        ]}"#,
    )
    .unwrap();
    let out = run(&["compile", "-i", path.to_str().unwrap(), "-o", "/dev/null"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report = stderr(&out);
    assert!(report.contains("pieces: 2"), "got: {report}");
    assert!(report.contains("components: 2"));
    assert!(report.contains("realized: depth=2 width=3 hidden=3"));
    assert!(report.contains("bound: depth=3 width=6 hidden=11"));
}

#[test]
fn roundtrip_default_flags_pass() {
    let out = run(&["roundtrip"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("roundtrip: PASS"));
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = run(&["gen", "--q", "6", "--seed", "11"]);
    let b = run(&["gen", "--q", "6", "--seed", "11"]);
    let c = run(&["gen", "--q", "6", "--seed", "12"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn roundtrip_is_deterministic_and_passes() {
    let a = run(&["roundtrip", "--seed", "5", "--relus", "5", "--points", "200"]);
    assert!(a.status.success(), "stderr: {}", stderr(&a));
    assert!(stdout(&a).contains("roundtrip: PASS"));
    let b = run(&["roundtrip", "--seed", "5", "--relus", "5", "--points", "200"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn roundtrip_relu_budget_exits_one() {
    let out = run(&["roundtrip", "--relus", "25"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("stage regions"));
}

fn chain_once(dir: &Path, q: usize, n: usize, seed: u64) {
    let inst = dir.join(format!("inst_{seed}.json"));
    let net = dir.join(format!("net_{seed}.json"));
    let seed = seed.to_string();
    let out = run(&[
        "gen",
        "--q",
        &q.to_string(),
        "--n",
        &n.to_string(),
        "--seed",
        &seed,
        "-o",
        inst.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "gen: {}", stderr(&out));
    let out = run(&[
        "compile",
        "-i",
        inst.to_str().unwrap(),
        "-o",
        net.to_str().unwrap(),
        "--check-samples",
        "8",
    ]);
    assert!(out.status.success(), "compile: {}", stderr(&out));
    let out = run(&[
        "verify",
        "--instance",
        inst.to_str().unwrap(),
        "--network",
        net.to_str().unwrap(),
        "--samples",
        "4",
        "--seed",
        &seed,
    ]);
    assert!(out.status.success(), "verify: {}", stderr(&out));
}

#[test]
fn gen_compile_verify_chain_100_seeds() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..100u64 {
        let q = (seed % 16) as usize + 1;
        let n = (seed % 2) as usize + 1;
        chain_once(dir.path(), q, n, seed);
    }
}

#[test]
fn compile_pipes_into_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let out = run(&["gen", "--q", "5", "--seed", "2", "-o", inst.to_str().unwrap()]);
    assert!(out.status.success());

    let compile = bin()
        .args(["compile", "-i", inst.to_str().unwrap()])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let network = compile.wait_with_output().unwrap();
    assert!(network.status.success());

    let mut verify = bin()
        .args(["verify", "--instance", inst.to_str().unwrap()])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    verify
        .stdin
        .as_mut()
        .unwrap()
        .write_all(&network.stdout)
        .unwrap();
    let out = verify.wait_with_output().unwrap();
    assert!(out.status.success());
}

#[test]
fn verify_detects_broken_network() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let net = dir.path().join("net.json");
    assert!(run(&["gen", "--q", "3", "--seed", "1", "-o", inst.to_str().unwrap()])
        .status
        .success());
    assert!(run(&[
        "compile",
        "-i",
        inst.to_str().unwrap(),
        "-o",
        net.to_str().unwrap()
    ])
    .status
    .success());
    // Shift the output-layer bias; that changes the function everywhere.
    let text = std::fs::read_to_string(&net).unwrap();
    let mut dto: serde_json::Value = serde_json::from_str(&text).unwrap();
    let last = dto["layers"].as_array().unwrap().len() - 1;
    dto["layers"][last]["b"][0] = serde_json::Value::String("1000".into());
    std::fs::write(&net, serde_json::to_string(&dto).unwrap()).unwrap();
    let out = run(&[
        "verify",
        "--instance",
        inst.to_str().unwrap(),
        "--network",
        net.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mismatch at"));
}

#[test]
fn bench_csv_shape() {
    let out = bin()
        .args(["bench", "--q-list", "1,2", "--n-list", "1", "--trials", "2", "--seed", "3"])
        .env("CPWL2RELU_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,n,seconds,depth,width,hidden");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,1,"));
    assert!(lines[2].starts_with("2,1,"));
    // Stats columns are deterministic even though the timing is not.
    assert!(lines[1].ends_with(",1,0,0"));
    for line in &lines[1..] {
        let seconds: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(seconds > 0.0, "non-positive timing in {line}");
    }
}
