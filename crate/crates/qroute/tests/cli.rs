//! End-to-end tests of the `qroute` binary: exit codes, the
//! transform -> emit -> re-parse -> verify loop, bench, gen and dist.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_qroute")
}

fn run(args: &[&str]) -> Output {
    Command::new(exe()).args(args).output().unwrap()
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qroute-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn transform(input: &Path, dir: &Path, arch: &str, extra: &[&str]) -> (PathBuf, PathBuf, Output) {
    let out = dir.join("out.qasm");
    let report = dir.join("report.json");
    let mut args = vec![
        "transform".to_string(),
        "-i".into(),
        input.display().to_string(),
        "-o".into(),
        out.display().to_string(),
        "--arch".into(),
        arch.into(),
        "--report".into(),
        report.display().to_string(),
        "--seed".into(),
        "7".into(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    let output = Command::new(exe()).args(&args).output().unwrap();
    (out, report, output)
}

#[test]
fn transform_verify_loop_passes_and_detects_corruption() {
    let dir = tmpdir("verify");
    let input = fixtures_dir().join("alu-v0_27.qasm");
    let (out, report, output) = transform(&input, &dir, "qx5", &["--self-check"]);
    assert!(output.status.success(), "{output:?}");

    // Independent file-level verification through the verify subcommand.
    let v = run(&[
        "verify",
        "--logical",
        input.to_str().unwrap(),
        "--physical",
        out.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(v.status.success(), "{v:?}");
    assert!(String::from_utf8_lossy(&v.stdout).contains("PASS"));

    // Corrupt the physical circuit: flip the operands of the last cx.
    let text = std::fs::read_to_string(&out).unwrap();
    let corrupted: Vec<String> = {
        let mut lines: Vec<String> = text.lines().map(|l| l.to_string()).collect();
        let idx = lines
            .iter()
            .rposition(|l| l.starts_with("cx "))
            .expect("routed circuit has a cx");
        let l = lines[idx].clone();
        let args = l.trim_start_matches("cx ").trim_end_matches(';');
        let (a, b) = args.split_once(',').unwrap();
        lines[idx] = format!("cx {},{};", b.trim(), a.trim());
        lines
    };
    let bad = dir.join("bad.qasm");
    std::fs::write(&bad, corrupted.join("\n") + "\n").unwrap();
    let v = run(&[
        "verify",
        "--logical",
        input.to_str().unwrap(),
        "--physical",
        bad.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(v.status.code(), Some(3), "corruption must exit 3: {v:?}");

    // A tampered report is an input error, not a crash.
    let rep_text = std::fs::read_to_string(&report).unwrap();
    let tampered = rep_text.replace("\"final_sigma\": [", "\"final_sigma\": [999,");
    let bad_report = dir.join("bad-report.json");
    std::fs::write(&bad_report, tampered).unwrap();
    let v = run(&[
        "verify",
        "--logical",
        input.to_str().unwrap(),
        "--physical",
        out.to_str().unwrap(),
        "--report",
        bad_report.to_str().unwrap(),
    ]);
    assert_eq!(v.status.code(), Some(2), "{v:?}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn emitted_circuit_reparses_and_respects_architecture() {
    let dir = tmpdir("reparse");
    let input = fixtures_dir().join("4gt13_92.qasm");
    let (out, report, output) = transform(&input, &dir, "qx5", &[]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("include \"qelib1.inc\";"));
    let parsed = qroute::qasm::parse_qasm(&text).unwrap();
    assert_eq!(parsed.circuit.num_qubits, 16);
    // Every CNOT lies on a directed edge of qx5.
    let ag = qroute::arch::qx5();
    for g in parsed.circuit.cnot_core() {
        assert!(ag.has_edge(g.control, g.target), "({}, {})", g.control, g.target);
    }
    // Measures survive, remapped to physical wires.
    assert_eq!(text.matches("measure").count(), 5);
    let rep: qroute::router::RouteReport =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep.original_size, 66);
    assert_eq!(
        rep.output_size,
        parsed.circuit.size(),
        "report size must match the emitted gate count"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes_follow_the_contract() {
    // 1: usage errors (bad flags or invalid parameter ranges).
    let out = run(&["transform", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let dir = tmpdir("codes");
    let input = fixtures_dir().join("4mod5-v1_22.qasm");
    let (_, _, out) = transform(&input, &dir, "q20", &["--sa-tmin", "200.0"]);
    assert_eq!(out.status.code(), Some(1), "invalid SA range is a usage error");
    let (_, _, out) = transform(&input, &dir, "q20", &["--weights", "0.5,0.4"]);
    assert_eq!(out.status.code(), Some(1), "w0 != 1 is a usage error");

    // 2: input errors (missing file, unknown arch, oversized circuit).
    let out = run(&[
        "transform",
        "-i",
        "/nonexistent.qasm",
        "--arch",
        "q20",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let (_, _, out) = transform(&input, &dir, "no-such-arch", &[]);
    assert_eq!(out.status.code(), Some(2));
    let (_, _, out) = transform(&input, &dir, "line-3", &[]);
    assert_eq!(out.status.code(), Some(2), "5 qubits cannot fit line-3");

    // Parse errors carry line/column and exit 2.
    let bad = dir.join("bad-gate.qasm");
    std::fs::write(&bad, "OPENQASM 2.0;\nqreg q[3];\nccx q[0],q[1],q[2];\n").unwrap();
    let out = run(&["transform", "-i", bad.to_str().unwrap(), "--arch", "q20"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "diagnostic should locate the error: {stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bench_tabulates_the_fixture_corpus() {
    let dir = tmpdir("bench");
    let csv = dir.join("bench.csv");
    let out = run(&[
        "bench",
        "--dir",
        fixtures_dir().to_str().unwrap(),
        "--arch",
        "q20",
        "--seed",
        "1",
        "--sa-restarts",
        "6",
        "--self-check",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("4mod5-v1_22"));
    let table = std::fs::read_to_string(&csv).unwrap();
    let mut saw_zero_overhead = 0;
    for line in table.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[5], "ok", "no circuit may abort the batch: {line}");
        if cols[3] == "0" {
            saw_zero_overhead += 1;
        }
    }
    assert!(saw_zero_overhead >= 4, "table-style zero-overhead rows expected");

    // Baseline join: equal added counts give a 0% improvement ratio.
    let base = dir.join("base.csv");
    std::fs::write(&base, "name,added\nalu-v0_27,6\n").unwrap();
    let out = run(&[
        "bench",
        "--dir",
        fixtures_dir().to_str().unwrap(),
        "--arch",
        "q20",
        "--seed",
        "1",
        "--sa-restarts",
        "6",
        "--baseline",
        base.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    // Equal added counts give a 0% improvement ratio.
    assert!(stdout.contains("improvement"), "{stdout}");
    assert!(stdout.contains("0.00%"), "{stdout}");

    // An empty corpus is an input error.
    let empty = dir.join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let out = run(&["bench", "--dir", empty.to_str().unwrap(), "--arch", "q20"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_dist_and_trace_outputs() {
    let dir = tmpdir("gen");
    let qasm = dir.join("ising.qasm");
    let out = run(&[
        "gen",
        "ising",
        "--qubits",
        "13",
        "-o",
        qasm.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let parsed = qroute::qasm::parse_qasm(&std::fs::read_to_string(&qasm).unwrap()).unwrap();
    assert_eq!(parsed.circuit.size(), 633);

    let csvp = dir.join("dist.csv");
    let out = run(&[
        "dist",
        "--arch",
        "qx5",
        "--matrix",
        "cnot",
        "-o",
        csvp.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csvp).unwrap();
    assert_eq!(csv.lines().count(), 17);
    // Row v3, column v1 (header column 0 is the row label): the worked value.
    let row3: Vec<&str> = csv.lines().nth(4).unwrap().split(',').collect();
    assert_eq!(row3[0], "v3");
    assert_eq!(row3[2], "11");

    // SA trace CSV exists and is well-formed.
    let trace = dir.join("trace.csv");
    let input = fixtures_dir().join("4mod5-v1_22.qasm");
    let (_, _, out) = transform(
        &input,
        &dir,
        "q20",
        &["--sa-trace", trace.to_str().unwrap()],
    );
    assert!(out.status.success());
    let trace_text = std::fs::read_to_string(&trace).unwrap();
    assert!(trace_text.starts_with("iteration,accepted_cost,best_cost\n"));
    assert!(trace_text.lines().count() > 1000);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seedless_run_records_its_seed() {
    let dir = tmpdir("seedless");
    let input = fixtures_dir().join("4mod5-v1_22.qasm");
    let out = dir.join("out.qasm");
    let report = dir.join("report.json");
    let output = run(&[
        "transform",
        "-i",
        input.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "--arch",
        "q20",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let rep: qroute::router::RouteReport =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(rep.seed.is_some(), "generated seed must be recorded");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn barrier_warning_reaches_stderr_and_tiny_circuit_adds_nothing() {
    let dir = tmpdir("barrier");
    let f = dir.join("b.qasm");
    std::fs::write(
        &f,
        "OPENQASM 2.0;\nqreg q[2];\nbarrier q[0],q[1];\ncx q[0],q[1];\n",
    )
    .unwrap();
    let report = dir.join("report.json");
    let out = run(&[
        "transform",
        "-i",
        f.to_str().unwrap(),
        "--arch",
        "line-2",
        "--seed",
        "1",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("barrier"));
    let rep: qroute::router::RouteReport =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep.added_gates, 0, "a satisfied 1-gate circuit adds nothing");
    assert_eq!(rep.output_size, 1);
    std::fs::remove_dir_all(&dir).ok();
}
