use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(rel)
}

fn latfold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latfold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_instance() -> String {
    data("instances/ypyfip.json").to_str().unwrap().to_string()
}

fn synthetic_operator(dir: &Path, n: usize) -> PathBuf {
    let terms: Vec<Value> = (0..n)
        .map(|q| serde_json::json!({ "mask": format!("0x{:x}", 1u64 << q), "coeff": 0.1 * (q as f64 + 1.0) }))
        .collect();
    let layout: Vec<Value> = (0..n)
        .map(|_| serde_json::json!({ "role": "generic" }))
        .collect();
    let op = serde_json::json!({ "num_qubits": n, "terms": terms, "register_layout": layout });
    let path = dir.join(format!("op{n}.json"));
    std::fs::write(&path, op.to_string()).unwrap();
    path
}

#[test]
fn fold_finds_ground_state_and_writes_structure() {
    let tmp = TempDir::new().unwrap();
    let out = latfold(&[
        "fold",
        "--instance",
        &small_instance(),
        "--seed",
        "3",
        "--out",
        s(tmp.path()),
    ]);
    ok(&out);
    let result = read_json(&tmp.path().join("result.json"));
    let energy = result["result"]["reported_energy"].as_f64().unwrap();
    assert!((energy + 1.019).abs() < 1e-3, "energy {energy}");
    assert_eq!(result["overlaps"], Value::Bool(false));
    assert!(tmp.path().join("structure.xyz").exists());
    assert!(tmp.path().join("structure.pdb").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("-1.019"));
}

#[test]
fn same_seed_gives_identical_result_file() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        ok(&latfold(&[
            "fold",
            "--instance",
            &small_instance(),
            "--algorithm",
            "qaoa",
            "--seed",
            "11",
            "--out",
            s(dir.path()),
        ]));
    }
    let ra = std::fs::read(a.path().join("result.json")).unwrap();
    let rb = std::fs::read(b.path().join("result.json")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn validation_errors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.json");
    assert_eq!(
        code(&latfold(&[
            "fold",
            "--instance",
            s(&missing),
            "--out",
            s(tmp.path())
        ])),
        2
    );
    assert_eq!(
        code(&latfold(&[
            "repeat",
            "--instance",
            &small_instance(),
            "--trials",
            "0",
            "--out",
            s(tmp.path())
        ])),
        2
    );

    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"shots": 100, "colour": "red"}"#).unwrap();
    assert_eq!(
        code(&latfold(&[
            "fold",
            "--config",
            s(&cfg),
            "--instance",
            &small_instance()
        ])),
        2
    );

    let short = tmp.path().join("short.xyz");
    std::fs::write(&short, "3\nshort\nA 0 0 0\nB 1 0 0\nC 1 1 0\n").unwrap();
    let fixture = data("fixtures/top_qaoa_130.xyz");
    assert_eq!(code(&latfold(&["rmsd", s(&short), s(&fixture)])), 2);
}

#[test]
fn config_file_values_are_used() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"algorithm": "cvar_qaoa", "shots": 512, "iterations": 10, "seed": 5}"#,
    )
    .unwrap();
    ok(&latfold(&[
        "fold",
        "--config",
        s(&cfg),
        "--instance",
        &small_instance(),
        "--shots",
        "256",
        "--out",
        s(tmp.path()),
    ]));
    let result = read_json(&tmp.path().join("result.json"));
    assert_eq!(result["settings"]["shots"], 256);
    assert_eq!(result["settings"]["iterations"], 10);
    assert_eq!(result["result"]["algorithm"], "cvar_qaoa");
    let total: u64 = result["result"]["final_samples"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.as_u64().unwrap())
        .sum();
    assert_eq!(total, 256);
}

#[test]
fn exact_writes_full_spectrum() {
    let tmp = TempDir::new().unwrap();
    ok(&latfold(&[
        "exact",
        "--instance",
        &small_instance(),
        "--spectrum",
        "--out",
        s(tmp.path()),
    ]));
    let exact = read_json(&tmp.path().join("exact.json"));
    assert_eq!(exact["num_qubits"], 6);
    assert!((exact["min_energy"].as_f64().unwrap() + 1.019).abs() < 1e-3);
    let csv = std::fs::read_to_string(tmp.path().join("spectrum.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "bitstring,energy");
    assert_eq!(lines.len(), 65);
}

#[test]
fn exact_refuses_oversized_operator() {
    let tmp = TempDir::new().unwrap();
    let op = synthetic_operator(tmp.path(), 25);
    let out = latfold(&["exact", "--operator", s(&op), "--out", s(tmp.path())]);
    assert_eq!(
        code(&out),
        1,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(!tmp.path().join("exact.json").exists());
}

#[test]
fn synthetic_operator_folds_without_decoding() {
    let tmp = TempDir::new().unwrap();
    let op = synthetic_operator(tmp.path(), 4);
    ok(&latfold(&[
        "exact",
        "--operator",
        s(&op),
        "--out",
        s(tmp.path()),
    ]));
    let exact = read_json(&tmp.path().join("exact.json"));
    assert!((exact["min_energy"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(exact["minimizers"][0]["turns"], Value::Null);
    ok(&latfold(&[
        "fold",
        "--operator",
        s(&op),
        "--iterations",
        "20",
        "--out",
        s(tmp.path()),
    ]));
    assert!(!tmp.path().join("structure.xyz").exists());
}

#[test]
fn penalty_sweep_covers_grid() {
    let tmp = TempDir::new().unwrap();
    ok(&latfold(&[
        "sweep",
        "--instance",
        &small_instance(),
        "--param",
        "penalty_back",
        "--trials",
        "2",
        "--iterations",
        "15",
        "--shots",
        "256",
        "--out",
        s(tmp.path()),
    ]));
    let sweep = read_json(&tmp.path().join("sweep.json"));
    assert_eq!(sweep["grid"].as_array().unwrap().len(), 5);
    assert_eq!(sweep["values"].as_array().unwrap().len(), 5);
    let csv = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn depth_sweep_needs_qaoa() {
    let tmp = TempDir::new().unwrap();
    let args = [
        "sweep",
        "--instance",
        &small_instance(),
        "--param",
        "p",
        "--grid",
        "1,2",
        "--trials",
        "2",
        "--iterations",
        "10",
    ];
    let mut bad = args.to_vec();
    bad.extend(["--algorithm", "vqe", "--out", s(tmp.path())]);
    assert_eq!(code(&latfold(&bad)), 2);
    let mut good = args.to_vec();
    good.extend(["--algorithm", "qaoa", "--out", s(tmp.path())]);
    ok(&latfold(&good));
    assert_eq!(
        read_json(&tmp.path().join("sweep.json"))["grid"]
            .as_array()
            .unwrap()
            .len(),
        2
    );
}

#[test]
fn repeat_reports_convergence() {
    let tmp = TempDir::new().unwrap();
    ok(&latfold(&[
        "repeat",
        "--instance",
        &small_instance(),
        "--trials",
        "6",
        "--seed",
        "100",
        "--out",
        s(tmp.path()),
    ]));
    let report = read_json(&tmp.path().join("report.json"));
    let rate = report["convergence_rate"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&rate));
    assert_eq!(report["trials"], 6);
    let hist = std::fs::read_to_string(tmp.path().join("structure_histogram.csv")).unwrap();
    assert_eq!(hist.lines().next(), Some("key,count"));
    let counted: u64 = hist
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(counted, 6);
}

#[test]
fn rmsd_of_fixtures() {
    let a = data("fixtures/top_qaoa_130.xyz");
    let b = data("fixtures/top_vqe_310.xyz");
    let same = latfold(&["rmsd", s(&a), s(&a)]);
    ok(&same);
    assert_eq!(String::from_utf8_lossy(&same.stdout).trim(), "0.0000");
    let diff = latfold(&["rmsd", s(&a), s(&b)]);
    ok(&diff);
    assert_eq!(String::from_utf8_lossy(&diff.stdout).trim(), "0.6357");
}

#[test]
fn noisy_fold_with_mitigation_writes_calibration() {
    let tmp = TempDir::new().unwrap();
    ok(&latfold(&[
        "fold",
        "--instance",
        &small_instance(),
        "--noise",
        r#"{"p01":0.03,"p10":0.05}"#,
        "--mitigate",
        "full",
        "--shots",
        "1024",
        "--iterations",
        "20",
        "--out",
        s(tmp.path()),
    ]));
    let cal = read_json(&tmp.path().join("calibration.json"));
    assert_eq!(cal["num_qubits"], 6);
    let result = read_json(&tmp.path().join("result.json"));
    assert_eq!(result["settings"]["mitigate"], "full");
}

#[test]
fn bad_noise_spec_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let out = latfold(&[
        "fold",
        "--instance",
        &small_instance(),
        "--noise",
        "1.5",
        "--out",
        s(tmp.path()),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn mitigation_without_noise_uses_identity_calibration() {
    let tmp = TempDir::new().unwrap();
    ok(&latfold(&[
        "fold",
        "--instance",
        &small_instance(),
        "--mitigate",
        "tensored",
        "--iterations",
        "10",
        "--out",
        s(tmp.path()),
    ]));
    let cal = read_json(&tmp.path().join("calibration.json"));
    for m in cal["per_qubit"].as_array().unwrap() {
        assert_eq!(m, &serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));
    }
}

#[test]
fn repeat_cvar_qaoa_many_trials() {
    let tmp = TempDir::new().unwrap();
    ok(&latfold(&[
        "repeat",
        "--instance",
        &small_instance(),
        "--trials",
        "512",
        "--algorithm",
        "cvar_qaoa",
        "--out",
        s(tmp.path()),
    ]));
    let report = read_json(&tmp.path().join("report.json"));
    assert_eq!(report["trials"], 512);
    assert!(report["convergence_rate"].as_f64().unwrap() >= 0.9);
    assert!(tmp.path().join("energy_histogram.csv").exists());
}

#[test]
fn penalty_sweep_explicit_grid() {
    let tmp = TempDir::new().unwrap();
    ok(&latfold(&[
        "sweep",
        "--instance",
        &small_instance(),
        "--param",
        "penalty_back",
        "--grid",
        "0.1,1,10,100,1000",
        "--trials",
        "3",
        "--out",
        s(tmp.path()),
    ]));
    let sweep = read_json(&tmp.path().join("sweep.json"));
    assert_eq!(
        sweep["grid"],
        serde_json::json!([0.1, 1.0, 10.0, 100.0, 1000.0])
    );
    assert_eq!(sweep["reports"].as_array().unwrap().len(), 5);
}

#[test]
fn exact_on_side_chain_instance() {
    let tmp = TempDir::new().unwrap();
    let inst = data("instances/ypyfip_ipfy.json");
    ok(&latfold(&[
        "--threads",
        "1",
        "exact",
        "--instance",
        s(&inst),
        "--out",
        s(tmp.path()),
    ]));
    let exact = read_json(&tmp.path().join("exact.json"));
    assert_eq!(exact["num_qubits"], 17);
    for m in exact["minimizers"].as_array().unwrap() {
        assert_eq!(m["bitstring"].as_str().unwrap().len(), 17);
    }
}
