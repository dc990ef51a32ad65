use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn e1() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/e1.json")
}

fn planchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planchain")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn solves_e1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.json");
    let net = dir.path().join("net.txt");
    let run = planchain(&["chain", "solve", "--instance", path(&e1()), "--out", path(&out), "--dump-network", path(&net)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let sol = read_json(&out);
    assert_eq!(sol["objective"], 2);
    assert_eq!(sol["chains"][0]["plans"][1]["delay"], 1);
    assert!(!fs::read_to_string(net).unwrap().is_empty());

    let oracle = planchain(&["chain", "oracle", "--instance", path(&e1())]);
    assert_eq!(code(&oracle), 0);
    assert!(String::from_utf8_lossy(&oracle.stdout).contains("objective 2"));

    let fleet = planchain(&["chain", "solve", "--instance", path(&e1()), "--policy", "fleet", "--out", path(&out)]);
    assert_eq!(code(&fleet), 0);
    assert_eq!(read_json(&out)["objective"], 1);
}

#[test]
fn no_vehicle_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(e1()).unwrap();
    let bare = text.replace(r#"[{ "id": 1, "start": 0, "t_st": 0 }]"#, "[]");
    assert_ne!(bare, text);
    let inst = dir.path().join("bare.json");
    fs::write(&inst, bare).unwrap();
    let out = dir.path().join("sol.json");
    assert_eq!(code(&planchain(&["chain", "solve", "--instance", path(&inst), "--out", path(&out)])), 1);
    assert!(!out.exists());
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"schema_version\": 1,\n  \"travel\": 7\n}").unwrap();
    let run = planchain(&["chain", "solve", "--instance", path(&bad), "--out", path(&dir.path().join("x"))]);
    assert_eq!(code(&run), 2);
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 3"));
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&planchain(&["chain", "oracle", "--instance", path(&missing)])), 2);
}

#[test]
fn oracle_guard_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("big.json");
    assert_eq!(code(&planchain(&["gen", "chain", "--seed", "1", "--count", "12", "--out", path(&inst)])), 0);
    assert_eq!(code(&planchain(&["chain", "oracle", "--instance", path(&inst)])), 3);
}

#[test]
fn darp_methods_write_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("darp.json");
    assert_eq!(code(&planchain(&["gen", "darp", "--seed", "4", "--count", "4", "--out", path(&inst)])), 0);
    for method in ["proposed", "ih", "single-batch"] {
        let out = dir.path().join(format!("{method}.json"));
        let metrics = dir.path().join(method);
        let run = planchain(&[
            "darp", "run", "--instance", path(&inst), "--method", method, "--batch-secs", "10",
            "--out", path(&out), "--metrics-dir", path(&metrics), "--no-timing",
        ]);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
        let summary = fs::read_to_string(metrics.join("summary.csv")).unwrap();
        let row: Vec<&str> = summary.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], method);
        assert!(row[3].parse::<usize>().unwrap() >= 1);
        assert_eq!(row[4], "0");
        assert_eq!(read_json(&out)["objective"].to_string(), row[2]);
        assert!(metrics.join("occupancy.csv").exists() && metrics.join("delays.csv").exists());
    }
    let missing_batch = planchain(&[
        "darp", "run", "--instance", path(&inst), "--method", "proposed",
        "--out", path(&dir.path().join("x.json")), "--metrics-dir", path(dir.path()),
    ]);
    assert_eq!(code(&missing_batch), 2);
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["chain", "darp"] {
        let a = dir.path().join(format!("{kind}-a.json"));
        let b = dir.path().join(format!("{kind}-b.json"));
        for p in [&a, &b] {
            assert_eq!(code(&planchain(&["gen", kind, "--seed", "42", "--count", "7", "--out", path(p)])), 0);
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }
}
