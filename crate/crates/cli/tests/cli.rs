//! Exit-code soundness of the gen | attack | verify pipeline.

use std::path::Path;
use std::process::Command;

fn mce() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mce"))
}

fn tmpdir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("mce-cli-test-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn gen_instance(dir: &Path, seed: u64) -> (std::path::PathBuf, std::path::PathBuf) {
    let inst = dir.join(format!("inst-{seed}.json"));
    let sol = dir.join(format!("sol-{seed}.json"));
    let status = mce()
        .args(["gen", "--q", "11", "--m", "4", "--n", "4", "--k", "12"])
        .args(["--seed", &seed.to_string()])
        .arg("--out")
        .arg(&inst)
        .arg("--solution-out")
        .arg(&sol)
        .status()
        .unwrap();
    assert!(status.success());
    (inst, sol)
}

#[test]
fn pipeline_gen_attack_verify_is_exit_code_sound() {
    let dir = tmpdir("pipeline");
    let (inst, _planted_sol) = gen_instance(&dir, 41);

    let found_sol = dir.join("found.json");
    let stats = dir.join("stats.json");
    let status = mce()
        .arg("attack")
        .arg("--input")
        .arg(&inst)
        .arg("--solution-out")
        .arg(&found_sol)
        .arg("--stats-out")
        .arg(&stats)
        .args(["--seed", "41", "--deterministic", "--format", "json"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0), "attack must succeed on planted");

    let status = mce()
        .arg("verify")
        .arg("--input")
        .arg(&inst)
        .arg("--solution")
        .arg(&found_sol)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0), "recovered solution must verify");

    // stats JSON must expose the documented fields
    let js: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    for field in [
        "draws",
        "dim1_hulls",
        "keys",
        "collisions",
        "false_positives",
        "phase_times_ms",
        "success",
    ] {
        assert!(js.get(field).is_some(), "missing stats field {field}");
    }
    assert_eq!(js["success"], serde_json::Value::Bool(true));
}

#[test]
fn planted_solution_verifies_and_tampering_fails() {
    let dir = tmpdir("tamper");
    let (inst, sol) = gen_instance(&dir, 42);

    let status = mce()
        .arg("verify")
        .arg("--input")
        .arg(&inst)
        .arg("--solution")
        .arg(&sol)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    // tamper with one entry of P
    let mut js: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    let old = js["p"][0][0].as_u64().unwrap();
    js["p"][0][0] = serde_json::Value::from((old + 1) % 11);
    let tampered = dir.join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&js).unwrap()).unwrap();

    let out = mce()
        .arg("verify")
        .arg("--input")
        .arg(&inst)
        .arg("--solution")
        .arg(&tampered)
        .arg("--format")
        .arg("json")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "tampered solution must fail");
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err.get("error").is_some());
}

#[test]
fn out_of_range_instance_exits_2() {
    // k = m^2 - 1 on a square shape with the dual also out of range:
    // 2 x 3 with k = 3 has k_perp = 3 > m^2 - 2 = 2 in both orientations
    let dir = tmpdir("range");
    let inst = dir.join("inst.json");
    let status = mce()
        .args(["gen", "--q", "7", "--m", "2", "--n", "3", "--k", "3"])
        .arg("--out")
        .arg(&inst)
        .status()
        .unwrap();
    assert!(status.success());
    let out = mce()
        .arg("attack")
        .arg("--input")
        .arg(&inst)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("no orientation"), "got: {msg}");
}

#[test]
fn usage_errors_exit_2() {
    let out = mce().arg("attack").output().unwrap();
    assert_eq!(out.status.code(), Some(2), "missing --input is a usage error");

    let dir = tmpdir("parse");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = mce()
        .arg("verify")
        .arg("--input")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "parse errors are usage errors");
}

#[test]
fn stats_csv_has_documented_columns() {
    let out = mce()
        .args([
            "stats",
            "--kind",
            "hull-dim",
            "--q",
            "11",
            "--m",
            "4",
            "--k",
            "8",
            "--samples",
            "200",
            "--seed",
            "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("dim,count,fraction\n"));

    let out = mce()
        .args(["stats", "--kind", "count-classes", "--q", "7", "--m", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("classes="));
}
