//! End-to-end behavior of the binary: subcommands, formats, config files,
//! witness replay, and exit codes.

use std::process::Command;

fn rmx() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rmx"))
}

#[test]
fn verify_emits_json_and_exits_zero() {
    let out = rmx()
        .args(["verify", "torus-identities", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["suite"], "torus-identities");
    assert!(parsed["checks"].as_array().unwrap().len() >= 8);
}

#[test]
fn unknown_suite_exits_two() {
    let out = rmx().args(["verify", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_sets_defaults() {
    let dir = std::env::temp_dir().join(format!("rmx-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("rmx.conf");
    std::fs::write(&cfg, "format = json\ntrials = 2\nseed = 9\n").unwrap();
    let out = rmx()
        .args(["verify", "torus-identities", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["seed"], 9);
    assert_eq!(parsed["oracle"]["trials"], 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn deterministic_json_output() {
    let run = || {
        rmx()
            .args(["verify", "formulas", "--format", "json", "--seed", "5"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn compute_objects() {
    let out = rmx()
        .args([
            "compute", "loop-e", "--n", "3", "--m", "4", "--k", "2", "--r", "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("q[").count(), 12); // six quadratic terms

    let out = rmx()
        .args(["compute", "quiver", "--n", "3", "--m", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // one line per arrow, "u -> v"
    assert!(text.lines().all(|l| l.contains(" -> ")));
    assert_eq!(text.lines().count(), 3 * 3 + 2 * 2 * 3);

    let out = rmx()
        .args(["compute", "geometric-r", "--n", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());

    // a mutation word through the textual interface
    let out = rmx()
        .args([
            "compute",
            "mutate",
            "--n",
            "3",
            "--m",
            "2",
            "--kind",
            "x",
            "--word",
            "mu(v(1,1)),mu(v(1,1))",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("xv(1,1) = v(1,1)"));
}

#[test]
fn witness_replay_roundtrip() {
    use rmx_core::qtorus::{lambda_pq, Gen};
    use rmx_core::skew::{Oracle, SkewExpr, SpecConfig, Verdict};

    // a deliberately false identity produces a witness
    let comm = lambda_pq(3).unwrap();
    let p1 = SkewExpr::gen(comm.index_of(&Gen::P(1)).unwrap());
    let q1 = SkewExpr::gen(comm.index_of(&Gen::Q(1)).unwrap());
    let oracle = Oracle::new(comm, SpecConfig::default());
    let verdict = oracle
        .check_pair(
            "false identity",
            &SkewExpr::mul2(p1.clone(), q1.clone()),
            &SkewExpr::mul2(q1, p1),
        )
        .unwrap();
    let Verdict::NotEqual(witness) = verdict else {
        panic!("expected a refutation");
    };
    let dir = std::env::temp_dir().join(format!("rmx-wit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("witness.json");
    std::fs::write(&path, serde_json::to_string(&witness).unwrap()).unwrap();

    let out = rmx().arg("replay").arg(&path).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("reproduces"));
    std::fs::remove_dir_all(&dir).ok();
}
