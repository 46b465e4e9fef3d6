use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ogeb(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ogeb"))
        .args(args)
        .current_dir(dir)
        .env_remove("OGEB_OUT_DIR")
        .output()
        .unwrap()
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}\nstdout: {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

#[test]
fn three_party_oges_certifies_on_three_cuts() {
    let dir = tempfile::tempdir().unwrap();
    let out = ogeb(&["certify", "--n", "3", "--variant", "oges", "--mode", "lemma3", "--json", "-"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    let cuts = v["cuts"].as_array().unwrap();
    assert_eq!(cuts.len(), 3);
    assert!(cuts.iter().all(|c| c["trivial"] == true && c["dimension"] == 1));
    assert_eq!(v["verdict"], "pass");
    // The human summary goes to stderr when JSON takes stdout.
    assert!(String::from_utf8_lossy(&out.stderr).contains("verdict: PASS"));
}

#[test]
fn seven_party_proof_follows_the_second_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = ogeb(&["prove", "--n", "7", "--json", "proof.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("proof.json")).unwrap()).unwrap();
    assert_eq!(v["residue"], 1);
    assert_eq!(v["cuts"].as_array().unwrap().len(), 7);
    let trace = v["ledger_trace"].as_array().unwrap();
    let first_cut: Vec<&Value> = trace.iter().filter(|e| e["cut"] == "{2,3,4,5,6,7}").collect();
    let mut steps: Vec<(u64, &str)> =
        first_cut.iter().map(|e| (e["step"].as_u64().unwrap(), e["lemma"].as_str().unwrap())).collect();
    steps.dedup();
    assert_eq!(steps.iter().filter(|(_, l)| *l == "block-trivial").count(), 2);
    assert_eq!(steps.last().map(|s| s.1), Some("conclusion"));
    assert_eq!(first_cut[0]["fact"], "block(G^6_0 \\ {000000}, G^6_1) = 0");
}

#[test]
fn ghz_control_exits_zero_and_writes_to_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("reports");
    let out = Command::new(env!("CARGO_BIN_EXE_ogeb"))
        .arg("ghz-control")
        .current_dir(dir.path())
        .env("OGEB_OUT_DIR", &reports)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(reports.join("ghz-control.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert!(v["ghz"].as_array().unwrap().iter().all(|c| c["dimension"].as_u64().unwrap() > 1));
    assert_eq!(v["product"]["dimension"], 2);
}

#[test]
fn proof_without_the_constant_family_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = ogeb(&["prove", "--n", "3", "--drop-set", "3", "--json", "-"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let v = json_stdout(&out);
    assert!(v["cuts"][0]["failure"]["message"].as_str().unwrap().contains("witness family 3"));
}

#[test]
fn cross_checked_proof_passes_at_four_parties() {
    let dir = tempfile::tempdir().unwrap();
    let out = ogeb(&["prove", "--n", "4", "--cross-check", "--json", "-"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    for c in v["cuts"].as_array().unwrap() {
        assert_eq!(c["cross_check"]["passed"], true);
        assert!(c["cross_check"]["max_block_norm"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["certify", "--n", "2", "--variant", "modified"],
        &["verify", "--n", "13", "--variant", "standard"],
        &["certify", "--n", "3", "--frobnicate"],
        &["prove", "--n", "5", "--cross-check"],
        &["prove", "--n", "3", "--drop-set", "2"],
        &["verify", "--variant", "standard"],
        &["certify", "--n", "3", "--null-tol", "-1"],
        &["certify", "--input", "missing.json"],
        &["certify", "--n", "3", "--input", "missing.json"],
        &["certify", "--n", "6", "--variant", "oges"],
        &["generate", "--n", "7", "--variant", "standard", "--dense"],
        &["launch"],
    ];
    for args in cases {
        let out = ogeb(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let out = ogeb(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn large_oracle_needs_an_explicit_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = ogeb(&["certify", "--n", "4", "--max-oracle-dim", "9", "--json", "-"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the oracle limit"));
}

#[test]
fn generated_files_feed_back_into_verify_and_certify() {
    let dir = tempfile::tempdir().unwrap();
    let out = ogeb(&["generate", "--n", "3", "--variant", "modified", "--dense", "--out-dir", "data"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let data = dir.path().join("data");
    for f in ["modified-n3.family.txt", "modified-n3.family.json", "modified-n3.states.json", "modified-n3.dense.json", "generate-modified-n3.json"] {
        assert!(data.join(f).is_file(), "{f} missing");
    }
    let dense: Vec<Vec<f64>> = serde_json::from_str(&std::fs::read_to_string(data.join("modified-n3.dense.json")).unwrap()).unwrap();
    assert_eq!(dense.len(), 27);
    assert!(dense.iter().all(|v| v.len() == 54));

    let out = ogeb(&["verify", "--input", "data/modified-n3.states.json", "--json", "-"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_stdout(&out);
    assert_eq!(v["set_id"], "file:modified-n3.states.json");
    assert_eq!(v["sizes"]["expected_states"], 27);

    let out = ogeb(&["certify", "--input", "data/modified-n3.states.json", "--json", "-"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_stdout(&out)["verdict"], "pass");
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"n_parties\": 3}").unwrap();
    let out = ogeb(&["verify", "--input", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_orthogonal_input_is_a_failed_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let doc = serde_json::json!({
        "n_parties": 2, "local_dim": 2, "provenance": "external",
        "states": [
            {"set_index": 0, "k": 0, "order": 1, "support": [{"trits": "00", "exponent": 0}]},
            {"set_index": 1, "k": 0, "order": 1, "support": [{"trits": "00", "exponent": 0}, {"trits": "11", "exponent": 0}]}
        ]
    });
    std::fs::write(dir.path().join("overlap.json"), doc.to_string()).unwrap();
    assert_eq!(ogeb(&["certify", "--input", "overlap.json", "--json", "-"], dir.path()).status.code(), Some(1));
    assert_eq!(ogeb(&["verify", "--input", "overlap.json", "--json", "-"], dir.path()).status.code(), Some(1));
}

#[test]
fn repeated_runs_write_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = ogeb(&["verify", "--n", "5", "--variant", "standard", "--perm", "sampled", "--samples", "20", "--json", name], dir.path());
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}
