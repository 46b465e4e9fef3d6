use std::path::{Path, PathBuf};

use ogeb::formats::state_set_to_json;
use ogeb::{build, Command, RunConfig, SetVariant};
use ogeb_core::nonlocality::ghz_basis_fixture;
use ogeb_core::nonlocality::CertifyMode;
use serde_json::Value;

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.schema.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(name: &str, doc: &str) {
    let v: Value = serde_json::from_str(doc).unwrap();
    let errors: Vec<String> = schema(name).iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{name}: {errors:#?}");
}

fn report(cfg: &RunConfig) -> String {
    build(cfg).unwrap().report.to_json()
}

#[test]
fn generate_report_and_files() {
    for (n, variant) in [(1, SetVariant::Standard), (3, SetVariant::Modified), (4, SetVariant::Oges)] {
        let mut cfg = RunConfig::new(Command::Generate).with_parties(n).with_variant(variant);
        cfg.dense = true;
        let built = build(&cfg).unwrap();
        assert_valid("generate", &built.report.to_json());
        for a in &built.artifacts {
            if a.name.ends_with(".family.json") {
                assert_valid("family", &a.contents);
            } else if a.name.ends_with(".states.json") {
                assert_valid("state-set", &a.contents);
            }
        }
        assert_eq!(built.artifacts.len(), 4);
    }
    assert_valid("state-set", &state_set_to_json(&ghz_basis_fixture()));
}

#[test]
fn verify_reports() {
    for (n, variant) in [(1, SetVariant::Standard), (3, SetVariant::Standard), (4, SetVariant::Modified), (3, SetVariant::Oges)] {
        let doc = report(&RunConfig::new(Command::Verify).with_parties(n).with_variant(variant));
        assert_valid("verify", &doc);
    }
    let dir = tempfile::tempdir().unwrap();
    let input: PathBuf = dir.path().join("ghz.json");
    std::fs::write(&input, state_set_to_json(&ghz_basis_fixture())).unwrap();
    let mut cfg = RunConfig::new(Command::Verify);
    cfg.input = Some(input);
    let doc = report(&cfg);
    assert_valid("verify", &doc);
    let v: Value = serde_json::from_str(&doc).unwrap();
    assert_eq!(v["variant"], Value::Null);
    assert_eq!(v["partition"], Value::Null);
}

#[test]
fn certify_reports() {
    let mut cfg = RunConfig::new(Command::Certify).with_parties(3);
    assert_valid("certify", &report(&cfg));
    cfg.timings = true;
    cfg.mode = CertifyMode::FullSweep;
    let doc = report(&cfg);
    assert_valid("certify", &doc);
    assert!(doc.contains("runtime_ms"));
    cfg.timings = false;
    cfg.drop_set = Some(3);
    cfg.solve.max_dim = usize::MAX;
    assert_valid("certify", &report(&cfg));
}

#[test]
fn prove_reports() {
    let mut cfg = RunConfig::new(Command::Prove).with_parties(4);
    cfg.cross_check = true;
    assert_valid("prove", &report(&cfg));
    let mut cfg = RunConfig::new(Command::Prove).with_parties(3);
    cfg.drop_set = Some(3);
    let doc = report(&cfg);
    assert_valid("prove", &doc);
    let v: Value = serde_json::from_str(&doc).unwrap();
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["cuts"][0]["failure"]["step"], 2);
}

#[test]
fn ghz_control_report() {
    assert_valid("ghz-control", &report(&RunConfig::new(Command::GhzControl)));
}

#[test]
fn schemas_reject_tampered_reports() {
    let doc = report(&RunConfig::new(Command::Certify).with_parties(3));
    let mut v: Value = serde_json::from_str(&doc).unwrap();
    let validator = schema("certify");
    assert!(validator.is_valid(&v));
    v["cuts"][0]["dimension"] = Value::from(-1);
    assert!(!validator.is_valid(&v));
    let mut v: Value = serde_json::from_str(&doc).unwrap();
    v.as_object_mut().unwrap().remove("verdict");
    assert!(!validator.is_valid(&v));
    let mut v: Value = serde_json::from_str(&doc).unwrap();
    v["unexpected"] = Value::from(true);
    assert!(!validator.is_valid(&v));
}
