use std::process::Command;

use degen_atlas_cli::{flatten, parse_text, run, Outcome, SCHEMA};
use proptest::prelude::*;
use serde_json::Value;

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("degen-atlas").chain(args.iter().copied()), None)
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let out = cli(&a);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn text_matches_json(args: &[&str]) {
    let v = json(args);
    let text = cli(args);
    assert_eq!(text.code, 0);
    assert_eq!(parse_text(&text.stdout), flatten(&v), "{args:?}");
}

#[test]
fn text_and_json_carry_the_same_report() {
    for args in [
        &["list"][..],
        &["roots", "D8D8"],
        &["relation", "A11E6"],
        &["chambers", "E7E7A3"],
        &["build", "--v0", "P1xP1", "--v1", "P2", "--n", "4"],
        &["oracle", "D12D5", "--trials", "10", "--seed", "7"],
    ] {
        text_matches_json(args);
    }
}

#[test]
fn report_envelope() {
    let v = json(&["roots", "A15"]);
    assert_eq!(v["schema"], SCHEMA);
    assert_eq!(v["command"], "roots A15 --bound 4");
    assert_eq!(v["results"]["found"], "A15+A1+A1");
    assert_eq!(v["summary"]["all_pass"], true);
}

#[test]
fn chambers_report_counts_and_diagram() {
    let v = json(&["chambers", "E8E8"]);
    assert_eq!(v["results"]["chambers"], 3);
    assert_eq!(v["results"]["walls"].as_array().unwrap().len(), 2);
    assert!(v["results"]["diagram"].as_str().unwrap().contains("flop e'10"));
    assert_eq!(v["results"]["reference_diffs"], Value::Array(vec![]));
}

#[test]
fn documented_examples() {
    assert_eq!(json(&["roots", "E8E8"])["results"]["found"], "E8+E8+<-4>");
    let v = json(&["chambers", "A15"]);
    assert_eq!(v["results"]["chambers"], 2);
    assert_eq!(v["results"]["walls"], serde_json::json!([[1, 0]]));
    assert_eq!(v["results"]["boundary"], serde_json::json!([[2, 1], [2, -1]]));
}

#[test]
fn relation_report_has_certificate() {
    let v = json(&["relation", "D17"]);
    assert_eq!(v["results"][0]["certificate"], "3·R_h+2·R_xi");
    assert_eq!(v["results"][0]["derivation"]["verdict"], "certified");
}

#[test]
fn seed_comes_from_flag_then_environment() {
    let args = ["degen-atlas", "oracle", "A15", "--trials", "3", "--json"];
    let from_env: Value = serde_json::from_str(&run(args, Some("11")).stdout).unwrap();
    assert_eq!(from_env["results"]["seed"], 11);
    let default: Value = serde_json::from_str(&run(args, None).stdout).unwrap();
    assert_eq!(default["results"]["seed"], 2024);
    let flagged = ["degen-atlas", "oracle", "A15", "--trials", "3", "--seed", "5", "--json"];
    let v: Value = serde_json::from_str(&run(flagged, Some("11")).stdout).unwrap();
    assert_eq!(v["results"]["seed"], 5);
}

fn bin(args: &[&str], seed: Option<&str>) -> std::process::Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_degen-atlas"));
    c.args(args).env_remove("DEGEN_ATLAS_SEED");
    if let Some(s) = seed {
        c.env("DEGEN_ATLAS_SEED", s);
    }
    c.output().unwrap()
}

#[test]
fn exit_codes() {
    let ok = bin(&["roots", "D17"], None);
    assert_eq!(ok.status.code(), Some(0));
    assert!(ok.stderr.is_empty());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("results.found: D17"));

    for args in [
        &["roots", "X9"][..],
        &["nonsense"],
        &["verify"],
        &["build", "--v0", "P3", "--v1", "P2", "--n", "1"],
        &["build", "--v0", "P2", "--v1", "P2", "--n", "40"],
        &["build", "--v0", "P2", "--v1", "P2", "--n", "9", "--h", "l-q7"],
        &["build", "--v0", "P2", "--v1", "P2", "--n", "9", "--h", "l+l'"],
        &["chambers", "CUSTOM"],
    ] {
        let out = bin(args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(bin(&["oracle", "A15", "--trials", "2"], Some("seven")).status.code(), Some(2));
    assert_eq!(bin(&["oracle", "A15", "--trials", "2"], Some("7")).status.code(), Some(0));
}

#[test]
fn verify_all_passes_every_check() {
    let out = bin(&["verify", "--all", "--json"], None);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["lattices"].as_array().unwrap().len(), 9);
    assert_eq!(v["results"]["relations"].as_array().unwrap().len(), 11);
    assert_eq!(v["results"]["fans"].as_array().unwrap().len(), 9);
    assert_eq!(v["summary"]["passed"], 29);
    assert_eq!(v["results"]["relations"][7]["check"], "relation row 8");
}

fn arb_json() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        any::<i64>().prop_map(Value::from),
        "[ -~\n]{0,12}".prop_map(Value::String),
    ];
    leaf.prop_recursive(4, 32, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::Array),
            prop::collection::btree_map("[a-z_]{1,6}", inner, 0..4)
                .prop_map(|m| Value::Object(m.into_iter().collect())),
        ]
    })
}

proptest! {
    #[test]
    fn text_rendering_round_trips(v in arb_json()) {
        let text = degen_atlas_cli::render_text(&v);
        prop_assert_eq!(parse_text(&text), flatten(&v));
    }
}
