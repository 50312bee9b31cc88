//! The command-line binary on the worked workspace.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn workspace_copy(dir: &Path) -> PathBuf {
    let path = dir.join("ws.json");
    std::fs::copy(golden("worked.json"), &path).unwrap();
    path
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(ws: Option<&Path>, args: &[&str]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_omodel"));
    cmd.env_remove("OMODEL_WORKSPACE");
    if let Some(ws) = ws {
        cmd.arg("--workspace").arg(ws);
    }
    let out = cmd.args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(ws: Option<&Path>, args: &[&str]) -> (i32, Value) {
    let mut with = vec!["--json"];
    with.extend_from_slice(args);
    let r = run(ws, &with);
    (r.code, serde_json::from_str(&r.stdout).unwrap_or(Value::Null))
}

#[test]
fn check_prop_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace_copy(dir.path());
    let r = run(
        Some(&ws),
        &["check-prop", "--model", "M", "--prop", "pres-all", "--focus", "1:{1,2}"],
    );
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("holds: true"));

    run(
        Some(&ws),
        &["update", "--model", "M", "--event", "Pri", "--save-as", "MP"],
    );
    let r = run(
        Some(&ws),
        &[
            "check-prop",
            "--model",
            "MP",
            "--prop",
            "anti-pres-all",
            "--focus",
            "gen",
        ],
    );
    assert_eq!(r.code, 1);
    assert!(
        r.stdout.contains("witness: agent 1 on (w,dot) -> (w,dot), object p"),
        "{}",
        r.stdout
    );
}

#[test]
fn closure_with_hypotheses_holding() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace_copy(dir.path());
    let (code, v) = json(
        Some(&ws),
        &[
            "closure",
            "--model",
            "M",
            "--event",
            "AlPri",
            "--prop",
            "anti-pres-all",
            "--focus",
            "gen",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(v["hypotheses_hold"], true);
    assert_eq!(v["product_ok"], true);
    assert_eq!(v["theorem_violated"], false);

    // Pri breaks the event-model hypothesis and the product fails.
    let (code, v) = json(
        Some(&ws),
        &[
            "closure",
            "--model",
            "M",
            "--event",
            "Pri",
            "--prop",
            "anti-pres-all",
            "--focus",
            "gen",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(v["event_ok"], false);
    assert_eq!(v["product_ok"], false);
}

#[test]
fn translate_prints_the_static_formula() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace_copy(dir.path());
    let r = run(Some(&ws), &["translate", "--formula", "[Pri:dot][1]p"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("translation: top -> [1](top -> p)\n"), "{}", r.stdout);
    let r = run(Some(&ws), &["translate", "--formula", "[Pri:circ]O(1,p)", "--simplify"]);
    assert!(r.stdout.contains("translation: top -> O(1,p)\n"), "{}", r.stdout);
    assert!(r.stdout.contains("simplified: O(1,p)\n"), "{}", r.stdout);
    let r = run(Some(&ws), &["translate", "--formula", "[Pri:dot]O(1,p)"]);
    assert!(r.stdout.contains("translation: ~top\n"), "{}", r.stdout);
}

#[test]
fn update_writes_the_golden_product() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace_copy(dir.path());
    let r = run(
        Some(&ws),
        &["update", "--model", "M", "--event", "Pri", "--save-as", "M_Pri"],
    );
    assert_eq!(r.code, 0);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&ws).unwrap()).unwrap();
    let product = doc["models"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["name"] == "M_Pri")
        .unwrap();
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(golden("pri_product.json")).unwrap()).unwrap();
    assert_eq!(product, &expected);
}

#[test]
fn exit_codes_do_not_depend_on_the_report_format() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace_copy(dir.path());
    let cases: &[&[&str]] = &[
        &["eval", "--model", "M", "--formula", "O(1,p)"],
        &["eval", "--model", "M", "--formula", "p", "--world", "w"],
        &["check-prop", "--model", "M", "--prop", "inv-all"],
        &["check-emp", "--event", "Pri", "--prop", "anti-pres-all"],
        &["check-emp", "--event", "AlPri", "--prop", "anti-inv-all"],
        &["update", "--model", "M", "--event", "AlPri"],
        &["translate", "--formula", "[AlPri:dot]<2>~O(1,p)", "--trace"],
        &[
            "closure", "--model", "M", "--event", "Pri", "--prop", "pres-all", "--focus", "indv",
        ],
        &["search", "--prop", "inv-some", "--budget", "50", "--no-emp"],
        &["enumerate", "--max-worlds", "1"],
        &["validate-inst", "--model", "M", "--kind", "awareness"],
        &["validate-inst", "--model", "M", "--kind", "deontic"],
        &["eval", "--model", "M", "--formula", "(p &"],
        &["check-prop", "--model", "nope", "--prop", "pres-all"],
        &["check-prop", "--model", "M", "--prop", "pres-all", "--focus", "3:{1}"],
    ];
    for args in cases {
        let human = run(Some(&ws), args);
        let mut with = vec!["--json"];
        with.extend_from_slice(args);
        let machine = run(Some(&ws), &with);
        assert_eq!(human.code, machine.code, "{args:?}");
        let v: Value = serde_json::from_str(&machine.stdout).unwrap();
        assert!(v.is_object(), "{args:?}");
        if machine.code != 2 {
            // The human lines carry the JSON keys in the same order.
            let keys: Vec<&str> = machine
                .stdout
                .lines()
                .filter_map(|l| l.strip_prefix("  \""))
                .map(|l| l.split('"').next().unwrap())
                .collect();
            let human_keys: Vec<&str> = human
                .stdout
                .lines()
                .filter(|l| !l.starts_with("  "))
                .map(|l| l.split(':').next().unwrap())
                .collect();
            assert_eq!(keys, human_keys, "{args:?}");
        }
    }
}

#[test]
fn usage_and_format_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace_copy(dir.path());
    assert_eq!(run(Some(&ws), &["frobnicate"]).code, 2);
    assert_eq!(run(Some(&ws), &["check-prop", "--model", "M"]).code, 2);
    assert_eq!(run(None, &["eval", "--model", "M", "--formula", "p"]).code, 2);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"agents": ["1"], "atoms": [], "models": [], "events": []}"#).unwrap();
    let r = run(Some(&bad), &["eval", "--model", "M", "--formula", "p"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("universe"), "{}", r.stderr);
    let r = run(Some(&ws), &["eval", "--model", "M", "--formula", "(p &"]);
    assert!(r.stderr.contains("1:4"), "{}", r.stderr);
}

#[test]
fn known_event_model_results() {
    let dir = tempfile::tempdir().unwrap();
    let ws = workspace_copy(dir.path());
    let (code, v) = json(
        Some(&ws),
        &[
            "check-emp",
            "--event",
            "Pri",
            "--prop",
            "anti-pres-all",
            "--focus",
            "gen",
        ],
    );
    assert_eq!(code, 1);
    assert_eq!(v["witness"], "agent 1 on dot -> dot, object p");
    let (code, _) = json(
        Some(&ws),
        &[
            "check-emp",
            "--event",
            "AlPri",
            "--prop",
            "anti-pres-all",
            "--focus",
            "gen",
        ],
    );
    assert_eq!(code, 0);
    let (code, v) = json(
        Some(&ws),
        &[
            "check-emp",
            "--event",
            "AlPri",
            "--prop",
            "anti-inv-all",
            "--focus",
            "gen",
        ],
    );
    assert_eq!(code, 1);
    assert_eq!(v["witness"], "agent 1 on dot -> tri, object p");
}

#[test]
fn gen_output_loads_and_search_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gen.json");
    let r = run(
        None,
        &[
            "gen",
            "--agents",
            "a,b",
            "--universe",
            "x,y",
            "--atoms",
            "p",
            "--models",
            "3",
            "--events",
            "2",
            "--seed",
            "9",
            "--output",
            out.to_str().unwrap(),
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    let ws = omodel::Workspace::from_json(&text).unwrap();
    assert_eq!(ws.to_json(), text);
    assert_eq!(ws.models().count(), 3);

    let (code, v) = json(Some(&out), &["search", "--prop", "pres-all", "--budget", "200"]);
    assert_eq!(code, 0);
    assert_eq!(v["found"], false);
    let (code, v) = json(
        Some(&out),
        &["search", "--prop", "pres-all", "--budget", "2000", "--no-emp"],
    );
    assert_eq!(code, 1);
    assert_eq!(v["found"], true);
}

#[test]
fn selftest_passes() {
    let r = run(None, &["selftest", "--samples", "50"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(!r.stdout.contains("FAIL"));
}
