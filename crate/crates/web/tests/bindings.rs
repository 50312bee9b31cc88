//! The browser bindings called natively on the worked workspace.

use omodel_web::{check_property, evaluate, translate, update, worked_workspace};
use serde_json::Value;

fn parse(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn evaluate_reports_the_truth_set() {
    let ws = worked_workspace();
    let v = parse(&evaluate(&ws, "M", "O(1,p) & ~p", ""));
    assert_eq!(v["holds"], true);
    assert!(v["text"].as_str().unwrap().contains("true_at:\n  - w\n"));
    let v = parse(&evaluate(&ws, "M", "p", "w"));
    assert_eq!(v["holds"], false);
    assert!(v["workspace"].is_null());
}

#[test]
fn property_failures_name_a_witness() {
    let ws = worked_workspace();
    let v = parse(&check_property(&ws, "M", "pres-all", "gen"));
    assert_eq!(v["holds"], true);
    let v = parse(&update(&ws, "M", "Pri", "MP"));
    let ws = v["workspace"].as_str().unwrap().to_string();
    let v = parse(&check_property(&ws, "MP", "anti-pres-all", "gen"));
    assert_eq!(v["holds"], false);
    assert!(v["text"]
        .as_str()
        .unwrap()
        .contains("witness: agent 1 on (w,dot) -> (w,dot), object p"));
}

#[test]
fn update_dumps_without_saving() {
    let ws = worked_workspace();
    let v = parse(&update(&ws, "M", "AlPri", " "));
    assert_eq!(v["holds"], true);
    assert!(v["workspace"].is_null());
    assert!(v["text"].as_str().unwrap().contains("defined: true"));
}

#[test]
fn translate_shows_the_trace() {
    let ws = worked_workspace();
    let v = parse(&translate(&ws, "[Pri:dot][1]p"));
    let text = v["text"].as_str().unwrap();
    assert!(text.contains("translation: top -> [1](top -> p)\n"), "{text}");
    assert!(text.contains("trace:\n"));
}

#[test]
fn errors_are_reported_not_thrown() {
    let ws = worked_workspace();
    assert!(parse(&evaluate("{}", "M", "p", ""))["error"].is_string());
    assert!(parse(&evaluate(&ws, "M", "(p &", ""))["error"]
        .as_str()
        .unwrap()
        .contains("1:4"));
    assert!(parse(&check_property(&ws, "M", "pres-all", "9:{1}"))["error"].is_string());
    assert!(parse(&update(&ws, "nope", "Pri", ""))["error"].is_string());
}
