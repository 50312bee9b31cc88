//! Browser bindings. Every call takes the workspace as JSON text and
//! returns a JSON object `{"text", "holds", "workspace"}` or `{"error"}`.

use omodel::cli::{self, Report};
use omodel::{catalog, Result, Workspace};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(ws: &Workspace, result: Result<(Report, bool)>, changed: bool) -> String {
    let v = match result {
        Ok((report, holds)) => json!({
            "text": report.render_human(),
            "holds": holds,
            "workspace": if changed { Value::String(ws.to_json()) } else { Value::Null },
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    v.to_string()
}

fn with_workspace(text: &str, op: impl FnOnce(&mut Workspace) -> (Result<(Report, bool)>, bool)) -> String {
    match Workspace::from_json(text) {
        Ok(mut ws) => {
            let (result, changed) = op(&mut ws);
            respond(&ws, result, changed)
        }
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn blank(s: &str) -> Option<&str> {
    let s = s.trim();
    (!s.is_empty()).then_some(s)
}

/// The one-world model with both forgetting events.
#[wasm_bindgen]
pub fn worked_workspace() -> String {
    let (m, reg) = catalog::worked_model_and_registry();
    let mut ws = Workspace::new(m.signature().clone());
    ws.insert_model("M", m).expect("worked model fits its signature");
    for (name, e) in reg.iter() {
        ws.insert_event(name.clone(), e.clone())
            .expect("worked events fit the signature");
    }
    ws.to_json()
}

/// Truth set of a formula, or its value at `world` when that is non-empty.
#[wasm_bindgen]
pub fn evaluate(workspace: &str, model: &str, formula: &str, world: &str) -> String {
    with_workspace(workspace, |ws| {
        (cli::eval_report(ws, model, formula, blank(world)), false)
    })
}

/// Group property check with a witness when it fails.
#[wasm_bindgen]
pub fn check_property(workspace: &str, model: &str, prop: &str, focus: &str) -> String {
    with_workspace(workspace, |ws| (cli::property_report(ws, model, prop, focus), false))
}

/// Product update dump; a non-empty `save_as` stores the product.
#[wasm_bindgen]
pub fn update(workspace: &str, model: &str, event: &str, save_as: &str) -> String {
    with_workspace(workspace, |ws| {
        let save_as = blank(save_as);
        let result = cli::update_report(ws, model, event, save_as);
        let changed = save_as.is_some() && matches!(result, Ok((_, true)));
        (result, changed)
    })
}

/// Static translation with the rewrite trace.
#[wasm_bindgen]
pub fn translate(workspace: &str, formula: &str) -> String {
    with_workspace(workspace, |ws| (cli::translate_report(ws, formula), false))
}
