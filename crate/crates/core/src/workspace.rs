//! Workspaces: a shared signature with named models and event models,
//! stored as one JSON document.
//!
//! ```json
//! {
//!   "agents": ["1", "2"],
//!   "universe": ["p"],
//!   "atoms": ["p"],
//!   "models": [{"name": "M", "worlds": ["w"], "relations": {"1": [["w", "w"]]},
//!               "own": {"1": {"w": ["p"]}}, "valuation": {"p": ["w"]}}],
//!   "events": [{"name": "E", "events": ["s"], "relations": {}, "pre": {"s": "top"},
//!               "eff_plus": {}, "eff_minus": {"1": {"s": ["p"]}}}]
//! }
//! ```

use crate::error::{Error, Result};
use crate::formula::{Formula, Name};
use crate::model::{validate_event, validate_model, EventDoc, EventModel, ModelDoc, OModel, Signature};
use crate::semantics::Registry;
use crate::syntax;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceDoc {
    pub agents: Vec<String>,
    pub universe: Vec<String>,
    pub atoms: Vec<String>,
    pub models: Vec<ModelDoc>,
    pub events: Vec<EventDoc>,
}

/// A validated workspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workspace {
    sig: Arc<Signature>,
    models: Vec<(Name, OModel)>,
    events: Registry,
}

impl Workspace {
    pub fn new(sig: Arc<Signature>) -> Self {
        Workspace {
            sig,
            models: Vec::new(),
            events: Registry::new(),
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn models(&self) -> impl Iterator<Item = (&Name, &OModel)> {
        self.models.iter().map(|(n, m)| (n, m))
    }

    pub fn registry(&self) -> &Registry {
        &self.events
    }

    /// Adds or replaces a model.
    pub fn insert_model(&mut self, name: impl Into<Name>, m: OModel) -> Result<()> {
        self.check_signature(m.signature())?;
        let name = name.into();
        match self.models.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = m,
            None => self.models.push((name, m)),
        }
        Ok(())
    }

    /// Adds or replaces an event model.
    pub fn insert_event(&mut self, name: impl Into<Name>, e: EventModel) -> Result<()> {
        self.check_signature(e.signature())?;
        self.events.insert(name, e);
        Ok(())
    }

    fn check_signature(&self, other: &Signature) -> Result<()> {
        if other.agents() != self.sig.agents() {
            return Err(Error::AgentSetMismatch);
        }
        if other.universe() != self.sig.universe() || other.atoms() != self.sig.atoms() {
            return Err(Error::UniverseMismatch);
        }
        Ok(())
    }

    pub fn model(&self, name: &str) -> Result<&OModel> {
        self.models
            .iter()
            .find(|(n, _)| &**n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::UnknownName {
                kind: "model",
                name: name.to_string(),
            })
    }

    pub fn event(&self, name: &str) -> Result<&EventModel> {
        self.events.get(name).ok_or_else(|| Error::UnknownName {
            kind: "event model",
            name: name.to_string(),
        })
    }

    /// Parses a formula and checks that every name in it is declared and
    /// every dynamic modality resolves.
    pub fn parse_formula(&self, text: &str) -> Result<Formula> {
        let f = syntax::parse_formula(text)?;
        self.check_formula(&f)?;
        Ok(f)
    }

    pub fn check_formula(&self, f: &Formula) -> Result<()> {
        self.sig.check_formula(f).map_err(|v| match v {
            crate::model::Violation::UnknownAgent(n) => Error::UnknownName { kind: "agent", name: n },
            crate::model::Violation::UnknownAtom(n) => Error::UnknownName { kind: "atom", name: n },
            crate::model::Violation::UnknownObject(n) => Error::UnknownName {
                kind: "object",
                name: n,
            },
            other => Error::Format(other.to_string()),
        })?;
        let mut missing = None;
        f.walk(&mut |g| {
            if let (None, Formula::Dyn(model, event, _)) = (&missing, g) {
                missing = match self.events.get(model) {
                    None => Some(Error::UnresolvedEventModel(model.to_string())),
                    Some(e) if e.event(event).is_none() => Some(Error::UnknownEvent {
                        model: model.to_string(),
                        event: event.to_string(),
                    }),
                    Some(_) => None,
                };
            }
        });
        missing.map_or(Ok(()), Err)
    }

    pub fn from_doc(doc: &WorkspaceDoc) -> Result<Self> {
        let sig = Signature::new(
            doc.agents.iter().map(String::as_str),
            doc.universe.iter().map(String::as_str),
            doc.atoms.iter().map(String::as_str),
        )
        .map_err(|violations| Error::Validation {
            name: "signature".into(),
            violations,
        })?;
        let sig = Arc::new(sig);
        let mut ws = Workspace::new(sig.clone());
        let mut seen = HashSet::new();
        for (k, md) in doc.models.iter().enumerate() {
            if !seen.insert(md.name.as_str()) {
                return Err(Error::Format(format!("duplicate model name `{}`", md.name)));
            }
            let m = validate_model(&sig, md).map_err(|violations| Error::Validation {
                name: format!("models[{k}] `{}`", md.name),
                violations,
            })?;
            ws.models.push((Name::from(md.name.as_str()), m));
        }
        let mut seen = HashSet::new();
        for (k, ed) in doc.events.iter().enumerate() {
            if !seen.insert(ed.name.as_str()) {
                return Err(Error::Format(format!("duplicate event model name `{}`", ed.name)));
            }
            let e = validate_event(&sig, ed).map_err(|violations| Error::Validation {
                name: format!("events[{k}] `{}`", ed.name),
                violations,
            })?;
            ws.events.insert(ed.name.as_str(), e);
        }
        Ok(ws)
    }

    pub fn to_doc(&self) -> WorkspaceDoc {
        let names = |xs: &[Name]| xs.iter().map(|x| x.to_string()).collect();
        WorkspaceDoc {
            agents: names(self.sig.agents()),
            universe: names(self.sig.universe()),
            atoms: names(self.sig.atoms()),
            models: self.models.iter().map(|(n, m)| m.to_doc(n)).collect(),
            events: self.events.iter().map(|(n, e)| e.to_doc(n)).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WorkspaceDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_doc(&doc)
    }

    /// Pretty-printed JSON, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_doc()).expect("workspace documents serialize");
        out.push('\n');
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::Format(format!("cannot write {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn worked() -> Workspace {
        let (m, reg) = catalog::worked_model_and_registry();
        let mut ws = Workspace::new(m.signature().clone());
        ws.insert_model("M", m).unwrap();
        for (n, e) in reg.iter() {
            ws.insert_event(n.clone(), e.clone()).unwrap();
        }
        ws
    }

    #[test]
    fn round_trip() {
        let ws = worked();
        let back = Workspace::from_json(&ws.to_json()).unwrap();
        assert_eq!(back, ws);
        assert_eq!(back.to_json(), ws.to_json());
    }

    #[test]
    fn universe_is_required() {
        let text = r#"{"agents": ["1"], "atoms": [], "models": [], "events": []}"#;
        match Workspace::from_json(text) {
            Err(Error::Format(msg)) => assert!(msg.contains("universe"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_models() {
        let text = r#"{"agents": ["1"], "universe": ["a"], "atoms": [],
            "models": [{"name": "m", "worlds": ["w"]}, {"name": "m", "worlds": ["u"]}],
            "events": []}"#;
        match Workspace::from_json(text) {
            Err(Error::Format(msg)) => assert!(msg.contains("duplicate"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_errors_carry_the_path() {
        let text = r#"{"agents": ["1"], "universe": ["a"], "atoms": [],
            "models": [{"name": "m", "worlds": ["w"], "own": {"1": {"w": ["b"]}}}],
            "events": []}"#;
        match Workspace::from_json(text) {
            Err(Error::Validation { name, violations }) => {
                assert!(name.contains("`m`"));
                assert_eq!(violations.len(), 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn formula_names_are_checked() {
        let ws = worked();
        assert!(ws.parse_formula("[Pri:dot]~O(1,p)").is_ok());
        assert_eq!(
            ws.parse_formula("q"),
            Err(Error::UnknownName {
                kind: "atom",
                name: "q".into()
            })
        );
        assert_eq!(
            ws.parse_formula("[Pri:tri]p"),
            Err(Error::UnknownEvent {
                model: "Pri".into(),
                event: "tri".into()
            })
        );
        assert_eq!(ws.parse_formula("[X:s]p"), Err(Error::UnresolvedEventModel("X".into())));
    }
}
