//! Justification models as O-models whose objects are pairs `t:φ` of a
//! justification term and a formula.

use crate::error::Result;
use crate::formula::{Formula, Name};
use crate::model::OModel;
use crate::semantics::{self, Registry};
use crate::syntax::{parse_formula, print_formula, SyntaxError};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

/// Justification terms. Text form: `#c` for a constant, a bare identifier
/// for a variable, `(s.t)` for application and `(s+t)` for sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JustTerm {
    Const(Name),
    Var(Name),
    App(Box<JustTerm>, Box<JustTerm>),
    Sum(Box<JustTerm>, Box<JustTerm>),
}

impl JustTerm {
    pub fn app(s: JustTerm, t: JustTerm) -> Self {
        JustTerm::App(Box::new(s), Box::new(t))
    }

    pub fn sum(s: JustTerm, t: JustTerm) -> Self {
        JustTerm::Sum(Box::new(s), Box::new(t))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_term(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(format!("trailing input in term `{text}`"));
        }
        Ok(t)
    }
}

fn ident(chars: &[char], pos: &mut usize) -> std::result::Result<Name, String> {
    let start = *pos;
    while *pos < chars.len() && (chars[*pos].is_ascii_alphanumeric() || chars[*pos] == '_') {
        *pos += 1;
    }
    if start == *pos {
        return Err(format!("expected a name at offset {start}"));
    }
    Ok(Name::from(chars[start..*pos].iter().collect::<String>()))
}

fn parse_term(chars: &[char], pos: &mut usize) -> std::result::Result<JustTerm, String> {
    match chars.get(*pos) {
        Some('#') => {
            *pos += 1;
            Ok(JustTerm::Const(ident(chars, pos)?))
        }
        Some('(') => {
            *pos += 1;
            let s = parse_term(chars, pos)?;
            let op = chars.get(*pos).copied();
            *pos += 1;
            let t = parse_term(chars, pos)?;
            if chars.get(*pos) != Some(&')') {
                return Err(format!("expected `)` at offset {pos}"));
            }
            *pos += 1;
            match op {
                Some('.') => Ok(JustTerm::app(s, t)),
                Some('+') => Ok(JustTerm::sum(s, t)),
                _ => Err("expected `.` or `+` between terms".into()),
            }
        }
        _ => Ok(JustTerm::Var(ident(chars, pos)?)),
    }
}

impl fmt::Display for JustTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JustTerm::Const(c) => write!(f, "#{c}"),
            JustTerm::Var(x) => write!(f, "{x}"),
            JustTerm::App(s, t) => write!(f, "({s}.{t})"),
            JustTerm::Sum(s, t) => write!(f, "({s}+{t})"),
        }
    }
}

/// The object `t:φ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JustObject {
    pub term: JustTerm,
    pub formula: Formula,
}

impl JustObject {
    /// Parses `term:formula`, splitting at the first `:`.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let (t, f) = text
            .split_once(':')
            .ok_or_else(|| format!("`{text}` is not of the form term:formula"))?;
        let term = JustTerm::parse(t)?;
        let formula = parse_formula(f).map_err(|e: SyntaxError| e.to_string())?;
        if !formula.is_static() {
            return Err(format!("`{text}` justifies a dynamic formula"));
        }
        Ok(JustObject { term, formula })
    }

    /// Canonical object name.
    pub fn name(&self) -> String {
        format!("{}:{}", self.term, print_formula(&self.formula))
    }
}

/// A failed closure condition at one world.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum JustViolation {
    /// A universe object that is not a canonical `term:formula` pair.
    NotJustObject { object: String, message: String },
    /// `s:(φ→ψ)` and `t:φ` are owned but `(s.t):ψ` is not.
    App {
        agent: String,
        world: String,
        left: String,
        right: String,
        missing: String,
    },
    /// `s:φ` is owned but a sum with another term of the term universe is
    /// not.
    Sum {
        agent: String,
        world: String,
        owned: String,
        missing: String,
    },
}

fn decode_universe(m: &OModel) -> std::result::Result<Vec<JustObject>, Vec<JustViolation>> {
    let mut objects = Vec::new();
    let mut bad = Vec::new();
    for name in m.signature().universe() {
        match JustObject::parse(name) {
            Ok(obj) if obj.name() == **name => objects.push(obj),
            Ok(obj) => bad.push(JustViolation::NotJustObject {
                object: name.to_string(),
                message: format!("canonical form is `{}`", obj.name()),
            }),
            Err(message) => bad.push(JustViolation::NotJustObject {
                object: name.to_string(),
                message,
            }),
        }
    }
    if bad.is_empty() {
        Ok(objects)
    } else {
        Err(bad)
    }
}

/// Terms heading the objects of the universe; the default term universe
/// for the sum condition.
pub fn occurring_terms(m: &OModel) -> BTreeSet<JustTerm> {
    m.signature()
        .universe()
        .iter()
        .filter_map(|o| JustObject::parse(o).ok())
        .map(|o| o.term)
        .collect()
}

/// Checks both closure conditions at every agent and world. Application
/// results must always be owned. The sum condition is required only for
/// sums that belong to `terms`, since demanding every sum would need an
/// infinite universe.
pub fn validate_justification(m: &OModel, terms: &BTreeSet<JustTerm>) -> std::result::Result<(), Vec<JustViolation>> {
    let objects = decode_universe(m)?;
    let sig = m.signature();
    let owned_name = |i: usize, w: usize, name: &str| sig.object(name).is_some_and(|o| m.own(i, w).contains(o));
    let mut bad = Vec::new();
    for i in 0..sig.n_agents() {
        for w in 0..m.n_worlds() {
            let held: Vec<&JustObject> = m.own(i, w).iter().map(|o| &objects[o]).collect();
            for left in &held {
                let Some((phi, psi)) = left.formula.as_implication() else {
                    continue;
                };
                for right in held.iter().filter(|r| &r.formula == phi) {
                    let goal = JustObject {
                        term: JustTerm::app(left.term.clone(), right.term.clone()),
                        formula: psi.clone(),
                    };
                    if !owned_name(i, w, &goal.name()) {
                        bad.push(JustViolation::App {
                            agent: sig.agents()[i].to_string(),
                            world: m.world_name(w).to_string(),
                            left: left.name(),
                            right: right.name(),
                            missing: goal.name(),
                        });
                    }
                }
            }
            for obj in &held {
                for term in terms {
                    let JustTerm::Sum(a, b) = term else { continue };
                    if **a != obj.term && **b != obj.term {
                        continue;
                    }
                    let goal = JustObject {
                        term: term.clone(),
                        formula: obj.formula.clone(),
                    };
                    if !owned_name(i, w, &goal.name()) {
                        bad.push(JustViolation::Sum {
                            agent: sig.agents()[i].to_string(),
                            world: m.world_name(w).to_string(),
                            owned: obj.name(),
                            missing: goal.name(),
                        });
                    }
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

/// `t:φ := O_i(t:φ) ∧ □_i φ`.
pub fn justification_formula(agent: &Name, term: &JustTerm, phi: &Formula) -> Formula {
    let obj = JustObject {
        term: term.clone(),
        formula: phi.clone(),
    };
    Formula::and(
        Formula::Owns(agent.clone(), Name::from(obj.name())),
        Formula::Box(agent.clone(), Box::new(phi.clone())),
    )
}

/// Direct clause: `(t,φ)` is admissible evidence for agent `i` at `w` and
/// `φ` holds at every accessible world.
pub fn eval_just(m: &OModel, w: usize, agent: usize, term: &JustTerm, phi: &Formula) -> Result<bool> {
    let obj = JustObject {
        term: term.clone(),
        formula: phi.clone(),
    };
    let admissible = m
        .signature()
        .object(&obj.name())
        .is_some_and(|o| m.own(agent, w).contains(o));
    if !admissible {
        return Ok(false);
    }
    let reg = Registry::new();
    for u in m.successors(agent, w).iter() {
        if !semantics::eval(m, u, phi, &reg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::IdSet;
    use crate::model::Signature;
    use std::sync::Arc;

    fn model(universe: &[&str]) -> OModel {
        let sig = Signature::new(["1"], universe.iter().copied(), ["p", "q"]).unwrap();
        OModel::new(Arc::new(sig), ["w"])
    }

    #[test]
    fn term_round_trip() {
        for text in ["#c", "x", "(#c.x)", "((x+y).#k)"] {
            assert_eq!(JustTerm::parse(text).unwrap().to_string(), text);
        }
        assert!(JustTerm::parse("(x*y)").is_err());
        let obj = JustObject::parse("(y.x):q").unwrap();
        assert_eq!(
            obj.term,
            JustTerm::app(JustTerm::Var("y".into()), JustTerm::Var("x".into()))
        );
    }

    #[test]
    fn empty_ownership_is_closed() {
        let m = model(&["x:p", "y:p -> q"]);
        assert_eq!(validate_justification(&m, &occurring_terms(&m)), Ok(()));
    }

    #[test]
    fn application_closure() {
        let mut m = model(&["x:p", "y:p -> q", "(y.x):q"]);
        m.set_own(0, 0, IdSet::from_mask(0b011));
        let err = validate_justification(&m, &occurring_terms(&m)).unwrap_err();
        assert!(matches!(&err[..], [JustViolation::App { missing, .. }] if missing == "(y.x):q"));
        m.set_own(0, 0, IdSet::from_mask(0b111));
        assert_eq!(validate_justification(&m, &occurring_terms(&m)), Ok(()));
    }

    #[test]
    fn sum_closure() {
        let mut m = model(&["x:p", "(x+y):p"]);
        m.set_own(0, 0, IdSet::singleton(0));
        let err = validate_justification(&m, &occurring_terms(&m)).unwrap_err();
        assert!(matches!(&err[..], [JustViolation::Sum { .. }]));
    }

    #[test]
    fn non_canonical_names() {
        let m = model(&["x: p"]);
        assert!(matches!(
            &validate_justification(&m, &BTreeSet::new()).unwrap_err()[..],
            [JustViolation::NotJustObject { .. }]
        ));
    }

    #[test]
    fn direct_clause_matches_definition() {
        let mut m = model(&["x:p"]);
        m.add_edge(0, 0, 0);
        m.set_own(0, 0, IdSet::singleton(0));
        m.set_val(0, IdSet::singleton(0));
        let x = JustTerm::Var("x".into());
        let p = Formula::atom("p");
        assert!(eval_just(&m, 0, 0, &x, &p).unwrap());
        let defined = justification_formula(&"1".into(), &x, &p);
        assert!(semantics::eval(&m, 0, &defined, &Registry::new()).unwrap());
        m.set_val(0, IdSet::new());
        assert!(!eval_just(&m, 0, 0, &x, &p).unwrap());
    }
}
