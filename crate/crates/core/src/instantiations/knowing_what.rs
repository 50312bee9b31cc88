//! Knowing-what models: objects are assignments `d=s` of a value to a
//! constant, and every world fixes exactly one value per constant.

use crate::error::Result;
use crate::formula::{Formula, Name};
use crate::model::OModel;
use crate::semantics::{self, Registry};
use serde::Serialize;
use std::collections::BTreeSet;

/// Object `d=s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ValueObject {
    pub constant: Name,
    pub value: Name,
}

impl ValueObject {
    pub fn parse(text: &str) -> Option<Self> {
        let (d, s) = text.split_once('=')?;
        let ok = |x: &str| !x.is_empty() && x.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        (ok(d) && ok(s)).then(|| ValueObject {
            constant: d.into(),
            value: s.into(),
        })
    }

    pub fn name(&self) -> String {
        format!("{}={}", self.constant, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum KvViolation {
    NotValueObject(String),
    /// The universe lacks `d=s` although `d` and `s` both occur in it.
    IncompleteUniverse(String),
    NonUniformOwnership {
        world: String,
    },
    MissingValue {
        world: String,
        constant: String,
    },
    DuplicateValue {
        world: String,
        constant: String,
    },
}

/// Constants and values declared by the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KvDomain {
    pub constants: BTreeSet<Name>,
    pub values: BTreeSet<Name>,
}

pub fn kv_domain(m: &OModel) -> std::result::Result<KvDomain, Vec<KvViolation>> {
    let mut dom = KvDomain {
        constants: BTreeSet::new(),
        values: BTreeSet::new(),
    };
    let mut bad = Vec::new();
    for o in m.signature().universe() {
        match ValueObject::parse(o) {
            Some(v) => {
                dom.constants.insert(v.constant);
                dom.values.insert(v.value);
            }
            None => bad.push(KvViolation::NotValueObject(o.to_string())),
        }
    }
    for d in &dom.constants {
        for s in &dom.values {
            let name = format!("{d}={s}");
            if m.signature().object(&name).is_none() {
                bad.push(KvViolation::IncompleteUniverse(name));
            }
        }
    }
    if bad.is_empty() {
        Ok(dom)
    } else {
        Err(bad)
    }
}

/// Own-sets agree across agents at each world and hold exactly one value
/// per constant.
pub fn validate_kv(m: &OModel) -> std::result::Result<(), Vec<KvViolation>> {
    let dom = kv_domain(m)?;
    let sig = m.signature();
    let mut bad = Vec::new();
    for w in 0..m.n_worlds() {
        let world = m.world_name(w).to_string();
        if (1..sig.n_agents()).any(|i| m.own(i, w) != m.own(0, w)) {
            bad.push(KvViolation::NonUniformOwnership { world: world.clone() });
        }
        for d in &dom.constants {
            let held = dom
                .values
                .iter()
                .filter(|s| {
                    let o = sig.object(&format!("{d}={s}")).unwrap();
                    m.own(0, w).contains(o)
                })
                .count();
            let constant = d.to_string();
            match held {
                0 => bad.push(KvViolation::MissingValue {
                    world: world.clone(),
                    constant,
                }),
                1 => {}
                _ => bad.push(KvViolation::DuplicateValue {
                    world: world.clone(),
                    constant,
                }),
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

/// Value of `d` at `u`, read from the first agent's set.
fn value_at(m: &OModel, u: usize, d: &str) -> Option<Name> {
    m.own(0, u)
        .iter()
        .map(|o| &m.signature().universe()[o])
        .filter_map(|o| ValueObject::parse(o))
        .find(|v| &*v.constant == d)
        .map(|v| v.value)
}

/// Direct clause: every pair of accessible worlds agrees on `d`.
pub fn kv_direct(m: &OModel, w: usize, agent: usize, d: &str) -> bool {
    let succ = m.successors(agent, w);
    let mut values = succ.iter().map(|u| value_at(m, u, d));
    match values.next() {
        None => true,
        Some(first) => values.all(|v| v == first),
    }
}

/// `⋀_{s∈S} (◇_i O_i(d=s) → □_i O_i(d=s))`.
pub fn kv_formula(agent: &Name, d: &str, values: &BTreeSet<Name>) -> Formula {
    Formula::conj(values.iter().map(|s| {
        let o = Formula::Owns(agent.clone(), Name::from(format!("{d}={s}")));
        Formula::implies(Formula::poss(agent.clone(), o.clone()), Formula::nec(agent.clone(), o))
    }))
}

pub fn kv_defined(m: &OModel, w: usize, agent: usize, d: &str, values: &BTreeSet<Name>) -> Result<bool> {
    let f = kv_formula(&m.signature().agents()[agent], d, values);
    semantics::eval(m, w, &f, &Registry::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::IdSet;
    use crate::model::Signature;
    use std::sync::Arc;

    fn model(worlds: &[&str]) -> OModel {
        let sig = Signature::new(["1"], ["d=a", "d=b"], Vec::<&str>::new()).unwrap();
        OModel::new(Arc::new(sig), worlds.iter().copied())
    }

    #[test]
    fn isolated_world_knows() {
        let mut m = model(&["w"]);
        m.set_own(0, 0, IdSet::singleton(0));
        assert!(kv_direct(&m, 0, 0, "d"));
        let dom = kv_domain(&m).unwrap();
        assert!(kv_defined(&m, 0, 0, "d", &dom.values).unwrap());
    }

    #[test]
    fn disagreeing_successors() {
        let mut m = model(&["w", "u", "v"]);
        m.add_edge(0, 0, 1);
        m.add_edge(0, 0, 2);
        for (w, o) in [(0, 0), (1, 0), (2, 1)] {
            m.set_own(0, w, IdSet::singleton(o));
        }
        assert_eq!(validate_kv(&m), Ok(()));
        let dom = kv_domain(&m).unwrap();
        assert!(!kv_direct(&m, 0, 0, "d"));
        assert!(!kv_defined(&m, 0, 0, "d", &dom.values).unwrap());
    }

    #[test]
    fn validation_errors() {
        let mut m = model(&["w"]);
        assert!(matches!(
            &validate_kv(&m).unwrap_err()[..],
            [KvViolation::MissingValue { .. }]
        ));
        m.set_own(0, 0, IdSet::full(2));
        assert!(matches!(
            &validate_kv(&m).unwrap_err()[..],
            [KvViolation::DuplicateValue { .. }]
        ));
        let sig = Signature::new(["1"], ["d=a", "e=b"], Vec::<&str>::new()).unwrap();
        let m = OModel::new(Arc::new(sig), ["w"]);
        assert_eq!(validate_kv(&m).unwrap_err().len(), 2);
    }
}
