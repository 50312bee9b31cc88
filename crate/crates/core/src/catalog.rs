//! Ready-made models: the private forgetting events and the one-world base
//! model they are usually applied to.

use crate::bitset::IdSet;
use crate::model::{EventModel, OModel, Signature};
use crate::semantics::Registry;
use std::sync::Arc;

/// Event with a single reflexive, always-executable event and no effects.
pub fn identity_event(sig: Arc<Signature>) -> EventModel {
    let n = sig.n_agents();
    let mut e = EventModel::new(sig, ["s"]);
    for i in 0..n {
        e.add_edge(i, 0, 0);
    }
    e
}

/// Agent `agent` privately stops owning `object`: events `dot` (the loss)
/// and `circ` (nothing happens). The forgetting agent sees `dot`, every
/// other agent believes `circ` took place.
pub fn private_forgetting(sig: Arc<Signature>, agent: usize, object: usize) -> EventModel {
    let n = sig.n_agents();
    let mut e = EventModel::new(sig, ["dot", "circ"]);
    let (dot, circ) = (0, 1);
    for j in 0..n {
        if j == agent {
            e.add_edge(j, dot, dot);
        } else {
            e.add_edge(j, dot, circ);
        }
        e.add_edge(j, circ, circ);
    }
    *e.eff_minus_mut(agent, dot) = IdSet::singleton(object);
    e
}

/// Variant of [`private_forgetting`] with a third event `tri` in which
/// everybody loses `object`; the forgetting agent believes `tri` happened.
pub fn alert_private_forgetting(sig: Arc<Signature>, agent: usize, object: usize) -> EventModel {
    let n = sig.n_agents();
    let mut e = EventModel::new(sig, ["dot", "circ", "tri"]);
    let (dot, circ, tri) = (0, 1, 2);
    for j in 0..n {
        if j == agent {
            e.add_edge(j, dot, tri);
        } else {
            e.add_edge(j, dot, circ);
        }
        e.add_edge(j, tri, tri);
        e.add_edge(j, circ, circ);
        *e.eff_minus_mut(j, tri) = IdSet::singleton(object);
    }
    *e.eff_minus_mut(agent, dot) = IdSet::singleton(object);
    e
}

/// Agents `1`, `2`; universe and atoms `{p}`.
pub fn worked_signature() -> Arc<Signature> {
    Arc::new(Signature::new(["1", "2"], ["p"], ["p"]).expect("static signature"))
}

/// One world `w`, reflexive for both agents, where both agents own `p`.
pub fn worked_base_model(sig: Arc<Signature>) -> OModel {
    let mut m = OModel::new(sig.clone(), ["w"]);
    for i in 0..sig.n_agents() {
        m.add_edge(i, 0, 0);
        m.set_own(i, 0, IdSet::full(sig.n_objects()));
    }
    m
}

/// The base model plus a registry holding `Pri` and `AlPri` for agent `1`
/// and object `p`.
pub fn worked_model_and_registry() -> (OModel, Registry) {
    let sig = worked_signature();
    let mut reg = Registry::new();
    reg.insert("Pri", private_forgetting(sig.clone(), 0, 0));
    reg.insert("AlPri", alert_private_forgetting(sig.clone(), 0, 0));
    (worked_base_model(sig), reg)
}
