//! Atomic awareness: O-models whose universe is the atom set, with
//! `A_i p := O_i p` and the derived operator `Ã_i φ`.

use crate::error::{Error, Result};
use crate::formula::{Formula, Name};
use crate::model::{OModel, Signature};
use std::collections::BTreeSet;

/// Eliminates `Ã_agent` from `Ã_agent φ`.
///
/// Ownership literals count as mentions of their object, so `Ã_i A_j p`
/// becomes `A_i p`. Dynamic modalities are transparent.
pub fn expand_atomic_awareness(agent: &Name, phi: &Formula) -> Formula {
    match phi {
        Formula::Top => Formula::Top,
        Formula::Atom(p) => Formula::Owns(agent.clone(), p.clone()),
        Formula::Owns(_, o) => Formula::Owns(agent.clone(), o.clone()),
        Formula::Not(a) | Formula::Box(_, a) | Formula::Dyn(_, _, a) => expand_atomic_awareness(agent, a),
        Formula::And(a, b) => Formula::and(expand_atomic_awareness(agent, a), expand_atomic_awareness(agent, b)),
    }
}

/// Atoms of `phi` together with the objects of its ownership literals.
pub fn awareness_atoms(phi: &Formula) -> BTreeSet<Name> {
    let mut out = phi.atoms();
    out.extend(phi.objects());
    out
}

/// Fails unless every object of the universe is an atom of the signature.
pub fn check_atomic_signature(sig: &Signature) -> Result<()> {
    match sig.universe().iter().find(|o| sig.atom(o).is_none()) {
        Some(o) => Err(Error::UniverseNotAtoms(o.to_string())),
        None => Ok(()),
    }
}

/// Direct clause: agent `i` is aware of `phi` at `w` iff every atom it
/// mentions is in `A_i(w)`.
pub fn aware_direct(m: &OModel, w: usize, agent: usize, phi: &Formula) -> Result<bool> {
    let sig = m.signature();
    check_atomic_signature(sig)?;
    let own = m.own(agent, w);
    for p in awareness_atoms(phi) {
        match sig.object(&p) {
            Some(o) if own.contains(o) => {}
            Some(_) => return Ok(false),
            None => {
                return Err(Error::UnknownName {
                    kind: "object",
                    name: p.to_string(),
                })
            }
        }
    }
    Ok(true)
}
