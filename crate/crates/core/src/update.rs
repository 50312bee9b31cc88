//! Product update of an O-model with an event O-model.

use crate::bitset::IdSet;
use crate::error::{Error, Result};
use crate::formula::Name;
use crate::model::{EventModel, OModel};
use crate::semantics;

/// The updated model together with the `(world, event)` pair behind each of
/// its worlds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    pub model: OModel,
    pub pairs: Vec<(usize, usize)>,
}

impl Product {
    /// Product world index of the pair `(w, s)`, if it survived.
    pub fn world_of(&self, w: usize, s: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (w, s))
    }
}

/// `M ⊗ E`. Fails with [`Error::Undefined`] when no world satisfies any
/// precondition.
pub fn product_update(m: &OModel, e: &EventModel) -> Result<Product> {
    check_compatible(m, e)?;
    let pre_ext = (0..e.n_events())
        .map(|s| semantics::static_extension(m, e.pre(s)))
        .collect::<Result<Vec<_>>>()?;
    product_from_extensions(m, e, &pre_ext)
}

fn check_compatible(m: &OModel, e: &EventModel) -> Result<()> {
    let (ms, es) = (m.signature(), e.signature());
    if ms.agents() != es.agents() {
        return Err(Error::AgentSetMismatch);
    }
    if ms.universe() != es.universe() {
        return Err(Error::UniverseMismatch);
    }
    Ok(())
}

/// Product update given the extension of every precondition in `m`.
pub(crate) fn product_from_extensions(m: &OModel, e: &EventModel, pre_ext: &[IdSet]) -> Result<Product> {
    check_compatible(m, e)?;
    let pairs: Vec<(usize, usize)> = (0..m.n_worlds())
        .flat_map(|w| (0..e.n_events()).map(move |s| (w, s)))
        .filter(|&(w, s)| pre_ext[s].contains(w))
        .collect();
    if pairs.is_empty() {
        return Err(Error::Undefined);
    }
    let n_events = e.n_events();
    let mut index = vec![usize::MAX; m.n_worlds() * n_events];
    for (k, &(w, s)) in pairs.iter().enumerate() {
        index[w * n_events + s] = k;
    }
    let sig = m.signature().clone();
    let n = pairs.len();
    let names: Vec<Name> = pairs
        .iter()
        .map(|&(w, s)| Name::from(format!("({},{})", m.world_name(w), e.event_name(s))))
        .collect();

    let mut succ = Vec::with_capacity(sig.n_agents() * n);
    let mut own = Vec::with_capacity(sig.n_agents() * n);
    for i in 0..sig.n_agents() {
        for &(w, s) in &pairs {
            let mut out = IdSet::new();
            for u in m.successors(i, w).iter() {
                for t in e.successors(i, s).iter() {
                    let k = index[u * n_events + t];
                    if k != usize::MAX {
                        out.insert(k);
                    }
                }
            }
            succ.push(out);
            let mut objects = m.own(i, w).union(e.eff_plus(i, s));
            objects.difference_with(e.eff_minus(i, s));
            own.push(objects);
        }
    }
    let val = (0..sig.n_atoms())
        .map(|p| {
            let base = m.val(p);
            pairs
                .iter()
                .enumerate()
                .filter(|(_, &(w, _))| base.contains(w))
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    Ok(Product {
        model: OModel::from_parts(sig, names, succ, own, val),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::formula::Formula;

    #[test]
    fn worked_product_by_hand() {
        let (m, reg) = catalog::worked_model_and_registry();
        let pri = reg.get("Pri").unwrap();
        let prod = product_update(&m, pri).unwrap();
        assert_eq!(prod.pairs, vec![(0, 0), (0, 1)]);
        let pm = &prod.model;
        let dot = prod.world_of(0, 0).unwrap();
        let circ = prod.world_of(0, 1).unwrap();
        assert!(pm.own(0, dot).is_empty());
        assert_eq!(pm.own(0, circ), &IdSet::singleton(0));
        assert_eq!(pm.own(1, dot), &IdSet::singleton(0));
        let r1: Vec<_> = pm.edges(0).collect();
        let r2: Vec<_> = pm.edges(1).collect();
        assert_eq!(r1, vec![(dot, dot), (circ, circ)]);
        assert_eq!(r2, vec![(dot, circ), (circ, circ)]);
        assert_eq!(&**pm.world_name(dot), "(w,dot)");
    }

    #[test]
    fn unsatisfiable_precondition_is_undefined() {
        let (m, _) = catalog::worked_model_and_registry();
        let mut e = EventModel::new(m.signature().clone(), ["s"]);
        e.set_pre(0, Formula::bottom()).unwrap();
        assert_eq!(product_update(&m, &e), Err(Error::Undefined));
    }

    #[test]
    fn identity_event_is_isomorphic() {
        let (m, _) = catalog::worked_model_and_registry();
        let id = catalog::identity_event(m.signature().clone());
        let prod = product_update(&m, &id).unwrap();
        let pm = &prod.model;
        assert_eq!(pm.n_worlds(), m.n_worlds());
        for i in 0..2 {
            for w in 0..m.n_worlds() {
                assert_eq!(pm.own(i, w), m.own(i, w));
                assert_eq!(pm.successors(i, w), m.successors(i, w));
            }
        }
        assert_eq!(pm.val(0), m.val(0));
    }

    #[test]
    fn mismatched_signatures() {
        let (m, _) = catalog::worked_model_and_registry();
        let other = std::sync::Arc::new(crate::model::Signature::new(["1", "2"], ["p", "x"], ["p"]).unwrap());
        let e = catalog::identity_event(other);
        assert_eq!(product_update(&m, &e), Err(Error::UniverseMismatch));
        let third = std::sync::Arc::new(crate::model::Signature::new(["1"], ["p"], ["p"]).unwrap());
        let e = catalog::identity_event(third);
        assert_eq!(product_update(&m, &e), Err(Error::AgentSetMismatch));
    }
}
