//! Safety conditions on event models and the closure of model properties
//! under product update.

use crate::bitset::IdSet;
use crate::error::{Error, Result};
use crate::generation::{self, GenConfig};
use crate::model::{EventModel, OModel};
use crate::properties::{self, AgentFocus, CheckReport, PropertyId, Witness};
use crate::update;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// The event-model condition that keeps a property alive through updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EmpId(pub PropertyId);

impl EmpId {
    pub const ALL: [EmpId; 8] = [
        EmpId(PropertyId::PresAll),
        EmpId(PropertyId::PresSome),
        EmpId(PropertyId::AntiPresAll),
        EmpId(PropertyId::AntiPresSome),
        EmpId(PropertyId::InvAll),
        EmpId(PropertyId::InvSome),
        EmpId(PropertyId::AntiInvAll),
        EmpId(PropertyId::AntiInvSome),
    ];

    /// The property this condition is safe for.
    pub fn property(self) -> PropertyId {
        self.0
    }

    /// Objects violating each conjunct of the row for the edge `s T_i t`.
    ///
    /// `plus`/`minus` are the source agent's effects at `s`; the four sets
    /// that follow are the meet and join of the targets' effects at `t`.
    pub(crate) fn violations(self, plus: &IdSet, minus: &IdSet, t: &TargetEffects) -> (IdSet, IdSet) {
        match self.0 {
            PropertyId::PresAll => (plus.difference(&t.plus_meet), t.minus_join.difference(minus)),
            PropertyId::PresSome => (plus.difference(&t.plus_join), t.minus_join.difference(minus)),
            PropertyId::AntiPresAll => (t.plus_join.difference(plus), minus.difference(&t.minus_meet)),
            PropertyId::AntiPresSome => (t.plus_join.difference(plus), minus.difference(&t.minus_join)),
            PropertyId::InvAll => (plus.difference(&t.minus_meet), t.plus_join.difference(minus)),
            PropertyId::InvSome => (plus.difference(&t.minus_join), t.plus_join.difference(minus)),
            PropertyId::AntiInvAll => (minus.difference(&t.plus_meet), t.minus_join.difference(plus)),
            PropertyId::AntiInvSome => (minus.difference(&t.plus_join), t.minus_join.difference(plus)),
        }
    }
}

impl fmt::Display for EmpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "emp-{}", self.0.name())
    }
}

impl FromStr for EmpId {
    type Err = Error;

    /// Accepts `emp-pres-all` as well as the bare property name.
    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix("emp-")
            .unwrap_or(s)
            .parse()
            .map(EmpId)
            .map_err(|_| Error::UnknownName {
                kind: "event-model property",
                name: s.to_string(),
            })
    }
}

/// Meets and joins of the effect sets of a target set at one event.
pub(crate) struct TargetEffects {
    pub plus_meet: IdSet,
    pub plus_join: IdSet,
    pub minus_meet: IdSet,
    pub minus_join: IdSet,
}

impl TargetEffects {
    pub(crate) fn of(e: &EventModel, js: &IdSet, t: usize) -> Self {
        let n = e.signature().n_objects();
        let mut out = TargetEffects {
            plus_meet: IdSet::full(n),
            plus_join: IdSet::new(),
            minus_meet: IdSet::full(n),
            minus_join: IdSet::new(),
        };
        for j in js.iter() {
            out.plus_meet.intersect_with(e.eff_plus(j, t));
            out.plus_join.union_with(e.eff_plus(j, t));
            out.minus_meet.intersect_with(e.eff_minus(j, t));
            out.minus_join.union_with(e.eff_minus(j, t));
        }
        out
    }
}

/// Does `e` f-satisfy `emp`? The witness is the least failing
/// `(i, s, t, object)`.
pub fn check_emp(e: &EventModel, emp: EmpId, f: &AgentFocus) -> Result<CheckReport> {
    f.check_agents(e.signature().n_agents())?;
    Ok(CheckReport::from_witness(first_emp_violation(e, emp, f)))
}

pub(crate) fn first_emp_violation(e: &EventModel, emp: EmpId, f: &AgentFocus) -> Option<Witness> {
    for i in f.domain() {
        let js = f.targets(i).unwrap();
        for s in 0..e.n_events() {
            for t in e.successors(i, s).iter() {
                let targets = TargetEffects::of(e, js, t);
                let (a, b) = emp.violations(e.eff_plus(i, s), e.eff_minus(i, s), &targets);
                if let Some(object) = a.union(&b).first() {
                    return Some(Witness {
                        agent: i,
                        from: s,
                        to: t,
                        object,
                    });
                }
            }
        }
    }
    None
}

/// Re-checks an EMP witness object by object against the row.
pub fn emp_witness_is_violation(e: &EventModel, emp: EmpId, f: &AgentFocus, wit: &Witness) -> bool {
    let Some(js) = f.targets(wit.agent) else {
        return false;
    };
    if !e.has_edge(wit.agent, wit.from, wit.to) {
        return false;
    }
    let x = wit.object;
    let p_i = e.eff_plus(wit.agent, wit.from).contains(x);
    let n_i = e.eff_minus(wit.agent, wit.from).contains(x);
    let p: Vec<bool> = js.iter().map(|j| e.eff_plus(j, wit.to).contains(x)).collect();
    let n: Vec<bool> = js.iter().map(|j| e.eff_minus(j, wit.to).contains(x)).collect();
    let all = |v: &[bool]| v.iter().all(|&b| b);
    let any = |v: &[bool]| v.iter().any(|&b| b);
    let (first, second) = match emp.0 {
        PropertyId::PresAll => (!p_i || all(&p), !any(&n) || n_i),
        PropertyId::PresSome => (!p_i || any(&p), !any(&n) || n_i),
        PropertyId::AntiPresAll => (!any(&p) || p_i, !n_i || all(&n)),
        PropertyId::AntiPresSome => (!any(&p) || p_i, !n_i || any(&n)),
        PropertyId::InvAll => (!p_i || all(&n), !any(&p) || n_i),
        PropertyId::InvSome => (!p_i || any(&n), !any(&p) || n_i),
        PropertyId::AntiInvAll => (!n_i || all(&p), !any(&n) || p_i),
        PropertyId::AntiInvSome => (!n_i || any(&p), !any(&n) || p_i),
    };
    !(first && second)
}

/// Outcome of checking the closure hypotheses and conclusion on one pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub model_ok: bool,
    pub model_witness: Option<Witness>,
    pub event_ok: bool,
    pub event_witness: Option<Witness>,
    pub product_defined: bool,
    /// The product is defined and satisfies the property.
    pub product_ok: bool,
    pub product_witness: Option<Witness>,
}

impl ClosureReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.model_ok && self.event_ok && self.product_defined
    }
}

/// Checks both hypotheses and the conclusion. Never repairs anything;
/// fails with [`Error::TheoremViolation`] when the hypotheses hold and the
/// product still violates the property.
pub fn verify_closure(m: &OModel, e: &EventModel, p: PropertyId, f: &AgentFocus) -> Result<ClosureReport> {
    let report = closure_report(m, e, p, f)?;
    if report.hypotheses_hold() && !report.product_ok {
        return Err(Error::TheoremViolation(format!(
            "product violates {p} at {:?}",
            report.product_witness
        )));
    }
    Ok(report)
}

/// The same checks as [`verify_closure`] without judging the outcome.
pub fn closure_report(m: &OModel, e: &EventModel, p: PropertyId, f: &AgentFocus) -> Result<ClosureReport> {
    let model = properties::check_group_property(m, p, f)?;
    let event = check_emp(e, EmpId(p), f)?;
    let (product_defined, product) = match update::product_update(m, e) {
        Ok(prod) => (true, Some(properties::check_group_property(&prod.model, p, f)?)),
        Err(Error::Undefined) => (false, None),
        Err(other) => return Err(other),
    };
    let report = ClosureReport {
        model_ok: model.holds,
        model_witness: model.witness,
        event_ok: event.holds,
        event_witness: event.witness,
        product_defined,
        product_ok: product.is_some_and(|r| r.holds),
        product_witness: product.and_then(|r| r.witness),
    };
    Ok(report)
}

/// A pair whose defined product violates the property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub sample: u64,
    pub model: OModel,
    pub event: EventModel,
    /// Violation in the product, with product world indices.
    pub witness: Witness,
}

/// Samples models repaired to `p` and events (repaired to `EMP(p)` when
/// `enforce_emp`) and returns the first pair whose defined product violates
/// `p`. Sample `k` is drawn from its own stream of `cfg.seed`, so the
/// result does not depend on how samples are scheduled.
pub fn search_counterexample(
    cfg: &GenConfig,
    p: PropertyId,
    f: &AgentFocus,
    enforce_emp: bool,
    budget: u64,
) -> Result<Option<Counterexample>> {
    f.check_agents(cfg.sig.n_agents())?;
    for k in 0..budget {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k);
        let m = generation::repair_to_property(&generation::sample_model(&mut rng, cfg), p, f)?;
        let mut e = generation::sample_event(&mut rng, cfg);
        if enforce_emp {
            e = generation::repair_event_to_emp(&e, EmpId(p), f)?;
        }
        let prod = match update::product_update(&m, &e) {
            Ok(prod) => prod,
            Err(Error::Undefined) => continue,
            Err(other) => return Err(other),
        };
        if let Some(witness) = properties::first_violation(&prod.model, p, f) {
            return Ok(Some(Counterexample {
                sample: k,
                model: m,
                event: e,
                witness,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn effect_free_events_satisfy_every_row() {
        let sig = catalog::worked_signature();
        let mut e = EventModel::new(sig.clone(), ["s", "t"]);
        for i in 0..2 {
            e.add_edge(i, 0, 1);
            e.add_edge(i, 1, 0);
        }
        for emp in EmpId::ALL {
            for f in [AgentFocus::indv(2), AgentFocus::gen(2)] {
                assert!(check_emp(&e, emp, &f).unwrap().holds);
            }
        }
    }

    #[test]
    fn private_forgetting_breaks_anti_preservation() {
        let sig = catalog::worked_signature();
        let pri = catalog::private_forgetting(sig.clone(), 0, 0);
        let f = AgentFocus::gen(2);
        let r = check_emp(&pri, EmpId(PropertyId::AntiPresAll), &f).unwrap();
        let wit = r.witness.unwrap();
        assert_eq!(
            wit,
            Witness {
                agent: 0,
                from: 0,
                to: 0,
                object: 0
            }
        );
        assert!(emp_witness_is_violation(&pri, EmpId(PropertyId::AntiPresAll), &f, &wit));
    }

    #[test]
    fn alert_forgetting_rows() {
        let sig = catalog::worked_signature();
        let al = catalog::alert_private_forgetting(sig, 0, 0);
        let f = AgentFocus::gen(2);
        assert!(check_emp(&al, EmpId(PropertyId::AntiPresAll), &f).unwrap().holds);
        let inv = check_emp(&al, EmpId(PropertyId::AntiInvAll), &f).unwrap();
        assert!(!inv.holds);
        assert_eq!(
            inv.witness,
            Some(Witness {
                agent: 0,
                from: 0,
                to: 2,
                object: 0
            })
        );
    }

    #[test]
    fn trivial_closure() {
        let sig = catalog::worked_signature();
        let mut m = OModel::new(sig.clone(), ["w"]);
        m.add_edge(0, 0, 0);
        m.add_edge(1, 0, 0);
        let id = catalog::identity_event(sig);
        let r = verify_closure(&m, &id, PropertyId::PresAll, &AgentFocus::indv(2)).unwrap();
        assert!(r.model_ok && r.event_ok && r.product_defined && r.product_ok);
    }

    #[test]
    fn alert_forgetting_keeps_anti_preservation() {
        let (m, reg) = catalog::worked_model_and_registry();
        let r = verify_closure(
            &m,
            reg.get("AlPri").unwrap(),
            PropertyId::AntiPresAll,
            &AgentFocus::gen(2),
        )
        .unwrap();
        assert!(r.hypotheses_hold() && r.product_ok);
        let r = verify_closure(
            &m,
            reg.get("Pri").unwrap(),
            PropertyId::AntiPresAll,
            &AgentFocus::gen(2),
        )
        .unwrap();
        assert!(r.model_ok && !r.event_ok && !r.product_ok);
    }

    #[test]
    fn emp_names() {
        for emp in EmpId::ALL {
            assert_eq!(emp.to_string().parse::<EmpId>().unwrap(), emp);
            assert_eq!(emp.property().name().parse::<EmpId>().unwrap(), emp);
        }
    }

    #[test]
    fn zero_budget_finds_nothing() {
        let cfg = GenConfig::new(catalog::worked_signature(), 7);
        assert_eq!(
            search_counterexample(&cfg, PropertyId::PresAll, &AgentFocus::indv(2), false, 0).unwrap(),
            None
        );
    }
}
