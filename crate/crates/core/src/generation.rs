//! Random and exhaustive generation of models, event models and formulas,
//! and repairs that push own-sets or effects until a property holds.

use crate::bitset::IdSet;
use crate::closure::{EmpId, TargetEffects};
use crate::error::{Error, Result};
use crate::formula::{Formula, Name};
use crate::model::{EventModel, OModel, Signature};
use crate::properties::{self, AgentFocus, PropertyId};
use crate::semantics::Registry;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Shape and seed of randomly generated models and event models.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    pub sig: Arc<Signature>,
    pub max_worlds: usize,
    pub max_events: usize,
    /// Probability of each possible edge.
    pub edge_density: f64,
    /// Probability that an object is owned, or an atom true, at a world.
    pub own_density: f64,
    /// Probability that an object is in some effect set of an agent at an
    /// event; it is split evenly between positive and negative effects.
    pub effect_density: f64,
    /// Probability that a precondition is something other than `top`.
    pub pre_density: f64,
}

impl GenConfig {
    pub fn new(sig: Arc<Signature>, seed: u64) -> Self {
        GenConfig {
            seed,
            sig,
            max_worlds: 3,
            max_events: 3,
            edge_density: 0.4,
            own_density: 0.5,
            effect_density: 0.3,
            pre_density: 0.3,
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

const MODEL_STREAM: u64 = u64::MAX;
const EVENT_STREAM: u64 = u64::MAX - 1;

fn world_names(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("w{k}")).collect()
}

fn random_set(rng: &mut impl Rng, n: usize, p: f64) -> IdSet {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

/// A model drawn with `rng` according to `cfg`.
pub fn sample_model(rng: &mut impl Rng, cfg: &GenConfig) -> OModel {
    let sig = &cfg.sig;
    let n = rng.gen_range(1..=cfg.max_worlds.max(1));
    let mut m = OModel::new(sig.clone(), world_names(n));
    for i in 0..sig.n_agents() {
        for w in 0..n {
            *m.successors_mut(i, w) = random_set(rng, n, cfg.edge_density);
        }
    }
    for i in 0..sig.n_agents() {
        for w in 0..n {
            m.set_own(i, w, random_set(rng, sig.n_objects(), cfg.own_density));
        }
    }
    for p in 0..sig.n_atoms() {
        m.set_val(p, random_set(rng, n, cfg.own_density));
    }
    m
}

/// An event model drawn with `rng` according to `cfg`. Effects are
/// disjoint by construction and preconditions are static.
pub fn sample_event(rng: &mut impl Rng, cfg: &GenConfig) -> EventModel {
    let sig = &cfg.sig;
    let n = rng.gen_range(1..=cfg.max_events.max(1));
    let names: Vec<String> = (0..n).map(|k| format!("e{k}")).collect();
    let mut e = EventModel::new(sig.clone(), names);
    for i in 0..sig.n_agents() {
        for s in 0..n {
            for t in 0..n {
                if rng.gen_bool(cfg.edge_density) {
                    e.add_edge(i, s, t);
                }
            }
        }
    }
    for i in 0..sig.n_agents() {
        for s in 0..n {
            let (mut plus, mut minus) = (IdSet::new(), IdSet::new());
            for o in 0..sig.n_objects() {
                if rng.gen_bool(cfg.effect_density) {
                    if rng.gen_bool(0.5) {
                        plus.insert(o);
                    } else {
                        minus.insert(o);
                    }
                }
            }
            e.set_effects(i, s, plus, minus);
        }
    }
    for s in 0..n {
        if rng.gen_bool(cfg.pre_density) {
            let pre = FormulaGen::new(sig, None, 2, 0).sample(rng);
            e.set_pre(s, pre).expect("generated precondition is static");
        }
    }
    e
}

/// The model determined by `cfg` alone.
pub fn gen_model(cfg: &GenConfig) -> OModel {
    sample_model(&mut cfg.rng(MODEL_STREAM), cfg)
}

/// The event model determined by `cfg` alone.
pub fn gen_event(cfg: &GenConfig) -> EventModel {
    sample_event(&mut cfg.rng(EVENT_STREAM), cfg)
}

/// Random formulas over a signature and, optionally, the events of a
/// registry.
pub struct FormulaGen<'a> {
    sig: &'a Signature,
    events: Vec<(Name, Vec<Name>)>,
    max_depth: usize,
    max_dyn: usize,
}

impl<'a> FormulaGen<'a> {
    pub fn new(sig: &'a Signature, reg: Option<&Registry>, max_depth: usize, max_dyn: usize) -> Self {
        let events = reg
            .map(|r| r.iter().map(|(n, e)| (n.clone(), e.events().to_vec())).collect())
            .unwrap_or_default();
        FormulaGen {
            sig,
            events,
            max_depth,
            max_dyn,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Formula {
        self.go(rng, self.max_depth, self.max_dyn)
    }

    fn leaf(&self, rng: &mut impl Rng) -> Formula {
        let sig = self.sig;
        let roll = rng.gen_range(0..10);
        if roll == 0 {
            Formula::Top
        } else if roll < 4 && sig.n_atoms() > 0 {
            Formula::Atom(sig.atoms()[rng.gen_range(0..sig.n_atoms())].clone())
        } else {
            let i = rng.gen_range(0..sig.n_agents());
            let o = rng.gen_range(0..sig.n_objects());
            Formula::Owns(sig.agents()[i].clone(), sig.universe()[o].clone())
        }
    }

    fn go(&self, rng: &mut impl Rng, depth: usize, dyns: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.2) {
            return self.leaf(rng);
        }
        let can_dyn = dyns > 0 && !self.events.is_empty();
        match rng.gen_range(0..if can_dyn { 5 } else { 4 }) {
            0 => Formula::not(self.go(rng, depth - 1, dyns)),
            1 => Formula::and(self.go(rng, depth - 1, dyns), self.go(rng, depth - 1, dyns)),
            2 => {
                let i = rng.gen_range(0..self.sig.n_agents());
                Formula::nec(self.sig.agents()[i].clone(), self.go(rng, depth - 1, dyns))
            }
            3 => {
                let i = rng.gen_range(0..self.sig.n_agents());
                Formula::poss(self.sig.agents()[i].clone(), self.go(rng, depth - 1, dyns))
            }
            _ => {
                let (name, events) = &self.events[rng.gen_range(0..self.events.len())];
                let s = events[rng.gen_range(0..events.len())].clone();
                Formula::Dyn(name.clone(), s, Box::new(self.go(rng, depth - 1, dyns - 1)))
            }
        }
    }
}

/// A random formula with at most `max_depth` nested connectives (a
/// diamond counts as one) and at most `max_dyn` nested dynamic modalities
/// drawn from `reg`.
pub fn gen_formula(rng: &mut impl Rng, sig: &Signature, reg: &Registry, max_depth: usize, max_dyn: usize) -> Formula {
    FormulaGen::new(sig, Some(reg), max_depth, max_dyn).sample(rng)
}

/// Bounds for exhaustive enumeration: every model over `sig` with one to
/// `max_worlds` worlds named `w0, w1, ...`. With `reflexive`, only models
/// whose relations are all reflexive.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub sig: Arc<Signature>,
    pub max_worlds: usize,
    pub reflexive: bool,
}

impl Bounds {
    fn bits(&self, n: usize) -> u32 {
        let sig = &self.sig;
        let rel = if self.reflexive { n * n - n } else { n * n };
        (sig.n_agents() * rel + sig.n_agents() * n * sig.n_objects() + sig.n_atoms() * n) as u32
    }

    /// Number of models within the bounds.
    pub fn count(&self) -> u128 {
        (1..=self.max_worlds)
            .map(|n| {
                let b = self.bits(n);
                if b >= 128 {
                    u128::MAX
                } else {
                    1u128 << b
                }
            })
            .fold(0u128, u128::saturating_add)
    }
}

/// Default ceiling on the number of enumerated models.
pub const DEFAULT_CEILING: u128 = 1 << 20;

fn decode(m: &mut OModel, b: &Bounds, mut mask: u64) {
    let sig = b.sig.clone();
    let n = m.n_worlds();
    let mut take = |k: usize| {
        let bits = mask & ((1u64 << k) - 1);
        mask >>= k;
        bits
    };
    for i in 0..sig.n_agents() {
        for w in 0..n {
            let row = if b.reflexive {
                let raw = take(n - 1);
                let low = raw & ((1u64 << w) - 1);
                let high = (raw >> w) << (w + 1);
                low | high | (1u64 << w)
            } else {
                take(n)
            };
            *m.successors_mut(i, w) = IdSet::from_mask(row);
        }
    }
    let no = sig.n_objects();
    for i in 0..sig.n_agents() {
        for w in 0..n {
            m.set_own(i, w, IdSet::from_mask(take(no)));
        }
    }
    for p in 0..sig.n_atoms() {
        m.set_val(p, IdSet::from_mask(take(n)));
    }
}

fn check_ceiling(b: &Bounds, ceiling: u128) -> Result<()> {
    let count = b.count();
    if count > ceiling || (1..=b.max_worlds).any(|n| b.bits(n) >= 64) {
        return Err(Error::EnumerationTooLarge { count, ceiling });
    }
    Ok(())
}

/// Calls `visit` on every model within `b`, reusing one buffer. Returns
/// the number of models visited.
pub fn for_each_model<F: FnMut(&OModel)>(b: &Bounds, ceiling: u128, mut visit: F) -> Result<u64> {
    check_ceiling(b, ceiling)?;
    let mut total = 0;
    for n in 1..=b.max_worlds {
        let mut m = OModel::new(b.sig.clone(), world_names(n));
        for mask in 0..(1u64 << b.bits(n)) {
            decode(&mut m, b, mask);
            visit(&m);
            total += 1;
        }
    }
    Ok(total)
}

/// Every model within `b`, each exactly once.
pub fn enumerate_models(b: &Bounds, ceiling: u128) -> Result<impl Iterator<Item = OModel>> {
    check_ceiling(b, ceiling)?;
    let b = b.clone();
    Ok((1..=b.max_worlds).flat_map(move |n| {
        let b = b.clone();
        let mut m = OModel::new(b.sig.clone(), world_names(n));
        (0..(1u64 << b.bits(n))).map(move |mask| {
            decode(&mut m, &b, mask);
            m.clone()
        })
    }))
}

/// Edits own-sets of `m` until it f-satisfies `p`. Relations and the
/// valuation are never touched. Every round fixes all violations found on
/// the current model; each family only adds or only removes objects, so a
/// fixpoint is reached within `|O|·|W|·|Ag|` changing rounds.
pub fn repair_to_property(m: &OModel, p: PropertyId, f: &AgentFocus) -> Result<OModel> {
    let sig = m.signature().clone();
    f.check_agents(sig.n_agents())?;
    let (na, nw, no) = (sig.n_agents(), m.n_worlds(), sig.n_objects());
    let rounds = no * nw * na + 1;
    let adds = matches!(
        p,
        PropertyId::PresAll | PropertyId::PresSome | PropertyId::AntiInvAll | PropertyId::AntiInvSome
    );
    let mut out = m.clone();
    for _ in 0..rounds {
        let mut changed = false;
        for i in f.domain() {
            let js = f.targets(i).unwrap().clone();
            let chosen = if p.is_universal() {
                js.clone()
            } else {
                IdSet::singleton(js.first().unwrap())
            };
            for w in 0..nw {
                let succ = out.successors(i, w).clone();
                for u in succ.iter() {
                    let mut inter = IdSet::full(no);
                    let mut union = IdSet::new();
                    for j in js.iter() {
                        inter.intersect_with(out.own(j, u));
                        union.union_with(out.own(j, u));
                    }
                    let bad = p.violations(out.own(i, w), &inter, &union, no);
                    if bad.is_empty() {
                        continue;
                    }
                    for j in chosen.iter() {
                        let set = out.own_mut(j, u);
                        let before = set.clone();
                        if adds {
                            set.union_with(&bad);
                        } else {
                            set.difference_with(&bad);
                        }
                        changed |= *set != before;
                    }
                }
            }
        }
        if !changed {
            debug_assert!(properties::first_violation(&out, p, f).is_none());
            return Ok(out);
        }
    }
    Err(Error::Unrepairable { rounds })
}

/// Edits effect sets of `e` until it f-satisfies `emp`, keeping positive
/// and negative effects disjoint. For Pres and AntiInv rows positive
/// effects only grow and negative ones only shrink; for AntiPres and Inv
/// rows it is the other way round, so the fixpoint is reached within
/// `2·|O|·|S|·|Ag|` changing rounds.
pub fn repair_event_to_emp(e: &EventModel, emp: EmpId, f: &AgentFocus) -> Result<EventModel> {
    let sig = e.signature().clone();
    f.check_agents(sig.n_agents())?;
    let (na, ns, no) = (sig.n_agents(), e.n_events(), sig.n_objects());
    let rounds = 2 * no * ns * na + 1;
    let p = emp.property();
    // (edit for the first conjunct, edit for the second); the first one
    // acts on the designated target only for existential rows.
    let (first_edit, second_edit) = match p {
        PropertyId::PresAll | PropertyId::PresSome => (Edit::GrowPlus, Edit::ShrinkMinus),
        PropertyId::AntiInvAll | PropertyId::AntiInvSome => (Edit::GrowPlus, Edit::ShrinkMinus),
        PropertyId::AntiPresAll | PropertyId::AntiPresSome => (Edit::ShrinkPlus, Edit::GrowMinus),
        PropertyId::InvAll | PropertyId::InvSome => (Edit::GrowMinus, Edit::ShrinkPlus),
    };
    let mut out = e.clone();
    for _ in 0..rounds {
        let mut changed = false;
        for i in f.domain() {
            let js = f.targets(i).unwrap().clone();
            let designated = IdSet::singleton(js.first().unwrap());
            let pick = |edit: Edit| match edit {
                Edit::GrowPlus | Edit::GrowMinus if !p.is_universal() => &designated,
                _ => &js,
            };
            for s in 0..ns {
                let succ = out.successors(i, s).clone();
                for t in succ.iter() {
                    let targets = TargetEffects::of(&out, &js, t);
                    let (first, second) = emp.violations(out.eff_plus(i, s), out.eff_minus(i, s), &targets);
                    for (edit, bad) in [(first_edit, first), (second_edit, second)] {
                        if bad.is_empty() {
                            continue;
                        }
                        for j in pick(edit).iter() {
                            changed |= edit.apply(&mut out, j, t, &bad);
                        }
                    }
                }
            }
        }
        if !changed {
            debug_assert!(crate::closure::first_emp_violation(&out, emp, f).is_none());
            return Ok(out);
        }
    }
    Err(Error::Unrepairable { rounds })
}

#[derive(Clone, Copy)]
enum Edit {
    GrowPlus,
    ShrinkPlus,
    GrowMinus,
    ShrinkMinus,
}

impl Edit {
    /// Applies the edit to agent `j` at event `t`; true if anything changed.
    fn apply(self, e: &mut EventModel, j: usize, t: usize, objects: &IdSet) -> bool {
        let before = (e.eff_plus(j, t).clone(), e.eff_minus(j, t).clone());
        match self {
            Edit::GrowPlus => {
                e.eff_plus_mut(j, t).union_with(objects);
                e.eff_minus_mut(j, t).difference_with(objects);
            }
            Edit::ShrinkPlus => e.eff_plus_mut(j, t).difference_with(objects),
            Edit::GrowMinus => {
                e.eff_minus_mut(j, t).union_with(objects);
                e.eff_plus_mut(j, t).difference_with(objects);
            }
            Edit::ShrinkMinus => e.eff_minus_mut(j, t).difference_with(objects),
        }
        before != (e.eff_plus(j, t).clone(), e.eff_minus(j, t).clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::check_emp;
    use crate::model::validate_model;

    fn sig1() -> Arc<Signature> {
        Arc::new(Signature::new(["1"], ["a"], Vec::<&str>::new()).unwrap())
    }

    #[test]
    fn smallest_enumeration() {
        let b = Bounds {
            sig: sig1(),
            max_worlds: 1,
            reflexive: false,
        };
        assert_eq!(b.count(), 4);
        let all: Vec<OModel> = enumerate_models(&b, DEFAULT_CEILING).unwrap().collect();
        assert_eq!(all.len(), 4);
        for (k, m) in all.iter().enumerate() {
            assert!(all[..k].iter().all(|other| other != m));
            assert!(validate_model(&b.sig, &m.to_doc("m")).is_ok());
        }
    }

    #[test]
    fn reflexive_enumeration() {
        let b = Bounds {
            sig: sig1(),
            max_worlds: 3,
            reflexive: true,
        };
        let mut seen = 0;
        let n = for_each_model(&b, DEFAULT_CEILING, |m| {
            assert!(m.is_reflexive(0));
            seen += 1;
        })
        .unwrap();
        assert_eq!(n, seen);
        assert_eq!(n as u128, b.count());
        assert_eq!(b.count(), 2 + 4 * 4 + 64 * 8);
    }

    #[test]
    fn ceiling() {
        let b = Bounds {
            sig: sig1(),
            max_worlds: 3,
            reflexive: false,
        };
        assert!(matches!(
            for_each_model(&b, 100, |_| {}),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn determinism() {
        let cfg = GenConfig::new(crate::catalog::worked_signature(), 42);
        assert_eq!(gen_model(&cfg), gen_model(&cfg));
        assert_eq!(gen_event(&cfg), gen_event(&cfg));
        let mut isolated = cfg.clone();
        isolated.max_worlds = 1;
        isolated.edge_density = 0.0;
        let m = gen_model(&isolated);
        assert_eq!(m.n_worlds(), 1);
        assert!(m.successors(0, 0).is_empty() && m.successors(1, 0).is_empty());
    }

    #[test]
    fn one_step_repairs() {
        let s = sig1();
        let mut m = OModel::new(s.clone(), ["w", "u"]);
        m.add_edge(0, 0, 1);
        m.set_own(0, 0, IdSet::singleton(0));
        let r = repair_to_property(&m, PropertyId::PresAll, &AgentFocus::indv(1)).unwrap();
        assert_eq!(r.own(0, 1), &IdSet::singleton(0));
        let again = repair_to_property(&r, PropertyId::PresAll, &AgentFocus::indv(1)).unwrap();
        assert_eq!(again, r);

        let mut refl = OModel::new(s.clone(), ["w"]);
        refl.add_edge(0, 0, 0);
        refl.set_own(0, 0, IdSet::singleton(0));
        let r = repair_to_property(&refl, PropertyId::InvAll, &AgentFocus::indv(1)).unwrap();
        assert!(r.own(0, 0).is_empty());

        let mut e = EventModel::new(s, ["s", "t"]);
        e.add_edge(0, 0, 1);
        *e.eff_plus_mut(0, 0) = IdSet::singleton(0);
        let r = repair_event_to_emp(&e, EmpId(PropertyId::PresAll), &AgentFocus::indv(1)).unwrap();
        assert_eq!(r.eff_plus(0, 1), &IdSet::singleton(0));
    }

    #[test]
    fn repairs_are_sound_on_samples() {
        let sig = Arc::new(Signature::new(["1", "2"], ["a", "b"], ["p"]).unwrap());
        let foci = [
            AgentFocus::indv(2),
            AgentFocus::gen(2),
            AgentFocus::parse(&sig, "1:{2}").unwrap(),
        ];
        let mut cfg = GenConfig::new(sig.clone(), 3);
        cfg.effect_density = 0.6;
        for k in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(k);
            let m = sample_model(&mut rng, &cfg);
            let e = sample_event(&mut rng, &cfg);
            for p in PropertyId::ALL {
                for f in &foci {
                    let rm = repair_to_property(&m, p, f).unwrap();
                    assert!(properties::check_group_property(&rm, p, f).unwrap().holds);
                    let re = repair_event_to_emp(&e, EmpId(p), f).unwrap();
                    assert!(check_emp(&re, EmpId(p), f).unwrap().holds, "{p} {f:?}");
                    assert!(re.violations().is_empty());
                }
            }
        }
    }

    #[test]
    fn formulas_respect_bounds() {
        let (_, reg) = crate::catalog::worked_model_and_registry();
        let sig = crate::catalog::worked_signature();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let f = gen_formula(&mut rng, &sig, &reg, 5, 2);
            assert!(f.dyn_depth() <= 2);
        }
    }
}
