//! Individual and group properties relating accessibility to object sets,
//! their characterising schemas, and diagnostics built on top of them.

use crate::bitset::IdSet;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::model::{OModel, Signature};
use crate::semantics::{self, Registry};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// The eight group properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PropertyId {
    PresAll,
    PresSome,
    AntiPresAll,
    AntiPresSome,
    InvAll,
    InvSome,
    AntiInvAll,
    AntiInvSome,
}

impl PropertyId {
    pub const ALL: [PropertyId; 8] = [
        PropertyId::PresAll,
        PropertyId::PresSome,
        PropertyId::AntiPresAll,
        PropertyId::AntiPresSome,
        PropertyId::InvAll,
        PropertyId::InvSome,
        PropertyId::AntiInvAll,
        PropertyId::AntiInvSome,
    ];

    /// Command-line name, e.g. `anti-pres-all`.
    pub fn name(self) -> &'static str {
        match self {
            PropertyId::PresAll => "pres-all",
            PropertyId::PresSome => "pres-some",
            PropertyId::AntiPresAll => "anti-pres-all",
            PropertyId::AntiPresSome => "anti-pres-some",
            PropertyId::InvAll => "inv-all",
            PropertyId::InvSome => "inv-some",
            PropertyId::AntiInvAll => "anti-inv-all",
            PropertyId::AntiInvSome => "anti-inv-some",
        }
    }

    pub fn is_universal(self) -> bool {
        matches!(
            self,
            PropertyId::PresAll | PropertyId::AntiPresAll | PropertyId::InvAll | PropertyId::AntiInvAll
        )
    }

    /// Objects of the universe violating the row for one edge `w R_i u`,
    /// given `O_i(w)` and the intersection and union of `O_j(u)` over the
    /// targets.
    pub(crate) fn violations(self, own: &IdSet, inter: &IdSet, union: &IdSet, n_objects: usize) -> IdSet {
        match self {
            PropertyId::PresAll => own.difference(inter),
            PropertyId::PresSome => own.difference(union),
            PropertyId::AntiPresAll => union.difference(own),
            PropertyId::AntiPresSome => inter.difference(own),
            PropertyId::InvAll => own.intersection(union),
            PropertyId::InvSome => own.intersection(inter),
            PropertyId::AntiInvAll => own.union(inter).complement(n_objects),
            PropertyId::AntiInvSome => own.union(union).complement(n_objects),
        }
    }

    /// [`PropertyId::violations`] on single words; `full` is the universe.
    pub(crate) fn violation_word(self, own: u64, inter: u64, union: u64, full: u64) -> u64 {
        match self {
            PropertyId::PresAll => own & !inter,
            PropertyId::PresSome => own & !union,
            PropertyId::AntiPresAll => union & !own,
            PropertyId::AntiPresSome => inter & !own,
            PropertyId::InvAll => own & union,
            PropertyId::InvSome => own & inter,
            PropertyId::AntiInvAll => full & !(own | inter),
            PropertyId::AntiInvSome => full & !(own | union),
        }
    }

    /// The characterising schema for agent `i`, targets `js` and object `o`.
    pub fn schema(self, sig: &Signature, i: usize, js: &IdSet, o: usize) -> Formula {
        let obj = &sig.universe()[o];
        let owns = |k: usize| Formula::Owns(sig.agents()[k].clone(), obj.clone());
        let negated = |k: usize| Formula::not(owns(k));
        let (premise, body) = match self {
            PropertyId::PresAll => (owns(i), Formula::conj(js.iter().map(owns))),
            PropertyId::PresSome => (owns(i), Formula::disj(js.iter().map(owns))),
            PropertyId::AntiPresAll => (negated(i), Formula::conj(js.iter().map(negated))),
            PropertyId::AntiPresSome => (negated(i), Formula::disj(js.iter().map(negated))),
            PropertyId::InvAll => (owns(i), Formula::conj(js.iter().map(negated))),
            PropertyId::InvSome => (owns(i), Formula::disj(js.iter().map(negated))),
            PropertyId::AntiInvAll => (negated(i), Formula::conj(js.iter().map(owns))),
            PropertyId::AntiInvSome => (negated(i), Formula::disj(js.iter().map(owns))),
        };
        Formula::implies(premise, Formula::Box(sig.agents()[i].clone(), Box::new(body)))
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PropertyId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "property",
                name: s.to_string(),
            })
    }
}

/// A partial map from agents to nonempty sets of target agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentFocus {
    targets: Vec<Option<IdSet>>,
}

impl AgentFocus {
    /// Builds a focus from `(agent, targets)` pairs. The domain and every
    /// target set must be nonempty; later pairs for the same agent replace
    /// earlier ones.
    pub fn new<I: IntoIterator<Item = (usize, IdSet)>>(pairs: I) -> Result<Self> {
        let mut targets: Vec<Option<IdSet>> = Vec::new();
        for (i, js) in pairs {
            if js.is_empty() {
                return Err(Error::InvalidFocus(format!("agent #{i} has an empty target set")));
            }
            if targets.len() <= i {
                targets.resize(i + 1, None);
            }
            targets[i] = Some(js);
        }
        if targets.iter().all(Option::is_none) {
            return Err(Error::InvalidFocus("empty domain".into()));
        }
        Ok(AgentFocus { targets })
    }

    /// `f_indv`: every agent mapped to itself.
    pub fn indv(n_agents: usize) -> Self {
        AgentFocus {
            targets: (0..n_agents).map(|i| Some(IdSet::singleton(i))).collect(),
        }
    }

    /// `f_gen`: every agent mapped to the whole agent set.
    pub fn gen(n_agents: usize) -> Self {
        AgentFocus {
            targets: (0..n_agents).map(|_| Some(IdSet::full(n_agents))).collect(),
        }
    }

    /// Parses `indv`, `gen`, or `i:{j,k};i2:{...}` against agent names.
    pub fn parse(sig: &Signature, text: &str) -> Result<Self> {
        let text = text.trim();
        match text {
            "indv" => return Ok(Self::indv(sig.n_agents())),
            "gen" => return Ok(Self::gen(sig.n_agents())),
            _ => {}
        }
        let agent = |name: &str| {
            let name = name.trim();
            sig.agent(name)
                .ok_or_else(|| Error::UnknownAgentInFocus(name.to_string()))
        };
        let mut pairs = Vec::new();
        for entry in text.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let (head, rest) = entry
                .split_once(':')
                .ok_or_else(|| Error::InvalidFocus(format!("missing `:` in `{entry}`")))?;
            let inner = rest
                .trim()
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or_else(|| Error::InvalidFocus(format!("expected `{{...}}` in `{entry}`")))?;
            let mut js = IdSet::new();
            for j in inner.split(',').map(str::trim).filter(|j| !j.is_empty()) {
                js.insert(agent(j)?);
            }
            pairs.push((agent(head)?, js));
        }
        Self::new(pairs)
    }

    /// Agents in the domain, ascending.
    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.as_ref().map(|_| i))
    }

    pub fn targets(&self, agent: usize) -> Option<&IdSet> {
        self.targets.get(agent).and_then(Option::as_ref)
    }

    /// Fails unless every agent mentioned is below `n_agents`.
    pub fn check_agents(&self, n_agents: usize) -> Result<()> {
        for i in self.domain() {
            let js = self.targets(i).expect("domain member");
            if let Some(bad) = std::iter::once(i).chain(js.iter()).find(|&k| k >= n_agents) {
                return Err(Error::UnknownAgentInFocus(format!("#{bad}")));
            }
        }
        Ok(())
    }

    /// Text form accepted by [`AgentFocus::parse`].
    pub fn to_text(&self, sig: &Signature) -> String {
        self.domain()
            .map(|i| {
                let js: Vec<&str> = self.targets(i).unwrap().iter().map(|j| &*sig.agents()[j]).collect();
                format!("{}:{{{}}}", sig.agents()[i], js.join(","))
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// A failing instance of an edge condition: agent, edge source and target
/// (worlds or events), and the offending object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Witness {
    pub agent: usize,
    pub from: usize,
    pub to: usize,
    pub object: usize,
}

/// Verdict of a checker with the lexicographically first witness on failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl CheckReport {
    pub(crate) fn from_witness(witness: Option<Witness>) -> Self {
        CheckReport {
            holds: witness.is_none(),
            witness,
        }
    }
}

fn meet_join<'a>(sets: impl Iterator<Item = &'a IdSet>, n_objects: usize) -> (IdSet, IdSet) {
    let mut inter = IdSet::full(n_objects);
    let mut union = IdSet::new();
    for s in sets {
        inter.intersect_with(s);
        union.union_with(s);
    }
    (inter, union)
}

/// Does `m` f-satisfy `p`? Edges are scanned by agent, source world,
/// target world, so the witness is the least failing `(i, w, u, o)`.
pub fn check_group_property(m: &OModel, p: PropertyId, f: &AgentFocus) -> Result<CheckReport> {
    f.check_agents(m.signature().n_agents())?;
    Ok(CheckReport::from_witness(first_violation(m, p, f)))
}

pub(crate) fn first_violation(m: &OModel, p: PropertyId, f: &AgentFocus) -> Option<Witness> {
    let n_objects = m.signature().n_objects();
    if n_objects <= 64 {
        return first_violation_word(m, p, f, n_objects);
    }
    first_violation_sets(m, p, f)
}

fn first_violation_sets(m: &OModel, p: PropertyId, f: &AgentFocus) -> Option<Witness> {
    let n_objects = m.signature().n_objects();
    for i in f.domain() {
        let js = f.targets(i).unwrap();
        for w in 0..m.n_worlds() {
            let own = m.own(i, w);
            for u in m.successors(i, w).iter() {
                let (inter, union) = meet_join(js.iter().map(|j| m.own(j, u)), n_objects);
                if let Some(object) = p.violations(own, &inter, &union, n_objects).first() {
                    return Some(Witness {
                        agent: i,
                        from: w,
                        to: u,
                        object,
                    });
                }
            }
        }
    }
    None
}

/// [`first_violation`] on plain words, for universes of at most 64 objects.
fn first_violation_word(m: &OModel, p: PropertyId, f: &AgentFocus, n_objects: usize) -> Option<Witness> {
    let full = if n_objects == 64 {
        u64::MAX
    } else {
        (1u64 << n_objects) - 1
    };
    let word = |s: &IdSet| s.as_word().expect("at most 64 objects");
    for i in f.domain() {
        let js = f.targets(i).unwrap();
        for w in 0..m.n_worlds() {
            let own = word(m.own(i, w));
            for u in m.successors(i, w).iter() {
                let (mut inter, mut union) = (full, 0);
                for j in js.iter() {
                    let theirs = word(m.own(j, u));
                    inter &= theirs;
                    union |= theirs;
                }
                let bad = p.violation_word(own, inter, union, full);
                if bad != 0 {
                    return Some(Witness {
                        agent: i,
                        from: w,
                        to: u,
                        object: bad.trailing_zeros() as usize,
                    });
                }
            }
        }
    }
    None
}

/// Re-checks a witness against the row's defining condition; true when the
/// witness really is a violation.
pub fn witness_is_violation(m: &OModel, p: PropertyId, f: &AgentFocus, wit: &Witness) -> bool {
    let Some(js) = f.targets(wit.agent) else {
        return false;
    };
    if !m.has_edge(wit.agent, wit.from, wit.to) {
        return false;
    }
    let x = wit.object;
    let mine = m.own(wit.agent, wit.from).contains(x);
    let mut theirs = js.iter().map(|j| m.own(j, wit.to).contains(x));
    let (all, some) = {
        let v: Vec<bool> = theirs.by_ref().collect();
        (v.iter().all(|&b| b), v.iter().any(|&b| b))
    };
    let row_holds = match p {
        PropertyId::PresAll => !mine || all,
        PropertyId::PresSome => !mine || some,
        PropertyId::AntiPresAll => mine || !some,
        PropertyId::AntiPresSome => mine || !all,
        PropertyId::InvAll => !mine || !some,
        PropertyId::InvSome => !mine || !all,
        PropertyId::AntiInvAll => mine || all,
        PropertyId::AntiInvSome => mine || some,
    };
    !row_holds
}

/// One schema instance per agent in the domain and object of the universe,
/// agent-major.
pub fn char_schema_instances(p: PropertyId, f: &AgentFocus, sig: &Signature) -> Result<Vec<Formula>> {
    f.check_agents(sig.n_agents())?;
    let mut out = Vec::new();
    for i in f.domain() {
        let js = f.targets(i).unwrap();
        for o in 0..sig.n_objects() {
            out.push(p.schema(sig, i, js, o));
        }
    }
    Ok(out)
}

/// Global truth of the characterising schema instances.
pub fn check_via_schema(m: &OModel, p: PropertyId, f: &AgentFocus) -> Result<bool> {
    let schema = char_schema_instances(p, f, m.signature())?;
    semantics::globally_true(m, &schema, &Registry::new())
}

/// The single-agent properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IndividualProperty {
    Preservation,
    AntiPreservation,
    Invariance,
    Inversion,
    AntiInversion,
}

impl IndividualProperty {
    pub const ALL: [IndividualProperty; 5] = [
        IndividualProperty::Preservation,
        IndividualProperty::AntiPreservation,
        IndividualProperty::Invariance,
        IndividualProperty::Inversion,
        IndividualProperty::AntiInversion,
    ];

    /// Edge condition `O_i(w) ? O_i(u)` for a single agent.
    pub fn edge_holds(self, own_w: &IdSet, own_u: &IdSet, n_objects: usize) -> bool {
        match self {
            IndividualProperty::Preservation => own_w.is_subset(own_u),
            IndividualProperty::AntiPreservation => own_u.is_subset(own_w),
            IndividualProperty::Invariance => own_w == own_u,
            IndividualProperty::Inversion => own_w.is_disjoint(own_u),
            IndividualProperty::AntiInversion => own_w.union(own_u).len() == n_objects,
        }
    }

    /// Group properties whose `f_indv` instance coincides with this one.
    pub fn as_group(self) -> &'static [PropertyId] {
        match self {
            IndividualProperty::Preservation => &[PropertyId::PresAll],
            IndividualProperty::AntiPreservation => &[PropertyId::AntiPresAll],
            IndividualProperty::Invariance => &[PropertyId::PresAll, PropertyId::AntiPresAll],
            IndividualProperty::Inversion => &[PropertyId::InvAll],
            IndividualProperty::AntiInversion => &[PropertyId::AntiInvAll],
        }
    }

    /// Characterising schema for agent `i` and object `o`.
    pub fn schema(self, sig: &Signature, i: usize, o: usize) -> Formula {
        let me = IdSet::singleton(i);
        match self {
            IndividualProperty::Invariance => Formula::and(
                PropertyId::PresAll.schema(sig, i, &me, o),
                PropertyId::AntiPresAll.schema(sig, i, &me, o),
            ),
            other => other.as_group()[0].schema(sig, i, &me, o),
        }
    }
}

/// Does every agent's relation satisfy `p` for its own object sets?
pub fn check_individual(m: &OModel, p: IndividualProperty) -> bool {
    let n_objects = m.signature().n_objects();
    (0..m.signature().n_agents()).all(|i| {
        m.edges(i)
            .all(|(w, u)| p.edge_holds(m.own(i, w), m.own(i, u), n_objects))
    })
}

/// Schema instances of an individual property for every agent and object.
pub fn individual_schema_instances(p: IndividualProperty, sig: &Signature) -> Vec<Formula> {
    (0..sig.n_agents())
        .flat_map(|i| (0..sig.n_objects()).map(move |o| (i, o)))
        .map(|(i, o)| p.schema(sig, i, o))
        .collect()
}

fn require_reflexive(m: &OModel) -> Result<()> {
    for i in 0..m.signature().n_agents() {
        for w in 0..m.n_worlds() {
            if !m.has_edge(i, w, w) {
                return Err(Error::NotReflexive {
                    agent: m.signature().agents()[i].to_string(),
                    world: m.world_name(w).to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Observations about a reflexive model under `f_gen`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prop2Report {
    pub pres_all: bool,
    pub anti_pres_all: bool,
    pub inv_all: bool,
    pub anti_inv_all: bool,
    /// All agents own the same objects at each world.
    pub agents_agree: bool,
    /// Every agent's own-set is constant on each component of the
    /// transitive closure of the union of the relations.
    pub constant_on_components: bool,
    pub all_empty: bool,
    pub all_full: bool,
}

impl Prop2Report {
    /// Pres∀ or AntiPres∀ forces agreement between agents at each world.
    pub fn agreement_claim(&self) -> bool {
        !(self.pres_all || self.anti_pres_all) || self.agents_agree
    }

    /// Pres∀ and AntiPres∀ together force constancy along components.
    pub fn constancy_claim(&self) -> bool {
        !(self.pres_all && self.anti_pres_all) || (self.agents_agree && self.constant_on_components)
    }

    /// Constancy along components from either property alone. This reading
    /// is not valid; the report exposes it so callers can count the models
    /// on which it breaks.
    pub fn either_constancy_reading(&self) -> bool {
        !(self.pres_all || self.anti_pres_all) || (self.agents_agree && self.constant_on_components)
    }

    /// Inv∀ forces every own-set to be empty.
    pub fn inversion_claim(&self) -> bool {
        !self.inv_all || self.all_empty
    }

    /// AntiInv∀ forces every own-set to be the whole universe.
    pub fn anti_inversion_claim(&self) -> bool {
        !self.anti_inv_all || self.all_full
    }

    /// The model satisfies neither Inv∀ nor AntiInv∀.
    pub fn neither_inversion(&self) -> bool {
        !self.inv_all && !self.anti_inv_all
    }
}

/// Diagnostics for a reflexive model under `f_gen`.
pub fn prop2_diagnostics(m: &OModel) -> Result<Prop2Report> {
    require_reflexive(m)?;
    let sig = m.signature();
    let (na, nw, no) = (sig.n_agents(), m.n_worlds(), sig.n_objects());
    let gen = AgentFocus::gen(na);
    let holds = |p| first_violation(m, p, &gen).is_none();
    let agents_agree = (0..nw).all(|w| (1..na).all(|i| m.own(i, w) == m.own(0, w)));
    let constant_on_components = (0..na).all(|i| (0..na).all(|k| m.edges(k).all(|(w, u)| m.own(i, w) == m.own(i, u))));
    let every = |pred: &dyn Fn(&IdSet) -> bool| (0..na).all(|i| (0..nw).all(|w| pred(m.own(i, w))));
    Ok(Prop2Report {
        pres_all: holds(PropertyId::PresAll),
        anti_pres_all: holds(PropertyId::AntiPresAll),
        inv_all: holds(PropertyId::InvAll),
        anti_inv_all: holds(PropertyId::AntiInvAll),
        agents_agree,
        constant_on_components,
        all_empty: every(&|s| s.is_empty()),
        all_full: every(&|s| s.len() == no),
    })
}

/// Deontic reading for one agent: objects are normative demands and the
/// relation points to better worlds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeonticReport {
    /// Every world sees a world where all demands are met.
    pub strong_serial: bool,
    /// Every unmet demand is met at some accessible world.
    pub improvement: bool,
    pub transitive: bool,
    /// The relation preserves the agent's own objects.
    pub preservation: bool,
    /// Preservation, improvement and transitivity imply strong seriality
    /// on this model.
    pub implied_strong_serial: bool,
}

pub fn deontic_checks(m: &OModel, agent: usize) -> DeonticReport {
    let n = m.signature().n_objects();
    let strong_serial = (0..m.n_worlds()).all(|w| m.successors(agent, w).iter().any(|v| m.own(agent, v).len() == n));
    let improvement = (0..m.n_worlds()).all(|w| {
        let mut reach = IdSet::new();
        for u in m.successors(agent, w).iter() {
            reach.union_with(m.own(agent, u));
        }
        m.own(agent, w).union(&reach).len() == n
    });
    let transitive = m.is_transitive(agent);
    let preservation = m.edges(agent).all(|(w, u)| m.own(agent, w).is_subset(m.own(agent, u)));
    DeonticReport {
        strong_serial,
        improvement,
        transitive,
        preservation,
        implied_strong_serial: !(preservation && improvement && transitive) || strong_serial,
    }
}

/// Worlds where all demands are met but nothing is accessible. These are
/// exactly the worlds that keep the implication above from holding.
pub fn ideal_dead_ends(m: &OModel, agent: usize) -> IdSet {
    let n = m.signature().n_objects();
    (0..m.n_worlds())
        .filter(|&w| m.successors(agent, w).is_empty() && m.own(agent, w).len() == n)
        .collect()
}

/// `◇_i ⋀_o O_i o`.
pub fn strong_seriality_formula(sig: &Signature, agent: usize) -> Formula {
    let name = &sig.agents()[agent];
    Formula::poss(
        name.clone(),
        Formula::conj(sig.universe().iter().map(|o| Formula::Owns(name.clone(), o.clone()))),
    )
}
