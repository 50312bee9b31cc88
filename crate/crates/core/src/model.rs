//! O-models, event O-models, their signatures and validation from the raw
//! document form.

use crate::bitset::IdSet;
use crate::formula::{Formula, Name};
use crate::syntax;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

/// Agents, object universe and atoms shared by the models of a workspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    agents: Vec<Name>,
    universe: Vec<Name>,
    atoms: Vec<Name>,
    agent_ix: HashMap<Name, usize>,
    object_ix: HashMap<Name, usize>,
    atom_ix: HashMap<Name, usize>,
}

fn index_of(names: &[Name], kind: &'static str, out: &mut Vec<Violation>) -> HashMap<Name, usize> {
    let mut ix = HashMap::with_capacity(names.len());
    for (k, n) in names.iter().enumerate() {
        if ix.insert(n.clone(), k).is_some() {
            out.push(Violation::Duplicate {
                kind,
                name: n.to_string(),
            });
        }
    }
    ix
}

impl Signature {
    pub fn new<A, U, P>(agents: A, universe: U, atoms: P) -> Result<Self, Vec<Violation>>
    where
        A: IntoIterator,
        A::Item: Into<Name>,
        U: IntoIterator,
        U::Item: Into<Name>,
        P: IntoIterator,
        P::Item: Into<Name>,
    {
        let agents: Vec<Name> = agents.into_iter().map(Into::into).collect();
        let universe: Vec<Name> = universe.into_iter().map(Into::into).collect();
        let atoms: Vec<Name> = atoms.into_iter().map(Into::into).collect();
        let mut violations = Vec::new();
        if agents.is_empty() {
            violations.push(Violation::EmptyAgentSet);
        }
        if universe.is_empty() {
            violations.push(Violation::EmptyUniverse);
        }
        let agent_ix = index_of(&agents, "agent", &mut violations);
        let object_ix = index_of(&universe, "object", &mut violations);
        let atom_ix = index_of(&atoms, "atom", &mut violations);
        if !violations.is_empty() {
            return Err(violations);
        }
        Ok(Signature {
            agents,
            universe,
            atoms,
            agent_ix,
            object_ix,
            atom_ix,
        })
    }

    pub fn agents(&self) -> &[Name] {
        &self.agents
    }
    pub fn universe(&self) -> &[Name] {
        &self.universe
    }
    pub fn atoms(&self) -> &[Name] {
        &self.atoms
    }
    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }
    pub fn n_objects(&self) -> usize {
        self.universe.len()
    }
    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }
    pub fn agent(&self, name: &str) -> Option<usize> {
        self.agent_ix.get(name).copied()
    }
    pub fn object(&self, name: &str) -> Option<usize> {
        self.object_ix.get(name).copied()
    }
    pub fn atom(&self, name: &str) -> Option<usize> {
        self.atom_ix.get(name).copied()
    }
    pub fn full_universe(&self) -> IdSet {
        IdSet::full(self.universe.len())
    }

    /// Checks that every agent, object and atom mentioned by `f` is declared.
    /// Dynamic modalities are not resolved here.
    pub fn check_formula(&self, f: &Formula) -> Result<(), Violation> {
        let mut bad = None;
        f.walk(&mut |g| {
            if bad.is_some() {
                return;
            }
            match g {
                Formula::Atom(p) if self.atom(p).is_none() => bad = Some(Violation::UnknownAtom(p.to_string())),
                Formula::Owns(i, o) => {
                    if self.agent(i).is_none() {
                        bad = Some(Violation::UnknownAgent(i.to_string()));
                    } else if self.object(o).is_none() {
                        bad = Some(Violation::UnknownObject(o.to_string()));
                    }
                }
                Formula::Box(i, _) if self.agent(i).is_none() => bad = Some(Violation::UnknownAgent(i.to_string())),
                _ => {}
            }
        });
        bad.map_or(Ok(()), Err)
    }

    pub(crate) fn names_of(&self, set: &IdSet) -> Vec<String> {
        set.iter().map(|o| self.universe[o].to_string()).collect()
    }
}

/// A single structural problem found while validating a raw description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyAgentSet,
    EmptyUniverse,
    EmptyWorldSet,
    EmptyEventSet,
    Duplicate {
        kind: &'static str,
        name: String,
    },
    UnknownAgent(String),
    UnknownAtom(String),
    UnknownObject(String),
    ObjectOutsideUniverse {
        agent: String,
        at: String,
        object: String,
    },
    DanglingWorld {
        context: String,
        world: String,
    },
    DanglingEvent {
        context: String,
        event: String,
    },
    EffectOverlap {
        agent: String,
        event: String,
        object: String,
    },
    DynamicPrecondition {
        event: String,
    },
    BadPrecondition {
        event: String,
        message: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyAgentSet => write!(f, "EmptyAgentSet"),
            Violation::EmptyUniverse => write!(f, "EmptyUniverse"),
            Violation::EmptyWorldSet => write!(f, "EmptyWorldSet"),
            Violation::EmptyEventSet => write!(f, "EmptyEventSet"),
            Violation::Duplicate { kind, name } => write!(f, "Duplicate {kind} `{name}`"),
            Violation::UnknownAgent(a) => write!(f, "UnknownAgent `{a}`"),
            Violation::UnknownAtom(p) => write!(f, "UnknownAtom `{p}`"),
            Violation::UnknownObject(o) => write!(f, "UnknownObject `{o}`"),
            Violation::ObjectOutsideUniverse { agent, at, object } => {
                write!(f, "ObjectOutsideUniverse `{object}` for agent `{agent}` at `{at}`")
            }
            Violation::DanglingWorld { context, world } => {
                write!(f, "DanglingWorld `{world}` in {context}")
            }
            Violation::DanglingEvent { context, event } => {
                write!(f, "DanglingEvent `{event}` in {context}")
            }
            Violation::EffectOverlap { agent, event, object } => write!(
                f,
                "EffectOverlap: `{object}` is both added and removed for agent `{agent}` at event `{event}`"
            ),
            Violation::DynamicPrecondition { event } => {
                write!(f, "DynamicPrecondition at event `{event}`")
            }
            Violation::BadPrecondition { event, message } => {
                write!(f, "BadPrecondition at event `{event}`: {message}")
            }
        }
    }
}

/// A finite multi-agent Kripke model with per-agent, per-world object sets.
///
/// Worlds, agents, objects and atoms are addressed by index; per-agent data is
/// stored flat at `agent * n_worlds + world`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OModel {
    sig: Arc<Signature>,
    worlds: Vec<Name>,
    succ: Vec<IdSet>,
    own: Vec<IdSet>,
    val: Vec<IdSet>,
}

impl OModel {
    /// A model over `worlds` with empty relations, own-sets and valuation.
    pub fn new<W>(sig: Arc<Signature>, worlds: W) -> Self
    where
        W: IntoIterator,
        W::Item: Into<Name>,
    {
        let worlds: Vec<Name> = worlds.into_iter().map(Into::into).collect();
        let cells = sig.n_agents() * worlds.len();
        OModel {
            succ: vec![IdSet::new(); cells],
            own: vec![IdSet::new(); cells],
            val: vec![IdSet::new(); sig.n_atoms()],
            sig,
            worlds,
        }
    }

    pub(crate) fn from_parts(
        sig: Arc<Signature>,
        worlds: Vec<Name>,
        succ: Vec<IdSet>,
        own: Vec<IdSet>,
        val: Vec<IdSet>,
    ) -> Self {
        debug_assert_eq!(succ.len(), sig.n_agents() * worlds.len());
        debug_assert_eq!(own.len(), sig.n_agents() * worlds.len());
        debug_assert_eq!(val.len(), sig.n_atoms());
        OModel {
            sig,
            worlds,
            succ,
            own,
            val,
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }
    pub fn n_worlds(&self) -> usize {
        self.worlds.len()
    }
    pub fn worlds(&self) -> &[Name] {
        &self.worlds
    }
    pub fn world_name(&self, w: usize) -> &Name {
        &self.worlds[w]
    }
    pub fn world(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| &**w == name)
    }
    pub fn all_worlds(&self) -> IdSet {
        IdSet::full(self.worlds.len())
    }

    fn cell(&self, agent: usize, w: usize) -> usize {
        agent * self.worlds.len() + w
    }

    pub fn successors(&self, agent: usize, w: usize) -> &IdSet {
        &self.succ[self.cell(agent, w)]
    }
    pub fn successors_mut(&mut self, agent: usize, w: usize) -> &mut IdSet {
        let c = self.cell(agent, w);
        &mut self.succ[c]
    }
    pub fn has_edge(&self, agent: usize, w: usize, u: usize) -> bool {
        self.successors(agent, w).contains(u)
    }
    pub fn add_edge(&mut self, agent: usize, w: usize, u: usize) {
        self.successors_mut(agent, w).insert(u);
    }

    /// Edges `(w, u)` of agent `i`'s relation in lexicographic order.
    pub fn edges(&self, agent: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.worlds.len()).flat_map(move |w| self.successors(agent, w).iter().map(move |u| (w, u)))
    }

    pub fn own(&self, agent: usize, w: usize) -> &IdSet {
        &self.own[self.cell(agent, w)]
    }
    pub fn own_mut(&mut self, agent: usize, w: usize) -> &mut IdSet {
        let c = self.cell(agent, w);
        &mut self.own[c]
    }
    pub fn set_own(&mut self, agent: usize, w: usize, objects: IdSet) {
        *self.own_mut(agent, w) = objects;
    }

    /// Worlds where atom `p` holds.
    pub fn val(&self, atom: usize) -> &IdSet {
        &self.val[atom]
    }
    pub fn set_val(&mut self, atom: usize, worlds: IdSet) {
        self.val[atom] = worlds;
    }

    pub fn is_reflexive(&self, agent: usize) -> bool {
        (0..self.n_worlds()).all(|w| self.has_edge(agent, w, w))
    }

    pub fn is_transitive(&self, agent: usize) -> bool {
        (0..self.n_worlds()).all(|w| {
            let direct = self.successors(agent, w);
            direct.iter().all(|u| self.successors(agent, u).is_subset(direct))
        })
    }

    /// Serializable form of this model.
    pub fn to_doc(&self, name: &str) -> ModelDoc {
        let sig = &self.sig;
        let mut relations = BTreeMap::new();
        let mut own = BTreeMap::new();
        for (i, agent) in sig.agents().iter().enumerate() {
            let pairs = self
                .edges(i)
                .map(|(w, u)| (self.worlds[w].to_string(), self.worlds[u].to_string()))
                .collect();
            relations.insert(agent.to_string(), pairs);
            let per_world = (0..self.n_worlds())
                .map(|w| (self.worlds[w].to_string(), sig.names_of(self.own(i, w))))
                .collect();
            own.insert(agent.to_string(), per_world);
        }
        let valuation = sig
            .atoms()
            .iter()
            .enumerate()
            .map(|(p, atom)| {
                let ws = self.val[p].iter().map(|w| self.worlds[w].to_string()).collect();
                (atom.to_string(), ws)
            })
            .collect();
        ModelDoc {
            name: name.to_string(),
            worlds: self.worlds.iter().map(|w| w.to_string()).collect(),
            relations,
            own,
            valuation,
        }
    }

    /// Plain-text adjacency dump, one line per component.
    pub fn dump(&self) -> String {
        let sig = &self.sig;
        let mut out = String::new();
        out.push_str(&format!(
            "worlds: {}\n",
            self.worlds.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
        ));
        for (i, agent) in sig.agents().iter().enumerate() {
            let edges: Vec<String> = self
                .edges(i)
                .map(|(w, u)| format!("{}->{}", self.worlds[w], self.worlds[u]))
                .collect();
            out.push_str(&format!("R[{agent}]: {}\n", edges.join(" ")));
        }
        for (i, agent) in sig.agents().iter().enumerate() {
            for w in 0..self.n_worlds() {
                out.push_str(&format!(
                    "O[{agent}]({}) = {{{}}}\n",
                    self.worlds[w],
                    sig.names_of(self.own(i, w)).join(",")
                ));
            }
        }
        for (p, atom) in sig.atoms().iter().enumerate() {
            let ws: Vec<String> = self.val[p].iter().map(|w| self.worlds[w].to_string()).collect();
            out.push_str(&format!("V({atom}) = {{{}}}\n", ws.join(",")));
        }
        out
    }
}

/// A finite event model with per-agent relations over events, static
/// preconditions and per-agent positive/negative effect sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventModel {
    sig: Arc<Signature>,
    events: Vec<Name>,
    succ: Vec<IdSet>,
    pre: Vec<Formula>,
    plus: Vec<IdSet>,
    minus: Vec<IdSet>,
}

impl EventModel {
    /// An event model with empty relations, `⊤` preconditions and no effects.
    pub fn new<E>(sig: Arc<Signature>, events: E) -> Self
    where
        E: IntoIterator,
        E::Item: Into<Name>,
    {
        let events: Vec<Name> = events.into_iter().map(Into::into).collect();
        let cells = sig.n_agents() * events.len();
        EventModel {
            succ: vec![IdSet::new(); cells],
            pre: vec![Formula::Top; events.len()],
            plus: vec![IdSet::new(); cells],
            minus: vec![IdSet::new(); cells],
            sig,
            events,
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }
    pub fn n_events(&self) -> usize {
        self.events.len()
    }
    pub fn events(&self) -> &[Name] {
        &self.events
    }
    pub fn event_name(&self, s: usize) -> &Name {
        &self.events[s]
    }
    pub fn event(&self, name: &str) -> Option<usize> {
        self.events.iter().position(|e| &**e == name)
    }

    fn cell(&self, agent: usize, s: usize) -> usize {
        agent * self.events.len() + s
    }

    pub fn successors(&self, agent: usize, s: usize) -> &IdSet {
        &self.succ[self.cell(agent, s)]
    }
    pub fn add_edge(&mut self, agent: usize, s: usize, t: usize) {
        let c = self.cell(agent, s);
        self.succ[c].insert(t);
    }
    pub fn has_edge(&self, agent: usize, s: usize, t: usize) -> bool {
        self.successors(agent, s).contains(t)
    }
    pub fn edges(&self, agent: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.events.len()).flat_map(move |s| self.successors(agent, s).iter().map(move |t| (s, t)))
    }

    pub fn pre(&self, s: usize) -> &Formula {
        &self.pre[s]
    }
    /// Sets the precondition; it must be free of dynamic modalities.
    pub fn set_pre(&mut self, s: usize, f: Formula) -> Result<(), Violation> {
        if !f.is_static() {
            return Err(Violation::DynamicPrecondition {
                event: self.events[s].to_string(),
            });
        }
        self.sig.check_formula(&f).map_err(|v| Violation::BadPrecondition {
            event: self.events[s].to_string(),
            message: v.to_string(),
        })?;
        self.pre[s] = f;
        Ok(())
    }

    pub fn eff_plus(&self, agent: usize, s: usize) -> &IdSet {
        &self.plus[self.cell(agent, s)]
    }
    pub fn eff_minus(&self, agent: usize, s: usize) -> &IdSet {
        &self.minus[self.cell(agent, s)]
    }
    pub fn eff_plus_mut(&mut self, agent: usize, s: usize) -> &mut IdSet {
        let c = self.cell(agent, s);
        &mut self.plus[c]
    }
    pub fn eff_minus_mut(&mut self, agent: usize, s: usize) -> &mut IdSet {
        let c = self.cell(agent, s);
        &mut self.minus[c]
    }
    pub fn set_effects(&mut self, agent: usize, s: usize, plus: IdSet, minus: IdSet) {
        let c = self.cell(agent, s);
        self.plus[c] = plus;
        self.minus[c] = minus;
    }

    /// Invariant violations of an already-built event model (effect overlap,
    /// dynamic preconditions).
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for s in 0..self.n_events() {
            if !self.pre[s].is_static() {
                out.push(Violation::DynamicPrecondition {
                    event: self.events[s].to_string(),
                });
            }
        }
        for (i, agent) in self.sig.agents().iter().enumerate() {
            for s in 0..self.n_events() {
                for o in self.eff_plus(i, s).intersection(self.eff_minus(i, s)).iter() {
                    out.push(Violation::EffectOverlap {
                        agent: agent.to_string(),
                        event: self.events[s].to_string(),
                        object: self.sig.universe()[o].to_string(),
                    });
                }
            }
        }
        out
    }

    pub fn to_doc(&self, name: &str) -> EventDoc {
        let sig = &self.sig;
        let mut relations = BTreeMap::new();
        let mut eff_plus = BTreeMap::new();
        let mut eff_minus = BTreeMap::new();
        for (i, agent) in sig.agents().iter().enumerate() {
            let pairs = self
                .edges(i)
                .map(|(s, t)| (self.events[s].to_string(), self.events[t].to_string()))
                .collect();
            relations.insert(agent.to_string(), pairs);
            let plus = (0..self.n_events())
                .map(|s| (self.events[s].to_string(), sig.names_of(self.eff_plus(i, s))))
                .collect();
            let minus = (0..self.n_events())
                .map(|s| (self.events[s].to_string(), sig.names_of(self.eff_minus(i, s))))
                .collect();
            eff_plus.insert(agent.to_string(), plus);
            eff_minus.insert(agent.to_string(), minus);
        }
        let pre = (0..self.n_events())
            .map(|s| (self.events[s].to_string(), syntax::print_formula(&self.pre[s])))
            .collect();
        EventDoc {
            name: name.to_string(),
            events: self.events.iter().map(|e| e.to_string()).collect(),
            relations,
            pre,
            eff_plus,
            eff_minus,
        }
    }

    /// Plain-text dump in the style of [`OModel::dump`].
    pub fn dump(&self) -> String {
        let sig = &self.sig;
        let mut out = String::new();
        out.push_str(&format!(
            "events: {}\n",
            self.events.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
        ));
        for (i, agent) in sig.agents().iter().enumerate() {
            let edges: Vec<String> = self
                .edges(i)
                .map(|(s, t)| format!("{}->{}", self.events[s], self.events[t]))
                .collect();
            out.push_str(&format!("R[{agent}]: {}\n", edges.join(" ")));
        }
        for s in 0..self.n_events() {
            out.push_str(&format!(
                "pre({}) = {}\n",
                self.events[s],
                syntax::print_formula(&self.pre[s])
            ));
        }
        for (i, agent) in sig.agents().iter().enumerate() {
            for s in 0..self.n_events() {
                out.push_str(&format!(
                    "eff[{agent}]({}) = +{{{}}} -{{{}}}\n",
                    self.events[s],
                    sig.names_of(self.eff_plus(i, s)).join(","),
                    sig.names_of(self.eff_minus(i, s)).join(",")
                ));
            }
        }
        out
    }
}

/// Raw model description as it appears in a workspace document.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub name: String,
    pub worlds: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub own: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

/// Raw event model description as it appears in a workspace document.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDoc {
    pub name: String,
    pub events: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub pre: BTreeMap<String, String>,
    #[serde(default)]
    pub eff_plus: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub eff_minus: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

fn point_index(names: &[String], kind: &'static str, out: &mut Vec<Violation>) -> HashMap<String, usize> {
    let mut ix = HashMap::new();
    for (k, n) in names.iter().enumerate() {
        if ix.insert(n.clone(), k).is_some() {
            out.push(Violation::Duplicate { kind, name: n.clone() });
        }
    }
    ix
}

fn object_set(sig: &Signature, agent: &str, at: &str, objects: &[String], out: &mut Vec<Violation>) -> IdSet {
    let mut set = IdSet::new();
    for o in objects {
        match sig.object(o) {
            Some(k) => {
                set.insert(k);
            }
            None => out.push(Violation::ObjectOutsideUniverse {
                agent: agent.to_string(),
                at: at.to_string(),
                object: o.clone(),
            }),
        }
    }
    set
}

/// Validates a raw model description against a signature, reporting every
/// violated invariant.
pub fn validate_model(sig: &Arc<Signature>, doc: &ModelDoc) -> Result<OModel, Vec<Violation>> {
    let mut out = Vec::new();
    if doc.worlds.is_empty() {
        out.push(Violation::EmptyWorldSet);
    }
    let wix = point_index(&doc.worlds, "world", &mut out);
    let mut m = OModel::new(sig.clone(), doc.worlds.iter().map(|w| Name::from(w.as_str())));

    for (agent, pairs) in &doc.relations {
        let Some(i) = sig.agent(agent) else {
            out.push(Violation::UnknownAgent(agent.clone()));
            continue;
        };
        for (w, u) in pairs {
            let context = format!("relation of agent `{agent}`");
            match (wix.get(w), wix.get(u)) {
                (Some(&a), Some(&b)) => m.add_edge(i, a, b),
                (a, b) => {
                    if a.is_none() {
                        out.push(Violation::DanglingWorld {
                            context: context.clone(),
                            world: w.clone(),
                        });
                    }
                    if b.is_none() {
                        out.push(Violation::DanglingWorld {
                            context,
                            world: u.clone(),
                        });
                    }
                }
            }
        }
    }
    for (agent, per_world) in &doc.own {
        let Some(i) = sig.agent(agent) else {
            out.push(Violation::UnknownAgent(agent.clone()));
            continue;
        };
        for (w, objects) in per_world {
            let set = object_set(sig, agent, w, objects, &mut out);
            match wix.get(w) {
                Some(&k) => m.set_own(i, k, set),
                None => out.push(Violation::DanglingWorld {
                    context: format!("own-sets of agent `{agent}`"),
                    world: w.clone(),
                }),
            }
        }
    }
    for (atom, worlds) in &doc.valuation {
        let Some(p) = sig.atom(atom) else {
            out.push(Violation::UnknownAtom(atom.clone()));
            continue;
        };
        let mut set = IdSet::new();
        for w in worlds {
            match wix.get(w) {
                Some(&k) => {
                    set.insert(k);
                }
                None => out.push(Violation::DanglingWorld {
                    context: format!("valuation of `{atom}`"),
                    world: w.clone(),
                }),
            }
        }
        m.set_val(p, set);
    }
    if out.is_empty() {
        Ok(m)
    } else {
        Err(out)
    }
}

/// Validates a raw event model description: nonempty event set, known names,
/// static preconditions and disjoint effect sets.
pub fn validate_event(sig: &Arc<Signature>, doc: &EventDoc) -> Result<EventModel, Vec<Violation>> {
    let mut out = Vec::new();
    if doc.events.is_empty() {
        out.push(Violation::EmptyEventSet);
    }
    let six = point_index(&doc.events, "event", &mut out);
    let mut e = EventModel::new(sig.clone(), doc.events.iter().map(|s| Name::from(s.as_str())));

    for (agent, pairs) in &doc.relations {
        let Some(i) = sig.agent(agent) else {
            out.push(Violation::UnknownAgent(agent.clone()));
            continue;
        };
        for (s, t) in pairs {
            match (six.get(s), six.get(t)) {
                (Some(&a), Some(&b)) => e.add_edge(i, a, b),
                (a, b) => {
                    let context = format!("event relation of agent `{agent}`");
                    if a.is_none() {
                        out.push(Violation::DanglingEvent {
                            context: context.clone(),
                            event: s.clone(),
                        });
                    }
                    if b.is_none() {
                        out.push(Violation::DanglingEvent {
                            context,
                            event: t.clone(),
                        });
                    }
                }
            }
        }
    }
    for (s, text) in &doc.pre {
        let Some(&k) = six.get(s) else {
            out.push(Violation::DanglingEvent {
                context: "preconditions".into(),
                event: s.clone(),
            });
            continue;
        };
        match syntax::parse_formula(text) {
            Ok(f) => {
                if let Err(v) = e.set_pre(k, f) {
                    out.push(v);
                }
            }
            Err(err) => out.push(Violation::BadPrecondition {
                event: s.clone(),
                message: err.to_string(),
            }),
        }
    }
    for (plus, table) in [(true, &doc.eff_plus), (false, &doc.eff_minus)] {
        for (agent, per_event) in table {
            let Some(i) = sig.agent(agent) else {
                out.push(Violation::UnknownAgent(agent.clone()));
                continue;
            };
            for (s, objects) in per_event {
                let set = object_set(sig, agent, s, objects, &mut out);
                match six.get(s) {
                    Some(&k) if plus => *e.eff_plus_mut(i, k) = set,
                    Some(&k) => *e.eff_minus_mut(i, k) = set,
                    None => out.push(Violation::DanglingEvent {
                        context: format!("effects of agent `{agent}`"),
                        event: s.clone(),
                    }),
                }
            }
        }
    }
    out.extend(e.violations());
    if out.is_empty() {
        Ok(e)
    } else {
        Err(out)
    }
}
