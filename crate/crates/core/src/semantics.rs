//! Truth evaluation for the static and dynamic language.
//!
//! Formulas are compiled against a signature and an event-model registry,
//! then evaluated bottom-up to the set of worlds where they hold. Products
//! needed by dynamic modalities are built on demand and cached for the
//! lifetime of an [`Evaluator`] session.

use crate::bitset::IdSet;
use crate::error::{Error, Result};
use crate::formula::{Formula, Name};
use crate::model::{EventModel, OModel, Signature, Violation};
use crate::update::{self, Product};
use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};

/// Named event models that dynamic modalities can refer to.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    models: BTreeMap<Name, EventModel>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<Name>, e: EventModel) -> Option<EventModel> {
        self.models.insert(name.into(), e)
    }

    pub fn get(&self, name: &str) -> Option<&EventModel> {
        self.models.get(name)
    }

    pub fn resolve(&self, name: &str) -> Result<&EventModel> {
        self.get(name)
            .ok_or_else(|| Error::UnresolvedEventModel(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &EventModel)> {
        self.models.iter()
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

#[derive(Debug, Clone)]
enum Node {
    Top,
    Atom(usize),
    Owns(usize, usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Box(usize, Box<Node>),
    Dyn(usize, usize, Box<Node>),
}

fn unknown(v: Violation) -> Error {
    match v {
        Violation::UnknownAgent(n) => Error::UnknownName { kind: "agent", name: n },
        Violation::UnknownAtom(n) => Error::UnknownName { kind: "atom", name: n },
        Violation::UnknownObject(n) => Error::UnknownName {
            kind: "object",
            name: n,
        },
        other => Error::Format(other.to_string()),
    }
}

/// Event models of a registry, indexed and with compiled preconditions.
struct CompiledRegistry<'r> {
    names: Vec<&'r Name>,
    models: Vec<&'r EventModel>,
    pre: Vec<Vec<Node>>,
}

impl<'r> CompiledRegistry<'r> {
    fn new(reg: &'r Registry) -> Self {
        let mut out = CompiledRegistry {
            names: Vec::new(),
            models: Vec::new(),
            pre: Vec::new(),
        };
        for (name, e) in reg.iter() {
            out.names.push(name);
            out.models.push(e);
            // Preconditions are compiled lazily in `prepare`, since an event
            // model that is never referenced may use names outside `sig`.
            out.pre.push(Vec::new());
        }
        out
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| &***n == name)
    }

    /// Compiles the preconditions of model `k` if not done yet.
    fn prepare(&mut self, sig: &Signature, k: usize) -> Result<()> {
        if !self.pre[k].is_empty() {
            return Ok(());
        }
        let e = self.models[k];
        if e.signature().agents() != sig.agents() {
            return Err(Error::AgentSetMismatch);
        }
        if e.signature().universe() != sig.universe() {
            return Err(Error::UniverseMismatch);
        }
        let mut pre = Vec::with_capacity(e.n_events());
        for s in 0..e.n_events() {
            pre.push(compile_static(sig, e.pre(s))?);
        }
        self.pre[k] = pre;
        Ok(())
    }
}

fn compile_static(sig: &Signature, f: &Formula) -> Result<Node> {
    if !f.is_static() {
        return Err(Error::Format("precondition contains a dynamic modality".into()));
    }
    compile(sig, None, f)
}

fn compile(sig: &Signature, mut reg: Option<&mut CompiledRegistry<'_>>, f: &Formula) -> Result<Node> {
    Ok(match f {
        Formula::Top => Node::Top,
        Formula::Atom(p) => Node::Atom(
            sig.atom(p)
                .ok_or_else(|| unknown(Violation::UnknownAtom(p.to_string())))?,
        ),
        Formula::Owns(i, o) => {
            let a = sig
                .agent(i)
                .ok_or_else(|| unknown(Violation::UnknownAgent(i.to_string())))?;
            let x = sig
                .object(o)
                .ok_or_else(|| unknown(Violation::UnknownObject(o.to_string())))?;
            Node::Owns(a, x)
        }
        Formula::Not(phi) => Node::Not(Box::new(compile(sig, reg, phi)?)),
        Formula::And(phi, psi) => {
            let a = compile(sig, reg.as_deref_mut(), phi)?;
            let b = compile(sig, reg, psi)?;
            Node::And(Box::new(a), Box::new(b))
        }
        Formula::Box(i, phi) => {
            let a = sig
                .agent(i)
                .ok_or_else(|| unknown(Violation::UnknownAgent(i.to_string())))?;
            Node::Box(a, Box::new(compile(sig, reg, phi)?))
        }
        Formula::Dyn(e, s, phi) => {
            let reg = reg.ok_or_else(|| Error::UnresolvedEventModel(e.to_string()))?;
            let k = reg.index(e).ok_or_else(|| Error::UnresolvedEventModel(e.to_string()))?;
            let ev = reg.models[k].event(s).ok_or_else(|| Error::UnknownEvent {
                model: e.to_string(),
                event: s.to_string(),
            })?;
            reg.prepare(sig, k)?;
            Node::Dyn(k, ev, Box::new(compile(sig, Some(reg), phi)?))
        }
    })
}

fn box_ext(m: &OModel, agent: usize, inner: &IdSet) -> IdSet {
    (0..m.n_worlds())
        .filter(|&w| m.successors(agent, w).is_subset(inner))
        .collect()
}

fn owns_ext(m: &OModel, agent: usize, object: usize) -> IdSet {
    (0..m.n_worlds())
        .filter(|&w| m.own(agent, w).contains(object))
        .collect()
}

/// [`static_ext`] for models with at most 64 worlds, on plain words.
fn static_word(m: &OModel, node: &Node) -> u64 {
    let n = m.n_worlds();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let word = |s: &IdSet| s.as_word().expect("at most 64 worlds");
    match node {
        Node::Top => all,
        Node::Atom(p) => word(m.val(*p)),
        Node::Owns(i, o) => (0..n)
            .filter(|&w| m.own(*i, w).contains(*o))
            .fold(0, |acc, w| acc | 1 << w),
        Node::Not(a) => !static_word(m, a) & all,
        Node::And(a, b) => match static_word(m, a) {
            0 => 0,
            s => s & static_word(m, b),
        },
        Node::Box(i, a) => {
            let inner = static_word(m, a);
            (0..n)
                .filter(|&w| word(m.successors(*i, w)) & !inner == 0)
                .fold(0, |acc, w| acc | 1 << w)
        }
        Node::Dyn(..) => unreachable!("dynamic node in a static context"),
    }
}

fn static_ext(m: &OModel, node: &Node) -> IdSet {
    let n = m.n_worlds();
    match node {
        Node::Top => IdSet::full(n),
        Node::Atom(p) => m.val(*p).clone(),
        Node::Owns(i, o) => owns_ext(m, *i, *o),
        Node::Not(a) => static_ext(m, a).complement(n),
        Node::And(a, b) => {
            let mut s = static_ext(m, a);
            if !s.is_empty() {
                s.intersect_with(&static_ext(m, b));
            }
            s
        }
        Node::Box(i, a) => box_ext(m, *i, &static_ext(m, a)),
        Node::Dyn(..) => unreachable!("dynamic node in a static context"),
    }
}

/// Extension of a static formula, i.e. the set of worlds where it holds.
pub fn static_extension(m: &OModel, f: &Formula) -> Result<IdSet> {
    Ok(static_ext(m, &compile_static(m.signature(), f)?))
}

struct Child<'a> {
    frame: Frame<'a>,
    /// Product world of `(w, s)`, at `w * n_events + s`.
    index: Vec<Option<usize>>,
    n_events: usize,
}

struct Frame<'a> {
    model: Cow<'a, OModel>,
    children: HashMap<usize, Option<Box<Child<'a>>>>,
}

impl<'a> Frame<'a> {
    fn new(model: Cow<'a, OModel>) -> Self {
        Frame {
            model,
            children: HashMap::new(),
        }
    }
}

fn make_child<'a>(m: &OModel, e: &EventModel, pre: &[Node]) -> Option<Box<Child<'a>>> {
    let pre_ext: Vec<IdSet> = pre.iter().map(|p| static_ext(m, p)).collect();
    let Product { model, pairs } = update::product_from_extensions(m, e, &pre_ext).ok()?;
    let n_events = e.n_events();
    let mut index = vec![None; m.n_worlds() * n_events];
    for (k, (w, s)) in pairs.into_iter().enumerate() {
        index[w * n_events + s] = Some(k);
    }
    Some(Box::new(Child {
        frame: Frame::new(Cow::Owned(model)),
        index,
        n_events,
    }))
}

fn ext<'a>(frame: &mut Frame<'a>, node: &Node, reg: &CompiledRegistry<'_>) -> IdSet {
    let n = frame.model.n_worlds();
    match node {
        Node::Top | Node::Atom(_) | Node::Owns(..) => static_ext(&frame.model, node),
        Node::Not(a) => ext(frame, a, reg).complement(n),
        Node::And(a, b) => {
            let mut s = ext(frame, a, reg);
            if !s.is_empty() {
                s.intersect_with(&ext(frame, b, reg));
            }
            s
        }
        Node::Box(i, a) => {
            let inner = ext(frame, a, reg);
            box_ext(&frame.model, *i, &inner)
        }
        Node::Dyn(k, s, body) => {
            let pre = static_ext(&frame.model, &reg.pre[*k][*s]);
            if pre.is_empty() {
                return IdSet::full(n);
            }
            let Frame { model, children } = frame;
            let child = children
                .entry(*k)
                .or_insert_with(|| make_child(model, reg.models[*k], &reg.pre[*k]));
            let child = child
                .as_mut()
                .expect("product is defined whenever some precondition holds");
            let inner = ext(&mut child.frame, body, reg);
            let mut out = pre.complement(n);
            for w in pre.iter() {
                let pw = child.index[w * child.n_events + *s].expect("pair satisfies precondition");
                if inner.contains(pw) {
                    out.insert(w);
                }
            }
            out
        }
    }
}

/// An evaluation session over one model. Products of the model with the
/// registry's event models are memoized across calls.
pub struct Evaluator<'a> {
    frame: Frame<'a>,
    compiled: CompiledRegistry<'a>,
}

impl<'a> Evaluator<'a> {
    pub fn new(m: &'a OModel, reg: &'a Registry) -> Self {
        Evaluator {
            compiled: CompiledRegistry::new(reg),
            frame: Frame::new(Cow::Borrowed(m)),
        }
    }

    pub fn model(&self) -> &OModel {
        &self.frame.model
    }

    /// The set of worlds where `f` holds.
    pub fn extension(&mut self, f: &Formula) -> Result<IdSet> {
        let sig = self.frame.model.signature().clone();
        let node = compile(&sig, Some(&mut self.compiled), f)?;
        Ok(ext(&mut self.frame, &node, &self.compiled))
    }

    pub fn eval(&mut self, w: usize, f: &Formula) -> Result<bool> {
        if w >= self.frame.model.n_worlds() {
            return Err(Error::UnknownWorld(w.to_string()));
        }
        Ok(self.extension(f)?.contains(w))
    }
}

/// `M, w ⊨ φ`.
pub fn eval(m: &OModel, w: usize, f: &Formula, reg: &Registry) -> Result<bool> {
    Evaluator::new(m, reg).eval(w, f)
}

/// `M, w ⊨ φ` with the world given by name.
pub fn eval_at(m: &OModel, world: &str, f: &Formula, reg: &Registry) -> Result<bool> {
    let w = m.world(world).ok_or_else(|| Error::UnknownWorld(world.to_string()))?;
    eval(m, w, f, reg)
}

/// The set of worlds where `f` holds.
pub fn extension(m: &OModel, f: &Formula, reg: &Registry) -> Result<IdSet> {
    Evaluator::new(m, reg).extension(f)
}

/// First `(formula index, world)` at which a formula of `fs` fails.
pub fn first_failure(m: &OModel, fs: &[Formula], reg: &Registry) -> Result<Option<(usize, usize)>> {
    let mut ev = Evaluator::new(m, reg);
    let all = m.all_worlds();
    for (k, f) in fs.iter().enumerate() {
        let e = ev.extension(f)?;
        if e != all {
            let w = all.difference(&e).first().expect("nonempty difference");
            return Ok(Some((k, w)));
        }
    }
    Ok(None)
}

/// `M ⊨ Φ`: every formula holds at every world.
pub fn globally_true(m: &OModel, fs: &[Formula], reg: &Registry) -> Result<bool> {
    Ok(first_failure(m, fs, reg)?.is_none())
}

/// Validity surrogate: global truth on every model of a finite collection.
pub fn valid_over<'m, I>(models: I, f: &Formula, reg: &Registry) -> Result<bool>
where
    I: IntoIterator<Item = &'m OModel>,
{
    for m in models {
        if !globally_true(m, std::slice::from_ref(f), reg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Static formulas compiled once against a signature, for checking global
/// truth on many models that share it.
#[derive(Debug, Clone)]
pub struct CompiledStatic {
    nodes: Vec<Node>,
}

impl CompiledStatic {
    pub fn new(sig: &Signature, fs: &[Formula]) -> Result<Self> {
        let nodes = fs.iter().map(|f| compile_static(sig, f)).collect::<Result<Vec<_>>>()?;
        Ok(CompiledStatic { nodes })
    }

    /// The model must share the signature used for compilation.
    pub fn globally_true(&self, m: &OModel) -> bool {
        if m.n_worlds() <= 64 {
            let all = m.all_worlds().as_word().expect("at most 64 worlds");
            return self.nodes.iter().all(|n| static_word(m, n) == all);
        }
        let all = m.all_worlds();
        self.nodes.iter().all(|n| static_ext(m, n) == all)
    }

    pub fn first_failure(&self, m: &OModel) -> Option<(usize, usize)> {
        let all = m.all_worlds();
        self.nodes.iter().enumerate().find_map(|(k, n)| {
            let e = static_ext(m, n);
            (e != all).then(|| (k, all.difference(&e).first().unwrap()))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generation::{self, GenConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn word_evaluation_matches_set_evaluation() {
        let (_, reg) = catalog::worked_model_and_registry();
        let sig = catalog::worked_signature();
        let mut cfg = GenConfig::new(sig.clone(), 3);
        cfg.max_worlds = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gen = generation::FormulaGen::new(&sig, Some(&reg), 5, 0);
        for _ in 0..500 {
            let m = generation::sample_model(&mut rng, &cfg);
            let f = gen.sample(&mut rng);
            let node = compile_static(&sig, &f).unwrap();
            assert_eq!(IdSet::from_mask(static_word(&m, &node)), static_ext(&m, &node), "{f:?}");
        }
    }
    use crate::catalog;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn top_and_ownership() {
        let (m, reg) = catalog::worked_model_and_registry();
        assert!(eval(&m, 0, &Formula::Top, &reg).unwrap());
        assert!(eval(&m, 0, &f("O(1,p)"), &reg).unwrap());
        let mut sole = m.clone();
        sole.set_own(0, 0, IdSet::new());
        assert!(!eval(&sole, 0, &f("O(1,p)"), &reg).unwrap());
    }

    #[test]
    fn vacuous_box() {
        let (m, reg) = catalog::worked_model_and_registry();
        let isolated = OModel::new(m.signature().clone(), ["w"]);
        assert!(eval(&isolated, 0, &f("[1]~top"), &reg).unwrap());
        assert!(!eval(&m, 0, &f("[1]~top"), &reg).unwrap());
    }

    #[test]
    fn private_forgetting_dynamic() {
        let (m, reg) = catalog::worked_model_and_registry();
        assert!(eval(&m, 0, &f("[Pri:dot]~O(1,p)"), &reg).unwrap());
        assert!(eval(&m, 0, &f("[Pri:dot]O(2,p)"), &reg).unwrap());
        // agent 2 considers only the nothing-happened event possible
        assert!(eval(&m, 0, &f("[Pri:dot][2]O(1,p)"), &reg).unwrap());
        assert!(eval(&m, 0, &f("[Pri:dot][1]~O(1,p)"), &reg).unwrap());
    }

    #[test]
    fn unresolved_references() {
        let (m, reg) = catalog::worked_model_and_registry();
        assert_eq!(
            eval(&m, 0, &f("[Nope:dot]p"), &reg),
            Err(Error::UnresolvedEventModel("Nope".into()))
        );
        assert!(matches!(
            eval(&m, 0, &f("[Pri:zzz]p"), &reg),
            Err(Error::UnknownEvent { .. })
        ));
        assert!(matches!(
            eval(&m, 0, &f("r"), &reg),
            Err(Error::UnknownName { kind: "atom", .. })
        ));
        assert_eq!(eval(&m, 7, &Formula::Top, &reg), Err(Error::UnknownWorld("7".into())));
    }

    #[test]
    fn global_truth_and_validity() {
        let (m, reg) = catalog::worked_model_and_registry();
        assert!(globally_true(&m, &[Formula::Top], &reg).unwrap());
        let mut two = OModel::new(m.signature().clone(), ["w", "u"]);
        two.set_val(0, IdSet::singleton(0));
        assert_eq!(
            first_failure(&two, &[Formula::Top, f("p")], &reg).unwrap(),
            Some((1, 1))
        );
        assert!(!valid_over([&m, &two], &f("p"), &reg).unwrap());
        assert!(valid_over([&m, &two], &Formula::Top, &reg).unwrap());
    }
}
