//! Formula syntax for the static and the dynamic language.
//!
//! Only the primitive connectives are stored. Disjunction, implication,
//! equivalence and the diamond are smart constructors that expand to
//! `Not`/`And`/`Box`, so structural equality is the only equality we need.

use std::collections::BTreeSet;
use std::sync::Arc;

/// Interned-ish name used for agents, objects, atoms, event models and events.
pub type Name = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Atom(Name),
    /// `O_i o`: agent `i` owns object `o`.
    Owns(Name, Name),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Box(Name, Box<Formula>),
    /// `[E,s]φ`: event model `E`, event `s`.
    Dyn(Name, Name, Box<Formula>),
}

impl Formula {
    pub fn top() -> Self {
        Formula::Top
    }

    pub fn bottom() -> Self {
        Formula::not(Formula::Top)
    }

    pub fn atom(p: impl Into<Name>) -> Self {
        Formula::Atom(p.into())
    }

    pub fn owns(agent: impl Into<Name>, object: impl Into<Name>) -> Self {
        Formula::Owns(agent.into(), object.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(phi: Formula) -> Self {
        Formula::Not(Box::new(phi))
    }

    pub fn and(phi: Formula, psi: Formula) -> Self {
        Formula::And(Box::new(phi), Box::new(psi))
    }

    pub fn or(phi: Formula, psi: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(phi), Formula::not(psi)))
    }

    pub fn implies(phi: Formula, psi: Formula) -> Self {
        Formula::not(Formula::and(phi, Formula::not(psi)))
    }

    pub fn iff(phi: Formula, psi: Formula) -> Self {
        Formula::and(Formula::implies(phi.clone(), psi.clone()), Formula::implies(psi, phi))
    }

    pub fn nec(agent: impl Into<Name>, phi: Formula) -> Self {
        Formula::Box(agent.into(), Box::new(phi))
    }

    pub fn poss(agent: impl Into<Name>, phi: Formula) -> Self {
        Formula::not(Formula::nec(agent, Formula::not(phi)))
    }

    pub fn dynamic(model: impl Into<Name>, event: impl Into<Name>, phi: Formula) -> Self {
        Formula::Dyn(model.into(), event.into(), Box::new(phi))
    }

    /// Left-nested conjunction; the empty conjunction is `⊤`.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; the empty disjunction is `¬⊤`.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::bottom)
    }

    /// Recognises `¬(φ ∧ ¬ψ)` and returns `(φ, ψ)`.
    pub fn as_implication(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner) => match inner.as_ref() {
                Formula::And(a, b) => match b.as_ref() {
                    Formula::Not(c) => Some((a, c)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// Modal depth `d`: every unary operator and every conjunction adds one.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::Owns(..) => 0,
            Formula::Not(phi) | Formula::Box(_, phi) | Formula::Dyn(_, _, phi) => 1 + phi.depth(),
            Formula::And(phi, psi) => 1 + phi.depth().max(psi.depth()),
        }
    }

    /// Nesting of dynamic modalities `Od`.
    pub fn dyn_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::Owns(..) => 0,
            Formula::Not(phi) | Formula::Box(_, phi) => phi.dyn_depth(),
            Formula::And(phi, psi) => phi.dyn_depth().max(psi.dyn_depth()),
            Formula::Dyn(_, _, phi) => 1 + phi.dyn_depth(),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::Owns(..) => 1,
            Formula::Not(phi) | Formula::Box(_, phi) | Formula::Dyn(_, _, phi) => 1 + phi.size(),
            Formula::And(phi, psi) => 1 + phi.size() + psi.size(),
        }
    }

    pub fn is_static(&self) -> bool {
        self.dyn_depth() == 0
    }

    /// Atoms occurring syntactically. Preconditions of referenced event
    /// models are not looked into, and `Owns` nodes contribute nothing.
    pub fn atoms(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Top | Formula::Owns(..) => {}
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Not(phi) | Formula::Box(_, phi) | Formula::Dyn(_, _, phi) => phi.collect_atoms(out),
            Formula::And(phi, psi) => {
                phi.collect_atoms(out);
                psi.collect_atoms(out);
            }
        }
    }

    /// Objects mentioned by `Owns` nodes.
    pub fn objects(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Owns(_, o) = f {
                out.insert(o.clone());
            }
        });
        out
    }

    /// Agents mentioned by `Owns` and `Box` nodes.
    pub fn agents(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Owns(i, _) | Formula::Box(i, _) => {
                out.insert(i.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal over every subformula, including `self`.
    pub fn walk<F: FnMut(&Formula)>(&self, visit: &mut F) {
        visit(self);
        match self {
            Formula::Top | Formula::Atom(_) | Formula::Owns(..) => {}
            Formula::Not(phi) | Formula::Box(_, phi) | Formula::Dyn(_, _, phi) => phi.walk(visit),
            Formula::And(phi, psi) => {
                phi.walk(visit);
                psi.walk(visit);
            }
        }
    }

    /// Replaces every occurrence of `target` in `self` by `replacement`.
    ///
    /// Occurrences are matched top-down, so a replaced subtree is not
    /// searched again. Substitution passes through dynamic modalities:
    /// `([E,s]δ)[φ/ψ] = [E,s](δ[φ/ψ])`.
    pub fn substitute(&self, target: &Formula, replacement: &Formula) -> Formula {
        if self == target {
            return replacement.clone();
        }
        match self {
            Formula::Top | Formula::Atom(_) | Formula::Owns(..) => self.clone(),
            Formula::Not(phi) => Formula::not(phi.substitute(target, replacement)),
            Formula::And(phi, psi) => {
                Formula::and(phi.substitute(target, replacement), psi.substitute(target, replacement))
            }
            Formula::Box(i, phi) => Formula::Box(i.clone(), Box::new(phi.substitute(target, replacement))),
            Formula::Dyn(e, s, phi) => {
                Formula::Dyn(e.clone(), s.clone(), Box::new(phi.substitute(target, replacement)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn depth_clauses() {
        assert_eq!(p().depth(), 0);
        assert_eq!(Formula::owns("1", "a").depth(), 0);
        assert_eq!(Formula::nec("1", p()).depth(), 1);
        let f = Formula::and(Formula::and(p(), q()), Formula::not(p()));
        assert_eq!(f.depth(), 2);
        assert_eq!(Formula::dynamic("E", "s", p()).depth(), 1);
    }

    #[test]
    fn dyn_depth_clauses() {
        assert_eq!(Formula::nec("1", p()).dyn_depth(), 0);
        assert_eq!(Formula::dynamic("E", "s", p()).dyn_depth(), 1);
        let nested = Formula::dynamic("E", "s", Formula::dynamic("E", "t", p()));
        assert_eq!(nested.dyn_depth(), 2);
        let side = Formula::and(Formula::dynamic("E", "s", p()), Formula::nec("2", q()));
        assert_eq!(side.dyn_depth(), 1);
    }

    #[test]
    fn substitution_examples() {
        let d = Formula::and(p(), q());
        assert_eq!(d.substitute(&p(), &Formula::Top), Formula::and(Formula::Top, q()));

        let b = Formula::nec("1", p());
        assert_eq!(b.substitute(&q(), &Formula::Top), b);

        let dynf = Formula::dynamic("E", "s", Formula::and(p(), q()));
        assert_eq!(
            dynf.substitute(&Formula::and(p(), q()), &Formula::atom("r")),
            Formula::dynamic("E", "s", Formula::atom("r"))
        );
    }

    #[test]
    fn atoms_ignore_ownership() {
        assert!(Formula::Top.atoms().is_empty());
        let f = Formula::and(p(), Formula::nec("1", q()));
        let names: Vec<_> = f.atoms().into_iter().map(|n| n.to_string()).collect();
        assert_eq!(names, vec!["p", "q"]);
        assert!(Formula::owns("1", "a").atoms().is_empty());
    }

    #[test]
    fn derived_forms_expand() {
        assert_eq!(
            Formula::implies(p(), q()),
            Formula::not(Formula::and(p(), Formula::not(q())))
        );
        assert_eq!(
            Formula::poss("1", p()),
            Formula::not(Formula::nec("1", Formula::not(p())))
        );
        assert_eq!(Formula::conj(Vec::new()), Formula::Top);
        assert_eq!(Formula::conj(vec![p()]), p());
        assert_eq!(Formula::disj(vec![p(), q()]), Formula::or(p(), q()));
        let imp = Formula::implies(p(), q());
        assert_eq!(imp.as_implication(), Some((&p(), &q())));
    }
}
