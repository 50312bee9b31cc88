//! The translation τ that eliminates dynamic modalities, the reduction
//! axioms it is built from, and a semantic check of the two together.

use crate::error::{Error, Result};
use crate::formula::{Formula, Name};
use crate::model::{EventModel, OModel};
use crate::semantics::{Evaluator, Registry};
use serde::Serialize;

/// One rewriting step of τ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    /// Nesting level of the call that produced this step.
    pub level: usize,
    pub input: String,
    pub clause: &'static str,
    pub output: String,
}

/// Options for [`translate_with`].
#[derive(Debug, Clone, Copy)]
pub struct TranslateOptions {
    /// Abort once an intermediate result has more nodes than this.
    pub size_cap: usize,
    pub trace: bool,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            size_cap: 1 << 20,
            trace: false,
        }
    }
}

/// Output of τ with the steps that produced it, if requested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    pub formula: Formula,
    pub trace: Vec<TraceStep>,
}

struct Translator<'r> {
    reg: &'r Registry,
    opts: TranslateOptions,
    trace: Vec<TraceStep>,
    level: usize,
}

fn lookup<'r>(reg: &'r Registry, model: &str, event: &str) -> Result<(&'r EventModel, usize)> {
    let e = reg.resolve(model)?;
    let s = e.event(event).ok_or_else(|| Error::UnknownEvent {
        model: model.to_string(),
        event: event.to_string(),
    })?;
    Ok((e, s))
}

impl Translator<'_> {
    fn emit(&mut self, input: &Formula, clause: &'static str, output: Formula) -> Result<Formula> {
        if output.size() > self.opts.size_cap {
            return Err(Error::TranslationTooLarge {
                cap: self.opts.size_cap,
            });
        }
        if self.opts.trace {
            self.trace.push(TraceStep {
                level: self.level,
                input: input.to_string(),
                clause,
                output: output.to_string(),
            });
        }
        Ok(output)
    }

    fn tau(&mut self, f: &Formula) -> Result<Formula> {
        if f.is_static() {
            return Ok(f.clone());
        }
        self.level += 1;
        let out = match f {
            Formula::Not(a) => {
                let a = self.tau(a)?;
                self.emit(f, "not", Formula::not(a))
            }
            Formula::And(a, b) => {
                let (a, b) = (self.tau(a)?, self.tau(b)?);
                self.emit(f, "and", Formula::and(a, b))
            }
            Formula::Box(i, a) => {
                let a = self.tau(a)?;
                self.emit(f, "box", Formula::Box(i.clone(), Box::new(a)))
            }
            Formula::Dyn(model, event, body) => self.tau_dyn(f, model, event, body),
            Formula::Top | Formula::Atom(_) | Formula::Owns(..) => unreachable!("static"),
        };
        self.level -= 1;
        out
    }

    /// τ([E,s] body), dispatching on the head of `body`.
    fn tau_dyn(&mut self, whole: &Formula, model: &Name, event: &Name, body: &Formula) -> Result<Formula> {
        let (e, s) = lookup(self.reg, model, event)?;
        let pre = e.pre(s).clone();
        let dynamic = |phi: Formula| Formula::Dyn(model.clone(), event.clone(), Box::new(phi));
        match body {
            Formula::Top => self.emit(whole, "dyn-top", Formula::Top),
            Formula::Atom(_) => self.emit(whole, "dyn-atom", Formula::implies(pre, body.clone())),
            Formula::Owns(i, x) => {
                let sig = e.signature();
                let agent = sig.agent(i).ok_or_else(|| Error::UnknownName {
                    kind: "agent",
                    name: i.to_string(),
                })?;
                let object = sig.object(x).ok_or_else(|| Error::UnknownName {
                    kind: "object",
                    name: x.to_string(),
                })?;
                if e.eff_plus(agent, s).contains(object) {
                    self.emit(whole, "dyn-owns-gained", Formula::Top)
                } else if e.eff_minus(agent, s).contains(object) {
                    self.emit(whole, "dyn-owns-lost", Formula::not(pre))
                } else {
                    self.emit(whole, "dyn-owns-kept", Formula::implies(pre, body.clone()))
                }
            }
            Formula::Not(a) => {
                let inner = self.tau(&dynamic((**a).clone()))?;
                self.emit(whole, "dyn-not", Formula::implies(pre, Formula::not(inner)))
            }
            Formula::And(a, b) => {
                let a = self.tau(&dynamic((**a).clone()))?;
                let b = self.tau(&dynamic((**b).clone()))?;
                self.emit(whole, "dyn-and", Formula::and(a, b))
            }
            Formula::Box(i, a) => {
                let agent = e.signature().agent(i).ok_or_else(|| Error::UnknownName {
                    kind: "agent",
                    name: i.to_string(),
                })?;
                let mut parts = Vec::new();
                for t in e.successors(agent, s).iter() {
                    let next = Formula::Dyn(model.clone(), e.event_name(t).clone(), a.clone());
                    parts.push(Formula::Box(i.clone(), Box::new(self.tau(&next)?)));
                }
                self.emit(whole, "dyn-box", Formula::implies(pre, Formula::conj(parts)))
            }
            Formula::Dyn(..) => {
                let inner = self.tau(body)?;
                let outer = self.tau(&dynamic(inner))?;
                self.emit(whole, "dyn-dyn", outer)
            }
        }
    }
}

/// τ(φ): a static formula equivalent to `phi`.
pub fn translate(phi: &Formula, reg: &Registry) -> Result<Formula> {
    translate_with(phi, reg, TranslateOptions::default()).map(|t| t.formula)
}

pub fn translate_with(phi: &Formula, reg: &Registry, opts: TranslateOptions) -> Result<Translation> {
    let mut tr = Translator {
        reg,
        opts,
        trace: Vec::new(),
        level: 0,
    };
    let formula = tr.tau(phi)?;
    Ok(Translation {
        formula,
        trace: tr.trace,
    })
}

/// Removes `¬¬`, `⊤` conjuncts, conjunctions with `¬⊤` and `□_i⊤`,
/// bottom-up. Only ever applied after translation.
pub fn simplify(f: &Formula) -> Formula {
    let bottom = Formula::bottom();
    match f {
        Formula::Top | Formula::Atom(_) | Formula::Owns(..) => f.clone(),
        Formula::Not(a) => match simplify(a) {
            Formula::Not(inner) => *inner,
            other => Formula::not(other),
        },
        Formula::And(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            if a == Formula::Top {
                b
            } else if b == Formula::Top || a == b {
                a
            } else if a == bottom || b == bottom {
                bottom
            } else {
                Formula::and(a, b)
            }
        }
        Formula::Box(i, a) => match simplify(a) {
            Formula::Top => Formula::Top,
            other => Formula::Box(i.clone(), Box::new(other)),
        },
        Formula::Dyn(e, s, a) => Formula::Dyn(e.clone(), s.clone(), Box::new(simplify(a))),
    }
}

/// The reduction axiom for `[model,event]phi` selected by the head of
/// `phi`, as a biconditional. Dynamic heads have no axiom and yield an
/// empty list.
pub fn reduction_axiom_instances(reg: &Registry, model: &str, event: &str, phi: &Formula) -> Result<Vec<Formula>> {
    let (e, s) = lookup(reg, model, event)?;
    let pre = e.pre(s).clone();
    let at = |t: &Name, psi: &Formula| Formula::Dyn(Name::from(model), t.clone(), Box::new(psi.clone()));
    let here = Name::from(event);
    let lhs = at(&here, phi);
    let rhs = match phi {
        Formula::Top => Formula::Top,
        Formula::Atom(_) => Formula::implies(pre, phi.clone()),
        Formula::Owns(i, x) => {
            let sig = e.signature();
            let (agent, object) = match (sig.agent(i), sig.object(x)) {
                (Some(a), Some(o)) => (a, o),
                _ => {
                    return Err(Error::UnknownName {
                        kind: "ownership literal",
                        name: format!("O({i},{x})"),
                    })
                }
            };
            if e.eff_plus(agent, s).contains(object) {
                Formula::Top
            } else if e.eff_minus(agent, s).contains(object) {
                Formula::not(pre)
            } else {
                Formula::implies(pre, phi.clone())
            }
        }
        Formula::Not(a) => Formula::implies(pre, Formula::not(at(&here, a))),
        Formula::And(a, b) => Formula::and(at(&here, a), at(&here, b)),
        Formula::Box(i, a) => {
            let agent = e.signature().agent(i).ok_or_else(|| Error::UnknownName {
                kind: "agent",
                name: i.to_string(),
            })?;
            let parts = e
                .successors(agent, s)
                .iter()
                .map(|t| Formula::Box(i.clone(), Box::new(at(e.event_name(t), a))));
            Formula::implies(pre, Formula::conj(parts.collect::<Vec<_>>()))
        }
        Formula::Dyn(..) => return Ok(Vec::new()),
    };
    Ok(vec![Formula::iff(lhs, rhs)])
}

/// Compares `phi` with τ(φ) at every world; returns the first world where
/// they differ.
pub fn check_reduction_equivalence(m: &OModel, phi: &Formula, reg: &Registry) -> Result<Option<usize>> {
    let translated = translate(phi, reg)?;
    let mut ev = Evaluator::new(m, reg);
    let direct = ev.extension(phi)?;
    let reduced = ev.extension(&translated)?;
    Ok((0..m.n_worlds()).find(|&w| direct.contains(w) != reduced.contains(w)))
}
