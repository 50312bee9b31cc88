//! Randomized invariants. Models, events and formulas are drawn from a
//! seeded generator, so proptest shrinks towards small seeds.

use omodel::catalog;
use omodel::closure::{self, EmpId};
use omodel::generation::{self, FormulaGen, GenConfig};
use omodel::instantiations::awareness::{aware_direct, expand_atomic_awareness};
use omodel::model::{validate_event, validate_model};
use omodel::properties::{self, AgentFocus, PropertyId};
use omodel::reduction;
use omodel::semantics::{self, Evaluator};
use omodel::update::product_update;
use omodel::{parse_formula, print_formula, EventModel, Formula, OModel, Registry, Signature, Workspace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn signatures() -> Vec<Arc<Signature>> {
    vec![
        catalog::worked_signature(),
        Arc::new(Signature::new(["1", "2", "3"], ["a", "b"], ["p", "q"]).unwrap()),
        Arc::new(Signature::new(["1"], ["a", "b", "c"], ["p"]).unwrap()),
    ]
}

struct Sample {
    sig: Arc<Signature>,
    reg: Registry,
    model: OModel,
    event: EventModel,
    formula: Formula,
    rng: ChaCha8Rng,
}

fn sample(seed: u64, which: usize) -> Sample {
    let sig = signatures()[which % 3].clone();
    let cfg = GenConfig::new(sig.clone(), seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reg = Registry::new();
    reg.insert("Pri", catalog::private_forgetting(sig.clone(), 0, 0));
    reg.insert("R", generation::sample_event(&mut rng, &cfg));
    let model = generation::sample_model(&mut rng, &cfg);
    let event = generation::sample_event(&mut rng, &cfg);
    let formula = FormulaGen::new(&sig, Some(&reg), 5, 2).sample(&mut rng);
    Sample {
        sig,
        reg,
        model,
        event,
        formula,
        rng,
    }
}

fn focus(sig: &Signature, k: usize) -> AgentFocus {
    let n = sig.n_agents();
    match k % 3 {
        0 => AgentFocus::indv(n),
        1 => AgentFocus::gen(n),
        _ => AgentFocus::new([(n - 1, (0..n).step_by(2).collect())]).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), which in 0usize..3) {
        let s = sample(seed, which);
        let text = print_formula(&s.formula);
        let back = parse_formula(&text).unwrap();
        prop_assert_eq!(&back, &s.formula);
        prop_assert_eq!(print_formula(&back), text);
    }

    #[test]
    fn substitution_identities(seed in any::<u64>(), which in 0usize..3) {
        let s = sample(seed, which);
        let f = &s.formula;
        prop_assert_eq!(&f.substitute(f, &Formula::Top), &Formula::Top);
        let mut subs = Vec::new();
        f.walk(&mut |g| subs.push(g.clone()));
        for g in &subs {
            prop_assert_eq!(&f.substitute(g, g), f);
        }
        // Replacing a subformula by an equivalent one keeps the extension.
        let target = &subs[subs.len() / 2];
        let twice = Formula::not(Formula::not(target.clone()));
        let replaced = f.substitute(target, &twice);
        prop_assert_eq!(
            semantics::extension(&s.model, f, &s.reg).unwrap(),
            semantics::extension(&s.model, &replaced, &s.reg).unwrap()
        );
    }

    #[test]
    fn semantic_clauses(seed in any::<u64>(), which in 0usize..3) {
        let s = sample(seed, which);
        let m = &s.model;
        let mut ev = Evaluator::new(m, &s.reg);
        let phi = &s.formula;
        let psi = FormulaGen::new(&s.sig, Some(&s.reg), 3, 1).sample(&mut s.rng.clone());
        let a = ev.extension(phi).unwrap();
        let b = ev.extension(&psi).unwrap();
        let not = ev.extension(&Formula::not(phi.clone())).unwrap();
        let and = ev.extension(&Formula::and(phi.clone(), psi.clone())).unwrap();
        for w in 0..m.n_worlds() {
            prop_assert_eq!(not.contains(w), !a.contains(w));
            prop_assert_eq!(and.contains(w), a.contains(w) && b.contains(w));
        }
        for (i, agent) in s.sig.agents().iter().enumerate() {
            let bx = ev.extension(&Formula::nec(agent.clone(), phi.clone())).unwrap();
            for w in 0..m.n_worlds() {
                prop_assert_eq!(bx.contains(w), m.successors(i, w).iter().all(|u| a.contains(u)));
            }
        }
        let e = s.reg.get("R").unwrap();
        let prod = product_update(m, e);
        for (k, ev_name) in e.events().iter().enumerate() {
            let dynf = Formula::dynamic("R", ev_name.clone(), phi.clone());
            let d = ev.extension(&dynf).unwrap();
            let pre = semantics::static_extension(m, e.pre(k)).unwrap();
            for w in 0..m.n_worlds() {
                let expected = match &prod {
                    Ok(p) if pre.contains(w) => {
                        let at = p.world_of(w, k).unwrap();
                        semantics::eval(&p.model, at, phi, &s.reg).unwrap()
                    }
                    _ => true,
                };
                prop_assert_eq!(d.contains(w), expected);
            }
        }
    }

    #[test]
    fn product_structure(seed in any::<u64>(), which in 0usize..3) {
        let s = sample(seed, which);
        let (m, e) = (&s.model, &s.event);
        let pres: Vec<_> = (0..e.n_events())
            .map(|k| semantics::static_extension(m, e.pre(k)).unwrap())
            .collect();
        let expected: Vec<(usize, usize)> = (0..m.n_worlds())
            .flat_map(|w| (0..e.n_events()).map(move |k| (w, k)))
            .filter(|&(w, k)| pres[k].contains(w))
            .collect();
        match product_update(m, e) {
            Err(omodel::Error::Undefined) => prop_assert!(expected.is_empty()),
            Err(other) => return Err(TestCaseError::fail(other.to_string())),
            Ok(p) => {
                prop_assert_eq!(&p.pairs, &expected);
                let n = s.sig.n_agents();
                for (x, &(w, k)) in p.pairs.iter().enumerate() {
                    for i in 0..n {
                        let mut own = m.own(i, w).union(e.eff_plus(i, k));
                        own.difference_with(e.eff_minus(i, k));
                        prop_assert_eq!(p.model.own(i, x), &own);
                        for (y, &(u, t)) in p.pairs.iter().enumerate() {
                            prop_assert_eq!(
                                p.model.has_edge(i, x, y),
                                m.has_edge(i, w, u) && e.has_edge(i, k, t)
                            );
                        }
                    }
                    for a in 0..s.sig.n_atoms() {
                        prop_assert_eq!(p.model.val(a).contains(x), m.val(a).contains(w));
                    }
                }
                prop_assert!(validate_model(&s.sig, &p.model.to_doc("P")).is_ok());
            }
        }
    }

    #[test]
    fn checkers_agree_with_schemas_and_witnesses(seed in any::<u64>(), which in 0usize..3, k in 0usize..3) {
        let s = sample(seed, which);
        let f = focus(&s.sig, k);
        for p in PropertyId::ALL {
            let r = properties::check_group_property(&s.model, p, &f).unwrap();
            prop_assert_eq!(r.holds, properties::check_via_schema(&s.model, p, &f).unwrap());
            if let Some(w) = r.witness {
                prop_assert!(properties::witness_is_violation(&s.model, p, &f, &w));
            }
            let er = closure::check_emp(&s.event, EmpId(p), &f).unwrap();
            if let Some(w) = er.witness {
                prop_assert!(closure::emp_witness_is_violation(&s.event, EmpId(p), &f, &w));
            }
            prop_assert_eq!(er.holds, er.witness.is_none());
        }
    }

    #[test]
    fn repairs_are_sound_and_local(seed in any::<u64>(), which in 0usize..3, k in 0usize..3) {
        let s = sample(seed, which);
        let f = focus(&s.sig, k);
        for p in PropertyId::ALL {
            let m = generation::repair_to_property(&s.model, p, &f).unwrap();
            prop_assert!(properties::check_group_property(&m, p, &f).unwrap().holds);
            for i in 0..s.sig.n_agents() {
                prop_assert!(m.edges(i).eq(s.model.edges(i)));
            }
            for a in 0..s.sig.n_atoms() {
                prop_assert_eq!(m.val(a), s.model.val(a));
            }
            prop_assert_eq!(&generation::repair_to_property(&m, p, &f).unwrap(), &m);

            let e = generation::repair_event_to_emp(&s.event, EmpId(p), &f).unwrap();
            prop_assert!(closure::check_emp(&e, EmpId(p), &f).unwrap().holds);
            prop_assert!(e.violations().is_empty());
            prop_assert!(validate_event(&s.sig, &e.to_doc("E")).is_ok());

            // Closure on the repaired pair.
            prop_assert!(closure::verify_closure(&m, &e, p, &f).is_ok());
        }
    }

    #[test]
    fn translation_is_static_and_equivalent(seed in any::<u64>(), which in 0usize..3) {
        let s = sample(seed, which);
        let t = reduction::translate(&s.formula, &s.reg).unwrap();
        prop_assert!(t.is_static());
        prop_assert_eq!(reduction::check_reduction_equivalence(&s.model, &s.formula, &s.reg).unwrap(), None);
        let simple = reduction::simplify(&t);
        prop_assert!(simple.size() <= t.size());
        prop_assert_eq!(
            semantics::static_extension(&s.model, &simple).unwrap(),
            semantics::static_extension(&s.model, &t).unwrap()
        );
    }

    #[test]
    fn workspace_round_trip(seed in any::<u64>(), which in 0usize..3) {
        let s = sample(seed, which);
        let mut ws = Workspace::new(s.sig.clone());
        ws.insert_model("m", s.model.clone()).unwrap();
        for (name, e) in s.reg.iter() {
            ws.insert_event(name.clone(), e.clone()).unwrap();
        }
        ws.insert_event("E", s.event.clone()).unwrap();
        let text = ws.to_json();
        let back = Workspace::from_json(&text).unwrap();
        prop_assert_eq!(&back, &ws);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), which in 0usize..3) {
        let sig = signatures()[which].clone();
        let cfg = GenConfig::new(sig.clone(), seed);
        prop_assert_eq!(generation::gen_model(&cfg), generation::gen_model(&cfg));
        prop_assert_eq!(generation::gen_event(&cfg), generation::gen_event(&cfg));
        let e = generation::gen_event(&cfg);
        prop_assert!(e.violations().is_empty());
        prop_assert_eq!(validate_event(&sig, &e.to_doc("E")).unwrap(), e);
    }

    #[test]
    fn focus_text_round_trip(seed in any::<u64>(), which in 0usize..3, k in 0usize..3) {
        let _ = seed;
        let sig = &signatures()[which];
        let f = focus(sig, k);
        prop_assert_eq!(AgentFocus::parse(sig, &f.to_text(sig)).unwrap(), f);
    }

    #[test]
    fn atomic_awareness_matches_atom_subset(seed in any::<u64>()) {
        let sig = Arc::new(Signature::new(["1", "2"], ["p", "q", "r"], ["p", "q", "r"]).unwrap());
        let cfg = GenConfig::new(sig.clone(), seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = generation::sample_model(&mut rng, &cfg);
        let phi = FormulaGen::new(&sig, None, 4, 0).sample(&mut rng);
        for (i, agent) in sig.agents().iter().enumerate() {
            let ext = semantics::static_extension(&m, &expand_atomic_awareness(agent, &phi)).unwrap();
            for w in 0..m.n_worlds() {
                prop_assert_eq!(ext.contains(w), aware_direct(&m, w, i, &phi).unwrap());
            }
        }
    }
}
