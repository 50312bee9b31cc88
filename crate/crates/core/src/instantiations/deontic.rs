//! Deontic reading: objects are normative demands, and a world where an
//! agent owns every object is ideal for that agent.

use crate::formula::Formula;
use crate::model::Signature;

/// `⋀_{o∈O} O_i o`: every demand is met.
pub fn ideal(sig: &Signature, agent: usize) -> Formula {
    let i = &sig.agents()[agent];
    Formula::conj(sig.universe().iter().map(|o| Formula::Owns(i.clone(), o.clone())))
}

/// `OB φ := □_i(ideal → φ)`.
pub fn deontic_ob(sig: &Signature, agent: usize, phi: Formula) -> Formula {
    Formula::nec(sig.agents()[agent].clone(), Formula::implies(ideal(sig, agent), phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn single_object() {
        let sig = Signature::new(["1"], ["a"], ["p"]).unwrap();
        assert_eq!(
            deontic_ob(&sig, 0, Formula::atom("p")),
            parse_formula("[1](O(1,a) -> p)").unwrap()
        );
    }
}
