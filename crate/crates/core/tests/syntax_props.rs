//! Property tests for the formula grammar: printing and parsing are
//! mutually inverse and structure-preserving.

mod common;

use common::formula_strategy;
use nodal::syntax::{parse, Formula};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn printing_then_parsing_is_identity(f in formula_strategy(8)) {
        let printed = f.to_string();
        let back = parse(&printed);
        prop_assert_eq!(back.as_ref().ok(), Some(&f), "printed: {}", printed);
    }
}

proptest! {
    #[test]
    fn printing_preserves_depth_and_atoms(f in formula_strategy(6)) {
        let back = parse(&f.to_string()).unwrap();
        prop_assert_eq!(back.depth(), f.depth());
        prop_assert_eq!(back.atoms(), f.atoms());
    }

    #[test]
    fn substituting_an_absent_atom_changes_nothing(f in formula_strategy(5)) {
        prop_assert_eq!(f.substitute("zz", &Formula::Top), f.clone());
    }

    #[test]
    fn substituting_atoms_for_themselves_is_identity(f in formula_strategy(5)) {
        let mut g = f.clone();
        for atom in f.atoms() {
            let replacement = Formula::atom(atom);
            g = g.substitute(atom, &replacement);
        }
        prop_assert_eq!(g, f);
    }

    #[test]
    fn subformulas_contain_the_formula_and_respect_depth(f in formula_strategy(5)) {
        let subs = f.subformulas();
        prop_assert!(subs.contains(&&f));
        for sub in &subs {
            prop_assert!(sub.depth() <= f.depth());
        }
    }
}
