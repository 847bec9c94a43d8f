//! Shared generators for the integration tests.

#![allow(dead_code)]

use nodal::kripke::KripkeModel;
use nodal::search::random_strict_model;
use nodal::syntax::Formula;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random formulas over p, q, r with at most `levels` connective levels.
pub fn formula_strategy(levels: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        3 => prop_oneof![Just("p"), Just("q"), Just("r")].prop_map(Formula::atom),
        1 => Just(Formula::Top),
        1 => Just(Formula::Bot),
    ];
    leaf.prop_recursive(levels, 64, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::excl(a, b)),
            inner.clone().prop_map(Formula::bnegr),
            inner.clone().prop_map(Formula::bnegl),
            inner.clone().prop_map(Formula::wnegr),
            inner.prop_map(Formula::wnegl),
        ]
    })
}

/// A reproducible random strict model with 1..=`max_worlds` worlds.
pub fn strict_model(seed: u64, max_worlds: usize, atoms: &[&str]) -> KripkeModel {
    let atoms: Vec<String> = atoms.iter().map(|s| s.to_string()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_strict_model(&mut rng, max_worlds, &atoms)
}
