//! A desk-scale workbench for a bi-intuitionistic tense logic with four
//! one-place "split" negations.
//!
//! The crate provides:
//!
//! * [`syntax`]: formula abstract syntax, a parser for the ASCII surface
//!   grammar (with Unicode aliases), and a canonical printer.
//! * [`kripke`]: finite birelational Kripke models, formula evaluation,
//!   frame-condition checking, and a JSON wire format.
//! * [`search`]: exhaustive model enumeration up to isomorphism, countermodel
//!   search, validity scans, and double-negation probes.
//! * [`algebra`]: the complex algebra of a model (all up-closed subsets with
//!   the lifted operations), algebraic law checks, and dualizing-element
//!   reports.
//! * [`calculus`]: a display-style sequent calculus with bounded proof
//!   search, derivation checking, and a semantic soundness harness.

pub mod algebra;
pub mod calculus;
pub mod kripke;
pub mod search;
pub mod syntax;
