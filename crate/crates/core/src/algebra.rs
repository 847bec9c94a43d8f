//! Complex algebras of strict models: the lattice of up-sets with
//! implication, exclusion, and the four lifted negations, plus law
//! checkers (residuation, Galois, comonad/closure suites) and the
//! dualizing-element probe.
//!
//! Elements are stored in ascending encoding order and every report refers
//! to elements by index, so all output is deterministic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::kripke::{FrameViolation, KripkeModel, WorldSet};
use crate::syntax::{Formula, NegationScheme, HOLE_ATOM};

/// Default cap on the world count of the source model; the element count is
/// exponential in it.
pub const DEFAULT_WORLD_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("model is not strict: {}", format_violations(.0))]
    NotStrict(Vec<FrameViolation>),
    #[error("model has {n} worlds, over the algebra cap of {cap}")]
    TooManyWorlds { n: usize, cap: usize },
}

fn format_violations(vs: &[FrameViolation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

/// The algebra of up-sets of a strict model. All operations take and return
/// element indices; strictness guarantees the negations stay inside the
/// element list (verified once at build time).
#[derive(Debug, Clone)]
pub struct ComplexAlgebra {
    model: KripkeModel,
    elements: Vec<WorldSet>,
}

/// Build the complex algebra of `m`. `cap` bounds the world count and
/// defaults to [`DEFAULT_WORLD_CAP`].
pub fn build_complex_algebra(
    m: &KripkeModel,
    cap: Option<usize>,
) -> Result<ComplexAlgebra, AlgebraError> {
    let cap = cap.unwrap_or(DEFAULT_WORLD_CAP);
    if m.n() > cap {
        return Err(AlgebraError::TooManyWorlds { n: m.n(), cap });
    }
    let violations = m.check_frame_conditions();
    if !violations.is_empty() {
        return Err(AlgebraError::NotStrict(violations));
    }
    let a = ComplexAlgebra { model: m.clone(), elements: m.up_sets() };
    // Closure of every operation over the elements is a theorem on strict
    // frames; verify it once so index lookups cannot fail later.
    for i in 0..a.len() {
        let x = a.elements[i];
        for set in [
            a.model.bnegr_set(x),
            a.model.wnegr_set(x),
            a.model.bnegl_set(x),
            a.model.wnegl_set(x),
        ] {
            assert!(a.index_of(set).is_some(), "negation left the up-set lattice");
        }
        for j in 0..a.len() {
            let y = a.elements[j];
            for set in [a.model.imp_set(x, y), a.model.excl_set(x, y)] {
                assert!(a.index_of(set).is_some(), "op left the up-set lattice");
            }
        }
    }
    Ok(a)
}

impl ComplexAlgebra {
    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    /// All elements, ascending by encoding.
    pub fn elements(&self) -> &[WorldSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // ∅ and W are always elements
    }

    pub fn element(&self, i: usize) -> WorldSet {
        self.elements[i]
    }

    pub fn index_of(&self, set: WorldSet) -> Option<usize> {
        self.elements.binary_search(&set).ok()
    }

    fn index(&self, set: WorldSet) -> usize {
        self.index_of(set).expect("closure was verified at build time")
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    /// Lattice order: element `i` below element `j`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.elements[i].is_subset(self.elements[j])
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.index(self.elements[i].inter(self.elements[j]))
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.index(self.elements[i].union(self.elements[j]))
    }

    pub fn imp(&self, i: usize, j: usize) -> usize {
        self.index(self.model.imp_set(self.elements[i], self.elements[j]))
    }

    pub fn excl(&self, i: usize, j: usize) -> usize {
        self.index(self.model.excl_set(self.elements[i], self.elements[j]))
    }

    pub fn bnegr(&self, i: usize) -> usize {
        self.index(self.model.bnegr_set(self.elements[i]))
    }

    pub fn wnegr(&self, i: usize) -> usize {
        self.index(self.model.wnegr_set(self.elements[i]))
    }

    pub fn bnegl(&self, i: usize) -> usize {
        self.index(self.model.bnegl_set(self.elements[i]))
    }

    pub fn wnegl(&self, i: usize) -> usize {
        self.index(self.model.wnegl_set(self.elements[i]))
    }

    /// Evaluate a formula with atoms read as elements: `env` maps atom names
    /// to element indices, and unmapped atoms mean bottom. The result equals
    /// the model extension of the formula under the matching valuation.
    pub fn eval_formula(&self, f: &Formula, env: &BTreeMap<String, usize>) -> usize {
        match f {
            Formula::Atom(name) => env.get(name).copied().unwrap_or(0),
            Formula::Top => self.top(),
            Formula::Bot => self.bottom(),
            Formula::And(a, b) => self.meet(self.eval_formula(a, env), self.eval_formula(b, env)),
            Formula::Or(a, b) => self.join(self.eval_formula(a, env), self.eval_formula(b, env)),
            Formula::Imp(a, b) => self.imp(self.eval_formula(a, env), self.eval_formula(b, env)),
            Formula::Excl(a, b) => self.excl(self.eval_formula(a, env), self.eval_formula(b, env)),
            Formula::BNegR(a) => self.bnegr(self.eval_formula(a, env)),
            Formula::BNegL(a) => self.bnegl(self.eval_formula(a, env)),
            Formula::WNegR(a) => self.wnegr(self.eval_formula(a, env)),
            Formula::WNegL(a) => self.wnegl(self.eval_formula(a, env)),
        }
    }

    /// The environment induced by the model's own valuation.
    pub fn valuation_env(&self) -> BTreeMap<String, usize> {
        self.model
            .valuation()
            .iter()
            .map(|(a, &s)| (a.clone(), self.index(s)))
            .collect()
    }

    /// Apply a negation scheme to element `i`: the hole atom is bound to the
    /// element, any other atoms keep the model's valuation.
    pub fn eval_scheme(&self, scheme: &NegationScheme, i: usize) -> usize {
        let mut env = self.valuation_env();
        env.insert(HOLE_ATOM.to_string(), i);
        self.eval_formula(&scheme.template(), &env)
    }

    /// Elements fixed by the scheme: `N(A) = A`.
    pub fn fixed_modes(&self, scheme: &NegationScheme) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.eval_scheme(scheme, i) == i).collect()
    }

    /// Exhaustively check the lattice, residuation, co-residuation,
    /// antitonicity, Galois, and co-Galois laws. Laws run in a fixed order
    /// and instances in lexicographic index order, so the first failure is
    /// deterministic.
    pub fn check_laws(&self) -> LawReport {
        let k = self.len();
        let mut checked = 0u64;
        macro_rules! law {
            ($name:expr, $tuple:expr, $ok:expr) => {
                checked += 1;
                if !$ok {
                    return LawReport {
                        checked,
                        failure: Some(LawFailure { law: $name.to_string(), elements: $tuple }),
                    };
                }
            };
        }
        for i in 0..k {
            for j in 0..k {
                law!("meet-commutative", vec![i, j], self.meet(i, j) == self.meet(j, i));
            }
        }
        for i in 0..k {
            for j in 0..k {
                law!("join-commutative", vec![i, j], self.join(i, j) == self.join(j, i));
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    law!(
                        "meet-associative",
                        vec![i, j, l],
                        self.meet(self.meet(i, j), l) == self.meet(i, self.meet(j, l))
                    );
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    law!(
                        "join-associative",
                        vec![i, j, l],
                        self.join(self.join(i, j), l) == self.join(i, self.join(j, l))
                    );
                }
            }
        }
        for i in 0..k {
            law!("meet-idempotent", vec![i], self.meet(i, i) == i);
        }
        for i in 0..k {
            law!("join-idempotent", vec![i], self.join(i, i) == i);
        }
        for i in 0..k {
            for j in 0..k {
                law!("absorption-meet-join", vec![i, j], self.meet(i, self.join(i, j)) == i);
            }
        }
        for i in 0..k {
            for j in 0..k {
                law!("absorption-join-meet", vec![i, j], self.join(i, self.meet(i, j)) == i);
            }
        }
        // A ∧ B ≤ C ⟺ B ≤ A → C
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    law!(
                        "residuation",
                        vec![a, b, c],
                        self.leq(self.meet(a, b), c) == self.leq(b, self.imp(a, c))
                    );
                }
            }
        }
        // A ≤ B ∨ C ⟺ A −< B ≤ C
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    law!(
                        "co-residuation",
                        vec![a, b, c],
                        self.leq(a, self.join(b, c)) == self.leq(self.excl(a, b), c)
                    );
                }
            }
        }
        type Unary = fn(&ComplexAlgebra, usize) -> usize;
        let negs: [(&str, Unary); 4] = [
            ("antitone-bnegr", ComplexAlgebra::bnegr),
            ("antitone-wnegr", ComplexAlgebra::wnegr),
            ("antitone-bnegl", ComplexAlgebra::bnegl),
            ("antitone-wnegl", ComplexAlgebra::wnegl),
        ];
        for (name, neg) in negs {
            for i in 0..k {
                for j in 0..k {
                    if !self.leq(i, j) {
                        continue;
                    }
                    law!(name, vec![i, j], self.leq(neg(self, j), neg(self, i)));
                }
            }
        }
        // A ≤ ▷B ⟺ B ≤ ◀A
        for a in 0..k {
            for b in 0..k {
                law!(
                    "galois",
                    vec![a, b],
                    self.leq(a, self.wnegr(b)) == self.leq(b, self.bnegl(a))
                );
            }
        }
        // ▶B ≤ A ⟺ ◁A ≤ B
        for a in 0..k {
            for b in 0..k {
                law!(
                    "co-galois",
                    vec![a, b],
                    self.leq(self.bnegr(b), a) == self.leq(self.wnegl(a), b)
                );
            }
        }
        LawReport { checked, failure: None }
    }

    fn comonad_apply(&self, composite: ComonadComposite, i: usize) -> usize {
        match composite {
            ComonadComposite::BnegrWnegl => self.bnegr(self.wnegl(i)),
            ComonadComposite::WneglBnegr => self.wnegl(self.bnegr(i)),
        }
    }

    /// Verify the comonad laws of a tense composite and list its coalgebras.
    pub fn check_comonad(&self, composite: ComonadComposite) -> ComonadReport {
        let k = self.len();
        let g: Vec<usize> = (0..k).map(|i| self.comonad_apply(composite, i)).collect();
        let counit_failure = (0..k).find(|&i| !self.leq(g[i], i));
        let mut monotonicity_failure = None;
        'pairs: for i in 0..k {
            for j in 0..k {
                if self.leq(i, j) && !self.leq(g[i], g[j]) {
                    monotonicity_failure = Some((i, j));
                    break 'pairs;
                }
            }
        }
        let idempotence_failure = (0..k).find(|&i| g[g[i]] != g[i]);
        let coalgebras = (0..k).filter(|&i| g[i] == i).collect();
        ComonadReport {
            composite,
            counit_failure,
            monotonicity_failure,
            idempotence_failure,
            coalgebras,
        }
    }

    fn closure_apply(&self, composite: ClosureComposite, i: usize) -> usize {
        match composite {
            ClosureComposite::WnegrBnegl => self.wnegr(self.bnegl(i)),
            ClosureComposite::BneglWnegr => self.bnegl(self.wnegr(i)),
        }
    }

    /// Verify the closure-operator laws of a tense composite and list its
    /// fixed points.
    pub fn check_closure(&self, composite: ClosureComposite) -> ClosureReport {
        let k = self.len();
        let c: Vec<usize> = (0..k).map(|i| self.closure_apply(composite, i)).collect();
        let unit_failure = (0..k).find(|&i| !self.leq(i, c[i]));
        let mut monotonicity_failure = None;
        'pairs: for i in 0..k {
            for j in 0..k {
                if self.leq(i, j) && !self.leq(c[i], c[j]) {
                    monotonicity_failure = Some((i, j));
                    break 'pairs;
                }
            }
        }
        let idempotence_failure = (0..k).find(|&i| c[c[i]] != c[i]);
        let fixed_points = (0..k).filter(|&i| c[i] == i).collect();
        ClosureReport {
            composite,
            unit_failure,
            monotonicity_failure,
            idempotence_failure,
            fixed_points,
        }
    }

    /// For every candidate D, compute the canonical map A ↦ (A → D) → D and
    /// report which elements it moves. A dualizing element is a D it moves
    /// nothing with.
    pub fn dualizing_report(&self) -> DualizingReport {
        let k = self.len();
        let mut candidates = Vec::with_capacity(k);
        for d in 0..k {
            let mut non_fixed = Vec::new();
            let mut fixed = Vec::new();
            for a in 0..k {
                if self.imp(self.imp(a, d), d) == a {
                    fixed.push(a);
                } else {
                    non_fixed.push(a);
                }
            }
            candidates.push(DualizingCandidate {
                d,
                witness_a: non_fixed.first().copied(),
                non_fixed,
                fixed,
            });
        }
        let dualizing_elements: Vec<usize> = candidates
            .iter()
            .filter(|c| c.non_fixed.is_empty())
            .map(|c| c.d)
            .collect();
        DualizingReport {
            has_dualizing_element: !dualizing_elements.is_empty(),
            dualizing_elements,
            candidates,
        }
    }

    /// Export form: elements as world-name lists, the implication and
    /// negation tables as index matrices, and the dualizing report.
    pub fn to_doc(&self) -> AlgebraDoc {
        let k = self.len();
        let names = |s: WorldSet| {
            s.iter().map(|w| self.model.name(w).to_string()).collect::<Vec<_>>()
        };
        AlgebraDoc {
            elements: self.elements.iter().map(|&s| names(s)).collect(),
            imp: (0..k).map(|i| (0..k).map(|j| self.imp(i, j)).collect()).collect(),
            neg: NegTables {
                bnegr: (0..k).map(|i| self.bnegr(i)).collect(),
                bnegl: (0..k).map(|i| self.bnegl(i)).collect(),
                wnegr: (0..k).map(|i| self.wnegr(i)).collect(),
                wnegl: (0..k).map(|i| self.wnegl(i)).collect(),
            },
            dualizing: self.dualizing_report(),
        }
    }
}

/// Result of [`ComplexAlgebra::check_laws`]: how many instances ran and the
/// first one that failed, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub checked: u64,
    pub failure: Option<LawFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawFailure {
    pub law: String,
    /// Element indices of the failing instance.
    pub elements: Vec<usize>,
}

/// The two comonad-side tense composites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComonadComposite {
    /// ▶◁ (written `b> w<`).
    BnegrWnegl,
    /// ◁▶ (written `w< b>`).
    WneglBnegr,
}

impl std::fmt::Display for ComonadComposite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ComonadComposite::BnegrWnegl => "b> w<",
            ComonadComposite::WneglBnegr => "w< b>",
        })
    }
}

/// The two closure-side tense composites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureComposite {
    /// ▷◀ (written `w> b<`).
    WnegrBnegl,
    /// ◀▷ (written `b< w>`).
    BneglWnegr,
}

impl std::fmt::Display for ClosureComposite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClosureComposite::WnegrBnegl => "w> b<",
            ClosureComposite::BneglWnegr => "b< w>",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComonadReport {
    pub composite: ComonadComposite,
    /// First element where G(A) ≤ A fails.
    pub counit_failure: Option<usize>,
    /// First pair A ≤ B with G(A) ≤ G(B) failing.
    pub monotonicity_failure: Option<(usize, usize)>,
    /// First element where G(G(A)) = G(A) fails.
    pub idempotence_failure: Option<usize>,
    /// Elements with G(A) = A.
    pub coalgebras: Vec<usize>,
}

impl ComonadReport {
    pub fn passed(&self) -> bool {
        self.counit_failure.is_none()
            && self.monotonicity_failure.is_none()
            && self.idempotence_failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub composite: ClosureComposite,
    /// First element where A ≤ C(A) fails.
    pub unit_failure: Option<usize>,
    pub monotonicity_failure: Option<(usize, usize)>,
    pub idempotence_failure: Option<usize>,
    /// Elements with C(A) = A.
    pub fixed_points: Vec<usize>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.unit_failure.is_none()
            && self.monotonicity_failure.is_none()
            && self.idempotence_failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualizingCandidate {
    /// Element index of the candidate D.
    pub d: usize,
    /// Elements moved by A ↦ (A → D) → D, ascending.
    pub non_fixed: Vec<usize>,
    /// Elements fixed by the canonical map, ascending.
    pub fixed: Vec<usize>,
    /// First moved element, when any: the concrete (D, A) witness.
    pub witness_a: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualizingReport {
    pub has_dualizing_element: bool,
    /// Candidates whose canonical map is the identity, ascending.
    pub dualizing_elements: Vec<usize>,
    pub candidates: Vec<DualizingCandidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegTables {
    pub bnegr: Vec<usize>,
    pub bnegl: Vec<usize>,
    pub wnegr: Vec<usize>,
    pub wnegl: Vec<usize>,
}

/// Wire form of an exported algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub elements: Vec<Vec<String>>,
    pub imp: Vec<Vec<usize>>,
    pub neg: NegTables,
    pub dualizing: DualizingReport,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::ModelDoc;
    use crate::syntax::parse;

    fn load(json: &str) -> KripkeModel {
        let doc: ModelDoc = serde_json::from_str(json).unwrap();
        KripkeModel::from_doc(&doc).unwrap().0
    }

    fn two_chain() -> KripkeModel {
        load(r#"{"worlds":["w0","w1"],"leq":[["w0","w1"]],"val":{"p":["w1"]}}"#)
    }

    fn two_antichain() -> KripkeModel {
        load(r#"{"worlds":["w0","w1"],"val":{"p":["w1"]}}"#)
    }

    fn smile_pair() -> KripkeModel {
        load(r#"{"worlds":["w0","w1"],"smile":[["w0","w1"]],"val":{"p":[]}}"#)
    }

    fn frown_pair() -> KripkeModel {
        load(r#"{"worlds":["w0","w1"],"frown":[["w0","w1"]],"val":{"p":["w0"]}}"#)
    }

    #[test]
    fn element_counts_match_the_up_set_lattices() {
        let chain = build_complex_algebra(&two_chain(), None).unwrap();
        assert_eq!(
            chain.elements(),
            &[
                WorldSet::empty(2),
                WorldSet::from_worlds(2, [1]),
                WorldSet::from_worlds(2, [0, 1]),
            ]
        );
        assert_eq!(build_complex_algebra(&two_antichain(), None).unwrap().len(), 4);
        let one = load(r#"{"worlds":["w0"]}"#);
        assert_eq!(build_complex_algebra(&one, None).unwrap().len(), 2);
    }

    #[test]
    fn build_rejects_lax_and_oversized_models() {
        let lax = load(r#"{"worlds":["w0","w1"],"leq":[["w0","w1"]],"smile":[["w0","w0"]]}"#);
        match build_complex_algebra(&lax, None).unwrap_err() {
            AlgebraError::NotStrict(vs) => {
                assert!(!vs.is_empty());
                assert_eq!(vs[0].to_string(), "fc-b> at (0, 1, 0)");
            }
            other => panic!("unexpected error {other:?}"),
        }
        let wide = load(
            r#"{"worlds":["a0","a1","a2","a3","a4","a5","a6"]}"#,
        );
        assert_eq!(
            build_complex_algebra(&wide, None).unwrap_err(),
            AlgebraError::TooManyWorlds { n: 7, cap: 6 }
        );
        assert!(build_complex_algebra(&wide, Some(8)).is_ok());
    }

    #[test]
    fn laws_pass_on_the_fixture_models() {
        for m in [two_chain(), two_antichain(), smile_pair(), frown_pair()] {
            let a = build_complex_algebra(&m, None).unwrap();
            let report = a.check_laws();
            assert_eq!(report.failure, None);
            assert!(report.checked > 0);
        }
    }

    #[test]
    fn comonad_laws_and_coalgebras_on_the_smile_pair() {
        // Identity order with 0 ⌣ 1: ▶◁ sends {0} to ∅ and fixes ∅ and {1}.
        let a = build_complex_algebra(&smile_pair(), None).unwrap();
        let report = a.check_comonad(ComonadComposite::BnegrWnegl);
        assert!(report.passed());
        let i = a.index_of(WorldSet::from_worlds(2, [0])).unwrap();
        assert_eq!(a.comonad_apply(ComonadComposite::BnegrWnegl, i), a.bottom());
        assert_eq!(
            report.coalgebras,
            vec![
                a.index_of(WorldSet::empty(2)).unwrap(),
                a.index_of(WorldSet::from_worlds(2, [1])).unwrap(),
            ]
        );
        assert!(a.check_comonad(ComonadComposite::WneglBnegr).passed());
    }

    #[test]
    fn comonad_is_degenerate_without_smile_pairs() {
        // ⌣ = ∅ makes ▶X empty, so ◁▶ is constantly ∅.
        let a = build_complex_algebra(&frown_pair(), None).unwrap();
        let report = a.check_comonad(ComonadComposite::WneglBnegr);
        assert!(report.passed());
        for i in 0..a.len() {
            assert_eq!(a.comonad_apply(ComonadComposite::WneglBnegr, i), a.bottom());
        }
        assert_eq!(report.coalgebras, vec![a.bottom()]);
    }

    #[test]
    fn closure_laws_and_fixed_points_on_the_frown_pair() {
        // Identity order with 0 ⌢ 1: ◀▷ sends {0} to W; ▷◀ fixes {0}.
        let a = build_complex_algebra(&frown_pair(), None).unwrap();
        let i0 = a.index_of(WorldSet::from_worlds(2, [0])).unwrap();
        let flip = a.check_closure(ClosureComposite::BneglWnegr);
        assert!(flip.passed());
        assert_eq!(a.closure_apply(ClosureComposite::BneglWnegr, i0), a.top());
        assert_eq!(
            flip.fixed_points,
            vec![a.index_of(WorldSet::from_worlds(2, [1])).unwrap(), a.top()]
        );
        let straight = a.check_closure(ClosureComposite::WnegrBnegl);
        assert!(straight.passed());
        assert_eq!(a.closure_apply(ClosureComposite::WnegrBnegl, i0), i0);
        // The top element is fixed by any closure operator.
        assert!(straight.fixed_points.contains(&a.top()));
    }

    #[test]
    fn chain_algebra_has_no_dualizing_element() {
        let a = build_complex_algebra(&two_chain(), None).unwrap();
        let report = a.dualizing_report();
        assert!(!report.has_dualizing_element);
        assert_eq!(report.dualizing_elements, Vec::<usize>::new());
        assert_eq!(report.candidates.len(), 3);
        // D = ∅ moves exactly {w1}: ({w1} → ∅) → ∅ = W.
        let c0 = &report.candidates[0];
        assert_eq!(c0.d, 0);
        assert_eq!(c0.non_fixed, vec![1]);
        assert_eq!(c0.fixed, vec![0, 2]);
        assert_eq!(c0.witness_a, Some(1));
        assert_eq!(a.imp(a.imp(1, 0), 0), 2);
        // Every candidate names a witness.
        assert!(report.candidates.iter().all(|c| c.witness_a.is_some()));
    }

    #[test]
    fn boolean_algebras_have_a_dualizing_bottom() {
        let a = build_complex_algebra(&two_antichain(), None).unwrap();
        let report = a.dualizing_report();
        assert!(report.has_dualizing_element);
        assert_eq!(report.dualizing_elements, vec![0]);
        assert_eq!(report.candidates[0].fixed, vec![0, 1, 2, 3]);
        let one = load(r#"{"worlds":["w0"]}"#);
        let tiny = build_complex_algebra(&one, None).unwrap();
        assert!(tiny.dualizing_report().has_dualizing_element);
    }

    #[test]
    fn fixed_modes_match_the_dualizing_and_closure_views() {
        let chain = build_complex_algebra(&two_chain(), None).unwrap();
        assert_eq!(chain.fixed_modes(&NegationScheme::Heyting), vec![0, 2]);
        let boolean = build_complex_algebra(&two_antichain(), None).unwrap();
        assert_eq!(boolean.fixed_modes(&NegationScheme::Heyting), vec![0, 1, 2, 3]);
        // The scheme composite and the closure composite agree pointwise.
        let frown = build_complex_algebra(&frown_pair(), None).unwrap();
        assert_eq!(
            frown.fixed_modes(&NegationScheme::GaloisFlip),
            frown.check_closure(ClosureComposite::BneglWnegr).fixed_points
        );
        assert_eq!(
            frown.fixed_modes(&NegationScheme::Galois),
            frown.check_closure(ClosureComposite::WnegrBnegl).fixed_points
        );
    }

    #[test]
    fn algebra_evaluation_agrees_with_the_model_checker() {
        for m in [two_chain(), two_antichain(), smile_pair(), frown_pair()] {
            let a = build_complex_algebra(&m, None).unwrap();
            let env = a.valuation_env();
            for text in [
                "p -> q",
                "p & (q | T)",
                "~~p",
                "b> w< p",
                "w> b< p",
                "b< w> (p -< q)",
                "w< b> p | F",
            ] {
                let f = parse(text).unwrap();
                let idx = a.eval_formula(&f, &env);
                assert_eq!(a.element(idx), m.extension(&f), "{text}");
            }
        }
    }

    #[test]
    fn custom_schemes_keep_model_valuations_for_other_atoms() {
        // N(A) = A → p on the 2-chain with p = {w1}.
        let a = build_complex_algebra(&two_chain(), None).unwrap();
        let scheme: NegationScheme = "custom:a -> p".parse().unwrap();
        let top_to_p = a.eval_scheme(&scheme, a.top());
        assert_eq!(a.element(top_to_p), WorldSet::from_worlds(2, [1]));
        // ∅ ↦ W, {w1} ↦ W, W ↦ {w1}: the map fixes nothing.
        assert_eq!(a.fixed_modes(&scheme), Vec::<usize>::new());
        let identity: NegationScheme = "custom:a".parse().unwrap();
        assert_eq!(a.fixed_modes(&identity), vec![0, 1, 2]);
    }

    #[test]
    fn export_doc_is_frozen_and_round_trips() {
        let a = build_complex_algebra(&two_chain(), None).unwrap();
        let doc = a.to_doc();
        assert_eq!(
            doc.elements,
            vec![vec![], vec!["w1".to_string()], vec!["w0".to_string(), "w1".to_string()]]
        );
        assert_eq!(doc.imp, vec![vec![2, 2, 2], vec![0, 2, 2], vec![0, 1, 2]]);
        // Empty tense relations: ▶ and ◁ are constantly ∅, ▷ and ◀
        // constantly W.
        assert_eq!(doc.neg.bnegr, vec![0, 0, 0]);
        assert_eq!(doc.neg.wnegl, vec![0, 0, 0]);
        assert_eq!(doc.neg.wnegr, vec![2, 2, 2]);
        assert_eq!(doc.neg.bnegl, vec![2, 2, 2]);
        let json = serde_json::to_string(&doc).unwrap();
        let back: AlgebraDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn lattice_constants_sit_at_the_ends() {
        let a = build_complex_algebra(&two_chain(), None).unwrap();
        assert_eq!(a.element(a.bottom()), WorldSet::empty(2));
        assert_eq!(a.element(a.top()), WorldSet::full(2));
    }
}
