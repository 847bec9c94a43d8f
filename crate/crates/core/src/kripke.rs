//! Finite birelational Kripke models and formula evaluation.
//!
//! A model is ⟨W, ≤, ⌢, ⌣, I⟩: a finite world set, an intuitionistic
//! preorder ≤ (reflexive, transitive; valuations and all extensions are
//! up-closed along it on well-behaved models), two accessibility relations
//! ⌢ ("frown") and ⌣ ("smile") driving the four one-place negations, and a
//! valuation. A relation pair `(a, b)` always means `a R b`.
//!
//! The satisfaction clauses, writing `[f]` for the extension of `f`:
//!
//! ```text
//! [T] = W                [F] = {}
//! [A & B] = [A] ∩ [B]    [A | B] = [A] ∪ [B]
//! [A -> B] = {w : ∀v ≥ w, v ∈ [A] ⟹ v ∈ [B]}
//! [A -< B] = {w : ∃v ≤ w, v ∈ [A] ∧ v ∉ [B]}
//! [b> A] = {w : ∃v (v ⌣ w ∧ v ∉ [A])}
//! [w> A] = {w : ∀v (v ⌢ w ⟹ v ∉ [A])}
//! [b< A] = {w : ∀v (w ⌢ v ⟹ v ∉ [A])}
//! [w< A] = {w : ∃v (w ⌣ v ∧ v ∉ [A])}
//! ```
//!
//! Four frame conditions (see [`FrameCondition`]) are exactly what it takes
//! for each modal clause to preserve persistence; a model satisfying all of
//! them (on top of ≤ being a preorder) is called *strict*.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::Formula;

/// Hard cap on model size: world sets are single machine words.
pub const MAX_WORLDS: usize = 64;

fn universe_mask(n: u32) -> u64 {
    if n as usize >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A subset of the worlds of some fixed model, as a bitmask. The universe
/// size travels with the set so complements are well-defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldSet {
    n: u32,
    bits: u64,
}

impl WorldSet {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_WORLDS);
        WorldSet { n: n as u32, bits: 0 }
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_WORLDS);
        WorldSet { n: n as u32, bits: universe_mask(n as u32) }
    }

    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!(n <= MAX_WORLDS);
        debug_assert_eq!(bits & !universe_mask(n as u32), 0);
        WorldSet { n: n as u32, bits }
    }

    pub fn from_worlds(n: usize, worlds: impl IntoIterator<Item = usize>) -> Self {
        let mut s = WorldSet::empty(n);
        for w in worlds {
            assert!(w < n);
            s.bits |= 1 << w;
        }
        s
    }

    pub fn universe_size(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn contains(&self, w: usize) -> bool {
        w < self.n as usize && self.bits & (1 << w) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn union(&self, other: WorldSet) -> WorldSet {
        debug_assert_eq!(self.n, other.n);
        WorldSet { n: self.n, bits: self.bits | other.bits }
    }

    pub fn inter(&self, other: WorldSet) -> WorldSet {
        debug_assert_eq!(self.n, other.n);
        WorldSet { n: self.n, bits: self.bits & other.bits }
    }

    pub fn diff(&self, other: WorldSet) -> WorldSet {
        debug_assert_eq!(self.n, other.n);
        WorldSet { n: self.n, bits: self.bits & !other.bits }
    }

    pub fn complement(&self) -> WorldSet {
        WorldSet { n: self.n, bits: !self.bits & universe_mask(self.n) }
    }

    pub fn is_subset(&self, other: WorldSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.bits & !other.bits == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n as usize).filter(|w| self.bits & (1 << w) != 0)
    }

    /// Permute the underlying worlds: world `w` of the result is world
    /// `perm[w]`... more precisely, `w ∈ result ⟺ perm claims w`, i.e.
    /// `result = { perm[w] : w ∈ self }`.
    pub fn apply_perm(&self, perm: &[usize]) -> WorldSet {
        debug_assert_eq!(perm.len(), self.n as usize);
        let mut bits = 0u64;
        for w in self.iter() {
            bits |= 1 << perm[w];
        }
        WorldSet { n: self.n, bits }
    }
}

/// A binary relation on `0..n`, stored as one successor bitmask per world:
/// bit `v` of `row(w)` is set iff `w R v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    rows: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_WORLDS);
        Relation { n, rows: vec![0; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Relation::empty(n);
        for w in 0..n {
            r.rows[w] |= 1 << w;
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut r = Relation::empty(n);
        for &(a, b) in pairs {
            assert!(a < n && b < n);
            r.rows[a] |= 1 << b;
        }
        r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.rows[a] & (1 << b) != 0
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        assert!(a < self.n && b < self.n);
        self.rows[a] |= 1 << b;
    }

    /// Successors of `a`: `{b : a R b}`.
    pub fn row(&self, a: usize) -> u64 {
        self.rows[a]
    }

    /// Predecessors of `b`: `{a : a R b}`.
    pub fn col(&self, b: usize) -> u64 {
        let mut m = 0u64;
        for a in 0..self.n {
            if self.rows[a] & (1 << b) != 0 {
                m |= 1 << a;
            }
        }
        m
    }

    pub(crate) fn cols(&self) -> Vec<u64> {
        (0..self.n).map(|b| self.col(b)).collect()
    }

    /// All pairs in row-major (lexicographic) order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if self.rows[a] & (1 << b) != 0 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn count_pairs(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|w| self.rows[w] & (1 << w) != 0)
    }

    pub fn is_transitive(&self) -> bool {
        for a in 0..self.n {
            let mut reach = self.rows[a];
            let mut todo = reach;
            while todo != 0 {
                let b = todo.trailing_zeros() as usize;
                todo &= todo - 1;
                reach |= self.rows[b];
            }
            if reach & !self.rows[a] != 0 {
                return false;
            }
        }
        true
    }

    /// Reflexive-transitive closure; the second component counts pairs added.
    pub fn reflexive_transitive_closure(&self) -> (Relation, usize) {
        let before = self.count_pairs();
        let mut rows = self.rows.clone();
        for w in 0..self.n {
            rows[w] |= 1 << w;
        }
        // Warshall, on mask rows.
        for k in 0..self.n {
            for a in 0..self.n {
                if rows[a] & (1 << k) != 0 {
                    rows[a] |= rows[k];
                }
            }
        }
        let closed = Relation { n: self.n, rows };
        let added = closed.count_pairs() - before;
        (closed, added)
    }

    /// Is `set` closed under successors of this relation?
    pub fn up_closed(&self, set: WorldSet) -> bool {
        debug_assert_eq!(set.universe_size(), self.n);
        for w in set.iter() {
            if self.rows[w] & !set.bits() != 0 {
                return false;
            }
        }
        true
    }

    /// All up-closed sets, in ascending bitmask order.
    pub fn up_sets(&self) -> Vec<WorldSet> {
        assert!(self.n <= 20, "up-set enumeration is exponential in the world count");
        let mut out = Vec::new();
        for bits in 0..(1u64 << self.n) {
            let s = WorldSet::from_bits(self.n, bits);
            if self.up_closed(s) {
                out.push(s);
            }
        }
        out
    }

    /// Pack into a single word, bit `a*n + b` for the pair `(a, b)`.
    /// Requires `n*n <= 64`.
    pub fn encode(&self) -> u64 {
        assert!(self.n * self.n <= 64);
        let mut code = 0u64;
        for a in 0..self.n {
            code |= self.rows[a] << (a * self.n);
        }
        code
    }

    pub fn decode(n: usize, code: u64) -> Relation {
        assert!(n * n <= 64);
        let mask = universe_mask(n as u32);
        let rows = (0..n).map(|a| (code >> (a * n)) & mask).collect();
        Relation { n, rows }
    }

    /// Rename worlds: `a R b` in the result iff `perm⁻¹(a) R perm⁻¹(b)` in
    /// `self`; that is, pair `(a, b)` maps to `(perm[a], perm[b])`.
    pub fn apply_perm(&self, perm: &[usize]) -> Relation {
        debug_assert_eq!(perm.len(), self.n);
        let mut r = Relation::empty(self.n);
        for a in 0..self.n {
            let mut row = self.rows[a];
            while row != 0 {
                let b = row.trailing_zeros() as usize;
                row &= row - 1;
                r.rows[perm[a]] |= 1 << perm[b];
            }
        }
        r
    }
}

/// The frame conditions a strict model must satisfy, plus the two preorder
/// axioms for ≤ (checked first, reported as their own classes).
///
/// Writing R for ⌢ and S for ⌣ (pairs `(a, b)` meaning `a R b`):
///
/// * `CompatBNegR` (fc-b>): w ≤ w′ ∧ v S w ⟹ ∃v′ (v′ S w′ ∧ v′ ≤ v)
/// * `CompatWNegR` (fc-w>): w ≤ w′ ∧ v′ R w′ ⟹ ∃v (v R w ∧ v′ ≤ v)
/// * `CompatBNegL` (fc-b<): w ≤ w′ ∧ w′ R v′ ⟹ ∃v (w R v ∧ v′ ≤ v)
/// * `CompatWNegL` (fc-w<): w ≤ w′ ∧ w S v ⟹ ∃v′ (w′ S v′ ∧ v′ ≤ v)
///
/// Each is the weakest confluence condition making the matching connective's
/// clause preserve up-closure of extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrameCondition {
    Reflexivity,
    Transitivity,
    CompatBNegR,
    CompatWNegR,
    CompatBNegL,
    CompatWNegL,
}

impl fmt::Display for FrameCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FrameCondition::Reflexivity => "reflexivity",
            FrameCondition::Transitivity => "transitivity",
            FrameCondition::CompatBNegR => "fc-b>",
            FrameCondition::CompatWNegR => "fc-w>",
            FrameCondition::CompatBNegL => "fc-b<",
            FrameCondition::CompatWNegL => "fc-w<",
        };
        write!(f, "{s}")
    }
}

/// One failed frame-condition instance: the condition and the worlds
/// witnessing the failure (one world for reflexivity, three otherwise —
/// for the compatibility conditions `[w, w′, v]` in the order the condition
/// quantifies them).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameViolation {
    pub condition: FrameCondition,
    pub worlds: Vec<usize>,
}

impl fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at (", self.condition)?;
        for (i, w) in self.worlds.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

/// Collect every frame-condition violation, in condition order then
/// lexicographic world order. Violations are data, not errors.
pub(crate) fn frame_violations(leq: &Relation, frown: &Relation, smile: &Relation) -> Vec<FrameViolation> {
    let n = leq.n();
    let mut out = Vec::new();
    for w in 0..n {
        if !leq.contains(w, w) {
            out.push(FrameViolation { condition: FrameCondition::Reflexivity, worlds: vec![w] });
        }
    }
    for w in 0..n {
        for v in 0..n {
            if !leq.contains(w, v) {
                continue;
            }
            for u in 0..n {
                if leq.contains(v, u) && !leq.contains(w, u) {
                    out.push(FrameViolation {
                        condition: FrameCondition::Transitivity,
                        worlds: vec![w, v, u],
                    });
                }
            }
        }
    }
    let leq_cols = leq.cols();
    let frown_cols = frown.cols();
    let smile_cols = smile.cols();
    let each_leq_pair = |f: &mut dyn FnMut(usize, usize)| {
        for w in 0..n {
            for w2 in 0..n {
                if w2 != w && leq.contains(w, w2) {
                    f(w, w2);
                }
            }
        }
    };
    // fc-b>: v ⌣ w must survive upward as some v′ ⌣ w′ with v′ ≤ v.
    each_leq_pair(&mut |w, w2| {
        let mut vs = smile_cols[w];
        while vs != 0 {
            let v = vs.trailing_zeros() as usize;
            vs &= vs - 1;
            if smile_cols[w2] & leq_cols[v] == 0 {
                out.push(FrameViolation {
                    condition: FrameCondition::CompatBNegR,
                    worlds: vec![w, w2, v],
                });
            }
        }
    });
    // fc-w>: v′ ⌢ w′ must be reflected below as some v ⌢ w with v′ ≤ v.
    each_leq_pair(&mut |w, w2| {
        let mut vs = frown_cols[w2];
        while vs != 0 {
            let v2 = vs.trailing_zeros() as usize;
            vs &= vs - 1;
            if frown_cols[w] & leq.row(v2) == 0 {
                out.push(FrameViolation {
                    condition: FrameCondition::CompatWNegR,
                    worlds: vec![w, w2, v2],
                });
            }
        }
    });
    // fc-b<: w′ ⌢ v′ must be reflected below as some w ⌢ v with v′ ≤ v.
    each_leq_pair(&mut |w, w2| {
        let mut vs = frown.row(w2);
        while vs != 0 {
            let v2 = vs.trailing_zeros() as usize;
            vs &= vs - 1;
            if frown.row(w) & leq.row(v2) == 0 {
                out.push(FrameViolation {
                    condition: FrameCondition::CompatBNegL,
                    worlds: vec![w, w2, v2],
                });
            }
        }
    });
    // fc-w<: w ⌣ v must survive upward as some w′ ⌣ v′ with v′ ≤ v.
    each_leq_pair(&mut |w, w2| {
        let mut vs = smile.row(w);
        while vs != 0 {
            let v = vs.trailing_zeros() as usize;
            vs &= vs - 1;
            if smile.row(w2) & leq_cols[v] == 0 {
                out.push(FrameViolation {
                    condition: FrameCondition::CompatWNegL,
                    worlds: vec![w, w2, v],
                });
            }
        }
    });
    // The closures above push per condition in (w, w2, v) order already;
    // regroup by condition without disturbing that order.
    out.sort_by_key(|v| v.condition);
    out
}

/// Fast strictness test (assumes `leq` is already a preorder): true iff the
/// four compatibility conditions hold. Used in enumeration inner loops.
pub(crate) fn is_strict_frame(leq: &Relation, frown: &Relation, smile: &Relation) -> bool {
    let n = leq.n();
    let leq_cols = leq.cols();
    let frown_cols = frown.cols();
    let smile_cols = smile.cols();
    for w in 0..n {
        let mut ups = leq.row(w) & !(1 << w);
        while ups != 0 {
            let w2 = ups.trailing_zeros() as usize;
            ups &= ups - 1;
            let mut vs = smile_cols[w];
            while vs != 0 {
                let v = vs.trailing_zeros() as usize;
                vs &= vs - 1;
                if smile_cols[w2] & leq_cols[v] == 0 {
                    return false;
                }
            }
            let mut vs = frown_cols[w2];
            while vs != 0 {
                let v2 = vs.trailing_zeros() as usize;
                vs &= vs - 1;
                if frown_cols[w] & leq.row(v2) == 0 {
                    return false;
                }
            }
            let mut vs = frown.row(w2);
            while vs != 0 {
                let v2 = vs.trailing_zeros() as usize;
                vs &= vs - 1;
                if frown.row(w) & leq.row(v2) == 0 {
                    return false;
                }
            }
            let mut vs = smile.row(w);
            while vs != 0 {
                let v = vs.trailing_zeros() as usize;
                vs &= vs - 1;
                if smile.row(w2) & leq_cols[v] == 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// Model construction / load failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("model has no worlds")]
    EmptyWorlds,
    #[error("model has {0} worlds; at most {MAX_WORLDS} are supported")]
    TooManyWorlds(usize),
    #[error("duplicate world name '{0}'")]
    DuplicateWorld(String),
    #[error("unknown world name '{0}'")]
    UnknownWorld(String),
    #[error("valuation of '{atom}' is not up-closed: {from} <= {to} but {to} is missing")]
    ValuationNotUpClosed { atom: String, from: String, to: String },
    #[error("bad model JSON: {0}")]
    Json(String),
}

/// The JSON wire form of a model. Relation entries are name pairs `[a, b]`
/// meaning `a R b`; `leq` entries are *generators* — the reflexive-transitive
/// closure is applied on load and the number of added pairs reported.
/// The `strict` field is advisory on input (the model's strictness is always
/// computed from the relations; callers can compare and warn on mismatch);
/// on output it always carries the computed flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub worlds: Vec<String>,
    #[serde(default)]
    pub leq: Vec<(String, String)>,
    #[serde(default)]
    pub frown: Vec<(String, String)>,
    #[serde(default)]
    pub smile: Vec<(String, String)>,
    #[serde(default)]
    pub val: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
}

/// A finite model. Immutable after construction; the constructor closes ≤
/// reflexively-transitively, validates valuation up-closure, and records
/// whether the frame conditions hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    names: Vec<String>,
    leq: Relation,
    frown: Relation,
    smile: Relation,
    val: BTreeMap<String, WorldSet>,
    strict: bool,
}

impl KripkeModel {
    /// Build a model. `leq` is closed reflexively-transitively (the count of
    /// added pairs is returned); valuations must be up-closed for the closed
    /// order. Frame conditions are computed, not required — see
    /// [`KripkeModel::is_strict`].
    pub fn new(
        names: Vec<String>,
        leq: Relation,
        frown: Relation,
        smile: Relation,
        val: BTreeMap<String, WorldSet>,
    ) -> Result<(Self, usize), ModelError> {
        let n = names.len();
        if n == 0 {
            return Err(ModelError::EmptyWorlds);
        }
        if n > MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(n));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(ModelError::DuplicateWorld(name.clone()));
            }
        }
        assert_eq!(leq.n(), n);
        assert_eq!(frown.n(), n);
        assert_eq!(smile.n(), n);
        let (leq, added) = leq.reflexive_transitive_closure();
        for (atom, set) in &val {
            debug_assert_eq!(set.universe_size(), n);
            for w in set.iter() {
                let missing = leq.row(w) & !set.bits();
                if missing != 0 {
                    let to = missing.trailing_zeros() as usize;
                    return Err(ModelError::ValuationNotUpClosed {
                        atom: atom.clone(),
                        from: names[w].clone(),
                        to: names[to].clone(),
                    });
                }
            }
        }
        let strict = is_strict_frame(&leq, &frown, &smile);
        Ok((KripkeModel { names, leq, frown, smile, val, strict }, added))
    }

    /// Fast path for the enumerator: all invariants (closed preorder,
    /// up-closed valuations, the given strictness) hold by construction.
    pub(crate) fn assemble(
        names: Vec<String>,
        leq: Relation,
        frown: Relation,
        smile: Relation,
        val: BTreeMap<String, WorldSet>,
        strict: bool,
    ) -> Self {
        debug_assert!(leq.is_reflexive() && leq.is_transitive());
        debug_assert!(val.values().all(|s| leq.up_closed(*s)));
        debug_assert_eq!(strict, is_strict_frame(&leq, &frown, &smile));
        KripkeModel { names, leq, frown, smile, val, strict }
    }

    pub(crate) fn default_names(n: usize) -> Vec<String> {
        (0..n).map(|w| format!("w{w}")).collect()
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, w: usize) -> &str {
        &self.names[w]
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn leq(&self) -> &Relation {
        &self.leq
    }

    pub fn frown(&self) -> &Relation {
        &self.frown
    }

    pub fn smile(&self) -> &Relation {
        &self.smile
    }

    pub fn valuation(&self) -> &BTreeMap<String, WorldSet> {
        &self.val
    }

    /// The valuation of an atom; atoms without an entry are empty (an
    /// up-closed set, so countermodel search can vary the atom inventory
    /// freely).
    pub fn atom(&self, name: &str) -> WorldSet {
        self.val.get(name).copied().unwrap_or_else(|| WorldSet::empty(self.n()))
    }

    /// True iff ≤ is a preorder (guaranteed here) and FC1–FC4 hold.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Same frame and names, different valuation.
    pub fn with_valuation(&self, val: BTreeMap<String, WorldSet>) -> Result<Self, ModelError> {
        let (m, added) = KripkeModel::new(
            self.names.clone(),
            self.leq.clone(),
            self.frown.clone(),
            self.smile.clone(),
            val,
        )?;
        debug_assert_eq!(added, 0);
        Ok(m)
    }

    pub fn check_frame_conditions(&self) -> Vec<FrameViolation> {
        frame_violations(&self.leq, &self.frown, &self.smile)
    }

    /// All ≤-up-closed world sets, ascending by bitmask.
    pub fn up_sets(&self) -> Vec<WorldSet> {
        self.leq.up_sets()
    }

    // The pointwise clauses, as set operators. These are also the raw
    // material the complex algebra lifts.

    pub fn imp_set(&self, a: WorldSet, b: WorldSet) -> WorldSet {
        let bad = a.bits() & !b.bits();
        let mut bits = 0u64;
        for w in 0..self.n() {
            if self.leq.row(w) & bad == 0 {
                bits |= 1 << w;
            }
        }
        WorldSet::from_bits(self.n(), bits)
    }

    pub fn excl_set(&self, a: WorldSet, b: WorldSet) -> WorldSet {
        let good = a.bits() & !b.bits();
        let mut bits = 0u64;
        for w in 0..self.n() {
            if self.leq.col(w) & good != 0 {
                bits |= 1 << w;
            }
        }
        WorldSet::from_bits(self.n(), bits)
    }

    pub fn bnegr_set(&self, a: WorldSet) -> WorldSet {
        let out = !a.bits();
        let mut bits = 0u64;
        for w in 0..self.n() {
            if self.smile.col(w) & out != 0 {
                bits |= 1 << w;
            }
        }
        WorldSet::from_bits(self.n(), bits)
    }

    pub fn wnegr_set(&self, a: WorldSet) -> WorldSet {
        let mut bits = 0u64;
        for w in 0..self.n() {
            if self.frown.col(w) & a.bits() == 0 {
                bits |= 1 << w;
            }
        }
        WorldSet::from_bits(self.n(), bits)
    }

    pub fn bnegl_set(&self, a: WorldSet) -> WorldSet {
        let mut bits = 0u64;
        for w in 0..self.n() {
            if self.frown.row(w) & a.bits() == 0 {
                bits |= 1 << w;
            }
        }
        WorldSet::from_bits(self.n(), bits)
    }

    pub fn wnegl_set(&self, a: WorldSet) -> WorldSet {
        let out = !a.bits();
        let mut bits = 0u64;
        for w in 0..self.n() {
            if self.smile.row(w) & out != 0 {
                bits |= 1 << w;
            }
        }
        WorldSet::from_bits(self.n(), bits)
    }

    /// The extension `[f]`, by structural recursion over distinct
    /// subformulas.
    pub fn extension(&self, f: &Formula) -> WorldSet {
        let n = self.n();
        let subs = f.subformulas();
        let mut table: HashMap<&Formula, WorldSet> = HashMap::with_capacity(subs.len());
        for sub in subs {
            let set = match sub {
                Formula::Atom(name) => self.atom(name),
                Formula::Top => WorldSet::full(n),
                Formula::Bot => WorldSet::empty(n),
                Formula::And(a, b) => table[&**a].inter(table[&**b]),
                Formula::Or(a, b) => table[&**a].union(table[&**b]),
                Formula::Imp(a, b) => self.imp_set(table[&**a], table[&**b]),
                Formula::Excl(a, b) => self.excl_set(table[&**a], table[&**b]),
                Formula::BNegR(a) => self.bnegr_set(table[&**a]),
                Formula::BNegL(a) => self.bnegl_set(table[&**a]),
                Formula::WNegR(a) => self.wnegr_set(table[&**a]),
                Formula::WNegL(a) => self.wnegl_set(table[&**a]),
            };
            table.insert(sub, set);
        }
        table[f]
    }

    /// `w ∈ [f]`. Panics if `w` is out of range.
    pub fn satisfies(&self, w: usize, f: &Formula) -> bool {
        assert!(w < self.n(), "world index {w} out of range");
        self.extension(f).contains(w)
    }

    /// `[f] = W`.
    pub fn valid_on(&self, f: &Formula) -> bool {
        self.extension(f) == WorldSet::full(self.n())
    }

    /// Is `[f]` up-closed? Guaranteed true on strict models.
    pub fn persistent(&self, f: &Formula) -> bool {
        self.leq.up_closed(self.extension(f))
    }

    /// Render a world set with this model's names: `{w0, w1}`.
    pub fn format_set(&self, s: WorldSet) -> String {
        let mut out = String::from("{");
        for (i, w) in s.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&self.names[w]);
        }
        out.push('}');
        out
    }

    /// Load from the wire form. Returns the model and the number of pairs
    /// the ≤ closure added.
    pub fn from_doc(doc: &ModelDoc) -> Result<(Self, usize), ModelError> {
        let n = doc.worlds.len();
        if n == 0 {
            return Err(ModelError::EmptyWorlds);
        }
        if n > MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(n));
        }
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, name) in doc.worlds.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(ModelError::DuplicateWorld(name.clone()));
            }
        }
        let resolve = |name: &str| -> Result<usize, ModelError> {
            index.get(name).copied().ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
        };
        let relation = |pairs: &[(String, String)]| -> Result<Relation, ModelError> {
            let mut r = Relation::empty(n);
            for (a, b) in pairs {
                r.insert(resolve(a)?, resolve(b)?);
            }
            Ok(r)
        };
        let leq = relation(&doc.leq)?;
        let frown = relation(&doc.frown)?;
        let smile = relation(&doc.smile)?;
        let mut val = BTreeMap::new();
        for (atom, worlds) in &doc.val {
            let mut set = WorldSet::empty(n);
            for w in worlds {
                set = set.union(WorldSet::from_worlds(n, [resolve(w)?]));
            }
            val.insert(atom.clone(), set);
        }
        let (model, added) = KripkeModel::new(doc.worlds.clone(), leq, frown, smile, val)?;
        Ok((model, added))
    }

    /// Parse a JSON model document.
    pub fn from_json(text: &str) -> Result<(Self, usize), ModelError> {
        let doc: ModelDoc = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        KripkeModel::from_doc(&doc)
    }

    /// The wire form. ≤ is emitted as its non-reflexive pairs (the closure
    /// adds nothing back); `strict` carries the computed flag.
    pub fn to_doc(&self) -> ModelDoc {
        let name_pairs = |r: &Relation, skip_reflexive: bool| {
            r.pairs()
                .into_iter()
                .filter(|&(a, b)| !(skip_reflexive && a == b))
                .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect()
        };
        ModelDoc {
            worlds: self.names.clone(),
            leq: name_pairs(&self.leq, true),
            frown: name_pairs(&self.frown, false),
            smile: name_pairs(&self.smile, false),
            val: self
                .val
                .iter()
                .map(|(atom, set)| {
                    (atom.clone(), set.iter().map(|w| self.names[w].clone()).collect())
                })
                .collect(),
            strict: Some(self.strict),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("model doc serializes")
    }

    /// DOT digraph: solid edges for non-reflexive ≤, dashed for ⌢, dotted
    /// for ⌣; node labels list the atoms true at the world.
    pub fn to_dot(&self) -> String {
        fn escape(s: &str) -> String {
            s.replace('\\', "\\\\").replace('"', "\\\"")
        }
        let mut out = String::from("digraph model {\n  rankdir=BT;\n");
        for w in 0..self.n() {
            let atoms: Vec<&str> = self
                .val
                .iter()
                .filter(|(_, set)| set.contains(w))
                .map(|(atom, _)| atom.as_str())
                .collect();
            let label = if atoms.is_empty() {
                escape(&self.names[w])
            } else {
                format!("{}\\n{}", escape(&self.names[w]), escape(&atoms.join(" ")))
            };
            out.push_str(&format!("  n{w} [label=\"{label}\"];\n"));
        }
        for (a, b) in self.leq.pairs() {
            if a != b {
                out.push_str(&format!("  n{a} -> n{b} [style=solid];\n"));
            }
        }
        for (a, b) in self.frown.pairs() {
            out.push_str(&format!("  n{a} -> n{b} [style=dashed];\n"));
        }
        for (a, b) in self.smile.pairs() {
            out.push_str(&format!("  n{a} -> n{b} [style=dotted];\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn set(n: usize, worlds: &[usize]) -> WorldSet {
        WorldSet::from_worlds(n, worlds.iter().copied())
    }

    /// 2-chain 0 ≤ 1, empty tense relations, p true at the top.
    fn m1() -> KripkeModel {
        let (m, _) = KripkeModel::new(
            KripkeModel::default_names(2),
            Relation::from_pairs(2, &[(0, 1)]),
            Relation::empty(2),
            Relation::empty(2),
            BTreeMap::from([("p".to_string(), set(2, &[1]))]),
        )
        .unwrap();
        m
    }

    /// Identity order, 0 ⌣ 1, p empty.
    fn m2() -> KripkeModel {
        let (m, _) = KripkeModel::new(
            KripkeModel::default_names(2),
            Relation::identity(2),
            Relation::empty(2),
            Relation::from_pairs(2, &[(0, 1)]),
            BTreeMap::from([("p".to_string(), set(2, &[]))]),
        )
        .unwrap();
        m
    }

    /// Identity order, 0 ⌢ 1, p true at 0.
    fn m3() -> KripkeModel {
        let (m, _) = KripkeModel::new(
            KripkeModel::default_names(2),
            Relation::identity(2),
            Relation::from_pairs(2, &[(0, 1)]),
            Relation::empty(2),
            BTreeMap::from([("p".to_string(), set(2, &[0]))]),
        )
        .unwrap();
        m
    }

    #[test]
    fn closure_counts_added_pairs() {
        // Generators {0≤1, 1≤2}: closure adds 3 reflexive pairs and 0≤2.
        let r = Relation::from_pairs(3, &[(0, 1), (1, 2)]);
        let (c, added) = r.reflexive_transitive_closure();
        assert_eq!(added, 4);
        assert!(c.is_reflexive() && c.is_transitive());
        assert!(c.contains(0, 2));
    }

    #[test]
    fn m1_extensions() {
        let m = m1();
        assert_eq!(m.extension(&parse("p").unwrap()), set(2, &[1]));
        assert_eq!(m.extension(&parse("~~p").unwrap()), set(2, &[0, 1]));
        assert_eq!(m.extension(&parse("p -> ~~p").unwrap()), set(2, &[0, 1]));
        assert_eq!(m.extension(&parse("~~p -> p").unwrap()), set(2, &[1]));
        assert!(m.valid_on(&parse("p -> ~~p").unwrap()));
        assert!(!m.valid_on(&parse("~~p -> p").unwrap()));
        assert!(m.satisfies(0, &parse("~~p").unwrap()));
        assert!(!m.satisfies(0, &parse("p").unwrap()));
        assert!(!m.satisfies(0, &parse("F").unwrap()));
        assert!(m.persistent(&parse("~~p").unwrap()));
        assert!(m.is_strict());
    }

    #[test]
    fn m2_and_m3_extensions() {
        let m = m2();
        assert_eq!(m.extension(&parse("b> p").unwrap()), set(2, &[1]));
        let m = m3();
        assert_eq!(m.extension(&parse("w> p").unwrap()), set(2, &[0]));
        assert_eq!(m.extension(&parse("b< p").unwrap()), set(2, &[0, 1]));
        // Hand-computed composites on M3.
        assert_eq!(m.extension(&parse("b< w> p").unwrap()), set(2, &[0, 1]));
        assert_eq!(m.extension(&parse("w> b< p").unwrap()), set(2, &[0]));
    }

    #[test]
    fn extension_of_constants() {
        let m = m1();
        assert_eq!(m.extension(&Formula::Top), WorldSet::full(2));
        assert_eq!(m.extension(&Formula::Bot), WorldSet::empty(2));
        // Missing atoms evaluate to the empty set.
        assert_eq!(m.extension(&parse("q").unwrap()), WorldSet::empty(2));
    }

    #[test]
    fn exclusion_clause() {
        // On the 2-chain with p at the top: p -< p = {}, p -< F = {1},
        // T -< p = everything some predecessor puts outside p = {0, 1}.
        let m = m1();
        assert_eq!(m.extension(&parse("p -< p").unwrap()), set(2, &[]));
        assert_eq!(m.extension(&parse("p -< F").unwrap()), set(2, &[1]));
        assert_eq!(m.extension(&parse("T -< p").unwrap()), set(2, &[0, 1]));
    }

    #[test]
    fn identity_order_passes_frame_conditions() {
        for m in [m2(), m3()] {
            assert_eq!(m.check_frame_conditions(), vec![]);
            assert!(m.is_strict());
        }
    }

    #[test]
    fn frame_condition_violations_are_exact() {
        // Chain 0≤1 with 0 ⌣ 0 only: lifting 0 ⌣ 0 along 0 ≤ 1 needs some
        // v′ ⌣ 1 (fc-b>) and some 1 ⌣ v′ (fc-w<); neither exists.
        let (m, _) = KripkeModel::new(
            KripkeModel::default_names(2),
            Relation::from_pairs(2, &[(0, 1)]),
            Relation::empty(2),
            Relation::from_pairs(2, &[(0, 0)]),
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(
            m.check_frame_conditions(),
            vec![
                FrameViolation { condition: FrameCondition::CompatBNegR, worlds: vec![0, 1, 0] },
                FrameViolation { condition: FrameCondition::CompatWNegL, worlds: vec![0, 1, 0] },
            ]
        );
        assert!(!m.is_strict());

        // Adding 0 ⌣ 1 settles fc-b> (v′ = 0 ⌣ 1 with 0 ≤ 0) but not
        // fc-w<, which wants ⌣-successors of world 1 itself.
        let (m, _) = KripkeModel::new(
            KripkeModel::default_names(2),
            Relation::from_pairs(2, &[(0, 1)]),
            Relation::empty(2),
            Relation::from_pairs(2, &[(0, 0), (0, 1)]),
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(
            m.check_frame_conditions(),
            vec![
                FrameViolation { condition: FrameCondition::CompatWNegL, worlds: vec![0, 1, 0] },
                FrameViolation { condition: FrameCondition::CompatWNegL, worlds: vec![0, 1, 1] },
            ]
        );

        // Symmetrically on ⌢: chain with 1 ⌢ 1 only violates fc-w> and
        // fc-b< at (0, 1, 1): nothing relates to (or from) world 0.
        let (m, _) = KripkeModel::new(
            KripkeModel::default_names(2),
            Relation::from_pairs(2, &[(0, 1)]),
            Relation::from_pairs(2, &[(1, 1)]),
            Relation::empty(2),
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(
            m.check_frame_conditions(),
            vec![
                FrameViolation { condition: FrameCondition::CompatWNegR, worlds: vec![0, 1, 1] },
                FrameViolation { condition: FrameCondition::CompatBNegL, worlds: vec![0, 1, 1] },
            ]
        );
    }

    #[test]
    fn preorder_violations_reported_first() {
        let m = KripkeModel::assemble(
            KripkeModel::default_names(2),
            Relation::identity(2),
            Relation::empty(2),
            Relation::empty(2),
            BTreeMap::new(),
            true,
        );
        // Violations come from raw relations, bypassing the closing
        // constructor on purpose.
        let raw = Relation::from_pairs(3, &[(0, 1), (1, 2)]);
        let vs = frame_violations(&raw, &Relation::empty(3), &Relation::empty(3));
        assert_eq!(vs[0].condition, FrameCondition::Reflexivity);
        assert_eq!(vs[0].worlds, vec![0]);
        assert!(vs.iter().any(|v| v.condition == FrameCondition::Transitivity
            && v.worlds == vec![0, 1, 2]));
        drop(m);
    }

    #[test]
    fn persistence_can_fail_without_frame_conditions() {
        // Chain 0≤1 with 1 ⌣ 0 and p = {0}: b> p = {0}, not up-closed.
        let (m, _) = KripkeModel::new(
            KripkeModel::default_names(2),
            Relation::from_pairs(2, &[(0, 1)]),
            Relation::empty(2),
            Relation::from_pairs(2, &[(1, 0)]),
            BTreeMap::from([("p".to_string(), set(2, &[0, 1]))]),
        )
        .unwrap();
        assert!(!m.is_strict());
        // With p = W the extension is empty and persistence holds anyway.
        assert_eq!(m.extension(&parse("b> p").unwrap()), set(2, &[]));
        assert!(m.persistent(&parse("b> p").unwrap()));
        // Shrinking p to {0} exposes the failure (valuation {0} is not
        // up-closed, so evaluate through the raw sets instead).
        let a = set(2, &[0]);
        let bneg = m.bnegr_set(a);
        assert_eq!(bneg, set(2, &[0]));
        assert!(!m.leq().up_closed(bneg));
    }

    #[test]
    fn valuations_must_be_up_closed() {
        let err = KripkeModel::new(
            KripkeModel::default_names(2),
            Relation::from_pairs(2, &[(0, 1)]),
            Relation::empty(2),
            Relation::empty(2),
            BTreeMap::from([("p".to_string(), set(2, &[0]))]),
        )
        .unwrap_err();
        assert_eq!(
            err,
            ModelError::ValuationNotUpClosed {
                atom: "p".to_string(),
                from: "w0".to_string(),
                to: "w1".to_string(),
            }
        );
    }

    #[test]
    fn doc_roundtrip() {
        for m in [m1(), m2(), m3()] {
            let doc = m.to_doc();
            let (back, added) = KripkeModel::from_doc(&doc).unwrap();
            assert_eq!(back, m);
            // Emitted ≤ skips reflexive pairs; the load closure re-adds
            // exactly those.
            assert_eq!(added, m.n());
        }
        let json = m1().to_json();
        let (back, _) = KripkeModel::from_json(&json).unwrap();
        assert_eq!(back, m1());
        assert!(json.contains("\"strict\":true"));
    }

    #[test]
    fn wire_example_loads() {
        let text = r#"{"worlds":["w0","w1"],"leq":[["w0","w1"]],"frown":[],"smile":[["w0","w1"]],"val":{"p":["w1"]},"strict":true}"#;
        let (m, added) = KripkeModel::from_json(text).unwrap();
        assert_eq!(added, 2); // the two reflexive pairs
        assert_eq!(m.n(), 2);
        assert!(m.smile().contains(0, 1));
        assert_eq!(m.atom("p"), set(2, &[1]));
        // The input flag is advisory: this frame actually violates fc-w<
        // (0 ⌣ 1 cannot be lifted along 0 ≤ 1), and the computed flag wins.
        assert!(!m.is_strict());
        assert_eq!(
            m.check_frame_conditions(),
            vec![FrameViolation { condition: FrameCondition::CompatWNegL, worlds: vec![0, 1, 1] }]
        );
        assert!(m.to_json().contains("\"strict\":false"));
    }

    #[test]
    fn load_rejects_unknown_and_duplicate_worlds() {
        let text = r#"{"worlds":["a","a"],"leq":[],"frown":[],"smile":[],"val":{}}"#;
        assert_eq!(
            KripkeModel::from_json(text).unwrap_err(),
            ModelError::DuplicateWorld("a".to_string())
        );
        let text = r#"{"worlds":["a"],"leq":[["a","z"]],"frown":[],"smile":[],"val":{}}"#;
        assert_eq!(
            KripkeModel::from_json(text).unwrap_err(),
            ModelError::UnknownWorld("z".to_string())
        );
        let text = r#"{"worlds":[],"leq":[],"frown":[],"smile":[],"val":{}}"#;
        assert_eq!(KripkeModel::from_json(text).unwrap_err(), ModelError::EmptyWorlds);
    }

    #[test]
    fn up_sets_ascending() {
        let m = m1();
        assert_eq!(
            m.up_sets(),
            vec![set(2, &[]), set(2, &[1]), set(2, &[0, 1])]
        );
        let m = m2();
        assert_eq!(m.up_sets().len(), 4);
    }

    #[test]
    fn format_set_uses_names() {
        let m = m1();
        assert_eq!(m.format_set(set(2, &[])), "{}");
        assert_eq!(m.format_set(set(2, &[0, 1])), "{w0, w1}");
    }

    #[test]
    fn dot_output() {
        let dot = m1().to_dot();
        assert_eq!(
            dot,
            "digraph model {\n  rankdir=BT;\n  n0 [label=\"w0\"];\n  n1 [label=\"w1\\np\"];\n  n0 -> n1 [style=solid];\n}\n"
        );
        assert!(m2().to_dot().contains("n0 -> n1 [style=dotted];"));
        assert!(m3().to_dot().contains("n0 -> n1 [style=dashed];"));
    }

    #[test]
    fn relation_encode_decode_permute() {
        let r = Relation::from_pairs(2, &[(0, 1), (1, 1)]);
        assert_eq!(Relation::decode(2, r.encode()), r);
        // Swapping the worlds maps (0,1) to (1,0) and (1,1) to (0,0).
        let swapped = r.apply_perm(&[1, 0]);
        assert_eq!(swapped, Relation::from_pairs(2, &[(1, 0), (0, 0)]));
        let s = set(2, &[1]).apply_perm(&[1, 0]);
        assert_eq!(s, set(2, &[0]));
    }

    #[test]
    fn galois_and_cogalois_laws_on_hand_models() {
        // [A] ⊆ [w> B] ⟺ [B] ⊆ [b< A] and [b> B] ⊆ [A] ⟺ [w< A] ⊆ [B],
        // over every pair of up-sets of the hand models.
        for m in [m1(), m2(), m3()] {
            let ups = m.up_sets();
            for &a in &ups {
                for &b in &ups {
                    assert_eq!(
                        a.is_subset(m.wnegr_set(b)),
                        b.is_subset(m.bnegl_set(a)),
                        "Galois law failed on {:?} {:?}",
                        a,
                        b
                    );
                    assert_eq!(
                        m.bnegr_set(b).is_subset(a),
                        m.wnegl_set(a).is_subset(b),
                        "co-Galois law failed on {:?} {:?}",
                        a,
                        b
                    );
                }
            }
        }
    }
}
