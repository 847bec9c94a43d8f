//! Exhaustive enumeration of small models up to isomorphism, countermodel
//! search, batch validity scans, and the double-negation probe.
//!
//! Enumeration order is fully deterministic: world count ascending, then
//! frame triples (≤, ⌢, ⌣) ascending by encoded relation (lexicographically
//! on the triple), then valuations ascending by encoded world set in atom
//! order. A model is yielded iff its whole encoding is lexicographically
//! minimal over all world permutations, so each isomorphism class appears
//! exactly once and "first countermodel" is well-defined and minimal.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::kripke::{
    is_strict_frame, KripkeModel, ModelDoc, ModelError, Relation, WorldSet,
};
use crate::syntax::{Formula, NegationScheme, ParseError, HOLE_ATOM};

/// Exhaustive enumeration works with whole-relation encodings, so the frame
/// space is 4^(n²) and anything past five worlds is out of desk range.
pub const MAX_ENUM_WORLDS: usize = 5;

/// What to enumerate and how to probe it.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Upper bound on the world count, 1..=[`MAX_ENUM_WORLDS`].
    pub max_worlds: usize,
    /// Atom inventory for valuations, in enumeration order.
    pub atoms: Vec<String>,
    /// Keep only models whose frames satisfy the frame conditions.
    pub require_strict: bool,
    /// Negation scheme used by [`probe_dne`].
    pub scheme: NegationScheme,
    /// Cap on yielded models; hitting it ends the stream as truncated.
    pub max_models: Option<u64>,
}

impl SearchConfig {
    pub fn new(max_worlds: usize) -> Self {
        SearchConfig {
            max_worlds,
            atoms: Vec::new(),
            require_strict: false,
            scheme: NegationScheme::Heyting,
            max_models: None,
        }
    }

    pub fn atoms(mut self, atoms: impl IntoIterator<Item = impl Into<String>>) -> Self {
        self.atoms = atoms.into_iter().map(Into::into).collect();
        self
    }

    pub fn strict(mut self, yes: bool) -> Self {
        self.require_strict = yes;
        self
    }

    pub fn scheme(mut self, scheme: NegationScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn cap(mut self, max_models: Option<u64>) -> Self {
        self.max_models = max_models;
        self
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.max_worlds == 0 || self.max_worlds > MAX_ENUM_WORLDS {
            return Err(SearchError::BadMaxWorlds(self.max_worlds));
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if self.atoms[..i].contains(atom) {
                return Err(SearchError::DuplicateAtom(atom.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("max_worlds must be between 1 and {MAX_ENUM_WORLDS}, got {0}")]
    BadMaxWorlds(usize),
    #[error("duplicate atom '{0}' in search configuration")]
    DuplicateAtom(String),
    #[error("the double-negation probe requires require_strict")]
    ProbeNeedsStrict,
    #[error("the double-negation probe needs at least one atom")]
    ProbeNeedsAtoms,
}

/// Deterministic work counters. `frames` counts canonical frames that passed
/// the strictness filter and had their valuation block enumerated; `models`
/// counts models actually yielded to the consumer; `work` is the budget
/// currency — work units are models evaluated, so it equals `models`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub frames: u64,
    pub models: u64,
    pub work: u64,
}

/// How a finished stream ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamEnd {
    /// Every model within the bound was produced.
    Exhausted,
    /// The yielded-model cap was hit with models still unvisited.
    Truncated,
}

/// Lexicographic permutations of `0..n`, identity first.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Relabel an encoded relation: bit a*n+b moves to perm[a]*n+perm[b].
fn perm_code(n: usize, code: u64, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    let mut c = code;
    while c != 0 {
        let p = c.trailing_zeros() as usize;
        c &= c - 1;
        out |= 1 << (perm[p / n] * n + perm[p % n]);
    }
    out
}

/// Relabel an encoded world set: bit w moves to perm[w].
fn perm_mask(mask: u64, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let w = m.trailing_zeros() as usize;
        m &= m - 1;
        out |= 1 << perm[w];
    }
    out
}

/// All preorder relations on `0..n`, ascending by encoding.
fn preorder_codes(n: usize) -> Vec<u64> {
    let positions: Vec<usize> = (0..n * n).filter(|p| p / n != p % n).collect();
    let mut refl = 0u64;
    for w in 0..n {
        refl |= 1 << (w * n + w);
    }
    let mut out = Vec::new();
    // Mapping ascending choice bits onto ascending positions keeps the
    // resulting codes ascending.
    for k in 0u64..(1 << positions.len()) {
        let mut code = refl;
        for (i, &pos) in positions.iter().enumerate() {
            if k & (1 << i) != 0 {
                code |= 1 << pos;
            }
        }
        if Relation::decode(n, code).is_transitive() {
            out.push(code);
        }
    }
    out
}

/// The pruned model stream. See the module docs for the exact order.
pub struct ModelStream {
    atoms: Vec<String>,
    require_strict: bool,
    max_worlds: usize,
    max_models: Option<u64>,
    // Cursor; `n == 0` means not yet started.
    n: usize,
    preorders: Vec<u64>,
    perms: Vec<Vec<usize>>,
    p_idx: usize,
    rel_count: u64,
    frown_code: u64,
    smile_code: u64,
    pending: Vec<KripkeModel>,
    stats: SearchStats,
    end: Option<StreamEnd>,
}

/// Enumerate models per the configuration. The stream is lazy; its
/// [`ModelStream::outcome`] distinguishes exhaustion from truncation once
/// iteration returns `None`.
pub fn enumerate_models(cfg: &SearchConfig) -> Result<ModelStream, SearchError> {
    cfg.validate()?;
    Ok(ModelStream {
        atoms: cfg.atoms.clone(),
        require_strict: cfg.require_strict,
        max_worlds: cfg.max_worlds,
        max_models: cfg.max_models,
        n: 0,
        preorders: Vec::new(),
        perms: Vec::new(),
        p_idx: 0,
        rel_count: 0,
        frown_code: 0,
        smile_code: 0,
        pending: Vec::new(),
        stats: SearchStats::default(),
        end: None,
    })
}

impl ModelStream {
    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    /// `None` while the stream still has (or may have) models.
    pub fn outcome(&self) -> Option<StreamEnd> {
        self.end
    }

    fn init_n(&mut self) {
        self.preorders = preorder_codes(self.n);
        self.perms = permutations(self.n);
        self.p_idx = 0;
        self.rel_count = 1u64 << (self.n * self.n);
        self.frown_code = 0;
        self.smile_code = 0;
    }

    /// Is the frame lexicographically minimal over all permutations? If so,
    /// return the indices of its nontrivial stabilizer permutations.
    fn canonical_stabilizer(&self, lc: u64, fc: u64, sc: u64) -> Option<Vec<usize>> {
        let n = self.n;
        let mut stab = Vec::new();
        for (i, perm) in self.perms.iter().enumerate().skip(1) {
            let pl = perm_code(n, lc, perm);
            if pl < lc {
                return None;
            }
            if pl > lc {
                continue;
            }
            let pf = perm_code(n, fc, perm);
            if pf < fc {
                return None;
            }
            if pf > fc {
                continue;
            }
            let ps = perm_code(n, sc, perm);
            if ps < sc {
                return None;
            }
            if ps > sc {
                continue;
            }
            stab.push(i);
        }
        Some(stab)
    }

    /// Step the frame cursor to the next canonical (and, if required,
    /// strict) frame and load its valuation block. False when the world
    /// bound is exhausted.
    fn advance_frame(&mut self) -> bool {
        loop {
            if self.n == 0 {
                self.n = 1;
                self.init_n();
            } else if self.p_idx >= self.preorders.len() {
                if self.n >= self.max_worlds {
                    return false;
                }
                self.n += 1;
                self.init_n();
            }
            let (lc, fc, sc) = (self.preorders[self.p_idx], self.frown_code, self.smile_code);
            self.smile_code += 1;
            if self.smile_code == self.rel_count {
                self.smile_code = 0;
                self.frown_code += 1;
                if self.frown_code == self.rel_count {
                    self.frown_code = 0;
                    self.p_idx += 1;
                }
            }
            let Some(stab) = self.canonical_stabilizer(lc, fc, sc) else {
                continue;
            };
            let leq = Relation::decode(self.n, lc);
            let frown = Relation::decode(self.n, fc);
            let smile = Relation::decode(self.n, sc);
            let strict = is_strict_frame(&leq, &frown, &smile);
            if self.require_strict && !strict {
                continue;
            }
            self.stats.frames += 1;
            self.fill_pending(leq, frown, smile, strict, &stab);
            return true;
        }
    }

    fn fill_pending(
        &mut self,
        leq: Relation,
        frown: Relation,
        smile: Relation,
        strict: bool,
        stab: &[usize],
    ) {
        let n = self.n;
        let k = self.atoms.len();
        let ups: Vec<u64> = leq.up_sets().iter().map(|s| s.bits()).collect();
        let mut tuple_idx = vec![0usize; k];
        let mut tuple = vec![0u64; k];
        loop {
            for i in 0..k {
                tuple[i] = ups[tuple_idx[i]];
            }
            let mut reject = false;
            'stab: for &pi in stab {
                let perm = &self.perms[pi];
                for &t in tuple.iter() {
                    let pm = perm_mask(t, perm);
                    if pm < t {
                        reject = true;
                        break 'stab;
                    }
                    if pm > t {
                        continue 'stab;
                    }
                }
            }
            if !reject {
                let val: BTreeMap<String, WorldSet> = self
                    .atoms
                    .iter()
                    .zip(tuple.iter())
                    .map(|(a, &bits)| (a.clone(), WorldSet::from_bits(n, bits)))
                    .collect();
                self.pending.push(KripkeModel::assemble(
                    KripkeModel::default_names(n),
                    leq.clone(),
                    frown.clone(),
                    smile.clone(),
                    val,
                    strict,
                ));
            }
            // Odometer: last atom fastest, so tuples ascend lexicographically
            // with the first atom most significant.
            let mut i = k;
            loop {
                if i == 0 {
                    self.pending.reverse();
                    return;
                }
                i -= 1;
                tuple_idx[i] += 1;
                if tuple_idx[i] < ups.len() {
                    break;
                }
                tuple_idx[i] = 0;
            }
        }
    }
}

impl Iterator for ModelStream {
    type Item = KripkeModel;

    fn next(&mut self) -> Option<KripkeModel> {
        if self.end.is_some() {
            return None;
        }
        loop {
            if let Some(m) = self.pending.pop() {
                if let Some(cap) = self.max_models {
                    if self.stats.models >= cap {
                        self.pending.push(m);
                        self.end = Some(StreamEnd::Truncated);
                        return None;
                    }
                }
                self.stats.models += 1;
                self.stats.work += 1;
                return Some(m);
            }
            if !self.advance_frame() {
                self.end = Some(StreamEnd::Exhausted);
                return None;
            }
        }
    }
}

/// A found countermodel: where the formula fails and what it cost to find.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub model: KripkeModel,
    pub formula: Formula,
    /// The first world (lowest index) where the formula is false.
    pub world: usize,
    pub stats: SearchStats,
}

/// Wire form of the witness half of a countermodel report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub formula: String,
    pub world: String,
    pub stats: SearchStats,
}

/// Wire form of a countermodel report: the model document plus a witness
/// block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleDoc {
    pub model: ModelDoc,
    pub witness: WitnessDoc,
}

/// Report reload failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("bad formula in report: {0}")]
    Formula(#[from] ParseError),
    #[error("witness world '{0}' is not in the model")]
    UnknownWorld(String),
}

impl CounterexampleReport {
    pub fn to_doc(&self) -> CounterexampleDoc {
        CounterexampleDoc {
            model: self.model.to_doc(),
            witness: WitnessDoc {
                formula: self.formula.to_string(),
                world: self.model.name(self.world).to_string(),
                stats: self.stats,
            },
        }
    }

    pub fn from_doc(doc: &CounterexampleDoc) -> Result<Self, ReportError> {
        let (model, _) = KripkeModel::from_doc(&doc.model)?;
        let formula = crate::syntax::parse(&doc.witness.formula)?;
        let world = model
            .world_index(&doc.witness.world)
            .ok_or_else(|| ReportError::UnknownWorld(doc.witness.world.clone()))?;
        Ok(CounterexampleReport { model, formula, world, stats: doc.witness.stats })
    }
}

/// Outcome of a bounded countermodel search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountermodelOutcome {
    Found(Box<CounterexampleReport>),
    /// No countermodel exists within the bound (not a validity proof).
    Exhausted(SearchStats),
    /// The model budget ran out first.
    Truncated(SearchStats),
}

/// Find the first enumerated model and world where `f` fails.
pub fn find_countermodel(
    f: &Formula,
    cfg: &SearchConfig,
) -> Result<CountermodelOutcome, SearchError> {
    let mut stream = enumerate_models(cfg)?;
    for model in stream.by_ref() {
        let ext = model.extension(f);
        if ext != WorldSet::full(model.n()) {
            let world = ext.complement().iter().next().expect("some world fails");
            let stats = stream.stats();
            return Ok(CountermodelOutcome::Found(Box::new(CounterexampleReport {
                model,
                formula: f.clone(),
                world,
                stats,
            })));
        }
    }
    Ok(match stream.outcome() {
        Some(StreamEnd::Truncated) => CountermodelOutcome::Truncated(stream.stats()),
        _ => CountermodelOutcome::Exhausted(stream.stats()),
    })
}

/// Per-formula outcome of a [`validity_scan`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanOutcome {
    CounterModel(Box<CounterexampleReport>),
    ValidWithinBound(SearchStats),
    Truncated(SearchStats),
}

/// Batch countermodel search over one shared enumeration; each entry equals
/// what the per-formula [`find_countermodel`] call would return.
pub fn validity_scan(
    fs: &[Formula],
    cfg: &SearchConfig,
) -> Result<Vec<(Formula, ScanOutcome)>, SearchError> {
    let mut stream = enumerate_models(cfg)?;
    let mut out: Vec<Option<ScanOutcome>> = vec![None; fs.len()];
    let mut unresolved = fs.len();
    while unresolved > 0 {
        let Some(model) = stream.next() else { break };
        let full = WorldSet::full(model.n());
        for (i, f) in fs.iter().enumerate() {
            if out[i].is_some() {
                continue;
            }
            let ext = model.extension(f);
            if ext != full {
                let world = ext.complement().iter().next().expect("some world fails");
                out[i] = Some(ScanOutcome::CounterModel(Box::new(CounterexampleReport {
                    model: model.clone(),
                    formula: f.clone(),
                    world,
                    stats: stream.stats(),
                })));
                unresolved -= 1;
            }
        }
    }
    let tail = match stream.outcome() {
        Some(StreamEnd::Truncated) => ScanOutcome::Truncated(stream.stats()),
        _ => ScanOutcome::ValidWithinBound(stream.stats()),
    };
    Ok(fs
        .iter()
        .cloned()
        .zip(out.into_iter().map(|o| o.unwrap_or_else(|| tail.clone())))
        .collect())
}

/// A double-negation witness: the first model and atom (in configuration
/// order) where the scheme's image of the atom differs from the atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DneReport {
    pub scheme: NegationScheme,
    pub atom: String,
    pub model: KripkeModel,
    /// Extension of the scheme applied to the atom.
    pub neg_extension: WorldSet,
    /// Extension of the atom itself.
    pub atom_extension: WorldSet,
    /// Does `[p] ⊆ [N(p)]` hold on the witness?
    pub forward_holds: bool,
    /// Does `[N(p)] ⊆ [p]` hold on the witness?
    pub backward_holds: bool,
    /// The up-sets A of the witness model with N(A) = A, ascending. Other
    /// atoms a custom scheme mentions keep their model valuation; only the
    /// hole is rebound.
    pub fixed: Vec<WorldSet>,
    pub stats: SearchStats,
}

/// Outcome of the double-negation probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DneOutcome {
    Witness(Box<DneReport>),
    /// The scheme fixes every atom on every model within the bound.
    Exhausted(SearchStats),
    Truncated(SearchStats),
}

/// Apply the scheme to a given up-set on this model: evaluate the scheme
/// template with the hole atom bound to `a` (other atoms keep their model
/// valuation).
pub fn scheme_on_set(model: &KripkeModel, scheme: &NegationScheme, a: WorldSet) -> WorldSet {
    let mut val = model.valuation().clone();
    val.insert(HOLE_ATOM.to_string(), a);
    let bound = model
        .with_valuation(val)
        .expect("up-sets are valid valuations");
    bound.extension(&scheme.template())
}

/// Search for a strict model and atom whose double negation (under
/// `cfg.scheme`) differs from the atom. Requires `cfg.require_strict` and a
/// non-empty atom inventory.
pub fn probe_dne(cfg: &SearchConfig) -> Result<DneOutcome, SearchError> {
    if !cfg.require_strict {
        return Err(SearchError::ProbeNeedsStrict);
    }
    if cfg.atoms.is_empty() {
        return Err(SearchError::ProbeNeedsAtoms);
    }
    let mut stream = enumerate_models(cfg)?;
    for model in stream.by_ref() {
        for atom in &cfg.atoms {
            let atom_ext = model.atom(atom);
            let neg_ext = model.extension(&cfg.scheme.apply(&Formula::atom(atom.clone())));
            if neg_ext != atom_ext {
                let fixed = model
                    .up_sets()
                    .into_iter()
                    .filter(|&a| scheme_on_set(&model, &cfg.scheme, a) == a)
                    .collect();
                let stats = stream.stats();
                return Ok(DneOutcome::Witness(Box::new(DneReport {
                    scheme: cfg.scheme.clone(),
                    atom: atom.clone(),
                    forward_holds: atom_ext.is_subset(neg_ext),
                    backward_holds: neg_ext.is_subset(atom_ext),
                    neg_extension: neg_ext,
                    atom_extension: atom_ext,
                    fixed,
                    model,
                    stats,
                })));
            }
        }
    }
    Ok(match stream.outcome() {
        Some(StreamEnd::Truncated) => DneOutcome::Truncated(stream.stats()),
        _ => DneOutcome::Exhausted(stream.stats()),
    })
}

/// Wire form of a probe witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DneWitnessDoc {
    pub scheme: String,
    pub atom: String,
    pub model: ModelDoc,
    pub neg_extension: Vec<String>,
    pub atom_extension: Vec<String>,
    pub forward_holds: bool,
    pub backward_holds: bool,
    pub fixed: Vec<Vec<String>>,
    pub stats: SearchStats,
}

impl DneReport {
    pub fn to_doc(&self) -> DneWitnessDoc {
        let names = |s: WorldSet| s.iter().map(|w| self.model.name(w).to_string()).collect();
        DneWitnessDoc {
            scheme: self.scheme.to_string(),
            atom: self.atom.clone(),
            model: self.model.to_doc(),
            neg_extension: names(self.neg_extension),
            atom_extension: names(self.atom_extension),
            forward_holds: self.forward_holds,
            backward_holds: self.backward_holds,
            fixed: self.fixed.iter().map(|&s| names(s)).collect(),
            stats: self.stats,
        }
    }
}

/// Generate a random strict model with 1..=`max_worlds` worlds: a random
/// preorder (closed), random tense relations repaired to the frame
/// conditions by adding pairs, and random up-closed valuations. Driven
/// entirely by `rng`, so a seeded caller gets a reproducible model.
pub fn random_strict_model<R: Rng>(rng: &mut R, max_worlds: usize, atoms: &[String]) -> KripkeModel {
    let n = rng.gen_range(1..=max_worlds.max(1));
    let mut leq = Relation::empty(n);
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(0.3) {
                leq.insert(a, b);
            }
        }
    }
    let (leq, _) = leq.reflexive_transitive_closure();
    let mut frown = Relation::empty(n);
    let mut smile = Relation::empty(n);
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(0.25) {
                frown.insert(a, b);
            }
            if rng.gen_bool(0.25) {
                smile.insert(a, b);
            }
        }
    }
    // Repair to strictness: each violation is discharged by adding the pair
    // that satisfies its existential with v′ = v (reflexivity of ≤ makes
    // that choice always available). Pairs only get added, so this stops.
    loop {
        let violations = crate::kripke::frame_violations(&leq, &frown, &smile);
        let Some(v) = violations.first() else { break };
        let (w, w2, third) = (v.worlds[0], v.worlds[1], v.worlds[2]);
        match v.condition {
            crate::kripke::FrameCondition::CompatBNegR => smile.insert(third, w2),
            crate::kripke::FrameCondition::CompatWNegR => frown.insert(third, w),
            crate::kripke::FrameCondition::CompatBNegL => frown.insert(w, third),
            crate::kripke::FrameCondition::CompatWNegL => smile.insert(w2, third),
            _ => unreachable!("≤ is closed"),
        }
    }
    let mut val = BTreeMap::new();
    for atom in atoms {
        let mut bits = WorldSet::empty(n);
        for w in 0..n {
            if rng.gen_bool(0.4) {
                bits = bits.union(WorldSet::from_bits(n, leq.row(w)));
            }
        }
        val.insert(atom.clone(), bits);
    }
    KripkeModel::assemble(KripkeModel::default_names(n), leq, frown, smile, val, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m1_doc() -> ModelDoc {
        serde_json::from_str(
            r#"{"worlds":["w0","w1"],"leq":[["w0","w1"]],"frown":[],"smile":[],"val":{"p":["w1"]}}"#,
        )
        .unwrap()
    }

    #[test]
    fn one_world_one_atom_yields_eight_models() {
        let cfg = SearchConfig::new(1).atoms(["p"]);
        let mut stream = enumerate_models(&cfg).unwrap();
        let models: Vec<KripkeModel> = stream.by_ref().collect();
        assert_eq!(models.len(), 8);
        assert_eq!(stream.outcome(), Some(StreamEnd::Exhausted));
        assert_eq!(stream.stats().frames, 4);
        assert_eq!(stream.stats().models, 8);
        // ≤ is forced to the identity; ⌢, ⌣ range over the two one-world
        // relations; p over the two subsets.
        for m in &models {
            assert_eq!(m.n(), 1);
            assert_eq!(m.leq(), &Relation::identity(1));
        }
    }

    #[test]
    fn one_world_no_atoms_has_only_empty_valuations() {
        let cfg = SearchConfig::new(1);
        let models: Vec<KripkeModel> = enumerate_models(&cfg).unwrap().collect();
        assert_eq!(models.len(), 4);
        assert!(models.iter().all(|m| m.valuation().is_empty()));
    }

    #[test]
    fn two_world_preorders_up_to_iso() {
        // Keep only frames with both tense relations empty: the three
        // distinct 2-world preorders are the discrete order, one chain, and
        // the total preorder.
        let cfg = SearchConfig::new(2);
        let picked: Vec<KripkeModel> = enumerate_models(&cfg)
            .unwrap()
            .filter(|m| m.frown().count_pairs() == 0 && m.smile().count_pairs() == 0)
            .collect();
        let picked: Vec<&KripkeModel> = picked.iter().filter(|m| m.n() == 2).collect();
        assert_eq!(picked.len(), 3);
        assert_eq!(picked[0].leq(), &Relation::identity(2));
        assert_eq!(
            picked[1].leq(),
            &Relation::from_pairs(2, &[(0, 0), (0, 1), (1, 1)])
        );
        assert_eq!(
            picked[2].leq(),
            &Relation::from_pairs(2, &[(0, 0), (0, 1), (1, 0), (1, 1)])
        );
    }

    #[test]
    fn stream_is_deterministic() {
        let cfg = SearchConfig::new(2).atoms(["p"]).strict(true);
        let a: Vec<String> = enumerate_models(&cfg).unwrap().map(|m| m.to_json()).collect();
        let b: Vec<String> = enumerate_models(&cfg).unwrap().map(|m| m.to_json()).collect();
        assert_eq!(a, b);
        assert!(!a.is_empty());
    }

    #[test]
    fn truncation_is_distinguished_from_exhaustion() {
        let cfg = SearchConfig::new(2).atoms(["p"]).cap(Some(5));
        let mut stream = enumerate_models(&cfg).unwrap();
        let models: Vec<KripkeModel> = stream.by_ref().collect();
        assert_eq!(models.len(), 5);
        assert_eq!(stream.outcome(), Some(StreamEnd::Truncated));
        assert_eq!(stream.stats().models, 5);
    }

    #[test]
    fn countermodel_for_dne_is_the_two_chain() {
        let f = parse("~~p -> p").unwrap();
        let cfg = SearchConfig::new(2).atoms(["p"]).strict(true);
        let CountermodelOutcome::Found(report) = find_countermodel(&f, &cfg).unwrap() else {
            panic!("expected a countermodel");
        };
        // First witness: the 2-chain with p at the top, failing at the root.
        let (m1, _) = KripkeModel::from_doc(&m1_doc()).unwrap();
        assert_eq!(report.model, m1);
        assert_eq!(report.world, 0);
        assert!(!report.model.satisfies(report.world, &f));
        assert!(report.model.is_strict());
        // Report documents reload without loss.
        let doc = report.to_doc();
        let back = CounterexampleReport::from_doc(&doc).unwrap();
        assert_eq!(back, *report);
    }

    #[test]
    fn exhausted_searches_report_exhaustion() {
        let cfg = SearchConfig::new(2).atoms(["p"]).strict(true);
        match find_countermodel(&parse("p -> ~~p").unwrap(), &cfg).unwrap() {
            CountermodelOutcome::Exhausted(stats) => assert!(stats.models > 0),
            other => panic!("unexpected outcome {other:?}"),
        }
        match find_countermodel(&parse("T").unwrap(), &cfg).unwrap() {
            CountermodelOutcome::Exhausted(_) => {}
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn scan_matches_individual_searches() {
        let fs = vec![
            parse("p -> p").unwrap(),
            parse("~~p -> p").unwrap(),
            parse("p -> ~~p").unwrap(),
        ];
        let cfg = SearchConfig::new(2).atoms(["p"]).strict(true);
        let scan = validity_scan(&fs, &cfg).unwrap();
        assert_eq!(scan.len(), 3);
        for (f, outcome) in &scan {
            match (outcome, find_countermodel(f, &cfg).unwrap()) {
                (ScanOutcome::CounterModel(a), CountermodelOutcome::Found(b)) => {
                    assert_eq!(a, &b);
                }
                (ScanOutcome::ValidWithinBound(a), CountermodelOutcome::Exhausted(b)) => {
                    assert_eq!(a, &b);
                }
                (scan, solo) => panic!("scan {scan:?} disagrees with solo {solo:?}"),
            }
        }
        assert!(matches!(scan[0].1, ScanOutcome::ValidWithinBound(_)));
        assert!(matches!(scan[1].1, ScanOutcome::CounterModel(_)));
        assert!(matches!(scan[2].1, ScanOutcome::ValidWithinBound(_)));
        assert_eq!(validity_scan(&[], &cfg).unwrap(), vec![]);
    }

    #[test]
    fn counit_and_unit_laws_hold_within_three_worlds() {
        let fs = vec![
            parse("b> w< p -> p").unwrap(),
            parse("p -> w> b< p").unwrap(),
        ];
        let cfg = SearchConfig::new(3).atoms(["p"]).strict(true);
        for (f, outcome) in validity_scan(&fs, &cfg).unwrap() {
            assert!(
                matches!(outcome, ScanOutcome::ValidWithinBound(_)),
                "{f} expected valid within bound"
            );
        }
    }

    #[test]
    fn heyting_probe_finds_the_two_chain() {
        let cfg = SearchConfig::new(2).atoms(["p"]).strict(true);
        let DneOutcome::Witness(report) = probe_dne(&cfg).unwrap() else {
            panic!("expected a witness");
        };
        let (m1, _) = KripkeModel::from_doc(&m1_doc()).unwrap();
        assert_eq!(report.model, m1);
        assert_eq!(report.atom, "p");
        assert_eq!(report.neg_extension, WorldSet::from_worlds(2, [0, 1]));
        assert_eq!(report.atom_extension, WorldSet::from_worlds(2, [1]));
        assert!(report.forward_holds);
        assert!(!report.backward_holds);
        // Fixed fragment of the 2-chain under Heyting double negation:
        // the empty set and the whole frame; {w1} is the moved element.
        assert_eq!(
            report.fixed,
            vec![WorldSet::empty(2), WorldSet::from_worlds(2, [0, 1])]
        );
    }

    #[test]
    fn heyting_probe_exhausts_on_one_world() {
        let cfg = SearchConfig::new(1).atoms(["p"]).strict(true);
        match probe_dne(&cfg).unwrap() {
            DneOutcome::Exhausted(stats) => {
                assert_eq!(stats.frames, 4);
                assert_eq!(stats.models, 8);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn galois_flip_probe_finds_a_one_world_witness() {
        // One world, empty tense relations, p empty: w> p is everything
        // (vacuously), so b< w> p = ... = the whole world set != p. This
        // precedes every two-world candidate in enumeration order.
        let cfg = SearchConfig::new(2)
            .atoms(["p"])
            .strict(true)
            .scheme(NegationScheme::GaloisFlip);
        let DneOutcome::Witness(report) = probe_dne(&cfg).unwrap() else {
            panic!("expected a witness");
        };
        assert_eq!(report.model.n(), 1);
        assert_eq!(report.model.frown().count_pairs(), 0);
        assert_eq!(report.model.smile().count_pairs(), 0);
        assert_eq!(report.atom_extension, WorldSet::empty(1));
        assert_eq!(report.neg_extension, WorldSet::full(1));
        assert!(report.forward_holds);
        assert!(!report.backward_holds);
        assert_eq!(report.fixed, vec![WorldSet::full(1)]);
    }

    #[test]
    fn probe_rejects_bad_configs() {
        let lax = SearchConfig::new(2).atoms(["p"]);
        assert_eq!(probe_dne(&lax).unwrap_err(), SearchError::ProbeNeedsStrict);
        let no_atoms = SearchConfig::new(2).strict(true);
        assert_eq!(probe_dne(&no_atoms).unwrap_err(), SearchError::ProbeNeedsAtoms);
        let too_big = SearchConfig::new(9);
        assert_eq!(
            enumerate_models(&too_big).err(),
            Some(SearchError::BadMaxWorlds(9))
        );
        let dup = SearchConfig::new(2).atoms(["p", "p"]);
        assert_eq!(
            enumerate_models(&dup).err(),
            Some(SearchError::DuplicateAtom("p".to_string()))
        );
    }

    #[test]
    fn random_strict_models_are_strict_and_reproducible() {
        let atoms = vec!["p".to_string(), "q".to_string()];
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_strict_model(&mut rng, 5, &atoms);
            assert!(m.is_strict(), "seed {seed} produced a lax model");
            assert!(m.check_frame_conditions().is_empty());
            for set in m.valuation().values() {
                assert!(m.leq().up_closed(*set));
            }
            let mut rng2 = ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(random_strict_model(&mut rng2, 5, &atoms), m);
        }
    }

    #[test]
    fn permutations_are_lexicographic() {
        assert_eq!(
            permutations(3),
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0],
            ]
        );
    }
}
