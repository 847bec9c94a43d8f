//! Display-style sequent calculus over structural contexts: structures and
//! sequents with their polarity interpretation, a rule registry with
//! backward application, bounded proof search, derivation checking, and a
//! semantic soundness check against models.
//!
//! Concrete syntax: `I` (unit), any formula, `# X` and `@ X` (the tense
//! modalities, binding a following formula greedily), `X , Y`, `X >> Y`
//! (right-associative, looser than comma), parentheses, and `X |- Y` for
//! sequents.

use std::collections::HashMap;
use std::fmt;

use crate::kripke::KripkeModel;
use crate::syntax::{parse_formula, Cursor, Formula, ParseError, Tok};

/// A structural context: formula positions glued by the structural
/// connectives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    Unit,
    Form(Formula),
    Sharp(Box<Structure>),
    Flat(Box<Structure>),
    Comma(Box<Structure>, Box<Structure>),
    Arrow(Box<Structure>, Box<Structure>),
}

impl Structure {
    pub fn form(f: Formula) -> Self {
        Structure::Form(f)
    }

    pub fn sharp(x: Structure) -> Self {
        Structure::Sharp(Box::new(x))
    }

    pub fn flat(x: Structure) -> Self {
        Structure::Flat(Box::new(x))
    }

    pub fn comma(a: Structure, b: Structure) -> Self {
        Structure::Comma(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Structure, b: Structure) -> Self {
        Structure::Arrow(Box::new(a), Box::new(b))
    }

    /// Binding tightness for printing: `>>` loosest, then `,`, then the
    /// prefix modalities, then leaves. Formula leaves print bare; no formula
    /// token collides with a structural one.
    fn prec(&self) -> u8 {
        match self {
            Structure::Arrow(..) => 1,
            Structure::Comma(..) => 2,
            Structure::Sharp(_) | Structure::Flat(_) => 3,
            Structure::Unit | Structure::Form(_) => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let wrap = self.prec() < ctx;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            Structure::Unit => f.write_str("I")?,
            Structure::Form(x) => write!(f, "{x}")?,
            Structure::Sharp(x) => {
                f.write_str("# ")?;
                x.fmt_prec(f, 3)?;
            }
            Structure::Flat(x) => {
                f.write_str("@ ")?;
                x.fmt_prec(f, 3)?;
            }
            Structure::Comma(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" , ")?;
                b.fmt_prec(f, 3)?;
            }
            Structure::Arrow(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" >> ")?;
                b.fmt_prec(f, 1)?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub ante: Structure,
    pub succ: Structure,
}

impl Sequent {
    pub fn new(ante: Structure, succ: Structure) -> Self {
        Sequent { ante, succ }
    }

    /// The formula reading: antecedent interpretation of the left side and
    /// succedent interpretation of the right.
    pub fn interpret(&self) -> (Formula, Formula) {
        (
            interpret_structure(&self.ante, Polarity::Antecedent),
            interpret_structure(&self.succ, Polarity::Succedent),
        )
    }

    /// Does the interpreted inclusion hold on this model?
    pub fn holds_on(&self, m: &KripkeModel) -> bool {
        let (fa, fs) = self.interpret();
        m.extension(&fa).is_subset(m.extension(&fs))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {}", self.ante, self.succ)
    }
}

/// Which side of a sequent a structure sits on; the two sides read the
/// structural connectives differently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Antecedent,
    Succedent,
}

/// Read a structure as a formula. Unit is ⊤ on the left and ⊥ on the right;
/// comma is ∧/∨; `>` is exclusion on the left and implication on the right
/// (its left argument is antecedent either way); `#` is the right tense
/// pair (▶ on the left, ▷ on the right) and `@` the left one (◁ on the
/// left, ◀ on the right), each flipping polarity inside.
pub fn interpret_structure(s: &Structure, pol: Polarity) -> Formula {
    use Polarity::*;
    match (s, pol) {
        (Structure::Unit, Antecedent) => Formula::Top,
        (Structure::Unit, Succedent) => Formula::Bot,
        (Structure::Form(f), _) => f.clone(),
        (Structure::Comma(a, b), Antecedent) => {
            Formula::and(interpret_structure(a, Antecedent), interpret_structure(b, Antecedent))
        }
        (Structure::Comma(a, b), Succedent) => {
            Formula::or(interpret_structure(a, Succedent), interpret_structure(b, Succedent))
        }
        (Structure::Arrow(a, b), Antecedent) => {
            Formula::excl(interpret_structure(a, Antecedent), interpret_structure(b, Succedent))
        }
        (Structure::Arrow(a, b), Succedent) => {
            Formula::imp(interpret_structure(a, Antecedent), interpret_structure(b, Succedent))
        }
        (Structure::Sharp(x), Antecedent) => Formula::bnegr(interpret_structure(x, Succedent)),
        (Structure::Sharp(x), Succedent) => Formula::wnegr(interpret_structure(x, Antecedent)),
        (Structure::Flat(x), Antecedent) => Formula::wnegl(interpret_structure(x, Succedent)),
        (Structure::Flat(x), Succedent) => Formula::bnegl(interpret_structure(x, Antecedent)),
    }
}

const STRUCT_PRIMARY_EXPECTED: &[&str] = &["a formula", "'I'", "'#'", "'@'", "'('"];

/// Does the parenthesized group starting at the cursor contain any
/// structure-only token at any depth? If not, the group belongs to the
/// formula grammar.
fn paren_group_is_structure(cur: &Cursor) -> bool {
    let start = cur.tok_index();
    debug_assert_eq!(cur.tok_at(start), Some(&Tok::LParen));
    let mut depth = 0usize;
    let mut idx = start;
    while let Some(tok) = cur.tok_at(idx) {
        match tok {
            Tok::LParen => depth += 1,
            Tok::RParen => {
                depth -= 1;
                if depth == 0 {
                    return false;
                }
            }
            Tok::UnitI | Tok::Sharp | Tok::At | Tok::Comma | Tok::SeqArrow | Tok::Turnstile => {
                return true;
            }
            _ => {}
        }
        idx += 1;
    }
    false
}

fn parse_structure_primary(cur: &mut Cursor) -> Result<Structure, ParseError> {
    match cur.peek() {
        Some(Tok::UnitI) => {
            cur.bump();
            Ok(Structure::Unit)
        }
        Some(Tok::Sharp) => {
            cur.bump();
            Ok(Structure::sharp(parse_structure_primary(cur)?))
        }
        Some(Tok::At) => {
            cur.bump();
            Ok(Structure::flat(parse_structure_primary(cur)?))
        }
        Some(Tok::LParen) if paren_group_is_structure(cur) => {
            cur.bump();
            let s = parse_structure_cur(cur)?;
            if !cur.eat(&Tok::RParen) {
                return Err(cur.err(&["')'"]));
            }
            Ok(s)
        }
        Some(Tok::Comma) | Some(Tok::SeqArrow) | Some(Tok::Turnstile) | Some(Tok::RParen)
        | None => Err(cur.err(STRUCT_PRIMARY_EXPECTED)),
        _ => Ok(Structure::Form(parse_formula(cur)?)),
    }
}

fn parse_structure_comma(cur: &mut Cursor) -> Result<Structure, ParseError> {
    let mut s = parse_structure_primary(cur)?;
    while cur.eat(&Tok::Comma) {
        s = Structure::comma(s, parse_structure_primary(cur)?);
    }
    Ok(s)
}

fn parse_structure_cur(cur: &mut Cursor) -> Result<Structure, ParseError> {
    let left = parse_structure_comma(cur)?;
    if cur.eat(&Tok::SeqArrow) {
        let right = parse_structure_cur(cur)?;
        return Ok(Structure::arrow(left, right));
    }
    Ok(left)
}

pub fn parse_structure(text: &str) -> Result<Structure, ParseError> {
    let mut cur = Cursor::new(text)?;
    let s = parse_structure_cur(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.err(&["end of input"]));
    }
    Ok(s)
}

pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let mut cur = Cursor::new(text)?;
    let ante = parse_structure_cur(&mut cur)?;
    if !cur.eat(&Tok::Turnstile) {
        return Err(cur.err(&["'|-'"]));
    }
    let succ = parse_structure_cur(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.err(&["end of input"]));
    }
    Ok(Sequent::new(ante, succ))
}

/// Every rule in the calculus, in registry order. Cut is registered but
/// skipped by search unless explicitly allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleId {
    Id,
    TopR,
    BotL,
    CounitSmile,
    UnitFrown,
    AndL,
    AndR,
    OrR,
    OrL,
    ImpR,
    ImpL,
    ExclL,
    ExclR,
    BnegrL,
    WnegrR,
    WneglL,
    BneglR,
    BnegrShift,
    WneglShift,
    DispComma,
    DispArrow,
    DispSharp,
    DispFlat,
    UnitIL,
    UnitIR,
    WeakL,
    WeakR,
    CommL,
    CommR,
    AssocL,
    AssocR,
    ContrL,
    ContrR,
    Cut,
}

pub const REGISTRY: [RuleId; 34] = [
    RuleId::Id,
    RuleId::TopR,
    RuleId::BotL,
    RuleId::CounitSmile,
    RuleId::UnitFrown,
    RuleId::AndL,
    RuleId::AndR,
    RuleId::OrR,
    RuleId::OrL,
    RuleId::ImpR,
    RuleId::ImpL,
    RuleId::ExclL,
    RuleId::ExclR,
    RuleId::BnegrL,
    RuleId::WnegrR,
    RuleId::WneglL,
    RuleId::BneglR,
    RuleId::BnegrShift,
    RuleId::WneglShift,
    RuleId::DispComma,
    RuleId::DispArrow,
    RuleId::DispSharp,
    RuleId::DispFlat,
    RuleId::UnitIL,
    RuleId::UnitIR,
    RuleId::WeakL,
    RuleId::WeakR,
    RuleId::CommL,
    RuleId::CommR,
    RuleId::AssocL,
    RuleId::AssocR,
    RuleId::ContrL,
    RuleId::ContrR,
    RuleId::Cut,
];

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleId::Id => "id",
            RuleId::TopR => "top_r",
            RuleId::BotL => "bot_l",
            RuleId::CounitSmile => "counit_smile",
            RuleId::UnitFrown => "unit_frown",
            RuleId::AndL => "and_l",
            RuleId::AndR => "and_r",
            RuleId::OrR => "or_r",
            RuleId::OrL => "or_l",
            RuleId::ImpR => "imp_r",
            RuleId::ImpL => "imp_l",
            RuleId::ExclL => "excl_l",
            RuleId::ExclR => "excl_r",
            RuleId::BnegrL => "bnegr_l",
            RuleId::WnegrR => "wnegr_r",
            RuleId::WneglL => "wnegl_l",
            RuleId::BneglR => "bnegl_r",
            RuleId::BnegrShift => "bnegr_shift",
            RuleId::WneglShift => "wnegl_shift",
            RuleId::DispComma => "disp_comma",
            RuleId::DispArrow => "disp_arrow",
            RuleId::DispSharp => "disp_sharp",
            RuleId::DispFlat => "disp_flat",
            RuleId::UnitIL => "unit_i_l",
            RuleId::UnitIR => "unit_i_r",
            RuleId::WeakL => "weak_l",
            RuleId::WeakR => "weak_r",
            RuleId::CommL => "comm_l",
            RuleId::CommR => "comm_r",
            RuleId::AssocL => "assoc_l",
            RuleId::AssocR => "assoc_r",
            RuleId::ContrL => "contr_l",
            RuleId::ContrR => "contr_r",
            RuleId::Cut => "cut",
        })
    }
}

fn collect_formulas(s: &Structure, out: &mut Vec<Formula>) {
    match s {
        Structure::Unit => {}
        Structure::Form(f) => out.push(f.clone()),
        Structure::Sharp(x) | Structure::Flat(x) => collect_formulas(x, out),
        Structure::Comma(a, b) | Structure::Arrow(a, b) => {
            collect_formulas(a, out);
            collect_formulas(b, out);
        }
    }
}

/// Apply a rule backward to a goal. Each inner list is the premise list of
/// one way the rule matches; an empty outer list means the rule does not
/// apply, and an empty inner list is an axiom instance.
pub fn apply_rule(rule: RuleId, goal: &Sequent) -> Vec<Vec<Sequent>> {
    use Structure as S;
    let mut opts: Vec<Vec<Sequent>> = Vec::new();
    let ante = &goal.ante;
    let succ = &goal.succ;
    match rule {
        RuleId::Id => {
            if let (S::Form(a), S::Form(b)) = (ante, succ) {
                if a == b {
                    opts.push(vec![]);
                }
            }
        }
        RuleId::TopR => {
            if *ante == S::Unit && *succ == S::Form(Formula::Top) {
                opts.push(vec![]);
            }
        }
        RuleId::BotL => {
            if *ante == S::Form(Formula::Bot) && *succ == S::Unit {
                opts.push(vec![]);
            }
        }
        RuleId::CounitSmile => {
            if let (S::Form(f), S::Form(a)) = (ante, succ) {
                let ok = match f {
                    Formula::BNegR(x) => {
                        matches!(x.as_ref(), Formula::WNegL(i) if i.as_ref() == a)
                    }
                    Formula::WNegL(x) => {
                        matches!(x.as_ref(), Formula::BNegR(i) if i.as_ref() == a)
                    }
                    _ => false,
                };
                if ok {
                    opts.push(vec![]);
                }
            }
        }
        RuleId::UnitFrown => {
            if let (S::Form(a), S::Form(f)) = (ante, succ) {
                let ok = match f {
                    Formula::WNegR(x) => {
                        matches!(x.as_ref(), Formula::BNegL(i) if i.as_ref() == a)
                    }
                    Formula::BNegL(x) => {
                        matches!(x.as_ref(), Formula::WNegR(i) if i.as_ref() == a)
                    }
                    _ => false,
                };
                if ok {
                    opts.push(vec![]);
                }
            }
        }
        RuleId::AndL => {
            if let S::Form(Formula::And(a, b)) = ante {
                opts.push(vec![Sequent::new(
                    S::comma(S::Form((**a).clone()), S::Form((**b).clone())),
                    succ.clone(),
                )]);
            }
        }
        RuleId::AndR => {
            if let (S::Comma(x, y), S::Form(Formula::And(a, b))) = (ante, succ) {
                opts.push(vec![
                    Sequent::new((**x).clone(), S::Form((**a).clone())),
                    Sequent::new((**y).clone(), S::Form((**b).clone())),
                ]);
            }
        }
        RuleId::OrR => {
            if let S::Form(Formula::Or(a, b)) = succ {
                opts.push(vec![Sequent::new(
                    ante.clone(),
                    S::comma(S::Form((**a).clone()), S::Form((**b).clone())),
                )]);
            }
        }
        RuleId::OrL => {
            if let (S::Form(Formula::Or(a, b)), S::Comma(x, y)) = (ante, succ) {
                opts.push(vec![
                    Sequent::new(S::Form((**a).clone()), (**x).clone()),
                    Sequent::new(S::Form((**b).clone()), (**y).clone()),
                ]);
            }
        }
        RuleId::ImpR => {
            if let S::Form(Formula::Imp(a, b)) = succ {
                opts.push(vec![Sequent::new(
                    ante.clone(),
                    S::arrow(S::Form((**a).clone()), S::Form((**b).clone())),
                )]);
            }
        }
        RuleId::ImpL => {
            if let (S::Form(Formula::Imp(a, b)), S::Arrow(x, y)) = (ante, succ) {
                opts.push(vec![
                    Sequent::new((**x).clone(), S::Form((**a).clone())),
                    Sequent::new(S::Form((**b).clone()), (**y).clone()),
                ]);
            }
        }
        RuleId::ExclL => {
            if let S::Form(Formula::Excl(a, b)) = ante {
                opts.push(vec![Sequent::new(
                    S::arrow(S::Form((**a).clone()), S::Form((**b).clone())),
                    succ.clone(),
                )]);
            }
        }
        RuleId::ExclR => {
            if let S::Comma(l, y) = succ {
                if let S::Form(Formula::Excl(a, b)) = l.as_ref() {
                    opts.push(vec![
                        Sequent::new(ante.clone(), S::Form((**a).clone())),
                        Sequent::new(S::Form((**b).clone()), (**y).clone()),
                    ]);
                }
            }
        }
        RuleId::BnegrL => {
            if let S::Form(Formula::BNegR(a)) = ante {
                opts.push(vec![Sequent::new(
                    S::sharp(S::Form((**a).clone())),
                    succ.clone(),
                )]);
            }
        }
        RuleId::WnegrR => {
            if let S::Form(Formula::WNegR(a)) = succ {
                opts.push(vec![Sequent::new(
                    ante.clone(),
                    S::sharp(S::Form((**a).clone())),
                )]);
            }
        }
        RuleId::WneglL => {
            if let S::Form(Formula::WNegL(a)) = ante {
                opts.push(vec![Sequent::new(
                    S::flat(S::Form((**a).clone())),
                    succ.clone(),
                )]);
            }
        }
        RuleId::BneglR => {
            if let S::Form(Formula::BNegL(a)) = succ {
                opts.push(vec![Sequent::new(
                    ante.clone(),
                    S::flat(S::Form((**a).clone())),
                )]);
            }
        }
        RuleId::BnegrShift => {
            if let S::Form(Formula::BNegR(a)) = ante {
                opts.push(vec![Sequent::new(
                    S::flat(succ.clone()),
                    S::Form((**a).clone()),
                )]);
            }
        }
        RuleId::WneglShift => {
            if let S::Form(Formula::WNegL(a)) = ante {
                opts.push(vec![Sequent::new(
                    S::sharp(succ.clone()),
                    S::Form((**a).clone()),
                )]);
            }
        }
        RuleId::DispComma => {
            // X ⬠ Y ⊢ Z ⟺ X ⊢ Y > Z
            if let S::Comma(x, y) = ante {
                opts.push(vec![Sequent::new(
                    (**x).clone(),
                    S::arrow((**y).clone(), succ.clone()),
                )]);
            }
            if let S::Arrow(y, z) = succ {
                opts.push(vec![Sequent::new(
                    S::comma(ante.clone(), (**y).clone()),
                    (**z).clone(),
                )]);
            }
        }
        RuleId::DispArrow => {
            // X > Y ⊢ Z ⟺ X ⊢ Y ⬠ Z
            if let S::Arrow(x, y) = ante {
                opts.push(vec![Sequent::new(
                    (**x).clone(),
                    S::comma((**y).clone(), succ.clone()),
                )]);
            }
            if let S::Comma(y, z) = succ {
                opts.push(vec![Sequent::new(
                    S::arrow(ante.clone(), (**y).clone()),
                    (**z).clone(),
                )]);
            }
        }
        RuleId::DispSharp => {
            // ♯X ⊢ Y ⟺ ♭Y ⊢ X
            if let S::Sharp(x) = ante {
                opts.push(vec![Sequent::new(S::flat(succ.clone()), (**x).clone())]);
            }
            if let S::Flat(y) = ante {
                opts.push(vec![Sequent::new(S::sharp(succ.clone()), (**y).clone())]);
            }
        }
        RuleId::DispFlat => {
            // X ⊢ ♯Y ⟺ Y ⊢ ♭X
            if let S::Sharp(y) = succ {
                opts.push(vec![Sequent::new((**y).clone(), S::flat(ante.clone()))]);
            }
            if let S::Flat(x) = succ {
                opts.push(vec![Sequent::new((**x).clone(), S::sharp(ante.clone()))]);
            }
        }
        RuleId::UnitIL => {
            if let S::Comma(x, y) = ante {
                if **y == S::Unit {
                    opts.push(vec![Sequent::new((**x).clone(), succ.clone())]);
                }
                if **x == S::Unit {
                    opts.push(vec![Sequent::new((**y).clone(), succ.clone())]);
                }
            }
            opts.push(vec![Sequent::new(
                S::comma(ante.clone(), S::Unit),
                succ.clone(),
            )]);
        }
        RuleId::UnitIR => {
            if let S::Comma(x, y) = succ {
                if **y == S::Unit {
                    opts.push(vec![Sequent::new(ante.clone(), (**x).clone())]);
                }
                if **x == S::Unit {
                    opts.push(vec![Sequent::new(ante.clone(), (**y).clone())]);
                }
            }
            opts.push(vec![Sequent::new(
                ante.clone(),
                S::comma(succ.clone(), S::Unit),
            )]);
        }
        RuleId::WeakL => {
            if let S::Comma(x, y) = ante {
                opts.push(vec![Sequent::new((**x).clone(), succ.clone())]);
                opts.push(vec![Sequent::new((**y).clone(), succ.clone())]);
            }
        }
        RuleId::WeakR => {
            if let S::Comma(x, y) = succ {
                opts.push(vec![Sequent::new(ante.clone(), (**x).clone())]);
                opts.push(vec![Sequent::new(ante.clone(), (**y).clone())]);
            }
        }
        RuleId::CommL => {
            if let S::Comma(x, y) = ante {
                opts.push(vec![Sequent::new(
                    S::comma((**y).clone(), (**x).clone()),
                    succ.clone(),
                )]);
            }
        }
        RuleId::CommR => {
            if let S::Comma(x, y) = succ {
                opts.push(vec![Sequent::new(
                    ante.clone(),
                    S::comma((**y).clone(), (**x).clone()),
                )]);
            }
        }
        RuleId::AssocL => {
            if let S::Comma(xy, z) = ante {
                if let S::Comma(x, y) = xy.as_ref() {
                    opts.push(vec![Sequent::new(
                        S::comma((**x).clone(), S::comma((**y).clone(), (**z).clone())),
                        succ.clone(),
                    )]);
                }
            }
            if let S::Comma(x, yz) = ante {
                if let S::Comma(y, z) = yz.as_ref() {
                    opts.push(vec![Sequent::new(
                        S::comma(S::comma((**x).clone(), (**y).clone()), (**z).clone()),
                        succ.clone(),
                    )]);
                }
            }
        }
        RuleId::AssocR => {
            if let S::Comma(xy, z) = succ {
                if let S::Comma(x, y) = xy.as_ref() {
                    opts.push(vec![Sequent::new(
                        ante.clone(),
                        S::comma((**x).clone(), S::comma((**y).clone(), (**z).clone())),
                    )]);
                }
            }
            if let S::Comma(x, yz) = succ {
                if let S::Comma(y, z) = yz.as_ref() {
                    opts.push(vec![Sequent::new(
                        ante.clone(),
                        S::comma(S::comma((**x).clone(), (**y).clone()), (**z).clone()),
                    )]);
                }
            }
        }
        RuleId::ContrL => {
            opts.push(vec![Sequent::new(
                S::comma(ante.clone(), ante.clone()),
                succ.clone(),
            )]);
        }
        RuleId::ContrR => {
            opts.push(vec![Sequent::new(
                ante.clone(),
                S::comma(succ.clone(), succ.clone()),
            )]);
        }
        RuleId::Cut => {
            // Analytic cut: candidates are subformulas of the goal's own
            // formulas, in first-appearance order.
            let mut leaves = Vec::new();
            collect_formulas(ante, &mut leaves);
            collect_formulas(succ, &mut leaves);
            let mut seen = Vec::new();
            for leaf in &leaves {
                for sub in leaf.subformulas() {
                    if !seen.contains(&sub) {
                        seen.push(sub);
                    }
                }
            }
            for c in seen {
                opts.push(vec![
                    Sequent::new(ante.clone(), S::Form(c.clone())),
                    Sequent::new(S::Form(c.clone()), succ.clone()),
                ]);
            }
        }
    }
    opts
}

/// Flatten a comma spine into normalized components.
fn flatten_commas(s: &Structure, out: &mut Vec<Structure>) {
    if let Structure::Comma(a, b) = s {
        flatten_commas(a, out);
        flatten_commas(b, out);
    } else {
        out.push(normalize_structure(s));
    }
}

/// The loop-check normal form: comma spines are flattened, sorted, and
/// rebuilt left-nested; Arrow/Sharp/Flat keep their shape (their children
/// normalize recursively). The unit I is a component like any other.
pub fn normalize_structure(s: &Structure) -> Structure {
    match s {
        Structure::Unit | Structure::Form(_) => s.clone(),
        Structure::Sharp(x) => Structure::sharp(normalize_structure(x)),
        Structure::Flat(x) => Structure::flat(normalize_structure(x)),
        Structure::Arrow(a, b) => {
            Structure::arrow(normalize_structure(a), normalize_structure(b))
        }
        Structure::Comma(..) => {
            let mut parts = Vec::new();
            flatten_commas(s, &mut parts);
            parts.sort();
            let mut it = parts.into_iter();
            let first = it.next().expect("a comma has components");
            it.fold(first, Structure::comma)
        }
    }
}

pub fn normalize_sequent(s: &Sequent) -> Sequent {
    Sequent::new(normalize_structure(&s.ante), normalize_structure(&s.succ))
}

/// A derivation tree: the goal, the rule that closed it, and subderivations
/// of the rule's premises in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub root: Sequent,
    pub rule: RuleId,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    /// Tree height; a leaf (axiom) has height 1.
    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(Derivation::node_count).sum::<usize>()
    }

    /// Indented text form: one `rule: sequent` line per node, premises
    /// indented two spaces under their conclusion.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, indent: usize) {
        for _ in 0..indent {
            out.push_str("  ");
        }
        out.push_str(&format!("{}: {}\n", self.rule, self.root));
        for p in &self.premises {
            p.write_text(out, indent + 1);
        }
    }
}

/// Where a derivation first fails checking: the path of premise indices
/// from the root, and the offending node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub path: Vec<usize>,
    pub rule: RuleId,
    pub sequent: Sequent,
}

/// Verify that every node is a correct instance of its rule over its
/// premises. Cut nodes accept any cut formula, not only analytic ones.
pub fn check_derivation(d: &Derivation) -> Result<(), CheckFailure> {
    fn node_ok(d: &Derivation) -> bool {
        if d.rule == RuleId::Cut {
            if d.premises.len() != 2 {
                return false;
            }
            let left = &d.premises[0].root;
            let right = &d.premises[1].root;
            return left.ante == d.root.ante
                && right.succ == d.root.succ
                && matches!(
                    (&left.succ, &right.ante),
                    (Structure::Form(a), Structure::Form(b)) if a == b
                );
        }
        let roots: Vec<&Sequent> = d.premises.iter().map(|p| &p.root).collect();
        apply_rule(d.rule, &d.root)
            .iter()
            .any(|opt| opt.len() == roots.len() && opt.iter().zip(&roots).all(|(a, b)| a == *b))
    }
    fn rec(d: &Derivation, path: &mut Vec<usize>) -> Result<(), CheckFailure> {
        if !node_ok(d) {
            return Err(CheckFailure {
                path: path.clone(),
                rule: d.rule,
                sequent: d.root.clone(),
            });
        }
        for (i, p) in d.premises.iter().enumerate() {
            path.push(i);
            rec(p, path)?;
            path.pop();
        }
        Ok(())
    }
    rec(d, &mut Vec::new())
}

pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone)]
pub struct ProveConfig {
    /// Maximum derivation height; an axiom leaf has height 1.
    pub depth: usize,
    pub allow_cut: bool,
    pub enable_weakening: bool,
    pub enable_contraction: bool,
    /// Cap on search nodes explored; exceeding it makes the outcome
    /// `BudgetExceeded` instead of an exhaustive `NotFound`.
    pub max_nodes: u64,
}

impl ProveConfig {
    pub fn new(depth: usize) -> Self {
        ProveConfig {
            depth,
            allow_cut: false,
            enable_weakening: true,
            enable_contraction: true,
            max_nodes: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProveOutcome {
    Proved(Box<Derivation>),
    /// The bounded space was exhausted without a proof; not a refutation.
    NotFound,
    /// The node budget ran out before the space was exhausted.
    BudgetExceeded,
}

struct Searcher<'a> {
    cfg: &'a ProveConfig,
    nodes: u64,
    budget_hit: bool,
    /// Proved sequents with the height of the stored derivation.
    success: HashMap<Sequent, (Derivation, usize)>,
    /// Sequents that failed exhaustively, keyed to the largest height bound
    /// tried; only path-independent (loop-free) failures land here.
    failure: HashMap<Sequent, usize>,
}

impl Searcher<'_> {
    fn rule_enabled(&self, rule: RuleId) -> bool {
        match rule {
            RuleId::Cut => self.cfg.allow_cut,
            RuleId::WeakL | RuleId::WeakR => self.cfg.enable_weakening,
            RuleId::ContrL | RuleId::ContrR => self.cfg.enable_contraction,
            _ => true,
        }
    }

    /// Returns the derivation if one exists within `remaining` height, plus
    /// a purity flag: true when the failure is reusable on any path (no
    /// loop-check prune and no budget cut happened below).
    fn search(
        &mut self,
        goal: &Sequent,
        remaining: usize,
        branch: &mut Vec<Sequent>,
    ) -> (Option<Derivation>, bool) {
        if remaining == 0 {
            return (None, true);
        }
        if let Some((d, h)) = self.success.get(goal) {
            if *h <= remaining {
                return (Some(d.clone()), true);
            }
        }
        if let Some(&r) = self.failure.get(goal) {
            if remaining <= r {
                return (None, true);
            }
        }
        self.nodes += 1;
        if self.nodes > self.cfg.max_nodes {
            self.budget_hit = true;
            return (None, false);
        }
        let norm = normalize_sequent(goal);
        if branch.contains(&norm) {
            return (None, false);
        }
        branch.push(norm);
        let mut all_pure = true;
        let mut found: Option<Derivation> = None;
        'rules: for rule in REGISTRY {
            if !self.rule_enabled(rule) {
                continue;
            }
            for premises in apply_rule(rule, goal) {
                let mut children = Vec::with_capacity(premises.len());
                let mut ok = true;
                for p in &premises {
                    let (res, pure) = self.search(p, remaining - 1, branch);
                    match res {
                        Some(d) => children.push(d),
                        None => {
                            if !pure {
                                all_pure = false;
                            }
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    found = Some(Derivation { root: goal.clone(), rule, premises: children });
                    break 'rules;
                }
            }
        }
        branch.pop();
        match found {
            Some(d) => {
                let h = d.height();
                let slot = self.success.entry(goal.clone());
                match slot {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert((d.clone(), h));
                    }
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        if h < o.get().1 {
                            o.insert((d.clone(), h));
                        }
                    }
                }
                (Some(d), true)
            }
            None => {
                if all_pure {
                    let e = self.failure.entry(goal.clone()).or_insert(0);
                    if remaining > *e {
                        *e = remaining;
                    }
                }
                (None, all_pure)
            }
        }
    }
}

/// Backward proof search over the registry, bounded by derivation height
/// and a node budget, with loop checking on comma-normalized sequents.
pub fn prove_bounded(goal: &Sequent, cfg: &ProveConfig) -> ProveOutcome {
    let mut searcher = Searcher {
        cfg,
        nodes: 0,
        budget_hit: false,
        success: HashMap::new(),
        failure: HashMap::new(),
    };
    let mut branch = Vec::new();
    let (result, _) = searcher.search(goal, cfg.depth, &mut branch);
    match result {
        Some(d) => {
            debug_assert!(check_derivation(&d).is_ok());
            ProveOutcome::Proved(Box::new(d))
        }
        None if searcher.budget_hit => ProveOutcome::BudgetExceeded,
        None => ProveOutcome::NotFound,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessViolation {
    pub goal: Sequent,
    pub model_index: usize,
    /// A world where the antecedent reading holds but the succedent one
    /// does not.
    pub world: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessReport {
    /// Goal × model pairs checked before the first violation (or all).
    pub checked: usize,
    pub violation: Option<SoundnessViolation>,
}

/// Interpret each goal by polarity and verify the inclusion of extensions
/// on every model. Models are expected to be strict.
pub fn soundness_check(goals: &[Sequent], models: &[KripkeModel]) -> SoundnessReport {
    let mut checked = 0;
    for goal in goals {
        let (fa, fs) = goal.interpret();
        for (mi, m) in models.iter().enumerate() {
            checked += 1;
            let bad = m.extension(&fa).diff(m.extension(&fs));
            if !bad.is_empty() {
                return SoundnessReport {
                    checked,
                    violation: Some(SoundnessViolation {
                        goal: goal.clone(),
                        model_index: mi,
                        world: bad.iter().next().expect("nonempty"),
                    }),
                };
            }
        }
    }
    SoundnessReport { checked, violation: None }
}
