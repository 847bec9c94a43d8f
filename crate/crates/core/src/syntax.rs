//! Formula syntax: abstract syntax tree, lexer, parser, and canonical printer.
//!
//! The connective set is bi-intuitionistic logic (`T`, `F`, `&`, `|`, `->`,
//! and the exclusion `-<`) extended with four one-place negations written
//! `b>`, `b<`, `w>`, `w<`. Precedence, from tightest to loosest:
//! unary, `&`, `|`, `-<`, `->`. The binary connectives `&`, `|`, `-<`
//! associate to the left and `->` to the right. `~A` is accepted as input
//! sugar for `A -> F` and expanded during parsing; the printer never emits
//! it. Unicode aliases are accepted on input: `⊤ ⊥ ∧ ∨ → ▶ ◀ ▷ ◁` and the
//! minus sign `−` in `->`/`-<`.

use std::collections::BTreeSet;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

/// Formulas of the logic.
///
/// The four one-place connectives are named for their evaluation shape:
/// `BNegR`/`BNegL` (`b>`/`b<`) are the "black" pair and `WNegR`/`WNegL`
/// (`w>`/`w<`) the "white" pair; the `R`/`L` suffix records which side of
/// the underlying accessibility relation the quantified world sits on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    /// Exclusion (subtraction), written `A -< B`: the left adjoint of
    /// disjunction, dual to implication.
    Excl(Box<Formula>, Box<Formula>),
    /// `b> A`: existential negation along the converse of the "smile"
    /// relation.
    BNegR(Box<Formula>),
    /// `b< A`: universal negation along the "frown" relation.
    BNegL(Box<Formula>),
    /// `w> A`: universal negation along the converse of the "frown"
    /// relation.
    WNegR(Box<Formula>),
    /// `w< A`: existential negation along the "smile" relation.
    WNegL(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }
    pub fn excl(a: Formula, b: Formula) -> Self {
        Formula::Excl(Box::new(a), Box::new(b))
    }
    pub fn bnegr(a: Formula) -> Self {
        Formula::BNegR(Box::new(a))
    }
    pub fn bnegl(a: Formula) -> Self {
        Formula::BNegL(Box::new(a))
    }
    pub fn wnegr(a: Formula) -> Self {
        Formula::WNegR(Box::new(a))
    }
    pub fn wnegl(a: Formula) -> Self {
        Formula::WNegL(Box::new(a))
    }
    /// Intuitionistic negation `A -> F`, the expansion of the `~` sugar.
    pub fn neg(a: Formula) -> Self {
        Formula::imp(a, Formula::Bot)
    }

    /// Connective nesting depth; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        use Formula::*;
        match self {
            Atom(_) | Top | Bot => 0,
            And(a, b) | Or(a, b) | Imp(a, b) | Excl(a, b) => 1 + a.depth().max(b.depth()),
            BNegR(a) | BNegL(a) | WNegR(a) | WNegL(a) => 1 + a.depth(),
        }
    }

    /// The set of atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        use Formula::*;
        match self {
            Atom(name) => {
                out.insert(name.as_str());
            }
            Top | Bot => {}
            And(a, b) | Or(a, b) | Imp(a, b) | Excl(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            BNegR(a) | BNegL(a) | WNegR(a) | WNegL(a) => a.collect_atoms(out),
        }
    }

    /// All distinct subformulas in postorder (children before parents, the
    /// formula itself last). Structurally equal subtrees appear once, at
    /// their first postorder position.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.collect_post(&mut seen, &mut out);
        out
    }

    fn collect_post<'a>(&'a self, seen: &mut HashSet<&'a Formula>, out: &mut Vec<&'a Formula>) {
        use Formula::*;
        if seen.contains(self) {
            return;
        }
        match self {
            Atom(_) | Top | Bot => {}
            And(a, b) | Or(a, b) | Imp(a, b) | Excl(a, b) => {
                a.collect_post(seen, out);
                b.collect_post(seen, out);
            }
            BNegR(a) | BNegL(a) | WNegR(a) | WNegL(a) => a.collect_post(seen, out),
        }
        if seen.insert(self) {
            out.push(self);
        }
    }

    /// Replace every occurrence of the atom `name` by `arg`.
    pub fn substitute(&self, name: &str, arg: &Formula) -> Formula {
        use Formula::*;
        match self {
            Atom(a) if a == name => arg.clone(),
            Atom(_) | Top | Bot => self.clone(),
            And(a, b) => Formula::and(a.substitute(name, arg), b.substitute(name, arg)),
            Or(a, b) => Formula::or(a.substitute(name, arg), b.substitute(name, arg)),
            Imp(a, b) => Formula::imp(a.substitute(name, arg), b.substitute(name, arg)),
            Excl(a, b) => Formula::excl(a.substitute(name, arg), b.substitute(name, arg)),
            BNegR(a) => Formula::bnegr(a.substitute(name, arg)),
            BNegL(a) => Formula::bnegl(a.substitute(name, arg)),
            WNegR(a) => Formula::wnegr(a.substitute(name, arg)),
            WNegL(a) => Formula::wnegl(a.substitute(name, arg)),
        }
    }

    fn prec(&self) -> u8 {
        use Formula::*;
        match self {
            Imp(..) => 1,
            Excl(..) => 2,
            Or(..) => 3,
            And(..) => 4,
            BNegR(..) | BNegL(..) | WNegR(..) | WNegL(..) => 5,
            Atom(_) | Top | Bot => 6,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        use Formula::*;
        let p = self.prec();
        if p < min {
            write!(f, "(")?;
        }
        match self {
            Atom(name) => write!(f, "{name}")?,
            Top => write!(f, "T")?,
            Bot => write!(f, "F")?,
            And(a, b) => {
                a.fmt_prec(f, 4)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 5)?;
            }
            Or(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 4)?;
            }
            Excl(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " -< ")?;
                b.fmt_prec(f, 3)?;
            }
            Imp(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 1)?;
            }
            BNegR(a) => {
                write!(f, "b> ")?;
                a.fmt_prec(f, 5)?;
            }
            BNegL(a) => {
                write!(f, "b< ")?;
                a.fmt_prec(f, 5)?;
            }
            WNegR(a) => {
                write!(f, "w> ")?;
                a.fmt_prec(f, 5)?;
            }
            WNegL(a) => {
                write!(f, "w< ")?;
                a.fmt_prec(f, 5)?;
            }
        }
        if p < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// The canonical printer: minimal parentheses, ASCII connectives, one space
/// around binary connectives and after unary ones. Parsing the output gives
/// back the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

/// A parse (or lex) failure, with the 0-based character offset it occurred
/// at, the token classes that would have been accepted there, and what was
/// actually found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub at: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl ParseError {
    fn new(at: usize, expected: &[&str], found: impl Into<String>) -> Self {
        ParseError {
            at,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: found.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expected.is_empty() {
            return write!(f, "parse error at {}: unexpected {}", self.at, self.found);
        }
        write!(f, "parse error at {}: expected ", self.at)?;
        for (i, e) in self.expected.iter().enumerate() {
            if i > 0 {
                let sep = if i + 1 == self.expected.len() { " or " } else { ", " };
                write!(f, "{sep}")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ", found {}", self.found)
    }
}

impl std::error::Error for ParseError {}

/// How an eliminable "double negation" is built from the primitive
/// connectives, for the probe and algebra reports. `Custom` carries a
/// formula template whose hole is the reserved atom [`HOLE_ATOM`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NegationScheme {
    /// `(A -> F) -> F`.
    Heyting,
    /// `w> b< A`.
    Galois,
    /// `b< w> A`.
    GaloisFlip,
    /// `b> w< A`.
    Cogalois,
    /// `w< b> A`.
    CogaloisFlip,
    /// Any template formula; occurrences of the atom `a` mark the hole.
    Custom(Formula),
}

/// The atom standing for the hole in a [`NegationScheme::Custom`] template.
pub const HOLE_ATOM: &str = "a";

impl NegationScheme {
    /// Plug `arg` into the scheme.
    pub fn apply(&self, arg: &Formula) -> Formula {
        match self {
            NegationScheme::Heyting => Formula::neg(Formula::neg(arg.clone())),
            NegationScheme::Galois => Formula::wnegr(Formula::bnegl(arg.clone())),
            NegationScheme::GaloisFlip => Formula::bnegl(Formula::wnegr(arg.clone())),
            NegationScheme::Cogalois => Formula::bnegr(Formula::wnegl(arg.clone())),
            NegationScheme::CogaloisFlip => Formula::wnegl(Formula::bnegr(arg.clone())),
            NegationScheme::Custom(template) => template.substitute(HOLE_ATOM, arg),
        }
    }

    /// The scheme as a formula in the hole atom.
    pub fn template(&self) -> Formula {
        match self {
            NegationScheme::Custom(t) => t.clone(),
            _ => self.apply(&Formula::atom(HOLE_ATOM)),
        }
    }
}

impl fmt::Display for NegationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegationScheme::Heyting => write!(f, "heyting"),
            NegationScheme::Galois => write!(f, "galois"),
            NegationScheme::GaloisFlip => write!(f, "galois_flip"),
            NegationScheme::Cogalois => write!(f, "cogalois"),
            NegationScheme::CogaloisFlip => write!(f, "cogalois_flip"),
            NegationScheme::Custom(t) => write!(f, "custom:{t}"),
        }
    }
}

/// Scheme name parse failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error(
        "unknown negation scheme '{0}' (expected heyting, galois, galois_flip, \
         cogalois, cogalois_flip, or custom:FORMULA)"
    )]
    Unknown(String),
    #[error("bad custom scheme formula: {0}")]
    BadFormula(#[from] ParseError),
}

impl FromStr for NegationScheme {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self, SchemeError> {
        match s {
            "heyting" => Ok(NegationScheme::Heyting),
            "galois" => Ok(NegationScheme::Galois),
            "galois_flip" => Ok(NegationScheme::GaloisFlip),
            "cogalois" => Ok(NegationScheme::Cogalois),
            "cogalois_flip" => Ok(NegationScheme::CogaloisFlip),
            _ => match s.strip_prefix("custom:") {
                Some(body) => Ok(NegationScheme::Custom(parse(body)?)),
                None => Err(SchemeError::Unknown(s.to_string())),
            },
        }
    }
}

/// Tokens shared by the formula grammar and the structure grammar layered on
/// top of it in the calculus module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Atom(String),
    Top,
    Bot,
    And,
    Or,
    Imp,
    Excl,
    Tilde,
    BNegR,
    BNegL,
    WNegR,
    WNegL,
    LParen,
    RParen,
    UnitI,
    Sharp,
    At,
    Comma,
    SeqArrow,
    Turnstile,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Atom(a) => write!(f, "atom '{a}'"),
            Tok::Top => write!(f, "'T'"),
            Tok::Bot => write!(f, "'F'"),
            Tok::And => write!(f, "'&'"),
            Tok::Or => write!(f, "'|'"),
            Tok::Imp => write!(f, "'->'"),
            Tok::Excl => write!(f, "'-<'"),
            Tok::Tilde => write!(f, "'~'"),
            Tok::BNegR => write!(f, "'b>'"),
            Tok::BNegL => write!(f, "'b<'"),
            Tok::WNegR => write!(f, "'w>'"),
            Tok::WNegL => write!(f, "'w<'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::UnitI => write!(f, "'I'"),
            Tok::Sharp => write!(f, "'#'"),
            Tok::At => write!(f, "'@'"),
            Tok::Comma => write!(f, "','"),
            Tok::SeqArrow => write!(f, "'>>'"),
            Tok::Turnstile => write!(f, "'|-'"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub at: usize,
}

/// Lex a formula / structure / sequent text into tokens. Positions are
/// 0-based character offsets.
pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let at = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            'a'..='z' | '_' => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_ascii_lowercase() || chars[j].is_ascii_digit() || chars[j] == '_')
                {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                // A modal token needs its bracket immediately after the
                // letter: `b> p` lexes as b>, but `b > p` is an error and
                // `bb>` is the atom `bb` followed by a stray `>`.
                if j < chars.len() && (name == "b" || name == "w") {
                    match (name.as_str(), chars[j]) {
                        ("b", '>') => {
                            i = j + 1;
                            toks.push(Spanned { tok: Tok::BNegR, at });
                            continue;
                        }
                        ("b", '<') => {
                            i = j + 1;
                            toks.push(Spanned { tok: Tok::BNegL, at });
                            continue;
                        }
                        ("w", '>') => {
                            i = j + 1;
                            toks.push(Spanned { tok: Tok::WNegR, at });
                            continue;
                        }
                        ("w", '<') => {
                            i = j + 1;
                            toks.push(Spanned { tok: Tok::WNegL, at });
                            continue;
                        }
                        _ => {}
                    }
                }
                i = j;
                toks.push(Spanned { tok: Tok::Atom(name), at });
                continue;
            }
            'A'..='Z' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                i = j;
                match name.as_str() {
                    "T" => {
                        toks.push(Spanned { tok: Tok::Top, at });
                        continue;
                    }
                    "F" => {
                        toks.push(Spanned { tok: Tok::Bot, at });
                        continue;
                    }
                    "I" => {
                        toks.push(Spanned { tok: Tok::UnitI, at });
                        continue;
                    }
                    _ => {
                        return Err(ParseError::new(at, &[], format!("'{name}'")));
                    }
                }
            }
            '⊤' => Tok::Top,
            '⊥' => Tok::Bot,
            '∧' => Tok::And,
            '∨' => Tok::Or,
            '→' => Tok::Imp,
            '▶' => Tok::BNegR,
            '◀' => Tok::BNegL,
            '▷' => Tok::WNegR,
            '◁' => Tok::WNegL,
            '♯' => Tok::Sharp,
            '♭' => Tok::At,
            '⊢' => Tok::Turnstile,
            '&' => Tok::And,
            '~' => Tok::Tilde,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '#' => Tok::Sharp,
            '@' => Tok::At,
            ',' => Tok::Comma,
            '|' => {
                if chars.get(i + 1) == Some(&'-') {
                    i += 2;
                    toks.push(Spanned { tok: Tok::Turnstile, at });
                    continue;
                }
                Tok::Or
            }
            '-' | '−' => {
                let next = chars.get(i + 1);
                match next {
                    Some('>') => {
                        i += 2;
                        toks.push(Spanned { tok: Tok::Imp, at });
                        continue;
                    }
                    Some('<') => {
                        i += 2;
                        toks.push(Spanned { tok: Tok::Excl, at });
                        continue;
                    }
                    _ => {
                        let found = match next {
                            Some(c) => format!("'{c}'"),
                            None => "end of input".to_string(),
                        };
                        return Err(ParseError::new(i + 1, &["'>'", "'<'"], found));
                    }
                }
            }
            '>' => {
                if chars.get(i + 1) == Some(&'>') {
                    i += 2;
                    toks.push(Spanned { tok: Tok::SeqArrow, at });
                    continue;
                }
                return Err(ParseError::new(at, &[], "'>'"));
            }
            other => {
                return Err(ParseError::new(at, &[], format!("'{other}'")));
            }
        };
        i += 1;
        toks.push(Spanned { tok, at });
    }
    Ok(toks)
}

/// Token cursor shared by the formula parser and the structure parser.
pub(crate) struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    end: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        let toks = lex(text)?;
        Ok(Cursor { toks, pos: 0, end: text.chars().count() })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    pub(crate) fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// Offset of the current token, or of end-of-input.
    pub(crate) fn at(&self) -> usize {
        self.toks.get(self.pos).map(|s| s.at).unwrap_or(self.end)
    }

    /// Render the current token for an error message.
    pub(crate) fn found(&self) -> String {
        match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".to_string(),
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn err(&self, expected: &[&str]) -> ParseError {
        ParseError::new(self.at(), expected, self.found())
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Index of the current token in the token list (for lookahead scans).
    pub(crate) fn tok_index(&self) -> usize {
        self.pos
    }

    pub(crate) fn tok_at(&self, idx: usize) -> Option<&Tok> {
        self.toks.get(idx).map(|s| &s.tok)
    }
}

const PRIMARY_EXPECTED: &[&str] =
    &["an atom", "'T'", "'F'", "'('", "'b>'", "'b<'", "'w>'", "'w<'", "'~'"];

/// Parse a complete formula.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut cur = Cursor::new(text)?;
    let f = parse_formula(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.err(&["'&'", "'|'", "'-<'", "'->'", "end of input"]));
    }
    Ok(f)
}

/// Parse a formula from the cursor, stopping at the first token that cannot
/// continue it (used directly by the structure parser).
pub(crate) fn parse_formula(cur: &mut Cursor) -> Result<Formula, ParseError> {
    parse_imp(cur)
}

fn parse_imp(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let lhs = parse_excl(cur)?;
    if cur.eat(&Tok::Imp) {
        let rhs = parse_imp(cur)?;
        return Ok(Formula::imp(lhs, rhs));
    }
    Ok(lhs)
}

fn parse_excl(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let mut lhs = parse_or(cur)?;
    while cur.eat(&Tok::Excl) {
        let rhs = parse_or(cur)?;
        lhs = Formula::excl(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_or(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let mut lhs = parse_and(cur)?;
    while cur.eat(&Tok::Or) {
        let rhs = parse_and(cur)?;
        lhs = Formula::or(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_and(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let mut lhs = parse_unary(cur)?;
    while cur.eat(&Tok::And) {
        let rhs = parse_unary(cur)?;
        lhs = Formula::and(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_unary(cur: &mut Cursor) -> Result<Formula, ParseError> {
    match cur.peek() {
        Some(Tok::BNegR) => {
            cur.bump();
            Ok(Formula::bnegr(parse_unary(cur)?))
        }
        Some(Tok::BNegL) => {
            cur.bump();
            Ok(Formula::bnegl(parse_unary(cur)?))
        }
        Some(Tok::WNegR) => {
            cur.bump();
            Ok(Formula::wnegr(parse_unary(cur)?))
        }
        Some(Tok::WNegL) => {
            cur.bump();
            Ok(Formula::wnegl(parse_unary(cur)?))
        }
        Some(Tok::Tilde) => {
            cur.bump();
            Ok(Formula::neg(parse_unary(cur)?))
        }
        _ => parse_primary(cur),
    }
}

fn parse_primary(cur: &mut Cursor) -> Result<Formula, ParseError> {
    match cur.peek() {
        Some(Tok::Atom(_)) => {
            let Some(Tok::Atom(name)) = cur.bump() else { unreachable!() };
            Ok(Formula::Atom(name))
        }
        Some(Tok::Top) => {
            cur.bump();
            Ok(Formula::Top)
        }
        Some(Tok::Bot) => {
            cur.bump();
            Ok(Formula::Bot)
        }
        Some(Tok::LParen) => {
            cur.bump();
            let f = parse_imp(cur)?;
            if !cur.eat(&Tok::RParen) {
                return Err(cur.err(&["')'"]));
            }
            Ok(f)
        }
        _ => Err(cur.err(PRIMARY_EXPECTED)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn parses_connectives_with_documented_precedence() {
        assert_eq!(parse("p -> q").unwrap(), Formula::imp(p(), q()));
        // Unary binds tightest: `b> p & q` is `(b> p) & q`.
        assert_eq!(
            parse("b> p & q").unwrap(),
            Formula::and(Formula::bnegr(p()), q())
        );
        // `&` above `|` above `-<` above `->`.
        assert_eq!(
            parse("p & q | r").unwrap(),
            Formula::or(Formula::and(p(), q()), Formula::atom("r"))
        );
        assert_eq!(
            parse("p | q -< r").unwrap(),
            Formula::excl(Formula::or(p(), q()), Formula::atom("r"))
        );
        assert_eq!(
            parse("p -< q -> r").unwrap(),
            Formula::imp(Formula::excl(p(), q()), Formula::atom("r"))
        );
    }

    #[test]
    fn associativity() {
        assert_eq!(
            parse("p -> q -> r").unwrap(),
            Formula::imp(p(), Formula::imp(q(), Formula::atom("r")))
        );
        assert_eq!(
            parse("p -< q -< r").unwrap(),
            Formula::excl(Formula::excl(p(), q()), Formula::atom("r"))
        );
        assert_eq!(
            parse("p & q & r").unwrap(),
            Formula::and(Formula::and(p(), q()), Formula::atom("r"))
        );
    }

    #[test]
    fn tilde_is_sugar() {
        assert_eq!(parse("~p").unwrap(), Formula::neg(p()));
        assert_eq!(parse("~~p").unwrap(), Formula::neg(Formula::neg(p())));
        // The printer never emits the sugar.
        assert_eq!(parse("~~p").unwrap().to_string(), "(p -> F) -> F");
    }

    #[test]
    fn unary_chains_and_parens() {
        assert_eq!(
            parse("b> w< p").unwrap(),
            Formula::bnegr(Formula::wnegl(p()))
        );
        assert_eq!(
            parse("b> (p & q)").unwrap(),
            Formula::bnegr(Formula::and(p(), q()))
        );
        assert_eq!(parse("b> (p & q)").unwrap().to_string(), "b> (p & q)");
        assert_eq!(parse("b>p").unwrap(), Formula::bnegr(p()));
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(parse("▶p ∧ ⊤").unwrap(), parse("b> p & T").unwrap());
        assert_eq!(parse("◀p ∨ ⊥").unwrap(), parse("b< p | F").unwrap());
        assert_eq!(parse("p → ▷q").unwrap(), parse("p -> w> q").unwrap());
        assert_eq!(parse("p −< ◁q").unwrap(), parse("p -< w< q").unwrap());
    }

    #[test]
    fn printer_minimal_parens_examples() {
        assert_eq!(parse("(p -> q) -> r").unwrap().to_string(), "(p -> q) -> r");
        assert_eq!(parse("p -> (q -> r)").unwrap().to_string(), "p -> q -> r");
        assert_eq!(parse("(p & q) | r").unwrap().to_string(), "p & q | r");
        assert_eq!(parse("p & (q | r)").unwrap().to_string(), "p & (q | r)");
        assert_eq!(parse("p -< (q -< r)").unwrap().to_string(), "p -< (q -< r)");
        assert_eq!(parse("(p -< q) -< r").unwrap().to_string(), "p -< q -< r");
    }

    #[test]
    fn atoms_allow_digits_and_underscores() {
        assert_eq!(parse("p1 & q_2").unwrap(), Formula::and(Formula::atom("p1"), Formula::atom("q_2")));
        // `bb` is an atom, not a modal token.
        assert_eq!(parse("bb & w1").unwrap(), Formula::and(Formula::atom("bb"), Formula::atom("w1")));
    }

    #[test]
    fn modal_token_requires_adjacent_bracket() {
        // `b > p` does not lex as a modal token: the stray `>` is rejected.
        let err = parse("b > p").unwrap_err();
        assert_eq!(err.at, 2);
        assert_eq!(err.found, "'>'");
    }

    #[test]
    fn error_positions_and_expectations() {
        let err = parse("p &").unwrap_err();
        assert_eq!(err.at, 3);
        assert_eq!(err.found, "end of input");
        assert!(err.expected.contains(&"an atom".to_string()));

        let err = parse("").unwrap_err();
        assert_eq!(err.at, 0);
        assert_eq!(err.found, "end of input");

        let err = parse("p q").unwrap_err();
        assert_eq!(err.at, 2);
        assert_eq!(err.found, "atom 'q'");
        assert!(err.expected.contains(&"end of input".to_string()));

        let err = parse("(p -> q").unwrap_err();
        assert_eq!(err.at, 7);
        assert_eq!(err.expected, vec!["')'".to_string()]);

        // Structure-level tokens are not formulas.
        let err = parse("p , q").unwrap_err();
        assert_eq!(err.found, "','");
    }

    #[test]
    fn display_roundtrip_hand_cases() {
        for text in [
            "p",
            "T",
            "F",
            "p & q",
            "p | q & r",
            "(p | q) & r",
            "p -> q -> r",
            "(p -> q) -> r",
            "p -< q",
            "b> p",
            "w< (p -< q)",
            "b< b> w> w< p",
            "b> (p | q) -< r",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(f.to_string(), text);
            assert_eq!(parse(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn subformulas_postorder_dedup() {
        let f = parse("p & (p -> q)").unwrap();
        let subs: Vec<String> = f.subformulas().iter().map(|s| s.to_string()).collect();
        assert_eq!(subs, vec!["p", "q", "p -> q", "p & (p -> q)"]);
    }

    #[test]
    fn depth_counts_connectives() {
        assert_eq!(parse("p").unwrap().depth(), 0);
        assert_eq!(parse("b> p").unwrap().depth(), 1);
        assert_eq!(parse("p & b> p").unwrap().depth(), 2);
        assert_eq!(parse("~~p").unwrap().depth(), 2);
    }

    #[test]
    fn schemes_apply_and_parse() {
        let f = p();
        assert_eq!(
            "heyting".parse::<NegationScheme>().unwrap().apply(&f),
            parse("(p -> F) -> F").unwrap()
        );
        assert_eq!(
            "galois".parse::<NegationScheme>().unwrap().apply(&f),
            parse("w> b< p").unwrap()
        );
        assert_eq!(
            "galois_flip".parse::<NegationScheme>().unwrap().apply(&f),
            parse("b< w> p").unwrap()
        );
        assert_eq!(
            "cogalois".parse::<NegationScheme>().unwrap().apply(&f),
            parse("b> w< p").unwrap()
        );
        assert_eq!(
            "cogalois_flip".parse::<NegationScheme>().unwrap().apply(&f),
            parse("w< b> p").unwrap()
        );
        let custom = "custom:b> a & (a -> F)".parse::<NegationScheme>().unwrap();
        assert_eq!(
            custom.apply(&q()),
            parse("b> q & (q -> F)").unwrap()
        );
        assert!(matches!(
            "boolean".parse::<NegationScheme>(),
            Err(SchemeError::Unknown(_))
        ));
        assert!(matches!(
            "custom:p &".parse::<NegationScheme>(),
            Err(SchemeError::BadFormula(_))
        ));
    }

    #[test]
    fn scheme_template_uses_hole_atom() {
        let t = NegationScheme::Cogalois.template();
        assert_eq!(t.to_string(), "b> w< a");
    }
}
