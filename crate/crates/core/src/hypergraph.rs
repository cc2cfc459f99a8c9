//! Semantic hypergraph values and their textual notation.
//!
//! A hyperedge is either an atom such as `plays/P` or a parenthesised
//! sequence whose first element is the connector:
//!
//! ```text
//! (says/P john/C (plays/P mary/C chess/C))
//! ```
//!
//! Atoms are `label/T` or `label/T.roles`, where `T` is a single uppercase
//! type letter and `roles` carries one character per argument position.
//! Parentheses and whitespace are the only meta-characters; there is no
//! quoting. Labels are case-folded to lowercase when parsed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unbalanced parentheses at byte {0}")]
    UnbalancedParens(usize),
    #[error("hyperedge with no elements at byte {0}")]
    EmptyEdge(usize),
    #[error("bad atom `{0}`")]
    BadAtom(String),
    #[error("empty input")]
    EmptyInput,
    #[error("unexpected trailing input at byte {0}")]
    TrailingInput(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("hyperedge is not a relation: {0}")]
    NotARelation(String),
}

/// Type code of an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AtomType {
    Concept,
    Predicate,
    Modifier,
    Builder,
    Conjunction,
    Other(char),
}

impl AtomType {
    pub fn from_letter(c: char) -> Option<AtomType> {
        Some(match c {
            'C' => AtomType::Concept,
            'P' => AtomType::Predicate,
            'M' => AtomType::Modifier,
            'B' => AtomType::Builder,
            'J' => AtomType::Conjunction,
            c if c.is_ascii_uppercase() => AtomType::Other(c),
            _ => return None,
        })
    }

    pub fn letter(self) -> char {
        match self {
            AtomType::Concept => 'C',
            AtomType::Predicate => 'P',
            AtomType::Modifier => 'M',
            AtomType::Builder => 'B',
            AtomType::Conjunction => 'J',
            AtomType::Other(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    label: String,
    kind: AtomType,
    roles: Option<String>,
}

fn is_meta(c: char) -> bool {
    c == '(' || c == ')' || c.is_whitespace()
}

impl Atom {
    /// Builds an atom, folding the label to lowercase.
    pub fn new(label: &str, kind: AtomType, roles: Option<&str>) -> Result<Atom, ParseError> {
        let bad = || ParseError::BadAtom(format!("{label}/{}", kind.letter()));
        if label.is_empty() || label.chars().any(is_meta) {
            return Err(bad());
        }
        if let Some(r) = roles {
            if r.is_empty() || r.chars().any(is_meta) {
                return Err(bad());
            }
        }
        if AtomType::from_letter(kind.letter()) != Some(kind) {
            return Err(bad());
        }
        Ok(Atom {
            label: label.to_lowercase(),
            kind,
            roles: roles.map(str::to_owned),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> AtomType {
        self.kind
    }

    pub fn roles(&self) -> Option<&str> {
        self.roles.as_deref()
    }

    /// Same atom without its role annotation.
    pub fn root(&self) -> Atom {
        Atom {
            label: self.label.clone(),
            kind: self.kind,
            roles: None,
        }
    }

    pub fn is_predicate(&self) -> bool {
        self.kind == AtomType::Predicate
    }
}

impl FromStr for Atom {
    type Err = ParseError;

    fn from_str(token: &str) -> Result<Atom, ParseError> {
        let bad = || ParseError::BadAtom(token.to_owned());
        let slash = token.rfind('/').ok_or_else(bad)?;
        let (label, code) = (&token[..slash], &token[slash + 1..]);
        let mut chars = code.chars();
        let kind = chars
            .next()
            .and_then(AtomType::from_letter)
            .ok_or_else(bad)?;
        let rest = chars.as_str();
        let roles = match rest.strip_prefix('.') {
            Some(r) => Some(r),
            None if rest.is_empty() => None,
            None => return Err(bad()),
        };
        Atom::new(label, kind, roles).map_err(|_| bad())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.label, self.kind.letter())?;
        if let Some(r) = &self.roles {
            write!(f, ".{r}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hyperedge {
    Atom(Atom),
    Edge(Vec<Hyperedge>),
}

impl Drop for Hyperedge {
    // flatten before dropping so deep trees don't recurse
    fn drop(&mut self) {
        let Hyperedge::Edge(v) = self else { return };
        if v.iter().all(|h| matches!(h, Hyperedge::Atom(_))) {
            return;
        }
        let mut stack = std::mem::take(v);
        while let Some(mut h) = stack.pop() {
            if let Hyperedge::Edge(inner) = &mut h {
                stack.append(inner);
            }
        }
    }
}

impl From<Atom> for Hyperedge {
    fn from(a: Atom) -> Self {
        Hyperedge::Atom(a)
    }
}

impl Hyperedge {
    /// Non-atomic edge. Panics on an empty element list.
    pub fn edge(elements: Vec<Hyperedge>) -> Hyperedge {
        assert!(!elements.is_empty(), "hyperedge needs a connector");
        Hyperedge::Edge(elements)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Hyperedge::Atom(_))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Hyperedge::Atom(a) => Some(a),
            Hyperedge::Edge(_) => None,
        }
    }

    pub fn elements(&self) -> &[Hyperedge] {
        match self {
            Hyperedge::Atom(_) => &[],
            Hyperedge::Edge(v) => v,
        }
    }

    /// First element of a non-atomic edge.
    pub fn connector(&self) -> Option<&Hyperedge> {
        self.elements().first()
    }

    /// Elements after the connector; empty for atoms.
    pub fn arguments(&self) -> &[Hyperedge] {
        match self {
            Hyperedge::Atom(_) => &[],
            Hyperedge::Edge(v) => &v[1..],
        }
    }

    /// All atoms reachable from this edge, in pre-order, with multiplicity.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(h) = stack.pop() {
            match h {
                Hyperedge::Atom(a) => out.push(a),
                Hyperedge::Edge(v) => stack.extend(v.iter().rev()),
            }
        }
        out
    }

    /// Every sub-hyperedge including `self` and atoms, in pre-order.
    pub fn subedges(&self) -> Vec<&Hyperedge> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(h) = stack.pop() {
            out.push(h);
            if let Hyperedge::Edge(v) = h {
                stack.extend(v.iter().rev());
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            Hyperedge::Atom(_) => 0,
            Hyperedge::Edge(v) => 1 + v.iter().map(Hyperedge::depth).max().unwrap_or(0),
        }
    }

    /// The predicate atom governing this edge, if it is a relation.
    ///
    /// Starts at the connector; modifier applications such as
    /// `(not/M found/P)` are followed into their last element, other
    /// compound connectors into their own connector.
    pub fn predicate_atom(&self) -> Option<&Atom> {
        let mut cur = self.connector()?;
        loop {
            match cur {
                Hyperedge::Atom(a) => return a.is_predicate().then_some(a),
                Hyperedge::Edge(v) => {
                    let head = &v[0];
                    cur = match head.as_atom() {
                        Some(a) if a.kind() == AtomType::Modifier && v.len() > 1 => &v[v.len() - 1],
                        _ => head,
                    };
                }
            }
        }
    }

    pub fn is_relation(&self) -> bool {
        self.predicate_atom().is_some()
    }

    /// Subject argument of a relation.
    ///
    /// Uses the position of `s` in the predicate's role string; without a
    /// role string the first argument is the subject.
    pub fn subject_of(&self) -> Result<Option<&Hyperedge>, StructureError> {
        let pred = self
            .predicate_atom()
            .ok_or_else(|| StructureError::NotARelation(self.to_string()))?;
        let args = self.arguments();
        let pos = match pred.roles() {
            Some(roles) => match roles.chars().position(|c| c == 's') {
                Some(p) => p,
                None => return Ok(None),
            },
            None => 0,
        };
        Ok(args.get(pos))
    }
}

impl fmt::Display for Hyperedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hyperedge::Atom(a) => a.fmt(f),
            Hyperedge::Edge(v) => {
                f.write_str("(")?;
                for (i, h) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    h.fmt(f)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for Hyperedge {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_notation(s)
    }
}

/// Canonical single-space notation.
pub fn serialize(h: &Hyperedge) -> String {
    h.to_string()
}

/// Parses one complete hyperedge expression.
///
/// Iterative, so arbitrarily deep nesting cannot overflow the stack.
pub fn parse_notation(text: &str) -> Result<Hyperedge, ParseError> {
    // open frames: (byte offset of '(', elements so far)
    let mut frames: Vec<(usize, Vec<Hyperedge>)> = Vec::new();
    let mut result: Option<Hyperedge> = None;
    let mut chars = text.char_indices().peekable();

    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if result.is_some() {
            return Err(if c == ')' {
                ParseError::UnbalancedParens(pos)
            } else {
                ParseError::TrailingInput(pos)
            });
        }
        let done = match c {
            '(' => {
                chars.next();
                frames.push((pos, Vec::new()));
                None
            }
            ')' => {
                chars.next();
                let (open, elems) = frames.pop().ok_or(ParseError::UnbalancedParens(pos))?;
                if elems.is_empty() {
                    return Err(ParseError::EmptyEdge(open));
                }
                Some(Hyperedge::Edge(elems))
            }
            _ => {
                let start = pos;
                let mut end = text.len();
                while let Some(&(p, c)) = chars.peek() {
                    if is_meta(c) {
                        end = p;
                        break;
                    }
                    chars.next();
                }
                Some(Hyperedge::Atom(text[start..end].parse()?))
            }
        };
        if let Some(h) = done {
            match frames.last_mut() {
                Some((_, elems)) => elems.push(h),
                None => result = Some(h),
            }
        }
    }

    if let Some((open, _)) = frames.last() {
        return Err(ParseError::UnbalancedParens(*open));
    }
    result.ok_or(ParseError::EmptyInput)
}

/// One parsed sentence of an article abstract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub article_id: String,
    pub sentence_index: usize,
    pub hyperedge: Hyperedge,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("line {line}: expected `article_id<TAB>sentence_index<TAB>hyperedge`")]
    Shape { line: usize },
    #[error("line {line}: bad sentence index `{value}`")]
    Index { line: usize, value: String },
    #[error("line {line}: {source}")]
    Notation { line: usize, source: ParseError },
}

impl RecordError {
    pub fn line(&self) -> usize {
        match self {
            RecordError::Shape { line }
            | RecordError::Index { line, .. }
            | RecordError::Notation { line, .. } => *line,
        }
    }
}

/// Parses a tab-separated hyperedge file, one result per non-comment line,
/// each paired with its 1-based line number.
pub fn parse_records(text: &str) -> Vec<Result<(usize, SentenceRecord), RecordError>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_end_matches('\r');
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.splitn(3, '\t');
        let (Some(id), Some(idx), Some(notation)) = (parts.next(), parts.next(), parts.next())
        else {
            out.push(Err(RecordError::Shape { line }));
            continue;
        };
        let id = id.trim();
        if id.is_empty() {
            out.push(Err(RecordError::Shape { line }));
            continue;
        }
        let rec = idx
            .trim()
            .parse::<usize>()
            .map_err(|_| RecordError::Index {
                line,
                value: idx.to_owned(),
            })
            .and_then(|sentence_index| {
                parse_notation(notation)
                    .map(|hyperedge| {
                        let rec = SentenceRecord {
                            article_id: id.to_owned(),
                            sentence_index,
                            hyperedge,
                        };
                        (line, rec)
                    })
                    .map_err(|source| RecordError::Notation { line, source })
            });
        out.push(rec);
    }
    out
}
