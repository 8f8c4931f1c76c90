//! Readers and writer for the three input formats.
//!
//! * Ontologies use a subset of OWL 2 functional-style syntax: prefix
//!   declarations, one `Ontology(...)` block, entity declarations and the
//!   axiom forms of [`Axiom`]. `//` starts a comment.
//! * Rule files hold one human-readable rule per line,
//!   `Person(?p) ^ salary(?p, ?s) -> Employee(?p)`. `#` starts a comment.
//! * Query files hold a single rule whose head is `sqwrl:select(?v, ...)`.
//!
//! Rule and query predicates are resolved against an already loaded ontology
//! so that each atom is typed as a class, object-property or data-property
//! atom at parse time.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::engine::{is_valid_variable, Atom, BuiltinOp, Query, Rule, RuleError, Term};
use crate::model::{is_local_char, vocab, Axiom, Datatype, EntityKind, Iri, Literal, ModelError, Ontology, PrefixMap};

/// A syntax error with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message} (at `{snippet}`)")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub snippet: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("{0}")]
    Syntax(#[from] ParseError),

    #[error("{line}:{column}: {message}")]
    Invalid {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(
        "{line}:{column}: rule is not DL-safe: head variable ?{variable} does not occur in a non-builtin body atom"
    )]
    DlSafety {
        line: usize,
        column: usize,
        variable: String,
    },

    #[error("{line}:{column}: selected variable ?{variable} does not occur in a non-builtin body atom")]
    Projection {
        line: usize,
        column: usize,
        variable: String,
    },

    #[error("expected a {expected} document, got {found}")]
    WrongKind {
        expected: DocumentKind,
        found: DocumentKind,
    },
}

impl LoadError {
    pub fn line(&self) -> Option<usize> {
        match self {
            LoadError::Syntax(e) => Some(e.line),
            LoadError::Invalid { line, .. } | LoadError::DlSafety { line, .. } | LoadError::Projection { line, .. } => {
                Some(*line)
            }
            LoadError::WrongKind { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentKind {
    Ontology,
    Rules,
    Query,
}

impl fmt::Display for DocumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DocumentKind::Ontology => "ontology",
            DocumentKind::Rules => "rules",
            DocumentKind::Query => "query",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDocument {
    pub path: String,
    pub text: String,
    pub kind: DocumentKind,
}

impl SourceDocument {
    pub fn new(path: impl Into<String>, text: impl Into<String>, kind: DocumentKind) -> Self {
        SourceDocument {
            path: path.into(),
            text: text.into(),
            kind,
        }
    }

    pub fn read(path: impl AsRef<Path>, kind: DocumentKind) -> io::Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Ok(Self::new(path.display().to_string(), text, kind))
    }

    fn expect(&self, kind: DocumentKind) -> Result<(), LoadError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(LoadError::WrongKind {
                expected: kind,
                found: self.kind,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Equals,
    Caret,
    DoubleCaret,
    Arrow,
    IriRef(String),
    Name { prefix: Option<String>, local: String },
    Variable(String),
    Str(String),
    Number(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Caret => "`^`".into(),
            Tok::DoubleCaret => "`^^`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::IriRef(_) => "an IRI".into(),
            Tok::Name { .. } => "a name".into(),
            Tok::Variable(_) => "a variable".into(),
            Tok::Str(_) => "a string literal".into(),
            Tok::Number(_) => "a number".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

#[derive(Debug, Clone, Copy)]
enum Comments {
    DoubleSlash,
    Hash,
}

/// Byte offset to 1-based line/column (columns count characters).
struct Positions<'a> {
    text: &'a str,
    line_starts: Vec<usize>,
}

impl<'a> Positions<'a> {
    fn new(text: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        Positions { text, line_starts }
    }

    fn locate(&self, offset: usize) -> (usize, usize) {
        let offset = offset.min(self.text.len());
        let line = self.line_starts.partition_point(|&s| s <= offset);
        let start = self.line_starts[line - 1];
        let column = self.text[start..offset].chars().count() + 1;
        (line, column)
    }

    fn error(&self, start: usize, end: usize, message: impl Into<String>) -> ParseError {
        let (line, column) = self.locate(start);
        let snippet = if start >= self.text.len() {
            "end of input".to_string()
        } else {
            let boundary = |mut i: usize| {
                while !self.text.is_char_boundary(i) {
                    i += 1;
                }
                i
            };
            let start = boundary(start);
            let end = boundary(end.clamp(start + 1, self.text.len()));
            let raw = &self.text[start..end];
            let raw = raw.lines().next().unwrap_or(raw);
            raw.chars().take(40).collect()
        };
        ParseError {
            line,
            column,
            message: message.into(),
            snippet,
        }
    }
}

fn lex(text: &str, comments: Comments) -> Result<Vec<Token>, ParseError> {
    let pos = Positions::new(text);
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let char_at = |i: usize| text[i..].chars().next();

    while i < text.len() {
        let c = char_at(i).expect("in bounds");
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let comment = match comments {
            Comments::DoubleSlash => text[i..].starts_with("//"),
            Comments::Hash => c == '#',
        };
        if comment {
            i = text[i..].find('\n').map_or(text.len(), |n| i + n);
            continue;
        }
        let start = i;
        let tok = match c {
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            '=' => {
                i += 1;
                Tok::Equals
            }
            '^' if bytes.get(i + 1) == Some(&b'^') => {
                i += 2;
                Tok::DoubleCaret
            }
            '^' => {
                i += 1;
                Tok::Caret
            }
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::Arrow
            }
            '<' => {
                let Some(close) = text[i + 1..].find(|ch: char| ch == '>' || ch.is_whitespace()) else {
                    return Err(pos.error(start, text.len(), "unterminated IRI"));
                };
                let end = i + 1 + close;
                if bytes[end] != b'>' {
                    return Err(pos.error(start, end, "IRIs may not contain whitespace"));
                }
                let iri = text[i + 1..end].to_string();
                if iri.is_empty() {
                    return Err(pos.error(start, end + 1, "empty IRI"));
                }
                i = end + 1;
                Tok::IriRef(iri)
            }
            '"' => {
                let mut value = String::new();
                let mut j = i + 1;
                loop {
                    let Some(ch) = char_at(j).filter(|_| j < text.len()) else {
                        return Err(pos.error(start, j, "unterminated string literal"));
                    };
                    j += ch.len_utf8();
                    match ch {
                        '"' => break,
                        '\\' => {
                            let esc = char_at(j).filter(|_| j < text.len());
                            match esc {
                                Some('"') => value.push('"'),
                                Some('\\') => value.push('\\'),
                                Some('n') => value.push('\n'),
                                Some('t') => value.push('\t'),
                                _ => return Err(pos.error(j - 1, j + 1, "invalid escape sequence")),
                            }
                            j += esc.map_or(0, char::len_utf8);
                        }
                        _ => value.push(ch),
                    }
                }
                i = j;
                Tok::Str(value)
            }
            '?' => {
                let len = text[i + 1..]
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                    .unwrap_or(text.len() - i - 1);
                let name = &text[i + 1..i + 1 + len];
                if !is_valid_variable(name) {
                    return Err(pos.error(start, i + 1 + len, "variable names must match [A-Za-z][A-Za-z0-9_]*"));
                }
                i += 1 + len;
                Tok::Variable(name.to_string())
            }
            c if c.is_ascii_digit() || (c == '-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) => {
                let mut j = i + 1;
                while j < text.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    j += 1;
                }
                // a trailing '.' is not part of the number
                while bytes[j - 1] == b'.' {
                    j -= 1;
                }
                i = j;
                Tok::Number(text[start..j].to_string())
            }
            c if c.is_alphabetic() || c == '_' || c == ':' => {
                let word_end = |from: usize| {
                    let mut j = from;
                    while let Some(ch) = char_at(j).filter(|_| j < text.len()) {
                        if is_local_char(ch) {
                            j += ch.len_utf8();
                        } else {
                            break;
                        }
                    }
                    while j > from && bytes[j - 1] == b'.' {
                        j -= 1;
                    }
                    j
                };
                let head_end = if c == ':' { i } else { word_end(i) };
                if bytes.get(head_end) == Some(&b':') {
                    let local_end = word_end(head_end + 1);
                    let prefix = text[i..head_end].to_string();
                    let local = text[head_end + 1..local_end].to_string();
                    i = local_end;
                    Tok::Name {
                        prefix: Some(prefix),
                        local,
                    }
                } else {
                    i = head_end;
                    Tok::Name {
                        prefix: None,
                        local: text[start..head_end].to_string(),
                    }
                }
            }
            other => {
                return Err(pos.error(
                    start,
                    start + other.len_utf8(),
                    format!("unexpected character {other:?}"),
                ))
            }
        };
        tokens.push(Token { tok, start, end: i });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        start: text.len(),
        end: text.len(),
    });
    Ok(tokens)
}

struct Cursor<'a> {
    tokens: Vec<Token>,
    idx: usize,
    pos: Positions<'a>,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, comments: Comments) -> Result<Self, ParseError> {
        Ok(Cursor {
            tokens: lex(text, comments)?,
            idx: 0,
            pos: Positions::new(text),
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.idx]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if t.tok != Tok::Eof {
            self.idx += 1;
        }
        t
    }

    fn error_at(&self, token: &Token, message: impl Into<String>) -> ParseError {
        self.pos.error(token.start, token.end, message)
    }

    fn unexpected(&self, token: &Token, wanted: &str) -> ParseError {
        self.error_at(token, format!("expected {wanted}, found {}", token.tok.describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        let t = self.next();
        if t.tok == tok {
            Ok(t)
        } else {
            Err(self.unexpected(&t, &tok.describe()))
        }
    }

    fn expect_keyword(&mut self, keyword: &str) -> Result<Token, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Name { prefix: None, local } if local == keyword => Ok(t),
            _ => Err(self.unexpected(&t, &format!("`{keyword}`"))),
        }
    }

    fn at_keyword(&self, keyword: &str) -> bool {
        matches!(&self.peek().tok, Tok::Name { prefix: None, local } if local == keyword)
    }

    fn locate(&self, token: &Token) -> (usize, usize) {
        self.pos.locate(token.start)
    }
}

/// An IRI reference: `<...>` or `prefix:local`.
fn resolve_ref(cur: &Cursor, token: &Token, prefixes: &PrefixMap) -> Result<Iri, ParseError> {
    match &token.tok {
        Tok::IriRef(s) => Iri::new(s.clone()).map_err(|e| cur.error_at(token, e.to_string())),
        Tok::Name { prefix: Some(p), local } => prefixes
            .resolve(p, local)
            .ok_or_else(|| cur.error_at(token, format!("undefined prefix `{p}:`"))),
        Tok::Name { prefix: None, local } => Err(cur.error_at(
            token,
            format!("expected an IRI or prefixed name, found bare name `{local}` (did you mean `:{local}`?)"),
        )),
        _ => Err(cur.unexpected(token, "an IRI or prefixed name")),
    }
}

fn parse_literal(cur: &mut Cursor, prefixes: &PrefixMap) -> Result<Literal, ParseError> {
    let t = cur.next();
    let Tok::Str(lexical) = &t.tok else {
        return Err(cur.unexpected(&t, "a literal"));
    };
    let datatype = if cur.peek().tok == Tok::DoubleCaret {
        cur.next();
        parse_datatype(cur, prefixes)?
    } else {
        Datatype::String
    };
    Literal::new(lexical, datatype).map_err(|e| cur.error_at(&t, e.to_string()))
}

fn parse_datatype(cur: &mut Cursor, prefixes: &PrefixMap) -> Result<Datatype, ParseError> {
    let t = cur.next();
    let iri = resolve_ref(cur, &t, prefixes)?;
    Datatype::from_iri(&iri).ok_or_else(|| {
        cur.error_at(
            &t,
            "unsupported datatype: expected xsd:string, xsd:integer, xsd:decimal, xsd:boolean or xsd:date",
        )
    })
}

enum Item {
    Declaration(Iri, EntityKind),
    Axiom(Axiom),
}

/// Parses and load-validates an ontology document.
pub fn parse_ontology(doc: &SourceDocument) -> Result<Ontology, LoadError> {
    doc.expect(DocumentKind::Ontology)?;
    let mut cur = Cursor::new(&doc.text, Comments::DoubleSlash)?;
    let mut prefixes = PrefixMap::default();

    while cur.at_keyword("Prefix") {
        cur.next();
        cur.expect(Tok::LParen)?;
        let t = cur.next();
        let label = match &t.tok {
            Tok::Name { prefix: Some(p), local } if local.is_empty() => p.clone(),
            _ => return Err(cur.unexpected(&t, "a prefix name such as `:` or `edu:`").into()),
        };
        cur.expect(Tok::Equals)?;
        let t = cur.next();
        let Tok::IriRef(ns) = &t.tok else {
            return Err(cur.unexpected(&t, "a namespace IRI").into());
        };
        prefixes.insert(label, ns.clone());
        cur.expect(Tok::RParen)?;
    }

    cur.expect_keyword("Ontology")?;
    cur.expect(Tok::LParen)?;
    let t = cur.next();
    let ontology_iri = resolve_ref(&cur, &t, &prefixes)?;

    let mut items: Vec<(Token, Item)> = Vec::new();
    loop {
        let t = cur.peek().clone();
        match &t.tok {
            Tok::RParen => {
                cur.next();
                break;
            }
            Tok::Name { prefix: None, .. } => {
                let item = parse_item(&mut cur, &prefixes)?;
                items.push((t, item));
            }
            _ => return Err(cur.unexpected(&t, "an axiom or `)`").into()),
        }
    }
    let t = cur.next();
    if t.tok != Tok::Eof {
        return Err(cur.unexpected(&t, "end of input").into());
    }

    let mut ontology = Ontology::new(ontology_iri);
    *ontology.prefixes_mut() = prefixes;
    let invalid = |cur: &Cursor, token: &Token, err: ModelError, prefixes: &PrefixMap| {
        let (line, column) = cur.locate(token);
        LoadError::Invalid {
            line,
            column,
            message: err.describe(prefixes),
        }
    };
    // declarations may appear anywhere in the block
    for (token, item) in &items {
        if let Item::Declaration(iri, kind) = item {
            ontology
                .declare(iri.clone(), *kind)
                .map_err(|e| invalid(&cur, token, e, ontology.prefixes()))?;
        }
    }
    for (token, item) in items {
        if let Item::Axiom(axiom) = item {
            let rendered = axiom.render(ontology.prefixes());
            ontology.add_axiom(axiom).map_err(|e| {
                let (line, column) = cur.locate(&token);
                LoadError::Invalid {
                    line,
                    column,
                    message: format!("{} in {rendered}", e.describe(ontology.prefixes())),
                }
            })?;
        }
    }
    Ok(ontology)
}

fn parse_item(cur: &mut Cursor, prefixes: &PrefixMap) -> Result<Item, ParseError> {
    let head = cur.next();
    let Tok::Name { local: keyword, .. } = &head.tok else {
        unreachable!("caller checked for a name");
    };
    let keyword = keyword.clone();
    cur.expect(Tok::LParen)?;

    let entity = |cur: &mut Cursor| -> Result<Iri, ParseError> {
        let t = cur.next();
        resolve_ref(cur, &t, prefixes)
    };

    let item = match keyword.as_str() {
        "Declaration" => {
            let t = cur.next();
            let kind = match &t.tok {
                Tok::Name { prefix: None, local } => EntityKind::from_keyword(local),
                _ => None,
            }
            .ok_or_else(|| {
                cur.unexpected(
                    &t,
                    "Class, ObjectProperty, DataProperty, AnnotationProperty or NamedIndividual",
                )
            })?;
            cur.expect(Tok::LParen)?;
            let iri = entity(cur)?;
            cur.expect(Tok::RParen)?;
            Item::Declaration(iri, kind)
        }
        "SubClassOf" => Item::Axiom(Axiom::SubClassOf {
            sub: entity(cur)?,
            sup: entity(cur)?,
        }),
        "ObjectPropertyDomain" => Item::Axiom(Axiom::ObjectPropertyDomain {
            property: entity(cur)?,
            class: entity(cur)?,
        }),
        "ObjectPropertyRange" => Item::Axiom(Axiom::ObjectPropertyRange {
            property: entity(cur)?,
            class: entity(cur)?,
        }),
        "DataPropertyDomain" => Item::Axiom(Axiom::DataPropertyDomain {
            property: entity(cur)?,
            class: entity(cur)?,
        }),
        "DataPropertyRange" => Item::Axiom(Axiom::DataPropertyRange {
            property: entity(cur)?,
            datatype: parse_datatype(cur, prefixes)?,
        }),
        "DisjointClasses" => {
            let mut classes = vec![entity(cur)?, entity(cur)?];
            while cur.peek().tok != Tok::RParen {
                classes.push(entity(cur)?);
            }
            Item::Axiom(Axiom::DisjointClasses(classes))
        }
        "FunctionalObjectProperty" => Item::Axiom(Axiom::FunctionalObjectProperty(entity(cur)?)),
        "FunctionalDataProperty" => Item::Axiom(Axiom::FunctionalDataProperty(entity(cur)?)),
        "ClassAssertion" => Item::Axiom(Axiom::ClassAssertion {
            class: entity(cur)?,
            individual: entity(cur)?,
        }),
        "ObjectPropertyAssertion" => Item::Axiom(Axiom::ObjectPropertyAssertion {
            property: entity(cur)?,
            subject: entity(cur)?,
            object: entity(cur)?,
        }),
        "DataPropertyAssertion" => Item::Axiom(Axiom::DataPropertyAssertion {
            property: entity(cur)?,
            subject: entity(cur)?,
            value: parse_literal(cur, prefixes)?,
        }),
        "AnnotationAssertion" => Item::Axiom(Axiom::AnnotationAssertion {
            property: entity(cur)?,
            subject: entity(cur)?,
            value: parse_literal(cur, prefixes)?,
        }),
        _ => return Err(cur.error_at(&head, format!("unsupported axiom `{keyword}`"))),
    };
    cur.expect(Tok::RParen)?;
    Ok(item)
}

/// Canonical functional-syntax text: declared prefixes, declarations sorted
/// by (kind, IRI), then axioms sorted by (variant name, arguments).
pub fn serialize_ontology(ontology: &Ontology) -> String {
    let prefixes = ontology.prefixes();
    let mut out = String::new();
    for (label, ns) in prefixes.declared() {
        out.push_str(&format!("Prefix({label}:=<{ns}>)\n"));
    }
    if !out.is_empty() {
        out.push('\n');
    }
    out.push_str(&format!("Ontology({}\n", ontology.iri()));

    let mut declarations: Vec<(&str, String)> = ontology
        .entities()
        .map(|e| (e.kind.keyword(), prefixes.render_iri(&e.iri)))
        .collect();
    declarations.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    for (kind, iri) in declarations {
        out.push_str(&format!("    Declaration({kind}({iri}))\n"));
    }

    let mut axioms: Vec<&Axiom> = ontology.axioms().collect();
    axioms.sort_by(|a, b| a.canonical_cmp(b));
    for axiom in axioms {
        out.push_str("    ");
        out.push_str(&axiom.render(prefixes));
        out.push('\n');
    }
    out.push_str(")\n");
    out
}

enum Predicate {
    Entity(Iri, EntityKind),
    Builtin(BuiltinOp),
    Select,
}

struct RuleParser<'o, 'a> {
    cur: Cursor<'a>,
    ontology: &'o Ontology,
}

impl<'o, 'a> RuleParser<'o, 'a> {
    fn invalid(&self, token: &Token, message: String) -> LoadError {
        let (line, column) = self.cur.locate(token);
        LoadError::Invalid { line, column, message }
    }

    fn predicate(&mut self) -> Result<(Token, Predicate), LoadError> {
        let t = self.cur.next();
        let prefixes = self.ontology.prefixes();
        let iri = match &t.tok {
            // bare names resolve against the default prefix
            Tok::Name { prefix: None, local } => prefixes
                .resolve("", local)
                .ok_or_else(|| self.cur.error_at(&t, "bare predicate names need a default `:` prefix"))?,
            Tok::Name { .. } | Tok::IriRef(_) => resolve_ref(&self.cur, &t, prefixes)?,
            Tok::Arrow => return Err(self.cur.error_at(&t, "rule body is empty").into()),
            _ => return Err(self.cur.unexpected(&t, "an atom").into()),
        };
        if iri.as_str() == vocab::SQWRL_SELECT {
            return Ok((t, Predicate::Select));
        }
        if let Some(op) = iri.as_str().strip_prefix(vocab::SWRLB) {
            let op = BuiltinOp::from_name(op).ok_or_else(|| {
                self.cur.error_at(
                    &t,
                    "unsupported built-in: expected swrlb:equal, notEqual, lessThan, \
                     lessThanOrEqual, greaterThan or greaterThanOrEqual",
                )
            })?;
            return Ok((t, Predicate::Builtin(op)));
        }
        let kind = [EntityKind::Class, EntityKind::ObjectProperty, EntityKind::DataProperty]
            .into_iter()
            .find(|k| self.ontology.has_kind(&iri, *k))
            .ok_or_else(|| {
                self.invalid(
                    &t,
                    format!(
                        "unknown predicate {}: not a declared class or property",
                        prefixes.render_iri(&iri)
                    ),
                )
            })?;
        Ok((t, Predicate::Entity(iri, kind)))
    }

    fn term(&mut self) -> Result<Term, LoadError> {
        let t = self.cur.peek().clone();
        let prefixes = self.ontology.prefixes();
        let term = match &t.tok {
            Tok::Variable(v) => {
                self.cur.next();
                Term::Variable(v.clone())
            }
            Tok::Str(_) => Term::Literal(parse_literal(&mut self.cur, prefixes)?),
            Tok::Number(n) => {
                self.cur.next();
                let dt = if n.contains('.') {
                    Datatype::Decimal
                } else {
                    Datatype::Integer
                };
                Term::Literal(Literal::new(n, dt).map_err(|e| self.cur.error_at(&t, e.to_string()))?)
            }
            Tok::Name { prefix: None, local } if local == "true" || local == "false" => {
                self.cur.next();
                Term::Literal(Literal::new(local, Datatype::Boolean).expect("valid boolean"))
            }
            Tok::Name { prefix: None, local } => {
                let hint =
                    format!("bare name `{local}` is not a term; variables start with `?` (did you mean `?{local}`?)");
                return Err(self.cur.error_at(&t, hint).into());
            }
            Tok::Name { .. } | Tok::IriRef(_) => {
                self.cur.next();
                let iri = resolve_ref(&self.cur, &t, prefixes)?;
                if !self.ontology.has_kind(&iri, EntityKind::NamedIndividual) {
                    return Err(self.invalid(&t, format!("undeclared individual {}", prefixes.render_iri(&iri))));
                }
                Term::Individual(iri)
            }
            _ => return Err(self.cur.unexpected(&t, "a term").into()),
        };
        Ok(term)
    }

    fn arguments(&mut self) -> Result<Vec<(Token, Term)>, LoadError> {
        self.cur.expect(Tok::LParen)?;
        let mut args = Vec::new();
        loop {
            let t = self.cur.peek().clone();
            args.push((t, self.term()?));
            let t = self.cur.next();
            match t.tok {
                Tok::Comma => continue,
                Tok::RParen => break,
                _ => return Err(self.cur.unexpected(&t, "`,` or `)`").into()),
            }
        }
        Ok(args)
    }

    fn atom(&mut self) -> Result<(Token, Atom), LoadError> {
        let (t, predicate) = self.predicate()?;
        let args = self.arguments()?;
        let arity = match &predicate {
            Predicate::Entity(_, EntityKind::Class) => 1,
            _ => 2,
        };
        if matches!(predicate, Predicate::Select) {
            return Err(self
                .cur
                .error_at(&t, "sqwrl:select may only appear as a query head")
                .into());
        }
        if args.len() != arity {
            return Err(self
                .cur
                .error_at(&t, format!("expected {arity} argument(s), found {}", args.len()))
                .into());
        }
        let mut terms = args.into_iter().map(|(_, term)| term);
        let mut next = || terms.next().expect("arity checked");
        let atom = match predicate {
            Predicate::Entity(class, EntityKind::Class) => Atom::Class { class, arg: next() },
            Predicate::Entity(property, EntityKind::ObjectProperty) => Atom::ObjectProperty {
                property,
                subject: next(),
                object: next(),
            },
            Predicate::Entity(property, _) => Atom::DataProperty {
                property,
                subject: next(),
                value: next(),
            },
            Predicate::Builtin(op) => Atom::Builtin {
                op,
                left: next(),
                right: next(),
            },
            Predicate::Select => unreachable!(),
        };
        Ok((t, atom))
    }

    fn conjunction(&mut self) -> Result<Vec<(Token, Atom)>, LoadError> {
        let mut atoms = vec![self.atom()?];
        while self.cur.peek().tok == Tok::Caret {
            self.cur.next();
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn variable_token<'t>(atoms: &'t [(Token, Atom)], var: &str) -> Option<&'t Token> {
        atoms
            .iter()
            .find(|(_, a)| a.variables().any(|v| v == var))
            .map(|(t, _)| t)
    }

    fn rule_error(&self, err: RuleError, anchor: &Token, head: &[(Token, Atom)]) -> LoadError {
        let (line, column) = self.cur.locate(anchor);
        match err {
            RuleError::Unsafe(variable) => {
                let (line, column) = Self::variable_token(head, &variable)
                    .map(|t| self.cur.locate(t))
                    .unwrap_or((line, column));
                LoadError::DlSafety { line, column, variable }
            }
            RuleError::UnboundProjection(variable) => LoadError::Projection { line, column, variable },
            other => LoadError::Invalid {
                line,
                column,
                message: other.to_string(),
            },
        }
    }
}

/// Parses a rule file: one rule per non-blank line, named `rule-1`, `rule-2`, ...
pub fn parse_rules(doc: &SourceDocument, ontology: &Ontology) -> Result<Vec<Rule>, LoadError> {
    doc.expect(DocumentKind::Rules)?;
    let mut rules = Vec::new();
    let all = lex(&doc.text, Comments::Hash)?;
    let positions = Positions::new(&doc.text);
    let mut lines: Vec<Vec<Token>> = Vec::new();
    let mut current_line = 0;
    for token in all.into_iter().filter(|t| t.tok != Tok::Eof) {
        let (line, _) = positions.locate(token.start);
        if lines.is_empty() || line != current_line {
            lines.push(Vec::new());
            current_line = line;
        }
        lines.last_mut().expect("pushed above").push(token);
    }
    for mut tokens in lines {
        let last = tokens.last().expect("non-empty line").end;
        let eol = doc.text[last..].find('\n').map_or(doc.text.len(), |n| last + n);
        tokens.push(Token {
            tok: Tok::Eof,
            start: eol,
            end: eol,
        });
        let cur = Cursor {
            tokens,
            idx: 0,
            pos: Positions::new(&doc.text),
        };
        let mut p = RuleParser { cur, ontology };
        let body = p.conjunction()?;
        let arrow = p.cur.next();
        if arrow.tok != Tok::Arrow {
            return Err(p.cur.unexpected(&arrow, "`^` or `->`").into());
        }
        let head = p.conjunction()?;
        let end = p.cur.next();
        if end.tok != Tok::Eof {
            return Err(p.cur.unexpected(&end, "end of line").into());
        }
        let name = format!("rule-{}", rules.len() + 1);
        let anchor = body[0].0.clone();
        let rule = Rule::new(
            name,
            body.into_iter().map(|(_, a)| a).collect(),
            head.iter().map(|(_, a)| a.clone()).collect(),
        )
        .map_err(|e| p.rule_error(e, &anchor, &head))?;
        rules.push(rule);
    }
    Ok(rules)
}

/// Parses a query document: `body -> sqwrl:select(?v1, ..., ?vn)`.
pub fn parse_query(doc: &SourceDocument, ontology: &Ontology) -> Result<Query, LoadError> {
    doc.expect(DocumentKind::Query)?;
    let cur = Cursor::new(&doc.text, Comments::Hash)?;
    let mut p = RuleParser { cur, ontology };
    if p.cur.peek().tok == Tok::Eof {
        let t = p.cur.peek().clone();
        return Err(p.cur.error_at(&t, "empty query").into());
    }
    let body = p.conjunction()?;
    let arrow = p.cur.next();
    if arrow.tok != Tok::Arrow {
        return Err(p.cur.unexpected(&arrow, "`^` or `->`").into());
    }
    let (select, predicate) = p.predicate()?;
    if !matches!(predicate, Predicate::Select) {
        return Err(p.cur.error_at(&select, "query head must be sqwrl:select(...)").into());
    }
    let args = p.arguments()?;
    let mut projection = Vec::new();
    for (t, term) in args {
        match term {
            Term::Variable(v) => projection.push(v),
            _ => return Err(p.cur.error_at(&t, "sqwrl:select takes variables only").into()),
        }
    }
    let end = p.cur.next();
    if end.tok != Tok::Eof {
        return Err(p.cur.unexpected(&end, "end of input").into());
    }
    Query::new(body.into_iter().map(|(_, a)| a).collect(), projection).map_err(|e| p.rule_error(e, &select, &[]))
}
