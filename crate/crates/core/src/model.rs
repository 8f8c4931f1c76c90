//! In-memory ontology: entities, axioms, annotations and rules.
//!
//! An [`Ontology`] is built once (normally by the parser), validated on every
//! insertion, and then treated as immutable by the downstream stages. All
//! lookups iterate in a deterministic order so that every artifact rendered
//! from the model is byte-stable across runs.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::NaiveDate;
use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Rule;

/// Namespaces and well-known IRIs.
pub mod vocab {
    pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const SQWRL: &str = "http://sqwrl.stanford.edu/ontologies/built-ins/3.4/sqwrl.owl#";
    pub const SWRLB: &str = "http://www.w3.org/2003/11/swrlb#";
    pub const FDD: &str = "urn:ontofdd:vocab#";

    pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
    pub const RDFS_COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
    pub const FDD_ACTION: &str = "urn:ontofdd:vocab#action";
    pub const FDD_PREPOSITION: &str = "urn:ontofdd:vocab#preposition";
    pub const FDD_WEIGHT: &str = "urn:ontofdd:vocab#weight";
    pub const FDD_HAS_OWNER: &str = "urn:ontofdd:vocab#hasOwner";
    pub const SQWRL_SELECT: &str = "http://sqwrl.stanford.edu/ontologies/built-ins/3.4/sqwrl.owl#select";

    /// Prefixes every document can use without declaring them.
    pub const RESERVED_PREFIXES: [(&str, &str); 5] = [
        ("rdfs", RDFS),
        ("xsd", XSD),
        ("sqwrl", SQWRL),
        ("swrlb", SWRLB),
        ("fdd", FDD),
    ];

    /// Annotation properties usable without a declaration.
    pub const BUILTIN_ANNOTATIONS: [&str; 6] = [
        RDFS_LABEL,
        RDFS_COMMENT,
        FDD_ACTION,
        FDD_PREPOSITION,
        FDD_WEIGHT,
        FDD_HAS_OWNER,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid IRI {0:?}: must be non-empty and contain no whitespace")]
    InvalidIri(String),

    #[error("invalid {datatype} literal {lexical:?}")]
    InvalidLiteral { lexical: String, datatype: Datatype },

    #[error("undeclared {expected} {iri}")]
    Undeclared { iri: Iri, expected: EntityKind },

    #[error("{iri} is declared as {existing} and cannot also be {requested}")]
    KindCollision {
        iri: Iri,
        existing: EntityKind,
        requested: EntityKind,
    },

    #[error("subclass cycle: {}", cycle.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" -> "))]
    HierarchyCycle { cycle: Vec<Iri> },

    #[error("DisjointClasses needs at least two distinct classes")]
    TooFewDisjointClasses,

    #[error("unknown class {0}")]
    UnknownClass(Iri),

    #[error("unknown individual {0}")]
    UnknownIndividual(Iri),
}

impl ModelError {
    /// Renders the error with IRIs abbreviated through `prefixes`.
    pub fn describe(&self, prefixes: &PrefixMap) -> String {
        let short = |iri: &Iri| prefixes.render_iri(iri);
        match self {
            ModelError::Undeclared { iri, expected } => {
                format!("undeclared {expected} {}", short(iri))
            }
            ModelError::KindCollision {
                iri,
                existing,
                requested,
            } => format!(
                "{} is declared as {existing} and cannot also be {requested}",
                short(iri)
            ),
            ModelError::HierarchyCycle { cycle } => format!(
                "subclass cycle: {}",
                cycle.iter().map(short).collect::<Vec<_>>().join(" -> ")
            ),
            ModelError::UnknownClass(iri) => format!("unknown class {}", short(iri)),
            ModelError::UnknownIndividual(iri) => format!("unknown individual {}", short(iri)),
            other => other.to_string(),
        }
    }
}

/// An absolute IRI. Equality is byte equality of the string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
        let value = value.into();
        if value.is_empty() || value.chars().any(char::is_whitespace) {
            return Err(ModelError::InvalidIri(value));
        }
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn local_name(&self) -> &str {
        local_name(self)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl TryFrom<String> for Iri {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> Self {
        iri.0
    }
}

/// Substring after the last `#` or `/`; the whole string if neither occurs.
pub fn local_name(iri: &Iri) -> &str {
    let s = iri.as_str();
    match s.rfind(['#', '/']) {
        Some(idx) => &s[idx + 1..],
        None => s,
    }
}

/// Prefix label to namespace mapping. The reserved prefixes are always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMap {
    entries: BTreeMap<String, String>,
}

impl Default for PrefixMap {
    fn default() -> Self {
        let entries = vocab::RESERVED_PREFIXES
            .iter()
            .map(|(p, ns)| (p.to_string(), ns.to_string()))
            .collect();
        PrefixMap { entries }
    }
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<String>, namespace: impl Into<String>) {
        self.entries.insert(label.into(), namespace.into());
    }

    pub fn namespace(&self, label: &str) -> Option<&str> {
        self.entries.get(label).map(String::as_str)
    }

    pub fn resolve(&self, label: &str, local: &str) -> Option<Iri> {
        let ns = self.entries.get(label)?;
        Iri::new(format!("{ns}{local}")).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Entries that differ from the predeclared reserved set.
    pub fn declared(&self) -> impl Iterator<Item = (&str, &str)> {
        self.iter().filter(|(label, ns)| {
            !vocab::RESERVED_PREFIXES
                .iter()
                .any(|(rl, rns)| rl == label && rns == ns)
        })
    }

    /// `prefix:local` for the longest matching namespace whose remainder is a
    /// valid local part; ties go to the smallest label.
    pub fn abbreviate(&self, iri: &Iri) -> Option<String> {
        let s = iri.as_str();
        self.entries
            .iter()
            .filter_map(|(label, ns)| {
                let local = s.strip_prefix(ns.as_str())?;
                is_local_part(local).then_some((ns.len(), label, local))
            })
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(a.1)))
            .map(|(_, label, local)| format!("{label}:{local}"))
    }

    /// Abbreviated form when possible, `<iri>` otherwise.
    pub fn render_iri(&self, iri: &Iri) -> String {
        self.abbreviate(iri).unwrap_or_else(|| iri.to_string())
    }
}

/// Characters allowed in the local part of a prefixed name.
pub fn is_local_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '.'
}

fn is_local_part(local: &str) -> bool {
    local.chars().all(is_local_char) && !local.ends_with('.')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datatype {
    String,
    Integer,
    Decimal,
    Boolean,
    Date,
}

impl Datatype {
    pub const ALL: [Datatype; 5] = [
        Datatype::String,
        Datatype::Integer,
        Datatype::Decimal,
        Datatype::Boolean,
        Datatype::Date,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::Integer => "integer",
            Datatype::Decimal => "decimal",
            Datatype::Boolean => "boolean",
            Datatype::Date => "date",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|dt| dt.name() == name)
    }

    pub fn from_iri(iri: &Iri) -> Option<Self> {
        iri.as_str().strip_prefix(vocab::XSD).and_then(Self::from_name)
    }

    pub fn iri(self) -> Iri {
        Iri(format!("{}{}", vocab::XSD, self.name()))
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, Datatype::Integer | Datatype::Decimal)
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A typed literal. The lexical form is stored canonicalized, so derived
/// equality is value equality within a datatype (`"05"^^integer == "5"^^integer`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    lexical: String,
    datatype: Datatype,
}

impl Literal {
    pub fn new(lexical: &str, datatype: Datatype) -> Result<Self, ModelError> {
        let invalid = || ModelError::InvalidLiteral {
            lexical: lexical.to_string(),
            datatype,
        };
        let lexical = match datatype {
            Datatype::String => lexical.to_string(),
            Datatype::Integer => canonical_integer(lexical).ok_or_else(invalid)?,
            Datatype::Decimal => canonical_decimal(lexical).ok_or_else(invalid)?,
            Datatype::Boolean => match lexical {
                "true" | "1" => "true".to_string(),
                "false" | "0" => "false".to_string(),
                _ => return Err(invalid()),
            },
            Datatype::Date => NaiveDate::parse_from_str(lexical, "%Y-%m-%d")
                .map_err(|_| invalid())?
                .format("%Y-%m-%d")
                .to_string(),
        };
        Ok(Literal { lexical, datatype })
    }

    pub fn string(value: impl Into<String>) -> Self {
        Literal {
            lexical: value.into(),
            datatype: Datatype::String,
        }
    }

    pub fn integer(value: i64) -> Self {
        Literal {
            lexical: value.to_string(),
            datatype: Datatype::Integer,
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Datatype {
        self.datatype
    }

    /// Value ordering: numeric across integer/decimal, lexicographic for
    /// strings, chronological for dates. `None` when the pair is unordered.
    pub fn compare(&self, other: &Literal) -> Option<Ordering> {
        match (self.datatype, other.datatype) {
            (a, b) if a.is_numeric() && b.is_numeric() => Some(compare_decimal(&self.lexical, &other.lexical)),
            // canonical YYYY-MM-DD sorts chronologically
            (Datatype::String, Datatype::String) | (Datatype::Date, Datatype::Date) => {
                Some(self.lexical.cmp(&other.lexical))
            }
            _ => None,
        }
    }

    /// Value equality; integer 5 equals decimal 5.0.
    pub fn value_eq(&self, other: &Literal) -> bool {
        if self.datatype.is_numeric() && other.datatype.is_numeric() {
            compare_decimal(&self.lexical, &other.lexical) == Ordering::Equal
        } else {
            self == other
        }
    }

    /// Functional-syntax rendering: `"lex"` or `"lex"^^xsd:dt`.
    pub fn render(&self, prefixes: &PrefixMap) -> String {
        let mut out = String::with_capacity(self.lexical.len() + 2);
        out.push('"');
        for c in self.lexical.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                _ => out.push(c),
            }
        }
        out.push('"');
        if self.datatype != Datatype::String {
            out.push_str("^^");
            out.push_str(&prefixes.render_iri(&self.datatype.iri()));
        }
        out
    }
}

fn split_sign(s: &str) -> (bool, &str) {
    match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    }
}

fn canonical_integer(s: &str) -> Option<String> {
    let (neg, digits) = split_sign(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let trimmed = digits.trim_start_matches('0');
    Some(match (neg, trimmed.is_empty()) {
        (_, true) => "0".to_string(),
        (true, false) => format!("-{trimmed}"),
        (false, false) => trimmed.to_string(),
    })
}

fn canonical_decimal(s: &str) -> Option<String> {
    let (neg, body) = split_sign(s);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let int = int.trim_start_matches('0');
    let frac = frac.trim_end_matches('0');
    let int = if int.is_empty() { "0" } else { int };
    let frac = if frac.is_empty() { "0" } else { frac };
    let zero = int == "0" && frac == "0";
    Some(format!("{}{int}.{frac}", if neg && !zero { "-" } else { "" }))
}

/// Exact comparison of canonical integer/decimal lexical forms.
fn compare_decimal(a: &str, b: &str) -> Ordering {
    let (a_neg, a_body) = split_sign(a);
    let (b_neg, b_body) = split_sign(b);
    let magnitude = |body: &str| -> (String, String) {
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        (
            int.trim_start_matches('0').to_string(),
            frac.trim_end_matches('0').to_string(),
        )
    };
    let (ai, af) = magnitude(a_body);
    let (bi, bf) = magnitude(b_body);
    let a_zero = ai.is_empty() && af.is_empty();
    let b_zero = bi.is_empty() && bf.is_empty();
    let a_neg = a_neg && !a_zero;
    let b_neg = b_neg && !b_zero;
    let abs = ai.len().cmp(&bi.len()).then_with(|| ai.cmp(&bi)).then_with(|| {
        let width = af.len().max(bf.len());
        format!("{af:0<width$}").cmp(&format!("{bf:0<width$}"))
    });
    match (a_neg, b_neg) {
        (false, false) => abs,
        (true, true) => abs.reverse(),
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Class,
    ObjectProperty,
    DataProperty,
    AnnotationProperty,
    NamedIndividual,
}

impl EntityKind {
    pub const ALL: [EntityKind; 5] = [
        EntityKind::Class,
        EntityKind::ObjectProperty,
        EntityKind::DataProperty,
        EntityKind::AnnotationProperty,
        EntityKind::NamedIndividual,
    ];

    /// Keyword used inside `Declaration(...)`.
    pub fn keyword(self) -> &'static str {
        match self {
            EntityKind::Class => "Class",
            EntityKind::ObjectProperty => "ObjectProperty",
            EntityKind::DataProperty => "DataProperty",
            EntityKind::AnnotationProperty => "AnnotationProperty",
            EntityKind::NamedIndividual => "NamedIndividual",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == s)
    }

    fn description(self) -> &'static str {
        match self {
            EntityKind::Class => "class",
            EntityKind::ObjectProperty => "object property",
            EntityKind::DataProperty => "data property",
            EntityKind::AnnotationProperty => "annotation property",
            EntityKind::NamedIndividual => "individual",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.description())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entity {
    pub iri: Iri,
    pub kind: EntityKind,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    SubClassOf {
        sub: Iri,
        sup: Iri,
    },
    ObjectPropertyDomain {
        property: Iri,
        class: Iri,
    },
    ObjectPropertyRange {
        property: Iri,
        class: Iri,
    },
    DataPropertyDomain {
        property: Iri,
        class: Iri,
    },
    DataPropertyRange {
        property: Iri,
        datatype: Datatype,
    },
    /// Sorted, duplicate-free.
    DisjointClasses(Vec<Iri>),
    FunctionalObjectProperty(Iri),
    FunctionalDataProperty(Iri),
    ClassAssertion {
        class: Iri,
        individual: Iri,
    },
    ObjectPropertyAssertion {
        property: Iri,
        subject: Iri,
        object: Iri,
    },
    DataPropertyAssertion {
        property: Iri,
        subject: Iri,
        value: Literal,
    },
    AnnotationAssertion {
        property: Iri,
        subject: Iri,
        value: Literal,
    },
}

impl Axiom {
    pub fn name(&self) -> &'static str {
        match self {
            Axiom::SubClassOf { .. } => "SubClassOf",
            Axiom::ObjectPropertyDomain { .. } => "ObjectPropertyDomain",
            Axiom::ObjectPropertyRange { .. } => "ObjectPropertyRange",
            Axiom::DataPropertyDomain { .. } => "DataPropertyDomain",
            Axiom::DataPropertyRange { .. } => "DataPropertyRange",
            Axiom::DisjointClasses(_) => "DisjointClasses",
            Axiom::FunctionalObjectProperty(_) => "FunctionalObjectProperty",
            Axiom::FunctionalDataProperty(_) => "FunctionalDataProperty",
            Axiom::ClassAssertion { .. } => "ClassAssertion",
            Axiom::ObjectPropertyAssertion { .. } => "ObjectPropertyAssertion",
            Axiom::DataPropertyAssertion { .. } => "DataPropertyAssertion",
            Axiom::AnnotationAssertion { .. } => "AnnotationAssertion",
        }
    }

    /// Canonical ordering key: variant name, then arguments as written.
    pub fn sort_key(&self) -> (&'static str, Vec<String>) {
        let args = self
            .arguments()
            .into_iter()
            .map(|arg| match arg {
                Arg::Iri(iri, _) => iri.as_str().to_string(),
                Arg::Datatype(dt) => dt.iri().as_str().to_string(),
                Arg::Literal(lit) => format!("{}^^{}", lit.lexical, lit.datatype),
            })
            .collect();
        (self.name(), args)
    }

    pub fn canonical_cmp(&self, other: &Axiom) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }

    /// Arguments in written order, IRIs tagged with the kind they must have.
    pub fn arguments(&self) -> Vec<Arg<'_>> {
        use EntityKind::*;
        match self {
            Axiom::SubClassOf { sub, sup } => vec![Arg::Iri(sub, Class), Arg::Iri(sup, Class)],
            Axiom::ObjectPropertyDomain { property, class } | Axiom::ObjectPropertyRange { property, class } => {
                vec![Arg::Iri(property, ObjectProperty), Arg::Iri(class, Class)]
            }
            Axiom::DataPropertyDomain { property, class } => {
                vec![Arg::Iri(property, DataProperty), Arg::Iri(class, Class)]
            }
            Axiom::DataPropertyRange { property, datatype } => {
                vec![Arg::Iri(property, DataProperty), Arg::Datatype(*datatype)]
            }
            Axiom::DisjointClasses(cs) => cs.iter().map(|c| Arg::Iri(c, Class)).collect(),
            Axiom::FunctionalObjectProperty(p) => vec![Arg::Iri(p, ObjectProperty)],
            Axiom::FunctionalDataProperty(p) => vec![Arg::Iri(p, DataProperty)],
            Axiom::ClassAssertion { class, individual } => {
                vec![Arg::Iri(class, Class), Arg::Iri(individual, NamedIndividual)]
            }
            Axiom::ObjectPropertyAssertion {
                property,
                subject,
                object,
            } => vec![
                Arg::Iri(property, ObjectProperty),
                Arg::Iri(subject, NamedIndividual),
                Arg::Iri(object, NamedIndividual),
            ],
            Axiom::DataPropertyAssertion {
                property,
                subject,
                value,
            } => vec![
                Arg::Iri(property, DataProperty),
                Arg::Iri(subject, NamedIndividual),
                Arg::Literal(value),
            ],
            // Annotation subjects may be any declared entity; checked separately.
            Axiom::AnnotationAssertion {
                property,
                subject,
                value,
            } => vec![
                Arg::Iri(property, AnnotationProperty),
                Arg::Iri(subject, AnnotationProperty),
                Arg::Literal(value),
            ],
        }
    }

    /// True for ABox facts about individuals.
    pub fn is_assertion(&self) -> bool {
        matches!(
            self,
            Axiom::ClassAssertion { .. } | Axiom::ObjectPropertyAssertion { .. } | Axiom::DataPropertyAssertion { .. }
        )
    }

    /// Functional-syntax rendering with abbreviated IRIs.
    pub fn render(&self, prefixes: &PrefixMap) -> String {
        let args: Vec<String> = self
            .arguments()
            .into_iter()
            .map(|arg| match arg {
                Arg::Iri(iri, _) => prefixes.render_iri(iri),
                Arg::Datatype(dt) => prefixes.render_iri(&dt.iri()),
                Arg::Literal(lit) => lit.render(prefixes),
            })
            .collect();
        format!("{}({})", self.name(), args.join(" "))
    }
}

/// One argument of an axiom.
#[derive(Debug, Clone, Copy)]
pub enum Arg<'a> {
    Iri(&'a Iri, EntityKind),
    Datatype(Datatype),
    Literal(&'a Literal),
}

/// The ontology: the single model every pipeline stage reads.
#[derive(Debug, Clone)]
pub struct Ontology {
    iri: Iri,
    prefixes: PrefixMap,
    entities: BTreeMap<Iri, BTreeSet<EntityKind>>,
    axioms: IndexSet<Axiom>,
    rules: Vec<Rule>,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        // IndexSet equality ignores insertion order
        self.iri == other.iri
            && self.prefixes == other.prefixes
            && self.entities == other.entities
            && self.axioms == other.axioms
            && self.rules == other.rules
    }
}

impl Eq for Ontology {}

impl Ontology {
    pub fn new(iri: Iri) -> Self {
        Ontology {
            iri,
            prefixes: PrefixMap::default(),
            entities: BTreeMap::new(),
            axioms: IndexSet::new(),
            rules: Vec::new(),
        }
    }

    pub fn iri(&self) -> &Iri {
        &self.iri
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn prefixes_mut(&mut self) -> &mut PrefixMap {
        &mut self.prefixes
    }

    /// Declares `iri` with `kind`. Returns `false` when already declared so.
    pub fn declare(&mut self, iri: Iri, kind: EntityKind) -> Result<bool, ModelError> {
        let kinds = self.entities.entry(iri.clone()).or_default();
        if kinds.contains(&kind) {
            return Ok(false);
        }
        let punning = |a: EntityKind, b: EntityKind| {
            matches!(
                (a, b),
                (EntityKind::Class, EntityKind::NamedIndividual) | (EntityKind::NamedIndividual, EntityKind::Class)
            )
        };
        if let Some(&existing) = kinds.iter().find(|&&k| !punning(k, kind)) {
            if kinds.is_empty() {
                self.entities.remove(&iri);
            }
            return Err(ModelError::KindCollision {
                iri,
                existing,
                requested: kind,
            });
        }
        kinds.insert(kind);
        Ok(true)
    }

    pub fn has_kind(&self, iri: &Iri, kind: EntityKind) -> bool {
        if kind == EntityKind::AnnotationProperty && vocab::BUILTIN_ANNOTATIONS.contains(&iri.as_str()) {
            return true;
        }
        self.entities.get(iri).is_some_and(|ks| ks.contains(&kind))
    }

    pub fn is_declared(&self, iri: &Iri) -> bool {
        self.entities.contains_key(iri)
    }

    pub fn entities(&self) -> impl Iterator<Item = Entity> + '_ {
        self.entities
            .iter()
            .flat_map(|(iri, kinds)| kinds.iter().map(move |&kind| Entity { iri: iri.clone(), kind }))
    }

    /// Declared entities of one kind, sorted by IRI.
    pub fn entities_of(&self, kind: EntityKind) -> impl Iterator<Item = &Iri> + '_ {
        self.entities
            .iter()
            .filter(move |(_, ks)| ks.contains(&kind))
            .map(|(iri, _)| iri)
    }

    pub fn classes(&self) -> impl Iterator<Item = &Iri> + '_ {
        self.entities_of(EntityKind::Class)
    }

    pub fn object_properties(&self) -> impl Iterator<Item = &Iri> + '_ {
        self.entities_of(EntityKind::ObjectProperty)
    }

    pub fn data_properties(&self) -> impl Iterator<Item = &Iri> + '_ {
        self.entities_of(EntityKind::DataProperty)
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Iri> + '_ {
        self.entities_of(EntityKind::NamedIndividual)
    }

    /// Inserts a validated axiom. Returns `false` when it was already present.
    pub fn add_axiom(&mut self, axiom: Axiom) -> Result<bool, ModelError> {
        let axiom = match axiom {
            Axiom::DisjointClasses(mut cs) => {
                cs.sort();
                cs.dedup();
                if cs.len() < 2 {
                    return Err(ModelError::TooFewDisjointClasses);
                }
                Axiom::DisjointClasses(cs)
            }
            other => other,
        };
        self.check_kinds(&axiom)?;
        if self.axioms.contains(&axiom) {
            return Ok(false);
        }
        if let Axiom::SubClassOf { sub, sup } = &axiom {
            if sub != sup {
                if let Some(path) = self.upward_path(sup, sub) {
                    let mut cycle = vec![sub.clone()];
                    cycle.extend(path);
                    return Err(ModelError::HierarchyCycle { cycle });
                }
            }
        }
        Ok(self.axioms.insert(axiom))
    }

    fn check_kinds(&self, axiom: &Axiom) -> Result<(), ModelError> {
        if let Axiom::AnnotationAssertion { property, subject, .. } = axiom {
            if !self.has_kind(property, EntityKind::AnnotationProperty) {
                return Err(ModelError::Undeclared {
                    iri: property.clone(),
                    expected: EntityKind::AnnotationProperty,
                });
            }
            if !self.is_declared(subject) && !self.has_kind(subject, EntityKind::AnnotationProperty) {
                return Err(ModelError::Undeclared {
                    iri: subject.clone(),
                    expected: EntityKind::Class,
                });
            }
            return Ok(());
        }
        for arg in axiom.arguments() {
            if let Arg::Iri(iri, kind) = arg {
                if !self.has_kind(iri, kind) {
                    return Err(ModelError::Undeclared {
                        iri: iri.clone(),
                        expected: kind,
                    });
                }
            }
        }
        Ok(())
    }

    /// Breadth-first SubClassOf path from `from` up to `to`, both included.
    fn upward_path(&self, from: &Iri, to: &Iri) -> Option<Vec<Iri>> {
        let mut parent: BTreeMap<&Iri, &Iri> = BTreeMap::new();
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(current) = queue.pop_front() {
            if current == to {
                let mut path = vec![current.clone()];
                let mut node = current;
                while let Some(&p) = parent.get(node) {
                    path.push(p.clone());
                    node = p;
                }
                path.reverse();
                return Some(path);
            }
            for sup in self.direct_superclasses(current) {
                if sup != from && !parent.contains_key(sup) {
                    parent.insert(sup, current);
                    queue.push_back(sup);
                }
            }
        }
        None
    }

    pub fn axioms(&self) -> impl Iterator<Item = &Axiom> + '_ {
        self.axioms.iter()
    }

    pub fn axiom_count(&self) -> usize {
        self.axioms.len()
    }

    pub fn contains(&self, axiom: &Axiom) -> bool {
        self.axioms.contains(axiom)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn set_rules(&mut self, rules: Vec<Rule>) {
        self.rules = rules;
    }

    /// Copy of this ontology extended with `extra` axioms.
    pub fn with_axioms<'a>(&self, extra: impl IntoIterator<Item = &'a Axiom>) -> Result<Ontology, ModelError> {
        let mut out = self.clone();
        for axiom in extra {
            out.add_axiom(axiom.clone())?;
        }
        Ok(out)
    }

    /// Least `rdfs:label`, falling back to the local name.
    pub fn label_of(&self, iri: &Iri) -> String {
        self.annotation_values(iri, vocab::RDFS_LABEL)
            .first()
            .map(|lit| lit.lexical().to_string())
            .unwrap_or_else(|| local_name(iri).to_string())
    }

    /// Values of annotation `property` on `subject`, sorted by lexical form.
    pub fn annotation_values(&self, subject: &Iri, property: &str) -> Vec<&Literal> {
        let mut values: Vec<&Literal> = self
            .axioms
            .iter()
            .filter_map(|ax| match ax {
                Axiom::AnnotationAssertion {
                    property: p,
                    subject: s,
                    value,
                } if s == subject && p.as_str() == property => Some(value),
                _ => None,
            })
            .collect();
        values.sort_by(|a, b| a.lexical().cmp(b.lexical()).then_with(|| a.cmp(b)));
        values
    }

    /// Direct asserted superclasses, sorted, excluding `c` itself.
    pub fn direct_superclasses<'a>(&'a self, c: &Iri) -> BTreeSet<&'a Iri> {
        self.axioms
            .iter()
            .filter_map(|ax| match ax {
                Axiom::SubClassOf { sub, sup } if sub == c && sup != c => Some(sup),
                _ => None,
            })
            .collect()
    }

    /// Reflexive-transitive closure of SubClassOf below `c`.
    pub fn subclasses_of(&self, c: &Iri) -> Result<BTreeSet<Iri>, ModelError> {
        if !self.has_kind(c, EntityKind::Class) {
            return Err(ModelError::UnknownClass(c.clone()));
        }
        let mut children: BTreeMap<&Iri, Vec<&Iri>> = BTreeMap::new();
        for ax in &self.axioms {
            if let Axiom::SubClassOf { sub, sup } = ax {
                children.entry(sup).or_default().push(sub);
            }
        }
        Ok(closure(c, |n| children.get(n).cloned().unwrap_or_default()))
    }

    /// Reflexive-transitive closure of SubClassOf above `c`.
    pub fn superclasses_of(&self, c: &Iri) -> BTreeSet<Iri> {
        closure(c, |n| self.direct_superclasses(n).into_iter().collect())
    }

    /// Declared classes with no declared superclass.
    pub fn top_level_classes(&self) -> Vec<&Iri> {
        self.classes()
            .filter(|c| self.direct_superclasses(c).is_empty())
            .collect()
    }

    /// Class, object- and data-property assertions whose subject is `individual`.
    pub fn assertions_about(&self, individual: &Iri) -> Result<Vec<&Axiom>, ModelError> {
        if !self.has_kind(individual, EntityKind::NamedIndividual) {
            return Err(ModelError::UnknownIndividual(individual.clone()));
        }
        Ok(self
            .axioms
            .iter()
            .filter(|ax| match ax {
                Axiom::ClassAssertion { individual: i, .. } => i == individual,
                Axiom::ObjectPropertyAssertion { subject, .. } | Axiom::DataPropertyAssertion { subject, .. } => {
                    subject == individual
                }
                _ => false,
            })
            .collect())
    }

    /// Declared domain classes of an object or data property, sorted.
    pub fn domains_of(&self, property: &Iri) -> Vec<&Iri> {
        let set: BTreeSet<&Iri> = self
            .axioms
            .iter()
            .filter_map(|ax| match ax {
                Axiom::ObjectPropertyDomain { property: p, class }
                | Axiom::DataPropertyDomain { property: p, class }
                    if p == property =>
                {
                    Some(class)
                }
                _ => None,
            })
            .collect();
        set.into_iter().collect()
    }

    /// Declared range classes of an object property, sorted.
    pub fn object_ranges_of(&self, property: &Iri) -> Vec<&Iri> {
        let set: BTreeSet<&Iri> = self
            .axioms
            .iter()
            .filter_map(|ax| match ax {
                Axiom::ObjectPropertyRange { property: p, class } if p == property => Some(class),
                _ => None,
            })
            .collect();
        set.into_iter().collect()
    }

    /// Declared range datatypes of a data property, sorted.
    pub fn data_ranges_of(&self, property: &Iri) -> Vec<Datatype> {
        let set: BTreeSet<Datatype> = self
            .axioms
            .iter()
            .filter_map(|ax| match ax {
                Axiom::DataPropertyRange { property: p, datatype } if p == property => Some(*datatype),
                _ => None,
            })
            .collect();
        set.into_iter().collect()
    }

    pub fn is_functional(&self, property: &Iri) -> bool {
        self.axioms.iter().any(|ax| match ax {
            Axiom::FunctionalObjectProperty(p) | Axiom::FunctionalDataProperty(p) => p == property,
            _ => false,
        })
    }

    /// Number of axioms per variant name, sorted by name.
    pub fn axiom_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for ax in &self.axioms {
            *counts.entry(ax.name()).or_insert(0) += 1;
        }
        counts
    }
}

fn closure<'a, F>(start: &'a Iri, mut next: F) -> BTreeSet<Iri>
where
    F: FnMut(&Iri) -> Vec<&'a Iri>,
{
    let mut seen = BTreeSet::from([start.clone()]);
    let mut stack = vec![start];
    while let Some(n) = stack.pop() {
        for m in next(n) {
            if seen.insert(m.clone()) {
                stack.push(m);
            }
        }
    }
    seen
}
