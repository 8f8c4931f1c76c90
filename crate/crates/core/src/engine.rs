//! DL-safe forward chaining and `sqwrl:select` query evaluation.
//!
//! Rule bodies are joined left to right against an in-memory fact store built
//! from the ontology's class, object-property and data-property assertions.
//! Built-in comparison atoms are applied as soon as all of their variables are
//! bound. [`fixpoint`] uses semi-naive evaluation; [`naive_fixpoint`] is the
//! restart-from-scratch reference it is checked against.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{local_name, Axiom, EntityKind, Iri, Literal, Ontology, PrefixMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule body is empty")]
    EmptyBody,

    #[error("rule head is empty")]
    EmptyHead,

    #[error("built-in atoms are not allowed in a rule head")]
    BuiltinInHead,

    #[error("variable ?{0} is not bound by a non-builtin body atom")]
    Unsafe(String),

    #[error("selected variable ?{0} is not bound by a non-builtin body atom")]
    UnboundProjection(String),

    #[error("variable ?{0} is used both as an individual and as a literal value")]
    SortConflict(String),

    #[error("invalid variable name {0:?}")]
    InvalidVariable(String),

    #[error("{0}")]
    BadTerm(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unknown predicate {iri} (expected a declared {expected})")]
    UnknownPredicate { iri: Iri, expected: EntityKind },

    #[error("swrlb:{op} cannot compare {left} with {right} under binding {binding}")]
    BuiltinType {
        op: BuiltinOp,
        left: String,
        right: String,
        binding: String,
    },
}

/// A rule or query argument.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// Stored without the `?` sigil.
    Variable(String),
    Individual(Iri),
    Literal(Literal),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Variable(name.to_string())
    }

    pub fn as_variable(&self) -> Option<&str> {
        match self {
            Term::Variable(v) => Some(v),
            _ => None,
        }
    }

    pub fn render(&self, prefixes: &PrefixMap) -> String {
        match self {
            Term::Variable(v) => format!("?{v}"),
            Term::Individual(iri) => prefixes.render_iri(iri),
            Term::Literal(lit) => lit.render(prefixes),
        }
    }
}

pub fn is_valid_variable(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BuiltinOp {
    Equal,
    NotEqual,
    LessThan,
    LessThanOrEqual,
    GreaterThan,
    GreaterThanOrEqual,
}

impl BuiltinOp {
    pub const ALL: [BuiltinOp; 6] = [
        BuiltinOp::Equal,
        BuiltinOp::NotEqual,
        BuiltinOp::LessThan,
        BuiltinOp::LessThanOrEqual,
        BuiltinOp::GreaterThan,
        BuiltinOp::GreaterThanOrEqual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinOp::Equal => "equal",
            BuiltinOp::NotEqual => "notEqual",
            BuiltinOp::LessThan => "lessThan",
            BuiltinOp::LessThanOrEqual => "lessThanOrEqual",
            BuiltinOp::GreaterThan => "greaterThan",
            BuiltinOp::GreaterThanOrEqual => "greaterThanOrEqual",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.name() == name)
    }
}

impl fmt::Display for BuiltinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Class { class: Iri, arg: Term },
    ObjectProperty { property: Iri, subject: Term, object: Term },
    DataProperty { property: Iri, subject: Term, value: Term },
    Builtin { op: BuiltinOp, left: Term, right: Term },
}

/// What a variable position can be bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sort {
    Individual,
    Literal,
    Any,
}

impl Atom {
    pub fn is_builtin(&self) -> bool {
        matches!(self, Atom::Builtin { .. })
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Class { arg, .. } => vec![arg],
            Atom::ObjectProperty { subject, object, .. } => vec![subject, object],
            Atom::DataProperty { subject, value, .. } => vec![subject, value],
            Atom::Builtin { left, right, .. } => vec![left, right],
        }
    }

    fn sorted_terms(&self) -> Vec<(&Term, Sort)> {
        match self {
            Atom::Class { arg, .. } => vec![(arg, Sort::Individual)],
            Atom::ObjectProperty { subject, object, .. } => {
                vec![(subject, Sort::Individual), (object, Sort::Individual)]
            }
            Atom::DataProperty { subject, value, .. } => {
                vec![(subject, Sort::Individual), (value, Sort::Literal)]
            }
            Atom::Builtin { left, right, .. } => vec![(left, Sort::Any), (right, Sort::Any)],
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms().into_iter().filter_map(Term::as_variable)
    }

    /// The predicate IRI and the entity kind it must be declared with.
    pub fn predicate(&self) -> Option<(&Iri, EntityKind)> {
        match self {
            Atom::Class { class, .. } => Some((class, EntityKind::Class)),
            Atom::ObjectProperty { property, .. } => Some((property, EntityKind::ObjectProperty)),
            Atom::DataProperty { property, .. } => Some((property, EntityKind::DataProperty)),
            Atom::Builtin { .. } => None,
        }
    }

    pub fn render(&self, prefixes: &PrefixMap) -> String {
        let name = match self {
            Atom::Builtin { op, .. } => format!("swrlb:{op}"),
            other => {
                let (iri, _) = other.predicate().expect("non-builtin");
                // bare local names read like the familiar rule syntax
                match prefixes.abbreviate(iri) {
                    Some(short) if short.starts_with(':') => short[1..].to_string(),
                    Some(short) => short,
                    None => iri.to_string(),
                }
            }
        };
        let args: Vec<String> = self.terms().iter().map(|t| t.render(prefixes)).collect();
        format!("{name}({})", args.join(", "))
    }
}

fn render_atoms(atoms: &[Atom], prefixes: &PrefixMap) -> String {
    atoms.iter().map(|a| a.render(prefixes)).collect::<Vec<_>>().join(" ^ ")
}

/// Checks sort consistency and returns variables bound by non-builtin atoms.
fn check_body(atoms: &[Atom]) -> Result<BTreeSet<String>, RuleError> {
    if atoms.is_empty() {
        return Err(RuleError::EmptyBody);
    }
    let mut sorts: BTreeMap<&str, Sort> = BTreeMap::new();
    let mut bound = BTreeSet::new();
    for atom in atoms {
        for (term, sort) in atom.sorted_terms() {
            match term {
                Term::Variable(v) => {
                    if !is_valid_variable(v) {
                        return Err(RuleError::InvalidVariable(v.clone()));
                    }
                    if !atom.is_builtin() {
                        bound.insert(v.clone());
                    }
                    let entry = sorts.entry(v).or_insert(sort);
                    match (*entry, sort) {
                        (a, b) if a == b => {}
                        (_, Sort::Any) => {}
                        (Sort::Any, s) => *entry = s,
                        _ => return Err(RuleError::SortConflict(v.clone())),
                    }
                }
                Term::Individual(_) if sort == Sort::Literal => {
                    return Err(RuleError::BadTerm(
                        "a data property value must be a variable or a literal".into(),
                    ))
                }
                Term::Literal(_) if sort == Sort::Individual => {
                    return Err(RuleError::BadTerm(
                        "literals may only appear as data property values or built-in arguments".into(),
                    ))
                }
                Term::Individual(_) if atom.is_builtin() => {
                    return Err(RuleError::BadTerm(
                        "built-in arguments must be variables or literals".into(),
                    ))
                }
                _ => {}
            }
        }
    }
    for atom in atoms.iter().filter(|a| a.is_builtin()) {
        if let Some(v) = atom.variables().find(|v| !bound.contains(*v)) {
            return Err(RuleError::Unsafe(v.to_string()));
        }
    }
    Ok(bound)
}

/// A DL-safe rule: every head variable occurs in a non-builtin body atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub name: String,
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
}

impl Rule {
    pub fn new(name: impl Into<String>, body: Vec<Atom>, head: Vec<Atom>) -> Result<Self, RuleError> {
        let bound = check_body(&body)?;
        if head.is_empty() {
            return Err(RuleError::EmptyHead);
        }
        if head.iter().any(Atom::is_builtin) {
            return Err(RuleError::BuiltinInHead);
        }
        // sort agreement across body and head
        let mut all = body.clone();
        all.extend(head.iter().cloned());
        check_body(&all)?;
        for atom in &head {
            if let Some(v) = atom.variables().find(|v| !bound.contains(*v)) {
                return Err(RuleError::Unsafe(v.to_string()));
            }
        }
        Ok(Rule {
            name: name.into(),
            body,
            head,
        })
    }

    pub fn render(&self, prefixes: &PrefixMap) -> String {
        format!(
            "{} -> {}",
            render_atoms(&self.body, prefixes),
            render_atoms(&self.head, prefixes)
        )
    }
}

/// A conjunctive query with an ordered `sqwrl:select` projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub body: Vec<Atom>,
    pub projection: Vec<String>,
}

impl Query {
    pub fn new(body: Vec<Atom>, projection: Vec<String>) -> Result<Self, RuleError> {
        let bound = check_body(&body)?;
        for v in &projection {
            if !is_valid_variable(v) {
                return Err(RuleError::InvalidVariable(v.clone()));
            }
            if !bound.contains(v) {
                return Err(RuleError::UnboundProjection(v.clone()));
            }
        }
        Ok(Query { body, projection })
    }

    pub fn render(&self, prefixes: &PrefixMap) -> String {
        let cols: Vec<String> = self.projection.iter().map(|v| format!("?{v}")).collect();
        format!(
            "{} -> sqwrl:select({})",
            render_atoms(&self.body, prefixes),
            cols.join(", ")
        )
    }
}

/// A value a variable can be bound to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Individual(Iri),
    Literal(Literal),
}

impl Value {
    pub fn render(&self, prefixes: &PrefixMap) -> String {
        match self {
            Value::Individual(iri) => prefixes.render_iri(iri),
            Value::Literal(lit) => lit.render(prefixes),
        }
    }

    /// Short form used in result tables: local name or lexical form.
    pub fn display(&self) -> String {
        match self {
            Value::Individual(iri) => local_name(iri).to_string(),
            Value::Literal(lit) => lit.lexical().to_string(),
        }
    }
}

/// Variable name to value.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding(BTreeMap<String, Value>);

impl Binding {
    pub fn get(&self, var: &str) -> Option<&Value> {
        self.0.get(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn render(&self, prefixes: &PrefixMap) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| format!("?{k}={}", v.render(prefixes)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl FromIterator<(String, Value)> for Binding {
    fn from_iter<T: IntoIterator<Item = (String, Value)>>(iter: T) -> Self {
        Binding(iter.into_iter().collect())
    }
}

/// Indexed ABox facts.
#[derive(Debug, Clone, Default)]
struct FactStore {
    classes: BTreeMap<Iri, BTreeSet<Iri>>,
    objects: BTreeMap<Iri, BTreeSet<(Iri, Iri)>>,
    data: BTreeMap<Iri, BTreeSet<(Iri, Literal)>>,
}

impl FactStore {
    fn from_axioms<'a>(axioms: impl IntoIterator<Item = &'a Axiom>) -> Self {
        let mut store = FactStore::default();
        for ax in axioms {
            store.insert(ax);
        }
        store
    }

    fn insert(&mut self, axiom: &Axiom) -> bool {
        match axiom {
            Axiom::ClassAssertion { class, individual } => self
                .classes
                .entry(class.clone())
                .or_default()
                .insert(individual.clone()),
            Axiom::ObjectPropertyAssertion {
                property,
                subject,
                object,
            } => self
                .objects
                .entry(property.clone())
                .or_default()
                .insert((subject.clone(), object.clone())),
            Axiom::DataPropertyAssertion {
                property,
                subject,
                value,
            } => self
                .data
                .entry(property.clone())
                .or_default()
                .insert((subject.clone(), value.clone())),
            _ => false,
        }
    }

    fn contains(&self, axiom: &Axiom) -> bool {
        match axiom {
            Axiom::ClassAssertion { class, individual } => {
                self.classes.get(class).is_some_and(|s| s.contains(individual))
            }
            Axiom::ObjectPropertyAssertion {
                property,
                subject,
                object,
            } => self
                .objects
                .get(property)
                .is_some_and(|s| s.contains(&(subject.clone(), object.clone()))),
            Axiom::DataPropertyAssertion {
                property,
                subject,
                value,
            } => self
                .data
                .get(property)
                .is_some_and(|s| s.contains(&(subject.clone(), value.clone()))),
            _ => false,
        }
    }

    /// Candidate value tuples for one atom.
    fn tuples(&self, atom: &Atom) -> Vec<Vec<Value>> {
        match atom {
            Atom::Class { class, .. } => self
                .classes
                .get(class)
                .into_iter()
                .flatten()
                .map(|i| vec![Value::Individual(i.clone())])
                .collect(),
            Atom::ObjectProperty { property, .. } => self
                .objects
                .get(property)
                .into_iter()
                .flatten()
                .map(|(s, o)| vec![Value::Individual(s.clone()), Value::Individual(o.clone())])
                .collect(),
            Atom::DataProperty { property, .. } => self
                .data
                .get(property)
                .into_iter()
                .flatten()
                .map(|(s, v)| vec![Value::Individual(s.clone()), Value::Literal(v.clone())])
                .collect(),
            Atom::Builtin { .. } => Vec::new(),
        }
    }
}

fn term_value<'a>(term: &'a Term, binding: &'a Binding) -> Option<Value> {
    match term {
        Term::Variable(v) => binding.get(v).cloned(),
        Term::Individual(iri) => Some(Value::Individual(iri.clone())),
        Term::Literal(lit) => Some(Value::Literal(lit.clone())),
    }
}

/// Unifies `terms` with `values`, extending `binding`.
fn unify(terms: &[&Term], values: &[Value], binding: &Binding) -> Option<Binding> {
    let mut out: Option<Binding> = None;
    for (term, value) in terms.iter().zip(values) {
        match term {
            Term::Variable(v) => {
                let current = out.as_ref().unwrap_or(binding);
                match current.0.get(v) {
                    Some(existing) if existing != value => return None,
                    Some(_) => {}
                    None => {
                        out.get_or_insert_with(|| binding.clone())
                            .0
                            .insert(v.clone(), value.clone());
                    }
                }
            }
            Term::Individual(iri) => {
                if !matches!(value, Value::Individual(i) if i == iri) {
                    return None;
                }
            }
            Term::Literal(lit) => {
                if !matches!(value, Value::Literal(l) if l == lit) {
                    return None;
                }
            }
        }
    }
    Some(out.unwrap_or_else(|| binding.clone()))
}

fn eval_builtin(
    op: BuiltinOp,
    left: &Term,
    right: &Term,
    binding: &Binding,
    prefixes: &PrefixMap,
) -> Result<bool, EngineError> {
    let (Some(l), Some(r)) = (term_value(left, binding), term_value(right, binding)) else {
        unreachable!("built-in evaluated before its variables were bound");
    };
    let type_error = || EngineError::BuiltinType {
        op,
        left: l.render(prefixes),
        right: r.render(prefixes),
        binding: binding.render(prefixes),
    };
    let equal = match (&l, &r) {
        (Value::Literal(a), Value::Literal(b)) => a.value_eq(b),
        (a, b) => a == b,
    };
    match op {
        BuiltinOp::Equal => return Ok(equal),
        BuiltinOp::NotEqual => return Ok(!equal),
        _ => {}
    }
    let ordering = match (&l, &r) {
        (Value::Literal(a), Value::Literal(b)) => a.compare(b).ok_or_else(type_error)?,
        _ => return Err(type_error()),
    };
    Ok(match op {
        BuiltinOp::LessThan => ordering.is_lt(),
        BuiltinOp::LessThanOrEqual => ordering.is_le(),
        BuiltinOp::GreaterThan => ordering.is_gt(),
        BuiltinOp::GreaterThanOrEqual => ordering.is_ge(),
        BuiltinOp::Equal | BuiltinOp::NotEqual => unreachable!(),
    })
}

/// Left-to-right join starting from `seed`. `source(i)` picks the store for
/// the i-th non-builtin atom. With `keep`, variables that neither `keep` nor
/// any later atom mentions are projected away as soon as they are dead, so
/// unrelated atoms do not multiply the intermediate result.
fn join<'s>(
    atoms: &[Atom],
    source: impl Fn(usize) -> &'s FactStore,
    prefixes: &PrefixMap,
    seed: Binding,
    keep: Option<&BTreeSet<&str>>,
) -> Result<BTreeSet<Binding>, EngineError> {
    let relational: Vec<&Atom> = atoms.iter().filter(|a| !a.is_builtin()).collect();
    let mut bound: BTreeSet<&str> = atoms
        .iter()
        .flat_map(Atom::variables)
        .filter(|v| seed.get(v).is_some())
        .collect();
    let mut bindings = vec![seed];
    let mut pending: Vec<&Atom> = atoms.iter().filter(|a| a.is_builtin()).collect();

    let apply_ready = |bindings: Vec<Binding>,
                       pending: &mut Vec<&Atom>,
                       bound: &BTreeSet<&str>|
     -> Result<Vec<Binding>, EngineError> {
        let (ready, rest): (Vec<&Atom>, Vec<&Atom>) =
            pending.iter().partition(|a| a.variables().all(|v| bound.contains(v)));
        *pending = rest;
        let mut out = bindings;
        for atom in ready {
            let Atom::Builtin { op, left, right } = atom else {
                unreachable!()
            };
            let mut kept = Vec::with_capacity(out.len());
            for b in out {
                if eval_builtin(*op, left, right, &b, prefixes)? {
                    kept.push(b);
                }
            }
            out = kept;
        }
        Ok(out)
    };

    bindings = apply_ready(bindings, &mut pending, &bound)?;
    for (i, atom) in relational.iter().enumerate() {
        let terms = atom.terms();
        let tuples = source(i).tuples(atom);
        let mut next = Vec::new();
        for b in &bindings {
            for tuple in &tuples {
                if let Some(extended) = unify(&terms, tuple, b) {
                    next.push(extended);
                }
            }
        }
        bound.extend(atom.variables());
        bindings = apply_ready(next, &mut pending, &bound)?;
        if let Some(keep) = keep {
            let live: BTreeSet<&str> = keep
                .iter()
                .copied()
                .chain(relational[i + 1..].iter().flat_map(|a| a.variables()))
                .chain(pending.iter().flat_map(|a| a.variables()))
                .collect();
            let projected: BTreeSet<Binding> = bindings
                .into_iter()
                .map(|mut b| {
                    b.0.retain(|v, _| live.contains(v.as_str()));
                    b
                })
                .collect();
            bindings = projected.into_iter().collect();
        }
        if bindings.is_empty() {
            break;
        }
    }
    Ok(bindings.into_iter().collect())
}

fn check_predicates<'a>(ontology: &Ontology, atoms: impl IntoIterator<Item = &'a Atom>) -> Result<(), EngineError> {
    for atom in atoms {
        if let Some((iri, kind)) = atom.predicate() {
            if !ontology.has_kind(iri, kind) {
                return Err(EngineError::UnknownPredicate {
                    iri: iri.clone(),
                    expected: kind,
                });
            }
        }
    }
    Ok(())
}

/// All bindings of the body variables under which every atom holds.
pub fn evaluate_body(ontology: &Ontology, atoms: &[Atom]) -> Result<BTreeSet<Binding>, EngineError> {
    check_predicates(ontology, atoms)?;
    let store = FactStore::from_axioms(ontology.axioms());
    join(atoms, |_| &store, ontology.prefixes(), Binding::default(), None)
}

fn instantiate(atom: &Atom, binding: &Binding) -> Option<Axiom> {
    let individual = |t: &Term| match term_value(t, binding)? {
        Value::Individual(iri) => Some(iri),
        Value::Literal(_) => None,
    };
    Some(match atom {
        Atom::Class { class, arg } => Axiom::ClassAssertion {
            class: class.clone(),
            individual: individual(arg)?,
        },
        Atom::ObjectProperty {
            property,
            subject,
            object,
        } => Axiom::ObjectPropertyAssertion {
            property: property.clone(),
            subject: individual(subject)?,
            object: individual(object)?,
        },
        Atom::DataProperty {
            property,
            subject,
            value,
        } => Axiom::DataPropertyAssertion {
            property: property.clone(),
            subject: individual(subject)?,
            value: match term_value(value, binding)? {
                Value::Literal(lit) => lit,
                Value::Individual(_) => return None,
            },
        },
        Atom::Builtin { .. } => return None,
    })
}

/// An assertion derived by a rule, with the binding that triggered it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedFact {
    pub axiom: Axiom,
    pub rule: String,
    pub binding: Binding,
}

fn head_variables(rule: &Rule) -> BTreeSet<&str> {
    rule.head.iter().flat_map(Atom::variables).collect()
}

/// Semi-naive forward chaining to fixpoint. Returns only assertions not
/// already in the ontology, in canonical axiom order.
///
/// Rounds only track head bindings. Each derived axiom's provenance is then
/// the least (rule name, full body binding) that produces it from the facts
/// known before the round in which it first appeared.
pub fn fixpoint(ontology: &Ontology, rules: &[Rule]) -> Result<Vec<DerivedFact>, EngineError> {
    for rule in rules {
        check_predicates(ontology, rule.body.iter().chain(&rule.head))?;
    }
    let prefixes = ontology.prefixes();
    let mut full = FactStore::from_axioms(ontology.axioms());
    let mut delta = full.clone();
    let mut rounds: Vec<BTreeSet<Axiom>> = Vec::new();

    loop {
        let mut round: BTreeSet<Axiom> = BTreeSet::new();
        for rule in rules {
            let keep = head_variables(rule);
            let relational = rule.body.iter().filter(|a| !a.is_builtin()).count();
            let mut bindings = BTreeSet::new();
            if relational == 0 {
                if rounds.is_empty() {
                    bindings = join(&rule.body, |_| &full, prefixes, Binding::default(), Some(&keep))?;
                }
            } else {
                for k in 0..relational {
                    let pick = |i: usize| if i == k { &delta } else { &full };
                    bindings.extend(join(&rule.body, pick, prefixes, Binding::default(), Some(&keep))?);
                }
            }
            for b in bindings {
                for atom in &rule.head {
                    if let Some(axiom) = instantiate(atom, &b) {
                        if !full.contains(&axiom) {
                            round.insert(axiom);
                        }
                    }
                }
            }
        }
        if round.is_empty() {
            break;
        }
        delta = FactStore::default();
        for axiom in &round {
            full.insert(axiom);
            delta.insert(axiom);
        }
        rounds.push(round);
    }

    let mut known = FactStore::from_axioms(ontology.axioms());
    let mut out = Vec::new();
    for round in rounds {
        for axiom in &round {
            out.push(witness(axiom, rules, &known, prefixes)?);
        }
        for axiom in &round {
            known.insert(axiom);
        }
    }
    out.sort_by(|a, b| a.axiom.canonical_cmp(&b.axiom));
    Ok(out)
}

/// Binding of a head atom's variables that makes it equal to `axiom`.
fn head_seed(atom: &Atom, axiom: &Axiom) -> Option<Binding> {
    let ind = |i: &Iri| Value::Individual(i.clone());
    let values = match (atom, axiom) {
        (Atom::Class { class, .. }, Axiom::ClassAssertion { class: c, individual }) if class == c => {
            vec![ind(individual)]
        }
        (
            Atom::ObjectProperty { property, .. },
            Axiom::ObjectPropertyAssertion {
                property: p,
                subject,
                object,
            },
        ) if property == p => vec![ind(subject), ind(object)],
        (
            Atom::DataProperty { property, .. },
            Axiom::DataPropertyAssertion {
                property: p,
                subject,
                value,
            },
        ) if property == p => vec![ind(subject), Value::Literal(value.clone())],
        _ => return None,
    };
    unify(&atom.terms(), &values, &Binding::default())
}

fn witness(axiom: &Axiom, rules: &[Rule], known: &FactStore, prefixes: &PrefixMap) -> Result<DerivedFact, EngineError> {
    let mut best: Option<(String, Binding)> = None;
    for rule in rules {
        for atom in &rule.head {
            let Some(seed) = head_seed(atom, axiom) else {
                continue;
            };
            for b in join(&rule.body, |_| known, prefixes, seed, None)? {
                let candidate = (rule.name.clone(), b);
                if best.as_ref().is_none_or(|cur| candidate < *cur) {
                    best = Some(candidate);
                }
            }
        }
    }
    let (rule, binding) = best.expect("a derived axiom has a body match in the facts before its round");
    Ok(DerivedFact {
        axiom: axiom.clone(),
        rule,
        binding,
    })
}

/// Reference evaluator: re-runs every rule over all known facts until a round
/// adds nothing. Kept as the oracle for [`fixpoint`].
pub fn naive_fixpoint(ontology: &Ontology, rules: &[Rule]) -> Result<BTreeSet<Axiom>, EngineError> {
    for rule in rules {
        check_predicates(ontology, rule.body.iter().chain(&rule.head))?;
    }
    let prefixes = ontology.prefixes();
    let mut derived: BTreeSet<Axiom> = BTreeSet::new();
    loop {
        let store = FactStore::from_axioms(ontology.axioms().chain(derived.iter()));
        let mut fresh = BTreeSet::new();
        for rule in rules {
            let keep = head_variables(rule);
            for b in join(&rule.body, |_| &store, prefixes, Binding::default(), Some(&keep))? {
                for atom in &rule.head {
                    if let Some(ax) = instantiate(atom, &b) {
                        if !store.contains(&ax) {
                            fresh.insert(ax);
                        }
                    }
                }
            }
        }
        if fresh.is_empty() {
            return Ok(derived);
        }
        derived.extend(fresh);
    }
}

/// One result cell: display text plus the typed value behind it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub display: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
struct TableJson<'a> {
    columns: &'a [String],
    rows: Vec<Vec<&'a str>>,
}

impl ResultTable {
    /// Tab-separated; header row carries the `?` sigil.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(|c| format!("?{c}")).collect();
        out.push_str(&header.join("\t"));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<&str> = row.iter().map(|c| c.display.as_str()).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = TableJson {
            columns: &self.columns,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|c| c.display.as_str()).collect())
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }
}

/// Evaluates a select query: projected, deduplicated, sorted by display text.
pub fn run_query(ontology: &Ontology, query: &Query) -> Result<ResultTable, EngineError> {
    let bindings = evaluate_body(ontology, &query.body)?;
    let rows: BTreeSet<Vec<(String, Value)>> = bindings
        .iter()
        .map(|b| {
            query
                .projection
                .iter()
                .map(|v| {
                    let value = b.get(v).cloned().expect("projection is bound");
                    (value.display(), value)
                })
                .collect()
        })
        .collect();
    Ok(ResultTable {
        columns: query.projection.clone(),
        rows: rows
            .into_iter()
            .map(|r| r.into_iter().map(|(display, value)| Cell { display, value }).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Datatype;

    const EDU: &str = "http://example.org/edu#";

    fn iri(local: &str) -> Iri {
        Iri::new(format!("{EDU}{local}")).unwrap()
    }

    fn base() -> Ontology {
        let mut o = Ontology::new(Iri::new("http://example.org/education").unwrap());
        o.prefixes_mut().insert("", EDU);
        for c in ["Person", "Employee", "A", "B", "C", "Course", "Instructor"] {
            o.declare(iri(c), EntityKind::Class).unwrap();
        }
        for p in ["salary", "hasOwner", "flag"] {
            o.declare(iri(p), EntityKind::DataProperty).unwrap();
        }
        o.declare(iri("hasCourse"), EntityKind::ObjectProperty).unwrap();
        o
    }

    fn individual(o: &mut Ontology, name: &str) {
        o.declare(iri(name), EntityKind::NamedIndividual).unwrap();
    }

    fn class_fact(o: &mut Ontology, c: &str, i: &str) {
        individual(o, i);
        o.add_axiom(Axiom::ClassAssertion {
            class: iri(c),
            individual: iri(i),
        })
        .unwrap();
    }

    fn data_fact(o: &mut Ontology, p: &str, s: &str, v: Literal) {
        o.add_axiom(Axiom::DataPropertyAssertion {
            property: iri(p),
            subject: iri(s),
            value: v,
        })
        .unwrap();
    }

    fn class_atom(c: &str, v: &str) -> Atom {
        Atom::Class {
            class: iri(c),
            arg: Term::var(v),
        }
    }

    fn data_atom(p: &str, s: &str, v: &str) -> Atom {
        Atom::DataProperty {
            property: iri(p),
            subject: Term::var(s),
            value: Term::var(v),
        }
    }

    fn employee_rule() -> Rule {
        Rule::new(
            "rule-1",
            vec![class_atom("Person", "p"), data_atom("salary", "p", "s")],
            vec![class_atom("Employee", "p")],
        )
        .unwrap()
    }

    #[test]
    fn body_binds_person_and_salary() {
        let mut o = base();
        class_fact(&mut o, "Person", "p1");
        data_fact(&mut o, "salary", "p1", Literal::integer(5000));
        let got = evaluate_body(&o, &[class_atom("Person", "p"), data_atom("salary", "p", "s")]).unwrap();
        let want: Binding = [
            ("p".to_string(), Value::Individual(iri("p1"))),
            ("s".to_string(), Value::Literal(Literal::integer(5000))),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, BTreeSet::from([want]));
    }

    #[test]
    fn body_on_empty_abox_is_empty() {
        let o = base();
        assert!(evaluate_body(&o, &[class_atom("Person", "p")]).unwrap().is_empty());
    }

    #[test]
    fn builtin_filter_matches_enumeration() {
        let mut o = base();
        for (p, salary) in [("p1", Some(500)), ("p2", Some(5000)), ("p3", None)] {
            class_fact(&mut o, "Person", p);
            if let Some(s) = salary {
                data_fact(&mut o, "salary", p, Literal::integer(s));
            }
        }
        let body = vec![
            class_atom("Person", "p"),
            data_atom("salary", "p", "s"),
            Atom::Builtin {
                op: BuiltinOp::GreaterThan,
                left: Term::var("s"),
                right: Term::Literal(Literal::integer(1000)),
            },
        ];
        let got = evaluate_body(&o, &body).unwrap();

        // enumerate every (person, salary fact) pair and filter by hand
        let mut expected = 0;
        for p in o.individuals() {
            for ax in o.axioms() {
                if let Axiom::DataPropertyAssertion { subject, value, .. } = ax {
                    let value: i64 = value.lexical().parse().unwrap();
                    if subject == p && value > 1000 {
                        expected += 1;
                    }
                }
            }
        }
        assert_eq!(expected, 1);
        assert_eq!(got.len(), expected);
        let b = got.iter().next().unwrap();
        assert_eq!(b.get("p"), Some(&Value::Individual(iri("p2"))));
    }

    #[test]
    fn builtin_may_precede_its_binding_atom() {
        let mut o = base();
        class_fact(&mut o, "Person", "p1");
        data_fact(&mut o, "salary", "p1", Literal::integer(5000));
        let body = vec![
            Atom::Builtin {
                op: BuiltinOp::LessThan,
                left: Term::Literal(Literal::integer(10)),
                right: Term::var("s"),
            },
            data_atom("salary", "p", "s"),
        ];
        assert_eq!(evaluate_body(&o, &body).unwrap().len(), 1);
    }

    #[test]
    fn builtin_type_error_names_binding() {
        let mut o = base();
        class_fact(&mut o, "Person", "p1");
        data_fact(&mut o, "flag", "p1", Literal::new("true", Datatype::Boolean).unwrap());
        let body = vec![
            data_atom("flag", "p", "f"),
            Atom::Builtin {
                op: BuiltinOp::LessThan,
                left: Term::var("f"),
                right: Term::var("f"),
            },
        ];
        match evaluate_body(&o, &body).unwrap_err() {
            EngineError::BuiltinType { op, binding, .. } => {
                assert_eq!(op, BuiltinOp::LessThan);
                assert!(binding.contains("?p=:p1"), "{binding}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_predicate_is_reported() {
        let o = base();
        let err = evaluate_body(&o, &[class_atom("Ghost", "x")]).unwrap_err();
        assert!(matches!(err, EngineError::UnknownPredicate { .. }));
    }

    #[test]
    fn employee_rule_fires_with_provenance() {
        let mut o = base();
        class_fact(&mut o, "Person", "p1");
        data_fact(&mut o, "salary", "p1", Literal::integer(5000));
        let derived = fixpoint(&o, &[employee_rule()]).unwrap();
        assert_eq!(derived.len(), 1);
        assert_eq!(
            derived[0].axiom,
            Axiom::ClassAssertion {
                class: iri("Employee"),
                individual: iri("p1")
            }
        );
        assert_eq!(derived[0].rule, "rule-1");
        assert_eq!(
            derived[0].binding.get("s"),
            Some(&Value::Literal(Literal::integer(5000)))
        );
        assert!(fixpoint(&o, &[]).unwrap().is_empty());
    }

    #[test]
    fn chained_rules_match_naive() {
        let mut o = base();
        class_fact(&mut o, "A", "i");
        let rules = vec![
            Rule::new("ab", vec![class_atom("A", "x")], vec![class_atom("B", "x")]).unwrap(),
            Rule::new("bc", vec![class_atom("B", "x")], vec![class_atom("C", "x")]).unwrap(),
        ];
        let got: BTreeSet<Axiom> = fixpoint(&o, &rules).unwrap().into_iter().map(|d| d.axiom).collect();
        let want = BTreeSet::from([
            Axiom::ClassAssertion {
                class: iri("B"),
                individual: iri("i"),
            },
            Axiom::ClassAssertion {
                class: iri("C"),
                individual: iri("i"),
            },
        ]);
        assert_eq!(got, want);
        assert_eq!(naive_fixpoint(&o, &rules).unwrap(), want);
    }

    #[test]
    fn owner_query_projects_rows() {
        let mut o = base();
        class_fact(&mut o, "Course", "c1");
        class_fact(&mut o, "Instructor", "i1");
        o.add_axiom(Axiom::ObjectPropertyAssertion {
            property: iri("hasCourse"),
            subject: iri("i1"),
            object: iri("c1"),
        })
        .unwrap();
        data_fact(&mut o, "hasOwner", "i1", Literal::string("Priya"));
        let query = Query::new(
            vec![
                class_atom("Course", "c"),
                class_atom("Instructor", "I"),
                Atom::ObjectProperty {
                    property: iri("hasCourse"),
                    subject: Term::var("I"),
                    object: Term::var("c"),
                },
                data_atom("hasOwner", "I", "P"),
            ],
            vec!["I".into(), "P".into()],
        )
        .unwrap();
        let table = run_query(&o, &query).unwrap();
        assert_eq!(table.columns, vec!["I", "P"]);
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0][0].display, "i1");
        assert_eq!(table.rows[0][1].display, "Priya");
        assert_eq!(table.to_tsv(), "?I\t?P\ni1\tPriya\n");
    }

    #[test]
    fn query_rows_and_empty_table() {
        let mut o = base();
        let q = Query::new(vec![class_atom("Person", "p")], vec!["p".into()]).unwrap();
        let empty = run_query(&o, &q).unwrap();
        assert_eq!(empty.columns, vec!["p"]);
        assert!(empty.rows.is_empty());
        for p in ["p3", "p1", "p2"] {
            class_fact(&mut o, "Person", p);
        }
        let table = run_query(&o, &q).unwrap();
        let names: Vec<&str> = table.rows.iter().map(|r| r[0].display.as_str()).collect();
        assert_eq!(names, ["p1", "p2", "p3"]);
    }

    #[test]
    fn rule_safety_checks() {
        let unsafe_head = Rule::new("r", vec![class_atom("A", "x")], vec![class_atom("B", "y")]);
        assert_eq!(unsafe_head.unwrap_err(), RuleError::Unsafe("y".into()));

        let builtin_head = Rule::new(
            "r",
            vec![class_atom("A", "x")],
            vec![Atom::Builtin {
                op: BuiltinOp::Equal,
                left: Term::var("x"),
                right: Term::var("x"),
            }],
        );
        assert_eq!(builtin_head.unwrap_err(), RuleError::BuiltinInHead);

        let builtin_only_binding = Rule::new(
            "r",
            vec![
                class_atom("A", "x"),
                Atom::Builtin {
                    op: BuiltinOp::Equal,
                    left: Term::var("x"),
                    right: Term::var("z"),
                },
            ],
            vec![class_atom("B", "x")],
        );
        assert_eq!(builtin_only_binding.unwrap_err(), RuleError::Unsafe("z".into()));

        let sorts = Rule::new(
            "r",
            vec![data_atom("salary", "p", "s")],
            vec![class_atom("Employee", "s")],
        );
        assert_eq!(sorts.unwrap_err(), RuleError::SortConflict("s".into()));

        let projection = Query::new(vec![class_atom("A", "x")], vec!["y".into()]);
        assert_eq!(projection.unwrap_err(), RuleError::UnboundProjection("y".into()));
        assert_eq!(Query::new(vec![], vec![]).unwrap_err(), RuleError::EmptyBody);
    }

    #[test]
    fn literal_dedup_uses_canonical_form() {
        let mut o = base();
        class_fact(&mut o, "Person", "p1");
        data_fact(&mut o, "salary", "p1", Literal::new("05", Datatype::Integer).unwrap());
        let dup = o
            .add_axiom(Axiom::DataPropertyAssertion {
                property: iri("salary"),
                subject: iri("p1"),
                value: Literal::new("5", Datatype::Integer).unwrap(),
            })
            .unwrap();
        assert!(!dup);
    }
}
