//! Structural typing and consistency checks.
//!
//! Subsumption is the asserted `SubClassOf` closure; there is no tableau.
//! Domain and range axioms either infer memberships (`infer`) or act as
//! constraints that are checked against asserted types (`strict`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{self, DerivedFact, EngineError, Rule};
use crate::model::{Axiom, Iri, Ontology, PrefixMap};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypingMode {
    #[default]
    Infer,
    Strict,
}

impl fmt::Display for TypingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypingMode::Infer => "infer",
            TypingMode::Strict => "strict",
        })
    }
}

impl FromStr for TypingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "infer" => Ok(TypingMode::Infer),
            "strict" => Ok(TypingMode::Strict),
            other => Err(format!("unknown typing mode `{other}` (expected infer or strict)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    DisjointMembership,
    FunctionalObjectCardinality,
    FunctionalDataCardinality,
    RangeDatatypeMismatch,
    StrictDomainViolation,
    StrictRangeViolation,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::DisjointMembership => "DISJOINT_MEMBERSHIP",
            ViolationCode::FunctionalObjectCardinality => "FUNCTIONAL_OBJECT_CARDINALITY",
            ViolationCode::FunctionalDataCardinality => "FUNCTIONAL_DATA_CARDINALITY",
            ViolationCode::RangeDatatypeMismatch => "RANGE_DATATYPE_MISMATCH",
            ViolationCode::StrictDomainViolation => "STRICT_DOMAIN_VIOLATION",
            ViolationCode::StrictRangeViolation => "STRICT_RANGE_VIOLATION",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub subject: Iri,
    pub detail: String,
    pub provenance: Vec<Axiom>,
}

impl Violation {
    /// One line: `CODE subject: detail [axiom; axiom]`.
    pub fn render(&self, prefixes: &PrefixMap) -> String {
        let provenance: Vec<String> = self.provenance.iter().map(|a| a.render(prefixes)).collect();
        format!(
            "{} {}: {} [{}]",
            self.code,
            prefixes.render_iri(&self.subject),
            self.detail,
            provenance.join("; ")
        )
    }
}

#[derive(Serialize)]
struct ViolationRecord<'a> {
    code: ViolationCode,
    subject: &'a str,
    detail: &'a str,
    provenance: Vec<String>,
}

pub fn violations_to_json(violations: &[Violation], prefixes: &PrefixMap) -> String {
    let records: Vec<ViolationRecord> = violations
        .iter()
        .map(|v| ViolationRecord {
            code: v.code,
            subject: v.subject.as_str(),
            detail: &v.detail,
            provenance: v.provenance.iter().map(|a| a.render(prefixes)).collect(),
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&records).expect("plain data serializes");
    out.push('\n');
    out
}

pub fn violations_to_text(violations: &[Violation], prefixes: &PrefixMap) -> String {
    violations.iter().map(|v| v.render(prefixes) + "\n").collect()
}

type Membership = (Iri, Iri); // (class, individual)

/// Each inferred membership with the axioms it was derived from.
fn typing_derivations(ontology: &Ontology) -> BTreeMap<Axiom, Vec<Axiom>> {
    let mut known: BTreeSet<Membership> = BTreeSet::new();
    for axiom in ontology.axioms() {
        if let Axiom::ClassAssertion { class, individual } = axiom {
            known.insert((class.clone(), individual.clone()));
        }
    }
    let mut derived: BTreeMap<Axiom, Vec<Axiom>> = BTreeMap::new();
    let mut record = |known: &mut BTreeSet<Membership>,
                      next: &mut Vec<Membership>,
                      class: &Iri,
                      individual: &Iri,
                      reasons: Vec<Axiom>| {
        let key = (class.clone(), individual.clone());
        if known.insert(key.clone()) {
            derived.insert(
                Axiom::ClassAssertion {
                    class: class.clone(),
                    individual: individual.clone(),
                },
                reasons,
            );
            next.push(key);
        }
    };

    let mut frontier: Vec<Membership> = Vec::new();
    for axiom in ontology.axioms() {
        let (property, subject, object) = match axiom {
            Axiom::ObjectPropertyAssertion {
                property,
                subject,
                object,
            } => (property, subject, Some(object)),
            Axiom::DataPropertyAssertion { property, subject, .. } => (property, subject, None),
            _ => continue,
        };
        for domain in ontology.domains_of(property) {
            let why = domain_axiom(ontology, property, domain);
            record(&mut known, &mut frontier, domain, subject, vec![why, axiom.clone()]);
        }
        if let Some(object) = object {
            for range in ontology.object_ranges_of(property) {
                let why = Axiom::ObjectPropertyRange {
                    property: property.clone(),
                    class: range.clone(),
                };
                record(&mut known, &mut frontier, range, object, vec![why, axiom.clone()]);
            }
        }
    }
    // upward closure over every membership, asserted or inferred
    frontier.extend(known.iter().cloned());
    frontier.sort();
    frontier.dedup();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (class, individual) in &frontier {
            for sup in ontology.direct_superclasses(class) {
                let why = vec![
                    Axiom::ClassAssertion {
                        class: class.clone(),
                        individual: individual.clone(),
                    },
                    Axiom::SubClassOf {
                        sub: class.clone(),
                        sup: sup.clone(),
                    },
                ];
                record(&mut known, &mut next, sup, individual, why);
            }
        }
        next.sort();
        frontier = next;
    }
    derived
}

fn domain_axiom(ontology: &Ontology, property: &Iri, class: &Iri) -> Axiom {
    let object = Axiom::ObjectPropertyDomain {
        property: property.clone(),
        class: class.clone(),
    };
    if ontology.contains(&object) {
        object
    } else {
        Axiom::DataPropertyDomain {
            property: property.clone(),
            class: class.clone(),
        }
    }
}

/// Class assertions entailed by domain/range typing and the subclass closure,
/// excluding those already asserted. Empty in strict mode.
pub fn materialize_typing(ontology: &Ontology, mode: TypingMode) -> Vec<Axiom> {
    match mode {
        TypingMode::Strict => Vec::new(),
        TypingMode::Infer => {
            let mut out: Vec<Axiom> = typing_derivations(ontology).into_keys().collect();
            out.sort_by(Axiom::canonical_cmp);
            out
        }
    }
}

/// Like [`materialize_typing`], with the axioms each assertion follows from.
pub fn explain_typing(ontology: &Ontology, mode: TypingMode) -> Vec<(Axiom, Vec<Axiom>)> {
    match mode {
        TypingMode::Strict => Vec::new(),
        TypingMode::Infer => {
            let mut out: Vec<(Axiom, Vec<Axiom>)> = typing_derivations(ontology).into_iter().collect();
            out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
            out
        }
    }
}

/// Membership of `individual` in `class` through the subclass closure:
/// the supporting assertion plus the `SubClassOf` chain, if any.
fn membership_support(
    ontology: &Ontology,
    members: &BTreeSet<Membership>,
    class: &Iri,
    individual: &Iri,
) -> Option<Vec<Axiom>> {
    let direct = (class.clone(), individual.clone());
    if members.contains(&direct) {
        return Some(vec![Axiom::ClassAssertion {
            class: class.clone(),
            individual: individual.clone(),
        }]);
    }
    // breadth-first from each asserted class of the individual, least first
    for (asserted, _) in members.iter().filter(|(_, i)| i == individual) {
        if let Some(path) = superclass_chain(ontology, asserted, class) {
            let mut out = vec![Axiom::ClassAssertion {
                class: asserted.clone(),
                individual: individual.clone(),
            }];
            out.extend(path);
            return Some(out);
        }
    }
    None
}

fn superclass_chain(ontology: &Ontology, from: &Iri, to: &Iri) -> Option<Vec<Axiom>> {
    let mut parent: BTreeMap<Iri, Iri> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([from.clone()]);
    while let Some(c) = queue.pop_front() {
        if &c == to {
            let mut chain = Vec::new();
            let mut cur = c;
            while let Some(p) = parent.get(&cur) {
                chain.push(Axiom::SubClassOf {
                    sub: p.clone(),
                    sup: cur.clone(),
                });
                cur = p.clone();
            }
            chain.reverse();
            return Some(chain);
        }
        for sup in ontology.direct_superclasses(&c) {
            if sup != from && !parent.contains_key(sup) {
                parent.insert(sup.clone(), c.clone());
                queue.push_back(sup.clone());
            }
        }
    }
    None
}

/// All violations, sorted by (code, subject, detail).
pub fn check_consistency(ontology: &Ontology, derived: &[Axiom], mode: TypingMode) -> Vec<Violation> {
    let prefixes = ontology.prefixes();
    let name = |iri: &Iri| prefixes.render_iri(iri);
    let mut members: BTreeSet<Membership> = BTreeSet::new();
    for axiom in ontology.axioms().chain(derived) {
        if let Axiom::ClassAssertion { class, individual } = axiom {
            members.insert((class.clone(), individual.clone()));
        }
    }
    let individuals: BTreeSet<&Iri> = members.iter().map(|(_, i)| i).collect();
    let mut violations = Vec::new();

    for axiom in ontology.axioms() {
        match axiom {
            Axiom::DisjointClasses(classes) => {
                for individual in &individuals {
                    let mut clash = Vec::new();
                    let mut provenance = vec![axiom.clone()];
                    for class in classes {
                        if let Some(support) = membership_support(ontology, &members, class, individual) {
                            clash.push(name(class));
                            provenance.extend(support);
                        }
                    }
                    if clash.len() >= 2 {
                        dedup_keep_order(&mut provenance);
                        violations.push(Violation {
                            code: ViolationCode::DisjointMembership,
                            subject: (*individual).clone(),
                            detail: format!("member of disjoint classes {}", clash.join(", ")),
                            provenance,
                        });
                    }
                }
            }
            Axiom::FunctionalObjectProperty(property) => {
                let mut by_subject: BTreeMap<&Iri, Vec<&Axiom>> = BTreeMap::new();
                for a in ontology.axioms() {
                    if let Axiom::ObjectPropertyAssertion {
                        property: p, subject, ..
                    } = a
                    {
                        if p == property {
                            by_subject.entry(subject).or_default().push(a);
                        }
                    }
                }
                for (subject, assertions) in by_subject.into_iter().filter(|(_, v)| v.len() > 1) {
                    let objects: Vec<String> = assertions
                        .iter()
                        .filter_map(|a| match a {
                            Axiom::ObjectPropertyAssertion { object, .. } => Some(name(object)),
                            _ => None,
                        })
                        .collect();
                    violations.push(Violation {
                        code: ViolationCode::FunctionalObjectCardinality,
                        subject: subject.clone(),
                        detail: format!(
                            "functional property {} has {} values: {}",
                            name(property),
                            objects.len(),
                            objects.join(", ")
                        ),
                        provenance: sorted_provenance(axiom, assertions),
                    });
                }
            }
            Axiom::FunctionalDataProperty(property) => {
                let mut by_subject: BTreeMap<&Iri, Vec<&Axiom>> = BTreeMap::new();
                for a in ontology.axioms() {
                    if let Axiom::DataPropertyAssertion {
                        property: p, subject, ..
                    } = a
                    {
                        if p == property {
                            by_subject.entry(subject).or_default().push(a);
                        }
                    }
                }
                for (subject, assertions) in by_subject.into_iter().filter(|(_, v)| v.len() > 1) {
                    let values: Vec<String> = assertions
                        .iter()
                        .filter_map(|a| match a {
                            Axiom::DataPropertyAssertion { value, .. } => Some(value.render(prefixes)),
                            _ => None,
                        })
                        .collect();
                    violations.push(Violation {
                        code: ViolationCode::FunctionalDataCardinality,
                        subject: subject.clone(),
                        detail: format!(
                            "functional property {} has {} values: {}",
                            name(property),
                            values.len(),
                            values.join(", ")
                        ),
                        provenance: sorted_provenance(axiom, assertions),
                    });
                }
            }
            Axiom::DataPropertyAssertion {
                property,
                subject,
                value,
            } => {
                for range in ontology.data_ranges_of(property) {
                    if value.datatype() != range {
                        violations.push(Violation {
                            code: ViolationCode::RangeDatatypeMismatch,
                            subject: subject.clone(),
                            detail: format!(
                                "{} value {} is not xsd:{}",
                                name(property),
                                value.render(prefixes),
                                range
                            ),
                            provenance: vec![
                                Axiom::DataPropertyRange {
                                    property: property.clone(),
                                    datatype: range,
                                },
                                axiom.clone(),
                            ],
                        });
                    }
                }
            }
            _ => {}
        }
    }

    if mode == TypingMode::Strict {
        violations.extend(strict_violations(ontology, &members));
    }
    violations.sort_by(|a, b| (a.code, &a.subject, &a.detail).cmp(&(b.code, &b.subject, &b.detail)));
    violations.dedup();
    violations
}

fn strict_violations(ontology: &Ontology, members: &BTreeSet<Membership>) -> Vec<Violation> {
    let prefixes = ontology.prefixes();
    let name = |iri: &Iri| prefixes.render_iri(iri);
    let mut out = Vec::new();
    let lacks = |class: &Iri, individual: &Iri| membership_support(ontology, members, class, individual).is_none();
    for axiom in ontology.axioms() {
        let (property, subject, object) = match axiom {
            Axiom::ObjectPropertyAssertion {
                property,
                subject,
                object,
            } => (property, subject, Some(object)),
            Axiom::DataPropertyAssertion { property, subject, .. } => (property, subject, None),
            _ => continue,
        };
        for domain in ontology.domains_of(property) {
            if lacks(domain, subject) {
                out.push(Violation {
                    code: ViolationCode::StrictDomainViolation,
                    subject: subject.clone(),
                    detail: format!("subject of {} is not asserted to be a {}", name(property), name(domain)),
                    provenance: vec![domain_axiom(ontology, property, domain), axiom.clone()],
                });
            }
        }
        if let Some(object) = object {
            for range in ontology.object_ranges_of(property) {
                if lacks(range, object) {
                    out.push(Violation {
                        code: ViolationCode::StrictRangeViolation,
                        subject: object.clone(),
                        detail: format!("object of {} is not asserted to be a {}", name(property), name(range)),
                        provenance: vec![
                            Axiom::ObjectPropertyRange {
                                property: property.clone(),
                                class: range.clone(),
                            },
                            axiom.clone(),
                        ],
                    });
                }
            }
        }
    }
    out
}

fn sorted_provenance(head: &Axiom, mut rest: Vec<&Axiom>) -> Vec<Axiom> {
    rest.sort_by(|a, b| a.canonical_cmp(b));
    std::iter::once(head.clone()).chain(rest.into_iter().cloned()).collect()
}

fn dedup_keep_order(axioms: &mut Vec<Axiom>) {
    let mut seen = BTreeSet::new();
    axioms.retain(|a| seen.insert(a.clone()));
}

/// Result of alternating typing materialization and rule evaluation until
/// neither adds anything.
#[derive(Debug, Clone)]
pub struct Saturation {
    pub ontology: Ontology,
    pub typing: Vec<(Axiom, Vec<Axiom>)>,
    pub derived: Vec<DerivedFact>,
}

impl Saturation {
    pub fn new_axioms(&self) -> impl Iterator<Item = &Axiom> {
        self.typing
            .iter()
            .map(|(a, _)| a)
            .chain(self.derived.iter().map(|f| &f.axiom))
    }
}

pub fn saturate(ontology: &Ontology, rules: &[Rule], mode: TypingMode) -> Result<Saturation, EngineError> {
    let mut current = ontology.clone();
    let mut typing = Vec::new();
    let mut derived = Vec::new();
    loop {
        let inferred = explain_typing(&current, mode);
        for (axiom, _) in &inferred {
            current
                .add_axiom(axiom.clone())
                .expect("typing only asserts declared classes of declared individuals");
        }
        let facts = engine::fixpoint(&current, rules)?;
        for fact in &facts {
            current
                .add_axiom(fact.axiom.clone())
                .expect("rule heads are checked against declared predicates");
        }
        let done = inferred.is_empty() && facts.is_empty();
        typing.extend(inferred);
        derived.extend(facts);
        if done {
            break;
        }
    }
    Ok(Saturation {
        ontology: current,
        typing,
        derived,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_ontology, parse_rules, DocumentKind, SourceDocument};

    const HEAD: &str = "Prefix(:=<http://example.org/edu#>)
Ontology(<http://example.org/education>
  Declaration(Class(:Person)) Declaration(Class(:Student)) Declaration(Class(:Instructor))
  Declaration(Class(:Employee)) Declaration(Class(:Department)) Declaration(Class(:StudyProg))
  Declaration(ObjectProperty(:hasStudyProg)) Declaration(DataProperty(:salary))
  Declaration(NamedIndividual(:d1)) Declaration(NamedIndividual(:sp1)) Declaration(NamedIndividual(:sp2))
  Declaration(NamedIndividual(:s1))
  SubClassOf(:Student :Person) SubClassOf(:Instructor :Person) SubClassOf(:Employee :Person)
  ObjectPropertyDomain(:hasStudyProg :Department) ObjectPropertyRange(:hasStudyProg :StudyProg)
  DataPropertyRange(:salary xsd:integer)
";

    fn with(body: &str) -> Ontology {
        let text = format!("{HEAD}{body}\n)");
        parse_ontology(&SourceDocument::new("t", text, DocumentKind::Ontology)).unwrap()
    }

    fn ca(o: &Ontology, class: &str, ind: &str) -> Axiom {
        let p = o.prefixes();
        Axiom::ClassAssertion {
            class: p.resolve("", class).unwrap(),
            individual: p.resolve("", ind).unwrap(),
        }
    }

    fn codes(v: &[Violation]) -> Vec<&str> {
        v.iter().map(|v| v.code.as_str()).collect()
    }

    #[test]
    fn domain_and_range_typing() {
        let o = with("ObjectPropertyAssertion(:hasStudyProg :d1 :sp1)");
        let derived = materialize_typing(&o, TypingMode::Infer);
        assert_eq!(derived, vec![ca(&o, "Department", "d1"), ca(&o, "StudyProg", "sp1")]);
        assert!(materialize_typing(&o, TypingMode::Strict).is_empty());
    }

    #[test]
    fn subclass_closure() {
        let o = with("ClassAssertion(:Student :s1)");
        assert_eq!(materialize_typing(&o, TypingMode::Infer), vec![ca(&o, "Person", "s1")]);
        let explained = explain_typing(&o, TypingMode::Infer);
        assert_eq!(explained[0].1.len(), 2);
    }

    #[test]
    fn no_assertions_no_typing() {
        let o = with("");
        assert!(materialize_typing(&o, TypingMode::Infer).is_empty());
        assert!(check_consistency(&o, &[], TypingMode::Strict).is_empty());
    }

    #[test]
    fn typing_is_idempotent() {
        let mut o = with("ObjectPropertyAssertion(:hasStudyProg :s1 :sp1) ClassAssertion(:Student :s1)");
        for a in materialize_typing(&o, TypingMode::Infer) {
            o.add_axiom(a).unwrap();
        }
        assert!(materialize_typing(&o, TypingMode::Infer).is_empty());
    }

    #[test]
    fn disjoint_membership() {
        let o =
            with("DisjointClasses(:Student :Instructor) ClassAssertion(:Student :s1) ClassAssertion(:Instructor :s1)");
        let v = check_consistency(&o, &[], TypingMode::Infer);
        assert_eq!(codes(&v), ["DISJOINT_MEMBERSHIP"]);
        assert_eq!(v[0].subject.local_name(), "s1");
        assert_eq!(v[0].provenance.len(), 3);
        for a in &v[0].provenance {
            assert!(o.contains(a));
        }
    }

    #[test]
    fn disjointness_through_subclass() {
        let o =
            with("DisjointClasses(:Person :Department) ClassAssertion(:Student :s1) ClassAssertion(:Department :s1)");
        let v = check_consistency(&o, &[], TypingMode::Strict);
        assert_eq!(codes(&v), ["DISJOINT_MEMBERSHIP"]);
        assert!(v[0].provenance.contains(&Axiom::SubClassOf {
            sub: o.prefixes().resolve("", "Student").unwrap(),
            sup: o.prefixes().resolve("", "Person").unwrap(),
        }));
    }

    #[test]
    fn functional_cardinalities() {
        let o = with(
            "FunctionalObjectProperty(:hasStudyProg) FunctionalDataProperty(:salary)
             ObjectPropertyAssertion(:hasStudyProg :d1 :sp1) ObjectPropertyAssertion(:hasStudyProg :d1 :sp2)
             DataPropertyAssertion(:salary :s1 \"1\"^^xsd:integer) DataPropertyAssertion(:salary :s1 \"01\"^^xsd:integer)",
        );
        // "01" canonicalizes to "1": only the object property is violated
        let v = check_consistency(&o, &[], TypingMode::Infer);
        assert_eq!(codes(&v), ["FUNCTIONAL_OBJECT_CARDINALITY"]);
        let o = with(
            "FunctionalDataProperty(:salary)
             DataPropertyAssertion(:salary :s1 \"1\"^^xsd:integer) DataPropertyAssertion(:salary :s1 \"2\"^^xsd:integer)",
        );
        assert_eq!(
            codes(&check_consistency(&o, &[], TypingMode::Infer)),
            ["FUNCTIONAL_DATA_CARDINALITY"]
        );
    }

    #[test]
    fn datatype_mismatch() {
        let o = with("DataPropertyAssertion(:salary :s1 \"lots\")");
        let v = check_consistency(&o, &[], TypingMode::Infer);
        assert_eq!(codes(&v), ["RANGE_DATATYPE_MISMATCH"]);
    }

    #[test]
    fn strict_domain_violation_only_in_strict_mode() {
        let o = with("ClassAssertion(:Student :s1) ClassAssertion(:StudyProg :sp1) ObjectPropertyAssertion(:hasStudyProg :s1 :sp1)");
        let strict = check_consistency(&o, &[], TypingMode::Strict);
        assert_eq!(codes(&strict), ["STRICT_DOMAIN_VIOLATION"]);
        assert_eq!(strict[0].subject.local_name(), "s1");
        let derived = materialize_typing(&o, TypingMode::Infer);
        assert!(check_consistency(&o, &derived, TypingMode::Infer).is_empty());
    }

    #[test]
    fn rule_derived_contradiction_is_flagged() {
        let o = with(
            "Declaration(NamedIndividual(:p1)) DisjointClasses(:Student :Employee)
             ClassAssertion(:Student :p1) DataPropertyAssertion(:salary :p1 \"5\"^^xsd:integer)",
        );
        let rules = parse_rules(
            &SourceDocument::new("r", "Person(?p) ^ salary(?p, ?s) -> Employee(?p)", DocumentKind::Rules),
            &o,
        )
        .unwrap();
        let sat = saturate(&o, &rules, TypingMode::Infer).unwrap();
        assert!(sat.ontology.contains(&ca(&o, "Employee", "p1")));
        let v = check_consistency(&sat.ontology, &[], TypingMode::Infer);
        assert_eq!(codes(&v), ["DISJOINT_MEMBERSHIP"]);
    }

    #[test]
    fn report_formats() {
        let o =
            with("DisjointClasses(:Student :Instructor) ClassAssertion(:Student :s1) ClassAssertion(:Instructor :s1)");
        let v = check_consistency(&o, &[], TypingMode::Infer);
        assert_eq!(
            violations_to_text(&v, o.prefixes()),
            "DISJOINT_MEMBERSHIP :s1: member of disjoint classes :Instructor, :Student \
             [DisjointClasses(:Instructor :Student); ClassAssertion(:Instructor :s1); ClassAssertion(:Student :s1)]\n"
        );
        let json: serde_json::Value = serde_json::from_str(&violations_to_json(&v, o.prefixes())).unwrap();
        assert_eq!(json[0]["code"], "DISJOINT_MEMBERSHIP");
        assert_eq!(json[0]["subject"], "http://example.org/edu#s1");
        assert_eq!(json[0]["provenance"].as_array().unwrap().len(), 3);
        assert_eq!(violations_to_json(&[], o.prefixes()), "[]\n");
    }
}
