use std::collections::BTreeSet;

use ontofdd::fixtures::education_fixture;
use ontofdd::model::{Axiom, Datatype, Iri, Literal, Ontology};
use ontofdd::parser::{parse_ontology, parse_rules};
use ontofdd::reasoner::{
    check_consistency, materialize_typing, saturate, violations_to_json, TypingMode, ViolationCode,
};
use ontofdd::testing::{iri, random_instance, OBJECT_PROPERTIES};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random instance with an acyclic hierarchy and random domains/ranges.
fn typed_instance(seed: u64) -> Ontology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut o = random_instance(&mut rng).ontology;
    let classes: Vec<Iri> = o.classes().cloned().collect();
    for (i, c) in classes.iter().enumerate().skip(1) {
        for _ in 0..rng.gen_range(0..=2) {
            let sup = classes[rng.gen_range(0..i)].clone();
            o.add_axiom(Axiom::SubClassOf { sub: c.clone(), sup }).unwrap();
        }
    }
    for p in OBJECT_PROPERTIES.iter().chain(["score"].iter()) {
        let p = iri(p);
        for _ in 0..rng.gen_range(0..=2) {
            let class = classes.choose(&mut rng).unwrap().clone();
            let ax = if o.data_properties().any(|d| d == &p) {
                Axiom::DataPropertyDomain {
                    property: p.clone(),
                    class,
                }
            } else {
                Axiom::ObjectPropertyDomain {
                    property: p.clone(),
                    class,
                }
            };
            o.add_axiom(ax).unwrap();
        }
        if o.object_properties().any(|d| d == &p) && rng.gen_bool(0.6) {
            let class = classes.choose(&mut rng).unwrap().clone();
            o.add_axiom(Axiom::ObjectPropertyRange {
                property: p.clone(),
                class,
            })
            .unwrap();
        }
    }
    o
}

fn with(o: &Ontology, extra: impl IntoIterator<Item = Axiom>) -> Ontology {
    let mut o = o.clone();
    for a in extra {
        o.add_axiom(a).unwrap();
    }
    o
}

/// Memberships by brute force: repeat every typing rule until nothing changes.
fn brute_force_memberships(o: &Ontology) -> BTreeSet<(Iri, Iri)> {
    let mut m: BTreeSet<(Iri, Iri)> = BTreeSet::new();
    loop {
        let before = m.len();
        for a in o.axioms() {
            match a {
                Axiom::ClassAssertion { class, individual } => {
                    m.insert((class.clone(), individual.clone()));
                }
                Axiom::ObjectPropertyAssertion {
                    property,
                    subject,
                    object,
                } => {
                    for b in o.axioms() {
                        match b {
                            Axiom::ObjectPropertyDomain { property: p, class } if p == property => {
                                m.insert((class.clone(), subject.clone()));
                            }
                            Axiom::ObjectPropertyRange { property: p, class } if p == property => {
                                m.insert((class.clone(), object.clone()));
                            }
                            _ => {}
                        }
                    }
                }
                Axiom::DataPropertyAssertion { property, subject, .. } => {
                    for b in o.axioms() {
                        if let Axiom::DataPropertyDomain { property: p, class } = b {
                            if p == property {
                                m.insert((class.clone(), subject.clone()));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        for a in o.axioms() {
            if let Axiom::SubClassOf { sub, sup } = a {
                let lifted: Vec<_> = m
                    .iter()
                    .filter(|(c, _)| c == sub)
                    .map(|(_, i)| (sup.clone(), i.clone()))
                    .collect();
                m.extend(lifted);
            }
        }
        if m.len() == before {
            return m;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn typing_matches_brute_force(seed in any::<u64>()) {
        let o = typed_instance(seed);
        let derived: BTreeSet<Axiom> = materialize_typing(&o, TypingMode::Infer).into_iter().collect();
        let expected: BTreeSet<Axiom> = brute_force_memberships(&o)
            .into_iter()
            .map(|(class, individual)| Axiom::ClassAssertion { class, individual })
            .filter(|a| !o.contains(a))
            .collect();
        prop_assert_eq!(derived, expected);
    }

    #[test]
    fn typing_is_a_fixpoint(seed in any::<u64>()) {
        let o = typed_instance(seed);
        let closed = with(&o, materialize_typing(&o, TypingMode::Infer));
        prop_assert!(materialize_typing(&closed, TypingMode::Infer).is_empty());
    }

    #[test]
    fn strict_mode_derives_nothing_and_infer_has_no_strict_codes(seed in any::<u64>()) {
        let o = typed_instance(seed);
        prop_assert!(materialize_typing(&o, TypingMode::Strict).is_empty());
        let derived = materialize_typing(&o, TypingMode::Infer);
        for v in check_consistency(&o, &derived, TypingMode::Infer) {
            prop_assert!(!matches!(v.code, ViolationCode::StrictDomainViolation | ViolationCode::StrictRangeViolation));
        }
    }

    #[test]
    fn violations_are_deterministic_and_sourced(seed in any::<u64>()) {
        let mut o = typed_instance(seed);
        let classes: Vec<Iri> = o.classes().cloned().collect();
        if classes.len() >= 2 {
            o.add_axiom(Axiom::DisjointClasses(classes[..2].to_vec())).unwrap();
        }
        o.add_axiom(Axiom::FunctionalObjectProperty(iri("p0"))).unwrap();
        let derived = materialize_typing(&o, TypingMode::Infer);
        let materialized = with(&o, derived.clone());
        for mode in [TypingMode::Infer, TypingMode::Strict] {
            let first = check_consistency(&o, &derived, mode);
            let second = check_consistency(&o, &derived, mode);
            prop_assert_eq!(violations_to_json(&first, o.prefixes()), violations_to_json(&second, o.prefixes()));
            let keys: Vec<_> = first.iter().map(|v| (v.code, v.subject.clone())).collect();
            let sorted = { let mut k = keys.clone(); k.sort(); k };
            prop_assert_eq!(&keys, &sorted);
            for v in &first {
                prop_assert!(!v.provenance.is_empty());
                for a in &v.provenance {
                    prop_assert!(materialized.contains(a), "{:?} not in ontology", a);
                }
            }
        }
    }

    #[test]
    fn derived_axioms_use_declared_entities(seed in any::<u64>()) {
        let o = typed_instance(seed);
        let closed = with(&o, materialize_typing(&o, TypingMode::Infer));
        prop_assert_eq!(closed.entities().count(), o.entities().count());
    }
}

#[test]
fn seeded_violations_have_the_right_codes() {
    let o = parse_ontology(&education_fixture().ontology_document()).unwrap();
    let e = |l: &str| o.prefixes().resolve("", l).unwrap();
    let cases: Vec<(Vec<Axiom>, ViolationCode)> = vec![
        (
            vec![
                Axiom::DisjointClasses(vec![e("Course"), e("Person")]),
                Axiom::ClassAssertion {
                    class: e("Course"),
                    individual: e("p1"),
                },
            ],
            ViolationCode::DisjointMembership,
        ),
        (
            vec![
                Axiom::FunctionalObjectProperty(e("hasCourse")),
                Axiom::ObjectPropertyAssertion {
                    property: e("hasCourse"),
                    subject: e("i1"),
                    object: e("p1"),
                },
            ],
            ViolationCode::FunctionalObjectCardinality,
        ),
        (
            vec![Axiom::DataPropertyAssertion {
                property: e("salary"),
                subject: e("p1"),
                value: Literal::integer(7),
            }],
            ViolationCode::FunctionalDataCardinality,
        ),
        (
            vec![Axiom::DataPropertyAssertion {
                property: e("firstName"),
                subject: e("i1"),
                value: Literal::new("true", Datatype::Boolean).unwrap(),
            }],
            ViolationCode::RangeDatatypeMismatch,
        ),
    ];
    for (extra, code) in cases {
        let seeded = with(&o, extra);
        let derived = materialize_typing(&seeded, TypingMode::Infer);
        let codes: Vec<ViolationCode> = check_consistency(&seeded, &derived, TypingMode::Infer)
            .iter()
            .map(|v| v.code)
            .collect();
        assert_eq!(codes, [code]);
    }
}

#[test]
fn clean_fixture_is_consistent_in_both_modes() {
    let fx = education_fixture();
    let o = parse_ontology(&fx.ontology_document()).unwrap();
    let rules = parse_rules(&fx.rules_document(), &o).unwrap();
    for mode in [TypingMode::Infer, TypingMode::Strict] {
        let sat = saturate(&o, &rules, mode).unwrap();
        assert!(check_consistency(&sat.ontology, &[], mode).is_empty(), "{mode}");
    }
    let broken = parse_ontology(&fx.broken_document()).unwrap();
    let sat = saturate(&broken, &rules, TypingMode::Infer).unwrap();
    let v = check_consistency(&sat.ontology, &[], TypingMode::Infer);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].code, ViolationCode::DisjointMembership);
}
