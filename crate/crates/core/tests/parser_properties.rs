use ontofdd::fixtures::education_fixture;
use ontofdd::model::{vocab, Axiom, Datatype, Iri, Literal, Ontology};
use ontofdd::parser::{
    parse_ontology, parse_query, parse_rules, serialize_ontology, DocumentKind, LoadError, SourceDocument,
};
use ontofdd::testing::{iri, random_instance, OBJECT_PROPERTIES};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn parse(text: &str) -> Result<Ontology, LoadError> {
    parse_ontology(&SourceDocument::new("p.ofnx", text, DocumentKind::Ontology))
}

/// A random instance plus hierarchy, typing, labels and characteristics.
fn rich_ontology(seed: u64, label: &str) -> Ontology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut o = random_instance(&mut rng).ontology;
    let classes: Vec<Iri> = o.classes().cloned().collect();
    for (i, c) in classes.iter().enumerate().skip(1) {
        if rng.gen_bool(0.6) {
            let sup = classes[rng.gen_range(0..i)].clone();
            o.add_axiom(Axiom::SubClassOf { sub: c.clone(), sup }).unwrap();
        }
    }
    if classes.len() >= 2 && rng.gen_bool(0.5) {
        let mut pick = classes.clone();
        pick.shuffle(&mut rng);
        pick.truncate(rng.gen_range(2..=classes.len()));
        o.add_axiom(Axiom::DisjointClasses(pick)).unwrap();
    }
    for p in OBJECT_PROPERTIES {
        let p = iri(p);
        if rng.gen_bool(0.7) {
            let class = classes.choose(&mut rng).unwrap().clone();
            o.add_axiom(Axiom::ObjectPropertyDomain {
                property: p.clone(),
                class,
            })
            .unwrap();
        }
        if rng.gen_bool(0.7) {
            let class = classes.choose(&mut rng).unwrap().clone();
            o.add_axiom(Axiom::ObjectPropertyRange {
                property: p.clone(),
                class,
            })
            .unwrap();
        }
        if rng.gen_bool(0.3) {
            o.add_axiom(Axiom::FunctionalObjectProperty(p.clone())).unwrap();
        }
    }
    o.add_axiom(Axiom::FunctionalDataProperty(iri("score"))).unwrap();
    let target = classes.choose(&mut rng).unwrap().clone();
    o.add_axiom(Axiom::AnnotationAssertion {
        property: Iri::new(vocab::RDFS_LABEL).unwrap(),
        subject: target,
        value: Literal::string(label),
    })
    .unwrap();
    let when = Literal::new("2024-02-29", Datatype::Date).unwrap();
    o.add_axiom(Axiom::AnnotationAssertion {
        property: Iri::new(vocab::RDFS_COMMENT).unwrap(),
        subject: iri("score"),
        value: when,
    })
    .unwrap();
    o
}

fn rebuilt_in_order(o: &Ontology, seed: u64) -> Ontology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entities: Vec<_> = o.entities().collect();
    entities.shuffle(&mut rng);
    let mut axioms: Vec<Axiom> = o.axioms().cloned().collect();
    axioms.shuffle(&mut rng);
    let mut out = Ontology::new(o.iri().clone());
    *out.prefixes_mut() = o.prefixes().clone();
    for e in entities {
        out.declare(e.iri, e.kind).unwrap();
    }
    for a in axioms {
        out.add_axiom(a).unwrap();
    }
    out
}

#[test]
fn escapes_before_multibyte_characters_are_reported_not_panicked() {
    for text in ["\"\\⭶", "\"\\é\"", "<\\⭶", "?\\⭶", "Prefix(:=<⭶"] {
        assert!(parse(text).is_err(), "{text}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn serialize_then_parse_is_identity(seed in any::<u64>(), label in "\\PC{0,12}") {
        let o = rich_ontology(seed, &label);
        let text = serialize_ontology(&o);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &o);
        prop_assert_eq!(serialize_ontology(&back), text);
    }

    #[test]
    fn canonical_text_ignores_input_order(seed in any::<u64>(), order in any::<u64>()) {
        let o = rich_ontology(seed, "x");
        let shuffled = rebuilt_in_order(&o, order);
        prop_assert_eq!(serialize_ontology(&shuffled), serialize_ontology(&o));
    }

    #[test]
    fn arbitrary_input_never_panics(text in "\\PC{0,200}") {
        let _ = parse(&text);
    }

    #[test]
    fn truncated_fixture_reports_a_real_position(cut in 0usize..2000) {
        let text = education_fixture().ontology;
        let cut = cut.min(text.len());
        if !text.is_char_boundary(cut) {
            return Ok(());
        }
        let prefix = &text[..cut];
        if let Err(LoadError::Syntax(e)) = parse(prefix) {
            let lines = prefix.split('\n').count();
            prop_assert!(e.line >= 1 && e.line <= lines, "{} not in 1..={}", e.line, lines);
            prop_assert!(e.column >= 1);
        }
    }

    #[test]
    fn rule_text_never_panics(text in "[A-Za-z?:(), ^>#-]{0,60}") {
        let o = parse(education_fixture().ontology).unwrap();
        let _ = parse_rules(&SourceDocument::new("r", text.clone(), DocumentKind::Rules), &o);
        let _ = parse_query(&SourceDocument::new("q", text, DocumentKind::Query), &o);
    }
}

#[test]
fn fixture_corpus_round_trips() {
    let fx = education_fixture();
    for doc in [fx.ontology_document(), fx.broken_document()] {
        let first = parse_ontology(&doc).unwrap();
        let second = parse(&serialize_ontology(&first)).unwrap();
        assert_eq!(first, second, "{}", doc.path);
        let third = parse(&serialize_ontology(&second)).unwrap();
        assert_eq!(serialize_ontology(&second), serialize_ontology(&third));
    }
}

#[test]
fn fixture_rules_and_query_parse() {
    let fx = education_fixture();
    let o = parse_ontology(&fx.ontology_document()).unwrap();
    let rules = parse_rules(&fx.rules_document(), &o).unwrap();
    assert_eq!(rules.len(), 1);
    assert_eq!(
        rules[0].render(o.prefixes()),
        "Person(?p) ^ salary(?p, ?s) -> Employee(?p)"
    );
    let q = parse_query(&fx.query_document("owner-query.sqwrl").unwrap(), &o).unwrap();
    assert_eq!(q.projection, ["I", "P"]);
}

#[test]
fn error_line_points_at_the_bad_axiom() {
    let text = education_fixture().ontology.replacen(
        "    SubClassOf(:Student :Person)",
        "    SubClassOf(:Student :Nobody)",
        1,
    );
    let expected_line = text.lines().position(|l| l.contains(":Nobody")).unwrap() + 1;
    match parse(&text).unwrap_err() {
        LoadError::Invalid { line, message, .. } => {
            assert_eq!(line, expected_line);
            assert!(message.contains(":Nobody"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}
