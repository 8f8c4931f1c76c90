//! Random ontologies with DL-safe rules, and a brute-force rule evaluator
//! that shares no code with [`crate::engine`]. Used by property tests.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::{Atom, BuiltinOp, Rule, Term};
use crate::model::{vocab, Axiom, Datatype, EntityKind, Iri, Literal, Ontology};

pub const NS: &str = "http://example.org/random#";

pub fn iri(local: &str) -> Iri {
    Iri::new(format!("{NS}{local}")).expect("valid IRI")
}

#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub ontology: Ontology,
    pub rules: Vec<Rule>,
}

pub const OBJECT_PROPERTIES: [&str; 3] = ["p0", "p1", "p2"];
pub const DATA_PROPERTY: &str = "score";

/// At most 30 individuals, 6 classes, 4 properties (three object, one
/// integer-valued data property) and 5 rules.
pub fn random_instance<R: Rng>(rng: &mut R) -> RandomInstance {
    let mut o = Ontology::new(Iri::new("http://example.org/random").expect("valid IRI"));
    o.prefixes_mut().insert("", NS);
    let classes: Vec<String> = (0..rng.gen_range(1..=6)).map(|i| format!("C{i}")).collect();
    let individuals: Vec<String> = (0..rng.gen_range(1..=30)).map(|i| format!("i{i}")).collect();
    for c in &classes {
        o.declare(iri(c), EntityKind::Class).expect("fresh");
    }
    for p in OBJECT_PROPERTIES {
        o.declare(iri(p), EntityKind::ObjectProperty).expect("fresh");
    }
    o.declare(iri(DATA_PROPERTY), EntityKind::DataProperty).expect("fresh");
    o.add_axiom(Axiom::DataPropertyRange {
        property: iri(DATA_PROPERTY),
        datatype: Datatype::Integer,
    })
    .expect("declared");
    for i in &individuals {
        o.declare(iri(i), EntityKind::NamedIndividual).expect("fresh");
    }

    let pick = |rng: &mut R, xs: &[String]| iri(xs.choose(rng).expect("non-empty"));
    for _ in 0..rng.gen_range(0..=individuals.len()) {
        let ax = Axiom::ClassAssertion {
            class: pick(rng, &classes),
            individual: pick(rng, &individuals),
        };
        o.add_axiom(ax).expect("declared");
    }
    for _ in 0..rng.gen_range(0..=individuals.len() * 2) {
        let ax = Axiom::ObjectPropertyAssertion {
            property: iri(OBJECT_PROPERTIES.choose(rng).expect("non-empty")),
            subject: pick(rng, &individuals),
            object: pick(rng, &individuals),
        };
        o.add_axiom(ax).expect("declared");
    }
    for _ in 0..rng.gen_range(0..=individuals.len()) {
        let ax = Axiom::DataPropertyAssertion {
            property: iri(DATA_PROPERTY),
            subject: pick(rng, &individuals),
            value: Literal::integer(rng.gen_range(0..10)),
        };
        o.add_axiom(ax).expect("declared");
    }

    let mut rules = Vec::new();
    while rules.len() < rng.gen_range(0..=5) {
        if let Some(rule) = random_rule(rng, &classes, &individuals, rules.len() + 1) {
            rules.push(rule);
        }
    }
    RandomInstance { ontology: o, rules }
}

const IND_VARS: [&str; 3] = ["x", "y", "z"];

fn random_rule<R: Rng>(rng: &mut R, classes: &[String], individuals: &[String], n: usize) -> Option<Rule> {
    let ind_term = |rng: &mut R| {
        if rng.gen_bool(0.1) {
            Term::Individual(iri(individuals.choose(rng).expect("non-empty")))
        } else {
            Term::var(IND_VARS.choose(rng).expect("non-empty"))
        }
    };
    let mut body = Vec::new();
    let mut literal_vars = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let atom = match rng.gen_range(0..3) {
            0 => Atom::Class {
                class: iri(classes.choose(rng).expect("non-empty")),
                arg: ind_term(rng),
            },
            1 => Atom::ObjectProperty {
                property: iri(OBJECT_PROPERTIES.choose(rng).expect("non-empty")),
                subject: ind_term(rng),
                object: ind_term(rng),
            },
            _ => {
                let v = format!("s{}", literal_vars.len());
                literal_vars.push(v.clone());
                Atom::DataProperty {
                    property: iri(DATA_PROPERTY),
                    subject: ind_term(rng),
                    value: Term::var(&v),
                }
            }
        };
        body.push(atom);
    }
    if let Some(v) = literal_vars.choose(rng) {
        if rng.gen_bool(0.5) {
            let op = *[BuiltinOp::GreaterThan, BuiltinOp::LessThanOrEqual, BuiltinOp::NotEqual]
                .choose(rng)
                .expect("non-empty");
            body.push(Atom::Builtin {
                op,
                left: Term::var(v),
                right: Term::Literal(Literal::integer(rng.gen_range(0..10))),
            });
        }
    }

    let bound: Vec<String> = body
        .iter()
        .filter(|a| !a.is_builtin())
        .flat_map(|a| a.terms())
        .filter_map(|t| t.as_variable().map(str::to_string))
        .filter(|v| IND_VARS.contains(&v.as_str()))
        .collect();
    if bound.is_empty() {
        return None;
    }
    let head_var = |rng: &mut R| Term::var(bound.choose(rng).expect("non-empty"));
    let mut head = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let atom = match rng.gen_range(0..4) {
            0 | 1 => Atom::Class {
                class: iri(classes.choose(rng).expect("non-empty")),
                arg: head_var(rng),
            },
            2 => Atom::ObjectProperty {
                property: iri(OBJECT_PROPERTIES.choose(rng).expect("non-empty")),
                subject: head_var(rng),
                object: head_var(rng),
            },
            _ => Atom::DataProperty {
                property: iri(DATA_PROPERTY),
                subject: head_var(rng),
                value: match literal_vars.choose(rng) {
                    Some(v) if rng.gen_bool(0.5) => Term::var(v),
                    _ => Term::Literal(Literal::integer(rng.gen_range(0..10))),
                },
            },
        };
        head.push(atom);
    }
    Rule::new(format!("rule-{n}"), body, head).ok()
}

/// A ground fact: predicate IRI and argument values rendered to a common
/// shape (individual IRIs or canonical literals).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Val {
    Ind(Iri),
    Lit(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Fact {
    kind: u8,
    predicate: Iri,
    args: Vec<Val>,
}

fn fact_of(axiom: &Axiom) -> Option<Fact> {
    Some(match axiom {
        Axiom::ClassAssertion { class, individual } => Fact {
            kind: 0,
            predicate: class.clone(),
            args: vec![Val::Ind(individual.clone())],
        },
        Axiom::ObjectPropertyAssertion {
            property,
            subject,
            object,
        } => Fact {
            kind: 1,
            predicate: property.clone(),
            args: vec![Val::Ind(subject.clone()), Val::Ind(object.clone())],
        },
        Axiom::DataPropertyAssertion {
            property,
            subject,
            value,
        } => Fact {
            kind: 2,
            predicate: property.clone(),
            args: vec![Val::Ind(subject.clone()), Val::Lit(value.clone())],
        },
        _ => return None,
    })
}

fn axiom_of(fact: Fact) -> Axiom {
    let mut args = fact.args.into_iter();
    let ind = |v: Option<Val>| match v {
        Some(Val::Ind(i)) => i,
        other => panic!("expected individual, got {other:?}"),
    };
    match fact.kind {
        0 => Axiom::ClassAssertion {
            class: fact.predicate,
            individual: ind(args.next()),
        },
        1 => Axiom::ObjectPropertyAssertion {
            property: fact.predicate,
            subject: ind(args.next()),
            object: ind(args.next()),
        },
        _ => Axiom::DataPropertyAssertion {
            property: fact.predicate,
            subject: ind(args.next()),
            value: match args.next() {
                Some(Val::Lit(l)) => l,
                other => panic!("expected literal, got {other:?}"),
            },
        },
    }
}

fn pattern(atom: &Atom) -> Option<(u8, &Iri, Vec<&Term>)> {
    match atom {
        Atom::Class { class, arg } => Some((0, class, vec![arg])),
        Atom::ObjectProperty {
            property,
            subject,
            object,
        } => Some((1, property, vec![subject, object])),
        Atom::DataProperty {
            property,
            subject,
            value,
        } => Some((2, property, vec![subject, value])),
        Atom::Builtin { .. } => None,
    }
}

type Env = Vec<(String, Val)>;

fn lookup<'a>(env: &'a Env, var: &str) -> Option<&'a Val> {
    env.iter().find(|(v, _)| v == var).map(|(_, x)| x)
}

fn term_val(term: &Term, env: &Env) -> Option<Val> {
    match term {
        Term::Variable(v) => lookup(env, v).cloned(),
        Term::Individual(i) => Some(Val::Ind(i.clone())),
        Term::Literal(l) => Some(Val::Lit(l.clone())),
    }
}

fn unify(terms: &[&Term], values: &[Val], env: &Env) -> Option<Env> {
    let mut env = env.clone();
    for (t, v) in terms.iter().zip(values) {
        match t {
            Term::Variable(name) => match lookup(&env, name) {
                Some(bound) if bound != v => return None,
                Some(_) => {}
                None => env.push((name.clone(), v.clone())),
            },
            other => {
                if term_val(other, &env).as_ref() != Some(v) {
                    return None;
                }
            }
        }
    }
    Some(env)
}

fn builtin_holds(op: BuiltinOp, l: &Val, r: &Val) -> bool {
    let (Val::Lit(a), Val::Lit(b)) = (l, r) else {
        return match op {
            BuiltinOp::Equal => l == r,
            BuiltinOp::NotEqual => l != r,
            _ => false,
        };
    };
    let Some(ord) = a.compare(b) else {
        return op == BuiltinOp::NotEqual;
    };
    match op {
        BuiltinOp::Equal => ord.is_eq(),
        BuiltinOp::NotEqual => !ord.is_eq(),
        BuiltinOp::LessThan => ord.is_lt(),
        BuiltinOp::LessThanOrEqual => ord.is_le(),
        BuiltinOp::GreaterThan => ord.is_gt(),
        BuiltinOp::GreaterThanOrEqual => ord.is_ge(),
    }
}

fn matches(body: &[Atom], facts: &BTreeSet<Fact>, env: Env, out: &mut Vec<Env>) {
    let relational: Vec<&Atom> = body.iter().filter(|a| !a.is_builtin()).collect();
    fn go(atoms: &[&Atom], facts: &BTreeSet<Fact>, env: Env, out: &mut Vec<Env>) {
        let Some((first, rest)) = atoms.split_first() else {
            out.push(env);
            return;
        };
        let (kind, predicate, terms) = pattern(first).expect("relational");
        for f in facts.iter().filter(|f| f.kind == kind && &f.predicate == predicate) {
            if let Some(next) = unify(&terms, &f.args, &env) {
                go(rest, facts, next, out);
            }
        }
    }
    let mut candidates = Vec::new();
    go(&relational, facts, env, &mut candidates);
    // built-ins filter complete bindings only
    for env in candidates {
        let ok = body.iter().all(|a| match a {
            Atom::Builtin { op, left, right } => match (term_val(left, &env), term_val(right, &env)) {
                (Some(l), Some(r)) => builtin_holds(*op, &l, &r),
                _ => false,
            },
            _ => true,
        });
        if ok {
            out.push(env);
        }
    }
}

/// Every assertion derivable by `rules` and not already in `ontology`,
/// computed by naive iteration over a flat fact set.
pub fn oracle_fixpoint(ontology: &Ontology, rules: &[Rule]) -> BTreeSet<Axiom> {
    let initial: BTreeSet<Fact> = ontology.axioms().filter_map(fact_of).collect();
    let mut facts = initial.clone();
    loop {
        let mut fresh = Vec::new();
        for rule in rules {
            let mut envs = Vec::new();
            matches(&rule.body, &facts, Vec::new(), &mut envs);
            for env in envs {
                for atom in &rule.head {
                    let (kind, predicate, terms) = pattern(atom).expect("relational head");
                    let args: Vec<Val> = terms.iter().map(|t| term_val(t, &env).expect("DL-safe head")).collect();
                    let fact = Fact {
                        kind,
                        predicate: predicate.clone(),
                        args,
                    };
                    if !facts.contains(&fact) {
                        fresh.push(fact);
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        facts.extend(fresh);
    }
    facts.difference(&initial).cloned().map(axiom_of).collect()
}

/// A random instance dressed up as a domain model: acyclic hierarchy,
/// random domains and ranges (zero to two each), and random labels, actions,
/// prepositions, weights and owners.
/// Usually one domain or range, sometimes none or two.
fn axis_count<R: Rng>(rng: &mut R) -> usize {
    match rng.gen_range(0..10) {
        0 => 0,
        9 => 2,
        _ => 1,
    }
}

pub fn random_model<R: Rng>(rng: &mut R) -> Ontology {
    let mut o = random_instance(rng).ontology;
    let classes: Vec<Iri> = o.classes().cloned().collect();
    for (i, c) in classes.iter().enumerate().skip(1) {
        for _ in 0..rng.gen_range(0..=2) {
            let sup = classes[rng.gen_range(0..i)].clone();
            o.add_axiom(Axiom::SubClassOf { sub: c.clone(), sup })
                .expect("acyclic by construction");
        }
    }
    let annotate = |o: &mut Ontology, property: &str, subject: &Iri, value: Literal| {
        let property = Iri::new(property).expect("valid IRI");
        o.add_axiom(Axiom::AnnotationAssertion {
            property,
            subject: subject.clone(),
            value,
        })
        .expect("declared");
    };
    for c in &classes {
        if rng.gen_bool(0.3) {
            annotate(
                &mut o,
                vocab::RDFS_LABEL,
                c,
                Literal::string(format!("Label{}", rng.gen_range(0..4))),
            );
        }
        if rng.gen_bool(0.4) {
            annotate(
                &mut o,
                vocab::FDD_HAS_OWNER,
                c,
                Literal::string(OWNERS.choose(rng).expect("non-empty").to_string()),
            );
        }
    }
    for p in OBJECT_PROPERTIES {
        let p = iri(p);
        for _ in 0..axis_count(rng) {
            let class = classes.choose(rng).expect("non-empty").clone();
            o.add_axiom(Axiom::ObjectPropertyDomain {
                property: p.clone(),
                class,
            })
            .expect("declared");
        }
        for _ in 0..axis_count(rng) {
            let class = classes.choose(rng).expect("non-empty").clone();
            o.add_axiom(Axiom::ObjectPropertyRange {
                property: p.clone(),
                class,
            })
            .expect("declared");
        }
        if rng.gen_bool(0.3) {
            o.add_axiom(Axiom::FunctionalObjectProperty(p.clone()))
                .expect("declared");
        }
        if rng.gen_bool(0.7) {
            annotate(
                &mut o,
                vocab::FDD_ACTION,
                &p,
                Literal::string(*ACTIONS.choose(rng).expect("non-empty")),
            );
        }
        if rng.gen_bool(0.5) {
            annotate(
                &mut o,
                vocab::FDD_PREPOSITION,
                &p,
                Literal::string(*["by", "for", "of", "to"].choose(rng).expect("non-empty")),
            );
        }
        if rng.gen_bool(0.5) {
            annotate(&mut o, vocab::FDD_WEIGHT, &p, Literal::integer(rng.gen_range(1..=5)));
        }
    }
    let score = iri(DATA_PROPERTY);
    if rng.gen_bool(0.7) {
        let class = classes.choose(rng).expect("non-empty").clone();
        o.add_axiom(Axiom::DataPropertyDomain {
            property: score.clone(),
            class,
        })
        .expect("declared");
    }
    if rng.gen_bool(0.5) {
        o.add_axiom(Axiom::FunctionalDataProperty(score)).expect("declared");
    }
    o
}

const OWNERS: [&str; 3] = ["Asha", "Priya", "Raj"];
const ACTIONS: [&str; 4] = ["Offering", "Assign", "Schedule", "Record"];

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn instances_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let inst = random_instance(&mut rng);
            assert!(inst.ontology.classes().count() <= 6);
            assert!(inst.ontology.individuals().count() <= 30);
            assert_eq!(
                inst.ontology.object_properties().count() + inst.ontology.data_properties().count(),
                4
            );
            assert!(inst.rules.len() <= 5);
        }
    }

    #[test]
    fn oracle_on_hand_example() {
        let mut o = Ontology::new(iri("o"));
        for c in ["Person", "Employee"] {
            o.declare(iri(c), EntityKind::Class).unwrap();
        }
        o.declare(iri("salary"), EntityKind::DataProperty).unwrap();
        o.declare(iri("p1"), EntityKind::NamedIndividual).unwrap();
        o.add_axiom(Axiom::ClassAssertion {
            class: iri("Person"),
            individual: iri("p1"),
        })
        .unwrap();
        o.add_axiom(Axiom::DataPropertyAssertion {
            property: iri("salary"),
            subject: iri("p1"),
            value: Literal::integer(5000),
        })
        .unwrap();
        let rule = Rule::new(
            "rule-1",
            vec![
                Atom::Class {
                    class: iri("Person"),
                    arg: Term::var("p"),
                },
                Atom::DataProperty {
                    property: iri("salary"),
                    subject: Term::var("p"),
                    value: Term::var("s"),
                },
            ],
            vec![Atom::Class {
                class: iri("Employee"),
                arg: Term::var("p"),
            }],
        )
        .unwrap();
        let derived = oracle_fixpoint(&o, &[rule]);
        assert_eq!(
            derived.into_iter().collect::<Vec<_>>(),
            [Axiom::ClassAssertion {
                class: iri("Employee"),
                individual: iri("p1")
            }]
        );
    }
}
