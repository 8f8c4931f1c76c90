//! The bundled Education example, embedded so tests do not depend on the
//! working directory.

use crate::parser::{DocumentKind, SourceDocument};

/// A named set of input documents plus any golden outputs (`file name`, `contents`).
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub ontology: &'static str,
    pub rules: &'static str,
    pub queries: Vec<(&'static str, &'static str)>,
    pub expected: Vec<(&'static str, &'static str)>,
    /// The `-broken` variant: same ontology with a seeded inconsistency.
    pub broken: &'static str,
}

impl Fixture {
    pub fn ontology_document(&self) -> SourceDocument {
        SourceDocument::new(format!("{}.ofnx", self.name), self.ontology, DocumentKind::Ontology)
    }

    pub fn broken_document(&self) -> SourceDocument {
        SourceDocument::new(
            format!("{}-broken.ofnx", self.name),
            self.broken,
            DocumentKind::Ontology,
        )
    }

    pub fn rules_document(&self) -> SourceDocument {
        SourceDocument::new("rules.swrl", self.rules, DocumentKind::Rules)
    }

    pub fn query_document(&self, name: &str) -> Option<SourceDocument> {
        self.queries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(n, text)| SourceDocument::new(*n, *text, DocumentKind::Query))
    }

    pub fn expected(&self, file: &str) -> Option<&'static str> {
        self.expected.iter().find(|(n, _)| *n == file).map(|(_, text)| *text)
    }
}

macro_rules! education_file {
    ($name:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/education/", $name))
    };
}

pub fn education_fixture() -> Fixture {
    Fixture {
        name: "education",
        ontology: education_file!("education.ofnx"),
        rules: education_file!("rules.swrl"),
        queries: vec![("owner-query.sqwrl", education_file!("owner-query.sqwrl"))],
        expected: vec![
            ("report/features.md", education_file!("expected/report/features.md")),
            ("report/plan.md", education_file!("expected/report/plan.md")),
            (
                "report/derivations.log",
                education_file!("expected/report/derivations.log"),
            ),
            (
                "report/materialized.ofnx",
                education_file!("expected/report/materialized.ofnx"),
            ),
            (
                "report/stubs/Person.txt",
                education_file!("expected/report/stubs/Person.txt"),
            ),
            ("report/report.md", education_file!("expected/report/report.md")),
            (
                "query/query-result.tsv",
                education_file!("expected/query/query-result.tsv"),
            ),
        ],
        broken: education_file!("education-broken.ofnx"),
    }
}
