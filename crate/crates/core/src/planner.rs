//! Owner resolution and feature scheduling.
//!
//! Features are ordered by weight (descending) then sentence, dealt into one
//! queue per owner, and each owner builds one feature per iteration.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Days, NaiveDate};
use serde::Serialize;
use thiserror::Error;

use crate::engine::{evaluate_body, Atom, EngineError, Term, Value};
use crate::features::{anchor_class, Feature, MajorFeatureSet};
use crate::model::{local_name, vocab, EntityKind, Iri, Ontology};

pub const UNASSIGNED: &str = "UNASSIGNED";
pub const DEFAULT_ITERATION_DAYS: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OwnerSource {
    Annotation,
    Query,
    Unassigned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OwnerAssignment {
    pub class_iri: Iri,
    pub owner: Option<String>,
    pub source: OwnerSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("conflicting owners for class {class}: {}", .owners.join(", "))]
    OwnerConflict { class: String, owners: Vec<String> },
    #[error("iteration length must be at least 1 day")]
    ZeroIteration,
    #[error("date arithmetic overflowed")]
    DateOverflow,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanConfig {
    pub start_date: NaiveDate,
    pub iteration_length_days: u32,
    pub default_owner: Option<String>,
}

impl PlanConfig {
    pub fn new(
        start_date: NaiveDate,
        iteration_length_days: u32,
        default_owner: Option<String>,
    ) -> Result<Self, PlanError> {
        if iteration_length_days == 0 {
            return Err(PlanError::ZeroIteration);
        }
        Ok(PlanConfig {
            start_date,
            iteration_length_days,
            default_owner: default_owner.filter(|o| !o.is_empty()),
        })
    }

    fn completion(&self, iteration_index: usize) -> Result<NaiveDate, PlanError> {
        let days = (iteration_index as u64 + 1) * u64::from(self.iteration_length_days);
        self.start_date
            .checked_add_days(Days::new(days))
            .ok_or(PlanError::DateOverflow)
    }
}

/// Owner values asserted on the punned individual of `class` through any
/// property whose local name is `hasOwner`.
fn punned_owners(ontology: &Ontology, class: &Iri) -> Result<BTreeSet<String>, EngineError> {
    let mut owners = BTreeSet::new();
    if !ontology.has_kind(class, EntityKind::NamedIndividual) {
        return Ok(owners);
    }
    let is_owner = |p: &Iri| local_name(p).eq_ignore_ascii_case("hasOwner");
    let subject = Term::Individual(class.clone());
    let mut atoms = Vec::new();
    for property in ontology.data_properties().filter(|p| is_owner(p)) {
        atoms.push(Atom::DataProperty {
            property: property.clone(),
            subject: subject.clone(),
            value: Term::var("owner"),
        });
    }
    for property in ontology.object_properties().filter(|p| is_owner(p)) {
        atoms.push(Atom::ObjectProperty {
            property: property.clone(),
            subject: subject.clone(),
            object: Term::var("owner"),
        });
    }
    for atom in atoms {
        for binding in evaluate_body(ontology, std::slice::from_ref(&atom))? {
            if let Some(value) = binding.get("owner") {
                owners.insert(match value {
                    Value::Literal(l) => l.lexical().trim().to_string(),
                    Value::Individual(i) => local_name(i).to_string(),
                });
            }
        }
    }
    owners.remove("");
    Ok(owners)
}

/// One assignment per declared class, in IRI order.
pub fn resolve_owners(ontology: &Ontology) -> Result<Vec<OwnerAssignment>, PlanError> {
    let mut out = Vec::new();
    for class in ontology.classes() {
        let annotated: BTreeSet<String> = ontology
            .annotation_values(class, vocab::FDD_HAS_OWNER)
            .into_iter()
            .map(|l| l.lexical().trim().to_string())
            .filter(|o| !o.is_empty())
            .collect();
        let punned = punned_owners(ontology, class)?;
        let all: BTreeSet<&String> = annotated.iter().chain(&punned).collect();
        if all.len() > 1 {
            return Err(PlanError::OwnerConflict {
                class: ontology.prefixes().render_iri(class),
                owners: all.into_iter().cloned().collect(),
            });
        }
        let source = if !annotated.is_empty() {
            OwnerSource::Annotation
        } else if !punned.is_empty() {
            OwnerSource::Query
        } else {
            OwnerSource::Unassigned
        };
        out.push(OwnerAssignment {
            class_iri: class.clone(),
            owner: all.into_iter().next().cloned(),
            source,
        });
    }
    Ok(out)
}

fn owner_of<'a>(class: &Iri, assignments: &'a [OwnerAssignment]) -> Option<&'a str> {
    assignments
        .iter()
        .find(|a| &a.class_iri == class)
        .and_then(|a| a.owner.as_deref())
}

/// Domain owner, else range owner, else the default, else `UNASSIGNED`.
pub fn feature_owner(feature: &Feature, assignments: &[OwnerAssignment], default_owner: Option<&str>) -> String {
    owner_of(&feature.domain_class, assignments)
        .or_else(|| owner_of(&feature.range_class, assignments))
        .or(default_owner)
        .unwrap_or(UNASSIGNED)
        .to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleEntry {
    pub feature_id: String,
    pub sentence: String,
    pub owner: String,
    /// Position in the owner's queue.
    pub sequence_index: usize,
    pub completion_date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeatureSetEntry {
    pub title: String,
    pub class_iri: Iri,
    pub owner: String,
    pub completion_date: NaiveDate,
    pub feature_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MajorCompletion {
    pub title: String,
    pub completion_date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Plan {
    pub overall_completion: NaiveDate,
    pub major_feature_set_completion: MajorCompletion,
    pub feature_set_entries: Vec<FeatureSetEntry>,
    pub schedule: Vec<ScheduleEntry>,
    pub class_owners: Vec<OwnerAssignment>,
}

/// Features in scheduling order: weight descending, then sentence, then id.
pub fn schedule_order<'a>(features: impl IntoIterator<Item = &'a Feature>) -> Vec<&'a Feature> {
    let mut ordered: Vec<&Feature> = features.into_iter().collect();
    ordered.sort_by(|a, b| {
        b.weight
            .cmp(&a.weight)
            .then_with(|| a.sentence.cmp(&b.sentence))
            .then_with(|| a.id.cmp(&b.id))
    });
    ordered
}

pub fn build_plan(
    major: &MajorFeatureSet,
    assignments: &[OwnerAssignment],
    config: &PlanConfig,
) -> Result<Plan, PlanError> {
    let default_owner = config.default_owner.as_deref();
    let mut queue_len: BTreeMap<String, usize> = BTreeMap::new();
    let mut schedule = Vec::new();
    for feature in schedule_order(major.features()) {
        let owner = feature_owner(feature, assignments, default_owner);
        let slot = queue_len.entry(owner.clone()).or_default();
        schedule.push(ScheduleEntry {
            feature_id: feature.id.clone(),
            sentence: feature.sentence.clone(),
            owner,
            sequence_index: *slot,
            completion_date: config.completion(*slot)?,
        });
        *slot += 1;
    }
    let date_of: BTreeMap<&str, NaiveDate> = schedule
        .iter()
        .map(|e| (e.feature_id.as_str(), e.completion_date))
        .collect();

    let position: BTreeMap<&str, usize> = schedule
        .iter()
        .enumerate()
        .map(|(i, e)| (e.feature_id.as_str(), i))
        .collect();
    let mut feature_set_entries: Vec<FeatureSetEntry> = major
        .feature_sets
        .iter()
        .map(|set| FeatureSetEntry {
            title: set.title.clone(),
            class_iri: set.class_iri.clone(),
            owner: owner_of(&set.class_iri, assignments)
                .or(default_owner)
                .unwrap_or(UNASSIGNED)
                .to_string(),
            completion_date: set
                .features
                .iter()
                .map(|f| date_of[f.id.as_str()])
                .max()
                .unwrap_or(config.start_date),
            feature_ids: {
                let mut ids: Vec<String> = set.features.iter().map(|f| f.id.clone()).collect();
                ids.sort_by_key(|id| position[id.as_str()]);
                ids
            },
        })
        .collect();
    feature_set_entries.sort_by(|a, b| (&a.title, &a.class_iri).cmp(&(&b.title, &b.class_iri)));

    let overall_completion = schedule
        .iter()
        .map(|e| e.completion_date)
        .max()
        .unwrap_or(config.start_date);
    Ok(Plan {
        overall_completion,
        major_feature_set_completion: MajorCompletion {
            title: major.title.clone(),
            completion_date: overall_completion,
        },
        feature_set_entries,
        schedule,
        class_owners: {
            let mut owners = assignments.to_vec();
            owners.sort_by(|a, b| a.class_iri.cmp(&b.class_iri));
            owners
        },
    })
}

/// Anchor-class owner of the feature set a feature belongs to.
pub fn feature_set_owner(ontology: &Ontology, feature: &Feature, assignments: &[OwnerAssignment]) -> Option<String> {
    owner_of(&anchor_class(ontology, &feature.domain_class), assignments).map(str::to_string)
}

impl Plan {
    pub fn has_unassigned(&self) -> bool {
        self.schedule.iter().any(|e| e.owner == UNASSIGNED)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("plain data serializes");
        out.push('\n');
        out
    }

    pub fn to_markdown(&self, ontology: &Ontology) -> String {
        let prefixes = ontology.prefixes();
        let mut out = format!(
            "# Development plan: {}\n\nOverall completion: {}\n",
            self.major_feature_set_completion.title, self.overall_completion
        );
        let entries: BTreeMap<&str, &ScheduleEntry> =
            self.schedule.iter().map(|e| (e.feature_id.as_str(), e)).collect();
        for set in &self.feature_set_entries {
            out.push_str(&format!(
                "\n## {}\n\nOwner: {}. Completion: {}.\n\n| Feature | Owner | Completion |\n|---|---|---|\n",
                set.title, set.owner, set.completion_date
            ));
            for id in &set.feature_ids {
                let e = entries[id.as_str()];
                out.push_str(&format!("| {} | {} | {} |\n", e.sentence, e.owner, e.completion_date));
            }
        }
        out.push_str("\n## Class owners\n\n| Class | Owner | Source |\n|---|---|---|\n");
        for a in &self.class_owners {
            let source = match a.source {
                OwnerSource::Annotation => "annotation",
                OwnerSource::Query => "query",
                OwnerSource::Unassigned => "unassigned",
            };
            out.push_str(&format!(
                "| {} | {} | {source} |\n",
                prefixes.render_iri(&a.class_iri),
                a.owner.as_deref().unwrap_or("-")
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{generate_feature_list, FeatureSet, Preposition};
    use crate::fixtures::education_fixture;
    use crate::parser::{parse_ontology, DocumentKind, SourceDocument};

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://e.org/#{s}")).unwrap()
    }

    fn feature(id: &str, domain: &str, range: &str, weight: u32) -> Feature {
        Feature {
            id: id.into(),
            action: "Do".into(),
            preposition: Preposition::By,
            domain_class: iri(domain),
            range_class: iri(range),
            domain_label: domain.into(),
            range_label: range.into(),
            sentence: format!("Do of {range} by {domain} ({id})"),
            weight,
            source_property: iri(id),
        }
    }

    fn assign(class: &str, owner: Option<&str>) -> OwnerAssignment {
        OwnerAssignment {
            class_iri: iri(class),
            owner: owner.map(str::to_string),
            source: if owner.is_some() {
                OwnerSource::Annotation
            } else {
                OwnerSource::Unassigned
            },
        }
    }

    fn major(features: Vec<Feature>) -> MajorFeatureSet {
        MajorFeatureSet {
            title: "t management".into(),
            feature_sets: vec![FeatureSet {
                class_iri: iri("A"),
                title: "A module including all subclass of A".into(),
                features,
            }],
        }
    }

    fn config() -> PlanConfig {
        PlanConfig::new(date("2024-01-01"), DEFAULT_ITERATION_DAYS, None).unwrap()
    }

    fn onto(body: &str) -> Ontology {
        let text = format!(
            "Prefix(:=<http://e.org/#>) Ontology(<http://e.org/o>
             Declaration(Class(:A)) Declaration(Class(:B)) Declaration(DataProperty(:hasOwner)) {body})"
        );
        parse_ontology(&SourceDocument::new("t", text, DocumentKind::Ontology)).unwrap()
    }

    #[test]
    fn one_feature() {
        let owners = [assign("A", Some("Asha"))];
        let plan = build_plan(&major(vec![feature("f", "A", "B", 1)]), &owners, &config()).unwrap();
        assert_eq!(plan.schedule[0].completion_date, date("2024-01-15"));
        assert_eq!(plan.overall_completion, date("2024-01-15"));
        assert_eq!(plan.feature_set_entries[0].owner, "Asha");
    }

    #[test]
    fn same_owner_is_serial() {
        let owners = [assign("A", Some("Asha"))];
        let plan = build_plan(
            &major(vec![feature("f", "A", "B", 1), feature("g", "A", "B", 1)]),
            &owners,
            &config(),
        )
        .unwrap();
        let dates: Vec<_> = plan.schedule.iter().map(|e| e.completion_date).collect();
        assert_eq!(dates, [date("2024-01-15"), date("2024-01-29")]);
        assert_eq!(plan.overall_completion, date("2024-01-29"));
    }

    #[test]
    fn different_owners_run_in_parallel() {
        let owners = [assign("A", Some("Asha")), assign("B", Some("Raj"))];
        let plan = build_plan(
            &major(vec![feature("f", "A", "B", 1), feature("g", "B", "A", 1)]),
            &owners,
            &config(),
        )
        .unwrap();
        assert!(plan.schedule.iter().all(|e| e.completion_date == date("2024-01-15")));
        assert_eq!(plan.overall_completion, date("2024-01-15"));
    }

    #[test]
    fn heavier_features_go_first() {
        let owners = [assign("A", Some("Asha"))];
        let plan = build_plan(
            &major(vec![feature("a", "A", "B", 1), feature("z", "A", "B", 3)]),
            &owners,
            &config(),
        )
        .unwrap();
        assert_eq!(plan.schedule[0].feature_id, "z");
        assert_eq!(plan.schedule[1].sequence_index, 1);
    }

    #[test]
    fn owner_fallbacks() {
        let f = feature("f", "A", "B", 1);
        assert_eq!(
            feature_owner(&f, &[assign("A", None), assign("B", Some("Raj"))], None),
            "Raj"
        );
        assert_eq!(
            feature_owner(&f, &[assign("A", None), assign("B", None)], Some("PM")),
            "PM"
        );
        assert_eq!(
            feature_owner(&f, &[assign("A", None), assign("B", None)], None),
            UNASSIGNED
        );
    }

    #[test]
    fn empty_plan_completes_at_start() {
        let plan = build_plan(
            &MajorFeatureSet {
                title: "x management".into(),
                feature_sets: vec![],
            },
            &[],
            &config(),
        )
        .unwrap();
        assert_eq!(plan.overall_completion, date("2024-01-01"));
        assert!(!plan.has_unassigned());
    }

    #[test]
    fn zero_iteration_rejected() {
        assert_eq!(
            PlanConfig::new(date("2024-01-01"), 0, None),
            Err(PlanError::ZeroIteration)
        );
    }

    #[test]
    fn owners_from_annotation_and_punning() {
        let o = onto(
            "Declaration(NamedIndividual(:B)) AnnotationAssertion(fdd:hasOwner :A \"Priya\")
             DataPropertyAssertion(:hasOwner :B \"Raj\")",
        );
        let owners = resolve_owners(&o).unwrap();
        assert_eq!(owners.len(), 2);
        assert_eq!(
            (owners[0].owner.as_deref(), owners[0].source),
            (Some("Priya"), OwnerSource::Annotation)
        );
        assert_eq!(
            (owners[1].owner.as_deref(), owners[1].source),
            (Some("Raj"), OwnerSource::Query)
        );
    }

    #[test]
    fn unassigned_class() {
        let owners = resolve_owners(&onto("")).unwrap();
        assert!(owners
            .iter()
            .all(|a| a.source == OwnerSource::Unassigned && a.owner.is_none()));
    }

    #[test]
    fn conflicting_owners() {
        let o = onto(
            "Declaration(NamedIndividual(:A)) AnnotationAssertion(fdd:hasOwner :A \"Priya\")
             DataPropertyAssertion(:hasOwner :A \"Raj\")",
        );
        let err = resolve_owners(&o).unwrap_err();
        assert!(
            matches!(&err, PlanError::OwnerConflict { class, .. } if class == ":A"),
            "{err}"
        );
    }

    #[test]
    fn education_plan() {
        let o = parse_ontology(&education_fixture().ontology_document()).unwrap();
        let owners = resolve_owners(&o).unwrap();
        assert_eq!(owners.len(), o.classes().count());
        let instructor = owners
            .iter()
            .find(|a| a.class_iri.local_name() == "Instructor")
            .unwrap();
        assert_eq!(instructor.owner.as_deref(), Some("Priya"));
        let list = generate_feature_list(&o);
        let plan = build_plan(&list.major, &owners, &config()).unwrap();
        let by_id: BTreeMap<_, _> = plan
            .schedule
            .iter()
            .map(|e| (e.feature_id.as_str(), e.owner.as_str()))
            .collect();
        assert_eq!(by_id["hasStudyProg"], "Asha");
        assert_eq!(by_id["hasCourse"], "Priya");
        assert_eq!(plan.overall_completion, date("2024-01-15"));
        let f = list.major.features().find(|f| f.id == "hasCourse").unwrap();
        assert_eq!(feature_set_owner(&o, f, &owners), None);
        let json: serde_json::Value = serde_json::from_str(&plan.to_json()).unwrap();
        assert_eq!(json["overall_completion"], "2024-01-15");
        assert!(plan
            .to_markdown(&o)
            .contains("| Offering of StudyProgram by Department | Asha | 2024-01-15 |"));
    }
}
