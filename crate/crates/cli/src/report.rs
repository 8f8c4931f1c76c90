//! `report.md`, assembled from the same in-memory results the individual
//! artifacts are written from.

use std::collections::BTreeMap;
use std::fmt::Write;

use ontofdd::features::FeatureList;
use ontofdd::model::EntityKind;
use ontofdd::planner::Plan;

use crate::Pipeline;

pub const STUB_DIR: &str = "stubs";

pub fn render(p: &Pipeline, list: &FeatureList, plan: &Plan, stubs: &BTreeMap<String, String>) -> String {
    let o = &p.ontology;
    let prefixes = o.prefixes();
    let mut s = String::new();
    let _ = writeln!(s, "# {} report\n", list.major.title);

    s.push_str("## Overall Model\n\n");
    let _ = writeln!(
        s,
        "Ontology: <{}>. Typing mode: {}. Rules: {}.\n",
        o.iri().as_str(),
        p.config.typing_mode,
        p.rules.len()
    );
    s.push_str("| Entity | Count |\n|---|---|\n");
    for (label, kind) in [
        ("Classes", EntityKind::Class),
        ("Object properties", EntityKind::ObjectProperty),
        ("Data properties", EntityKind::DataProperty),
        ("Annotation properties", EntityKind::AnnotationProperty),
        ("Individuals", EntityKind::NamedIndividual),
    ] {
        let _ = writeln!(s, "| {label} | {} |", o.entities_of(kind).count());
    }
    let _ = writeln!(s, "| Asserted axioms | {} |", o.axiom_count());
    let _ = writeln!(s, "| Axioms derived by typing | {} |", p.saturation.typing.len());
    let _ = writeln!(s, "| Axioms derived by rules | {} |", p.saturation.derived.len());
    let _ = writeln!(s, "\nViolations: {}", p.violations.len());
    if !p.violations.is_empty() {
        s.push('\n');
        for v in &p.violations {
            let _ = writeln!(s, "- `{}`", v.render(p.saturation.ontology.prefixes()));
        }
    }

    s.push_str("\n## Feature List & Plan\n\n");
    let _ = writeln!(
        s,
        "Features: {}. Overall completion: {} ({}-day iterations).",
        plan.schedule.len(),
        plan.overall_completion,
        p.config.iteration_length_days
    );
    let by_id: BTreeMap<&str, _> = plan.schedule.iter().map(|e| (e.feature_id.as_str(), e)).collect();
    for set in &plan.feature_set_entries {
        let _ = writeln!(
            s,
            "\n### {}\n\nOwner: {}. Completion: {}.\n\n| Feature | Owner | Completion |\n|---|---|---|",
            set.title, set.owner, set.completion_date
        );
        for id in &set.feature_ids {
            let e = by_id[id.as_str()];
            let _ = writeln!(s, "| {} | {} | {} |", e.sentence, e.owner, e.completion_date);
        }
    }
    if !list.warnings.is_empty() {
        s.push_str("\nSkipped properties:\n\n");
        for w in &list.warnings {
            let _ = writeln!(s, "- {w}");
        }
    }
    s.push_str("\nClass owners:\n\n| Class | Owner |\n|---|---|\n");
    for a in &plan.class_owners {
        let _ = writeln!(
            s,
            "| {} | {} |",
            prefixes.render_iri(&a.class_iri),
            a.owner.as_deref().unwrap_or("-")
        );
    }

    s.push_str("\n## Component Stubs\n\n");
    let _ = writeln!(s, "Target: {}. {} file(s):\n", p.config.target, stubs.len());
    for name in stubs.keys() {
        let _ = writeln!(s, "- `{STUB_DIR}/{name}`");
    }
    s
}
