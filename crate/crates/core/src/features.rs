//! Feature list generation.
//!
//! Each object property with one domain and one range becomes a feature,
//! features are grouped under the top-level ancestor of their domain class,
//! and the whole list hangs off one major feature set named after the
//! ontology.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{local_name, vocab, Iri, Ontology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preposition {
    By,
    For,
    Of,
    To,
}

impl Preposition {
    pub fn as_str(self) -> &'static str {
        match self {
            Preposition::By => "by",
            Preposition::For => "for",
            Preposition::Of => "of",
            Preposition::To => "to",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "by" => Some(Preposition::By),
            "for" => Some(Preposition::For),
            "of" => Some(Preposition::Of),
            "to" => Some(Preposition::To),
            _ => None,
        }
    }
}

impl fmt::Display for Preposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    pub id: String,
    pub action: String,
    pub preposition: Preposition,
    pub domain_class: Iri,
    pub range_class: Iri,
    pub domain_label: String,
    pub range_label: String,
    pub sentence: String,
    pub weight: u32,
    pub source_property: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSet {
    pub class_iri: Iri,
    pub title: String,
    pub features: Vec<Feature>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorFeatureSet {
    pub title: String,
    pub feature_sets: Vec<FeatureSet>,
}

impl MajorFeatureSet {
    pub fn features(&self) -> impl Iterator<Item = &Feature> {
        self.feature_sets.iter().flat_map(|s| &s.features)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureList {
    pub major: MajorFeatureSet,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("object property {0} has no domain; skipped")]
    MissingDomain(String),
    #[error("object property {0} has no range; skipped")]
    MissingRange(String),
    #[error("object property {property} has {count} {what}s; cannot pick one")]
    Ambiguous {
        property: String,
        what: &'static str,
        count: usize,
    },
}

/// A feature plus lint warnings about missing or unusable annotations.
pub fn feature_from_property(ontology: &Ontology, property: &Iri) -> Result<(Feature, Vec<String>), FeatureError> {
    let name = ontology.prefixes().render_iri(property);
    let single = |classes: Vec<&Iri>, what: &'static str| match classes.len() {
        0 => Err(if what == "domain" {
            FeatureError::MissingDomain(name.clone())
        } else {
            FeatureError::MissingRange(name.clone())
        }),
        1 => Ok(classes[0].clone()),
        count => Err(FeatureError::Ambiguous {
            property: name.clone(),
            what,
            count,
        }),
    };
    let domain_class = single(ontology.domains_of(property), "domain")?;
    let range_class = single(ontology.object_ranges_of(property), "range")?;

    let mut warnings = Vec::new();
    let action = match ontology.annotation_values(property, vocab::FDD_ACTION).first() {
        Some(v) if !v.lexical().trim().is_empty() => v.lexical().trim().to_string(),
        _ => {
            let action = fallback_action(local_name(property));
            warnings.push(format!("{name} has no fdd:action annotation; using \"{action}\""));
            action
        }
    };
    let preposition = match ontology.annotation_values(property, vocab::FDD_PREPOSITION).first() {
        None => Preposition::By,
        Some(v) => Preposition::parse(v.lexical()).unwrap_or_else(|| {
            warnings.push(format!(
                "{name} has fdd:preposition \"{}\", expected by, for, of or to; using \"by\"",
                v.lexical()
            ));
            Preposition::By
        }),
    };
    let weight = match ontology.annotation_values(property, vocab::FDD_WEIGHT).first() {
        None => 1,
        Some(v) => match v.lexical().parse::<u32>() {
            Ok(w) if w >= 1 => w,
            _ => {
                warnings.push(format!(
                    "{name} has fdd:weight \"{}\", expected a positive integer; using 1",
                    v.lexical()
                ));
                1
            }
        },
    };

    let domain_label = ontology.label_of(&domain_class);
    let range_label = ontology.label_of(&range_class);
    let sentence = format!("{action} of {range_label} {preposition} {domain_label}");
    Ok((
        Feature {
            id: local_name(property).to_string(),
            action,
            preposition,
            domain_class,
            range_class,
            domain_label,
            range_label,
            sentence,
            weight,
            source_property: property.clone(),
        },
        warnings,
    ))
}

/// `hasStudyProg` -> `Study Prog`; a leading `has`/`is` word is dropped
/// unless it is the only word.
pub fn fallback_action(local: &str) -> String {
    let mut words: Vec<String> = Vec::new();
    let mut current = String::new();
    let chars: Vec<char> = local.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' || c == '-' || c == '.' {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
            continue;
        }
        let boundary = c.is_uppercase()
            && !current.is_empty()
            && (chars[i - 1].is_lowercase()
                || chars[i - 1].is_ascii_digit()
                || chars.get(i + 1).is_some_and(|n| n.is_lowercase()));
        if boundary {
            words.push(std::mem::take(&mut current));
        }
        current.push(c);
    }
    if !current.is_empty() {
        words.push(current);
    }
    if words.len() > 1 && matches!(words[0].as_str(), "has" | "is") {
        words.remove(0);
    }
    let joined = words.join(" ");
    let mut chars = joined.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => joined,
    }
}

/// Top-level ancestor reached by always following the least direct superclass.
pub fn anchor_class(ontology: &Ontology, class: &Iri) -> Iri {
    let mut current = class.clone();
    while let Some(sup) = ontology.direct_superclasses(&current).into_iter().next() {
        current = sup.clone();
    }
    current
}

pub fn feature_set_title(ontology: &Ontology, class: &Iri) -> String {
    let label = ontology.label_of(class);
    format!("{label} module including all subclass of {label}")
}

pub fn generate_feature_list(ontology: &Ontology) -> FeatureList {
    let mut warnings = Vec::new();
    let mut features = Vec::new();
    for property in ontology.object_properties() {
        match feature_from_property(ontology, property) {
            Ok((feature, lints)) => {
                features.push(feature);
                warnings.extend(lints);
            }
            Err(e) => warnings.push(e.to_string()),
        }
    }
    if ontology.object_properties().next().is_none() {
        warnings.push("no object properties to transform into features".to_string());
    }

    // local names collide across namespaces; fall back to the full IRI
    let mut by_id: BTreeMap<String, usize> = BTreeMap::new();
    for f in &features {
        *by_id.entry(f.id.clone()).or_default() += 1;
    }
    for f in &mut features {
        if by_id[&f.id] > 1 {
            f.id = f.source_property.as_str().to_string();
        }
    }

    let mut groups: BTreeMap<Iri, Vec<Feature>> = BTreeMap::new();
    for f in features {
        groups
            .entry(anchor_class(ontology, &f.domain_class))
            .or_default()
            .push(f);
    }
    let mut feature_sets: Vec<FeatureSet> = groups
        .into_iter()
        .map(|(class_iri, mut features)| {
            features.sort_by(|a, b| (&a.sentence, &a.id).cmp(&(&b.sentence, &b.id)));
            FeatureSet {
                title: feature_set_title(ontology, &class_iri),
                class_iri,
                features,
            }
        })
        .collect();
    feature_sets.sort_by(|a, b| (&a.title, &a.class_iri).cmp(&(&b.title, &b.class_iri)));

    FeatureList {
        major: MajorFeatureSet {
            title: format!("{} management", local_name(ontology.iri())),
            feature_sets,
        },
        warnings,
    }
}

/// `Offering the StudyProgram by a Department`.
pub fn long_form_sentence(f: &Feature) -> String {
    let article = match f.domain_label.chars().next() {
        Some(c) if "aeiouAEIOU".contains(c) => "an",
        _ => "a",
    };
    format!(
        "{} the {} {} {article} {}",
        f.action, f.range_label, f.preposition, f.domain_label
    )
}

#[derive(Serialize)]
struct FeatureRecord<'a> {
    id: &'a str,
    sentence: &'a str,
    action: &'a str,
    domain: &'a str,
    range: &'a str,
    preposition: Preposition,
    weight: u32,
}

#[derive(Serialize)]
struct FeatureSetRecord<'a> {
    class: &'a str,
    title: &'a str,
    features: Vec<FeatureRecord<'a>>,
}

#[derive(Serialize)]
struct MajorRecord<'a> {
    title: &'a str,
    feature_sets: Vec<FeatureSetRecord<'a>>,
}

#[derive(Serialize)]
struct ListRecord<'a> {
    major: MajorRecord<'a>,
    warnings: &'a [String],
}

impl FeatureList {
    pub fn to_json(&self) -> String {
        let record = ListRecord {
            major: MajorRecord {
                title: &self.major.title,
                feature_sets: self
                    .major
                    .feature_sets
                    .iter()
                    .map(|s| FeatureSetRecord {
                        class: s.class_iri.as_str(),
                        title: &s.title,
                        features: s
                            .features
                            .iter()
                            .map(|f| FeatureRecord {
                                id: &f.id,
                                sentence: &f.sentence,
                                action: &f.action,
                                domain: f.domain_class.as_str(),
                                range: f.range_class.as_str(),
                                preposition: f.preposition,
                                weight: f.weight,
                            })
                            .collect(),
                    })
                    .collect(),
            },
            warnings: &self.warnings,
        };
        let mut out = serde_json::to_string_pretty(&record).expect("plain data serializes");
        out.push('\n');
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("# {}\n", self.major.title);
        for set in &self.major.feature_sets {
            out.push_str(&format!("\n## {}\n\n", set.title));
            for f in &set.features {
                out.push_str(&format!("- {}\n", f.sentence));
            }
        }
        out
    }

    pub fn warnings_text(&self) -> String {
        self.warnings.iter().map(|w| format!("{w}\n")).collect()
    }
}
