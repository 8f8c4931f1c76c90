//! Object-oriented stubs from the ontology.
//!
//! [`build_code_model`] produces a language-neutral [`CodeModel`];
//! [`render_stubs`] turns it into an interface plus default implementation
//! per class, or into its JSON form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{local_name, Datatype, Iri, Ontology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyKind {
    Data,
    Object,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeProperty {
    pub name: String,
    pub kind: PropertyKind,
    pub range: String,
    pub functional: bool,
}

impl CodeProperty {
    pub fn accessor_base(&self) -> String {
        capitalize(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeType {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extends: Option<String>,
    pub source_class: Iri,
    pub properties: Vec<CodeProperty>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeModel {
    pub types: Vec<CodeType>,
}

impl CodeModel {
    pub fn get(&self, name: &str) -> Option<&CodeType> {
        self.types.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("plain data serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Target {
    #[default]
    OoStub,
    Json,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::OoStub => "oo-stub",
            Target::Json => "json",
        })
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oo-stub" => Ok(Target::OoStub),
            "json" => Ok(Target::Json),
            other => Err(format!("unknown codegen target `{other}` (expected oo-stub or json)")),
        }
    }
}

pub const MODEL_FILE: &str = "domain-model.json";

#[derive(Debug, Error)]
#[error("{}: {source}", path.display())]
pub struct WriteError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

pub fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn identifier(raw: &str) -> String {
    let mut out: String = raw
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, '_');
    }
    out
}

/// Unique identifiers for a set of IRIs: the local name, with `_2`, `_3`...
/// appended in IRI order on collision.
fn unique_names<'a>(
    iris: impl Iterator<Item = &'a Iri>,
    what: &str,
    warnings: &mut Vec<String>,
) -> BTreeMap<Iri, String> {
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut out = BTreeMap::new();
    for iri in iris {
        let base = identifier(local_name(iri));
        let mut name = base.clone();
        let mut n = 2;
        while !taken.insert(name.clone()) {
            name = format!("{base}_{n}");
            n += 1;
        }
        if name != base {
            warnings.push(format!("{what} {iri} renamed to {name} to avoid a name clash"));
        }
        out.insert(iri.clone(), name);
    }
    out
}

fn least<'a>(options: Vec<&'a Iri>, what: &str, subject: &str, warnings: &mut Vec<String>) -> Option<&'a Iri> {
    if options.len() > 1 {
        warnings.push(format!("{subject} has {} {what}s; using {}", options.len(), options[0]));
    }
    options.into_iter().next()
}

/// The model plus warnings about collapsed or missing structure.
pub fn build_code_model(ontology: &Ontology) -> (CodeModel, Vec<String>) {
    let mut warnings = Vec::new();
    let prefixes = ontology.prefixes();
    let type_names = unique_names(ontology.classes(), "class", &mut warnings);
    let mut properties: BTreeMap<&Iri, Vec<CodeProperty>> = BTreeMap::new();

    let property_names = unique_names(
        ontology.object_properties().chain(ontology.data_properties()),
        "property",
        &mut warnings,
    );
    let mut attach = |property: &Iri, kind: PropertyKind, range: String, warnings: &mut Vec<String>| {
        let shown = prefixes.render_iri(property);
        match least(ontology.domains_of(property), "domain", &shown, warnings) {
            None => warnings.push(format!("{shown} has no domain; not attached to any type")),
            Some(domain) => properties.entry(domain).or_default().push(CodeProperty {
                name: property_names[property].clone(),
                kind,
                range,
                functional: ontology.is_functional(property),
            }),
        }
    };
    for property in ontology.object_properties() {
        let shown = prefixes.render_iri(property);
        let range = match least(ontology.object_ranges_of(property), "range", &shown, &mut warnings) {
            Some(class) => type_names[class].clone(),
            None => {
                warnings.push(format!("{shown} has no range; typed as Object"));
                "Object".to_string()
            }
        };
        attach(property, PropertyKind::Object, range, &mut warnings);
    }
    for property in ontology.data_properties() {
        let ranges = ontology.data_ranges_of(property);
        if ranges.len() > 1 {
            warnings.push(format!(
                "{} has {} ranges; using {}",
                prefixes.render_iri(property),
                ranges.len(),
                ranges[0]
            ));
        }
        let range = ranges.first().copied().unwrap_or(Datatype::String);
        attach(property, PropertyKind::Data, range.name().to_string(), &mut warnings);
    }

    let mut types: Vec<CodeType> = ontology
        .classes()
        .map(|class| {
            let supers: Vec<&Iri> = ontology.direct_superclasses(class).into_iter().collect();
            let shown = prefixes.render_iri(class);
            let extends = least(supers, "superclass", &shown, &mut warnings).map(|s| type_names[s].clone());
            let mut props = properties.remove(class).unwrap_or_default();
            props.sort_by(|a, b| a.name.cmp(&b.name));
            CodeType {
                name: type_names[class].clone(),
                extends,
                source_class: class.clone(),
                properties: props,
            }
        })
        .collect();
    types.sort_by(|a, b| a.name.cmp(&b.name));
    (CodeModel { types }, warnings)
}

fn range_token(property: &CodeProperty) -> String {
    match property.kind {
        PropertyKind::Object => property.range.clone(),
        PropertyKind::Data => match Datatype::from_name(&property.range) {
            Some(Datatype::String) => "String",
            Some(Datatype::Integer) => "int",
            Some(Datatype::Decimal) => "double",
            Some(Datatype::Boolean) => "boolean",
            Some(Datatype::Date) => "Date",
            None => "Object",
        }
        .to_string(),
    }
}

/// Element type inside `Collection<...>`: primitives are boxed.
fn element_token(property: &CodeProperty) -> String {
    match range_token(property).as_str() {
        "int" => "Integer".into(),
        "double" => "Double".into(),
        "boolean" => "Boolean".into(),
        other => other.into(),
    }
}

fn render_interface(t: &CodeType) -> String {
    let mut out = format!("public interface {}", t.name);
    if let Some(sup) = &t.extends {
        out.push_str(&format!(" extends {sup}"));
    }
    out.push_str(" {\n");
    for p in &t.properties {
        let accessor = p.accessor_base();
        if p.functional {
            let ty = range_token(p);
            out.push_str(&format!("    {ty} get{accessor}();\n"));
            out.push_str(&format!("    void set{accessor}({ty} value);\n"));
        } else {
            let ty = element_token(p);
            out.push_str(&format!("    Collection<{ty}> list{accessor}();\n"));
            out.push_str(&format!("    void add{accessor}({ty} value);\n"));
            out.push_str(&format!("    void remove{accessor}({ty} value);\n"));
        }
    }
    out.push_str("}\n");
    out
}

fn render_default(t: &CodeType) -> String {
    let name = &t.name;
    let base = match &t.extends {
        Some(sup) => format!("Default{sup}"),
        None => "DefaultOWLIndividual".to_string(),
    };
    let mut out = format!(
        "public class Default{name} extends {base} implements {name} {{\n\
         \x20   public Default{name}(KnowledgeBase kb, FrameID id) {{\n\
         \x20       super(kb, id);\n\
         \x20   }}\n"
    );
    for p in &t.properties {
        let accessor = p.accessor_base();
        let lookup = format!(
            "        RDFProperty property = getOWLModel().getRDFProperty(\"{}\");\n",
            p.name
        );
        if p.functional {
            let ty = range_token(p);
            out.push_str(&format!(
                "\n    public {ty} get{accessor}() {{\n{lookup}        return ({ty}) getPropertyValue(property);\n    }}\n"
            ));
            out.push_str(&format!(
                "\n    public void set{accessor}({ty} value) {{\n{lookup}        setPropertyValue(property, value);\n    }}\n"
            ));
        } else {
            let ty = element_token(p);
            out.push_str(&format!(
                "\n    public Collection<{ty}> list{accessor}() {{\n{lookup}        return (Collection<{ty}>) getPropertyValues(property);\n    }}\n"
            ));
            out.push_str(&format!(
                "\n    public void add{accessor}({ty} value) {{\n{lookup}        addPropertyValue(property, value);\n    }}\n"
            ));
            out.push_str(&format!(
                "\n    public void remove{accessor}({ty} value) {{\n{lookup}        removePropertyValue(property, value);\n    }}\n"
            ));
        }
    }
    out.push_str("}\n");
    out
}

/// File name to contents. The CLI writes `domain-model.json` alongside
/// `oo-stub` output as well.
pub fn render_stubs(model: &CodeModel, target: Target) -> BTreeMap<String, String> {
    let mut files = BTreeMap::new();
    match target {
        Target::Json => {
            files.insert(MODEL_FILE.to_string(), model.to_json());
        }
        Target::OoStub => {
            for t in &model.types {
                files.insert(format!("{}.txt", t.name), render_interface(t));
                files.insert(format!("Default{}.txt", t.name), render_default(t));
            }
        }
    }
    files
}

pub fn write_files(dir: &Path, files: &BTreeMap<String, String>) -> Result<(), WriteError> {
    fs::create_dir_all(dir).map_err(|source| WriteError {
        path: dir.to_path_buf(),
        source,
    })?;
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|source| WriteError { path, source })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::education_fixture;
    use crate::parser::{parse_ontology, DocumentKind, SourceDocument};

    fn education() -> (CodeModel, Vec<String>) {
        build_code_model(&parse_ontology(&education_fixture().ontology_document()).unwrap())
    }

    fn onto(body: &str) -> Ontology {
        let text = format!("Prefix(:=<http://e.org/#>) Ontology(<http://e.org/o> {body})");
        parse_ontology(&SourceDocument::new("t", text, DocumentKind::Ontology)).unwrap()
    }

    #[test]
    fn person_first_name() {
        let (model, _) = education();
        let person = model.get("Person").unwrap();
        let first = person.properties.iter().find(|p| p.name == "firstName").unwrap();
        assert_eq!((first.kind, first.range.as_str()), (PropertyKind::Data, "string"));
        assert_eq!(first.accessor_base(), "FirstName");
        let files = render_stubs(&model, Target::OoStub);
        let iface = &files["Person.txt"];
        assert!(iface.starts_with("public interface Person {\n"), "{iface}");
        assert!(iface.contains("\n    String getFirstName();\n"));
        assert!(iface.contains("\n    void setFirstName(String value);\n"));
        assert!(iface.contains("\n    int getSalary();\n"));
        assert!(files["DefaultPerson.txt"].contains("getRDFProperty(\"firstName\")"));
        assert!(files["DefaultPerson.txt"].contains("public DefaultPerson(KnowledgeBase kb, FrameID id) {"));
    }

    #[test]
    fn inheritance_without_redeclaration() {
        let (model, warnings) = education();
        let student = model.get("Student").unwrap();
        assert_eq!(student.extends.as_deref(), Some("Person"));
        assert!(student.properties.is_empty());
        assert!(warnings.iter().all(|w| w.contains("hasOwner")), "{warnings:?}");
        let files = render_stubs(&model, Target::OoStub);
        assert_eq!(files["Student.txt"], "public interface Student extends Person {\n}\n");
        assert!(files["DefaultStudent.txt"]
            .starts_with("public class DefaultStudent extends DefaultPerson implements Student {\n"));
    }

    #[test]
    fn non_functional_object_property() {
        let (model, _) = education();
        let instructor = model.get("Instructor").unwrap();
        assert_eq!(
            instructor.properties,
            [CodeProperty {
                name: "hasCourse".into(),
                kind: PropertyKind::Object,
                range: "Course".into(),
                functional: false
            }]
        );
        let files = render_stubs(&model, Target::OoStub);
        assert_eq!(
            files["Instructor.txt"],
            "public interface Instructor extends Person {\n    Collection<Course> listHasCourse();\n    void addHasCourse(Course value);\n    void removeHasCourse(Course value);\n}\n"
        );
    }

    #[test]
    fn empty_model() {
        let (model, _) = build_code_model(&onto(""));
        assert!(render_stubs(&model, Target::OoStub).is_empty());
        let json = render_stubs(&model, Target::Json);
        assert_eq!(json[MODEL_FILE], "{\n  \"types\": []\n}\n");
    }

    #[test]
    fn json_round_trip() {
        let (model, _) = education();
        let json = model.to_json();
        let back = CodeModel::from_json(&json).unwrap();
        assert_eq!(back, model);
        assert_eq!(
            render_stubs(&back, Target::OoStub),
            render_stubs(&model, Target::OoStub)
        );
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(value["types"][0].get("extends").is_none());
    }

    #[test]
    fn multiple_superclasses_collapse_with_warning() {
        let (model, warnings) = build_code_model(&onto(
            "Declaration(Class(:A)) Declaration(Class(:B)) Declaration(Class(:C))
             SubClassOf(:C :B) SubClassOf(:C :A)",
        ));
        assert_eq!(model.get("C").unwrap().extends.as_deref(), Some("A"));
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn name_clash_is_disambiguated() {
        let (model, warnings) = build_code_model(&onto(
            "Declaration(Class(:A)) Declaration(Class(<http://other.org/#A>)) Declaration(Class(:my-type))",
        ));
        let names: Vec<&str> = model.types.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, ["A", "A_2", "my_type"]);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn accessor_law() {
        for w in ["firstName", "x", "élan", "a1"] {
            let p = CodeProperty {
                name: w.into(),
                kind: PropertyKind::Data,
                range: "string".into(),
                functional: true,
            };
            let t = CodeType {
                name: "T".into(),
                extends: None,
                source_class: Iri::new("urn:t").unwrap(),
                properties: vec![p],
            };
            let text = render_interface(&t);
            assert!(text.contains(&format!(" get{}();", capitalize(w))));
            assert!(text.contains(&format!(" set{}(String value);", capitalize(w))));
        }
    }

    #[test]
    fn write_errors_name_the_path() {
        let dir = std::env::temp_dir().join(format!("ontofdd-codegen-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let blocker = dir.join("file");
        fs::write(&blocker, "").unwrap();
        let err = write_files(&blocker.join("sub"), &BTreeMap::new()).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
        fs::remove_dir_all(&dir).unwrap();
    }
}
