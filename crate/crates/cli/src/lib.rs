//! The `ontofdd` command line: one subcommand per pipeline stage plus a
//! composite `report`. Artifacts go to files under `--out`; diagnostics go
//! to stderr; only `query` prints its table on stdout.

pub mod config;
mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use ontofdd::codegen::{build_code_model, render_stubs, Target, MODEL_FILE};
use ontofdd::engine::{EngineError, ResultTable, Rule};
use ontofdd::features::{generate_feature_list, FeatureList};
use ontofdd::parser::{
    parse_ontology, parse_query, parse_rules, serialize_ontology, DocumentKind, LoadError, SourceDocument,
};
use ontofdd::planner::{build_plan, resolve_owners, Plan, PlanConfig, PlanError};
use ontofdd::reasoner::{check_consistency, saturate, violations_to_json, violations_to_text, Saturation, Violation};
use ontofdd::Ontology;

use config::{CommonArgs, OutputFormat, PlanArgs, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    /// Violations, DL-safety errors, owner conflicts, unowned features.
    Failure,
    /// Parse, IO or usage errors.
    Usage,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Failure => 1,
            ExitStatus::Usage => 2,
        }
    }

    fn worst(self, other: ExitStatus) -> ExitStatus {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            status: ExitStatus::Usage,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        CliError {
            status: ExitStatus::Failure,
            message: message.into(),
        }
    }

    fn load(path: &Path, err: LoadError) -> Self {
        let status = match err {
            LoadError::DlSafety { .. } | LoadError::Projection { .. } => ExitStatus::Failure,
            _ => ExitStatus::Usage,
        };
        CliError {
            status,
            message: format!("{}:{err}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::failure(e.to_string())
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::ZeroIteration | PlanError::DateOverflow => CliError::usage(e.to_string()),
            _ => CliError::failure(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ontofdd",
    version,
    about = "Ontology-driven Feature Driven Development pipeline"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the model for consistency after typing and rules
    Validate(CommonArgs),
    /// Write the materialized ontology and a derivation log
    Infer(CommonArgs),
    /// Generate the feature list
    Features(CommonArgs),
    /// Run a select query and print the table
    Query {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(short = 'q', long = "query", value_name = "FILE")]
        query: Option<PathBuf>,
    },
    /// Schedule features by owner
    Plan {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        plan: PlanArgs,
    },
    /// Emit a code model and class stubs
    Codegen {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_name = "oo-stub|json")]
        target: Option<Target>,
    },
    /// Run every stage and assemble report.md
    Report {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long, value_name = "oo-stub|json")]
        target: Option<Target>,
    },
}

/// Files to write, keyed by path relative to the output directory.
#[derive(Debug, Default)]
pub struct Artifacts(BTreeMap<PathBuf, String>);

impl Artifacts {
    fn add(&mut self, name: impl Into<PathBuf>, text: impl Into<String>) {
        self.0.insert(name.into(), text.into());
    }

    pub fn names(&self) -> impl Iterator<Item = &Path> {
        self.0.keys().map(PathBuf::as_path)
    }

    fn write(&self, dir: &Path, inputs: &[&Path]) -> Result<(), CliError> {
        let io_err = |p: &Path, e: io::Error| CliError::usage(format!("{}: {e}", p.display()));
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let inputs: Vec<PathBuf> = inputs.iter().filter_map(|p| p.canonicalize().ok()).collect();
        for name in self.0.keys() {
            let path = dir.join(name);
            if path.canonicalize().is_ok_and(|p| inputs.contains(&p)) {
                return Err(CliError::usage(format!(
                    "refusing to overwrite input file {}",
                    path.display()
                )));
            }
        }
        for (name, text) in &self.0 {
            let path = dir.join(name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
            }
            fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        }
        Ok(())
    }
}

/// Everything downstream stages need: the asserted model, its rules, the
/// saturated model and the consistency verdict on it.
pub struct Pipeline {
    pub config: RunConfig,
    pub ontology: Ontology,
    pub rules: Vec<Rule>,
    pub saturation: Saturation,
    pub violations: Vec<Violation>,
}

fn read(path: &Path, kind: DocumentKind) -> Result<SourceDocument, CliError> {
    SourceDocument::read(path, kind).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

impl Pipeline {
    pub fn load(config: RunConfig) -> Result<Self, CliError> {
        let doc = read(&config.ontology_path, DocumentKind::Ontology)?;
        let ontology = parse_ontology(&doc).map_err(|e| CliError::load(&config.ontology_path, e))?;
        let rules = match &config.rules_path {
            Some(path) => {
                parse_rules(&read(path, DocumentKind::Rules)?, &ontology).map_err(|e| CliError::load(path, e))?
            }
            None => Vec::new(),
        };
        let saturation = saturate(&ontology, &rules, config.typing_mode)?;
        let violations = check_consistency(&saturation.ontology, &[], config.typing_mode);
        Ok(Pipeline {
            config,
            ontology,
            rules,
            saturation,
            violations,
        })
    }

    fn inputs(&self) -> Vec<&Path> {
        let mut v = vec![self.config.ontology_path.as_path()];
        v.extend(self.config.rules_path.as_deref());
        v.extend(self.config.query_path.as_deref());
        v
    }

    fn write(&self, artifacts: &Artifacts) -> Result<(), CliError> {
        artifacts.write(&self.config.output_dir, &self.inputs())
    }

    fn format(&self) -> OutputFormat {
        self.config.output_format
    }

    fn validation_artifacts(&self, out: &mut Artifacts) -> ExitStatus {
        let prefixes = self.saturation.ontology.prefixes();
        if self.format().json() {
            out.add("violations.json", violations_to_json(&self.violations, prefixes));
        }
        if self.format().markdown() {
            out.add("violations.txt", violations_to_text(&self.violations, prefixes));
        }
        for v in &self.violations {
            eprintln!("violation: {}", v.render(prefixes));
        }
        if self.violations.is_empty() {
            ExitStatus::Success
        } else {
            eprintln!("{} violation(s)", self.violations.len());
            ExitStatus::Failure
        }
    }

    /// One line per derived axiom: `axiom <- rule [text] <- {binding}` for
    /// rule facts, `axiom <- typing [premises]` for domain/range/subclass ones.
    pub fn derivation_log(&self) -> String {
        let prefixes = self.saturation.ontology.prefixes();
        let rule_text: BTreeMap<&str, String> = self
            .rules
            .iter()
            .map(|r| (r.name.as_str(), r.render(prefixes)))
            .collect();
        let mut lines: Vec<(&ontofdd::Axiom, String)> = Vec::new();
        for (axiom, premises) in &self.saturation.typing {
            let premises: Vec<String> = premises.iter().map(|a| a.render(prefixes)).collect();
            lines.push((
                axiom,
                format!("{} <- typing [{}]", axiom.render(prefixes), premises.join("; ")),
            ));
        }
        for fact in &self.saturation.derived {
            lines.push((
                &fact.axiom,
                format!(
                    "{} <- {} [{}] <- {}",
                    fact.axiom.render(prefixes),
                    fact.rule,
                    rule_text.get(fact.rule.as_str()).map(String::as_str).unwrap_or(""),
                    fact.binding.render(prefixes)
                ),
            ));
        }
        lines.sort_by(|a, b| a.0.canonical_cmp(b.0));
        lines.into_iter().map(|(_, l)| l + "\n").collect()
    }

    fn infer_artifacts(&self, out: &mut Artifacts) {
        out.add("materialized.ofnx", serialize_ontology(&self.saturation.ontology));
        out.add("derivations.log", self.derivation_log());
    }

    pub fn feature_list(&self) -> FeatureList {
        generate_feature_list(&self.ontology)
    }

    fn feature_artifacts(&self, list: &FeatureList, out: &mut Artifacts) {
        if self.format().json() {
            out.add("features.json", list.to_json());
        }
        if self.format().markdown() {
            out.add("features.md", list.to_markdown());
        }
        out.add("feature-warnings.txt", list.warnings_text());
        for w in &list.warnings {
            eprintln!("warning: {w}");
        }
    }

    pub fn plan(&self, list: &FeatureList) -> Result<Plan, CliError> {
        let start = self
            .config
            .start_date
            .ok_or_else(|| CliError::usage("planning needs --start-date YYYY-MM-DD (or `start_date` in fdd.toml)"))?;
        let config = PlanConfig::new(
            start,
            self.config.iteration_length_days,
            self.config.default_owner.clone(),
        )?;
        let owners = resolve_owners(&self.saturation.ontology)?;
        Ok(build_plan(&list.major, &owners, &config)?)
    }

    fn plan_artifacts(&self, plan: &Plan, out: &mut Artifacts) -> ExitStatus {
        if self.format().json() {
            out.add("plan.json", plan.to_json());
        }
        if self.format().markdown() {
            out.add("plan.md", plan.to_markdown(&self.ontology));
        }
        if plan.has_unassigned() && self.config.default_owner.is_none() {
            for e in plan.schedule.iter().filter(|e| e.owner == ontofdd::planner::UNASSIGNED) {
                eprintln!("unowned feature: {}", e.sentence);
            }
            eprintln!("some features have no owner; annotate their classes or pass --default-owner");
            ExitStatus::Failure
        } else {
            ExitStatus::Success
        }
    }

    /// Stub files by name; the code model is always included.
    pub fn stubs(&self) -> BTreeMap<String, String> {
        let (model, warnings) = build_code_model(&self.ontology);
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        let mut files = render_stubs(&model, self.config.target);
        files.insert(MODEL_FILE.to_string(), model.to_json());
        files
    }

    pub fn query(&self) -> Result<ResultTable, CliError> {
        let path = self
            .config
            .query_path
            .as_deref()
            .ok_or_else(|| CliError::usage("query needs -q FILE"))?;
        let query = parse_query(&read(path, DocumentKind::Query)?, &self.saturation.ontology)
            .map_err(|e| CliError::load(path, e))?;
        Ok(ontofdd::engine::run_query(&self.saturation.ontology, &query)?)
    }
}

pub fn cmd_validate(config: RunConfig) -> Result<ExitStatus, CliError> {
    let p = Pipeline::load(config)?;
    let mut out = Artifacts::default();
    let status = p.validation_artifacts(&mut out);
    p.write(&out)?;
    Ok(status)
}

pub fn cmd_infer(config: RunConfig) -> Result<ExitStatus, CliError> {
    let p = Pipeline::load(config)?;
    let mut out = Artifacts::default();
    p.infer_artifacts(&mut out);
    p.write(&out)?;
    Ok(ExitStatus::Success)
}

pub fn cmd_features(config: RunConfig) -> Result<ExitStatus, CliError> {
    let p = Pipeline::load(config)?;
    let mut out = Artifacts::default();
    p.feature_artifacts(&p.feature_list(), &mut out);
    p.write(&out)?;
    Ok(ExitStatus::Success)
}

pub fn cmd_query(config: RunConfig) -> Result<ExitStatus, CliError> {
    let p = Pipeline::load(config)?;
    let table = p.query()?;
    let mut out = Artifacts::default();
    if p.format().markdown() {
        out.add("query-result.tsv", table.to_tsv());
    }
    if p.format().json() {
        out.add("query-result.json", table.to_json());
    }
    p.write(&out)?;
    let mut stdout = io::stdout().lock();
    stdout
        .write_all(table.to_tsv().as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::usage(format!("stdout: {e}")))?;
    Ok(ExitStatus::Success)
}

pub fn cmd_plan(config: RunConfig) -> Result<ExitStatus, CliError> {
    let p = Pipeline::load(config)?;
    let list = p.feature_list();
    let plan = p.plan(&list)?;
    let mut out = Artifacts::default();
    let status = p.plan_artifacts(&plan, &mut out);
    p.write(&out)?;
    Ok(status)
}

pub fn cmd_codegen(config: RunConfig) -> Result<ExitStatus, CliError> {
    let p = Pipeline::load(config)?;
    let mut out = Artifacts::default();
    for (name, text) in p.stubs() {
        out.add(name, text);
    }
    p.write(&out)?;
    Ok(ExitStatus::Success)
}

/// Every stage's artifacts plus `report.md`, all built from one pipeline run.
pub fn cmd_report(config: RunConfig) -> Result<ExitStatus, CliError> {
    let p = Pipeline::load(config)?;
    let list = p.feature_list();
    let plan = p.plan(&list)?;
    let stubs = p.stubs();
    let mut out = Artifacts::default();
    let status = p
        .validation_artifacts(&mut out)
        .worst(p.plan_artifacts(&plan, &mut out));
    p.infer_artifacts(&mut out);
    p.feature_artifacts(&list, &mut out);
    for (name, text) in &stubs {
        out.add(Path::new(report::STUB_DIR).join(name), text.clone());
    }
    out.add("report.md", report::render(&p, &list, &plan, &stubs));
    p.write(&out)?;
    Ok(status)
}

pub fn run(cli: Cli) -> Result<ExitStatus, CliError> {
    match cli.command {
        Command::Validate(common) => cmd_validate(RunConfig::resolve(&common, None, None, None)?),
        Command::Infer(common) => cmd_infer(RunConfig::resolve(&common, None, None, None)?),
        Command::Features(common) => cmd_features(RunConfig::resolve(&common, None, None, None)?),
        Command::Query { common, query } => cmd_query(RunConfig::resolve(&common, None, query, None)?),
        Command::Plan { common, plan } => cmd_plan(RunConfig::resolve(&common, Some(&plan), None, None)?),
        Command::Codegen { common, target } => cmd_codegen(RunConfig::resolve(&common, None, None, target)?),
        Command::Report { common, plan, target } => cmd_report(RunConfig::resolve(&common, Some(&plan), None, target)?),
    }
}
