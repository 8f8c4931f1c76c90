//! Run configuration: command-line flags over `fdd.toml` over defaults.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, ValueEnum};
use ontofdd::codegen::Target;
use ontofdd::planner::DEFAULT_ITERATION_DAYS;
use ontofdd::reasoner::TypingMode;
use serde::Deserialize;

use crate::CliError;

pub const CONFIG_FILE: &str = "fdd.toml";
pub const DEFAULT_OUT: &str = "fdd-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Markdown,
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }

    pub fn markdown(self) -> bool {
        matches!(self, OutputFormat::Markdown | OutputFormat::Both)
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Ontology in functional syntax
    #[arg(short = 'o', long = "ontology", value_name = "FILE")]
    pub ontology: Option<PathBuf>,
    /// Rules file, one rule per line
    #[arg(short = 'r', long = "rules", value_name = "FILE")]
    pub rules: Option<PathBuf>,
    #[arg(long, value_name = "infer|strict")]
    pub typing: Option<TypingMode>,
    /// Output directory, created if absent
    #[arg(long = "out", value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Config file (defaults to ./fdd.toml when present)
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PlanArgs {
    #[arg(long = "start-date", value_name = "YYYY-MM-DD")]
    pub start_date: Option<NaiveDate>,
    #[arg(long = "iteration-days", value_name = "N")]
    pub iteration_days: Option<u32>,
    #[arg(long = "default-owner", value_name = "NAME")]
    pub default_owner: Option<String>,
}

/// Contents of `fdd.toml`. Relative paths are taken from the file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub ontology: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub query: Option<PathBuf>,
    pub typing: Option<TypingMode>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub start_date: Option<NaiveDate>,
    pub iteration_days: Option<u32>,
    pub default_owner: Option<String>,
    pub target: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let mut cfg: FileConfig =
            toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.ontology, &mut cfg.rules, &mut cfg.query, &mut cfg.out]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// The explicit `--config` file, else `fdd.toml` in the working directory if any.
    pub fn discover(explicit: Option<&Path>) -> Result<Self, CliError> {
        match explicit {
            Some(p) => Self::load(p),
            None if Path::new(CONFIG_FILE).is_file() => Self::load(Path::new(CONFIG_FILE)),
            None => Ok(Self::default()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub ontology_path: PathBuf,
    pub rules_path: Option<PathBuf>,
    pub query_path: Option<PathBuf>,
    pub typing_mode: TypingMode,
    pub output_dir: PathBuf,
    pub output_format: OutputFormat,
    pub start_date: Option<NaiveDate>,
    pub iteration_length_days: u32,
    pub default_owner: Option<String>,
    pub target: Target,
}

impl RunConfig {
    pub fn resolve(
        common: &CommonArgs,
        plan: Option<&PlanArgs>,
        query: Option<PathBuf>,
        target: Option<Target>,
    ) -> Result<Self, CliError> {
        let file = FileConfig::discover(common.config.as_deref())?;
        let plan = plan.cloned().unwrap_or_default();
        let ontology_path = common
            .ontology
            .clone()
            .or(file.ontology)
            .ok_or_else(|| CliError::usage("no ontology given (use -o FILE or `ontology` in fdd.toml)"))?;
        let target = match (target, file.target) {
            (Some(t), _) => t,
            (None, Some(t)) => t
                .parse()
                .map_err(|e: String| CliError::usage(format!("{CONFIG_FILE}: {e}")))?,
            (None, None) => Target::OoStub,
        };
        let iteration_length_days = plan
            .iteration_days
            .or(file.iteration_days)
            .unwrap_or(DEFAULT_ITERATION_DAYS);
        if iteration_length_days == 0 {
            return Err(CliError::usage("iteration length must be at least one day"));
        }
        Ok(RunConfig {
            ontology_path,
            rules_path: common.rules.clone().or(file.rules),
            query_path: query.or(file.query),
            typing_mode: common.typing.or(file.typing).unwrap_or_default(),
            output_dir: common
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            output_format: common.format.or(file.format).unwrap_or(OutputFormat::Both),
            start_date: plan.start_date.or(file.start_date),
            iteration_length_days,
            default_owner: plan.default_owner.or(file.default_owner),
            target,
        })
    }
}
