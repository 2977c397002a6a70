use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use cte_core::binding::{BindingRecord, BindingRegistry, BindingSource, BindingValue};
use cte_core::dsl::{compile, parse, CompileEnv, ReasonablenessConfig};
use cte_core::engine::{replay, resolve_calendar, Report, Scenario, CALENDAR_DIR_VAR};
use cte_core::error::ParseError;
use cte_core::{ContinuousInterval, DateBag, Day, PropertyCalendar};

#[derive(Parser)]
#[command(name = "cte", version, about = "Check temporal phrases and contract performance scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a phrase and print its syntax tree and explanation.
    Parse { phrase: String },
    /// Compile a phrase against bindings and a calendar and print its value.
    Eval {
        phrase: String,
        /// JSON object mapping names to a date or a list of alternative dates.
        #[arg(long)]
        bindings: Option<PathBuf>,
        #[arg(long)]
        calendar: Option<PathBuf>,
        #[arg(long)]
        reasonableness: Option<PathBuf>,
        /// The current date, for phrases such as "today" or "promptly".
        #[arg(long)]
        today: Option<Day>,
    },
    /// Replay a scenario and print its report.
    Simulate(RunArgs),
    /// Replay a scenario; exit 0 when clean, 1 on violations, 2 on errors.
    Check(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    scenario: PathBuf,
    #[arg(long)]
    calendar: Option<PathBuf>,
    #[arg(long)]
    reasonableness: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// A bindings-file entry: a date, a list of alternatives, or a full bag.
#[derive(Deserialize)]
#[serde(untagged)]
enum BindingInput {
    Day(Day),
    Alternatives(Vec<Day>),
    Value(BindingValue),
}

impl From<BindingInput> for BindingValue {
    fn from(input: BindingInput) -> Self {
        match input {
            BindingInput::Day(d) => BindingValue::Day(d),
            BindingInput::Alternatives(days) => BindingValue::Bag(DateBag::new(days)),
            BindingInput::Value(v) => v,
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_calendar(path: &Path) -> Result<PropertyCalendar, String> {
    PropertyCalendar::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_reasonableness(path: Option<&Path>) -> Result<ReasonablenessConfig, String> {
    match path {
        Some(p) => ReasonablenessConfig::from_json(&read(p)?).map_err(|e| format!("{}: {e}", p.display())),
        None => Ok(ReasonablenessConfig::default()),
    }
}

/// Points at the offending byte of a phrase.
fn diagnostic(phrase: &str, e: &ParseError) -> String {
    let col = phrase[..e.offset.min(phrase.len())].chars().count();
    format!("error[{}]: {}\n  {phrase}\n  {}^", e.kind, e.message, " ".repeat(col))
}

fn cmd_parse(phrase: &str) -> Result<u8, String> {
    let node = parse(phrase).map_err(|e| diagnostic(phrase, &e))?;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "sort: {:?}", node.sort());
    let _ = writeln!(out, "normalized: {}", node.print());
    let _ = writeln!(out, "explain: {}", node.explain());
    // phrases that need no bindings or calendar can be shown by value
    let (reg, cal, cfg) = (BindingRegistry::new(), PropertyCalendar::new(), ReasonablenessConfig::default());
    if let Ok(v) = compile(&node, &CompileEnv::new(&reg, &cal, &cfg, ContinuousInterval::unbounded())) {
        let _ = writeln!(out, "value: {v}");
    }
    let _ = writeln!(out, "ast: {node:#?}");
    Ok(0)
}

fn cmd_eval(
    phrase: &str,
    bindings: Option<&Path>,
    calendar: Option<&Path>,
    reasonableness: Option<&Path>,
    today: Option<Day>,
) -> Result<u8, String> {
    let node = parse(phrase).map_err(|e| diagnostic(phrase, &e))?;
    let cal = match calendar {
        Some(p) => load_calendar(p)?,
        None => PropertyCalendar::new(),
    };
    let cfg = load_reasonableness(reasonableness)?;
    let mut reg = BindingRegistry::new();
    if let Some(p) = bindings {
        let values: BTreeMap<String, BindingInput> =
            serde_json::from_str(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?;
        for (name, value) in values {
            let value = BindingValue::from(value);
            let bound_at = match &value {
                BindingValue::Day(d) => *d,
                BindingValue::Bag(b) => b.start().ok_or_else(|| format!("{name}: empty bag"))?,
            };
            let record = BindingRecord {
                value,
                bound_at: today.map_or(bound_at, |t| t.min(bound_at)),
                bound_by: "bindings file".into(),
                reason: String::new(),
                source: BindingSource::Text,
                properties: Default::default(),
            };
            reg = reg.bind(&name, record).map_err(|e| e.to_string())?;
        }
    }
    let mut env = CompileEnv::new(&reg, &cal, &cfg, ContinuousInterval::unbounded());
    if let Some(t) = today {
        env = env.today(t);
    }
    let v = compile(&node, &env).map_err(|e| format!("error: {e}"))?;
    println!("{v}");
    Ok(0)
}

fn run(args: &RunArgs, check: bool) -> Result<u8, String> {
    let text = read(&args.scenario)?;
    let sc = Scenario::from_json(&text).map_err(|e| format!("{}: {e}", args.scenario.display()))?;
    let cal = match (&args.calendar, &sc.calendar) {
        (Some(p), _) => load_calendar(p)?,
        (None, Some(reference)) => {
            let search = std::env::var_os(CALENDAR_DIR_VAR).map(PathBuf::from);
            let path = resolve_calendar(reference, args.scenario.parent(), search.as_deref())
                .ok_or_else(|| format!("calendar {reference:?} not found next to the scenario or in ${CALENDAR_DIR_VAR}"))?;
            load_calendar(&path)?
        }
        (None, None) => PropertyCalendar::new(),
    };
    let cfg = load_reasonableness(args.reasonableness.as_deref())?;
    let report: Report = replay(&sc, &cal, &cfg).map_err(|e| format!("{}: {e}", args.scenario.display()))?;
    let rendered = match args.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    let _ = std::io::stdout().lock().write_all(rendered.as_bytes());
    Ok(if check && !report.is_clean() { 1 } else { 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Parse { phrase } => cmd_parse(phrase),
        Command::Eval {
            phrase,
            bindings,
            calendar,
            reasonableness,
            today,
        } => cmd_eval(phrase, bindings.as_deref(), calendar.as_deref(), reasonableness.as_deref(), *today),
        Command::Simulate(args) => run(args, false),
        Command::Check(args) => run(args, true),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
