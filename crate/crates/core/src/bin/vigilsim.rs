//! Headless harness: run policies over scenarios, generate teaching
//! scenarios, validate data files and summarize exported histories.
//!
//! On failure a single JSON line `{"error":{"code":..,"message":..}}` is
//! written to stderr and the exit code is nonzero.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use vigilsim::engine::{run_policy, NamedPolicy, SessionHistory};
use vigilsim::error::{ConfigError, EngineError, IngestError, ScenarioError};
use vigilsim::scenario::{
    build_historical_scenario, generate_pedagogical_scenario, load_rain_series, load_vigilance_series,
    ForecastModel, GeneratorConfig,
};
use vigilsim::{ColourScale, Scenario, SimConfig};

#[derive(Parser)]
#[command(name = "vigilsim", version, about = "Flood vigilance communication simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play a scenario with a scripted policy and export the history.
    Run(RunArgs),
    /// Generate a teaching scenario from a template config.
    Generate(GenerateArgs),
    /// Ingest and check data files; optionally build a scenario archive.
    Validate(ValidateArgs),
    /// Summarize an exported history.
    Stats(StatsArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Scenario archive (JSON).
    #[arg(long, conflicts_with_all = ["rain", "vigilance"])]
    scenario: Option<PathBuf>,
    /// Daily rain CSV (`date,rain_mm`).
    #[arg(long, requires = "vigilance")]
    rain: Option<PathBuf>,
    /// Vigilance CSV (`date,colour`).
    #[arg(long, requires = "rain")]
    vigilance: Option<PathBuf>,
    /// Relative spread of the synthesized forecast error; 0 means perfect forecasts.
    #[arg(long, default_value_t = 0.3)]
    forecast_spread: f64,
    #[arg(long, default_value_t = 0)]
    forecast_seed: u64,
    /// Name for a scenario built from CSV files.
    #[arg(long)]
    name: Option<String>,
    /// First day to play (inclusive).
    #[arg(long)]
    from: Option<NaiveDate>,
    /// Last day to play (inclusive).
    #[arg(long)]
    to: Option<NaiveDate>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Simulation config (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// forecast, cautious, historical, oracle, always-<colour>.
    #[arg(long, default_value = "historical")]
    policy: String,
    /// Overrides the population seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator config (TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    rain: Option<PathBuf>,
    #[arg(long)]
    vigilance: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    history: Option<PathBuf>,
    /// Write the scenario built from --rain/--vigilance here.
    #[arg(long, requires_all = ["rain", "vigilance"])]
    build_scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 0.3)]
    forecast_spread: f64,
    #[arg(long, default_value_t = 0)]
    forecast_seed: u64,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct StatsArgs {
    history: PathBuf,
}

fn forecast_model(spread: f64, seed: u64) -> ForecastModel {
    if spread == 0.0 {
        ForecastModel::Perfect
    } else {
        ForecastModel::Noisy { spread, seed }
    }
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("open {}", path.display()))?,
    ))
}

fn build_from_csv(
    rain: &Path,
    vigilance: &Path,
    name: Option<&str>,
    model: ForecastModel,
) -> anyhow::Result<Scenario> {
    let rain_series = load_rain_series(open(rain)?).with_context(|| format!("{}", rain.display()))?;
    let vig_series = load_vigilance_series(open(vigilance)?).with_context(|| format!("{}", vigilance.display()))?;
    let name = name.map(str::to_string).unwrap_or_else(|| {
        rain.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "historical".into())
    });
    Ok(build_historical_scenario(name, &rain_series, &vig_series, model, ColourScale::default())?)
}

fn load_source(src: &SourceArgs) -> anyhow::Result<Scenario> {
    let scenario = match (&src.scenario, &src.rain, &src.vigilance) {
        (Some(path), _, _) => Scenario::load(path)?,
        (None, Some(rain), Some(vig)) => build_from_csv(
            rain,
            vig,
            src.name.as_deref(),
            forecast_model(src.forecast_spread, src.forecast_seed),
        )?,
        _ => anyhow::bail!(ConfigError::general("either --scenario or --rain with --vigilance is required")),
    };
    if src.from.is_none() && src.to.is_none() {
        return Ok(scenario);
    }
    let first = scenario.days()[0].date;
    let last = scenario.days()[scenario.len() - 1].date;
    Ok(scenario.trimmed(src.from.unwrap_or(first), src.to.unwrap_or(last))?)
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("write {}", path.display()))
}

#[derive(Serialize)]
struct RunReport<'a> {
    output: &'a Path,
    scenario: &'a str,
    days: usize,
    residents: u32,
    policy: &'a str,
    seed: u64,
    final_avg_trust: Option<f64>,
    false_alarms: u32,
    missed_alarms: u32,
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let policy: NamedPolicy = args.policy.parse().map_err(|m: String| ConfigError::field("policy", m))?;
    let mut config = match &args.config {
        Some(path) => SimConfig::load(path)?,
        None => SimConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.population.seed = seed;
    }
    let scenario = config.apply_scale(load_source(&args.source)?);
    let settings = config.engine_settings(scenario.scale());
    let scenario = Arc::new(scenario);
    let history = run_policy(scenario.clone(), &config.population, settings, &policy)?;
    write_text(&args.output, &history.to_json())?;
    let summary = history.summary();
    let report = RunReport {
        output: &args.output,
        scenario: scenario.name(),
        days: history.records.len(),
        residents: config.population.size,
        policy: &args.policy,
        seed: config.population.seed,
        final_avg_trust: summary.final_avg_trust,
        false_alarms: summary.false_alarms,
        missed_alarms: summary.missed_alarms,
    };
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.config).with_context(|| format!("read {}", args.config.display()))?;
    let config: GeneratorConfig = toml::from_str(&text).map_err(|e| ConfigError::general(e.message().to_string()))?;
    let scenario = generate_pedagogical_scenario(args.seed, &config)?;
    write_text(&args.output, &scenario.to_json())?;
    println!(
        "{}",
        serde_json::json!({ "output": args.output, "scenario": scenario.name(), "days": scenario.len() })
    );
    Ok(())
}

fn validate(args: ValidateArgs) -> anyhow::Result<()> {
    let mut report = serde_json::Map::new();
    if let Some(path) = &args.rain {
        let s = load_rain_series(open(path)?).with_context(|| format!("{}", path.display()))?;
        report.insert(
            "rain".into(),
            serde_json::json!({ "days": s.len(), "from": s.start(), "to": s.end() }),
        );
    }
    if let Some(path) = &args.vigilance {
        let v = load_vigilance_series(open(path)?).with_context(|| format!("{}", path.display()))?;
        report.insert("vigilance".into(), serde_json::json!({ "bulletins": v.entries.len() }));
    }
    if let (Some(rain), Some(vig)) = (&args.rain, &args.vigilance) {
        let scenario = build_from_csv(
            rain,
            vig,
            args.name.as_deref(),
            forecast_model(args.forecast_spread, args.forecast_seed),
        )?;
        if let Some(out) = &args.build_scenario {
            write_text(out, &scenario.to_json())?;
            report.insert("built".into(), serde_json::json!(out));
        }
    }
    if let Some(path) = &args.scenario {
        let s = Scenario::load(path)?;
        report.insert("scenario".into(), serde_json::json!({ "name": s.name(), "days": s.len() }));
    }
    if let Some(path) = &args.config {
        let c = SimConfig::load(path)?;
        report.insert("config".into(), serde_json::json!({ "residents": c.population.size }));
    }
    if let Some(path) = &args.history {
        let h = load_history(path)?;
        let bad = h.inconsistent_records(&ColourScale::default());
        if !bad.is_empty() {
            anyhow::bail!(ConfigError::field(
                "history.records",
                format!("classification mismatch at record(s) {bad:?}")
            ));
        }
        report.insert("history".into(), serde_json::json!({ "days": h.records.len() }));
    }
    if report.is_empty() {
        anyhow::bail!(ConfigError::general("nothing to validate"));
    }
    report.insert("ok".into(), true.into());
    println!("{}", serde_json::Value::Object(report));
    Ok(())
}

fn load_history(path: &Path) -> anyhow::Result<SessionHistory> {
    let text = std::fs::read_to_string(path).with_context(|| format!("read {}", path.display()))?;
    SessionHistory::from_json(&text).with_context(|| format!("parse history {}", path.display()))
}

fn stats(args: StatsArgs) -> anyhow::Result<()> {
    let history = load_history(&args.history)?;
    println!("{}", serde_json::to_string_pretty(&history.summary())?);
    Ok(())
}

fn error_code(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return "config";
        }
        if cause.is::<IngestError>() {
            return "ingest";
        }
        if let Some(e) = cause.downcast_ref::<ScenarioError>() {
            return match e {
                ScenarioError::Ingest(_) => "ingest",
                ScenarioError::Config(_) => "config",
                _ => "scenario",
            };
        }
        if let Some(e) = cause.downcast_ref::<EngineError>() {
            return match e {
                EngineError::Config(_) => "config",
                _ => "engine",
            };
        }
        if cause.is::<serde_json::Error>() {
            return "parse";
        }
        if cause.is::<std::io::Error>() {
            return "io";
        }
    }
    "error"
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Generate(a) => generate(a),
        Command::Validate(a) => validate(a),
        Command::Stats(a) => stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let line = serde_json::json!({
                "error": { "code": error_code(&err), "message": format!("{err:#}") }
            });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
