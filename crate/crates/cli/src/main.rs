//! `tvopt` command-line front end.
//!
//! Exit codes: 0 when everything passed, 1 for runtime failures or unmet
//! criteria, 2 for configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use tvopt::objective::oracle::{lemma_suite, LEMMA_DEFAULT_CAP, LEMMA_TOLERANCE};
use tvopt::planner::design_gains;
use tvopt::scenario::{builtin, run_scenario, ErrorRecord, RunReport, ScenarioSpec, BUILTIN_NAMES};
use tvopt::Error;

#[derive(Parser)]
#[command(
    name = "tvopt",
    version,
    about = "Time-varying optimization for feedback-linearizable plants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios and write trace.csv, bound_report.json and resolved_config.json.
    Simulate(SimulateArgs),
    /// Compare the total-derivative engine against finite differences.
    CheckLemma(LemmaArgs),
    /// Print the gain profile for a pole set as JSON.
    DesignGains(GainArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Built-in scenario name; repeatable.
    #[arg(long = "scenario", value_name = "NAME")]
    scenarios: Vec<String>,
    /// Scenario JSON file; repeatable.
    #[arg(long = "config", value_name = "PATH")]
    configs: Vec<PathBuf>,
    /// Output directory. With several runs, each gets a subdirectory named
    /// after its scenario.
    #[arg(long, default_value = "tvopt-out")]
    out: PathBuf,
    /// Override a field by dotted path, e.g. `sim.t_end=5` or
    /// `gains.poles.0=-4`. The value is parsed as JSON, falling back to a
    /// plain string.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Number of runs executed in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Recorded in the report manifest. Scenario runs are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
    orders: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Highest partial-derivative order the objectives provide.
    #[arg(long, default_value_t = LEMMA_DEFAULT_CAP)]
    partial_cap: usize,
}

#[derive(Args)]
struct GainArgs {
    /// Poles as real numbers or complex literals like `-1+2i`.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    poles: Vec<String>,
    /// Expected order; must match the number of poles when given.
    #[arg(long)]
    k: Option<usize>,
    /// Output dimension.
    #[arg(long, default_value_t = 1)]
    m: usize,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// A failed command step with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
    /// Kind and time of the underlying library error, when there is one.
    record: Option<ErrorRecord>,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
            record: None,
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: message.into(),
            record: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_config() {
            EXIT_CONFIG
        } else {
            EXIT_FAILURE
        };
        let t = match &e {
            Error::Singularity { t, .. } | Error::Stiffness { t, .. } => Some(*t),
            _ => None,
        };
        Failure {
            code,
            message: e.to_string(),
            record: Some(ErrorRecord::new(&e, t)),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::runtime(format!("I/O error: {e}"))
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
enum Source {
    Scenario(String),
    Config(PathBuf),
}

/// Everything that determined a run, echoed into its report.
#[derive(Debug, Clone, Serialize)]
struct RunManifest {
    source: Source,
    out_dir: PathBuf,
    overrides: Vec<String>,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct BoundReportFile<'a> {
    manifest: &'a RunManifest,
    #[serde(flatten)]
    report: &'a RunReport,
}

/// Sets `path = value` in a JSON document. Every segment must already
/// exist; numeric segments index arrays.
fn apply_override(root: &mut Value, assignment: &str) -> Result<(), Failure> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Failure::config(format!("override '{assignment}' is not KEY=VALUE")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    for segment in key.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(segment),
            Value::Array(items) => segment.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| {
            Failure::config(format!(
                "override key '{key}' does not exist (at '{segment}')"
            ))
        })?;
    }
    *node = value;
    Ok(())
}

fn load_spec(source: &Source, overrides: &[String]) -> Result<ScenarioSpec, Failure> {
    let spec = match source {
        Source::Scenario(name) => builtin(name).ok_or_else(|| {
            Failure::config(format!(
                "unknown scenario '{name}'; choose from {}",
                BUILTIN_NAMES.join(", ")
            ))
        })?,
        Source::Config(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
            ScenarioSpec::from_json(&text)?
        }
    };
    if overrides.is_empty() {
        return Ok(spec);
    }
    let mut value = serde_json::to_value(&spec).map_err(|e| Failure::config(e.to_string()))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    Ok(ScenarioSpec::from_json(&value.to_string())?)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::runtime(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Runs one scenario and writes its artifacts. Returns the exit code.
fn simulate_one(manifest: &RunManifest) -> u8 {
    match try_simulate(manifest) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            if f.code == EXIT_FAILURE {
                let record = f.record.unwrap_or(ErrorRecord {
                    kind: "RuntimeError".into(),
                    message: f.message.clone(),
                    t: None,
                });
                let _ = fs::create_dir_all(&manifest.out_dir)
                    .map_err(Failure::from)
                    .and_then(|_| write_json(&manifest.out_dir.join("error.json"), &record));
            }
            f.code
        }
    }
}

fn try_simulate(manifest: &RunManifest) -> Result<u8, Failure> {
    let spec = load_spec(&manifest.source, &manifest.overrides)?;
    // Configuration problems surface before anything is written.
    spec.build()?;
    fs::create_dir_all(&manifest.out_dir)?;
    let dir = &manifest.out_dir;
    fs::write(dir.join("resolved_config.json"), spec.to_json() + "\n")?;
    info!("running '{}' into {}", spec.name, dir.display());
    let report = run_scenario(&spec)?;
    report
        .trace
        .write_csv(std::io::BufWriter::new(fs::File::create(
            dir.join("trace.csv"),
        )?))?;
    write_json(
        &dir.join("bound_report.json"),
        &BoundReportFile {
            manifest,
            report: &report,
        },
    )?;
    if let Some(f) = &report.failure {
        write_json(&dir.join("error.json"), f)?;
        eprintln!("{}: {} at t = {:?}: {}", spec.name, f.kind, f.t, f.message);
    }
    for c in &report.criteria {
        let tag = if c.passed { "pass" } else { "FAIL" };
        println!(
            "{}: {tag} {} = {:e} (threshold {:e})",
            spec.name, c.name, c.value, c.threshold
        );
    }
    println!(
        "{}: {}",
        spec.name,
        if report.passed { "passed" } else { "failed" }
    );
    Ok(if report.passed { 0 } else { EXIT_FAILURE })
}

fn simulate(args: SimulateArgs) -> Result<u8, Failure> {
    let sources: Vec<Source> = args
        .scenarios
        .iter()
        .cloned()
        .map(Source::Scenario)
        .chain(args.configs.iter().cloned().map(Source::Config))
        .collect();
    if sources.is_empty() {
        return Err(Failure::config("give at least one --scenario or --config"));
    }
    if args.jobs == 0 {
        return Err(Failure::config("--jobs must be at least 1"));
    }
    let single = sources.len() == 1;
    let mut seen = std::collections::HashSet::new();
    let mut manifests = Vec::with_capacity(sources.len());
    for source in sources {
        let out_dir = if single {
            args.out.clone()
        } else {
            // Subdirectories are named after the scenario, so resolve it first.
            let name = load_spec(&source, &args.overrides)
                .map(|s| s.name)
                .unwrap_or_else(|_| match &source {
                    Source::Scenario(n) => n.clone(),
                    Source::Config(p) => p
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                });
            if !seen.insert(name.clone()) {
                return Err(Failure::config(format!(
                    "two runs would both write to '{name}'"
                )));
            }
            args.out.join(name)
        };
        manifests.push(RunManifest {
            source,
            out_dir,
            overrides: args.overrides.clone(),
            seed: args.seed,
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Failure::runtime(e.to_string()))?;
    let codes: Vec<u8> = pool.install(|| manifests.par_iter().map(simulate_one).collect());
    Ok(codes.into_iter().max().unwrap_or(0))
}

fn check_lemma(args: LemmaArgs) -> Result<u8, Failure> {
    let report = lemma_suite(&args.orders, args.trials, args.seed, args.partial_cap)?;
    for o in &report.orders {
        println!(
            "order {}: max relative error {:.3e} (worst trial seed {}, {})",
            o.order, o.max_relative_error, o.worst_seed, o.worst_objective
        );
    }
    if report.passed() {
        println!("all orders within {LEMMA_TOLERANCE:e}");
        Ok(0)
    } else {
        for o in report
            .orders
            .iter()
            .filter(|o| o.max_relative_error > LEMMA_TOLERANCE)
        {
            eprintln!(
                "order {} failed; reproduce with trial seed {}",
                o.order, o.worst_seed
            );
        }
        eprintln!("suite seed {}", report.seed);
        Ok(EXIT_FAILURE)
    }
}

fn parse_pole(text: &str) -> Result<Complex64, Failure> {
    let t = text.trim();
    t.parse::<f64>()
        .map(|re| Complex64::new(re, 0.0))
        .or_else(|_| t.parse::<Complex64>())
        .map_err(|_| Failure::config(format!("cannot parse pole '{text}'")))
}

fn gains(args: GainArgs) -> Result<u8, Failure> {
    let poles = args
        .poles
        .iter()
        .map(|p| parse_pole(p))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(k) = args.k {
        if k != poles.len() {
            return Err(Failure::config(format!(
                "--k {k} but {} poles given",
                poles.len()
            )));
        }
    }
    // An invalid pole set is a runtime failure here, not a config error.
    let profile = design_gains(&poles, args.m).map_err(|e| Failure::runtime(e.to_string()))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&profile).map_err(|e| Failure::runtime(e.to_string()))?
    );
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("TVOPT_LOG")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::CheckLemma(a) => check_lemma(a),
        Command::DesignGains(a) => gains(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
