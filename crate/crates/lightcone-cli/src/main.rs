//! `lightcone` — causal-cone circuit reduction, measurement planning, and
//! simulation for variational quantum algorithms.
//!
//! Subcommands mirror the pipeline stages: `reduce` (per-term causal-cone
//! circuits), `plan` (grouping and shot budgets), `compile` (native-gate
//! lowering), `run` (one sampled evaluation), `experiment` (end-to-end
//! report files), and `calibrate` (empirical error of the full strategy).
//!
//! Exit codes: 0 success, 2 config/usage error, 3 numeric guard, 1 I/O.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lightcone::driver::{
    self, ExperimentConfig, NoiseConfig, Problem, ProblemConfig, ShotPlan, Strategy,
};
use lightcone::grouping::{budget_all, group_all, minimal_cover, RoundingPolicy, ShotBudget};
use lightcone::native::{compile_native, gate_counts, OptLevel};
use lightcone::problems::{DEUTERON_OPERATING_POINT, DRAGON_OPERATING_POINT};
use lightcone::sim::NoiseModel;
use lightcone::{cone, Circuit, Error};

#[derive(Parser)]
#[command(
    name = "lightcone",
    version,
    about = "Reduce, plan, compile, and simulate variational circuits via past causal cones"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct Global {
    /// Experiment config file (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for output artifacts (print to stdout when omitted).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Base RNG seed (overrides the config's seed).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Stdout/artifact format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// JSON documents (JSON lines where noted).
    Json,
    /// Comma-separated tables.
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Full,
    ReducedAccuracy,
    ReducedCover,
}

impl From<StrategyArg> for Strategy {
    fn from(arg: StrategyArg) -> Self {
        match arg {
            StrategyArg::Full => Strategy::Full,
            StrategyArg::ReducedAccuracy => Strategy::ReducedAccuracy,
            StrategyArg::ReducedCover => Strategy::ReducedCover,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundingArg {
    Exact,
    Experiment,
}

impl From<RoundingArg> for RoundingPolicy {
    fn from(arg: RoundingArg) -> Self {
        match arg {
            RoundingArg::Exact => RoundingPolicy::Exact,
            RoundingArg::Experiment => RoundingPolicy::Experiment,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Reduce every Hamiltonian term to its past-causal-cone circuit.
    Reduce(SourceArgs),
    /// Group reduced circuits and print the shot-budget table.
    Plan(PlanArgs),
    /// Lower the ansatz to the native {RX, RY, RZ, XX} gate set.
    Compile(CompileArgs),
    /// Sample the configured strategy once and report the energy.
    Run(RunArgs),
    /// End-to-end pipeline: optimize if configured, evaluate, write reports.
    Experiment(ExperimentArgs),
    /// Measure the empirical 1σ error of the full strategy.
    Calibrate(CalibrateArgs),
}

/// Problem source shared by the stage subcommands: a config file (global
/// `--config`) or a builtin benchmark by name.
#[derive(Args)]
struct SourceArgs {
    /// Builtin problem (`deuteron` or `dragon`) instead of --config.
    #[arg(long, value_name = "NAME", conflicts_with = "config")]
    builtin: Option<String>,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Target 1σ energy error (overrides the config's budget plan).
    #[arg(long, value_name = "EPS")]
    epsilon: Option<f64>,
    /// Shot rounding policy (default: the config's, else exact).
    #[arg(long, value_enum)]
    rounding: Option<RoundingArg>,
    /// Grouping strategy (default: the config's, else reduced-cover).
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Lower to the native gate set (otherwise echo the canonical circuit).
    #[arg(long)]
    native: bool,
    /// Optimization level: 0 = direct lowering, 1 = fused two-qubit blocks.
    #[arg(long, value_name = "LEVEL", default_value_t = 0)]
    opt_level: u8,
    /// Include a before/after gate-count table.
    #[arg(long)]
    report: bool,
    /// Compile each reduced circuit instead of the full ansatz.
    #[arg(long)]
    reduced: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Samples per measured term (overrides the config's plan).
    #[arg(long, value_name = "N")]
    shots: Option<u64>,
    /// Noise: `off`, `default`, or a NoiseModel JSON file.
    #[arg(long, value_name = "SPEC")]
    noise: Option<String>,
    /// Apply inverse-confusion readout correction.
    #[arg(long)]
    readout_correct: bool,
    /// Strategy override.
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Fixed-point parameters, comma-separated (e.g. `0.858,0.958,0.758`).
    #[arg(long, value_name = "LIST", value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Run all three strategies (full, reduced-accuracy, reduced-cover).
    #[arg(long, conflicts_with = "strategy")]
    sweep: bool,
    /// Strategy override for a single run.
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Repetitions of the full-strategy evaluation.
    #[arg(long, value_name = "N", default_value_t = 100)]
    reps: u64,
    /// Samples per measured term (overrides the config's plan).
    #[arg(long, value_name = "N")]
    shots: Option<u64>,
    /// Fixed-point parameters, comma-separated.
    #[arg(long, value_name = "LIST", value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<Error>()
                .map_or(1, |e| e.exit_code())
                .clamp(1, 255) as u8;
            ExitCode::from(code)
        }
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Reduce(args) => cmd_reduce(&cli.global, args),
        Command::Plan(args) => cmd_plan(&cli.global, args),
        Command::Compile(args) => cmd_compile(&cli.global, args),
        Command::Run(args) => cmd_run(&cli.global, args),
        Command::Experiment(args) => cmd_experiment(&cli.global, args),
        Command::Calibrate(args) => cmd_calibrate(&cli.global, args),
    }
}

// ---------------------------------------------------------------------------
// Config loading
// ---------------------------------------------------------------------------

/// Load the experiment config from `--config`, or synthesize one for a
/// builtin benchmark (fixed-point mode at its operating point).
fn load_config(global: &Global, builtin: Option<&str>) -> anyhow::Result<ExperimentConfig> {
    let mut config = match (&global.config, builtin) {
        (Some(path), _) => ExperimentConfig::from_path(path)?,
        (None, Some(name)) => builtin_config(name)?,
        (None, None) => {
            return Err(Error::validation(
                "no problem given; pass --config FILE or --builtin NAME".to_string(),
            )
            .into())
        }
    };
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    Ok(config)
}

/// Default config for a builtin benchmark: full strategy, noiseless
/// per-circuit sampling, fixed-point parameters at the operating point.
fn builtin_config(name: &str) -> lightcone::Result<ExperimentConfig> {
    let params = match name {
        "deuteron" => DEUTERON_OPERATING_POINT.to_vec(),
        "dragon" => DRAGON_OPERATING_POINT.to_vec(),
        other => {
            return Err(Error::validation(format!(
                "unknown builtin problem `{other}` (expected `deuteron` or `dragon`)"
            )))
        }
    };
    let config = ExperimentConfig {
        problem: ProblemConfig {
            builtin: Some(name.to_string()),
            ..ProblemConfig::default()
        },
        strategy: Strategy::default(),
        plan: ShotPlan::default(),
        noise: NoiseConfig::default(),
        seed: 0,
        readout_correct: false,
        params: Some(params),
        optimize: None,
    };
    config.validate()?;
    Ok(config)
}

/// The fixed-point parameters a sampling subcommand binds, with a clear
/// diagnostic when the config is in optimize mode.
fn fixed_params(config: &ExperimentConfig) -> lightcone::Result<Vec<f64>> {
    config.params.clone().ok_or_else(|| {
        Error::validation(
            "this subcommand evaluates at fixed parameters; set `params` in the \
             config (or pass --params), or use `experiment` for optimize mode"
                .to_string(),
        )
    })
}

/// Write `content` to `<out>/<stem>.<ext>` (printing the path), or to stdout
/// when no output directory was given.
fn emit(global: &Global, stem: &str, ext: &str, content: &str) -> anyhow::Result<()> {
    match &global.out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(format!("{stem}.{ext}"));
            fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
            println!("{}", path.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn pretty(value: &impl Serialize) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

// ---------------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------------

/// One Hamiltonian term and the causal-cone circuit that measures it.
#[derive(Serialize)]
struct ReduceLine {
    term: String,
    coefficient: f64,
    circuit: usize,
    qubit_map: Vec<usize>,
    qubits_full: usize,
    qubits_reduced: usize,
    gates_full: usize,
    gates_reduced: usize,
    text: String,
}

fn cmd_reduce(global: &Global, args: &SourceArgs) -> anyhow::Result<()> {
    let config = load_config(global, args.builtin.as_deref())?;
    let problem = config.resolve_problem()?;
    let set = cone::reduced_set(&problem.circuit, &problem.hamiltonian)?;

    let lines: Vec<ReduceLine> = set
        .terms
        .iter()
        .zip(&set.circuit_of_term)
        .map(|(reduced, &circuit)| ReduceLine {
            term: reduced.term.string.label(),
            coefficient: reduced.term.coefficient,
            circuit,
            qubit_map: reduced.relabel.originals().to_vec(),
            qubits_full: problem.circuit.qubits(),
            qubits_reduced: reduced.circuit.qubits(),
            gates_full: problem.circuit.len(),
            gates_reduced: reduced.circuit.len(),
            text: reduced.circuit.to_string(),
        })
        .collect();

    let content = match global.format {
        Format::Json => {
            let mut out = String::new();
            for line in &lines {
                writeln!(out, "{}", serde_json::to_string(line)?)?;
            }
            out
        }
        Format::Csv => {
            let mut out = String::from(
                "term,coefficient,circuit,qubits_full,qubits_reduced,gates_full,gates_reduced,qubit_map\n",
            );
            for l in &lines {
                let map = l
                    .qubit_map
                    .iter()
                    .map(|q| q.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    l.term,
                    l.coefficient,
                    l.circuit,
                    l.qubits_full,
                    l.qubits_reduced,
                    l.gates_full,
                    l.gates_reduced,
                    map
                )?;
            }
            out
        }
    };
    let ext = match global.format {
        Format::Json => "jsonl",
        Format::Csv => "csv",
    };
    emit(global, &format!("reduce-{}", problem.name), ext, &content)
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PlanEntry {
    group: String,
    circuit: usize,
    t_beta: usize,
    h_gamma: f64,
    h_max: f64,
    raw: f64,
    shots: u64,
}

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
struct PlanDoc {
    problem: String,
    strategy: Strategy,
    epsilon: f64,
    policy: RoundingPolicy,
    entries: Vec<PlanEntry>,
    total_shots: u64,
    energy_error_bound: f64,
}

fn cmd_plan(global: &Global, args: &PlanArgs) -> anyhow::Result<()> {
    let config = load_config(global, args.source.builtin.as_deref())?;
    let problem = config.resolve_problem()?;

    let strategy = match (args.strategy, &global.config) {
        (Some(s), _) => s.into(),
        (None, Some(_)) => config.strategy,
        (None, None) => Strategy::ReducedCover,
    };
    let (config_epsilon, config_rounding) = match config.plan {
        ShotPlan::Budget { epsilon, rounding } => (Some(epsilon), Some(rounding)),
        _ => (None, None),
    };
    let epsilon = args.epsilon.or(config_epsilon).ok_or_else(|| {
        Error::validation(
            "no target error; pass --epsilon or configure a budget plan".to_string(),
        )
    })?;
    let policy = args
        .rounding
        .map(RoundingPolicy::from)
        .or(config_rounding)
        .unwrap_or_default();

    let set = cone::reduced_set(&problem.circuit, &problem.hamiltonian)?;
    let subs = match strategy {
        Strategy::ReducedAccuracy => group_all(&set, &problem.hamiltonian)?,
        Strategy::ReducedCover => minimal_cover(&set, &problem.hamiltonian)?,
        Strategy::Full => {
            return Err(Error::validation(
                "budget planning requires a reduced strategy".to_string(),
            )
            .into())
        }
    };
    let budget: ShotBudget = budget_all(&subs, epsilon, policy)?;

    let content = match global.format {
        Format::Csv => budget.to_csv(),
        Format::Json => {
            let entries = budget
                .entries
                .iter()
                .map(|e| PlanEntry {
                    group: e.group.clone(),
                    circuit: e.circuit_index,
                    t_beta: e.t_beta,
                    h_gamma: e.h_gamma,
                    h_max: e.h_max,
                    raw: e.raw,
                    shots: e.shots,
                })
                .collect();
            pretty(&PlanDoc {
                problem: problem.name.clone(),
                strategy,
                epsilon: budget.epsilon,
                policy: budget.policy,
                entries,
                total_shots: budget.total(),
                energy_error_bound: budget.energy_error_bound(),
            })?
        }
    };
    let ext = if global.format == Format::Csv { "csv" } else { "json" };
    emit(global, &format!("plan-{}", problem.name), ext, &content)
}

// ---------------------------------------------------------------------------
// compile
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
struct CompileDoc {
    circuit: String,
    native: bool,
    opt_level: u8,
    qubits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    before: Option<CountTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    after: Option<CountTable>,
    text: String,
}

#[derive(Serialize)]
struct CountTable {
    counts: Vec<(&'static str, usize)>,
    total: usize,
}

fn count_table(circuit: &Circuit) -> CountTable {
    CountTable {
        counts: gate_counts(circuit),
        total: circuit.len(),
    }
}

fn cmd_compile(global: &Global, args: &CompileArgs) -> anyhow::Result<()> {
    let config = load_config(global, args.source.builtin.as_deref())?;
    let problem = config.resolve_problem()?;
    let level = OptLevel::from_index(args.opt_level)?;

    let sources: Vec<(String, Circuit)> = if args.reduced {
        let set = cone::reduced_set(&problem.circuit, &problem.hamiltonian)?;
        set.representatives
            .iter()
            .enumerate()
            .map(|(i, &t)| (format!("{}-c{i}", problem.name), set.terms[t].circuit.clone()))
            .collect()
    } else {
        vec![(problem.name.clone(), problem.circuit.clone())]
    };

    let docs: Vec<CompileDoc> = sources
        .iter()
        .map(|(label, circuit)| {
            let compiled = if args.native {
                compile_native(circuit, level)
            } else {
                circuit.clone()
            };
            CompileDoc {
                circuit: label.clone(),
                native: args.native,
                opt_level: level.index(),
                qubits: compiled.qubits(),
                before: args.report.then(|| count_table(circuit)),
                after: args.report.then(|| count_table(&compiled)),
                text: compiled.to_string(),
            }
        })
        .collect();

    let content = match global.format {
        Format::Json => pretty(&docs)?,
        Format::Csv => {
            let mut out = String::from("circuit,gate,before,after\n");
            for (doc, (_, source)) in docs.iter().zip(&sources) {
                let compiled_counts = gate_counts(
                    &if args.native { compile_native(source, level) } else { source.clone() },
                );
                for ((gate, before), (_, after)) in gate_counts(source).iter().zip(compiled_counts)
                {
                    writeln!(out, "{},{},{},{}", doc.circuit, gate, before, after)?;
                }
            }
            out
        }
    };
    let ext = if global.format == Format::Csv { "csv" } else { "json" };
    emit(global, &format!("compile-{}", problem.name), ext, &content)
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

fn parse_noise(spec: &str) -> anyhow::Result<NoiseConfig> {
    match spec {
        "off" => Ok(NoiseConfig::Off),
        "default" => Ok(NoiseConfig::Default),
        path => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::validation(format!("noise model {path}: {e}")))?;
            let model: NoiseModel = serde_json::from_str(&text)
                .map_err(|e| Error::validation(format!("noise model {path}: {e}")))?;
            Ok(NoiseConfig::Model(model))
        }
    }
}

fn cmd_run(global: &Global, args: &RunArgs) -> anyhow::Result<()> {
    let mut config = load_config(global, args.source.builtin.as_deref())?;
    if let Some(strategy) = args.strategy {
        config.strategy = strategy.into();
    }
    if let Some(shots) = args.shots {
        config.plan = ShotPlan::PerCircuit { shots };
    }
    if let Some(spec) = &args.noise {
        config.noise = parse_noise(spec)?;
    }
    if args.readout_correct {
        config.readout_correct = true;
    }
    if let Some(params) = &args.params {
        config.params = Some(params.clone());
        config.optimize = None;
    }
    config.validate()?;

    let params = fixed_params(&config)?;
    let report = driver::evaluate(&config, &params)?;

    match global.format {
        Format::Json => {
            if let Some(dir) = &global.out {
                fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
                let stem = format!("{}-{}", report.problem, config.strategy.slug());
                let records_path = dir.join(format!("records-{stem}.jsonl"));
                let mut lines = String::new();
                for record in &report.records {
                    writeln!(lines, "{}", serde_json::to_string(record)?)?;
                }
                fs::write(&records_path, lines)
                    .with_context(|| format!("writing {}", records_path.display()))?;
                let report_path = dir.join(format!("report-{stem}.json"));
                fs::write(&report_path, pretty(&report)?)
                    .with_context(|| format!("writing {}", report_path.display()))?;
                println!("{}", records_path.display());
                println!("{}", report_path.display());
            } else {
                for record in &report.records {
                    println!("{}", serde_json::to_string(record)?);
                }
                print!("{}", pretty(&report)?);
            }
        }
        Format::Csv => {
            let rows = driver::convergence_rows(&config, &params)?;
            let stem = format!("{}-{}", report.problem, config.strategy.slug());
            emit(global, &format!("convergence-{stem}"), "csv", &driver::convergence_csv(&rows))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
struct ExperimentSummary {
    strategy: Strategy,
    energy: f64,
    stderr: f64,
    total_shots: u64,
    exact_energy: f64,
    delta_vs_exact: f64,
    report: String,
    convergence: String,
}

fn cmd_experiment(global: &Global, args: &ExperimentArgs) -> anyhow::Result<()> {
    let path = global.config.as_ref().ok_or_else(|| {
        Error::validation("experiment requires --config FILE".to_string())
    })?;
    let out_dir = global.out.as_ref().ok_or_else(|| {
        Error::validation("experiment requires --out DIR".to_string())
    })?;
    let mut config = ExperimentConfig::from_path(path)?;
    if let Some(seed) = global.seed {
        config.seed = seed;
    }

    let strategies: Vec<Strategy> = if args.sweep {
        vec![Strategy::Full, Strategy::ReducedAccuracy, Strategy::ReducedCover]
    } else {
        vec![args.strategy.map_or(config.strategy, Strategy::from)]
    };

    let mut summaries = Vec::with_capacity(strategies.len());
    for strategy in strategies {
        let mut cfg = config.clone();
        cfg.strategy = strategy;
        // A budget plan cannot drive the full baseline; sweep it at the
        // default per-circuit plan instead.
        if strategy == Strategy::Full && matches!(cfg.plan, ShotPlan::Budget { .. }) {
            cfg.plan = ShotPlan::default();
        }
        let artifacts = driver::run_experiment_with(&cfg, out_dir)?;
        let report = &artifacts.output.report;
        summaries.push(ExperimentSummary {
            strategy,
            energy: report.energy,
            stderr: report.stderr,
            total_shots: report.total_shots,
            exact_energy: report.exact_energy,
            delta_vs_exact: report.delta_vs_exact,
            report: artifacts.report_path.display().to_string(),
            convergence: artifacts.convergence_path.display().to_string(),
        });
    }

    match global.format {
        Format::Json => print!("{}", pretty(&summaries)?),
        Format::Csv => {
            let mut out =
                String::from("strategy,energy,stderr,total_shots,exact_energy,delta_vs_exact\n");
            for s in &summaries {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    s.strategy.slug(),
                    s.energy,
                    s.stderr,
                    s.total_shots,
                    s.exact_energy,
                    s.delta_vs_exact
                )?;
            }
            print!("{out}");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "kebab-case")]
struct CalibrateDoc {
    problem: String,
    shots_per_term: Option<u64>,
    repetitions: u64,
    epsilon: f64,
}

fn cmd_calibrate(global: &Global, args: &CalibrateArgs) -> anyhow::Result<()> {
    let mut config = load_config(global, args.source.builtin.as_deref())?;
    if let Some(shots) = args.shots {
        config.plan = ShotPlan::PerCircuit { shots };
    }
    if let Some(params) = &args.params {
        config.params = Some(params.clone());
        config.optimize = None;
    }
    config.validate()?;

    let params = fixed_params(&config)?;
    let problem: Problem = config.resolve_problem()?;
    let epsilon = driver::calibrate_epsilon(&config, &params, args.reps)?;
    let doc = CalibrateDoc {
        problem: problem.name.clone(),
        shots_per_term: match config.plan {
            ShotPlan::PerCircuit { shots } => Some(shots),
            _ => None,
        },
        repetitions: args.reps,
        epsilon,
    };

    let content = match global.format {
        Format::Json => pretty(&doc)?,
        Format::Csv => format!(
            "problem,shots_per_term,repetitions,epsilon\n{},{},{},{}\n",
            doc.problem,
            doc.shots_per_term.map_or_else(|| "exact".to_string(), |s| s.to_string()),
            doc.repetitions,
            doc.epsilon
        ),
    };
    let ext = if global.format == Format::Csv { "csv" } else { "json" };
    emit(global, &format!("calibrate-{}", doc.problem), ext, &content)
}
