//! Experiment orchestration: configs, strategy routing, energy reports,
//! parameter optimization, ε calibration, and report files.
//!
//! A run is described by an [`ExperimentConfig`] (JSON on disk). The driver
//! resolves the problem (builtin benchmark or circuit + Hamiltonian files),
//! routes every non-identity term onto a prepared circuit per the chosen
//! [`Strategy`], draws finite-shot estimates through the simulator, and
//! aggregates them into an [`EnergyReport`]:
//!
//! `energy = identity coefficient + Σ owned-term coefficient × estimate`
//!
//! with the standard error Gaussian-propagated across records. Exact
//! per-term expectations ride along so reports carry the bias versus the
//! in-silico value.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{BoundCircuit, Circuit};
use crate::cone::reduced_set;
use crate::error::{Error, Result};
use crate::grouping::{budget_all, group_all, minimal_cover, RoundingPolicy, SubHamiltonian};
use crate::optimize::NelderMead;
use crate::pauli::{Hamiltonian, PauliString};
use crate::problems;
use crate::sim::{measure_string, MeasurementRecord, NoiseModel, StateVector};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Which circuits measure which terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Every term on the unreduced circuit (baseline).
    #[default]
    Full,
    /// Every term on its own cone circuit (best accuracy).
    ReducedAccuracy,
    /// A minimum set of cone circuits covering all terms (fewest settings).
    ReducedCover,
}

impl Strategy {
    /// File-name-friendly identifier.
    pub fn slug(self) -> &'static str {
        match self {
            Strategy::Full => "full",
            Strategy::ReducedAccuracy => "reduced-accuracy",
            Strategy::ReducedCover => "reduced-cover",
        }
    }
}

/// How many samples each measured term receives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShotPlan {
    /// No sampling: estimates are exact expectations (the shots → ∞ limit).
    Exact,
    /// The same fixed count for every measured term.
    PerCircuit {
        /// Samples per measured term.
        shots: u64,
    },
    /// Variance-bound planning: each term gets its sub-Hamiltonian's
    /// S_β = T_β·h²_max/ε² (reduced strategies only).
    Budget {
        /// Target 1σ error per sub-Hamiltonian.
        epsilon: f64,
        /// Integer rounding of the raw counts.
        #[serde(default)]
        rounding: RoundingPolicy,
    },
}

impl Default for ShotPlan {
    fn default() -> Self {
        ShotPlan::PerCircuit { shots: 5000 }
    }
}

/// Noise applied during sampling.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseConfig {
    /// Noiseless sampling.
    #[default]
    Off,
    /// The built-in trapped-ion-like model, sized per prepared circuit.
    Default,
    /// An explicit model; `readout_flip` must span the full register and is
    /// projected onto each reduced circuit's kept qubits.
    Model(NoiseModel),
}

/// What to run on: a builtin benchmark or files.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ProblemConfig {
    /// `"deuteron"` or `"dragon"`.
    #[serde(default)]
    pub builtin: Option<String>,
    /// Circuit file in the text format (requires `hamiltonian`).
    #[serde(default)]
    pub circuit: Option<PathBuf>,
    /// Hamiltonian file in the text format (requires `circuit`).
    #[serde(default)]
    pub hamiltonian: Option<PathBuf>,
    /// QAOA layer count for the dragon builtin (default 1).
    #[serde(default)]
    pub qaoa_layers: Option<usize>,
}

/// Simplex optimizer settings (all optional in JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct OptimizerConfig {
    /// Starting vertex for the first descent (random when absent).
    pub initial: Option<Vec<f64>>,
    /// Initial simplex edge length.
    pub scale: f64,
    /// Iteration budget per descent.
    pub max_iters: usize,
    /// Simplex value-spread convergence tolerance.
    pub tolerance: f64,
    /// Number of descents (first from `initial` when given, rest random).
    pub restarts: usize,
    /// Contraction coefficient ρ.
    pub contraction: f64,
    /// Shrink coefficient σ.
    pub shrink: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            initial: None,
            scale: 0.5,
            max_iters: 600,
            tolerance: 1e-10,
            restarts: 4,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

impl OptimizerConfig {
    fn settings(&self) -> NelderMead {
        NelderMead {
            max_iters: self.max_iters,
            initial_step: self.scale,
            f_tol: self.tolerance,
            x_tol: 1e-8,
            contraction: self.contraction,
            shrink: self.shrink,
        }
    }
}

/// A complete experiment description (the `--config` JSON document).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    /// What to run on.
    pub problem: ProblemConfig,
    /// Which circuits measure which terms.
    #[serde(default)]
    pub strategy: Strategy,
    /// How many samples each measured term receives.
    #[serde(default)]
    pub plan: ShotPlan,
    /// Noise applied during sampling.
    #[serde(default)]
    pub noise: NoiseConfig,
    /// Base RNG seed; record `i` of an evaluation uses stream `i`.
    #[serde(default)]
    pub seed: u64,
    /// Apply inverse-confusion readout correction to sampled distributions.
    #[serde(default)]
    pub readout_correct: bool,
    /// Fixed-point mode: evaluate at these parameters.
    #[serde(default)]
    pub params: Option<Vec<f64>>,
    /// Optimize mode: tune parameters before reporting.
    #[serde(default)]
    pub optimize: Option<OptimizerConfig>,
}

impl ExperimentConfig {
    /// Parse a JSON config string and validate it.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Load a JSON config file; diagnostics carry the path, and relative
    /// problem file paths are resolved against the config's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::validation(format!("config {}: {e}", path.display())))?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::validation(format!("config {}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            for p in [&mut config.problem.circuit, &mut config.problem.hamiltonian]
                .into_iter()
                .flatten()
            {
                if p.is_relative() {
                    *p = dir.join(&p);
                }
            }
        }
        config
            .validate()
            .map_err(|e| Error::validation(format!("config {}: {e}", path.display())))?;
        Ok(config)
    }

    /// Check the cross-field invariants.
    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        match (&p.builtin, &p.circuit, &p.hamiltonian) {
            (Some(name), None, None) => {
                if name != "deuteron" && name != "dragon" {
                    return Err(Error::validation(format!(
                        "unknown builtin problem `{name}` (expected `deuteron` or `dragon`)"
                    )));
                }
                if p.qaoa_layers.is_some() && name != "dragon" {
                    return Err(Error::validation(
                        "qaoa-layers applies only to the dragon builtin".to_string(),
                    ));
                }
                if p.qaoa_layers == Some(0) {
                    return Err(Error::validation("qaoa-layers must be ≥ 1".to_string()));
                }
            }
            (None, Some(_), Some(_)) => {
                if p.qaoa_layers.is_some() {
                    return Err(Error::validation(
                        "qaoa-layers applies only to the dragon builtin".to_string(),
                    ));
                }
            }
            _ => {
                return Err(Error::validation(
                    "problem must be either a builtin name or a circuit plus hamiltonian file"
                        .to_string(),
                ));
            }
        }
        match self.plan {
            ShotPlan::PerCircuit { shots: 0 } => {
                return Err(Error::validation("shots must be ≥ 1".to_string()));
            }
            ShotPlan::Budget { epsilon, .. } if !(epsilon > 0.0 && epsilon.is_finite()) => {
                return Err(Error::validation(format!(
                    "budget epsilon must be positive and finite, got {epsilon}"
                )));
            }
            ShotPlan::Budget { .. } if self.strategy == Strategy::Full => {
                return Err(Error::validation(
                    "budget planning requires a reduced strategy".to_string(),
                ));
            }
            ShotPlan::Exact if self.noise != NoiseConfig::Off => {
                return Err(Error::validation(
                    "the exact plan is noiseless; set noise to `off`".to_string(),
                ));
            }
            _ => {}
        }
        match (&self.params, &self.optimize) {
            (Some(_), None) | (None, Some(_)) => Ok(()),
            (Some(_), Some(_)) => Err(Error::validation(
                "params and optimize are mutually exclusive".to_string(),
            )),
            (None, None) => Err(Error::validation(
                "either params (fixed-point mode) or optimize must be given".to_string(),
            )),
        }
    }

    /// Build the circuit and Hamiltonian this config runs on.
    pub fn resolve_problem(&self) -> Result<Problem> {
        let p = &self.problem;
        if let Some(name) = &p.builtin {
            return match name.as_str() {
                "deuteron" => Ok(Problem {
                    name: "deuteron".to_string(),
                    circuit: problems::deuteron_ansatz(),
                    hamiltonian: problems::deuteron_hamiltonian(),
                }),
                "dragon" => {
                    let layers = p.qaoa_layers.unwrap_or(1);
                    Ok(Problem {
                        name: "dragon".to_string(),
                        circuit: problems::qaoa_ansatz(&problems::dragon_graph(), layers),
                        hamiltonian: problems::dragon_hamiltonian(),
                    })
                }
                other => Err(Error::validation(format!(
                    "unknown builtin problem `{other}`"
                ))),
            };
        }
        let (circuit_path, h_path) = match (&p.circuit, &p.hamiltonian) {
            (Some(c), Some(h)) => (c, h),
            _ => {
                return Err(Error::validation(
                    "problem must be either a builtin name or a circuit plus hamiltonian file"
                        .to_string(),
                ))
            }
        };
        let circuit_text = fs::read_to_string(circuit_path)
            .map_err(|e| Error::validation(format!("circuit {}: {e}", circuit_path.display())))?;
        let circuit = Circuit::parse(&circuit_text)
            .map_err(|e| Error::validation(format!("circuit {}: {e}", circuit_path.display())))?;
        let h_text = fs::read_to_string(h_path)
            .map_err(|e| Error::validation(format!("hamiltonian {}: {e}", h_path.display())))?;
        let hamiltonian = Hamiltonian::parse(&h_text)
            .map_err(|e| Error::validation(format!("hamiltonian {}: {e}", h_path.display())))?;
        let name = circuit_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "problem".to_string());
        Ok(Problem {
            name,
            circuit,
            hamiltonian,
        })
    }
}

/// A resolved problem: the ansatz and the observable.
#[derive(Debug, Clone)]
pub struct Problem {
    /// Display name (builtin name or circuit file stem).
    pub name: String,
    /// The unreduced parameterized ansatz.
    pub circuit: Circuit<f64>,
    /// The measured Hamiltonian.
    pub hamiltonian: Hamiltonian<f64>,
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Everything an energy evaluation produces.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    /// Problem display name.
    pub problem: String,
    /// Routing strategy used.
    pub strategy: Strategy,
    /// Parameters the circuits were bound at.
    pub params: Vec<f64>,
    /// Base seed of the record streams.
    pub seed: u64,
    /// Distinct prepared circuits.
    pub circuits: usize,
    /// Identity coefficient plus Σ coefficient × estimate over owned terms.
    pub energy: f64,
    /// Gaussian-propagated 1σ error: √(Σ coefficient²·stderr²).
    pub stderr: f64,
    /// Σ shots over all records (0 under the exact plan).
    pub total_shots: u64,
    /// In-silico energy at the same parameters (noiseless expectation).
    pub exact_energy: f64,
    /// `energy − exact_energy`.
    pub delta_vs_exact: f64,
    /// Per-term measurement records (empty under the exact plan).
    pub records: Vec<MeasurementRecord>,
}

/// One term routed onto one prepared circuit.
struct Task {
    /// Record label (the owning group's naming label, or `full`).
    label: String,
    /// Term label in the original register (what reports key on).
    original: String,
    /// Index into the prepared-circuit list.
    circuit_key: usize,
    /// Measurement string in the prepared circuit's labels.
    string: PauliString,
    /// Term coefficient.
    coefficient: f64,
    /// Planned samples (`None` under the exact plan).
    shots: Option<u64>,
}

/// A prepared circuit: bound gates plus the original labels of its wires
/// (for noise projection).
struct PreparedCircuit {
    bound: BoundCircuit<f64>,
    originals: Vec<usize>,
}

struct Worklist {
    circuits: Vec<PreparedCircuit>,
    tasks: Vec<Task>,
    identity: f64,
}

/// Per-term outcome, kept alongside the public record for exact deltas.
struct Outcome {
    term: String,
    group: String,
    coefficient: f64,
    estimate: f64,
    stderr: f64,
    exact: f64,
    shots: u64,
    record: Option<MeasurementRecord>,
}

fn named_params(circuit: &Circuit<f64>, params: &[f64]) -> Result<HashMap<String, f64>> {
    let names = circuit.parameters();
    if names.len() != params.len() {
        return Err(Error::validation(format!(
            "expected {} parameters ({}), got {}",
            names.len(),
            names.join(", "),
            params.len()
        )));
    }
    Ok(names.into_iter().zip(params.iter().copied()).collect())
}

fn bind_row(row: &Circuit<f64>, all: &HashMap<String, f64>) -> Result<BoundCircuit<f64>> {
    let filtered: HashMap<String, f64> = row
        .parameters()
        .into_iter()
        .map(|name| {
            let value = *all
                .get(&name)
                .ok_or_else(|| Error::validation(format!("missing parameter `{name}`")))?;
            Ok((name, value))
        })
        .collect::<Result<_>>()?;
    row.bind_named(&filtered)
}

fn plan_shots_per_term(plan: ShotPlan, row_budget: Option<u64>) -> Option<u64> {
    match plan {
        ShotPlan::Exact => None,
        ShotPlan::PerCircuit { shots } => Some(shots),
        ShotPlan::Budget { .. } => Some(row_budget.expect("budgeted row")),
    }
}

/// Route every non-identity term onto a prepared circuit.
fn build_worklist(
    problem: &Problem,
    strategy: Strategy,
    plan: ShotPlan,
    params: &[f64],
) -> Result<Worklist> {
    let all = named_params(&problem.circuit, params)?;
    let identity = problem.hamiltonian.identity_coefficient();
    let mut circuits = Vec::new();
    let mut tasks = Vec::new();

    match strategy {
        Strategy::Full => {
            if matches!(plan, ShotPlan::Budget { .. }) {
                return Err(Error::validation(
                    "budget planning requires a reduced strategy".to_string(),
                ));
            }
            circuits.push(PreparedCircuit {
                bound: problem.circuit.bind_named(&all)?,
                originals: (0..problem.circuit.qubits()).collect(),
            });
            for term in problem.hamiltonian.non_identity_terms() {
                tasks.push(Task {
                    label: "full".to_string(),
                    original: term.string.label(),
                    circuit_key: 0,
                    string: term.string.clone(),
                    coefficient: term.coefficient,
                    shots: plan_shots_per_term(plan, None),
                });
            }
        }
        Strategy::ReducedAccuracy | Strategy::ReducedCover => {
            let set = reduced_set(&problem.circuit, &problem.hamiltonian)?;
            let rows: Vec<SubHamiltonian<f64>> = match strategy {
                Strategy::ReducedAccuracy => group_all(&set, &problem.hamiltonian)?,
                _ => minimal_cover(&set, &problem.hamiltonian)?,
            };
            let row_shots: Vec<Option<u64>> = match plan {
                ShotPlan::Budget { epsilon, rounding } => {
                    budget_all(&rows, epsilon, rounding)?
                        .entries
                        .iter()
                        .map(|e| Some(e.shots))
                        .collect()
                }
                _ => vec![None; rows.len()],
            };
            for (row, budget) in rows.iter().zip(row_shots) {
                let key = circuits.len();
                circuits.push(PreparedCircuit {
                    bound: bind_row(&row.circuit, &all)?,
                    originals: row.relabel.originals().to_vec(),
                });
                for term in row.owned_terms() {
                    let relabeled = term
                        .string
                        .relabeled(|q| {
                            row.relabel
                                .reduced_of(q)
                                .expect("owned term acts on kept qubits")
                        })?;
                    tasks.push(Task {
                        label: row.group_label(),
                        original: term.string.label(),
                        circuit_key: key,
                        string: relabeled,
                        coefficient: term.coefficient,
                        shots: plan_shots_per_term(plan, budget),
                    });
                }
            }
        }
    }
    Ok(Worklist {
        circuits,
        tasks,
        identity,
    })
}

/// Noise model for one prepared circuit, projecting a full-register model
/// onto the circuit's kept qubits.
fn noise_for(
    noise: &NoiseConfig,
    full_qubits: usize,
    prepared: &PreparedCircuit,
) -> Result<Option<NoiseModel>> {
    match noise {
        NoiseConfig::Off => Ok(None),
        NoiseConfig::Default => Ok(Some(NoiseModel::default_for(prepared.bound.qubits()))),
        NoiseConfig::Model(model) => {
            if model.readout_flip.len() != full_qubits {
                return Err(Error::validation(format!(
                    "noise model readout_flip has {} entries for a {}-qubit register",
                    model.readout_flip.len(),
                    full_qubits
                )));
            }
            Ok(Some(NoiseModel {
                p_one: model.p_one,
                p_two: model.p_two,
                readout_flip: prepared
                    .originals
                    .iter()
                    .map(|&q| model.readout_flip[q])
                    .collect(),
            }))
        }
    }
}

fn run_tasks(
    problem: &Problem,
    config: &ExperimentConfig,
    params: &[f64],
    base_seed: u64,
    plan: ShotPlan,
) -> Result<(Vec<Outcome>, f64, usize)> {
    let worklist = build_worklist(problem, config.strategy, plan, params)?;
    let states: Vec<StateVector<f64>> = worklist
        .circuits
        .iter()
        .map(|c| StateVector::simulate(&c.bound))
        .collect::<Result<_>>()?;
    let noise_models: Vec<Option<NoiseModel>> = worklist
        .circuits
        .iter()
        .map(|c| noise_for(&config.noise, problem.circuit.qubits(), c))
        .collect::<Result<_>>()?;

    let mut outcomes = Vec::with_capacity(worklist.tasks.len());
    for (i, task) in worklist.tasks.iter().enumerate() {
        let exact = states[task.circuit_key].expectation(&task.string)?;
        let outcome = match task.shots {
            None => Outcome {
                term: task.original.clone(),
                group: task.label.clone(),
                coefficient: task.coefficient,
                estimate: exact,
                stderr: 0.0,
                exact,
                shots: 0,
                record: None,
            },
            Some(shots) => {
                let prepared = &worklist.circuits[task.circuit_key];
                let mut rng = ChaCha12Rng::seed_from_u64(base_seed);
                rng.set_stream(i as u64);
                let mut record = measure_string(
                    &task.label,
                    &prepared.bound,
                    &task.string,
                    shots,
                    noise_models[task.circuit_key].as_ref(),
                    config.readout_correct,
                    &mut rng,
                )?;
                // Key the record by the term's original-register label; the
                // counts and basis rotations stay in the prepared circuit's
                // wire labels.
                record.term = task.original.clone();
                Outcome {
                    term: task.original.clone(),
                    group: task.label.clone(),
                    coefficient: task.coefficient,
                    estimate: record.estimate,
                    stderr: record.stderr,
                    exact,
                    shots,
                    record: Some(record),
                }
            }
        };
        outcomes.push(outcome);
    }
    Ok((outcomes, worklist.identity, worklist.circuits.len()))
}

fn assemble_report(
    problem: &Problem,
    config: &ExperimentConfig,
    params: &[f64],
    base_seed: u64,
    outcomes: Vec<Outcome>,
    identity: f64,
    circuits: usize,
) -> EnergyReport {
    let mut energy = identity;
    let mut exact_energy = identity;
    let mut variance = 0.0;
    let mut total_shots = 0;
    let mut records = Vec::new();
    for outcome in outcomes {
        energy += outcome.coefficient * outcome.estimate;
        exact_energy += outcome.coefficient * outcome.exact;
        variance += outcome.coefficient * outcome.coefficient * outcome.stderr * outcome.stderr;
        total_shots += outcome.shots;
        if let Some(record) = outcome.record {
            records.push(record);
        }
    }
    EnergyReport {
        problem: problem.name.clone(),
        strategy: config.strategy,
        params: params.to_vec(),
        seed: base_seed,
        circuits,
        energy,
        stderr: variance.sqrt(),
        total_shots,
        exact_energy,
        delta_vs_exact: energy - exact_energy,
        records,
    }
}

/// Evaluate the energy at `params` per the config (seed = `config.seed`).
pub fn evaluate(config: &ExperimentConfig, params: &[f64]) -> Result<EnergyReport> {
    evaluate_seeded(config, params, config.seed)
}

/// Evaluate with an explicit base seed (repetition `r` of a calibration run
/// uses `config.seed + r`).
pub fn evaluate_seeded(
    config: &ExperimentConfig,
    params: &[f64],
    base_seed: u64,
) -> Result<EnergyReport> {
    config.validate_evaluation()?;
    let problem = config.resolve_problem()?;
    evaluate_with(&problem, config, params, base_seed)
}

impl ExperimentConfig {
    /// The validation subset an energy evaluation needs (the params/optimize
    /// mode exclusivity is irrelevant when parameters are passed directly).
    fn validate_evaluation(&self) -> Result<()> {
        let mut probe = self.clone();
        probe.optimize = None;
        probe.params = Some(Vec::new());
        probe.validate()
    }
}

/// Evaluate against an already-resolved problem (the config's own problem
/// field is ignored). Useful for programmatic problems without files.
pub fn evaluate_with(
    problem: &Problem,
    config: &ExperimentConfig,
    params: &[f64],
    base_seed: u64,
) -> Result<EnergyReport> {
    let (outcomes, identity, circuits) =
        run_tasks(problem, config, params, base_seed, config.plan)?;
    Ok(assemble_report(
        problem, config, params, base_seed, outcomes, identity, circuits,
    ))
}

// ---------------------------------------------------------------------------
// Optimization
// ---------------------------------------------------------------------------

/// One improvement during a descent.
#[derive(Debug, Clone, Serialize)]
pub struct TracePoint {
    /// Objective evaluations consumed when the improvement appeared.
    pub evaluation: usize,
    /// The improved energy.
    pub energy: f64,
    /// The parameters that produced it.
    pub params: Vec<f64>,
}

/// Result of [`optimize`].
#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    /// Best parameters found.
    pub params: Vec<f64>,
    /// Energy at the best parameters.
    pub energy: f64,
    /// Total objective evaluations across restarts.
    pub evaluations: usize,
    /// Iterations of the best descent.
    pub iterations: usize,
    /// Whether the best descent converged within its budget (a `false`
    /// means the iteration budget ran out and this is the best-so-far).
    pub converged: bool,
    /// Best-so-far improvements in evaluation order.
    pub trace: Vec<TracePoint>,
}

/// Tune parameters by simplex descent on `evaluate(config, ·)`.
///
/// The objective is deterministic for a fixed config seed (identical
/// parameter vectors redraw identical samples), which keeps the descent
/// well-defined under shot noise.
pub fn optimize(config: &ExperimentConfig) -> Result<OptimizeReport> {
    config.validate()?;
    let settings_config = config.optimize.clone().ok_or_else(|| {
        Error::validation("optimize mode requires optimizer settings".to_string())
    })?;
    let problem = config.resolve_problem()?;
    let dim = problem.circuit.parameters().len();
    if let Some(initial) = &settings_config.initial {
        if initial.len() != dim {
            return Err(Error::validation(format!(
                "initial vertex has {} entries for {} parameters",
                initial.len(),
                dim
            )));
        }
    }
    // Validate the evaluation path once, with errors propagated.
    let probe = settings_config.initial.clone().unwrap_or_else(|| vec![0.0; dim]);
    evaluate_with(&problem, config, &probe, config.seed)?;

    let mut evaluations = 0usize;
    let mut best_seen = f64::INFINITY;
    let mut trace = Vec::new();
    let objective = |p: &[f64]| {
        evaluations += 1;
        let report = evaluate_with(&problem, config, p, config.seed)
            .expect("evaluation path validated above");
        if report.energy < best_seen {
            best_seen = report.energy;
            trace.push(TracePoint {
                evaluation: evaluations,
                energy: report.energy,
                params: p.to_vec(),
            });
        }
        report.energy
    };

    let outcome = settings_config.settings().minimize_with_restarts(
        objective,
        dim,
        settings_config.initial.as_deref(),
        settings_config.restarts,
        config.seed,
        -std::f64::consts::PI,
        std::f64::consts::PI,
    );
    Ok(OptimizeReport {
        params: outcome.params,
        energy: outcome.value,
        evaluations,
        iterations: outcome.iterations,
        converged: outcome.converged,
        trace,
    })
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

/// Empirical 1σ error of the full-strategy total energy over repeated
/// evaluations at `params` (repetition `r` reseeds with `config.seed + r`).
///
/// This is the paper-style ε source: run the unreduced ansatz, take the
/// standard error, and feed it to the shot planner.
pub fn calibrate_epsilon(
    config: &ExperimentConfig,
    params: &[f64],
    repetitions: u64,
) -> Result<f64> {
    if repetitions < 2 {
        return Err(Error::validation(
            "calibration needs at least 2 repetitions".to_string(),
        ));
    }
    if config.strategy != Strategy::Full {
        return Err(Error::validation(
            "calibration runs on the full strategy".to_string(),
        ));
    }
    let energies: Vec<f64> = (0..repetitions)
        .map(|r| Ok(evaluate_seeded(config, params, config.seed + r)?.energy))
        .collect::<Result<_>>()?;
    Ok(sample_stddev(&energies))
}

/// Sample standard deviation (n − 1 denominator).
fn sample_stddev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// The 1σ energy error the variance bound guarantees for one
/// sub-Hamiltonian measured with `shots` samples: √(T_β·h²_max/S).
pub fn variance_bound_epsilon(t_beta: usize, h_max: f64, shots: u64) -> f64 {
    (t_beta as f64 * h_max * h_max / shots as f64).sqrt()
}

// ---------------------------------------------------------------------------
// Convergence tables and report files
// ---------------------------------------------------------------------------

/// Shot ladder of the convergence tables.
pub const CONVERGENCE_LADDER: [u64; 6] = [100, 200, 500, 1000, 2000, 5000];

/// One convergence-table row: a term (or the total) at one shot count.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    /// Samples per measured term at this ladder point.
    pub shots: u64,
    /// Owning group label (`total` on total rows).
    pub group: String,
    /// Term label (`TOTAL` on total rows).
    pub term: String,
    /// Term coefficient (1 on total rows).
    pub coefficient: f64,
    /// Sampled estimate (total energy on total rows).
    pub estimate: f64,
    /// In-silico value.
    pub exact: f64,
    /// |estimate − exact|.
    pub abs_delta: f64,
    /// Gaussian 1σ of the estimate.
    pub stderr: f64,
}

/// Sweep the shot ladder at fixed parameters: per-term estimates, in-silico
/// deltas, and the total energy, one block per ladder point. Ladder point
/// `i` reseeds with `config.seed + 101 + i` so points are independent draws.
pub fn convergence_rows(
    config: &ExperimentConfig,
    params: &[f64],
) -> Result<Vec<ConvergenceRow>> {
    config.validate_evaluation()?;
    let problem = config.resolve_problem()?;
    let mut rows = Vec::new();
    for (i, &shots) in CONVERGENCE_LADDER.iter().enumerate() {
        let plan = ShotPlan::PerCircuit { shots };
        let base_seed = config.seed + 101 + i as u64;
        let (outcomes, identity, _) = run_tasks(&problem, config, params, base_seed, plan)?;
        let mut energy = identity;
        let mut exact_energy = identity;
        let mut variance = 0.0;
        for outcome in &outcomes {
            energy += outcome.coefficient * outcome.estimate;
            exact_energy += outcome.coefficient * outcome.exact;
            variance += outcome.coefficient * outcome.coefficient * outcome.stderr * outcome.stderr;
            rows.push(ConvergenceRow {
                shots,
                group: outcome.group.clone(),
                term: outcome.term.clone(),
                coefficient: outcome.coefficient,
                estimate: outcome.estimate,
                exact: outcome.exact,
                abs_delta: (outcome.estimate - outcome.exact).abs(),
                stderr: outcome.stderr,
            });
        }
        rows.push(ConvergenceRow {
            shots,
            group: "total".to_string(),
            term: "TOTAL".to_string(),
            coefficient: 1.0,
            estimate: energy,
            exact: exact_energy,
            abs_delta: (energy - exact_energy).abs(),
            stderr: variance.sqrt(),
        });
    }
    Ok(rows)
}

/// Render convergence rows as CSV.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("shots,group,term,coefficient,estimate,exact,abs_delta,stderr\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.shots, r.group, r.term, r.coefficient, r.estimate, r.exact, r.abs_delta, r.stderr
        ));
    }
    out
}

/// The JSON document an experiment writes.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutput {
    /// Optimization result (optimize mode only).
    pub optimization: Option<OptimizeReport>,
    /// The energy report at the final parameters.
    pub report: EnergyReport,
}

/// Where an experiment landed on disk.
#[derive(Debug, Clone)]
pub struct ExperimentArtifacts {
    /// JSON report path.
    pub report_path: PathBuf,
    /// Convergence CSV path.
    pub convergence_path: PathBuf,
    /// The written report.
    pub output: ExperimentOutput,
}

/// End-to-end experiment: load the config, find parameters (fixed or
/// optimized), evaluate, and write `report-…json` plus `convergence-…csv`
/// into `out_dir`.
pub fn run_experiment(config_path: &Path, out_dir: &Path) -> Result<ExperimentArtifacts> {
    let config = ExperimentConfig::from_path(config_path)?;
    run_experiment_with(&config, out_dir)
}

/// [`run_experiment`] on an already-loaded config.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ExperimentArtifacts> {
    config.validate()?;
    let problem = config.resolve_problem()?;
    let optimization = if config.optimize.is_some() {
        Some(optimize(config)?)
    } else {
        None
    };
    let params: Vec<f64> = match (&config.params, &optimization) {
        (Some(p), _) => p.clone(),
        (None, Some(o)) => o.params.clone(),
        (None, None) => unreachable!("validate() demands one mode"),
    };
    let report = evaluate_with(&problem, config, &params, config.seed)?;
    let rows = convergence_rows(config, &params)?;

    fs::create_dir_all(out_dir)?;
    let stem = format!("{}-{}", slugify(&problem.name), config.strategy.slug());
    let report_path = out_dir.join(format!("report-{stem}.json"));
    let convergence_path = out_dir.join(format!("convergence-{stem}.csv"));
    let output = ExperimentOutput {
        optimization,
        report,
    };
    fs::write(&report_path, serde_json::to_string_pretty(&output)?)?;
    fs::write(&convergence_path, convergence_csv(&rows))?;
    Ok(ExperimentArtifacts {
        report_path,
        convergence_path,
        output,
    })
}

fn slugify(name: &str) -> String {
    let slug: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect();
    let trimmed = slug.trim_matches('-');
    if trimmed.is_empty() {
        "problem".to_string()
    } else {
        trimmed.to_string()
    }
}
