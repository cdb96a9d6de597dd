//! Causal-cone circuit reduction and measurement planning for variational
//! quantum algorithms.
//!
//! The crate implements a compilation and simulation pipeline for estimating
//! Pauli-Hamiltonian expectation values ⟨H⟩ = Σ_γ h_γ ⟨P_γ⟩ from parameterized
//! circuits:
//!
//! 1. [`circuit`] — a small gate-level intermediate representation
//!    (`H`, `RX`, `RY`, `RZ`, `CNOT`, `CRY`, `XX`) with symbolic angles,
//!    a text format, and parameter binding.
//! 2. [`cone`] — past-causal-cone analysis: for each Hamiltonian term the
//!    minimal suffix-closed gate set that can influence its expectation value,
//!    computed exactly by conjugating Pauli monomials backwards through the
//!    circuit. `reduce_ansatz` turns a cone into a standalone smaller circuit.
//! 3. [`grouping`] — sub-Hamiltonian grouping (which terms are measurable from
//!    which reduced circuit), minimal circuit covers, and variance-bound shot
//!    budgets S = T·h²_max/ε².
//! 4. [`native`] — rewriting onto a trapped-ion native gate set
//!    {RX, RY, RZ, XX(θ)} with verified rewrite rules and a peephole pass.
//! 5. [`sim`] — a dense statevector simulator with exact expectations, shot
//!    sampling, stochastic Pauli noise, and readout-error correction.
//! 6. [`driver`] — end-to-end experiment orchestration: strategies, energy
//!    aggregation, calibration, and report files.
//!
//! Conventions used throughout (all fixed, all tested):
//!
//! - qubits are 0-based; statevectors are little-endian (qubit 0 is the least
//!   significant bit of the basis-state index);
//! - rotation gates are half-angle: `R_P(θ) = exp(−iθP/2)` for
//!   P ∈ {X, Y, Z, X⊗X};
//! - `CRY(θ) c t` applies `RY(θ)` to `t` when `c` is |1⟩;
//! - measurement bitstrings are written with qubit 0 rightmost.

pub mod circuit;
pub mod cone;
pub mod driver;
pub mod error;
pub mod grouping;
pub mod native;
pub mod optimize;
pub mod pauli;
pub mod problems;
pub mod scalar;
pub mod sim;

pub use circuit::{AngleExpr, BoundCircuit, Circuit, Gate, GateKind, Operands};
pub use cone::{
    build_dag, past_causal_cone, reduce_ansatz, reduced_set, CircuitDag, PackedPauli, QubitMap,
    ReducedAnsatz, ReducedSet,
};
pub use driver::{
    calibrate_epsilon, convergence_csv, convergence_rows, evaluate, evaluate_seeded,
    evaluate_with, run_experiment, run_experiment_with, variance_bound_epsilon, ConvergenceRow,
    EnergyReport, ExperimentArtifacts, ExperimentConfig, ExperimentOutput, NoiseConfig,
    OptimizeReport, OptimizerConfig, Problem, ProblemConfig, ShotPlan, Strategy, TracePoint,
    CONVERGENCE_LADDER,
};
pub use error::{Error, Result};
pub use grouping::{
    budget_all, estimate_shots, group_all, minimal_cover, total_budget, BudgetEntry,
    RoundingPolicy, ShotBudget, SubHamiltonian,
};
pub use native::{
    compile_native, gate_counts, is_native, peephole_optimize, peephole_optimize_with, rules,
    to_native, to_native_opt, verify_rules, OptLevel, PeepholeOptions, RewriteRule,
};
pub use optimize::{minimize_with_restarts, NelderMead, OptimizeOutcome};
pub use pauli::{Graph, Hamiltonian, Pauli, PauliString, PauliTerm};
pub use scalar::Scalar;
