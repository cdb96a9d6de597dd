//! Finite-shot measurement of Pauli strings.
//!
//! [`measure_string`] appends basis-change rotations (H for X; RZ(−π/2)
//! then H for Y) so the target string becomes Z-diagonal, samples bitstrings
//! (exactly when noiseless, by Monte Carlo trajectory when a [`NoiseModel`]
//! is active — the appended rotations are noisy too, as on hardware), applies
//! optional readout correction, and reduces the counts to a ±1 parity
//! estimate with error bars.
//!
//! Error bars: `stderr` is the Gaussian estimate √((1 − ê²)/S), which is 0
//! for deterministic outcomes; `wilson_low/high` carry the asymmetric
//! binomial 1σ (z = 1) Wilson interval of the even-parity probability mapped
//! to the ±1 scale.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use super::noise::{correct_distribution, NoiseModel};
use super::StateVector;
use crate::circuit::{BoundCircuit, Gate, GateKind, Operands};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Everything recorded about one term measurement on one circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    /// Caller-supplied circuit label.
    pub circuit: String,
    /// Compact term label, e.g. `X0X1`.
    pub term: String,
    /// Basis-change gates appended before sampling, in text-format lines.
    pub basis_rotations: Vec<String>,
    /// Number of sampled bitstrings.
    pub shots: u64,
    /// Bitstring counts; keys are little-endian strings with qubit 0
    /// rightmost. Keys sum to `shots`.
    pub counts: BTreeMap<String, u64>,
    /// Whether readout correction was applied to the distribution.
    pub readout_corrected: bool,
    /// Parity estimate of ⟨P⟩ in [−1, 1] (coefficient not applied).
    pub estimate: f64,
    /// Gaussian standard error of the estimate (0 when deterministic).
    pub stderr: f64,
    /// Lower end of the Wilson 1σ interval on the ±1 scale.
    pub wilson_low: f64,
    /// Upper end of the Wilson 1σ interval on the ±1 scale.
    pub wilson_high: f64,
}

/// Measure `⟨string⟩` on the state prepared by `circuit` with `shots`
/// samples.
///
/// `noise = None` samples from the exact distribution. `readout_correct`
/// applies the inverse confusion matrix of the model's readout flips (a
/// no-op without a model).
pub fn measure_string(
    label: &str,
    circuit: &BoundCircuit<f64>,
    string: &PauliString,
    shots: u64,
    noise: Option<&NoiseModel>,
    readout_correct: bool,
    rng: &mut ChaCha12Rng,
) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::validation("shots must be ≥ 1".to_string()));
    }
    let n = circuit.qubits();
    if string.min_qubits() > n {
        return Err(Error::validation(format!(
            "term {string} exceeds the {n}-qubit register"
        )));
    }
    if let Some(model) = noise {
        model.validate(n)?;
    }

    let (rotated, basis_rotations) = rotate_to_z_basis(circuit, string);
    let ideal = StateVector::simulate(&rotated)?;
    let cumulative = cumulative_distribution(&ideal.probabilities());

    let mut index_counts: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..shots {
        let mut outcome = match noise {
            Some(model) if model.p_one > 0.0 || model.p_two > 0.0 => {
                match sample_trajectory_errors(&rotated, model, rng) {
                    Some(errors) => {
                        let state = simulate_with_errors(&rotated, &errors)?;
                        draw_index(&cumulative_distribution(&state.probabilities()), rng)
                    }
                    None => draw_index(&cumulative, rng),
                }
            }
            _ => draw_index(&cumulative, rng),
        };
        if let Some(model) = noise {
            outcome = model.apply_readout(outcome, rng);
        }
        *index_counts.entry(outcome).or_insert(0) += 1;
    }

    // Empirical distribution, optionally readout-corrected.
    let mut distribution = vec![0.0f64; 1usize << n];
    for (&idx, &count) in &index_counts {
        distribution[idx as usize] = count as f64 / shots as f64;
    }
    let mut corrected = false;
    if readout_correct {
        if let Some(model) = noise {
            correct_distribution(&mut distribution, &model.readout_flip)?;
            corrected = true;
        }
    }

    let support_mask: u64 = string.support().iter().map(|&q| 1u64 << q).sum();
    let estimate = parity_expectation(&distribution, support_mask);
    let stderr = ((1.0 - estimate * estimate).max(0.0) / shots as f64).sqrt();
    let p_plus = ((estimate + 1.0) / 2.0).clamp(0.0, 1.0);
    let (wilson_low, wilson_high) = wilson_interval(p_plus, shots);

    let counts = index_counts
        .into_iter()
        .map(|(idx, count)| (format_bitstring(idx, n), count))
        .collect();

    Ok(MeasurementRecord {
        circuit: label.to_string(),
        term: string.label(),
        basis_rotations,
        shots,
        counts,
        readout_corrected: corrected,
        estimate,
        stderr,
        wilson_low,
        wilson_high,
    })
}

/// Append the basis-change rotations for `string` to a copy of `circuit`.
fn rotate_to_z_basis(
    circuit: &BoundCircuit<f64>,
    string: &PauliString,
) -> (BoundCircuit<f64>, Vec<String>) {
    let mut gates: Vec<Gate<f64>> = circuit.gates().to_vec();
    let mut rendered = Vec::new();
    let half_pi = std::f64::consts::FRAC_PI_2;
    for &(q, p) in string.factors() {
        match p {
            Pauli::Z => {}
            Pauli::X => {
                gates.push(Gate {
                    kind: GateKind::H,
                    operands: Operands::One([q]),
                });
                rendered.push(format!("H {q}"));
            }
            Pauli::Y => {
                gates.push(Gate {
                    kind: GateKind::RZ(-half_pi),
                    operands: Operands::One([q]),
                });
                gates.push(Gate {
                    kind: GateKind::H,
                    operands: Operands::One([q]),
                });
                rendered.push(format!("RZ({}) {q}", -half_pi));
                rendered.push(format!("H {q}"));
            }
        }
    }
    (
        BoundCircuit::from_parts(circuit.qubits(), gates),
        rendered,
    )
}

/// Pauli letters injected after each listed gate index of one trajectory.
type TrajectoryErrors = Vec<(usize, Vec<(usize, Pauli)>)>;

/// Draw the per-gate depolarizing errors of one trajectory.
///
/// Returns `None` for the (common) error-free trajectory so the caller can
/// reuse the cached ideal distribution.
fn sample_trajectory_errors(
    circuit: &BoundCircuit<f64>,
    model: &NoiseModel,
    rng: &mut ChaCha12Rng,
) -> Option<TrajectoryErrors> {
    let mut errors = Vec::new();
    for (i, gate) in circuit.gates().iter().enumerate() {
        if let Some(paulis) = model.sample_gate_error(gate.qubits(), rng) {
            errors.push((i, paulis));
        }
    }
    (!errors.is_empty()).then_some(errors)
}

/// Simulate one trajectory, injecting each error after its gate.
fn simulate_with_errors(
    circuit: &BoundCircuit<f64>,
    errors: &[(usize, Vec<(usize, Pauli)>)],
) -> Result<StateVector<f64>> {
    let mut state = StateVector::zero(circuit.qubits())?;
    let mut next_error = errors.iter().peekable();
    for (i, gate) in circuit.gates().iter().enumerate() {
        state.apply(gate);
        while next_error.peek().is_some_and(|(at, _)| *at == i) {
            let (_, paulis) = next_error.next().expect("peeked");
            for &(q, p) in paulis {
                state.apply_pauli(q, p);
            }
        }
    }
    Ok(state)
}

fn cumulative_distribution(probs: &[f64]) -> Vec<f64> {
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut total = 0.0;
    for &p in probs {
        total += p;
        cumulative.push(total);
    }
    cumulative
}

fn draw_index(cumulative: &[f64], rng: &mut impl Rng) -> u64 {
    let total = *cumulative.last().expect("non-empty distribution");
    let u: f64 = rng.gen::<f64>() * total;
    cumulative.partition_point(|&c| c <= u) as u64
}

/// ⟨Z-string⟩ over a distribution: +1 for even parity on the support, −1 odd.
fn parity_expectation(distribution: &[f64], support_mask: u64) -> f64 {
    distribution
        .iter()
        .enumerate()
        .map(|(b, &p)| {
            let parity = (b as u64 & support_mask).count_ones() % 2;
            if parity == 0 {
                p
            } else {
                -p
            }
        })
        .sum()
}

/// Wilson 1σ (z = 1) interval for the even-parity probability, mapped onto
/// the ±1 expectation scale.
fn wilson_interval(p_plus: f64, shots: u64) -> (f64, f64) {
    let n = shots as f64;
    let denom = 1.0 + 1.0 / n;
    let center = (p_plus + 1.0 / (2.0 * n)) / denom;
    let half = ((p_plus * (1.0 - p_plus) / n + 1.0 / (4.0 * n * n)).sqrt()) / denom;
    (
        2.0 * (center - half) - 1.0,
        2.0 * (center + half) - 1.0,
    )
}

fn format_bitstring(index: u64, qubits: usize) -> String {
    (0..qubits)
        .rev()
        .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}
