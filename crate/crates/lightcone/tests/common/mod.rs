//! Shared randomized-input generators for the integration suites.

use lightcone::circuit::SymbolicGate;
use lightcone::pauli::{Pauli, PauliString};
use lightcone::Circuit;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

const TAU: f64 = std::f64::consts::TAU;

/// A random canonical circuit with literal angles in [−2π, 2π).
///
/// Draws uniformly over the canonical gate set; two-qubit gates pick
/// distinct wires. `qubits` must be ≥ 2.
pub fn random_circuit(rng: &mut ChaCha12Rng, qubits: usize, gates: usize) -> Circuit {
    assert!(qubits >= 2, "two-qubit gates need at least two wires");
    let mut out = Circuit::new(qubits);
    for _ in 0..gates {
        let q = rng.gen_range(0..qubits);
        let mut other = rng.gen_range(0..qubits - 1);
        if other >= q {
            other += 1;
        }
        let angle = rng.gen_range(-TAU..TAU);
        let gate = match rng.gen_range(0..7) {
            0 => SymbolicGate::h(q),
            1 => SymbolicGate::rx(angle, q),
            2 => SymbolicGate::ry(angle, q),
            3 => SymbolicGate::rz(angle, q),
            4 => SymbolicGate::cnot(q, other),
            5 => SymbolicGate::cry(angle, q, other),
            _ => SymbolicGate::xx(angle, q, other),
        };
        out.push(gate).expect("operands validated by construction");
    }
    out
}

/// A random non-identity Pauli string on a register of `qubits` wires.
pub fn random_pauli_string(rng: &mut ChaCha12Rng, qubits: usize) -> PauliString {
    loop {
        let factors: Vec<(usize, Pauli)> = (0..qubits)
            .filter_map(|q| match rng.gen_range(0..4) {
                0 => Some((q, Pauli::X)),
                1 => Some((q, Pauli::Y)),
                2 => Some((q, Pauli::Z)),
                _ => None,
            })
            .collect();
        if !factors.is_empty() {
            return PauliString::from_factors(factors).expect("distinct qubits");
        }
    }
}
