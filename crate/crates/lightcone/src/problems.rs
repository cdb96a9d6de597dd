//! Built-in benchmark problems.
//!
//! Two fixed families drive the test suite and the CLI's named presets:
//!
//! - **deuteron**: a 4-qubit unitary-coupled-cluster style ansatz for the
//!   N = 4 deuteron binding-energy Hamiltonian (coefficients in MeV);
//! - **dragon**: a depth-p QAOA ansatz for MAXCUT on the 5-vertex "dragon"
//!   graph T₃,₂ (a triangle with a 2-edge tail), in minimization form.

use crate::circuit::{AngleExpr, Circuit, Gate};
use crate::pauli::{Graph, Hamiltonian, Pauli, PauliString, PauliTerm};
use crate::scalar::Scalar;

/// In-silico optimum (φ, λ₁, λ₂) used by the deuteron presets.
pub const DEUTERON_OPERATING_POINT: [f64; 3] = [0.858, 0.958, 0.758];

/// In-silico optimum (γ, β) used by the dragon QAOA presets.
pub const DRAGON_OPERATING_POINT: [f64; 2] = [1.358, 2.462];

/// The 4-qubit deuteron ansatz with parameters `phi`, `lambda1`, `lambda2`:
///
/// ```text
/// RX(π) 0 · RY(φ) 1 · CNOT 1 0 · CRY(λ₁) 1 2 · CNOT 2 1 · CRY(λ₂) 2 3 · CNOT 3 2
/// ```
pub fn deuteron_ansatz<S: Scalar>() -> Circuit<S> {
    let mut c = Circuit::new(4);
    let pi = S::PI();
    for gate in [
        Gate::rx(pi, 0),
        Gate::ry(AngleExpr::symbol("phi"), 1),
        Gate::cnot(1, 0),
        Gate::cry(AngleExpr::symbol("lambda1"), 1, 2),
        Gate::cnot(2, 1),
        Gate::cry(AngleExpr::symbol("lambda2"), 2, 3),
        Gate::cnot(3, 2),
    ] {
        c.push(gate).expect("static gate list is valid");
    }
    c
}

/// The N = 4 deuteron Hamiltonian (MeV), 11 terms including the identity.
pub fn deuteron_hamiltonian<S: Scalar>() -> Hamiltonian<S> {
    let term = |coef: f64, factors: &[(usize, Pauli)]| {
        PauliTerm::new(
            S::from_f64_lossy(coef),
            PauliString::from_factors(factors.to_vec()).expect("distinct qubits"),
        )
    };
    use Pauli::{X, Y, Z};
    Hamiltonian::new(vec![
        term(28.657, &[]),
        term(0.218, &[(0, Z)]),
        term(-6.125, &[(1, Z)]),
        term(-9.625, &[(2, Z)]),
        term(-13.125, &[(3, Z)]),
        term(-2.143, &[(0, X), (1, X)]),
        term(-2.143, &[(0, Y), (1, Y)]),
        term(-3.913, &[(1, X), (2, X)]),
        term(-3.913, &[(1, Y), (2, Y)]),
        term(-5.671, &[(2, X), (3, X)]),
        term(-5.671, &[(2, Y), (3, Y)]),
    ])
}

/// The dragon graph T₃,₂: a triangle on {2, 3, 4} with the tail 0−1−2.
pub fn dragon_graph() -> Graph {
    Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (2, 4)])
        .expect("static edge list is valid")
}

/// The dragon MAXCUT Hamiltonian in minimization form,
/// `−5/2 + (1/2)(Z₀Z₁ + Z₁Z₂ + Z₂Z₃ + Z₃Z₄ + Z₂Z₄)`.
pub fn dragon_hamiltonian<S: Scalar>() -> Hamiltonian<S> {
    dragon_graph().maxcut_hamiltonian()
}

/// Depth-`p` QAOA ansatz for an arbitrary graph.
///
/// Each layer applies, per edge `(a, b)`, the cost block
/// `CNOT a b · RZ(γ/2) b · CNOT a b = exp(−i(γ/4) Z_a Z_b)`, then the mixer
/// `RX(β)` on every qubit. For `p = 1` the parameters are named
/// `gamma`/`beta`; for larger `p` they are `gamma1`, `beta1`, `gamma2`, ...
pub fn qaoa_ansatz<S: Scalar>(graph: &Graph, layers: usize) -> Circuit<S> {
    let mut c = Circuit::new(graph.vertices());
    let half = S::from_f64_lossy(0.5);
    for q in 0..graph.vertices() {
        c.push(Gate::h(q)).expect("qubit in range");
    }
    for layer in 1..=layers {
        let (gamma, beta) = if layers == 1 {
            ("gamma".to_string(), "beta".to_string())
        } else {
            (format!("gamma{layer}"), format!("beta{layer}"))
        };
        for &(a, b) in graph.edges() {
            c.push(Gate::cnot(a, b)).expect("edge in range");
            c.push(Gate::rz(AngleExpr::affine(half, gamma.clone(), S::zero()), b))
                .expect("edge in range");
            c.push(Gate::cnot(a, b)).expect("edge in range");
        }
        for q in 0..graph.vertices() {
            c.push(Gate::rx(AngleExpr::symbol(beta.clone()), q))
                .expect("qubit in range");
        }
    }
    c
}

/// The p = 1 dragon QAOA ansatz (parameters `gamma`, `beta`).
pub fn dragon_ansatz<S: Scalar>() -> Circuit<S> {
    qaoa_ansatz(&dragon_graph(), 1)
}
