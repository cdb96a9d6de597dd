//! Randomized contract checks for the text formats, the Pauli layer, the
//! rounding policies, and state normalization.

use std::collections::HashMap;

use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;

use lightcone::circuit::{AngleExpr, SymbolicGate};
use lightcone::grouping::RoundingPolicy;
use lightcone::pauli::{Graph, Hamiltonian, Pauli, PauliString, PauliTerm};
use lightcone::sim::StateVector;
use lightcone::Circuit;

fn param_name() -> impl Strategy<Value = String> {
    "[a-z_][a-z0-9_]{0,6}"
}

fn angle() -> impl Strategy<Value = AngleExpr<f64>> {
    prop_oneof![
        (-1e4..1e4f64).prop_map(AngleExpr::Literal),
        param_name().prop_map(AngleExpr::symbol),
        (param_name(), -1e4..1e4f64, -1e4..1e4f64)
            .prop_map(|(name, scale, offset)| AngleExpr::affine(scale, name, offset)),
    ]
}

fn gate(qubits: usize) -> BoxedStrategy<SymbolicGate<f64>> {
    if qubits == 1 {
        (angle(), 0..4usize)
            .prop_map(|(a, pick)| match pick {
                0 => SymbolicGate::h(0),
                1 => SymbolicGate::rx(a, 0),
                2 => SymbolicGate::ry(a, 0),
                _ => SymbolicGate::rz(a, 0),
            })
            .boxed()
    } else {
        (0..qubits, 0..qubits - 1, angle(), 0..7usize)
            .prop_map(move |(q, shift, a, pick)| {
                let other = (q + 1 + shift) % qubits;
                match pick {
                    0 => SymbolicGate::h(q),
                    1 => SymbolicGate::rx(a, q),
                    2 => SymbolicGate::ry(a, q),
                    3 => SymbolicGate::rz(a, q),
                    4 => SymbolicGate::cnot(q, other),
                    5 => SymbolicGate::cry(a, q, other),
                    _ => SymbolicGate::xx(a, q, other),
                }
            })
            .boxed()
    }
}

fn circuit() -> impl Strategy<Value = Circuit<f64>> {
    (1usize..=6).prop_flat_map(|qubits| {
        prop::collection::vec(gate(qubits), 0..24).prop_map(move |gates| {
            let mut out = Circuit::new(qubits);
            for g in gates {
                out.push(g).expect("generated gates are in range");
            }
            out
        })
    })
}

fn pauli_letter() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn pauli_factors() -> impl Strategy<Value = Vec<(usize, Pauli)>> {
    prop::collection::btree_map(0..10usize, pauli_letter(), 0..6)
        .prop_map(|map| map.into_iter().collect())
}

fn hamiltonian() -> impl Strategy<Value = Hamiltonian<f64>> {
    prop::collection::vec((-1e4..1e4f64, pauli_factors()), 0..10).prop_map(|terms| {
        Hamiltonian::new(
            terms
                .into_iter()
                .map(|(coefficient, factors)| {
                    PauliTerm::new(
                        coefficient,
                        PauliString::from_factors(factors).expect("qubits are distinct"),
                    )
                })
                .collect(),
        )
    })
}

fn graph() -> impl Strategy<Value = Graph> {
    (1usize..=8).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let len = pairs.len();
        prop::collection::vec(any::<bool>(), len..=len.max(1)).prop_map(move |mask| {
            let edges = pairs
                .iter()
                .zip(&mask)
                .filter(|&(_, &keep)| keep)
                .map(|(&edge, _)| edge)
                .collect();
            Graph::new(n, edges).expect("edges are distinct and in range")
        })
    })
}

proptest! {
    // No regression files: a failure prints the minimal counterexample in
    // full, which is enough to reproduce it as a plain unit test.
    #![proptest_config(ProptestConfig {
        failure_persistence: Some(Box::new(FileFailurePersistence::Off)),
        ..ProptestConfig::default()
    })]

    /// Any circuit survives a print/parse cycle unchanged, including affine
    /// angle expressions.
    #[test]
    fn circuit_text_round_trips(c in circuit()) {
        let parsed = Circuit::parse(&c.to_string()).expect("printed circuit reparses");
        prop_assert_eq!(parsed, c);
    }

    /// Any Hamiltonian survives a print/parse cycle unchanged (construction
    /// already merged duplicates and dropped zeros, and parsing re-applies
    /// the same normalization).
    #[test]
    fn hamiltonian_text_round_trips(h in hamiltonian()) {
        let parsed = Hamiltonian::parse(&h.to_string()).expect("printed Hamiltonian reparses");
        prop_assert_eq!(parsed, h);
    }

    /// Any graph survives a print/parse cycle unchanged.
    #[test]
    fn graph_text_round_trips(g in graph()) {
        let parsed = Graph::parse(&g.to_string()).expect("printed graph reparses");
        prop_assert_eq!(parsed, g);
    }

    /// Factor order does not matter, and the compact label is the grammar
    /// form without spaces.
    #[test]
    fn pauli_string_is_canonical(factors in pauli_factors().prop_shuffle()) {
        let mut sorted = factors.clone();
        sorted.sort_by_key(|&(q, _)| q);
        let a = PauliString::from_factors(factors).expect("qubits are distinct");
        let b = PauliString::from_factors(sorted).expect("qubits are distinct");
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.label(), b.to_string().replace(' ', ""));
    }

    /// Exact rounding is the least count covering the raw estimate (up to
    /// the anti-jitter allowance), never below one shot.
    #[test]
    fn exact_rounding_is_minimal(raw in 1e-9..1e9f64) {
        let shots = RoundingPolicy::Exact.apply(raw);
        prop_assert!(shots >= 1);
        prop_assert!(shots as f64 >= raw - 1e-6);
        if shots > 1 {
            prop_assert!(((shots - 1) as f64) < raw - 1e-6);
        }
    }

    /// Experiment rounding keeps tiny counts exact and otherwise lands on
    /// the 50-shot grid at or above the 500-shot floor.
    #[test]
    fn experiment_rounding_quantizes(raw in 1e-9..1e9f64) {
        let shots = RoundingPolicy::Experiment.apply(raw);
        prop_assert!(shots >= 1);
        if raw < 10.0 {
            prop_assert_eq!(shots, RoundingPolicy::Exact.apply(raw));
        } else {
            prop_assert_eq!(shots % 50, 0);
            prop_assert!(shots >= 500);
        }
    }

    /// Simulation preserves the norm for any circuit in the gate set.
    #[test]
    fn simulation_preserves_norm(c in circuit()) {
        let values: HashMap<String, f64> =
            c.parameters().into_iter().map(|name| (name, 0.7)).collect();
        let bound = c.bind_named(&values).expect("all parameters are supplied");
        let state = StateVector::simulate(&bound).expect("register is within the guard");
        let total: f64 = state.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "norm drifted to {total}");
    }
}
