//! Dense statevector simulation.
//!
//! Amplitudes are little-endian: qubit 0 is the least significant bit of the
//! basis-state index, so `|q2 q1 q0⟩ = |110⟩` is index 6. Gate conventions
//! match the circuit IR: `R_P(θ) = exp(−iθP/2)`, `XX(θ) = exp(−iθ(X⊗X)/2)`,
//! `CRY(θ)` rotates the target by `RY(θ)` when the control is |1⟩.
//!
//! State evolution and exact expectations are generic over [`Scalar`]; the
//! stochastic layer (shot sampling, noise trajectories, readout correction in
//! [`record`] and [`noise`]) is `f64`-only.

pub mod exact;
pub mod noise;
pub mod record;

pub use exact::{circuit_unitary, exact_min_expectation, unitary_equiv};
pub use noise::NoiseModel;
pub use record::{measure_string, MeasurementRecord};

use num_complex::Complex;

use crate::circuit::{BoundCircuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::scalar::Scalar;

/// Memory guard: dense simulation refuses registers beyond this size.
pub const MAX_QUBITS: usize = 24;

/// A dense statevector over `n ≤ 24` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<S = f64> {
    qubits: usize,
    amps: Vec<Complex<S>>,
}

impl<S: Scalar> StateVector<S> {
    /// The all-zeros computational basis state |0…0⟩.
    pub fn zero(qubits: usize) -> Result<Self> {
        if qubits > MAX_QUBITS {
            return Err(Error::guard(format!(
                "statevector limited to {MAX_QUBITS} qubits, got {qubits}"
            )));
        }
        let mut amps = vec![Complex::new(S::zero(), S::zero()); 1usize << qubits];
        amps[0] = Complex::new(S::one(), S::zero());
        Ok(StateVector { qubits, amps })
    }

    /// The computational basis state |index⟩.
    pub fn basis(qubits: usize, index: u64) -> Result<Self> {
        let mut state = StateVector::zero(qubits)?;
        if index >= (1u64 << qubits) {
            return Err(Error::validation(format!(
                "basis index {index} out of range for {qubits} qubit(s)"
            )));
        }
        state.amps[0] = Complex::new(S::zero(), S::zero());
        state.amps[index as usize] = Complex::new(S::one(), S::zero());
        Ok(state)
    }

    /// Simulate a bound circuit from |0…0⟩.
    pub fn simulate(circuit: &BoundCircuit<S>) -> Result<Self> {
        let mut state = StateVector::zero(circuit.qubits())?;
        for gate in circuit.gates() {
            state.apply(gate);
        }
        Ok(state)
    }

    /// Number of qubits.
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Amplitudes in little-endian basis order.
    pub fn amplitudes(&self) -> &[Complex<S>] {
        &self.amps
    }

    /// ‖ψ‖₂².
    pub fn norm_sq(&self) -> S {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Basis-state probabilities |ψ_b|².
    pub fn probabilities(&self) -> Vec<S> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, gate: &Gate<S>) {
        let qs = gate.qubits();
        debug_assert!(qs.iter().all(|&q| q < self.qubits));
        match (&gate.kind, qs) {
            (GateKind::H, &[q]) => {
                let s = (S::one() + S::one()).sqrt().recip();
                let h = Complex::new(s, S::zero());
                self.map_pairs(q, |a0, a1| (h * (a0 + a1), h * (a0 - a1)));
            }
            (GateKind::RX(theta), &[q]) => {
                let (c, s) = half_angle(*theta);
                let mis = Complex::new(S::zero(), -s);
                self.map_pairs(q, |a0, a1| (a0 * c + a1 * mis, a0 * mis + a1 * c));
            }
            (GateKind::RY(theta), &[q]) => {
                let (c, s) = half_angle(*theta);
                self.map_pairs(q, |a0, a1| (a0 * c - a1 * s, a0 * s + a1 * c));
            }
            (GateKind::RZ(theta), &[q]) => {
                let (c, s) = half_angle(*theta);
                let e0 = Complex::new(c, -s);
                let e1 = Complex::new(c, s);
                self.map_pairs(q, |a0, a1| (a0 * e0, a1 * e1));
            }
            (GateKind::CNOT, &[control, target]) => {
                let cm = 1usize << control;
                let tm = 1usize << target;
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
            (GateKind::CRY(theta), &[control, target]) => {
                let (c, s) = half_angle(*theta);
                let cm = 1usize << control;
                let tm = 1usize << target;
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        let a0 = self.amps[i];
                        let a1 = self.amps[i | tm];
                        self.amps[i] = a0 * c - a1 * s;
                        self.amps[i | tm] = a0 * s + a1 * c;
                    }
                }
            }
            (GateKind::XX(theta), &[a, b]) => {
                let (c, s) = half_angle(*theta);
                let mis = Complex::new(S::zero(), -s);
                let am = 1usize << a;
                let bm = 1usize << b;
                for i in 0..self.amps.len() {
                    // Visit each 4-amplitude block once, from its 00 corner.
                    if i & am != 0 || i & bm != 0 {
                        continue;
                    }
                    let (i00, i01, i10, i11) = (i, i | am, i | bm, i | am | bm);
                    let (a00, a01, a10, a11) =
                        (self.amps[i00], self.amps[i01], self.amps[i10], self.amps[i11]);
                    // X⊗X swaps both bits: 00↔11, 01↔10.
                    self.amps[i00] = a00 * c + a11 * mis;
                    self.amps[i11] = a11 * c + a00 * mis;
                    self.amps[i01] = a01 * c + a10 * mis;
                    self.amps[i10] = a10 * c + a01 * mis;
                }
            }
            _ => unreachable!("gate arity validated at circuit construction"),
        }
    }

    /// Apply a bare Pauli operator (used by noise trajectories).
    pub fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        let m = 1usize << qubit;
        match pauli {
            Pauli::X => {
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        self.amps.swap(i, i | m);
                    }
                }
            }
            Pauli::Y => {
                let pi = Complex::new(S::zero(), S::one());
                let mi = Complex::new(S::zero(), -S::one());
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let a0 = self.amps[i];
                        let a1 = self.amps[i | m];
                        // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩.
                        self.amps[i] = a1 * mi;
                        self.amps[i | m] = a0 * pi;
                    }
                }
            }
            Pauli::Z => {
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *amp = -*amp;
                    }
                }
            }
        }
    }

    /// Exact expectation value ⟨ψ|P|ψ⟩ of a Pauli string (always real).
    pub fn expectation(&self, string: &PauliString) -> Result<S> {
        if string.min_qubits() > self.qubits {
            return Err(Error::validation(format!(
                "term {string} exceeds the {}-qubit register",
                self.qubits
            )));
        }
        // P|b⟩ = phase(b) |b ⊕ flip⟩ with flip = X/Y support.
        let mut flip = 0usize;
        for &(q, p) in string.factors() {
            if p != Pauli::Z {
                flip |= 1 << q;
            }
        }
        let mut total = Complex::new(S::zero(), S::zero());
        for (b, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == S::zero() {
                continue;
            }
            let mut phase = Complex::new(S::one(), S::zero());
            for &(q, p) in string.factors() {
                let bit = (b >> q) & 1 == 1;
                match p {
                    Pauli::X => {}
                    Pauli::Y => {
                        // Y|0⟩ = +i|1⟩, Y|1⟩ = −i|0⟩.
                        phase *= if bit {
                            Complex::new(S::zero(), -S::one())
                        } else {
                            Complex::new(S::zero(), S::one())
                        };
                    }
                    Pauli::Z => {
                        if bit {
                            phase = -phase;
                        }
                    }
                }
            }
            total += self.amps[b ^ flip].conj() * phase * *amp;
        }
        Ok(total.re)
    }

    /// Apply a 2×2 transform `(a0, a1) → f(a0, a1)` on every pair of
    /// amplitudes differing in bit `q`.
    fn map_pairs(
        &mut self,
        q: usize,
        f: impl Fn(Complex<S>, Complex<S>) -> (Complex<S>, Complex<S>),
    ) {
        let m = 1usize << q;
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let (n0, n1) = f(self.amps[i], self.amps[i | m]);
                self.amps[i] = n0;
                self.amps[i | m] = n1;
            }
        }
    }
}

fn half_angle<S: Scalar>(theta: S) -> (S, S) {
    let half = theta / (S::one() + S::one());
    (half.cos(), half.sin())
}

/// Exact weighted Hamiltonian expectation ⟨ψ|H|ψ⟩ = Σ h_γ ⟨P_γ⟩.
pub fn hamiltonian_expectation<S: Scalar>(
    state: &StateVector<S>,
    hamiltonian: &crate::pauli::Hamiltonian<S>,
) -> Result<S> {
    let mut total = S::zero();
    for term in hamiltonian.terms() {
        total += term.coefficient * state.expectation(&term.string)?;
    }
    Ok(total)
}
