//! Dense unitaries, exact spectra, and equivalence checks.
//!
//! These helpers back the compiler's verification layer (rewrite-rule
//! self-tests, whole-circuit equivalence) and the exact ground-state oracle.
//! They are `f64`-only and guarded to small registers: dense unitaries to
//! 10 qubits, diagonal minimization to 20.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::StateVector;
use crate::circuit::BoundCircuit;
use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, Pauli};

/// Guard for dense-unitary construction.
pub const MAX_UNITARY_QUBITS: usize = 10;
/// Guard for diagonal brute-force minimization.
pub const MAX_DIAGONAL_QUBITS: usize = 20;

/// The full 2^n × 2^n unitary of a bound circuit (little-endian basis).
pub fn circuit_unitary(circuit: &BoundCircuit<f64>) -> Result<DMatrix<Complex64>> {
    let n = circuit.qubits();
    if n > MAX_UNITARY_QUBITS {
        return Err(Error::guard(format!(
            "dense unitary limited to {MAX_UNITARY_QUBITS} qubits, got {n}"
        )));
    }
    let dim = 1usize << n;
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let mut state = StateVector::<f64>::basis(n, col as u64)?;
        for gate in circuit.gates() {
            state.apply(gate);
        }
        for (row, amp) in state.amplitudes().iter().enumerate() {
            out[(row, col)] = *amp;
        }
    }
    Ok(out)
}

/// The dense Hermitian matrix of a Hamiltonian on `qubits` wires.
pub fn hamiltonian_matrix(
    hamiltonian: &Hamiltonian<f64>,
    qubits: usize,
) -> Result<DMatrix<Complex64>> {
    if qubits > MAX_UNITARY_QUBITS {
        return Err(Error::guard(format!(
            "dense Hamiltonian limited to {MAX_UNITARY_QUBITS} qubits, got {qubits}"
        )));
    }
    if hamiltonian.min_qubits() > qubits {
        return Err(Error::validation(format!(
            "Hamiltonian needs {} qubits, register has {qubits}",
            hamiltonian.min_qubits()
        )));
    }
    let dim = 1usize << qubits;
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for term in hamiltonian.terms() {
        let mut flip = 0usize;
        for &(q, p) in term.string.factors() {
            if p != Pauli::Z {
                flip |= 1 << q;
            }
        }
        for col in 0..dim {
            let mut phase = Complex64::new(term.coefficient, 0.0);
            for &(q, p) in term.string.factors() {
                let bit = (col >> q) & 1 == 1;
                match p {
                    Pauli::X => {}
                    Pauli::Y => {
                        phase *= if bit {
                            Complex64::new(0.0, -1.0)
                        } else {
                            Complex64::new(0.0, 1.0)
                        }
                    }
                    Pauli::Z => {
                        if bit {
                            phase = -phase;
                        }
                    }
                }
            }
            out[(col ^ flip, col)] += phase;
        }
    }
    Ok(out)
}

/// Exact minimum expectation value (ground energy) of a Hamiltonian.
///
/// Diagonal Hamiltonians are minimized by basis enumeration (≤ 20 qubits);
/// general ones by symmetric eigendecomposition of the real embedding
/// `[[Re H, −Im H], [Im H, Re H]]` (≤ 10 qubits), whose spectrum is that of
/// `H` doubled.
pub fn exact_min_expectation(hamiltonian: &Hamiltonian<f64>, qubits: usize) -> Result<f64> {
    if hamiltonian.min_qubits() > qubits {
        return Err(Error::validation(format!(
            "Hamiltonian needs {} qubits, register has {qubits}",
            hamiltonian.min_qubits()
        )));
    }
    if hamiltonian.is_diagonal() {
        if qubits > MAX_DIAGONAL_QUBITS {
            return Err(Error::guard(format!(
                "diagonal minimization limited to {MAX_DIAGONAL_QUBITS} qubits, got {qubits}"
            )));
        }
        return (0u64..(1u64 << qubits))
            .map(|b| hamiltonian.diagonal_value(b))
            .try_fold(f64::INFINITY, |best, v| Ok(best.min(v?)));
    }
    let h = hamiltonian_matrix(hamiltonian, qubits)?;
    let dim = h.nrows();
    let mut embedding = DMatrix::<f64>::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        for j in 0..dim {
            let v = h[(i, j)];
            embedding[(i, j)] = v.re;
            embedding[(i + dim, j + dim)] = v.re;
            embedding[(i, j + dim)] = -v.im;
            embedding[(i + dim, j)] = v.im;
        }
    }
    let eigen = embedding.symmetric_eigen();
    Ok(eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// True when `a = e^{iφ} b` for some global phase φ, entrywise within `tol`.
pub fn unitary_equiv(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    // Pick the largest entry of b to read off the phase stably.
    let mut pivot = (0usize, 0usize);
    let mut best = 0.0;
    for j in 0..b.ncols() {
        for i in 0..b.nrows() {
            let m = b[(i, j)].norm();
            if m > best {
                best = m;
                pivot = (i, j);
            }
        }
    }
    if best < 1e-12 {
        return false;
    }
    let phase = a[pivot] / b[pivot];
    if (phase.norm() - 1.0).abs() > 1e-6 {
        return false;
    }
    a.iter()
        .zip(b.iter())
        .all(|(&x, &y)| (x - phase * y).norm() <= tol)
}

/// True when both circuits prepare the same state from |0…0⟩ up to a global
/// phase, entrywise within `tol`.
pub fn prepared_state_equiv(
    a: &BoundCircuit<f64>,
    b: &BoundCircuit<f64>,
    tol: f64,
) -> Result<bool> {
    if a.qubits() != b.qubits() {
        return Ok(false);
    }
    let sa = StateVector::simulate(a)?;
    let sb = StateVector::simulate(b)?;
    let (mut pivot, mut best) = (0usize, 0.0);
    for (i, amp) in sb.amplitudes().iter().enumerate() {
        if amp.norm() > best {
            best = amp.norm();
            pivot = i;
        }
    }
    if best < 1e-12 {
        return Ok(false);
    }
    let phase = sa.amplitudes()[pivot] / sb.amplitudes()[pivot];
    if (phase.norm() - 1.0).abs() > 1e-6 {
        return Ok(false);
    }
    Ok(sa
        .amplitudes()
        .iter()
        .zip(sb.amplitudes())
        .all(|(&x, &y)| (x - phase * y).norm() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::problems;
    use approx::assert_relative_eq;

    fn unitary(src: &str) -> DMatrix<Complex64> {
        let c: Circuit = Circuit::parse(src).unwrap();
        circuit_unitary(&c.bind(&[]).unwrap()).unwrap()
    }

    #[test]
    fn cnot_unitary_matches_truth_table() {
        // control = qubit 0 (LSB): |01⟩(idx1) → |11⟩(idx3)
        let u = unitary("qubits 2\nCNOT 0 1");
        for (col, row) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
            assert_relative_eq!(u[(row, col)].re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn unitary_equiv_ignores_global_phase() {
        // RZ(2π) = −I
        let a = unitary("qubits 1\nRZ(6.283185307179586) 0");
        let b = unitary("qubits 1\n");
        assert!(unitary_equiv(&a, &b, 1e-9));
        let c = unitary("qubits 1\nRX(0.5) 0");
        assert!(!unitary_equiv(&c, &b, 1e-9));
    }

    #[test]
    fn hamiltonian_matrix_is_hermitian_and_matches_expectation() {
        let h = problems::deuteron_hamiltonian();
        let m = hamiltonian_matrix(&h, 4).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                assert!((m[(i, j)] - m[(j, i)].conj()).norm() < 1e-12);
            }
        }
        // ⟨b|H|b⟩ for |0101⟩: identity + Z parts only
        let diag = m[(0b0101, 0b0101)].re;
        let z = [-1.0, 1.0, -1.0, 1.0]; // Z₀..Z₃ eigenvalues of |0101⟩
        let by_hand = 28.657 + 0.218 * z[0] - 6.125 * z[1] - 9.625 * z[2] - 13.125 * z[3];
        assert_relative_eq!(diag, by_hand, epsilon = 1e-12);
    }

    #[test]
    fn deuteron_ground_energy() {
        let h = problems::deuteron_hamiltonian();
        let ground = exact_min_expectation(&h, 4).unwrap();
        assert_relative_eq!(ground, -2.1430793020, epsilon = 1e-8);
    }

    #[test]
    fn dragon_ground_energy_is_negated_maxcut() {
        let h = problems::dragon_hamiltonian();
        let ground = exact_min_expectation(&h, 5).unwrap();
        assert_relative_eq!(ground, -4.0, epsilon = 1e-12);
    }

    #[test]
    fn prepared_state_equiv_detects_phase_freedom() {
        let a = Circuit::<f64>::parse("qubits 1\nH 0\nRZ(6.283185307179586) 0")
            .unwrap()
            .bind(&[])
            .unwrap();
        let b = Circuit::<f64>::parse("qubits 1\nH 0").unwrap().bind(&[]).unwrap();
        assert!(prepared_state_equiv(&a, &b, 1e-9).unwrap());
        let c = Circuit::<f64>::parse("qubits 1\nRX(1.0) 0")
            .unwrap()
            .bind(&[])
            .unwrap();
        assert!(!prepared_state_equiv(&c, &b, 1e-9).unwrap());
    }
}
