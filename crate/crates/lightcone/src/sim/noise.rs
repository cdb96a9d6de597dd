//! Stochastic Pauli noise and readout error modeling.
//!
//! Gate noise is trajectory-sampled depolarizing: after each gate, with the
//! per-kind probability, one uniformly chosen non-identity Pauli (on the
//! gate's operands) is applied. Readout error is a per-qubit symmetric bit
//! flip; correction inverts the per-qubit confusion matrices on the empirical
//! distribution, then clips and renormalizes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Single-qubit gate infidelity (1 − F₁) used by [`NoiseModel::default_for`].
pub const DEFAULT_P_ONE: f64 = 0.005;
/// Two-qubit gate infidelity (1 − F₂) used by [`NoiseModel::default_for`].
pub const DEFAULT_P_TWO: f64 = 0.015;
/// Joint readout fidelity for registers of up to four qubits.
const READOUT_FIDELITY_4Q: f64 = 0.971;
/// Joint readout fidelity for registers of five or more qubits.
const READOUT_FIDELITY_5Q: f64 = 0.943;

/// Depolarizing gate noise plus per-qubit readout flip probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing probability after each single-qubit gate.
    pub p_one: f64,
    /// Depolarizing probability after each two-qubit gate.
    pub p_two: f64,
    /// Symmetric readout flip probability per qubit (length = register size).
    pub readout_flip: Vec<f64>,
}

impl NoiseModel {
    /// The default trapped-ion-like model for an `n`-qubit register:
    /// p₁ = 0.005, p₂ = 0.015, and a uniform per-qubit readout flip solved
    /// from the joint readout fidelity `F = (1−q)^n` (F = 97.1% for n ≤ 4,
    /// 94.3% for n ≥ 5).
    pub fn default_for(qubits: usize) -> Self {
        let joint = if qubits <= 4 {
            READOUT_FIDELITY_4Q
        } else {
            READOUT_FIDELITY_5Q
        };
        let q = match qubits {
            0 => 0.0,
            n => 1.0 - joint.powf(1.0 / n as f64),
        };
        NoiseModel {
            p_one: DEFAULT_P_ONE,
            p_two: DEFAULT_P_TWO,
            readout_flip: vec![q; qubits],
        }
    }

    /// A model with gate noise only (no readout error).
    pub fn gates_only(p_one: f64, p_two: f64, qubits: usize) -> Self {
        NoiseModel {
            p_one,
            p_two,
            readout_flip: vec![0.0; qubits],
        }
    }

    /// Validate probability ranges and the register size.
    pub fn validate(&self, qubits: usize) -> Result<()> {
        for (name, p) in [("p_one", self.p_one), ("p_two", self.p_two)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::validation(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if self.readout_flip.len() != qubits {
            return Err(Error::validation(format!(
                "readout_flip has {} entries for a {qubits}-qubit register",
                self.readout_flip.len()
            )));
        }
        for (q, p) in self.readout_flip.iter().enumerate() {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::validation(format!(
                    "readout_flip[{q}] = {p} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// True when every channel is trivial.
    pub fn is_trivial(&self) -> bool {
        self.p_one == 0.0 && self.p_two == 0.0 && self.readout_flip.iter().all(|&p| p == 0.0)
    }

    /// Sample the depolarizing error event after one gate, if any.
    ///
    /// Returns the Pauli letters to apply to the gate's operand qubits
    /// (`None` entries are identities; at least one entry is a letter when
    /// the event fires).
    pub fn sample_gate_error(
        &self,
        operands: &[usize],
        rng: &mut impl Rng,
    ) -> Option<Vec<(usize, Pauli)>> {
        let p = match operands.len() {
            1 => self.p_one,
            2 => self.p_two,
            _ => unreachable!("gate arity is 1 or 2"),
        };
        if p == 0.0 {
            return None;
        }
        let u: f64 = rng.gen();
        if u >= p {
            return None;
        }
        match *operands {
            [q] => {
                let which = rng.gen_range(0..3u8);
                Some(vec![(q, letter(which))])
            }
            [a, b] => {
                // 15 non-identity pairs, uniformly.
                let which = rng.gen_range(1..16u8);
                let (pa, pb) = (which / 4, which % 4);
                let mut out = Vec::with_capacity(2);
                if pa > 0 {
                    out.push((a, letter(pa - 1)));
                }
                if pb > 0 {
                    out.push((b, letter(pb - 1)));
                }
                Some(out)
            }
            _ => unreachable!("gate arity is 1 or 2"),
        }
    }

    /// Flip measured bits per the readout confusion model.
    pub fn apply_readout(&self, bitstring: u64, rng: &mut impl Rng) -> u64 {
        let mut out = bitstring;
        for (q, &p) in self.readout_flip.iter().enumerate() {
            if p > 0.0 && rng.gen::<f64>() < p {
                out ^= 1 << q;
            }
        }
        out
    }
}

fn letter(idx: u8) -> Pauli {
    match idx {
        0 => Pauli::X,
        1 => Pauli::Y,
        _ => Pauli::Z,
    }
}

/// Invert the tensor-product readout confusion matrix on an empirical
/// distribution `probs` (length 2^n), clip negatives, renormalize.
///
/// The per-qubit confusion matrix is symmetric,
/// `M_q = [[1−p, p], [p, 1−p]]`, with inverse `(1−2p)⁻¹ [[1−p, −p], [−p, 1−p]]`;
/// `p = 1/2` makes it singular.
pub fn correct_distribution(probs: &mut [f64], flips: &[f64]) -> Result<()> {
    let n = flips.len();
    if probs.len() != 1usize << n {
        return Err(Error::validation(format!(
            "distribution of length {} does not match {n} qubit(s)",
            probs.len()
        )));
    }
    for (q, &p) in flips.iter().enumerate() {
        let det = 1.0 - 2.0 * p;
        if det.abs() < 1e-12 {
            return Err(Error::guard(format!(
                "readout confusion matrix on qubit {q} is singular (flip = {p})"
            )));
        }
        if p == 0.0 {
            continue;
        }
        let (a, b) = ((1.0 - p) / det, -p / det);
        let m = 1usize << q;
        for i in 0..probs.len() {
            if i & m == 0 {
                let (p0, p1) = (probs[i], probs[i | m]);
                probs[i] = a * p0 + b * p1;
                probs[i | m] = b * p0 + a * p1;
            }
        }
    }
    // Clip to the simplex and renormalize.
    let mut total = 0.0;
    for p in probs.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
        total += *p;
    }
    if total <= 0.0 {
        return Err(Error::guard(
            "readout correction produced an empty distribution".to_string(),
        ));
    }
    for p in probs.iter_mut() {
        *p /= total;
    }
    Ok(())
}
