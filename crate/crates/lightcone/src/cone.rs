//! Past-causal-cone analysis and circuit reduction.
//!
//! For an observable `P` and circuit `U = g_k … g_1`, the past causal cone is
//! the minimal suffix-closed gate subset whose complement can be deleted
//! without changing ⟨0…0| U† P U |0…0⟩ for **every** parameter assignment.
//!
//! The computation walks the circuit backwards, maintaining the set of Pauli
//! *monomials* that can appear in the Heisenberg image of `P` under the kept
//! suffix. A gate (or fused analysis unit) is dropped exactly when it fixes
//! every monomial in the set with a `+1` sign; otherwise it joins the cone
//! and the set is replaced by the union of the conjugation images.
//!
//! Signs and coefficients are deliberately dropped from the tracked set.
//! That is sound for pruning: a unit is only dropped when every monomial is
//! exactly fixed (sign flips count as changes), so removed gates act as the
//! identity on the true Heisenberg image whatever the angles are. Angles are
//! always treated as free symbols — a rotation is never skipped because of a
//! special literal value, keeping reductions valid across the whole parameter
//! space.
//!
//! Conjugation rules are exact per gate kind (verified against dense matrix
//! conjugation in the tests below):
//!
//! - rotations `R_A(θ)` with Pauli axis `A` (`RX`, `RY`, `RZ`, `XX`, and the
//!   fused block `CNOT·RZ(θ)·CNOT ≡ exp(−i(θ/2) Z_aZ_b)`): a monomial `M`
//!   commuting with `A` is fixed; otherwise it mixes into `{M, A·M}`;
//! - `CNOT`: the Clifford symplectic map; fixed exactly for control letter
//!   ∈ {I, Z} and target letter ∈ {I, X};
//! - `H`: I fixed; X ↔ Z; Y → −Y (a sign change, hence never skippable);
//! - `CRY`: a four-case table closed over letter sets (see `cry_images`).

use std::collections::HashSet;
use std::fmt;

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, Pauli, PauliString, PauliTerm};
use crate::scalar::Scalar;

/// Hard cap on the tracked monomial set size.
pub const MONOMIAL_GUARD: usize = 1_000_000;

/// Widest register the packed representation supports.
pub const MAX_CONE_QUBITS: usize = 64;

// ---------------------------------------------------------------------------
// Packed Pauli monomials
// ---------------------------------------------------------------------------

/// A Pauli monomial over ≤ 64 qubits in symplectic form, signs dropped.
///
/// Bit `q` of `x`/`z` gives the letter on qubit `q`:
/// I = (0,0), X = (1,0), Y = (1,1), Z = (0,1). Multiplication is bitwise XOR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PackedPauli {
    x: u64,
    z: u64,
}

impl PackedPauli {
    /// The identity monomial.
    pub const IDENTITY: PackedPauli = PackedPauli { x: 0, z: 0 };

    /// Pack a sparse Pauli string (requires support within 64 qubits).
    pub fn from_string(string: &PauliString) -> Result<Self> {
        if string.min_qubits() > MAX_CONE_QUBITS {
            return Err(Error::guard(format!(
                "cone analysis limited to {MAX_CONE_QUBITS} qubits, term {string} exceeds it"
            )));
        }
        let mut m = PackedPauli::IDENTITY;
        for &(q, p) in string.factors() {
            let (x, z) = match p {
                Pauli::X => (true, false),
                Pauli::Y => (true, true),
                Pauli::Z => (false, true),
            };
            m = m.with_letter(q, x, z);
        }
        Ok(m)
    }

    /// A Z-string over an arbitrary qubit set.
    pub fn z_string(support: &[usize]) -> Result<Self> {
        if support.iter().any(|&q| q >= MAX_CONE_QUBITS) {
            return Err(Error::guard(format!(
                "cone analysis limited to {MAX_CONE_QUBITS} qubits"
            )));
        }
        let z = support.iter().fold(0u64, |acc, &q| acc | (1 << q));
        Ok(PackedPauli { x: 0, z })
    }

    /// Unpack into the sparse representation.
    pub fn to_string_sparse(self) -> PauliString {
        let mut factors = Vec::new();
        let mut mask = self.x | self.z;
        while mask != 0 {
            let q = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            let letter = match ((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1) {
                (true, false) => Pauli::X,
                (true, true) => Pauli::Y,
                (false, true) => Pauli::Z,
                (false, false) => unreachable!("bit taken from support mask"),
            };
            factors.push((q, letter));
        }
        PauliString::from_factors(factors).expect("distinct qubits by construction")
    }

    /// Product up to phase (bitwise XOR in symplectic form).
    pub fn product(self, other: PackedPauli) -> PackedPauli {
        PackedPauli {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    /// True when the monomials commute.
    pub fn commutes(self, other: PackedPauli) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// True for the identity.
    pub fn is_identity(self) -> bool {
        self.x == 0 && self.z == 0
    }

    fn letter_bits(self, q: usize) -> (bool, bool) {
        ((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1)
    }

    fn with_letter(self, q: usize, x: bool, z: bool) -> PackedPauli {
        let bit = 1u64 << q;
        PackedPauli {
            x: (self.x & !bit) | if x { bit } else { 0 },
            z: (self.z & !bit) | if z { bit } else { 0 },
        }
    }
}

impl fmt::Display for PackedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_sparse())
    }
}

// ---------------------------------------------------------------------------
// Analysis units
// ---------------------------------------------------------------------------

/// One backward-pass analysis step: a gate, or a fused
/// `CNOT·RZ·CNOT ≡ exp(−i(θ/2) ZZ)` block treated as a single rotation.
#[derive(Debug, Clone)]
struct Unit {
    kind: UnitKind,
    /// Contiguous range of original gate indices this unit covers.
    first_gate: usize,
    gate_count: usize,
}

#[derive(Debug, Clone)]
enum UnitKind {
    Rotation { axis: PackedPauli },
    Cnot { control: usize, target: usize },
    Hadamard { qubit: usize },
    Cry { control: usize, target: usize },
}

impl Unit {
    /// True when the unit conjugates `m` to exactly `+m`.
    fn fixes(&self, m: PackedPauli) -> bool {
        match &self.kind {
            UnitKind::Rotation { axis } => m.commutes(*axis),
            UnitKind::Cnot { control, target } => {
                let (cx, _) = m.letter_bits(*control);
                let (_, tz) = m.letter_bits(*target);
                !cx && !tz
            }
            UnitKind::Hadamard { qubit } => m.letter_bits(*qubit) == (false, false),
            UnitKind::Cry { control, target } => {
                let (cx, _) = m.letter_bits(*control);
                let (tx, tz) = m.letter_bits(*target);
                !cx && tx == tz
            }
        }
    }

    /// Push every monomial that can appear in the conjugation image of `m`.
    fn images(&self, m: PackedPauli, out: &mut HashSet<PackedPauli>) {
        if self.fixes(m) {
            out.insert(m);
            return;
        }
        match &self.kind {
            UnitKind::Rotation { axis } => {
                out.insert(m);
                out.insert(m.product(*axis));
            }
            UnitKind::Cnot { control, target } => {
                let (cx, cz) = m.letter_bits(*control);
                let (tx, tz) = m.letter_bits(*target);
                // symplectic CNOT action: x_t ^= x_c, z_c ^= z_t
                out.insert(
                    m.with_letter(*control, cx, cz ^ tz)
                        .with_letter(*target, tx ^ cx, tz),
                );
            }
            UnitKind::Hadamard { qubit } => {
                let (x, z) = m.letter_bits(*qubit);
                // X ↔ Z; Y stays Y (with a sign flip, so still "changed")
                out.insert(m.with_letter(*qubit, z, x));
            }
            UnitKind::Cry { control, target } => cry_images(m, *control, *target, out),
        }
    }
}

/// Conjugation image set of `CRY(θ)` on control/target letters, angle
/// symbolic. Derived from `CRY = |0⟩⟨0|⊗I + |1⟩⟨1|⊗RY(θ)` and verified
/// against dense conjugation in the tests:
///
/// 1. control ∈ {I, Z}, target ∈ {I, Y}: fixed (handled by the caller);
/// 2. control ∈ {I, Z}, target ∈ {X, Z}: images
///    {(c, X), (c, Z), (c·Z, X), (c·Z, Z)};
/// 3. control ∈ {X, Y}, target ∈ {I, Y}: images {(c, t), (c·Z, t·Y)};
/// 4. control ∈ {X, Y}, target ∈ {X, Z}: images {(c, X), (c, Z)}.
fn cry_images(m: PackedPauli, control: usize, target: usize, out: &mut HashSet<PackedPauli>) {
    let (cx, cz) = m.letter_bits(control);
    let (tx, tz) = m.letter_bits(target);
    let control_iz = !cx;
    let target_iy = tx == tz;
    match (control_iz, target_iy) {
        (true, true) => unreachable!("fixed case handled by the caller"),
        (true, false) => {
            for czz in [cz, !cz] {
                out.insert(
                    m.with_letter(control, false, czz)
                        .with_letter(target, true, false),
                );
                out.insert(
                    m.with_letter(control, false, czz)
                        .with_letter(target, false, true),
                );
            }
        }
        (false, true) => {
            out.insert(m);
            // c·Z toggles X↔Y on the control; t·Y toggles I↔Y on the target.
            out.insert(
                m.with_letter(control, true, !cz)
                    .with_letter(target, !tx, !tz),
            );
        }
        (false, false) => {
            out.insert(m.with_letter(target, true, false));
            out.insert(m.with_letter(target, false, true));
        }
    }
}

/// Split a circuit into analysis units, fusing consecutive
/// `CNOT(a,b) · RZ(θ) b · CNOT(a,b)` triples into one ZZ-axis rotation.
fn unitize<S: Scalar>(circuit: &Circuit<S>) -> Vec<Unit> {
    let gates = circuit.gates();
    let mut units = Vec::with_capacity(gates.len());
    let mut i = 0;
    while i < gates.len() {
        if i + 2 < gates.len() {
            if let (GateKind::CNOT, GateKind::RZ(_), GateKind::CNOT) =
                (&gates[i].kind, &gates[i + 1].kind, &gates[i + 2].kind)
            {
                let (a, b) = (gates[i].qubits()[0], gates[i].qubits()[1]);
                if gates[i + 2].qubits() == [a, b] && gates[i + 1].qubits() == [b] {
                    let axis = PackedPauli::z_string(&[a, b]).expect("validated operands");
                    units.push(Unit {
                        kind: UnitKind::Rotation { axis },
                        first_gate: i,
                        gate_count: 3,
                    });
                    i += 3;
                    continue;
                }
            }
        }
        let gate = &gates[i];
        let kind = match (&gate.kind, gate.qubits()) {
            (GateKind::H, &[q]) => UnitKind::Hadamard { qubit: q },
            (GateKind::RX(_), &[q]) => UnitKind::Rotation {
                axis: PackedPauli::IDENTITY.with_letter(q, true, false),
            },
            (GateKind::RY(_), &[q]) => UnitKind::Rotation {
                axis: PackedPauli::IDENTITY.with_letter(q, true, true),
            },
            (GateKind::RZ(_), &[q]) => UnitKind::Rotation {
                axis: PackedPauli::IDENTITY.with_letter(q, false, true),
            },
            (GateKind::CNOT, &[c, t]) => UnitKind::Cnot {
                control: c,
                target: t,
            },
            (GateKind::CRY(_), &[c, t]) => UnitKind::Cry {
                control: c,
                target: t,
            },
            (GateKind::XX(_), &[a, b]) => UnitKind::Rotation {
                axis: PackedPauli::IDENTITY
                    .with_letter(a, true, false)
                    .with_letter(b, true, false),
            },
            _ => unreachable!("gate arity validated at construction"),
        };
        units.push(Unit {
            kind,
            first_gate: i,
            gate_count: 1,
        });
        i += 1;
    }
    units
}

// ---------------------------------------------------------------------------
// Cone computation
// ---------------------------------------------------------------------------

/// Exact past causal cone of an observable: ascending indices of the gates
/// that cannot be deleted without changing ⟨observable⟩ at some parameters.
pub fn term_cone<S: Scalar>(circuit: &Circuit<S>, observable: &PauliString) -> Result<Vec<usize>> {
    if observable.min_qubits() > circuit.qubits() {
        return Err(Error::validation(format!(
            "observable {observable} exceeds the {}-qubit circuit",
            circuit.qubits()
        )));
    }
    if circuit.qubits() > MAX_CONE_QUBITS {
        return Err(Error::guard(format!(
            "cone analysis limited to {MAX_CONE_QUBITS} qubits, circuit has {}",
            circuit.qubits()
        )));
    }
    let units = unitize(circuit);
    let mut monomials = HashSet::from([PackedPauli::from_string(observable)?]);
    let mut kept = Vec::new();
    for unit in units.iter().rev() {
        if monomials.iter().all(|&m| unit.fixes(m)) {
            continue;
        }
        kept.extend(unit.first_gate..unit.first_gate + unit.gate_count);
        let mut next = HashSet::with_capacity(monomials.len() * 2);
        for &m in &monomials {
            unit.images(m, &mut next);
        }
        if next.len() > MONOMIAL_GUARD {
            return Err(Error::guard(format!(
                "monomial set exceeded {MONOMIAL_GUARD} while tracing {observable}"
            )));
        }
        monomials = next;
    }
    kept.sort_unstable();
    Ok(kept)
}

// ---------------------------------------------------------------------------
// Gate dependency DAG
// ---------------------------------------------------------------------------

/// Wire-threaded gate dependency DAG: node `i` is gate `i`; an edge `u → v`
/// means gate `v` consumes a qubit wire most recently written by gate `u`.
#[derive(Debug)]
pub struct CircuitDag<'c, S = f64> {
    circuit: &'c Circuit<S>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    /// Last gate on each wire (`None` for idle wires).
    wire_output: Vec<Option<usize>>,
}

/// Build the dependency DAG of a circuit.
pub fn build_dag<S: Scalar>(circuit: &Circuit<S>) -> CircuitDag<'_, S> {
    let n = circuit.gates().len();
    let mut preds = vec![Vec::new(); n];
    let mut succs = vec![Vec::new(); n];
    let mut last_on_wire: Vec<Option<usize>> = vec![None; circuit.qubits()];
    for (i, gate) in circuit.gates().iter().enumerate() {
        for &q in gate.qubits() {
            if let Some(p) = last_on_wire[q] {
                if !preds[i].contains(&p) {
                    preds[i].push(p);
                    succs[p].push(i);
                }
            }
            last_on_wire[q] = Some(i);
        }
    }
    CircuitDag {
        circuit,
        preds,
        succs,
        wire_output: last_on_wire,
    }
}

impl<'c, S: Scalar> CircuitDag<'c, S> {
    /// The underlying circuit.
    pub fn circuit(&self) -> &'c Circuit<S> {
        self.circuit
    }

    /// Number of gate nodes.
    pub fn node_count(&self) -> usize {
        self.preds.len()
    }

    /// DAG predecessors of gate `i` (deduplicated, in wire order).
    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.preds[i]
    }

    /// DAG successors of gate `i`.
    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succs[i]
    }

    /// The last gate touching wire `q`, if any.
    pub fn wire_output(&self, q: usize) -> Option<usize> {
        self.wire_output.get(q).copied().flatten()
    }

    /// Structural (wire-widening) reverse reachability from the output
    /// boundary of `support`: once a gate is reached, **all** of its wires
    /// become relevant for earlier gates.
    ///
    /// This over-approximates the exact cone ([`term_cone`] ⊆ this set) and
    /// satisfies the structural laws: monotone in `support`, backward-closed,
    /// and equal to the full gate set when `support` is every qubit of a
    /// circuit whose last layer touches every qubit.
    pub fn reachable_cone(&self, support: &[usize]) -> Result<Vec<usize>> {
        for &q in support {
            if q >= self.circuit.qubits() {
                return Err(Error::validation(format!(
                    "support qubit {q} exceeds the {}-qubit circuit",
                    self.circuit.qubits()
                )));
            }
        }
        // Reverse scan with an active-wire set; equivalent to depth-first
        // traversal over wire edges (visitation in descending position).
        let mut active = vec![false; self.circuit.qubits()];
        for &q in support {
            active[q] = true;
        }
        let mut kept = Vec::new();
        for (i, gate) in self.circuit.gates().iter().enumerate().rev() {
            if gate.qubits().iter().any(|&q| active[q]) {
                kept.push(i);
                for &q in gate.qubits() {
                    active[q] = true;
                }
            }
        }
        kept.reverse();
        Ok(kept)
    }
}

/// Exact past causal cone of the Z-string observable over `support`.
///
/// This is the cone that protects any measurement outcome statistics on the
/// support wires, and the one circuit reduction is built from.
pub fn past_causal_cone<S: Scalar>(dag: &CircuitDag<'_, S>, support: &[usize]) -> Result<Vec<usize>> {
    let mut sorted: Vec<usize> = support.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &q in &sorted {
        if q >= dag.circuit.qubits() {
            return Err(Error::validation(format!(
                "support qubit {q} exceeds the {}-qubit circuit",
                dag.circuit.qubits()
            )));
        }
    }
    let z = PackedPauli::z_string(&sorted)?;
    term_cone(dag.circuit, &z.to_string_sparse())
}

// ---------------------------------------------------------------------------
// Reduced ansatz construction
// ---------------------------------------------------------------------------

/// Injective map between original and reduced qubit labels.
///
/// Reduced labels are ranks within the ascending list of kept originals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitMap {
    originals: Vec<usize>,
}

impl QubitMap {
    fn new(mut originals: Vec<usize>) -> Self {
        originals.sort_unstable();
        originals.dedup();
        QubitMap { originals }
    }

    /// Kept original qubits in ascending order (index = reduced label).
    pub fn originals(&self) -> &[usize] {
        &self.originals
    }

    /// Number of reduced qubits.
    pub fn len(&self) -> usize {
        self.originals.len()
    }

    /// True when no qubits are kept.
    pub fn is_empty(&self) -> bool {
        self.originals.is_empty()
    }

    /// Reduced label of an original qubit.
    pub fn reduced_of(&self, original: usize) -> Option<usize> {
        self.originals.binary_search(&original).ok()
    }

    /// Original qubit of a reduced label.
    pub fn original_of(&self, reduced: usize) -> Option<usize> {
        self.originals.get(reduced).copied()
    }
}

/// One term's reduced ansatz: the cone circuit over relabeled qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedAnsatz<S = f64> {
    /// The term this reduction serves, in original labels.
    pub term: PauliTerm<S>,
    /// The term's string relabeled onto the reduced register.
    pub reduced_string: PauliString,
    /// The reduced circuit (cone gates, wires relabeled by ascending rank).
    pub circuit: Circuit<S>,
    /// Original ↔ reduced qubit labels.
    pub relabel: QubitMap,
    /// Ascending original indices of the retained gates.
    pub cone_gates: Vec<usize>,
    /// The term's own exact cone (⊆ `cone_gates`), used by grouping to test
    /// whether the term is measurable from some other reduced circuit.
    pub term_cone: Vec<usize>,
}

/// Reduce a circuit to the past causal cone serving one term.
///
/// The kept gate set is `cone(P) ∪ cone(Z over support(P))`: the first part
/// protects ⟨P⟩ itself, the second the sampled bitstring statistics on the
/// support wires, so the reduced circuit supports both exact-expectation and
/// finite-shot estimation of the term. Kept qubits are the wires touched by
/// kept gates plus the term's support (support wires stay present even when
/// idle).
pub fn reduce_ansatz<S: Scalar>(
    circuit: &Circuit<S>,
    term: &PauliTerm<S>,
) -> Result<ReducedAnsatz<S>> {
    let support = term.string.support();
    if term.string.min_qubits() > circuit.qubits() {
        return Err(Error::validation(format!(
            "term {} exceeds the {}-qubit circuit",
            term.string,
            circuit.qubits()
        )));
    }
    let dag = build_dag(circuit);
    let own_cone = term_cone(circuit, &term.string)?;
    let mut kept = own_cone.clone();
    kept.extend(past_causal_cone(&dag, &support)?);
    kept.sort_unstable();
    kept.dedup();

    let mut qubits: Vec<usize> = support.clone();
    for &i in &kept {
        qubits.extend(circuit.gates()[i].qubits());
    }
    let relabel = QubitMap::new(qubits);
    let reduced_circuit = circuit.extract(&kept, relabel.originals())?;
    let reduced_string = term.string.relabeled(|q| {
        relabel
            .reduced_of(q)
            .expect("support is contained in the kept qubit set")
    })?;
    Ok(ReducedAnsatz {
        term: term.clone(),
        reduced_string,
        circuit: reduced_circuit,
        relabel,
        cone_gates: kept,
        term_cone: own_cone,
    })
}

/// The deduplicated reduced-ansatz set of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct ReducedSet<S = f64> {
    /// One entry per non-identity Hamiltonian term, in Hamiltonian order.
    pub terms: Vec<ReducedAnsatz<S>>,
    /// Indices into `terms`: the first representative of each distinct
    /// circuit, in first-appearance order.
    pub representatives: Vec<usize>,
    /// For each entry of `terms`, the index of its circuit within
    /// `representatives`.
    pub circuit_of_term: Vec<usize>,
}

impl<S: Scalar> ReducedSet<S> {
    /// Number of distinct reduced circuits.
    pub fn distinct_count(&self) -> usize {
        self.representatives.len()
    }

    /// The `i`-th distinct reduced circuit.
    pub fn circuit(&self, i: usize) -> &Circuit<S> {
        &self.terms[self.representatives[i]].circuit
    }

    /// Entries (term indices into `terms`) mapped onto distinct circuit `i`.
    pub fn members(&self, i: usize) -> Vec<usize> {
        self.circuit_of_term
            .iter()
            .enumerate()
            .filter_map(|(t, &c)| (c == i).then_some(t))
            .collect()
    }
}

/// Reduce every non-identity term and deduplicate by structural circuit
/// equality (identical gate lists over identically sized registers).
pub fn reduced_set<S: Scalar>(
    circuit: &Circuit<S>,
    hamiltonian: &Hamiltonian<S>,
) -> Result<ReducedSet<S>> {
    let mut terms: Vec<ReducedAnsatz<S>> = Vec::new();
    let mut representatives: Vec<usize> = Vec::new();
    let mut circuit_of_term = Vec::new();
    for term in hamiltonian.non_identity_terms() {
        let reduced = reduce_ansatz(circuit, term)?;
        let found = representatives
            .iter()
            .position(|&r| terms[r].circuit == reduced.circuit);
        let idx = match found {
            Some(i) => i,
            None => {
                representatives.push(terms.len());
                representatives.len() - 1
            }
        };
        circuit_of_term.push(idx);
        terms.push(reduced);
    }
    Ok(ReducedSet {
        terms,
        representatives,
        circuit_of_term,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::circuit::{AngleExpr, Gate};
    use crate::pauli::PauliTerm;
    use crate::problems;
    use crate::sim::exact::{circuit_unitary, hamiltonian_matrix};
    use crate::sim::StateVector;

    fn string(factors: &[(usize, Pauli)]) -> PauliString {
        PauliString::from_factors(factors.to_vec()).unwrap()
    }

    fn decode_monomial(code: usize, qubits: usize) -> PackedPauli {
        let mut m = PackedPauli::IDENTITY;
        let mut c = code;
        for q in 0..qubits {
            m = match c % 4 {
                0 => m,
                1 => m.with_letter(q, true, false),
                2 => m.with_letter(q, true, true),
                3 => m.with_letter(q, false, true),
                _ => unreachable!(),
            };
            c /= 4;
        }
        m
    }

    fn pauli_matrix(m: PackedPauli, qubits: usize) -> nalgebra::DMatrix<num_complex::Complex64> {
        let h = Hamiltonian::new(vec![PauliTerm {
            coefficient: 1.0,
            string: m.to_string_sparse(),
        }]);
        hamiltonian_matrix(&h, qubits).unwrap()
    }

    /// Monomials with nonzero weight in U† P U, by dense expansion.
    fn dense_image_support(
        circuit: &Circuit,
        angles: &[f64],
        observable: PackedPauli,
    ) -> HashSet<PackedPauli> {
        let n = circuit.qubits();
        let u = circuit_unitary(&circuit.bind(angles).unwrap()).unwrap();
        let image = u.adjoint() * pauli_matrix(observable, n) * &u;
        let dim = (1u32 << n) as f64;
        (0..4usize.pow(n as u32))
            .map(|code| decode_monomial(code, n))
            .filter(|&m| {
                let coeff = (pauli_matrix(m, n) * &image).trace() / dim;
                coeff.norm() > 1e-9
            })
            .collect()
    }

    /// Check one analysis unit against dense conjugation over every monomial.
    fn check_unit_against_dense(circuit: &Circuit, angle_values: &[Vec<f64>]) {
        let units = unitize(circuit);
        assert_eq!(units.len(), 1, "expected a single analysis unit");
        let unit = &units[0];
        let n = circuit.qubits();
        for code in 0..4usize.pow(n as u32) {
            let m = decode_monomial(code, n);
            let mut claimed = HashSet::new();
            unit.images(m, &mut claimed);
            let mut dense_union = HashSet::new();
            for angles in angle_values {
                dense_union.extend(dense_image_support(circuit, angles, m));
            }
            if unit.fixes(m) {
                assert_eq!(claimed, HashSet::from([m]));
                for angles in angle_values {
                    let u = circuit_unitary(&circuit.bind(angles).unwrap()).unwrap();
                    let p = pauli_matrix(m, n);
                    let diff = u.adjoint() * &p * u - p;
                    assert!(
                        diff.iter().all(|e| e.norm() < 1e-9),
                        "claimed fixed monomial {m} moved under {:?}",
                        circuit.gates()[0].kind.name()
                    );
                }
            } else {
                assert_eq!(
                    dense_union, claimed,
                    "image mismatch for {m} under {}",
                    circuit.gates()[0].kind.name()
                );
            }
        }
    }

    #[test]
    fn conjugation_rules_match_dense_conjugation() {
        let t = || AngleExpr::<f64>::symbol("t");
        let generic = vec![vec![0.3], vec![1.234], vec![-2.2]];
        let none = vec![vec![]];
        let single = |g: Gate<AngleExpr<f64>>, n: usize| Circuit::from_gates(n, vec![g]).unwrap();

        check_unit_against_dense(&single(Gate::h(0), 1), &none);
        check_unit_against_dense(&single(Gate::rx(t(), 0), 1), &generic);
        check_unit_against_dense(&single(Gate::ry(t(), 0), 1), &generic);
        check_unit_against_dense(&single(Gate::rz(t(), 0), 1), &generic);
        check_unit_against_dense(&single(Gate::xx(t(), 0, 1), 2), &generic);
        check_unit_against_dense(&single(Gate::cnot(0, 1), 2), &none);
        check_unit_against_dense(&single(Gate::cnot(1, 0), 2), &none);
        check_unit_against_dense(&single(Gate::cry(t(), 0, 1), 2), &generic);
        check_unit_against_dense(&single(Gate::cry(t(), 1, 0), 2), &generic);
    }

    #[test]
    fn fused_zz_block_matches_dense_conjugation() {
        let block = Circuit::from_gates(
            2,
            vec![
                Gate::cnot(0, 1),
                Gate::rz(AngleExpr::symbol("t"), 1),
                Gate::cnot(0, 1),
            ],
        )
        .unwrap();
        check_unit_against_dense(&block, &[vec![0.3], vec![1.234], vec![-2.2]]);
    }

    #[test]
    fn fused_zz_block_is_transparent_to_diagonal_observables() {
        let block = Circuit::from_gates(
            2,
            vec![
                Gate::cnot(0, 1),
                Gate::rz(AngleExpr::<f64>::symbol("t"), 1),
                Gate::cnot(0, 1),
            ],
        )
        .unwrap();
        assert!(term_cone(&block, &string(&[(1, Pauli::Z)])).unwrap().is_empty());
        assert_eq!(
            term_cone(&block, &string(&[(0, Pauli::X)])).unwrap(),
            vec![0, 1, 2]
        );
    }

    fn deuteron_cone(factors: &[(usize, Pauli)]) -> Vec<usize> {
        term_cone(&problems::deuteron_ansatz::<f64>(), &string(factors)).unwrap()
    }

    #[test]
    fn deuteron_term_cones_match_reference() {
        use Pauli::{X, Y, Z};
        assert_eq!(deuteron_cone(&[(0, X), (1, X)]), vec![1, 2, 3]);
        assert_eq!(deuteron_cone(&[(0, Y), (1, Y)]), vec![0, 1, 2, 3, 4]);
        assert_eq!(deuteron_cone(&[(1, X), (2, X)]), vec![1, 3, 4, 5]);
        assert_eq!(deuteron_cone(&[(1, Y), (2, Y)]), vec![1, 3, 4, 5, 6]);
        assert_eq!(deuteron_cone(&[(2, X), (3, X)]), vec![1, 3, 5, 6]);
        assert_eq!(deuteron_cone(&[(2, Y), (3, Y)]), vec![1, 3, 5, 6]);
        assert_eq!(deuteron_cone(&[(0, Z)]), vec![0, 1, 2]);
        assert_eq!(deuteron_cone(&[(1, Z)]), vec![1, 3, 4]);
        assert_eq!(deuteron_cone(&[(2, Z)]), vec![1, 3, 5, 6]);
        assert_eq!(deuteron_cone(&[(3, Z)]), vec![1, 3, 5]);
    }

    #[test]
    fn deuteron_support_cones_match_reference() {
        let circuit = problems::deuteron_ansatz::<f64>();
        let dag = build_dag(&circuit);
        assert_eq!(past_causal_cone(&dag, &[0, 1]).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(past_causal_cone(&dag, &[1, 2]).unwrap(), vec![1, 3, 4, 5, 6]);
        assert_eq!(past_causal_cone(&dag, &[2, 3]).unwrap(), vec![1, 3, 6]);
        assert_eq!(past_causal_cone(&dag, &[0, 1, 2, 3]).unwrap(), vec![0, 2, 4, 6]);
    }

    #[test]
    fn deuteron_reduction_has_six_distinct_circuits() {
        let circuit = problems::deuteron_ansatz::<f64>();
        let set = reduced_set(&circuit, &problems::deuteron_hamiltonian()).unwrap();
        assert_eq!(set.terms.len(), 10);
        assert_eq!(set.distinct_count(), 6);
        // Hamiltonian order: Z0 Z1 Z2 Z3 X0X1 Y0Y1 X1X2 Y1Y2 X2X3 Y2Y3.
        assert_eq!(set.circuit_of_term, vec![0, 1, 2, 3, 4, 4, 5, 5, 2, 2]);

        let expect = [
            (vec![0, 1, 2], vec![0, 1]),
            (vec![1, 3, 4], vec![1, 2]),
            (vec![1, 3, 5, 6], vec![1, 2, 3]),
            (vec![1, 3, 5], vec![1, 2, 3]),
            (vec![0, 1, 2, 3, 4], vec![0, 1, 2]),
            (vec![1, 3, 4, 5, 6], vec![1, 2, 3]),
        ];
        for (i, (gates, qubits)) in expect.iter().enumerate() {
            let entry = &set.terms[set.representatives[i]];
            assert_eq!(&entry.cone_gates, gates, "row {i} gate set");
            assert_eq!(entry.relabel.originals(), qubits.as_slice(), "row {i} qubits");
            assert_eq!(entry.circuit.qubits(), qubits.len());
        }
        // X2X3 relabels onto the shared {1,2,3} register as X1X2.
        let x2x3 = &set.terms[8];
        assert_eq!(
            x2x3.reduced_string,
            string(&[(1, Pauli::X), (2, Pauli::X)])
        );
    }

    #[test]
    fn dragon_reduction_has_five_distinct_circuits() {
        let circuit = problems::dragon_ansatz::<f64>();
        let set = reduced_set(&circuit, &problems::dragon_hamiltonian()).unwrap();
        assert_eq!(set.terms.len(), 5);
        assert_eq!(set.distinct_count(), 5);
        let qubit_counts: Vec<usize> = set.terms.iter().map(|t| t.circuit.qubits()).collect();
        assert_eq!(qubit_counts, vec![3, 5, 4, 3, 4]);

        // Edge (0,1): both ZZ blocks touching qubits {0,1,2} survive, but the
        // third qubit carries no mixer.
        let row = &set.terms[0];
        assert_eq!(row.cone_gates, vec![0, 1, 2, 5, 6, 7, 8, 9, 10, 20, 21]);
        assert_eq!(row.relabel.originals(), &[0, 1, 2]);
        assert_eq!(row.circuit.count_kind("RX"), 2);
        assert_eq!(row.circuit.count_kind("H"), 3);
    }

    #[test]
    fn reduced_expectations_match_full_circuit() {
        let cases: [(Circuit, Hamiltonian, &[f64]); 2] = [
            (
                problems::deuteron_ansatz::<f64>(),
                problems::deuteron_hamiltonian::<f64>(),
                &problems::DEUTERON_OPERATING_POINT,
            ),
            (
                problems::dragon_ansatz(),
                problems::dragon_hamiltonian(),
                &problems::DRAGON_OPERATING_POINT,
            ),
        ];
        for (circuit, hamiltonian, point) in cases {
            let names = circuit.parameters();
            let full_map: HashMap<String, f64> =
                names.into_iter().zip(point.iter().copied()).collect();
            let full_state = StateVector::simulate(&circuit.bind(point).unwrap()).unwrap();
            for entry in reduced_set(&circuit, &hamiltonian).unwrap().terms {
                let sub_map: HashMap<String, f64> = full_map
                    .iter()
                    .filter(|(k, _)| entry.circuit.parameters().iter().any(|p| p == *k))
                    .map(|(k, &v)| (k.clone(), v))
                    .collect();
                let reduced_state =
                    StateVector::simulate(&entry.circuit.bind_named(&sub_map).unwrap()).unwrap();
                let full = full_state.expectation(&entry.term.string).unwrap();
                let reduced = reduced_state.expectation(&entry.reduced_string).unwrap();
                assert!(
                    (full - reduced).abs() < 1e-12,
                    "term {}: full {full} vs reduced {reduced}",
                    entry.term.string
                );
            }
        }
    }

    #[test]
    fn deleting_any_gate_outside_a_cone_preserves_the_expectation() {
        let circuit = problems::deuteron_ansatz::<f64>();
        let point = &problems::DEUTERON_OPERATING_POINT;
        let all_qubits: Vec<usize> = (0..circuit.qubits()).collect();
        let reference = StateVector::simulate(&circuit.bind(point).unwrap()).unwrap();
        for term in problems::deuteron_hamiltonian::<f64>().non_identity_terms() {
            let cone = term_cone(&circuit, &term.string).unwrap();
            let expected = reference.expectation(&term.string).unwrap();
            for dropped in 0..circuit.len() {
                if cone.contains(&dropped) {
                    continue;
                }
                let kept: Vec<usize> = (0..circuit.len()).filter(|&i| i != dropped).collect();
                let pruned = circuit.extract(&kept, &all_qubits).unwrap();
                let names = pruned.parameters();
                let values: Vec<f64> = names
                    .iter()
                    .map(|n| {
                        let pos = circuit.parameters().iter().position(|p| p == n).unwrap();
                        point[pos]
                    })
                    .collect();
                let state = StateVector::simulate(&pruned.bind(&values).unwrap()).unwrap();
                let got = state.expectation(&term.string).unwrap();
                assert!(
                    (got - expected).abs() < 1e-10,
                    "dropping dead gate {dropped} changed ⟨{}⟩",
                    term.string
                );
            }
        }
    }

    #[test]
    fn exact_cone_is_contained_in_the_structural_cone() {
        for (circuit, hamiltonian) in [
            (
                problems::deuteron_ansatz::<f64>(),
                problems::deuteron_hamiltonian::<f64>(),
            ),
            (problems::dragon_ansatz(), problems::dragon_hamiltonian()),
        ] {
            let dag = build_dag(&circuit);
            for term in hamiltonian.non_identity_terms() {
                let exact = term_cone(&circuit, &term.string).unwrap();
                let structural = dag.reachable_cone(&term.string.support()).unwrap();
                assert!(
                    exact.iter().all(|g| structural.contains(g)),
                    "exact cone of {} escapes the structural cone",
                    term.string
                );
            }
        }
    }

    #[test]
    fn dag_threads_wires_correctly() {
        let deuteron = problems::deuteron_ansatz::<f64>();
        let dag = build_dag(&deuteron);
        assert_eq!(dag.node_count(), 7);
        // The X rotation on qubit 0 feeds exactly one later gate: the CNOT.
        assert_eq!(dag.successors(0), &[2]);
        assert_eq!(dag.predecessors(2), &[1, 0]);
        assert_eq!(dag.wire_output(0), Some(2));
        assert_eq!(dag.wire_output(3), Some(6));

        let dragon = problems::dragon_ansatz::<f64>();
        let dag = build_dag(&dragon);
        // The first entangler's in-edges come from both Hadamard nodes.
        assert_eq!(dag.predecessors(5), &[0, 1]);
    }

    #[test]
    fn structural_cone_is_monotone_and_backward_closed() {
        let circuit = problems::deuteron_ansatz::<f64>();
        let dag = build_dag(&circuit);
        let small = dag.reachable_cone(&[1]).unwrap();
        let large = dag.reachable_cone(&[1, 2]).unwrap();
        assert!(small.iter().all(|g| large.contains(g)));
        for &g in &large {
            for &p in dag.predecessors(g) {
                assert!(large.contains(&p), "predecessor {p} of {g} missing");
            }
        }
        let full = dag.reachable_cone(&[0, 1, 2, 3]).unwrap();
        assert_eq!(full, (0..circuit.len()).collect::<Vec<_>>());
    }

    #[test]
    fn identity_and_idle_support_reductions() {
        let circuit = problems::deuteron_ansatz::<f64>();
        let identity = PauliTerm {
            coefficient: 1.0,
            string: PauliString::identity(),
        };
        let reduced = reduce_ansatz(&circuit, &identity).unwrap();
        assert!(reduced.cone_gates.is_empty());
        assert!(reduced.relabel.is_empty());
        assert_eq!(reduced.circuit.qubits(), 0);

        let sparse = Circuit::from_gates(2, vec![Gate::<AngleExpr<f64>>::h(0)]).unwrap();
        let idle = PauliTerm {
            coefficient: 1.0,
            string: string(&[(1, Pauli::Z)]),
        };
        let reduced = reduce_ansatz(&sparse, &idle).unwrap();
        assert!(reduced.cone_gates.is_empty());
        assert_eq!(reduced.relabel.originals(), &[1]);
        assert_eq!(reduced.circuit.qubits(), 1);
        assert!(reduced.circuit.is_empty());
        assert_eq!(reduced.reduced_string, string(&[(0, Pauli::Z)]));
    }

    #[test]
    fn oversized_registers_hit_the_numeric_guard() {
        let circuit = Circuit::<f64>::new(65);
        let err = term_cone(&circuit, &string(&[(0, Pauli::Z)])).unwrap_err();
        assert!(matches!(err, Error::NumericGuard(_)));
    }
}
