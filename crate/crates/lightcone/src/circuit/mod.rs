//! Gate-level circuit intermediate representation.
//!
//! The gate set is deliberately small: `H`, the rotations `RX/RY/RZ` with
//! half-angle convention `R_P(θ) = exp(−iθP/2)`, `CNOT`, the controlled
//! rotation `CRY(θ)` (RY(θ) on the target when the control is |1⟩), and the
//! native two-qubit rotation `XX(θ) = exp(−iθ(X⊗X)/2)`.
//!
//! Angles are [`AngleExpr`] values: either literals or a single affine
//! transform `scale·symbol + offset` of a named parameter. That is exactly
//! enough for the ansatz families handled here and keeps rewriting passes
//! symbolic (a compilation pass never needs to know parameter values).
//!
//! Circuits serialize to a line-oriented text format:
//!
//! ```text
//! qubits 4
//! RX(3.14159) 0          # literal angle
//! RY(phi) 1              # symbolic angle
//! CNOT 1 0
//! CRY(lambda1) 1 2
//! XX(0.5*gamma) 0 1      # affine angle scale*symbol+offset
//! ```

mod text;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

// ---------------------------------------------------------------------------
// Angle expressions
// ---------------------------------------------------------------------------

/// A gate angle: a literal or one affine transform of a named parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum AngleExpr<S> {
    /// A fixed angle in radians.
    Literal(S),
    /// `scale · symbol + offset`.
    Symbolic {
        symbol: String,
        scale: S,
        offset: S,
    },
}

impl<S: Scalar> AngleExpr<S> {
    /// A bare named parameter (scale 1, offset 0).
    pub fn symbol(name: impl Into<String>) -> Self {
        AngleExpr::Symbolic {
            symbol: name.into(),
            scale: S::one(),
            offset: S::zero(),
        }
    }

    /// `scale · name + offset`.
    pub fn affine(scale: S, name: impl Into<String>, offset: S) -> Self {
        AngleExpr::Symbolic {
            symbol: name.into(),
            scale,
            offset,
        }
    }

    /// The parameter name this expression depends on, if any.
    pub fn symbol_name(&self) -> Option<&str> {
        match self {
            AngleExpr::Literal(_) => None,
            AngleExpr::Symbolic { symbol, .. } => Some(symbol),
        }
    }

    /// Evaluate under a parameter assignment.
    pub fn evaluate(&self, params: &HashMap<String, S>) -> Result<S> {
        match self {
            AngleExpr::Literal(v) => Ok(*v),
            AngleExpr::Symbolic {
                symbol,
                scale,
                offset,
            } => params
                .get(symbol)
                .map(|v| *scale * *v + *offset)
                .ok_or_else(|| Error::validation(format!("unbound parameter `{symbol}`"))),
        }
    }

    /// Add a constant to this expression (stays within the affine form).
    pub fn shifted(&self, delta: S) -> Self {
        match self {
            AngleExpr::Literal(v) => AngleExpr::Literal(*v + delta),
            AngleExpr::Symbolic {
                symbol,
                scale,
                offset,
            } => AngleExpr::Symbolic {
                symbol: symbol.clone(),
                scale: *scale,
                offset: *offset + delta,
            },
        }
    }

    /// Negate this expression (stays within the affine form).
    pub fn negated(&self) -> Self {
        match self {
            AngleExpr::Literal(v) => AngleExpr::Literal(-*v),
            AngleExpr::Symbolic {
                symbol,
                scale,
                offset,
            } => AngleExpr::Symbolic {
                symbol: symbol.clone(),
                scale: -*scale,
                offset: -*offset,
            },
        }
    }

    /// Scale this expression by a constant (stays within the affine form).
    pub fn scaled(&self, factor: S) -> Self {
        match self {
            AngleExpr::Literal(v) => AngleExpr::Literal(*v * factor),
            AngleExpr::Symbolic {
                symbol,
                scale,
                offset,
            } => AngleExpr::Symbolic {
                symbol: symbol.clone(),
                scale: *scale * factor,
                offset: *offset * factor,
            },
        }
    }

    /// Sum of two expressions, if the result is still affine in one symbol.
    ///
    /// Returns `None` when both sides are symbolic in different parameters.
    pub fn try_add(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (AngleExpr::Literal(a), AngleExpr::Literal(b)) => Some(AngleExpr::Literal(*a + *b)),
            (AngleExpr::Literal(a), sym @ AngleExpr::Symbolic { .. }) => Some(sym.shifted(*a)),
            (sym @ AngleExpr::Symbolic { .. }, AngleExpr::Literal(b)) => Some(sym.shifted(*b)),
            (
                AngleExpr::Symbolic {
                    symbol: sa,
                    scale: ka,
                    offset: oa,
                },
                AngleExpr::Symbolic {
                    symbol: sb,
                    scale: kb,
                    offset: ob,
                },
            ) => {
                if sa != sb {
                    return None;
                }
                let scale = *ka + *kb;
                let offset = *oa + *ob;
                if scale == S::zero() {
                    Some(AngleExpr::Literal(offset))
                } else {
                    Some(AngleExpr::Symbolic {
                        symbol: sa.clone(),
                        scale,
                        offset,
                    })
                }
            }
        }
    }

    /// True when the expression is a literal equal to `value` within `tol`.
    pub fn is_literal_near(&self, value: S, tol: S) -> bool {
        matches!(self, AngleExpr::Literal(v) if (*v - value).abs() <= tol)
    }
}

impl<S: Scalar> From<S> for AngleExpr<S> {
    fn from(v: S) -> Self {
        AngleExpr::Literal(v)
    }
}

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

/// Gate kind, generic over the angle payload.
///
/// `A = AngleExpr<S>` inside a [`Circuit`]; `A = S` inside a [`BoundCircuit`].
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind<A> {
    H,
    RX(A),
    RY(A),
    RZ(A),
    CNOT,
    CRY(A),
    XX(A),
}

impl<A> GateKind<A> {
    /// Mnemonic used in the text format.
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::RX(_) => "RX",
            GateKind::RY(_) => "RY",
            GateKind::RZ(_) => "RZ",
            GateKind::CNOT => "CNOT",
            GateKind::CRY(_) => "CRY",
            GateKind::XX(_) => "XX",
        }
    }

    /// Number of operand qubits.
    pub fn arity(&self) -> usize {
        match self {
            GateKind::H | GateKind::RX(_) | GateKind::RY(_) | GateKind::RZ(_) => 1,
            GateKind::CNOT | GateKind::CRY(_) | GateKind::XX(_) => 2,
        }
    }

    /// The angle payload, if this kind is parameterized.
    pub fn angle(&self) -> Option<&A> {
        match self {
            GateKind::RX(a) | GateKind::RY(a) | GateKind::RZ(a) | GateKind::CRY(a)
            | GateKind::XX(a) => Some(a),
            GateKind::H | GateKind::CNOT => None,
        }
    }

    /// Map the angle payload, preserving the kind.
    pub fn map_angle<B>(&self, mut f: impl FnMut(&A) -> B) -> GateKind<B> {
        match self {
            GateKind::H => GateKind::H,
            GateKind::RX(a) => GateKind::RX(f(a)),
            GateKind::RY(a) => GateKind::RY(f(a)),
            GateKind::RZ(a) => GateKind::RZ(f(a)),
            GateKind::CNOT => GateKind::CNOT,
            GateKind::CRY(a) => GateKind::CRY(f(a)),
            GateKind::XX(a) => GateKind::XX(f(a)),
        }
    }

    /// Fallible variant of [`GateKind::map_angle`].
    pub fn try_map_angle<B, E>(
        &self,
        mut f: impl FnMut(&A) -> std::result::Result<B, E>,
    ) -> std::result::Result<GateKind<B>, E> {
        Ok(match self {
            GateKind::H => GateKind::H,
            GateKind::RX(a) => GateKind::RX(f(a)?),
            GateKind::RY(a) => GateKind::RY(f(a)?),
            GateKind::RZ(a) => GateKind::RZ(f(a)?),
            GateKind::CNOT => GateKind::CNOT,
            GateKind::CRY(a) => GateKind::CRY(f(a)?),
            GateKind::XX(a) => GateKind::XX(f(a)?),
        })
    }
}

/// Operand qubits of a gate, by arity.
///
/// Order is load-bearing for `CNOT` and `CRY` (control first, target second);
/// `XX` is symmetric but the order is preserved for round-tripping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operands {
    One([usize; 1]),
    Two([usize; 2]),
}

impl Operands {
    /// Operands as a slice, in declaration order.
    pub fn as_slice(&self) -> &[usize] {
        match self {
            Operands::One(q) => q,
            Operands::Two(q) => q,
        }
    }
}

/// One gate: a kind plus its operand qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate<A> {
    pub kind: GateKind<A>,
    pub operands: Operands,
}

impl<A> Gate<A> {
    /// Operand qubits in declaration order.
    pub fn qubits(&self) -> &[usize] {
        self.operands.as_slice()
    }

    /// True when the gate acts on `qubit`.
    pub fn touches(&self, qubit: usize) -> bool {
        self.qubits().contains(&qubit)
    }

    /// Remap operand qubits through `f` (used when extracting subcircuits).
    pub fn relabeled(&self, f: impl Fn(usize) -> usize) -> Gate<A>
    where
        A: Clone,
    {
        let operands = match self.operands {
            Operands::One([a]) => Operands::One([f(a)]),
            Operands::Two([a, b]) => Operands::Two([f(a), f(b)]),
        };
        Gate {
            kind: self.kind.clone(),
            operands,
        }
    }
}

/// Gates of a symbolic circuit.
pub type SymbolicGate<S> = Gate<AngleExpr<S>>;

impl<S: Scalar> SymbolicGate<S> {
    pub fn h(q: usize) -> Self {
        Gate {
            kind: GateKind::H,
            operands: Operands::One([q]),
        }
    }
    pub fn rx(angle: impl Into<AngleExpr<S>>, q: usize) -> Self {
        Gate {
            kind: GateKind::RX(angle.into()),
            operands: Operands::One([q]),
        }
    }
    pub fn ry(angle: impl Into<AngleExpr<S>>, q: usize) -> Self {
        Gate {
            kind: GateKind::RY(angle.into()),
            operands: Operands::One([q]),
        }
    }
    pub fn rz(angle: impl Into<AngleExpr<S>>, q: usize) -> Self {
        Gate {
            kind: GateKind::RZ(angle.into()),
            operands: Operands::One([q]),
        }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::CNOT,
            operands: Operands::Two([control, target]),
        }
    }
    pub fn cry(angle: impl Into<AngleExpr<S>>, control: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::CRY(angle.into()),
            operands: Operands::Two([control, target]),
        }
    }
    pub fn xx(angle: impl Into<AngleExpr<S>>, a: usize, b: usize) -> Self {
        Gate {
            kind: GateKind::XX(angle.into()),
            operands: Operands::Two([a, b]),
        }
    }
}

// ---------------------------------------------------------------------------
// Circuits
// ---------------------------------------------------------------------------

/// A parameterized circuit: a qubit count plus an ordered gate list.
///
/// Parameters are implicit: every distinct symbol appearing in any angle, in
/// first-appearance order. [`Circuit::bind`] substitutes values positionally
/// in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<S = f64> {
    qubits: usize,
    gates: Vec<SymbolicGate<S>>,
}

impl<S: Scalar> Circuit<S> {
    /// An empty circuit on `qubits` wires.
    pub fn new(qubits: usize) -> Self {
        Circuit {
            qubits,
            gates: Vec::new(),
        }
    }

    /// Append a gate after validating its operands.
    pub fn push(&mut self, gate: SymbolicGate<S>) -> Result<()> {
        validate_operands(&gate, self.qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Build from parts, validating every gate.
    pub fn from_gates(qubits: usize, gates: Vec<SymbolicGate<S>>) -> Result<Self> {
        let mut c = Circuit::new(qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    /// Number of wires.
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Gates in time order.
    pub fn gates(&self) -> &[SymbolicGate<S>] {
        &self.gates
    }

    /// Total gate count.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    /// True when the circuit has no gates.
    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of two-qubit gates.
    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind.arity() == 2).count()
    }

    /// Number of gates whose mnemonic equals `name` (e.g. `"XX"`).
    pub fn count_kind(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.kind.name() == name).count()
    }

    /// Distinct parameter names in first-appearance order.
    pub fn parameters(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for gate in &self.gates {
            if let Some(sym) = gate.kind.angle().and_then(|a| a.symbol_name()) {
                if !seen.iter().any(|s: &String| s == sym) {
                    seen.push(sym.to_string());
                }
            }
        }
        seen
    }

    /// Circuit depth: number of layers under as-soon-as-possible scheduling.
    pub fn depth(&self) -> usize {
        let mut wire_depth = vec![0usize; self.qubits];
        let mut depth = 0;
        for gate in &self.gates {
            let layer = gate
                .qubits()
                .iter()
                .map(|&q| wire_depth[q])
                .max()
                .unwrap_or(0)
                + 1;
            for &q in gate.qubits() {
                wire_depth[q] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }

    /// Bind parameters positionally, in [`Circuit::parameters`] order.
    pub fn bind(&self, values: &[S]) -> Result<BoundCircuit<S>> {
        let names = self.parameters();
        if names.len() != values.len() {
            return Err(Error::validation(format!(
                "circuit takes {} parameter(s) ({}), got {} value(s)",
                names.len(),
                names.join(", "),
                values.len()
            )));
        }
        let map: HashMap<String, S> = names.into_iter().zip(values.iter().copied()).collect();
        self.bind_named(&map)
    }

    /// Bind parameters by name. Every circuit parameter must be present;
    /// unused entries are rejected to surface config typos.
    pub fn bind_named(&self, params: &HashMap<String, S>) -> Result<BoundCircuit<S>> {
        let names = self.parameters();
        for key in params.keys() {
            if !names.iter().any(|n| n == key) {
                return Err(Error::validation(format!(
                    "parameter `{key}` does not appear in the circuit"
                )));
            }
        }
        let gates = self
            .gates
            .iter()
            .map(|g| {
                Ok(Gate {
                    kind: g.kind.try_map_angle(|a| a.evaluate(params))?,
                    operands: g.operands,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundCircuit {
            qubits: self.qubits,
            gates,
        })
    }

    /// Extract the gates at `indices` (in circuit order) onto a fresh circuit
    /// over `kept_qubits`, relabeling wires by rank within `kept_qubits`.
    ///
    /// `kept_qubits` must be sorted, deduplicated, and cover every operand of
    /// the selected gates.
    pub fn extract(&self, indices: &[usize], kept_qubits: &[usize]) -> Result<Circuit<S>> {
        debug_assert!(kept_qubits.windows(2).all(|w| w[0] < w[1]));
        let rank = |q: usize| -> Result<usize> {
            kept_qubits
                .binary_search(&q)
                .map_err(|_| Error::validation(format!("qubit {q} not in the kept set")))
        };
        let mut out = Circuit::new(kept_qubits.len());
        for &i in indices {
            let gate = self
                .gates
                .get(i)
                .ok_or_else(|| Error::validation(format!("gate index {i} out of range")))?;
            let mut mapped = Vec::with_capacity(2);
            for &q in gate.qubits() {
                mapped.push(rank(q)?);
            }
            let operands = match mapped.as_slice() {
                [a] => Operands::One([*a]),
                [a, b] => Operands::Two([*a, *b]),
                _ => unreachable!("gate arity is 1 or 2"),
            };
            out.push(Gate {
                kind: gate.kind.clone(),
                operands,
            })?;
        }
        Ok(out)
    }
}

fn validate_operands<A>(gate: &Gate<A>, qubits: usize) -> Result<()> {
    let ops = gate.qubits();
    if gate.kind.arity() != ops.len() {
        return Err(Error::validation(format!(
            "{} takes {} operand(s), got {}",
            gate.kind.name(),
            gate.kind.arity(),
            ops.len()
        )));
    }
    for &q in ops {
        if q >= qubits {
            return Err(Error::validation(format!(
                "{} operand qubit {q} out of range for {qubits} qubit(s)",
                gate.kind.name()
            )));
        }
    }
    if let [a, b] = ops {
        if a == b {
            return Err(Error::validation(format!(
                "{} operands must be distinct, got ({a}, {b})",
                gate.kind.name()
            )));
        }
    }
    Ok(())
}

impl<S: Scalar> fmt::Display for Circuit<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::write_circuit(self, f)
    }
}

// ---------------------------------------------------------------------------
// Bound circuits
// ---------------------------------------------------------------------------

/// A circuit with every angle resolved to a literal value.
///
/// This is the only form the simulator accepts, which keeps "unbound
/// parameter" a binding-time error rather than a runtime one.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCircuit<S = f64> {
    qubits: usize,
    gates: Vec<Gate<S>>,
}

impl<S: Scalar> BoundCircuit<S> {
    /// Assemble from raw parts. Crate-internal: callers must pass gates whose
    /// operands were already validated against `qubits`.
    pub(crate) fn from_parts(qubits: usize, gates: Vec<Gate<S>>) -> Self {
        debug_assert!(gates
            .iter()
            .all(|g| validate_operands(g, qubits).is_ok()));
        BoundCircuit { qubits, gates }
    }

    /// Number of wires.
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Gates in time order, with literal angles.
    pub fn gates(&self) -> &[Gate<S>] {
        &self.gates
    }
}
