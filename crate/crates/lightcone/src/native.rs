//! Compilation onto the trapped-ion native gate set {RX, RY, RZ, XX(θ)}.
//!
//! Translation applies a fixed registry of [`RewriteRule`]s, each of which
//! carries a pattern and a replacement implementing the same unitary up to
//! global phase. The registry is self-verifying: [`verify_rules`] binds every
//! rule at randomized angles and compares dense unitaries, so a wrong sign in
//! any identity is caught mechanically rather than by inspection.
//!
//! Two optimization levels exist:
//!
//! - [`OptLevel::Direct`]: every `CNOT` costs one XX and every `CRY` two
//!   (the literal gate-by-gate identities);
//! - [`OptLevel::Fused`]: consecutive `CNOT·R(θ)·CNOT` conjugations with the
//!   rotation on the target wire collapse into a single XX(θ) dressed with
//!   one-qubit rotations, so a `CRY` costs one XX.
//!
//! [`peephole_optimize`] then runs true rewrites to a fixed point: adjacent
//! same-axis rotation merging (across gates they commute with, e.g. RX
//! through XX on a shared wire), elimination of rotations that are full
//! turns (angle ≡ 0 mod 2π, a pure global phase), and, opt-in, absorption of
//! trailing RZ gates ahead of Z-basis measurement. RZ costs nothing on the
//! target hardware (phases advance in the classical controllers), so the
//! pass ranks XX count first, then RX/RY.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::circuit::{AngleExpr, Circuit, Gate, GateKind, SymbolicGate};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
pub use crate::sim::exact::unitary_equiv;

// ---------------------------------------------------------------------------
// Rewrite rules
// ---------------------------------------------------------------------------

/// A verified circuit identity: `pattern ≡ replacement` up to global phase.
///
/// Templates are instantiated over wires `0..qubits` with `angles` free angle
/// expressions. [`verify_rules`] checks every rule numerically at 20
/// randomized angle samples to 1e−10.
pub struct RewriteRule<S: Scalar> {
    /// Stable rule name (used in verification failure messages).
    pub name: &'static str,
    /// Wires the templates act on.
    pub qubits: usize,
    /// Free angles the templates take.
    pub angles: usize,
    pattern: fn(&[AngleExpr<S>]) -> Vec<SymbolicGate<S>>,
    replacement: fn(&[AngleExpr<S>]) -> Vec<SymbolicGate<S>>,
}

impl<S: Scalar> RewriteRule<S> {
    /// Instantiate the pattern over the template wires.
    pub fn pattern(&self, angles: &[AngleExpr<S>]) -> Vec<SymbolicGate<S>> {
        assert_eq!(angles.len(), self.angles, "rule `{}` angle count", self.name);
        (self.pattern)(angles)
    }

    /// Instantiate the replacement over the template wires.
    pub fn replacement(&self, angles: &[AngleExpr<S>]) -> Vec<SymbolicGate<S>> {
        assert_eq!(angles.len(), self.angles, "rule `{}` angle count", self.name);
        (self.replacement)(angles)
    }
}

fn half<S: Scalar>() -> S {
    S::from_f64_lossy(0.5)
}

fn h_to_native<S: Scalar>(q: usize, out: &mut Vec<SymbolicGate<S>>) {
    out.push(Gate::ry(-S::FRAC_PI_2(), q));
    out.push(Gate::rz(S::PI(), q));
}

fn cnot_to_native<S: Scalar>(c: usize, t: usize, out: &mut Vec<SymbolicGate<S>>) {
    out.push(Gate::ry(S::FRAC_PI_2(), c));
    out.push(Gate::xx(S::FRAC_PI_2(), c, t));
    out.push(Gate::rx(-S::FRAC_PI_2(), c));
    out.push(Gate::rx(-S::FRAC_PI_2(), t));
    out.push(Gate::ry(-S::FRAC_PI_2(), c));
}

fn cry_to_canonical<S: Scalar>(
    angle: &AngleExpr<S>,
    c: usize,
    t: usize,
    out: &mut Vec<SymbolicGate<S>>,
) {
    out.push(Gate::ry(angle.scaled(half()), t));
    out.push(Gate::cnot(c, t));
    out.push(Gate::ry(angle.scaled(half()).negated(), t));
    out.push(Gate::cnot(c, t));
}

/// `CNOT · RY(θ) on target · CNOT` as one XX(θ) conjugation.
fn ry_sandwich_to_native<S: Scalar>(
    angle: &AngleExpr<S>,
    c: usize,
    t: usize,
    out: &mut Vec<SymbolicGate<S>>,
) {
    out.push(Gate::rx(-S::FRAC_PI_2(), c));
    out.push(Gate::rz(-S::FRAC_PI_2(), c));
    out.push(Gate::rz(-S::FRAC_PI_2(), t));
    out.push(Gate::xx(angle.clone(), c, t));
    out.push(Gate::rz(S::FRAC_PI_2(), c));
    out.push(Gate::rz(S::FRAC_PI_2(), t));
    out.push(Gate::rx(S::FRAC_PI_2(), c));
}

/// `CNOT · RZ(θ) on target · CNOT` as one XX(θ) conjugation.
fn rz_sandwich_to_native<S: Scalar>(
    angle: &AngleExpr<S>,
    c: usize,
    t: usize,
    out: &mut Vec<SymbolicGate<S>>,
) {
    out.push(Gate::ry(-S::FRAC_PI_2(), c));
    out.push(Gate::ry(-S::FRAC_PI_2(), t));
    out.push(Gate::xx(angle.clone(), c, t));
    out.push(Gate::ry(S::FRAC_PI_2(), c));
    out.push(Gate::ry(S::FRAC_PI_2(), t));
}

/// The rule registry, in application order of the compiler passes.
pub fn rules<S: Scalar>() -> Vec<RewriteRule<S>> {
    vec![
        RewriteRule {
            name: "h-to-native",
            qubits: 1,
            angles: 0,
            pattern: |_| vec![Gate::h(0)],
            replacement: |_| {
                let mut out = Vec::new();
                h_to_native(0, &mut out);
                out
            },
        },
        RewriteRule {
            name: "cnot-to-native",
            qubits: 2,
            angles: 0,
            pattern: |_| vec![Gate::cnot(0, 1)],
            replacement: |_| {
                let mut out = Vec::new();
                cnot_to_native(0, 1, &mut out);
                out
            },
        },
        RewriteRule {
            name: "cry-expansion",
            qubits: 2,
            angles: 1,
            pattern: |a| vec![Gate::cry(a[0].clone(), 0, 1)],
            replacement: |a| {
                let mut out = Vec::new();
                cry_to_canonical(&a[0], 0, 1, &mut out);
                out
            },
        },
        RewriteRule {
            name: "ry-conjugation-fusion",
            qubits: 2,
            angles: 1,
            pattern: |a| {
                vec![
                    Gate::cnot(0, 1),
                    Gate::ry(a[0].clone(), 1),
                    Gate::cnot(0, 1),
                ]
            },
            replacement: |a| {
                let mut out = Vec::new();
                ry_sandwich_to_native(&a[0], 0, 1, &mut out);
                out
            },
        },
        RewriteRule {
            name: "rz-conjugation-fusion",
            qubits: 2,
            angles: 1,
            pattern: |a| {
                vec![
                    Gate::cnot(0, 1),
                    Gate::rz(a[0].clone(), 1),
                    Gate::cnot(0, 1),
                ]
            },
            replacement: |a| {
                let mut out = Vec::new();
                rz_sandwich_to_native(&a[0], 0, 1, &mut out);
                out
            },
        },
        RewriteRule {
            name: "rx-through-xx",
            qubits: 2,
            angles: 2,
            pattern: |a| vec![Gate::rx(a[0].clone(), 0), Gate::xx(a[1].clone(), 0, 1)],
            replacement: |a| vec![Gate::xx(a[1].clone(), 0, 1), Gate::rx(a[0].clone(), 0)],
        },
        RewriteRule {
            name: "same-axis-merge",
            qubits: 1,
            angles: 2,
            pattern: |a| vec![Gate::rz(a[0].clone(), 0), Gate::rz(a[1].clone(), 0)],
            replacement: |a| {
                let merged = a[0].try_add(&a[1]).expect("literal template angles");
                vec![Gate::rz(merged, 0)]
            },
        },
        RewriteRule {
            name: "xx-merge",
            qubits: 2,
            angles: 2,
            pattern: |a| {
                vec![
                    Gate::xx(a[0].clone(), 0, 1),
                    Gate::xx(a[1].clone(), 1, 0),
                ]
            },
            replacement: |a| {
                let merged = a[0].try_add(&a[1]).expect("literal template angles");
                vec![Gate::xx(merged, 0, 1)]
            },
        },
        RewriteRule {
            name: "xx-inverse-cancellation",
            qubits: 2,
            angles: 1,
            pattern: |a| {
                vec![
                    Gate::xx(a[0].clone(), 0, 1),
                    Gate::xx(a[0].negated(), 0, 1),
                ]
            },
            replacement: |_| Vec::new(),
        },
        RewriteRule {
            name: "full-turn-elimination",
            qubits: 1,
            angles: 0,
            pattern: |_| vec![Gate::rx(S::TAU(), 0)],
            replacement: |_| Vec::new(),
        },
    ]
}

/// Numerically verify every registered rule: 20 random angle samples per
/// rule, dense unitaries compared up to global phase at 1e−10.
pub fn verify_rules() -> Result<()> {
    use crate::sim::exact::circuit_unitary;
    let mut rng = ChaCha12Rng::seed_from_u64(0x1de9717e5);
    for rule in rules::<f64>() {
        for _ in 0..20 {
            let angles: Vec<AngleExpr<f64>> = (0..rule.angles)
                .map(|_| AngleExpr::Literal(rng.gen_range(-std::f64::consts::TAU..std::f64::consts::TAU)))
                .collect();
            let pattern = Circuit::from_gates(rule.qubits, rule.pattern(&angles))?.bind(&[])?;
            let replacement =
                Circuit::from_gates(rule.qubits, rule.replacement(&angles))?.bind(&[])?;
            if !unitary_equiv(
                &circuit_unitary(&pattern)?,
                &circuit_unitary(&replacement)?,
                1e-10,
            ) {
                return Err(Error::validation(format!(
                    "rewrite rule `{}` failed numeric verification",
                    rule.name
                )));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Translation
// ---------------------------------------------------------------------------

/// Translation aggressiveness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OptLevel {
    /// Gate-by-gate identities: CNOT → 1 XX, CRY → 2 XX.
    #[default]
    Direct,
    /// Additionally fuse consecutive `CNOT·R(θ)·CNOT` conjugations (rotation
    /// on the target wire) into a single XX(θ): CRY → 1 XX.
    Fused,
}

impl OptLevel {
    /// Parse a CLI-style numeric level (0 or 1).
    pub fn from_index(level: u8) -> Result<Self> {
        match level {
            0 => Ok(OptLevel::Direct),
            1 => Ok(OptLevel::Fused),
            _ => Err(Error::validation(format!(
                "optimization level must be 0 or 1, got {level}"
            ))),
        }
    }

    /// The numeric level.
    pub fn index(self) -> u8 {
        match self {
            OptLevel::Direct => 0,
            OptLevel::Fused => 1,
        }
    }
}

/// True when every gate is in the native set {RX, RY, RZ, XX}.
pub fn is_native<S: Scalar>(circuit: &Circuit<S>) -> bool {
    circuit.gates().iter().all(|g| {
        matches!(
            g.kind,
            GateKind::RX(_) | GateKind::RY(_) | GateKind::RZ(_) | GateKind::XX(_)
        )
    })
}

/// Gate counts by mnemonic, in a fixed order (zero counts included).
pub fn gate_counts<S: Scalar>(circuit: &Circuit<S>) -> Vec<(&'static str, usize)> {
    ["H", "RX", "RY", "RZ", "CNOT", "CRY", "XX"]
        .into_iter()
        .map(|name| (name, circuit.count_kind(name)))
        .collect()
}

/// Translate a canonical circuit to native gates at [`OptLevel::Direct`].
pub fn to_native<S: Scalar>(circuit: &Circuit<S>) -> Circuit<S> {
    to_native_opt(circuit, OptLevel::Direct)
}

/// Translate a canonical circuit to native gates.
///
/// The output acts on the same wires and the same parameters (angle affine
/// transforms compose through the rules), and implements the same unitary up
/// to global phase.
pub fn to_native_opt<S: Scalar>(circuit: &Circuit<S>, level: OptLevel) -> Circuit<S> {
    // Stage 1: lower CRY onto {RY, CNOT} so conjugation fusion sees through it.
    let mut staged: Vec<SymbolicGate<S>> = Vec::with_capacity(circuit.len() * 2);
    for gate in circuit.gates() {
        match (&gate.kind, gate.qubits()) {
            (GateKind::CRY(angle), &[c, t]) => cry_to_canonical(angle, c, t, &mut staged),
            _ => staged.push(gate.clone()),
        }
    }

    // Stage 2: emit native gates, fusing CNOT·R·CNOT triples when allowed.
    let mut out: Vec<SymbolicGate<S>> = Vec::with_capacity(staged.len() * 2);
    let mut i = 0;
    while i < staged.len() {
        if level == OptLevel::Fused && i + 2 < staged.len() {
            if let Some((c, t)) = sandwich_at(&staged, i) {
                match &staged[i + 1].kind {
                    GateKind::RY(angle) => ry_sandwich_to_native(angle, c, t, &mut out),
                    GateKind::RZ(angle) => rz_sandwich_to_native(angle, c, t, &mut out),
                    _ => unreachable!("sandwich_at only matches RY/RZ fillings"),
                }
                i += 3;
                continue;
            }
        }
        let gate = &staged[i];
        match (&gate.kind, gate.qubits()) {
            (GateKind::H, &[q]) => h_to_native(q, &mut out),
            (GateKind::CNOT, &[c, t]) => cnot_to_native(c, t, &mut out),
            (GateKind::RX(_) | GateKind::RY(_) | GateKind::RZ(_) | GateKind::XX(_), _) => {
                out.push(gate.clone())
            }
            (GateKind::CRY(_), _) => unreachable!("CRY lowered in stage 1"),
            _ => unreachable!("gate arity validated at construction"),
        }
        i += 1;
    }
    Circuit::from_gates(circuit.qubits(), out).expect("translated operands stay in range")
}

/// Match `CNOT(c,t) · R(θ) on t · CNOT(c,t)` starting at position `i`.
fn sandwich_at<S: Scalar>(gates: &[SymbolicGate<S>], i: usize) -> Option<(usize, usize)> {
    let (GateKind::CNOT, &[c, t]) = (&gates[i].kind, gates[i].qubits()) else {
        return None;
    };
    let filling_on_target = matches!(gates[i + 1].kind, GateKind::RY(_) | GateKind::RZ(_))
        && gates[i + 1].qubits() == [t];
    let closing = matches!(gates[i + 2].kind, GateKind::CNOT) && gates[i + 2].qubits() == [c, t];
    (filling_on_target && closing).then_some((c, t))
}

// ---------------------------------------------------------------------------
// Peephole optimization
// ---------------------------------------------------------------------------

/// Peephole pass configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct PeepholeOptions {
    /// Drop RZ gates with no later non-RZ gate on their wire. Sound only for
    /// circuits followed by Z-basis measurement (it changes the unitary but
    /// not the measured distribution), hence off by default.
    pub absorb_trailing_rz: bool,
}

/// Peephole-optimize with default options (unitary preserved up to phase).
pub fn peephole_optimize<S: Scalar>(circuit: &Circuit<S>) -> Circuit<S> {
    peephole_optimize_with(circuit, PeepholeOptions::default())
}

/// Run the rewrite set to a fixed point: full-turn elimination, same-axis
/// merging across commuting gates, and optional trailing-RZ absorption.
///
/// Gate count and XX count never increase.
pub fn peephole_optimize_with<S: Scalar>(
    circuit: &Circuit<S>,
    options: PeepholeOptions,
) -> Circuit<S> {
    let mut gates = circuit.gates().to_vec();
    loop {
        let mut changed = eliminate_full_turns(&mut gates);
        changed |= merge_rotations(&mut gates);
        if options.absorb_trailing_rz {
            changed |= absorb_trailing_rz(&mut gates, circuit.qubits());
        }
        if !changed {
            break;
        }
    }
    Circuit::from_gates(circuit.qubits(), gates).expect("peephole keeps operands in range")
}

/// Rotation gates whose literal angle is ≡ 0 (mod 2π) act as a global phase;
/// drop them.
fn eliminate_full_turns<S: Scalar>(gates: &mut Vec<SymbolicGate<S>>) -> bool {
    let tol = S::from_f64_lossy(1e-12);
    let before = gates.len();
    gates.retain(|g| {
        let Some(AngleExpr::Literal(v)) = g.kind.angle() else {
            return true;
        };
        let tau = S::TAU();
        let r = (*v % tau).abs();
        r > tol && (tau - r) > tol
    });
    gates.len() != before
}

/// Axis identity for merging: mnemonic plus unordered wire set.
fn merge_key<S: Scalar>(gate: &SymbolicGate<S>) -> Option<(&'static str, usize, usize)> {
    let wires = gate.qubits();
    match gate.kind {
        GateKind::RX(_) | GateKind::RY(_) | GateKind::RZ(_) => {
            Some((gate.kind.name(), wires[0], wires[0]))
        }
        GateKind::XX(_) => Some(("XX", wires[0].min(wires[1]), wires[0].max(wires[1]))),
        _ => None,
    }
}

/// True commutations the merge pass may slide across: disjoint wires, any
/// two XX gates (their axes are products of X's), RX with an XX sharing a
/// wire, and same-axis rotations on the same wire.
fn commutes<S: Scalar>(a: &SymbolicGate<S>, b: &SymbolicGate<S>) -> bool {
    if a.qubits().iter().all(|q| !b.qubits().contains(q)) {
        return true;
    }
    match (&a.kind, &b.kind) {
        (GateKind::XX(_), GateKind::XX(_)) => true,
        (GateKind::RX(_), GateKind::XX(_)) | (GateKind::XX(_), GateKind::RX(_)) => true,
        _ => merge_key(a).is_some() && merge_key(a) == merge_key(b),
    }
}

/// Merge same-axis rotations, sliding each gate back across gates it
/// commutes with to find a partner. One merge per pass; the caller loops.
fn merge_rotations<S: Scalar>(gates: &mut Vec<SymbolicGate<S>>) -> bool {
    for i in 1..gates.len() {
        let Some(key) = merge_key(&gates[i]) else {
            continue;
        };
        for j in (0..i).rev() {
            if merge_key(&gates[j]) == Some(key) {
                let (Some(a), Some(b)) = (gates[j].kind.angle(), gates[i].kind.angle()) else {
                    unreachable!("merge keys only match rotations");
                };
                if let Some(sum) = a.try_add(b) {
                    gates[j].kind = gates[j].kind.map_angle(|_| sum.clone());
                    gates.remove(i);
                    return true;
                }
                // Same axis but angle symbols differ: still commutes, keep
                // scanning for an earlier partner.
                continue;
            }
            if !commutes(&gates[i], &gates[j]) {
                break;
            }
        }
    }
    false
}

/// Drop RZ gates with no later non-RZ gate on their wire.
fn absorb_trailing_rz<S: Scalar>(gates: &mut Vec<SymbolicGate<S>>, qubits: usize) -> bool {
    let mut blocked = vec![false; qubits];
    let mut drop = vec![false; gates.len()];
    for (i, gate) in gates.iter().enumerate().rev() {
        if matches!(gate.kind, GateKind::RZ(_)) && !blocked[gate.qubits()[0]] {
            drop[i] = true;
        } else {
            for &q in gate.qubits() {
                blocked[q] = true;
            }
        }
    }
    if drop.iter().any(|&d| d) {
        let mut keep = drop.iter().map(|&d| !d);
        gates.retain(|_| keep.next().unwrap());
        true
    } else {
        false
    }
}

/// Full pipeline: translate at `level`, then peephole with default options.
pub fn compile_native<S: Scalar>(circuit: &Circuit<S>, level: OptLevel) -> Circuit<S> {
    peephole_optimize(&to_native_opt(circuit, level))
}
