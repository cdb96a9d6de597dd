//! Line-oriented circuit text format.
//!
//! ```text
//! qubits N
//! H q
//! RX(expr) q | RY(expr) q | RZ(expr) q
//! CNOT c t
//! CRY(expr) c t
//! XX(expr) a b
//! ```
//!
//! `expr` is a literal, a symbol, or an affine form `a*sym+b` (the variants
//! `a*sym`, `sym+b`, and `sym-b` are accepted and produced as well). `#`
//! starts a comment; blank lines are ignored.

use std::fmt;

use super::{AngleExpr, Circuit, Gate, GateKind, Operands};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

impl<S: Scalar> Circuit<S> {
    /// Parse the text format. Angle literals are read at `f64` precision.
    pub fn parse(input: &str) -> Result<Self> {
        let mut lines = numbered_content_lines(input);
        let (header_no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "empty input; expected `qubits N` header"))?;
        let qubits = parse_header(header_no, header)?;
        let mut circuit = Circuit::new(qubits);
        for (line_no, line) in lines {
            let gate = parse_gate_line(line_no, line)?;
            circuit
                .push(gate)
                .map_err(|e| Error::parse(line_no, e.to_string()))?;
        }
        Ok(circuit)
    }
}

/// Content lines with 1-based numbers, comments and blanks stripped.
fn numbered_content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("").trim();
            (i + 1, content)
        })
        .filter(|(_, content)| !content.is_empty())
}

fn parse_header(line_no: usize, line: &str) -> Result<usize> {
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some("qubits"), Some(n), None) => n
            .parse::<usize>()
            .map_err(|_| Error::parse(line_no, format!("invalid qubit count `{n}`"))),
        _ => Err(Error::parse(
            line_no,
            format!("expected `qubits N` header, got `{line}`"),
        )),
    }
}

fn parse_gate_line<S: Scalar>(line_no: usize, line: &str) -> Result<Gate<AngleExpr<S>>> {
    let mut parts = line.split_whitespace();
    let head = parts.next().expect("content lines are non-empty");
    let operands: Vec<usize> = parts
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("invalid qubit index `{tok}`")))
        })
        .collect::<Result<_>>()?;

    let (mnemonic, angle) = match head.find('(') {
        Some(open) => {
            let close = head
                .rfind(')')
                .ok_or_else(|| Error::parse(line_no, format!("missing `)` in `{head}`")))?;
            if close != head.len() - 1 || close <= open {
                return Err(Error::parse(line_no, format!("malformed angle in `{head}`")));
            }
            let expr = parse_angle_expr(line_no, &head[open + 1..close])?;
            (&head[..open], Some(expr))
        }
        None => (head, None),
    };

    let kind = match (mnemonic, angle) {
        ("H", None) => GateKind::H,
        ("CNOT", None) => GateKind::CNOT,
        ("RX", Some(a)) => GateKind::RX(a),
        ("RY", Some(a)) => GateKind::RY(a),
        ("RZ", Some(a)) => GateKind::RZ(a),
        ("CRY", Some(a)) => GateKind::CRY(a),
        ("XX", Some(a)) => GateKind::XX(a),
        ("H" | "CNOT", Some(_)) => {
            return Err(Error::parse(
                line_no,
                format!("`{mnemonic}` takes no angle"),
            ))
        }
        ("RX" | "RY" | "RZ" | "CRY" | "XX", None) => {
            return Err(Error::parse(
                line_no,
                format!("`{mnemonic}` requires an angle, e.g. `{mnemonic}(0.5)`"),
            ))
        }
        _ => {
            return Err(Error::parse(
                line_no,
                format!("unknown gate `{mnemonic}`"),
            ))
        }
    };

    let operands = match (kind.arity(), operands.as_slice()) {
        (1, [q]) => Operands::One([*q]),
        (2, [a, b]) => Operands::Two([*a, *b]),
        (want, got) => {
            return Err(Error::parse(
                line_no,
                format!(
                    "`{}` takes {want} operand(s), got {}",
                    kind.name(),
                    got.len()
                ),
            ))
        }
    };

    Ok(Gate { kind, operands })
}

fn parse_angle_expr<S: Scalar>(line_no: usize, text: &str) -> Result<AngleExpr<S>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::parse(line_no, "empty angle expression"));
    }
    // Literal?
    if let Ok(v) = text.parse::<f64>() {
        return Ok(AngleExpr::Literal(S::from_f64_lossy(v)));
    }
    // Optional `a*` prefix.
    let (scale, rest) = match text.split_once('*') {
        Some((a, rest)) => {
            let a = a.trim().parse::<f64>().map_err(|_| {
                Error::parse(line_no, format!("invalid scale `{a}` in `{text}`"))
            })?;
            (a, rest.trim())
        }
        None => (1.0, text),
    };
    // Optional `±b` suffix after the symbol (symbols cannot contain + or -).
    let split_at = rest[1..].find(['+', '-']).map(|i| i + 1);
    let (symbol, offset) = match split_at {
        Some(i) => {
            let b = rest[i..].parse::<f64>().map_err(|_| {
                Error::parse(line_no, format!("invalid offset `{}` in `{text}`", &rest[i..]))
            })?;
            (rest[..i].trim(), b)
        }
        None => (rest, 0.0),
    };
    if symbol.is_empty()
        || !symbol
            .chars()
            .next()
            .map(|c| c.is_ascii_alphabetic() || c == '_')
            .unwrap_or(false)
        || !symbol
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
    {
        return Err(Error::parse(
            line_no,
            format!("invalid parameter name `{symbol}` in `{text}`"),
        ));
    }
    Ok(AngleExpr::Symbolic {
        symbol: symbol.to_string(),
        scale: S::from_f64_lossy(scale),
        offset: S::from_f64_lossy(offset),
    })
}

pub(super) fn write_circuit<S: Scalar>(
    circuit: &Circuit<S>,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    writeln!(f, "qubits {}", circuit.qubits())?;
    for gate in circuit.gates() {
        match gate.kind.angle() {
            Some(a) => write!(f, "{}({})", gate.kind.name(), format_angle(a))?,
            None => write!(f, "{}", gate.kind.name())?,
        }
        for q in gate.qubits() {
            write!(f, " {q}")?;
        }
        writeln!(f)?;
    }
    Ok(())
}

fn format_angle<S: Scalar>(angle: &AngleExpr<S>) -> String {
    match angle {
        AngleExpr::Literal(v) => format!("{v}"),
        AngleExpr::Symbolic {
            symbol,
            scale,
            offset,
        } => {
            let mut out = String::new();
            if *scale != S::one() {
                out.push_str(&format!("{scale}*"));
            }
            out.push_str(symbol);
            if *offset != S::zero() {
                if *offset > S::zero() {
                    out.push('+');
                }
                out.push_str(&format!("{offset}"));
            }
            out
        }
    }
}
