//! Pauli strings, Hamiltonians, and MAXCUT graph encoding.
//!
//! A [`PauliString`] is a tensor product of single-qubit Pauli operators,
//! stored sparsely as `(qubit, letter)` pairs sorted by qubit; the empty
//! string is the identity. A [`Hamiltonian`] is a real-weighted sum of Pauli
//! strings, `H = Σ_γ h_γ P_γ`, normalized so each distinct string appears
//! once.
//!
//! Text format: terms `coef [P q]*` joined by `+`/`-`, with Pauli letters
//! `X`/`Y`/`Z` carrying 0-based qubit indices, e.g.
//!
//! ```text
//! 28.657 - 2.143 X0 X1 + 0.218 Z0
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

// ---------------------------------------------------------------------------
// Pauli letters and strings
// ---------------------------------------------------------------------------

/// A non-identity single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// The letter used in the text format.
    pub fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A sparse multi-qubit Pauli operator (tensor product of letters).
///
/// Invariant: factors are sorted by qubit with no duplicates. The empty
/// string is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    factors: Vec<(usize, Pauli)>,
}

impl PauliString {
    /// The identity operator.
    pub fn identity() -> Self {
        PauliString::default()
    }

    /// A single-letter string.
    pub fn single(pauli: Pauli, qubit: usize) -> Self {
        PauliString {
            factors: vec![(qubit, pauli)],
        }
    }

    /// Build from factors; rejects duplicate qubits.
    pub fn from_factors(mut factors: Vec<(usize, Pauli)>) -> Result<Self> {
        factors.sort_by_key(|&(q, _)| q);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::validation(
                "Pauli string has two letters on the same qubit".to_string(),
            ));
        }
        Ok(PauliString { factors })
    }

    /// Factors sorted by qubit.
    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.factors
    }

    /// The letter acting on `qubit`, if any.
    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        self.factors
            .binary_search_by_key(&qubit, |&(q, _)| q)
            .ok()
            .map(|i| self.factors[i].1)
    }

    /// Qubits with a non-identity letter, sorted.
    pub fn support(&self) -> Vec<usize> {
        self.factors.iter().map(|&(q, _)| q).collect()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    /// True for the identity.
    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// True when every letter is `Z` (the string is diagonal).
    pub fn is_diagonal(&self) -> bool {
        self.factors.iter().all(|&(_, p)| p == Pauli::Z)
    }

    /// Smallest register size containing the support.
    pub fn min_qubits(&self) -> usize {
        self.factors.last().map(|&(q, _)| q + 1).unwrap_or(0)
    }

    /// Relabel qubits through `f` (used when mapping terms onto reduced
    /// circuits). Rejects collisions.
    pub fn relabeled(&self, f: impl Fn(usize) -> usize) -> Result<Self> {
        PauliString::from_factors(self.factors.iter().map(|&(q, p)| (f(q), p)).collect())
    }

    /// Compact label without spaces, e.g. `X0X1`; `I` for the identity.
    pub fn label(&self) -> String {
        if self.is_identity() {
            return "I".to_string();
        }
        self.factors
            .iter()
            .map(|&(q, p)| format!("{}{}", p.letter(), q))
            .collect()
    }
}

impl fmt::Display for PauliString {
    /// Grammar form: factors separated by spaces, `I` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for &(q, p) in &self.factors {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}{}", p.letter(), q)?;
            first = false;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Hamiltonians
// ---------------------------------------------------------------------------

/// One weighted term `h_γ P_γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm<S> {
    pub coefficient: S,
    pub string: PauliString,
}

impl<S: Scalar> PauliTerm<S> {
    pub fn new(coefficient: S, string: PauliString) -> Self {
        PauliTerm {
            coefficient,
            string,
        }
    }
}

/// A real-weighted sum of Pauli strings.
///
/// Invariant: each distinct string appears at most once (construction merges
/// duplicates and drops exact-zero coefficients), in first-appearance order.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian<S = f64> {
    terms: Vec<PauliTerm<S>>,
}

impl<S: Scalar> Hamiltonian<S> {
    /// Build from terms, merging duplicate strings and dropping zeros.
    pub fn new(terms: Vec<PauliTerm<S>>) -> Self {
        let mut merged: Vec<PauliTerm<S>> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.iter_mut().find(|t| t.string == term.string) {
                Some(existing) => existing.coefficient += term.coefficient,
                None => merged.push(term),
            }
        }
        merged.retain(|t| t.coefficient != S::zero());
        Hamiltonian { terms: merged }
    }

    /// All terms, identity included.
    pub fn terms(&self) -> &[PauliTerm<S>] {
        &self.terms
    }

    /// Coefficient of the identity string (0 if absent).
    pub fn identity_coefficient(&self) -> S {
        self.terms
            .iter()
            .find(|t| t.string.is_identity())
            .map(|t| t.coefficient)
            .unwrap_or_else(S::zero)
    }

    /// Terms excluding the identity, in order.
    pub fn non_identity_terms(&self) -> impl Iterator<Item = &PauliTerm<S>> {
        self.terms.iter().filter(|t| !t.string.is_identity())
    }

    /// Smallest register size containing every term's support.
    pub fn min_qubits(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.string.min_qubits())
            .max()
            .unwrap_or(0)
    }

    /// True when every string is diagonal (Z-only).
    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|t| t.string.is_diagonal())
    }

    /// Value of a diagonal Hamiltonian on the computational basis state whose
    /// bit `q` (little-endian) gives the eigenvalue `(−1)^bit` of `Z_q`.
    ///
    /// Errors if any term is non-diagonal.
    pub fn diagonal_value(&self, basis_state: u64) -> Result<S> {
        let mut total = S::zero();
        for term in &self.terms {
            if !term.string.is_diagonal() {
                return Err(Error::validation(format!(
                    "term {} is not diagonal",
                    term.string
                )));
            }
            let parity: u32 = term
                .string
                .support()
                .iter()
                .map(|&q| ((basis_state >> q) & 1) as u32)
                .sum();
            let sign = if parity % 2 == 0 { S::one() } else { -S::one() };
            total += term.coefficient * sign;
        }
        Ok(total)
    }

    /// Parse the text format. Coefficients are read at `f64` precision.
    pub fn parse(input: &str) -> Result<Self> {
        let mut terms: Vec<PauliTerm<S>> = Vec::new();
        let mut current: Option<(S, Vec<(usize, Pauli)>)> = None;
        let mut pending_sign = S::one();
        let mut seen_sign_token = false;

        let mut flush =
            |current: &mut Option<(S, Vec<(usize, Pauli)>)>| -> Result<()> {
                if let Some((coef, factors)) = current.take() {
                    terms.push(PauliTerm::new(coef, PauliString::from_factors(factors)?));
                }
                Ok(())
            };

        for (line_no, raw) in input.lines().enumerate() {
            let line_no = line_no + 1;
            let content = raw.split('#').next().unwrap_or("");
            for token in content.split_whitespace() {
                if token == "+" || token == "-" {
                    flush(&mut current)?;
                    pending_sign = if token == "-" { -S::one() } else { S::one() };
                    seen_sign_token = true;
                    continue;
                }
                if let Ok(value) = token.parse::<f64>() {
                    flush(&mut current)?;
                    current = Some((pending_sign * S::from_f64_lossy(value), Vec::new()));
                    pending_sign = S::one();
                    seen_sign_token = false;
                    continue;
                }
                let factor = parse_pauli_factor(line_no, token)?;
                match current.as_mut() {
                    Some((_, factors)) => factors.push(factor),
                    None => {
                        return Err(Error::parse(
                            line_no,
                            format!("factor `{token}` appears before any coefficient"),
                        ))
                    }
                }
            }
        }
        if seen_sign_token {
            return Err(Error::parse(0, "dangling sign at end of input"));
        }
        flush(&mut current)?;
        if terms.is_empty() {
            return Err(Error::parse(0, "empty Hamiltonian"));
        }
        Ok(Hamiltonian::new(terms))
    }
}

fn parse_pauli_factor(line_no: usize, token: &str) -> Result<(usize, Pauli)> {
    let mut chars = token.chars();
    let letter = chars.next().unwrap_or(' ');
    let pauli = Pauli::from_letter(letter)
        .ok_or_else(|| Error::parse(line_no, format!("invalid Pauli factor `{token}`")))?;
    let index: usize = chars
        .as_str()
        .parse()
        .map_err(|_| Error::parse(line_no, format!("invalid qubit index in `{token}`")))?;
    Ok((index, pauli))
}

impl<S: Scalar> fmt::Display for Hamiltonian<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            let coef = term.coefficient;
            if i == 0 {
                if coef < S::zero() {
                    write!(f, "-")?;
                }
            } else if coef < S::zero() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}", coef.abs())?;
            if !term.string.is_identity() {
                write!(f, " {}", term.string)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Graphs and MAXCUT
// ---------------------------------------------------------------------------

/// An undirected simple graph.
///
/// Text format: a `vertices N` header followed by `edge u v` lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Build from an edge list; loops and duplicate edges are rejected.
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) out of range for {vertices} vertices"
                )));
            }
            if u == v {
                return Err(Error::validation(format!("loop edge ({u}, {v})")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::validation(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Graph { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Parse the text format.
    pub fn parse(input: &str) -> Result<Self> {
        let mut vertices: Option<usize> = None;
        let mut edges = Vec::new();
        for (i, raw) in input.lines().enumerate() {
            let line_no = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split_whitespace();
            match (parts.next(), vertices) {
                (Some("vertices"), None) => {
                    let n = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| Error::parse(line_no, "expected `vertices N`"))?;
                    if parts.next().is_some() {
                        return Err(Error::parse(line_no, "trailing tokens after vertex count"));
                    }
                    vertices = Some(n);
                }
                (Some("edge"), Some(_)) => {
                    let u = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| Error::parse(line_no, "expected `edge u v`"))?;
                    let v = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| Error::parse(line_no, "expected `edge u v`"))?;
                    if parts.next().is_some() {
                        return Err(Error::parse(line_no, "trailing tokens after edge"));
                    }
                    edges.push((u, v));
                }
                (Some("edge"), None) => {
                    return Err(Error::parse(line_no, "`edge` before `vertices` header"))
                }
                (Some(other), _) => {
                    return Err(Error::parse(line_no, format!("unknown directive `{other}`")))
                }
                (None, _) => unreachable!("content lines are non-empty"),
            }
        }
        let vertices =
            vertices.ok_or_else(|| Error::parse(0, "missing `vertices N` header"))?;
        Graph::new(vertices, edges)
    }

    /// Exact MAXCUT value by exhaustive search (guarded to ≤ 24 vertices).
    pub fn maxcut_bruteforce(&self) -> Result<usize> {
        if self.vertices > 24 {
            return Err(Error::guard(format!(
                "brute-force MAXCUT limited to 24 vertices, got {}",
                self.vertices
            )));
        }
        let mut best = 0;
        for assignment in 0u64..(1u64 << self.vertices) {
            let cut = self
                .edges
                .iter()
                .filter(|&&(u, v)| ((assignment >> u) ^ (assignment >> v)) & 1 == 1)
                .count();
            best = best.max(cut);
        }
        Ok(best)
    }

    /// The minimization-form MAXCUT Hamiltonian
    /// `H = −m/2 + (1/2) Σ_{(u,v)∈E} Z_u Z_v` over `m` edges.
    ///
    /// Its ground energy is `−maxcut(G)`, so a minimizing optimizer maximizes
    /// the cut.
    pub fn maxcut_hamiltonian<S: Scalar>(&self) -> Hamiltonian<S> {
        let half = S::from_f64_lossy(0.5);
        let mut terms = vec![PauliTerm::new(
            -half * S::from_usize(self.edges.len()).expect("edge count fits in S"),
            PauliString::identity(),
        )];
        for &(u, v) in &self.edges {
            terms.push(PauliTerm::new(
                half,
                PauliString::from_factors(vec![(u, Pauli::Z), (v, Pauli::Z)])
                    .expect("simple graph edges have distinct endpoints"),
            ));
        }
        Hamiltonian::new(terms)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices {}", self.vertices)?;
        for &(u, v) in &self.edges {
            writeln!(f, "edge {u} {v}")?;
        }
        Ok(())
    }
}
