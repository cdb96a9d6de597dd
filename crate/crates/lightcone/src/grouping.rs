//! Sub-Hamiltonian grouping, circuit covers, and shot budgets.
//!
//! Once a Hamiltonian's terms are reduced to cone circuits, several terms are
//! usually measurable from the same circuit: term `P` is measurable from a
//! reduced circuit when `P`'s own cone is contained in the circuit's cone and
//! `P`'s support lies on the circuit's register. Grouping the terms this way
//! yields one *sub-Hamiltonian* per distinct circuit.
//!
//! Two ownership strategies are supported:
//!
//! - **accuracy** ([`group_all`]): every term is reported from its own cone
//!   circuit (the deepest circuit family, but each term gets the smallest
//!   register that can see it);
//! - **time to solution** ([`minimal_cover`]): a minimum-cardinality subset
//!   of circuits that jointly measure every term, each term owned by the
//!   shallowest selected circuit supporting it.
//!
//! Shot budgets follow the variance bound ε = √(T_β·h²_max/S_β), solved for
//! `S_β` at a target ε and then rounded by a [`RoundingPolicy`].

use crate::circuit::Circuit;
use crate::cone::{QubitMap, ReducedSet};
use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, PauliTerm};
use crate::scalar::Scalar;

/// One distinct reduced circuit together with every term measurable from it.
#[derive(Debug, Clone)]
pub struct SubHamiltonian<S = f64> {
    /// Index of the circuit within the grouping (first-appearance order of
    /// the distinct circuits in the reduced set).
    pub circuit_index: usize,
    /// The reduced circuit all member terms share.
    pub circuit: Circuit<S>,
    /// Original ↔ reduced labels for the circuit's register.
    pub relabel: QubitMap,
    /// Cone gate indices in the original circuit (containment witness).
    pub cone_gates: Vec<usize>,
    /// Non-identity terms measurable from this circuit, in Hamiltonian order
    /// and original labels.
    pub terms: Vec<PauliTerm<S>>,
    /// Positions in `terms` of the terms whose own reduction is this circuit.
    pub named: Vec<usize>,
    /// Positions in `terms` this circuit owns (reports in the energy sum).
    pub owned: Vec<usize>,
}

impl<S: Scalar> SubHamiltonian<S> {
    /// Term count T_β (identity excluded).
    pub fn t_beta(&self) -> usize {
        self.terms.len()
    }

    /// Largest coefficient magnitude over the member terms (h_{γ,max}).
    pub fn h_max(&self) -> S {
        self.terms
            .iter()
            .map(|t| t.coefficient.abs())
            .fold(S::zero(), S::max)
    }

    /// Largest coefficient magnitude over the naming terms (h_γ).
    pub fn h_gamma(&self) -> S {
        self.named
            .iter()
            .map(|&i| self.terms[i].coefficient.abs())
            .fold(S::zero(), S::max)
    }

    /// Compact label of the naming terms, e.g. `"X0X1 Y0Y1"`.
    pub fn group_label(&self) -> String {
        self.named
            .iter()
            .map(|&i| self.terms[i].string.label())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Owned terms (the ones this circuit contributes to the energy).
    pub fn owned_terms(&self) -> impl Iterator<Item = &PauliTerm<S>> {
        self.owned.iter().map(|&i| &self.terms[i])
    }
}

fn is_sorted_subset(a: &[usize], b: &[usize]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

/// True when `term` (entry `t` of the reduced set) is measurable from the
/// distinct circuit represented by entry `rep`.
fn measurable<S: Scalar>(set: &ReducedSet<S>, t: usize, rep: usize) -> bool {
    let term = &set.terms[t];
    let row = &set.terms[rep];
    term.term
        .string
        .support()
        .iter()
        .all(|&q| row.relabel.reduced_of(q).is_some())
        && is_sorted_subset(&term.term_cone, &row.cone_gates)
}

fn validate_coverage<S: Scalar>(set: &ReducedSet<S>, h: &Hamiltonian<S>) -> Result<()> {
    let strings: Vec<_> = set.terms.iter().map(|e| &e.term.string).collect();
    for term in h.non_identity_terms() {
        if !strings.contains(&&term.string) {
            return Err(Error::validation(format!(
                "term {} is not covered by the reduced set",
                term.string
            )));
        }
    }
    Ok(())
}

fn build_sub<S: Scalar>(set: &ReducedSet<S>, circuit_index: usize) -> (SubHamiltonian<S>, Vec<usize>) {
    let rep_entry = set.representatives[circuit_index];
    let rep = &set.terms[rep_entry];
    let mut terms = Vec::new();
    let mut named = Vec::new();
    let mut member_entries = Vec::new();
    for (t, entry) in set.terms.iter().enumerate() {
        if measurable(set, t, rep_entry) {
            if set.circuit_of_term[t] == circuit_index {
                named.push(terms.len());
            }
            member_entries.push(t);
            terms.push(entry.term.clone());
        }
    }
    (
        SubHamiltonian {
            circuit_index,
            circuit: rep.circuit.clone(),
            relabel: rep.relabel.clone(),
            cone_gates: rep.cone_gates.clone(),
            terms,
            named,
            owned: Vec::new(),
        },
        member_entries,
    )
}

/// Group every term onto every circuit that can measure it, with accuracy
/// ownership: each term is owned by its own cone circuit.
///
/// Returns one sub-Hamiltonian per distinct reduced circuit, in
/// first-appearance order.
pub fn group_all<S: Scalar>(
    set: &ReducedSet<S>,
    hamiltonian: &Hamiltonian<S>,
) -> Result<Vec<SubHamiltonian<S>>> {
    validate_coverage(set, hamiltonian)?;
    let mut subs = Vec::with_capacity(set.distinct_count());
    for c in 0..set.distinct_count() {
        let (mut sub, _) = build_sub(set, c);
        sub.owned = sub.named.clone();
        subs.push(sub);
    }
    Ok(subs)
}

/// Exact set-cover search is abandoned above this many terms in favor of the
/// greedy heuristic.
pub const EXACT_COVER_LIMIT: usize = 50;

/// Select a minimum-cardinality subset of the distinct reduced circuits that
/// jointly measure every term, and assign each term to the shallowest
/// selected circuit supporting it (ties broken by fewer qubits, then lower
/// circuit index).
///
/// Exact branch-and-bound up to [`EXACT_COVER_LIMIT`] terms, greedy beyond.
pub fn minimal_cover<S: Scalar>(
    set: &ReducedSet<S>,
    hamiltonian: &Hamiltonian<S>,
) -> Result<Vec<SubHamiltonian<S>>> {
    validate_coverage(set, hamiltonian)?;
    let n_terms = set.terms.len();
    let n_circuits = set.distinct_count();
    if n_terms == 0 {
        return Ok(Vec::new());
    }

    // covers[c] = term entries measurable from circuit c.
    let covers: Vec<Vec<usize>> = (0..n_circuits)
        .map(|c| {
            (0..n_terms)
                .filter(|&t| measurable(set, t, set.representatives[c]))
                .collect()
        })
        .collect();
    for t in 0..n_terms {
        if !covers.iter().any(|cov| cov.contains(&t)) {
            return Err(Error::validation(format!(
                "term {} is not covered by any reduced circuit",
                set.terms[t].term.string
            )));
        }
    }

    let selected = if n_terms <= EXACT_COVER_LIMIT {
        exact_cover(n_terms, &covers)
    } else {
        greedy_cover(n_terms, &covers)
    };

    // Ownership: shallowest selected circuit, then fewest qubits, then index.
    let mut rank: Vec<(usize, usize, usize)> = Vec::new();
    for &c in &selected {
        let circuit = &set.terms[set.representatives[c]].circuit;
        rank.push((circuit.depth(), circuit.qubits(), c));
    }
    let mut owner_of_term = vec![usize::MAX; n_terms];
    for (t, owner) in owner_of_term.iter_mut().enumerate() {
        let best = rank
            .iter()
            .filter(|&&(_, _, c)| covers[c].contains(&t))
            .min()
            .expect("cover validated above");
        *owner = best.2;
    }

    let mut subs = Vec::with_capacity(selected.len());
    for &c in &selected {
        let (mut sub, member_entries) = build_sub(set, c);
        sub.owned = member_entries
            .iter()
            .enumerate()
            .filter_map(|(pos, &t)| (owner_of_term[t] == c).then_some(pos))
            .collect();
        subs.push(sub);
    }
    Ok(subs)
}

/// Branch-and-bound set cover: branch on the circuits covering the first
/// uncovered term; every valid cover must contain one of them, so the search
/// is complete. Returns the lexicographically first minimum cover.
fn exact_cover(n_terms: usize, covers: &[Vec<usize>]) -> Vec<usize> {
    fn recurse(
        covers: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        covered: &mut Vec<usize>,
        best: &mut Option<Vec<usize>>,
    ) {
        if let Some(b) = best {
            if chosen.len() >= b.len() {
                return;
            }
        }
        let Some(first_uncovered) = covered.iter().position(|&c| c == 0) else {
            *best = Some(chosen.clone());
            return;
        };
        for (c, cover) in covers.iter().enumerate() {
            if chosen.contains(&c) || !cover.contains(&first_uncovered) {
                continue;
            }
            chosen.push(c);
            for &t in cover {
                covered[t] += 1;
            }
            recurse(covers, chosen, covered, best);
            for &t in cover {
                covered[t] -= 1;
            }
            chosen.pop();
        }
    }

    let mut best = None;
    recurse(covers, &mut Vec::new(), &mut vec![0; n_terms], &mut best);
    let mut cover = best.expect("coverage validated by the caller");
    cover.sort_unstable();
    cover
}

/// Greedy cover: repeatedly take the circuit covering the most uncovered
/// terms (ties to the lowest index).
fn greedy_cover(n_terms: usize, covers: &[Vec<usize>]) -> Vec<usize> {
    let mut covered = vec![false; n_terms];
    let mut selected = Vec::new();
    while covered.iter().any(|&c| !c) {
        let (c, gain) = covers
            .iter()
            .enumerate()
            .map(|(c, cover)| (c, cover.iter().filter(|&&t| !covered[t]).count()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("at least one circuit");
        assert!(gain > 0, "coverage validated by the caller");
        selected.push(c);
        for &t in &covers[c] {
            covered[t] = true;
        }
    }
    selected.sort_unstable();
    selected
}

// ---------------------------------------------------------------------------
// Shot budgets
// ---------------------------------------------------------------------------

/// How a raw shot count S_raw = T_β·h²_max/ε² becomes an integer budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundingPolicy {
    /// Smallest count honoring the bound: max(1, ⌈S_raw − 1e−6⌉). The small
    /// slack keeps exact-boundary budgets (e.g. S_raw = 3500.0) from being
    /// bumped a unit up by floating-point noise.
    #[default]
    Exact,
    /// Hardware-style rounding: counts below [`RoundingPolicy::EXEMPT_BELOW`]
    /// stay exact (degenerate rows), counts below the small-count floor are
    /// raised to [`RoundingPolicy::FLOOR`], everything else is rounded to the
    /// nearest multiple of [`RoundingPolicy::QUANTUM`].
    Experiment,
}

impl RoundingPolicy {
    /// Experiment rounding quantum (nearest multiple).
    pub const QUANTUM: u64 = 50;
    /// Experiment small-count floor.
    pub const FLOOR: u64 = 500;
    /// Raw counts below this stay exact under experiment rounding.
    pub const EXEMPT_BELOW: f64 = 10.0;

    /// Apply the policy to a raw (real) shot count.
    pub fn apply(self, raw: f64) -> u64 {
        let exact = (raw - 1e-6).ceil().max(1.0) as u64;
        match self {
            RoundingPolicy::Exact => exact,
            RoundingPolicy::Experiment => {
                if raw < Self::EXEMPT_BELOW {
                    exact
                } else if raw < Self::FLOOR as f64 {
                    Self::FLOOR
                } else {
                    let q = Self::QUANTUM as f64;
                    ((raw / q).round() as u64).max(1) * Self::QUANTUM
                }
            }
        }
    }
}

/// One circuit's shot budget.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetEntry<S = f64> {
    /// Compact naming-term label, e.g. `"X1X2 Y1Y2"`.
    pub group: String,
    /// Circuit index within the grouping.
    pub circuit_index: usize,
    /// Term count (identity excluded).
    pub t_beta: usize,
    /// Largest naming-term coefficient magnitude.
    pub h_gamma: S,
    /// Largest member-term coefficient magnitude.
    pub h_max: S,
    /// Pre-rounding count T_β·h²_max/ε².
    pub raw: S,
    /// Rounded shot budget S_β ≥ 1.
    pub shots: u64,
}

/// A full measurement plan: grouping metadata plus per-circuit budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotBudget<S = f64> {
    /// Target 1σ energy error (same units as the Hamiltonian).
    pub epsilon: S,
    /// The policy the entries were rounded with.
    pub policy: RoundingPolicy,
    /// Per-circuit entries, in grouping order.
    pub entries: Vec<BudgetEntry<S>>,
}

impl<S: Scalar> ShotBudget<S> {
    /// Total shots over all entries.
    pub fn total(&self) -> u64 {
        total_budget(&self.entries)
    }

    /// Propagated 1σ bound on the total energy under this plan:
    /// √(Σ_β T_β·h²_max(β)/S_β).
    pub fn energy_error_bound(&self) -> S {
        self.entries
            .iter()
            .fold(S::zero(), |acc, e| {
                acc + S::from_f64_lossy(e.t_beta as f64) * e.h_max * e.h_max
                    / S::from_f64_lossy(e.shots as f64)
            })
            .sqrt()
    }

    /// Render the plan as CSV (`group,h_gamma,h_max,t_beta,s_beta`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("group,h_gamma,h_max,t_beta,s_beta\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.group, e.h_gamma, e.h_max, e.t_beta, e.shots
            ));
        }
        out
    }
}

/// Shot budget for one sub-Hamiltonian at target error `epsilon`.
pub fn estimate_shots<S: Scalar>(
    sub: &SubHamiltonian<S>,
    epsilon: S,
    policy: RoundingPolicy,
) -> Result<BudgetEntry<S>> {
    if epsilon <= S::zero() {
        return Err(Error::validation(format!(
            "target error must be positive, got {epsilon}"
        )));
    }
    if sub.terms.is_empty() {
        return Err(Error::validation(
            "sub-Hamiltonian owns no non-identity terms".to_string(),
        ));
    }
    let t = S::from_f64_lossy(sub.t_beta() as f64);
    let h_max = sub.h_max();
    let raw = t * h_max * h_max / (epsilon * epsilon);
    let raw_f64 = raw.to_f64().filter(|r| r.is_finite()).ok_or_else(|| {
        Error::guard(format!("shot estimate is not finite (ε = {epsilon})"))
    })?;
    Ok(BudgetEntry {
        group: sub.group_label(),
        circuit_index: sub.circuit_index,
        t_beta: sub.t_beta(),
        h_gamma: sub.h_gamma(),
        h_max,
        raw,
        shots: policy.apply(raw_f64),
    })
}

/// Budget every sub-Hamiltonian of a grouping.
pub fn budget_all<S: Scalar>(
    subs: &[SubHamiltonian<S>],
    epsilon: S,
    policy: RoundingPolicy,
) -> Result<ShotBudget<S>> {
    let entries = subs
        .iter()
        .map(|sub| estimate_shots(sub, epsilon, policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(ShotBudget {
        epsilon,
        policy,
        entries,
    })
}

/// Total shots over a budget list.
pub fn total_budget<S: Scalar>(entries: &[BudgetEntry<S>]) -> u64 {
    entries.iter().map(|e| e.shots).sum()
}
