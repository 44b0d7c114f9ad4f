//! Deterministic linear-threshold cascade and cohesive-set machinery.
//!
//! A node adopts at step `t` when the fraction of its neighbours already
//! in `S*_{t-1}` reaches its threshold (inclusive). A set is cohesive when
//! every member keeps strictly more than `1 - α` of its neighbours inside
//! the set. The final adopter set equals the complement of the largest
//! cohesive set avoiding the seeds.
//!
//! Both tests compare the same integer ratio `outside / degree` against
//! `α` so the two sides are exact complements in floating point.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

/// Largest graph the exhaustive cohesive-set oracle accepts.
pub const ORACLE_MAX_NODES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CascadeError {
    #[error("unknown seed {0}")]
    UnknownSeed(usize),
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("threshold {value} for node {node} outside [0, 1]")]
    InvalidThreshold { node: usize, value: f64 },
    #[error("{got} thresholds for {expected} nodes")]
    ThresholdCount { expected: usize, got: usize },
    #[error("oracle limit exceeded: {0} nodes (max {ORACLE_MAX_NODES})")]
    OracleLimitExceeded(usize),
    #[error("maximum cohesive set is not unique: {0:?} and {1:?}")]
    NonUniqueMaximum(Vec<usize>, Vec<usize>),
}

/// Per-node adoption thresholds, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds(Vec<f64>);

impl Thresholds {
    pub fn new(values: Vec<f64>) -> Result<Self, CascadeError> {
        for (node, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(CascadeError::InvalidThreshold { node, value });
            }
        }
        Ok(Thresholds(values))
    }

    pub fn uniform(n: usize, alpha: f64) -> Result<Self, CascadeError> {
        Thresholds::new(vec![alpha; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn set(&mut self, v: usize, value: f64) -> Result<(), CascadeError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(CascadeError::InvalidThreshold { node: v, value });
        }
        self.0[v] = value;
        Ok(())
    }

    fn check_len(&self, graph: &Graph) -> Result<(), CascadeError> {
        if self.len() != graph.len() {
            return Err(CascadeError::ThresholdCount { expected: graph.len(), got: self.len() });
        }
        Ok(())
    }
}

/// `true` when a node with `hits` of `degree` neighbours on the relevant
/// side reaches the threshold. Zero-degree nodes never do.
fn reaches(hits: usize, degree: usize, alpha: f64) -> bool {
    degree > 0 && hits as f64 / degree as f64 >= alpha
}

/// Progress of one cascade run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeState {
    /// `S_0`, sorted.
    pub seeds: Vec<usize>,
    /// `S_1, S_2, ...`, each sorted. `S_0` is not repeated here.
    pub adopters_by_step: Vec<Vec<usize>>,
    adopted: Vec<bool>,
    pub horizon: usize,
    /// Whether the cumulative set at the last step is a fixpoint.
    pub converged: bool,
}

impl CascadeState {
    pub fn new(n: usize, seeds: &[usize], horizon: usize) -> Result<Self, CascadeError> {
        let mut adopted = vec![false; n];
        for &s in seeds {
            if s >= n {
                return Err(CascadeError::UnknownSeed(s));
            }
            adopted[s] = true;
        }
        let seeds: Vec<usize> = (0..n).filter(|&v| adopted[v]).collect();
        Ok(CascadeState { seeds, adopters_by_step: Vec::new(), adopted, horizon, converged: false })
    }

    /// Current step counter `t`.
    pub fn t(&self) -> usize {
        self.adopters_by_step.len()
    }

    pub fn is_adopted(&self, v: usize) -> bool {
        self.adopted[v]
    }

    /// Cumulative adopters `S*_t` at the current step, sorted.
    pub fn cumulative(&self) -> Vec<usize> {
        (0..self.adopted.len()).filter(|&v| self.adopted[v]).collect()
    }

    pub fn cumulative_count(&self) -> usize {
        self.seeds.len() + self.adopters_by_step.iter().map(Vec::len).sum::<usize>()
    }

    /// Sizes `|S*_0|, |S*_1|, ..., |S*_t|`.
    pub fn cumulative_counts(&self) -> Vec<usize> {
        let mut acc = self.seeds.len();
        let mut out = vec![acc];
        for s in &self.adopters_by_step {
            acc += s.len();
            out.push(acc);
        }
        out
    }

    /// Last step at which someone adopted (0 when only seeds ever adopt).
    pub fn convergence_step(&self) -> Option<usize> {
        self.converged.then(|| {
            self.adopters_by_step.iter().rposition(|s| !s.is_empty()).map_or(0, |i| i + 1)
        })
    }

    pub fn truncated(&self) -> bool {
        !self.converged
    }

    fn apply(&mut self, new_adopters: Vec<usize>) {
        for &v in &new_adopters {
            self.adopted[v] = true;
        }
        self.adopters_by_step.push(new_adopters);
    }
}

/// Computes `S_t` from `S*_{t-1}` without modifying the state.
pub fn step(graph: &Graph, thresholds: &Thresholds, state: &CascadeState) -> Vec<usize> {
    (0..graph.len())
        .filter(|&v| !state.adopted[v])
        .filter(|&v| {
            let hits = graph.neighbors(v).iter().filter(|&&w| state.adopted[w]).count();
            reaches(hits, graph.degree(v), thresholds.get(v))
        })
        .collect()
}

/// Iterates the dynamics until no node adopts or `horizon` steps elapse.
pub fn run(
    graph: &Graph,
    thresholds: &Thresholds,
    seeds: &[usize],
    horizon: usize,
) -> Result<CascadeState, CascadeError> {
    thresholds.check_len(graph)?;
    let mut state = CascadeState::new(graph.len(), seeds, horizon)?;
    while state.t() < horizon {
        let next = step(graph, thresholds, &state);
        if next.is_empty() {
            state.converged = true;
            return Ok(state);
        }
        state.apply(next);
    }
    state.converged = step(graph, thresholds, &state).is_empty();
    Ok(state)
}

/// Outcome of a cohesiveness check or a maximal-cohesive-set search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohesiveResult {
    /// Ω, sorted.
    pub omega: Vec<usize>,
    /// `|Ω ∩ N_ω| / |N_ω|` per member; 0 for isolated members.
    pub certificate: BTreeMap<usize, f64>,
}

fn certificate(graph: &Graph, inside: &[bool]) -> BTreeMap<usize, f64> {
    (0..graph.len())
        .filter(|&v| inside[v])
        .map(|v| {
            let deg = graph.degree(v);
            let kept = graph.neighbors(v).iter().filter(|&&w| inside[w]).count();
            let ratio = if deg == 0 { 0.0 } else { kept as f64 / deg as f64 };
            (v, ratio)
        })
        .collect()
}

/// A member violates cohesiveness when the share of its neighbours
/// outside Ω reaches its threshold, i.e. it would adopt if everyone
/// outside Ω had adopted. Isolated members always violate.
fn violates(outside: usize, degree: usize, alpha: f64) -> bool {
    degree == 0 || reaches(outside, degree, alpha)
}

fn membership(n: usize, nodes: &[usize]) -> Result<Vec<bool>, CascadeError> {
    let mut mask = vec![false; n];
    for &v in nodes {
        if v >= n {
            return Err(CascadeError::UnknownNode(v));
        }
        mask[v] = true;
    }
    Ok(mask)
}

/// Checks whether `omega` is cohesive and returns the per-member ratios.
pub fn is_cohesive(
    graph: &Graph,
    thresholds: &Thresholds,
    omega: &[usize],
) -> Result<(bool, CohesiveResult), CascadeError> {
    thresholds.check_len(graph)?;
    let inside = membership(graph.len(), omega)?;
    let ok = (0..graph.len()).filter(|&v| inside[v]).all(|v| {
        let outside = graph.neighbors(v).iter().filter(|&&w| !inside[w]).count();
        !violates(outside, graph.degree(v), thresholds.get(v))
    });
    let omega = (0..graph.len()).filter(|&v| inside[v]).collect();
    Ok((ok, CohesiveResult { omega, certificate: certificate(graph, &inside) }))
}

/// Largest cohesive subset of `V \ forbidden`, by peeling violators until
/// none remain.
pub fn max_cohesive_peel(
    graph: &Graph,
    thresholds: &Thresholds,
    forbidden: &[usize],
) -> Result<CohesiveResult, CascadeError> {
    thresholds.check_len(graph)?;
    let n = graph.len();
    let mut inside: Vec<bool> = membership(n, forbidden)?.into_iter().map(|f| !f).collect();
    let mut outside: Vec<usize> = (0..n)
        .map(|v| graph.neighbors(v).iter().filter(|&&w| !inside[w]).count())
        .collect();
    let mut stack: Vec<usize> = (0..n)
        .filter(|&v| inside[v] && violates(outside[v], graph.degree(v), thresholds.get(v)))
        .collect();
    while let Some(v) = stack.pop() {
        if !inside[v] {
            continue;
        }
        inside[v] = false;
        for &w in graph.neighbors(v) {
            outside[w] += 1;
            if inside[w] && violates(outside[w], graph.degree(w), thresholds.get(w)) {
                stack.push(w);
            }
        }
    }
    let omega = (0..n).filter(|&v| inside[v]).collect();
    Ok(CohesiveResult { omega, certificate: certificate(graph, &inside) })
}

/// Peeling that sweeps the nodes in the given order, removing the first
/// violator found, until a full sweep removes nothing. Slow; used to
/// check that the fixpoint does not depend on removal order.
pub fn peel_in_order(
    graph: &Graph,
    thresholds: &Thresholds,
    forbidden: &[usize],
    order: &[usize],
) -> Result<Vec<usize>, CascadeError> {
    thresholds.check_len(graph)?;
    let n = graph.len();
    let mut inside: Vec<bool> = membership(n, forbidden)?.into_iter().map(|f| !f).collect();
    loop {
        let victim = order.iter().copied().find(|&v| {
            inside[v] && {
                let out = graph.neighbors(v).iter().filter(|&&w| !inside[w]).count();
                violates(out, graph.degree(v), thresholds.get(v))
            }
        });
        match victim {
            Some(v) => inside[v] = false,
            None => break,
        }
    }
    Ok((0..n).filter(|&v| inside[v]).collect())
}

/// Exhaustive search over subsets of `V \ forbidden` for the cohesive set
/// of maximum cardinality. Limited to [`ORACLE_MAX_NODES`] nodes.
///
/// Cohesive sets are closed under union, so the maximum is unique; a
/// second maximum is reported as an error rather than resolved.
pub fn max_cohesive_bruteforce(
    graph: &Graph,
    thresholds: &Thresholds,
    forbidden: &[usize],
) -> Result<CohesiveResult, CascadeError> {
    let n = graph.len();
    if n > ORACLE_MAX_NODES {
        return Err(CascadeError::OracleLimitExceeded(n));
    }
    thresholds.check_len(graph)?;
    let forbidden_mask = membership(n, forbidden)?
        .iter()
        .enumerate()
        .fold(0u32, |m, (v, &f)| if f { m | (1 << v) } else { m });
    let nbr_mask: Vec<u32> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let allowed = ((1u64 << n) - 1) as u32 & !forbidden_mask;

    let cohesive = |set: u32| {
        (0..n).filter(|&v| set & (1 << v) != 0).all(|v| {
            let out = (nbr_mask[v] & !set).count_ones() as usize;
            !violates(out, graph.degree(v), thresholds.get(v))
        })
    };

    let mut best: Option<u32> = None;
    let mut tie: Option<u32> = None;
    // enumerate submasks of `allowed`, including the empty set
    let mut sub = allowed;
    loop {
        if cohesive(sub) {
            match best {
                Some(b) if b.count_ones() > sub.count_ones() => {}
                Some(b) if b.count_ones() == sub.count_ones() => tie = Some(sub),
                _ => {
                    best = Some(sub);
                    tie = None;
                }
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & allowed;
    }
    let best = best.unwrap_or(0);
    let to_vec = |m: u32| (0..n).filter(|&v| m & (1 << v) != 0).collect::<Vec<_>>();
    if let Some(t) = tie {
        return Err(CascadeError::NonUniqueMaximum(to_vec(best), to_vec(t)));
    }
    let inside: Vec<bool> = (0..n).map(|v| best & (1 << v) != 0).collect();
    Ok(CohesiveResult { omega: to_vec(best), certificate: certificate(graph, &inside) })
}

/// Which solver produced Ω in a [`ComplementCheck`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CohesiveSolver {
    BruteForce,
    Peeling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplementCheck {
    pub holds: bool,
    pub final_adopters: Vec<usize>,
    pub omega: Vec<usize>,
    pub solver: CohesiveSolver,
    pub converged: bool,
}

/// Runs the cascade for `|V|` steps and compares its final adopters to
/// the complement of the maximal cohesive set in `V \ S_0`. Uses the
/// exhaustive oracle up to [`ORACLE_MAX_NODES`] nodes, peeling above.
///
/// Isolated non-seed nodes never adopt and never belong to a cohesive
/// set, so the equivalence fails on graphs containing them.
pub fn verify_cohesive_complement(
    graph: &Graph,
    thresholds: &Thresholds,
    seeds: &[usize],
) -> Result<ComplementCheck, CascadeError> {
    let state = run(graph, thresholds, seeds, graph.len())?;
    let (omega, solver) = if graph.len() <= ORACLE_MAX_NODES {
        (max_cohesive_bruteforce(graph, thresholds, seeds)?.omega, CohesiveSolver::BruteForce)
    } else {
        (max_cohesive_peel(graph, thresholds, seeds)?.omega, CohesiveSolver::Peeling)
    };
    let final_adopters = state.cumulative();
    let in_omega = membership(graph.len(), &omega)?;
    let complement: Vec<usize> = (0..graph.len()).filter(|&v| !in_omega[v]).collect();
    Ok(ComplementCheck {
        holds: state.converged && final_adopters == complement,
        final_adopters,
        omega,
        solver,
        converged: state.converged,
    })
}
