//! Kochen–Specker colorability: verify a {0,1} assignment against the
//! contexts of an [`OrthoStructure`], or search for one.
//!
//! The default rule only asks for exactly one 1 per context. The
//! `exclusive` option additionally forbids two orthogonal projectors
//! from both receiving 1, which matters for sets where some orthogonal
//! pairs lie in no complete context.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::exactnum::Tolerance;
use crate::quantum::{find_contexts, Experiment, OrthoStructure, QuantumError};

pub const DEFAULT_NODE_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KsError {
    #[error("coloring has no value for projector `{0}`")]
    MissingLabel(String),
    #[error("coloring assigns projector `{0}`, which is not in the structure")]
    UnknownLabel(String),
}

/// A total map from projector labels to {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Coloring(pub BTreeMap<String, bool>);

impl Coloring {
    pub fn get(&self, label: &str) -> Option<bool> {
        self.0.get(label).copied()
    }

    /// Labels assigned 1, in order.
    pub fn ones(&self) -> Vec<&str> {
        self.0.iter().filter(|(_, &v)| v).map(|(k, _)| k.as_str()).collect()
    }

    fn from_values(structure: &OrthoStructure, values: &[bool]) -> Coloring {
        Coloring(
            structure
                .vertices()
                .iter()
                .cloned()
                .zip(values.iter().copied())
                .collect(),
        )
    }
}

impl Serialize for Coloring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(k, &v)| (k, u8::from(v))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub node_cap: u64,
    pub exclusive: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            node_cap: DEFAULT_NODE_CAP,
            exclusive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "coloring", rename_all = "snake_case")]
pub enum Verdict {
    Colorable(Coloring),
    Noncolorable,
    /// The node cap was reached before the search finished.
    Undecided,
    /// Dimension below 3: colorable by fiat, no search performed.
    NotKsCandidate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KsCertificate {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub exclusive: bool,
    pub vertices: usize,
    pub contexts_used: usize,
    pub nodes_explored: u64,
    pub conflicts: u64,
    pub max_depth: usize,
}

impl KsCertificate {
    pub fn is_noncolorable(&self) -> bool {
        self.verdict == Verdict::Noncolorable
    }

    pub fn coloring(&self) -> Option<&Coloring> {
        match &self.verdict {
            Verdict::Colorable(c) => Some(c),
            _ => None,
        }
    }
}

fn values_of(structure: &OrthoStructure, f: &Coloring) -> Result<Vec<bool>, KsError> {
    if let Some(extra) = f.0.keys().find(|k| !structure.vertices().contains(k)) {
        return Err(KsError::UnknownLabel(extra.clone()));
    }
    structure
        .vertices()
        .iter()
        .map(|l| f.get(l).ok_or_else(|| KsError::MissingLabel(l.clone())))
        .collect()
}

/// True iff every context has exactly one label colored 1.
pub fn verify_coloring(structure: &OrthoStructure, f: &Coloring) -> Result<bool, KsError> {
    let values = values_of(structure, f)?;
    Ok(contexts_hold(structure, &values))
}

/// [`verify_coloring`] plus: no orthogonal pair is colored (1, 1).
pub fn verify_coloring_exclusive(structure: &OrthoStructure, f: &Coloring) -> Result<bool, KsError> {
    let values = values_of(structure, f)?;
    Ok(contexts_hold(structure, &values) && exclusive_holds(structure, &values))
}

fn contexts_hold(structure: &OrthoStructure, values: &[bool]) -> bool {
    structure
        .contexts()
        .iter()
        .all(|c| c.iter().filter(|&&i| values[i]).count() == 1)
}

fn exclusive_holds(structure: &OrthoStructure, values: &[bool]) -> bool {
    structure.ortho_pairs().iter().all(|&(i, j)| !(values[i] && values[j]))
}

struct Search<'a> {
    contexts: &'a [Vec<usize>],
    /// contexts containing each vertex
    member_of: Vec<Vec<usize>>,
    /// vertices that may not share a 1 with each vertex (exclusive rule)
    exclusive_with: Vec<Vec<usize>>,
    cap: u64,
    nodes: u64,
    conflicts: u64,
    max_depth: usize,
}

enum Outcome {
    Found(Vec<Option<bool>>),
    Exhausted,
    Capped,
}

impl Search<'_> {
    /// Sets `v = value` and runs unit propagation. Returns false on conflict.
    fn assign(&self, state: &mut [Option<bool>], v: usize, value: bool) -> bool {
        let mut queue = vec![(v, value)];
        while let Some((v, value)) = queue.pop() {
            match state[v] {
                Some(cur) if cur == value => continue,
                Some(_) => return false,
                None => state[v] = Some(value),
            }
            if value {
                for &c in &self.member_of[v] {
                    for &u in &self.contexts[c] {
                        if u != v {
                            queue.push((u, false));
                        }
                    }
                }
                for &u in &self.exclusive_with[v] {
                    queue.push((u, false));
                }
            }
            for &c in &self.member_of[v] {
                let ctx = &self.contexts[c];
                if ctx.iter().any(|&u| state[u] == Some(true)) {
                    continue;
                }
                let open: Vec<usize> = ctx.iter().copied().filter(|&u| state[u].is_none()).collect();
                match open.as_slice() {
                    [] => return false,
                    [last] => queue.push((*last, true)),
                    _ => {}
                }
            }
        }
        true
    }

    fn run(&mut self, state: Vec<Option<bool>>, depth: usize) -> Outcome {
        self.max_depth = self.max_depth.max(depth);
        let Some(v) = (0..state.len()).find(|&v| state[v].is_none() && !self.member_of[v].is_empty()) else {
            return Outcome::Found(state);
        };
        for value in [true, false] {
            if self.nodes >= self.cap {
                return Outcome::Capped;
            }
            self.nodes += 1;
            let mut next = state.clone();
            if !self.assign(&mut next, v, value) {
                self.conflicts += 1;
                continue;
            }
            match self.run(next, depth + 1) {
                Outcome::Exhausted => {}
                other => return other,
            }
        }
        Outcome::Exhausted
    }
}

/// Complete backtracking search with unit propagation. Branches on the
/// lowest unassigned vertex (vertices are label-sorted), trying 1 before 0.
/// Vertices outside every context are colored 0.
pub fn search_coloring(structure: &OrthoStructure, options: SearchOptions) -> KsCertificate {
    let n = structure.vertices().len();
    let contexts = structure.contexts();
    let mut member_of = vec![Vec::new(); n];
    for (k, c) in contexts.iter().enumerate() {
        for &v in c {
            member_of[v].push(k);
        }
    }
    let mut exclusive_with = vec![Vec::new(); n];
    if options.exclusive {
        for &(i, j) in structure.ortho_pairs() {
            exclusive_with[i].push(j);
            exclusive_with[j].push(i);
        }
    }
    let mut search = Search {
        contexts,
        member_of,
        exclusive_with,
        cap: options.node_cap,
        nodes: 0,
        conflicts: 0,
        max_depth: 0,
    };
    let mut state = vec![None; n];
    // empty contexts cannot be satisfied
    let mut outcome = if contexts.iter().any(Vec::is_empty) {
        Outcome::Exhausted
    } else {
        // contexts of one vertex force it before any branching
        let forced: Vec<usize> = contexts.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
        if forced.into_iter().all(|v| search.assign(&mut state, v, true)) {
            search.run(state, 0)
        } else {
            Outcome::Exhausted
        }
    };
    let verdict = match &mut outcome {
        Outcome::Found(state) => {
            let values: Vec<bool> = state.iter().map(|v| v.unwrap_or(false)).collect();
            assert!(contexts_hold(structure, &values), "search returned an invalid coloring");
            if options.exclusive {
                assert!(
                    exclusive_holds(structure, &values),
                    "search returned a non-exclusive coloring"
                );
            }
            Verdict::Colorable(Coloring::from_values(structure, &values))
        }
        Outcome::Exhausted => Verdict::Noncolorable,
        Outcome::Capped => Verdict::Undecided,
    };
    KsCertificate {
        verdict,
        exclusive: options.exclusive,
        vertices: n,
        contexts_used: contexts.len(),
        nodes_explored: search.nodes,
        conflicts: search.conflicts,
        max_depth: search.max_depth,
    }
}

/// Decides whether the experiment's projectors form a KS set.
pub fn is_ks_witness(
    exp: &Experiment,
    tol: Tolerance,
    context_cap: u64,
    options: SearchOptions,
) -> Result<KsCertificate, QuantumError> {
    if exp.dim() < 3 {
        return Ok(KsCertificate {
            verdict: Verdict::NotKsCandidate,
            exclusive: options.exclusive,
            vertices: exp.projectors().len(),
            contexts_used: 0,
            nodes_explored: 0,
            conflicts: 0,
            max_depth: 0,
        });
    }
    let structure = find_contexts(exp, tol, context_cap)?;
    Ok(search_coloring(&structure, options))
}
