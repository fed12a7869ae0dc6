//! Hidden-variable representations of an experiment, the checks they must
//! pass, and the reduction that turns one into either a KS coloring or a
//! finite null cover with a Dutch book.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{scalar_cmp, Kind, Scalar, Tolerance};
use crate::ks::{verify_coloring, Coloring, KsError};
use crate::quantum::{born, find_contexts, joint_born, relation, Experiment, OrthoStructure, QuantumError, Relation};
use crate::spaces::{check_flavor, generate_algebra, AxiomReport, EventSet, Flavor, MeasureSpace, SpaceError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NogoError {
    #[error("projector `{0}` has no event in the representation")]
    MissingLabel(String),
    #[error("event map names `{0}`, which is not a projector of the experiment")]
    UnknownLabel(String),
    #[error("event for projector `{label}` is not in the event collection")]
    EventNotInSigma { label: String },
    #[error("experiment has dimension {exp}, event map targets {space}-point space but expected {expected}")]
    UniverseMismatch { exp: usize, space: usize, expected: usize },
    #[error("{stage} check failed: {} violations, {} unassigned obligations",
        report.violations.len(), report.unassigned_obligations.len())]
    Precondition { stage: String, report: Box<AxiomReport> },
    #[error("classical representation check needs a classical space, found {0}")]
    NotClassical(Flavor),
    #[error("not a null cover of the sample space")]
    InvalidCover,
    #[error("measure unassigned on bet event {0}")]
    Unassigned(String),
    #[error("Dutch book failed pointwise verification")]
    BookFailed,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Ks(#[from] KsError),
}

/// The event map `E` from projector labels into a measure space.
#[derive(Debug, Clone)]
pub struct Representation {
    experiment: Experiment,
    space: MeasureSpace,
    event_map: BTreeMap<String, EventSet>,
}

impl Representation {
    /// Requires `E` to be total on the experiment's labels and every image
    /// to lie in the space's event collection.
    pub fn new(
        experiment: Experiment,
        space: MeasureSpace,
        event_map: BTreeMap<String, EventSet>,
    ) -> Result<Representation, NogoError> {
        for label in experiment.labels() {
            let e = event_map
                .get(&label)
                .ok_or_else(|| NogoError::MissingLabel(label.clone()))?;
            if e.universe() != space.sample_size() {
                return Err(NogoError::UniverseMismatch {
                    exp: experiment.dim(),
                    space: e.universe(),
                    expected: space.sample_size(),
                });
            }
            if !space.contains_event(e) {
                return Err(NogoError::EventNotInSigma { label });
            }
        }
        if let Some(extra) = event_map.keys().find(|l| experiment.projector(l).is_none()) {
            return Err(NogoError::UnknownLabel(extra.clone()));
        }
        Ok(Representation {
            experiment,
            space,
            event_map,
        })
    }

    pub fn experiment(&self) -> &Experiment {
        &self.experiment
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn event_map(&self) -> &BTreeMap<String, EventSet> {
        &self.event_map
    }

    pub fn event(&self, label: &str) -> &EventSet {
        &self.event_map[label]
    }
}

/// Where a cover member came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// `E(P) ∩ E(Q)` for an orthogonal pair.
    OrthoPair { first: String, second: String },
    /// `X ∖ T_Q` for a context `Q`.
    ContextComplement { context: Vec<String> },
    /// An assigned null event of the space itself.
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullCover {
    pub events: Vec<EventSet>,
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bet {
    pub event: EventSet,
    pub stake: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DutchBook {
    pub bets: Vec<Bet>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Coloring { point: usize, coloring: Coloring },
    NullCover { cover: NullCover, book: DutchBook },
    Violation { details: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoGoReport {
    pub r1: EventSet,
    pub r2: EventSet,
    pub x_prime: EventSet,
    #[serde(flatten)]
    pub outcome: Outcome,
}

fn matches(a: &Scalar, b: &Scalar, tol: Tolerance) -> bool {
    if a.kind() == b.kind() {
        a.eq_tol(b, tol)
    } else {
        a.to_approx().eq_tol(&b.to_approx(), tol)
    }
}

fn is_null(v: &Scalar, tol: Tolerance) -> bool {
    v.is_zero(tol)
}

fn relations(exp: &Experiment, tol: Tolerance) -> Result<Vec<(usize, usize, Relation)>, QuantumError> {
    let ps = exp.projectors();
    let mut out = Vec::new();
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            out.push((i, j, relation(&ps[i], &ps[j], tol)?));
        }
    }
    Ok(out)
}

fn check_born(rep: &Representation, report: &mut AxiomReport, tol: Tolerance) -> Result<(), NogoError> {
    let exp = rep.experiment();
    let space = rep.space();
    for p in exp.projectors() {
        let e = rep.event(p.label());
        let expected = Scalar::real(born(exp.psi(), p, tol)?);
        match space.value(e) {
            None => report.oblige(&format!("born[{}]", p.label()), vec![e.clone()]),
            Some(v) => {
                report.checked += 1;
                if !matches(v, &expected, tol) {
                    report.violate(
                        &format!("born[{}]", p.label()),
                        vec![e.clone()],
                        vec![v.to_string(), expected.to_string()],
                    );
                }
            }
        }
    }
    Ok(())
}

fn check_intersection(
    rep: &Representation,
    report: &mut AxiomReport,
    axiom: &str,
    (i, j): (usize, usize),
    expected: &Scalar,
    tol: Tolerance,
) {
    let ps = rep.experiment().projectors();
    let (a, b) = (ps[i].label(), ps[j].label());
    let cap = rep.event(a).intersection(rep.event(b));
    let axiom = format!("{axiom}[{a},{b}]");
    if !rep.space().contains_event(&cap) {
        report.violate(&format!("{axiom}.sigma"), vec![cap], vec![]);
        return;
    }
    match rep.space().value(&cap) {
        None => report.oblige(&axiom, vec![cap]),
        Some(v) => {
            report.checked += 1;
            if !matches(v, expected, tol) {
                report.violate(&axiom, vec![cap], vec![v.to_string(), expected.to_string()]);
            }
        }
    }
}

/// Born values on every `E(P)`, and null, in-collection intersections for
/// every orthogonal pair.
pub fn check_weak_representation(rep: &Representation, tol: Tolerance) -> Result<AxiomReport, NogoError> {
    let mut report = AxiomReport::new("weak representation");
    check_born(rep, &mut report, tol)?;
    let zero = Scalar::zero(rep.space().kind().unwrap_or(Kind::Exact));
    for (i, j, rel) in relations(rep.experiment(), tol)? {
        if rel == Relation::Orthogonal {
            check_intersection(rep, &mut report, "ortho_null", (i, j), &zero, tol);
        }
    }
    Ok(report)
}

/// Classical flavor axioms, Born values, and joint Born values on the
/// intersections of every commuting pair.
pub fn check_classical_representation(rep: &Representation, tol: Tolerance) -> Result<AxiomReport, NogoError> {
    if rep.space().flavor() != Flavor::Classical {
        return Err(NogoError::NotClassical(rep.space().flavor()));
    }
    let mut report = AxiomReport::new("classical representation");
    report.absorb(check_flavor(rep.space(), tol), None);
    check_born(rep, &mut report, tol)?;
    let exp = rep.experiment();
    let ps = exp.projectors();
    for (i, j, rel) in relations(exp, tol)? {
        if rel != Relation::Noncommuting {
            let expected = Scalar::real(joint_born(exp.psi(), &ps[i], &ps[j], tol)?);
            check_intersection(rep, &mut report, "joint_born", (i, j), &expected, tol);
        }
    }
    Ok(report)
}

fn context_scope(structure: &OrthoStructure, k: usize) -> String {
    format!("context {{{}}}", structure.context_labels(k).join(", "))
}

/// For every context, the algebra generated by its events must be fully
/// assigned and classical under the restricted measure.
pub fn check_wc(rep: &Representation, structure: &OrthoStructure, tol: Tolerance) -> Result<AxiomReport, NogoError> {
    let mut report = AxiomReport::new("WC");
    let n = rep.space().sample_size();
    for (k, ctx) in structure.contexts().iter().enumerate() {
        let scope = context_scope(structure, k);
        let generators: Vec<EventSet> = ctx
            .iter()
            .map(|&i| rep.event(&structure.vertices()[i]).clone())
            .collect();
        let sigma_q = generate_algebra(n, &generators)?;
        let mut sub = AxiomReport::new(scope.clone());
        let mut restricted = MeasureSpace::listed(n, sigma_q.clone(), Flavor::Classical)?;
        for e in sigma_q {
            if !rep.space().contains_event(&e) {
                sub.violate("wc.sigma", vec![e], vec![]);
                continue;
            }
            match rep.space().value(&e) {
                Some(v) => restricted.assign(e, v.clone())?,
                None => sub.oblige("wc.unassigned", vec![e]),
            }
        }
        sub.absorb(check_flavor(&restricted, tol), None);
        report.absorb(sub, Some(&scope));
    }
    Ok(report)
}

/// Exact set cover: fewest `candidates` whose union is the full sample
/// space, ties broken by the lexicographically least index sequence.
/// Candidates should be sorted for the tie-break to be meaningful.
pub fn min_cover(universe: usize, candidates: &[EventSet]) -> Option<Vec<usize>> {
    let full = EventSet::full(universe);
    let mut suffix = vec![EventSet::empty(universe); candidates.len() + 1];
    for i in (0..candidates.len()).rev() {
        suffix[i] = suffix[i + 1].union(&candidates[i]);
    }
    if suffix[0] != full {
        return None;
    }
    let upper = greedy_cover(universe, candidates).len();
    let max_size = candidates.iter().map(EventSet::len).max().unwrap_or(0);

    fn dfs(
        cands: &[EventSet],
        suffix: &[EventSet],
        max_size: usize,
        covered: &EventSet,
        start: usize,
        left: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if covered.is_full() {
            return true;
        }
        let missing = covered.complement();
        if left == 0 || missing.len() > left * max_size {
            return false;
        }
        for i in start..cands.len() {
            if !missing.is_subset(&suffix[i].union(covered)) {
                return false;
            }
            if cands[i].is_subset(covered) {
                continue;
            }
            chosen.push(i);
            if dfs(
                cands,
                suffix,
                max_size,
                &covered.union(&cands[i]),
                i + 1,
                left - 1,
                chosen,
            ) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    (1..=upper).find_map(|k| {
        let mut chosen = Vec::new();
        dfs(
            candidates,
            &suffix,
            max_size,
            &EventSet::empty(universe),
            0,
            k,
            &mut chosen,
        )
        .then_some(chosen)
    })
}

fn greedy_cover(universe: usize, candidates: &[EventSet]) -> Vec<usize> {
    let mut covered = EventSet::empty(universe);
    let mut out = Vec::new();
    while !covered.is_full() {
        let best = (0..candidates.len())
            .max_by_key(|&i| (candidates[i].difference(&covered).len(), std::cmp::Reverse(i)))
            .expect("candidates cover the space");
        out.push(best);
        covered = covered.union(&candidates[best]);
    }
    out
}

/// A minimum-cardinality cover of `X` by assigned null events, if any.
pub fn find_null_cover(space: &MeasureSpace, tol: Tolerance) -> Option<NullCover> {
    let nulls: Vec<EventSet> = space
        .assigned()
        .filter(|(e, v)| !e.is_empty() && is_null(v, tol))
        .map(|(e, _)| e.clone())
        .collect();
    let picked = min_cover(space.sample_size(), &nulls)?;
    Some(NullCover {
        provenance: vec![Provenance::Supplied; picked.len()],
        events: picked.into_iter().map(|i| nulls[i].clone()).collect(),
    })
}

/// Nonempty, covers `X`, and every member is assigned and null.
pub fn verify_null_cover(cover: &NullCover, space: &MeasureSpace, tol: Tolerance) -> bool {
    let union = cover.events.iter().fold(space.empty(), |acc, e| acc.union(e));
    !cover.events.is_empty()
        && union.is_full()
        && cover
            .events
            .iter()
            .all(|e| space.value(e).is_some_and(|v| is_null(v, tol)))
}

/// Payoff `Σ s_i (χ_{B_i}(x) − μ(B_i))` at every sample point.
pub fn payoffs(book: &DutchBook, space: &MeasureSpace) -> Result<Vec<Scalar>, NogoError> {
    let kind = space.kind().unwrap_or(Kind::Exact);
    let mut terms = Vec::with_capacity(book.bets.len());
    for bet in &book.bets {
        let mu = space
            .value(&bet.event)
            .ok_or_else(|| NogoError::Unassigned(space.name_of(&bet.event)))?;
        terms.push((bet, mu));
    }
    Ok((0..space.sample_size())
        .map(|x| {
            terms.iter().fold(Scalar::zero(kind), |acc, (bet, mu)| {
                let chi = if bet.event.contains(x) {
                    Scalar::one(kind)
                } else {
                    Scalar::zero(kind)
                };
                &acc + &(&bet.stake * &(&chi - mu))
            })
        })
        .collect())
}

/// True iff the payoff is strictly negative at every sample point.
pub fn verify_dutch_book(book: &DutchBook, space: &MeasureSpace, tol: Tolerance) -> Result<bool, NogoError> {
    let zero = Scalar::zero(space.kind().unwrap_or(Kind::Exact));
    Ok(payoffs(book, space)?
        .iter()
        .all(|p| scalar_cmp(p, &zero, tol) == Some(std::cmp::Ordering::Less)))
}

/// Stakes of −1 on every cover member.
pub fn dutch_book(cover: &NullCover, space: &MeasureSpace, tol: Tolerance) -> Result<DutchBook, NogoError> {
    if !verify_null_cover(cover, space, tol) {
        return Err(NogoError::InvalidCover);
    }
    let kind = space.kind().unwrap_or(Kind::Exact);
    let book = DutchBook {
        bets: cover
            .events
            .iter()
            .map(|e| Bet {
                event: e.clone(),
                stake: -Scalar::one(kind),
            })
            .collect(),
    };
    if !verify_dutch_book(&book, space, tol)? {
        return Err(NogoError::BookFailed);
    }
    Ok(book)
}

/// The reduction: removes from `X` every point lying in an orthogonal-pair
/// intersection (`R1`) or outside some context's events (`R2`). A remaining
/// point yields a coloring; otherwise the removed pieces form a null cover.
pub fn reduce(rep: &Representation, tol: Tolerance, context_cap: u64) -> Result<NoGoReport, NogoError> {
    let structure = find_contexts(rep.experiment(), tol, context_cap)?;
    reduce_with(rep, &structure, tol)
}

/// [`reduce`] against a precomputed context structure.
pub fn reduce_with(rep: &Representation, structure: &OrthoStructure, tol: Tolerance) -> Result<NoGoReport, NogoError> {
    let weak = check_weak_representation(rep, tol)?;
    if !weak.complete() {
        return Err(NogoError::Precondition {
            stage: "weak representation".into(),
            report: Box::new(weak),
        });
    }
    let wc = check_wc(rep, structure, tol)?;
    if !wc.complete() {
        return Err(NogoError::Precondition {
            stage: "WC".into(),
            report: Box::new(wc),
        });
    }

    let space = rep.space();
    let labels = structure.vertices();
    let mut pieces: Vec<(EventSet, Provenance)> = Vec::new();
    let mut r1 = space.empty();
    for &(i, j) in structure.ortho_pairs() {
        let e = rep.event(&labels[i]).intersection(rep.event(&labels[j]));
        r1 = r1.union(&e);
        pieces.push((
            e,
            Provenance::OrthoPair {
                first: labels[i].clone(),
                second: labels[j].clone(),
            },
        ));
    }
    let mut r2 = space.empty();
    for ctx in structure.contexts() {
        let t = ctx
            .iter()
            .fold(space.empty(), |acc, &i| acc.union(rep.event(&labels[i])));
        let e = t.complement();
        r2 = r2.union(&e);
        pieces.push((
            e,
            Provenance::ContextComplement {
                context: ctx.iter().map(|&i| labels[i].clone()).collect(),
            },
        ));
    }
    let x_prime = r1.union(&r2).complement();

    let first = x_prime.members().next();
    if let Some(x) = first {
        let coloring = Coloring(labels.iter().map(|l| (l.clone(), rep.event(l).contains(x))).collect());
        let outcome = if verify_coloring(structure, &coloring)? {
            Outcome::Coloring { point: x, coloring }
        } else {
            Outcome::Violation {
                details: vec![format!("f_x at point {x} does not color every context exactly once")],
            }
        };
        return Ok(NoGoReport {
            r1,
            r2,
            x_prime,
            outcome,
        });
    }

    let mut details = Vec::new();
    let mut candidates: BTreeMap<EventSet, Provenance> = BTreeMap::new();
    for (e, tag) in pieces {
        if e.is_empty() {
            continue;
        }
        if !space.contains_event(&e) {
            details.push(format!("{} is not in the event collection", space.name_of(&e)));
            continue;
        }
        match space.value(&e) {
            None => details.push(format!("measure unassigned on {}", space.name_of(&e))),
            Some(v) if !is_null(v, tol) => details.push(format!("{} has measure {v}, not 0", space.name_of(&e))),
            Some(_) => {
                candidates.entry(e).or_insert(tag);
            }
        }
    }
    if !details.is_empty() {
        return Ok(NoGoReport {
            r1,
            r2,
            x_prime,
            outcome: Outcome::Violation { details },
        });
    }
    let (events, tags): (Vec<EventSet>, Vec<Provenance>) = candidates.into_iter().unzip();
    let Some(picked) = min_cover(space.sample_size(), &events) else {
        return Ok(NoGoReport {
            r1,
            r2,
            x_prime,
            outcome: Outcome::Violation {
                details: vec!["R1 and R2 pieces do not cover the sample space".into()],
            },
        });
    };
    let cover = NullCover {
        events: picked.iter().map(|&i| events[i].clone()).collect(),
        provenance: picked.iter().map(|&i| tags[i].clone()).collect(),
    };
    let book = dutch_book(&cover, space, tol)?;
    Ok(NoGoReport {
        r1,
        r2,
        x_prime,
        outcome: Outcome::NullCover { cover, book },
    })
}
