//! Finite weak probability spaces and their axiom checkers.
//!
//! A [`MeasureSpace`] is a finite sample space, an event collection and a
//! partial measure tagged with a [`Flavor`]. Checkers never assume values
//! that are not assigned: an axiom instance with an unassigned operand is
//! listed as an obligation instead of being checked.
//!
//! Pair instances are the unordered pairs `{A, B}` of disjoint events with
//! `A ∪ B` in the collection and at least two of `A`, `B`, `A ∪ B` assigned.
//! Triple instances (quantum flavor) are the unordered triples of distinct,
//! pairwise disjoint, assigned events whose unions lie in the collection.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::exactnum::{scalar_cmp, ArithError, Kind, Real, Scalar, Tolerance};

/// Largest atom count [`generate_algebra`] will expand (2^20 events).
pub const MAX_ALGEBRA_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("sample space must have at least one point")]
    EmptySampleSpace,
    #[error("point {point} outside a sample space of {size} points")]
    PointOutOfRange { point: usize, size: usize },
    #[error("event {0} listed twice")]
    DuplicateEvent(String),
    #[error("event {0} is not in the event collection")]
    NotInSigma(String),
    #[error("measure unassigned on event {0}")]
    Unassigned(String),
    #[error("event belongs to a sample space of {found} points, expected {expected}")]
    UniverseMismatch { expected: usize, found: usize },
    #[error("generated algebra has {0} atoms, more than the supported {MAX_ALGEBRA_ATOMS}")]
    AlgebraTooLarge(usize),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A subset of `{0, .., universe - 1}` as a bitmask. Spaces up to 64 points
/// stay inline; larger ones spill to the heap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EventSet {
    universe: usize,
    words: SmallVec<[u64; 1]>,
}

impl EventSet {
    fn word_count(universe: usize) -> usize {
        universe.div_ceil(64).max(1)
    }

    pub fn empty(universe: usize) -> EventSet {
        EventSet {
            universe,
            words: SmallVec::from_elem(0, Self::word_count(universe)),
        }
    }

    pub fn full(universe: usize) -> EventSet {
        EventSet::empty(universe).complement()
    }

    pub fn singleton(universe: usize, point: usize) -> EventSet {
        let mut e = EventSet::empty(universe);
        e.insert(point);
        e
    }

    pub fn from_members(universe: usize, members: impl IntoIterator<Item = usize>) -> Result<EventSet, SpaceError> {
        let mut e = EventSet::empty(universe);
        for p in members {
            if p >= universe {
                return Err(SpaceError::PointOutOfRange {
                    point: p,
                    size: universe,
                });
            }
            e.insert(p);
        }
        Ok(e)
    }

    /// Builds the set of points satisfying `pred`.
    pub fn from_fn(universe: usize, pred: impl Fn(usize) -> bool) -> EventSet {
        let mut e = EventSet::empty(universe);
        for p in (0..universe).filter(|&p| pred(p)) {
            e.insert(p);
        }
        e
    }

    /// Panics when `point` is outside the universe.
    pub fn insert(&mut self, point: usize) {
        assert!(point < self.universe, "point {point} out of range");
        self.words[point / 64] |= 1 << (point % 64);
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn contains(&self, point: usize) -> bool {
        point < self.universe && self.words[point / 64] >> (point % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |&p| self.contains(p))
    }

    fn zip(&self, other: &EventSet, f: impl Fn(u64, u64) -> u64) -> EventSet {
        assert_eq!(self.universe, other.universe, "events from different sample spaces");
        EventSet {
            universe: self.universe,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn union(&self, other: &EventSet) -> EventSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &EventSet) -> EventSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &EventSet) -> EventSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> EventSet {
        let mut words: SmallVec<[u64; 1]> = self.words.iter().map(|w| !w).collect();
        let rem = self.universe % 64;
        if rem != 0 {
            *words.last_mut().unwrap() &= (1u64 << rem) - 1;
        }
        if self.universe == 0 {
            words[0] = 0;
        }
        EventSet {
            universe: self.universe,
            words,
        }
    }

    pub fn is_subset(&self, other: &EventSet) -> bool {
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &EventSet) -> bool {
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & b == 0)
    }
}

impl Ord for EventSet {
    /// Universe size first, then lexicographic order of the sorted member lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.universe
            .cmp(&other.universe)
            .then_with(|| self.members().cmp(other.members()))
    }
}

impl PartialOrd for EventSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EventSet{self}")
    }
}

impl Serialize for EventSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.members())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Classical,
    Generalized,
    Negative,
    Complex,
    Upper,
    Lower,
    Quantum,
}

impl Flavor {
    pub const ALL: [Flavor; 7] = [
        Flavor::Classical,
        Flavor::Generalized,
        Flavor::Negative,
        Flavor::Complex,
        Flavor::Upper,
        Flavor::Lower,
        Flavor::Quantum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Classical => "classical",
            Flavor::Generalized => "generalized",
            Flavor::Negative => "negative",
            Flavor::Complex => "complex",
            Flavor::Upper => "upper",
            Flavor::Lower => "lower",
            Flavor::Quantum => "quantum",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Flavor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Flavor::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown flavor `{s}`"))
    }
}

/// The event collection: the whole power set, or an explicit list.
#[derive(Debug, Clone, PartialEq)]
pub enum Sigma {
    Powerset,
    Listed(Vec<EventSet>),
}

#[derive(Debug, Clone)]
pub struct MeasureSpace {
    sample_size: usize,
    sigma: Sigma,
    index: HashSet<EventSet>,
    measure: BTreeMap<EventSet, Scalar>,
    flavor: Flavor,
    names: BTreeMap<EventSet, String>,
}

impl PartialEq for MeasureSpace {
    fn eq(&self, other: &Self) -> bool {
        self.sample_size == other.sample_size
            && self.sigma == other.sigma
            && self.measure == other.measure
            && self.flavor == other.flavor
    }
}

impl MeasureSpace {
    pub fn powerset(sample_size: usize, flavor: Flavor) -> Result<MeasureSpace, SpaceError> {
        if sample_size == 0 {
            return Err(SpaceError::EmptySampleSpace);
        }
        Ok(MeasureSpace {
            sample_size,
            sigma: Sigma::Powerset,
            index: HashSet::new(),
            measure: BTreeMap::new(),
            flavor,
            names: BTreeMap::new(),
        })
    }

    pub fn listed(sample_size: usize, events: Vec<EventSet>, flavor: Flavor) -> Result<MeasureSpace, SpaceError> {
        if sample_size == 0 {
            return Err(SpaceError::EmptySampleSpace);
        }
        let mut index = HashSet::with_capacity(events.len());
        for e in &events {
            if e.universe() != sample_size {
                return Err(SpaceError::UniverseMismatch {
                    expected: sample_size,
                    found: e.universe(),
                });
            }
            if !index.insert(e.clone()) {
                return Err(SpaceError::DuplicateEvent(e.to_string()));
            }
        }
        Ok(MeasureSpace {
            sample_size,
            sigma: Sigma::Listed(events),
            index,
            measure: BTreeMap::new(),
            flavor,
            names: BTreeMap::new(),
        })
    }

    /// Sets `mu(event) = value`. The event must be in the collection and the
    /// value must share the kind of the values already assigned.
    pub fn assign(&mut self, event: EventSet, value: Scalar) -> Result<(), SpaceError> {
        if !self.contains_event(&event) {
            return Err(SpaceError::NotInSigma(self.name_of(&event)));
        }
        if let Some(kind) = self.kind() {
            if kind != value.kind() {
                return Err(ArithError::MixedKinds.into());
            }
        }
        self.measure.insert(event, value);
        Ok(())
    }

    pub fn set_name(&mut self, event: EventSet, name: impl Into<String>) {
        self.names.insert(event, name.into());
    }

    pub fn with_flavor(&self, flavor: Flavor) -> MeasureSpace {
        MeasureSpace { flavor, ..self.clone() }
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn sigma(&self) -> &Sigma {
        &self.sigma
    }

    pub fn full(&self) -> EventSet {
        EventSet::full(self.sample_size)
    }

    pub fn empty(&self) -> EventSet {
        EventSet::empty(self.sample_size)
    }

    /// Kind of the assigned values, if any are assigned.
    pub fn kind(&self) -> Option<Kind> {
        self.measure.values().next().map(Scalar::kind)
    }

    pub fn contains_event(&self, e: &EventSet) -> bool {
        e.universe() == self.sample_size
            && match self.sigma {
                Sigma::Powerset => true,
                Sigma::Listed(_) => self.index.contains(e),
            }
    }

    pub fn value(&self, e: &EventSet) -> Option<&Scalar> {
        self.measure.get(e)
    }

    pub fn assigned(&self) -> impl Iterator<Item = (&EventSet, &Scalar)> {
        self.measure.iter()
    }

    pub fn assigned_count(&self) -> usize {
        self.measure.len()
    }

    pub fn names(&self) -> &BTreeMap<EventSet, String> {
        &self.names
    }

    pub fn event_by_name(&self, name: &str) -> Option<&EventSet> {
        self.names.iter().find(|(_, n)| n.as_str() == name).map(|(e, _)| e)
    }

    /// Declared name of an event, or its member list.
    pub fn name_of(&self, e: &EventSet) -> String {
        self.names.get(e).cloned().unwrap_or_else(|| e.to_string())
    }

    /// All events of the collection. For a power set this enumerates
    /// `2^n` subsets, so it is limited to small sample spaces.
    pub fn events(&self) -> Vec<EventSet> {
        match &self.sigma {
            Sigma::Listed(v) => v.clone(),
            Sigma::Powerset => {
                assert!(
                    self.sample_size <= MAX_ALGEBRA_ATOMS,
                    "power set too large to enumerate"
                );
                (0u64..1 << self.sample_size)
                    .map(|m| EventSet::from_fn(self.sample_size, |p| m >> p & 1 == 1))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub axiom: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scope: Option<String>,
    pub events: Vec<EventSet>,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Obligation {
    pub axiom: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scope: Option<String>,
    pub events: Vec<EventSet>,
}

/// Outcome of an axiom check. Empty `violations` means every checkable
/// instance holds; `unassigned_obligations` lists what could not be checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub subject: String,
    pub checked: usize,
    pub violations: Vec<Violation>,
    pub unassigned_obligations: Vec<Obligation>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AxiomReport {
    pub fn new(subject: impl Into<String>) -> AxiomReport {
        AxiomReport {
            subject: subject.into(),
            checked: 0,
            violations: Vec::new(),
            unassigned_obligations: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// No violations and nothing left unchecked.
    pub fn complete(&self) -> bool {
        self.violations.is_empty() && self.unassigned_obligations.is_empty()
    }

    pub fn violate(&mut self, axiom: &str, events: Vec<EventSet>, values: Vec<String>) {
        self.violations.push(Violation {
            axiom: axiom.to_string(),
            scope: None,
            events,
            values,
        });
    }

    pub fn oblige(&mut self, axiom: &str, events: Vec<EventSet>) {
        self.unassigned_obligations.push(Obligation {
            axiom: axiom.to_string(),
            scope: None,
            events,
        });
    }

    /// Appends another report, tagging its entries with `scope`.
    pub fn absorb(&mut self, other: AxiomReport, scope: Option<&str>) {
        self.checked += other.checked;
        self.violations.extend(other.violations.into_iter().map(|mut v| {
            v.scope = v.scope.or_else(|| scope.map(str::to_string));
            v
        }));
        self.unassigned_obligations
            .extend(other.unassigned_obligations.into_iter().map(|mut o| {
                o.scope = o.scope.or_else(|| scope.map(str::to_string));
                o
            }));
        self.notes.extend(other.notes);
    }
}

fn vals(space: &MeasureSpace, events: &[&EventSet]) -> Vec<String> {
    events
        .iter()
        .map(|e| {
            space
                .value(e)
                .map_or_else(|| "unassigned".to_string(), |v| v.to_string())
        })
        .collect()
}

/// Closure of the collection under complement and arbitrary binary union.
pub fn check_algebra(space: &MeasureSpace) -> AxiomReport {
    closure_report(space, "algebra", false)
}

/// Closure under complement and under unions of disjoint pairs only.
pub fn check_additive_class(space: &MeasureSpace) -> AxiomReport {
    closure_report(space, "additive_class", true)
}

fn closure_report(space: &MeasureSpace, prefix: &str, disjoint_only: bool) -> AxiomReport {
    let mut report = AxiomReport::new(prefix);
    let Sigma::Listed(events) = space.sigma() else {
        return report;
    };
    if events.is_empty() {
        report.violate(&format!("{prefix}.nonempty"), vec![], vec![]);
        return report;
    }
    for a in events {
        report.checked += 1;
        let c = a.complement();
        if !space.contains_event(&c) {
            report.violate(&format!("{prefix}.complement"), vec![a.clone(), c], vec![]);
        }
    }
    let axiom = if disjoint_only {
        format!("{prefix}.disjoint_union")
    } else {
        format!("{prefix}.union")
    };
    for (i, a) in events.iter().enumerate() {
        for b in &events[i + 1..] {
            if disjoint_only && !a.is_disjoint(b) {
                continue;
            }
            report.checked += 1;
            let u = a.union(b);
            if !space.contains_event(&u) {
                let (x, y) = if a < b { (a, b) } else { (b, a) };
                report.violate(&axiom, vec![x.clone(), y.clone(), u], vec![]);
            }
        }
    }
    report
}

/// A pair instance: disjoint `a`, `b` with union `u` in the collection.
struct PairInstance<'a> {
    a: EventSet,
    b: EventSet,
    u: EventSet,
    values: Option<(&'a Scalar, &'a Scalar, &'a Scalar)>,
}

fn pair_instances(space: &MeasureSpace) -> Vec<PairInstance<'_>> {
    let assigned: Vec<(&EventSet, &Scalar)> = space.assigned().collect();
    let mut out = Vec::new();
    for (i, (a, va)) in assigned.iter().enumerate() {
        for (b, vb) in &assigned[i..] {
            if !a.is_disjoint(b) {
                continue;
            }
            // a == b only for the empty set
            let u = a.union(b);
            if !space.contains_event(&u) {
                continue;
            }
            out.push(PairInstance {
                values: space.value(&u).map(|vu| (*va, *vb, vu)),
                a: (*a).clone(),
                b: (*b).clone(),
                u,
            });
        }
    }
    // assigned union and one assigned part, the other part unassigned
    for (u, _) in &assigned {
        for (a, _) in &assigned {
            if a == u || !a.is_subset(u) {
                continue;
            }
            let b = u.difference(a);
            if space.value(&b).is_some() || !space.contains_event(&b) {
                continue;
            }
            let (a, b) = if **a < b { ((*a).clone(), b) } else { (b, (*a).clone()) };
            out.push(PairInstance {
                a,
                b,
                u: (*u).clone(),
                values: None,
            });
        }
    }
    out
}

fn check_range(space: &MeasureSpace, report: &mut AxiomReport, tol: Tolerance) {
    let flavor = space.flavor();
    if flavor == Flavor::Complex {
        return;
    }
    let kind = space.kind().unwrap_or(Kind::Exact);
    let zero = Scalar::zero(kind);
    let one = Scalar::one(kind);
    for (e, v) in space.assigned() {
        report.checked += 1;
        if !v.is_real(tol) {
            report.violate("range.real", vec![e.clone()], vec![v.to_string()]);
            continue;
        }
        if flavor == Flavor::Negative {
            continue;
        }
        let below = scalar_cmp(v, &zero, tol) == Some(Ordering::Less);
        let above = scalar_cmp(v, &one, tol) == Some(Ordering::Greater);
        if below || above {
            report.violate("range.unit_interval", vec![e.clone()], vec![v.to_string()]);
        }
    }
}

fn check_normalization(space: &MeasureSpace, report: &mut AxiomReport, tol: Tolerance) {
    let x = space.full();
    if !space.contains_event(&x) {
        return;
    }
    match space.value(&x) {
        None => report.oblige("normalization", vec![x]),
        Some(v) => {
            report.checked += 1;
            if !v.eq_tol(&Scalar::one(v.kind()), tol) {
                report.violate("normalization", vec![x], vec![v.to_string()]);
            }
        }
    }
}

/// Decides one pair instance from `cmp(mu(A u B), mu(A) + mu(B))` and equality.
type PairRule = fn(Option<Ordering>, bool) -> bool;

fn check_pairs(space: &MeasureSpace, report: &mut AxiomReport, tol: Tolerance) {
    let (axiom, holds): (&str, PairRule) = match space.flavor() {
        Flavor::Upper => ("subadditivity", |ord, _| ord != Some(Ordering::Greater)),
        Flavor::Lower => ("superadditivity", |ord, _| ord != Some(Ordering::Less)),
        _ => ("additivity", |_, eq| eq),
    };
    for inst in pair_instances(space) {
        match inst.values {
            None => report.oblige(axiom, vec![inst.a, inst.b, inst.u]),
            Some((va, vb, vu)) => {
                report.checked += 1;
                let sum = va.try_op(vb, crate::exactnum::ArithOp::Add).expect("homogeneous kinds");
                // non-real values are flagged by the range check
                let ord = scalar_cmp(vu, &sum, tol);
                if !holds(ord, vu.eq_tol(&sum, tol)) {
                    let values = vals(space, &[&inst.a, &inst.b, &inst.u]);
                    report.violate(axiom, vec![inst.a, inst.b, inst.u], values);
                }
            }
        }
    }
}

fn check_triples(space: &MeasureSpace, report: &mut AxiomReport, tol: Tolerance) {
    let assigned: Vec<(&EventSet, &Scalar)> = space.assigned().collect();
    let m = assigned.len();
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (assigned[i].0, assigned[j].0);
            if !a.is_disjoint(b) {
                continue;
            }
            for k in j + 1..m {
                let c = assigned[k].0;
                if !a.is_disjoint(c) || !b.is_disjoint(c) {
                    continue;
                }
                let ab = a.union(b);
                let bc = b.union(c);
                let ac = a.union(c);
                let abc = ab.union(c);
                if [&ab, &bc, &ac, &abc].iter().any(|e| !space.contains_event(e)) {
                    continue;
                }
                let events = vec![a.clone(), b.clone(), c.clone()];
                let (Some(vab), Some(vbc), Some(vac), Some(vabc)) =
                    (space.value(&ab), space.value(&bc), space.value(&ac), space.value(&abc))
                else {
                    report.oblige("triple_identity", events);
                    continue;
                };
                report.checked += 1;
                let rhs = &(&(&(vab + vbc) + vac) - assigned[i].1) - assigned[j].1;
                let rhs = &rhs - assigned[k].1;
                if !vabc.eq_tol(&rhs, tol) {
                    let values = vec![
                        assigned[i].1.to_string(),
                        assigned[j].1.to_string(),
                        assigned[k].1.to_string(),
                        vab.to_string(),
                        vbc.to_string(),
                        vac.to_string(),
                        vabc.to_string(),
                    ];
                    report.violate("triple_identity", events, values);
                }
            }
        }
    }
}

/// Checks the axioms of the space's own flavor.
pub fn check_flavor(space: &MeasureSpace, tol: Tolerance) -> AxiomReport {
    let flavor = space.flavor();
    let mut report = AxiomReport::new(flavor.name());
    let structure = if flavor == Flavor::Generalized {
        check_additive_class(space)
    } else {
        check_algebra(space)
    };
    report.absorb(structure, None);
    check_normalization(space, &mut report, tol);
    check_range(space, &mut report, tol);
    if flavor == Flavor::Quantum {
        check_triples(space, &mut report, tol);
    } else {
        check_pairs(space, &mut report, tol);
    }
    report
}

/// Lists every assigned pair `A ⊊ B` with `mu(A) > mu(B)`.
pub fn check_monotonicity(space: &MeasureSpace, tol: Tolerance) -> AxiomReport {
    let mut report = AxiomReport::new("monotonicity");
    let assigned: Vec<(&EventSet, &Scalar)> = space.assigned().collect();
    for (a, va) in &assigned {
        for (b, vb) in &assigned {
            if a == b || !a.is_subset(b) {
                continue;
            }
            report.checked += 1;
            if scalar_cmp(va, vb, tol) == Some(Ordering::Greater) {
                report.violate(
                    "monotonicity",
                    vec![(*a).clone(), (*b).clone()],
                    vec![va.to_string(), vb.to_string()],
                );
            }
        }
    }
    report
}

/// Atoms of the algebra generated by `generators`: the nonempty cells of
/// the partition by membership pattern, ordered by least member.
pub fn atoms(universe: usize, generators: &[EventSet]) -> Vec<EventSet> {
    let mut cells: Vec<EventSet> = Vec::new();
    let mut by_pattern: HashMap<Vec<bool>, usize> = HashMap::new();
    for p in 0..universe {
        let pattern: Vec<bool> = generators.iter().map(|g| g.contains(p)).collect();
        let idx = *by_pattern.entry(pattern).or_insert_with(|| {
            cells.push(EventSet::empty(universe));
            cells.len() - 1
        });
        cells[idx].insert(p);
    }
    cells
}

/// The smallest algebra over `universe` points containing `generators`,
/// as all unions of atoms, sorted.
pub fn generate_algebra(universe: usize, generators: &[EventSet]) -> Result<Vec<EventSet>, SpaceError> {
    for g in generators {
        if g.universe() != universe {
            return Err(SpaceError::UniverseMismatch {
                expected: universe,
                found: g.universe(),
            });
        }
    }
    let atoms = atoms(universe, generators);
    if atoms.len() > MAX_ALGEBRA_ATOMS {
        return Err(SpaceError::AlgebraTooLarge(atoms.len()));
    }
    let mut out: Vec<EventSet> = (0u64..1 << atoms.len())
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .fold(EventSet::empty(universe), |acc, (_, a)| acc.union(a))
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Restricts the space to `sub_events`, re-tagged classical.
pub fn restrict_measure(space: &MeasureSpace, sub_events: &[EventSet]) -> Result<MeasureSpace, SpaceError> {
    let mut out = MeasureSpace::listed(space.sample_size(), sub_events.to_vec(), Flavor::Classical)?;
    for e in sub_events {
        if !space.contains_event(e) {
            return Err(SpaceError::NotInSigma(space.name_of(e)));
        }
        let v = space.value(e).ok_or_else(|| SpaceError::Unassigned(space.name_of(e)))?;
        out.assign(e.clone(), v.clone())?;
        if let Some(n) = space.names().get(e) {
            out.set_name(e.clone(), n.clone());
        }
    }
    Ok(out)
}

/// Convenience: value of `e` as a real number, if assigned and real.
pub fn real_value<'a>(space: &'a MeasureSpace, e: &EventSet, tol: Tolerance) -> Option<&'a Real> {
    space.value(e).and_then(|v| v.as_real(tol))
}
