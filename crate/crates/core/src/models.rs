//! Bundled instances: the EPR and GHZ upper-probability models, a GHZ
//! representation wired to Pauli projectors, and two KS ray sets.
//!
//! EPR points are indexed `4 * row + col` with rows `B∩B'`, `B^c∩B'`,
//! `B∩B'^c`, `B^c∩B'^c` and columns `A∩A'`, `A^c∩A'`, `A∩A'^c`, `A^c∩A'^c`.
//! GHZ points are indexed `4[A^c] + 2[B^c] + [C^c]`, so 0 is `A∩B∩C`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::exactnum::{QSqrt3, Scalar, Tolerance};
use crate::nogo::{find_null_cover, verify_null_cover, Representation};
use crate::quantum::{Experiment, Ket, Matrix, Projector};
use crate::spaces::{check_flavor, AxiomReport, EventSet, Flavor, MeasureSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    UnknownId(String),
}

#[derive(Debug, Clone)]
pub struct BundledModel {
    pub id: &'static str,
    pub space: MeasureSpace,
    pub representation: Option<Representation>,
    pub note: &'static str,
}

fn q(n: i64, d: i64) -> QSqrt3 {
    QSqrt3::ratio(n, d)
}

/// `n/d + m/e * sqrt3`
fn qs(n: i64, d: i64, m: i64, e: i64) -> QSqrt3 {
    &q(n, d) + &(&q(m, e) * &QSqrt3::sqrt3())
}

fn ex(v: QSqrt3) -> Scalar {
    Scalar::exact(v)
}

/// Events of the EPR observables `A`, `A'`, `B`, `B'` (by name, with a
/// trailing `'`), over the 16-point space.
pub fn epr_observable(name: &str) -> Option<EventSet> {
    let pred: fn(usize, usize) -> bool = match name {
        "A" => |_, c| c == 0 || c == 2,
        "A'" => |_, c| c == 0 || c == 1,
        "B" => |r, _| r == 0 || r == 2,
        "B'" => |r, _| r == 0 || r == 1,
        _ => return None,
    };
    Some(EventSet::from_fn(16, |p| pred(p / 4, p % 4)))
}

/// Events of the GHZ observables `A`, `B`, `C` over the 8-point space.
pub fn ghz_observable(name: &str) -> Option<EventSet> {
    let bit = match name {
        "A" => 2,
        "B" => 1,
        "C" => 0,
        _ => return None,
    };
    Some(EventSet::from_fn(8, |p| p >> bit & 1 == 0))
}

fn obs(f: fn(&str) -> Option<EventSet>, name: &str) -> EventSet {
    match name.strip_prefix('~') {
        Some(base) => f(base).expect("known observable").complement(),
        None => f(name).expect("known observable"),
    }
}

fn meet(f: fn(&str) -> Option<EventSet>, names: &[&str]) -> EventSet {
    names
        .iter()
        .map(|n| obs(f, n))
        .reduce(|a, b| a.intersection(&b))
        .expect("at least one name")
}

const EPR_ROWS: [[&str; 2]; 4] = [["B", "B'"], ["~B", "B'"], ["B", "~B'"], ["~B", "~B'"]];
const EPR_COLS: [[&str; 2]; 4] = [["A", "A'"], ["~A", "A'"], ["A", "~A'"], ["~A", "~A'"]];

fn epr_atom_table() -> [[QSqrt3; 4]; 4] {
    [
        [q(0, 1), q(1, 16), q(1, 8), qs(1, 8, 1, 8)],
        [q(1, 8), qs(1, 8, -1, 8), q(0, 1), q(1, 16)],
        [q(1, 16), q(0, 1), qs(1, 8, -1, 8), q(1, 8)],
        [qs(1, 8, 1, 8), q(1, 8), q(1, 16), q(0, 1)],
    ]
}

const EPR_JOINT_ROWS: [&str; 4] = ["B", "~B", "B'", "~B'"];
const EPR_JOINT_COLS: [&str; 4] = ["A", "~A", "A'", "~A'"];

fn epr_joint_table() -> [[QSqrt3; 4]; 4] {
    [
        [qs(1, 4, -1, 8), qs(1, 4, 1, 8), q(0, 1), q(1, 2)],
        [qs(1, 4, 1, 8), qs(1, 4, -1, 8), q(1, 2), q(0, 1)],
        [q(1, 8), q(3, 8), qs(1, 4, -1, 8), qs(1, 4, 1, 8)],
        [q(3, 8), q(1, 8), qs(1, 4, 1, 8), qs(1, 4, -1, 8)],
    ]
}

/// Atoms of the four extra null events `N1`..`N4`, in the order they appear
/// in each event's defining expression.
pub fn epr_null_atoms() -> [Vec<usize>; 4] {
    let m = |a: &[&str], b: &[&str]| -> Vec<usize> {
        let first = meet(epr_observable, a);
        let second = meet(epr_observable, b);
        first.members().chain(second.members()).collect()
    };
    [
        m(&["~A", "~A'", "B"], &["~A", "A'", "~B", "B'"]),
        m(&["A", "A'", "~B"], &["A", "~A'", "B", "~B'"]),
        m(&["~A", "A'", "~B"], &["~A", "~A'", "B", "~B'"]),
        m(&["A", "~A'", "B"], &["A", "A'", "~B", "B'"]),
    ]
}

/// The four extra null events, `N1`..`N4`.
pub fn epr_null_events() -> [EventSet; 4] {
    epr_null_atoms().map(|atoms| EventSet::from_members(16, atoms).expect("points in range"))
}

/// Point of the EPR space whose four observables are all flipped.
pub fn epr_complement_point(p: usize) -> usize {
    4 * (3 - p / 4) + (3 - p % 4)
}

fn assign_named(space: &mut MeasureSpace, name: String, e: EventSet, v: QSqrt3) {
    space.set_name(e.clone(), name);
    space.assign(e, ex(v)).expect("model events lie in the power set");
}

pub fn build_epr_model() -> BundledModel {
    let mut space = MeasureSpace::powerset(16, Flavor::Upper).expect("nonempty");
    let atoms = epr_atom_table();
    for (r, row) in EPR_ROWS.iter().enumerate() {
        for (c, col) in EPR_COLS.iter().enumerate() {
            let names = [col[0], col[1], row[0], row[1]];
            let e = EventSet::singleton(16, 4 * r + c);
            assign_named(&mut space, names.join("&"), e, atoms[r][c].clone());
        }
    }
    let joints = epr_joint_table();
    for (r, row) in EPR_JOINT_ROWS.iter().enumerate() {
        for (c, col) in EPR_JOINT_COLS.iter().enumerate() {
            let e = meet(epr_observable, &[col, row]);
            assign_named(&mut space, format!("{col}&{row}"), e, joints[r][c].clone());
        }
    }
    for name in ["A", "~A", "A'", "~A'", "B", "~B", "B'", "~B'"] {
        assign_named(&mut space, name.into(), obs(epr_observable, name), q(1, 2));
    }
    assign_named(&mut space, "X".into(), EventSet::full(16), q(1, 1));
    assign_named(&mut space, "empty".into(), EventSet::empty(16), q(0, 1));
    for (k, e) in epr_null_events().into_iter().enumerate() {
        assign_named(&mut space, format!("N{}", k + 1), e, q(0, 1));
    }
    BundledModel {
        id: "epr",
        space,
        representation: None,
        note: "Bell-EPR upper probability model: 16 atoms, joint table, marginals 1/2, four extra null events",
    }
}

/// `(A∩B∩C) ∪ (A^c∩B^c∩C) ∪ (A∩B^c∩C^c) ∪ (A^c∩B∩C^c)`
pub fn ghz_null_union() -> EventSet {
    [["A", "B", "C"], ["~A", "~B", "C"], ["A", "~B", "~C"], ["~A", "B", "~C"]]
        .iter()
        .map(|t| meet(ghz_observable, t))
        .reduce(|a, b| a.union(&b))
        .expect("nonempty")
}

fn ghz_atom_name(p: usize) -> String {
    ["A", "B", "C"]
        .iter()
        .enumerate()
        .map(|(k, n)| {
            if p >> (2 - k) & 1 == 1 {
                format!("~{n}")
            } else {
                n.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("&")
}

fn ghz_space() -> MeasureSpace {
    let mut space = MeasureSpace::powerset(8, Flavor::Upper).expect("nonempty");
    for p in 0..8 {
        let v = if p == 0 || p == 7 { q(1, 1) } else { q(0, 1) };
        assign_named(&mut space, ghz_atom_name(p), EventSet::singleton(8, p), v);
    }
    for name in ["A", "B", "C"] {
        assign_named(&mut space, name.into(), obs(ghz_observable, name), q(1, 1));
        assign_named(
            &mut space,
            format!("~{name}"),
            obs(ghz_observable, &format!("~{name}")),
            q(0, 1),
        );
    }
    assign_named(&mut space, "X".into(), EventSet::full(8), q(1, 1));
    assign_named(&mut space, "empty".into(), EventSet::empty(8), q(0, 1));
    assign_named(&mut space, "U".into(), ghz_null_union(), q(0, 1));
    space
}

pub fn build_ghz_model() -> BundledModel {
    BundledModel {
        id: "ghz",
        space: ghz_space(),
        representation: None,
        note: "GHZ upper probability model: atoms ABC and ~A~B~C carry 1, marginals A, B, C carry 1, plus the null union U",
    }
}

fn pauli(c: char) -> Matrix {
    let z = || ex(q(0, 1));
    let o = || ex(q(1, 1));
    let i = || Scalar::i(crate::exactnum::Kind::Exact);
    let rows = match c {
        'X' => vec![vec![z(), o()], vec![o(), z()]],
        'Y' => vec![vec![z(), -i()], vec![i(), z()]],
        _ => unreachable!("only X and Y are used"),
    };
    Matrix::from_rows(rows).expect("square")
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.dim(), b.dim());
    let rows = (0..n * m)
        .map(|r| (0..n * m).map(|c| a.get(r / m, c / m) * b.get(r % m, c % m)).collect())
        .collect();
    Matrix::from_rows(rows).expect("square")
}

/// Eigenprojector `(I + sign * M) / 2` of a three-qubit Pauli product.
fn pauli_projector(label: &str, word: &str, sign: i64) -> Projector {
    let mut chars = word.chars().map(pauli);
    let first = chars.next().expect("nonempty word");
    let m = chars.fold(first, |acc, p| kron(&acc, &p));
    let id = Matrix::identity(8, crate::exactnum::Kind::Exact);
    let half = ex(q(sign, 2));
    let scaled =
        Matrix::from_rows(m.rows().map(|row| row.iter().map(|x| x * &half).collect()).collect()).expect("square");
    let rows: Vec<Vec<Scalar>> = id
        .rows()
        .zip(scaled.rows())
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| &(x * &ex(q(1, 2))) + y).collect())
        .collect();
    Projector::from_matrix(label, Matrix::from_rows(rows).expect("square"), Tolerance::DEFAULT)
        .expect("Pauli eigenprojector")
}

/// GHZ experiment in `d = 8`: `PA`, `PB`, `PC` are the −1 eigenprojectors
/// of `XYY`, `YXY`, `YYX`; `PD` is the +1 eigenprojector of `XXX`; each has
/// a complement `*c`. The state is `|000> + |111>`.
pub fn ghz_experiment() -> Experiment {
    let mut ps = Vec::new();
    for (label, word, sign) in [
        ("PA", "XYY", -1),
        ("PB", "YXY", -1),
        ("PC", "YYX", -1),
        ("PD", "XXX", 1),
    ] {
        let p = pauli_projector(label, word, sign);
        ps.push(
            p.complement(format!("{label}c"), Tolerance::DEFAULT)
                .expect("proper projector"),
        );
        ps.push(p);
    }
    let mut amps = vec![ex(q(0, 1)); 8];
    amps[0] = ex(q(1, 1));
    amps[7] = ex(q(1, 1));
    Experiment::new(Ket::new(amps).expect("nonzero"), ps).expect("consistent experiment")
}

/// The GHZ model wired to [`ghz_experiment`]: `E(PA) = A`, `E(PB) = B`,
/// `E(PC) = C`, `E(PD) = U^c` with `mu(U^c) = 1`, complements to the empty set.
pub fn build_ghz_wired() -> BundledModel {
    let mut space = ghz_space();
    assign_named(&mut space, "~U".into(), ghz_null_union().complement(), q(1, 1));
    let mut map = BTreeMap::new();
    for (label, e) in [
        ("PA", obs(ghz_observable, "A")),
        ("PB", obs(ghz_observable, "B")),
        ("PC", obs(ghz_observable, "C")),
        ("PD", ghz_null_union().complement()),
    ] {
        map.insert(label.to_string(), e);
        map.insert(format!("{label}c"), EventSet::empty(8));
    }
    let rep = Representation::new(ghz_experiment(), space.clone(), map).expect("wired map is valid");
    BundledModel {
        id: "ghz-wired",
        space,
        representation: Some(rep),
        note: "GHZ model wired to Pauli eigenprojectors in d = 8",
    }
}

pub fn build_model(id: &str) -> Result<BundledModel, ModelError> {
    match id {
        "epr" => Ok(build_epr_model()),
        "ghz" => Ok(build_ghz_model()),
        "ghz-wired" => Ok(build_ghz_wired()),
        _ => Err(ModelError::UnknownId(id.into())),
    }
}

/// A displayed chain of terms and its value.
fn render_chain(lead: &[QSqrt3], minus: &[QSqrt3], total: &QSqrt3) -> String {
    let wrap = |v: &QSqrt3| {
        if v.is_rational() {
            v.to_string()
        } else {
            format!("({v})")
        }
    };
    let mut s = lead.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" + ");
    for v in minus {
        let _ = write!(s, " - {}", wrap(v));
    }
    let _ = write!(s, " = {total}");
    s
}

fn exact_of(space: &MeasureSpace, e: &EventSet) -> QSqrt3 {
    space
        .value(e)
        .and_then(|v| v.re().as_exact().cloned())
        .expect("model values are exact")
}

/// Value `1 + 3/8` that the EPR chain uses for the sum of all atom values.
pub fn epr_chain_atom_total() -> QSqrt3 {
    q(11, 8)
}

/// Replays the EPR consistency argument: for each extra null event `N`,
/// the bound `1 + 3/8 - sum of mu over the atoms of N` must be at least 1
/// (it is exactly 1 for `N1`), and every
/// assignment must be invariant under complementing all four observables.
pub fn verify_epr_consistency() -> AxiomReport {
    let model = build_epr_model();
    let space = &model.space;
    let mut report = AxiomReport::new("epr consistency");
    let one = q(1, 1);
    let events = epr_null_events();
    for (k, (n, members)) in events.iter().zip(epr_null_atoms()).enumerate() {
        let atoms: Vec<QSqrt3> = members
            .into_iter()
            .map(|p| exact_of(space, &EventSet::singleton(16, p)))
            .collect();
        let total = atoms.iter().fold(epr_chain_atom_total(), |acc, a| &acc - a);
        report.checked += 1;
        let chain = render_chain(&[one.clone(), q(3, 8)], &atoms, &total);
        if total < one {
            report.violate(&format!("chain[N{}]", k + 1), vec![n.clone()], vec![chain.clone()]);
        }
        report.notes.push(format!("N{}: {chain}", k + 1));
    }
    for (e, v) in space.assigned() {
        report.checked += 1;
        let image = EventSet::from_fn(16, |p| e.contains(epr_complement_point(p)));
        match space.value(&image) {
            Some(w) if w == v => {}
            Some(w) => report.violate(
                "complementation",
                vec![e.clone(), image.clone()],
                vec![v.to_string(), w.to_string()],
            ),
            None => report.violate(
                "complementation",
                vec![e.clone(), image.clone()],
                vec![v.to_string(), "unassigned".into()],
            ),
        }
    }
    let atom_sum = (0..16).fold(q(0, 1), |acc, p| &acc + &exact_of(space, &EventSet::singleton(16, p)));
    report.notes.push(format!("sum of the 16 atom values: {atom_sum}"));
    for (k, n) in epr_null_events().iter().enumerate() {
        let rest = n
            .complement()
            .members()
            .fold(q(0, 1), |acc, p| &acc + &exact_of(space, &EventSet::singleton(16, p)));
        report.notes.push(format!(
            "N{}: atom bound on the complement from the table itself: {rest}",
            k + 1
        ));
    }
    report
}

/// Replays the GHZ consistency argument: `1 = mu(X) <= mu(U) + mu(U^c)`
/// forces `mu(U^c) >= 1`, and the atom decomposition of `U^c` bounds it by
/// `1 + 0 + 0 + 0 = 1`. Also confirms a null cover exists.
pub fn verify_ghz_consistency() -> AxiomReport {
    let model = build_ghz_model();
    let space = &model.space;
    let mut report = AxiomReport::new("ghz consistency");
    let u = ghz_null_union();
    let mu_x = exact_of(space, &EventSet::full(8));
    let mu_u = exact_of(space, &u);
    report.checked += 1;
    let first = format!(
        "1 = mu(X) = {mu_x} <= mu(U) + mu(U^c) = {mu_u} + mu(U^c), so mu(U^c) >= {}",
        &mu_x - &mu_u
    );
    if mu_x != q(1, 1) || !mu_u.is_zero() {
        report.violate("chain[first]", vec![EventSet::full(8), u.clone()], vec![first.clone()]);
    }
    report.notes.push(first);

    let parts = [["~A", "~B", "~C"], ["A", "B", "~C"], ["~A", "B", "C"], ["A", "~B", "C"]];
    let atoms: Vec<EventSet> = parts.iter().map(|t| meet(ghz_observable, t)).collect();
    let union = atoms.iter().fold(EventSet::empty(8), |acc, a| acc.union(a));
    report.checked += 1;
    if union != u.complement() {
        report.violate("chain[decomposition]", vec![u.complement(), union], vec![]);
    }
    let values: Vec<QSqrt3> = atoms.iter().map(|a| exact_of(space, a)).collect();
    let total = values.iter().fold(q(0, 1), |acc, v| &acc + v);
    let second = format!(
        "1 <= mu(U^c) <= {} = {total}",
        values.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + ")
    );
    report.checked += 1;
    if total != q(1, 1) {
        report.violate("chain[second]", atoms.clone(), vec![second.clone()]);
    }
    report.notes.push(second);

    report.checked += 1;
    match find_null_cover(space, Tolerance::DEFAULT) {
        Some(cover) if verify_null_cover(&cover, space, Tolerance::DEFAULT) => {
            let names: Vec<String> = cover.events.iter().map(|e| space.name_of(e)).collect();
            report.notes.push(format!("null cover: {}", names.join(", ")));
        }
        _ => report.violate("null_cover", vec![], vec!["no null cover".into()]),
    }
    report
}

/// Upper-flavor axiom check of a bundled model.
pub fn check_model(model: &BundledModel) -> AxiomReport {
    check_flavor(&model.space, Tolerance::DEFAULT)
}

/// One integer ray.
type RayRow = [i64; 4];

/// Cabello's 18 rays in `d = 4`, grouped in nine bases of four.
pub const CABELLO_BASES: [[RayRow; 4]; 9] = [
    [[0, 0, 0, 1], [0, 0, 1, 0], [1, 1, 0, 0], [1, -1, 0, 0]],
    [[0, 0, 0, 1], [0, 1, 0, 0], [1, 0, 1, 0], [1, 0, -1, 0]],
    [[1, -1, 1, -1], [1, -1, -1, 1], [1, 1, 0, 0], [0, 0, 1, 1]],
    [[1, -1, 1, -1], [1, 1, 1, 1], [1, 0, -1, 0], [0, 1, 0, -1]],
    [[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 1], [1, 0, 0, -1]],
    [[1, -1, -1, 1], [1, 1, 1, 1], [1, 0, 0, -1], [0, 1, -1, 0]],
    [[1, 1, -1, 1], [1, 1, 1, -1], [1, -1, 0, 0], [0, 0, 1, 1]],
    [[1, 1, -1, 1], [-1, 1, 1, 1], [1, 0, 1, 0], [0, 1, 0, -1]],
    [[1, 1, 1, -1], [-1, 1, 1, 1], [1, 0, 0, 1], [0, 1, -1, 0]],
];

/// The 18 distinct Cabello rays in order of first appearance.
pub fn cabello_rays() -> Vec<RayRow> {
    let mut out: Vec<RayRow> = Vec::new();
    for ray in CABELLO_BASES.iter().flatten() {
        if !out.contains(ray) {
            out.push(*ray);
        }
    }
    out
}

/// Peres' 33 rays in `d = 3` as `(integer part, sqrt2 multiplier)` per
/// component, so `(1, 0)` is 1 and `(0, -1)` is `-sqrt2`.
pub fn peres_rays() -> Vec<[(i64, i64); 3]> {
    let mut bases: Vec<[(i64, i64); 3]> = vec![[(0, 0), (0, 0), (1, 0)]];
    for s in [1, -1] {
        bases.push([(0, 0), (1, 0), (s, 0)]);
        bases.push([(0, 0), (1, 0), (0, s)]);
        bases.push([(0, 0), (0, 1), (s, 0)]);
        for t in [1, -1] {
            bases.push([(1, 0), (s, 0), (0, t)]);
        }
    }
    let mut out: Vec<[(i64, i64); 3]> = Vec::new();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for b in &bases {
        for p in &perms {
            let mut v = [b[p[0]], b[p[1]], b[p[2]]];
            // first nonzero component positive
            let lead = v.iter().find(|c| **c != (0, 0)).copied().expect("nonzero ray");
            if lead.0 < 0 || (lead.0 == 0 && lead.1 < 0) {
                v = v.map(|(a, b)| (-a, -b));
            }
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// Bundled KS ray set by id (`cabello18` or `peres33`).
pub fn load_ks_rayset(id: &str) -> Result<Experiment, ModelError> {
    match id {
        "cabello18" => {
            let ps = cabello_rays()
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    Projector::from_ray(format!("v{:02}", k + 1), r.iter().map(|&x| ex(q(x, 1))).collect())
                        .expect("nonzero ray")
                })
                .collect();
            let psi = Ket::new(vec![ex(q(1, 1)); 4]).expect("nonzero");
            Ok(Experiment::new(psi, ps).expect("consistent experiment"))
        }
        "peres33" => {
            let s2 = std::f64::consts::SQRT_2;
            let ps = peres_rays()
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let v = r
                        .iter()
                        .map(|&(a, b)| Scalar::approx(a as f64 + b as f64 * s2))
                        .collect();
                    Projector::from_ray(format!("p{:02}", k + 1), v).expect("nonzero ray")
                })
                .collect();
            let psi = Ket::new(vec![Scalar::approx(1.0); 3]).expect("nonzero");
            Ok(Experiment::new(psi, ps).expect("consistent experiment"))
        }
        _ => Err(ModelError::UnknownId(id.into())),
    }
}
