//! Finite-dimensional Hilbert-space layer: kets, projectors, Born values,
//! orthogonality/commutation tests and context enumeration.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{ArithError, Kind, Real, Scalar, Tolerance};

/// Default limit on candidate subsets visited by [`find_contexts`].
pub const DEFAULT_CONTEXT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("zero vector cannot be normalized ({0})")]
    ZeroVector(String),
    #[error("projector `{0}` is not Hermitian")]
    NotHermitian(String),
    #[error("projector `{0}` is not idempotent")]
    NotIdempotent(String),
    #[error("projector `{0}` is the zero operator")]
    ZeroProjector(String),
    #[error("projectors `{0}` and `{1}` do not commute; joint statistics are undefined")]
    NonCommuting(String, String),
    #[error("expectation value is not real: {0}")]
    NotReal(String),
    #[error("duplicate projector label `{0}`")]
    DuplicateLabel(String),
    #[error("matrix for `{0}` is not square")]
    NotSquare(String),
    #[error("context enumeration exceeded the cap of {0} candidate subsets")]
    ContextCap(u64),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(dim: usize, kind: Kind) -> Matrix {
        Matrix {
            dim,
            data: vec![Scalar::zero(kind); dim * dim],
        }
    }

    pub fn identity(dim: usize, kind: Kind) -> Matrix {
        let mut m = Matrix::zeros(dim, kind);
        for i in 0..dim {
            m.data[i * dim + i] = Scalar::one(kind);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Option<Matrix> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return None;
        }
        Some(Matrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// `|v><v| / <v|v>`.
    pub fn outer_normalized(v: &[Scalar]) -> Result<Matrix, ArithError> {
        let dim = v.len();
        let norm = v
            .iter()
            .fold(Scalar::zero(v[0].kind()), |acc, x| &acc + &(&x.conj() * x));
        let mut data = Vec::with_capacity(dim * dim);
        for a in v {
            for b in v {
                data.push((a * &b.conj()).try_op(&norm, crate::exactnum::ArithOp::Div)?);
            }
        }
        Ok(Matrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> Kind {
        self.data[0].kind()
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Scalar]> {
        self.data.chunks(self.dim)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.dim;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Scalar::zero(self.kind());
                for k in 0..n {
                    acc = &acc + &(self.get(i, k) * other.get(k, j));
                }
                out.push(acc);
            }
        }
        Matrix { dim: n, data: out }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.get(j, i).conj());
            }
        }
        Matrix { dim: n, data }
    }

    pub fn trace(&self) -> Scalar {
        (0..self.dim).fold(Scalar::zero(self.kind()), |acc, i| &acc + self.get(i, i))
    }

    /// Entrywise zero test: exact on the exact path, `|m_ij| <= eps` otherwise.
    pub fn is_zero(&self, tol: Tolerance) -> bool {
        self.data.iter().all(|x| x.is_zero(tol))
    }

    pub fn eq_tol(&self, other: &Matrix, tol: Tolerance) -> bool {
        self.dim == other.dim && self.data.iter().zip(&other.data).all(|(a, b)| a.eq_tol(b, tol))
    }

    /// `<v| M |v>`.
    pub fn expectation(&self, v: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero(self.kind());
        for (i, vi) in v.iter().enumerate().take(self.dim) {
            let row = v
                .iter()
                .enumerate()
                .fold(Scalar::zero(self.kind()), |row, (j, vj)| &row + &(self.get(i, j) * vj));
            acc = &acc + &(&vi.conj() * &row);
        }
        acc
    }
}

fn check_kinds<'a>(mut it: impl Iterator<Item = &'a Scalar>) -> Result<Kind, QuantumError> {
    let first = it.next().ok_or(QuantumError::ZeroDimension)?.kind();
    if it.all(|s| s.kind() == first) {
        Ok(first)
    } else {
        Err(ArithError::MixedKinds.into())
    }
}

/// A state vector. Amplitudes may be supplied unnormalized; every
/// expectation value divides by the stored squared norm, so the ket behaves
/// as the unit vector along the given direction. This keeps states such as
/// `(1,1,0)/sqrt 2` exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Scalar>,
    norm_sq: Real,
}

impl Ket {
    pub fn new(amplitudes: Vec<Scalar>) -> Result<Ket, QuantumError> {
        check_kinds(amplitudes.iter())?;
        let kind = amplitudes[0].kind();
        let norm_sq = amplitudes
            .iter()
            .fold(Scalar::zero(kind), |acc, a| &acc + &(&a.conj() * a))
            .re()
            .clone();
        if norm_sq.is_zero(Tolerance(0.0)) {
            return Err(QuantumError::ZeroVector("psi".into()));
        }
        Ok(Ket { amplitudes, norm_sq })
    }

    pub fn basis(dim: usize, index: usize, kind: Kind) -> Ket {
        let amplitudes = (0..dim)
            .map(|i| {
                if i == index {
                    Scalar::one(kind)
                } else {
                    Scalar::zero(kind)
                }
            })
            .collect();
        Ket::new(amplitudes).expect("basis vector is nonzero")
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn kind(&self) -> Kind {
        self.amplitudes[0].kind()
    }

    pub fn amplitudes(&self) -> &[Scalar] {
        &self.amplitudes
    }

    /// Squared norm of the stored amplitudes (1 for a normalized ket).
    pub fn norm_sq(&self) -> &Real {
        &self.norm_sq
    }

    /// `<psi|M|psi>` for the normalized state.
    pub fn expectation(&self, m: &Matrix) -> Result<Scalar, QuantumError> {
        if m.dim() != self.dim() {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                found: m.dim(),
            });
        }
        let raw = m.expectation(&self.amplitudes);
        Ok(raw.try_op(&Scalar::real(self.norm_sq.clone()), crate::exactnum::ArithOp::Div)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    label: String,
    matrix: Matrix,
    rank: usize,
    ray: Option<Vec<Scalar>>,
}

impl Projector {
    /// Rank-1 projector `|v><v| / <v|v>` onto the ray through `v`.
    pub fn from_ray(label: impl Into<String>, ray: Vec<Scalar>) -> Result<Projector, QuantumError> {
        let label = label.into();
        check_kinds(ray.iter())?;
        if ray.iter().all(|x| x.is_zero(Tolerance(0.0))) {
            return Err(QuantumError::ZeroVector(label));
        }
        let matrix = Matrix::outer_normalized(&ray)?;
        Ok(Projector {
            label,
            matrix,
            rank: 1,
            ray: Some(ray),
        })
    }

    /// Validates a full matrix as a nonzero orthogonal projector.
    pub fn from_matrix(label: impl Into<String>, matrix: Matrix, tol: Tolerance) -> Result<Projector, QuantumError> {
        let label = label.into();
        if !matrix.eq_tol(&matrix.adjoint(), tol) {
            return Err(QuantumError::NotHermitian(label));
        }
        if !matrix.mul(&matrix).eq_tol(&matrix, tol) {
            return Err(QuantumError::NotIdempotent(label));
        }
        let rank = matrix.trace().re().to_f64().round();
        if rank < 0.5 {
            return Err(QuantumError::ZeroProjector(label));
        }
        Ok(Projector {
            label,
            matrix,
            rank: rank as usize,
            ray: None,
        })
    }

    /// `I - P` under a new label.
    pub fn complement(&self, label: impl Into<String>, tol: Tolerance) -> Result<Projector, QuantumError> {
        let id = Matrix::identity(self.dim(), self.matrix.kind());
        Projector::from_matrix(label, id.sub(&self.matrix), tol)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn ray(&self) -> Option<&[Scalar]> {
        self.ray.as_deref()
    }

    pub fn kind(&self) -> Kind {
        self.matrix.kind()
    }
}

/// A state together with a labeled projector set, all in one dimension.
/// Projectors are kept sorted by label.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    psi: Ket,
    projectors: Vec<Projector>,
}

impl Experiment {
    pub fn new(psi: Ket, mut projectors: Vec<Projector>) -> Result<Experiment, QuantumError> {
        let dim = psi.dim();
        let kind = psi.kind();
        for p in &projectors {
            if p.dim() != dim {
                return Err(QuantumError::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if p.kind() != kind {
                return Err(ArithError::MixedKinds.into());
            }
        }
        projectors.sort_by(|a, b| a.label.cmp(&b.label));
        if let Some(w) = projectors.windows(2).find(|w| w[0].label == w[1].label) {
            return Err(QuantumError::DuplicateLabel(w[0].label.clone()));
        }
        Ok(Experiment { psi, projectors })
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    pub fn kind(&self) -> Kind {
        self.psi.kind()
    }

    pub fn psi(&self) -> &Ket {
        &self.psi
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn labels(&self) -> Vec<String> {
        self.projectors.iter().map(|p| p.label.clone()).collect()
    }

    pub fn projector(&self, label: &str) -> Option<&Projector> {
        self.projectors
            .binary_search_by(|p| p.label.as_str().cmp(label))
            .ok()
            .map(|i| &self.projectors[i])
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.projectors.binary_search_by(|p| p.label.as_str().cmp(label)).ok()
    }
}

fn real_part(s: Scalar, tol: Tolerance) -> Result<Real, QuantumError> {
    match s.as_real(tol) {
        Some(r) => Ok(r.clone()),
        None => Err(QuantumError::NotReal(s.to_string())),
    }
}

/// Born probability `<psi|P|psi>`.
pub fn born(psi: &Ket, p: &Projector, tol: Tolerance) -> Result<Real, QuantumError> {
    real_part(psi.expectation(p.matrix())?, tol)
}

/// `<psi|PQ|psi>` for a commuting pair.
pub fn joint_born(psi: &Ket, p: &Projector, q: &Projector, tol: Tolerance) -> Result<Real, QuantumError> {
    if p.dim() != q.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    if relation(p, q, tol)? == Relation::Noncommuting {
        return Err(QuantumError::NonCommuting(p.label.clone(), q.label.clone()));
    }
    real_part(psi.expectation(&p.matrix().mul(q.matrix()))?, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Orthogonal,
    Commuting,
    Noncommuting,
}

/// Orthogonal iff `PQ = 0`; commuting iff `PQ = QP`. Orthogonal wins the tag.
pub fn relation(p: &Projector, q: &Projector, tol: Tolerance) -> Result<Relation, QuantumError> {
    if p.dim() != q.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let pq = p.matrix().mul(q.matrix());
    if pq.is_zero(tol) {
        return Ok(Relation::Orthogonal);
    }
    let qp = q.matrix().mul(p.matrix());
    Ok(if pq.eq_tol(&qp, tol) {
        Relation::Commuting
    } else {
        Relation::Noncommuting
    })
}

/// Contexts of a projector set: label-sorted vertices, each context a sorted
/// list of vertex indices, plus every orthogonal pair `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthoStructure {
    vertices: Vec<String>,
    contexts: Vec<Vec<usize>>,
    ortho_pairs: Vec<(usize, usize)>,
}

impl OrthoStructure {
    /// Builds a structure from raw parts. Contexts are sorted and
    /// deduplicated, and every pair inside a context is added to the
    /// orthogonal pairs. Panics on out-of-range indices.
    pub fn new(vertices: Vec<String>, contexts: Vec<Vec<usize>>, ortho_pairs: Vec<(usize, usize)>) -> OrthoStructure {
        let n = vertices.len();
        let mut ctx: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for mut c in contexts {
            c.sort_unstable();
            c.dedup();
            assert!(c.iter().all(|&i| i < n), "context index out of range");
            for (k, &i) in c.iter().enumerate() {
                for &j in &c[k + 1..] {
                    pairs.insert((i, j));
                }
            }
            ctx.insert(c);
        }
        for (i, j) in ortho_pairs {
            assert!(i < n && j < n && i != j, "orthogonal pair out of range");
            pairs.insert((i.min(j), i.max(j)));
        }
        OrthoStructure {
            vertices,
            contexts: ctx.into_iter().collect(),
            ortho_pairs: pairs.into_iter().collect(),
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    pub fn ortho_pairs(&self) -> &[(usize, usize)] {
        &self.ortho_pairs
    }

    pub fn context_labels(&self, k: usize) -> Vec<&str> {
        self.contexts[k].iter().map(|&i| self.vertices[i].as_str()).collect()
    }

    /// Same vertices and pairs plus one more context.
    pub fn with_context(&self, context: Vec<usize>) -> OrthoStructure {
        let mut contexts = self.contexts.clone();
        contexts.push(context);
        OrthoStructure::new(self.vertices.clone(), contexts, self.ortho_pairs.clone())
    }
}

/// Enumerates every subset of mutually orthogonal projectors whose ranks add
/// up to the dimension (so the subset sums to the identity), by clique search
/// over the orthogonality graph.
pub fn find_contexts(exp: &Experiment, tol: Tolerance, cap: u64) -> Result<OrthoStructure, QuantumError> {
    let ps = exp.projectors();
    let n = ps.len();
    let mut orth = vec![vec![false; n]; n];
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if relation(&ps[i], &ps[j], tol)? == Relation::Orthogonal {
                orth[i][j] = true;
                orth[j][i] = true;
                pairs.push((i, j));
            }
        }
    }

    struct Search<'a> {
        ps: &'a [Projector],
        orth: &'a [Vec<bool>],
        dim: usize,
        tol: Tolerance,
        cap: u64,
        visited: u64,
        found: Vec<Vec<usize>>,
    }

    impl Search<'_> {
        fn extend(&mut self, clique: &mut Vec<usize>, rank: usize, start: usize) -> Result<(), QuantumError> {
            for v in start..self.ps.len() {
                if !clique.iter().all(|&u| self.orth[u][v]) {
                    continue;
                }
                let r = rank + self.ps[v].rank();
                if r > self.dim {
                    continue;
                }
                self.visited += 1;
                if self.visited > self.cap {
                    return Err(QuantumError::ContextCap(self.cap));
                }
                clique.push(v);
                if r == self.dim {
                    if self.sums_to_identity(clique) {
                        self.found.push(clique.clone());
                    }
                } else {
                    self.extend(clique, r, v + 1)?;
                }
                clique.pop();
            }
            Ok(())
        }

        fn sums_to_identity(&self, clique: &[usize]) -> bool {
            let kind = self.ps[clique[0]].kind();
            let sum = clique
                .iter()
                .fold(Matrix::zeros(self.dim, kind), |acc, &i| acc.add(self.ps[i].matrix()));
            sum.eq_tol(&Matrix::identity(self.dim, kind), self.tol)
        }
    }

    let mut search = Search {
        ps,
        orth: &orth,
        dim: exp.dim(),
        tol,
        cap,
        visited: 0,
        found: Vec::new(),
    };
    search.extend(&mut Vec::new(), 0, 0)?;
    Ok(OrthoStructure::new(exp.labels(), search.found, pairs))
}
