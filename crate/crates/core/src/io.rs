//! JSON file formats for experiments (and bare ray sets), measure spaces and
//! representations. Every file carries a versioned `schema` field.
//!
//! Scalars are written as literal strings (`"1/2"`, `"1/8 - 1/8*sqrt3"`,
//! `"0.25"`) or as `[re, im]` pairs; plain JSON integers are read as exact
//! and plain JSON floats as approximate.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{Kind, Real, Scalar, Tolerance};
use crate::nogo::{NogoError, Representation};
use crate::quantum::{Experiment, Ket, Matrix, Projector, QuantumError};
use crate::spaces::{EventSet, Flavor, MeasureSpace, Sigma, SpaceError};

pub const EXPERIMENT_SCHEMA: &str = "nullcover.experiment.v1";
pub const RAYS_SCHEMA: &str = "nullcover.rays.v1";
pub const SPACE_SCHEMA: &str = "nullcover.space.v1";
pub const REPRESENTATION_SCHEMA: &str = "nullcover.representation.v1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{origin}: line {line}, column {column}: {message}")]
    Json {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: {field}: {message}")]
    Field {
        origin: String,
        field: String,
        message: String,
    },
}

fn field_err(origin: &str, field: impl Into<String>, message: impl ToString) -> IoError {
    IoError::Field {
        origin: origin.to_string(),
        field: field.into(),
        message: message.to_string(),
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Json {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawReal {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawScalar {
    Real(RawReal),
    Complex([RawReal; 2]),
}

impl RawReal {
    fn to_real(&self) -> Result<Real, String> {
        match self {
            RawReal::Int(n) => Ok(Real::from_int(Kind::Exact, *n)),
            RawReal::Float(x) if x.is_finite() => Ok(Real::Approx(*x)),
            RawReal::Float(x) => Err(format!("non-finite number {x}")),
            RawReal::Text(s) => s.parse::<Real>().map_err(|e| e.to_string()),
        }
    }
}

impl RawScalar {
    pub fn to_scalar(&self) -> Result<Scalar, String> {
        match self {
            RawScalar::Real(r) => Ok(Scalar::real(r.to_real()?)),
            RawScalar::Complex([re, im]) => Scalar::new(re.to_real()?, im.to_real()?).map_err(|e| e.to_string()),
        }
    }

    pub fn from_scalar(s: &Scalar) -> RawScalar {
        if s.im().is_zero(Tolerance(0.0)) {
            RawScalar::Real(RawReal::Text(s.re().to_string()))
        } else {
            RawScalar::Complex([RawReal::Text(s.re().to_string()), RawReal::Text(s.im().to_string())])
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProjector {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<RawScalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<RawScalar>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawExperiment {
    pub schema: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<RawScalar>>,
    pub projectors: Vec<RawProjector>,
}

/// How strictly to treat input scalars.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReadOptions {
    /// Reject approximate (floating point) literals.
    pub exact_only: bool,
    pub tolerance: Tolerance,
}

fn scalars(raw: &[RawScalar], origin: &str, field: &str, opts: ReadOptions) -> Result<Vec<Scalar>, IoError> {
    raw.iter()
        .enumerate()
        .map(|(k, r)| {
            let s = r
                .to_scalar()
                .map_err(|m| field_err(origin, format!("{field}[{k}]"), m))?;
            if opts.exact_only && s.kind() == Kind::Approx {
                return Err(field_err(
                    origin,
                    format!("{field}[{k}]"),
                    "approximate literal in exact mode",
                ));
            }
            Ok(s)
        })
        .collect()
}

/// Parses an experiment or a bare ray set. A ray set without `psi` gets
/// the all-ones state of the rays' kind.
pub fn parse_experiment(text: &str, origin: &str, opts: ReadOptions) -> Result<Experiment, IoError> {
    let raw: RawExperiment = parse_json(text, origin)?;
    if raw.schema != EXPERIMENT_SCHEMA && raw.schema != RAYS_SCHEMA {
        return Err(field_err(
            origin,
            "schema",
            format!(
                "expected `{EXPERIMENT_SCHEMA}` or `{RAYS_SCHEMA}`, found `{}`",
                raw.schema
            ),
        ));
    }
    if raw.dim == 0 {
        return Err(field_err(origin, "dim", "dimension must be positive"));
    }
    let qerr = |field: String| move |e: QuantumError| field_err(origin, field, e);
    let mut projectors = Vec::with_capacity(raw.projectors.len());
    for (k, p) in raw.projectors.iter().enumerate() {
        let field = format!("projectors[{k}]");
        let proj = match (&p.ray, &p.matrix) {
            (Some(ray), None) => {
                let v = scalars(ray, origin, &format!("{field}.ray"), opts)?;
                if v.len() != raw.dim {
                    return Err(field_err(
                        origin,
                        format!("{field}.ray"),
                        format!("expected {} components, found {}", raw.dim, v.len()),
                    ));
                }
                Projector::from_ray(p.label.clone(), v).map_err(qerr(field))?
            }
            (None, Some(rows)) => {
                let rows = rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| scalars(r, origin, &format!("{field}.matrix[{i}]"), opts))
                    .collect::<Result<Vec<_>, _>>()?;
                let m = Matrix::from_rows(rows)
                    .ok_or_else(|| field_err(origin, format!("{field}.matrix"), "matrix is not square"))?;
                if m.dim() != raw.dim {
                    return Err(field_err(
                        origin,
                        format!("{field}.matrix"),
                        format!("expected {0}x{0}", raw.dim),
                    ));
                }
                Projector::from_matrix(p.label.clone(), m, opts.tolerance).map_err(qerr(field))?
            }
            _ => return Err(field_err(origin, field, "exactly one of `ray` or `matrix` is required")),
        };
        projectors.push(proj);
    }
    let psi = match &raw.psi {
        Some(psi) => {
            let v = scalars(psi, origin, "psi", opts)?;
            if v.len() != raw.dim {
                return Err(field_err(
                    origin,
                    "psi",
                    format!("expected {} components, found {}", raw.dim, v.len()),
                ));
            }
            Ket::new(v).map_err(qerr("psi".into()))?
        }
        None => {
            let kind = projectors.first().map_or(Kind::Exact, Projector::kind);
            Ket::new(vec![Scalar::one(kind); raw.dim]).map_err(qerr("psi".into()))?
        }
    };
    Experiment::new(psi, projectors).map_err(qerr("projectors".into()))
}

pub fn read_experiment(path: &Path, opts: ReadOptions) -> Result<Experiment, IoError> {
    parse_experiment(&read_text(path)?, &path.display().to_string(), opts)
}

pub fn experiment_to_raw(exp: &Experiment) -> RawExperiment {
    let row = |v: &[Scalar]| v.iter().map(RawScalar::from_scalar).collect::<Vec<_>>();
    RawExperiment {
        schema: EXPERIMENT_SCHEMA.into(),
        dim: exp.dim(),
        psi: Some(row(exp.psi().amplitudes())),
        projectors: exp
            .projectors()
            .iter()
            .map(|p| RawProjector {
                label: p.label().into(),
                ray: p.ray().map(row),
                matrix: match p.ray() {
                    Some(_) => None,
                    None => Some(p.matrix().rows().map(row).collect()),
                },
            })
            .collect(),
    }
}

pub fn experiment_to_json(exp: &Experiment) -> String {
    serde_json::to_string_pretty(&experiment_to_raw(exp)).expect("serializable")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawEventRef {
    Name(String),
    Members(Vec<usize>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawSigma {
    Keyword(String),
    Listed(Vec<RawEventRef>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMeasure {
    pub event: RawEventRef,
    pub value: RawScalar,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpace {
    pub schema: String,
    pub points: usize,
    pub flavor: Flavor,
    pub sigma: RawSigma,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub events: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub measure: Vec<RawMeasure>,
}

/// Resolves an event reference against the `events` table of a space file.
pub fn resolve_event(
    r: &RawEventRef,
    points: usize,
    names: &BTreeMap<String, EventSet>,
    origin: &str,
    field: &str,
) -> Result<EventSet, IoError> {
    match r {
        RawEventRef::Name(n) => names
            .get(n)
            .cloned()
            .ok_or_else(|| field_err(origin, field, format!("unknown event name `{n}`"))),
        RawEventRef::Members(m) => {
            EventSet::from_members(points, m.iter().copied()).map_err(|e| field_err(origin, field, e))
        }
    }
}

pub fn parse_space(text: &str, origin: &str, opts: ReadOptions) -> Result<MeasureSpace, IoError> {
    let raw: RawSpace = parse_json(text, origin)?;
    space_from_raw(&raw, origin, opts)
}

pub fn space_from_raw(raw: &RawSpace, origin: &str, opts: ReadOptions) -> Result<MeasureSpace, IoError> {
    if raw.schema != SPACE_SCHEMA {
        return Err(field_err(
            origin,
            "schema",
            format!("expected `{SPACE_SCHEMA}`, found `{}`", raw.schema),
        ));
    }
    let serr = |field: String| move |e: SpaceError| field_err(origin, field, e);
    let mut names = BTreeMap::new();
    for (name, members) in &raw.events {
        let e = EventSet::from_members(raw.points, members.iter().copied()).map_err(serr(format!("events.{name}")))?;
        names.insert(name.clone(), e);
    }
    let mut space = match &raw.sigma {
        RawSigma::Keyword(k) if k == "powerset" => {
            MeasureSpace::powerset(raw.points, raw.flavor).map_err(serr("points".into()))?
        }
        RawSigma::Keyword(k) => {
            return Err(field_err(
                origin,
                "sigma",
                format!("expected `powerset` or a list, found `{k}`"),
            ))
        }
        RawSigma::Listed(list) => {
            let events = list
                .iter()
                .enumerate()
                .map(|(k, r)| resolve_event(r, raw.points, &names, origin, &format!("sigma[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            MeasureSpace::listed(raw.points, events, raw.flavor).map_err(serr("sigma".into()))?
        }
    };
    for (name, e) in &names {
        if space.names().contains_key(e) {
            return Err(field_err(
                origin,
                format!("events.{name}"),
                "event already has another name",
            ));
        }
        space.set_name(e.clone(), name.clone());
    }
    for (k, m) in raw.measure.iter().enumerate() {
        let field = format!("measure[{k}]");
        let e = resolve_event(&m.event, raw.points, &names, origin, &format!("{field}.event"))?;
        if space.value(&e).is_some() {
            return Err(field_err(
                origin,
                field,
                format!("event {} assigned twice", space.name_of(&e)),
            ));
        }
        let v = scalars(std::slice::from_ref(&m.value), origin, &format!("{field}.value"), opts)?
            .pop()
            .expect("one scalar");
        space.assign(e, v).map_err(serr(field))?;
    }
    Ok(space)
}

pub fn read_space(path: &Path, opts: ReadOptions) -> Result<MeasureSpace, IoError> {
    parse_space(&read_text(path)?, &path.display().to_string(), opts)
}

fn event_ref(space: &MeasureSpace, e: &EventSet) -> RawEventRef {
    match space.names().get(e) {
        Some(n) => RawEventRef::Name(n.clone()),
        None => RawEventRef::Members(e.members().collect()),
    }
}

pub fn space_to_raw(space: &MeasureSpace) -> RawSpace {
    RawSpace {
        schema: SPACE_SCHEMA.into(),
        points: space.sample_size(),
        flavor: space.flavor(),
        sigma: match space.sigma() {
            Sigma::Powerset => RawSigma::Keyword("powerset".into()),
            Sigma::Listed(v) => RawSigma::Listed(v.iter().map(|e| event_ref(space, e)).collect()),
        },
        events: space
            .names()
            .iter()
            .map(|(e, n)| (n.clone(), e.members().collect()))
            .collect(),
        measure: space
            .assigned()
            .map(|(e, v)| RawMeasure {
                event: event_ref(space, e),
                value: RawScalar::from_scalar(v),
            })
            .collect(),
    }
}

pub fn space_to_json(space: &MeasureSpace) -> String {
    serde_json::to_string_pretty(&space_to_raw(space)).expect("serializable")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRepresentation {
    pub schema: String,
    /// Path of the experiment file, relative to this file.
    pub experiment: String,
    /// Path of the space file, relative to this file.
    pub space: String,
    pub event_map: BTreeMap<String, RawEventRef>,
}

/// Reads a representation and the experiment and space files it names.
pub fn read_representation(path: &Path, opts: ReadOptions) -> Result<Representation, IoError> {
    let origin = path.display().to_string();
    let raw: RawRepresentation = parse_json(&read_text(path)?, &origin)?;
    if raw.schema != REPRESENTATION_SCHEMA {
        return Err(field_err(
            &origin,
            "schema",
            format!("expected `{REPRESENTATION_SCHEMA}`, found `{}`", raw.schema),
        ));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let exp = read_experiment(&base.join(&raw.experiment), opts)?;
    let space_path = base.join(&raw.space);
    let space_origin = space_path.display().to_string();
    let space_raw: RawSpace = parse_json(&read_text(&space_path)?, &space_origin)?;
    let space = space_from_raw(&space_raw, &space_origin, opts)?;
    let names: BTreeMap<String, EventSet> = space.names().iter().map(|(e, n)| (n.clone(), e.clone())).collect();
    let mut map = BTreeMap::new();
    for (label, r) in &raw.event_map {
        let e = resolve_event(r, space.sample_size(), &names, &origin, &format!("event_map.{label}"))?;
        map.insert(label.clone(), e);
    }
    Representation::new(exp, space, map).map_err(|e: NogoError| field_err(&origin, "event_map", e))
}

pub fn representation_to_json(rep: &Representation, experiment_path: &str, space_path: &str) -> String {
    let raw = RawRepresentation {
        schema: REPRESENTATION_SCHEMA.into(),
        experiment: experiment_path.into(),
        space: space_path.into(),
        event_map: rep
            .event_map()
            .iter()
            .map(|(l, e)| (l.clone(), event_ref(rep.space(), e)))
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("serializable")
}
