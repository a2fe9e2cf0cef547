//! JSON documents for channels, generators and reports.
//!
//! Matrices are row-major arrays of rows whose entries are `[re, im]` pairs.
//! Numbers are written in shortest round-trip form and object keys keep
//! their insertion order, so identical inputs give byte-identical output.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::basis::{self, Basis};
use crate::channel::{Channel, RepresentationKind, StructureReport};
use crate::error::ChannelError;
use crate::linalg::{ComplexMatrix, C64};
use crate::markov::{gks_projection, make_generator, Dissipator, GksForm, LindbladGenerator};
use crate::qubit::{ClassificationReport, LorentzNormalForm, NormalForm};
use crate::sampling::{PropertyReport, SuiteSpec};

pub const CHANNEL_FORMAT: &str = "chandiv/1";
pub const GENERATOR_FORMAT: &str = "chandiv-gen/1";
pub const REPORT_FORMAT: &str = "chandiv-report/1";
pub const SUITE_FORMAT: &str = "chandiv-suite/1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Channel(#[from] ChannelError),
}

fn schema<T>(path: &str, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Schema {
        path: path.to_string(),
        message: message.into(),
    })
}

pub fn parse_value(bytes: &[u8]) -> Result<Value, FormatError> {
    serde_json::from_slice(bytes).map_err(|e| FormatError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values always serialize")
}

pub fn matrix_value(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn matrix_from_value(v: &Value, path: &str) -> Result<ComplexMatrix, FormatError> {
    let Some(rows) = v.as_array() else {
        return schema(path, "expected an array of rows");
    };
    let n = rows.len();
    if n == 0 {
        return schema(path, "matrix has no rows");
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let Some(row) = row.as_array() else {
            return schema(&format!("{path}[{i}]"), "expected an array of entries");
        };
        if row.len() != n {
            return schema(&format!("{path}[{i}]"), format!("expected {n} entries, got {}", row.len()));
        }
        for (j, e) in row.iter().enumerate() {
            let at = format!("{path}[{i}][{j}]");
            let pair = match e.as_array() {
                Some(p) if p.len() == 2 => p,
                _ => return schema(&at, "expected [re, im]"),
            };
            let (Some(re), Some(im)) = (pair[0].as_f64(), pair[1].as_f64()) else {
                return schema(&at, "entries must be numbers");
            };
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, FormatError> {
    obj.get(key).ok_or_else(|| FormatError::Schema {
        path: path.to_string(),
        message: format!("missing field `{key}`"),
    })
}

fn str_field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a str, FormatError> {
    field(obj, key, path)?.as_str().ok_or_else(|| FormatError::Schema {
        path: format!("{path}.{key}"),
        message: "expected a string".into(),
    })
}

fn dim_field(obj: &Map<String, Value>, path: &str) -> Result<usize, FormatError> {
    match field(obj, "dimension", path)?.as_u64() {
        Some(d) => Ok(d as usize),
        None => schema(&format!("{path}.dimension"), "expected a non-negative integer"),
    }
}

fn check_format(obj: &Map<String, Value>, expected: &str, path: &str) -> Result<(), FormatError> {
    let f = str_field(obj, "format", path)?;
    if f != expected {
        return schema(&format!("{path}.format"), format!("unsupported format `{f}`, expected `{expected}`"));
    }
    Ok(())
}

fn sized(m: ComplexMatrix, n: usize, path: &str) -> Result<ComplexMatrix, FormatError> {
    if m.nrows() != n {
        return schema(path, format!("expected a {n}x{n} matrix, got {0}x{0}", m.nrows()));
    }
    Ok(m)
}

fn basis_name(b: Basis) -> Result<&'static str, FormatError> {
    match b {
        Basis::MatrixUnits => Ok("matrix_units"),
        Basis::GellMann => Ok("gellmann"),
        Basis::UnitaryBasis => schema("basis", "transfer matrices are exported in matrix_units or gellmann"),
    }
}

pub fn parse_basis(name: &str) -> Option<Basis> {
    match name {
        "matrix_units" => Some(Basis::MatrixUnits),
        "gellmann" => Some(Basis::GellMann),
        _ => None,
    }
}

/// Builds a channel from a parsed `chandiv/1` object.
pub fn channel_from_value(v: &Value, path: &str) -> Result<Channel, FormatError> {
    let Some(obj) = v.as_object() else {
        return schema(path, "expected an object");
    };
    check_format(obj, CHANNEL_FORMAT, path)?;
    let d = dim_field(obj, path)?;
    if d < 2 {
        return Err(ChannelError::DegenerateDimension(d).into());
    }
    let data = field(obj, "data", path)?;
    let dpath = format!("{path}.data");
    let ch = match str_field(obj, "representation", path)? {
        "kraus" => {
            let Some(ops) = data.as_array() else {
                return schema(&dpath, "expected an array of matrices");
            };
            if ops.is_empty() {
                return schema(&dpath, "no Kraus operators");
            }
            let ops = ops
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let p = format!("{dpath}[{k}]");
                    sized(matrix_from_value(m, &p)?, d, &p)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Channel::from_kraus(ops)?
        }
        "choi" => Channel::from_choi(sized(matrix_from_value(data, &dpath)?, d * d, &dpath)?)?,
        "transfer" => {
            let name = str_field(obj, "basis", path)?;
            let Some(b) = parse_basis(name) else {
                return schema(&format!("{path}.basis"), format!("unknown basis `{name}`"));
            };
            Channel::from_transfer_in(sized(matrix_from_value(data, &dpath)?, d * d, &dpath)?, b)?
        }
        other => return schema(&format!("{path}.representation"), format!("unknown representation `{other}`")),
    };
    Ok(ch)
}

pub fn read_channel_json(bytes: &[u8]) -> Result<Channel, FormatError> {
    channel_from_value(&parse_value(bytes)?, "$")
}

/// Reads one channel or an array of channels; the flag tells which.
pub fn read_channels_json(bytes: &[u8]) -> Result<(Vec<Channel>, bool), FormatError> {
    match parse_value(bytes)? {
        Value::Array(items) => {
            let chans = items
                .iter()
                .enumerate()
                .map(|(i, v)| channel_from_value(v, &format!("$[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((chans, true))
        }
        v => Ok((vec![channel_from_value(&v, "$")?], false)),
    }
}

pub fn channel_to_value(ch: &Channel, kind: RepresentationKind) -> Result<Value, FormatError> {
    let mut obj = Map::new();
    obj.insert("format".into(), json!(CHANNEL_FORMAT));
    obj.insert("dimension".into(), json!(ch.dim()));
    match kind {
        RepresentationKind::Kraus => {
            let ops = &ch.kraus()?.operators;
            obj.insert("representation".into(), json!("kraus"));
            obj.insert("data".into(), Value::Array(ops.iter().map(matrix_value).collect()));
        }
        RepresentationKind::Choi => {
            obj.insert("representation".into(), json!("choi"));
            obj.insert("data".into(), matrix_value(ch.tau()));
        }
        RepresentationKind::Transfer(b) => {
            obj.insert("representation".into(), json!("transfer"));
            obj.insert("basis".into(), json!(basis_name(b)?));
            obj.insert("data".into(), matrix_value(&ch.transfer_in(b)));
        }
    }
    Ok(Value::Object(obj))
}

pub fn generator_to_value(l: &LindbladGenerator) -> Result<Value, FormatError> {
    let unitary = basis::traceless_unitary_basis(l.dim);
    let (h, dissipator) = match &l.dissipator {
        Dissipator::LindbladOps(ops) => (
            l.hamiltonian.clone(),
            json!({"kind": "lindblad_ops", "ops": ops.iter().map(matrix_value).collect::<Vec<_>>()}),
        ),
        Dissipator::Gks(form) if form.basis == unitary => (
            l.hamiltonian.clone(),
            json!({"kind": "gks", "basis": "unitary", "g": matrix_value(&form.g)}),
        ),
        Dissipator::Gks(_) => {
            let (h, form) = gks_projection(l)?;
            (h, json!({"kind": "gks", "basis": "unitary", "g": matrix_value(&form.g)}))
        }
    };
    Ok(json!({
        "format": GENERATOR_FORMAT,
        "dimension": l.dim,
        "hamiltonian": matrix_value(&h),
        "dissipator": dissipator,
    }))
}

pub fn generator_from_value(v: &Value, path: &str) -> Result<LindbladGenerator, FormatError> {
    let Some(obj) = v.as_object() else {
        return schema(path, "expected an object");
    };
    check_format(obj, GENERATOR_FORMAT, path)?;
    let d = dim_field(obj, path)?;
    if d < 2 {
        return Err(ChannelError::DegenerateDimension(d).into());
    }
    let hpath = format!("{path}.hamiltonian");
    let h = sized(matrix_from_value(field(obj, "hamiltonian", path)?, &hpath)?, d, &hpath)?;
    let dpath = format!("{path}.dissipator");
    let Some(diss) = field(obj, "dissipator", path)?.as_object() else {
        return schema(&dpath, "expected an object");
    };
    let dissipator = match str_field(diss, "kind", &dpath)? {
        "lindblad_ops" => {
            let Some(ops) = field(diss, "ops", &dpath)?.as_array() else {
                return schema(&format!("{dpath}.ops"), "expected an array of matrices");
            };
            let ops = ops
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let p = format!("{dpath}.ops[{k}]");
                    sized(matrix_from_value(m, &p)?, d, &p)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Dissipator::LindbladOps(ops)
        }
        "gks" => {
            let b = str_field(diss, "basis", &dpath)?;
            if b != "unitary" {
                return schema(&format!("{dpath}.basis"), format!("unknown GKS basis `{b}`"));
            }
            let gpath = format!("{dpath}.g");
            let g = sized(matrix_from_value(field(diss, "g", &dpath)?, &gpath)?, d * d - 1, &gpath)?;
            Dissipator::Gks(GksForm::unitary(d, g)?)
        }
        other => return schema(&format!("{dpath}.kind"), format!("unknown dissipator kind `{other}`")),
    };
    Ok(make_generator(h, dissipator)?)
}

pub fn read_generator_json(bytes: &[u8]) -> Result<LindbladGenerator, FormatError> {
    generator_from_value(&parse_value(bytes)?, "$")
}

pub fn structure_value(r: &StructureReport) -> Value {
    json!({
        "dimension": r.dimension,
        "is_hermiticity_preserving": r.is_hermiticity_preserving,
        "is_trace_preserving": r.is_trace_preserving,
        "is_unital": r.is_unital,
        "is_completely_positive": r.is_completely_positive,
        "kraus_rank": r.kraus_rank,
        "choi_eigenvalues": r.choi_eigenvalues,
        "det": r.det,
        "purity": r.purity,
    })
}

fn form_parameters(form: &NormalForm) -> Value {
    match *form {
        NormalForm::Diagonal { lambda } => json!({"lambda": lambda}),
        NormalForm::NonDiagonal { x } => json!({"x": x}),
        NormalForm::Singular => json!({}),
    }
}

fn normal_form_body(nf: &LorentzNormalForm) -> Value {
    json!({
        "tag": nf.form.tag(),
        "parameters": form_parameters(&nf.form),
        "filters": {"a": matrix_value(&nf.a), "b": matrix_value(&nf.b)},
    })
}

fn normal_form_diagnostics(nf: &LorentzNormalForm) -> Value {
    let d = &nf.diagnostics;
    json!({
        "iterations": d.iterations,
        "filtering_converged": d.filtering_converged,
        "residuals": {"normal_form": d.residual},
        "filter_condition": [d.cond_a, d.cond_b],
    })
}

pub fn normal_form_value(nf: &LorentzNormalForm) -> Value {
    let mut v = normal_form_body(nf);
    v.as_object_mut()
        .expect("object")
        .insert("diagnostics".into(), normal_form_diagnostics(nf));
    v
}

pub fn classification_value(r: &ClassificationReport) -> Value {
    json!({
        "format": REPORT_FORMAT,
        "divisibility": r.divisibility,
        "infinitesimal": r.infinitesimal,
        "positive_divisible": r.positive_divisible,
        "normal_form": normal_form_body(&r.normal_form),
        "evidence": {
            "kraus_rank": r.evidence.kraus_rank,
            "det": r.evidence.det,
            "s_min_sq": r.evidence.s_min_sq,
            "det_delta": r.evidence.det_delta,
        },
        "diagnostics": normal_form_diagnostics(&r.normal_form),
    })
}

pub fn suite_value(r: &PropertyReport, spec: &SuiteSpec) -> Value {
    json!({
        "format": SUITE_FORMAT,
        "suite": r.suite,
        "samples": r.samples,
        "seed": spec.seed,
        "dims": spec.dims,
        "passed": r.passed(),
        "worst_margin": r.worst_margin,
        "violations": r.violations.iter().map(|v| json!({
            "seed": v.seed,
            "dim": v.dim,
            "description": v.description,
            "magnitude": v.magnitude,
        })).collect::<Vec<_>>(),
    })
}
