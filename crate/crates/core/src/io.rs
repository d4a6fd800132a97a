//! JSON input files and report exports.
//!
//! Polytope files look like `{"dim": 2, "normals": [[1,0],[0,1],[-1,-1]], "offsets": [0,0,1]}`
//! (facets `<v, x> + a >= 0`, optional `"name"`). R-matrix files look like
//! `{"dim": 2, "re": [[0, "1/2"], ["-1/2", 0]], "im": [[0, 0], [0, 0]]}`; entries
//! may be JSON numbers or rational strings and are read exactly.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::groupoid::FuzzReport;
use crate::ncring::StructureConstantTable;
use crate::number::{parse_rational, ExactComplex};
use crate::polytope::{DelzantPolytope, DelzantReport, Facet, PolytopeError, Standard};
use crate::quantization::Character;
use crate::rmatrix::{RMatrix, RMatrixError};

/// Largest dimension accepted from an input file.
pub const MAX_INPUT_DIM: usize = 64;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("field {field}: {reason}")]
    Field { field: String, reason: String },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
    #[error("polytope is not Delzant: {}", .0.problems.join("; "))]
    NotDelzant(Box<DelzantReport>),
    #[error("R-matrix has dimension {rmatrix} but the polytope has dimension {polytope}")]
    CrossDimension { rmatrix: usize, polytope: usize },
}

fn field(field: impl Into<String>, reason: impl Into<String>) -> InputError {
    InputError::Field {
        field: field.into(),
        reason: reason.into(),
    }
}

fn root_object(text: &str) -> Result<Map<String, Value>, InputError> {
    let value: Value = serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(field("(root)", "expected a JSON object")),
    }
}

fn reject_unknown(map: &Map<String, Value>, known: &[&str]) -> Result<(), InputError> {
    match map.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(field(k.clone(), "unknown field")),
        None => Ok(()),
    }
}

fn get_dim(map: &Map<String, Value>) -> Result<usize, InputError> {
    let v = map.get("dim").ok_or_else(|| field("dim", "missing"))?;
    let d = v.as_u64().ok_or_else(|| field("dim", "expected a positive integer"))?;
    if d == 0 || d as usize > MAX_INPUT_DIM {
        return Err(field("dim", format!("must be in 1..={MAX_INPUT_DIM}")));
    }
    Ok(d as usize)
}

fn get_array<'a>(map: &'a Map<String, Value>, name: &str) -> Result<&'a Vec<Value>, InputError> {
    map.get(name)
        .ok_or_else(|| field(name, "missing"))?
        .as_array()
        .ok_or_else(|| field(name, "expected an array"))
}

fn int_at(v: &Value, path: &str) -> Result<i64, InputError> {
    v.as_i64().ok_or_else(|| field(path, "expected an integer"))
}

/// Structural parse of a polytope file; no Delzant check.
pub fn parse_polytope_unvalidated(text: &str) -> Result<DelzantPolytope, InputError> {
    let map = root_object(text)?;
    reject_unknown(&map, &["dim", "normals", "offsets", "name"])?;
    let dim = get_dim(&map)?;
    let normals = get_array(&map, "normals")?;
    let offsets = get_array(&map, "offsets")?;
    if normals.is_empty() {
        return Err(field("normals", "must list at least one facet"));
    }
    if offsets.len() != normals.len() {
        return Err(field(
            "offsets",
            format!("has {} entries but normals has {}", offsets.len(), normals.len()),
        ));
    }
    let mut facets = Vec::with_capacity(normals.len());
    for (k, (n, a)) in normals.iter().zip(offsets).enumerate() {
        let row = n
            .as_array()
            .ok_or_else(|| field(format!("normals[{k}]"), "expected an array"))?;
        if row.len() != dim {
            return Err(field(
                format!("normals[{k}]"),
                format!("has length {}, expected dim = {dim}", row.len()),
            ));
        }
        let normal = row
            .iter()
            .enumerate()
            .map(|(i, x)| int_at(x, &format!("normals[{k}][{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        facets.push(Facet::new(normal, int_at(a, &format!("offsets[{k}]"))?));
    }
    let name = match map.get("name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(field("name", "expected a string")),
    };
    Ok(DelzantPolytope::new(dim, facets, name)?)
}

pub fn require_delzant(p: DelzantPolytope) -> Result<DelzantPolytope, InputError> {
    let report = p.validate_delzant();
    if report.pass {
        Ok(p)
    } else {
        Err(InputError::NotDelzant(Box::new(report)))
    }
}

/// Parses and Delzant-validates a polytope file.
pub fn parse_polytope_json(text: &str) -> Result<DelzantPolytope, InputError> {
    require_delzant(parse_polytope_unvalidated(text)?)
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// A polytope file, or a catalog name (`cp2`, `hirzebruch(1)`, ...) when no such file exists.
pub fn parse_polytope_file(path: &Path) -> Result<DelzantPolytope, InputError> {
    if !path.exists() {
        if let Some(std) = path.to_str().and_then(|s| s.parse::<Standard>().ok()) {
            return require_delzant(std.polytope()?);
        }
    }
    parse_polytope_json(&read(path)?)
}

fn rational_entry(v: &Value, path: &str) -> Result<num_rational::BigRational, InputError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(field(path, "expected a number or a rational string")),
    };
    parse_rational(&text).map_err(|e| field(path, e.reason))
}

fn matrix_rows(
    map: &Map<String, Value>,
    name: &str,
    dim: usize,
) -> Result<Vec<Vec<num_rational::BigRational>>, InputError> {
    let rows = get_array(map, name)?;
    if rows.len() != dim {
        return Err(field(name, format!("has {} rows, expected dim = {dim}", rows.len())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let row = row
                .as_array()
                .ok_or_else(|| field(format!("{name}[{i}]"), "expected an array"))?;
            if row.len() != dim {
                return Err(field(
                    format!("{name}[{i}]"),
                    format!("has length {}, expected dim = {dim}", row.len()),
                ));
            }
            row.iter()
                .enumerate()
                .map(|(j, x)| rational_entry(x, &format!("{name}[{i}][{j}]")))
                .collect()
        })
        .collect()
}

/// Parses an R-matrix file exactly and checks antisymmetry.
pub fn parse_rmatrix_json(text: &str) -> Result<RMatrix, InputError> {
    let map = root_object(text)?;
    reject_unknown(&map, &["dim", "re", "im"])?;
    let dim = get_dim(&map)?;
    let re = matrix_rows(&map, "re", dim)?;
    let im = matrix_rows(&map, "im", dim)?;
    let rows: Vec<Vec<ExactComplex>> = re
        .into_iter()
        .zip(im)
        .map(|(r, i)| r.into_iter().zip(i).map(|(a, b)| ExactComplex::new(a, b)).collect())
        .collect();
    let c = RMatrix::from_exact_rows(&rows)?;
    let report = c.validate();
    if let Some((row, col)) = report.offending {
        return Err(RMatrixError::NotAntisymmetric { row, col }.into());
    }
    Ok(c)
}

pub fn parse_rmatrix_file(path: &Path) -> Result<RMatrix, InputError> {
    parse_rmatrix_json(&read(path)?)
}

pub fn check_compatible(p: &DelzantPolytope, c: &RMatrix) -> Result<(), InputError> {
    if p.dim() != c.dim() {
        return Err(InputError::CrossDimension {
            rmatrix: c.dim(),
            polytope: p.dim(),
        });
    }
    Ok(())
}

pub fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

pub fn rmatrix_json(c: &RMatrix) -> Value {
    let d = c.dim();
    let part = |f: &dyn Fn(usize, usize) -> Value| -> Value {
        (0..d).map(|i| (0..d).map(|j| f(i, j)).collect::<Vec<_>>()).collect()
    };
    if c.is_exact() {
        let e = |i, j| c.exact_entry(i, j).expect("exact matrix");
        json!({
            "dim": d,
            "re": part(&|i, j| Value::String(e(i, j).re.to_string())),
            "im": part(&|i, j| Value::String(e(i, j).im.to_string())),
        })
    } else {
        json!({
            "dim": d,
            "re": part(&|i, j| json!(c.entry(i, j).re)),
            "im": part(&|i, j| json!(c.entry(i, j).im)),
        })
    }
}

pub fn structure_constants_json(table: &StructureConstantTable) -> Value {
    table
        .entries
        .iter()
        .map(|e| {
            let mut v = json!({
                "m1": e.left.weight(),
                "n1": e.left.degree(),
                "m2": e.right.weight(),
                "n2": e.right.degree(),
                "target": e.target.weight(),
                "factor": complex_json(e.factor()),
                "exponent": complex_json(e.phase.exponent()),
            });
            if let Some(exact) = &e.phase.exact {
                v["pair_exact"] = Value::String(exact.to_string());
            }
            v
        })
        .collect()
}

pub fn character_json(ch: &Character) -> Value {
    let mut weights = Vec::new();
    for (m, k) in &ch.weights {
        for _ in 0..*k {
            weights.push(json!(m));
        }
    }
    json!({"degree": ch.degree, "weights": weights})
}

pub fn fuzz_report_json(r: &FuzzReport) -> Value {
    serde_json::to_value(r).expect("fuzz report serializes")
}

pub fn points_json(z: &[Complex64]) -> Value {
    z.iter().map(|x| json!([x.re, x.im])).collect()
}
