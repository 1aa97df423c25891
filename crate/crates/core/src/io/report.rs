//! JSON reports. Polynomials carry both the canonical text and a term list
//! of exponent vectors with `a + b·√D` coefficients.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use super::render::render_poly;
use crate::exactalg::{PolyMatrix, Polynomial, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub results: Value,
    pub diagnostics: Vec<String>,
    /// Milliseconds per phase; empty when timings are disabled.
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: &str, inputs_digest: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs_digest: inputs_digest.to_string(),
            results: Value::Null,
            diagnostics: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are plain JSON")
    }
}

pub fn scalar_json(c: &Scalar) -> Value {
    json!({
        "a": c.rational_part().to_string(),
        "b": c.radical_part().to_string(),
        "D": c.field(),
    })
}

pub fn scalar_with_text(c: &Scalar) -> Value {
    json!({ "text": c.to_string(), "value": scalar_json(c) })
}

pub fn poly_json(f: &Polynomial) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .map(|(m, c)| json!({ "exponents": m.exponents(), "coeff": scalar_json(c) }))
        .collect();
    json!({ "text": render_poly(f), "terms": terms })
}

pub fn poly_list_json(fs: &[Polynomial]) -> Value {
    Value::Array(fs.iter().map(poly_json).collect())
}

/// Row-major nested arrays of polynomial objects.
pub fn matrix_json(m: &PolyMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array((0..m.cols()).map(|j| poly_json(m.get(i, j))).collect()))
        .collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "variables": m.context().names(), "entries": rows })
}
