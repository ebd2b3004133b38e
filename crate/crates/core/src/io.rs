//! JSON documents for tensors, charts and reports.
//!
//! Floats are written with the shortest representation that round-trips, so
//! `serialize(parse(x))` reproduces every number bit for bit and identical
//! inputs give byte-identical output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::chart::{PolyChart, TripleReport};
use crate::decompose::{constant_curvature_coefficient, ricci_traceless_generator, DecompositionResult, Mode};
use crate::error::{Error, Result};
use crate::linalg::{BilinearForm, ScalarProduct};
use crate::poly::Polynomial;
use crate::tensor::Curvature4Tensor;

/// On-disk form of a tensor together with its scalar product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorDocument {
    pub dim: usize,
    pub signature: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<Vec<f64>>>,
    #[serde(rename = "R")]
    pub r: Vec<f64>,
}

impl TensorDocument {
    pub fn new(r: &Curvature4Tensor, g: &ScalarProduct) -> Self {
        let (p, q) = g.signature();
        Self {
            dim: r.dim(),
            signature: [p, q],
            g: Some(g.matrix().rows()),
            r: r.data().to_vec(),
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("tensor documents hold only finite numbers and strings")
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| schema(path, "expected a number"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(format!("{path}.{k}"), "unknown field")),
        None => Ok(()),
    }
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(format!("{path}.{key}"), "missing required field"))
}

/// Parses a tensor document. Without `g` the scalar product is
/// `diag(+1 × p, -1 × q)`; with `g` the declared signature must match it.
pub fn parse_tensor(bytes: &[u8]) -> Result<(Curvature4Tensor, ScalarProduct)> {
    let value: Value = serde_json::from_slice(bytes)?;
    tensor_from_value(&value, "$")
}

pub fn tensor_from_value(value: &Value, path: &str) -> Result<(Curvature4Tensor, ScalarProduct)> {
    let obj = as_object(value, path)?;
    reject_unknown(obj, &["dim", "signature", "g", "R"], path)?;
    let dim = as_usize(required(obj, "dim", path)?, &format!("{path}.dim"))?;
    if dim < 3 {
        return Err(Error::DimensionTooSmall(dim));
    }
    let sig_path = format!("{path}.signature");
    let sig = as_array(required(obj, "signature", path)?, &sig_path)?;
    if sig.len() != 2 {
        return Err(schema(&sig_path, "expected [p, q]"));
    }
    let p = as_usize(&sig[0], &format!("{sig_path}[0]"))?;
    let q = as_usize(&sig[1], &format!("{sig_path}[1]"))?;
    if p + q != dim {
        return Err(schema(&sig_path, format!("p + q = {} but dim = {dim}", p + q)));
    }
    let g = match obj.get("g") {
        None | Some(Value::Null) => ScalarProduct::standard(p, q)?,
        Some(gv) => {
            let gpath = format!("{path}.g");
            let rows = as_array(gv, &gpath)?;
            if rows.len() != dim {
                return Err(schema(&gpath, format!("expected {dim} rows, found {}", rows.len())));
            }
            let mut entries = Vec::with_capacity(dim * dim);
            for (i, row) in rows.iter().enumerate() {
                let rpath = format!("{gpath}[{i}]");
                let row = as_array(row, &rpath)?;
                if row.len() != dim {
                    return Err(schema(&rpath, format!("expected {dim} entries, found {}", row.len())));
                }
                for (j, x) in row.iter().enumerate() {
                    entries.push(as_f64(x, &format!("{rpath}[{j}]"))?);
                }
            }
            let g = ScalarProduct::new(BilinearForm::from_row_major(dim, entries)?)?;
            if g.signature() != (p, q) {
                let (gp, gq) = g.signature();
                return Err(schema(&sig_path, format!("declared [{p}, {q}] but g has signature [{gp}, {gq}]")));
            }
            g
        }
    };
    let rpath = format!("{path}.R");
    let rv = as_array(required(obj, "R", path)?, &rpath)?;
    let expected = dim.pow(4);
    if rv.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: rv.len(),
        });
    }
    let data = rv
        .iter()
        .enumerate()
        .map(|(i, x)| as_f64(x, &format!("{rpath}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok((Curvature4Tensor::from_vec(dim, data)?, g))
}

pub fn serialize_tensor(r: &Curvature4Tensor, g: &ScalarProduct) -> String {
    to_pretty(&TensorDocument::new(r, g).to_value())
}

pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializing a JSON value cannot fail")
}

fn component_names(mode: Mode, k: usize) -> Vec<String> {
    match mode {
        Mode::W => (1..=k).map(|j| format!("W{j}")).collect(),
        Mode::A => (1..=k).map(|j| format!("A{j}")).collect(),
        Mode::SingerThorpe => ["u", "z", "w"].iter().map(|s| s.to_string()).collect(),
    }
}

/// Decomposition output: the components as tensor documents plus residuals.
/// Singer–Thorpe results additionally carry the constant `c` with
/// `u = -c g∧g` and the traceless `Ξ` with `z = -Ξ ∧₁ g`.
pub fn decomposition_document(res: &DecompositionResult, g: &ScalarProduct) -> Value {
    let names = component_names(res.mode, res.components.len());
    let components: Vec<Value> = res
        .components
        .iter()
        .zip(&names)
        .map(|(c, name)| {
            json!({
                "name": name,
                "max_norm": c.max_norm(),
                "tensor": TensorDocument::new(c, g).to_value(),
            })
        })
        .collect();
    let mut doc = json!({
        "mode": res.mode,
        "dim": g.dim(),
        "signature": [g.signature().0, g.signature().1],
        "components": components,
        "completeness_residual": res.completeness_residual,
        "orthogonality_residual": res.orthogonality_residual(),
        "pairing_scale": res.pairing_scale,
        "orthogonality_matrix": res.orthogonality_matrix,
    });
    if res.mode == Mode::SingerThorpe {
        let extra = json!({
            "constant_curvature": constant_curvature_coefficient(&res.components[0], g),
            "xi": ricci_traceless_generator(&res.components[1], g).rows(),
        });
        doc["singer_thorpe"] = extra;
    }
    doc
}

fn exponent_key(e: &[u32]) -> String {
    e.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn polynomial_value(p: &Polynomial) -> Value {
    Value::Object(
        p.terms()
            .iter()
            .map(|(e, c)| (exponent_key(e), json!(c)))
            .collect(),
    )
}

fn parse_polynomial(v: &Value, n: usize, path: &str) -> Result<Polynomial> {
    let obj = as_object(v, path)?;
    let mut terms = Vec::with_capacity(obj.len());
    for (key, c) in obj {
        let tpath = format!("{path}[\"{key}\"]");
        let e = key
            .split_whitespace()
            .map(|s| s.parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| schema(&tpath, "exponent key must be space-separated non-negative integers"))?;
        if e.len() != n {
            return Err(schema(&tpath, format!("exponent key has {} entries, expected {n}", e.len())));
        }
        terms.push((e, as_f64(c, &tpath)?));
    }
    Ok(Polynomial::from_terms(n, terms))
}

/// Parses `"i,j"` / `"i,j,k"` index keys, requiring sorted indices below `n`.
fn parse_index_key(key: &str, arity: usize, n: usize, path: &str) -> Result<Vec<usize>> {
    let idx = key
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| schema(path, "index key must be comma-separated integers"))?;
    if idx.len() != arity {
        return Err(schema(path, format!("index key needs {arity} entries")));
    }
    if idx.iter().any(|&i| i >= n) {
        return Err(schema(path, format!("index out of range for dim {n}")));
    }
    if idx.windows(2).any(|w| w[0] > w[1]) {
        return Err(schema(path, "indices must be sorted (only i <= j <= k entries are stored)"));
    }
    Ok(idx)
}

pub fn parse_chart(bytes: &[u8]) -> Result<PolyChart> {
    let value: Value = serde_json::from_slice(bytes)?;
    let obj = as_object(&value, "$")?;
    reject_unknown(obj, &["dim", "metric", "cubic", "domain_note"], "$")?;
    let n = as_usize(required(obj, "dim", "$")?, "$.dim")?;
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    let mut metric = BTreeMap::new();
    for (key, v) in as_object(required(obj, "metric", "$")?, "$.metric")? {
        let path = format!("$.metric[\"{key}\"]");
        let idx = parse_index_key(key, 2, n, &path)?;
        metric.insert((idx[0], idx[1]), parse_polynomial(v, n, &path)?);
    }
    let mut cubic = BTreeMap::new();
    if let Some(cv) = obj.get("cubic") {
        for (key, v) in as_object(cv, "$.cubic")? {
            let path = format!("$.cubic[\"{key}\"]");
            let idx = parse_index_key(key, 3, n, &path)?;
            cubic.insert((idx[0], idx[1], idx[2]), parse_polynomial(v, n, &path)?);
        }
    }
    let note = match obj.get("domain_note") {
        None => String::new(),
        Some(v) => v
            .as_str()
            .ok_or_else(|| schema("$.domain_note", "expected a string"))?
            .to_string(),
    };
    PolyChart::from_sorted(n, &metric, &cubic, note)
}

/// Chart document with only the nonzero sorted-index entries.
pub fn chart_document(chart: &PolyChart) -> Value {
    let n = chart.dim();
    let mut metric = Map::new();
    for i in 0..n {
        for j in i..n {
            let p = &chart.metric()[i][j];
            if !p.is_zero() {
                metric.insert(format!("{i},{j}"), polynomial_value(p));
            }
        }
    }
    let mut cubic = Map::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let p = chart.cubic(i, j, k);
                if !p.is_zero() {
                    cubic.insert(format!("{i},{j},{k}"), polynomial_value(p));
                }
            }
        }
    }
    json!({
        "dim": n,
        "metric": metric,
        "cubic": cubic,
        "domain_note": chart.domain_note,
    })
}

/// Parses `"x1,...,xn"`.
pub fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .enumerate()
        .map(|(i, t)| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| schema(format!("point[{i}]"), format!("`{}` is not a number", t.trim())))
        })
        .collect()
}

/// `[i][j][k]` nesting of a flat `n³` array.
fn nest3(v: &[f64], n: usize) -> Value {
    json!((0..n)
        .map(|i| (0..n).map(|j| v[(i * n + j) * n..(i * n + j + 1) * n].to_vec()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

pub fn curvature_document(point: &[f64], g: &ScalarProduct, tensors: &[(&str, &Curvature4Tensor)]) -> Value {
    let mut curvatures = Map::new();
    for (name, r) in tensors {
        curvatures.insert(name.to_string(), TensorDocument::new(r, g).to_value());
    }
    json!({
        "point": point,
        "curvatures": curvatures,
    })
}

pub fn triple_document(rep: &TripleReport) -> Result<Value> {
    let g = ScalarProduct::new(rep.metric.clone())?;
    let n = g.dim();
    Ok(json!({
        "point": rep.point,
        "R": TensorDocument::new(&rep.r, &g).to_value(),
        "R_star": TensorDocument::new(&rep.r_star, &g).to_value(),
        "R_g": TensorDocument::new(&rep.r_g, &g).to_value(),
        "C_op": nest3(&rep.c_op, n),
        "tchebychev_form": rep.tchebychev_form,
        "tchebychev_vector": rep.tchebychev_vector,
        "c_tilde": nest3(&rep.c_tilde, n),
        "pick_invariant": rep.pick_invariant,
        "tau": rep.tau,
        "kappa": rep.kappa,
        "identity_residuals": rep.identity_residuals,
    }))
}
