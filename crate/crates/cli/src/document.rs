//! JSON documents for presentations and modules. Scalars are `"p/q"`
//! strings (plain integers are accepted on input), matrices are row-major.

use std::collections::BTreeMap;

use nhk_core::base_bimodules::{BaseRing, Bimodule};
use nhk_core::curved_modules::{UComplex, UModule};
use nhk_core::exact_linalg::{format_scalar, parse_scalar, Matrix, Scalar};
use nhk_core::nonhomogeneous::NonhomogeneousPresentation;
use serde_json::{json, Value};

/// Parse failure with the location of the offending block.
#[derive(Debug)]
pub struct DocError {
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for DocError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for DocError {}

fn err<T>(location: impl Into<String>, message: impl Into<String>) -> Result<T, DocError> {
    Err(DocError { location: location.into(), message: message.into() })
}

pub fn scalar(v: &Value, at: &str) -> Result<Scalar, DocError> {
    let parsed = match v {
        Value::String(s) => parse_scalar(s),
        Value::Number(n) => n.as_i64().and_then(|i| parse_scalar(&i.to_string())),
        _ => None,
    };
    match parsed {
        Some(x) => Ok(x),
        None => err(at, format!("expected a fraction \"p/q\", got {v}")),
    }
}

pub fn vector(v: &Value, at: &str) -> Result<Vec<Scalar>, DocError> {
    let Some(items) = v.as_array() else { return err(at, "expected an array") };
    items.iter().enumerate().map(|(i, x)| scalar(x, &format!("{at}[{i}]"))).collect()
}

pub fn matrix(v: &Value, rows: usize, cols: usize, at: &str) -> Result<Matrix, DocError> {
    let Some(items) = v.as_array() else { return err(at, "expected an array of rows") };
    if items.len() != rows {
        return err(at, format!("expected {rows} rows, got {}", items.len()));
    }
    let mut out = Vec::new();
    for (i, r) in items.iter().enumerate() {
        let row = vector(r, &format!("{at}[{i}]"))?;
        if row.len() != cols {
            return err(format!("{at}[{i}]"), format!("expected {cols} entries, got {}", row.len()));
        }
        out.push(row);
    }
    Ok(Matrix::from_rows(rows, cols, out))
}

fn matrices(v: &Value, count: usize, n: usize, at: &str) -> Result<Vec<Matrix>, DocError> {
    let Some(items) = v.as_array() else { return err(at, "expected an array of matrices") };
    if items.len() != count {
        return err(at, format!("expected {count} matrices, got {}", items.len()));
    }
    items.iter().enumerate().map(|(i, m)| matrix(m, n, n, &format!("{at}[{i}]"))).collect()
}

fn usize_field(v: &Value, key: &str, at: &str) -> Result<usize, DocError> {
    match v.get(key).and_then(Value::as_u64) {
        Some(n) => Ok(n as usize),
        None => err(at, format!("missing nonnegative integer \"{key}\"")),
    }
}

pub fn parse_json(text: &str) -> Result<Value, DocError> {
    serde_json::from_str(text).map_err(|e| DocError { location: "document".into(), message: format!("syntax error: {e}") })
}

pub struct PresentationDocument {
    pub name: Option<String>,
    pub presentation: NonhomogeneousPresentation,
}

pub fn parse_presentation(text: &str) -> Result<PresentationDocument, DocError> {
    let doc = parse_json(text)?;
    let base_v = doc.get("base").ok_or_else(|| DocError { location: "base".into(), message: "missing block".into() })?;
    let dk = usize_field(base_v, "dim", "base")?;
    let labels: Vec<String> = match base_v.get("labels") {
        Some(Value::Array(l)) => l.iter().map(|x| x.as_str().map(String::from).unwrap_or_else(|| x.to_string())).collect(),
        _ => (0..dk).map(|i| format!("b{i}")).collect(),
    };
    let unit = vector(base_v.get("unit").unwrap_or(&Value::Null), "base.unit")?;
    let Some(sc) = base_v.get("structure_constants").and_then(Value::as_array) else {
        return err("base.structure_constants", "expected dim x dim array of vectors");
    };
    let mut mult = Vec::new();
    for (i, row) in sc.iter().enumerate() {
        let Some(row) = row.as_array() else { return err(format!("base.structure_constants[{i}]"), "expected an array") };
        let r: Result<Vec<Vec<Scalar>>, DocError> =
            row.iter().enumerate().map(|(j, v)| vector(v, &format!("base.structure_constants[{i}][{j}]"))).collect();
        mult.push(r?);
    }
    let base = BaseRing::new(mult, unit, labels).map_err(|e| DocError { location: "base".into(), message: e.to_string() })?;
    let gens_v = doc.get("generators").ok_or_else(|| DocError { location: "generators".into(), message: "missing block".into() })?;
    let de = usize_field(gens_v, "dim", "generators")?;
    let left = matrices(gens_v.get("left").unwrap_or(&Value::Null), dk, de, "generators.left")?;
    let right = matrices(gens_v.get("right").unwrap_or(&Value::Null), dk, de, "generators.right")?;
    let gens = Bimodule::new(base, de, left, right).map_err(|e| DocError { location: "generators".into(), message: e.to_string() })?;
    let rels: Vec<Vec<Scalar>> = match doc.get("relations") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(rs)) => rs.iter().enumerate().map(|(i, r)| vector(r, &format!("relations[{i}]"))).collect::<Result<_, _>>()?,
        Some(_) => return err("relations", "expected an array of vectors"),
    };
    let presentation =
        NonhomogeneousPresentation::new(gens, &rels).map_err(|e| DocError { location: "relations".into(), message: e.to_string() })?;
    Ok(PresentationDocument { name: doc.get("name").and_then(Value::as_str).map(String::from), presentation })
}

pub fn scalar_json(x: &Scalar) -> Value {
    Value::String(format_scalar(x))
}

pub fn vector_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar_json).collect())
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_json(m.row(i))).collect())
}

pub fn emit_presentation(name: &str, p: &NonhomogeneousPresentation, metadata: &BTreeMap<String, Value>) -> Value {
    let base = p.base();
    let gens = p.generators();
    let sc: Vec<Value> = base.structure_constants().iter().map(|row| Value::Array(row.iter().map(|v| vector_json(v)).collect())).collect();
    json!({
        "name": name,
        "base": {
            "dim": base.dim(),
            "labels": base.labels(),
            "structure_constants": sc,
            "unit": vector_json(base.unit()),
        },
        "generators": {
            "dim": gens.dim(),
            "left": gens.left_mats().iter().map(matrix_json).collect::<Vec<_>>(),
            "right": gens.right_mats().iter().map(matrix_json).collect::<Vec<_>>(),
        },
        "relations": p.relations().basis().iter().map(|r| vector_json(r)).collect::<Vec<_>>(),
        "metadata": metadata,
    })
}

fn parse_module_value(v: &Value, p: &NonhomogeneousPresentation, at: &str) -> Result<UModule, DocError> {
    let dim = usize_field(v, "dim", at)?;
    let base = matrices(v.get("base").unwrap_or(&Value::Null), p.base().dim(), dim, &format!("{at}.base"))?;
    let gens = matrices(v.get("generators").unwrap_or(&Value::Null), p.generators().dim(), dim, &format!("{at}.generators"))?;
    UModule::new(p, dim, base, gens).map_err(|e| DocError { location: at.into(), message: e.to_string() })
}

/// A single module, or a complex `{"start", "modules", "differentials"}`.
pub fn parse_complex(text: &str, p: &NonhomogeneousPresentation) -> Result<UComplex, DocError> {
    let doc = parse_json(text)?;
    let Some(mods) = doc.get("modules") else {
        return Ok(UComplex::single(parse_module_value(&doc, p, "module")?, 0));
    };
    let start = doc.get("start").and_then(Value::as_i64).unwrap_or(0);
    let Some(mods) = mods.as_array() else { return err("modules", "expected an array") };
    let modules: Vec<UModule> =
        mods.iter().enumerate().map(|(i, m)| parse_module_value(m, p, &format!("modules[{i}]"))).collect::<Result<_, _>>()?;
    let ds = doc.get("differentials").and_then(Value::as_array).cloned().unwrap_or_default();
    if ds.len() + 1 != modules.len() {
        return err("differentials", format!("expected {} maps", modules.len().saturating_sub(1)));
    }
    let d: Vec<Matrix> = ds
        .iter()
        .enumerate()
        .map(|(i, m)| matrix(m, modules[i + 1].dim, modules[i].dim, &format!("differentials[{i}]")))
        .collect::<Result<_, _>>()?;
    UComplex::new(start, modules, d).map_err(|e| DocError { location: "complex".into(), message: e.to_string() })
}

pub fn parse_module(text: &str, p: &NonhomogeneousPresentation) -> Result<UModule, DocError> {
    let c = parse_complex(text, p)?;
    if c.modules.len() != 1 {
        return err("module", "expected a single module");
    }
    Ok(c.modules.into_iter().next().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nhk_core::gallery::{build_weyl, standard_symplectic};

    const WEYL: &str = include_str!("../examples/weyl.json");

    #[test]
    fn shipped_weyl_matches_constructor() {
        let doc = parse_presentation(WEYL).unwrap();
        let built = build_weyl(&standard_symplectic(1)).unwrap();
        let meta = BTreeMap::new();
        assert_eq!(emit_presentation("weyl", &doc.presentation, &meta), emit_presentation("weyl", &built, &meta));
        assert_eq!(doc.presentation.relations().dim(), built.relations().dim());
    }

    #[test]
    fn non_associative_base_rejected() {
        let mut doc: Value = serde_json::from_str(WEYL).unwrap();
        doc["base"] = json!({
            "dim": 3,
            "unit": ["1", "0", "0"],
            "structure_constants": [
                [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
                [["0", "1", "0"], ["0", "0", "1"], ["1", "0", "0"]],
                [["0", "0", "1"], ["0", "1", "0"], ["1", "0", "0"]],
            ],
        });
        doc["generators"] = json!({"dim": 0, "left": [[], [], []], "right": [[], [], []]});
        doc["relations"] = json!([]);
        let e = parse_presentation(&doc.to_string()).err().expect("rejected");
        assert!(e.to_string().contains("structure constants not associative at"), "{e}");
    }

    #[test]
    fn empty_relations_give_tensor_algebra() {
        let mut doc: Value = serde_json::from_str(WEYL).unwrap();
        doc["relations"] = json!([]);
        let p = parse_presentation(&doc.to_string()).unwrap().presentation;
        assert_eq!(p.relations().dim(), 0);
        assert_eq!(p.quadratic().relations().dim(), 0);
    }

    #[test]
    fn located_diagnostics() {
        let mut doc: Value = serde_json::from_str(WEYL).unwrap();
        doc["relations"][0][1] = json!("x");
        let e = parse_presentation(&doc.to_string()).err().unwrap();
        assert_eq!(e.location, "relations[0][1]");
    }
}
