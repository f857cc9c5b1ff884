//! JSON formats: diagrams, spanning trees, parameter systems, and exact
//! scalars and matrices.
//!
//! An exact scalar is `{"num": [..], "den": d, "approx": x}`: power-basis
//! numerators over a common positive denominator. The field is fixed by the
//! `conductor` of the enclosing document; `approx` is written for reading
//! and ignored on input.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::construction::{build, cartan_matrix, geometric_parameters, FieldMatrix, ParameterSystem, ReflectionRep};
use crate::cyclotomic::{field_context, FieldContext, FieldElement};
use crate::error::{CoxError, Result};
use crate::graph::{edge, spanning_tree, validate, CoxeterMatrix, Diagram, Edge, SpanningTree};
use crate::scalar::{parse_rational, Rational};

fn invalid(msg: impl Into<String>) -> CoxError {
    CoxError::InvalidInput(msg.into())
}

#[derive(Deserialize)]
struct DiagramFile {
    rank: usize,
    m: Vec<Vec<i64>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// Parses `{"rank": n, "m": [[..]], "labels": [..]}`; labels are optional.
pub fn parse_diagram(text: &str) -> Result<CoxeterMatrix> {
    let file: DiagramFile = serde_json::from_str(text).map_err(|e| invalid(format!("diagram: {e}")))?;
    if file.m.len() != file.rank {
        return Err(invalid(format!("rank {} but {} rows", file.rank, file.m.len())));
    }
    match file.labels {
        Some(labels) => CoxeterMatrix::with_labels(file.m, labels),
        None => Ok(CoxeterMatrix::new(file.m)),
    }
}

pub fn diagram_to_json(d: &CoxeterMatrix) -> Value {
    json!({ "rank": d.rank(), "m": d.entries(), "labels": d.labels() })
}

/// Parses `"s-t"` into a vertex pair, keeping the given order.
pub fn parse_pair(d: &Diagram, key: &str) -> Result<(usize, usize)> {
    let (a, b) = key.split_once('-').ok_or_else(|| invalid(format!("expected \"s-t\", got {key:?}")))?;
    Ok((d.vertex(a.trim())?, d.vertex(b.trim())?))
}

pub fn pair_key(d: &Diagram, (s, t): Edge) -> String {
    format!("{}-{}", d.label(s), d.label(t))
}

#[derive(Deserialize)]
struct TreeFile {
    #[serde(default)]
    root: Option<String>,
    edges: Vec<(String, String)>,
}

/// Parses `{"root": "s1", "edges": [["s1", "s2"], ..]}`; `root` overrides
/// the file's root when given.
pub fn parse_tree(d: &Arc<Diagram>, text: &str, root: Option<usize>) -> Result<SpanningTree> {
    let file: TreeFile = serde_json::from_str(text).map_err(|e| invalid(format!("tree: {e}")))?;
    let root = match (root, file.root) {
        (Some(r), _) => r,
        (None, Some(label)) => d.vertex(&label)?,
        (None, None) => return Err(invalid("tree needs a root")),
    };
    let edges = file
        .edges
        .iter()
        .map(|(a, b)| Ok((d.vertex(a)?, d.vertex(b)?)))
        .collect::<Result<Vec<Edge>>>()?;
    SpanningTree::from_edges(d, root, &edges)
}

pub fn tree_to_json(t: &SpanningTree) -> Value {
    let d = t.diagram();
    let edges: Vec<[&str; 2]> = t.tree_edges().iter().map(|&(s, u)| [d.label(s), d.label(u)]).collect();
    json!({ "root": d.label(t.root()), "edges": edges })
}

fn int_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| invalid(format!("not an integer: {n}"))),
        Value::String(s) => s.trim().parse().map_err(|_| invalid(format!("not an integer: {s:?}"))),
        _ => Err(invalid(format!("not an integer: {v}"))),
    }
}

fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|k| Rational::from_integer(k.into()))
            .ok_or_else(|| invalid(format!("coefficients must be integers or \"p/q\" strings, got {n}"))),
        Value::String(s) => parse_rational(s).ok_or_else(|| invalid(format!("not a rational: {s:?}"))),
        _ => Err(invalid(format!("not a rational: {v}"))),
    }
}

/// Exact scalar record.
pub fn scalar_to_json(x: &FieldElement) -> Value {
    let (num, den) = x.numerators_and_denominator();
    json!({
        "num": num.iter().map(int_to_json).collect::<Vec<_>>(),
        "den": int_to_json(&den),
        "approx": x.to_f64(),
    })
}

/// Reads an exact scalar record, or a plain list of rational coefficients.
pub fn scalar_from_json(ctx: &Arc<FieldContext>, v: &Value) -> Result<FieldElement> {
    let coeffs: Vec<Rational> = match v {
        Value::Object(o) => {
            let num = o.get("num").and_then(Value::as_array).ok_or_else(|| invalid("scalar needs \"num\""))?;
            let den = int_from_json(o.get("den").ok_or_else(|| invalid("scalar needs \"den\""))?)?;
            if den.is_zero() {
                return Err(invalid("zero denominator"));
            }
            num.iter().map(|n| Ok(Rational::new(int_from_json(n)?, den.clone()))).collect::<Result<_>>()?
        }
        Value::Array(a) => a.iter().map(rational_from_json).collect::<Result<_>>()?,
        _ => vec![rational_from_json(v)?],
    };
    if coeffs.len() > ctx.degree().max(1) {
        return Err(invalid(format!("{} coefficients for a field of degree {}", coeffs.len(), ctx.degree())));
    }
    Ok(ctx.element(&coeffs))
}

pub fn matrix_to_json(m: &FieldMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(scalar_to_json).collect())).collect())
}

pub fn matrix_from_json(ctx: &Arc<FieldContext>, v: &Value) -> Result<FieldMatrix> {
    let rows = v.as_array().ok_or_else(|| invalid("matrix must be a list of rows"))?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| invalid("matrix row must be a list"))?
                .iter()
                .map(|x| scalar_from_json(ctx, x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(invalid("ragged matrix"));
    }
    Ok(FieldMatrix::from_rows(rows))
}

/// Parses `{"alpha": {"s-t": k}, "chords": {"s-t": coeffs}}` over `tree`.
///
/// Omitted entries take their geometric values. A chord given as `"t-s"`
/// with `t` after `s` supplies the scalar of the reverse direction.
pub fn parse_params(tree: &SpanningTree, text: &str) -> Result<ParameterSystem> {
    let v: Value = serde_json::from_str(text).map_err(|e| invalid(format!("params: {e}")))?;
    params_from_json(tree, &v)
}

pub fn params_from_json(tree: &SpanningTree, v: &Value) -> Result<ParameterSystem> {
    let d = tree.diagram();
    let ctx = field_context(d.conductor());
    let obj = v.as_object().ok_or_else(|| invalid("params must be an object"))?;
    for key in obj.keys() {
        if key != "alpha" && key != "chords" {
            return Err(invalid(format!("unknown params field {key:?}")));
        }
    }
    let mut params = geometric_parameters(tree)?;
    if let Some(alpha) = obj.get("alpha") {
        let alpha = alpha.as_object().ok_or_else(|| invalid("\"alpha\" must be an object"))?;
        for (key, k) in alpha {
            let (s, t) = parse_pair(d, key)?;
            if !d.has_edge(s, t) {
                return Err(invalid(format!("{key} is not an edge of the diagram")));
            }
            let k = k.as_u64().ok_or_else(|| invalid(format!("alpha index for {key} must be a positive integer")))?;
            params.alpha.insert(edge(s, t), k);
        }
    }
    if let Some(chords) = obj.get("chords") {
        let chords = chords.as_object().ok_or_else(|| invalid("\"chords\" must be an object"))?;
        for (key, value) in chords {
            let (s, t) = parse_pair(d, key)?;
            if !tree.is_chord(s, t) {
                return Err(CoxError::NotAChord(s, t));
            }
            let l = scalar_from_json(&ctx, value)?;
            if l.is_zero() {
                return Err(CoxError::ZeroChordParameter(s, t));
            }
            let l = if s < t { l } else { params.alpha_value(&ctx, d, (s, t))?.checked_div(&l)? };
            params.chords.insert(edge(s, t), l);
        }
    }
    Ok(params)
}

pub fn params_to_json(tree: &SpanningTree, p: &ParameterSystem) -> Value {
    let d = tree.diagram();
    let alpha: Map<String, Value> = p.alpha.iter().map(|(&e, &k)| (pair_key(d, e), json!(k))).collect();
    let chords: Map<String, Value> = p.chords.iter().map(|(&e, l)| (pair_key(d, e), scalar_to_json(l))).collect();
    json!({ "alpha": alpha, "chords": chords })
}

/// Full exact record of a representation.
pub fn rep_to_json(rep: &ReflectionRep) -> Value {
    let data = cartan_matrix(rep);
    json!({
        "conductor": rep.context().conductor(),
        "degree": rep.context().degree(),
        "diagram": diagram_to_json(rep.diagram().matrix()),
        "tree": tree_to_json(rep.tree()),
        "params": params_to_json(rep.tree(), rep.params()),
        "generators": rep.generators().iter().map(matrix_to_json).collect::<Vec<_>>(),
        "cartan": matrix_to_json(&data.entries),
        "discriminant": scalar_to_json(&data.discriminant),
    })
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| invalid(format!("missing field {name:?}")))
}

/// Rebuilds a representation from its record and checks the stored
/// generators against the rebuilt ones.
pub fn rep_from_json(v: &Value) -> Result<ReflectionRep> {
    let diagram = parse_diagram(&field(v, "diagram")?.to_string())?;
    let d = validate(&diagram)?;
    let conductor = field(v, "conductor")?.as_u64().ok_or_else(|| invalid("conductor must be an integer"))?;
    if conductor != d.conductor() {
        return Err(invalid(format!("conductor {conductor} does not match the diagram ({})", d.conductor())));
    }
    let tree = parse_tree(&d, &field(v, "tree")?.to_string(), None)?;
    let params = params_from_json(&tree, field(v, "params")?)?;
    let rep = build(&tree, &params)?;
    let ctx = rep.context();
    let stored = field(v, "generators")?.as_array().ok_or_else(|| invalid("generators must be a list"))?;
    let stored = stored.iter().map(|m| matrix_from_json(ctx, m)).collect::<Result<Vec<_>>>()?;
    if stored.as_slice() != rep.generators() {
        return Err(CoxError::Internal("stored generators differ from the rebuilt representation".into()));
    }
    Ok(rep)
}

/// Builds from file contents: diagram, optional tree, optional params.
pub fn load(diagram: &str, root: &str, tree: Option<&str>, params: Option<&str>) -> Result<ReflectionRep> {
    let d = validate(&parse_diagram(diagram)?)?;
    let r = d.vertex(root)?;
    let tree = match tree {
        Some(text) => parse_tree(&d, text, Some(r))?,
        None => spanning_tree(&d, r)?,
    };
    let params = match params {
        Some(text) => parse_params(&tree, text)?,
        None => geometric_parameters(&tree)?,
    };
    build(&tree, &params)
}

/// Alpha indices keyed by label pair, for reports.
pub fn alpha_table(rep: &ReflectionRep) -> BTreeMap<String, u64> {
    rep.params().alpha.iter().map(|(&e, &k)| (pair_key(rep.diagram(), e), k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const H3: &str = r#"{"rank": 3, "m": [[1,3,2],[3,1,5],[2,5,1]]}"#;
    const TRIANGLE: &str = r#"{"rank": 3, "m": [[1,3,3],[3,1,3],[3,3,1]]}"#;

    #[test]
    fn diagram_defaults_labels() {
        let d = parse_diagram(H3).unwrap();
        assert_eq!(d.labels(), ["s1", "s2", "s3"]);
        assert!(parse_diagram(r#"{"rank": 2, "m": [[1]]}"#).is_err());
        let back = parse_diagram(&diagram_to_json(&d).to_string()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn scalar_round_trip() {
        let ctx = field_context(30);
        let x = ctx.element(&[Rational::new(3.into(), 7.into()), Rational::from_integer((-2).into())]);
        let big = &ctx.generator().pow(3) * &ctx.from_rational(&Rational::new(BigInt::from(10).pow(30), 3.into()));
        for v in [x, big, ctx.zero()] {
            let j = scalar_to_json(&v);
            assert_eq!(scalar_from_json(&ctx, &j).unwrap(), v);
        }
        assert_eq!(scalar_from_json(&ctx, &json!(["1/2", 1])).unwrap(), ctx.element(&[Rational::new(1.into(), 2.into()), Rational::from_integer(1.into())]));
        assert!(scalar_from_json(&ctx, &json!({"num": [1], "den": 0})).is_err());
    }

    #[test]
    fn params_with_labels() {
        let rep = load(TRIANGLE, "s1", None, Some(r#"{"chords": {"s2-s3": [2]}}"#)).unwrap();
        assert_eq!(rep.params().chords[&(1, 2)], FieldElement::integer(2));
        let rev = load(TRIANGLE, "s1", None, Some(r#"{"chords": {"s3-s2": [2]}}"#)).unwrap();
        assert_eq!(rev.params().chords[&(1, 2)], FieldElement::rational(&Rational::new(1.into(), 2.into())));
        assert!(matches!(load(TRIANGLE, "s1", None, Some(r#"{"chords": {"s1-s2": [2]}}"#)), Err(CoxError::NotAChord(0, 1))));
        assert!(matches!(load(TRIANGLE, "s1", None, Some(r#"{"alpha": {"s1-s9": 1}}"#)), Err(CoxError::UnknownVertex(_))));
        assert!(matches!(load(TRIANGLE, "s1", None, Some(r#"{"chords": {"s2-s3": [0]}}"#)), Err(CoxError::ZeroChordParameter(1, 2))));
        assert!(load(TRIANGLE, "s4", None, None).is_err());
    }

    #[test]
    fn explicit_tree() {
        let rep = load(TRIANGLE, "s2", Some(r#"{"edges": [["s1","s2"],["s1","s3"]]}"#), None).unwrap();
        assert_eq!(rep.root(), 1);
        assert_eq!(rep.tree().chords(), &[(1, 2)]);
        assert!(load(TRIANGLE, "s1", Some(r#"{"edges": [["s1","s2"]]}"#), None).is_err());
    }

    #[test]
    fn representation_round_trip() {
        let rep = load(H3, "s3", None, Some(r#"{"alpha": {"s2-s3": 2}}"#)).unwrap();
        let text = rep_to_json(&rep).to_string();
        let back = rep_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.generators(), rep.generators());
        assert_eq!(back.params(), rep.params());

        let tri = load(TRIANGLE, "s1", None, Some(r#"{"chords": {"s2-s3": ["5/3", "1"]}}"#));
        assert!(tri.is_err(), "degree-1 field takes one coefficient");
        let tri = load(TRIANGLE, "s1", None, Some(r#"{"chords": {"s2-s3": ["5/3"]}}"#)).unwrap();
        let mut v = rep_to_json(&tri);
        let back = rep_from_json(&v).unwrap();
        assert_eq!(back.generators(), tri.generators());
        v["generators"][0][0][0] = json!({"num": [5], "den": 1});
        assert!(matches!(rep_from_json(&v), Err(CoxError::Internal(_))));
    }
}
