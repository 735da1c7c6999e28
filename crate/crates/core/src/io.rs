//! JSON and CSV formats for lattices, records, tables and reports.
//!
//! Rationals are written as `"p/q"` strings, field elements as arrays of rationals in the
//! power basis. Parse errors name the offending JSON path.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};

use crate::constructions::{Certificate, Clause, HypothesisReport};
use crate::enumerate::RecordSearch;
use crate::error::{Error, Result};
use crate::exact::{FieldElement, NumberField};
use crate::exponents::spectrum_value;
use crate::lattice::{gamma, DetNormalization, FormsMatrix, Gamma, Lattice, LatticePoint};

fn perr(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

pub fn rational_to_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

fn rational_from_value(v: &Value, path: &str) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| perr(path, format!("not a rational: {s:?}"))),
        Value::Number(n) => n
            .as_i64()
            .map(|i| BigRational::from_integer(i.into()))
            .ok_or_else(|| perr(path, "numbers must be integers; write other rationals as \"p/q\"")),
        _ => Err(perr(path, "expected a rational string")),
    }
}

fn integer_from_value(v: &Value, path: &str) -> Result<BigInt> {
    let q = rational_from_value(v, path)?;
    if !q.is_integer() {
        return Err(perr(path, "expected an integer"));
    }
    Ok(q.to_integer())
}

fn integer_to_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(i) => json!(i),
        None => json!(n.to_string()),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(path, "expected an array"))
}

fn field_of<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(path, format!("missing field \"{key}\"")))
}

pub fn field_to_json(k: &NumberField) -> Value {
    let (lo, hi) = k.root_interval();
    json!({
        "minpoly": k.minpoly().iter().map(integer_to_value).collect::<Vec<_>>(),
        "root_interval": [rational_to_string(lo), rational_to_string(hi)],
    })
}

pub fn field_from_json(v: &Value, path: &str) -> Result<NumberField> {
    let obj = v.as_object().ok_or_else(|| perr(path, "expected an object"))?;
    let mp = array(field_of(obj, "minpoly", path)?, &format!("{path}.minpoly"))?;
    let minpoly = mp
        .iter()
        .enumerate()
        .map(|(i, c)| integer_from_value(c, &format!("{path}.minpoly[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let ri_path = format!("{path}.root_interval");
    let ri = array(field_of(obj, "root_interval", path)?, &ri_path)?;
    if ri.len() != 2 {
        return Err(perr(&ri_path, "expected [lo, hi]"));
    }
    let lo = rational_from_value(&ri[0], &format!("{ri_path}[0]"))?;
    let hi = rational_from_value(&ri[1], &format!("{ri_path}[1]"))?;
    NumberField::new(&minpoly, lo, hi).map_err(|e| perr(path, e))
}

pub fn element_to_json(e: &FieldElement) -> Value {
    Value::Array(e.coords().iter().map(|c| json!(rational_to_string(c))).collect())
}

pub fn element_from_json(v: &Value, k: &NumberField, path: &str) -> Result<FieldElement> {
    let a = array(v, path)?;
    if a.len() != k.degree() {
        return Err(perr(path, format!("expected {} coordinates, got {}", k.degree(), a.len())));
    }
    let coords = a
        .iter()
        .enumerate()
        .map(|(i, c)| rational_from_value(c, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(k.element(coords))
}

pub fn forms_to_json(f: &FormsMatrix) -> Value {
    Value::Array(f.rows().iter().map(|r| Value::Array(r.iter().map(element_to_json).collect())).collect())
}

pub fn lattice_to_json(l: &Lattice) -> Value {
    let mut v = json!({
        "dim": l.dim(),
        "field": field_to_json(l.field()),
        "rows": forms_to_json(l.forms()),
        "scale": rational_to_string(l.scale()),
    });
    if let Some(n) = l.normalization() {
        v["normalization"] = json!({ "base": element_to_json(&n.base), "root": n.root });
    }
    v
}

/// Reads a lattice object. `"normalize_det": true` rescales to `|det| = 1`.
pub fn lattice_from_json(v: &Value) -> Result<Lattice> {
    let obj = v.as_object().ok_or_else(|| perr("$", "expected an object"))?;
    let d = field_of(obj, "dim", "$")?.as_u64().ok_or_else(|| perr("$.dim", "expected a positive integer"))? as usize;
    if d == 0 {
        return Err(perr("$.dim", "must be positive"));
    }
    let k = match obj.get("field") {
        Some(f) => field_from_json(f, "$.field")?,
        None => NumberField::rationals(),
    };
    let rows_v = array(field_of(obj, "rows", "$")?, "$.rows")?;
    if rows_v.len() != d {
        return Err(perr("$.rows", format!("expected {d} rows, got {}", rows_v.len())));
    }
    let mut rows = Vec::with_capacity(d);
    for (i, r) in rows_v.iter().enumerate() {
        let p = format!("$.rows[{i}]");
        let r = array(r, &p)?;
        if r.len() != d {
            return Err(perr(&p, format!("expected {d} entries, got {}", r.len())));
        }
        rows.push(r.iter().enumerate().map(|(j, e)| element_from_json(e, &k, &format!("{p}[{j}]"))).collect::<Result<Vec<_>>>()?);
    }
    let forms = FormsMatrix::new(rows).map_err(|e| perr("$.rows", e))?;
    let scale = match obj.get("scale") {
        Some(s) => rational_from_value(s, "$.scale")?,
        None => BigRational::one(),
    };
    let normalization = match obj.get("normalization") {
        Some(Value::Null) | None => None,
        Some(n) => {
            let no = n.as_object().ok_or_else(|| perr("$.normalization", "expected an object"))?;
            let base = element_from_json(field_of(no, "base", "$.normalization")?, &k, "$.normalization.base")?;
            let root = field_of(no, "root", "$.normalization")?
                .as_u64()
                .filter(|&r| r > 0)
                .ok_or_else(|| perr("$.normalization.root", "expected a positive integer"))? as u32;
            Some(DetNormalization { base, root })
        }
    };
    let l = Lattice::with_normalization(forms, scale, normalization).map_err(|e| perr("$", e))?;
    Ok(match obj.get("normalize_det").and_then(Value::as_bool) {
        Some(true) => l.normalize_det(),
        _ => l,
    })
}

/// Parses lattice JSON text; syntax errors report line and column.
pub fn parse_lattice(text: &str) -> Result<Lattice> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        let msg = msg.split(" at line ").next().unwrap_or(&msg).to_string();
        Error::Parse(format!("line {} column {}: {msg}", e.line(), e.column()))
    })?;
    lattice_from_json(&v)
}

pub fn read_lattice(path: &std::path::Path) -> Result<Lattice> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_lattice(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Significant decimal digits carried by `precision` bits, capped at what `f64` holds.
pub fn digits_for_precision(precision: u32) -> usize {
    ((precision as f64 * std::f64::consts::LOG10_2).ceil() as usize).clamp(1, 17)
}

fn real(x: f64, digits: usize) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

fn record_row(out: &mut String, p: &LatticePoint, g: Option<Gamma>, digits: usize) {
    let g = match g {
        Some(Gamma::Infinite) => "inf".to_string(),
        Some(Gamma::Finite(i)) => real(i.mid(), digits),
        None => String::new(),
    };
    let mut cells = vec![real(p.sup_norm.mid(), digits), real(p.pi.mid(), digits), g];
    cells.extend(p.z.iter().map(|z| z.to_string()));
    cells.extend(p.x.iter().map(|x| real(x.mid(), digits)));
    cells.push(p.exact_zero_coords.first().map_or(String::new(), |i| (i + 1).to_string()));
    let _ = writeln!(out, "{}", cells.join(","));
}

/// Record trajectory CSV; a coordinate-plane certificate is appended with `gamma = inf`.
pub fn records_csv(d: usize, search: &RecordSearch, precision: u32) -> String {
    let digits = digits_for_precision(precision);
    let mut head = vec!["sup_norm".to_string(), "pi".into(), "gamma".into()];
    head.extend((1..=d).map(|i| format!("z{i}")));
    head.extend((1..=d).map(|i| format!("x{i}")));
    head.push("zero_coord".into());
    let mut out = head.join(",") + "\n";
    for r in &search.records {
        record_row(&mut out, &r.point, Some(r.gamma), digits);
    }
    if let Some(c) = &search.certificate {
        record_row(&mut out, c, Some(gamma(c).unwrap_or(Gamma::Infinite)), digits);
    }
    out
}

/// All admissible `(d, k, l)` with `3 <= d <= dmax` and their exact values.
pub fn spectrum_table_csv(dmax: usize) -> String {
    let mut out = String::from("d,k,l,value_num,value_den\n");
    for d in 3..=dmax {
        for k in 1..=d - 2 {
            for l in 1..=d - k - 1 {
                let v = spectrum_value(d, k, l).expect("admissible");
                let _ = writeln!(out, "{d},{k},{l},{},{}", v.numer(), v.denom());
            }
        }
    }
    out
}

fn elements_json(es: &[FieldElement]) -> Value {
    Value::Array(es.iter().map(element_to_json).collect())
}

fn certificate_to_json(c: &Certificate) -> Value {
    match c {
        Certificate::Independent { rank, elements } => json!({"kind": "independent", "rank": rank, "elements": elements_json(elements)}),
        Certificate::Relation { relation, elements } => json!({
            "kind": "relation",
            "relation": relation.iter().map(integer_to_value).collect::<Vec<_>>(),
            "elements": elements_json(elements),
        }),
        Certificate::Minor { value } => json!({"kind": "minor", "value": element_to_json(value)}),
        Certificate::Rank { rank, expected } => json!({"kind": "rank", "rank": rank, "expected": expected}),
        Certificate::RationalClosure { dim, basis } => json!({
            "kind": "rational_closure",
            "dim": dim,
            "basis": basis.iter().map(|v| v.iter().map(integer_to_value).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
    }
}

fn certificate_from_json(v: &Value, k: &NumberField, path: &str) -> Result<Certificate> {
    let obj = v.as_object().ok_or_else(|| perr(path, "expected an object"))?;
    let kind = field_of(obj, "kind", path)?.as_str().ok_or_else(|| perr(path, "kind must be a string"))?;
    let usize_at = |key: &str| -> Result<usize> {
        field_of(obj, key, path)?.as_u64().map(|x| x as usize).ok_or_else(|| perr(&format!("{path}.{key}"), "expected an integer"))
    };
    let elements = || -> Result<Vec<FieldElement>> {
        let p = format!("{path}.elements");
        array(field_of(obj, "elements", path)?, &p)?
            .iter()
            .enumerate()
            .map(|(i, e)| element_from_json(e, k, &format!("{p}[{i}]")))
            .collect()
    };
    let ints = |v: &Value, p: &str| -> Result<Vec<BigInt>> {
        array(v, p)?.iter().enumerate().map(|(i, x)| integer_from_value(x, &format!("{p}[{i}]"))).collect()
    };
    Ok(match kind {
        "independent" => Certificate::Independent { rank: usize_at("rank")?, elements: elements()? },
        "relation" => Certificate::Relation {
            relation: ints(field_of(obj, "relation", path)?, &format!("{path}.relation"))?,
            elements: elements()?,
        },
        "minor" => Certificate::Minor { value: element_from_json(field_of(obj, "value", path)?, k, &format!("{path}.value"))? },
        "rank" => Certificate::Rank { rank: usize_at("rank")?, expected: usize_at("expected")? },
        "rational_closure" => {
            let p = format!("{path}.basis");
            let basis = array(field_of(obj, "basis", path)?, &p)?
                .iter()
                .enumerate()
                .map(|(i, b)| ints(b, &format!("{p}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Certificate::RationalClosure { dim: usize_at("dim")?, basis }
        }
        other => return Err(perr(path, format!("unknown certificate kind {other:?}"))),
    })
}

/// Report JSON; the field is included so element certificates can be read back.
pub fn report_to_json(r: &HypothesisReport, k: &NumberField) -> Value {
    json!({
        "hypothesis": r.hypothesis,
        "passed": r.passed,
        "field": field_to_json(k),
        "clauses": r.clauses.iter().map(|c| json!({
            "description": c.description,
            "passed": c.passed,
            "certificate": certificate_to_json(&c.certificate),
        })).collect::<Vec<_>>(),
        "notes": r.notes.iter().map(|(a, b)| (a.clone(), json!(b))).collect::<Map<_, _>>(),
    })
}

pub fn report_from_json(v: &Value) -> Result<HypothesisReport> {
    let obj = v.as_object().ok_or_else(|| perr("$", "expected an object"))?;
    let k = field_from_json(field_of(obj, "field", "$")?, "$.field")?;
    let hypothesis = field_of(obj, "hypothesis", "$")?.as_str().ok_or_else(|| perr("$.hypothesis", "expected a string"))?.to_string();
    let passed = field_of(obj, "passed", "$")?.as_bool().ok_or_else(|| perr("$.passed", "expected a boolean"))?;
    let mut clauses = vec![];
    for (i, c) in array(field_of(obj, "clauses", "$")?, "$.clauses")?.iter().enumerate() {
        let p = format!("$.clauses[{i}]");
        let co = c.as_object().ok_or_else(|| perr(&p, "expected an object"))?;
        clauses.push(Clause {
            description: field_of(co, "description", &p)?.as_str().unwrap_or_default().to_string(),
            passed: field_of(co, "passed", &p)?.as_bool().ok_or_else(|| perr(&p, "passed must be a boolean"))?,
            certificate: certificate_from_json(field_of(co, "certificate", &p)?, &k, &format!("{p}.certificate"))?,
        });
    }
    let notes = match obj.get("notes") {
        Some(Value::Object(m)) => m.iter().map(|(a, b)| (a.clone(), b.as_str().unwrap_or_default().to_string())).collect(),
        _ => vec![],
    };
    Ok(HypothesisReport { hypothesis, passed, clauses, notes })
}

/// Lattice JSON with an attached `hypothesis_report` block.
pub fn construction_to_json(l: &Lattice, r: &HypothesisReport) -> Value {
    let mut v = lattice_to_json(l);
    v["hypothesis_report"] = report_to_json(r, l.field());
    v
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_strings {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(rational_to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| D::Error::custom(format!("not a rational: {s:?}"))))
            .collect()
    }
}
