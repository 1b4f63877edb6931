//! JSON interchange formats. Rationals travel as strings (`"num/den"` or an
//! integer) so nothing is lost in transport.
//!
//! Matrix documents are read in two passes: a loose pass for the header, then
//! a seeded pass that validates each entry in place, so every error carries
//! the line and column where it was found.

use std::fmt;

use btp_core::band::band_profile;
use btp_core::pbf::PBFactorization;
use btp_core::recpoly::InitialConditions;
use btp_core::scalar::{format_rational, parse_rational};
use btp_core::{BandedMatrix, Matrix, Polynomial, Rational};
use num_traits::Zero;
use serde::de::{self, DeserializeSeed, IgnoredAny, MapAccess, SeqAccess, Visitor};
use serde::Deserialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at line {line}, column {column}")]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl From<serde_json::Error> for ParseError {
    fn from(e: serde_json::Error) -> Self {
        // serde_json appends its own position; keep only the message.
        let text = e.to_string();
        let message = match text.rfind(" at line ") {
            Some(cut) => text[..cut].to_string(),
            None => text,
        };
        ParseError { message, line: e.line(), column: e.column() }
    }
}

/// A matrix with its declared band and free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDocument {
    pub matrix: BandedMatrix,
    pub metadata: Option<Map<String, Value>>,
}

#[derive(Deserialize)]
struct Header {
    n: usize,
    p: Option<usize>,
    q: Option<usize>,
    #[allow(dead_code)]
    rows: IgnoredAny,
    #[serde(default)]
    metadata: Option<Map<String, Value>>,
}

struct Entry(Rational);

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: de::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Entry;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"num/den\" or an integer")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Entry, E> {
                parse_rational(s).map(Entry).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Entry, E> {
                Ok(Entry(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Entry, E> {
                Ok(Entry(Rational::from_integer(v.into())))
            }
        }
        d.deserialize_any(V)
    }
}

/// Second pass over the whole document; only `rows` is inspected.
struct DocumentSeed {
    n: usize,
    band: Option<(usize, usize)>,
}

impl<'de> DeserializeSeed<'de> for DocumentSeed {
    type Value = Vec<Vec<Rational>>;

    fn deserialize<D: de::Deserializer<'de>>(self, d: D) -> Result<Self::Value, D::Error> {
        d.deserialize_map(self)
    }
}

impl<'de> Visitor<'de> for DocumentSeed {
    type Value = Vec<Vec<Rational>>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a matrix document")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
        let mut rows = None;
        while let Some(key) = map.next_key::<String>()? {
            if key == "rows" {
                rows = Some(map.next_value_seed(RowsSeed { n: self.n, band: self.band })?);
            } else {
                map.next_value::<IgnoredAny>()?;
            }
        }
        rows.ok_or_else(|| de::Error::missing_field("rows"))
    }
}

struct RowsSeed {
    n: usize,
    band: Option<(usize, usize)>,
}

impl<'de> DeserializeSeed<'de> for RowsSeed {
    type Value = Vec<Vec<Rational>>;

    fn deserialize<D: de::Deserializer<'de>>(self, d: D) -> Result<Self::Value, D::Error> {
        d.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for RowsSeed {
    type Value = Vec<Vec<Rational>>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{} rows", self.n)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
        let mut rows = Vec::with_capacity(self.n);
        while let Some(row) = seq.next_element_seed(RowSeed { n: self.n, row: rows.len(), band: self.band })? {
            rows.push(row);
            if rows.len() > self.n {
                return Err(de::Error::custom(format!("more than n = {} rows", self.n)));
            }
        }
        if rows.len() != self.n {
            return Err(de::Error::custom(format!("expected {} rows, found {}", self.n, rows.len())));
        }
        Ok(rows)
    }
}

struct RowSeed {
    n: usize,
    row: usize,
    band: Option<(usize, usize)>,
}

impl<'de> DeserializeSeed<'de> for RowSeed {
    type Value = Vec<Rational>;

    fn deserialize<D: de::Deserializer<'de>>(self, d: D) -> Result<Self::Value, D::Error> {
        d.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for RowSeed {
    type Value = Vec<Rational>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a row of {} entries", self.n)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
        let mut out = Vec::with_capacity(self.n);
        while let Some(Entry(v)) = seq.next_element::<Entry>()? {
            let (i, j) = (self.row, out.len());
            if j >= self.n {
                return Err(de::Error::custom(format!("row {} has more than {} entries", i + 1, self.n)));
            }
            if let Some((p, q)) = self.band {
                if !v.is_zero() && (j > i + q || i > j + p) {
                    return Err(de::Error::custom(format!(
                        "nonzero entry ({}, {}) = {} outside the declared band ({p},{q})",
                        i + 1,
                        j + 1,
                        format_rational(&v)
                    )));
                }
            }
            out.push(v);
        }
        if out.len() != self.n {
            return Err(de::Error::custom(format!(
                "row {} has {} entries, expected {}",
                self.row + 1,
                out.len(),
                self.n
            )));
        }
        Ok(out)
    }
}

fn contract_error(message: impl Into<String>) -> ParseError {
    ParseError { message: message.into(), line: 1, column: 1 }
}

/// Parse a matrix document. A missing band is inferred from the zero pattern.
pub fn parse_matrix(text: &str) -> Result<MatrixDocument, ParseError> {
    let header: Header = serde_json::from_str(text)?;
    if header.n == 0 {
        return Err(contract_error("n must be positive"));
    }
    let band = match (header.p, header.q) {
        (Some(p), Some(q)) => {
            if p >= header.n || q >= header.n {
                return Err(contract_error(format!("band ({p},{q}) needs p, q < n = {}", header.n)));
            }
            Some((p, q))
        }
        (None, None) => None,
        _ => return Err(contract_error("declare both p and q, or neither")),
    };
    let mut de = serde_json::Deserializer::from_str(text);
    let rows = DocumentSeed { n: header.n, band }.deserialize(&mut de)?;
    let dense = Matrix::from_rows(rows).map_err(|e| contract_error(e.to_string()))?;
    let (p, q) = match band {
        Some(b) => b,
        None => band_profile(&dense).map_err(|e| contract_error(e.to_string()))?,
    };
    let matrix = BandedMatrix::from_dense(&dense, p, q).map_err(|e| contract_error(e.to_string()))?;
    Ok(MatrixDocument { matrix, metadata: header.metadata })
}

fn rational_row(values: &[Rational]) -> String {
    let cells: Vec<String> = values.iter().map(|v| format!("\"{}\"", format_rational(v))).collect();
    format!("[{}]", cells.join(", "))
}

/// Canonical text: fixed key order, one row per line, reduced fractions.
pub fn emit_matrix(doc: &MatrixDocument) -> String {
    let t = &doc.matrix;
    let dense = t.to_dense();
    let rows: Vec<String> = dense.to_rows().iter().map(|r| format!("    {}", rational_row(r))).collect();
    let mut out = format!("{{\n  \"n\": {},\n  \"p\": {},\n  \"q\": {},\n  \"rows\": [\n{}\n  ]", t.n(), t.p(), t.q(), rows.join(",\n"));
    if let Some(meta) = &doc.metadata {
        out.push_str(",\n  \"metadata\": ");
        out.push_str(&serde_json::to_string(meta).expect("metadata serializes"));
    }
    out.push_str("\n}\n");
    out
}

#[derive(Deserialize)]
struct FactorizationText {
    n: usize,
    p: usize,
    q: usize,
    lower: Vec<Vec<String>>,
    diag: Vec<String>,
    upper: Vec<Vec<String>>,
}

fn parse_list(values: &[String], what: &str) -> Result<Vec<Rational>, ParseError> {
    values
        .iter()
        .enumerate()
        .map(|(k, s)| parse_rational(s).map_err(|e| contract_error(format!("{what}[{k}]: {e}"))))
        .collect()
}

/// `{"n","p","q","lower","diag","upper"}`; `lower[i]` is the subdiagonal of
/// `L̂_{i+1}` and `upper[i]` the superdiagonal of `Û_{i+1}`.
pub fn parse_factorization(text: &str) -> Result<PBFactorization, ParseError> {
    let raw: FactorizationText = serde_json::from_str(text)?;
    let lower = raw
        .lower
        .iter()
        .enumerate()
        .map(|(i, s)| parse_list(s, &format!("lower[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let upper = raw
        .upper
        .iter()
        .enumerate()
        .map(|(i, s)| parse_list(s, &format!("upper[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let diag = parse_list(&raw.diag, "diag")?;
    let f = PBFactorization::new(lower, diag, upper).map_err(|e| contract_error(e.to_string()))?;
    if (f.n(), f.p(), f.q()) != (raw.n, raw.p, raw.q) {
        return Err(contract_error(format!(
            "header ({}, {}, {}) does not match the factors ({}, {}, {})",
            raw.n,
            raw.p,
            raw.q,
            f.n(),
            f.p(),
            f.q()
        )));
    }
    Ok(f)
}

pub fn rationals_json(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(|v| Value::String(format_rational(v))).collect())
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| rationals_json(r)).collect())
}

pub fn polynomial_json(p: &Polynomial) -> Value {
    rationals_json(p.coeffs())
}

pub fn factorization_json(f: &PBFactorization) -> Value {
    json!({
        "n": f.n(),
        "p": f.p(),
        "q": f.q(),
        "lower": f.lower().iter().map(|s| rationals_json(s)).collect::<Vec<_>>(),
        "diag": rationals_json(f.diag()),
        "upper": f.upper().iter().map(|s| rationals_json(s)).collect::<Vec<_>>(),
    })
}

#[derive(Deserialize)]
struct InitialText {
    a0: Vec<Vec<String>>,
    b0: Vec<Vec<String>>,
}

fn parse_grid(rows: &[Vec<String>], what: &str) -> Result<Matrix, ParseError> {
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| parse_list(r, &format!("{what}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, 0));
    }
    Matrix::from_rows(rows).map_err(|e| contract_error(format!("{what}: {e}")))
}

/// `{"a0": [[...]], "b0": [[...]]}`, unitriangular blocks.
pub fn parse_initial(text: &str) -> Result<InitialConditions, ParseError> {
    let raw: InitialText = serde_json::from_str(text)?;
    let a0 = parse_grid(&raw.a0, "a0")?;
    let b0 = parse_grid(&raw.b0, "b0")?;
    InitialConditions::new(a0, b0).map_err(|e| contract_error(e.to_string()))
}

pub fn initial_json(init: &InitialConditions) -> Value {
    json!({ "a0": matrix_json(init.a0()), "b0": matrix_json(init.b0()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use btp_core::scalar::int;

    const TRI: &str = r#"{"n":3,"p":1,"q":1,"rows":[["1","1","0"],["1","2","1"],["0","1","2"]]}"#;

    #[test]
    fn parses_examples() {
        let id = parse_matrix(r#"{"n":2,"p":0,"q":0,"rows":[["1","0"],["0","1"]]}"#).unwrap();
        assert_eq!(id.matrix.to_dense(), Matrix::identity(2));
        let tri = parse_matrix(TRI).unwrap();
        assert_eq!(tri.matrix.to_dense(), Matrix::from_i64(&[[1, 1, 0], [1, 2, 1], [0, 1, 2]]));
        assert_eq!((tri.matrix.p(), tri.matrix.q()), (1, 1));
    }

    #[test]
    fn zero_denominator_is_located() {
        let text = "{\"n\":2,\"p\":0,\"q\":0,\n\"rows\":[[\"1\",\"0\"],\n[\"0\",\"1/0\"]]}";
        let err = parse_matrix(text).unwrap_err();
        assert!(err.message.contains("zero denominator"), "{err}");
        assert_eq!(err.line, 3);
        assert!(err.column >= 10);
    }

    #[test]
    fn structural_errors() {
        let ragged = r#"{"n":2,"p":1,"q":1,"rows":[["1","0"],["0"]]}"#;
        assert!(parse_matrix(ragged).unwrap_err().message.contains("row 2 has 1 entries"));
        let short = r#"{"n":3,"p":1,"q":1,"rows":[["1","0","0"]]}"#;
        assert!(parse_matrix(short).unwrap_err().message.contains("expected 3 rows"));
        let outside = r#"{"n":3,"p":1,"q":0,"rows":[["1","0","0"],["1","1","0"],["0","1","2"]]}"#;
        assert!(parse_matrix(outside).is_ok());
        let outside = r#"{"n":3,"p":0,"q":1,"rows":[["1","1","0"],["1","1","0"],["0","0","2"]]}"#;
        let err = parse_matrix(outside).unwrap_err();
        assert!(err.message.contains("(2, 1)"), "{err}");
        let broken = r#"{"n":2,"rows":[["1","x"],["0","1"]]}"#;
        assert!(parse_matrix(broken).unwrap_err().message.contains("invalid rational"));
        assert!(parse_matrix(r#"{"n":2,"p":2,"q":0,"rows":[]}"#).is_err());
        assert!(parse_matrix(r#"{"n":2,"p":1,"rows":[]}"#).is_err());
        assert!(parse_matrix("{\"n\":2,").is_err());
    }

    #[test]
    fn band_is_inferred_or_widened() {
        let inferred = parse_matrix(r#"{"n":3,"rows":[["1","0","0"],["2","1","0"],["0","3","1"]]}"#).unwrap();
        assert_eq!((inferred.matrix.p(), inferred.matrix.q()), (1, 0));
        let wide = parse_matrix(r#"{"n":3,"p":2,"q":2,"rows":[["1",0,0],[2,1,0],[0,3,1]]}"#).unwrap();
        assert_eq!((wide.matrix.p(), wide.matrix.q()), (2, 2));
        assert_eq!(wide.matrix.to_dense(), inferred.matrix.to_dense());
    }

    #[test]
    fn emit_then_parse_is_identity() {
        let text = r#"{"metadata":{"seed":3},"q":1,"rows":[["2/4","1","0"],["1","-6/3","1"],["0","1","2"]],"p":1,"n":3}"#;
        let doc = parse_matrix(text).unwrap();
        assert_eq!(doc.matrix.get(0, 0), &btp_core::scalar::frac(1, 2));
        let canonical = emit_matrix(&doc);
        let again = parse_matrix(&canonical).unwrap();
        assert_eq!(again, doc);
        assert_eq!(emit_matrix(&again), canonical);
        assert!(canonical.contains("[\"1/2\", \"1\", \"0\"]"));
    }

    #[test]
    fn factorization_round_trip() {
        let f = PBFactorization::new(vec![vec![int(1), int(2)]], vec![int(1); 3], vec![]).unwrap();
        let text = serde_json::to_string(&factorization_json(&f)).unwrap();
        assert_eq!(parse_factorization(&text).unwrap(), f);
        let bad = r#"{"n":3,"p":1,"q":0,"lower":[["1","-2"]],"diag":["1","1","1"],"upper":[]}"#;
        assert!(parse_factorization(bad).is_err());
    }

    #[test]
    fn initial_conditions_parse() {
        let init = parse_initial(r#"{"a0":[["1","-1/2"],["0","1"]],"b0":[["1"]]}"#).unwrap();
        assert_eq!(init.a0().get(0, 1), &btp_core::scalar::frac(-1, 2));
        let text = serde_json::to_string(&initial_json(&init)).unwrap();
        assert_eq!(parse_initial(&text).unwrap(), init);
        assert!(parse_initial(r#"{"a0":[["2"]],"b0":[]}"#).is_err());
        let empty = parse_initial(r#"{"a0":[],"b0":[]}"#).unwrap();
        assert_eq!(empty.a0().n_rows(), 0);
    }
}
