//! JSON fragments shared by the command reports.

use btp_core::criteria::{CriterionVerdict, Witness};
use btp_core::scalar::{format_rational, format_scientific};
use btp_core::{Matrix, Rational};
use serde_json::{json, Value};

pub fn witness_json(w: &Witness) -> Value {
    json!({
        "rows": w.rows.labels(),
        "cols": w.cols.labels(),
        "value": format_rational(&w.value),
    })
}

pub fn verdict_json(v: &CriterionVerdict) -> Value {
    json!({
        "criterion": v.criterion.name(),
        "verdict": v.verdict,
        "witnesses": v.witnesses.iter().map(witness_json).collect::<Vec<_>>(),
    })
}

/// Decimal rendering with `digits` significant digits.
pub fn sci(value: &Rational, digits: usize) -> Value {
    Value::String(format_scientific(value, digits))
}

pub fn sci_matrix(m: &Matrix, digits: usize) -> Value {
    Value::Array(
        m.to_rows().iter().map(|r| Value::Array(r.iter().map(|v| sci(v, digits)).collect())).collect(),
    )
}

/// Pretty JSON with a trailing newline; key order is fixed by `serde_json`'s map.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}
