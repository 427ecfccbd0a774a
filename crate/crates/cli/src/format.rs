//! The JSON matrix file.
//!
//! ```json
//! { "schema_version": "1", "kind": "partial_hadamard", "d": 2,
//!   "rows": [[[1.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [-1.0, 0.0]]],
//!   "metadata": { "family": "fourier" } }
//! ```
//!
//! `unitary_set` files carry `members` (a list of `d x d` matrices) instead
//! of `rows`. Complex entries are `[re, im]` pairs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use umebh_core::{ComplexMatrix, ComplexVector, C64};

use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileKind {
    PartialHadamard,
    UnitarySet,
    VectorList,
}

impl FileKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FileKind::PartialHadamard => "partial_hadamard",
            FileKind::UnitarySet => "unitary_set",
            FileKind::VectorList => "vector_list",
        }
    }
}

pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub schema_version: String,
    pub kind: FileKind,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<Pair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Vec<Vec<Pair>>>>,
    #[serde(default)]
    pub metadata: BTreeMap<String, Value>,
}

fn pair(z: &C64) -> Pair {
    [z.re, z.im]
}

fn rows_of(m: &ComplexMatrix) -> Vec<Vec<Pair>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(pair).collect()).collect()
}

fn malformed(location: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Malformed { location: location.into(), message: message.into() }
}

impl MatrixFile {
    pub fn from_rows(kind: FileKind, m: &ComplexMatrix, metadata: BTreeMap<String, Value>) -> Self {
        MatrixFile {
            schema_version: SCHEMA_VERSION.into(),
            kind,
            d: m.cols(),
            rows: Some(rows_of(m)),
            members: None,
            metadata,
        }
    }

    pub fn from_members(d: usize, members: &[ComplexMatrix], metadata: BTreeMap<String, Value>) -> Self {
        MatrixFile {
            schema_version: SCHEMA_VERSION.into(),
            kind: FileKind::UnitarySet,
            d,
            rows: None,
            members: Some(members.iter().map(rows_of).collect()),
            metadata,
        }
    }

    /// Parses and validates; the error names the first malformed location.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| malformed(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
        validate(&value)?;
        serde_json::from_value(value).map_err(|e| malformed("$", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("matrix files always serialize");
        s.push('\n');
        s
    }

    /// The `rows` payload as a matrix.
    pub fn matrix(&self) -> Result<ComplexMatrix, CliError> {
        let rows = self.rows.as_ref().ok_or_else(|| malformed("rows", "missing"))?;
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|p| C64::new(p[0], p[1])).collect()).collect();
        ComplexMatrix::from_rows(&rows).map_err(|e| malformed("rows", e.to_string()))
    }

    pub fn vectors(&self) -> Result<Vec<ComplexVector>, CliError> {
        Ok(self.matrix()?.row_vectors())
    }

    pub fn member_matrices(&self) -> Result<Vec<ComplexMatrix>, CliError> {
        let members = self.members.as_ref().ok_or_else(|| malformed("members", "missing"))?;
        members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let rows: Vec<Vec<C64>> =
                    m.iter().map(|r| r.iter().map(|p| C64::new(p[0], p[1])).collect()).collect();
                ComplexMatrix::from_rows(&rows).map_err(|e| malformed(format!("members[{i}]"), e.to_string()))
            })
            .collect()
    }
}

fn validate(v: &Value) -> Result<(), CliError> {
    let obj = v.as_object().ok_or_else(|| malformed("$", "top level must be an object"))?;
    match obj.get("schema_version") {
        Some(Value::String(s)) if s == SCHEMA_VERSION => {}
        Some(Value::String(s)) => {
            return Err(malformed("schema_version", format!("unsupported version {s:?}, expected {SCHEMA_VERSION:?}")))
        }
        Some(_) => return Err(malformed("schema_version", "must be a string")),
        None => return Err(malformed("schema_version", "missing")),
    }
    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some("partial_hadamard") => FileKind::PartialHadamard,
        Some("unitary_set") => FileKind::UnitarySet,
        Some("vector_list") => FileKind::VectorList,
        Some(other) => {
            return Err(malformed("kind", format!("unknown kind {other:?}; expected partial_hadamard, unitary_set or vector_list")))
        }
        None => return Err(malformed("kind", "missing or not a string")),
    };
    let d = obj
        .get("d")
        .and_then(Value::as_u64)
        .filter(|&d| d >= 1)
        .ok_or_else(|| malformed("d", "must be a positive integer"))? as usize;
    if let Some(m) = obj.get("metadata") {
        if !m.is_object() {
            return Err(malformed("metadata", "must be an object"));
        }
    }

    match kind {
        FileKind::PartialHadamard | FileKind::VectorList => {
            let rows = obj.get("rows").ok_or_else(|| malformed("rows", "missing"))?;
            check_rows(rows, "rows", None, d)?;
        }
        FileKind::UnitarySet => {
            let members = obj.get("members").ok_or_else(|| malformed("members", "missing"))?;
            let list = members.as_array().ok_or_else(|| malformed("members", "must be an array"))?;
            if list.is_empty() {
                return Err(malformed("members", "must not be empty"));
            }
            for (i, m) in list.iter().enumerate() {
                check_rows(m, &format!("members[{i}]"), Some(d), d)?;
            }
        }
    }
    Ok(())
}

fn check_rows(v: &Value, at: &str, expect_rows: Option<usize>, d: usize) -> Result<(), CliError> {
    let rows = v.as_array().ok_or_else(|| malformed(at, "must be an array of rows"))?;
    if rows.is_empty() {
        return Err(malformed(at, "must not be empty"));
    }
    if let Some(n) = expect_rows {
        if rows.len() != n {
            return Err(malformed(at, format!("has {} rows, expected {n}", rows.len())));
        }
    }
    for (r, row) in rows.iter().enumerate() {
        let here = format!("{at}[{r}]");
        let entries = row.as_array().ok_or_else(|| malformed(&here, "must be an array of [re, im] pairs"))?;
        if entries.len() != d {
            return Err(malformed(&here, format!("has {} entries, expected d = {d}", entries.len())));
        }
        for (c, e) in entries.iter().enumerate() {
            let ok = e
                .as_array()
                .filter(|p| p.len() == 2)
                .is_some_and(|p| p.iter().all(|x| x.as_f64().is_some_and(f64::is_finite)));
            if !ok {
                return Err(malformed(format!("{here}[{c}]"), "expected [re, im] pair of finite numbers"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MatrixFile {
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)],
        ])
        .unwrap();
        MatrixFile::from_rows(FileKind::PartialHadamard, &m, BTreeMap::new())
    }

    fn location(text: &str) -> String {
        match MatrixFile::parse(text) {
            Err(CliError::Malformed { location, .. }) => location,
            other => panic!("expected malformed, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let f = sample();
        let text = f.to_json();
        let back = MatrixFile::parse(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn awkward_floats_survive() {
        let m = ComplexMatrix::from_rows(&[vec![C64::new(0.1 + 0.2, -0.0), C64::new(1e-300, 5e-324)]]).unwrap();
        let f = MatrixFile::from_rows(FileKind::VectorList, &m, BTreeMap::new());
        let back = MatrixFile::parse(&f.to_json()).unwrap();
        let z = back.matrix().unwrap();
        assert_eq!(z[(0, 0)].re.to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(z[(0, 0)].im.to_bits(), (-0.0f64).to_bits());
        assert_eq!(z[(0, 1)].im, 5e-324);
    }

    #[test]
    fn first_malformed_entry_is_located() {
        let ok = sample().to_json();
        let bad = ok.replacen("-1.0", "\"x\"", 1);
        assert_eq!(location(&bad), "rows[1][1]");
        assert_eq!(location(r#"{"kind":"partial_hadamard","d":2,"rows":[]}"#), "schema_version");
        assert_eq!(location(r#"{"schema_version":"2","kind":"partial_hadamard","d":2}"#), "schema_version");
        assert_eq!(location(r#"{"schema_version":"1","kind":"matrix","d":2}"#), "kind");
        assert_eq!(location(r#"{"schema_version":"1","kind":"vector_list","d":0,"rows":[]}"#), "d");
        let ragged = r#"{"schema_version":"1","kind":"vector_list","d":2,"rows":[[[1,0],[1,0]],[[1,0]]]}"#;
        assert_eq!(location(ragged), "rows[1]");
        let set = r#"{"schema_version":"1","kind":"unitary_set","d":1,"members":[[[[1,0]]],[[[1,0,3]]]]}"#;
        assert_eq!(location(set), "members[1][0][0]");
        assert!(location("{ not json").starts_with("line 1"));
    }

    #[test]
    fn integers_are_accepted_as_numbers() {
        let text = r#"{"schema_version":"1","kind":"vector_list","d":1,"rows":[[[1,0]]]}"#;
        let f = MatrixFile::parse(text).unwrap();
        assert_eq!(f.matrix().unwrap()[(0, 0)], C64::new(1.0, 0.0));
        assert!(f.metadata.is_empty());
    }
}
