use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use umebh_core::feasibility::{FeasibilityOutcome, ForcedConstraint, SolverConfig};
use umebh_core::{ComplexVector, Tolerances};

#[derive(Debug, Clone, Serialize)]
pub struct Clause {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Clause {
    pub fn new(name: &str, passed: bool) -> Self {
        Clause { name: name.into(), passed, worst_deviation: None, detail: None }
    }

    pub fn deviation(mut self, x: f64) -> Self {
        self.worst_deviation = Some(x);
        self
    }

    pub fn detail(mut self, s: impl Into<String>) -> Self {
        self.detail = Some(s.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub seed: u64,
    pub tolerances: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<Value>,
    pub clauses: Vec<Clause>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence_tier: Option<String>,
    pub details: BTreeMap<String, Value>,
    pub wall_time_s: f64,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64, tol: &Tolerances) -> Self {
        Report {
            command,
            seed,
            tolerances: json!({
                "eps_orth": tol.eps_orth,
                "eps_unitary": tol.eps_unitary,
                "eps_unimodular": tol.eps_unimodular,
            }),
            solver: None,
            clauses: Vec::new(),
            passed: true,
            evidence_tier: None,
            details: BTreeMap::new(),
            wall_time_s: 0.0,
        }
    }

    pub fn with_solver(&mut self, cfg: &SolverConfig) {
        self.solver = Some(json!({
            "starts": cfg.starts,
            "max_iter": cfg.max_iter,
            "tol_success": cfg.tol_success,
            "tol_evidence": cfg.tol_evidence,
            "seed": cfg.seed,
            "grid_order": cfg.grid_order,
        }));
    }

    pub fn push(&mut self, c: Clause) {
        self.passed &= c.passed;
        self.clauses.push(c);
    }

    pub fn detail(&mut self, key: &str, v: Value) {
        self.details.insert(key.into(), v);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

pub fn vector_json(v: &ComplexVector) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

pub fn outcome_json(o: &FeasibilityOutcome) -> Value {
    json!({
        "status": if o.is_found() { "found" } else { "not_found_evidence" },
        "residual": o.residual,
        "starts_used": o.starts_used,
        "oracle_checked": o.oracle_checked,
        "vector": o.vector.as_ref().map(vector_json),
    })
}

pub fn constraint_json(c: &ForcedConstraint) -> Value {
    match c {
        ForcedConstraint::Modulus { index, coordinate, modulus } => json!({
            "type": "forced_modulus",
            "index": index,
            "coordinate": coordinate,
            "modulus": modulus,
        }),
        ForcedConstraint::OrthogonalCoupling { first, second, coordinates, .. } => json!({
            "type": "forced_orthogonal_coupling",
            "first": first,
            "second": second,
            "coordinates": [coordinates.0, coordinates.1],
        }),
    }
}
