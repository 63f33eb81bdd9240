//! The JSON output format.

use latticetodd::arith::{fmt_rat, Complex64, Rat, YPoly};
use latticetodd::emops::{EMReport, Value};
use latticetodd::polytope::Polytope;
use serde::Serialize;
use serde_json::json;

use crate::document::PolytopeDocument;

pub const TOOL: &str = "latticetodd";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A number or coefficient array, tagged `"exact"` or `"approx:<tol>"`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Num {
    pub value: serde_json::Value,
    /// Set for coefficient arrays: the variable of the ascending powers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    pub provenance: String,
}

impl Num {
    pub fn rational(r: &Rat) -> Self {
        Num { value: json!(fmt_rat(r)), variable: None, provenance: "exact".into() }
    }

    pub fn integer(k: u64) -> Self {
        Num { value: json!(k.to_string()), variable: None, provenance: "exact".into() }
    }

    pub fn coefficients(cs: &[Rat], variable: &str) -> Self {
        let v: Vec<String> = cs.iter().map(fmt_rat).collect();
        Num { value: json!(v), variable: Some(variable.into()), provenance: "exact".into() }
    }

    pub fn polynomial(p: &YPoly) -> Self {
        Num::coefficients(p.coeffs(), "y")
    }

    pub fn complex(c: Complex64, tol: f64) -> Self {
        Num { value: json!([c.re, c.im]), variable: None, provenance: format!("approx:{tol:e}") }
    }

    pub fn from_value(v: &Value, tol: Option<f64>) -> Self {
        match v {
            Value::Rational(r) => Num::rational(r),
            Value::Polynomial(p) => Num::polynomial(p),
            Value::Complex(c) => Num::complex(*c, tol.unwrap_or(0.0)),
        }
    }
}

/// One verified equality: a fast computation against a reference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub identity: String,
    pub backend: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub computed: Num,
    pub reference: Num,
    pub residual: Num,
    pub passed: bool,
}

impl Check {
    pub fn exact(identity: &str, computed: &Rat, reference: &Rat) -> Self {
        Check {
            identity: identity.into(),
            backend: "exact".into(),
            tolerance: None,
            computed: Num::rational(computed),
            reference: Num::rational(reference),
            residual: Num::rational(&(computed - reference)),
            passed: computed == reference,
        }
    }

    pub fn exact_poly(identity: &str, computed: &YPoly, reference: &YPoly) -> Self {
        Check {
            identity: identity.into(),
            backend: "exact".into(),
            tolerance: None,
            computed: Num::polynomial(computed),
            reference: Num::polynomial(reference),
            residual: Num::polynomial(&(computed - reference)),
            passed: computed == reference,
        }
    }

    pub fn from_em(r: &EMReport) -> Self {
        Check {
            identity: r.identity.clone(),
            backend: r.backend.to_string(),
            tolerance: r.tolerance,
            computed: Num::from_value(&r.operator_side, r.tolerance),
            reference: Num::from_value(&r.lattice_side, r.tolerance),
            residual: Num::from_value(&r.residual, r.tolerance),
            passed: r.passed,
        }
    }
}

/// The polytope as built, so facet indices in flags and divisors can be read off.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolytopeSummary {
    pub dim: usize,
    pub vertices: Vec<Vec<String>>,
    pub facets: Vec<FacetSummary>,
    pub simple: bool,
    pub delzant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FacetSummary {
    pub index: usize,
    pub u: Vec<i64>,
    pub c: String,
}

impl PolytopeSummary {
    pub fn of(p: &Polytope) -> Self {
        PolytopeSummary {
            dim: p.dim(),
            vertices: p.vertices().iter().map(|v| v.iter().map(fmt_rat).collect()).collect(),
            facets: p
                .facets()
                .iter()
                .enumerate()
                .map(|(index, h)| FacetSummary { index, u: h.normal.clone(), c: fmt_rat(&h.offset) })
                .collect(),
            simple: p.is_simple(),
            delzant: p.is_delzant(),
        }
    }
}

/// Echo of the input file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputEcho {
    pub file: String,
    pub document: PolytopeDocument,
}

/// A named result value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Named {
    pub name: String,
    #[serde(flatten)]
    pub num: Num,
}

impl Named {
    pub fn new(name: &str, num: Num) -> Self {
        Named { name: name.into(), num }
    }
}

/// Output of one command on one file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: InputEcho,
    pub polytope: PolytopeSummary,
    pub results: Vec<Named>,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl ReportDocument {
    pub fn new(command: &str, file: &str, document: &PolytopeDocument, p: &Polytope) -> Self {
        ReportDocument {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            input: InputEcho { file: file.into(), document: document.clone() },
            polytope: PolytopeSummary::of(p),
            results: Vec::new(),
            checks: Vec::new(),
            passed: true,
            timing_ms: None,
        }
    }

    pub fn result(&mut self, name: &str, num: Num) {
        self.results.push(Named::new(name, num));
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }
}

/// Outcome for one file of a `report` run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FileEntry {
    pub file: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exit_code: Option<i32>,
    pub reports: Vec<ReportDocument>,
}

/// One row of the summary table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub file: String,
    pub command: String,
    pub identity: String,
    pub passed: bool,
}

/// Output of `report` over a directory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub directory: String,
    pub seed: u64,
    pub entries: Vec<FileEntry>,
    pub summary: Vec<SummaryRow>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}
