//! The JSON input format.

use std::path::Path;

use latticetodd::arith::{parse_rat, MPoly, Rat};
use latticetodd::polytope::{Halfspace, IVec, Polytope};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One inequality `<m, u> + c >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetEntry {
    pub u: Vec<i64>,
    pub c: i64,
}

/// One term `coeff * x^exponents` of the test function `f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub coeff: String,
    pub exponents: Vec<u32>,
}

/// A polytope given by vertices or by facets, with optional extras.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeDocument {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<FacetEntry>>,
    /// Offsets `d'_rho` of a nef divisor, indexed like the facets of the built polytope.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor: Option<Vec<i64>>,
    /// A sampled value of `y`, as `"p/q"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    /// Test polynomial; defaults to the constant `1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<TermEntry>>,
}

/// A document after validation.
#[derive(Clone, Debug)]
pub struct Input {
    pub document: PolytopeDocument,
    pub polytope: Polytope,
    pub divisor: Option<Vec<Rat>>,
    pub y: Option<Rat>,
    pub f: MPoly<Rat>,
}

impl PolytopeDocument {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }

    /// Checks the document and builds the polytope.
    pub fn validate(self) -> Result<Input, CliError> {
        let n = self.dim;
        let polytope = match (&self.vertices, &self.facets) {
            (Some(vs), None) => {
                if let Some(v) = vs.iter().find(|v| v.len() != n) {
                    return Err(CliError::Schema(format!("vertex {v:?} does not have {n} coordinates")));
                }
                let pts: Vec<IVec> = vs.clone();
                Polytope::from_vertices(n, &pts)?
            }
            (None, Some(fs)) => {
                if let Some(h) = fs.iter().find(|h| h.u.len() != n) {
                    return Err(CliError::Schema(format!("normal {:?} does not have {n} coordinates", h.u)));
                }
                let hs = fs.iter().map(|h| Halfspace::new(h.u.clone(), Rat::from_integer(h.c.into()))).collect();
                Polytope::from_halfspaces(n, hs)?
            }
            _ => return Err(CliError::Schema("give exactly one of \"vertices\" and \"facets\"".into())),
        };
        let divisor = match &self.divisor {
            None => None,
            Some(d) if d.len() == polytope.num_facets() => Some(d.iter().map(|&x| Rat::from_integer(x.into())).collect()),
            Some(d) => {
                return Err(CliError::Schema(format!(
                    "divisor has {} entries but the polytope has {} facets",
                    d.len(),
                    polytope.num_facets()
                )))
            }
        };
        let y = match &self.y {
            None => None,
            Some(s) => Some(parse_rat(s).map_err(|e| CliError::Schema(e.to_string()))?),
        };
        let f = match &self.f {
            None => MPoly::constant(n, Rat::from_integer(1.into())),
            Some(terms) => {
                let mut f = MPoly::zero(n);
                for t in terms {
                    if t.exponents.len() != n {
                        return Err(CliError::Schema(format!("exponent vector {:?} does not have {n} entries", t.exponents)));
                    }
                    let c = parse_rat(&t.coeff).map_err(|e| CliError::Schema(e.to_string()))?;
                    f.add_term(t.exponents.clone(), c);
                }
                f
            }
        };
        Ok(Input { document: self, polytope, divisor, y, f })
    }
}

/// Reads and validates a document in one step.
pub fn load(path: &Path) -> Result<Input, CliError> {
    PolytopeDocument::read(path)?.validate()
}
