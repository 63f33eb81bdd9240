//! One function per subcommand; each returns a report and never prints.

use std::path::{Path, PathBuf};
use std::time::Instant;

use latticetodd::arith::{parse_rat, Rat};
use latticetodd::brion::{brion_count, chi_y_polynomial, ehrhart_polynomial, eval_univariate, weighted_brion};
use latticetodd::emops::{em_verify, local_em_verify, EmSession, Backend, Identity, LocalKind, Params, DEFAULT_TOLERANCE};
use latticetodd::oracle;
use num_traits::{One, Zero};

use crate::document::{load, Input};
use crate::error::{CliError, EXIT_FAILED, EXIT_OK};
use crate::report::{Check, CorpusReport, FileEntry, Num, ReportDocument, SummaryRow, TOOL, VERSION};

/// Settings shared by every command.
#[derive(Clone, Debug, Default)]
pub struct Common {
    pub seed: u64,
    pub timing: bool,
}

fn int(k: usize) -> Rat {
    Rat::from_integer(k.into())
}

fn finish(mut r: ReportDocument, common: &Common, start: Instant) -> ReportDocument {
    if common.timing {
        r.timing_ms = Some(start.elapsed().as_millis());
    }
    r
}

/// Brion count against the brute-force count.
pub fn count(input: &Input, file: &str, common: &Common) -> Result<ReportDocument, CliError> {
    let start = Instant::now();
    let p = &input.polytope;
    let mut r = ReportDocument::new("count", file, &input.document, p);
    let b = brion_count(p, common.seed)?;
    let o = int(oracle::count(p)?);
    r.result("count", Num::rational(&b));
    r.result("oracle", Num::rational(&o));
    r.check(Check::exact("count", &b, &o));
    Ok(finish(r, common, start))
}

/// Weighted Brion sum against the face-by-face scan.
pub fn weighted_count(input: &Input, file: &str, common: &Common) -> Result<ReportDocument, CliError> {
    let start = Instant::now();
    let p = &input.polytope;
    let n = p.dim();
    let mut r = ReportDocument::new("weighted-count", file, &input.document, p);
    let w = weighted_brion(p, common.seed)?;
    let one = latticetodd::arith::MPoly::constant(n, Rat::one());
    let o = oracle::weighted_face_sum(p, &one)?;
    let k = w.in_one_plus_y();
    r.result("weighted", Num::coefficients(k.coeffs(), "1+y"));
    r.result("weighted-in-y", Num::polynomial(&w));
    r.check(Check::exact_poly("weighted-count", &w, &o));
    r.check(Check::exact("weighted-count[y=0]", &w.eval(&Rat::zero()), &int(oracle::count(p)?)));
    r.check(Check::exact("weighted-count[top]", &k.coeff(n), &int(oracle::interior_points(p)?.len())));
    Ok(finish(r, common, start))
}

/// Ehrhart polynomial with dilation and reciprocity checks.
pub fn ehrhart(input: &Input, file: &str, common: &Common) -> Result<ReportDocument, CliError> {
    let start = Instant::now();
    let p = &input.polytope;
    let n = p.dim();
    let mut r = ReportDocument::new("ehrhart", file, &input.document, p);
    let e = ehrhart_polynomial(p, common.seed)?;
    r.result("ehrhart", Num::coefficients(&e, "l"));
    r.check(Check::exact("ehrhart[l=0]", &eval_univariate(&e, &Rat::zero()), &Rat::one()));
    for l in 1..=3usize {
        let lp = p.scale(&int(l))?;
        r.check(Check::exact(&format!("ehrhart[l={l}]"), &eval_univariate(&e, &int(l)), &int(oracle::count(&lp)?)));
        let sign = if n.is_multiple_of(2) { Rat::one() } else { -Rat::one() };
        let recip = sign * eval_univariate(&e, &-int(l));
        r.check(Check::exact(&format!("reciprocity[l={l}]"), &recip, &int(oracle::interior_points(&lp)?.len())));
    }
    Ok(finish(r, common, start))
}

/// `|(1+y) P ∩ M|` as a polynomial in `1+y`.
pub fn chi_y(input: &Input, file: &str, common: &Common) -> Result<ReportDocument, CliError> {
    let start = Instant::now();
    let p = &input.polytope;
    let mut r = ReportDocument::new("chi-y", file, &input.document, p);
    let c = chi_y_polynomial(p, common.seed)?;
    r.result("chi-y", Num::coefficients(&c, "1+y"));
    r.check(Check::exact("chi-y[1+y=0]", &eval_univariate(&c, &Rat::zero()), &Rat::one()));
    r.check(Check::exact("chi-y[1+y=1]", &eval_univariate(&c, &Rat::one()), &int(oracle::count(p)?)));
    Ok(finish(r, common, start))
}

/// Options of `em-verify`.
#[derive(Clone, Debug)]
pub struct EmOptions {
    pub identity: String,
    pub removed: Vec<usize>,
    pub face: Option<usize>,
    pub backend: Backend,
    pub order: Option<usize>,
    pub tolerance: f64,
    pub y: Option<Rat>,
    pub vertex: Option<usize>,
    pub z: Option<Vec<Rat>>,
    pub scale: Rat,
    pub local_kind: String,
    pub m0: Option<Vec<i64>>,
}

impl Default for EmOptions {
    fn default() -> Self {
        EmOptions {
            identity: "embv".into(),
            removed: Vec::new(),
            face: None,
            backend: Backend::Exact,
            order: None,
            tolerance: DEFAULT_TOLERANCE,
            y: None,
            vertex: None,
            z: None,
            scale: Rat::one(),
            local_kind: "todd".into(),
            m0: None,
        }
    }
}

/// The identity names `em-verify` accepts.
pub const IDENTITIES: &[&str] = &[
    "embv",
    "dual",
    "facets-removed",
    "face-closed",
    "face-relint",
    "weighted",
    "weighted-renormalized",
    "weighted-facets-removed",
    "weighted-face",
    "minkowski",
    "guillemin",
    "stokes",
    "pick",
    "vertex-spec",
    "local",
];

fn need_face(o: &EmOptions) -> Result<usize, CliError> {
    o.face.ok_or_else(|| CliError::Schema(format!("identity {} needs --face", o.identity)))
}

fn identity_of(input: &Input, o: &EmOptions) -> Result<Identity, CliError> {
    Ok(match o.identity.as_str() {
        "embv" => Identity::Embv,
        "dual" => Identity::Dual,
        "facets-removed" => Identity::FacetsRemoved(o.removed.clone()),
        "face-closed" => Identity::FaceClosed(need_face(o)?),
        "face-relint" => Identity::FaceRelint(need_face(o)?),
        "weighted" => Identity::Weighted,
        "weighted-renormalized" => Identity::WeightedRenormalized,
        "weighted-facets-removed" => Identity::WeightedFacetsRemoved(o.removed.clone()),
        "weighted-face" => Identity::WeightedFace(need_face(o)?),
        "minkowski" => Identity::Minkowski(
            input.divisor.clone().ok_or_else(|| CliError::Schema("identity minkowski needs a \"divisor\"".into()))?,
        ),
        "guillemin" => Identity::Guillemin,
        "stokes" => Identity::Stokes(o.m0.clone().unwrap_or_else(|| vec![1; input.polytope.dim()])),
        "pick" => Identity::Pick,
        "vertex-spec" => Identity::VertexSpecialization,
        other => return Err(CliError::Schema(format!("unknown identity {other:?}; expected one of {}", IDENTITIES.join(", ")))),
    })
}

fn local_kind_of(o: &EmOptions, y: Option<&Rat>) -> Result<LocalKind, CliError> {
    Ok(match o.local_kind.as_str() {
        "todd" => LocalKind::Todd,
        "dual" => LocalKind::Dual,
        "facets-removed" => LocalKind::FacetsRemoved(o.removed.clone()),
        "weighted" => LocalKind::Weighted(y.cloned().unwrap_or_else(Rat::zero)),
        other => {
            return Err(CliError::Schema(format!(
                "unknown local kind {other:?}; expected todd, dual, facets-removed or weighted"
            )))
        }
    })
}

/// Checks one identity.
pub fn em(input: &Input, file: &str, o: &EmOptions, common: &Common) -> Result<ReportDocument, CliError> {
    let start = Instant::now();
    let p = &input.polytope;
    let mut r = ReportDocument::new("em-verify", file, &input.document, p);
    let y = o.y.clone().or_else(|| input.y.clone());
    let em = if o.identity == "local" {
        let v = o.vertex.ok_or_else(|| CliError::Schema("identity local needs --vertex".into()))?;
        let z = o.z.clone().ok_or_else(|| CliError::Schema("identity local needs --z".into()))?;
        local_em_verify(p, v, &local_kind_of(o, y.as_ref())?, &z, &o.scale, o.tolerance)?
    } else {
        let id = identity_of(input, o)?;
        let params = Params { backend: o.backend, y, order: o.order, tolerance: o.tolerance };
        em_verify(p, &input.f, &id, &params)?
    };
    r.check(Check::from_em(&em));
    Ok(finish(r, common, start))
}

/// Default identity suite for one polytope, chosen by its type.
pub fn em_suite(input: &Input, file: &str, common: &Common) -> Result<ReportDocument, CliError> {
    let start = Instant::now();
    let p = &input.polytope;
    let mut r = ReportDocument::new("em-verify", file, &input.document, p);
    let f = &input.f;
    let half = Rat::new(1.into(), 2.into());
    let mut session = EmSession::new(p, f)?;
    let mut run = |id: Identity, params: Params| -> Result<(), CliError> {
        r.check(Check::from_em(&session.verify(&id, &params)?));
        Ok(())
    };
    if p.is_delzant() {
        let ids = [
            Identity::Embv,
            Identity::Dual,
            Identity::Weighted,
            Identity::Stokes(vec![1; p.dim()]),
            Identity::Pick,
            Identity::VertexSpecialization,
        ];
        for id in ids {
            run(id, Params::exact())?;
        }
        if let Some(y) = &input.y {
            run(Identity::Weighted, Params::exact().with_y(y.clone()))?;
        }
        if let Some(d) = &input.divisor {
            run(Identity::Minkowski(d.clone()), Params::exact())?;
        }
    } else {
        for id in [Identity::Embv, Identity::Dual, Identity::Guillemin] {
            run(id, Params::complex())?;
        }
        run(Identity::Weighted, Params::complex().with_y(input.y.clone().unwrap_or(half)))?;
        if let Some(d) = &input.divisor {
            run(Identity::Minkowski(d.clone()), Params::complex().with_y(Rat::zero()))?;
        }
    }
    Ok(finish(r, common, start))
}

/// Every command on one file.
pub fn suite(input: &Input, file: &str, common: &Common) -> Result<Vec<ReportDocument>, CliError> {
    let mut out = vec![
        count(input, file, common)?,
        weighted_count(input, file, common)?,
        ehrhart(input, file, common)?,
        chi_y(input, file, common)?,
    ];
    if input.polytope.is_simple() {
        out.push(em_suite(input, file, common)?);
    }
    Ok(out)
}

fn run_file(path: &Path, common: &Common) -> FileEntry {
    let file = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match load(path).and_then(|input| suite(&input, &file, common)) {
        Ok(reports) => FileEntry { file, status: "ok".into(), error: None, exit_code: None, reports },
        Err(e) => FileEntry {
            file,
            status: "error".into(),
            error: Some(e.to_string()),
            exit_code: Some(e.exit_code()),
            reports: Vec::new(),
        },
    }
}

/// Every `*.json` file of a directory, sorted by name; files run concurrently.
pub fn report(dir: &Path, common: &Common) -> Result<CorpusReport, CliError> {
    let start = Instant::now();
    let read = std::fs::read_dir(dir).map_err(|e| CliError::Io(dir.display().to_string(), e.to_string()))?;
    let mut files: Vec<PathBuf> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let entries: Vec<FileEntry> = std::thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|f| s.spawn(|| run_file(f, common))).collect();
        handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
    });
    let mut summary = Vec::new();
    for e in &entries {
        for r in &e.reports {
            for c in &r.checks {
                summary.push(SummaryRow {
                    file: e.file.clone(),
                    command: r.command.clone(),
                    identity: c.identity.clone(),
                    passed: c.passed,
                });
            }
        }
    }
    let passed = entries.iter().all(|e| e.error.is_none()) && summary.iter().all(|s| s.passed);
    Ok(CorpusReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: "report".into(),
        directory: dir.display().to_string(),
        seed: common.seed,
        entries,
        summary,
        passed,
        timing_ms: common.timing.then(|| start.elapsed().as_millis()),
    })
}

/// Exit status of a single-file report.
pub fn exit_code(r: &ReportDocument) -> i32 {
    if r.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

/// Exit status of a corpus report: the first file error, else failure or success.
pub fn corpus_exit_code(r: &CorpusReport) -> i32 {
    if let Some(code) = r.entries.iter().find_map(|e| e.exit_code) {
        return code;
    }
    if r.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

/// Parses `"a,b,c"` as rationals.
pub fn parse_rat_list(s: &str) -> Result<Vec<Rat>, CliError> {
    s.split(',').map(|x| parse_rat(x).map_err(|e| CliError::Schema(e.to_string()))).collect()
}
