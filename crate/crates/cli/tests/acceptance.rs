//! Acceptance criteria 1 to 10, one pass/fail line each.
//!
//! Runs without the libtest harness so every line is printed; the process
//! exits nonzero when any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use latticetodd::arith::rational::{primitive_of_rat, to_f64};
use latticetodd::arith::{Complex64, MPoly, Rat, YPoly};
use latticetodd::brion::{
    brion_count, brion_series, cone_exp_sum, dual_basis, ehrhart_polynomial, eval_univariate, generic_direction,
    graded_coefficients, graded_coefficients_complex, molien_sum, vertex_cone_sum, weighted_brion, ExpRationalSum,
};
use latticetodd::emops::{em_verify, local_em_verify, EmSession, Identity, LocalKind, Params};
use latticetodd::fan::{cone_multiplicity, fibration_multiplicities};
use latticetodd::oracle;
use latticetodd::polytope::{Halfspace, IVec, Polytope};
use latticetodd_cli::load;
use num_traits::{One, Zero};

type Outcome = Result<String, String>;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus() -> Vec<(String, Polytope)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|f| (f.file_stem().unwrap().to_string_lossy().into_owned(), load(&f).expect("corpus file").polytope))
        .collect()
}

fn named(name: &str) -> Polytope {
    corpus().into_iter().find(|(n, _)| n == name).unwrap_or_else(|| panic!("corpus has no {name}")).1
}

fn int(k: usize) -> Rat {
    Rat::from_integer(k.into())
}

fn rat(a: i64, b: i64) -> Rat {
    Rat::new(a.into(), b.into())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn monomials(n: usize, max_deg: u32) -> Vec<MPoly<Rat>> {
    let mut out = Vec::new();
    let mut e = vec![0u32; n];
    loop {
        if e.iter().sum::<u32>() <= max_deg {
            out.push(MPoly::monomial(e.clone(), Rat::one()));
        }
        let mut j = 0;
        loop {
            if j == n {
                return out;
            }
            e[j] += 1;
            if e[j] <= max_deg {
                break;
            }
            e[j] = 0;
            j += 1;
        }
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.1?}, limit {:?}", t, limit))?;
    Ok(t)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let c = corpus();
    ensure(c.len() >= 8, || format!("corpus has {} polytopes", c.len()))?;
    for (name, p) in &c {
        let b = brion_count(p, 0).map_err(|e| format!("{name}: {e}"))?;
        let o = oracle::count(p).map_err(|e| format!("{name}: {e}"))?;
        ensure(b == int(o), || format!("{name}: brion {b} vs oracle {o}"))?;
    }
    let t = within(start, Duration::from_secs(10))?;
    Ok(format!("{} polytopes, brion count equals lattice count ({t:.1?})", c.len()))
}

fn criterion_2() -> Outcome {
    let mut checked = 0;
    for (name, p) in corpus() {
        let n = p.dim();
        let mut total = ExpRationalSum::zero(n);
        for v in 0..p.vertices().len() {
            total.extend(vertex_cone_sum(&p, v).map_err(|e| e.to_string())?);
        }
        let mut dirs: Vec<IVec> = Vec::new();
        let mut seed = 0;
        while dirs.len() < 3 {
            let xi = generic_direction(&[&total], n, seed).map_err(|e| e.to_string())?;
            if !dirs.contains(&xi) {
                dirs.push(xi);
            }
            seed += 1;
            ensure(seed < 64, || format!("{name}: fewer than 3 distinct generic directions"))?;
        }
        for xi in &dirs {
            let s = brion_series(&p, xi, 0).map_err(|e| e.to_string())?;
            for k in 1..=(n as i64) {
                let c = s.coeff(-k).map_err(|e| e.to_string())?;
                ensure(c.is_zero(), || format!("{name}: t^-{k} coefficient {c} along {xi:?}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} polytope/direction pairs, all polar parts vanish"))
}

fn criterion_3() -> Outcome {
    let c = corpus();
    for (name, p) in &c {
        let w = weighted_brion(p, 0).map_err(|e| e.to_string())?;
        let o = oracle::weighted_face_sum(p, &MPoly::constant(p.dim(), Rat::one())).map_err(|e| e.to_string())?;
        ensure(w == o, || format!("{name}: {w} vs {o}"))?;
        let count = int(oracle::count(p).map_err(|e| e.to_string())?);
        ensure(w.eval(&Rat::zero()) == count, || format!("{name}: y = 0 gives {}", w.eval(&Rat::zero())))?;
        let interior = int(oracle::interior_points(p).map_err(|e| e.to_string())?.len());
        let top = w.in_one_plus_y().coeff(p.dim());
        ensure(top == interior, || format!("{name}: top coefficient {top} vs interior {interior}"))?;
    }
    Ok(format!("{} polytopes, weighted sums equal face scans", c.len()))
}

fn passes(s: &mut EmSession, id: &Identity, params: &Params, tag: &str) -> Result<(), String> {
    let r = s.verify(id, params).map_err(|e| format!("{tag} {}: {e}", id.name()))?;
    ensure(r.passed, || format!("{tag} {}: {} vs {}", r.identity, r.operator_side, r.lattice_side))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    let exact = Params::exact();
    for (name, p) in corpus().iter().filter(|(_, p)| p.is_delzant()) {
        let n = p.dim();
        for f in monomials(n, 3) {
            let mut ids = vec![
                Identity::Embv,
                Identity::Dual,
                Identity::Weighted,
                Identity::Stokes(vec![1; n]),
                Identity::Pick,
                Identity::VertexSpecialization,
            ];
            if name == "unit_square" {
                for mask in 0u32..(1 << p.num_facets()) {
                    let k: Vec<usize> = (0..p.num_facets()).filter(|i| mask >> i & 1 == 1).collect();
                    ids.push(Identity::FacetsRemoved(k));
                }
                for e in 0..p.faces().len() {
                    ids.push(Identity::FaceClosed(e));
                    ids.push(Identity::FaceRelint(e));
                }
            }
            let mut s = EmSession::new(p, &f).map_err(|e| e.to_string())?;
            for id in &ids {
                passes(&mut s, id, &exact, &format!("{name} f = {f:?}"))?;
                runs += 1;
            }
        }
    }
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!("{runs} exact identity checks, residual 0 ({t:.1?})"))
}

fn criterion_5() -> Outcome {
    let mut runs = 0;
    for name in ["thin_triangle", "tetra_nondelzant"] {
        let p = named(name);
        ensure(p.is_simple() && !p.is_delzant(), || format!("{name} is not simple non-Delzant"))?;
        for f in monomials(p.dim(), 2) {
            let mut s = EmSession::new(&p, &f).map_err(|e| e.to_string())?;
            for id in [Identity::Embv, Identity::Dual, Identity::Guillemin] {
                passes(&mut s, &id, &Params::complex(), name)?;
                runs += 1;
            }
            for y in [Rat::zero(), Rat::one(), rat(-1, 2)] {
                passes(&mut s, &Identity::Weighted, &Params::complex().with_y(y), name)?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} complex-backend checks within 1e-8"))
}

fn criterion_6() -> Outcome {
    let c = corpus();
    for (name, p) in &c {
        let n = p.dim();
        let e = ehrhart_polynomial(p, 0).map_err(|e| e.to_string())?;
        ensure(eval_univariate(&e, &Rat::zero()).is_one(), || format!("{name}: E(0) != 1"))?;
        for l in 1..=4usize {
            let lp = p.scale(&int(l)).map_err(|e| e.to_string())?;
            let brute = int(oracle::count(&lp).map_err(|e| e.to_string())?);
            ensure(eval_univariate(&e, &int(l)) == brute, || format!("{name}: E({l}) vs {brute}"))?;
            if l <= 3 {
                let sign = if n % 2 == 0 { Rat::one() } else { -Rat::one() };
                let recip = sign * eval_univariate(&e, &-int(l));
                let interior = int(oracle::interior_points(&lp).map_err(|e| e.to_string())?.len());
                ensure(recip == interior, || format!("{name}: reciprocity at {l}: {recip} vs {interior}"))?;
            }
        }
    }
    Ok(format!("{} polytopes, Ehrhart values and reciprocity exact", c.len()))
}

fn criterion_7() -> Outcome {
    let cones: Vec<(Vec<IVec>, Vec<i64>)> = vec![
        (vec![vec![1, 0], vec![0, 1]], vec![1, 1]),
        (vec![vec![1, 0], vec![1, 2]], vec![1, 1]),
        (vec![vec![1, 0], vec![1, 3]], vec![1, 1]),
        (vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 2]], vec![1, 1, 1]),
    ];
    let count = 20;
    let mut mults = Vec::new();
    for (gens, xi) in &cones {
        let n = gens.len();
        mults.push(cone_multiplicity(gens, n).to_string());
        let s = molien_sum(gens).map_err(|e| e.to_string())?;
        let g = graded_coefficients_complex(&s, xi, count, Complex64::new(0.0, 0.0)).map_err(|e| e.to_string())?;
        let brute = oracle::dual_cone_graded_counts(gens, &vec![false; n], xi, count).map_err(|e| e.to_string())?;
        let dual: Vec<IVec> = dual_basis(gens).map_err(|e| e.to_string())?.iter().map(|r| primitive_of_rat(r)).collect();
        let exact = cone_exp_sum(&vec![0; n], &dual).map_err(|e| e.to_string())?;
        let ge = graded_coefficients(&exact, xi, count).map_err(|e| e.to_string())?;
        for (k, b) in brute.iter().enumerate() {
            let want = to_f64(&b.eval(&Rat::zero()));
            let got = g.graded(k);
            ensure((got.re - want).abs() < 1e-9, || format!("{gens:?} degree {k}: {} vs {want}", got.re))?;
            ensure(got.im.abs() < 1e-12, || format!("{gens:?} degree {k}: imaginary part {}", got.im))?;
            let ex: YPoly = ge.graded(k);
            let (ex0, want0) = (ex.eval(&Rat::zero()), brute[k].eval(&Rat::zero()));
            ensure(ex0 == want0, || format!("{gens:?} degree {k}: subdivision gives {ex0}, scan {want0}"))?;
        }
        for c in g.off_grid() {
            ensure(c.norm() < 1e-9, || format!("{gens:?}: off-grid coefficient {c}"))?;
        }
    }
    Ok(format!("{} cones (multiplicities {}), {count} graded coefficients each", cones.len(), mults.join(", ")))
}

/// `|P_{D'} ∩ M|`: Brion when full-dimensional, otherwise a direct scan.
fn summand_count(p: &Polytope, d: &[Rat]) -> Result<Rat, String> {
    let hs: Vec<Halfspace> = p.facets().iter().zip(d).map(|(h, c)| Halfspace::new(h.normal.clone(), c.clone())).collect();
    match Polytope::from_halfspaces(p.dim(), hs.clone()) {
        Ok(q) => brion_count(&q, 0).map_err(|e| e.to_string()),
        Err(latticetodd::Error::NotFullDimensional(_)) | Err(latticetodd::Error::Empty) => {
            let data = fibration_multiplicities(p, d).map_err(|e| e.to_string())?;
            let lo: IVec = (0..p.dim()).map(|j| data.vertices.iter().map(|v| v[j]).min().unwrap()).collect();
            let hi: IVec = (0..p.dim()).map(|j| data.vertices.iter().map(|v| v[j]).max().unwrap()).collect();
            let pts = oracle::lattice_points(&hs, &vec![false; hs.len()], &lo, &hi).map_err(|e| e.to_string())?;
            Ok(int(pts.len()))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn criterion_8() -> Outcome {
    let square = named("unit_square");
    let hexagon = named("hexagon");
    let offsets = |p: &Polytope| -> Vec<i64> { p.facets().iter().map(|h| h.offset.to_integer().try_into().unwrap()).collect() };
    let segment_hex: Vec<i64> = hexagon
        .facets()
        .iter()
        .map(|h| -(0i64.min(h.normal[0])))
        .collect();
    let triangle_hex: Vec<i64> = hexagon.facets().iter().map(|h| -(0i64.min(h.normal[0]).min(h.normal[1]))).collect();
    let cases: Vec<(&str, &Polytope, Vec<i64>)> = vec![
        ("square D'=0", &square, vec![0; 4]),
        ("square D'=D_P", &square, offsets(&square)),
        ("square segment", &square, square.facets().iter().map(|h| -(0i64.min(h.normal[0]))).collect()),
        ("square 2D_P", &square, offsets(&square).iter().map(|c| 2 * c).collect()),
        ("hexagon D'=0", &hexagon, vec![0; 6]),
        ("hexagon D'=D_P", &hexagon, offsets(&hexagon)),
        ("hexagon segment", &hexagon, segment_hex),
        ("hexagon triangle", &hexagon, triangle_hex),
    ];
    for (tag, p, d) in &cases {
        let d: Vec<Rat> = d.iter().map(|&x| Rat::from_integer(x.into())).collect();
        let data = fibration_multiplicities(p, &d).map_err(|e| format!("{tag}: {e}"))?;
        for face in &data.faces {
            ensure(face.alternating_sum() == 1, || format!("{tag}: face {:?} has sum {}", face.vertices, face.alternating_sum()))?;
        }
        let f = MPoly::constant(p.dim(), Rat::one());
        let r = em_verify(p, &f, &Identity::Minkowski(d.clone()), &Params::exact().with_y(Rat::zero()))
            .map_err(|e| format!("{tag}: {e}"))?;
        let want = summand_count(p, &d)?;
        let latticetodd::emops::Value::Rational(got) = &r.operator_side else {
            return Err(format!("{tag}: unexpected value {}", r.operator_side));
        };
        ensure(r.passed && *got == want, || format!("{tag}: operator {got} vs |P_D' ∩ M| = {want}"))?;
    }
    Ok(format!("{} nef divisors, rigidity and Minkowski counts exact", cases.len()))
}

fn criterion_9() -> Outcome {
    let square = named("unit_square");
    let triangle = named("thin_triangle");
    let singular = (0..triangle.vertices().len())
        .find(|&v| {
            let gens: Vec<IVec> = triangle.vertex_facets(v).iter().map(|&i| triangle.facets()[i].normal.clone()).collect();
            cone_multiplicity(&gens, 2) > 1.into()
        })
        .ok_or("triangle has no singular vertex")?;
    let mut cases: Vec<(&Polytope, usize)> = (0..square.vertices().len()).map(|v| (&square, v)).collect();
    cases.push((&triangle, singular));
    let mut runs = 0;
    for (p, v) in cases {
        // -z = u_1 + 2 u_2 lies in the interior of the vertex cone.
        let fs = p.vertex_facets(v);
        let (u1, u2) = (&p.facets()[fs[0]].normal, &p.facets()[fs[1]].normal);
        let z: Vec<Rat> = (0..2).map(|i| Rat::from_integer((-(u1[i] + 2 * u2[i])).into())).collect();
        for scale in [rat(1, 3), rat(1, 7)] {
            for kind in [LocalKind::Todd, LocalKind::Dual] {
                let r = local_em_verify(p, v, &kind, &z, &scale, 1e-8).map_err(|e| e.to_string())?;
                ensure(r.passed, || format!("{}: {} vs {}", r.identity, r.operator_side, r.lattice_side))?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} local checks within 1e-8"))
}

fn criterion_10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_latticetodd");
    let dir = corpus_dir();
    let run = || {
        Command::new(bin)
            .arg("report")
            .arg(&dir)
            .output()
            .map_err(|e| e.to_string())
    };
    let a = run()?;
    let b = run()?;
    ensure(a.status.success(), || format!("report exited with {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stderr)))?;
    ensure(a.stdout == b.stdout, || "two report runs differ".into())?;
    Ok(format!("report is byte-identical across runs ({} bytes)", a.stdout.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("counting agreement", criterion_1),
        ("pole cancellation", criterion_2),
        ("weighted Brion", criterion_3),
        ("Euler-Maclaurin, exact backend", criterion_4),
        ("Euler-Maclaurin, complex backend", criterion_5),
        ("Ehrhart and reciprocity", criterion_6),
        ("Molien", criterion_7),
        ("fibration rigidity", criterion_8),
        ("local tangent-cone formulas", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
