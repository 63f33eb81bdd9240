//! Brute-force reference computations, kept independent of the fast paths.
//!
//! Everything here scans bounding boxes of lattice points and tests halfspace
//! membership directly.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::matrix::{inverse, mat_vec, rank};
use crate::arith::rational::{dot_ri, ri, to_f64, to_rat_vec, Rat};
use crate::arith::{MPoly, YPoly};
use crate::error::{Error, Result};
use crate::polytope::{Halfspace, IVec, Polytope, RVec};

pub const DEFAULT_CAP: u64 = 10_000_000;

/// Box-size cap, overridable through `LATTICETODD_CAP`.
pub fn cap() -> u64 {
    std::env::var("LATTICETODD_CAP").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_CAP)
}

/// Calls `visit` on every integer point of the box `lo..=hi`.
fn scan_box(lo: &[i64], hi: &[i64], mut visit: impl FnMut(&IVec)) -> Result<()> {
    let mut size: u64 = 1;
    for (a, b) in lo.iter().zip(hi) {
        if b < a {
            return Ok(());
        }
        size = size.saturating_mul((b - a + 1) as u64);
    }
    if size > cap() {
        return Err(Error::Resource(format!("bounding box holds {size} points, cap is {}", cap())));
    }
    let n = lo.len();
    let mut m = lo.to_vec();
    loop {
        visit(&m);
        let mut j = 0;
        loop {
            if j == n {
                return Ok(());
            }
            m[j] += 1;
            if m[j] <= hi[j] {
                break;
            }
            m[j] = lo[j];
            j += 1;
        }
    }
}

fn bounding_box(points: &[RVec]) -> (IVec, IVec) {
    let n = points[0].len();
    let lo = (0..n).map(|j| points.iter().map(|p| p[j].floor()).min().unwrap().to_integer().to_i64().unwrap()).collect();
    let hi = (0..n).map(|j| points.iter().map(|p| p[j].ceil()).max().unwrap().to_integer().to_i64().unwrap()).collect();
    (lo, hi)
}

/// Integer points with `<m,u_i> + c_i >= 0`, strictly where `strict[i]`.
pub fn lattice_points(facets: &[Halfspace], strict: &[bool], lo: &[i64], hi: &[i64]) -> Result<Vec<IVec>> {
    let mut out = Vec::new();
    scan_box(lo, hi, |m| {
        let mr = to_rat_vec(m);
        let ok = facets.iter().zip(strict).all(|(h, &s)| {
            let v = h.eval(&mr);
            if s {
                v.is_positive()
            } else {
                !v.is_negative()
            }
        });
        if ok {
            out.push(m.clone());
        }
    })?;
    Ok(out)
}

/// `P ∩ M` with the facets in `removed` open.
pub fn points_removed(p: &Polytope, removed: &[usize]) -> Result<Vec<IVec>> {
    let (lo, hi) = bounding_box(p.vertices());
    let strict: Vec<bool> = (0..p.num_facets()).map(|i| removed.contains(&i)).collect();
    lattice_points(p.facets(), &strict, &lo, &hi)
}

pub fn points(p: &Polytope) -> Result<Vec<IVec>> {
    points_removed(p, &[])
}

pub fn interior_points(p: &Polytope) -> Result<Vec<IVec>> {
    points_removed(p, &(0..p.num_facets()).collect::<Vec<_>>())
}

pub fn count(p: &Polytope) -> Result<usize> {
    Ok(points(p)?.len())
}

fn active(p: &Polytope, m: &RVec) -> Vec<usize> {
    (0..p.num_facets()).filter(|&i| p.facets()[i].eval(m).is_zero()).collect()
}

/// Dimension of the face carrying `m` in its relative interior.
fn carrier_dim(p: &Polytope, m: &RVec) -> usize {
    let act = active(p, m);
    let rows: Vec<RVec> = act.iter().map(|&i| to_rat_vec(&p.facets()[i].normal)).collect();
    p.dim() - rank(&rows)
}

/// Lattice points of a face (given by its facets), closed or relatively open.
pub fn face_points(p: &Polytope, face_facets: &[usize], relint: bool) -> Result<Vec<IVec>> {
    Ok(points(p)?
        .into_iter()
        .filter(|m| {
            let act = active(p, &to_rat_vec(m));
            face_facets.iter().all(|f| act.contains(f)) && (!relint || act.len() == face_facets.len())
        })
        .collect())
}

pub fn sum_f(pts: &[IVec], f: &MPoly<Rat>) -> Rat {
    pts.iter().map(|m| f.eval(&to_rat_vec(m))).sum()
}

/// `sum_{m in P ∩ M} (1+y)^{dim carrier(m)} f(m)`.
pub fn weighted_face_sum(p: &Polytope, f: &MPoly<Rat>) -> Result<YPoly> {
    let mut total = YPoly::zero();
    for m in points(p)? {
        let mr = to_rat_vec(&m);
        let w = YPoly::one_plus_y_pow(carrier_dim(p, &mr));
        total = &total + &w.scale(&f.eval(&mr));
    }
    Ok(total)
}

/// Weighted sum restricted to points whose carrier avoids the removed facets,
/// or lies inside the face with facet set `within`.
pub fn weighted_face_sum_filtered(p: &Polytope, f: &MPoly<Rat>, removed: &[usize], within: &[usize]) -> Result<YPoly> {
    let mut total = YPoly::zero();
    for m in points(p)? {
        let mr = to_rat_vec(&m);
        let act = active(p, &mr);
        if removed.iter().any(|r| act.contains(r)) || !within.iter().all(|r| act.contains(r)) {
            continue;
        }
        let w = YPoly::one_plus_y_pow(carrier_dim(p, &mr));
        total = &total + &w.scale(&f.eval(&mr));
    }
    Ok(total)
}

/// Truncated `sum e^{<m,z>}` over `(apex + Cone(gens)) ∩ M` with grade
/// `-<m - apex, z> <= radius`; returns the sum and the last shell's share.
pub fn cone_series_numeric(apex: &[i64], gens: &[IVec], z: &[f64], radius: f64) -> Result<(f64, f64)> {
    let n = apex.len();
    let w = inverse(&(0..n).map(|i| gens.iter().map(|g| ri(g[i])).collect()).collect::<Vec<RVec>>())?;
    let grade = |x: &[i64]| -> f64 { -x.iter().zip(z).map(|(a, b)| *a as f64 * b).sum::<f64>() };
    let mut corners: Vec<Vec<f64>> = vec![vec![0.0; n]];
    for g in gens {
        let s = grade(g);
        if s <= 0.0 {
            return Err(Error::InvalidInput("z does not decay along the cone".into()));
        }
        corners.push(g.iter().map(|&x| x as f64 * radius / s).collect());
    }
    let lo: IVec = (0..n).map(|j| corners.iter().map(|c| c[j]).fold(f64::INFINITY, f64::min).floor() as i64).collect();
    let hi: IVec = (0..n).map(|j| corners.iter().map(|c| c[j]).fold(f64::NEG_INFINITY, f64::max).ceil() as i64).collect();
    let zdot_apex: f64 = apex.iter().zip(z).map(|(a, b)| *a as f64 * b).sum();
    let mut total = 0.0;
    let mut shell = 0.0;
    scan_box(&lo, &hi, |x| {
        let lam = mat_vec(&w, &to_rat_vec(x));
        if lam.iter().any(|l| l.is_negative()) {
            return;
        }
        let g = grade(x);
        if g > radius {
            return;
        }
        let v = (zdot_apex - g).exp();
        total += v;
        if g > radius - 1.0 {
            shell += v;
        }
    })?;
    Ok((total, shell))
}

/// `(1/k^n) sum_{m in kP ∩ M} f(m/k)`, which tends to `int_P f`.
pub fn riemann_integral_check(p: &Polytope, f: &MPoly<Rat>, k: i64) -> Result<Rat> {
    let kp = p.scale(&ri(k))?;
    let kr = ri(k);
    let mut s = Rat::zero();
    for m in points(&kp)? {
        let x: RVec = m.iter().map(|&c| ri(c) / &kr).collect();
        s += f.eval(&x);
    }
    let mut norm = Rat::one();
    for _ in 0..p.dim() {
        norm *= &kr;
    }
    Ok(s / norm)
}

/// Graded weighted counts over `sigma^vee ∩ M` for `sigma = Cone(rays)`:
/// entry `k` is `sum_{<m,xi> = k} (1+y)^{dim carrier}`, carriers avoiding `removed`.
pub fn dual_cone_graded_counts(rays: &[IVec], removed: &[bool], xi: &[i64], count: usize) -> Result<Vec<YPoly>> {
    let n = rays.len();
    let cols = inverse(&(0..n).map(|i| rays.iter().map(|g| ri(g[i])).collect()).collect::<Vec<RVec>>())?;
    // Rows of the inverse are the dual generators.
    let top = ri(count as i64 - 1);
    let mut corners: Vec<RVec> = vec![vec![Rat::zero(); n]];
    for row in &cols {
        let s = dot_ri(row, xi);
        if !s.is_positive() {
            return Err(Error::InvalidInput("grading is not positive on the dual cone".into()));
        }
        corners.push(row.iter().map(|x| x * &top / &s).collect());
    }
    let (lo, hi) = bounding_box(&corners);
    let mut out = vec![YPoly::zero(); count];
    scan_box(&lo, &hi, |m| {
        let vals: Vec<i64> = rays.iter().map(|u| m.iter().zip(u).map(|(a, b)| a * b).sum()).collect();
        if vals.iter().any(|&v| v < 0) {
            return;
        }
        if vals.iter().zip(removed).any(|(&v, &r)| r && v == 0) {
            return;
        }
        let g: i64 = m.iter().zip(xi).map(|(a, b)| a * b).sum();
        if g < 0 || g as usize >= count {
            return;
        }
        let tight: Vec<RVec> = vals.iter().zip(rays).filter(|(&v, _)| v == 0).map(|(_, u)| to_rat_vec(u)).collect();
        let d = n - rank(&tight);
        out[g as usize] = &out[g as usize] + &YPoly::one_plus_y_pow(d);
    })?;
    Ok(out)
}

pub fn approx(r: &Rat) -> f64 {
    to_f64(r)
}
