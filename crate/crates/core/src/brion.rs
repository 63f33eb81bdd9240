//! Brion's theorem: lattice-point generating functions as short sums of
//! rational functions in exponentials, and their evaluation as Laurent series
//! along a generic direction.
//!
//! A lattice point `m` contributes `e^{<m, z>}`.

use num_complex::Complex64;
use num_integer::Integer;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::coeff::{root_of_unity, Coeff};
use crate::arith::matrix::{inverse, rank, RatMatrix};
use crate::arith::rational::{dot_ri, ri, to_f64, to_rat_vec, Rat};
use crate::arith::series::{inverse_one_minus_phase_exp, laurent_exp, laurent_inverse_one_minus_exp};
use crate::arith::snf::IntMatrix;
use crate::arith::{interpolate_univariate, LaurentSeries, YPoly};
use crate::error::{Error, Result};
use crate::fan::{group_data, half_open_decomposition, tangent_cone, unimodular_subdivide, ConeComplex};
use crate::polytope::{IVec, Polytope, RVec};

/// `1 - e^{2 pi i phase} e^{<vector, z>}`
#[derive(Clone, Debug, PartialEq)]
pub struct Denominator {
    pub phase: Rat,
    pub vector: RVec,
}

/// `weight * e^{2 pi i phase} e^{<numerator, z>} / prod_k (1 - e^{2 pi i phase_k} e^{<b_k, z>})`
#[derive(Clone, Debug, PartialEq)]
pub struct ExpTerm {
    pub weight: YPoly,
    pub phase: Rat,
    pub numerator: RVec,
    pub denominators: Vec<Denominator>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpRationalSum {
    pub dim: usize,
    pub terms: Vec<ExpTerm>,
}

impl ExpRationalSum {
    pub fn zero(dim: usize) -> Self {
        ExpRationalSum { dim, terms: Vec::new() }
    }

    pub fn extend(&mut self, other: ExpRationalSum) {
        self.terms.extend(other.terms);
    }

    pub fn scaled(mut self, w: &YPoly) -> Self {
        for t in &mut self.terms {
            t.weight = &t.weight * w;
        }
        self.terms.retain(|t| !t.weight.is_zero());
        self
    }

    /// True when every phase is zero, so evaluation stays in exact arithmetic.
    pub fn is_phase_free(&self) -> bool {
        self.terms.iter().all(|t| t.phase.is_zero() && t.denominators.iter().all(|d| d.phase.is_zero()))
    }

    /// Vectors `b` whose `<b, xi>` must not vanish.
    fn singular_denominators(&self) -> impl Iterator<Item = &RVec> {
        self.terms
            .iter()
            .flat_map(|t| t.denominators.iter().filter(|d| d.phase.is_zero()).map(|d| &d.vector))
    }
}

fn lattice_term(apex: &RVec, piece: &[IVec], removed: &[bool]) -> ExpTerm {
    let mut num = apex.clone();
    for (g, &r) in piece.iter().zip(removed) {
        if r {
            for (x, &c) in num.iter_mut().zip(g) {
                *x += ri(c);
            }
        }
    }
    ExpTerm {
        weight: YPoly::from(1),
        phase: Rat::zero(),
        numerator: num,
        denominators: piece.iter().map(|g| Denominator { phase: Rat::zero(), vector: to_rat_vec(g) }).collect(),
    }
}

/// `sum_{m in (v + C) ∩ M} e^{<m,z>}` for a face of a cone complex with a lattice apex.
pub fn cone_complex_exp_sum(apex: &RVec, cc: &ConeComplex, face: &[usize]) -> Result<ExpRationalSum> {
    let dim = apex.len();
    if face.is_empty() {
        return Ok(ExpRationalSum { dim, terms: vec![lattice_term(apex, &[], &[])] });
    }
    let parent: Vec<IVec> = face.iter().map(|&r| cc.rays[r].clone()).collect();
    let mut pieces = Vec::new();
    for simplex in cc.triangulate(face) {
        let gens: Vec<IVec> = simplex.iter().map(|&r| cc.rays[r].clone()).collect();
        pieces.extend(unimodular_subdivide(&gens, dim)?);
    }
    let ho = half_open_decomposition(&parent, &pieces, dim)?;
    Ok(ExpRationalSum { dim, terms: ho.iter().map(|p| lattice_term(apex, &p.generators, &p.removed)).collect() })
}

/// Generating function of the lattice points of `v + Cone(gens)` for a simplicial cone.
pub fn cone_exp_sum(apex: &[i64], gens: &[IVec]) -> Result<ExpRationalSum> {
    let cc = ConeComplex { dim: apex.len(), rays: gens.to_vec(), faces: vec![(0..gens.len()).collect()] };
    cone_complex_exp_sum(&to_rat_vec(apex), &cc, &(0..gens.len()).collect::<Vec<_>>())
}

fn face_rank(cc: &ConeComplex, f: &[usize]) -> usize {
    rank(&f.iter().map(|&r| to_rat_vec(&cc.rays[r])).collect::<RatMatrix>())
}

/// Relative-interior generating function by inclusion-exclusion over faces.
pub fn relint_exp_sum(apex: &RVec, cc: &ConeComplex, face: &[usize]) -> Result<ExpRationalSum> {
    let d = face_rank(cc, face);
    let mut out = ExpRationalSum::zero(apex.len());
    for g in &cc.faces {
        if !g.iter().all(|r| face.contains(r)) {
            continue;
        }
        let sign = if (d - face_rank(cc, g)).is_multiple_of(2) { 1 } else { -1 };
        out.extend(cone_complex_exp_sum(apex, cc, g)?.scaled(&YPoly::from(sign)));
    }
    Ok(out)
}

fn require_lattice(p: &Polytope) -> Result<()> {
    if p.is_lattice() {
        Ok(())
    } else {
        Err(Error::InvalidInput("Brion sums need a lattice polytope".into()))
    }
}

/// Tangent-cone generating function at vertex `v`.
pub fn vertex_cone_sum(p: &Polytope, v: usize) -> Result<ExpRationalSum> {
    require_lattice(p)?;
    let tc = tangent_cone(p, v);
    let all: Vec<usize> = (0..tc.complex.rays.len()).collect();
    cone_complex_exp_sum(&tc.apex, &tc.complex, &all)
}

/// `sum_{E ∋ v} (1+y)^{dim E} * relint(E_v)`.
pub fn weighted_vertex_sum(p: &Polytope, v: usize) -> Result<ExpRationalSum> {
    require_lattice(p)?;
    let tc = tangent_cone(p, v);
    let mut out = ExpRationalSum::zero(p.dim());
    for (fi, rays) in &tc.face_map {
        let w = YPoly::one_plus_y_pow(p.face(*fi).dim);
        out.extend(relint_exp_sum(&tc.apex, &tc.complex, rays)?.scaled(&w));
    }
    Ok(out)
}

const DIRECTION_CANDIDATES: [i64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// `xi = (1, s, s^2, ...)` with `s` the first candidate (rotated by `seed`)
/// pairing nonzero with every phase-free denominator.
pub fn generic_direction(sums: &[&ExpRationalSum], dim: usize, seed: u64) -> Result<IVec> {
    let n = DIRECTION_CANDIDATES.len();
    for k in 0..n {
        let s = DIRECTION_CANDIDATES[(k + seed as usize) % n];
        let xi: IVec = (0..dim).map(|j| s.pow(j as u32)).collect();
        if sums.iter().all(|sum| sum.singular_denominators().all(|b| !dot_ri(b, &xi).is_zero())) {
            return Ok(xi);
        }
    }
    Err(Error::NoGenericDirection(n))
}

/// Laurent expansion in `t` of the sum at `z = t xi`, exact through `t^order`.
pub fn evaluate(sum: &ExpRationalSum, xi: &[i64], order: i64) -> Result<LaurentSeries<YPoly>> {
    if !sum.is_phase_free() {
        return Err(Error::Unsupported("sum carries roots of unity; use evaluate_complex".into()));
    }
    let mut total = LaurentSeries::<YPoly>::zero(order);
    for t in &sum.terms {
        let k = t.denominators.len() as i64;
        let inner = order + k;
        let mut s: LaurentSeries<YPoly> = laurent_exp(&dot_ri(&t.numerator, xi), inner);
        for d in &t.denominators {
            let a = dot_ri(&d.vector, xi);
            if a.is_zero() {
                return Err(Error::InvalidInput("direction is orthogonal to a denominator".into()));
            }
            s = s.times(&laurent_inverse_one_minus_exp(&a, inner)?);
        }
        total = total.plus(&s.scale(&t.weight).truncate(order));
    }
    Ok(total)
}

/// Complex Laurent expansion with `y` substituted numerically.
pub fn evaluate_complex(sum: &ExpRationalSum, xi: &[i64], order: i64, y: Complex64) -> Result<LaurentSeries<Complex64>> {
    let mut total = LaurentSeries::<Complex64>::zero(order);
    for t in &sum.terms {
        let k = t.denominators.iter().filter(|d| d.phase.is_zero()).count() as i64;
        let inner = order + k;
        let mut s: LaurentSeries<Complex64> = laurent_exp(&dot_ri(&t.numerator, xi), inner);
        for d in &t.denominators {
            let a = dot_ri(&d.vector, xi);
            if d.phase.is_zero() {
                if a.is_zero() {
                    return Err(Error::InvalidInput("direction is orthogonal to a denominator".into()));
                }
                s = s.times(&laurent_inverse_one_minus_exp(&a, inner)?);
            } else {
                s = s.times(&inverse_one_minus_phase_exp(&root_of_unity(&d.phase), &a, inner)?);
            }
        }
        let w = eval_weight(&t.weight, y) * root_of_unity(&t.phase);
        total = total.plus(&s.scale(&w).truncate(order));
    }
    Ok(total)
}

fn eval_weight(w: &YPoly, y: Complex64) -> Complex64 {
    w.coeffs().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * y + Complex64::new(to_f64(c), 0.0))
}

/// Numerical value at a point `z` where every denominator is nonzero.
pub fn evaluate_at(sum: &ExpRationalSum, z: &[f64], y: Complex64) -> Complex64 {
    let dotf = |v: &RVec| v.iter().zip(z).map(|(a, b)| to_f64(a) * b).sum::<f64>();
    let mut total = Complex64::new(0.0, 0.0);
    for t in &sum.terms {
        let mut val = eval_weight(&t.weight, y) * root_of_unity(&t.phase) * dotf(&t.numerator).exp();
        for d in &t.denominators {
            val /= Complex64::new(1.0, 0.0) - root_of_unity(&d.phase) * dotf(&d.vector).exp();
        }
        total += val;
    }
    total
}

/// `|P ∩ M|` as the constant term of the summed vertex-cone series.
pub fn brion_count(p: &Polytope, seed: u64) -> Result<Rat> {
    let mut total = ExpRationalSum::zero(p.dim());
    for v in 0..p.vertices().len() {
        total.extend(vertex_cone_sum(p, v)?);
    }
    let xi = generic_direction(&[&total], p.dim(), seed)?;
    let s = evaluate(&total, &xi, 0)?;
    let c = s.coeff(0)?;
    Ok(c.coeff(0))
}

/// The full Brion series `sum_v e^{<v,z>} (cone sum)` along `xi`, for pole checks.
pub fn brion_series(p: &Polytope, xi: &[i64], order: i64) -> Result<LaurentSeries<YPoly>> {
    let mut total = ExpRationalSum::zero(p.dim());
    for v in 0..p.vertices().len() {
        total.extend(vertex_cone_sum(p, v)?);
    }
    evaluate(&total, xi, order)
}

/// `sum_E (1+y)^{dim E} |Relint(E) ∩ M|`.
pub fn weighted_brion(p: &Polytope, seed: u64) -> Result<YPoly> {
    let mut total = ExpRationalSum::zero(p.dim());
    for v in 0..p.vertices().len() {
        total.extend(weighted_vertex_sum(p, v)?);
    }
    let xi = generic_direction(&[&total], p.dim(), seed)?;
    evaluate(&total, &xi, 0)?.coeff(0)
}

/// Dual basis `m'_i` of the rays: `<m'_i, u_j> = delta_ij`.
pub fn dual_basis(gens: &[IVec]) -> Result<Vec<RVec>> {
    let n = gens.len();
    let cols = IntMatrix::from_columns(gens, n).to_rat();
    inverse(&cols)
}

/// Molien-type sum over `sigma^vee ∩ M` for a full simplicial cone `sigma`
/// (rays `gens` in `N`); facets in `removed` (indexed by ray) are open.
///
/// Each factor is `(1 + y a X) / (1 - a X)` or, for removed facets,
/// `(1 + y) a X / (1 - a X)`, with `X_i = e^{<m'_i, z>}` and `a = a_i(g^{-1})`.
pub fn facets_removed_cone_sum(gens: &[IVec], removed: &[bool]) -> Result<ExpRationalSum> {
    let n = gens.len();
    if n == 0 || gens[0].len() != n {
        return Err(Error::InvalidInput("Molien sums need a full-dimensional simplicial cone".into()));
    }
    let duals = dual_basis(gens)?;
    let g = group_data(gens, n)?;
    let inv_order = Rat::new(BigInt::one(), BigInt::from(g.order()));
    let mut terms = Vec::new();
    for el in &g.elements {
        let phases: Vec<Rat> = el.iter().map(|x| crate::arith::rational::frac(&-x)).collect();
        for mask in 0u32..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if (0..n).any(|i| removed[i] && !s.contains(&i)) {
                continue;
            }
            let mut weight = YPoly::constant(inv_order.clone());
            for &i in &s {
                let f = if removed[i] { YPoly::one_plus_y_pow(1) } else { YPoly::y() };
                weight = &weight * &f;
            }
            let mut num = vec![Rat::zero(); n];
            let mut phase = Rat::zero();
            for &i in &s {
                for (a, b) in num.iter_mut().zip(&duals[i]) {
                    *a += b;
                }
                phase += &phases[i];
            }
            terms.push(ExpTerm {
                weight,
                phase: crate::arith::rational::frac(&phase),
                numerator: num,
                denominators: (0..n)
                    .map(|i| Denominator { phase: phases[i].clone(), vector: duals[i].clone() })
                    .collect(),
            });
        }
    }
    Ok(ExpRationalSum { dim: n, terms })
}

pub fn molien_sum(gens: &[IVec]) -> Result<ExpRationalSum> {
    facets_removed_cone_sum(gens, &vec![false; gens.len()])
}

/// Power series in `s = q^{1/denominator}` of a positively graded sum.
#[derive(Clone, Debug)]
pub struct GradedSeries<C> {
    pub denominator: i64,
    pub coeffs: Vec<C>,
}

impl<C: Coeff> GradedSeries<C> {
    /// Coefficient of `q^k`.
    pub fn graded(&self, k: usize) -> C {
        self.coeffs[k * self.denominator as usize].clone()
    }

    /// Coefficients at fractional powers of `q`, which must vanish.
    pub fn off_grid(&self) -> Vec<C> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i as i64 % self.denominator != 0)
            .map(|(_, c)| c.clone())
            .collect()
    }
}

fn grading_denominator(sum: &ExpRationalSum, xi: &[i64]) -> Result<i64> {
    let mut d = BigInt::one();
    for t in &sum.terms {
        let a = dot_ri(&t.numerator, xi);
        if a.is_negative() {
            return Err(Error::InvalidInput("grading is negative on a numerator".into()));
        }
        d = d.lcm(a.denom());
        for b in &t.denominators {
            let e = dot_ri(&b.vector, xi);
            if !e.is_positive() {
                return Err(Error::InvalidInput("grading is not positive on the cone".into()));
            }
            d = d.lcm(e.denom());
        }
    }
    d.to_i64().ok_or_else(|| Error::Resource("grading denominator too large".into()))
}

fn graded_generic<C: Coeff>(
    sum: &ExpRationalSum,
    xi: &[i64],
    count: usize,
    weight: impl Fn(&ExpTerm) -> C,
    phase: impl Fn(&Rat) -> C,
) -> Result<GradedSeries<C>> {
    let den = grading_denominator(sum, xi)?;
    let len = (count.saturating_sub(1)) * den as usize + 1;
    let to_exp = |v: &RVec| -> usize { (dot_ri(v, xi) * ri(den)).to_integer().to_usize().unwrap_or(usize::MAX) };
    let mut total = vec![C::nil(); len];
    for t in &sum.terms {
        let e0 = to_exp(&t.numerator);
        if e0 >= len {
            continue;
        }
        let mut s = vec![C::nil(); len];
        s[e0] = weight(t).times(&phase(&t.phase));
        for d in &t.denominators {
            let e = to_exp(&d.vector);
            let z = phase(&d.phase);
            // multiply by sum_j z^j s^{j e}
            for i in e..len {
                let add = s[i - e].times(&z);
                s[i] = s[i].plus(&add);
            }
        }
        for (a, b) in total.iter_mut().zip(s) {
            *a = a.plus(&b);
        }
    }
    Ok(GradedSeries { denominator: den, coeffs: total })
}

/// Exact graded coefficients `sum_{<m,xi> = k}` for phase-free sums.
pub fn graded_coefficients(sum: &ExpRationalSum, xi: &[i64], count: usize) -> Result<GradedSeries<YPoly>> {
    if !sum.is_phase_free() {
        return Err(Error::Unsupported("sum carries roots of unity; use graded_coefficients_complex".into()));
    }
    graded_generic(sum, xi, count, |t| t.weight.clone(), |_| YPoly::from(1))
}

pub fn graded_coefficients_complex(sum: &ExpRationalSum, xi: &[i64], count: usize, y: Complex64) -> Result<GradedSeries<Complex64>> {
    graded_generic(sum, xi, count, |t| eval_weight(&t.weight, y), root_of_unity)
}

/// `weight * e^{<apex,z>} / prod <w_i, z>`
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousTerm {
    pub weight: Rat,
    pub apex: RVec,
    pub forms: Vec<IVec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousSum {
    pub dim: usize,
    pub terms: Vec<ContinuousTerm>,
}

/// `int_P e^{<m,z>} dm` as a sum over vertices of simplicial cone integrals.
pub fn continuous_brion(p: &Polytope) -> Result<ContinuousSum> {
    let n = p.dim();
    let sign = if n.is_multiple_of(2) { Rat::one() } else { -Rat::one() };
    let mut terms = Vec::new();
    for v in 0..p.vertices().len() {
        let tc = tangent_cone(p, v);
        let all: Vec<usize> = (0..tc.complex.rays.len()).collect();
        for simplex in tc.complex.triangulate(&all) {
            let gens: Vec<IVec> = simplex.iter().map(|&r| tc.complex.rays[r].clone()).collect();
            let d = crate::arith::matrix::det_int(&gens).abs();
            terms.push(ContinuousTerm { weight: &sign * d, apex: tc.apex.clone(), forms: gens });
        }
    }
    Ok(ContinuousSum { dim: n, terms })
}

/// Laurent expansion of the continuous sum at `z = t xi`, exact through `t^order`.
pub fn evaluate_continuous(sum: &ContinuousSum, xi: &[i64], order: i64) -> Result<LaurentSeries<Rat>> {
    let mut total = LaurentSeries::<Rat>::zero(order);
    let n = sum.dim as i64;
    for t in &sum.terms {
        let mut w = t.weight.clone();
        for f in &t.forms {
            let a = ri(crate::arith::rational::dot_ii(f, xi));
            if a.is_zero() {
                return Err(Error::InvalidInput("direction is orthogonal to an edge".into()));
            }
            w /= a;
        }
        let e: LaurentSeries<Rat> = laurent_exp(&dot_ri(&t.apex, xi), order + n);
        let shifted = LaurentSeries::new(-n, order, (0..=(order + n)).map(|k| e.coeff(k).unwrap()).collect());
        total = total.plus(&shifted.scale(&w));
    }
    Ok(total)
}

/// Ehrhart polynomial coefficients (ascending in `l`), interpolated from `l = 1..=n+1`.
pub fn ehrhart_polynomial(p: &Polytope, seed: u64) -> Result<Vec<Rat>> {
    require_lattice(p)?;
    let n = p.dim();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for l in 1..=(n as i64 + 1) {
        xs.push(ri(l));
        ys.push(brion_count(&p.scale(&ri(l))?, seed)?);
    }
    interpolate_univariate(&xs, &ys)
}

/// `|P_y ∩ M|` as a polynomial in `k = 1 + y`, from integer dilations `k = 1..=n+1`.
pub fn chi_y_polynomial(p: &Polytope, seed: u64) -> Result<Vec<Rat>> {
    require_lattice(p)?;
    let n = p.dim();
    let zero_h = vec![Rat::zero(); p.num_facets()];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 1..=(n as i64 + 1) {
        let py = p.dilate_y(&ri(k - 1), &zero_h)?;
        xs.push(ri(k));
        ys.push(brion_count(&py, seed)?);
    }
    interpolate_univariate(&xs, &ys)
}

pub fn eval_univariate(coeffs: &[Rat], x: &Rat) -> Rat {
    coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}
