//! Euler–Maclaurin operators in the facet-dilation parameters `h`.
//!
//! Operators are finite sums of products of univariate power series, one
//! variable `x_rho` per facet, applied to polynomials `Q(h)` through
//! `sum_alpha c_alpha alpha! q_alpha`. The dilation polynomials
//! `int_{E(h)} f dm` come from exact interpolation on a simplex grid of
//! type-preserving dilations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::coeff::{root_of_unity, Coeff};
use crate::arith::matrix::{inverse, solve};
use crate::arith::rational::{dot_ri, factorial, rbig, ri, to_f64, to_rat_vec, Rat};
use crate::arith::{interpolate_simplex_grid_many, MPoly, PowerSeries, YPoly};
use crate::brion::{
    dual_basis, evaluate_at, facets_removed_cone_sum, relint_exp_sum, vertex_cone_sum, weighted_vertex_sum,
};
use crate::error::{Error, Result};
use crate::fan::{fibration_multiplicities, fibration_relint_points, group_data, star_fan, tangent_cone, NormalFan};
use crate::oracle;
use crate::polytope::{integrate_simplices, FaceChart, IVec, Polytope, RVec};

/// Default tolerance of the complex backend.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Coefficients in `Q` or `Q[y]`; needs trivial groups.
    Exact,
    /// Double-precision complex coefficients.
    Complex,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Complex => "complex",
        })
    }
}

/// A rational number, a polynomial in `y`, or a complex approximation.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Rational(Rat),
    Polynomial(YPoly),
    Complex(Complex64),
}

impl Value {
    pub fn is_zero(&self) -> bool {
        match self {
            Value::Rational(r) => r.is_zero(),
            Value::Polynomial(p) => p.is_zero(),
            Value::Complex(c) => c.norm() == 0.0,
        }
    }

    pub fn to_complex(&self) -> Result<Complex64> {
        match self {
            Value::Rational(r) => Ok(Complex64::new(to_f64(r), 0.0)),
            Value::Complex(c) => Ok(*c),
            Value::Polynomial(p) => match p.degree() {
                None => Ok(Complex64::new(0.0, 0.0)),
                Some(0) => Ok(Complex64::new(to_f64(&p.coeff(0)), 0.0)),
                _ => Err(Error::InvalidInput("a polynomial in y has no single complex value".into())),
            },
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rational(r) => write!(f, "{r}"),
            Value::Polynomial(p) => write!(f, "{p}"),
            Value::Complex(c) => write!(f, "{:.12e}{:+.12e}i", c.re, c.im),
        }
    }
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct EMReport {
    pub identity: String,
    pub backend: Backend,
    pub operator_side: Value,
    pub lattice_side: Value,
    pub residual: Value,
    /// `None` for exact comparisons.
    pub tolerance: Option<f64>,
    pub passed: bool,
}

impl EMReport {
    fn exact(identity: String, op: Value, lat: Value) -> Self {
        let residual = match (&op, &lat) {
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a - b),
            (Value::Polynomial(a), Value::Polynomial(b)) => Value::Polynomial(a - b),
            _ => unreachable!("exact reports compare like values"),
        };
        let passed = residual.is_zero();
        EMReport { identity, backend: Backend::Exact, operator_side: op, lattice_side: lat, residual, tolerance: None, passed }
    }

    fn approximate(identity: String, op: Complex64, lat: Value, tol: f64) -> Result<Self> {
        let l = lat.to_complex()?;
        let r = op - l;
        let passed = r.norm() <= tol * l.norm().max(1.0);
        Ok(EMReport {
            identity,
            backend: Backend::Complex,
            operator_side: Value::Complex(op),
            lattice_side: lat,
            residual: Value::Complex(r),
            tolerance: Some(tol),
            passed,
        })
    }
}

// ---------------------------------------------------------------------------
// Coefficient rings

/// Coefficient rings operators are built over.
pub trait OpRing: Coeff {
    /// `e^{2 pi i gamma}` when representable.
    fn phase(gamma: &Rat) -> Option<Self>;
    /// `v * (1+y)^k`; exact division for negative `k` in `Q[y]`.
    fn shift(v: Self, y: &Self, k: i64) -> Result<Self>;
}

fn pow_shift<C: Coeff>(v: C, y: &C, k: i64) -> Result<C> {
    let base = C::unit().plus(y);
    let b = if k < 0 { base.try_inv().ok_or_else(|| Error::InvalidInput("y = -1 is excluded here".into()))? } else { base };
    let mut out = v;
    for _ in 0..k.unsigned_abs() {
        out = out.times(&b);
    }
    Ok(out)
}

impl OpRing for Rat {
    fn phase(gamma: &Rat) -> Option<Self> {
        gamma.is_integer().then(Rat::one)
    }
    fn shift(v: Self, y: &Self, k: i64) -> Result<Self> {
        pow_shift(v, y, k)
    }
}

impl OpRing for YPoly {
    fn phase(gamma: &Rat) -> Option<Self> {
        gamma.is_integer().then(|| YPoly::from(1))
    }
    fn shift(v: Self, _y: &Self, k: i64) -> Result<Self> {
        if k >= 0 {
            Ok(&v * &YPoly::one_plus_y_pow(k as usize))
        } else {
            v.div_one_plus_y_pow((-k) as usize)
        }
    }
}

impl OpRing for Complex64 {
    fn phase(gamma: &Rat) -> Option<Self> {
        Some(root_of_unity(gamma))
    }
    fn shift(v: Self, y: &Self, k: i64) -> Result<Self> {
        pow_shift(v, y, k)
    }
}

fn phase_of<C: OpRing>(gamma: &Rat) -> Result<C> {
    C::phase(gamma).ok_or(Error::NotDelzant)
}

// ---------------------------------------------------------------------------
// Univariate factors

/// The univariate building blocks, with `a` a root of unity and `s` the
/// stretch (`1`, or `1+y` after renormalization):
///
/// * `Todd`: `x / (1 - a e^{-s x})`
/// * `Dual`: `a x e^{-s x} / (1 - a e^{-s x})`
/// * `Hirzebruch`: `x (1 + y a e^{-s x}) / (1 - a e^{-s x})`
/// * `HirzebruchRemoved`: `(1+y) a x e^{-s x} / (1 - a e^{-s x})`
/// * `GuilleminInner`: `1 / (1 - a e^{-s x})`, needs `a != 1`
/// * `Linear`: `x`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    Todd,
    Dual,
    Hirzebruch,
    HirzebruchRemoved,
    GuilleminInner,
    Linear,
}

pub fn factor_series<C: Coeff>(kind: Factor, a: &C, y: &C, stretch: &C, order: usize) -> Result<PowerSeries<C>> {
    if kind == Factor::Linear {
        return Ok(PowerSeries::x(order));
    }
    let top = order + 1;
    let ae = PowerSeries::exp(&stretch.negated(), top).scale(a);
    let den = PowerSeries::constant(C::unit(), top).minus(&ae);
    let x = PowerSeries::x(top);
    let one_plus_y = C::unit().plus(y);
    let num = match kind {
        Factor::Todd => x,
        Factor::Dual => x.times(&ae),
        Factor::Hirzebruch => x.times(&PowerSeries::constant(C::unit(), top).plus(&ae.scale(y))),
        Factor::HirzebruchRemoved => x.times(&ae).scale(&one_plus_y),
        Factor::GuilleminInner => PowerSeries::constant(C::unit(), top),
        Factor::Linear => unreachable!(),
    };
    let (num, den) = if den.coeffs[0].is_nil() {
        if !num.coeffs[0].is_nil() {
            return Err(Error::InvalidInput("factor has a pole at the trivial character".into()));
        }
        (PowerSeries { coeffs: num.coeffs[1..].to_vec() }, PowerSeries { coeffs: den.coeffs[1..].to_vec() })
    } else {
        (num.truncate(order), den.truncate(order))
    };
    Ok(num.times(&den.inv()?))
}

// ---------------------------------------------------------------------------
// Operator series

/// `coeff * prod_rho factor_rho(x_rho)`; a missing factor is `1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm<C> {
    pub coeff: C,
    pub factors: Vec<Option<PowerSeries<C>>>,
}

/// A truncated power series in one variable per facet, kept in product form.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSeries<C> {
    pub nvars: usize,
    pub order: usize,
    /// The value is multiplied by `(1+y)^y_shift` after application.
    pub y_shift: i64,
    pub terms: Vec<ProductTerm<C>>,
}

impl<C: OpRing> OperatorSeries<C> {
    pub fn identity(nvars: usize, order: usize) -> Self {
        OperatorSeries { nvars, order, y_shift: 0, terms: vec![ProductTerm { coeff: C::unit(), factors: vec![None; nvars] }] }
    }

    /// `sum_alpha c_alpha (d/dh)^alpha Q |_{h=0}`, before the `y` shift.
    pub fn apply_raw(&self, q: &MPoly<Rat>) -> Result<C> {
        if q.degree() > self.order {
            return Err(Error::OrderExceeded { requested: q.degree() as i64, available: self.order as i64 });
        }
        let mut total = C::nil();
        for (alpha, qa) in q.terms() {
            let mut weight = qa.clone();
            for &k in alpha {
                weight *= rbig(&factorial(k as usize));
            }
            let mut acc = C::nil();
            'term: for t in &self.terms {
                let mut prod = t.coeff.clone();
                for (rho, &k) in alpha.iter().enumerate() {
                    match &t.factors[rho] {
                        Some(s) => prod = prod.times(&s.coeffs[k as usize]),
                        None if k == 0 => {}
                        None => continue 'term,
                    }
                }
                acc = acc.plus(&prod);
            }
            total = total.plus(&acc.scaled_by(&weight));
        }
        Ok(total)
    }

    /// Applies the operator and then the `(1+y)` shift.
    pub fn apply(&self, q: &MPoly<Rat>, y: &C) -> Result<C> {
        C::shift(self.apply_raw(q)?, y, self.y_shift)
    }

    /// The operator as an explicit polynomial truncated at `order`.
    pub fn expand(&self) -> MPoly<C> {
        let mut out = MPoly::zero(self.nvars);
        for t in &self.terms {
            let mut p = MPoly::constant(self.nvars, t.coeff.clone());
            for (rho, f) in t.factors.iter().enumerate() {
                if let Some(s) = f {
                    let mut u = MPoly::zero(self.nvars);
                    for (k, c) in s.coeffs.iter().enumerate().take(self.order + 1) {
                        let mut e = vec![0u32; self.nvars];
                        e[rho] = k as u32;
                        u.add_term(e, c.clone());
                    }
                    p = p.mul_trunc(&u, self.order);
                }
            }
            out = out.plus(&p);
        }
        out
    }

    /// Multiplies every term by `e^{d_rho x_rho}` for each facet.
    pub fn twisted(mut self, d: &[Rat]) -> Self {
        for t in &mut self.terms {
            for (rho, dr) in d.iter().enumerate() {
                if dr.is_zero() {
                    continue;
                }
                let e = PowerSeries::exp(&C::from_rat(dr), self.order);
                t.factors[rho] = Some(match &t.factors[rho] {
                    Some(s) => s.times(&e),
                    None => e,
                });
            }
        }
        self
    }
}

/// How factors are built: `y`, the stretch, and the truncation order.
#[derive(Clone, Debug)]
pub struct FactorConfig<C> {
    pub order: usize,
    pub y: C,
    pub stretch: C,
}

impl<C: OpRing> FactorConfig<C> {
    pub fn plain(order: usize) -> Self {
        FactorConfig { order, y: C::nil(), stretch: C::unit() }
    }
}

/// `sum_{g} coeff * prod_{rho in vars} kind_rho(a_rho(g), scale_rho x_rho)`.
#[allow(clippy::too_many_arguments)]
fn group_terms<C: OpRing>(
    nvars: usize,
    group: &[Vec<Rat>],
    vars: &[usize],
    kinds: &[Factor],
    scales: &[i64],
    prefix: &[usize],
    coeff: C,
    cfg: &FactorConfig<C>,
) -> Result<Vec<ProductTerm<C>>> {
    let mut cache: HashMap<(usize, Rat), PowerSeries<C>> = HashMap::new();
    let mut terms = Vec::new();
    for g in group {
        let mut factors: Vec<Option<PowerSeries<C>>> = vec![None; nvars];
        for &rho in prefix {
            factors[rho] = Some(PowerSeries::x(cfg.order));
        }
        for (i, &rho) in vars.iter().enumerate() {
            let key = (i, g[i].clone());
            let s = match cache.get(&key) {
                Some(s) => s.clone(),
                None => {
                    let a = phase_of::<C>(&g[i])?;
                    let s = factor_series(kinds[i], &a, &cfg.y, &cfg.stretch, cfg.order)?
                        .rescale_var(&C::from_rat(&ri(scales[i])));
                    cache.insert(key, s.clone());
                    s
                }
            };
            factors[rho] = Some(match factors[rho].take() {
                Some(p) => p.times(&s),
                None => s,
            });
        }
        terms.push(ProductTerm { coeff: coeff.clone(), factors });
    }
    Ok(terms)
}

/// Operators built from the whole fan and `G_Sigma`.
pub fn global_operator<C: OpRing>(p: &Polytope, kinds: &[Factor], cfg: &FactorConfig<C>) -> Result<OperatorSeries<C>> {
    require_simple(p)?;
    let r = p.num_facets();
    let fan = NormalFan::of(p);
    let group = fan.group();
    let vars: Vec<usize> = (0..r).collect();
    let terms = group_terms(r, &group, &vars, kinds, &vec![1; r], &[], C::unit(), cfg)?;
    Ok(OperatorSeries { nvars: r, order: cfg.order, y_shift: 0, terms })
}

/// `mult(sigma_E) prod_{rho in sigma_E} x_rho * sum_{G_Star} prod_{Star} kind(k_rho x_rho)`.
pub fn face_operator<C: OpRing>(p: &Polytope, face: usize, kind: Factor, cfg: &FactorConfig<C>) -> Result<OperatorSeries<C>> {
    require_simple(p)?;
    check_face(p, face)?;
    let r = p.num_facets();
    let fan = NormalFan::of(p);
    let star = star_fan(p, face);
    let group = star.group();
    let mult = Rat::from_integer(fan.multiplicity(face));
    let kinds = vec![kind; star.facets.len()];
    let terms = group_terms(r, &group, &star.facets, &kinds, &star.scale, &fan.cones[face], C::from_rat(&mult), cfg)?;
    Ok(OperatorSeries { nvars: r, order: cfg.order, y_shift: 0, terms })
}

pub fn todd_operator<C: OpRing>(p: &Polytope, order: usize) -> Result<OperatorSeries<C>> {
    global_operator(p, &vec![Factor::Todd; p.num_facets()], &FactorConfig::plain(order))
}

pub fn dual_todd_operator<C: OpRing>(p: &Polytope, order: usize) -> Result<OperatorSeries<C>> {
    global_operator(p, &vec![Factor::Dual; p.num_facets()], &FactorConfig::plain(order))
}

/// `Todd^K`: dual factors on the removed facets.
pub fn facets_removed_operator<C: OpRing>(p: &Polytope, removed: &[usize], order: usize) -> Result<OperatorSeries<C>> {
    check_facets(p, removed)?;
    let kinds: Vec<Factor> =
        (0..p.num_facets()).map(|i| if removed.contains(&i) { Factor::Dual } else { Factor::Todd }).collect();
    global_operator(p, &kinds, &FactorConfig::plain(order))
}

/// `T_y^K` (plain `T_y` for empty `K`), prefactor `(1+y)^{n-r}`.
pub fn hirzebruch_operator<C: OpRing>(p: &Polytope, removed: &[usize], y: C, order: usize) -> Result<OperatorSeries<C>> {
    check_facets(p, removed)?;
    let kinds: Vec<Factor> = (0..p.num_facets())
        .map(|i| if removed.contains(&i) { Factor::HirzebruchRemoved } else { Factor::Hirzebruch })
        .collect();
    let cfg = FactorConfig { order, y, stretch: C::unit() };
    let mut op = global_operator(p, &kinds, &cfg)?;
    op.y_shift = p.dim() as i64 - p.num_facets() as i64;
    Ok(op)
}

/// `T̂_y^K`: `x -> (1+y) x` inside the exponentials, no prefactor; sampled `y` only.
pub fn renormalized_hirzebruch_operator<C: OpRing>(p: &Polytope, removed: &[usize], y: C, order: usize) -> Result<OperatorSeries<C>> {
    check_facets(p, removed)?;
    let kinds: Vec<Factor> = (0..p.num_facets())
        .map(|i| if removed.contains(&i) { Factor::HirzebruchRemoved } else { Factor::Hirzebruch })
        .collect();
    let stretch = C::unit().plus(&y);
    if stretch.try_inv().is_none() {
        return Err(Error::InvalidInput("the renormalized operator needs 1 + y invertible".into()));
    }
    let cfg = FactorConfig { order, y, stretch };
    global_operator(p, &kinds, &cfg)
}

/// `T_y^E` with prefactor `(1+y)^{dim E - |Star(1)|}`.
pub fn weighted_face_operator<C: OpRing>(p: &Polytope, face: usize, y: C, order: usize) -> Result<OperatorSeries<C>> {
    let cfg = FactorConfig { order, y, stretch: C::unit() };
    let mut op = face_operator(p, face, Factor::Hirzebruch, &cfg)?;
    let star = star_fan(p, face);
    op.y_shift = p.face(face).dim as i64 - star.facets.len() as i64;
    Ok(op)
}

/// `e^{sum d_rho x_rho} T_y` with `d = D' - D_P`.
pub fn minkowski_operator<C: OpRing>(p: &Polytope, d_prime: &[Rat], y: C, order: usize) -> Result<OperatorSeries<C>> {
    if d_prime.len() != p.num_facets() {
        return Err(Error::InvalidInput(format!("divisor has {} entries for {} facets", d_prime.len(), p.num_facets())));
    }
    let d: Vec<Rat> = d_prime.iter().zip(p.facets()).map(|(a, h)| a - &h.offset).collect();
    Ok(hirzebruch_operator(p, &[], y, order)?.twisted(&d))
}

/// Per-face operators of the face-integral form: for each face `E`,
/// `(1/mult) sum_{g in G°_{sigma_E}} prod_{rho not in sigma_E} td(x_rho) prod_{rho in sigma_E} 1/(1 - a_rho(g) e^{-x_rho})`.
pub fn guillemin_operators<C: OpRing>(p: &Polytope, order: usize) -> Result<Vec<(usize, OperatorSeries<C>)>> {
    require_simple(p)?;
    let r = p.num_facets();
    let fan = NormalFan::of(p);
    let cfg = FactorConfig::plain(order);
    let mut out = Vec::new();
    for (fi, cone) in fan.cones.iter().enumerate() {
        let gens = fan.cone_generators(cone);
        let prim = group_data(&gens, p.dim())?.primitive_elements();
        if prim.is_empty() {
            continue;
        }
        let mult = Rat::from_integer(fan.multiplicity(fi));
        let vars: Vec<usize> = (0..r).collect();
        let kinds: Vec<Factor> =
            (0..r).map(|i| if cone.contains(&i) { Factor::GuilleminInner } else { Factor::Todd }).collect();
        let group: Vec<Vec<Rat>> = prim
            .iter()
            .map(|g| {
                let mut ch = vec![Rat::zero(); r];
                for (&rho, x) in cone.iter().zip(g) {
                    ch[rho] = x.clone();
                }
                ch
            })
            .collect();
        let terms = group_terms(r, &group, &vars, &kinds, &vec![1; r], &[], C::from_rat(&mult.recip()), &cfg)?;
        out.push((fi, OperatorSeries { nvars: r, order, y_shift: 0, terms }));
    }
    Ok(out)
}

fn require_simple(p: &Polytope) -> Result<()> {
    if p.is_simple() {
        Ok(())
    } else {
        Err(Error::NotSimple)
    }
}

fn check_face(p: &Polytope, face: usize) -> Result<()> {
    if face < p.faces().len() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("unknown face {face}; the polytope has {} faces", p.faces().len())))
    }
}

fn check_facets(p: &Polytope, fs: &[usize]) -> Result<()> {
    match fs.iter().find(|&&i| i >= p.num_facets()) {
        Some(i) => Err(Error::InvalidInput(format!("unknown facet {i}"))),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// Dilation polynomials

/// The family `P_y(h)` of a simple polytope: every vertex moves affinely,
/// `v(y, h) = (1+y) v - sum_i h_{sigma_i} m'_i`.
pub struct DilationFamily<'a> {
    p: &'a Polytope,
    moves: Vec<Vec<(usize, RVec)>>,
    charts: Vec<FaceChart>,
    simplices: Vec<Vec<Vec<usize>>>,
}

impl<'a> DilationFamily<'a> {
    pub fn new(p: &'a Polytope) -> Result<Self> {
        require_simple(p)?;
        let mut moves = Vec::new();
        for v in 0..p.vertices().len() {
            let fs = p.vertex_facets(v);
            let gens: Vec<IVec> = fs.iter().map(|&i| p.facets()[i].normal.clone()).collect();
            let dual = dual_basis(&gens)?;
            moves.push(fs.iter().copied().zip(dual).collect());
        }
        let charts = (0..p.faces().len()).map(|f| p.face_chart(f)).collect();
        let simplices = (0..p.faces().len()).map(|f| p.triangulate_face(f)).collect();
        Ok(DilationFamily { p, moves, charts, simplices })
    }

    pub fn positions(&self, y: &Rat, h: &[Rat]) -> Vec<RVec> {
        let k = Rat::one() + y;
        self.p
            .vertices()
            .iter()
            .zip(&self.moves)
            .map(|(v, mv)| {
                let mut w: RVec = v.iter().map(|x| x * &k).collect();
                for (i, m) in mv {
                    if h[*i].is_zero() {
                        continue;
                    }
                    for (a, b) in w.iter_mut().zip(m) {
                        *a -= &h[*i] * b;
                    }
                }
                w
            })
            .collect()
    }

    /// Largest `2^-k` such that every `h >= 0` with `|h|_1 <= step * degree`
    /// keeps each vertex strictly inside its non-incident facets.
    pub fn grid_step(&self, y: &Rat, degree: usize) -> Result<Rat> {
        let k = Rat::one() + y;
        if !k.is_positive() {
            return Err(Error::InvalidInput("dilation needs y > -1".into()));
        }
        let reach = ri(degree.max(1) as i64);
        let mut step = Rat::one();
        for (v, mv) in self.p.vertices().iter().zip(&self.moves) {
            for (j, h) in self.p.facets().iter().enumerate() {
                if mv.iter().any(|(i, _)| *i == j) {
                    continue;
                }
                let slack = &k * h.eval(v);
                let mut worst = Rat::zero();
                for (_, m) in mv {
                    let g = -dot_ri(m, &h.normal);
                    if g < worst {
                        worst = g;
                    }
                }
                if worst.is_zero() {
                    continue;
                }
                let mut tries = 0;
                while !(&slack + &step * &reach * &worst).is_positive() {
                    step /= ri(2);
                    tries += 1;
                    if tries > 200 {
                        return Err(Error::GridTypeChange("2^200".into()));
                    }
                }
            }
        }
        Ok(step)
    }

    /// `int_{E(y,h)} f` for each listed face, at given vertex positions.
    pub fn face_integrals(&self, positions: &[RVec], f: &MPoly<Rat>, faces: &[usize]) -> Vec<Rat> {
        faces.iter().map(|&e| integrate_simplices(&self.charts[e], &self.simplices[e], positions, f)).collect()
    }

    /// `int_{E_y(h)} f dm` as polynomials in `h`, for the listed faces.
    pub fn polynomials(&self, f: &MPoly<Rat>, y: &Rat, faces: &[usize]) -> Result<Vec<MPoly<Rat>>> {
        let degree = self.p.dim() + f.degree();
        let step = self.grid_step(y, degree)?;
        interpolate_simplex_grid_many(self.p.num_facets(), degree, &step, faces.len(), |h| {
            let pos = self.positions(y, h);
            Ok(self.face_integrals(&pos, f, faces))
        })
    }
}

/// `int_{P_y(h)} f dm` as a polynomial in `h` (one variable per facet).
pub fn integral_h_polynomial(p: &Polytope, f: &MPoly<Rat>, y: Option<&Rat>) -> Result<MPoly<Rat>> {
    let fam = DilationFamily::new(p)?;
    let y = y.cloned().unwrap_or_else(Rat::zero);
    Ok(fam.polynomials(f, &y, &[p.whole_face()])?.remove(0))
}

/// `int_{E_y(h)} f dm` for every face `E`, indexed like `p.faces()`.
pub fn face_integral_h_polynomials(p: &Polytope, f: &MPoly<Rat>, y: Option<&Rat>) -> Result<Vec<MPoly<Rat>>> {
    let fam = DilationFamily::new(p)?;
    let y = y.cloned().unwrap_or_else(Rat::zero);
    let all: Vec<usize> = (0..p.faces().len()).collect();
    fam.polynomials(f, &y, &all)
}

// ---------------------------------------------------------------------------
// Face reduction: operators in h turned into face operators in d/dm

/// Rewrites `(d/dh)^beta int_{E(h)} g` at `h = 0` as `sum_{E'} int_{E'} R_{E'}(d/dm) g`.
///
/// Derivatives along star rays move to the facet `E ∩ F_rho` with factor
/// `mult(sigma_E) / mult(sigma_{E'})`. A derivative along a ray of `sigma_E`
/// is traded through translation by `m` in the span of `sigma_E` with
/// `<m, u_rho> = 1` and `<m, u_rho'> = 0` on the other rays of `sigma_E`.
pub struct FaceReduction<'a> {
    p: &'a Polytope,
    normals: Vec<IVec>,
    mults: Vec<Rat>,
    memo: HashMap<(usize, Vec<u32>), BTreeMap<usize, MPoly<Rat>>>,
}

impl<'a> FaceReduction<'a> {
    pub fn new(p: &'a Polytope) -> Result<Self> {
        require_simple(p)?;
        let fan = NormalFan::of(p);
        let mults = (0..p.faces().len()).map(|f| Rat::from_integer(fan.multiplicity(f))).collect();
        Ok(FaceReduction { p, normals: fan.rays, mults, memo: HashMap::new() })
    }

    fn translation(&self, face: usize, rho: usize) -> RVec {
        let cone = &self.p.face(face).facets;
        let us: Vec<RVec> = cone.iter().map(|&r| to_rat_vec(&self.normals[r])).collect();
        let gram: Vec<RVec> = us.iter().map(|a| us.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect()).collect();
        let rhs: RVec = cone.iter().map(|&r| if r == rho { Rat::one() } else { Rat::zero() }).collect();
        let c = solve(&gram, &rhs).expect("independent normals");
        let n = self.p.dim();
        (0..n).map(|j| us.iter().zip(&c).map(|(u, ci)| &u[j] * ci).sum()).collect()
    }

    pub fn reduce(&mut self, face: usize, beta: &[u32]) -> BTreeMap<usize, MPoly<Rat>> {
        let n = self.p.dim();
        if beta.iter().all(|&b| b == 0) {
            return BTreeMap::from([(face, MPoly::constant(n, Rat::one()))]);
        }
        let key = (face, beta.to_vec());
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let cone = self.p.face(face).facets.clone();
        let mut out: BTreeMap<usize, MPoly<Rat>> = BTreeMap::new();
        let outside = (0..beta.len()).find(|&r| beta[r] > 0 && !cone.contains(&r));
        if let Some(rho) = outside {
            let mut facets = cone.clone();
            facets.push(rho);
            facets.sort();
            if let Some(sub) = self.p.face_with_facets(&facets) {
                let factor = &self.mults[face] / &self.mults[sub];
                let mut b = beta.to_vec();
                b[rho] -= 1;
                for (e, q) in self.reduce(sub, &b) {
                    add_into(&mut out, e, q.scale(&factor));
                }
            }
        } else {
            let rho = (0..beta.len()).find(|&r| beta[r] > 0).expect("nonzero beta");
            let m = self.translation(face, rho);
            let mut rest = beta.to_vec();
            rest[rho] -= 1;
            let star: Vec<usize> = (0..self.p.num_facets())
                .filter(|r| !cone.contains(r))
                .filter(|&r| {
                    let mut fs = cone.clone();
                    fs.push(r);
                    fs.sort();
                    self.p.face_with_facets(&fs).is_some()
                })
                .collect();
            for r2 in star {
                let c = dot_ri(&m, &self.normals[r2]);
                if c.is_zero() {
                    continue;
                }
                let mut b = rest.clone();
                b[r2] += 1;
                for (e, q) in self.reduce(face, &b) {
                    add_into(&mut out, e, q.scale(&-c.clone()));
                }
            }
            let tm = MPoly::affine(&m, Rat::zero());
            for (e, q) in self.reduce(face, &rest) {
                add_into(&mut out, e, q.times(&tm).scale(&-Rat::one()));
            }
        }
        out.retain(|_, q| !q.is_zero());
        self.memo.insert(key, out.clone());
        out
    }
}

fn add_into(map: &mut BTreeMap<usize, MPoly<Rat>>, e: usize, q: MPoly<Rat>) {
    let slot = map.entry(e).or_insert_with(|| MPoly::zero(q.nvars));
    *slot = slot.plus(&q);
}

/// The face operators `p_E(d/dm)` with `sum_E int_E p_E(d/dm) f = op(d/dh) int_{P(h)} f`.
pub fn face_operators<C: OpRing>(p: &Polytope, op: &OperatorSeries<C>) -> Result<Vec<MPoly<C>>> {
    let n = p.dim();
    let mut red = FaceReduction::new(p)?;
    let mut out: Vec<MPoly<C>> = vec![MPoly::zero(n); p.faces().len()];
    let whole = p.whole_face();
    for (alpha, c) in op.expand().terms() {
        for (e, q) in red.reduce(whole, alpha) {
            let qc: MPoly<C> = q.map(|r| C::from_rat(r)).scale(c);
            out[e] = out[e].plus(&qc);
        }
    }
    Ok(out)
}

/// `p(d/dm) f` for a constant-coefficient operator `p`.
fn apply_differential<C: OpRing>(p: &MPoly<C>, f: &MPoly<Rat>) -> Vec<(MPoly<Rat>, C)> {
    let mut out = Vec::new();
    for (beta, c) in p.terms() {
        let mut g = f.clone();
        for (i, &k) in beta.iter().enumerate() {
            for _ in 0..k {
                g = g.derivative(i);
            }
        }
        if !g.is_zero() {
            out.push((g, c.clone()));
        }
    }
    out
}

/// Constant terms `r_E = p_E(0)` of the face operators of the Todd operator.
pub fn pick_coefficients<C: OpRing>(p: &Polytope) -> Result<Vec<C>> {
    let op = todd_operator::<C>(p, p.dim())?;
    let ops = face_operators(p, &op)?;
    Ok(ops.iter().map(|q| q.coeff(&vec![0; p.dim()])).collect())
}

// ---------------------------------------------------------------------------
// Identities

/// Which identity `em_verify` checks.
#[derive(Clone, Debug, PartialEq)]
pub enum Identity {
    /// `Todd(d/dh) int_{P(h)} f = sum_{P ∩ M} f`.
    Embv,
    /// Dual Todd against the interior.
    Dual,
    /// `Todd^K` against `P` with the facets `K` removed.
    FacetsRemoved(Vec<usize>),
    /// `Todd_E` against the closed face.
    FaceClosed(usize),
    /// `Todd^vee_E` against the relative interior of the face.
    FaceRelint(usize),
    /// `T_y` against `sum_E (1+y)^{dim E} sum_{Relint E} f`.
    Weighted,
    /// `T̂_y` on `P_y(h)` against `f((1+y) m)`; sampled `y`.
    WeightedRenormalized,
    /// `T_y^K`.
    WeightedFacetsRemoved(Vec<usize>),
    /// `T_y^E`.
    WeightedFace(usize),
    /// `e^{sum d_rho x_rho} T_y` for the nef divisor with the given offsets.
    Minkowski(Vec<Rat>),
    /// Per-face operators applied to the face integrals.
    Guillemin,
    /// `int_P d_{m0} f = -sum <m0,u_rho> int_{F_rho} f`.
    Stokes(IVec),
    /// `sum_E int_E p_E(d/dm) f = sum_{P ∩ M} f` via the face reduction.
    Pick,
    /// `sum_v (p_v(d/dm) f)(0) = f(0)`.
    VertexSpecialization,
}

impl Identity {
    pub fn name(&self) -> String {
        let list = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Identity::Embv => "embv".into(),
            Identity::Dual => "dual".into(),
            Identity::FacetsRemoved(k) => format!("facets-removed[{}]", list(k)),
            Identity::FaceClosed(e) => format!("face-closed[{e}]"),
            Identity::FaceRelint(e) => format!("face-relint[{e}]"),
            Identity::Weighted => "weighted".into(),
            Identity::WeightedRenormalized => "weighted-renormalized".into(),
            Identity::WeightedFacetsRemoved(k) => format!("weighted-facets-removed[{}]", list(k)),
            Identity::WeightedFace(e) => format!("weighted-face[{e}]"),
            Identity::Minkowski(d) => {
                format!("minkowski[{}]", d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
            Identity::Guillemin => "guillemin".into(),
            Identity::Stokes(m) => {
                format!("stokes[{}]", m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
            Identity::Pick => "pick".into(),
            Identity::VertexSpecialization => "vertex-spec".into(),
        }
    }

    fn is_weighted(&self) -> bool {
        matches!(
            self,
            Identity::Weighted
                | Identity::WeightedRenormalized
                | Identity::WeightedFacetsRemoved(_)
                | Identity::WeightedFace(_)
                | Identity::Minkowski(_)
        )
    }
}

/// Settings for `em_verify`.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub backend: Backend,
    /// `None` keeps `y` symbolic (exact backend only).
    pub y: Option<Rat>,
    /// Truncation order; defaults to `n + deg f`.
    pub order: Option<usize>,
    pub tolerance: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { backend: Backend::Exact, y: None, order: None, tolerance: DEFAULT_TOLERANCE }
    }
}

impl Params {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn complex() -> Self {
        Params { backend: Backend::Complex, ..Self::default() }
    }

    pub fn with_y(mut self, y: Rat) -> Self {
        self.y = Some(y);
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = Some(order);
        self
    }
}

/// Checks several identities for one `(P, f)`, computing each dilation
/// polynomial at most once.
pub struct EmSession<'a> {
    p: &'a Polytope,
    f: &'a MPoly<Rat>,
    whole: HashMap<Rat, MPoly<Rat>>,
    faces: Option<Vec<MPoly<Rat>>>,
}

impl<'a> EmSession<'a> {
    pub fn new(p: &'a Polytope, f: &'a MPoly<Rat>) -> Result<Self> {
        if f.nvars != p.dim() {
            return Err(Error::InvalidInput(format!("f has {} variables, the polytope dimension is {}", f.nvars, p.dim())));
        }
        require_simple(p)?;
        Ok(EmSession { p, f, whole: HashMap::new(), faces: None })
    }

    fn all(&mut self) -> Result<&[MPoly<Rat>]> {
        if self.faces.is_none() {
            self.faces = Some(face_integral_h_polynomials(self.p, self.f, None)?);
        }
        Ok(self.faces.as_deref().expect("computed"))
    }

    /// `int_{P_y(h)} f dm`.
    fn whole(&mut self, y: &Rat) -> Result<MPoly<Rat>> {
        if y.is_zero() {
            if let Some(fs) = &self.faces {
                return Ok(fs[self.p.whole_face()].clone());
            }
        }
        if let Some(q) = self.whole.get(y) {
            return Ok(q.clone());
        }
        let q = integral_h_polynomial(self.p, self.f, Some(y))?;
        self.whole.insert(y.clone(), q.clone());
        Ok(q)
    }

    /// Checks one identity.
    pub fn verify(&mut self, id: &Identity, params: &Params) -> Result<EMReport> {
        let (p, f) = (self.p, self.f);
        if let Identity::Stokes(m0) = id {
            return stokes_verify(p, f, m0);
        }
        if !p.is_lattice() {
            return Err(Error::InvalidInput("Euler-Maclaurin identities need a lattice polytope".into()));
        }
        match id {
            Identity::FaceClosed(e) | Identity::FaceRelint(e) | Identity::WeightedFace(e) => check_face(p, *e)?,
            Identity::FacetsRemoved(k) | Identity::WeightedFacetsRemoved(k) => check_facets(p, k)?,
            _ => {}
        }
        let order = params.order.unwrap_or(p.dim() + f.degree());
        let name = id.name();
        let weighted = id.is_weighted();
        if let Some(y) = &params.y {
            if weighted && (Rat::one() + y).is_zero() && (params.backend == Backend::Complex || *id == Identity::WeightedRenormalized) {
                return Err(Error::InvalidInput("y = -1 is excluded; use chi_y_polynomial for that limit".into()));
            }
        }
        let lattice = lattice_side(p, f, id, params.y.as_ref())?;
        match params.backend {
            Backend::Exact => match (&params.y, weighted) {
                (None, true) => {
                    let op = operator_side::<YPoly>(self, id, YPoly::y(), None, order)?;
                    Ok(EMReport::exact(name, Value::Polynomial(op), Value::Polynomial(lattice)))
                }
                (y, _) => {
                    let yr = y.clone().unwrap_or_else(Rat::zero);
                    let op = operator_side::<Rat>(self, id, yr.clone(), Some(&yr), order)?;
                    Ok(EMReport::exact(name, Value::Rational(op), Value::Rational(lattice.eval(&yr))))
                }
            },
            Backend::Complex => {
                let yr = params.y.clone().unwrap_or_else(Rat::zero);
                let yc = Complex64::new(to_f64(&yr), 0.0);
                let op = operator_side::<Complex64>(self, id, yc, Some(&yr), order)?;
                EMReport::approximate(name, op, Value::Rational(lattice.eval(&yr)), params.tolerance)
            }
        }
    }
}

fn operator_side<C: OpRing>(ints: &mut EmSession, id: &Identity, y: C, y_rat: Option<&Rat>, order: usize) -> Result<C> {
    let (p, f) = (ints.p, ints.f);
    let zero = Rat::zero();
    let apply = |op: OperatorSeries<C>, q: &MPoly<Rat>| op.apply(q, &y);
    match id {
        Identity::Embv => apply(todd_operator(p, order)?, &ints.whole(&zero)?),
        Identity::Dual => apply(dual_todd_operator(p, order)?, &ints.whole(&zero)?),
        Identity::FacetsRemoved(k) => apply(facets_removed_operator(p, k, order)?, &ints.whole(&zero)?),
        Identity::FaceClosed(e) => apply(face_operator(p, *e, Factor::Todd, &FactorConfig::plain(order))?, &ints.whole(&zero)?),
        Identity::FaceRelint(e) => apply(face_operator(p, *e, Factor::Dual, &FactorConfig::plain(order))?, &ints.whole(&zero)?),
        Identity::Weighted => apply(hirzebruch_operator(p, &[], y.clone(), order)?, &ints.whole(&zero)?),
        Identity::WeightedFacetsRemoved(k) => apply(hirzebruch_operator(p, k, y.clone(), order)?, &ints.whole(&zero)?),
        Identity::WeightedFace(e) => apply(weighted_face_operator(p, *e, y.clone(), order)?, &ints.whole(&zero)?),
        Identity::Minkowski(d) => apply(minkowski_operator(p, d, y.clone(), order)?, &ints.whole(&zero)?),
        Identity::WeightedRenormalized => {
            let yr = y_rat.ok_or_else(|| Error::Unsupported("the renormalized operator needs a sampled y".into()))?;
            let q = ints.whole(yr)?;
            apply(renormalized_hirzebruch_operator(p, &[], y.clone(), order)?, &q)
        }
        Identity::Guillemin => {
            let ops = guillemin_operators::<C>(p, order)?;
            let qs = ints.all()?;
            let mut total = C::nil();
            for (e, op) in ops {
                total = total.plus(&op.apply(&qs[e], &y)?);
            }
            Ok(total)
        }
        Identity::Pick => {
            let ops = face_operators(p, &todd_operator::<C>(p, order)?)?;
            let mut total = C::nil();
            for (e, q) in ops.iter().enumerate() {
                for (g, c) in apply_differential(q, f) {
                    total = total.plus(&c.scaled_by(&p.integrate(e, &g)));
                }
            }
            Ok(total)
        }
        Identity::VertexSpecialization => {
            let ops = face_operators(p, &todd_operator::<C>(p, order)?)?;
            let origin = vec![Rat::zero(); p.dim()];
            let mut total = C::nil();
            for v in 0..p.vertices().len() {
                for (g, c) in apply_differential(&ops[p.vertex_face(v)], f) {
                    total = total.plus(&c.scaled_by(&g.eval(&origin)));
                }
            }
            Ok(total)
        }
        Identity::Stokes(_) => unreachable!("handled separately"),
    }
}

/// Lattice side as a polynomial in `y` (constant for unweighted identities).
fn lattice_side(p: &Polytope, f: &MPoly<Rat>, id: &Identity, y: Option<&Rat>) -> Result<YPoly> {
    let flat = |pts: Vec<IVec>| YPoly::constant(oracle::sum_f(&pts, f));
    Ok(match id {
        Identity::Embv | Identity::Guillemin | Identity::Pick => flat(oracle::points(p)?),
        Identity::Dual => flat(oracle::interior_points(p)?),
        Identity::FacetsRemoved(k) => flat(oracle::points_removed(p, k)?),
        Identity::FaceClosed(e) => flat(oracle::face_points(p, &p.face(*e).facets, false)?),
        Identity::FaceRelint(e) => flat(oracle::face_points(p, &p.face(*e).facets, true)?),
        Identity::Weighted => oracle::weighted_face_sum(p, f)?,
        Identity::WeightedFacetsRemoved(k) => oracle::weighted_face_sum_filtered(p, f, k, &[])?,
        Identity::WeightedFace(e) => oracle::weighted_face_sum_filtered(p, f, &[], &p.face(*e).facets)?,
        Identity::WeightedRenormalized => {
            let yr = y.ok_or_else(|| Error::Unsupported("the renormalized identity needs a sampled y".into()))?;
            let k = Rat::one() + yr;
            let subs: Vec<MPoly<Rat>> = (0..p.dim())
                .map(|i| {
                    let mut c = vec![Rat::zero(); p.dim()];
                    c[i] = k.clone();
                    MPoly::affine(&c, Rat::zero())
                })
                .collect();
            oracle::weighted_face_sum(p, &f.compose(&subs))?
        }
        Identity::Minkowski(d) => {
            let data = fibration_multiplicities(p, d)?;
            let pts = fibration_relint_points(&data);
            let mut total = YPoly::zero();
            for (face, pts) in data.faces.iter().zip(pts) {
                let mut w = YPoly::zero();
                for (l, &c) in face.d.iter().enumerate() {
                    let sign = if l % 2 == 0 { ri(c as i64) } else { ri(-(c as i64)) };
                    w = &w + &YPoly::one_plus_y_pow(l + face.dim).scale(&sign);
                }
                total = &total + &w.scale(&oracle::sum_f(&pts, f));
            }
            total
        }
        Identity::VertexSpecialization => YPoly::constant(f.eval(&vec![Rat::zero(); p.dim()])),
        Identity::Stokes(_) => unreachable!("handled separately"),
    })
}

/// `int_P d_{m0} f` against `-sum_rho <m0, u_rho> int_{F_rho} f`, exactly.
pub fn stokes_verify(p: &Polytope, f: &MPoly<Rat>, m0: &[i64]) -> Result<EMReport> {
    if m0.len() != p.dim() {
        return Err(Error::InvalidInput("direction has the wrong dimension".into()));
    }
    let mut df = MPoly::zero(p.dim());
    for (i, &c) in m0.iter().enumerate() {
        df = df.plus(&f.derivative(i).scale(&ri(c)));
    }
    let lhs = p.integrate_polynomial(&df);
    let mut rhs = Rat::zero();
    for (rho, h) in p.facets().iter().enumerate() {
        let c: i64 = h.normal.iter().zip(m0).map(|(a, b)| a * b).sum();
        if c != 0 {
            rhs -= ri(c) * p.integrate(p.facet_face(rho), f);
        }
    }
    Ok(EMReport::exact(Identity::Stokes(m0.to_vec()).name(), Value::Rational(lhs), Value::Rational(rhs)))
}

/// Checks one Euler–Maclaurin identity for a polynomial `f`.
pub fn em_verify(p: &Polytope, f: &MPoly<Rat>, id: &Identity, params: &Params) -> Result<EMReport> {
    EmSession::new(p, f)?.verify(id, params)
}

// ---------------------------------------------------------------------------
// Tangent-cone (local) identities with exponential targets

/// Local identity kinds at a vertex.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalKind {
    Todd,
    Dual,
    /// Facet indices of the polytope; they must contain the vertex.
    FacetsRemoved(Vec<usize>),
    Weighted(Rat),
}

impl LocalKind {
    pub fn name(&self) -> String {
        match self {
            LocalKind::Todd => "todd".into(),
            LocalKind::Dual => "dual".into(),
            LocalKind::FacetsRemoved(k) => {
                format!("facets-removed[{}]", k.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
            }
            LocalKind::Weighted(y) => format!("weighted[y={y}]"),
        }
    }
}

const LOCAL_ORDERS: (usize, usize) = (48, 96);
const LOCAL_HALVINGS: usize = 10;

fn eval_series(s: &PowerSeries<Complex64>, x: f64, order: usize) -> Complex64 {
    s.coeffs.iter().take(order + 1).rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// `op(d/dh) int_{Tan(P,v)(h)} e^{<m,z>} dm` against `e^{<v,z>}` times the
/// local lattice sum, at `z = scale * direction` with `-z` interior to `sigma_v`.
///
/// The operator is evaluated as truncated power series at `x_i = -<m'_i, z>`;
/// when two truncations disagree the scale is halved, up to a fixed floor.
pub fn local_em_verify(p: &Polytope, v: usize, kind: &LocalKind, direction: &[Rat], scale: &Rat, tol: f64) -> Result<EMReport> {
    require_simple(p)?;
    if !p.is_lattice() {
        return Err(Error::InvalidInput("local identities need a lattice polytope".into()));
    }
    if v >= p.vertices().len() {
        return Err(Error::InvalidInput(format!("unknown vertex {v}")));
    }
    let n = p.dim();
    if direction.len() != n || !scale.is_positive() {
        return Err(Error::InvalidInput("direction must have the polytope dimension and scale must be positive".into()));
    }
    let facets = p.vertex_facets(v).to_vec();
    let gens: Vec<IVec> = facets.iter().map(|&i| p.facets()[i].normal.clone()).collect();
    // -z = sum lambda_i u_i must have every lambda_i > 0.
    let cols: Vec<RVec> = (0..n).map(|j| gens.iter().map(|g| ri(g[j])).collect()).collect();
    let lam = crate::arith::matrix::mat_vec(&inverse(&cols)?, &direction.iter().map(|x| -x).collect::<RVec>());
    if lam.iter().any(|l| !l.is_positive()) {
        return Err(Error::InvalidInput("-z is not in the interior of the vertex cone".into()));
    }
    let dual = dual_basis(&gens)?;
    let mult = crate::fan::cone_multiplicity(&gens, n);
    let group = group_data(&gens, n)?;
    let (y, removed): (Rat, Vec<bool>) = match kind {
        LocalKind::Weighted(y) => (y.clone(), vec![false; n]),
        LocalKind::FacetsRemoved(k) => {
            if let Some(i) = k.iter().find(|i| !facets.contains(i)) {
                return Err(Error::InvalidInput(format!("facet {i} does not contain the vertex")));
            }
            (Rat::zero(), facets.iter().map(|i| k.contains(i)).collect())
        }
        _ => (Rat::zero(), vec![false; n]),
    };
    let yc = Complex64::new(to_f64(&y), 0.0);
    let factor_kind = |i: usize| match kind {
        LocalKind::Todd => Factor::Todd,
        LocalKind::Dual => Factor::Dual,
        LocalKind::FacetsRemoved(_) => {
            if removed[i] {
                Factor::Dual
            } else {
                Factor::Todd
            }
        }
        LocalKind::Weighted(_) => Factor::Hirzebruch,
    };
    let (lo, hi) = LOCAL_ORDERS;
    let mut series: Vec<Vec<PowerSeries<Complex64>>> = Vec::new();
    for g in &group.elements {
        let mut row = Vec::new();
        for (i, gi) in g.iter().enumerate().take(n) {
            let a = root_of_unity(gi);
            row.push(factor_series(factor_kind(i), &a, &yc, &Complex64::new(1.0, 0.0), hi)?);
        }
        series.push(row);
    }
    let lattice_sum = match kind {
        LocalKind::Todd => vertex_cone_sum(p, v)?,
        LocalKind::Dual => {
            let tc = tangent_cone(p, v);
            let all: Vec<usize> = (0..tc.complex.rays.len()).collect();
            relint_exp_sum(&tc.apex, &tc.complex, &all)?
        }
        LocalKind::FacetsRemoved(_) => facets_removed_cone_sum(&gens, &removed)?,
        LocalKind::Weighted(_) => weighted_vertex_sum(p, v)?,
    };
    let apex_shift = matches!(kind, LocalKind::FacetsRemoved(_));
    let vertex = &p.vertices()[v];
    let mut s = scale.clone();
    for _ in 0..=LOCAL_HALVINGS {
        let z: Vec<f64> = direction.iter().map(|d| to_f64(&(d * &s))).collect();
        let xs: Vec<f64> = dual.iter().map(|m| -m.iter().zip(&z).map(|(a, b)| to_f64(a) * b).sum::<f64>()).collect();
        let value = |order: usize| -> Complex64 {
            series
                .iter()
                .map(|row| row.iter().zip(&xs).map(|(sr, &x)| eval_series(sr, x, order)).product::<Complex64>())
                .sum()
        };
        let (a, b) = (value(lo), value(hi));
        if (a - b).norm() > tol * 1e-2 * b.norm().max(1.0) {
            s /= ri(2);
            continue;
        }
        let vz: f64 = vertex.iter().zip(&z).map(|(a, b)| to_f64(a) * b).sum();
        let integral = vz.exp() / mult.to_f64().unwrap_or(f64::NAN) / xs.iter().product::<f64>();
        let op = b * integral;
        let mut lat = evaluate_at(&lattice_sum, &z, yc);
        if apex_shift {
            lat *= vz.exp();
        }
        let name = format!("local:{}@v{}[scale={}]", kind.name(), v, s);
        return EMReport::approximate(name, op, Value::Complex(lat), tol);
    }
    Err(Error::Resource(format!(
        "operator series did not converge; try a scale below {}",
        scale / ri(1 << LOCAL_HALVINGS)
    )))
}

/// Converts `(d/dh)` products of a polynomial to the face relation
/// `mult(sigma_E) prod_{rho in sigma_E} d/dh_rho Q_P = Q_E`, checked exactly for every face.
pub fn face_derivative_relation_holds(p: &Polytope, polys: &[MPoly<Rat>]) -> Result<bool> {
    let fan = NormalFan::of(p);
    let whole = &polys[p.whole_face()];
    for (e, cone) in fan.cones.iter().enumerate() {
        let mut d = whole.clone();
        for &r in cone {
            d = d.derivative(r);
        }
        let m = Rat::from_integer(fan.multiplicity(e));
        if d.scale(&m) != polys[e] {
            return Ok(false);
        }
    }
    // Mixed derivatives across disjoint facets vanish.
    for i in 0..p.num_facets() {
        for j in (i + 1)..p.num_facets() {
            if p.face_with_facets(&[i, j]).is_none() && !whole.derivative(i).derivative(j).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
