//! Sparse multivariate polynomials.

use std::collections::BTreeMap;

use super::coeff::Coeff;
use super::rational::{factorial, rbig, Rat};

pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct MPoly<C> {
    pub nvars: usize,
    terms: BTreeMap<Exponent, C>,
}

impl<C: Coeff> MPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, C::unit());
        p
    }

    pub fn monomial(exp: Exponent, c: C) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    /// `sum_i coeffs[i] x_i + constant`
    pub fn affine(coeffs: &[C], constant: C) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, constant);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn add_term(&mut self, exp: Exponent, c: C) {
        debug_assert_eq!(exp.len(), self.nvars);
        if c.is_nil() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(x) => {
                *x = x.plus(&c);
                if x.is_nil() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coeff(&self, exp: &[u32]) -> C {
        self.terms.get(exp).cloned().unwrap_or_else(C::nil)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().sum::<u32>() as usize).max().unwrap_or(0)
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn minus(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.negated());
        }
        p
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, x) in &self.terms {
            p.add_term(e.clone(), x.times(c));
        }
        p
    }

    pub fn times(&self, o: &Self) -> Self {
        self.mul_trunc(o, usize::MAX)
    }

    /// Product keeping only monomials of total degree `<= max_deg`.
    pub fn mul_trunc(&self, o: &Self, max_deg: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            let d1: u32 = e1.iter().sum();
            for (e2, c2) in &o.terms {
                let d2: u32 = e2.iter().sum();
                if (d1 + d2) as usize > max_deg {
                    continue;
                }
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1.times(c2));
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.nvars, C::unit()), |acc, _| acc.times(self))
    }

    pub fn truncate(&self, max_deg: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() as usize <= max_deg {
                p.add_term(e.clone(), c.clone());
            }
        }
        p
    }

    pub fn eval(&self, x: &[C]) -> C {
        let mut s = C::nil();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t.times(xi);
                }
            }
            s = s.plus(&t);
        }
        s
    }

    /// Substitutes `x_i -> polys[i]` (all in a common ring of variables).
    pub fn compose(&self, polys: &[MPoly<C>]) -> MPoly<C> {
        let m = polys.first().map_or(0, |p| p.nvars);
        let mut out = MPoly::zero(m);
        let mut cache: Vec<Vec<MPoly<C>>> = polys.iter().map(|p| vec![MPoly::constant(m, C::unit()), p.clone()]).collect();
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().times(&polys[i]);
                    cache[i].push(next);
                }
                t = t.times(&cache[i][k as usize]);
            }
            out = out.plus(&t);
        }
        out
    }

    /// Partial derivative in `x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            p.add_term(e2, c.scaled_by(&Rat::from_integer(e[i].into())));
        }
        p
    }

    /// `(d^alpha p)(0) = alpha! * coeff_alpha`.
    pub fn derivative_at_zero(&self, alpha: &[u32]) -> C {
        let f: Rat = alpha.iter().map(|&a| rbig(&factorial(a as usize))).product();
        self.coeff(alpha).scaled_by(&f)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> MPoly<D> {
        let mut p = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), f(c));
        }
        p
    }
}

/// All exponents in `nvars` variables of total degree `<= degree`, graded.
pub fn monomials_up_to(nvars: usize, degree: usize) -> Vec<Exponent> {
    let mut out = Vec::new();
    for d in 0..=degree {
        let mut cur = vec![0u32; nvars];
        fill(&mut out, &mut cur, 0, d as u32);
    }
    out
}

fn fill(out: &mut Vec<Exponent>, cur: &mut Exponent, i: usize, left: u32) {
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if i == cur.len() - 1 {
        cur[i] = left;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for k in (0..=left).rev() {
        cur[i] = k;
        fill(out, cur, i + 1, left - k);
    }
    cur[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::ri;

    #[test]
    fn monomial_count() {
        assert_eq!(monomials_up_to(3, 2).len(), 10);
        assert_eq!(monomials_up_to(6, 6).len(), 924);
        assert_eq!(monomials_up_to(0, 3).len(), 1);
    }

    #[test]
    fn compose_affine() {
        // x^2 with x = 1 + 2t
        let p: MPoly<Rat> = MPoly::monomial(vec![2], ri(1));
        let q = p.compose(&[MPoly::affine(&[ri(2)], ri(1))]);
        assert_eq!(q.coeff(&[0]), ri(1));
        assert_eq!(q.coeff(&[1]), ri(4));
        assert_eq!(q.coeff(&[2]), ri(4));
    }
}
