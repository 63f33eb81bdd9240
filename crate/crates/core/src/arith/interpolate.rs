//! Exact polynomial interpolation.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::matrix::rref;
use super::mpoly::{monomials_up_to, Exponent, MPoly};
use super::rational::{ri, Rat};
use crate::error::{Error, Result};

/// Polynomial of total degree `<= degree_bound` through the samples.
///
/// The samples may over-determine the polynomial; they must contain a
/// unisolvent subset and agree with a single polynomial.
pub fn interpolate_multivariate(samples: &[(Vec<Rat>, Rat)], degree_bound: usize, nvars: usize) -> Result<MPoly<Rat>> {
    let monos = monomials_up_to(nvars, degree_bound);
    let m = monos.len();
    let mut rows: Vec<Vec<Rat>> = samples
        .iter()
        .map(|(x, v)| {
            if x.len() != nvars {
                return Err(Error::InvalidInput(format!("sample point has {} coordinates, expected {nvars}", x.len())));
            }
            let mut row: Vec<Rat> = monos.iter().map(|e| eval_monomial(e, x)).collect();
            row.push(v.clone());
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let piv = rref(&mut rows);
    if piv.contains(&m) {
        return Err(Error::InconsistentSamples);
    }
    if piv.len() < m {
        return Err(Error::NotPoised(format!("rank {} of {} monomials", piv.len(), m)));
    }
    let mut p = MPoly::zero(nvars);
    for (r, &c) in piv.iter().enumerate() {
        p.add_term(monos[c].clone(), rows[r][m].clone());
    }
    Ok(p)
}

fn eval_monomial(e: &[u32], x: &[Rat]) -> Rat {
    e.iter().zip(x).fold(Rat::one(), |acc, (&k, xi)| {
        let mut t = acc;
        for _ in 0..k {
            t *= xi;
        }
        t
    })
}

/// Interpolates on the simplex grid `{ step * a : a in N^nvars, |a| <= degree }`.
///
/// Uses multivariate Newton forward differences, so the cost is linear in the
/// number of grid points; `value` is called once per grid point.
pub fn interpolate_simplex_grid(
    nvars: usize,
    degree: usize,
    step: &Rat,
    mut value: impl FnMut(&[Rat]) -> Result<Rat>,
) -> Result<MPoly<Rat>> {
    let mut out = interpolate_simplex_grid_many(nvars, degree, step, 1, |h| Ok(vec![value(h)?]))?;
    Ok(out.remove(0))
}

/// Vector-valued form of [`interpolate_simplex_grid`]: `value` returns `count` samples per point.
pub fn interpolate_simplex_grid_many(
    nvars: usize,
    degree: usize,
    step: &Rat,
    count: usize,
    mut value: impl FnMut(&[Rat]) -> Result<Vec<Rat>>,
) -> Result<Vec<MPoly<Rat>>> {
    if step.is_zero() {
        return Err(Error::InvalidInput("grid step must be nonzero".into()));
    }
    let grid = monomials_up_to(nvars, degree);
    let index: HashMap<Exponent, usize> = grid.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let mut vals: Vec<Vec<Rat>> = vec![Vec::with_capacity(grid.len()); count];
    for a in &grid {
        let h: Vec<Rat> = a.iter().map(|&k| step * ri(k as i64)).collect();
        let v = value(&h)?;
        if v.len() != count {
            return Err(Error::InvalidInput(format!("expected {count} samples per point, got {}", v.len())));
        }
        for (slot, x) in vals.iter_mut().zip(v) {
            slot.push(x);
        }
    }
    let table = binomial_basis_table(degree, step);
    Ok(vals.into_iter().map(|v| newton_to_monomials(&grid, &index, v, nvars, degree, &table)).collect())
}

fn newton_to_monomials(
    grid: &[Exponent],
    index: &HashMap<Exponent, usize>,
    mut v: Vec<Rat>,
    nvars: usize,
    degree: usize,
    table: &[Vec<Rat>],
) -> MPoly<Rat> {
    for axis in 0..nvars {
        let mut order: Vec<usize> = (0..grid.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(grid[i][axis]));
        for level in 1..=degree as u32 {
            for &i in &order {
                let a = &grid[i];
                if a[axis] < level {
                    continue;
                }
                let mut b = a.clone();
                b[axis] -= 1;
                let j = index[&b];
                let d = &v[i] - &v[j];
                v[i] = d;
            }
        }
    }
    // Newton basis prod_i binom(h_i / step, a_i) back to monomials, one axis at a time.
    let mut coeffs: HashMap<Exponent, Rat> = grid.iter().cloned().zip(v).filter(|(_, c)| !c.is_zero()).collect();
    for axis in 0..nvars {
        let mut next: HashMap<Exponent, Rat> = HashMap::new();
        for (a, c) in coeffs {
            let b = a[axis] as usize;
            for (j, t) in table[b].iter().enumerate() {
                if t.is_zero() {
                    continue;
                }
                let mut e = a.clone();
                e[axis] = j as u32;
                *next.entry(e).or_insert_with(Rat::zero) += &c * t;
            }
        }
        coeffs = next;
    }
    let mut p = MPoly::zero(nvars);
    for (e, c) in coeffs {
        p.add_term(e, c);
    }
    p
}

/// Row `b` holds the monomial coefficients of `binom(h / step, b)`.
fn binomial_basis_table(degree: usize, step: &Rat) -> Vec<Vec<Rat>> {
    let inv = step.recip();
    let mut rows = vec![vec![Rat::one()]];
    for b in 1..=degree {
        let prev = &rows[b - 1];
        // prev * (h/step - (b-1)) / b
        let shift = ri(b as i64 - 1);
        let mut row = vec![Rat::zero(); b + 1];
        for (j, c) in prev.iter().enumerate() {
            row[j + 1] += c * &inv;
            row[j] -= c * &shift;
        }
        let bb = ri(b as i64);
        rows.push(row.into_iter().map(|c| c / &bb).collect());
    }
    rows
}

/// Coefficients (ascending) of the polynomial through `(xs[i], ys[i])`.
pub fn interpolate_univariate(xs: &[Rat], ys: &[Rat]) -> Result<Vec<Rat>> {
    let n = xs.len();
    if n != ys.len() || n == 0 {
        return Err(Error::InvalidInput("interpolation needs matching nonempty samples".into()));
    }
    // Newton divided differences.
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let den = &xs[i] - &xs[i - level];
            if den.is_zero() {
                return Err(Error::NotPoised("repeated abscissa".into()));
            }
            dd[i] = (&dd[i] - &dd[i - 1]) / den;
        }
    }
    let mut poly = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        // poly = poly * (x - xs[i]) + dd[i]
        let mut next = vec![Rat::zero(); n];
        for j in 0..n - 1 {
            next[j + 1] += &poly[j];
            next[j] -= &poly[j] * &xs[i];
        }
        next[0] += &dd[i];
        poly = next;
    }
    while poly.len() > 1 && poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    #[test]
    fn tensor_grid_product() {
        // (1 + h1)(1 + h2) from a 3x3 grid
        let mut samples = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                let (x, y) = (ri(a), ri(b));
                samples.push((vec![x.clone(), y.clone()], (ri(1) + &x) * (ri(1) + &y)));
            }
        }
        let p = interpolate_multivariate(&samples, 2, 2).unwrap();
        assert_eq!(p.coeff(&[0, 0]), ri(1));
        assert_eq!(p.coeff(&[1, 1]), ri(1));
        assert_eq!(p.coeff(&[2, 0]), ri(0));
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn collinear_points_not_poised() {
        let samples: Vec<_> = (0..4).map(|k| (vec![ri(k), ri(k)], ri(k))).collect();
        assert!(matches!(interpolate_multivariate(&samples, 1, 2), Err(Error::NotPoised(_))));
    }

    #[test]
    fn simplex_grid_matches_general() {
        // (1 + h1 + h2)(1 + h3 + h4), the dilated unit square's area
        let f = |h: &[Rat]| (ri(1) + &h[0] + &h[1]) * (ri(1) + &h[2] + &h[3]);
        let p = interpolate_simplex_grid(4, 4, &rat(1, 3), |h| Ok(f(h))).unwrap();
        assert_eq!(p.coeff(&[0, 0, 0, 0]), ri(1));
        assert_eq!(p.coeff(&[1, 0, 1, 0]), ri(1));
        assert_eq!(p.coeff(&[1, 1, 0, 0]), ri(0));
        assert_eq!(p.len(), 9);
    }

    #[test]
    fn univariate() {
        let xs: Vec<Rat> = (0..4).map(ri).collect();
        let ys: Vec<Rat> = xs.iter().map(|x| x * x * x - ri(2) * x + ri(5)).collect();
        assert_eq!(interpolate_univariate(&xs, &ys).unwrap(), vec![ri(5), ri(-2), ri(0), ri(1)]);
    }
}
