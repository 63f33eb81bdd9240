//! Integer matrices, Smith normal form and the lattice helpers built on it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::{inverse, RatMatrix};
use super::rational::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged integer matrix");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<i64>], dim: usize) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s = BigInt::zero();
                for k in 0..self.cols {
                    s += self.get(i, k) * other.get(k, j);
                }
                m.set(i, j, s);
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rat(&self) -> RatMatrix {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| Rat::from_integer(self.get(i, j).clone())).collect())
            .collect()
    }

    pub fn from_rat(m: &[Vec<Rat>]) -> Option<Self> {
        let r = m.len();
        let c = m.first().map_or(0, |x| x.len());
        let mut out = Self::zeros(r, c);
        for (i, row) in m.iter().enumerate() {
            for (j, x) in row.iter().enumerate().take(c) {
                if !x.is_integer() {
                    return None;
                }
                out.set(i, j, x.to_integer());
            }
        }
        Some(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let d = self.get(src, j) * f;
            self.data[dst * self.cols + j] += d;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let d = self.get(i, src) * f;
            self.data[i * self.cols + dst] += d;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let x = -self.get(r, j).clone();
            self.set(r, j, x);
        }
    }
}

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal, `d[i] | d[i+1]`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = d.get(i, j);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Snf { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                let q = d.get(i, t).div_floor(&p);
                if !q.is_zero() {
                    d.add_row(i, t, &-q.clone());
                    u.add_row(i, t, &-q);
                }
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let q = d.get(t, j).div_floor(&p);
                if !q.is_zero() {
                    d.add_col(j, t, &-q.clone());
                    v.add_col(j, t, &-q);
                }
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&p)));
            if let Some(i) = bad {
                d.add_row(t, i, &BigInt::one());
                u.add_row(t, i, &BigInt::one());
                continue;
            }
            break;
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, d, v }
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(u: &IntMatrix) -> IntMatrix {
    let inv = inverse(&u.to_rat()).expect("unimodular matrix is invertible");
    IntMatrix::from_rat(&inv).expect("inverse of a unimodular matrix is integral")
}

fn big_to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("lattice coordinate fits in i64")
}

/// The saturated sublattice `span(gens) ∩ Z^n`, with coordinates adapted to it.
///
/// `basis` spans the saturation; `coords(x)` returns coordinates of `x` in the
/// completed basis, whose trailing entries are coordinates in the quotient
/// `Z^n / saturation`.
#[derive(Clone, Debug)]
pub struct SpanLattice {
    pub dim: usize,
    pub rank: usize,
    pub basis: Vec<Vec<i64>>,
    pub complement: Vec<Vec<i64>>,
    u: IntMatrix,
}

impl SpanLattice {
    pub fn new(gens: &[Vec<i64>], dim: usize) -> Self {
        let a = IntMatrix::from_columns(gens, dim);
        let snf = smith_normal_form(&a);
        let rank = snf.rank();
        let uinv = unimodular_inverse(&snf.u);
        let col = |j: usize| uinv.column(j).iter().map(big_to_i64).collect::<Vec<i64>>();
        SpanLattice {
            dim,
            rank,
            basis: (0..rank).map(col).collect(),
            complement: (rank..dim).map(col).collect(),
            u: snf.u,
        }
    }

    pub fn full_coords(&self, x: &[i64]) -> Vec<i64> {
        let xb: Vec<BigInt> = x.iter().map(|&c| BigInt::from(c)).collect();
        self.u.mul_vec(&xb).iter().map(big_to_i64).collect()
    }

    /// Coordinates in `basis` of a vector lying in the span.
    pub fn coords(&self, x: &[i64]) -> Vec<i64> {
        let c = self.full_coords(x);
        debug_assert!(c[self.rank..].iter().all(|&z| z == 0), "vector outside span");
        c[..self.rank].to_vec()
    }

    pub fn coords_rat(&self, x: &[Rat]) -> Vec<Rat> {
        let ur = self.u.to_rat();
        (0..self.rank).map(|i| ur[i].iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Image in the quotient lattice.
    pub fn quotient_coords(&self, x: &[i64]) -> Vec<i64> {
        self.full_coords(x)[self.rank..].to_vec()
    }

    pub fn lift(&self, c: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.dim];
        for (b, &k) in self.basis.iter().zip(c) {
            for (o, &x) in out.iter_mut().zip(b) {
                *o += k * x;
            }
        }
        out
    }
}

/// Index of the lattice spanned by `gens` inside its saturation.
pub fn lattice_index(gens: &[Vec<i64>], dim: usize) -> BigInt {
    let snf = smith_normal_form(&IntMatrix::from_columns(gens, dim));
    snf.diagonal().into_iter().filter(|x| !x.is_zero()).product()
}

/// Representatives of `Z^k / G Z^k` for a nonsingular square `G`.
pub fn coset_representatives(g: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(g);
    let diag = snf.diagonal();
    let uinv = unimodular_inverse(&snf.u);
    let k = g.rows;
    let mut reps = Vec::new();
    let mut a = vec![BigInt::zero(); k];
    loop {
        reps.push(uinv.mul_vec(&a));
        let mut i = 0;
        loop {
            if i == k {
                return reps;
            }
            a[i] += 1;
            if a[i] < diag[i] {
                break;
            }
            a[i] = BigInt::zero();
            i += 1;
        }
    }
}
