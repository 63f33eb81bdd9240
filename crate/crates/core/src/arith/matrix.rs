//! Dense rational linear algebra for the small systems met at desk scale.

use num_traits::{One, Signed, Zero};

use super::rational::{ri, Rat};
use crate::error::{Error, Result};

pub type RatMatrix = Vec<Vec<Rat>>;

pub fn from_int_rows(rows: &[Vec<i64>]) -> RatMatrix {
    rows.iter().map(|r| r.iter().map(|&x| ri(x)).collect()).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_vec(m: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot = m[r].clone();
                for (x, p) in m[i].iter_mut().zip(&pivot).take(cols) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rat>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

pub fn rank_int(rows: &[Vec<i64>]) -> usize {
    rank(&from_int_rows(rows))
}

pub fn det(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Rat::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            let pivot = a[c].clone();
            for (x, p) in a[i].iter_mut().zip(&pivot).take(n).skip(c) {
                *x -= &f * p;
            }
        }
    }
    d
}

pub fn det_int(rows: &[Vec<i64>]) -> Rat {
    det(&from_int_rows(rows))
}

/// Solves the square system `m x = b`.
pub fn solve(m: &[Vec<Rat>], b: &[Rat]) -> Result<Vec<Rat>> {
    let n = m.len();
    let mut aug: RatMatrix = m
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv.iter().any(|&c| c >= n) {
        return Err(Error::Singular);
    }
    Ok(aug.into_iter().map(|r| r[n].clone()).collect())
}

pub fn inverse(m: &[Vec<Rat>]) -> Result<RatMatrix> {
    let n = m.len();
    let mut aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] >= n {
        return Err(Error::Singular);
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of the right kernel of `m` (columns count = ambient dimension).
pub fn kernel(m: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut a = m.to_vec();
    let piv = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (r, &pc) in piv.iter().enumerate() {
                v[pc] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Affine dimension of a point set.
pub fn affine_rank(points: &[Vec<Rat>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let diffs: RatMatrix = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs)
}

/// A left inverse `L` with `L b = I` for a full column rank `n x k` matrix given as columns.
pub fn left_inverse(columns: &[Vec<Rat>]) -> Result<RatMatrix> {
    let k = columns.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let n = columns[0].len();
    // Pick k independent rows of the n x k matrix and invert that block.
    let rows: RatMatrix = (0..n).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut acc: RatMatrix = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        acc.push(r.clone());
        if rank(&acc) > chosen.len() {
            chosen.push(i);
        } else {
            acc.pop();
        }
        if chosen.len() == k {
            break;
        }
    }
    if chosen.len() < k {
        return Err(Error::Singular);
    }
    let inv = inverse(&acc)?;
    Ok((0..k)
        .map(|a| {
            let mut row = vec![Rat::zero(); n];
            for (b, &i) in chosen.iter().enumerate() {
                row[i] = inv[a][b].clone();
            }
            row
        })
        .collect())
}

pub fn abs_rat(x: &Rat) -> Rat {
    x.abs()
}
