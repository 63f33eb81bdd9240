//! Polynomials in the weight variable `y` with rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::rational::{fmt_rat, ri, Rat};
use crate::error::{Error, Result};

/// Coefficients in ascending powers of `y`, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct YPoly(Vec<Rat>);

impl YPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        YPoly(coeffs)
    }

    pub fn zero() -> Self {
        YPoly(Vec::new())
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    pub fn y() -> Self {
        Self::new(vec![Rat::zero(), Rat::one()])
    }

    /// `(1 + y)^k`
    pub fn one_plus_y_pow(k: usize) -> Self {
        let base = Self::new(vec![Rat::one(), Rat::one()]);
        (0..k).fold(Self::constant(Rat::one()), |acc, _| &acc * &base)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.0.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.0
    }

    pub fn eval(&self, y: &Rat) -> Rat {
        self.0.iter().rev().fold(Rat::zero(), |acc, c| acc * y + c)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Self::new(self.0.iter().map(|c| c * r).collect())
    }

    /// Exact division by `(1 + y)^k`; fails if a remainder is left.
    pub fn div_one_plus_y_pow(&self, k: usize) -> Result<Self> {
        let mut p = self.0.clone();
        for _ in 0..k {
            if p.is_empty() {
                break;
            }
            // Synthetic division by (y + 1).
            let n = p.len();
            let mut q = vec![Rat::zero(); n - 1];
            let mut carry = Rat::zero();
            for i in (0..n).rev() {
                let c = &p[i] - &carry;
                if i == 0 {
                    if !c.is_zero() {
                        return Err(Error::Unsupported(format!(
                            "polynomial {self} is not divisible by (1+y)^{k}"
                        )));
                    }
                } else {
                    q[i - 1] = c.clone();
                    carry = c;
                }
            }
            p = q;
        }
        Ok(Self::new(p))
    }

    /// Substitutes `y = k - 1`, giving the polynomial in `k = 1 + y`.
    pub fn in_one_plus_y(&self) -> Self {
        let km1 = Self::new(vec![-Rat::one(), Rat::one()]);
        self.0.iter().rev().fold(Self::zero(), |acc, c| &(&acc * &km1) + &Self::constant(c.clone()))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(fmt_rat).collect()
    }
}

impl fmt::Display for YPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", fmt_rat(c))?,
                1 => write!(f, "{}*y", fmt_rat(c))?,
                _ => write!(f, "{}*y^{k}", fmt_rat(c))?,
            }
        }
        Ok(())
    }
}

impl From<Rat> for YPoly {
    fn from(r: Rat) -> Self {
        YPoly::constant(r)
    }
}

impl From<i64> for YPoly {
    fn from(n: i64) -> Self {
        YPoly::constant(ri(n))
    }
}

impl Add for &YPoly {
    type Output = YPoly;
    fn add(self, o: &YPoly) -> YPoly {
        let n = self.0.len().max(o.0.len());
        YPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &YPoly {
    type Output = YPoly;
    fn sub(self, o: &YPoly) -> YPoly {
        let n = self.0.len().max(o.0.len());
        YPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Neg for &YPoly {
    type Output = YPoly;
    fn neg(self) -> YPoly {
        YPoly(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul for &YPoly {
    type Output = YPoly;
    fn mul(self, o: &YPoly) -> YPoly {
        if self.is_zero() || o.is_zero() {
            return YPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        YPoly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divide_by_one_plus_y() {
        let p = YPoly::one_plus_y_pow(3);
        let q = p.div_one_plus_y_pow(2).unwrap();
        assert_eq!(q, YPoly::one_plus_y_pow(1));
        assert!(YPoly::y().div_one_plus_y_pow(1).is_err());
    }

    #[test]
    fn change_to_k() {
        // 1 + y = k
        let p = YPoly::one_plus_y_pow(2);
        assert_eq!(p.in_one_plus_y(), YPoly::new(vec![ri(0), ri(0), ri(1)]));
    }
}
