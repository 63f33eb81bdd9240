//! The coefficient rings series and operators are generic over.

use std::fmt::Debug;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::rational::{to_f64, Rat};
use super::ypoly::YPoly;

pub trait Coeff: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn from_rat(r: &Rat) -> Self;
    /// Multiplicative inverse when it exists in the ring.
    fn try_inv(&self) -> Option<Self>;
    fn scaled_by(&self, r: &Rat) -> Self {
        self.times(&Self::from_rat(r))
    }
}

impl Coeff for Rat {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn try_inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

impl Coeff for YPoly {
    fn nil() -> Self {
        YPoly::zero()
    }
    fn unit() -> Self {
        YPoly::constant(One::one())
    }
    fn is_nil(&self) -> bool {
        YPoly::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_rat(r: &Rat) -> Self {
        YPoly::constant(r.clone())
    }
    fn try_inv(&self) -> Option<Self> {
        match self.degree() {
            Some(0) => Some(YPoly::constant(self.coeff(0).recip())),
            _ => None,
        }
    }
}

impl Coeff for Complex64 {
    fn nil() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn unit() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_nil(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_rat(r: &Rat) -> Self {
        Complex64::new(to_f64(r), 0.0)
    }
    fn try_inv(&self) -> Option<Self> {
        (!Coeff::is_nil(self)).then(|| self.inv())
    }
}

/// `e^{2 pi i gamma}`; exact rational phases keep the common quarter turns exact.
pub fn root_of_unity(gamma: &Rat) -> Complex64 {
    let g = super::rational::frac(gamma);
    let four = &g * Rat::from_integer(4.into());
    if four.is_integer() {
        return match four.to_integer().to_string().as_str() {
            "0" => Complex64::new(1.0, 0.0),
            "1" => Complex64::new(0.0, 1.0),
            "2" => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = 2.0 * std::f64::consts::PI * to_f64(&g);
    Complex64::new(theta.cos(), theta.sin())
}
