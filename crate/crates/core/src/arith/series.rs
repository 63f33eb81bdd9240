//! Truncated power series and Laurent series over a generic coefficient ring.

use super::bernoulli::bernoulli;
use super::coeff::Coeff;
use super::rational::{factorial, rbig, Rat};
use crate::error::{Error, Result};

/// `sum_{k <= order} c_k x^k`, exact through `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<C> {
    pub coeffs: Vec<C>,
}

impl<C: Coeff> PowerSeries<C> {
    pub fn zero(order: usize) -> Self {
        PowerSeries { coeffs: vec![C::nil(); order + 1] }
    }

    pub fn constant(c: C, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The variable `x`.
    pub fn x(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = C::unit();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `e^{a x}`
    pub fn exp(a: &C, order: usize) -> Self {
        let mut s = Self::zero(order);
        let mut term = C::unit();
        for k in 0..=order {
            s.coeffs[k] = term.clone();
            term = term.times(a).scaled_by(&Rat::new(1.into(), ((k + 1) as i64).into()));
        }
        s
    }

    /// `x / (1 - e^{-x}) = sum_k (-1)^k B_k x^k / k!`
    pub fn todd(order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|k| {
                let sign = if k % 2 == 1 { -1 } else { 1 };
                C::from_rat(&(bernoulli(k) * Rat::from_integer(sign.into()) / rbig(&factorial(k))))
            })
            .collect();
        PowerSeries { coeffs }
    }

    pub fn plus(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        PowerSeries { coeffs: (0..=n).map(|k| self.coeffs[k].plus(&o.coeffs[k])).collect() }
    }

    pub fn minus(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        PowerSeries { coeffs: (0..=n).map(|k| self.coeffs[k].minus(&o.coeffs[k])).collect() }
    }

    pub fn times(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut out = vec![C::nil(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_nil() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        PowerSeries { coeffs: out }
    }

    pub fn scale(&self, c: &C) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|x| x.times(c)).collect() }
    }

    /// Reciprocal; the constant term must be a unit.
    pub fn inv(&self) -> Result<Self> {
        let c0 = self.coeffs[0]
            .try_inv()
            .ok_or_else(|| Error::Unsupported("series constant term is not invertible".into()))?;
        let n = self.order();
        let mut out = vec![C::nil(); n + 1];
        out[0] = c0.clone();
        for k in 1..=n {
            let mut s = C::nil();
            for j in 1..=k {
                s = s.plus(&self.coeffs[j].times(&out[k - j]));
            }
            out[k] = s.times(&c0).negated();
        }
        Ok(PowerSeries { coeffs: out })
    }

    /// `f(s x)`
    pub fn rescale_var(&self, s: &C) -> Self {
        let mut p = C::unit();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let r = c.times(&p);
                p = p.times(s);
                r
            })
            .collect();
        PowerSeries { coeffs }
    }

    pub fn truncate(&self, order: usize) -> Self {
        PowerSeries { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }
}

/// `sum_{low <= k <= order} c_k t^k`, exact through `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries<C> {
    pub low: i64,
    pub order: i64,
    coeffs: Vec<C>,
}

impl<C: Coeff> LaurentSeries<C> {
    pub fn new(low: i64, order: i64, coeffs: Vec<C>) -> Self {
        let mut s = LaurentSeries { low, order, coeffs };
        let want = (order - low + 1).max(0) as usize;
        s.coeffs.resize(want, C::nil());
        s
    }

    pub fn zero(order: i64) -> Self {
        Self::new(0, order, Vec::new())
    }

    pub fn from_power_series(p: &PowerSeries<C>) -> Self {
        Self::new(0, p.order() as i64, p.coeffs.clone())
    }

    /// Coefficient of `t^k`; errors past the truncation order.
    pub fn coeff(&self, k: i64) -> Result<C> {
        if k > self.order {
            return Err(Error::OrderExceeded { requested: k, available: self.order });
        }
        if k < self.low {
            return Ok(C::nil());
        }
        Ok(self.coeffs[(k - self.low) as usize].clone())
    }

    /// Exponent of the first nonzero coefficient, if any is known.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().position(|c| !c.is_nil()).map(|i| self.low + i as i64)
    }

    pub fn truncate(&self, order: i64) -> Self {
        let o = order.min(self.order);
        Self::new(self.low, o, self.coeffs.clone())
    }

    pub fn plus(&self, o: &Self) -> Self {
        let low = self.low.min(o.low);
        let order = self.order.min(o.order);
        let coeffs = (low..=order)
            .map(|k| self.coeff(k).unwrap().plus(&o.coeff(k).unwrap()))
            .collect();
        Self::new(low, order, coeffs)
    }

    pub fn negated(&self) -> Self {
        Self::new(self.low, self.order, self.coeffs.iter().map(|c| c.negated()).collect())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.low, self.order, self.coeffs.iter().map(|x| x.times(c)).collect())
    }

    /// Product; the result is exact only as far as both factors allow.
    pub fn times(&self, o: &Self) -> Self {
        let vf = self.valuation().unwrap_or(self.order + 1);
        let vg = o.valuation().unwrap_or(o.order + 1);
        let order = (self.order + vg).min(o.order + vf);
        let low = self.low + o.low;
        let mut coeffs = vec![C::nil(); (order - low + 1).max(0) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_nil() {
                continue;
            }
            let ei = self.low + i as i64;
            for (j, b) in o.coeffs.iter().enumerate() {
                let e = ei + o.low + j as i64;
                if e > order {
                    break;
                }
                let idx = (e - low) as usize;
                coeffs[idx] = coeffs[idx].plus(&a.times(b));
            }
        }
        Self::new(low, order, coeffs)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> LaurentSeries<D> {
        LaurentSeries::new(self.low, self.order, self.coeffs.iter().map(f).collect())
    }

    /// `(exponent, coefficient)` pairs for the known nonzero part.
    pub fn terms(&self) -> Vec<(i64, C)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_nil())
            .map(|(i, c)| (self.low + i as i64, c.clone()))
            .collect()
    }
}

/// `e^{a t}` through `t^order`.
pub fn laurent_exp<C: Coeff>(a: &Rat, order: i64) -> LaurentSeries<C> {
    if order < 0 {
        return LaurentSeries::zero(order);
    }
    LaurentSeries::from_power_series(&PowerSeries::exp(&C::from_rat(a), order as usize))
}

/// `1 / (1 - e^{a t}) = -sum_k B_k a^{k-1} t^{k-1} / k!` through `t^order`.
pub fn laurent_inverse_one_minus_exp<C: Coeff>(a: &Rat, order: i64) -> Result<LaurentSeries<C>> {
    if num_traits::Zero::is_zero(a) {
        return Err(Error::InvalidInput("1/(1-e^{at}) needs a nonzero a".into()));
    }
    let top = (order + 1).max(0) as usize;
    let mut coeffs = Vec::with_capacity(top + 1);
    let mut apow = a.recip();
    for k in 0..=top {
        let c = -(bernoulli(k) * &apow / rbig(&factorial(k)));
        coeffs.push(C::from_rat(&c));
        apow *= a;
    }
    Ok(LaurentSeries::new(-1, order, coeffs))
}

/// `1 / (1 - zeta e^{a t})` for a phase `zeta != 1`; regular at `t = 0`.
pub fn inverse_one_minus_phase_exp<C: Coeff>(zeta: &C, a: &Rat, order: i64) -> Result<LaurentSeries<C>> {
    if order < 0 {
        return Ok(LaurentSeries::zero(order));
    }
    let e = PowerSeries::exp(&C::from_rat(a), order as usize).scale(zeta);
    let one_minus = PowerSeries::constant(C::unit(), order as usize).minus(&e);
    Ok(LaurentSeries::from_power_series(&one_minus.inv()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{rat, ri};

    #[test]
    fn inverse_one_minus_exp_unit() {
        let s: LaurentSeries<Rat> = laurent_inverse_one_minus_exp(&ri(1), 3).unwrap();
        assert_eq!(s.coeff(-1).unwrap(), ri(-1));
        assert_eq!(s.coeff(0).unwrap(), rat(1, 2));
        assert_eq!(s.coeff(1).unwrap(), rat(-1, 12));
        assert_eq!(s.coeff(2).unwrap(), ri(0));
        assert_eq!(s.coeff(3).unwrap(), rat(1, 720));
        assert!(matches!(s.coeff(4), Err(Error::OrderExceeded { .. })));
    }

    #[test]
    fn product_order_tracks_poles() {
        let a: LaurentSeries<Rat> = laurent_inverse_one_minus_exp(&ri(1), 2).unwrap();
        let b: LaurentSeries<Rat> = laurent_inverse_one_minus_exp(&ri(2), 2).unwrap();
        let p = a.times(&b);
        assert_eq!(p.order, 1);
        assert_eq!(p.low, -2);
    }

    #[test]
    fn inverse_times_series_is_one() {
        // (1 - e^t) * 1/(1 - e^t) = 1
        let inv: LaurentSeries<Rat> = laurent_inverse_one_minus_exp(&ri(1), 6).unwrap();
        let e: LaurentSeries<Rat> = laurent_exp(&ri(1), 7);
        let one_minus = LaurentSeries::new(0, 7, vec![ri(1)]).plus(&e.negated());
        let p = one_minus.times(&inv);
        assert_eq!(p.coeff(0).unwrap(), ri(1));
        for k in 1..=p.order {
            assert_eq!(p.coeff(k).unwrap(), ri(0));
        }
    }

    #[test]
    fn todd_series() {
        let t: PowerSeries<Rat> = PowerSeries::todd(4);
        assert_eq!(t.coeffs, vec![ri(1), rat(1, 2), rat(1, 12), ri(0), rat(-1, 720)]);
    }
}
