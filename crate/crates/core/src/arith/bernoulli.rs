//! Bernoulli numbers with `B_1 = -1/2`, memoized.

use std::sync::Mutex;

use num_traits::Zero;

use super::rational::{ri, Rat};

static TABLE: Mutex<Vec<Rat>> = Mutex::new(Vec::new());

/// `B_k` from the Akiyama-Tanigawa recurrence.
pub fn bernoulli(k: usize) -> Rat {
    let mut table = TABLE.lock().expect("bernoulli table poisoned");
    while table.len() <= k {
        let n = table.len();
        table.push(akiyama_tanigawa(n));
    }
    table[k].clone()
}

fn akiyama_tanigawa(n: usize) -> Rat {
    let mut a: Vec<Rat> = vec![Rat::zero(); n + 1];
    for m in 0..=n {
        a[m] = Rat::new(1.into(), ((m + 1) as i64).into());
        for j in (1..=m).rev() {
            let d = &a[j - 1] - &a[j];
            a[j - 1] = ri(j as i64) * d;
        }
    }
    // The recurrence yields B_1 = +1/2; the s/(e^s - 1) convention flips it.
    if n == 1 {
        -a[0].clone()
    } else {
        a[0].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    #[test]
    fn first_values() {
        assert_eq!(bernoulli(0), ri(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), ri(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn defining_recurrence() {
        // sum_{j<=k} C(k+1, j) B_j = 0 for k >= 1
        for k in 1..20usize {
            let mut s = Rat::zero();
            let mut c = ri(1);
            for j in 0..=k {
                s += &c * bernoulli(j);
                c = c * ri((k + 1 - j) as i64) / ri((j + 1) as i64);
            }
            assert!(s.is_zero(), "k = {k}");
        }
    }
}
