use num_bigint::BigInt;
use num_traits::Zero;

use super::{AlgebraError, MonicIntPolynomial};

const CACHE_LEN: usize = 160;

/// Power sums `s_n` of all roots of a monic integer polynomial.
///
/// Forward sums come from Newton's identities and the companion recurrence.
/// Backward sums `s_{-n}` are the forward sums of the reciprocal polynomial,
/// which is integral only when the constant term is ±1.
#[derive(Clone, Debug)]
pub struct PowerSumSequence {
    poly: MonicIntPolynomial,
    forward: Vec<BigInt>,
    backward: Option<Vec<BigInt>>,
}

fn forward_sums(poly: &MonicIntPolynomial, count: usize) -> Vec<BigInt> {
    let d = poly.degree();
    let c = poly.coefficients();
    // a_i is the coefficient of X^{d-i}.
    let a = |i: usize| BigInt::from(c[d - i]);
    let mut s: Vec<BigInt> = Vec::with_capacity(count.max(d + 1));
    s.push(BigInt::from(d as i64));
    for k in 1..count.max(d + 1) {
        let mut v = BigInt::zero();
        let upto = if k <= d { k - 1 } else { d };
        for i in 1..=upto {
            v -= a(i) * &s[k - i];
        }
        if k <= d {
            v -= a(k) * BigInt::from(k as i64);
        }
        s.push(v);
    }
    s.truncate(count.max(1));
    s
}

fn extend(poly: &MonicIntPolynomial, cached: &[BigInt], n: usize) -> BigInt {
    let d = poly.degree();
    let c = poly.coefficients();
    let mut window: Vec<BigInt> = cached[cached.len() - d..].to_vec();
    let mut k = cached.len() - 1;
    while k < n {
        let mut v = BigInt::zero();
        for i in 1..=d {
            v -= BigInt::from(c[d - i]) * &window[d - i];
        }
        window.remove(0);
        window.push(v);
        k += 1;
    }
    window[d - 1].clone()
}

impl PowerSumSequence {
    pub fn new(poly: &MonicIntPolynomial) -> Self {
        let forward = forward_sums(poly, CACHE_LEN);
        let backward = poly
            .reciprocal()
            .ok()
            .map(|r| forward_sums(&r, CACHE_LEN));
        Self {
            poly: poly.clone(),
            forward,
            backward,
        }
    }

    pub fn polynomial(&self) -> &MonicIntPolynomial {
        &self.poly
    }

    /// Exact `s_n`; negative `n` requires constant term ±1.
    pub fn power_sum(&self, n: i64) -> Result<BigInt, AlgebraError> {
        if n >= 0 {
            let n = n as usize;
            if n < self.forward.len() {
                return Ok(self.forward[n].clone());
            }
            return Ok(extend(&self.poly, &self.forward, n));
        }
        let back = self
            .backward
            .as_ref()
            .ok_or(AlgebraError::ConstantTermNotUnit(self.poly.constant_term()))?;
        let m = n.unsigned_abs() as usize;
        if m < back.len() {
            return Ok(back[m].clone());
        }
        let recip = self.poly.reciprocal()?;
        Ok(extend(&recip, back, m))
    }
}

/// Free-function form of [`PowerSumSequence::power_sum`].
pub fn power_sum(seq: &PowerSumSequence, n: i64) -> Result<BigInt, AlgebraError> {
    seq.power_sum(n)
}
