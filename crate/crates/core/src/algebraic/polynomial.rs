use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::AlgebraError;
use crate::hp::CBall;

/// Largest coefficient magnitude accepted, so that every coefficient is an exact f64.
const MAX_COEFF: i64 = 1 << 53;
const MAX_DEGREE: usize = 64;

/// Monic polynomial `X^d + c_{d-1} X^{d-1} + ... + c_0` with integer coefficients.
///
/// `coefficients()` holds `c_0..c_{d-1}`; the leading 1 is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct MonicIntPolynomial {
    coeffs: Vec<i64>,
}

impl MonicIntPolynomial {
    /// Build from `c_0..c_{d-1}` (leading coefficient omitted).
    pub fn new(lower: Vec<i64>) -> Result<Self, AlgebraError> {
        if lower.len() < 2 {
            return Err(AlgebraError::InvalidPolynomial(format!(
                "degree must be at least 2, got {}",
                lower.len()
            )));
        }
        if lower.len() > MAX_DEGREE {
            return Err(AlgebraError::InvalidPolynomial(format!(
                "degree {} exceeds the supported maximum {MAX_DEGREE}",
                lower.len()
            )));
        }
        if let Some(c) = lower.iter().find(|c| c.abs() > MAX_COEFF) {
            return Err(AlgebraError::InvalidPolynomial(format!(
                "coefficient {c} exceeds 2^53 in magnitude"
            )));
        }
        Ok(Self { coeffs: lower })
    }

    /// Build from the full list `c_0, ..., c_{d-1}, 1`, constant term first.
    pub fn from_coefficients(all: &[i64]) -> Result<Self, AlgebraError> {
        match all.split_last() {
            Some((&1, lower)) => Self::new(lower.to_vec()),
            Some((&lead, _)) => Err(AlgebraError::InvalidPolynomial(format!(
                "leading coefficient must be 1 (got {lead}); coefficients are listed constant term first"
            ))),
            None => Err(AlgebraError::InvalidPolynomial("no coefficients".into())),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    /// `c_0, ..., c_{d-1}, 1`.
    pub fn all_coefficients(&self) -> Vec<i64> {
        let mut v = self.coeffs.clone();
        v.push(1);
        v
    }

    pub fn constant_term(&self) -> i64 {
        self.coeffs[0]
    }

    /// Value and derivative at `z` in double precision.
    pub fn eval_with_derivative_f64(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c as f64;
        }
        (p, dp)
    }

    pub fn eval_ball(&self, z: &CBall) -> CBall {
        self.eval_with_derivative_ball(z).0
    }

    pub fn eval_with_derivative_ball(&self, z: &CBall) -> (CBall, CBall) {
        let prec = z.precision();
        let mut p = CBall::one(prec);
        let mut dp = CBall::zero(prec);
        for &c in self.coeffs.iter().rev() {
            dp = &(&dp * z) + &p;
            p = &(&p * z) + &CBall::from_ints(c, 0, prec);
        }
        (p, dp)
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut p = BigInt::one();
        for &c in self.coeffs.iter().rev() {
            p = p * x + c;
        }
        p
    }

    /// `X^d p(1/X) / c_0`, defined when `c_0 = ±1`.
    pub fn reciprocal(&self) -> Result<Self, AlgebraError> {
        let c0 = self.constant_term();
        if c0.abs() != 1 {
            return Err(AlgebraError::ConstantTermNotUnit(c0));
        }
        let d = self.degree();
        let all = self.all_coefficients();
        let lower = (0..d).map(|i| all[d - i] * c0).collect();
        Self::new(lower)
    }

    /// Integer roots, found by testing every divisor of the constant term.
    pub fn integer_roots(&self) -> Vec<i64> {
        let c0 = self.constant_term();
        if c0 == 0 {
            let mut roots = vec![0];
            let shifted = Self {
                coeffs: self.coeffs[1..].to_vec(),
            };
            if !shifted.coeffs.is_empty() {
                roots.extend(shifted.integer_roots_nonzero());
            }
            roots.sort_unstable();
            roots.dedup();
            return roots;
        }
        self.integer_roots_nonzero()
    }

    fn integer_roots_nonzero(&self) -> Vec<i64> {
        let c0 = self.coeffs.first().copied().unwrap_or(1).unsigned_abs();
        if c0 == 0 {
            return vec![0];
        }
        let mut roots = Vec::new();
        let mut q: u64 = 1;
        while q * q <= c0 {
            if c0 % q == 0 {
                for cand in [q, c0 / q] {
                    for s in [1i64, -1] {
                        let x = s * cand as i64;
                        if self.eval_int(&BigInt::from(x)).is_zero() {
                            roots.push(x);
                        }
                    }
                }
            }
            q += 1;
        }
        roots.sort_unstable();
        roots.dedup();
        roots
    }

    /// Resultant of the polynomial and its derivative; zero iff a root repeats.
    pub fn derivative_resultant(&self) -> BigInt {
        let d = self.degree();
        let p: Vec<BigInt> = self
            .all_coefficients()
            .iter()
            .rev()
            .map(|&c| BigInt::from(c))
            .collect();
        let dp: Vec<BigInt> = (0..d)
            .map(|i| BigInt::from(self.all_coefficients()[d - i]) * BigInt::from((d - i) as i64))
            .collect();
        let n = 2 * d - 1;
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for r in 0..d - 1 {
            for (j, c) in p.iter().enumerate() {
                m[r][r + j] = c.clone();
            }
        }
        for r in 0..d {
            for (j, c) in dp.iter().enumerate() {
                m[d - 1 + r][r + j] = c.clone();
            }
        }
        bareiss_determinant(m)
    }

    pub fn is_square_free(&self) -> bool {
        !self.derivative_resultant().is_zero()
    }
}

fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        if k + 1 == n {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

impl TryFrom<Vec<i64>> for MonicIntPolynomial {
    type Error = AlgebraError;
    fn try_from(all: Vec<i64>) -> Result<Self, Self::Error> {
        Self::from_coefficients(&all)
    }
}

impl From<MonicIntPolynomial> for Vec<i64> {
    fn from(p: MonicIntPolynomial) -> Self {
        p.all_coefficients()
    }
}

impl FromStr for MonicIntPolynomial {
    type Err = AlgebraError;

    /// Comma-separated integers, constant term first: `"1,10,1,1"` is `X^3 + X^2 + 10X + 1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parsed: Result<Vec<i64>, _> = s
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect();
        let all = parsed.map_err(|e| {
            AlgebraError::InvalidPolynomial(format!("cannot parse {s:?} as integer list: {e}"))
        })?;
        Self::from_coefficients(&all)
    }
}

impl fmt::Display for MonicIntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        write!(f, "X^{d}")?;
        for i in (0..d).rev() {
            let c = self.coeffs[i];
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { '-' } else { '+' };
            let a = c.unsigned_abs();
            let body = match (i, a) {
                (0, _) => a.to_string(),
                (1, 1) => "X".to_string(),
                (1, _) => format!("{a}X"),
                (_, 1) => format!("X^{i}"),
                _ => format!("{a}X^{i}"),
            };
            write!(f, " {sign} {body}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_constant_first() {
        let p: MonicIntPolynomial = "1,10,1,1".parse().unwrap();
        assert_eq!(p.coefficients(), &[1, 10, 1]);
        assert_eq!(p.to_string(), "X^3 + X^2 + 10X + 1");
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn rejects_garbage_and_non_monic() {
        assert!("1,x,1".parse::<MonicIntPolynomial>().is_err());
        assert!("1,10,1,2".parse::<MonicIntPolynomial>().is_err());
        assert!("5,1".parse::<MonicIntPolynomial>().is_err());
        assert!("".parse::<MonicIntPolynomial>().is_err());
    }

    #[test]
    fn display_handles_signs() {
        let p: MonicIntPolynomial = "-1,-1,0,1".parse().unwrap();
        assert_eq!(p.to_string(), "X^3 - X - 1");
    }

    #[test]
    fn reciprocal_of_f() {
        let p: MonicIntPolynomial = "1,10,1,1".parse().unwrap();
        let r = p.reciprocal().unwrap();
        assert_eq!(r.to_string(), "X^3 + 10X^2 + X + 1");
        let q: MonicIntPolynomial = "2,0,1".parse().unwrap();
        assert!(q.reciprocal().is_err());
    }

    #[test]
    fn rational_roots() {
        let p: MonicIntPolynomial = "-8,0,0,1".parse().unwrap();
        assert_eq!(p.integer_roots(), vec![2]);
        let f: MonicIntPolynomial = "1,10,1,1".parse().unwrap();
        assert!(f.integer_roots().is_empty());
        let g: MonicIntPolynomial = "0,-1,0,1".parse().unwrap();
        assert_eq!(g.integer_roots(), vec![-1, 0, 1]);
    }

    #[test]
    fn square_free_detection() {
        // Discriminant of X^3 + X^2 + 10X + 1 by the cubic formula
        // b^2c^2 - 4c^3 - 4b^3d - 27d^2 + 18bcd = 100 - 4000 - 4 - 27 + 180.
        let f: MonicIntPolynomial = "1,10,1,1".parse().unwrap();
        assert_eq!(f.derivative_resultant().abs(), BigInt::from(3751));
        assert!(f.is_square_free());
        let sq: MonicIntPolynomial = "1,-2,1".parse().unwrap();
        assert!(!sq.is_square_free());
        let cube: MonicIntPolynomial = "-1,3,-3,1".parse().unwrap();
        assert!(!cube.is_square_free());
    }
}
