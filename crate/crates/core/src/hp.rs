//! Fixed-point ball arithmetic on big integers.
//!
//! A real ball is an integer mantissa `m` read as `m * 2^-bits`, together with
//! an `f64` radius bounding the distance to the exact value. Complex balls
//! share one radius for the modulus of the error. Radii are rounded upward at
//! every step, so a ball always contains the quantity it stands for.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const GUARD_BITS: u32 = 64;
const MAX_DIGITS: u32 = 280;

/// Round a nonnegative error estimate upward past any f64 rounding.
pub fn up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (1.0 + 4.0 * f64::EPSILON) + f64::MIN_POSITIVE
    }
}

fn round_down(x: f64) -> f64 {
    x - (x.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE)
}

fn round_up(x: f64) -> f64 {
    x + (x.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE)
}

/// `x * 2^e` without intermediate overflow or underflow.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    let big = 2f64.powi(1000);
    let small = 2f64.powi(-1000);
    while e > 1000 {
        x *= big;
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= small;
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Working precision: decimal digits requested and the binary width used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    digits: u32,
    bits: u32,
}

impl Precision {
    /// Panics if `digits` is zero or above 280; callers validate user input first.
    pub fn from_digits(digits: u32) -> Self {
        assert!(
            (1..=MAX_DIGITS).contains(&digits),
            "precision must be between 1 and {MAX_DIGITS} digits"
        );
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS;
        Self { digits, bits }
    }

    pub fn max_digits() -> u32 {
        MAX_DIGITS
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// One unit in the last place of the fixed-point grid.
    pub fn ulp(self) -> f64 {
        ldexp(1.0, -(self.bits as i64))
    }

    /// The target accuracy `10^-digits`.
    pub fn target(self) -> f64 {
        10f64.powi(-(self.digits as i32))
    }
}

fn scaled_to_f64(m: &BigInt, bits: u32) -> f64 {
    let n = m.bits();
    if n <= 1000 {
        ldexp(m.to_f64().unwrap_or(0.0), -(bits as i64))
    } else {
        let s = n - 64;
        let top: BigInt = m >> s;
        ldexp(top.to_f64().unwrap_or(0.0), s as i64 - bits as i64)
    }
}

/// Convert an f64 to a scaled mantissa; the flag says whether it was exact.
fn f64_to_scaled(x: f64, bits: u32) -> (BigInt, bool) {
    assert!(x.is_finite(), "non-finite value {x} cannot enter ball arithmetic");
    if x == 0.0 {
        return (BigInt::zero(), true);
    }
    let raw = x.to_bits();
    let negative = raw >> 63 == 1;
    let exp_raw = ((raw >> 52) & 0x7ff) as i64;
    let frac = raw & ((1u64 << 52) - 1);
    let (man, e) = if exp_raw == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_raw - 1075)
    };
    let shift = e + bits as i64;
    let mut m = BigInt::from(man);
    let exact = if shift >= 0 {
        m <<= shift as u64;
        true
    } else {
        let k = (-shift) as u64;
        let exact = (man.trailing_zeros() as u64) >= k;
        m >>= k;
        exact
    };
    if negative {
        m = -m;
    }
    (m, exact)
}

fn mag_upper(m: &BigInt, bits: u32) -> f64 {
    up(scaled_to_f64(m, bits).abs())
}

/// Real interval `[mid - rad, mid + rad]` with a big-integer midpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct RBall {
    mid: BigInt,
    rad: f64,
    prec: Precision,
}

impl RBall {
    pub fn zero(prec: Precision) -> Self {
        Self {
            mid: BigInt::zero(),
            rad: 0.0,
            prec,
        }
    }

    pub fn from_int(v: impl Into<BigInt>, prec: Precision) -> Self {
        Self {
            mid: v.into() << prec.bits,
            rad: 0.0,
            prec,
        }
    }

    pub fn from_f64(x: f64, prec: Precision) -> Self {
        let (mid, exact) = f64_to_scaled(x, prec.bits);
        Self {
            mid,
            rad: if exact { 0.0 } else { prec.ulp() },
            prec,
        }
    }

    pub fn half(prec: Precision) -> Self {
        Self {
            mid: BigInt::one() << (prec.bits - 1),
            rad: 0.0,
            prec,
        }
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&self.mid, self.prec.bits)
    }

    pub fn with_added_rad(mut self, extra: f64) -> Self {
        self.rad = up(self.rad + extra);
        self
    }

    pub fn lower(&self) -> f64 {
        let m = self.mid_f64();
        round_down(m - self.rad) - 4.0 * f64::EPSILON * (m.abs() + self.rad)
    }

    pub fn upper(&self) -> f64 {
        let m = self.mid_f64();
        round_up(m + self.rad) + 4.0 * f64::EPSILON * (m.abs() + self.rad)
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(&self) -> f64 {
        up(mag_upper(&self.mid, self.prec.bits) + self.rad)
    }

    /// Lower bound on `|x|` over the ball, zero when the ball straddles zero.
    pub fn abs_lower(&self) -> f64 {
        let m = self.mid_f64().abs();
        round_down(m * (1.0 - 4.0 * f64::EPSILON) - self.rad).max(0.0)
    }

    pub fn is_positive(&self) -> bool {
        self.lower() > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.upper() < 0.0
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    pub fn abs(&self) -> RBall {
        let mut out = self.clone();
        if out.mid.is_negative() {
            out.mid = -out.mid;
        }
        out
    }

    pub fn mul_int(&self, k: &BigInt) -> RBall {
        let kf = scaled_to_f64(k, 0).abs();
        RBall {
            mid: &self.mid * k,
            rad: up(self.rad * up(kf)),
            prec: self.prec,
        }
    }

    /// Nearest integer to the midpoint.
    pub fn round_mid(&self) -> BigInt {
        let half = BigInt::one() << (self.prec.bits - 1);
        (&self.mid + half) >> self.prec.bits
    }

    /// Split into nearest integer `q` and remainder `self - q` in `[-1/2, 1/2]`.
    pub fn split_integer(&self) -> (BigInt, RBall) {
        let q = self.round_mid();
        let mid = &self.mid - (&q << self.prec.bits);
        (
            q,
            RBall {
                mid,
                rad: self.rad,
                prec: self.prec,
            },
        )
    }

    /// Nearest integer to `self / other` (midpoints); `other` must be positive.
    pub fn round_div(&self, other: &RBall) -> BigInt {
        let num = (&self.mid << 1u32) + &other.mid;
        let den = &other.mid << 1u32;
        num.div_floor(&den)
    }

    pub fn recip(&self) -> Option<RBall> {
        let lo = self.abs_lower();
        if lo <= 0.0 {
            return None;
        }
        let one = BigInt::one() << (2 * self.prec.bits);
        let mid = one / &self.mid;
        let rad = up(self.rad / (lo * lo) * (1.0 + 8.0 * f64::EPSILON) + self.prec.ulp());
        Some(RBall {
            mid,
            rad,
            prec: self.prec,
        })
    }

    /// Square root of a ball that lies strictly right of zero.
    pub fn sqrt(&self) -> Option<RBall> {
        let lo = self.lower();
        if lo <= 0.0 {
            return None;
        }
        let mid = (&self.mid << self.prec.bits).sqrt();
        let rad = up(self.rad / lo.sqrt() + self.prec.ulp());
        Some(RBall {
            mid,
            rad,
            prec: self.prec,
        })
    }

    /// Whether the whole ball lies strictly between `a` and `b`.
    pub fn strictly_within(&self, a: f64, b: f64) -> bool {
        self.lower() > a && self.upper() < b
    }
}

impl Add for &RBall {
    type Output = RBall;
    fn add(self, rhs: &RBall) -> RBall {
        RBall {
            mid: &self.mid + &rhs.mid,
            rad: up(self.rad + rhs.rad),
            prec: self.prec,
        }
    }
}

impl Sub for &RBall {
    type Output = RBall;
    fn sub(self, rhs: &RBall) -> RBall {
        RBall {
            mid: &self.mid - &rhs.mid,
            rad: up(self.rad + rhs.rad),
            prec: self.prec,
        }
    }
}

impl Neg for &RBall {
    type Output = RBall;
    fn neg(self) -> RBall {
        RBall {
            mid: -&self.mid,
            rad: self.rad,
            prec: self.prec,
        }
    }
}

impl Mul for &RBall {
    type Output = RBall;
    fn mul(self, rhs: &RBall) -> RBall {
        let bits = self.prec.bits;
        let a = mag_upper(&self.mid, bits);
        let b = mag_upper(&rhs.mid, bits);
        RBall {
            mid: (&self.mid * &rhs.mid) >> bits,
            rad: up(a * rhs.rad + b * self.rad + self.rad * rhs.rad + self.prec.ulp()),
            prec: self.prec,
        }
    }
}

/// Complex disk: big-integer midpoint and an error radius on the modulus.
#[derive(Clone, Debug, PartialEq)]
pub struct CBall {
    re: BigInt,
    im: BigInt,
    rad: f64,
    prec: Precision,
}

impl CBall {
    pub fn zero(prec: Precision) -> Self {
        Self {
            re: BigInt::zero(),
            im: BigInt::zero(),
            rad: 0.0,
            prec,
        }
    }

    pub fn one(prec: Precision) -> Self {
        Self::from_ints(1, 0, prec)
    }

    pub fn from_ints(re: impl Into<BigInt>, im: impl Into<BigInt>, prec: Precision) -> Self {
        Self {
            re: re.into() << prec.bits,
            im: im.into() << prec.bits,
            rad: 0.0,
            prec,
        }
    }

    pub fn from_c64(z: Complex64, prec: Precision) -> Self {
        let (re, e1) = f64_to_scaled(z.re, prec.bits);
        let (im, e2) = f64_to_scaled(z.im, prec.bits);
        let rad = if e1 && e2 { 0.0 } else { 2.0 * prec.ulp() };
        Self { re, im, rad, prec }
    }

    pub fn from_real(x: &RBall) -> Self {
        Self {
            re: x.mid.clone(),
            im: BigInt::zero(),
            rad: x.rad,
            prec: x.prec,
        }
    }

    pub fn from_parts(re: &RBall, im: &RBall) -> Self {
        Self {
            re: re.mid.clone(),
            im: im.mid.clone(),
            rad: up(re.rad + im.rad),
            prec: re.prec,
        }
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn with_added_rad(mut self, extra: f64) -> Self {
        self.rad = up(self.rad + extra);
        self
    }

    /// The midpoint as an exact ball (radius dropped).
    pub fn mid_only(&self) -> CBall {
        CBall {
            re: self.re.clone(),
            im: self.im.clone(),
            rad: 0.0,
            prec: self.prec,
        }
    }

    pub fn re(&self) -> RBall {
        RBall {
            mid: self.re.clone(),
            rad: self.rad,
            prec: self.prec,
        }
    }

    pub fn im(&self) -> RBall {
        RBall {
            mid: self.im.clone(),
            rad: self.rad,
            prec: self.prec,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            scaled_to_f64(&self.re, self.prec.bits),
            scaled_to_f64(&self.im, self.prec.bits),
        )
    }

    /// `|midpoint|` rounded up.
    pub fn mid_abs_upper(&self) -> f64 {
        up(self.to_c64().norm())
    }

    pub fn abs_upper(&self) -> f64 {
        up(self.mid_abs_upper() + self.rad)
    }

    pub fn abs_lower(&self) -> f64 {
        round_down(self.to_c64().norm() * (1.0 - 4.0 * f64::EPSILON) - self.rad).max(0.0)
    }

    pub fn conj(&self) -> CBall {
        CBall {
            re: self.re.clone(),
            im: -&self.im,
            rad: self.rad,
            prec: self.prec,
        }
    }

    /// Multiplication by `i`, exact.
    pub fn mul_i(&self) -> CBall {
        CBall {
            re: -&self.im,
            im: self.re.clone(),
            rad: self.rad,
            prec: self.prec,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> CBall {
        let kf = scaled_to_f64(k, 0).abs();
        CBall {
            re: &self.re * k,
            im: &self.im * k,
            rad: up(self.rad * up(kf)),
            prec: self.prec,
        }
    }

    pub fn mul_real(&self, x: &RBall) -> CBall {
        let bits = self.prec.bits;
        let a = self.mid_abs_upper();
        let b = mag_upper(&x.mid, bits);
        CBall {
            re: (&self.re * &x.mid) >> bits,
            im: (&self.im * &x.mid) >> bits,
            rad: up(a * x.rad + b * self.rad + self.rad * x.rad + 2.0 * self.prec.ulp()),
            prec: self.prec,
        }
    }

    pub fn norm_sqr(&self) -> RBall {
        let re = self.re();
        let im = self.im();
        let re = RBall { rad: 0.0, ..re };
        let im = RBall { rad: 0.0, ..im };
        let mid = &(&re * &re) + &(&im * &im);
        let a = self.mid_abs_upper();
        mid.with_added_rad(up(2.0 * a * self.rad + self.rad * self.rad))
    }

    pub fn inv(&self) -> Option<CBall> {
        let lo = self.abs_lower();
        if lo <= 0.0 {
            return None;
        }
        let bits = self.prec.bits;
        let n = &self.re * &self.re + &self.im * &self.im;
        if n.is_zero() {
            return None;
        }
        let re = (&self.re << (2 * bits)) / &n;
        let im = -((&self.im << (2 * bits)) / &n);
        let rad = up(self.rad / (lo * lo) * (1.0 + 8.0 * f64::EPSILON) + 2.0 * self.prec.ulp());
        Some(CBall {
            re,
            im,
            rad,
            prec: self.prec,
        })
    }

    pub fn powi(&self, mut n: u64) -> CBall {
        let mut acc = CBall::one(self.prec);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn same_center(&self, other: &CBall) -> bool {
        self.re == other.re && self.im == other.im
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let d = (self.to_c64() - z).norm();
        d * (1.0 + 4.0 * f64::EPSILON) < self.rad
    }
}

impl Add for &CBall {
    type Output = CBall;
    fn add(self, rhs: &CBall) -> CBall {
        CBall {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
            rad: up(self.rad + rhs.rad),
            prec: self.prec,
        }
    }
}

impl Sub for &CBall {
    type Output = CBall;
    fn sub(self, rhs: &CBall) -> CBall {
        CBall {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
            rad: up(self.rad + rhs.rad),
            prec: self.prec,
        }
    }
}

impl Neg for &CBall {
    type Output = CBall;
    fn neg(self) -> CBall {
        CBall {
            re: -&self.re,
            im: -&self.im,
            rad: self.rad,
            prec: self.prec,
        }
    }
}

impl Mul for &CBall {
    type Output = CBall;
    fn mul(self, rhs: &CBall) -> CBall {
        let bits = self.prec.bits;
        let a = self.mid_abs_upper();
        let b = rhs.mid_abs_upper();
        let re = (&self.re * &rhs.re - &self.im * &rhs.im) >> bits;
        let im = (&self.re * &rhs.im + &self.im * &rhs.re) >> bits;
        CBall {
            re,
            im,
            rad: up(a * rhs.rad + b * self.rad + self.rad * rhs.rad + 2.0 * self.prec.ulp()),
            prec: self.prec,
        }
    }
}

fn atan_inv(x: u32, bits: u32) -> BigInt {
    let x2 = BigInt::from(x as u64 * x as u64);
    let mut term: BigInt = (BigInt::one() << bits) / x;
    let mut sum = term.clone();
    let mut k: u64 = 1;
    loop {
        term /= &x2;
        if term.is_zero() {
            break;
        }
        let t = &term / (2 * k + 1);
        if k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    sum
}

/// π from Machin's formula.
pub fn pi(prec: Precision) -> RBall {
    let g = prec.bits + 32;
    let p: BigInt = atan_inv(5, g) * 16 - atan_inv(239, g) * 4;
    RBall {
        mid: p >> 32u32,
        rad: 2.0 * prec.ulp(),
        prec,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::from_digits(50)
    }

    #[test]
    fn pi_agrees_with_f64() {
        let v = pi(p());
        assert_eq!(v.mid_f64(), std::f64::consts::PI);
        assert!(v.rad() < 1e-65);
    }

    #[test]
    fn pi_digits_beyond_double() {
        // 3.14159265358979323846264338327950288419716939937510...
        let v = pi(p());
        let scaled = v.mul_int(&BigInt::from(10).pow(40)).round_mid();
        assert_eq!(
            scaled.to_string(),
            "31415926535897932384626433832795028841972"
        );
    }

    #[test]
    fn f64_roundtrip_is_exact() {
        for &x in &[0.0, 1.5, -3.25e-7, 1e300, -2.0f64.powi(-60), 0.1] {
            let b = RBall::from_f64(x, p());
            assert_eq!(b.mid_f64(), x);
            assert_eq!(b.rad(), 0.0);
        }
    }

    #[test]
    fn tiny_values_lose_bits_with_radius() {
        let b = RBall::from_f64(1e-300, p());
        assert!(b.rad() > 0.0);
        assert!(b.abs_upper() >= 1e-300 || b.mid_f64() == 0.0);
    }

    #[test]
    fn complex_inverse_and_powers() {
        let z = CBall::from_c64(Complex64::new(-0.45, 3.11), p());
        let w = z.inv().unwrap();
        let one = &z * &w;
        assert!(one.contains(Complex64::new(1.0, 0.0)) || (one.to_c64() - 1.0).norm() < 1e-60);
        let z3 = z.powi(3);
        let direct = &(&z * &z) * &z;
        assert!((z3.to_c64() - direct.to_c64()).norm() < 1e-12);
    }

    #[test]
    fn sqrt_of_two() {
        let two = RBall::from_int(2, p());
        let s = two.sqrt().unwrap();
        assert_eq!(s.mid_f64(), std::f64::consts::SQRT_2);
        let back = &s * &s;
        assert!((&back - &two).abs_upper() < 1e-65);
    }

    #[test]
    fn split_integer_centres_remainder() {
        let x = RBall::from_f64(-7.75, p());
        let (q, r) = x.split_integer();
        assert_eq!(q, BigInt::from(-8));
        assert_eq!(r.mid_f64(), 0.25);
        let y = RBall::from_f64(2.4, p());
        let (q, r) = y.split_integer();
        assert_eq!(q, BigInt::from(2));
        assert!((r.mid_f64() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn bounds_bracket_midpoint() {
        let x = RBall::from_f64(0.3, p()).with_added_rad(1e-20);
        assert!(x.lower() < 0.3 && x.upper() > 0.3);
        assert!(x.is_positive());
        let z = RBall::zero(p()).with_added_rad(1e-30);
        assert!(z.contains_zero());
    }
}
