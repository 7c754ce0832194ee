//! Exact scalar types: arbitrary-precision rationals and Gaussian rationals.
//!
//! `Rat` is the workhorse. `GaussRat` (elements of Q(i)) appears wherever a
//! factor of `i` is forced on us: gauge generator matrices, Fourier-mode
//! derivatives and the reparametrization extension terms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Arbitrary-precision rational number.
pub type Rat = BigRational;

/// Convenience constructor for integer rationals.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Convenience constructor for `n/d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse "a/b" or "a" into a rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

/// Render a rational as `num` or `num/den`, the serialization used in every
/// report this crate emits.
pub fn rat_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exact binomial coefficient with the convention used throughout the
/// charge calculus: zero whenever the lower argument is negative, exceeds
/// the upper one, or the upper argument is negative.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// A Gaussian rational `re + im * i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        GaussRat { re, im: <Rat as Zero>::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::from_rat(rat_int(n))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussRat { re: <Rat as Zero>::zero(), im: <Rat as One>::one() }
    }

    pub fn zero() -> Self {
        GaussRat { re: <Rat as Zero>::zero(), im: <Rat as Zero>::zero() }
    }

    pub fn one() -> Self {
        GaussRat { re: <Rat as One>::one(), im: <Rat as Zero>::zero() }
    }

    pub fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }

    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }

    /// Multiplicative inverse. Panics on zero, like integer division.
    pub fn inv(&self) -> Self {
        let norm = &self.re * &self.re + &self.im * &self.im;
        assert!(!Zero::is_zero(&norm), "inverse of zero Gaussian rational");
        GaussRat { re: &self.re / &norm, im: -&self.im / &norm }
    }

    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Multiply by `i`.
    pub fn times_i(&self) -> Self {
        GaussRat { re: -self.im.clone(), im: self.re.clone() }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        GaussRat { re: &self.re * r, im: &self.im * r }
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.im) {
            write!(f, "{}", rat_string(&self.re))
        } else if Zero::is_zero(&self.re) {
            write!(f, "{}*i", rat_string(&self.im))
        } else if self.im.is_negative() {
            write!(f, "{}{}*i", rat_string(&self.re), rat_string(&self.im))
        } else {
            write!(f, "{}+{}*i", rat_string(&self.re), rat_string(&self.im))
        }
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: GaussRat) -> GaussRat {
        GaussRat { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl<'a> AddAssign<&'a GaussRat> for GaussRat {
    fn add_assign(&mut self, rhs: &'a GaussRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: GaussRat) -> GaussRat {
        GaussRat { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl<'a> SubAssign<&'a GaussRat> for GaussRat {
    fn sub_assign(&mut self, rhs: &'a GaussRat) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re, im: -self.im }
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: GaussRat) -> GaussRat {
        &self * &rhs
    }
}

impl<'a, 'b> Mul<&'b GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &'b GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl<'a> MulAssign<&'a GaussRat> for GaussRat {
    fn mul_assign(&mut self, rhs: &'a GaussRat) {
        *self = &*self * rhs;
    }
}

/// Coefficient field abstraction shared by the polynomial and linear-algebra
/// kernels. Only the handful of operations exact elimination needs.
pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Self;
}

impl Field for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        assert!(!Zero::is_zero(self), "inverse of zero rational");
        self.recip()
    }
}

impl Field for GaussRat {
    fn zero() -> Self {
        GaussRat::zero()
    }
    fn one() -> Self {
        GaussRat::one()
    }
    fn is_zero(&self) -> bool {
        GaussRat::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self.clone() + rhs.clone()
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.clone() - rhs.clone()
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn inv(&self) -> Self {
        GaussRat::inv(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(5, 0), BigInt::from(1));
        assert_eq!(binomial(5, -1), BigInt::from(0));
        assert_eq!(binomial(3, 4), BigInt::from(0));
        assert_eq!(binomial(-1, 0), BigInt::from(0));
    }

    #[test]
    fn gauss_rat_field_ops() {
        let x = GaussRat::new(rat(1, 2), rat(-3, 1));
        let y = x.inv();
        assert_eq!(&x * &y, GaussRat::one());
        assert_eq!(x.times_i(), &x * &GaussRat::i());
    }

    #[test]
    fn rat_parsing_and_printing() {
        assert_eq!(parse_rat("3/4"), Some(rat(3, 4)));
        assert_eq!(parse_rat("-7"), Some(rat_int(-7)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(rat_string(&rat(3, 4)), "3/4");
        assert_eq!(rat_string(&rat_int(-7)), "-7");
    }
}
