//! Arbitrary-precision rationals with an inline machine-word fast path.
//!
//! Coordinates of iterated curves stay small for many depths (denominators
//! are powers of the scale factor), so values are kept as reduced `i64`
//! pairs and only promoted to [`BigRational`] when an intermediate result
//! no longer fits. The representation is canonical: a value that fits in the
//! small form is never stored in the big form, which keeps derived equality
//! and hashing sound.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::Error;

#[derive(Clone, Debug)]
enum Repr {
    /// Reduced, `den > 0`, `num != i64::MIN`.
    Small(i64, i64),
    /// Reduced and too large for `Small`.
    Big(BigRational),
}

/// An exact rational number in canonical (reduced, positive denominator) form.
#[derive(Clone, Debug)]
pub struct Rat(Repr);

fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Rat {
    pub fn zero() -> Self {
        Rat(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rat(Repr::Small(1, 1))
    }

    pub fn from_integer(n: i64) -> Self {
        Rat::from_i128(n as i128, 1)
    }

    /// `num / den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat::from_i128(num as i128, den as i128)
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::ZeroDivision);
        }
        Ok(Rat::from_big(BigRational::new(num, den)))
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        if num == 0 {
            return Rat::zero();
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        if fits(n) && fits(d) {
            Rat(Repr::Small(n as i64, d as i64))
        } else {
            Rat(Repr::Big(BigRational::new_raw(
                BigInt::from(n),
                BigInt::from(d),
            )))
        }
    }

    /// Wraps an already-reduced big rational, demoting it when it fits.
    fn from_big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Rat(Repr::Small(n, d));
            }
        }
        Rat(Repr::Big(r))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    /// −1, 0 or +1.
    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(r) => match r.numer().sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Self, Error> {
        match &self.0 {
            Repr::Small(0, _) => Err(Error::ZeroDivision),
            Repr::Small(n, d) => Ok(Rat::from_i128(*d as i128, *n as i128)),
            Repr::Big(r) => Ok(Rat::from_big(r.recip())),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Rat::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(n.div_floor(d)),
            Repr::Big(r) => r.numer().div_floor(r.denom()),
        }
    }

    /// The exact square root when both numerator and denominator are perfect
    /// squares.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.signum() < 0 {
            return None;
        }
        let (n, d) = (self.numer(), self.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &rn * &rn == n && &rd * &rd == d {
            Some(Rat::from_big(BigRational::new_raw(rn, rd)))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_integer(n)
    }
}

impl From<u32> for Rat {
    fn from(n: u32) -> Self {
        Rat::from_integer(n as i64)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_big(BigRational::from_integer(n))
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.numer().hash(state);
                r.denom().hash(state);
            }
        }
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) => rhs.clone(),
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rat::from_i128(a + c, b)
                } else {
                    Rat::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Rat::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl<'a> Sub<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        match (&self.0, &rhs.0) {
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rat::from_i128(a - c, b)
                } else {
                    Rat::from_i128(a * d - c * b, b * d)
                }
            }
            _ => Rat::from_big(self.to_big() - rhs.to_big()),
        }
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => Rat::zero(),
            (Repr::Small(1, 1), _) => rhs.clone(),
            (_, Repr::Small(1, 1)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rat::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl<'a> Div<&'a Rat> for &'a Rat {
    type Output = Rat;
    /// Panics on division by zero; use [`Rat::recip`] for a checked path.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Rat) -> Rat {
        self * &rhs.recip().expect("division by zero")
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat(Repr::Small(-n, *d)),
            Repr::Big(r) => Rat::from_big(-r.clone()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

macro_rules! forward_binop {
    ($imp:ident, $method:ident) => {
        impl $imp<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $imp<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                (&self).$method(rhs)
            }
        }
        impl<'a> $imp<Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        *self = &*self * rhs;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| &acc + &x)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |acc, x| &acc * &x)
    }
}

impl fmt::Display for Rat {
    /// `p/q`, or just `p` for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `p` or `p/q` with optional leading sign on `p`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = |msg: &str| Error::Parse {
            message: format!("invalid rational `{s}`: {msg}"),
        };
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let valid = |t: &str, allow_sign: bool| {
            let digits = if allow_sign {
                t.strip_prefix(['-', '+']).unwrap_or(t)
            } else {
                t
            };
            !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        };
        if !valid(num, true) || !valid(den, false) {
            return Err(bad("expected `p` or `p/q`"));
        }
        let n: BigInt = num.parse().map_err(|_| bad("numerator"))?;
        let d: BigInt = den.parse().map_err(|_| bad("denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        Rat::from_bigints(n, d)
    }
}

impl serde::Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = <std::borrow::Cow<'de, str>>::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_small_and_big() {
        let big = Rat::from_integer(i64::MAX) + Rat::one();
        assert_eq!(big.to_string(), "9223372036854775808");
        let back = &big - &Rat::one();
        assert_eq!(back, Rat::from_integer(i64::MAX));
        assert!(matches!(back.0, Repr::Small(..)));
    }

    #[test]
    fn reduces_and_normalizes_sign() {
        assert_eq!(Rat::new(6, -4), Rat::new(-3, 2));
        assert_eq!(Rat::new(6, -4).to_string(), "-3/2");
        assert_eq!(Rat::new(0, -7), Rat::zero());
    }

    #[test]
    fn parse_forms() {
        assert_eq!("3".parse::<Rat>().unwrap(), Rat::from_integer(3));
        assert_eq!("-2/4".parse::<Rat>().unwrap(), Rat::new(-1, 2));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("1/-2".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn pow_and_floor() {
        assert_eq!(Rat::new(4, 3).pow(2), Rat::new(16, 9));
        assert_eq!(Rat::new(-7, 2).floor(), BigInt::from(-4));
        let huge = Rat::new(8, 3).pow(40);
        assert_eq!(huge.denom(), BigInt::from(3).pow(40));
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(Rat::new(1, 81).sqrt_exact(), Some(Rat::new(1, 9)));
        assert_eq!(Rat::new(1, 8).sqrt_exact(), None);
    }

    #[test]
    fn ordering_mixed_repr() {
        let big = Rat::new(i64::MAX, 1) * Rat::new(4, 1);
        assert!(big > Rat::one());
        assert!(-&big < Rat::zero());
    }
}
