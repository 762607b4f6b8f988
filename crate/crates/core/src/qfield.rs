//! Exact arithmetic in the real quadratic field ℚ(√3).
//!
//! Every coordinate, squared length and area in the crate is a [`QuadExt`]:
//! a pair of rationals `(a, b)` standing for `a + b·√3`. Since √3 is
//! irrational the pair is unique, so structural equality is numeric
//! equality. Signs and comparisons are decided exactly, without floats.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: Rat,
    b: Rat,
}

impl QuadExt {
    pub fn new(a: Rat, b: Rat) -> Self {
        QuadExt { a, b }
    }

    pub fn zero() -> Self {
        QuadExt::default()
    }

    pub fn one() -> Self {
        QuadExt::from(Rat::one())
    }

    /// √3.
    pub fn sqrt3() -> Self {
        QuadExt::new(Rat::zero(), Rat::one())
    }

    /// Rational part `a`.
    pub fn rational(&self) -> &Rat {
        &self.a
    }

    /// Coefficient `b` of √3.
    pub fn surd(&self) -> &Rat {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.a)
    }

    pub fn conj(&self) -> Self {
        QuadExt::new(self.a.clone(), -&self.b)
    }

    /// Field norm `a² − 3b²`.
    pub fn norm(&self) -> Rat {
        &(&self.a * &self.a) - &(&Rat::from_integer(3) * &(&self.b * &self.b))
    }

    pub fn scale(&self, k: &Rat) -> Self {
        QuadExt::new(&self.a * k, &self.b * k)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDivision);
        }
        let inv_norm = self.norm().recip()?;
        Ok(self.conj().scale(&inv_norm))
    }

    pub fn checked_div(&self, rhs: &QuadExt) -> Result<Self> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = QuadExt::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Exact sign of `a + b√3`: −1, 0 or +1.
    pub fn sign(&self) -> i32 {
        let (sa, sb) = (self.a.signum(), self.b.signum());
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: the term with the larger square wins.
        let a2 = &self.a * &self.a;
        let b2 = &Rat::from_integer(3) * &(&self.b * &self.b);
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("√3 is irrational"),
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        // floor(√(3p²)/q) is within one of floor(|b|√3); the exact sign test
        // settles the remainder.
        let p = self.b.numer();
        let q = self.b.denom();
        let root = (BigInt::from(3) * &p * &p).sqrt().div_floor(&q);
        let mut est = self.a.floor() + if p.is_negative() { -root - 1 } else { root };
        let diff = |k: &BigInt| (self - &QuadExt::from(Rat::from(k.clone()))).sign();
        while diff(&est) < 0 {
            est -= 1;
        }
        loop {
            let next = &est + 1;
            if diff(&next) >= 0 {
                est = next;
            } else {
                break;
            }
        }
        est
    }

    /// Decimal rendering with exactly `digits` fractional digits, rounded to
    /// nearest (ties, only possible for rationals, away from zero).
    pub fn to_decimal(&self, digits: usize) -> String {
        let ten_pow = Rat::from(BigInt::from(10u32).pow(digits as u32));
        let scaled = self.scale(&ten_pow);
        let negative = scaled.sign() < 0;
        let magnitude = if negative { -scaled } else { scaled };
        let rounded = (&magnitude + &QuadExt::from(Rat::new(1, 2))).floor();

        let mut text = rounded.to_string();
        if digits > 0 {
            if text.len() <= digits {
                text = format!("{}{}", "0".repeat(digits + 1 - text.len()), text);
            }
            text.insert(text.len() - digits, '.');
        }
        if negative && !rounded.is_zero() {
            text.insert(0, '-');
        }
        text
    }

    /// Nearest-ish `f64`, for display and spatial binning only.
    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * 3f64.sqrt()
    }
}

impl From<Rat> for QuadExt {
    fn from(a: Rat) -> Self {
        QuadExt::new(a, Rat::zero())
    }
}

impl From<i64> for QuadExt {
    fn from(n: i64) -> Self {
        QuadExt::from(Rat::from_integer(n))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &QuadExt) -> QuadExt {
        QuadExt::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl<'a> Sub<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &QuadExt) -> QuadExt {
        QuadExt::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl<'a> Mul<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &QuadExt) -> QuadExt {
        if self.b.is_zero() {
            return rhs.scale(&self.a);
        }
        if rhs.b.is_zero() {
            return self.scale(&rhs.a);
        }
        let three = Rat::from_integer(3);
        let a = &(&self.a * &rhs.a) + &(&three * &(&self.b * &rhs.b));
        let b = &(&self.a * &rhs.b) + &(&rhs.a * &self.b);
        QuadExt::new(a, b)
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::new(-&self.a, -&self.b)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

macro_rules! forward_binop {
    ($imp:ident, $method:ident) => {
        impl $imp<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $imp<&'a QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
        impl<'a> $imp<QuadExt> for &'a QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&QuadExt> for QuadExt {
    fn add_assign(&mut self, rhs: &QuadExt) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl Sum for QuadExt {
    fn sum<I: Iterator<Item = QuadExt>>(iter: I) -> QuadExt {
        iter.fold(QuadExt::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl<'a> Sum<&'a QuadExt> for QuadExt {
    fn sum<I: Iterator<Item = &'a QuadExt>>(iter: I) -> QuadExt {
        iter.fold(QuadExt::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl fmt::Display for QuadExt {
    /// `a` or `a+b*s3`, e.g. `1/4+-1/12*s3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}*s3", self.a, self.b)
        }
    }
}

impl FromStr for QuadExt {
    type Err = Error;

    /// Inverse of `Display`; also accepts a bare `b*s3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix("*s3") else {
            return Ok(QuadExt::from(s.parse::<Rat>()?));
        };
        // The separator is the first `+` that is not a leading sign.
        match body.char_indices().skip(1).find(|&(_, c)| c == '+') {
            Some((i, _)) => Ok(QuadExt::new(body[..i].parse()?, body[i + 1..].parse()?)),
            None => Ok(QuadExt::new(Rat::zero(), body.parse()?)),
        }
    }
}

impl serde::Serialize for QuadExt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
