//! Reference evaluations shared by the property suites.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

use fractal_core::{QuadExt, Rat};

pub fn big(r: &Rat) -> BigRational {
    BigRational::new(r.numer(), r.denom())
}

// √3 lies strictly between these two decimals.
fn sqrt3_bracket() -> (BigRational, BigRational) {
    let scale = BigInt::from(10u64).pow(30);
    let lo = BigInt::parse_bytes(b"1732050807568877293527446341505", 10).unwrap();
    (
        BigRational::new(lo.clone(), scale.clone()),
        BigRational::new(lo + 1, scale),
    )
}

/// Sign of `a + b√3` from a rational enclosure of √3; `None` when the
/// enclosure straddles zero.
pub fn interval_sign(x: &QuadExt) -> Option<i32> {
    let (lo, hi) = sqrt3_bracket();
    let a = big(x.rational());
    let b = big(x.surd());
    let (e1, e2) = (&a + &b * &lo, &a + &b * &hi);
    let (min, max) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
    let zero = BigRational::from_integer(BigInt::from(0));
    if min > zero {
        Some(1)
    } else if max < zero {
        Some(-1)
    } else if min == zero && max == zero {
        Some(0)
    } else {
        None
    }
}

fn sgn(x: &BigRational) -> i32 {
    match x.numer().sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// Exact tie-break: compare `a²` with `3b²` when the parts disagree in sign.
pub fn exact_sign(x: &QuadExt) -> i32 {
    let a = big(x.rational());
    let b = big(x.surd());
    let (sa, sb) = (sgn(&a), sgn(&b));
    if sb == 0 || sa == sb {
        return sa;
    }
    if sa == 0 {
        return sb;
    }
    let three = BigRational::from_integer(BigInt::from(3));
    if &a * &a > &b * &b * three {
        sa
    } else {
        sb
    }
}

/// Sign from the enclosure, falling back to exact squaring on a straddle.
pub fn oracle_sign(x: &QuadExt) -> i32 {
    interval_sign(x).unwrap_or_else(|| exact_sign(x))
}
