//! Exact rational helpers and the `"p/q"` text encoding used by the file
//! formats.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_usize(v: usize) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `⌊q⌋` as an integer. Panics only if the value does not fit in `i64`.
pub fn floor_i64(q: &Rational) -> i64 {
    let f = q.numer().div_floor(q.denom());
    i64::try_from(f).expect("rational floor out of range")
}

pub fn ceil_i64(q: &Rational) -> i64 {
    let c = -((-q.numer()).div_floor(q.denom()));
    i64::try_from(c).expect("rational ceil out of range")
}

pub fn is_integral(q: &Rational) -> bool {
    q.denom().is_one()
}

/// Canonical text form: `"n"` for integers, `"p/q"` otherwise, always reduced.
pub fn to_text(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn is_nonnegative(q: &Rational) -> bool {
    !q.is_negative()
}

pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&to_text(q))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse(&s).ok_or_else(|| serde::de::Error::custom(format!("invalid rational `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_and_ceil() {
        assert_eq!(floor_i64(&ratio(3, 2)), 1);
        assert_eq!(ceil_i64(&ratio(3, 2)), 2);
        assert_eq!(floor_i64(&ratio(-3, 2)), -2);
        assert_eq!(ceil_i64(&ratio(-3, 2)), -1);
        assert_eq!(floor_i64(&int(4)), 4);
        assert_eq!(ceil_i64(&int(4)), 4);
    }

    #[test]
    fn text_round_trip() {
        assert_eq!(parse("3/7"), Some(ratio(3, 7)));
        assert_eq!(parse("6/14"), Some(ratio(3, 7)));
        assert_eq!(parse(" 5 "), Some(int(5)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
        assert_eq!(to_text(&ratio(6, 4)), "3/2");
        assert_eq!(to_text(&int(-2)), "-2");
    }
}
