//! Rational scalars.
//!
//! `Rat` is `num`'s arbitrary-precision rational, which keeps every value
//! reduced with a positive denominator. Its `Display`/`FromStr` pair is the
//! `"p/q"` text form used by map documents.

use num::{BigInt, One, Zero};

pub type Rat = num::BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Parses `"p"`, `"-p"` or `"p/q"`; whitespace around the value is ignored.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let r: Rat = s.parse().ok()?;
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("2/3"), Some(ratio(2, 3)));
        assert_eq!(parse_rat("-4/6"), Some(ratio(-2, 3)));
        assert_eq!(parse_rat(" 7 "), Some(rat(7)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("x"), None);
        assert_eq!(ratio(-2, 4).to_string(), "-1/2");
        assert_eq!(rat(3).to_string(), "3");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(2, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
