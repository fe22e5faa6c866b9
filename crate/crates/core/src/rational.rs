//! Exact rational time values.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// All time quantities (breakpoints, horizons, interval bounds, future-reach)
/// are exact rationals.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `3`, `-2`, `1.25`, `3/4` or `-7/2`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_decimal(n.trim()).ok_or_else(err)?;
        let d = parse_decimal(d.trim()).ok_or_else(err)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(err)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num::pow(BigInt::from(10), frac.len());
    let value = Rational::new(numer, denom);
    Some(if neg { -value } else { value })
}

/// Canonical fraction form: `3`, `-1/3`, `7/2`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Fixed-point form. Terminating decimals are printed exactly; anything else
/// is rounded to six fractional digits.
pub fn format_decimal(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut digits = 0usize;
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    let exact = d == BigInt::from(1);
    if exact {
        digits = twos.max(fives);
    }
    let places = if exact { digits } else { 6 };
    let scale = num::pow(BigInt::from(10), places);
    let scaled = (r.abs() * Rational::from_integer(scale.clone())).round().to_integer();
    let whole = &scaled / &scale;
    let frac = &scaled % &scale;
    let sign = if r.is_negative() { "-" } else { "" };
    format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = places)
}

/// Lossy conversion for timing/statistics output only.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Greatest common divisor of a set of rationals: the largest `g` such that
/// every value is an integer multiple of `g`. Zero values are ignored; returns
/// `None` when no value is non-zero.
pub fn rational_gcd<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    use num::Integer;
    let mut acc: Option<(BigInt, BigInt)> = None;
    for v in values {
        if v.is_zero() {
            continue;
        }
        let (n, d) = (v.numer().abs(), v.denom().clone());
        acc = Some(match acc {
            None => (n, d),
            Some((an, ad)) => (an.gcd(&n), ad.lcm(&d)),
        });
    }
    acc.map(|(n, d)| Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("1.25").unwrap(), ratio(5, 4));
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("-7/2").unwrap(), ratio(-7, 2));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("1.5/3").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1e3").is_err());
    }

    #[test]
    fn formats() {
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&int(-2)), "-2");
        assert_eq!(format_decimal(&ratio(3, 2)), "1.5");
        assert_eq!(format_decimal(&ratio(-1, 8)), "-0.125");
        assert_eq!(format_decimal(&ratio(1, 3)), "0.333333");
    }

    #[test]
    fn gcd_of_rationals() {
        let vals = [ratio(1, 2), ratio(3, 4), int(2)];
        assert_eq!(rational_gcd(vals.iter()), Some(ratio(1, 4)));
        assert_eq!(rational_gcd([int(0)].iter()), None);
    }
}
