//! Exact rational scalars and their textual forms.
//!
//! Every structural computation runs over [`Rational`], an arbitrary-precision
//! fraction kept in canonical form (positive denominator, reduced). Text uses
//! `"num/den"`, or a bare integer when the denominator is one.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {text:?}: {reason}")]
pub struct ParseRationalError {
    pub text: String,
    pub reason: &'static str,
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Panics on a zero denominator; meant for literals.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError { text: text.to_string(), reason };
    let trimmed = text.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (trimmed, None),
    };
    let parse_int = |s: &str| -> Result<BigInt, ParseRationalError> {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("expected an integer or num/den"));
        }
        s.parse::<BigInt>().map_err(|_| err("expected an integer or num/den"))
    };
    let num = parse_int(num)?;
    let den = match den {
        Some(d) => parse_int(d)?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Nearest multiple of `2^-bits` (ties away from zero).
pub fn round_dyadic(value: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = value * Rational::from_integer(scale.clone());
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let rounded = if scaled.is_negative() {
        -((-scaled) + half).floor()
    } else {
        (scaled + half).floor()
    };
    Rational::new(rounded.to_integer(), scale)
}

/// Round to `bits` significant binary digits (ties away from zero).
pub fn round_significant(value: &Rational, bits: u32) -> Rational {
    if value.is_zero() {
        return Rational::zero();
    }
    let mag = value.numer().bits() as i64 - value.denom().bits() as i64;
    let shift = bits as i64 - mag;
    let scale = Rational::from_integer(BigInt::one() << shift.unsigned_abs());
    let scaled = if shift >= 0 { value * &scale } else { value / &scale };
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let rounded = if scaled.is_negative() {
        -((-scaled) + half).floor()
    } else {
        (scaled + half).floor()
    };
    if shift >= 0 {
        rounded / scale
    } else {
        rounded * scale
    }
}

pub fn pow10(exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), exp as usize)
}

/// `10^exp` as a rational, for any sign of `exp`.
pub fn pow10_rational(exp: i64) -> Rational {
    let p = Rational::from_integer(pow10(exp.unsigned_abs() as u32));
    if exp >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Scientific notation with `digits` significant digits, e.g. `1.2500e-3`.
pub fn format_scientific(value: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    if value.is_zero() {
        return "0".to_string();
    }
    let sign = if value.is_negative() { "-" } else { "" };
    let abs = value.abs();

    // Decimal exponent e with 10^e <= |x| < 10^(e+1); start from a bit-length estimate.
    let bits = abs.numer().bits() as i64 - abs.denom().bits() as i64;
    let mut exp = (bits as f64 * std::f64::consts::LOG10_2).floor() as i64;
    while pow10_rational(exp) > abs {
        exp -= 1;
    }
    while pow10_rational(exp + 1) <= abs {
        exp += 1;
    }

    let shift = digits as i64 - 1 - exp;
    let scaled = &abs * pow10_rational(shift);
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let mut mantissa = q;
    if (r << 1usize).cmp(scaled.denom()) != Ordering::Less {
        mantissa += 1;
    }
    if mantissa >= pow10(digits as u32) {
        mantissa /= 10;
        exp += 1;
    }
    let text = mantissa.to_str_radix(10);
    let (head, tail) = text.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn sign_of(value: &Rational) -> Sign {
    if value.is_zero() {
        Sign::NoSign
    } else if value.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}
