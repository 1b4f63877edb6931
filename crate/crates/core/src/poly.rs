//! Dense univariate polynomials with rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::scalar::{common_denominator, format_rational};
use crate::Rational;

/// Coefficients in ascending degree; never stores a trailing zero, so the
/// zero polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Polynomial { coeffs: vec![Rational::zero(), Rational::one()] }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| crate::scalar::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Multiply by `x`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    /// Scaled to coprime integer coefficients with a positive leading term.
    /// Keeps coefficient growth in check during remainder sequences.
    pub fn primitive(&self) -> Polynomial {
        let Some(lead) = self.leading() else {
            return Self::zero();
        };
        let den = common_denominator(&self.coeffs);
        let ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, v| num_integer::Integer::gcd(&g, v));
        let g = if lead.is_negative() { -g } else { g };
        Polynomial {
            coeffs: ints.into_iter().map(|v| Rational::from_integer(v / &g)).collect(),
        }
    }

    /// Integer coefficients with the same sign behaviour as `self`
    /// (a positive multiple), for fast sign evaluation.
    pub fn integer_multiple(&self) -> Vec<BigInt> {
        let den = common_denominator(&self.coeffs);
        self.coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (k, a.is_one()) {
                (0, _) => write!(f, "{}", format_rational(&a))?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{}*x", format_rational(&a))?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{}*x^{k}", format_rational(&a))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Polynomial::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Polynomial::from_i64(&[0, 0]).degree(), None);
    }

    #[test]
    fn arithmetic() {
        let a = Polynomial::from_i64(&[-1, 1]);
        let b = Polynomial::from_i64(&[1, 1]);
        assert_eq!(&a * &b, Polynomial::from_i64(&[-1, 0, 1]));
        assert_eq!(&a + &b, Polynomial::from_i64(&[0, 2]));
        assert_eq!(&a - &a, Polynomial::zero());
        assert_eq!(a.shift(), Polynomial::from_i64(&[0, -1, 1]));
        assert_eq!(Polynomial::from_i64(&[1, 3, 2]).derivative(), Polynomial::from_i64(&[3, 4]));
        assert_eq!(Polynomial::from_i64(&[1, -3, 1]).eval(&int(2)), int(-1));
    }

    #[test]
    fn division_and_gcd() {
        let p = Polynomial::from_i64(&[-6, 11, -6, 1]); // (x-1)(x-2)(x-3)
        let (q, r) = p.div_rem(&Polynomial::from_i64(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(q, Polynomial::from_i64(&[6, -5, 1]));
        let g = p.gcd(&Polynomial::from_i64(&[-2, 1]).scale(&frac(3, 2)));
        assert_eq!(g, Polynomial::from_i64(&[-2, 1]));
        let sq = Polynomial::from_i64(&[1, -2, 1]);
        assert_eq!(sq.gcd(&sq.derivative()), Polynomial::from_i64(&[-1, 1]));
    }

    #[test]
    fn display() {
        assert_eq!(Polynomial::from_i64(&[1, -3, 1]).to_string(), "x^2 - 3*x + 1");
        assert_eq!(Polynomial::from_i64(&[0, -1]).to_string(), "-x");
    }
}
