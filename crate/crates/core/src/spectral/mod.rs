//! Spectra of finite truncations and the discrete analogue of the spectral
//! representation.
//!
//! Everything is exact except eigenvalue location: roots of the exact
//! characteristic polynomial are isolated with Sturm sequences and refined by
//! bisection to dyadic rationals of a requested width.

mod biorth;
mod roots;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::band::BandedMatrix;
use crate::error::{contract, Error, Result};
use crate::poly::Polynomial;
use crate::scalar::common_denominator;
use crate::Rational;

pub use biorth::{
    discrete_biorthogonality, eigen_consistency, eigen_consistency_at, hypothesis_initial_conditions,
    positivity_audit, AuditReport, Biorthogonality, DiscreteWeights, EigenConsistency, LambdaReading,
    WeightViolation,
};

pub const DEFAULT_SPECTRAL_CAP: usize = 16;
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// `det(xI - T)`, exactly.
pub fn char_poly(t: &BandedMatrix) -> Result<Polynomial> {
    char_poly_capped(t, DEFAULT_SPECTRAL_CAP)
}

pub fn char_poly_capped(t: &BandedMatrix, cap: usize) -> Result<Polynomial> {
    let n = t.n();
    if n > cap {
        return Err(Error::Capacity { what: "characteristic polynomial", n, cap });
    }
    let dense = t.to_dense();
    let l = common_denominator(dense.entries());
    // det(yI - S) with S = l·T integral; then x = y / l.
    let mut m: Vec<Vec<Vec<BigInt>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let s = dense.get(i, j) * Rational::from_integer(l.clone());
                    let mut poly = vec![-s.to_integer()];
                    if i == j {
                        poly.push(BigInt::one());
                    }
                    trim(poly)
                })
                .collect()
        })
        .collect();
    // Bareiss over Z[y]; the pivots are monic leading minors of yI - S.
    let mut prev = vec![BigInt::one()];
    for k in 0..n.saturating_sub(1) {
        for i in k + 1..n {
            for j in k + 1..n {
                let num = sub(&mul(&m[k][k], &m[i][j]), &mul(&m[i][k], &m[k][j]));
                m[i][j] = div_exact_monic(&num, &prev);
            }
        }
        prev = m[k][k].clone();
    }
    let det = &m[n - 1][n - 1];
    let scale = Rational::from_integer(l);
    let mut coeffs = Vec::with_capacity(det.len());
    let mut lk = Rational::one();
    let ln = num_traits::pow(scale.clone(), n);
    for c in det {
        coeffs.push(Rational::from_integer(c.clone()) * &lk / &ln);
        lk *= &scale;
    }
    Ok(Polynomial::new(coeffs))
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let len = a.len().max(b.len());
    let zero = BigInt::zero();
    trim((0..len).map(|k| a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).collect())
}

/// Quotient by a monic divisor that is known to divide exactly.
fn div_exact_monic(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    if a.len() <= db {
        debug_assert!(a.is_empty());
        return Vec::new();
    }
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for k in (0..quot.len()).rev() {
        let c = rem[k + db].clone();
        if !c.is_zero() {
            for (j, d) in b.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    trim(quot)
}

/// A real eigenvalue located in `[value - radius, value + radius]`.
/// `radius == 0` means `value` is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eigenvalue {
    pub value: Rational,
    pub radius: Rational,
}

impl Eigenvalue {
    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }

    pub fn lower(&self) -> Rational {
        &self.value - &self.radius
    }

    pub fn upper(&self) -> Rational {
        &self.value + &self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumReport {
    pub char_poly: Polynomial,
    /// Real eigenvalues in increasing order.
    pub eigenvalues: Vec<Eigenvalue>,
    pub precision_bits: u32,
}

impl SpectrumReport {
    pub fn degree(&self) -> usize {
        self.char_poly.degree().unwrap_or(0)
    }

    /// No complex pairs: the real root count equals the degree.
    pub fn all_real(&self) -> bool {
        self.eigenvalues.len() == self.degree()
    }

    pub fn all_positive(&self) -> bool {
        self.eigenvalues.iter().all(|e| e.lower().is_positive())
    }

    /// Certified intervals are pairwise disjoint.
    pub fn separated(&self) -> bool {
        self.eigenvalues.windows(2).all(|w| w[0].upper() < w[1].lower())
    }

    pub fn sum(&self) -> Rational {
        self.eigenvalues.iter().map(|e| e.value.clone()).sum()
    }

    pub fn product(&self) -> Rational {
        self.eigenvalues.iter().fold(Rational::one(), |acc, e| acc * &e.value)
    }

    /// Largest `|χ(λ)|` over the reported approximations.
    pub fn max_char_residual(&self) -> Rational {
        self.eigenvalues
            .iter()
            .map(|e| self.char_poly.eval(&e.value).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// Real spectrum with every eigenvalue pinned to width `2^-precision_bits`.
pub fn eigenvalues_hp(t: &BandedMatrix, precision_bits: u32) -> Result<SpectrumReport> {
    eigenvalues_hp_capped(t, precision_bits, DEFAULT_SPECTRAL_CAP)
}

pub fn eigenvalues_hp_capped(t: &BandedMatrix, precision_bits: u32, cap: usize) -> Result<SpectrumReport> {
    if precision_bits == 0 {
        return Err(contract("precision must be at least one bit"));
    }
    let chi = char_poly_capped(t, cap)?;
    let eigenvalues = roots::real_roots(&chi, precision_bits)?;
    Ok(SpectrumReport { char_poly: chi, eigenvalues, precision_bits })
}
