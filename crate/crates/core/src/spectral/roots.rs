//! Real root isolation by Sturm sequences.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Eigenvalue;
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::Rational;

/// Integer coefficients, ascending.
type IntPoly = Vec<BigInt>;

/// Divide out the positive content; signs are preserved.
fn positive_primitive(p: &Polynomial) -> IntPoly {
    let ints = p.integer_multiple();
    let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if g.is_zero() {
        return Vec::new();
    }
    ints.into_iter().map(|v| v / &g).collect()
}

fn sign_at(p: &IntPoly, x: &Rational) -> Sign {
    let Some(d) = p.len().checked_sub(1) else {
        return Sign::NoSign;
    };
    // Homogeneous Horner: Σ c_k a^k b^(d-k), same sign as p(a/b) for b > 0.
    let (a, b) = (x.numer(), x.denom());
    let mut acc = p[d].clone();
    let mut bpow = BigInt::one();
    for k in (0..d).rev() {
        bpow *= b;
        acc = acc * a + &p[k] * &bpow;
    }
    acc.sign()
}

struct Sturm {
    chain: Vec<IntPoly>,
}

impl Sturm {
    fn new(p: &Polynomial) -> Self {
        let mut chain = vec![positive_primitive(p), positive_primitive(&p.derivative())];
        let mut prev = p.clone();
        let mut cur = p.derivative();
        while !cur.is_zero() {
            let (_, r) = prev.div_rem(&cur);
            let next = -&r;
            if next.is_zero() {
                break;
            }
            // Rescale by a positive factor to curb coefficient growth.
            let ints = positive_primitive(&next);
            let next = Polynomial::new(ints.iter().cloned().map(Rational::from_integer).collect());
            chain.push(ints);
            prev = cur;
            cur = next;
        }
        Sturm { chain }
    }

    /// Sign changes at `x`, zeros dropped.
    fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = Sign::NoSign;
        for p in &self.chain {
            let s = sign_at(p, x);
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }
}

/// `2^e` strictly above `1 + max |c_k / c_d|`.
fn cauchy_bound(p: &Polynomial) -> Rational {
    let lead = p.leading().expect("nonzero polynomial").abs();
    let max = p.coeffs().iter().map(|c| c.abs() / &lead).max().unwrap_or_else(Rational::zero);
    let limit = max + Rational::one();
    let mut bound = Rational::one();
    while bound <= limit {
        bound *= Rational::from_integer(BigInt::from(2));
    }
    bound
}

/// Simple real roots of a square-free polynomial, refined to width
/// `2^-bits`; a repeated root is an error.
pub(super) fn real_roots(p: &Polynomial, bits: u32) -> Result<Vec<Eigenvalue>> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    if p.gcd(&p.derivative()).degree() != Some(0) {
        return Err(Error::MultipleEigenvalue);
    }
    let sturm = Sturm::new(p);
    let bound = cauchy_bound(p);
    let two = Rational::from_integer(BigInt::from(2));

    // Isolating intervals (a, b) with their variation counts; an endpoint may be a root.
    let mut isolated: Vec<(Rational, Rational, usize)> = Vec::new();
    let mut exact: Vec<Rational> = Vec::new();
    let lo = -bound.clone();
    let mut stack = vec![(lo.clone(), bound.clone(), sturm.variations(&lo), sturm.variations(&bound))];
    while let Some((a, b, va, vb)) = stack.pop() {
        let count = va - vb;
        if count == 0 {
            continue;
        }
        if count == 1 {
            isolated.push((a, b, va));
            continue;
        }
        let m = (&a + &b) / &two;
        let vm = sturm.variations(&m);
        if sign_at(&sturm.chain[0], &m) == Sign::NoSign {
            exact.push(m.clone());
            if va - vm > 1 {
                stack.push((a, m.clone(), va, vm + 1));
            }
            // m itself is counted on the left, so the right side starts at vm.
        } else {
            stack.push((a, m.clone(), va, vm));
        }
        stack.push((m, b, vm, vb));
    }

    let width = Rational::new(BigInt::one(), BigInt::one() << bits);
    let mut roots: Vec<Eigenvalue> =
        exact.into_iter().map(|value| Eigenvalue { value, radius: Rational::zero() }).collect();
    for (mut a, mut b, mut va) in isolated {
        let p0 = &sturm.chain[0];
        let mut exact_root = None;
        while &b - &a > width {
            let m = (&a + &b) / &two;
            let sm = sign_at(p0, &m);
            if sm == Sign::NoSign {
                exact_root = Some(m);
                break;
            }
            let (sa, sb) = (sign_at(p0, &a), sign_at(p0, &b));
            let left = if sa != Sign::NoSign && sb != Sign::NoSign {
                sm != sa
            } else {
                let vm = sturm.variations(&m);
                let inside = va > vm;
                if !inside {
                    va = vm;
                }
                inside
            };
            if left {
                b = m;
            } else {
                a = m;
            }
        }
        roots.push(match exact_root {
            Some(value) => Eigenvalue { value, radius: Rational::zero() },
            None => Eigenvalue { value: (&a + &b) / &two, radius: (&b - &a) / &two },
        });
    }
    roots.sort_by(|x, y| x.value.cmp(&y.value));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    #[test]
    fn counts_and_isolates() {
        // (x-1)(x-2)(x-3): the first bisection midpoint from a power-of-two bound hits 0.
        let p = Polynomial::from_i64(&[-6, 11, -6, 1]);
        let roots = real_roots(&p, 40).unwrap();
        let values: Vec<_> = roots.iter().map(|r| r.value.clone()).collect();
        assert_eq!(values, vec![int(1), int(2), int(3)]);

        // x^2 - 2
        let roots = real_roots(&Polynomial::from_i64(&[-2, 0, 1]), 64).unwrap();
        assert_eq!(roots.len(), 2);
        let r = &roots[1];
        assert!(r.lower() * r.lower() < int(2) && r.upper() * r.upper() > int(2));
        assert!(&r.radius * int(2) <= Rational::new(BigInt::one(), BigInt::one() << 64u32));
    }

    #[test]
    fn root_at_zero_and_clusters() {
        let p = Polynomial::from_i64(&[0, -1, 0, 1]); // x(x-1)(x+1)
        let values: Vec<_> = real_roots(&p, 16).unwrap().into_iter().map(|r| r.value).collect();
        assert_eq!(values, vec![int(-1), int(0), int(1)]);
        // Two roots 1e-6 apart.
        let a = frac(1, 3);
        let b = &a + frac(1, 1_000_000);
        let p = &Polynomial::new(vec![-a.clone(), int(1)]) * &Polynomial::new(vec![-b.clone(), int(1)]);
        let roots = real_roots(&p, 80).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].lower() <= a && a <= roots[0].upper());
        assert!(roots[1].lower() <= b && b <= roots[1].upper());
    }

    #[test]
    fn repeated_root_rejected() {
        let p = Polynomial::from_i64(&[-1, 1]);
        let sq = &p * &p;
        assert_eq!(real_roots(&(&sq * &Polynomial::from_i64(&[2, 1])), 16).unwrap_err(), Error::MultipleEigenvalue);
    }
}
