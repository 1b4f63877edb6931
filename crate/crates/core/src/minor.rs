//! Submatrices and exact minors.
//!
//! Two independent determinant routes live here: fraction-free Bareiss
//! elimination ([`determinant`], used by every criterion that picks its minors
//! selectively) and a memoized cofactor expansion over all row/column subsets
//! ([`MinorTable`], used by the brute-force oracles). Tests hold each route
//! against the other and against plain Laplace expansion.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{contract, Result};
use crate::index::IndexSeq;
use crate::matrix::Matrix;
use crate::scalar::common_denominator;
use crate::Rational;

fn check_labels(m: &Matrix, rows: &IndexSeq, cols: &IndexSeq) -> Result<()> {
    if rows.len() != cols.len() {
        return Err(contract(format!(
            "row labels {rows} and column labels {cols} differ in length"
        )));
    }
    if rows.labels().last().is_some_and(|&i| i > m.n_rows())
        || cols.labels().last().is_some_and(|&j| j > m.n_cols())
    {
        return Err(contract(format!(
            "labels {rows};{cols} out of bounds for a {}x{} matrix",
            m.n_rows(),
            m.n_cols()
        )));
    }
    Ok(())
}

/// `M[rows; cols]`, order preserved. Row and column counts may differ.
pub fn submatrix(m: &Matrix, rows: &IndexSeq, cols: &IndexSeq) -> Result<Matrix> {
    if rows.labels().last().is_some_and(|&i| i > m.n_rows())
        || cols.labels().last().is_some_and(|&j| j > m.n_cols())
    {
        return Err(contract(format!(
            "labels {rows};{cols} out of bounds for a {}x{} matrix",
            m.n_rows(),
            m.n_cols()
        )));
    }
    let r: Vec<usize> = rows.zero_based().collect();
    let c: Vec<usize> = cols.zero_based().collect();
    Ok(Matrix::from_fn(r.len(), c.len(), |i, j| m.get(r[i], c[j]).clone()))
}

/// `det M[rows; cols]`.
pub fn minor(m: &Matrix, rows: &IndexSeq, cols: &IndexSeq) -> Result<Rational> {
    check_labels(m, rows, cols)?;
    let r: Vec<usize> = rows.zero_based().collect();
    let c: Vec<usize> = cols.zero_based().collect();
    Ok(det_of(|i, j| m.get(r[i], c[j]), r.len()))
}

/// Determinant of a square matrix by fraction-free elimination.
pub fn determinant(m: &Matrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(contract("determinant needs a square matrix"));
    }
    Ok(det_of(|i, j| m.get(i, j), m.n_rows()))
}

fn det_of<'a>(entry: impl Fn(usize, usize) -> &'a Rational, n: usize) -> Rational {
    if n == 0 {
        return Rational::one();
    }
    // Clear denominators row by row, then run integer Bareiss.
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let l = common_denominator((0..n).map(|j| entry(i, j)));
        let row = (0..n)
            .map(|j| {
                let v = entry(i, j);
                v.numer() * (&l / v.denom())
            })
            .collect();
        scale *= &l;
        a.push(row);
    }
    Rational::new(bareiss(&mut a), scale)
}

/// Integer Bareiss with row pivoting. Destroys `a`.
pub(crate) fn bareiss(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        if k + 1 == n {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Laplace expansion along the first row. Exponential; reference use only.
pub fn laplace_determinant(m: &Matrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(contract("determinant needs a square matrix"));
    }
    fn expand(m: &Matrix, rows: &[usize], cols: &[usize]) -> Rational {
        if rows.is_empty() {
            return Rational::one();
        }
        let mut total = Rational::zero();
        for (k, &c) in cols.iter().enumerate() {
            let a = m.get(rows[0], c);
            if a.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = a * expand(m, &rows[1..], &rest);
            if k % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }
    let idx: Vec<usize> = (0..m.n_rows()).collect();
    Ok(expand(m, &idx, &idx))
}

/// Every minor of a square matrix, memoized over row/column subsets.
///
/// Entries are scaled by a common denominator `L`, so the stored integer for a
/// size-`r` minor is `L^r` times the true value; signs are unaffected.
pub struct MinorTable {
    n: usize,
    scale: BigInt,
    values: Vec<BigInt>,
}

impl MinorTable {
    /// Largest size the table accepts (it stores `4^n` slots).
    pub const MAX_N: usize = 10;

    pub fn new(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(contract("minor table needs a square matrix"));
        }
        let n = m.n_rows();
        if n > Self::MAX_N {
            return Err(crate::Error::Capacity { what: "minor table", n, cap: Self::MAX_N });
        }
        let scale = common_denominator(m.entries());
        let ints: Vec<BigInt> =
            m.entries().iter().map(|v| v.numer() * (&scale / v.denom())).collect();
        let full = 1usize << n;
        let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for mask in 1..full {
            by_size[mask.count_ones() as usize].push(mask);
        }
        let mut values = vec![BigInt::zero(); full * full];
        for r in 1..=n {
            for &rm in &by_size[r] {
                let first = rm.trailing_zeros() as usize;
                let rest_rows = rm & !(1 << first);
                for &cm in &by_size[r] {
                    let mut acc = BigInt::zero();
                    let mut sign_plus = true;
                    let mut bits = cm;
                    while bits != 0 {
                        let c = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        let a = &ints[first * n + c];
                        if !a.is_zero() {
                            let sub = if r == 1 {
                                BigInt::one()
                            } else {
                                values[rest_rows * full + (cm & !(1 << c))].clone()
                            };
                            if sign_plus {
                                acc += a * sub;
                            } else {
                                acc -= a * sub;
                            }
                        }
                        sign_plus = !sign_plus;
                    }
                    values[rm * full + cm] = acc;
                }
            }
        }
        Ok(MinorTable { n, scale, values })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `L^r` times the minor at these label masks.
    pub fn scaled(&self, row_mask: u64, col_mask: u64) -> &BigInt {
        &self.values[(row_mask as usize) * (1 << self.n) + col_mask as usize]
    }

    pub fn value(&self, rows: &IndexSeq, cols: &IndexSeq) -> Rational {
        let v = self.scaled(rows.mask(), cols.mask()).clone();
        Rational::new(v, num_traits::pow(self.scale.clone(), rows.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::sequences;
    use crate::scalar::{frac, int};
    use proptest::prelude::*;

    fn seq(labels: &[usize], n: usize) -> IndexSeq {
        IndexSeq::new(labels.to_vec(), n).unwrap()
    }

    #[test]
    fn minor_examples() {
        let id = Matrix::identity(3);
        assert_eq!(minor(&id, &seq(&[1, 2], 3), &seq(&[1, 2], 3)).unwrap(), int(1));
        let t = Matrix::from_i64(&[[1, 1, 0], [1, 2, 1], [0, 1, 2]]);
        assert_eq!(minor(&t, &IndexSeq::full(3), &IndexSeq::full(3)).unwrap(), int(1));
        let l = Matrix::from_i64(&[[1, 0, 0], [2, 1, 0], [0, 3, 1]]);
        assert_eq!(minor(&l, &seq(&[2, 3], 3), &seq(&[1, 2], 3)).unwrap(), int(6));
    }

    #[test]
    fn minor_contract_errors() {
        let t = Matrix::identity(3);
        assert!(minor(&t, &seq(&[1, 2], 3), &seq(&[1], 3)).is_err());
        assert!(minor(&t, &seq(&[1, 4], 4), &seq(&[1, 2], 4)).is_err());
        assert!(determinant(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn submatrix_examples() {
        let t = Matrix::from_i64(&[[1, 1, 0], [1, 2, 1], [0, 1, 2]]);
        assert_eq!(submatrix(&t, &IndexSeq::full(3), &IndexSeq::full(3)).unwrap(), t);
        assert_eq!(
            submatrix(&t, &seq(&[1], 3), &seq(&[3], 3)).unwrap(),
            Matrix::from_i64(&[[0]])
        );
        assert_eq!(
            submatrix(&t, &seq(&[1, 3], 3), &seq(&[2, 3], 3)).unwrap(),
            Matrix::from_i64(&[[1, 0], [1, 2]])
        );
        assert!(submatrix(&t, &seq(&[4], 4), &seq(&[1], 4)).is_err());
    }

    #[test]
    fn pivot_failure_handled() {
        // Zero leading entry forces a row swap; a zero column gives 0.
        let a = Matrix::from_i64(&[[0, 1, 2], [1, 0, 3], [4, -3, 8]]);
        assert_eq!(determinant(&a).unwrap(), laplace_determinant(&a).unwrap());
        let z = Matrix::from_i64(&[[0, 1], [0, 5]]);
        assert_eq!(determinant(&z).unwrap(), int(0));
        let f = Matrix::diagonal(&[frac(1, 2), frac(2, 3), frac(-3, 5)]);
        assert_eq!(determinant(&f).unwrap(), frac(-1, 5));
    }

    #[test]
    fn table_matches_bareiss() {
        let t = Matrix::from_rows(vec![
            vec![frac(1, 2), int(3), int(0), frac(-1, 3)],
            vec![int(2), frac(5, 7), int(1), int(4)],
            vec![int(-1), int(0), frac(2, 3), int(1)],
            vec![int(3), int(1), int(1), frac(1, 5)],
        ])
        .unwrap();
        let table = MinorTable::new(&t).unwrap();
        for r in 1..=4 {
            for rows in sequences(4, r) {
                for cols in sequences(4, r) {
                    assert_eq!(table.value(&rows, &cols), minor(&t, &rows, &cols).unwrap());
                }
            }
        }
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec((-6i64..=6, 1i64..=4), n * n).prop_map(move |v| {
            let rows = v.chunks(n).map(|c| c.iter().map(|&(a, b)| frac(a, b)).collect()).collect();
            Matrix::from_rows(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn bareiss_agrees_with_laplace(m in (1usize..=4).prop_flat_map(small_matrix)) {
            prop_assert_eq!(determinant(&m).unwrap(), laplace_determinant(&m).unwrap());
        }

        #[test]
        fn determinant_is_multiplicative(
            (a, b) in (1usize..=5).prop_flat_map(|n| (small_matrix(n), small_matrix(n)))
        ) {
            let ab = &a * &b;
            prop_assert_eq!(
                determinant(&ab).unwrap(),
                determinant(&a).unwrap() * determinant(&b).unwrap()
            );
        }

        #[test]
        fn cauchy_binet_on_2x2_minors(a in small_matrix(4), b in small_matrix(4)) {
            let ab = &a * &b;
            for rows in sequences(4, 2) {
                for cols in sequences(4, 2) {
                    let lhs = minor(&ab, &rows, &cols).unwrap();
                    let rhs: Rational = sequences(4, 2)
                        .map(|g| minor(&a, &rows, &g).unwrap() * minor(&b, &g, &cols).unwrap())
                        .sum();
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }

        #[test]
        fn rational_canonical_closure(a in (-50i64..50, 1i64..20), b in (-50i64..50, 1i64..20)) {
            let a = frac(a.0, a.1);
            let b = frac(b.0, b.1);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a * &b) / &b, a.clone());
            }
            let s = &a + &b;
            prop_assert!(s.denom() > &BigInt::zero());
            prop_assert!(num_integer::Integer::gcd(s.numer(), s.denom()).is_one());
        }
    }
}
