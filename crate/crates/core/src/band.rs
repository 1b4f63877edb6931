//! Banded storage, trivial/nontrivial submatrix classification, and the
//! contiguous, initial and corner (Δ) minor families of a banded matrix.

use num_traits::Zero;

use crate::error::{contract, Result};
use crate::index::{seq_leq, IndexSeq};
use crate::matrix::Matrix;
use crate::minor::minor;
use crate::Rational;

/// Square `n x n` matrix with `p` subdiagonals and `q` superdiagonals.
///
/// Only in-band entries are stored; reads outside the band return zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandedMatrix {
    n: usize,
    p: usize,
    q: usize,
    band: Vec<Rational>,
    zero: Rational,
}

impl BandedMatrix {
    pub fn zeros(n: usize, p: usize, q: usize) -> Result<Self> {
        if n == 0 {
            return Err(contract("banded matrix needs n >= 1"));
        }
        if p >= n || q >= n {
            return Err(contract(format!("band ({p},{q}) too wide for n = {n}")));
        }
        Ok(BandedMatrix {
            n,
            p,
            q,
            band: vec![Rational::zero(); n * (p + q + 1)],
            zero: Rational::zero(),
        })
    }

    /// Wrap a square matrix, checking it vanishes outside the declared band.
    pub fn from_dense(m: &Matrix, p: usize, q: usize) -> Result<Self> {
        if !m.is_square() {
            return Err(contract("banded matrix must be square"));
        }
        let mut t = Self::zeros(m.n_rows(), p, q)?;
        for i in 0..t.n {
            for j in 0..t.n {
                let v = m.get(i, j);
                if t.in_band(i, j) {
                    let s = t.slot(i, j);
                    t.band[s] = v.clone();
                } else if !v.is_zero() {
                    return Err(contract(format!(
                        "entry ({}, {}) is nonzero outside the declared band ({p},{q})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(t)
    }

    /// Wrap a square matrix with its minimal band profile.
    pub fn from_dense_inferred(m: &Matrix) -> Result<Self> {
        let (p, q) = band_profile(m)?;
        Self::from_dense(m, p, q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// 0-based band membership test.
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.p >= i && j <= i + self.q
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        i * (self.p + self.q + 1) + (j + self.p - i)
    }

    /// 0-based entry; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        if i < self.n && j < self.n && self.in_band(i, j) {
            &self.band[self.slot(i, j)]
        } else {
            &self.zero
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) -> Result<()> {
        if i >= self.n || j >= self.n || !self.in_band(i, j) {
            return Err(contract(format!(
                "position ({}, {}) is outside the band ({},{})",
                i + 1,
                j + 1,
                self.p,
                self.q
            )));
        }
        let s = self.slot(i, j);
        self.band[s] = value;
        Ok(())
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| self.get(i, j).clone())
    }

    /// Same entries under a different declared band.
    pub fn with_band(&self, p: usize, q: usize) -> Result<Self> {
        Self::from_dense(&self.to_dense(), p, q)
    }

    /// Whether `(row, col)` (1-based) lies strictly outside the band.
    pub fn is_outside(&self, row: usize, col: usize) -> bool {
        col > row + self.q || row > col + self.p
    }

    pub fn is_trivial_submatrix(&self, rows: &IndexSeq, cols: &IndexSeq) -> Result<bool> {
        is_trivial_submatrix(self.p, self.q, rows, cols)
    }

    pub fn nontrivial_test_by_order(&self, rows: &IndexSeq, cols: &IndexSeq) -> Result<bool> {
        nontrivial_test_by_order(self.p, self.q, rows, cols)
    }
}

/// Smallest `(p, q)` such that the square matrix vanishes outside the band.
pub fn band_profile(m: &Matrix) -> Result<(usize, usize)> {
    if !m.is_square() {
        return Err(contract("band profile needs a square matrix"));
    }
    let (mut p, mut q) = (0, 0);
    for i in 0..m.n_rows() {
        for j in 0..m.n_cols() {
            if !m.get(i, j).is_zero() {
                if i > j {
                    p = p.max(i - j);
                } else {
                    q = q.max(j - i);
                }
            }
        }
    }
    Ok((p, q))
}

/// True iff some diagonal position `(rows[k], cols[k])` leaves the band.
pub fn is_trivial_submatrix(p: usize, q: usize, rows: &IndexSeq, cols: &IndexSeq) -> Result<bool> {
    if rows.len() != cols.len() {
        return Err(contract(format!("row labels {rows} and column labels {cols} differ in length")));
    }
    Ok(rows.labels().iter().zip(cols.labels()).any(|(&i, &j)| j > i + q || i > j + p))
}

/// Nontriviality through the translation order: `cols <= τ_q rows` and
/// `rows <= τ_p cols`.
pub fn nontrivial_test_by_order(
    p: usize,
    q: usize,
    rows: &IndexSeq,
    cols: &IndexSeq,
) -> Result<bool> {
    Ok(seq_leq(cols.labels(), &rows.translate(q))? && seq_leq(rows.labels(), &cols.translate(p))?)
}

/// A contiguous square block given by its 1-based top-left corner and size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContiguousMinor {
    pub size: usize,
    pub row: usize,
    pub col: usize,
}

impl ContiguousMinor {
    pub fn new(row: usize, col: usize, size: usize) -> Self {
        ContiguousMinor { size, row, col }
    }

    pub fn rows(&self, n: usize) -> IndexSeq {
        IndexSeq::contiguous(self.row, self.size, n).expect("block within bounds")
    }

    pub fn cols(&self, n: usize) -> IndexSeq {
        IndexSeq::contiguous(self.col, self.size, n).expect("block within bounds")
    }

    pub fn value(&self, t: &BandedMatrix) -> Rational {
        let n = t.n();
        minor(&t.to_dense(), &self.rows(n), &self.cols(n)).expect("block within bounds")
    }
}

/// All nontrivial contiguous blocks `(i, j, r)` with `i - p <= j <= i + q`,
/// ordered by `(r, i, j)`.
pub fn enumerate_nontrivial_contiguous(t: &BandedMatrix) -> Vec<ContiguousMinor> {
    let (n, p, q) = (t.n, t.p, t.q);
    let mut out = Vec::new();
    for r in 1..=n {
        for i in 1..=n + 1 - r {
            for j in 1..=n + 1 - r {
                if j + p >= i && j <= i + q {
                    out.push(ContiguousMinor::new(i, j, r));
                }
            }
        }
    }
    out
}

/// Nontrivial row-initial blocks `T(1..r; j..)` and column-initial blocks
/// `T(i..; 1..r)`, ordered by `(r, i, j)` without duplicates.
pub fn enumerate_nontrivial_initial(t: &BandedMatrix) -> Vec<ContiguousMinor> {
    let (n, p, q) = (t.n, t.p, t.q);
    let mut out = Vec::new();
    for r in 1..=n {
        let last = n + 1 - r;
        for j in 1..=last.min(1 + q) {
            out.push(ContiguousMinor::new(1, j, r));
        }
        for i in 2..=last.min(1 + p) {
            out.push(ContiguousMinor::new(i, 1, r));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaEntry {
    pub index: usize,
    pub value: Rational,
    pub trivial: bool,
}

/// Corner minors: `Δ^i = T(1..i; n-i+1..n)` (upper) and
/// `Δ_i = T(n-i+1..n; 1..i)` (lower), for `i = 1..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaMinorReport {
    pub upper: Vec<DeltaEntry>,
    pub lower: Vec<DeltaEntry>,
}

impl DeltaMinorReport {
    pub fn nontrivial(&self) -> impl Iterator<Item = (DeltaSide, &DeltaEntry)> {
        self.upper
            .iter()
            .map(|e| (DeltaSide::Upper, e))
            .chain(self.lower.iter().map(|e| (DeltaSide::Lower, e)))
            .filter(|(_, e)| !e.trivial)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaSide {
    Upper,
    Lower,
}

impl DeltaSide {
    /// Row and column labels of `Δ^i` / `Δ_i` in an `n x n` matrix.
    pub fn labels(self, i: usize, n: usize) -> (IndexSeq, IndexSeq) {
        let head = IndexSeq::contiguous(1, i, n).expect("corner within bounds");
        let tail = IndexSeq::contiguous(n - i + 1, i, n).expect("corner within bounds");
        match self {
            DeltaSide::Upper => (head, tail),
            DeltaSide::Lower => (tail, head),
        }
    }
}

pub fn delta_minors(t: &BandedMatrix) -> DeltaMinorReport {
    let n = t.n;
    let dense = t.to_dense();
    let side = |side: DeltaSide| {
        (1..=n)
            .map(|i| {
                let (rows, cols) = side.labels(i, n);
                let trivial = t.is_trivial_submatrix(&rows, &cols).expect("equal lengths");
                let value = minor(&dense, &rows, &cols).expect("corner within bounds");
                DeltaEntry { index: i, value, trivial }
            })
            .collect()
    };
    DeltaMinorReport { upper: side(DeltaSide::Upper), lower: side(DeltaSide::Lower) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::sequences;
    use crate::scalar::int;

    fn tri() -> BandedMatrix {
        BandedMatrix::from_dense(&Matrix::from_i64(&[[1, 1, 0], [1, 2, 1], [0, 1, 2]]), 1, 1)
            .unwrap()
    }

    fn seq(labels: &[usize], n: usize) -> IndexSeq {
        IndexSeq::new(labels.to_vec(), n).unwrap()
    }

    #[test]
    fn profile_examples() {
        assert_eq!(band_profile(&Matrix::identity(4)).unwrap(), (0, 0));
        assert_eq!(band_profile(&tri().to_dense()).unwrap(), (1, 1));
        let dense = Matrix::from_i64(&[[1, 2, 3], [4, 5, 6], [7, 8, 9]]);
        assert_eq!(band_profile(&dense).unwrap(), (2, 2));
        assert!(band_profile(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn storage_reads_zero_outside_band() {
        let t = tri();
        assert_eq!(t.get(0, 2), &int(0));
        assert_eq!(t.get(2, 2), &int(2));
        let mut z = BandedMatrix::zeros(3, 0, 1).unwrap();
        assert!(z.set(1, 0, int(1)).is_err());
        z.set(0, 1, int(4)).unwrap();
        assert_eq!(z.to_dense(), Matrix::from_i64(&[[0, 4, 0], [0, 0, 0], [0, 0, 0]]));
        assert!(BandedMatrix::from_dense(&Matrix::identity(2), 0, 0).is_ok());
        assert!(BandedMatrix::from_dense(&tri().to_dense(), 0, 1).is_err());
        assert!(BandedMatrix::zeros(3, 3, 0).is_err());
    }

    #[test]
    fn trivial_examples() {
        let upper = BandedMatrix::zeros(4, 0, 3).unwrap();
        assert!(upper.is_trivial_submatrix(&seq(&[1, 3, 4], 4), &seq(&[1, 2, 4], 4)).unwrap());
        let t = tri();
        assert!(!t.is_trivial_submatrix(&seq(&[1, 2], 3), &seq(&[2, 3], 3)).unwrap());
        assert!(t.is_trivial_submatrix(&seq(&[1], 3), &seq(&[3], 3)).unwrap());
        assert!(t.is_trivial_submatrix(&seq(&[1], 3), &seq(&[1, 2], 3)).is_err());
    }

    #[test]
    fn order_test_examples() {
        let t = tri();
        assert!(t.nontrivial_test_by_order(&seq(&[1, 2], 3), &seq(&[2, 3], 3)).unwrap());
        assert!(!t.nontrivial_test_by_order(&seq(&[1], 3), &seq(&[3], 3)).unwrap());
        let full = IndexSeq::full(3);
        assert!(t.nontrivial_test_by_order(&full, &full).unwrap());
    }

    #[test]
    fn classification_routes_agree_exhaustively() {
        for n in 1..=6 {
            for p in 0..n {
                for q in 0..n {
                    for r in 1..=n {
                        for rows in sequences(n, r) {
                            for cols in sequences(n, r) {
                                let trivial = is_trivial_submatrix(p, q, &rows, &cols).unwrap();
                                let ordered = nontrivial_test_by_order(p, q, &rows, &cols).unwrap();
                                assert_eq!(trivial, !ordered, "n={n} p={p} q={q} {rows};{cols}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn contiguous_enumeration() {
        let t = tri();
        let all = enumerate_nontrivial_contiguous(&t);
        assert_eq!(all.iter().filter(|m| m.size == 1).count(), 7);
        let full: Vec<_> = all.iter().filter(|m| m.size == 3).collect();
        assert_eq!(full, vec![&ContiguousMinor::new(1, 1, 3)]);
        let low = BandedMatrix::zeros(3, 2, 0).unwrap();
        let two: Vec<_> = enumerate_nontrivial_contiguous(&low)
            .into_iter()
            .filter(|m| m.size == 2)
            .map(|m| (m.row, m.col, m.size))
            .collect();
        assert_eq!(two, vec![(1, 1, 2), (2, 1, 2), (2, 2, 2)]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn initial_enumeration() {
        let t = tri();
        let init = enumerate_nontrivial_initial(&t);
        let at = |r: usize| -> Vec<(usize, usize)> {
            init.iter().filter(|m| m.size == r).map(|m| (m.row, m.col)).collect()
        };
        assert_eq!(at(1), vec![(1, 1), (1, 2), (2, 1)]);
        assert_eq!(at(2), vec![(1, 1), (1, 2), (2, 1)]);
        assert_eq!(at(3), vec![(1, 1)]);

        let upper = BandedMatrix::zeros(4, 0, 3).unwrap();
        let init = enumerate_nontrivial_initial(&upper);
        assert!(init.iter().all(|m| m.row == 1));
        assert!(init.iter().filter(|m| m.col == 1).all(|m| m.row == 1));
    }

    #[test]
    fn delta_examples() {
        let report = delta_minors(&tri());
        let nontrivial: Vec<_> =
            report.nontrivial().map(|(s, e)| (s, e.index, e.value.clone())).collect();
        assert_eq!(
            nontrivial,
            vec![
                (DeltaSide::Upper, 2, int(1)),
                (DeltaSide::Upper, 3, int(1)),
                (DeltaSide::Lower, 2, int(1)),
                (DeltaSide::Lower, 3, int(1)),
            ]
        );
        assert!(report.upper[0].trivial && report.upper[0].value.is_zero());
        assert!(report.lower[0].trivial && report.lower[0].value.is_zero());

        let l = BandedMatrix::from_dense(&Matrix::from_i64(&[[1, 0, 0], [2, 1, 0], [0, 3, 1]]), 1, 0)
            .unwrap();
        let report = delta_minors(&l);
        assert_eq!(report.lower[1].value, int(6));
        assert_eq!(report.lower[2].value, int(1));
        assert_eq!(report.upper[2].value, int(1));
        assert!(report.upper[0].trivial && report.upper[1].trivial);
        assert_eq!(report.nontrivial().count(), 3);

        let id = BandedMatrix::from_dense(&Matrix::identity(2), 0, 0).unwrap();
        let report = delta_minors(&id);
        let nt: Vec<_> = report.nontrivial().map(|(s, e)| (s, e.index)).collect();
        assert_eq!(nt, vec![(DeltaSide::Upper, 2), (DeltaSide::Lower, 2)]);
    }

    #[test]
    fn delta_count_is_band_width_plus_two() {
        for n in 1..=6 {
            for p in 0..n {
                for q in 0..n {
                    let t = BandedMatrix::zeros(n, p, q).unwrap();
                    assert_eq!(delta_minors(&t).nontrivial().count(), p + q + 2);
                }
            }
        }
    }
}
