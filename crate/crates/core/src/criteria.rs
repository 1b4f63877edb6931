//! Positivity classifications.
//!
//! Banded total positivity is decided four ways: exhaustively over every
//! nontrivial minor ([`is_btp_oracle`]), over nontrivial contiguous minors,
//! over nontrivial initial minors, and through the corner minors of an InTN
//! matrix. The oracle computes its minors by memoized cofactor expansion; the
//! other three go through Bareiss elimination, so agreement between them
//! is a genuine cross-check.
//!
//! A failing verdict always carries the first failing minor in `(r, rows,
//! cols)` lexicographic order as its witness.

use std::fmt;

use num_bigint::Sign;
use num_traits::{Signed, Zero};

use crate::band::{
    delta_minors, enumerate_nontrivial_contiguous, enumerate_nontrivial_initial, BandedMatrix,
    ContiguousMinor,
};
use crate::error::{contract, Error, Result};
use crate::index::{sequences, IndexSeq};
use crate::matrix::Matrix;
use crate::minor::{determinant, minor, MinorTable};
use crate::Rational;

/// Default size cap for the exhaustive oracles.
pub const DEFAULT_ORACLE_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionId {
    TpFekete,
    TnBruteForce,
    TnCryer,
    InTnGascaPena,
    BtpOracle,
    BtpContiguous,
    BtpInitial,
    BtpDelta,
    OscillatoryPrice,
}

impl CriterionId {
    pub fn name(self) -> &'static str {
        match self {
            CriterionId::TpFekete => "tp-fekete",
            CriterionId::TnBruteForce => "tn-bruteforce",
            CriterionId::TnCryer => "tn-cryer",
            CriterionId::InTnGascaPena => "intn-gasca-pena",
            CriterionId::BtpOracle => "btp-oracle",
            CriterionId::BtpContiguous => "btp-contiguous",
            CriterionId::BtpInitial => "btp-initial",
            CriterionId::BtpDelta => "btp-delta",
            CriterionId::OscillatoryPrice => "oscillatory-price",
        }
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A minor that violates a criterion's sign condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub rows: IndexSeq,
    pub cols: IndexSeq,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionVerdict {
    pub criterion: CriterionId,
    pub verdict: bool,
    pub witnesses: Vec<Witness>,
}

impl CriterionVerdict {
    fn holds(criterion: CriterionId) -> Self {
        CriterionVerdict { criterion, verdict: true, witnesses: Vec::new() }
    }

    fn fails(criterion: CriterionId, witness: Witness) -> Self {
        CriterionVerdict { criterion, verdict: false, witnesses: vec![witness] }
    }

    fn relabel(mut self, criterion: CriterionId) -> Self {
        self.criterion = criterion;
        self
    }
}

fn square(m: &Matrix) -> Result<usize> {
    if !m.is_square() {
        return Err(contract(format!("expected a square matrix, got {}x{}", m.n_rows(), m.n_cols())));
    }
    Ok(m.n_rows())
}

fn capped(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Capacity { what, n, cap });
    }
    Ok(())
}

/// Scan candidate minors in order and stop at the first that fails `ok`.
fn first_failure<I>(criterion: CriterionId, candidates: I, ok: impl Fn(&Rational) -> bool) -> CriterionVerdict
where
    I: IntoIterator<Item = (IndexSeq, IndexSeq, Rational)>,
{
    for (rows, cols, value) in candidates {
        if !ok(&value) {
            return CriterionVerdict::fails(criterion, Witness { rows, cols, value });
        }
    }
    CriterionVerdict::holds(criterion)
}

fn contiguous_values<'a>(
    dense: &'a Matrix,
    blocks: impl IntoIterator<Item = ContiguousMinor> + 'a,
) -> impl Iterator<Item = (IndexSeq, IndexSeq, Rational)> + 'a {
    let n = dense.n_rows();
    blocks.into_iter().map(move |b| {
        let (rows, cols) = (b.rows(n), b.cols(n));
        let value = minor(dense, &rows, &cols).expect("block within bounds");
        (rows, cols, value)
    })
}

/// Totally positive iff every contiguous minor is positive.
pub fn is_tp_fekete(m: &Matrix) -> Result<CriterionVerdict> {
    let n = square(m)?;
    let blocks = (1..=n).flat_map(move |r| {
        (1..=n + 1 - r).flat_map(move |i| (1..=n + 1 - r).map(move |j| ContiguousMinor::new(i, j, r)))
    });
    Ok(first_failure(CriterionId::TpFekete, contiguous_values(m, blocks), |v| v.is_positive()))
}

/// Every minor nonnegative, checked exhaustively.
pub fn is_tn_bruteforce(m: &Matrix) -> Result<CriterionVerdict> {
    is_tn_bruteforce_capped(m, DEFAULT_ORACLE_CAP)
}

pub fn is_tn_bruteforce_capped(m: &Matrix, cap: usize) -> Result<CriterionVerdict> {
    let n = square(m)?;
    capped("tn oracle", n, cap)?;
    let table = MinorTable::new(m)?;
    for r in 1..=n {
        for rows in sequences(n, r) {
            for cols in sequences(n, r) {
                if table.scaled(rows.mask(), cols.mask()).sign() == Sign::Minus {
                    let value = table.value(&rows, &cols);
                    return Ok(CriterionVerdict::fails(
                        CriterionId::TnBruteForce,
                        Witness { rows, cols, value },
                    ));
                }
            }
        }
    }
    Ok(CriterionVerdict::holds(CriterionId::TnBruteForce))
}

/// For nonsingular input: TN iff every minor with contiguous columns is
/// nonnegative.
pub fn is_tn_cryer(m: &Matrix) -> Result<CriterionVerdict> {
    let n = square(m)?;
    if determinant(m)?.is_zero() {
        return Err(Error::Precondition("column-contiguous TN test needs a nonsingular matrix".into()));
    }
    let candidates = (1..=n).flat_map(move |r| {
        sequences(n, r).flat_map(move |rows| {
            (1..=n + 1 - r).map(move |j| {
                let cols = IndexSeq::contiguous(j, r, n).expect("within bounds");
                let value = minor(m, &rows, &cols).expect("within bounds");
                (rows.clone(), cols, value)
            })
        })
    });
    // Reorder to (r, rows, cols) lexicographic, which the scan above already is.
    Ok(first_failure(CriterionId::TnCryer, candidates, |v| !v.is_negative()))
}

/// Nonsingular TN iff, for every `r`, the leading principal minor is
/// positive and all column-initial and row-initial minors are nonnegative.
pub fn is_intn_gasca_pena(m: &Matrix) -> Result<CriterionVerdict> {
    let n = square(m)?;
    let id = CriterionId::InTnGascaPena;
    for r in 1..=n {
        let head = IndexSeq::contiguous(1, r, n)?;
        let lead = minor(m, &head, &head)?;
        if !lead.is_positive() {
            return Ok(CriterionVerdict::fails(id, Witness { rows: head.clone(), cols: head, value: lead }));
        }
        for rows in sequences(n, r) {
            let value = minor(m, &rows, &head)?;
            if value.is_negative() {
                return Ok(CriterionVerdict::fails(id, Witness { rows, cols: head, value }));
            }
        }
        for cols in sequences(n, r) {
            let value = minor(m, &head, &cols)?;
            if value.is_negative() {
                return Ok(CriterionVerdict::fails(id, Witness { rows: head, cols, value }));
            }
        }
    }
    Ok(CriterionVerdict::holds(id))
}

/// Every nontrivial minor positive, checked exhaustively.
pub fn is_btp_oracle(t: &BandedMatrix) -> Result<CriterionVerdict> {
    is_btp_oracle_capped(t, DEFAULT_ORACLE_CAP)
}

pub fn is_btp_oracle_capped(t: &BandedMatrix, cap: usize) -> Result<CriterionVerdict> {
    let n = t.n();
    capped("btp oracle", n, cap)?;
    let table = MinorTable::new(&t.to_dense())?;
    for r in 1..=n {
        for rows in sequences(n, r) {
            for cols in sequences(n, r) {
                if t.is_trivial_submatrix(&rows, &cols)? {
                    continue;
                }
                if table.scaled(rows.mask(), cols.mask()).sign() != Sign::Plus {
                    let value = table.value(&rows, &cols);
                    return Ok(CriterionVerdict::fails(
                        CriterionId::BtpOracle,
                        Witness { rows, cols, value },
                    ));
                }
            }
        }
    }
    Ok(CriterionVerdict::holds(CriterionId::BtpOracle))
}

/// Banded totally positive iff every nontrivial contiguous minor is positive.
pub fn is_btp_contiguous(t: &BandedMatrix) -> CriterionVerdict {
    let dense = t.to_dense();
    let blocks = enumerate_nontrivial_contiguous(t);
    first_failure(CriterionId::BtpContiguous, contiguous_values(&dense, blocks), |v| v.is_positive())
}

/// Banded totally positive iff every nontrivial initial minor is positive.
pub fn is_btp_initial(t: &BandedMatrix) -> CriterionVerdict {
    let dense = t.to_dense();
    let blocks = enumerate_nontrivial_initial(t);
    first_failure(CriterionId::BtpInitial, contiguous_values(&dense, blocks), |v| v.is_positive())
}

/// For InTN input: banded totally positive iff no nontrivial corner minor
/// vanishes. Non-InTN input fails with the Gasca–Peña witness.
pub fn is_btp_delta(t: &BandedMatrix) -> CriterionVerdict {
    let intn = is_intn_gasca_pena(&t.to_dense()).expect("banded matrices are square");
    if !intn.verdict {
        return intn.relabel(CriterionId::BtpDelta);
    }
    let n = t.n();
    let report = delta_minors(t);
    // Upper corners first, then lower, each by increasing size.
    for (side, entry) in report.nontrivial() {
        if entry.value.is_zero() {
            let (rows, cols) = side.labels(entry.index, n);
            return CriterionVerdict::fails(
                CriterionId::BtpDelta,
                Witness { rows, cols, value: entry.value.clone() },
            );
        }
    }
    CriterionVerdict::holds(CriterionId::BtpDelta)
}

/// Both readings of oscillation for a banded matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OscillatoryVerdict {
    /// Sufficient condition: nontrivial contiguous minors positive with at
    /// least one sub- and one superdiagonal.
    pub sufficient: CriterionVerdict,
    /// Smallest `m <= max_power` with `T^m` totally positive, if any.
    pub tp_power: Option<u32>,
    pub max_power: u32,
}

impl OscillatoryVerdict {
    /// Verdict of the sufficient-condition test.
    pub fn sufficient_holds(&self) -> bool {
        self.sufficient.verdict
    }

    pub fn some_power_tp(&self) -> bool {
        self.tp_power.is_some()
    }
}

/// Sufficient-condition test for oscillation plus the power check, with
/// powers up to `n - 1` (enough for any oscillatory matrix).
pub fn is_oscillatory_price(t: &BandedMatrix) -> Result<OscillatoryVerdict> {
    let max_power = (t.n().saturating_sub(1)).max(1) as u32;
    is_oscillatory_price_with(t, max_power)
}

pub fn is_oscillatory_price_with(t: &BandedMatrix, max_power: u32) -> Result<OscillatoryVerdict> {
    let dense = t.to_dense();
    if determinant(&dense)?.is_zero() {
        return Err(Error::Precondition("oscillation test needs a nonsingular matrix".into()));
    }
    let n = t.n();
    // A triangular matrix of size >= 2 is reducible; the structural zero next
    // to the diagonal is the witness.
    let sufficient = if n >= 2 && (t.p() == 0 || t.q() == 0) {
        let (rows, cols) = if t.q() == 0 { (1, 2) } else { (2, 1) };
        CriterionVerdict::fails(
            CriterionId::OscillatoryPrice,
            Witness {
                rows: IndexSeq::new(vec![rows], n)?,
                cols: IndexSeq::new(vec![cols], n)?,
                value: Rational::zero(),
            },
        )
    } else {
        is_btp_contiguous(t).relabel(CriterionId::OscillatoryPrice)
    };
    let tp_power = tp_power(&dense, max_power)?;
    Ok(OscillatoryVerdict { sufficient, tp_power, max_power })
}

/// Smallest `m` in `1..=max_power` with `M^m` totally positive.
pub fn tp_power(m: &Matrix, max_power: u32) -> Result<Option<u32>> {
    square(m)?;
    let mut power = m.clone();
    for k in 1..=max_power {
        if is_tp_fekete(&power)?.verdict {
            return Ok(Some(k));
        }
        power = power.try_mul(m)?;
    }
    Ok(None)
}

/// A contiguous singular block `[α..α+r-1; β..β+r-1]` of an InTN matrix with
/// no singular proper principal submatrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PinkusTriple {
    pub alpha: usize,
    pub beta: usize,
    pub r: usize,
}

pub fn find_pinkus_submatrices(m: &Matrix) -> Result<Vec<PinkusTriple>> {
    find_pinkus_submatrices_capped(m, DEFAULT_ORACLE_CAP)
}

pub fn find_pinkus_submatrices_capped(m: &Matrix, cap: usize) -> Result<Vec<PinkusTriple>> {
    let n = square(m)?;
    capped("pinkus search", n, cap)?;
    let intn = is_intn_gasca_pena(m)?;
    if let Some(w) = intn.witnesses.first() {
        return Err(Error::Precondition(format!(
            "matrix is not InTN: minor {};{} = {}",
            w.rows, w.cols, w.value
        )));
    }
    let mut out = Vec::new();
    for r in 1..=n {
        for alpha in 1..=n + 1 - r {
            for beta in 1..=n + 1 - r {
                let block = m.block(alpha - 1, beta - 1, r, r);
                if !determinant(&block)?.is_zero() {
                    continue;
                }
                if !has_singular_proper_principal(&block)? {
                    out.push(PinkusTriple { alpha, beta, r });
                }
            }
        }
    }
    Ok(out)
}

fn has_singular_proper_principal(block: &Matrix) -> Result<bool> {
    let r = block.n_rows();
    for mask in 1u64..(1u64 << r) - 1 {
        let k = IndexSeq::from_mask(mask, r);
        if minor(block, &k, &k)?.is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether the zero pattern predicted by the Pinkus submatrices covers the
/// minor at `(rows, cols)`: some `r_k` diagonal positions of the selection
/// fall in the right shadow (`α < β`) or left shadow (`α > β`) of a triple.
pub fn pinkus_predicts_zero(triples: &[PinkusTriple], rows: &IndexSeq, cols: &IndexSeq) -> bool {
    triples.iter().any(|t| {
        let inside = rows
            .labels()
            .iter()
            .zip(cols.labels())
            .filter(|&(&i, &j)| {
                if t.alpha < t.beta {
                    i < t.alpha + t.r && j >= t.beta
                } else {
                    i >= t.alpha && j < t.beta + t.r
                }
            })
            .count();
        inside >= t.r
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn tri() -> BandedMatrix {
        BandedMatrix::from_dense(&Matrix::from_i64(&[[1, 1, 0], [1, 2, 1], [0, 1, 2]]), 1, 1)
            .unwrap()
    }

    fn seq(labels: &[usize], n: usize) -> IndexSeq {
        IndexSeq::new(labels.to_vec(), n).unwrap()
    }

    fn check_witnesses(v: &CriterionVerdict, m: &Matrix, ok: impl Fn(&Rational) -> bool) {
        if v.verdict {
            assert!(v.witnesses.is_empty());
        } else {
            assert!(!v.witnesses.is_empty());
            for w in &v.witnesses {
                let value = minor(m, &w.rows, &w.cols).unwrap();
                assert_eq!(value, w.value);
                assert!(!ok(&value));
            }
        }
    }

    #[test]
    fn fekete_examples() {
        assert!(is_tp_fekete(&Matrix::from_i64(&[[1, 1], [1, 2]])).unwrap().verdict);
        assert!(is_tp_fekete(&Matrix::from_i64(&[[2, 1], [1, 1]])).unwrap().verdict);
        let v = is_tp_fekete(&Matrix::identity(2)).unwrap();
        assert!(!v.verdict);
        assert_eq!(
            v.witnesses,
            vec![Witness { rows: seq(&[1], 2), cols: seq(&[2], 2), value: int(0) }]
        );
        assert!(is_tp_fekete(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn tn_examples() {
        assert!(is_tn_bruteforce(&Matrix::identity(4)).unwrap().verdict);
        assert!(is_tn_bruteforce(&Matrix::from_i64(&[[1, 1], [1, 2]])).unwrap().verdict);
        let swap = Matrix::from_i64(&[[0, 1], [1, 0]]);
        let v = is_tn_bruteforce(&swap).unwrap();
        assert!(!v.verdict);
        assert_eq!(v.witnesses[0].value, int(-1));
        check_witnesses(&v, &swap, |x| !x.is_negative());
        assert!(matches!(
            is_tn_bruteforce(&Matrix::identity(9)),
            Err(Error::Capacity { n: 9, cap: 8, .. })
        ));
        assert!(is_tn_bruteforce_capped(&Matrix::identity(9), 9).unwrap().verdict);
    }

    #[test]
    fn cryer_matches_bruteforce_on_nonsingular() {
        let a = Matrix::from_i64(&[[2, 1, 0], [1, 2, 1], [1, 2, 3]]);
        assert_eq!(is_tn_cryer(&a).unwrap().verdict, is_tn_bruteforce(&a).unwrap().verdict);
        let swap = Matrix::from_i64(&[[0, 1], [1, 0]]);
        assert!(!is_tn_cryer(&swap).unwrap().verdict);
        assert!(is_tn_cryer(&Matrix::from_i64(&[[1, 1], [1, 1]])).is_err());
    }

    #[test]
    fn gasca_pena_examples() {
        assert!(is_intn_gasca_pena(&tri().to_dense()).unwrap().verdict);
        let v = is_intn_gasca_pena(&Matrix::from_i64(&[[0, 1], [1, 1]])).unwrap();
        assert!(!v.verdict);
        assert_eq!(v.witnesses[0].value, int(0));
        let m = Matrix::from_i64(&[[1, 2], [1, 1]]);
        let v = is_intn_gasca_pena(&m).unwrap();
        assert!(!v.verdict);
        assert_eq!(v.witnesses[0].value, int(-1));
        check_witnesses(&v, &m, |x| !x.is_negative());
    }

    #[test]
    fn btp_examples_agree_across_routes() {
        let zero_super =
            BandedMatrix::from_dense(&Matrix::from_i64(&[[1, 0, 0], [1, 2, 1], [0, 1, 2]]), 1, 1)
                .unwrap();
        let lower =
            BandedMatrix::from_dense(&Matrix::from_i64(&[[1, 0, 0], [1, 1, 0], [1, 2, 1]]), 2, 0)
                .unwrap();
        for (t, expected) in [(tri(), true), (zero_super.clone(), false), (lower, true)] {
            let dense = t.to_dense();
            let verdicts = [
                is_btp_oracle(&t).unwrap(),
                is_btp_contiguous(&t),
                is_btp_initial(&t),
                is_btp_delta(&t),
            ];
            for v in &verdicts {
                assert_eq!(v.verdict, expected, "{}", v.criterion);
                check_witnesses(v, &dense, |x| x.is_positive());
            }
        }
        let v = is_btp_oracle(&zero_super).unwrap();
        assert_eq!(
            v.witnesses,
            vec![Witness { rows: seq(&[1], 3), cols: seq(&[2], 3), value: int(0) }]
        );
    }

    #[test]
    fn delta_route_needs_intn() {
        // InTN tridiagonal whose upper corner Δ^2 = T(1..2; 2..3) vanishes.
        let t = BandedMatrix::from_dense(&Matrix::from_i64(&[[1, 0, 0], [1, 1, 1], [0, 1, 2]]), 1, 1)
            .unwrap();
        assert!(is_intn_gasca_pena(&t.to_dense()).unwrap().verdict);
        let v = is_btp_delta(&t);
        assert!(!v.verdict);
        assert_eq!(v.witnesses[0].rows, seq(&[1, 2], 3));
        assert_eq!(v.witnesses[0].cols, seq(&[2, 3], 3));
        assert_eq!(v.witnesses[0].value, int(0));

        let not_tn =
            BandedMatrix::from_dense(&Matrix::from_i64(&[[1, 2, 0], [1, 1, 1], [0, 1, 2]]), 1, 1)
                .unwrap();
        let v = is_btp_delta(&not_tn);
        assert!(!v.verdict);
        assert!(v.witnesses[0].value.is_negative());
    }

    #[test]
    fn oscillation_examples() {
        let v = is_oscillatory_price(&tri()).unwrap();
        assert!(v.sufficient_holds());
        assert_eq!(v.tp_power, Some(2));
        assert!(!is_tp_fekete(&tri().to_dense()).unwrap().verdict);
        assert!(is_tp_fekete(&tri().to_dense().pow(2).unwrap()).unwrap().verdict);

        let id = BandedMatrix::from_dense(&Matrix::identity(3), 0, 0).unwrap();
        let v = is_oscillatory_price_with(&id, 6).unwrap();
        assert!(!v.sufficient_holds());
        assert!(!v.some_power_tp());

        let l = BandedMatrix::from_dense(&Matrix::from_i64(&[[1, 0, 0], [1, 1, 0], [0, 1, 1]]), 1, 0)
            .unwrap();
        let v = is_oscillatory_price_with(&l, 6).unwrap();
        assert!(!v.some_power_tp());
        assert!(!v.sufficient_holds());

        let singular =
            BandedMatrix::from_dense(&Matrix::from_i64(&[[1, 1], [1, 1]]), 1, 1).unwrap();
        assert!(matches!(is_oscillatory_price(&singular), Err(Error::Precondition(_))));
    }

    #[test]
    fn pinkus_examples() {
        let found = find_pinkus_submatrices(&tri().to_dense()).unwrap();
        assert_eq!(
            found,
            vec![PinkusTriple { alpha: 1, beta: 3, r: 1 }, PinkusTriple { alpha: 3, beta: 1, r: 1 }]
        );
        let tp = Matrix::from_i64(&[[1, 1, 1], [1, 2, 3], [1, 3, 6]]);
        assert!(is_tp_fekete(&tp).unwrap().verdict);
        assert!(find_pinkus_submatrices(&tp).unwrap().is_empty());

        let u = Matrix::from_i64(&[[1, 1, 0], [0, 1, 1], [0, 0, 1]]);
        let found = find_pinkus_submatrices(&u).unwrap();
        assert_eq!(
            found,
            vec![
                PinkusTriple { alpha: 1, beta: 3, r: 1 },
                PinkusTriple { alpha: 2, beta: 1, r: 1 },
                PinkusTriple { alpha: 3, beta: 1, r: 1 },
                PinkusTriple { alpha: 3, beta: 2, r: 1 },
            ]
        );
        assert!(found.iter().all(|t| t.alpha != t.beta));

        let err = find_pinkus_submatrices(&Matrix::from_i64(&[[0, 1], [1, 0]])).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
