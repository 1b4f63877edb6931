//! Positive bidiagonal factorizations `T = L̂_1⋯L̂_p D Û_q⋯Û_1`.
//!
//! Each factor is stored by its off-diagonal vector (length `n - 1`). The
//! canonical shape `L̂_i = diag(I_{p-i}, L_i)` leaves the first `p - i`
//! subdiagonal entries at zero; [`pbf_factorize`] always returns that shape.
//! Generators produce fully positive factors, which is what the Darboux and
//! `Λ_p`/`Υ_q` positivity statements need.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::band::BandedMatrix;
use crate::error::{contract, Error, FactorStage, Result};
use crate::matrix::Matrix;
use crate::scalar::frac;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PBFactorization {
    n: usize,
    /// `lower[i]` is the subdiagonal of `L̂_{i+1}`.
    lower: Vec<Vec<Rational>>,
    diag: Vec<Rational>,
    /// `upper[i]` is the superdiagonal of `Û_{i+1}`.
    upper: Vec<Vec<Rational>>,
}

impl PBFactorization {
    /// Validates sizes and signs: diagonal entries positive, factor entries
    /// nonnegative, and entries past the canonical padding strictly positive.
    pub fn new(lower: Vec<Vec<Rational>>, diag: Vec<Rational>, upper: Vec<Vec<Rational>>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(contract("factorization needs at least one diagonal entry"));
        }
        let (p, q) = (lower.len(), upper.len());
        if p >= n || q >= n {
            return Err(contract(format!("band ({p},{q}) does not fit size {n}")));
        }
        if let Some(k) = diag.iter().position(|d| !d.is_positive()) {
            return Err(contract(format!("diagonal entry {} is not positive", k + 1)));
        }
        for (side, factors) in [("lower", &lower), ("upper", &upper)] {
            let count = factors.len();
            for (i, f) in factors.iter().enumerate() {
                if f.len() != n - 1 {
                    return Err(contract(format!(
                        "{side} factor {} has {} entries, expected {}",
                        i + 1,
                        f.len(),
                        n - 1
                    )));
                }
                let pad = count - 1 - i;
                for (k, v) in f.iter().enumerate() {
                    if v.is_negative() || (k >= pad && v.is_zero()) {
                        return Err(contract(format!(
                            "{side} factor {} entry {} must be {}",
                            i + 1,
                            k + 1,
                            if k >= pad { "positive" } else { "nonnegative" }
                        )));
                    }
                }
            }
        }
        Ok(PBFactorization { n, lower, diag, upper })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.lower.len()
    }

    pub fn q(&self) -> usize {
        self.upper.len()
    }

    /// Subdiagonals of `L̂_1..L̂_p`.
    pub fn lower(&self) -> &[Vec<Rational>] {
        &self.lower
    }

    pub fn diag(&self) -> &[Rational] {
        &self.diag
    }

    /// Superdiagonals of `Û_1..Û_q`.
    pub fn upper(&self) -> &[Vec<Rational>] {
        &self.upper
    }

    /// `L̂_i` as a dense matrix (1-based `i`).
    pub fn lower_factor(&self, i: usize) -> Matrix {
        let s = &self.lower[i - 1];
        Matrix::from_fn(self.n, self.n, |r, c| unit_bidiagonal(r, c, r.wrapping_sub(1), s))
    }

    /// `Û_i` as a dense matrix (1-based `i`).
    pub fn upper_factor(&self, i: usize) -> Matrix {
        let s = &self.upper[i - 1];
        Matrix::from_fn(self.n, self.n, |r, c| unit_bidiagonal(c, r, c.wrapping_sub(1), s))
    }

    /// Whether every factor entry, padding included, is positive.
    pub fn is_fully_positive(&self) -> bool {
        self.lower.iter().chain(&self.upper).flatten().all(Signed::is_positive)
    }
}

fn unit_bidiagonal(major: usize, minor: usize, slot: usize, s: &[Rational]) -> Rational {
    if major == minor {
        Rational::one()
    } else if major == minor + 1 {
        s[slot].clone()
    } else {
        Rational::zero()
    }
}

/// One factor in a product word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Factor {
    Lower(usize),
    Diag,
    Upper(usize),
}

/// `A · L` with `L` unit lower bidiagonal: column `c` gains `s[c]` times column `c+1`.
fn mul_lower_right(a: &mut Matrix, s: &[Rational]) {
    for r in 0..a.n_rows() {
        for c in 0..s.len() {
            if s[c].is_zero() {
                continue;
            }
            let v = a.get(r, c) + a.get(r, c + 1) * &s[c];
            a.set(r, c, v);
        }
    }
}

/// `A · U` with `U` unit upper bidiagonal: column `c+1` gains `s[c]` times column `c`.
fn mul_upper_right(a: &mut Matrix, s: &[Rational]) {
    for r in 0..a.n_rows() {
        for c in (0..s.len()).rev() {
            if s[c].is_zero() {
                continue;
            }
            let v = a.get(r, c + 1) + a.get(r, c) * &s[c];
            a.set(r, c + 1, v);
        }
    }
}

fn product(f: &PBFactorization, word: &[Factor]) -> Matrix {
    let mut out = Matrix::identity(f.n);
    for factor in word {
        match *factor {
            Factor::Lower(i) => mul_lower_right(&mut out, &f.lower[i - 1]),
            Factor::Upper(i) => mul_upper_right(&mut out, &f.upper[i - 1]),
            Factor::Diag => {
                for r in 0..f.n {
                    for c in 0..f.n {
                        let v = out.get(r, c) * &f.diag[c];
                        out.set(r, c, v);
                    }
                }
            }
        }
    }
    out
}

fn standard_word(p: usize, q: usize) -> Vec<Factor> {
    (1..=p)
        .map(Factor::Lower)
        .chain([Factor::Diag])
        .chain((1..=q).rev().map(Factor::Upper))
        .collect()
}

/// The product `L̂_1⋯L̂_p D Û_q⋯Û_1` with declared band `(p, q)`.
pub fn pbf_compose(f: &PBFactorization) -> BandedMatrix {
    let dense = product(f, &standard_word(f.p(), f.q()));
    BandedMatrix::from_dense(&dense, f.p(), f.q()).expect("bidiagonal products stay in band")
}

/// Canonical positive bidiagonal factorization, or `NotBtp` at the first
/// nonpositive pivot or multiplier.
pub fn pbf_factorize(t: &BandedMatrix) -> Result<PBFactorization> {
    let (n, p, q) = (t.n(), t.p(), t.q());
    let (l, diag, u) = ldu(t)?;
    let lower = peel(l, p).map_err(|(factor, row, value)| Error::NotBtp {
        stage: FactorStage::Lower { factor, row },
        value,
    })?;
    let upper = peel(u, q).map_err(|(factor, col, value)| Error::NotBtp {
        stage: FactorStage::Upper { factor, col },
        value,
    })?;
    debug_assert!(lower.iter().chain(&upper).all(|s| s.len() == n - 1));
    PBFactorization::new(lower, diag, upper)
}

/// Doolittle split `T = L D U` without pivoting. `L` is returned by rows
/// and `U` by columns (its transpose), both as dense unit lower triangles.
fn ldu(t: &BandedMatrix) -> Result<(Vec<Vec<Rational>>, Vec<Rational>, Vec<Vec<Rational>>)> {
    let n = t.n();
    let mut a = t.to_dense();
    let mut l = vec![vec![Rational::zero(); n]; n];
    let mut ut = vec![vec![Rational::zero(); n]; n];
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = a.get(k, k).clone();
        if !pivot.is_positive() {
            return Err(Error::NotBtp { stage: FactorStage::Pivot { index: k + 1 }, value: pivot });
        }
        l[k][k] = Rational::one();
        ut[k][k] = Rational::one();
        let last_row = (k + t.p()).min(n - 1);
        let last_col = (k + t.q()).min(n - 1);
        for i in k + 1..=last_row {
            l[i][k] = a.get(i, k) / &pivot;
        }
        for j in k + 1..=last_col {
            ut[j][k] = a.get(k, j) / &pivot;
        }
        for i in k + 1..=last_row {
            if l[i][k].is_zero() {
                continue;
            }
            for j in k + 1..=last_col {
                let v = a.get(i, j) - &l[i][k] * a.get(k, j);
                a.set(i, j, v);
            }
        }
        diag.push(pivot);
    }
    Ok((l, diag, ut))
}

/// Split a unit lower triangle of bandwidth `p` into `p` unit lower
/// bidiagonal factors in canonical shape, outermost factor first.
/// On failure reports `(factor, row, value)` with 1-based factor and row.
fn peel(mut m: Vec<Vec<Rational>>, p: usize) -> std::result::Result<Vec<Vec<Rational>>, (usize, usize, Rational)> {
    let n = m.len();
    let mut factors = Vec::with_capacity(p);
    for width in (1..=p).rev() {
        let factor = p - width + 1;
        let mut b = vec![Rational::zero(); n - 1];
        // Remainder rows: rem_i = m_i - b_i rem_{i-1}, with b_i chosen to clear column i - width.
        let mut rem = m.clone();
        for i in width..n {
            let above = rem[i - 1][i - width].clone();
            if !above.is_positive() {
                return Err((factor, i + 1, above));
            }
            let bi = &m[i][i - width] / above;
            if !bi.is_positive() {
                return Err((factor, i + 1, bi));
            }
            for j in i - width + 1..i {
                rem[i][j] = &m[i][j] - &bi * &rem[i - 1][j];
            }
            rem[i][i - width] = Rational::zero();
            b[i - 1] = bi;
        }
        m = rem;
        factors.push(b);
    }
    Ok(factors)
}

/// Darboux transformation. `k > 0` moves `L̂_1..L̂_k` to the right end;
/// `k < 0` moves `Û_{|k|}..Û_1` to the left end. The band is recomputed.
pub fn darboux(f: &PBFactorization, k: i64) -> Result<BandedMatrix> {
    let (p, q) = (f.p() as i64, f.q() as i64);
    let word = standard_word(f.p(), f.q());
    let word: Vec<Factor> = if k >= 1 && k <= p {
        let k = k as usize;
        word[k..].iter().chain(&word[..k]).copied().collect()
    } else if k <= -1 && -k <= q {
        let m = (-k) as usize;
        let split = word.len() - m;
        word[split..].iter().chain(&word[..split]).copied().collect()
    } else {
        return Err(contract(format!("darboux step {k} outside [-{q}, -1] ∪ [1, {p}]")));
    };
    BandedMatrix::from_dense_inferred(&product(f, &word))
}

/// `Λ_p`: entry `(i, j)` (0-based) is `(L̂_1⋯L̂_j)_{i,0}`.
pub fn lambda_matrix(f: &PBFactorization) -> Result<Matrix> {
    let p = f.p();
    if f.n() < p + 1 {
        return Err(contract(format!("size {} too small for p = {p}", f.n())));
    }
    let mut out = Matrix::zeros(p + 1, p + 1);
    for j in 0..=p {
        for (i, v) in first_column_of_lower_product(f, j, p + 1).into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// First column (truncated to `rows` entries) of `L̂_1⋯L̂_j`.
fn first_column_of_lower_product(f: &PBFactorization, j: usize, rows: usize) -> Vec<Rational> {
    // Apply factors right to left to e_0: v = L̂_1(L̂_2(⋯ L̂_j e_0)).
    let mut v = vec![Rational::zero(); rows];
    v[0] = Rational::one();
    for i in (1..=j).rev() {
        let s = &f.lower[i - 1];
        for r in (1..rows).rev() {
            let add = &s[r - 1] * &v[r - 1];
            v[r] += add;
        }
    }
    v
}

/// `Υ_q`: entry `(i, j)` (0-based) is `(Û_i⋯Û_1)_{0,j}`.
pub fn upsilon_matrix(f: &PBFactorization) -> Result<Matrix> {
    let q = f.q();
    if f.n() < q + 1 {
        return Err(contract(format!("size {} too small for q = {q}", f.n())));
    }
    let mut out = Matrix::zeros(q + 1, q + 1);
    for i in 0..=q {
        // Row 0 of Û_i⋯Û_1 is e_0ᵀ Û_i ⋯ Û_1, applied left to right.
        let mut v = vec![Rational::zero(); q + 1];
        v[0] = Rational::one();
        for k in (1..=i).rev() {
            let s = &f.upper[k - 1];
            for c in (1..=q).rev() {
                let add = &s[c - 1] * &v[c - 1];
                v[c] += add;
            }
        }
        for (j, x) in v.into_iter().enumerate() {
            out.set(i, j, x);
        }
    }
    Ok(out)
}

/// Sampling range for factor entries: `num / den` with both drawn uniformly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueBounds {
    pub num_min: i64,
    pub num_max: i64,
    pub den_min: i64,
    pub den_max: i64,
}

impl Default for ValueBounds {
    fn default() -> Self {
        ValueBounds { num_min: 1, num_max: 5, den_min: 1, den_max: 3 }
    }
}

impl ValueBounds {
    pub fn validate(&self) -> Result<()> {
        if self.num_min < 1 || self.num_min > self.num_max || self.den_min < 1 || self.den_min > self.den_max {
            return Err(contract(format!(
                "invalid value bounds: numerators {}..{}, denominators {}..{}",
                self.num_min, self.num_max, self.den_min, self.den_max
            )));
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Rational {
        frac(rng.gen_range(self.num_min..=self.num_max), rng.gen_range(self.den_min..=self.den_max))
    }
}

/// How factor entries are populated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FactorShape {
    /// Every off-diagonal entry positive.
    Full,
    /// Canonical padding zeros, everything else positive.
    Canonical,
    /// Like `Full`, but each entry is zero with the given probability.
    /// The result is banded totally nonnegative, usually not positive.
    Sparse(f64),
}

/// Seeded positive bidiagonal factorization with fully positive factors.
pub fn random_pbf(seed: u64, n: usize, p: usize, q: usize, bounds: &ValueBounds) -> Result<PBFactorization> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pbf_with(&mut rng, n, p, q, bounds, FactorShape::Full)
}

/// Generator over a caller-owned RNG. `Sparse` shapes bypass the positivity
/// checks of [`PBFactorization::new`].
pub fn random_pbf_with(
    rng: &mut impl Rng,
    n: usize,
    p: usize,
    q: usize,
    bounds: &ValueBounds,
    shape: FactorShape,
) -> Result<PBFactorization> {
    bounds.validate()?;
    if n == 0 || n <= p.max(q) {
        return Err(contract(format!("need n > max(p, q), got n = {n}, p = {p}, q = {q}")));
    }
    let side = |count: usize, rng: &mut _| -> Vec<Vec<Rational>> {
        (0..count)
            .map(|i| {
                let pad = count - 1 - i;
                (0..n - 1)
                    .map(|k| sample_entry(rng, bounds, shape, k < pad))
                    .collect()
            })
            .collect()
    };
    let lower = side(p, rng);
    let upper = side(q, rng);
    let diag = (0..n).map(|_| bounds.sample(rng)).collect();
    match shape {
        FactorShape::Sparse(_) => Ok(PBFactorization { n, lower, diag, upper }),
        _ => PBFactorization::new(lower, diag, upper),
    }
}

fn sample_entry(rng: &mut impl Rng, bounds: &ValueBounds, shape: FactorShape, padding: bool) -> Rational {
    match shape {
        FactorShape::Full => bounds.sample(rng),
        FactorShape::Canonical if padding => Rational::zero(),
        FactorShape::Canonical => bounds.sample(rng),
        FactorShape::Sparse(zero) => {
            if rng.gen_bool(zero) {
                Rational::zero()
            } else {
                bounds.sample(rng)
            }
        }
    }
}
