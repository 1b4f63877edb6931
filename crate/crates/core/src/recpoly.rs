//! Left and right recursion polynomials of a banded matrix.
//!
//! The left families solve `A(x) T = x A(x)` column by column and the right
//! families solve `T B(x) = x B(x)` row by row, seeded by unitriangular
//! initial blocks `A0` (upper) and `B0` (lower). Indices are 0-based.

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::band::BandedMatrix;
use crate::criteria::is_btp_oracle;
use crate::error::{contract, Error, Result};
use crate::matrix::Matrix;
use crate::pbf::ValueBounds;
use crate::poly::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// `A0` is `p×p` upper unitriangular, `B0` is `q×q` lower unitriangular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialConditions {
    a0: Matrix,
    b0: Matrix,
}

impl InitialConditions {
    pub fn new(a0: Matrix, b0: Matrix) -> Result<Self> {
        let unit_diag = |m: &Matrix| (0..m.n_rows()).all(|i| m.get(i, i).is_one());
        if !a0.is_square() || !a0.is_upper_triangular() || !unit_diag(&a0) {
            return Err(contract("A0 must be square upper unitriangular"));
        }
        if !b0.is_square() || !b0.is_lower_triangular() || !unit_diag(&b0) {
            return Err(contract("B0 must be square lower unitriangular"));
        }
        Ok(InitialConditions { a0, b0 })
    }

    /// Identity blocks: every free constant zero.
    pub fn identity(p: usize, q: usize) -> Self {
        InitialConditions { a0: Matrix::identity(p), b0: Matrix::identity(q) }
    }

    pub fn a0(&self) -> &Matrix {
        &self.a0
    }

    pub fn b0(&self) -> &Matrix {
        &self.b0
    }
}

/// Families indexed `[a][n]`: `A_n^{(a+1)}` for the left side.
pub type Families = Vec<Vec<Polynomial>>;

/// Left families for columns `j < count`, producing `A_0..A_{count+p-1}`.
pub fn left_recursion(t: &BandedMatrix, a0: &Matrix, count: usize) -> Result<Families> {
    let (n, p, q) = (t.n(), t.p(), t.q());
    check_seed(a0, p, "A0")?;
    if count + p > n {
        return Err(contract(format!("{count} left steps need n >= {}, got {n}", count + p)));
    }
    let mut families: Families = (0..p)
        .map(|a| (0..p).map(|m| Polynomial::constant(a0.get(a, m).clone())).collect())
        .collect();
    for j in 0..count {
        let pivot = t.get(j + p, j);
        if pivot.is_zero() {
            return Err(Error::Precondition(format!(
                "extreme subdiagonal entry T({}, {}) is zero",
                j + p + 1,
                j + 1
            )));
        }
        let inv = pivot.recip();
        for family in families.iter_mut() {
            let mut acc = family[j].shift();
            for i in j.saturating_sub(q)..j + p {
                let c = t.get(i, j);
                if !c.is_zero() {
                    acc = &acc - &family[i].scale(c);
                }
            }
            family.push(acc.scale(&inv));
        }
    }
    Ok(families)
}

/// Right families for rows `i < count`, producing `B_0..B_{count+q-1}`.
pub fn right_recursion(t: &BandedMatrix, b0: &Matrix, count: usize) -> Result<Families> {
    let (n, p, q) = (t.n(), t.p(), t.q());
    check_seed(b0, q, "B0")?;
    if count + q > n {
        return Err(contract(format!("{count} right steps need n >= {}, got {n}", count + q)));
    }
    let mut families: Families = (0..q)
        .map(|b| (0..q).map(|m| Polynomial::constant(b0.get(m, b).clone())).collect())
        .collect();
    for i in 0..count {
        let pivot = t.get(i, i + q);
        if pivot.is_zero() {
            return Err(Error::Precondition(format!(
                "extreme superdiagonal entry T({}, {}) is zero",
                i + 1,
                i + q + 1
            )));
        }
        let inv = pivot.recip();
        for family in families.iter_mut() {
            let mut acc = family[i].shift();
            for j in i.saturating_sub(p)..i + q {
                let c = t.get(i, j);
                if !c.is_zero() {
                    acc = &acc - &family[j].scale(c);
                }
            }
            family.push(acc.scale(&inv));
        }
    }
    Ok(families)
}

fn check_seed(m: &Matrix, width: usize, name: &str) -> Result<()> {
    if m.n_rows() != width || m.n_cols() != width {
        return Err(contract(format!(
            "{name} is {}x{}, expected {width}x{width}",
            m.n_rows(),
            m.n_cols()
        )));
    }
    Ok(())
}

/// `⌈(n + 2 - a) / p⌉ - 1`; `-1` means the polynomial must vanish.
pub fn degree_bound(n: usize, a: usize, p: usize) -> Result<i64> {
    if a == 0 || a > p {
        return Err(contract(format!("family index {a} outside 1..={p}")));
    }
    let num = n as i64 + 2 - a as i64;
    Ok(num.div_euclid(p as i64) + i64::from(num.rem_euclid(p as i64) != 0) - 1)
}

/// A banded matrix with its initial data and both polynomial families.
#[derive(Debug, Clone)]
pub struct RecursionTable {
    t: BandedMatrix,
    init: InitialConditions,
    left: Families,
    right: Families,
}

impl RecursionTable {
    /// Runs each recurrence as far as the matrix allows.
    pub fn build(t: &BandedMatrix, init: &InitialConditions) -> Result<Self> {
        let left = left_recursion(t, &init.a0, t.n() - t.p())?;
        let right = right_recursion(t, &init.b0, t.n() - t.q())?;
        Ok(RecursionTable { t: t.clone(), init: init.clone(), left, right })
    }

    pub fn with_counts(t: &BandedMatrix, init: &InitialConditions, left: usize, right: usize) -> Result<Self> {
        Ok(RecursionTable {
            t: t.clone(),
            init: init.clone(),
            left: left_recursion(t, &init.a0, left)?,
            right: right_recursion(t, &init.b0, right)?,
        })
    }

    pub fn matrix(&self) -> &BandedMatrix {
        &self.t
    }

    pub fn initial(&self) -> &InitialConditions {
        &self.init
    }

    pub fn family(&self, side: Side) -> &Families {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn width(&self, side: Side) -> usize {
        match side {
            Side::Left => self.t.p(),
            Side::Right => self.t.q(),
        }
    }

    /// Number of computed indices per family.
    pub fn len(&self, side: Side) -> usize {
        self.family(side).first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len(Side::Left) == 0 && self.len(Side::Right) == 0
    }

    /// Block superdiagonal count `⌈q/p⌉` of the left block form.
    pub fn block_superdiagonals(&self) -> usize {
        let (p, q) = (self.t.p(), self.t.q());
        if p == 0 {
            0
        } else {
            q.div_ceil(p)
        }
    }

    /// `Σ_i A_i T(i,j) - x A_j` (left) or `Σ_j T(i,j) B_j - x B_i` (right) at
    /// index `j` of family `a` (0-based); zero wherever the recurrence ran.
    pub fn residual(&self, side: Side, a: usize, j: usize) -> Polynomial {
        let family = &self.family(side)[a];
        let n = self.t.n();
        let mut acc = -&family[j].shift();
        for i in 0..family.len().min(n) {
            let c = match side {
                Side::Left => self.t.get(i, j),
                Side::Right => self.t.get(j, i),
            };
            if !c.is_zero() {
                acc = &acc + &family[i].scale(c);
            }
        }
        acc
    }

    /// Indices whose defining relation is fully inside the computed window.
    pub fn relation_count(&self, side: Side) -> usize {
        self.len(side).saturating_sub(self.width(side))
    }

    /// Leading block of index `k`, if all `width` members are computed.
    /// Left: `[a][c]` is the `x^k` coefficient of `A^{(a)}_{kp+c}`.
    /// Right: `[r][b]` is the `x^k` coefficient of `B^{(b)}_{kq+r}`.
    pub fn leading_block(&self, side: Side, k: usize) -> Option<Matrix> {
        let w = self.width(side);
        if w == 0 || (k + 1) * w > self.len(side) {
            return None;
        }
        let fam = self.family(side);
        Some(match side {
            Side::Left => Matrix::from_fn(w, w, |a, c| fam[a][k * w + c].coeff(k)),
            Side::Right => Matrix::from_fn(w, w, |r, b| fam[b][k * w + r].coeff(k)),
        })
    }

    /// Closed form of the leading block through the `w×w` blocks `Θ` of `T`:
    /// left `(Θ_{k,k-1}⋯Θ_{1,0} A0^{-1})^{-1}`, right `(B0^{-1} Θ_{0,1}⋯Θ_{k-1,k})^{-1}`.
    pub fn closed_form_block(&self, side: Side, k: usize) -> Option<Matrix> {
        let w = self.width(side);
        if w == 0 || (k + 1) * w > self.t.n() {
            return None;
        }
        let dense = self.t.to_dense();
        let theta = |r: usize, c: usize| dense.block(r * w, c * w, w, w);
        let m = match side {
            Side::Left => (1..=k)
                .rev()
                .fold(Matrix::identity(w), |acc, l| &acc * &theta(l, l - 1))
                .try_mul(&self.init.a0.inverse()?)
                .ok()?,
            Side::Right => (1..=k).fold(self.init.b0.inverse()?, |acc, l| &acc * &theta(l - 1, l)),
        };
        m.inverse()
    }
}

/// A family member whose degree misses the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeMismatch {
    pub side: Side,
    /// 1-based family index.
    pub family: usize,
    pub index: usize,
    pub degree: Option<usize>,
    pub bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalityReport {
    /// Every computed degree meets its bound with equality.
    pub normal: bool,
    pub mismatches: Vec<DegreeMismatch>,
    /// Degrees above the bound; nonempty only on an implementation bug.
    pub bound_violations: Vec<DegreeMismatch>,
    /// Equality at the guaranteed indices `n = Np + a - 1`.
    pub guaranteed_hold: bool,
}

fn degree_matches(poly: &Polynomial, bound: i64) -> bool {
    match poly.degree() {
        None => bound < 0,
        Some(d) => d as i64 == bound,
    }
}

pub fn check_normality(table: &RecursionTable) -> NormalityReport {
    let mut mismatches = Vec::new();
    let mut bound_violations = Vec::new();
    let mut guaranteed_hold = true;
    for side in [Side::Left, Side::Right] {
        let w = table.width(side);
        for (a, family) in table.family(side).iter().enumerate() {
            for (index, poly) in family.iter().enumerate() {
                let bound = degree_bound(index, a + 1, w).expect("family index within width");
                let degree = poly.degree();
                let entry = DegreeMismatch { side, family: a + 1, index, degree, bound };
                if degree.is_some_and(|d| d as i64 > bound) {
                    bound_violations.push(entry.clone());
                }
                if !degree_matches(poly, bound) {
                    if index % w == a {
                        guaranteed_hold = false;
                    }
                    mismatches.push(entry);
                }
            }
        }
    }
    NormalityReport { normal: mismatches.is_empty(), mismatches, bound_violations, guaranteed_hold }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSigns {
    pub side: Side,
    pub k: usize,
    pub block: Matrix,
    /// Upper (left side) or lower (right side) triangular.
    pub triangular: bool,
    /// Entries on the `j`-th super/subdiagonal have sign `(-1)^j`, strictly.
    pub checkerboard: bool,
    pub closed_form_matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPatternReport {
    pub k: usize,
    pub left: Option<BlockSigns>,
    pub right: Option<BlockSigns>,
}

impl SignPatternReport {
    pub fn holds(&self) -> bool {
        [&self.left, &self.right]
            .into_iter()
            .flatten()
            .all(|b| b.triangular && b.checkerboard && b.closed_form_matches)
    }
}

pub fn leading_block_signs(table: &RecursionTable, k: usize) -> SignPatternReport {
    let inspect = |side: Side| -> Option<BlockSigns> {
        let block = table.leading_block(side, k)?;
        let w = block.n_rows();
        // Orient so that (i, i + j) walks the j-th off-diagonal on the triangular side.
        let entry = |i: usize, j: usize| match side {
            Side::Left => block.get(i, j),
            Side::Right => block.get(j, i),
        };
        let triangular = match side {
            Side::Left => block.is_upper_triangular(),
            Side::Right => block.is_lower_triangular(),
        };
        let checkerboard = (0..w).all(|i| {
            (i..w).all(|c| {
                let v = entry(i, c);
                if (c - i) % 2 == 0 {
                    v.is_positive()
                } else {
                    v.is_negative()
                }
            })
        });
        let closed_form_matches = table.closed_form_block(side, k).as_ref() == Some(&block);
        Some(BlockSigns { side, k, block, triangular, checkerboard, closed_form_matches })
    };
    SignPatternReport { k, left: inspect(Side::Left), right: inspect(Side::Right) }
}

/// Unit upper triangular `w×w` matrix whose entries above the diagonal are
/// drawn from `bounds`, each negated with probability one half when `signed`.
pub fn random_unitriangular(rng: &mut impl Rng, w: usize, bounds: &ValueBounds, signed: bool) -> Result<Matrix> {
    bounds.validate()?;
    let mut m = Matrix::identity(w);
    for i in 0..w {
        for j in i + 1..w {
            let v = bounds.sample(rng);
            m.set(i, j, if signed && rng.gen_bool(0.5) { -v } else { v });
        }
    }
    Ok(m)
}

/// Initial data with `A0^{-1}` upper and `B0^{-1}` lower triangular totally
/// positive, built from positive bidiagonal factors and certified by the
/// exhaustive oracle.
pub fn random_tp_initial(rng: &mut impl Rng, p: usize, q: usize, bounds: &ValueBounds) -> Result<InitialConditions> {
    let a_inv = tp_upper_unitriangular(rng, p, bounds)?;
    let b_inv = tp_upper_unitriangular(rng, q, bounds)?.transpose();
    let a0 = a_inv.inverse().expect("unitriangular");
    let b0 = b_inv.inverse().expect("unitriangular");
    InitialConditions::new(a0, b0)
}

fn tp_upper_unitriangular(rng: &mut impl Rng, w: usize, bounds: &ValueBounds) -> Result<Matrix> {
    bounds.validate()?;
    let mut m = Matrix::identity(w);
    for _ in 1..w {
        let mut u = Matrix::identity(w);
        for i in 0..w - 1 {
            u.set(i, i + 1, bounds.sample(rng));
        }
        m = &m * &u;
    }
    if w > 0 {
        let banded = BandedMatrix::from_dense(&m, 0, w - 1)?;
        if !is_btp_oracle(&banded)?.verdict {
            return Err(Error::Precondition("generated initial block is not triangular TP".into()));
        }
    }
    Ok(m)
}
