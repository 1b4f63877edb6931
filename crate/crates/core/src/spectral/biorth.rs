//! Eigenvectors built from recursion polynomials and the discrete mixed
//! biorthogonality they satisfy on a finite truncation.
//!
//! At an eigenvalue `λ` of the `n×n` truncation, the left eigenvector is a
//! combination `Σ_a d_a A^{(a)}(λ)` whose coefficients kill the `p×p`
//! boundary residual in the last `p` columns; the right eigenvector is
//! `Σ_b c_b B^{(b)}(λ)` with `c` killing the last `q` rows. Normalizing
//! `u·w = 1` for every eigenvalue gives `Σ_k w_k u_k = I`, which is the
//! discrete form of the biorthogonality relations.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::SpectrumReport;
use crate::band::BandedMatrix;
use crate::criteria::is_btp_oracle;
use crate::error::{contract, Error, Result};
use crate::matrix::Matrix;
use crate::minor::determinant;
use crate::pbf::{lambda_matrix, upsilon_matrix, PBFactorization};
use crate::recpoly::{InitialConditions, RecursionTable, Side};
use crate::scalar::round_significant;
use crate::Rational;

/// Working precision: values carry `bits + 64` significant bits.
#[derive(Debug, Clone, Copy)]
struct Working {
    bits: u32,
}

impl Working {
    fn new(bits: u32) -> Self {
        Working { bits: bits + 64 }
    }

    fn round(&self, x: Rational) -> Rational {
        round_significant(&x, self.bits)
    }
}

fn max_abs<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
}

/// Residuals of the left eigen-relation at a set of points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenConsistency {
    pub points: Vec<Rational>,
    /// Largest `|Σ_i A_i(λ)T(i,j) - λA_j(λ)|` over interior columns.
    pub interior_max: Rational,
    /// Per point: `|det|` of the boundary residual block with each family
    /// row scaled by its largest value. Vanishes exactly at eigenvalues.
    pub boundary: Vec<Rational>,
}

impl EigenConsistency {
    pub fn boundary_max(&self) -> Rational {
        max_abs(&self.boundary)
    }

    pub fn boundary_min(&self) -> Rational {
        self.boundary.iter().min().cloned().unwrap_or_else(Rational::zero)
    }
}

/// Consistency at the reported eigenvalue midpoints.
pub fn eigen_consistency(table: &RecursionTable, report: &SpectrumReport) -> EigenConsistency {
    let points: Vec<Rational> = report.eigenvalues.iter().map(|e| e.value.clone()).collect();
    eigen_consistency_at(table, &points)
}

pub fn eigen_consistency_at(table: &RecursionTable, points: &[Rational]) -> EigenConsistency {
    let t = table.matrix();
    let n = t.n();
    let families = table.family(Side::Left);
    let interior = table.relation_count(Side::Left);
    let complete = table.len(Side::Left) == n;
    let mut interior_max = Rational::zero();
    let mut boundary = Vec::new();
    for lambda in points {
        let values: Vec<Vec<Rational>> =
            families.iter().map(|f| f.iter().map(|a| a.eval(lambda)).collect()).collect();
        let residual = |vals: &[Rational], j: usize| -> Rational {
            let mut acc = -(lambda * &vals[j]);
            for (i, v) in vals.iter().enumerate() {
                let c = t.get(i, j);
                if !c.is_zero() {
                    acc += v * c;
                }
            }
            acc
        };
        for vals in &values {
            for j in 0..interior {
                let r = residual(vals, j).abs();
                if r > interior_max {
                    interior_max = r;
                }
            }
        }
        if complete && !families.is_empty() {
            let p = families.len();
            let block = Matrix::from_fn(p, p, |a, c| {
                let scale = max_abs(&values[a]);
                let r = residual(&values[a], n - p + c);
                if scale.is_zero() {
                    r
                } else {
                    r / scale
                }
            });
            boundary.push(determinant(&block).expect("square block").abs());
        }
    }
    EigenConsistency { points: points.to_vec(), interior_max, boundary }
}

/// Discrete weights: at eigenvalue `k`, atom `μ_{b,a,k} = c_k[b]·d_k[a]·scale_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteWeights {
    pub eigenvalues: Vec<Rational>,
    /// Right boundary kernels `c_k` (length `q`).
    pub right: Vec<Vec<Rational>>,
    /// Left boundary kernels `d_k` (length `p`).
    pub left: Vec<Vec<Rational>>,
    /// Joint normalization `1 / (u_k · w_k)`.
    pub scale: Vec<Rational>,
}

impl DiscreteWeights {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `μ_{b,a,k}` with 0-based `b`, `a`.
    pub fn weight(&self, k: usize, b: usize, a: usize) -> Rational {
        &self.right[k][b] * &self.left[k][a] * &self.scale[k]
    }

    /// The `q×p` block of atoms at eigenvalue `k`.
    pub fn block(&self, k: usize) -> Matrix {
        Matrix::from_fn(self.right[k].len(), self.left[k].len(), |b, a| self.weight(k, b, a))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Biorthogonality {
    pub weights: DiscreteWeights,
    /// `Σ_k Σ_{a,b} B_l^{(b)}(λ_k) μ_{b,a,k} A_m^{(a)}(λ_k) - δ_{l,m}` for `l, m < window`.
    pub residual: Matrix,
    pub window: usize,
    pub precision_bits: u32,
}

impl Biorthogonality {
    pub fn max_residual(&self) -> Rational {
        max_abs(self.residual.entries())
    }
}

/// Null vector of a square matrix by complete pivoting; fails when the last
/// pivot is not negligible against the largest entry.
fn null_vector(m: &Matrix, wp: Working, threshold: &Rational) -> Option<Vec<Rational>> {
    let k = m.n_rows();
    let mut a = m.to_rows();
    let scale = max_abs(m.entries()).max(Rational::one());
    let mut rows: Vec<usize> = (0..k).collect();
    let mut cols: Vec<usize> = (0..k).collect();
    for step in 0..k {
        let (mut pr, mut pc) = (step, step);
        let mut best = Rational::zero();
        for r in step..k {
            for c in step..k {
                let v = a[rows[r]][cols[c]].abs();
                if v > best {
                    best = v;
                    (pr, pc) = (r, c);
                }
            }
        }
        rows.swap(step, pr);
        cols.swap(step, pc);
        if step == k - 1 {
            if best > threshold * &scale {
                return None;
            }
            break;
        }
        if best.is_zero() {
            // Rank already dropped; the remaining variables are free.
            break;
        }
        let pivot = a[rows[step]][cols[step]].clone();
        for r in step + 1..k {
            let factor = wp.round(&a[rows[r]][cols[step]] / &pivot);
            if factor.is_zero() {
                continue;
            }
            for c in step..k {
                let v = wp.round(&a[rows[r]][cols[c]] - &factor * &a[rows[step]][cols[c]]);
                a[rows[r]][cols[c]] = v;
            }
        }
    }
    // Last variable in pivot order is free; back-substitute through the
    // leading upper triangle, treating any exhausted pivots as free too.
    let mut x = vec![Rational::zero(); k];
    x[cols[k - 1]] = Rational::one();
    for step in (0..k - 1).rev() {
        let pivot = &a[rows[step]][cols[step]];
        if pivot.is_zero() {
            continue;
        }
        let mut acc = Rational::zero();
        for c in step + 1..k {
            acc += &a[rows[step]][cols[c]] * &x[cols[c]];
        }
        x[cols[step]] = wp.round(-acc / pivot);
    }
    Some(x)
}

/// Weights and residual matrix for the spectrum in `report`.
pub fn discrete_biorthogonality(
    t: &BandedMatrix,
    init: &InitialConditions,
    report: &SpectrumReport,
) -> Result<Biorthogonality> {
    let (n, p, q) = (t.n(), t.p(), t.q());
    if !report.all_real() || report.eigenvalues.len() != n {
        return Err(Error::Precondition("biorthogonality needs n simple real eigenvalues".into()));
    }
    if (p == 0) != (q == 0) {
        return Err(Error::Precondition(format!(
            "one-sided band ({p},{q}) has no left or right recursion families"
        )));
    }
    let window = n - p.max(q);
    if window == 0 {
        return Err(contract(format!("no verified window for n = {n}, band ({p},{q})")));
    }
    let wp = Working::new(report.precision_bits);
    let eigenvalues: Vec<Rational> = report.eigenvalues.iter().map(|e| e.value.clone()).collect();
    if p == 0 {
        return Ok(diagonal_case(t, eigenvalues, report.precision_bits));
    }

    let table = RecursionTable::build(t, init)?;
    let threshold = Rational::new(BigInt::one(), BigInt::one() << (report.precision_bits / 4));
    let mut weights = DiscreteWeights { eigenvalues: eigenvalues.clone(), right: vec![], left: vec![], scale: vec![] };
    let mut us = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for (k, lambda) in eigenvalues.iter().enumerate() {
        let eval = |side: Side| -> Vec<Vec<Rational>> {
            table
                .family(side)
                .iter()
                .map(|f| f.iter().map(|poly| wp.round(poly.eval(lambda))).collect())
                .collect()
        };
        let a_vals = eval(Side::Left);
        let b_vals = eval(Side::Right);

        // Left kernel: dᵀ R = 0 with R[a][c] the residual of family a at column n-p+c.
        let left_sys = Matrix::from_fn(p, p, |c, a| {
            let j = n - p + c;
            let mut acc = -(lambda * &a_vals[a][j]);
            for i in j.saturating_sub(q)..n {
                let e = t.get(i, j);
                if !e.is_zero() {
                    acc += &a_vals[a][i] * e;
                }
            }
            wp.round(acc / max_abs(&a_vals[a]))
        });
        // Right kernel: S c = 0 with S[r][b] the residual of family b at row n-q+r.
        let right_sys = Matrix::from_fn(q, q, |r, b| {
            let i = n - q + r;
            let mut acc = -(lambda * &b_vals[b][i]);
            for j in i.saturating_sub(p)..n {
                let e = t.get(i, j);
                if !e.is_zero() {
                    acc += e * &b_vals[b][j];
                }
            }
            wp.round(acc / max_abs(&b_vals[b]))
        });
        let d = null_vector(&left_sys, wp, &threshold).ok_or(Error::SpectralInconsistency { index: k + 1 })?;
        let c = null_vector(&right_sys, wp, &threshold).ok_or(Error::SpectralInconsistency { index: k + 1 })?;
        // The row scaling above rescales the unknowns; undo it.
        let d: Vec<Rational> = d.iter().enumerate().map(|(a, v)| wp.round(v / max_abs(&a_vals[a]))).collect();
        let c: Vec<Rational> = c.iter().enumerate().map(|(b, v)| wp.round(v / max_abs(&b_vals[b]))).collect();

        let u: Vec<Rational> = (0..n)
            .map(|j| wp.round((0..p).map(|a| &d[a] * &a_vals[a][j]).sum()))
            .collect();
        let w: Vec<Rational> = (0..n)
            .map(|i| wp.round((0..q).map(|b| &c[b] * &b_vals[b][i]).sum()))
            .collect();
        let dot: Rational = wp.round(u.iter().zip(&w).map(|(x, y)| x * y).sum());
        if dot.is_zero() {
            return Err(Error::SpectralInconsistency { index: k + 1 });
        }
        let scale = wp.round(dot.recip());
        us.push(u.into_iter().map(|x| wp.round(x * &scale)).collect::<Vec<_>>());
        ws.push(w);
        weights.left.push(d);
        weights.right.push(c);
        weights.scale.push(scale);
    }

    let residual = Matrix::from_fn(window, window, |l, m| {
        let sum: Rational = (0..n).map(|k| &ws[k][l] * &us[k][m]).sum();
        let delta = if l == m { Rational::one() } else { Rational::zero() };
        wp.round(sum) - delta
    });
    Ok(Biorthogonality { weights, residual, window, precision_bits: report.precision_bits })
}

/// Diagonal truncation: eigenvectors are unit vectors and every atom is 1.
fn diagonal_case(t: &BandedMatrix, eigenvalues: Vec<Rational>, bits: u32) -> Biorthogonality {
    let n = t.n();
    let k = eigenvalues.len();
    let weights = DiscreteWeights {
        eigenvalues,
        right: vec![vec![]; k],
        left: vec![vec![]; k],
        scale: vec![Rational::one(); k],
    };
    let positions: Vec<usize> = weights
        .eigenvalues
        .iter()
        .map(|lambda| (0..n).find(|&i| t.get(i, i) == lambda).expect("exact diagonal eigenvalue"))
        .collect();
    let residual = Matrix::from_fn(n, n, |l, m| {
        let sum = positions.iter().filter(|&&i| i == l && i == m).count();
        let delta = usize::from(l == m);
        Rational::from_integer(BigInt::from(sum as i64 - delta as i64))
    });
    Biorthogonality { weights, residual, window: n, precision_bits: bits }
}

/// Which `p×p` corner of the `(p+1)×(p+1)` matrices `Λ_p`, `Υ_q` enters the
/// factorization hypothesis `A0^{-1} = Λ·𝒜`, `B0^{-1} = 𝒝·Υ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambdaReading {
    /// Rows and columns `0..p`.
    Leading,
    /// Rows and columns `1..=p`.
    Trailing,
}

impl LambdaReading {
    pub fn name(self) -> &'static str {
        match self {
            LambdaReading::Leading => "leading",
            LambdaReading::Trailing => "trailing",
        }
    }

    fn corner(self, m: &Matrix) -> Matrix {
        let w = m.n_rows() - 1;
        match self {
            LambdaReading::Leading => m.block(0, 0, w, w),
            LambdaReading::Trailing => m.block(1, 1, w, w),
        }
    }
}

/// Initial data satisfying the hypothesis under `reading`: `A0 = (Λ𝒜)^{-1}`
/// and `B0 = (𝒝Υ)^{-1}`, with each family rescaled to a unit diagonal.
/// Positive rescaling of a family does not change any weight sign.
pub fn hypothesis_initial_conditions(
    f: &PBFactorization,
    reading: LambdaReading,
    script_a: &Matrix,
    script_b: &Matrix,
) -> Result<InitialConditions> {
    let lambda = reading.corner(&lambda_matrix(f)?);
    let upsilon = reading.corner(&upsilon_matrix(f)?);
    let a_inv = lambda.try_mul(script_a)?;
    let b_inv = script_b.try_mul(&upsilon)?;
    let a0 = a_inv.inverse().ok_or_else(|| contract("Λ·𝒜 is singular"))?;
    let b0 = b_inv.inverse().ok_or_else(|| contract("𝒝·Υ is singular"))?;
    let a0 = Matrix::from_fn(a0.n_rows(), a0.n_cols(), |i, j| a0.get(i, j) / a0.get(i, i));
    let b0 = Matrix::from_fn(b0.n_rows(), b0.n_cols(), |i, j| b0.get(i, j) / b0.get(j, j));
    InitialConditions::new(a0, b0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightViolation {
    /// 1-based eigenvalue index.
    pub k: usize,
    pub b: usize,
    pub a: usize,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub reading: LambdaReading,
    /// `Λ^{-1} A0^{-1}` is upper and `B0^{-1} Υ^{-1}` lower triangular TP.
    pub hypothesis_holds: bool,
    /// Negative atoms.
    pub violations: Vec<WeightViolation>,
    pub min_weight: Option<Rational>,
}

impl AuditReport {
    pub fn weights_nonnegative(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sign structure of the atoms, together with whether `init` meets the
/// factorization hypothesis under `reading`.
pub fn positivity_audit(
    weights: &DiscreteWeights,
    init: &InitialConditions,
    f: &PBFactorization,
    reading: LambdaReading,
) -> Result<AuditReport> {
    let hypothesis_holds = hypothesis_check(init, f, reading)?;
    let mut violations = Vec::new();
    let mut min_weight: Option<Rational> = None;
    for k in 0..weights.len() {
        for b in 0..weights.right[k].len() {
            for a in 0..weights.left[k].len() {
                let value = weights.weight(k, b, a);
                if min_weight.as_ref().is_none_or(|m| &value < m) {
                    min_weight = Some(value.clone());
                }
                if value.is_negative() {
                    violations.push(WeightViolation { k: k + 1, b: b + 1, a: a + 1, value });
                }
            }
        }
    }
    if weights.right.iter().all(Vec::is_empty) {
        min_weight = weights.scale.iter().min().cloned();
    }
    Ok(AuditReport { reading, hypothesis_holds, violations, min_weight })
}

fn hypothesis_check(init: &InitialConditions, f: &PBFactorization, reading: LambdaReading) -> Result<bool> {
    let (p, q) = (f.p(), f.q());
    if init.a0().n_rows() != p || init.b0().n_rows() != q {
        return Err(contract("initial conditions do not match the factorization band"));
    }
    let upper_tp = |m: &Matrix| -> Result<bool> {
        let w = m.n_rows();
        if w == 0 {
            return Ok(true);
        }
        if !m.is_upper_triangular() {
            return Ok(false);
        }
        Ok(is_btp_oracle(&BandedMatrix::from_dense(m, 0, w - 1)?)?.verdict)
    };
    let lambda = reading.corner(&lambda_matrix(f)?);
    let upsilon = reading.corner(&upsilon_matrix(f)?);
    let inv = |m: &Matrix| m.inverse().ok_or_else(|| contract("singular initial block"));
    let script_a = inv(&lambda)?.try_mul(&inv(init.a0())?)?;
    let script_b = inv(init.b0())?.try_mul(&inv(&upsilon)?)?;
    Ok(upper_tp(&script_a)? && upper_tp(&script_b.transpose())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbf::{pbf_compose, random_pbf, ValueBounds};
    use crate::scalar::{frac, int, pow10_rational};
    use crate::spectral::eigenvalues_hp;

    fn tri() -> BandedMatrix {
        BandedMatrix::from_dense(&Matrix::from_i64(&[[1, 1, 0], [1, 2, 1], [0, 1, 2]]), 1, 1).unwrap()
    }

    #[test]
    fn consistency_on_tridiagonal() {
        let t = tri();
        let table = RecursionTable::build(&t, &InitialConditions::identity(1, 1)).unwrap();
        let report = eigenvalues_hp(&t, 256).unwrap();
        let c = eigen_consistency(&table, &report);
        assert!(c.interior_max.is_zero());
        assert!(c.boundary_max() < pow10_rational(-70));
        let shifted: Vec<Rational> = c.points.iter().map(|x| x + frac(1, 10)).collect();
        let off = eigen_consistency_at(&table, &shifted);
        assert!(off.boundary_min() > pow10_rational(-3));
    }

    #[test]
    fn consistency_exact_for_rational_spectrum() {
        // Eigenvalues 1 and 3.
        let t = BandedMatrix::from_dense(&Matrix::from_i64(&[[2, 1], [1, 2]]), 1, 1).unwrap();
        let table = RecursionTable::build(&t, &InitialConditions::identity(1, 1)).unwrap();
        let report = eigenvalues_hp(&t, 64).unwrap();
        let c = eigen_consistency(&table, &report);
        assert!(report.eigenvalues.iter().all(|e| e.is_exact()));
        assert!(c.boundary.iter().all(Zero::is_zero));
    }

    #[test]
    fn tridiagonal_weights_are_christoffel_numbers() {
        let t = tri();
        let report = eigenvalues_hp(&t, 256).unwrap();
        let bio = discrete_biorthogonality(&t, &InitialConditions::identity(1, 1), &report).unwrap();
        assert_eq!(bio.window, 2);
        assert!(bio.max_residual() < pow10_rational(-60));
        let total: Rational = (0..3).map(|k| bio.weights.weight(k, 0, 0)).sum();
        assert!((total - int(1)).abs() < pow10_rational(-60));
        assert!((0..3).all(|k| bio.weights.weight(k, 0, 0).is_positive()));
    }

    #[test]
    fn diagonal_edge_case() {
        let t = BandedMatrix::from_dense(&Matrix::diagonal(&[int(2), int(3)]), 0, 0).unwrap();
        let report = eigenvalues_hp(&t, 64).unwrap();
        let bio = discrete_biorthogonality(&t, &InitialConditions::identity(0, 0), &report).unwrap();
        assert!(bio.residual.entries().iter().all(Zero::is_zero));
        assert_eq!(bio.weights.scale, vec![int(1), int(1)]);
    }

    #[test]
    fn one_sided_band_rejected() {
        let t = BandedMatrix::from_dense(&Matrix::from_i64(&[[2, 0], [1, 3]]), 1, 0).unwrap();
        let report = eigenvalues_hp(&t, 64).unwrap();
        let err = discrete_biorthogonality(&t, &InitialConditions::identity(1, 0), &report).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn pbf_instance_improves_with_precision() {
        let f = random_pbf(3, 8, 2, 1, &ValueBounds::default()).unwrap();
        let t = pbf_compose(&f);
        let init = InitialConditions::identity(2, 1);
        let lo = discrete_biorthogonality(&t, &init, &eigenvalues_hp(&t, 256).unwrap()).unwrap();
        let hi = discrete_biorthogonality(&t, &init, &eigenvalues_hp(&t, 512).unwrap()).unwrap();
        assert!(lo.max_residual() < pow10_rational(-20));
        assert!(hi.max_residual() * pow10_rational(10) < lo.max_residual());
    }

    #[test]
    fn low_precision_is_caught() {
        let f = random_pbf(3, 8, 2, 2, &ValueBounds::default()).unwrap();
        let t = pbf_compose(&f);
        let mut report = eigenvalues_hp(&t, 256).unwrap();
        // Pretend the eigenvalues are far better than they are.
        for e in &mut report.eigenvalues {
            e.value = round_significant(&e.value, 12);
        }
        let err = discrete_biorthogonality(&t, &InitialConditions::identity(2, 2), &report).unwrap_err();
        assert!(matches!(err, Error::SpectralInconsistency { .. }));
    }

    #[test]
    fn audit_p1_positive_under_both_readings() {
        let f = random_pbf(5, 6, 1, 1, &ValueBounds::default()).unwrap();
        let t = pbf_compose(&f);
        let report = eigenvalues_hp(&t, 256).unwrap();
        for reading in [LambdaReading::Leading, LambdaReading::Trailing] {
            let init = hypothesis_initial_conditions(&f, reading, &Matrix::identity(1), &Matrix::identity(1)).unwrap();
            let bio = discrete_biorthogonality(&t, &init, &report).unwrap();
            let audit = positivity_audit(&bio.weights, &init, &f, reading).unwrap();
            assert!(audit.hypothesis_holds);
            assert!(audit.weights_nonnegative(), "{audit:?}");
        }
    }
}
