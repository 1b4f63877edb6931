use btp_core::minor::determinant;
use btp_core::pbf::{darboux, pbf_compose, random_pbf_with, FactorShape, ValueBounds};
use btp_core::recpoly::{random_tp_initial, InitialConditions};
use btp_core::scalar::{frac, int, pow10_rational};
use btp_core::spectral::{
    char_poly, discrete_biorthogonality, eigenvalues_hp, hypothesis_initial_conditions, positivity_audit,
    LambdaReading,
};
use btp_core::{BandedMatrix, Matrix, Rational};
use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn btp_instance(rng: &mut ChaCha8Rng, n: usize, p: usize, q: usize) -> btp_core::pbf::PBFactorization {
    random_pbf_with(rng, n, p, q, &ValueBounds::default(), FactorShape::Full).unwrap()
}

fn to_f64(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.n_rows(), m.n_cols(), |i, j| m.get(i, j).to_f64().unwrap())
}

#[test]
fn btp_spectra_are_real_positive_and_simple() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..25 {
        let n = rng.gen_range(2..=12);
        let (p, q) = (rng.gen_range(1..n.min(4)), rng.gen_range(1..n.min(4)));
        let t = pbf_compose(&btp_instance(&mut rng, n, p, q));
        let report = eigenvalues_hp(&t, 256).unwrap();
        assert!(report.all_real() && report.all_positive() && report.separated(), "n={n} p={p} q={q}");
        let dense = t.to_dense();
        let tol = pow10_rational(-30);
        assert!((report.sum() - dense.trace()).abs() <= &tol * dense.trace());
        let det = determinant(&dense).unwrap();
        assert!((report.product() - &det).abs() <= &tol * &det);
    }
}

#[test]
fn eigenvalues_agree_with_floating_point_schur() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..15 {
        let n = rng.gen_range(3..=9);
        let (p, q) = (rng.gen_range(1..n.min(3)), rng.gen_range(1..n.min(3)));
        let t = pbf_compose(&btp_instance(&mut rng, n, p, q));
        let exact = eigenvalues_hp(&t, 128).unwrap();
        let mut float: Vec<f64> = to_f64(&t.to_dense()).complex_eigenvalues().iter().map(|z| z.re).collect();
        float.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (e, f) in exact.eigenvalues.iter().zip(&float) {
            let v = e.value.to_f64().unwrap();
            assert!((v - f).abs() <= 1e-6 * v.abs().max(1.0), "{v} vs {f}");
        }
    }
}

#[test]
fn darboux_images_are_isospectral() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..20 {
        let n = rng.gen_range(3..=10);
        let (p, q) = (rng.gen_range(1..n.min(4)), rng.gen_range(1..n.min(4)));
        let f = btp_instance(&mut rng, n, p, q);
        let chi = char_poly(&pbf_compose(&f)).unwrap();
        for k in (1..=p as i64).chain((1..=q as i64).map(|k| -k)) {
            assert_eq!(char_poly(&darboux(&f, k).unwrap()).unwrap(), chi);
        }
    }
}

#[test]
fn jacobi_weights_are_squared_first_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..10 {
        let n = rng.gen_range(2..=8);
        let mut t = BandedMatrix::zeros(n, 1, 1).unwrap();
        for i in 0..n {
            t.set(i, i, frac(rng.gen_range(4..12), rng.gen_range(1..3))).unwrap();
            if i + 1 < n {
                let b = frac(rng.gen_range(1..5), rng.gen_range(1..3));
                t.set(i, i + 1, b.clone()).unwrap();
                t.set(i + 1, i, b).unwrap();
            }
        }
        let report = eigenvalues_hp(&t, 256).unwrap();
        let bio = discrete_biorthogonality(&t, &InitialConditions::identity(1, 1), &report).unwrap();
        assert!(bio.max_residual() < pow10_rational(-20));

        let eig = SymmetricEigen::new(to_f64(&t.to_dense()));
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (k, (lambda, weight)) in pairs.into_iter().enumerate() {
            assert!((report.eigenvalues[k].value.to_f64().unwrap() - lambda).abs() < 1e-9);
            let mu = bio.weights.weight(k, 0, 0).to_f64().unwrap();
            assert!((mu - weight).abs() < 1e-9, "k={k}: {mu} vs {weight}");
        }
    }
}

#[test]
fn biorthogonality_residual_shrinks_with_precision() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for _ in 0..4 {
        let n = rng.gen_range(5..=8);
        let (p, q) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let t = pbf_compose(&btp_instance(&mut rng, n, p, q));
        let init = random_tp_initial(&mut rng, p, q, &ValueBounds::default()).unwrap();
        let lo = discrete_biorthogonality(&t, &init, &eigenvalues_hp(&t, 256).unwrap()).unwrap();
        let hi = discrete_biorthogonality(&t, &init, &eigenvalues_hp(&t, 512).unwrap()).unwrap();
        assert!(lo.max_residual() <= pow10_rational(-20));
        assert!(hi.max_residual() * pow10_rational(10) <= lo.max_residual());
    }
}

#[test]
fn leading_reading_weights_are_nonnegative_on_fixed_seeds() {
    let bounds = ValueBounds::default();
    for seed in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let (p, q) = [(2, 1), (1, 2), (2, 2)][seed as usize % 3];
        let f = btp_instance(&mut rng, 7, p, q);
        let t = pbf_compose(&f);
        let tp = random_tp_initial(&mut rng, p, q, &bounds).unwrap();
        let (script_a, script_b) = (tp.a0().inverse().unwrap(), tp.b0().inverse().unwrap());
        let init = hypothesis_initial_conditions(&f, LambdaReading::Leading, &script_a, &script_b).unwrap();
        let report = eigenvalues_hp(&t, 256).unwrap();
        let bio = discrete_biorthogonality(&t, &init, &report).unwrap();
        let audit = positivity_audit(&bio.weights, &init, &f, LambdaReading::Leading).unwrap();
        assert!(audit.hypothesis_holds);
        assert!(audit.weights_nonnegative(), "seed {seed}: {:?}", audit.violations);
    }
}

#[test]
fn identity_initial_data_breaks_weight_positivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let f = btp_instance(&mut rng, 7, 2, 2);
    let t = pbf_compose(&f);
    let init = InitialConditions::identity(2, 2);
    let report = eigenvalues_hp(&t, 256).unwrap();
    let bio = discrete_biorthogonality(&t, &init, &report).unwrap();
    let audit = positivity_audit(&bio.weights, &init, &f, LambdaReading::Leading).unwrap();
    assert!(!audit.hypothesis_holds);
    assert!(!audit.weights_nonnegative());
    // The relation itself does not depend on positivity.
    assert!(bio.max_residual() < pow10_rational(-20));
}

#[test]
fn spectrum_of_a_scaled_matrix_scales() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let t = pbf_compose(&btp_instance(&mut rng, 6, 2, 1));
    let dense = t.to_dense();
    let scaled = Matrix::from_fn(6, 6, |i, j| dense.get(i, j) * int(3));
    let scaled = BandedMatrix::from_dense(&scaled, 2, 1).unwrap();
    let a = eigenvalues_hp(&t, 200).unwrap();
    let b = eigenvalues_hp(&scaled, 200).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        let diff: Rational = (&x.value * int(3) - &y.value).abs();
        assert!(diff < pow10_rational(-50));
    }
}
