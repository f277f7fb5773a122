mod common;

use approx::assert_relative_eq;
use common::{gaussian_matrix, random_orthogonal};
use nalgebra::{DMatrix, DVector};
use pcacal_core::alignment::recovered_gauge;
use pcacal_core::gram::{build_gram_system, solve_gram, DEFAULT_RANK_TOL};
use pcacal_core::simulation::{a_model, perturb_axes, random_positions, trial_rng};
use pcacal_core::{
    calibrate, calibration_error, canonical_triangular, CalibrationOptions, CalibrationProblem,
    ReadingsMatrix,
};
use proptest::prelude::*;

fn problem(readings: DMatrix<f64>, dim: usize, c: f64) -> CalibrationProblem {
    CalibrationProblem::new(ReadingsMatrix::new(readings).unwrap(), dim, c).unwrap()
}

fn noiseless_gyro(seed: u64, n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut rng = trial_rng(seed, 0);
    let a = perturb_axes(&a_model(), 0.01, &mut rng);
    let v = random_positions(n, 1.0, 3, &mut rng).unwrap();
    (a, v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fit_residual_equals_discarded_energy(seed in any::<u64>(), m in 4usize..10, extra in 3usize..20, dim in 1usize..=3) {
        let n = m + extra;
        let mut rng = trial_rng(seed, 1);
        // Rank-dim signal plus a small full-rank perturbation keeps the Gram
        // system well posed.
        let signal = gaussian_matrix(m, dim, &mut rng) * gaussian_matrix(dim, n, &mut rng);
        let readings = signal + gaussian_matrix(m, n, &mut rng) * 1e-3;
        let c = readings.column(0).norm();
        let opts = CalibrationOptions { clamp_gram: Some(1e-12), ..Default::default() };
        let res = calibrate(&problem(readings, dim, c), &opts).unwrap();
        prop_assert!((res.fit_residual - res.discarded_energy).abs() <= 1e-10 * res.discarded_energy);
        let best = res.factors.approximation();
        prop_assert!((res.reconstruction() - &best).norm() <= 1e-10 * best.norm());
    }

    #[test]
    fn noiseless_readings_are_reproduced(seed in any::<u64>(), n in 7usize..60) {
        let (a, v) = noiseless_gyro(seed, n);
        let readings = a.tr_mul(&v);
        let res = calibrate(&problem(readings.clone(), 3, 1.0), &CalibrationOptions::default()).unwrap();
        prop_assert!((res.reconstruction() - &readings).norm() <= 1e-9 * readings.norm());
        for col in res.v_hat.column_iter() {
            prop_assert!((col.norm() - 1.0).abs() < 1e-8);
        }
        prop_assert!(calibration_error(&a, &res.a_hat).unwrap() < 1e-9);
    }

    #[test]
    fn gauge_transform_of_truth_is_invisible(seed in any::<u64>()) {
        let (a, v) = noiseless_gyro(seed, 20);
        let mut rng = trial_rng(seed, 2);
        let r = random_orthogonal(3, &mut rng);
        let noise = gaussian_matrix(12, 20, &mut rng) * 1e-3;
        let base = calibrate(&problem(a.tr_mul(&v) + &noise, 3, 1.0), &CalibrationOptions::default()).unwrap();
        let (ra, rv) = (&r * &a, &r * &v);
        let turned = calibrate(&problem(ra.tr_mul(&rv) + &noise, 3, 1.0), &CalibrationOptions::default()).unwrap();
        prop_assert!((base.reconstruction() - turned.reconstruction()).norm() < 1e-10);
        let e1 = calibration_error(&a, &base.a_hat).unwrap();
        let e2 = calibration_error(&ra, &turned.a_hat).unwrap();
        prop_assert!((e1 - e2).abs() < 1e-10);
    }

    #[test]
    fn magnitude_homogeneity(seed in any::<u64>(), alpha in 0.1f64..10.0) {
        let (a, v) = noiseless_gyro(seed, 15);
        let mut rng = trial_rng(seed, 3);
        let readings = a.tr_mul(&v) + gaussian_matrix(12, 15, &mut rng) * 1e-3;
        let base = calibrate(&problem(readings.clone(), 3, 1.0), &CalibrationOptions::default()).unwrap();
        let scaled = calibrate(&problem(readings, 3, alpha), &CalibrationOptions::default()).unwrap();
        let a1 = canonical_triangular(&base.a_hat).unwrap().triangular;
        let a2 = canonical_triangular(&scaled.a_hat).unwrap().triangular;
        prop_assert!((a2 * alpha - &a1).norm() <= 1e-9 * a1.norm());
        let v1 = base.v_hat.norm();
        prop_assert!((scaled.v_hat.norm() - alpha * v1).abs() <= 1e-9 * alpha * v1);
    }

    #[test]
    fn gram_least_squares_is_optimal(seed in any::<u64>(), n in 6usize..30) {
        let mut rng = trial_rng(seed, 4);
        let b = gaussian_matrix(3, n, &mut rng);
        let (design, mut rhs) = build_gram_system(&b, 1.0);
        // Inconsistent right-hand side.
        rhs += DVector::from_iterator(n, gaussian_matrix(n, 1, &mut rng).iter().map(|x| 0.1 * x));
        let est = solve_gram(&design, &rhs, DEFAULT_RANK_TOL).unwrap();
        let params = DVector::from_vec(vec![
            est.g[(0, 0)], est.g[(0, 1)], est.g[(0, 2)], est.g[(1, 1)], est.g[(1, 2)], est.g[(2, 2)],
        ]);
        let rms = |x: &DVector<f64>| ((&rhs - &design * x).norm_squared() / n as f64).sqrt();
        prop_assert!((rms(&params) - est.residual).abs() < 1e-12);
        for _ in 0..100 {
            let delta = gaussian_matrix(6, 1, &mut rng).column(0) * 1e-3;
            prop_assert!(est.residual <= rms(&(&params + delta)) + 1e-15);
        }
    }

    #[test]
    fn alignment_is_left_orthogonal_invariant(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 5);
        let a = gaussian_matrix(3, 8, &mut rng);
        let b = &a + gaussian_matrix(3, 8, &mut rng) * 0.05;
        let r1 = random_orthogonal(3, &mut rng);
        let r2 = random_orthogonal(3, &mut rng);
        let e = calibration_error(&a, &b).unwrap();
        let e_rot = calibration_error(&(&r1 * &a), &(&r2 * &b)).unwrap();
        prop_assert!((e - e_rot).abs() < 1e-9);
        prop_assert!((e - calibration_error(&b, &a).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn canonical_form_is_a_fixed_point(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 6);
        let a = gaussian_matrix(3, 6, &mut rng);
        let once = canonical_triangular(&a).unwrap();
        let twice = canonical_triangular(&once.triangular).unwrap();
        prop_assert!((twice.triangular - &once.triangular).norm() < 1e-12 * a.norm());
        prop_assert!((once.rotation.transpose() * &once.rotation - DMatrix::identity(3, 3)).norm() < 1e-12);
        for k in 0..3 {
            prop_assert!(once.triangular[(k, k)] > 0.0);
        }
    }
}

#[test]
fn small_error_means_aligned_matrices() {
    let (a, v) = noiseless_gyro(99, 25);
    let mut rng = trial_rng(99, 7);
    let r = random_orthogonal(3, &mut rng);
    let readings = (&r * &a).tr_mul(&(&r * &v));
    let res = calibrate(&problem(readings, 3, 1.0), &CalibrationOptions::default()).unwrap();
    let eps = calibration_error(&a, &res.a_hat).unwrap();
    assert!(eps < 1e-9);
    let gauge = recovered_gauge(&a, &res.a_hat).unwrap();
    assert!((&res.a_hat - &gauge * &a).norm() < 1e-8);
}

#[test]
fn calibration_is_deterministic() {
    let (a, v) = noiseless_gyro(5, 30);
    let mut rng = trial_rng(5, 8);
    let readings = a.tr_mul(&v) + gaussian_matrix(12, 30, &mut rng) * 1e-2;
    let p = problem(readings, 3, 1.0);
    let x = calibrate(&p, &CalibrationOptions::default()).unwrap();
    let y = calibrate(&p, &CalibrationOptions::default()).unwrap();
    assert_eq!(x.a_hat, y.a_hat);
    assert_eq!(x.v_hat, y.v_hat);
    assert_eq!(x.gram, y.gram);
    assert_eq!(x.factors, y.factors);
}

#[test]
fn exact_rank_three_input_has_no_discarded_energy() {
    let (_, v) = noiseless_gyro(3, 20);
    let readings = a_model().tr_mul(&v);
    let f = pcacal_core::truncated_svd(&ReadingsMatrix::new(readings.clone()).unwrap(), 3).unwrap();
    assert!(f.discarded_energy() < 1e-13);
    assert_relative_eq!(f.approximation(), readings, epsilon = 1e-10);
}

#[test]
fn recovery_against_true_axes_for_model_array() {
    let (a, v) = noiseless_gyro(17, 20);
    let res = calibrate(&problem(a.tr_mul(&v), 3, 1.0), &CalibrationOptions::default()).unwrap();
    assert!(calibration_error(&a, &res.a_hat).unwrap() < 1e-9);
    // Sensor gains are column norms and do not depend on the gauge.
    for (est, truth) in res.a_hat.column_iter().zip(a.column_iter()) {
        assert_relative_eq!(est.norm(), truth.norm(), epsilon = 1e-9);
    }
}
