#![allow(dead_code)]

use nalgebra::DMatrix;
use pcacal_core::simulation::TrialRng;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut TrialRng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Haar-ish random orthogonal matrix: Q factor of a Gaussian matrix with
/// the signs of R's diagonal folded in. Determinant may be ±1.
pub fn random_orthogonal(dim: usize, rng: &mut TrialRng) -> DMatrix<f64> {
    let qr = gaussian_matrix(dim, dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}
