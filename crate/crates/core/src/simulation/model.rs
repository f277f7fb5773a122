use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::types::ReadingsMatrix;

/// Redraw budget for a Gaussian direction that lands too close to zero.
pub const MAX_REDRAWS: usize = 100;

/// Four gyroscope triads, one sensitivity vector per column (3 x 12).
pub fn a_model() -> DMatrix<f64> {
    #[rustfmt::skip]
    let rows = [
        1.0, 0.0, 0.0,  0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0,  0.0,
        0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 1.0,  0.0, 0.0, 0.0, 0.0, -1.0,
        0.0, 0.0, 1.0,  0.0, 0.0, 1.0, 0.0,  0.0, 1.0, 0.0, 1.0,  0.0,
    ];
    DMatrix::from_row_slice(3, 12, &rows)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Adds independent `N(0, axis_sigma²)` noise to every entry of `template`.
pub fn perturb_axes<R: Rng + ?Sized>(template: &DMatrix<f64>, axis_sigma: f64, rng: &mut R) -> DMatrix<f64> {
    let mut out = template.clone();
    for v in out.iter_mut() {
        *v += axis_sigma * gaussian(rng);
    }
    out
}

/// `n` vectors uniformly distributed on the radius-`magnitude` sphere in
/// `R^dim`, one per column.
pub fn random_positions<R: Rng + ?Sized>(
    n: usize,
    magnitude: f64,
    dim: usize,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(dim, n);
    for j in 0..n {
        let mut attempts = 0;
        let direction = loop {
            let draw = DVector::from_fn(dim, |_, _| gaussian(rng));
            let norm = draw.norm();
            if norm >= 1e-12 {
                break draw / norm;
            }
            attempts += 1;
            if attempts >= MAX_REDRAWS {
                return Err(Error::DegenerateDraw { attempts });
            }
        };
        out.set_column(j, &(direction * magnitude));
    }
    Ok(out)
}

fn noise_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, sigma: f64, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| sigma * gaussian(rng))
}

/// Ideal readings `aᵀ v` plus `N(0, noise_sigma²)` noise on every entry.
pub fn simulate_readings<R: Rng + ?Sized>(
    a: &DMatrix<f64>,
    v: &DMatrix<f64>,
    noise_sigma: f64,
    rng: &mut R,
) -> Result<ReadingsMatrix> {
    let ideal = a.tr_mul(v);
    let noise = noise_matrix(ideal.nrows(), ideal.ncols(), noise_sigma, rng);
    ReadingsMatrix::new(ideal + noise)
}

/// Per-sensor constant biases, uniform on `[-range, range]`.
pub fn draw_biases<R: Rng + ?Sized>(sensors: usize, range: f64, rng: &mut R) -> DVector<f64> {
    if range <= 0.0 {
        return DVector::zeros(sensors);
    }
    let dist = Uniform::new_inclusive(-range, range).expect("finite positive range");
    DVector::from_fn(sensors, |_, _| dist.sample(rng))
}

/// Two-phase measurement at every position: a rotating reading
/// `aᵀv + bias + η_rot` and a stationary reading `bias + η_static`, with the
/// stationary one subtracted from the rotating one.
///
/// Rotating-phase noise is drawn first, in the same order as
/// [`simulate_readings`], then the stationary-phase noise. The two bias
/// terms are subtracted from each other before being added to the signal,
/// so the bias cancels exactly in floating point.
pub fn simulate_bias_protocol<R: Rng + ?Sized>(
    a: &DMatrix<f64>,
    v: &DMatrix<f64>,
    biases: &DVector<f64>,
    noise_sigma: f64,
    static_noise_sigma: f64,
    rng: &mut R,
) -> Result<ReadingsMatrix> {
    let ideal = a.tr_mul(v);
    if biases.len() != ideal.nrows() {
        return Err(Error::ShapeMismatch {
            left: (biases.len(), 1),
            right: ideal.shape(),
        });
    }
    let rot_noise = noise_matrix(ideal.nrows(), ideal.ncols(), noise_sigma, rng);
    let static_noise = noise_matrix(ideal.nrows(), ideal.ncols(), static_noise_sigma, rng);

    let out = DMatrix::from_fn(ideal.nrows(), ideal.ncols(), |i, j| {
        let rotating_bias = biases[i];
        let static_bias = biases[i];
        (ideal[(i, j)] + rot_noise[(i, j)]) - static_noise[(i, j)] + (rotating_bias - static_bias)
    });
    ReadingsMatrix::new(out)
}
