//! Dense decompositions used by the calibration pipeline: one-sided Jacobi
//! SVD and cyclic Jacobi eigendecomposition of symmetric matrices.
//!
//! Both are accurate to working precision on exactly rank-deficient input,
//! which is the normal case for noiseless readings.

use nalgebra::{DMatrix, DVector};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `a = u * diag(singular_values) * vᵀ` with `k = min(rows, cols)`
/// components sorted descending. `u` and `v` have orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn recompose(&self) -> DMatrix<f64> {
        &self.u * DMatrix::from_diagonal(&self.singular_values) * self.v.transpose()
    }
}

pub fn svd(a: &DMatrix<f64>) -> Svd {
    if a.nrows() >= a.ncols() {
        let (u, s, v) = one_sided_jacobi(a.clone());
        Svd { u, singular_values: s, v }
    } else {
        let (v, s, u) = one_sided_jacobi(a.transpose());
        Svd { u, singular_values: s, v }
    }
}

/// Orthogonalizes the columns of a tall matrix by plane rotations.
/// Returns `(u, s, v)` with `work = u diag(s) vᵀ`.
fn one_sided_jacobi(mut work: DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let (rows, cols) = work.shape();
    let mut v = DMatrix::<f64>::identity(cols, cols);
    let tol = f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = work.column(p).norm_squared();
                let beta = work.column(q).norm_squared();
                let gamma = work.column(p).dot(&work.column(q));
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut work, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..cols).map(|k| work.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));

    let mut u = DMatrix::zeros(rows, cols);
    let mut v_sorted = DMatrix::zeros(cols, cols);
    let mut s = DVector::zeros(cols);
    let scale = norms.iter().copied().fold(0.0, f64::max);
    let mut missing = Vec::new();
    for (out, &k) in order.iter().enumerate() {
        s[out] = norms[k];
        v_sorted.set_column(out, &v.column(k));
        if norms[k] > scale * f64::EPSILON * rows as f64 && norms[k] > 0.0 {
            u.set_column(out, &(work.column(k) / norms[k]));
        } else {
            missing.push(out);
        }
    }
    complete_orthonormal(&mut u, &missing);
    (u, s, v_sorted)
}

fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let x = m[(i, p)];
        let y = m[(i, q)];
        m[(i, p)] = c * x - s * y;
        m[(i, q)] = s * x + c * y;
    }
}

/// Fills the listed (zero) columns of `u` with unit vectors orthogonal to
/// every other column, by Gram-Schmidt over the standard basis.
fn complete_orthonormal(u: &mut DMatrix<f64>, missing: &[usize]) {
    let rows = u.nrows();
    let mut candidate = 0;
    for &col in missing {
        while candidate < rows {
            let mut x = DVector::zeros(rows);
            x[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for k in 0..u.ncols() {
                    if k == col {
                        continue;
                    }
                    let proj = u.column(k).dot(&x);
                    x -= u.column(k) * proj;
                }
            }
            let norm = x.norm();
            if norm > 1e-8 {
                u.set_column(col, &(x / norm));
                break;
            }
        }
    }
}

/// Eigendecomposition of a symmetric matrix, `g = vectors * diag(values) *
/// vectorsᵀ`, eigenvalues descending, eigenvectors in columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn symmetric_eigen(g: &DMatrix<f64>) -> SymmetricEigen {
    let n = g.nrows();
    let mut a = g.clone();
    let mut vectors = DMatrix::<f64>::identity(n, n);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum();
        if off == 0.0 || off <= f64::EPSILON * f64::EPSILON * diag {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // a ← Jᵀ a J with J the (p, q) rotation.
                rotate_columns(&mut a, p, q, c, s);
                for j in 0..n {
                    let x = a[(p, j)];
                    let y = a[(q, j)];
                    a[(p, j)] = c * x - s * y;
                    a[(q, j)] = s * x + c * y;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                rotate_columns(&mut vectors, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].total_cmp(&a[(x, x)]).then(x.cmp(&y)));
    SymmetricEigen {
        values: DVector::from_iterator(n, order.iter().map(|&k| a[(k, k)])),
        vectors: DMatrix::from_columns(&order.iter().map(|&k| vectors.column(k)).collect::<Vec<_>>()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |i, j| ((i * 31 + j * 17 + 3) % 23) as f64 / 7.0 - 1.5)
    }

    fn check_svd(a: &DMatrix<f64>) {
        let d = svd(a);
        let k = a.nrows().min(a.ncols());
        assert_eq!(d.singular_values.len(), k);
        assert_relative_eq!(d.recompose(), a.clone(), epsilon = 1e-12 * a.norm().max(1.0));
        assert_relative_eq!(d.u.transpose() * &d.u, DMatrix::identity(k, k), epsilon = 1e-12);
        assert_relative_eq!(d.v.transpose() * &d.v, DMatrix::identity(k, k), epsilon = 1e-12);
        for w in d.singular_values.as_slice().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn svd_tall_wide_and_square() {
        check_svd(&sample(9, 4));
        check_svd(&sample(4, 9));
        check_svd(&sample(6, 6));
    }

    #[test]
    fn svd_exact_low_rank() {
        let left = sample(12, 3);
        let right = sample(3, 20);
        let a = &left * &right;
        check_svd(&a);
        let d = svd(&a);
        assert!(d.singular_values.iter().skip(3).all(|&s| s < 1e-13 * d.singular_values[0]));
    }

    #[test]
    fn svd_of_zero_matrix() {
        let d = svd(&DMatrix::zeros(3, 5));
        assert!(d.singular_values.iter().all(|&s| s == 0.0));
        assert_relative_eq!(d.u.transpose() * &d.u, DMatrix::identity(3, 3), epsilon = 1e-14);
    }

    #[test]
    fn eigen_reconstructs() {
        let b = sample(4, 4);
        let g = &b + b.transpose();
        let e = symmetric_eigen(&g);
        let recon = &e.vectors * DMatrix::from_diagonal(&e.values) * e.vectors.transpose();
        assert_relative_eq!(recon, g, epsilon = 1e-12);
        assert_relative_eq!(e.vectors.transpose() * &e.vectors, DMatrix::identity(4, 4), epsilon = 1e-12);
        for w in e.values.as_slice().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn eigen_of_diagonal() {
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0, -2.0]));
        let e = symmetric_eigen(&g);
        assert_eq!(e.values.as_slice(), &[4.0, 1.0, -2.0]);
    }
}
