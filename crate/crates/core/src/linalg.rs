//! Dense eigen-decompositions and matrix functions.
//!
//! Thin wrappers over `nalgebra`'s symmetric/Hermitian eigensolver that fix
//! ordering and eigenvector gauge so results are deterministic.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Real symmetric eigen-decomposition, ascending.
///
/// Each eigenvector is signed so that its dominant amplitude is positive.
pub fn eigh(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = h.nrows();
    let eig = h.clone().symmetric_eigen();
    let dominant: Vec<usize> = (0..n).map(|k| eig.eigenvectors.column(k).iamax()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let sign = if col[dominant[src]] < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(dst, &(col * sign));
    }
    (values, vectors)
}

/// Hermitian eigen-decomposition (unsorted eigenvectors are fine for matrix
/// functions, but we sort anyway for reproducible diagnostics).
pub fn eigh_complex(m: &DMatrix<Complex64>) -> (DVector<f64>, DMatrix<Complex64>) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// f(A) for real symmetric A via its eigenbasis.
pub fn symmetric_function(a: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = a.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= f(eig.eigenvalues[k]);
    }
    &scaled * v.transpose()
}

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues slightly below zero (round-off) are clamped.
pub fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (vals, vecs) = eigh_complex(m);
    let mut scaled = vecs.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= Complex64::new(vals[k].max(0.0).sqrt(), 0.0);
    }
    &scaled * vecs.adjoint()
}

/// Largest |A - A†| entry relative to the largest |A| entry.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_pairs_are_ordered_by_dominant_index() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 0.0, 4.0, 1.0]));
        let (vals, vecs) = eigh(&h);
        assert_eq!(vals, vec![0.0, 1.0, 4.0, 4.0]);
        assert_eq!(vecs.column(2).iamax(), 0);
        assert_eq!(vecs.column(3).iamax(), 2);
    }

    #[test]
    fn gauge_makes_dominant_amplitude_positive() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, -0.3, -0.3, 2.0]);
        let (_, vecs) = eigh(&h);
        for col in vecs.column_iter() {
            assert!(col[col.iamax()] > 0.0);
        }
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.7, 0.0), Complex64::new(0.1, -0.2), Complex64::new(0.1, 0.2), Complex64::new(0.3, 0.0)],
        );
        let s = psd_sqrt(&a);
        assert!((&s * &s - &a).norm() < 1e-13);
    }

    #[test]
    fn cosine_of_zero_matrix_is_identity() {
        let z = DMatrix::<f64>::zeros(3, 3);
        let c = symmetric_function(&z, f64::cos);
        assert!((c - DMatrix::identity(3, 3)).norm() < 1e-15);
    }
}
