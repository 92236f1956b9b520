use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

use super::matrix::DenseMatrix;

/// Eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues are sorted non-increasing; `vectors` holds the matching
/// eigenvectors as columns, each unit-normalized with the entry of largest
/// magnitude made positive so output is reproducible.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: DenseMatrix<T>,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// O(n^3) per sweep with typically < 15 sweeps; entirely adequate for the
/// matrix sizes this crate works with, and free of LAPACK dependencies so
/// it stays generic over the scalar type.
pub fn symmetric_eigen<T: Scalar>(matrix: &DenseMatrix<T>) -> Result<SymmetricEigen<T>> {
    assert!(matrix.is_square());
    if !matrix.is_finite() {
        return Err(Error::Numerical(
            "non-finite entries passed to the eigensolver".into(),
        ));
    }
    let n = matrix.rows();
    let mut a = matrix.clone();
    let mut v = DenseMatrix::<T>::identity(n);

    if n > 1 {
        let eps = cast::<T>(1e-14);
        let scale = a.frobenius_norm().max(T::one());
        for _sweep in 0..MAX_SWEEPS {
            let mut off = T::zero();
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            if off.sqrt() <= eps * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let app = a[(p, p)];
                    let aqq = a[(q, q)];
                    // Rotation angle via the stable tau formulation.
                    let tau = (aqq - app) / (cast::<T>(2.0) * apq);
                    let t = if tau >= T::zero() {
                        T::one() / (tau + (T::one() + tau * tau).sqrt())
                    } else {
                        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));

    let mut values = Vec::with_capacity(n);
    let mut vectors = DenseMatrix::zeros(n, n);
    for (out_col, &src_col) in order.iter().enumerate() {
        values.push(diag[src_col]);
        let mut col: Vec<T> = (0..n).map(|k| v[(k, src_col)]).collect();
        normalize_column(&mut col);
        for k in 0..n {
            vectors[(k, out_col)] = col[k];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Unit-normalizes and fixes the sign so the largest-magnitude entry is
/// positive (first such entry wins on exact ties).
pub fn normalize_column<T: Scalar>(col: &mut [T]) {
    let norm = col
        .iter()
        .map(|&x| x * x)
        .fold(T::zero(), |acc, x| acc + x)
        .sqrt();
    if norm > T::zero() {
        for x in col.iter_mut() {
            *x /= norm;
        }
    }
    let mut lead = T::zero();
    let mut lead_val = T::zero();
    for &x in col.iter() {
        if x.abs() > lead {
            lead = x.abs();
            lead_val = x;
        }
    }
    if lead_val < T::zero() {
        for x in col.iter_mut() {
            *x = -*x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_matrix_is_its_own_spectrum() {
        let mut m = DenseMatrix::<f64>::zeros(3, 3);
        m[(0, 0)] = 2.0;
        m[(1, 1)] = -1.0;
        m[(2, 2)] = 5.0;
        let eig = symmetric_eigen(&m).unwrap();
        assert_eq!(eig.values, vec![5.0, 2.0, -1.0]);
    }

    #[test]
    fn two_by_two_known_eigenvalues() {
        // [[-1, 1], [1, -1]] has eigenvalues 0 and -2.
        let m = DenseMatrix::from_rows(&[vec![-1.0, 1.0], vec![1.0, -1.0]]);
        let eig = symmetric_eigen(&m).unwrap();
        assert_relative_eq!(eig.values[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(eig.values[1], -2.0, epsilon = 1e-14);
    }

    #[test]
    fn reconstructs_the_input() {
        let m = DenseMatrix::from_rows(&[
            vec![4.0, 1.0, -2.0],
            vec![1.0, 2.0, 0.0],
            vec![-2.0, 0.0, 3.0],
        ]);
        let eig = symmetric_eigen(&m).unwrap();
        // Q diag(w) Q^T == M
        let n = 3;
        let mut recon = DenseMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += eig.vectors[(i, k)] * eig.values[k] * eig.vectors[(j, k)];
                }
                recon[(i, j)] = s;
            }
        }
        assert!(m.frobenius_distance(&recon) < 1e-12);
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let m = DenseMatrix::from_rows(&[
            vec![1.0, 0.5, 0.2, 0.0],
            vec![0.5, 2.0, 0.3, 0.1],
            vec![0.2, 0.3, 3.0, 0.4],
            vec![0.0, 0.1, 0.4, 4.0],
        ]);
        let eig = symmetric_eigen(&m).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let dot: f64 = (0..4).map(|k| eig.vectors[(k, a)] * eig.vectors[(k, b)]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert_relative_eq!(dot, expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn residuals_are_small_at_f32() {
        let m = DenseMatrix::from_rows(&[
            vec![1.0f32, 0.5, 0.2],
            vec![0.5, 2.0, 0.3],
            vec![0.2, 0.3, 3.0],
        ]);
        let eig = symmetric_eigen(&m).unwrap();
        for k in 0..3 {
            let col: Vec<f32> = (0..3).map(|i| eig.vectors[(i, k)]).collect();
            let mv = m.mul_vec(&col);
            for i in 0..3 {
                assert!((mv[i] - eig.values[k] * col[i]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = DenseMatrix::<f64>::identity(2);
        m[(0, 1)] = f64::NAN;
        assert!(symmetric_eigen(&m).is_err());
    }
}
