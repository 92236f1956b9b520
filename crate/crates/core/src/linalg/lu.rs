use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::matrix::DenseMatrix;

/// Solves `A X = B` by LU factorization with partial pivoting.
///
/// `B` may hold multiple right-hand sides as columns. Fails on singular
/// (or numerically singular) `A`.
pub fn lu_solve<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    assert!(a.is_square());
    assert_eq!(a.rows(), b.rows());
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_val = lu[(k, k)].abs();
        for i in (k + 1)..n {
            let v = lu[(i, k)].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = i;
            }
        }
        if pivot_val == T::zero() || !pivot_val.is_finite() {
            return Err(Error::Numerical(format!(
                "singular matrix in LU solve at column {k}"
            )));
        }
        if pivot_row != k {
            perm.swap(k, pivot_row);
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
        }
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / lu[(k, k)];
            lu[(i, k)] = factor;
            if factor == T::zero() {
                continue;
            }
            for j in (k + 1)..n {
                let adj = factor * lu[(k, j)];
                lu[(i, j)] -= adj;
            }
        }
    }

    // Apply the row permutation to B, then forward/back substitute.
    let nrhs = b.cols();
    let mut x = DenseMatrix::zeros(n, nrhs);
    for i in 0..n {
        let src = perm[i];
        for j in 0..nrhs {
            x[(i, j)] = b[(src, j)];
        }
    }
    for k in 0..n {
        for i in (k + 1)..n {
            let factor = lu[(i, k)];
            if factor == T::zero() {
                continue;
            }
            for j in 0..nrhs {
                let adj = factor * x[(k, j)];
                x[(i, j)] -= adj;
            }
        }
    }
    for k in (0..n).rev() {
        // True division keeps exact cases (e.g. diagonal systems) exact.
        for j in 0..nrhs {
            x[(k, j)] /= lu[(k, k)];
        }
        for i in 0..k {
            let factor = lu[(i, k)];
            if factor == T::zero() {
                continue;
            }
            for j in 0..nrhs {
                let adj = factor * x[(k, j)];
                x[(i, j)] -= adj;
            }
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_small_system() {
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let b = DenseMatrix::from_rows(&[vec![5.0], vec![10.0]]);
        let x = lu_solve(&a, &b).unwrap();
        assert_relative_eq!(x[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(x[(1, 0)], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn recovers_inverse_action() {
        let a = DenseMatrix::from_rows(&[
            vec![4.0, -2.0, 1.0],
            vec![3.0, 6.0, -4.0],
            vec![2.0, 1.0, 8.0],
        ]);
        let x = lu_solve(&a, &DenseMatrix::identity(3)).unwrap();
        let prod = a.matmul(&x);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(prod[(i, j)], expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rejects_singular() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        let b = DenseMatrix::identity(2);
        assert!(lu_solve(&a, &b).is_err());
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let b = DenseMatrix::from_rows(&[vec![2.0], vec![3.0]]);
        let x = lu_solve(&a, &b).unwrap();
        assert_relative_eq!(x[(0, 0)], 3.0, epsilon = 1e-14);
        assert_relative_eq!(x[(1, 0)], 2.0, epsilon = 1e-14);
    }
}
