//! Dense linear algebra kernels generic over the scalar type: matrix
//! storage, LU solves, a symmetric Jacobi eigensolver, and the matrix
//! exponential used by both random-walk layers.

mod eigen;
mod expm;
mod lu;
mod matrix;

pub use eigen::{normalize_column, symmetric_eigen, SymmetricEigen};
pub use expm::expm;
pub use lu::lu_solve;
pub use matrix::DenseMatrix;
