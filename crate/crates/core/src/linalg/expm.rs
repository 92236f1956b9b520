use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

use super::lu::lu_solve;
use super::matrix::DenseMatrix;

// Degree-13 Pade coefficients for exp; Higham's scaling-and-squaring
// threshold for the [13/13] approximant.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

/// Matrix exponential by scaling and squaring with a [13/13] Pade
/// approximant.
pub fn expm<T: Scalar>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    assert!(a.is_square());
    if !a.is_finite() {
        return Err(Error::Numerical("non-finite entries in expm input".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }

    let norm = a.norm_one();
    let theta = cast::<T>(THETA13);
    let squarings = if norm <= theta {
        0u32
    } else {
        let ratio = (norm / theta).to_f64().unwrap_or(f64::INFINITY);
        if !ratio.is_finite() {
            return Err(Error::Numerical("matrix norm overflow in expm".into()));
        }
        ratio.log2().ceil() as u32
    };
    let scale = cast::<T>((0.5f64).powi(squarings as i32));
    let a_scaled = a.scale(scale);

    let b: Vec<T> = PADE13.iter().map(|&c| cast::<T>(c)).collect();
    let identity = DenseMatrix::<T>::identity(n);
    let a2 = a_scaled.matmul(&a_scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    // U = A * (A6*(b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let mut inner_u = a6.scale(b[13]);
    inner_u.add_assign(&a4.scale(b[11]));
    inner_u.add_assign(&a2.scale(b[9]));
    let mut u = a6.matmul(&inner_u);
    u.add_assign(&a6.scale(b[7]));
    u.add_assign(&a4.scale(b[5]));
    u.add_assign(&a2.scale(b[3]));
    u.add_assign(&identity.scale(b[1]));
    let u = a_scaled.matmul(&u);

    // V = A6*(b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let mut inner_v = a6.scale(b[12]);
    inner_v.add_assign(&a4.scale(b[10]));
    inner_v.add_assign(&a2.scale(b[8]));
    let mut v = a6.matmul(&inner_v);
    v.add_assign(&a6.scale(b[6]));
    v.add_assign(&a4.scale(b[4]));
    v.add_assign(&a2.scale(b[2]));
    v.add_assign(&identity.scale(b[0]));

    let mut result = lu_solve(&v.sub(&u), &v.add(&u))?;
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    if !result.is_finite() {
        return Err(Error::Numerical("non-finite entries in expm result".into()));
    }
    Ok(result)
}
