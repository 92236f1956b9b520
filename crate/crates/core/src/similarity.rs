//! Gaussian-kernel similarity between snapshot encodings and bandwidth
//! selection.
//!
//! An encoding is either the full transition matrix of a snapshot (the
//! default pipeline) or its invariant measure (the cheaper variant).
//! Pairwise distances are computed once and cached; the kernel matrix for
//! any bandwidth is then a cheap map over that cache, which is what the
//! bandwidth grid search exploits.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::{cast, Scalar};
use crate::spatial::{InvariantMeasure, TransitionMatrix};

/// Per-snapshot encoding compared by the kernel.
#[derive(Debug, Clone)]
pub enum SnapshotEncoding<T = f64> {
    TransitionMatrix { matrix: DenseMatrix<T>, index: usize },
    InvariantMeasure { mu: Vec<T>, index: usize },
}

impl<T: Scalar> SnapshotEncoding<T> {
    pub fn index(&self) -> usize {
        match self {
            SnapshotEncoding::TransitionMatrix { index, .. } => *index,
            SnapshotEncoding::InvariantMeasure { index, .. } => *index,
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            SnapshotEncoding::TransitionMatrix { .. } => "transition-matrix",
            SnapshotEncoding::InvariantMeasure { .. } => "invariant-measure",
        }
    }
}

impl<T: Scalar> From<TransitionMatrix<T>> for SnapshotEncoding<T> {
    fn from(p: TransitionMatrix<T>) -> Self {
        SnapshotEncoding::TransitionMatrix {
            matrix: p.matrix,
            index: p.snapshot_index,
        }
    }
}

impl<T: Scalar> From<InvariantMeasure<T>> for SnapshotEncoding<T> {
    fn from(m: InvariantMeasure<T>) -> Self {
        SnapshotEncoding::InvariantMeasure {
            mu: m.mu,
            index: m.snapshot_index,
        }
    }
}

/// Kernel matrix over all snapshot pairs, with a zeroed diagonal.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix<T = f64> {
    pub matrix: DenseMatrix<T>,
    pub sigma: T,
}

/// Frobenius (matrix) or Euclidean (vector) distance between two
/// encodings of the same kind and shape.
pub fn encoding_distance<T: Scalar>(
    a: &SnapshotEncoding<T>,
    b: &SnapshotEncoding<T>,
) -> Result<T> {
    match (a, b) {
        (
            SnapshotEncoding::TransitionMatrix { matrix: ma, .. },
            SnapshotEncoding::TransitionMatrix { matrix: mb, .. },
        ) => {
            if ma.rows() != mb.rows() || ma.cols() != mb.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "encodings are {}x{} and {}x{}",
                    ma.rows(),
                    ma.cols(),
                    mb.rows(),
                    mb.cols()
                )));
            }
            Ok(ma.frobenius_distance(mb))
        }
        (
            SnapshotEncoding::InvariantMeasure { mu: va, .. },
            SnapshotEncoding::InvariantMeasure { mu: vb, .. },
        ) => {
            if va.len() != vb.len() {
                return Err(Error::DimensionMismatch(format!(
                    "encodings have lengths {} and {}",
                    va.len(),
                    vb.len()
                )));
            }
            let sq = va
                .iter()
                .zip(vb)
                .map(|(&x, &y)| {
                    let d = x - y;
                    d * d
                })
                .fold(T::zero(), |acc, x| acc + x);
            Ok(sq.sqrt())
        }
        _ => Err(Error::EncodingMismatch(format!(
            "cannot compare {} with {}",
            a.kind_name(),
            b.kind_name()
        ))),
    }
}

/// Gaussian kernel `exp(-dist^2 / (2 sigma^2))`.
pub fn gaussian_kernel<T: Scalar>(
    a: &SnapshotEncoding<T>,
    b: &SnapshotEncoding<T>,
    sigma: T,
) -> Result<T> {
    let dist = encoding_distance(a, b)?;
    kernel_of_distance(dist, sigma)
}

fn kernel_of_distance<T: Scalar>(dist: T, sigma: T) -> Result<T> {
    if sigma <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "bandwidth must be positive, got {sigma}"
        )));
    }
    let two = cast::<T>(2.0);
    Ok((-(dist * dist) / (two * sigma * sigma)).exp())
}

/// All pairwise encoding distances, computed once per unordered pair
/// (in parallel) and mirrored.
pub fn pairwise_distances<T: Scalar>(
    encodings: &[SnapshotEncoding<T>],
) -> Result<DenseMatrix<T>> {
    let m = encodings.len();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
        .collect();
    let computed: Vec<Result<T>> = pairs
        .par_iter()
        .map(|&(i, j)| encoding_distance(&encodings[i], &encodings[j]))
        .collect();
    let mut distances = DenseMatrix::zeros(m, m);
    for (&(i, j), value) in pairs.iter().zip(computed) {
        let d = value?;
        distances[(i, j)] = d;
        distances[(j, i)] = d;
    }
    Ok(distances)
}

/// Kernel matrix from a cached distance matrix; diagonal forced to zero.
pub fn similarity_from_distances<T: Scalar>(
    distances: &DenseMatrix<T>,
    sigma: T,
) -> Result<SimilarityMatrix<T>> {
    let m = distances.rows();
    let mut matrix = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let k = kernel_of_distance(distances[(i, j)], sigma)?;
            matrix[(i, j)] = k;
            matrix[(j, i)] = k;
        }
    }
    Ok(SimilarityMatrix { matrix, sigma })
}

/// Builds the kernel matrix over all encodings.
pub fn build_similarity_matrix<T: Scalar>(
    encodings: &[SnapshotEncoding<T>],
    sigma: T,
) -> Result<SimilarityMatrix<T>> {
    if encodings.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "similarity needs at least 2 encodings, got {}",
            encodings.len()
        )));
    }
    let distances = pairwise_distances(encodings)?;
    similarity_from_distances(&distances, sigma)
}

/// Geometric grid of 32 candidate bandwidths spanning the 5th to 95th
/// percentile of the observed pairwise distances. Falls back to `[1]`
/// when every distance is zero (identical encodings), where all
/// bandwidths are equivalent anyway.
pub fn default_bandwidth_grid<T: Scalar>(distances: &DenseMatrix<T>) -> Vec<T> {
    let m = distances.rows();
    let mut values: Vec<T> = (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |j| distances[(i, j)]))
        .collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    if values.is_empty() || values[values.len() - 1] <= T::zero() {
        return vec![T::one()];
    }
    let lo = percentile(&values, 0.05).max(values[values.len() - 1] * cast::<T>(1e-6));
    let hi = percentile(&values, 0.95).max(lo);
    if lo == hi {
        return vec![lo];
    }
    let count = 32;
    let log_lo = lo.ln();
    let step = (hi.ln() - log_lo) / cast::<T>((count - 1) as f64);
    (0..count)
        .map(|i| (log_lo + step * cast::<T>(i as f64)).exp())
        .collect()
}

fn percentile<T: Scalar>(sorted: &[T], q: f64) -> T {
    let pos = q * (sorted.len() - 1) as f64;
    let lower = pos.floor() as usize;
    let upper = pos.ceil() as usize;
    let frac = cast::<T>(pos - lower as f64);
    sorted[lower] + (sorted[upper] - sorted[lower]) * frac
}

/// Output of a bandwidth grid search.
#[derive(Debug, Clone)]
pub struct BandwidthChoice<T = f64> {
    pub sigma: T,
    /// var/mean of the off-diagonal kernel entries at the chosen sigma.
    pub score: T,
}

/// Picks the grid bandwidth maximizing `var/mean` of the off-diagonal
/// kernel entries. Ties go to the smaller bandwidth. Errors if the kernel
/// underflows to all-zero for every candidate.
pub fn select_bandwidth<T: Scalar>(
    encodings: &[SnapshotEncoding<T>],
    grid: &[T],
) -> Result<BandwidthChoice<T>> {
    if grid.is_empty() || grid.iter().any(|&s| s <= T::zero()) {
        return Err(Error::InvalidParameter(
            "bandwidth grid must be non-empty and positive".into(),
        ));
    }
    let distances = pairwise_distances(encodings)?;
    select_bandwidth_from_distances(&distances, grid)
}

/// Grid search over a precomputed distance cache.
pub fn select_bandwidth_from_distances<T: Scalar>(
    distances: &DenseMatrix<T>,
    grid: &[T],
) -> Result<BandwidthChoice<T>> {
    let mut candidates: Vec<T> = grid.to_vec();
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite bandwidths"));

    let mut best: Option<BandwidthChoice<T>> = None;
    let mut any_mass = false;
    let mut zero_score_fallback: Option<T> = None;
    for &sigma in &candidates {
        let k = similarity_from_distances(distances, sigma)?;
        let m = k.matrix.rows();
        let mut values = Vec::with_capacity(m * (m - 1) / 2);
        for i in 0..m {
            for j in (i + 1)..m {
                values.push(k.matrix[(i, j)]);
            }
        }
        let n = cast::<T>(values.len() as f64);
        let mean = values.iter().copied().sum::<T>() / n;
        if mean <= T::zero() {
            continue; // kernel underflowed to zero everywhere
        }
        any_mass = true;
        let var = values
            .iter()
            .map(|&v| {
                let d = v - mean;
                d * d
            })
            .sum::<T>()
            / n;
        let score = var / mean;
        if score > T::zero() {
            if best.as_ref().is_none_or(|b| score > b.score) {
                best = Some(BandwidthChoice { sigma, score });
            }
        } else if zero_score_fallback.is_none() {
            zero_score_fallback = Some(sigma);
        }
    }
    if let Some(choice) = best {
        return Ok(choice);
    }
    if any_mass {
        // Flat kernel everywhere (identical encodings): smallest grid
        // value by the tie-break rule.
        return Ok(BandwidthChoice {
            sigma: zero_score_fallback.expect("tracked above"),
            score: T::zero(),
        });
    }
    Err(Error::Numerical(
        "every candidate bandwidth underflows the kernel to zero; the grid is far too small".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mat_encoding(index: usize, rows: &[Vec<f64>]) -> SnapshotEncoding<f64> {
        SnapshotEncoding::TransitionMatrix {
            matrix: DenseMatrix::from_rows(rows),
            index,
        }
    }

    fn vec_encoding(index: usize, mu: &[f64]) -> SnapshotEncoding<f64> {
        SnapshotEncoding::InvariantMeasure {
            mu: mu.to_vec(),
            index,
        }
    }

    #[test]
    fn identical_encodings_have_zero_distance() {
        let a = mat_encoding(0, &[vec![0.5, 0.5], vec![0.5, 0.5]]);
        let b = mat_encoding(1, &[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(encoding_distance(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn unit_shift_distance_is_two() {
        let a = mat_encoding(0, &[vec![0.0, 0.0], vec![0.0, 0.0]]);
        let b = mat_encoding(1, &[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(encoding_distance(&a, &b).unwrap(), 2.0);
    }

    #[test]
    fn vector_distance_is_euclidean() {
        let a = vec_encoding(0, &[1.0, 0.0]);
        let b = vec_encoding(1, &[0.0, 1.0]);
        assert_relative_eq!(encoding_distance(&a, &b).unwrap(), 2.0f64.sqrt());
    }

    #[test]
    fn mixed_kinds_are_rejected() {
        let a = mat_encoding(0, &[vec![1.0]]);
        let b = vec_encoding(1, &[1.0]);
        assert!(matches!(
            encoding_distance(&a, &b),
            Err(Error::EncodingMismatch(_))
        ));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = vec_encoding(0, &[1.0, 2.0]);
        let b = vec_encoding(1, &[1.0]);
        assert!(encoding_distance(&a, &b).is_err());
    }

    #[test]
    fn kernel_values() {
        let a = vec_encoding(0, &[0.0]);
        let unit = vec_encoding(1, &[1.0]);
        let two = vec_encoding(2, &[2.0]);
        assert_eq!(gaussian_kernel(&a, &a, 3.0).unwrap(), 1.0);
        assert_relative_eq!(
            gaussian_kernel(&a, &unit, 1.0).unwrap(),
            (-0.5f64).exp(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            gaussian_kernel(&a, &two, 1.0).unwrap(),
            (-2.0f64).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn kernel_rejects_nonpositive_bandwidth() {
        let a = vec_encoding(0, &[0.0]);
        assert!(gaussian_kernel(&a, &a, 0.0).is_err());
    }

    #[test]
    fn similarity_matrix_identical_pair() {
        let enc = vec![vec_encoding(0, &[1.0, 2.0]), vec_encoding(1, &[1.0, 2.0])];
        let k = build_similarity_matrix(&enc, 1.0).unwrap();
        assert_eq!(k.matrix.row(0), &[0.0, 1.0]);
        assert_eq!(k.matrix.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn similarity_matrix_far_group_limits() {
        let enc = vec![
            vec_encoding(0, &[0.0]),
            vec_encoding(1, &[0.0]),
            vec_encoding(2, &[1000.0]),
        ];
        let k = build_similarity_matrix(&enc, 1.0).unwrap();
        assert_eq!(k.matrix[(0, 1)], 1.0);
        assert!(k.matrix[(0, 2)] < 1e-300);
        assert!(k.matrix[(1, 2)] < 1e-300);
    }

    #[test]
    fn similarity_matrix_is_exactly_symmetric() {
        let enc: Vec<_> = (0..5)
            .map(|i| vec_encoding(i, &[i as f64 * 0.3, (i * i) as f64 * 0.1]))
            .collect();
        let k = build_similarity_matrix(&enc, 0.7).unwrap();
        for i in 0..5 {
            assert_eq!(k.matrix[(i, i)], 0.0);
            for j in 0..5 {
                assert_eq!(k.matrix[(i, j)], k.matrix[(j, i)]);
            }
        }
    }

    #[test]
    fn kernel_is_monotone_in_bandwidth() {
        let a = vec_encoding(0, &[0.0]);
        let b = vec_encoding(1, &[1.0]);
        let mut last = 0.0;
        for sigma in [0.2, 0.5, 1.0, 2.0, 5.0] {
            let k = gaussian_kernel(&a, &b, sigma).unwrap();
            assert!(k > last);
            last = k;
        }
    }

    #[test]
    fn bandwidth_selection_separates_two_groups() {
        // Two tight, well-separated groups of encodings.
        let enc = vec![
            vec_encoding(0, &[0.00]),
            vec_encoding(1, &[0.01]),
            vec_encoding(2, &[0.02]),
            vec_encoding(3, &[10.00]),
            vec_encoding(4, &[10.01]),
            vec_encoding(5, &[10.02]),
        ];
        let grid: Vec<f64> = (0..30).map(|i| 0.1 * 1.3f64.powi(i)).collect();
        let choice = select_bandwidth(&enc, &grid).unwrap();
        // Off-diagonal kernel at sigma* must be bimodal: in-group near 1,
        // cross-group near 0.
        let k = build_similarity_matrix(&enc, choice.sigma).unwrap();
        assert!(k.matrix[(0, 1)] > 0.9);
        assert!(k.matrix[(0, 3)] < 0.1);
        // Better score than the grid extremes.
        let lo = select_bandwidth(&enc, &[grid[0]]).unwrap();
        let hi = select_bandwidth(&enc, &[grid[grid.len() - 1]]).unwrap();
        assert!(choice.score > lo.score);
        assert!(choice.score > hi.score);
    }

    #[test]
    fn bandwidth_tie_break_on_identical_encodings() {
        let enc = vec![vec_encoding(0, &[1.0]), vec_encoding(1, &[1.0])];
        let choice = select_bandwidth(&enc, &[2.0, 0.5, 1.0]).unwrap();
        assert_eq!(choice.sigma, 0.5);
        assert_eq!(choice.score, 0.0);
    }

    #[test]
    fn bandwidth_all_underflow_is_an_error() {
        let enc = vec![vec_encoding(0, &[0.0]), vec_encoding(1, &[1e6])];
        assert!(select_bandwidth(&enc, &[1e-12]).is_err());
    }

    #[test]
    fn default_grid_spans_the_distances() {
        let enc: Vec<_> = (0..6).map(|i| vec_encoding(i, &[i as f64])).collect();
        let d = pairwise_distances(&enc).unwrap();
        let grid = default_bandwidth_grid(&d);
        assert_eq!(grid.len(), 32);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert!(grid[0] > 0.0);
        assert!(grid[31] <= 5.0 + 1e-9);
    }
}
