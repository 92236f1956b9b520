//! Spectral embedding of snapshots, phase-count detection, k-means phase
//! assignment, and the normalized phase distance matrix.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{normalize_column, symmetric_eigen, DenseMatrix};
use crate::rng::{stream_rng, DOMAIN_KMEANS};
use crate::scalar::{cast, Scalar};
use crate::temporal::TemporalTransitionMatrix;

use rand::Rng;

const KMEANS_MAX_ITERS: usize = 300;
const KMEANS_SHIFT_TOL: f64 = 1e-9;

/// Dominant eigenvectors of the temporal transition matrix, one snapshot
/// per row; the embedding the phases live in.
#[derive(Debug, Clone)]
pub struct EmbeddingMatrix<T = f64> {
    /// M x s matrix; column `i` is the eigenvector of the (i+1)-th
    /// largest eigenvalue, unit-normalized with deterministic sign.
    pub coordinates: DenseMatrix<T>,
    /// Matching eigenvalues, non-increasing.
    pub eigenvalues: Vec<T>,
}

impl<T: Scalar> EmbeddingMatrix<T> {
    pub fn num_snapshots(&self) -> usize {
        self.coordinates.rows()
    }

    pub fn num_components(&self) -> usize {
        self.coordinates.cols()
    }

    /// Keeps only the leading `s` eigenvectors.
    pub fn truncated(&self, s: usize) -> EmbeddingMatrix<T> {
        assert!(s <= self.num_components());
        let m = self.num_snapshots();
        let mut coordinates = DenseMatrix::zeros(m, s);
        for i in 0..m {
            for j in 0..s {
                coordinates[(i, j)] = self.coordinates[(i, j)];
            }
        }
        EmbeddingMatrix {
            coordinates,
            eigenvalues: self.eigenvalues[..s].to_vec(),
        }
    }

    /// Diffusion-map style coordinates: each eigenvector scaled by its
    /// eigenvalue. The default pipeline clusters the unweighted
    /// eigenvectors; this variant is offered for downstream analyses
    /// that want slow modes emphasized.
    pub fn eigenvalue_weighted(&self) -> DenseMatrix<T> {
        let m = self.num_snapshots();
        let s = self.num_components();
        let mut out = DenseMatrix::zeros(m, s);
        for i in 0..m {
            for j in 0..s {
                out[(i, j)] = self.coordinates[(i, j)] * self.eigenvalues[j];
            }
        }
        out
    }
}

/// Phase assignment for every snapshot plus the k-means objective.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLabels<T = f64> {
    pub labels: Vec<usize>,
    pub inertia: T,
}

/// Normalized pairwise distances between embedding rows.
#[derive(Debug, Clone)]
pub struct PhaseDistanceMatrix<T = f64> {
    pub matrix: DenseMatrix<T>,
    /// The scaling constant (max raw pairwise distance, or 1 if all rows
    /// coincide).
    pub scaling: T,
}

/// Computes the `s` dominant eigenvectors of the temporal transition
/// matrix through its symmetrized form and transforms them back.
///
/// The walk is reversible against weights `w ~ d^2`, so `D P D^{-1}` with
/// `D = diag(d)` is symmetric; eigenvectors of `P` are the back-scaled
/// columns. Each returned column is unit-normalized with the largest-
/// magnitude entry positive.
pub fn spectral_embedding<T: Scalar>(
    transition: &TemporalTransitionMatrix<T>,
    s: usize,
) -> Result<EmbeddingMatrix<T>> {
    let m = transition.matrix.rows();
    if s < 1 || s > m {
        return Err(Error::InvalidParameter(format!(
            "embedding dimension must be in [1, {m}], got {s}"
        )));
    }
    if transition.weights.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} reversibility weights for a {m}x{m} transition matrix",
            transition.weights.len()
        )));
    }
    let mut sym = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            sym[(i, j)] = transition.weights[i] * transition.matrix[(i, j)]
                / transition.weights[j];
        }
    }
    sym.symmetrize();
    let eig = symmetric_eigen(&sym)?;

    let mut coordinates = DenseMatrix::zeros(m, s);
    for col in 0..s {
        let mut vector: Vec<T> = (0..m)
            .map(|i| eig.vectors[(i, col)] / transition.weights[i])
            .collect();
        normalize_column(&mut vector);
        for i in 0..m {
            coordinates[(i, col)] = vector[i];
        }
    }
    Ok(EmbeddingMatrix {
        coordinates,
        eigenvalues: eig.values[..s].to_vec(),
    })
}

/// Number of phases from the largest consecutive eigenvalue gap of the
/// temporal transition spectrum (leading `min(len - 1, 10)` gaps).
pub fn detect_num_phases<T: Scalar>(eigenvalues: &[T]) -> usize {
    crate::spatial::largest_gap_index(eigenvalues)
}

/// k-means over the rows of the embedding.
pub fn kmeans_rows<T: Scalar>(
    embedding: &EmbeddingMatrix<T>,
    s: usize,
    restarts: usize,
    seed: u64,
) -> Result<PhaseLabels<T>> {
    kmeans(&embedding.coordinates, s, restarts, seed)
}

/// Lloyd's algorithm with k-means++ seeding and deterministic parallel
/// restarts: restart `r` draws from its own stream derived from
/// `(seed, r)`, and the best inertia wins with ties broken by restart
/// index, so the result is schedule-independent.
pub fn kmeans<T: Scalar>(
    points: &DenseMatrix<T>,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<PhaseLabels<T>> {
    let n = points.rows();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k-means needs 1 <= k <= {n}, got {k}"
        )));
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("k-means needs at least one restart".into()));
    }
    let distinct = count_distinct_rows(points);
    if k > distinct {
        return Err(Error::TooFewDistinctRows { k, distinct });
    }

    let runs: Vec<(T, Vec<usize>)> = (0..restarts)
        .into_par_iter()
        .map(|restart| kmeans_single(points, k, seed, restart as u64))
        .collect();
    let mut best: Option<(T, usize)> = None;
    for (idx, (inertia, _)) in runs.iter().enumerate() {
        let better = match best {
            None => true,
            Some((best_inertia, _)) => *inertia < best_inertia,
        };
        if better {
            best = Some((*inertia, idx));
        }
    }
    let (inertia, idx) = best.expect("at least one restart ran");
    Ok(PhaseLabels {
        labels: runs[idx].1.clone(),
        inertia,
    })
}

fn kmeans_single<T: Scalar>(
    points: &DenseMatrix<T>,
    k: usize,
    seed: u64,
    restart: u64,
) -> (T, Vec<usize>) {
    let n = points.rows();
    let d = points.cols();
    let mut rng = stream_rng(seed, DOMAIN_KMEANS, restart);

    // k-means++ seeding.
    let mut centroids: Vec<Vec<T>> = Vec::with_capacity(k);
    let first = rng.random_range(0..n);
    centroids.push(points.row(first).to_vec());
    let mut distances: Vec<T> = (0..n)
        .map(|i| squared_distance(points.row(i), &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: T = distances.iter().copied().sum();
        let next = if total > T::zero() {
            let target = cast::<T>(rng.random::<f64>()) * total;
            let mut acc = T::zero();
            let mut chosen = n - 1;
            for (i, &w) in distances.iter().enumerate() {
                acc += w;
                if acc >= target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // All mass on existing centroids; pick any unused distinct row.
            (0..n)
                .find(|&i| {
                    centroids
                        .iter()
                        .all(|c| squared_distance(points.row(i), c) > T::zero())
                })
                .unwrap_or(0)
        };
        centroids.push(points.row(next).to_vec());
        for i in 0..n {
            let dist = squared_distance(points.row(i), centroids.last().unwrap());
            if dist < distances[i] {
                distances[i] = dist;
            }
        }
    }

    let mut labels = vec![0usize; n];
    let shift_tol = cast::<T>(KMEANS_SHIFT_TOL);
    for _iter in 0..KMEANS_MAX_ITERS {
        for (i, label) in labels.iter_mut().enumerate() {
            *label = nearest_centroid(points.row(i), &centroids);
        }
        let mut sums = vec![vec![T::zero(); d]; k];
        let mut counts = vec![0usize; k];
        for (i, &label) in labels.iter().enumerate() {
            counts[label] += 1;
            for (acc, &x) in sums[label].iter_mut().zip(points.row(i)) {
                *acc += x;
            }
        }
        let mut max_shift = T::zero();
        for c in 0..k {
            if counts[c] == 0 {
                // Re-seed an emptied centroid at the point farthest from
                // its current assignment; deterministic.
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = squared_distance(points.row(a), &centroids[labels[a]]);
                        let db = squared_distance(points.row(b), &centroids[labels[b]]);
                        da.partial_cmp(&db).expect("finite distances")
                    })
                    .expect("non-empty point set");
                centroids[c] = points.row(far).to_vec();
                labels[far] = c;
                max_shift = T::infinity();
                continue;
            }
            let inv = T::one() / cast::<T>(counts[c] as f64);
            let mut shift = T::zero();
            for (j, acc) in sums[c].iter().enumerate() {
                let new = *acc * inv;
                let delta = new - centroids[c][j];
                shift += delta * delta;
                centroids[c][j] = new;
            }
            let shift = shift.sqrt();
            if shift > max_shift {
                max_shift = shift;
            }
        }
        if max_shift < shift_tol {
            break;
        }
    }
    for (i, label) in labels.iter_mut().enumerate() {
        *label = nearest_centroid(points.row(i), &centroids);
    }
    // A dominated centroid can end up unassigned (ties go to the lower
    // index); hand it the point farthest from its own centroid so every
    // returned cluster is populated.
    loop {
        let mut counts = vec![0usize; k];
        for &label in &labels {
            counts[label] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            break;
        };
        let far = (0..n)
            .filter(|&i| counts[labels[i]] > 1)
            .max_by(|&a, &b| {
                let da = squared_distance(points.row(a), &centroids[labels[a]]);
                let db = squared_distance(points.row(b), &centroids[labels[b]]);
                da.partial_cmp(&db).expect("finite distances")
            })
            .expect("more points than clusters");
        centroids[empty] = points.row(far).to_vec();
        labels[far] = empty;
    }
    let inertia = (0..n)
        .map(|i| squared_distance(points.row(i), &centroids[labels[i]]))
        .fold(T::zero(), |acc, x| acc + x);
    (inertia, labels)
}

fn nearest_centroid<T: Scalar>(point: &[T], centroids: &[Vec<T>]) -> usize {
    let mut best = 0;
    let mut best_dist = T::infinity();
    for (c, centroid) in centroids.iter().enumerate() {
        let dist = squared_distance(point, centroid);
        if dist < best_dist {
            best_dist = dist;
            best = c;
        }
    }
    best
}

fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x - y;
            d * d
        })
        .fold(T::zero(), |acc, x| acc + x)
}

fn count_distinct_rows<T: Scalar>(points: &DenseMatrix<T>) -> usize {
    let n = points.rows();
    let mut distinct = 0;
    'outer: for i in 0..n {
        for j in 0..i {
            if points.row(i) == points.row(j) {
                continue 'outer;
            }
        }
        distinct += 1;
    }
    distinct
}

/// Pairwise Euclidean distances between embedding rows, scaled by the
/// maximum distance so entries land in [0, 1].
///
/// Embedding columns are unit vectors, so a max distance at roundoff
/// scale means all rows coincide; normalizing by it would only amplify
/// noise, hence the scaling floors to 1 there and the matrix is zeroed.
pub fn distance_matrix<T: Scalar>(embedding: &EmbeddingMatrix<T>) -> PhaseDistanceMatrix<T> {
    let m = embedding.num_snapshots();
    let mut matrix = DenseMatrix::zeros(m, m);
    let mut max = T::zero();
    for i in 0..m {
        for j in (i + 1)..m {
            let dist = squared_distance(
                embedding.coordinates.row(i),
                embedding.coordinates.row(j),
            )
            .sqrt();
            matrix[(i, j)] = dist;
            matrix[(j, i)] = dist;
            if dist > max {
                max = dist;
            }
        }
    }
    if max <= cast::<T>(1e-12) {
        return PhaseDistanceMatrix {
            matrix: DenseMatrix::zeros(m, m),
            scaling: T::one(),
        };
    }
    let inv = T::one() / max;
    let matrix = matrix.map(|x| x * inv);
    PhaseDistanceMatrix {
        matrix,
        scaling: max,
    }
}

/// Plot coordinates per snapshot: the eigenvector columns beyond the
/// constant leading one, i.e. columns 2..s of the embedding.
pub fn snapshot_coordinates<T: Scalar>(
    embedding: &EmbeddingMatrix<T>,
) -> Result<DenseMatrix<T>> {
    let s = embedding.num_components();
    if s < 2 {
        return Err(Error::InvalidParameter(
            "coordinates need an embedding with at least 2 components".into(),
        ));
    }
    let m = embedding.num_snapshots();
    let mut out = DenseMatrix::zeros(m, s - 1);
    for i in 0..m {
        for j in 1..s {
            out[(i, j - 1)] = embedding.coordinates[(i, j)];
        }
    }
    Ok(out)
}
