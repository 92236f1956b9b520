//! Clustering agreement metrics (ARI, NMI), silhouette score, and the
//! PCA baseline embedding.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, DenseMatrix};
use crate::scalar::{cast, Scalar};

/// Label-pair co-occurrence counts with row/column marginals.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    pub cells: HashMap<(usize, usize), usize>,
    pub row_sums: HashMap<usize, usize>,
    pub col_sums: HashMap<usize, usize>,
    pub total: usize,
}

impl ContingencyTable {
    pub fn build(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "label vectors have lengths {} and {}",
                a.len(),
                b.len()
            )));
        }
        let mut cells = HashMap::new();
        let mut row_sums = HashMap::new();
        let mut col_sums = HashMap::new();
        for (&x, &y) in a.iter().zip(b) {
            *cells.entry((x, y)).or_insert(0) += 1;
            *row_sums.entry(x).or_insert(0) += 1;
            *col_sums.entry(y).or_insert(0) += 1;
        }
        Ok(Self {
            cells,
            row_sums,
            col_sums,
            total: a.len(),
        })
    }
}

fn choose2(n: usize) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

/// Adjusted Rand index via pair counting over the contingency table:
/// `(Index - Expected) / (Max - Expected)`. Two identical trivial
/// partitions (all-same or all-singletons) score 1 by convention.
pub fn ari(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() < 2 {
        return Err(Error::InvalidParameter(
            "ARI needs at least 2 elements".into(),
        ));
    }
    let table = ContingencyTable::build(a, b)?;
    let index: f64 = table.cells.values().map(|&n| choose2(n)).sum();
    let sum_a: f64 = table.row_sums.values().map(|&n| choose2(n)).sum();
    let sum_b: f64 = table.col_sums.values().map(|&n| choose2(n)).sum();
    let pairs = choose2(table.total);
    let expected = sum_a * sum_b / pairs;
    let max = 0.5 * (sum_a + sum_b);
    if (max - expected).abs() < f64::EPSILON * pairs.max(1.0) {
        // Both all-same or both all-singleton: identical partitions.
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Normalized mutual information with the arithmetic-mean normalizer
/// `MI / ((H(a) + H(b)) / 2)`. When both entropies vanish the labelings
/// are single clusters, i.e. identical partitions: NMI = 1.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    let table = ContingencyTable::build(a, b)?;
    if table.total == 0 {
        return Err(Error::InvalidParameter("NMI of empty labelings".into()));
    }
    let n = table.total as f64;
    let entropy = |sums: &HashMap<usize, usize>| -> f64 {
        sums.values()
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_a = entropy(&table.row_sums);
    let h_b = entropy(&table.col_sums);
    if h_a <= 0.0 && h_b <= 0.0 {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (&(x, y), &count) in &table.cells {
        let p_xy = count as f64 / n;
        let p_x = table.row_sums[&x] as f64 / n;
        let p_y = table.col_sums[&y] as f64 / n;
        mi += p_xy * (p_xy / (p_x * p_y)).ln();
    }
    let normalizer = 0.5 * (h_a + h_b);
    Ok((mi / normalizer).clamp(0.0, 1.0))
}

/// Mean silhouette score over all points with Euclidean distances.
/// Points in singleton clusters score 0.
pub fn silhouette<T: Scalar>(points: &DenseMatrix<T>, labels: &[usize]) -> Result<T> {
    let n = points.rows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {n} points",
            labels.len()
        )));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(
            "silhouette needs at least 3 points".into(),
        ));
    }
    let mut cluster_sizes: HashMap<usize, usize> = HashMap::new();
    for &l in labels {
        *cluster_sizes.entry(l).or_insert(0) += 1;
    }
    if cluster_sizes.len() < 2 {
        return Err(Error::InvalidParameter(
            "silhouette needs at least 2 clusters".into(),
        ));
    }

    let distance = |i: usize, j: usize| -> T {
        points
            .row(i)
            .iter()
            .zip(points.row(j))
            .map(|(&a, &b)| {
                let d = a - b;
                d * d
            })
            .fold(T::zero(), |acc, x| acc + x)
            .sqrt()
    };

    let mut total = T::zero();
    for i in 0..n {
        let own = labels[i];
        if cluster_sizes[&own] == 1 {
            continue; // singleton scores 0
        }
        // Mean distance to each cluster.
        let mut sums: HashMap<usize, T> = HashMap::new();
        for j in 0..n {
            if i == j {
                continue;
            }
            let entry = sums.entry(labels[j]).or_insert_with(T::zero);
            *entry += distance(i, j);
        }
        let a = sums.get(&own).copied().unwrap_or_else(T::zero)
            / cast::<T>((cluster_sizes[&own] - 1) as f64);
        let mut b = T::infinity();
        for (&cluster, &sum) in &sums {
            if cluster == own {
                continue;
            }
            let mean = sum / cast::<T>(cluster_sizes[&cluster] as f64);
            if mean < b {
                b = mean;
            }
        }
        let denom = a.max(b);
        if denom > T::zero() {
            total += (b - a) / denom;
        }
    }
    Ok(total / cast::<T>(n as f64))
}

/// PCA scores of flattened snapshot matrices.
///
/// Works through the Gram matrix of the mean-centered rows, so the cost
/// is `O(M^2 D)` for M snapshots of flattened length D rather than an SVD
/// of the full data matrix. Components beyond the data rank come out as
/// (numerically) zero columns.
pub fn pca_embed<T: Scalar>(
    matrices: &[DenseMatrix<T>],
    components: usize,
) -> Result<DenseMatrix<T>> {
    let m = matrices.len();
    if m == 0 {
        return Err(Error::InvalidParameter("PCA of an empty list".into()));
    }
    if components > m {
        return Err(Error::InvalidParameter(format!(
            "requested {components} components from {m} snapshots"
        )));
    }
    let flat_len = matrices[0].rows() * matrices[0].cols();
    if matrices
        .iter()
        .any(|mat| mat.rows() * mat.cols() != flat_len)
    {
        return Err(Error::DimensionMismatch(
            "snapshot matrices must flatten to equal lengths".into(),
        ));
    }

    // Mean-center the flattened rows.
    let inv_m = T::one() / cast::<T>(m as f64);
    let mut mean = vec![T::zero(); flat_len];
    for mat in matrices {
        for (acc, &x) in mean.iter_mut().zip(mat.data()) {
            *acc += x * inv_m;
        }
    }
    let centered: Vec<Vec<T>> = matrices
        .iter()
        .map(|mat| {
            mat.data()
                .iter()
                .zip(&mean)
                .map(|(&x, &mu)| x - mu)
                .collect()
        })
        .collect();

    let mut gram = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let dot = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(&a, &b)| a * b)
                .fold(T::zero(), |acc, x| acc + x);
            gram[(i, j)] = dot;
            gram[(j, i)] = dot;
        }
    }
    let eig = symmetric_eigen(&gram)?;

    // Scores are u_i * sigma_i; eigenvalues of the Gram matrix are the
    // squared singular values.
    let mut scores = DenseMatrix::zeros(m, components);
    for col in 0..components {
        let sigma = eig.values[col].max(T::zero()).sqrt();
        for row in 0..m {
            scores[(row, col)] = eig.vectors[(row, col)] * sigma;
        }
    }
    Ok(scores)
}
