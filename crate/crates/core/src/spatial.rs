//! Per-snapshot continuous-time random walk: rate matrix, transition
//! matrix, invariant measure, and spectrum diagnostics.
//!
//! The walk on a snapshot has jump rate `A(u,v)/d(u)^2` from `u` to `v`
//! and leaves a node at total rate `1/d(u)`, so it waits longer inside
//! densely connected regions. Isolated nodes get an all-zero generator
//! row and stay put.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{expm, symmetric_eigen, DenseMatrix};
use crate::net::SnapshotGraph;
use crate::scalar::{cast, Scalar};

/// Eigenvalues with |value| at or below this count as zero when checking
/// for degenerate spectra.
pub const SPECTRUM_ZERO_TOL: f64 = 1e-12;

/// Rate matrix of the per-snapshot walk.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix<T = f64> {
    pub matrix: DenseMatrix<T>,
    pub snapshot_index: usize,
}

/// `P = exp(L tau)` for one snapshot.
#[derive(Debug, Clone)]
pub struct TransitionMatrix<T = f64> {
    pub matrix: DenseMatrix<T>,
    pub tau: T,
    pub snapshot_index: usize,
}

/// Stationary distribution of the walk, `mu(u) = d(u)^2 / Z`.
#[derive(Debug, Clone)]
pub struct InvariantMeasure<T = f64> {
    pub mu: Vec<T>,
    pub normalizer: T,
    pub snapshot_index: usize,
}

/// Leading generator eigenvalues with derived diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport<T = f64> {
    /// Largest eigenvalues, sorted non-increasing; the leading one is 0
    /// (one zero per connected component).
    pub eigenvalues: Vec<T>,
    /// `1/|eigenvalue|` for indices >= 2 (infinite for repeated zeros).
    pub implied_timescales: Vec<T>,
    /// 1-based position of the largest consecutive eigenvalue gap.
    pub gap_index: usize,
}

/// Admissible spatial exploration window derived from a spectral gap.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TauInterval<T = f64> {
    pub lo: T,
    pub hi: T,
    /// Geometric mean of the interval endpoints.
    pub point: T,
}

/// Builds the rate matrix of a snapshot.
pub fn build_generator<T: Scalar>(g: &SnapshotGraph) -> GeneratorMatrix<T> {
    let n = g.num_nodes();
    let degrees = g.degree_vector();
    let mut matrix = DenseMatrix::<T>::zeros(n, n);
    for (u, &d) in degrees.as_slice().iter().enumerate() {
        if d > 0.0 {
            matrix[(u, u)] = -T::one() / cast::<T>(d);
        }
    }
    for e in g.edges() {
        let du = degrees.as_slice()[e.u];
        let dv = degrees.as_slice()[e.v];
        matrix[(e.u, e.v)] = cast::<T>(e.w / (du * du));
        matrix[(e.v, e.u)] = cast::<T>(e.w / (dv * dv));
    }
    GeneratorMatrix {
        matrix,
        snapshot_index: g.index(),
    }
}

/// `exp(L tau)`; rows are stochastic up to roundoff.
pub fn transition_matrix<T: Scalar>(
    generator: &GeneratorMatrix<T>,
    tau: T,
) -> Result<TransitionMatrix<T>> {
    if tau <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "spatial exploration time must be positive, got {tau}"
        )));
    }
    let mut matrix = expm(&generator.matrix.scale(tau))?;
    // A zero generator row exponentiates to an identity row exactly; pin
    // it so isolated nodes carry no solver roundoff.
    let n = matrix.rows();
    for u in 0..n {
        if generator.matrix.row(u).iter().all(|&x| x == T::zero()) {
            for v in 0..n {
                matrix[(u, v)] = if u == v { T::one() } else { T::zero() };
            }
        }
    }
    Ok(TransitionMatrix {
        matrix,
        tau,
        snapshot_index: generator.snapshot_index,
    })
}

/// Stationary distribution from node degrees.
pub fn invariant_measure<T: Scalar>(g: &SnapshotGraph) -> Result<InvariantMeasure<T>> {
    let degrees = g.degree_vector();
    let z: f64 = degrees.as_slice().iter().map(|d| d * d).sum();
    if z <= 0.0 {
        return Err(Error::EmptyGraph {
            snapshot: g.index(),
        });
    }
    let mu = degrees
        .as_slice()
        .iter()
        .map(|&d| cast::<T>(d * d / z))
        .collect();
    Ok(InvariantMeasure {
        mu,
        normalizer: cast::<T>(z),
        snapshot_index: g.index(),
    })
}

/// Leading spectrum of a snapshot generator.
pub fn generator_spectrum<T: Scalar>(
    generator: &GeneratorMatrix<T>,
    num_eigenvalues: usize,
) -> Result<SpectrumReport<T>> {
    rate_matrix_spectrum(&generator.matrix, num_eigenvalues)
}

/// Spectrum of any rate matrix in the `-1/d` diagonal form (spatial or
/// temporal generator).
///
/// Eigenvalues are computed per connected component through the similarity
/// transform `D L D^{-1}` with `D = diag(d)`, which is symmetric for this
/// walk, so the spectrum is real and the solver is the stable symmetric
/// one. Isolated nodes (all-zero rows) contribute eigenvalue 0 directly.
pub fn rate_matrix_spectrum<T: Scalar>(
    matrix: &DenseMatrix<T>,
    num_eigenvalues: usize,
) -> Result<SpectrumReport<T>> {
    let n = matrix.rows();
    if num_eigenvalues > n {
        return Err(Error::InvalidParameter(format!(
            "requested {num_eigenvalues} eigenvalues of a {n}x{n} generator"
        )));
    }

    let components = support_components(matrix);
    let mut eigenvalues: Vec<T> = Vec::with_capacity(n);
    for component in &components {
        if component.len() == 1 {
            // Zero row: the walk never leaves, eigenvalue 0.
            eigenvalues.push(T::zero());
            continue;
        }
        let m = component.len();
        let mut sym = DenseMatrix::<T>::zeros(m, m);
        let degrees: Vec<T> = component
            .iter()
            .map(|&u| -T::one() / matrix[(u, u)])
            .collect();
        for (i, &u) in component.iter().enumerate() {
            sym[(i, i)] = matrix[(u, u)];
            for (j, &v) in component.iter().enumerate() {
                if i == j {
                    continue;
                }
                sym[(i, j)] = degrees[i] * matrix[(u, v)] / degrees[j];
            }
        }
        sym.symmetrize();
        let eig = symmetric_eigen(&sym)?;
        eigenvalues.extend(eig.values);
    }
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    eigenvalues.truncate(num_eigenvalues);

    let implied_timescales = eigenvalues
        .iter()
        .skip(1)
        .map(|&ev| T::one() / ev.abs())
        .collect();
    let gap_index = largest_gap_index(&eigenvalues);
    Ok(SpectrumReport {
        eigenvalues,
        implied_timescales,
        gap_index,
    })
}

/// 1-based index `i` maximizing `values[i-1] - values[i]` over the first
/// `min(len - 1, 10)` gaps of a non-increasing sequence.
pub fn largest_gap_index<T: Scalar>(values: &[T]) -> usize {
    let limit = values.len().saturating_sub(1).min(10);
    let mut best = 1;
    let mut best_gap = T::neg_infinity();
    for i in 1..=limit {
        let gap = values[i - 1] - values[i];
        if gap > best_gap {
            best_gap = gap;
            best = i;
        }
    }
    best
}

/// Admissible `tau` interval for resolving `k` metastable sets:
/// `1/|lambda_{k+1}| < tau < 1/|lambda_k|`.
pub fn suggest_tau<T: Scalar>(spectrum: &SpectrumReport<T>, k: usize) -> Result<TauInterval<T>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "tau selection needs k >= 2, got {k}"
        )));
    }
    if k + 1 > spectrum.eigenvalues.len() {
        return Err(Error::InvalidParameter(format!(
            "tau selection for k = {k} needs {} eigenvalues, only {} computed",
            k + 1,
            spectrum.eigenvalues.len()
        )));
    }
    let zero_tol = cast::<T>(SPECTRUM_ZERO_TOL);
    let lambda_k = spectrum.eigenvalues[k - 1];
    let lambda_next = spectrum.eigenvalues[k];
    if lambda_k.abs() <= zero_tol || lambda_next.abs() <= zero_tol {
        return Err(Error::DegenerateSpectrum(format!(
            "eigenvalue {k} or {} is zero; fewer than {k} decaying modes",
            k + 1
        )));
    }
    let lo = T::one() / lambda_next.abs();
    let hi = T::one() / lambda_k.abs();
    Ok(TauInterval {
        lo,
        hi,
        point: (lo * hi).sqrt(),
    })
}

/// Connected components of the off-diagonal support (plus singleton
/// components for zero rows).
fn support_components<T: Scalar>(matrix: &DenseMatrix<T>) -> Vec<Vec<usize>> {
    let n = matrix.rows();
    let mut component = vec![usize::MAX; n];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        component[start] = id;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if v != u
                    && component[v] == usize::MAX
                    && (matrix[(u, v)] != T::zero() || matrix[(v, u)] != T::zero())
                {
                    component[v] = id;
                    members.push(v);
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}
