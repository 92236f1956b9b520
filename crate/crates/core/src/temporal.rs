//! The second random walk: a continuous-time process on the reduced
//! snapshot network whose edge weights are kernel similarities. Its
//! metastable sets are the phases of the temporal network.

use crate::error::{Error, Result};
use crate::linalg::{expm, DenseMatrix};
use crate::scalar::{cast, Scalar};
use crate::similarity::SimilarityMatrix;
use crate::spatial::{rate_matrix_spectrum, SpectrumReport, SPECTRUM_ZERO_TOL};

/// Rate matrix over snapshots, same `-1/d` diagonal form as the spatial
/// walk but with kernel similarities as weights.
#[derive(Debug, Clone)]
pub struct TemporalGenerator<T = f64> {
    pub matrix: DenseMatrix<T>,
    /// Weighted degree of each snapshot in the reduced network.
    pub degrees: Vec<T>,
}

/// `P_temp = exp(L_temp tau_temp)` plus the stationary weights needed to
/// symmetrize it later.
#[derive(Debug, Clone)]
pub struct TemporalTransitionMatrix<T = f64> {
    pub matrix: DenseMatrix<T>,
    pub tau_temp: T,
    /// Snapshot weights the walk is reversible against (degrees of the
    /// reduced network; uniform for hand-built matrices).
    pub weights: Vec<T>,
}

impl<T: Scalar> TemporalTransitionMatrix<T> {
    /// Wraps an externally built stochastic matrix with uniform
    /// reversibility weights.
    pub fn with_uniform_weights(matrix: DenseMatrix<T>, tau_temp: T) -> Self {
        let n = matrix.rows();
        Self {
            matrix,
            tau_temp,
            weights: vec![T::one(); n],
        }
    }
}

/// Chosen temporal exploration time and the gap that produced it.
#[derive(Debug, Clone, Copy)]
pub struct TauTempChoice<T = f64> {
    pub tau_temp: T,
    /// 1-based index of the spectral gap used.
    pub gap_index: usize,
}

/// Builds the temporal generator from a similarity matrix. Every snapshot
/// must carry positive similarity mass; a zero row means the bandwidth is
/// far too small to connect it to any other snapshot.
pub fn build_temporal_generator<T: Scalar>(
    similarity: &SimilarityMatrix<T>,
) -> Result<TemporalGenerator<T>> {
    let k = &similarity.matrix;
    let m = k.rows();
    let mut degrees = vec![T::zero(); m];
    for (alpha, d) in degrees.iter_mut().enumerate() {
        *d = k.row(alpha).iter().copied().sum();
        if *d <= T::zero() {
            return Err(Error::ZeroSimilarityRow { snapshot: alpha });
        }
    }
    let mut matrix = DenseMatrix::zeros(m, m);
    for alpha in 0..m {
        let d = degrees[alpha];
        matrix[(alpha, alpha)] = -T::one() / d;
        for beta in 0..m {
            if alpha != beta {
                matrix[(alpha, beta)] = k[(alpha, beta)] / (d * d);
            }
        }
    }
    Ok(TemporalGenerator { matrix, degrees })
}

/// `exp(L_temp tau_temp)`.
pub fn temporal_transition<T: Scalar>(
    generator: &TemporalGenerator<T>,
    tau_temp: T,
) -> Result<TemporalTransitionMatrix<T>> {
    if tau_temp <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "temporal exploration time must be positive, got {tau_temp}"
        )));
    }
    let matrix = expm(&generator.matrix.scale(tau_temp))?;
    Ok(TemporalTransitionMatrix {
        matrix,
        tau_temp,
        weights: generator.degrees.clone(),
    })
}

/// Full spectrum diagnostics of the temporal generator.
pub fn temporal_spectrum<T: Scalar>(
    generator: &TemporalGenerator<T>,
    num_eigenvalues: usize,
) -> Result<SpectrumReport<T>> {
    rate_matrix_spectrum(&generator.matrix, num_eigenvalues)
}

/// Picks `tau_temp` as the geometric mean of the implied timescales
/// bracketing a spectral gap.
///
/// With an explicit `gap_choice = k` the gap between eigenvalues `k` and
/// `k+1` is used (this is the multiresolution knob). Otherwise the
/// largest consecutive gap among the leading eigenvalues wins; gaps whose
/// upper eigenvalue is (numerically) zero are skipped, since the leading
/// zero mode has no finite timescale.
pub fn select_tau_temp<T: Scalar>(
    spectrum: &SpectrumReport<T>,
    gap_choice: Option<usize>,
) -> Result<TauTempChoice<T>> {
    let eigenvalues = &spectrum.eigenvalues;
    let zero_tol = cast::<T>(SPECTRUM_ZERO_TOL);
    let usable = |k: usize| {
        k >= 1
            && k < eigenvalues.len()
            && eigenvalues[k - 1].abs() > zero_tol
            && eigenvalues[k].abs() > zero_tol
    };

    let k = match gap_choice {
        Some(k) => {
            if k < 1 || k + 1 > eigenvalues.len() {
                return Err(Error::InvalidParameter(format!(
                    "gap choice {k} out of range for {} eigenvalues",
                    eigenvalues.len()
                )));
            }
            if !usable(k) {
                return Err(Error::DegenerateSpectrum(format!(
                    "eigenvalues around gap {k} are zero; the reduced network is disconnected \
                     or has fewer decaying modes"
                )));
            }
            k
        }
        None => {
            let limit = eigenvalues.len().saturating_sub(1).min(10);
            let mut best: Option<(usize, T)> = None;
            for k in 1..=limit {
                if !usable(k) {
                    continue;
                }
                let gap = eigenvalues[k - 1] - eigenvalues[k];
                if best.is_none_or(|(_, g)| gap > g) {
                    best = Some((k, gap));
                }
            }
            match best {
                Some((k, _)) => k,
                None => {
                    return Err(Error::DegenerateSpectrum(
                        "no usable spectral gap: all leading eigenvalues are zero or only one \
                         mode exists"
                            .into(),
                    ))
                }
            }
        }
    };
    let hi = T::one() / eigenvalues[k - 1].abs();
    let lo = T::one() / eigenvalues[k].abs();
    Ok(TauTempChoice {
        tau_temp: (lo * hi).sqrt(),
        gap_index: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sim(rows: &[Vec<f64>]) -> SimilarityMatrix<f64> {
        SimilarityMatrix {
            matrix: DenseMatrix::from_rows(rows),
            sigma: 1.0,
        }
    }

    #[test]
    fn two_snapshot_generator() {
        let lt = build_temporal_generator(&sim(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        assert_eq!(lt.matrix.row(0), &[-1.0, 1.0]);
        assert_eq!(lt.matrix.row(1), &[1.0, -1.0]);
    }

    #[test]
    fn doubled_similarity_halves_rates() {
        let lt = build_temporal_generator(&sim(&[vec![0.0, 2.0], vec![2.0, 0.0]])).unwrap();
        assert_eq!(lt.matrix[(0, 0)], -0.5);
        assert_eq!(lt.matrix[(0, 1)], 0.5);
    }

    #[test]
    fn zero_row_is_rejected() {
        let result = build_temporal_generator(&sim(&[
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
        ]));
        assert!(matches!(result, Err(Error::ZeroSimilarityRow { snapshot: 1 })));
    }

    #[test]
    fn rows_sum_to_zero_and_detailed_balance_holds() {
        let k = sim(&[
            vec![0.0, 0.9, 0.1],
            vec![0.9, 0.0, 0.4],
            vec![0.1, 0.4, 0.0],
        ]);
        let lt = build_temporal_generator(&k).unwrap();
        for alpha in 0..3 {
            let sum: f64 = lt.matrix.row(alpha).iter().sum();
            assert!(sum.abs() <= 1e-12);
        }
        // nu(a) L(a,b) = nu(b) L(b,a) with nu ~ d^2
        for a in 0..3 {
            for b in 0..3 {
                let lhs = lt.degrees[a] * lt.degrees[a] * lt.matrix[(a, b)];
                let rhs = lt.degrees[b] * lt.degrees[b] * lt.matrix[(b, a)];
                assert!((lhs - rhs).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn transition_closed_form_and_identity_limit() {
        let lt = build_temporal_generator(&sim(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        let p = temporal_transition(&lt, 1.0).unwrap();
        assert_relative_eq!(p.matrix[(0, 0)], (1.0 + (-2.0f64).exp()) / 2.0, epsilon = 1e-12);

        let p_small = temporal_transition(&lt, 1e-10).unwrap();
        assert_relative_eq!(p_small.matrix[(0, 0)], 1.0, epsilon = 1e-9);
        assert!(temporal_transition(&lt, 0.0).is_err());
    }

    #[test]
    fn block_structured_similarity_keeps_blocks() {
        // Two groups of three snapshots with near-zero cross similarity.
        let eps = 1e-6;
        let mut rows = vec![vec![0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                rows[i][j] = if (i < 3) == (j < 3) { 0.9 } else { eps };
            }
        }
        let lt = build_temporal_generator(&sim(&rows)).unwrap();
        let p = temporal_transition(&lt, 5.0).unwrap();
        for i in 0..3 {
            let cross: f64 = (3..6).map(|j| p.matrix[(i, j)]).sum();
            assert!(cross < 0.05, "cross-block mass {cross}");
        }
    }

    #[test]
    fn tau_temp_from_explicit_gap() {
        let spec = SpectrumReport {
            eigenvalues: vec![0.0, -0.01, -0.5, -0.6],
            implied_timescales: vec![100.0, 2.0, 1.0 / 0.6],
            gap_index: 2,
        };
        let choice = select_tau_temp(&spec, Some(2)).unwrap();
        assert_relative_eq!(choice.tau_temp, (100.0f64 * 2.0).sqrt(), epsilon = 1e-12);
        assert!((choice.tau_temp - 14.14).abs() < 0.01);

        let choice3 = select_tau_temp(&spec, Some(3)).unwrap();
        assert_relative_eq!(
            choice3.tau_temp,
            (2.0f64 * (1.0 / 0.6)).sqrt(),
            epsilon = 1e-12
        );
        assert!((choice3.tau_temp - 1.83).abs() < 0.01);
    }

    #[test]
    fn tau_temp_auto_picks_largest_usable_gap() {
        let spec = SpectrumReport {
            eigenvalues: vec![0.0, -0.01, -0.5, -0.6],
            implied_timescales: vec![100.0, 2.0, 1.0 / 0.6],
            gap_index: 2,
        };
        let choice = select_tau_temp(&spec, None).unwrap();
        assert_eq!(choice.gap_index, 2);
    }

    #[test]
    fn disconnected_reduced_network_is_degenerate() {
        let spec = SpectrumReport {
            eigenvalues: vec![0.0, 0.0, -1.0],
            implied_timescales: vec![f64::INFINITY, 1.0],
            gap_index: 2,
        };
        assert!(matches!(
            select_tau_temp(&spec, Some(2)),
            Err(Error::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn temporal_spectrum_matches_construction() {
        let lt = build_temporal_generator(&sim(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        let spec = temporal_spectrum(&lt, 2).unwrap();
        assert_relative_eq!(spec.eigenvalues[0], 0.0, epsilon = 1e-13);
        assert_relative_eq!(spec.eigenvalues[1], -2.0, epsilon = 1e-13);
    }

    #[test]
    fn temporal_transition_semigroup() {
        let k = sim(&[
            vec![0.0, 0.8, 0.2, 0.1],
            vec![0.8, 0.0, 0.3, 0.2],
            vec![0.2, 0.3, 0.0, 0.9],
            vec![0.1, 0.2, 0.9, 0.0],
        ]);
        let lt = build_temporal_generator(&k).unwrap();
        let p1 = temporal_transition(&lt, 3.0).unwrap();
        let p2 = temporal_transition(&lt, 5.0).unwrap();
        let combined = temporal_transition(&lt, 8.0).unwrap();
        let product = p1.matrix.matmul(&p2.matrix);
        assert!(product.frobenius_distance(&combined.matrix) <= 1e-8);
    }
}
