//! End-to-end phase detection: per-snapshot encodings, the kernel
//! similarity matrix, the temporal walk, spectral clustering, and result
//! emission. Every auto-resolved parameter is recorded so a run is fully
//! reproducible from its `run.json`.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::net::TemporalNetwork;
use crate::phases::{
    detect_num_phases, distance_matrix, kmeans_rows, snapshot_coordinates, spectral_embedding,
    EmbeddingMatrix, PhaseDistanceMatrix, PhaseLabels,
};
use crate::similarity::{
    default_bandwidth_grid, pairwise_distances, select_bandwidth_from_distances,
    similarity_from_distances, SimilarityMatrix, SnapshotEncoding,
};
use crate::spatial::{build_generator, invariant_measure, transition_matrix};
use crate::temporal::{
    build_temporal_generator, select_tau_temp, temporal_spectrum, temporal_transition,
};

pub const DEFAULT_TAU_RATIO: f64 = 5.0;
pub const DEFAULT_KMEANS_RESTARTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lne,
    Imc,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lne" => Ok(Method::Lne),
            "imc" => Ok(Method::Imc),
            other => Err(Error::InvalidParameter(format!(
                "unknown method {other:?}; expected lne or imc"
            ))),
        }
    }
}

/// User-facing run configuration; `None` fields are resolved
/// automatically before the pipeline runs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub method: Method,
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
    pub tau_temp: Option<f64>,
    pub phases: Option<usize>,
    pub gap_choice: Option<usize>,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Multiplier on the mean degree for the tau heuristic.
    pub tau_ratio: f64,
    pub kmeans_restarts: usize,
}

impl RunConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            tau: None,
            sigma: None,
            tau_temp: None,
            phases: None,
            gap_choice: None,
            seed: 0,
            threads: None,
            tau_ratio: DEFAULT_TAU_RATIO,
            kmeans_restarts: DEFAULT_KMEANS_RESTARTS,
        }
    }
}

/// Every parameter after auto-resolution; the reproducibility record.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub method: Method,
    /// Spatial exploration time; absent for the invariant-measure method.
    pub tau: Option<f64>,
    pub sigma: f64,
    pub tau_temp: f64,
    pub phases: usize,
    /// Spectral gap used for tau_temp when it was auto-selected.
    pub gap_index: Option<usize>,
    pub seed: u64,
    pub threads: usize,
    pub tau_ratio: f64,
    pub kmeans_restarts: usize,
    pub tau_auto: bool,
    pub sigma_auto: bool,
    pub tau_temp_auto: bool,
    pub phases_auto: bool,
}

/// Full output bundle of one detection run.
#[derive(Debug, Clone)]
pub struct PhaseResult {
    pub resolved: ResolvedConfig,
    pub labels: PhaseLabels<f64>,
    /// Embedding truncated to the detected phase count.
    pub embedding: EmbeddingMatrix<f64>,
    pub distances: PhaseDistanceMatrix<f64>,
    pub similarity: SimilarityMatrix<f64>,
    /// Eigenvalues of the temporal generator (all of them).
    pub temporal_eigenvalues: Vec<f64>,
    /// Eigenvalues of the temporal transition matrix (all of them).
    pub transition_eigenvalues: Vec<f64>,
}

/// The tau heuristic: `ratio * (mean over snapshots of mean degree)`.
pub fn auto_tau(net: &TemporalNetwork, ratio: f64) -> Result<f64> {
    if ratio <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tau ratio must be positive, got {ratio}"
        )));
    }
    let tau = ratio * net.mean_degree();
    if tau <= 0.0 {
        return Err(Error::InvalidParameter(
            "tau heuristic failed: the network has no edges".into(),
        ));
    }
    Ok(tau)
}

/// Per-snapshot encodings for the configured method.
fn compute_encodings(
    net: &TemporalNetwork,
    method: Method,
    tau: Option<f64>,
) -> Result<Vec<SnapshotEncoding<f64>>> {
    match method {
        Method::Lne => {
            let tau = tau.expect("tau resolved before encoding");
            net.snapshots()
                .par_iter()
                .map(|g| {
                    let generator = build_generator::<f64>(g);
                    transition_matrix(&generator, tau).map(SnapshotEncoding::from)
                })
                .collect()
        }
        Method::Imc => net
            .snapshots()
            .par_iter()
            .map(|g| invariant_measure::<f64>(g).map(SnapshotEncoding::from))
            .collect(),
    }
}

/// Resolves every `auto` field of a config against a dataset, without
/// keeping the intermediate matrices. `run` performs the same resolution
/// inline; this entry point exists for callers that only want the
/// resolved parameters.
pub fn resolve_auto_parameters(
    config: &RunConfig,
    net: &TemporalNetwork,
) -> Result<ResolvedConfig> {
    run_internal(config, net).map(|(resolved, _)| resolved)
}

/// Runs the full pipeline with the configured method.
pub fn run(config: &RunConfig, net: &TemporalNetwork) -> Result<PhaseResult> {
    run_internal(config, net).map(|(_, result)| result)
}

/// Transition-matrix encodings pipeline.
pub fn run_lne(config: &RunConfig, net: &TemporalNetwork) -> Result<PhaseResult> {
    let mut config = config.clone();
    config.method = Method::Lne;
    run(&config, net)
}

/// Invariant-measure encodings pipeline.
pub fn run_imc(config: &RunConfig, net: &TemporalNetwork) -> Result<PhaseResult> {
    let mut config = config.clone();
    config.method = Method::Imc;
    run(&config, net)
}

fn run_internal(
    config: &RunConfig,
    net: &TemporalNetwork,
) -> Result<(ResolvedConfig, PhaseResult)> {
    if net.len() < 2 {
        return Err(Error::InvalidParameter(
            "phase detection needs at least 2 snapshots".into(),
        ));
    }
    let stage = |name: &str, err: Error| -> Error {
        Error::Numerical(format!("auto-resolution failed at stage {name}: {err}"))
    };

    // tau (spatial exploration time); not used by the IMC encodings.
    let tau = match config.method {
        Method::Lne => Some(match config.tau {
            Some(tau) => {
                if tau <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "tau must be positive, got {tau}"
                    )));
                }
                tau
            }
            None => auto_tau(net, config.tau_ratio)?,
        }),
        Method::Imc => None,
    };

    let encodings = compute_encodings(net, config.method, tau)?;
    let distance_cache = pairwise_distances(&encodings)?;

    // sigma (kernel bandwidth).
    let sigma = match config.sigma {
        Some(sigma) => {
            if sigma <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "sigma must be positive, got {sigma}"
                )));
            }
            sigma
        }
        None => {
            let grid = default_bandwidth_grid(&distance_cache);
            select_bandwidth_from_distances(&distance_cache, &grid)
                .map_err(|e| stage("bandwidth selection", e))?
                .sigma
        }
    };

    let similarity = similarity_from_distances(&distance_cache, sigma)?;
    let temporal_generator = build_temporal_generator(&similarity)?;
    let spectrum = temporal_spectrum(&temporal_generator, net.len())
        .map_err(|e| stage("temporal spectrum", e))?;

    // tau_temp (temporal exploration time).
    let (tau_temp, gap_index, tau_temp_auto) = match config.tau_temp {
        Some(tau_temp) => {
            if tau_temp <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "tau_temp must be positive, got {tau_temp}"
                )));
            }
            (tau_temp, config.gap_choice, false)
        }
        None => {
            let choice = select_tau_temp(&spectrum, config.gap_choice)
                .map_err(|e| stage("tau_temp selection", e))?;
            (choice.tau_temp, Some(choice.gap_index), true)
        }
    };

    let transition = temporal_transition(&temporal_generator, tau_temp)?;
    let full_embedding = spectral_embedding(&transition, net.len())?;

    // s (phase count).
    let phases = match config.phases {
        Some(s) => {
            if s < 1 || s > net.len() {
                return Err(Error::InvalidParameter(format!(
                    "phase count must be in [1, {}], got {s}",
                    net.len()
                )));
            }
            s
        }
        None => detect_num_phases(&full_embedding.eigenvalues),
    };

    let embedding = full_embedding.truncated(phases);
    let labels = kmeans_rows(&embedding, phases, config.kmeans_restarts, config.seed)?;
    let distances = distance_matrix(&embedding);

    let resolved = ResolvedConfig {
        method: config.method,
        tau,
        sigma,
        tau_temp,
        phases,
        gap_index,
        seed: config.seed,
        threads: rayon::current_num_threads(),
        tau_ratio: config.tau_ratio,
        kmeans_restarts: config.kmeans_restarts,
        tau_auto: config.tau.is_none() && config.method == Method::Lne,
        sigma_auto: config.sigma.is_none(),
        tau_temp_auto,
        phases_auto: config.phases.is_none(),
    };
    let result = PhaseResult {
        resolved: resolved.clone(),
        labels,
        embedding,
        distances,
        similarity,
        temporal_eigenvalues: spectrum.eigenvalues,
        transition_eigenvalues: full_embedding.eigenvalues,
    };
    Ok((resolved, result))
}

fn write_file(path: &Path, contents: String) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Renders a matrix as plain CSV with shortest-roundtrip float formatting
/// (deterministic for identical inputs).
pub fn matrix_to_csv(matrix: &DenseMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..matrix.rows() {
        let row: Vec<String> = matrix.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct LabelsFile<'a> {
    s: usize,
    tau: Option<f64>,
    sigma: f64,
    tau_temp: f64,
    labels: &'a [usize],
    inertia: f64,
}

#[derive(Serialize)]
struct TemporalSpectrumFile<'a> {
    generator_eigenvalues: &'a [f64],
    transition_eigenvalues: &'a [f64],
    gap_index: Option<usize>,
    tau_temp: f64,
}

/// Writes the result bundle into `out_dir`:
/// `labels.json`, `embedding.csv`, `distance_matrix.csv`,
/// `similarity_matrix.csv`, `temporal_spectrum.json`, and `run.json`.
pub fn write_outputs(result: &PhaseResult, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;

    let labels = LabelsFile {
        s: result.resolved.phases,
        tau: result.resolved.tau,
        sigma: result.resolved.sigma,
        tau_temp: result.resolved.tau_temp,
        labels: &result.labels.labels,
        inertia: result.labels.inertia,
    };
    write_file(
        &out_dir.join("labels.json"),
        serde_json::to_string_pretty(&labels).expect("labels serialize") + "\n",
    )?;

    // Plot coordinates exclude the constant leading eigenvector; with a
    // single phase there is nothing beyond it and the file holds empty
    // rows.
    let embedding_csv = if result.resolved.phases >= 2 {
        matrix_to_csv(&snapshot_coordinates(&result.embedding)?)
    } else {
        "\n".repeat(result.embedding.num_snapshots())
    };
    write_file(&out_dir.join("embedding.csv"), embedding_csv)?;

    write_file(
        &out_dir.join("distance_matrix.csv"),
        matrix_to_csv(&result.distances.matrix),
    )?;
    write_file(
        &out_dir.join("similarity_matrix.csv"),
        matrix_to_csv(&result.similarity.matrix),
    )?;

    let spectrum = TemporalSpectrumFile {
        generator_eigenvalues: &result.temporal_eigenvalues,
        transition_eigenvalues: &result.transition_eigenvalues,
        gap_index: result.resolved.gap_index,
        tau_temp: result.resolved.tau_temp,
    };
    write_file(
        &out_dir.join("temporal_spectrum.json"),
        serde_json::to_string_pretty(&spectrum).expect("spectrum serialize") + "\n",
    )?;

    write_file(
        &out_dir.join("run.json"),
        serde_json::to_string_pretty(&result.resolved).expect("config serialize") + "\n",
    )?;
    Ok(())
}
