//! Phase detection for temporal networks via two layers of
//! continuous-time random walks.
//!
//! A temporal network is a sequence of weighted undirected snapshots over
//! a fixed node set. Each snapshot is encoded by the transition matrix of
//! a continuous-time random walk on it (or, cheaper, by the walk's
//! invariant measure). A Gaussian kernel over those encodings defines a
//! reduced network whose nodes are snapshots; a second random walk on
//! that network is spectrally clustered to group snapshots into phases of
//! stable community structure. The crate also ships an agent-based
//! synthetic benchmark generator and the evaluation metrics used to score
//! detected phases against ground truth.
//!
//! All numerical kernels are generic over the scalar type (see
//! [`scalar::Scalar`]); the aliases below fix the `f64` instantiations
//! the pipeline and CLI work with.

pub mod error;
pub mod linalg;
pub mod metrics;
pub mod net;
pub mod phases;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod similarity;
pub mod spatial;
pub mod synth;
pub mod temporal;

pub use error::{Error, ErrorKind, Result};

/// Dense `f64` matrix, the working type of the pipeline.
pub type Matrix = linalg::DenseMatrix<f64>;
/// `f64` snapshot generator matrix.
pub type Generator = spatial::GeneratorMatrix<f64>;
/// `f64` snapshot transition matrix.
pub type Transition = spatial::TransitionMatrix<f64>;
/// `f64` invariant measure.
pub type Measure = spatial::InvariantMeasure<f64>;
/// `f64` spectrum report.
pub type Spectrum = spatial::SpectrumReport<f64>;
/// `f64` snapshot encoding.
pub type Encoding = similarity::SnapshotEncoding<f64>;
/// `f64` similarity matrix.
pub type Similarity = similarity::SimilarityMatrix<f64>;
/// `f64` temporal generator.
pub type TemporalGen = temporal::TemporalGenerator<f64>;
/// `f64` temporal transition matrix.
pub type TemporalTransition = temporal::TemporalTransitionMatrix<f64>;
/// `f64` snapshot embedding.
pub type Embedding = phases::EmbeddingMatrix<f64>;
/// `f64` benchmark scenario.
pub type Scenario = synth::BenchmarkScenario<f64>;
