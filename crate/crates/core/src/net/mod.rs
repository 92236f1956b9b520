//! Temporal network data model and dataset I/O.

mod graph;
mod io;

pub use graph::{DegreeVector, Edge, SnapshotGraph, TemporalNetwork};
pub use io::{load_temporal_network, save_temporal_network, Manifest};
