//! End-to-end behavior on very sparse snapshots with many isolated nodes
//! and several connected components, the regime real contact data lives
//! in. Each connected component is handled independently and isolated
//! nodes carry identity transition rows, so the pipeline must stay
//! finite and still separate structurally distinct eras.

use phasewalk_core::metrics::ari;
use phasewalk_core::net::{SnapshotGraph, TemporalNetwork};
use phasewalk_core::pipeline::{run, Method, RunConfig};
use phasewalk_core::rng::splitmix64;
use phasewalk_core::spatial::{build_generator, generator_spectrum, transition_matrix};

/// Sparse snapshot: an era-specific set of short chains among mostly
/// isolated nodes, with one noise edge that moves per snapshot.
fn sparse_snapshot(index: usize, seed: u64, base: &[(usize, usize)]) -> SnapshotGraph {
    let n = 40;
    let mut edges: Vec<(usize, usize, f64)> =
        base.iter().map(|&(u, v)| (u, v, 1.0)).collect();
    let state = splitmix64(seed);
    let u = (state % 39) as usize;
    let v = u + 1;
    if !edges.iter().any(|&(a, b, _)| (a, b) == (u, v)) {
        edges.push((u, v, 1.0));
    }
    SnapshotGraph::new(n, index, &edges).unwrap()
}

fn sparse_two_era_network() -> TemporalNetwork {
    // Era one wires chains in the low node pool, era two in the high one.
    let era_one = [(0, 1), (1, 2), (4, 5), (5, 6), (8, 9), (12, 13), (13, 14)];
    let era_two = [
        (20, 21),
        (21, 22),
        (24, 25),
        (25, 26),
        (28, 29),
        (32, 33),
        (33, 34),
    ];
    let snapshots: Vec<SnapshotGraph> = (0..12)
        .map(|i| {
            let base: &[(usize, usize)] = if i < 6 { &era_one } else { &era_two };
            sparse_snapshot(i, 1000 + i as u64, base)
        })
        .collect();
    TemporalNetwork::new(
        "sparse-eras",
        false,
        Some(vec![0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1]),
        snapshots,
    )
    .unwrap()
}

#[test]
fn transition_matrices_stay_stochastic_with_isolated_nodes() {
    let net = sparse_two_era_network();
    for snapshot in net.snapshots() {
        let gen = build_generator::<f64>(snapshot);
        let p = transition_matrix(&gen, 10.0).unwrap();
        let isolated: Vec<usize> = snapshot
            .degree_vector()
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0.0)
            .map(|(u, _)| u)
            .collect();
        assert!(!isolated.is_empty(), "test wants isolated nodes present");
        for u in 0..snapshot.num_nodes() {
            let sum: f64 = p.matrix.row(u).iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9);
        }
        for &u in &isolated {
            assert_eq!(p.matrix[(u, u)], 1.0);
        }
    }
}

#[test]
fn spectrum_counts_one_zero_per_component() {
    let net = sparse_two_era_network();
    let snapshot = net.snapshot(0);
    let gen = build_generator::<f64>(snapshot);
    let spec = generator_spectrum(&gen, snapshot.num_nodes()).unwrap();
    let zeros = spec.eigenvalues.iter().filter(|ev| ev.abs() <= 1e-10).count();
    assert_eq!(zeros, snapshot.connected_components().len());
}

#[test]
fn lne_separates_eras_on_sparse_disconnected_snapshots() {
    let net = sparse_two_era_network();
    let gt = net.ground_truth.clone().unwrap();
    let mut config = RunConfig::new(Method::Lne);
    config.tau = Some(10.0);
    config.sigma = Some(1.0);
    config.tau_temp = Some(1.0);
    config.phases = Some(2);
    config.seed = 3;
    let result = run(&config, &net).unwrap();
    let score = ari(&result.labels.labels, &gt).unwrap();
    assert!(score >= 0.9, "sparse-era separation ARI {score}");
}
