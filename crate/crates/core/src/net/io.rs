//! Dataset directory layout: `manifest.json` alongside a `snapshots/`
//! directory holding one `NNNNN.edges` file per snapshot (zero-padded
//! index). Edge lines are `u v w`, whitespace separated with `u < v`;
//! the weight may be omitted for unweighted datasets and defaults to 1.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::graph::{SnapshotGraph, TemporalNetwork};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub num_nodes: usize,
    pub num_snapshots: usize,
    pub weighted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<Vec<usize>>,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads and validates a dataset directory.
pub fn load_temporal_network(dir: &Path) -> Result<TemporalNetwork> {
    let manifest_path = dir.join("manifest.json");
    let raw = fs::read_to_string(&manifest_path).map_err(|e| io_err(&manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&raw)
        .map_err(|e| Error::Dataset(format!("invalid manifest.json: {e}")))?;
    if manifest.num_snapshots < 2 {
        return Err(Error::Dataset(format!(
            "dataset declares {} snapshots; at least 2 are required",
            manifest.num_snapshots
        )));
    }

    let mut snapshots = Vec::with_capacity(manifest.num_snapshots);
    for index in 0..manifest.num_snapshots {
        let path = dir.join("snapshots").join(format!("{index:05}.edges"));
        let contents = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
        let edges = parse_edge_lines(&contents, index, manifest.weighted)?;
        snapshots.push(SnapshotGraph::new(manifest.num_nodes, index, &edges)?);
    }
    TemporalNetwork::new(
        manifest.name,
        manifest.weighted,
        manifest.ground_truth,
        snapshots,
    )
}

fn parse_edge_lines(
    contents: &str,
    snapshot: usize,
    weighted: bool,
) -> Result<Vec<(usize, usize, f64)>> {
    let mut edges = Vec::new();
    for (line_no, line) in contents.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let u = parse_field(fields.next(), snapshot, line_no, "source node")?;
        let v = parse_field(fields.next(), snapshot, line_no, "target node")?;
        let w = match fields.next() {
            Some(raw) => raw.parse::<f64>().map_err(|_| {
                Error::Dataset(format!(
                    "snapshot {snapshot} line {}: unparseable weight {raw:?}",
                    line_no + 1
                ))
            })?,
            None if weighted => {
                return Err(Error::Dataset(format!(
                    "snapshot {snapshot} line {}: weighted dataset is missing a weight",
                    line_no + 1
                )))
            }
            None => 1.0,
        };
        if fields.next().is_some() {
            return Err(Error::Dataset(format!(
                "snapshot {snapshot} line {}: too many fields",
                line_no + 1
            )));
        }
        edges.push((u, v, w));
    }
    Ok(edges)
}

fn parse_field(
    raw: Option<&str>,
    snapshot: usize,
    line_no: usize,
    what: &str,
) -> Result<usize> {
    let raw = raw.ok_or_else(|| {
        Error::Dataset(format!(
            "snapshot {snapshot} line {}: missing {what}",
            line_no + 1
        ))
    })?;
    raw.parse::<usize>().map_err(|_| {
        Error::Dataset(format!(
            "snapshot {snapshot} line {}: unparseable {what} {raw:?}",
            line_no + 1
        ))
    })
}

/// Writes a dataset directory in the layout `load_temporal_network` reads.
pub fn save_temporal_network(net: &TemporalNetwork, dir: &Path) -> Result<()> {
    let snapshots_dir = dir.join("snapshots");
    fs::create_dir_all(&snapshots_dir).map_err(|e| io_err(&snapshots_dir, e))?;
    let manifest = Manifest {
        name: net.name.clone(),
        num_nodes: net.num_nodes(),
        num_snapshots: net.len(),
        weighted: net.weighted,
        ground_truth: net.ground_truth.clone(),
    };
    let manifest_path = dir.join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Dataset(format!("manifest serialization failed: {e}")))?;
    fs::write(&manifest_path, body + "\n").map_err(|e| io_err(&manifest_path, e))?;

    for (index, snapshot) in net.snapshots().iter().enumerate() {
        let mut lines = String::new();
        for e in snapshot.edges() {
            if net.weighted {
                lines.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
            } else if e.w == 1.0 {
                lines.push_str(&format!("{} {}\n", e.u, e.v));
            } else {
                lines.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
            }
        }
        let path = snapshots_dir.join(format!("{index:05}.edges"));
        fs::write(&path, lines).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}
