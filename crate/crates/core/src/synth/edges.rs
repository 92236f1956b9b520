use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::net::SnapshotGraph;
use crate::rng::CounterRng;
use crate::scalar::{cast, Scalar};

/// Distance-to-edge-probability evaluation function
/// `f(x) = 1 - xi (1 - nu (-(1/pi) atan(theta x - omega) + 1/2))`.
///
/// `theta` and `omega` set the distance threshold, `nu` the in-range
/// density, and `xi` the far-range baseline `1 - xi`. The constructor
/// enforces the parameter ranges under which `f` maps `[0, inf)` into
/// `[0, 1]` and is monotone non-increasing.
#[derive(Debug, Clone, Copy)]
pub struct EdgeModel<T = f64> {
    pub xi: T,
    pub nu: T,
    pub theta: T,
    pub omega: T,
}

impl<T: Scalar> EdgeModel<T> {
    pub fn new(xi: T, nu: T, theta: T, omega: T) -> Result<Self> {
        if theta <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "edge model needs theta > 0, got {theta}"
            )));
        }
        if nu < T::zero() || nu > T::one() {
            return Err(Error::InvalidParameter(format!(
                "edge model needs nu in [0, 1], got {nu}"
            )));
        }
        if xi < T::zero() || xi > T::one() {
            return Err(Error::InvalidParameter(format!(
                "edge model needs xi in [0, 1], got {xi}"
            )));
        }
        Ok(Self { xi, nu, theta, omega })
    }

    /// Edge probability at distance `x`.
    pub fn probability(&self, x: T) -> T {
        let pi = cast::<T>(std::f64::consts::PI);
        let half = cast::<T>(0.5);
        let shaped = -(self.theta * x - self.omega).atan() / pi + half;
        let f = T::one() - self.xi * (T::one() - self.nu * shaped);
        // Absorb sub-1e-12 rounding excursions only.
        f.min(T::one()).max(T::zero())
    }
}

/// Samples one snapshot from agent positions: each unordered pair gets an
/// edge with probability `f(distance)`, addressed by its pair rank in the
/// counter stream so sampling is order-independent. Weighted mode stores
/// `f(distance)` as the weight instead of 1.
pub fn sample_snapshot<T: Scalar>(
    frame: &[[T; 2]],
    model: &EdgeModel<T>,
    stream: CounterRng,
    snapshot_index: usize,
    weighted: bool,
) -> Result<SnapshotGraph> {
    let n = frame.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "edge sampling needs at least 2 agents".into(),
        ));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    let edges: Vec<(usize, usize, f64)> = pairs
        .par_iter()
        .enumerate()
        .filter_map(|(rank, &(u, v))| {
            let dx = frame[u][0] - frame[v][0];
            let dy = frame[u][1] - frame[v][1];
            let dist = (dx * dx + dy * dy).sqrt();
            let p = model.probability(dist);
            if stream.uniform(rank as u64) < p.to_f64().expect("probability fits in f64") {
                let w = if weighted {
                    p.to_f64().expect("probability fits in f64")
                } else {
                    1.0
                };
                Some((u, v, w))
            } else {
                None
            }
        })
        .collect();
    SnapshotGraph::new(n, snapshot_index, &edges)
}
