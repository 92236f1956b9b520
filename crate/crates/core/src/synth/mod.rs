//! Agent-based synthetic benchmark generator: overdamped Langevin
//! dynamics in a time-dependent two-dimensional potential, with network
//! snapshots sampled from agent proximity.

mod edges;
mod potential;
mod scenario;
mod simulate;

pub use edges::{sample_snapshot, EdgeModel};
pub use potential::{PotentialPhase, PotentialSpec, Well};
pub use scenario::{preset, BenchmarkScenario, Preset, SimulationConfig};
pub use simulate::{euler_maruyama_step, generate_network, simulate_agents, GeneratedBenchmark};
