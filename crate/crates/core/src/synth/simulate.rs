use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::net::TemporalNetwork;
use crate::rng::{stream_rng, CounterRng, DOMAIN_AGENT, DOMAIN_EDGE};
use crate::scalar::{cast, Scalar};

use super::edges::sample_snapshot;
use super::potential::PotentialSpec;
use super::scenario::BenchmarkScenario;

/// One Euler-Maruyama update:
/// `x' = x - grad U_t(x) h + sqrt(2 h / beta) * noise`.
pub fn euler_maruyama_step<T: Scalar>(
    x: [T; 2],
    t: T,
    potential: &PotentialSpec<T>,
    inverse_temperature: T,
    step_size: T,
    noise: [T; 2],
) -> Result<[T; 2]> {
    if step_size <= T::zero() || inverse_temperature <= T::zero() {
        return Err(Error::InvalidParameter(
            "step size and inverse temperature must be positive".into(),
        ));
    }
    let gradient = potential.gradient(t, x)?;
    let amplitude = (cast::<T>(2.0) * step_size / inverse_temperature).sqrt();
    let next = [
        x[0] - gradient[0] * step_size + amplitude * noise[0],
        x[1] - gradient[1] * step_size + amplitude * noise[1],
    ];
    if !next[0].is_finite() || !next[1].is_finite() {
        return Err(Error::Numerical("agent position diverged".into()));
    }
    Ok(next)
}

/// Runs the full agent simulation and returns one position frame per
/// recorded step.
///
/// Agents are independent (no interaction forces), so each one evolves on
/// its own seed-derived stream and the agent loop parallelizes without
/// affecting the output. An agent starts at a Gaussian perturbation
/// (sigma = well width) of a uniformly chosen phase-0 well center and is
/// integrated with the potential indexed by step, not wall-clock time, so
/// phase switches are exact.
pub fn simulate_agents<T>(scenario: &BenchmarkScenario<T>) -> Result<Vec<Vec<[T; 2]>>>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
{
    let sim = &scenario.sim;
    let num_steps = sim.num_steps();
    let frame_steps = scenario.frame_steps();
    let start_steps = scenario.phase_start_steps();
    let phase_of_step = |step: usize| -> usize {
        let mut active = 0;
        for (i, &start) in start_steps.iter().enumerate() {
            if start <= step {
                active = i;
            } else {
                break;
            }
        }
        active
    };
    let amplitude = (cast::<T>(2.0) * sim.step_size / sim.inverse_temperature).sqrt();
    let initial_wells = &scenario.potential.phases[0].wells;

    let trajectories: Vec<Result<Vec<[T; 2]>>> = (0..sim.num_agents)
        .into_par_iter()
        .map(|agent| {
            let mut rng = stream_rng(sim.seed, DOMAIN_AGENT, agent as u64);
            let well = &initial_wells[rng.random_range(0..initial_wells.len())];
            let n0: T = StandardNormal.sample(&mut rng);
            let n1: T = StandardNormal.sample(&mut rng);
            let mut x = [
                well.center[0] + well.width * n0,
                well.center[1] + well.width * n1,
            ];
            let mut recorded = Vec::with_capacity(frame_steps.len());
            let mut next_frame = 0;
            if frame_steps[next_frame] == 0 {
                recorded.push(x);
                next_frame += 1;
            }
            for step in 0..num_steps {
                let phase = phase_of_step(step);
                let gradient = scenario.potential.gradient_for_phase(phase, x);
                let g0: T = StandardNormal.sample(&mut rng);
                let g1: T = StandardNormal.sample(&mut rng);
                x = [
                    x[0] - gradient[0] * sim.step_size + amplitude * g0,
                    x[1] - gradient[1] * sim.step_size + amplitude * g1,
                ];
                if !x[0].is_finite() || !x[1].is_finite() {
                    return Err(Error::Diverged { step, agent });
                }
                if next_frame < frame_steps.len() && frame_steps[next_frame] == step + 1 {
                    recorded.push(x);
                    next_frame += 1;
                }
            }
            Ok(recorded)
        })
        .collect();

    let mut per_agent = Vec::with_capacity(sim.num_agents);
    for trajectory in trajectories {
        per_agent.push(trajectory?);
    }
    let mut frames = vec![Vec::with_capacity(sim.num_agents); frame_steps.len()];
    for agent_frames in &per_agent {
        for (frame, &pos) in frames.iter_mut().zip(agent_frames) {
            frame.push(pos);
        }
    }
    Ok(frames)
}

/// A generated benchmark: the temporal network plus the agent frames it
/// was sampled from.
#[derive(Debug, Clone)]
pub struct GeneratedBenchmark<T = f64> {
    pub network: TemporalNetwork,
    pub frames: Vec<Vec<[T; 2]>>,
}

/// Simulates the scenario and samples one network snapshot per frame.
pub fn generate_network<T>(scenario: &BenchmarkScenario<T>) -> Result<GeneratedBenchmark<T>>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
{
    let frames = simulate_agents(scenario)?;
    let snapshots: Vec<_> = frames
        .par_iter()
        .enumerate()
        .map(|(index, frame)| {
            sample_snapshot(
                frame,
                &scenario.edges,
                CounterRng::new(scenario.sim.seed, DOMAIN_EDGE, index as u64),
                index,
                scenario.weighted,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let network = TemporalNetwork::new(
        scenario.name.clone(),
        scenario.weighted,
        Some(scenario.ground_truth.clone()),
        snapshots,
    )?;
    Ok(GeneratedBenchmark { network, frames })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::potential::{PotentialPhase, Well};
    use crate::synth::scenario::{preset, Preset, SimulationConfig};
    use crate::synth::EdgeModel;
    use approx::assert_relative_eq;

    fn flat_scenario(beta: f64, steps: usize, agents: usize) -> BenchmarkScenario<f64> {
        // A negligible well keeps the potential valid while the dynamics stay
        // effectively free diffusion.
        let potential = PotentialSpec::new(
            vec![PotentialPhase {
                start_time: 0.0,
                wells: vec![Well { center: [0.0, 0.0], depth: 1e-300, width: 1.0 }],
            }],
            0.0,
        )
        .unwrap();
        let sim = SimulationConfig {
            num_agents: agents,
            total_time: steps as f64 * 0.01,
            step_size: 0.01,
            sample_stride: steps,
            burn_in: 0,
            inverse_temperature: beta,
            seed: 2024,
        };
        let edges = EdgeModel::new(1.0, 1.0, 1.0, 0.0).unwrap();
        BenchmarkScenario::new("flat", potential, sim, edges, false).unwrap()
    }

    #[test]
    fn deterministic_step_contracts_quadratic() {
        // kappa = 1, no wells: x' = x (1 - h) under zero noise.
        let potential = PotentialSpec::new(
            vec![PotentialPhase {
                start_time: 0.0,
                wells: vec![Well { center: [0.0, 0.0], depth: 1e-300, width: 1.0 }],
            }],
            1.0,
        )
        .unwrap();
        let x = [2.0, -3.0];
        let h = 0.1;
        let next = euler_maruyama_step(x, 0.0, &potential, 1.0, h, [0.0, 0.0]).unwrap();
        assert_relative_eq!(next[0], 2.0 * (1.0 - h), epsilon = 1e-12);
        assert_relative_eq!(next[1], -3.0 * (1.0 - h), epsilon = 1e-12);
    }

    #[test]
    fn vanishing_step_size_freezes_the_state() {
        let potential = PotentialSpec::new(
            vec![PotentialPhase {
                start_time: 0.0,
                wells: vec![Well { center: [0.0, 0.0], depth: 2.0, width: 0.5 }],
            }],
            0.3,
        )
        .unwrap();
        let x = [0.4, 0.9];
        let next = euler_maruyama_step(x, 0.0, &potential, 1.0, 1e-12, [0.7, -0.3]).unwrap();
        assert_relative_eq!(next[0], x[0], epsilon = 1e-5);
        assert_relative_eq!(next[1], x[1], epsilon = 1e-5);
    }

    #[test]
    fn flat_potential_diffusion_variance() {
        // Displacement variance per coordinate after n steps must match
        // 2 h n / beta within 5% over 10^4 agents.
        let beta = 0.8;
        let steps = 50;
        let agents = 10_000;
        let scenario = flat_scenario(beta, steps, agents);
        let frames = simulate_agents(&scenario).unwrap();
        assert_eq!(frames.len(), 2); // frame at step 0 and at step `steps`
        let expected = 2.0 / beta * 0.01 * steps as f64;
        for axis in 0..2 {
            let displacements: Vec<f64> = (0..agents)
                .map(|i| frames[1][i][axis] - frames[0][i][axis])
                .collect();
            let mean = displacements.iter().sum::<f64>() / agents as f64;
            let var = displacements.iter().map(|d| (d - mean).powi(2)).sum::<f64>()
                / agents as f64;
            assert!(
                (var - expected).abs() / expected < 0.05,
                "axis {axis}: variance {var} vs expected {expected}"
            );
        }
    }

    #[test]
    fn split_preset_frame_count() {
        let scenario = preset::<f64>(Preset::CommunitySplit, 7);
        let frames = simulate_agents(&scenario).unwrap();
        assert_eq!(frames.len(), 15);
        assert_eq!(frames[0].len(), 120);
    }

    #[test]
    fn hierarchy_preset_frame_count_and_boundaries() {
        let scenario = preset::<f64>(Preset::CommunityHierarchy, 7);
        assert_eq!(scenario.sim.num_frames(), 210);
        assert_eq!(scenario.ground_truth[63], 0);
        assert_eq!(scenario.ground_truth[64], 1);
        assert_eq!(scenario.ground_truth[135], 1);
        assert_eq!(scenario.ground_truth[136], 2);
    }

    #[test]
    fn same_seed_gives_identical_frames() {
        let scenario = preset::<f64>(Preset::CommunitySplit, 99);
        let a = simulate_agents(&scenario).unwrap();
        let b = simulate_agents(&scenario).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generated_network_carries_ground_truth() {
        let mut scenario = preset::<f64>(Preset::CommunitySplit, 5);
        scenario.sim.num_agents = 30; // keep the test fast
        let generated = generate_network(&scenario).unwrap();
        assert_eq!(generated.network.len(), 15);
        assert_eq!(
            generated.network.ground_truth.as_ref().unwrap().len(),
            15
        );
        assert_eq!(generated.frames.len(), 15);
    }
}
