//! Command-line pipeline for phase detection in temporal networks.
//!
//! Subcommands: `generate` (synthetic benchmarks), `detect` (the LNE/IMC
//! pipeline), `spectrum` (per-snapshot generator spectra), `eval`
//! (ARI/NMI between label files), and `aggregate` (sliding-window
//! contact aggregation). Exit codes: 0 success, 2 validation error,
//! 3 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use phasewalk_core::error::{Error, ErrorKind};
use phasewalk_core::net::{load_temporal_network, save_temporal_network};
use phasewalk_core::pipeline::{self, Method, RunConfig};
use phasewalk_core::spatial::{build_generator, generator_spectrum};
use phasewalk_core::synth::{generate_network, preset, Preset};
use phasewalk_core::{metrics, Scenario};

#[derive(Parser)]
#[command(
    name = "phasewalk",
    about = "Random-walk based phase detection for temporal networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic benchmark dataset from a preset scenario.
    Generate(GenerateArgs),
    /// Detect phases in a temporal network dataset.
    Detect(DetectArgs),
    /// Emit per-snapshot generator spectra.
    Spectrum(SpectrumArgs),
    /// Print ARI and NMI between two label files as JSON.
    Eval(EvalArgs),
    /// Aggregate snapshots over a sliding window.
    Aggregate(AggregateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Preset name: community-split or community-hierarchy.
    #[arg(long)]
    preset: String,
    /// Master seed for the simulation and edge sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Store sampled edge probabilities as weights.
    #[arg(long, default_value_t = false)]
    weighted: bool,
    /// Also write agent positions per snapshot to frames.csv.
    #[arg(long, default_value_t = false)]
    frames: bool,
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Input dataset directory.
    input: PathBuf,
    /// Encoding method: lne (transition matrices) or imc (invariant measures).
    #[arg(long, default_value = "lne")]
    method: String,
    /// Spatial exploration time (auto when omitted; ignored by imc).
    #[arg(long)]
    tau: Option<f64>,
    /// Gaussian kernel bandwidth (auto when omitted).
    #[arg(long)]
    sigma: Option<f64>,
    /// Temporal exploration time (auto from the spectral gap when omitted).
    #[arg(long)]
    tau_temp: Option<f64>,
    /// Number of phases (auto from the eigenvalue gap when omitted).
    #[arg(long)]
    phases: Option<usize>,
    /// Spectral gap index used for automatic tau_temp selection.
    #[arg(long)]
    gap_choice: Option<usize>,
    /// Seed for k-means restarts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Multiplier on the mean degree for the tau heuristic.
    #[arg(long, default_value_t = pipeline::DEFAULT_TAU_RATIO)]
    ratio: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Input dataset directory.
    input: PathBuf,
    /// Eigenvalues per snapshot.
    #[arg(long, default_value_t = 10)]
    num_eigenvalues: usize,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// First label file (JSON array, or an object with a labels or
    /// ground_truth field, or a dataset manifest.json).
    labels_a: PathBuf,
    /// Second label file.
    labels_b: PathBuf,
}

#[derive(Args)]
struct AggregateArgs {
    /// Input dataset directory.
    input: PathBuf,
    /// Snapshots per window.
    #[arg(long)]
    window: usize,
    /// Snapshots between window starts.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err.kind() {
                ErrorKind::Validation => ExitCode::from(2),
                ErrorKind::Numerical => ExitCode::from(3),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Detect(args) => detect(args),
        Command::Spectrum(args) => spectrum(args),
        Command::Eval(args) => eval(args),
        Command::Aggregate(args) => aggregate(args),
    }
}

fn configure_threads(threads: Option<usize>) -> Result<(), Error> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidParameter("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("thread pool setup failed: {e}")))?;
    }
    Ok(())
}

fn write_text(path: &Path, contents: String) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn generate(args: GenerateArgs) -> Result<(), Error> {
    let name: Preset = args.preset.parse()?;
    let mut scenario: Scenario = preset(name, args.seed);
    scenario.weighted = args.weighted;
    let generated = generate_network(&scenario)?;
    save_temporal_network(&generated.network, &args.out)?;

    let scenario_json = serde_json::json!({
        "name": scenario.name,
        "seed": scenario.sim.seed,
        "weighted": scenario.weighted,
        "sim": scenario.sim,
        "potential": {
            "confinement": scenario.potential.confinement,
            "phases": scenario.potential.phases.iter().map(|p| serde_json::json!({
                "start_time": p.start_time,
                "wells": p.wells.iter().map(|w| serde_json::json!({
                    "center": w.center,
                    "depth": w.depth,
                    "width": w.width,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        },
        "edge_model": {
            "xi": scenario.edges.xi,
            "nu": scenario.edges.nu,
            "theta": scenario.edges.theta,
            "omega": scenario.edges.omega,
        },
        "ground_truth": scenario.ground_truth,
    });
    write_text(
        &args.out.join("scenario.json"),
        serde_json::to_string_pretty(&scenario_json).expect("scenario serialize") + "\n",
    )?;

    if args.frames {
        let mut csv = String::from("snapshot,agent,x,y\n");
        for (index, frame) in generated.frames.iter().enumerate() {
            for (agent, pos) in frame.iter().enumerate() {
                csv.push_str(&format!("{index},{agent},{},{}\n", pos[0], pos[1]));
            }
        }
        write_text(&args.out.join("frames.csv"), csv)?;
    }

    let mean_edges = generated
        .network
        .snapshots()
        .iter()
        .map(|s| s.num_edges() as f64)
        .sum::<f64>()
        / generated.network.len() as f64;
    println!(
        "generated {} snapshots of {} nodes (mean edges {:.1}) at {}",
        generated.network.len(),
        generated.network.num_nodes(),
        mean_edges,
        args.out.display()
    );
    Ok(())
}

fn detect(args: DetectArgs) -> Result<(), Error> {
    configure_threads(args.threads)?;
    let net = load_temporal_network(&args.input)?;
    let method: Method = args.method.parse()?;
    let config = RunConfig {
        method,
        tau: args.tau,
        sigma: args.sigma,
        tau_temp: args.tau_temp,
        phases: args.phases,
        gap_choice: args.gap_choice,
        seed: args.seed,
        threads: args.threads,
        tau_ratio: args.ratio,
        kmeans_restarts: pipeline::DEFAULT_KMEANS_RESTARTS,
    };
    let result = pipeline::run(&config, &net)?;
    pipeline::write_outputs(&result, &args.out)?;
    println!(
        "detected {} phases over {} snapshots (sigma {}, tau_temp {}) -> {}",
        result.resolved.phases,
        net.len(),
        result.resolved.sigma,
        result.resolved.tau_temp,
        args.out.display()
    );
    Ok(())
}

fn spectrum(args: SpectrumArgs) -> Result<(), Error> {
    configure_threads(args.threads)?;
    let net = load_temporal_network(&args.input)?;
    let mut reports = Vec::with_capacity(net.len());
    for snapshot in net.snapshots() {
        let generator = build_generator::<f64>(snapshot);
        let m = args.num_eigenvalues.min(net.num_nodes());
        let report = generator_spectrum(&generator, m)?;
        reports.push(serde_json::json!({
            "snapshot": snapshot.index(),
            "eigenvalues": report.eigenvalues,
            // Infinite timescales (repeated zero eigenvalues) become null.
            "implied_timescales": report
                .implied_timescales
                .iter()
                .map(|&t| if t.is_finite() { Some(t) } else { None })
                .collect::<Vec<_>>(),
            "gap_index": report.gap_index,
        }));
    }
    fs::create_dir_all(&args.out).map_err(|e| Error::Io {
        path: args.out.clone(),
        source: e,
    })?;
    write_text(
        &args.out.join("spectrum.json"),
        serde_json::to_string_pretty(&serde_json::json!({ "snapshots": reports }))
            .expect("spectrum serialize")
            + "\n",
    )?;
    println!(
        "wrote spectra for {} snapshots to {}",
        net.len(),
        args.out.join("spectrum.json").display()
    );
    Ok(())
}

/// Accepts a bare JSON array of labels, an object with `labels` or
/// `ground_truth`, or a dataset manifest.
fn read_labels(path: &Path) -> Result<Vec<usize>, Error> {
    let raw = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let value: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| Error::Dataset(format!("{}: invalid JSON: {e}", path.display())))?;
    let array = match &value {
        serde_json::Value::Array(items) => items.clone(),
        serde_json::Value::Object(map) => map
            .get("labels")
            .or_else(|| map.get("ground_truth"))
            .and_then(|v| v.as_array())
            .cloned()
            .ok_or_else(|| {
                Error::Dataset(format!(
                    "{}: expected a labels or ground_truth array",
                    path.display()
                ))
            })?,
        _ => {
            return Err(Error::Dataset(format!(
                "{}: expected a JSON array or object",
                path.display()
            )))
        }
    };
    array
        .iter()
        .map(|v| {
            v.as_u64().map(|x| x as usize).ok_or_else(|| {
                Error::Dataset(format!("{}: labels must be non-negative integers", path.display()))
            })
        })
        .collect()
}

fn eval(args: EvalArgs) -> Result<(), Error> {
    let a = read_labels(&args.labels_a)?;
    let b = read_labels(&args.labels_b)?;
    let ari = metrics::ari(&a, &b)?;
    let nmi = metrics::nmi(&a, &b)?;
    println!(
        "{}",
        serde_json::to_string(&serde_json::json!({ "ari": ari, "nmi": nmi }))
            .expect("metrics serialize")
    );
    Ok(())
}

fn aggregate(args: AggregateArgs) -> Result<(), Error> {
    let net = load_temporal_network(&args.input)?;
    let aggregated = net.aggregate_window(args.window, args.stride)?;
    save_temporal_network(&aggregated, &args.out)?;
    println!(
        "aggregated {} snapshots into {} (window {}, stride {}) -> {}",
        net.len(),
        aggregated.len(),
        args.window,
        args.stride,
        args.out.display()
    );
    Ok(())
}
