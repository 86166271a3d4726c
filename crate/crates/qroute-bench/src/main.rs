use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use qroute_bench::config::{
    Connectivity, ExperimentConfig, NoiseConfig, RouterKind, SabreKnobs, SweepMode,
};
use qroute_bench::crossover::{crossover_grid, CrossoverGrid};
use qroute_bench::report::write_series;
use qroute_bench::runner::{
    read_aggregates_csv, read_records_csv, run_experiment, write_csv, write_outputs, RunRecord,
};
use qroute_bench::seeds::{child_seed, SeedStream};
use qroute_core::circuit::{compute_layers, Circuit};
use qroute_core::fitting::{fit, CurveModel, FitKind};
use qroute_core::generate::{random_circuit, GenSpec};
use qroute_core::layout::Layout;
use qroute_core::metrics::{ExecutionStats, NoiseParams};
use qroute_core::naive::route_naive;
use qroute_core::sabre::route;

#[derive(Parser)]
#[command(
    name = "qroute",
    about = "Qubit-routing benchmark: generate circuits, route them, and reproduce the scaling analysis"
)]
struct Cli {
    /// Worker threads for ensemble runs (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random two-qubit-gate circuit.
    Gen {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        gates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Route one circuit file onto a device and report its stats record.
    Route {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        connectivity: String,
        /// Device qubit count (default: the circuit's own).
        #[arg(long)]
        qubits: Option<usize>,
        #[arg(long)]
        heuristic: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lookahead weight W.
        #[arg(long)]
        w: Option<f64>,
        #[arg(long)]
        extended_size: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        /// Initial layout: "random" (seeded) or "identity".
        #[arg(long, default_value = "random")]
        layout: String,
        /// Routed circuit file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stats record file (default: stdout).
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Run the ensemble protocol over a qubit-count sweep.
    Bench(SweepArgs),
    /// Run the ensemble protocol over a gate-count sweep at fixed N.
    Gsweep(GsweepArgs),
    /// Fit one scaling model to an aggregate CSV.
    Fit {
        /// aggregate.csv produced by bench or gsweep.
        #[arg(long)]
        input: PathBuf,
        /// swap-1d | swap-2d | depth-1d | depth-2d | fidelity
        #[arg(long)]
        model: String,
        #[arg(long)]
        connectivity: String,
        #[arg(long)]
        heuristic: String,
    },
    /// Locate fidelity crossovers over a (f, f_idling) grid.
    Crossover(CrossoverArgs),
    /// Render an aggregate CSV into per-heuristic series files.
    Report {
        /// aggregate.csv path, or a directory containing one.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Key-value config file (TOML); flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    connectivity: Option<String>,
    /// Comma list ("10,20,30") or range ("10:100:10").
    #[arg(long)]
    qubits: Option<String>,
    #[arg(long)]
    circuits: Option<usize>,
    /// G = gate_factor * N.
    #[arg(long)]
    gate_factor: Option<usize>,
    /// Comma list of heuristics (default: all five).
    #[arg(long)]
    heuristics: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    sabre: SabreArgs,
}

#[derive(Args)]
struct GsweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    connectivity: Option<String>,
    /// Fixed device size.
    #[arg(long)]
    qubits: Option<usize>,
    /// Comma list of gate counts ("200,500,1000,2000").
    #[arg(long)]
    gates: Option<String>,
    #[arg(long)]
    circuits: Option<usize>,
    #[arg(long)]
    heuristics: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    sabre: SabreArgs,
}

#[derive(Args)]
struct CrossoverArgs {
    /// records.csv from a previous run; when absent, a fresh ensemble runs.
    #[arg(long)]
    records: Option<PathBuf>,
    #[arg(long)]
    connectivity: Option<String>,
    #[arg(long)]
    qubits: Option<String>,
    #[arg(long)]
    circuits: Option<usize>,
    #[arg(long)]
    gate_factor: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "basic-decay")]
    heuristic_a: String,
    #[arg(long, default_value = "lookahead-decay")]
    heuristic_b: String,
    /// Comma list of TQG fidelities (grid rows).
    #[arg(long, default_value = "0.9998,0.9999,0.99995")]
    f_grid: String,
    /// Comma list of idling fidelities (grid columns).
    #[arg(long, default_value = "0.99993,0.99995,0.99999")]
    f_idling_grid: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long)]
    tqg_fidelity: Option<f64>,
    /// Two-qubit-gate duration in nanoseconds.
    #[arg(long)]
    tqg_duration_ns: Option<f64>,
    /// Relaxation time in microseconds.
    #[arg(long)]
    t1_us: Option<f64>,
    /// TQG-equivalents per SWAP.
    #[arg(long)]
    swap_cost: Option<u32>,
}

#[derive(Args)]
struct SabreArgs {
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    extended_size: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    decay_reset: Option<usize>,
}

/// Optional entries of the key-value config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    connectivity: Option<String>,
    qubits: Option<Vec<usize>>,
    gates: Option<Vec<usize>>,
    circuits: Option<usize>,
    gate_factor: Option<usize>,
    heuristics: Option<Vec<String>>,
    seed: Option<u64>,
    tqg_fidelity: Option<f64>,
    tqg_duration_ns: Option<f64>,
    t1_us: Option<f64>,
    swap_cost: Option<u32>,
    lookahead_weight: Option<f64>,
    extended_set_size: Option<usize>,
    decay_delta: Option<f64>,
    decay_reset_interval: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path with status 0.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_class(&e))
        }
    }
}

/// 1 for configuration/input problems, 2 for runtime failures.
fn exit_class(err: &anyhow::Error) -> u8 {
    use qroute_core::Error as E;
    match err.downcast_ref::<E>() {
        Some(
            E::InvalidConfig(_)
            | E::InvalidCircuit(_)
            | E::InvalidGraph(_)
            | E::InvalidLayout(_)
            | E::Parse { .. }
            | E::CircuitTooLarge { .. }
            | E::DegenerateData(_),
        ) => 1,
        Some(_) => 2,
        None => {
            if err.downcast_ref::<std::io::Error>().is_some() {
                2
            } else {
                1
            }
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Gen {
            qubits,
            gates,
            seed,
            out,
        } => {
            let circuit = random_circuit(&GenSpec {
                num_qubits: qubits,
                num_gates: gates,
                seed,
            })?;
            fs::write(&out, circuit.to_text())
                .with_context(|| format!("writing {}", out.display()))?;
            Ok(())
        }
        Command::Route {
            circuit,
            connectivity,
            qubits,
            heuristic,
            seed,
            w,
            extended_size,
            delta,
            layout,
            out,
            stats,
        } => {
            let text = fs::read_to_string(&circuit)
                .with_context(|| format!("reading {}", circuit.display()))?;
            let parsed = Circuit::parse_text(&text)?;
            let connectivity = Connectivity::from_str(&connectivity)?;
            let n = qubits.unwrap_or(parsed.num_qubits());
            let graph = connectivity.build(n)?;
            let router = RouterKind::from_str(&heuristic)?;
            let initial = match layout.as_str() {
                "identity" => Layout::identity(n),
                "random" => {
                    use rand::SeedableRng;
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(child_seed(
                        seed,
                        0,
                        0,
                        SeedStream::Layout,
                    ));
                    Layout::random(n, &mut rng)
                }
                other => bail!(qroute_core::Error::InvalidConfig(format!(
                    "unknown layout {other}"
                ))),
            };
            let routed = match router.variant() {
                Some(variant) => {
                    let mut knobs = SabreKnobs::default();
                    if let Some(w) = w {
                        knobs.lookahead_weight = w;
                    }
                    if let Some(k) = extended_size {
                        knobs.extended_set_size = k;
                    }
                    if let Some(d) = delta {
                        knobs.decay_delta = d;
                    }
                    route(
                        &parsed,
                        &graph,
                        &initial,
                        &knobs.heuristic_config(variant),
                        child_seed(seed, 0, 0, SeedStream::Route),
                    )?
                }
                None => route_naive(&parsed, &graph, &initial)?,
            };
            let noise = NoiseParams::default();
            let exec = ExecutionStats::from_routed(&routed, &noise);
            let record = RunRecord {
                n,
                g: parsed.len(),
                s: routed.swap_count,
                depth_original: compute_layers(&parsed).depth(),
                depth_routed: routed.routed_depth,
                g_tilde: exec.total_tqgs,
                fidelity: exec.fidelity,
                log_fidelity: exec.log_fidelity,
                heuristic: router,
                connectivity,
                seed,
            };
            let circuit_text = routed.circuit.to_text();
            match out {
                Some(path) => fs::write(&path, circuit_text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{circuit_text}"),
            }
            let record_json = serde_json::to_string_pretty(&record)?;
            match stats {
                Some(path) => fs::write(&path, record_json + "\n")
                    .with_context(|| format!("writing {}", path.display()))?,
                None => println!("{record_json}"),
            }
            Ok(())
        }
        Command::Bench(args) => {
            let (config, out) = bench_config(args)?;
            let output = run_experiment(&config)?;
            write_outputs(&out, &config, &output)?;
            println!(
                "wrote {} records over {} points to {}",
                output.records.len(),
                config.points().len(),
                out.display()
            );
            Ok(())
        }
        Command::Gsweep(args) => {
            let (config, out) = gsweep_config(args)?;
            let output = run_experiment(&config)?;
            write_outputs(&out, &config, &output)?;
            println!(
                "wrote {} records over {} gate counts to {}",
                output.records.len(),
                config.points().len(),
                out.display()
            );
            Ok(())
        }
        Command::Fit {
            input,
            model,
            connectivity,
            heuristic,
        } => {
            let connectivity = Connectivity::from_str(&connectivity)?;
            let heuristic = RouterKind::from_str(&heuristic)?;
            let kind = parse_fit_kind(&model)?;
            let aggregates = read_aggregates_csv(&input)?;
            let data: Vec<(f64, f64)> = aggregates
                .iter()
                .filter(|r| r.connectivity == connectivity && r.heuristic == heuristic)
                .map(|r| {
                    let y = match kind {
                        FitKind::Swap1d | FitKind::Swap2d => Ok(r.swaps_per_gate_mean),
                        FitKind::Depth1d | FitKind::Depth2d => Ok(r.depth_per_gate_mean),
                        FitKind::Fidelity => {
                            let log_mean = r.fidelity_mean.ln();
                            if log_mean.is_finite() {
                                Ok(log_mean)
                            } else {
                                Err(anyhow!(
                                    "mean fidelity underflowed at N = {}; fit from records instead",
                                    r.n
                                ))
                            }
                        }
                    }?;
                    Ok((r.n as f64, y))
                })
                .collect::<anyhow::Result<_>>()?;
            let result = fit(kind, &data)?;
            println!("{}", fit_json(&model, &result.model, result.r_squared));
            Ok(())
        }
        Command::Crossover(args) => {
            let a = RouterKind::from_str(&args.heuristic_a)?;
            let b = RouterKind::from_str(&args.heuristic_b)?;
            let records: Vec<RunRecord> = match &args.records {
                Some(path) => read_records_csv(path)?
                    .into_iter()
                    .filter(|r| r.heuristic == a || r.heuristic == b)
                    .collect(),
                None => {
                    let connectivity =
                        Connectivity::from_str(args.connectivity.as_deref().unwrap_or("square"))?;
                    let qubit_counts = parse_count_list(
                        args.qubits.as_deref().unwrap_or("10:100:10"),
                    )?;
                    let config = ExperimentConfig {
                        connectivity,
                        mode: SweepMode::QubitSweep {
                            qubit_counts,
                            gate_factor: args.gate_factor.unwrap_or(10),
                        },
                        circuits_per_point: args.circuits.unwrap_or(20),
                        routers: vec![a, b],
                        noise: NoiseConfig::default(),
                        base_seed: args.seed.unwrap_or(1),
                        sabre: SabreKnobs::default(),
                    };
                    run_experiment(&config)?.records
                }
            };
            if records.is_empty() {
                bail!(qroute_core::Error::InvalidConfig(
                    "no records for the requested heuristics".into()
                ));
            }
            let counts: Vec<u32> = records.iter().map(|r| r.n as u32).collect();
            let grid = CrossoverGrid {
                tqg_fidelities: parse_f64_list(&args.f_grid)?,
                idling_fidelities: parse_f64_list(&args.f_idling_grid)?,
                n_lo: counts.iter().copied().min().unwrap(),
                n_hi: counts.iter().copied().max().unwrap(),
            };
            let cells = crossover_grid(&records, a, b, &grid)?;
            write_csv(&args.out, &cells)?;
            println!("wrote {} grid cells to {}", cells.len(), args.out.display());
            Ok(())
        }
        Command::Report { input, out } => {
            let path = if input.is_dir() {
                input.join("aggregate.csv")
            } else {
                input
            };
            let aggregates = read_aggregates_csv(&path)?;
            fs::create_dir_all(&out)
                .with_context(|| format!("creating {}", out.display()))?;
            let files = write_series(&out, &aggregates)?;
            println!("wrote {} series files to {}", files.len(), out.display());
            Ok(())
        }
    }
}

fn load_file_config(path: Option<&PathBuf>) -> anyhow::Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).map_err(|e| {
                anyhow!(qroute_core::Error::InvalidConfig(format!(
                    "{}: {e}",
                    path.display()
                )))
            })
        }
    }
}

fn merged_noise(file: &FileConfig, flags: &NoiseArgs) -> NoiseConfig {
    let defaults = NoiseParams::default();
    NoiseConfig {
        tqg_fidelity: flags
            .tqg_fidelity
            .or(file.tqg_fidelity)
            .unwrap_or(defaults.tqg_fidelity),
        tqg_duration: flags
            .tqg_duration_ns
            .or(file.tqg_duration_ns)
            .map(|ns| ns * 1e-9)
            .unwrap_or(defaults.tqg_duration),
        t1: flags
            .t1_us
            .or(file.t1_us)
            .map(|us| us * 1e-6)
            .unwrap_or(defaults.t1),
        swap_gate_cost: flags
            .swap_cost
            .or(file.swap_cost)
            .unwrap_or(defaults.swap_gate_cost),
    }
}

fn merged_sabre(file: &FileConfig, flags: &SabreArgs) -> SabreKnobs {
    let defaults = SabreKnobs::default();
    SabreKnobs {
        lookahead_weight: flags
            .w
            .or(file.lookahead_weight)
            .unwrap_or(defaults.lookahead_weight),
        extended_set_size: flags
            .extended_size
            .or(file.extended_set_size)
            .unwrap_or(defaults.extended_set_size),
        decay_delta: flags
            .delta
            .or(file.decay_delta)
            .unwrap_or(defaults.decay_delta),
        decay_reset_interval: flags
            .decay_reset
            .or(file.decay_reset_interval)
            .unwrap_or(defaults.decay_reset_interval),
    }
}

fn merged_routers(
    file: &FileConfig,
    flag: Option<&str>,
) -> anyhow::Result<Vec<RouterKind>> {
    let parse_all = |names: Vec<String>| -> anyhow::Result<Vec<RouterKind>> {
        names
            .iter()
            .map(|s| RouterKind::from_str(s).map_err(Into::into))
            .collect()
    };
    match (flag, &file.heuristics) {
        (Some(list), _) => parse_all(list.split(',').map(|s| s.trim().to_string()).collect()),
        (None, Some(names)) => parse_all(names.clone()),
        (None, None) => Ok(RouterKind::ALL.to_vec()),
    }
}

fn bench_config(args: SweepArgs) -> anyhow::Result<(ExperimentConfig, PathBuf)> {
    let file = load_file_config(args.config.as_ref())?;
    let qubit_counts = match (&args.qubits, &file.qubits) {
        (Some(spec), _) => parse_count_list(spec)?,
        (None, Some(list)) => list.clone(),
        (None, None) => (1..=20).map(|i| 10 * i).collect(),
    };
    let config = ExperimentConfig {
        connectivity: Connectivity::from_str(
            args.connectivity
                .as_deref()
                .or(file.connectivity.as_deref())
                .unwrap_or("path"),
        )?,
        mode: SweepMode::QubitSweep {
            qubit_counts,
            gate_factor: args.gate_factor.or(file.gate_factor).unwrap_or(10),
        },
        circuits_per_point: args.circuits.or(file.circuits).unwrap_or(50),
        routers: merged_routers(&file, args.heuristics.as_deref())?,
        noise: merged_noise(&file, &args.noise),
        base_seed: args.seed.or(file.seed).unwrap_or(1),
        sabre: merged_sabre(&file, &args.sabre),
    };
    Ok((config, args.out))
}

fn gsweep_config(args: GsweepArgs) -> anyhow::Result<(ExperimentConfig, PathBuf)> {
    let file = load_file_config(args.config.as_ref())?;
    let num_qubits = args
        .qubits
        .or_else(|| file.qubits.as_ref().and_then(|q| q.first().copied()))
        .unwrap_or(100);
    let gate_counts = match (&args.gates, &file.gates) {
        (Some(spec), _) => parse_count_list(spec)?,
        (None, Some(list)) => list.clone(),
        (None, None) => vec![2, 5, 10, 20]
            .into_iter()
            .map(|k| k * num_qubits)
            .collect(),
    };
    let config = ExperimentConfig {
        connectivity: Connectivity::from_str(
            args.connectivity
                .as_deref()
                .or(file.connectivity.as_deref())
                .unwrap_or("path"),
        )?,
        mode: SweepMode::GateSweep {
            num_qubits,
            gate_counts,
        },
        circuits_per_point: args.circuits.or(file.circuits).unwrap_or(50),
        routers: merged_routers(&file, args.heuristics.as_deref())?,
        noise: merged_noise(&file, &args.noise),
        base_seed: args.seed.or(file.seed).unwrap_or(1),
        sabre: merged_sabre(&file, &args.sabre),
    };
    Ok((config, args.out))
}

/// "10,20,30" or "lo:hi:step".
fn parse_count_list(spec: &str) -> anyhow::Result<Vec<usize>> {
    let invalid = |msg: String| anyhow!(qroute_core::Error::InvalidConfig(msg));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid(format!("range must be lo:hi:step, got {spec}")));
        }
        let lo: usize = parts[0].parse().map_err(|e| invalid(format!("{e}")))?;
        let hi: usize = parts[1].parse().map_err(|e| invalid(format!("{e}")))?;
        let step: usize = parts[2].parse().map_err(|e| invalid(format!("{e}")))?;
        if step == 0 || hi < lo {
            return Err(invalid(format!("bad range {spec}")));
        }
        Ok((lo..=hi).step_by(step).collect())
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|e| invalid(format!("{e}"))))
            .collect()
    }
}

fn parse_f64_list(spec: &str) -> anyhow::Result<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|e| {
                anyhow!(qroute_core::Error::InvalidConfig(format!("{e}: {s}")))
            })
        })
        .collect()
}

fn parse_fit_kind(name: &str) -> anyhow::Result<FitKind> {
    match name {
        "swap-1d" => Ok(FitKind::Swap1d),
        "swap-2d" => Ok(FitKind::Swap2d),
        "depth-1d" => Ok(FitKind::Depth1d),
        "depth-2d" => Ok(FitKind::Depth2d),
        "fidelity" => Ok(FitKind::Fidelity),
        other => Err(anyhow!(qroute_core::Error::InvalidConfig(format!(
            "unknown model {other}"
        )))),
    }
}

fn fit_json(name: &str, model: &CurveModel, r_squared: f64) -> String {
    let params = match *model {
        CurveModel::SwapPower {
            amplitude, offset, ..
        } => serde_json::json!({"A": amplitude, "C": offset}),
        CurveModel::DepthLog1d { amplitude } => serde_json::json!({"A": amplitude}),
        CurveModel::DepthLog2d { amplitude, offset } => {
            serde_json::json!({"A": amplitude, "C": offset})
        }
        CurveModel::FidelityExp {
            scale,
            base,
            rate,
            exponent,
        } => serde_json::json!({"A": scale, "B": base, "C": rate, "D": exponent}),
    };
    serde_json::to_string_pretty(&serde_json::json!({
        "model": name,
        "parameters": params,
        "r_squared": r_squared,
    }))
    .expect("json encoding cannot fail")
}
