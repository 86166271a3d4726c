//! Ensemble experiment driver: generate, route, measure, aggregate, write.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qroute_core::circuit::compute_layers;
use qroute_core::generate::{random_circuit, GenSpec};
use qroute_core::layout::Layout;
use qroute_core::metrics::{ExecutionStats, NoiseParams};
use qroute_core::naive::route_naive;
use qroute_core::sabre::route;
use qroute_core::{Error, Result};

use crate::config::{Connectivity, ExperimentConfig, RouterKind};
use crate::seeds::{child_seed, SeedStream};

/// One routed circuit, in the shared record schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub n: usize,
    pub g: usize,
    pub s: usize,
    pub depth_original: usize,
    pub depth_routed: usize,
    pub g_tilde: usize,
    pub fidelity: f64,
    pub log_fidelity: f64,
    pub heuristic: RouterKind,
    pub connectivity: Connectivity,
    pub seed: u64,
}

impl RunRecord {
    /// Idle layer slots n * depth - 2 * gates; the quantity the idling
    /// fidelity acts on once per slot.
    pub fn idle_slots(&self) -> f64 {
        (self.n * self.depth_routed) as f64 - 2.0 * (self.g + self.s) as f64
    }
}

/// Per-(connectivity, heuristic, N, G) summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub connectivity: Connectivity,
    pub heuristic: RouterKind,
    pub n: usize,
    pub g: usize,
    pub runs: usize,
    pub swaps_per_gate_mean: f64,
    pub swaps_per_gate_std: f64,
    pub depth_per_gate_mean: f64,
    pub depth_per_gate_std: f64,
    pub fidelity_mean: f64,
    pub fidelity_std: f64,
    pub log_fidelity_mean: f64,
    pub log_fidelity_std: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<AggregateRow>,
}

/// Run the full protocol: for every sweep point and circuit index, draw a
/// circuit and a random initial layout from deterministic child seeds, route
/// with every configured router, and measure.  All routers share the circuit
/// and layout of their (point, index), so comparisons are paired.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let noise = NoiseParams::from(config.noise);
    let points = config.points();

    let tasks: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..config.circuits_per_point).map(move |i| (p, i)))
        .collect();

    let mut keyed: Vec<(usize, usize, usize, RunRecord)> = tasks
        .par_iter()
        .map(|&(point_idx, circuit_idx)| -> Result<Vec<_>> {
            let (n, g) = points[point_idx];
            // The varying sweep parameter keys the seed, so duplicate points
            // reproduce identical rows and reordering the sweep moves nothing.
            let point_key = match &config.mode {
                crate::config::SweepMode::QubitSweep { .. } => n,
                crate::config::SweepMode::GateSweep { .. } => g,
            };
            let circuit = random_circuit(&GenSpec {
                num_qubits: n,
                num_gates: g,
                seed: child_seed(config.base_seed, point_key, circuit_idx, SeedStream::Circuit),
            })?;
            let graph = config.connectivity.build(n)?;
            let mut layout_rng = ChaCha8Rng::seed_from_u64(child_seed(
                config.base_seed,
                point_key,
                circuit_idx,
                SeedStream::Layout,
            ));
            let layout = Layout::random(n, &mut layout_rng);
            let route_seed =
                child_seed(config.base_seed, point_key, circuit_idx, SeedStream::Route);
            let depth_original = compute_layers(&circuit).depth();

            let mut out = Vec::with_capacity(config.routers.len());
            for (router_idx, router) in config.routers.iter().enumerate() {
                let routed = match router.variant() {
                    Some(variant) => route(
                        &circuit,
                        &graph,
                        &layout,
                        &config.sabre.heuristic_config(variant),
                        route_seed,
                    ),
                    None => route_naive(&circuit, &graph, &layout),
                }
                .map_err(|e| {
                    Error::Internal(format!(
                        "{} on {} n={n} g={g} circuit {circuit_idx}: {e}",
                        router.name(),
                        config.connectivity.name()
                    ))
                })?;
                let stats = ExecutionStats::from_routed(&routed, &noise);
                out.push((
                    router_idx,
                    point_idx,
                    circuit_idx,
                    RunRecord {
                        n,
                        g,
                        s: routed.swap_count,
                        depth_original,
                        depth_routed: routed.routed_depth,
                        g_tilde: stats.total_tqgs,
                        fidelity: stats.fidelity,
                        log_fidelity: stats.log_fidelity,
                        heuristic: *router,
                        connectivity: config.connectivity,
                        seed: route_seed,
                    },
                ));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    // Merge in a fixed order regardless of worker scheduling.
    keyed.sort_by_key(|&(router_idx, point_idx, circuit_idx, _)| {
        (router_idx, point_idx, circuit_idx)
    });
    let records: Vec<RunRecord> = keyed.into_iter().map(|(_, _, _, r)| r).collect();
    let aggregates = aggregate(&records);
    Ok(RunOutput {
        records,
        aggregates,
    })
}

/// Group records by (connectivity, heuristic, N, G) and summarize.  The
/// fidelity mean is the mean of F itself, evaluated through log-sum-exp so
/// deep circuits cannot underflow it.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut keys: Vec<(Connectivity, RouterKind, usize, usize)> = records
        .iter()
        .map(|r| (r.connectivity, r.heuristic, r.n, r.g))
        .collect();
    keys.sort_unstable();
    keys.dedup();

    keys.into_iter()
        .map(|(connectivity, heuristic, n, g)| {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| {
                    r.connectivity == connectivity
                        && r.heuristic == heuristic
                        && r.n == n
                        && r.g == g
                })
                .collect();
            let swaps: Vec<f64> = group.iter().map(|r| r.s as f64 / r.g as f64).collect();
            let depths: Vec<f64> = group
                .iter()
                .map(|r| r.depth_routed as f64 / r.g as f64)
                .collect();
            let log_fs: Vec<f64> = group.iter().map(|r| r.log_fidelity).collect();
            let fs: Vec<f64> = group.iter().map(|r| r.fidelity).collect();
            let (swap_mean, swap_std) = mean_std(&swaps);
            let (depth_mean, depth_std) = mean_std(&depths);
            let (log_f_mean, log_f_std) = mean_std(&log_fs);
            let (_, f_std) = mean_std(&fs);
            AggregateRow {
                connectivity,
                heuristic,
                n,
                g,
                runs: group.len(),
                swaps_per_gate_mean: swap_mean,
                swaps_per_gate_std: swap_std,
                depth_per_gate_mean: depth_mean,
                depth_per_gate_std: depth_std,
                fidelity_mean: log_mean_exp(&log_fs).exp(),
                fidelity_std: f_std,
                log_fidelity_mean: log_f_mean,
                log_fidelity_std: log_f_std,
            }
        })
        .collect()
}

/// Mean and sample standard deviation (0 for a single value).
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// log of the arithmetic mean of exp(values), stable for very negative logs.
pub fn log_mean_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + (sum / values.len() as f64).ln()
}

/// Write the run to disk: a verbatim config snapshot, one JSONL file per
/// (connectivity, heuristic), a flat CSV of every record, and the aggregate
/// CSV.
pub fn write_outputs(dir: &Path, config: &ExperimentConfig, output: &RunOutput) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Internal(format!("writing outputs: {e}"));
    fs::create_dir_all(dir).map_err(io_err)?;

    let config_json =
        serde_json::to_string_pretty(config).map_err(|e| Error::Internal(e.to_string()))?;
    fs::write(dir.join("config.json"), config_json + "\n").map_err(io_err)?;

    let mut routers: Vec<RouterKind> = output.records.iter().map(|r| r.heuristic).collect();
    routers.sort_unstable();
    routers.dedup();
    for router in routers {
        let path = dir.join(format!(
            "records_{}_{}.jsonl",
            config.connectivity.name(),
            router.name()
        ));
        let mut file = fs::File::create(path).map_err(io_err)?;
        for record in output.records.iter().filter(|r| r.heuristic == router) {
            let line =
                serde_json::to_string(record).map_err(|e| Error::Internal(e.to_string()))?;
            writeln!(file, "{line}").map_err(io_err)?;
        }
    }

    write_csv(&dir.join("records.csv"), &output.records)?;
    write_csv(&dir.join("aggregate.csv"), &output.aggregates)?;
    Ok(())
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| Error::Internal(format!("csv: {e}")))?;
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::Internal(format!("csv: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::Internal(format!("csv: {e}")))?;
    Ok(())
}

pub fn read_records_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| Error::Internal(format!("csv: {e}")))?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<RunRecord>, _>>()
        .map_err(|e| Error::Internal(format!("csv: {e}")))
}

pub fn read_aggregates_csv(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| Error::Internal(format!("csv: {e}")))?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<AggregateRow>, _>>()
        .map_err(|e| Error::Internal(format!("csv: {e}")))
}
