//! Plot-ready series files: one CSV per (connectivity, heuristic) with the
//! x column and the aggregate means and deviations.

use std::path::Path;

use serde::Serialize;

use qroute_core::Result;

use crate::runner::{write_csv, AggregateRow};

#[derive(Debug, Serialize)]
struct SeriesRow {
    n: usize,
    g: usize,
    swaps_per_gate_mean: f64,
    swaps_per_gate_std: f64,
    depth_per_gate_mean: f64,
    depth_per_gate_std: f64,
    fidelity_mean: f64,
    log_fidelity_mean: f64,
}

/// Split the aggregate table into per-(connectivity, heuristic) series files
/// named `series_<connectivity>_<heuristic>.csv`; returns the file names.
pub fn write_series(dir: &Path, aggregates: &[AggregateRow]) -> Result<Vec<String>> {
    let mut groups: Vec<_> = aggregates
        .iter()
        .map(|row| (row.connectivity, row.heuristic))
        .collect();
    groups.sort_unstable();
    groups.dedup();

    let mut written = Vec::new();
    for (connectivity, heuristic) in groups {
        let rows: Vec<SeriesRow> = aggregates
            .iter()
            .filter(|r| r.connectivity == connectivity && r.heuristic == heuristic)
            .map(|r| SeriesRow {
                n: r.n,
                g: r.g,
                swaps_per_gate_mean: r.swaps_per_gate_mean,
                swaps_per_gate_std: r.swaps_per_gate_std,
                depth_per_gate_mean: r.depth_per_gate_mean,
                depth_per_gate_std: r.depth_per_gate_std,
                fidelity_mean: r.fidelity_mean,
                log_fidelity_mean: r.log_fidelity_mean,
            })
            .collect();
        let name = format!("series_{}_{}.csv", connectivity.name(), heuristic.name());
        write_csv(&dir.join(&name), &rows)?;
        written.push(name);
    }
    Ok(written)
}
