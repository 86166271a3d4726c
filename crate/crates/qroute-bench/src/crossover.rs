//! Crossover sweep: where one heuristic's fitted mean fidelity overtakes
//! another's, as a function of the gate and idling fidelities.
//!
//! Routing is noise-independent, so one routed ensemble serves the whole
//! grid: each cell recomputes per-record log-fidelities from its (f,
//! f_idling) pair as g_tilde * ln f + idle_slots * ln f_idling, averages
//! them per N in log space, fits both heuristics to the fidelity curve and
//! bisects for the crossover qubit count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qroute_core::fitting::{find_crossover, fit, FitKind, FitResult};
use qroute_core::{Error, Result};

use crate::config::RouterKind;
use crate::runner::{log_mean_exp, RunRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverGrid {
    pub tqg_fidelities: Vec<f64>,
    pub idling_fidelities: Vec<f64>,
    pub n_lo: u32,
    pub n_hi: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverCell {
    pub tqg_fidelity: f64,
    pub idling_fidelity: f64,
    /// Smallest N where heuristic `a` overtakes `b`; empty when it never does.
    pub crossover_n: Option<u32>,
}

/// Fit the mean-fidelity curve of one heuristic under the given noise pair.
pub fn fit_fidelity_curve(
    records: &[RunRecord],
    heuristic: RouterKind,
    tqg_fidelity: f64,
    idling_fidelity: f64,
) -> Result<FitResult> {
    let mut counts: Vec<usize> = records
        .iter()
        .filter(|r| r.heuristic == heuristic)
        .map(|r| r.n)
        .collect();
    counts.sort_unstable();
    counts.dedup();
    let points: Vec<(f64, f64)> = counts
        .into_iter()
        .map(|n| {
            let logs: Vec<f64> = records
                .iter()
                .filter(|r| r.heuristic == heuristic && r.n == n)
                .map(|r| {
                    r.g_tilde as f64 * tqg_fidelity.ln()
                        + r.idle_slots() * idling_fidelity.ln()
                })
                .collect();
            (n as f64, log_mean_exp(&logs))
        })
        .collect();
    fit(FitKind::Fidelity, &points)
}

pub fn crossover_grid(
    records: &[RunRecord],
    a: RouterKind,
    b: RouterKind,
    grid: &CrossoverGrid,
) -> Result<Vec<CrossoverCell>> {
    if grid.tqg_fidelities.is_empty() || grid.idling_fidelities.is_empty() {
        return Err(Error::InvalidConfig("empty crossover grid".into()));
    }
    for &f in grid.tqg_fidelities.iter().chain(&grid.idling_fidelities) {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "grid fidelity {f} outside (0, 1)"
            )));
        }
    }
    let cells: Vec<(f64, f64)> = grid
        .tqg_fidelities
        .iter()
        .flat_map(|&f| grid.idling_fidelities.iter().map(move |&fi| (f, fi)))
        .collect();
    cells
        .par_iter()
        .map(|&(f, f_idling)| {
            let fit_a = fit_fidelity_curve(records, a, f, f_idling)?;
            let fit_b = fit_fidelity_curve(records, b, f, f_idling)?;
            // Fit residuals can nudge the two curves apart at the smallest
            // device sizes, far from the takeover; bisect from the deepest
            // point of the fitted gap instead of the raw lower edge.
            let gap =
                |n: u32| fit_a.model.predict(n as f64) - fit_b.model.predict(n as f64);
            let bracket_lo = (grid.n_lo..grid.n_hi)
                .min_by(|&x, &y| gap(x).total_cmp(&gap(y)))
                .expect("range validated non-empty");
            let crossover_n = if gap(bracket_lo) > 0.0 {
                None
            } else {
                find_crossover(&fit_a, &fit_b, bracket_lo, grid.n_hi)?
            };
            Ok(CrossoverCell {
                tqg_fidelity: f,
                idling_fidelity: f_idling,
                crossover_n,
            })
        })
        .collect()
}
