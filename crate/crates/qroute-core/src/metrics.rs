//! Execution-cost metrics: swap count, depth, idle times and the analytic
//! circuit fidelity F = f^G_tilde * prod_q exp(-t_idle^q / T1).
//!
//! Time is layer-quantized: every layer lasts one gate duration and a qubit
//! is busy in a layer exactly when a gate acts on it there.  All fidelity
//! arithmetic happens in log space so that large devices do not underflow.

use crate::circuit::{compute_layers, LayerSchedule};
use crate::error::{Error, Result};
use crate::sabre::RoutedResult;

/// Hardware noise model. The defaults are projected near-term values:
/// two-qubit-gate fidelity 99.99%, gate time 35 ns, relaxation time 700 us.
/// `swap_gate_cost` counts how many TQG-equivalents one SWAP contributes to
/// the gate total (1 by default; 3 models a CNOT decomposition).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub tqg_fidelity: f64,
    pub tqg_duration: f64,
    pub t1: f64,
    pub swap_gate_cost: u32,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            tqg_fidelity: 0.9999,
            tqg_duration: 35e-9,
            t1: 700e-6,
            swap_gate_cost: 1,
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tqg_fidelity > 0.0 && self.tqg_fidelity <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "TQG fidelity must be in (0, 1], got {}",
                self.tqg_fidelity
            )));
        }
        if !(self.tqg_duration > 0.0 && self.t1 > 0.0) {
            return Err(Error::InvalidConfig(
                "gate duration and T1 must be positive".into(),
            ));
        }
        if self.swap_gate_cost == 0 {
            return Err(Error::InvalidConfig("swap gate cost must be >= 1".into()));
        }
        Ok(())
    }

    /// Fidelity assigned to one idle layer slot, exp(-t_gate / T1).
    pub fn idling_fidelity(&self) -> f64 {
        (-self.tqg_duration / self.t1).exp()
    }
}

/// Everything the analytic fidelity needs about one routed circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionStats {
    pub swap_count: usize,
    pub routed_depth: usize,
    /// G_tilde: original gates plus cost-weighted swaps.
    pub total_tqgs: usize,
    /// Seconds of idle time per physical qubit, including untouched qubits.
    pub idle_times: Vec<f64>,
    pub fidelity: f64,
    pub log_fidelity: f64,
}

impl ExecutionStats {
    pub fn from_routed(routed: &RoutedResult, noise: &NoiseParams) -> Self {
        let schedule = compute_layers(&routed.circuit);
        let idle = idle_times(routed, &schedule, noise);
        let total_tqgs = routed.circuit.original_count()
            + noise.swap_gate_cost as usize * routed.swap_count;
        let log_fidelity = log_fidelity(total_tqgs, idle.iter().sum(), noise);
        Self {
            swap_count: routed.swap_count,
            routed_depth: routed.routed_depth,
            total_tqgs,
            idle_times: idle,
            fidelity: log_fidelity.exp(),
            log_fidelity,
        }
    }
}

/// Idle seconds per physical qubit: (depth - busy layers) * gate time.
/// Gates in one layer act on disjoint qubits, so a qubit's busy-layer count
/// equals the number of gates touching it.
pub fn idle_times(
    routed: &RoutedResult,
    schedule: &LayerSchedule,
    noise: &NoiseParams,
) -> Vec<f64> {
    debug_assert_eq!(schedule.layers().len(), routed.circuit.len());
    let n = routed.circuit.num_qubits();
    let mut busy = vec![0usize; n];
    for gate in routed.circuit.gates() {
        busy[gate.q1 as usize] += 1;
        busy[gate.q2 as usize] += 1;
    }
    let depth = schedule.depth();
    busy.into_iter()
        .map(|b| (depth - b) as f64 * noise.tqg_duration)
        .collect()
}

/// F = f^G_tilde * prod_q exp(-t_idle^q / T1), evaluated in log space.
pub fn fidelity(stats: &ExecutionStats, noise: &NoiseParams) -> f64 {
    log_fidelity(stats.total_tqgs, stats.idle_times.iter().sum(), noise).exp()
}

fn log_fidelity(total_tqgs: usize, idle_sum_seconds: f64, noise: &NoiseParams) -> f64 {
    total_tqgs as f64 * noise.tqg_fidelity.ln() - idle_sum_seconds / noise.t1
}

/// Aggregate form of the fidelity used by the crossover sweeps: the per-qubit
/// idle sum is recovered from the slot count n*depth - 2*gbar, which equals
/// the exact sum because every TQG occupies two qubit slots in one layer.
pub fn fidelity_model(n: usize, gbar: usize, depth: usize, noise: &NoiseParams) -> f64 {
    let idle_slots = (n * depth) as f64 - 2.0 * gbar as f64;
    let idle_sum = idle_slots.max(0.0) * noise.tqg_duration;
    log_fidelity(gbar, idle_sum, noise).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::connectivity::build_path;
    use crate::layout::Layout;
    use crate::sabre::{route, HeuristicConfig, Variant};

    fn routed_on_path(n: usize, pairs: Vec<(u32, u32)>) -> RoutedResult {
        let circuit = Circuit::new(n, pairs).unwrap();
        let graph = build_path(n).unwrap();
        route(
            &circuit,
            &graph,
            &Layout::identity(n),
            &HeuristicConfig::new(Variant::Basic),
            0,
        )
        .unwrap()
    }

    #[test]
    fn empty_circuit_is_perfect() {
        let routed = routed_on_path(3, vec![]);
        let noise = NoiseParams::default();
        let stats = ExecutionStats::from_routed(&routed, &noise);
        assert!(stats.idle_times.iter().all(|&t| t == 0.0));
        assert_eq!(stats.fidelity, 1.0);
        assert_eq!(fidelity_model(0, 0, 0, &noise), 1.0);
    }

    #[test]
    fn single_gate_leaves_third_qubit_idle() {
        let routed = routed_on_path(3, vec![(0, 1)]);
        let noise = NoiseParams::default();
        let stats = ExecutionStats::from_routed(&routed, &noise);
        assert_eq!(stats.idle_times, vec![0.0, 0.0, 35e-9]);
        let expected = 0.9999f64.ln() - 35e-9 / 700e-6;
        assert!((stats.log_fidelity - expected).abs() < 1e-15);
        assert!((stats.fidelity - 0.99985).abs() < 1e-4);
    }

    #[test]
    fn gate_error_accumulates_exponentially() {
        let noise = NoiseParams::default();
        // 100 gates on two qubits: no idling, f^100.
        let routed = routed_on_path(2, vec![(0, 1); 100]);
        let stats = ExecutionStats::from_routed(&routed, &noise);
        assert_eq!(stats.total_tqgs, 100);
        assert!(stats.idle_times.iter().all(|&t| t == 0.0));
        assert!((stats.fidelity - 0.990050).abs() < 1e-6);
    }

    #[test]
    fn busy_qubits_have_zero_idle() {
        let routed = routed_on_path(2, vec![(0, 1); 7]);
        let noise = NoiseParams::default();
        let stats = ExecutionStats::from_routed(&routed, &noise);
        assert!(stats.idle_times.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn busy_layer_sum_is_twice_the_gate_count() {
        let routed = routed_on_path(6, vec![(0, 5), (1, 3), (2, 4), (0, 2)]);
        let schedule = compute_layers(&routed.circuit);
        let noise = NoiseParams::default();
        let idle = idle_times(&routed, &schedule, &noise);
        let total_slots = routed.circuit.num_qubits() * schedule.depth();
        let idle_slots: f64 = idle.iter().map(|t| t / noise.tqg_duration).sum();
        let busy_slots = total_slots as f64 - idle_slots;
        assert!((busy_slots - 2.0 * routed.circuit.len() as f64).abs() < 1e-9);
    }

    #[test]
    fn log_space_identity_holds() {
        let routed = routed_on_path(8, vec![(0, 7), (2, 5), (1, 6), (3, 4), (0, 3)]);
        let noise = NoiseParams::default();
        let stats = ExecutionStats::from_routed(&routed, &noise);
        let direct = stats.total_tqgs as f64 * noise.tqg_fidelity.ln()
            - stats.idle_times.iter().sum::<f64>() / noise.t1;
        assert!((stats.log_fidelity - direct).abs() < 1e-12);
        assert!((fidelity(&stats, &noise) - stats.fidelity).abs() < 1e-15);
    }

    #[test]
    fn model_matches_exact_stats_on_routed_circuits() {
        use crate::generate::{random_circuit, GenSpec};
        let noise = NoiseParams::default();
        let graph = build_path(8).unwrap();
        for seed in 0..20 {
            let circuit = random_circuit(&GenSpec {
                num_qubits: 8,
                num_gates: 40,
                seed,
            })
            .unwrap();
            let routed = route(
                &circuit,
                &graph,
                &Layout::identity(8),
                &HeuristicConfig::new(Variant::BasicDecay),
                seed,
            )
            .unwrap();
            let stats = ExecutionStats::from_routed(&routed, &noise);
            let modeled = fidelity_model(8, stats.total_tqgs, stats.routed_depth, &noise);
            assert!(
                (modeled - stats.fidelity).abs() < 1e-12,
                "seed {seed}: {modeled} vs {}",
                stats.fidelity
            );
        }
    }

    #[test]
    fn fidelity_model_is_monotone_in_depth() {
        let noise = NoiseParams::default();
        let mut last = f64::INFINITY;
        for depth in [100, 200, 400, 800] {
            let f = fidelity_model(50, 500, depth, &noise);
            assert!(f <= last);
            last = f;
        }
    }

    #[test]
    fn noise_validation() {
        let bad_fidelity = NoiseParams {
            tqg_fidelity: 0.0,
            ..NoiseParams::default()
        };
        assert!(bad_fidelity.validate().is_err());
        let bad_cost = NoiseParams {
            swap_gate_cost: 0,
            ..NoiseParams::default()
        };
        assert!(bad_cost.validate().is_err());
        assert!(NoiseParams::default().validate().is_ok());
    }
}
