//! Independent replay check for routed circuits.
//!
//! Walks the routed circuit gate by gate while tracking the layout, and
//! confirms that every gate sits on a coupling edge, that each original gate
//! executes exactly once on physical qubits hosting its logical pair in a
//! dependency-compatible order, and that the tracked final layout matches
//! the reported one.  It shares only the circuit and layout types with the
//! routers, not their logic, so it can serve as an oracle for them.

use crate::circuit::{build_dag, compute_layers, Circuit, GateKind};
use crate::connectivity::CouplingGraph;
use crate::sabre::RoutedResult;

pub fn verify_routed(
    original: &Circuit,
    graph: &CouplingGraph,
    result: &RoutedResult,
) -> Result<(), String> {
    if result.circuit.num_qubits() != graph.num_qubits() {
        return Err(format!(
            "routed circuit spans {} qubits, device has {}",
            result.circuit.num_qubits(),
            graph.num_qubits()
        ));
    }

    let dag = build_dag(original);
    let mut remaining: Vec<u32> = (0..original.len())
        .map(|g| dag.pred_count(g) as u32)
        .collect();
    let mut ready: Vec<usize> = (0..original.len()).filter(|&g| remaining[g] == 0).collect();
    let mut executed = vec![false; original.len()];
    let mut executed_count = 0usize;
    let mut swaps = 0usize;
    let mut layout = result.initial_layout.clone();

    for gate in result.circuit.gates() {
        if !graph.has_edge(gate.q1, gate.q2) {
            return Err(format!(
                "gate {} acts on ({}, {}), not a coupling edge",
                gate.id, gate.q1, gate.q2
            ));
        }
        match gate.kind {
            GateKind::InsertedSwap => {
                layout.apply_swap(gate.q1, gate.q2);
                swaps += 1;
            }
            GateKind::Original => {
                let la = layout.logical_at(gate.q1);
                let lb = layout.logical_at(gate.q2);
                let pair = (la.min(lb), la.max(lb));
                // Two ready gates can never share a pair: duplicate pairs are
                // chained in the DAG, so the match below is unique.
                let Some(pos) = ready
                    .iter()
                    .position(|&g| original.gates()[g].pair() == pair)
                else {
                    return Err(format!(
                        "routed gate {} executes logical pair {:?} with no matching ready gate",
                        gate.id, pair
                    ));
                };
                let g = ready.swap_remove(pos);
                executed[g] = true;
                executed_count += 1;
                for s in dag.successors(g) {
                    remaining[s] -= 1;
                    if remaining[s] == 0 {
                        ready.push(s);
                    }
                }
            }
        }
    }

    if executed_count != original.len() {
        return Err(format!(
            "only {executed_count} of {} original gates executed",
            original.len()
        ));
    }
    if swaps != result.swap_count {
        return Err(format!(
            "swap_count says {} but the circuit contains {swaps} swaps",
            result.swap_count
        ));
    }
    if layout != result.final_layout {
        return Err("tracked final layout differs from the reported one".into());
    }
    let routed_depth = compute_layers(&result.circuit).depth();
    if routed_depth != result.routed_depth {
        return Err(format!(
            "routed_depth says {} but the schedule gives {routed_depth}",
            result.routed_depth
        ));
    }
    let original_depth = compute_layers(original).depth();
    if routed_depth < original_depth {
        return Err(format!(
            "routed depth {routed_depth} undercuts the original depth {original_depth}"
        ));
    }
    Ok(())
}
