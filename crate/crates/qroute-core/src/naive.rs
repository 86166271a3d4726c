//! Baseline router: gates strictly in sequence order, each resolved by
//! walking the first qubit along one shortest path.  Its per-gate swap cost
//! is the exact graph distance minus one, which makes it the comparison
//! point for the scaling of the heuristic routers.

use crate::circuit::{Circuit, GateKind};
use crate::connectivity::{
    all_pairs_distances, lowest_index_shortest_path, CouplingGraph,
};
use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::sabre::RoutedResult;

pub fn route_naive(
    circuit: &Circuit,
    graph: &CouplingGraph,
    initial_layout: &Layout,
) -> Result<RoutedResult> {
    if circuit.num_qubits() > graph.num_qubits() {
        return Err(Error::CircuitTooLarge {
            circuit: circuit.num_qubits(),
            device: graph.num_qubits(),
        });
    }
    if initial_layout.num_qubits() != graph.num_qubits() {
        return Err(Error::InvalidLayout(format!(
            "layout has {} qubits but the device has {}",
            initial_layout.num_qubits(),
            graph.num_qubits()
        )));
    }
    if circuit.swap_count() > 0 {
        return Err(Error::InvalidCircuit(
            "routing input must not contain inserted swaps".into(),
        ));
    }

    let dist = all_pairs_distances(graph)?;
    let mut layout = initial_layout.clone();
    let mut out: Vec<(u32, u32, GateKind)> = Vec::with_capacity(circuit.len());
    for gate in circuit.gates() {
        let p1 = layout.phys_of(gate.q1);
        let p2 = layout.phys_of(gate.q2);
        if dist.get(p1, p2) > 1 {
            let path = lowest_index_shortest_path(graph, &dist, p1, p2);
            for w in path.windows(2).take(path.len() - 2) {
                layout.apply_swap(w[0], w[1]);
                out.push((w[0], w[1], GateKind::InsertedSwap));
            }
        }
        out.push((
            layout.phys_of(gate.q1),
            layout.phys_of(gate.q2),
            GateKind::Original,
        ));
    }
    RoutedResult::assemble(graph.num_qubits(), out, initial_layout.clone(), layout)
}
