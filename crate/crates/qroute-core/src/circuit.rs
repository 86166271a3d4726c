//! Two-qubit-gate circuits, their dependency structure and layer schedules.
//!
//! A circuit is an ordered sequence of two-qubit gates; single-qubit gates,
//! parameters and measurements are not modelled.  The dependency DAG links
//! each gate to the most recent earlier gate on each of its qubits, which is
//! all the structure a router needs: the front layer, the extended set and
//! the ASAP layer schedule are derived from it.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type GateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Original,
    InsertedSwap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gate {
    pub id: GateId,
    pub q1: u32,
    pub q2: u32,
    pub kind: GateKind,
}

impl Gate {
    pub fn qubits(&self) -> [u32; 2] {
        [self.q1, self.q2]
    }

    /// Canonical unordered pair (smaller qubit first).
    pub fn pair(&self) -> (u32, u32) {
        if self.q1 <= self.q2 {
            (self.q1, self.q2)
        } else {
            (self.q2, self.q1)
        }
    }
}

/// An ordered sequence of two-qubit gates on `num_qubits` qubits.
///
/// Gate ids are assigned sequentially at construction, so `gates()[i].id == i`
/// and ids are monotonically increasing in application order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Build a circuit of original gates from qubit pairs, in application order.
    pub fn new(num_qubits: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        Self::from_kinds(
            num_qubits,
            pairs
                .into_iter()
                .map(|(a, b)| (a, b, GateKind::Original)),
        )
    }

    /// Build a circuit from (q1, q2, kind) triples, in application order.
    pub fn from_kinds(
        num_qubits: usize,
        items: impl IntoIterator<Item = (u32, u32, GateKind)>,
    ) -> Result<Self> {
        let mut gates = Vec::new();
        for (id, (q1, q2, kind)) in items.into_iter().enumerate() {
            if q1 == q2 {
                return Err(Error::InvalidCircuit(format!(
                    "gate {id} acts twice on qubit {q1}"
                )));
            }
            if q1 as usize >= num_qubits || q2 as usize >= num_qubits {
                return Err(Error::InvalidCircuit(format!(
                    "gate {id} on ({q1}, {q2}) exceeds qubit count {num_qubits}"
                )));
            }
            gates.push(Gate { id, q1, q2, kind });
        }
        Ok(Self { num_qubits, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of original (non-SWAP) gates; the G of the overhead ratios.
    pub fn original_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| g.kind == GateKind::Original)
            .count()
    }

    pub fn swap_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| g.kind == GateKind::InsertedSwap)
            .count()
    }

    /// Line-oriented text form: `qubits N` header, then `tqg q1 q2` or
    /// `swap q1 q2` per gate in application order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "qubits {}", self.num_qubits).unwrap();
        for g in &self.gates {
            let word = match g.kind {
                GateKind::Original => "tqg",
                GateKind::InsertedSwap => "swap",
            };
            writeln!(out, "{} {} {}", word, g.q1, g.q2).unwrap();
        }
        out
    }

    /// Parse the text form produced by [`Circuit::to_text`].  Blank lines and
    /// lines starting with `#` are ignored.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut num_qubits: Option<usize> = None;
        let mut items = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let word = parts.next().unwrap();
            match (word, num_qubits) {
                ("qubits", None) => {
                    let n = parts
                        .next()
                        .ok_or_else(|| Error::Parse {
                            line,
                            msg: "missing qubit count".into(),
                        })?
                        .parse::<usize>()
                        .map_err(|e| Error::Parse {
                            line,
                            msg: format!("bad qubit count: {e}"),
                        })?;
                    num_qubits = Some(n);
                }
                ("qubits", Some(_)) => {
                    return Err(Error::Parse {
                        line,
                        msg: "duplicate qubits header".into(),
                    })
                }
                (word @ ("tqg" | "swap"), Some(_)) => {
                    let mut qubit = || -> Result<u32> {
                        parts
                            .next()
                            .ok_or_else(|| Error::Parse {
                                line,
                                msg: "missing qubit index".into(),
                            })?
                            .parse::<u32>()
                            .map_err(|e| Error::Parse {
                                line,
                                msg: format!("bad qubit index: {e}"),
                            })
                    };
                    let q1 = qubit()?;
                    let q2 = qubit()?;
                    let kind = if word == "tqg" {
                        GateKind::Original
                    } else {
                        GateKind::InsertedSwap
                    };
                    items.push((q1, q2, kind));
                }
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unexpected line: {trimmed}"),
                    })
                }
            }
        }
        let num_qubits = num_qubits.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing qubits header".into(),
        })?;
        Self::from_kinds(num_qubits, items)
    }
}

/// Predecessor/successor links per gate, aligned to the gate's qubit slots:
/// entry 0 is the link through q1, entry 1 through q2.  A predecessor is the
/// most recent earlier gate touching that qubit.
#[derive(Debug, Clone)]
pub struct DependencyDag {
    preds: Vec<[Option<GateId>; 2]>,
    succs: Vec<[Option<GateId>; 2]>,
}

impl DependencyDag {
    pub fn num_gates(&self) -> usize {
        self.preds.len()
    }

    /// Distinct predecessors of `gate` (0, 1 or 2 of them).
    pub fn predecessors(&self, gate: GateId) -> impl Iterator<Item = GateId> + '_ {
        distinct_links(&self.preds[gate])
    }

    /// Distinct successors of `gate`.
    pub fn successors(&self, gate: GateId) -> impl Iterator<Item = GateId> + '_ {
        distinct_links(&self.succs[gate])
    }

    pub fn pred_count(&self, gate: GateId) -> usize {
        self.predecessors(gate).count()
    }

    /// Gates with no predecessors, in id order.
    pub fn first_layer(&self) -> Vec<GateId> {
        (0..self.num_gates())
            .filter(|&g| self.preds[g] == [None, None])
            .collect()
    }
}

fn distinct_links(links: &[Option<GateId>; 2]) -> impl Iterator<Item = GateId> + '_ {
    links
        .iter()
        .enumerate()
        .filter_map(|(slot, link)| match (slot, link) {
            (0, Some(g)) => Some(*g),
            // Skip the second slot when it duplicates the first.
            (1, Some(g)) if links[0] != Some(*g) => Some(*g),
            _ => None,
        })
}

/// Link every gate to the most recent earlier gate on each of its qubits.
pub fn build_dag(circuit: &Circuit) -> DependencyDag {
    let n = circuit.num_qubits();
    let mut last_on: Vec<Option<(GateId, usize)>> = vec![None; n];
    let mut preds = vec![[None, None]; circuit.len()];
    let mut succs = vec![[None, None]; circuit.len()];
    for gate in circuit.gates() {
        for (slot, q) in gate.qubits().into_iter().enumerate() {
            if let Some((pred, pred_slot)) = last_on[q as usize] {
                preds[gate.id][slot] = Some(pred);
                succs[pred][pred_slot] = Some(gate.id);
            }
            last_on[q as usize] = Some((gate.id, slot));
        }
    }
    DependencyDag { preds, succs }
}

/// ASAP layer assignment: layer(g) = 1 + max layer over predecessors.
///
/// Minimal for two-qubit-gate-only circuits because the DAG carries every
/// resource conflict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSchedule {
    layers: Vec<u32>,
    depth: usize,
}

impl LayerSchedule {
    /// 1-based layer index of a gate.
    pub fn layer_of(&self, gate: GateId) -> u32 {
        self.layers[gate]
    }

    pub fn layers(&self) -> &[u32] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

pub fn compute_layers(circuit: &Circuit) -> LayerSchedule {
    let mut avail: Vec<u32> = vec![0; circuit.num_qubits()];
    let mut layers = Vec::with_capacity(circuit.len());
    let mut depth = 0u32;
    for gate in circuit.gates() {
        let layer = 1 + avail[gate.q1 as usize].max(avail[gate.q2 as usize]);
        avail[gate.q1 as usize] = layer;
        avail[gate.q2 as usize] = layer;
        depth = depth.max(layer);
        layers.push(layer);
    }
    LayerSchedule {
        layers,
        depth: depth as usize,
    }
}

/// Unexecuted gates whose predecessors are all executed, in id order.
///
/// Rejects executed sets that are not downward-closed in the DAG.
pub fn front_layer(dag: &DependencyDag, executed: &HashSet<GateId>) -> Result<Vec<GateId>> {
    for &g in executed {
        if g >= dag.num_gates() {
            return Err(Error::InvalidCircuit(format!(
                "executed gate {g} does not exist"
            )));
        }
        for pred in dag.predecessors(g) {
            if !executed.contains(&pred) {
                return Err(Error::NotDownwardClosed { gate: g, pred });
            }
        }
    }
    Ok((0..dag.num_gates())
        .filter(|g| !executed.contains(g))
        .filter(|&g| dag.predecessors(g).all(|p| executed.contains(&p)))
        .collect())
}
