//! SWAP insertion with the SABRE heuristic loss function.
//!
//! The loss for a candidate SWAP is the mean post-swap distance over the
//! front layer, optionally plus a weighted mean over an extended lookahead
//! set, optionally multiplied by the larger decay factor of the two swapped
//! qubits.  The four variants select which terms participate; basic+decay
//! keeps only the front-layer term and the decay factor.

use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{
    build_dag, compute_layers, Circuit, DependencyDag, Gate, GateId, GateKind,
};
use crate::connectivity::{all_pairs_distances, CouplingGraph, DistanceMatrix};
use crate::error::{Error, Result};
use crate::layout::Layout;

/// Scores within this tolerance of the minimum count as tied and are broken
/// by the seeded route RNG.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Basic,
    Lookahead,
    LookaheadDecay,
    BasicDecay,
}

impl Variant {
    pub fn uses_lookahead(self) -> bool {
        matches!(self, Variant::Lookahead | Variant::LookaheadDecay)
    }

    pub fn uses_decay(self) -> bool {
        matches!(self, Variant::BasicDecay | Variant::LookaheadDecay)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Basic => "basic",
            Variant::Lookahead => "lookahead",
            Variant::LookaheadDecay => "lookahead-decay",
            Variant::BasicDecay => "basic-decay",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Variant::Basic),
            "lookahead" => Ok(Variant::Lookahead),
            "lookahead-decay" => Ok(Variant::LookaheadDecay),
            "basic-decay" => Ok(Variant::BasicDecay),
            other => Err(Error::InvalidConfig(format!("unknown heuristic {other}"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Router knobs.  `stall_limit` of `None` resolves to 10x the graph diameter
/// at routing time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeuristicConfig {
    pub variant: Variant,
    pub lookahead_weight: f64,
    pub extended_set_size: usize,
    pub decay_delta: f64,
    pub decay_reset_interval: usize,
    pub stall_limit: Option<usize>,
}

impl HeuristicConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            lookahead_weight: 1.0,
            extended_set_size: 20,
            decay_delta: 0.001,
            decay_reset_interval: 5,
            stall_limit: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lookahead_weight > 0.0 && self.lookahead_weight <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "lookahead weight must be in (0, 1], got {}",
                self.lookahead_weight
            )));
        }
        if self.extended_set_size == 0 {
            return Err(Error::InvalidConfig("extended set size must be >= 1".into()));
        }
        if !(self.decay_delta > 0.0 && self.decay_delta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "decay delta must be positive, got {}",
                self.decay_delta
            )));
        }
        if self.decay_reset_interval == 0 {
            return Err(Error::InvalidConfig("decay reset interval must be >= 1".into()));
        }
        if self.stall_limit == Some(0) {
            return Err(Error::InvalidConfig("stall limit must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-physical-qubit decay factors, each 1 + k*delta.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayState {
    factors: Vec<f64>,
}

impl DecayState {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            factors: vec![1.0; num_qubits],
        }
    }

    pub fn factor(&self, q: u32) -> f64 {
        self.factors[q as usize]
    }

    pub fn max_pair(&self, a: u32, b: u32) -> f64 {
        self.factors[a as usize].max(self.factors[b as usize])
    }

    pub fn bump(&mut self, q: u32, delta: f64) {
        self.factors[q as usize] += delta;
    }

    pub fn reset(&mut self) {
        self.factors.fill(1.0);
    }
}

/// Output of a routing pass: the physical-qubit circuit (originals plus
/// inserted SWAPs), the layouts bracketing it, and the overhead numbers.
#[derive(Debug, Clone)]
pub struct RoutedResult {
    pub circuit: Circuit,
    pub initial_layout: Layout,
    pub final_layout: Layout,
    pub swap_count: usize,
    pub routed_depth: usize,
}

impl RoutedResult {
    pub(crate) fn assemble(
        device_qubits: usize,
        items: Vec<(u32, u32, GateKind)>,
        initial_layout: Layout,
        final_layout: Layout,
    ) -> Result<Self> {
        let circuit = Circuit::from_kinds(device_qubits, items)?;
        let swap_count = circuit.swap_count();
        let routed_depth = compute_layers(&circuit).depth();
        Ok(Self {
            circuit,
            initial_layout,
            final_layout,
            swap_count,
            routed_depth,
        })
    }
}

/// Heuristic loss of one candidate SWAP, evaluated as if the swap were
/// applied: mean front-layer distance, plus the weighted mean extended-set
/// distance for lookahead variants (dropped when the set is empty), times
/// the decay factor for decay variants.
pub fn score_swap(
    swap: (u32, u32),
    front: &[Gate],
    extended: &[Gate],
    layout: &Layout,
    dist: &DistanceMatrix,
    decay: &DecayState,
    config: &HeuristicConfig,
) -> Result<f64> {
    if front.is_empty() {
        return Err(Error::EmptyFront);
    }
    let (a, b) = swap;
    if dist.get(a, b) != 1 {
        return Err(Error::NonEdgeSwap(a, b));
    }
    let post_swap = |gate: &Gate| -> u64 {
        let p1 = remap(layout.phys_of(gate.q1), a, b);
        let p2 = remap(layout.phys_of(gate.q2), a, b);
        dist.get(p1, p2) as u64
    };
    let front_sum: u64 = front.iter().map(post_swap).sum();
    let mut score = front_sum as f64 / front.len() as f64;
    if config.variant.uses_lookahead() && !extended.is_empty() {
        let ext_sum: u64 = extended.iter().map(post_swap).sum();
        score += config.lookahead_weight * (ext_sum as f64 / extended.len() as f64);
    }
    if config.variant.uses_decay() {
        score *= decay.max_pair(a, b);
    }
    Ok(score)
}

#[inline]
fn remap(q: u32, a: u32, b: u32) -> u32 {
    if q == a {
        b
    } else if q == b {
        a
    } else {
        q
    }
}

/// All coupling edges incident to a physical qubit hosting a front-layer
/// gate, canonicalized and sorted.
pub fn candidate_swaps(
    front: &[Gate],
    layout: &Layout,
    graph: &CouplingGraph,
) -> Vec<(u32, u32)> {
    let mut active: Vec<u32> = front
        .iter()
        .flat_map(|g| [layout.phys_of(g.q1), layout.phys_of(g.q2)])
        .collect();
    active.sort_unstable();
    active.dedup();
    edges_incident(&active, graph)
}

fn edges_incident(active_sorted: &[u32], graph: &CouplingGraph) -> Vec<(u32, u32)> {
    let mut edges: Vec<(u32, u32)> = active_sorted
        .iter()
        .flat_map(|&p| {
            graph
                .neighbors(p)
                .iter()
                .map(move |&nb| (p.min(nb), p.max(nb)))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Up to `size` gates collected breadth-first through the successor links of
/// the front layer, excluding the front itself.  The front is taken in gate-id
/// order, so the result is deterministic.
pub fn build_extended_set(dag: &DependencyDag, front: &[GateId], size: usize) -> Vec<GateId> {
    // Gates still awaiting execution are exactly the front plus everything
    // reachable from it; all remaining predecessor counts follow from that.
    let mut pending = vec![false; dag.num_gates()];
    let mut queue: VecDeque<GateId> = front.iter().copied().collect();
    for &g in front {
        pending[g] = true;
    }
    while let Some(g) = queue.pop_front() {
        for s in dag.successors(g) {
            if !pending[s] {
                pending[s] = true;
                queue.push_back(s);
            }
        }
    }
    let mut required: Vec<u32> = (0..dag.num_gates())
        .map(|g| dag.predecessors(g).filter(|&p| pending[p]).count() as u32)
        .collect();
    let mut start: Vec<GateId> = front.to_vec();
    start.sort_unstable();
    collect_extended(dag, &start, &mut required, size)
}

/// BFS successor collection used by both the public operation and the router.
/// Decrements of `required` are restored before returning.
fn collect_extended(
    dag: &DependencyDag,
    start: &[GateId],
    required: &mut [u32],
    size: usize,
) -> Vec<GateId> {
    let mut out = Vec::new();
    let mut touched: Vec<GateId> = Vec::new();
    let mut queue: VecDeque<GateId> = start.iter().copied().collect();
    'bfs: while let Some(g) = queue.pop_front() {
        for s in dag.successors(g) {
            required[s] -= 1;
            touched.push(s);
            if required[s] == 0 {
                out.push(s);
                if out.len() >= size {
                    break 'bfs;
                }
                queue.push_back(s);
            }
        }
    }
    for s in touched {
        required[s] += 1;
    }
    out
}

/// Front layer keyed by physical qubit: each active qubit stores the gate it
/// hosts and the partner qubit.  A qubit hosts at most one front gate.
struct FrontLayer {
    qubits: Vec<Option<(GateId, u32)>>,
    len: usize,
}

impl FrontLayer {
    fn new(num_qubits: usize) -> Self {
        Self {
            qubits: vec![None; num_qubits],
            len: 0,
        }
    }

    fn insert(&mut self, gate: GateId, a: u32, b: u32) {
        self.qubits[a as usize] = Some((gate, b));
        self.qubits[b as usize] = Some((gate, a));
        self.len += 1;
    }

    fn remove(&mut self, a: u32, b: u32) {
        self.qubits[a as usize] = None;
        self.qubits[b as usize] = None;
        self.len -= 1;
    }

    fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn apply_swap(&mut self, a: u32, b: u32) {
        if let (Some((g1, _)), Some((g2, _))) = (self.entry(a), self.entry(b)) {
            if g1 == g2 {
                // The gate occupies both swapped qubits; the table already
                // describes the post-swap positions.
                return;
            }
        }
        if let Some((g, c)) = self.entry(a) {
            self.qubits[c as usize] = Some((g, b));
        }
        if let Some((g, c)) = self.entry(b) {
            self.qubits[c as usize] = Some((g, a));
        }
        self.qubits.swap(a as usize, b as usize);
    }

    #[inline]
    fn entry(&self, q: u32) -> Option<(GateId, u32)> {
        self.qubits[q as usize]
    }

    /// Sum of gate distances; every gate is counted from both endpoints.
    fn total_distance(&self, dist: &DistanceMatrix) -> u64 {
        let twice: u64 = self
            .qubits
            .iter()
            .enumerate()
            .filter_map(|(q, e)| e.map(|(_, other)| dist.get(q as u32, other) as u64))
            .sum();
        twice / 2
    }

    /// Change in total distance if the swap (a, b) were applied.
    fn swap_delta(&self, a: u32, b: u32, dist: &DistanceMatrix) -> i64 {
        match (self.entry(a), self.entry(b)) {
            (Some((g1, _)), Some((g2, _))) if g1 == g2 => 0,
            (ea, eb) => {
                let mut delta = 0i64;
                if let Some((_, c)) = ea {
                    delta += dist.get(b, c) as i64 - dist.get(a, c) as i64;
                }
                if let Some((_, c)) = eb {
                    delta += dist.get(a, c) as i64 - dist.get(b, c) as i64;
                }
                delta
            }
        }
    }

    /// Gate ids currently in the front, sorted.
    fn gate_ids(&self) -> Vec<GateId> {
        let mut ids: Vec<GateId> = self
            .qubits
            .iter()
            .enumerate()
            .filter_map(|(q, e)| match e {
                Some((g, other)) if (q as u32) < *other => Some(*g),
                _ => None,
            })
            .collect();
        ids.sort_unstable();
        ids
    }

    fn active_qubits(&self) -> Vec<u32> {
        (0..self.qubits.len() as u32)
            .filter(|&q| self.qubits[q as usize].is_some())
            .collect()
    }

    /// Lowest-id gate in the front with its current endpoints.
    fn oldest(&self) -> Option<(GateId, u32, u32)> {
        let mut best: Option<(GateId, u32, u32)> = None;
        for (q, e) in self.qubits.iter().enumerate() {
            if let Some((g, other)) = e {
                if (q as u32) < *other && best.is_none_or(|(bg, _, _)| *g < bg) {
                    best = Some((*g, q as u32, *other));
                }
            }
        }
        best
    }

    fn routable_at(&self, q: u32, dist: &DistanceMatrix) -> Option<(GateId, u32, u32)> {
        self.entry(q)
            .filter(|&(_, other)| dist.get(q, other) == 1)
            .map(|(g, other)| (g, q, other))
    }
}

/// Physical qubit pairs of the lookahead gates under the current layout.
struct ExtendedSet {
    pairs: Vec<[u32; 2]>,
}

impl ExtendedSet {
    fn new() -> Self {
        Self { pairs: Vec::new() }
    }

    fn len(&self) -> usize {
        self.pairs.len()
    }

    fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn clear(&mut self) {
        self.pairs.clear();
    }

    fn push(&mut self, a: u32, b: u32) {
        self.pairs.push([a, b]);
    }

    fn apply_swap(&mut self, a: u32, b: u32) {
        for pair in &mut self.pairs {
            pair[0] = remap(pair[0], a, b);
            pair[1] = remap(pair[1], a, b);
        }
    }

    fn total_distance(&self, dist: &DistanceMatrix) -> u64 {
        self.pairs
            .iter()
            .map(|p| dist.get(p[0], p[1]) as u64)
            .sum()
    }

    fn swap_delta(&self, a: u32, b: u32, dist: &DistanceMatrix) -> i64 {
        self.pairs
            .iter()
            .map(|p| {
                dist.get(remap(p[0], a, b), remap(p[1], a, b)) as i64
                    - dist.get(p[0], p[1]) as i64
            })
            .sum()
    }
}

struct RouterState<'a> {
    circuit: &'a Circuit,
    graph: &'a CouplingGraph,
    dist: DistanceMatrix,
    dag: DependencyDag,
    config: HeuristicConfig,
    layout: Layout,
    front: FrontLayer,
    extended: ExtendedSet,
    decay: DecayState,
    required: Vec<u32>,
    out: Vec<(u32, u32, GateKind)>,
    rng: ChaCha8Rng,
    swaps_since_reset: usize,
}

impl RouterState<'_> {
    fn apply_swap(&mut self, a: u32, b: u32) {
        self.front.apply_swap(a, b);
        self.extended.apply_swap(a, b);
        self.layout.apply_swap(a, b);
    }

    fn undo_swaps(&mut self, swaps: &[(u32, u32)]) {
        for &(a, b) in swaps.iter().rev() {
            self.apply_swap(a, b);
        }
    }

    fn note_swap_applied(&mut self, a: u32, b: u32) {
        if !self.config.variant.uses_decay() {
            return;
        }
        self.swaps_since_reset += 1;
        if self.swaps_since_reset >= self.config.decay_reset_interval {
            self.decay.reset();
            self.swaps_since_reset = 0;
        } else {
            self.decay.bump(a, self.config.decay_delta);
            self.decay.bump(b, self.config.decay_delta);
        }
    }

    /// Collect gates on the two just-swapped qubits that became routable.
    fn collect_routable(&self, a: u32, b: u32, into: &mut Vec<(GateId, u32, u32)>) {
        for q in [a, b] {
            if let Some(hit) = self.front.routable_at(q, &self.dist) {
                if !into.iter().any(|r| r.0 == hit.0) {
                    into.push(hit);
                }
            }
        }
    }

    /// Emit every ready gate that is already adjacent, releasing successors
    /// transitively; the rest join the front layer.
    fn advance(&mut self, ready: impl IntoIterator<Item = GateId>) {
        let mut queue: VecDeque<GateId> = ready.into_iter().collect();
        while let Some(g) = queue.pop_front() {
            let gate = self.circuit.gates()[g];
            let p1 = self.layout.phys_of(gate.q1);
            let p2 = self.layout.phys_of(gate.q2);
            if self.dist.get(p1, p2) == 1 {
                self.out.push((p1, p2, GateKind::Original));
                for s in self.dag.successors(g) {
                    self.required[s] -= 1;
                    if self.required[s] == 0 {
                        queue.push_back(s);
                    }
                }
            } else {
                self.front.insert(g, p1, p2);
            }
        }
    }

    fn rebuild_extended(&mut self) {
        self.extended.clear();
        if !self.config.variant.uses_lookahead() {
            return;
        }
        let front_ids = self.front.gate_ids();
        let gates = collect_extended(
            &self.dag,
            &front_ids,
            &mut self.required,
            self.config.extended_set_size,
        );
        for g in gates {
            let gate = self.circuit.gates()[g];
            self.extended
                .push(self.layout.phys_of(gate.q1), self.layout.phys_of(gate.q2));
        }
    }

    /// Score all candidate swaps and pick the minimum, ties broken uniformly.
    fn choose_swap(&mut self) -> (u32, u32) {
        let candidates = edges_incident(&self.front.active_qubits(), self.graph);
        let front_len = self.front.len as f64;
        let front_total = self.front.total_distance(&self.dist) as i64;
        let use_ext = self.config.variant.uses_lookahead() && !self.extended.is_empty();
        let ext_len = self.extended.len() as f64;
        let ext_total = self.extended.total_distance(&self.dist) as i64;
        let uses_decay = self.config.variant.uses_decay();

        let mut best_score = f64::INFINITY;
        let mut ties: Vec<(u32, u32)> = Vec::new();
        for &(a, b) in &candidates {
            let front_after = front_total + self.front.swap_delta(a, b, &self.dist);
            let mut score = front_after as f64 / front_len;
            if use_ext {
                let ext_after = ext_total + self.extended.swap_delta(a, b, &self.dist);
                score += self.config.lookahead_weight * (ext_after as f64 / ext_len);
            }
            if uses_decay {
                score *= self.decay.max_pair(a, b);
            }
            if score < best_score - TIE_EPSILON {
                best_score = score;
                ties.clear();
                ties.push((a, b));
            } else if (score - best_score).abs() <= TIE_EPSILON {
                ties.push((a, b));
            }
        }
        *ties
            .choose(&mut self.rng)
            .expect("front layer qubits always touch at least one edge")
    }

    /// Stall fallback: walk the oldest front gate along one shortest path
    /// until some front gate becomes routable (normally that same gate once
    /// its endpoints meet).
    fn force_progress(
        &mut self,
        swaps: &mut Vec<(u32, u32)>,
        routable: &mut Vec<(GateId, u32, u32)>,
    ) -> Result<()> {
        let (_, from, to) = self
            .front
            .oldest()
            .ok_or_else(|| Error::Internal("stall with an empty front layer".into()))?;
        let path = crate::connectivity::lowest_index_shortest_path(self.graph, &self.dist, from, to);
        for i in 0..path.len().saturating_sub(2) {
            let (a, b) = (path[i], path[i + 1]);
            self.apply_swap(a, b);
            swaps.push((a, b));
            self.note_swap_applied(a, b);
            self.collect_routable(a, b, routable);
            if !routable.is_empty() {
                return Ok(());
            }
        }
        if routable.is_empty() {
            return Err(Error::Internal(
                "forced-progress fallback failed to free a gate".into(),
            ));
        }
        Ok(())
    }
}

/// Route a circuit onto the coupling graph with the SABRE loss function.
///
/// The loop executes every front-layer gate sitting on adjacent physical
/// qubits; when none is executable it applies the minimum-loss candidate
/// swap (ties broken by the seeded RNG) and repeats.  The result replays to
/// the original circuit up to a final qubit permutation.
pub fn route(
    circuit: &Circuit,
    graph: &CouplingGraph,
    initial_layout: &Layout,
    config: &HeuristicConfig,
    seed: u64,
) -> Result<RoutedResult> {
    config.validate()?;
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
    let stall_limit = config
        .stall_limit
        .unwrap_or(10 * dist.diameter().max(1) as usize);
    let dag = build_dag(circuit);
    let required: Vec<u32> = (0..circuit.len())
        .map(|g| dag.pred_count(g) as u32)
        .collect();
    let first: Vec<GateId> = (0..circuit.len()).filter(|&g| required[g] == 0).collect();

    let mut state = RouterState {
        circuit,
        graph,
        dist,
        dag,
        config: *config,
        layout: initial_layout.clone(),
        front: FrontLayer::new(graph.num_qubits()),
        extended: ExtendedSet::new(),
        decay: DecayState::new(graph.num_qubits()),
        required,
        out: Vec::with_capacity(circuit.len()),
        rng: ChaCha8Rng::seed_from_u64(seed),
        swaps_since_reset: 0,
    };

    state.advance(first);
    state.rebuild_extended();

    let mut current_swaps: Vec<(u32, u32)> = Vec::new();
    let mut routable: Vec<(GateId, u32, u32)> = Vec::new();
    while !state.front.is_empty() {
        current_swaps.clear();
        routable.clear();
        while routable.is_empty() && current_swaps.len() < stall_limit {
            let (a, b) = state.choose_swap();
            state.apply_swap(a, b);
            current_swaps.push((a, b));
            state.note_swap_applied(a, b);
            state.collect_routable(a, b, &mut routable);
        }
        if routable.is_empty() {
            state.undo_swaps(&current_swaps);
            current_swaps.clear();
            state.force_progress(&mut current_swaps, &mut routable)?;
        }
        for &(a, b) in &current_swaps {
            state.out.push((a, b, GateKind::InsertedSwap));
        }
        for &(_, a, b) in &routable {
            state.front.remove(a, b);
        }
        let ids: Vec<GateId> = routable.iter().map(|r| r.0).collect();
        state.advance(ids);
        state.rebuild_extended();
        if state.config.variant.uses_decay() {
            state.decay.reset();
            state.swaps_since_reset = 0;
        }
    }

    RoutedResult::assemble(
        graph.num_qubits(),
        state.out,
        initial_layout.clone(),
        state.layout,
    )
}
