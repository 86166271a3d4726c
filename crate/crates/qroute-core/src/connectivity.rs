//! Device coupling graphs and shortest-path structure.
//!
//! Two families are built here: the path graph and the trimmed square
//! lattice.  The lattice starts as the smallest l x l grid holding the
//! requested qubit count and is trimmed by repeatedly deleting the pair of
//! qubits at maximum graph distance, which reproduces corner trimming.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Undirected device connectivity.  Construction enforces connectedness,
/// rejects self-loops and duplicate edges.
#[derive(Debug, Clone)]
pub struct CouplingGraph {
    num_qubits: usize,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<u32>>,
    coords: Option<Vec<(u32, u32)>>,
}

impl CouplingGraph {
    pub fn from_edges(
        num_qubits: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        Self::build(num_qubits, edges, None)
    }

    fn build(
        num_qubits: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
        coords: Option<Vec<(u32, u32)>>,
    ) -> Result<Self> {
        let mut canonical: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on qubit {a}")));
            }
            if a as usize >= num_qubits || b as usize >= num_qubits {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) exceeds qubit count {num_qubits}"
                )));
            }
            canonical.push((a.min(b), a.max(b)));
        }
        canonical.sort_unstable();
        if canonical.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        let mut adjacency = vec![Vec::new(); num_qubits];
        for &(a, b) in &canonical {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = Self {
            num_qubits,
            edges: canonical,
            adjacency,
            coords,
        };
        if num_qubits > 1 && !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Canonical edge list, (small, large) pairs in sorted order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, q: u32) -> &[u32] {
        &self.adjacency[q as usize]
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adjacency[a as usize].binary_search(&b).is_ok()
    }

    /// Lattice coordinates per qubit, when the graph was built as one.
    pub fn coords(&self) -> Option<&[(u32, u32)]> {
        self.coords.as_deref()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.num_qubits];
        let mut queue = VecDeque::from([0u32]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &nb in self.neighbors(v) {
                if !seen[nb as usize] {
                    seen[nb as usize] = true;
                    count += 1;
                    queue.push_back(nb);
                }
            }
        }
        count == self.num_qubits
    }

    /// Edge-list text export: `# qubits N` header, then one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# qubits {}", self.num_qubits).unwrap();
        for &(a, b) in &self.edges {
            writeln!(out, "{a} {b}").unwrap();
        }
        out
    }
}

/// Line graph 0-1-2-...-(n-1).
pub fn build_path(n: usize) -> Result<CouplingGraph> {
    if n < 2 {
        return Err(Error::InvalidGraph(format!(
            "path graph needs at least 2 qubits, got {n}"
        )));
    }
    CouplingGraph::build(
        n,
        (0..n as u32 - 1).map(|i| (i, i + 1)),
        Some((0..n as u32).map(|i| (0, i)).collect()),
    )
}

/// Square lattice trimmed down to `n` qubits.
///
/// Starts from the ceil(sqrt(n)) x ceil(sqrt(n)) grid and repeatedly removes
/// the pair of qubits at maximum graph distance, ties broken by the smallest
/// (row, col) coordinates of the pair.  When a single removal remains, only
/// the first qubit of the selected pair is removed.
pub fn build_square(n: usize) -> Result<CouplingGraph> {
    if n < 2 {
        return Err(Error::InvalidGraph(format!(
            "square lattice needs at least 2 qubits, got {n}"
        )));
    }
    let side = (n as f64).sqrt().ceil() as usize;
    let coord = |v: usize| ((v / side) as u32, (v % side) as u32);
    let mut alive: Vec<bool> = vec![true; side * side];
    let mut alive_count = side * side;

    while alive_count > n {
        let (u, v) = furthest_alive_pair(side, &alive)?;
        alive[u] = false;
        alive_count -= 1;
        if alive_count > n {
            alive[v] = false;
            alive_count -= 1;
            // Removing both halves of a diagonal pair can disconnect the
            // 2x2 grid; keep the second qubit and reselect in that case.
            if !grid_connected(side, &alive) {
                alive[v] = true;
                alive_count += 1;
            }
        }
    }

    // Compact vertex ids in row-major (row, col) order.
    let mut remap = vec![u32::MAX; side * side];
    let mut coords = Vec::with_capacity(n);
    let mut next = 0u32;
    for v in 0..side * side {
        if alive[v] {
            remap[v] = next;
            coords.push(coord(v));
            next += 1;
        }
    }
    let mut edges = Vec::new();
    for v in 0..side * side {
        if !alive[v] {
            continue;
        }
        let (r, c) = coord(v);
        if (c as usize) < side - 1 && alive[v + 1] {
            edges.push((remap[v], remap[v + 1]));
        }
        if (r as usize) < side - 1 && alive[v + side] {
            edges.push((remap[v], remap[v + side]));
        }
    }
    CouplingGraph::build(n, edges, Some(coords)).map_err(|e| match e {
        Error::Disconnected => Error::Internal(format!(
            "square trimming disconnected the lattice at n = {n}"
        )),
        other => other,
    })
}

/// Max-distance alive pair on the partially trimmed grid, tie-broken by the
/// lexicographically smallest (row, col) of the first then second qubit.
fn furthest_alive_pair(side: usize, alive: &[bool]) -> Result<(usize, usize)> {
    let total = side * side;
    let mut best: Option<(u32, usize, usize)> = None;
    for src in 0..total {
        if !alive[src] {
            continue;
        }
        let dist = grid_bfs(side, alive, src)?;
        for (dst, &d) in dist.iter().enumerate().skip(src + 1) {
            if !alive[dst] {
                continue;
            }
            // Row-major vertex ids sort exactly like (row, col) coordinates.
            if best.is_none_or(|(bd, bu, bv)| d > bd || (d == bd && (src, dst) < (bu, bv))) {
                best = Some((d, src, dst));
            }
        }
    }
    best.map(|(_, u, v)| (u, v))
        .ok_or_else(|| Error::Internal("trimming ran out of qubit pairs".into()))
}

fn grid_connected(side: usize, alive: &[bool]) -> bool {
    let Some(src) = (0..side * side).find(|&v| alive[v]) else {
        return true;
    };
    grid_bfs(side, alive, src).is_ok()
}

fn grid_bfs(side: usize, alive: &[bool], src: usize) -> Result<Vec<u32>> {
    let total = side * side;
    let mut dist = vec![u32::MAX; total];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let (r, c) = (v / side, v % side);
        let mut visit = |w: usize| {
            if alive[w] && dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        };
        if c > 0 {
            visit(v - 1);
        }
        if c < side - 1 {
            visit(v + 1);
        }
        if r > 0 {
            visit(v - side);
        }
        if r < side - 1 {
            visit(v + side);
        }
    }
    if dist.iter().enumerate().any(|(w, &d)| alive[w] && d == u32::MAX) {
        return Err(Error::Internal(
            "square trimming disconnected the lattice".into(),
        ));
    }
    Ok(dist)
}

/// All-pairs shortest-path hop counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceMatrix {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: u32, b: u32) -> u32 {
        self.dist[a as usize * self.n + b as usize]
    }

    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }
}

/// BFS from every vertex; exact hop counts.  Rejects disconnected graphs.
pub fn all_pairs_distances(graph: &CouplingGraph) -> Result<DistanceMatrix> {
    let n = graph.num_qubits();
    let mut dist = vec![u32::MAX; n * n];
    let mut queue = VecDeque::new();
    for src in 0..n {
        let row = &mut dist[src * n..(src + 1) * n];
        row[src] = 0;
        queue.clear();
        queue.push_back(src as u32);
        while let Some(v) = queue.pop_front() {
            for &nb in graph.neighbors(v) {
                if row[nb as usize] == u32::MAX {
                    row[nb as usize] = row[v as usize] + 1;
                    queue.push_back(nb);
                }
            }
        }
        if row.contains(&u32::MAX) {
            return Err(Error::Disconnected);
        }
    }
    Ok(DistanceMatrix { n, dist })
}

/// Mean shortest path over unordered pairs, summed in fixed row-major order.
pub fn mean_shortest_path(dist: &DistanceMatrix) -> f64 {
    let n = dist.num_qubits();
    let mut sum = 0.0;
    for j in 0..n as u32 {
        for k in j + 1..n as u32 {
            sum += dist.get(j, k) as f64;
        }
    }
    sum * 2.0 / (n as f64 * (n as f64 - 1.0))
}

/// One shortest path from `from` to `to`, inclusive, choosing the
/// lowest-index neighbor at every step.
pub fn lowest_index_shortest_path(
    graph: &CouplingGraph,
    dist: &DistanceMatrix,
    from: u32,
    to: u32,
) -> Vec<u32> {
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        let remaining = dist.get(cur, to);
        // Neighbor lists are sorted, so the first step found has the lowest index.
        let next = graph
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&nb| dist.get(nb, to) == remaining - 1)
            .expect("distance matrix certifies a shortest path exists");
        path.push(next);
        cur = next;
    }
    path
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    Path,
    Square,
}

/// Closed-form mean shortest path: (n+1)/3 for the path, 2*sqrt(n)/3 for the
/// full square lattice (n must be a perfect square).
pub fn analytic_mean_path(kind: LatticeKind, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidGraph(format!(
            "mean path needs at least 2 qubits, got {n}"
        )));
    }
    match kind {
        LatticeKind::Path => Ok((n as f64 + 1.0) / 3.0),
        LatticeKind::Square => {
            let side = (n as f64).sqrt().round() as usize;
            if side * side != n {
                return Err(Error::InvalidGraph(format!(
                    "{n} is not a perfect square; the closed form assumes a full lattice"
                )));
            }
            Ok(2.0 * side as f64 / 3.0)
        }
    }
}

/// Number of distinct shortest lattice paths across an offset of `dr` rows
/// and `dc` columns: binomial(dr + dc, dr).
pub fn count_shortest_paths_square(dr: u32, dc: u32) -> u128 {
    let total = (dr + dc) as u128;
    let k = dr.min(dc) as u128;
    let mut result: u128 = 1;
    for i in 1..=k {
        result = result * (total - k + i) / i;
    }
    result
}
