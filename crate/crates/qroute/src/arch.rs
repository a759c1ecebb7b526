//! Architecture graphs and precomputed distance tables.
//!
//! An [`ArchGraph`] is a directed edge set over physical qubits: a CNOT is
//! directly executable only along a directed edge. SWAP gates traverse edges
//! regardless of direction (a SWAP is implementable on a one-way edge at the
//! cost of extra Hadamards), so all shortest-path work happens on the
//! underlying undirected graph.
//!
//! [`DistanceTables`] holds the undirected hop-count matrix, the CNOT
//! distance matrix (minimal auxiliary CNOT+H gates to execute a CNOT between
//! two nodes), the graph diameter, and the per-graph SWAP decomposition cost
//! (3 elementary gates when every edge is bidirectional, 7 otherwise).

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArchError {
    #[error("unknown architecture `{0}` (built-ins: qx5, q20, line-N, grid-RxC)")]
    UnknownName(String),
    #[error("architecture graph is not connected")]
    Disconnected,
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("edge ({0}, {1}) out of range for {2} nodes")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("architecture must have at least 2 nodes")]
    TooSmall,
    #[error("CNOT distance is undefined for equal endpoints (node {0})")]
    SameNode(usize),
    #[error("malformed architecture file: {0}")]
    Malformed(String),
    #[error("cannot read architecture file: {0}")]
    Io(#[from] std::io::Error),
}

/// Directed coupling graph of a QPU.
#[derive(Debug, Clone)]
pub struct ArchGraph {
    pub name: String,
    pub num_nodes: usize,
    /// Sorted, deduplicated directed edges.
    edges: Vec<(usize, usize)>,
    /// Dense adjacency for O(1) directed-edge tests.
    adj: Vec<bool>,
    /// Sorted undirected pairs (u < v).
    pairs: Vec<(usize, usize)>,
    /// Undirected neighbor lists, ascending.
    neighbors: Vec<Vec<usize>>,
}

impl ArchGraph {
    pub fn new(
        name: impl Into<String>,
        num_nodes: usize,
        directed_edges: &[(usize, usize)],
    ) -> Result<Self, ArchError> {
        if num_nodes < 2 {
            return Err(ArchError::TooSmall);
        }
        let mut edges: Vec<(usize, usize)> = directed_edges.to_vec();
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![false; num_nodes * num_nodes];
        for &(u, v) in &edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(ArchError::EdgeOutOfRange(u, v, num_nodes));
            }
            if u == v {
                return Err(ArchError::SelfLoop(u));
            }
            adj[u * num_nodes + v] = true;
        }
        let mut pairs: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut neighbors = vec![Vec::new(); num_nodes];
        for &(u, v) in &pairs {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for ns in &mut neighbors {
            ns.sort_unstable();
        }
        let g = ArchGraph {
            name: name.into(),
            num_nodes,
            edges,
            adj,
            pairs,
            neighbors,
        };
        if !g.is_connected() {
            return Err(ArchError::Disconnected);
        }
        Ok(g)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.num_nodes + v]
    }

    /// Both directions present for the undirected pair {u, v}?
    pub fn pair_bidirectional(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v) && self.has_edge(v, u)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Undirected edge pairs, (min, max), sorted.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn all_bidirectional(&self) -> bool {
        self.pairs
            .iter()
            .all(|&(u, v)| self.pair_bidirectional(u, v))
    }

    /// Elementary gates per inserted SWAP on the pair {u, v}.
    pub fn swap_cost(&self, u: usize, v: usize) -> u32 {
        if self.pair_bidirectional(u, v) {
            3
        } else {
            7
        }
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.num_nodes];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &w in &self.neighbors[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.num_nodes
    }

    /// BFS hop counts from `src` on the underlying undirected graph.
    pub fn bfs_from(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.num_nodes];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.neighbors[u] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

impl fmt::Display for ArchGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} qubits, {} directed edges{})",
            self.name,
            self.num_nodes,
            self.edges.len(),
            if self.all_bidirectional() {
                ", bidirectional"
            } else {
                ", directed"
            }
        )
    }
}

/// Precomputed distance matrices; immutable after construction.
#[derive(Debug, Clone)]
pub struct DistanceTables {
    pub num_nodes: usize,
    dist_u: Vec<u32>,
    dist_cnot: Vec<u32>,
    pub diameter: u32,
    /// 3 when every edge of the graph is bidirectional, else 7.
    pub n_swap: u32,
    pub all_bidirectional: bool,
}

impl DistanceTables {
    pub fn build(ag: &ArchGraph) -> Self {
        let n = ag.num_nodes;
        let mut dist_u = vec![0u32; n * n];
        for v in 0..n {
            let row = ag.bfs_from(v);
            dist_u[v * n..(v + 1) * n].copy_from_slice(&row);
        }
        let diameter = *dist_u.iter().max().expect("non-empty graph");
        let all_bidirectional = ag.all_bidirectional();
        let n_swap = if all_bidirectional { 3 } else { 7 };

        let mut dist_cnot = vec![0u32; n * n];
        for v in 0..n {
            for w in 0..n {
                if v == w {
                    continue;
                }
                let d = dist_u[v * n + w];
                dist_cnot[v * n + w] = if all_bidirectional {
                    3 * (d - 1)
                } else {
                    // A forward-directed edge on some undirected shortest
                    // path lets the final CNOT run without reversal.
                    let forward = ag.edges().iter().any(|&(a, b)| {
                        dist_u[v * n + a] + 1 + dist_u[b * n + w] == d
                    });
                    if forward {
                        7 * (d - 1)
                    } else {
                        7 * (d - 1) + 4
                    }
                };
            }
        }

        DistanceTables {
            num_nodes: n,
            dist_u,
            dist_cnot,
            diameter,
            n_swap,
            all_bidirectional,
        }
    }

    /// Undirected hop count.
    pub fn dist_u(&self, v: usize, w: usize) -> u32 {
        self.dist_u[v * self.num_nodes + w]
    }

    /// Auxiliary-gate count to execute CNOT(v, w); 0 iff (v, w) is an edge.
    /// Querying equal endpoints is a caller bug.
    pub fn cnot_distance(&self, v: usize, w: usize) -> Result<u32, ArchError> {
        if v == w {
            return Err(ArchError::SameNode(v));
        }
        Ok(self.dist_cnot[v * self.num_nodes + w])
    }

    /// Matrix access without the endpoint check, for hot loops. The diagonal
    /// is zero by construction.
    #[inline]
    pub fn cnot_distance_unchecked(&self, v: usize, w: usize) -> u32 {
        self.dist_cnot[v * self.num_nodes + w]
    }
}

#[derive(Deserialize)]
struct ArchFile {
    name: String,
    num_qubits: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    bidirectional: bool,
}

/// Load a built-in architecture by name, or a JSON description file.
///
/// Built-ins: `qx5`, `q20`, `line-N`, `grid-RxC`. A file must be a JSON
/// object `{"name", "num_qubits", "edges", "bidirectional"}`; with
/// `"bidirectional": true` each listed pair expands to both directions.
pub fn load_arch(source: &str) -> Result<ArchGraph, ArchError> {
    if let Some(g) = builtin(source)? {
        return Ok(g);
    }
    if Path::new(source).exists() {
        return load_arch_file(source);
    }
    Err(ArchError::UnknownName(source.to_string()))
}

pub fn load_arch_file(path: &str) -> Result<ArchGraph, ArchError> {
    let text = std::fs::read_to_string(path)?;
    let file: ArchFile =
        serde_json::from_str(&text).map_err(|e| ArchError::Malformed(e.to_string()))?;
    let mut edges = file.edges;
    if file.bidirectional {
        let rev: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (v, u)).collect();
        edges.extend(rev);
    }
    ArchGraph::new(file.name, file.num_qubits, &edges)
}

fn builtin(name: &str) -> Result<Option<ArchGraph>, ArchError> {
    if name == "qx5" {
        return Ok(Some(qx5()));
    }
    if name == "q20" {
        return Ok(Some(q20()));
    }
    if let Some(rest) = name.strip_prefix("line-") {
        if let Ok(n) = rest.parse::<usize>() {
            return line(n).map(Some);
        }
    }
    if let Some(rest) = name.strip_prefix("grid-") {
        if let Some((r, c)) = rest.split_once('x') {
            if let (Ok(r), Ok(c)) = (r.parse::<usize>(), c.parse::<usize>()) {
                return grid(r, c).map(Some);
            }
        }
    }
    Ok(None)
}

/// IBM QX5: 16 qubits in a 2x8 ladder, all edges one-way.
/// Edge data from IBM's published ibmqx5 coupling map.
pub fn qx5() -> ArchGraph {
    let edges = [
        (1, 0),
        (1, 2),
        (2, 3),
        (3, 4),
        (3, 14),
        (5, 4),
        (6, 5),
        (6, 7),
        (6, 11),
        (7, 10),
        (8, 7),
        (9, 8),
        (9, 10),
        (11, 10),
        (12, 5),
        (12, 11),
        (12, 13),
        (13, 4),
        (13, 14),
        (15, 0),
        (15, 2),
        (15, 14),
    ];
    ArchGraph::new("qx5", 16, &edges).expect("built-in qx5 is valid")
}

/// IBM Q20 (Tokyo): 20 qubits, 4x5 grid with diagonal couplings, all edges
/// bidirectional. Edge data from IBM's published Tokyo coupling map.
pub fn q20() -> ArchGraph {
    let pairs = [
        (0, 1),
        (0, 5),
        (1, 2),
        (1, 6),
        (1, 7),
        (2, 3),
        (2, 6),
        (2, 7),
        (3, 4),
        (3, 8),
        (3, 9),
        (4, 8),
        (4, 9),
        (5, 6),
        (5, 10),
        (5, 11),
        (6, 7),
        (6, 10),
        (6, 11),
        (7, 8),
        (7, 12),
        (7, 13),
        (8, 9),
        (8, 12),
        (8, 13),
        (9, 14),
        (10, 11),
        (10, 15),
        (11, 12),
        (11, 16),
        (11, 17),
        (12, 13),
        (12, 16),
        (12, 17),
        (13, 14),
        (13, 18),
        (13, 19),
        (14, 18),
        (14, 19),
        (15, 16),
        (16, 17),
        (17, 18),
        (18, 19),
    ];
    let mut edges = Vec::with_capacity(pairs.len() * 2);
    for &(u, v) in &pairs {
        edges.push((u, v));
        edges.push((v, u));
    }
    ArchGraph::new("q20", 20, &edges).expect("built-in q20 is valid")
}

/// Bidirectional path on `n` nodes.
pub fn line(n: usize) -> Result<ArchGraph, ArchError> {
    let mut edges = Vec::new();
    for i in 0..n.saturating_sub(1) {
        edges.push((i, i + 1));
        edges.push((i + 1, i));
    }
    ArchGraph::new(format!("line-{n}"), n, &edges)
}

/// Bidirectional rows x cols grid, row-major node numbering.
pub fn grid(rows: usize, cols: usize) -> Result<ArchGraph, ArchError> {
    let n = rows * cols;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
                edges.push((v + 1, v));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
                edges.push((v + cols, v));
            }
        }
    }
    ArchGraph::new(format!("grid-{rows}x{cols}"), n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn line_3_has_expected_edges() {
        let g = load_arch("line-3").unwrap();
        assert_eq!(g.num_nodes, 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 0), (1, 2), (2, 1)]);
    }

    #[test]
    fn q20_is_fully_bidirectional_with_swap_cost_3() {
        let g = q20();
        assert_eq!(g.num_nodes, 20);
        assert!(g.all_bidirectional());
        let t = DistanceTables::build(&g);
        assert_eq!(t.n_swap, 3);
    }

    #[test]
    fn qx5_is_directed_with_diameter_8() {
        let g = qx5();
        assert_eq!(g.num_nodes, 16);
        assert!(!g.all_bidirectional());
        let t = DistanceTables::build(&g);
        assert_eq!(t.n_swap, 7);
        assert_eq!(t.diameter, 8);
    }

    #[test]
    fn qx5_cnot_distance_worked_example() {
        // One swap (7 gates) plus a reversed CNOT (4 Hadamards).
        let t = DistanceTables::build(&qx5());
        assert_eq!(t.cnot_distance(3, 1).unwrap(), 11);
    }

    #[test]
    fn cnot_distance_rejects_equal_endpoints() {
        let t = DistanceTables::build(&line(3).unwrap());
        assert!(matches!(t.cnot_distance(1, 1), Err(ArchError::SameNode(1))));
    }

    #[test]
    fn cnot_distance_zero_iff_edge() {
        for g in [qx5(), q20(), grid(2, 3).unwrap()] {
            let t = DistanceTables::build(&g);
            for v in 0..g.num_nodes {
                for w in 0..g.num_nodes {
                    if v == w {
                        continue;
                    }
                    assert_eq!(
                        t.cnot_distance(v, w).unwrap() == 0,
                        g.has_edge(v, w),
                        "{} ({v},{w})",
                        g.name
                    );
                }
            }
        }
    }

    #[test]
    fn bidirectional_cnot_distance_is_symmetric() {
        let t = DistanceTables::build(&q20());
        for v in 0..20 {
            for w in 0..20 {
                assert_eq!(t.dist_cnot[v * 20 + w], t.dist_cnot[w * 20 + v]);
            }
        }
    }

    #[test]
    fn line_distances() {
        let t = DistanceTables::build(&line(4).unwrap());
        assert_eq!(t.dist_u(0, 3), 3);
        assert_eq!(t.dist_u(2, 2), 0);
        let t9 = DistanceTables::build(&line(9).unwrap());
        assert_eq!(t9.diameter, 8);
    }

    fn random_connected(rng: &mut ChaCha8Rng, n: usize, directed: bool) -> ArchGraph {
        // Random spanning tree plus extra edges.
        let mut edges = Vec::new();
        for v in 1..n {
            let u = rng.random_range(0..v);
            if directed && rng.random_bool(0.5) {
                edges.push((v, u));
            } else if directed {
                edges.push((u, v));
            } else {
                edges.push((u, v));
                edges.push((v, u));
            }
        }
        let extra = rng.random_range(0..n);
        for _ in 0..extra {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v {
                if directed {
                    edges.push((u, v));
                } else {
                    edges.push((u, v));
                    edges.push((v, u));
                }
            }
        }
        ArchGraph::new("random", n, &edges).unwrap()
    }

    #[test]
    fn dist_u_matches_floyd_warshall_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(2..=12);
            let directed = rng.random_bool(0.5);
            let g = random_connected(&mut rng, n, directed);
            let t = DistanceTables::build(&g);
            // Independent all-pairs oracle on the undirected graph.
            let inf = u32::MAX / 4;
            let mut fw = vec![inf; n * n];
            for v in 0..n {
                fw[v * n + v] = 0;
            }
            for &(u, v) in g.pairs() {
                fw[u * n + v] = 1;
                fw[v * n + u] = 1;
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let via = fw[i * n + k] + fw[k * n + j];
                        if via < fw[i * n + j] {
                            fw[i * n + j] = via;
                        }
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(t.dist_u(i, j), fw[i * n + j]);
                }
            }
        }
    }

    /// Dijkstra over joint (control, target) token positions: a token moves
    /// to an adjacent node for one SWAP (cost `n_swap` gates), adjacent
    /// tokens may exchange in one SWAP, and the terminal CNOT costs 0 when
    /// the meeting edge is correctly oriented, else 4.
    pub(crate) fn dijkstra_cnot_oracle(g: &ArchGraph, v: usize, w: usize) -> u32 {
        let n = g.num_nodes;
        let swap_cost: u32 = if g.all_bidirectional() { 3 } else { 7 };
        let inf = u32::MAX;
        let mut dist = vec![inf; n * n];
        let idx = |c: usize, t: usize| c * n + t;
        dist[idx(v, w)] = 0;
        let mut heap = std::collections::BinaryHeap::new();
        heap.push(std::cmp::Reverse((0u32, v, w)));
        let mut best = inf;
        while let Some(std::cmp::Reverse((d, c, t))) = heap.pop() {
            if d > dist[idx(c, t)] {
                continue;
            }
            let terminal = if g.has_edge(c, t) {
                Some(0)
            } else if g.has_edge(t, c) {
                Some(4)
            } else {
                None
            };
            if let Some(extra) = terminal {
                best = best.min(d + extra);
            }
            for &c2 in g.neighbors(c) {
                let (nc, nt) = if c2 == t { (t, c) } else { (c2, t) };
                let nd = d + swap_cost;
                if nd < dist[idx(nc, nt)] {
                    dist[idx(nc, nt)] = nd;
                    heap.push(std::cmp::Reverse((nd, nc, nt)));
                }
            }
            for &t2 in g.neighbors(t) {
                let (nc, nt) = if t2 == c { (t, c) } else { (c, t2) };
                let nd = d + swap_cost;
                if nd < dist[idx(nc, nt)] {
                    dist[idx(nc, nt)] = nd;
                    heap.push(std::cmp::Reverse((nd, nc, nt)));
                }
            }
        }
        best
    }

    #[test]
    fn cnot_distance_matches_dijkstra_oracle_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for case in 0..20 {
            let n = rng.random_range(3..=10);
            let g = random_connected(&mut rng, n, case % 2 == 0);
            let t = DistanceTables::build(&g);
            for v in 0..n {
                for w in 0..n {
                    if v == w {
                        continue;
                    }
                    assert_eq!(
                        t.cnot_distance(v, w).unwrap(),
                        dijkstra_cnot_oracle(&g, v, w),
                        "{} v={v} w={w} (case {case})",
                        g.name
                    );
                }
            }
        }
    }

    #[test]
    fn adding_bidirectional_edge_never_increases_cnot_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let n = rng.random_range(4..=9);
            let g = random_connected(&mut rng, n, true);
            let t = DistanceTables::build(&g);
            let u = rng.random_range(0..n);
            let v = (u + 1 + rng.random_range(0..n - 1)) % n;
            if u == v {
                continue;
            }
            let mut edges = g.edges().to_vec();
            edges.push((u, v));
            edges.push((v, u));
            let g2 = ArchGraph::new("aug", n, &edges).unwrap();
            let t2 = DistanceTables::build(&g2);
            for a in 0..n {
                for b in 0..n {
                    if a != b {
                        assert!(
                            t2.cnot_distance(a, b).unwrap() <= t.cnot_distance(a, b).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn arch_file_loading_expands_bidirectional_pairs() {
        let dir = std::env::temp_dir().join(format!("qroute-arch-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("dev.json");
        std::fs::write(
            &path,
            r#"{"name": "dev", "num_qubits": 3, "edges": [[0,1],[1,2]], "bidirectional": true}"#,
        )
        .unwrap();
        let g = load_arch(path.to_str().unwrap()).unwrap();
        assert_eq!(g.name, "dev");
        assert_eq!(g.edges(), &[(0, 1), (1, 0), (1, 2), (2, 1)]);
        assert!(g.all_bidirectional());

        std::fs::write(
            &path,
            r#"{"name": "oneway", "num_qubits": 2, "edges": [[0,1]]}"#,
        )
        .unwrap();
        let g = load_arch(path.to_str().unwrap()).unwrap();
        assert!(!g.all_bidirectional());

        std::fs::write(&path, "{not json").unwrap();
        assert!(matches!(
            load_arch(path.to_str().unwrap()),
            Err(ArchError::Malformed(_))
        ));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn load_arch_errors() {
        assert!(matches!(
            load_arch("nosuch"),
            Err(ArchError::UnknownName(_))
        ));
        assert!(matches!(
            ArchGraph::new("bad", 3, &[(0, 0)]),
            Err(ArchError::SelfLoop(0))
        ));
        assert!(matches!(
            ArchGraph::new("bad", 4, &[(0, 1), (1, 0)]),
            Err(ArchError::Disconnected)
        ));
    }
}
