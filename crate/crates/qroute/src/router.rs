//! The transformation engine: state extension, layered look-ahead cost,
//! grandchild-minimum selection, pruning, and the remote-CNOT fallback.
//!
//! Starting from an initial mapping, the search repeatedly extends the
//! current state either by inserting a SWAP on an edge touching a front-layer
//! gate (Way 1) or, on directed graphs, by reversing an inversely-executable
//! front-layer CNOT with four Hadamards (Way 2). After every extension all
//! newly executable gates are flushed into the physical circuit. The next
//! state is chosen by looking one level further ahead: each child is scored
//! by its own gate cost plus the minimum over its children of gate cost plus
//! the layered heuristic, and the child owning the cheapest grandchild wins.
//!
//! When no gate leaves the logical circuit for `K` consecutive rounds, the
//! cheapest front-layer gate is executed in place by a remote-CNOT ladder
//! that restores every interior wire and preserves the mapping, which bounds
//! the total number of search rounds by `K` times the gate count.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arch::{ArchGraph, DistanceTables};
use crate::circuit::Circuit;
use crate::dag::{DependencyGraph, GateCursor};
use crate::mapping::{gate_cost, Mapping};

#[derive(Debug, Error)]
pub enum RouteError {
    #[error("need |Q| <= |V|: {logical} logical qubits but only {physical} physical")]
    TooManyQubits { logical: usize, physical: usize },
    #[error("mapping shape does not match circuit/architecture")]
    MappingMismatch,
    #[error("no edge between {0} and {1}")]
    NoEdge(usize, usize),
    #[error("pair ({0}, {1}) is not a one-way edge")]
    NotOneWay(usize, usize),
    #[error("remote CNOT path nodes {0} and {1} are not adjacent")]
    PathNotAdjacent(usize, usize),
    #[error("remote CNOT path needs at least two nodes")]
    PathTooShort,
    #[error("invalid cost parameters: {0}")]
    BadParams(String),
    #[error("self-check failed: routed circuit is not equivalent to the input")]
    SelfCheckFailed,
}

/// A gate of the emitted physical circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhysGate {
    Cnot { control: usize, target: usize },
    H { qubit: usize },
}

impl PhysGate {
    pub fn cnot(control: usize, target: usize) -> Self {
        PhysGate::Cnot { control, target }
    }
}

/// One structural step of the output circuit. Source gates keep the index of
/// the core gate they realize so that passthrough single-qubit gates can be
/// re-anchored at emission.
#[derive(Debug, Clone, PartialEq)]
pub enum PhysOp {
    /// A source CNOT executed directly on a directed edge.
    Source { core_idx: usize, gate: PhysGate },
    /// An inserted SWAP block on the pair {u, v} (3 or 7 gates).
    Swap {
        u: usize,
        v: usize,
        gates: Vec<PhysGate>,
    },
    /// A source CNOT realized against the edge direction (4 extra H).
    Reversal { core_idx: usize, gates: Vec<PhysGate> },
    /// A source CNOT realized remotely along a path, mapping preserved.
    Remote {
        core_idx: usize,
        path: Vec<usize>,
        gates: Vec<PhysGate>,
    },
}

impl PhysOp {
    pub fn gates(&self) -> &[PhysGate] {
        match self {
            PhysOp::Source { gate, .. } => std::slice::from_ref(gate),
            PhysOp::Swap { gates, .. }
            | PhysOp::Reversal { gates, .. }
            | PhysOp::Remote { gates, .. } => gates,
        }
    }
}

// ---------------------------------------------------------------------------
// Gate blocks
// ---------------------------------------------------------------------------

/// SWAP decomposition on the pair {u, v}: 3 CNOTs when the pair is
/// bidirectional, otherwise 3 CNOTs along the existing direction with 4
/// Hadamards reversing the middle one (7 elementary gates).
pub fn swap_block(ag: &ArchGraph, u: usize, v: usize) -> Result<Vec<PhysGate>, RouteError> {
    if ag.pair_bidirectional(u, v) {
        Ok(vec![
            PhysGate::cnot(u, v),
            PhysGate::cnot(v, u),
            PhysGate::cnot(u, v),
        ])
    } else {
        let (a, b) = if ag.has_edge(u, v) {
            (u, v)
        } else if ag.has_edge(v, u) {
            (v, u)
        } else {
            return Err(RouteError::NoEdge(u, v));
        };
        Ok(vec![
            PhysGate::cnot(a, b),
            PhysGate::H { qubit: a },
            PhysGate::H { qubit: b },
            PhysGate::cnot(a, b),
            PhysGate::H { qubit: a },
            PhysGate::H { qubit: b },
            PhysGate::cnot(a, b),
        ])
    }
}

/// Realize CNOT(u, v) against a one-way edge (v, u): H(u) H(v) CNOT(v, u)
/// H(u) H(v). Four of the five gates are auxiliary.
pub fn reverse_block(ag: &ArchGraph, u: usize, v: usize) -> Result<Vec<PhysGate>, RouteError> {
    if !ag.has_edge(v, u) || ag.has_edge(u, v) {
        return Err(RouteError::NotOneWay(u, v));
    }
    Ok(vec![
        PhysGate::H { qubit: u },
        PhysGate::H { qubit: v },
        PhysGate::cnot(v, u),
        PhysGate::H { qubit: u },
        PhysGate::H { qubit: v },
    ])
}

fn cnot_or_wrapped(ag: &ArchGraph, a: usize, b: usize) -> Result<Vec<PhysGate>, RouteError> {
    if ag.has_edge(a, b) {
        Ok(vec![PhysGate::cnot(a, b)])
    } else if ag.has_edge(b, a) {
        Ok(vec![
            PhysGate::H { qubit: a },
            PhysGate::H { qubit: b },
            PhysGate::cnot(b, a),
            PhysGate::H { qubit: a },
            PhysGate::H { qubit: b },
        ])
    } else {
        Err(RouteError::NoEdge(a, b))
    }
}

/// Remote CNOT along `path[0] .. path[d]`: a ladder of nearest-neighbor
/// CNOTs computing `CNOT(path[0], path[d])` while restoring every interior
/// wire. For `d >= 2` the ladder has exactly `4(d-1)` CNOTs; each CNOT is
/// wrapped in 4 Hadamards when its edge points the wrong way.
pub fn remote_cnot_block(ag: &ArchGraph, path: &[usize]) -> Result<Vec<PhysGate>, RouteError> {
    if path.len() < 2 {
        return Err(RouteError::PathTooShort);
    }
    for w in path.windows(2) {
        if !ag.has_edge(w[0], w[1]) && !ag.has_edge(w[1], w[0]) {
            return Err(RouteError::PathNotAdjacent(w[0], w[1]));
        }
    }
    let d = path.len() - 1;
    if d == 1 {
        return cnot_or_wrapped(ag, path[0], path[1]);
    }
    let mut gates = Vec::new();
    let rung = |k: usize, gates: &mut Vec<PhysGate>| -> Result<(), RouteError> {
        gates.extend(cnot_or_wrapped(ag, path[k], path[k + 1])?);
        Ok(())
    };
    for k in 0..d {
        rung(k, &mut gates)?;
    }
    for k in (0..=d.saturating_sub(2)).rev() {
        rung(k, &mut gates)?;
    }
    for k in 1..d {
        rung(k, &mut gates)?;
    }
    for k in (1..=d.saturating_sub(2)).rev() {
        rung(k, &mut gates)?;
    }
    Ok(gates)
}

// ---------------------------------------------------------------------------
// Cost parameters
// ---------------------------------------------------------------------------

/// Heuristic parameters. `layer_weights[0]` applies to the front layer; the
/// tail weight multiplies `(diameter - 1) * N_swap * N_remaining`.
#[derive(Debug, Clone)]
pub struct CostParams {
    pub layer_weights: Vec<f64>,
    pub tail_weight: f64,
    /// Stagnation rounds before the remote-CNOT fallback fires. `None`
    /// means `max(1, ceil(diameter / 2))`.
    pub fallback_threshold: Option<u32>,
    /// Selection depth: 0 picks the best child, 1 (default) the child owning
    /// the best grandchild, and so on.
    pub lookahead_depth: u32,
    pub prune: bool,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            layer_weights: vec![1.0, 1.0, 0.8, 0.6],
            tail_weight: 0.4,
            fallback_threshold: None,
            lookahead_depth: 1,
            prune: true,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<(), RouteError> {
        if self.layer_weights.is_empty() {
            return Err(RouteError::BadParams("need at least one layer weight".into()));
        }
        if self.layer_weights[0] != 1.0 {
            return Err(RouteError::BadParams("w_0 must be 1".into()));
        }
        let mut prev = f64::INFINITY;
        for &w in &self.layer_weights {
            if !(w >= 0.0 && w <= prev) {
                return Err(RouteError::BadParams(
                    "layer weights must satisfy 1 = w_0 >= w_1 >= ... >= 0".into(),
                ));
            }
            prev = w;
        }
        if !(self.tail_weight >= 0.0 && self.tail_weight <= prev) {
            return Err(RouteError::BadParams(
                "tail weight must satisfy w_l >= w_s >= 0".into(),
            ));
        }
        if self.fallback_threshold == Some(0) {
            return Err(RouteError::BadParams("fallback threshold must be >= 1".into()));
        }
        Ok(())
    }

    pub fn threshold_for(&self, tables: &DistanceTables) -> u32 {
        self.fallback_threshold
            .unwrap_or_else(|| ((tables.diameter).div_ceil(2)).max(1))
    }
}

// ---------------------------------------------------------------------------
// Search state and the router
// ---------------------------------------------------------------------------

/// A node of the search: mapping, dependency cursor and the stagnation
/// counter (rounds since a gate was last executed).
#[derive(Debug, Clone)]
pub struct SearchState {
    pub tau: Mapping,
    pub cursor: GateCursor,
    pub stagnation: u32,
}

/// The extension applied to reach a child.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChildOp {
    Swap { u: usize, v: usize },
    Reversal { core_idx: usize },
}

/// A materialized child state: the ops it appends, its own auxiliary-gate
/// cost, and how many source gates it executed.
#[derive(Debug, Clone)]
pub struct Child {
    pub state: SearchState,
    pub ops: Vec<PhysOp>,
    pub gcost: u32,
    pub executed: usize,
    pub op: ChildOp,
    op_index: usize,
}

#[derive(Debug, Default, Clone)]
pub struct RouteCounters {
    pub states_expanded: usize,
    pub children_evaluated: usize,
    pub grandchildren_evaluated: usize,
    pub pruned_children: usize,
    pub fallback_count: usize,
    pub swap_count: usize,
    pub reversal_count: usize,
    pub peak_frontier: usize,
}

/// Shared read-only context of one routing run.
pub struct Router<'a> {
    pub ag: &'a ArchGraph,
    pub tables: &'a DistanceTables,
    pub dg: DependencyGraph,
    pub params: CostParams,
    pub threshold: u32,
}

impl<'a> Router<'a> {
    pub fn new(
        ag: &'a ArchGraph,
        tables: &'a DistanceTables,
        dg: DependencyGraph,
        params: CostParams,
    ) -> Result<Self, RouteError> {
        params.validate()?;
        let threshold = params.threshold_for(tables);
        Ok(Router {
            ag,
            tables,
            dg,
            params,
            threshold,
        })
    }

    pub fn initial_state(&self, tau_ini: Mapping) -> SearchState {
        SearchState {
            tau: tau_ini,
            cursor: self.dg.fresh_cursor(),
            stagnation: 0,
        }
    }

    /// Execute every gate executable under the state's mapping, recursively
    /// unlocking dependents, appending physical gates through `on_exec`.
    /// Returns the number of gates executed.
    pub fn execute_all(
        &self,
        state: &mut SearchState,
        mut on_exec: impl FnMut(usize, PhysGate),
    ) -> usize {
        let mut executed = 0;
        loop {
            let mut any = false;
            // Front gates are pairwise disjoint, so one snapshot per sweep
            // is safe; re-sweep until a fixed point for unlocked dependents.
            for g in self.dg.front(&state.cursor) {
                let gate = self.dg.gates[g];
                let (u, v) = (state.tau.phys(gate.control), state.tau.phys(gate.target));
                if self.ag.has_edge(u, v) {
                    self.dg.execute(&mut state.cursor, g);
                    on_exec(g, PhysGate::cnot(u, v));
                    executed += 1;
                    any = true;
                }
            }
            if !any {
                break;
            }
        }
        if executed > 0 {
            state.stagnation = 0;
        }
        executed
    }

    /// Candidate extensions of a state, in deterministic order: SWAPs on
    /// undirected pairs touching a front-layer image (ascending pair), then
    /// direction reversals (ascending core gate index).
    fn candidate_ops(&self, state: &SearchState) -> Vec<ChildOp> {
        let front = self.dg.front(&state.cursor);
        let mut touched = vec![false; self.ag.num_nodes];
        for &g in &front {
            let gate = self.dg.gates[g];
            touched[state.tau.phys(gate.control)] = true;
            touched[state.tau.phys(gate.target)] = true;
        }
        let mut ops = Vec::new();
        for &(u, v) in self.ag.pairs() {
            if touched[u] || touched[v] {
                ops.push(ChildOp::Swap { u, v });
            }
        }
        for &g in &front {
            let gate = self.dg.gates[g];
            let (u, v) = (state.tau.phys(gate.control), state.tau.phys(gate.target));
            if self.ag.has_edge(v, u) && !self.ag.has_edge(u, v) {
                ops.push(ChildOp::Reversal { core_idx: g });
            }
        }
        ops
    }

    fn apply_op_light(&self, state: &SearchState, op: ChildOp) -> (SearchState, u32, usize) {
        let mut child = SearchState {
            tau: state.tau.clone(),
            cursor: state.cursor.clone(),
            stagnation: state.stagnation,
        };
        let gcost = match op {
            ChildOp::Swap { u, v } => {
                child.tau.swap_phys(u, v);
                self.ag.swap_cost(u, v)
            }
            ChildOp::Reversal { core_idx } => {
                self.dg.execute(&mut child.cursor, core_idx);
                4
            }
        };
        let mut executed = self.execute_all(&mut child, |_, _| {});
        if matches!(op, ChildOp::Reversal { .. }) {
            executed += 1;
            child.stagnation = 0;
        }
        if executed == 0 {
            child.stagnation = state.stagnation + 1;
        }
        (child, gcost, executed)
    }

    /// One child per qualifying extension, with its physical-circuit delta.
    pub fn children(&self, state: &SearchState) -> Result<Vec<Child>, RouteError> {
        let mut out = Vec::new();
        for (op_index, op) in self.candidate_ops(state).into_iter().enumerate() {
            let mut child = SearchState {
                tau: state.tau.clone(),
                cursor: state.cursor.clone(),
                stagnation: state.stagnation,
            };
            let mut ops = Vec::new();
            let mut executed = 0usize;
            let gcost = match op {
                ChildOp::Swap { u, v } => {
                    child.tau.swap_phys(u, v);
                    ops.push(PhysOp::Swap {
                        u,
                        v,
                        gates: swap_block(self.ag, u, v)?,
                    });
                    self.ag.swap_cost(u, v)
                }
                ChildOp::Reversal { core_idx } => {
                    let gate = self.dg.gates[core_idx];
                    let (u, v) = (child.tau.phys(gate.control), child.tau.phys(gate.target));
                    ops.push(PhysOp::Reversal {
                        core_idx,
                        gates: reverse_block(self.ag, u, v)?,
                    });
                    self.dg.execute(&mut child.cursor, core_idx);
                    child.stagnation = 0;
                    executed += 1;
                    4
                }
            };
            executed += self.execute_all(&mut child, |core_idx, gate| {
                ops.push(PhysOp::Source { core_idx, gate });
            });
            if executed == 0 {
                child.stagnation = state.stagnation + 1;
            }
            out.push(Child {
                state: child,
                ops,
                gcost,
                executed,
                op,
                op_index,
            });
        }
        Ok(out)
    }

    /// Layered part of the heuristic: weighted gate costs of the first
    /// layers of the remaining circuit.
    fn layered_cost(&self, state: &SearchState) -> f64 {
        let layers = self
            .dg
            .layers(&state.cursor, Some(self.params.layer_weights.len()));
        let mut total = 0.0;
        for (k, layer) in layers.iter().enumerate() {
            let sum: u64 = layer
                .iter()
                .map(|&g| gate_cost(self.dg.gates[g], &state.tau, self.tables) as u64)
                .sum();
            total += self.params.layer_weights[k] * sum as f64;
        }
        total
    }

    /// Tail part of the heuristic: `w_s * (d - 1) * N_swap * N_remaining`.
    fn tail_cost(&self, state: &SearchState) -> f64 {
        self.params.tail_weight
            * (self.tables.diameter.saturating_sub(1)) as f64
            * self.tables.n_swap as f64
            * self.dg.remaining(&state.cursor) as f64
    }

    /// The heuristic estimate of the remaining completion cost.
    pub fn cost_h(&self, state: &SearchState) -> f64 {
        self.layered_cost(state) + self.tail_cost(state)
    }

    /// Look-ahead value of a state: `depth = 0` is `cost_h`; deeper values
    /// minimize `gcost(child) + value(child, depth - 1)` over cost-only
    /// children, which never materialize physical-circuit bodies.
    pub fn lookahead_value(
        &self,
        state: &SearchState,
        depth: u32,
        counters: &mut RouteCounters,
    ) -> f64 {
        if self.dg.is_done(&state.cursor) {
            return 0.0;
        }
        if depth == 0 {
            return self.cost_h(state);
        }
        let mut best = f64::INFINITY;
        for op in self.candidate_ops(state) {
            let (child, gcost, _) = self.apply_op_light(state, op);
            counters.grandchildren_evaluated += 1;
            let value = gcost as f64 + self.lookahead_value(&child, depth - 1, counters);
            if value < best {
                best = value;
            }
        }
        best
    }

    /// The minimum over a state's children of `gcost + cost_h`.
    pub fn min_child_hcost(&self, state: &SearchState, counters: &mut RouteCounters) -> f64 {
        self.lookahead_value(state, 1, counters)
    }

    /// Drop children that executed nothing while strictly increasing the
    /// layered cost relative to the parent. If that would drop everything,
    /// the single child minimizing `gcost + cost_h` is retained.
    pub fn prune_children(
        &self,
        parent: &SearchState,
        kids: Vec<Child>,
        counters: &mut RouteCounters,
    ) -> Vec<Child> {
        let parent_layered = self.layered_cost(parent);
        let parent_rem = self.dg.remaining(&parent.cursor);
        let before = kids.len();
        let mut kept: Vec<Child> = Vec::with_capacity(kids.len());
        let mut dropped: Vec<Child> = Vec::new();
        for kid in kids {
            let no_progress = self.dg.remaining(&kid.state.cursor) == parent_rem;
            if no_progress && self.layered_cost(&kid.state) > parent_layered {
                dropped.push(kid);
            } else {
                kept.push(kid);
            }
        }
        if kept.is_empty() {
            // Never prune everything: keep the cheapest immediate child.
            let best = dropped
                .into_iter()
                .min_by(|a, b| {
                    let ca = a.gcost as f64 + self.cost_h(&a.state);
                    let cb = b.gcost as f64 + self.cost_h(&b.state);
                    ca.partial_cmp(&cb)
                        .unwrap()
                        .then(a.op_index.cmp(&b.op_index))
                })
                .expect("children list is nonempty");
            kept.push(best);
        }
        counters.pruned_children += before - kept.len();
        kept
    }

    /// Lexicographically smallest shortest undirected path from `s` to `t`.
    fn shortest_path(&self, s: usize, t: usize) -> Vec<usize> {
        let mut path = vec![s];
        let mut cur = s;
        while cur != t {
            let d = self.tables.dist_u(cur, t);
            let next = self
                .ag
                .neighbors(cur)
                .iter()
                .copied()
                .find(|&n| self.tables.dist_u(n, t) + 1 == d)
                .expect("connected graph has a descending neighbor");
            path.push(next);
            cur = next;
        }
        path
    }

    /// Execute the cheapest front-layer gate in place via a remote CNOT,
    /// preserving the mapping, then flush newly executable gates.
    pub fn fallback(
        &self,
        state: &mut SearchState,
        ops: &mut Vec<PhysOp>,
    ) -> Result<(), RouteError> {
        let front = self.dg.front(&state.cursor);
        let g = front
            .iter()
            .copied()
            .min_by_key(|&g| {
                let gate = self.dg.gates[g];
                (
                    gate_cost(gate, &state.tau, self.tables),
                    gate.control,
                    g,
                )
            })
            .expect("fallback requires a nonempty front layer");
        let gate = self.dg.gates[g];
        let (u, v) = (state.tau.phys(gate.control), state.tau.phys(gate.target));
        let path = self.shortest_path(u, v);
        let gates = remote_cnot_block(self.ag, &path)?;
        ops.push(PhysOp::Remote {
            core_idx: g,
            path,
            gates,
        });
        self.dg.execute(&mut state.cursor, g);
        state.stagnation = 0;
        self.execute_all(state, |core_idx, gate| {
            ops.push(PhysOp::Source { core_idx, gate });
        });
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Top-level routing
// ---------------------------------------------------------------------------

/// The routed physical circuit with its structural ops and wire tracking.
#[derive(Debug, Clone)]
pub struct RoutedCircuit {
    pub num_nodes: usize,
    pub ops: Vec<PhysOp>,
    pub tau_ini: Mapping,
    pub tau_final: Mapping,
    /// Net wire permutation of all inserted SWAP blocks: initial wire ->
    /// final wire.
    pub sigma: Vec<usize>,
    core_len: usize,
}

impl RoutedCircuit {
    pub fn core_len(&self) -> usize {
        self.core_len
    }

    pub fn flat_gates(&self) -> Vec<PhysGate> {
        self.ops.iter().flat_map(|op| op.gates().iter().copied()).collect()
    }

    pub fn clifford_gates(&self) -> Vec<crate::verify::CliffGate> {
        self.flat_gates()
            .into_iter()
            .map(|g| match g {
                PhysGate::Cnot { control, target } => {
                    crate::verify::CliffGate::Cnot { control, target }
                }
                PhysGate::H { qubit } => crate::verify::CliffGate::H { qubit },
            })
            .collect()
    }

    /// Flat physical circuit view.
    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.num_nodes, crate::circuit::Space::Physical);
        for op in &self.ops {
            let source = matches!(op, PhysOp::Source { .. });
            for g in op.gates() {
                let kind = match *g {
                    PhysGate::Cnot { control, target } => {
                        crate::circuit::GateKind::Cnot { control, target }
                    }
                    PhysGate::H { qubit } => crate::circuit::GateKind::H { target: qubit },
                };
                c.push(crate::circuit::Gate {
                    kind,
                    origin: if source {
                        crate::circuit::GateOrigin::Source
                    } else {
                        crate::circuit::GateOrigin::Inserted
                    },
                });
            }
        }
        c
    }

    pub fn gate_count(&self) -> usize {
        self.ops.iter().map(|op| op.gates().len()).sum()
    }
}

/// Routing outcome summary, serialized as the report JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RouteReport {
    pub arch: String,
    pub num_physical: usize,
    pub original_size: usize,
    pub output_size: usize,
    pub added_gates: usize,
    pub cnot_core_size: usize,
    pub passthrough_gates: usize,
    pub swap_count: usize,
    pub reversal_count: usize,
    pub fallback_count: usize,
    pub pruned_children: usize,
    /// Selection rounds taken by the search (bounded by K * core size).
    pub states_expanded: usize,
    pub children_evaluated: usize,
    pub grandchildren_evaluated: usize,
    /// Largest number of simultaneously materialized candidate states.
    pub peak_frontier: usize,
    pub fallback_threshold: u32,
    pub lookahead_depth: u32,
    pub pruning: bool,
    pub wall_time_ms: u64,
    pub seed: Option<u64>,
    pub sa_cost: Option<u64>,
    pub sa_start_cost: Option<u64>,
    pub tau_ini: Vec<usize>,
    pub final_mapping: Vec<usize>,
    pub final_sigma: Vec<usize>,
    /// How source registers were flattened into the logical index space.
    #[serde(default)]
    pub flattening: Vec<crate::circuit::RegSpan>,
}

/// Transform a logical circuit into one respecting `ag`, starting from
/// `tau_ini`.
pub fn route(
    circuit: &Circuit,
    ag: &ArchGraph,
    tables: &DistanceTables,
    tau_ini: Mapping,
    params: CostParams,
) -> Result<(RoutedCircuit, RouteReport), RouteError> {
    let start = Instant::now();
    if circuit.num_qubits > ag.num_nodes {
        return Err(RouteError::TooManyQubits {
            logical: circuit.num_qubits,
            physical: ag.num_nodes,
        });
    }
    if tau_ini.num_logical() != circuit.num_qubits || tau_ini.num_physical() != ag.num_nodes {
        return Err(RouteError::MappingMismatch);
    }

    let core = circuit.cnot_core();
    let core_len = core.len();
    let passthrough = circuit.size() - core_len;
    let dg = DependencyGraph::build(circuit.num_qubits, &core);
    let depth = params.lookahead_depth;
    let prune = params.prune;
    let router = Router::new(ag, tables, dg, params)?;

    let mut counters = RouteCounters::default();
    let mut ops: Vec<PhysOp> = Vec::new();
    let mut sigma: Vec<usize> = (0..ag.num_nodes).collect();
    let mut state = router.initial_state(tau_ini.clone());
    router.execute_all(&mut state, |core_idx, gate| {
        ops.push(PhysOp::Source { core_idx, gate });
    });

    while !router.dg.is_done(&state.cursor) {
        if state.stagnation >= router.threshold {
            router.fallback(&mut state, &mut ops)?;
            counters.fallback_count += 1;
            continue;
        }
        let mut kids = router.children(&state)?;
        counters.children_evaluated += kids.len();
        counters.peak_frontier = counters.peak_frontier.max(kids.len());
        if prune {
            kids = router.prune_children(&state, kids, &mut counters);
        }
        let chosen = kids
            .into_iter()
            .map(|kid| {
                let value = kid.gcost as f64 + router.lookahead_value(&kid.state, depth, &mut counters);
                (value, kid)
            })
            .min_by(|(va, a), (vb, b)| {
                va.partial_cmp(vb)
                    .unwrap()
                    .then_with(|| {
                        router
                            .dg
                            .remaining(&a.state.cursor)
                            .cmp(&router.dg.remaining(&b.state.cursor))
                    })
                    .then(a.op_index.cmp(&b.op_index))
            })
            .map(|(_, kid)| kid)
            .expect("a state with remaining gates has at least one child");
        counters.states_expanded += 1;
        match chosen.op {
            ChildOp::Swap { u, v } => {
                counters.swap_count += 1;
                for w in sigma.iter_mut() {
                    if *w == u {
                        *w = v;
                    } else if *w == v {
                        *w = u;
                    }
                }
            }
            ChildOp::Reversal { .. } => counters.reversal_count += 1,
        }
        ops.extend(chosen.ops);
        state = chosen.state;
    }

    // Wire tracking must agree with the mapping drift.
    debug_assert!((0..circuit.num_qubits)
        .all(|q| sigma[tau_ini.phys(q)] == state.tau.phys(q)));
    debug_assert!(ops.iter().all(|op| op
        .gates()
        .iter()
        .all(|g| match *g {
            PhysGate::Cnot { control, target } => ag.has_edge(control, target),
            PhysGate::H { .. } => true,
        })));

    let routed = RoutedCircuit {
        num_nodes: ag.num_nodes,
        ops,
        tau_ini: tau_ini.clone(),
        tau_final: state.tau.clone(),
        sigma: sigma.clone(),
        core_len,
    };
    let output_size = routed.gate_count() + passthrough;
    let original_size = circuit.size();
    let report = RouteReport {
        arch: ag.name.clone(),
        num_physical: ag.num_nodes,
        original_size,
        output_size,
        added_gates: output_size - original_size,
        cnot_core_size: core_len,
        passthrough_gates: passthrough,
        swap_count: counters.swap_count,
        reversal_count: counters.reversal_count,
        fallback_count: counters.fallback_count,
        pruned_children: counters.pruned_children,
        states_expanded: counters.states_expanded,
        children_evaluated: counters.children_evaluated,
        grandchildren_evaluated: counters.grandchildren_evaluated,
        peak_frontier: counters.peak_frontier,
        fallback_threshold: router.threshold,
        lookahead_depth: depth,
        pruning: prune,
        wall_time_ms: start.elapsed().as_millis() as u64,
        seed: None,
        sa_cost: None,
        sa_start_cost: None,
        tau_ini: tau_ini.assignments().to_vec(),
        final_mapping: state.tau.assignments().to_vec(),
        final_sigma: sigma,
        flattening: Vec::new(),
    };
    Ok((routed, report))
}
