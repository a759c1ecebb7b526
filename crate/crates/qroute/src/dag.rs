//! Gate dependency graph and layer views of the CNOT core.
//!
//! Two CNOTs depend on each other when they share a qubit; the direct
//! dependency edges (no gate between them on the shared qubit) form a DAG
//! whose transitive closure is the full depends-on relation. The front layer
//! is the set of gates with no unexecuted parents, and deleting layer after
//! layer yields the layered view used by the look-ahead cost function.
//!
//! The search never mutates the graph; it advances a tiny [`GateCursor`]
//! (one queue position per qubit) that is cheap to clone per candidate
//! state.

use crate::circuit::CnotGate;

#[derive(Debug, Clone)]
pub struct DependencyGraph {
    pub num_qubits: usize,
    pub gates: Vec<CnotGate>,
    /// Direct-dependency parents of each gate (deduplicated, at most 2).
    pub parents: Vec<Vec<usize>>,
    /// Direct-dependency children of each gate.
    pub children: Vec<Vec<usize>>,
    /// For each qubit, the core gate indices touching it, in circuit order.
    pub qubit_queues: Vec<Vec<usize>>,
    /// For each gate, its position inside the queues of (control, target).
    queue_pos: Vec<(usize, usize)>,
}

impl DependencyGraph {
    /// One pass with a per-qubit last-gate tracker.
    pub fn build(num_qubits: usize, gates: &[CnotGate]) -> Self {
        let mut parents: Vec<Vec<usize>> = vec![Vec::new(); gates.len()];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); gates.len()];
        let mut qubit_queues: Vec<Vec<usize>> = vec![Vec::new(); num_qubits];
        let mut queue_pos = Vec::with_capacity(gates.len());
        let mut last: Vec<Option<usize>> = vec![None; num_qubits];

        for (i, g) in gates.iter().enumerate() {
            let mut ps: Vec<usize> = [last[g.control], last[g.target]]
                .into_iter()
                .flatten()
                .collect();
            ps.sort_unstable();
            ps.dedup();
            for &p in &ps {
                children[p].push(i);
            }
            parents[i] = ps;
            queue_pos.push((qubit_queues[g.control].len(), qubit_queues[g.target].len()));
            qubit_queues[g.control].push(i);
            qubit_queues[g.target].push(i);
            last[g.control] = Some(i);
            last[g.target] = Some(i);
        }

        DependencyGraph {
            num_qubits,
            gates: gates.to_vec(),
            parents,
            children,
            qubit_queues,
            queue_pos,
        }
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn fresh_cursor(&self) -> GateCursor {
        GateCursor {
            next_pos: vec![0; self.num_qubits],
            executed: 0,
        }
    }

    /// Is `gate` in the front layer at `cursor`?
    pub fn is_front(&self, cursor: &GateCursor, gate: usize) -> bool {
        let g = self.gates[gate];
        let (pc, pt) = self.queue_pos[gate];
        cursor.next_pos[g.control] == pc && cursor.next_pos[g.target] == pt
    }

    /// Front layer at `cursor`, ascending by gate index. Every front gate
    /// sits at the head of both its queues, so scanning control queues alone
    /// finds each exactly once.
    pub fn front(&self, cursor: &GateCursor) -> Vec<usize> {
        let mut out = Vec::new();
        for q in 0..self.num_qubits {
            if let Some(&g) = self.qubit_queues[q].get(cursor.next_pos[q]) {
                if self.gates[g].control == q && self.is_front(cursor, g) {
                    out.push(g);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Has `gate` already been executed at `cursor`?
    pub fn is_executed(&self, cursor: &GateCursor, gate: usize) -> bool {
        let g = self.gates[gate];
        let (pc, _) = self.queue_pos[gate];
        cursor.next_pos[g.control] > pc
    }

    /// Execute a front gate: advance both queue pointers.
    pub fn execute(&self, cursor: &mut GateCursor, gate: usize) {
        debug_assert!(self.is_front(cursor, gate), "gate {gate} is not in the front layer");
        let g = self.gates[gate];
        cursor.next_pos[g.control] += 1;
        cursor.next_pos[g.target] += 1;
        cursor.executed += 1;
    }

    pub fn remaining(&self, cursor: &GateCursor) -> usize {
        self.gates.len() - cursor.executed
    }

    pub fn is_done(&self, cursor: &GateCursor) -> bool {
        cursor.executed == self.gates.len()
    }

    /// Up to `max_layers` layers of the remaining circuit: `layers[0]` is the
    /// front layer, `layers[k+1]` the front layer after deleting the first
    /// `k+1` layers. Stops early when the circuit is exhausted.
    pub fn layers(&self, cursor: &GateCursor, max_layers: Option<usize>) -> Vec<Vec<usize>> {
        let mut scratch = cursor.clone();
        let mut out = Vec::new();
        loop {
            if let Some(m) = max_layers {
                if out.len() >= m {
                    break;
                }
            }
            let layer = self.front(&scratch);
            if layer.is_empty() {
                break;
            }
            for &g in &layer {
                self.execute(&mut scratch, g);
            }
            out.push(layer);
        }
        out
    }
}

/// Position of a search state inside the dependency graph: for each qubit,
/// the index of the next unexecuted gate in that qubit's queue. The executed
/// set it encodes is downward-closed by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateCursor {
    next_pos: Vec<usize>,
    executed: usize,
}

impl GateCursor {
    pub fn executed_count(&self) -> usize {
        self.executed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnots(pairs: &[(usize, usize)]) -> Vec<CnotGate> {
        pairs.iter().map(|&(c, t)| CnotGate::new(c, t)).collect()
    }

    /// The five-gate layering example: g0, g1 independent; g2 after g0; g3
    /// after g2 and g0; g4 after g3 and g1.
    fn layered_example() -> (DependencyGraph, Vec<CnotGate>) {
        let gs = cnots(&[(0, 1), (3, 4), (1, 2), (2, 0), (0, 4)]);
        (DependencyGraph::build(5, &gs), gs)
    }

    #[test]
    fn front_and_layers_match_hand_computation() {
        let (dg, _) = layered_example();
        let cur = dg.fresh_cursor();
        assert_eq!(dg.front(&cur), vec![0, 1]);
        let layers = dg.layers(&cur, None);
        assert_eq!(layers, vec![vec![0, 1], vec![2], vec![3], vec![4]]);
    }

    #[test]
    fn layers_after_partial_execution() {
        let (dg, _) = layered_example();
        let mut cur = dg.fresh_cursor();
        dg.execute(&mut cur, 0);
        dg.execute(&mut cur, 1);
        let layers = dg.layers(&cur, Some(1));
        assert_eq!(layers, vec![vec![2]]);
        assert_eq!(dg.remaining(&cur), 3);
    }

    #[test]
    fn disjoint_gates_form_single_layer() {
        let gs = cnots(&[(0, 1), (2, 3), (4, 5)]);
        let dg = DependencyGraph::build(6, &gs);
        assert_eq!(dg.layers(&dg.fresh_cursor(), None), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn chain_forms_singleton_layers() {
        let gs = cnots(&[(0, 1), (1, 2), (2, 3)]);
        let dg = DependencyGraph::build(4, &gs);
        assert_eq!(
            dg.layers(&dg.fresh_cursor(), None),
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn exhausted_circuit_has_no_layers() {
        let gs = cnots(&[(0, 1)]);
        let dg = DependencyGraph::build(2, &gs);
        let mut cur = dg.fresh_cursor();
        dg.execute(&mut cur, 0);
        assert!(dg.layers(&cur, None).is_empty());
        assert!(dg.is_done(&cur));
    }

    #[test]
    fn direct_parents_only() {
        let (dg, _) = layered_example();
        // g3 shares q2 with g2 and q0 with g0; both are its direct parents.
        assert_eq!(dg.parents[3], vec![0, 2]);
        // g4 shares q0 with g3 (not g0: g3 is between) and q4 with g1.
        assert_eq!(dg.parents[4], vec![1, 3]);
    }

    #[test]
    fn topological_soundness_on_random_circuits() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.random_range(2..8);
            let m = rng.random_range(1..40);
            let gs: Vec<CnotGate> = (0..m)
                .map(|_| {
                    let c = rng.random_range(0..n);
                    let mut t = rng.random_range(0..n);
                    while t == c {
                        t = rng.random_range(0..n);
                    }
                    CnotGate::new(c, t)
                })
                .collect();
            let dg = DependencyGraph::build(n, &gs);
            for (child, ps) in dg.parents.iter().enumerate() {
                for &p in ps {
                    assert!(p < child, "dependency edge must point forward");
                }
            }
            // Union of all layers is exactly the remaining set, disjointly.
            let layers = dg.layers(&dg.fresh_cursor(), None);
            let mut seen = vec![false; m];
            for layer in &layers {
                for &g in layer {
                    assert!(!seen[g], "layers must be pairwise disjoint");
                    seen[g] = true;
                }
            }
            assert!(seen.iter().all(|&s| s), "layers must cover the circuit");
        }
    }
}
