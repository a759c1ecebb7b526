//! Logical-to-physical qubit mappings and the simulated-annealing search
//! for a good initial mapping.
//!
//! The annealer minimizes the summed CNOT distance of a gate subset `C*`
//! (the first `subset_cap` gates of the circuit: tail gates have little
//! influence on where qubits should start). Candidate mappings are accepted
//! unconditionally when they improve the current cost and with Metropolis
//! probability `exp((cost - ncost) / T)` otherwise; the best mapping ever
//! seen is tracked separately and returned. All randomness flows from the
//! caller-provided seed, so runs are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arch::{ArchGraph, DistanceTables};
use crate::circuit::CnotGate;

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("need |Q| <= |V|: {logical} logical qubits but only {physical} physical")]
    TooManyQubits { logical: usize, physical: usize },
    #[error("gate subset C* must be nonempty (cap must be >= 1)")]
    EmptySubset,
    #[error("invalid SA parameters: {0}")]
    BadParams(String),
    #[error("mapping image {image} out of range for {physical} physical qubits")]
    ImageOutOfRange { image: usize, physical: usize },
    #[error("mapping is not injective: physical qubit {0} assigned twice")]
    NotInjective(usize),
}

/// Injective assignment of logical qubits to physical nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    assign: Vec<usize>,
    /// Reverse index over physical nodes.
    occupied: Vec<Option<usize>>,
}

impl Mapping {
    /// The naive mapping: logical `q_i` on physical `v_i`.
    pub fn identity_prefix(num_logical: usize, num_physical: usize) -> Self {
        assert!(num_logical <= num_physical, "need |Q| <= |V|");
        let mut occupied = vec![None; num_physical];
        for (q, slot) in occupied.iter_mut().take(num_logical).enumerate() {
            *slot = Some(q);
        }
        Mapping {
            assign: (0..num_logical).collect(),
            occupied,
        }
    }

    pub fn from_assignment(assign: Vec<usize>, num_physical: usize) -> Result<Self, MappingError> {
        if assign.len() > num_physical {
            return Err(MappingError::TooManyQubits {
                logical: assign.len(),
                physical: num_physical,
            });
        }
        let mut occupied = vec![None; num_physical];
        for (q, &v) in assign.iter().enumerate() {
            if v >= num_physical {
                return Err(MappingError::ImageOutOfRange {
                    image: v,
                    physical: num_physical,
                });
            }
            if occupied[v].is_some() {
                return Err(MappingError::NotInjective(v));
            }
            occupied[v] = Some(q);
        }
        Ok(Mapping { assign, occupied })
    }

    pub fn num_logical(&self) -> usize {
        self.assign.len()
    }

    pub fn num_physical(&self) -> usize {
        self.occupied.len()
    }

    /// Physical image of logical qubit `q`.
    #[inline]
    pub fn phys(&self, q: usize) -> usize {
        self.assign[q]
    }

    /// Logical qubit currently on physical node `v`, if any.
    #[inline]
    pub fn logical_at(&self, v: usize) -> Option<usize> {
        self.occupied[v]
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assign
    }

    /// Exchange the contents of physical nodes `u` and `v` (either or both
    /// may be unoccupied).
    pub fn swap_phys(&mut self, u: usize, v: usize) {
        let qu = self.occupied[u];
        let qv = self.occupied[v];
        if let Some(q) = qu {
            self.assign[q] = v;
        }
        if let Some(q) = qv {
            self.assign[q] = u;
        }
        self.occupied.swap(u, v);
    }

    /// Exchange the images of two logical qubits.
    pub fn swap_logical(&mut self, a: usize, b: usize) {
        let (va, vb) = (self.assign[a], self.assign[b]);
        self.assign[a] = vb;
        self.assign[b] = va;
        self.occupied[va] = Some(b);
        self.occupied[vb] = Some(a);
    }

    /// Move logical qubit `q` to the unoccupied physical node `v`.
    pub fn move_to(&mut self, q: usize, v: usize) {
        debug_assert!(self.occupied[v].is_none(), "target node must be free");
        self.occupied[self.assign[q]] = None;
        self.assign[q] = v;
        self.occupied[v] = Some(q);
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.occupied.len()];
        for &v in &self.assign {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }
}

/// Auxiliary-gate cost of executing `g` under `tau`: the CNOT distance of
/// its images.
#[inline]
pub fn gate_cost(g: CnotGate, tau: &Mapping, tables: &DistanceTables) -> u32 {
    tables.cnot_distance_unchecked(tau.phys(g.control), tau.phys(g.target))
}

/// Total gate cost of a mapping over the gate subset `cstar`.
pub fn mapping_cost(cstar: &[CnotGate], tau: &Mapping, tables: &DistanceTables) -> u64 {
    cstar
        .iter()
        .map(|&g| gate_cost(g, tau, tables) as u64)
        .sum()
}

/// The first `min(|circuit|, cap)` CNOT gates in circuit order.
pub fn select_cstar(core: &[CnotGate], cap: usize) -> Result<&[CnotGate], MappingError> {
    if cap == 0 || core.is_empty() {
        return Err(MappingError::EmptySubset);
    }
    Ok(&core[..core.len().min(cap)])
}

/// Simulated-annealing schedule parameters.
#[derive(Debug, Clone)]
pub struct SaParams {
    /// Starting temperature.
    pub t_max: f64,
    /// Minimum temperature; the outer loop stops below it.
    pub t_min: f64,
    /// Multiplicative decline coefficient per outer round.
    pub delta: f64,
    /// Inner iterations per temperature.
    pub r: u32,
    pub seed: u64,
    /// Gates of the circuit prefix used as `C*`.
    pub subset_cap: usize,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            t_max: 100.0,
            t_min: 1.0,
            delta: 0.98,
            r: 100,
            seed: 0,
            subset_cap: 1000,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<(), MappingError> {
        if !(self.t_max > self.t_min && self.t_min > 0.0) {
            return Err(MappingError::BadParams(format!(
                "need t_max > t_min > 0, got t_max={} t_min={}",
                self.t_max, self.t_min
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(MappingError::BadParams(format!(
                "need 0 < delta < 1, got {}",
                self.delta
            )));
        }
        if self.r < 1 {
            return Err(MappingError::BadParams("need r >= 1".into()));
        }
        if self.subset_cap == 0 {
            return Err(MappingError::EmptySubset);
        }
        Ok(())
    }
}

/// One point of the annealing trace (per inner iteration).
#[derive(Debug, Clone, Copy)]
pub struct TracePoint {
    pub iter: u64,
    pub accepted_cost: u64,
    pub best_cost: u64,
}

#[derive(Debug, Clone)]
pub struct SaResult {
    pub mapping: Mapping,
    pub cost: u64,
    /// Cost of the starting mapping, for improvement reporting.
    pub start_cost: u64,
    pub trace: Vec<TracePoint>,
}

/// Metropolis acceptance rule: always accept improvements, otherwise accept
/// with probability `exp((cost - ncost) / t)`.
pub fn metropolis_accept(cost: u64, ncost: u64, t: f64, rng: &mut impl Rng) -> bool {
    if ncost < cost {
        return true;
    }
    let p = ((cost as f64 - ncost as f64) / t).exp();
    rng.random_bool(p.clamp(0.0, 1.0))
}

/// Randomly perturb a mapping. With `|Q| = |V|` the images of two distinct
/// logical qubits are swapped; otherwise, with probability 1/2 two images
/// are swapped, else one logical qubit moves to a uniformly chosen
/// unoccupied node. The result is always injective.
pub fn sa_neighbor(tau: &Mapping, rng: &mut impl Rng) -> Mapping {
    let mut next = tau.clone();
    let nq = tau.num_logical();
    let nv = tau.num_physical();
    if nq < 2 && nq == nv {
        return next;
    }
    let swap = nq == nv || rng.random_bool(0.5);
    if swap && nq >= 2 {
        let a = rng.random_range(0..nq);
        let mut b = rng.random_range(0..nq);
        while b == a {
            b = rng.random_range(0..nq);
        }
        next.swap_logical(a, b);
    } else {
        let q = rng.random_range(0..nq);
        let free: Vec<usize> = (0..nv).filter(|&v| tau.logical_at(v).is_none()).collect();
        let v = free[rng.random_range(0..free.len())];
        next.move_to(q, v);
    }
    next
}

/// Simulated annealing for the initial mapping.
///
/// Starts from `start` (default: identity prefix), runs `R` proposals per
/// temperature epoch, cools by `delta` per epoch until `t_min`, and returns
/// the best mapping seen together with the accepted-cost / best-cost traces.
pub fn sa_initial_mapping(
    cstar: &[CnotGate],
    ag: &ArchGraph,
    tables: &DistanceTables,
    num_logical: usize,
    params: &SaParams,
    start: Option<Mapping>,
) -> Result<SaResult, MappingError> {
    params.validate()?;
    if cstar.is_empty() || num_logical == 0 {
        return Err(MappingError::EmptySubset);
    }
    if num_logical > ag.num_nodes {
        return Err(MappingError::TooManyQubits {
            logical: num_logical,
            physical: ag.num_nodes,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut tau = start.unwrap_or_else(|| Mapping::identity_prefix(num_logical, ag.num_nodes));
    let mut cost = mapping_cost(cstar, &tau, tables);
    let start_cost = cost;
    let mut best = tau.clone();
    let mut bcost = cost;

    let mut trace = Vec::new();
    let mut iter = 0u64;
    let mut t = params.t_max;
    while t >= params.t_min {
        for _ in 0..params.r {
            iter += 1;
            let candidate = sa_neighbor(&tau, &mut rng);
            let ncost = mapping_cost(cstar, &candidate, tables);
            if ncost < bcost {
                bcost = ncost;
                best = candidate.clone();
            }
            if metropolis_accept(cost, ncost, t, &mut rng) {
                cost = ncost;
                tau = candidate;
            }
            trace.push(TracePoint {
                iter,
                accepted_cost: cost,
                best_cost: bcost,
            });
        }
        t *= params.delta;
    }

    Ok(SaResult {
        mapping: best,
        cost: bcost,
        start_cost,
        trace,
    })
}

/// Write an annealing trace as CSV: `iteration,accepted_cost,best_cost`.
pub fn trace_csv(trace: &[TracePoint]) -> String {
    let mut out = String::from("iteration,accepted_cost,best_cost\n");
    for p in trace {
        out.push_str(&format!("{},{},{}\n", p.iter, p.accepted_cost, p.best_cost));
    }
    out
}
