//! Qubit mapping and routing for connectivity-constrained quantum processors.
//!
//! `qroute` turns a connectivity-unconstrained circuit into one whose CNOT
//! gates all lie on directed edges of a target architecture graph. The
//! pipeline is:
//!
//! 1. parse an OpenQASM 2.0 subset into a circuit IR ([`circuit`], [`qasm`]),
//! 2. pick an initial logical-to-physical mapping by simulated annealing
//!    ([`mapping`]),
//! 3. insert SWAP / direction-reversal / remote-CNOT blocks with a double
//!    look-ahead heuristic search ([`router`]),
//! 4. check the output against the input with an independent GF(2) /
//!    stabilizer-tableau oracle ([`verify`]).
//!
//! The `qroute` binary wraps the library in batch subcommands (`transform`,
//! `verify`, `bench`, `gen`, `dist`); see [`cli`].

pub mod arch;
pub mod circuit;
pub mod cli;
pub mod dag;
pub mod generators;
pub mod mapping;
pub mod qasm;
pub mod router;
pub mod verify;

pub use arch::{ArchGraph, DistanceTables};
pub use circuit::{Circuit, Gate, GateKind, GateOrigin, PassthroughPlan, Space};
pub use dag::{DependencyGraph, GateCursor};
pub use mapping::{Mapping, SaParams, SaResult};
pub use router::{route, CostParams, RouteReport, RoutedCircuit};
pub use verify::{check_equivalence, CliffGate, CliffordTableau, Gf2Map};
