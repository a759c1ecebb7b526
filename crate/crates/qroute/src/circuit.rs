//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered gate list over a single flat qubit index
//! space, tagged as logical (unconstrained) or physical (architecture
//! respecting). Routing itself only moves CNOT gates around; every
//! single-qubit gate is carried in a [`PassthroughPlan`] that anchors it to
//! the preceding CNOT on the same qubit so it can be re-emitted on the right
//! wire after transformation.

use thiserror::Error;

/// Index space a circuit's qubit indices refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Logical,
    Physical,
}

/// Whether a gate came from the source circuit or was inserted by routing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateOrigin {
    Source,
    Inserted,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Cnot { control: usize, target: usize },
    H { target: usize },
    /// Any other supported single-qubit gate, kept opaque for routing.
    Other {
        name: String,
        params: Vec<f64>,
        qubits: Vec<usize>,
    },
}

impl GateKind {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            GateKind::Cnot { control, target } => vec![*control, *target],
            GateKind::H { target } => vec![*target],
            GateKind::Other { qubits, .. } => qubits.clone(),
        }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, GateKind::Cnot { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub origin: GateOrigin,
}

impl Gate {
    pub fn source(kind: GateKind) -> Self {
        Gate {
            kind,
            origin: GateOrigin::Source,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT control and target must differ");
        Gate::source(GateKind::Cnot { control, target })
    }
}

/// A CNOT of the routing core, control first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CnotGate {
    pub control: usize,
    pub target: usize,
}

impl CnotGate {
    pub fn new(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT control and target must differ");
        CnotGate { control, target }
    }
}

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("CNOT control and target coincide on qubit {0}")]
    DegenerateCnot(usize),
    #[error("multi-qubit non-CNOT gate `{0}` is not supported")]
    UnsupportedArity(String),
}

/// An ordered gate list over `num_qubits` wires.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    pub space: Space,
}

impl Circuit {
    pub fn new(num_qubits: usize, space: Space) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
            space,
        }
    }

    /// Validating constructor: every index in range, CNOTs non-degenerate,
    /// non-CNOT gates single-qubit.
    pub fn with_gates(
        num_qubits: usize,
        space: Space,
        gates: Vec<Gate>,
    ) -> Result<Self, CircuitError> {
        for g in &gates {
            for q in g.kind.qubits() {
                if q >= num_qubits {
                    return Err(CircuitError::QubitOutOfRange {
                        index: q,
                        num_qubits,
                    });
                }
            }
            match &g.kind {
                GateKind::Cnot { control, target } if control == target => {
                    return Err(CircuitError::DegenerateCnot(*control));
                }
                GateKind::Other { name, qubits, .. } if qubits.len() != 1 => {
                    return Err(CircuitError::UnsupportedArity(name.clone()));
                }
                _ => {}
            }
        }
        Ok(Circuit {
            num_qubits,
            gates,
            space,
        })
    }

    /// The CNOT-only core that drives routing, in source order.
    pub fn cnot_core(&self) -> Vec<CnotGate> {
        self.gates
            .iter()
            .filter_map(|g| match g.kind {
                GateKind::Cnot { control, target } => Some(CnotGate { control, target }),
                _ => None,
            })
            .collect()
    }

    /// Gate count (all gate statements; measures and barriers are not gates).
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }
}

/// A single-qubit gate waiting to be re-inserted after routing.
///
/// `anchor` is the index (into the CNOT core) of the last core gate on the
/// same qubit before this gate in source order, or `None` when the gate
/// precedes every CNOT on its qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct PassthroughGate {
    pub kind: GateKind,
    pub qubit: usize,
    pub anchor: Option<usize>,
}

/// End-of-circuit measurement, deferred through the final mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    pub qubit: usize,
    pub creg: String,
    pub bit: usize,
}

/// One flattened quantum register from the source file.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegSpan {
    pub name: String,
    pub offset: usize,
    pub size: usize,
}

/// Everything stripped from the source that emission has to restore:
/// single-qubit gates with their anchors, deferred measurements, classical
/// registers and the register flattening table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PassthroughPlan {
    pub items: Vec<PassthroughGate>,
    pub measures: Vec<Measure>,
    pub cregs: Vec<(String, usize)>,
    pub flattening: Vec<RegSpan>,
    pub warnings: Vec<String>,
}

impl PassthroughPlan {
    /// Derive the anchor plan from a full circuit. Measures, registers and
    /// warnings cannot be reconstructed this way; only the gate items are.
    pub fn from_circuit(circuit: &Circuit) -> Self {
        let mut items = Vec::new();
        let mut last_core: Vec<Option<usize>> = vec![None; circuit.num_qubits];
        let mut core_idx = 0usize;
        for g in &circuit.gates {
            match &g.kind {
                GateKind::Cnot { control, target } => {
                    last_core[*control] = Some(core_idx);
                    last_core[*target] = Some(core_idx);
                    core_idx += 1;
                }
                kind => {
                    let qubit = kind.qubits()[0];
                    items.push(PassthroughGate {
                        kind: kind.clone(),
                        qubit,
                        anchor: last_core[qubit],
                    });
                }
            }
        }
        PassthroughPlan {
            items,
            ..Default::default()
        }
    }
}
