//! The bundled fixture corpus: statistics and structural facts the rest of
//! the suite relies on.

use std::path::PathBuf;

use qroute::circuit::GateKind;
use qroute::dag::DependencyGraph;
use qroute::qasm::parse_qasm;

fn load(name: &str) -> qroute::qasm::Parsed {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    parse_qasm(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fixture_statistics_match_the_published_totals() {
    // (file, qubits, total gates, CNOTs)
    let expected = [
        ("4mod5-v1_22.qasm", 5, 21, 11),
        ("mod5mils_65.qasm", 5, 35, 16),
        ("decod24-v2_43.qasm", 4, 52, 22),
        ("4gt13_92.qasm", 5, 66, 30),
        ("alu-v0_27.qasm", 5, 36, 17),
    ];
    for (file, qubits, total, cnots) in expected {
        let parsed = load(file);
        assert_eq!(parsed.circuit.num_qubits, qubits, "{file} qubits");
        assert_eq!(parsed.circuit.size(), total, "{file} total gates");
        assert_eq!(parsed.circuit.cnot_core().len(), cnots, "{file} CNOTs");
        assert_eq!(
            parsed.plan.measures.len(),
            qubits,
            "{file} measures every qubit"
        );
    }
}

#[test]
fn alu_core_opens_with_the_known_front_layer() {
    // With single-qubit gates removed, the circuit is a 17-CNOT core whose
    // first gate is <q2,q1> and whose front layer also holds the
    // independent <q3,q4>.
    let parsed = load("alu-v0_27.qasm");
    let core = parsed.circuit.cnot_core();
    assert_eq!(core.len(), 17);
    assert_eq!((core[0].control, core[0].target), (2, 1));
    assert_eq!((core[1].control, core[1].target), (3, 4));
    let dg = DependencyGraph::build(5, &core);
    assert_eq!(dg.front(&dg.fresh_cursor()), vec![0, 1]);
}

#[test]
fn fixture_passthroughs_are_single_qubit_only() {
    for file in [
        "4mod5-v1_22.qasm",
        "mod5mils_65.qasm",
        "decod24-v2_43.qasm",
        "4gt13_92.qasm",
        "alu-v0_27.qasm",
    ] {
        let parsed = load(file);
        for item in &parsed.plan.items {
            match &item.kind {
                GateKind::H { .. } => {}
                GateKind::Other { qubits, .. } => assert_eq!(qubits.len(), 1),
                GateKind::Cnot { .. } => panic!("CNOT in the passthrough plan"),
            }
        }
    }
}
