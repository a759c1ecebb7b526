//! Parametric fixture generators: QFT and Ising-model circuit skeletons and
//! seeded random CNOT circuits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, GateKind, Space};

fn rz(q: usize, theta: f64) -> Gate {
    Gate::source(GateKind::Other {
        name: "rz".into(),
        params: vec![theta],
        qubits: vec![q],
    })
}

fn rx(q: usize, theta: f64) -> Gate {
    Gate::source(GateKind::Other {
        name: "rx".into(),
        params: vec![theta],
        qubits: vec![q],
    })
}

fn u1(q: usize, theta: f64) -> Gate {
    Gate::source(GateKind::Other {
        name: "u1".into(),
        params: vec![theta],
        qubits: vec![q],
    })
}

fn h(q: usize) -> Gate {
    Gate::source(GateKind::H { target: q })
}

/// Quantum Fourier transform skeleton on `n` qubits.
///
/// Each controlled-phase gate is decomposed into 2 CNOTs and 3 u1 rotations,
/// so the circuit has `n + 5 * n * (n - 1) / 2` gates and a complete
/// interaction graph. Published benchmark files of the same name merge some
/// rotations and land on smaller totals; the CNOT count (`n * (n - 1)`)
/// matches.
pub fn qft(n: usize) -> Circuit {
    let mut c = Circuit::new(n, Space::Logical);
    for j in 0..n {
        c.push(h(j));
        for k in (j + 1)..n {
            // Controlled phase by pi / 2^(k - j) from qubit k onto qubit j.
            let lambda = std::f64::consts::PI / ((1u64 << (k - j)) as f64);
            c.push(u1(k, lambda / 2.0));
            c.push(Gate::cnot(k, j));
            c.push(u1(j, -lambda / 2.0));
            c.push(Gate::cnot(k, j));
            c.push(u1(j, lambda / 2.0));
        }
    }
    c
}

/// Trotterized 1-D transverse-field Ising evolution on `n` qubits.
///
/// One Hadamard per qubit, then `steps` rounds; each round applies
/// `cx, rz, cx` on every chain edge and `rz, rx` on every qubit:
/// `n + steps * (5n - 3)` gates with a path interaction graph. Ten steps
/// reproduce the published benchmark sizes (480 gates at n = 10, 633 at
/// n = 13, 786 at n = 16).
pub fn ising_model(n: usize, steps: usize) -> Circuit {
    let mut c = Circuit::new(n, Space::Logical);
    for q in 0..n {
        c.push(h(q));
    }
    for s in 0..steps {
        let theta = 0.1 + 0.05 * s as f64;
        for i in 0..n - 1 {
            c.push(Gate::cnot(i, i + 1));
            c.push(rz(i + 1, theta));
            c.push(Gate::cnot(i, i + 1));
        }
        for q in 0..n {
            c.push(rz(q, 0.35));
            c.push(rx(q, 0.7));
        }
    }
    c
}

/// Seeded random circuit: `cnots` CNOTs over `n` qubits on uniformly chosen
/// distinct pairs, with an optional fraction of interleaved single-qubit
/// gates.
pub fn random_circuit(n: usize, cnots: usize, seed: u64, single_fraction: f64) -> Circuit {
    assert!(n >= 2, "need at least two qubits");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n, Space::Logical);
    let singles = ["t", "tdg", "s", "x", "z"];
    for _ in 0..cnots {
        if single_fraction > 0.0 && rng.random_bool(single_fraction.clamp(0.0, 1.0)) {
            let q = rng.random_range(0..n);
            if rng.random_bool(0.3) {
                c.push(h(q));
            } else {
                let name = singles[rng.random_range(0..singles.len())];
                c.push(Gate::source(GateKind::Other {
                    name: name.to_string(),
                    params: vec![],
                    qubits: vec![q],
                }));
            }
        }
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n);
        while b == a {
            b = rng.random_range(0..n);
        }
        c.push(Gate::cnot(a, b));
    }
    c
}
