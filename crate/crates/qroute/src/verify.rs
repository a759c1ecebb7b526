//! Independent functional-equivalence oracle.
//!
//! Two semantic models cross-check the transformation:
//!
//! * [`Gf2Map`] — a CNOT-only circuit is a linear map on basis states over
//!   GF(2); CNOT(c, t) adds row c into row t of the matrix.
//! * [`CliffordTableau`] — an H+CNOT circuit is a Clifford unitary, fully
//!   determined by its action on the Pauli generators `X_i`, `Z_i` including
//!   exact phases.
//!
//! [`check_equivalence`] verifies that a routed physical circuit equals the
//! logical circuit embedded through the initial mapping followed by the net
//! wire permutation accumulated by the inserted SWAP blocks. All identities
//! the router inserts (SWAP decompositions, direction reversals, remote
//! CNOT ladders) are exact, not merely up-to-phase, so tableau comparison is
//! exact equality including signs.

use thiserror::Error;

use crate::circuit::{Circuit, GateKind};
use crate::mapping::Mapping;

/// Gate alphabet of the verified core.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliffGate {
    Cnot { control: usize, target: usize },
    H { qubit: usize },
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("circuit contains a non-CNOT gate; GF(2) semantics are CNOT-only")]
    NonLinearGate,
    #[error("at most 64 qubits are supported by the bit-packed oracle, got {0}")]
    TooManyQubits(usize),
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
}

/// Extract the H+CNOT core of a circuit, skipping other single-qubit gates.
pub fn clifford_core(circuit: &Circuit) -> Vec<CliffGate> {
    circuit
        .gates
        .iter()
        .filter_map(|g| match &g.kind {
            GateKind::Cnot { control, target } => Some(CliffGate::Cnot {
                control: *control,
                target: *target,
            }),
            GateKind::H { target } => Some(CliffGate::H { qubit: *target }),
            GateKind::Other { .. } => None,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// GF(2) linear map
// ---------------------------------------------------------------------------

/// Basis-state linear map `x -> Mx` over GF(2), rows bit-packed in `u64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Map {
    pub n: usize,
    rows: Vec<u64>,
}

impl Gf2Map {
    pub fn identity(n: usize) -> Result<Self, VerifyError> {
        if n > 64 {
            return Err(VerifyError::TooManyQubits(n));
        }
        Ok(Gf2Map {
            n,
            rows: (0..n).map(|i| 1u64 << i).collect(),
        })
    }

    /// New value of wire `t` is `x_t XOR x_c`.
    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        self.rows[target] ^= self.rows[control];
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, &r)| r == 1u64 << i)
    }

    /// Gaussian elimination over GF(2); CNOT circuits are always invertible,
    /// so this doubles as a sanity check in tests.
    pub fn is_invertible(&self) -> bool {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for bit in 0..self.n {
            let Some(pivot) = (rank..self.n).find(|&r| rows[r] >> bit & 1 == 1) else {
                continue;
            };
            rows.swap(rank, pivot);
            for r in 0..self.n {
                if r != rank && rows[r] >> bit & 1 == 1 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
        rank == self.n
    }
}

/// GF(2) semantics of a CNOT-only gate list, composed in gate order.
pub fn gf2_of(gates: &[CliffGate], n: usize) -> Result<Gf2Map, VerifyError> {
    let mut m = Gf2Map::identity(n)?;
    for g in gates {
        match *g {
            CliffGate::Cnot { control, target } => m.apply_cnot(control, target),
            CliffGate::H { .. } => return Err(VerifyError::NonLinearGate),
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Clifford tableau
// ---------------------------------------------------------------------------

/// Images of the 2n Pauli generators under a Clifford unitary.
///
/// Row `i` (for `i < n`) is the image of `X_i`, row `n + i` the image of
/// `Z_i`; each row stores the X-part and Z-part of the Pauli string as bit
/// masks plus a sign bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordTableau {
    pub n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Vec<bool>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Result<Self, VerifyError> {
        if n > 64 {
            return Err(VerifyError::TooManyQubits(n));
        }
        let mut x = vec![0u64; 2 * n];
        let mut z = vec![0u64; 2 * n];
        for i in 0..n {
            x[i] = 1 << i;
            z[n + i] = 1 << i;
        }
        Ok(CliffordTableau {
            n,
            x,
            z,
            phase: vec![false; 2 * n],
        })
    }

    pub fn apply(&mut self, gate: CliffGate) {
        match gate {
            CliffGate::H { qubit } => {
                let m = 1u64 << qubit;
                for r in 0..2 * self.n {
                    let xb = self.x[r] & m != 0;
                    let zb = self.z[r] & m != 0;
                    if xb && zb {
                        self.phase[r] = !self.phase[r];
                    }
                    if xb != zb {
                        self.x[r] ^= m;
                        self.z[r] ^= m;
                    }
                }
            }
            CliffGate::Cnot { control, target } => {
                let mc = 1u64 << control;
                let mt = 1u64 << target;
                for r in 0..2 * self.n {
                    let xc = self.x[r] & mc != 0;
                    let zc = self.z[r] & mc != 0;
                    let xt = self.x[r] & mt != 0;
                    let zt = self.z[r] & mt != 0;
                    if xc && zt && (xt == zc) {
                        self.phase[r] = !self.phase[r];
                    }
                    if xc {
                        self.x[r] ^= mt;
                    }
                    if zt {
                        self.z[r] ^= mc;
                    }
                }
            }
        }
    }

    /// Relabel wires: generator images move from wire `w` to `perm[w]`.
    /// Equivalent to appending the permutation circuit realizing `perm`.
    pub fn permute_wires(&mut self, perm: &[usize]) {
        debug_assert_eq!(perm.len(), self.n);
        for r in 0..2 * self.n {
            let (ox, oz) = (self.x[r], self.z[r]);
            let mut nx = 0u64;
            let mut nz = 0u64;
            for (w, &p) in perm.iter().enumerate() {
                if ox >> w & 1 == 1 {
                    nx |= 1 << p;
                }
                if oz >> w & 1 == 1 {
                    nz |= 1 << p;
                }
            }
            self.x[r] = nx;
            self.z[r] = nz;
        }
    }

    pub fn is_identity(&self) -> bool {
        for i in 0..self.n {
            if self.x[i] != 1 << i || self.z[i] != 0 || self.phase[i] {
                return false;
            }
            if self.x[self.n + i] != 0 || self.z[self.n + i] != 1 << i || self.phase[self.n + i] {
                return false;
            }
        }
        true
    }

    /// Do the generator images pairwise commute/anticommute exactly as the
    /// originals do? True for every tableau produced by gate application;
    /// exposed for property tests.
    pub fn is_symplectic(&self) -> bool {
        let symp = |a: usize, b: usize| -> bool {
            // Symplectic product: do Pauli strings a and b anticommute?
            let x = (self.x[a] & self.z[b]).count_ones() + (self.z[a] & self.x[b]).count_ones();
            x % 2 == 1
        };
        let n = self.n;
        for i in 0..2 * n {
            for j in i..2 * n {
                let expected = i < n && j == n + i || j < n && i == n + j;
                if symp(i, j) != expected {
                    return false;
                }
            }
        }
        true
    }
}

/// Stabilizer-tableau semantics of an H+CNOT gate list, in gate order.
pub fn tableau_of(gates: &[CliffGate], n: usize) -> Result<CliffordTableau, VerifyError> {
    let mut t = CliffordTableau::identity(n)?;
    for &g in gates {
        t.apply(g);
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Equivalence check
// ---------------------------------------------------------------------------

/// Verdict of [`check_equivalence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Check that `physical` equals `logical` embedded at the initial mapping
/// followed by the wire permutation `sigma_final` (initial wire -> final
/// wire), over `num_nodes` physical wires. Gate lists are the H+CNOT cores;
/// equality is exact including phases.
pub fn check_equivalence(
    logical: &[CliffGate],
    physical: &[CliffGate],
    tau_ini: &Mapping,
    sigma_final: &[usize],
    num_nodes: usize,
) -> Result<Verdict, VerifyError> {
    if sigma_final.len() != num_nodes {
        return Err(VerifyError::DimensionMismatch(sigma_final.len(), num_nodes));
    }
    let mut reference = CliffordTableau::identity(num_nodes)?;
    for g in logical {
        let embedded = match *g {
            CliffGate::Cnot { control, target } => CliffGate::Cnot {
                control: tau_ini.phys(control),
                target: tau_ini.phys(target),
            },
            CliffGate::H { qubit } => CliffGate::H {
                qubit: tau_ini.phys(qubit),
            },
        };
        reference.apply(embedded);
    }
    reference.permute_wires(sigma_final);

    let routed = tableau_of(physical, num_nodes)?;
    Ok(if routed == reference {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cnot(c: usize, t: usize) -> CliffGate {
        CliffGate::Cnot {
            control: c,
            target: t,
        }
    }

    fn h(q: usize) -> CliffGate {
        CliffGate::H { qubit: q }
    }

    #[test]
    fn empty_circuit_is_identity() {
        assert!(gf2_of(&[], 4).unwrap().is_identity());
        assert!(tableau_of(&[], 4).unwrap().is_identity());
    }

    #[test]
    fn cnot_twice_is_identity() {
        let m = gf2_of(&[cnot(0, 1), cnot(0, 1)], 2).unwrap();
        assert!(m.is_identity());
    }

    #[test]
    fn gf2_rejects_h() {
        assert!(matches!(
            gf2_of(&[h(0)], 1),
            Err(VerifyError::NonLinearGate)
        ));
    }

    #[test]
    fn three_cnot_swap_is_wire_permutation() {
        let m = gf2_of(&[cnot(0, 1), cnot(1, 0), cnot(0, 1)], 3).unwrap();
        assert_eq!(m.row(0), 0b010);
        assert_eq!(m.row(1), 0b001);
        assert_eq!(m.row(2), 0b100);
        assert!(m.is_invertible());
    }

    #[test]
    fn hh_is_identity() {
        assert!(tableau_of(&[h(0), h(0)], 2).unwrap().is_identity());
    }

    #[test]
    fn hadamard_conjugation_reverses_cnot() {
        // H(u) H(v) CNOT(v, u) H(u) H(v)  ==  CNOT(u, v)
        let block = tableau_of(&[h(0), h(1), cnot(1, 0), h(0), h(1)], 2).unwrap();
        let direct = tableau_of(&[cnot(0, 1)], 2).unwrap();
        assert_eq!(block, direct);
    }

    #[test]
    fn seven_gate_swap_equals_swap() {
        // One-way edge (0, 1): 3 aligned CNOTs, the middle one reversed by H.
        let gates = [
            cnot(0, 1),
            h(0),
            h(1),
            cnot(0, 1),
            h(0),
            h(1),
            cnot(0, 1),
        ];
        let block = tableau_of(&gates, 3).unwrap();
        let mut swap = CliffordTableau::identity(3).unwrap();
        swap.permute_wires(&[1, 0, 2]);
        assert_eq!(block, swap);
    }

    #[test]
    fn random_circuit_times_inverse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let n = rng.random_range(2..8);
            let len = rng.random_range(0..40);
            let gates: Vec<CliffGate> = (0..len)
                .map(|_| {
                    if rng.random_bool(0.4) {
                        h(rng.random_range(0..n))
                    } else {
                        let c = rng.random_range(0..n);
                        let mut t = rng.random_range(0..n);
                        while t == c {
                            t = rng.random_range(0..n);
                        }
                        cnot(c, t)
                    }
                })
                .collect();
            // H and CNOT are self-inverse, so reversing the list inverts.
            let mut all: Vec<CliffGate> = gates.clone();
            all.extend(gates.iter().rev().copied());
            let t = tableau_of(&all, n).unwrap();
            assert!(t.is_identity());
            assert!(t.is_symplectic());
        }
    }

    #[test]
    fn gf2_agrees_with_tableau_x_images_on_cnot_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..30 {
            let n = rng.random_range(2..7);
            let gates: Vec<CliffGate> = (0..rng.random_range(0..30))
                .map(|_| {
                    let c = rng.random_range(0..n);
                    let mut t = rng.random_range(0..n);
                    while t == c {
                        t = rng.random_range(0..n);
                    }
                    cnot(c, t)
                })
                .collect();
            let m = gf2_of(&gates, n).unwrap();
            let t = tableau_of(&gates, n).unwrap();
            // CNOT circuits act on X generators exactly as the transpose of
            // the basis map: X_j appears in the image of X_i iff M[j][i]=1.
            for i in 0..n {
                for j in 0..n {
                    let in_image = t.x[i] >> j & 1 == 1;
                    let matrix_bit = m.row(j) >> i & 1 == 1;
                    assert_eq!(in_image, matrix_bit);
                }
            }
            assert!(m.is_invertible());
        }
    }

    #[test]
    fn equivalence_detects_corruption() {
        use crate::mapping::Mapping;
        let logical = vec![cnot(0, 1), h(0), cnot(1, 0)];
        let tau = Mapping::identity_prefix(2, 2);
        let sigma = vec![0, 1];
        let embedded = logical.clone();
        assert!(
            check_equivalence(&logical, &embedded, &tau, &sigma, 2)
                .unwrap()
                .passed()
        );
        // Flip one CNOT's operands.
        let corrupted = vec![cnot(0, 1), h(0), cnot(0, 1)];
        assert!(
            !check_equivalence(&logical, &corrupted, &tau, &sigma, 2)
                .unwrap()
                .passed()
        );
    }
}
