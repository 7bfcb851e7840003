//! Replica-replica Hamiltonians that commute with the collective algebra.

use crate::algebra::{embed_pair, transposition_operator, ComplexMatrix, GeneratorSet, C64};
use crate::error::{Error, Result};

/// `J Σ_{i<j} (σ_i^+σ_j^- + σ_i^-σ_j^+ + 2σ_i^zσ_j^z)` on N qubits.
pub fn exchange_interaction(replicas: usize, coupling: f64) -> Result<ComplexMatrix> {
    let pairs: Vec<(usize, usize, f64)> =
        (0..replicas).flat_map(|i| (i + 1..replicas).map(move |j| (i, j, coupling))).collect();
    heisenberg(replicas, &pairs)
}

/// `Σ J_ij (σ_i^+σ_j^- + σ_i^-σ_j^+ + 2σ_i^zσ_j^z)` for arbitrary qubit pairs.
///
/// Each term is `2 S_i·S_j`, so the sum commutes with the collective sl(2)
/// for any pattern of couplings; only the all-pairs pattern is also
/// permutation symmetric.
pub fn heisenberg(replicas: usize, pairs: &[(usize, usize, f64)]) -> Result<ComplexMatrix> {
    let g = GeneratorSet::new(1, 1)?;
    let (up, down, z) = (&g.local_raising[0], &g.local_lowering[0], &g.local_cartan[0]);
    let dim = 1usize << replicas;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for &(i, j, jij) in pairs {
        let term = embed_pair(up, i, down, j, replicas)?
            .add(&embed_pair(down, i, up, j, replicas)?)?
            .add(&embed_pair(z, i, z, j, replicas)?.scale(C64::new(2.0, 0.0)))?;
        h = h.add(&term.scale(C64::new(jij, 0.0)))?;
    }
    Ok(h)
}

/// `Σ J_ij P_ij` with `P_ij` the replica swap; sl(r+1)-invariant for every rank.
pub fn swap_interaction(rank: usize, replicas: usize, pairs: &[(usize, usize, f64)]) -> Result<ComplexMatrix> {
    let d = rank + 1;
    let dim = crate::algebra::checked_pow(d, replicas).ok_or(Error::NoReplicas)?;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for &(i, j, jij) in pairs {
        h = h.add(&transposition_operator(i, j, d, replicas)?.scale(C64::new(jij, 0.0)))?;
    }
    Ok(h)
}

/// `max_G ‖[H, G]‖` (largest entry) over all collective generators.
pub fn symmetry_defect(h: &ComplexMatrix, gens: &GeneratorSet) -> Result<f64> {
    let mut worst = 0.0f64;
    for g in gens.collective_all() {
        worst = worst.max(h.commutator(g)?.max_abs());
    }
    Ok(worst)
}
