//! Chevalley generators of sl(r+1) in the defining representation and their
//! collective N-replica sums.
//!
//! Local levels are indexed `0..=r` from the bottom of the ladder. The raising
//! generator `α` maps level `α-1` to level `α`, its adjoint lowers, and the
//! Cartan element is `h_α = ½(|α⟩⟨α| - |α-1⟩⟨α-1|)`. With this normalization
//! the relations read
//!
//! ```text
//! [h_α, raise_β] =  ½ A_{αβ} raise_β
//! [h_α, lower_β] = -½ A_{αβ} lower_β
//! [raise_α, lower_β] = 2 δ_{αβ} h_α
//! ```
//!
//! which for r = 1 are exactly the qubit relations `[σ^z, σ^±] = ±σ^±`,
//! `[σ^+, σ^-] = 2σ^z` with `σ^z = diag(-½, +½)` in index order.

use super::matrix::{ComplexMatrix, C64};
use super::tensor::collective;
use crate::error::{Error, Result};

/// Cartan matrix of sl(r+1) (tridiagonal, 2 on the diagonal, -1 off it).
pub fn cartan_matrix(rank: usize) -> Vec<Vec<i32>> {
    (0..rank)
        .map(|a| {
            (0..rank)
                .map(|b| match a.abs_diff(b) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    pub rank: usize,
    pub replicas: usize,
    /// `e_α` (σ^- for r = 1).
    pub local_lowering: Vec<ComplexMatrix>,
    /// `e_{-α} = e_α†` (σ^+ for r = 1).
    pub local_raising: Vec<ComplexMatrix>,
    /// `h_α` (σ^z for r = 1).
    pub local_cartan: Vec<ComplexMatrix>,
    pub collective_lowering: Vec<ComplexMatrix>,
    pub collective_raising: Vec<ComplexMatrix>,
    pub collective_cartan: Vec<ComplexMatrix>,
}

/// Which copy of the generators a relation check looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Embedding {
    Local,
    Collective,
}

/// Defining representation of sl(r+1), with a single replica.
pub fn chevalley_basis(rank: usize) -> Result<GeneratorSet> {
    GeneratorSet::new(rank, 1)
}

impl GeneratorSet {
    pub fn new(rank: usize, replicas: usize) -> Result<Self> {
        if rank < 1 {
            return Err(Error::InvalidRank(rank));
        }
        if replicas < 1 {
            return Err(Error::NoReplicas);
        }
        let d = rank + 1;
        let one = C64::new(1.0, 0.0);
        let half = C64::new(0.5, 0.0);
        let mut raising = Vec::with_capacity(rank);
        let mut lowering = Vec::with_capacity(rank);
        let mut cartan = Vec::with_capacity(rank);
        for alpha in 1..=rank {
            let up = ComplexMatrix::from_triplets_unchecked(d, d, [(alpha, alpha - 1, one)]);
            lowering.push(up.adjoint());
            raising.push(up);
            cartan.push(ComplexMatrix::from_triplets_unchecked(
                d,
                d,
                [(alpha, alpha, half), (alpha - 1, alpha - 1, -half)],
            ));
        }
        let lift = |ops: &[ComplexMatrix]| -> Result<Vec<ComplexMatrix>> {
            ops.iter().map(|op| collective(op, replicas)).collect()
        };
        Ok(Self {
            rank,
            replicas,
            collective_lowering: lift(&lowering)?,
            collective_raising: lift(&raising)?,
            collective_cartan: lift(&cartan)?,
            local_lowering: lowering,
            local_raising: raising,
            local_cartan: cartan,
        })
    }

    pub fn local_dim(&self) -> usize {
        self.rank + 1
    }

    /// Dimension of the register, `d^N`.
    pub fn register_dim(&self) -> usize {
        self.collective_cartan[0].rows()
    }

    fn ops(&self, which: Embedding) -> (&[ComplexMatrix], &[ComplexMatrix], &[ComplexMatrix]) {
        match which {
            Embedding::Local => (&self.local_lowering, &self.local_raising, &self.local_cartan),
            Embedding::Collective => {
                (&self.collective_lowering, &self.collective_raising, &self.collective_cartan)
            }
        }
    }

    /// All `3r` collective generators: lowering, then raising, then Cartan.
    pub fn collective_all(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.collective_lowering
            .iter()
            .chain(&self.collective_raising)
            .chain(&self.collective_cartan)
    }

    /// Largest entrywise violation over every Chevalley relation.
    pub fn chevalley_residual(&self, which: Embedding) -> Result<f64> {
        let (lower, raise, cartan) = self.ops(which);
        let a = cartan_matrix(self.rank);
        let mut worst = 0.0f64;
        let mut check = |lhs: ComplexMatrix, rhs: ComplexMatrix| -> Result<()> {
            worst = worst.max(lhs.sub(&rhs)?.max_abs());
            Ok(())
        };
        for al in 0..self.rank {
            for be in 0..self.rank {
                let coef = C64::new(0.5 * a[al][be] as f64, 0.0);
                check(cartan[al].commutator(&raise[be])?, raise[be].scale(coef))?;
                check(cartan[al].commutator(&lower[be])?, lower[be].scale(-coef))?;
                let expected = if al == be {
                    cartan[al].scale(C64::new(2.0, 0.0))
                } else {
                    ComplexMatrix::zeros(cartan[al].rows(), cartan[al].cols())
                };
                check(raise[al].commutator(&lower[be])?, expected)?;
                let zero = ComplexMatrix::zeros(cartan[al].rows(), cartan[al].cols());
                check(cartan[al].commutator(&cartan[be])?, zero)?;
            }
        }
        for (l, r) in lower.iter().zip(raise) {
            worst = worst.max(l.adjoint().sub(r)?.max_abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tensor::embed_local;

    fn real(m: &ComplexMatrix) -> Vec<Vec<f64>> {
        let d = m.to_dense();
        (0..d.nrows()).map(|i| (0..d.ncols()).map(|j| d[(i, j)].re).collect()).collect()
    }

    #[test]
    fn qubit_generators_match_pauli_conventions() {
        let g = chevalley_basis(1).unwrap();
        // index order (|0⟩, |1⟩): σ^+ |0⟩ = |1⟩
        assert_eq!(real(&g.local_raising[0]), vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(real(&g.local_lowering[0]), vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert_eq!(real(&g.local_cartan[0]), vec![vec![-0.5, 0.0], vec![0.0, 0.5]]);
        assert_eq!(g.local_raising[0].adjoint(), g.local_lowering[0]);
    }

    #[test]
    fn qubit_commutator_is_twice_sigma_z() {
        let g = chevalley_basis(1).unwrap();
        let comm = g.local_raising[0].commutator(&g.local_lowering[0]).unwrap();
        assert_eq!(comm, g.local_cartan[0].scale(C64::new(2.0, 0.0)));
    }

    #[test]
    fn rank_two_relations_hold_in_exact_integers() {
        // entries are multiples of ½; doubling must give exact integers and exact relations
        let g = chevalley_basis(2).unwrap();
        for m in g.local_cartan.iter().chain(&g.local_raising) {
            for (_, _, v) in m.triplets() {
                assert_eq!((2.0 * v.re).fract(), 0.0);
                assert_eq!(v.im, 0.0);
            }
        }
        assert_eq!(g.chevalley_residual(Embedding::Local).unwrap(), 0.0);
    }

    #[test]
    fn rejects_rank_zero() {
        assert_eq!(chevalley_basis(0), Err(Error::InvalidRank(0)));
        assert_eq!(GeneratorSet::new(1, 0), Err(Error::NoReplicas));
    }

    #[test]
    fn collective_relations_small_ranks() {
        for rank in 1..=3 {
            for replicas in 1..=4 {
                let g = GeneratorSet::new(rank, replicas).unwrap();
                let res = g.chevalley_residual(Embedding::Collective).unwrap();
                assert!(res <= 1e-12, "r={rank} N={replicas}: {res}");
            }
        }
    }

    #[test]
    fn single_replica_collective_is_local() {
        let g = GeneratorSet::new(2, 1).unwrap();
        assert_eq!(g.collective_raising, g.local_raising);
        assert_eq!(g.collective_cartan, g.local_cartan);
    }

    #[test]
    fn collective_sigma_z_two_replicas() {
        let g = GeneratorSet::new(1, 2).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| g.collective_cartan[0].get(i, i).re).collect();
        // index order 00, 01, 10, 11
        assert_eq!(diag, vec![-1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn sigma_z_embedding_at_site_zero() {
        let g = chevalley_basis(1).unwrap();
        let e = embed_local(&g.local_cartan[0], 0, 2).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| e.get(i, i).re).collect();
        // reversed into the (|11⟩,|10⟩,|01⟩,|00⟩) order this is (+½,+½,-½,-½)
        assert_eq!(diag, vec![-0.5, -0.5, 0.5, 0.5]);
    }

    #[test]
    fn collective_ladder_commutator_n4() {
        let g = GeneratorSet::new(1, 4).unwrap();
        let comm = g.collective_raising[0].commutator(&g.collective_lowering[0]).unwrap();
        let expected = g.collective_cartan[0].scale(C64::new(2.0, 0.0));
        assert!(comm.sub(&expected).unwrap().max_abs() <= 1e-12);
    }
}
