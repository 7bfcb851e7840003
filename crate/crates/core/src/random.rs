//! Seeded random states. Every experiment derives its generator from a `u64`
//! seed so runs are reproducible.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::C64;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector.
pub fn haar_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| gaussian_complex(rng));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Full-rank random density matrix `G G† / tr(G G†)` with Ginibre `G`.
pub fn ginibre_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_state() {
        let a = haar_ket(8, &mut seeded(3));
        let b = haar_ket(8, &mut seeded(3));
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ginibre_is_a_state() {
        let rho = ginibre_density(5, &mut seeded(11));
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        assert!((&rho - rho.adjoint()).norm() < 1e-14);
        let eig = rho.symmetric_eigenvalues();
        assert!(eig.iter().all(|&e| e > 0.0));
    }
}
