//! Operator algebra: sparse complex matrices, replica embeddings, and the
//! local/collective Chevalley generators of sl(r+1).

mod generators;
mod matrix;
mod tensor;

pub use generators::{cartan_matrix, chevalley_basis, Embedding, GeneratorSet};
pub use matrix::{outer, ComplexMatrix, C64};
pub use tensor::{
    basis_index, basis_levels, checked_pow, collective, embed_local, embed_pair, is_odd,
    permutation_operator, permutations, product_ket, symmetrize, transposition_operator,
};

pub(crate) use matrix::{ONE, ZERO};

/// Default ceiling on dimensions that may be densified.
pub const DENSE_THRESHOLD: usize = 4096;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn singlet() -> Vec<C64> {
        let s = 1.0 / 2f64.sqrt();
        // (|01⟩ - |10⟩)/√2
        vec![ZERO, C64::new(s, 0.0), C64::new(-s, 0.0), ZERO]
    }

    #[test]
    fn identity_embeds_to_identity() {
        for d in 2..=3 {
            for site in 0..3 {
                let e = embed_local(&ComplexMatrix::identity(d), site, 3).unwrap();
                assert_eq!(e, ComplexMatrix::identity(d * d * d));
            }
        }
    }

    #[test]
    fn embed_errors() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(
            embed_local(&id, 3, 3),
            Err(crate::Error::SiteOutOfRange { site: 3, replicas: 3 })
        );
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(embed_local(&rect, 0, 2).is_err());
        assert!(collective(&id, 0).is_err());
    }

    #[test]
    fn distinct_site_ladders_commute() {
        let g = chevalley_basis(1).unwrap();
        let a = embed_local(&g.local_raising[0], 0, 2).unwrap();
        let b = embed_local(&g.local_lowering[0], 1, 2).unwrap();
        assert_eq!(a.commutator(&b).unwrap().nnz(), 0);
    }

    #[test]
    fn singlet_is_annihilated() {
        let g = GeneratorSet::new(1, 2).unwrap();
        for op in g.collective_all() {
            let out = op.mul_vec(&singlet()).unwrap();
            assert!(out.iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn collective_single_replica_is_identity_map() {
        let g = chevalley_basis(2).unwrap();
        assert_eq!(collective(&g.local_raising[1], 1).unwrap(), g.local_raising[1]);
    }

    #[test]
    fn transposition_swaps_levels() {
        let p = transposition_operator(0, 1, 2, 2).unwrap();
        // |01⟩ (index 1) <-> |10⟩ (index 2)
        assert_eq!(p.get(2, 1), ONE);
        assert_eq!(p.get(1, 2), ONE);
        assert_eq!(p.get(0, 0), ONE);
    }

    #[test]
    fn symmetrized_collective_is_unchanged() {
        let g = GeneratorSet::new(1, 3).unwrap();
        let s = symmetrize(&g.collective_raising[0], 2, 3).unwrap();
        assert!(s.sub(&g.collective_raising[0]).unwrap().max_abs() < 1e-14);
    }

    fn small_matrix(d: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), d * d).prop_map(move |v| {
            let trip = v.into_iter().enumerate().map(|(k, (re, im))| (k / d, k % d, C64::new(re, im)));
            ComplexMatrix::from_triplets(d, d, trip).unwrap()
        })
    }

    proptest! {
        #[test]
        fn embedding_distributes_over_products(a in small_matrix(2), b in small_matrix(2), site in 0usize..3) {
            let lhs = embed_local(&a.matmul(&b).unwrap(), site, 3).unwrap();
            let rhs = embed_local(&a, site, 3).unwrap().matmul(&embed_local(&b, site, 3).unwrap()).unwrap();
            prop_assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
        }

        #[test]
        fn distinct_sites_commute(a in small_matrix(3), b in small_matrix(3), i in 0usize..3, j in 0usize..3) {
            prop_assume!(i != j);
            let ea = embed_local(&a, i, 3).unwrap();
            let eb = embed_local(&b, j, 3).unwrap();
            prop_assert!(ea.commutator(&eb).unwrap().max_abs() < 1e-12);
        }

        #[test]
        fn collective_of_hermitian_is_hermitian(a in small_matrix(2), n in 1usize..5) {
            let h = a.add(&a.adjoint()).unwrap();
            prop_assert!(collective(&h, n).unwrap().is_hermitian(1e-12));
        }

        #[test]
        fn adjoint_involution(a in small_matrix(3)) {
            prop_assert_eq!(a.adjoint().adjoint(), a);
        }
    }
}
