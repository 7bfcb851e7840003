//! Replica tensor embeddings on `(C^d)^⊗N`.
//!
//! Site 0 is the most significant tensor factor, so the basis label
//! `|b_0 b_1 … b_{N-1}⟩` reads left to right as a base-`d` number.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// `d^n`, or `None` on overflow.
pub fn checked_pow(d: usize, n: usize) -> Option<usize> {
    (0..n).try_fold(1usize, |acc, _| acc.checked_mul(d))
}

fn register_dim(d: usize, replicas: usize) -> Result<usize> {
    checked_pow(d, replicas).ok_or(Error::DimensionOverflow { dim: usize::MAX, limit: usize::MAX })
}

/// Basis index of the product ket `|levels[0] levels[1] …⟩`.
pub fn basis_index(levels: &[usize], d: usize) -> usize {
    levels.iter().fold(0, |acc, &b| acc * d + b)
}

/// Inverse of [`basis_index`].
pub fn basis_levels(mut index: usize, d: usize, replicas: usize) -> Vec<usize> {
    let mut levels = vec![0; replicas];
    for slot in levels.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    levels
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` acting on `site`.
pub fn embed_local(op: &ComplexMatrix, site: usize, replicas: usize) -> Result<ComplexMatrix> {
    if replicas == 0 {
        return Err(Error::NoReplicas);
    }
    if site >= replicas {
        return Err(Error::SiteOutOfRange { site, replicas });
    }
    if !op.is_square() {
        return Err(Error::DimensionMismatch { expected: op.rows(), actual: op.cols() });
    }
    let d = op.rows();
    let left = register_dim(d, site)?;
    let right = register_dim(d, replicas - site - 1)?;
    let dim = register_dim(d, replicas)?;
    let mut triplets = Vec::with_capacity(op.nnz() * left * right);
    for l in 0..left {
        for (a, b, v) in op.triplets() {
            let row_base = (l * d + a) * right;
            let col_base = (l * d + b) * right;
            for r in 0..right {
                triplets.push((row_base + r, col_base + r, v));
            }
        }
    }
    Ok(ComplexMatrix::from_triplets_unchecked(dim, dim, triplets))
}

/// `Σ_i embed_local(op, i, N)`.
pub fn collective(op: &ComplexMatrix, replicas: usize) -> Result<ComplexMatrix> {
    if replicas == 0 {
        return Err(Error::NoReplicas);
    }
    let mut acc: Option<ComplexMatrix> = None;
    for site in 0..replicas {
        let term = embed_local(op, site, replicas)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.expect("replicas >= 1"))
}

/// Two-site operator `A_i B_j` for `i != j`.
pub fn embed_pair(
    a: &ComplexMatrix,
    i: usize,
    b: &ComplexMatrix,
    j: usize,
    replicas: usize,
) -> Result<ComplexMatrix> {
    if i == j {
        return Err(Error::Precondition(format!("pair sites must differ, got {i} twice")));
    }
    embed_local(a, i, replicas)?.matmul(&embed_local(b, j, replicas)?)
}

/// Replica permutation `P_σ |b_0 … b_{N-1}⟩ = |b_{σ(0)} … b_{σ(N-1)}⟩`.
pub fn permutation_operator(perm: &[usize], d: usize) -> Result<ComplexMatrix> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::Precondition(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let dim = register_dim(d, n)?;
    let one = C64::new(1.0, 0.0);
    let triplets = (0..dim).map(|col| {
        let levels = basis_levels(col, d, n);
        let permuted: Vec<usize> = perm.iter().map(|&p| levels[p]).collect();
        (basis_index(&permuted, d), col, one)
    });
    Ok(ComplexMatrix::from_triplets_unchecked(dim, dim, triplets))
}

/// Swaps replicas `i` and `j`.
pub fn transposition_operator(i: usize, j: usize, d: usize, replicas: usize) -> Result<ComplexMatrix> {
    if i >= replicas || j >= replicas {
        return Err(Error::SiteOutOfRange { site: i.max(j), replicas });
    }
    let mut perm: Vec<usize> = (0..replicas).collect();
    perm.swap(i, j);
    permutation_operator(&perm, d)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

/// Parity of a permutation: `true` when odd.
pub fn is_odd(perm: &[usize]) -> bool {
    let mut inversions = 0usize;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

/// Replica-symmetrized operator `(1/N!) Σ_σ P_σ X P_σ†`.
pub fn symmetrize(op: &ComplexMatrix, d: usize, replicas: usize) -> Result<ComplexMatrix> {
    let dim = register_dim(d, replicas)?;
    if op.rows() != dim || op.cols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: op.rows() });
    }
    let perms = permutations(replicas);
    let weight = C64::new(1.0 / perms.len() as f64, 0.0);
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for perm in &perms {
        let p = permutation_operator(perm, d)?;
        acc = acc.add(&p.matmul(op)?.matmul(&p.adjoint())?)?;
    }
    Ok(acc.scale(weight))
}

/// Product ket `|levels⟩` as a dense amplitude vector.
pub fn product_ket(levels: &[usize], d: usize) -> Result<Vec<C64>> {
    if let Some(&bad) = levels.iter().find(|&&b| b >= d) {
        return Err(Error::Precondition(format!("level {bad} out of range for local dimension {d}")));
    }
    let dim = register_dim(d, levels.len())?;
    let mut ket = vec![ZERO; dim];
    ket[basis_index(levels, d)] = C64::new(1.0, 0.0);
    Ok(ket)
}
