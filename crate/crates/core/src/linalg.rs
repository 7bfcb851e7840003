//! Dense helpers on top of `nalgebra`: spectral quantities of density
//! matrices and subspace comparisons.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::algebra::C64;
use crate::error::{Error, Result};

/// Eigenvalues of a Hermitian matrix (ascending).
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `½ ‖ρ - σ‖₁`.
pub fn trace_distance(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> f64 {
    let diff = rho - sigma;
    let herm = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
    0.5 * hermitian_eigenvalues(&herm).iter().map(|e| e.abs()).sum::<f64>()
}

pub fn purity(rho: &DMatrix<C64>) -> f64 {
    // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
    rho.iter().map(|v| v.norm_sqr()).sum()
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`, computed on the support of `rho`
/// so rank-deficient references do not amplify roundoff through `√0`.
pub fn fidelity(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> f64 {
    let eig = SymmetricEigen::new(hermitize(rho));
    let cutoff = 1e-12 * eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    let support: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > cutoff).collect();
    if support.is_empty() {
        return 0.0;
    }
    let k = support.len();
    let dim = rho.nrows();
    // columns √λ_i v_i spanning the support
    let scaled = DMatrix::from_fn(dim, k, |r, c| {
        let i = support[c];
        eig.eigenvectors[(r, i)] * eig.eigenvalues[i].sqrt()
    });
    let inner = scaled.adjoint() * sigma * &scaled;
    let root_sum: f64 = hermitian_eigenvalues(&hermitize(&inner)).iter().map(|&e| e.max(0.0).sqrt()).sum();
    (root_sum * root_sum).min(1.0 + 1e-10)
}

/// `⟨ψ|σ|ψ⟩`, the fidelity against a pure reference.
pub fn pure_fidelity(psi: &DVector<C64>, sigma: &DMatrix<C64>) -> f64 {
    (psi.adjoint() * sigma * psi)[(0, 0)].re
}

pub fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Orthonormal columns spanning `vectors` (modified Gram-Schmidt, applied twice).
pub fn orthonormal_columns(vectors: &[DVector<C64>], tol: f64) -> Result<DMatrix<C64>> {
    let dim = vectors.first().map_or(0, |v| v.len());
    let mut out: Vec<DVector<C64>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: v.len() });
        }
        let scale = v.norm();
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let proj = q.dotc(&w);
                w -= q * proj;
            }
        }
        let n = w.norm();
        if n <= tol * scale.max(f64::MIN_POSITIVE) || n == 0.0 {
            return Err(Error::RankDeficient { index, residual: n });
        }
        out.push(w / C64::new(n, 0.0));
    }
    Ok(DMatrix::from_columns(&out))
}

/// Principal angles between two equal-dimensional subspaces, ascending.
///
/// Cosines come from the cross-Gram matrix and sines from the component of
/// `b` orthogonal to `a`, so both tiny and large angles stay accurate.
pub fn principal_angles(a: &[DVector<C64>], b: &[DVector<C64>]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), actual: b.len() });
    }
    let qa = orthonormal_columns(a, 1e-12)?;
    let qb = orthonormal_columns(b, 1e-12)?;
    let cross = qa.adjoint() * &qb;
    let mut cos: Vec<f64> = cross.singular_values().iter().copied().collect();
    cos.sort_by(|x, y| y.total_cmp(x));
    let residual = &qb - &qa * &cross;
    let mut sin: Vec<f64> = residual.singular_values().iter().copied().collect();
    sin.sort_by(f64::total_cmp);
    Ok(cos.iter().zip(&sin).map(|(&c, &s)| s.atan2(c)).collect())
}

/// Partial trace over the trailing factor of a `sys_dim × env_dim` space.
pub fn partial_trace_env(rho: &DMatrix<C64>, sys_dim: usize, env_dim: usize) -> Result<DMatrix<C64>> {
    if rho.nrows() != sys_dim * env_dim || rho.ncols() != sys_dim * env_dim {
        return Err(Error::DimensionMismatch { expected: sys_dim * env_dim, actual: rho.nrows() });
    }
    Ok(DMatrix::from_fn(sys_dim, sys_dim, |s, t| {
        (0..env_dim).map(|b| rho[(s * env_dim + b, t * env_dim + b)]).sum()
    }))
}

/// `Σ_b ψ[s,b] ψ[t,b]*` accumulated into `acc` with weight `w`.
pub fn accumulate_reduced_ket(acc: &mut DMatrix<C64>, psi: &[C64], env_dim: usize, w: f64) {
    let sys_dim = acc.nrows();
    for s in 0..sys_dim {
        let row_s = &psi[s * env_dim..(s + 1) * env_dim];
        for t in s..sys_dim {
            let row_t = &psi[t * env_dim..(t + 1) * env_dim];
            let v: C64 = row_s.iter().zip(row_t).map(|(a, b)| a * b.conj()).sum::<C64>() * w;
            acc[(s, t)] += v;
            if t != s {
                acc[(t, s)] += v.conj();
            }
        }
    }
}
