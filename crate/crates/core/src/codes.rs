//! The code subspace `C_N`: joint null space of every collective generator,
//! with encode/decode maps and leakage measurement.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;

use crate::algebra::{
    basis_index, checked_pow, is_odd, permutations, GeneratorSet, C64, DENSE_THRESHOLD, ONE, ZERO,
};
use crate::error::{Error, Result};
use crate::linalg::orthonormal_columns;
use crate::repn::singlet_multiplicity;

/// Relative singular-value cutoff for the null space.
pub const DEFAULT_NULL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CodeSubspace {
    pub replicas: usize,
    pub rank: usize,
    /// Orthonormal kets on `(C^d)^⊗N`.
    pub basis: Vec<DVector<C64>>,
    /// Absolute singular-value cutoff used to select the kernel.
    pub null_tolerance: f64,
}

/// Unit-norm logical amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalState {
    amplitudes: DVector<C64>,
}

impl LogicalState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!("logical state has norm {}", v.norm())));
        }
        Ok(Self { amplitudes: v })
    }

    /// Rescales to unit norm; rejects the zero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Precondition("cannot normalize a zero logical vector".into()));
        }
        Ok(Self { amplitudes: v / C64::new(n, 0.0) })
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}

/// Result of projecting a physical ket onto the code.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    /// `basis† · ket`, not renormalized.
    pub amplitudes: DVector<C64>,
    /// `‖ket - P ket‖²`.
    pub leakage: f64,
}

impl Decoded {
    pub fn logical(&self) -> Result<LogicalState> {
        LogicalState::normalized(self.amplitudes.iter().copied().collect())
    }
}

/// Orthonormal basis of the singlet sector for `N` replicas of sl(r+1).
///
/// The Cartan generators are diagonal in the product basis, so any kernel
/// vector lives on the zero-weight product states. The SVD therefore runs on
/// the ladder rows restricted to those columns.
pub fn singlet_basis(replicas: usize, rank: usize, tol: f64) -> Result<CodeSubspace> {
    let d = rank + 1;
    if rank < 1 {
        return Err(Error::InvalidRank(rank));
    }
    if replicas == 0 || !replicas.is_multiple_of(d) {
        let reason = if rank == 1 {
            format!("N odd ({replicas})")
        } else {
            format!("N = {replicas} is not a multiple of {d}")
        };
        return Err(Error::EmptyCode(reason));
    }
    let dim = checked_pow(d, replicas)
        .filter(|&dim| dim <= DENSE_THRESHOLD)
        .ok_or(Error::DimensionOverflow { dim: checked_pow(d, replicas).unwrap_or(usize::MAX), limit: DENSE_THRESHOLD })?;
    let gens = GeneratorSet::new(rank, replicas)?;
    let algebraic = singlet_multiplicity(replicas, rank).to_usize().expect("small multiplicity");

    let zero_weight: Vec<usize> = (0..dim)
        .filter(|&i| gens.collective_cartan.iter().all(|h| h.get(i, i) == ZERO))
        .collect();
    let mut column_of = vec![usize::MAX; dim];
    for (c, &i) in zero_weight.iter().enumerate() {
        column_of[i] = c;
    }
    let ncols = zero_weight.len();

    let mut rows: Vec<Vec<C64>> = Vec::new();
    for op in gens.collective_lowering.iter().chain(&gens.collective_raising) {
        let mut current: Vec<(usize, Vec<C64>)> = Vec::new();
        for (r, c, v) in op.triplets() {
            if column_of[c] == usize::MAX {
                continue;
            }
            if current.last().map(|(row, _)| *row) != Some(r) {
                current.push((r, vec![ZERO; ncols]));
            }
            current.last_mut().unwrap().1[column_of[c]] += v;
        }
        rows.extend(current.into_iter().map(|(_, row)| row));
    }
    let nrows = rows.len().max(ncols);
    let stacked = DMatrix::from_fn(nrows, ncols, |r, c| rows.get(r).map_or(ZERO, |row| row[c]));

    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
    let cutoff = tol * sigma_max;
    let mut kernel: Vec<DVector<C64>> = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            let mut full = DVector::from_element(dim, ZERO);
            for c in 0..ncols {
                full[zero_weight[c]] = v_t[(k, c)].conj();
            }
            kernel.push(full);
        }
    }
    if kernel.len() != algebraic {
        return Err(Error::KernelMismatch { numerical: kernel.len(), algebraic });
    }

    let mut basis: Vec<DVector<C64>> = kernel.into_iter().map(fix_phase).collect();
    basis.sort_by_key(first_support);
    Ok(CodeSubspace { replicas, rank, basis, null_tolerance: cutoff })
}

fn first_support(v: &DVector<C64>) -> usize {
    v.iter().position(|a| a.norm() > 1e-12).unwrap_or(v.len())
}

/// Rotates the global phase so the first non-negligible amplitude is real positive.
fn fix_phase(v: DVector<C64>) -> DVector<C64> {
    match v.iter().find(|a| a.norm() > 1e-12) {
        Some(&a) => {
            let phase = a / C64::new(a.norm(), 0.0);
            v / phase
        }
        None => v,
    }
}

/// `|ψ_A⟩ = (N!)^{-1/2} Σ_σ (-1)^σ σ |0 1 … r⟩` on `r+1` replicas.
pub fn antisymmetric_singlet(rank: usize) -> Result<DVector<C64>> {
    if rank < 1 {
        return Err(Error::InvalidRank(rank));
    }
    let d = rank + 1;
    let dim = checked_pow(d, d).ok_or(Error::DimensionOverflow { dim: usize::MAX, limit: DENSE_THRESHOLD })?;
    let perms = permutations(d);
    let amp = 1.0 / (perms.len() as f64).sqrt();
    let mut ket = DVector::from_element(dim, ZERO);
    for perm in &perms {
        let sign = if is_odd(perm) { -amp } else { amp };
        ket[basis_index(perm, d)] += C64::new(sign, 0.0);
    }
    Ok(ket)
}

/// The two explicit (non-orthogonal) singlets spanning `C_4`:
///
/// ```text
/// ψ₁ = ½(|1001⟩ - |0101⟩ + |0110⟩ - |1010⟩)
/// ψ₂ = ½(|1001⟩ - |0011⟩ + |0110⟩ - |1100⟩)
/// ```
pub fn reference_c4_basis() -> [DVector<C64>; 2] {
    let build = |terms: [(&str, f64); 4]| {
        let mut ket = DVector::from_element(16, ZERO);
        for (bits, sign) in terms {
            let levels: Vec<usize> = bits.bytes().map(|b| usize::from(b - b'0')).collect();
            ket[basis_index(&levels, 2)] += C64::new(0.5 * sign, 0.0);
        }
        ket
    };
    [
        build([("1001", 1.0), ("0101", -1.0), ("0110", 1.0), ("1010", -1.0)]),
        build([("1001", 1.0), ("0011", -1.0), ("0110", 1.0), ("1100", -1.0)]),
    ]
}

/// Gram-Schmidt in input order.
pub fn orthonormalize(kets: &[DVector<C64>], tol: f64) -> Result<Vec<DVector<C64>>> {
    let q = orthonormal_columns(kets, tol)?;
    Ok(q.column_iter().map(|c| c.into_owned()).collect())
}

impl CodeSubspace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn local_dim(&self) -> usize {
        self.rank + 1
    }

    pub fn register_dim(&self) -> usize {
        self.basis.first().map_or(0, |v| v.len())
    }

    /// Basis as the columns of a `d^N × n(N)` matrix.
    pub fn basis_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_columns(&self.basis)
    }

    pub fn projector(&self) -> DMatrix<C64> {
        let b = self.basis_matrix();
        &b * b.adjoint()
    }

    pub fn encode(&self, logical: &LogicalState) -> Result<DVector<C64>> {
        if logical.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), actual: logical.len() });
        }
        Ok(self.basis_matrix() * logical.amplitudes())
    }

    pub fn decode(&self, ket: &DVector<C64>) -> Result<Decoded> {
        if ket.len() != self.register_dim() {
            return Err(Error::DimensionMismatch { expected: self.register_dim(), actual: ket.len() });
        }
        let b = self.basis_matrix();
        let amplitudes = b.adjoint() * ket;
        let residual = ket - &b * &amplitudes;
        Ok(Decoded { amplitudes, leakage: residual.norm_squared() })
    }

    /// `1 - tr(P ρ)` for a register density matrix.
    pub fn density_leakage(&self, rho: &DMatrix<C64>) -> Result<f64> {
        if rho.nrows() != self.register_dim() || rho.ncols() != self.register_dim() {
            return Err(Error::DimensionMismatch { expected: self.register_dim(), actual: rho.nrows() });
        }
        let b = self.basis_matrix();
        let inside = (b.adjoint() * rho * &b).trace().re;
        Ok((rho.trace().re - inside).max(0.0))
    }

    /// Embeds a logical density matrix `R` as `Σ R_ij |ψ_i⟩⟨ψ_j|`.
    pub fn encode_density(&self, logical: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        if logical.nrows() != self.dimension() || logical.ncols() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), actual: logical.nrows() });
        }
        let b = self.basis_matrix();
        Ok(&b * logical * b.adjoint())
    }

    /// `max_{v, G} ‖G v‖` over basis vectors and all collective generators.
    pub fn annihilation_residual(&self) -> Result<f64> {
        let gens = GeneratorSet::new(self.rank, self.replicas)?;
        let mut worst = 0.0f64;
        for v in &self.basis {
            for g in gens.collective_all() {
                worst = worst.max(g.mul_dvec(v)?.norm());
            }
        }
        Ok(worst)
    }

    /// Largest deviation of the basis Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let b = self.basis_matrix();
        let gram = b.adjoint() * &b;
        (gram - DMatrix::<C64>::identity(self.dimension(), self.dimension())).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Writes the basis as plain text: one ket per row, nonzero entries as
    /// whitespace-separated `index real imag` triples.
    pub fn write_basis<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# noiseless code basis")?;
        writeln!(out, "# replicas={} rank={} local_dim={} kets={}", self.replicas, self.rank, self.local_dim(), self.dimension())?;
        writeln!(out, "# row format: index real imag [index real imag ...]")?;
        for v in &self.basis {
            let mut line = String::new();
            for (i, a) in v.iter().enumerate() {
                if *a != ZERO {
                    if !line.is_empty() {
                        line.push(' ');
                    }
                    write!(line, "{i} {:.17e} {:.17e}", a.re + 0.0, a.im + 0.0).expect("string write");
                }
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Parses rows written by [`CodeSubspace::write_basis`] into kets of length `dim`.
pub fn read_basis<R: BufRead>(input: R, dim: usize) -> Result<Vec<DVector<C64>>> {
    let mut kets = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !fields.len().is_multiple_of(3) {
            return Err(Error::Config(format!("line {}: expected index/real/imag triples", lineno + 1)));
        }
        let mut ket = DVector::from_element(dim, ZERO);
        for t in fields.chunks(3) {
            let parse_err = |what: &str| Error::Config(format!("line {}: bad {what} {:?}", lineno + 1, t));
            let idx: usize = t[0].parse().map_err(|_| parse_err("index"))?;
            let re: f64 = t[1].parse().map_err(|_| parse_err("real part"))?;
            let im: f64 = t[2].parse().map_err(|_| parse_err("imaginary part"))?;
            if idx >= dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: idx + 1 });
            }
            ket[idx] = C64::new(re, im);
        }
        kets.push(ket);
    }
    Ok(kets)
}

/// Real-valued logical basis state `|k⟩` of a code of dimension `n`.
pub fn logical_basis_state(n: usize, k: usize) -> Result<LogicalState> {
    if k >= n {
        return Err(Error::Precondition(format!("logical index {k} out of range for dimension {n}")));
    }
    let mut amps = vec![ZERO; n];
    amps[k] = ONE;
    LogicalState::new(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{product_ket, transposition_operator};
    use crate::linalg::principal_angles;
    use crate::random::{haar_ket, seeded};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn two_replica_singlet() {
        let code = singlet_basis(2, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        assert_eq!(code.dimension(), 1);
        let s = 1.0 / 2f64.sqrt();
        let expected = DVector::from_vec(vec![c(0.0), c(s), c(-s), c(0.0)]);
        let overlap = code.basis[0].dotc(&expected).norm();
        assert!((overlap - 1.0).abs() < 1e-14);
        assert!(code.annihilation_residual().unwrap() < 1e-14);
    }

    #[test]
    fn kernel_dimensions() {
        for (n, r, k) in [(2, 1, 1), (4, 1, 2), (6, 1, 5), (3, 2, 1), (6, 2, 5), (4, 3, 1)] {
            let code = singlet_basis(n, r, DEFAULT_NULL_TOLERANCE).unwrap();
            assert_eq!(code.dimension(), k, "N={n} r={r}");
            assert!(code.orthonormality_defect() < 1e-12);
            assert!(code.annihilation_residual().unwrap() <= 10.0 * code.null_tolerance);
        }
    }

    #[test]
    fn empty_code_errors() {
        let err = singlet_basis(5, 1, DEFAULT_NULL_TOLERANCE).unwrap_err();
        assert_eq!(err.to_string(), "no singlets: N odd (5)");
        assert!(matches!(singlet_basis(4, 2, 1e-9), Err(Error::EmptyCode(_))));
        assert!(matches!(singlet_basis(0, 1, 1e-9), Err(Error::EmptyCode(_))));
    }

    #[test]
    fn absurd_tolerance_is_caught() {
        // a cutoff above every singular value swallows the whole zero-weight space
        let err = singlet_basis(4, 1, 10.0).unwrap_err();
        assert_eq!(err, Error::KernelMismatch { numerical: 6, algebraic: 2 });
    }

    #[test]
    fn antisymmetric_singlets() {
        let s = 1.0 / 2f64.sqrt();
        let psi = antisymmetric_singlet(1).unwrap();
        // (|01⟩ - |10⟩)/√2
        assert_eq!(psi, DVector::from_vec(vec![c(0.0), c(s), c(-s), c(0.0)]));
        let psi2 = antisymmetric_singlet(2).unwrap();
        assert_eq!(psi2.iter().filter(|a| a.norm() > 0.0).count(), 6);
        assert!((psi2.norm() - 1.0).abs() < 1e-15);
        for rank in 1..=3 {
            let psi = antisymmetric_singlet(rank).unwrap();
            let gens = GeneratorSet::new(rank, rank + 1).unwrap();
            for g in gens.collective_all() {
                assert!(g.mul_dvec(&psi).unwrap().norm() < 1e-13);
            }
        }
    }

    #[test]
    fn qutrit_code_is_the_antisymmetric_vector() {
        let code = singlet_basis(3, 2, DEFAULT_NULL_TOLERANCE).unwrap();
        let psi = antisymmetric_singlet(2).unwrap();
        assert!((code.basis[0].dotc(&psi).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_c4_vectors() {
        let [p1, p2] = reference_c4_basis();
        assert!((p1.norm() - 1.0).abs() < 1e-15);
        assert!((p2.norm() - 1.0).abs() < 1e-15);
        assert!((p1.dotc(&p2) - c(0.5)).norm() < 1e-15);
        let gens = GeneratorSet::new(1, 4).unwrap();
        for g in gens.collective_all() {
            assert!(g.mul_dvec(&p1).unwrap().norm() < 1e-14);
            assert!(g.mul_dvec(&p2).unwrap().norm() < 1e-14);
        }
        let code = singlet_basis(4, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        let angles = principal_angles(&[p1, p2], &code.basis).unwrap();
        assert!(angles.iter().all(|&a| a < 1e-10), "{angles:?}");
    }

    #[test]
    fn orthonormalize_c4_by_hand() {
        let [p1, p2] = reference_c4_basis();
        let q = orthonormalize(&[p1.clone(), p2.clone()], 1e-12).unwrap();
        let second = &p2 - &p1 * c(0.5);
        let second = &second / c(second.norm());
        assert!((&q[0] - &p1).norm() < 1e-14);
        assert!((&q[1] - &second).norm() < 1e-14);
        let already = orthonormalize(&q, 1e-12).unwrap();
        assert!((&already[0] - &q[0]).norm() < 1e-14 && (&already[1] - &q[1]).norm() < 1e-14);
    }

    #[test]
    fn encode_decode() {
        let code = singlet_basis(4, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        let first = code.encode(&logical_basis_state(2, 0).unwrap()).unwrap();
        assert!((&first - &code.basis[0]).norm() < 1e-15);
        let plus = LogicalState::normalized(vec![c(1.0), c(1.0)]).unwrap();
        let ket = code.encode(&plus).unwrap();
        assert!((ket.norm() - 1.0).abs() < 1e-12);
        let dec = code.decode(&ket).unwrap();
        assert!(dec.leakage < 1e-12);
        assert!((dec.logical().unwrap().amplitudes() - plus.amplitudes()).norm() < 1e-12);
        assert!(code.encode(&logical_basis_state(3, 0).unwrap()).is_err());
    }

    #[test]
    fn round_trip_random_logicals() {
        let code = singlet_basis(6, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        let mut rng = seeded(5);
        for _ in 0..100 {
            let x = haar_ket(code.dimension(), &mut rng);
            let logical = LogicalState::new(x.iter().copied().collect()).unwrap();
            let dec = code.decode(&code.encode(&logical).unwrap()).unwrap();
            assert!((dec.amplitudes - x).norm() < 1e-12);
            assert!(dec.leakage < 1e-12);
        }
    }

    #[test]
    fn all_ground_product_state_fully_leaks() {
        let code = singlet_basis(4, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        let ket = DVector::from_vec(product_ket(&[0, 0, 0, 0], 2).unwrap());
        assert!((code.decode(&ket).unwrap().leakage - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_leakage_matches_dimension_ratio() {
        let code = singlet_basis(4, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        let mut rng = seeded(2024);
        let samples = 4000;
        let mean: f64 = (0..samples)
            .map(|_| code.decode(&haar_ket(16, &mut rng)).unwrap().leakage)
            .sum::<f64>()
            / samples as f64;
        // mean 14/16; per-sample std ≈ 0.08 so the sample mean is good to ~0.005
        assert!((mean - 14.0 / 16.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn projector_properties() {
        let code = singlet_basis(4, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        let p = code.projector();
        assert!((&p * &p - &p).norm() < 1e-12);
        let gens = GeneratorSet::new(1, 4).unwrap();
        for g in gens.collective_all() {
            assert!((g.to_dense() * &p).norm() < 1e-12);
        }
    }

    #[test]
    fn code_is_permutation_invariant() {
        for (n, r) in [(4, 1), (6, 1), (3, 2)] {
            let code = singlet_basis(n, r, DEFAULT_NULL_TOLERANCE).unwrap();
            for i in 0..n {
                for j in i + 1..n {
                    let p = transposition_operator(i, j, r + 1, n).unwrap();
                    let moved: Vec<_> = code.basis.iter().map(|v| p.mul_dvec(v).unwrap()).collect();
                    let angles = principal_angles(&code.basis, &moved).unwrap();
                    assert!(angles.iter().all(|&a| a < 1e-10));
                }
            }
        }
    }

    #[test]
    fn basis_file_round_trip() {
        let code = singlet_basis(4, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        let mut buf = Vec::new();
        code.write_basis(&mut buf).unwrap();
        let back = read_basis(buf.as_slice(), 16).unwrap();
        assert_eq!(back, code.basis);
    }

    #[test]
    fn deterministic_phase_convention() {
        let code = singlet_basis(6, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        let firsts: Vec<usize> = code.basis.iter().map(first_support).collect();
        assert!(firsts.windows(2).all(|w| w[0] <= w[1]));
        for v in &code.basis {
            let a = v[first_support(v)];
            assert!(a.re > 0.0 && a.im.abs() < 1e-15);
        }
    }
}
