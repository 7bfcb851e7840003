//! Truncated bosonic bath: ladder operators and Fock-state mixtures.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{checked_pow, ComplexMatrix, C64, DENSE_THRESHOLD, ZERO};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BathSpec {
    /// `ω_k > 0`, one per mode.
    pub mode_frequencies: Vec<f64>,
    /// Highest occupation kept per mode (`n_max >= 1`).
    pub fock_truncation: usize,
}

impl BathSpec {
    pub fn new(mode_frequencies: Vec<f64>, fock_truncation: usize) -> Result<Self> {
        let bath = Self { mode_frequencies, fock_truncation };
        bath.validate()?;
        Ok(bath)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.mode_frequencies.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::Precondition(format!("mode frequency {w} must be positive")));
        }
        if self.fock_truncation < 1 {
            return Err(Error::Precondition("fock truncation must be at least 1".into()));
        }
        let dim = self.checked_dim()?;
        if dim > DENSE_THRESHOLD {
            return Err(Error::DimensionOverflow { dim, limit: DENSE_THRESHOLD });
        }
        Ok(())
    }

    fn checked_dim(&self) -> Result<usize> {
        checked_pow(self.fock_truncation + 1, self.modes())
            .ok_or(Error::DimensionOverflow { dim: usize::MAX, limit: DENSE_THRESHOLD })
    }

    pub fn modes(&self) -> usize {
        self.mode_frequencies.len()
    }

    pub fn levels(&self) -> usize {
        self.fock_truncation + 1
    }

    /// `(n_max + 1)^modes`.
    pub fn dim(&self) -> usize {
        self.checked_dim().unwrap_or(usize::MAX)
    }

    /// Index of the Fock ket `|n_0 n_1 …⟩`, mode 0 most significant.
    pub fn fock_index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.modes() {
            return Err(Error::DimensionMismatch { expected: self.modes(), actual: occupations.len() });
        }
        if let Some(&n) = occupations.iter().find(|&&n| n > self.fock_truncation) {
            return Err(Error::Precondition(format!(
                "occupation {n} exceeds truncation {}",
                self.fock_truncation
            )));
        }
        Ok(occupations.iter().fold(0, |acc, &n| acc * self.levels() + n))
    }

    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.modes()];
        for slot in occ.iter_mut().rev() {
            *slot = index % self.levels();
            index /= self.levels();
        }
        occ
    }

    /// `E_K = Σ_k n_k ω_k`.
    pub fn fock_energy(&self, occupations: &[usize]) -> f64 {
        occupations.iter().zip(&self.mode_frequencies).map(|(&n, &w)| n as f64 * w).sum()
    }

    pub fn fock_ket(&self, occupations: &[usize]) -> Result<DVector<C64>> {
        let mut ket = DVector::from_element(self.dim(), ZERO);
        ket[self.fock_index(occupations)?] = C64::new(1.0, 0.0);
        Ok(ket)
    }

    /// `H_B = Σ_k ω_k b_k† b_k` on the bath space.
    pub fn hamiltonian(&self) -> Result<ComplexMatrix> {
        let diag: Vec<C64> = (0..self.dim())
            .map(|i| C64::new(self.fock_energy(&self.occupations(i)), 0.0))
            .collect();
        Ok(ComplexMatrix::diagonal(&diag))
    }
}

/// Ladder operators of one mode, embedded in the full bath space.
#[derive(Clone, Debug, PartialEq)]
pub struct BathMode {
    pub annihilation: ComplexMatrix,
    pub creation: ComplexMatrix,
    pub number: ComplexMatrix,
}

/// `b_k`, `b_k†`, `b_k† b_k` for every mode; `b|0⟩ = 0` and `b†|n_max⟩ = 0`.
pub fn build_bath_operators(bath: &BathSpec) -> Result<Vec<BathMode>> {
    bath.validate()?;
    let levels = bath.levels();
    let local_b = ComplexMatrix::from_triplets_unchecked(
        levels,
        levels,
        (1..levels).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0))),
    );
    let mut out = Vec::with_capacity(bath.modes());
    for k in 0..bath.modes() {
        let left = ComplexMatrix::identity(checked_pow(levels, k).expect("validated"));
        let right = ComplexMatrix::identity(checked_pow(levels, bath.modes() - k - 1).expect("validated"));
        let b = left.kron(&local_b).kron(&right);
        let bd = b.adjoint();
        let number = bd.matmul(&b)?;
        out.push(BathMode { annihilation: b, creation: bd, number });
    }
    Ok(out)
}

/// Finite mixture of Fock projectors `Σ_K q_K |K⟩⟨K|`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockMixture {
    terms: Vec<(Vec<usize>, f64)>,
}

impl FockMixture {
    /// Validates occupations against `bath` and normalizes the weights.
    pub fn new(bath: &BathSpec, terms: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Precondition("bath mixture has no terms".into()));
        }
        let mut total = 0.0;
        for (occ, w) in &terms {
            bath.fock_index(occ)?;
            if !(*w >= 0.0 && w.is_finite()) {
                return Err(Error::Precondition(format!("bath weight {w} must be non-negative")));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::Precondition("bath weights sum to zero".into()));
        }
        Ok(Self { terms: terms.into_iter().map(|(o, w)| (o, w / total)).collect() })
    }

    pub fn vacuum(bath: &BathSpec) -> Self {
        Self { terms: vec![(vec![0; bath.modes()], 1.0)] }
    }

    /// Gibbs weights `e^{-β E_K}` over every Fock state below the truncation.
    pub fn thermal(bath: &BathSpec, beta: f64) -> Result<Self> {
        if beta.is_nan() || beta <= 0.0 {
            return Err(Error::Precondition(format!("inverse temperature {beta} must be positive")));
        }
        let terms = (0..bath.dim())
            .map(|i| {
                let occ = bath.occupations(i);
                let w = (-beta * bath.fock_energy(&occ)).exp();
                (occ, w)
            })
            .collect();
        Self::new(bath, terms)
    }

    pub fn terms(&self) -> &[(Vec<usize>, f64)] {
        &self.terms
    }

    pub fn to_density(&self, bath: &BathSpec) -> Result<DMatrix<C64>> {
        let mut rho = DMatrix::from_element(bath.dim(), bath.dim(), ZERO);
        for (occ, w) in &self.terms {
            let i = bath.fock_index(occ)?;
            rho[(i, i)] += C64::new(*w, 0.0);
        }
        Ok(rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bath(modes: usize, n_max: usize) -> BathSpec {
        BathSpec::new((0..modes).map(|k| 1.0 + 0.3 * k as f64).collect(), n_max).unwrap()
    }

    #[test]
    fn ladder_algebra_below_truncation() {
        let b = bath(1, 3);
        let ops = build_bath_operators(&b).unwrap();
        let comm = ops[0].annihilation.commutator(&ops[0].creation).unwrap().to_dense();
        for n in 0..3 {
            assert!((comm[(n, n)] - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
        // the truncation shows up only on the top level
        assert!((comm[(3, 3)] - C64::new(-3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn vacuum_and_top_level() {
        let b = bath(1, 2);
        let ops = build_bath_operators(&b).unwrap();
        let vac = b.fock_ket(&[0]).unwrap();
        assert_eq!(ops[0].annihilation.mul_dvec(&vac).unwrap().norm(), 0.0);
        let top = b.fock_ket(&[2]).unwrap();
        assert_eq!(ops[0].creation.mul_dvec(&top).unwrap().norm(), 0.0);
    }

    #[test]
    fn number_spectrum() {
        let b = bath(1, 4);
        let ops = build_bath_operators(&b).unwrap();
        let diag: Vec<f64> = (0..5).map(|i| ops[0].number.get(i, i).re).collect();
        for (i, v) in diag.iter().enumerate() {
            assert!((v - i as f64).abs() < 1e-14);
        }
        assert!(ops[0].number.sub(&ComplexMatrix::diagonal(&(0..5).map(|i| C64::new(i as f64, 0.0)).collect::<Vec<_>>())).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn distinct_modes_commute() {
        let b = bath(2, 3);
        let ops = build_bath_operators(&b).unwrap();
        assert!(ops[0].annihilation.commutator(&ops[1].creation).unwrap().max_abs() < 1e-14);
        assert!(ops[0].annihilation.commutator(&ops[1].annihilation).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn hamiltonian_matches_number_operators() {
        let b = bath(2, 2);
        let ops = build_bath_operators(&b).unwrap();
        let mut h = ComplexMatrix::zeros(b.dim(), b.dim());
        for (m, w) in ops.iter().zip(&b.mode_frequencies) {
            h = h.add(&m.number.scale(C64::new(*w, 0.0))).unwrap();
        }
        assert!(h.sub(&b.hamiltonian().unwrap()).unwrap().max_abs() < 1e-14);
        assert!((b.fock_energy(&[1, 2]) - (1.0 + 2.0 * 1.3)).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(BathSpec::new(vec![1.0], 0).is_err());
        assert!(BathSpec::new(vec![-1.0], 2).is_err());
        assert!(BathSpec::new(vec![1.0; 8], 3).is_err());
        let b = bath(1, 2);
        assert!(FockMixture::new(&b, vec![(vec![3], 1.0)]).is_err());
        assert!(FockMixture::new(&b, vec![(vec![1], -1.0)]).is_err());
    }

    #[test]
    fn mixtures_are_normalized() {
        let b = bath(2, 3);
        let mix = FockMixture::new(&b, vec![(vec![0, 1], 3.0), (vec![2, 0], 1.0)]).unwrap();
        let rho = mix.to_density(&b).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        let thermal = FockMixture::thermal(&b, 0.7).unwrap();
        assert_eq!(thermal.terms().len(), 16);
        assert!((thermal.to_density(&b).unwrap().trace().re - 1.0).abs() < 1e-14);
    }
}
