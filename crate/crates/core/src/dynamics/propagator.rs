//! `exp(-iHt)` for Hermitian `H`: full spectral decomposition up to a size
//! limit, Lanczos (Krylov) exponential-times-vector above it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::algebra::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Largest dimension handled by dense diagonalization.
pub const SPECTRAL_LIMIT: usize = 512;
/// Target error per unit-norm vector for the Krylov path.
pub const KRYLOV_TOLERANCE: f64 = 1e-12;
const KRYLOV_MAX_BASIS: usize = 40;

#[derive(Clone, Debug)]
pub enum Propagator {
    Spectral { energies: Vec<f64>, vectors: DMatrix<C64> },
    Krylov { hamiltonian: ComplexMatrix, tolerance: f64 },
}

/// Ket or density matrix on the joint space.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Ket(DVector<C64>),
    Density(DMatrix<C64>),
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.rows(), actual: h.cols() });
    }
    let defect = h.hermiticity_defect();
    if defect > 1e-12 * h.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

impl Propagator {
    /// Picks the spectral route for dimensions up to [`SPECTRAL_LIMIT`].
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        if h.rows() <= SPECTRAL_LIMIT {
            Self::spectral(h)
        } else {
            Self::krylov(h, KRYLOV_TOLERANCE)
        }
    }

    pub fn spectral(h: &ComplexMatrix) -> Result<Self> {
        check_hermitian(h)?;
        let dense = h.to_dense();
        let dense = (&dense + dense.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(dense);
        Ok(Self::Spectral { energies: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors })
    }

    pub fn krylov(h: &ComplexMatrix, tolerance: f64) -> Result<Self> {
        check_hermitian(h)?;
        Ok(Self::Krylov { hamiltonian: h.clone(), tolerance })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Spectral { vectors, .. } => vectors.nrows(),
            Self::Krylov { hamiltonian, .. } => hamiltonian.rows(),
        }
    }

    /// Expands `psi` once so repeated time points only cost a phase and a matvec.
    pub fn prepare(&self, psi: &DVector<C64>) -> Result<PreparedKet> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: psi.len() });
        }
        Ok(match self {
            Self::Spectral { vectors, .. } => PreparedKet::Eigenbasis(vectors.adjoint() * psi),
            Self::Krylov { .. } => PreparedKet::Plain(psi.clone()),
        })
    }

    pub fn apply_prepared(&self, prepared: &PreparedKet, t: f64) -> DVector<C64> {
        match (self, prepared) {
            (Self::Spectral { energies, vectors }, PreparedKet::Eigenbasis(c)) => {
                let phased = DVector::from_fn(c.len(), |i, _| c[i] * C64::from_polar(1.0, -energies[i] * t));
                vectors * phased
            }
            (Self::Krylov { hamiltonian, tolerance }, PreparedKet::Plain(psi)) => {
                krylov_expm(hamiltonian, psi, t, *tolerance)
            }
            (Self::Spectral { vectors, .. }, PreparedKet::Plain(psi)) => {
                self.apply_prepared(&PreparedKet::Eigenbasis(vectors.adjoint() * psi), t)
            }
            (Self::Krylov { .. }, PreparedKet::Eigenbasis(_)) => {
                unreachable!("eigenbasis coefficients only come from a spectral propagator")
            }
        }
    }

    /// `exp(-iHt) psi`.
    pub fn apply(&self, psi: &DVector<C64>, t: f64) -> Result<DVector<C64>> {
        let prepared = self.prepare(psi)?;
        Ok(self.apply_prepared(&prepared, t))
    }

    /// `U(t) ρ U(t)†`.
    pub fn apply_density(&self, rho: &DMatrix<C64>, t: f64) -> Result<DMatrix<C64>> {
        if rho.nrows() != self.dim() || rho.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: rho.nrows() });
        }
        match self {
            Self::Spectral { .. } => {
                let u = self.unitary(t).expect("spectral");
                Ok(&u * rho * u.adjoint())
            }
            Self::Krylov { .. } => {
                let half = self.apply_columns(rho, t)?;
                Ok(self.apply_columns(&half.adjoint(), t)?.adjoint())
            }
        }
    }

    fn apply_columns(&self, m: &DMatrix<C64>, t: f64) -> Result<DMatrix<C64>> {
        let cols: Result<Vec<_>> = m.column_iter().map(|c| self.apply(&c.into_owned(), t)).collect();
        Ok(DMatrix::from_columns(&cols?))
    }

    /// Dense `exp(-iHt)` (spectral route only).
    pub fn unitary(&self, t: f64) -> Option<DMatrix<C64>> {
        match self {
            Self::Spectral { energies, vectors } => {
                let mut scaled = vectors.clone();
                for (j, mut col) in scaled.column_iter_mut().enumerate() {
                    col *= C64::from_polar(1.0, -energies[j] * t);
                }
                Some(scaled * vectors.adjoint())
            }
            Self::Krylov { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum PreparedKet {
    Eigenbasis(DVector<C64>),
    Plain(DVector<C64>),
}

/// Evolves a ket or a density matrix by `exp(-iHt)`.
pub fn evolve(h: &ComplexMatrix, state: &State, t: f64) -> Result<State> {
    let prop = Propagator::new(h)?;
    Ok(match state {
        State::Ket(psi) => State::Ket(prop.apply(psi, t)?),
        State::Density(rho) => State::Density(prop.apply_density(rho, t)?),
    })
}

/// Lanczos approximation of `exp(-iHt) v` with adaptive sub-stepping.
///
/// The Krylov basis does not depend on the step length, so a rejected step
/// is retried with half the step against the same basis.
pub fn krylov_expm(h: &ComplexMatrix, v: &DVector<C64>, t: f64, tol: f64) -> DVector<C64> {
    let n = v.len();
    let mut w = v.clone();
    let mut remaining = t;
    let total = t.abs().max(f64::MIN_POSITIVE);
    while remaining != 0.0 {
        let beta0 = w.norm();
        if beta0 == 0.0 {
            return w;
        }
        let m_max = KRYLOV_MAX_BASIS.min(n);
        let mut basis: Vec<DVector<C64>> = vec![&w / C64::new(beta0, 0.0)];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut next_beta = 0.0;
        for j in 0..m_max {
            let mut z = DVector::from_vec(h.mul_vec_unchecked(basis[j].as_slice()));
            let a = basis[j].dotc(&z).re;
            alpha.push(a);
            // full reorthogonalization, twice
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dotc(&z);
                    z -= q * c;
                }
            }
            let b = z.norm();
            next_beta = b;
            if b <= 1e-13 * (a.abs() + beta.last().copied().unwrap_or(0.0)).max(1e-300) || j + 1 == m_max {
                break;
            }
            beta.push(b);
            basis.push(z / C64::new(b, 0.0));
        }
        let m = alpha.len();
        let happy = next_beta <= 1e-13 * alpha.iter().map(|a| a.abs()).fold(1e-300, f64::max);
        let tri = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(tri);
        let small_exp = |dt: f64| -> DVector<C64> {
            DVector::from_fn(m, |i, _| {
                (0..m)
                    .map(|k| {
                        let q = eig.eigenvectors[(i, k)] * eig.eigenvectors[(0, k)];
                        C64::from_polar(q, -eig.eigenvalues[k] * dt)
                    })
                    .sum()
            })
        };
        let mut dt = remaining;
        let y = loop {
            let y = small_exp(dt);
            let err = if happy { 0.0 } else { beta0 * next_beta * y[m - 1].norm() };
            if err <= tol * dt.abs() / total || dt.abs() < 1e-12 * total {
                break y;
            }
            dt *= 0.5;
        };
        let mut out = DVector::from_element(n, ZERO);
        for (q, coef) in basis.iter().zip(y.iter()) {
            out += q * (coef * beta0);
        }
        w = out;
        remaining -= dt;
        if remaining.abs() < 1e-15 * total {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{BathSpec, CouplingSpec, SimulationSetup, SystemSpec};
    use crate::random::{ginibre_density, haar_ket, seeded};

    fn random_hamiltonian(replicas: usize, n_max: usize, seed: u64) -> ComplexMatrix {
        let mut rng = seeded(seed);
        let system = SystemSpec::new(1, replicas, vec![1.0]).unwrap();
        let bath = BathSpec::new(vec![1.0, 1.3], n_max).unwrap();
        let coupling = CouplingSpec::random(2, 1, 0.8, &mut rng);
        SimulationSetup::new(system, bath, coupling).unwrap().hamiltonian().unwrap()
    }

    /// Independent route: Padé scaling-and-squaring from `nalgebra`.
    fn pade_unitary(h: &ComplexMatrix, t: f64) -> DMatrix<C64> {
        (h.to_dense() * C64::new(0.0, -t)).exp()
    }

    #[test]
    fn zero_time_is_identity() {
        let h = random_hamiltonian(2, 2, 1);
        let prop = Propagator::new(&h).unwrap();
        let u = prop.unitary(0.0).unwrap();
        assert!((u - DMatrix::<C64>::identity(h.rows(), h.rows())).norm() < 1e-12);
        let psi = haar_ket(h.rows(), &mut seeded(2));
        assert!((krylov_expm(&h, &psi, 0.0, 1e-12) - &psi).norm() == 0.0);
    }

    #[test]
    fn spectral_matches_pade() {
        let h = random_hamiltonian(2, 3, 3);
        let prop = Propagator::spectral(&h).unwrap();
        for t in [0.3, 2.0, 7.5] {
            let diff = prop.unitary(t).unwrap() - pade_unitary(&h, t);
            assert!(diff.norm() < 1e-10, "t={t}: {}", diff.norm());
        }
    }

    #[test]
    fn krylov_matches_spectral() {
        // 16 x 16 = 256 and 16 x 25 = 400
        for (n_max, seed) in [(3, 5), (4, 6)] {
            let h = random_hamiltonian(4, n_max, seed);
            assert!(h.rows() <= SPECTRAL_LIMIT);
            let spectral = Propagator::spectral(&h).unwrap();
            let krylov = Propagator::krylov(&h, 1e-12).unwrap();
            let psi = haar_ket(h.rows(), &mut seeded(seed + 100));
            for t in [0.1, 1.0, 5.0, 20.0] {
                let a = spectral.apply(&psi, t).unwrap();
                let b = krylov.apply(&psi, t).unwrap();
                assert!((a - b).norm() < 1e-10, "n_max={n_max} t={t}");
            }
        }
    }

    #[test]
    fn large_dimensions_use_krylov() {
        let h = random_hamiltonian(5, 3, 7);
        assert_eq!(h.rows(), 512);
        assert!(matches!(Propagator::new(&h).unwrap(), Propagator::Spectral { .. }));
        let h = random_hamiltonian(6, 3, 7);
        assert!(matches!(Propagator::new(&h).unwrap(), Propagator::Krylov { .. }));
        let psi = haar_ket(h.rows(), &mut seeded(8));
        let out = Propagator::new(&h).unwrap().apply(&psi, 3.0).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eigenstate_only_acquires_phase() {
        let h = random_hamiltonian(2, 2, 9);
        let Propagator::Spectral { energies, vectors } = Propagator::spectral(&h).unwrap() else {
            unreachable!()
        };
        let v = vectors.column(3).into_owned();
        let out = evolve(&h, &State::Ket(v.clone()), 4.0).unwrap();
        let State::Ket(out) = out else { unreachable!() };
        let expected = &v * C64::from_polar(1.0, -energies[3] * 4.0);
        assert!((out - expected).norm() < 1e-12);
    }

    #[test]
    fn unitarity_and_energy_conservation() {
        let h = random_hamiltonian(4, 3, 10);
        let prop = Propagator::new(&h).unwrap();
        let dense = h.to_dense();
        let psi = haar_ket(h.rows(), &mut seeded(11));
        let energy = |p: &DVector<C64>| (p.adjoint() * &dense * p)[(0, 0)].re;
        let e0 = energy(&psi);
        for step in 1..=20 {
            let out = prop.apply(&psi, step as f64).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-10);
            assert!((energy(&out) - e0).abs() <= 1e-9 * e0.abs().max(1.0));
        }
    }

    #[test]
    fn density_evolution_preserves_trace_and_positivity() {
        let h = random_hamiltonian(2, 3, 12);
        let rho = ginibre_density(h.rows(), &mut seeded(13));
        for prop in [Propagator::spectral(&h).unwrap(), Propagator::krylov(&h, 1e-12).unwrap()] {
            let out = prop.apply_density(&rho, 2.5).unwrap();
            assert!((out.trace().re - 1.0).abs() < 1e-10);
            assert!((&out - out.adjoint()).norm() < 1e-10);
            let min = crate::linalg::hermitian_eigenvalues(&out)[0];
            assert!(min >= -1e-9);
        }
        let u = pade_unitary(&h, 2.5);
        let oracle = &u * &rho * u.adjoint();
        let out = Propagator::spectral(&h).unwrap().apply_density(&rho, 2.5).unwrap();
        assert!((out - oracle).norm() < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = ComplexMatrix::from_triplets(2, 2, [(0, 1, C64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(Propagator::new(&h), Err(Error::NotHermitian(_))));
        let psi = DVector::from_element(2, C64::new(1.0, 0.0));
        assert!(evolve(&h, &State::Ket(psi), 1.0).is_err());
    }
}
