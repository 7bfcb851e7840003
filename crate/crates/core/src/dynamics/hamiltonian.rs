//! Register-plus-bath Hamiltonian `H_SB = H_S + H_B + H_I`.
//!
//! The joint space is `register ⊗ bath` with the register as the most
//! significant factor. The interaction couples each mode to the collective
//! generators (or, with site phases, to phase-weighted sums of local ones):
//!
//! ```text
//! H_I = Σ_{k,α} τ_α ( g_k^α X^+_{αk} b_k + f_k^α X^-_{αk} b_k† + h_k^α H_{αk} b_k + h.c. )
//! X_{αk} = Σ_j U_{jk} x_α^j
//! ```
//!
//! `U ≡ 1` is the replica-symmetric limit in which `X_{αk}` is the collective
//! generator and the singlet sector decouples from the bath.

use rand::Rng;

use super::bath::{build_bath_operators, BathSpec};
use crate::algebra::{embed_local, ComplexMatrix, GeneratorSet, C64, DENSE_THRESHOLD};
use crate::error::{Error, Result};
use crate::random::gaussian_complex;

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub rank: usize,
    pub replicas: usize,
    /// `ε_α` in `H_S = Σ_α ε_α H_α`.
    pub level_splittings: Vec<f64>,
    /// Optional replica-replica Hamiltonian on the register.
    pub replica_interaction: Option<ComplexMatrix>,
}

impl SystemSpec {
    pub fn new(rank: usize, replicas: usize, level_splittings: Vec<f64>) -> Result<Self> {
        let spec = Self { rank, replicas, level_splittings, replica_interaction: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_interaction(mut self, h_ss: ComplexMatrix) -> Result<Self> {
        self.replica_interaction = Some(h_ss);
        self.validate()?;
        Ok(self)
    }

    pub fn local_dim(&self) -> usize {
        self.rank + 1
    }

    pub fn register_dim(&self) -> usize {
        crate::algebra::checked_pow(self.local_dim(), self.replicas).unwrap_or(usize::MAX)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank < 1 {
            return Err(Error::InvalidRank(self.rank));
        }
        if self.replicas < 1 {
            return Err(Error::NoReplicas);
        }
        if self.level_splittings.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, actual: self.level_splittings.len() });
        }
        if self.register_dim() > DENSE_THRESHOLD {
            return Err(Error::DimensionOverflow { dim: self.register_dim(), limit: DENSE_THRESHOLD });
        }
        if let Some(h) = &self.replica_interaction {
            if h.rows() != self.register_dim() || h.cols() != self.register_dim() {
                return Err(Error::DimensionMismatch { expected: self.register_dim(), actual: h.rows() });
            }
            let defect = h.hermiticity_defect();
            if defect > 1e-12 {
                return Err(Error::NotHermitian(defect));
            }
        }
        Ok(())
    }
}

/// Which interaction families are switched on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelFlags {
    pub absorption: bool,
    pub counter_rotating: bool,
    pub dephasing: bool,
}

impl Default for ModelFlags {
    fn default() -> Self {
        Self { absorption: true, counter_rotating: true, dephasing: true }
    }
}

/// Register operator coupled bilinearly to one mode: `a X b_k + h.c.`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorCoupling {
    pub operator: ComplexMatrix,
    pub mode: usize,
    pub amplitude: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSpec {
    /// `g[k][α]`, couples raising generators to `b_k`.
    pub g: Vec<Vec<C64>>,
    /// `f[k][α]`, couples lowering generators to `b_k†`.
    pub f: Vec<Vec<C64>>,
    /// `h[k][α]`, couples Cartan generators to `b_k`.
    pub h: Vec<Vec<C64>>,
    /// `τ_α`, defaults to 1.
    pub tau: Vec<f64>,
    /// `U[j][k]`, unit-modulus per-replica phases; `None` is the symmetric case.
    pub site_phases: Option<Vec<Vec<C64>>>,
    pub flags: ModelFlags,
    /// Extra couplings through arbitrary register operators.
    pub operator_couplings: Vec<OperatorCoupling>,
}

impl CouplingSpec {
    pub fn zero(modes: usize, rank: usize) -> Self {
        let zeros = vec![vec![C64::new(0.0, 0.0); rank]; modes];
        Self {
            g: zeros.clone(),
            f: zeros.clone(),
            h: zeros,
            tau: vec![1.0; rank],
            site_phases: None,
            flags: ModelFlags::default(),
            operator_couplings: Vec::new(),
        }
    }

    /// Same amplitude for every mode and generator index.
    pub fn uniform(modes: usize, rank: usize, g: C64, f: C64, h: C64) -> Self {
        Self {
            g: vec![vec![g; rank]; modes],
            f: vec![vec![f; rank]; modes],
            h: vec![vec![h; rank]; modes],
            ..Self::zero(modes, rank)
        }
    }

    /// Independent complex Gaussian amplitudes with standard deviation `scale`.
    pub fn random<R: Rng + ?Sized>(modes: usize, rank: usize, scale: f64, rng: &mut R) -> Self {
        let mut draw = || -> Vec<Vec<C64>> {
            (0..modes)
                .map(|_| (0..rank).map(|_| gaussian_complex(rng) * (scale / 2f64.sqrt())).collect())
                .collect()
        };
        let g = draw();
        let f = draw();
        let h = draw();
        Self { g, f, h, ..Self::zero(modes, rank) }
    }

    /// Only the dephasing family.
    pub fn dephasing_only(mut self) -> Self {
        self.flags = ModelFlags { absorption: false, counter_rotating: false, dephasing: true };
        self
    }

    /// `U[j][k] = e^{i s j}` for every mode.
    pub fn with_phase_scale(mut self, replicas: usize, scale: f64) -> Self {
        let modes = self.g.len();
        self.site_phases = if scale == 0.0 {
            None
        } else {
            Some((0..replicas).map(|j| vec![C64::from_polar(1.0, scale * j as f64); modes]).collect())
        };
        self
    }

    pub fn is_replica_symmetric(&self) -> bool {
        self.site_phases
            .as_ref()
            .is_none_or(|u| u.iter().flatten().all(|p| (p - C64::new(1.0, 0.0)).norm() == 0.0))
    }

    fn validate(&self, system: &SystemSpec, bath: &BathSpec) -> Result<()> {
        let modes = bath.modes();
        for family in [&self.g, &self.f, &self.h] {
            if family.len() != modes {
                return Err(Error::DimensionMismatch { expected: modes, actual: family.len() });
            }
            if let Some(row) = family.iter().find(|row| row.len() != system.rank) {
                return Err(Error::DimensionMismatch { expected: system.rank, actual: row.len() });
            }
        }
        if self.tau.len() != system.rank {
            return Err(Error::DimensionMismatch { expected: system.rank, actual: self.tau.len() });
        }
        if let Some(u) = &self.site_phases {
            if u.len() != system.replicas {
                return Err(Error::DimensionMismatch { expected: system.replicas, actual: u.len() });
            }
            for row in u {
                if row.len() != modes {
                    return Err(Error::DimensionMismatch { expected: modes, actual: row.len() });
                }
                if let Some(p) = row.iter().find(|p| (p.norm() - 1.0).abs() > 1e-12) {
                    return Err(Error::Precondition(format!("site phase {p} is not unit modulus")));
                }
            }
        }
        for oc in &self.operator_couplings {
            if oc.mode >= modes {
                return Err(Error::Precondition(format!("operator coupling to missing mode {}", oc.mode)));
            }
            if oc.operator.rows() != system.register_dim() || oc.operator.cols() != system.register_dim() {
                return Err(Error::DimensionMismatch { expected: system.register_dim(), actual: oc.operator.rows() });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationSetup {
    pub system: SystemSpec,
    pub bath: BathSpec,
    pub coupling: CouplingSpec,
}

impl SimulationSetup {
    pub fn new(system: SystemSpec, bath: BathSpec, coupling: CouplingSpec) -> Result<Self> {
        let setup = Self { system, bath, coupling };
        setup.validate()?;
        Ok(setup)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.bath.validate()?;
        self.coupling.validate(&self.system, &self.bath)?;
        let dim = self.joint_dim();
        if dim > DENSE_THRESHOLD {
            return Err(Error::DimensionOverflow { dim, limit: DENSE_THRESHOLD });
        }
        Ok(())
    }

    pub fn joint_dim(&self) -> usize {
        self.system.register_dim().saturating_mul(self.bath.dim())
    }

    pub fn hamiltonian(&self) -> Result<ComplexMatrix> {
        assemble_hamiltonian(&self.system, &self.bath, &self.coupling)
    }

    /// `H_S = Σ ε_α H_α (+ H_SS)` on the register alone.
    pub fn register_hamiltonian(&self) -> Result<ComplexMatrix> {
        let gens = GeneratorSet::new(self.system.rank, self.system.replicas)?;
        register_hamiltonian(&self.system, &gens)
    }
}

fn register_hamiltonian(system: &SystemSpec, gens: &GeneratorSet) -> Result<ComplexMatrix> {
    let dim = system.register_dim();
    let mut h_s = ComplexMatrix::zeros(dim, dim);
    for (eps, cartan) in system.level_splittings.iter().zip(&gens.collective_cartan) {
        h_s = h_s.add(&cartan.scale(C64::new(*eps, 0.0)))?;
    }
    if let Some(h_ss) = &system.replica_interaction {
        h_s = h_s.add(h_ss)?;
    }
    Ok(h_s)
}

/// `Σ_j U[j][k] embed(x, j)`, or the collective sum when `phases` is `None`.
fn phased_sum(
    local: &ComplexMatrix,
    collective: &ComplexMatrix,
    phases: Option<&Vec<Vec<C64>>>,
    mode: usize,
    replicas: usize,
) -> Result<ComplexMatrix> {
    match phases {
        None => Ok(collective.clone()),
        Some(u) => {
            let mut acc = ComplexMatrix::zeros(collective.rows(), collective.cols());
            for (j, row) in u.iter().enumerate().take(replicas) {
                acc = acc.add(&embed_local(local, j, replicas)?.scale(row[mode]))?;
            }
            Ok(acc)
        }
    }
}

pub fn assemble_hamiltonian(system: &SystemSpec, bath: &BathSpec, coupling: &CouplingSpec) -> Result<ComplexMatrix> {
    system.validate()?;
    bath.validate()?;
    coupling.validate(system, bath)?;
    let gens = GeneratorSet::new(system.rank, system.replicas)?;
    let modes = build_bath_operators(bath)?;
    let reg_id = ComplexMatrix::identity(system.register_dim());
    let bath_id = ComplexMatrix::identity(bath.dim());

    let mut total = register_hamiltonian(system, &gens)?.kron(&bath_id);
    total = total.add(&reg_id.kron(&bath.hamiltonian()?))?;

    let phases = coupling.site_phases.as_ref();
    let mut interaction = ComplexMatrix::zeros(total.rows(), total.cols());
    for (k, mode) in modes.iter().enumerate() {
        for alpha in 0..system.rank {
            let tau = C64::new(coupling.tau[alpha], 0.0);
            let mut terms: Vec<(C64, &ComplexMatrix, &ComplexMatrix, &ComplexMatrix)> = Vec::new();
            if coupling.flags.absorption {
                terms.push((coupling.g[k][alpha], &gens.local_raising[alpha], &gens.collective_raising[alpha], &mode.annihilation));
            }
            if coupling.flags.counter_rotating {
                terms.push((coupling.f[k][alpha], &gens.local_lowering[alpha], &gens.collective_lowering[alpha], &mode.creation));
            }
            if coupling.flags.dephasing {
                terms.push((coupling.h[k][alpha], &gens.local_cartan[alpha], &gens.collective_cartan[alpha], &mode.annihilation));
            }
            for (amp, local, coll, bath_op) in terms {
                if amp.norm() == 0.0 || tau.norm() == 0.0 {
                    continue;
                }
                let sys_op = phased_sum(local, coll, phases, k, system.replicas)?;
                let term = sys_op.kron(bath_op).scale(tau * amp);
                interaction = interaction.add(&term)?.add(&term.adjoint())?;
            }
        }
    }
    for oc in &coupling.operator_couplings {
        let term = oc.operator.kron(&modes[oc.mode].annihilation).scale(oc.amplitude);
        interaction = interaction.add(&term)?.add(&term.adjoint())?;
    }
    total = total.add(&interaction)?;

    let defect = total.hermiticity_defect();
    if defect > 1e-12 * total.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(total)
}

/// Interaction part alone (`H_SB - H_S ⊗ I - I ⊗ H_B`).
pub fn interaction_hamiltonian(setup: &SimulationSetup) -> Result<ComplexMatrix> {
    let full = setup.hamiltonian()?;
    let free = assemble_hamiltonian(
        &setup.system,
        &setup.bath,
        &CouplingSpec::zero(setup.bath.modes(), setup.system.rank),
    )?;
    full.sub(&free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ONE;
    use crate::codes::{singlet_basis, DEFAULT_NULL_TOLERANCE};
    use crate::random::seeded;
    use nalgebra::DVector;

    fn setup(replicas: usize, coupling: CouplingSpec) -> SimulationSetup {
        let system = SystemSpec::new(1, replicas, vec![1.0]).unwrap();
        let bath = BathSpec::new(vec![1.0], 3).unwrap();
        SimulationSetup::new(system, bath, coupling).unwrap()
    }

    #[test]
    fn free_hamiltonian_without_coupling() {
        let s = setup(2, CouplingSpec::zero(1, 1));
        let h = s.hamiltonian().unwrap();
        let h_s = s.register_hamiltonian().unwrap();
        let expected = h_s
            .kron(&ComplexMatrix::identity(4))
            .add(&ComplexMatrix::identity(4).kron(&s.bath.hamiltonian().unwrap()))
            .unwrap();
        assert!(h.sub(&expected).unwrap().max_abs() < 1e-15);
        assert_eq!(interaction_hamiltonian(&s).unwrap().nnz(), 0);
    }

    #[test]
    fn singlet_times_any_bath_state_is_annihilated() {
        let coupling = CouplingSpec { g: vec![vec![C64::new(0.8, 0.3)]], ..CouplingSpec::zero(1, 1) };
        let s = setup(2, coupling);
        let h_i = interaction_hamiltonian(&s).unwrap();
        assert!(h_i.nnz() > 0);
        let code = singlet_basis(2, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        let mut rng = seeded(1);
        let bath_state = crate::random::haar_ket(4, &mut rng);
        let joint = code.basis[0].kronecker(&bath_state);
        assert!(h_i.mul_dvec(&joint).unwrap().norm() < 1e-14);
    }

    #[test]
    fn interaction_annihilates_code_tensor_bath() {
        let mut rng = seeded(9);
        let system = SystemSpec::new(1, 4, vec![1.0]).unwrap();
        let bath = BathSpec::new(vec![1.0, 1.3], 3).unwrap();
        let coupling = CouplingSpec::random(2, 1, 1.0, &mut rng);
        let s = SimulationSetup::new(system, bath, coupling).unwrap();
        let h_i = interaction_hamiltonian(&s).unwrap().to_dense();
        let code = singlet_basis(4, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        let p = code.projector().kronecker(&nalgebra::DMatrix::<C64>::identity(16, 16));
        assert!((h_i * p).norm() < 1e-12);
    }

    #[test]
    fn random_couplings_give_hermitian_hamiltonians() {
        let mut rng = seeded(4);
        for rank in 1..=2 {
            let replicas = rank + 1;
            for _ in 0..5 {
                let system = SystemSpec::new(rank, replicas, vec![0.7; rank]).unwrap();
                let bath = BathSpec::new(vec![1.0, 1.4], 2).unwrap();
                let mut coupling = CouplingSpec::random(2, rank, 1.0, &mut rng);
                coupling.tau = (0..rank).map(|a| 1.0 + 0.5 * a as f64).collect();
                let coupling = coupling.with_phase_scale(replicas, 0.37);
                let h = assemble_hamiltonian(&system, &bath, &coupling).unwrap();
                assert!(h.hermiticity_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn phases_break_the_decoupling() {
        let coupling = CouplingSpec::uniform(1, 1, ONE, C64::new(0.0, 0.0), C64::new(0.0, 0.0)).with_phase_scale(2, 0.5);
        let s = setup(2, coupling);
        let code = singlet_basis(2, 1, DEFAULT_NULL_TOLERANCE).unwrap();
        let joint = code.basis[0].kronecker(&s.bath.fock_ket(&[1]).unwrap());
        let h_i = interaction_hamiltonian(&s).unwrap();
        assert!(h_i.mul_dvec(&joint).unwrap().norm() > 1e-3);
    }

    #[test]
    fn unit_phases_reproduce_symmetric_case() {
        let base = CouplingSpec::uniform(1, 1, ONE, C64::new(0.3, 0.1), C64::new(0.2, 0.0));
        let mut explicit = base.clone();
        explicit.site_phases = Some(vec![vec![ONE]; 3]);
        let a = setup(3, base).hamiltonian().unwrap();
        let b = setup(3, explicit).hamiltonian().unwrap();
        assert!(a.sub(&b).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        let system = SystemSpec::new(1, 2, vec![1.0]).unwrap();
        let bath = BathSpec::new(vec![1.0], 2).unwrap();
        let mut c = CouplingSpec::zero(1, 1);
        c.site_phases = Some(vec![vec![C64::new(2.0, 0.0)]; 2]);
        assert!(SimulationSetup::new(system.clone(), bath.clone(), c).is_err());
        assert!(SimulationSetup::new(system.clone(), bath.clone(), CouplingSpec::zero(2, 1)).is_err());
        let non_herm = ComplexMatrix::from_triplets(4, 4, [(0, 1, ONE)]).unwrap();
        assert!(matches!(system.clone().with_interaction(non_herm), Err(Error::NotHermitian(_))));
        assert!(SystemSpec::new(1, 13, vec![1.0]).is_err());
        let ket = DVector::from_element(4, ONE);
        assert_eq!(ket.len(), system.register_dim());
    }
}
