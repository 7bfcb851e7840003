//! Reduced register dynamics and the fixed-point checks built on it.
//!
//! The joint initial state `ρ_S ⊗ ρ_B` is unravelled exactly into kets: `ρ_S`
//! through its eigendecomposition and `ρ_B` as a Fock mixture. Each ket is
//! propagated and the reduced state is the weighted sum of their partial
//! traces over the bath.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::bath::FockMixture;
use super::hamiltonian::{CouplingSpec, SimulationSetup};
use super::interactions::symmetry_defect;
use super::propagator::{PreparedKet, Propagator};
use crate::algebra::{GeneratorSet, C64};
use crate::codes::CodeSubspace;
use crate::error::{Error, Result};
use crate::linalg::{accumulate_reduced_ket, fidelity, hermitize, purity, trace_distance};

/// Strictly increasing, non-negative sample times.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// `steps + 1` points from 0 to `t_max` inclusive.
    pub fn uniform(t_max: f64, steps: usize) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::Precondition(format!("t_max must be positive, got {t_max}")));
        }
        if steps == 0 {
            return Err(Error::Precondition("time grid needs at least one step".into()));
        }
        Self::from_times((0..=steps).map(|i| t_max * i as f64 / steps as f64).collect())
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Precondition("empty time grid".into()));
        }
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::Precondition("times must be finite and non-negative".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("time grid must be strictly increasing".into()));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Per-time metrics of the reduced register state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub purity: Vec<f64>,
    /// `1 - tr(P_C ρ_S)`; NaN when no code was supplied.
    pub leakage: Vec<f64>,
    pub trace_distance: Vec<f64>,
    pub states: Vec<DMatrix<C64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DMatrix<C64> {
        self.states.last().expect("trajectories are non-empty")
    }

    pub fn max_trace_distance(&self) -> f64 {
        self.trace_distance.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_fidelity(&self) -> f64 {
        self.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_infidelity(&self) -> f64 {
        self.fidelity.iter().map(|f| (1.0 - f).max(0.0)).fold(0.0, f64::max)
    }

    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().copied().filter(|l| !l.is_nan()).fold(0.0, f64::max)
    }

    /// `|ρ_S(t)[i, j]|` along the trajectory.
    pub fn coherence(&self, i: usize, j: usize) -> Vec<f64> {
        self.states.iter().map(|rho| rho[(i, j)].norm()).collect()
    }

    /// CSV `time,fidelity,purity,leakage,trace_distance`, 17 significant digits,
    /// preceded by `#` comment lines.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "time,fidelity,purity,leakage,trace_distance")?;
        for k in 0..self.times.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.times[k], self.fidelity[k], self.purity[k], self.leakage[k], self.trace_distance[k]
            )?;
        }
        Ok(())
    }
}

fn check_density(rho: &DMatrix<C64>, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: rho.nrows() });
    }
    let herm = (rho - rho.adjoint()).norm();
    if herm > 1e-10 {
        return Err(Error::NotHermitian(herm));
    }
    if (rho.trace().re - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!("register state has trace {}", rho.trace().re)));
    }
    Ok(())
}

/// Exact reduced trajectory of `ρ_S ⊗ ρ_B` under the full `H_SB`.
pub fn simulate(
    setup: &SimulationSetup,
    rho_s: &DMatrix<C64>,
    rho_b: &FockMixture,
    grid: &TimeGrid,
    code: Option<&CodeSubspace>,
) -> Result<Trajectory> {
    setup.validate()?;
    let sys_dim = setup.system.register_dim();
    let env_dim = setup.bath.dim();
    check_density(rho_s, sys_dim)?;
    let prop = Propagator::new(&setup.hamiltonian()?)?;

    let eig = SymmetricEigen::new(hermitize(rho_s));
    let mut ensemble: Vec<(f64, PreparedKet)> = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= 1e-15 {
            continue;
        }
        let phi = eig.eigenvectors.column(k).into_owned();
        for (occ, q) in rho_b.terms() {
            if *q == 0.0 {
                continue;
            }
            let joint = phi.kronecker(&setup.bath.fock_ket(occ)?);
            ensemble.push((lambda * q, prop.prepare(&joint)?));
        }
    }

    let mut traj = Trajectory {
        times: grid.times().to_vec(),
        fidelity: Vec::new(),
        purity: Vec::new(),
        leakage: Vec::new(),
        trace_distance: Vec::new(),
        states: Vec::new(),
    };
    for &t in grid.times() {
        let mut reduced = DMatrix::zeros(sys_dim, sys_dim);
        for (w, prepared) in &ensemble {
            let psi = prop.apply_prepared(prepared, t);
            accumulate_reduced_ket(&mut reduced, psi.as_slice(), env_dim, *w);
        }
        traj.fidelity.push(fidelity(rho_s, &reduced));
        traj.purity.push(purity(&reduced));
        traj.leakage.push(match code {
            Some(c) => c.density_leakage(&reduced)?,
            None => f64::NAN,
        });
        traj.trace_distance.push(trace_distance(rho_s, &reduced));
        traj.states.push(reduced);
    }
    Ok(traj)
}

/// Max trace distance `‖ρ_S(t) - ρ_S(0)‖` over the grid for a code-supported
/// `ρ_S`. Site phases are allowed (the robustness sweep uses them); a
/// replica-replica Hamiltonian is not.
pub fn liouvillian_fixed_point_check(
    code: &CodeSubspace,
    setup: &SimulationSetup,
    rho_s: &DMatrix<C64>,
    rho_b: &FockMixture,
    grid: &TimeGrid,
) -> Result<f64> {
    if setup.system.replica_interaction.is_some() {
        return Err(Error::Precondition("fixed-point check takes no replica interaction".into()));
    }
    check_code_support(code, rho_s)?;
    Ok(simulate(setup, rho_s, rho_b, grid, Some(code))?.max_trace_distance())
}

fn check_code_support(code: &CodeSubspace, rho_s: &DMatrix<C64>) -> Result<()> {
    let leak = code.density_leakage(rho_s)?;
    if leak >= 1e-12 {
        return Err(Error::Precondition(format!("initial state leaks {leak:e} out of the code")));
    }
    Ok(())
}

/// Cartan eigenvalues (doubled, so integral) of every product basis state.
pub fn weight_labels(gens: &GeneratorSet) -> Vec<Vec<i64>> {
    (0..gens.register_dim())
        .map(|i| gens.collective_cartan.iter().map(|h| (2.0 * h.get(i, i).re).round() as i64).collect())
        .collect()
}

/// Product basis indices spanning the weight space containing `index`.
pub fn weight_space(gens: &GeneratorSet, index: usize) -> Vec<usize> {
    let labels = weight_labels(gens);
    (0..labels.len()).filter(|&i| labels[i] == labels[index]).collect()
}

/// Fixed-point check for pure dephasing on a single weight space.
pub fn dephasing_weight_space_check(
    setup: &SimulationSetup,
    rho_s: &DMatrix<C64>,
    rho_b: &FockMixture,
    grid: &TimeGrid,
) -> Result<f64> {
    let c = &setup.coupling;
    let zero = |fam: &Vec<Vec<C64>>| fam.iter().flatten().all(|a| a.norm() == 0.0);
    if (c.flags.absorption && !zero(&c.g)) || (c.flags.counter_rotating && !zero(&c.f)) || !c.operator_couplings.is_empty() {
        return Err(Error::Precondition("dephasing check needs h-family couplings only".into()));
    }
    if setup.system.replica_interaction.is_some() {
        return Err(Error::Precondition("dephasing check takes H_S in Cartan form only".into()));
    }
    let gens = GeneratorSet::new(setup.system.rank, setup.system.replicas)?;
    let labels = weight_labels(&gens);
    let support: Vec<usize> = (0..rho_s.nrows()).filter(|&i| rho_s[(i, i)].norm() > 1e-12).collect();
    if support.windows(2).any(|w| labels[w[0]] != labels[w[1]]) {
        return Err(Error::Precondition("register state spans several weight spaces".into()));
    }
    Ok(simulate(setup, rho_s, rho_b, grid, None)?.max_trace_distance())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalReport {
    pub leakage_max: f64,
    /// Max trace distance to `U_S ρ U_S†`, `U_S = exp(-i H_SS t)`.
    pub unitarity_defect: f64,
}

/// Code dynamics under a symmetric replica interaction: the reduced state
/// must follow `U_S(t) ρ U_S(t)†` without leaving the code.
pub fn logical_evolution_check(
    code: &CodeSubspace,
    setup: &SimulationSetup,
    rho_s: &DMatrix<C64>,
    rho_b: &FockMixture,
    grid: &TimeGrid,
) -> Result<LogicalReport> {
    let gens = GeneratorSet::new(setup.system.rank, setup.system.replicas)?;
    let dim = setup.system.register_dim();
    let h_ss = setup
        .system
        .replica_interaction
        .clone()
        .unwrap_or_else(|| crate::algebra::ComplexMatrix::zeros(dim, dim));
    let defect = symmetry_defect(&h_ss, &gens)?;
    if defect >= 1e-10 {
        return Err(Error::Precondition(format!(
            "replica interaction does not commute with the collective generators (defect {defect:e})"
        )));
    }
    check_code_support(code, rho_s)?;
    let traj = simulate(setup, rho_s, rho_b, grid, Some(code))?;
    let u_s = Propagator::spectral(&h_ss)?;
    let mut worst = 0.0f64;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let predicted = u_s.apply_density(rho_s, *t)?;
        worst = worst.max(trace_distance(&predicted, state));
    }
    Ok(LogicalReport { leakage_max: traj.max_leakage(), unitarity_defect: worst })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub phase_scale: f64,
    pub max_infidelity: f64,
    pub max_leakage: f64,
}

/// Re-runs the reduced dynamics with site phases `U_jk = e^{i s j}` for each `s`.
pub fn symmetry_breaking_sweep(
    code: &CodeSubspace,
    setup: &SimulationSetup,
    rho_s: &DMatrix<C64>,
    rho_b: &FockMixture,
    grid: &TimeGrid,
    scales: &[f64],
) -> Result<Vec<SweepRow>> {
    scales.iter().map(|&s| sweep_point(code, setup, rho_s, rho_b, grid, s)).collect()
}

/// One row of [`symmetry_breaking_sweep`].
pub fn sweep_point(
    code: &CodeSubspace,
    setup: &SimulationSetup,
    rho_s: &DMatrix<C64>,
    rho_b: &FockMixture,
    grid: &TimeGrid,
    scale: f64,
) -> Result<SweepRow> {
    let coupling: CouplingSpec = setup.coupling.clone().with_phase_scale(setup.system.replicas, scale);
    let phased = SimulationSetup { coupling, ..setup.clone() };
    let traj = simulate(&phased, rho_s, rho_b, grid, Some(code))?;
    Ok(SweepRow { phase_scale: scale, max_infidelity: traj.max_infidelity(), max_leakage: traj.max_leakage() })
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W, comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "phase_scale,max_infidelity,max_leakage")?;
    for r in rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", r.phase_scale, r.max_infidelity, r.max_leakage)?;
    }
    Ok(())
}

/// `τ` from a least-squares fit of `ln|c(t)| = a - t/τ` over the initial decay
/// window: samples up to the first rise, or until `|c|` falls below `e^{-2} |c(0)|`.
pub fn decoherence_time_estimate(times: &[f64], coherence: &[f64]) -> Result<f64> {
    if times.len() != coherence.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), actual: coherence.len() });
    }
    if times.len() < 3 {
        return Err(Error::FitRejected("need at least three samples".into()));
    }
    let c0 = coherence[0];
    if c0.is_nan() || c0 <= 0.0 {
        return Err(Error::FitRejected("initial coherence is zero".into()));
    }
    let floor = c0 * (-2.0f64).exp();
    let mut end = 1;
    while end < coherence.len() && coherence[end] > 0.0 && coherence[end] <= coherence[end - 1] {
        end += 1;
        if coherence[end - 1] < floor {
            break;
        }
    }
    let end = end.max(3).min(coherence.len());
    let pts: Vec<(f64, f64)> = (0..end)
        .filter(|&i| coherence[i] > 0.0)
        .map(|i| (times[i], coherence[i].ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::FitRejected("too few positive samples in the decay window".into()));
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let span = pts.last().unwrap().0 - pts[0].0;
    // total log-decay across the window must be resolvable above roundoff
    if slope.is_nan() || slope >= 0.0 || -slope * span < 1e-8 {
        return Err(Error::FitRejected(format!("no decay (slope {slope:e})")));
    }
    Ok(-1.0 / slope)
}

/// Returns `(λ, ‖H v - λ v‖)` for `v = code_ket ⊗ |K⟩` and `λ = ⟨H_S⟩ + E_K`.
pub fn eigenstate_residual(
    setup: &SimulationSetup,
    code_ket: &DVector<C64>,
    occupations: &[usize],
) -> Result<(f64, f64)> {
    let h = setup.hamiltonian()?;
    let h_s = setup.register_hamiltonian()?;
    let energy_s = (code_ket.adjoint() * h_s.mul_dvec(code_ket)?)[(0, 0)].re;
    let lambda = energy_s + setup.bath.fock_energy(occupations);
    let v = code_ket.kronecker(&setup.bath.fock_ket(occupations)?);
    let residual = (h.mul_dvec(&v)? - &v * C64::new(lambda, 0.0)).norm();
    Ok((lambda, residual))
}
