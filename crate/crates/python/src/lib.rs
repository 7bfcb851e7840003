//! Python bindings: code construction, multiplicities and the fixed-point
//! checks. Kets cross the boundary as lists of Python `complex`.

use std::path::PathBuf;

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use noiseless_codes::algebra::C64;
use noiseless_codes::cli::{self, ExperimentConfig};
use noiseless_codes::codes::{self, LogicalState, DEFAULT_NULL_TOLERANCE};
use noiseless_codes::dynamics::{
    liouvillian_fixed_point_check, BathSpec, CouplingSpec, FockMixture, SimulationSetup, SystemSpec, TimeGrid,
};
use noiseless_codes::{linalg, random, repn, Error};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Orthonormal basis of the singlet subspace of N replicas of sl(r+1).
#[pyclass(name = "CodeSubspace", module = "noiseless_py", frozen)]
pub struct PyCodeSubspace {
    inner: codes::CodeSubspace,
}

#[pymethods]
impl PyCodeSubspace {
    #[new]
    #[pyo3(signature = (replicas, rank = 1, tol = DEFAULT_NULL_TOLERANCE))]
    fn new(replicas: usize, rank: usize, tol: f64) -> PyResult<Self> {
        codes::singlet_basis(replicas, rank, tol).map(|inner| Self { inner }).map_err(py_err)
    }

    #[getter]
    fn replicas(&self) -> usize {
        self.inner.replicas
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn register_dim(&self) -> usize {
        self.inner.register_dim()
    }

    fn basis(&self) -> Vec<Vec<C64>> {
        self.inner.basis.iter().map(|v| v.iter().copied().collect()).collect()
    }

    fn encode(&self, amplitudes: Vec<C64>) -> PyResult<Vec<C64>> {
        let logical = LogicalState::new(amplitudes).map_err(py_err)?;
        Ok(self.inner.encode(&logical).map_err(py_err)?.iter().copied().collect())
    }

    /// Returns `(logical amplitudes, leakage)`.
    fn decode(&self, ket: Vec<C64>) -> PyResult<(Vec<C64>, f64)> {
        let d = self.inner.decode(&ket.into()).map_err(py_err)?;
        Ok((d.amplitudes.iter().copied().collect(), d.leakage))
    }

    fn annihilation_residual(&self) -> PyResult<f64> {
        self.inner.annihilation_residual().map_err(py_err)
    }

    fn orthonormality_defect(&self) -> f64 {
        self.inner.orthonormality_defect()
    }

    /// Principal angles against another basis of the same register.
    fn principal_angles(&self, other: Vec<Vec<C64>>) -> PyResult<Vec<f64>> {
        let other: Vec<_> = other.into_iter().map(Into::into).collect();
        linalg::principal_angles(&self.inner.basis, &other).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "CodeSubspace(replicas={}, rank={}, dimension={})",
            self.inner.replicas,
            self.inner.rank,
            self.inner.dimension()
        )
    }
}

/// Exact n(N), the number of singlets.
#[pyfunction]
#[pyo3(signature = (replicas, rank = 1))]
fn singlet_multiplicity(replicas: usize, rank: usize) -> BigUint {
    repn::singlet_multiplicity(replicas, rank)
}

/// `[(2j, multiplicity), ...]` for the N-fold spin-1/2 product.
#[pyfunction]
fn cg_sl2(replicas: usize) -> PyResult<Vec<(u32, BigUint)>> {
    let dec = repn::cg_sl2(replicas).map_err(py_err)?;
    Ok(dec.entries.into_iter().map(|(l, m)| (l.two_j, m)).collect())
}

/// `(log2 n, log2 n / N, log2 of the Hilbert-space fraction)`.
#[pyfunction]
#[pyo3(signature = (replicas, rank = 1))]
fn encoding_efficiency(replicas: usize, rank: usize) -> PyResult<(f64, f64, f64)> {
    let e = repn::encoding_efficiency(replicas, rank).map_err(py_err)?;
    Ok((e.log2_n, e.per_replica, e.log2_hilbert_fraction))
}

/// The non-orthogonal reference basis of the N=4 code.
#[pyfunction]
fn reference_c4_basis() -> Vec<Vec<C64>> {
    codes::reference_c4_basis().iter().map(|v| v.iter().copied().collect()).collect()
}

/// Max trace-distance deviation of a random code state under random
/// symmetric couplings, with the bath in the given Fock state.
#[pyfunction]
#[pyo3(signature = (replicas = 4, rank = 1, frequencies = vec![1.0, 1.3], truncation = 3, occupations = None, coupling_scale = 1.0, t_max = 20.0, steps = 100, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn fixed_point_deviation(
    replicas: usize,
    rank: usize,
    frequencies: Vec<f64>,
    truncation: usize,
    occupations: Option<Vec<usize>>,
    coupling_scale: f64,
    t_max: f64,
    steps: usize,
    seed: u64,
) -> PyResult<f64> {
    let run = || -> noiseless_codes::Result<f64> {
        let code = codes::singlet_basis(replicas, rank, DEFAULT_NULL_TOLERANCE)?;
        let bath = BathSpec::new(frequencies, truncation)?;
        let mut rng = random::seeded(seed);
        let coupling = CouplingSpec::random(bath.modes(), rank, coupling_scale, &mut rng);
        let setup = SimulationSetup::new(SystemSpec::new(rank, replicas, vec![1.0; rank])?, bath.clone(), coupling)?;
        let rho = code.encode_density(&random::ginibre_density(code.dimension(), &mut rng))?;
        let mix = match occupations {
            Some(occ) => FockMixture::new(&bath, vec![(occ, 1.0)])?,
            None => FockMixture::vacuum(&bath),
        };
        liouvillian_fixed_point_check(&code, &setup, &rho, &mix, &TimeGrid::uniform(t_max, steps)?)
    };
    run().map_err(py_err)
}

/// Runs `simulate` for a JSON config; returns the summary numbers.
#[pyfunction]
#[pyo3(signature = (config, out_dir = None))]
fn simulate_config(py: Python<'_>, config: PathBuf, out_dir: Option<PathBuf>) -> PyResult<(f64, f64, f64, bool)> {
    py.detach(|| -> noiseless_codes::Result<_> {
        let cfg = ExperimentConfig::load(&config)?;
        let r = cli::run_simulate(&cfg, out_dir.as_deref())?;
        Ok((r.encoded_max_deviation, r.reference_max_deviation, r.reference_final_fidelity, r.passed()))
    })
    .map_err(py_err)
}

/// Runs the site-phase sweep; returns `[(phase_scale, max_infidelity, max_leakage), ...]`.
#[pyfunction]
#[pyo3(signature = (config, out_dir = None, parallel = false))]
fn robustness_config(
    py: Python<'_>,
    config: PathBuf,
    out_dir: Option<PathBuf>,
    parallel: bool,
) -> PyResult<Vec<(f64, f64, f64)>> {
    py.detach(|| -> noiseless_codes::Result<_> {
        let cfg = ExperimentConfig::load(&config)?;
        let r = cli::run_robustness(&cfg, out_dir.as_deref(), parallel)?;
        Ok(r.rows.iter().map(|x| (x.phase_scale, x.max_infidelity, x.max_leakage)).collect())
    })
    .map_err(py_err)
}

/// Adds every binding to `m`; shared by the extension entry point and tests.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCodeSubspace>()?;
    m.add_function(wrap_pyfunction!(singlet_multiplicity, m)?)?;
    m.add_function(wrap_pyfunction!(cg_sl2, m)?)?;
    m.add_function(wrap_pyfunction!(encoding_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(reference_c4_basis, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_point_deviation, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_config, m)?)?;
    m.add_function(wrap_pyfunction!(robustness_config, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[pymodule]
fn noiseless_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
