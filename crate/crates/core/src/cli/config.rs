//! JSON experiment configuration.
//!
//! Unknown keys are rejected. Parse errors carry serde's line and column;
//! semantic errors name the offending key and the line it first appears on.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{basis_index, product_ket, GeneratorSet, C64};
use crate::codes::CodeSubspace;
use crate::dynamics::{
    exchange_interaction, heisenberg, swap_interaction, weight_space, BathSpec, CouplingSpec, FockMixture, ModelFlags,
    SimulationSetup, SystemSpec, TimeGrid,
};
use crate::error::{Error, Result};
use crate::random::{ginibre_density, haar_ket};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub replicas: usize,
    pub rank: usize,
    /// One per Cartan generator; defaults to 1.0 each.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_splittings: Option<Vec<f64>>,
    pub bath: BathConfig,
    pub coupling: CouplingConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replica_interaction: Option<InteractionConfig>,
    #[serde(default = "default_phase_scales")]
    pub phase_scales: Vec<f64>,
    pub time: TimeConfig,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub encoded_state: EncodedStateConfig,
    /// Defaults to the product state |0101…⟩.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_state: Option<ReferenceStateConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub frequencies: Vec<f64>,
    pub truncation: usize,
    pub mixture: MixtureConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MixtureConfig {
    Vacuum,
    Fock { terms: Vec<FockTerm> },
    Thermal { beta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockTerm {
    pub occupations: Vec<usize>,
    pub weight: f64,
}

/// Amplitudes are `[re, im]` pairs indexed `[mode][α]`. Either give them
/// explicitly or set `random_scale` to draw them from the seed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<f64>>,
    #[serde(default)]
    pub flags: FlagsConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsConfig {
    #[serde(default = "yes")]
    pub absorption: bool,
    #[serde(default = "yes")]
    pub counter_rotating: bool,
    #[serde(default = "yes")]
    pub dephasing: bool,
}

impl Default for FlagsConfig {
    fn default() -> Self {
        Self { absorption: true, counter_rotating: true, dephasing: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InteractionConfig {
    /// `J Σ_{i<j} 2 S_i·S_j` over all pairs (rank 1).
    Exchange { j: f64 },
    /// `Σ J_ij 2 S_i·S_j` on listed pairs (rank 1).
    Heisenberg { pairs: Vec<(usize, usize, f64)> },
    /// `Σ J_ij P_ij` with replica swaps, any rank.
    Swap { pairs: Vec<(usize, usize, f64)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EncodedStateConfig {
    /// Random mixed logical state, encoded.
    #[default]
    RandomCode,
    /// One orthonormal code basis ket.
    CodeBasis { index: usize },
    /// Random pure state on the weight space of the given product state.
    WeightSpace { levels: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceStateConfig {
    Product { levels: Vec<usize> },
    /// Equal superposition of every product basis state.
    Uniform,
}

fn default_phase_scales() -> Vec<f64> {
    vec![0.0, 1e-3, 1e-2, 1e-1]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn yes() -> bool {
    true
}

fn pair(z: &[f64; 2]) -> C64 {
    C64::new(z[0], z[1])
}

impl ExperimentConfig {
    /// The frozen N=4 qubit experiment: two modes, three-excitation truncation,
    /// O(1) couplings, t in [0, 20].
    pub fn default_n4() -> Self {
        Self {
            experiment: "fixed_point_n4".into(),
            replicas: 4,
            rank: 1,
            level_splittings: Some(vec![1.0]),
            bath: BathConfig {
                frequencies: vec![1.0, 1.3],
                truncation: 3,
                mixture: MixtureConfig::Fock {
                    terms: vec![
                        FockTerm { occupations: vec![0, 1], weight: 0.6 },
                        FockTerm { occupations: vec![2, 0], weight: 0.4 },
                    ],
                },
            },
            coupling: CouplingConfig {
                g: Some(vec![vec![[0.8, 0.0]], vec![[0.6, 0.2]]]),
                f: Some(vec![vec![[0.5, 0.0]], vec![[0.4, -0.1]]]),
                h: Some(vec![vec![[0.3, 0.0]], vec![[0.5, 0.0]]]),
                ..CouplingConfig::default()
            },
            replica_interaction: None,
            phase_scales: default_phase_scales(),
            time: TimeConfig { t_max: 20.0, steps: 200 },
            seed: 20240601,
            output_dir: default_output_dir(),
            encoded_state: EncodedStateConfig::RandomCode,
            reference_state: Some(ReferenceStateConfig::Product { levels: vec![0, 1, 0, 1] }),
        }
    }

    /// Parses and validates; errors are `Error::Config` with a location.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate().map_err(|e| match e {
            Error::Config(msg) => Error::Config(locate(text, &msg)),
            other => Error::Config(other.to_string()),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Single-line JSON echo used in output headers.
    pub fn to_compact_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn to_pretty_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn local_dim(&self) -> usize {
        self.rank + 1
    }

    /// Semantic checks. Messages start with the offending key.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("`{key}`: {msg}")));
        if self.experiment.is_empty() || self.experiment.contains(['/', '\\']) {
            return bad("experiment", "must be a non-empty name without path separators".into());
        }
        if self.rank == 0 {
            return bad("rank", "must be at least 1".into());
        }
        if self.replicas == 0 {
            return bad("replicas", "must be at least 1".into());
        }
        if let Some(ls) = &self.level_splittings {
            if ls.len() != self.rank || ls.iter().any(|x| !x.is_finite()) {
                return bad("level_splittings", format!("need {} finite values", self.rank));
            }
        }
        if !(self.time.t_max > 0.0 && self.time.t_max.is_finite()) || self.time.steps == 0 {
            return bad("time", "t_max must be positive and steps at least 1".into());
        }
        if self.phase_scales.is_empty() || self.phase_scales.iter().any(|s| !s.is_finite()) {
            return bad("phase_scales", "need at least one finite value".into());
        }
        let modes = self.bath.frequencies.len();
        let c = &self.coupling;
        let explicit = [&c.g, &c.f, &c.h];
        match c.random_scale {
            Some(s) if !(s.is_finite() && s >= 0.0) => return bad("random_scale", "must be finite and non-negative".into()),
            Some(_) if explicit.iter().any(|x| x.is_some()) => {
                return bad("random_scale", "cannot be combined with explicit g/f/h".into())
            }
            _ => {}
        }
        for (name, fam) in ["g", "f", "h"].iter().zip(explicit) {
            if let Some(a) = fam {
                if a.len() != modes || a.iter().any(|row| row.len() != self.rank) {
                    return bad(name, format!("expected {modes} modes x {} generators", self.rank));
                }
                if a.iter().flatten().flatten().any(|x| !x.is_finite()) {
                    return bad(name, "amplitudes must be finite".into());
                }
            }
        }
        if let Some(tau) = &c.tau {
            if tau.len() != self.rank {
                return bad("tau", format!("need {} values", self.rank));
            }
        }
        if let Some(inter) = &self.replica_interaction {
            let pairs = match inter {
                InteractionConfig::Exchange { .. } => &[][..],
                InteractionConfig::Heisenberg { pairs } | InteractionConfig::Swap { pairs } => pairs.as_slice(),
            };
            if !matches!(inter, InteractionConfig::Swap { .. }) && self.rank != 1 {
                return bad("replica_interaction", "exchange and heisenberg need rank 1; use swap".into());
            }
            if pairs.iter().any(|&(i, j, _)| i == j || i >= self.replicas || j >= self.replicas) {
                return bad("pairs", format!("sites must be distinct and below {}", self.replicas));
            }
        }
        let check_levels = |key: &str, levels: &[usize]| {
            if levels.len() != self.replicas || levels.iter().any(|&l| l >= self.local_dim()) {
                return bad(key, format!("need {} levels, each below {}", self.replicas, self.local_dim()));
            }
            Ok(())
        };
        if let EncodedStateConfig::WeightSpace { levels } = &self.encoded_state {
            check_levels("levels", levels)?;
        }
        if let Some(ReferenceStateConfig::Product { levels }) = &self.reference_state {
            check_levels("levels", levels)?;
        }
        self.setup().map_err(|e| Error::Config(format!("`bath`: {e}")))?;
        self.mixture().map_err(|e| Error::Config(format!("`mixture`: {e}")))?;
        Ok(())
    }

    /// Setup with amplitudes drawn from `rng` when `random_scale` is set.
    pub fn setup_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SimulationSetup> {
        let splittings = self.level_splittings.clone().unwrap_or_else(|| vec![1.0; self.rank]);
        let mut system = SystemSpec::new(self.rank, self.replicas, splittings)?;
        if let Some(inter) = &self.replica_interaction {
            let h = match inter {
                InteractionConfig::Exchange { j } => exchange_interaction(self.replicas, *j)?,
                InteractionConfig::Heisenberg { pairs } => heisenberg(self.replicas, pairs)?,
                InteractionConfig::Swap { pairs } => swap_interaction(self.rank, self.replicas, pairs)?,
            };
            system = system.with_interaction(h)?;
        }
        let bath = BathSpec::new(self.bath.frequencies.clone(), self.bath.truncation)?;
        let modes = bath.modes();
        let c = &self.coupling;
        let mut coupling = match c.random_scale {
            Some(s) => CouplingSpec::random(modes, self.rank, s, rng),
            None => {
                let conv = |a: &Option<Vec<Vec<[f64; 2]>>>| {
                    a.as_ref().map_or(vec![vec![C64::new(0.0, 0.0); self.rank]; modes], |rows| {
                        rows.iter().map(|r| r.iter().map(pair).collect()).collect()
                    })
                };
                CouplingSpec { g: conv(&c.g), f: conv(&c.f), h: conv(&c.h), ..CouplingSpec::zero(modes, self.rank) }
            }
        };
        if let Some(tau) = &c.tau {
            coupling.tau = tau.clone();
        }
        coupling.flags = ModelFlags {
            absorption: c.flags.absorption,
            counter_rotating: c.flags.counter_rotating,
            dephasing: c.flags.dephasing,
        };
        SimulationSetup::new(system, bath, coupling)
    }

    /// Setup for validation purposes (random amplitudes drawn from the seed).
    pub fn setup(&self) -> Result<SimulationSetup> {
        self.setup_with(&mut crate::random::seeded(self.seed))
    }

    pub fn bath_spec(&self) -> Result<BathSpec> {
        BathSpec::new(self.bath.frequencies.clone(), self.bath.truncation)
    }

    pub fn mixture(&self) -> Result<FockMixture> {
        let bath = self.bath_spec()?;
        match &self.bath.mixture {
            MixtureConfig::Vacuum => Ok(FockMixture::vacuum(&bath)),
            MixtureConfig::Fock { terms } => {
                FockMixture::new(&bath, terms.iter().map(|t| (t.occupations.clone(), t.weight)).collect())
            }
            MixtureConfig::Thermal { beta } => FockMixture::thermal(&bath, *beta),
        }
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::uniform(self.time.t_max, self.time.steps)
    }

    /// Initial register state for the encoded run.
    pub fn encoded_state<R: Rng + ?Sized>(&self, code: Option<&CodeSubspace>, rng: &mut R) -> Result<DMatrix<C64>> {
        match &self.encoded_state {
            EncodedStateConfig::RandomCode => {
                let code = code.ok_or_else(|| Error::Config("`encoded_state`: no code for these parameters".into()))?;
                code.encode_density(&ginibre_density(code.dimension(), rng))
            }
            EncodedStateConfig::CodeBasis { index } => {
                let code = code.ok_or_else(|| Error::Config("`encoded_state`: no code for these parameters".into()))?;
                let v = code.basis.get(*index).ok_or_else(|| {
                    Error::Config(format!("`index`: code has {} basis kets", code.dimension()))
                })?;
                Ok(v * v.adjoint())
            }
            EncodedStateConfig::WeightSpace { levels } => {
                let gens = GeneratorSet::new(self.rank, self.replicas)?;
                let space = weight_space(&gens, basis_index(levels, self.local_dim()));
                let amps = haar_ket(space.len(), rng);
                let mut v = DVector::from_element(gens.register_dim(), C64::new(0.0, 0.0));
                for (k, &i) in space.iter().enumerate() {
                    v[i] = amps[k];
                }
                Ok(&v * v.adjoint())
            }
        }
    }

    /// Initial register state for the unencoded contrast run.
    pub fn reference_state(&self) -> Result<DMatrix<C64>> {
        let d = self.local_dim();
        let v = match &self.reference_state {
            Some(ReferenceStateConfig::Uniform) => {
                let dim = crate::algebra::checked_pow(d, self.replicas).ok_or(Error::NoReplicas)?;
                DVector::from_element(dim, C64::new(1.0 / (dim as f64).sqrt(), 0.0))
            }
            Some(ReferenceStateConfig::Product { levels }) => DVector::from_vec(product_ket(levels, d)?),
            None => {
                let levels: Vec<usize> = (0..self.replicas).map(|j| j % 2).collect();
                DVector::from_vec(product_ket(&levels, d)?)
            }
        };
        Ok(&v * v.adjoint())
    }
}

/// Appends the line of the first occurrence of the quoted key in `msg`.
fn locate(text: &str, msg: &str) -> String {
    let key = msg.strip_prefix('`').and_then(|m| m.split('`').next());
    let line = key.and_then(|k| {
        let quoted = format!("\"{k}\"");
        text.lines().position(|l| l.contains(&quoted))
    });
    match line {
        Some(n) => format!("{msg} at line {}", n + 1),
        None => msg.to_string(),
    }
}
