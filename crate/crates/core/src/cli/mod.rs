//! Command-line front end.
//!
//! Every command is also a plain function returning a report, so the same
//! runs are reachable from tests and bindings. Exit codes: 0 pass, 1 a
//! physics budget was missed, 2 bad configuration or parameters.
//!
//! Basis files list one ket per line as `index real imag` triples over the
//! nonzero amplitudes, after `#` header lines. Trajectory and sweep files are
//! CSV with `#` provenance lines (tool version, seed, config echo).

mod config;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;

pub use config::{
    BathConfig, CouplingConfig, EncodedStateConfig, ExperimentConfig, FlagsConfig, FockTerm, InteractionConfig,
    MixtureConfig, ReferenceStateConfig, TimeConfig,
};

use crate::algebra::C64;
use crate::codes::{reference_c4_basis, singlet_basis, CodeSubspace, DEFAULT_NULL_TOLERANCE};
use crate::dynamics::{simulate, sweep_point, write_sweep_csv, Propagator, SweepRow};
use crate::error::{Error, Result};
use crate::linalg::{principal_angles, trace_distance};
use crate::random::seeded;
use crate::repn::{big_log2, encoding_efficiency, singlet_multiplicity};

/// Deviation budget for code-supported states.
pub const ENCODED_BUDGET: f64 = 1e-8;
/// Residual and angle budget for constructed code bases.
pub const BASIS_BUDGET: f64 = 1e-10;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "noiseless", version, about = "Noiseless code subspaces and their bath dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Singlet multiplicities n(N) and storage efficiency, as CSV on stdout.
    Multiplicities {
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long = "max-n")]
        max_n: usize,
    },
    /// Writes the orthonormal code basis and reports its residuals.
    Basis {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encoded and unencoded trajectories side by side.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Site-phase sweep that breaks replica symmetry.
    Robustness {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Runs sweep points on separate threads.
        #[arg(long)]
        parallel: bool,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicityRow {
    pub replicas: usize,
    /// Exact decimal rendering of n(N).
    pub count: String,
    pub log2_count: f64,
    pub per_replica: f64,
    pub hilbert_fraction: String,
}

/// Rows for every N ≤ `max_n` that is a multiple of `rank + 1`.
pub fn multiplicity_table(rank: usize, max_n: usize) -> Result<Vec<MultiplicityRow>> {
    if rank == 0 {
        return Err(Error::InvalidRank(rank));
    }
    if max_n < 2 {
        return Err(Error::Config("`max-n` must be at least 2".into()));
    }
    let step = rank + 1;
    (1..=max_n / step)
        .map(|m| {
            let n = m * step;
            let count = singlet_multiplicity(n, rank);
            let eff = encoding_efficiency(n, rank)?;
            Ok(MultiplicityRow {
                replicas: n,
                count: count.to_string(),
                log2_count: big_log2(&count),
                per_replica: eff.per_replica,
                hilbert_fraction: eff.hilbert_fraction_display(),
            })
        })
        .collect()
}

pub fn write_multiplicity_csv<W: Write>(rows: &[MultiplicityRow], mut out: W) -> Result<()> {
    writeln!(out, "N,n,log2_n,per_replica,hilbert_fraction")?;
    for r in rows {
        writeln!(out, "{},{},{:.16e},{:.16e},{}", r.replicas, r.count, r.log2_count, r.per_replica, r.hilbert_fraction)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisReport {
    pub path: PathBuf,
    pub dimension: usize,
    pub annihilation_residual: f64,
    pub orthonormality_defect: f64,
    /// Against the reference N=4 basis, when N=4 and r=1.
    pub principal_angles: Option<Vec<f64>>,
}

impl BasisReport {
    pub fn passed(&self) -> bool {
        self.annihilation_residual <= BASIS_BUDGET
            && self.orthonormality_defect <= BASIS_BUDGET
            && self.principal_angles.as_ref().is_none_or(|a| a.iter().all(|x| *x < BASIS_BUDGET))
    }
}

pub fn run_basis(replicas: usize, rank: usize, out_dir: &Path) -> Result<BasisReport> {
    let code = singlet_basis(replicas, rank, DEFAULT_NULL_TOLERANCE)?;
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(format!("code_N{replicas}_r{rank}.txt"));
    let mut out = BufWriter::new(File::create(&path)?);
    code.write_basis(&mut out)?;
    out.flush()?;
    let principal_angles = if replicas == 4 && rank == 1 {
        Some(principal_angles(&code.basis, &reference_c4_basis())?)
    } else {
        None
    };
    Ok(BasisReport {
        path,
        dimension: code.dimension(),
        annihilation_residual: code.annihilation_residual()?,
        orthonormality_defect: code.orthonormality_defect(),
        principal_angles,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulateReport {
    pub encoded_path: PathBuf,
    pub reference_path: PathBuf,
    pub encoded_max_deviation: f64,
    pub encoded_max_leakage: f64,
    pub reference_max_deviation: f64,
    pub reference_min_fidelity: f64,
    pub reference_final_fidelity: f64,
    /// With a replica interaction: max trace distance to `U_S ρ U_S†`.
    pub encoded_logical_defect: Option<f64>,
}

impl SimulateReport {
    /// Without a replica interaction the encoded state must stay put; with
    /// one it must follow `U_S ρ U_S†` and stay in the code.
    pub fn passed(&self) -> bool {
        match self.encoded_logical_defect {
            None => self.encoded_max_deviation <= ENCODED_BUDGET,
            Some(d) => d <= ENCODED_BUDGET && self.encoded_max_leakage.max(0.0) <= ENCODED_BUDGET,
        }
    }
}

fn provenance(cfg: &ExperimentConfig, run: &str) -> Vec<String> {
    vec![
        format!("noiseless {VERSION}"),
        format!("experiment={} run={run}", cfg.experiment),
        format!("seed={}", cfg.seed),
        format!("config={}", cfg.to_compact_json()),
    ]
}

fn code_for(cfg: &ExperimentConfig) -> Result<Option<CodeSubspace>> {
    match singlet_basis(cfg.replicas, cfg.rank, DEFAULT_NULL_TOLERANCE) {
        Ok(code) => Ok(Some(code)),
        Err(Error::EmptyCode(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

struct Prepared {
    setup: crate::dynamics::SimulationSetup,
    code: Option<CodeSubspace>,
    encoded: DMatrix<C64>,
    reference: DMatrix<C64>,
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    cfg.validate()?;
    let mut rng = seeded(cfg.seed);
    let setup = cfg.setup_with(&mut rng)?;
    let code = code_for(cfg)?;
    let encoded = cfg.encoded_state(code.as_ref(), &mut rng)?;
    let reference = cfg.reference_state()?;
    Ok(Prepared { setup, code, encoded, reference })
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    f(&mut out)?;
    out.flush()?;
    Ok(())
}

pub fn run_simulate(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<SimulateReport> {
    let p = prepare(cfg)?;
    let mix = cfg.mixture()?;
    let grid = cfg.grid()?;
    let dir = out_dir.unwrap_or(&cfg.output_dir);
    let enc = simulate(&p.setup, &p.encoded, &mix, &grid, p.code.as_ref())?;
    let refr = simulate(&p.setup, &p.reference, &mix, &grid, p.code.as_ref())?;
    let encoded_path = dir.join(format!("{}_encoded.csv", cfg.experiment));
    let reference_path = dir.join(format!("{}_reference.csv", cfg.experiment));
    let encoded_logical_defect = match &p.setup.system.replica_interaction {
        Some(h_ss) => {
            let u_s = Propagator::spectral(h_ss)?;
            let mut worst = 0.0f64;
            for (t, state) in enc.times.iter().zip(&enc.states) {
                worst = worst.max(trace_distance(&u_s.apply_density(&p.encoded, *t)?, state));
            }
            Some(worst)
        }
        None => None,
    };
    write_file(&encoded_path, |w| enc.write_csv(w, &provenance(cfg, "encoded")))?;
    write_file(&reference_path, |w| refr.write_csv(w, &provenance(cfg, "reference")))?;
    Ok(SimulateReport {
        encoded_path,
        reference_path,
        encoded_max_deviation: enc.max_trace_distance(),
        encoded_max_leakage: enc.max_leakage(),
        reference_max_deviation: refr.max_trace_distance(),
        reference_min_fidelity: refr.min_fidelity(),
        reference_final_fidelity: *refr.fidelity.last().expect("non-empty grid"),
        encoded_logical_defect,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobustnessReport {
    pub path: PathBuf,
    pub rows: Vec<SweepRow>,
    /// Max infidelity of the unencoded reference at each scale.
    pub reference_infidelity: Vec<f64>,
}

impl RobustnessReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().filter(|r| r.phase_scale == 0.0).all(|r| r.max_infidelity <= ENCODED_BUDGET)
    }

    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].max_infidelity >= w[0].max_infidelity)
    }
}

pub fn run_robustness(cfg: &ExperimentConfig, out_dir: Option<&Path>, parallel: bool) -> Result<RobustnessReport> {
    let p = prepare(cfg)?;
    let code = p
        .code
        .as_ref()
        .ok_or_else(|| Error::Config("`replicas`: robustness sweep needs a non-empty code".into()))?;
    let mix = cfg.mixture()?;
    let grid = cfg.grid()?;
    let point = |s: f64| -> Result<(SweepRow, f64)> {
        let row = sweep_point(code, &p.setup, &p.encoded, &mix, &grid, s)?;
        let reference = sweep_point(code, &p.setup, &p.reference, &mix, &grid, s)?;
        Ok((row, reference.max_infidelity))
    };
    let results: Vec<Result<(SweepRow, f64)>> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = cfg.phase_scales.iter().map(|&s| scope.spawn(move || point(s))).collect();
            handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
        })
    } else {
        cfg.phase_scales.iter().map(|&s| point(s)).collect()
    };
    let (rows, reference_infidelity): (Vec<SweepRow>, Vec<f64>) = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    let path = out_dir.unwrap_or(&cfg.output_dir).join(format!("{}_sweep.csv", cfg.experiment));
    write_file(&path, |w| write_sweep_csv(&rows, w, &provenance(cfg, "sweep")))?;
    Ok(RobustnessReport { path, rows, reference_infidelity })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Multiplicities { rank, max_n } => {
            let rows = multiplicity_table(rank, max_n)?;
            write_multiplicity_csv(&rows, std::io::stdout().lock())?;
            Ok(true)
        }
        Command::Basis { n, rank, out } => {
            let r = run_basis(n, rank, &out)?;
            println!("wrote {} ({} kets)", r.path.display(), r.dimension);
            println!("annihilation residual {:.3e}", r.annihilation_residual);
            println!("orthonormality defect {:.3e}", r.orthonormality_defect);
            if let Some(angles) = &r.principal_angles {
                let list: Vec<String> = angles.iter().map(|a| format!("{a:.3e}")).collect();
                println!("principal angles vs reference basis [{}]", list.join(", "));
            }
            println!("{}", verdict(r.passed()));
            Ok(r.passed())
        }
        Command::Simulate { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let r = run_simulate(&cfg, out.as_deref())?;
            println!("wrote {} and {}", r.encoded_path.display(), r.reference_path.display());
            println!("encoded   max deviation {:.3e}  max leakage {:.3e}", r.encoded_max_deviation, r.encoded_max_leakage);
            if let Some(d) = r.encoded_logical_defect {
                println!("encoded   max distance to U_S rho U_S^dag {d:.3e}");
            }
            println!(
                "reference max deviation {:.3e}  min fidelity {:.6}  final fidelity {:.6}",
                r.reference_max_deviation, r.reference_min_fidelity, r.reference_final_fidelity
            );
            println!("{} (budget {ENCODED_BUDGET:e})", verdict(r.passed()));
            Ok(r.passed())
        }
        Command::Robustness { config, out, parallel } => {
            let cfg = ExperimentConfig::load(&config)?;
            let r = run_robustness(&cfg, out.as_deref(), parallel)?;
            println!("wrote {}", r.path.display());
            println!("phase_scale  encoded_infidelity  reference_infidelity  max_leakage");
            for (row, refr) in r.rows.iter().zip(&r.reference_infidelity) {
                println!("{:<11.3e}  {:<18.3e}  {:<20.3e}  {:.3e}", row.phase_scale, row.max_infidelity, refr, row.max_leakage);
            }
            println!("infidelity non-decreasing: {}", r.monotone());
            println!("{} (budget {ENCODED_BUDGET:e} at zero phase)", verdict(r.passed()));
            Ok(r.passed())
        }
    }
}

/// Parses `std::env::args` and runs; maps outcomes to exit codes.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
