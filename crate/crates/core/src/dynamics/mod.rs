//! Register-plus-truncated-bath dynamics and the fixed-point checks on the
//! reduced register state.

mod bath;
mod hamiltonian;
mod interactions;
mod propagator;
mod trajectory;

pub use bath::{build_bath_operators, BathMode, BathSpec, FockMixture};
pub use hamiltonian::{
    assemble_hamiltonian, interaction_hamiltonian, CouplingSpec, ModelFlags, OperatorCoupling,
    SimulationSetup, SystemSpec,
};
pub use interactions::{exchange_interaction, heisenberg, swap_interaction, symmetry_defect};
pub use propagator::{evolve, krylov_expm, PreparedKet, Propagator, State, KRYLOV_TOLERANCE, SPECTRAL_LIMIT};
pub use trajectory::{
    decoherence_time_estimate, dephasing_weight_space_check, eigenstate_residual,
    liouvillian_fixed_point_check, logical_evolution_check, simulate, sweep_point,
    symmetry_breaking_sweep, weight_labels, weight_space, write_sweep_csv, LogicalReport, SweepRow,
    TimeGrid, Trajectory,
};
