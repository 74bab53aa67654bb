//! Lindblad engine for single-node checks and cascaded two-node transfer.

pub mod checks;
pub mod integrate;
pub mod lindblad;
pub mod ops;
pub mod pulse;
pub mod state;
pub mod transfer;

pub use checks::{
    adiabatic_elimination_check, echo_effective_coupling, full_vs_jc_single_node, hahn_echo_check, AdiabaticReport,
    FullVsJcParams, FullVsJcReport,
};
pub use integrate::{StepStats, Tolerance};
pub use lindblad::{build_liouvillian, integrate, linspace, DephasingOp, HamiltonianSpec, Liouvillian, NoiseSpec};
pub use pulse::{optimal_pulse, PulseSpec, Sampled};
pub use state::{DensityMatrix, HilbertSpec, InvariantReport};
pub use transfer::{
    markovian_transfer, mc_transfer, transfer_run, transfer_trajectory, McSummary, Protocol, QubitState,
    TransferConfig, TransferPulses, TransferResult,
};
