//! Rydberg-array model: interaction tables, geometry, the pair Hamiltonian,
//! microwave drives and feasibility estimates.

mod couplings;
mod drive;
mod geometry;
mod hamiltonian;
mod table;

use serde::Serialize;

pub use couplings::{
    dipolar_angle_factor, pair_dipole_coupling, pair_forster, pair_vdw_shift, ExchangeSign, ForsterCoupling, ModelOptions,
    PhaseConvention,
};
pub use drive::{
    build_control_hamiltonian, build_microwave_hamiltonian, channel_operators, detuning_term, global_channels,
    level_projector_diagonal, per_site_channels, rabi_term, ControlChannel, ControlKind, ControlSchedule, DetuningPlan,
    DetuningRamp, Level, PiecewiseLinear, PulseGrid, RabiDrive,
};
pub use geometry::Geometry;
pub use hamiltonian::{
    build_rydberg_hamiltonian, check_fine_tuning, compare_to_motzkin, two_site_block, BlockEntry, FineTuningCondition,
    FineTuningReport, MotzkinComparison,
};
pub use table::{
    DipoleChannel, DipoleCoefficients, ForsterCoefficients, InteractionTable, TableUnits, UnitScales, VdwChannel,
    VdwCoefficients,
};

use crate::error::{domain, Result};

/// Decay estimate for `n` atoms that each live `lifetime` µs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoherenceBudget {
    pub n_sites: usize,
    pub lifetime_us: f64,
    pub protocol_time_us: f64,
    pub effective_lifetime_us: f64,
    pub decay_error: f64,
    /// Set when the estimate exceeds 10 %.
    pub flagged: bool,
}

/// `τ_eff = τ/N` and `1 − exp(−T/τ_eff)`.
pub fn coherence_budget(n: usize, lifetime_us: f64, protocol_time_us: f64) -> Result<CoherenceBudget> {
    if n == 0 || !(lifetime_us > 0.0) || !(protocol_time_us >= 0.0) {
        return Err(domain("coherence budget needs n > 0, lifetime > 0 and time >= 0"));
    }
    let tau = lifetime_us / n as f64;
    let err = -(-protocol_time_us / tau).exp_m1();
    Ok(CoherenceBudget {
        n_sites: n,
        lifetime_us,
        protocol_time_us,
        effective_lifetime_us: tau,
        decay_error: err,
        flagged: err > 0.1,
    })
}
