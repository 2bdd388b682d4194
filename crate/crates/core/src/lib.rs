//! Dispersive–viscous shock structure in one dimension: jump relations and
//! admissibility, the planar ODE reductions for traveling and standing
//! waves, their equilibrium and level-set structure, and assembled wave
//! profiles with certified diagnostics.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`] — parameters, states, and the polytropic closures;
//! * [`rh`] — jump relations, momentum branches, Lax admissibility;
//! * [`linear`] — the traveling-wave reduction with linear damping;
//! * [`standing`] — the standing-wave reduction of the dispersive system;
//! * [`roots`], [`ode`] — the numerical kernels (bracketed root solve,
//!   embedded Runge–Kutta with dense output and event location);
//! * [`structure`] — rest points, layouts, spectra, existence verdicts;
//! * [`orbits`] — loops, separatrices, fronts, pulses, and their audits.

pub mod error;
pub mod linear;
pub mod model;
pub mod ode;
pub mod orbits;
pub mod rh;
pub mod roots;
pub mod standing;
pub mod structure;

pub use error::{Error, Result};
pub use linear::{EnergyRef, LinearWaveSystem};
pub use model::{enthalpy, pressure, sound_speed, EulerState, ModelParams, ShockData};
pub use ode::{
    integrate, Event, EventAction, EventDirection, EventHit, IntegrateOptions, Termination,
    Trajectory,
};
pub use orbits::{
    existence_reason, homoclinic_loop_reduced, homoclinic_loop_standing, lasalle_audit,
    level_branch_standing, loop_traversal_reduced, loop_traversal_standing,
    separatrix_branch_standing, standing_profile, standing_profile_linear, traveling_profile,
    LasalleAudit, ProfileDiagnostics, StandingProfile, StandingProfileLinear,
    StandingProfileOptions, StandingSample, TravelingProfile, TravelingProfileOptions,
    TravelingSample,
};
pub use rh::{
    admissible_branch, lax_classify, lax_inequality_check, momentum_branches, rh_residual,
    AdmissibleBranch, FlowRegime, LaxType, MomentumBranches, ShockClassification,
};
pub use roots::bracketed_root;
pub use standing::StandingSystem;
pub use structure::{
    equilibrium_full, equilibrium_reduced, equilibrium_standing, oscillation_criterion,
    standing_existence_verdict, standing_existence_verdict_linear, structural_points_linear,
    structural_points_standing, zero_speed_certificate_linear, zero_speed_certificate_standing,
    EquilibriumKind, EquilibriumReport, OscillationReport, StandingExistence, StructuralLayout,
    StructuralPoints, ZeroSpeedCertificate,
};
