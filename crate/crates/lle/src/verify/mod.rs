//! Numerical checks of the constructed profiles and of the normal-form transcriptions.

pub mod integrate;
pub mod oracle;
pub mod refine;
pub mod residual;
pub mod suite;
pub mod temporal;

pub use integrate::{integrate, SpatialSystem, Trajectory};
pub use oracle::{truncated_oracle, OracleCase, OracleReport};
pub use refine::{refine_periodic, refine_periodic_with, Anchor, RefinedOrbit};
pub use residual::{residual_scaling, stationary_residual, Residual, ResidualReport};
pub use suite::{run_suite, FamilyCase, SuiteConfig, VerifyReport};
pub use temporal::{temporal_spectrum_constant, TemporalSpectrum, Verdict};
