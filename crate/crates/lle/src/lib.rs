//! Stationary waves of the Lugiato-Lefever equation near their bifurcation points.
//!
//! The pipeline runs from the constant solutions ([`model`]) through the spatial
//! spectrum ([`linearization`]) and the normal forms ([`normalform`]) to sampled
//! approximate solutions ([`profiles`]) and their numerical checks ([`verify`]).

pub mod cli;
pub mod error;
pub mod fmt;
mod linalg;
pub mod linearization;
pub mod model;
pub mod normalform;
pub mod profiles;
pub mod verify;

pub use error::{LleError, Result};
pub use linalg::{CVec4, C64};
pub use linearization::{
    bifurcation_curves, build_l, check_reversibility, classify, spatial_spectrum, BifurcationClass,
    ClassKind, SpatialMatrix, SpectrumReport,
};
pub use model::{
    classify_region, critical_points, solve_equilibria, CriticalPoints, CurveCase, Equilibrium,
    Params, RegionTag,
};
pub use normalform::{coeffs_closed, coeffs_numeric, Coefficients, Method, NormalFormCoefficients};
pub use profiles::{Family, Order, ProfileConfig, ProfileSpec, SolutionProfile};
