//! Normal forms at the codimension-one points: bases, Taylor pieces, coefficients.

pub mod basis;
pub mod coeffs;
pub mod phi;
pub mod taylor;

pub use basis::{build_basis, BifurcationBasis, FoldBasis, IOmega2Basis};
pub use coeffs::{
    coeffs_closed, coeffs_numeric, coeffs_numeric_on_curve, default_case, printed_signs, validity,
    Coefficients, Method, NormalFormCoefficients,
};
pub use phi::{fold_corrections, FoldCubic, phi00001_closed, solve_phi_iomega2, FoldCorrections, IOmega2Phi};
pub use taylor::TaylorForms;

use crate::linearization::ClassKind;
use crate::model::SQRT3;

/// Half-width of the alpha* bands left out of sweeps near degenerate points.
pub const EXCLUSION_BAND: f64 = 0.02;

/// True when alpha* falls in a band where a leading coefficient degenerates.
pub fn in_excluded_band(kind: ClassKind, alpha: f64) -> bool {
    match kind {
        ClassKind::IOmega2 => (alpha - 2.0).abs() < EXCLUSION_BAND,
        ClassKind::O2IOmega | ClassKind::O2 => {
            (alpha - SQRT3).abs() < EXCLUSION_BAND || (alpha - 2.0).abs() < EXCLUSION_BAND
        }
    }
}
