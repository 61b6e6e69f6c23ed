//! Explicit bases of the central subspace and their adjoint vectors.

use serde::Serialize;

use crate::error::{LleError, Result};
use crate::linalg::{c, complexify, dual_basis, max_abs, rvec, CMat4, CVec4, C64};
use crate::linearization::{build_l, classify, BifurcationClass, ClassKind, DEFAULT_CLASS_TOL};
use crate::model::{Equilibrium, Params};

/// Tolerance for closed-form against numerically recomputed adjoints.
const BASIS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IOmega2Basis {
    #[serde(skip)]
    pub zeta0: CVec4,
    #[serde(skip)]
    pub zeta1: CVec4,
    #[serde(skip)]
    pub zeta1_star: CVec4,
    pub c: f64,
    pub omega: f64,
    /// 1 + 2 psi_r psi_i
    pub p: f64,
}

/// Basis at a fold point: the Jordan pair and, for 0^2(i omega), the oscillatory eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldBasis {
    #[serde(skip)]
    pub zeta0: CVec4,
    #[serde(skip)]
    pub zeta1: CVec4,
    #[serde(skip)]
    pub zeta0_star: CVec4,
    #[serde(skip)]
    pub zeta1_star: CVec4,
    pub d: f64,
    /// Present for 0^2(i omega): L zeta = i omega zeta and its dual.
    pub omega: Option<f64>,
    #[serde(skip)]
    pub zeta: Option<CVec4>,
    #[serde(skip)]
    pub zeta_star: Option<CVec4>,
    /// Present for 0^2: the hyperbolic pair +-lambda.
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BifurcationBasis {
    IOmega2(IOmega2Basis),
    O2IOmega(FoldBasis),
    O2(FoldBasis),
}

impl BifurcationBasis {
    pub fn kind(&self) -> ClassKind {
        match self {
            BifurcationBasis::IOmega2(_) => ClassKind::IOmega2,
            BifurcationBasis::O2IOmega(_) => ClassKind::O2IOmega,
            BifurcationBasis::O2(_) => ClassKind::O2,
        }
    }
}

/// Build the explicit basis for the requested class, checking it against the spectrum.
pub fn build_basis(kind: ClassKind, params: &Params, eq: &Equilibrium) -> Result<BifurcationBasis> {
    let found = classify(params, eq, DEFAULT_CLASS_TOL)?;
    let matches = matches!(
        (kind, found),
        (ClassKind::IOmega2, BifurcationClass::IOmega2 { .. })
            | (ClassKind::O2IOmega, BifurcationClass::O2IOmega { .. })
            | (ClassKind::O2, BifurcationClass::O2)
    );
    if !matches {
        return Err(LleError::WrongClass { requested: kind.to_string(), found: found.name().into() });
    }
    match kind {
        ClassKind::IOmega2 => iomega2_basis(params, eq).map(BifurcationBasis::IOmega2),
        ClassKind::O2IOmega => fold_basis(params, eq).map(BifurcationBasis::O2IOmega),
        ClassKind::O2 => fold_basis(params, eq).map(BifurcationBasis::O2),
    }
}

pub fn iomega2_basis(params: &Params, eq: &Equilibrium) -> Result<IOmega2Basis> {
    let alpha = params.alpha;
    let s = params.sign();
    let omega = (s * (alpha - 2.0)).sqrt();
    let cc = alpha / (2.0 - alpha);
    let p = 1.0 + 2.0 * eq.psi_r * eq.psi_i;
    let iw = c(0.0, omega);
    let zeta0 = CVec4::new(c(cc, 0.0), iw * cc, c(1.0, 0.0), iw);
    let zeta1 = CVec4::new(
        c(0.0, s * 2.0 * omega / p),
        c(cc - s * 2.0 * omega * omega / p, 0.0),
        c(0.0, 0.0),
        c(1.0, 0.0),
    );
    let scale = (2.0 - alpha) / (4.0 * params.f2());
    let zeta1_star = CVec4::new(-iw, c(1.0, 0.0), iw * cc, c(-cc, 0.0)) * c(scale, 0.0);

    let duals = dual_basis(&[zeta0, zeta1, zeta0.conjugate(), zeta1.conjugate()])?;
    check_match("zeta1*", &zeta1_star, &duals[1])?;
    Ok(IOmega2Basis { zeta0, zeta1, zeta1_star, c: cc, omega, p })
}

pub fn fold_basis(params: &Params, eq: &Equilibrium) -> Result<FoldBasis> {
    let (r, i) = (eq.psi_r, eq.psi_i);
    let d = (3.0 * r * r + i * i - params.alpha) / (1.0 - 2.0 * r * i);
    let zeta0 = rvec([1.0, 0.0, d, 0.0]);
    let zeta1 = rvec([0.0, 1.0, 0.0, d]);
    let zeta0_star = rvec([0.0, 0.0, 1.0 / d, 0.0]);
    let zeta1_star = rvec([0.0, 0.0, 0.0, 1.0 / d]);
    let t = params.sign() * (4.0 * eq.rho - 2.0 * params.alpha);

    if t < 0.0 {
        let omega = (-t).sqrt();
        let zeta = CVec4::new(c(1.0, 0.0), c(0.0, omega), c(0.0, 0.0), c(0.0, 0.0));
        let zeta_star = CVec4::new(
            c(0.5, 0.0),
            c(0.0, 0.5 / omega),
            c(-0.5 / d, 0.0),
            c(0.0, -0.5 / (omega * d)),
        );
        let duals = dual_basis(&[zeta0, zeta1, zeta, zeta.conjugate()])?;
        check_match("zeta0*", &zeta0_star, &duals[0])?;
        check_match("zeta1*", &zeta1_star, &duals[1])?;
        check_match("zeta*", &zeta_star, &duals[2])?;
        Ok(FoldBasis {
            zeta0,
            zeta1,
            zeta0_star,
            zeta1_star,
            d,
            omega: Some(omega),
            zeta: Some(zeta),
            zeta_star: Some(zeta_star),
            lambda: None,
        })
    } else {
        let lambda = t.sqrt();
        let duals =
            dual_basis(&[zeta0, zeta1, rvec([1.0, lambda, 0.0, 0.0]), rvec([1.0, -lambda, 0.0, 0.0])])?;
        check_match("zeta0*", &zeta0_star, &duals[0])?;
        check_match("zeta1*", &zeta1_star, &duals[1])?;
        Ok(FoldBasis {
            zeta0,
            zeta1,
            zeta0_star,
            zeta1_star,
            d,
            omega: None,
            zeta: None,
            zeta_star: None,
            lambda: Some(lambda),
        })
    }
}

fn check_match(name: &str, closed: &CVec4, numeric: &CVec4) -> Result<()> {
    let err = max_abs(&(closed - numeric));
    if err > BASIS_TOL * (1.0 + max_abs(closed)) {
        return Err(LleError::BasisMismatch(format!(
            "{name}: closed form and recomputed adjoint differ by {err:.3e}"
        )));
    }
    Ok(())
}

/// Complexified spatial matrix.
pub fn l_complex(params: &Params, eq: &Equilibrium) -> CMat4 {
    complexify(&build_l(params, eq).entries)
}

/// Reversor applied to a complex vector.
pub fn reverse(u: &CVec4) -> CVec4 {
    CVec4::new(u[0], -u[1], u[2], -u[3])
}

pub fn i_times(u: &CVec4, w: f64) -> CVec4 {
    u * C64::new(0.0, w)
}
