//! Normal-form coefficients, from the printed closed forms and from projections.

use std::fmt;

use serde::Serialize;

use crate::error::{LleError, Result};
use crate::linalg::{c, inner, CMat4, C64};
use crate::linearization::ClassKind;
use crate::model::{CurveCase, Equilibrium, Params, SQRT3};

use super::basis::{build_basis, l_complex, BifurcationBasis, FoldBasis, IOmega2Basis};
use super::phi::solve_phi_iomega2;
use super::taylor::TaylorForms;

/// Largest imaginary residue accepted on a projection, relative to max(1, |re|).
pub const REALNESS_TOL: f64 = 1e-10;

/// Slack on the printed sign inequalities.
const SIGN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class")]
pub enum Coefficients {
    IOmega2 { a2: f64, b2: f64 },
    O2IOmega { a1: f64, b1: f64, c1: f64 },
    O2 { a: f64, b: f64 },
}

impl Coefficients {
    pub fn kind(&self) -> ClassKind {
        match self {
            Coefficients::IOmega2 { .. } => ClassKind::IOmega2,
            Coefficients::O2IOmega { .. } => ClassKind::O2IOmega,
            Coefficients::O2 { .. } => ClassKind::O2,
        }
    }

    /// (name, value) pairs in printed order.
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Coefficients::IOmega2 { a2, b2 } => vec![("a2", a2), ("b2", b2)],
            Coefficients::O2IOmega { a1, b1, c1 } => vec![("a1", a1), ("b1", b1), ("c1", c1)],
            Coefficients::O2 { a, b } => vec![("a", a), ("b", b)],
        }
    }

    /// The coefficient in front of the mu term.
    pub fn mu_coeff(&self) -> f64 {
        match *self {
            Coefficients::IOmega2 { a2, .. } => a2,
            Coefficients::O2IOmega { a1, .. } => a1,
            Coefficients::O2 { a, .. } => a,
        }
    }

    /// The coefficient of the leading nonlinear term (b2, b1 or b).
    pub fn nonlinear_coeff(&self) -> f64 {
        match *self {
            Coefficients::IOmega2 { b2, .. } => b2,
            Coefficients::O2IOmega { b1, .. } => b1,
            Coefficients::O2 { b, .. } => b,
        }
    }

    /// Copy with the leading nonlinear coefficient replaced.
    pub fn with_nonlinear_coeff(&self, v: f64) -> Coefficients {
        match *self {
            Coefficients::IOmega2 { a2, .. } => Coefficients::IOmega2 { a2, b2: v },
            Coefficients::O2IOmega { a1, c1, .. } => Coefficients::O2IOmega { a1, b1: v, c1 },
            Coefficients::O2 { a, .. } => Coefficients::O2 { a, b: v },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ClosedForm,
    NumericProjection,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed",
            Method::NumericProjection => "numeric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalFormCoefficients {
    pub coeffs: Coefficients,
    pub method: Method,
}

/// Which curve each (class, beta) pair lives on, and for which alpha*.
pub fn validity(kind: ClassKind, beta: i32, case: CurveCase, alpha: f64) -> Result<()> {
    let ok = match (kind, beta, case) {
        (ClassKind::IOmega2, 1, CurveCase::Line) => alpha > 2.0,
        (ClassKind::IOmega2, -1, CurveCase::Line) => alpha < 2.0,
        (ClassKind::O2IOmega, 1, CurveCase::FoldPlus) => alpha > 2.0,
        (ClassKind::O2IOmega, -1, CurveCase::FoldPlus) => alpha > SQRT3 && alpha < 2.0,
        (ClassKind::O2IOmega, -1, CurveCase::FoldMinus) => alpha > SQRT3,
        (ClassKind::O2, 1, CurveCase::FoldPlus) => alpha > SQRT3 && alpha < 2.0,
        (ClassKind::O2, 1, CurveCase::FoldMinus) => alpha > SQRT3,
        (ClassKind::O2, -1, CurveCase::FoldPlus) => alpha > 2.0,
        _ => false,
    };
    if ok && alpha.is_finite() {
        Ok(())
    } else {
        Err(LleError::Domain(format!(
            "no {kind} bifurcation for beta={beta:+}, case {case}, alpha*={alpha}"
        )))
    }
}

/// Default curve for a class and dispersion sign, used when a case is not given.
pub fn default_case(kind: ClassKind, beta: i32, alpha: f64) -> CurveCase {
    match kind {
        ClassKind::IOmega2 => CurveCase::Line,
        ClassKind::O2IOmega if beta == -1 && alpha > 2.0 => CurveCase::FoldMinus,
        ClassKind::O2 if beta == 1 && alpha >= 2.0 => CurveCase::FoldMinus,
        _ => CurveCase::FoldPlus,
    }
}

/// (A, B, C) of the fold formulas for beta = +1 on the curve with sign s = +1 (plus) or -1 (minus).
fn fold_closed_forms(alpha: f64, f: f64, s: f64) -> (f64, f64, f64) {
    let g = (alpha * alpha - 3.0).sqrt();
    let den = alpha.powi(3) - 9.0 * alpha + s * (alpha * alpha + 6.0) * g;
    let a = -9.0 * f * (alpha + s * g) / (2.0 * den);
    let b = 3.0 * f * (2.0 * alpha.powi(5) - 18.0 * alpha + s * (2.0 * alpha.powi(4) + 3.0 * alpha * alpha + 9.0) * g)
        / (2.0 * (alpha * alpha + 3.0 + s * alpha * g) * den);
    let cc = 9.0 * f * (alpha + s * g) / den;
    (a, b, cc)
}

/// Coefficients from the printed formulas, F* recomputed from the curve.
pub fn coeffs_closed(kind: ClassKind, beta: i32, case: CurveCase, alpha: f64) -> Result<NormalFormCoefficients> {
    validity(kind, beta, case, alpha)?;
    let (f2, _) = case.point(alpha)?;
    let f = f2.sqrt();
    let s = beta as f64;
    let coeffs = match kind {
        ClassKind::IOmega2 => {
            let e = s * (alpha - 2.0);
            Coefficients::IOmega2 {
                a2: (alpha - 1.0) / e.powi(3),
                b2: 2.0 * f2 * (41.0 - 30.0 * alpha) / (9.0 * e.powi(5)),
            }
        }
        ClassKind::O2IOmega | ClassKind::O2 => {
            let side = if case == CurveCase::FoldPlus { 1.0 } else { -1.0 };
            let (a, b, cc) = fold_closed_forms(alpha, f, side);
            if kind == ClassKind::O2IOmega {
                Coefficients::O2IOmega { a1: s * a, b1: s * b, c1: s * cc }
            } else {
                Coefficients::O2 { a: s * a, b: s * b }
            }
        }
    };
    check_signs(&coeffs, beta, case, alpha)?;
    Ok(NormalFormCoefficients { coeffs, method: Method::ClosedForm })
}

/// Printed sign of each coefficient: +1, -1, or 0 when the sign depends on alpha*.
pub fn printed_signs(kind: ClassKind, beta: i32, case: CurveCase) -> Vec<i8> {
    match (kind, beta, case) {
        (ClassKind::IOmega2, 1, _) => vec![1, -1],
        (ClassKind::IOmega2, _, _) => vec![0, 0],
        (ClassKind::O2IOmega, -1, CurveCase::FoldMinus) => vec![-1, -1, 1],
        (ClassKind::O2IOmega, _, _) => vec![-1, 1, 1],
        (ClassKind::O2, 1, CurveCase::FoldMinus) => vec![1, 1],
        (ClassKind::O2, _, _) => vec![1, -1],
    }
}

fn check_signs(coeffs: &Coefficients, beta: i32, case: CurveCase, alpha: f64) -> Result<()> {
    let named = coeffs.named();
    let signs = printed_signs(coeffs.kind(), beta, case);
    for ((name, v), sg) in named.iter().zip(signs.iter()) {
        let product = match (coeffs.kind(), *sg) {
            // beta = -1: sign(a2) = sign(alpha* - 1), sign(b2) = sign(41 - 30 alpha*)
            (ClassKind::IOmega2, 0) if *name == "a2" => v * (alpha - 1.0),
            (ClassKind::IOmega2, 0) => v * (41.0 - 30.0 * alpha),
            (_, sg) => v * sg as f64,
        };
        if product < -SIGN_SLACK {
            return Err(LleError::SignViolation(format!(
                "{name}={v} contradicts the printed sign at alpha*={alpha}"
            )));
        }
    }
    Ok(())
}

fn real_part(name: &str, z: C64) -> Result<f64> {
    if z.im.abs() > REALNESS_TOL * z.re.abs().max(1.0) {
        return Err(LleError::NonRealProjection { name: name.into(), imag: z.im });
    }
    Ok(z.re)
}

/// Projections built only from the Taylor forms, the explicit basis and the Phi solves.
pub fn coeffs_numeric(kind: ClassKind, params: &Params, eq: &Equilibrium) -> Result<NormalFormCoefficients> {
    let basis = build_basis(kind, params, eq)?;
    let forms = TaylorForms::new(params, eq);
    let l = l_complex(params, eq);
    let coeffs = match &basis {
        BifurcationBasis::IOmega2(b) => iomega2_projection(&l, b, &forms)?,
        BifurcationBasis::O2IOmega(b) => fold_projection(b, &forms, true)?,
        BifurcationBasis::O2(b) => fold_projection(b, &forms, false)?,
    };
    Ok(NormalFormCoefficients { coeffs, method: Method::NumericProjection })
}

/// (a2, b2) from a given basis; exposed so normalization changes can be tested.
pub fn iomega2_projection(l: &CMat4, basis: &IOmega2Basis, forms: &TaylorForms) -> Result<Coefficients> {
    let phi = solve_phi_iomega2(l, basis, forms)?;
    let z0 = basis.zeta0;
    let z0b = z0.conjugate();
    let two = c(2.0, 0.0);
    let a2 = forms.r11(&z0) + forms.r20(&z0, &phi.phi00001) * two;
    let b2 = forms.r20(&z0, &phi.phi10100) * two
        + forms.r20(&z0b, &phi.phi20000) * two
        + forms.r30(&z0, &z0, &z0b) * c(3.0, 0.0);
    Ok(Coefficients::IOmega2 {
        a2: real_part("a2", inner(&a2, &basis.zeta1_star))?,
        b2: real_part("b2", inner(&b2, &basis.zeta1_star))?,
    })
}

fn fold_projection(basis: &FoldBasis, forms: &TaylorForms, with_c: bool) -> Result<Coefficients> {
    let z0 = basis.zeta0;
    let a = real_part("a", inner(&forms.r01(), &basis.zeta1_star))?;
    let b = real_part("b", inner(&forms.r20(&z0, &z0), &basis.zeta1_star))?;
    if with_c {
        let z = basis.zeta.expect("oscillatory eigenvector at a 0^2(i omega) point");
        let v = forms.r20(&z, &z.conjugate()) * c(2.0, 0.0);
        let c1 = real_part("c1", inner(&v, &basis.zeta1_star))?;
        Ok(Coefficients::O2IOmega { a1: a, b1: b, c1 })
    } else {
        Ok(Coefficients::O2 { a, b })
    }
}

/// Numeric coefficients at the exact bifurcation point of a curve.
pub fn coeffs_numeric_on_curve(kind: ClassKind, beta: i32, case: CurveCase, alpha: f64) -> Result<NormalFormCoefficients> {
    validity(kind, beta, case, alpha)?;
    let (params, eq) = case.bifurcation_point(beta, alpha)?;
    coeffs_numeric(kind, &params, &eq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalform::basis::iomega2_basis;
    use crate::normalform::phi::solve_phi_iomega2;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / (1.0 + b.abs())
    }

    #[test]
    fn closed_form_values_at_alpha_three() {
        let c = coeffs_closed(ClassKind::IOmega2, 1, CurveCase::Line, 3.0).unwrap();
        assert_eq!(c.coeffs, Coefficients::IOmega2 { a2: 2.0, b2: -490.0 / 9.0 });
        let n = coeffs_numeric_on_curve(ClassKind::IOmega2, 1, CurveCase::Line, 3.0).unwrap();
        let Coefficients::IOmega2 { a2, b2 } = n.coeffs else { panic!() };
        assert!(rel(a2, 2.0) < 1e-8 && rel(b2, -490.0 / 9.0) < 1e-8);
    }

    #[test]
    fn anomalous_zero_crossings() {
        let c = coeffs_closed(ClassKind::IOmega2, -1, CurveCase::Line, 41.0 / 30.0).unwrap();
        let Coefficients::IOmega2 { b2, .. } = c.coeffs else { panic!() };
        assert!(b2.abs() < 1e-14);
        let c = coeffs_closed(ClassKind::IOmega2, -1, CurveCase::Line, 1.0).unwrap();
        let Coefficients::IOmega2 { a2, .. } = c.coeffs else { panic!() };
        assert_eq!(a2, 0.0);
    }

    #[test]
    fn fold_values_at_alpha_three() {
        let c = coeffs_closed(ClassKind::O2IOmega, 1, CurveCase::FoldPlus, 3.0).unwrap();
        let Coefficients::O2IOmega { a1, b1, c1 } = c.coeffs else { panic!() };
        assert!((a1 + 1.5055780556584444).abs() < 1e-12);
        assert!((b1 - 4.3646398972727125).abs() < 1e-12);
        assert!((c1 - 3.0111561113168888).abs() < 1e-12);
        let n = coeffs_numeric_on_curve(ClassKind::O2IOmega, 1, CurveCase::FoldPlus, 3.0).unwrap();
        let Coefficients::O2IOmega { a1: na, b1: nb, c1: nc } = n.coeffs else { panic!() };
        assert!(rel(na, a1) < 1e-8 && rel(nb, b1) < 1e-8 && rel(nc, c1) < 1e-8);
        assert!((nc + 2.0 * na).abs() <= 1e-12);
    }

    #[test]
    fn o2_projections_match_printed_identities() {
        for (beta, case, alpha) in [(1, CurveCase::FoldPlus, 1.8), (1, CurveCase::FoldMinus, 3.0), (-1, CurveCase::FoldPlus, 3.0)] {
            let (p, eq) = case.bifurcation_point(beta, alpha).unwrap();
            let n = coeffs_numeric(ClassKind::O2, &p, &eq).unwrap();
            let Coefficients::O2 { a, b } = n.coeffs else { panic!() };
            let d = (3.0 * eq.psi_r.powi(2) + eq.psi_i.powi(2) - alpha) / (1.0 - 2.0 * eq.psi_r * eq.psi_i);
            let s = p.sign();
            assert!(rel(a, -s * eq.psi_i / d) < 1e-12);
            assert!(rel(b, s * (2.0 * d * eq.psi_r + (3.0 * d * d + 1.0) * eq.psi_i) / d) < 1e-12);
            let cl = coeffs_closed(ClassKind::O2, beta, case, alpha).unwrap();
            let Coefficients::O2 { a: ca, b: cb } = cl.coeffs else { panic!() };
            assert!(rel(a, ca) < 1e-8 && rel(b, cb) < 1e-8);
        }
    }

    #[test]
    fn domain_gates() {
        assert!(matches!(coeffs_closed(ClassKind::O2, 1, CurveCase::FoldMinus, 1.5), Err(LleError::Domain(_))));
        assert!(matches!(coeffs_closed(ClassKind::IOmega2, 1, CurveCase::Line, 1.5), Err(LleError::Domain(_))));
        assert!(coeffs_closed(ClassKind::O2IOmega, -1, CurveCase::FoldPlus, 2.5).is_err());
    }

    #[test]
    fn doubling_the_basis_scales_b2_by_four() {
        let (p, eq) = CurveCase::Line.bifurcation_point(1, 3.0).unwrap();
        let forms = TaylorForms::new(&p, &eq);
        let l = l_complex(&p, &eq);
        let b = iomega2_basis(&p, &eq).unwrap();
        let Coefficients::IOmega2 { b2, .. } = iomega2_projection(&l, &b, &forms).unwrap() else { panic!() };
        let mut scaled = b.clone();
        scaled.zeta0 *= c(2.0, 0.0);
        scaled.zeta1 *= c(2.0, 0.0);
        scaled.zeta1_star /= c(2.0, 0.0);
        let Coefficients::IOmega2 { b2: b2s, .. } = iomega2_projection(&l, &scaled, &forms).unwrap() else { panic!() };
        assert!((b2s / b2 - 4.0).abs() < 1e-10);
        let _ = solve_phi_iomega2(&l, &scaled, &forms).unwrap();
    }

    #[test]
    fn sign_violation_is_reported() {
        let bad = Coefficients::IOmega2 { a2: -1.0, b2: -1.0 };
        assert!(matches!(check_signs(&bad, 1, CurveCase::Line, 3.0), Err(LleError::SignViolation(_))));
    }

    #[test]
    fn nonreal_projection_is_rejected() {
        assert!(real_part("x", C64::new(1.0, 1e-6)).is_err());
        assert_eq!(real_part("x", C64::new(1.0, 1e-12)).unwrap(), 1.0);
    }
}
