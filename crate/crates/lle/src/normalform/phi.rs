//! Linear solves for the correction vectors of the expansions.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{border, c, inner, max_abs, solve, CMat4, CVec4};
use crate::model::{Equilibrium, Params};

use super::basis::{FoldBasis, IOmega2Basis};
use super::taylor::TaylorForms;

/// Correction vectors of the (i omega)^2 expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IOmega2Phi {
    pub phi00001: CVec4,
    pub phi20000: CVec4,
    pub phi10100: CVec4,
}

pub fn solve_phi_iomega2(l: &CMat4, basis: &IOmega2Basis, forms: &TaylorForms) -> Result<IOmega2Phi> {
    let z0 = basis.zeta0;
    let phi00001 = solve(l, &(-forms.r01()))?;
    let shifted = l - CMat4::identity() * c(0.0, 2.0 * basis.omega);
    let phi20000 = solve(&shifted, &(-forms.r20(&z0, &z0)))?;
    let phi10100 = solve(l, &(-forms.r20(&z0, &z0.conjugate()) * c(2.0, 0.0)))?;
    Ok(IOmega2Phi { phi00001, phi20000, phi10100 })
}

/// Printed closed form of Phi00001.
pub fn phi00001_closed(params: &Params, eq: &Equilibrium) -> CVec4 {
    let a = params.alpha;
    let (r, i) = (eq.psi_r, eq.psi_i);
    let s = 1.0 / (a - 2.0).powi(2);
    CVec4::new(
        c(((1.0 - a) * r + i) * s, 0.0),
        c(0.0, 0.0),
        c((-r + (1.0 - a) * i) * s, 0.0),
        c(0.0, 0.0),
    )
}

/// Second-order corrections at a fold point, in the amplitudes A, B, C of the central part.
///
/// U = A z0 + B z1 + 2 Re(C z) + mu Pmu + A^2 Paa + A B Pab + B^2 Pbb + |C|^2 Pcc_bar
///     + 2 Re(C^2 Pcc + A C Pac + B C Pbc)
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoldCorrections {
    #[serde(skip)]
    pub phi_mu: CVec4,
    #[serde(skip)]
    pub phi_aa: CVec4,
    #[serde(skip)]
    pub phi_ab: CVec4,
    #[serde(skip)]
    pub phi_bb: CVec4,
    #[serde(skip)]
    pub osc: Option<OscCorrections>,
    /// Frequency shift of C per unit A; zero without an oscillatory pair.
    pub q_a: f64,
    /// Cubic terms of the B equation: B' = a mu + b A^2 + c |C|^2 + mu_a mu A + a3 A^3 + a_cc A |C|^2.
    pub cubic: FoldCubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoldCubic {
    pub mu_a: f64,
    pub a3: f64,
    pub a_cc: f64,
}

impl FoldCubic {
    /// Shift of a root A of b A^2 + (rest) = 0 under the cubic terms, to leading order.
    pub fn shift(&self, b: f64, a: f64, mu: f64, k: f64) -> f64 {
        -(self.mu_a * mu * a + self.a3 * a * a * a + self.a_cc * a * k) / (2.0 * b * a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscCorrections {
    pub phi_cc_bar: CVec4,
    pub phi_cc: CVec4,
    pub phi_ac: CVec4,
    pub phi_bc: CVec4,
}

/// Solves with the Jordan block bordered by z1 <., z0*> so the kernel is removed.
pub fn fold_corrections(
    l: &CMat4,
    basis: &FoldBasis,
    forms: &TaylorForms,
    a1: f64,
    b1: f64,
    c1: f64,
) -> Result<FoldCorrections> {
    let (z0, z1) = (basis.zeta0, basis.zeta1);
    let mj = border(l, &z1, &basis.zeta0_star);
    let k = |x: f64| z1 * c(x, 0.0);
    let phi_mu = solve(&mj, &(-forms.r01() + k(a1)))?;
    let phi_aa = solve(&mj, &(-forms.r20(&z0, &z0) + k(b1)))?;
    let phi_ab = solve(&mj, &(phi_aa * c(2.0, 0.0)))?;
    let phi_bb = solve(&mj, &phi_ab)?;
    let two = c(2.0, 0.0);
    let proj = |v: CVec4| inner(&v, &basis.zeta1_star).re;
    let mu_a = proj(forms.r11(&z0) + forms.r20(&z0, &phi_mu) * two - phi_ab * c(a1, 0.0));
    let a3 = proj(forms.r30(&z0, &z0, &z0) + forms.r20(&z0, &phi_aa) * two - phi_ab * c(b1, 0.0));
    let (osc, q_a) = match (basis.zeta, basis.zeta_star, basis.omega) {
        (Some(z), Some(zs), Some(w)) => {
            let zb = z.conjugate();
            let phi_cc_bar = solve(&mj, &(-forms.r20(&z, &zb) * c(2.0, 0.0) + k(c1)))?;
            let phi_cc = solve(&(l - CMat4::identity() * c(0.0, 2.0 * w)), &(-forms.r20(&z, &z)))?;
            let r_ac = forms.r20(&z0, &z) * c(2.0, 0.0);
            let q_a = -(c(0.0, 1.0) * inner(&r_ac, &zs));
            let mz = border(&(l - CMat4::identity() * c(0.0, w)), &z, &zs);
            let phi_ac = solve(&mz, &(-r_ac + z * (c(0.0, 1.0) * q_a)))?;
            let phi_bc = solve(&mz, &phi_ac)?;
            (Some(OscCorrections { phi_cc_bar, phi_cc, phi_ac, phi_bc }), q_a.re)
        }
        _ => (None, 0.0),
    };
    let a_cc = match (&osc, basis.zeta) {
        (Some(o), Some(z)) => {
            let zb = z.conjugate();
            proj(forms.r30(&z0, &z, &zb) * c(6.0, 0.0)
                + forms.r20(&z0, &o.phi_cc_bar) * two
                + forms.r20(&z, &o.phi_ac.conjugate()) * two
                + forms.r20(&zb, &o.phi_ac) * two
                - phi_ab * c(c1, 0.0))
        }
        _ => 0.0,
    };
    let cubic = FoldCubic { mu_a, a3, a_cc };
    Ok(FoldCorrections { phi_mu, phi_aa, phi_ab, phi_bb, osc, q_a, cubic })
}

impl FoldCorrections {
    /// Largest component of any correction; a size diagnostic.
    pub fn max_norm(&self) -> f64 {
        let mut m = max_abs(&self.phi_mu).max(max_abs(&self.phi_aa));
        m = m.max(max_abs(&self.phi_ab)).max(max_abs(&self.phi_bb));
        if let Some(o) = &self.osc {
            for v in [o.phi_cc_bar, o.phi_cc, o.phi_ac, o.phi_bc] {
                m = m.max(max_abs(&v));
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CurveCase;
    use crate::normalform::basis::{fold_basis, iomega2_basis, l_complex};

    #[test]
    fn iomega2_phi_vectors() {
        for (beta, alpha) in [(1, 3.0), (1, 4.5), (-1, 1.5), (-1, 0.5)] {
            let (p, eq) = CurveCase::Line.bifurcation_point(beta, alpha).unwrap();
            let b = iomega2_basis(&p, &eq).unwrap();
            let f = TaylorForms::new(&p, &eq);
            let l = l_complex(&p, &eq);
            let phi = solve_phi_iomega2(&l, &b, &f).unwrap();
            assert!(max_abs(&(l * phi.phi00001 + f.r01())) <= 1e-11);
            let z0 = b.zeta0;
            let r = (l - CMat4::identity() * c(0.0, 2.0 * b.omega)) * phi.phi20000 + f.r20(&z0, &z0);
            assert!(max_abs(&r) <= 1e-11);
            let r = l * phi.phi10100 + f.r20(&z0, &z0.conjugate()) * c(2.0, 0.0);
            assert!(max_abs(&r) <= 1e-11);
            assert!(max_abs(&(phi.phi00001 - phi00001_closed(&p, &eq))) <= 1e-10);
            assert_eq!(phi.phi00001[1], c(0.0, 0.0));
            assert_eq!(phi.phi00001[3], c(0.0, 0.0));
            let w = b.omega;
            assert!((phi.phi20000[1] - phi.phi20000[0] * c(0.0, 2.0 * w)).norm() <= 1e-10);
            assert!((phi.phi20000[3] - phi.phi20000[2] * c(0.0, 2.0 * w)).norm() <= 1e-10);
        }
    }

    #[test]
    fn phi00001_at_alpha_three() {
        let (p, eq) = CurveCase::Line.bifurcation_point(1, 3.0).unwrap();
        let v = phi00001_closed(&p, &eq);
        assert!((v[0].re - (-2.0 * eq.psi_r + eq.psi_i)).abs() < 1e-15);
        assert!((v[2].re - (-eq.psi_r - 2.0 * eq.psi_i)).abs() < 1e-15);
    }

    #[test]
    fn fold_corrections_solve_their_systems() {
        let (p, eq) = CurveCase::FoldPlus.bifurcation_point(1, 3.0).unwrap();
        let b = fold_basis(&p, &eq).unwrap();
        let f = TaylorForms::new(&p, &eq);
        let l = l_complex(&p, &eq);
        let a1 = inner(&f.r01(), &b.zeta1_star).re;
        let b1 = inner(&f.r20(&b.zeta0, &b.zeta0), &b.zeta1_star).re;
        let z = b.zeta.unwrap();
        let c1 = inner(&(f.r20(&z, &z.conjugate()) * c(2.0, 0.0)), &b.zeta1_star).re;
        let fc = fold_corrections(&l, &b, &f, a1, b1, c1).unwrap();
        // L Pmu = -R01 + a1 z1 up to a multiple of z0
        let res = l * fc.phi_mu + f.r01() - b.zeta1 * c(a1, 0.0);
        let along = inner(&fc.phi_mu, &b.zeta0_star);
        assert!(max_abs(&(res + b.zeta1 * along)) < 1e-11);
        assert!(fc.q_a.is_finite() && fc.q_a.abs() > 1e-3);
        assert!((fc.q_a - (-0.13062377548875248)).abs() < 1e-10);
        // no z1 component enters Paa
        assert!(inner(&fc.phi_aa, &b.zeta1_star).norm() < 1e-10);
    }
}
