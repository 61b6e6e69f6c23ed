//! Taylor pieces of the nonlinearity R(U, mu) about an equilibrium.
//!
//! R(U, mu) = mu R01 + mu R11 U + R20(U, U) + R30(U, U, U) exactly, the equation being cubic.

use nalgebra::Vector4;

use crate::linalg::{c, CVec4};
use crate::model::{Equilibrium, Params};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorForms {
    pub beta: f64,
    pub psi_r: f64,
    pub psi_i: f64,
}

impl TaylorForms {
    pub fn new(params: &Params, eq: &Equilibrium) -> Self {
        TaylorForms { beta: params.sign(), psi_r: eq.psi_r, psi_i: eq.psi_i }
    }

    pub fn r01(&self) -> CVec4 {
        let s = self.beta;
        CVec4::new(c(0.0, 0.0), c(-s * self.psi_r, 0.0), c(0.0, 0.0), c(-s * self.psi_i, 0.0))
    }

    pub fn r11(&self, u: &CVec4) -> CVec4 {
        let s = self.beta;
        CVec4::new(c(0.0, 0.0), -u[0] * s, c(0.0, 0.0), -u[2] * s)
    }

    /// Homogeneous quadratic part Q(U).
    pub fn quadratic(&self, u: &CVec4) -> CVec4 {
        let (r, i, s) = (self.psi_r, self.psi_i, self.beta);
        let (u1, u3) = (u[0], u[2]);
        CVec4::new(
            c(0.0, 0.0),
            (u1 * u1 * (3.0 * r) + u1 * u3 * (2.0 * i) + u3 * u3 * r) * s,
            c(0.0, 0.0),
            (u1 * u1 * i + u1 * u3 * (2.0 * r) + u3 * u3 * (3.0 * i)) * s,
        )
    }

    /// Homogeneous cubic part Cu(U).
    pub fn cubic(&self, u: &CVec4) -> CVec4 {
        let s = self.beta;
        let (u1, u3) = (u[0], u[2]);
        CVec4::new(
            c(0.0, 0.0),
            (u1 * u1 * u1 + u1 * u3 * u3) * s,
            c(0.0, 0.0),
            (u3 * u3 * u3 + u1 * u1 * u3) * s,
        )
    }

    /// Symmetric bilinear form with R20(U, U) = Q(U), by polarization.
    pub fn r20(&self, u: &CVec4, v: &CVec4) -> CVec4 {
        (self.quadratic(&(u + v)) - self.quadratic(&(u - v))) * c(0.25, 0.0)
    }

    /// Symmetric trilinear form with R30(U, U, U) = Cu(U), by polarization.
    pub fn r30(&self, u: &CVec4, v: &CVec4, w: &CVec4) -> CVec4 {
        let cu = |x: &CVec4| self.cubic(x);
        (cu(&(u + v + w)) - cu(&(u + v)) - cu(&(v + w)) - cu(&(u + w)) + cu(u) + cu(v) + cu(w))
            * c(1.0 / 6.0, 0.0)
    }

    /// The full nonlinearity on a real state.
    pub fn full(&self, u: &Vector4<f64>, mu: f64) -> Vector4<f64> {
        let (r, i, s) = (self.psi_r, self.psi_i, self.beta);
        let (u1, u3) = (u[0], u[2]);
        let q2 = 3.0 * r * u1 * u1 + 2.0 * i * u1 * u3 + r * u3 * u3;
        let q4 = i * u1 * u1 + 2.0 * r * u1 * u3 + 3.0 * i * u3 * u3;
        let c2 = u1 * u1 * u1 + u1 * u3 * u3;
        let c4 = u3 * u3 * u3 + u1 * u1 * u3;
        Vector4::new(
            0.0,
            s * (-mu * r - mu * u1 + q2 + c2),
            0.0,
            s * (-mu * i - mu * u3 + q4 + c4),
        )
    }
}
