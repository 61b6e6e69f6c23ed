//! Small complex 4x4 helpers shared by the normal-form code.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{LleError, Result};

pub type C64 = Complex64;
pub type CVec4 = Vector4<C64>;
pub type CMat4 = Matrix4<C64>;

/// Condition-number guard for the 4x4 solves.
pub const COND_MAX: f64 = 1e12;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[cfg(test)]
pub fn cvec(v: [C64; 4]) -> CVec4 {
    CVec4::new(v[0], v[1], v[2], v[3])
}

pub fn rvec(v: [f64; 4]) -> CVec4 {
    CVec4::new(c(v[0], 0.0), c(v[1], 0.0), c(v[2], 0.0), c(v[3], 0.0))
}

/// Hermitian product, conjugate on the second slot: <u, v> = sum u_j conj(v_j).
pub fn inner(u: &CVec4, v: &CVec4) -> C64 {
    v.dotc(u)
}

pub fn complexify(m: &Matrix4<f64>) -> CMat4 {
    m.map(|x| c(x, 0.0))
}

pub fn max_abs(v: &CVec4) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn norm1(m: &CMat4) -> f64 {
    (0..4)
        .map(|j| (0..4).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Partial-pivoted LU solve with a condition-number guard.
pub fn solve(m: &CMat4, rhs: &CVec4) -> Result<CVec4> {
    let lu = m.lu();
    let inv = lu
        .try_inverse()
        .ok_or(LleError::NearSingular { cond: f64::INFINITY })?;
    let cond = norm1(m) * norm1(&inv);
    if !(cond <= COND_MAX) {
        return Err(LleError::NearSingular { cond });
    }
    lu.solve(rhs).ok_or(LleError::NearSingular { cond })
}

/// Dual vectors w_j with <v_i, w_j> = delta_ij for the columns v_i.
pub fn dual_basis(vs: &[CVec4; 4]) -> Result<[CVec4; 4]> {
    let m = CMat4::from_columns(vs);
    let inv = m
        .lu()
        .try_inverse()
        .ok_or(LleError::NearSingular { cond: f64::INFINITY })?;
    let row = |j: usize| -> CVec4 {
        CVec4::new(
            inv[(j, 0)].conj(),
            inv[(j, 1)].conj(),
            inv[(j, 2)].conj(),
            inv[(j, 3)].conj(),
        )
    };
    Ok([row(0), row(1), row(2), row(3)])
}

/// Rank-one bordering `m + v <., w>`.
pub fn border(m: &CMat4, v: &CVec4, w: &CVec4) -> CMat4 {
    m + v * w.adjoint()
}
