//! Constant solutions of the stationary equation and the (alpha, F^2) region map.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{LleError, Result};
use crate::linalg::C64;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Default relative tolerance on the cubic discriminant for reporting a double root.
pub const DEFAULT_DISC_TOL: f64 = 1e-9;

/// Default region boundary tolerance, in F^2 units.
pub const DEFAULT_REGION_TOL: f64 = 1e-8;

/// Dispersion sign, detuning and pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub beta: i32,
    pub alpha: f64,
    pub f: f64,
}

impl Params {
    pub fn new(beta: i32, alpha: f64, f: f64) -> Result<Self> {
        if beta != 1 && beta != -1 {
            return Err(LleError::Domain(format!("beta must be +1 or -1, got {beta}")));
        }
        if !(f > 0.0) || !f.is_finite() {
            return Err(LleError::Domain(format!("F must be positive, got {f}")));
        }
        if !alpha.is_finite() {
            return Err(LleError::Domain("alpha must be finite".into()));
        }
        Ok(Params { beta, alpha, f })
    }

    pub fn from_f2(beta: i32, alpha: f64, f2: f64) -> Result<Self> {
        if !(f2 > 0.0) {
            return Err(LleError::Domain(format!("F^2 must be positive, got {f2}")));
        }
        Params::new(beta, alpha, f2.sqrt())
    }

    pub fn f2(&self) -> f64 {
        self.f * self.f
    }

    pub fn sign(&self) -> f64 {
        self.beta as f64
    }

    /// Same pump and dispersion, detuning shifted by `mu`.
    pub fn shifted(&self, mu: f64) -> Params {
        Params { alpha: self.alpha + mu, ..*self }
    }
}

/// A constant solution psi = psi_r + i psi_i with rho = |psi|^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    pub psi_r: f64,
    pub psi_i: f64,
    pub rho: f64,
    pub multiplicity: u8,
}

impl Equilibrium {
    /// Equilibrium attached to a root rho of the cubic.
    pub fn from_rho(alpha: f64, f: f64, rho: f64) -> Self {
        let d = 1.0 + (rho - alpha) * (rho - alpha);
        let psi_r = f / d;
        let psi_i = f * (rho - alpha) / d;
        Equilibrium { psi_r, psi_i, rho, multiplicity: 1 }
    }

    pub fn psi(&self) -> C64 {
        C64::new(self.psi_r, self.psi_i)
    }

    /// |i psi |psi|^2 - (1 + i alpha) psi + F|.
    pub fn residual(&self, params: &Params) -> f64 {
        let psi = self.psi();
        let i = C64::i();
        (i * psi * psi.norm_sqr() - (1.0 + i * params.alpha) * psi + params.f).norm()
    }

    /// |rho (1 + (rho - alpha)^2) - F^2|.
    pub fn curve_residual(&self, params: &Params) -> f64 {
        (curve_f2(params.alpha, self.rho) - params.f2()).abs()
    }
}

/// F^2 as a function of rho along the equilibrium curve.
pub fn curve_f2(alpha: f64, rho: f64) -> f64 {
    rho * (1.0 + (rho - alpha) * (rho - alpha))
}

/// Derivative of `curve_f2` in rho; vanishes at the fold points.
pub fn curve_f2_derivative(alpha: f64, rho: f64) -> f64 {
    3.0 * rho * rho - 4.0 * alpha * rho + alpha * alpha + 1.0
}

fn cubic(alpha: f64, f2: f64, rho: f64) -> f64 {
    curve_f2(alpha, rho) - f2
}

fn polish(alpha: f64, f2: f64, mut rho: f64) -> f64 {
    for _ in 0..3 {
        let d = curve_f2_derivative(alpha, rho);
        if d == 0.0 {
            break;
        }
        let step = cubic(alpha, f2, rho) / d;
        rho -= step;
        if step.abs() <= 1e-14 * rho.abs().max(1.0) {
            break;
        }
    }
    rho
}

/// Distinct real roots of rho^3 - 2 alpha rho^2 + (alpha^2+1) rho - F^2, with multiplicity,
/// ascending. Valid for F^2 >= 0.
pub fn cubic_roots(alpha: f64, f2: f64, disc_tol: f64) -> Vec<(f64, u8)> {
    let shift = 2.0 * alpha / 3.0;
    let p = (3.0 - alpha * alpha) / 3.0;
    let q = (2.0 * alpha.powi(3) + 18.0 * alpha) / 27.0 - f2;
    let four_p3 = 4.0 * p.powi(3);
    let q2 = 27.0 * q * q;
    let disc = -(four_p3 + q2);
    let scale = 1.0 + four_p3.abs() + q2;

    if disc.abs() <= disc_tol * scale {
        if p.abs() <= 1e-12 {
            return vec![(shift, 3)];
        }
        // The double root is a critical point of the cubic, known in closed form.
        let guess = -3.0 * q / (2.0 * p) + shift;
        let g = (alpha * alpha - 3.0).max(0.0).sqrt();
        let cands = [(2.0 * alpha - g) / 3.0, (2.0 * alpha + g) / 3.0];
        let double = if (cands[0] - guess).abs() <= (cands[1] - guess).abs() {
            cands[0]
        } else {
            cands[1]
        };
        let simple = polish(alpha, f2, 2.0 * alpha - 2.0 * double);
        let mut out = vec![(double, 2), (simple, 1)];
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        return out;
    }

    if disc > 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut out: Vec<(f64, u8)> = (0..3)
            .map(|k| {
                let t = m * (theta - 2.0 * PI * k as f64 / 3.0).cos();
                (polish(alpha, f2, t + shift), 1)
            })
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    } else {
        let d = q * q / 4.0 + p.powi(3) / 27.0;
        let u = (-q / 2.0 - q.signum() * d.sqrt()).cbrt();
        let t = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        vec![(polish(alpha, f2, t + shift), 1)]
    }
}

/// All constant solutions, one entry per distinct root.
pub fn solve_equilibria(params: &Params) -> Vec<Equilibrium> {
    solve_equilibria_with(params, DEFAULT_DISC_TOL)
}

pub fn solve_equilibria_with(params: &Params, disc_tol: f64) -> Vec<Equilibrium> {
    cubic_roots(params.alpha, params.f2(), disc_tol)
        .into_iter()
        .map(|(rho, m)| {
            let mut e = Equilibrium::from_rho(params.alpha, params.f, rho);
            e.multiplicity = m;
            e
        })
        .collect()
}

/// Fold points of the equilibrium curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoints {
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub f2_plus: f64,
    pub f2_minus: f64,
}

pub fn critical_points(alpha: f64) -> Result<CriticalPoints> {
    if !(alpha > SQRT3) {
        return Err(LleError::Domain(format!(
            "critical points need alpha > sqrt(3), got {alpha}"
        )));
    }
    let g = (alpha * alpha - 3.0).sqrt();
    let rho_plus = (2.0 * alpha - g) / 3.0;
    let rho_minus = (2.0 * alpha + g) / 3.0;
    Ok(CriticalPoints {
        rho_plus,
        rho_minus,
        f2_plus: curve_f2(alpha, rho_plus),
        f2_minus: curve_f2(alpha, rho_minus),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionTag {
    OneEquilibrium,
    ThreeEquilibria,
    FoldUpper,
    FoldLower,
    Cusp,
}

impl RegionTag {
    /// Number of distinct constant solutions predicted by the tag.
    pub fn expected_count(&self) -> usize {
        match self {
            RegionTag::OneEquilibrium | RegionTag::Cusp => 1,
            RegionTag::ThreeEquilibria => 3,
            RegionTag::FoldUpper | RegionTag::FoldLower => 2,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RegionTag::OneEquilibrium => "OneEquilibrium",
            RegionTag::ThreeEquilibria => "ThreeEquilibria",
            RegionTag::FoldUpper => "FoldUpper",
            RegionTag::FoldLower => "FoldLower",
            RegionTag::Cusp => "Cusp",
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_region(alpha: f64, f2: f64, tol: f64) -> RegionTag {
    if (alpha - 2.0).hypot(f2 - 2.0) <= tol {
        return RegionTag::Cusp;
    }
    let cp = match critical_points(alpha) {
        Ok(cp) => cp,
        Err(_) => return RegionTag::OneEquilibrium,
    };
    if (f2 - cp.f2_plus).abs() <= tol {
        RegionTag::FoldUpper
    } else if (f2 - cp.f2_minus).abs() <= tol {
        RegionTag::FoldLower
    } else if f2 > cp.f2_minus && f2 < cp.f2_plus {
        RegionTag::ThreeEquilibria
    } else {
        RegionTag::OneEquilibrium
    }
}

/// Which codimension-one curve a bifurcation point sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CurveCase {
    /// rho = 1, F^2 = 1 + (1 - alpha)^2.
    Line,
    /// rho = rho_plus(alpha), F^2 = F^2_plus(alpha).
    FoldPlus,
    /// rho = rho_minus(alpha), F^2 = F^2_minus(alpha).
    FoldMinus,
}

impl CurveCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveCase::Line => "line",
            CurveCase::FoldPlus => "fold-plus",
            CurveCase::FoldMinus => "fold-minus",
        }
    }

    /// (F^2, rho) of the curve at this alpha.
    pub fn point(&self, alpha: f64) -> Result<(f64, f64)> {
        match self {
            CurveCase::Line => Ok((1.0 + (1.0 - alpha) * (1.0 - alpha), 1.0)),
            CurveCase::FoldPlus => {
                let cp = critical_points(alpha)?;
                Ok((cp.f2_plus, cp.rho_plus))
            }
            CurveCase::FoldMinus => {
                let cp = critical_points(alpha)?;
                Ok((cp.f2_minus, cp.rho_minus))
            }
        }
    }

    /// Parameters and equilibrium at the bifurcation point, built from the exact rho.
    pub fn bifurcation_point(&self, beta: i32, alpha: f64) -> Result<(Params, Equilibrium)> {
        let (f2, rho) = self.point(alpha)?;
        let params = Params::from_f2(beta, alpha, f2)?;
        let mut eq = Equilibrium::from_rho(alpha, params.f, rho);
        if *self != CurveCase::Line {
            eq.multiplicity = 2;
        }
        Ok((params, eq))
    }
}

impl fmt::Display for CurveCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CurveCase {
    type Err = LleError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "line" | "rho1" => Ok(CurveCase::Line),
            "fold-plus" | "plus" | "1" => Ok(CurveCase::FoldPlus),
            "fold-minus" | "minus" | "2" => Ok(CurveCase::FoldMinus),
            other => Err(LleError::Config(format!("unknown case '{other}'"))),
        }
    }
}
