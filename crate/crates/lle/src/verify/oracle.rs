use serde::Serialize;

use crate::error::{LleError, Result};
use crate::linalg::C64;
use crate::normalform::Coefficients;
use crate::profiles::{Family, IOmega2Kind, O2IOmegaKind, O2Kind, ProfileSpec, Setup};

/// Largest accepted pointwise defect.
pub const ORACLE_TOL: f64 = 1e-10;

/// A closed-form solution of a truncated normal form and the system it is substituted into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleCase {
    pub family: Family,
    /// Coefficients used in the solution formula.
    pub formula: Coefficients,
    /// Coefficients of the truncated system.
    pub ode: Coefficients,
    pub omega: f64,
    pub mu: f64,
    pub k_param: f64,
    pub phase_pi: bool,
}

impl OracleCase {
    /// The case matching a profile spec, with the coefficients of its bifurcation point.
    pub fn from_spec(spec: &ProfileSpec) -> Result<OracleCase> {
        let setup = Setup::new(spec.family.class(), spec.beta, spec.case, spec.alpha_star)?;
        Ok(OracleCase {
            family: spec.family,
            formula: setup.coeffs,
            ode: setup.coeffs,
            omega: setup.omega().unwrap_or(0.0),
            mu: spec.mu,
            k_param: spec.aux.k_param.unwrap_or(0.0),
            phase_pi: spec.aux.phase_pi,
        })
    }

    /// Replace the nonlinear coefficient of the truncated system only.
    pub fn with_ode_nonlinear(mut self, v: f64) -> Self {
        self.ode = self.ode.with_nonlinear_coeff(v);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub family: String,
    pub samples: usize,
    pub max_defect: f64,
    /// max |d|C|^2/dx| where the system has the C equation.
    pub first_integral_defect: Option<f64>,
    pub pass: bool,
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn regime(msg: String) -> LleError {
    LleError::Regime(msg)
}

/// Substitute the closed-form truncated solution into its system with analytic derivatives.
pub fn truncated_oracle(case: &OracleCase, xs: &[f64]) -> Result<OracleReport> {
    let (max_defect, first_integral_defect) = match case.family {
        Family::IOmega2(kind) => (iomega2(case, kind, xs)?, None),
        Family::O2IOmega(kind) => fold_oscillatory(case, kind, xs)?,
        Family::O2(kind) => (fold(case, kind, xs)?, None),
    };
    Ok(OracleReport {
        family: case.family.to_string(),
        samples: xs.len(),
        max_defect,
        first_integral_defect,
        pass: max_defect <= ORACLE_TOL && first_integral_defect.map_or(true, |d| d == 0.0),
    })
}

fn iomega2(case: &OracleCase, kind: IOmega2Kind, xs: &[f64]) -> Result<f64> {
    let (Coefficients::IOmega2 { a2, b2 }, Coefficients::IOmega2 { a2: oa2, b2: ob2 }) = (case.formula, case.ode)
    else {
        return Err(LleError::Config("(i omega)^2 family needs (i omega)^2 coefficients".into()));
    };
    let (mu, w, i) = (case.mu, case.omega, C64::i());
    // (A, A', B, B') at x
    let sol: Box<dyn Fn(f64) -> [C64; 4]> = match kind {
        IOmega2Kind::Periodic => {
            let kk = case.k_param;
            let rsq = (-a2 * mu - kk * kk) / b2;
            if rsq < 0.0 {
                return Err(regime(format!("(-a2*mu - K^2)/b2 = {rsq} < 0")));
            }
            let r = rsq.sqrt();
            let k = w + kk;
            Box::new(move |x| {
                let a = C64::from_polar(r, k * x);
                let b = i * kk * a;
                [a, i * k * a, b, i * k * b]
            })
        }
        IOmega2Kind::Homoclinic => {
            if !(a2 * mu > 0.0 && b2 < 0.0) {
                return Err(regime("homoclinic needs a2*mu > 0 and b2 < 0".into()));
            }
            let amp = (-2.0 * a2 * mu / b2).sqrt();
            let kappa = (a2 * mu).sqrt();
            let bamp = -(-2.0 / b2).sqrt() * a2 * mu;
            Box::new(move |x| {
                let e = C64::from_polar(1.0, w * x);
                let (s, t) = (sech(kappa * x), (kappa * x).tanh());
                let a = e * (amp * s);
                let da = e * (-amp * kappa * s * t) + i * w * a;
                let b = e * (bamp * t * s);
                let db = e * (bamp * kappa * s * (s * s - t * t)) + i * w * b;
                [a, da, b, db]
            })
        }
        IOmega2Kind::DarkFront => {
            if !(a2 * mu < 0.0 && b2 > 0.0) {
                return Err(regime("dark front needs a2*mu < 0 and b2 > 0".into()));
            }
            let c = (-a2 * mu / b2).sqrt();
            let kappa = (-a2 * mu / 2.0).sqrt();
            let bamp = -a2 * mu / (2.0 * b2).sqrt();
            Box::new(move |x| {
                let e = C64::from_polar(1.0, w * x) * i;
                let (s, t) = (sech(kappa * x), (kappa * x).tanh());
                let a = e * (c * t);
                let da = e * (c * kappa * s * s) + i * w * a;
                let b = e * (bamp * s * s);
                let db = e * (-2.0 * bamp * kappa * s * s * t) + i * w * b;
                [a, da, b, db]
            })
        }
    };
    Ok(xs
        .iter()
        .map(|&x| {
            let [a, da, b, db] = sol(x);
            let e1 = (da - (i * w * a + b)).norm();
            let e2 = (db - (i * w * b + a * (oa2 * mu) + a * (ob2 * a.norm_sqr()))).norm();
            e1.max(e2)
        })
        .fold(0.0, f64::max))
}

/// A(x), A'(x) = B(x), B'(x) of the saddle homoclinic A_s (1 - 3 sech^2(delta x)).
fn sech2_core(amp: f64, delta: f64, x: f64) -> [f64; 3] {
    let (s, t) = (sech(delta * x), (delta * x).tanh());
    let a = amp * (1.0 - 3.0 * s * s);
    let b = 6.0 * amp * delta * s * s * t;
    let db = 6.0 * amp * delta * delta * (s * s * s * s - 2.0 * s * s * t * t);
    [a, b, db]
}

fn fold(case: &OracleCase, kind: O2Kind, xs: &[f64]) -> Result<f64> {
    let (Coefficients::O2 { a, b }, Coefficients::O2 { a: oa, b: ob }) = (case.formula, case.ode) else {
        return Err(LleError::Config("0^2 family needs 0^2 coefficients".into()));
    };
    let mu = case.mu;
    let a0sq = -a * mu / b;
    if a0sq < 0.0 {
        return Err(regime(format!("-a*mu/b = {a0sq} < 0")));
    }
    let a0 = a0sq.sqrt();
    let sol: Box<dyn Fn(f64) -> [f64; 3]> = match kind {
        O2Kind::EquilibriumPlus => Box::new(move |_| [a0, 0.0, 0.0]),
        O2Kind::EquilibriumMinus => Box::new(move |_| [-a0, 0.0, 0.0]),
        O2Kind::Homoclinic => {
            let amp = b.signum() * a0;
            let delta = (b * amp / 2.0).sqrt();
            Box::new(move |x| sech2_core(amp, delta, x))
        }
        O2Kind::Periodic => {
            return Err(LleError::Config("periodic 0^2 orbits have no closed form in the truncated system".into()))
        }
    };
    Ok(xs
        .iter()
        .map(|&x| {
            let [av, bv, db] = sol(x);
            (db - (oa * mu + ob * av * av)).abs().max(0.0 * bv)
        })
        .fold(0.0, f64::max))
}

fn fold_oscillatory(case: &OracleCase, kind: O2IOmegaKind, xs: &[f64]) -> Result<(f64, Option<f64>)> {
    let (Coefficients::O2IOmega { a1, b1, c1 }, Coefficients::O2IOmega { a1: oa1, b1: ob1, c1: oc1 }) =
        (case.formula, case.ode)
    else {
        return Err(LleError::Config("0^2(i omega) family needs 0^2(i omega) coefficients".into()));
    };
    let (mu, w, kk, i) = (case.mu, case.omega, case.k_param, C64::i());
    if kk < 0.0 {
        return Err(regime(format!("K = {kk} < 0")));
    }
    let aksq = (-a1 * mu - c1 * kk) / b1;
    if aksq < 0.0 {
        return Err(regime(format!("(-a1*mu - c1*K)/b1 = {aksq} < 0")));
    }
    let ak = aksq.sqrt();
    let (kk, ak) = match kind {
        O2IOmegaKind::EquilibriumPlus | O2IOmegaKind::EquilibriumMinus => (0.0, (-a1 * mu / b1).max(0.0).sqrt()),
        _ => (kk, ak),
    };
    let sol: Box<dyn Fn(f64) -> [f64; 3]> = match kind {
        O2IOmegaKind::EquilibriumPlus | O2IOmegaKind::PeriodicFirstKind => Box::new(move |_| [ak, 0.0, 0.0]),
        O2IOmegaKind::EquilibriumMinus => Box::new(move |_| [-ak, 0.0, 0.0]),
        O2IOmegaKind::HomoclinicToPeriodic => {
            let amp = b1.signum() * ak;
            let delta = (b1 * amp / 2.0).sqrt();
            Box::new(move |x| sech2_core(amp, delta, x))
        }
        O2IOmegaKind::PeriodicSecondKind => {
            return Err(LleError::Config("second-kind orbits have no closed form in the truncated system".into()))
        }
    };
    let phase = if case.phase_pi { std::f64::consts::PI } else { 0.0 };
    let mut defect: f64 = 0.0;
    let mut first_integral: f64 = 0.0;
    for &x in xs {
        let [av, _bv, db] = sol(x);
        let cx = C64::from_polar(kk.sqrt(), w * x + phase);
        let dc = i * w * cx;
        let e_b = (db - (oa1 * mu + ob1 * av * av + oc1 * cx.norm_sqr())).abs();
        let e_c = (dc - i * w * cx).norm();
        defect = defect.max(e_b).max(e_c);
        // d|C|^2/dx = 2 Re(conj(C) C') with C' = i omega C
        let rate = 2.0 * (i * w * cx.norm_sqr()).re;
        first_integral = first_integral.max(rate.abs());
    }
    Ok((defect, Some(first_integral)))
}

/// n points evenly spaced on [-half, half].
pub fn samples(n: usize, half: f64) -> Vec<f64> {
    crate::profiles::symmetric_grid(half, n)
}
