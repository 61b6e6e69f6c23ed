use std::f64::consts::PI;

use nalgebra::Vector4;

use crate::error::{LleError, Result};
use crate::linalg::{c, CVec4, C64};
use crate::linearization::ClassKind;
use crate::model::{CurveCase, Equilibrium, Params};
use crate::normalform::basis::{fold_basis, iomega2_basis, l_complex};
use crate::normalform::{
    coeffs_closed, fold_corrections, solve_phi_iomega2, Coefficients, FoldBasis, FoldCorrections,
    IOmega2Basis, IOmega2Phi, TaylorForms,
};

use super::{
    Denominator, Family, IOmega2Kind, O2IOmegaKind, O2Kind, Order, ProfileConfig, ProfileSpec,
    SolutionProfile, Source,
};

/// Everything known at a bifurcation point: parameters, coefficients, basis and corrections.
#[derive(Debug, Clone)]
pub struct Setup {
    pub kind: ClassKind,
    pub case: CurveCase,
    pub star: Params,
    pub eq: Equilibrium,
    pub coeffs: Coefficients,
    pub detail: Detail,
}

#[derive(Debug, Clone)]
pub enum Detail {
    IOmega2 { basis: IOmega2Basis, phi: IOmega2Phi },
    Fold { basis: FoldBasis, corr: FoldCorrections },
}

impl Setup {
    pub fn new(kind: ClassKind, beta: i32, case: CurveCase, alpha_star: f64) -> Result<Setup> {
        let coeffs = coeffs_closed(kind, beta, case, alpha_star)?.coeffs;
        let (star, eq) = case.bifurcation_point(beta, alpha_star)?;
        let forms = TaylorForms::new(&star, &eq);
        let l = l_complex(&star, &eq);
        let detail = match coeffs {
            Coefficients::IOmega2 { .. } => {
                let basis = iomega2_basis(&star, &eq)?;
                let phi = solve_phi_iomega2(&l, &basis, &forms)?;
                Detail::IOmega2 { basis, phi }
            }
            Coefficients::O2IOmega { a1, b1, c1 } => {
                let basis = fold_basis(&star, &eq)?;
                let corr = fold_corrections(&l, &basis, &forms, a1, b1, c1)?;
                Detail::Fold { basis, corr }
            }
            Coefficients::O2 { a, b } => {
                let basis = fold_basis(&star, &eq)?;
                let corr = fold_corrections(&l, &basis, &forms, a, b, 0.0)?;
                Detail::Fold { basis, corr }
            }
        };
        Ok(Setup { kind, case, star, eq, coeffs, detail })
    }

    pub fn omega(&self) -> Option<f64> {
        match &self.detail {
            Detail::IOmega2 { basis, .. } => Some(basis.omega),
            Detail::Fold { basis, .. } => basis.omega,
        }
    }

    pub fn d(&self) -> Option<f64> {
        match &self.detail {
            Detail::Fold { basis, .. } => Some(basis.d),
            Detail::IOmega2 { .. } => None,
        }
    }

    pub fn q_a(&self) -> f64 {
        match &self.detail {
            Detail::Fold { corr, .. } => corr.q_a,
            Detail::IOmega2 { .. } => 0.0,
        }
    }
}

type Field = Box<dyn Fn(f64) -> Vector4<f64>>;

enum GridKind {
    Periodic { period: f64 },
    Localized { rate: f64, kmax: f64 },
    Constant,
}

struct Plan {
    field: Field,
    grid: GridKind,
    k: f64,
    amplitude: f64,
    truncation: &'static str,
    background: Option<C64>,
    warnings: Vec<String>,
}

fn regime(msg: impl Into<String>) -> LleError {
    LleError::Regime(msg.into())
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn re(v: &CVec4) -> Vector4<f64> {
    v.map(|z| z.re)
}

pub fn build(spec: &ProfileSpec, config: &ProfileConfig) -> Result<SolutionProfile> {
    build_at_level(spec, config, 0)
}

/// Build the profile on the grid refined `level` times.
pub fn build_at_level(spec: &ProfileSpec, config: &ProfileConfig, level: u32) -> Result<SolutionProfile> {
    if !(spec.mu.is_finite() && spec.mu != 0.0) {
        return Err(regime(format!("mu must be nonzero and finite, got {}", spec.mu)));
    }
    if spec.family.class() == ClassKind::IOmega2 && spec.case != CurveCase::Line {
        return Err(LleError::Config("(i omega)^2 families live on the rho = 1 line".into()));
    }
    let setup = Setup::new(spec.family.class(), spec.beta, spec.case, spec.alpha_star)?;
    let plan = match &setup.detail {
        Detail::IOmega2 { basis, phi } => iomega2_plan(&setup, basis, *phi, spec, config)?,
        Detail::Fold { basis, corr } => fold_plan(&setup, basis, *corr, spec, config)?,
    };

    let (x, period) = match plan.grid {
        GridKind::Periodic { period } => {
            let n = config.n_min * (1usize << level);
            let span = config.periods as f64 * period;
            let x = (0..n).map(|j| (j as f64 - (n / 2) as f64) * span / n as f64).collect();
            (x, Some(period))
        }
        GridKind::Localized { rate, kmax } => {
            let half = config.decay_widths / rate;
            let waves = 2.0 * half * kmax / (2.0 * PI) * config.points_per_wavelength;
            let n0 = config.n_min.max(waves.ceil() as usize) | 1;
            (symmetric_grid(half, (n0 - 1) * (1usize << level) + 1), None)
        }
        GridKind::Constant => {
            let n = (config.constant_n - 1) * (1usize << level) + 1;
            (symmetric_grid(config.constant_half_width, n), None)
        }
    };

    let psi0 = setup.eq.psi();
    let values = x
        .iter()
        .map(|&xi| {
            let u = (plan.field)(xi);
            psi0 + C64::new(u[0], u[2])
        })
        .collect();
    let u0 = (plan.field)(0.0);

    Ok(SolutionProfile {
        source: Source::Family(*spec),
        config: *config,
        params: setup.star.shifted(spec.mu),
        equilibrium: setup.eq,
        mu: spec.mu,
        k: plan.k,
        amplitude: plan.amplitude,
        truncation_order: plan.truncation.into(),
        periodic: period.is_some(),
        period,
        background: plan.background,
        coefficients: Some(setup.coeffs),
        initial_state: [u0[0], u0[1], u0[2], u0[3]],
        warnings: plan.warnings,
        level,
        x,
        values,
    })
}

/// n points evenly spaced on [-half, half].
pub fn symmetric_grid(half: f64, n: usize) -> Vec<f64> {
    let h = 2.0 * half / (n - 1) as f64;
    let mid = (n - 1) as f64 / 2.0;
    (0..n).map(|j| (j as f64 - mid) * h).collect()
}

fn iomega2_plan(
    setup: &Setup,
    basis: &IOmega2Basis,
    phi: IOmega2Phi,
    spec: &ProfileSpec,
    config: &ProfileConfig,
) -> Result<Plan> {
    let Coefficients::IOmega2 { a2, b2 } = setup.coeffs else { unreachable!() };
    let mu = spec.mu;
    let w = basis.omega;
    let corrected = config.order == Order::Corrected;
    let Family::IOmega2(kind) = spec.family else { unreachable!() };

    // A(x), B(x) of the truncated normal form, plus grid and bookkeeping.
    let (ab, grid, k, amplitude, truncation): (Box<dyn Fn(f64) -> (C64, C64)>, GridKind, f64, f64, &str) =
        match kind {
            IOmega2Kind::Periodic => {
                let kk = spec.aux.k_param.unwrap_or(0.0);
                let rsq = (-a2 * mu - kk * kk) / b2;
                if !(rsq > 0.0) {
                    return Err(regime(format!(
                        "(-a2*mu - K^2)/b2 > 0 violated: ({} - {})/{} = {rsq}",
                        -a2 * mu,
                        kk * kk,
                        b2
                    )));
                }
                let k = w + kk;
                if !(k > 0.0) {
                    return Err(regime(format!("wavenumber omega + K = {k} must be positive")));
                }
                let r = rsq.sqrt();
                let f = move |x: f64| {
                    let a = C64::from_polar(r, k * x);
                    (a, a * c(0.0, kk))
                };
                let order = if corrected { "O(mu^{3/2})" } else { "O(mu)" };
                (Box::new(f), GridKind::Periodic { period: 2.0 * PI / k }, k, 2.0 * r, order)
            }
            IOmega2Kind::Homoclinic => {
                if !(a2 * mu > 0.0) {
                    return Err(regime(format!("a2*mu > 0 violated: a2*mu = {}", a2 * mu)));
                }
                if !(b2 < 0.0) {
                    return Err(regime(format!("b2 < 0 violated: b2 = {b2}")));
                }
                let kappa = (a2 * mu).sqrt();
                let amp = (-2.0 * a2 * mu / b2).sqrt();
                let bamp = -(-2.0 / b2).sqrt() * a2 * mu;
                let f = move |x: f64| {
                    let e = C64::from_polar(1.0, w * x);
                    let s = sech(kappa * x);
                    (e * (amp * s), e * (bamp * (kappa * x).tanh() * s))
                };
                (Box::new(f), GridKind::Localized { rate: kappa, kmax: w }, w, 2.0 * amp, "O(mu^{3/2})")
            }
            IOmega2Kind::DarkFront => {
                let alpha = spec.alpha_star;
                if spec.beta != -1 {
                    return Err(regime("dark fronts need beta = -1"));
                }
                if !(alpha < 41.0 / 30.0) || (alpha - 1.0).abs() < 1e-12 {
                    return Err(regime(format!("alpha* < 41/30 and alpha* != 1 violated: alpha* = {alpha}")));
                }
                if !(b2 > 0.0) {
                    return Err(regime(format!("b2 > 0 violated: b2 = {b2}")));
                }
                if !(a2 * mu < 0.0) {
                    return Err(regime(format!("a2*mu < 0 violated: a2*mu = {}", a2 * mu)));
                }
                let kappa = (-a2 * mu / 2.0).sqrt();
                let amp = (-a2 * mu / b2).sqrt();
                let f = move |x: f64| {
                    let e = C64::from_polar(1.0, w * x) * c(0.0, amp);
                    let t = (kappa * x).tanh();
                    let s = sech(kappa * x);
                    (e * t, e * (kappa * s * s))
                };
                (Box::new(f), GridKind::Localized { rate: 2.0 * kappa, kmax: w }, w, 2.0 * amp, "O(mu^{3/2})")
            }
        };

    let grid = match grid {
        GridKind::Localized { rate, kmax } if corrected => GridKind::Localized { rate, kmax: 2.0 * kmax },
        g => g,
    };

    let b_scale = if !corrected
        && kind == IOmega2Kind::Homoclinic
        && config.second_term_denominator == Denominator::Printed
    {
        let (r, i) = (setup.eq.psi_r, setup.eq.psi_i);
        basis.p / (1.0 + r * i)
    } else {
        1.0
    };

    let (z0, z1) = (basis.zeta0, basis.zeta1);
    let two = c(2.0, 0.0);
    let field = move |x: f64| {
        let (a, b) = ab(x);
        let mut u = re(&((z0 * a + z1 * (b * b_scale)) * two));
        if corrected {
            u += re(&phi.phi00001) * mu;
            u += re(&(phi.phi20000 * (a * a) * two));
            u += re(&phi.phi10100) * a.norm_sqr();
        }
        u
    };

    let background = match kind {
        IOmega2Kind::Homoclinic => {
            let mut b = setup.eq.psi();
            if corrected {
                b += C64::new(phi.phi00001[0].re, phi.phi00001[2].re) * mu;
            }
            Some(b)
        }
        _ => None,
    };

    Ok(Plan {
        field: Box::new(field),
        grid,
        k,
        amplitude,
        truncation,
        background,
        warnings: vec![],
    })
}

fn fold_plan(
    setup: &Setup,
    basis: &FoldBasis,
    corr: FoldCorrections,
    spec: &ProfileSpec,
    config: &ProfileConfig,
) -> Result<Plan> {
    let mu = spec.mu;
    let corrected = config.order == Order::Corrected;
    let (a, b, c1) = match setup.coeffs {
        Coefficients::O2IOmega { a1, b1, c1 } => (a1, b1, c1),
        Coefficients::O2 { a, b } => (a, b, 0.0),
        Coefficients::IOmega2 { .. } => unreachable!(),
    };
    let omega = basis.omega.unwrap_or(0.0);
    let phase = if spec.aux.phase_pi { PI } else { 0.0 };
    let a0sq = -a * mu / b;
    let mut warnings = vec![];

    enum Shape {
        Constant(f64),
        Oscillating { center: f64, eps: f64, k: f64 },
        Homoclinic { amp: f64, delta: f64 },
    }

    let need_a0 = || -> Result<f64> {
        if a0sq > 0.0 {
            Ok(a0sq.sqrt())
        } else {
            Err(regime(format!(
                "-a*mu/b > 0 violated: -({a})*({mu})/({b}) = {a0sq}; no small bounded solution on this side"
            )))
        }
    };
    let need_ak = |kk: f64| -> Result<f64> {
        if !(kk >= 0.0) {
            return Err(regime(format!("K = |C|^2 must be non-negative, got {kk}")));
        }
        let v = (-a * mu - c1 * kk) / b;
        if v > 0.0 {
            Ok(v.sqrt())
        } else {
            Err(regime(format!("(-a1*mu - c1*K)/b1 > 0 violated: value {v}")))
        }
    };
    let saddle = b.signum();
    // amplitude roots moved by the cubic terms of the reduced equation
    let shifted = |amp: f64, kk: f64| if corrected { amp + corr.cubic.shift(b, amp, mu, kk) } else { amp };

    use O2IOmegaKind as F;
    let (shape, kk, k, amplitude, truncation) = match spec.family {
        Family::O2IOmega(F::EquilibriumPlus) | Family::O2(O2Kind::EquilibriumPlus) => {
            let a0 = need_a0()?;
            (Shape::Constant(shifted(a0, 0.0)), 0.0, 0.0, a0, "O(mu)")
        }
        Family::O2IOmega(F::EquilibriumMinus) | Family::O2(O2Kind::EquilibriumMinus) => {
            let a0 = need_a0()?;
            (Shape::Constant(shifted(-a0, 0.0)), 0.0, 0.0, a0, "O(mu)")
        }
        Family::O2IOmega(F::PeriodicFirstKind) => {
            let kk = spec.aux.k_param.unwrap_or(0.0);
            let ak = need_ak(kk)?;
            let branch = spec.aux.branch.unwrap_or(1) as f64;
            let amp = shifted(branch * ak, kk);
            let k = if corrected { omega + corr.q_a * amp } else { omega };
            (Shape::Constant(amp), kk, k, ak, "O(mu)")
        }
        Family::O2IOmega(F::PeriodicSecondKind) | Family::O2(O2Kind::Periodic) => {
            let a0 = need_a0()?;
            let c0 = -saddle * a0;
            let center = shifted(c0, 0.0);
            let k = if corrected {
                // f'(center) through the cubic terms, with the shift of the center folded in
                let slope = 2.0 * c0 * (b + corr.cubic.a3 * c0);
                if !(slope < 0.0) {
                    return Err(regime(format!("center linearization {slope} is not negative; mu too large for the corrected orbit")));
                }
                (-slope).sqrt()
            } else {
                2f64.sqrt() * (-a * b * mu).powf(0.25)
            };
            let eps = spec.aux.eps.unwrap_or(0.0);
            (Shape::Oscillating { center, eps, k }, 0.0, k, a0, "O(mu+eps(eps+mu))")
        }
        Family::O2IOmega(F::HomoclinicToPeriodic) => {
            let kk = spec.aux.k_param.unwrap_or(0.0);
            let ak = need_ak(kk)?;
            if let Some(br) = spec.aux.branch {
                if br as f64 != saddle {
                    return Err(regime(format!(
                        "branch {br:+} is the center; homoclinic orbits leave the saddle branch {:+}",
                        saddle as i8
                    )));
                }
            }
            let amp = saddle * ak;
            let delta = (b * amp / 2.0).sqrt();
            let floor = config.k_min_factor * mu.abs();
            if kk < floor {
                warnings.push(format!(
                    "persistence: K = {kk} is below K_min = {floor}; the reversible homoclinic orbit is not guaranteed to persist"
                ));
            }
            (Shape::Homoclinic { amp, delta }, kk, omega, ak, "O(mu)")
        }
        Family::O2(O2Kind::Homoclinic) => {
            let a0 = need_a0()?;
            let amp = saddle * a0;
            let delta = (b * amp / 2.0).sqrt();
            (Shape::Homoclinic { amp, delta }, 0.0, 0.0, a0, "O(mu)")
        }
        Family::IOmega2(_) => unreachable!(),
    };

    let q_a = if corrected { corr.q_a } else { 0.0 };
    let sqrt_k = kk.sqrt();
    let sqrt_mu = mu.abs().sqrt();

    let (grid, background) = match shape {
        Shape::Constant(amp) if kk == 0.0 => {
            let u = re(&basis.zeta0) * amp + corrections(&corr, corrected, mu, amp, 0.0, C64::new(0.0, 0.0));
            (GridKind::Constant, Some(setup.eq.psi() + C64::new(u[0], u[2])))
        }
        Shape::Constant(_) => (GridKind::Periodic { period: 2.0 * PI / k }, None),
        Shape::Oscillating { center, eps, k } if eps == 0.0 => {
            let u = re(&basis.zeta0) * center + corrections(&corr, corrected, mu, center, 0.0, C64::new(0.0, 0.0));
            let _ = k;
            (GridKind::Periodic { period: 2.0 * PI / k }, Some(setup.eq.psi() + C64::new(u[0], u[2])))
        }
        Shape::Oscillating { k, .. } => (GridKind::Periodic { period: 2.0 * PI / k }, None),
        Shape::Homoclinic { amp, delta } => {
            let kmax = if kk > 0.0 { omega.max(2.0 * delta) } else { 2.0 * delta };
            let kmax = if corrected { 2.0 * kmax } else { kmax };
            let bg = if kk == 0.0 {
                let u = re(&basis.zeta0) * amp + corrections(&corr, corrected, mu, amp, 0.0, C64::new(0.0, 0.0));
                Some(setup.eq.psi() + C64::new(u[0], u[2]))
            } else {
                None
            };
            (GridKind::Localized { rate: 2.0 * delta, kmax }, bg)
        }
    };

    let (z0, z1, z) = (basis.zeta0, basis.zeta1, basis.zeta);
    let field = move |x: f64| {
        let (av, bv, theta) = match shape {
            Shape::Constant(amp) => (amp, 0.0, k * x),
            Shape::Oscillating { center, eps, k } => {
                (center + eps * sqrt_mu * (k * x).cos(), -eps * sqrt_mu * k * (k * x).sin(), 0.0)
            }
            Shape::Homoclinic { amp, delta } => {
                let s = sech(delta * x);
                let t = (delta * x).tanh();
                let theta = omega * x + q_a * (amp * x - 3.0 * amp * t / delta);
                (amp * (1.0 - 3.0 * s * s), 6.0 * amp * delta * t * s * s, theta)
            }
        };
        let cv = C64::from_polar(sqrt_k, theta + phase);
        let mut u = re(&z0) * av + re(&z1) * bv;
        if let Some(z) = z {
            u += re(&(z * cv)) * 2.0;
        }
        u + corrections(&corr, corrected, mu, av, bv, cv)
    };

    Ok(Plan { field: Box::new(field), grid, k, amplitude, truncation, background, warnings })
}

fn corrections(corr: &FoldCorrections, on: bool, mu: f64, a: f64, b: f64, cv: C64) -> Vector4<f64> {
    if !on {
        return Vector4::zeros();
    }
    let mut u = re(&corr.phi_mu) * mu + re(&corr.phi_aa) * (a * a) + re(&corr.phi_ab) * (a * b) + re(&corr.phi_bb) * (b * b);
    if let Some(o) = &corr.osc {
        u += re(&o.phi_cc_bar) * cv.norm_sqr();
        let osc = o.phi_cc * (cv * cv) + o.phi_ac * (cv * a) + o.phi_bc * (cv * b);
        u += re(&osc) * 2.0;
    }
    u
}
