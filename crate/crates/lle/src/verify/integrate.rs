use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use crate::error::{LleError, Result};
use crate::linearization::build_l;
use crate::model::{Equilibrium, Params};
use crate::normalform::TaylorForms;

/// |U| above which a trajectory is cut off.
pub const BLOW_UP: f64 = 1e6;

/// dU/dx = L U + R(U, mu) for U = (psi_r, psi_r', psi_i, psi_i') - psi* at alpha = alpha* + mu.
#[derive(Debug, Clone)]
pub struct SpatialSystem {
    pub star: Params,
    pub eq: Equilibrium,
    pub mu: f64,
    l: Matrix4<f64>,
    forms: TaylorForms,
}

impl SpatialSystem {
    pub fn new(star: &Params, eq: &Equilibrium, mu: f64) -> Self {
        SpatialSystem {
            star: *star,
            eq: *eq,
            mu,
            l: build_l(star, eq).entries,
            forms: TaylorForms::new(star, eq),
        }
    }

    pub fn params(&self) -> Params {
        self.star.shifted(self.mu)
    }

    pub fn rhs(&self, u: &Vector4<f64>) -> Vector4<f64> {
        self.l * u + self.forms.full(u, self.mu)
    }

    pub fn rk4_step(&self, u: &Vector4<f64>, h: f64) -> Vector4<f64> {
        let k1 = self.rhs(u);
        let k2 = self.rhs(&(u + k1 * (h / 2.0)));
        let k3 = self.rhs(&(u + k2 * (h / 2.0)));
        let k4 = self.rhs(&(u + k3 * h));
        u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    }

    /// State after n fixed steps over a signed length; None on blow-up.
    pub fn flow(&self, u0: &Vector4<f64>, length: f64, n: usize) -> Option<Vector4<f64>> {
        let h = length / n as f64;
        let mut u = *u0;
        for _ in 0..n {
            u = self.rk4_step(&u, h);
            if !(u.amax() <= BLOW_UP) {
                return None;
            }
        }
        Some(u)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub x: Vec<f64>,
    pub u: Vec<[f64; 4]>,
    pub steps: usize,
    /// Step-halving estimate of the endpoint error.
    pub error_estimate: f64,
    /// Position where |U| exceeded the blow-up bound, if it did.
    pub blow_up: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> Vector4<f64> {
        Vector4::from(*self.u.last().expect("non-empty trajectory"))
    }

    pub fn to_csv(&self, psi0: crate::linalg::C64) -> String {
        use crate::fmt::g15;
        let mut out = String::from("x,psi_re,psi_im\n");
        for (x, u) in self.x.iter().zip(&self.u) {
            out.push_str(&format!("{},{},{}\n", g15(*x), g15(psi0.re + u[0]), g15(psi0.im + u[2])));
        }
        out
    }
}

fn run(sys: &SpatialSystem, u0: &Vector4<f64>, x0: f64, n: usize, h: f64, keep: bool) -> Trajectory {
    let mut x = vec![x0];
    let mut u = vec![[u0[0], u0[1], u0[2], u0[3]]];
    let mut cur = *u0;
    let mut blow_up = None;
    for j in 1..=n {
        cur = sys.rk4_step(&cur, h);
        let xj = x0 + j as f64 * h;
        if !(cur.amax() <= BLOW_UP) {
            blow_up = Some(xj);
            x.push(xj);
            u.push([cur[0], cur[1], cur[2], cur[3]]);
            break;
        }
        if keep || j == n {
            x.push(xj);
            u.push([cur[0], cur[1], cur[2], cur[3]]);
        }
    }
    Trajectory { x, u, steps: n, error_estimate: 0.0, blow_up }
}

/// Fixed-step RK4 from x_span.0 to x_span.1 (either direction) with |step| <= step.
pub fn integrate(sys: &SpatialSystem, u0: &Vector4<f64>, x_span: (f64, f64), step: f64) -> Result<Trajectory> {
    let (x0, x1) = x_span;
    if !(step > 0.0 && step.is_finite()) {
        return Err(LleError::Config(format!("step must be positive, got {step}")));
    }
    if !(x0.is_finite() && x1.is_finite()) {
        return Err(LleError::Config("x_span must be finite".into()));
    }
    let n = (((x1 - x0).abs() / step).ceil() as usize).max(1);
    let h = (x1 - x0) / n as f64;
    let mut t = run(sys, u0, x0, n, h, true);
    if t.blow_up.is_none() {
        let fine = run(sys, u0, x0, 2 * n, h / 2.0, false);
        t.error_estimate = match fine.blow_up {
            None => (t.last() - fine.last()).amax() / 15.0,
            Some(_) => f64::INFINITY,
        };
    } else {
        t.error_estimate = f64::INFINITY;
    }
    Ok(t)
}

/// The reversor S = diag(1, -1, 1, -1) applied to a state.
pub fn reverse(u: &Vector4<f64>) -> Vector4<f64> {
    Vector4::new(u[0], -u[1], u[2], -u[3])
}

/// max_x |U(-x) - S U(x)| for a start in Fix(S), integrating both ways over [0, half].
pub fn flow_reversibility_defect(sys: &SpatialSystem, u1: f64, u3: f64, half: f64, step: f64) -> Result<f64> {
    let u0 = Vector4::new(u1, 0.0, u3, 0.0);
    let fwd = integrate(sys, &u0, (0.0, half), step)?;
    let bwd = integrate(sys, &u0, (0.0, -half), step)?;
    let d = fwd
        .u
        .iter()
        .zip(&bwd.u)
        .map(|(a, b)| (reverse(&Vector4::from(*a)) - Vector4::from(*b)).amax())
        .fold(0.0, f64::max);
    Ok(d)
}
