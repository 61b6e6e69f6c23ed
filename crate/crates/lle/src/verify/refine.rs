use nalgebra::{DMatrix, DVector, Vector4};
use serde::Serialize;

use crate::error::{LleError, Result};
use crate::linalg::C64;
use crate::linearization::{biquadratic_roots, char_coeffs};
use crate::profiles::{Family, SolutionProfile};

use super::integrate::{reverse, SpatialSystem};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const MAX_NEWTON: usize = 10;
pub const DEFECT_TOL: f64 = 1e-10;
/// Largest growth exponent allowed across one shooting segment.
const SEGMENT_GROWTH: f64 = 3.0;
const MIN_DAMPING: f64 = 1.0 / 64.0;
/// T -> 0 solves the shooting equations trivially; steps below this fraction of the guess are refused.
const MIN_PERIOD_FRACTION: f64 = 0.25;

/// The scalar condition that picks one orbit out of its one-parameter family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// u1(0) held at the guess value.
    Amplitude,
    /// Half period held at the guess value.
    HalfPeriod,
}

impl Anchor {
    /// (i omega)^2 orbits have u1(0) stationary in K at K = 0, so they are pinned by the period.
    pub fn for_family(family: Family) -> Anchor {
        match family {
            Family::IOmega2(_) => Anchor::HalfPeriod,
            _ => Anchor::Amplitude,
        }
    }
}

/// A reversible periodic orbit through Fix(S) = {(u1, 0, u3, 0)}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinedOrbit {
    /// Refined start (u1, 0, u3, 0), relative to the equilibrium at the bifurcation point.
    pub initial: [f64; 4],
    pub half_period: f64,
    pub newton_iterations: usize,
    /// Largest entry of the shooting residual at the solution.
    pub defect: f64,
    pub guess_initial: [f64; 4],
    pub guess_half_period: f64,
    /// Return error over one full period, segment by segment.
    pub periodicity_defect: f64,
    /// Sup over one period of |psi_refined - psi_guess| at matching phase.
    pub sup_distance: f64,
    /// RK4 steps per half period.
    pub steps: usize,
    /// Shooting segments per half period.
    pub segments: usize,
    pub anchor: Anchor,
}

/// Shoot from Fix(S) to Fix(S) in half a period.
pub fn refine_periodic(guess: &SolutionProfile, anchor: Anchor) -> Result<RefinedOrbit> {
    refine_periodic_with(guess, anchor, DEFAULT_STEP)
}

struct Shooting {
    sys: SpatialSystem,
    segments: usize,
    seg_steps: usize,
    anchor: Anchor,
    target: f64,
}

impl Shooting {
    fn dim(&self) -> usize {
        4 * self.segments - 1
    }

    /// Unknowns: (u1(0), u3(0), T, interior nodes).
    fn start(&self, z: &DVector<f64>, j: usize) -> Vector4<f64> {
        if j == 0 {
            Vector4::new(z[0], 0.0, z[1], 0.0)
        } else {
            let o = 3 + 4 * (j - 1);
            Vector4::new(z[o], z[o + 1], z[o + 2], z[o + 3])
        }
    }

    fn tau(&self, z: &DVector<f64>) -> f64 {
        z[2] / self.segments as f64
    }

    fn run(&self, u: &Vector4<f64>, tau: f64) -> Option<Vector4<f64>> {
        self.sys.flow(u, tau, self.seg_steps)
    }

    fn is_last(&self, j: usize) -> bool {
        j + 1 == self.segments
    }

    /// Rows written by segment j and the values its end state contributes.
    fn put(&self, j: usize, end: &Vector4<f64>, col: &mut DVector<f64>) {
        if self.is_last(j) {
            col[4 * j] += end[1];
            col[4 * j + 1] += end[3];
        } else {
            for c in 0..4 {
                col[4 * j + c] += end[c];
            }
        }
    }

    fn anchor_value(&self, z: &DVector<f64>) -> f64 {
        match self.anchor {
            Anchor::Amplitude => z[0] - self.target,
            Anchor::HalfPeriod => z[2] - self.target,
        }
    }

    fn residual(&self, z: &DVector<f64>) -> Option<DVector<f64>> {
        let n = self.dim();
        let mut r = DVector::zeros(n);
        let tau = self.tau(z);
        for j in 0..self.segments {
            let end = self.run(&self.start(z, j), tau)?;
            self.put(j, &end, &mut r);
            if !self.is_last(j) {
                let next = self.start(z, j + 1);
                for c in 0..4 {
                    r[4 * j + c] -= next[c];
                }
            }
        }
        r[n - 1] = self.anchor_value(z);
        Some(r)
    }

    fn jacobian(&self, z: &DVector<f64>) -> Option<DMatrix<f64>> {
        let n = self.dim();
        let mut jac = DMatrix::zeros(n, n);
        for k in 0..n {
            let dz = 1e-7 * (1.0 + z[k].abs());
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[k] += dz;
            zm[k] -= dz;
            let touched: Vec<usize> = match k {
                0 | 1 => vec![0],
                2 => (0..self.segments).collect(),
                _ => vec![(k - 3) / 4 + 1],
            };
            let mut col = DVector::zeros(n);
            for j in touched {
                let fp = self.run(&self.start(&zp, j), self.tau(&zp))?;
                let fm = self.run(&self.start(&zm, j), self.tau(&zm))?;
                self.put(j, &((fp - fm) / (2.0 * dz)), &mut col);
            }
            if k >= 3 {
                let j = (k - 3) / 4 + 1;
                col[4 * (j - 1) + (k - 3) % 4] -= 1.0;
            }
            col[n - 1] = (self.anchor_value(&zp) - self.anchor_value(&zm)) / (2.0 * dz);
            jac.set_column(k, &col);
        }
        Some(jac)
    }
}

pub fn refine_periodic_with(guess: &SolutionProfile, anchor: Anchor, step: f64) -> Result<RefinedOrbit> {
    let Some(period) = guess.period else {
        return Err(LleError::Config("refinement needs a periodic profile".into()));
    };
    if !(step > 0.0) {
        return Err(LleError::Config(format!("step must be positive, got {step}")));
    }
    let star = guess.params.shifted(-guess.mu);
    let sys = SpatialSystem::new(&star, &guess.equilibrium, guess.mu);
    let g = guess.initial_state;
    let t0 = period / 2.0;
    let len = guess.values.len();
    let per_period = len / guess.config.periods;
    let half_samples = per_period / 2;

    // hyperbolic directions are tamed by splitting the half period
    let (t, d) = char_coeffs(&star, &guess.equilibrium);
    let growth = biquadratic_roots(t, d).iter().map(|v| v.re).fold(0.0, f64::max);
    let segments = ((growth * t0 / SEGMENT_GROWTH).ceil().max(1.0) as usize).next_power_of_two().min(half_samples);
    let samples_per_seg = half_samples / segments;
    let stride = ((t0 / step / half_samples as f64).ceil() as usize).max(1);
    let seg_steps = samples_per_seg * stride;
    let n = seg_steps * segments;

    let target = match anchor {
        Anchor::Amplitude => g[0],
        Anchor::HalfPeriod => t0,
    };
    let shoot = Shooting { sys, segments, seg_steps, anchor, target };

    // interior nodes from the guess samples, slopes by central differences
    let mid = len / 2;
    let h = guess.x[1] - guess.x[0];
    let psi0 = guess.equilibrium.psi();
    let at = |i: usize| guess.values[i % len] - psi0;
    let mut z = DVector::zeros(shoot.dim());
    z[0] = g[0];
    z[1] = g[2];
    z[2] = t0;
    for j in 1..segments {
        let i = mid + j * samples_per_seg;
        let v = at(i);
        let dv = (at(i - 2) - at(i - 1) * 8.0 + at(i + 1) * 8.0 - at(i + 2)) / (12.0 * h);
        let o = 3 + 4 * (j - 1);
        z[o] = v.re;
        z[o + 1] = dv.re;
        z[o + 2] = v.im;
        z[o + 3] = dv.im;
    }

    let blown = |iterations| LleError::NoConvergence { iterations, defect: f64::INFINITY };
    let mut fz = shoot.residual(&z).ok_or(blown(0))?;
    let mut iterations = 0;
    while fz.amax() > DEFECT_TOL {
        if iterations == MAX_NEWTON {
            return Err(LleError::NoConvergence { iterations, defect: fz.amax() });
        }
        let jac = shoot.jacobian(&z).ok_or(blown(iterations))?;
        let delta = jac.lu().solve(&(-&fz)).ok_or(LleError::SingularJacobian)?;
        if !delta.iter().all(|v| v.is_finite()) {
            return Err(LleError::SingularJacobian);
        }
        iterations += 1;
        // backtrack while the step leaves the flow's range, collapses the period or grows the residual
        let mut t = 1.0;
        loop {
            let trial = &z + &delta * t;
            let accepted = if trial[2] > MIN_PERIOD_FRACTION * t0 { shoot.residual(&trial) } else { None };
            match accepted {
                Some(r) if r.amax() < fz.amax() || t <= MIN_DAMPING => {
                    z = trial;
                    fz = r;
                    break;
                }
                _ if t <= MIN_DAMPING => return Err(blown(iterations)),
                _ => t /= 2.0,
            }
        }
    }
    if !(z[2] > 0.0) {
        return Err(LleError::NoConvergence { iterations, defect: fz.amax() });
    }

    // nodes over the full period; the second half mirrors the first
    let tau = shoot.tau(&z);
    let mut nodes: Vec<Vector4<f64>> = (0..segments).map(|j| shoot.start(&z, j)).collect();
    nodes.push(shoot.run(&nodes[segments - 1], tau).ok_or(blown(iterations))?);
    for j in segments + 1..2 * segments {
        nodes.push(reverse(&nodes[2 * segments - j]));
    }

    let hstep = tau / seg_steps as f64;
    let mut periodicity: f64 = 0.0;
    let mut sup: f64 = 0.0;
    for (j, node) in nodes.iter().enumerate() {
        let mut u = *node;
        for i in 0..samples_per_seg {
            let psi = psi0 + C64::new(u[0], u[2]);
            sup = sup.max((psi - guess.values[(mid + j * samples_per_seg + i) % len]).norm());
            for _ in 0..stride {
                u = shoot.sys.rk4_step(&u, hstep);
            }
        }
        let next = nodes[(j + 1) % nodes.len()];
        periodicity = periodicity.max((u - next).amax());
    }

    Ok(RefinedOrbit {
        initial: [z[0], 0.0, z[1], 0.0],
        half_period: z[2],
        newton_iterations: iterations,
        defect: fz.amax(),
        guess_initial: g,
        guess_half_period: t0,
        periodicity_defect: periodicity,
        sup_distance: sup,
        steps: n,
        segments,
        anchor,
    })
}
