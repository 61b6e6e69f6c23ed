use serde::Serialize;

use crate::error::{LleError, Result};
use crate::linalg::C64;
use crate::model::Params;
use crate::profiles::{build, ProfileConfig, ProfileSpec, SolutionProfile};

/// Sixth-order central weights for the second derivative (times h^2).
const STENCIL: [f64; 7] = [1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];
/// Points dropped at each end of non-periodic grids.
pub const TRIM: usize = 8;
/// Tolerated ratio of the differentiation error estimate to the residual.
pub const ERROR_FRACTION: f64 = 0.1;

/// |beta psi'' - (i - alpha) psi - psi |psi|^2 + i F| at every evaluated grid index.
pub fn defect(params: &Params, h: f64, values: &[C64], periodic: bool) -> Vec<(usize, f64)> {
    let n = values.len();
    let i = C64::i();
    let beta = params.sign();
    let at = |j: usize, o: isize| -> C64 {
        let k = (j as isize + o).rem_euclid(n as isize) as usize;
        values[k]
    };
    let range = if periodic { 0..n } else { TRIM..n.saturating_sub(TRIM) };
    range
        .map(|j| {
            let v = values[j];
            let mut d2 = C64::new(0.0, 0.0);
            for (m, w) in STENCIL.iter().enumerate() {
                if m != 3 {
                    d2 += (at(j, m as isize - 3) - v) * *w;
                }
            }
            let d2 = d2 / (h * h);
            let r = d2 * beta - (i - params.alpha) * v - v * v.norm_sqr() + i * params.f;
            (j, r.norm())
        })
        .collect()
}

fn sup(d: &[(usize, f64)]) -> f64 {
    d.iter().map(|p| p.1).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    /// Sup-norm of the defect on the reported grid.
    pub residual: f64,
    /// Change of the defect under one grid halving.
    pub error_estimate: f64,
    /// Refinement level of the reported grid.
    pub level: u32,
    pub n: usize,
}

fn compare(p: &SolutionProfile, fine: &SolutionProfile) -> (f64, f64) {
    let dc = defect(&p.params, p.step(), &p.values, p.periodic);
    let mut df = vec![f64::NAN; fine.values.len()];
    for (k, r) in defect(&fine.params, fine.step(), &fine.values, fine.periodic) {
        df[k] = r;
    }
    // coarse point j is fine point 2j on both grid types
    let est = dc
        .iter()
        .filter_map(|&(j, r)| df.get(2 * j).filter(|v| v.is_finite()).map(|rf| (r - rf).abs()))
        .fold(0.0, f64::max);
    (sup(&dc), est)
}

fn noise_floor(p: &SolutionProfile) -> f64 {
    let h = p.step();
    let m = p.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    64.0 * f64::EPSILON * m * 6.0 / (h * h)
}

/// Stationary residual with a one-refinement differentiation error check.
///
/// If the estimate exceeds 10% of the residual the grid is halved once and the check repeated.
pub fn stationary_residual(profile: &SolutionProfile) -> Result<Residual> {
    let fine = profile.at_level(profile.level + 1)?;
    let (r, est) = compare(profile, &fine);
    if est <= (ERROR_FRACTION * r).max(noise_floor(profile)) {
        return Ok(Residual { residual: r, error_estimate: est, level: profile.level, n: profile.x.len() });
    }
    let finer = profile.at_level(profile.level + 2)?;
    let (r1, est1) = compare(&fine, &finer);
    if est1 <= (ERROR_FRACTION * r1).max(noise_floor(&fine)) {
        return Ok(Residual { residual: r1, error_estimate: est1, level: fine.level, n: fine.x.len() });
    }
    Err(LleError::GridTooCoarse { estimate: est1, residual: r1 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub family: String,
    pub order: String,
    pub mu_list: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub fitted_slope: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub const SLOPE_THRESHOLD: f64 = 1.0;

/// Residual norms over a list of |mu| values; the sign of `spec.mu` selects the side.
pub fn residual_scaling(spec: &ProfileSpec, config: &ProfileConfig, mu_list: &[f64]) -> Result<ResidualReport> {
    let side = if spec.mu < 0.0 { -1.0 } else { 1.0 };
    residual_scaling_with(|m| spec.with_mu(side * m), config, mu_list)
}

/// Checked, deduplicated |mu| values in decreasing order.
pub fn scaling_mus(mu_list: &[f64]) -> Result<Vec<f64>> {
    let mut mus: Vec<f64> = mu_list.iter().map(|m| m.abs()).collect();
    mus.sort_by(|a, b| b.total_cmp(a));
    mus.dedup();
    if mus.len() < 3 {
        return Err(LleError::InsufficientData(format!("need at least 3 distinct mu values, got {}", mus.len())));
    }
    if mus.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
        return Err(LleError::InsufficientData("mu values must be nonzero and finite".into()));
    }
    if mus[0] / mus[mus.len() - 1] < 100.0 * (1.0 - 1e-12) {
        return Err(LleError::InsufficientData("mu values must span at least two decades".into()));
    }
    Ok(mus)
}

/// Residual scaling where `at(|mu|)` gives the profile spec to build at each size.
pub fn residual_scaling_with(
    at: impl Fn(f64) -> ProfileSpec,
    config: &ProfileConfig,
    mu_list: &[f64],
) -> Result<ResidualReport> {
    let mus = scaling_mus(mu_list)?;
    let mut norms = vec![];
    let mut ests = vec![];
    let mut signed = vec![];
    let mut family = String::new();
    for &m in &mus {
        let spec = at(m);
        family = spec.family.to_string();
        signed.push(spec.mu);
        let p = build(&spec, config)?;
        let r = stationary_residual(&p)?;
        norms.push(r.residual);
        ests.push(r.error_estimate);
    }
    let slope = loglog_slope(&mus, &norms);
    Ok(ResidualReport {
        family,
        order: format!("{:?}", config.order).to_lowercase(),
        mu_list: signed,
        residual_norms: norms,
        error_estimates: ests,
        fitted_slope: slope,
        threshold: SLOPE_THRESHOLD,
        pass: slope.is_finite() && slope >= SLOPE_THRESHOLD,
    })
}
