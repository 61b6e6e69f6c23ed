//! Sampled approximate stationary solutions built from the normal-form expansions.

mod construct;
mod io;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{LleError, Result};
use crate::linalg::C64;
use crate::linearization::ClassKind;
use crate::model::{CurveCase, Equilibrium, Params};
use crate::normalform::Coefficients;

pub use construct::{build, build_at_level, symmetric_grid, Detail, Setup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IOmega2Kind {
    Periodic,
    Homoclinic,
    DarkFront,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum O2IOmegaKind {
    EquilibriumPlus,
    EquilibriumMinus,
    PeriodicFirstKind,
    PeriodicSecondKind,
    HomoclinicToPeriodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum O2Kind {
    EquilibriumPlus,
    EquilibriumMinus,
    Periodic,
    Homoclinic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    IOmega2(IOmega2Kind),
    O2IOmega(O2IOmegaKind),
    O2(O2Kind),
}

impl Family {
    pub fn class(&self) -> ClassKind {
        match self {
            Family::IOmega2(_) => ClassKind::IOmega2,
            Family::O2IOmega(_) => ClassKind::O2IOmega,
            Family::O2(_) => ClassKind::O2,
        }
    }

    pub fn name(&self) -> &'static str {
        use IOmega2Kind as I;
        use O2IOmegaKind as F;
        use O2Kind as O;
        match self {
            Family::IOmega2(I::Periodic) => "periodic",
            Family::IOmega2(I::Homoclinic) => "homoclinic",
            Family::IOmega2(I::DarkFront) => "dark-front",
            Family::O2IOmega(F::EquilibriumPlus) | Family::O2(O::EquilibriumPlus) => "equilibrium-plus",
            Family::O2IOmega(F::EquilibriumMinus) | Family::O2(O::EquilibriumMinus) => "equilibrium-minus",
            Family::O2IOmega(F::PeriodicFirstKind) => "periodic-first",
            Family::O2IOmega(F::PeriodicSecondKind) => "periodic-second",
            Family::O2IOmega(F::HomoclinicToPeriodic) => "homoclinic-to-periodic",
            Family::O2(O::Periodic) => "periodic",
            Family::O2(O::Homoclinic) => "homoclinic",
        }
    }

    /// All families of a class, in a fixed order.
    pub fn all(class: ClassKind) -> Vec<Family> {
        match class {
            ClassKind::IOmega2 => vec![
                Family::IOmega2(IOmega2Kind::Periodic),
                Family::IOmega2(IOmega2Kind::Homoclinic),
                Family::IOmega2(IOmega2Kind::DarkFront),
            ],
            ClassKind::O2IOmega => vec![
                Family::O2IOmega(O2IOmegaKind::EquilibriumPlus),
                Family::O2IOmega(O2IOmegaKind::EquilibriumMinus),
                Family::O2IOmega(O2IOmegaKind::PeriodicFirstKind),
                Family::O2IOmega(O2IOmegaKind::PeriodicSecondKind),
                Family::O2IOmega(O2IOmegaKind::HomoclinicToPeriodic),
            ],
            ClassKind::O2 => vec![
                Family::O2(O2Kind::EquilibriumPlus),
                Family::O2(O2Kind::EquilibriumMinus),
                Family::O2(O2Kind::Periodic),
                Family::O2(O2Kind::Homoclinic),
            ],
        }
    }

    pub fn parse(class: ClassKind, name: &str) -> Result<Family> {
        let name = name.to_ascii_lowercase();
        Family::all(class)
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| LleError::Config(format!("unknown {class} family '{name}'")))
    }

    pub fn is_periodic(&self) -> bool {
        matches!(
            self,
            Family::IOmega2(IOmega2Kind::Periodic)
                | Family::O2IOmega(O2IOmegaKind::PeriodicFirstKind)
                | Family::O2IOmega(O2IOmegaKind::PeriodicSecondKind)
                | Family::O2(O2Kind::Periodic)
        )
    }

    pub fn is_equilibrium(&self) -> bool {
        matches!(
            self,
            Family::O2IOmega(O2IOmegaKind::EquilibriumPlus | O2IOmegaKind::EquilibriumMinus)
                | Family::O2(O2Kind::EquilibriumPlus | O2Kind::EquilibriumMinus)
        )
    }

    /// Families whose truncated-system solution is exact, not an expansion about a center.
    pub fn has_exact_truncated_solution(&self) -> bool {
        !matches!(
            self,
            Family::O2IOmega(O2IOmegaKind::PeriodicSecondKind) | Family::O2(O2Kind::Periodic)
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.class(), self.name())
    }
}

/// Family-specific small parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Aux {
    /// K: wavenumber shift for (i omega)^2 periodic waves, |C|^2 for 0^2(i omega) families.
    pub k_param: Option<f64>,
    /// Amplitude of the oscillation about a center.
    pub eps: Option<f64>,
    /// Sign of the A amplitude; None picks the family default.
    pub branch: Option<i8>,
    /// Phase of the oscillatory part: false for 0, true for pi.
    pub phase_pi: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSpec {
    pub family: Family,
    pub beta: i32,
    pub case: CurveCase,
    pub alpha_star: f64,
    pub mu: f64,
    pub aux: Aux,
}

impl ProfileSpec {
    pub fn new(family: Family, beta: i32, case: CurveCase, alpha_star: f64, mu: f64) -> Self {
        ProfileSpec { family, beta, case, alpha_star, mu, aux: Aux::default() }
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.aux.k_param = Some(k);
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.aux.eps = Some(eps);
        self
    }

    pub fn with_branch(mut self, branch: i8) -> Self {
        self.aux.branch = Some(branch);
        self
    }

    pub fn with_phase_pi(mut self, pi: bool) -> Self {
        self.aux.phase_pi = pi;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Order {
    /// The printed leading-order formula.
    Leading,
    /// Leading order plus the quadratic corrections of the expansion.
    Corrected,
}

impl FromStr for Order {
    type Err = LleError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "leading" => Ok(Order::Leading),
            "corrected" => Ok(Order::Corrected),
            other => Err(LleError::Config(format!("unknown order '{other}'"))),
        }
    }
}

/// Denominator of the O(mu) term of the (i omega)^2 homoclinic expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Denominator {
    /// 1 + psi_r psi_i, as printed.
    Printed,
    /// 1 + 2 psi_r psi_i, as in the basis.
    Consistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileConfig {
    pub order: Order,
    pub second_term_denominator: Denominator,
    /// Persistence floor K_min = k_min_factor |mu| for homoclinic-to-periodic orbits.
    pub k_min_factor: f64,
    pub n_min: usize,
    pub periods: usize,
    /// Localized domains span +-decay_widths / rate.
    pub decay_widths: f64,
    pub points_per_wavelength: f64,
    /// Half-width and size of the grid for constant profiles.
    pub constant_half_width: f64,
    pub constant_n: usize,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            order: Order::Leading,
            second_term_denominator: Denominator::Printed,
            k_min_factor: 1.0,
            n_min: 4096,
            periods: 16,
            decay_widths: 24.0,
            points_per_wavelength: 32.0,
            constant_half_width: 10.0,
            constant_n: 512,
        }
    }
}

impl ProfileConfig {
    pub fn corrected() -> Self {
        ProfileConfig { order: Order::Corrected, ..Default::default() }
    }
}

/// Where the samples came from, so that the profile can be rebuilt on finer grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Source {
    Family(ProfileSpec),
    Constant { psi_r: f64, psi_i: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionProfile {
    pub source: Source,
    pub config: ProfileConfig,
    /// Parameters of the solution: alpha = alpha* + mu.
    pub params: Params,
    /// The equilibrium at the bifurcation point.
    pub equilibrium: Equilibrium,
    pub mu: f64,
    pub k: f64,
    pub amplitude: f64,
    pub truncation_order: String,
    pub periodic: bool,
    pub period: Option<f64>,
    #[serde(skip)]
    pub background: Option<C64>,
    pub coefficients: Option<Coefficients>,
    /// State (psi_r, psi_r', psi_i, psi_i') - equilibrium at x = 0.
    pub initial_state: [f64; 4],
    pub warnings: Vec<String>,
    pub level: u32,
    #[serde(skip)]
    pub x: Vec<f64>,
    #[serde(skip)]
    pub values: Vec<C64>,
}

impl SolutionProfile {
    /// An equilibrium sampled on the constant-profile grid.
    pub fn constant(params: &Params, eq: &Equilibrium) -> Self {
        let config = ProfileConfig::default();
        let mut p = SolutionProfile {
            source: Source::Constant { psi_r: eq.psi_r, psi_i: eq.psi_i },
            config,
            params: *params,
            equilibrium: *eq,
            mu: 0.0,
            k: 0.0,
            amplitude: 0.0,
            truncation_order: "exact".into(),
            periodic: false,
            period: None,
            background: Some(eq.psi()),
            coefficients: None,
            initial_state: [0.0; 4],
            warnings: vec![],
            level: 0,
            x: vec![],
            values: vec![],
        };
        p.resample_constant(0);
        p
    }

    fn resample_constant(&mut self, level: u32) {
        let n = (self.config.constant_n - 1) * (1usize << level) + 1;
        self.x = construct::symmetric_grid(self.config.constant_half_width, n);
        let v = self.background.expect("constant profile");
        self.values = vec![v; n];
        self.level = level;
    }

    pub fn family(&self) -> Option<Family> {
        match self.source {
            Source::Family(s) => Some(s.family),
            Source::Constant { .. } => None,
        }
    }

    pub fn tag(&self) -> String {
        match self.family() {
            Some(f) => f.to_string(),
            None => "constant".into(),
        }
    }

    pub fn step(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    /// The same profile sampled on a grid refined `level` times (h / 2^level).
    pub fn at_level(&self, level: u32) -> Result<SolutionProfile> {
        match self.source {
            Source::Family(spec) => build_at_level(&spec, &self.config, level),
            Source::Constant { .. } => {
                let mut p = self.clone();
                p.resample_constant(level);
                Ok(p)
            }
        }
    }

    /// max |psi(x) - background| at the two ends of the grid.
    pub fn endpoint_deviation(&self) -> Option<f64> {
        let b = self.background?;
        let first = (self.values[0] - b).norm();
        let last = (self.values[self.values.len() - 1] - b).norm();
        Some(first.max(last))
    }

    /// max |psi(-x) - psi(x)| over mirror pairs of the grid.
    pub fn reversibility_defect(&self) -> f64 {
        let n = self.values.len();
        let pairs: Vec<(usize, usize)> = if self.periodic {
            (1..n / 2).map(|m| (n / 2 + m, n / 2 - m)).collect()
        } else {
            (0..n / 2).map(|j| (j, n - 1 - j)).collect()
        };
        pairs
            .into_iter()
            .map(|(i, j)| (self.values[i] - self.values[j]).norm())
            .fold(0.0, f64::max)
    }

    /// sup |psi - psi*|.
    pub fn max_deviation(&self) -> f64 {
        let e = self.equilibrium.psi();
        self.values.iter().map(|v| (v - e).norm()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        io::to_csv(self)
    }

    pub fn sidecar_json(&self) -> serde_json::Value {
        io::sidecar(self)
    }
}

#[cfg(test)]
mod tests;
