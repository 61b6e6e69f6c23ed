use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::linearization::{check_reversibility, ClassKind};
use crate::model::{solve_equilibria, CurveCase, Params};
use crate::profiles::{build, Family, IOmega2Kind, O2IOmegaKind, O2Kind, ProfileConfig, ProfileSpec};

use super::integrate::{flow_reversibility_defect, SpatialSystem};
use super::oracle::{samples, truncated_oracle, OracleCase};
use super::refine::{refine_periodic, Anchor, DEFECT_TOL, MAX_NEWTON};
use super::residual::{loglog_slope, residual_scaling_with, scaling_mus, SLOPE_THRESHOLD};
use super::temporal::{default_k_grid, temporal_spectrum_constant, Verdict};

pub const DEFAULT_MUS: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
/// mu at which each periodic guess is refined.
pub const REFINE_MU: f64 = 1e-3;
/// Sweep for points close to the cusp alpha* = sqrt(3), where the expansions settle only below 1e-4.
pub const NEAR_CUSP_MUS: [f64; 5] = [1e-4, 3e-5, 1e-5, 3e-6, 1e-6];

/// A family at one bifurcation point; the sign of `spec.mu` selects the side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyCase {
    pub spec: ProfileSpec,
    /// K = k_per_mu |mu| for families carrying a K parameter.
    pub k_per_mu: Option<f64>,
    /// eps at REFINE_MU; sweeps follow eps ~ sqrt(|mu|).
    pub eps_ref: Option<f64>,
    /// Own sweep for points whose asymptotic range starts below the default one.
    pub pinned_mus: Option<&'static [f64]>,
}

impl FamilyCase {
    fn new(family: Family, beta: i32, case: CurveCase, alpha: f64, side: f64) -> Self {
        FamilyCase { spec: ProfileSpec::new(family, beta, case, alpha, side), k_per_mu: None, eps_ref: None, pinned_mus: None }
    }

    fn k(mut self, r: f64) -> Self {
        self.k_per_mu = Some(r);
        self
    }

    fn pin(mut self, mus: &'static [f64]) -> Self {
        self.pinned_mus = Some(mus);
        self
    }

    /// The sweep for this case under a configuration.
    pub fn mus<'a>(&'a self, cfg: &'a SuiteConfig) -> &'a [f64] {
        self.pinned_mus.or(cfg.mu_list.as_deref()).unwrap_or(&DEFAULT_MUS)
    }

    fn eps(mut self, e: f64) -> Self {
        self.spec = self.spec.with_eps(e);
        self.eps_ref = Some(e);
        self
    }

    /// The profile spec at |mu| = m.
    pub fn at(&self, m: f64) -> ProfileSpec {
        let side = if self.spec.mu < 0.0 { -1.0 } else { 1.0 };
        let mut s = self.spec.with_mu(side * m);
        if let Some(r) = self.k_per_mu {
            s = s.with_k(r * m);
        }
        if let Some(e) = self.eps_ref {
            s = s.with_eps(e * (m / REFINE_MU).sqrt());
        }
        s
    }

    pub fn tag(&self) -> String {
        format!(
            "{} beta={:+} {} alpha*={}",
            self.spec.family,
            self.spec.beta,
            self.spec.case.as_str(),
            self.spec.alpha_star
        )
    }
}

/// One representative case per family and dispersion sign; the alpha* = 1.8 cases sit near the cusp.
pub fn default_cases() -> Vec<FamilyCase> {
    use CurveCase::*;
    use Family::*;
    use O2IOmegaKind as F;
    vec![
        FamilyCase::new(IOmega2(IOmega2Kind::Periodic), 1, Line, 3.0, 1.0).k(0.0),
        FamilyCase::new(IOmega2(IOmega2Kind::Homoclinic), 1, Line, 3.0, 1.0),
        FamilyCase::new(IOmega2(IOmega2Kind::Periodic), -1, Line, 1.5, 1.0).k(0.0),
        FamilyCase::new(IOmega2(IOmega2Kind::Homoclinic), -1, Line, 1.5, 1.0),
        FamilyCase::new(IOmega2(IOmega2Kind::DarkFront), -1, Line, 0.5, 1.0),
        FamilyCase::new(O2IOmega(F::EquilibriumPlus), 1, FoldPlus, 3.0, 1.0),
        FamilyCase::new(O2IOmega(F::EquilibriumMinus), 1, FoldPlus, 3.0, 1.0),
        FamilyCase::new(O2IOmega(F::PeriodicFirstKind), 1, FoldPlus, 3.0, 1.0).k(0.2),
        FamilyCase::new(O2IOmega(F::PeriodicSecondKind), 1, FoldPlus, 3.0, 1.0).eps(0.1),
        FamilyCase::new(O2IOmega(F::HomoclinicToPeriodic), 1, FoldPlus, 3.0, 1.0).k(0.2),
        FamilyCase::new(O2IOmega(F::EquilibriumPlus), -1, FoldMinus, 2.5, -1.0),
        FamilyCase::new(O2IOmega(F::PeriodicSecondKind), -1, FoldMinus, 2.5, -1.0).eps(0.1),
        FamilyCase::new(O2IOmega(F::HomoclinicToPeriodic), -1, FoldMinus, 2.5, -1.0).k(0.0),
        FamilyCase::new(O2(O2Kind::EquilibriumPlus), 1, FoldPlus, 1.8, 1.0).pin(&NEAR_CUSP_MUS),
        FamilyCase::new(O2(O2Kind::EquilibriumMinus), 1, FoldPlus, 1.8, 1.0).pin(&NEAR_CUSP_MUS),
        FamilyCase::new(O2(O2Kind::Periodic), 1, FoldPlus, 1.8, 1.0).eps(0.1).pin(&NEAR_CUSP_MUS),
        FamilyCase::new(O2(O2Kind::Homoclinic), 1, FoldPlus, 1.8, 1.0).pin(&NEAR_CUSP_MUS),
        FamilyCase::new(O2(O2Kind::EquilibriumPlus), 1, FoldMinus, 3.0, -1.0),
        FamilyCase::new(O2(O2Kind::EquilibriumMinus), 1, FoldMinus, 3.0, -1.0),
        FamilyCase::new(O2(O2Kind::Periodic), 1, FoldMinus, 3.0, -1.0).eps(0.1),
        FamilyCase::new(O2(O2Kind::Homoclinic), 1, FoldMinus, 3.0, -1.0),
        FamilyCase::new(O2(O2Kind::Periodic), -1, FoldPlus, 3.0, 1.0).eps(0.1),
        FamilyCase::new(O2(O2Kind::Homoclinic), -1, FoldPlus, 3.0, 1.0),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub case: String,
    pub pass: bool,
    pub detail: Value,
}

impl CheckResult {
    fn new(check: &str, case: String, pass: bool, detail: Value) -> Self {
        CheckResult { check: check.into(), case, pass, detail }
    }

    fn error(check: &str, case: String, e: impl std::fmt::Display) -> Self {
        CheckResult::new(check, case, false, json!({ "error": e.to_string() }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn new(checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        VerifyReport { checks, pass }
    }

    pub fn failing(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub classes: Vec<ClassKind>,
    /// Replaces DEFAULT_MUS for every case without a pinned sweep.
    pub mu_list: Option<Vec<f64>>,
    /// Replaces the nonlinear coefficient of the truncated systems in the oracle check.
    pub override_nonlinear: Option<f64>,
    pub residual: bool,
    pub refine: bool,
    pub oracle: bool,
    pub temporal: bool,
    pub reversibility: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            classes: vec![ClassKind::IOmega2, ClassKind::O2IOmega, ClassKind::O2],
            mu_list: None,
            override_nonlinear: None,
            residual: true,
            refine: true,
            oracle: true,
            temporal: true,
            reversibility: true,
        }
    }
}

/// Residual slope of the corrected profiles (the pass criterion) and of the leading ones (baseline).
pub fn residual_check(case: &FamilyCase, mus: &[f64]) -> CheckResult {
    let corrected = residual_scaling_with(|m| case.at(m), &ProfileConfig::corrected(), mus);
    let leading = residual_scaling_with(|m| case.at(m), &ProfileConfig::default(), mus);
    match (corrected, leading) {
        (Ok(c), Ok(l)) => CheckResult::new(
            "residual_scaling",
            case.tag(),
            c.pass,
            json!({ "corrected": c, "leading_baseline": l }),
        ),
        (Err(e), _) | (_, Err(e)) => CheckResult::error("residual_scaling", case.tag(), e),
    }
}

/// Refinement at REFINE_MU, and the decay of the refined-to-guess distance over `mus`.
pub fn refine_check(case: &FamilyCase, mus: &[f64]) -> CheckResult {
    let run = || -> Result<Value> {
        let guess = build(&case.at(REFINE_MU), &ProfileConfig::default())?;
        let anchor = Anchor::for_family(case.spec.family);
        let r = refine_periodic(&guess, anchor)?;
        let mus = scaling_mus(mus)?;
        let mut dist = vec![];
        for &m in &mus {
            let g = build(&case.at(m), &ProfileConfig::corrected())?;
            dist.push(refine_periodic(&g, anchor)?.sup_distance);
        }
        let slope = loglog_slope(&mus, &dist);
        let half_ok = (r.half_period - r.guess_half_period).abs() / r.guess_half_period <= 0.2;
        let ok = r.defect <= DEFECT_TOL
            && r.newton_iterations <= MAX_NEWTON
            && r.periodicity_defect <= 1e-8
            && slope >= SLOPE_THRESHOLD;
        Ok(json!({
            "pass": ok,
            "orbit": r,
            "mu_list": mus,
            "sup_distance": dist,
            "distance_slope": slope,
            "half_period_within_20_percent": half_ok,
        }))
    };
    match run() {
        Ok(v) => CheckResult::new("refine_periodic", case.tag(), v["pass"] == true, v),
        Err(e) => CheckResult::error("refine_periodic", case.tag(), e),
    }
}

pub fn oracle_check(case: &FamilyCase, mu: f64, override_nonlinear: Option<f64>) -> CheckResult {
    let run = || -> Result<Value> {
        let mut oc = OracleCase::from_spec(&case.at(mu))?;
        if let Some(v) = override_nonlinear {
            oc = oc.with_ode_nonlinear(v);
        }
        let r = truncated_oracle(&oc, &samples(101, 40.0 / mu.sqrt()))?;
        Ok(serde_json::to_value(r).expect("serializable"))
    };
    match run() {
        Ok(v) => CheckResult::new("truncated_oracle", case.tag(), v["pass"] == true, v),
        Err(e) => CheckResult::error("truncated_oracle", case.tag(), e),
    }
}

/// Constant-state stability at the three-equilibrium point and the single-equilibrium point.
pub fn temporal_checks() -> Vec<CheckResult> {
    let ks = default_k_grid();
    let mut out = vec![];
    let p = Params::from_f2(1, 3.0, 4.0).expect("valid");
    let verdicts: Vec<Verdict> = solve_equilibria(&p)
        .iter()
        .map(|e| temporal_spectrum_constant(&p, e, &ks).verdict)
        .collect();
    out.push(CheckResult::new(
        "temporal_spectrum",
        "beta=+1 alpha=3 F2=4".into(),
        verdicts == [Verdict::Stable, Verdict::Unstable, Verdict::Stable],
        json!({ "verdicts": verdicts }),
    ));
    let p = Params::new(1, 0.0, 2f64.sqrt()).expect("valid");
    let verdicts: Vec<Verdict> = solve_equilibria(&p)
        .iter()
        .map(|e| temporal_spectrum_constant(&p, e, &ks).verdict)
        .collect();
    out.push(CheckResult::new(
        "temporal_spectrum",
        "beta=+1 alpha=0 F=sqrt2".into(),
        verdicts == [Verdict::Stable],
        json!({ "verdicts": verdicts }),
    ));
    out
}

/// Anticommutation of L and R with S on random states, and symmetry of the discrete flow.
pub fn reversibility_checks() -> Vec<CheckResult> {
    let mut out = vec![];
    let mut alg: f64 = 0.0;
    for (beta, alpha, f2) in [(1, 3.0, 4.0), (-1, 3.0, 4.0), (1, 0.0, 2.0), (-1, 1.5, 3.0), (1, 5.0, 20.0)] {
        let p = Params::from_f2(beta, alpha, f2).expect("valid");
        for e in solve_equilibria(&p) {
            match check_reversibility(&p, &e, 200) {
                Ok(d) => alg = alg.max(d),
                Err(err) => out.push(CheckResult::error("reversibility_algebraic", format!("{p:?}"), err)),
            }
        }
    }
    out.push(CheckResult::new("reversibility_algebraic", "5 parameter points".into(), alg <= 1e-12, json!({ "max_defect": alg })));

    let mut rng = StdRng::seed_from_u64(20);
    let mut flow: f64 = 0.0;
    for _ in 0..10 {
        let beta = if rng.gen::<bool>() { 1 } else { -1 };
        let (case, alpha) = if beta == 1 { (CurveCase::Line, rng.gen_range(2.2..5.0)) } else { (CurveCase::FoldPlus, rng.gen_range(2.2..5.0)) };
        let Ok((star, eq)) = case.bifurcation_point(beta, alpha) else { continue };
        let sys = SpatialSystem::new(&star, &eq, 1e-3);
        let (u1, u3) = (rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
        match flow_reversibility_defect(&sys, u1, u3, 20.0, 1e-3) {
            Ok(d) => flow = flow.max(d),
            Err(err) => out.push(CheckResult::error("reversibility_flow", format!("alpha={alpha}"), err)),
        }
    }
    out.push(CheckResult::new("reversibility_flow", "10 Fix(S) starts, |x| <= 20".into(), flow <= 1e-8, json!({ "max_defect": flow })));
    out
}

pub fn run_suite(cfg: &SuiteConfig) -> VerifyReport {
    let cases: Vec<FamilyCase> = default_cases()
        .into_iter()
        .filter(|c| cfg.classes.contains(&c.spec.family.class()))
        .collect();
    let mut checks = vec![];
    for case in &cases {
        let mus = case.mus(cfg);
        if cfg.residual {
            checks.push(residual_check(case, mus));
        }
        if cfg.refine && case.spec.family.is_periodic() {
            checks.push(refine_check(case, mus));
        }
        if cfg.oracle && case.spec.family.has_exact_truncated_solution() {
            checks.push(oracle_check(case, REFINE_MU, cfg.override_nonlinear));
        }
    }
    if cfg.temporal {
        checks.extend(temporal_checks());
    }
    if cfg.reversibility {
        checks.extend(reversibility_checks());
    }
    VerifyReport::new(checks)
}
