//! Python module `lle`: equilibria, spectra, normal-form coefficients, profiles and verification.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError};
use pyo3::prelude::*;

use lle::linearization::{bifurcation_curves as curves, spatial_spectrum as spectrum, ClassKind};
use lle::model::{classify_region as region, solve_equilibria as solve, Equilibrium, Params};
use lle::normalform::{coeffs_closed, coeffs_numeric_on_curve, default_case};
use lle::profiles::{build, Family, Order, ProfileConfig, ProfileSpec, SolutionProfile};
use lle::verify::{refine_periodic, run_suite, stationary_residual, temporal_spectrum_constant, Anchor, SuiteConfig};
use lle::LleError;

create_exception!(lle, Error, PyException, "Base class of lle errors.");
create_exception!(lle, DomainError, Error, "Parameters outside the domain of an operation.");
create_exception!(lle, CrossCheckError, Error, "Closed-form and numeric coefficients disagree.");
create_exception!(lle, RegimeError, Error, "Parameters outside the regime where a family exists.");
create_exception!(lle, VerificationError, Error, "A numerical check failed.");

pub fn to_py(e: LleError) -> PyErr {
    let msg = e.to_string();
    match e.exit_code() {
        1 => PyOSError::new_err(msg),
        3 => CrossCheckError::new_err(msg),
        4 => RegimeError::new_err(msg),
        5 => VerificationError::new_err(msg),
        _ => DomainError::new_err(msg),
    }
}

fn parsed<T: std::str::FromStr<Err = LleError>>(s: &str) -> PyResult<T> {
    s.parse::<T>().map_err(to_py)
}

fn params(beta: i32, alpha: f64, f2: f64) -> PyResult<Params> {
    Params::from_f2(beta, alpha, f2).map_err(to_py)
}

/// A constant solution psi = psi_r + i psi_i with rho = |psi|^2.
#[pyclass(name = "Equilibrium", module = "lle", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyEquilibrium {
    pub psi_r: f64,
    pub psi_i: f64,
    pub rho: f64,
    pub multiplicity: u8,
}

impl From<Equilibrium> for PyEquilibrium {
    fn from(e: Equilibrium) -> Self {
        PyEquilibrium { psi_r: e.psi_r, psi_i: e.psi_i, rho: e.rho, multiplicity: e.multiplicity }
    }
}

#[pymethods]
impl PyEquilibrium {
    #[getter]
    pub fn psi(&self) -> Complex64 {
        Complex64::new(self.psi_r, self.psi_i)
    }

    fn __repr__(&self) -> String {
        format!("Equilibrium(psi={}{:+}j, rho={}, multiplicity={})", self.psi_r, self.psi_i, self.rho, self.multiplicity)
    }
}

/// A sampled solution profile.
#[pyclass(name = "Profile", module = "lle", frozen)]
pub struct PyProfile {
    inner: SolutionProfile,
}

#[pymethods]
impl PyProfile {
    #[getter]
    pub fn x(&self) -> Vec<f64> {
        self.inner.x.clone()
    }

    #[getter]
    pub fn psi(&self) -> Vec<Complex64> {
        self.inner.values.clone()
    }

    #[getter]
    pub fn k(&self) -> f64 {
        self.inner.k
    }

    #[getter]
    pub fn amplitude(&self) -> f64 {
        self.inner.amplitude
    }

    #[getter]
    pub fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    pub fn period(&self) -> Option<f64> {
        self.inner.period
    }

    #[getter]
    pub fn truncation_order(&self) -> String {
        self.inner.truncation_order.clone()
    }

    #[getter]
    pub fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    /// Sup-norm of the stationary-equation defect.
    pub fn residual(&self) -> PyResult<f64> {
        stationary_residual(&self.inner).map(|r| r.residual).map_err(to_py)
    }

    /// max |psi(-x) - psi(x)|.
    pub fn reversibility_defect(&self) -> f64 {
        self.inner.reversibility_defect()
    }

    /// Refine a periodic profile by reversible shooting; returns the orbit as JSON.
    pub fn refine(&self) -> PyResult<String> {
        let family = self.inner.family().ok_or_else(|| DomainError::new_err("constant profiles cannot be refined"))?;
        let orbit = refine_periodic(&self.inner, Anchor::for_family(family)).map_err(to_py)?;
        Ok(serde_json::to_string(&orbit).expect("orbit serializes"))
    }

    pub fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    pub fn sidecar_json(&self) -> String {
        self.inner.sidecar_json().to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.x.len()
    }

    fn __repr__(&self) -> String {
        format!("Profile({}, mu={}, k={}, n={})", self.inner.tag(), self.inner.mu, self.inner.k, self.inner.x.len())
    }
}

/// Constant solutions at (alpha, F^2), ascending in rho.
#[pyfunction]
pub fn solve_equilibria(alpha: f64, f2: f64) -> PyResult<Vec<PyEquilibrium>> {
    Ok(solve(&params(1, alpha, f2)?).into_iter().map(Into::into).collect())
}

/// Region of the (alpha, F^2) plane: OneEquilibrium, ThreeEquilibria, FoldUpper, FoldLower or Cusp.
#[pyfunction]
#[pyo3(signature = (alpha, f2, tol = 1e-9))]
pub fn classify_region(alpha: f64, f2: f64, tol: f64) -> &'static str {
    region(alpha, f2, tol).as_str()
}

/// (rho, class, omega, eigenvalues) for each constant solution.
#[pyfunction]
pub fn spatial_spectrum(beta: i32, alpha: f64, f2: f64) -> PyResult<Vec<(f64, &'static str, Option<f64>, Vec<Complex64>)>> {
    let p = params(beta, alpha, f2)?;
    Ok(solve(&p)
        .iter()
        .map(|e| {
            let s = spectrum(&p, e);
            (e.rho, s.class.name(), s.class.omega(), s.eigenvalues.to_vec())
        })
        .collect())
}

/// (class, case, F^2, rho, omega) for every bifurcation curve crossing alpha.
#[pyfunction]
pub fn bifurcation_curves(beta: i32, alpha: f64) -> Vec<(&'static str, &'static str, f64, f64, Option<f64>)> {
    curves(beta, alpha)
        .into_iter()
        .map(|c| (c.class.name(), c.case.as_str(), c.f2, c.rho, c.class.omega()))
        .collect()
}

/// Normal-form coefficients as (name, value) pairs; method is "closed" or "numeric".
#[pyfunction]
#[pyo3(signature = (kind, beta, alpha_star, case = None, method = "closed"))]
pub fn coefficients(kind: &str, beta: i32, alpha_star: f64, case: Option<&str>, method: &str) -> PyResult<Vec<(&'static str, f64)>> {
    let kind: ClassKind = parsed(kind)?;
    let case = match case {
        Some(c) => parsed(c)?,
        None => default_case(kind, beta, alpha_star),
    };
    let c = match method {
        "closed" => coeffs_closed(kind, beta, case, alpha_star),
        "numeric" => coeffs_numeric_on_curve(kind, beta, case, alpha_star),
        other => return Err(DomainError::new_err(format!("unknown method '{other}'"))),
    }
    .map_err(to_py)?;
    Ok(c.coeffs.named())
}

/// Sample one solution family near a bifurcation point.
#[pyfunction]
#[pyo3(signature = (kind, family, beta, alpha_star, mu, case = None, K = None, eps = None, branch = None, phase_pi = false, order = "leading"))]
#[allow(non_snake_case, clippy::too_many_arguments)]
pub fn construct(
    kind: &str,
    family: &str,
    beta: i32,
    alpha_star: f64,
    mu: f64,
    case: Option<&str>,
    K: Option<f64>,
    eps: Option<f64>,
    branch: Option<i8>,
    phase_pi: bool,
    order: &str,
) -> PyResult<PyProfile> {
    let kind: ClassKind = parsed(kind)?;
    let family = Family::parse(kind, family).map_err(to_py)?;
    let case = match case {
        Some(c) => parsed(c)?,
        None => default_case(kind, beta, alpha_star),
    };
    let mut spec = ProfileSpec::new(family, beta, case, alpha_star, mu).with_phase_pi(phase_pi);
    if let Some(k) = K {
        spec = spec.with_k(k);
    }
    if let Some(e) = eps {
        spec = spec.with_eps(e);
    }
    if let Some(b) = branch {
        spec = spec.with_branch(b);
    }
    let config = ProfileConfig { order: parsed::<Order>(order)?, ..ProfileConfig::default() };
    Ok(PyProfile { inner: build(&spec, &config).map_err(to_py)? })
}

/// "Stable" or "Unstable" for each constant solution, ascending in rho.
#[pyfunction]
pub fn temporal_verdicts(beta: i32, alpha: f64, f2: f64) -> PyResult<Vec<String>> {
    let p = params(beta, alpha, f2)?;
    let ks = lle::verify::temporal::default_k_grid();
    Ok(solve(&p).iter().map(|e| format!("{:?}", temporal_spectrum_constant(&p, e, &ks).verdict)).collect())
}

/// Run the verification suite and return the report as JSON.
#[pyfunction]
#[pyo3(signature = (families = None, mu = None, checks = None))]
pub fn verify(py: Python<'_>, families: Option<Vec<String>>, mu: Option<Vec<f64>>, checks: Option<Vec<String>>) -> PyResult<String> {
    let mut cfg = SuiteConfig::default();
    if let Some(f) = families {
        cfg.classes = f.iter().map(|s| parsed::<ClassKind>(s)).collect::<PyResult<_>>()?;
    }
    cfg.mu_list = mu;
    if let Some(c) = checks {
        for name in &c {
            if !["residual", "refine", "oracle", "temporal", "reversibility"].contains(&name.as_str()) {
                return Err(DomainError::new_err(format!("unknown check '{name}'")));
            }
        }
        let on = |n: &str| c.iter().any(|x| x == n);
        cfg.residual = on("residual");
        cfg.refine = on("refine");
        cfg.oracle = on("oracle");
        cfg.temporal = on("temporal");
        cfg.reversibility = on("reversibility");
    }
    let report = py.detach(|| run_suite(&cfg));
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

#[pymodule]
#[pyo3(name = "lle")]
fn lle_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("Error", py.get_type::<Error>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("CrossCheckError", py.get_type::<CrossCheckError>())?;
    m.add("RegimeError", py.get_type::<RegimeError>())?;
    m.add("VerificationError", py.get_type::<VerificationError>())?;
    m.add_class::<PyEquilibrium>()?;
    m.add_class::<PyProfile>()?;
    m.add_function(wrap_pyfunction!(solve_equilibria, m)?)?;
    m.add_function(wrap_pyfunction!(classify_region, m)?)?;
    m.add_function(wrap_pyfunction!(spatial_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(bifurcation_curves, m)?)?;
    m.add_function(wrap_pyfunction!(coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(temporal_verdicts, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

