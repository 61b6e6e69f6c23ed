//! Spatial-dynamics matrix, its spectrum and the bifurcation class of an equilibrium.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix4, Vector4};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{LleError, Result};
use crate::linalg::C64;
use crate::model::{CurveCase, Equilibrium, Params};
use crate::normalform::taylor::TaylorForms;

/// Default tolerance on |Delta| and on the discriminant when classifying.
pub const DEFAULT_CLASS_TOL: f64 = 1e-8;

/// Largest equilibrium residual accepted before classification refuses to answer.
const EQ_RESIDUAL_MAX: f64 = 1e-8;

/// The reversor diag(1, -1, 1, -1).
pub const REVERSOR: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialMatrix {
    pub entries: Matrix4<f64>,
}

impl SpatialMatrix {
    /// T = tr(L^2)/2, the sum of the two X^2 roots.
    pub fn trace_coeff(&self) -> f64 {
        (self.entries * self.entries).trace() / 2.0
    }

    pub fn det_coeff(&self) -> f64 {
        self.entries.determinant()
    }
}

/// The four nontrivial entries (a, b, c, d) before the sign beta is applied.
pub fn entry_values(alpha: f64, eq: &Equilibrium) -> (f64, f64, f64, f64) {
    let (r, i) = (eq.psi_r, eq.psi_i);
    (
        3.0 * r * r + i * i - alpha,
        2.0 * r * i - 1.0,
        2.0 * r * i + 1.0,
        r * r + 3.0 * i * i - alpha,
    )
}

pub fn build_l(params: &Params, eq: &Equilibrium) -> SpatialMatrix {
    let (a, b, c, d) = entry_values(params.alpha, eq);
    let s = params.sign();
    #[rustfmt::skip]
    let entries = Matrix4::new(
        0.0,   1.0, 0.0,   0.0,
        s * a, 0.0, s * b, 0.0,
        0.0,   0.0, 0.0,   1.0,
        s * c, 0.0, s * d, 0.0,
    );
    SpatialMatrix { entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class")]
pub enum BifurcationClass {
    Hyperbolic,
    EllipticNoBif,
    IOmega2 { omega: f64 },
    O2IOmega { omega: f64 },
    O2,
    O4,
}

impl BifurcationClass {
    pub fn name(&self) -> &'static str {
        match self {
            BifurcationClass::Hyperbolic => "Hyperbolic",
            BifurcationClass::EllipticNoBif => "EllipticNoBif",
            BifurcationClass::IOmega2 { .. } => "IOmega2",
            BifurcationClass::O2IOmega { .. } => "O2IOmega",
            BifurcationClass::O2 => "O2",
            BifurcationClass::O4 => "O4",
        }
    }

    pub fn omega(&self) -> Option<f64> {
        match self {
            BifurcationClass::IOmega2 { omega } | BifurcationClass::O2IOmega { omega } => {
                Some(*omega)
            }
            _ => None,
        }
    }

    pub fn kind(&self) -> Option<ClassKind> {
        match self {
            BifurcationClass::IOmega2 { .. } => Some(ClassKind::IOmega2),
            BifurcationClass::O2IOmega { .. } => Some(ClassKind::O2IOmega),
            BifurcationClass::O2 => Some(ClassKind::O2),
            _ => None,
        }
    }
}

impl fmt::Display for BifurcationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.omega() {
            Some(w) => write!(f, "{}(omega={w})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

/// The three codimension-one classes that carry a normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ClassKind {
    IOmega2,
    O2IOmega,
    O2,
}

impl ClassKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassKind::IOmega2 => "iomega2",
            ClassKind::O2IOmega => "o2iomega",
            ClassKind::O2 => "o2",
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassKind {
    type Err = LleError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iomega2" | "iomega" => Ok(ClassKind::IOmega2),
            "o2iomega" => Ok(ClassKind::O2IOmega),
            "o2" => Ok(ClassKind::O2),
            other => Err(LleError::Config(format!("unknown class '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumReport {
    #[serde(serialize_with = "ser_complex4")]
    pub eigenvalues: [C64; 4],
    pub trace_coeff: f64,
    pub det_coeff: f64,
    pub class: BifurcationClass,
}

fn ser_complex4<S: serde::Serializer>(v: &[C64; 4], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(4))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// (T, Delta) of X^4 - T X^2 + Delta from the closed forms in rho.
pub fn char_coeffs(params: &Params, eq: &Equilibrium) -> (f64, f64) {
    let (rho, alpha) = (eq.rho, params.alpha);
    let t = params.sign() * (4.0 * rho - 2.0 * alpha);
    let delta = 3.0 * rho * rho - 4.0 * alpha * rho + alpha * alpha + 1.0;
    (t, delta)
}

/// Roots of X^4 - T X^2 + Delta, as +-sqrt of each X^2 root.
pub fn biquadratic_roots(t: f64, delta: f64) -> [C64; 4] {
    let disc = C64::new(t * t - 4.0 * delta, 0.0).sqrt();
    let half = C64::new(t / 2.0, 0.0);
    let y1 = half + disc / 2.0;
    // the smaller root through Vieta when cancellation would hurt
    let y2 = if y1.norm() > 0.0 && (half - disc / 2.0).norm() < 1e-8 * y1.norm() {
        C64::new(delta, 0.0) / y1
    } else {
        half - disc / 2.0
    };
    let (x1, x2) = (y1.sqrt(), y2.sqrt());
    [x1, -x1, x2, -x2]
}

pub fn spatial_spectrum(params: &Params, eq: &Equilibrium) -> SpectrumReport {
    let (t, delta) = char_coeffs(params, eq);
    let class = classify_coeffs(t, delta, DEFAULT_CLASS_TOL);
    SpectrumReport {
        eigenvalues: biquadratic_roots(t, delta),
        trace_coeff: t,
        det_coeff: delta,
        class,
    }
}

fn classify_coeffs(t: f64, delta: f64, tol: f64) -> BifurcationClass {
    if delta.abs() <= tol {
        if t.abs() <= tol {
            BifurcationClass::O4
        } else if t < 0.0 {
            BifurcationClass::O2IOmega { omega: (-t).sqrt() }
        } else {
            BifurcationClass::O2
        }
    } else {
        let disc = t * t - 4.0 * delta;
        if disc.abs() <= tol * (1.0 + t * t) && t < 0.0 {
            BifurcationClass::IOmega2 { omega: (-t / 2.0).sqrt() }
        } else if disc > 0.0 && (t - disc.sqrt() < 0.0) {
            // at least one X^2 root is real and negative
            BifurcationClass::EllipticNoBif
        } else {
            BifurcationClass::Hyperbolic
        }
    }
}

/// Bifurcation class of an equilibrium; refuses when the equilibrium does not solve its equation.
pub fn classify(params: &Params, eq: &Equilibrium, tol: f64) -> Result<BifurcationClass> {
    if !(tol > 0.0) {
        return Err(LleError::Config("classification tolerance must be positive".into()));
    }
    let res = eq.residual(params);
    if !(res <= EQ_RESIDUAL_MAX) || (eq.rho - eq.psi_r.powi(2) - eq.psi_i.powi(2)).abs() > 1e-10 {
        return Err(LleError::AmbiguousClassification(format!(
            "equilibrium residual {res:.3e} does not match the parameters"
        )));
    }
    let (t, delta) = char_coeffs(params, eq);
    Ok(classify_coeffs(t, delta, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub class: BifurcationClass,
    pub case: CurveCase,
    pub f2: f64,
    pub rho: f64,
}

/// Every codimension-one curve crossing this alpha, in the order line, fold-plus, fold-minus.
pub fn bifurcation_curves(beta: i32, alpha: f64) -> Vec<CurvePoint> {
    let mut out: Vec<CurvePoint> = Vec::new();
    for case in [CurveCase::Line, CurveCase::FoldPlus, CurveCase::FoldMinus] {
        let Ok((params, eq)) = case.bifurcation_point(beta, alpha) else {
            continue;
        };
        let (t, delta) = char_coeffs(&params, &eq);
        let class = classify_coeffs(t, delta, DEFAULT_CLASS_TOL);
        let keep = match (case, class) {
            (CurveCase::Line, BifurcationClass::IOmega2 { .. }) => true,
            (_, BifurcationClass::O4) => !out.iter().any(|p| p.class == BifurcationClass::O4),
            (CurveCase::FoldPlus | CurveCase::FoldMinus, BifurcationClass::O2IOmega { .. })
            | (CurveCase::FoldPlus | CurveCase::FoldMinus, BifurcationClass::O2) => true,
            _ => false,
        };
        if keep {
            out.push(CurvePoint { class, case, f2: params.f2(), rho: eq.rho });
        }
    }
    out
}

/// max of |L S U + S L U| and |R(SU) + S R(U)| for one sample.
pub fn anticommutation_defect(
    l: &Matrix4<f64>,
    forms: &TaylorForms,
    u: &Vector4<f64>,
    mu: f64,
) -> f64 {
    let s = Matrix4::from_diagonal(&Vector4::from(REVERSOR));
    let su = s * u;
    let lin = (l * su + s * (l * u)).amax();
    let nl = (forms.full(&su, mu) + s * forms.full(u, mu)).amax();
    lin.max(nl)
}

/// Largest anticommutation defect over random U in the unit ball and random small mu.
pub fn check_reversibility(params: &Params, eq: &Equilibrium, n_samples: usize) -> Result<f64> {
    check_reversibility_seeded(params, eq, n_samples, 0x5eed)
}

pub fn check_reversibility_seeded(
    params: &Params,
    eq: &Equilibrium,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(LleError::Config("n_samples must be at least 1".into()));
    }
    let l = build_l(params, eq).entries;
    let forms = TaylorForms::new(params, eq);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_samples {
        let u = random_unit_ball(&mut rng);
        let mu = rng.gen_range(-1e-2..1e-2);
        worst = worst.max(anticommutation_defect(&l, &forms, &u, mu));
    }
    Ok(worst)
}

fn random_unit_ball(rng: &mut StdRng) -> Vector4<f64> {
    loop {
        let u = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        if u.norm() <= 1.0 {
            return u;
        }
    }
}
