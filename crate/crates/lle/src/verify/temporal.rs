use nalgebra::Matrix2;
use serde::{Serialize, Serializer};

use crate::linalg::C64;
use crate::model::{Equilibrium, Params};

/// Growth rates above this count as instability.
pub const GROWTH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
}

fn ser_complex<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
    pairs.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalSpectrum {
    pub k: Vec<f64>,
    #[serde(serialize_with = "ser_complex")]
    pub lambda_plus: Vec<C64>,
    #[serde(serialize_with = "ser_complex")]
    pub lambda_minus: Vec<C64>,
    pub max_growth: f64,
    pub verdict: Verdict,
}

/// n wavenumbers evenly spaced on [0, kmax].
pub fn k_grid(n: usize, kmax: f64) -> Vec<f64> {
    (0..n).map(|j| kmax * j as f64 / (n - 1).max(1) as f64).collect()
}

pub fn default_k_grid() -> Vec<f64> {
    k_grid(512, 8.0)
}

/// lambda(k) = -1 +- sqrt(rho^2 - (beta k^2 + 2 rho - alpha)^2) for perturbations of a constant state.
pub fn temporal_spectrum_constant(params: &Params, eq: &Equilibrium, ks: &[f64]) -> TemporalSpectrum {
    let rho = eq.rho;
    let mut plus = Vec::with_capacity(ks.len());
    let mut minus = Vec::with_capacity(ks.len());
    for &k in ks {
        let theta = params.sign() * k * k + 2.0 * rho - params.alpha;
        let root = C64::new(rho * rho - theta * theta, 0.0).sqrt();
        plus.push(C64::new(-1.0, 0.0) + root);
        minus.push(C64::new(-1.0, 0.0) - root);
    }
    let max_growth = plus.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    TemporalSpectrum {
        k: ks.to_vec(),
        lambda_plus: plus,
        lambda_minus: minus,
        max_growth,
        verdict: if max_growth > GROWTH_TOL { Verdict::Unstable } else { Verdict::Stable },
    }
}

/// The real 2x2 block acting on (Re, Im) of the Fourier-k perturbation.
pub fn mode_matrix(params: &Params, eq: &Equilibrium, k: f64) -> Matrix2<f64> {
    let psi2 = eq.psi() * eq.psi();
    let (p, q) = (psi2.re, psi2.im);
    let theta = params.sign() * k * k + 2.0 * eq.rho - params.alpha;
    Matrix2::new(-1.0 - q, p - theta, theta + p, -1.0 + q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{classify_region, solve_equilibria, RegionTag};
    use proptest::prelude::*;

    fn eqs(alpha: f64, f2: f64) -> (Params, Vec<Equilibrium>) {
        let p = Params::from_f2(1, alpha, f2).unwrap();
        let e = solve_equilibria(&p);
        (p, e)
    }

    #[test]
    fn middle_branch_unstable_outer_stable() {
        let (p, e) = eqs(3.0, 4.0);
        assert_eq!(e.len(), 3);
        let v: Vec<Verdict> = e.iter().map(|q| temporal_spectrum_constant(&p, q, &default_k_grid()).verdict).collect();
        assert_eq!(v, vec![Verdict::Stable, Verdict::Unstable, Verdict::Stable]);
        let mid = temporal_spectrum_constant(&p, &e[1], &[0.0]);
        assert!(mid.lambda_plus[0].re > 0.0);
    }

    #[test]
    fn unique_equilibrium_stable() {
        let p = Params::new(1, 0.0, 2f64.sqrt()).unwrap();
        let e = solve_equilibria(&p);
        assert_eq!(e.len(), 1);
        assert_eq!(temporal_spectrum_constant(&p, &e[0], &default_k_grid()).verdict, Verdict::Stable);
    }

    #[test]
    fn closed_form_matches_matrix() {
        let (p, e) = eqs(3.0, 4.0);
        for q in &e {
            for &k in &[0.0, 0.3, 1.0, 2.5] {
                let s = temporal_spectrum_constant(&p, q, &[k]);
                let ev = mode_matrix(&p, q, k).complex_eigenvalues();
                for lam in [s.lambda_plus[0], s.lambda_minus[0]] {
                    let best = ev.iter().map(|z| (z - lam).norm()).fold(f64::INFINITY, f64::min);
                    assert!(best < 1e-10, "{lam} vs {ev:?}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn three_branch_pattern(alpha in 1.8f64..5.0, t in 0.05f64..0.95, beta in prop::sample::select(vec![1, -1])) {
            let cp = crate::model::critical_points(alpha).unwrap();
            let f2 = cp.f2_minus + t * (cp.f2_plus - cp.f2_minus);
            prop_assume!(classify_region(alpha, f2, 1e-8) == RegionTag::ThreeEquilibria);
            let p = Params::from_f2(beta, alpha, f2).unwrap();
            let e = solve_equilibria(&p);
            prop_assert_eq!(e.len(), 3);
            // homogeneous perturbations: stable, unstable, stable
            let at0: Vec<Verdict> = e.iter().map(|q| temporal_spectrum_constant(&p, q, &[0.0]).verdict).collect();
            prop_assert_eq!(at0, vec![Verdict::Stable, Verdict::Unstable, Verdict::Stable]);
            // on the full grid an outer state is unstable exactly when it has a Turing band
            let ks = default_k_grid();
            // keep away from bands narrower than the grid spacing
            prop_assume!(e.iter().all(|q| (q.rho - 1.0).abs() > 0.05));
            for (j, q) in e.iter().enumerate() {
                let v = temporal_spectrum_constant(&p, q, &ks).verdict;
                let k2 = beta as f64 * (p.alpha - 2.0 * q.rho);
                prop_assume!(k2 < 0.0 || (k2.sqrt() - 8.0).abs() > 0.1);
                let band = q.rho > 1.0 && k2 >= 0.0 && k2.sqrt() <= 8.0;
                let expect = if j == 1 || band { Verdict::Unstable } else { Verdict::Stable };
                prop_assert_eq!(v, expect);
            }
        }
    }
}
