use proptest::prelude::*;

use super::*;
use crate::error::LleError;
use crate::model::solve_equilibria;

fn io2(kind: IOmega2Kind, mu: f64) -> ProfileSpec {
    ProfileSpec::new(Family::IOmega2(kind), 1, CurveCase::Line, 3.0, mu)
}

fn fold(kind: O2IOmegaKind, mu: f64) -> ProfileSpec {
    ProfileSpec::new(Family::O2IOmega(kind), 1, CurveCase::FoldPlus, 3.0, mu)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn is_regime<T: std::fmt::Debug>(r: Result<T>) -> bool {
    matches!(r, Err(LleError::Regime(_)))
}

#[test]
fn iomega2_periodic_amplitude() {
    let p = build(&io2(IOmega2Kind::Periodic, 1e-3).with_k(0.0), &ProfileConfig::default()).unwrap();
    let expected = 2.0 * (2e-3 * 9.0 / 490.0f64).sqrt();
    assert!(close(p.amplitude, expected, 1e-12));
    assert!(close(p.amplitude, 0.01212, 5e-6));
    assert!(close(p.k, 1.0, 1e-12));
    assert_eq!(p.truncation_order, "O(mu)");
}

#[test]
fn iomega2_homoclinic_envelope_and_rate() {
    let p = build(&io2(IOmega2Kind::Homoclinic, 1e-3), &ProfileConfig::default()).unwrap();
    assert!(close(p.amplitude, 0.01714, 5e-6));
    let half = p.x[p.x.len() - 1];
    let rate = ProfileConfig::default().decay_widths / half;
    assert!(close(rate, 0.04472, 5e-6));
}

#[test]
fn iomega2_homoclinic_wrong_side() {
    let r = build(&io2(IOmega2Kind::Homoclinic, -1e-3), &ProfileConfig::default());
    match r {
        Err(LleError::Regime(m)) => assert!(m.contains("a2*mu > 0")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn dark_front_regime() {
    let cfg = ProfileConfig::default();
    let spec = |alpha: f64, mu: f64| {
        ProfileSpec::new(Family::IOmega2(IOmega2Kind::DarkFront), -1, CurveCase::Line, alpha, mu)
    };
    // a2 < 0 for alpha < 1 at beta = -1, so mu > 0 gives a2 mu < 0.
    let p = build(&spec(0.5, 1e-3), &cfg).unwrap();
    assert!(p.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    assert!(is_regime(build(&spec(1.5, 1e-3), &cfg)));
    assert!(is_regime(build(&spec(1.0, 1e-3), &cfg)));
    let plus = ProfileSpec::new(Family::IOmega2(IOmega2Kind::DarkFront), 1, CurveCase::Line, 3.0, 1e-3);
    assert!(is_regime(build(&plus, &cfg)));
}

#[test]
fn fold_equilibrium_minus_offset() {
    let p = build(&fold(O2IOmegaKind::EquilibriumMinus, 1e-3), &ProfileConfig::default()).unwrap();
    let off = (p.values[0] - p.equilibrium.psi()).norm();
    assert!(close(off, 0.02199, 1e-5), "{off}");
    let d = p.values[0] - p.equilibrium.psi();
    assert!(d.re < 0.0);
    assert!(p.values.iter().all(|v| *v == p.values[0]));
}

#[test]
fn fold_homoclinic_core_warns() {
    let p = build(&fold(O2IOmegaKind::HomoclinicToPeriodic, 1e-3).with_k(0.0), &ProfileConfig::default())
        .unwrap();
    let half = p.x[p.x.len() - 1];
    let delta = ProfileConfig::default().decay_widths / half / 2.0;
    assert!(close(delta, 0.2014, 1e-4), "{delta}");
    assert_eq!(p.warnings.len(), 1);
    assert!(p.warnings[0].contains("persist"));
    // 1 - 3 sech^2(0) = -2
    let mid = p.x.len() / 2;
    let core = (p.values[mid] - p.equilibrium.psi()).norm();
    let ends = (p.values[0] - p.equilibrium.psi()).norm();
    assert!(close(core / ends, 2.0, 1e-8));
}

#[test]
fn fold_homoclinic_center_branch_rejected() {
    let spec = fold(O2IOmegaKind::HomoclinicToPeriodic, 1e-3).with_k(1e-3).with_branch(-1);
    assert!(is_regime(build(&spec, &ProfileConfig::default())));
}

#[test]
fn second_kind_wavenumber() {
    let p = build(&fold(O2IOmegaKind::PeriodicSecondKind, 1e-3).with_eps(0.1), &ProfileConfig::default())
        .unwrap();
    assert!(close(p.k, 0.4027, 5e-5), "{}", p.k);
}

#[test]
fn first_kind_oscillation_amplitude() {
    let kk = 1e-4;
    let p = build(&fold(O2IOmegaKind::PeriodicFirstKind, 1e-3).with_k(kk), &ProfileConfig::default()).unwrap();
    assert!(close(p.k * p.period.unwrap(), 2.0 * std::f64::consts::PI, 1e-12));
    let re: Vec<f64> = p.values.iter().map(|v| v.re).collect();
    let spread = re.iter().cloned().fold(f64::MIN, f64::max) - re.iter().cloned().fold(f64::MAX, f64::min);
    // zeta = (1, i omega, 0, 0): psi_r oscillates as 2 sqrt(K) cos(kx).
    assert!(close(spread, 4.0 * kk.sqrt(), 1e-6), "{spread}");
}

#[test]
fn o2_homoclinic_dips_at_center() {
    let spec = ProfileSpec::new(Family::O2(O2Kind::Homoclinic), 1, CurveCase::FoldPlus, 1.8, 1e-3);
    let p = build(&spec, &ProfileConfig::default()).unwrap();
    let mid = p.x.len() / 2;
    let bg = p.background.unwrap();
    let dip = p.values[mid] - p.equilibrium.psi();
    let tail = bg - p.equilibrium.psi();
    assert!(close((dip / tail).re, -2.0, 1e-10));
    assert!((dip / tail).im.abs() < 1e-10);
    assert!(p.endpoint_deviation().unwrap() < 1e-8);
    assert!(is_regime(build(&spec.with_mu(-1e-3), &ProfileConfig::default())));
}

#[test]
fn o2_periodic_without_eps_is_center() {
    let spec = ProfileSpec::new(Family::O2(O2Kind::Periodic), 1, CurveCase::FoldPlus, 1.8, 1e-3).with_eps(0.0);
    let p = build(&spec, &ProfileConfig::default()).unwrap();
    let v0 = p.values[0];
    assert!(p.values.iter().all(|v| (v - v0).norm() < 1e-15));
    assert!((v0 - p.background.unwrap()).norm() < 1e-15);
}

#[test]
fn csv_and_sidecar() {
    let p = build(&io2(IOmega2Kind::Homoclinic, 1e-3), &ProfileConfig::default()).unwrap();
    let csv = p.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,psi_re,psi_im"));
    assert_eq!(csv.lines().count(), p.x.len() + 1);
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!(close(first[0], p.x[0], 1e-12 * p.x[0].abs()));
    let j = p.sidecar_json();
    assert_eq!(j["family"], "iomega2/homoclinic");
    assert_eq!(j["alpha_star"], 3.0);
    assert_eq!(j["truncation_order"], "O(mu^{3/2})");
}

#[test]
fn refined_level_contains_coarse_grid() {
    let spec = io2(IOmega2Kind::Homoclinic, 1e-3);
    let p0 = build(&spec, &ProfileConfig::default()).unwrap();
    let p1 = p0.at_level(1).unwrap();
    assert_eq!(p1.x.len(), 2 * p0.x.len() - 1);
    for j in (0..p0.x.len()).step_by(97) {
        assert!((p1.x[2 * j] - p0.x[j]).abs() < 1e-12);
        assert!((p1.values[2 * j] - p0.values[j]).norm() < 1e-14);
    }
}

#[test]
fn homoclinic_amplitude_slope() {
    for spec in [
        io2(IOmega2Kind::Homoclinic, 1.0),
        fold(O2IOmegaKind::HomoclinicToPeriodic, 1.0).with_k(0.0),
        ProfileSpec::new(Family::O2(O2Kind::Homoclinic), 1, CurveCase::FoldPlus, 1.8, 1.0),
    ] {
        let mus = [1e-2, 1e-3, 1e-4];
        let pts: Vec<(f64, f64)> = mus
            .iter()
            .map(|&m| {
                let p = build(&spec.with_mu(m), &ProfileConfig::default()).unwrap();
                let bg = p.background.unwrap();
                let sup = p.values.iter().map(|v| (v - bg).norm()).fold(0.0, f64::max);
                (m.ln(), sup.ln())
            })
            .collect();
        let slope = (pts[0].1 - pts[2].1) / (pts[0].0 - pts[2].0);
        assert!((slope - 0.5).abs() < 0.02, "{spec:?}: {slope}");
    }
}

fn all_specs() -> Vec<ProfileSpec> {
    vec![
        io2(IOmega2Kind::Periodic, 1e-3).with_k(0.01),
        io2(IOmega2Kind::Homoclinic, 1e-3),
        ProfileSpec::new(Family::IOmega2(IOmega2Kind::DarkFront), -1, CurveCase::Line, 0.5, 1e-3),
        fold(O2IOmegaKind::EquilibriumPlus, 1e-3),
        fold(O2IOmegaKind::PeriodicFirstKind, 1e-3).with_k(1e-4),
        fold(O2IOmegaKind::PeriodicFirstKind, 1e-3).with_k(1e-4).with_phase_pi(true),
        fold(O2IOmegaKind::PeriodicSecondKind, 1e-3).with_eps(0.2),
        fold(O2IOmegaKind::HomoclinicToPeriodic, 1e-3).with_k(2e-4),
        ProfileSpec::new(Family::O2(O2Kind::Periodic), 1, CurveCase::FoldPlus, 1.8, 1e-3).with_eps(0.3),
        ProfileSpec::new(Family::O2(O2Kind::Homoclinic), 1, CurveCase::FoldPlus, 1.8, 1e-3),
    ]
}

#[test]
fn grids_are_uniform_and_increasing() {
    for cfg in [ProfileConfig::default(), ProfileConfig::corrected()] {
        for spec in all_specs() {
            let p = build(&spec, &cfg).unwrap();
            let h = p.step();
            for w in p.x.windows(2) {
                assert!(w[1] > w[0]);
                assert!(((w[1] - w[0]) - h).abs() <= 1e-14 * p.x[p.x.len() - 1].abs().max(1.0));
            }
        }
    }
}

#[test]
fn profiles_are_reversible() {
    for cfg in [ProfileConfig::default(), ProfileConfig::corrected()] {
        for spec in all_specs() {
            let p = build(&spec, &cfg).unwrap();
            assert!(p.reversibility_defect() < 1e-12, "{spec:?} {}", p.reversibility_defect());
        }
    }
}

#[test]
fn periodic_profiles_repeat() {
    for cfg in [ProfileConfig::default(), ProfileConfig::corrected()] {
        for spec in all_specs().into_iter().filter(|s| s.family.is_periodic()) {
            let p = build(&spec, &cfg).unwrap();
            let shift = p.x.len() / cfg.periods;
            let d = (0..p.x.len() - shift)
                .map(|j| (p.values[j + shift] - p.values[j]).norm())
                .fold(0.0, f64::max);
            assert!(d < 1e-12, "{spec:?} {d}");
        }
    }
}

#[test]
fn localized_profiles_reach_background() {
    for cfg in [ProfileConfig::default(), ProfileConfig::corrected()] {
        for spec in [
            io2(IOmega2Kind::Homoclinic, 1e-3),
            fold(O2IOmegaKind::HomoclinicToPeriodic, 1e-3).with_k(0.0),
            ProfileSpec::new(Family::O2(O2Kind::Homoclinic), 1, CurveCase::FoldPlus, 1.8, 1e-3),
        ] {
            let p = build(&spec, &cfg).unwrap();
            assert!(p.endpoint_deviation().unwrap() < 1e-8, "{spec:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homoclinic_profiles_reversible_and_settle(alpha in 2.1f64..6.0, lmu in -4.0f64..-2.0) {
        let mu = 10f64.powf(lmu);
        let spec = ProfileSpec::new(Family::IOmega2(IOmega2Kind::Homoclinic), 1, CurveCase::Line, alpha, mu);
        let p = build(&spec, &ProfileConfig::default()).unwrap();
        prop_assert!(p.reversibility_defect() < 1e-12);
        prop_assert!(p.endpoint_deviation().unwrap() < 1e-8);
    }

    #[test]
    fn periodic_first_kind_repeats(alpha in 2.1f64..6.0, kk in 0.0f64..5e-4, pi in any::<bool>()) {
        let spec = ProfileSpec::new(Family::O2IOmega(O2IOmegaKind::PeriodicFirstKind), 1, CurveCase::FoldPlus, alpha, 1e-3)
            .with_k(kk).with_phase_pi(pi);
        if let Ok(p) = build(&spec, &ProfileConfig::default()) {
            let shift = p.x.len() / 16;
            let d = (0..p.x.len() - shift).map(|j| (p.values[j + shift] - p.values[j]).norm()).fold(0.0, f64::max);
            prop_assert!(d < 1e-12);
            prop_assert!(p.reversibility_defect() < 1e-12);
        }
    }
}

#[test]
fn corrected_fold_equilibria_match_exact_roots() {
    let cases = [
        (Family::O2IOmega(O2IOmegaKind::EquilibriumPlus), 3.0, 1.0),
        (Family::O2IOmega(O2IOmegaKind::EquilibriumMinus), 3.0, 1.0),
        (Family::O2(O2Kind::EquilibriumMinus), 1.8, 1.0),
    ];
    for (fam, alpha, side) in cases {
        let err = |mu: f64| {
            let p = build(&ProfileSpec::new(fam, 1, CurveCase::FoldPlus, alpha, side * mu), &ProfileConfig::corrected())
                .unwrap();
            let bg = p.background.unwrap();
            solve_equilibria(&p.params).iter().map(|e| (e.psi() - bg).norm()).fold(f64::INFINITY, f64::min)
        };
        let slope = (err(1e-3) / err(1e-5)).log10() / 2.0;
        assert!(slope > 1.4, "{fam}: slope {slope}");
    }
}

#[test]
fn corrected_second_kind_frequency_tracks_exact_center() {
    use crate::linearization::spatial_spectrum;
    let err = |order: ProfileConfig, mu: f64| {
        let spec = ProfileSpec::new(Family::O2(O2Kind::Periodic), 1, CurveCase::FoldPlus, 1.8, mu).with_eps(0.0);
        let p = build(&spec, &order).unwrap();
        let exact = solve_equilibria(&p.params)
            .iter()
            .filter_map(|e| spatial_spectrum(&p.params, e).eigenvalues.iter().find(|v| v.re == 0.0 && v.im > 0.0).map(|v| v.im))
            .next()
            .unwrap();
        (p.k - exact).abs() / exact
    };
    for mu in [1e-4, 1e-5, 1e-6] {
        assert!(err(ProfileConfig::corrected(), mu) < err(ProfileConfig::default(), mu) / 3.0, "mu {mu}");
    }
    let slope = (err(ProfileConfig::corrected(), 1e-4) / err(ProfileConfig::corrected(), 1e-6)).log10() / 2.0;
    assert!(slope > 0.9, "slope {slope}");
}
