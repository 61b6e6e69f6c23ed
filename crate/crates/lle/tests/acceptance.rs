//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use lle::linearization::{bifurcation_curves, spatial_spectrum, BifurcationClass, ClassKind};
use lle::model::{classify_region, critical_points, curve_f2_derivative, solve_equilibria, CurveCase, Params, SQRT3};
use lle::normalform::{coeffs_closed, coeffs_numeric_on_curve, in_excluded_band, printed_signs, validity, Coefficients};
use lle::verify::suite::{default_cases, oracle_check, refine_check, residual_check, reversibility_checks, temporal_checks, DEFAULT_MUS};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

const COMBOS: [(ClassKind, i32, CurveCase); 8] = [
    (ClassKind::IOmega2, 1, CurveCase::Line),
    (ClassKind::IOmega2, -1, CurveCase::Line),
    (ClassKind::O2IOmega, 1, CurveCase::FoldPlus),
    (ClassKind::O2IOmega, -1, CurveCase::FoldPlus),
    (ClassKind::O2IOmega, -1, CurveCase::FoldMinus),
    (ClassKind::O2, 1, CurveCase::FoldPlus),
    (ClassKind::O2, 1, CurveCase::FoldMinus),
    (ClassKind::O2, -1, CurveCase::FoldPlus),
];

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// 200 valid alpha* for a combination, outside the degenerate bands.
fn grid(kind: ClassKind, beta: i32, case: CurveCase) -> Vec<f64> {
    let (lo, hi) = match (kind, beta) {
        (ClassKind::IOmega2, 1) => (2.05, 6.0),
        (ClassKind::IOmega2, _) => (0.2, 1.95),
        _ => (1.75, 6.0),
    };
    let mut n = 200;
    loop {
        let pts: Vec<f64> = linspace(lo, hi, n)
            .into_iter()
            .filter(|&a| validity(kind, beta, case, a).is_ok() && !in_excluded_band(kind, a) && a != 1.0)
            .collect();
        if pts.len() >= 200 {
            let step = pts.len() as f64 / 200.0;
            return (0..200).map(|i| pts[(i as f64 * step) as usize]).collect();
        }
        n *= 2;
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / a.abs().max(b.abs())
    }
}

fn criterion_1() -> Outcome {
    let mut worst = (0.0, String::new());
    let mut c1_worst: f64 = 0.0;
    for (kind, beta, case) in COMBOS {
        for a in grid(kind, beta, case) {
            let (closed, numeric) = match (coeffs_closed(kind, beta, case, a), coeffs_numeric_on_curve(kind, beta, case, a)) {
                (Ok(c), Ok(n)) => (c.coeffs, n.coeffs),
                (Err(e), _) | (_, Err(e)) => return Outcome::new(false, format!("{kind} {beta:+} {case} alpha*={a}: {e}")),
            };
            for ((name, c), (_, n)) in closed.named().into_iter().zip(numeric.named()) {
                let r = rel(c, n);
                if r > worst.0 {
                    worst = (r, format!("{kind} {beta:+} {case} {name} alpha*={a:.4}"));
                }
            }
            if let Coefficients::O2IOmega { a1, c1, .. } = numeric {
                c1_worst = c1_worst.max((c1 + 2.0 * a1).abs() / a1.abs().max(1.0));
            }
        }
    }
    let spot = match coeffs_numeric_on_curve(ClassKind::IOmega2, 1, CurveCase::Line, 3.0).map(|c| c.coeffs) {
        Ok(Coefficients::IOmega2 { a2, b2 }) => rel(a2, 2.0).max(rel(b2, -490.0 / 9.0)),
        _ => f64::INFINITY,
    };
    Outcome::new(
        worst.0 <= 1e-8 && c1_worst <= 1e-12 && spot <= 1e-8,
        format!(
            "8 combinations x 200 alpha*; max rel diff {:.2e} ({}); (a2, b2) at alpha*=3 rel {spot:.1e}; max |c1 + 2 a1| {c1_worst:.1e}",
            worst.0, worst.1
        ),
    )
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_2() -> Outcome {
    let mut violations = vec![];
    let mut checked = 0;
    for (kind, beta, case) in COMBOS {
        let signs = printed_signs(kind, beta, case);
        for a in grid(kind, beta, case) {
            let coeffs = match coeffs_numeric_on_curve(kind, beta, case, a) {
                Ok(c) => c.coeffs,
                Err(e) => {
                    violations.push(format!("{kind} {beta:+} {case} alpha*={a}: {e}"));
                    continue;
                }
            };
            for ((name, v), s) in coeffs.named().into_iter().zip(&signs) {
                let product = match (*s, name) {
                    (0, "a2") => v * (a - 1.0),
                    (0, _) => v * (41.0 - 30.0 * a),
                    (s, _) => v * s as f64,
                };
                checked += 1;
                if !(product > 0.0) {
                    violations.push(format!("{kind} {beta:+} {case} {name}={v:.3e} at alpha*={a:.4}"));
                }
            }
        }
    }
    let coeff = |a: f64, which: usize| match coeffs_closed(ClassKind::IOmega2, -1, CurveCase::Line, a).map(|c| c.coeffs) {
        Ok(Coefficients::IOmega2 { a2, b2 }) => [a2, b2][which],
        _ => f64::NAN,
    };
    let z_a2 = bisect(|a| coeff(a, 0), 0.5, 1.5);
    let z_b2 = bisect(|a| coeff(a, 1), 1.2, 1.5);
    let err = (z_a2 - 1.0).abs().max((z_b2 - 41.0 / 30.0).abs());
    Outcome::new(
        violations.is_empty() && err <= 1e-10,
        format!(
            "{checked} signed values, {} violations{}; zeros of a2, b2 (beta=-1) at {z_a2:.12}, {z_b2:.12} (err {err:.1e})",
            violations.len(),
            violations.first().map(|v| format!(" e.g. {v}")).unwrap_or_default()
        ),
    )
}

fn criterion_3() -> Outcome {
    let (p, e) = CurveCase::FoldPlus.bifurcation_point(1, 2.0).expect("O4 point");
    let o4 = spatial_spectrum(&p, &e);
    let zero = o4.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (p, e) = CurveCase::Line.bifurcation_point(1, 3.0).expect("line point");
    let io = spatial_spectrum(&p, &e);
    let mut omega_err: f64 = 0.0;
    for z in io.eigenvalues {
        omega_err = omega_err.max(z.re.abs()).max((z.im.abs() - 1.0).abs());
    }
    let omega_class = matches!(io.class, BifurcationClass::IOmega2 { omega } if (omega - 1.0).abs() <= 1e-10);

    // Class changes along the sweep happen at alpha = 2, to within the grid step.
    let alphas = linspace(1.75, 5.0, 500);
    let h = alphas[1] - alphas[0];
    let mut wrong = vec![];
    for &a in &alphas {
        let has = |beta: i32, name: &str| bifurcation_curves(beta, a).iter().any(|c| c.class.name() == name);
        let away = (a - 2.0).abs() > h;
        if away && has(1, "IOmega2") != (a > 2.0) {
            wrong.push(format!("beta=+1 IOmega2 at alpha={a:.4}"));
        }
        if away && has(-1, "O2") != (a > 2.0) {
            wrong.push(format!("beta=-1 O2 at alpha={a:.4}"));
        }
        if away && a > SQRT3 + 0.02 {
            let fold_plus = bifurcation_curves(1, a).into_iter().find(|c| c.case == CurveCase::FoldPlus);
            let expect = if a < 2.0 { "O2" } else { "O2IOmega" };
            if fold_plus.map(|c| c.class.name()) != Some(expect) {
                wrong.push(format!("beta=+1 fold-plus not {expect} at alpha={a:.4}"));
            }
        }
    }
    Outcome::new(
        zero <= 1e-8 && o4.class == BifurcationClass::O4 && omega_err <= 1e-10 && omega_class && wrong.is_empty(),
        format!(
            "O4 max |X| {zero:.1e}; (alpha=3, F2=5) max |Re X|, ||Im X|-1| {omega_err:.1e}; {} misplaced transitions{}",
            wrong.len(),
            wrong.first().map(|w| format!(" e.g. {w}")).unwrap_or_default()
        ),
    )
}

fn criterion_4() -> Outcome {
    let tol = 1e-6;
    let mut rng = StdRng::seed_from_u64(4);
    let (mut n, mut bad) = (0, 0);
    while n < 10_000 {
        let alpha = rng.gen_range(0.0..4.0);
        let f2 = rng.gen_range(1e-3..6.0);
        let near = critical_points(alpha).map_or(false, |cp| (f2 - cp.f2_plus).abs() <= tol || (f2 - cp.f2_minus).abs() <= tol);
        if near {
            continue;
        }
        n += 1;
        let tag = classify_region(alpha, f2, tol);
        let count = solve_equilibria(&Params::from_f2(1, alpha, f2).expect("valid")).len();
        if count != tag.expected_count() {
            bad += 1;
        }
    }
    let mut fold: f64 = 0.0;
    for a in linspace(SQRT3 + 1e-3, 6.0, 500) {
        let cp = critical_points(a).expect("alpha > sqrt3");
        fold = fold.max(curve_f2_derivative(a, cp.rho_plus).abs()).max(curve_f2_derivative(a, cp.rho_minus).abs());
    }
    Outcome::new(
        bad == 0 && fold <= 1e-10,
        format!("{n} random samples, {bad} count mismatches; max |dF2/drho| at rho+- {fold:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut first_integral: f64 = 0.0;
    let mut failed = vec![];
    let mut n = 0;
    for case in default_cases().iter().filter(|c| c.spec.family.has_exact_truncated_solution()) {
        for mu in [1e-2, 1e-3, 1e-4] {
            let r = oracle_check(case, mu, None);
            n += 1;
            let d = r.detail["max_defect"].as_f64().unwrap_or(f64::INFINITY);
            worst = worst.max(d);
            if let Some(fi) = r.detail["first_integral_defect"].as_f64() {
                first_integral = first_integral.max(fi);
            }
            if !r.pass || d > 1e-10 {
                failed.push(format!("{} mu={mu}", r.case));
            }
        }
    }
    Outcome::new(
        failed.is_empty() && first_integral == 0.0,
        format!(
            "{n} closed-form solutions; max defect {worst:.1e}; max |d|C|^2/dx| {first_integral:.1e}{}",
            failed.first().map(|f| format!("; failing {f}")).unwrap_or_default()
        ),
    )
}

fn slope_of(detail: &serde_json::Value, path: &[&str]) -> f64 {
    let mut v = detail;
    for p in path {
        v = &v[*p];
    }
    v.as_f64().unwrap_or(f64::NAN)
}

fn criterion_6() -> Outcome {
    let mut slopes = vec![];
    let mut failed = vec![];
    for case in default_cases() {
        if case.pinned_mus.is_some() {
            continue;
        }
        let r = residual_check(&case, &DEFAULT_MUS);
        let s = slope_of(&r.detail, &["corrected", "fitted_slope"]);
        slopes.push(s);
        if !r.pass {
            failed.push(format!("{} (slope {s:.3})", r.case));
        }
    }
    for case in default_cases().iter().filter(|c| c.pinned_mus.is_some()) {
        let r = residual_check(case, case.pinned_mus.unwrap());
        println!(
            "INFO criterion 6 near cusp: {} over mu in [1e-6, 1e-4]: slope {:.3} ({})",
            r.case,
            slope_of(&r.detail, &["corrected", "fitted_slope"]),
            if r.pass { "pass" } else { "fail" }
        );
    }
    let min = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Outcome::new(
        failed.is_empty() && !slopes.is_empty(),
        format!(
            "{} families over mu in [1e-4, 1e-2]; corrected slopes {min:.3}..{max:.3}{}",
            slopes.len(),
            failed.first().map(|f| format!("; failing {f}")).unwrap_or_default()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut failed = vec![];
    let mut lines = vec![];
    for case in default_cases().iter().filter(|c| c.spec.family.is_periodic()) {
        let mus = case.pinned_mus.unwrap_or(&DEFAULT_MUS);
        let r = refine_check(case, mus);
        let it = r.detail["orbit"]["newton_iterations"].as_u64().unwrap_or(u64::MAX);
        let defect = slope_of(&r.detail, &["orbit", "defect"]);
        let slope = slope_of(&r.detail, &["distance_slope"]);
        lines.push(format!("{}: {it} steps, defect {defect:.1e}, slope {slope:.2}", r.case));
        if !r.pass {
            failed.push(r.case.clone());
        }
    }
    for l in &lines {
        println!("INFO criterion 7 {l}");
    }
    Outcome::new(
        failed.is_empty() && !lines.is_empty(),
        format!(
            "{} periodic guesses refined at mu=1e-3{}",
            lines.len(),
            failed.first().map(|f| format!("; failing {f}")).unwrap_or_default()
        ),
    )
}

fn summarize(checks: Vec<lle::verify::suite::CheckResult>) -> Outcome {
    let pass = checks.iter().all(|c| c.pass);
    let detail: Vec<String> = checks.iter().map(|c| format!("{} [{}] {}", c.check, c.case, c.detail)).collect();
    Outcome::new(pass, detail.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("coefficient cross-check", criterion_1),
        ("coefficient sign tables", criterion_2),
        ("spectrum classification", criterion_3),
        ("equilibrium region map", criterion_4),
        ("truncated-system oracles", criterion_5),
        ("residual scaling", criterion_6),
        ("reversible shooting", criterion_7),
        ("reversibility identities", || summarize(reversibility_checks())),
        ("temporal stability of constants", || summarize(temporal_checks())),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failures += 1;
        }
        println!("{} criterion {} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if failures > 0 {
        println!("{failures} of 9 criteria failed");
        std::process::exit(1);
    }
}
