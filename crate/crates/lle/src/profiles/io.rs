use serde_json::{json, Value};

use crate::fmt::g15;

use super::{SolutionProfile, Source};

pub(super) fn to_csv(p: &SolutionProfile) -> String {
    let mut out = String::with_capacity(p.x.len() * 64);
    out.push_str("x,psi_re,psi_im\n");
    for (x, v) in p.x.iter().zip(&p.values) {
        out.push_str(&format!("{},{},{}\n", g15(*x), g15(v.re), g15(v.im)));
    }
    out
}

pub(super) fn sidecar(p: &SolutionProfile) -> Value {
    let mut v = json!({
        "family": p.tag(),
        "mu": p.mu,
        "k": p.k,
        "alpha": p.params.alpha,
        "F": p.params.f,
        "beta": p.params.beta,
        "amplitude": p.amplitude,
        "truncation_order": p.truncation_order,
        "periodic": p.periodic,
        "period": p.period,
        "order": p.config.order,
        "n": p.x.len(),
        "warnings": p.warnings,
        "initial_state": p.initial_state,
    });
    if let Source::Family(spec) = p.source {
        v["alpha_star"] = json!(spec.alpha_star);
        v["case"] = json!(spec.case.as_str());
        v["K"] = json!(spec.aux.k_param);
        v["eps"] = json!(spec.aux.eps);
        v["branch"] = json!(spec.aux.branch);
    }
    if let Some(c) = &p.coefficients {
        let m: serde_json::Map<String, Value> =
            c.named().into_iter().map(|(k, x)| (k.to_string(), json!(x))).collect();
        v["coefficients"] = Value::Object(m);
    }
    v
}
