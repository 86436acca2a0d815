//! Dispatches a job to the core library and assembles the report document.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Map, Value};

use profinity_core::cohomology::{
    cohomology, five_term_check, h1_via_derivations, homology, uct_check, UctVerdict,
};
use profinity_core::gmodules::{coinduce, evaluation_map, induce, pontryagin_dual};
use profinity_core::limits::caps;
use profinity_core::profinite::{
    cd_estimate, dualizing_module_estimate, limit_cohomology_compact, limit_cohomology_discrete, limit_homology,
    limit_homology_compact, DualityClass, LimitReport, ModuleTower, QuotientTower,
};

use crate::job::{build_group, build_module, build_subgroup, build_tower_desc, Coefficients, JobSpec, Task};
use crate::report::{group_text, group_value, limit_value, map_value, matrix_value, model_name, module_value, verdict_value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Job echo, result, provenance and status of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub document: Value,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.document["status"] == "ok"
    }

    pub fn task(&self) -> &str {
        self.document["job"]["task"].as_str().unwrap_or("?")
    }

    pub fn result(&self) -> &Value {
        &self.document["result"]
    }

    pub fn error(&self) -> Option<&str> {
        self.document["error"].as_str()
    }
}

fn provenance(job: &JobSpec) -> Value {
    let c = caps();
    let mut p = Map::new();
    p.insert("version".into(), json!(VERSION));
    p.insert("order_cap".into(), json!(c.order));
    p.insert("size_cap".into(), json!(c.cochain));
    let echo = job.to_json();
    for key in ["degree", "window", "degree_cap", "coefficient_cap", "max_degree"] {
        if let Some(v) = echo.get(key) {
            p.insert(key.into(), v.clone());
        }
    }
    if let Some(levels) = echo.get("tower").and_then(|t| t.get("levels")) {
        p.insert("tower_depth".into(), levels.clone());
    }
    Value::Object(p)
}

/// Runs a validated job; computational failures become an error report rather than a panic.
pub fn run_job(job: &JobSpec) -> Report {
    let (status, result, error) = match compute(&job.task) {
        Ok(v) => ("ok", v, Value::Null),
        Err(e) => ("error", Value::Null, json!(format!("{}: {e:#}", job.task.name()))),
    };
    let mut doc = Map::new();
    doc.insert("job".into(), job.to_json());
    doc.insert("status".into(), json!(status));
    doc.insert("result".into(), result);
    if !error.is_null() {
        doc.insert("error".into(), error);
    }
    doc.insert("provenance".into(), provenance(job));
    Report { document: Value::Object(doc) }
}

fn err(e: String) -> anyhow::Error {
    anyhow!(e)
}

fn compute(task: &Task) -> Result<Value> {
    match task {
        Task::Cohomology { group, module, degree } => {
            let g = Arc::new(build_group(group).map_err(err)?);
            let m = build_module(&g, module).map_err(err)?;
            let h = cohomology(&g, &m, *degree).context("cohomology")?;
            Ok(json!({
                "group": g.name(),
                "degree": degree,
                "value": group_value(&h.value),
                "model": model_name(h.model),
                "representatives": h.representatives,
            }))
        }
        Task::Homology { group, module, degree } => {
            let g = Arc::new(build_group(group).map_err(err)?);
            let m = build_module(&g, module).map_err(err)?;
            let h = homology(&g, &m, *degree).context("cohomology")?;
            Ok(json!({"group": g.name(), "degree": degree, "value": group_value(&h), "method": "dual of H^n(G, M*)"}))
        }
        Task::H1 { group, module } => {
            let g = Arc::new(build_group(group).map_err(err)?);
            let m = build_module(&g, module).map_err(err)?;
            let r = h1_via_derivations(&g, &m).context("cohomology")?;
            Ok(json!({
                "group": g.name(),
                "value": group_value(&r.value.value),
                "derivations": group_value(&r.der),
                "principal_derivations": group_value(&r.pder),
                "derivation_basis": r.der_basis,
            }))
        }
        Task::Dual { group, module } => {
            let g = Arc::new(build_group(group).map_err(err)?);
            let m = build_module(&g, module).map_err(err)?;
            let d = pontryagin_dual(&m);
            Ok(json!({
                "group": g.name(),
                "module": module_value(&m),
                "dual": module_value(&d),
                "evaluation_isomorphism": evaluation_map(&m).is_isomorphism(),
            }))
        }
        Task::LimitCohomology { tower, coefficients, degree, window } => {
            let t = build_tower_desc(tower).map_err(err)?;
            let r = match coefficients {
                Coefficients::Discrete { level, module } => {
                    let a = build_module(t.level(*level), module).map_err(err)?;
                    limit_cohomology_discrete(&t, &a, *degree, *window)
                }
                other => limit_cohomology_compact(&t, &module_tower(&t, other)?, *degree, *window),
            };
            Ok(limit_result(&t, &r.context("profinite")?))
        }
        Task::LimitHomology { tower, coefficients, degree, window } => {
            let t = build_tower_desc(tower).map_err(err)?;
            let r = match coefficients {
                Coefficients::Discrete { level, module } => {
                    let a = build_module(t.level(*level), module).map_err(err)?;
                    limit_homology(&t, &a, *degree, *window)
                }
                other => limit_homology_compact(&t, &module_tower(&t, other)?, *degree, *window),
            };
            Ok(limit_result(&t, &r.context("profinite")?))
        }
        Task::Cd { tower, degree_cap, coefficient_cap, window } => {
            let t = build_tower_desc(tower).map_err(err)?;
            let r = cd_estimate(&t, *degree_cap, *coefficient_cap, *window).context("profinite")?;
            let evidence: Vec<Value> = r
                .evidence
                .iter()
                .map(|e| json!({"coefficients": e.coefficients, "degree": e.degree, "verdict": verdict_value(&e.verdict)}))
                .collect();
            Ok(json!({
                "tower": t.label(),
                "estimate": r.estimate,
                "inconclusive": r.inconclusive,
                "evidence": evidence,
            }))
        }
        Task::DualizingModule { tower, degree, coefficient_cap, window } => {
            let t = build_tower_desc(tower).map_err(err)?;
            let r = dualizing_module_estimate(&t, *degree, *coefficient_cap, *window).context("profinite")?;
            let levels: Vec<Value> = r
                .levels
                .iter()
                .map(|l| {
                    json!({
                        "level": l.level,
                        "group": t.level(l.level).name(),
                        "coefficient_order": l.coefficient_order,
                        "value": group_value(&l.value),
                        "action_trivial": l.action_trivial,
                    })
                })
                .collect();
            let class = match &r.class {
                DualityClass::OrientablePoincare => json!({"kind": "orientable"}),
                DualityClass::NonOrientablePoincare => json!({"kind": "non-orientable"}),
                DualityClass::NotPoincare => json!({"kind": "not-poincare"}),
                DualityClass::Inconclusive(why) => json!({"kind": "inconclusive", "reason": why}),
            };
            Ok(json!({
                "tower": t.label(),
                "verdict": r.verdict,
                "class": class,
                "levels": levels,
                "transitions": r.transitions.iter().map(map_value).collect::<Vec<_>>(),
            }))
        }
        Task::FiveTerm { group, subgroup, module } => {
            let g = Arc::new(build_group(group).map_err(err)?);
            let nsub = build_subgroup(&g, subgroup).map_err(err)?;
            let a = build_module(&g, module).map_err(err)?;
            let r = five_term_check(&nsub, &a).context("cohomology")?;
            Ok(json!({
                "group": g.name(),
                "normal_subgroup": nsub.members,
                "verdict": if r.is_exact() { "exact" } else { "not exact" },
                "groups": [
                    {"name": "H^1(G/N, A^N)", "value": group_value(&r.h1_quotient)},
                    {"name": "H^1(G, A)", "value": group_value(&r.h1_group)},
                    {"name": "H^1(N, A)^(G/N)", "value": group_value(&r.h1_normal_invariant)},
                    {"name": "H^2(G/N, A^N)", "value": group_value(&r.h2_quotient)},
                    {"name": "H^2(G, A)", "value": group_value(&r.h2_group)},
                ],
                "checks": {
                    "inflation_injective": r.inflation_injective,
                    "exact_at_h1_group": r.exact_at_h1_group,
                    "exact_at_invariants": r.exact_at_invariants,
                    "exact_at_h2_quotient": r.exact_at_h2_quotient,
                },
                "transgression": matrix_value(&r.transgression.matrix),
            }))
        }
        Task::ShapiroCheck { group, subgroup, module, max_degree } => {
            let g = Arc::new(build_group(group).map_err(err)?);
            let sub = build_subgroup(&g, subgroup).map_err(err)?;
            let a = build_module(&sub.group, module).map_err(err)?;
            let co = coinduce(&sub, &a).context("gmodules")?;
            let ind = induce(&sub, &a).context("gmodules")?;
            let mut rows = Vec::new();
            let mut holds = true;
            for i in 0..=*max_degree {
                let hg = cohomology(&g, &co, i).context("cohomology")?.value;
                let hh = cohomology(&sub.group, &a, i).context("cohomology")?.value;
                let lg = homology(&g, &ind, i).context("cohomology")?;
                let lh = homology(&sub.group, &a, i).context("cohomology")?;
                let agree = hg == hh && lg == lh;
                holds &= agree;
                rows.push(json!({
                    "degree": i,
                    "cohomology_coinduced": group_value(&hg),
                    "cohomology_subgroup": group_value(&hh),
                    "homology_induced": group_value(&lg),
                    "homology_subgroup": group_value(&lh),
                    "agree": agree,
                }));
            }
            Ok(json!({
                "group": g.name(),
                "subgroup": sub.members,
                "index": sub.index(),
                "verdict": if holds { "holds" } else { "fails" },
                "degrees": rows,
            }))
        }
        Task::UctCheck { group, module, degree, coefficient_cap, window } => {
            let g = Arc::new(build_group(group).map_err(err)?);
            let a = build_module(&g, module).map_err(err)?;
            let r = uct_check(&g, &a, *degree, *coefficient_cap, *window).context("cohomology")?;
            let (verdict, reason) = match &r.verdict {
                UctVerdict::Holds => ("holds", Value::Null),
                UctVerdict::Fails(why) => ("fails", json!(why)),
                UctVerdict::Inconclusive(why) => ("inconclusive", json!(why)),
            };
            let opt = |x: &Option<_>| x.as_ref().map_or(Value::Null, group_value);
            Ok(json!({
                "group": g.name(),
                "verdict": verdict,
                "reason": reason,
                "integral_homology": r.integral.iter().map(opt).collect::<Vec<_>>(),
                "cohomology": group_value(&r.cohomology),
                "homology": group_value(&r.homology),
                "hom": opt(&r.hom),
                "ext": opt(&r.ext),
                "tensor": opt(&r.tensor),
                "tor": opt(&r.tor),
            }))
        }
    }
}

fn module_tower(t: &QuotientTower, c: &Coefficients) -> Result<ModuleTower> {
    let r = match c {
        Coefficients::TrivialCyclic(orders) => ModuleTower::trivial_cyclic(t, orders),
        Coefficients::GroupRings { levels, orders } => ModuleTower::group_rings(t, levels, orders),
        Coefficients::Discrete { .. } => bail!("discrete coefficients do not form a tower"),
    };
    r.context("profinite")
}

fn limit_result(t: &QuotientTower, r: &LimitReport) -> Value {
    let mut v = limit_value(r);
    v["tower"] = json!(t.label());
    v["summary"] = json!(match r.verdict.stabilized() {
        Some(g) => group_text(g),
        None => "no stable value".to_string(),
    });
    v
}
