//! JSON encodings of core values.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use profinity_core::cohomology::CochainModel;
use profinity_core::exact_algebra::{FgAbelianGroup, IntMatrix, SubquotientMap};
use profinity_core::gmodules::{GModule, ModMatrix};
use profinity_core::profinite::{LimitDirection, LimitReport, LimitVerdict};

/// Canonical text: `0`, `Z/2 + Z/4`, `Z/2 + Z^2`.
pub fn group_text(g: &FgAbelianGroup) -> String {
    if g.is_trivial() {
        return "0".into();
    }
    let mut parts: Vec<String> = g.torsion.iter().map(|d| format!("Z/{d}")).collect();
    match g.free_rank {
        0 => {}
        1 => parts.push("Z".into()),
        r => parts.push(format!("Z^{r}")),
    }
    parts.join(" + ")
}

fn big(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

pub fn group_value(g: &FgAbelianGroup) -> Value {
    let torsion: Vec<Value> = g.torsion.iter().map(|d| big(&BigInt::from(d.clone()))).collect();
    json!({"text": group_text(g), "free_rank": g.free_rank, "torsion": torsion})
}

pub fn matrix_value(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|row| Value::Array(row.iter().map(big).collect())).collect())
}

pub fn map_value(f: &SubquotientMap) -> Value {
    json!({
        "source": group_text(&f.source),
        "target": group_text(&f.target),
        "matrix": matrix_value(&f.matrix),
        "injective": f.is_injective(),
        "surjective": f.is_surjective(),
    })
}

pub fn mod_matrix_value(m: &ModMatrix) -> Value {
    json!(m.to_rows())
}

pub fn module_value(m: &GModule) -> Value {
    let actions: Vec<Value> = m.generator_actions().iter().map(mod_matrix_value).collect();
    json!({"moduli": m.moduli(), "actions": actions, "underlying": group_text(&m.underlying())})
}

pub fn model_name(m: CochainModel) -> &'static str {
    match m {
        CochainModel::Bar => "bar",
        CochainModel::Periodic => "periodic",
    }
}

pub fn verdict_value(v: &LimitVerdict) -> Value {
    match v {
        LimitVerdict::Stabilized(g) => json!({"kind": "stabilized", "value": group_value(g)}),
        LimitVerdict::Tower { values, surjective } => json!({
            "kind": "tower",
            "values": values.iter().map(group_value).collect::<Vec<_>>(),
            "surjective": surjective,
        }),
        LimitVerdict::Inconclusive(why) => json!({"kind": "inconclusive", "reason": why}),
    }
}

pub fn verdict_text(v: &LimitVerdict) -> String {
    match v {
        LimitVerdict::Stabilized(g) => format!("stabilized at {}", group_text(g)),
        LimitVerdict::Tower { values, .. } => {
            format!("tower {}", values.iter().map(group_text).collect::<Vec<_>>().join(" <- "))
        }
        LimitVerdict::Inconclusive(why) => format!("inconclusive ({why})"),
    }
}

pub fn limit_value(r: &LimitReport) -> Value {
    let direction = match r.direction {
        LimitDirection::Direct => "direct",
        LimitDirection::Inverse => "inverse",
    };
    let entries: Vec<Value> =
        r.labels.iter().zip(&r.values).map(|(l, v)| json!({"label": l, "value": group_value(v)})).collect();
    let transitions: Vec<Value> = r
        .transitions
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let (from, to) = match r.direction {
                LimitDirection::Direct => (i, i + 1),
                LimitDirection::Inverse => (i + 1, i),
            };
            let mut v = map_value(f);
            v["from"] = json!(from);
            v["to"] = json!(to);
            v
        })
        .collect();
    let stable: Vec<Value> = r.stable_images.iter().map(|s| s.as_ref().map_or(Value::Null, group_value)).collect();
    json!({
        "direction": direction,
        "entries": entries,
        "transitions": transitions,
        "stable_images": stable,
        "verdict": verdict_value(&r.verdict),
        "notes": r.notes,
        "parameters": {
            "degree": r.parameters.degree,
            "window": r.parameters.window,
            "tower_depth": r.parameters.tower_depth,
            "first_level": r.parameters.first_level,
            "model": model_name(r.parameters.model),
        },
    })
}
