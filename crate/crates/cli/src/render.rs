//! Table and JSON renderings of a report.

use std::fmt::Write;

use serde_json::{Map, Value};

use crate::job::Format;
use crate::run::Report;

/// Rebuilds every object with keys in sorted order.
pub fn canonical(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let mut out = Map::new();
            for k in keys {
                out.insert(k.clone(), canonical(&m[k]));
            }
            Value::Object(out)
        }
        Value::Array(xs) => Value::Array(xs.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonical(v)).expect("reports serialize");
    s.push('\n');
    s
}

pub fn render_report(r: &Report, format: Format) -> String {
    match format {
        Format::Json => to_json_text(&r.document),
        Format::Table => render_table(r),
    }
}

fn text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Object(o) if o.contains_key("text") => text(&o["text"]),
        other => other.to_string(),
    }
}

fn yes(v: &Value) -> &'static str {
    if v.as_bool() == Some(true) {
        "yes"
    } else {
        "no"
    }
}

struct Table {
    out: String,
}

impl Table {
    fn row(&mut self, key: &str, value: impl AsRef<str>) {
        let _ = writeln!(self.out, "{key:<14}{}", value.as_ref());
    }

    fn line(&mut self, value: impl AsRef<str>) {
        let _ = writeln!(self.out, "  {}", value.as_ref());
    }
}

fn render_table(r: &Report) -> String {
    let mut t = Table { out: String::new() };
    t.row("task", r.task());
    if let Some(e) = r.error() {
        t.row("status", "error");
        t.row("error", e);
        provenance(&mut t, &r.document["provenance"]);
        return t.out;
    }
    let res = r.result();
    if let Some(g) = res.get("group").and_then(Value::as_str) {
        t.row("group", g);
    }
    if let Some(tw) = res.get("tower").and_then(Value::as_str) {
        t.row("tower", tw);
    }
    match r.task() {
        "cohomology" => t.row(&format!("H^{}", res["degree"]), text(&res["value"])),
        "homology" => t.row(&format!("H_{}", res["degree"]), text(&res["value"])),
        "h1" => {
            t.row("H^1", text(&res["value"]));
            t.row("Der", text(&res["derivations"]));
            t.row("PDer", text(&res["principal_derivations"]));
        }
        "dual" => {
            t.row("module", text(&res["module"]["underlying"]));
            t.row("dual", text(&res["dual"]["underlying"]));
            t.row("dual actions", res["dual"]["actions"].to_string());
            t.row("M -> M** iso", yes(&res["evaluation_isomorphism"]));
        }
        "limit-cohomology" | "limit-homology" => tower_lines(&mut t, res),
        "cd" => {
            t.row("cd estimate", res["estimate"].to_string());
            t.row("inconclusive", res["inconclusive"].to_string());
            for e in res["evidence"].as_array().into_iter().flatten() {
                let v = &e["verdict"];
                if v["kind"] == "stabilized" && text(&v["value"]) != "0" {
                    t.line(format!("H^{}(G, {}) = {}", e["degree"], text(&e["coefficients"]), text(&v["value"])));
                }
            }
        }
        "dualizing-module" => {
            t.row("verdict", text(&res["verdict"]));
            let levels = res["levels"].as_array().cloned().unwrap_or_default();
            let trans = res["transitions"].as_array().cloned().unwrap_or_default();
            for (i, l) in levels.iter().enumerate() {
                let mark = trans.get(i).map_or("", |f| if f["surjective"] == true { "<<-" } else { "<-" });
                t.line(format!(
                    "{:<12} {:<10} {:<10} action {:<10} {mark}",
                    text(&l["group"]),
                    format!("Z/{}", l["coefficient_order"]),
                    text(&l["value"]),
                    if l["action_trivial"] == true { "trivial" } else { "nontrivial" },
                ));
            }
        }
        "five-term" => {
            t.row("verdict", text(&res["verdict"]));
            for g in res["groups"].as_array().into_iter().flatten() {
                t.line(format!("{:<18} {}", text(&g["name"]), text(&g["value"])));
            }
        }
        "shapiro-check" => {
            t.row("verdict", text(&res["verdict"]));
            for d in res["degrees"].as_array().into_iter().flatten() {
                t.line(format!(
                    "i={}  H^i: {} vs {}   H_i: {} vs {}",
                    d["degree"],
                    text(&d["cohomology_coinduced"]),
                    text(&d["cohomology_subgroup"]),
                    text(&d["homology_induced"]),
                    text(&d["homology_subgroup"]),
                ));
            }
        }
        "uct-check" => {
            t.row("verdict", text(&res["verdict"]));
            if !res["reason"].is_null() {
                t.row("reason", text(&res["reason"]));
            }
            for (j, h) in res["integral_homology"].as_array().into_iter().flatten().enumerate() {
                t.line(format!("H_{j}(G, Z) = {}", text(h)));
            }
            for key in ["cohomology", "homology", "hom", "ext", "tensor", "tor"] {
                t.line(format!("{key:<10} {}", text(&res[key])));
            }
        }
        _ => {}
    }
    provenance(&mut t, &r.document["provenance"]);
    t.out
}

/// One line per tower entry; the mark describes the transition to the next entry.
fn tower_lines(t: &mut Table, res: &Value) {
    let inverse = res["direction"] == "inverse";
    let entries = res["entries"].as_array().cloned().unwrap_or_default();
    let trans = res["transitions"].as_array().cloned().unwrap_or_default();
    t.row("direction", if inverse { "inverse (<<- onto, <- not onto)" } else { "direct (->> onto, -> not onto)" });
    for (i, e) in entries.iter().enumerate() {
        let mark = match trans.get(i) {
            Some(f) if inverse => if f["surjective"] == true { "<<-" } else { "<-" },
            Some(f) => if f["surjective"] == true { "->>" } else { "->" },
            None => "",
        };
        t.line(format!("{:<12} {:<20} {mark}", text(&e["label"]), text(&e["value"])));
    }
    let v = &res["verdict"];
    let verdict = match v["kind"].as_str() {
        Some("stabilized") => format!("stabilized: {}", text(&v["value"])),
        Some("tower") => {
            let vals: Vec<String> = v["values"].as_array().into_iter().flatten().map(text).collect();
            format!("tower: {}", vals.join(" <- "))
        }
        _ => format!("inconclusive: {}", text(&v["reason"])),
    };
    t.row("verdict", verdict);
    for n in res["notes"].as_array().into_iter().flatten() {
        t.row("note", text(n));
    }
}

fn provenance(t: &mut Table, p: &Value) {
    let mut parts = Vec::new();
    if let Some(m) = p.as_object() {
        for (k, v) in m {
            parts.push(format!("{k}={}", text(v)));
        }
    }
    parts.sort();
    t.row("provenance", parts.join(", "));
}
