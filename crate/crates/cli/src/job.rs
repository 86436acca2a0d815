//! Job files: a JSON document naming a task and its inputs.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use profinity_core::cohomology::{cochain_dimension, DEFAULT_COEFFICIENT_CAP};
use profinity_core::gmodules::{GModule, ModMatrix};
use profinity_core::groups::{FiniteGroup, SubgroupWithTransversal};
use profinity_core::profinite::{
    build_tower, QuotientTower, TowerSpec, DEFAULT_WINDOW, DEFAULT_ZHAT_DEPTH, DEFAULT_ZHAT_POWER_DEPTH, DEFAULT_ZP_DEPTH,
};

pub const TASKS: [&str; 11] = [
    "cohomology",
    "homology",
    "h1",
    "dual",
    "limit-cohomology",
    "limit-homology",
    "cd",
    "dualizing-module",
    "five-term",
    "shapiro-check",
    "uct-check",
];

pub const DEFAULT_DEGREE_CAP: usize = 3;
pub const DEFAULT_CD_COEFFICIENT_CAP: u64 = 8;
pub const DEFAULT_DUALIZING_COEFFICIENT_CAP: u64 = 8;
pub const DEFAULT_SHAPIRO_DEGREE: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "table" => Some(Format::Table),
            "json" => Some(Format::Json),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Format::Table => "table",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupDesc {
    Trivial,
    Cyclic(u64),
    Abelian(Vec<u64>),
    Symmetric(usize),
    Alternating(usize),
    Dihedral(u64),
    Quaternion,
    Product(Box<GroupDesc>, Box<GroupDesc>),
    Table { name: String, table: Vec<Vec<usize>>, generators: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleDesc {
    Trivial(Vec<u64>),
    Regular(u64),
    Character { m: u64, scalars: Vec<u64> },
    Matrices { moduli: Vec<u64>, actions: Vec<Vec<Vec<u64>>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupDesc {
    Generators(Vec<usize>),
    Members(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    Zhat,
    Zp(u64),
    ZhatPower(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerDesc {
    pub preset: Preset,
    pub levels: usize,
}

/// Coefficients of a limit task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficients {
    /// One finite module over tower level `level`.
    Discrete { level: usize, module: ModuleDesc },
    /// Trivial modules `Z/orders[j]` over the first level, linked by reduction.
    TrivialCyclic(Vec<u64>),
    /// Group rings `Z/orders[j][G_levels[j]]`, linked by augmentation and reduction.
    GroupRings { levels: Vec<usize>, orders: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Task {
    Cohomology { group: GroupDesc, module: ModuleDesc, degree: usize },
    Homology { group: GroupDesc, module: ModuleDesc, degree: usize },
    H1 { group: GroupDesc, module: ModuleDesc },
    Dual { group: GroupDesc, module: ModuleDesc },
    LimitCohomology { tower: TowerDesc, coefficients: Coefficients, degree: usize, window: usize },
    LimitHomology { tower: TowerDesc, coefficients: Coefficients, degree: usize, window: usize },
    Cd { tower: TowerDesc, degree_cap: usize, coefficient_cap: u64, window: usize },
    DualizingModule { tower: TowerDesc, degree: usize, coefficient_cap: u64, window: usize },
    FiveTerm { group: GroupDesc, subgroup: SubgroupDesc, module: ModuleDesc },
    ShapiroCheck { group: GroupDesc, subgroup: SubgroupDesc, module: ModuleDesc, max_degree: usize },
    UctCheck { group: GroupDesc, module: ModuleDesc, degree: usize, coefficient_cap: u64, window: usize },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Cohomology { .. } => "cohomology",
            Task::Homology { .. } => "homology",
            Task::H1 { .. } => "h1",
            Task::Dual { .. } => "dual",
            Task::LimitCohomology { .. } => "limit-cohomology",
            Task::LimitHomology { .. } => "limit-homology",
            Task::Cd { .. } => "cd",
            Task::DualizingModule { .. } => "dualizing-module",
            Task::FiveTerm { .. } => "five-term",
            Task::ShapiroCheck { .. } => "shapiro-check",
            Task::UctCheck { .. } => "uct-check",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSpec {
    pub task: Task,
    pub format: Option<Format>,
}

/// Every violation found in a job document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobError {
    pub violations: Vec<String>,
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid job: {}", self.violations.join("; "))
    }
}

impl std::error::Error for JobError {}

/// Collects violations while reading one JSON object.
struct Reader<'a> {
    path: String,
    obj: &'a Map<String, Value>,
    seen: Vec<&'static str>,
}

impl<'a> Reader<'a> {
    fn new(path: &str, v: &'a Value, errs: &mut Vec<String>) -> Option<Self> {
        match v.as_object() {
            Some(obj) => Some(Reader { path: path.to_string(), obj, seen: Vec::new() }),
            None => {
                errs.push(format!("{}: expected an object", display_path(path)));
                None
            }
        }
    }

    fn at(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn get(&mut self, key: &'static str) -> Option<&'a Value> {
        self.seen.push(key);
        self.obj.get(key).filter(|v| !v.is_null())
    }

    fn required(&mut self, key: &'static str, errs: &mut Vec<String>) -> Option<&'a Value> {
        let v = self.get(key);
        if v.is_none() {
            errs.push(format!("{}: missing", self.at(key)));
        }
        v
    }

    fn uint(&mut self, key: &'static str, min: u64, errs: &mut Vec<String>) -> Option<u64> {
        let v = self.required(key, errs)?;
        as_uint(&self.at(key), v, min, errs)
    }

    fn uint_or(&mut self, key: &'static str, min: u64, default: u64, errs: &mut Vec<String>) -> Option<u64> {
        match self.get(key) {
            Some(v) => as_uint(&self.at(key), v, min, errs),
            None => Some(default),
        }
    }

    fn uints(&mut self, key: &'static str, min: u64, errs: &mut Vec<String>) -> Option<Vec<u64>> {
        let v = self.required(key, errs)?;
        as_uints(&self.at(key), v, min, errs)
    }

    fn string(&mut self, key: &'static str, errs: &mut Vec<String>) -> Option<&'a str> {
        let v = self.required(key, errs)?;
        let s = v.as_str();
        if s.is_none() {
            errs.push(format!("{}: expected a string", self.at(key)));
        }
        s
    }

    fn finish(self, errs: &mut Vec<String>) {
        for k in self.obj.keys() {
            if !self.seen.contains(&k.as_str()) {
                errs.push(format!("{}: unknown field", self.at(k)));
            }
        }
    }
}

fn display_path(path: &str) -> &str {
    if path.is_empty() {
        "job"
    } else {
        path
    }
}

fn as_uint(path: &str, v: &Value, min: u64, errs: &mut Vec<String>) -> Option<u64> {
    match v.as_u64() {
        Some(x) if x >= min => Some(x),
        Some(_) => {
            errs.push(format!("{path}: must be at least {min}"));
            None
        }
        None => {
            errs.push(format!("{path}: expected a non-negative integer"));
            None
        }
    }
}

fn as_uints(path: &str, v: &Value, min: u64, errs: &mut Vec<String>) -> Option<Vec<u64>> {
    let Some(items) = v.as_array() else {
        errs.push(format!("{path}: expected an array of integers"));
        return None;
    };
    let before = errs.len();
    let out: Vec<u64> = items.iter().enumerate().filter_map(|(i, x)| as_uint(&format!("{path}[{i}]"), x, min, errs)).collect();
    (errs.len() == before).then_some(out)
}

fn as_usizes(path: &str, v: &Value, errs: &mut Vec<String>) -> Option<Vec<usize>> {
    as_uints(path, v, 0, errs).map(|xs| xs.into_iter().map(|x| x as usize).collect())
}

fn parse_group(path: &str, v: &Value, errs: &mut Vec<String>) -> Option<GroupDesc> {
    let mut r = Reader::new(path, v, errs)?;
    let kind = r.string("type", errs);
    let out = match kind? {
        "trivial" => Some(GroupDesc::Trivial),
        "cyclic" => r.uint("n", 1, errs).map(GroupDesc::Cyclic),
        "abelian" => r.uints("moduli", 1, errs).map(GroupDesc::Abelian),
        "symmetric" => r.uint("n", 1, errs).map(|n| GroupDesc::Symmetric(n as usize)),
        "alternating" => r.uint("n", 1, errs).map(|n| GroupDesc::Alternating(n as usize)),
        "dihedral" => r.uint("n", 1, errs).map(GroupDesc::Dihedral),
        "quaternion" => Some(GroupDesc::Quaternion),
        "product" => {
            let factors = r.required("factors", errs);
            match factors.and_then(Value::as_array) {
                Some(fs) if fs.len() == 2 => {
                    let a = parse_group(&format!("{}[0]", r.at("factors")), &fs[0], errs);
                    let b = parse_group(&format!("{}[1]", r.at("factors")), &fs[1], errs);
                    Some(GroupDesc::Product(Box::new(a?), Box::new(b?)))
                }
                Some(_) | None => {
                    if factors.is_some() {
                        errs.push(format!("{}: expected exactly two groups", r.at("factors")));
                    }
                    None
                }
            }
        }
        "table" => {
            let name = r.get("name").and_then(Value::as_str).unwrap_or("G").to_string();
            let table = r.required("table", errs).and_then(|t| {
                let rows = t.as_array();
                if rows.is_none() {
                    errs.push(format!("{}: expected an array of rows", r.at("table")));
                }
                let before = errs.len();
                let out: Vec<Vec<usize>> = rows?
                    .iter()
                    .enumerate()
                    .filter_map(|(i, row)| as_usizes(&format!("{}[{i}]", r.at("table")), row, errs))
                    .collect();
                (errs.len() == before).then_some(out)
            });
            let generators = r.required("generators", errs).and_then(|g| as_usizes(&r.at("generators"), g, errs));
            Some(GroupDesc::Table { name, table: table?, generators: generators? })
        }
        other => {
            errs.push(format!("{}: unknown group type {other:?}", r.at("type")));
            None
        }
    };
    r.finish(errs);
    out
}

fn parse_module(path: &str, v: &Value, errs: &mut Vec<String>) -> Option<ModuleDesc> {
    let mut r = Reader::new(path, v, errs)?;
    let kind = r.string("type", errs);
    let out = match kind? {
        "trivial" => r.uints("factors", 1, errs).map(ModuleDesc::Trivial),
        "regular" => r.uint("m", 1, errs).map(ModuleDesc::Regular),
        "character" => {
            let m = r.uint("m", 1, errs);
            let scalars = r.uints("scalars", 0, errs);
            Some(ModuleDesc::Character { m: m?, scalars: scalars? })
        }
        "matrices" => {
            let moduli = r.uints("moduli", 1, errs);
            let actions = r.required("actions", errs).and_then(|a| {
                let Some(mats) = a.as_array() else {
                    errs.push(format!("{}: expected an array of matrices", r.at("actions")));
                    return None;
                };
                let before = errs.len();
                let mut out = Vec::new();
                for (i, mat) in mats.iter().enumerate() {
                    let p = format!("{}[{i}]", r.at("actions"));
                    match mat.as_array() {
                        Some(rows) => out.push(
                            rows.iter()
                                .enumerate()
                                .filter_map(|(j, row)| as_uints(&format!("{p}[{j}]"), row, 0, errs))
                                .collect(),
                        ),
                        None => errs.push(format!("{p}: expected a matrix")),
                    }
                }
                (errs.len() == before).then_some(out)
            });
            Some(ModuleDesc::Matrices { moduli: moduli?, actions: actions? })
        }
        other => {
            errs.push(format!("{}: unknown module type {other:?}", r.at("type")));
            None
        }
    };
    r.finish(errs);
    out
}

fn parse_subgroup(path: &str, v: &Value, errs: &mut Vec<String>) -> Option<SubgroupDesc> {
    let mut r = Reader::new(path, v, errs)?;
    let gens = r.get("generators");
    let members = r.get("members");
    let out = match (gens, members) {
        (Some(g), None) => as_usizes(&r.at("generators"), g, errs).map(SubgroupDesc::Generators),
        (None, Some(m)) => as_usizes(&r.at("members"), m, errs).map(SubgroupDesc::Members),
        _ => {
            errs.push(format!("{path}: give exactly one of \"generators\" or \"members\""));
            None
        }
    };
    r.finish(errs);
    out
}

fn parse_tower(path: &str, v: &Value, errs: &mut Vec<String>) -> Option<TowerDesc> {
    let mut r = Reader::new(path, v, errs)?;
    let preset = r.string("preset", errs);
    let (preset, depth) = match preset? {
        "zhat" => (Some(Preset::Zhat), DEFAULT_ZHAT_DEPTH),
        "zp" => (r.uint("p", 2, errs).map(Preset::Zp), DEFAULT_ZP_DEPTH),
        "zhat_power" => (r.uint("rank", 1, errs).map(|k| Preset::ZhatPower(k as usize)), DEFAULT_ZHAT_POWER_DEPTH),
        other => {
            errs.push(format!("{}: unknown preset {other:?} (zhat, zp, zhat_power)", r.at("preset")));
            (None, 0)
        }
    };
    let levels = r.uint_or("levels", 2, depth as u64, errs);
    r.finish(errs);
    Some(TowerDesc { preset: preset?, levels: levels? as usize })
}

fn parse_coefficients(r: &mut Reader, errs: &mut Vec<String>) -> Option<Coefficients> {
    let module = r.get("module");
    let level = r.get("level");
    let tower = r.get("coefficient_tower");
    match (module, tower) {
        (Some(m), None) => {
            let level = match level {
                Some(l) => as_uint(&r.at("level"), l, 0, errs)? as usize,
                None => 0,
            };
            Some(Coefficients::Discrete { level, module: parse_module(&r.at("module"), m, errs)? })
        }
        (None, Some(t)) => {
            if level.is_some() {
                errs.push(format!("{}: only valid together with \"module\"", r.at("level")));
            }
            let path = r.at("coefficient_tower");
            let mut c = Reader::new(&path, t, errs)?;
            let orders = c.uints("orders", 1, errs);
            let levels = c.get("levels").and_then(|l| as_usizes(&c.at("levels"), l, errs));
            c.finish(errs);
            match levels {
                None => Some(Coefficients::TrivialCyclic(orders?)),
                Some(levels) => Some(Coefficients::GroupRings { levels, orders: orders? }),
            }
        }
        _ => {
            errs.push(format!("{}: give exactly one of \"module\" or \"coefficient_tower\"", display_path(&r.path)));
            None
        }
    }
}

fn parse_task(v: &Value, errs: &mut Vec<String>) -> Option<JobSpec> {
    let mut r = Reader::new("", v, errs)?;
    let task = r.string("task", errs);
    let format = r.get("format").and_then(|f| {
        let parsed = f.as_str().and_then(Format::parse);
        if parsed.is_none() {
            errs.push("format: expected \"table\" or \"json\"".into());
        }
        parsed
    });
    let task = match task {
        Some(t) if TASKS.contains(&t) => t,
        Some(t) => {
            errs.push(format!("task: unknown task {t:?}"));
            return None;
        }
        None => return None,
    };
    let group = |r: &mut Reader, errs: &mut Vec<String>| r.required("group", errs).and_then(|g| parse_group("group", g, errs));
    let module = |r: &mut Reader, errs: &mut Vec<String>| r.required("module", errs).and_then(|m| parse_module("module", m, errs));
    let tower = |r: &mut Reader, errs: &mut Vec<String>| r.required("tower", errs).and_then(|t| parse_tower("tower", t, errs));
    let subgroup =
        |r: &mut Reader, errs: &mut Vec<String>| r.required("subgroup", errs).and_then(|s| parse_subgroup("subgroup", s, errs));
    let window = |r: &mut Reader, errs: &mut Vec<String>| r.uint_or("window", 1, DEFAULT_WINDOW as u64, errs).map(|w| w as usize);
    let mut build = || match task {
        "cohomology" | "homology" => {
            let (g, m, d) = (group(&mut r, errs), module(&mut r, errs), r.uint("degree", 0, errs));
            let (group, module, degree) = (g?, m?, d? as usize);
            Some(if task == "cohomology" {
                Task::Cohomology { group, module, degree }
            } else {
                Task::Homology { group, module, degree }
            })
        }
        "h1" | "dual" => {
            let (g, m) = (group(&mut r, errs), module(&mut r, errs));
            let (group, module) = (g?, m?);
            Some(if task == "h1" { Task::H1 { group, module } } else { Task::Dual { group, module } })
        }
        "limit-cohomology" | "limit-homology" => {
            let t = tower(&mut r, errs);
            let c = parse_coefficients(&mut r, errs);
            let d = r.uint("degree", 0, errs);
            let w = window(&mut r, errs);
            let (tower, coefficients, degree, window) = (t?, c?, d? as usize, w?);
            Some(if task == "limit-cohomology" {
                Task::LimitCohomology { tower, coefficients, degree, window }
            } else {
                Task::LimitHomology { tower, coefficients, degree, window }
            })
        }
        "cd" => {
            let t = tower(&mut r, errs);
            let d = r.uint_or("degree_cap", 1, DEFAULT_DEGREE_CAP as u64, errs);
            let c = r.uint_or("coefficient_cap", 2, DEFAULT_CD_COEFFICIENT_CAP, errs);
            let w = window(&mut r, errs);
            Some(Task::Cd { tower: t?, degree_cap: d? as usize, coefficient_cap: c?, window: w? })
        }
        "dualizing-module" => {
            let t = tower(&mut r, errs);
            let rank = match t.as_ref().map(|t| &t.preset) {
                Some(Preset::ZhatPower(k)) => *k as u64,
                _ => 1,
            };
            let d = r.uint_or("degree", 0, rank, errs);
            let c = r.uint_or("coefficient_cap", 2, DEFAULT_DUALIZING_COEFFICIENT_CAP, errs);
            let w = window(&mut r, errs);
            Some(Task::DualizingModule { tower: t?, degree: d? as usize, coefficient_cap: c?, window: w? })
        }
        "five-term" => {
            let (g, s, m) = (group(&mut r, errs), subgroup(&mut r, errs), module(&mut r, errs));
            Some(Task::FiveTerm { group: g?, subgroup: s?, module: m? })
        }
        "shapiro-check" => {
            let (g, s, m) = (group(&mut r, errs), subgroup(&mut r, errs), module(&mut r, errs));
            let d = r.uint_or("max_degree", 0, DEFAULT_SHAPIRO_DEGREE as u64, errs);
            Some(Task::ShapiroCheck { group: g?, subgroup: s?, module: m?, max_degree: d? as usize })
        }
        "uct-check" => {
            let (g, m) = (group(&mut r, errs), module(&mut r, errs));
            let d = r.uint("degree", 0, errs);
            let c = r.uint_or("coefficient_cap", 1, DEFAULT_COEFFICIENT_CAP, errs);
            let w = window(&mut r, errs);
            Some(Task::UctCheck { group: g?, module: m?, degree: d? as usize, coefficient_cap: c?, window: w? })
        }
        _ => unreachable!("task names are checked above"),
    };
    let out = build();
    r.finish(errs);
    Some(JobSpec { task: out?, format })
}

/// Parses and validates a job, reporting every violation found.
pub fn parse_job(text: &str) -> Result<JobSpec, JobError> {
    let value: Value = serde_json::from_str(text).map_err(|e| JobError { violations: vec![format!("malformed JSON: {e}")] })?;
    parse_job_value(&value)
}

pub fn parse_job_value(value: &Value) -> Result<JobSpec, JobError> {
    let mut errs = Vec::new();
    let spec = parse_task(value, &mut errs);
    if let (Some(spec), true) = (&spec, errs.is_empty()) {
        validate(spec, &mut errs);
    }
    match spec {
        Some(spec) if errs.is_empty() => Ok(spec),
        _ => Err(JobError { violations: errs }),
    }
}

pub fn build_group(desc: &GroupDesc) -> Result<FiniteGroup, String> {
    let g = match desc {
        GroupDesc::Trivial => Ok(FiniteGroup::trivial()),
        GroupDesc::Cyclic(n) => FiniteGroup::cyclic(*n),
        GroupDesc::Abelian(m) => FiniteGroup::abelian(m),
        GroupDesc::Symmetric(n) => FiniteGroup::symmetric(*n),
        GroupDesc::Alternating(n) => FiniteGroup::alternating(*n),
        GroupDesc::Dihedral(n) => FiniteGroup::dihedral(*n),
        GroupDesc::Quaternion => FiniteGroup::quaternion(),
        GroupDesc::Product(a, b) => FiniteGroup::product(&build_group(a)?, &build_group(b)?),
        GroupDesc::Table { name, table, generators } => FiniteGroup::from_table(name, table.clone(), generators.clone()),
    };
    g.map_err(|e| e.to_string())
}

pub fn build_module(group: &Arc<FiniteGroup>, desc: &ModuleDesc) -> Result<GModule, String> {
    let m = match desc {
        ModuleDesc::Trivial(f) => GModule::trivial(group.clone(), f),
        ModuleDesc::Regular(m) => GModule::regular(group.clone(), *m),
        ModuleDesc::Character { m, scalars } => {
            let ng = group.generators().len();
            if scalars.len() != ng {
                return Err(format!("expected {ng} scalars, one per group generator, got {}", scalars.len()));
            }
            GModule::from_character(group.clone(), *m, scalars)
        }
        ModuleDesc::Matrices { moduli, actions } => {
            let k = moduli.len();
            for (i, a) in actions.iter().enumerate() {
                if a.len() != k || a.iter().any(|row| row.len() != k) {
                    return Err(format!("action {i} must be a {k}x{k} matrix"));
                }
            }
            let gens = actions.iter().map(|a| ModMatrix::from_rows(a)).collect();
            GModule::new(group.clone(), moduli.clone(), gens)
        }
    };
    m.map_err(|e| e.to_string())
}

pub fn build_subgroup(group: &Arc<FiniteGroup>, desc: &SubgroupDesc) -> Result<SubgroupWithTransversal, String> {
    let s = match desc {
        SubgroupDesc::Generators(g) => SubgroupWithTransversal::generated_by(group.clone(), g),
        SubgroupDesc::Members(m) => SubgroupWithTransversal::from_members(group.clone(), m),
    };
    s.map_err(|e| e.to_string())
}

pub fn tower_spec(desc: &TowerDesc) -> TowerSpec {
    match desc.preset {
        Preset::Zhat => TowerSpec::Zhat { levels: desc.levels },
        Preset::Zp(p) => TowerSpec::Zp { p, levels: desc.levels },
        Preset::ZhatPower(rank) => TowerSpec::ZhatPower { rank, levels: desc.levels },
    }
}

pub fn build_tower_desc(desc: &TowerDesc) -> Result<QuotientTower, String> {
    build_tower(&tower_spec(desc)).map_err(|e| e.to_string())
}

/// Resolves references that need the actual group: element indices, generator counts and caps.
fn validate(spec: &JobSpec, errs: &mut Vec<String>) {
    let mut with_group = |gdesc: &GroupDesc, check: &mut dyn FnMut(&Arc<FiniteGroup>, &mut Vec<String>)| match build_group(gdesc) {
        Ok(g) => check(&Arc::new(g), errs),
        Err(e) => errs.push(format!("group: {e}")),
    };
    let module_check = |g: &Arc<FiniteGroup>, m: &ModuleDesc, path: &str, errs: &mut Vec<String>| -> Option<GModule> {
        build_module(g, m).map_err(|e| errs.push(format!("{path}: {e}"))).ok()
    };
    let size_check = |g: &Arc<FiniteGroup>, m: &GModule, n: usize, errs: &mut Vec<String>| {
        if let Err(e) = cochain_dimension(g, m, n) {
            errs.push(format!("degree: {e} (override with PROFINITY_SIZE_CAP)"));
        }
    };
    match &spec.task {
        Task::Cohomology { group, module, degree } | Task::Homology { group, module, degree } => {
            with_group(group, &mut |g, errs| {
                if let Some(m) = module_check(g, module, "module", errs) {
                    size_check(g, &m, *degree, errs);
                }
            });
        }
        Task::H1 { group, module } | Task::Dual { group, module } => {
            with_group(group, &mut |g, errs| {
                let _ = module_check(g, module, "module", errs);
            });
        }
        Task::UctCheck { group, module, .. } => {
            with_group(group, &mut |g, errs| {
                if let Some(m) = module_check(g, module, "module", errs) {
                    if !m.is_trivial_action() {
                        errs.push("module: uct-check needs the trivial action".into());
                    }
                }
            });
        }
        Task::FiveTerm { group, subgroup, module } => {
            with_group(group, &mut |g, errs| {
                let _ = module_check(g, module, "module", errs);
                match build_subgroup(g, subgroup) {
                    Ok(s) => {
                        if let Some((generator, element)) = g.normality_witness(&s.members) {
                            errs.push(format!(
                                "subgroup: not normal (conjugating element {element} by generator {generator} leaves it)"
                            ));
                        }
                    }
                    Err(e) => errs.push(format!("subgroup: {e}")),
                }
            });
        }
        Task::ShapiroCheck { group, subgroup, module, .. } => {
            with_group(group, &mut |g, errs| match build_subgroup(g, subgroup) {
                Ok(s) => {
                    let _ = module_check(&s.group, module, "module (over the subgroup)", errs);
                }
                Err(e) => errs.push(format!("subgroup: {e}")),
            });
        }
        Task::LimitCohomology { tower, coefficients, .. } | Task::LimitHomology { tower, coefficients, .. } => {
            match build_tower_desc(tower) {
                Ok(t) => match coefficients {
                    Coefficients::Discrete { level, module } => {
                        if *level >= t.depth() {
                            errs.push(format!("level: tower has levels 0..{}", t.depth() - 1));
                        } else {
                            let _ = module_check(t.level(*level), module, "module", errs);
                        }
                    }
                    Coefficients::TrivialCyclic(orders) => check_divisibility(orders, errs),
                    Coefficients::GroupRings { levels, orders } => {
                        check_divisibility(orders, errs);
                        if levels.len() != orders.len() {
                            errs.push("coefficient_tower: levels and orders must have the same length".into());
                        }
                        if let Some(&l) = levels.iter().find(|&&l| l >= t.depth()) {
                            errs.push(format!("coefficient_tower.levels: level {l} is beyond the tower depth {}", t.depth()));
                        }
                        if levels.windows(2).any(|w| w[0] > w[1]) {
                            errs.push("coefficient_tower.levels: must be non-decreasing".into());
                        }
                    }
                },
                Err(e) => errs.push(format!("tower: {e}")),
            }
        }
        Task::Cd { tower, .. } | Task::DualizingModule { tower, .. } => {
            if let Err(e) = build_tower_desc(tower) {
                errs.push(format!("tower: {e}"));
            }
        }
    }
}

fn check_divisibility(orders: &[u64], errs: &mut Vec<String>) {
    if orders.is_empty() {
        errs.push("coefficient_tower.orders: must not be empty".into());
    }
    if let Some(w) = orders.windows(2).find(|w| w[1] % w[0] != 0) {
        errs.push(format!("coefficient_tower.orders: {} does not divide {}", w[0], w[1]));
    }
}

fn group_json(g: &GroupDesc) -> Value {
    match g {
        GroupDesc::Trivial => json!({"type": "trivial"}),
        GroupDesc::Cyclic(n) => json!({"type": "cyclic", "n": n}),
        GroupDesc::Abelian(m) => json!({"type": "abelian", "moduli": m}),
        GroupDesc::Symmetric(n) => json!({"type": "symmetric", "n": n}),
        GroupDesc::Alternating(n) => json!({"type": "alternating", "n": n}),
        GroupDesc::Dihedral(n) => json!({"type": "dihedral", "n": n}),
        GroupDesc::Quaternion => json!({"type": "quaternion"}),
        GroupDesc::Product(a, b) => json!({"type": "product", "factors": [group_json(a), group_json(b)]}),
        GroupDesc::Table { name, table, generators } => {
            json!({"type": "table", "name": name, "table": table, "generators": generators})
        }
    }
}

fn module_json(m: &ModuleDesc) -> Value {
    match m {
        ModuleDesc::Trivial(f) => json!({"type": "trivial", "factors": f}),
        ModuleDesc::Regular(m) => json!({"type": "regular", "m": m}),
        ModuleDesc::Character { m, scalars } => json!({"type": "character", "m": m, "scalars": scalars}),
        ModuleDesc::Matrices { moduli, actions } => json!({"type": "matrices", "moduli": moduli, "actions": actions}),
    }
}

fn subgroup_json(s: &SubgroupDesc) -> Value {
    match s {
        SubgroupDesc::Generators(g) => json!({"generators": g}),
        SubgroupDesc::Members(m) => json!({"members": m}),
    }
}

fn tower_json(t: &TowerDesc) -> Value {
    match t.preset {
        Preset::Zhat => json!({"preset": "zhat", "levels": t.levels}),
        Preset::Zp(p) => json!({"preset": "zp", "p": p, "levels": t.levels}),
        Preset::ZhatPower(rank) => json!({"preset": "zhat_power", "rank": rank, "levels": t.levels}),
    }
}

fn insert_coefficients(out: &mut Map<String, Value>, c: &Coefficients) {
    match c {
        Coefficients::Discrete { level, module } => {
            out.insert("level".into(), json!(level));
            out.insert("module".into(), module_json(module));
        }
        Coefficients::TrivialCyclic(orders) => {
            out.insert("coefficient_tower".into(), json!({"orders": orders}));
        }
        Coefficients::GroupRings { levels, orders } => {
            out.insert("coefficient_tower".into(), json!({"levels": levels, "orders": orders}));
        }
    }
}

impl JobSpec {
    /// Canonical JSON form with every default spelled out; `parse_job_value` inverts it.
    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        out.insert("task".into(), json!(self.task.name()));
        if let Some(f) = self.format {
            out.insert("format".into(), json!(f.as_str()));
        }
        let mut put = |k: &str, v: Value| {
            out.insert(k.into(), v);
        };
        match &self.task {
            Task::Cohomology { group, module, degree } | Task::Homology { group, module, degree } => {
                put("group", group_json(group));
                put("module", module_json(module));
                put("degree", json!(degree));
            }
            Task::H1 { group, module } | Task::Dual { group, module } => {
                put("group", group_json(group));
                put("module", module_json(module));
            }
            Task::LimitCohomology { tower, coefficients, degree, window }
            | Task::LimitHomology { tower, coefficients, degree, window } => {
                put("tower", tower_json(tower));
                put("degree", json!(degree));
                put("window", json!(window));
                insert_coefficients(&mut out, coefficients);
            }
            Task::Cd { tower, degree_cap, coefficient_cap, window } => {
                put("tower", tower_json(tower));
                put("degree_cap", json!(degree_cap));
                put("coefficient_cap", json!(coefficient_cap));
                put("window", json!(window));
            }
            Task::DualizingModule { tower, degree, coefficient_cap, window } => {
                put("tower", tower_json(tower));
                put("degree", json!(degree));
                put("coefficient_cap", json!(coefficient_cap));
                put("window", json!(window));
            }
            Task::FiveTerm { group, subgroup, module } => {
                put("group", group_json(group));
                put("subgroup", subgroup_json(subgroup));
                put("module", module_json(module));
            }
            Task::ShapiroCheck { group, subgroup, module, max_degree } => {
                put("group", group_json(group));
                put("subgroup", subgroup_json(subgroup));
                put("module", module_json(module));
                put("max_degree", json!(max_degree));
            }
            Task::UctCheck { group, module, degree, coefficient_cap, window } => {
                put("group", group_json(group));
                put("module", module_json(module));
                put("degree", json!(degree));
                put("coefficient_cap", json!(coefficient_cap));
                put("window", json!(window));
            }
        }
        Value::Object(out)
    }
}
