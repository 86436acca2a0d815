use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::{json, Value};

use profinity_cli::job::parse_job_value;
use profinity_cli::report::group_text;
use profinity_cli::{parse_job, render_report, run_job, Format};
use profinity_core::exact_algebra::FgAbelianGroup;

const COHOMOLOGY_JOB: &str =
    r#"{"task":"cohomology","group":{"type":"cyclic","n":4},"module":{"type":"trivial","factors":[6]},"degree":2}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_profinity"))
}

fn run_text(text: &str) -> Value {
    run_job(&parse_job(text).unwrap()).document
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn schema_examples_parse() {
    let job = parse_job(COHOMOLOGY_JOB).unwrap();
    assert_eq!(job.task.name(), "cohomology");
    let cd = parse_job(r#"{"task":"cd","tower":{"preset":"zhat","levels":5},"degree_cap":3,"coefficient_cap":8}"#).unwrap();
    assert_eq!(cd.task.name(), "cd");
    let err = parse_job(r#"{"task":"frobnicate"}"#).unwrap_err();
    assert!(err.to_string().contains("unknown task"), "{err}");
}

#[test]
fn every_violation_is_reported() {
    let err = parse_job(
        r#"{"task":"cohomology","group":{"type":"cyclic","n":0},"module":{"type":"trivial","factors":[6]},"degree":"two","colour":1}"#,
    )
    .unwrap_err();
    assert!(err.violations.len() >= 3, "{:?}", err.violations);
    assert!(err.violations.iter().any(|v| v.contains("colour")), "{:?}", err.violations);
    assert!(parse_job("not json").is_err());
    let not_normal =
        parse_job(r#"{"task":"five-term","group":{"type":"symmetric","n":3},"subgroup":{"generators":[1]},"module":{"type":"trivial","factors":[3]}}"#)
            .unwrap_err();
    assert!(not_normal.to_string().contains("not normal"), "{not_normal}");
}

#[test]
fn cohomology_job_gives_z2() {
    let doc = run_text(COHOMOLOGY_JOB);
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["result"]["value"]["text"], "Z/2");
    assert_eq!(doc["result"]["value"]["torsion"], json!([2]));
    assert_eq!(doc["provenance"]["size_cap"], 20000);
}

#[test]
fn five_term_job_over_c4() {
    let doc = run_text(
        r#"{"task":"five-term","group":{"type":"cyclic","n":4},"subgroup":{"members":[0,2]},"module":{"type":"trivial","factors":[2]}}"#,
    );
    let r = &doc["result"];
    assert_eq!(r["verdict"], "exact");
    let groups = r["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 5);
    assert!(groups.iter().all(|g| g["value"]["text"] == "Z/2"), "{groups:?}");
}

#[test]
fn dualizing_job_on_zhat() {
    let doc = run_text(r#"{"task":"dualizing-module","tower":{"preset":"zhat","levels":12},"coefficient_cap":24}"#);
    let verdict = doc["result"]["verdict"].as_str().unwrap();
    assert!(verdict.starts_with("orientable Poincaré duality, dimension 1, levels Z/2, Z/6, Z/24, …"), "{verdict}");
    assert_eq!(doc["result"]["class"]["kind"], "orientable");
}

#[test]
fn table_rendering() {
    assert_eq!(group_text(&FgAbelianGroup::trivial()), "0");
    assert_eq!(group_text(&FgAbelianGroup::from_orders(&[4, 2])), "Z/2 + Z/4");
    assert_eq!(group_text(&FgAbelianGroup::new(2, vec![3u32.into()]).unwrap()), "Z/3 + Z^2");

    let zero = run_job(&parse_job(r#"{"task":"cohomology","group":{"type":"cyclic","n":4},"module":{"type":"trivial","factors":[3]},"degree":1}"#).unwrap());
    assert!(render_report(&zero, Format::Table).lines().any(|l| l == "H^1           0"));
    let sum = run_job(&parse_job(r#"{"task":"cohomology","group":{"type":"cyclic","n":4},"module":{"type":"trivial","factors":[2,4]},"degree":0}"#).unwrap());
    assert!(render_report(&sum, Format::Table).lines().any(|l| l == "H^0           Z/2 + Z/4"));
}

#[test]
fn tower_table_has_one_line_per_level() {
    let r = run_job(
        &parse_job(r#"{"task":"limit-cohomology","tower":{"preset":"zhat","levels":8},"module":{"type":"trivial","factors":[6]},"degree":1}"#)
            .unwrap(),
    );
    let table = render_report(&r, Format::Table);
    let levels: Vec<&str> = table.lines().filter(|l| l.starts_with("  Z/")).collect();
    assert_eq!(levels.len(), 8, "{table}");
    assert!(levels[0].ends_with("->") && levels[2].ends_with("->>"), "{table}");
    assert!(table.contains("verdict       stabilized: Z/6"), "{table}");
}

#[test]
fn json_report_keeps_matrices_and_factors() {
    let doc = run_text(r#"{"task":"limit-cohomology","tower":{"preset":"zhat","levels":6},"module":{"type":"trivial","factors":[6]},"degree":1}"#);
    let t = &doc["result"]["transitions"][2];
    assert_eq!(t["source"], "Z/6");
    assert_eq!(t["matrix"], json!([[1]]));
    assert_eq!(doc["result"]["entries"][5]["value"]["torsion"], json!([6]));
}

#[test]
fn errors_are_reports_not_panics() {
    let doc = run_text(r#"{"task":"uct-check","group":{"type":"cyclic","n":4},"module":{"type":"trivial","factors":[2]},"degree":1,"coefficient_cap":30}"#);
    assert_eq!(doc["status"], "error");
    assert!(doc["error"].as_str().unwrap().starts_with("uct-check: "), "{doc}");
}

#[test]
fn run_command_exit_codes_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let job = write(dir.path(), "job.json", COHOMOLOGY_JOB);
    let o = bin().arg("run").arg(&job).output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("H^2           Z/2"));

    let out = dir.path().join("report.json");
    let o = bin().args(["run", "--format", "json", "--out"]).arg(&out).arg(&job).output().unwrap();
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["result"]["value"]["text"], "Z/2");

    let bad = write(dir.path(), "bad.json", r#"{"task":"frobnicate"}"#);
    let o = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown task"));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let job = write(dir.path(), "job.json", r#"{"task":"h1","group":{"type":"symmetric","n":3},"module":{"type":"regular","m":3}}"#);
    let a = bin().args(["run", "--format", "json"]).arg(&job).output().unwrap();
    let b = bin().args(["run", "--format", "json"]).arg(&job).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn size_cap_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let job = write(dir.path(), "job.json", COHOMOLOGY_JOB);
    let o = bin().env("PROFINITY_SIZE_CAP", "10").arg("run").arg(&job).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"), "{}", String::from_utf8_lossy(&o.stderr));

    let o = bin().env("PROFINITY_SIZE_CAP", "100000").args(["run", "--format", "json"]).arg(&job).output().unwrap();
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["provenance"]["size_cap"], 100000);
}

#[test]
fn batch_writes_one_report_per_job() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", COHOMOLOGY_JOB);
    write(dir.path(), "b.json", r#"{"task":"dual","group":{"type":"cyclic","n":3},"module":{"type":"character","m":7,"scalars":[2]}}"#);
    write(dir.path(), "c.json", r#"{"task":"frobnicate"}"#);
    write(dir.path(), "notes.txt", "ignored");
    let o = bin().arg("batch").arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let reports = dir.path().join("reports");
    let mut names: Vec<String> = fs::read_dir(&reports).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["a.json", "b.json", "c.json"]);
    let a: Value = serde_json::from_str(&fs::read_to_string(reports.join("a.json")).unwrap()).unwrap();
    assert_eq!(a["result"]["value"]["text"], "Z/2");
    let c: Value = serde_json::from_str(&fs::read_to_string(reports.join("c.json")).unwrap()).unwrap();
    assert_eq!(c["status"], "invalid");
    assert!(stdout(&o).contains("3 jobs, 1 not ok"));

    let out = dir.path().join("tables");
    let o = bin().arg("batch").arg(dir.path()).args(["--format", "table", "--out"]).arg(&out).output().unwrap();
    assert!(!o.status.success());
    assert!(fs::read_to_string(out.join("a.txt")).unwrap().contains("H^2           Z/2"));
}

fn group_json() -> impl Strategy<Value = Value> {
    prop_oneof![
        (1u64..=12).prop_map(|n| json!({"type": "cyclic", "n": n})),
        prop::sample::select(vec![vec![2u64, 2], vec![2, 4], vec![3, 3]]).prop_map(|m| json!({"type": "abelian", "moduli": m})),
        (3usize..=4).prop_map(|n| json!({"type": "symmetric", "n": n})),
        (2u64..=6).prop_map(|n| json!({"type": "dihedral", "n": n})),
        Just(json!({"type": "quaternion"})),
    ]
}

fn job_json() -> impl Strategy<Value = Value> {
    let factors = prop::sample::select(vec![vec![2u64], vec![3], vec![6], vec![2, 4]]);
    let format = prop::option::of(prop::sample::select(vec!["table", "json"]));
    prop_oneof![
        (group_json(), factors.clone(), 0usize..=2, format.clone(), prop::sample::select(vec!["cohomology", "homology"]))
            .prop_map(|(g, f, d, fmt, task)| {
                let mut j = json!({"task": task, "group": g, "module": {"type": "trivial", "factors": f}, "degree": d});
                if let Some(fmt) = fmt {
                    j["format"] = json!(fmt);
                }
                j
            }),
        (group_json(), 2u64..=5).prop_map(|(g, m)| json!({"task": "h1", "group": g, "module": {"type": "regular", "m": m}})),
        (prop::sample::select(vec!["zhat", "zp"]), 3u64..=7, 0usize..=3, 1usize..=2).prop_map(|(preset, levels, d, w)| {
            let mut tower = json!({"preset": preset, "levels": levels});
            if preset == "zp" {
                tower["p"] = json!(3);
            }
            json!({"task": "limit-cohomology", "tower": tower, "module": {"type": "trivial", "factors": [2]}, "degree": d, "window": w})
        }),
        (1usize..=3, 2u64..=6).prop_map(|(cap, c)| json!({"task": "cd", "tower": {"preset": "zhat"}, "degree_cap": cap, "coefficient_cap": c})),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn job_echo_round_trips(text in job_json()) {
        let job = parse_job_value(&text).unwrap();
        let echo = job.to_json();
        let again = parse_job_value(&echo).unwrap();
        prop_assert_eq!(&again, &job);
        prop_assert_eq!(again.to_json(), echo);
    }
}
