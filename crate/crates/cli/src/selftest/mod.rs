//! `profinity selftest`: the acceptance suite with a deterministic report.

pub mod corpus;
pub mod criteria;
pub mod oracles;

use std::fmt::Write;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::render::to_json_text;
use crate::run::VERSION;
use crate::Format;
use criteria::Outcome;

/// Number of failure messages kept per criterion.
pub const FAILURE_SAMPLE: usize = 5;

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub run: fn() -> Outcome,
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "cyclic groups: bar complex vs periodic closed form", run: criteria::cyclic_oracle },
    Criterion { id: 2, name: "homology vs cohomology of the dual module", run: criteria::duality },
    Criterion { id: 3, name: "evaluation map M -> M** is an isomorphism", run: criteria::double_dual },
    Criterion { id: 4, name: "Shapiro isomorphisms for induced and coinduced modules", run: criteria::shapiro },
    Criterion { id: 5, name: "five-term exactness for normal subgroups", run: criteria::five_term },
    Criterion { id: 6, name: "universal coefficient identities", run: criteria::uct },
    Criterion { id: 7, name: "H^i(Zhat, Z/m) at depth 5, window 2", run: criteria::zhat_goodness },
    Criterion { id: 8, name: "cd and dualizing module of Zhat, Z_2, Zhat^2", run: criteria::cd_and_duality },
    Criterion { id: 9, name: "(M (x) N)* vs Hom(N, M*)", run: criteria::tensor_hom },
    Criterion { id: 10, name: "byte-identical reports for repeated jobs", run: criteria::determinism },
];

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub outcome: Outcome,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.outcome.failures.is_empty() && self.outcome.cases > 0
    }

    fn to_json(&self) -> Value {
        let o = &self.outcome;
        json!({
            "id": self.id,
            "name": self.name,
            "passed": self.passed(),
            "cases": o.cases,
            "failure_count": o.failures.len(),
            "failures": o.failures.iter().take(FAILURE_SAMPLE).collect::<Vec<_>>(),
            "notes": o.notes,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SelftestReport {
    pub results: Vec<CriterionResult>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(CriterionResult::passed)
    }

    pub fn to_json(&self) -> Value {
        let passed = self.results.iter().filter(|r| r.passed()).count();
        json!({
            "suite": "profinity selftest",
            "version": VERSION,
            "seed": criteria::SEED,
            "criteria": self.results.iter().map(CriterionResult::to_json).collect::<Vec<_>>(),
            "passed": passed,
            "failed": self.results.len() - passed,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json_text(&self.to_json()),
            Format::Table => {
                let mut s = String::new();
                for r in &self.results {
                    let mark = if r.passed() { "pass" } else { "FAIL" };
                    let _ = writeln!(s, "{:>2}  {mark}  {}  ({} cases)", r.id, r.name, r.outcome.cases);
                    for f in r.outcome.failures.iter().take(FAILURE_SAMPLE) {
                        let _ = writeln!(s, "        {f}");
                    }
                    if r.outcome.failures.len() > FAILURE_SAMPLE {
                        let _ = writeln!(s, "        ... {} failures in total", r.outcome.failures.len());
                    }
                    for n in &r.outcome.notes {
                        let _ = writeln!(s, "        note: {n}");
                    }
                }
                let passed = self.results.iter().filter(|r| r.passed()).count();
                let _ = writeln!(s, "{passed}/{} criteria passed", self.results.len());
                s
            }
        }
    }
}

/// Runs the selected criteria (all when `only` is empty), reporting each with its duration.
pub fn run_selftest(only: &[usize], mut progress: impl FnMut(&CriterionResult, Duration)) -> SelftestReport {
    let mut results = Vec::new();
    for c in CRITERIA.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let r = CriterionResult { id: c.id, name: c.name.to_string(), outcome: (c.run)() };
        progress(&r, start.elapsed());
        results.push(r);
    }
    SelftestReport { results }
}
