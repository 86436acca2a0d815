//! The acceptance criteria, each checked against an independent computation where one exists.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use profinity_core::cohomology::{
    cohomology, cohomology_periodic, five_term_check, h1_via_derivations, homology, uct_check, UctVerdict,
    DEFAULT_COEFFICIENT_CAP, DEFAULT_WINDOW,
};
use profinity_core::exact_algebra::FgAbelianGroup;
use profinity_core::gmodules::{
    coinduce, coinvariants, evaluation_map, hom_g, induce, invariants_under, pontryagin_dual, tensor_product, GModule,
};
use profinity_core::groups::{quotient_by, FiniteGroup, SubgroupWithTransversal};
use profinity_core::profinite::{
    cd_estimate, dualizing_module_estimate, limit_cohomology_discrete, DualityClass, LimitVerdict, QuotientTower,
};

use super::corpus::{groups_to_16, modules, shapiro_groups, shapiro_modules, small_groups};
use super::oracles::{chain_homology, cyclic_cohomology};
use crate::job::parse_job;
use crate::render::{render_report, to_json_text};
use crate::report::verdict_text;
use crate::run::run_job;
use crate::Format;

pub const SEED: u64 = 0x5eed_2024;

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub cases: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.cases += 1;
        self.failures.push(what);
    }

    fn expect_eq<T: PartialEq + Display>(&mut self, got: &T, want: &T, label: impl FnOnce() -> String) {
        self.check(got == want, || format!("{}: got {got}, expected {want}", label()));
    }
}

fn describe(a: &GModule) -> String {
    let acts: Vec<String> = a.generator_actions().iter().map(|m| format!("{:?}", m.to_rows())).collect();
    format!("{:?} acting by [{}]", a.moduli(), acts.join(", "))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn pow_mod(s: u64, e: u64, m: u64) -> u64 {
    (0..e).fold(1 % m, |acc, _| acc * s % m)
}

pub fn cyclic_oracle() -> Outcome {
    let mut out = Outcome::default();
    for n in 1..=12u64 {
        let g = Arc::new(FiniteGroup::cyclic(n).unwrap());
        for m in 2..=12u64 {
            for s in (1..m).filter(|&s| gcd(s, m) == 1 && pow_mod(s, n, m) == 1) {
                let a = if n == 1 {
                    GModule::trivial(g.clone(), &[m]).unwrap()
                } else {
                    GModule::from_character(g.clone(), m, &[s]).unwrap()
                };
                for d in 0..=3 {
                    let want = cyclic_cohomology(n, m, s, d);
                    let label = || format!("Z/{n} on Z/{m} by {s}, degree {d}");
                    match cohomology(&g, &a, d) {
                        Ok(h) => out.expect_eq(&h.value, &want, || format!("bar, {}", label())),
                        Err(e) => out.fail(format!("bar, {}: {e}", label())),
                    }
                    match cohomology_periodic(&a, d) {
                        Ok(h) => out.expect_eq(&h.value, &want, || format!("periodic, {}", label())),
                        Err(e) => out.fail(format!("periodic, {}: {e}", label())),
                    }
                }
            }
        }
    }
    out
}

pub fn duality() -> Outcome {
    let mut out = Outcome::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let groups = small_groups();
    let pools: Vec<Vec<GModule>> = groups.iter().map(|g| modules(g, 16)).collect();
    for _ in 0..200 {
        let gi = rng.gen_range(0..groups.len());
        let (g, pool) = (&groups[gi], &pools[gi]);
        let a = &pool[rng.gen_range(0..pool.len())];
        let i = rng.gen_range(0..=2usize);
        let label = || format!("{}, {}, i={i}", g.name(), describe(a));
        let dual = cohomology(g, &pontryagin_dual(a), i);
        match dual {
            Ok(h) => out.expect_eq(&chain_homology(g, a, i), &h.value, || format!("{}: chains vs H^i(G, M*)", label())),
            Err(e) => out.fail(format!("{}: {e}", label())),
        }
    }
    out
}

/// `χ_c(x) = Σ c_i x_i / m_i`, scaled by `lcm(m_i)`.
fn pairing(moduli: &[u64], c: &[u64], x: &[u64]) -> u64 {
    let l = moduli.iter().fold(1u64, |acc, &m| acc / gcd(acc, m) * m);
    moduli.iter().enumerate().fold(0, |acc, (i, &m)| (acc + c[i] * x[i] % m * (l / m)) % l)
}

pub fn double_dual() -> Outcome {
    let mut out = Outcome::default();
    for g in groups_to_16() {
        for a in modules(&g, 64) {
            let label = || format!("{}, {}", g.name(), describe(&a));
            let d = pontryagin_dual(&a);
            let dd = pontryagin_dual(&d);
            let m = a.moduli();
            let (elems, chars) = (a.elements(), d.elements());
            let mut ok = true;
            for &s in g.generators() {
                let si = g.inv(s);
                for c in &chars {
                    let gc = d.act(s, c);
                    ok &= elems.iter().all(|x| pairing(m, &gc, x) == pairing(m, c, &a.act(si, x)));
                }
            }
            out.check(ok, || format!("{}: dual action is not (g·χ)(x) = χ(g⁻¹x)", label()));
            let ev = evaluation_map(&a);
            let mut ok = true;
            for x in &elems {
                let y = ev.apply(x);
                ok &= chars.iter().all(|c| pairing(m, &y, c) == pairing(m, c, x));
                ok &= x.iter().all(|&v| v == 0) || chars.iter().any(|c| pairing(m, c, x) != 0);
                ok &= g.generators().iter().all(|&s| ev.apply(&a.act(s, x)) == dd.act(s, &y));
            }
            out.check(ok && ev.is_isomorphism(), || format!("{}: evaluation is not an isomorphism", label()));
        }
    }
    out
}

pub fn shapiro() -> Outcome {
    let mut out = Outcome::default();
    for g in shapiro_groups() {
        for members in g.all_subgroups() {
            let sub = SubgroupWithTransversal::from_members(g.clone(), &members).unwrap();
            let h = sub.group.clone();
            for a in shapiro_modules(&h) {
                let label = |i: usize| format!("{} ⊇ {:?}, {}, i={i}", g.name(), members, describe(&a));
                let (co, ind) = match (coinduce(&sub, &a), induce(&sub, &a)) {
                    (Ok(co), Ok(ind)) => (co, ind),
                    (Err(e), _) | (_, Err(e)) => {
                        out.fail(format!("{}: {e}", label(0)));
                        continue;
                    }
                };
                for i in 0..=2 {
                    match (cohomology(&g, &co, i), cohomology(&h, &a, i)) {
                        (Ok(x), Ok(y)) => out.expect_eq(&x.value, &y.value, || format!("{}: H^i(G, Coind) vs H^i(H, A)", label(i))),
                        (Err(e), _) | (_, Err(e)) => out.fail(format!("{}: {e}", label(i))),
                    }
                    match (homology(&g, &ind, i), homology(&h, &a, i)) {
                        (Ok(x), Ok(y)) => out.expect_eq(&x, &y, || format!("{}: H_i(G, Ind) vs H_i(H, A)", label(i))),
                        (Err(e), _) | (_, Err(e)) => out.fail(format!("{}: {e}", label(i))),
                    }
                }
            }
        }
    }
    out
}

/// Trivial modules of order at most 9 and up to two characters per modulus, plus permutation modules.
fn five_term_modules(g: &Arc<FiniteGroup>) -> Vec<GModule> {
    let all = modules(g, 9);
    let mut per_modulus: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    all.into_iter()
        .filter(|a| {
            if a.is_trivial_action() {
                return true;
            }
            let n = per_modulus.entry(a.moduli().to_vec()).or_insert(0);
            *n += 1;
            *n <= 2
        })
        .collect()
}

pub fn five_term() -> Outcome {
    let mut out = Outcome::default();
    let mut saw_s3 = false;
    for g in groups_to_16() {
        let pool = five_term_modules(&g);
        for members in g.normal_subgroups() {
            let nsub = SubgroupWithTransversal::from_members(g.clone(), &members).unwrap();
            let (q, proj) = quotient_by(&g, &members).unwrap();
            for a in &pool {
                let label = || format!("{} ⊵ {:?}, {}", g.name(), members, describe(a));
                saw_s3 |= g.name() == "S3" && members.len() == 3 && a.moduli() == [3] && a.is_trivial_action();
                let r = match five_term_check(&nsub, a) {
                    Ok(r) => r,
                    Err(e) => {
                        out.fail(format!("{}: {e}", label()));
                        continue;
                    }
                };
                out.check(r.is_exact(), || format!("{}: not exact", label()));
                let via_der = h1_via_derivations(&g, a).map(|d| d.value.value);
                let fixed = invariants_under(a, &members).and_then(|(f, _)| f.descend(&proj));
                let q_der = fixed.map(|f| h1_via_derivations(&q, &f).map(|d| d.value.value));
                match (via_der, q_der) {
                    (Ok(x), Ok(Ok(y))) => {
                        out.expect_eq(&r.h1_group, &x, || format!("{}: H^1(G, A) vs derivations", label()));
                        out.expect_eq(&r.h1_quotient, &y, || format!("{}: H^1(G/N, A^N) vs derivations", label()));
                    }
                    (Err(e), _) | (_, Ok(Err(e))) => out.fail(format!("{}: {e}", label())),
                    (_, Err(e)) => out.fail(format!("{}: {e}", label())),
                }
            }
        }
    }
    out.check(saw_s3, || "(S3, A3, Z/3) was not exercised".into());
    out
}

fn integral_homology_of_cyclic(n: u64, j: usize) -> FgAbelianGroup {
    match j {
        0 => FgAbelianGroup::free(1),
        _ if j % 2 == 1 => FgAbelianGroup::cyclic(n),
        _ => FgAbelianGroup::trivial(),
    }
}

fn integral_homology_of_s3(j: usize) -> FgAbelianGroup {
    [FgAbelianGroup::free(1), FgAbelianGroup::cyclic(2), FgAbelianGroup::trivial(), FgAbelianGroup::cyclic(6)][j].clone()
}

type HomologyOracle = Box<dyn Fn(usize) -> FgAbelianGroup>;

pub fn uct() -> Outcome {
    let mut out = Outcome::default();
    let mut required: Vec<(Arc<FiniteGroup>, HomologyOracle)> = Vec::new();
    for n in 1..=12u64 {
        required.push((Arc::new(FiniteGroup::cyclic(n).unwrap()), Box::new(move |j| integral_homology_of_cyclic(n, j))));
    }
    required.push((Arc::new(FiniteGroup::symmetric(3).unwrap()), Box::new(integral_homology_of_s3)));
    let others = [
        FiniteGroup::abelian(&[2, 2]).unwrap(),
        FiniteGroup::dihedral(4).unwrap(),
        FiniteGroup::quaternion().unwrap(),
        FiniteGroup::alternating(4).unwrap(),
    ];
    let mut inconclusive = 0;
    let cases: Vec<(Arc<FiniteGroup>, Option<&HomologyOracle>)> = required
        .iter()
        .map(|(g, f)| (g.clone(), Some(f)))
        .chain(others.into_iter().map(|g| (Arc::new(g), None)))
        .collect();
    for (g, oracle) in cases {
        for factors in [&[2u64][..], &[3], &[4], &[6], &[9], &[2, 2]] {
            let a = GModule::trivial(g.clone(), factors).unwrap();
            for i in 0..=3 {
                let label = || format!("{}, Z{:?}, degree {i}", g.name(), factors);
                let r = match uct_check(&g, &a, i, DEFAULT_COEFFICIENT_CAP, DEFAULT_WINDOW) {
                    Ok(r) => r,
                    Err(e) => {
                        out.fail(format!("{}: {e}", label()));
                        continue;
                    }
                };
                match (&r.verdict, oracle) {
                    (UctVerdict::Holds, Some(f)) => {
                        let want = f(i);
                        out.check(r.integral[i].as_ref() == Some(&want), || {
                            format!("{}: H_i(G, Z) approximated by {:?}, expected {want}", label(), r.integral[i])
                        });
                    }
                    (UctVerdict::Holds, None) => out.cases += 1,
                    (UctVerdict::Fails(why), _) => out.fail(format!("{}: {why}", label())),
                    (UctVerdict::Inconclusive(why), Some(_)) => out.fail(format!("{}: inconclusive ({why})", label())),
                    (UctVerdict::Inconclusive(_), None) => inconclusive += 1,
                }
            }
        }
    }
    out.notes.push(format!("{inconclusive} inconclusive cases outside the required groups"));
    out
}

pub fn zhat_goodness() -> Outcome {
    let mut out = Outcome::default();
    let t = QuotientTower::zhat(5).unwrap();
    for m in [2u64, 3, 4, 6, 8, 12] {
        let a = GModule::trivial(t.level(0).clone(), &[m]).unwrap();
        let want = [FgAbelianGroup::cyclic(m), FgAbelianGroup::cyclic(m), FgAbelianGroup::trivial(), FgAbelianGroup::trivial()];
        for (n, w) in want.into_iter().enumerate() {
            match limit_cohomology_discrete(&t, &a, n, 2) {
                Ok(r) => {
                    let expected = LimitVerdict::Stabilized(w);
                    out.check(r.verdict == expected, || {
                        format!("H^{n}(Ẑ, Z/{m}), depth 5, window 2: {}, expected {}", verdict_text(&r.verdict), verdict_text(&expected))
                    });
                }
                Err(e) => out.fail(format!("H^{n}(Ẑ, Z/{m}): {e}")),
            }
        }
    }
    out
}

/// Tower, expected cd, and the parameters used for the cd and dualizing estimates.
struct CdCase {
    tower: QuotientTower,
    cd: usize,
    window: usize,
    cd_cap: u64,
    dualizing_cap: u64,
}

pub fn cd_and_duality() -> Outcome {
    let mut out = Outcome::default();
    let cases = [
        CdCase { tower: QuotientTower::zhat(12).unwrap(), cd: 1, window: 2, cd_cap: 6, dualizing_cap: 24 },
        CdCase { tower: QuotientTower::zp(2, 10).unwrap(), cd: 1, window: 2, cd_cap: 8, dualizing_cap: 8 },
        CdCase { tower: QuotientTower::zhat_power(2, 12).unwrap(), cd: 2, window: 3, cd_cap: 8, dualizing_cap: 6 },
    ];
    for c in cases {
        let label = c.tower.label().to_string();
        match cd_estimate(&c.tower, 3, c.cd_cap, c.window) {
            Ok(r) => out.check(r.estimate == c.cd, || format!("{label}: cd estimate {}, expected {}", r.estimate, c.cd)),
            Err(e) => out.fail(format!("{label}: {e}")),
        }
        match dualizing_module_estimate(&c.tower, c.cd, c.dualizing_cap, c.window) {
            Ok(r) => {
                out.check(r.class == DualityClass::OrientablePoincare, || format!("{label}: {:?}", r.class));
                let ok = !r.levels.is_empty()
                    && r.levels.iter().all(|l| l.action_trivial && l.value == FgAbelianGroup::cyclic(l.coefficient_order));
                out.check(ok, || format!("{label}: levels are not Z/m_j with trivial action"));
                out.notes.push(format!("{label}: {}", r.verdict));
            }
            Err(e) => out.fail(format!("{label}: {e}")),
        }
    }
    out
}

/// Number of `G`-maps `N → M`, by enumerating images of the coordinate generators of `N`.
fn count_equivariant_maps(n: &GModule, m: &GModule) -> u64 {
    let g = n.group();
    let targets = m.elements();
    let choices: Vec<Vec<&Vec<u64>>> = n
        .moduli()
        .iter()
        .map(|&k| targets.iter().filter(|y| m.reduce(&y.iter().map(|v| v * k).collect::<Vec<_>>()).iter().all(|&v| v == 0)).collect())
        .collect();
    let apply = |images: &[&Vec<u64>], x: &[u64]| -> Vec<u64> {
        let mut acc = vec![0u64; m.dim()];
        for (xi, img) in x.iter().zip(images) {
            for (a, v) in acc.iter_mut().zip(img.iter()) {
                *a += xi * v;
            }
        }
        m.reduce(&acc)
    };
    let basis: Vec<Vec<u64>> = (0..n.dim()).map(|i| (0..n.dim()).map(|j| u64::from(i == j)).collect()).collect();
    let mut count = 0;
    let mut idx = vec![0usize; n.dim()];
    loop {
        let images: Vec<&Vec<u64>> = idx.iter().enumerate().map(|(i, &k)| choices[i][k]).collect();
        let ok = g.generators().iter().all(|&s| basis.iter().all(|e| apply(&images, &n.act(s, e)) == m.act(s, &apply(&images, e))));
        count += u64::from(ok);
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return count;
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

pub fn tensor_hom() -> Outcome {
    let mut out = Outcome::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let groups: Vec<Arc<FiniteGroup>> = small_groups().into_iter().filter(|g| g.order() <= 8).collect();
    let pools: Vec<Vec<GModule>> = groups.iter().map(|g| modules(g, 16)).collect();
    for _ in 0..100 {
        let gi = rng.gen_range(0..groups.len());
        let pool = &pools[gi];
        let m = &pool[rng.gen_range(0..pool.len())];
        let n = &pool[rng.gen_range(0..pool.len())];
        let label = || format!("{}, M = {}, N = {}", groups[gi].name(), describe(m), describe(n));
        let t = match tensor_product(m, n) {
            Ok(t) => t,
            Err(e) => {
                out.fail(format!("{}: {e}", label()));
                continue;
            }
        };
        let orders: Vec<u64> = m.moduli().iter().flat_map(|&a| n.moduli().iter().map(move |&b| gcd(a, b))).collect();
        let hom_z = FgAbelianGroup::from_orders(&orders);
        out.expect_eq(&pontryagin_dual(&t).underlying(), &hom_z, || format!("{}: (M ⊗ N)* vs Hom(N, M*)", label()));
        let md = pontryagin_dual(m);
        let count = count_equivariant_maps(n, &md);
        match hom_g(n, &md) {
            Ok(h) => {
                let got = h.group.order_u64().unwrap_or(0);
                out.check(got == count, || format!("{}: |Hom_G(N, M*)| = {got}, enumeration gives {count}", label()));
            }
            Err(e) => out.fail(format!("{}: {e}", label())),
        }
        let co = coinvariants(&t).0.order_u64().unwrap_or(0);
        out.check(co == count, || format!("{}: |(M ⊗ N)_G| = {co}, |Hom_G(N, M*)| = {count}", label()));
    }
    out
}

/// Jobs covering every task, used for the determinism check.
pub const DETERMINISM_JOBS: [&str; 11] = [
    r#"{"task":"cohomology","group":{"type":"cyclic","n":4},"module":{"type":"trivial","factors":[6]},"degree":2}"#,
    r#"{"task":"homology","group":{"type":"symmetric","n":3},"module":{"type":"regular","m":2},"degree":1}"#,
    r#"{"task":"h1","group":{"type":"dihedral","n":4},"module":{"type":"character","m":3,"scalars":[1,2]}}"#,
    r#"{"task":"dual","group":{"type":"quaternion"},"module":{"type":"trivial","factors":[2,4]}}"#,
    r#"{"task":"limit-cohomology","tower":{"preset":"zhat","levels":6},"module":{"type":"trivial","factors":[6]},"degree":1}"#,
    r#"{"task":"limit-homology","tower":{"preset":"zp","p":2,"levels":5},"module":{"type":"trivial","factors":[4]},"degree":1}"#,
    r#"{"task":"cd","tower":{"preset":"zp","p":3,"levels":5},"degree_cap":2,"coefficient_cap":4}"#,
    r#"{"task":"dualizing-module","tower":{"preset":"zp","p":2,"levels":8},"coefficient_cap":8}"#,
    r#"{"task":"five-term","group":{"type":"dihedral","n":3},"subgroup":{"generators":[1]},"module":{"type":"trivial","factors":[3]}}"#,
    r#"{"task":"shapiro-check","group":{"type":"alternating","n":4},"subgroup":{"generators":[1]},"module":{"type":"trivial","factors":[2]}}"#,
    r#"{"task":"uct-check","group":{"type":"cyclic","n":6},"module":{"type":"trivial","factors":[4]},"degree":2}"#,
];

pub fn determinism() -> Outcome {
    let mut out = Outcome::default();
    for text in DETERMINISM_JOBS {
        let job = match parse_job(text) {
            Ok(j) => j,
            Err(e) => {
                out.fail(format!("{text}: {e}"));
                continue;
            }
        };
        let echo = job.to_json();
        out.check(crate::job::parse_job_value(&echo).as_ref() == Ok(&job), || format!("{text}: job echo does not parse back"));
        let first = run_job(&job);
        out.check(first.is_ok(), || format!("{text}: {}", first.error().unwrap_or("failed")));
        let second = run_job(&job);
        for format in [Format::Json, Format::Table] {
            out.check(render_report(&first, format) == render_report(&second, format), || {
                format!("{text}: {} reports differ", format.as_str())
            });
        }
        out.check(to_json_text(&first.document) == to_json_text(&second.document), || format!("{text}: documents differ"));
    }
    out
}
