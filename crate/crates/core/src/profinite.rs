//! Profinite groups as towers of finite quotients, with truncated limits of their (co)homology.
//!
//! Direct limits over quotient levels are estimated by stable images: with window `w` and deepest
//! level `T` the estimate is the image of level `T − w` in level `T`, and the verdict is
//! `Stabilized` when the last `w` transitions carry these images isomorphically onto each other.
//! Inverse limits (homology over levels, and any limit over a coefficient tower) are `Stabilized`
//! when the last `w` transitions are isomorphisms; otherwise the raw tower is reported.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

use crate::cohomology::{
    coefficient_map_between, cohomology, cohomology_periodic, inflation_between, periodic_inflation_between,
    CochainModel, CohomologyError, CohomologyGroup,
};
use crate::exact_algebra::local::factorize;
use crate::exact_algebra::{AlgebraError, FgAbelianGroup, IntMatrix, Subquotient, SubquotientMap};
use crate::gmodules::{pontryagin_dual, GModule, ModMatrix, ModuleError, ModuleMap};
use crate::groups::{FiniteGroup, GroupError, Homomorphism};
use crate::par;

pub const DEFAULT_WINDOW: usize = 2;
pub const DEFAULT_ZHAT_DEPTH: usize = 5;
pub const DEFAULT_ZP_DEPTH: usize = 5;
pub const DEFAULT_ZHAT_POWER_DEPTH: usize = 4;
/// Largest group ring `Z/m[Q]` (by `|Q|`) used as a coefficient module in scans.
pub const DEFAULT_REGULAR_DIM_CAP: usize = 36;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfiniteError {
    #[error("a tower needs at least two levels, got {0}")]
    TooShallow(usize),
    #[error("invalid tower parameter: {0}")]
    InvalidParameter(String),
    #[error("projection {0} does not connect consecutive levels")]
    Disconnected(usize),
    #[error("projection from level {0} to level {1} is not surjective")]
    NotSurjective(usize, usize),
    #[error("module is not defined over any level of the tower")]
    UnattachedModule,
    #[error("coefficient tower: {0}")]
    BadModuleTower(String),
    #[error("window must be at least 1")]
    ZeroWindow,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Preset towers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerSpec {
    /// `Z/1! ← Z/2! ← … ← Z/levels!`
    Zhat { levels: usize },
    /// `Z/p ← Z/p² ← … ← Z/p^levels`
    Zp { p: u64, levels: usize },
    /// `(Z/k!)^rank` for `k = 1..=levels`
    ZhatPower { rank: usize, levels: usize },
}

impl TowerSpec {
    pub fn zhat() -> Self {
        TowerSpec::Zhat { levels: DEFAULT_ZHAT_DEPTH }
    }

    pub fn zp(p: u64) -> Self {
        TowerSpec::Zp { p, levels: DEFAULT_ZP_DEPTH }
    }

    pub fn zhat_power(rank: usize) -> Self {
        TowerSpec::ZhatPower { rank, levels: DEFAULT_ZHAT_POWER_DEPTH }
    }
}

pub fn build_tower(spec: &TowerSpec) -> Result<QuotientTower, ProfiniteError> {
    match *spec {
        TowerSpec::Zhat { levels } => QuotientTower::zhat(levels),
        TowerSpec::Zp { p, levels } => QuotientTower::zp(p, levels),
        TowerSpec::ZhatPower { rank, levels } => QuotientTower::zhat_power(rank, levels),
    }
}

fn factorial(k: u64) -> Option<u64> {
    (1..=k).try_fold(1u64, |a, x| a.checked_mul(x))
}

fn is_standard_reduction(p: &Homomorphism) -> bool {
    match (p.source.cyclic_moduli(), p.target.cyclic_moduli()) {
        (Some(a), Some(b)) => {
            a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| x % y == 0)
                && p.generator_images() == p.target.generators()
        }
        _ => false,
    }
}

/// Surjectivity without enumerating large cyclic-product targets.
fn surjective(p: &Homomorphism) -> bool {
    let Some(moduli) = p.target.cyclic_moduli() else {
        return p.is_surjective();
    };
    let r = moduli.len();
    let rel = IntMatrix::diagonal(&moduli.iter().map(|&m| BigInt::from(m)).collect::<Vec<_>>());
    let imgs: Vec<Vec<u64>> = p.generator_images().iter().map(|&y| p.target.exponents(y)).collect();
    let gens = IntMatrix::from_fn(r, imgs.len(), |i, j| BigInt::from(imgs[j][i]));
    let sq = Subquotient::new(&rel, &gens, &IntMatrix::zeros(r, 0));
    sq.group.order() == Some(moduli.iter().map(|&m| num_bigint::BigUint::from(m)).product())
}

/// A profinite group presented as a chain of finite quotients `G_0 ← G_1 ← …`.
#[derive(Clone, Debug)]
pub struct QuotientTower {
    label: String,
    levels: Vec<Arc<FiniteGroup>>,
    projections: Vec<Homomorphism>,
    /// `composites[from][to]` for `to < from`.
    composites: Vec<Vec<Homomorphism>>,
    cyclic: bool,
}

impl QuotientTower {
    /// Explicit tower; `projections[k]` maps level `k + 1` onto level `k`.
    pub fn new(label: &str, levels: Vec<Arc<FiniteGroup>>, projections: Vec<Homomorphism>) -> Result<Self, ProfiniteError> {
        if levels.len() < 2 {
            return Err(ProfiniteError::TooShallow(levels.len()));
        }
        if projections.len() + 1 != levels.len() {
            return Err(ProfiniteError::InvalidParameter(format!(
                "{} levels need {} projections, got {}",
                levels.len(),
                levels.len() - 1,
                projections.len()
            )));
        }
        for (k, p) in projections.iter().enumerate() {
            if *p.source != *levels[k + 1] || *p.target != *levels[k] {
                return Err(ProfiniteError::Disconnected(k));
            }
            if !surjective(p) {
                return Err(ProfiniteError::NotSurjective(k + 1, k));
            }
        }
        let cyclic = projections.iter().all(is_standard_reduction);
        let mut composites: Vec<Vec<Homomorphism>> = vec![Vec::new(); levels.len()];
        for from in 1..levels.len() {
            let mut row = Vec::with_capacity(from);
            for to in 0..from {
                let h = if to + 1 == from {
                    projections[to].clone()
                } else if cyclic {
                    Homomorphism::reduction(levels[from].clone(), levels[to].clone())?
                } else {
                    composites[from - 1][to].compose(&projections[from - 1])?
                };
                if to + 1 < from && !surjective(&h) {
                    return Err(ProfiniteError::NotSurjective(from, to));
                }
                row.push(h);
            }
            composites[from] = row;
        }
        Ok(QuotientTower { label: label.to_string(), levels, projections, composites, cyclic })
    }

    fn from_moduli(label: &str, moduli: Vec<Vec<u64>>) -> Result<Self, ProfiniteError> {
        let levels: Vec<Arc<FiniteGroup>> =
            moduli.iter().map(|m| FiniteGroup::abelian(m).map(Arc::new)).collect::<Result<_, _>>()?;
        let projections = (0..levels.len().saturating_sub(1))
            .map(|k| Homomorphism::reduction(levels[k + 1].clone(), levels[k].clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(label, levels, projections)
    }

    pub fn zhat(levels: usize) -> Result<Self, ProfiniteError> {
        Self::zhat_power_labelled("zhat", 1, levels)
    }

    pub fn zp(p: u64, levels: usize) -> Result<Self, ProfiniteError> {
        if factorize(p).len() != 1 || factorize(p)[0].1 != 1 {
            return Err(ProfiniteError::InvalidParameter(format!("{p} is not prime")));
        }
        let moduli = (1..=levels as u32)
            .map(|k| p.checked_pow(k).map(|q| vec![q]))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| ProfiniteError::InvalidParameter(format!("{p}^{levels} overflows")))?;
        Self::from_moduli(&format!("zp({p})"), moduli)
    }

    pub fn zhat_power(rank: usize, levels: usize) -> Result<Self, ProfiniteError> {
        Self::zhat_power_labelled(&format!("zhat{rank}"), rank, levels)
    }

    fn zhat_power_labelled(label: &str, rank: usize, levels: usize) -> Result<Self, ProfiniteError> {
        if rank == 0 {
            return Err(ProfiniteError::InvalidParameter("rank must be positive".into()));
        }
        let moduli = (1..=levels as u64)
            .map(|k| factorial(k).map(|f| vec![f; rank]))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| ProfiniteError::InvalidParameter(format!("{levels}! overflows")))?;
        Self::from_moduli(label, moduli)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> &Arc<FiniteGroup> {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Arc<FiniteGroup>] {
        &self.levels
    }

    pub fn projection(&self, k: usize) -> &Homomorphism {
        &self.projections[k]
    }

    /// True when every level is a product of cyclic groups and every projection a generator-preserving
    /// reduction; such towers are computed with the periodic cochain model.
    pub fn is_cyclic_product(&self) -> bool {
        self.cyclic
    }

    /// Composite projection `G_from ↠ G_to` for `from ≥ to`.
    pub fn projection_between(&self, from: usize, to: usize) -> Result<Homomorphism, ProfiniteError> {
        if from < to || from >= self.depth() {
            return Err(ProfiniteError::InvalidParameter(format!("no projection from level {from} to level {to}")));
        }
        if from == to {
            let g = self.levels[to].clone();
            return Ok(Homomorphism::from_generator_images(g.clone(), g.clone(), g.generators().to_vec())?);
        }
        Ok(self.composites[from][to].clone())
    }

    /// First level whose group equals `g`.
    pub fn level_of(&self, g: &FiniteGroup) -> Option<usize> {
        self.levels.iter().position(|l| **l == *g)
    }

    /// A module over level `from`, viewed over the deeper level `to`.
    pub fn inflate(&self, a: &GModule, from: usize, to: usize) -> Result<GModule, ProfiniteError> {
        if **a.group() != *self.levels[from] {
            return Err(ProfiniteError::Module(ModuleError::GroupMismatch));
        }
        if from == to {
            return Ok(a.clone());
        }
        Ok(a.restrict_along(&self.projection_between(to, from)?)?)
    }

    pub fn model(&self) -> CochainModel {
        if self.cyclic {
            CochainModel::Periodic
        } else {
            CochainModel::Bar
        }
    }

    fn level_cohomology(&self, m: &GModule, n: usize) -> Result<CohomologyGroup, CohomologyError> {
        if self.cyclic {
            cohomology_periodic(m, n)
        } else {
            cohomology(m.group(), m, n)
        }
    }

    fn level_inflation(
        &self,
        k: usize,
        source: &CohomologyGroup,
        target: &CohomologyGroup,
    ) -> Result<SubquotientMap, CohomologyError> {
        let p = &self.projections[k];
        let map = if self.cyclic {
            periodic_inflation_between(p, source.clone(), target.clone())?
        } else {
            inflation_between(p, source.clone(), target.clone())?
        };
        Ok(map.map)
    }

    /// Exponent of level `k`.
    pub fn level_exponent(&self, k: usize) -> u64 {
        let g = &self.levels[k];
        match g.cyclic_moduli() {
            Some(m) => m.iter().fold(1u64, |a, &b| a.lcm(&b)),
            None => g.elements().fold(1u64, |a, x| a.lcm(&(g.element_order(x) as u64))),
        }
    }
}

/// Coefficients `A_0 ↞ A_1 ↞ …`, each `A_j` a module over level `attach[j]` of a tower.
#[derive(Clone, Debug)]
pub struct ModuleTower {
    attach: Vec<usize>,
    modules: Vec<GModule>,
    maps: Vec<ModMatrix>,
}

impl ModuleTower {
    /// `maps[j]` is the coordinate matrix of the surjection `A_{j+1} → A_j`.
    pub fn new(
        t: &QuotientTower,
        attach: Vec<usize>,
        modules: Vec<GModule>,
        maps: Vec<ModMatrix>,
    ) -> Result<Self, ProfiniteError> {
        let bad = |s: String| Err(ProfiniteError::BadModuleTower(s));
        if modules.is_empty() || attach.len() != modules.len() || maps.len() + 1 != modules.len() {
            return bad("need one attachment level per module and one map per consecutive pair".into());
        }
        for (j, (&l, a)) in attach.iter().zip(&modules).enumerate() {
            if l >= t.depth() || **a.group() != **t.level(l) {
                return bad(format!("module {j} is not defined over level {l}"));
            }
            if j > 0 && attach[j - 1] > l {
                return bad("attachment levels must be nondecreasing".into());
            }
        }
        let tower = ModuleTower { attach, modules, maps };
        for j in 0..tower.maps.len() {
            let f = tower.map_at(t, j, tower.attach[j + 1]).map_err(|e| ProfiniteError::BadModuleTower(format!("map {j}: {e}")))?;
            if !f.is_surjective() {
                return bad(format!("map {j} is not surjective"));
            }
        }
        Ok(tower)
    }

    /// The same module at every coefficient level.
    pub fn constant(t: &QuotientTower, a: &GModule, len: usize) -> Result<Self, ProfiniteError> {
        let l = t.level_of(a.group()).ok_or(ProfiniteError::UnattachedModule)?;
        let k = a.dim();
        Self::new(t, vec![l; len], vec![a.clone(); len], vec![ModMatrix::identity(k); len.saturating_sub(1)])
    }

    /// Trivial `Z/m_0 ↞ Z/m_1 ↞ …` over level 0, with `m_j | m_{j+1}`.
    pub fn trivial_cyclic(t: &QuotientTower, orders: &[u64]) -> Result<Self, ProfiniteError> {
        let g = t.level(0).clone();
        let modules: Vec<GModule> =
            orders.iter().map(|&m| GModule::trivial(g.clone(), &[m])).collect::<Result<_, _>>()?;
        let maps = (0..modules.len().saturating_sub(1))
            .map(|j| {
                let mut a = ModMatrix::zeros(modules[j].dim(), modules[j + 1].dim());
                if a.rows == 1 && a.cols == 1 {
                    a.set(0, 0, 1);
                }
                a
            })
            .collect();
        Self::new(t, vec![0; modules.len()], modules, maps)
    }

    /// Truncated group rings `Z/m_j[G_{l_j}]` with coefficient reduction and the projections on basis elements.
    pub fn group_rings(t: &QuotientTower, levels: &[usize], orders: &[u64]) -> Result<Self, ProfiniteError> {
        if levels.len() != orders.len() {
            return Err(ProfiniteError::BadModuleTower("one coefficient order per level required".into()));
        }
        let modules: Vec<GModule> = levels
            .iter()
            .zip(orders)
            .map(|(&l, &m)| GModule::regular(t.level(l).clone(), m))
            .collect::<Result<_, _>>()?;
        let mut maps = Vec::new();
        for j in 0..levels.len().saturating_sub(1) {
            let pi = t.projection_between(levels[j + 1], levels[j])?;
            let (src, tgt) = (modules[j + 1].dim(), modules[j].dim());
            let mut a = ModMatrix::zeros(tgt, src);
            if orders[j] > 1 {
                for x in 0..src {
                    a.set(pi.image(x), x, 1);
                }
            }
            maps.push(a);
        }
        Self::new(t, levels.to_vec(), modules, maps)
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn module(&self, j: usize) -> &GModule {
        &self.modules[j]
    }

    pub fn attach(&self, j: usize) -> usize {
        self.attach[j]
    }

    /// `A_{j+1} → A_j` as a map of modules over level `level ≥ attach[j + 1]`.
    pub fn map_at(&self, t: &QuotientTower, j: usize, level: usize) -> Result<ModuleMap, ProfiniteError> {
        let src = t.inflate(&self.modules[j + 1], self.attach[j + 1], level)?;
        let tgt = t.inflate(&self.modules[j], self.attach[j], level)?;
        Ok(ModuleMap::new(src, tgt, self.maps[j].clone())?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitVerdict {
    Stabilized(FgAbelianGroup),
    /// Raw inverse system; `surjective[i]` describes the transition from entry `i + 1` to entry `i`.
    Tower { values: Vec<FgAbelianGroup>, surjective: Vec<bool> },
    Inconclusive(String),
}

impl LimitVerdict {
    pub fn stabilized(&self) -> Option<&FgAbelianGroup> {
        match self {
            LimitVerdict::Stabilized(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitDirection {
    /// Transitions go from entry `i` to entry `i + 1`.
    Direct,
    /// Transitions go from entry `i + 1` to entry `i`.
    Inverse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitParameters {
    pub degree: usize,
    pub window: usize,
    pub tower_depth: usize,
    /// Tower level of the first entry (direct limits and homology over levels).
    pub first_level: usize,
    pub model: CochainModel,
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub direction: LimitDirection,
    pub labels: Vec<String>,
    pub values: Vec<FgAbelianGroup>,
    pub transitions: Vec<SubquotientMap>,
    /// Direct limits only: `Image(entry i − w → entry i)` for `i ≥ w`.
    pub stable_images: Vec<Option<FgAbelianGroup>>,
    pub verdict: LimitVerdict,
    pub parameters: LimitParameters,
    /// Truncations and other remarks.
    pub notes: Vec<String>,
}

impl LimitReport {
    pub fn surjectivity(&self) -> Vec<bool> {
        self.transitions.iter().map(SubquotientMap::is_surjective).collect()
    }

    /// Composite transition from entry `from` to entry `to` (`from ≤ to` for direct, `from ≥ to` for inverse limits).
    pub fn composite(&self, from: usize, to: usize) -> Result<SubquotientMap, ProfiniteError> {
        match self.direction {
            LimitDirection::Direct if from <= to && to < self.values.len() => {
                Ok(compose_range(&self.values, &self.transitions, from, to)?)
            }
            LimitDirection::Inverse if to <= from && from < self.values.len() => {
                let mut m = SubquotientMap::identity(&self.values[from]);
                for i in (to..from).rev() {
                    m = self.transitions[i].compose(&m)?;
                }
                Ok(m)
            }
            _ => Err(ProfiniteError::InvalidParameter(format!("no composite from entry {from} to entry {to}"))),
        }
    }
}

fn compose_range(
    values: &[FgAbelianGroup],
    transitions: &[SubquotientMap],
    from: usize,
    to: usize,
) -> Result<SubquotientMap, AlgebraError> {
    let mut m = SubquotientMap::identity(&values[from]);
    for t in &transitions[from..to] {
        m = t.compose(&m)?;
    }
    Ok(m)
}

struct StableImage {
    verdict: LimitVerdict,
    images: Vec<Option<FgAbelianGroup>>,
    last: Option<Subquotient>,
}

/// Stable-image criterion for a direct system.
fn stable_image(values: &[FgAbelianGroup], transitions: &[SubquotientMap], w: usize) -> Result<StableImage, AlgebraError> {
    let len = values.len();
    let mut subs: Vec<Option<Subquotient>> = vec![None; len];
    for (i, slot) in subs.iter_mut().enumerate().skip(w) {
        *slot = Some(compose_range(values, transitions, i - w, i)?.image());
    }
    let images = subs.iter().map(|s| s.as_ref().map(|s| s.group.clone())).collect();
    if len < 2 * w + 1 {
        return Ok(StableImage {
            verdict: LimitVerdict::Inconclusive(format!("{len} levels available, window {w} needs {}", 2 * w + 1)),
            images,
            last: subs.pop().flatten(),
        });
    }
    let t_last = len - 1;
    let mut failure = None;
    for i in t_last - w..t_last {
        let here = subs[i].as_ref().unwrap().group.order();
        let carried = compose_range(values, transitions, i - w, i + 1)?.image().group.order();
        let next = subs[i + 1].as_ref().unwrap().group.order();
        if here != carried || carried != next {
            failure = Some(format!(
                "stable image not carried isomorphically between levels {i} and {}",
                i + 1
            ));
            break;
        }
    }
    let last = subs.pop().flatten();
    let verdict = match failure {
        Some(why) => LimitVerdict::Inconclusive(why),
        None => LimitVerdict::Stabilized(last.as_ref().unwrap().group.clone()),
    };
    Ok(StableImage { verdict, images, last })
}

/// Inverse-limit truncation: stabilized when the last `w` transitions are isomorphisms.
fn inverse_verdict(values: &[FgAbelianGroup], transitions: &[SubquotientMap], w: usize) -> LimitVerdict {
    let len = values.len();
    if len > w && transitions[len - 1 - w..].iter().all(SubquotientMap::is_isomorphism) {
        return LimitVerdict::Stabilized(values[len - 1].clone());
    }
    LimitVerdict::Tower { values: values.to_vec(), surjective: transitions.iter().map(SubquotientMap::is_surjective).collect() }
}

/// Induced map between subgroups `s ⊆ source(f)` and `t ⊆ target(f)` with `f(s) ⊆ t`.
fn restrict_to(f: &SubquotientMap, s: &Subquotient, t: &Subquotient) -> Result<SubquotientMap, ProfiniteError> {
    let k = s.group.num_generators();
    let mut cols = Vec::with_capacity(k);
    for j in 0..k {
        let v = f.apply(&s.representatives.column(j));
        let c = t
            .coordinates(&v)
            .ok_or_else(|| CohomologyError::Internal("map does not preserve the stable images".into()))?;
        cols.push(c);
    }
    let m = IntMatrix::from_fn(t.group.num_generators(), k, |i, j| cols[j][i].clone());
    Ok(SubquotientMap::new(s.group.clone(), t.group.clone(), m)?)
}

fn check_window(window: usize) -> Result<(), ProfiniteError> {
    if window == 0 {
        Err(ProfiniteError::ZeroWindow)
    } else {
        Ok(())
    }
}

/// Levelwise groups of a direct limit together with its report.
struct DirectLimit {
    groups: Vec<CohomologyGroup>,
    report: LimitReport,
    stable: Option<Subquotient>,
}

fn direct_limit(
    t: &QuotientTower,
    a: &GModule,
    attach: usize,
    n: usize,
    window: usize,
) -> Result<DirectLimit, ProfiniteError> {
    check_window(window)?;
    let levels: Vec<usize> = (attach..t.depth()).collect();
    let computed = par::map(&levels, |&k| -> Result<CohomologyGroup, ProfiniteError> {
        let m = t.inflate(a, attach, k)?;
        Ok(t.level_cohomology(&m, n)?)
    });
    let mut groups = Vec::new();
    let mut notes = Vec::new();
    for (k, r) in levels.iter().zip(computed) {
        match r {
            Ok(g) => groups.push(g),
            Err(e @ ProfiniteError::Cohomology(CohomologyError::SizeCapExceeded { .. })) if !groups.is_empty() => {
                notes.push(format!("partial: stopped at level {k}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let pairs: Vec<usize> = (0..groups.len().saturating_sub(1)).collect();
    let transitions = par::map(&pairs, |&i| t.level_inflation(attach + i, &groups[i], &groups[i + 1]))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let values: Vec<FgAbelianGroup> = groups.iter().map(|g| g.value.clone()).collect();
    let st = stable_image(&values, &transitions, window)?;
    let report = LimitReport {
        direction: LimitDirection::Direct,
        labels: (attach..attach + values.len()).map(|k| t.level(k).name().to_string()).collect(),
        values,
        transitions,
        stable_images: st.images,
        verdict: st.verdict,
        parameters: LimitParameters { degree: n, window, tower_depth: t.depth(), first_level: attach, model: t.model() },
        notes,
    };
    Ok(DirectLimit { groups, report, stable: st.last })
}

/// `H^n(G, A)` for a discrete module `A` over some level, as a direct limit along inflation.
pub fn limit_cohomology_discrete(
    t: &QuotientTower,
    a: &GModule,
    n: usize,
    window: usize,
) -> Result<LimitReport, ProfiniteError> {
    let attach = t.level_of(a.group()).ok_or(ProfiniteError::UnattachedModule)?;
    Ok(direct_limit(t, a, attach, n, window)?.report)
}

/// `H^n(G, lim A_j)` as the inverse limit of stabilized `H^n(G, A_j)`.
pub fn limit_cohomology_compact(
    t: &QuotientTower,
    coeffs: &ModuleTower,
    n: usize,
    window: usize,
) -> Result<LimitReport, ProfiniteError> {
    check_window(window)?;
    let inner: Vec<DirectLimit> = (0..coeffs.len())
        .map(|j| direct_limit(t, coeffs.module(j), coeffs.attach(j), n, window))
        .collect::<Result<_, _>>()?;
    let deepest = t.depth() - 1;
    let params = LimitParameters { degree: n, window, tower_depth: t.depth(), first_level: 0, model: t.model() };
    let labels: Vec<String> = (0..coeffs.len()).map(|j| format!("A_{j}")).collect();
    let mut values = Vec::new();
    for (j, d) in inner.iter().enumerate() {
        match (&d.report.verdict, d.groups.len() + d.report.parameters.first_level == t.depth()) {
            (LimitVerdict::Stabilized(v), true) => values.push(v.clone()),
            (v, _) => {
                let why = match v {
                    LimitVerdict::Inconclusive(s) => s.clone(),
                    _ => "partial level range".to_string(),
                };
                return Ok(LimitReport {
                    direction: LimitDirection::Inverse,
                    labels,
                    values: inner.iter().map(|d| d.report.values.last().cloned().unwrap_or_else(FgAbelianGroup::trivial)).collect(),
                    transitions: Vec::new(),
                    stable_images: Vec::new(),
                    verdict: LimitVerdict::Inconclusive(format!("coefficient level {j}: {why}")),
                    parameters: params,
                    notes: Vec::new(),
                });
            }
        }
    }
    let mut transitions = Vec::new();
    for j in 0..coeffs.len() - 1 {
        let f = coeffs.map_at(t, j, deepest)?;
        let (hi, lo) = (&inner[j + 1], &inner[j]);
        let m = coefficient_map_between(&f, hi.groups.last().unwrap().clone(), lo.groups.last().unwrap().clone())?;
        transitions.push(restrict_to(&m.map, hi.stable.as_ref().unwrap(), lo.stable.as_ref().unwrap())?);
    }
    let verdict = inverse_verdict(&values, &transitions, window);
    Ok(LimitReport {
        direction: LimitDirection::Inverse,
        labels,
        values,
        transitions,
        stable_images: Vec::new(),
        verdict,
        parameters: params,
        notes: Vec::new(),
    })
}

/// Levelwise `H_n(G_k, A)` computed as duals of `H^n(G_k, A*)`, with coinflation transitions.
fn homology_levels(
    t: &QuotientTower,
    a: &GModule,
    attach: usize,
    n: usize,
    window: usize,
) -> Result<(DirectLimit, LimitReport), ProfiniteError> {
    let dual = direct_limit(t, &pontryagin_dual(a), attach, n, window)?;
    let transitions = dual.report.transitions.iter().map(|m| m.dual()).collect::<Result<Vec<_>, _>>()?;
    let values = dual.report.values.clone();
    let verdict = if values.len() < window + 1 {
        LimitVerdict::Inconclusive(format!("{} levels available, window {window} needs {}", values.len(), window + 1))
    } else {
        inverse_verdict(&values, &transitions, window)
    };
    let report = LimitReport {
        direction: LimitDirection::Inverse,
        labels: dual.report.labels.clone(),
        values,
        transitions,
        stable_images: Vec::new(),
        verdict,
        parameters: dual.report.parameters.clone(),
        notes: dual.report.notes.clone(),
    };
    Ok((dual, report))
}

/// `H_n(G, A)` for a finite module over some level, as the inverse limit along coinflation.
pub fn limit_homology(t: &QuotientTower, a: &GModule, n: usize, window: usize) -> Result<LimitReport, ProfiniteError> {
    check_window(window)?;
    let attach = t.level_of(a.group()).ok_or(ProfiniteError::UnattachedModule)?;
    Ok(homology_levels(t, a, attach, n, window)?.1)
}

/// `H_n(G, lim A_j)` as the inverse limit over the coefficient tower of levelwise limits.
pub fn limit_homology_compact(
    t: &QuotientTower,
    coeffs: &ModuleTower,
    n: usize,
    window: usize,
) -> Result<LimitReport, ProfiniteError> {
    check_window(window)?;
    let inner: Vec<(DirectLimit, LimitReport)> = (0..coeffs.len())
        .map(|j| homology_levels(t, coeffs.module(j), coeffs.attach(j), n, window))
        .collect::<Result<_, _>>()?;
    let deepest = t.depth() - 1;
    let params = LimitParameters { degree: n, window, tower_depth: t.depth(), first_level: 0, model: t.model() };
    let labels: Vec<String> = (0..coeffs.len()).map(|j| format!("A_{j}")).collect();
    let mut values = Vec::new();
    for (j, (d, r)) in inner.iter().enumerate() {
        let complete = d.groups.len() + r.parameters.first_level == t.depth();
        match (&r.verdict, complete) {
            (LimitVerdict::Stabilized(v), true) => values.push(v.clone()),
            _ => {
                return Ok(LimitReport {
                    direction: LimitDirection::Inverse,
                    labels,
                    values: inner.iter().map(|(_, r)| r.values.last().cloned().unwrap_or_else(FgAbelianGroup::trivial)).collect(),
                    transitions: Vec::new(),
                    stable_images: Vec::new(),
                    verdict: LimitVerdict::Inconclusive(format!("coefficient level {j}: levelwise limit did not stabilize")),
                    parameters: params,
                    notes: Vec::new(),
                });
            }
        }
    }
    let mut transitions = Vec::new();
    for j in 0..coeffs.len() - 1 {
        let f = coeffs.map_at(t, j, deepest)?.dual();
        let (lo, hi) = (&inner[j].0, &inner[j + 1].0);
        let m = coefficient_map_between(&f, lo.groups.last().unwrap().clone(), hi.groups.last().unwrap().clone())?;
        transitions.push(m.map.dual()?);
    }
    let verdict = inverse_verdict(&values, &transitions, window);
    Ok(LimitReport {
        direction: LimitDirection::Inverse,
        labels,
        values,
        transitions,
        stable_images: Vec::new(),
        verdict,
        parameters: params,
        notes: Vec::new(),
    })
}

/// A finite quotient `Q` of the tower used for group-ring coefficients `Z/m[Q]`.
#[derive(Clone, Debug)]
struct RegularQuotient {
    label: String,
    attach: usize,
    group: Arc<FiniteGroup>,
    /// Projection from the attachment level onto `group`.
    proj: Option<Homomorphism>,
}

impl RegularQuotient {
    fn module(&self, m: u64) -> Result<GModule, ProfiniteError> {
        let r = GModule::regular(self.group.clone(), m)?;
        Ok(match &self.proj {
            Some(p) => r.restrict_along(p)?,
            None => r,
        })
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..).take_while(|d| d * d <= n).filter(|d| n.is_multiple_of(*d)).flat_map(|d| [d, n / d]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Quotients `(Z/d)^r` of the deepest level for cyclic-product towers, otherwise the levels themselves.
fn regular_quotients(t: &QuotientTower, dim_cap: usize) -> Result<Vec<RegularQuotient>, ProfiniteError> {
    let mut out = Vec::new();
    if t.is_cyclic_product() {
        let deepest = t.level(t.depth() - 1).cyclic_moduli().unwrap().to_vec();
        let r = deepest.len() as u32;
        let g = deepest.iter().fold(0u64, |a, &b| a.gcd(&b));
        for d in divisors(g) {
            if (d as u128).pow(r) > dim_cap as u128 {
                continue;
            }
            let attach = (0..t.depth())
                .find(|&k| t.level(k).cyclic_moduli().unwrap().iter().all(|&m| m % d == 0))
                .expect("deepest level qualifies");
            let q = Arc::new(FiniteGroup::abelian(&vec![d; r as usize])?);
            let proj = Homomorphism::reduction(t.level(attach).clone(), q.clone())?;
            let label = if r == 1 { format!("Z/{d}") } else { format!("(Z/{d})^{r}") };
            out.push(RegularQuotient { label, attach, group: q, proj: Some(proj) });
        }
    } else {
        for k in 0..t.depth() {
            if t.level(k).order() <= dim_cap {
                out.push(RegularQuotient { label: t.level(k).name().to_string(), attach: k, group: t.level(k).clone(), proj: None });
            }
        }
    }
    Ok(out)
}

fn prime_powers_up_to(cap: u64) -> Vec<u64> {
    (2..=cap).filter(|&q| factorize(q).len() == 1).collect()
}

#[derive(Clone, Debug)]
pub struct CdEvidence {
    /// Coefficient module, e.g. `Z/4[Z/6]`.
    pub coefficients: String,
    pub degree: usize,
    pub verdict: LimitVerdict,
}

#[derive(Clone, Debug)]
pub struct CdReport {
    /// Largest degree `≤ degree_cap` with a nonvanishing stabilized limit; a lower bound for `cd`.
    pub estimate: usize,
    pub degree_cap: usize,
    pub coefficient_cap: u64,
    pub window: usize,
    pub evidence: Vec<CdEvidence>,
    /// Number of scanned limits that did not stabilize.
    pub inconclusive: usize,
}

/// Lower bound for the cohomological dimension, certified up to `degree_cap`.
///
/// Scans `H^n(G, Z/m[Q])` for prime powers `m ≤ coefficient_cap` and finite quotients `Q`
/// with `|Q| ≤ DEFAULT_REGULAR_DIM_CAP`.
pub fn cd_estimate(
    t: &QuotientTower,
    degree_cap: usize,
    coefficient_cap: u64,
    window: usize,
) -> Result<CdReport, ProfiniteError> {
    check_window(window)?;
    if degree_cap == 0 || coefficient_cap < 2 {
        return Err(ProfiniteError::InvalidParameter("degree and coefficient caps must be at least 1 and 2".into()));
    }
    let quotients = regular_quotients(t, DEFAULT_REGULAR_DIM_CAP)?;
    let mut jobs = Vec::new();
    for m in prime_powers_up_to(coefficient_cap) {
        for q in &quotients {
            for n in 0..=degree_cap {
                jobs.push((m, q, n));
            }
        }
    }
    let results = par::map(&jobs, |&(m, q, n)| -> Result<CdEvidence, ProfiniteError> {
        let a = q.module(m)?;
        let r = direct_limit(t, &a, q.attach, n, window)?;
        Ok(CdEvidence { coefficients: format!("Z/{m}[{}]", q.label), degree: n, verdict: r.report.verdict })
    });
    let evidence: Vec<CdEvidence> = results.into_iter().collect::<Result<_, _>>()?;
    let estimate = evidence
        .iter()
        .filter(|e| e.verdict.stabilized().is_some_and(|v| !v.is_trivial()))
        .map(|e| e.degree)
        .max()
        .unwrap_or(0);
    let inconclusive = evidence.iter().filter(|e| matches!(e.verdict, LimitVerdict::Inconclusive(_))).count();
    Ok(CdReport { estimate, degree_cap, coefficient_cap, window, evidence, inconclusive })
}

#[derive(Clone, Debug)]
pub struct DualizingLevel {
    pub level: usize,
    pub coefficient_order: u64,
    /// Stabilized `H^n(G, Z/m_j[G_j])`.
    pub value: FgAbelianGroup,
    /// Whether every generator of `G_j` acts trivially through the right regular action.
    pub action_trivial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualityClass {
    OrientablePoincare,
    NonOrientablePoincare,
    NotPoincare,
    Inconclusive(String),
}

#[derive(Clone, Debug)]
pub struct DualizingReport {
    pub degree: usize,
    pub window: usize,
    pub coefficient_cap: u64,
    pub levels: Vec<DualizingLevel>,
    /// `transitions[i]` maps level `i + 1` to level `i`.
    pub transitions: Vec<SubquotientMap>,
    pub class: DualityClass,
    pub verdict: String,
}

/// Right multiplication `e_x ↦ e_{x g⁻¹}` on `Z/m[Q]`, a module endomorphism commuting with the left action.
fn right_translation(q: &RegularQuotient, a: &GModule, g: usize) -> Result<ModuleMap, ProfiniteError> {
    let h = &q.group;
    let gi = h.inv(g);
    let n = h.order();
    let mut m = ModMatrix::zeros(n, n);
    for x in 0..n {
        m.set(h.mul(x, gi), x, 1);
    }
    Ok(ModuleMap::new(a.clone(), a.clone(), m)?)
}

/// Estimates `D(G) = lim H^n(G, Z/m_j[G_j])` over the levels `j` with `1 < m_j ≤ coefficient_cap`,
/// where `m_j` is the exponent of level `j`.
pub fn dualizing_module_estimate(
    t: &QuotientTower,
    n: usize,
    coefficient_cap: u64,
    window: usize,
) -> Result<DualizingReport, ProfiniteError> {
    check_window(window)?;
    let deepest = t.depth() - 1;
    let chosen: Vec<(usize, u64)> = (0..t.depth())
        .map(|j| (j, t.level_exponent(j)))
        .filter(|&(j, m)| m > 1 && m <= coefficient_cap && t.level(j).order() <= DEFAULT_REGULAR_DIM_CAP)
        .collect();
    let mut report = DualizingReport {
        degree: n,
        window,
        coefficient_cap,
        levels: Vec::new(),
        transitions: Vec::new(),
        class: DualityClass::Inconclusive(String::new()),
        verdict: String::new(),
    };
    if chosen.is_empty() {
        report.class = DualityClass::Inconclusive("no coefficient level within the caps".into());
        report.verdict = "inconclusive: no coefficient level within the caps".into();
        return Ok(report);
    }
    let quotients: Vec<RegularQuotient> = chosen
        .iter()
        .map(|&(j, _)| RegularQuotient { label: t.level(j).name().to_string(), attach: j, group: t.level(j).clone(), proj: None })
        .collect();
    let items: Vec<usize> = (0..chosen.len()).collect();
    let inner = par::map(&items, |&i| -> Result<(DirectLimit, GModule), ProfiniteError> {
        let a = quotients[i].module(chosen[i].1)?;
        Ok((direct_limit(t, &a, chosen[i].0, n, window)?, a))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    for (i, (d, a)) in inner.iter().enumerate() {
        let (j, m) = chosen[i];
        let Some(value) = d.report.verdict.stabilized().cloned() else {
            let why = match &d.report.verdict {
                LimitVerdict::Inconclusive(s) => s.clone(),
                _ => String::new(),
            };
            report.class = DualityClass::Inconclusive(format!("level {j}: {why}"));
            report.verdict = format!("inconclusive: coefficient level Z/{m}[{}] did not stabilize ({why})", t.level(j).name());
            return Ok(report);
        };
        if d.groups.len() + j != t.depth() {
            report.class = DualityClass::Inconclusive(format!("level {j}: partial level range"));
            report.verdict = "inconclusive: size caps truncated a levelwise limit".into();
            return Ok(report);
        }
        let top = d.groups.last().unwrap();
        let stable = d.stable.as_ref().unwrap();
        let a_top = t.inflate(a, j, deepest)?;
        let mut action_trivial = true;
        for &g in t.level(j).generators() {
            let f = right_translation(&quotients[i], &a_top, g)?;
            let m = coefficient_map_between(&f, top.clone(), top.clone())?;
            if !restrict_to(&m.map, stable, stable)?.is_identity() {
                action_trivial = false;
            }
        }
        report.levels.push(DualizingLevel { level: j, coefficient_order: m, value, action_trivial });
    }
    for i in 0..chosen.len() - 1 {
        let (lo, hi) = (chosen[i].0, chosen[i + 1].0);
        let pi = t.projection_between(hi, lo)?;
        let (src, tgt) = (t.level(hi).order(), t.level(lo).order());
        let mut mat = ModMatrix::zeros(tgt, src);
        for x in 0..src {
            mat.set(pi.image(x), x, 1);
        }
        let f = ModuleMap::new(t.inflate(&inner[i + 1].1, hi, deepest)?, t.inflate(&inner[i].1, lo, deepest)?, mat)?;
        let m = coefficient_map_between(
            &f,
            inner[i + 1].0.groups.last().unwrap().clone(),
            inner[i].0.groups.last().unwrap().clone(),
        )?;
        report.transitions.push(restrict_to(&m.map, inner[i + 1].0.stable.as_ref().unwrap(), inner[i].0.stable.as_ref().unwrap())?);
    }
    let full = report.levels.iter().all(|l| l.value.is_cyclic() && l.value.order_u64() == Some(l.coefficient_order));
    let onto = report.transitions.iter().all(SubquotientMap::is_surjective);
    let trivial = report.levels.iter().all(|l| l.action_trivial);
    let names: Vec<String> = report.levels.iter().map(|l| format!("Z/{}", l.coefficient_order)).collect();
    let primes: std::collections::BTreeSet<u64> =
        report.levels.iter().flat_map(|l| factorize(l.coefficient_order).into_iter().map(|(p, _)| p)).collect();
    let limit = match primes.iter().next() {
        Some(p) if primes.len() == 1 => format!("Z_{p}"),
        _ => "Ẑ".to_string(),
    };
    report.class = match (full && onto, trivial) {
        (true, true) => DualityClass::OrientablePoincare,
        (true, false) => DualityClass::NonOrientablePoincare,
        _ => DualityClass::NotPoincare,
    };
    report.verdict = match report.class {
        DualityClass::OrientablePoincare => {
            format!("orientable Poincaré duality, dimension {n}, levels {}, … (consistent with D ≅ {limit})", names.join(", "))
        }
        DualityClass::NonOrientablePoincare => {
            format!("non-orientable Poincaré duality, dimension {n}, levels {}, …", names.join(", "))
        }
        _ => format!("not of Poincaré type in dimension {n}: levels {}",
            report.levels.iter().map(|l| l.value.to_string()).collect::<Vec<_>>().join(", ")),
    };
    Ok(report)
}
