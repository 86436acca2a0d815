//! Fixed groups and modules exercised by the self-test.

use std::collections::BTreeSet;
use std::sync::Arc;

use profinity_core::gmodules::{induce, GModule};
use profinity_core::groups::{FiniteGroup, SubgroupWithTransversal};

fn arc(g: FiniteGroup) -> Arc<FiniteGroup> {
    Arc::new(g)
}

/// Groups of order at most 12.
pub fn small_groups() -> Vec<Arc<FiniteGroup>> {
    let mut out: Vec<Arc<FiniteGroup>> = (1..=12).map(|n| arc(FiniteGroup::cyclic(n).unwrap())).collect();
    for moduli in [&[2u64, 2][..], &[2, 4], &[2, 6], &[3, 3], &[2, 2, 2]] {
        out.push(arc(FiniteGroup::abelian(moduli).unwrap()));
    }
    out.push(arc(FiniteGroup::symmetric(3).unwrap()));
    out.push(arc(FiniteGroup::dihedral(4).unwrap()));
    out.push(arc(FiniteGroup::quaternion().unwrap()));
    out.push(arc(FiniteGroup::dihedral(5).unwrap()));
    out.push(arc(FiniteGroup::dihedral(6).unwrap()));
    out.push(arc(FiniteGroup::alternating(4).unwrap()));
    out
}

/// Groups of order at most 16: the small groups plus groups of order 13 to 16.
pub fn groups_to_16() -> Vec<Arc<FiniteGroup>> {
    let mut out = small_groups();
    for n in 13..=16 {
        out.push(arc(FiniteGroup::cyclic(n).unwrap()));
    }
    for moduli in [&[2u64, 8][..], &[4, 4], &[2, 2, 4], &[2, 2, 2, 2]] {
        out.push(arc(FiniteGroup::abelian(moduli).unwrap()));
    }
    out.push(arc(FiniteGroup::dihedral(7).unwrap()));
    out.push(arc(FiniteGroup::dihedral(8).unwrap()));
    let q8 = FiniteGroup::quaternion().unwrap();
    out.push(arc(FiniteGroup::product(&q8, &FiniteGroup::cyclic(2).unwrap()).unwrap()));
    out
}

/// Groups used for the Shapiro sweep.
pub fn shapiro_groups() -> Vec<Arc<FiniteGroup>> {
    let mut out: Vec<Arc<FiniteGroup>> = [2u64, 3, 4, 6, 8, 16].iter().map(|&n| arc(FiniteGroup::cyclic(n).unwrap())).collect();
    out.push(arc(FiniteGroup::abelian(&[2, 2]).unwrap()));
    out.push(arc(FiniteGroup::symmetric(3).unwrap()));
    out.push(arc(FiniteGroup::dihedral(4).unwrap()));
    out.push(arc(FiniteGroup::quaternion().unwrap()));
    out.push(arc(FiniteGroup::alternating(4).unwrap()));
    out.push(arc(FiniteGroup::dihedral(6).unwrap()));
    out.push(arc(FiniteGroup::dihedral(8).unwrap()));
    out
}

const TRIVIAL_FACTORS: [&[u64]; 22] = [
    &[2], &[3], &[4], &[5], &[6], &[7], &[8], &[9], &[10], &[12], &[16],
    &[2, 2], &[2, 4], &[3, 3], &[2, 6], &[2, 8], &[4, 4], &[2, 2, 2], &[2, 2, 4], &[3, 9], &[2, 2, 2, 2], &[8, 8],
];

fn units(m: u64) -> Vec<u64> {
    (1..m).filter(|&s| gcd(s, m) == 1).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Every nontrivial character `G → (Z/m)^×`, listed by scalar tuples in lexicographic order.
pub fn characters(g: &Arc<FiniteGroup>, m: u64) -> Vec<GModule> {
    let us = units(m);
    let k = g.generators().len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    if k == 0 || us.len() < 2 {
        return out;
    }
    loop {
        let scalars: Vec<u64> = idx.iter().map(|&i| us[i]).collect();
        if scalars.iter().any(|&s| s != 1) {
            if let Ok(a) = GModule::from_character(g.clone(), m, &scalars) {
                out.push(a);
            }
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < us.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn order(a: &GModule) -> u64 {
    a.moduli().iter().product()
}

fn key(a: &GModule) -> (Vec<u64>, Vec<Vec<Vec<u64>>>) {
    (a.moduli().to_vec(), a.generator_actions().iter().map(|m| m.to_rows()).collect())
}

/// Trivial, character, regular and permutation modules of order at most `bound`, without repeats.
pub fn modules(g: &Arc<FiniteGroup>, bound: u64) -> Vec<GModule> {
    let mut out = Vec::new();
    for f in TRIVIAL_FACTORS {
        if f.iter().product::<u64>() <= bound {
            out.push(GModule::trivial(g.clone(), f).unwrap());
        }
    }
    for m in [3u64, 4, 5, 7, 8, 9, 16] {
        if m <= bound {
            out.extend(characters(g, m));
        }
    }
    for m in [2u64, 3] {
        if m.checked_pow(g.order() as u32).is_some_and(|o| o <= bound) && g.order() > 1 {
            out.push(GModule::regular(g.clone(), m).unwrap());
        }
    }
    for members in g.all_subgroups() {
        let index = g.order() / members.len();
        if index < 2 || members.len() == 1 {
            continue;
        }
        let sub = SubgroupWithTransversal::from_members(g.clone(), &members).unwrap();
        for m in [2u64, 3] {
            if m.checked_pow(index as u32).is_some_and(|o| o <= bound) {
                let a = GModule::trivial(sub.group.clone(), &[m]).unwrap();
                out.push(induce(&sub, &a).unwrap());
            }
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|a| order(a) <= bound && seen.insert(key(a)));
    out
}

/// Coefficients for the Shapiro sweep: four trivial modules and up to two characters.
pub fn shapiro_modules(h: &Arc<FiniteGroup>) -> Vec<GModule> {
    let mut out: Vec<GModule> =
        [&[2u64][..], &[3], &[4], &[2, 2]].iter().map(|f| GModule::trivial(h.clone(), f).unwrap()).collect();
    let mut chars = characters(h, 3);
    chars.extend(characters(h, 4));
    out.extend(chars.into_iter().take(2));
    out
}
