//! Operators on extensions. Each takes the extension of the operand and
//! returns the extension of the compound.

use std::collections::HashSet;

use crate::formula::DerivedOp;
use crate::kripke::{KripkeModel, WorldSet};

/// `{w : R_a(w) ⊆ S}`.
pub fn k(m: &KripkeModel, a: usize, s: &WorldSet) -> WorldSet {
    WorldSet::from_worlds(
        m.num_worlds(),
        m.worlds().filter(|&w| m.successors(a, w).is_subset(s)),
    )
}

/// `{w : R_a(w) ⊆ S or R_a(w) ∩ S = ∅}`.
pub fn kw(m: &KripkeModel, a: usize, s: &WorldSet) -> WorldSet {
    WorldSet::from_worlds(
        m.num_worlds(),
        m.worlds().filter(|&w| {
            let r = m.successors(a, w);
            r.is_subset(s) || r.is_disjoint(s)
        }),
    )
}

/// Everybody knows: `R_a(w) ⊆ S` for every agent.
pub fn e(m: &KripkeModel, s: &WorldSet) -> WorldSet {
    WorldSet::from_worlds(
        m.num_worlds(),
        m.worlds().filter(|&w| m.union_successors(w).is_subset(s)),
    )
}

/// Common knowledge along the reflexive-transitive closure.
pub fn c(m: &KripkeModel, s: &WorldSet) -> WorldSet {
    WorldSet::from_worlds(
        m.num_worlds(),
        m.worlds().filter(|&w| m.reachable(w).is_subset(s)),
    )
}

/// The primitive `Cw`: every reachable world agrees on membership in `S`.
pub fn cw_prim(m: &KripkeModel, s: &WorldSet) -> WorldSet {
    WorldSet::from_worlds(
        m.num_worlds(),
        m.worlds().filter(|&w| {
            let r = m.reachable(w);
            r.is_subset(s) || r.is_disjoint(s)
        }),
    )
}

pub fn ew1(m: &KripkeModel, s: &WorldSet) -> WorldSet {
    e(m, s).union(&e(m, &s.complement()))
}

pub fn ew2(m: &KripkeModel, s: &WorldSet) -> WorldSet {
    let mut out = WorldSet::full(m.num_worlds());
    for a in 0..m.agents().len() {
        out.intersect_with(&kw(m, a, s));
    }
    out
}

pub fn cw1(m: &KripkeModel, s: &WorldSet) -> WorldSet {
    c(m, s).union(&c(m, &s.complement()))
}

pub fn cw4(m: &KripkeModel, s: &WorldSet) -> WorldSet {
    let mut out = WorldSet::full(m.num_worlds());
    for a in 0..m.agents().len() {
        out.intersect_with(&cw1(m, &kw(m, a, s)));
    }
    out
}

/// Which `Ew` a `Cw3` iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EwVariant {
    Ew1,
    Ew2,
}

impl EwVariant {
    pub fn apply(self, m: &KripkeModel, s: &WorldSet) -> WorldSet {
        match self {
            EwVariant::Ew1 => ew1(m, s),
            EwVariant::Ew2 => ew2(m, s),
        }
    }
}

/// Intersection of the orbit `S_1 = ew(S)`, `S_{k+1} = ew(S_k)`, together
/// with the number of distinct orbit elements.
pub fn cw3(m: &KripkeModel, s: &WorldSet, variant: EwVariant) -> (WorldSet, usize) {
    let mut seen = HashSet::new();
    let mut out = WorldSet::full(m.num_worlds());
    let mut cur = variant.apply(m, s);
    while seen.insert(cur.clone()) {
        out.intersect_with(&cur);
        cur = variant.apply(m, &cur);
    }
    (out, seen.len())
}

/// Intersection of the least family containing every `kw_a(S)` and closed
/// under every `kw_a`, together with the number of breadth-first layers
/// that contributed new members.
pub fn cw5(m: &KripkeModel, s: &WorldSet) -> (WorldSet, usize) {
    let agents = m.agents().len();
    let mut seen: HashSet<WorldSet> = HashSet::new();
    let mut out = WorldSet::full(m.num_worlds());
    let mut layer: Vec<WorldSet> = Vec::new();
    for a in 0..agents {
        let next = kw(m, a, s);
        if seen.insert(next.clone()) {
            layer.push(next);
        }
    }
    let mut depth = 0;
    while !layer.is_empty() {
        depth += 1;
        let mut next_layer = Vec::new();
        for set in &layer {
            out.intersect_with(set);
            for a in 0..agents {
                let next = kw(m, a, set);
                if seen.insert(next.clone()) {
                    next_layer.push(next);
                }
            }
        }
        layer = next_layer;
    }
    (out, depth)
}

/// Extension of a derived operator applied to `S`, with the iteration
/// count for the infinitary ones.
pub fn derived(m: &KripkeModel, op: DerivedOp, s: &WorldSet) -> (WorldSet, Option<usize>) {
    match op {
        DerivedOp::Ew1 => (ew1(m, s), None),
        DerivedOp::Ew2 => (ew2(m, s), None),
        DerivedOp::Cw1 => (cw1(m, s), None),
        DerivedOp::Cw21 => (c(m, &ew1(m, s)), None),
        DerivedOp::Cw22 => (c(m, &ew2(m, s)), None),
        DerivedOp::Cw4 => (cw4(m, s), None),
        DerivedOp::Cw31 => {
            let (r, k) = cw3(m, s, EwVariant::Ew1);
            (r, Some(k))
        }
        DerivedOp::Cw32 => {
            let (r, k) = cw3(m, s, EwVariant::Ew2);
            (r, Some(k))
        }
        DerivedOp::Cw5 => {
            let (r, k) = cw5(m, s);
            (r, Some(k))
        }
    }
}
