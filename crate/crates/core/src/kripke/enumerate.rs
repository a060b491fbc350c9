use std::collections::BTreeMap;

use super::{FrameClass, KripkeModel, WorldSet};
use crate::formula::AgentSet;

/// Restricted growth strings of length `n`: one per set partition.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur.push(b);
            go(i + 1, n, cur, max.max(b), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![vec![]];
    }
    let mut cur = vec![0];
    go(1, n, &mut cur, 0, &mut out);
    out
}

fn bit(n: usize, u: usize, v: usize) -> u64 {
    1u64 << (u * n + v)
}

/// All relations on `n` worlds in `class`, as masks with bit `u*n+v` set
/// for the edge `(u, v)`, in ascending order.
pub fn relation_masks(n: usize, class: FrameClass) -> Vec<u64> {
    assert!(n * n <= 64, "relation masks need at most 8 worlds");
    let all = if n * n == 64 { u64::MAX } else { (1u64 << (n * n)) - 1 };
    let diag: u64 = (0..n).map(|w| bit(n, w, w)).sum();
    let mut out: Vec<u64> = match class {
        FrameClass::K => (0..=all).collect(),
        FrameClass::T => {
            let off = all & !diag;
            // enumerate subsets of the off-diagonal bits
            let mut v = Vec::new();
            let mut sub = 0u64;
            loop {
                v.push(sub | diag);
                if sub == off {
                    break;
                }
                sub = (sub.wrapping_sub(off)) & off;
            }
            v
        }
        FrameClass::S5 => set_partitions(n)
            .into_iter()
            .map(|blocks| {
                let mut m = 0;
                for u in 0..n {
                    for v in 0..n {
                        if blocks[u] == blocks[v] {
                            m |= bit(n, u, v);
                        }
                    }
                }
                m
            })
            .collect(),
        FrameClass::KD45 => {
            let mut v = Vec::new();
            for blocks in set_partitions(n) {
                let groups: Vec<Vec<usize>> = (0..=*blocks.iter().max().unwrap_or(&0))
                    .map(|b| (0..n).filter(|&w| blocks[w] == b).collect())
                    .collect();
                let mut partial = vec![0u64];
                for g in &groups {
                    let mut next = Vec::new();
                    for cmask in 1u32..(1 << g.len()) {
                        let cluster: Vec<usize> = g
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| cmask >> k & 1 == 1)
                            .map(|(_, &w)| w)
                            .collect();
                        let mut m = 0;
                        for &u in g {
                            for &c in &cluster {
                                m |= bit(n, u, c);
                            }
                        }
                        next.extend(partial.iter().map(|p| p | m));
                    }
                    partial = next;
                }
                v.extend(partial);
            }
            v
        }
    };
    out.sort_unstable();
    out.dedup();
    out
}

/// All models with a fixed number of worlds, agents and atoms in one frame
/// class, indexed in canonical order: relation masks compared agent by agent,
/// then valuation masks atom by atom.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    pub worlds: usize,
    pub class: FrameClass,
    pub agents: AgentSet,
    pub atoms: Vec<String>,
    masks: Vec<u64>,
    labels: Vec<String>,
}

impl ModelSpace {
    pub fn new(worlds: usize, class: FrameClass, agents: AgentSet, atoms: Vec<String>) -> Self {
        ModelSpace {
            worlds,
            class,
            masks: relation_masks(worlds, class),
            labels: (0..worlds).map(|i| format!("w{i}")).collect(),
            agents,
            atoms,
        }
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    fn valuations(&self) -> u128 {
        1u128 << (self.worlds * self.atoms.len())
    }

    /// Number of models, saturating at `u128::MAX`.
    pub fn len(&self) -> u128 {
        let mut total = self.valuations();
        for _ in 0..self.agents.len() {
            total = total.saturating_mul(self.masks.len() as u128);
        }
        total
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The model at position `idx` of the canonical order.
    pub fn model(&self, idx: u128) -> KripkeModel {
        let n = self.worlds;
        let vals = self.valuations();
        let mut val_idx = (idx % vals) as u64;
        let mut rel_idx = idx / vals;
        let m = self.masks.len() as u128;
        let mut masks = vec![0u64; self.agents.len()];
        for slot in masks.iter_mut().rev() {
            *slot = self.masks[(rel_idx % m) as usize];
            rel_idx /= m;
        }
        let succ = masks
            .iter()
            .map(|&mask| {
                (0..n)
                    .map(|u| WorldSet::from_mask(n, (mask >> (u * n)) & ((1u64 << n) - 1)))
                    .collect()
            })
            .collect();
        let mut valuation = BTreeMap::new();
        let per = (1u64 << n) - 1;
        for atom in self.atoms.iter().rev() {
            valuation.insert(atom.clone(), WorldSet::from_mask(n, val_idx & per));
            val_idx >>= n;
        }
        KripkeModel::from_successors(self.agents.clone(), self.labels.clone(), succ, valuation)
            .expect("enumerated models are well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=5).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52]);
    }

    #[test]
    fn mask_counts_per_class() {
        assert_eq!(relation_masks(2, FrameClass::K).len(), 16);
        assert_eq!(relation_masks(3, FrameClass::T).len(), 64);
        assert_eq!(relation_masks(3, FrameClass::S5).len(), 5);
        // KD45 relations on 2 worlds: partitions {01} with 3 clusters, {0}{1} with 1
        assert_eq!(relation_masks(2, FrameClass::KD45).len(), 4);
    }

    #[test]
    fn masks_match_frame_predicates() {
        let g = AgentSet::standard(1);
        for class in FrameClass::ALL {
            for n in 1..=3 {
                let space = ModelSpace::new(n, class, g.clone(), vec![]);
                let members: usize = (0..space.len()).filter(|&i| space.model(i).in_class(class)).count();
                assert_eq!(members as u128, space.len());
                let all_k = ModelSpace::new(n, FrameClass::K, g.clone(), vec![]);
                let expected = (0..all_k.len()).filter(|&i| all_k.model(i).in_class(class)).count();
                assert_eq!(members, expected, "{class} on {n} worlds");
            }
        }
    }

    #[test]
    fn canonical_order_puts_first_agent_most_significant() {
        let space = ModelSpace::new(2, FrameClass::K, AgentSet::standard(2), vec!["p".into()]);
        assert_eq!(space.len(), 16 * 16 * 4);
        let m = space.model(4);
        assert!(m.relation_pairs(0).is_empty());
        assert_eq!(m.relation_pairs(1), vec![(0, 0)]);
        let last = space.model(space.len() - 1);
        assert_eq!(last.atom("p").len(), 2);
    }
}
