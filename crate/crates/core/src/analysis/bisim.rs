use serde::Serialize;

use crate::formula::Agent;
use crate::kripke::{KripkeModel, WorldSet};

/// The largest bisimulation between two models, as a relation on
/// `left × right`. Agents are matched by name; an agent missing from one
/// side has the empty relation there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bisimulation {
    left: usize,
    right: usize,
    /// `rel[x]` = right worlds related to left world `x`.
    rel: Vec<WorldSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BisimPair {
    pub left: String,
    pub right: String,
}

fn agents(l: &KripkeModel, r: &KripkeModel) -> Vec<Agent> {
    l.agents().merged(r.agents()).iter().cloned().collect()
}

fn relation<'m>(m: &'m KripkeModel, a: &Agent, empty: &'m [WorldSet]) -> &'m [WorldSet] {
    match m.agent_index(a) {
        Some(i) => m.relation_rows(i),
        None => empty,
    }
}

fn same_atoms(l: &KripkeModel, x: usize, r: &KripkeModel, y: usize) -> bool {
    l.atoms_at(x) == r.atoms_at(y)
}

impl Bisimulation {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rel[x].contains(y)
    }

    pub fn len(&self) -> usize {
        self.rel.iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.rel
            .iter()
            .enumerate()
            .flat_map(|(x, ys)| ys.iter().map(move |y| (x, y)))
            .collect()
    }

    pub fn labelled_pairs(&self, l: &KripkeModel, r: &KripkeModel) -> Vec<BisimPair> {
        self.pairs()
            .into_iter()
            .map(|(x, y)| BisimPair {
                left: l.label(x).to_string(),
                right: r.label(y).to_string(),
            })
            .collect()
    }

    /// Whether the relation satisfies atom agreement, forth and back for
    /// every agent at every pair.
    pub fn is_bisimulation(&self, l: &KripkeModel, r: &KripkeModel) -> bool {
        if self.left != l.num_worlds() || self.right != r.num_worlds() {
            return false;
        }
        let empty_l = vec![WorldSet::empty(self.left); self.left];
        let empty_r = vec![WorldSet::empty(self.right); self.right];
        let group = agents(l, r);
        self.pairs().into_iter().all(|(x, y)| {
            same_atoms(l, x, r, y)
                && group.iter().all(|a| {
                    let (rl, rr) = (relation(l, a, &empty_l), relation(r, a, &empty_r));
                    rl[x].iter().all(|x2| rr[y].iter().any(|y2| self.contains(x2, y2)))
                        && rr[y].iter().all(|y2| rl[x].iter().any(|x2| self.contains(x2, y2)))
                })
        })
    }
}

/// Greatest fixpoint of pair refinement: start from all atom-agreeing
/// pairs and delete pairs that fail forth or back until nothing changes.
pub fn max_bisimulation(l: &KripkeModel, r: &KripkeModel) -> Bisimulation {
    let (nl, nr) = (l.num_worlds(), r.num_worlds());
    let mut rel: Vec<WorldSet> = (0..nl)
        .map(|x| WorldSet::from_worlds(nr, (0..nr).filter(|&y| same_atoms(l, x, r, y))))
        .collect();
    let empty_l = vec![WorldSet::empty(nl); nl];
    let empty_r = vec![WorldSet::empty(nr); nr];
    let group = agents(l, r);
    let rels: Vec<(&[WorldSet], &[WorldSet])> = group
        .iter()
        .map(|a| (relation(l, a, &empty_l), relation(r, a, &empty_r)))
        .collect();
    loop {
        let mut changed = false;
        for x in 0..nl {
            let ys: Vec<usize> = rel[x].iter().collect();
            for y in ys {
                let ok = rels.iter().all(|(rl, rr)| {
                    rl[x].iter().all(|x2| !rel[x2].is_disjoint(&rr[y]))
                        && rr[y].iter().all(|y2| rl[x].iter().any(|x2| rel[x2].contains(y2)))
                });
                if !ok {
                    rel[x].remove(y);
                    changed = true;
                }
            }
        }
        if !changed {
            return Bisimulation {
                left: nl,
                right: nr,
                rel,
            };
        }
    }
}

pub fn bisimilar_points(l: &KripkeModel, x: usize, r: &KripkeModel, y: usize) -> bool {
    max_bisimulation(l, r).contains(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::fixture;

    #[test]
    fn self_bisimulation_contains_identity() {
        let m = fixture("cw5-not-cw32").unwrap().model;
        let z = max_bisimulation(&m, &m);
        assert!(m.worlds().all(|w| z.contains(w, w)));
        assert!(z.is_bisimulation(&m, &m));
    }

    #[test]
    fn see_p_and_see_notp_differ() {
        let (a, b) = (fixture("see-p").unwrap(), fixture("see-notp").unwrap());
        let z = max_bisimulation(&a.model, &b.model);
        assert!(!z.contains(a.point, b.point));
        assert!(z.is_bisimulation(&a.model, &b.model));
    }

    #[test]
    fn isomorphic_relabelling() {
        let m = fixture("cw3-not-cw2").unwrap().model;
        let r = m.relabelled(vec!["x".into(), "y".into()]).unwrap();
        let z = max_bisimulation(&m, &r);
        assert!(z.contains(0, 0) && z.contains(1, 1));
    }

    #[test]
    fn removing_a_pair_breaks_the_check() {
        let m = fixture("cw3-not-cw2").unwrap().model;
        let mut z = max_bisimulation(&m, &m);
        z.rel[1].remove(1);
        assert!(!z.is_bisimulation(&m, &m));
    }
}
