use std::collections::BTreeMap;

use serde::Serialize;

use super::{solve_cl_game, GamePosition, Winner};
use crate::analysis::bisimilar_points;
use crate::formula::{parse_unchecked, AgentSet};
use crate::kripke::{KripkeModel, PointedModel};
use crate::semantics::satisfies;

/// Binary strings of length `len` that start with `prefix`.
fn strings(prefix: &str, len: usize) -> Vec<String> {
    if prefix.len() > len {
        return Vec::new();
    }
    let free = len - prefix.len();
    (0..1usize << free)
        .map(|bits| {
            let tail: String = (0..free)
                .rev()
                .map(|k| if bits >> k & 1 == 1 { '1' } else { '0' })
                .collect();
            format!("{prefix}{tail}")
        })
        .collect()
}

struct Builder {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    not_p: Vec<usize>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            labels: vec!["r".into()],
            edges: Vec::new(),
            not_p: Vec::new(),
        }
    }

    fn node(&mut self, label: String) -> usize {
        self.labels.push(label);
        self.labels.len() - 1
    }

    fn index(&self, label: &str) -> usize {
        self.labels.iter().position(|l| l == label).expect("node exists")
    }

    /// `r → x0`, then full binary branching from `x{root}` down to
    /// subscript length `deepest`; `¬p` at the all-zero deepest node.
    fn branch(&mut self, x: char, chain: &[&str], deepest: usize) {
        let mut prev = 0;
        for s in chain {
            let id = self.node(format!("{x}{s}"));
            self.edges.push((prev, id));
            prev = id;
        }
        let root = chain.last().expect("nonempty chain").to_string();
        for len in root.len() + 1..=deepest {
            for s in strings(&root, len) {
                let id = self.node(format!("{x}{s}"));
                let parent = self.index(&format!("{x}{}", &s[..len - 1]));
                self.edges.push((parent, id));
            }
        }
        self.not_p
            .push(self.index(&format!("{x}{}", "0".repeat(deepest))));
    }

    fn finish(self) -> PointedModel {
        let p = (0..self.labels.len())
            .filter(|w| !self.not_p.contains(w))
            .collect();
        let mut val = BTreeMap::new();
        val.insert("p".to_string(), p);
        let m = KripkeModel::from_edges(AgentSet::standard(1), self.labels, &[self.edges], val)
            .expect("family models are well formed");
        PointedModel::new(m, 0).expect("root exists")
    }
}

/// `r → t0 → t00`, full binary branching below `t00` down to subscript
/// length `n + 2`; `p` everywhere except the all-zero deepest node.
pub fn build_m(n: usize) -> PointedModel {
    assert!(n >= 1, "families start at n = 1");
    let mut b = Builder::new();
    b.branch('t', &["0", "00"], n + 2);
    b.finish()
}

/// `M_n` plus `r → z0` with full binary branching below `z0` down to
/// subscript length `n + 1`; `¬p` also at the all-zero deepest z-node.
pub fn build_n(n: usize) -> PointedModel {
    assert!(n >= 1, "families start at n = 1");
    let mut b = Builder::new();
    b.branch('t', &["0", "00"], n + 2);
    b.branch('z', &["0"], n + 1);
    b.finish()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub n: usize,
    pub worlds_m: usize,
    pub worlds_n: usize,
    pub formula: String,
    /// `M_n, r ⊨ Kw[i] Cw5 p`.
    pub m_satisfies: bool,
    /// `N_n, r ⊨ Kw[i] Cw5 p`.
    pub n_satisfies: bool,
    /// Winner of the n-round CL-game from `(r, r)`.
    pub winner: Winner,
    pub bisimilar: bool,
}

impl SeparationReport {
    /// The three facts that separate the languages at this `n`.
    pub fn holds(&self) -> bool {
        self.m_satisfies && !self.n_satisfies && self.winner == Winner::Duplicator && !self.bisimilar
    }
}

pub fn verify_separation(n: usize) -> SeparationReport {
    let (m, nn) = (build_m(n), build_n(n));
    let f = parse_unchecked("Kw[i] Cw5 p").expect("fixed formula");
    let pos = GamePosition::new(m.clone(), nn.clone(), n);
    SeparationReport {
        n,
        worlds_m: m.model.num_worlds(),
        worlds_n: nn.model.num_worlds(),
        formula: f.to_string(),
        m_satisfies: satisfies(&m, &f).expect("single agent i"),
        n_satisfies: satisfies(&nn, &f).expect("single agent i"),
        winner: solve_cl_game(&pos).expect("single-agent models"),
        bisimilar: bisimilar_points(&m.model, m.point, &nn.model, nn.point),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn not_p(pm: &PointedModel) -> Vec<String> {
        let p = pm.model.atom("p");
        pm.model
            .worlds()
            .filter(|&w| !p.contains(w))
            .map(|w| pm.model.label(w).to_string())
            .collect()
    }

    #[test]
    fn m1_and_n1_match_the_figure() {
        let m = build_m(1);
        let mut labels = m.model.labels().to_vec();
        labels.sort();
        assert_eq!(labels, ["r", "t0", "t00", "t000", "t001"]);
        assert_eq!(not_p(&m), ["t000"]);
        assert_eq!(
            m.model.union_relation().len(),
            4,
            "r-t0, t0-t00, t00-t000, t00-t001"
        );
        let n = build_n(1);
        assert_eq!(n.model.num_worlds(), 8);
        assert_eq!(not_p(&n), ["t000", "z00"]);
        let z0 = n.model.world("z0").unwrap();
        assert_eq!(n.model.successors(0, z0).len(), 2);
        assert_eq!(n.model.successors(0, 0).len(), 2);
    }

    #[test]
    fn family_sizes() {
        for n in 1..=4 {
            let m = build_m(n).model.num_worlds();
            assert_eq!(m, 3 + (2..=n + 1).map(|k| 1 << (k - 1)).sum::<usize>());
            assert_eq!(m, (1 << (n + 1)) + 1);
            assert_eq!(build_n(n).model.num_worlds(), m + (1 << (n + 1)) - 1);
        }
    }

    #[test]
    fn deepest_nodes_are_leaves() {
        let n = build_n(2);
        for l in ["t0000", "t0011", "z000", "z011"] {
            let w = n.model.world(l).unwrap();
            assert!(n.model.successors(0, w).is_empty(), "{l}");
        }
        assert_eq!(not_p(&n), ["t0000", "z000"]);
    }

    #[test]
    fn separation_for_small_n() {
        for n in 1..=2 {
            let r = verify_separation(n);
            assert!(r.holds(), "{r:?}");
        }
    }
}
