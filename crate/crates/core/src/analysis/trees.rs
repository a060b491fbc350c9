//! Finite single-agent binary trees and the parity characterisation of
//! iterated knowing whether on them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{AgentSet, DerivedOp, Formula};
use crate::kripke::{KripkeModel, PointedModel, WorldSet};
use crate::semantics::{extension, EvalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("tree of depth {depth} has no layer {needed} below the root")]
    DepthInsufficient { depth: usize, needed: usize },
    #[error("n must be at least 1")]
    ZeroIterations,
    #[error("depth {0} is too large to enumerate")]
    TooDeep(usize),
    #[error("not a full binary tree: {0}")]
    NotBinary(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A full binary tree in heap order: node `k` has children `2k+1` and
/// `2k+2`; node labels are `v` followed by the path bits.
#[derive(Debug, Clone)]
pub struct BinaryTree {
    depth: usize,
    model: KripkeModel,
}

fn heap_label(k: usize) -> String {
    let mut bits = Vec::new();
    let mut k = k;
    while k > 0 {
        bits.push(if k % 2 == 1 { '0' } else { '1' });
        k = (k - 1) / 2;
    }
    std::iter::once('v').chain(bits.into_iter().rev()).collect()
}

impl BinaryTree {
    /// The depth-`depth` tree with `p` at node `k` iff bit `k` of `p_bits`
    /// is set.
    pub fn build(depth: usize, p_bits: u64) -> Result<Self, TreeError> {
        if depth > 5 {
            return Err(TreeError::TooDeep(depth));
        }
        let n = (1usize << (depth + 1)) - 1;
        let inner = (1usize << depth) - 1;
        let edges: Vec<(usize, usize)> = (0..inner)
            .flat_map(|k| [(k, 2 * k + 1), (k, 2 * k + 2)])
            .collect();
        let labels = (0..n).map(heap_label).collect();
        let mut val = BTreeMap::new();
        val.insert(
            "p".to_string(),
            (0..n).filter(|&k| p_bits >> k & 1 == 1).collect::<Vec<_>>(),
        );
        let model = KripkeModel::from_edges(AgentSet::standard(1), labels, &[edges], val)
            .expect("trees are well formed");
        Ok(BinaryTree { depth, model })
    }

    /// Reads a single-agent model rooted at `pm.point` as a full binary
    /// tree; nodes are renumbered in heap order.
    pub fn from_pointed(pm: &PointedModel) -> Result<Self, TreeError> {
        let m = &pm.model;
        if m.agents().len() != 1 {
            return Err(TreeError::NotBinary(format!("{} agents", m.agents().len())));
        }
        let mut order = vec![pm.point];
        let mut depth = 0;
        let mut layer = vec![pm.point];
        let mut seen = WorldSet::singleton(m.num_worlds(), pm.point);
        loop {
            let sizes: Vec<usize> = layer.iter().map(|&w| m.successors(0, w).len()).collect();
            if sizes.iter().all(|&s| s == 0) {
                break;
            }
            if sizes.iter().any(|&s| s != 2) {
                return Err(TreeError::NotBinary(format!(
                    "layer {depth} mixes leaves and inner nodes or has a node without two successors"
                )));
            }
            let mut next = Vec::new();
            for &w in &layer {
                for c in m.successors(0, w).iter() {
                    if seen.contains(c) {
                        return Err(TreeError::NotBinary(format!("{} is shared", m.label(c))));
                    }
                    seen.insert(c);
                    next.push(c);
                }
            }
            order.extend(&next);
            layer = next;
            depth += 1;
        }
        if seen.len() != m.num_worlds() {
            return Err(TreeError::NotBinary("unreachable worlds".into()));
        }
        let mut bits = 0u64;
        let p = m.atom("p");
        if depth > 5 {
            return Err(TreeError::TooDeep(depth));
        }
        for (k, &w) in order.iter().enumerate() {
            if p.contains(w) {
                bits |= 1 << k;
            }
        }
        if m.valuation().keys().any(|a| a != "p") {
            return Err(TreeError::NotBinary("only the atom p is supported".into()));
        }
        BinaryTree::build(depth, bits)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    pub fn num_nodes(&self) -> usize {
        self.model.num_worlds()
    }

    pub fn layer(&self, k: usize) -> usize {
        (usize::BITS - (k + 1).leading_zeros() - 1) as usize
    }

    /// Descendants of `k` exactly `n` layers below it.
    pub fn descendants(&self, k: usize, n: usize) -> std::ops::Range<usize> {
        let first = ((k + 1) << n) - 1;
        first..first + (1 << n)
    }
}

/// `Kw[i]` applied `n` times.
pub fn kw_power(n: usize, f: Formula) -> Formula {
    let i = AgentSet::standard(1).get(0).expect("one agent").clone();
    (0..n).fold(f, |g, _| Formula::kw(i.clone(), g))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityMismatch {
    pub node: String,
    pub kw: bool,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityReport {
    pub n: usize,
    pub nodes_checked: usize,
    pub mismatches: Vec<ParityMismatch>,
}

/// At every node `v` with a full depth-`n` cone: `Kw[i]^n f` holds at `v`
/// iff the number of `f`-nodes `n` layers below `v` is even.
pub fn parity_theorem_check(t: &BinaryTree, f: &Formula, n: usize) -> Result<ParityReport, TreeError> {
    if n == 0 {
        return Err(TreeError::ZeroIterations);
    }
    if n > t.depth {
        return Err(TreeError::DepthInsufficient {
            depth: t.depth,
            needed: n,
        });
    }
    let fs = extension(&t.model, f)?;
    let kws = extension(&t.model, &kw_power(n, f.clone()))?;
    let mut report = ParityReport {
        n,
        nodes_checked: 0,
        mismatches: Vec::new(),
    };
    for v in t.model.worlds().filter(|&v| t.layer(v) + n <= t.depth) {
        let count = t.descendants(v, n).filter(|&w| fs.contains(w)).count();
        let kw = kws.contains(v);
        report.nodes_checked += 1;
        if kw != (count % 2 == 0) {
            report.mismatches.push(ParityMismatch {
                node: t.model.label(v).to_string(),
                kw,
                count,
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerParityReport {
    pub holds_at_root: bool,
    /// Count of `f`-nodes on layers `1..=depth`.
    pub layer_counts: Vec<usize>,
    pub odd_layers: Vec<usize>,
    /// `Cw5 f` holds at the root and some layer is odd.
    pub violation: bool,
}

/// If the root satisfies `Cw5 f`, every layer below it has an even number
/// of `f`-nodes. The root's own layer is not part of the claim: `Cw5` only
/// speaks about what lies one or more steps away.
pub fn cw5_layer_parity(t: &BinaryTree, f: &Formula) -> Result<LayerParityReport, TreeError> {
    let fs = extension(&t.model, f)?;
    let holds_at_root = extension(&t.model, &Formula::derived(DerivedOp::Cw5, f.clone()))?.contains(0);
    let layer_counts: Vec<usize> = (1..=t.depth)
        .map(|l| t.descendants(0, l).filter(|&w| fs.contains(w)).count())
        .collect();
    let odd_layers: Vec<usize> = layer_counts
        .iter()
        .enumerate()
        .filter(|(_, c)| *c % 2 == 1)
        .map(|(k, _)| k + 1)
        .collect();
    Ok(LayerParityReport {
        holds_at_root,
        violation: holds_at_root && !odd_layers.is_empty(),
        layer_counts,
        odd_layers,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub depth: usize,
    /// Only `n` up to this value were checked.
    pub max_n: usize,
    pub valuations: u64,
    pub parity_nodes_checked: usize,
    pub parity_mismatches: usize,
    /// Valuations whose root satisfies `Cw5 p`.
    pub cw5_at_root: u64,
    pub cw5_violations: u64,
}

impl SweepReport {
    pub fn clean(&self) -> bool {
        self.parity_mismatches == 0 && self.cw5_violations == 0
    }
}

/// Every valuation of `p` on the depth-`depth` tree, with `f = p` and
/// `n = 1..=max_n`.
pub fn parity_sweep(depth: usize, max_n: usize) -> Result<SweepReport, TreeError> {
    if depth > 4 {
        return Err(TreeError::TooDeep(depth));
    }
    if max_n == 0 {
        return Err(TreeError::ZeroIterations);
    }
    if max_n > depth {
        return Err(TreeError::DepthInsufficient { depth, needed: max_n });
    }
    let nodes = (1u32 << (depth + 1)) - 1;
    let p = Formula::atom("p");
    let total = 1u64 << nodes;
    let partial = (0..total)
        .into_par_iter()
        .map(|bits| -> Result<SweepReport, TreeError> {
            let t = BinaryTree::build(depth, bits)?;
            let mut r = SweepReport::default();
            for n in 1..=max_n {
                let c = parity_theorem_check(&t, &p, n)?;
                r.parity_nodes_checked += c.nodes_checked;
                r.parity_mismatches += c.mismatches.len();
            }
            let l = cw5_layer_parity(&t, &p)?;
            r.cw5_at_root = l.holds_at_root as u64;
            r.cw5_violations = l.violation as u64;
            Ok(r)
        })
        .try_reduce(SweepReport::default, |a, b| {
            Ok(SweepReport {
                parity_nodes_checked: a.parity_nodes_checked + b.parity_nodes_checked,
                parity_mismatches: a.parity_mismatches + b.parity_mismatches,
                cw5_at_root: a.cw5_at_root + b.cw5_at_root,
                cw5_violations: a.cw5_violations + b.cw5_violations,
                ..SweepReport::default()
            })
        })?;
    Ok(SweepReport {
        depth,
        max_n,
        valuations: total,
        ..partial
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn heap_layout() {
        let t = BinaryTree::build(2, 0).unwrap();
        assert_eq!(t.num_nodes(), 7);
        assert_eq!(t.model().labels(), ["v", "v0", "v1", "v00", "v01", "v10", "v11"]);
        assert_eq!((0..7).map(|k| t.layer(k)).collect::<Vec<_>>(), [0, 1, 1, 2, 2, 2, 2]);
        assert_eq!(t.descendants(1, 1), 3..5);
        assert_eq!(t.descendants(0, 2), 3..7);
        let v1 = t.model().world("v1").unwrap();
        let kids: Vec<_> = t.model().successors(0, v1).iter().map(|w| t.model().label(w)).collect();
        assert_eq!(kids, ["v10", "v11"]);
    }

    #[test]
    fn base_cases() {
        // Both children p: Kw holds, count 2.
        let both = BinaryTree::build(1, 0b110).unwrap();
        let r = parity_theorem_check(&both, &p(), 1).unwrap();
        assert!(r.mismatches.is_empty());
        assert!(extension(both.model(), &kw_power(1, p())).unwrap().contains(0));
        // One child p: Kw fails, count 1.
        let one = BinaryTree::build(1, 0b010).unwrap();
        assert!(!extension(one.model(), &kw_power(1, p())).unwrap().contains(0));
        assert!(parity_theorem_check(&one, &p(), 1).unwrap().mismatches.is_empty());
    }

    #[test]
    fn depth_insufficient() {
        let t = BinaryTree::build(2, 0).unwrap();
        assert_eq!(
            parity_theorem_check(&t, &p(), 3),
            Err(TreeError::DepthInsufficient { depth: 2, needed: 3 })
        );
        assert_eq!(parity_theorem_check(&t, &p(), 0), Err(TreeError::ZeroIterations));
    }

    #[test]
    fn all_p_tree_has_even_layers() {
        let t = BinaryTree::build(3, u64::MAX).unwrap();
        let r = cw5_layer_parity(&t, &p()).unwrap();
        assert!(r.holds_at_root);
        assert_eq!(r.layer_counts, [2, 4, 8]);
        assert!(!r.violation);
    }

    #[test]
    fn one_not_p_leaf_breaks_cw5() {
        let t = BinaryTree::build(2, 0b1111111 & !(1 << 5)).unwrap();
        let r = cw5_layer_parity(&t, &p()).unwrap();
        assert!(!r.holds_at_root);
        assert_eq!(r.odd_layers, [2]);
    }

    #[test]
    fn exhaustive_depth_two() {
        let r = parity_sweep(2, 2).unwrap();
        assert_eq!(r.valuations, 128);
        assert!(r.clean(), "{r:?}");
        // n=1 at 3 nodes, n=2 at the root.
        assert_eq!(r.parity_nodes_checked, 128 * (3 + 1));
        // Cw5 p at the root: both layers even. Independent count: layer 1
        // has 2 of 4 patterns even, layer 2 has 8 of 16, the root is free.
        assert_eq!(r.cw5_at_root, 2 * 2 * 8);
    }

    #[test]
    fn round_trip_through_a_pointed_model() {
        let t = BinaryTree::build(2, 0b1010110).unwrap();
        let back = BinaryTree::from_pointed(&PointedModel::new(t.model().clone(), 0).unwrap()).unwrap();
        assert_eq!(back.model(), t.model());
        let broken = crate::kripke::fixture("cw3-not-cw2").unwrap();
        assert!(BinaryTree::from_pointed(&broken).is_err());
    }
}
