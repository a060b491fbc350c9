//! Transformations that produce a model bisimilar to the input at the
//! designated point.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::kripke::{KripkeModel, PointedModel, WorldSet};

fn valuation_of(
    m: &KripkeModel,
    n: usize,
    image: impl Fn(usize) -> Vec<usize>,
) -> BTreeMap<String, WorldSet> {
    m.valuation()
        .iter()
        .map(|(atom, set)| {
            let ws = set.iter().flat_map(&image);
            (atom.clone(), WorldSet::from_worlds(n, ws))
        })
        .collect()
}

/// The same model with worlds shuffled and renamed.
pub fn permute<R: Rng + ?Sized>(pm: &PointedModel, rng: &mut R) -> PointedModel {
    let m = &pm.model;
    let n = m.num_worlds();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let labels = (0..n).map(|k| format!("x{k}")).collect();
    let mut succ = vec![vec![WorldSet::empty(n); n]; m.agents().len()];
    for (a, rows) in succ.iter_mut().enumerate() {
        for (u, v) in m.relation_pairs(a) {
            rows[perm[u]].insert(perm[v]);
        }
    }
    let val = valuation_of(m, n, |w| vec![perm[w]]);
    let model = KripkeModel::from_successors(m.agents().clone(), labels, succ, val)
        .expect("permutation keeps the model well formed");
    PointedModel::new(model, perm[pm.point]).expect("point in range")
}

/// Disjoint union. Worlds of `a` come first; labels get `a.`/`b.`
/// prefixes; agents and atoms are merged by name.
pub fn disjoint_union(a: &KripkeModel, b: &KripkeModel) -> KripkeModel {
    let (na, nb) = (a.num_worlds(), b.num_worlds());
    let n = na + nb;
    let agents = a.agents().merged(b.agents());
    let labels = a
        .labels()
        .iter()
        .map(|l| format!("a.{l}"))
        .chain(b.labels().iter().map(|l| format!("b.{l}")))
        .collect();
    let mut succ = vec![vec![WorldSet::empty(n); n]; agents.len()];
    for (k, ag) in agents.iter().enumerate() {
        if let Some(i) = a.agent_index(ag) {
            for (u, v) in a.relation_pairs(i) {
                succ[k][u].insert(v);
            }
        }
        if let Some(i) = b.agent_index(ag) {
            for (u, v) in b.relation_pairs(i) {
                succ[k][na + u].insert(na + v);
            }
        }
    }
    let mut val: BTreeMap<String, WorldSet> = BTreeMap::new();
    for (atom, set) in a.valuation() {
        val.entry(atom.clone())
            .or_insert_with(|| WorldSet::empty(n))
            .union_with(&WorldSet::from_worlds(n, set.iter()));
    }
    for (atom, set) in b.valuation() {
        val.entry(atom.clone())
            .or_insert_with(|| WorldSet::empty(n))
            .union_with(&WorldSet::from_worlds(n, set.iter().map(|w| na + w)));
    }
    KripkeModel::from_successors(agents, labels, succ, val).expect("union is well formed")
}

/// `pm` placed next to an unrelated model; the point keeps its position.
pub fn with_sidecar(pm: &PointedModel, other: &KripkeModel) -> PointedModel {
    PointedModel::new(disjoint_union(&pm.model, other), pm.point).expect("point in range")
}

/// Every world split into two copies; each edge `u → v` becomes edges from
/// both copies of `u` to both copies of `v`.
pub fn duplicate(pm: &PointedModel) -> PointedModel {
    let m = &pm.model;
    let n = m.num_worlds();
    let labels = (0..2 * n)
        .map(|k| format!("{}'{}", m.label(k / 2), k % 2))
        .collect();
    let mut succ = vec![vec![WorldSet::empty(2 * n); 2 * n]; m.agents().len()];
    for (a, rows) in succ.iter_mut().enumerate() {
        for (u, v) in m.relation_pairs(a) {
            for b in 0..2 {
                rows[2 * u + b].insert(2 * v);
                rows[2 * u + b].insert(2 * v + 1);
            }
        }
    }
    let val = valuation_of(m, 2 * n, |w| vec![2 * w, 2 * w + 1]);
    let model = KripkeModel::from_successors(m.agents().clone(), labels, succ, val)
        .expect("duplication keeps the model well formed");
    PointedModel::new(model, 2 * pm.point).expect("point in range")
}

/// Unravels `pm` from its point into a tree of paths up to length `depth`.
/// Paths of full length link back into an intact copy of the original, so
/// the result stays bisimilar at the root even for cyclic models. The
/// original copy comes first; the root is the first path node.
pub fn unravel(pm: &PointedModel, depth: usize) -> PointedModel {
    let m = &pm.model;
    let n = m.num_worlds();
    let agents = m.agents().len();
    // (last world, label, depth); index offset by n.
    let mut paths: Vec<(usize, String, usize)> = vec![(pm.point, format!("/{}", m.label(pm.point)), 0)];
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); agents];
    for (a, list) in edges.iter_mut().enumerate() {
        list.extend(m.relation_pairs(a));
    }
    let mut k = 0;
    while k < paths.len() {
        let (w, label, d) = paths[k].clone();
        for (a, list) in edges.iter_mut().enumerate() {
            for v in m.successors(a, w).iter() {
                if d < depth {
                    paths.push((v, format!("{label}/{}:{}", m.agents().get(a).expect("agent"), m.label(v)), d + 1));
                    list.push((n + k, n + paths.len() - 1));
                } else {
                    list.push((n + k, v));
                }
            }
        }
        k += 1;
    }
    let total = n + paths.len();
    let labels = m
        .labels()
        .iter()
        .cloned()
        .chain(paths.iter().map(|(_, l, _)| l.clone()))
        .collect();
    let mut succ = vec![vec![WorldSet::empty(total); total]; agents];
    for (a, list) in edges.into_iter().enumerate() {
        for (u, v) in list {
            succ[a][u].insert(v);
        }
    }
    let val = valuation_of(m, total, |w| {
        std::iter::once(w)
            .chain(
                paths
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.0 == w)
                    .map(|(k, _)| n + k),
            )
            .collect()
    });
    let model = KripkeModel::from_successors(m.agents().clone(), labels, succ, val)
        .expect("unraveling is well formed");
    PointedModel::new(model, n).expect("root in range")
}

#[cfg(test)]
mod tests {
    use super::super::bisimilar_points;
    use super::*;
    use crate::kripke::fixture;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check(a: &PointedModel, b: &PointedModel) {
        assert!(bisimilar_points(&a.model, a.point, &b.model, b.point));
    }

    #[test]
    fn transforms_are_bisimilar_at_the_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for name in ["cw3-not-cw2", "ew1-vs-ew2", "cw5-not-cw32", "kd45-cw5-not-cw32"] {
            let pm = fixture(name).unwrap();
            check(&pm, &permute(&pm, &mut rng));
            check(&pm, &duplicate(&pm));
            check(&pm, &with_sidecar(&pm, &fixture("see-notp").unwrap().model));
            check(&pm, &unravel(&pm, 3));
        }
    }

    #[test]
    fn unravel_sizes() {
        let pm = fixture("cw3-not-cw2").unwrap();
        // s → t; t → s, t. Paths by length: s; st; sts, stt; then 3 and 5.
        let u = unravel(&pm, 3);
        assert_eq!(u.model.num_worlds(), 2 + 1 + 1 + 2 + 3);
        assert_eq!(u.point_label(), "/s");
        let t = unravel(&pm, 4);
        assert_eq!(t.model.num_worlds(), 2 + 1 + 1 + 2 + 3 + 5);
    }

    #[test]
    fn duplicate_doubles_worlds_and_keeps_frame_class() {
        let pm = fixture("cw4-not-cw3").unwrap();
        let d = duplicate(&pm);
        assert_eq!(d.model.num_worlds(), 4);
        assert!(d.model.in_class(crate::kripke::FrameClass::S5));
    }
}
