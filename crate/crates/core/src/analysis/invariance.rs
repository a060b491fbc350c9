use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bisimilar_points;
use super::transforms::{duplicate, permute, unravel, with_sidecar};
use crate::formula::{AgentSet, DerivedOp, Formula, FormulaGen, Modality};
use crate::kripke::{random_model, FrameClass, PointedModel, RandomParams};
use crate::semantics::satisfies;

/// Two pointed models expected to be bisimilar.
#[derive(Debug, Clone)]
pub struct PointedPair {
    pub name: String,
    pub left: PointedModel,
    pub right: PointedModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub formula: String,
    pub left: bool,
    pub right: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub name: String,
    pub left_worlds: usize,
    pub right_worlds: usize,
    /// The points are related by the largest bisimulation.
    pub certified: bool,
    pub disagreements: Vec<Disagreement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub formulas: usize,
    pub pairs: Vec<PairReport>,
}

impl InvarianceReport {
    pub fn disagreement_count(&self) -> usize {
        self.pairs.iter().map(|p| p.disagreements.len()).sum()
    }

    pub fn all_certified(&self) -> bool {
        self.pairs.iter().all(|p| p.certified)
    }
}

/// Evaluates every formula at both points of every pair. Formulas that
/// mention an agent or atom unknown to a model are evaluated with the
/// model's missing atoms false; unknown agents are an error in the caller's
/// suite, so such formulas are skipped.
pub fn invariance_suite(pairs: &[PointedPair], formulas: &[Formula]) -> InvarianceReport {
    let pairs = pairs
        .iter()
        .map(|p| {
            let disagreements = formulas
                .iter()
                .filter_map(|f| {
                    let l = satisfies(&p.left, f).ok()?;
                    let r = satisfies(&p.right, f).ok()?;
                    (l != r).then(|| Disagreement {
                        formula: f.to_string(),
                        left: l,
                        right: r,
                    })
                })
                .collect();
            PairReport {
                name: p.name.clone(),
                left_worlds: p.left.model.num_worlds(),
                right_worlds: p.right.model.num_worlds(),
                certified: bisimilar_points(
                    &p.left.model,
                    p.left.point,
                    &p.right.model,
                    p.right.point,
                ),
                disagreements,
            }
        })
        .collect();
    InvarianceReport {
        formulas: formulas.len(),
        pairs,
    }
}

/// `count` distinct formulas over `agents` and `p`, `q`, built from the
/// modalities in `language` with nesting at most `max_height`. For the
/// Cw5 language the list starts with `Kw[a] p`, `Cw5 p`, `Kw[a] Cw5 p`.
pub fn formula_suite(
    agents: &AgentSet,
    language: &[Modality],
    count: usize,
    max_height: usize,
    seed: u64,
) -> Vec<Formula> {
    let a = agents.get(0).expect("nonempty agent set").clone();
    let p = Formula::atom("p");
    let cw5 = |f| Formula::derived(DerivedOp::Cw5, f);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |f: Formula, out: &mut Vec<Formula>| {
        if out.len() < count && seen.insert(f.to_string()) {
            out.push(f);
        }
    };
    if language == Modality::CW5_LANGUAGE {
        push(Formula::kw(a.clone(), p.clone()), &mut out);
        push(cw5(p.clone()), &mut out);
        push(Formula::kw(a, cw5(p)), &mut out);
    }
    let gen = FormulaGen::new(&["p", "q"], agents.clone(), language, max_height);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tries = 0;
    while out.len() < count && tries < 100 * count {
        push(gen.sample(&mut rng), &mut out);
        tries += 1;
    }
    out
}

/// A random K-model over agents `i`, `j` and atoms `p`, `q`, paired with a
/// transformed copy: a permutation, a duplication, a disjoint union with an
/// unrelated model or a shallow unraveling. Both sides are then shuffled.
pub fn random_bisimilar_pair(seed: u64) -> PointedPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let agents = AgentSet::standard(2);
    let worlds = rng.gen_range(1..=5);
    let params = RandomParams::new(worlds, agents.clone(), FrameClass::K).with_atoms(&["p", "q"]);
    let model = random_model(&params, rng.gen());
    let point = rng.gen_range(0..worlds);
    let left = PointedModel::new(model, point).expect("point in range");
    let (kind, right) = match rng.gen_range(0..4) {
        0 => ("permute", permute(&left, &mut rng)),
        1 => ("duplicate", duplicate(&left)),
        2 => {
            let other = random_model(&params, rng.gen());
            ("union", with_sidecar(&left, &other))
        }
        _ => ("unravel", unravel(&left, 2)),
    };
    let right = permute(&right, &mut rng);
    PointedPair {
        name: format!("seed {seed}: {kind}"),
        left,
        right,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::kripke::fixture;

    fn small_suite(agents: &AgentSet) -> Vec<Formula> {
        ["Kw[i] p", "Cw5 p", "Kw[i] Cw5 p"]
            .iter()
            .map(|t| parse(t, agents).unwrap())
            .collect()
    }

    #[test]
    fn isomorphic_copies_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let agents = AgentSet::standard(2);
        let pairs: Vec<_> = (0..10)
            .map(|s| {
                let m = random_model(&RandomParams::new(4, agents.clone(), FrameClass::K), s);
                let left = PointedModel::new(m, 0).unwrap();
                let right = permute(&left, &mut rng);
                PointedPair {
                    name: format!("{s}"),
                    left,
                    right,
                }
            })
            .collect();
        let r = invariance_suite(&pairs, &small_suite(&agents));
        assert!(r.all_certified());
        assert_eq!(r.disagreement_count(), 0);
    }

    #[test]
    fn unraveling_to_depth_four_agrees() {
        let left = fixture("cw3-not-cw2").unwrap();
        let right = unravel(&left, 4);
        let pair = PointedPair {
            name: "unravel".into(),
            left: left.clone(),
            right,
        };
        let suite = formula_suite(left.model.agents(), Modality::CW5_LANGUAGE, 50, 3, 1);
        let r = invariance_suite(&[pair], &suite);
        assert!(r.all_certified());
        assert_eq!(r.disagreement_count(), 0);
    }

    #[test]
    fn see_p_and_see_notp_agree_without_being_bisimilar() {
        let (l, r) = (fixture("see-p").unwrap(), fixture("see-notp").unwrap());
        let pair = PointedPair {
            name: "see".into(),
            left: l.clone(),
            right: r,
        };
        let suite = formula_suite(l.model.agents(), Modality::CW5_LANGUAGE, 50, 3, 2);
        let rep = invariance_suite(&[pair.clone()], &suite);
        assert!(!rep.all_certified());
        assert_eq!(rep.disagreement_count(), 0);
        // K p tells them apart.
        let k = invariance_suite(&[pair], &[parse("K[i] p", l.model.agents()).unwrap()]);
        assert_eq!(k.disagreement_count(), 1);
    }

    #[test]
    fn random_pairs_are_certified_and_agree_on_both_languages() {
        let agents = AgentSet::standard(2);
        let pairs: Vec<_> = (0..30).map(random_bisimilar_pair).collect();
        for lang in [Modality::CW5_LANGUAGE, Modality::C_LANGUAGE] {
            let suite = formula_suite(&agents, lang, 50, 3, 5);
            assert_eq!(suite.len(), 50);
            let r = invariance_suite(&pairs, &suite);
            assert!(r.all_certified());
            assert_eq!(r.disagreement_count(), 0);
        }
    }
}
