//! Single-agent K/C-definable sets by modal depth, computed by brute force
//! over unions of blocks. Used as an oracle for the CL-game.

use crate::kripke::{KripkeModel, WorldSet};
use crate::semantics::ops;

use super::transforms::disjoint_union;

/// More blocks than this and the union enumeration is refused.
pub const MAX_BLOCKS: usize = 16;

fn refine(blocks: Vec<WorldSet>, by: &WorldSet) -> Vec<WorldSet> {
    blocks
        .into_iter()
        .flat_map(|b| [b.intersection(by), b.difference(by)])
        .filter(|b| !b.is_empty())
        .collect()
}

/// Atoms of the boolean algebra of sets definable by formulas of modal
/// depth at most `depth` in the language of `K` and `C`. `None` once a
/// partition grows past [`MAX_BLOCKS`].
pub fn depth_partition(m: &KripkeModel, depth: usize) -> Option<Vec<WorldSet>> {
    assert_eq!(m.agents().len(), 1, "one relation");
    let n = m.num_worlds();
    let mut blocks = vec![WorldSet::full(n)];
    for set in m.valuation().values() {
        blocks = refine(blocks, set);
    }
    for _ in 0..depth {
        if blocks.len() > MAX_BLOCKS {
            return None;
        }
        let mut next = blocks.clone();
        for mask in 0u32..1 << blocks.len() {
            let mut x = WorldSet::empty(n);
            for (k, b) in blocks.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    x.union_with(b);
                }
            }
            next = refine(next, &ops::k(m, 0, &x));
            next = refine(next, &ops::c(m, &x));
        }
        blocks = next;
    }
    Some(blocks)
}

/// Whether some formula of modal depth `≤ depth` is true at exactly one of
/// `(l, x)` and `(r, y)`.
pub fn separated_at_depth(
    l: &KripkeModel,
    x: usize,
    r: &KripkeModel,
    y: usize,
    depth: usize,
) -> Option<bool> {
    let u = disjoint_union(l, r);
    let y = l.num_worlds() + y;
    let blocks = depth_partition(&u, depth)?;
    Some(!blocks.iter().any(|b| b.contains(x) && b.contains(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{build_m, build_n, ClGame, Winner};
    use crate::kripke::{fixture, random_model, FrameClass, RandomParams};
    use crate::formula::AgentSet;

    #[test]
    fn see_p_and_see_notp() {
        let (a, b) = (fixture("see-p").unwrap(), fixture("see-notp").unwrap());
        assert_eq!(separated_at_depth(&a.model, a.point, &b.model, b.point, 0), Some(false));
        assert_eq!(separated_at_depth(&a.model, a.point, &b.model, b.point, 1), Some(true));
    }

    fn agrees_with_game(l: &KripkeModel, r: &KripkeModel, rounds: usize) {
        let mut g = ClGame::new(l, r).unwrap();
        for x in l.worlds() {
            for y in r.worlds() {
                for k in 0..=rounds {
                    let Some(sep) = separated_at_depth(l, x, r, y, k) else {
                        return;
                    };
                    assert_eq!(g.winner(x, y, k) == Winner::Spoiler, sep, "({x},{y}) k={k}");
                }
            }
        }
    }

    #[test]
    fn game_matches_definability_on_the_first_family() {
        let (m, n) = (build_m(1), build_n(1));
        agrees_with_game(&m.model, &n.model, 3);
    }

    #[test]
    fn game_matches_definability_on_random_models() {
        let params = RandomParams::new(4, AgentSet::standard(1), FrameClass::K);
        for s in 0..20 {
            let l = random_model(&params, 2 * s);
            let r = random_model(&params, 2 * s + 1);
            agrees_with_game(&l, &r, 3);
        }
    }
}
