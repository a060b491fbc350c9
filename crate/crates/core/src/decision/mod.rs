//! Bounded satisfiability and validity over a frame class.
//!
//! Answers are qualified by the search bound: "unsat" and "valid" only
//! mean that no model among the candidates visited is a witness.

pub mod search;

use crate::formula::{AgentSet, Formula};
use crate::kripke::{FrameClass, KripkeModel, PointedModel};
use crate::semantics::{extension, satisfies};

pub use search::{
    SearchParams, SearchSpace, DEFAULT_EXHAUSTIVE_LIMIT, DEFAULT_RANDOM_PER_SIZE, DEFAULT_SEED,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    /// Minimum number of agents; the formula's own agents are always included.
    pub agents: usize,
    pub exhaustive_limit: u128,
    pub random_per_size: u64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            agents: 1,
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            random_per_size: DEFAULT_RANDOM_PER_SIZE,
            seed: DEFAULT_SEED,
        }
    }
}

/// Agents of `f` in order of occurrence, padded with standard names up to
/// `min_count`.
pub fn ambient_agents(f: &Formula, min_count: usize) -> AgentSet {
    let mut agents = f.agents();
    for a in AgentSet::standard(min_count.max(1)).iter() {
        if agents.len() >= min_count.max(1) {
            break;
        }
        if !agents.contains(a) {
            agents.push(a.clone());
        }
    }
    AgentSet::new(agents).expect("nonempty and duplicate free")
}

fn space_for(f: &Formula, class: FrameClass, max_worlds: usize, opts: &SearchOptions) -> SearchSpace {
    let mut atoms: Vec<String> = f.atoms().into_iter().collect();
    if atoms.is_empty() {
        atoms.push("p".into());
    }
    let mut params = SearchParams::new(class, ambient_agents(f, opts.agents), atoms, max_worlds);
    params.exhaustive_limit = opts.exhaustive_limit;
    params.random_per_size = opts.random_per_size;
    params.seed = opts.seed;
    SearchSpace::new(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatStatus {
    Sat,
    UnsatUpToBound,
}

#[derive(Debug, Clone)]
pub struct SatResult {
    pub status: SatStatus,
    pub witness: Option<PointedModel>,
    pub bound: usize,
    pub exhaustive_worlds: usize,
    pub examined: u64,
}

fn first_world(m: &KripkeModel, f: &Formula) -> Option<usize> {
    extension(m, f)
        .expect("search models carry every agent of the formula")
        .first()
}

pub fn sat(f: &Formula, class: FrameClass, max_worlds: usize) -> SatResult {
    sat_with(f, class, max_worlds, &SearchOptions::default())
}

/// First pointed model in search order satisfying `f`.
pub fn sat_with(f: &Formula, class: FrameClass, max_worlds: usize, opts: &SearchOptions) -> SatResult {
    let space = space_for(f, class, max_worlds, opts);
    let found = space.find_first(|m| first_world(m, f));
    match found {
        Some((idx, model, point)) => {
            let pm = PointedModel::new(model, point).expect("point from extension");
            assert!(satisfies(&pm, f).unwrap_or(false), "witness re-check failed");
            SatResult {
                status: SatStatus::Sat,
                witness: Some(pm),
                bound: space.params().max_worlds,
                exhaustive_worlds: space.exhaustive_worlds,
                examined: idx + 1,
            }
        }
        None => SatResult {
            status: SatStatus::UnsatUpToBound,
            witness: None,
            bound: space.params().max_worlds,
            exhaustive_worlds: space.exhaustive_worlds,
            examined: space.len(),
        },
    }
}

#[derive(Debug, Clone)]
pub enum Validity {
    ValidUpToBound {
        bound: usize,
        exhaustive_worlds: usize,
        examined: u64,
    },
    Countermodel {
        witness: PointedModel,
        examined: u64,
    },
}

impl Validity {
    pub fn countermodel(&self) -> Option<&PointedModel> {
        match self {
            Validity::Countermodel { witness, .. } => Some(witness),
            Validity::ValidUpToBound { .. } => None,
        }
    }

    pub fn is_valid_up_to_bound(&self) -> bool {
        matches!(self, Validity::ValidUpToBound { .. })
    }
}

pub fn valid(f: &Formula, class: FrameClass, max_worlds: usize) -> Validity {
    valid_with(f, class, max_worlds, &SearchOptions::default())
}

/// Searches for a pointed model falsifying `f`.
pub fn valid_with(f: &Formula, class: FrameClass, max_worlds: usize, opts: &SearchOptions) -> Validity {
    let r = sat_with(&Formula::not(f.clone()), class, max_worlds, opts);
    match r.witness {
        Some(witness) => {
            assert!(
                !satisfies(&witness, f).unwrap_or(true),
                "countermodel re-check failed"
            );
            Validity::Countermodel {
                witness,
                examined: r.examined,
            }
        }
        None => Validity::ValidUpToBound {
            bound: r.bound,
            exhaustive_worlds: r.exhaustive_worlds,
            examined: r.examined,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_unchecked;

    fn f(s: &str) -> Formula {
        parse_unchecked(s).unwrap()
    }

    #[test]
    fn contradiction_is_unsat() {
        let r = sat(&f("p & ~p"), FrameClass::K, 3);
        assert_eq!(r.status, SatStatus::UnsatUpToBound);
    }

    #[test]
    fn not_knowing_whether_needs_two_successors() {
        let r = sat(&f("~Kw[a] p"), FrameClass::K, 4);
        let w = r.witness.unwrap();
        assert!(w.model.successors(0, w.point).len() >= 2);
        assert!(w.model.num_worlds() <= 3);
    }

    #[test]
    fn knowing_whether_is_self_dual() {
        let r = sat(&f("~(Kw[a] p <-> Kw[a] ~p)"), FrameClass::K, 4);
        assert_eq!(r.status, SatStatus::UnsatUpToBound);
    }

    #[test]
    fn cw21_does_not_imply_cw1() {
        let v = valid(&f("Cw21 p -> Cw1 p"), FrameClass::K, 3);
        let w = v.countermodel().unwrap();
        assert_eq!(w.model.num_worlds(), 2);
    }

    #[test]
    fn ambient_agents_pad_formula_agents() {
        let g = ambient_agents(&f("Kw[b] p"), 2);
        assert_eq!(g.len(), 2);
        assert_eq!(g.get(0).unwrap().as_str(), "b");
        assert_eq!(ambient_agents(&f("Cw5 p"), 1).len(), 1);
    }
}
