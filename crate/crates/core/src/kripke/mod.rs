//! Finite Kripke models with one accessibility relation per agent.

mod enumerate;
mod fixtures;
mod io;
mod random;
mod worldset;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Agent, AgentError, AgentSet};

pub use enumerate::{relation_masks, ModelSpace};
pub use fixtures::{fixture, fixture_names, fixtures, Fixture, FixtureError};
pub use io::{load_model, model_from_json, model_to_json, save_model, ModelFile};
pub use random::{random_model, RandomParams};
pub use worldset::WorldSet;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("a model needs at least one world")]
    NoWorlds,
    #[error("duplicate world label {0:?}")]
    DuplicateWorld(String),
    #[error("{pointer}: reference to undeclared world {label:?}")]
    DanglingWorld { pointer: String, label: String },
    #[error("{pointer}: relation given for undeclared agent {agent:?}")]
    UndeclaredAgent { pointer: String, agent: String },
    #[error("{pointer}: invalid atom name {atom:?}")]
    InvalidAtom { pointer: String, atom: String },
    #[error("world index {0} out of range")]
    WorldIndex(usize),
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Frame conditions imposed on every agent relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrameClass {
    K,
    T,
    KD45,
    S5,
}

impl FrameClass {
    pub const ALL: [FrameClass; 4] = [FrameClass::K, FrameClass::T, FrameClass::KD45, FrameClass::S5];

    pub fn name(self) -> &'static str {
        match self {
            FrameClass::K => "K",
            FrameClass::T => "T",
            FrameClass::KD45 => "KD45",
            FrameClass::S5 => "S5",
        }
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FrameClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FrameClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown frame class {s:?}; expected K, T, KD45 or S5"))
    }
}

pub(crate) fn valid_atom(name: &str) -> bool {
    let b = name.as_bytes();
    !b.is_empty()
        && b[0].is_ascii_lowercase()
        && b.iter()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || *c == b'_')
}

/// A finite model. Immutable once built; the union relation and its
/// reflexive-transitive closure are computed at construction.
#[derive(Clone, PartialEq, Eq)]
pub struct KripkeModel {
    agents: AgentSet,
    labels: Vec<String>,
    succ: Vec<Vec<WorldSet>>,
    valuation: BTreeMap<String, WorldSet>,
    union: Vec<WorldSet>,
    reach: Vec<WorldSet>,
}

impl KripkeModel {
    /// Builds a model from successor sets, `succ[agent][world]`.
    pub fn from_successors(
        agents: AgentSet,
        labels: Vec<String>,
        succ: Vec<Vec<WorldSet>>,
        valuation: BTreeMap<String, WorldSet>,
    ) -> Result<Self, ModelError> {
        let n = labels.len();
        if n == 0 {
            return Err(ModelError::NoWorlds);
        }
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.as_str(), i).is_some() {
                return Err(ModelError::DuplicateWorld(l.clone()));
            }
        }
        assert_eq!(succ.len(), agents.len(), "one relation per agent");
        for rows in &succ {
            assert_eq!(rows.len(), n, "one successor set per world");
            assert!(rows.iter().all(|r| r.universe() == n));
        }
        for (atom, set) in &valuation {
            if !valid_atom(atom) {
                return Err(ModelError::InvalidAtom {
                    pointer: format!("/valuation/{atom}"),
                    atom: atom.clone(),
                });
            }
            assert_eq!(set.universe(), n);
        }
        Ok(Self::assemble(agents, labels, succ, valuation))
    }

    fn assemble(
        agents: AgentSet,
        labels: Vec<String>,
        succ: Vec<Vec<WorldSet>>,
        valuation: BTreeMap<String, WorldSet>,
    ) -> Self {
        let n = labels.len();
        let mut union = vec![WorldSet::empty(n); n];
        for rows in &succ {
            for (w, r) in rows.iter().enumerate() {
                union[w].union_with(r);
            }
        }
        let reach = reflexive_transitive_closure(&union);
        KripkeModel {
            agents,
            labels,
            succ,
            valuation,
            union,
            reach,
        }
    }

    /// Builds a model from labelled edges, `edges[agent]` listing `(from, to)`.
    pub fn from_edges(
        agents: AgentSet,
        labels: Vec<String>,
        edges: &[Vec<(usize, usize)>],
        valuation: BTreeMap<String, Vec<usize>>,
    ) -> Result<Self, ModelError> {
        let n = labels.len();
        let mut succ = vec![vec![WorldSet::empty(n); n]; agents.len()];
        for (a, list) in edges.iter().enumerate() {
            for &(u, v) in list {
                if u >= n || v >= n {
                    return Err(ModelError::WorldIndex(u.max(v)));
                }
                succ[a][u].insert(v);
            }
        }
        let mut val = BTreeMap::new();
        for (atom, ws) in valuation {
            if let Some(&w) = ws.iter().find(|&&w| w >= n) {
                return Err(ModelError::WorldIndex(w));
            }
            val.insert(atom, WorldSet::from_worlds(n, ws));
        }
        KripkeModel::from_successors(agents, labels, succ, val)
    }

    pub fn agents(&self) -> &AgentSet {
        &self.agents
    }

    pub fn num_worlds(&self) -> usize {
        self.labels.len()
    }

    pub fn worlds(&self) -> std::ops::Range<usize> {
        0..self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, w: usize) -> &str {
        &self.labels[w]
    }

    pub fn world(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn agent_index(&self, agent: &Agent) -> Option<usize> {
        self.agents.index_of(agent)
    }

    /// `R_a(w)` for the agent with index `a`.
    pub fn successors(&self, a: usize, w: usize) -> &WorldSet {
        &self.succ[a][w]
    }

    pub fn relation_rows(&self, a: usize) -> &[WorldSet] {
        &self.succ[a]
    }

    /// Successors of `w` under the union of all agent relations.
    pub fn union_successors(&self, w: usize) -> &WorldSet {
        &self.union[w]
    }

    /// Worlds reachable from `w` in zero or more steps of the union relation.
    pub fn reachable(&self, w: usize) -> &WorldSet {
        &self.reach[w]
    }

    pub fn relation_pairs(&self, a: usize) -> Vec<(usize, usize)> {
        pairs(&self.succ[a])
    }

    pub fn union_relation(&self) -> Vec<(usize, usize)> {
        pairs(&self.union)
    }

    pub fn reach_relation(&self) -> Vec<(usize, usize)> {
        pairs(&self.reach)
    }

    /// `V(p)`, empty for atoms the model does not mention.
    pub fn atom(&self, name: &str) -> WorldSet {
        self.valuation
            .get(name)
            .cloned()
            .unwrap_or_else(|| WorldSet::empty(self.num_worlds()))
    }

    pub fn valuation(&self) -> &BTreeMap<String, WorldSet> {
        &self.valuation
    }

    /// Atoms true at `w`, in name order.
    pub fn atoms_at(&self, w: usize) -> Vec<&str> {
        self.valuation
            .iter()
            .filter(|(_, s)| s.contains(w))
            .map(|(p, _)| p.as_str())
            .collect()
    }

    pub fn is_reflexive(&self, a: usize) -> bool {
        self.worlds().all(|w| self.succ[a][w].contains(w))
    }

    pub fn is_serial(&self, a: usize) -> bool {
        self.succ[a].iter().all(|r| !r.is_empty())
    }

    pub fn is_transitive(&self, a: usize) -> bool {
        let rows = &self.succ[a];
        rows.iter()
            .all(|r| r.iter().all(|v| rows[v].is_subset(r)))
    }

    pub fn is_euclidean(&self, a: usize) -> bool {
        let rows = &self.succ[a];
        rows.iter()
            .all(|r| r.iter().all(|v| r.is_subset(&rows[v])))
    }

    /// Every agent relation meets the conditions of `class`.
    pub fn in_class(&self, class: FrameClass) -> bool {
        (0..self.agents.len()).all(|a| match class {
            FrameClass::K => true,
            FrameClass::T => self.is_reflexive(a),
            FrameClass::KD45 => self.is_serial(a) && self.is_transitive(a) && self.is_euclidean(a),
            FrameClass::S5 => self.is_reflexive(a) && self.is_euclidean(a),
        })
    }

    /// The same model over `agents`. Agents already present keep their
    /// relation; new ones receive a copy of the first agent's relation, which
    /// keeps the model inside every frame class it belonged to.
    pub fn with_agents(&self, agents: &AgentSet) -> KripkeModel {
        let succ = agents
            .iter()
            .map(|a| match self.agents.index_of(a) {
                Some(idx) => self.succ[idx].clone(),
                None => self.succ[0].clone(),
            })
            .collect();
        Self::assemble(
            agents.clone(),
            self.labels.clone(),
            succ,
            self.valuation.clone(),
        )
    }

    /// The same model with world labels replaced.
    pub fn relabelled(&self, labels: Vec<String>) -> Result<KripkeModel, ModelError> {
        assert_eq!(labels.len(), self.num_worlds());
        KripkeModel::from_successors(
            self.agents.clone(),
            labels,
            self.succ.clone(),
            self.valuation.clone(),
        )
    }
}

fn pairs(rows: &[WorldSet]) -> Vec<(usize, usize)> {
    rows.iter()
        .enumerate()
        .flat_map(|(u, r)| r.iter().map(move |v| (u, v)))
        .collect()
}

fn reflexive_transitive_closure(step: &[WorldSet]) -> Vec<WorldSet> {
    let n = step.len();
    let mut reach: Vec<WorldSet> = (0..n)
        .map(|w| {
            let mut s = step[w].clone();
            s.insert(w);
            s
        })
        .collect();
    // Warshall over bitset rows
    for k in 0..n {
        let row_k = reach[k].clone();
        for row in reach.iter_mut() {
            if row.contains(k) {
                row.union_with(&row_k);
            }
        }
    }
    reach
}

impl fmt::Debug for KripkeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel: BTreeMap<String, Vec<(String, String)>> = self
            .agents
            .iter()
            .enumerate()
            .map(|(a, ag)| {
                let edges = self
                    .relation_pairs(a)
                    .into_iter()
                    .map(|(u, v)| (self.labels[u].clone(), self.labels[v].clone()))
                    .collect();
                (ag.to_string(), edges)
            })
            .collect();
        let val: BTreeMap<&String, Vec<&String>> = self
            .valuation
            .iter()
            .map(|(p, s)| (p, s.iter().map(|w| &self.labels[w]).collect()))
            .collect();
        f.debug_struct("KripkeModel")
            .field("worlds", &self.labels)
            .field("relations", &rel)
            .field("valuation", &val)
            .finish()
    }
}

/// A model together with a designated world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    pub model: KripkeModel,
    pub point: usize,
}

impl PointedModel {
    pub fn new(model: KripkeModel, point: usize) -> Result<Self, ModelError> {
        if point >= model.num_worlds() {
            return Err(ModelError::WorldIndex(point));
        }
        Ok(PointedModel { model, point })
    }

    pub fn point_label(&self) -> &str {
        self.model.label(self.point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("w{i}")).collect()
    }

    fn one_agent(n: usize, edges: &[(usize, usize)]) -> KripkeModel {
        KripkeModel::from_edges(
            AgentSet::from_names(&["a"]).unwrap(),
            labels(n),
            &[edges.to_vec()],
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn reach_of_isolated_world_is_reflexive() {
        let m = one_agent(1, &[]);
        assert_eq!(m.reach_relation(), vec![(0, 0)]);
    }

    #[test]
    fn reach_is_transitive_on_a_chain() {
        let m = one_agent(3, &[(0, 1), (1, 2)]);
        assert!(m.reach_relation().contains(&(0, 2)));
        assert!(!m.reach_relation().contains(&(2, 0)));
    }

    #[test]
    fn union_of_two_agents() {
        let m = KripkeModel::from_edges(
            AgentSet::from_names(&["a", "b"]).unwrap(),
            labels(3),
            &[vec![(0, 1)], vec![(0, 2)]],
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(m.union_relation(), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn frame_predicates() {
        let id = one_agent(2, &[(0, 0), (1, 1)]);
        assert!(FrameClass::ALL.iter().all(|&c| id.in_class(c)));
        let edge = one_agent(2, &[(0, 1)]);
        assert!(edge.in_class(FrameClass::K));
        assert!(!edge.in_class(FrameClass::T));
        assert!(!edge.in_class(FrameClass::KD45));
        let kd45 = one_agent(2, &[(0, 1), (1, 1)]);
        assert!(kd45.in_class(FrameClass::KD45));
        assert!(!kd45.in_class(FrameClass::S5));
    }

    #[test]
    fn construction_errors() {
        let g = AgentSet::from_names(&["a"]).unwrap();
        assert!(matches!(
            KripkeModel::from_edges(g.clone(), vec![], &[vec![]], BTreeMap::new()),
            Err(ModelError::NoWorlds)
        ));
        assert!(matches!(
            KripkeModel::from_edges(g.clone(), vec!["s".into(), "s".into()], &[vec![]], BTreeMap::new()),
            Err(ModelError::DuplicateWorld(_))
        ));
        assert!(matches!(
            KripkeModel::from_edges(g, labels(1), &[vec![(0, 3)]], BTreeMap::new()),
            Err(ModelError::WorldIndex(3))
        ));
    }

    #[test]
    fn lifting_preserves_class() {
        let kd45 = one_agent(2, &[(0, 1), (1, 1)]);
        let g = AgentSet::from_names(&["a", "b"]).unwrap();
        let lifted = kd45.with_agents(&g);
        assert_eq!(lifted.agents().len(), 2);
        assert!(lifted.in_class(FrameClass::KD45));
        assert_eq!(lifted.relation_pairs(1), kd45.relation_pairs(0));
    }
}
