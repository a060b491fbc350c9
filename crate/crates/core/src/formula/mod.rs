//! The formula language: agents, the AST, structural measures, desugaring of
//! the group operators and the closure construction used by the axiomatics.

mod closure;
mod parse;
mod random;
mod render;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use closure::{closure, is_closed, Closure, DEFAULT_CLOSURE_CAP};
pub use parse::{parse, parse_unchecked, ParseError};
pub use random::{FormulaGen, Modality};

/// Name of an agent. Nonempty token over `[a-z0-9_]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Agent(String);

impl Agent {
    pub fn new(id: impl Into<String>) -> Result<Self, AgentError> {
        let id = id.into();
        if id.is_empty()
            || !id
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
        {
            return Err(AgentError::InvalidName(id));
        }
        Ok(Agent(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Agent {
    type Error = AgentError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Agent::new(s)
    }
}

impl From<Agent> for String {
    fn from(a: Agent) -> String {
        a.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("invalid agent name {0:?}: expected a nonempty token over [a-z0-9_]")]
    InvalidName(String),
    #[error("duplicate agent {0}")]
    Duplicate(String),
    #[error("the agent set must be nonempty")]
    Empty,
    #[error("an agent sequence must be nonempty")]
    EmptySequence,
}

/// The ambient group of agents. Nonempty, duplicate free, ordered.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Agent>", into = "Vec<Agent>")]
pub struct AgentSet(Vec<Agent>);

impl AgentSet {
    pub fn new(agents: Vec<Agent>) -> Result<Self, AgentError> {
        if agents.is_empty() {
            return Err(AgentError::Empty);
        }
        let mut seen = BTreeSet::new();
        for a in &agents {
            if !seen.insert(a) {
                return Err(AgentError::Duplicate(a.0.clone()));
            }
        }
        Ok(AgentSet(agents))
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self, AgentError> {
        let agents = names
            .iter()
            .map(|n| Agent::new(n.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        AgentSet::new(agents)
    }

    /// `i`, `j`, `k`, ... for up to six agents, `a7`, `a8`, ... beyond that.
    pub fn standard(count: usize) -> Self {
        const NAMES: [&str; 6] = ["i", "j", "k", "l", "m", "n"];
        let count = count.max(1);
        let agents = (0..count)
            .map(|idx| match NAMES.get(idx) {
                Some(n) => Agent((*n).to_string()),
                None => Agent(format!("a{}", idx + 1)),
            })
            .collect();
        AgentSet(agents)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Agent> {
        self.0.iter()
    }

    pub fn index_of(&self, agent: &Agent) -> Option<usize> {
        self.0.iter().position(|a| a == agent)
    }

    pub fn contains(&self, agent: &Agent) -> bool {
        self.index_of(agent).is_some()
    }

    pub fn get(&self, idx: usize) -> Option<&Agent> {
        self.0.get(idx)
    }

    pub fn as_slice(&self) -> &[Agent] {
        &self.0
    }

    /// Agents of `self` followed by the agents of `other` not already present.
    pub fn merged(&self, other: &AgentSet) -> AgentSet {
        let mut agents = self.0.clone();
        for a in &other.0 {
            if !agents.contains(a) {
                agents.push(a.clone());
            }
        }
        AgentSet(agents)
    }
}

impl TryFrom<Vec<Agent>> for AgentSet {
    type Error = AgentError;
    fn try_from(v: Vec<Agent>) -> Result<Self, Self::Error> {
        AgentSet::new(v)
    }
}

impl From<AgentSet> for Vec<Agent> {
    fn from(s: AgentSet) -> Vec<Agent> {
        s.0
    }
}

impl<'a> IntoIterator for &'a AgentSet {
    type Item = &'a Agent;
    type IntoIter = std::slice::Iter<'a, Agent>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A nonempty word over the agents; `Kw_s φ` nests `Kw` along it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AgentSequence(Vec<Agent>);

impl AgentSequence {
    pub fn new(items: Vec<Agent>) -> Result<Self, AgentError> {
        if items.is_empty() {
            return Err(AgentError::EmptySequence);
        }
        Ok(AgentSequence(items))
    }

    pub fn items(&self) -> &[Agent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Group operators defined from the primitive ones, quantifying over the
/// ambient agent set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DerivedOp {
    Ew1,
    Ew2,
    Cw1,
    Cw21,
    Cw22,
    Cw31,
    Cw32,
    Cw4,
    Cw5,
}

impl DerivedOp {
    pub const ALL: [DerivedOp; 9] = [
        DerivedOp::Ew1,
        DerivedOp::Ew2,
        DerivedOp::Cw1,
        DerivedOp::Cw21,
        DerivedOp::Cw22,
        DerivedOp::Cw31,
        DerivedOp::Cw32,
        DerivedOp::Cw4,
        DerivedOp::Cw5,
    ];

    /// The seven candidate "commonly knowing whether" operators.
    pub const CW: [DerivedOp; 7] = [
        DerivedOp::Cw1,
        DerivedOp::Cw21,
        DerivedOp::Cw22,
        DerivedOp::Cw31,
        DerivedOp::Cw32,
        DerivedOp::Cw4,
        DerivedOp::Cw5,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            DerivedOp::Ew1 => "Ew1",
            DerivedOp::Ew2 => "Ew2",
            DerivedOp::Cw1 => "Cw1",
            DerivedOp::Cw21 => "Cw21",
            DerivedOp::Cw22 => "Cw22",
            DerivedOp::Cw31 => "Cw31",
            DerivedOp::Cw32 => "Cw32",
            DerivedOp::Cw4 => "Cw4",
            DerivedOp::Cw5 => "Cw5",
        }
    }

    /// Operators that only exist as infinite conjunctions.
    pub fn is_infinitary(self) -> bool {
        matches!(self, DerivedOp::Cw31 | DerivedOp::Cw32 | DerivedOp::Cw5)
    }
}

impl fmt::Display for DerivedOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for DerivedOp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DerivedOp::ALL
            .into_iter()
            .find(|op| op.keyword() == s)
            .ok_or_else(|| format!("unknown operator {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    K(Agent, Box<Formula>),
    Kw(Agent, Box<Formula>),
    E(Box<Formula>),
    C(Box<Formula>),
    /// The primitive `Cw` operator, interpreted over the reflexive-transitive
    /// closure of the union of all relations.
    Cw(Box<Formula>),
    Derived(DerivedOp, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// `a ∨ b` encoded as `¬(¬a ∧ ¬b)`.
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `a ↔ b` encoded as `(a → b) ∧ (b → a)`.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn k(agent: Agent, f: Formula) -> Formula {
        Formula::K(agent, Box::new(f))
    }

    pub fn kw(agent: Agent, f: Formula) -> Formula {
        Formula::Kw(agent, Box::new(f))
    }

    pub fn e(f: Formula) -> Formula {
        Formula::E(Box::new(f))
    }

    pub fn c(f: Formula) -> Formula {
        Formula::C(Box::new(f))
    }

    pub fn cw(f: Formula) -> Formula {
        Formula::Cw(Box::new(f))
    }

    pub fn derived(op: DerivedOp, f: Formula) -> Formula {
        Formula::Derived(op, Box::new(f))
    }

    /// `Kw_{s_1} ... Kw_{s_n} f`.
    pub fn kw_seq(seq: &AgentSequence, f: Formula) -> Formula {
        seq.items()
            .iter()
            .rev()
            .fold(f, |acc, a| Formula::kw(a.clone(), acc))
    }

    /// Left-nested conjunction; `None` for an empty iterator.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    pub fn is_negation(&self) -> bool {
        matches!(self, Formula::Not(_))
    }

    pub fn is_conditional(&self) -> bool {
        matches!(self, Formula::Implies(..))
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) => vec![],
            Formula::Not(a)
            | Formula::K(_, a)
            | Formula::Kw(_, a)
            | Formula::E(a)
            | Formula::C(a)
            | Formula::Cw(a)
            | Formula::Derived(_, a) => vec![a],
            Formula::And(a, b) | Formula::Implies(a, b) => vec![a, b],
        }
    }

    /// All subformulas including `self`, in pre-order.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            for c in f.children().into_iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.subformulas()
            .into_iter()
            .filter_map(|f| match f {
                Formula::Atom(p) => Some(p.clone()),
                _ => None,
            })
            .collect()
    }

    /// Agents mentioned explicitly by `K` or `Kw` nodes, in first-occurrence order.
    pub fn agents(&self) -> Vec<Agent> {
        let mut out: Vec<Agent> = Vec::new();
        for f in self.subformulas() {
            if let Formula::K(a, _) | Formula::Kw(a, _) = f {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
        }
        out
    }

    /// Whether any group operator (whose meaning depends on the ambient
    /// agent set) occurs.
    pub fn mentions_group(&self) -> bool {
        self.subformulas().into_iter().any(|f| {
            matches!(
                f,
                Formula::E(_) | Formula::C(_) | Formula::Cw(_) | Formula::Derived(..)
            )
        })
    }

    pub fn size(&self) -> usize {
        self.subformulas().len()
    }

    /// Modal depth of a formula of the common-knowledge language, with the
    /// convention `d(p) = 1`.
    pub fn modal_depth(&self) -> Result<usize, DepthError> {
        match self {
            Formula::Atom(_) => Ok(1),
            Formula::Not(a) => a.modal_depth(),
            Formula::And(a, b) | Formula::Implies(a, b) => {
                Ok(a.modal_depth()?.max(b.modal_depth()?))
            }
            Formula::K(_, a) | Formula::E(a) | Formula::C(a) => Ok(a.modal_depth()? + 1),
            Formula::Kw(..) | Formula::Cw(_) | Formula::Derived(..) => {
                Err(DepthError::Unsupported(self.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DepthError {
    #[error("modal depth is only defined on the common-knowledge language; found {0}")]
    Unsupported(String),
}

/// Result of [`desugar`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Desugared {
    pub formula: Formula,
    /// Set when `Cw31`, `Cw32` or `Cw5` remain; those have no finite expansion.
    pub infinitary: bool,
}

/// Expands every finitely definable group operator into `E`, `C`, `Kw`
/// and the Boolean connectives.
pub fn desugar(f: &Formula, agents: &AgentSet) -> Desugared {
    let mut infinitary = false;
    let formula = desugar_rec(f, agents, &mut infinitary);
    Desugared {
        formula,
        infinitary,
    }
}

fn desugar_rec(f: &Formula, agents: &AgentSet, infinitary: &mut bool) -> Formula {
    use Formula as F;
    let mut go = |g: &Formula| desugar_rec(g, agents, infinitary);
    match f {
        F::Atom(_) => f.clone(),
        F::Not(a) => F::not(go(a)),
        F::And(a, b) => F::and(go(a), go(b)),
        F::Implies(a, b) => F::implies(go(a), go(b)),
        F::K(i, a) => F::k(i.clone(), go(a)),
        F::Kw(i, a) => F::kw(i.clone(), go(a)),
        F::E(a) => F::e(go(a)),
        F::C(a) => F::c(go(a)),
        F::Cw(a) => F::cw(go(a)),
        F::Derived(op, a) => {
            let body = go(a);
            match op {
                DerivedOp::Ew1 => expand_ew1(body),
                DerivedOp::Ew2 => expand_ew2(body, agents),
                DerivedOp::Cw1 => F::or(F::c(body.clone()), F::c(F::not(body))),
                DerivedOp::Cw21 => F::c(expand_ew1(body)),
                DerivedOp::Cw22 => F::c(expand_ew2(body, agents)),
                DerivedOp::Cw4 => F::conjunction(agents.iter().map(|i| {
                    let kw = F::kw(i.clone(), body.clone());
                    F::or(F::c(kw.clone()), F::c(F::not(kw)))
                }))
                .expect("agent set is nonempty"),
                DerivedOp::Cw31 | DerivedOp::Cw32 | DerivedOp::Cw5 => {
                    *infinitary = true;
                    F::derived(*op, body)
                }
            }
        }
    }
}

fn expand_ew1(body: Formula) -> Formula {
    Formula::or(Formula::e(body.clone()), Formula::e(Formula::not(body)))
}

fn expand_ew2(body: Formula, agents: &AgentSet) -> Formula {
    Formula::conjunction(agents.iter().map(|i| Formula::kw(i.clone(), body.clone())))
        .expect("agent set is nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn agents(names: &[&str]) -> AgentSet {
        AgentSet::from_names(names).unwrap()
    }

    #[test]
    fn agent_names_are_validated() {
        assert!(Agent::new("a").is_ok());
        assert!(Agent::new("agent_2").is_ok());
        assert!(Agent::new("").is_err());
        assert!(Agent::new("A").is_err());
        assert!(AgentSet::from_names(&["a", "a"]).is_err());
        assert!(AgentSet::from_names::<&str>(&[]).is_err());
    }

    #[test]
    fn depth_of_atom_is_one() {
        assert_eq!(p().modal_depth().unwrap(), 1);
    }

    #[test]
    fn depth_of_k_layer() {
        let a = Agent::new("a").unwrap();
        assert_eq!(Formula::k(a, p()).modal_depth().unwrap(), 2);
    }

    #[test]
    fn depth_of_common_knowledge_of_contradiction() {
        let a = Agent::new("a").unwrap();
        let f = Formula::c(Formula::k(a, Formula::and(p(), Formula::not(p()))));
        assert_eq!(f.modal_depth().unwrap(), 3);
    }

    #[test]
    fn depth_rejects_knowing_whether() {
        let a = Agent::new("a").unwrap();
        assert!(Formula::kw(a, p()).modal_depth().is_err());
        assert!(Formula::derived(DerivedOp::Cw5, p()).modal_depth().is_err());
        assert!(Formula::cw(p()).modal_depth().is_err());
    }

    #[test]
    fn desugar_cw1_single_agent() {
        let g = agents(&["a"]);
        let d = desugar(&Formula::derived(DerivedOp::Cw1, p()), &g);
        assert!(!d.infinitary);
        assert_eq!(
            d.formula,
            Formula::or(Formula::c(p()), Formula::c(Formula::not(p())))
        );
    }

    #[test]
    fn desugar_ew2_two_agents() {
        let g = agents(&["a", "b"]);
        let d = desugar(&Formula::derived(DerivedOp::Ew2, p()), &g);
        let a = Agent::new("a").unwrap();
        let b = Agent::new("b").unwrap();
        assert_eq!(
            d.formula,
            Formula::and(Formula::kw(a, p()), Formula::kw(b, p()))
        );
    }

    #[test]
    fn desugar_leaves_cw5_flagged() {
        let g = agents(&["a"]);
        let f = Formula::derived(DerivedOp::Cw5, p());
        let d = desugar(&f, &g);
        assert!(d.infinitary);
        assert_eq!(d.formula, f);
    }

    #[test]
    fn desugar_cw4_and_nested() {
        let g = agents(&["a", "b"]);
        let f = Formula::derived(DerivedOp::Cw4, Formula::derived(DerivedOp::Ew1, p()));
        let d = desugar(&f, &g);
        assert!(!d.infinitary);
        assert!(!d
            .formula
            .subformulas()
            .iter()
            .any(|s| matches!(s, Formula::Derived(..))));
        assert_eq!(desugar(&d.formula, &g), d);
    }

    #[test]
    fn kw_sequence_nests_left_to_right() {
        let a = Agent::new("a").unwrap();
        let b = Agent::new("b").unwrap();
        let seq = AgentSequence::new(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(
            Formula::kw_seq(&seq, p()),
            Formula::kw(a, Formula::kw(b, p()))
        );
        assert!(AgentSequence::new(vec![]).is_err());
    }
}
