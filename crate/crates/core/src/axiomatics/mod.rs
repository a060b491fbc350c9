//! The axiom system for Kw and the primitive Cw over S5: schemas as data,
//! instance recognition, proof checking and sampled soundness.

mod bundled;
mod proof;
mod soundness;
mod taut;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{parse_unchecked, Agent, AgentSet, DerivedOp, Formula};

pub use bundled::{mutated_proofs, sample_proofs, BundledProof, MutatedProof};
pub use proof::{
    check_proof, Justification, LineCheck, LineError, Proof, ProofError, ProofFile, ProofLine,
    ProofReport,
};
pub use soundness::{
    nary_kw_schemas, soundness_sample, soundness_sample_in, target_sample, SampleParams,
    SoundnessReport, TargetReport, Violation,
};
pub use taut::{is_tautology, MAX_OPAQUE};

/// Formula metavariables usable in templates.
pub const FORMULA_METAVARS: [&str; 3] = ["phi", "psi", "chi"];
/// The agent metavariable.
pub const AGENT_METAVAR: &str = "i";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("template: {0}")]
    Template(String),
    #[error("substitution does not bind {0}")]
    MissingMetavariable(String),
    #[error("{0} is not a propositional tautology")]
    NotTautology(String),
    #[error("no schema named {0:?}")]
    UnknownSchema(String),
    #[error("n-ary schemas need n >= 2, got {0}")]
    Arity(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Pat {
    Var(String),
    Not(Box<Pat>),
    And(Box<Pat>, Box<Pat>),
    Implies(Box<Pat>, Box<Pat>),
    Kw(Box<Pat>),
    Cw(Box<Pat>),
    /// Conjunction of `Kw_g` over the ambient agents, in order.
    Ew(Box<Pat>),
}

impl Pat {
    fn from_formula(f: &Formula) -> Result<Pat, AxiomError> {
        let bad = |what: &str| AxiomError::Template(format!("{what} not allowed in a template"));
        let sub = |a: &Formula| Pat::from_formula(a).map(Box::new);
        Ok(match f {
            Formula::Atom(p) if FORMULA_METAVARS.contains(&p.as_str()) => Pat::Var(p.clone()),
            Formula::Atom(p) => return Err(bad(&format!("atom {p}"))),
            Formula::Not(a) => Pat::Not(sub(a)?),
            Formula::And(a, b) => Pat::And(sub(a)?, sub(b)?),
            Formula::Implies(a, b) => Pat::Implies(sub(a)?, sub(b)?),
            Formula::Kw(ag, a) if ag.as_str() == AGENT_METAVAR => Pat::Kw(sub(a)?),
            Formula::Kw(ag, _) => return Err(bad(&format!("agent {ag}"))),
            Formula::Cw(a) => Pat::Cw(sub(a)?),
            Formula::Derived(DerivedOp::Ew2, a) => Pat::Ew(sub(a)?),
            other => return Err(bad(&format!("{other}"))),
        })
    }

    fn matches(&self, f: &Formula, g: &AgentSet, s: &mut Substitution) -> bool {
        match (self, f) {
            (Pat::Var(v), _) => match s.formulas.get(v) {
                Some(bound) => bound == f,
                None => {
                    s.formulas.insert(v.clone(), f.clone());
                    true
                }
            },
            (Pat::Not(p), Formula::Not(a)) => p.matches(a, g, s),
            (Pat::And(p, q), Formula::And(a, b)) | (Pat::Implies(p, q), Formula::Implies(a, b)) => {
                p.matches(a, g, s) && q.matches(b, g, s)
            }
            (Pat::Kw(p), Formula::Kw(ag, a)) => {
                match &s.agent {
                    Some(bound) if bound != ag => return false,
                    Some(_) => {}
                    None => s.agent = Some(ag.clone()),
                }
                p.matches(a, g, s)
            }
            (Pat::Cw(p), Formula::Cw(a)) => p.matches(a, g, s),
            (Pat::Ew(p), _) => {
                let Some(parts) = split_conjunction(f, g.len()) else {
                    return false;
                };
                parts.iter().zip(g.iter()).all(|(part, ag)| match part {
                    Formula::Kw(b, a) if b == ag => p.matches(a, g, s),
                    _ => false,
                })
            }
            _ => false,
        }
    }

    fn fill(&self, s: &Substitution, g: &AgentSet) -> Result<Formula, AxiomError> {
        Ok(match self {
            Pat::Var(v) => s
                .formulas
                .get(v)
                .cloned()
                .ok_or_else(|| AxiomError::MissingMetavariable(v.clone()))?,
            Pat::Not(p) => Formula::not(p.fill(s, g)?),
            Pat::And(p, q) => Formula::and(p.fill(s, g)?, q.fill(s, g)?),
            Pat::Implies(p, q) => Formula::implies(p.fill(s, g)?, q.fill(s, g)?),
            Pat::Kw(p) => {
                let ag = s
                    .agent
                    .clone()
                    .ok_or_else(|| AxiomError::MissingMetavariable(AGENT_METAVAR.into()))?;
                Formula::kw(ag, p.fill(s, g)?)
            }
            Pat::Cw(p) => Formula::cw(p.fill(s, g)?),
            Pat::Ew(p) => {
                let body = p.fill(s, g)?;
                Formula::conjunction(g.iter().map(|ag| Formula::kw(ag.clone(), body.clone())))
                    .expect("agent sets are nonempty")
            }
        })
    }

    fn metavars(&self, out: &mut Vec<String>) {
        match self {
            Pat::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Pat::Kw(p) => {
                if !out.iter().any(|v| v == AGENT_METAVAR) {
                    out.push(AGENT_METAVAR.into());
                }
                p.metavars(out);
            }
            Pat::Not(p) | Pat::Cw(p) | Pat::Ew(p) => p.metavars(out),
            Pat::And(p, q) | Pat::Implies(p, q) => {
                p.metavars(out);
                q.metavars(out);
            }
        }
    }
}

/// Splits a left-nested conjunction into exactly `n` conjuncts.
fn split_conjunction(f: &Formula, n: usize) -> Option<Vec<&Formula>> {
    let mut parts = Vec::with_capacity(n);
    let mut cur = f;
    for _ in 1..n {
        match cur {
            Formula::And(a, b) => {
                parts.push(b.as_ref());
                cur = a;
            }
            _ => return None,
        }
    }
    parts.push(cur);
    parts.reverse();
    Some(parts)
}

/// Bindings for the metavariables of a schema.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    pub formulas: BTreeMap<String, Formula>,
    pub agent: Option<Agent>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: &str, f: Formula) -> Self {
        self.formulas.insert(var.to_string(), f);
        self
    }

    pub fn with_agent(mut self, agent: Agent) -> Self {
        self.agent = Some(agent);
        self
    }

    /// Metavariable names mapped to rendered formulas or agent names.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m: BTreeMap<String, String> = self
            .formulas
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect();
        if let Some(a) = &self.agent {
            m.insert(AGENT_METAVAR.into(), a.to_string());
        }
        m
    }
}

impl Serialize for Substitution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_map().serialize(s)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .to_map()
            .into_iter()
            .map(|(k, v)| format!("{k} := {v}"))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Template {
    Taut,
    Pattern(Pat),
}

/// A named axiom schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomSchema {
    name: String,
    text: String,
    template: Template,
}

const SCHEMAS: [(&str, &str); 10] = [
    ("Kw-CON", "Kw[i](chi -> phi) & Kw[i](~chi -> phi) -> Kw[i] phi"),
    ("Kw-DIS", "Kw[i] phi -> Kw[i](phi -> psi) | Kw[i](~phi -> chi)"),
    ("Kw-T", "Kw[i] phi & Kw[i](phi -> psi) & phi -> Kw[i] psi"),
    ("wKw-5", "~Kw[i] phi -> Kw[i] ~Kw[i] phi"),
    ("Kw-IFF", "Kw[i] phi <-> Kw[i] ~phi"),
    ("Cw-CON", "Cw(chi -> phi) & Cw(~chi -> phi) -> Cw phi"),
    ("Cw-DIS", "Cw phi -> Cw(phi -> psi) | Cw(~phi -> chi)"),
    ("Cw-T", "Cw phi & Cw(phi -> psi) & phi -> Cw psi"),
    ("Cw-Mix", "Cw phi -> Ew2 phi & Ew2 Cw phi"),
    ("Cw-Ind", "Cw(phi -> Ew2 phi) -> (phi -> Cw phi)"),
];

impl AxiomSchema {
    /// Every schema of the system: TAUT first, then the ten modal ones.
    pub fn all() -> Vec<AxiomSchema> {
        let mut out = vec![AxiomSchema::taut()];
        out.extend(
            SCHEMAS
                .iter()
                .map(|(n, t)| AxiomSchema::custom(n, t).expect("built-in templates parse")),
        );
        out
    }

    pub fn taut() -> AxiomSchema {
        AxiomSchema {
            name: "TAUT".into(),
            text: "phi, any propositional tautology".into(),
            template: Template::Taut,
        }
    }

    /// A schema from template text. Atoms `phi`, `psi`, `chi` are formula
    /// metavariables, `Kw[i]` carries the agent metavariable and `Ew2 x`
    /// expands to the conjunction of `Kw_g x` over the agent set.
    pub fn custom(name: &str, template: &str) -> Result<AxiomSchema, AxiomError> {
        let f = parse_unchecked(template).map_err(|e| AxiomError::Template(e.to_string()))?;
        Ok(AxiomSchema {
            name: name.to_string(),
            text: template.to_string(),
            template: Template::Pattern(Pat::from_formula(&f)?),
        })
    }

    /// Case-insensitive lookup; `Kw-<->` is accepted for `Kw-IFF`.
    pub fn by_name(name: &str) -> Result<AxiomSchema, AxiomError> {
        let key = if name == "Kw-<->" { "Kw-IFF" } else { name };
        AxiomSchema::all()
            .into_iter()
            .find(|s| s.name.eq_ignore_ascii_case(key))
            .ok_or_else(|| AxiomError::UnknownSchema(name.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn template_text(&self) -> &str {
        &self.text
    }

    pub fn is_taut(&self) -> bool {
        self.template == Template::Taut
    }

    /// Metavariables in order of first occurrence.
    pub fn metavars(&self) -> Vec<String> {
        let mut out = Vec::new();
        match &self.template {
            Template::Taut => out.push("phi".into()),
            Template::Pattern(p) => p.metavars(&mut out),
        }
        out
    }

    /// Fills the template. For TAUT the substitution's `phi` is the
    /// instance and must be a tautology.
    pub fn instantiate(&self, subst: &Substitution, agents: &AgentSet) -> Result<Formula, AxiomError> {
        match &self.template {
            Template::Taut => {
                let f = subst
                    .formulas
                    .get("phi")
                    .ok_or_else(|| AxiomError::MissingMetavariable("phi".into()))?;
                if is_tautology(f) == Some(true) {
                    Ok(f.clone())
                } else {
                    Err(AxiomError::NotTautology(f.to_string()))
                }
            }
            Template::Pattern(p) => p.fill(subst, agents),
        }
    }

    /// The substitution under which `f` is an instance, if any.
    pub fn matches(&self, f: &Formula, agents: &AgentSet) -> Option<Substitution> {
        match &self.template {
            Template::Taut => {
                (is_tautology(f) == Some(true)).then(|| Substitution::new().with("phi", f.clone()))
            }
            Template::Pattern(p) => {
                let mut s = Substitution::new();
                p.matches(f, agents, &mut s).then_some(s)
            }
        }
    }
}

impl fmt::Display for AxiomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.name, self.text)
    }
}

pub fn instantiate(
    schema: &AxiomSchema,
    subst: &Substitution,
    agents: &AgentSet,
) -> Result<Formula, AxiomError> {
    schema.instantiate(subst, agents)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomMatch {
    pub schema: String,
    pub substitution: Substitution,
}

/// Every schema `f` is an instance of.
pub fn match_axiom(f: &Formula, agents: &AgentSet) -> Vec<AxiomMatch> {
    AxiomSchema::all()
        .into_iter()
        .filter_map(|s| {
            s.matches(f, agents).map(|substitution| AxiomMatch {
                schema: s.name.clone(),
                substitution,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn g(names: &[&str]) -> AgentSet {
        AgentSet::from_names(names).unwrap()
    }

    fn p(s: &str) -> Formula {
        parse_unchecked(s).unwrap()
    }

    #[test]
    fn eleven_schemas() {
        let all = AxiomSchema::all();
        assert_eq!(all.len(), 11);
        for s in &all {
            assert!(s
                .metavars()
                .iter()
                .all(|v| FORMULA_METAVARS.contains(&v.as_str()) || v == AGENT_METAVAR));
        }
    }

    #[test]
    fn kw_iff_instance() {
        let s = AxiomSchema::by_name("Kw-IFF").unwrap();
        let sub = Substitution::new()
            .with("phi", p("p"))
            .with_agent(Agent::new("a").unwrap());
        let f = s.instantiate(&sub, &g(&["a"])).unwrap();
        assert_eq!(f, p("Kw[a] p <-> Kw[a] ~p"));
    }

    #[test]
    fn cw_mix_expands_ew_over_agents() {
        let s = AxiomSchema::by_name("Cw-Mix").unwrap();
        let sub = Substitution::new().with("phi", p("p"));
        assert_eq!(
            s.instantiate(&sub, &g(&["a"])).unwrap(),
            p("Cw p -> (Kw[a] p & Kw[a] Cw p)")
        );
        assert_eq!(
            s.instantiate(&sub, &g(&["a", "b"])).unwrap(),
            p("Cw p -> (Kw[a] p & Kw[b] p) & (Kw[a] Cw p & Kw[b] Cw p)")
        );
    }

    #[test]
    fn taut_instance() {
        let t = AxiomSchema::taut();
        let sub = Substitution::new().with("phi", p("p -> p"));
        assert_eq!(t.instantiate(&sub, &g(&["a"])).unwrap(), p("p -> p"));
        let bad = Substitution::new().with("phi", p("p -> q"));
        assert!(matches!(
            t.instantiate(&bad, &g(&["a"])),
            Err(AxiomError::NotTautology(_))
        ));
    }

    #[test]
    fn missing_metavariable() {
        let s = AxiomSchema::by_name("Kw-DIS").unwrap();
        let sub = Substitution::new()
            .with("phi", p("p"))
            .with_agent(Agent::new("a").unwrap());
        assert_eq!(
            s.instantiate(&sub, &g(&["a"])),
            Err(AxiomError::MissingMetavariable("psi".into()))
        );
    }

    #[test]
    fn match_examples() {
        let agents = g(&["a"]);
        let f = parse("Kw[a] p <-> Kw[a] ~p", &agents).unwrap();
        let ms = match_axiom(&f, &agents);
        let m = ms.iter().find(|m| m.schema == "Kw-IFF").unwrap();
        assert_eq!(m.substitution.formulas["phi"], p("p"));
        assert_eq!(m.substitution.agent.as_ref().unwrap().as_str(), "a");
        assert!(match_axiom(&p("p -> p"), &agents)
            .iter()
            .any(|m| m.schema == "TAUT"));
        assert!(match_axiom(&p("Cw p"), &agents).is_empty());
    }

    #[test]
    fn ew_must_cover_every_agent() {
        let f = p("Cw p -> (Kw[a] p & Kw[a] Cw p)");
        assert!(!match_axiom(&f, &g(&["a", "b"]))
            .iter()
            .any(|m| m.schema == "Cw-Mix"));
        assert!(match_axiom(&f, &g(&["a"]))
            .iter()
            .any(|m| m.schema == "Cw-Mix"));
    }

    #[test]
    fn inconsistent_bindings_do_not_match() {
        let agents = g(&["a", "b"]);
        assert!(match_axiom(&p("Kw[a] p <-> Kw[b] ~p"), &agents).is_empty());
        assert!(match_axiom(&p("Kw[a] p <-> Kw[a] ~q"), &agents).is_empty());
    }

    #[test]
    fn custom_templates_reject_foreign_symbols() {
        assert!(AxiomSchema::custom("bad", "Kw[j] phi").is_err());
        assert!(AxiomSchema::custom("bad", "p -> phi").is_err());
        assert!(AxiomSchema::custom("bad", "C phi").is_err());
        assert!(AxiomSchema::custom("cw-t-weak", "Cw phi -> phi").is_ok());
    }
}
