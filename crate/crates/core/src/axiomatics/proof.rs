use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AxiomSchema, Substitution};
use crate::formula::{parse, Agent, AgentError, AgentSet, Formula};

/// A proof as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofFile {
    pub agents: Vec<String>,
    pub lines: Vec<ProofFileLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofFileLine {
    pub formula: String,
    pub rule: String,
    #[serde(default)]
    pub refs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<String>,
}

#[derive(Debug, Error)]
pub enum ProofError {
    #[error("invalid proof file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid agent set: {0}")]
    Agents(#[from] AgentError),
    #[error("a proof needs at least one line")]
    Empty,
}

/// How a line claims to follow. Line references are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom(String),
    MP(usize, usize),
    KwNec(usize, Option<Agent>),
    CwNec(usize),
    KwRe(usize, Option<Agent>),
    CwRe(usize),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Axiom(n) => write!(f, "{n}"),
            Justification::MP(a, b) => write!(f, "MP {a}, {b}"),
            Justification::KwNec(a, _) => write!(f, "Kw-NEC {a}"),
            Justification::CwNec(a) => write!(f, "Cw-NEC {a}"),
            Justification::KwRe(a, _) => write!(f, "Kw-RE {a}"),
            Justification::CwRe(a) => write!(f, "Cw-RE {a}"),
        }
    }
}

/// One line as read from the file; parsing problems surface at check time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub text: String,
    pub rule: String,
    pub refs: Vec<usize>,
    pub agent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub agents: AgentSet,
    pub lines: Vec<ProofLine>,
}

impl Proof {
    pub fn from_file(file: ProofFile) -> Result<Proof, ProofError> {
        let agents = AgentSet::from_names(&file.agents)?;
        if file.lines.is_empty() {
            return Err(ProofError::Empty);
        }
        let lines = file
            .lines
            .into_iter()
            .map(|l| ProofLine {
                text: l.formula,
                rule: l.rule,
                refs: l.refs,
                agent: l.agent,
            })
            .collect();
        Ok(Proof { agents, lines })
    }

    pub fn from_json(text: &str) -> Result<Proof, ProofError> {
        Proof::from_file(serde_json::from_str(text)?)
    }

    pub fn to_file(&self) -> ProofFile {
        ProofFile {
            agents: self.agents.iter().map(|a| a.to_string()).collect(),
            lines: self
                .lines
                .iter()
                .map(|l| ProofFileLine {
                    formula: l.text.clone(),
                    rule: l.rule.clone(),
                    refs: l.refs.clone(),
                    agent: l.agent.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineError {
    #[error("formula does not parse: {0}")]
    Parse(String),
    #[error("{0} is outside the Kw/Cw language")]
    OutsideLanguage(String),
    #[error("unknown rule {0:?}")]
    UnknownRule(String),
    #[error("{rule} cites {expected} line(s), got {got}")]
    Arity {
        rule: String,
        expected: usize,
        got: usize,
    },
    #[error("reference {0} is not an earlier line")]
    BadReference(usize),
    #[error("unknown agent {0:?}")]
    UnknownAgent(String),
    #[error("not an instance of {0}")]
    NoMatchingSchema(String),
    #[error("{0}")]
    RuleMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineCheck {
    pub line: usize,
    pub formula: String,
    pub rule: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub substitution: Option<Substitution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofReport {
    pub accepted: bool,
    /// 1-based number of the first rejected line.
    pub first_failure: Option<usize>,
    pub conclusion: String,
    pub lines: Vec<LineCheck>,
}

fn in_language(f: &Formula) -> bool {
    f.subformulas().iter().all(|s| {
        matches!(
            s,
            Formula::Atom(_)
                | Formula::Not(_)
                | Formula::And(..)
                | Formula::Implies(..)
                | Formula::Kw(..)
                | Formula::Cw(_)
        )
    })
}

fn as_iff(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::And(l, r) => match (l.as_ref(), r.as_ref()) {
            (Formula::Implies(a, b), Formula::Implies(c, d)) if a == d && b == c => Some((a, b)),
            _ => None,
        },
        _ => None,
    }
}

fn justification(line: &ProofLine, agents: &AgentSet) -> Result<Justification, LineError> {
    let refs = &line.refs;
    let arity = |n: usize| {
        if refs.len() == n {
            Ok(())
        } else {
            Err(LineError::Arity {
                rule: line.rule.clone(),
                expected: n,
                got: refs.len(),
            })
        }
    };
    let agent = match &line.agent {
        None => None,
        Some(name) => Some(
            Agent::new(name.as_str())
                .ok()
                .filter(|a| agents.contains(a))
                .ok_or_else(|| LineError::UnknownAgent(name.clone()))?,
        ),
    };
    let rule = line.rule.to_ascii_uppercase();
    Ok(match rule.as_str() {
        "MP" => {
            arity(2)?;
            Justification::MP(refs[0], refs[1])
        }
        "KW-NEC" => {
            arity(1)?;
            Justification::KwNec(refs[0], agent)
        }
        "CW-NEC" => {
            arity(1)?;
            Justification::CwNec(refs[0])
        }
        "KW-RE" => {
            arity(1)?;
            Justification::KwRe(refs[0], agent)
        }
        "CW-RE" => {
            arity(1)?;
            Justification::CwRe(refs[0])
        }
        _ => {
            let schema = AxiomSchema::by_name(&line.rule)
                .map_err(|_| LineError::UnknownRule(line.rule.clone()))?;
            arity(0)?;
            Justification::Axiom(schema.name().to_string())
        }
    })
}

fn check_line(
    idx: usize,
    line: &ProofLine,
    parsed: &[Option<Formula>],
    agents: &AgentSet,
) -> Result<Option<Substitution>, LineError> {
    let f = parse(&line.text, agents).map_err(|e| LineError::Parse(e.to_string()))?;
    if !in_language(&f) {
        return Err(LineError::OutsideLanguage(f.to_string()));
    }
    let just = justification(line, agents)?;
    let cited = |r: usize| -> Result<&Formula, LineError> {
        if r == 0 || r > idx {
            return Err(LineError::BadReference(r));
        }
        parsed[r - 1].as_ref().ok_or(LineError::BadReference(r))
    };
    let mismatch = |msg: String| Err(LineError::RuleMismatch(msg));
    match just {
        Justification::Axiom(name) => {
            let schema = AxiomSchema::by_name(&name).expect("resolved above");
            match schema.matches(&f, agents) {
                Some(s) => Ok(Some(s)),
                None => Err(LineError::NoMatchingSchema(name)),
            }
        }
        Justification::MP(a, b) => {
            let (x, y) = (cited(a)?, cited(b)?);
            let fits = |minor: &Formula, major: &Formula| {
                matches!(major, Formula::Implies(ante, cons) if ante.as_ref() == minor && cons.as_ref() == &f)
            };
            if fits(x, y) || fits(y, x) {
                Ok(None)
            } else if !x.is_conditional() && !y.is_conditional() {
                mismatch(format!("neither line {a} nor line {b} is an implication"))
            } else {
                mismatch(format!("lines {a} and {b} do not yield this formula by MP"))
            }
        }
        Justification::KwNec(a, agent) => {
            let x = cited(a)?;
            match &f {
                Formula::Kw(ag, body) if body.as_ref() == x => match agent {
                    Some(want) if &want != ag => {
                        mismatch(format!("conclusion uses agent {ag}, rule names {want}"))
                    }
                    _ => Ok(None),
                },
                _ => mismatch(format!("not Kw_i applied to line {a}")),
            }
        }
        Justification::CwNec(a) => {
            let x = cited(a)?;
            match &f {
                Formula::Cw(body) if body.as_ref() == x => Ok(None),
                _ => mismatch(format!("not Cw applied to line {a}")),
            }
        }
        Justification::KwRe(a, agent) => {
            let x = cited(a)?;
            let Some((chi, psi)) = as_iff(x) else {
                return mismatch(format!("line {a} is not a biconditional"));
            };
            let ok = match as_iff(&f) {
                Some((Formula::Kw(g1, l), Formula::Kw(g2, r))) => {
                    g1 == g2
                        && l.as_ref() == chi
                        && r.as_ref() == psi
                        && agent.as_ref().map_or(true, |w| w == g1)
                }
                _ => false,
            };
            if ok {
                Ok(None)
            } else {
                mismatch(format!("not Kw_i applied to both sides of line {a}"))
            }
        }
        Justification::CwRe(a) => {
            let x = cited(a)?;
            let Some((chi, psi)) = as_iff(x) else {
                return mismatch(format!("line {a} is not a biconditional"));
            };
            match as_iff(&f) {
                Some((Formula::Cw(l), Formula::Cw(r))) if l.as_ref() == chi && r.as_ref() == psi => {
                    Ok(None)
                }
                _ => mismatch(format!("not Cw applied to both sides of line {a}")),
            }
        }
    }
}

/// Checks every line. The proof is accepted iff all lines are.
pub fn check_proof(pr: &Proof) -> ProofReport {
    let parsed: Vec<Option<Formula>> = pr
        .lines
        .iter()
        .map(|l| parse(&l.text, &pr.agents).ok())
        .collect();
    let lines: Vec<LineCheck> = pr
        .lines
        .iter()
        .enumerate()
        .map(|(idx, line)| {
            let result = check_line(idx, line, &parsed, &pr.agents);
            let (ok, substitution, error) = match result {
                Ok(s) => (true, s, None),
                Err(e) => (false, None, Some(e.to_string())),
            };
            LineCheck {
                line: idx + 1,
                formula: parsed[idx]
                    .as_ref()
                    .map_or_else(|| line.text.clone(), |f| f.to_string()),
                rule: line.rule.clone(),
                ok,
                substitution,
                error,
            }
        })
        .collect();
    let first_failure = lines.iter().find(|l| !l.ok).map(|l| l.line);
    ProofReport {
        accepted: first_failure.is_none(),
        first_failure,
        conclusion: lines.last().map(|l| l.formula.clone()).unwrap_or_default(),
        lines,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn proof(agents: &[&str], lines: &[(&str, &str, &[usize])]) -> Proof {
        Proof {
            agents: AgentSet::from_names(agents).unwrap(),
            lines: lines
                .iter()
                .map(|(t, r, refs)| ProofLine {
                    text: t.to_string(),
                    rule: r.to_string(),
                    refs: refs.to_vec(),
                    agent: None,
                })
                .collect(),
        }
    }

    #[test]
    fn three_line_necessitation_proof() {
        let pr = proof(
            &["a"],
            &[
                ("p -> p", "TAUT", &[]),
                ("Cw(p -> p)", "Cw-NEC", &[1]),
                ("Kw[a] Cw(p -> p)", "Kw-NEC", &[2]),
            ],
        );
        let r = check_proof(&pr);
        assert!(r.accepted, "{r:?}");
        assert_eq!(r.conclusion, "Kw[a] Cw(p -> p)");
    }

    #[test]
    fn mp_on_non_implication_is_rejected() {
        let pr = proof(
            &["a"],
            &[
                ("p -> p", "TAUT", &[]),
                ("Kw[a] p <-> Kw[a] ~p", "Kw-IFF", &[]),
                ("p", "MP", &[1, 2]),
            ],
        );
        assert_eq!(check_proof(&pr).first_failure, Some(3));
    }

    #[test]
    fn one_line_induction() {
        let pr = proof(&["a"], &[("Cw(q -> Kw[a] q) -> (q -> Cw q)", "Cw-Ind", &[])]);
        assert!(check_proof(&pr).accepted);
    }

    #[test]
    fn mp_either_order_and_re_rules() {
        let pr = proof(
            &["a"],
            &[
                ("p", "TAUT", &[]),
                ("q -> q", "TAUT", &[]),
                ("(q -> q) -> (p | ~p)", "TAUT", &[]),
                ("p | ~p", "MP", &[3, 2]),
                ("p <-> ~~p", "TAUT", &[]),
                ("Kw[a] p <-> Kw[a] ~~p", "Kw-RE", &[5]),
                ("Cw p <-> Cw ~~p", "Cw-RE", &[5]),
            ],
        );
        let r = check_proof(&pr);
        assert_eq!(r.first_failure, Some(1));
        assert!(r.lines[1..].iter().all(|l| l.ok), "{r:?}");
    }

    #[test]
    fn forward_and_zero_references() {
        let pr = proof(&["a"], &[("Cw(p -> p)", "Cw-NEC", &[2]), ("p -> p", "TAUT", &[])]);
        assert_eq!(check_proof(&pr).first_failure, Some(1));
        let pr = proof(&["a"], &[("Cw(p -> p)", "Cw-NEC", &[0])]);
        assert_eq!(check_proof(&pr).first_failure, Some(1));
    }

    #[test]
    fn json_round_trip() {
        let pr = proof(&["a", "b"], &[("p -> p", "TAUT", &[])]);
        let text = serde_json::to_string(&pr.to_file()).unwrap();
        assert_eq!(Proof::from_json(&text).unwrap(), pr);
        assert!(Proof::from_json(r#"{"agents": ["a"], "lines": [], "x": 1}"#).is_err());
    }
}
