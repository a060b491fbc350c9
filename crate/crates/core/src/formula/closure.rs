use std::collections::{HashMap, HashSet, VecDeque};

use super::{Agent, AgentSet, Formula};

pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

/// A closure set in insertion order. `truncated` is set when the cap was hit
/// before the fixpoint; the set is then only a prefix of the true closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub formulas: Vec<Formula>,
    pub truncated: bool,
}

impl Closure {
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas.contains(f)
    }
}

struct Builder<'a> {
    agents: &'a AgentSet,
    cap: usize,
    seen: HashSet<Formula>,
    order: Vec<Formula>,
    queue: VecDeque<Formula>,
    // non-conditional bodies of Kw_i formulas, per agent
    kw_bodies: HashMap<Agent, Vec<Formula>>,
    // bodies ψ1 of ¬Kw_i ψ1 with ψ1 not a negation, per agent
    neg_kw: HashMap<Agent, Vec<Formula>>,
    cw_bodies: Vec<Formula>,
    truncated: bool,
}

impl Builder<'_> {
    fn add(&mut self, f: Formula) {
        if self.truncated || self.seen.contains(&f) {
            return;
        }
        if self.order.len() >= self.cap {
            self.truncated = true;
            return;
        }
        self.seen.insert(f.clone());
        self.order.push(f.clone());
        self.queue.push_back(f);
    }

    fn process(&mut self, f: Formula) {
        for c in f.children() {
            self.add(c.clone());
        }
        if !f.is_negation() {
            self.add(Formula::not(f.clone()));
        }
        match &f {
            Formula::Kw(i, psi) if !psi.is_conditional() => {
                let bodies = self.kw_bodies.entry(i.clone()).or_default();
                bodies.push((**psi).clone());
                let others = bodies.clone();
                for chi in others {
                    self.add(Formula::kw(
                        i.clone(),
                        Formula::implies(chi.clone(), (**psi).clone()),
                    ));
                    self.add(Formula::kw(
                        i.clone(),
                        Formula::implies((**psi).clone(), chi),
                    ));
                }
            }
            Formula::Cw(psi) => {
                self.cw_bodies.push((**psi).clone());
                for i in self.agents.iter() {
                    self.add(Formula::kw(i.clone(), f.clone()));
                    self.add(Formula::kw(i.clone(), (**psi).clone()));
                }
                let pending: Vec<(Agent, Formula)> = self
                    .neg_kw
                    .iter()
                    .flat_map(|(i, v)| v.iter().map(move |b| (i.clone(), b.clone())))
                    .collect();
                for (i, psi1) in pending {
                    self.add(clause_seven(&i, &psi1, psi));
                }
            }
            Formula::Not(inner) => {
                if let Formula::Kw(i, psi1) = inner.as_ref() {
                    if !psi1.is_negation() {
                        self.neg_kw
                            .entry(i.clone())
                            .or_default()
                            .push((**psi1).clone());
                        for psi2 in self.cw_bodies.clone() {
                            self.add(clause_seven(i, psi1, &psi2));
                        }
                    }
                }
            }
            _ => {}
        }
    }
}

fn clause_seven(i: &Agent, psi1: &Formula, psi2: &Formula) -> Formula {
    Formula::kw(
        i.clone(),
        Formula::not(Formula::and(psi1.clone(), Formula::not(psi2.clone()))),
    )
}

/// The least set containing `f` and closed under the seven closure clauses,
/// computed by a worklist. Stops early once `cap` formulas are collected.
pub fn closure(f: &Formula, agents: &AgentSet, cap: usize) -> Closure {
    let mut b = Builder {
        agents,
        cap: cap.max(1),
        seen: HashSet::new(),
        order: Vec::new(),
        queue: VecDeque::new(),
        kw_bodies: HashMap::new(),
        neg_kw: HashMap::new(),
        cw_bodies: Vec::new(),
        truncated: false,
    };
    b.add(f.clone());
    while let Some(next) = b.queue.pop_front() {
        if b.truncated {
            break;
        }
        b.process(next);
    }
    Closure {
        formulas: b.order,
        truncated: b.truncated,
    }
}

/// Whether `set` is closed under clauses 2 to 7.
pub fn is_closed<'a, I>(set: I, agents: &AgentSet) -> bool
where
    I: IntoIterator<Item = &'a Formula>,
{
    let set: HashSet<&Formula> = set.into_iter().collect();
    let has = |g: &Formula| set.contains(g);
    let mut kw_bodies: Vec<(&Agent, &Formula)> = Vec::new();
    let mut neg_kw: Vec<(&Agent, &Formula)> = Vec::new();
    let mut cw_bodies: Vec<&Formula> = Vec::new();
    for f in &set {
        if !f.children().into_iter().all(has) {
            return false;
        }
        if !f.is_negation() && !has(&Formula::not((*f).clone())) {
            return false;
        }
        match f {
            Formula::Kw(i, psi) if !psi.is_conditional() => kw_bodies.push((i, psi)),
            Formula::Cw(psi) => {
                cw_bodies.push(psi);
                for i in agents {
                    if !has(&Formula::kw(i.clone(), (*f).clone()))
                        || !has(&Formula::kw(i.clone(), (**psi).clone()))
                    {
                        return false;
                    }
                }
            }
            Formula::Not(inner) => {
                if let Formula::Kw(i, psi1) = inner.as_ref() {
                    if !psi1.is_negation() {
                        neg_kw.push((i, psi1));
                    }
                }
            }
            _ => {}
        }
    }
    for (i, psi) in &kw_bodies {
        for (j, chi) in &kw_bodies {
            if i == j
                && !has(&Formula::kw(
                    (*i).clone(),
                    Formula::implies((*chi).clone(), (*psi).clone()),
                ))
            {
                return false;
            }
        }
    }
    for (i, psi1) in &neg_kw {
        for psi2 in &cw_bodies {
            if !has(&clause_seven(i, psi1, psi2)) {
                return false;
            }
        }
    }
    true
}
