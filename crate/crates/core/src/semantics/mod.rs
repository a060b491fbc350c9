//! Truth conditions: extensions of formulas in finite models.

pub mod ops;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{Agent, Formula};
use crate::kripke::{KripkeModel, PointedModel, WorldSet};

pub use ops::EwVariant;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("agent {0} does not occur in the model")]
    UnknownAgent(Agent),
}

fn agent_index(m: &KripkeModel, a: &Agent) -> Result<usize, EvalError> {
    m.agent_index(a).ok_or_else(|| EvalError::UnknownAgent(a.clone()))
}

/// One evaluated subformula in an [`EvalTrace`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub formula: String,
    pub worlds: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

/// Extensions of every subformula, innermost first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalTrace {
    pub formula: String,
    pub model: String,
    pub subformulas: Vec<TraceEntry>,
}

struct Eval<'m> {
    m: &'m KripkeModel,
    trace: Option<Vec<TraceEntry>>,
}

impl Eval<'_> {
    fn record(&mut self, f: &Formula, s: &WorldSet, iterations: Option<usize>) {
        if let Some(t) = self.trace.as_mut() {
            let formula = f.to_string();
            if t.iter().any(|e| e.formula == formula) {
                return;
            }
            let mut worlds: Vec<String> = s.iter().map(|w| self.m.label(w).to_string()).collect();
            worlds.sort();
            t.push(TraceEntry {
                formula,
                worlds,
                iterations,
            });
        }
    }

    fn eval(&mut self, f: &Formula) -> Result<WorldSet, EvalError> {
        let m = self.m;
        let mut iterations = None;
        let s = match f {
            Formula::Atom(p) => m.atom(p),
            Formula::Not(a) => self.eval(a)?.complement(),
            Formula::And(a, b) => {
                let x = self.eval(a)?;
                x.intersection(&self.eval(b)?)
            }
            Formula::Implies(a, b) => {
                let x = self.eval(a)?;
                x.complement().union(&self.eval(b)?)
            }
            Formula::K(i, a) => {
                let idx = agent_index(m, i)?;
                ops::k(m, idx, &self.eval(a)?)
            }
            Formula::Kw(i, a) => {
                let idx = agent_index(m, i)?;
                ops::kw(m, idx, &self.eval(a)?)
            }
            Formula::E(a) => ops::e(m, &self.eval(a)?),
            Formula::C(a) => ops::c(m, &self.eval(a)?),
            Formula::Cw(a) => ops::cw_prim(m, &self.eval(a)?),
            Formula::Derived(op, a) => {
                let (s, k) = ops::derived(m, *op, &self.eval(a)?);
                iterations = k;
                s
            }
        };
        self.record(f, &s, iterations);
        Ok(s)
    }
}

/// The set of worlds of `m` where `f` holds.
pub fn extension(m: &KripkeModel, f: &Formula) -> Result<WorldSet, EvalError> {
    Eval { m, trace: None }.eval(f)
}

/// [`extension`] plus the extension of every subformula.
pub fn extension_traced(
    m: &KripkeModel,
    f: &Formula,
    model_id: &str,
) -> Result<(WorldSet, EvalTrace), EvalError> {
    let mut ev = Eval {
        m,
        trace: Some(Vec::new()),
    };
    let s = ev.eval(f)?;
    let trace = EvalTrace {
        formula: f.to_string(),
        model: model_id.to_string(),
        subformulas: ev.trace.unwrap_or_default(),
    };
    Ok((s, trace))
}

/// `Cw31 f` or `Cw32 f` by orbit intersection; also returns the orbit length.
pub fn eval_cw3(
    m: &KripkeModel,
    f: &Formula,
    variant: EwVariant,
) -> Result<(WorldSet, usize), EvalError> {
    let s = extension(m, f)?;
    Ok(ops::cw3(m, &s, variant))
}

/// `Cw5 f` by family closure; also returns the stabilization depth.
pub fn eval_cw5(m: &KripkeModel, f: &Formula) -> Result<(WorldSet, usize), EvalError> {
    let s = extension(m, f)?;
    Ok(ops::cw5(m, &s))
}

pub fn satisfies(pm: &PointedModel, f: &Formula) -> Result<bool, EvalError> {
    Ok(extension(&pm.model, f)?.contains(pm.point))
}

pub fn valid_on_model(m: &KripkeModel, f: &Formula) -> Result<bool, EvalError> {
    Ok(extension(m, f)?.is_full())
}

/// First pointed model of `class` with at most `max_worlds` worlds that
/// falsifies `f`, searched exhaustively over small sizes and then with
/// `budget` seeded random models per size.
pub fn find_countermodel(
    f: &Formula,
    class: crate::kripke::FrameClass,
    max_worlds: usize,
    budget: u64,
) -> Option<PointedModel> {
    let opts = crate::decision::SearchOptions {
        random_per_size: budget,
        ..Default::default()
    };
    crate::decision::valid_with(f, class, max_worlds.max(1), &opts)
        .countermodel()
        .cloned()
}
