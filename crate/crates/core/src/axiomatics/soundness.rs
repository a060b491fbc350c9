use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{AxiomError, AxiomSchema, Substitution, AGENT_METAVAR};
use crate::formula::{Agent, AgentSet, Formula, FormulaGen, Modality};
use crate::kripke::{model_to_json, random_model, FrameClass, KripkeModel, RandomParams};
use crate::semantics::extension;

/// Knobs for sampled validity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleParams {
    pub class: FrameClass,
    pub n_models: usize,
    pub seed: u64,
    /// Models have between 1 and this many worlds.
    pub max_worlds: usize,
    /// Models have between 1 and this many agents.
    pub max_agents: usize,
    /// Random substitutions tried per schema and model.
    pub instances_per_model: usize,
    /// Height bound of substituted formulas.
    pub max_height: usize,
}

impl SampleParams {
    pub fn new(n_models: usize, seed: u64) -> Self {
        SampleParams {
            class: FrameClass::S5,
            n_models,
            seed,
            max_worlds: 6,
            max_agents: 2,
            instances_per_model: 4,
            max_height: 2,
        }
    }

    fn model(&self, k: usize, base: &AgentSet, atoms: &[String]) -> KripkeModel {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        let worlds = rng.gen_range(1..=self.max_worlds.max(1));
        let extra = rng.gen_range(1..=self.max_agents.max(1));
        let mut names: Vec<Agent> = base.iter().cloned().collect();
        for a in AgentSet::standard(extra + names.len()).iter() {
            if names.len() >= extra.max(base.len()) {
                break;
            }
            if !names.contains(a) {
                names.push(a.clone());
            }
        }
        let agents = AgentSet::new(names).expect("nonempty and duplicate free");
        let params = RandomParams::new(worlds, agents, self.class)
            .with_atoms(atoms)
            .with_density(rng.gen_range(0.15..0.75));
        random_model(&params, rng.gen())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub target: String,
    pub instance: String,
    pub world: String,
    pub model: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetReport {
    pub name: String,
    pub models: usize,
    pub instances: usize,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub class: String,
    pub models: usize,
    pub targets: Vec<TargetReport>,
}

impl SoundnessReport {
    pub fn violation_count(&self) -> usize {
        self.targets.iter().map(|t| t.violations.len()).sum()
    }

    pub fn is_clean(&self) -> bool {
        self.violation_count() == 0
    }
}

fn check(m: &KripkeModel, target: &str, f: &Formula) -> Option<Violation> {
    let ext = extension(m, f).expect("instances only use model agents");
    let w = ext.complement().first()?;
    Some(Violation {
        target: target.to_string(),
        instance: f.to_string(),
        world: m.label(w).to_string(),
        model: serde_json::from_str(&model_to_json(m, Some(w))).expect("model json"),
    })
}

fn random_instance<R: Rng>(schema: &AxiomSchema, m: &KripkeModel, height: usize, rng: &mut R) -> Formula {
    let gen = FormulaGen::new(&["p", "q"], m.agents().clone(), Modality::CW_LANGUAGE, height);
    let mut s = Substitution::new();
    if schema.is_taut() {
        let (a, b) = (gen.sample(rng), gen.sample(rng));
        let t = if rng.gen_bool(0.5) {
            Formula::implies(a.clone(), Formula::implies(b, a))
        } else {
            Formula::implies(Formula::and(a.clone(), b), a)
        };
        s = s.with("phi", t);
    } else {
        for v in schema.metavars() {
            if v == AGENT_METAVAR {
                let i = rng.gen_range(0..m.agents().len());
                s = s.with_agent(m.agents().get(i).expect("index in range").clone());
            } else {
                s = s.with(&v, gen.sample(rng));
            }
        }
    }
    schema
        .instantiate(&s, m.agents())
        .expect("every metavariable bound")
}

/// Instantiates each schema with random formulas on `n_models` random S5
/// models and reports instances false somewhere.
pub fn soundness_sample(schemas: &[AxiomSchema], n_models: usize, seed: u64) -> SoundnessReport {
    soundness_sample_in(schemas, &SampleParams::new(n_models, seed))
}

pub fn soundness_sample_in(schemas: &[AxiomSchema], params: &SampleParams) -> SoundnessReport {
    let atoms = vec!["p".to_string(), "q".to_string()];
    let none = AgentSet::standard(1);
    let per_model: Vec<Vec<(usize, Vec<Violation>)>> = (0..params.n_models)
        .into_par_iter()
        .map(|k| {
            let m = params.model(k, &none, &atoms);
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x9e37_79b9);
            rng.set_stream(k as u64);
            schemas
                .iter()
                .map(|schema| {
                    let mut found = Vec::new();
                    for _ in 0..params.instances_per_model {
                        let f = random_instance(schema, &m, params.max_height, &mut rng);
                        found.extend(check(&m, schema.name(), &f));
                    }
                    (params.instances_per_model, found)
                })
                .collect()
        })
        .collect();
    let targets = schemas
        .iter()
        .enumerate()
        .map(|(s, schema)| {
            let mut report = TargetReport {
                name: schema.name().to_string(),
                models: params.n_models,
                instances: 0,
                violations: Vec::new(),
            };
            for row in &per_model {
                report.instances += row[s].0;
                report.violations.extend(row[s].1.iter().cloned());
            }
            report
        })
        .collect();
    SoundnessReport {
        class: params.class.to_string(),
        models: params.n_models,
        targets,
    }
}

/// Checks one fixed formula on random models whose agents include the
/// formula's own.
pub fn target_sample(name: &str, f: &Formula, params: &SampleParams) -> TargetReport {
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    let own = f.agents();
    let base = if own.is_empty() {
        AgentSet::standard(1)
    } else {
        AgentSet::new(own).expect("formula agents are distinct")
    };
    let violations: Vec<Violation> = (0..params.n_models)
        .into_par_iter()
        .filter_map(|k| check(&params.model(k, &base, &atoms), name, f))
        .collect();
    TargetReport {
        name: name.to_string(),
        models: params.n_models,
        instances: params.n_models,
        violations,
    }
}

/// The two n-ary Kw schemas at fresh atoms `q1..qn`, `r`:
/// `Kw(⋀q → ¬r) ∧ ⋀Kw q_k ∧ ⋀Kw(r → q_k) → Kw r` and
/// `Kw(⋀q → r) ∧ ⋀Kw q_k ∧ ⋀Kw(¬r → q_k) → Kw r`.
pub fn nary_kw_schemas(n: usize, agent: &Agent) -> Result<(Formula, Formula), AxiomError> {
    if n < 2 {
        return Err(AxiomError::Arity(n));
    }
    let qs: Vec<Formula> = (1..=n).map(|k| Formula::atom(format!("q{k}"))).collect();
    let r = Formula::atom("r");
    let kw = |f: Formula| Formula::kw(agent.clone(), f);
    let big = Formula::conjunction(qs.iter().cloned()).expect("n >= 2");
    let build = |head: Formula, guard: Formula| {
        let mut parts = vec![kw(head)];
        parts.extend(qs.iter().map(|q| kw(q.clone())));
        parts.extend(qs.iter().map(|q| kw(Formula::implies(guard.clone(), q.clone()))));
        Formula::implies(
            Formula::conjunction(parts).expect("nonempty"),
            kw(r.clone()),
        )
    };
    Ok((
        build(Formula::implies(big.clone(), Formula::not(r.clone())), r.clone()),
        build(Formula::implies(big, r.clone()), Formula::not(r.clone())),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_unchecked;

    #[test]
    fn nary_shapes() {
        let a = Agent::new("a").unwrap();
        let (one, two) = nary_kw_schemas(2, &a).unwrap();
        assert_eq!(
            one,
            parse_unchecked(
                "(Kw[a]((q1&q2)->~r) & Kw[a]q1 & Kw[a]q2 & Kw[a](r->q1) & Kw[a](r->q2)) -> Kw[a]r"
            )
            .unwrap()
        );
        assert_eq!(
            two,
            parse_unchecked(
                "(Kw[a]((q1&q2)->r) & Kw[a]q1 & Kw[a]q2 & Kw[a](~r->q1) & Kw[a](~r->q2)) -> Kw[a]r"
            )
            .unwrap()
        );
        assert!(nary_kw_schemas(1, &a).is_err());
    }

    #[test]
    fn small_sample_is_clean_and_deterministic() {
        let schemas = AxiomSchema::all();
        let a = soundness_sample(&schemas, 20, 7);
        assert!(a.is_clean(), "{:?}", a.targets);
        assert_eq!(a, soundness_sample(&schemas, 20, 7));
        assert!(a.targets.iter().all(|t| t.instances == 80));
    }

    #[test]
    fn corrupted_schema_is_caught_on_k() {
        let bad = AxiomSchema::custom("Cw-T-weak", "Cw phi -> phi").unwrap();
        let mut params = SampleParams::new(200, 1);
        params.class = FrameClass::K;
        let r = soundness_sample_in(&[bad], &params);
        assert!(!r.is_clean());
    }
}
