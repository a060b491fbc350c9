use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use super::{valid_atom, KripkeModel, ModelError, WorldSet};
use crate::formula::{Agent, AgentSet};

/// A JSON object that rejects repeated keys.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct UniqueMap<V>(pub BTreeMap<String, V>);

impl<'de, V: Deserialize<'de>> Deserialize<'de> for UniqueMap<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V2<V>(PhantomData<V>);
        impl<'de, V: Deserialize<'de>> Visitor<'de> for V2<V> {
            type Value = UniqueMap<V>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = BTreeMap::new();
                while let Some(key) = map.next_key::<String>()? {
                    if out.contains_key(&key) {
                        return Err(serde::de::Error::custom(format!("duplicate key {key:?}")));
                    }
                    let value = map.next_value()?;
                    out.insert(key, value);
                }
                Ok(UniqueMap(out))
            }
        }
        d.deserialize_map(V2(PhantomData))
    }
}

/// On-disk form of a model. `root` is accepted as an alias of `point`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub agents: Vec<String>,
    pub worlds: Vec<String>,
    #[serde(default)]
    pub relations: UniqueMap<Vec<(String, String)>>,
    #[serde(default)]
    pub valuation: UniqueMap<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&escape(key)),
            Segment::Enum { variant } => out.push_str(&escape(variant)),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl ModelFile {
    pub fn from_model(m: &KripkeModel, point: Option<usize>) -> Self {
        let label = |w: usize| m.label(w).to_string();
        let relations = m
            .agents()
            .iter()
            .enumerate()
            .map(|(a, ag)| {
                let edges = m
                    .relation_pairs(a)
                    .into_iter()
                    .map(|(u, v)| (label(u), label(v)))
                    .collect();
                (ag.to_string(), edges)
            })
            .collect();
        let valuation = m
            .valuation()
            .iter()
            .map(|(p, s)| (p.clone(), s.iter().map(label).collect()))
            .collect();
        ModelFile {
            agents: m.agents().iter().map(|a| a.to_string()).collect(),
            worlds: m.labels().to_vec(),
            relations: UniqueMap(relations),
            valuation: UniqueMap(valuation),
            point: point.map(label),
            root: None,
        }
    }

    /// Validates references and builds the model with its optional point.
    pub fn into_model(self) -> Result<(KripkeModel, Option<usize>), ModelError> {
        let agents: Vec<Agent> = self
            .agents
            .iter()
            .enumerate()
            .map(|(k, a)| {
                Agent::new(a.as_str()).map_err(|e| ModelError::Schema {
                    pointer: format!("/agents/{k}"),
                    message: e.to_string(),
                })
            })
            .collect::<Result<_, _>>()?;
        let agents = AgentSet::new(agents).map_err(|e| ModelError::Schema {
            pointer: "/agents".into(),
            message: e.to_string(),
        })?;
        if self.worlds.is_empty() {
            return Err(ModelError::NoWorlds);
        }
        let n = self.worlds.len();
        let mut index = BTreeMap::new();
        for (k, w) in self.worlds.iter().enumerate() {
            if index.insert(w.as_str(), k).is_some() {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        let lookup = |label: &str, pointer: String| {
            index
                .get(label)
                .copied()
                .ok_or_else(|| ModelError::DanglingWorld {
                    pointer,
                    label: label.to_string(),
                })
        };
        let mut succ = vec![vec![WorldSet::empty(n); n]; agents.len()];
        for (name, edges) in &self.relations.0 {
            let base = format!("/relations/{}", escape(name));
            let a = Agent::new(name.as_str())
                .ok()
                .and_then(|ag| agents.index_of(&ag))
                .ok_or_else(|| ModelError::UndeclaredAgent {
                    pointer: base.clone(),
                    agent: name.clone(),
                })?;
            for (k, (u, v)) in edges.iter().enumerate() {
                let u = lookup(u, format!("{base}/{k}/0"))?;
                let v = lookup(v, format!("{base}/{k}/1"))?;
                succ[a][u].insert(v);
            }
        }
        let mut valuation = BTreeMap::new();
        for (atom, ws) in &self.valuation.0 {
            let base = format!("/valuation/{}", escape(atom));
            if !valid_atom(atom) {
                return Err(ModelError::InvalidAtom {
                    pointer: base,
                    atom: atom.clone(),
                });
            }
            let mut set = WorldSet::empty(n);
            for (k, w) in ws.iter().enumerate() {
                set.insert(lookup(w, format!("{base}/{k}"))?);
            }
            valuation.insert(atom.clone(), set);
        }
        let point = match (&self.point, &self.root) {
            (Some(p), _) => Some(lookup(p, "/point".into())?),
            (None, Some(r)) => Some(lookup(r, "/root".into())?),
            (None, None) => None,
        };
        let model = KripkeModel::from_successors(agents, self.worlds, succ, valuation)?;
        Ok((model, point))
    }
}

/// Parses model JSON, reporting schema errors with a JSON pointer.
pub fn model_from_json(text: &str) -> Result<(KripkeModel, Option<usize>), ModelError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ModelFile = serde_path_to_error::deserialize(de).map_err(|e| ModelError::Schema {
        pointer: pointer_of(e.path()),
        message: e.inner().to_string(),
    })?;
    file.into_model()
}

pub fn model_to_json(m: &KripkeModel, point: Option<usize>) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(m, point)).expect("model serializes")
}

pub fn load_model(path: impl AsRef<Path>) -> Result<(KripkeModel, Option<usize>), ModelError> {
    let text = std::fs::read_to_string(path)?;
    model_from_json(&text)
}

pub fn save_model(
    m: &KripkeModel,
    point: Option<usize>,
    path: impl AsRef<Path>,
) -> Result<(), ModelError> {
    std::fs::write(path, model_to_json(m, point) + "\n")?;
    Ok(())
}
