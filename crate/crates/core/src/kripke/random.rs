use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FrameClass, KripkeModel, WorldSet};
use crate::formula::AgentSet;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomParams {
    pub worlds: usize,
    pub agents: AgentSet,
    /// Edge probability for K and T; ignored by the partition-based classes.
    pub density: f64,
    pub atoms: Vec<String>,
    pub class: FrameClass,
}

impl RandomParams {
    pub fn new(worlds: usize, agents: AgentSet, class: FrameClass) -> Self {
        RandomParams {
            worlds,
            agents,
            density: 0.4,
            atoms: vec!["p".to_string()],
            class,
        }
    }

    pub fn with_atoms<S: AsRef<str>>(mut self, atoms: &[S]) -> Self {
        self.atoms = atoms.iter().map(|a| a.as_ref().to_string()).collect();
        self
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }
}

/// A random model drawn from `params`; a pure function of `seed`.
pub fn random_model(params: &RandomParams, seed: u64) -> KripkeModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_model_with(params, &mut rng)
}

pub(crate) fn random_model_with<R: Rng>(params: &RandomParams, rng: &mut R) -> KripkeModel {
    let n = params.worlds.max(1);
    let succ = params
        .agents
        .iter()
        .map(|_| random_relation(n, params.class, params.density, rng))
        .collect();
    let valuation: BTreeMap<String, WorldSet> = params
        .atoms
        .iter()
        .map(|p| {
            let set = WorldSet::from_worlds(n, (0..n).filter(|_| rng.gen_bool(0.5)));
            (p.clone(), set)
        })
        .collect();
    let labels = (0..n).map(|i| format!("w{i}")).collect();
    KripkeModel::from_successors(params.agents.clone(), labels, succ, valuation)
        .expect("generated models are well formed")
}

fn random_blocks<R: Rng>(n: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for w in 0..n {
        blocks[rng.gen_range(0..n)].push(w);
    }
    blocks.retain(|b| !b.is_empty());
    blocks
}

fn random_relation<R: Rng>(n: usize, class: FrameClass, density: f64, rng: &mut R) -> Vec<WorldSet> {
    let density = density.clamp(0.0, 1.0);
    match class {
        FrameClass::K | FrameClass::T => (0..n)
            .map(|u| {
                let mut row = WorldSet::from_worlds(n, (0..n).filter(|_| rng.gen_bool(density)));
                if class == FrameClass::T {
                    row.insert(u);
                }
                row
            })
            .collect(),
        FrameClass::S5 => {
            let mut rows = vec![WorldSet::empty(n); n];
            for block in random_blocks(n, rng) {
                let set = WorldSet::from_worlds(n, block.iter().copied());
                for &w in &block {
                    rows[w] = set.clone();
                }
            }
            rows
        }
        FrameClass::KD45 => {
            // each group of worlds points at a nonempty cluster inside the group
            let mut rows = vec![WorldSet::empty(n); n];
            for mut group in random_blocks(n, rng) {
                group.shuffle(rng);
                let size = rng.gen_range(1..=group.len());
                let cluster = WorldSet::from_worlds(n, group[..size].iter().copied());
                for &w in &group {
                    rows[w] = cluster.clone();
                }
            }
            rows
        }
    }
}
