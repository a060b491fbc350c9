use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::formula::AgentSet;
use crate::kripke::{random_model, FrameClass, KripkeModel, ModelSpace, RandomParams};

/// Default ceiling on the number of models enumerated exhaustively.
pub const DEFAULT_EXHAUSTIVE_LIMIT: u128 = 1 << 22;
/// Default number of random samples per world count past the cutoff.
pub const DEFAULT_RANDOM_PER_SIZE: u64 = 5_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

const CHUNK: u64 = 2048;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    pub class: FrameClass,
    pub agents: AgentSet,
    pub atoms: Vec<String>,
    pub max_worlds: usize,
    pub exhaustive_limit: u128,
    pub random_per_size: u64,
    pub seed: u64,
}

impl SearchParams {
    pub fn new(class: FrameClass, agents: AgentSet, atoms: Vec<String>, max_worlds: usize) -> Self {
        SearchParams {
            class,
            agents,
            atoms,
            max_worlds: max_worlds.max(1),
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            random_per_size: DEFAULT_RANDOM_PER_SIZE,
            seed: DEFAULT_SEED,
        }
    }
}

/// The sequence of candidate models a search visits: every model with at
/// most `exhaustive_worlds` worlds in canonical order, then
/// `random_per_size` seeded samples for each larger world count up to the
/// bound, smaller counts first.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    params: SearchParams,
    spaces: Vec<ModelSpace>,
    offsets: Vec<u64>,
    exhaustive_total: u64,
    pub exhaustive_worlds: usize,
}

impl SearchSpace {
    pub fn new(params: SearchParams) -> Self {
        let mut spaces = Vec::new();
        let mut offsets = Vec::new();
        let mut total: u128 = 0;
        for n in 1..=params.max_worlds.min(8) {
            let space = ModelSpace::new(
                n,
                params.class,
                params.agents.clone(),
                params.atoms.clone(),
            );
            let next = total.saturating_add(space.len());
            if next > params.exhaustive_limit {
                break;
            }
            offsets.push(total as u64);
            total = next;
            spaces.push(space);
        }
        let exhaustive_worlds = spaces.len();
        SearchSpace {
            params,
            spaces,
            offsets,
            exhaustive_total: total as u64,
            exhaustive_worlds,
        }
    }

    pub fn params(&self) -> &SearchParams {
        &self.params
    }

    pub fn exhaustive_len(&self) -> u64 {
        self.exhaustive_total
    }

    pub fn random_len(&self) -> u64 {
        let sizes = self.params.max_worlds.saturating_sub(self.exhaustive_worlds) as u64;
        sizes * self.params.random_per_size
    }

    pub fn len(&self) -> u64 {
        self.exhaustive_total + self.random_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn candidate(&self, idx: u64) -> KripkeModel {
        if idx < self.exhaustive_total {
            let k = self.offsets.partition_point(|&o| o <= idx) - 1;
            return self.spaces[k].model((idx - self.offsets[k]) as u128);
        }
        let r = idx - self.exhaustive_total;
        let per = self.params.random_per_size.max(1);
        let worlds = self.exhaustive_worlds + 1 + (r / per) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
        rng.set_stream(r);
        let density = rng.gen_range(0.15..0.75);
        let params = RandomParams {
            worlds,
            agents: self.params.agents.clone(),
            density,
            atoms: self.params.atoms.clone(),
            class: self.params.class,
        };
        random_model(&params, rng.gen())
    }

    /// First candidate in search order for which `hit` returns a world,
    /// with its index. Chunks are scanned in parallel; the earliest hit wins.
    pub fn find_first<F>(&self, hit: F) -> Option<(u64, KripkeModel, usize)>
    where
        F: Fn(&KripkeModel) -> Option<usize> + Sync,
    {
        let len = self.len();
        let chunks = len.div_ceil(CHUNK);
        (0..chunks).into_par_iter().find_map_first(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(len)).find_map(|i| {
                let m = self.candidate(i);
                hit(&m).map(|w| (i, m, w))
            })
        })
    }

    /// Visits every candidate, folding per chunk and combining the chunk
    /// results in order.
    pub fn sweep<T, F, G>(&self, init: impl Fn() -> T + Sync + Send, visit: F, combine: G) -> T
    where
        T: Send,
        F: Fn(&mut T, u64, &KripkeModel) + Sync,
        G: Fn(T, T) -> T + Sync + Send,
    {
        let len = self.len();
        let chunks = len.div_ceil(CHUNK);
        let parts: Vec<T> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = init();
                for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                    let m = self.candidate(i);
                    visit(&mut acc, i, &m);
                }
                acc
            })
            .collect();
        parts.into_iter().fold(init(), combine)
    }
}
