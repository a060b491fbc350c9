use rand::seq::SliceRandom;
use rand::Rng;

use super::{AgentSet, DerivedOp, Formula};

/// A modal constructor the generator may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modality {
    K,
    Kw,
    E,
    C,
    Cw,
    Derived(DerivedOp),
}

impl Modality {
    /// Kw and the primitive Cw: the axiomatized language.
    pub const CW_LANGUAGE: &'static [Modality] = &[Modality::Kw, Modality::Cw];
    /// Kw and Cw5.
    pub const CW5_LANGUAGE: &'static [Modality] =
        &[Modality::Kw, Modality::Derived(DerivedOp::Cw5)];
    /// K and C.
    pub const C_LANGUAGE: &'static [Modality] = &[Modality::K, Modality::C];
}

/// Random formulas over fixed atoms and agents with bounded height.
#[derive(Debug, Clone)]
pub struct FormulaGen {
    pub atoms: Vec<String>,
    pub agents: AgentSet,
    pub modalities: Vec<Modality>,
    pub max_height: usize,
    /// Emit `Implies` nodes; otherwise only `Not` and `And`.
    pub implications: bool,
}

impl FormulaGen {
    pub fn new(atoms: &[&str], agents: AgentSet, modalities: &[Modality], max_height: usize) -> Self {
        FormulaGen {
            atoms: atoms.iter().map(|a| a.to_string()).collect(),
            agents,
            modalities: modalities.to_vec(),
            max_height,
            implications: true,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Formula {
        self.gen(rng, self.max_height)
    }

    fn atom<R: Rng + ?Sized>(&self, rng: &mut R) -> Formula {
        Formula::atom(self.atoms.choose(rng).expect("at least one atom").clone())
    }

    fn gen<R: Rng + ?Sized>(&self, rng: &mut R, height: usize) -> Formula {
        if height == 0 || rng.gen_bool(0.2) {
            return self.atom(rng);
        }
        let h = height - 1;
        let boolean = if self.implications { 3 } else { 2 };
        let choice = rng.gen_range(0..boolean + self.modalities.len());
        match choice {
            0 => Formula::not(self.gen(rng, h)),
            1 => Formula::and(self.gen(rng, h), self.gen(rng, h)),
            2 if self.implications => Formula::implies(self.gen(rng, h), self.gen(rng, h)),
            c => {
                let body = self.gen(rng, h);
                let mut agent = || {
                    self.agents
                        .as_slice()
                        .choose(&mut *rng)
                        .expect("nonempty agent set")
                        .clone()
                };
                match self.modalities[c - boolean] {
                    Modality::K => Formula::k(agent(), body),
                    Modality::Kw => Formula::kw(agent(), body),
                    Modality::E => Formula::e(body),
                    Modality::C => Formula::c(body),
                    Modality::Cw => Formula::cw(body),
                    Modality::Derived(op) => Formula::derived(op, body),
                }
            }
        }
    }
}
