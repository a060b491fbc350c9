//! The CL-game: a model comparison game with one-step K-moves and
//! reflexive-transitive C-moves, solved by backward induction.

mod families;

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::kripke::{KripkeModel, PointedModel, WorldSet};

pub use families::{build_m, build_n, verify_separation, SeparationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("the CL-game is played over one relation; model has {0} agents")]
    MultiAgent(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Duplicator,
    Spoiler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MoveKind {
    K,
    C,
}

#[derive(Debug, Clone)]
pub struct GamePosition {
    pub left: PointedModel,
    pub right: PointedModel,
    pub rounds_left: usize,
}

impl GamePosition {
    pub fn new(left: PointedModel, right: PointedModel, rounds_left: usize) -> Self {
        GamePosition {
            left,
            right,
            rounds_left,
        }
    }
}

/// Winning tables for every pair of worlds, one per number of rounds.
#[derive(Debug, Clone)]
pub struct ClGame<'a> {
    left: &'a KripkeModel,
    right: &'a KripkeModel,
    /// `wins[k][x * |right| + y]`: duplicator wins k rounds from `(x, y)`.
    wins: Vec<Vec<bool>>,
}

fn single_agent(m: &KripkeModel) -> Result<(), GameError> {
    match m.agents().len() {
        1 => Ok(()),
        k => Err(GameError::MultiAgent(k)),
    }
}

fn atoms(m: &KripkeModel, w: usize) -> BTreeSet<&str> {
    m.atoms_at(w).into_iter().collect()
}

impl<'a> ClGame<'a> {
    pub fn new(left: &'a KripkeModel, right: &'a KripkeModel) -> Result<Self, GameError> {
        single_agent(left)?;
        single_agent(right)?;
        let (nl, nr) = (left.num_worlds(), right.num_worlds());
        let mut base = vec![false; nl * nr];
        for x in 0..nl {
            let ax = atoms(left, x);
            for y in 0..nr {
                base[x * nr + y] = ax == atoms(right, y);
            }
        }
        Ok(ClGame {
            left,
            right,
            wins: vec![base],
        })
    }

    fn targets(m: &KripkeModel, kind: MoveKind, w: usize) -> &WorldSet {
        match kind {
            MoveKind::K => m.successors(0, w),
            MoveKind::C => m.reachable(w),
        }
    }

    fn idx(&self, x: usize, y: usize) -> usize {
        x * self.right.num_worlds() + y
    }

    /// Fills the tables up to `rounds`.
    pub fn solve_to(&mut self, rounds: usize) {
        while self.wins.len() <= rounds {
            let prev = self.wins.last().expect("round 0 table");
            let (nl, nr) = (self.left.num_worlds(), self.right.num_worlds());
            let mut next = vec![false; nl * nr];
            for x in 0..nl {
                for y in 0..nr {
                    let i = x * nr + y;
                    next[i] = self.wins[0][i] && self.answers_all(prev, x, y);
                }
            }
            self.wins.push(next);
        }
    }

    fn answers_all(&self, prev: &[bool], x: usize, y: usize) -> bool {
        let nr = self.right.num_worlds();
        [MoveKind::K, MoveKind::C].into_iter().all(|kind| {
            let (tx, ty) = (
                Self::targets(self.left, kind, x),
                Self::targets(self.right, kind, y),
            );
            tx.iter().all(|x2| ty.iter().any(|y2| prev[x2 * nr + y2]))
                && ty.iter().all(|y2| tx.iter().any(|x2| prev[x2 * nr + y2]))
        })
    }

    pub fn winner(&mut self, x: usize, y: usize, rounds: usize) -> Winner {
        self.solve_to(rounds);
        if self.wins[rounds][self.idx(x, y)] {
            Winner::Duplicator
        } else {
            Winner::Spoiler
        }
    }

    /// Smallest number of rounds, up to `max_rounds`, in which spoiler wins
    /// from `(x, y)`.
    pub fn least_spoiler_win(&mut self, x: usize, y: usize, max_rounds: usize) -> Option<usize> {
        (0..=max_rounds).find(|&k| self.winner(x, y, k) == Winner::Spoiler)
    }

    /// Duplicator's winning answers from `(x, y)` with `rounds` left, for
    /// every position reachable when duplicator follows them. Empty if
    /// spoiler wins.
    pub fn strategy(&mut self, x: usize, y: usize, rounds: usize) -> Vec<StrategyEntry> {
        self.solve_to(rounds);
        let mut out = Vec::new();
        if !self.wins[rounds][self.idx(x, y)] {
            return out;
        }
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([(x, y, rounds)]);
        while let Some((x, y, k)) = queue.pop_front() {
            if k == 0 || !seen.insert((x, y, k)) {
                continue;
            }
            let prev = &self.wins[k - 1];
            let nr = self.right.num_worlds();
            for kind in [MoveKind::K, MoveKind::C] {
                let (tx, ty) = (
                    Self::targets(self.left, kind, x),
                    Self::targets(self.right, kind, y),
                );
                for (side, from, to) in [(Side::Left, tx, ty), (Side::Right, ty, tx)] {
                    for s in from.iter() {
                        let reply = to
                            .iter()
                            .find(|&d| match side {
                                Side::Left => prev[s * nr + d],
                                Side::Right => prev[d * nr + s],
                            })
                            .expect("winning positions have answers");
                        let (nx, ny) = match side {
                            Side::Left => (s, reply),
                            Side::Right => (reply, s),
                        };
                        out.push(StrategyEntry {
                            rounds_left: k,
                            position: (self.left.label(x).into(), self.right.label(y).into()),
                            side,
                            kind,
                            spoiler_to: match side {
                                Side::Left => self.left.label(s).into(),
                                Side::Right => self.right.label(s).into(),
                            },
                            duplicator_to: match side {
                                Side::Left => self.right.label(reply).into(),
                                Side::Right => self.left.label(reply).into(),
                            },
                        });
                        queue.push_back((nx, ny, k - 1));
                    }
                }
            }
        }
        out
    }
}

/// One line of a strategy dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyEntry {
    pub rounds_left: usize,
    pub position: (String, String),
    pub side: Side,
    pub kind: MoveKind,
    pub spoiler_to: String,
    pub duplicator_to: String,
}

pub fn solve_cl_game(pos: &GamePosition) -> Result<Winner, GameError> {
    let mut g = ClGame::new(&pos.left.model, &pos.right.model)?;
    Ok(g.winner(pos.left.point, pos.right.point, pos.rounds_left))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_unchecked;
    use crate::kripke::fixture;
    use crate::semantics::satisfies;

    #[test]
    fn identical_models_duplicator() {
        let pm = build_n(1);
        for k in 0..5 {
            let pos = GamePosition::new(pm.clone(), pm.clone(), k);
            assert_eq!(solve_cl_game(&pos).unwrap(), Winner::Duplicator);
        }
    }

    #[test]
    fn duplicator_survives_n_rounds_for_small_n() {
        for n in 1..=2 {
            let pos = GamePosition::new(build_m(n), build_n(n), n);
            assert_eq!(solve_cl_game(&pos).unwrap(), Winner::Duplicator, "n={n}");
        }
    }

    #[test]
    fn three_rounds_always_suffice_for_spoiler() {
        // K to z0, K to z01, then C to the non-p leaf below t00: the z01
        // subtree has none. The same play read as a formula is ◇◇C p.
        let f = parse_unchecked("~K[i]~~K[i]~C p").unwrap();
        for n in 1..=4 {
            let (m, nn) = (build_m(n), build_n(n));
            assert!(!satisfies(&m, &f).unwrap() && satisfies(&nn, &f).unwrap());
            let mut g = ClGame::new(&m.model, &nn.model).unwrap();
            let least = g.least_spoiler_win(0, 0, 6).unwrap();
            assert_eq!(least, if n == 1 { 2 } else { 3 }, "n={n}");
        }
    }

    #[test]
    fn spoiler_eventually_wins_and_stays_winning() {
        let (m, n) = (build_m(1), build_n(1));
        let mut g = ClGame::new(&m.model, &n.model).unwrap();
        let k = g.least_spoiler_win(0, 0, 10).unwrap();
        assert!(k > 1);
        for j in k..k + 4 {
            assert_eq!(g.winner(0, 0, j), Winner::Spoiler);
        }
    }

    #[test]
    fn atoms_must_agree_at_start() {
        let (a, b) = (fixture("see-p").unwrap(), fixture("see-notp").unwrap());
        let mut g = ClGame::new(&a.model, &b.model).unwrap();
        let t = a.model.world("t").unwrap();
        assert_eq!(g.winner(t, b.model.world("t").unwrap(), 0), Winner::Spoiler);
        assert_eq!(g.winner(a.point, b.point, 0), Winner::Duplicator);
        assert_eq!(g.winner(a.point, b.point, 1), Winner::Spoiler);
    }

    #[test]
    fn strategy_answers_every_spoiler_move() {
        let (m, n) = (build_m(1), build_n(1));
        let mut g = ClGame::new(&m.model, &n.model).unwrap();
        let s = g.strategy(0, 0, 1);
        let first: Vec<_> = s.iter().filter(|e| e.rounds_left == 1).collect();
        // K: t0 on the left, t0 and z0 on the right; C: 5 left and 8 right targets.
        assert_eq!(first.len(), 1 + 2 + 5 + 8);
        let z0 = first
            .iter()
            .find(|e| e.kind == MoveKind::K && e.spoiler_to == "z0")
            .unwrap();
        assert_eq!(z0.duplicator_to, "t0");
        assert!(g.strategy(0, 0, 10).is_empty());
    }

    #[test]
    fn multi_agent_models_are_rejected() {
        let pm = fixture("ew1-vs-ew2").unwrap();
        let pos = GamePosition::new(pm.clone(), pm, 1);
        assert_eq!(solve_cl_game(&pos), Err(GameError::MultiAgent(2)));
    }
}
