//! Implication matrices among the seven `Cw` operators, computed by
//! countermodel search and compared with the known diagrams.

use std::fmt::Write;

use serde::Serialize;

use crate::decision::{SearchParams, SearchSpace, DEFAULT_EXHAUSTIVE_LIMIT, DEFAULT_SEED};
use crate::formula::{AgentSet, DerivedOp, Formula};
use crate::kripke::{fixtures, FrameClass, ModelFile, KripkeModel, PointedModel, WorldSet};
use crate::semantics::{ops, satisfies};

pub const OPS: [DerivedOp; 7] = DerivedOp::CW;
pub const DEFAULT_BOUND: usize = 6;
pub const DEFAULT_RANDOM_PER_SIZE: u64 = 7_000;

fn pos(op: DerivedOp) -> usize {
    OPS.iter().position(|&o| o == op).expect("a Cw operator")
}

/// `src p -> dst p`.
pub fn implication(src: DerivedOp, dst: DerivedOp) -> Formula {
    let p = Formula::atom("p");
    Formula::implies(Formula::derived(src, p.clone()), Formula::derived(dst, p))
}

/// Arrows of the diagrams, transitively closed, indexed like [`OPS`].
pub fn expected_matrix(class: FrameClass, agents: usize) -> [[bool; 7]; 7] {
    use DerivedOp::*;
    let mut m = [[false; 7]; 7];
    let mut arrow = |a: DerivedOp, b: DerivedOp| m[pos(a)][pos(b)] = true;
    let reflexive = matches!(class, FrameClass::T | FrameClass::S5);
    if reflexive {
        let strong = [Cw1, Cw21, Cw22, Cw31, Cw32, Cw5];
        for a in strong {
            for b in strong {
                arrow(a, b);
            }
            arrow(a, Cw4);
        }
    } else if agents == 1 {
        let groups: [&[DerivedOp]; 4] = [&[Cw1], &[Cw21, Cw22], &[Cw31, Cw32, Cw5], &[Cw4]];
        for g in groups {
            for &a in g {
                for &b in g {
                    arrow(a, b);
                }
            }
        }
        for b in OPS {
            arrow(Cw1, b);
        }
        for a in [Cw21, Cw22] {
            for b in [Cw31, Cw32, Cw5, Cw4] {
                arrow(a, b);
            }
        }
    } else {
        arrow(Cw1, Cw21);
        arrow(Cw21, Cw22);
        arrow(Cw21, Cw31);
        arrow(Cw22, Cw5);
        arrow(Cw22, Cw32);
        arrow(Cw22, Cw4);
    }
    for a in OPS {
        m[pos(a)][pos(a)] = true;
    }
    for k in 0..7 {
        for i in 0..7 {
            for j in 0..7 {
                if m[i][k] && m[k][j] {
                    m[i][j] = true;
                }
            }
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ValidUpToBound,
    Refuted,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub src: DerivedOp,
    pub dst: DerivedOp,
    pub status: Status,
    pub witness: Option<PointedModel>,
    /// `fixture:<name>` or `search`.
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixParams {
    pub bound: usize,
    pub random_per_size: u64,
    pub exhaustive_limit: u128,
    pub seed: u64,
}

impl Default for MatrixParams {
    fn default() -> Self {
        MatrixParams {
            bound: DEFAULT_BOUND,
            random_per_size: DEFAULT_RANDOM_PER_SIZE,
            exhaustive_limit: DEFAULT_EXHAUSTIVE_LIMIT,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Matrix {
    pub class: FrameClass,
    pub agents: usize,
    pub bound: usize,
    pub exhaustive_worlds: usize,
    pub examined: u64,
    /// Row-major over [`OPS`].
    pub cells: Vec<Verdict>,
}

/// One mismatch between computed and expected matrices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellDiff {
    pub src: String,
    pub dst: String,
    pub expected: bool,
    pub computed: bool,
}

fn extensions(m: &KripkeModel) -> [WorldSet; 7] {
    let p = m.atom("p");
    OPS.map(|op| ops::derived(m, op, &p).0)
}

/// First world of `m` where `src p` holds and `dst p` fails, per cell.
fn refutations(m: &KripkeModel) -> [[Option<usize>; 7]; 7] {
    let ext = extensions(m);
    let mut out = [[None; 7]; 7];
    for i in 0..7 {
        for j in 0..7 {
            if i != j {
                out[i][j] = ext[i].difference(&ext[j]).first();
            }
        }
    }
    out
}

pub fn implication_matrix(class: FrameClass, agents: usize, params: &MatrixParams) -> Matrix {
    let group = AgentSet::standard(agents);
    let mut found: Vec<Vec<Option<(PointedModel, String)>>> = vec![vec![None; 7]; 7];

    for fx in fixtures() {
        let fm = &fx.pointed.model;
        if fm.agents().len() > agents {
            continue;
        }
        let lifted = fm.with_agents(&group);
        if !lifted.in_class(class) {
            continue;
        }
        let hits = refutations(&lifted);
        let ext = extensions(&lifted);
        for i in 0..7 {
            for j in 0..7 {
                if found[i][j].is_none() && hits[i][j].is_some() {
                    // the designated point is preferred when it refutes the cell
                    let point = if ext[i].contains(fx.pointed.point) && !ext[j].contains(fx.pointed.point) {
                        fx.pointed.point
                    } else {
                        hits[i][j].expect("checked")
                    };
                    let pm = PointedModel::new(lifted.clone(), point).expect("point");
                    found[i][j] = Some((pm, format!("fixture:{}", fx.name)));
                }
            }
        }
    }

    let mut sp = SearchParams::new(class, group, vec!["p".into()], params.bound);
    sp.random_per_size = params.random_per_size;
    sp.exhaustive_limit = params.exhaustive_limit;
    sp.seed = params.seed;
    let space = SearchSpace::new(sp);
    let open: Vec<(usize, usize)> = (0..7)
        .flat_map(|i| (0..7).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && found[i][j].is_none())
        .collect();
    if !open.is_empty() {
        type Best = Vec<Option<(u64, usize)>>;
        let best: Best = space.sweep(
            || vec![None; 49],
            |acc: &mut Best, idx, m| {
                let hits = refutations(m);
                for &(i, j) in &open {
                    if acc[i * 7 + j].is_none() {
                        if let Some(w) = hits[i][j] {
                            acc[i * 7 + j] = Some((idx, w));
                        }
                    }
                }
            },
            |a, b| {
                a.into_iter()
                    .zip(b)
                    .map(|(x, y)| match (x, y) {
                        (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                        (x, y) => x.or(y),
                    })
                    .collect()
            },
        );
        for &(i, j) in &open {
            if let Some((idx, w)) = best[i * 7 + j] {
                let pm = PointedModel::new(space.candidate(idx), w).expect("point");
                found[i][j] = Some((pm, "search".into()));
            }
        }
    }

    let mut cells = Vec::with_capacity(49);
    for (i, row) in found.into_iter().enumerate() {
        for (j, hit) in row.into_iter().enumerate() {
            let (src, dst) = (OPS[i], OPS[j]);
            let verdict = match hit {
                Some((pm, source)) => {
                    let f = implication(src, dst);
                    assert!(
                        !satisfies(&pm, &f).expect("agents present"),
                        "witness for {src} -> {dst} does not refute it"
                    );
                    Verdict {
                        src,
                        dst,
                        status: Status::Refuted,
                        witness: Some(pm),
                        source: Some(source),
                    }
                }
                None => Verdict {
                    src,
                    dst,
                    status: Status::ValidUpToBound,
                    witness: None,
                    source: None,
                },
            };
            cells.push(verdict);
        }
    }
    Matrix {
        class,
        agents,
        bound: params.bound,
        exhaustive_worlds: space.exhaustive_worlds,
        examined: space.len(),
        cells,
    }
}

impl Matrix {
    pub fn cell(&self, src: DerivedOp, dst: DerivedOp) -> &Verdict {
        &self.cells[pos(src) * 7 + pos(dst)]
    }

    pub fn arrows(&self) -> [[bool; 7]; 7] {
        let mut m = [[false; 7]; 7];
        for (k, c) in self.cells.iter().enumerate() {
            m[k / 7][k % 7] = c.status == Status::ValidUpToBound;
        }
        m
    }

    pub fn diff(&self, expected: &[[bool; 7]; 7]) -> Vec<CellDiff> {
        let got = self.arrows();
        let mut out = Vec::new();
        for i in 0..7 {
            for j in 0..7 {
                if got[i][j] != expected[i][j] {
                    out.push(CellDiff {
                        src: OPS[i].to_string(),
                        dst: OPS[j].to_string(),
                        expected: expected[i][j],
                        computed: got[i][j],
                    });
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cells: Vec<serde_json::Value> = self
            .cells
            .iter()
            .map(|c| {
                let mut v = serde_json::json!({
                    "src": c.src.to_string(),
                    "dst": c.dst.to_string(),
                    "status": c.status,
                    "bound": self.bound,
                });
                if let Some(w) = &c.witness {
                    v["witness"] = serde_json::to_value(ModelFile::from_model(&w.model, Some(w.point)))
                        .expect("model serializes");
                    v["witness_source"] = serde_json::Value::from(c.source.clone());
                }
                v
            })
            .collect();
        serde_json::json!({
            "class": self.class.to_string(),
            "agents": self.agents,
            "bound": self.bound,
            "exhaustive_worlds": self.exhaustive_worlds,
            "examined": self.examined,
            "cells": cells,
        })
    }

    /// Arrow table: `=>` for valid up to bound, `.` for refuted.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>6}", "");
        for op in OPS {
            let _ = write!(out, "{:>6}", op.keyword());
        }
        out.push('\n');
        let arrows = self.arrows();
        for (i, row) in arrows.iter().enumerate() {
            let _ = write!(out, "{:>6}", OPS[i].keyword());
            for &a in row {
                let _ = write!(out, "{:>6}", if a { "=>" } else { "." });
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(m: &[[bool; 7]; 7]) -> usize {
        m.iter().flatten().filter(|&&b| b).count()
    }

    #[test]
    fn expected_matrices_are_transitive_and_reflexive() {
        for (class, agents) in [
            (FrameClass::K, 1),
            (FrameClass::K, 2),
            (FrameClass::KD45, 2),
            (FrameClass::T, 2),
            (FrameClass::S5, 2),
        ] {
            let m = expected_matrix(class, agents);
            for i in 0..7 {
                assert!(m[i][i]);
                for j in 0..7 {
                    for k in 0..7 {
                        assert!(!(m[i][j] && m[j][k]) || m[i][k]);
                    }
                }
            }
        }
    }

    #[test]
    fn expected_arrow_counts() {
        use DerivedOp::*;
        let k1 = expected_matrix(FrameClass::K, 1);
        assert!(k1[pos(Cw1)][pos(Cw4)]);
        assert!(!k1[pos(Cw31)][pos(Cw21)]);
        // within groups, then Cw1 down, then Cw2x down
        assert_eq!(count(&k1), (1 + 4 + 9 + 1) + 6 + 8);
        let k2 = expected_matrix(FrameClass::K, 2);
        assert!(k2[pos(Cw21)][pos(Cw31)]);
        assert!(!k2[pos(Cw31)][pos(Cw32)]);
        assert_eq!(count(&k2), 7 + 6 + 5 + 3);
        let s5 = expected_matrix(FrameClass::S5, 2);
        assert!(!s5[pos(Cw4)][pos(Cw1)]);
        assert_eq!(count(&s5), 36 + 6 + 1);
    }
}
