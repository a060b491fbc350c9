use std::collections::BTreeMap;

use thiserror::Error;

use super::{KripkeModel, PointedModel};
use crate::formula::AgentSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no fixture named {0:?}")]
pub struct FixtureError(pub String);

/// A named pointed model from the countermodel catalog.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub pointed: PointedModel,
}

fn build(
    agents: &[&str],
    worlds: &[&str],
    edges: &[(&str, &str, &str)],
    p: &[&str],
    point: &str,
) -> PointedModel {
    let g = AgentSet::from_names(agents).expect("fixture agents are valid");
    let idx = |l: &str| worlds.iter().position(|w| *w == l).expect("fixture world");
    let mut per_agent = vec![Vec::new(); agents.len()];
    for (a, u, v) in edges {
        let ai = agents.iter().position(|x| x == a).expect("fixture agent");
        per_agent[ai].push((idx(u), idx(v)));
    }
    let mut val = BTreeMap::new();
    val.insert("p".to_string(), p.iter().map(|w| idx(w)).collect());
    let m = KripkeModel::from_edges(
        g,
        worlds.iter().map(|w| w.to_string()).collect(),
        &per_agent,
        val,
    )
    .expect("fixture models are well formed");
    PointedModel::new(m, idx(point)).expect("fixture point exists")
}

/// The countermodel catalog. Every entry has `p` as its only atom.
pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "cw2-not-cw1",
            summary: "s sees only the p-world t; s itself is not p",
            pointed: build(&["i"], &["s", "t"], &[("i", "s", "t")], &["t"], "s"),
        },
        Fixture {
            name: "cw3-not-cw2",
            summary: "s sees t, t sees itself and s; p only at s",
            pointed: build(
                &["i"],
                &["s", "t"],
                &[("i", "s", "t"), ("i", "t", "t"), ("i", "t", "s")],
                &["s"],
                "s",
            ),
        },
        Fixture {
            name: "cw4-not-cw3",
            summary: "the universal relation on two worlds; p only at s",
            pointed: build(
                &["i"],
                &["s", "t"],
                &[
                    ("i", "s", "s"),
                    ("i", "s", "t"),
                    ("i", "t", "s"),
                    ("i", "t", "t"),
                ],
                &["s"],
                "s",
            ),
        },
        Fixture {
            name: "ew1-vs-ew2",
            summary: "i sees s from s, j sees t from s; p only at s",
            pointed: build(
                &["i", "j"],
                &["s", "t"],
                &[("i", "s", "s"), ("j", "s", "t")],
                &["s"],
                "s",
            ),
        },
        Fixture {
            name: "cw31-not-cw32",
            summary: "five worlds; i branches below s and t1, j links t2 to t3; p fails only at t4",
            pointed: build(
                &["i", "j"],
                &["s", "t1", "t2", "t3", "t4"],
                &[
                    ("i", "s", "t1"),
                    ("i", "s", "t2"),
                    ("i", "t1", "t3"),
                    ("i", "t1", "t4"),
                    ("i", "t2", "t4"),
                    ("j", "t2", "t3"),
                ],
                &["s", "t1", "t2", "t3"],
                "s",
            ),
        },
        Fixture {
            name: "cw32-not-cw5",
            summary: "five worlds s,t,u,v,w; p fails only at w",
            pointed: build(
                &["i", "j"],
                &["s", "t", "u", "v", "w"],
                &[
                    ("i", "s", "t"),
                    ("i", "s", "u"),
                    ("i", "t", "v"),
                    ("i", "u", "w"),
                    ("i", "u", "v"),
                    ("j", "t", "v"),
                    ("j", "t", "w"),
                    ("j", "u", "w"),
                ],
                &["s", "t", "u", "v"],
                "s",
            ),
        },
        Fixture {
            name: "cw5-not-cw32",
            summary: "eleven-world tree of depth four; p fails at v2 and v4",
            pointed: build(
                &["i", "j"],
                &["s", "t1", "t2", "u1", "u2", "u3", "u4", "v1", "v2", "v3", "v4"],
                &[
                    ("i", "s", "t1"),
                    ("i", "s", "t2"),
                    ("i", "t1", "u1"),
                    ("i", "t1", "u2"),
                    ("i", "t2", "u3"),
                    ("i", "t2", "u4"),
                    ("i", "u1", "v1"),
                    ("i", "u1", "v2"),
                    ("i", "u4", "v3"),
                    ("i", "u4", "v4"),
                    ("j", "u2", "v1"),
                    ("j", "u2", "v2"),
                    ("j", "u4", "v3"),
                    ("j", "u4", "v4"),
                ],
                &["s", "t1", "t2", "u1", "u2", "u3", "u4", "v1", "v3"],
                "s",
            ),
        },
        Fixture {
            name: "kd45-cw31-not-cw32",
            summary: "KD45 frame where the Ew1 orbit holds at s but the Ew2 orbit does not",
            pointed: build(
                &["i", "j"],
                &["s", "t1", "t2", "t3", "t4", "t5"],
                &[
                    ("i", "s", "t5"),
                    ("i", "t1", "t1"),
                    ("i", "t2", "t2"),
                    ("i", "t2", "t4"),
                    ("i", "t3", "t1"),
                    ("i", "t4", "t2"),
                    ("i", "t4", "t4"),
                    ("i", "t5", "t5"),
                    ("j", "s", "t3"),
                    ("j", "s", "t4"),
                    ("j", "t1", "t1"),
                    ("j", "t1", "t5"),
                    ("j", "t2", "t2"),
                    ("j", "t3", "t3"),
                    ("j", "t3", "t4"),
                    ("j", "t4", "t3"),
                    ("j", "t4", "t4"),
                    ("j", "t5", "t1"),
                    ("j", "t5", "t5"),
                ],
                &["t1", "t2"],
                "s",
            ),
        },
        Fixture {
            name: "kd45-cw31-not-cw5",
            summary: "KD45 frame where the Ew1 orbit holds at s but some Kw sequence fails",
            pointed: build(
                &["i", "j"],
                &["s", "t1", "t2", "t3", "t4", "t5"],
                &[
                    ("i", "t1", "t1"),
                    ("i", "t1", "t3"),
                    ("i", "t2", "t2"),
                    ("i", "s", "t2"),
                    ("i", "t3", "t1"),
                    ("i", "t3", "t3"),
                    ("i", "t4", "t4"),
                    ("i", "t4", "t5"),
                    ("i", "t5", "t4"),
                    ("i", "t5", "t5"),
                    ("j", "t1", "t1"),
                    ("j", "t1", "t5"),
                    ("j", "t2", "t2"),
                    ("j", "t2", "t4"),
                    ("j", "s", "t1"),
                    ("j", "s", "t5"),
                    ("j", "t3", "t3"),
                    ("j", "t4", "t2"),
                    ("j", "t4", "t4"),
                    ("j", "t5", "t1"),
                    ("j", "t5", "t5"),
                ],
                &["t3", "t4"],
                "s",
            ),
        },
        Fixture {
            name: "kd45-cw32-not-cw5",
            summary: "KD45 frame where the Ew2 orbit holds at s but some Kw sequence fails",
            pointed: build(
                &["i", "j"],
                &["s", "t1", "t2", "t3", "t4", "t5"],
                &[
                    ("i", "t1", "t1"),
                    ("i", "t1", "t2"),
                    ("i", "t2", "t1"),
                    ("i", "t2", "t2"),
                    ("i", "s", "s"),
                    ("i", "t3", "t3"),
                    ("i", "t3", "t5"),
                    ("i", "t4", "t4"),
                    ("i", "t5", "t3"),
                    ("i", "t5", "t5"),
                    ("j", "t1", "t1"),
                    ("j", "t1", "t4"),
                    ("j", "t2", "t2"),
                    ("j", "t2", "t5"),
                    ("j", "s", "t2"),
                    ("j", "s", "t5"),
                    ("j", "t3", "t3"),
                    ("j", "t4", "t1"),
                    ("j", "t4", "t4"),
                    ("j", "t5", "t2"),
                    ("j", "t5", "t5"),
                ],
                &["t2", "t4", "t5"],
                "s",
            ),
        },
        Fixture {
            name: "kd45-cw5-not-cw32",
            summary: "KD45 frame where every Kw sequence holds at s but the Ew2 orbit does not",
            pointed: build(
                &["i", "j"],
                &["s", "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9"],
                &[
                    ("i", "s", "t1"),
                    ("i", "s", "t2"),
                    ("i", "t1", "t1"),
                    ("i", "t1", "t2"),
                    ("i", "t2", "t1"),
                    ("i", "t2", "t2"),
                    ("i", "t3", "t6"),
                    ("i", "t3", "t7"),
                    ("i", "t6", "t6"),
                    ("i", "t6", "t7"),
                    ("i", "t7", "t6"),
                    ("i", "t7", "t7"),
                    ("i", "t4", "t4"),
                    ("i", "t4", "t8"),
                    ("i", "t8", "t4"),
                    ("i", "t8", "t8"),
                    ("i", "t5", "t5"),
                    ("i", "t5", "t9"),
                    ("i", "t9", "t5"),
                    ("i", "t9", "t9"),
                    ("j", "s", "s"),
                    ("j", "t1", "t1"),
                    ("j", "t1", "t3"),
                    ("j", "t3", "t1"),
                    ("j", "t3", "t3"),
                    ("j", "t2", "t4"),
                    ("j", "t2", "t5"),
                    ("j", "t4", "t4"),
                    ("j", "t4", "t5"),
                    ("j", "t5", "t4"),
                    ("j", "t5", "t5"),
                    ("j", "t6", "t6"),
                    ("j", "t7", "t7"),
                    ("j", "t8", "t8"),
                    ("j", "t9", "t9"),
                ],
                &["s", "t1", "t2", "t4", "t6", "t8", "t9"],
                "s",
            ),
        },
        Fixture {
            name: "see-p",
            summary: "s sees a single p-world",
            pointed: build(&["i"], &["s", "t"], &[("i", "s", "t")], &["s", "t"], "s"),
        },
        Fixture {
            name: "see-notp",
            summary: "s sees a single non-p world",
            pointed: build(&["i"], &["s", "t"], &[("i", "s", "t")], &["s"], "s"),
        },
    ]
}

pub fn fixture_names() -> Vec<&'static str> {
    fixtures().into_iter().map(|f| f.name).collect()
}

pub fn fixture(name: &str) -> Result<PointedModel, FixtureError> {
    fixtures()
        .into_iter()
        .find(|f| f.name == name)
        .map(|f| f.pointed)
        .ok_or_else(|| FixtureError(name.to_string()))
}
