//! One line per acceptance criterion. Tolerances and time limits are
//! pinned below; criteria listed in `KNOWN_RED` are expected to fail (the
//! analysis is in the project notes) and the run fails if their status
//! changes in either direction.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cwlogic::analysis::{formula_suite, invariance_suite, parity_sweep, random_bisimilar_pair};
use cwlogic::axiomatics::{
    check_proof, mutated_proofs, nary_kw_schemas, sample_proofs, soundness_sample_in,
    target_sample, AxiomSchema, Proof, SampleParams,
};
use cwlogic::decision::{valid_with, SearchOptions};
use cwlogic::formula::{parse, parse_unchecked, AgentSet, DerivedOp, Formula, Modality};
use cwlogic::games::verify_separation;
use cwlogic::kripke::{fixture, random_model, FrameClass, KripkeModel, RandomParams, WorldSet};
use cwlogic::relations::{expected_matrix, implication_matrix, MatrixParams, Status};
use cwlogic::semantics::{eval_cw3, eval_cw5, extension, ops, satisfies, EwVariant};

const SEED: u64 = 20_240_601;
/// Mismatch tolerance shared by every criterion.
const TOLERANCE: usize = 0;
const KNOWN_RED: &[usize] = &[6];

const LIMIT_FIXTURES: Duration = Duration::from_secs(1);
const LIMIT_MATRIX: Duration = Duration::from_secs(300);
const LIMIT_SOUNDNESS: Duration = Duration::from_secs(60);
const LIMIT_SEPARATION_N3: Duration = Duration::from_secs(120);
const LIMIT_PARITY: Duration = Duration::from_secs(120);
const MAX_WITNESS_WORLDS: usize = 11;
const NON_NORMALITY_BOUND: usize = 4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_models(n: usize, class: FrameClass, max_worlds: usize, max_agents: usize, stream: u64) -> Vec<KripkeModel> {
    (0..n as u64)
        .map(|k| {
            let s = SEED ^ (stream << 32) ^ k;
            let worlds = 1 + (s.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 40) as usize % max_worlds;
            let agents = 1 + (s.wrapping_mul(0xbf58_476d_1ce4_e5b9) >> 40) as usize % max_agents;
            let params = RandomParams::new(worlds, AgentSet::standard(agents), class);
            random_model(&params, s)
        })
        .collect()
}

fn c1_fixture_truth_table() -> Outcome {
    let start = Instant::now();
    let claims: &[(&str, Option<&str>, &str, bool)] = &[
        ("cw2-not-cw1", None, "Cw21 p", true),
        ("cw2-not-cw1", None, "Cw1 p", false),
        ("cw2-not-cw1", None, "K[i] p", true),
        ("cw2-not-cw1", None, "p", false),
        ("cw3-not-cw2", None, "Cw31 p", true),
        ("cw3-not-cw2", None, "Cw32 p", true),
        ("cw3-not-cw2", None, "Cw21 p", false),
        ("cw3-not-cw2", Some("t"), "Kw[i] p", false),
        ("cw4-not-cw3", None, "Cw4 p", true),
        ("cw4-not-cw3", None, "Ew2 p", false),
        ("ew1-vs-ew2", None, "Ew2 p", true),
        ("ew1-vs-ew2", None, "Ew1 p", false),
        ("cw31-not-cw32", None, "Cw31 p", true),
        ("cw31-not-cw32", None, "Cw32 p", false),
        ("cw32-not-cw5", None, "Cw32 p", true),
        ("cw32-not-cw5", None, "Cw5 p", false),
        ("cw5-not-cw32", None, "Cw5 p", true),
        ("cw5-not-cw32", None, "Cw32 p", false),
        ("see-p", None, "K[i] p", true),
        ("see-notp", None, "K[i] p", false),
    ];
    let mut wrong = Vec::new();
    for &(name, world, text, expected) in claims {
        let mut pm = fixture(name).expect("fixture exists");
        if let Some(w) = world {
            pm.point = pm.model.world(w).expect("world exists");
        }
        let f = parse(text, pm.model.agents()).expect("claim parses");
        if satisfies(&pm, &f).expect("claim evaluates") != expected {
            wrong.push(format!("{name} {text}"));
        }
    }
    let took = start.elapsed();
    outcome(
        wrong.len() <= TOLERANCE && took < LIMIT_FIXTURES,
        format!("{}/{} claims hold, {:.3} s; wrong: {wrong:?}", claims.len() - wrong.len(), claims.len(), took.as_secs_f64()),
    )
}

fn c2_figures() -> Outcome {
    let start = Instant::now();
    let params = MatrixParams::default();
    let mut parts = Vec::new();
    let mut pass = expected_matrix(FrameClass::KD45, 2) == expected_matrix(FrameClass::K, 2);
    for (class, agents) in [
        (FrameClass::K, 1),
        (FrameClass::K, 2),
        (FrameClass::T, 2),
        (FrameClass::S5, 2),
        (FrameClass::KD45, 2),
    ] {
        let m = implication_matrix(class, agents, &params);
        let diff = m.diff(&expected_matrix(class, agents));
        let mut bad_witness = 0;
        let mut largest = 0;
        for c in m.cells.iter().filter(|c| c.status == Status::Refuted) {
            let ok = c.witness.as_ref().is_some_and(|w| {
                largest = largest.max(w.model.num_worlds());
                let p = w.model.atom("p");
                let holds = |op| ops::derived(&w.model, op, &p).0.contains(w.point);
                w.model.num_worlds() <= MAX_WITNESS_WORLDS
                    && w.model.in_class(class)
                    && holds(c.src)
                    && !holds(c.dst)
            });
            bad_witness += usize::from(!ok);
        }
        pass &= diff.len() <= TOLERANCE && bad_witness == 0;
        parts.push(format!(
            "{class}/{agents}: {} diffs, {bad_witness} bad witnesses, largest {largest}",
            diff.len()
        ));
    }
    let took = start.elapsed();
    pass &= took < LIMIT_MATRIX;
    outcome(pass, format!("{}; {:.1} s", parts.join("; "), took.as_secs_f64()))
}

fn c3_soundness() -> Outcome {
    let start = Instant::now();
    let params = SampleParams::new(200, SEED);
    let schemas = AxiomSchema::all();
    let report = soundness_sample_in(&schemas, &params);
    let mut violations = report.violation_count();
    let mut targets = report.targets.len();
    let agent = AgentSet::standard(1).get(0).expect("one agent").clone();
    for n in [2, 3] {
        let (a, b) = nary_kw_schemas(n, &agent).expect("n >= 2");
        for (k, f) in [a, b].iter().enumerate() {
            violations += target_sample(&format!("Kw-{n}-ary-{k}"), f, &params).violations.len();
            targets += 1;
        }
    }
    let took = start.elapsed();
    outcome(
        schemas.len() == 11 && violations <= TOLERANCE && took < LIMIT_SOUNDNESS,
        format!(
            "{} schemas + 4 n-ary instances = {targets} targets on 200 S5 models, {violations} violations, {:.1} s",
            schemas.len(),
            took.as_secs_f64()
        ),
    )
}

fn c4_collapses() -> Outcome {
    let mut mismatches = 0;
    for m in random_models(500, FrameClass::T, 6, 2, 1) {
        let p = m.atom("p");
        mismatches += usize::from(ops::ew1(&m, &p) != ops::ew2(&m, &p));
    }
    let collapse = [
        DerivedOp::Cw1,
        DerivedOp::Cw21,
        DerivedOp::Cw22,
        DerivedOp::Cw31,
        DerivedOp::Cw32,
        DerivedOp::Cw5,
    ];
    for m in random_models(500, FrameClass::S5, 6, 2, 2) {
        let p = m.atom("p");
        let exts: Vec<WorldSet> = collapse.iter().map(|&op| ops::derived(&m, op, &p).0).collect();
        mismatches += exts.windows(2).filter(|w| w[0] != w[1]).count();
    }
    for m in random_models(500, FrameClass::K, 6, 2, 3) {
        let p = m.atom("p");
        mismatches += usize::from(ops::cw_prim(&m, &p) != ops::cw1(&m, &p));
    }
    outcome(
        mismatches <= TOLERANCE,
        format!("Ew1=Ew2 on 500 T, six Cw variants on 500 S5, CwPrim=Cw1 on 500 K: {mismatches} mismatches"),
    )
}

/// `⋀_{1≤|s|≤d} Kw_s p`, built and evaluated syntactically.
fn kw_sequences(m: &KripkeModel, d: usize) -> WorldSet {
    let mut out = WorldSet::full(m.num_worlds());
    let mut layer = vec![Formula::atom("p")];
    for _ in 0..d {
        layer = layer
            .iter()
            .flat_map(|f| m.agents().iter().map(move |a| Formula::kw(a.clone(), f.clone())))
            .collect();
        for f in &layer {
            out.intersect_with(&extension(m, f).expect("model agents"));
        }
    }
    out
}

/// `⋀_{1≤k≤d} Ew^k p`, built and evaluated syntactically.
fn ew_powers(m: &KripkeModel, op: DerivedOp, d: usize) -> WorldSet {
    let mut out = WorldSet::full(m.num_worlds());
    let mut f = Formula::atom("p");
    for _ in 0..d {
        f = Formula::derived(op, f);
        out.intersect_with(&extension(m, &f).expect("model agents"));
    }
    out
}

fn c5_fixpoint_oracle() -> Outcome {
    let p = Formula::atom("p");
    let mut mismatches = 0;
    let mut max_depth = 0;
    let mut max_orbit = 0;
    for m in random_models(200, FrameClass::K, 5, 2, 4) {
        let (cw5, d) = eval_cw5(&m, &p).expect("p evaluates");
        max_depth = max_depth.max(d);
        mismatches += usize::from(cw5 != kw_sequences(&m, d));
        for (variant, op) in [(EwVariant::Ew1, DerivedOp::Ew1), (EwVariant::Ew2, DerivedOp::Ew2)] {
            let (cw3, len) = eval_cw3(&m, &p, variant).expect("p evaluates");
            max_orbit = max_orbit.max(len);
            mismatches += usize::from(cw3 != ew_powers(&m, op, len));
        }
    }
    outcome(
        mismatches <= TOLERANCE,
        format!("200 K models: {mismatches} mismatches (max Cw5 depth {max_depth}, max orbit {max_orbit})"),
    )
}

fn c6_separation() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for n in 1..=3 {
        let start = Instant::now();
        let r = verify_separation(n);
        let took = start.elapsed();
        let ok = r.holds() && (n < 3 || took < LIMIT_SEPARATION_N3);
        pass &= ok;
        parts.push(format!(
            "n={n}: game {:?}, M {} N {}, bisimilar {} ({:.2} s)",
            r.winner,
            r.m_satisfies,
            r.n_satisfies,
            r.bisimilar,
            took.as_secs_f64()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c7_invariance() -> Outcome {
    let agents = AgentSet::standard(2);
    let suite = formula_suite(&agents, Modality::CW5_LANGUAGE, 50, 3, SEED);
    let pairs: Vec<_> = (0..100).map(|k| random_bisimilar_pair(SEED + k)).collect();
    let r = invariance_suite(&pairs, &suite);
    let uncertified = r.pairs.iter().filter(|p| !p.certified).count();
    outcome(
        suite.len() == 50 && uncertified == 0 && r.disagreement_count() <= TOLERANCE,
        format!(
            "100 pairs x {} formulas: {uncertified} uncertified, {} disagreements",
            suite.len(),
            r.disagreement_count()
        ),
    )
}

fn c8_parity() -> Outcome {
    let start = Instant::now();
    let (two, three) = (parity_sweep(2, 2), parity_sweep(3, 3));
    let took = start.elapsed();
    match (two, three) {
        (Ok(a), Ok(b)) => outcome(
            a.clean() && b.clean() && a.valuations == 1 << 7 && b.valuations == 1 << 15 && took < LIMIT_PARITY,
            format!(
                "depth 2: {} valuations, {} mismatches, {} odd-layer Cw5; depth 3: {} valuations, {} mismatches, {} odd-layer Cw5; {:.1} s",
                a.valuations, a.parity_mismatches, a.cw5_violations,
                b.valuations, b.parity_mismatches, b.cw5_violations,
                took.as_secs_f64()
            ),
        ),
        (a, b) => outcome(false, format!("sweep error: {a:?} {b:?}")),
    }
}

fn c9_non_normality() -> Outcome {
    let f = parse_unchecked("(Cw5 p & Cw5 q) -> Cw5(p & q)").expect("fixed formula");
    let v = valid_with(&f, FrameClass::K, NON_NORMALITY_BOUND, &SearchOptions::default());
    match v.countermodel() {
        Some(w) => {
            let refuted = !satisfies(w, &f).expect("evaluates");
            outcome(
                refuted && w.model.num_worlds() <= NON_NORMALITY_BOUND && w.model.in_class(FrameClass::K),
                format!("countermodel with {} worlds, re-check {}", w.model.num_worlds(), if refuted { "falsifies" } else { "FAILS" }),
            )
        }
        None => outcome(false, format!("no countermodel within {NON_NORMALITY_BOUND} worlds")),
    }
}

fn c10_proofs() -> Outcome {
    let samples = sample_proofs();
    let accepted = samples
        .iter()
        .filter(|s| Proof::from_json(s.json).is_ok_and(|p| check_proof(&p).accepted))
        .count();
    let mutants = mutated_proofs();
    let caught = mutants
        .iter()
        .filter(|m| {
            Proof::from_json(m.json).is_ok_and(|p| {
                let r = check_proof(&p);
                !r.accepted && r.first_failure == Some(m.failing_line)
            })
        })
        .count();
    outcome(
        accepted == samples.len() && mutants.len() == 10 && caught == mutants.len(),
        format!(
            "{accepted}/{} samples accepted, {caught}/{} mutants rejected at the expected line",
            samples.len(),
            mutants.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("fixture truth table", c1_fixture_truth_table),
        ("figure reproduction", c2_figures),
        ("soundness", c3_soundness),
        ("equivalence collapses", c4_collapses),
        ("fixpoint vs brute force", c5_fixpoint_oracle),
        ("expressivity separation", c6_separation),
        ("bisimulation invariance", c7_invariance),
        ("binary-tree parity", c8_parity),
        ("non-normality", c9_non_normality),
        ("proof checker", c10_proofs),
    ];
    let mut unexpected = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let id = k + 1;
        let o = run();
        let known = KNOWN_RED.contains(&id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (expected FAIL)",
        };
        if o.pass == known {
            unexpected += 1;
        }
        println!("[{tag}] {id:>2} {name}: {}", o.detail);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
