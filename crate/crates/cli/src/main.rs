use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use cwlogic::analysis::parity_sweep;
use cwlogic::axiomatics::{check_proof, mutated_proofs, sample_proofs, Proof};
use cwlogic::decision::{sat_with, valid_with, SatStatus, SearchOptions, Validity, DEFAULT_SEED};
use cwlogic::formula::{parse, parse_unchecked, Formula};
use cwlogic::games::{verify_separation, ClGame};
use cwlogic::kripke::{fixture, fixtures, load_model, FrameClass, KripkeModel, ModelFile, PointedModel};
use cwlogic::relations::{expected_matrix, implication_matrix, MatrixParams};
use cwlogic::semantics::{extension, extension_traced};

#[derive(Parser, Debug)]
#[command(name = "cwlogic", version, about = "Model checking, search, proofs and games for logics of knowing whether")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Seed for every randomized component.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a formula on a model file or a built-in fixture.
    Eval {
        /// Path to a model JSON file, or a fixture name.
        model: String,
        formula: String,
        /// World to evaluate at; defaults to the model's point.
        #[arg(long)]
        world: Option<String>,
        /// Include the extension of every subformula.
        #[arg(long)]
        trace: bool,
    },
    /// Compute the implication matrix of the seven operators and compare it
    /// with the expected one.
    Matrix {
        #[arg(long, default_value = "K")]
        class: FrameClass,
        #[arg(long, default_value_t = 1)]
        agents: usize,
        #[arg(long, default_value_t = cwlogic::relations::DEFAULT_BOUND)]
        bound: usize,
    },
    /// Solve the CL-game on the n-th pair of separating models.
    Game {
        #[arg(long)]
        n: usize,
        /// Rounds to play; defaults to n.
        #[arg(long)]
        rounds: Option<usize>,
        /// Include duplicator's answers when duplicator wins.
        #[arg(long)]
        strategy: bool,
    },
    /// Bounded satisfiability.
    Sat(SearchArgs),
    /// Bounded validity; prints a countermodel when one is found.
    Valid(SearchArgs),
    /// Check a proof file, or a bundled proof with --sample/--mutant.
    Proof {
        path: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["path", "mutant"])]
        sample: Option<String>,
        #[arg(long, conflicts_with_all = ["path", "sample"])]
        mutant: Option<String>,
    },
    /// Exhaustive parity check over every valuation of a binary tree.
    Parity {
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Check Kw^m for m = 1..=n; defaults to the depth.
        #[arg(long)]
        n: Option<usize>,
    },
    /// List the built-in countermodels, or print one as model JSON.
    Fixtures { name: Option<String> },
}

#[derive(Args, Debug)]
struct SearchArgs {
    formula: String,
    #[arg(long, default_value = "K")]
    class: FrameClass,
    #[arg(long, default_value_t = 4)]
    bound: usize,
    /// Minimum number of agents in candidate models.
    #[arg(long, default_value_t = 1)]
    agents: usize,
}

/// Bad input: exit code 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

struct Outcome {
    inputs: Value,
    results: Value,
    text: String,
    /// Every assertion made by the command held.
    ok: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    inputs: &'a Value,
    results: &'a Value,
    version: &'a str,
    seed: u64,
    wall_time_ms: u128,
}

fn model_json(pm: &PointedModel) -> Value {
    serde_json::to_value(ModelFile::from_model(&pm.model, Some(pm.point))).expect("models serialize")
}

fn labels(m: &KripkeModel, ws: impl Iterator<Item = usize>) -> Vec<String> {
    ws.map(|w| m.label(w).to_string()).collect()
}

fn load(source: &str) -> Result<(KripkeModel, Option<usize>, String), InputError> {
    let name = source.strip_prefix("fixture:").unwrap_or(source);
    if !Path::new(source).exists() {
        if let Ok(pm) = fixture(name) {
            return Ok((pm.model, Some(pm.point), format!("fixture:{name}")));
        }
    }
    let (m, point) = load_model(source)
        .map_err(|e| InputError(format!("{source}: not a fixture name and not a readable model file ({e})")))?;
    Ok((m, point, source.to_string()))
}

fn cmd_eval(model: &str, source: &str, world: Option<&str>, trace: bool) -> Result<Outcome, InputError> {
    let (m, point, id) = load(model)?;
    let f = parse(source, m.agents())?;
    let at = match world {
        Some(l) => Some(m.world(l).ok_or_else(|| InputError(format!("no world {l:?} in {id}")))?),
        None => point,
    };
    let (ext, tr) = if trace {
        let (s, t) = extension_traced(&m, &f, &id)?;
        (s, Some(t))
    } else {
        (extension(&m, &f)?, None)
    };
    let worlds = labels(&m, ext.iter());
    let mut results = json!({ "formula": f.to_string(), "extension": worlds });
    let mut text = format!("{f}\nextension: {{{}}}\n", worlds.join(", "));
    if let Some(w) = at {
        let v = ext.contains(w);
        results["world"] = json!(m.label(w));
        results["value"] = json!(v);
        text.push_str(&format!("at {}: {v}\n", m.label(w)));
    }
    if let Some(t) = tr {
        for e in &t.subformulas {
            text.push_str(&format!("  {}: {{{}}}\n", e.formula, e.worlds.join(", ")));
        }
        results["trace"] = serde_json::to_value(t)?;
    }
    Ok(Outcome {
        inputs: json!({ "model": id, "formula": source, "world": world }),
        results,
        text,
        ok: true,
    })
}

fn cmd_matrix(class: FrameClass, agents: usize, bound: usize, seed: u64) -> Result<Outcome, InputError> {
    if agents == 0 || bound == 0 {
        return Err(InputError("--agents and --bound must be at least 1".into()));
    }
    let params = MatrixParams {
        bound,
        seed,
        ..MatrixParams::default()
    };
    let m = implication_matrix(class, agents, &params);
    let expected_agents = if agents == 1 { 1 } else { 2 };
    let diff = m.diff(&expected_matrix(class, expected_agents));
    let mut text = format!("class {class}, {agents} agent(s), bound {bound}\n{}", m.table());
    if diff.is_empty() {
        text.push_str("matches the expected matrix\n");
    } else {
        for d in &diff {
            text.push_str(&format!(
                "differs at {} -> {}: expected {}, computed {}\n",
                d.src, d.dst, d.expected, d.computed
            ));
        }
    }
    let mut results = m.to_json();
    results["diff"] = serde_json::to_value(&diff)?;
    Ok(Outcome {
        inputs: json!({ "class": class.to_string(), "agents": agents, "bound": bound }),
        results,
        text,
        ok: diff.is_empty(),
    })
}

fn cmd_game(n: usize, rounds: Option<usize>, strategy: bool) -> Result<Outcome, InputError> {
    if n == 0 {
        return Err(InputError("--n must be at least 1".into()));
    }
    let rounds = rounds.unwrap_or(n);
    let sep = verify_separation(n);
    let (m, nn) = (cwlogic::games::build_m(n), cwlogic::games::build_n(n));
    let mut g = ClGame::new(&m.model, &nn.model)?;
    let winner = g.winner(m.point, nn.point, rounds);
    let least = g.least_spoiler_win(m.point, nn.point, n + 4);
    let mut results = json!({
        "separation": sep,
        "rounds": rounds,
        "winner": winner,
        "least_spoiler_win": least,
    });
    if strategy {
        results["strategy"] = serde_json::to_value(g.strategy(m.point, nn.point, rounds))?;
    }
    let text = format!(
        "M_{n}: {} worlds, N_{n}: {} worlds\n{} at M_{n},r: {}\n{} at N_{n},r: {}\nbisimilar at r: {}\n{rounds}-round CL-game winner: {winner:?}\nspoiler's least winning round count: {}\nseparation {}\n",
        sep.worlds_m,
        sep.worlds_n,
        sep.formula,
        sep.m_satisfies,
        sep.formula,
        sep.n_satisfies,
        sep.bisimilar,
        least.map_or("none within range".into(), |k| k.to_string()),
        if sep.holds() { "confirmed" } else { "NOT confirmed" },
    );
    Ok(Outcome {
        inputs: json!({ "n": n, "rounds": rounds }),
        ok: sep.holds(),
        results,
        text,
    })
}

fn search_opts(args: &SearchArgs, seed: u64) -> Result<(Formula, SearchOptions), InputError> {
    if args.bound == 0 {
        return Err(InputError("--bound must be at least 1".into()));
    }
    let f = parse_unchecked(&args.formula)?;
    let opts = SearchOptions {
        agents: args.agents.max(1),
        seed,
        ..SearchOptions::default()
    };
    Ok((f, opts))
}

fn search_inputs(args: &SearchArgs, f: &Formula) -> Value {
    json!({
        "formula": f.to_string(),
        "class": args.class.to_string(),
        "bound": args.bound,
        "agents": args.agents,
    })
}

fn cmd_sat(args: &SearchArgs, seed: u64) -> Result<Outcome, InputError> {
    let (f, opts) = search_opts(args, seed)?;
    let r = sat_with(&f, args.class, args.bound, &opts);
    let status = match r.status {
        SatStatus::Sat => "sat",
        SatStatus::UnsatUpToBound => "unsat-up-to-bound",
    };
    let mut results = json!({
        "status": status,
        "bound": r.bound,
        "exhaustive_worlds": r.exhaustive_worlds,
        "examined": r.examined,
    });
    let mut text = format!("{status} (class {}, bound {})\n", args.class, r.bound);
    if let Some(w) = &r.witness {
        results["witness"] = model_json(w);
        text.push_str(&serde_json::to_string_pretty(&results["witness"])?);
        text.push('\n');
    }
    Ok(Outcome {
        inputs: search_inputs(args, &f),
        results,
        text,
        ok: true,
    })
}

fn cmd_valid(args: &SearchArgs, seed: u64) -> Result<Outcome, InputError> {
    let (f, opts) = search_opts(args, seed)?;
    let v = valid_with(&f, args.class, args.bound, &opts);
    let (results, text) = match &v {
        Validity::ValidUpToBound {
            bound,
            exhaustive_worlds,
            examined,
        } => (
            json!({
                "status": "valid-up-to-bound",
                "bound": bound,
                "exhaustive_worlds": exhaustive_worlds,
                "examined": examined,
            }),
            format!("valid up to bound {bound} (class {})\n", args.class),
        ),
        Validity::Countermodel { witness, examined } => {
            let w = model_json(witness);
            let text = format!(
                "countermodel with {} worlds, falsified at {}\n{}\n",
                witness.model.num_worlds(),
                witness.point_label(),
                serde_json::to_string_pretty(&w)?
            );
            (
                json!({
                    "status": "countermodel",
                    "examined": examined,
                    "worlds": witness.model.num_worlds(),
                    "witness": w,
                }),
                text,
            )
        }
    };
    Ok(Outcome {
        inputs: search_inputs(args, &f),
        results,
        text,
        ok: true,
    })
}

fn cmd_proof(path: Option<&Path>, sample: Option<&str>, mutant: Option<&str>) -> Result<Outcome, InputError> {
    let (source, text) = match (path, sample, mutant) {
        (Some(p), _, _) => (p.display().to_string(), std::fs::read_to_string(p)?),
        (None, Some(s), _) => {
            let b = sample_proofs()
                .into_iter()
                .find(|b| b.name == s)
                .ok_or_else(|| InputError(format!("no bundled sample {s:?}")))?;
            (format!("sample:{s}"), b.json.to_string())
        }
        (None, None, Some(s)) => {
            let b = mutated_proofs()
                .into_iter()
                .find(|b| b.name == s)
                .ok_or_else(|| InputError(format!("no bundled mutant {s:?}")))?;
            (format!("mutant:{s}"), b.json.to_string())
        }
        (None, None, None) => return Err(InputError("give a proof path, --sample or --mutant".into())),
    };
    let proof = Proof::from_json(&text)?;
    let r = check_proof(&proof);
    let mut out = String::new();
    for l in &r.lines {
        out.push_str(&format!(
            "{:>3}. {}  [{}]  {}\n",
            l.line,
            l.formula,
            l.rule,
            match &l.error {
                None => "ok".to_string(),
                Some(e) => format!("REJECTED: {e}"),
            }
        ));
    }
    match r.first_failure {
        None => out.push_str(&format!("accepted: {}\n", r.conclusion)),
        Some(k) => out.push_str(&format!("rejected at line {k}\n")),
    }
    Ok(Outcome {
        inputs: json!({ "proof": source }),
        ok: r.accepted,
        results: serde_json::to_value(&r)?,
        text: out,
    })
}

fn cmd_parity(depth: usize, n: Option<usize>) -> Result<Outcome, InputError> {
    let n = n.unwrap_or(depth);
    let r = parity_sweep(depth, n)?;
    let text = format!(
        "depth {depth}: {} valuations, Kw^1..Kw^{n} checked at {} nodes, {} mismatches\nCw5 p at the root in {} valuations, {} with an odd layer\n",
        r.valuations, r.parity_nodes_checked, r.parity_mismatches, r.cw5_at_root, r.cw5_violations
    );
    Ok(Outcome {
        inputs: json!({ "depth": depth, "n": n }),
        ok: r.clean(),
        results: serde_json::to_value(&r)?,
        text,
    })
}

fn cmd_fixtures(name: Option<&str>) -> Result<Outcome, InputError> {
    match name {
        Some(n) => {
            let pm = fixture(n)?;
            let results = model_json(&pm);
            Ok(Outcome {
                inputs: json!({ "name": n }),
                text: format!("{}\n", serde_json::to_string_pretty(&results)?),
                results,
                ok: true,
            })
        }
        None => {
            let all = fixtures();
            let text = all
                .iter()
                .map(|f| format!("{:<22} {:>2} worlds  {}\n", f.name, f.pointed.model.num_worlds(), f.summary))
                .collect();
            let results = all
                .iter()
                .map(|f| json!({ "name": f.name, "worlds": f.pointed.model.num_worlds(), "summary": f.summary }))
                .collect();
            Ok(Outcome {
                inputs: json!({}),
                results,
                text,
                ok: true,
            })
        }
    }
}

fn run(cli: &Cli) -> Result<(&'static str, Outcome), InputError> {
    let seed = cli.global.seed;
    Ok(match &cli.command {
        Command::Eval {
            model,
            formula,
            world,
            trace,
        } => ("eval", cmd_eval(model, formula, world.as_deref(), *trace)?),
        Command::Matrix { class, agents, bound } => ("matrix", cmd_matrix(*class, *agents, *bound, seed)?),
        Command::Game { n, rounds, strategy } => ("game", cmd_game(*n, *rounds, *strategy)?),
        Command::Sat(a) => ("sat", cmd_sat(a, seed)?),
        Command::Valid(a) => ("valid", cmd_valid(a, seed)?),
        Command::Proof { path, sample, mutant } => (
            "proof",
            cmd_proof(path.as_deref(), sample.as_deref(), mutant.as_deref())?,
        ),
        Command::Parity { depth, n } => ("parity", cmd_parity(*depth, *n)?),
        Command::Fixtures { name } => ("fixtures", cmd_fixtures(name.as_deref())?),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let (command, out) = match run(&cli) {
        Ok(r) => r,
        Err(InputError(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.global.json {
        let report = Report {
            command,
            inputs: &out.inputs,
            results: &out.results,
            version: env!("CARGO_PKG_VERSION"),
            seed: cli.global.seed,
            wall_time_ms: start.elapsed().as_millis(),
        };
        println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    } else {
        print!("{}", out.text);
    }
    if out.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
