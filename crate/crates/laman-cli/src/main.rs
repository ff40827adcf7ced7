//! Command-line frontend: Laman checking, realization counting, Henneberg
//! sequences, catalog enumeration, extremal search, and numeric
//! verification.
//!
//! Exit status: 0 on success, 1 on a negative verification (a non-Laman
//! `check`, a `verify` that does not agree), 2 on input errors, 3 on
//! arithmetic overflow.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use laman::count::{Engine, MemoTable, Options, Reductions};
use laman::enumerate;
use laman::error::Error;
use laman::format::{self, NamedBigraph, NamedGraph};
use laman::graph::{Bigraph, EdgeId, VertexId};
use laman::oracle;

const SCHEMA: u64 = 1;

#[derive(Parser)]
#[command(name = "laman", version, about = "Exact realization counts for minimally rigid graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: LAMAN_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    EdgeList,
    Graph6,
}

#[derive(Args)]
struct InputArgs {
    /// Input file; `-` or absent reads standard input.
    input: Option<PathBuf>,
    /// Inline edges, e.g. "1 2, 2 3, 1 3".
    #[arg(long, conflicts_with = "input")]
    edges: Option<String>,
    /// Input format.
    #[arg(long, value_enum, default_value = "edge-list")]
    format: GraphFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a graph is Laman.
    Check(InputArgs),
    /// Compute the exact realization count of a graph or bigraph.
    Lam {
        #[command(flatten)]
        input: InputArgs,
        /// Run the bare recursion without the bridge/untangling shortcuts.
        #[arg(long)]
        no_reductions: bool,
        /// Force the top-level pivot to the edge joining these two
        /// vertices, e.g. "1 2".
        #[arg(long)]
        pivot: Option<String>,
    },
    /// Produce a Henneberg construction sequence for a Laman graph.
    Henneberg(InputArgs),
    /// List all Laman graphs on n vertices, one per line.
    Enumerate {
        #[arg(long)]
        n: u32,
        /// Append the realization count to every entry.
        #[arg(long)]
        with_lam: bool,
        /// Output format: graph6 strings or JSON lines.
        #[arg(long, value_enum, default_value = "graph6")]
        output: EnumerateFormat,
        /// Raise the enumeration cap (resource guard, default 10).
        #[arg(long)]
        force: bool,
    },
    /// Minimal and maximal realization counts over all Laman graphs on n
    /// vertices, with a witness for the maximum.
    Extremal {
        #[arg(long)]
        n: u32,
        /// Raise the enumeration cap (resource guard, default 10).
        #[arg(long)]
        force: bool,
    },
    /// Numerically cross-check the realization count of a graph or bigraph.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Restart budget per seed.
        #[arg(long, default_value_t = 50_000)]
        restarts: usize,
        /// Newton acceptance tolerance.
        #[arg(long, default_value_t = oracle::DEFAULT_TOL)]
        tol: f64,
        /// Clustering radius separating distinct solutions.
        #[arg(long, default_value_t = oracle::DEFAULT_CLUSTER_TOL)]
        cluster_tol: f64,
        /// Base random seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Expected count; computed by the engine when omitted.
        #[arg(long)]
        expected: Option<u64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnumerateFormat {
    Graph6,
    Jsonl,
}

enum ParsedInput {
    Graph(NamedGraph),
    Bigraph(NamedBigraph),
}

fn read_input(args: &InputArgs) -> Result<String, Error> {
    if let Some(edges) = &args.edges {
        let lines: Vec<&str> = edges
            .split([',', ';'])
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        return Ok(lines.join("\n"));
    }
    let read_stdin = || {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Parse {
                line: 0,
                message: format!("cannot read standard input: {e}"),
            })?;
        Ok(buf)
    };
    match &args.input {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        }),
    }
}

fn parse_input(args: &InputArgs) -> Result<ParsedInput, Error> {
    let text = read_input(args)?;
    match args.format {
        GraphFormat::Graph6 => {
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("");
            let graph = format::parse_graph6(line)?;
            let names = graph.vertices().map(|v| v.0.to_string()).collect();
            Ok(ParsedInput::Graph(NamedGraph { graph, names }))
        }
        GraphFormat::EdgeList => {
            if format::looks_like_bigraph(&text) {
                Ok(ParsedInput::Bigraph(format::parse_bigraph(&text)?))
            } else {
                Ok(ParsedInput::Graph(format::parse_edge_list(&text)?))
            }
        }
    }
}

fn require_graph(input: ParsedInput, command: &str) -> Result<NamedGraph, Error> {
    match input {
        ParsedInput::Graph(g) => Ok(g),
        ParsedInput::Bigraph(_) => Err(Error::Unsupported(format!(
            "`{command}` expects a single graph, not a bigraph"
        ))),
    }
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Overflow => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("LAMAN_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global();
    }
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            if cli.json {
                let payload = json!({
                    "schema": SCHEMA,
                    "error": err.to_string(),
                });
                println!("{payload}");
            } else {
                eprintln!("error: {err}");
            }
            exit_code_for(&err)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Check(input) => check(cli, input),
        Command::Lam {
            input,
            no_reductions,
            pivot,
        } => lam(cli, input, *no_reductions, pivot.as_deref()),
        Command::Henneberg(input) => henneberg(cli, input),
        Command::Enumerate {
            n,
            with_lam,
            output,
            force,
        } => enumerate_cmd(*n, *with_lam, *output, *force),
        Command::Extremal { n, force } => extremal(cli, *n, *force),
        Command::Verify {
            input,
            restarts,
            tol,
            cluster_tol,
            seed,
            expected,
        } => verify(cli, input, *restarts, *tol, *cluster_tol, *seed, *expected),
    }
}

fn check(cli: &Cli, input: &InputArgs) -> Result<ExitCode, Error> {
    let named = require_graph(parse_input(input)?, "check")?;
    let violation = laman::check::laman_violation(&named.graph)?;
    if cli.json {
        let payload = json!({
            "schema": SCHEMA,
            "command": "check",
            "laman": violation.is_none(),
            "violation": violation.as_ref().map(|v| v.to_string()),
        });
        println!("{payload}");
    } else {
        match &violation {
            None => println!("laman"),
            Some(v) => println!("not-laman: {v}"),
        }
    }
    Ok(if violation.is_none() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn resolve_pivot(named: &NamedGraph, spec: &str) -> Result<EdgeId, Error> {
    let tokens: Vec<&str> = spec.split([' ', ',', '-']).filter(|t| !t.is_empty()).collect();
    let [a, b] = tokens.as_slice() else {
        return Err(Error::Parse {
            line: 0,
            message: format!("--pivot expects two vertex tokens, got {spec:?}"),
        });
    };
    let parse_one = |token: &str| {
        named.vertex(token).ok_or(Error::Parse {
            line: 0,
            message: format!("--pivot names unknown vertex {token:?}"),
        })
    };
    let (u, v) = (parse_one(a)?, parse_one(b)?);
    named
        .graph
        .edges_between(u, v)
        .first()
        .copied()
        .ok_or(Error::NoSuchEdge(u, v))
}

fn lam(
    cli: &Cli,
    input: &InputArgs,
    no_reductions: bool,
    pivot: Option<&str>,
) -> Result<ExitCode, Error> {
    let parsed = parse_input(input)?;
    let mut opts = Options {
        parallel: true,
        ..Options::default()
    };
    if no_reductions {
        opts.reductions = Reductions::none();
        opts.swap_memo = false;
    }
    let (bigraph, kind) = match &parsed {
        ParsedInput::Graph(named) => {
            if let Some(violation) = laman::check::laman_violation(&named.graph)? {
                return Err(Error::NotLaman(violation.to_string()));
            }
            if let Some(spec) = pivot {
                opts.pivot = Some(resolve_pivot(named, spec)?);
            }
            (Bigraph::duplicate(&named.graph)?, "graph")
        }
        ParsedInput::Bigraph(named) => {
            if let Some(spec) = pivot {
                let as_named = NamedGraph {
                    graph: named.bigraph.g().clone(),
                    names: named.g_names.clone(),
                };
                opts.pivot = Some(resolve_pivot(&as_named, spec)?);
            }
            (named.bigraph.clone(), "bigraph")
        }
    };
    let memo = MemoTable::new();
    let engine = Engine::with_options(&memo, opts);
    let report = engine.lam_report(&bigraph)?;
    if cli.json {
        let payload = json!({
            "schema": SCHEMA,
            "command": "lam",
            "input": kind,
            "count": report.value.get(),
            "nodes": report.nodes,
            "memo_hits": report.memo_hits,
            "wall_ms": report.wall.as_secs_f64() * 1e3,
        });
        println!("{payload}");
    } else {
        println!("{}", report.value);
        eprintln!(
            "nodes: {}  memo hits: {}  wall: {:.1} ms",
            report.nodes,
            report.memo_hits,
            report.wall.as_secs_f64() * 1e3
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn henneberg(cli: &Cli, input: &InputArgs) -> Result<ExitCode, Error> {
    let named = require_graph(parse_input(input)?, "henneberg")?;
    let Some(seq) = laman::check::henneberg_sequence(&named.graph)? else {
        if cli.json {
            println!(
                "{}",
                json!({ "schema": SCHEMA, "command": "henneberg", "laman": false })
            );
        } else {
            println!("not-laman");
        }
        return Ok(ExitCode::from(1));
    };
    let name = |v: VertexId| named.name(v).to_string();
    if cli.json {
        let steps: Vec<serde_json::Value> = seq
            .steps
            .iter()
            .map(|s| match *s {
                laman::check::HennebergStep::I { u, v, t } => json!({
                    "kind": "I", "u": name(u), "v": name(v), "t": name(t),
                }),
                laman::check::HennebergStep::II { u, v, w, t } => json!({
                    "kind": "II", "u": name(u), "v": name(v), "w": name(w), "t": name(t),
                }),
            })
            .collect();
        let payload = json!({
            "schema": SCHEMA,
            "command": "henneberg",
            "laman": true,
            "base": [name(seq.base.0), name(seq.base.1)],
            "steps": steps,
        });
        println!("{payload}");
    } else {
        println!("base: {} {}", name(seq.base.0), name(seq.base.1));
        for s in &seq.steps {
            match *s {
                laman::check::HennebergStep::I { u, v, t } => {
                    println!("I  {} {} -> {}", name(u), name(v), name(t));
                }
                laman::check::HennebergStep::II { u, v, w, t } => {
                    println!("II {} {} ; {} -> {}", name(u), name(v), name(w), name(t));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn catalog_cap(force: bool) -> u32 {
    if force {
        16
    } else {
        enumerate::DEFAULT_CAP
    }
}

fn enumerate_cmd(
    n: u32,
    with_lam: bool,
    output: EnumerateFormat,
    force: bool,
) -> Result<ExitCode, Error> {
    let memo = MemoTable::new();
    let engine = Engine::with_options(
        &memo,
        Options {
            parallel: true,
            ..Options::default()
        },
    );
    let mut failure = None;
    let count = enumerate::for_each_laman(n, catalog_cap(force), |g| {
        if failure.is_some() {
            return;
        }
        let lam = if with_lam {
            match engine.lam_graph(g) {
                Ok(v) => Some(v.get()),
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            }
        } else {
            None
        };
        match output {
            EnumerateFormat::Graph6 => {
                let line = format::write_graph6(g).expect("catalog graphs are simple");
                match lam {
                    Some(v) => println!("{line} {v}"),
                    None => println!("{line}"),
                }
            }
            EnumerateFormat::Jsonl => {
                let edges: Vec<[u32; 2]> = g
                    .edges()
                    .map(|(_, e)| [e.pair().0 .0, e.pair().1 .0])
                    .collect();
                let mut payload = json!({ "n": n, "edges": edges });
                if let Some(v) = lam {
                    payload["lam"] = json!(v);
                }
                println!("{payload}");
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    eprintln!("{count} graphs");
    Ok(ExitCode::SUCCESS)
}

fn extremal(cli: &Cli, n: u32, force: bool) -> Result<ExitCode, Error> {
    let memo = MemoTable::new();
    let result = enumerate::extremal_laman_with(n, catalog_cap(force), &memo)?;
    let edges: Vec<[u32; 2]> = result
        .argmax
        .edges()
        .map(|(_, e)| [e.pair().0 .0, e.pair().1 .0])
        .collect();
    if cli.json {
        let payload = json!({
            "schema": SCHEMA,
            "command": "extremal",
            "n": n,
            "min": result.min.get(),
            "max": result.max.get(),
            "argmax_edges": edges,
        });
        println!("{payload}");
    } else {
        println!("n={} min={} max={}", n, result.min, result.max);
        let lines: Vec<String> = edges.iter().map(|[a, b]| format!("{a} {b}")).collect();
        println!("argmax: {}", lines.join(", "));
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    cli: &Cli,
    input: &InputArgs,
    restarts: usize,
    tol: f64,
    cluster_tol: f64,
    seed: u64,
    expected: Option<u64>,
) -> Result<ExitCode, Error> {
    let parsed = parse_input(input)?;
    let bigraph = match &parsed {
        ParsedInput::Graph(named) => {
            if let Some(violation) = laman::check::laman_violation(&named.graph)? {
                return Err(Error::NotLaman(violation.to_string()));
            }
            Bigraph::duplicate(&named.graph)?
        }
        ParsedInput::Bigraph(named) => named.bigraph.clone(),
    };
    let expected = match expected {
        Some(v) => laman::count::LamValue::new(v),
        None => laman::count::lam(&bigraph, &MemoTable::new())?,
    };
    let report = oracle::verify_with(&bigraph, expected, restarts, tol, cluster_tol, seed)?;
    if cli.json {
        let mut payload = serde_json::to_value(&report).expect("report serializes");
        payload["schema"] = json!(SCHEMA);
        payload["command"] = json!("verify");
        println!("{payload}");
    } else {
        println!(
            "expected {} counted {} -> {}",
            report.expected,
            report.counted,
            match report.status {
                oracle::VerifyStatus::Agree => "agree",
                oracle::VerifyStatus::Overcount => "overcount",
                oracle::VerifyStatus::Undercount => "undercount (inconclusive)",
            }
        );
    }
    Ok(match report.status {
        oracle::VerifyStatus::Agree => ExitCode::SUCCESS,
        _ => ExitCode::from(1),
    })
}
