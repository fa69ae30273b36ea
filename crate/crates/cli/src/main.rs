use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use zefc::coloring::{
    chromatic_entropy_product, ChromaticConfig, DEFAULT_BLOCK_BUDGET, DEFAULT_EXACT_CAP,
    DEFAULT_MIS_CAP,
};
use zefc::entropy::{graph_entropy, trace_csv, GraphEntropyConfig};
use zefc::graphs::{
    confusability_graphs, confusability_pgraphs, f_rook_graph, f_rook_pgraph, product_pgraph,
    ProbabilisticGraph,
};
use zefc::model::{load_instance, ProblemInstance};
use zefc::protocol::{
    build_decoders, load_scheme, relay_computability, simulate, verify_zero_error, RelayVerdict,
    Scheme, ZeroErrorVerdict,
};
use zefc::region::{region_report, Bounds, FrontierConfig, Membership, RateTriple};
use zefc::Error;

/// Zero-error function computation over a relay network.
#[derive(Parser)]
#[command(name = "zefc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Edge lists and DOT files of the f-modified rook's graph and both
    /// confusability graphs.
    Graphs {
        #[command(flatten)]
        common: Common,
    },
    /// Chromatic or graph entropy of each graph, per symbol of the n-th power.
    Entropy {
        kind: EntropyKind,
        #[command(flatten)]
        common: Common,
        /// Restrict to one graph.
        #[arg(long, value_enum, default_value_t = GraphChoice::All)]
        graph: GraphChoice,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the per-iteration objective of the graph-entropy solver as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Inner and outer rate-region corners and the tightness flag.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
        /// Classify a rate triple `r_a,r_b,r_c` against the bounds.
        #[arg(long, value_parser = parse_triple)]
        point: Option<RateTriple>,
    },
    /// Bounds plus the finite-n chromatic frontier for every n up to --n.
    Region {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Exact and simulated rates of a scheme with its zero-error and relay
    /// verdicts.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 100_000)]
        blocks: usize,
    },
    /// Zero-error check of a scheme at both sources; fails with a
    /// counterexample.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scheme: SchemeArg,
    },
    /// Whether the relay itself can recover the function from the messages.
    CheckRelay {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scheme: SchemeArg,
    },
}

#[derive(Args)]
struct Common {
    /// Instance JSON file.
    instance: PathBuf,
    /// Block length (default 1; scheme commands take it from the scheme).
    #[arg(long)]
    n: Option<usize>,
    /// Largest graph handled exactly.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    cap_vertices: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (directory for `graphs`); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SolverArgs {
    /// Relative stopping tolerance of the graph-entropy solver.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
}

#[derive(Args)]
struct SchemeArg {
    /// Scheme JSON file.
    #[arg(long)]
    scheme: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EntropyKind {
    Chromatic,
    Graph,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphChoice {
    All,
    Rook,
    X,
    Y,
}

fn parse_triple(s: &str) -> Result<RateTriple, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c] => RateTriple::new(a, b, c).map_err(|e| e.to_string()),
        _ => Err("expected three comma-separated rates".into()),
    }
}

impl Common {
    fn block_length(&self) -> Run<usize> {
        match self.n {
            Some(0) => Err(usage("--n must be positive")),
            Some(n) => Ok(n),
            None => Ok(1),
        }
    }

    /// Scheme commands accept `--n` only when it matches the scheme.
    fn check_scheme_length(&self, scheme: &Scheme) -> Run<()> {
        match self.n {
            Some(n) if n != scheme.n => Err(usage(format!(
                "--n {n} differs from the scheme's block length {}",
                scheme.n
            ))),
            _ => Ok(()),
        }
    }
}

/// Failure carrying its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Validation(_) => 2,
            Error::Verification(_) | Error::Ambiguity(_) => 3,
            Error::CapExceeded { .. } => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure {
            code: 2,
            message: format!("{e:#}"),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn read_instance(path: &Path) -> Run<ProblemInstance> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(load_instance(&text)?)
}

fn read_scheme(inst: &ProblemInstance, path: &Path) -> Run<Scheme> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(load_scheme(inst, &text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Run<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn reject_format(format: Format, allowed: &[Format], cmd: &str) -> Run<()> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(usage(format!("--format not supported by {cmd}")))
    }
}

fn ge_config(common: &Common, solver: &SolverArgs) -> Run<GraphEntropyConfig> {
    if !(solver.tol > 0.0 && solver.tol.is_finite()) {
        return Err(usage("--tol must be positive"));
    }
    if solver.max_iter == 0 {
        return Err(usage("--max-iter must be positive"));
    }
    Ok(GraphEntropyConfig {
        tol: solver.tol,
        max_iter: solver.max_iter,
        mis_cap: common.cap_vertices.max(DEFAULT_MIS_CAP),
        seed: common.seed,
        trace: false,
    })
}

const GRAPH_NAMES: [&str; 3] = ["f_rook", "conf_x", "conf_y"];

#[derive(Serialize)]
struct GraphJson<'a> {
    name: &'a str,
    vertices: &'a [String],
    edges: Vec<(usize, usize)>,
}

fn cmd_graphs(common: &Common) -> Run<()> {
    let inst = read_instance(&common.instance)?;
    let (gx, gy) = confusability_graphs(&inst);
    let graphs = [f_rook_graph(&inst), gx, gy];
    if let Some(dir) = &common.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, g) in GRAPH_NAMES.iter().zip(&graphs) {
            for (ext, body) in [("edges", g.to_edge_list()), ("dot", g.to_dot(name))] {
                let path = dir.join(format!("{name}.{ext}"));
                std::fs::write(&path, body)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        return Ok(());
    }
    let text = match common.format {
        Format::Json => to_json(
            &GRAPH_NAMES
                .iter()
                .zip(&graphs)
                .map(|(name, g)| GraphJson {
                    name,
                    vertices: g.labels(),
                    edges: g.edges().collect(),
                })
                .collect::<Vec<_>>(),
        ),
        Format::Dot => GRAPH_NAMES
            .iter()
            .zip(&graphs)
            .map(|(n, g)| g.to_dot(n))
            .collect(),
        Format::Csv => {
            let mut s = String::from("graph,u,v\n");
            for (name, g) in GRAPH_NAMES.iter().zip(&graphs) {
                for (u, v) in g.edges() {
                    let _ = writeln!(s, "{name},{},{}", g.label(u), g.label(v));
                }
            }
            s
        }
    };
    emit(None, &text)
}

#[derive(Serialize)]
struct EntropyRow {
    graph: &'static str,
    n: usize,
    vertices: usize,
    bits: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
}

fn cmd_entropy(
    kind: EntropyKind,
    common: &Common,
    choice: GraphChoice,
    solver: &SolverArgs,
    trace: Option<&Path>,
) -> Run<()> {
    reject_format(common.format, &[Format::Json, Format::Csv], "entropy")?;
    let n = common.block_length()?;
    if trace.is_some() && (kind != EntropyKind::Graph || choice == GraphChoice::All) {
        return Err(usage("--trace needs the graph kind and a single --graph"));
    }
    let inst = read_instance(&common.instance)?;
    let (px, py) = confusability_pgraphs(&inst);
    let all: [(&'static str, GraphChoice, ProbabilisticGraph); 3] = [
        ("f_rook", GraphChoice::Rook, f_rook_pgraph(&inst)),
        ("conf_x", GraphChoice::X, px),
        ("conf_y", GraphChoice::Y, py),
    ];
    let mut rows = Vec::new();
    for (name, which, pg) in all {
        if choice != GraphChoice::All && choice != which {
            continue;
        }
        let row = match kind {
            EntropyKind::Chromatic => {
                let cfg = ChromaticConfig {
                    cap_vertices: common.cap_vertices,
                    ..Default::default()
                };
                let ce = chromatic_entropy_product(&pg, n, &cfg)?;
                EntropyRow {
                    graph: name,
                    n,
                    vertices: ce.witness.len(),
                    bits: ce.bits,
                    witness: Some(ce.witness.colors().to_vec()),
                    lower_bound: None,
                    iterations: None,
                    converged: None,
                }
            }
            EntropyKind::Graph => {
                let mut cfg = ge_config(common, solver)?;
                cfg.trace = trace.is_some();
                let prod = if n == 1 {
                    pg
                } else {
                    product_pgraph(&pg, n, common.cap_vertices.max(DEFAULT_MIS_CAP))?
                };
                let ge = graph_entropy(&prod, &cfg)?;
                if let Some(path) = trace {
                    emit(Some(path), &trace_csv(&ge.trace))?;
                }
                let nf = n as f64;
                EntropyRow {
                    graph: name,
                    n,
                    vertices: prod.graph.vertex_count(),
                    bits: ge.bits / nf,
                    witness: None,
                    lower_bound: Some(ge.lower_bound / nf),
                    iterations: Some(ge.iterations),
                    converged: Some(ge.converged),
                }
            }
        };
        rows.push(row);
    }
    let text = match common.format {
        Format::Csv => {
            let mut s = String::from("graph,n,vertices,bits\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{:.12}", r.graph, r.n, r.vertices, r.bits);
            }
            s
        }
        _ => to_json(&rows),
    };
    emit(common.out.as_deref(), &text)
}

#[derive(Serialize)]
struct BoundsReport {
    corner_i1: RateTriple,
    corner_i2: RateTriple,
    corner_o: RateTriple,
    tight: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<RateTriple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    membership: Option<Membership>,
}

fn triple_csv(s: &mut String, name: &str, r: &RateTriple) {
    let _ = writeln!(s, "{name},{:.12},{:.12},{:.12}", r.r_a, r.r_b, r.r_c);
}

fn cmd_bounds(common: &Common, solver: &SolverArgs, point: Option<RateTriple>) -> Run<()> {
    reject_format(common.format, &[Format::Json, Format::Csv], "bounds")?;
    let inst = read_instance(&common.instance)?;
    let b = Bounds::compute(&inst, &ge_config(common, solver)?)?;
    let report = BoundsReport {
        corner_i1: b.corner_i1,
        corner_i2: b.corner_i2,
        corner_o: b.corner_o,
        tight: b.tight(),
        point,
        membership: point.map(|p| b.membership(&p)),
    };
    let text = match common.format {
        Format::Csv => {
            let mut s = String::from("corner,r_a,r_b,r_c\n");
            triple_csv(&mut s, "i1", &report.corner_i1);
            triple_csv(&mut s, "i2", &report.corner_i2);
            triple_csv(&mut s, "o", &report.corner_o);
            s
        }
        _ => to_json(&report),
    };
    emit(common.out.as_deref(), &text)
}

fn cmd_region(common: &Common, solver: &SolverArgs) -> Run<()> {
    reject_format(common.format, &[Format::Json, Format::Csv], "region")?;
    let n = common.block_length()?;
    let inst = read_instance(&common.instance)?;
    let ns: Vec<usize> = (1..=n).collect();
    let fc = FrontierConfig {
        max_n: n.max(FrontierConfig::default().max_n),
        ..Default::default()
    };
    let report = region_report(&inst, &ns, &ge_config(common, solver)?, &fc)?;
    let text = match common.format {
        Format::Csv => report.frontier_csv(),
        _ => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
    };
    emit(common.out.as_deref(), &text)
}

fn cmd_simulate(common: &Common, scheme: &SchemeArg, blocks: usize) -> Run<()> {
    reject_format(common.format, &[Format::Json], "simulate")?;
    let inst = read_instance(&common.instance)?;
    let s = read_scheme(&inst, &scheme.scheme)?;
    common.check_scheme_length(&s)?;
    let report = simulate(&inst, &s, blocks, common.seed)?;
    emit(common.out.as_deref(), &to_json(&report))
}

#[derive(Serialize)]
struct VerifyReport {
    #[serde(flatten)]
    verdict: ZeroErrorVerdict,
    decoders: bool,
}

fn cmd_verify(common: &Common, scheme: &SchemeArg) -> Run<()> {
    reject_format(common.format, &[Format::Json], "verify")?;
    let inst = read_instance(&common.instance)?;
    let s = read_scheme(&inst, &scheme.scheme)?;
    common.check_scheme_length(&s)?;
    let verdict = verify_zero_error(&inst, &s, DEFAULT_BLOCK_BUDGET)?;
    let decoders = match build_decoders(&inst, &s, DEFAULT_BLOCK_BUDGET) {
        Ok(_) => true,
        Err(Error::Ambiguity(_)) => false,
        Err(e) => return Err(e.into()),
    };
    let ok = verdict.zero_error && decoders;
    let message = verdict
        .violation
        .as_ref()
        .map(|(u, v)| format!("blocks {u:?} and {v:?} are confusable but share a relay color"));
    emit(
        common.out.as_deref(),
        &to_json(&VerifyReport { verdict, decoders }),
    )?;
    if ok {
        Ok(())
    } else {
        Err(Failure {
            code: 3,
            message: message.unwrap_or_else(|| "decoder tables are ambiguous".into()),
        })
    }
}

fn cmd_check_relay(common: &Common, scheme: &SchemeArg) -> Run<()> {
    reject_format(common.format, &[Format::Json], "check-relay")?;
    let inst = read_instance(&common.instance)?;
    let s = read_scheme(&inst, &scheme.scheme)?;
    common.check_scheme_length(&s)?;
    let verdict: RelayVerdict = relay_computability(&inst, &s, DEFAULT_BLOCK_BUDGET)?;
    emit(common.out.as_deref(), &to_json(&verdict))
}

fn run(cli: Cli) -> Run<()> {
    match &cli.command {
        Command::Graphs { common } => {
            if common.n.is_some() {
                return Err(usage("graphs works on single letters; drop --n"));
            }
            cmd_graphs(common)
        }
        Command::Entropy {
            kind,
            common,
            graph,
            solver,
            trace,
        } => cmd_entropy(*kind, common, *graph, solver, trace.as_deref()),
        Command::Bounds {
            common,
            solver,
            point,
        } => cmd_bounds(common, solver, *point),
        Command::Region { common, solver } => cmd_region(common, solver),
        Command::Simulate {
            common,
            scheme,
            blocks,
        } => cmd_simulate(common, scheme, *blocks),
        Command::Verify { common, scheme } => cmd_verify(common, scheme),
        Command::CheckRelay { common, scheme } => cmd_check_relay(common, scheme),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("zefc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
