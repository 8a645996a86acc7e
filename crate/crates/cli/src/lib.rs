//! Command-line front end: argument model, dispatch, JSON/CSV rendering and
//! the cross-check between admissible-weight counts and Verlinde dimensions.

use std::fs;
use std::path::PathBuf;

use bsq_core::theta::DEFAULT_EPS;
use bsq_core::verlinde::DEFAULT_PRECISION_BITS;
use bsq_core::{
    bpu_matrix, bridges, count_admissible_in, enumerate_admissible, generate_trivalent,
    trace_slice, verlinde_dim_at, Genus, GraphError, HalfFormNormalization, LabelRange, Level,
    ModularParameter, SWindow, ThetaError, TrivalentGraph, UCurveError, VerlindeError,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const PRECISION_ENV: &str = "BSQ_PRECISION";

#[derive(Debug, Parser)]
#[command(name = "bsq", version, about = "Bohr-Sommerfeld quantization toolkit")]
pub struct RunConfig {
    /// Write the document here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SU(2) Verlinde dimension with its error certificate.
    Verlinde {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        genus: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        level: u32,
    },
    /// All trivalent dual graphs of a genus, one per isomorphism class.
    Graphs {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        genus: u32,
    },
    /// Admissible weights of a level on a graph.
    Weights(WeightsArgs),
    /// Theta functions with characteristics evaluated at the k Bohr-Sommerfeld fibers.
    ThetaBasis {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        level: u32,
        /// `RE,IM` with IM > 0.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,1")]
        tau: Complex64,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Half-form normalization constant.
        #[arg(long, default_value_t = 1.0)]
        norm: f64,
    },
    /// Slice of the complex Bohr-Sommerfeld locus at fixed u.
    Ucurve(UcurveArgs),
    /// Compare admissible-weight counts with Verlinde dimensions on every graph.
    VerifyJw {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
        genus: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_level: u32,
        /// Use labels {0, ..., (k-1)/k} instead of {0, ..., 1} (negative control).
        #[arg(long)]
        half_open: bool,
    },
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    /// Graph file, or one of the built-in names `theta2`, `dumbbell2`.
    #[arg(long)]
    pub graph: String,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub level: u32,
    #[arg(long)]
    pub count_only: bool,
}

#[derive(Debug, Args)]
pub struct UcurveArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub level: u32,
    /// `RE,IM`, nonzero.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub u: Complex64,
    #[arg(long, allow_hyphen_values = true)]
    pub s_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub s_max: f64,
    #[arg(long)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RE,IM, got `{s}`"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("real part: {e}"))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|e| format!("imaginary part: {e}"))?;
    Ok(Complex64::new(re, im))
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid parameters; nothing has been emitted.
    #[error("{0}")]
    Usage(String),
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error("verlinde: {0}")]
    Verlinde(#[from] VerlindeError),
    #[error("theta: {0}")]
    Theta(#[from] ThetaError),
    #[error("ucurve: {0}")]
    UCurve(#[from] UCurveError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Graph(_) => "graph",
            CliError::Verlinde(VerlindeError::IntegralityFailure { .. }) => "integrality-failure",
            CliError::Verlinde(_) => "verlinde",
            CliError::Theta(ThetaError::TruncationFailure(_)) => "truncation-failure",
            CliError::Theta(_) => "theta",
            CliError::UCurve(_) => "ucurve",
            CliError::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// A rendered document and the exit status that goes with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: String,
    pub exit_code: i32,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verlinde { .. } => "verlinde",
            Command::Graphs { .. } => "graphs",
            Command::Weights(_) => "weights",
            Command::ThetaBasis { .. } => "theta-basis",
            Command::Ucurve(_) => "ucurve",
            Command::VerifyJw { .. } => "verify-jw",
        }
    }
}

/// Working precision for the Verlinde sum, from `BSQ_PRECISION` if set.
pub fn precision_from_env() -> Result<usize, CliError> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&bits| bits >= bsq_core::verlinde::MIN_PRECISION_BITS)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "{PRECISION_ENV}={v}: expected an integer number of bits >= {}",
                    bsq_core::verlinde::MIN_PRECISION_BITS
                ))
            }),
        Err(_) => Ok(DEFAULT_PRECISION_BITS),
    }
}

fn level(k: u32) -> Result<Level, CliError> {
    Level::new(k).map_err(|e| CliError::Usage(e.to_string()))
}

fn genus(g: u32) -> Result<Genus, CliError> {
    Genus::new(g).map_err(|e| CliError::Usage(e.to_string()))
}

/// Built-in graph name or path to a graph file.
pub fn load_graph(spec: &str) -> Result<TrivalentGraph, CliError> {
    match spec {
        "theta2" => Ok(TrivalentGraph::theta()),
        "dumbbell2" => Ok(TrivalentGraph::dumbbell()),
        path => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.to_string(),
                source,
            })?;
            Ok(text.parse()?)
        }
    }
}

fn graph_json(id: usize, g: &TrivalentGraph) -> Value {
    json!({
        "id": id,
        "vertex_count": g.vertex_count(),
        "edges": g.edges().iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        "bridges": bridges(g),
    })
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn envelope(subcommand: &str, parameters: Value, body: Value) -> Value {
    let mut doc = json!({
        "tool_version": TOOL_VERSION,
        "subcommand": subcommand,
        "parameters": parameters,
    });
    if let (Value::Object(head), Value::Object(rest)) = (&mut doc, body) {
        head.extend(rest);
    }
    doc
}

fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JwRow {
    pub graph_id: usize,
    pub level: u32,
    pub count: u64,
    pub dim: u128,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JwReport {
    pub genus: u32,
    pub max_level: u32,
    pub label_range: LabelRange,
    pub graphs: Vec<TrivalentGraph>,
    pub rows: Vec<JwRow>,
    pub all_equal: bool,
}

/// Counts admissible weights on every genus-`g` graph for `k = 1..=max_k` and
/// compares each with the Verlinde dimension.
pub fn verify_jw(
    g: Genus,
    max_k: Level,
    range: LabelRange,
    precision_bits: usize,
) -> Result<JwReport, CliError> {
    if !(2..=3).contains(&g.get()) {
        return Err(CliError::Usage(format!(
            "verify-jw supports genus 2..=3, got {g}"
        )));
    }
    let graphs = generate_trivalent(g)?;
    let mut rows = Vec::new();
    for k in 1..=max_k.get() {
        let kk = level(k)?;
        let dim = verlinde_dim_at(g, kk, precision_bits)?.dim;
        for (graph_id, graph) in graphs.iter().enumerate() {
            let count = count_admissible_in(graph, kk, range);
            rows.push(JwRow {
                graph_id,
                level: k,
                count,
                dim,
                equal: u128::from(count) == dim,
            });
        }
    }
    let all_equal = rows.iter().all(|r| r.equal);
    Ok(JwReport {
        genus: g.get(),
        max_level: max_k.get(),
        label_range: range,
        graphs,
        rows,
        all_equal,
    })
}

/// Validates, dispatches and renders one command.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let name = config.command.name();
    let ok = |doc: Value| Outcome {
        document: render(&doc),
        exit_code: 0,
    };
    match &config.command {
        Command::Verlinde { genus: g, level: k } => {
            let bits = precision_from_env()?;
            let v = verlinde_dim_at(genus(*g)?, level(*k)?, bits)?;
            let params = json!({ "genus": g, "level": k, "precision_bits": bits });
            Ok(ok(envelope(
                name,
                params,
                json!({
                    "genus": g,
                    "level": k,
                    "dim": v.dim,
                    "raw_sum": v.raw_sum,
                    "error_bound": v.error_bound,
                }),
            )))
        }
        Command::Graphs { genus: g } => {
            let graphs = generate_trivalent(genus(*g)?)?;
            let list: Vec<Value> = graphs
                .iter()
                .enumerate()
                .map(|(i, h)| graph_json(i, h))
                .collect();
            Ok(ok(envelope(
                name,
                json!({ "genus": g }),
                json!({ "count": list.len(), "graphs": list }),
            )))
        }
        Command::Weights(args) => {
            let k = level(args.level)?;
            let graph = load_graph(&args.graph)?;
            let params =
                json!({ "graph": args.graph, "level": args.level, "count_only": args.count_only });
            let mut body = json!({ "graph": graph_json(0, &graph), "level": args.level });
            if args.count_only {
                body["count"] = json!(bsq_core::count_admissible(&graph, k));
            } else {
                let ws = enumerate_admissible(&graph, k);
                body["count"] = json!(ws.len());
                body["weights"] = json!(ws.iter().map(|w| w.numerators()).collect::<Vec<_>>());
            }
            Ok(ok(envelope(name, params, body)))
        }
        Command::ThetaBasis {
            level: k,
            tau,
            eps,
            norm,
        } => {
            let kk = level(*k)?;
            let tau_p = ModularParameter::new(*tau).map_err(|e| CliError::Usage(e.to_string()))?;
            if !(*eps > 0.0 && eps.is_finite()) {
                return Err(CliError::Usage(format!(
                    "--eps must be positive, got {eps}"
                )));
            }
            let norm_p =
                HalfFormNormalization::new(*norm).map_err(|e| CliError::Usage(e.to_string()))?;
            let m = bpu_matrix(kk, tau_p, *eps, norm_p)?;
            let n = m.size();
            let entries: Vec<Vec<Value>> = (0..n)
                .map(|w| (0..n).map(|j| complex_json(m.entries[(w, j)])).collect())
                .collect();
            let params = json!({ "level": k, "tau": complex_json(*tau), "eps": eps, "norm": norm });
            Ok(ok(envelope(
                name,
                params,
                json!({
                    "level": k,
                    "bs_points": (0..*k).map(|j| f64::from(j) / f64::from(*k)).collect::<Vec<_>>(),
                    "entries": entries,
                    "det_modulus": m.determinant().norm(),
                    "singular_values": m.singular_values(),
                    "smallest_singular_value": m.smallest_singular_value(),
                }),
            )))
        }
        Command::Ucurve(args) => {
            let kk = level(args.level)?;
            let window =
                SWindow::new(args.s_min, args.s_max).map_err(|e| CliError::Usage(e.to_string()))?;
            if args.u.norm() == 0.0 {
                return Err(CliError::Usage("--u must be nonzero".into()));
            }
            if args.grid < 2 {
                return Err(CliError::Usage(format!(
                    "--grid must be at least 2, got {}",
                    args.grid
                )));
            }
            if !(args.tol > 0.0 && args.tol.is_finite()) {
                return Err(CliError::Usage(format!(
                    "--tol must be positive, got {}",
                    args.tol
                )));
            }
            let slice = trace_slice(kk, args.u, window, args.grid, args.tol)?;
            match args.format {
                Format::Csv => {
                    let mut out = String::from("b,re_s,im_s,m\n");
                    for p in &slice.points {
                        out.push_str(&format!("{},{},{},{}\n", p.b, p.s.re, p.s.im, p.m));
                    }
                    Ok(Outcome {
                        document: out,
                        exit_code: 0,
                    })
                }
                Format::Json => {
                    let points: Vec<Value> = slice
                        .points
                        .iter()
                        .map(|p| {
                            json!({
                                "b": p.b,
                                "s": complex_json(p.s),
                                "m": p.m,
                                "residual": p.residual(kk),
                            })
                        })
                        .collect();
                    let params = json!({
                        "level": args.level,
                        "u": complex_json(args.u),
                        "s_min": args.s_min,
                        "s_max": args.s_max,
                        "grid": args.grid,
                        "tol": args.tol,
                    });
                    Ok(ok(envelope(
                        name,
                        params,
                        json!({ "u": complex_json(slice.u), "points": points, "failures": slice.failures }),
                    )))
                }
            }
        }
        Command::VerifyJw {
            genus: g,
            max_level,
            half_open,
        } => {
            let bits = precision_from_env()?;
            let range = if *half_open {
                LabelRange::HalfOpen
            } else {
                LabelRange::Closed
            };
            let report = verify_jw(genus(*g)?, level(*max_level)?, range, bits)?;
            let params = json!({
                "genus": g,
                "max_level": max_level,
                "label_range": range,
                "precision_bits": bits,
            });
            let graphs: Vec<Value> = report
                .graphs
                .iter()
                .enumerate()
                .map(|(i, h)| graph_json(i, h))
                .collect();
            let body =
                json!({ "graphs": graphs, "rows": report.rows, "all_equal": report.all_equal });
            Ok(Outcome {
                document: render(&envelope(name, params, body)),
                exit_code: if report.all_equal { 0 } else { 1 },
            })
        }
    }
}

/// JSON error object written to standard error.
pub fn error_document(subcommand: Option<&str>, err: &CliError) -> String {
    render(&json!({
        "tool_version": TOOL_VERSION,
        "subcommand": subcommand,
        "error": { "kind": err.kind(), "message": err.to_string() },
    }))
}
