use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use graceful_core::construct::{
    attach_at_vertices, chain_join_km, chain_join_p4, chain_with_copies, disjoint_union_alpha, double, merge_join_chain, star_join,
    AttachMode, Certificate, ChainMode, ConstructError,
};
use graceful_core::format::{parse_edge_list, parse_labeling, parse_matrix, parse_moves, to_dot, write_edge_list, write_labeling, write_matrix};
use graceful_core::graph::Graph;
use graceful_core::labeling::{verify, verify_alpha, LabelKind, Labeling};
use graceful_core::lobster::{
    classify_lobster, label_by_search, label_caterpillar, label_lobster_auto, label_pairwise_balanced, label_pairwise_linked,
    label_pairwise_similar, label_balanced_lobster, AutoOutcome, BalancedLobsterSpec, LobsterCertificate, PipelineError, Route,
};
use graceful_core::matrix::{canonical_adjacency, canonical_biadjacency, matrix_to_graph, shift_ones, transform, LabeledMatrix, Transform};
use graceful_core::search::{brute_force_alpha, brute_force_graceful, count_graceful_labelings, SearchBudget, SearchOutcome};
use graceful_core::structure::{classify_tree, lobster_decompose, TreeClass};

#[derive(Parser)]
#[command(name = "graceful", version, about = "Graceful and alpha labelings of trees via box-value matrices")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a labeling against a graph.
    Verify {
        graph: PathBuf,
        labeling: PathBuf,
        /// Require an alpha-labeling.
        #[arg(long)]
        alpha: bool,
    },
    /// Tree class, spinal parities and lobster class flags.
    Classify { graph: PathBuf },
    /// Label a lobster with one of the constructive routes.
    Label {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: Strategy,
        /// Write graph, labeling and matrix files here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest tree the search route will try.
        #[arg(long)]
        max_vertices: Option<usize>,
    },
    /// Run one matrix construction on labeled inputs.
    Construct {
        #[arg(value_enum)]
        proposition: Proposition,
        /// `graph:labeling` file pairs; for attach the first is the host.
        #[arg(long, num_args = 0..)]
        inputs: Vec<String>,
        /// Label at which to double.
        #[arg(long)]
        at: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Leaf counts for balanced-lobster, comma separated.
        #[arg(long, value_delimiter = ',')]
        x: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        y: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        s1: usize,
        #[arg(long, default_value_t = 0)]
        s2: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the canonical matrix of a labeled graph.
    Matrix {
        graph: PathBuf,
        labeling: PathBuf,
        #[arg(long)]
        biadjacency: bool,
        #[arg(long, value_enum)]
        transform: Option<Orientation>,
    },
    /// Move 1s in a biadjacency matrix and classify the resulting tree.
    Shift { matrix: PathBuf, moves: PathBuf },
    /// Exhaustive labeling search.
    Search {
        graph: PathBuf,
        #[arg(long)]
        alpha: bool,
        /// Count graceful labelings instead of finding one.
        #[arg(long)]
        count: bool,
        #[arg(long)]
        budget_nodes: Option<u64>,
        #[arg(long)]
        budget_secs: Option<f64>,
        #[arg(long)]
        max_vertices: Option<usize>,
    },
    /// Graphviz DOT, with captions when a labeling is given.
    ExportDot { graph: PathBuf, labeling: Option<PathBuf> },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Auto,
    Caterpillar,
    Balanced,
    Linked,
    Similar,
    Search,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Proposition {
    Double,
    DisjointUnion,
    ChainKm,
    ChainAlternating,
    ChainAllM,
    ChainCopies,
    StarJoin,
    Attach,
    MergeJoin,
    BalancedLobster,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Strict,
    Relaxed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Orientation {
    #[value(name = "R")]
    R,
    #[value(name = "T")]
    T,
    #[value(name = "RT")]
    Rt,
}

/// A failed command: exit 1 for a negative answer, 2 for bad input, 3 for
/// a verification failure.
enum Fail {
    Negative(String),
    Usage(String),
    Verification(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Negative(_) => 1,
            Fail::Usage(_) => 2,
            Fail::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Negative(m) | Fail::Usage(m) | Fail::Verification(m) => m,
        }
    }
}

/// What a successful command prints, in both formats.
struct Report {
    text: String,
    json: Value,
}

type Outcome = Result<Report, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Fail> {
    parse_edge_list(&read(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load_labeling(path: &Path) -> Result<Labeling, Fail> {
    parse_labeling(&read(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<LabeledMatrix, Fail> {
    parse_matrix(&read(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn budget(nodes: Option<u64>, secs: Option<f64>, max_vertices: Option<usize>) -> Result<SearchBudget, Fail> {
    let mut b = SearchBudget::default();
    let env_secs = match std::env::var("GRACEFUL_BUDGET_SECS") {
        Ok(s) => Some(s.trim().parse::<f64>().map_err(|_| Fail::Usage(format!("GRACEFUL_BUDGET_SECS is not a number: {s:?}")))?),
        Err(_) => None,
    };
    let usage = |e: graceful_core::search::SearchError| Fail::Usage(e.to_string());
    if let Some(s) = secs.or(env_secs) {
        if !(s.is_finite() && s > 0.0) {
            return Err(Fail::Usage(format!("time budget must be positive, got {s}")));
        }
        b = b.with_time_limit(Duration::from_secs_f64(s)).map_err(usage)?;
    }
    if let Some(n) = nodes {
        b = b.with_max_nodes(n).map_err(usage)?;
    }
    if let Some(v) = max_vertices {
        b = b.with_max_vertices(v).map_err(usage)?;
    }
    Ok(b)
}

fn labeling_json(f: &Labeling) -> Value {
    json!({ "kind": f.kind().to_string(), "critical": f.critical(), "labels": f.labels() })
}

fn cmd_verify(graph: &Path, labeling: &Path, alpha: bool) -> Outcome {
    let g = load_graph(graph)?;
    let f = load_labeling(labeling)?;
    let verdict = if alpha { verify_alpha(&g, &f) } else { verify(&g, &f) };
    match verdict.failure {
        None => {
            let text = match verdict.critical {
                Some(k) => format!("ok: alpha-labeling, critical number {k}\n"),
                None => "ok: graceful labeling\n".to_string(),
            };
            Ok(Report {
                text,
                json: json!({ "ok": true, "critical": verdict.critical }),
            })
        }
        Some(failure) => Err(Fail::Negative(format!("not {}: {failure}", if alpha { "an alpha-labeling" } else { "graceful" }))),
    }
}

fn class_line(g: &Graph) -> Result<(String, Value), Fail> {
    let class = classify_tree(g).map_err(|e| Fail::Negative(e.to_string()))?;
    if class == TreeClass::Deeper {
        return Ok(("deeper than a lobster\n".into(), json!({ "tree_class": class })));
    }
    let l = lobster_decompose(g).map_err(|e| Fail::Negative(e.to_string()))?;
    let c = classify_lobster(&l);
    let flags = c.flags();
    let name = match class {
        TreeClass::SingleVertex => "single vertex",
        TreeClass::Path => "path",
        TreeClass::Caterpillar => "caterpillar",
        _ => "lobster",
    };
    let text = if flags.is_empty() {
        format!("{name}; no class flags\n")
    } else {
        format!("{name}; flags: {}\n", flags.join(", "))
    };
    Ok((
        text,
        json!({ "tree_class": class, "spine": l.spine, "classification": c }),
    ))
}

fn cmd_classify(graph: &Path) -> Outcome {
    let g = load_graph(graph)?;
    let (mut text, json) = class_line(&g)?;
    if let Ok(l) = lobster_decompose(&g) {
        let c = classify_lobster(&l);
        let _ = writeln!(text, "spine: {}", l.spine.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
        let parities: Vec<String> = c.parity.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(text, "parity: {}", parities.join(" "));
    }
    Ok(Report { text, json })
}

fn write_cert_dir(out: &Path, g: &Graph, f: &Labeling, m: &LabeledMatrix) -> Result<(), Fail> {
    let io = |e: std::io::Error| Fail::Usage(format!("{}: {e}", out.display()));
    std::fs::create_dir_all(out).map_err(io)?;
    std::fs::write(out.join("graph.edges"), write_edge_list(g)).map_err(io)?;
    std::fs::write(out.join("labeling.labels"), write_labeling(f)).map_err(io)?;
    std::fs::write(out.join("matrix.matrix"), write_matrix(m)).map_err(io)?;
    Ok(())
}

fn pipeline_fail(e: PipelineError) -> Fail {
    match e {
        PipelineError::Verification(_) | PipelineError::Structure(_) => Fail::Verification(e.to_string()),
        _ => Fail::Negative(e.to_string()),
    }
}

fn lobster_report(cert: &LobsterCertificate, out: Option<&Path>) -> Outcome {
    if let Some(dir) = out {
        write_cert_dir(dir, &cert.graph, &cert.labeling, &cert.matrix)?;
    }
    let mut text = format!("route: {}\n", cert.route);
    text.push_str(&write_labeling(&cert.labeling));
    Ok(Report {
        text,
        json: json!({
            "route": cert.route,
            "constructions": cert.constructions.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "labeling": labeling_json(&cert.labeling),
            "matrix": write_matrix(&cert.matrix),
        }),
    })
}

fn cmd_label(graph: &Path, strategy: Strategy, out: Option<&Path>, max_vertices: Option<usize>) -> Outcome {
    let t = load_graph(graph)?;
    let b = budget(None, None, max_vertices)?;
    let lobster = || lobster_decompose(&t).map_err(|e| Fail::Negative(e.to_string()));
    let cert = match strategy {
        Strategy::Auto => match label_lobster_auto(&t, b).map_err(pipeline_fail)? {
            AutoOutcome::Labeled(cert) => cert,
            AutoOutcome::NotCovered(report) => {
                let mut msg = String::from("no route labeled the tree:");
                for (route, why) in &report.attempts {
                    let _ = write!(msg, "\n  {route}: {why}");
                }
                let _ = write!(msg, "\n  search: {}", serde_json::to_string(&report.search).unwrap_or_default());
                return Err(Fail::Negative(msg));
            }
        },
        Strategy::Caterpillar => {
            let f = label_caterpillar(&t).map_err(pipeline_fail)?;
            let m = canonical_biadjacency(&t, &f).map_err(|e| Fail::Verification(e.to_string()))?;
            LobsterCertificate {
                route: Route::Caterpillar,
                constructions: Vec::new(),
                graph: t.clone(),
                labeling: f,
                matrix: m,
            }
        }
        Strategy::Balanced => label_pairwise_balanced(&lobster()?).map_err(pipeline_fail)?,
        Strategy::Linked => label_pairwise_linked(&lobster()?).map_err(pipeline_fail)?,
        Strategy::Similar => label_pairwise_similar(&lobster()?).map_err(pipeline_fail)?,
        Strategy::Search => match label_by_search(&t, b).map_err(pipeline_fail)? {
            Ok(cert) => cert,
            Err(status) => return Err(Fail::Negative(format!("search: {}", serde_json::to_string(&status).unwrap_or_default()))),
        },
    };
    cert.check().map_err(|e| Fail::Verification(e.to_string()))?;
    lobster_report(&cert, out)
}

fn construct_fail(e: ConstructError) -> Fail {
    match e {
        ConstructError::Verification(_) | ConstructError::Structure(_) => Fail::Verification(e.to_string()),
        _ => Fail::Negative(e.to_string()),
    }
}

fn load_inputs(inputs: &[String]) -> Result<Vec<(Graph, Labeling)>, Fail> {
    inputs
        .iter()
        .map(|pair| {
            let (g, f) = pair
                .rsplit_once(':')
                .ok_or_else(|| Fail::Usage(format!("input {pair:?} is not of the form graph:labeling")))?;
            Ok((load_graph(Path::new(g))?, load_labeling(Path::new(f))?))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_construct(
    proposition: Proposition,
    inputs: &[String],
    at: Option<usize>,
    mode: Option<Mode>,
    x: Vec<usize>,
    y: Vec<usize>,
    s1: usize,
    s2: usize,
    out: Option<&Path>,
) -> Outcome {
    let parts = load_inputs(inputs)?;
    let cert: Certificate = match proposition {
        Proposition::BalancedLobster => {
            if !parts.is_empty() {
                return Err(Fail::Usage("balanced-lobster takes --x/--y/--s1/--s2, not inputs".into()));
            }
            let spec = BalancedLobsterSpec::new(x, y, s1, s2);
            label_balanced_lobster(&spec).map_err(pipeline_fail)?
        }
        Proposition::Double => {
            let [(g, f)] = parts.as_slice() else {
                return Err(Fail::Usage("double takes exactly one input".into()));
            };
            let j = at.ok_or_else(|| Fail::Usage("double needs --at".into()))?;
            double(g, f, j).map_err(construct_fail)?
        }
        Proposition::DisjointUnion => disjoint_union_alpha(&parts).map_err(construct_fail)?,
        Proposition::ChainKm => chain_join_km(&parts).map_err(construct_fail)?,
        Proposition::ChainAlternating => chain_join_p4(&parts, ChainMode::Alternating).map_err(construct_fail)?,
        Proposition::ChainAllM => chain_join_p4(&parts, ChainMode::AllM).map_err(construct_fail)?,
        Proposition::ChainCopies => chain_with_copies(&parts).map_err(construct_fail)?,
        Proposition::StarJoin => star_join(&parts).map_err(construct_fail)?,
        Proposition::MergeJoin => merge_join_chain(&parts).map_err(construct_fail)?,
        Proposition::Attach => {
            let Some((host, rest)) = parts.split_first() else {
                return Err(Fail::Usage("attach needs a host input".into()));
            };
            let mode = match mode.unwrap_or(Mode::Strict) {
                Mode::Strict => AttachMode::Strict,
                Mode::Relaxed => AttachMode::Relaxed,
            };
            attach_at_vertices(host, rest, mode).map_err(construct_fail)?
        }
    };
    cert.check().map_err(|e| Fail::Verification(e.to_string()))?;
    if let Some(dir) = out {
        write_cert_dir(dir, &cert.graph, &cert.labeling, &cert.matrix)?;
    }
    let mut text = format!(
        "{}: {} vertices, {} edges, {}\n",
        cert.construction,
        cert.graph.num_vertices(),
        cert.graph.num_edges(),
        match cert.critical() {
            Some(k) => format!("alpha with critical number {k}"),
            None => "graceful".into(),
        }
    );
    text.push_str(&write_matrix(&cert.matrix));
    Ok(Report {
        text,
        json: json!({
            "construction": cert.construction.to_string(),
            "parameters": cert.parameters,
            "vertices": cert.graph.num_vertices(),
            "edges": cert.graph.num_edges(),
            "complete": cert.is_complete(),
            "labeling": labeling_json(&cert.labeling),
            "matrix": write_matrix(&cert.matrix),
        }),
    })
}

fn matrix_report(m: &LabeledMatrix) -> Report {
    let text = write_matrix(m);
    Report {
        json: json!({ "matrix": text }),
        text,
    }
}

fn cmd_matrix(graph: &Path, labeling: &Path, biadjacency: bool, orientation: Option<Orientation>) -> Outcome {
    let g = load_graph(graph)?;
    let f = load_labeling(labeling)?;
    let (verdict, m) = if biadjacency || orientation.is_some() {
        let f = match f.kind() {
            LabelKind::Alpha => f,
            LabelKind::Beta => return Err(Fail::Verification("a biadjacency matrix needs an alpha-labeling".into())),
        };
        (verify_alpha(&g, &f), canonical_biadjacency(&g, &f))
    } else {
        (verify(&g, &f), canonical_adjacency(&g, &f))
    };
    if let Some(failure) = verdict.failure {
        return Err(Fail::Verification(failure.to_string()));
    }
    let mut m = m.map_err(|e| Fail::Verification(e.to_string()))?;
    if let Some(o) = orientation {
        let which = match o {
            Orientation::R => Transform::R,
            Orientation::T => Transform::T,
            Orientation::Rt => Transform::RT,
        };
        m = transform(&m, which).map_err(|e| Fail::Verification(e.to_string()))?;
    }
    Ok(matrix_report(&m))
}

fn cmd_shift(matrix: &Path, moves: &Path) -> Outcome {
    let m = load_matrix(matrix)?;
    let moves = parse_moves(&read(moves)?).map_err(|e| Fail::Usage(format!("{}: {e}", moves.display())))?;
    let shifted = shift_ones(&m, &moves, true).map_err(|e| Fail::Negative(e.to_string()))?;
    let (t, _) = matrix_to_graph(&shifted).map_err(|e| Fail::Verification(e.to_string()))?;
    let (line, class) = class_line(&t)?;
    let mut report = matrix_report(&shifted);
    report.text.push_str(&line);
    report.json["class"] = class;
    Ok(report)
}

fn cmd_search(graph: &Path, alpha: bool, count: bool, b: SearchBudget) -> Outcome {
    let g = load_graph(graph)?;
    if count {
        let n = count_graceful_labelings(&g, b).map_err(|e| Fail::Negative(e.to_string()))?;
        return Ok(Report {
            text: format!("{n}\n"),
            json: json!({ "count": n }),
        });
    }
    let outcome = if alpha { brute_force_alpha(&g, b) } else { brute_force_graceful(&g, b) };
    match outcome {
        SearchOutcome::Found(f) => Ok(Report {
            text: write_labeling(&f),
            json: json!({ "found": true, "labeling": labeling_json(&f) }),
        }),
        SearchOutcome::Exhausted => Err(Fail::Negative(format!("no {} labeling exists", if alpha { "alpha" } else { "graceful" }))),
        SearchOutcome::BudgetExceeded(limit) => Err(Fail::Negative(format!("search stopped: {limit}"))),
    }
}

fn cmd_export_dot(graph: &Path, labeling: Option<&Path>) -> Outcome {
    let g = load_graph(graph)?;
    let f = labeling.map(load_labeling).transpose()?;
    if let Some(f) = &f {
        if f.len() != g.num_vertices() {
            return Err(Fail::Usage(format!("labeling has {} entries for {} vertices", f.len(), g.num_vertices())));
        }
    }
    let text = to_dot(&g, f.as_ref());
    Ok(Report {
        json: json!({ "dot": text }),
        text,
    })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Verify { graph, labeling, alpha } => cmd_verify(&graph, &labeling, alpha),
        Command::Classify { graph } => cmd_classify(&graph),
        Command::Label {
            graph,
            strategy,
            out,
            max_vertices,
        } => cmd_label(&graph, strategy, out.as_deref(), max_vertices),
        Command::Construct {
            proposition,
            inputs,
            at,
            mode,
            x,
            y,
            s1,
            s2,
            out,
        } => cmd_construct(proposition, &inputs, at, mode, x, y, s1, s2, out.as_deref()),
        Command::Matrix {
            graph,
            labeling,
            biadjacency,
            transform,
        } => cmd_matrix(&graph, &labeling, biadjacency, transform),
        Command::Shift { matrix, moves } => cmd_shift(&matrix, &moves),
        Command::Search {
            graph,
            alpha,
            count,
            budget_nodes,
            budget_secs,
            max_vertices,
        } => cmd_search(&graph, alpha, count, budget(budget_nodes, budget_secs, max_vertices)?),
        Command::ExportDot { graph, labeling } => cmd_export_dot(&graph, labeling.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(report) => {
            match format {
                Format::Text => print!("{}", report.text),
                Format::Json => println!("{}", report.json),
            }
            ExitCode::SUCCESS
        }
        Err(fail) => {
            match format {
                Format::Text => eprintln!("error: {}", fail.message()),
                Format::Json => println!("{}", json!({ "error": fail.message(), "exit_code": fail.code() })),
            }
            ExitCode::from(fail.code())
        }
    }
}
