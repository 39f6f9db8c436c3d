//! Command-line front end: decode message demands, compute target functions,
//! predict and instrument operation counts, and dump the built-in corpus.
//!
//! Exit codes: 0 success, 1 parse/validation error, 2 not decodable,
//! 3 inconsistent received data, 4 oracle mismatch.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use netsp::decode::assignment_map;
use netsp::{
    analyze, brute_force_compute, brute_force_decode, compute_function_with, corpus, decode_with,
    parse_instance, parse_received, serialize_instance, DecodeError, DecodeMode, DecodeOptions,
    NetworkCodeInstance, OpCount, ReceivedVector, TreeOverride,
};

#[derive(Parser)]
#[command(name = "netsp", version, about = "Sum-product decoding of network codes at sink nodes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover a sink's demanded messages from received edge data
    Decode(DecodeArgs),
    /// Compute a sink's target function from received edge data
    Compute(ComputeArgs),
    /// Predict operation counts in closed form and instrument the schedules
    Analyze(AnalyzeArgs),
    /// Write built-in fixture documents to files
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Instance document path, or a built-in fixture name
    /// (butterfly, n3-sink43, example3-majority, random-tree-<seed>)
    #[arg(long)]
    instance: String,
    /// Sink id within the instance
    #[arg(long)]
    sink: String,
    /// Spanning-tree override document path (overrides any bundled tree)
    #[arg(long)]
    tree_override: Option<PathBuf>,
    /// Root node label, e.g. "x3" or an edge id (overrides any bundled root)
    #[arg(long)]
    root: Option<String>,
    /// Output style
    #[arg(long, value_enum, default_value_t = Output::Human)]
    output: Output,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Received document path, or inline JSON ({"edge": "symbol", ...})
    #[arg(long)]
    received: String,
    /// Decoding schedule
    #[arg(long, value_enum, default_value_t = Mode::Traceback)]
    mode: Mode,
    /// Append the closed-form count report
    #[arg(long)]
    count_ops: bool,
    /// Check the result against brute-force enumeration
    #[arg(long)]
    verify_oracle: bool,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Received document path, or inline JSON ({"edge": "symbol", ...})
    #[arg(long)]
    received: String,
    /// Append the closed-form count report
    #[arg(long)]
    count_ops: bool,
    /// Check the result against brute-force enumeration
    #[arg(long)]
    verify_oracle: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Received document; counts are received-independent for decoding, so
    /// one is synthesized from the all-zero message vector when omitted
    #[arg(long)]
    received: Option<String>,
}

#[derive(Args)]
struct CorpusArgs {
    /// Fixture name, or "all"
    #[arg(long, default_value = "all")]
    name: String,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Traceback,
    MultipleVertex,
    AllVertex,
}

impl From<Mode> for DecodeMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Traceback => DecodeMode::SingleVertexTraceback,
            Mode::MultipleVertex => DecodeMode::MultipleVertex,
            Mode::AllVertex => DecodeMode::AllVertex,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Human,
    Machine,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

fn decode_failure(err: DecodeError) -> Failure {
    let code = match &err {
        DecodeError::NotDecodable { .. } => 2,
        DecodeError::Inconsistent { .. } => 3,
        _ => 1,
    };
    Failure::new(code, err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decode(args) => run_decode(args),
        Command::Compute(args) => run_compute(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Corpus(args) => run_corpus(args),
    };
    match result {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

/// Instance plus any schedule choices bundled with a fixture.
struct Loaded {
    instance: NetworkCodeInstance,
    options: DecodeOptions,
}

fn load_instance(common: &CommonArgs) -> Result<Loaded, Failure> {
    let path = Path::new(&common.instance);
    let (text, mut options) = if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| Failure::new(1, e.to_string()))?;
        (text, DecodeOptions::default())
    } else {
        match corpus::fixture(&common.instance) {
            Ok(fixture) => (
                fixture.instance_text,
                DecodeOptions {
                    tree_override: fixture.tree_override,
                    root_label: fixture.root_label,
                },
            ),
            Err(_) => {
                return Err(Failure::new(
                    1,
                    format!("{:?} is neither a readable file nor a fixture name", common.instance),
                ))
            }
        }
    };
    let instance = parse_instance(&text).map_err(|e| Failure::new(1, e.to_string()))?;
    if let Some(override_path) = &common.tree_override {
        let text =
            fs::read_to_string(override_path).map_err(|e| Failure::new(1, e.to_string()))?;
        options.tree_override = Some(parse_tree_override(&text)?);
    }
    if common.root.is_some() {
        options.root_label = common.root.clone();
    }
    Ok(Loaded { instance, options })
}

fn parse_tree_override(text: &str) -> Result<TreeOverride, Failure> {
    let value: Value = serde_json::from_str(text).map_err(|e| Failure::new(1, e.to_string()))?;
    let entries = value
        .get("remove")
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::new(1, "tree override must be {\"remove\": [...]}"))?;
    let mut remove = Vec::new();
    for entry in entries {
        let var = entry.get("variable").and_then(Value::as_u64);
        let edge = entry.get("edge").and_then(Value::as_str);
        match (var, edge) {
            (Some(v), Some(e)) => remove.push((v as u32, e.to_string())),
            _ => {
                return Err(Failure::new(
                    1,
                    "each removal must be {\"variable\": <index>, \"edge\": \"<id>\"}",
                ))
            }
        }
    }
    Ok(TreeOverride { remove })
}

fn load_received(
    inst: &NetworkCodeInstance,
    sink: &str,
    arg: &str,
) -> Result<ReceivedVector, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::new(1, e.to_string()))?
    };
    // accept either a full {sink, values} document or a bare values object
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::new(1, e.to_string()))?;
    let document = if value.get("values").is_some() {
        text
    } else {
        serde_json::json!({ "sink": sink, "values": value }).to_string()
    };
    let rv = parse_received(inst, &document).map_err(|e| Failure::new(1, e.to_string()))?;
    if rv.sink_id != sink {
        return Err(Failure::new(
            1,
            format!("received data addressed to sink {:?}, expected {sink:?}", rv.sink_id),
        ));
    }
    Ok(rv)
}

fn ops_lines(out: &mut String, ops: OpCount, machine: bool) {
    // the headline OR column folds support-scan comparisons in, since a scan
    // and an OR accumulation are the same pass over a table
    if machine {
        let _ = writeln!(out, "ops.total={}", ops.total());
        let _ = writeln!(out, "ops.and={}", ops.and_ops);
        let _ = writeln!(out, "ops.or={}", ops.or_ops + ops.cmp_ops);
        let _ = writeln!(out, "ops.or_only={}", ops.or_ops);
        let _ = writeln!(out, "ops.cmp_only={}", ops.cmp_ops);
    } else {
        let _ = writeln!(
            out,
            "ops: total={} and={} or={} (or {} + cmp {})",
            ops.total(),
            ops.and_ops,
            ops.or_ops + ops.cmp_ops,
            ops.or_ops,
            ops.cmp_ops
        );
    }
}

fn run_decode(args: DecodeArgs) -> Result<String, Failure> {
    let loaded = load_instance(&args.common)?;
    let rv = load_received(&loaded.instance, &args.common.sink, &args.received)?;
    let mode: DecodeMode = args.mode.into();
    let result = decode_with(&loaded.instance, &args.common.sink, &rv, mode, &loaded.options)
        .map_err(decode_failure)?;

    let machine = args.common.output == Output::Machine;
    let mut out = String::new();
    let alphabet = &loaded.instance.alphabet;
    if machine {
        let _ = writeln!(out, "sink={}", result.sink_id);
        let _ = writeln!(out, "mode={}", result.mode.as_str());
        for (v, s) in assignment_map(&result) {
            let _ = writeln!(out, "x.{v}={}", alphabet.name(s));
        }
    } else {
        let _ = writeln!(out, "sink={} mode={}", result.sink_id, result.mode.as_str());
        let _ = writeln!(out, "{}", result.assignment.as_ref().unwrap().display(alphabet));
    }
    ops_lines(&mut out, result.ops, machine);

    if args.verify_oracle {
        let expected = brute_force_decode(&loaded.instance, &args.common.sink, &rv)
            .map_err(|e| Failure::new(1, e.to_string()))?;
        let got: Vec<u32> = assignment_map(&result).values().copied().collect();
        let matches = expected.len() == 1 && expected.contains(&got);
        let _ = writeln!(out, "oracle.match={matches}");
        if !matches {
            print!("{out}");
            return Err(Failure::new(4, "decode result disagrees with the brute-force oracle"));
        }
    }
    if args.count_ops {
        out.push_str(&count_report(&result, mode, machine)?);
    }
    Ok(out)
}

fn count_report(
    result: &netsp::DecodeResult,
    mode: DecodeMode,
    machine: bool,
) -> Result<String, Failure> {
    let root = result.visited.first().copied().unwrap_or(0);
    let mut report =
        analyze::predict(&result.graph, root).map_err(|e| Failure::new(1, e.to_string()))?;
    report.instrumented.push((mode.as_str().to_string(), result.ops));
    Ok(analyze::render_report(&result.graph, &report, machine))
}

fn run_compute(args: ComputeArgs) -> Result<String, Failure> {
    let loaded = load_instance(&args.common)?;
    let rv = load_received(&loaded.instance, &args.common.sink, &args.received)?;
    let result = compute_function_with(&loaded.instance, &args.common.sink, &rv, &loaded.options)
        .map_err(decode_failure)?;

    let machine = args.common.output == Output::Machine;
    let mut out = String::new();
    let value = result.function_value.unwrap();
    let alphabet = &loaded.instance.alphabet;
    if machine {
        let _ = writeln!(out, "sink={}", result.sink_id);
        let _ = writeln!(out, "function.value={}", alphabet.name(value));
    } else {
        let _ = writeln!(out, "sink={}", result.sink_id);
        let _ = writeln!(out, "g={}", alphabet.name(value));
    }
    ops_lines(&mut out, result.ops, machine);

    if args.verify_oracle {
        let expected = brute_force_compute(&loaded.instance, &args.common.sink, &rv)
            .map_err(|e| Failure::new(1, e.to_string()))?;
        let matches = expected.len() == 1 && expected.contains(&value);
        let _ = writeln!(out, "oracle.match={matches}");
        if !matches {
            print!("{out}");
            return Err(Failure::new(
                4,
                "computed value disagrees with the brute-force oracle (or the code is invalid)",
            ));
        }
    }
    if args.count_ops {
        out.push_str(&count_report(&result, DecodeMode::SingleVertexTraceback, machine)?);
    }
    Ok(out)
}

fn run_analyze(args: AnalyzeArgs) -> Result<String, Failure> {
    let loaded = load_instance(&args.common)?;
    let sink = loaded
        .instance
        .sink(&args.common.sink)
        .map_err(|e| Failure::new(1, e.to_string()))?;
    let is_function = matches!(sink.demand, netsp::Demand::Function { .. });
    let rv = match &args.received {
        Some(arg) => load_received(&loaded.instance, &args.common.sink, arg)?,
        None => {
            let zero = netsp::Assignment::from_total(&vec![0; loaded.instance.omega as usize]);
            netsp::evaluate_received(&loaded.instance, &args.common.sink, &zero)
                .map_err(|e| Failure::new(1, e.to_string()))?
        }
    };

    let machine = args.common.output == Output::Machine;
    let (graph, root, instrumented) = if is_function {
        let result =
            compute_function_with(&loaded.instance, &args.common.sink, &rv, &loaded.options)
                .map_err(decode_failure)?;
        let root = result.visited[0];
        (result.graph, root, vec![("function".to_string(), result.ops)])
    } else {
        let mut instrumented = Vec::new();
        let mut graph_root = None;
        for mode in
            [DecodeMode::SingleVertexTraceback, DecodeMode::MultipleVertex, DecodeMode::AllVertex]
        {
            let result =
                decode_with(&loaded.instance, &args.common.sink, &rv, mode, &loaded.options)
                    .map_err(decode_failure)?;
            instrumented.push((mode.as_str().to_string(), result.ops));
            if graph_root.is_none() {
                let root = result.visited.first().copied().unwrap_or(0);
                graph_root = Some((result.graph, root));
            }
        }
        let (graph, root) = graph_root.unwrap();
        (graph, root, instrumented)
    };

    let mut report =
        analyze::predict(&graph, root).map_err(|e| Failure::new(1, e.to_string()))?;
    report.instrumented = instrumented;
    let mut out = String::new();
    if !machine {
        let _ = writeln!(out, "sink={}", args.common.sink);
    }
    out.push_str(&analyze::render_report(&graph, &report, machine));
    Ok(out)
}

fn run_corpus(args: CorpusArgs) -> Result<String, Failure> {
    let names: Vec<String> = if args.name == "all" {
        corpus::FIXTURE_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        vec![args.name.clone()]
    };
    fs::create_dir_all(&args.out).map_err(|e| Failure::new(1, e.to_string()))?;
    let mut out = String::new();
    for name in names {
        let fixture = corpus::fixture(&name).map_err(|e| Failure::new(1, e.to_string()))?;
        let instance =
            parse_instance(&fixture.instance_text).map_err(|e| Failure::new(1, e.to_string()))?;
        let instance_path = args.out.join(format!("{name}.instance.json"));
        fs::write(&instance_path, serialize_instance(&instance))
            .map_err(|e| Failure::new(1, e.to_string()))?;
        let _ = writeln!(out, "wrote {}", instance_path.display());
        if let Some(tree) = &fixture.tree_override {
            let removals: Vec<BTreeMap<&str, Value>> = tree
                .remove
                .iter()
                .map(|(var, edge)| {
                    BTreeMap::from([
                        ("variable", Value::from(*var)),
                        ("edge", Value::from(edge.as_str())),
                    ])
                })
                .collect();
            let doc = serde_json::json!({ "remove": removals });
            let tree_path = args.out.join(format!("{name}.tree.json"));
            fs::write(&tree_path, serde_json::to_string_pretty(&doc).unwrap())
                .map_err(|e| Failure::new(1, e.to_string()))?;
            let _ = writeln!(out, "wrote {}", tree_path.display());
        }
    }
    Ok(out)
}
