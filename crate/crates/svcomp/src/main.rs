use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use svcomp::generate::{generate_registry_doc, GenSpec};
use svcomp::plan::{extract_path, order_services, render_answer, render_dot};
use svcomp::registry::{normalize_param, ParamSet, Query, Registry};
use svcomp::search::{find_leanest, find_shortest_depth, SolutionHit};
use svcomp::tree::{build_cst, BuildLimits, Cst, NodeKind};

const EXIT_REGISTRY_INVALID: u8 = 1;
const EXIT_BAD_QUERY: u8 = 2;
const EXIT_NOT_FOUND: u8 = 3;

#[derive(Parser)]
#[command(name = "svcomp", about = "I/O-match based web service composition", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a registry document
    Validate {
        #[arg(long)]
        registry: PathBuf,
    },
    /// Build the composition search tree and print a summary
    Compose(QueryArgs),
    /// Find the composition using the fewest services
    Leanest(QueryArgs),
    /// Find the composition at the shallowest tree depth
    Shortest(QueryArgs),
    /// Emit a seeded pseudo-random registry document
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        services: usize,
        #[arg(long, default_value_t = 8)]
        params: usize,
        #[arg(long, default_value_t = 3)]
        max_inputs: usize,
        #[arg(long, default_value_t = 3)]
        max_outputs: usize,
    },
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    registry: PathBuf,
    /// Initial input parameters; repeatable or comma-separated
    #[arg(long = "in", value_delimiter = ',')]
    inputs: Vec<String>,
    /// Desired output parameters; repeatable or comma-separated
    #[arg(long = "out", value_delimiter = ',', required = true)]
    outputs: Vec<String>,
    #[arg(long, default_value_t = 32)]
    max_depth: usize,
    #[arg(long, default_value_t = 10_000)]
    max_nodes: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
    Dot,
}

fn load_registry(path: &PathBuf) -> Result<Registry, u8> {
    let bytes = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_REGISTRY_INVALID
    })?;
    Registry::from_json(&bytes).map_err(|e| {
        eprintln!("error: invalid registry: {e}");
        EXIT_REGISTRY_INVALID
    })
}

fn parse_params(raw: &[String]) -> Result<ParamSet, u8> {
    raw.iter()
        .map(|r| {
            normalize_param(r).map_err(|e| {
                eprintln!("error: bad parameter {r:?}: {e}");
                EXIT_BAD_QUERY
            })
        })
        .collect()
}

fn build(args: &QueryArgs) -> Result<(Registry, Query, Cst), u8> {
    let registry = load_registry(&args.registry)?;
    let query = Query::new(parse_params(&args.inputs)?, parse_params(&args.outputs)?);
    let limits = BuildLimits {
        max_depth: args.max_depth,
        max_nodes: args.max_nodes,
    };
    if args.max_depth == 0 || args.max_nodes == 0 {
        eprintln!("error: limits must be positive");
        return Err(EXIT_BAD_QUERY);
    }
    let cst = build_cst(&registry, &query, limits).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_BAD_QUERY
    })?;
    Ok((registry, query, cst))
}

fn summarize(cst: &Cst, format: Format) {
    let count = |kind: NodeKind| cst.nodes().iter().filter(|n| n.kind == kind).count();
    match format {
        Format::Dot => print!("{}", render_dot(cst)),
        Format::Structured => {
            let doc = serde_json::json!({
                "nodes": cst.nodes().len(),
                "internal": count(NodeKind::Internal) + count(NodeKind::Root),
                "solutions": cst.solutions().len(),
                "unsolvable": count(NodeKind::Unsolvable),
                "truncated": cst.truncated(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Text => {
            println!(
                "nodes: {} (expandable {}, solution {}, unsolvable {})",
                cst.nodes().len(),
                count(NodeKind::Internal) + count(NodeKind::Root),
                cst.solutions().len(),
                count(NodeKind::Unsolvable),
            );
            println!("solutions: {}", cst.solutions().len());
            println!("truncated: {}", cst.truncated());
        }
    }
}

fn answer_command(args: &QueryArgs, pick: fn(&Cst) -> Option<SolutionHit>) -> Result<(), u8> {
    let (registry, query, cst) = build(args)?;
    match pick(&cst) {
        Some(found) => {
            let answer = extract_path(&cst, found.node).expect("search returned a solution node");
            let answer = order_services(answer, &query.inputs, &registry).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_BAD_QUERY
            })?;
            match args.format {
                Format::Dot => print!("{}", render_dot(&cst)),
                _ => println!("{}", render_answer(Some(&answer))),
            }
            Ok(())
        }
        None => {
            println!("{}", render_answer(None));
            Err(EXIT_NOT_FOUND)
        }
    }
}

fn run(cli: Cli) -> Result<(), u8> {
    match cli.command {
        Command::Validate { registry } => {
            let reg = load_registry(&registry)?;
            println!(
                "{} services, {} parameters",
                reg.services().len(),
                reg.parameters().len()
            );
            Ok(())
        }
        Command::Compose(args) => {
            let (_, _, cst) = build(&args)?;
            summarize(&cst, args.format);
            Ok(())
        }
        Command::Leanest(args) => answer_command(&args, find_leanest),
        Command::Shortest(args) => answer_command(&args, find_shortest_depth),
        Command::Gen {
            seed,
            services,
            params,
            max_inputs,
            max_outputs,
        } => {
            let spec = GenSpec {
                seed,
                n_services: services,
                n_params: params,
                max_inputs,
                max_outputs,
            };
            let doc = generate_registry_doc(&spec).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_BAD_QUERY
            })?;
            println!("{doc}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
