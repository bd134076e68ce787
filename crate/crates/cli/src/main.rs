//! `vc`: run the solvers, generators and oracles from the command line.
//! Every run prints one JSON report to stdout.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use vcframe::comm::GadgetMode;
use vcframe::config::{load_config, RunConfig};
use vcframe::Error;

pub const SCHEMA: &str = "vcframe/1";

#[derive(Parser, Debug)]
#[command(name = "vc", version, about = "Exact vertex connectivity and friends")]
pub struct Cli {
    /// Seed for every randomized step (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML file with [solver], [comm] and [embedding] tables.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Cross-check the answer against a reference oracle.
    #[arg(long, global = true)]
    pub verify: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Global vertex connectivity, or the minimum t-sink cut with --sink.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(short = 't', long)]
        sink: Option<usize>,
        #[arg(long)]
        boost: Option<usize>,
        #[arg(long)]
        max_sinks: Option<usize>,
    },
    /// s-t vertex connectivity through bipartite matching.
    Stcut {
        #[arg(long)]
        input: PathBuf,
        #[arg(short = 's')]
        s: usize,
        #[arg(short = 't')]
        t: usize,
    },
    /// Minimum vertex cut with t on the sink side.
    SinkCut {
        #[arg(long)]
        input: PathBuf,
        #[arg(short = 't')]
        t: usize,
    },
    /// Common-neighborhood clustering at size estimate ell.
    Cluster {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        ell: usize,
        /// Report whether this vertex set is covered.
        #[arg(long, value_delimiter = ',')]
        planted: Option<Vec<usize>>,
    },
    /// Isolating cuts of independent terminals inside a cluster.
    Isocut {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        cluster: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        terminals: Vec<usize>,
    },
    /// Minimum neighborhood of a subset of a near-clique cluster.
    Minnncc {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        cluster: Vec<usize>,
        #[arg(long)]
        ell: usize,
        /// Also run the embedding-based binary search.
        #[arg(long)]
        via_embedding: bool,
    },
    /// Modular embedding anchored at N(t); kappa(s, t) by rank.
    Embed {
        #[arg(long)]
        input: PathBuf,
        #[arg(short = 't')]
        t: usize,
        #[arg(short = 's')]
        s: Option<usize>,
    },
    /// Two-party protocol simulation on an A/B split file.
    CommSim {
        #[arg(long)]
        split: PathBuf,
        #[arg(short = 't')]
        t: usize,
        #[arg(long)]
        max_phase1_calls: Option<usize>,
    },
    /// Subset-tribes gadget graph with its expected connectivity class.
    Gadget {
        #[arg(long)]
        sqrt_n: usize,
        #[arg(long, value_parser = parse_mode)]
        mode: GadgetMode,
        /// Write the edge list here instead of embedding it in the report.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reference answers by exhaustive search or max-flow.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleKind::Vc)]
        kind: OracleKind,
        #[arg(short = 's')]
        s: Option<usize>,
        #[arg(short = 't')]
        t: Option<usize>,
    },
    /// Benchmark suites.
    Bench {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn parse_mode(s: &str) -> Result<GadgetMode, String> {
    s.parse()
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    Vc,
    Stcut,
    SinkCut,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    CommScaling,
    Global,
    Gadget,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve { .. } => "solve",
            Command::Stcut { .. } => "stcut",
            Command::SinkCut { .. } => "sink-cut",
            Command::Cluster { .. } => "cluster",
            Command::Isocut { .. } => "isocut",
            Command::Minnncc { .. } => "minnncc",
            Command::Embed { .. } => "embed",
            Command::CommSim { .. } => "comm-sim",
            Command::Gadget { .. } => "gadget",
            Command::Oracle { .. } => "oracle",
            Command::Bench { .. } => "bench",
        }
    }
}

/// What a command hands back to the report writer.
#[derive(Default)]
pub struct Outcome {
    pub input: Value,
    /// Merged into the top level of the report.
    pub answer: Map<String, Value>,
    pub verified: Option<bool>,
    pub counters: Value,
    /// Replaces the JSON report on stdout (CSV bench output).
    pub raw: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let command = cli.command.name();
    let start = Instant::now();
    let loaded = load(&cli);
    let seed = loaded.as_ref().map(|c| c.solver.seed).ok().or(cli.seed);
    let result = loaded.and_then(|cfg| commands::run(&cli, &cfg));
    let mut report = Map::new();
    report.insert("schema".into(), json!(SCHEMA));
    report.insert("command".into(), json!(command));
    let code = match result {
        Ok(out) => {
            if let Some(raw) = out.raw {
                print!("{raw}");
                return ExitCode::SUCCESS;
            }
            let mismatch = out.verified == Some(false);
            report.insert("status".into(), json!(if mismatch { "mismatch" } else { "ok" }));
            report.insert("seed".into(), json!(seed));
            report.insert("input".into(), out.input);
            for (k, v) in out.answer {
                report.insert(k, v);
            }
            report.insert("verified".into(), json!(out.verified));
            report.insert("counters".into(), out.counters);
            if mismatch {
                log::error!("answer disagrees with the oracle");
                1
            } else {
                0
            }
        }
        Err(e) => {
            let usage = matches!(e, Error::InvalidArgument(_) | Error::Config(_));
            log::error!("{e}");
            report.insert("status".into(), json!(if usage { "usage-error" } else { "error" }));
            report.insert("seed".into(), json!(seed));
            report.insert("error".into(), json!(e.to_string()));
            if usage {
                2
            } else {
                1
            }
        }
    };
    report.insert("wall_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
    println!("{}", Value::Object(report));
    ExitCode::from(code)
}

fn load(cli: &Cli) -> vcframe::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.solver.seed = seed;
        cfg.comm.seed = seed;
    }
    if cli.verify {
        cfg.solver.verify = true;
    }
    Ok(cfg)
}
