use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use utsw_core::experiment::{run_experiment, ExperimentConfig, ExperimentKind, OutputFormat};
use utsw_core::io::{read_graph, read_labels, write_graph, write_labels};
use utsw_core::routing::default_hop_limit;
use utsw_core::{build_routing_tables, generate_utsw, label_graph, myopic_route, Error, TorusSize};

#[derive(Parser, Debug)]
#[command(
    name = "utsw",
    version,
    about = "Toroidal small-world graphs: generate, label, route, experiment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a UTSW graph file.
    Generate {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover torus labels from a graph file's adjacency.
    Label {
        #[arg(long = "in")]
        input: PathBuf,
        /// Seed for the origin choice.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Route one message greedily over labels.
    Route {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        src: u32,
        #[arg(long)]
        dst: u32,
        /// Print one line per visited vertex before the summary.
        #[arg(long)]
        trace: bool,
        /// Defaults to 4n.
        #[arg(long)]
        hop_limit: Option<u32>,
    },
    /// Run a seeded experiment and write a CSV or JSON table.
    Experiment {
        #[arg(value_enum)]
        kind: Kind,
        /// Comma-separated torus sides.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u32>,
        #[arg(long, default_value_t = utsw_core::experiment::DEFAULT_SEEDS)]
        seeds: u32,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        /// Routed pairs or sampled roots per graph.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Detection,
    Cycles,
    Routing,
    Zbounds,
    Eu,
}

impl From<Kind> for ExperimentKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Detection => ExperimentKind::Detection,
            Kind::Cycles => ExperimentKind::Cycles,
            Kind::Routing => ExperimentKind::Routing,
            Kind::Zbounds => ExperimentKind::Zbounds,
            Kind::Eu => ExperimentKind::Eu,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(msg) => Failure::Usage(msg),
            e => Failure::Runtime(e),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(Error::Io(e))
    }
}

#[derive(Serialize)]
struct RouteSummary {
    delivered: bool,
    hops: u32,
    distance: u32,
    stretch: Option<f64>,
}

fn size(n: u32) -> Result<TorusSize, Failure> {
    TorusSize::new(n).map_err(|e| Failure::Usage(e.to_string()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Runtime(Error::Config(format!("{}: {e}", path.display()))))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate { n, seed, out } => {
            if n < 3 {
                return Err(Failure::Usage(format!("--n must be at least 3, got {n}")));
            }
            let g = generate_utsw(size(n)?, seed)?;
            write_graph(&g, output(out.as_deref())?)?;
        }
        Command::Label { input, seed, out } => {
            let g = read_graph(open(&input)?)?;
            let labeling = label_graph(g.topology(), seed)?;
            write_labels(&labeling, output(out.as_deref())?)?;
        }
        Command::Route {
            input,
            labels,
            src,
            dst,
            trace,
            hop_limit,
        } => {
            let g = read_graph(open(&input)?)?;
            let labeling = read_labels(g.size(), open(&labels)?)?;
            let count = g.topology().vertex_count() as u32;
            for (flag, v) in [("--src", src), ("--dst", dst)] {
                if v >= count {
                    return Err(Failure::Usage(format!(
                        "{flag} {v} is not a vertex of a graph with {count} vertices"
                    )));
                }
            }
            let tables = build_routing_tables(g.topology(), &labeling);
            let limit = hop_limit.unwrap_or_else(|| default_hop_limit(g.size()));
            let route = myopic_route(&tables, &labeling, src, dst, limit);
            let mut out = BufWriter::new(io::stdout().lock());
            if trace {
                for (i, &v) in route.path.iter().enumerate() {
                    let (x, y) = match labeling.label(v) {
                        Some(p) => (p.x.to_string(), p.y.to_string()),
                        None => ("-".into(), "-".into()),
                    };
                    let port = route.ports.get(i).map_or_else(|| "-".to_string(), |p| p.to_string());
                    writeln!(out, "{v} {x} {y} {port}")?;
                }
            }
            let distance = g.truth_distance(src, dst);
            let delivered = route.delivered();
            let stretch = match (delivered, distance) {
                (false, _) => None,
                (true, 0) => Some(1.0),
                (true, d) => Some(f64::from(route.hops) / f64::from(d)),
            };
            let summary = RouteSummary {
                delivered,
                hops: route.hops,
                distance,
                stretch,
            };
            serde_json::to_writer(&mut out, &summary).map_err(Error::from)?;
            writeln!(out)?;
            out.flush()?;
        }
        Command::Experiment {
            kind,
            n_list,
            seeds,
            base_seed,
            trials,
            format,
            out,
        } => {
            let cfg = ExperimentConfig {
                sizes: n_list.into_iter().map(size).collect::<Result<_, _>>()?,
                seeds,
                base_seed,
                trials,
                hop_limit: None,
            };
            let table = run_experiment(kind.into(), &cfg)?;
            let format = match format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
            table.write(format, output(out.as_deref())?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
