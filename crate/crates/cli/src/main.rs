//! `cyclepow`: batch front end for counting, verification and export.
//!
//! Exit codes: 0 when everything passes, 1 on a verification failure or count
//! disagreement, 2 on usage, guard or filesystem errors.

mod commands;
mod range;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::range::NRange;

#[derive(Parser, Debug)]
#[command(
    name = "cyclepow",
    version,
    about = "Spanning trees and closed subgraphs of directed cycle powers"
)]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count rooted spanning trees of C_n^p for each n in a range.
    Count(CountArgs),
    /// Count rooted spanning trees of an arbitrary digraph given as `tail head` lines.
    CountDigraph(DigraphArgs),
    /// Run a verification suite, one JSON object per line.
    Verify(VerifyArgs),
    /// Write graphs, WCSC subgraphs, trees or a closure trace to files.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Enum,
    Det,
    Spectral,
    Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Classification,
    Partition,
    Jacobsthal,
    Remark,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    Graph,
    Wcsc,
    Trees,
    ClosureTrace,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    /// `N`, `A..B` or `A..=B` (both inclusive).
    pub range: NRange,
    #[arg(long, default_value_t = 2)]
    pub power: usize,
    #[arg(long, default_value_t = 0)]
    pub root: usize,
    #[arg(long, value_delimiter = ',', value_enum, default_value = "det,formula")]
    pub method: Vec<Method>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write `count.<ext>` into this directory instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug)]
pub struct DigraphArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub root: usize,
    /// Vertex count; defaults to one past the largest index in the file.
    #[arg(long)]
    pub vertices: Option<usize>,
    /// Also enumerate the trees and compare with the determinant.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub range: NRange,
    #[arg(long, default_value_t = 2)]
    pub power: usize,
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Root vertex, or `all`.
    #[arg(long, default_value = "all")]
    pub root: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Enable the exhaustive double checks (raw subset scan, containment scan).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub power: usize,
    #[arg(long, value_enum)]
    pub what: What,
    #[arg(long, value_enum, default_value_t = Format::Dot)]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub root: usize,
    /// Comma-separated edges for `closure-trace`: `e3`, `f3` or `tail.jump`.
    #[arg(long)]
    pub tree: Option<String>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Count(a) => commands::count(&a),
        Command::CountDigraph(a) => commands::count_digraph(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Export(a) => commands::export(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
