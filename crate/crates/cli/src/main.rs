//! `textca`: ingest a dated archive, fit the focused correspondence analysis,
//! and export the tables, factor planes and dendrograms.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use textca::ErrorKind;

#[derive(Debug, Parser)]
#[command(name = "textca", version, about = "Correspondence analysis of dated narrative archives")]
struct Cli {
    /// Analysis settings (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for the distance subsampling; overrides `rng_seed` from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "textca_out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an archive and build the thresholded term/document matrix.
    Ingest {
        archive: PathBuf,
    },
    /// Fit the focused analysis and export tables and factor planes.
    Analyze {
        #[command(flatten)]
        store: StoreArg,
        /// Active names, comma separated; defaults to `active_names` from the config.
        #[arg(long, value_delimiter = ',')]
        names: Vec<String>,
        #[command(flatten)]
        size: SizeArgs,
    },
    /// Closest supplementary words to an active name.
    Nearest {
        name: String,
        #[command(flatten)]
        model: ModelArg,
        /// Number of words; defaults to `k_nearest` from the config.
        #[arg(short, long)]
        k: Option<usize>,
    },
    /// Documents mentioning a name and at least one of the given words.
    Timeline {
        name: String,
        #[command(flatten)]
        store: StoreArg,
        #[command(flatten)]
        model: ModelArg,
        /// Words to tabulate; defaults to the nearest words of `name`.
        #[arg(long, value_delimiter = ',')]
        words: Vec<String>,
    },
    /// Chronologically constrained clustering of the fitted documents.
    Cluster {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        clustering: ClusterArgs,
    },
    /// Restrict to the documents mentioning a name, refit with every word active, and cluster.
    Substudy {
        name: String,
        #[command(flatten)]
        store: StoreArg,
        #[command(flatten)]
        clustering: ClusterArgs,
        /// Ranked words and documents per axis pair.
        #[arg(long, default_value_t = 14)]
        top: usize,
    },
    /// Mean and normality of pairwise distances in the factor space.
    Stats {
        #[command(flatten)]
        model: ModelArg,
    },
}

#[derive(Debug, Args)]
struct StoreArg {
    /// Corpus store written by `ingest`; defaults to `<out>/corpus.json`.
    #[arg(long)]
    store: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelArg {
    /// Model written by `analyze`; defaults to `<out>/model.json`.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Copy)]
struct SizeArgs {
    #[arg(long, default_value_t = 900)]
    width: u32,
    #[arg(long, default_value_t = 700)]
    height: u32,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    /// ward, complete or average.
    #[arg(long, default_value = "ward")]
    linkage: String,
    /// Dendrogram formats, comma separated (json, svg).
    #[arg(long, value_delimiter = ',', default_value = "json,svg")]
    format: Vec<String>,
    #[command(flatten)]
    size: SizeArgs,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<textca::Error>() {
            return match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Numeric => 3,
                ErrorKind::Contract => 4,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
