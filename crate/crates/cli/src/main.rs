mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use waring_core::harness::OutputFormat;

#[derive(Parser, Debug)]
#[command(
    name = "waring",
    version,
    about = "Desk-scale checks for the density version of Waring's problem"
)]
pub struct Cli {
    /// Also write the output to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// json or csv; applies to reports.
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides the seed of randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certified enclosure of the constant Z_k.
    Zk {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1e-6)]
        precision: f64,
    },
    /// Waring pairs in Z_q.
    #[command(subcommand)]
    Local(LocalCommand),
    /// Downset compression of residue sets.
    #[command(subcommand)]
    Downset(DownsetCommand),
    /// Fourier pseudorandomness of nu_b.
    Pseudo {
        #[command(flatten)]
        w: WArgs,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 0)]
        grid: usize,
        #[arg(long, default_value_t = 0.2)]
        rho: f64,
    },
    /// Discretised restriction constant of f_b.
    Restrict {
        #[command(flatten)]
        w: WArgs,
        #[arg(long)]
        qexp: f64,
        #[arg(long = "N")]
        n: usize,
        /// A file of k-th powers, one per line, or `all-powers`.
        #[arg(long, default_value = "all-powers")]
        set: String,
        #[arg(long, default_value_t = 0)]
        grid: usize,
    },
    /// Complete sums V_q(a, b) as CSV rows.
    Vq {
        #[command(flatten)]
        w: WArgs,
        #[arg(long)]
        qmax: u64,
    },
    /// Vinogradov mean-value count J_t^(k)(X).
    Jcount {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        k: u32,
        #[arg(long = "X")]
        x: u64,
    },
    /// End-to-end transference on s copies of f_b.
    Transfer {
        #[command(flatten)]
        w: WArgs,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.3)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        grid: usize,
        #[arg(long)]
        set: Option<PathBuf>,
    },
    /// Coverage experiment on a random dense set of k-th powers.
    Experiment(ExperimentArgs),
    /// Runs the acceptance criteria.
    Report {
        /// Comma-separated criterion numbers; all when absent.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct WArgs {
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 2)]
    pub w: u64,
    #[arg(long, default_value_t = 1)]
    pub b: u64,
}

#[derive(Subcommand, Debug)]
pub enum LocalCommand {
    /// Decides whether (q, s) is a Waring pair.
    Check {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        s: u64,
        #[arg(long, conflicts_with = "trials")]
        exhaustive: bool,
        /// Random majority subsets to test instead of the exhaustive search.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Smallest s making (q, s) a Waring pair.
    MinimalS {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 64)]
        s_max: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum DownsetCommand {
    /// Compresses the blocks in a set file and compares sumsets.
    Demo {
        #[arg(long)]
        q: u64,
        /// One residue per line; blank lines separate blocks.
        #[arg(long)]
        sets: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// key = value config file; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub w: Option<u64>,
    #[arg(long = "N")]
    pub n: Option<u64>,
    #[arg(long)]
    pub n_min: Option<u64>,
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub grid: Option<u64>,
    #[arg(long)]
    pub subset_mode: Option<String>,
    #[arg(long)]
    pub congruence_filter: Option<bool>,
    #[arg(long)]
    pub coverage_threshold: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match commands::run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            if !outcome.text.ends_with('\n') {
                println!();
            }
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &outcome.text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(3);
                }
            }
            ExitCode::from(if outcome.holds { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
