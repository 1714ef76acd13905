//! `epf`: batch frontend over the filters and the analysis pipelines.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "epf", version, about = "Match and compare edge-preserving smoothing filters")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Directory of PNG/JPEG images, read in lexicographic order.
    #[arg(long, global = true, value_name = "DIR")]
    pub corpus: Option<PathBuf>,
    /// Output directory for CSV files and report.json.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Comma-separated filter ids; all registered filters by default.
    #[arg(long, global = true, value_delimiter = ',', value_name = "IDS")]
    pub filters: Vec<String>,
    /// TOML file with external or aliased filters.
    #[arg(long, global = true, env = "EPF_REGISTRY", value_name = "FILE")]
    pub registry: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, value_name = "N")]
    pub parallel: Option<usize>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the registered filters.
    Filters,
    /// Smooth one image at a parameter or at a matched smoothing level.
    Smooth(SmoothArgs),
    /// Find the parameters that reach the given levels on one image.
    Match(MatchArgs),
    /// Gradient elimination profiles (profile.csv).
    Profile,
    /// Parameters matching the ten baseline levels (sweep.csv, sweep_summary.csv).
    Sweep,
    /// Mean attribute curves over matched levels (attrs.csv).
    Attrs(LevelArgs),
    /// Smooth-region loss against edge retention (tradeoff.csv, tradeoff_fit.csv).
    Tradeoff(LevelArgs),
    /// SSIM distances between filters and their MDS embedding (distances.csv, embedding.csv).
    Cluster(LevelArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
pub struct SmoothArgs {
    pub image: PathBuf,
    pub filter: String,
    #[arg(long, conflicts_with = "level", required_unless_present = "level")]
    pub param: Option<f64>,
    /// Target smoothing level in [0, 1]; the parameter is searched.
    #[arg(long)]
    pub level: Option<f64>,
    /// Output image; defaults to `<out>/<stem>-<filter>.png`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write the detail-enhanced image `(1 - b) J + b I` instead.
    #[arg(long, value_name = "B")]
    pub enhance: Option<f64>,
}

#[derive(Args, Debug)]
pub struct MatchArgs {
    pub image: PathBuf,
    /// Target levels; the ten baseline levels by default.
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct LevelArgs {
    /// Target levels; the ten baseline levels by default.
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Built web UI to serve; a minimal page is served otherwise.
    #[arg(long = "static", value_name = "DIR")]
    pub static_dir: Option<PathBuf>,
    /// Answer 503 instead of evicting the least recently used session.
    #[arg(long)]
    pub no_evict: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let g = &cli.global;
    if let Command::Serve(args) = &cli.command {
        return commands::serve(g, args);
    }
    let threads = g.parallel.unwrap_or(0);
    if g.parallel == Some(0) {
        anyhow::bail!("--parallel must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    epf_core::filters::external::set_process_cap(pool.current_num_threads());
    pool.install(|| match &cli.command {
        Command::Filters => commands::filters(g),
        Command::Smooth(args) => commands::smooth(g, args),
        Command::Match(args) => commands::match_image(g, args),
        Command::Profile => commands::profile(g),
        Command::Sweep => commands::sweep(g),
        Command::Attrs(args) => commands::attrs(g, args),
        Command::Tradeoff(args) => commands::tradeoff(g, args),
        Command::Cluster(args) => commands::cluster(g, args),
        Command::Serve(_) => unreachable!(),
    })
}
