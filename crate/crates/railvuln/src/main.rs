use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use railvuln::commands;
use railvuln::config::RunConfig;
use railvuln::{Error, Pool};
use railvuln_core::curves::Linkage;
use railvuln_core::StationId;

/// Station importance and vulnerability analysis for urban rail networks.
#[derive(Parser)]
#[command(name = "railvuln", version)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Settings that replace the config file's values.
#[derive(Args)]
struct Overrides {
    /// JSON run configuration.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    stations: Option<PathBuf>,
    #[arg(long, global = true)]
    edges: Option<PathBuf>,
    #[arg(long, global = true)]
    transfers: Option<PathBuf>,
    #[arg(long, global = true)]
    afc: Option<PathBuf>,
    #[arg(long, global = true)]
    profile: Option<PathBuf>,
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Day to analyse, YYYY-MM-DD.
    #[arg(long, global = true)]
    date: Option<String>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    tau_star: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    top_m: Option<usize>,
    #[arg(long, global = true, env = "RAILVULN_WORKERS")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LinkageArg {
    Average,
    Single,
    Complete,
}

impl From<LinkageArg> for Linkage {
    fn from(l: LinkageArg) -> Linkage {
        match l {
            LinkageArg::Average => Linkage::Average,
            LinkageArg::Single => Linkage::Single,
            LinkageArg::Complete => Linkage::Complete,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Load every input and report problems without computing anything.
    Validate,
    /// Per-bin station metrics, importance series and rankings.
    Importance,
    /// Cluster stations by the shape of their importance curves.
    Cluster {
        #[arg(long)]
        clusters: Option<usize>,
        #[arg(long, value_enum)]
        linkage: Option<LinkageArg>,
    },
    /// Short-delay burden for target stations over a grid of delays.
    ShortDelay {
        /// Comma-separated station ids; all stations when absent.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<u32>>,
        /// Comma-separated delays in minutes.
        #[arg(long, value_delimiter = ',')]
        delays: Option<Vec<f64>>,
    },
    /// Run the attack plans of a campaign file.
    Simulate {
        #[arg(long)]
        campaign: PathBuf,
    },
    /// Write synthetic AFC records drawn from the demand profile.
    GenDemand {
        /// Destination file; `<out>/afc.csv` when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Count how often stations reach the top of the per-bin rankings.
    Frequency,
}

impl Overrides {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => {
                let mut c = RunConfig::default();
                c.resolve(&std::env::current_dir().unwrap_or_default());
                c
            }
        };
        if let Some(p) = &self.stations {
            c.network.stations = p.clone();
        }
        if let Some(p) = &self.edges {
            c.network.edges = p.clone();
        }
        if let Some(p) = &self.transfers {
            c.network.transfers = Some(p.clone());
        }
        if let Some(p) = &self.afc {
            c.afc = Some(p.clone());
        }
        if let Some(p) = &self.profile {
            c.profile = Some(p.clone());
            if self.afc.is_none() {
                c.afc = None;
            }
        }
        if let Some(p) = &self.cache {
            c.cache = Some(p.clone());
        }
        if let Some(p) = &self.out {
            c.output_dir = p.clone();
        }
        if let Some(d) = &self.date {
            c.time_bins.date = Some(d.clone());
        }
        if let Some(v) = self.k {
            c.k = v;
        }
        if let Some(v) = self.tau_star {
            c.tau_star = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.top_m {
            c.top_m = v;
        }
        if let Some(v) = self.workers {
            c.workers = Some(v);
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let mut config = cli.overrides.config()?;
    if let Command::Validate = cli.command {
        let report = commands::validate(&config);
        for (k, v) in &report.facts {
            println!("{k}: {v}");
        }
        for p in &report.problems {
            eprintln!("error: {p}");
        }
        return Ok(if report.is_clean() { ExitCode::SUCCESS } else { ExitCode::from(1) });
    }
    if let Command::Cluster { clusters, linkage } = &cli.command {
        if let Some(k) = clusters {
            config.clustering.k = *k;
        }
        if let Some(l) = linkage {
            config.clustering.linkage = (*l).into();
        }
    }
    config.check()?;
    let pool = Pool::new(config.workers)?;
    match cli.command {
        Command::Validate => unreachable!(),
        Command::Importance => {
            let run = commands::importance(&config, &pool)?;
            println!("bins: {}", run.bins.len());
            println!("assigned_trips: {}", run.demand.assigned);
            println!("dropped_trips: {}", run.demand.dropped());
        }
        Command::Cluster { .. } => {
            let c = commands::cluster(&config, &pool)?;
            println!("clusters: {}", c.clusters);
        }
        Command::ShortDelay { targets, delays } => {
            let targets: Option<Vec<StationId>> = targets.map(|t| t.into_iter().map(StationId).collect());
            let records = commands::short_delay(&config, targets.as_deref(), delays.as_deref(), &pool)?;
            println!("records: {}", records.len());
        }
        Command::Simulate { campaign } => {
            let summary = commands::simulate(&config, &campaign, &pool)?;
            for p in &summary.plans {
                println!("{}: {} steps{}", p.id, p.steps, if p.exhausted { ", network exhausted" } else { "" });
            }
        }
        Command::GenDemand { output } => {
            let (path, n) = commands::gen_demand(&config, output.as_deref(), &pool)?;
            println!("wrote {n} trips to {}", path.display());
        }
        Command::Frequency => {
            let t = commands::frequency(&config, &pool)?;
            println!("days: {}", t.days);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
