//! Command-line front end: graph generation, graph statistics, single
//! campaigns, sweeps, and spreading analysis.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::topology::{load_edge_list, save_edge_list, stats};

use super::campaign::{run_campaign, sweep};
use super::config::{ExperimentConfig, TopologyModel, TopologySection};
use super::presets::{preset, preset_names};
use super::HarnessError;

#[derive(Parser)]
#[command(
    name = "ssea",
    version,
    about = "Spatially-structured evolutionary algorithms on complex networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a network and write it as an edge-list file.
    GenGraph(GenGraphArgs),
    /// Print structural statistics of an edge-list graph.
    Stats {
        /// Edge-list file.
        path: PathBuf,
    },
    /// Run one campaign from a config file or preset.
    Run(RunArgs),
    /// Run the sweep grid declared in a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run with mutation frozen after the first optimum and write
    /// per-run and aggregate spread CSVs.
    Spread(RunArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct GenGraphArgs {
    /// complete | er | sf | sw
    #[arg(long)]
    model: String,
    #[arg(long)]
    n: usize,
    /// Connection probability (er).
    #[arg(long)]
    p: Option<f64>,
    /// Target link count (er, alternative to --p).
    #[arg(long)]
    links: Option<u64>,
    /// Power-law exponent (sf).
    #[arg(long)]
    gamma: Option<f64>,
    /// Minimum degree (sf).
    #[arg(long)]
    k_min: Option<usize>,
    /// Optional degree cutoff (sf); defaults to n-1.
    #[arg(long)]
    k_max: Option<usize>,
    /// Ring neighbors per side (sw).
    #[arg(long)]
    k: Option<usize>,
    /// Rewiring probability (sw).
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Destination edge-list file.
    #[arg(long)]
    out: PathBuf,
    /// Resample until the instance is connected.
    #[arg(long)]
    require_connected: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name (see `ssea presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the repetition count.
    #[arg(long)]
    runs: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write per-generation series CSVs.
    #[arg(long)]
    series: bool,
}

/// Entry point used by the binary; returns the process exit code.
pub fn run_cli() -> i32 {
    cli(std::env::args_os())
}

pub fn cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::GenGraph(args) => gen_graph(args),
        Command::Stats { path } => print_stats(path),
        Command::Run(args) => {
            let cfg = load_run_config(args, false)?;
            let out = run_campaign(&cfg)?;
            print_summary(&out.summary, &out.output_dir);
            Ok(())
        }
        Command::Spread(args) => {
            let cfg = load_run_config(args, true)?;
            let out = run_campaign(&cfg)?;
            print_summary(&out.summary, &out.output_dir);
            println!(
                "spread: per-run spread CSVs and spread_summary.csv in {}",
                out.output_dir.display()
            );
            Ok(())
        }
        Command::Sweep { config, out } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            if let Some(dir) = out {
                cfg.campaign.output_dir = dir;
            }
            let result = sweep(&cfg)?;
            let failed = result
                .cells
                .iter()
                .filter(|c| c.result.is_err())
                .count();
            println!(
                "sweep: {} cells ({} failed), table in {}",
                result.cells.len(),
                failed,
                result.output_dir.join("sweep_cells.csv").display()
            );
            Ok(())
        }
        Command::Presets => {
            for name in preset_names() {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn gen_graph(args: GenGraphArgs) -> Result<(), HarnessError> {
    let model = match args.model.as_str() {
        "complete" => TopologyModel::Complete,
        "er" => TopologyModel::Er,
        "sf" => TopologyModel::Sf,
        "sw" => TopologyModel::Sw,
        other => {
            return Err(HarnessError::Config(format!(
                "unknown model {other:?} (expected complete, er, sf, or sw)"
            )))
        }
    };
    let section = TopologySection {
        model,
        n: Some(args.n),
        p: args.p,
        links: args.links,
        gamma: args.gamma,
        k_min: args.k_min,
        k_max: args.k_max,
        k: args.k,
        r: args.r,
        path: None,
        regenerate_per_run: true,
        connect_retries: 20,
    };
    let g = if args.require_connected {
        section.build_connected(args.seed)?.0
    } else {
        section.build(args.seed)?
    };
    save_edge_list(&g, &args.out)?;
    println!(
        "wrote {} nodes, {} links to {}",
        g.n(),
        g.n_links(),
        args.out.display()
    );
    Ok(())
}

fn print_stats(path: PathBuf) -> Result<(), HarnessError> {
    let g = load_edge_list(&path)?;
    let s = stats(&g);
    println!("nodes: {}", s.n_nodes);
    println!("links: {}", s.n_links);
    println!("mean degree: {:.4}", s.mean_degree);
    println!(
        "connected: {} (largest component {})",
        s.connected, s.largest_component
    );
    println!("apl: {:.4}", s.apl);
    println!("diameter: {}", s.diameter);
    println!("mean clustering: {:.4} (std {:.4})", s.mean_cc, s.cc_std);
    let nonzero: Vec<String> = s
        .degree_histogram
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(d, c)| format!("{d}:{c}"))
        .collect();
    let shown = nonzero.len().min(24);
    print!("degree histogram: {}", nonzero[..shown].join(" "));
    if nonzero.len() > shown {
        print!(" ... ({} more)", nonzero.len() - shown);
    }
    println!();
    Ok(())
}

fn load_run_config(args: RunArgs, spread_mode: bool) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), None) => ExperimentConfig::from_path(path)?,
        (None, Some(name)) => preset(name).ok_or_else(|| {
            HarnessError::Config(format!(
                "unknown preset {name:?}; `ssea presets` lists the available names"
            ))
        })?,
        _ => {
            return Err(HarnessError::Config(
                "exactly one of --config or --preset is required".into(),
            ))
        }
    };
    if let Some(dir) = args.out {
        cfg.campaign.output_dir = dir;
    }
    if let Some(runs) = args.runs {
        cfg.campaign.runs = runs;
    }
    if let Some(seed) = args.seed {
        cfg.campaign.master_seed = seed;
    }
    if args.series {
        cfg.campaign.write_series = true;
    }
    if spread_mode {
        cfg.engine.freeze_mutation_after_fht = true;
        cfg.campaign.write_spread = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_summary(summary: &super::campaign::CampaignSummary, dir: &std::path::Path) {
    let fmt = |s: &super::campaign::StatSummary| match (s.mean, s.std) {
        (Some(m), Some(sd)) => format!("{m:.2} (std {sd:.2}, n={})", s.defined),
        _ => format!("undefined for all {} runs", s.undefined),
    };
    println!("runs: {}", summary.runs);
    println!("fht: {}", fmt(&summary.fht));
    println!("fct: {}", fmt(&summary.fct));
    println!("max distinct optima: {}", fmt(&summary.max_distinct_optima));
    if summary.fht.undefined > 0 || summary.fct.undefined > 0 {
        println!(
            "undefined: fht in {} runs, fct in {} runs",
            summary.fht.undefined, summary.fct.undefined
        );
    }
    println!("artifacts: {}", dir.display());
}
