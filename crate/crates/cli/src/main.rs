use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use dcp_sim::config::{load_config, Overrides, ProtocolSelection};
use dcp_sim::report::{compare_report, describe_runs, write_outputs};
use dcp_sim::run_batch;

/// Runs DCP and the static-cluster baseline over a set of seeds and writes
/// per-tick CSVs plus a comparison summary.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// TOML config file; every key is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_protocol)]
    protocol: Option<ProtocolSelection>,
    #[arg(long)]
    nodes: Option<usize>,
    /// Simulation area as WIDTHxHEIGHT in meters.
    #[arg(long, value_parser = parse_area)]
    area: Option<(f64, f64)>,
    /// Cluster formation range in meters.
    #[arg(long)]
    range: Option<f64>,
    /// Ticks per refresh cycle.
    #[arg(long)]
    refresh_time: Option<u64>,
    #[arg(long)]
    p_active: Option<f64>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Stop after this many ticks even if the network is still alive.
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse_protocol(s: &str) -> Result<ProtocolSelection, String> {
    s.parse()
}

fn parse_area(s: &str) -> Result<(f64, f64), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad area `{s}`: {e}"));
    Ok((parse(w)?, parse(h)?))
}

fn run(args: Args) -> Result<()> {
    let overrides = Overrides {
        nodes: args.nodes,
        area: args.area,
        range: args.range,
        refresh_time: args.refresh_time,
        p_active: args.p_active,
        seeds: args.seeds,
        horizon: args.horizon,
        protocol: args.protocol,
    };
    let config = load_config(args.config.as_deref(), &overrides)?;
    print!("{}", config.to_toml_string());
    println!();

    let results = run_batch(&config, &config.seeds, &config.protocol.protocols())
        .context("generating topology")?;
    let report = match config.protocol {
        ProtocolSelection::Both => compare_report(&results, &config)?,
        _ => describe_runs(&results, &config)?,
    };
    write_outputs(&args.out, &config, &results, &report)
        .with_context(|| format!("writing outputs to {}", args.out.display()))?;
    print!("{}", report.summary);
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
