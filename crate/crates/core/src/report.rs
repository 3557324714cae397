//! Cross-seed comparison series, the trend summary, and the output directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::config::SimConfig;
use crate::metrics::{write_runs_csv, Protocol, RoundRecord, SimulationResult};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("no simulation results to report")]
    Empty,
    #[error("comparison needs results for {0} as well")]
    MissingProtocol(Protocol),
    #[error("seed sets differ between protocols: dcp {dcp:?}, leach {leach:?}")]
    MismatchedSeeds { dcp: Vec<u64>, leach: Vec<u64> },
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("I/O error writing outputs: {0}")]
    Io(#[from] io::Error),
    #[error("CSV error writing runs.csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrendCheck {
    pub pass: bool,
    pub detail: String,
}

/// The three DCP-versus-baseline trend checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Trends {
    /// DCP median cumulative dissipation stays below the baseline's after the
    /// first refresh cycle, with a non-decreasing gap.
    pub energy: TrendCheck,
    /// DCP median lifetime exceeds the baseline's.
    pub lifetime: TrendCheck,
    /// DCP mean delay exceeds the baseline's and never exceeds `refresh_time`.
    pub delay: TrendCheck,
}

/// Per-protocol medians across seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSummary {
    pub protocol: Protocol,
    pub seeds: Vec<u64>,
    pub median_lifetime: f64,
    pub median_final_dissipated: f64,
    pub median_mean_delay: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub protocols: Vec<ProtocolSummary>,
    /// `tick,<protocol>...` with the median cumulative dissipated energy.
    pub energy_csv: String,
    /// `tick,<protocol>...` with the median alive-node count.
    pub lifetime_csv: String,
    /// `tick,<protocol>...` with the median cumulative mean delay; blank when
    /// no run has delivered anything yet.
    pub delay_csv: String,
    pub trends: Option<Trends>,
    pub summary: String,
}

/// Median of a non-empty sample; the mean of the middle pair for even sizes.
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    values.sort_by(|a, b| a.total_cmp(b));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// Value of a run at `tick`, holding the last record once the run has ended.
fn at_tick(records: &[RoundRecord], tick: u64) -> &RoundRecord {
    let i = (tick as usize).min(records.len() - 1);
    &records[i]
}

fn median_series<F>(runs: &[&SimulationResult], last_tick: u64, value: F) -> Vec<Option<f64>>
where
    F: Fn(&RoundRecord) -> Option<f64>,
{
    (0..=last_tick)
        .map(|t| {
            let mut vals: Vec<f64> = runs.iter().filter_map(|r| value(at_tick(&r.records, t))).collect();
            (!vals.is_empty()).then(|| median(&mut vals))
        })
        .collect()
}

fn series_csv(protocols: &[Protocol], series: &[Vec<Option<f64>>]) -> String {
    let mut out = String::from("tick");
    for p in protocols {
        out.push(',');
        out.push_str(p.label());
    }
    out.push('\n');
    let len = series.first().map_or(0, Vec::len);
    for t in 0..len {
        write!(out, "{t}").unwrap();
        for s in series {
            out.push(',');
            if let Some(v) = s[t] {
                write!(out, "{v}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

fn group(results: &[SimulationResult]) -> BTreeMap<Protocol, Vec<&SimulationResult>> {
    let mut by_protocol: BTreeMap<Protocol, Vec<&SimulationResult>> = BTreeMap::new();
    for r in results {
        by_protocol.entry(r.protocol).or_default().push(r);
    }
    for runs in by_protocol.values_mut() {
        runs.sort_by_key(|r| r.seed);
    }
    by_protocol
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| v.to_string())
}

fn pass_fail(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn check_trends(
    dcp: &[&SimulationResult],
    leach: &[&SimulationResult],
    dcp_summary: &ProtocolSummary,
    leach_summary: &ProtocolSummary,
    refresh_time: u64,
) -> Trends {
    // ticks where every run of both protocols still has a record of its own
    let common_end = dcp
        .iter()
        .chain(leach)
        .map(|r| r.records.last().map_or(0, |x| x.tick))
        .min()
        .unwrap_or(0);
    let energy = |runs: &[&SimulationResult]| {
        median_series(runs, common_end, |r| Some(r.cumulative_dissipated as f64))
    };
    let (dcp_energy, leach_energy) = (energy(dcp), energy(leach));

    let energy_check = if common_end <= refresh_time {
        TrendCheck {
            pass: false,
            detail: format!("no comparable ticks after the first cycle (runs end by tick {common_end})"),
        }
    } else {
        let mut pass = true;
        let mut prev_gap = f64::NEG_INFINITY;
        let mut min_gap = f64::INFINITY;
        let mut first_bad = None;
        for t in (refresh_time + 1)..=common_end {
            let gap = leach_energy[t as usize].unwrap() - dcp_energy[t as usize].unwrap();
            min_gap = min_gap.min(gap);
            if gap <= 0.0 || gap < prev_gap {
                pass = false;
                first_bad.get_or_insert(t);
            }
            prev_gap = gap;
        }
        let mut detail = format!(
            "ticks {}..={common_end}, smallest gap {min_gap}",
            refresh_time + 1
        );
        if let Some(t) = first_bad {
            write!(detail, ", first violation at tick {t}").unwrap();
        }
        TrendCheck { pass, detail }
    };

    let lifetime_check = TrendCheck {
        pass: dcp_summary.median_lifetime > leach_summary.median_lifetime,
        detail: format!(
            "median lifetime dcp {} vs leach {}",
            dcp_summary.median_lifetime, leach_summary.median_lifetime
        ),
    };

    let max_dcp_delay = dcp
        .iter()
        .flat_map(|r| r.records.iter().filter_map(|x| x.mean_delay))
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
    let bounded = max_dcp_delay.is_none_or(|d| d <= refresh_time as f64);
    let higher = match (dcp_summary.median_mean_delay, leach_summary.median_mean_delay) {
        (Some(d), Some(l)) => d > l,
        _ => false,
    };
    let delay_check = TrendCheck {
        pass: higher && bounded,
        detail: format!(
            "median mean delay dcp {} vs leach {}, largest dcp value {} (refresh_time {refresh_time})",
            fmt_opt(dcp_summary.median_mean_delay),
            fmt_opt(leach_summary.median_mean_delay),
            fmt_opt(max_dcp_delay)
        ),
    };

    Trends {
        energy: energy_check,
        lifetime: lifetime_check,
        delay: delay_check,
    }
}

fn build(results: &[SimulationResult], config: &SimConfig, with_trends: bool) -> Result<Report, ReportError> {
    if results.is_empty() {
        return Err(ReportError::Empty);
    }
    let by_protocol = group(results);
    let protocols: Vec<Protocol> = by_protocol.keys().copied().collect();
    let last_tick = results
        .iter()
        .filter_map(|r| r.records.last().map(|x| x.tick))
        .max()
        .unwrap_or(0);

    let mut energy = Vec::new();
    let mut alive = Vec::new();
    let mut delay = Vec::new();
    let mut summaries = Vec::new();
    for (&protocol, runs) in &by_protocol {
        energy.push(median_series(runs, last_tick, |r| Some(r.cumulative_dissipated as f64)));
        alive.push(median_series(runs, last_tick, |r| Some(r.alive_count as f64)));
        delay.push(median_series(runs, last_tick, |r| r.mean_delay));

        let mut lifetimes: Vec<f64> = runs.iter().map(|r| r.lifetime as f64).collect();
        let mut dissipated: Vec<f64> = runs.iter().map(|r| r.final_dissipated() as f64).collect();
        let mut delays: Vec<f64> = runs.iter().filter_map(|r| r.final_mean_delay()).collect();
        summaries.push(ProtocolSummary {
            protocol,
            seeds: runs.iter().map(|r| r.seed).collect(),
            median_lifetime: median(&mut lifetimes),
            median_final_dissipated: median(&mut dissipated),
            median_mean_delay: (!delays.is_empty()).then(|| median(&mut delays)),
        });
    }

    let trends = if with_trends {
        let summary_of = |p| summaries.iter().find(|s: &&ProtocolSummary| s.protocol == p).unwrap();
        Some(check_trends(
            &by_protocol[&Protocol::Dcp],
            &by_protocol[&Protocol::Leach],
            summary_of(Protocol::Dcp),
            summary_of(Protocol::Leach),
            config.refresh_time,
        ))
    } else {
        None
    };

    let mut summary = String::new();
    writeln!(summary, "nodes {}, area {}x{}, range {}, refresh_time {} ticks, p_active {}",
        config.node_count, config.area_width, config.area_height, config.range, config.refresh_time, config.p_active).unwrap();
    for s in &summaries {
        writeln!(
            summary,
            "{}: seeds {:?}; median lifetime {} ticks; median final dissipated {} units; median mean delay {} ticks",
            s.protocol,
            s.seeds,
            s.median_lifetime,
            s.median_final_dissipated,
            fmt_opt(s.median_mean_delay)
        )
        .unwrap();
    }
    match &trends {
        Some(t) => {
            writeln!(summary, "DCP dissipates less energy than LEACH: {} ({})", pass_fail(t.energy.pass), t.energy.detail).unwrap();
            writeln!(summary, "DCP lifetime > LEACH lifetime: {} ({})", pass_fail(t.lifetime.pass), t.lifetime.detail).unwrap();
            writeln!(summary, "DCP delay > LEACH delay and <= refresh_time: {} ({})", pass_fail(t.delay.pass), t.delay.detail).unwrap();
        }
        None => writeln!(summary, "trend comparison skipped: needs both protocols").unwrap(),
    }

    Ok(Report {
        protocols: summaries,
        energy_csv: series_csv(&protocols, &energy),
        lifetime_csv: series_csv(&protocols, &alive),
        delay_csv: series_csv(&protocols, &delay),
        trends,
        summary,
    })
}

/// Compares DCP against the baseline. Both protocols must be present with
/// identical seed sets.
pub fn compare_report(results: &[SimulationResult], config: &SimConfig) -> Result<Report, ReportError> {
    if results.is_empty() {
        return Err(ReportError::Empty);
    }
    let by_protocol = group(results);
    let seeds_of = |p: Protocol| -> Result<Vec<u64>, ReportError> {
        by_protocol
            .get(&p)
            .map(|runs| runs.iter().map(|r| r.seed).collect())
            .ok_or(ReportError::MissingProtocol(p))
    };
    let (dcp, leach) = (seeds_of(Protocol::Dcp)?, seeds_of(Protocol::Leach)?);
    if dcp != leach {
        return Err(ReportError::MismatchedSeeds { dcp, leach });
    }
    build(results, config, true)
}

/// Series and medians for whatever protocols are present, without trend checks.
pub fn describe_runs(results: &[SimulationResult], config: &SimConfig) -> Result<Report, ReportError> {
    build(results, config, false)
}

/// Writes `runs.csv`, the three series files, `summary.txt` and
/// `resolved_config.txt` into `dir`, creating it if needed.
pub fn write_outputs(
    dir: &Path,
    config: &SimConfig,
    results: &[SimulationResult],
    report: &Report,
) -> Result<(), OutputError> {
    fs::create_dir_all(dir)?;
    let runs = fs::File::create(dir.join("runs.csv"))?;
    write_runs_csv(results, io::BufWriter::new(runs))?;
    fs::write(dir.join("fig_energy.csv"), &report.energy_csv)?;
    fs::write(dir.join("fig_lifetime.csv"), &report.lifetime_csv)?;
    fs::write(dir.join("fig_delay.csv"), &report.delay_csv)?;
    fs::write(dir.join("summary.txt"), &report.summary)?;
    fs::write(dir.join("resolved_config.txt"), config.to_toml_string())?;
    Ok(())
}
