//! Command-line front end: closed-form rates, Monte Carlo runs with
//! convergence reports, the exact verification battery, and parameter
//! sweeps. All outputs are machine-parseable (CSV with a fixed header or
//! JSON arrays of flat records) or pretty-printed tables.

mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use repeater_analytics::{
    cavity_snr, fidelity_imperfection, rate_breakdown, reference_comparison, sweep, Axis,
};
use repeater_sim::convergence_report;

use config::{OutputFormat, RunConfig};
use output::{emit, render};
use verify::{all_passed, run_battery};

#[derive(Parser)]
#[command(
    name = "pme-repeater",
    version,
    about = "Rate analytics, Monte Carlo, and exact verification for an \
             atomic-ensemble entanglement-distribution protocol"
)]
struct Cli {
    /// JSON run config; defaults to $PME_REPEATER_CONFIG, then the bundled
    /// benchmark preset
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output format (overrides the config)
    #[arg(long, global = true, value_enum)]
    output: Option<OutputFormat>,

    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    output_path: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form rate table with the cited reference comparison
    Analytic,
    /// Monte Carlo run with a level-by-level convergence report
    Simulate {
        /// Root seed (overrides the config)
        #[arg(long)]
        seed: Option<u64>,
        /// Trial count (overrides the config)
        #[arg(long)]
        trials: Option<u64>,
        /// Worker threads for the trial loop (default: one per core)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Exact quantum verification battery; exit 0 iff every check passes
    Verify {
        /// Points per phase grid
        #[arg(long, default_value_t = 8)]
        phi_grid: usize,
    },
    /// Evaluate the closed-form rates along one parameter axis
    Sweep {
        /// Parameter to vary (a protocol field name, e.g. `eta_d` or `n`)
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
}

#[derive(Serialize)]
struct AnalyticRecord {
    t_total_s: f64,
    delta_f: f64,
    p_r: f64,
    p_b: f64,
    p_i: f64,
    eta_t: f64,
    t_local_s: f64,
    l0_km: f64,
    sps_t_total_s: f64,
    dlcz_t_total_s: f64,
    speedup_vs_sps: f64,
    speedup_vs_dlcz: f64,
    cavity_free_space_factor: Option<f64>,
    cavity_r_sn: Option<f64>,
}

#[derive(Serialize)]
struct SimulateRecord {
    level: u32,
    trials: u64,
    seed: u64,
    mc_mean_s: f64,
    std_error_s: f64,
    analytic_s: f64,
    ratio: f64,
    ratio_ci_low: f64,
    ratio_ci_high: f64,
    within_band: bool,
    attempts_mean: f64,
    success_rate: f64,
}

#[derive(Serialize)]
struct SweepRecord {
    axis: &'static str,
    value: f64,
    p_r: f64,
    p_b: f64,
    p_i: f64,
    eta_t: f64,
    t_local_s: f64,
    t_total_s: f64,
    delta_f: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config = RunConfig::resolve(cli.config.as_deref())?;
    let format = cli.output.unwrap_or(config.output);
    let path = cli.output_path.clone().or_else(|| config.output_path.clone());
    let path = path.as_deref();

    match cli.command {
        Command::Analytic => {
            let rows = analytic_rows(&config)?;
            emit(&render(&rows, format)?, path)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { seed, trials, threads } => {
            let mut sim_cfg = config.sim_config()?;
            if let Some(seed) = seed {
                sim_cfg.seed = seed;
            }
            if let Some(trials) = trials {
                sim_cfg.trials = trials;
            }
            let report = match threads {
                Some(threads) => rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .context("building worker pool")?
                    .install(|| convergence_report(&sim_cfg)),
                None => convergence_report(&sim_cfg),
            }?;
            let rows: Vec<SimulateRecord> = report
                .rows
                .iter()
                .map(|r| SimulateRecord {
                    level: r.level,
                    trials: r.trials,
                    seed: sim_cfg.seed,
                    mc_mean_s: r.mc_mean,
                    std_error_s: r.std_error,
                    analytic_s: r.analytic,
                    ratio: r.ratio,
                    ratio_ci_low: r.ratio_ci_low,
                    ratio_ci_high: r.ratio_ci_high,
                    within_band: r.within_band,
                    attempts_mean: r.attempts_mean,
                    success_rate: r.success_rate,
                })
                .collect();
            emit(&render(&rows, format)?, path)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { phi_grid } => {
            if phi_grid == 0 {
                bail!("--phi-grid must be at least 1");
            }
            let records = run_battery(&config.protocol, phi_grid);
            emit(&render(&records, format)?, path)?;
            if all_passed(&records) {
                Ok(ExitCode::SUCCESS)
            } else {
                let failing: Vec<&str> = records
                    .iter()
                    .filter(|r| !r.passed)
                    .map(|r| r.check.as_str())
                    .collect();
                eprintln!("failing checks: {}", failing.join(", "));
                Ok(ExitCode::from(1))
            }
        }
        Command::Sweep { axis, values } => {
            let axis: Axis = axis.parse()?;
            if values.is_empty() {
                bail!("--values must list at least one value");
            }
            let rows: Vec<SweepRecord> = sweep(&config.protocol, axis, &values)?
                .into_iter()
                .map(|row| SweepRecord {
                    axis: row.axis.name(),
                    value: row.value,
                    p_r: row.rates.p_r,
                    p_b: row.rates.p_b,
                    p_i: row.rates.p_i,
                    eta_t: row.rates.eta_t,
                    t_local_s: row.rates.t_local,
                    t_total_s: row.rates.t_total,
                    delta_f: row.rates.delta_f,
                })
                .collect();
            emit(&render(&rows, format)?, path)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn analytic_rows(config: &RunConfig) -> Result<Vec<AnalyticRecord>> {
    let params = &config.protocol;
    let rates = rate_breakdown(params)?;
    let reference = reference_comparison(params)?;
    let snr = config.cavity.as_ref().map(cavity_snr).transpose()?;
    Ok(vec![AnalyticRecord {
        t_total_s: rates.t_total,
        delta_f: fidelity_imperfection(params.n, params.p_d),
        p_r: rates.p_r,
        p_b: rates.p_b,
        p_i: rates.p_i,
        eta_t: rates.eta_t,
        t_local_s: rates.t_local,
        l0_km: params.l0(),
        sps_t_total_s: reference.sps_t_total,
        dlcz_t_total_s: reference.dlcz_t_total,
        speedup_vs_sps: reference.speedup_vs_sps,
        speedup_vs_dlcz: reference.speedup_vs_dlcz,
        cavity_free_space_factor: snr.map(|s| s.free_space),
        cavity_r_sn: snr.map(|s| s.r_sn),
    }])
}
