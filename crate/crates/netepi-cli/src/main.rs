//! netepi: epidemic thresholds, vaccination analytics, and Monte Carlo
//! simulation on weighted configuration-model graphs.
//!
//! Settings come from an optional flat `key = value` file (`--config`)
//! with command-line flags taking precedence. Every CSV the tool emits
//! starts with a comment line echoing the effective settings and seed, so
//! a result file is its own reproduction recipe. Exit codes: 0 success,
//! 1 I/O failure, 2 parse error, 3 domain error, 4 validation failure.

mod cmds;
mod csvout;

use clap::{Args, Parser, Subcommand};
use netepi::config::ConfigMap;
use netepi::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "netepi",
    version,
    about = "Epidemics and vaccination on weighted random graphs"
)]
struct Cli {
    /// Flat key = value settings file; flags override its entries.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed; everything random is a pure function of it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path (CSV, or the graph file for `generate`); stdout if absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker thread cap for parallel ensembles; default all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Vertex count for generated graphs.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Monte Carlo run count.
    #[arg(long, global = true)]
    runs: Option<usize>,

    /// Output format; csv is the only supported value.
    #[arg(long, global = true)]
    format: Option<String>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reproduction numbers for a degree distribution and transmission rule.
    Threshold(ThresholdArgs),
    /// Figure-style curves: tau sweeps, equal-coverage R curves, or
    /// sampled-fraction cost curves.
    Sweep(SweepArgs),
    /// Critical vaccination coverage per strategy.
    Coverage(CoverageArgs),
    /// Analytic-vs-simulated cross-checks; exits 4 if any row fails.
    Validate(ValidateArgs),
    /// Generate a weighted graph and save it.
    Generate(GenerateArgs),
    /// Run one simulation ensemble and report R and outbreak statistics.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct ThresholdArgs {
    /// Degree distribution, e.g. poisson(6) or powerlaw(3.5, mean=14).
    #[arg(long)]
    degree: Option<String>,
    /// Mean transmission weight, for weights independent of degree.
    #[arg(long)]
    gamma: Option<f64>,
    /// Degree-dependent weight rule, e.g. indicator(3) or power(0.7).
    #[arg(long)]
    g: Option<String>,
    /// Full weight model, e.g. uniform or beta(0.5,2.5).
    #[arg(long)]
    weight: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// What to sweep: tau, coverage, or sampled.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    weight: Option<String>,
    /// Grid as start:stop:step or a comma list; empty for a header-only CSV.
    #[arg(long)]
    grid: Option<String>,
    /// Comma list of strategies: uniform, acq, acq_weight, twopoint.
    #[arg(long)]
    strategies: Option<String>,
    /// Graphs per grid point for sampled-fraction curves.
    #[arg(long)]
    replicates: Option<usize>,
}

#[derive(Args)]
struct CoverageArgs {
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    strategies: Option<String>,
    /// Accept the critical parameter once |R - 1| is below this.
    #[arg(long)]
    tol: Option<f64>,
    /// Upper search limit for the acquaintance sampling intensity.
    #[arg(long)]
    beta_cap: Option<f64>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    weight: Option<String>,
    /// Override the analytic mean transmission weight; a deliberate
    /// mismatch with the simulated weights must produce fail rows.
    #[arg(long)]
    assume_gamma: Option<f64>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    weight: Option<String>,
    /// Also export the edge list as CSV here.
    #[arg(long, value_name = "PATH")]
    edges_csv: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Previously generated graph file; otherwise a graph is generated
    /// from --degree/--weight/--n.
    #[arg(long, value_name = "PATH")]
    graph: Option<PathBuf>,
    #[arg(long)]
    degree: Option<String>,
    #[arg(long)]
    weight: Option<String>,
    /// Vaccination strategy: uniform, acq, acq_weight, or twopoint.
    #[arg(long)]
    strategy: Option<String>,
    /// Strategy parameter (v, beta, or s). Default 0: no vaccination.
    #[arg(long)]
    parameter: Option<f64>,
    /// Identifier for the CSV row.
    #[arg(long)]
    id: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("netepi: {e}");
            ExitCode::from(match e {
                Error::Io(_) => 1,
                Error::Parse { .. } => 2,
                _ => 3,
            })
        }
    }
}

/// Ok(false) means the command ran but its checks failed (exit 4).
fn run(cli: &Cli) -> Result<bool, Error> {
    let cfg = build_config(cli)?;
    if let Some(fmt) = cfg.get("format") {
        if fmt != "csv" {
            return Err(Error::Parse {
                line: cfg.line("format"),
                msg: format!("unsupported format `{fmt}`; only csv"),
            });
        }
    }
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Parameter("threads must be at least 1".into()));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let out = cli.out.as_deref();
    match &cli.cmd {
        Cmd::Threshold(_) => cmds::threshold(&cfg, out).map(|()| true),
        Cmd::Sweep(_) => cmds::sweep(&cfg, out).map(|()| true),
        Cmd::Coverage(_) => cmds::coverage(&cfg, out).map(|()| true),
        Cmd::Validate(_) => cmds::validate(&cfg, out),
        Cmd::Generate(a) => {
            cmds::generate(&cfg, out, a.edges_csv.as_deref()).map(|()| true)
        }
        Cmd::Simulate(_) => cmds::simulate(&cfg, out).map(|()| true),
    }
}

/// Merges the config file with command-line overrides. Output locations
/// and the thread cap stay out of the map so they never reach the CSV
/// comment line: results must not depend on where they are written or on
/// how many workers computed them.
fn build_config(cli: &Cli) -> Result<ConfigMap, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ConfigMap::from_file(path)?,
        None => ConfigMap::new(),
    };
    let mut set = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            cfg.set_arg(key, v);
        }
    };
    set("seed", cli.seed.map(|v| v.to_string()));
    set("n", cli.n.map(|v| v.to_string()));
    set("runs", cli.runs.map(|v| v.to_string()));
    set("format", cli.format.clone());
    match &cli.cmd {
        Cmd::Threshold(a) => {
            set("degree", a.degree.clone());
            set("gamma", a.gamma.map(|v| v.to_string()));
            set("g", a.g.clone());
            set("weight", a.weight.clone());
        }
        Cmd::Sweep(a) => {
            set("kind", a.kind.clone());
            set("degree", a.degree.clone());
            set("weight", a.weight.clone());
            set("grid", a.grid.clone());
            set("strategies", a.strategies.clone());
            set("replicates", a.replicates.map(|v| v.to_string()));
        }
        Cmd::Coverage(a) => {
            set("degree", a.degree.clone());
            set("weight", a.weight.clone());
            set("strategies", a.strategies.clone());
            set("tol", a.tol.map(|v| v.to_string()));
            set("beta_cap", a.beta_cap.map(|v| v.to_string()));
        }
        Cmd::Validate(a) => {
            set("degree", a.degree.clone());
            set("weight", a.weight.clone());
            set("assume_gamma", a.assume_gamma.map(|v| v.to_string()));
        }
        Cmd::Generate(a) => {
            set("degree", a.degree.clone());
            set("weight", a.weight.clone());
        }
        Cmd::Simulate(a) => {
            set(
                "graph",
                a.graph.as_ref().map(|p| p.display().to_string()),
            );
            set("degree", a.degree.clone());
            set("weight", a.weight.clone());
            set("strategy", a.strategy.clone());
            set("parameter", a.parameter.map(|v| v.to_string()));
            set("id", a.id.clone());
        }
    }
    drop(set);
    if cfg.get("seed").is_none() {
        cfg.set_arg("seed", "0");
    }
    Ok(cfg)
}
