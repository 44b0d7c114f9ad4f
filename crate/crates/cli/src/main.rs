//! Command-line front end: synthetic fleets, network extraction, cascade
//! sweeps, incentive studies and the cohesive-set check.

mod config;
mod error;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evcascade::experiments::{self as exp, ExperimentPlan, IncentiveStudyConfig, Manifest, Strategy};
use evcascade::mobility::{self, io as mio, GeneratorConfig, MobilityConfig, Suitability};
use evcascade::proximity_net::{self as net, NetworkConfig, ProximityGraph};
use evcascade::rng::{content_hash, DEFAULT_MASTER_SEED};

use config::Settings;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "evcascade", version, about = "EV adoption cascades on vehicle proximity networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Master seed for every random stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// `key = value` settings file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write a gnuplot script for the results.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Network file written by `network`.
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long)]
    instances: Option<usize>,
    /// Time steps of six months (see --step-months).
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    step_months: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic telematics fleet.
    Gen {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vehicles: Option<usize>,
        #[arg(long)]
        suitable_fraction: Option<f64>,
        #[arg(long)]
        days: Option<u32>,
    },
    /// Infer homes and suitability, then extract the pruned network.
    Network {
        #[command(flatten)]
        common: Common,
        /// Event records CSV.
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long)]
        isolation_km: Option<f64>,
        #[arg(long)]
        edge_km: Option<f64>,
        #[arg(long)]
        min_degree: Option<usize>,
    },
    /// Adoption over time at one threshold.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Final adoption across a grid of thresholds.
    SweepAlpha {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Final adoption across a grid of seed fractions.
    SweepEta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_delimiter = ',')]
        etas: Option<Vec<f64>>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Discounted thresholds on a targeted set, random vs degree targeting.
    Incentive {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        /// |Γ| / |V \ S_0|.
        #[arg(long)]
        gamma: Option<f64>,
        /// Discount values in [0.5, 1].
        #[arg(long, value_delimiter = ',')]
        rho: Option<Vec<f64>>,
        /// `random`, `degree` or `both`.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Check final adopters against the maximal cohesive set on random
    /// small graphs.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        graphs: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
    },
}

/// Settings shared by every command once flags and config are merged.
struct Ctx {
    settings: Settings,
    seed: u64,
    out: PathBuf,
    jobs: usize,
    gnuplot: bool,
}

impl Ctx {
    fn new(common: &Common) -> Result<Self, CliError> {
        let settings = Settings::load(common.config.as_deref())?;
        Ok(Ctx {
            seed: settings.pick(common.seed, "seed", DEFAULT_MASTER_SEED)?,
            out: settings.pick(common.out.clone(), "out", PathBuf::from("."))?,
            jobs: settings.pick(common.jobs, "jobs", 0)?,
            gnuplot: common.gnuplot,
            settings,
        })
    }

    fn write(&self, name: &str, contents: &[u8]) -> Result<String, CliError> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))?;
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        Ok(name.to_string())
    }

    fn input(&self, flag: Option<PathBuf>, key: &str, default: &str) -> Result<PathBuf, CliError> {
        let path = match flag {
            Some(p) => p,
            None => self.settings.get::<PathBuf>(key)?.unwrap_or_else(|| self.out.join(default)),
        };
        if !path.exists() {
            return Err(CliError::Usage(format!("{}: no such file", path.display())));
        }
        Ok(path)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

struct LoadedNetwork {
    network: ProximityGraph,
    hash: String,
}

fn load_network(ctx: &Ctx, flag: Option<PathBuf>) -> Result<LoadedNetwork, CliError> {
    let path = ctx.input(flag, "network", "network.json")?;
    let text = read(&path)?;
    let (network, _) = net::network_from_json(&text)?;
    if network.is_empty() {
        return Err(CliError::Empty("network has no nodes".into()));
    }
    Ok(LoadedNetwork { network, hash: content_hash(text.as_bytes()) })
}

fn plan(ctx: &Ctx, sweep: &SweepArgs, alpha_grid: Vec<f64>, eta: f64, instances: usize) -> Result<ExperimentPlan, CliError> {
    let s = &ctx.settings;
    let plan = ExperimentPlan {
        alpha_grid,
        eta,
        horizon_steps: s.pick(sweep.horizon, "horizon", exp::DEFAULT_HORIZON)?,
        step_months: s.pick(sweep.step_months, "step-months", exp::DEFAULT_STEP_MONTHS)?,
        n_instances: s.pick(sweep.instances, "instances", instances)?,
        master_seed: ctx.seed,
    };
    plan.validate()?;
    Ok(plan)
}

fn manifest(
    experiment: &str,
    plan: &ExperimentPlan,
    parameters: &[(&str, String)],
    loaded: &LoadedNetwork,
    instance_seeds: Vec<u64>,
    outputs: Vec<String>,
) -> String {
    Manifest {
        experiment: experiment.to_string(),
        plan: plan.clone(),
        parameters: parameters.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>(),
        network_hash: loaded.hash.clone(),
        network_nodes: loaded.network.len(),
        instance_seeds,
        outputs,
    }
    .to_json()
}

fn list(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_gen(common: Common, vehicles: Option<usize>, fraction: Option<f64>, days: Option<u32>) -> Result<(), CliError> {
    let ctx = Ctx::new(&common)?;
    let s = &ctx.settings;
    let defaults = GeneratorConfig::default();
    let config = GeneratorConfig {
        n_vehicles: s.pick(vehicles, "vehicles", defaults.n_vehicles)?,
        suitable_fraction: s.pick(fraction, "suitable-fraction", defaults.suitable_fraction)?,
        days: s.pick(days, "days", defaults.days)?,
        ..defaults
    };
    let fleet = mobility::generate_synthetic_fleet(&config, ctx.seed)?;
    let mut records = Vec::new();
    mio::write_records(&mut records, &fleet.records)?;
    ctx.write("records.csv", &records)?;
    let mut planted = Vec::new();
    mio::write_planted(&mut planted, &fleet.planted)?;
    ctx.write("planted.csv", &planted)?;

    let suitable = fleet.planted.iter().filter(|p| p.suitability == Suitability::PerfectlySuitable).count();
    println!("vehicles:          {}", fleet.planted.len());
    println!("event records:     {}", fleet.records.len());
    println!(
        "suitable fraction: {:.3} ({suitable} perfectly suitable)",
        suitable as f64 / fleet.planted.len() as f64
    );
    Ok(())
}

fn cmd_network(
    common: Common,
    records: Option<PathBuf>,
    isolation_km: Option<f64>,
    edge_km: Option<f64>,
    min_degree: Option<usize>,
) -> Result<(), CliError> {
    let ctx = Ctx::new(&common)?;
    let s = &ctx.settings;
    let path = ctx.input(records, "records", "records.csv")?;
    let file = fs::File::open(&path).map_err(|e| CliError::io(&path, e))?;
    let records = mio::read_records(std::io::BufReader::new(file))?;
    let build = mobility::build_profiles(&records, &MobilityConfig::default());
    for w in &build.warnings {
        eprintln!("warning: {}: {}", w.vehicle_id, w.message);
    }
    let defaults = NetworkConfig::default();
    let config = NetworkConfig {
        isolation_km: s.pick(isolation_km, "isolation-km", defaults.isolation_km)?,
        edge_rule_km: s.pick(edge_km, "edge-km", defaults.edge_rule_km)?,
        min_degree: s.pick(min_degree, "min-degree", defaults.min_degree)?,
        sigma: defaults.sigma,
    };
    let mut profiles = Vec::new();
    mio::write_profiles(&mut profiles, &build.profiles)?;
    ctx.write("profiles.csv", &profiles)?;

    let built = net::extract_network(&build.profiles, &config)?;
    ctx.write("network.json", net::network_to_json(&built.network, Some(&built.report)).as_bytes())?;
    let suitable = built.network.suitable_nodes().len();
    let g = built.network.graph();
    let report = format!(
        "vehicles with records:           {}\n\
         excluded (no home):              {}\n\
         {}\n\
         edges:                           {}\n\
         degree min / max:                {} / {}\n\
         perfectly suitable in network:   {suitable}\n",
        build.profiles.len() + build.excluded.len(),
        build.excluded.len(),
        built.report,
        g.edge_count(),
        g.min_degree().unwrap_or(0),
        g.max_degree().unwrap_or(0),
    );
    ctx.write("prune_report.txt", report.as_bytes())?;
    print!("{report}");
    Ok(())
}

fn cmd_simulate(common: Common, sweep: SweepArgs, alpha: Option<f64>, eta: Option<f64>) -> Result<(), CliError> {
    let ctx = Ctx::new(&common)?;
    let alpha = ctx.settings.pick(alpha, "alpha", exp::DEFAULT_ALPHA)?;
    let eta = ctx.settings.pick(eta, "eta", exp::DEFAULT_ETA)?;
    let plan = plan(&ctx, &sweep, vec![alpha], eta, exp::DEFAULT_INSTANCES)?;
    let loaded = load_network(&ctx, sweep.network)?;
    let result = exp::sweep_time(&plan, &loaded.network, alpha, ctx.jobs)?;

    let mut outputs = vec![
        ctx.write("trajectory.csv", exp::trajectory_csv(&result, plan.step_months).as_bytes())?,
        ctx.write("trajectory_summary.csv", exp::trajectory_summary_csv(&result, plan.step_months).as_bytes())?,
    ];
    if ctx.gnuplot {
        let script = exp::gnuplot_script(&[("trajectory_summary.csv", "mean")], "t (steps)", "trajectory.png");
        outputs.push(ctx.write("trajectory.gp", script.as_bytes())?);
    }
    let seeds = result.runs.iter().map(|r| r.instance_seed).collect();
    let m = manifest("simulate", &plan, &[("alpha", alpha.to_string())], &loaded, seeds, outputs);
    ctx.write("simulate_manifest.json", m.as_bytes())?;
    for (t, (mean, std)) in result.mean.iter().zip(&result.std).enumerate() {
        println!("t = {t:>2}  mean {mean:.4}  std {std:.4}");
    }
    Ok(())
}

fn write_sweep(ctx: &Ctx, stem: &str, sweep: &exp::ParamSweep, xlabel: &str) -> Result<Vec<String>, CliError> {
    let summary = format!("{stem}_summary.csv");
    let mut outputs = vec![
        ctx.write(&format!("{stem}_finals.csv"), exp::finals_csv(sweep).as_bytes())?,
        ctx.write(&summary, exp::summary_csv(sweep).as_bytes())?,
    ];
    if ctx.gnuplot {
        let script = exp::gnuplot_script(&[(&summary, "mean")], xlabel, &format!("{stem}.png"));
        outputs.push(ctx.write(&format!("{stem}.gp"), script.as_bytes())?);
    }
    Ok(outputs)
}

fn print_points(name: &str, sweep: &exp::ParamSweep) {
    for p in &sweep.points {
        println!("{name} = {:<6} mean {:.4}  std {:.4}", p.param, p.mean, p.std);
    }
}

fn cmd_sweep_alpha(common: Common, sweep: SweepArgs, alphas: Option<Vec<f64>>, eta: Option<f64>) -> Result<(), CliError> {
    let ctx = Ctx::new(&common)?;
    let grid = ctx.settings.pick_list(alphas, "alphas", exp::default_alpha_grid())?;
    let eta = ctx.settings.pick(eta, "eta", exp::DEFAULT_ETA)?;
    let plan = plan(&ctx, &sweep, grid, eta, exp::DEFAULT_INSTANCES)?;
    let loaded = load_network(&ctx, sweep.network)?;
    let result = exp::sweep_alpha(&plan, &loaded.network, ctx.jobs)?;
    let outputs = write_sweep(&ctx, "alpha", &result, "alpha")?;
    let m = manifest("sweep-alpha", &plan, &[], &loaded, result.instance_seeds.clone(), outputs);
    ctx.write("alpha_manifest.json", m.as_bytes())?;
    print_points("alpha", &result);
    Ok(())
}

fn cmd_sweep_eta(common: Common, sweep: SweepArgs, etas: Option<Vec<f64>>, alpha: Option<f64>) -> Result<(), CliError> {
    let ctx = Ctx::new(&common)?;
    let grid = ctx.settings.pick_list(etas, "etas", exp::default_eta_grid())?;
    let alpha = ctx.settings.pick(alpha, "alpha", exp::DEFAULT_ALPHA)?;
    let first = *grid.first().ok_or_else(|| CliError::Usage("empty eta grid".into()))?;
    let plan = plan(&ctx, &sweep, vec![alpha], first, exp::DEFAULT_INSTANCES)?;
    let loaded = load_network(&ctx, sweep.network)?;
    let result = exp::sweep_eta(&plan, &loaded.network, alpha, &grid, ctx.jobs)?;
    let outputs = write_sweep(&ctx, "eta", &result, "eta")?;
    let params = [("alpha", alpha.to_string()), ("etas", list(&grid))];
    let m = manifest("sweep-eta", &plan, &params, &loaded, result.instance_seeds.clone(), outputs);
    ctx.write("eta_manifest.json", m.as_bytes())?;
    print_points("eta", &result);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_incentive(
    common: Common,
    sweep: SweepArgs,
    alpha: Option<f64>,
    eta: Option<f64>,
    gamma: Option<f64>,
    rho: Option<Vec<f64>>,
    strategy: Option<String>,
) -> Result<(), CliError> {
    let ctx = Ctx::new(&common)?;
    let s = &ctx.settings;
    let alpha = s.pick(alpha, "alpha", exp::DEFAULT_ALPHA)?;
    let eta = s.pick(eta, "eta", exp::INCENTIVE_ETA)?;
    let strategies = match s.pick(strategy, "strategy", "both".to_string())?.as_str() {
        "both" => Strategy::ALL.to_vec(),
        other => vec![other.parse::<Strategy>()?],
    };
    let config = IncentiveStudyConfig {
        alpha,
        gamma_fraction: s.pick(gamma, "gamma", exp::DEFAULT_GAMMA_FRACTION)?,
        rho_grid: s.pick_list(rho, "rho", exp::default_rho_grid())?,
        strategies,
    };
    let plan = plan(&ctx, &sweep, vec![alpha], eta, exp::INCENTIVE_INSTANCES)?;
    let loaded = load_network(&ctx, sweep.network)?;
    let study = exp::incentive_study(&plan, &loaded.network, &config, ctx.jobs)?;

    let mut outputs = Vec::new();
    let mut series = Vec::new();
    for (strategy, curve) in &study.curves {
        let stem = format!("incentive_{}", strategy.as_str());
        outputs.push(ctx.write(&format!("{stem}_finals.csv"), exp::finals_csv(curve).as_bytes())?);
        outputs.push(ctx.write(&format!("{stem}_summary.csv"), exp::summary_csv(curve).as_bytes())?);
        series.push((format!("{stem}_summary.csv"), strategy.as_str()));
    }
    if ctx.gnuplot {
        let refs: Vec<(&str, &str)> = series.iter().map(|(c, t)| (c.as_str(), *t)).collect();
        outputs.push(ctx.write("incentive.gp", exp::gnuplot_script(&refs, "rho", "incentive.png").as_bytes())?);
    }
    let params = [
        ("alpha", alpha.to_string()),
        ("gamma_fraction", config.gamma_fraction.to_string()),
        ("rho", list(&config.rho_grid)),
        ("strategies", config.strategies.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(",")),
    ];
    let instance_seeds = study.curves[0].1.instance_seeds.clone();
    let m = manifest("incentive", &plan, &params, &loaded, instance_seeds, outputs);
    ctx.write("incentive_manifest.json", m.as_bytes())?;
    for (strategy, curve) in &study.curves {
        for p in &curve.points {
            println!("{:<6} rho = {:<4} mean {:.4}  std {:.4}", strategy.as_str(), p.param, p.mean, p.std);
        }
    }
    Ok(())
}

fn cmd_verify(common: Common, graphs: Option<usize>, max_n: Option<usize>) -> Result<(), CliError> {
    let ctx = Ctx::new(&common)?;
    let graphs = ctx.settings.pick(graphs, "graphs", 200)?;
    let max_n = ctx.settings.pick(max_n, "max-n", 12)?;
    let cases = exp::cohesive_battery(graphs, max_n, ctx.seed, ctx.jobs)?;
    ctx.write("verify.csv", exp::battery_csv(&cases).as_bytes())?;
    let bad: Vec<usize> = cases.iter().filter(|c| !(c.holds && c.peel_matches)).map(|c| c.index).collect();
    println!("graphs checked: {}", cases.len());
    println!("mismatches:     {}", bad.len());
    if !bad.is_empty() {
        return Err(CliError::Verification(format!("final adopters differ from V \\ Omega on graphs {bad:?}")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { common, vehicles, suitable_fraction, days } => cmd_gen(common, vehicles, suitable_fraction, days),
        Command::Network { common, records, isolation_km, edge_km, min_degree } => {
            cmd_network(common, records, isolation_km, edge_km, min_degree)
        }
        Command::Simulate { common, sweep, alpha, eta } => cmd_simulate(common, sweep, alpha, eta),
        Command::SweepAlpha { common, sweep, alphas, eta } => cmd_sweep_alpha(common, sweep, alphas, eta),
        Command::SweepEta { common, sweep, etas, alpha } => cmd_sweep_eta(common, sweep, etas, alpha),
        Command::Incentive { common, sweep, alpha, eta, gamma, rho, strategy } => {
            cmd_incentive(common, sweep, alpha, eta, gamma, rho, strategy)
        }
        Command::Verify { common, graphs, max_n } => cmd_verify(common, graphs, max_n),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
