//! Monte Carlo experiments over a pruned proximity network: seed
//! sampling, sweeps over time, α and η, and incentive targeting.
//!
//! Every instance draws from its own stream `(master, name, i)`. The
//! time, α and η sweeps share the `"seeding"` stream, so instance `i`
//! sees the same permutation of `C_1` everywhere and seed sets for
//! growing η are nested. Incentive studies use the `"incentive"` stream.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cascade::{self, CascadeError, Thresholds};
use crate::graph::Graph;
use crate::proximity_net::ProximityGraph;
use crate::rng::{derive_seed, stream, StreamRng};

pub const DEFAULT_HORIZON: usize = 10;
pub const DEFAULT_STEP_MONTHS: u32 = 6;
pub const DEFAULT_ALPHA: f64 = 0.15;
pub const DEFAULT_ETA: f64 = 0.25;
pub const DEFAULT_INSTANCES: usize = 20;
pub const DEFAULT_GAMMA_FRACTION: f64 = 0.15;
pub const INCENTIVE_ETA: f64 = 0.10;
pub const INCENTIVE_INSTANCES: usize = 100;

pub const SEEDING_STREAM: &str = "seeding";
pub const INCENTIVE_STREAM: &str = "incentive";

pub fn default_alpha_grid() -> Vec<f64> {
    vec![0.01, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.7]
}

pub fn default_eta_grid() -> Vec<f64> {
    vec![0.1, 0.15, 0.2, 0.25, 0.35, 0.5, 0.65, 0.8, 0.95]
}

pub fn default_rho_grid() -> Vec<f64> {
    vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("invalid incentive: {0}")]
    InvalidIncentive(String),
    #[error("no suitable agents")]
    NoSuitableAgents,
    #[error("eta = {eta} of {suitable} suitable agents rounds to an empty seed set")]
    EmptySeedSet { eta: f64, suitable: usize },
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// `x` rounded to the nearest integer, halves upward. Values within
/// `1e-9` of a half count as the half, absorbing products like
/// `0.15 * 30`.
pub fn round_half_up(x: f64) -> usize {
    if x <= 0.0 {
        return 0;
    }
    (x + 0.5 + 1e-9).floor() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub alpha_grid: Vec<f64>,
    pub eta: f64,
    pub horizon_steps: usize,
    pub step_months: u32,
    pub n_instances: usize,
    pub master_seed: u64,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            alpha_grid: vec![DEFAULT_ALPHA],
            eta: DEFAULT_ETA,
            horizon_steps: DEFAULT_HORIZON,
            step_months: DEFAULT_STEP_MONTHS,
            n_instances: DEFAULT_INSTANCES,
            master_seed: crate::rng::DEFAULT_MASTER_SEED,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<(), ExperimentError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ExperimentError::InvalidPlan(format!("alpha {alpha} outside [0, 1]")));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<(), ExperimentError> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(ExperimentError::InvalidPlan(format!("eta {eta} outside (0, 1]")));
    }
    Ok(())
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.alpha_grid.is_empty() {
            return Err(ExperimentError::InvalidPlan("empty alpha grid".into()));
        }
        self.alpha_grid.iter().try_for_each(|&a| check_alpha(a))?;
        check_eta(self.eta)?;
        if self.n_instances == 0 {
            return Err(ExperimentError::InvalidPlan("n_instances must be at least 1".into()));
        }
        if self.step_months == 0 {
            return Err(ExperimentError::InvalidPlan("step_months must be at least 1".into()));
        }
        Ok(())
    }

    pub fn instance_seed(&self, name: &str, instance: usize) -> u64 {
        derive_seed(self.master_seed, name, instance as u64)
    }
}

/// Uniformly random order of the suitable class `C_1`.
pub fn seed_order(suitable: &[usize], rng: &mut StreamRng) -> Vec<usize> {
    let mut order = suitable.to_vec();
    order.shuffle(rng);
    order
}

/// The first `round(η·|C_1|)` entries of a random order, sorted.
fn seeds_from_order(order: &[usize], eta: f64) -> Result<Vec<usize>, ExperimentError> {
    if order.is_empty() {
        return Err(ExperimentError::NoSuitableAgents);
    }
    check_eta(eta)?;
    let k = round_half_up(eta * order.len() as f64).min(order.len());
    if k == 0 {
        return Err(ExperimentError::EmptySeedSet { eta, suitable: order.len() });
    }
    let mut seeds = order[..k].to_vec();
    seeds.sort_unstable();
    Ok(seeds)
}

/// Draws `S_0` uniformly without replacement from the suitable agents.
pub fn sample_seeds(network: &ProximityGraph, eta: f64, rng: &mut StreamRng) -> Result<Vec<usize>, ExperimentError> {
    let order = seed_order(&network.suitable_nodes(), rng);
    seeds_from_order(&order, eta)
}

/// One cascade instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub instance: usize,
    pub instance_seed: u64,
    /// `|S*_t|` for `t = 0..=T`, held constant after convergence.
    pub cumulative: Vec<usize>,
    /// `Δa(t) = |S*_t| / |V|`.
    pub trajectory: Vec<f64>,
    pub final_fraction: f64,
    pub converged: bool,
}

impl RunResult {
    pub fn seed_count(&self) -> usize {
        self.cumulative[0]
    }
}

pub fn run_instance(
    graph: &Graph,
    thresholds: &Thresholds,
    seeds: &[usize],
    horizon: usize,
    instance: usize,
    instance_seed: u64,
) -> Result<RunResult, ExperimentError> {
    let state = cascade::run(graph, thresholds, seeds, horizon)?;
    let mut cumulative = state.cumulative_counts();
    let last = *cumulative.last().expect("at least S_0");
    cumulative.resize(horizon + 1, last);
    let n = graph.len().max(1) as f64;
    let trajectory: Vec<f64> = cumulative.iter().map(|&c| c as f64 / n).collect();
    let final_fraction = *trajectory.last().expect("horizon + 1 entries");
    Ok(RunResult { instance, instance_seed, cumulative, trajectory, final_fraction, converged: state.converged })
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Runs `f` for each instance on `jobs` workers (0 = rayon's default) and
/// returns results in instance order.
fn par_instances<T, F>(n: usize, jobs: usize, f: F) -> Result<Vec<T>, ExperimentError>
where
    T: Send,
    F: Fn(usize) -> Result<T, ExperimentError> + Sync + Send,
{
    let work = || (0..n).into_par_iter().map(&f).collect::<Result<Vec<T>, _>>();
    if jobs == 0 {
        return work();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ExperimentError::ThreadPool(e.to_string()))?
        .install(work)
}

/// Adoption over time at a single α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSweep {
    pub alpha: f64,
    pub eta: f64,
    pub runs: Vec<RunResult>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl TimeSweep {
    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("horizon + 1 entries")
    }
}

pub fn sweep_time(plan: &ExperimentPlan, network: &ProximityGraph, alpha: f64, jobs: usize) -> Result<TimeSweep, ExperimentError> {
    plan.validate()?;
    check_alpha(alpha)?;
    let suitable = network.suitable_nodes();
    let thresholds = Thresholds::uniform(network.len(), alpha)?;
    let runs = par_instances(plan.n_instances, jobs, |i| {
        let seed = plan.instance_seed(SEEDING_STREAM, i);
        let mut rng = stream(plan.master_seed, SEEDING_STREAM, i as u64);
        let seeds = seeds_from_order(&seed_order(&suitable, &mut rng), plan.eta)?;
        run_instance(network.graph(), &thresholds, &seeds, plan.horizon_steps, i, seed)
    })?;
    let (mean, std) = (0..=plan.horizon_steps)
        .map(|t| mean_std(&runs.iter().map(|r| r.trajectory[t]).collect::<Vec<_>>()))
        .unzip();
    Ok(TimeSweep { alpha, eta: plan.eta, runs, mean, std })
}

/// Final adoption at one grid value across all instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub finals: Vec<f64>,
    /// `|S_0| / |V|` per instance.
    pub seed_fractions: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl SweepPoint {
    fn new(param: f64, finals: Vec<f64>, seed_fractions: Vec<f64>) -> Self {
        let (mean, std) = mean_std(&finals);
        SweepPoint { param, finals, seed_fractions, mean, std }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.std / (self.finals.len() as f64).sqrt()
    }

    pub fn mean_seed_fraction(&self) -> f64 {
        mean_std(&self.seed_fractions).0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSweep {
    pub param_name: String,
    pub instance_seeds: Vec<u64>,
    pub points: Vec<SweepPoint>,
}

impl ParamSweep {
    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean).collect()
    }
}

/// Transposes per-instance rows of `(final, seed fraction)` into sweep
/// points.
fn collect_points(name: &str, grid: &[f64], seeds: Vec<u64>, rows: Vec<Vec<(f64, f64)>>) -> ParamSweep {
    let points = grid
        .iter()
        .enumerate()
        .map(|(j, &param)| {
            let (finals, fracs) = rows.iter().map(|r| r[j]).unzip();
            SweepPoint::new(param, finals, fracs)
        })
        .collect();
    ParamSweep { param_name: name.to_string(), instance_seeds: seeds, points }
}

/// Final adoption for every α in `plan.alpha_grid`, with the same seed
/// set per instance across the grid.
pub fn sweep_alpha(plan: &ExperimentPlan, network: &ProximityGraph, jobs: usize) -> Result<ParamSweep, ExperimentError> {
    plan.validate()?;
    let suitable = network.suitable_nodes();
    let n = network.len() as f64;
    let grid: Vec<Thresholds> = plan
        .alpha_grid
        .iter()
        .map(|&a| Thresholds::uniform(network.len(), a))
        .collect::<Result<_, _>>()?;
    let rows = par_instances(plan.n_instances, jobs, |i| {
        let mut rng = stream(plan.master_seed, SEEDING_STREAM, i as u64);
        let seeds = seeds_from_order(&seed_order(&suitable, &mut rng), plan.eta)?;
        grid.iter()
            .map(|th| {
                let r = run_instance(network.graph(), th, &seeds, plan.horizon_steps, i, 0)?;
                Ok((r.final_fraction, seeds.len() as f64 / n))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()
    })?;
    let seeds = (0..plan.n_instances).map(|i| plan.instance_seed(SEEDING_STREAM, i)).collect();
    Ok(collect_points("alpha", &plan.alpha_grid, seeds, rows))
}

/// Final adoption for every η in `eta_grid` at a single α. Seed sets are
/// nested prefixes of one random order of `C_1` per instance.
pub fn sweep_eta(
    plan: &ExperimentPlan,
    network: &ProximityGraph,
    alpha: f64,
    eta_grid: &[f64],
    jobs: usize,
) -> Result<ParamSweep, ExperimentError> {
    plan.validate()?;
    check_alpha(alpha)?;
    if eta_grid.is_empty() {
        return Err(ExperimentError::InvalidPlan("empty eta grid".into()));
    }
    eta_grid.iter().try_for_each(|&e| check_eta(e))?;
    let suitable = network.suitable_nodes();
    let n = network.len() as f64;
    let thresholds = Thresholds::uniform(network.len(), alpha)?;
    let rows = par_instances(plan.n_instances, jobs, |i| {
        let mut rng = stream(plan.master_seed, SEEDING_STREAM, i as u64);
        let order = seed_order(&suitable, &mut rng);
        eta_grid
            .iter()
            .map(|&eta| {
                let seeds = seeds_from_order(&order, eta)?;
                let r = run_instance(network.graph(), &thresholds, &seeds, plan.horizon_steps, i, 0)?;
                Ok((r.final_fraction, seeds.len() as f64 / n))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()
    })?;
    let seeds = (0..plan.n_instances).map(|i| plan.instance_seed(SEEDING_STREAM, i)).collect();
    Ok(collect_points("eta", eta_grid, seeds, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[serde(rename = "random")]
    RandomSampling,
    #[serde(rename = "degree")]
    DegreeBased,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::RandomSampling, Strategy::DegreeBased];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::RandomSampling => "random",
            Strategy::DegreeBased => "degree",
        }
    }
}

impl FromStr for Strategy {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Strategy::RandomSampling),
            "degree" => Ok(Strategy::DegreeBased),
            _ => Err(ExperimentError::InvalidIncentive(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncentiveSpec {
    pub gamma_fraction: f64,
    pub rho: f64,
    pub strategy: Strategy,
}

impl IncentiveSpec {
    pub fn new(gamma_fraction: f64, rho: f64, strategy: Strategy) -> Result<Self, ExperimentError> {
        let spec = IncentiveSpec { gamma_fraction, rho, strategy };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(0.0..=1.0).contains(&self.gamma_fraction) {
            return Err(ExperimentError::InvalidIncentive(format!(
                "gamma fraction {} outside [0, 1]",
                self.gamma_fraction
            )));
        }
        check_rho(self.rho)
    }
}

fn check_rho(rho: f64) -> Result<(), ExperimentError> {
    if !(0.5..=1.0).contains(&rho) {
        return Err(ExperimentError::InvalidIncentive(format!("rho {rho} outside [0.5, 1]")));
    }
    Ok(())
}

/// `|Γ| = round(γ·|V \ S_0|)`, clamped to the candidate count.
pub fn gamma_size(gamma_fraction: f64, candidates: usize) -> usize {
    let k = round_half_up(gamma_fraction * candidates as f64);
    if k > candidates {
        log::warn!("incentive set of {k} exceeds {candidates} candidates; clamped");
        return candidates;
    }
    k
}

/// Picks `Γ ⊆ V \ S_0` of size `k`. Degree targeting breaks ties by
/// ascending node index, which is agent-id order on a proximity graph.
pub fn select_gamma<R: Rng + ?Sized>(
    graph: &Graph,
    seeds: &[usize],
    k: usize,
    strategy: Strategy,
    rng: &mut R,
) -> Vec<usize> {
    let mut is_seed = vec![false; graph.len()];
    for &s in seeds {
        is_seed[s] = true;
    }
    let mut candidates: Vec<usize> = (0..graph.len()).filter(|&v| !is_seed[v]).collect();
    let k = k.min(candidates.len());
    match strategy {
        Strategy::RandomSampling => {
            candidates.shuffle(rng);
        }
        Strategy::DegreeBased => {
            candidates.sort_by(|&a, &b| graph.degree(b).cmp(&graph.degree(a)).then(a.cmp(&b)));
        }
    }
    let mut gamma = candidates[..k].to_vec();
    gamma.sort_unstable();
    gamma
}

/// `α_v = (1 - ρ)·α_v` on `Γ`; other thresholds untouched.
pub fn discount_thresholds(base: &Thresholds, gamma: &[usize], rho: f64) -> Result<Thresholds, ExperimentError> {
    let mut th = base.clone();
    for &v in gamma {
        if v >= th.len() {
            return Err(CascadeError::UnknownNode(v).into());
        }
        th.set(v, ((1.0 - rho) * base.get(v)).clamp(0.0, 1.0))?;
    }
    Ok(th)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Incentive {
    pub thresholds: Thresholds,
    pub gamma: Vec<usize>,
}

pub fn apply_incentive<R: Rng + ?Sized>(
    thresholds: &Thresholds,
    spec: &IncentiveSpec,
    graph: &Graph,
    seeds: &[usize],
    rng: &mut R,
) -> Result<Incentive, ExperimentError> {
    spec.validate()?;
    if let Some(&s) = seeds.iter().find(|&&s| s >= graph.len()) {
        return Err(CascadeError::UnknownSeed(s).into());
    }
    let mut distinct = seeds.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let k = gamma_size(spec.gamma_fraction, graph.len() - distinct.len());
    let gamma = select_gamma(graph, &distinct, k, spec.strategy, rng);
    let thresholds = discount_thresholds(thresholds, &gamma, spec.rho)?;
    Ok(Incentive { thresholds, gamma })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncentiveStudyConfig {
    pub alpha: f64,
    pub gamma_fraction: f64,
    pub rho_grid: Vec<f64>,
    pub strategies: Vec<Strategy>,
}

impl Default for IncentiveStudyConfig {
    fn default() -> Self {
        IncentiveStudyConfig {
            alpha: DEFAULT_ALPHA,
            gamma_fraction: DEFAULT_GAMMA_FRACTION,
            rho_grid: default_rho_grid(),
            strategies: Strategy::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncentiveStudy {
    pub alpha: f64,
    pub gamma_fraction: f64,
    pub curves: Vec<(Strategy, ParamSweep)>,
}

impl IncentiveStudy {
    pub fn curve(&self, strategy: Strategy) -> Option<&ParamSweep> {
        self.curves.iter().find(|(s, _)| *s == strategy).map(|(_, c)| c)
    }
}

/// Final adoption per ρ and strategy. Each instance fixes `S_0` and the
/// random `Γ` once, so curves differ only through ρ and the strategy.
/// `plan.eta` sets the seed fraction; `plan.alpha_grid` is ignored.
pub fn incentive_study(
    plan: &ExperimentPlan,
    network: &ProximityGraph,
    config: &IncentiveStudyConfig,
    jobs: usize,
) -> Result<IncentiveStudy, ExperimentError> {
    plan.validate()?;
    check_alpha(config.alpha)?;
    if config.rho_grid.is_empty() || config.strategies.is_empty() {
        return Err(ExperimentError::InvalidPlan("empty rho grid or strategy list".into()));
    }
    for &rho in &config.rho_grid {
        IncentiveSpec::new(config.gamma_fraction, rho, Strategy::DegreeBased)?;
    }
    let suitable = network.suitable_nodes();
    let graph = network.graph();
    let n = network.len() as f64;
    let base = Thresholds::uniform(network.len(), config.alpha)?;
    let rows = par_instances(plan.n_instances, jobs, |i| {
        let mut rng = stream(plan.master_seed, INCENTIVE_STREAM, i as u64);
        let seeds = seeds_from_order(&seed_order(&suitable, &mut rng), plan.eta)?;
        let k = gamma_size(config.gamma_fraction, network.len() - seeds.len());
        let seed_frac = seeds.len() as f64 / n;
        config
            .strategies
            .iter()
            .map(|&strategy| {
                let gamma = select_gamma(graph, &seeds, k, strategy, &mut rng);
                config
                    .rho_grid
                    .iter()
                    .map(|&rho| {
                        let th = discount_thresholds(&base, &gamma, rho)?;
                        let r = run_instance(graph, &th, &seeds, plan.horizon_steps, i, 0)?;
                        Ok((r.final_fraction, seed_frac))
                    })
                    .collect::<Result<Vec<_>, ExperimentError>>()
            })
            .collect::<Result<Vec<_>, ExperimentError>>()
    })?;
    let seeds: Vec<u64> = (0..plan.n_instances).map(|i| plan.instance_seed(INCENTIVE_STREAM, i)).collect();
    let curves = config
        .strategies
        .iter()
        .enumerate()
        .map(|(s, &strategy)| {
            let per_instance = rows.iter().map(|r| r[s].clone()).collect();
            (strategy, collect_points("rho", &config.rho_grid, seeds.clone(), per_instance))
        })
        .collect();
    Ok(IncentiveStudy { alpha: config.alpha, gamma_fraction: config.gamma_fraction, curves })
}

pub const COHESIVE_STREAM: &str = "cohesive";

/// Random connected graph on `n` nodes: a random recursive tree plus each
/// remaining pair with probability `extra_p`.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, extra_p: f64, rng: &mut R) -> Graph {
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.push((label[i], label[j]));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < extra_p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("edges are in range and loop-free")
}

/// One graph of the cohesive-set battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryCase {
    pub index: usize,
    pub n: usize,
    pub edges: usize,
    pub seeds: Vec<usize>,
    pub final_adopters: Vec<usize>,
    pub omega: Vec<usize>,
    /// Final adopters equal `V \ Ω` from the exhaustive oracle.
    pub holds: bool,
    /// Peeling returned the oracle's Ω.
    pub peel_matches: bool,
}

/// Random connected graphs with `2..=max_n` nodes, thresholds uniform in
/// `[0, 1]` and random seed sets, each checked against the exhaustive
/// cohesive-set oracle.
pub fn cohesive_battery(graphs: usize, max_n: usize, master_seed: u64, jobs: usize) -> Result<Vec<BatteryCase>, ExperimentError> {
    if !(2..=cascade::ORACLE_MAX_NODES).contains(&max_n) {
        return Err(ExperimentError::InvalidPlan(format!(
            "max_n must lie in [2, {}]",
            cascade::ORACLE_MAX_NODES
        )));
    }
    par_instances(graphs, jobs, |i| {
        let mut rng = stream(master_seed, COHESIVE_STREAM, i as u64);
        let n = rng.gen_range(2..=max_n);
        let g = random_connected_graph(n, rng.gen_range(0.0..0.6), &mut rng);
        let th = Thresholds::new((0..n).map(|_| rng.gen::<f64>()).collect())?;
        let p_seed = rng.gen_range(0.0..0.5);
        let seeds: Vec<usize> = (0..n).filter(|_| rng.gen::<f64>() < p_seed).collect();
        let check = cascade::verify_cohesive_complement(&g, &th, &seeds)?;
        let peel = cascade::max_cohesive_peel(&g, &th, &seeds)?;
        Ok(BatteryCase {
            index: i,
            n,
            edges: g.edge_count(),
            seeds,
            peel_matches: peel.omega == check.omega,
            holds: check.holds,
            final_adopters: check.final_adopters,
            omega: check.omega,
        })
    })
}

/// `graph,n,edges,seeds,final_adopters,omega,holds,peel_matches`; node
/// lists are space-separated.
pub fn battery_csv(cases: &[BatteryCase]) -> String {
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut s = String::from("graph,n,edges,seeds,final_adopters,omega,holds,peel_matches\n");
    for c in cases {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            c.index,
            c.n,
            c.edges,
            join(&c.seeds),
            join(&c.final_adopters),
            join(&c.omega),
            c.holds,
            c.peel_matches
        )
        .unwrap();
    }
    s
}

fn frac(x: f64) -> String {
    format!("{x:.6}")
}

/// `instance,t,months,new_adopters,cumulative_adopters,fraction`
pub fn trajectory_csv(sweep: &TimeSweep, step_months: u32) -> String {
    let mut s = String::from("instance,t,months,new_adopters,cumulative_adopters,fraction\n");
    for r in &sweep.runs {
        for (t, &c) in r.cumulative.iter().enumerate() {
            let new = if t == 0 { c } else { c - r.cumulative[t - 1] };
            let months = t as u64 * step_months as u64;
            writeln!(s, "{},{t},{months},{new},{c},{}", r.instance, frac(r.trajectory[t])).unwrap();
        }
    }
    s
}

/// `t,months,mean,std`
pub fn trajectory_summary_csv(sweep: &TimeSweep, step_months: u32) -> String {
    let mut s = String::from("t,months,mean,std\n");
    for (t, (m, d)) in sweep.mean.iter().zip(&sweep.std).enumerate() {
        writeln!(s, "{t},{},{},{}", t as u64 * step_months as u64, frac(*m), frac(*d)).unwrap();
    }
    s
}

/// `param,instance,final_fraction`
pub fn finals_csv(sweep: &ParamSweep) -> String {
    let mut s = String::from("param,instance,final_fraction\n");
    for p in &sweep.points {
        for (i, f) in p.finals.iter().enumerate() {
            writeln!(s, "{},{i},{}", p.param, frac(*f)).unwrap();
        }
    }
    s
}

/// `param,mean,std`
pub fn summary_csv(sweep: &ParamSweep) -> String {
    let mut s = String::from("param,mean,std\n");
    for p in &sweep.points {
        writeln!(s, "{},{},{}", p.param, frac(p.mean), frac(p.std)).unwrap();
    }
    s
}

/// Run description written next to the result files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub plan: ExperimentPlan,
    pub parameters: std::collections::BTreeMap<String, String>,
    pub network_hash: String,
    pub network_nodes: usize,
    pub instance_seeds: Vec<u64>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }
}

/// Gnuplot script plotting `mean,std` summaries with error bars, one
/// line per `(csv file, title)` series.
pub fn gnuplot_script(series: &[(&str, &str)], xlabel: &str, output_png: &str) -> String {
    let mut s = String::from("set datafile separator ','\n");
    writeln!(s, "set xlabel '{xlabel}'").unwrap();
    s.push_str("set ylabel 'fraction of adopters'\nset yrange [0:1]\nset key top right\n");
    writeln!(s, "set terminal pngcairo size 800,500\nset output '{output_png}'").unwrap();
    let plots: Vec<String> = series
        .iter()
        .map(|(csv, title)| format!("'{csv}' every ::1 using 1:2:3 with yerrorlines title '{title}'"))
        .collect();
    writeln!(s, "plot {}", plots.join(", \\\n     ")).unwrap();
    s
}
