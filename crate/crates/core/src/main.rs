use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use eon_dpp::baselines::BruteForceBudget;
use eon_dpp::campaign::{run_campaign, write_outputs, CampaignSpec};
use eon_dpp::corroborate::{corroborate, exact_search, write_mismatch_bundles, CorroborationSpec};
use eon_dpp::costmodel::{Demand, ModulationModel, DEFAULT_LEVELS};
use eon_dpp::dpp::RoutedPath;
use eon_dpp::graph::{gabriel_generate, shortest_path_metrics, DEFAULT_DENSITY_KM2};
use eon_dpp::sim::{route, Algorithm, GammaMode};
use eon_dpp::{Cu, Error, Network};

const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "eon-dpp", version, about = "Dedicated path protection routing for elastic optical networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random Gabriel graph.
    Gengraph(GengraphArgs),
    /// Find a protected pair for one demand.
    Search(SearchArgs),
    /// Check the exact search against exhaustive enumeration.
    Corroborate(CorroborateArgs),
    /// Run a simulation campaign.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct GengraphArgs {
    #[arg(long, short = 'n', env = "EON_DPP_VERTICES", value_parser = clap::value_parser!(u32).range(2..))]
    vertices: u32,
    #[arg(long, env = "EON_DPP_DENSITY", default_value_t = DEFAULT_DENSITY_KM2)]
    density: f64,
    #[arg(long, env = "EON_DPP_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "EON_DPP_OMEGA", default_value_t = 160)]
    omega: u32,
    /// Output file; stdout when absent.
    #[arg(long, env = "EON_DPP_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, env = "EON_DPP_GRAPH")]
    graph: PathBuf,
    #[arg(long, short = 's')]
    src: u32,
    #[arg(long, short = 't')]
    dst: u32,
    /// Units requested at the most efficient modulation.
    #[arg(long, short = 'g', default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    units: u32,
    #[arg(long, env = "EON_DPP_ALGO", default_value = "exact", value_parser = parse_algorithm)]
    algo: Algorithm,
    #[arg(long, env = "EON_DPP_LEVELS", default_value_t = DEFAULT_LEVELS)]
    levels: u32,
    /// Reach of the least efficient modulation; 1.5 times the longest
    /// shortest path when absent.
    #[arg(long, env = "EON_DPP_REACH_KM")]
    reach_km: Option<f64>,
    /// Report wall-clock search time instead of zero.
    #[arg(long, env = "EON_DPP_TIMING")]
    timing: bool,
}

#[derive(Args)]
struct CorroborateArgs {
    #[arg(long, env = "EON_DPP_SEARCHES", default_value_t = 5000)]
    searches: usize,
    #[arg(long, default_value_t = 6)]
    min_vertices: u32,
    #[arg(long, default_value_t = 10)]
    max_vertices: u32,
    #[arg(long, env = "EON_DPP_OMEGA", value_delimiter = ',', default_values_t = [4, 8])]
    omega: Vec<u32>,
    #[arg(long, env = "EON_DPP_GAMMA", value_delimiter = ',', default_values_t = [1, 2, 3])]
    gamma: Vec<u32>,
    #[arg(long, env = "EON_DPP_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "EON_DPP_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Directory for mismatch reproduction bundles.
    #[arg(long, env = "EON_DPP_OUT", default_value = "corroboration")]
    out: PathBuf,
    #[arg(long, env = "EON_DPP_MAX_POPS", default_value_t = BruteForceBudget::default().max_pops)]
    max_pops: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, env = "EON_DPP_VERTICES", value_delimiter = ',', default_values_t = [25])]
    vertices: Vec<u32>,
    #[arg(long, env = "EON_DPP_OMEGA", value_delimiter = ',', default_values_t = [160])]
    omega: Vec<u32>,
    /// Mean demand size in units.
    #[arg(long, env = "EON_DPP_GAMMA", value_delimiter = ',', conflicts_with = "gamma_pct")]
    gamma: Vec<u32>,
    /// Mean demand size as a percentage of omega.
    #[arg(long, env = "EON_DPP_GAMMA_PCT", value_delimiter = ',')]
    gamma_pct: Vec<f64>,
    #[arg(long, env = "EON_DPP_LOAD", value_delimiter = ',', default_values_t = [0.5])]
    load: Vec<f64>,
    #[arg(long, env = "EON_DPP_ALGO", value_delimiter = ',', default_value = "exact", value_parser = parse_algorithm)]
    algo: Vec<Algorithm>,
    #[arg(long, env = "EON_DPP_SAMPLES", default_value_t = 1)]
    samples: u32,
    #[arg(long, env = "EON_DPP_SEED", default_value_t = 0)]
    seed: u64,
    /// Mean holding time in days.
    #[arg(long, env = "EON_DPP_TAU", default_value_t = 10.0)]
    tau: f64,
    /// Simulated days, warm-up included.
    #[arg(long, env = "EON_DPP_DAYS", default_value_t = 150.0)]
    days: f64,
    #[arg(long, env = "EON_DPP_WARMUP", default_value_t = 50.0)]
    warmup: f64,
    #[arg(long, env = "EON_DPP_DENSITY", default_value_t = DEFAULT_DENSITY_KM2)]
    density: f64,
    #[arg(long, env = "EON_DPP_JOBS", default_value_t = 0)]
    jobs: usize,
    #[arg(long, env = "EON_DPP_OUT")]
    out: PathBuf,
    /// Record wall-clock search times; runs are then no longer byte-identical.
    #[arg(long, env = "EON_DPP_TIMING")]
    timing: bool,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(USAGE)
}

fn gengraph(args: GengraphArgs) -> Result<ExitCode, Error> {
    let mut seed = args.seed;
    let net = loop {
        let net = gabriel_generate(args.vertices, args.density, args.omega, seed)?;
        if net.is_connected() {
            break net;
        }
        log::warn!("graph for seed {seed} is disconnected, regenerating with seed {}", seed + 1);
        seed += 1;
    };
    match args.out {
        Some(path) => net.save(path)?,
        None => print!("{}", net.to_json()),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct PathOut<'a> {
    edges: &'a [u32],
    cu: Cu,
}

impl<'a> From<&'a RoutedPath> for PathOut<'a> {
    fn from(p: &'a RoutedPath) -> Self {
        PathOut { edges: &p.edges, cu: p.cu }
    }
}

#[derive(Serialize)]
struct StatsOut {
    pops: u64,
    labels: u64,
    words_peak: u64,
    time_s: f64,
}

#[derive(Serialize)]
struct SearchOut<'a> {
    found: bool,
    cost: Option<f64>,
    working: Option<PathOut<'a>>,
    protecting: Option<PathOut<'a>>,
    stats: StatsOut,
}

fn search(args: SearchArgs) -> Result<ExitCode, Error> {
    let net = Network::load(&args.graph)?;
    let demand = Demand::new(args.src, args.dst, args.units)?;
    net.check_vertex(demand.src)?;
    net.check_vertex(demand.dst)?;
    let modulation = match args.reach_km {
        Some(km) => ModulationModel::new(args.levels, km)?,
        None => ModulationModel::from_diameter(shortest_path_metrics(&net)?.diameter_len_km, args.levels)?,
    };
    let started = Instant::now();
    let (pair, stats) = route(args.algo, &net, &demand, &modulation)?;
    let time_s = if args.timing { started.elapsed().as_secs_f64() } else { 0.0 };
    let out = SearchOut {
        found: pair.is_some(),
        cost: pair.as_ref().map(|p| p.cost),
        working: pair.as_ref().map(|p| (&p.working).into()),
        protecting: pair.as_ref().map(|p| (&p.protecting).into()),
        stats: StatsOut {
            pops: stats.pops,
            labels: stats.nodes_created,
            words_peak: stats.memory_words(),
            time_s,
        },
    };
    println!("{}", serde_json::to_string(&out)?);
    Ok(if pair.is_some() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn corroborate_cmd(args: CorroborateArgs) -> Result<ExitCode, Error> {
    if args.searches == 0 {
        return Err(Error::InvalidConfig("at least one search is needed".into()));
    }
    let spec = CorroborationSpec {
        searches: args.searches,
        min_vertices: args.min_vertices,
        max_vertices: args.max_vertices,
        omegas: args.omega,
        gammas: args.gamma,
        seed: args.seed,
        budget: BruteForceBudget { max_pops: args.max_pops, ..BruteForceBudget::default() },
        jobs: args.jobs,
        ..CorroborationSpec::default()
    };
    let report = corroborate(&spec, &exact_search)?;
    let bundles = write_mismatch_bundles(&spec, &report, &args.out)?;
    let summary = json!({
        "searches": spec.searches,
        "agreements": report.agreements,
        "mismatches": report.mismatches,
        "budget_exceeded": report.budget_exceeded,
        "exact_found": report.exact_found,
        "heuristic_found": report.heuristic_found,
        "heuristic_beats_exact": report.heuristic_beats_exact,
        "bound_violations": report.bound_violations,
        "bundles": bundles,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    eprintln!("elapsed {:.2}s", report.elapsed_s);
    Ok(if report.is_clean() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn simulate(args: SimulateArgs) -> Result<ExitCode, Error> {
    let gammas: Vec<GammaMode> = if !args.gamma_pct.is_empty() {
        args.gamma_pct.iter().map(|&p| GammaMode::PercentOfOmega(p)).collect()
    } else if !args.gamma.is_empty() {
        args.gamma.iter().map(|&g| GammaMode::Units(g)).collect()
    } else {
        vec![GammaMode::PercentOfOmega(10.0)]
    };
    if gammas.iter().any(|g| matches!(*g, GammaMode::Units(0)) || matches!(*g, GammaMode::PercentOfOmega(p) if p.is_nan() || p <= 0.0)) {
        return Err(Error::InvalidConfig("gamma must be positive".into()));
    }
    let spec = CampaignSpec {
        vertices: args.vertices,
        omegas: args.omega,
        gammas,
        loads: args.load,
        algorithms: args.algo,
        samples: args.samples,
        base_seed: args.seed,
        tau_days: args.tau,
        horizon_days: args.days,
        warmup_days: args.warmup,
        density_km2: args.density,
        levels: DEFAULT_LEVELS,
        record_timing: args.timing,
        jobs: args.jobs,
    };
    let outcome = run_campaign(&spec)?;
    write_outputs(&args.out, &outcome)?;
    println!(
        "{} runs written to {}, {} failed",
        outcome.records.len(),
        args.out.display(),
        outcome.failures.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gengraph(a) => gengraph(a),
        Command::Search(a) => search(a),
        Command::Corroborate(a) => corroborate_cmd(a),
        Command::Simulate(a) => simulate(a),
    };
    result.unwrap_or_else(fail)
}
