//! Parameter sweeps over simulation runs, with CSV output.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::costmodel::DEFAULT_LEVELS;
use crate::error::{Error, Result};
use crate::graph::DEFAULT_DENSITY_KM2;
use crate::sim::{resolve_network, Algorithm, GammaMode, NetworkSource, ReachPolicy, RunStats, SimConfig, Simulation};

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignSpec {
    pub vertices: Vec<u32>,
    pub omegas: Vec<u32>,
    pub gammas: Vec<GammaMode>,
    pub loads: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    /// Networks per grid cell; sample `i` uses seed `base_seed + i`.
    pub samples: u32,
    pub base_seed: u64,
    pub tau_days: f64,
    pub horizon_days: f64,
    pub warmup_days: f64,
    pub density_km2: f64,
    pub levels: u32,
    pub record_timing: bool,
    /// Worker threads; 0 picks one per core.
    pub jobs: usize,
}

impl Default for CampaignSpec {
    fn default() -> Self {
        CampaignSpec {
            vertices: vec![25],
            omegas: vec![160],
            gammas: vec![GammaMode::PercentOfOmega(10.0)],
            loads: vec![0.5],
            algorithms: vec![Algorithm::Exact],
            samples: 1,
            base_seed: 0,
            tau_days: 10.0,
            horizon_days: 150.0,
            warmup_days: 50.0,
            density_km2: DEFAULT_DENSITY_KM2,
            levels: DEFAULT_LEVELS,
            record_timing: true,
            jobs: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Cell {
    vertices: u32,
    omega: u32,
    gamma: GammaMode,
    load: f64,
    seed: u64,
    algorithm: Algorithm,
}

impl CampaignSpec {
    fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &vertices in &self.vertices {
            for &omega in &self.omegas {
                for &gamma in &self.gammas {
                    for &load in &self.loads {
                        for i in 0..self.samples {
                            for &algorithm in &self.algorithms {
                                let seed = self.base_seed + u64::from(i);
                                cells.push(Cell { vertices, omega, gamma, load, seed, algorithm });
                            }
                        }
                    }
                }
            }
        }
        cells
    }

    pub fn run_count(&self) -> usize {
        self.vertices.len() * self.omegas.len() * self.gammas.len() * self.loads.len() * self.samples as usize * self.algorithms.len()
    }
}

/// One finished simulation run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    /// Seed the network was actually generated from.
    pub network_seed: u64,
    pub vertices: u32,
    pub edges: usize,
    pub omega: u32,
    pub gamma: u32,
    pub load: f64,
    pub algorithm: Algorithm,
    pub stats: RunStats,
}

fn run_cell(spec: &CampaignSpec, cell: &Cell) -> Result<RunRecord> {
    let source = NetworkSource::Gabriel { vertices: cell.vertices, density_km2: spec.density_km2, seed: cell.seed };
    let (net, network_seed) = resolve_network(&source, cell.omega)?;
    let config = SimConfig {
        network: source,
        omega: cell.omega,
        gamma: cell.gamma,
        offered_load: cell.load,
        tau_days: spec.tau_days,
        horizon_days: spec.horizon_days,
        warmup_days: spec.warmup_days,
        seed: cell.seed,
        algorithm: cell.algorithm,
        levels: spec.levels,
        reach: ReachPolicy::DiameterScaled,
        record_timing: spec.record_timing,
    };
    let edges = net.edge_count();
    let stats = Simulation::new(config, net)?.run_to_end()?;
    Ok(RunRecord {
        seed: cell.seed,
        network_seed: network_seed.unwrap_or(cell.seed),
        vertices: cell.vertices,
        edges,
        omega: cell.omega,
        gamma: cell.gamma.resolve(cell.omega),
        load: cell.load,
        algorithm: cell.algorithm,
        stats,
    })
}

/// A run that could not complete.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunFailure {
    pub seed: u64,
    pub vertices: u32,
    pub omega: u32,
    pub gamma: u32,
    pub load: f64,
    pub algorithm: Algorithm,
    pub error: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CampaignOutcome {
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
}

/// Runs the whole grid. A failing run is recorded and the others go on.
/// Results come back in grid order whatever the number of workers.
pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignOutcome> {
    if spec.samples == 0 || spec.run_count() == 0 {
        return Err(Error::InvalidConfig("campaign grid is empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let cells = spec.cells();
    let results: Vec<Result<RunRecord>> = pool.install(|| cells.par_iter().map(|c| run_cell(spec, c)).collect());
    let mut outcome = CampaignOutcome::default();
    for (cell, result) in cells.iter().zip(results) {
        match result {
            Ok(r) => outcome.records.push(r),
            Err(e) => {
                warn!("run seed {} on {} vertices failed: {e}", cell.seed, cell.vertices);
                outcome.failures.push(RunFailure {
                    seed: cell.seed,
                    vertices: cell.vertices,
                    omega: cell.omega,
                    gamma: cell.gamma.resolve(cell.omega),
                    load: cell.load,
                    algorithm: cell.algorithm,
                    error: e.to_string(),
                });
            }
        }
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct RunRow<'a> {
    seed: u64,
    vertices: u32,
    edges: usize,
    omega: u32,
    gamma: u32,
    load: f64,
    algorithm: &'a str,
    mean_utilization: f64,
    bbp: f64,
    searches: u64,
    time_mean_s: f64,
    time_max_s: f64,
    words_mean: f64,
    words_max: u64,
}

/// Summary of the runs sharing every parameter except the seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PopulationSummary {
    pub vertices: u32,
    pub omega: u32,
    pub gamma: u32,
    pub load: f64,
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean_utilization: f64,
    pub bbp_mean: f64,
    pub bbp_rse: f64,
    pub time_mean_s: f64,
    pub time_max_s: f64,
    pub words_mean: f64,
    pub words_max: u64,
    pub words_rse: f64,
}

/// Blocking difference between the heuristic and the exact search on the
/// same network and workload.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairedDelta {
    pub vertices: u32,
    pub omega: u32,
    pub gamma: u32,
    pub load: f64,
    pub seed: u64,
    pub bbp_exact: f64,
    pub bbp_edge_exclusion: f64,
    /// Heuristic minus exact.
    pub delta: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Standard error of the mean over the mean; zero when undefined.
pub fn relative_standard_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    let m = mean(xs);
    if n < 2 || m == 0.0 {
        return 0.0;
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt() / m.abs()
}

type PopulationKey = (u32, u32, u32, u64, Algorithm);

fn population_key(r: &RunRecord) -> PopulationKey {
    (r.vertices, r.omega, r.gamma, r.load.to_bits(), r.algorithm)
}

pub fn summarize(records: &[RunRecord]) -> Vec<PopulationSummary> {
    let mut groups: Vec<(PopulationKey, Vec<&RunRecord>)> = Vec::new();
    for r in records {
        let key = population_key(r);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(_, g)| {
            let pick = |f: fn(&RunStats) -> f64| g.iter().map(|r| f(&r.stats)).collect::<Vec<_>>();
            let bbp = pick(|s| s.bbp);
            let words = pick(|s| s.words_mean);
            PopulationSummary {
                vertices: g[0].vertices,
                omega: g[0].omega,
                gamma: g[0].gamma,
                load: g[0].load,
                algorithm: g[0].algorithm,
                runs: g.len(),
                mean_utilization: mean(&pick(|s| s.mean_utilization)),
                bbp_mean: mean(&bbp),
                bbp_rse: relative_standard_error(&bbp),
                time_mean_s: mean(&pick(|s| s.time_mean_s)),
                time_max_s: g.iter().map(|r| r.stats.time_max_s).fold(0.0, f64::max),
                words_mean: mean(&words),
                words_max: g.iter().map(|r| r.stats.words_max).max().unwrap_or(0),
                words_rse: relative_standard_error(&words),
            }
        })
        .collect()
}

/// Population key plus seed.
type RunKey = (u32, u32, u32, u64, u64);

pub fn paired_deltas(records: &[RunRecord]) -> Vec<PairedDelta> {
    let mut by_run: BTreeMap<RunKey, (Option<f64>, Option<f64>)> = BTreeMap::new();
    for r in records {
        let slot = by_run.entry((r.vertices, r.omega, r.gamma, r.load.to_bits(), r.seed)).or_default();
        match r.algorithm {
            Algorithm::Exact => slot.0 = Some(r.stats.bbp),
            Algorithm::EdgeExclusion => slot.1 = Some(r.stats.bbp),
            Algorithm::BruteForce => {}
        }
    }
    by_run
        .into_iter()
        .filter_map(|((vertices, omega, gamma, load, seed), pair)| match pair {
            (Some(bbp_exact), Some(bbp_edge_exclusion)) => Some(PairedDelta {
                vertices,
                omega,
                gamma,
                load: f64::from_bits(load),
                seed,
                bbp_exact,
                bbp_edge_exclusion,
                delta: bbp_edge_exclusion - bbp_exact,
            }),
            _ => None,
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse(format!("{other:?}")),
    })?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_runs_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    write_csv(
        path,
        records.iter().map(|r| RunRow {
            seed: r.seed,
            vertices: r.vertices,
            edges: r.edges,
            omega: r.omega,
            gamma: r.gamma,
            load: r.load,
            algorithm: r.algorithm.name(),
            mean_utilization: r.stats.mean_utilization,
            bbp: r.stats.bbp,
            searches: r.stats.searches,
            time_mean_s: r.stats.time_mean_s,
            time_max_s: r.stats.time_max_s,
            words_mean: r.stats.words_mean,
            words_max: r.stats.words_max,
        }),
    )
}

/// Writes `runs.csv`, `summary.csv`, `bbp_deltas.csv` when both the exact
/// search and the heuristic ran, and `failures.csv` when a run failed.
pub fn write_outputs(dir: &Path, outcome: &CampaignOutcome) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let records = &outcome.records;
    write_runs_csv(&dir.join("runs.csv"), records)?;
    write_csv(&dir.join("summary.csv"), summarize(records))?;
    let deltas = paired_deltas(records);
    if !deltas.is_empty() {
        write_csv(&dir.join("bbp_deltas.csv"), deltas)?;
    }
    if !outcome.failures.is_empty() {
        write_csv(&dir.join("failures.csv"), &outcome.failures)?;
    }
    Ok(())
}
