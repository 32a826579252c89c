//! Cross-checks the exact search against exhaustive enumeration on small,
//! randomly pre-loaded networks.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{brute_force_pair, edge_exclusion_pair, BruteForceBudget};
use crate::costmodel::{Demand, ModulationModel, PathModel, Rmsa, DEFAULT_LEVELS};
use crate::dpp::{incomparable_label_bound, search_vertex_bound, ProtectedPair, SearchStats};
use crate::error::{Error, Result};
use crate::graph::{gabriel_generate, shortest_path_metrics, Network, DEFAULT_DENSITY_KM2};
use crate::sim::{draw_endpoints, draw_units, route, Algorithm};
use crate::spectrum::{Cu, SpectrumSet};

/// Relative tolerance when comparing pair costs from different algorithms.
pub const COST_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CorroborationSpec {
    pub searches: usize,
    pub min_vertices: u32,
    pub max_vertices: u32,
    pub omegas: Vec<u32>,
    pub gammas: Vec<u32>,
    pub seed: u64,
    pub density_km2: f64,
    pub levels: u32,
    /// Longest reach as a multiple of the longest shortest path.
    pub reach_scale: f64,
    pub budget: BruteForceBudget,
    pub jobs: usize,
}

impl Default for CorroborationSpec {
    fn default() -> Self {
        CorroborationSpec {
            searches: 5000,
            min_vertices: 6,
            max_vertices: 10,
            omegas: vec![4, 8],
            gammas: vec![1, 2, 3],
            seed: 0,
            density_km2: DEFAULT_DENSITY_KM2,
            levels: DEFAULT_LEVELS,
            reach_scale: 1.5,
            budget: BruteForceBudget::default(),
            jobs: 0,
        }
    }
}

impl CorroborationSpec {
    fn validate(&self) -> Result<()> {
        if self.min_vertices < 2 || self.min_vertices > self.max_vertices {
            return Err(Error::InvalidConfig(format!(
                "vertex range {}..={} is empty or too small",
                self.min_vertices, self.max_vertices
            )));
        }
        if self.omegas.is_empty() || self.omegas.contains(&0) {
            return Err(Error::InvalidConfig("omega list must be non-empty and positive".into()));
        }
        if self.reach_scale.is_nan() || self.reach_scale <= 0.0 {
            return Err(Error::InvalidConfig("reach scale must be positive".into()));
        }
        if self.gammas.is_empty() || self.gammas.contains(&0) {
            return Err(Error::InvalidConfig("gamma list must be non-empty and positive".into()));
        }
        Ok(())
    }
}

/// One search instance: a pre-loaded network, a demand and a modulation model.
#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub index: usize,
    pub seed: u64,
    pub network: Network,
    pub demand: Demand,
    pub modulation: ModulationModel,
}

/// Free units of one edge after up to `max_blocks` random busy blocks.
fn occupy<R: Rng>(rng: &mut R, omega: u32, max_blocks: u32) -> SpectrumSet {
    let blocks = rng.random_range(0..=max_blocks);
    let widest = (omega / 4).max(1);
    let busy = SpectrumSet::from_cus((0..blocks).map(|_| {
        let size = rng.random_range(1..=widest);
        let lo = rng.random_range(0..=omega - size);
        Cu::with_size(lo, size)
    }));
    SpectrumSet::from_units((0..omega).filter(|&u| !busy.contains_unit(u)))
}

/// Builds case `index` of the corpus; the same spec and index always give the
/// same case.
pub fn generate_case(spec: &CorroborationSpec, index: usize) -> Result<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let n = rng.random_range(spec.min_vertices..=spec.max_vertices);
    let omega = *spec.omegas.choose(&mut rng).expect("validated");
    let gamma = *spec.gammas.choose(&mut rng).expect("validated");
    let mut graph_seed: u64 = rng.random();
    let mut network = loop {
        let net = gabriel_generate(n, spec.density_km2, omega, graph_seed)?;
        if net.is_connected() {
            break net;
        }
        graph_seed = graph_seed.wrapping_add(1);
    };
    let max_blocks = rng.random_range(0..=2u32);
    for e in 0..network.edge_count() as u32 {
        network.set_available(e, occupy(&mut rng, omega, max_blocks))?;
    }
    let (src, dst) = draw_endpoints(&mut rng, n);
    let demand = Demand { src, dst, units_g: draw_units(&mut rng, gamma) };
    let metrics = shortest_path_metrics(&network)?;
    let modulation = ModulationModel::new(spec.levels, spec.reach_scale * metrics.diameter_len_km)?;
    Ok(Case { index, seed: spec.seed, network, demand, modulation })
}

/// Checks that `pair` is a feasible answer for the demand: two edge-disjoint
/// s-t paths, each with a CU that is free on all its edges and large enough.
pub fn validate_pair(net: &Network, demand: &Demand, model: &impl PathModel, pair: &ProtectedPair) -> std::result::Result<(), String> {
    let mut seen = HashSet::new();
    for (name, path) in [("working", &pair.working), ("protecting", &pair.protecting)] {
        let vertices = net
            .path_vertices(demand.src, &path.edges)
            .ok_or_else(|| format!("{name} path is not a walk from {}", demand.src))?;
        if vertices.last() != Some(&demand.dst) {
            return Err(format!("{name} path ends at {:?}, not {}", vertices.last(), demand.dst));
        }
        let distinct: HashSet<_> = vertices.iter().collect();
        if distinct.len() != vertices.len() {
            return Err(format!("{name} path revisits a vertex"));
        }
        for &e in &path.edges {
            if !seen.insert(e) {
                return Err(format!("edge {e} is used twice"));
            }
            if !net.available(e).contains_cu(&path.cu) {
                return Err(format!("{name} CU {} is not free on edge {e}", path.cu));
            }
        }
        let len = net.path_length(&path.edges);
        let need = model
            .units_required(len)
            .ok_or_else(|| format!("{name} path of {len} km is beyond reach"))?;
        if path.cu.size() < need {
            return Err(format!("{name} CU {} is smaller than the {need} units needed", path.cu));
        }
    }
    Ok(())
}

pub fn costs_agree(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= COST_REL_TOL * a.abs().max(b.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Agree,
    Mismatch,
    /// Enumeration gave up; nothing can be concluded.
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    pub index: usize,
    pub vertices: u32,
    pub edges: usize,
    pub omega: u32,
    pub units_g: u32,
    pub verdict: Verdict,
    pub exact_cost: Option<f64>,
    pub reference_cost: Option<f64>,
    pub heuristic_cost: Option<f64>,
    /// Exact answer failed [`validate_pair`].
    pub invalid: Option<String>,
    /// Heuristic found a pair the exact search missed or beat.
    pub heuristic_beats_exact: bool,
    pub bounds_hold: bool,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub cases: Vec<CaseReport>,
    pub agreements: usize,
    pub mismatches: usize,
    pub budget_exceeded: usize,
    pub exact_found: usize,
    pub heuristic_found: usize,
    pub heuristic_beats_exact: usize,
    pub bound_violations: usize,
    pub elapsed_s: f64,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.mismatches == 0 && self.heuristic_beats_exact == 0 && self.bound_violations == 0
    }
}

/// Signature of the search under test.
pub trait SearchFn: Fn(&Network, &Demand, &ModulationModel) -> Result<(Option<ProtectedPair>, SearchStats)> + Sync {}

impl<F> SearchFn for F where F: Fn(&Network, &Demand, &ModulationModel) -> Result<(Option<ProtectedPair>, SearchStats)> + Sync {}

pub fn exact_search(net: &Network, demand: &Demand, modulation: &ModulationModel) -> Result<(Option<ProtectedPair>, SearchStats)> {
    route(Algorithm::Exact, net, demand, modulation)
}

pub fn check_case(case: &Case, search: &impl SearchFn, budget: BruteForceBudget) -> Result<CaseReport> {
    let net = &case.network;
    let model = Rmsa::new(case.modulation, case.demand.units_g);
    let (exact, stats) = search(net, &case.demand, &case.modulation)?;
    let heuristic = edge_exclusion_pair(net, case.demand.src, case.demand.dst, &model)?;
    let reference = match brute_force_pair(net, case.demand.src, case.demand.dst, &model, budget) {
        Ok(r) => Some(r),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let exact_cost = exact.as_ref().map(|p| p.cost);
    let heuristic_cost = heuristic.as_ref().map(|p| p.cost);
    let invalid = exact.as_ref().and_then(|p| validate_pair(net, &case.demand, &model, p).err());
    let verdict = match &reference {
        None => Verdict::BudgetExceeded,
        Some(r) => {
            let same = match (exact_cost, r.as_ref().map(|p| p.cost)) {
                (None, None) => true,
                (Some(a), Some(b)) => costs_agree(a, b),
                _ => false,
            };
            if same && invalid.is_none() {
                Verdict::Agree
            } else {
                Verdict::Mismatch
            }
        }
    };
    let heuristic_beats_exact = match (exact_cost, heuristic_cost) {
        (_, None) => false,
        (None, Some(_)) => true,
        (Some(e), Some(h)) => e > h && !costs_agree(e, h),
    };
    let n = u64::from(net.vertex_count());
    let bounds_hold = stats.touched_vertices <= search_vertex_bound(n)
        && stats.max_labels_per_vertex <= incomparable_label_bound(u64::from(net.omega()));
    Ok(CaseReport {
        index: case.index,
        vertices: net.vertex_count(),
        edges: net.edge_count(),
        omega: net.omega(),
        units_g: case.demand.units_g,
        verdict,
        exact_cost,
        reference_cost: reference.flatten().map(|p| p.cost),
        heuristic_cost,
        invalid,
        heuristic_beats_exact,
        bounds_hold,
        stats,
    })
}

/// Generates and checks every case of the spec with the given search.
pub fn corroborate(spec: &CorroborationSpec, search: &impl SearchFn) -> Result<Report> {
    spec.validate()?;
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let cases: Vec<CaseReport> = pool.install(|| {
        (0..spec.searches)
            .into_par_iter()
            .map(|i| check_case(&generate_case(spec, i)?, search, spec.budget))
            .collect::<Result<_>>()
    })?;
    let mut report = Report { elapsed_s: started.elapsed().as_secs_f64(), ..Report::default() };
    for c in &cases {
        match c.verdict {
            Verdict::Agree => report.agreements += 1,
            Verdict::Mismatch => report.mismatches += 1,
            Verdict::BudgetExceeded => report.budget_exceeded += 1,
        }
        report.exact_found += usize::from(c.exact_cost.is_some());
        report.heuristic_found += usize::from(c.heuristic_cost.is_some());
        report.heuristic_beats_exact += usize::from(c.heuristic_beats_exact);
        report.bound_violations += usize::from(!c.bounds_hold);
    }
    report.cases = cases;
    info!(
        "{} cases: {} agree, {} mismatch, {} over budget in {:.1}s",
        spec.searches, report.agreements, report.mismatches, report.budget_exceeded, report.elapsed_s
    );
    Ok(report)
}

/// Everything needed to rerun one case by hand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Bundle {
    pub index: usize,
    pub seed: u64,
    pub demand: Demand,
    pub levels: u32,
    pub reach_r1_km: f64,
    pub exact_cost: Option<f64>,
    pub reference_cost: Option<f64>,
    pub note: Option<String>,
    pub network: serde_json::Value,
}

impl Bundle {
    pub fn new(case: &Case, report: &CaseReport) -> Result<Self> {
        Ok(Bundle {
            index: case.index,
            seed: case.seed,
            demand: case.demand,
            levels: case.modulation.levels(),
            reach_r1_km: case.modulation.reach_r1_km(),
            exact_cost: report.exact_cost,
            reference_cost: report.reference_cost,
            note: report.invalid.clone(),
            network: serde_json::from_str(&case.network.to_json())?,
        })
    }

    pub fn to_case(&self) -> Result<Case> {
        Ok(Case {
            index: self.index,
            seed: self.seed,
            network: Network::from_json(&self.network.to_string())?,
            demand: self.demand,
            modulation: ModulationModel::new(self.levels, self.reach_r1_km)?,
        })
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(format!("mismatch-{:05}.json", self.index));
        let text = serde_json::to_string_pretty(self)?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Writes a bundle for every mismatching case and returns their paths.
pub fn write_mismatch_bundles(spec: &CorroborationSpec, report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    report
        .cases
        .iter()
        .filter(|c| c.verdict == Verdict::Mismatch)
        .map(|c| Bundle::new(&generate_case(spec, c.index)?, c)?.save(dir))
        .collect()
}
